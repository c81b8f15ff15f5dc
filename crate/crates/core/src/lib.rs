//! Rate regions for two-user compound broadcast channels.
//!
//! Discrete side: interference-decoding and Marton regions on a BEC/BSC
//! compound, with exact Fourier-Motzkin projection of the symbolic systems.
//! Gaussian side: common- and multiple-description dirty-paper coding on the
//! 2×1 compound MISO channel, and a sampled outer bound.

pub mod compound_id;
pub mod info;
pub mod miso;
pub mod miso_outer;
pub mod model;
pub mod optimizer;
pub mod polyhedra;

/// `v` printed with 12 significant digits.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{}", if v == 0.0 { 0.0 } else { v });
    }
    let digits = 11 - v.abs().log10().floor() as i64;
    if (0..=20).contains(&digits) {
        let s = format!("{:.*}", digits as usize, v);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.11e}", v)
    }
}

use nalgebra::{DMatrix, SymmetricEigen};

use super::{DpcScheme, MisoChannel, MisoError};

fn sub_det(cov: &DMatrix<f64>, idx: &[usize]) -> f64 {
    let m = DMatrix::from_fn(idx.len(), idx.len(), |r, c| cov[(idx[r], idx[c])]);
    m.determinant()
}

/// `I(A;B)` in bits for jointly Gaussian variables with covariance `cov`,
/// from `½·log₂(det K_A · det K_B / det K_AB)`.
pub fn gaussian_mi_oracle(cov: &DMatrix<f64>, a: &[usize], b: &[usize]) -> Result<f64, MisoError> {
    let n = cov.nrows();
    if cov.ncols() != n || a.iter().chain(b).any(|&i| i >= n) {
        return Err(MisoError::Insufficient("index outside covariance".into()));
    }
    let scale = cov.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if (cov - cov.transpose()).amax() > 1e-9 * scale {
        return Err(MisoError::NotPsd(f64::NAN));
    }
    let min_eig = SymmetricEigen::new(cov.clone()).eigenvalues.min();
    if min_eig < -1e-12 * scale {
        return Err(MisoError::NotPsd(min_eig));
    }
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let (da, db, dab) = (sub_det(cov, a), sub_det(cov, b), sub_det(cov, &ab));
    if !(da > 0.0 && db > 0.0 && dab > 0.0) {
        return Err(MisoError::NotPsd(min_eig));
    }
    Ok(0.5 * (da * db / dab).log2())
}

/// Covariance of `T · s` for independent zero-mean `s` with the given variances.
fn mixed_covariance(rows: &[Vec<f64>], variances: &[f64]) -> DMatrix<f64> {
    let t = DMatrix::from_fn(rows.len(), variances.len(), |r, c| rows[r][c]);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(variances));
    &t * d * t.transpose()
}

fn gains(channel: &MisoChannel, j: usize, scheme: &DpcScheme) -> Result<(f64, f64), MisoError> {
    let h = channel.h(j)?;
    Ok((scheme.b_u.project(h), scheme.b_v.project(h)))
}

/// `I(U₀;Y_j) − I(U₀;V)` evaluated from covariance determinants.
pub fn common_mi_gap(channel: &MisoChannel, j: usize, scheme: &DpcScheme) -> Result<f64, MisoError> {
    let (hu, hv) = gains(channel, j, scheme)?;
    let a = scheme.alpha;
    let rows = vec![vec![1.0, a, 0.0], vec![hu, hv, 1.0], vec![0.0, 1.0, 0.0]];
    let cov = mixed_covariance(&rows, &[scheme.p_u, scheme.p_v, channel.noise()]);
    Ok(gaussian_mi_oracle(&cov, &[0], &[1])? - gaussian_mi_oracle(&cov, &[0], &[2])?)
}

/// `I(U₀U_j;Y_j) − I(U₀U_j;V)` with `U_j = X_p + α_j X_v` and private power `x`.
pub fn private_mi_gap(channel: &MisoChannel, j: usize, scheme: &DpcScheme, alpha_j: f64) -> Result<f64, MisoError> {
    let (hu, hv) = gains(channel, j, scheme)?;
    let a = scheme.alpha;
    let rows = vec![
        vec![1.0, 0.0, a, 0.0],
        vec![0.0, 1.0, alpha_j, 0.0],
        vec![hu, hu, hv, 1.0],
        vec![0.0, 0.0, 1.0, 0.0],
    ];
    let cov = mixed_covariance(&rows, &[scheme.p_u - scheme.x, scheme.x, scheme.p_v, channel.noise()]);
    Ok(gaussian_mi_oracle(&cov, &[0, 1], &[2])? - gaussian_mi_oracle(&cov, &[0, 1], &[3])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miso::{dpc_common_rate, dpc_private_optimal, Beam};
    use crate::optimizer::grid_golden;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn independent_blocks_and_awgn() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        assert!(gaussian_mi_oracle(&cov, &[0], &[1]).unwrap().abs() < 1e-15);
        let (s, n) = (5.0, 0.5);
        let cov = DMatrix::from_row_slice(2, 2, &[s, s, s, s + n]);
        let v = gaussian_mi_oracle(&cov, &[0], &[1]).unwrap();
        assert!((v - 0.5 * (1.0 + s / n).log2()).abs() < 1e-12);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(gaussian_mi_oracle(&bad, &[0], &[1]), Err(MisoError::NotPsd(_))));
    }

    pub(crate) fn random_case(rng: &mut ChaCha8Rng) -> (MisoChannel, DpcScheme) {
        loop {
            let mut v = [0.0; 6];
            v.iter_mut().for_each(|e| *e = rng.gen_range(-2.0..2.0));
            let p = rng.gen_range(0.5..30.0);
            let Ok(ch) = MisoChannel::new([v[0], v[1]], [v[2], v[3]], [v[4], v[5]], p, rng.gen_range(0.2..2.0)) else {
                continue;
            };
            let split = rng.gen_range(0.05..0.95);
            let s = DpcScheme::new(
                Beam::from_angle(rng.gen_range(0.0..std::f64::consts::PI)),
                Beam::from_angle(rng.gen_range(0.0..std::f64::consts::PI)),
                p * split,
                p * (1.0 - split),
            )
            .with_alpha(rng.gen_range(-1.5..1.5))
            .with_private(p * split * rng.gen_range(0.01..0.99));
            return (ch, s);
        }
    }

    #[test]
    fn common_rate_matches_determinants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (ch, s) = random_case(&mut rng);
            for j in [1, 2] {
                let closed = dpc_common_rate(&ch, j, &s).unwrap();
                let oracle = common_mi_gap(&ch, j, &s).unwrap();
                assert!((closed - oracle).abs() < 1e-9, "{closed} vs {oracle}");
            }
        }
    }

    #[test]
    fn private_closed_form_is_the_best_private_parameter() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..60 {
            let (ch, s) = random_case(&mut rng);
            for j in [1, 2] {
                let closed = dpc_private_optimal(&ch, j, &s).unwrap();
                let (_, best) = grid_golden(|aj| private_mi_gap(&ch, j, &s, aj).unwrap(), -20.0, 20.0, 4000, 1e-12).unwrap();
                assert!((closed - best).abs() < 1e-6, "{closed} vs {best}");
            }
        }
    }
}

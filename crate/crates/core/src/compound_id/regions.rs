//! Symbolic builders for the decoding-method regions, the binning constraints
//! and the single-channel reference regions.

use serde::{Deserialize, Serialize};

use crate::model::{NetworkSpec, NodeSpec};
use crate::polyhedra::{rat_int, LinIneq, PolyError, RegionSystem, Substitution};

use super::CompoundError;

/// Decoding method per channel index; method `m` selects the `m`-th block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodingChoice {
    pub methods: Vec<u8>,
}

impl DecodingChoice {
    pub fn new(methods: Vec<u8>) -> Result<Self, CompoundError> {
        if let Some(m) = methods.iter().find(|m| !(1..=4).contains(*m)) {
            return Err(CompoundError::Method(*m));
        }
        Ok(Self { methods })
    }

    /// All 4^n choices for `n` channel indices, in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        (0..4usize.pow(n as u32))
            .map(|mut k| {
                let mut methods = vec![0u8; n];
                for m in methods.iter_mut().rev() {
                    *m = (k % 4) as u8 + 1;
                    k /= 4;
                }
                Self { methods }
            })
            .collect()
    }
}

const OWN_ONLY: [&str; 2] = ["T1 <= I(U;{Y}|Q)", "R0 + T1 <= I(QU;{Y})"];
const OTHER_ONLY: [&str; 2] = ["T2 <= I(V;{Z}|Q)", "R0 + T2 <= I(QV;{Z})"];
const FIRST_DECODES_BOTH: [&str; 3] = [
    "T1 <= I(U;{Y}V|Q)",
    "T1 + T2 <= I(UV;{Y}|Q) + I(U;V|Q)",
    "R0 + T1 + T2 <= I(QUV;{Y}) + I(U;V|Q)",
];
const SECOND_DECODES_BOTH: [&str; 3] = [
    "T2 <= I(V;{Z}U|Q)",
    "T1 + T2 <= I(UV;{Z}|Q) + I(U;V|Q)",
    "R0 + T1 + T2 <= I(QUV;{Z}) + I(U;V|Q)",
];

/// Region of decoding method `method` for the instance with outputs `y`
/// (first user) and `z` (second user), over `(R0, T1, T2)`.
pub fn build_id_region_for(y: &str, z: &str, method: u8) -> Result<RegionSystem, CompoundError> {
    let first: &[&str] = match method {
        1 | 2 => &OWN_ONLY,
        3 | 4 => &FIRST_DECODES_BOTH,
        m => return Err(CompoundError::Method(m)),
    };
    let second: &[&str] = match method {
        1 | 3 => &OTHER_ONLY,
        _ => &SECOND_DECODES_BOTH,
    };
    let lines: Vec<String> = first
        .iter()
        .chain(second)
        .map(|l| l.replace("{Y}", y).replace("{Z}", z))
        .collect();
    let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
    Ok(RegionSystem::parse(&["R0", "T1", "T2"], &refs)?)
}

/// Region of `method` for channel index `j`, outputs `Yj` and `Zj`.
pub fn build_id_region(j: usize, method: u8) -> Result<RegionSystem, CompoundError> {
    build_id_region_for(&format!("Y{j}"), &format!("Z{j}"), method)
}

/// Binning constraints over `(T1, T2, R1, R2)`.
pub fn build_t_constraints() -> RegionSystem {
    RegionSystem::parse(
        &["T1", "T2", "R1", "R2"],
        &["T1 >= R1", "T2 >= R2", "T1 + T2 > R1 + R2 + I(U;V|Q)"],
    )
    .expect("binning constraints parse")
}

/// Intersection over instances of the chosen method regions, with binning.
/// `outputs[j]` names the two receivers of instance `j`.
pub fn id_pair_system(choice: &DecodingChoice, outputs: &[(&str, &str)]) -> Result<RegionSystem, CompoundError> {
    if choice.methods.len() != outputs.len() {
        return Err(CompoundError::Params(format!(
            "{} methods for {} instances",
            choice.methods.len(),
            outputs.len()
        )));
    }
    let mut sys = build_t_constraints();
    for (m, (y, z)) in choice.methods.iter().zip(outputs) {
        sys = build_id_region_for(y, z, *m)?.conjoin(&sys);
    }
    Ok(sys)
}

/// Worst-case Marton system: method 1 at every instance.
pub fn nid_system(outputs: &[(&str, &str)]) -> Result<RegionSystem, CompoundError> {
    id_pair_system(&DecodingChoice::new(vec![1; outputs.len()])?, outputs)
}

/// Eliminates every `T*` rate variable.
pub fn project_out_t(sys: &RegionSystem) -> Result<RegionSystem, PolyError> {
    let ts: Vec<String> = sys.rate_vars().iter().filter(|v| v.starts_with('T')).cloned().collect();
    sys.fme_eliminate_all(&ts)
}

/// Moves private rate into the common rate and returns the `(R1, R2)`
/// region with no common message.
pub fn bit_recombination(sys: &RegionSystem) -> Result<RegionSystem, PolyError> {
    let sub = Substitution::new(
        &[("R0", "R0s + R01 + R02"), ("R1", "R1s - R01"), ("R2", "R2s - R02")],
        &["R0s", "R01", "R02", "R1s", "R2s"],
    )?;
    let aux: Vec<LinIneq> = ["R01 >= 0", "R02 >= 0", "R1s >= R01", "R2s >= R02"]
        .iter()
        .map(|l| LinIneq::parse(l))
        .collect::<Result<_, _>>()?;
    sys.substitute_rates(&sub, &aux)?
        .fme_eliminate_all(&["R01", "R02"])?
        .fix_var("R0s", rat_int(0))?
        .rename(&[("R1s", "R1"), ("R2s", "R2")])
}

/// The interference-decoding system with Y1 decoding its own message only,
/// Y2 and Z decoding both, as listed for the BEC/BSC example.
pub fn listed_id_system() -> RegionSystem {
    RegionSystem::parse(
        &["R0", "T1", "T2", "R1", "R2"],
        &[
            "T2 <= I(V;ZU|Q)",
            "T1 + T2 <= I(UV;Z|Q) + I(U;V|Q)",
            "R0 + T1 + T2 <= I(QUV;Z) + I(U;V|Q)",
            "T1 <= I(U;Y2V|Q)",
            "T1 + T2 <= I(UV;Y2|Q) + I(U;V|Q)",
            "R0 + T1 + T2 <= I(QUV;Y2) + I(U;V|Q)",
            "T1 <= I(U;Y1|Q)",
            "R0 + T1 <= I(QU;Y1)",
            "T1 >= R1",
            "T2 >= R2",
            "T1 + T2 > R1 + R2 + I(U;V|Q)",
        ],
    )
    .expect("listed system parses")
    .with_model(listed_id_model())
}

/// Four-inequality `(R1, R2)` region the elimination should reach.
pub fn listed_id_target() -> RegionSystem {
    RegionSystem::parse(
        &["R1", "R2"],
        &[
            "R1 <= I(QU;Y1)",
            "R1 + R2 <= I(QU;Y1) + I(V;Z|QU)",
            "R1 + R2 <= I(QU;Y1) + I(UV;Y2|Q)",
            "R1 + R2 <= I(QUV;Y2)",
        ],
    )
    .expect("target parses")
    .with_model(listed_id_model())
}

/// Y1 is a degraded version of Z; Y2 sees X directly.
pub fn listed_id_model() -> NetworkSpec {
    NetworkSpec::new(vec![
        NodeSpec::random("Q", 2, &[]),
        NodeSpec::random("U", 2, &["Q"]),
        NodeSpec::random("V", 2, &["Q", "U"]),
        NodeSpec::random("X", 2, &["Q", "U", "V"]),
        NodeSpec::random("Z", 2, &["X"]),
        NodeSpec::random("Y1", 2, &["Z"]),
        NodeSpec::random("Y2", 3, &["X"]),
    ])
    .expect("model is topologically ordered")
}

/// Single-channel regions over `(R0, R1, R2)` with outputs `Y` and `Z`:
/// kind 1 is Marton's region, 2 and 3 let one receiver decode both
/// messages, 4 lets both do so.
pub fn standard_bc_region(kind: u8) -> Result<RegionSystem, CompoundError> {
    let lines: &[&str] = match kind {
        1 => &[
            "R0 + R1 <= I(QU;Y)",
            "R0 + R2 <= I(QV;Z)",
            "R0 + R1 + R2 <= I(U;Y|Q) + I(QV;Z) - I(U;V|Q)",
            "R0 + R1 + R2 <= I(QU;Y) + I(V;Z|Q) - I(U;V|Q)",
            "2 R0 + R1 + R2 <= I(QU;Y) + I(QV;Z) - I(U;V|Q)",
        ],
        2 => &[
            "R0 + R1 <= I(QU;Y)",
            "R0 + R1 + R2 <= I(V;Z|QU) + I(QU;Y)",
            "R0 + R1 + R2 <= I(QUV;Z)",
        ],
        3 => &[
            "R0 + R2 <= I(QV;Z)",
            "R0 + R1 + R2 <= I(U;Y|QV) + I(QV;Z)",
            "R0 + R1 + R2 <= I(QUV;Y)",
        ],
        4 => &["R0 + R1 + R2 <= I(QUV;Y)", "R0 + R1 + R2 <= I(QUV;Z)"],
        m => return Err(CompoundError::Method(m)),
    };
    Ok(RegionSystem::parse(&["R0", "R1", "R2"], lines)?)
}

/// Three-auxiliary scheme: two descriptions `U1`, `U2` of the first message
/// (one per instance) and one description `V` of the second.
pub fn three_arv_region() -> RegionSystem {
    RegionSystem::parse(
        &["R0", "T11", "T12", "T2", "R1", "R2"],
        &[
            "T2 <= I(V;Z|Q)",
            "R0 + T2 <= I(QV;Z)",
            "T11 <= I(U1;Y1|Q)",
            "R0 + T11 <= I(QU1;Y1)",
            "T12 <= I(U2;Y2|Q)",
            "R0 + T12 <= I(QU2;Y2)",
            "T2 >= R2",
            "T11 >= R1",
            "T12 >= R1",
            "T11 - R1 + T2 - R2 > I(U1;V|Q)",
            "T12 - R1 + T2 - R2 > I(U2;V|Q)",
            "T11 + T12 - 2 R1 > I(U1;U2|Q)",
            "T11 + T12 - 2 R1 + T2 - R2 > I(U1;U2|Q) + I(U1U2;V|Q)",
        ],
    )
    .expect("three-auxiliary system parses")
}

/// `U1 = Q`, `U2 = V = X`, then elimination and bit recombination.
pub fn three_arv_md_reduction() -> Result<RegionSystem, PolyError> {
    let sys = three_arv_region().substitute_variables(&[("U1", &["Q"]), ("U2", &["X"]), ("V", &["X"])]);
    Ok(bit_recombination(&project_out_t(&sys)?)?.with_model(three_arv_model()))
}

pub fn three_arv_md_target() -> RegionSystem {
    RegionSystem::parse(
        &["R1", "R2"],
        &[
            "R1 <= I(Q;Y1)",
            "R1 + R2 <= I(X;Z|Q) + I(X;Y2|Q) + I(Q;Y1) - H(X|Q)",
            "R1 + R2 <= I(X;Z|Q) + I(X;Y2|Q) + I(Q;Y2) - H(X|Q)",
        ],
    )
    .expect("target parses")
    .with_model(three_arv_model())
}

pub fn three_arv_model() -> NetworkSpec {
    NetworkSpec::new(vec![
        NodeSpec::random("Q", 2, &[]),
        NodeSpec::random("X", 2, &["Q"]),
        NodeSpec::random("Z", 2, &["X"]),
        NodeSpec::random("Y1", 2, &["Z"]),
        NodeSpec::random("Y2", 3, &["X"]),
    ])
    .expect("model is topologically ordered")
}

//! Stable 2-systole and volume bounds from a scalar curvature lower bound,
//! assembled as exact monomials `q · π^s · ∏ symbol^e` with a replayable
//! derivation trace.
//!
//! Two constants have no numeric value and stay symbolic: `c_n`, the
//! cowaist constant of a spin `2n`-manifold for general bundles, and `Γ_b`
//! for `b ≥ 3` (upper envelope `C · b · ln b` with a configured `C`).

mod symbolic;
mod trace;

pub use symbolic::SymbolicBound;
pub use trace::{DerivationTrace, StepOp, TraceStep};

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::charclass::line_index_cp;
use crate::exact::{format_rational, q_frac, q_int, Q};
use crate::nonzero_combination::v_n;
use crate::{Error, Result};

fn check_scal(scal: &Q) -> Result<()> {
    if !scal.is_positive() {
        return Err(Error::argument(format!(
            "scal_min must be positive, got {}",
            format_rational(scal)
        )));
    }
    Ok(())
}

/// Upper bound `4n(2n−1)/scal_min` on the line-bundle Â-cowaist of a spin
/// `2n`-manifold.
pub fn acw_upper_bound(half_dim: usize, scal: &Q) -> Result<Q> {
    if half_dim < 1 {
        return Err(Error::argument("half dimension must be >= 1"));
    }
    check_scal(scal)?;
    let n = half_dim as i64;
    Ok(q_int(4 * n * (2 * n - 1)) / scal)
}

/// `n(2n−1)`, the number of index pairs `p < q` among `2n`.
pub fn clifford_pair_count(n: usize) -> u64 {
    let n = n as u64;
    let count = n * (2 * n).saturating_sub(1);
    debug_assert_eq!(count, (2 * n) * (2 * n).saturating_sub(1) / 2);
    count
}

/// Value used for `Γ_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GammaValue {
    Exact(Q),
    Symbolic { b: usize },
}

impl GammaValue {
    pub fn symbol_name(b: usize) -> String {
        format!("Γ_{b}")
    }

    fn as_bound(&self) -> SymbolicBound {
        match self {
            GammaValue::Exact(q) => SymbolicBound::rational(q.clone()),
            GammaValue::Symbolic { b } => SymbolicBound::symbol(&Self::symbol_name(*b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaConfig {
    /// `C` in `Γ_b ≤ C · b · ln b` (unverified default 1).
    pub banaszczyk_c: f64,
    /// Exact values supplied by the user, by `b`.
    pub overrides: BTreeMap<usize, Q>,
}

impl Default for GammaConfig {
    fn default() -> Self {
        Self {
            banaszczyk_c: 1.0,
            overrides: BTreeMap::new(),
        }
    }
}

impl GammaConfig {
    pub fn with_override(mut self, b: usize, value: Q) -> Result<Self> {
        if !value.is_positive() {
            return Err(Error::argument("gamma must be positive"));
        }
        self.overrides.insert(b, value);
        Ok(self)
    }

    /// Exact `Γ_1 = 1`, `Γ_2 = 3/2`, a user override, or a symbol.
    pub fn gamma(&self, b: usize) -> GammaValue {
        if let Some(q) = self.overrides.get(&b) {
            return GammaValue::Exact(q.clone());
        }
        match b {
            1 => GammaValue::Exact(q_int(1)),
            2 => GammaValue::Exact(q_frac(3, 2)),
            _ => GammaValue::Symbolic { b },
        }
    }

    /// Numeric value: exact when known, else `C · b · ln b`.
    pub fn numeric(&self, b: usize) -> f64 {
        match self.gamma(b) {
            GammaValue::Exact(q) => crate::exact::q_to_f64(&q),
            GammaValue::Symbolic { b } => self.banaszczyk_c * b as f64 * (b as f64).ln(),
        }
    }

    fn envelopes(&self, bound: &SymbolicBound) -> BTreeMap<String, f64> {
        bound
            .symbols
            .keys()
            .filter_map(|name| {
                let b: usize = name.strip_prefix("Γ_")?.parse().ok()?;
                Some((name.clone(), self.numeric(b)))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Stsys2,
    Stsys2Spherical,
    KahlerVolume,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Stsys2 => "stsys2",
            Quantity::Stsys2Spherical => "stsys2_spherical",
            Quantity::KahlerVolume => "kahler_volume",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub quantity: Quantity,
    pub bound: SymbolicBound,
    /// `q · π^s` when no symbols remain.
    pub float_value: Option<f64>,
    /// Value with `Γ` symbols at their configured envelope, when only `Γ` symbols remain.
    pub envelope: Option<f64>,
    pub trace: DerivationTrace,
}

impl BoundReport {
    fn new(quantity: Quantity, trace: DerivationTrace, config: &GammaConfig) -> Result<Self> {
        let bound = trace
            .result()
            .cloned()
            .ok_or_else(|| Error::validation("empty derivation"))?;
        let envelope = bound.envelope(&config.envelopes(&bound));
        Ok(Self {
            quantity,
            float_value: bound.float_value(),
            envelope,
            bound,
            trace,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "quantity": self.quantity,
            "bound": self.bound.to_json(),
            "display": self.bound.to_string(),
            "float_value": self.float_value,
            "envelope": self.envelope,
            "trace": self.trace.steps.iter().map(|s| serde_json::json!({
                "rule": s.rule,
                "formula": s.formula,
                "output": s.output.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

const RULE_SCAL: &str = "scalar curvature hypothesis";
const RULE_ACW: &str = "spin line-bundle cowaist upper bound 4n(2n-1)/scal";
const RULE_V: &str = "nonzero-coordinate combination cost V_n";
const RULE_GAMMA: &str = "lattice transference constant Gamma_b";
const RULE_S2: &str = "sphere-product cowaist lower bound stsys/(2 pi V_n Gamma_n)";
const RULE_CP3_INDEX: &str = "twisted index of O(2) on CP^3";
const RULE_CP3: &str = "CP^3 cowaist lower bound stsys/(4 pi)";
const RULE_WIRTINGER: &str = "Wirtinger volume identity Vol = A^n/n!";
const RULE_GENERIC: &str = "2-essential cowaist lower bound stsys/(2 pi Gamma_b)";
const RULE_CN: &str = "general-bundle cowaist upper bound c_n/scal";
const RULE_COVER: &str = "spherical systole via large torus covers";

fn start(scal: &Q) -> Result<(DerivationTrace, SymbolicBound)> {
    check_scal(scal)?;
    let mut t = DerivationTrace::new();
    let s = t.given(RULE_SCAL, "scal", SymbolicBound::rational(scal.clone()));
    Ok((t, s))
}

fn acw_steps(t: &mut DerivationTrace, half_dim: usize, scal: &SymbolicBound) -> Result<SymbolicBound> {
    let n = half_dim as i64;
    let numer = t.given(RULE_ACW, "4n(2n-1)", SymbolicBound::int(4 * n * (2 * n - 1)));
    t.derive(RULE_ACW, "acw", StepOp::Quotient, &[("4n(2n-1)", &numer), ("scal", scal)])
}

/// `stsys₂((S²)ⁿ) ≤ 2π · V_n · Γ_n · 4n(2n−1)/scal`.
pub fn stsys_bound_s2_power(n: usize, scal: &Q, gamma: &GammaValue, config: &GammaConfig) -> Result<BoundReport> {
    let vn = v_n(n)?;
    let (mut t, s) = start(scal)?;
    let acw = acw_steps(&mut t, n, &s)?;
    let v = t.given(RULE_V, "V_n", SymbolicBound::int(vn as i64));
    let g = t.given(RULE_GAMMA, "Gamma_n", gamma.as_bound());
    let two = SymbolicBound::int(2);
    let pi = SymbolicBound::pi();
    t.derive(
        RULE_S2,
        "stsys",
        StepOp::Product,
        &[("2", &two), ("pi", &pi), ("V_n", &v), ("Gamma_n", &g), ("acw", &acw)],
    )?;
    BoundReport::new(Quantity::Stsys2, t, config)
}

fn cp3_acw(scal: &Q) -> Result<(DerivationTrace, SymbolicBound)> {
    let (mut t, s) = start(scal)?;
    let index = line_index_cp(3, 2)?;
    if index.is_zero() {
        return Err(Error::validation("O(2) on CP^3 has zero twisted index"));
    }
    t.given(RULE_CP3_INDEX, "index", SymbolicBound::rational(index));
    let acw = acw_steps(&mut t, 3, &s)?;
    Ok((t, acw))
}

/// `stsys₂(ℂℙ³) ≤ 4π · acw`.
pub fn stsys_bound_cp3(scal: &Q) -> Result<BoundReport> {
    let (mut t, acw) = cp3_acw(scal)?;
    let four_pi = SymbolicBound::int(4).mul(&SymbolicBound::pi());
    t.derive(RULE_CP3, "stsys", StepOp::Product, &[("4pi", &four_pi), ("acw", &acw)])?;
    BoundReport::new(Quantity::Stsys2, t, &GammaConfig::default())
}

/// Kähler `Vol(ℂℙ³) ≤ (4π · acw)³ / 6`.
pub fn kahler_volume_bound_cp3(scal: &Q) -> Result<BoundReport> {
    let (mut t, acw) = cp3_acw(scal)?;
    let four_pi = SymbolicBound::int(4).mul(&SymbolicBound::pi());
    let a = t.derive(RULE_CP3, "A", StepOp::Product, &[("4pi", &four_pi), ("acw", &acw)])?;
    let a3 = t.derive(RULE_WIRTINGER, "A^3", StepOp::Power(3), &[("A", &a)])?;
    let six = SymbolicBound::int(6);
    t.derive(RULE_WIRTINGER, "vol", StepOp::Quotient, &[("A^3", &a3), ("3!", &six)])?;
    BoundReport::new(Quantity::KahlerVolume, t, &GammaConfig::default())
}

/// Value used for the general-bundle cowaist constant `c_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CnValue {
    Symbolic,
    Exact(Q),
}

impl CnValue {
    fn as_bound(&self, n: usize) -> SymbolicBound {
        match self {
            CnValue::Symbolic => SymbolicBound::symbol(&format!("c_{n}")),
            CnValue::Exact(q) => SymbolicBound::rational(q.clone()),
        }
    }
}

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(q_int(1), |acc, k| acc * q_int(k))
}

/// Kähler `Vol(ℂℙⁿ) ≤ (2π · c_n / scal)ⁿ / n!`.
pub fn kahler_volume_bound_cpn(n: usize, scal: &Q, c_n: &CnValue) -> Result<BoundReport> {
    if n < 1 {
        return Err(Error::argument("n must be >= 1"));
    }
    let (mut t, s) = start(scal)?;
    let c = t.given(RULE_CN, "c_n", c_n.as_bound(n));
    let kcw = t.derive(RULE_CN, "kcw", StepOp::Quotient, &[("c_n", &c), ("scal", &s)])?;
    let two_pi = SymbolicBound::int(2).mul(&SymbolicBound::pi());
    let a = t.derive(RULE_WIRTINGER, "A", StepOp::Product, &[("2pi", &two_pi), ("kcw", &kcw)])?;
    let an = t.derive(RULE_WIRTINGER, "A^n", StepOp::Power(n as i32), &[("A", &a)])?;
    let nf = SymbolicBound::rational(factorial(n));
    t.derive(RULE_WIRTINGER, "vol", StepOp::Quotient, &[("A^n", &an), ("n!", &nf)])?;
    BoundReport::new(Quantity::KahlerVolume, t, &GammaConfig::default())
}

fn generic_trace(b2: usize, half_dim: usize, scal: &Q, gamma: &GammaValue) -> Result<DerivationTrace> {
    if b2 < 1 {
        return Err(Error::argument("b2 must be >= 1"));
    }
    if half_dim < 1 {
        return Err(Error::argument("half dimension must be >= 1"));
    }
    let (mut t, s) = start(scal)?;
    let c = t.given(RULE_CN, "c_n", CnValue::Symbolic.as_bound(half_dim));
    let kcw = t.derive(RULE_CN, "kcw", StepOp::Quotient, &[("c_n", &c), ("scal", &s)])?;
    let g = t.given(RULE_GAMMA, "Gamma_b", gamma.as_bound());
    let two_pi = SymbolicBound::int(2).mul(&SymbolicBound::pi());
    t.derive(
        RULE_GENERIC,
        "stsys",
        StepOp::Product,
        &[("2pi", &two_pi), ("Gamma_b", &g), ("kcw", &kcw)],
    )?;
    Ok(t)
}

/// `stsys₂ ≤ 2π · Γ_b · c_n / scal` for a 2-essential spin `2n`-manifold with `b₂ = b`.
pub fn generic_2essential_bound(
    b2: usize,
    half_dim: usize,
    scal: &Q,
    gamma: &GammaValue,
    config: &GammaConfig,
) -> Result<BoundReport> {
    BoundReport::new(Quantity::Stsys2, generic_trace(b2, half_dim, scal, gamma)?, config)
}

/// Spherical stable 2-systole of `(S²)^m × Tⁿ`: the generic bound on the
/// cover, with a circle factor added when `n` is odd.
pub fn spherical_bound_s2_torus(m: usize, n: usize, scal: &Q, config: &GammaConfig) -> Result<BoundReport> {
    if m < 1 {
        return Err(Error::argument("need at least one sphere factor"));
    }
    let k = n.div_ceil(2);
    let b = m + k * (2 * k).saturating_sub(1);
    let mut t = generic_trace(b, m + k, scal, &config.gamma(b))?;
    let last = t.result().cloned().ok_or_else(|| Error::validation("empty derivation"))?;
    t.derive(RULE_COVER, "stsys_sph", StepOp::Product, &[("stsys", &last)])?;
    BoundReport::new(Quantity::Stsys2Spherical, t, config)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ManifoldSpec {
    S2xS2,
    S2Power(usize),
    S2PowTorus(usize, usize),
    Cp3,
    /// ℂℙ^{2n+1}.
    CpOdd(usize),
    Generic { b2: usize, dim: usize },
}

impl ManifoldSpec {
    pub fn dimension(&self) -> usize {
        match self {
            ManifoldSpec::S2xS2 => 4,
            ManifoldSpec::S2Power(n) => 2 * n,
            ManifoldSpec::S2PowTorus(m, n) => 2 * m + n,
            ManifoldSpec::Cp3 => 6,
            ManifoldSpec::CpOdd(n) => 2 * (2 * n + 1),
            ManifoldSpec::Generic { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ManifoldSpec::S2Power(0) => Err(Error::argument("s2pow needs N >= 1")),
            ManifoldSpec::S2PowTorus(0, _) => Err(Error::argument("s2tor needs M >= 1")),
            ManifoldSpec::Generic { b2: 0, .. } => Err(Error::argument("b2 must be >= 1")),
            ManifoldSpec::Generic { dim, .. } if *dim < 2 || dim % 2 == 1 => {
                Err(Error::argument("dimension must be even and >= 2"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldSpec::S2xS2 => write!(f, "S^2 x S^2"),
            ManifoldSpec::S2Power(n) => write!(f, "(S^2)^{n}"),
            ManifoldSpec::S2PowTorus(m, n) => write!(f, "(S^2)^{m} x T^{n}"),
            ManifoldSpec::Cp3 => write!(f, "CP^3"),
            ManifoldSpec::CpOdd(n) => write!(f, "CP^{}", 2 * n + 1),
            ManifoldSpec::Generic { b2, dim } => write!(f, "2-essential spin {dim}-manifold, b2 = {b2}"),
        }
    }
}

/// Every bound the pipeline derives for `spec`.
pub fn bounds_for(spec: &ManifoldSpec, scal: &Q, config: &GammaConfig) -> Result<Vec<BoundReport>> {
    spec.validate()?;
    check_scal(scal)?;
    Ok(match spec {
        ManifoldSpec::S2xS2 => vec![stsys_bound_s2_power(2, scal, &config.gamma(2), config)?],
        ManifoldSpec::S2Power(n) => vec![stsys_bound_s2_power(*n, scal, &config.gamma(*n), config)?],
        ManifoldSpec::S2PowTorus(m, n) => vec![spherical_bound_s2_torus(*m, *n, scal, config)?],
        ManifoldSpec::Cp3 => vec![stsys_bound_cp3(scal)?, kahler_volume_bound_cp3(scal)?],
        ManifoldSpec::CpOdd(n) => {
            let d = 2 * n + 1;
            vec![
                generic_2essential_bound(1, d, scal, &config.gamma(1), config)?,
                kahler_volume_bound_cpn(d, scal, &CnValue::Symbolic)?,
            ]
        }
        ManifoldSpec::Generic { b2, dim } => {
            vec![generic_2essential_bound(*b2, dim / 2, scal, &config.gamma(*b2), config)?]
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRow {
    pub n: usize,
    pub v_n: u64,
    pub gamma: f64,
    pub bound_over_pi: f64,
    pub envelope_over_pi: f64,
    pub within: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioCheck {
    pub n: usize,
    pub ratio: f64,
    pub limit: f64,
    pub within: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticTable {
    pub banaszczyk_c: f64,
    /// `K` with `bound_n ≤ K · n⁴ · ln n` for every row.
    pub k_over_pi: f64,
    pub rows: Vec<AsymptoticRow>,
    pub ratios: Vec<RatioCheck>,
    pub all_within: bool,
}

/// Tabulates `2π · V_n · Γ_n · 2(2n−1)` (scal = 2n) for `n = 2..=n_max`.
///
/// With `Γ_n = C n ln n` for `n ≥ 3`, `V_n ≤ (n+1)²/4` and `2(2n−1) ≤ 4n`
/// give `bound_n ≤ 2πC(1 + 1/n)² n⁴ ln n ≤ (32/9)πC n⁴ ln n`; the `n = 2`
/// row `36π` needs `K ≥ 9π/(4 ln 2)`. `K` is the larger of the two.
pub fn asymptotic_check_s2_power(n_max: usize, config: &GammaConfig) -> Result<AsymptoticTable> {
    if n_max < 2 {
        return Err(Error::argument("n_max must be >= 2"));
    }
    let c = config.banaszczyk_c;
    let k_over_pi = (32.0 / 9.0 * c).max(9.0 / (4.0 * std::f64::consts::LN_2));
    let bound_over_pi = |n: usize| -> Result<f64> {
        let vn = v_n(n)? as f64;
        Ok(2.0 * vn * config.numeric(n) * 2.0 * (2.0 * n as f64 - 1.0))
    };
    let mut rows = Vec::new();
    for n in 2..=n_max {
        let b = bound_over_pi(n)?;
        let nf = n as f64;
        let env = k_over_pi * nf.powi(4) * nf.ln();
        rows.push(AsymptoticRow {
            n,
            v_n: v_n(n)?,
            gamma: config.numeric(n),
            bound_over_pi: b,
            envelope_over_pi: env,
            within: b <= env * (1.0 + 1e-12),
        });
    }
    let mut ratios = Vec::new();
    for n in 4..=n_max / 2 {
        let ratio = bound_over_pi(2 * n)? / bound_over_pi(n)?;
        let limit = 16.0 * (1.0 + std::f64::consts::LN_2 / (n as f64).ln());
        ratios.push(RatioCheck {
            n,
            ratio,
            limit,
            within: ratio <= limit * (1.0 + 1e-12),
        });
    }
    let all_within = rows.iter().all(|r| r.within) && ratios.iter().all(|r| r.within);
    Ok(AsymptoticTable {
        banaszczyk_c: c,
        k_over_pi,
        rows,
        ratios,
        all_within,
    })
}

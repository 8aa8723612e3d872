//! Norms on ℝ^d carrying certified Euclidean sandwich constants
//! `lo·|x|₂ ≤ N(x) ≤ hi·|x|₂`, with exact duals where one is known.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bivector::{self, dim_for_pair_count, Bivector, Variance};
use crate::{Error, Result};

pub type NormFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct NormOracle {
    dim: usize,
    lo: f64,
    hi: f64,
    kind: NormKind,
}

#[derive(Clone)]
pub enum NormKind {
    Euclidean,
    /// `(Σ |w_i x_i|^p)^{1/p}`; `p = ∞` gives the weighted max norm.
    WeightedLp { weights: Vec<f64>, p: f64 },
    Polytope(Polytope),
    /// Mass of the 2-vector with these Λ²ℝⁿ coordinates.
    Mass { n: usize },
    /// Comass of the 2-form with these Λ²ℝⁿ coordinates.
    Comass { n: usize },
    /// `x ↦ inner(M x)` for invertible `M`.
    Pullback {
        map: DMatrix<f64>,
        inner: Box<NormOracle>,
    },
    /// Caller-supplied evaluator; the sandwich constants are the caller's claim.
    Custom {
        label: String,
        eval: NormFn,
        dual: Option<NormFn>,
    },
}

impl fmt::Debug for NormOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NormOracle")
            .field("dim", &self.dim)
            .field("kind", &self.kind_name())
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish()
    }
}

/// Centrally symmetric polytope `conv(±v_i)` used as a unit ball.
///
/// Both descriptions are kept: `N(x) = max |⟨h, x⟩|` over facet normals and
/// `N*(y) = max |⟨v, y⟩|` over vertices. The dual polytope swaps the two.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    vertices: Vec<Vec<f64>>,
    facets: Vec<Vec<f64>>,
}

const HULL_TOL: f64 = 1e-9;

impl Polytope {
    /// Unit ball `conv(±v_i)`. The vertices must span ℝ^d.
    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let facets = symmetric_hull_facets(&vertices)?;
        Ok(Self { vertices, facets })
    }

    /// Unit ball `{x : |⟨h_i, x⟩| ≤ 1}`. The normals must span ℝ^d.
    pub fn from_facets(normals: Vec<Vec<f64>>) -> Result<Self> {
        let vertices = symmetric_hull_facets(&normals)?;
        Ok(Self {
            vertices,
            facets: normals,
        })
    }

    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, Vec::len)
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vec<f64>] {
        &self.facets
    }

    pub fn dual(&self) -> Polytope {
        Polytope {
            vertices: self.facets.clone(),
            facets: self.vertices.clone(),
        }
    }

    pub fn gauge(&self, x: &[f64]) -> f64 {
        max_abs_dot(&self.facets, x)
    }

    pub fn support(&self, y: &[f64]) -> f64 {
        max_abs_dot(&self.vertices, y)
    }
}

fn max_abs_dot(rows: &[Vec<f64>], x: &[f64]) -> f64 {
    rows.iter()
        .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// Facet normals `h` (one per ± pair) of `conv(±v_i)`, normalised so that
/// the facet is `⟨h, x⟩ = 1`. Brute force over d-subsets of the signed
/// points; meant for the small dimensions used here.
fn symmetric_hull_facets(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = points.first().map_or(0, Vec::len);
    if d == 0 {
        return Err(Error::validation("polytope needs at least one nonzero point"));
    }
    if points.iter().any(|p| p.len() != d || p.iter().any(|x| !x.is_finite())) {
        return Err(Error::dimension("polytope points differ in length or are not finite"));
    }
    let signed: Vec<Vec<f64>> = points
        .iter()
        .flat_map(|p| [p.clone(), p.iter().map(|x| -x).collect()])
        .collect();
    let scale = points
        .iter()
        .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::validation("polytope points are all zero"));
    }
    let mut facets: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    let m = signed.len();
    if d > m {
        return Err(Error::validation("polytope points do not span the space"));
    }
    loop {
        let w = DMatrix::from_fn(d, d, |r, c| signed[idx[r]][c]);
        if let Some(inv) = w.clone().try_inverse() {
            if w.determinant().abs() > 1e-12 * scale.powi(d as i32) {
                let h: DVector<f64> = inv * DVector::from_element(d, 1.0);
                let hv: Vec<f64> = h.iter().copied().collect();
                if max_abs_dot(points, &hv) <= 1.0 + HULL_TOL {
                    let hn = h.norm();
                    let dup = facets.iter().any(|f| {
                        let same = f.iter().zip(&hv).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
                        let opp = f.iter().zip(&hv).map(|(a, b)| (a + b).powi(2)).sum::<f64>();
                        same.sqrt() <= HULL_TOL * hn || opp.sqrt() <= HULL_TOL * hn
                    });
                    if !dup {
                        facets.push(hv);
                    }
                }
            }
        }
        // next d-combination of 0..m
        let mut i = d;
        loop {
            if i == 0 {
                if facets.is_empty() {
                    return Err(Error::validation("polytope points do not span the space"));
                }
                return Ok(facets);
            }
            i -= 1;
            if idx[i] != i + m - d {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Largest singular value, from the top eigenvalue of `MᵀM` with a small
/// upward margin.
fn top_singular_value(m: &DMatrix<f64>) -> f64 {
    let top = SymmetricEigen::new(m.transpose() * m).eigenvalues.max().max(0.0);
    top.sqrt() * (1.0 + 1e-12)
}

/// `(σ_min, σ_max)` of a square map, with `σ_min = 1 / σ_max(M⁻¹)` so that
/// neither bound comes from a small eigenvalue; `None` when `M` is singular.
fn singular_range(m: &DMatrix<f64>) -> Option<(f64, f64)> {
    let inv = m.clone().try_inverse()?;
    let smax = top_singular_value(m);
    let smin = 1.0 / top_singular_value(&inv);
    (smin.is_finite() && smin > 0.0).then_some((smin, smax))
}

impl NormOracle {
    pub fn euclidean(dim: usize) -> Self {
        Self {
            dim,
            lo: 1.0,
            hi: 1.0,
            kind: NormKind::Euclidean,
        }
    }

    pub fn weighted_lp(weights: Vec<f64>, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::argument(format!("p must be >= 1, got {p}")));
        }
        if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::argument("weights must be positive and finite"));
        }
        let d = weights.len() as f64;
        let wmin = weights.iter().copied().fold(f64::INFINITY, f64::min);
        let wmax = weights.iter().copied().fold(0.0, f64::max);
        let e = d.powf(1.0 / p - 0.5);
        Ok(Self {
            dim: weights.len(),
            lo: wmin * e.min(1.0),
            hi: wmax * e.max(1.0),
            kind: NormKind::WeightedLp { weights, p },
        })
    }

    pub fn l1(dim: usize) -> Self {
        Self::weighted_lp(vec![1.0; dim], 1.0).expect("unit weights are valid")
    }

    pub fn linf(dim: usize) -> Self {
        Self::weighted_lp(vec![1.0; dim], f64::INFINITY).expect("unit weights are valid")
    }

    pub fn polytope(p: Polytope) -> Self {
        let radius = |rows: &[Vec<f64>]| {
            rows.iter()
                .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
                .fold(0.0, f64::max)
        };
        Self {
            dim: p.dim(),
            lo: 1.0 / radius(p.vertices()),
            hi: radius(p.facets()),
            kind: NormKind::Polytope(p),
        }
    }

    /// Mass norm on Λ²ℝⁿ coordinates (dimension `n(n-1)/2`).
    pub fn mass(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::dimension("mass norm needs n >= 2"));
        }
        Ok(Self {
            dim: bivector::pair_count(n),
            lo: 1.0,
            hi: ((n / 2) as f64).sqrt(),
            kind: NormKind::Mass { n },
        })
    }

    /// Comass norm on Λ²ℝⁿ coordinates.
    pub fn comass(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::dimension("comass norm needs n >= 2"));
        }
        Ok(Self {
            dim: bivector::pair_count(n),
            lo: 1.0 / ((n / 2) as f64).sqrt(),
            hi: 1.0,
            kind: NormKind::Comass { n },
        })
    }

    pub fn pullback(map: DMatrix<f64>, inner: NormOracle) -> Result<Self> {
        if map.nrows() != inner.dim || map.ncols() != inner.dim {
            return Err(Error::dimension("pullback map does not match inner norm dimension"));
        }
        let (smin, smax) =
            singular_range(&map).ok_or_else(|| Error::validation("pullback map is singular"))?;
        Ok(Self {
            dim: inner.dim,
            lo: inner.lo * smin,
            hi: inner.hi * smax,
            kind: NormKind::Pullback {
                map,
                inner: Box::new(inner),
            },
        })
    }

    /// Opaque norm. `lo`/`hi` must be valid sandwich constants; they are
    /// what bounds the enumeration radius, so a wrong claim gives wrong minima.
    pub fn custom(
        label: impl Into<String>,
        dim: usize,
        lo: f64,
        hi: f64,
        eval: NormFn,
        dual: Option<NormFn>,
    ) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::argument("custom norm needs 0 < lo <= hi < inf"));
        }
        Ok(Self {
            dim,
            lo,
            hi,
            kind: NormKind::Custom {
                label: label.into(),
                eval,
                dual,
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn kind_name(&self) -> String {
        match &self.kind {
            NormKind::Euclidean => "euclidean".into(),
            NormKind::WeightedLp { p, .. } => format!("weighted_l{p}"),
            NormKind::Polytope(_) => "polytope".into(),
            NormKind::Mass { .. } => "mass".into(),
            NormKind::Comass { .. } => "comass".into(),
            NormKind::Pullback { inner, .. } => format!("pullback({})", inner.kind_name()),
            NormKind::Custom { label, .. } => format!("custom({label})"),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            NormKind::Euclidean => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::WeightedLp { weights, p } => {
                if p.is_infinite() {
                    x.iter()
                        .zip(weights)
                        .map(|(v, w)| (v * w).abs())
                        .fold(0.0, f64::max)
                } else {
                    x.iter()
                        .zip(weights)
                        .map(|(v, w)| (v * w).abs().powf(*p))
                        .sum::<f64>()
                        .powf(1.0 / p)
                }
            }
            NormKind::Polytope(p) => p.gauge(x),
            NormKind::Mass { n } => Bivector::from_coords(*n, x, Variance::Vector)
                .and_then(|b| bivector::mass(&b))
                .unwrap_or(f64::NAN),
            NormKind::Comass { n } => Bivector::from_coords(*n, x, Variance::Form)
                .and_then(|b| bivector::comass(&b))
                .unwrap_or(f64::NAN),
            NormKind::Pullback { map, inner } => {
                let y = map * DVector::from_column_slice(x);
                inner.eval(y.as_slice())
            }
            NormKind::Custom { eval, .. } => eval(x),
        }
    }

    /// The dual norm `y ↦ sup{⟨x, y⟩ : N(x) ≤ 1}` for families whose dual
    /// is known in closed form. Opaque norms without a supplied dual are
    /// rejected rather than approximated.
    pub fn dual(&self) -> Result<NormOracle> {
        let kind = match &self.kind {
            NormKind::Euclidean => NormKind::Euclidean,
            NormKind::WeightedLp { weights, p } => {
                let q = if *p == 1.0 {
                    f64::INFINITY
                } else if p.is_infinite() {
                    1.0
                } else {
                    p / (p - 1.0)
                };
                return NormOracle::weighted_lp(weights.iter().map(|w| 1.0 / w).collect(), q);
            }
            NormKind::Polytope(p) => NormKind::Polytope(p.dual()),
            NormKind::Mass { n } => NormKind::Comass { n: *n },
            NormKind::Comass { n } => NormKind::Mass { n: *n },
            NormKind::Pullback { map, inner } => {
                let inv = map
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::validation("pullback map is singular"))?;
                return NormOracle::pullback(inv.transpose(), inner.dual()?);
            }
            NormKind::Custom { label, eval, dual } => match dual {
                Some(d) => NormKind::Custom {
                    label: format!("dual({label})"),
                    eval: d.clone(),
                    dual: Some(eval.clone()),
                },
                None => {
                    return Err(Error::Unsupported(format!(
                        "norm {label:?} has no certified dual"
                    )))
                }
            },
        };
        Ok(NormOracle {
            dim: self.dim,
            lo: 1.0 / self.hi,
            hi: 1.0 / self.lo,
            kind,
        })
    }

    /// Spot-checks the norm axioms and the sandwich on random samples.
    pub fn check_on_samples<R: Rng>(&self, rng: &mut R, samples: usize) -> Result<()> {
        let tol = 1e-9;
        let zero = vec![0.0; self.dim];
        if self.eval(&zero).abs() > tol {
            return Err(Error::validation("norm of zero is not zero"));
        }
        let rand_vec = |rng: &mut R| -> Vec<f64> {
            (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        for _ in 0..samples {
            let x = rand_vec(rng);
            let y = rand_vec(rng);
            let nx = self.eval(&x);
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            if (self.eval(&neg) - nx).abs() > tol * (1.0 + nx) {
                return Err(Error::validation("norm is not symmetric"));
            }
            let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            if self.eval(&s) > nx + self.eval(&y) + tol {
                return Err(Error::validation("triangle inequality fails"));
            }
            let e = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if nx < self.lo * e * (1.0 - tol) - tol || nx > self.hi * e * (1.0 + tol) + tol {
                return Err(Error::validation(format!(
                    "sandwich {}·|x| <= N(x) <= {}·|x| fails: N = {nx}, |x| = {e}",
                    self.lo, self.hi
                )));
            }
        }
        Ok(())
    }
}

/// `N*(y)`. Polytope duals are exact maxima over unit-ball vertices; mass and
/// comass are dual to each other.
pub fn dual_norm(norm: &NormOracle, y: &[f64]) -> Result<f64> {
    if y.len() != norm.dim() {
        return Err(Error::dimension(format!(
            "vector has length {}, norm has dim {}",
            y.len(),
            norm.dim()
        )));
    }
    Ok(norm.dual()?.eval(y))
}

/// Declarative norm description used in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormSpec {
    Euclidean,
    Linf,
    L1,
    WeightedLp { weights: Vec<f64>, p: f64 },
    Polytope { vertices: Vec<Vec<f64>> },
    /// `n` is the ambient dimension; the lattice dimension is `n(n-1)/2`.
    Mass {
        #[serde(default)]
        n: Option<usize>,
    },
    Comass {
        #[serde(default)]
        n: Option<usize>,
    },
}

impl NormSpec {
    pub fn build(&self, dim: usize) -> Result<NormOracle> {
        let bivector_n = |n: &Option<usize>| -> Result<usize> {
            let n = match n {
                Some(n) => *n,
                None => dim_for_pair_count(dim).ok_or_else(|| {
                    Error::dimension(format!("{dim} is not n(n-1)/2 for any n"))
                })?,
            };
            if bivector::pair_count(n) != dim {
                return Err(Error::dimension(format!(
                    "Λ²ℝ^{n} has dimension {}, lattice has {dim}",
                    bivector::pair_count(n)
                )));
            }
            Ok(n)
        };
        let oracle = match self {
            NormSpec::Euclidean => NormOracle::euclidean(dim),
            NormSpec::Linf => NormOracle::linf(dim),
            NormSpec::L1 => NormOracle::l1(dim),
            NormSpec::WeightedLp { weights, p } => NormOracle::weighted_lp(weights.clone(), *p)?,
            NormSpec::Polytope { vertices } => {
                NormOracle::polytope(Polytope::from_vertices(vertices.clone())?)
            }
            NormSpec::Mass { n } => NormOracle::mass(bivector_n(n)?)?,
            NormSpec::Comass { n } => NormOracle::comass(bivector_n(n)?)?,
        };
        if oracle.dim() != dim {
            return Err(Error::dimension(format!(
                "norm has dimension {}, lattice has {dim}",
                oracle.dim()
            )));
        }
        Ok(oracle)
    }
}

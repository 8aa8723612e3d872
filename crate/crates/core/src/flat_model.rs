//! Stable 2-systoles of model geometries: flat tori, products of round
//! 2-spheres, and sphere × torus products.
//!
//! The stable norm of a class on a flat torus `ℝⁿ/ℤⁿ` with metric `G` is the
//! mass of its parallel representative pushed to Euclidean coordinates by
//! `B = Lᵀ`, where `G = L Lᵀ`. A round `S²(r)` class has norm `4πr²`, and
//! mixed classes in a product metric are assigned the sum of their pure parts.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bivector::{pair_count, pair_index, pair_of_index};
use crate::exact::Q;
use crate::normed_lattice::{successive_minima, Lattice, NormOracle};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FlatTorusMetric {
    gram: DMatrix<f64>,
    /// Upper-triangular `B` with `Bᵀ B = gram`.
    factor: DMatrix<f64>,
}

impl FlatTorusMetric {
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        let n = gram.nrows();
        if n < 2 || gram.ncols() != n {
            return Err(Error::dimension(format!(
                "torus gram matrix must be n x n with n >= 2, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        if gram.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("gram matrix has non-finite entries"));
        }
        for i in 0..n {
            for j in i + 1..n {
                if gram[(i, j)] != gram[(j, i)] {
                    return Err(Error::validation("gram matrix is not symmetric"));
                }
            }
        }
        let chol = nalgebra::Cholesky::new(gram.clone())
            .ok_or_else(|| Error::validation("gram matrix is not positive definite"))?;
        let factor = chol.l().transpose();
        Ok(Self { gram, factor })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::dimension("gram matrix must be square"));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.gram * c)
    }

    /// `Λ²B` on pair coordinates: `(ij) ↦ Σ_{k<l} (B_ki B_lj − B_li B_kj) e_kl`.
    pub fn wedge_square_map(&self) -> DMatrix<f64> {
        let n = self.dim();
        let p = pair_count(n);
        let b = &self.factor;
        DMatrix::from_fn(p, p, |row, col| {
            let (k, l) = pair_of_index(n, row);
            let (i, j) = pair_of_index(n, col);
            b[(k, i)] * b[(l, j)] - b[(l, i)] * b[(k, j)]
        })
    }

    /// Stable norm on `H_2(Tⁿ; ℝ) = Λ²ℝⁿ`.
    pub fn stable_norm(&self) -> Result<NormOracle> {
        NormOracle::pullback(self.wedge_square_map(), NormOracle::mass(self.dim())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Class {
    pub sphere_part: Vec<i64>,
    /// Antisymmetric `n × n` integer matrix, entry `(i, j)` the coefficient of `e_i ∧ e_j`.
    pub torus_part: Vec<Vec<i64>>,
}

impl H2Class {
    pub fn new(sphere_part: Vec<i64>, torus_part: Vec<Vec<i64>>) -> Result<Self> {
        let n = torus_part.len();
        for (i, row) in torus_part.iter().enumerate() {
            if row.len() != n {
                return Err(Error::dimension("torus part must be square"));
            }
            for j in 0..n {
                if row[j] != -torus_part[j][i] {
                    return Err(Error::validation("torus part is not antisymmetric"));
                }
            }
        }
        Ok(Self {
            sphere_part,
            torus_part,
        })
    }

    pub fn sphere(m: usize, j: usize) -> Self {
        let mut s = vec![0; m];
        s[j] = 1;
        Self {
            sphere_part: s,
            torus_part: Vec::new(),
        }
    }

    pub fn torus_from_pairs(n: usize, coords: &[i64]) -> Self {
        let mut t = vec![vec![0; n]; n];
        for (idx, &c) in coords.iter().enumerate() {
            let (i, j) = pair_of_index(n, idx);
            t[i][j] = c;
            t[j][i] = -c;
        }
        Self {
            sphere_part: Vec::new(),
            torus_part: t,
        }
    }

    pub fn torus_pairs(&self) -> Vec<i64> {
        let n = self.torus_part.len();
        let mut out = vec![0; pair_count(n)];
        for i in 0..n {
            for j in i + 1..n {
                out[pair_index(n, i, j)] = self.torus_part[i][j];
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.sphere_part.iter().all(|&x| x == 0) && self.torus_part.iter().flatten().all(|&x| x == 0)
    }
}

/// Image of a class under the `l`-fold cover of each torus circle: sphere
/// classes are unchanged and torus classes are multiplied by `l²`.
pub fn covering_pushforward(cls: &H2Class, l: i64) -> Result<H2Class> {
    if l < 1 {
        return Err(Error::argument(format!("cover degree must be >= 1, got {l}")));
    }
    let l2 = l
        .checked_mul(l)
        .ok_or_else(|| Error::argument("cover degree too large"))?;
    let torus_part = cls
        .torus_part
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| x.checked_mul(l2).ok_or_else(|| Error::argument("class coefficient overflow")))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(H2Class {
        sphere_part: cls.sphere_part.clone(),
        torus_part,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SystoleResult {
    pub value: f64,
    /// `value / π` when the minimum is a sphere class.
    pub over_pi: Option<f64>,
    pub witness: H2Class,
}

pub fn torus_stable_2_systole(g: &FlatTorusMetric) -> Result<SystoleResult> {
    let n = g.dim();
    // the lattice Λ²B·ℤ^p under the plain mass norm; f64 entries are exact dyadic rationals
    let w = g.wedge_square_map();
    let rows = (0..w.nrows())
        .map(|i| {
            (0..w.ncols())
                .map(|j| Q::from_float(w[(i, j)]).ok_or_else(|| Error::validation("metric is not finite")))
                .collect::<Result<Vec<Q>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let lattice = Lattice::from_rows(rows)?;
    let m = successive_minima(&lattice, &NormOracle::mass(n)?, 1)?;
    Ok(SystoleResult {
        value: m.values[0],
        over_pi: None,
        witness: H2Class::torus_from_pairs(n, &m.witnesses[0]),
    })
}

/// `{"spheres": [r1, ...], "torus": {"gram": [[...]]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default)]
    pub spheres: Vec<f64>,
    #[serde(default)]
    pub torus: Option<TorusFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorusFile {
    pub gram: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductModel {
    sphere_radii: Vec<f64>,
    torus: Option<FlatTorusMetric>,
}

impl ProductModel {
    pub fn new(sphere_radii: Vec<f64>, torus: Option<FlatTorusMetric>) -> Result<Self> {
        if let Some(r) = sphere_radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::validation(format!("sphere radius must be positive, got {r}")));
        }
        if sphere_radii.is_empty() && torus.is_none() {
            return Err(Error::validation("model has no factors"));
        }
        Ok(Self { sphere_radii, torus })
    }

    pub fn from_file(file: &ModelFile) -> Result<Self> {
        let torus = file
            .torus
            .as_ref()
            .map(|t| FlatTorusMetric::from_rows(&t.gram))
            .transpose()?;
        Self::new(file.spheres.clone(), torus)
    }

    pub fn sphere_radii(&self) -> &[f64] {
        &self.sphere_radii
    }

    pub fn torus(&self) -> Option<&FlatTorusMetric> {
        self.torus.as_ref()
    }

    /// The model lifted to the `l`-fold cover of each torus circle.
    pub fn covered(&self, l: i64) -> Result<Self> {
        if l < 1 {
            return Err(Error::argument(format!("cover degree must be >= 1, got {l}")));
        }
        let l2 = (l as f64) * (l as f64);
        let torus = self.torus.as_ref().map(|t| t.scaled(l2)).transpose()?;
        Self::new(self.sphere_radii.clone(), torus)
    }

    /// Norm of a class: `Σ |a_j| 4πr_j²` plus the torus stable norm.
    pub fn class_norm(&self, cls: &H2Class) -> Result<f64> {
        if cls.sphere_part.len() > self.sphere_radii.len() {
            return Err(Error::dimension("class has more sphere coordinates than the model"));
        }
        let spheres: f64 = cls
            .sphere_part
            .iter()
            .zip(&self.sphere_radii)
            .map(|(&a, r)| a.unsigned_abs() as f64 * sphere_area(*r))
            .sum();
        let torus_pairs = cls.torus_pairs();
        let torus = if torus_pairs.iter().all(|&x| x == 0) {
            0.0
        } else {
            let t = self
                .torus
                .as_ref()
                .ok_or_else(|| Error::dimension("class has a torus part but the model has no torus"))?;
            if cls.torus_part.len() != t.dim() {
                return Err(Error::dimension("torus part size does not match the torus"));
            }
            let x: Vec<f64> = torus_pairs.iter().map(|&c| c as f64).collect();
            t.stable_norm()?.eval(&x)
        };
        Ok(spheres + torus)
    }
}

fn sphere_area(r: f64) -> f64 {
    4.0 * PI * r * r
}

fn smallest_sphere(model: &ProductModel) -> Option<SystoleResult> {
    let m = model.sphere_radii.len();
    let (j, r) = model
        .sphere_radii
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let mut witness = H2Class::sphere(m, j);
    if let Some(t) = &model.torus {
        witness.torus_part = vec![vec![0; t.dim()]; t.dim()];
    }
    Some(SystoleResult {
        value: sphere_area(*r),
        over_pi: Some(4.0 * r * r),
        witness,
    })
}

/// Minimum over pure sphere classes and the torus systole.
pub fn product_model_stsys(model: &ProductModel) -> Result<SystoleResult> {
    let sphere = smallest_sphere(model);
    let torus = model
        .torus
        .as_ref()
        .map(|t| {
            torus_stable_2_systole(t).map(|mut r| {
                r.witness.sphere_part = vec![0; model.sphere_radii.len()];
                r
            })
        })
        .transpose()?;
    Ok(match (sphere, torus) {
        (Some(s), Some(t)) => {
            if t.value < s.value {
                t
            } else {
                s
            }
        }
        (Some(s), None) => s,
        (None, Some(t)) => t,
        (None, None) => unreachable!("models have at least one factor"),
    })
}

/// Minimum norm over nonzero integer combinations of sphere classes only.
pub fn spherical_restricted_systole(model: &ProductModel) -> Result<SystoleResult> {
    smallest_sphere(model).ok_or_else(|| Error::validation("the span of sphere classes is empty"))
}

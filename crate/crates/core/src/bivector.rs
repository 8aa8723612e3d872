//! 2-vectors and constant-coefficient 2-forms on ℝⁿ, their canonical
//! (spectral) normal form, and the mass / comass norms.
//!
//! A bivector is stored as its antisymmetric coefficient matrix `A`, where
//! `A[(i, j)]` (i < j) is the coefficient of `e_i ∧ e_j`. With that
//! convention `u ∧ v` has matrix `u vᵀ − v uᵀ`, a form `φ` evaluates as
//! `φ(X, Y) = Xᵀ A Y`, and the duality pairing is `Σ_{i<j} ξ_ij φ_ij`.
//!
//! Every bivector can be written `Σ λ_k u_k ∧ v_k` with mutually orthogonal
//! oriented planes and `λ_1 ≥ λ_2 ≥ … > 0`. Mass is `Σ λ_k`, comass is
//! `λ_1`; they are dual norms.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Whether the coefficients describe a 2-vector (cycle side) or a 2-form
/// (cohomology side).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Vector,
    Form,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bivector {
    variance: Variance,
    coeffs: DMatrix<f64>,
}

/// Number of coordinates of Λ²ℝⁿ.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Coordinate index of `e_i ∧ e_j` (i < j) in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_of_index(n: usize, mut k: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - i - 1;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
    }
    panic!("pair index out of range");
}

/// Ambient dimension `n` with `n(n-1)/2 == len`, if any.
pub fn dim_for_pair_count(len: usize) -> Option<usize> {
    (2..=len + 2).find(|&n| pair_count(n) == len)
}

impl Bivector {
    /// Validates exact antisymmetry (`a_ij == -a_ji`, zero diagonal) and `n ≥ 2`.
    pub fn from_matrix(coeffs: DMatrix<f64>, variance: Variance) -> Result<Self> {
        let n = coeffs.nrows();
        if coeffs.ncols() != n {
            return Err(Error::dimension(format!(
                "coefficient array must be square, got {}x{}",
                n,
                coeffs.ncols()
            )));
        }
        if n < 2 {
            return Err(Error::dimension(format!("bivectors need n >= 2, got {n}")));
        }
        for i in 0..n {
            if !coeffs[(i, i)].is_finite() || coeffs[(i, i)] != 0.0 {
                return Err(Error::validation(format!("diagonal entry ({i},{i}) is nonzero")));
            }
            for j in i + 1..n {
                let (a, b) = (coeffs[(i, j)], coeffs[(j, i)]);
                if !a.is_finite() || a != -b {
                    return Err(Error::validation(format!(
                        "entries ({i},{j})={a} and ({j},{i})={b} are not antisymmetric"
                    )));
                }
            }
        }
        Ok(Self { variance, coeffs })
    }

    pub fn from_rows(rows: &[Vec<f64>], variance: Variance) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::dimension("coefficient array must be square"));
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]), variance)
    }

    /// Builds from the `n(n-1)/2` upper-triangular coefficients in
    /// lexicographic order of `(i, j)`.
    pub fn from_coords(n: usize, coords: &[f64], variance: Variance) -> Result<Self> {
        if n < 2 {
            return Err(Error::dimension(format!("bivectors need n >= 2, got {n}")));
        }
        if coords.len() != pair_count(n) {
            return Err(Error::dimension(format!(
                "expected {} coordinates for n = {n}, got {}",
                pair_count(n),
                coords.len()
            )));
        }
        let mut m = DMatrix::zeros(n, n);
        for (k, &c) in coords.iter().enumerate() {
            let (i, j) = pair_of_index(n, k);
            m[(i, j)] = c;
            m[(j, i)] = -c;
        }
        Self::from_matrix(m, variance)
    }

    pub fn zero(n: usize, variance: Variance) -> Result<Self> {
        Self::from_matrix(DMatrix::zeros(n, n), variance)
    }

    /// `e_i ∧ e_j` (0-based indices).
    pub fn basis(n: usize, i: usize, j: usize, variance: Variance) -> Result<Self> {
        if i == j || i >= n || j >= n {
            return Err(Error::argument(format!("invalid basis pair ({i},{j}) in dim {n}")));
        }
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = 1.0;
        m[(j, i)] = -1.0;
        Self::from_matrix(m, variance)
    }

    /// `u ∧ v`.
    pub fn wedge(u: &[f64], v: &[f64], variance: Variance) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::dimension("wedge factors differ in length"));
        }
        let n = u.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let c = u[i] * v[j] - u[j] * v[i];
                m[(i, j)] = c;
                m[(j, i)] = -c;
            }
        }
        Self::from_matrix(m, variance)
    }

    /// Standard Kähler form `Σ e_{2k-1} ∧ e_{2k}` on ℝ^{2m}.
    pub fn kahler(m: usize, variance: Variance) -> Result<Self> {
        let n = 2 * m;
        let mut a = DMatrix::zeros(n, n);
        for k in 0..m {
            a[(2 * k, 2 * k + 1)] = 1.0;
            a[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self::from_matrix(a, variance)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coeffs[(i, j)]
    }

    /// Upper-triangular coefficients in lexicographic order.
    pub fn coords(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(pair_count(n));
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.coeffs[(i, j)]);
            }
        }
        out
    }

    /// Same coefficients, opposite variance (identification through the
    /// Euclidean metric).
    pub fn transposed_variance(&self) -> Self {
        let variance = match self.variance {
            Variance::Vector => Variance::Form,
            Variance::Form => Variance::Vector,
        };
        Self {
            variance,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Euclidean norm of the coefficient vector, `sqrt(Σ_{i<j} a_ij²)`.
    pub fn euclidean_norm(&self) -> f64 {
        (self.coeffs.norm_squared() / 2.0).sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            variance: self.variance,
            coeffs: &self.coeffs * c,
        }
    }

    pub fn add(&self, other: &Bivector) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            variance: self.variance,
            coeffs: &self.coeffs + &other.coeffs,
        })
    }

    /// Pushforward by a linear map `g` (n×n): `Σ a_ij g e_i ∧ g e_j`,
    /// i.e. matrix `g A gᵀ`.
    pub fn transformed(&self, g: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::dimension("transformation size does not match"));
        }
        let mut m = g * &self.coeffs * g.transpose();
        // restore exact antisymmetry lost to rounding
        for i in 0..n {
            m[(i, i)] = 0.0;
            for j in i + 1..n {
                let c = 0.5 * (m[(i, j)] - m[(j, i)]);
                m[(i, j)] = c;
                m[(j, i)] = -c;
            }
        }
        Self::from_matrix(m, self.variance)
    }

    fn check_compatible(&self, other: &Bivector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::dimension(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        if self.variance != other.variance {
            return Err(Error::validation("cannot add a 2-vector and a 2-form"));
        }
        Ok(())
    }
}

/// `Σ λ_k u_k ∧ v_k` with orthonormal frames `(u_k, v_k)` spanning mutually
/// orthogonal planes.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalDecomposition {
    pub lambdas: Vec<f64>,
    pub planes: Vec<(DVector<f64>, DVector<f64>)>,
}

impl CanonicalDecomposition {
    /// Antisymmetric coefficient matrix of `Σ λ_k u_k ∧ v_k`.
    pub fn reconstruct(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        for (lam, (u, v)) in self.lambdas.iter().zip(&self.planes) {
            m += (u * v.transpose() - v * u.transpose()) * *lam;
        }
        m
    }
}

/// Canonical form from the Hermitian eigendecomposition of `iA`. Its
/// eigenvalues are `±λ_k`; a unit eigenvector `x + iy` for `λ > 0` has
/// `|x| = |y|`, `x ⊥ y` and `Ax = λy`, `Ay = −λx`, giving the plane
/// `(√2 x, −√2 y)`. Eigenvectors of distinct eigenvalues are orthogonal, so
/// the planes are mutually orthogonal even for repeated `λ`.
pub fn canonical_form(xi: &Bivector) -> Result<CanonicalDecomposition> {
    let n = xi.dim();
    if n < 2 {
        return Err(Error::dimension("canonical form needs n >= 2"));
    }
    let a = xi.matrix();
    let scale = a.norm();
    let mut out = CanonicalDecomposition {
        lambdas: Vec::new(),
        planes: Vec::new(),
    };
    if scale == 0.0 {
        return Ok(out);
    }
    let tol = 1e-13 * scale;
    let h: DMatrix<Complex<f64>> = a.map(|x| Complex::new(0.0, x));
    let eig = SymmetricEigen::new(h);
    let mut found: Vec<(f64, DVector<f64>, DVector<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam > tol)
        .map(|(k, &lam)| {
            let w = eig.eigenvectors.column(k);
            let x: DVector<f64> = w.map(|z| z.re).normalize();
            let y: DVector<f64> = w.map(|z| z.im).normalize();
            (lam, x, -y)
        })
        .collect();
    found.sort_by(|p, q| q.0.total_cmp(&p.0));
    for (lam, u, v) in found.into_iter().take(n / 2) {
        out.lambdas.push(lam);
        out.planes.push((u, v));
    }
    Ok(out)
}

/// Mass norm of a 2-vector: the sum of its canonical coefficients.
pub fn mass(xi: &Bivector) -> Result<f64> {
    if xi.variance() != Variance::Vector {
        return Err(Error::validation("mass is defined on 2-vectors"));
    }
    Ok(canonical_form(xi)?.lambdas.iter().sum())
}

/// Comass norm of a constant 2-form: the largest canonical coefficient,
/// i.e. `sup |φ(X, Y)|` over orthonormal pairs.
pub fn comass(phi: &Bivector) -> Result<f64> {
    if phi.variance() != Variance::Form {
        return Err(Error::validation("comass is defined on 2-forms"));
    }
    Ok(canonical_form(phi)?.lambdas.first().copied().unwrap_or(0.0))
}

/// `⟨ξ, φ⟩ = Σ_{i<j} ξ_ij φ_ij`.
pub fn pairing(xi: &Bivector, phi: &Bivector) -> Result<f64> {
    if xi.dim() != phi.dim() {
        return Err(Error::dimension(format!(
            "pairing of dim {} with dim {}",
            xi.dim(),
            phi.dim()
        )));
    }
    if xi.variance() != Variance::Vector || phi.variance() != Variance::Form {
        return Err(Error::validation("pairing takes a 2-vector and a 2-form"));
    }
    Ok(xi.coords().iter().zip(phi.coords()).map(|(a, b)| a * b).sum())
}

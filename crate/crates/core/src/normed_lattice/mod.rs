//! Full-rank lattices in finite-dimensional normed spaces.

mod gamma;
mod minima;
mod norm;

pub use gamma::{
    gamma_lower_bound_search, gamma_product, random_polytope, GammaProduct, GammaSearchResult,
};
pub use minima::{successive_minima, successive_minima_with, EnumerationOptions, MinimaResult};
pub use norm::{dual_norm, NormFn, NormKind, NormOracle, NormSpec, Polytope};

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{serde_q_matrix, QMatrix, Q};
use crate::{Error, Result};

/// Lattice spanned by the columns of an exact, nonsingular rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    basis: QMatrix,
}

impl Lattice {
    pub fn new(basis: QMatrix) -> Result<Self> {
        if basis.rows() == 0 || basis.rows() != basis.cols() {
            return Err(Error::dimension(format!(
                "lattice basis must be square and nonempty, got {}x{}",
                basis.rows(),
                basis.cols()
            )));
        }
        if basis.det()?.is_zero() {
            return Err(Error::validation("lattice basis is singular"));
        }
        Ok(Self { basis })
    }

    /// Row-major matrix whose columns are the basis vectors.
    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        Self::new(QMatrix::from_rows(rows)?)
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(QMatrix::from_i64_rows(rows)?)
    }

    pub fn integer(dim: usize) -> Self {
        Self {
            basis: QMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn basis_f64(&self) -> DMatrix<f64> {
        self.basis.to_f64()
    }

    /// The lattice point with the given integer coordinates.
    pub fn point(&self, coords: &[i64]) -> Vec<Q> {
        self.basis.mul_int_vec(coords)
    }

    pub fn point_f64(&self, coords: &[i64]) -> Vec<f64> {
        self.point(coords).iter().map(crate::exact::q_to_f64).collect()
    }

    pub fn scaled(&self, c: &Q) -> Result<Self> {
        Self::new(self.basis.scale(c))
    }

    /// Same lattice, basis `B·U` for an integer matrix `U` (rejected unless
    /// `det U = ±1`).
    pub fn change_basis(&self, unimodular: &[Vec<i64>]) -> Result<Self> {
        let u = QMatrix::from_i64_rows(unimodular)?;
        let det = u.det()?;
        if det.abs() != Q::from_integer(1.into()) {
            return Err(Error::validation("basis change is not unimodular"));
        }
        Self::new(self.basis.mul(&u)?)
    }

    /// Exact pairing of two rational vectors.
    pub fn pairing(x: &[Q], y: &[Q]) -> Q {
        x.iter().zip(y).fold(Q::zero(), |acc, (a, b)| acc + a * b)
    }
}

/// Dual lattice `{y : ⟨x, y⟩ ∈ ℤ for all x ∈ Λ}`, basis `B^{-T}`.
pub fn dual_lattice(lattice: &Lattice) -> Result<Lattice> {
    Lattice::new(lattice.basis.inverse()?.transpose())
}

/// `{"basis": [[...]], "norm": {"kind": ...}}`: rows of the basis matrix,
/// whose columns are the basis vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeConfig {
    #[serde(with = "serde_q_matrix")]
    pub basis: Vec<Vec<Q>>,
    pub norm: NormSpec,
}

impl LatticeConfig {
    pub fn build(&self) -> Result<(Lattice, NormOracle)> {
        let lattice = Lattice::from_rows(self.basis.clone())?;
        let norm = self.norm.build(lattice.dim())?;
        Ok((lattice, norm))
    }
}

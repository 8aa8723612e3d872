//! Successive minima by certified-radius enumeration.
//!
//! A norm `N` with `lo·|x|₂ ≤ N(x)` reduces to Euclidean enumeration: if
//! `λ_k ≤ r` then every vector realising `λ_1..λ_k` lies in the Euclidean
//! ball of radius `r / lo`. `r` is taken as the k-th smallest `N` value
//! among the (LLL-reduced) basis vectors, which are independent. All
//! lattice vectors in the ball are enumerated Fincke–Pohst style, sorted by
//! `N`, and selected greedily subject to exact linear independence.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Lattice, NormOracle};
use crate::exact::IndependenceTracker;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    /// Maximum number of enumeration-tree nodes visited.
    pub max_candidates: u64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            max_candidates: 100_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaResult {
    /// `λ_1 ≤ … ≤ λ_k`.
    pub values: Vec<f64>,
    /// Integer coordinates of the witnesses in the lattice basis.
    pub witnesses: Vec<Vec<i64>>,
    /// Witnesses as vectors of ℝ^d.
    pub vectors: Vec<Vec<f64>>,
    /// Euclidean radius that was enumerated exhaustively.
    pub radius: f64,
    /// Enumeration-tree nodes visited.
    pub visited: u64,
}

pub fn successive_minima(lattice: &Lattice, norm: &NormOracle, k: usize) -> Result<MinimaResult> {
    successive_minima_with(lattice, norm, k, &EnumerationOptions::default())
}

pub fn successive_minima_with(
    lattice: &Lattice,
    norm: &NormOracle,
    k: usize,
    opts: &EnumerationOptions,
) -> Result<MinimaResult> {
    let d = lattice.dim();
    if norm.dim() != d {
        return Err(Error::dimension(format!(
            "norm has dimension {}, lattice has {d}",
            norm.dim()
        )));
    }
    if k == 0 || k > d {
        return Err(Error::argument(format!("k must be in 1..={d}, got {k}")));
    }

    let (reduced, transform) = lll_reduce(&lattice.basis_f64());
    let column = |m: &DMatrix<f64>, j: usize| -> Vec<f64> { m.column(j).iter().copied().collect() };

    let mut basis_values: Vec<f64> = (0..d).map(|j| norm.eval(&column(&reduced, j))).collect();
    basis_values.sort_by(f64::total_cmp);
    let bound = basis_values[k - 1];
    let slack = 1e-9;
    let value_cut = bound * (1.0 + slack) + f64::MIN_POSITIVE;
    let radius = value_cut / norm.lo() * (1.0 + slack);

    let mut candidates: Vec<Candidate> = Vec::new();
    let visited = enumerate_ball(&reduced, radius, opts.max_candidates, |y| {
        let x = apply_transform(&transform, y);
        if !first_nonzero_positive(&x) {
            return;
        }
        let v = lattice.point_f64(&x);
        let value = norm.eval(&v);
        if value <= value_cut {
            candidates.push(Candidate {
                value,
                coords: x,
                vector: v,
            });
        }
    })?;

    candidates.sort_by(|a, b| a.value.total_cmp(&b.value).then_with(|| tie_order(&a.coords, &b.coords)));

    let mut tracker = IndependenceTracker::new();
    let mut taken = vec![false; candidates.len()];
    let mut out = MinimaResult {
        values: Vec::with_capacity(k),
        witnesses: Vec::with_capacity(k),
        vectors: Vec::with_capacity(k),
        radius,
        visited,
    };
    let mut start = 0;
    while out.values.len() < k {
        // first candidate independent of the current selection
        let Some(first) = (start..candidates.len())
            .find(|&i| !taken[i] && tracker.is_independent(&candidates[i].coords))
        else {
            return Err(Error::Validation(format!(
                "enumeration found only {} independent vectors within radius {radius}",
                out.values.len()
            )));
        };
        start = first;
        let cutoff = candidates[first].value + 1e-12 * candidates[first].value.max(1.0);
        let mut best = first;
        for i in first + 1..candidates.len() {
            if candidates[i].value > cutoff {
                break;
            }
            if !taken[i]
                && tie_order(&candidates[i].coords, &candidates[best].coords) == Ordering::Less
                && tracker.is_independent(&candidates[i].coords)
            {
                best = i;
            }
        }
        taken[best] = true;
        tracker.insert(&candidates[best].coords);
        let c = &candidates[best];
        let value = out.values.last().map_or(c.value, |&prev: &f64| prev.max(c.value));
        out.values.push(value);
        out.witnesses.push(c.coords.clone());
        out.vectors.push(c.vector.clone());
    }
    Ok(out)
}

struct Candidate {
    value: f64,
    coords: Vec<i64>,
    vector: Vec<f64>,
}

/// Deterministic preference among equal-norm witnesses: earliest leading
/// nonzero coordinate first, then lexicographically smallest coordinates.
fn tie_order(a: &[i64], b: &[i64]) -> Ordering {
    let lead = |v: &[i64]| v.iter().position(|&c| c != 0).unwrap_or(v.len());
    lead(a).cmp(&lead(b)).then_with(|| a.cmp(b))
}

fn first_nonzero_positive(x: &[i64]) -> bool {
    x.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

fn apply_transform(u: &[Vec<i64>], y: &[i64]) -> Vec<i64> {
    u.iter()
        .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
        .collect()
}

/// Gram–Schmidt data of the columns: `(|b*_j|², μ)`.
fn gram_schmidt(b: &DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = b.ncols();
    let mut bstar: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(d);
    let mut mu = vec![vec![0.0; d]; d];
    for i in 0..d {
        let mut v = b.column(i).into_owned();
        for j in 0..i {
            mu[i][j] = b.column(i).dot(&bstar[j]) / bstar[j].norm_squared();
            v -= &bstar[j] * mu[i][j];
        }
        bstar.push(v);
    }
    (bstar.iter().map(|v| v.norm_squared()).collect(), mu)
}

/// LLL reduction (δ = 0.99) of the columns. Returns the reduced basis and
/// the integer transform `U` with `reduced = basis · U`.
fn lll_reduce(basis: &DMatrix<f64>) -> (DMatrix<f64>, Vec<Vec<i64>>) {
    let d = basis.ncols();
    let mut b = basis.clone();
    let mut u: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut k = 1;
    let mut steps = 0;
    while k < d && steps < 100_000 {
        steps += 1;
        for j in (0..k).rev() {
            let (_, mu) = gram_schmidt(&b);
            let q = mu[k][j].round();
            if q == 0.0 || !q.is_finite() || q.abs() > 1e12 {
                continue;
            }
            let col = b.column(j) * q;
            let mut target = b.column_mut(k);
            target -= col;
            let q = q as i64;
            for row in u.iter_mut() {
                row[k] -= q * row[j];
            }
        }
        let (bsq, mu) = gram_schmidt(&b);
        if bsq[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * bsq[k - 1] {
            k += 1;
        } else {
            b.swap_columns(k, k - 1);
            for row in u.iter_mut() {
                row.swap(k, k - 1);
            }
            k = (k - 1).max(1);
        }
    }
    // recompute the reduced columns from the transform for accuracy
    let uf = DMatrix::from_fn(d, d, |r, c| u[r][c] as f64);
    (basis * uf, u)
}

/// Visits every nonzero integer vector `y` with `|B y|₂ ≤ radius`.
fn enumerate_ball(
    basis: &DMatrix<f64>,
    radius: f64,
    max_nodes: u64,
    mut visit: impl FnMut(&[i64]),
) -> Result<u64> {
    let d = basis.ncols();
    let (bstar_sq, mu) = gram_schmidt(basis);
    let r2 = radius * radius;

    let mut y = vec![0i64; d];
    let mut visited: u64 = 0;

    struct Ctx<'a> {
        d: usize,
        mu: &'a [Vec<f64>],
        bstar_sq: &'a [f64],
        max_nodes: u64,
        radius: f64,
    }

    fn recurse(
        level: usize,
        partial: f64,
        y: &mut [i64],
        visited: &mut u64,
        ctx: &Ctx,
        r2: f64,
        visit: &mut dyn FnMut(&[i64]),
    ) -> Result<()> {
        let center: f64 = -(level + 1..ctx.d).map(|i| ctx.mu[i][level] * y[i] as f64).sum::<f64>();
        let rem = (r2 - partial).max(0.0);
        let half = (rem / ctx.bstar_sq[level]).sqrt();
        let lo = (center - half).ceil() as i64;
        let hi = (center + half).floor() as i64;
        for c in lo..=hi {
            *visited += 1;
            if *visited > ctx.max_nodes {
                return Err(Error::Resource {
                    what: "lattice enumeration".into(),
                    limit: ctx.max_nodes,
                    reached: format!("Euclidean radius {}", ctx.radius),
                });
            }
            let t = c as f64 - center;
            let p = partial + t * t * ctx.bstar_sq[level];
            if p > r2 * (1.0 + 1e-12) {
                continue;
            }
            y[level] = c;
            if level == 0 {
                if y.iter().any(|&v| v != 0) {
                    visit(y);
                }
            } else {
                recurse(level - 1, p, y, visited, ctx, r2, visit)?;
            }
        }
        y[level] = 0;
        Ok(())
    }

    let ctx = Ctx {
        d,
        mu: &mu,
        bstar_sq: &bstar_sq,
        max_nodes,
        radius,
    };
    recurse(d - 1, 0.0, &mut y, &mut visited, &ctx, r2, &mut visit)?;
    Ok(visited)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normed_lattice::{NormOracle, Polytope};

    #[test]
    fn z2_euclidean() {
        let r = successive_minima(&Lattice::integer(2), &NormOracle::euclidean(2), 2).unwrap();
        assert_eq!(r.values, vec![1.0, 1.0]);
        assert_eq!(r.witnesses, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn z2_linf_first_minimum() {
        let r = successive_minima(&Lattice::integer(2), &NormOracle::linf(2), 1).unwrap();
        assert_eq!(r.values, vec![1.0]);
    }

    #[test]
    fn skewed_basis() {
        // columns (2,0), (1,2)
        let l = Lattice::from_i64_rows(&[vec![2, 1], vec![0, 2]]).unwrap();
        let r = successive_minima(&l, &NormOracle::euclidean(2), 1).unwrap();
        assert!((r.values[0] - 2.0).abs() < 1e-12);
        assert_eq!(r.witnesses[0], vec![1, 0]);
        assert_eq!(r.vectors[0], vec![2.0, 0.0]);
    }

    #[test]
    fn argument_errors() {
        let l = Lattice::integer(2);
        assert!(matches!(
            successive_minima(&l, &NormOracle::euclidean(2), 3),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            successive_minima(&l, &NormOracle::euclidean(2), 0),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            successive_minima(&l, &NormOracle::euclidean(3), 1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn budget_exhaustion_is_a_resource_error() {
        let l = Lattice::integer(4);
        let n = NormOracle::euclidean(4);
        let err = successive_minima_with(&l, &n, 4, &EnumerationOptions { max_candidates: 5 })
            .unwrap_err();
        match err {
            Error::Resource { reached, .. } => assert!(reached.contains("radius")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_basis_gets_reduced() {
        // basis (1,0),(1000,1) spans ℤ²
        let l = Lattice::from_i64_rows(&[vec![1, 1000], vec![0, 1]]).unwrap();
        let r = successive_minima(&l, &NormOracle::euclidean(2), 2).unwrap();
        assert_eq!(r.values, vec![1.0, 1.0]);
        assert!(r.visited < 100);
    }

    #[test]
    fn polytope_minima() {
        let p = Polytope::from_vertices(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let l = Lattice::from_i64_rows(&[vec![3, 1], vec![0, 1]]).unwrap();
        let r = successive_minima(&l, &NormOracle::polytope(p), 2).unwrap();
        // L1 norm: shortest is (1,1) with value 2, then (2,-1) value 3
        assert!((r.values[0] - 2.0).abs() < 1e-12);
        assert!((r.values[1] - 3.0).abs() < 1e-12);
    }
}

//! Transference products `λ_1(Λ) · λ_b(Λ*)` and a seeded random search for
//! large ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dual_lattice, successive_minima, Lattice, MinimaResult, NormOracle, Polytope};
use crate::exact::format_rational;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaProduct {
    pub value: f64,
    pub lambda_1: f64,
    pub dual_lambda_b: f64,
    pub primal: MinimaResult,
    pub dual: MinimaResult,
}

/// `λ_1(Λ, N) · λ_b(Λ*, N*)` with `b = dim Λ`.
pub fn gamma_product(lattice: &Lattice, norm: &NormOracle) -> Result<GammaProduct> {
    let b = lattice.dim();
    let dual_norm = norm.dual()?;
    let dual = dual_lattice(lattice)?;
    let primal = successive_minima(lattice, norm, 1)?;
    let dual_min = successive_minima(&dual, &dual_norm, b)?;
    let lambda_1 = primal.values[0];
    let dual_lambda_b = dual_min.values[b - 1];
    Ok(GammaProduct {
        value: lambda_1 * dual_lambda_b,
        lambda_1,
        dual_lambda_b,
        primal,
        dual: dual_min,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaSearchResult {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub best: f64,
    /// Row-major basis (columns are basis vectors) of the best lattice, as `p/q` strings.
    pub lattice_basis: Vec<Vec<String>>,
    /// Vertices `v_i` of the best unit ball `conv(±v_i)`.
    pub norm_vertices: Vec<Vec<f64>>,
}

/// Random centrally symmetric polytope with `pairs` vertex pairs on the unit
/// sphere. Draws are rejected until the polytope is full-dimensional and
/// its sandwich ratio `hi/lo` is at most `max_ratio`.
pub fn random_polytope<R: Rng>(rng: &mut R, dim: usize, pairs: usize, max_ratio: f64) -> Polytope {
    loop {
        let vertices: Vec<Vec<f64>> = (0..pairs).map(|_| unit_vector(rng, dim)).collect();
        if let Ok(p) = Polytope::from_vertices(vertices) {
            let n = NormOracle::polytope(p.clone());
            if n.hi() / n.lo() <= max_ratio {
                return p;
            }
        }
    }
}

fn unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn random_lattice<R: Rng>(rng: &mut R, dim: usize) -> Lattice {
    loop {
        let rows: Vec<Vec<i64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.gen_range(-4..=4)).collect())
            .collect();
        if let Ok(l) = Lattice::from_i64_rows(&rows) {
            return l;
        }
    }
}

/// Largest transference product over `trials` random lattices with random
/// polytope norms; deterministic in `seed`.
pub fn gamma_lower_bound_search(b: usize, trials: usize, seed: u64) -> Result<GammaSearchResult> {
    if b == 0 {
        return Err(Error::argument("dimension must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    let mut best_lattice = Lattice::integer(b);
    let mut best_vertices: Vec<Vec<f64>> = Vec::new();

    // the integer lattice with the Euclidean ball always gives exactly 1
    let cube = Polytope::from_vertices(
        (0..b)
            .map(|i| (0..b).map(|j| f64::from(u8::from(i == j))).collect())
            .collect(),
    )?;
    let baseline = gamma_product(&best_lattice, &NormOracle::polytope(cube.clone()))?;
    if baseline.value > best {
        best = baseline.value;
        best_vertices = cube.vertices().to_vec();
    }

    for _ in 0..trials {
        let lattice = random_lattice(&mut rng, b);
        let pairs = b + rng.gen_range(0..=3);
        let poly = random_polytope(&mut rng, b, pairs, 10.0);
        let norm = NormOracle::polytope(poly.clone());
        let g = gamma_product(&lattice, &norm)?;
        if g.value > best {
            best = g.value;
            best_lattice = lattice;
            best_vertices = poly.vertices().to_vec();
        }
    }
    Ok(GammaSearchResult {
        dim: b,
        trials,
        seed,
        best,
        lattice_basis: best_lattice
            .basis()
            .row_vecs()
            .iter()
            .map(|r| r.iter().map(format_rational).collect())
            .collect(),
        norm_vertices: best_vertices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;

    #[test]
    fn z2_euclidean_product_is_one() {
        let g = gamma_product(&Lattice::integer(2), &NormOracle::euclidean(2)).unwrap();
        assert!((g.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_scaling_cancels() {
        for c in [0.25, 1.0, 3.0, 17.5] {
            let n = NormOracle::weighted_lp(vec![c], 2.0).unwrap();
            for l in [Lattice::integer(1), Lattice::from_rows(vec![vec![q_frac(7, 3)]]).unwrap()] {
                let g = gamma_product(&l, &n).unwrap();
                assert!((g.value - 1.0).abs() < 1e-12, "c = {c}: {}", g.value);
            }
        }
    }

    #[test]
    fn hexagonal_norm_on_hexagonal_lattice() {
        // The regular hexagon norm with ℤ² gives a product above 1.
        let verts: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 3.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let n = NormOracle::polytope(Polytope::from_vertices(verts).unwrap());
        let g = gamma_product(&Lattice::integer(2), &n).unwrap();
        assert!(g.value >= 1.0 - 1e-9 && g.value <= 1.5 + 1e-9);
    }

    #[test]
    fn search_is_deterministic() {
        let a = gamma_lower_bound_search(2, 20, 11).unwrap();
        let b = gamma_lower_bound_search(2, 20, 11).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.lattice_basis, b.lattice_basis);
    }

    #[test]
    fn one_dimensional_search_is_one() {
        let r = gamma_lower_bound_search(1, 50, 3).unwrap();
        assert!((r.best - 1.0).abs() < 1e-12);
    }
}

//! Exact characteristic-class arithmetic: the Â-class of ℂℙⁿ, Chern
//! characters of line bundles, and index-based admissibility checks on ℂℙⁿ
//! and on products of 2-spheres.

mod series;

pub use series::{sinh_over_u, u_over_sinh, TruncatedSeries};

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::exact::{q_frac, Q};
use crate::{Error, Result};

/// Â(ℂℙⁿ) = `(u / sinh u)^{n+1}` with `u = x/2`, truncated at degree `n`.
pub fn ahat_cp(n: usize) -> Result<TruncatedSeries> {
    if n < 1 {
        return Err(Error::argument("n must be >= 1"));
    }
    let s = u_over_sinh(n).rescale_variable(&q_frac(1, 2));
    s.pow(n as i64 + 1)
}

/// `ch(L) = e^{kx}` for `c_1(L) = k·x`.
pub fn chern_character_line(k: i64, trunc: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(trunc + 1);
    let mut term = Q::one();
    for i in 0..=trunc {
        coeffs.push(term.clone());
        term = term * Q::from_integer(BigInt::from(k)) / Q::from_integer(BigInt::from(i + 1));
    }
    TruncatedSeries::from_coeffs(trunc, coeffs)
}

/// `∫_{ℂℙⁿ} Â · ch(L)` for `c_1(L) = k·x`: the coefficient of `xⁿ`.
pub fn line_index_cp(n: usize, k: i64) -> Result<Q> {
    let a = ahat_cp(n)?;
    Ok((&a * &chern_character_line(k, n)).coeff(n))
}

/// Smallest `k ≥ 1` with nonzero twisted index on ℂℙⁿ, `n` odd.
pub fn minimal_admissible_twist(n: usize) -> Result<i64> {
    if n < 1 {
        return Err(Error::argument("n must be >= 1"));
    }
    if n % 2 == 0 {
        return Err(Error::Unsupported(format!("CP^{n} is not spin (n even)")));
    }
    let a = ahat_cp(n)?;
    // the index is a degree-n polynomial in k, so one of k = 1..=n+1 works
    for k in 1..=(n as i64 + 1) {
        if !(&a * &chern_character_line(k, n)).coeff(n).is_zero() {
            return Ok(k);
        }
    }
    unreachable!("a nonzero polynomial of degree n has at most n roots")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SphereProductIndex {
    pub admissible: bool,
    #[serde(with = "crate::exact::serde_q")]
    pub top_coefficient: Q,
}

/// Largest number of factors expanded in the full exterior-style algebra.
const MAX_EXPANDED_FACTORS: usize = 16;

/// Top coefficient of `ch(L) = exp(Σ b_j η_j)` on `(S²)^m`, with
/// `η_j² = 0`. Â of the product is 1, so this is the twisted index.
pub fn sphere_product_admissible(b: &[i64]) -> Result<SphereProductIndex> {
    if b.is_empty() {
        return Err(Error::argument("need at least one sphere factor"));
    }
    let top = if b.len() <= MAX_EXPANDED_FACTORS {
        nilpotent_exp_top(b)
    } else {
        // exp(Σ b_j η_j) = ∏ (1 + b_j η_j) since the η_j commute and square to zero
        Q::from_integer(b.iter().fold(BigInt::one(), |acc, &x| acc * x))
    };
    Ok(SphereProductIndex {
        admissible: !top.is_zero(),
        top_coefficient: top,
    })
}

/// Expands `Σ_k X^k / k!` for `X = Σ b_j η_j` in ℚ[η]/(η_j²), monomials
/// indexed by bitmask.
fn nilpotent_exp_top(b: &[i64]) -> Q {
    let m = b.len();
    let top_mask = (1u32 << m) - 1;
    let mut power: HashMap<u32, Q> = HashMap::from([(0, Q::one())]);
    let mut total: HashMap<u32, Q> = power.clone();
    for k in 1..=m {
        let mut next: HashMap<u32, Q> = HashMap::new();
        for (mask, c) in &power {
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 || mask & (1 << j) != 0 {
                    continue;
                }
                *next.entry(mask | (1 << j)).or_insert_with(Q::zero) += c * Q::from_integer(bj.into());
            }
        }
        let inv = Q::new(BigInt::one(), BigInt::from(k));
        // X^k/k! from X^{k-1}/(k-1)!
        power = next.into_iter().map(|(m, c)| (m, c * &inv)).collect();
        for (mask, c) in &power {
            *total.entry(*mask).or_insert_with(Q::zero) += c;
        }
    }
    total.remove(&top_mask).unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;

    #[test]
    fn ahat_cp3() {
        let a = ahat_cp(3).unwrap();
        assert_eq!(a.coeffs(), &[q_int(1), q_int(0), q_frac(-1, 6), q_int(0)]);
        assert_eq!(ahat_cp(1).unwrap().coeffs(), &[q_int(1), q_int(0)]);
        assert!(ahat_cp(0).is_err());
    }

    #[test]
    fn chern_characters() {
        let c = chern_character_line(2, 3);
        assert_eq!(c.coeffs(), &[q_int(1), q_int(2), q_int(2), q_frac(4, 3)]);
        assert_eq!(chern_character_line(0, 4), TruncatedSeries::one(4));
        assert_eq!(chern_character_line(-1, 2).coeffs(), &[q_int(1), q_int(-1), q_frac(1, 2)]);
    }

    #[test]
    fn cp3_indices() {
        assert_eq!(line_index_cp(3, 2).unwrap(), q_int(1));
        assert_eq!(line_index_cp(3, 0).unwrap(), q_int(0));
        assert_eq!(line_index_cp(3, 1).unwrap(), q_int(0));
    }

    #[test]
    fn twists() {
        assert_eq!(minimal_admissible_twist(1).unwrap(), 1);
        assert_eq!(minimal_admissible_twist(3).unwrap(), 2);
        assert_eq!(minimal_admissible_twist(5).unwrap(), 3);
        assert!(matches!(minimal_admissible_twist(4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sphere_products() {
        let r = sphere_product_admissible(&[1, 1]).unwrap();
        assert!(r.admissible && r.top_coefficient == q_int(1));
        let r = sphere_product_admissible(&[2, 0, 3]).unwrap();
        assert!(!r.admissible && r.top_coefficient.is_zero());
        let r = sphere_product_admissible(&[1, -2, 3]).unwrap();
        assert!(r.admissible && r.top_coefficient == q_int(-6));
        let big: Vec<i64> = (1..=20).map(|i| if i % 2 == 0 { -1 } else { 1 }).collect();
        assert_eq!(sphere_product_admissible(&big).unwrap().top_coefficient, q_int(1));
    }
}

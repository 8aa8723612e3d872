use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::exact::{format_rational, Q};
use crate::{Error, Result};

/// `Σ c_i x^i mod x^{d+1}` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<Q>,
}

impl TruncatedSeries {
    pub fn zero(trunc: usize) -> Self {
        Self {
            coeffs: vec![Q::zero(); trunc + 1],
        }
    }

    pub fn one(trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = Q::one();
        s
    }

    /// Coefficients beyond `trunc` are dropped, missing ones are zero.
    pub fn from_coeffs(trunc: usize, coeffs: impl IntoIterator<Item = Q>) -> Self {
        let mut s = Self::zero(trunc);
        for (slot, c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = c;
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the truncation.
    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn truncated(&self, trunc: usize) -> Self {
        Self::from_coeffs(trunc, self.coeffs.iter().cloned())
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::argument("series with zero constant term is not invertible"));
        }
        let d = self.trunc();
        let mut inv = Self::zero(d);
        inv.coeffs[0] = c0.recip();
        for i in 1..=d {
            let s = (1..=i).fold(Q::zero(), |acc, j| acc + &self.coeffs[j] * &inv.coeffs[i - j]);
            inv.coeffs[i] = -s / c0;
        }
        Ok(inv)
    }

    /// Integer power; negative exponents need an invertible series.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = Self::one(self.trunc());
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &sq;
            }
            exp >>= 1;
            if exp > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// `e^f` for `f` with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::argument("exp needs a series with zero constant term"));
        }
        let d = self.trunc();
        let mut out = Self::one(d);
        let mut term = Self::one(d);
        for k in 1..=d {
            term = (&term * self).scale(&Q::new(BigInt::one(), BigInt::from(k)));
            out = &out + &term;
        }
        Ok(out)
    }

    /// Substitution `x ↦ c·x`.
    pub fn rescale_variable(&self, c: &Q) -> Self {
        let mut p = Q::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a * &p);
            p *= c;
        }
        Self { coeffs }
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(Zero::is_zero)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let d = self.trunc().min(rhs.trunc());
        TruncatedSeries::from_coeffs(d, (0..=d).map(|i| &self.coeffs[i] + &rhs.coeffs[i]))
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self + &(-rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let d = self.trunc().min(rhs.trunc());
        let mut out = TruncatedSeries::zero(d);
        for (i, a) in self.coeffs.iter().enumerate().take(d + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(d + 1 - i) {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Q::zero();
            let abs = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            if i == 0 || !abs.is_one() {
                write!(f, "{}", format_rational(&abs))?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            write!(f, "{mono}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.trunc() + 1)
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TruncatedSeries", 2)?;
        st.serialize_field("trunc", &self.trunc())?;
        let c: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        st.serialize_field("coeffs", &c)?;
        st.end()
    }
}

/// `sinh(u)/u = Σ u^{2k} / (2k+1)!`, truncated at degree `trunc`.
pub fn sinh_over_u(trunc: usize) -> TruncatedSeries {
    let mut coeffs = vec![Q::zero(); trunc + 1];
    let mut fact = BigInt::one();
    for i in 0..=trunc {
        // fact = (i+1)!
        fact *= BigInt::from(i + 1);
        if i % 2 == 0 {
            coeffs[i] = Q::new(BigInt::one(), fact.clone());
        }
    }
    TruncatedSeries::from_coeffs(trunc, coeffs)
}

/// `u/sinh(u)` by exact inversion of `sinh(u)/u`.
pub fn u_over_sinh(trunc: usize) -> TruncatedSeries {
    sinh_over_u(trunc)
        .inverse()
        .expect("sinh(u)/u has constant term 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q_frac, q_int};

    #[test]
    fn inverse_roundtrip() {
        let s = TruncatedSeries::from_coeffs(5, [q_int(2), q_int(-1), q_frac(1, 3)]);
        let p = &s * &s.inverse().unwrap();
        assert_eq!(p, TruncatedSeries::one(5));
    }

    #[test]
    fn exp_log_like_identities() {
        let x = TruncatedSeries::from_coeffs(6, [q_int(0), q_int(1)]);
        let e = x.exp().unwrap();
        for i in 0..=6 {
            let mut f = BigInt::one();
            for j in 1..=i {
                f *= j;
            }
            assert_eq!(e.coeff(i), Q::new(BigInt::one(), f));
        }
        assert!(TruncatedSeries::one(3).exp().is_err());
    }

    #[test]
    fn pow_negative() {
        let s = TruncatedSeries::from_coeffs(4, [q_int(1), q_int(1)]);
        let p = s.pow(-1).unwrap();
        assert_eq!(p.coeffs(), &[q_int(1), q_int(-1), q_int(1), q_int(-1), q_int(1)]);
        assert_eq!(s.pow(3).unwrap().coeff(2), q_int(3));
    }

    #[test]
    fn u_over_sinh_low_terms() {
        let s = u_over_sinh(4);
        assert_eq!(s.coeff(2), q_frac(-1, 6));
        assert_eq!(s.coeff(4), q_frac(7, 360));
        assert!(s.is_even());
    }

    #[test]
    fn display() {
        let s = TruncatedSeries::from_coeffs(3, [q_int(1), q_int(0), q_frac(-1, 6)]);
        assert_eq!(s.to_string(), "1 - 1/6*x^2 + O(x^4)");
    }
}

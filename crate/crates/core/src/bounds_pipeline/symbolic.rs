use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{format_rational, q_int, q_to_f64, serde_q, Q};
use crate::{Error, Result};

/// `q · π^s · ∏ symbol^e` with exact `q`; symbols stay unevaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicBound {
    #[serde(with = "serde_q")]
    pub rational: Q,
    pub pi_power: i32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub symbols: BTreeMap<String, i32>,
}

impl SymbolicBound {
    pub fn rational(q: Q) -> Self {
        Self {
            rational: q,
            pi_power: 0,
            symbols: BTreeMap::new(),
        }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(q_int(n))
    }

    pub fn pi() -> Self {
        Self {
            rational: Q::one(),
            pi_power: 1,
            symbols: BTreeMap::new(),
        }
    }

    pub fn symbol(name: &str) -> Self {
        Self {
            rational: Q::one(),
            pi_power: 0,
            symbols: BTreeMap::from([(name.to_string(), 1)]),
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `q · π^s`, or `None` while symbols remain.
    pub fn float_value(&self) -> Option<f64> {
        self.is_numeric()
            .then(|| q_to_f64(&self.rational) * std::f64::consts::PI.powi(self.pi_power))
    }

    /// Value with each symbol replaced by a numeric upper bound, when every
    /// symbol has one and appears with a positive power.
    pub fn envelope(&self, values: &BTreeMap<String, f64>) -> Option<f64> {
        let mut v = q_to_f64(&self.rational) * std::f64::consts::PI.powi(self.pi_power);
        for (name, &e) in &self.symbols {
            if e < 0 {
                return None;
            }
            v *= values.get(name)?.powi(e);
        }
        Some(v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut symbols = self.symbols.clone();
        for (k, e) in &other.symbols {
            *symbols.entry(k.clone()).or_insert(0) += e;
        }
        symbols.retain(|_, e| *e != 0);
        Self {
            rational: &self.rational * &other.rational,
            pi_power: self.pi_power + other.pi_power,
            symbols,
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.rational.is_zero() {
            return Err(Error::argument("division by zero"));
        }
        Ok(Self {
            rational: self.rational.recip(),
            pi_power: -self.pi_power,
            symbols: self.symbols.iter().map(|(k, e)| (k.clone(), -e)).collect(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        let mut r = Q::one();
        for _ in 0..e {
            r *= &self.rational;
        }
        Ok(Self {
            rational: r,
            pi_power: self.pi_power * e,
            symbols: self
                .symbols
                .iter()
                .filter(|_| e != 0)
                .map(|(k, x)| (k.clone(), x * e))
                .collect(),
        })
    }
}

impl fmt::Display for SymbolicBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = &self.rational;
        let mut parts: Vec<String> = Vec::new();
        let numer_one = q.numer().abs().is_one();
        if !numer_one || (self.pi_power == 0 && self.symbols.is_empty()) {
            parts.push(q.numer().abs().to_string());
        }
        match self.pi_power {
            0 => {}
            1 => parts.push("π".to_string()),
            s => parts.push(format!("π^{s}")),
        }
        for (name, e) in &self.symbols {
            if *e == 1 {
                parts.push(name.clone());
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        let sign = if q.is_negative() { "-" } else { "" };
        write!(f, "{sign}{}", parts.join("·"))?;
        if !q.denom().is_one() {
            write!(f, "/{}", q.denom())?;
        }
        Ok(())
    }
}

impl SymbolicBound {
    /// `{"q": "p/q", "pi_power": s}` plus a `symbols` map when nonempty.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "q": format_rational(&self.rational),
            "pi_power": self.pi_power,
        });
        if !self.symbols.is_empty() {
            v["symbols"] = serde_json::to_value(&self.symbols).unwrap_or_default();
        }
        v
    }
}

//! Integer combinations `Σ a_j v_j` of a basis of ℚⁿ with every coordinate
//! nonzero and `Σ |a_j| ≤ V_n`, built by induction on `n`, with an exhaustive
//! minimum-cost oracle for small `n`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::exact::bareiss_det;
use crate::{Error, Result};

/// `V_n = ⌊(n+1)/2⌋ · ⌈(n+1)/2⌉`.
pub fn v_n(n: usize) -> Result<u64> {
    if n < 1 {
        return Err(Error::argument("n must be >= 1"));
    }
    let m = n as u64 + 1;
    Ok((m / 2) * m.div_ceil(2))
}

/// `n` linearly independent integer vectors, stored as the columns of an
/// `n × n` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerBasis {
    rows: Vec<Vec<BigInt>>,
}

impl IntegerBasis {
    /// Row-major matrix whose columns are the basis vectors.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::dimension("basis must be nonempty"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::dimension(format!("basis matrix must be {n}x{n}")));
        }
        if bareiss_det(&rows).is_zero() {
            return Err(Error::validation("basis vectors are linearly dependent"));
        }
        Ok(Self { rows })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// Basis given by its vectors rather than by matrix rows.
    pub fn from_columns(columns: &[Vec<i64>]) -> Result<Self> {
        let n = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::dimension(format!("expected {n} vectors of length {n}")));
        }
        let rows: Vec<Vec<i64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        Self::from_i64_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    /// Exact `Σ a_j v_j`.
    pub fn combine(&self, coeffs: &[i64]) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(coeffs)
                    .fold(BigInt::zero(), |acc, (v, &a)| acc + v * a)
            })
            .collect()
    }

    /// Columns permuted by `perm` (new column `j` is old column `perm[j]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .map(|r| perm.iter().map(|&j| r[j].clone()).collect())
            .collect();
        Self::from_rows(rows)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Combination {
    pub coeffs: Vec<i64>,
    #[serde(serialize_with = "serialize_big_ints")]
    pub result: Vec<BigInt>,
    pub cost: u64,
}

impl Combination {
    fn new(basis: &IntegerBasis, coeffs: Vec<i64>) -> Self {
        let result = basis.combine(&coeffs);
        let cost = coeffs.iter().map(|a| a.unsigned_abs()).sum();
        Self {
            coeffs,
            result,
            cost,
        }
    }

    pub fn all_nonzero(&self) -> bool {
        self.result.iter().all(|b| !b.is_zero())
    }
}

fn serialize_big_ints<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for b in v {
        match b.to_i64() {
            Some(x) => seq.serialize_element(&x)?,
            None => seq.serialize_element(&b.to_string())?,
        }
    }
    seq.end()
}

/// One level of the induction, outermost first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub depth: usize,
    pub dim: usize,
    /// Original indices of the columns kept for the recursive call.
    pub kept: Vec<usize>,
    /// Original index of the column dropped at this level.
    pub dropped: Option<usize>,
    /// Column `l` added `c` times to repair a zero last coordinate.
    pub l: Option<usize>,
    pub c: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CombinationReport {
    #[serde(flatten)]
    pub combination: Combination,
    pub bound: u64,
    pub trace: Vec<TraceStep>,
}

pub fn find_combination(basis: &IntegerBasis) -> Combination {
    find_combination_traced(basis).combination
}

pub fn find_combination_traced(basis: &IntegerBasis) -> CombinationReport {
    let n = basis.dim();
    let cols: Vec<usize> = (0..n).collect();
    let mut trace = Vec::with_capacity(n);
    let coeffs = induct(&basis.rows, &cols, 0, &mut trace);
    CombinationReport {
        combination: Combination::new(basis, coeffs),
        bound: v_n(n).unwrap_or(0),
        trace,
    }
}

/// `rows` is the `k × k` matrix of the current level, `cols[j]` the original
/// index of its column `j`.
fn induct(rows: &[Vec<BigInt>], cols: &[usize], depth: usize, trace: &mut Vec<TraceStep>) -> Vec<i64> {
    let k = rows.len();
    if k == 1 {
        trace.push(TraceStep {
            depth,
            dim: 1,
            kept: cols.to_vec(),
            dropped: None,
            l: None,
            c: None,
        });
        return vec![1];
    }

    // Lexicographically first (k-1)-subset of columns whose projection
    // (last row deleted) is nonsingular: drop the last column first.
    let (drop, sub) = (0..k)
        .rev()
        .find_map(|drop| {
            let sub: Vec<Vec<BigInt>> = rows[..k - 1]
                .iter()
                .map(|r| (0..k).filter(|&j| j != drop).map(|j| r[j].clone()).collect())
                .collect();
            (!bareiss_det(&sub).is_zero()).then_some((drop, sub))
        })
        .expect("a nonsingular minor exists for an independent basis");

    let kept_local: Vec<usize> = (0..k).filter(|&j| j != drop).collect();
    let kept_orig: Vec<usize> = kept_local.iter().map(|&j| cols[j]).collect();
    let step_index = trace.len();
    trace.push(TraceStep {
        depth,
        dim: k,
        kept: kept_orig.clone(),
        dropped: Some(cols[drop]),
        l: None,
        c: None,
    });

    let inner = induct(&sub, &kept_orig, depth + 1, trace);
    let mut a = vec![0i64; k];
    for (&j, &x) in kept_local.iter().zip(&inner) {
        a[j] = x;
    }

    let combine = |a: &[i64]| -> Vec<BigInt> {
        rows.iter()
            .map(|r| r.iter().zip(a).fold(BigInt::zero(), |acc, (v, &x)| acc + v * x))
            .collect()
    };
    let b = combine(&a);
    if !b[k - 1].is_zero() {
        return a;
    }

    let l = (0..k)
        .find(|&j| !rows[k - 1][j].is_zero())
        .expect("an independent basis has a nonzero entry in every row");
    let half = k.div_ceil(2) as i64;
    let c = (1..=half)
        .flat_map(|m| [m, -m])
        .find(|&c| {
            b.iter()
                .zip(rows)
                .all(|(bi, r)| !(bi + &r[l] * c).is_zero())
        })
        .expect("some c in ±1..=±ceil(k/2) keeps every coordinate nonzero");
    a[l] += c;
    trace[step_index].l = Some(cols[l]);
    trace[step_index].c = Some(c);
    a
}

/// Default limit on the number of coefficient vectors the oracle enumerates.
pub const DEFAULT_BRUTE_FORCE_CAP: u64 = 100_000_000;

/// Number of `a ∈ ℤⁿ` with `Σ |a_j| ≤ budget`.
pub fn l1_ball_count(n: usize, budget: u64) -> Option<u64> {
    // Σ_k C(n,k) C(budget,k) 2^k
    let mut total: u128 = 0;
    let mut cn: u128 = 1;
    let mut cb: u128 = 1;
    for k in 0..=n.min(budget as usize) as u128 {
        if k > 0 {
            cn = cn * (n as u128 - k + 1) / k;
            cb = cb * (u128::from(budget) - k + 1) / k;
        }
        total = total.checked_add(cn.checked_mul(cb)?.checked_mul(1u128.checked_shl(k as u32)?)?)?;
    }
    u64::try_from(total).ok()
}

/// Minimum-cost combination with all coordinates nonzero and cost at most
/// `budget`. Among equal costs the first coefficient vector in lexicographic
/// order wins, with integers ordered `0, 1, -1, 2, -2, …`.
pub fn brute_force_min_cost(basis: &IntegerBasis, budget: u64, cap: u64) -> Result<Option<Combination>> {
    let n = basis.dim();
    let count = l1_ball_count(n, budget);
    match count {
        Some(c) if c <= cap => {}
        _ => {
            return Err(Error::Resource {
                what: format!("coefficient vectors with L1 norm <= {budget} in dimension {n}"),
                limit: cap,
                reached: count.map_or_else(|| "overflow".to_string(), |c| c.to_string()),
            })
        }
    }
    let rows: Vec<Vec<i128>> = basis
        .rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::argument("basis entries exceed the oracle's 128-bit range"))?;
    let cols: Vec<Vec<i128>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();

    let mut a = vec![0i64; n];
    let mut acc = vec![0i128; n];
    for cost in 1..=budget {
        if search(&cols, 0, cost, &mut a, &mut acc) {
            return Ok(Some(Combination::new(basis, a)));
        }
    }
    Ok(None)
}

/// Fills `a[i..]` with exactly `remaining` L1 mass, in the oracle's order.
fn search(cols: &[Vec<i128>], i: usize, remaining: u64, a: &mut [i64], acc: &mut [i128]) -> bool {
    let n = cols.len();
    if i == n - 1 {
        let m = remaining as i64;
        let candidates: &[i64] = if m == 0 { &[0] } else { &[m, -m] };
        for &x in candidates {
            let ok = acc
                .iter()
                .zip(&cols[i])
                .all(|(s, v)| s + v * i128::from(x) != 0);
            if ok {
                a[i] = x;
                return true;
            }
        }
        return false;
    }
    let rem = remaining as i64;
    let order = std::iter::once(0).chain((1..=rem).flat_map(|m| [m, -m]));
    for x in order {
        let rest = remaining - x.unsigned_abs();
        a[i] = x;
        if x != 0 {
            for (s, v) in acc.iter_mut().zip(&cols[i]) {
                *s += v * i128::from(x);
            }
        }
        let found = search(cols, i + 1, rest, a, acc);
        if x != 0 && !found {
            for (s, v) in acc.iter_mut().zip(&cols[i]) {
                *s -= v * i128::from(x);
            }
        }
        if found {
            return true;
        }
    }
    a[i] = 0;
    false
}

//! Exact integer formulas for the halving constructions and MinD trees:
//! S-node and D-node counts of the divide-and-conquer tree on `n` leaves
//! (`sigma`, `delta`), the D count of the complete-full-binary tree
//! (`delta_cfb`), Takagi-function dilations on dyadic rationals, the Colless
//! index of the descending and ascending MinD arrangements (`c_desc`,
//! `c_asc`), and normalized Colless bounds.
//!
//! Every routine is exact: integer or rational arithmetic throughout, no
//! floating point. Each quantity that has several equivalent forms is exposed
//! with a method selector so the forms can be checked against each other.

use crate::fp::ratio_string;
use num_rational::Ratio;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("{name} requires n >= {min}, got {n}")]
    DomainTooSmall { name: &'static str, min: u64, n: u64 },
    #[error("{name} requires n <= {max}, got {n}")]
    DomainTooLarge { name: &'static str, max: u64, n: u64 },
    #[error("midpoint form is undefined at powers of two, got {n}")]
    MidpointAtPowerOfTwo { n: u64 },
    #[error("takagi argument needs 0 <= r <= 2^k and k <= {max_k}, got r={r}, k={k}")]
    TakagiRange { r: u64, k: u32, max_k: u32 },
    #[error("colless value {c} outside [{min}, {max}] for n={n}")]
    CollessRange { c: u64, min: u64, max: u64, n: u64 },
}

/// Number of ones in the binary expansion of `n` (written omega elsewhere
/// in this crate).
pub fn weight(n: u64) -> u32 {
    n.count_ones()
}

fn floor_log2(n: u64) -> u32 {
    debug_assert!(n >= 1);
    63 - n.leading_zeros()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMethod {
    /// sigma(2m) = 2 sigma(m) + 1, sigma(2m+1) = sigma(m) + sigma(m+1).
    Recursive,
    /// Sum over levels of the distance from n mod 2^i to the nearest end of
    /// its bit's interval.
    Levelwise,
    /// Closed bitwise sum with alternating-sign remainders.
    Bitwise,
}

/// S-node count of the divide-and-conquer tree on `n` leaves.
pub fn sigma(n: u64, method: SigmaMethod) -> Result<u64, FormulaError> {
    if n == 0 {
        return Err(FormulaError::DomainTooSmall { name: "sigma", min: 1, n });
    }
    Ok(match method {
        SigmaMethod::Recursive => sigma_recursive(n),
        SigmaMethod::Levelwise => sigma_levelwise(n),
        SigmaMethod::Bitwise => sigma_bitwise(n),
    })
}

fn sigma_recursive(n: u64) -> u64 {
    static MEMO: OnceLock<Mutex<HashMap<u64, u64>>> = OnceLock::new();
    fn go(n: u64, memo: &mut HashMap<u64, u64>) -> u64 {
        if n <= 1 {
            return 0;
        }
        if let Some(&v) = memo.get(&n) {
            return v;
        }
        let v = if n.is_multiple_of(2) {
            2 * go(n / 2, memo) + 1
        } else {
            go(n / 2, memo) + go(n / 2 + 1, memo)
        };
        memo.insert(n, v);
        v
    }
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    go(n, &mut memo.lock().unwrap())
}

fn sigma_levelwise(n: u64) -> u64 {
    let k = floor_log2(n);
    (0..=k)
        .map(|i| {
            let rem = n & ((1u64 << i) - 1); // n mod 2^i
            if (n >> i) & 1 == 0 {
                (1u64 << i) - rem
            } else {
                rem
            }
        })
        .sum()
}

fn sigma_bitwise(n: u64) -> u64 {
    let k = floor_log2(n);
    let mut total = 0i64;
    for i in 0..=k {
        let flip = ((n >> i) + 1) & 1; // complement of bit i
        let rem = (n & ((1u64 << i) - 1)) as i64;
        let term = flip as i64 * (1i64 << i) + if flip == 1 { -rem } else { rem };
        total += term;
    }
    total as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMethod {
    /// delta(2m) = 2 delta(m), delta(2m+1) = delta(m) + delta(m+1) + 1.
    Recursive,
    /// Sum over levels below the top bit of the distance to the nearest
    /// lattice point.
    Levelwise,
    /// Closed bitwise sum with alternating-sign remainders.
    Explicit,
    /// Unit-step recurrence delta(n+1) = delta(n) + floor(log2 n)
    /// - 2 weight(n) + 2, materialized as a table (bounded domain).
    Recurrence,
    /// Midpoint identity from the two neighbours; undefined at powers of
    /// two.
    Midpoint,
}

/// Largest `n` the table-backed [`DeltaMethod::Recurrence`] will serve.
pub const DELTA_RECURRENCE_MAX: u64 = 1 << 22;

/// D-node count of the divide-and-conquer tree on `n` leaves. Complements
/// [`sigma`]: the two always add to `n - 1`.
pub fn delta(n: u64, method: DeltaMethod) -> Result<u64, FormulaError> {
    if n == 0 {
        return Err(FormulaError::DomainTooSmall { name: "delta", min: 1, n });
    }
    match method {
        DeltaMethod::Recursive => Ok(delta_recursive(n)),
        DeltaMethod::Levelwise => Ok(delta_levelwise(n)),
        DeltaMethod::Explicit => Ok(delta_explicit(n)),
        DeltaMethod::Recurrence => delta_recurrence(n),
        DeltaMethod::Midpoint => delta_midpoint(n),
    }
}

fn delta_recursive(n: u64) -> u64 {
    static MEMO: OnceLock<Mutex<HashMap<u64, u64>>> = OnceLock::new();
    fn go(n: u64, memo: &mut HashMap<u64, u64>) -> u64 {
        if n <= 1 {
            return 0;
        }
        if let Some(&v) = memo.get(&n) {
            return v;
        }
        let v = if n.is_multiple_of(2) {
            2 * go(n / 2, memo)
        } else {
            go(n / 2, memo) + go(n / 2 + 1, memo) + 1
        };
        memo.insert(n, v);
        v
    }
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    go(n, &mut memo.lock().unwrap())
}

fn delta_levelwise(n: u64) -> u64 {
    let k = floor_log2(n);
    (0..k)
        .map(|i| {
            let rem = n & ((1u64 << i) - 1);
            if (n >> i) & 1 == 0 {
                rem
            } else {
                (1u64 << i) - rem
            }
        })
        .sum()
}

fn delta_explicit(n: u64) -> u64 {
    let k = floor_log2(n);
    let mut total = 0i64;
    for i in 0..k {
        let bit = (n >> i) & 1;
        let rem = (n & ((1u64 << i) - 1)) as i64;
        total += bit as i64 * (1i64 << i) + if bit == 1 { -rem } else { rem };
    }
    total as u64
}

fn delta_recurrence(n: u64) -> Result<u64, FormulaError> {
    if n > DELTA_RECURRENCE_MAX {
        return Err(FormulaError::DomainTooLarge {
            name: "delta (recurrence)",
            max: DELTA_RECURRENCE_MAX,
            n,
        });
    }
    static TABLE: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(vec![0, 0]));
    let mut table = table.lock().unwrap();
    while (table.len() as u64) <= n {
        let m = table.len() as u64 - 1;
        let step = floor_log2(m) as i64 - 2 * weight(m) as i64 + 2;
        let next = table[m as usize] as i64 + step;
        debug_assert!(next >= 0);
        table.push(next as u64);
    }
    Ok(table[n as usize])
}

fn delta_midpoint(n: u64) -> Result<u64, FormulaError> {
    if n.is_power_of_two() {
        return Err(FormulaError::MidpointAtPowerOfTwo { n });
    }
    let a = delta_recursive(n - 1);
    let b = delta_recursive(n + 1);
    debug_assert!((a + b).is_multiple_of(2));
    let v = ((a + b) / 2) as i64 + 1 - n.trailing_zeros() as i64;
    debug_assert!(v >= 0);
    Ok(v as u64)
}

/// D-node count of the complete-full-binary tree on `n` leaves: write
/// `n = 2^l * d` with `d` odd; the count is `floor(log2 d)`.
pub fn delta_cfb(n: u64) -> Result<u64, FormulaError> {
    if n == 0 {
        return Err(FormulaError::DomainTooSmall { name: "delta_cfb", min: 1, n });
    }
    let d = n >> n.trailing_zeros();
    Ok(floor_log2(d) as u64)
}

/// Exact dyadic rational `numerator / 2^k`, kept on its grid (not reduced)
/// so values produced by different methods compare directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicRational {
    pub numerator: u64,
    pub k: u32,
}

impl DyadicRational {
    /// Reduced rational value.
    pub fn to_ratio(self) -> Ratio<u64> {
        Ratio::new(self.numerator, 1u64 << self.k)
    }
}

impl std::fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", ratio_string(&self.to_ratio()))
    }
}

pub const TAKAGI_MAX_K: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TakagiMethod {
    /// tau(r / 2^k) = delta(2^k + r) / 2^k.
    ViaDelta,
    /// Digit series sum of l_i / 2^i plus the constant tail.
    Series,
    /// Single weighted integer sum of the digits.
    Weighted,
}

/// Takagi function value at the dyadic rational `r / 2^k`, exact on the
/// `2^k` grid. Domain: `0 <= r <= 2^k`, `k <= TAKAGI_MAX_K`. At `r = 2^k`
/// the digit forms read `r` through its low `k` bits, which makes them agree
/// with the delta form (the value is 0 at both endpoints).
pub fn takagi_dyadic(r: u64, k: u32, method: TakagiMethod) -> Result<DyadicRational, FormulaError> {
    if k > TAKAGI_MAX_K || r > (1u64 << k) {
        return Err(FormulaError::TakagiRange { r, k, max_k: TAKAGI_MAX_K });
    }
    let numerator = match method {
        TakagiMethod::ViaDelta => delta_recursive((1u64 << k) + r),
        TakagiMethod::Series => {
            // Accumulate l_i / 2^i on progressively finer grids, then add
            // the tail: every digit beyond position k equals weight(r), and
            // their geometric series sums to weight(r) / 2^k exactly.
            let r_low = r & ((1u64 << k) - 1);
            let digits = takagi_digits(r_low, k);
            let mut num = 0u64;
            for (idx, l) in digits.iter().enumerate() {
                let i = idx as u32 + 1; // digit index, 1-based
                num += l << (k - i);
            }
            num + weight(r_low) as u64
        }
        TakagiMethod::Weighted => {
            let r_low = r & ((1u64 << k) - 1);
            let digits = takagi_digits(r_low, k);
            let weighted: u64 = digits
                .iter()
                .enumerate()
                .map(|(idx, l)| l * (1u64 << (k - (idx as u32 + 1))))
                .sum();
            weighted + weight(r_low) as u64
        }
    };
    Ok(DyadicRational { numerator, k })
}

// Digits l_1 .. l_k of the Takagi expansion of r / 2^k: l_1 = 0 and
// l_{i+1} counts either the ones (next bit 0) or the zeros (next bit 1)
// among the i leading bits of r.
fn takagi_digits(r: u64, k: u32) -> Vec<u64> {
    let mut digits = Vec::with_capacity(k as usize);
    if k == 0 {
        return digits;
    }
    digits.push(0);
    let mut ones = 0u64; // ones among bits k-1 .. k-i of r
    for i in 1..k {
        ones += (r >> (k - i)) & 1;
        let next_bit = (r >> (k - i - 1)) & 1;
        digits.push(if next_bit == 0 { ones } else { i as u64 - ones });
    }
    digits
}

/// Colless index of the descending MinD arrangement on `n` leaves (largest
/// power-of-two block deepest).
pub fn c_desc(n: u64) -> Result<u64, FormulaError> {
    if n == 0 {
        return Err(FormulaError::DomainTooSmall { name: "c_desc", min: 1, n });
    }
    static MEMO: OnceLock<Mutex<HashMap<u64, i128>>> = OnceLock::new();
    fn go(n: u64, memo: &mut HashMap<u64, i128>) -> i128 {
        if n <= 2 {
            return 0;
        }
        if let Some(&v) = memo.get(&n) {
            return v;
        }
        let v = if n.is_multiple_of(2) {
            2 * go(n / 2, memo)
        } else {
            // For odd n the second-smallest exponent of n is tz(m) + 1.
            let m = n / 2;
            let rho2 = m.trailing_zeros() + 1;
            2 * go(m, memo) - weight(m) as i128 + (1i128 << rho2)
        };
        memo.insert(n, v);
        v
    }
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    let v = go(n, &mut memo.lock().unwrap());
    debug_assert!(v >= 0);
    Ok(v as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CAscMethod {
    /// c(2m) = 2 c(m), c(2m+1) = 2 c(m) + 2m - 1.
    Recurrence,
    /// Closed bitwise sum over the non-leading one bits of n.
    Closed,
}

/// Colless index of the ascending MinD arrangement on `n` leaves (smallest
/// power-of-two block deepest). This is the worst Colless index over all
/// MinD trees on `n` leaves.
pub fn c_asc(n: u64, method: CAscMethod) -> Result<u64, FormulaError> {
    if n == 0 {
        return Err(FormulaError::DomainTooSmall { name: "c_asc", min: 1, n });
    }
    match method {
        CAscMethod::Recurrence => {
            static MEMO: OnceLock<Mutex<HashMap<u64, u64>>> = OnceLock::new();
            fn go(n: u64, memo: &mut HashMap<u64, u64>) -> u64 {
                if n <= 1 {
                    return 0;
                }
                if let Some(&v) = memo.get(&n) {
                    return v;
                }
                let v = if n.is_multiple_of(2) {
                    2 * go(n / 2, memo)
                } else {
                    2 * go(n / 2, memo) + (n - 2)
                };
                memo.insert(n, v);
                v
            }
            let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
            Ok(go(n, &mut memo.lock().unwrap()))
        }
        CAscMethod::Closed => {
            let k = floor_log2(n);
            let mut total = 0u128;
            for i in 0..k {
                if (n >> i) & 1 == 1 {
                    total += (1u128 << i) * ((n >> i) as u128 - 2);
                }
            }
            Ok(u64::try_from(total).expect("c_asc fits in u64 for u64 n"))
        }
    }
}

/// Largest `n` for which `c_max` fits comfortably in u64.
pub const C_MAX_DOMAIN: u64 = 1 << 32;

/// Maximum Colless index over all full binary trees on `n` leaves,
/// `(n-1)(n-2)/2`, attained by the ladder.
pub fn c_max(n: u64) -> Result<u64, FormulaError> {
    if n == 0 {
        return Err(FormulaError::DomainTooSmall { name: "c_max", min: 1, n });
    }
    if n > C_MAX_DOMAIN {
        return Err(FormulaError::DomainTooLarge { name: "c_max", max: C_MAX_DOMAIN, n });
    }
    if n == 1 {
        return Ok(0);
    }
    Ok((n - 1) * (n - 2) / 2)
}

/// Normalized Colless index `(c - delta(n)) / (c_max(n) - delta(n))`,
/// exact. Defined for `n >= 4`; `c` must lie in `[delta(n), c_max(n)]`.
pub fn normalized_colless(c: u64, n: u64) -> Result<Ratio<u64>, FormulaError> {
    if n < 4 {
        return Err(FormulaError::DomainTooSmall { name: "normalized_colless", min: 4, n });
    }
    let lo = delta(n, DeltaMethod::Recursive)?;
    let hi = c_max(n)?;
    if c < lo || c > hi {
        return Err(FormulaError::CollessRange { c, min: lo, max: hi, n });
    }
    Ok(Ratio::new(c - lo, hi - lo))
}

/// The Colless landscape of MinD trees on `n` leaves: best and worst MinD
/// values, the global extremes, and the normalized worst-case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollessBounds {
    pub n: u64,
    /// Colless index of the descending arrangement (best MinD).
    pub c_desc: u64,
    /// Colless index of the ascending arrangement (worst MinD).
    pub c_asc: u64,
    /// Global maximum over all shapes, `(n-1)(n-2)/2`.
    pub c_max: u64,
    /// Global minimum over all shapes.
    pub delta: u64,
    /// `normalized_colless(c_asc, n)`, strictly below
    /// `2 floor(log2 n) / n`.
    pub normalized_upper: Ratio<u64>,
}

/// Bounds summary for `n >= 4`.
pub fn mind_bounds(n: u64) -> Result<CollessBounds, FormulaError> {
    if n < 4 {
        return Err(FormulaError::DomainTooSmall { name: "mind_bounds", min: 4, n });
    }
    let bounds = CollessBounds {
        n,
        c_desc: c_desc(n)?,
        c_asc: c_asc(n, CAscMethod::Recurrence)?,
        c_max: c_max(n)?,
        delta: delta(n, DeltaMethod::Recursive)?,
        normalized_upper: normalized_colless(c_asc(n, CAscMethod::Recurrence)?, n)?,
    };
    debug_assert!(bounds.normalized_upper < Ratio::new(2 * floor_log2(n) as u64, n));
    Ok(bounds)
}

//! Exact counts of reduction-tree shapes and reduction orders.
//!
//! `alpha(n)` counts the shapes on `n` leaves produced by the split
//! recursion `alpha(n) = sum over 1 <= i <= n/2 of alpha(i) alpha(n-i)`
//! (OEIS A000992); `theta(n, s)` refines the same count by the number of
//! S nodes. The equal-split term enters as ordered pairs, so from `n = 8`
//! up these counts sit slightly above the free (Wedderburn-Etherington,
//! OEIS A001190) shape counts; the catalogs in [`crate::oracle`] follow the
//! same convention so the two always reconcile.
//!
//! The product counts live here too: `(2n-3)!!` reduction orders in total,
//! `n! / 2^s` orders per shape with `s` S nodes, and the two forms for the
//! count of distinct orders of the divide-and-conquer tree.

use crate::formulas::{sigma, weight, SigmaMethod};
use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};
use std::collections::HashMap;
use thiserror::Error;

/// Counts grow super-exponentially; everything is arbitrary precision.
pub type BigCount = BigUint;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountingError {
    #[error("{name} requires n >= {min}, got {n}")]
    DomainTooSmall { name: &'static str, min: u64, n: u64 },
    #[error("theta table bound n_max={n_max} exceeds the supported limit {max}")]
    TableTooLarge { n_max: u64, max: u64 },
    #[error("s={s} exceeds the 2-adic valuation {max} of {n}!, so 2^s does not divide n!")]
    SBeyondTwoAdic { s: u64, max: u64, n: u64 },
}

/// Number of reduction-tree shapes on `n` leaves under the ordered
/// equal-split convention (OEIS A000992).
pub fn alpha(n: u64) -> Result<BigCount, CountingError> {
    if n == 0 {
        return Err(CountingError::DomainTooSmall { name: "alpha", min: 1, n });
    }
    let n = n as usize;
    let mut a = vec![BigCount::zero(); n + 1];
    a[1] = BigCount::one();
    for m in 2..=n {
        for i in 1..=m / 2 {
            let term = &a[i] * &a[m - i];
            a[m] += term;
        }
    }
    Ok(a.swap_remove(n))
}

/// Largest `n_max` accepted by [`theta_table`] (the fill is quartic in it).
pub const THETA_TABLE_MAX: u64 = 256;

/// Triangular table of `theta(n, s)` for `2 <= n <= n_max`: the number of
/// shapes on `n` leaves with exactly `s` S nodes. Row `n` sums to
/// `alpha(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaTable {
    n_max: u64,
    // rows[n][s] for 1 <= n <= n_max, 0 <= s <= n-1; rows[0] is unused.
    rows: Vec<Vec<BigCount>>,
}

/// Column layout for [`ThetaTable::to_csv`]: by S count or by D count
/// (`d = n - 1 - s`). The D view reverses each stored row, it never
/// recomputes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaView {
    ByS,
    ByD,
}

/// Fill the theta table bottom-up. Splitting off `j` leaves contributes a
/// D root for `j < n - j` and an S root (one extra S) for the ordered
/// equal split of even `n`.
pub fn theta_table(n_max: u64) -> Result<ThetaTable, CountingError> {
    if n_max < 1 {
        return Err(CountingError::DomainTooSmall { name: "theta_table", min: 1, n: n_max });
    }
    if n_max > THETA_TABLE_MAX {
        return Err(CountingError::TableTooLarge { n_max, max: THETA_TABLE_MAX });
    }
    let n_max_us = n_max as usize;
    let mut rows: Vec<Vec<BigCount>> = Vec::with_capacity(n_max_us + 1);
    rows.push(Vec::new());
    rows.push(vec![BigCount::one()]);
    for n in 2..=n_max_us {
        let mut row = vec![BigCount::zero(); n];
        for j in 1..=(n - 1) / 2 {
            let (small, large) = (&rows[j], &rows[n - j]);
            for (i, a) in small.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (h, b) in large.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    row[i + h] += a * b;
                }
            }
        }
        if n % 2 == 0 {
            let half = &rows[n / 2];
            for (i, a) in half.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (h, b) in half.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    row[i + h + 1] += a * b;
                }
            }
        }
        rows.push(row);
    }
    Ok(ThetaTable { n_max, rows })
}

impl ThetaTable {
    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// `theta(n, s)` for `1 <= n <= n_max`; zero outside `0 <= s <= n-1`.
    pub fn theta(&self, n: u64, s: u64) -> Result<BigCount, CountingError> {
        if n == 0 || n > self.n_max {
            return Err(CountingError::DomainTooSmall { name: "theta", min: 1, n });
        }
        let row = &self.rows[n as usize];
        Ok(row.get(s as usize).cloned().unwrap_or_else(BigCount::zero))
    }

    /// Stored row for `n`: entries `s = 0 ..= n-1`.
    pub fn row(&self, n: u64) -> &[BigCount] {
        &self.rows[n as usize]
    }

    /// Row sum; equals [`alpha`]`(n)`.
    pub fn alpha(&self, n: u64) -> BigCount {
        self.rows[n as usize].iter().sum()
    }

    /// CSV with one row per `n` from 2 to `n_max`. The S view has columns
    /// `s=1 .. s=n_max-1`, the D view `d=0 .. d=n_max-2`; cells outside a
    /// row's own range are left blank, in-range zeros are printed, and the
    /// final column is the row sum `alpha`.
    pub fn to_csv(&self, view: ThetaView) -> String {
        let cols = (self.n_max - 1) as usize;
        let mut out = String::from("n");
        for c in 0..cols {
            match view {
                ThetaView::ByS => out.push_str(&format!(",s={}", c + 1)),
                ThetaView::ByD => out.push_str(&format!(",d={c}")),
            }
        }
        out.push_str(",alpha\n");
        for n in 2..=self.n_max as usize {
            out.push_str(&n.to_string());
            for c in 0..cols {
                out.push(',');
                if c <= n - 2 {
                    let s = match view {
                        ThetaView::ByS => c + 1,
                        // d = c counts D nodes; mirror to s = n - 1 - d.
                        ThetaView::ByD => n - 1 - c,
                    };
                    out.push_str(&self.rows[n][s].to_string());
                }
            }
            out.push(',');
            out.push_str(&self.alpha(n as u64).to_string());
            out.push('\n');
        }
        out
    }
}

/// `theta(n, s)` without keeping the table around.
pub fn theta(n: u64, s: u64) -> Result<BigCount, CountingError> {
    if n == 0 {
        return Err(CountingError::DomainTooSmall { name: "theta", min: 1, n });
    }
    if n == 1 {
        return Ok(if s == 0 { BigCount::one() } else { BigCount::zero() });
    }
    theta_table(n)?.theta(n, s)
}

/// Total number of reduction orders over all shapes on `n` leaves:
/// the double factorial `(2n-3)!!`.
pub fn total_products(n: u64) -> Result<BigCount, CountingError> {
    if n == 0 {
        return Err(CountingError::DomainTooSmall { name: "total_products", min: 1, n });
    }
    // (-1)!! and 1!! are both empty-ish products equal to 1.
    let mut acc = BigCount::one();
    if n >= 3 {
        let mut odd = 3u64;
        while odd <= 2 * n - 3 {
            acc *= odd;
            odd += 2;
        }
    }
    Ok(acc)
}

/// Number of distinct reduction orders realized by one shape with `s`
/// S nodes: `n! / 2^s`. Errors when `2^s` does not divide `n!`.
pub fn products_for_form(n: u64, s: u64) -> Result<BigCount, CountingError> {
    if n == 0 {
        return Err(CountingError::DomainTooSmall { name: "products_for_form", min: 1, n });
    }
    let v2 = n - weight(n) as u64; // Legendre: 2-adic valuation of n!
    if s > v2 {
        return Err(CountingError::SBeyondTwoAdic { s, max: v2, n });
    }
    Ok(factorial(n) >> s)
}

fn factorial(n: u64) -> BigCount {
    let mut acc = BigCount::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DacProductsMethod {
    /// `n! / 2^sigma(n)`.
    Closed,
    /// Binomial recurrence: `rho(2m) = C(2m,m) rho(m)^2 / 2`,
    /// `rho(2m+1) = C(2m+1,m) rho(m) rho(m+1)`.
    Recurrence,
}

/// Number of distinct reduction orders of the divide-and-conquer tree on
/// `n` leaves.
pub fn dac_products(n: u64, method: DacProductsMethod) -> Result<BigCount, CountingError> {
    if n == 0 {
        return Err(CountingError::DomainTooSmall { name: "dac_products", min: 1, n });
    }
    match method {
        DacProductsMethod::Closed => {
            let s = sigma(n, SigmaMethod::Recursive).expect("n >= 1");
            Ok(factorial(n) >> s)
        }
        DacProductsMethod::Recurrence => {
            fn go(n: u64, memo: &mut HashMap<u64, BigCount>) -> BigCount {
                if n == 1 {
                    return BigCount::one();
                }
                if let Some(v) = memo.get(&n) {
                    return v.clone();
                }
                let m = n / 2;
                let v = if n.is_multiple_of(2) {
                    let half = go(m, memo);
                    (binomial(BigUint::from(n), BigUint::from(m)) * (&half * &half)) >> 1u32
                } else {
                    binomial(BigUint::from(n), BigUint::from(m)) * go(m, memo) * go(m + 1, memo)
                };
                memo.insert(n, v.clone());
                v
            }
            Ok(go(n, &mut HashMap::new()))
        }
    }
}

/// Range of realizable S counts on `n` leaves, with the 2-adic valuation of
/// `n!` for reference (the maximum coincides with it: `n - weight(n)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SBounds {
    pub s_min: u64,
    pub s_max: u64,
    pub pow2_in_factorial: u64,
}

pub fn s_bounds(n: u64) -> Result<SBounds, CountingError> {
    if n == 0 {
        return Err(CountingError::DomainTooSmall { name: "s_bounds", min: 1, n });
    }
    let v2 = n - weight(n) as u64;
    Ok(SBounds {
        s_min: if n == 1 { 0 } else { 1 },
        s_max: v2,
        pow2_in_factorial: v2,
    })
}

//! Exact binary64 helpers: conversions between `f64` and arbitrary-precision
//! rationals, correctly-rounded reconstruction, ULP distance, and the
//! hex-float text form used for lossless fixtures.
//!
//! Everything here is exact. The rounding oracle never goes through extended
//! precision; it scales integers onto the binary64 grid and rounds once,
//! ties-to-even, exactly as a single IEEE operation would.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use std::fmt::Display;
use thiserror::Error;

const FRAC_BITS: u64 = 52;
const FRAC_MASK: u64 = (1 << FRAC_BITS) - 1;
const MIN_NORMAL_EXP: i64 = -1022;
const MAX_EXP: i64 = 1023;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FpError {
    #[error("empty numeric literal")]
    Empty,
    #[error("invalid numeric literal {literal:?}: {reason}")]
    Invalid { literal: String, reason: &'static str },
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<FpError>,
    },
}

/// Exact rational value of a finite `f64`. The sign of zero is lost
/// (rationals have no signed zero).
///
/// # Panics
/// Panics if `x` is infinite or NaN; callers gate on `is_finite`.
pub fn f64_to_rational(x: f64) -> BigRational {
    assert!(x.is_finite(), "f64_to_rational requires a finite value");
    if x == 0.0 {
        return BigRational::zero();
    }
    let bits = x.to_bits();
    let exp_field = ((bits >> FRAC_BITS) & 0x7ff) as i64;
    let frac = bits & FRAC_MASK;
    // Subnormals are frac * 2^-1074; normals are (frac | 2^52) * 2^(e-1075).
    let (mant, e) = if exp_field == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1 << FRAC_BITS), exp_field - 1075)
    };
    let mant = BigUint::from(mant);
    let (num, den) = if e >= 0 {
        (mant << e as u64, BigUint::one())
    } else {
        (mant, BigUint::one() << (-e) as u64)
    };
    let sign = if x < 0.0 { Sign::Minus } else { Sign::Plus };
    BigRational::new_raw(BigInt::from_biguint(sign, num), BigInt::from_biguint(Sign::Plus, den))
}

/// Nearest `f64` to an exact rational, round-to-nearest, ties-to-even,
/// with gradual underflow and IEEE overflow to infinity.
pub fn round_rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    round_parts_to_f64(r.is_negative(), r.numer().magnitude(), r.denom().magnitude())
}

/// Correctly rounded value of `(-1)^negative * num / den`. `den` must be
/// nonzero; `num`/`den` need not be reduced.
pub fn round_parts_to_f64(negative: bool, num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "denominator must be nonzero");
    if num.is_zero() {
        return sign_apply(negative, 0);
    }
    // floor(log2(num/den)): the bit-length difference is off by at most one.
    let mut e = num.bits() as i64 - den.bits() as i64;
    let ge = if e >= 0 {
        *num >= (den << e as u64)
    } else {
        (num << (-e) as u64) >= *den
    };
    if !ge {
        e -= 1;
    }
    // Quotient grid: 52 fractional bits in the binade for normals, the fixed
    // 2^-1074 grid once the value drops below the smallest normal binade.
    let grid = if e >= MIN_NORMAL_EXP { e - FRAC_BITS as i64 } else { -1074 };
    let (num2, den2) = if grid <= 0 {
        (num << (-grid) as u64, den.clone())
    } else {
        (num.clone(), den << grid as u64)
    };
    let (q, rem) = num_integer::Integer::div_rem(&num2, &den2);
    let mut q = to_u64(&q);
    let twice = &rem << 1u32;
    match twice.cmp(&den2) {
        std::cmp::Ordering::Greater => q += 1,
        std::cmp::Ordering::Equal => q += q & 1,
        std::cmp::Ordering::Less => {}
    }
    let mut grid = grid;
    if e >= MIN_NORMAL_EXP {
        debug_assert!(q >= 1 << FRAC_BITS);
        if q == 1 << (FRAC_BITS + 1) {
            q >>= 1;
            grid += 1;
        }
        let e_final = grid + FRAC_BITS as i64;
        if e_final > MAX_EXP {
            return sign_apply(negative, 0x7ff0_0000_0000_0000);
        }
        let bits = (((e_final + 1023) as u64) << FRAC_BITS) | (q & FRAC_MASK);
        sign_apply(negative, bits)
    } else {
        // q <= 2^52; q == 2^52 lands exactly on the smallest normal, and the
        // plain bit pattern already encodes it.
        debug_assert!(q <= 1 << FRAC_BITS);
        sign_apply(negative, q)
    }
}

fn sign_apply(negative: bool, bits: u64) -> f64 {
    f64::from_bits(if negative { bits | (1 << 63) } else { bits })
}

fn to_u64(v: &BigUint) -> u64 {
    let digits = v.to_u64_digits();
    match digits.len() {
        0 => 0,
        1 => digits[0],
        _ => unreachable!("quotient exceeds the binary64 grid width"),
    }
}

/// Number of representable binary64 values between `a` and `b`, or `None`
/// if either is infinite or NaN. Zero iff the two are bit-identical;
/// `-0.0` and `+0.0` are adjacent (distance 1).
pub fn ulp_distance(a: f64, b: f64) -> Option<i128> {
    if !a.is_finite() || !b.is_finite() {
        return None;
    }
    Some((ordered_key(a) - ordered_key(b)).abs())
}

// Monotone map from finite doubles to integers with unit steps between
// neighbours: positives map to their bit pattern, negatives reflect below
// -0.0 -> -1 so the two zeros sit side by side.
fn ordered_key(x: f64) -> i128 {
    let bits = x.to_bits();
    let mag = (bits & !(1u64 << 63)) as i128;
    if bits >> 63 == 0 {
        mag
    } else {
        -mag - 1
    }
}

/// Lossless hex-float text for a finite `f64`, e.g. `0x1.8p3` for 12.0.
/// Subnormals are normalized (`0x1.xxxp-1070` style); zeros print `0x0p0`.
/// Infinities and NaN print `inf`, `-inf`, `nan`.
pub fn format_hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf" } else { "inf" }.to_string();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_field = ((bits >> FRAC_BITS) & 0x7ff) as i64;
    let frac = bits & FRAC_MASK;
    if exp_field == 0 && frac == 0 {
        return format!("{sign}0x0p0");
    }
    let (mant53, e) = if exp_field == 0 {
        let top = 63 - frac.leading_zeros() as u64;
        let shift = FRAC_BITS - top;
        (frac << shift, MIN_NORMAL_EXP - shift as i64)
    } else {
        (frac | (1 << FRAC_BITS), exp_field - 1023)
    };
    let digits = format!("{:013x}", mant53 & FRAC_MASK);
    let digits = digits.trim_end_matches('0');
    if digits.is_empty() {
        format!("{sign}0x1p{e}")
    } else {
        format!("{sign}0x1.{digits}p{e}")
    }
}

/// Parse a binary64 literal: ordinary decimal (`12`, `-3.25e2`) or exact
/// hex-float (`0x1.8p3`, `-0x1p-1074`). Hex parsing is exact: the literal is
/// taken as a rational and rounded once, ties-to-even.
pub fn parse_f64_literal(s: &str) -> Result<f64, FpError> {
    if s.is_empty() {
        return Err(FpError::Empty);
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    if body.len() >= 2 && (body.starts_with("0x") || body.starts_with("0X")) {
        return parse_hex_body(&body[2..], negative).map_err(|reason| FpError::Invalid {
            literal: s.to_string(),
            reason,
        });
    }
    s.parse::<f64>().map_err(|_| FpError::Invalid {
        literal: s.to_string(),
        reason: "not a decimal or hex-float literal",
    })
}

fn parse_hex_body(body: &str, negative: bool) -> Result<f64, &'static str> {
    let (mant_text, exp_text) = body
        .split_once(['p', 'P'])
        .ok_or("hex-float requires a binary exponent introduced by 'p'")?;
    let (int_text, frac_text) = match mant_text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant_text, ""),
    };
    if int_text.is_empty() && frac_text.is_empty() {
        return Err("hex-float requires mantissa digits");
    }
    if !int_text.bytes().all(|b| b.is_ascii_hexdigit())
        || !frac_text.bytes().all(|b| b.is_ascii_hexdigit())
    {
        return Err("mantissa contains a non-hex digit");
    }
    let p_exp: i64 = exp_text
        .parse()
        .map_err(|_| "binary exponent is not a small decimal integer")?;
    let mut mant = BigUint::zero();
    for b in int_text.bytes().chain(frac_text.bytes()) {
        mant = (mant << 4u32) + (b as char).to_digit(16).unwrap();
    }
    if mant.is_zero() {
        return Ok(if negative { -0.0 } else { 0.0 });
    }
    let e2 = p_exp as i128 - 4 * frac_text.len() as i128;
    // Guard the magnitude before materializing huge shifts: the value lies in
    // [2^(t-1+e2), 2^(t+e2)) for t = mant.bits().
    let t = mant.bits() as i128;
    if t - 1 + e2 > 1024 {
        return Ok(if negative { f64::NEG_INFINITY } else { f64::INFINITY });
    }
    if t + e2 < -1076 {
        return Ok(if negative { -0.0 } else { 0.0 });
    }
    let e2 = e2 as i64;
    let (num, den) = if e2 >= 0 {
        (mant << e2 as u64, BigUint::one())
    } else {
        (mant, BigUint::one() << (-e2) as u64)
    };
    Ok(round_parts_to_f64(negative, &num, &den))
}

/// Parse a values file: one literal per line (decimal or hex-float), blank
/// lines skipped. Errors carry the 1-based line number.
pub fn parse_values(text: &str) -> Result<Vec<f64>, FpError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        out.push(parse_f64_literal(s).map_err(|e| FpError::Line {
            line: idx + 1,
            source: Box::new(e),
        })?);
    }
    Ok(out)
}

/// Uniform `p/q` rendering for exact rationals (always with a denominator,
/// so `0` prints `0/1`).
pub fn ratio_string<T: Clone + num_integer::Integer + Display>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_of_simple_values() {
        assert_eq!(f64_to_rational(0.5), rat(1, 2));
        assert_eq!(f64_to_rational(-12.0), rat(-12, 1));
        // 0.1 is not dyadic; the stored value is the classic nearest double.
        assert_eq!(f64_to_rational(0.1), rat(3602879701896397, 36028797018963968));
        assert_eq!(f64_to_rational(5e-324), BigRational::new(BigInt::one(), BigInt::one() << 1074));
    }

    #[test]
    fn rounding_hits_exact_values() {
        assert_eq!(round_rational_to_f64(&rat(1, 2)), 0.5);
        assert_eq!(round_rational_to_f64(&rat(-3, 4)), -0.75);
        assert_eq!(round_rational_to_f64(&BigRational::zero()), 0.0);
    }

    #[test]
    fn rounding_ties_go_to_even() {
        // 2^53 + 1 is halfway between 2^53 (even mantissa) and 2^53 + 2 (odd).
        let p53 = 9007199254740992u64;
        let down = BigRational::from(BigInt::from(p53 + 1));
        assert_eq!(round_rational_to_f64(&down), p53 as f64);
        // 2^53 + 3 is halfway between 2^53 + 2 (odd) and 2^53 + 4 (even).
        let up = BigRational::from(BigInt::from(p53 + 3));
        assert_eq!(round_rational_to_f64(&up), (p53 + 4) as f64);
    }

    #[test]
    fn rounding_overflow_threshold() {
        // Values from 2^1024 - 2^970 upward round to infinity; anything
        // strictly below rounds to the largest finite double.
        let threshold: BigInt = (BigInt::one() << 1024u32) - (BigInt::one() << 970u32);
        assert_eq!(
            round_rational_to_f64(&BigRational::from(threshold.clone())),
            f64::INFINITY
        );
        assert_eq!(
            round_rational_to_f64(&BigRational::from(threshold - 1)),
            f64::MAX
        );
        let neg: BigInt = -(BigInt::one() << 1100u32);
        assert_eq!(round_rational_to_f64(&BigRational::from(neg)), f64::NEG_INFINITY);
    }

    #[test]
    fn rounding_subnormal_boundaries() {
        let tiny = |num: i64, k: u64| BigRational::new(BigInt::from(num), BigInt::one() << k);
        // 2^-1075 ties between 0 and the smallest subnormal; even side is 0.
        assert_eq!(round_rational_to_f64(&tiny(1, 1075)), 0.0);
        // 3 * 2^-1076 is three quarters of an ulp: nearest is 2^-1074.
        assert_eq!(round_rational_to_f64(&tiny(3, 1076)), 5e-324);
        assert_eq!(round_rational_to_f64(&tiny(-3, 1076)), -5e-324);
        // Just below the smallest normal stays subnormal and exact.
        let sub = f64::MIN_POSITIVE - 5e-324;
        assert_eq!(round_rational_to_f64(&f64_to_rational(sub)), sub);
    }

    #[test]
    fn ulp_distance_basics() {
        assert_eq!(ulp_distance(1.0, 1.0), Some(0));
        assert_eq!(ulp_distance(1.0, f64::from_bits(1.0f64.to_bits() + 1)), Some(1));
        assert_eq!(ulp_distance(0.0, -0.0), Some(1));
        assert_eq!(ulp_distance(f64::INFINITY, 1.0), None);
        assert_eq!(ulp_distance(f64::NAN, 1.0), None);
    }

    #[test]
    fn hex_format_examples() {
        assert_eq!(format_hex(12.0), "0x1.8p3");
        assert_eq!(format_hex(1.0), "0x1p0");
        assert_eq!(format_hex(-0.375), "-0x1.8p-2");
        assert_eq!(format_hex(0.0), "0x0p0");
        assert_eq!(format_hex(-0.0), "-0x0p0");
        assert_eq!(format_hex(f64::MIN_POSITIVE / 2.0), "0x1p-1023");
        assert_eq!(format_hex(5e-324), "0x1p-1074");
    }

    #[test]
    fn hex_parse_examples() {
        assert_eq!(parse_f64_literal("0x1.8p3").unwrap(), 12.0);
        assert_eq!(parse_f64_literal("-0x1p-1074").unwrap(), -5e-324);
        assert_eq!(parse_f64_literal("0x1p1024").unwrap(), f64::INFINITY);
        assert_eq!(parse_f64_literal("0x0p0").unwrap(), 0.0);
        assert!(parse_f64_literal("0x1.8").is_err());
        assert!(parse_f64_literal("0xp3").is_err());
        assert!(parse_f64_literal("").is_err());
    }

    proptest! {
        #[test]
        fn round_trip_rational(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let r = f64_to_rational(x);
            prop_assert_eq!(round_rational_to_f64(&r).to_bits(), x.to_bits());
        }

        #[test]
        fn round_trip_hex(x in proptest::num::f64::ANY) {
            prop_assume!(x.is_finite());
            let s = format_hex(x);
            prop_assert_eq!(parse_f64_literal(&s).unwrap().to_bits(), x.to_bits());
        }
    }
}

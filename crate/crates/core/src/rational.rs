//! Exact rationals: parsing, `p/q` rendering, decimal rendering and the
//! rational stand-ins for the irrational constants used by the fixtures.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Decimal digits of the fixed-point expansion behind [`inv_sqrt2`].
pub const IRRATIONAL_DIGITS: u32 = 30;

/// Tolerance for comparisons that involve rational approximations of
/// irrational values.
pub const IRRATIONAL_TOLERANCE: f64 = 1e-9;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"p/q"` (or a bare integer `"p"`). `q` must be positive; the result
/// is reduced.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("malformed rational {s:?}, expected \"p/q\""));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let unsigned = num.strip_prefix('-').or_else(|| num.strip_prefix('+')).unwrap_or(num);
    if !digits(unsigned) || !digits(den) {
        return Err(bad());
    }
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Always `p/q`, including `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering with `sig` significant digits, rounded half away from
/// zero. Computed exactly from the rational.
pub fn format_decimal(r: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return format!("{:.*}", sig - 1, 0.0);
    }
    let neg = r.is_negative();
    let a = r.abs();
    let ten = BigInt::from(10);

    // Find e with 10^e <= a < 10^(e+1).
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(Pow::pow(&ten, k as u64))
        } else {
            Rational::new(BigInt::one(), Pow::pow(&ten, (-k) as u64))
        }
    };
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }

    let scaled = &a * pow10(sig as i64 - 1 - e);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut digits = if &rem * 2 >= *scaled.denom() { q + 1 } else { q };
    if digits == Pow::pow(&ten, sig as u64) {
        digits /= &ten;
        e += 1;
    }
    let digits = digits.to_string();

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-e - 1) as usize));
        out.push_str(&digits);
    } else if (e as usize) + 1 >= sig {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', e as usize + 1 - sig));
    } else {
        let split = e as usize + 1;
        out.push_str(&digits[..split]);
        out.push('.');
        out.push_str(&digits[split..]);
    }
    out
}

/// `"p/q (d.ddddddddddd)"`, the report rendering used throughout the CLI.
pub fn format_report(r: &Rational) -> String {
    format!("{} ({})", format_rational(r), format_decimal(r, 12))
}

pub fn to_f64(r: &Rational) -> f64 {
    // Via the 17-digit decimal expansion so huge numerators/denominators
    // do not overflow an intermediate f64.
    format_decimal(r, 17).parse().unwrap_or(f64::NAN)
}

/// Rational approximation `r` of `1/sqrt(2)` with `|r^2 - 1/2| < 10^-30`.
pub fn inv_sqrt2() -> &'static Rational {
    static CELL: OnceLock<Rational> = OnceLock::new();
    CELL.get_or_init(|| {
        let scale: BigInt = Pow::pow(&BigInt::from(10), IRRATIONAL_DIGITS);
        let root = (BigInt::from(2) * &scale * &scale).sqrt();
        Rational::new(root, BigInt::from(2) * scale)
    })
}

/// `2 * inv_sqrt2()`, the matching approximation of `sqrt(2)`.
pub fn sqrt2() -> Rational {
    inv_sqrt2() * int(2)
}

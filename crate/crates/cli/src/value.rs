//! Command-line numeric literals.
//!
//! A literal is a sum of terms joined by `+` or `-`; each term is a product of
//! factors joined by `*`. A factor is an exact rational (`3`, `-1/2`), `sqrt2`,
//! or `p/sqrt2`. The square-root factors resolve to the fixture-precision
//! rational approximation.

use bell_monogamy::rational::{inv_sqrt2, parse_rational, sqrt2, Rational};
use num_traits::{One, Zero};

#[derive(Debug, thiserror::Error)]
#[error("malformed value {literal:?}: {reason}")]
pub struct ValueError {
    literal: String,
    reason: String,
}

pub fn parse_value(literal: &str) -> Result<Rational, ValueError> {
    let fail = |reason: String| ValueError {
        literal: literal.to_string(),
        reason,
    };
    let text: String = literal.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Err(fail("empty".into()));
    }

    let mut total = Rational::zero();
    let mut start = 0;
    let bytes = text.as_bytes();
    // Split on + and - that are not a leading sign or a sign right after '*'.
    let mut cuts = Vec::new();
    for (i, &c) in bytes.iter().enumerate() {
        if (c == b'+' || c == b'-') && i > 0 && bytes[i - 1] != b'*' && bytes[i - 1] != b'/' {
            cuts.push(i);
        }
    }
    cuts.push(text.len());
    for cut in cuts {
        let term = &text[start..cut];
        total += parse_term(term).map_err(&fail)?;
        start = cut;
    }
    Ok(total)
}

fn parse_term(term: &str) -> Result<Rational, String> {
    let (sign, body) = match term.as_bytes().first() {
        Some(b'+') => (Rational::one(), &term[1..]),
        Some(b'-') => (-Rational::one(), &term[1..]),
        _ => (Rational::one(), term),
    };
    if body.is_empty() {
        return Err("dangling sign".into());
    }
    body.split('*').try_fold(sign, |acc, factor| Ok(acc * parse_factor(factor)?))
}

fn parse_factor(factor: &str) -> Result<Rational, String> {
    if factor == "sqrt2" {
        return Ok(sqrt2());
    }
    if let Some(p) = factor.strip_suffix("/sqrt2") {
        return Ok(parse_rational(p).map_err(|e| e.to_string())? * inv_sqrt2());
    }
    parse_rational(factor).map_err(|_| format!("cannot read factor {factor:?}"))
}

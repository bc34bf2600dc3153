//! Shrinking factors of asymmetric 1 -> n cloning and the no-signaling bound
//! on their mean.
//!
//! With `B` the Bell value before cloning and `B_m` the value between Alice
//! and copy `m`, the shrinking factors are `eta_m = B_m / B`. Monogamy gives
//! `sum_m B_m <= n R`, hence `mean(eta) <= R / B`, which is below one only
//! when the uncloned value violates the inequality.
//!
//! The ratios depend on the functional's form: rewriting a functional into
//! non-negative form adds a constant to every value and changes them. Reports
//! record the form they were computed in.

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::behavior::Behavior;
use crate::functional::{BellFunctional, Form};
use crate::rational::{int, Rational};
use crate::{Error, Result};

/// Absolute tolerance for saturation and bound checks, which may involve
/// rational stand-ins for irrational values.
pub fn tolerance() -> Rational {
    Rational::new(BigInt::one(), Pow::pow(&BigInt::from(10), 9u32))
}

/// Either a Bell value or a behavior to evaluate it from.
#[derive(Clone, Debug)]
pub enum ValueSource {
    Value(Rational),
    Behavior(Behavior),
}

impl From<Rational> for ValueSource {
    fn from(v: Rational) -> Self {
        ValueSource::Value(v)
    }
}

impl From<Behavior> for ValueSource {
    fn from(p: Behavior) -> Self {
        ValueSource::Behavior(p)
    }
}

impl ValueSource {
    fn resolve(&self, f: &BellFunctional) -> Result<Rational> {
        match self {
            ValueSource::Value(v) => Ok(v.clone()),
            ValueSource::Behavior(p) => f.evaluate(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkBound {
    /// `R / base`.
    pub bound: Rational,
    /// The bound is at least one, i.e. it says nothing about cloning.
    pub trivial: bool,
}

/// `R / base`; `base` must be positive.
pub fn mean_shrink_bound(f: &BellFunctional, base: &Rational) -> Result<ShrinkBound> {
    if !base.is_positive() {
        return Err(Error::Precondition(format!(
            "base value must be positive, got {}",
            crate::rational::format_rational(base)
        )));
    }
    let bound = f.bound() / base;
    Ok(ShrinkBound {
        trivial: bound >= Rational::one(),
        bound,
    })
}

#[derive(Clone, Debug)]
pub struct CloningReport {
    pub form: Form,
    pub form_note: String,
    pub base_value: Rational,
    pub pair_values: Vec<Rational>,
    pub etas: Vec<Rational>,
    pub mean_eta: Rational,
    /// `R / base_value`.
    pub bound: Rational,
    pub trivial: bool,
    /// `mean_eta <= bound + tolerance`.
    pub holds: bool,
    /// `|mean_eta - bound| <= tolerance`.
    pub saturated: bool,
    pub tolerance: Rational,
}

/// Shrinking factors `pair_m / base` of `clones` against `base`. The number
/// of clones must equal Bob's setting count.
pub fn shrinking_factors(f: &BellFunctional, base: &ValueSource, clones: &[ValueSource]) -> Result<CloningReport> {
    if f.scenario().num_parties() != 2 {
        return Err(Error::Precondition("shrinking factors need a bipartite functional".into()));
    }
    let n = f.scenario().party(1).settings;
    if clones.len() != n {
        return Err(Error::Precondition(format!(
            "{} clone values given, Bob has {n} settings",
            clones.len()
        )));
    }
    let base_value = base.resolve(f)?;
    if base_value.is_zero() {
        return Err(Error::Precondition("base value is zero".into()));
    }
    let pair_values = clones.iter().map(|c| c.resolve(f)).collect::<Result<Vec<_>>>()?;
    let etas: Vec<Rational> = pair_values.iter().map(|v| v / &base_value).collect();
    let mean_eta = etas.iter().sum::<Rational>() / int(n as i64);
    let ShrinkBound { bound, trivial } = mean_shrink_bound(f, &base_value)?;
    let tol = tolerance();
    let form_note = match f.form() {
        Form::Correlator => "correlator form".to_string(),
        Form::Probability if f.is_nonnegative() => "probability form, non-negative coefficients".to_string(),
        Form::Probability => "probability form, signed coefficients".to_string(),
    };
    Ok(CloningReport {
        form: f.form(),
        form_note,
        holds: mean_eta <= &bound + &tol,
        saturated: (&mean_eta - &bound).abs() <= tol,
        base_value,
        pair_values,
        etas,
        mean_eta,
        bound,
        trivial,
        tolerance: tol,
    })
}

/// The same data re-expressed in non-negative probability form: the
/// functional is expanded and normalized, and every value shifted by the
/// normalization offset.
pub fn nonnegative_form_report(f: &BellFunctional, base: &Rational, clones: &[Rational]) -> Result<CloningReport> {
    let (g, offset) = f.to_probability_form()?.normalize_nonneg()?;
    let shifted: Vec<ValueSource> = clones.iter().map(|c| ValueSource::Value(c + &offset)).collect();
    shrinking_factors(&g, &ValueSource::Value(base + &offset), &shifted)
}

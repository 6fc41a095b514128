//! Artin-Schreier and quadratic defects, classification of monic quadratics,
//! and root finding over `K`.
//!
//! With `p_a(X) = X^2 + X + a`, the Artin-Schreier defect of `a` is the
//! ideal generated by `p_a(h)` for the best `h in K`; the quadratic defect is
//! the ideal generated by `a + xi^2` for the best `xi`.

use serde::{Deserialize, Serialize};

use crate::error::{undetermined, Error, Result};
use crate::series::{Ideal, Series};

/// Extra coefficient slots an inexact input must carry beyond its valuation.
pub const GUARD_SLOTS: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectResult {
    pub ideal: Ideal,
    pub witness: Series,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuadClass {
    ReducibleSep,
    UnramSep,
    RamSep,
    ReducibleInsep,
    RamInsep,
}

impl QuadClass {
    pub fn is_separable(self) -> bool {
        matches!(self, QuadClass::ReducibleSep | QuadClass::UnramSep | QuadClass::RamSep)
    }

    pub fn is_irreducible(self) -> bool {
        !matches!(self, QuadClass::ReducibleSep | QuadClass::ReducibleInsep)
    }

    /// Short family label: `A^s`, `A^i`, `B^s` or `B^i`.
    pub fn family(self) -> &'static str {
        match self {
            QuadClass::ReducibleSep | QuadClass::UnramSep => "A^s",
            QuadClass::ReducibleInsep => "A^i",
            QuadClass::RamSep => "B^s",
            QuadClass::RamInsep => "B^i",
        }
    }
}

/// Monic integral quadratic `X^2 + aX + b` with its class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadPoly {
    pub a: Series,
    pub b: Series,
    pub class: QuadClass,
    /// Ramification parameter; zero for unramified and reducible classes.
    pub t: i64,
}

fn check_guard(a: &Series) -> Result<()> {
    if let Some(p) = a.prec() {
        let v = a.val_lower();
        if p < v + GUARD_SLOTS {
            return Err(undetermined(format!(
                "input known mod t^{p} needs at least t^{} (valuation {v} + {GUARD_SLOTS} guard slots)",
                v + GUARD_SLOTS
            )));
        }
    }
    Ok(())
}

/// `sum_{i >= 0} x^(2^i)`, the root of `r^2 + r = x` for `v(x) > 0`.
fn frobenius_tail(x: &Series) -> Series {
    let field = x.field();
    let bound = x.prec().unwrap_or(field.prec() as i64);
    let mut acc = Series::zero(field);
    let mut term = x.clone();
    while term.val_lower() < bound {
        acc = &acc + &term;
        term = term.square();
    }
    if acc.is_exact() && x.is_exact() && term.is_exact_zero() {
        acc
    } else {
        acc.truncate(bound)
    }
}

/// Artin-Schreier defect `D(a)` with a witness `h` such that
/// `(h^2 + h + a) = D(a)`.
pub fn as_defect(a: &Series) -> Result<DefectResult> {
    check_guard(a)?;
    let field = a.field();
    let mut h = Series::zero(field);
    // invariant: cur = h^2 + h + a
    let mut cur = a.clone();
    loop {
        match cur.val() {
            None => {
                return match cur.prec() {
                    None => Ok(DefectResult { ideal: Ideal::ZERO, witness: h }),
                    Some(p) if p > 0 => Ok(DefectResult {
                        ideal: Ideal::ZERO,
                        witness: (&h + &frobenius_tail(&cur)).truncate(p),
                    }),
                    Some(p) => Err(undetermined(format!("defect reduction ran out of precision at t^{p}"))),
                };
            }
            Some(v) if v > 0 => {
                let tail = frobenius_tail(&cur);
                return Ok(DefectResult { ideal: Ideal::ZERO, witness: &h + &tail });
            }
            Some(0) => {
                let c = cur.coeff(0);
                let Some(z) = field.solve_artin_schreier(c) else {
                    return Ok(DefectResult { ideal: Ideal::UNIT, witness: h });
                };
                let s = Series::constant(field, z);
                cur = &(&cur + &s.square()) + &s;
                h = &h + &s;
            }
            Some(v) if v % 2 != 0 => {
                return Ok(DefectResult { ideal: Ideal::power(v), witness: h });
            }
            Some(v) => {
                let u = cur.lead_coeff().expect("nonzero");
                let s = Series::monomial(field, field.sqrt(u), v / 2);
                cur = &(&cur + &s.square()) + &s;
                h = &h + &s;
            }
        }
    }
}

/// Quadratic defect `delta(a)` with the witness `xi` built from the even part.
pub fn quad_defect(a: &Series) -> Result<DefectResult> {
    check_guard(a)?;
    let xi = a.even_sqrt();
    let rest = a + &xi.square();
    debug_assert!(rest.terms().all(|(e, _)| e.rem_euclid(2) == 1));
    match (rest.val(), a.prec()) {
        (Some(m), _) => Ok(DefectResult { ideal: Ideal::power(m), witness: xi }),
        (None, None) => Ok(DefectResult { ideal: Ideal::ZERO, witness: xi }),
        (None, Some(p)) => Err(undetermined(format!("no odd term visible below t^{p}"))),
    }
}

fn require_integral(x: &Series, name: &str) -> Result<()> {
    if x.val_lower() < 0 {
        return Err(Error::Precondition(format!("{name} = {x} is not integral")));
    }
    Ok(())
}

/// Classify `X^2 + aX + b` for integral `a`, `b`.
pub fn classify(a: &Series, b: &Series) -> Result<QuadPoly> {
    require_integral(a, "a")?;
    require_integral(b, "b")?;
    let (class, t) = if a.val().is_some() {
        let d = as_defect(&b.div(&a.square())?)?;
        match d.ideal.val {
            None => (QuadClass::ReducibleSep, 0),
            Some(0) => (QuadClass::UnramSep, 0),
            Some(v) => (QuadClass::RamSep, (1 - v) / 2),
        }
    } else if a.is_exact() {
        let d = quad_defect(b)?;
        match d.ideal.val {
            None => (QuadClass::ReducibleInsep, 0),
            Some(v) => (QuadClass::RamInsep, (v - 1) / 2),
        }
    } else {
        return Err(undetermined("linear coefficient indistinguishable from zero"));
    };
    Ok(QuadPoly { a: a.clone(), b: b.clone(), class, t })
}

/// A root `r` of `r^2 + r + a = 0`; the other root is `r + 1`.
pub fn solve_artin_schreier(a: &Series) -> Result<Series> {
    let d = as_defect(a)?;
    if !d.ideal.is_zero() {
        return Err(Error::Precondition(format!("{a} has Artin-Schreier defect {}", d.ideal)));
    }
    Ok(d.witness)
}

/// Roots of `X^2 + cX + d` in `K`, or `None` when the polynomial is irreducible.
pub fn solve_quadratic(c: &Series, d: &Series) -> Result<Option<(Series, Series)>> {
    if c.val().is_some() {
        let red = d.div(&c.square())?;
        let defect = as_defect(&red)?;
        if !defect.ideal.is_zero() {
            return Ok(None);
        }
        let r1 = c * &defect.witness;
        let r2 = &r1 + c;
        return Ok(Some((r1, r2)));
    }
    if !c.is_exact() {
        return Err(undetermined("linear coefficient indistinguishable from zero"));
    }
    Ok(d.sqrt()?.map(|y| (y.clone(), y)))
}

/// `h^2 + h + a`.
pub fn p_a(a: &Series, h: &Series) -> Series {
    &(&h.square() + h) + a
}

//! Laurent series over `F_{2^tau}` with absolute precision tracking.
//!
//! A [`Series`] is either *exact* (a Laurent polynomial, every omitted
//! coefficient is zero) or known modulo `t^prec`. Exactness survives `+`
//! and `*`; everything else (inverses of non-monomials, Hensel lifts) falls
//! back to the working precision of the [`Field`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{undetermined, Error, Result};
use crate::field::{Field, FieldElem};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Series {
    field: Field,
    /// Exponent of `coeffs[0]`.
    start: i64,
    /// No leading or trailing zeros; empty for zero.
    coeffs: Vec<FieldElem>,
    /// `None` for exact elements.
    prec: Option<i64>,
}

impl Series {
    fn normalized(field: Field, start: i64, mut coeffs: Vec<FieldElem>, prec: Option<i64>) -> Series {
        if let Some(p) = prec {
            let keep = (p - start).clamp(0, coeffs.len() as i64) as usize;
            coeffs.truncate(keep);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => Series { field, start: 0, coeffs: Vec::new(), prec },
            Some(k) => {
                coeffs.drain(..k);
                Series { field, start: start + k as i64, coeffs, prec }
            }
        }
    }

    /// Series from a dense coefficient run starting at exponent `start`.
    pub fn from_coeffs(field: Field, start: i64, coeffs: Vec<FieldElem>, prec: Option<i64>) -> Series {
        debug_assert!(coeffs.iter().all(|&c| field.contains(c)));
        Series::normalized(field, start, coeffs, prec)
    }

    /// Exact Laurent polynomial from `(exponent, coefficient)` terms; repeated
    /// exponents are summed.
    pub fn from_terms(field: Field, terms: &[(i64, FieldElem)]) -> Series {
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Series::zero(field);
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![FieldElem::ZERO; (hi - lo + 1) as usize];
        for &(e, c) in terms {
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = field.add(*slot, c);
        }
        Series::normalized(field, lo, coeffs, None)
    }

    pub fn zero(field: Field) -> Series {
        Series { field, start: 0, coeffs: Vec::new(), prec: None }
    }

    /// Zero known only modulo `t^prec`.
    pub fn zero_mod(field: Field, prec: i64) -> Series {
        Series { field, start: 0, coeffs: Vec::new(), prec: Some(prec) }
    }

    pub fn one(field: Field) -> Series {
        Series::constant(field, FieldElem::ONE)
    }

    pub fn constant(field: Field, c: FieldElem) -> Series {
        Series::monomial(field, c, 0)
    }

    pub fn monomial(field: Field, c: FieldElem, e: i64) -> Series {
        Series::normalized(field, e, vec![c], None)
    }

    /// `t^e`.
    pub fn pi_pow(field: Field, e: i64) -> Series {
        Series::monomial(field, FieldElem::ONE, e)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Absolute precision; `None` for exact elements.
    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    /// True when no nonzero coefficient is visible.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_zero() && self.is_exact()
    }

    /// Valuation of the lowest visible nonzero term.
    pub fn val(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.start)
    }

    /// Valuation, certified: errors for a zero known only to finite precision.
    /// Exact zero gives `None` (valuation `+inf`).
    pub fn val_certain(&self) -> Result<Option<i64>> {
        match (self.val(), self.prec) {
            (Some(v), _) => Ok(Some(v)),
            (None, None) => Ok(None),
            (None, Some(p)) => Err(undetermined(format!("valuation of zero mod t^{p}"))),
        }
    }

    /// `min(val, cap)`, certified as long as the precision reaches `cap`.
    pub fn val_capped(&self, cap: i64) -> Result<i64> {
        match self.val() {
            Some(v) if v < cap => Ok(v),
            _ => match self.prec {
                Some(p) if p < cap => Err(undetermined(format!("need precision t^{cap}, have t^{p}"))),
                _ => Ok(cap),
            },
        }
    }

    /// Lower bound on the valuation: the valuation, or the precision for zero.
    pub fn val_lower(&self) -> i64 {
        self.val().or(self.prec).unwrap_or(i64::MAX / 4)
    }

    /// Highest exponent with a stored nonzero coefficient.
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.start + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> FieldElem {
        let k = e - self.start;
        if k < 0 || k >= self.coeffs.len() as i64 {
            FieldElem::ZERO
        } else {
            self.coeffs[k as usize]
        }
    }

    pub fn lead_coeff(&self) -> Option<FieldElem> {
        self.coeffs.first().copied()
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FieldElem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.start + i as i64, c))
    }

    /// Reduce modulo `t^n`; the result is inexact with precision `min(prec, n)`.
    pub fn truncate(&self, n: i64) -> Series {
        let p = self.prec.map_or(n, |p| p.min(n));
        Series::normalized(self.field, self.start, self.coeffs.clone(), Some(p))
    }

    /// Drop every term of exponent `>= n`, keeping the result exact.
    /// Used for ball centers, which are only meaningful modulo `t^n`.
    pub fn reduce_exact(&self, n: i64) -> Series {
        Series::normalized(self.field, self.start, self.coeffs.clone(), Some(n)).into_exact()
    }

    fn into_exact(mut self) -> Series {
        self.prec = None;
        self
    }

    /// Equality modulo the smaller of the two precisions.
    pub fn eq_at_precision(&self, other: &Series) -> bool {
        (self - other).is_zero()
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Series {
        Series {
            field: self.field,
            start: if self.is_zero() { 0 } else { self.start + k },
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|p| p + k),
        }
    }

    pub fn scale(&self, c: FieldElem) -> Series {
        if c.is_zero() {
            return Series::zero(self.field);
        }
        let f = self.field;
        let coeffs = self.coeffs.iter().map(|&x| f.mul(x, c)).collect();
        Series { field: f, start: self.start, coeffs, prec: self.prec }
    }

    pub fn square(&self) -> Series {
        let f = self.field;
        let prec = self.prec.map(|p| p + self.val_lower());
        if self.is_zero() {
            return Series { field: f, start: 0, coeffs: Vec::new(), prec };
        }
        let mut coeffs = vec![FieldElem::ZERO; 2 * self.coeffs.len() - 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = f.square(c);
        }
        Series::normalized(f, 2 * self.start, coeffs, prec)
    }

    pub fn inv(&self) -> Result<Series> {
        let f = self.field;
        let Some(v) = self.val() else {
            return Err(match self.prec {
                None => Error::DivisionByZero,
                Some(p) => undetermined(format!("inverting zero mod t^{p}")),
            });
        };
        let u0inv = f.inv(self.coeffs[0])?;
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Series::monomial(f, u0inv, -v));
        }
        let rel = match self.prec {
            None => f.prec() as i64,
            Some(p) => p - v,
        };
        let n = rel.max(0) as usize;
        let mut w = vec![FieldElem::ZERO; n];
        if n > 0 {
            w[0] = u0inv;
        }
        for k in 1..n {
            let mut acc = FieldElem::ZERO;
            for j in 1..=k.min(self.coeffs.len() - 1) {
                acc = f.add(acc, f.mul(self.coeffs[j], w[k - j]));
            }
            w[k] = f.mul(acc, u0inv);
        }
        Ok(Series::normalized(f, -v, w, Some(-v + rel)))
    }

    pub fn div(&self, other: &Series) -> Result<Series> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Series {
        let mut acc = Series::one(self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Square root via the even/odd coefficient split `x = a^2 + t b^2`.
    ///
    /// `Ok(None)` when a visible odd coefficient is nonzero. For inexact
    /// inputs with no visible odd term the answer cannot be certified.
    pub fn sqrt(&self) -> Result<Option<Series>> {
        if self.terms().any(|(e, _)| e.rem_euclid(2) == 1) {
            return Ok(None);
        }
        if let Some(p) = self.prec {
            return Err(undetermined(format!("square test of element known mod t^{p}")));
        }
        Ok(Some(self.even_sqrt()))
    }

    /// `sum sqrt(a_{2i}) t^i` over the even-exponent coefficients, with
    /// precision halved accordingly.
    pub fn even_sqrt(&self) -> Series {
        let f = self.field;
        let terms: Vec<(i64, FieldElem)> = self
            .terms()
            .filter(|(e, _)| e.rem_euclid(2) == 0)
            .map(|(e, c)| (e / 2, f.sqrt(c)))
            .collect();
        let s = Series::from_terms(f, &terms);
        match self.prec {
            None => s,
            Some(p) => s.truncate(p.div_euclid(2) + p.rem_euclid(2)),
        }
    }

    /// Formal derivative `d/dt`.
    pub fn derivative(&self) -> Series {
        let terms: Vec<(i64, FieldElem)> = self
            .terms()
            .filter(|(e, _)| e.rem_euclid(2) == 1)
            .map(|(e, c)| (e - 1, c))
            .collect();
        let s = Series::from_terms(self.field, &terms);
        match self.prec {
            None => s,
            Some(p) => s.truncate(p - 1),
        }
    }

    fn check_field(&self, other: &Series) {
        assert_eq!(self.field, other.field, "series over different fields");
    }
}

impl<'a> Add<&'a Series> for &'a Series {
    type Output = Series;

    fn add(self, rhs: &'a Series) -> Series {
        self.check_field(rhs);
        let f = self.field;
        let prec = match (self.prec, rhs.prec) {
            (None, p) | (p, None) => p,
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        if self.is_zero() {
            return Series::normalized(f, rhs.start, rhs.coeffs.clone(), prec);
        }
        if rhs.is_zero() {
            return Series::normalized(f, self.start, self.coeffs.clone(), prec);
        }
        let lo = self.start.min(rhs.start);
        let hi = (self.start + self.coeffs.len() as i64).max(rhs.start + rhs.coeffs.len() as i64);
        let hi = prec.map_or(hi, |p| hi.min(p));
        let len = (hi - lo).max(0) as usize;
        let mut coeffs = vec![FieldElem::ZERO; len];
        for src in [self, rhs] {
            for (i, &c) in src.coeffs.iter().enumerate() {
                let k = src.start + i as i64 - lo;
                if (k as usize) < len {
                    coeffs[k as usize] = f.add(coeffs[k as usize], c);
                }
            }
        }
        Series::normalized(f, lo, coeffs, prec)
    }
}

// characteristic 2
impl<'a> Sub<&'a Series> for &'a Series {
    type Output = Series;

    fn sub(self, rhs: &'a Series) -> Series {
        self + rhs
    }
}

impl<'a> Mul<&'a Series> for &'a Series {
    type Output = Series;

    fn mul(self, rhs: &'a Series) -> Series {
        self.check_field(rhs);
        let f = self.field;
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return Series::zero(f);
        }
        let prec = match (self.prec, rhs.prec) {
            (None, None) => None,
            (Some(a), None) => Some(a + rhs.val_lower()),
            (None, Some(b)) => Some(b + self.val_lower()),
            (Some(a), Some(b)) => Some((a + rhs.val_lower()).min(b + self.val_lower())),
        };
        if self.is_zero() || rhs.is_zero() {
            return Series { field: f, start: 0, coeffs: Vec::new(), prec };
        }
        let start = self.start + rhs.start;
        let full = self.coeffs.len() + rhs.coeffs.len() - 1;
        let len = match prec {
            Some(p) => ((p - start).max(0) as usize).min(full),
            None => full,
        };
        let mut coeffs = vec![FieldElem::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
                }
            }
        }
        Series::normalized(f, start, coeffs, prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Series> for Series {
            type Output = Series;
            fn $m(self, rhs: Series) -> Series {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Series> for Series {
            type Output = Series;
            fn $m(self, rhs: &'a Series) -> Series {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Series> for &'a Series {
            type Output = Series;
            fn $m(self, rhs: Series) -> Series {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// A fractional ideal `(t^val)` of `K`; `val = None` is the zero ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Ideal {
    pub val: Option<i64>,
}

impl Ideal {
    pub const ZERO: Ideal = Ideal { val: None };
    pub const UNIT: Ideal = Ideal { val: Some(0) };

    pub fn power(n: i64) -> Ideal {
        Ideal { val: Some(n) }
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    /// `self ⊆ other`.
    pub fn is_contained_in(&self, other: &Ideal) -> bool {
        match (self.val, other.val) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(m), Some(n)) => m >= n,
        }
    }

    /// Valuation as a comparable key, `+inf` for the zero ideal.
    pub fn val_key(&self) -> i64 {
        self.val.unwrap_or(i64::MAX)
    }
}

impl PartialOrd for Ideal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by inclusion: smaller ideals compare less.
impl Ord for Ideal {
    fn cmp(&self, other: &Self) -> Ordering {
        other.val_key().cmp(&self.val_key())
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            None => write!(f, "(0)"),
            Some(0) => write!(f, "O"),
            Some(n) => write!(f, "(t^{n})"),
        }
    }
}

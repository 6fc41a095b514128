//! Existence of generator pairs with prescribed minimal polynomials and
//! symmetric product, via the four-dimensional algebra they generate.

use rayon::prelude::*;
use serde::Serialize;

use crate::defects::{classify, solve_quadratic, QuadPoly};
use crate::error::{undetermined, Error, Result};
use crate::field::FieldElem;
use crate::quaternion::{discriminant, make_pair, Mat2};
use crate::series::Series;

/// The algebra `K[q1, q2 | m1(q1) = m2(q2) = 0, Lambda(q1, q2) = lambda]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub lambda: Series,
    pub m1: QuadPoly,
    pub m2: QuadPoly,
    pub delta: Series,
}

impl AlgebraSpec {
    pub fn new(lambda: Series, m1: QuadPoly, m2: QuadPoly) -> AlgebraSpec {
        let delta = discriminant(&lambda, &m1, &m2);
        AlgebraSpec { lambda, m1, m2, delta }
    }

    /// Spec from raw coefficients `m_i = X^2 + a_i X + b_i`.
    pub fn from_coeffs(lambda: Series, (a1, b1): (Series, Series), (a2, b2): (Series, Series)) -> Result<AlgebraSpec> {
        Ok(AlgebraSpec::new(lambda, classify(&a1, &b1)?, classify(&a2, &b2)?))
    }

    pub fn is_quaternion(&self) -> Result<bool> {
        Ok(self.delta.val_certain()?.is_some())
    }

    fn swapped(&self) -> AlgebraSpec {
        AlgebraSpec { lambda: self.lambda.clone(), m1: self.m2.clone(), m2: self.m1.clone(), delta: self.delta.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Condition {
    I,
    II,
    III,
    IV,
    V,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExistenceVerdict {
    pub exists: bool,
    pub matched_condition: Condition,
    pub witness: Option<(Mat2, Mat2)>,
    /// The pair lies in a two-dimensional commutative subalgebra.
    pub commutative_note: bool,
    /// The witness pair is linearly independent over `K`.
    pub independent: Option<bool>,
}

/// `(a, b)` with the algebra isomorphic to the cyclic algebra `[a, b)`:
/// `u^2 + u = a`, `w^2 = b`, `wu = (u + 1)w`.
pub fn cyclic_presentation(spec: &AlgebraSpec) -> Result<(Series, Series)> {
    if !spec.is_quaternion()? {
        return Err(Error::Precondition("cyclic presentation needs a nonzero discriminant".into()));
    }
    let (m1, m2) = (&spec.m1, &spec.m2);
    if m1.a.val().is_some() {
        return Ok((m1.b.div(&m1.a.square())?, spec.delta.clone()));
    }
    if m2.a.val().is_some() {
        return Ok((m2.b.div(&m2.a.square())?, spec.delta.clone()));
    }
    let field = spec.lambda.field();
    let lambda2 = spec.lambda.square();
    let (b1, b2) = match (m1.b.is_zero(), m2.b.is_zero()) {
        (_, false) => (m1.b.clone(), m2.b.clone()),
        (false, true) => (m2.b.clone(), m1.b.clone()),
        // q2 -> q2 + 1 turns X^2 into X^2 + 1 and keeps lambda
        (true, true) => (m1.b.clone(), Series::one(field)),
    };
    Ok(((&b1 * &b2).div(&lambda2)?, b2))
}

/// Whether `[a, b)` splits: the trace of the residue of `a db / b` vanishes.
pub fn symbol(a: &Series, b: &Series) -> Result<u32> {
    if b.val().is_none() {
        return Err(Error::Precondition("symbol needs b != 0".into()));
    }
    let form = a * &b.derivative().div(b)?;
    if form.prec().is_some_and(|p| p <= -1) {
        return Err(undetermined("residue coefficient beyond known precision"));
    }
    Ok(a.field().trace(form.coeff(-1)))
}

pub fn splits(a: &Series, b: &Series) -> Result<bool> {
    Ok(symbol(a, b)? == 0)
}

/// Laurent polynomials `w != 0` with support in `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBox {
    pub lo: i64,
    pub hi: i64,
    /// Upper bound on the number of candidates tried.
    pub max_candidates: u64,
}

impl Default for SearchBox {
    fn default() -> Self {
        SearchBox { lo: -4, hi: 8, max_candidates: 1 << 14 }
    }
}

fn candidate(field: crate::field::Field, lo: i64, hi: i64, mut code: u64) -> Series {
    let q = field.order() as u64;
    let mut terms = Vec::new();
    for e in lo..=hi {
        terms.push((e, FieldElem((code % q) as u32)));
        code /= q;
    }
    Series::from_terms(field, &terms)
}

/// Search for `(x, y, z, w)` with `C(x, y, z, w) = lambda`.
///
/// With `y = 1`, `z = 0` the equation becomes
/// `x^2 + (a1 + a2 w) x + b1 + b2 w^2 + lambda w = 0`, so each `w` in the
/// box is decided by one quadratic.
pub fn search_pair(spec: &AlgebraSpec, bx: &SearchBox) -> Option<(Series, Series, Series, Series)> {
    let field = spec.lambda.field();
    let width = (bx.hi - bx.lo + 1).max(0) as u32;
    let total = (field.order() as u64).checked_pow(width).unwrap_or(u64::MAX).min(bx.max_candidates);
    let (m1, m2) = (&spec.m1, &spec.m2);
    let hit = (1..total).into_par_iter().find_map_first(|code| {
        let w = candidate(field, bx.lo, bx.hi, code);
        let lin = &m1.a + &(&m2.a * &w);
        let con = &(&m1.b + &(&m2.b * &w.square())) + &(&spec.lambda * &w);
        match solve_quadratic(&lin, &con) {
            Ok(Some((x, _))) => Some((x, w)),
            _ => None,
        }
    });
    hit.map(|(x, w)| (x, Series::one(field), Series::zero(field), w))
}

/// `C(x, y, z, w)`.
pub fn c_form(spec: &AlgebraSpec, x: &Series, y: &Series, z: &Series, w: &Series) -> Result<Series> {
    let (m1, m2) = (&spec.m1, &spec.m2);
    let t1 = x.square() + &m1.a * &(x * y) + &m1.b * &y.square();
    let t2 = z.square() + &m2.a * &(z * w) + &m2.b * &w.square();
    let num = t1 + t2 + &m1.a * &(z * y) + &m2.a * &(x * w);
    num.div(&(y * w))
}

fn root_of(m: &QuadPoly) -> Result<Option<Series>> {
    Ok(solve_quadratic(&m.a, &m.b)?.map(|(r, _)| r))
}

/// Witness for a nonzero discriminant when `m1` has the root `alpha`.
fn witness_with_root(spec: &AlgebraSpec, alpha: &Series) -> Result<(Mat2, Mat2)> {
    let f = alpha.field();
    let (m1, m2, lambda) = (&spec.m1, &spec.m2, &spec.lambda);
    if m1.a.val().is_some() {
        let q1 = Mat2::diag(alpha + &m1.a, alpha.clone());
        let u = (lambda + &(alpha * &m2.a)).div(&m1.a)?;
        let p = &u + &m2.a;
        let q2 = Mat2::new(p.clone(), &m2.b + &(&p * &u), Series::one(f), u);
        Ok((q1, q2))
    } else {
        let q1 = Mat2::new(alpha.clone(), Series::one(f), Series::zero(f), alpha.clone());
        let s = lambda + &(alpha * &m2.a);
        let q2 = Mat2::new(Series::zero(f), m2.b.div(&s)?, s, m2.a.clone());
        Ok((q1, q2))
    }
}

/// Witness for condition (ii) from a search hit `(x, 1, 0, w)`.
fn witness_from_search(spec: &AlgebraSpec, x: &Series, w: &Series) -> (Mat2, Mat2) {
    let f = x.field();
    let (m1, m2, lambda) = (&spec.m1, &spec.m2, &spec.lambda);
    let q2 = Mat2::new(Series::zero(f), m2.b.clone(), Series::one(f), m2.a.clone());
    let upper = lambda + &(&m2.a * x) + &m2.b * w;
    let q1 = Mat2::new(x.clone(), upper, w.clone(), x + &m1.a);
    (q1, q2)
}

/// Witness for a zero discriminant with `a1 != 0` and `m1(alpha) = 0`.
fn witness_degenerate(spec: &AlgebraSpec, alpha: &Series) -> Result<(Mat2, Mat2)> {
    let f = alpha.field();
    let (m1, m2, lambda) = (&spec.m1, &spec.m2, &spec.lambda);
    let q1 = Mat2::diag(&m1.a + alpha, alpha.clone());
    let mu = lambda + &(&m2.a * alpha);
    let inv = m1.a.inv()?;
    let q2 = Mat2::new(&(&mu + &(&m1.a * &m2.a)) * &inv, Series::zero(f), inv.clone(), &mu * &inv);
    Ok((q1, q2))
}

fn independent(q1: &Mat2, q2: &Mat2) -> bool {
    // q1, q2 are non-scalar, so dependence means q2 = c q1 for a scalar c
    let e1 = q1.entries();
    let e2 = q2.entries();
    (0..4).any(|i| (i + 1..4).any(|j| !(&(e1[i] * e2[j]) + &(e1[j] * e2[i])).is_zero()))
}

fn verdict(condition: Condition, witness: Option<(Mat2, Mat2)>, commutative_note: bool) -> ExistenceVerdict {
    let independent = witness.as_ref().map(|(a, b)| independent(a, b));
    ExistenceVerdict { exists: condition != Condition::None, matched_condition: condition, witness, commutative_note, independent }
}

/// Decide whether a pair with the given data exists in `M_2(K)`.
pub fn decide(spec: &AlgebraSpec) -> Result<ExistenceVerdict> {
    decide_with_box(spec, &SearchBox::default())
}

pub fn decide_with_box(spec: &AlgebraSpec, bx: &SearchBox) -> Result<ExistenceVerdict> {
    let f = spec.lambda.field();
    if spec.is_quaternion()? {
        if let Some(alpha) = root_of(&spec.m1)? {
            return Ok(verdict(Condition::I, Some(witness_with_root(spec, &alpha)?), false));
        }
        if let Some(alpha) = root_of(&spec.m2)? {
            let (q2, q1) = witness_with_root(&spec.swapped(), &alpha)?;
            return Ok(verdict(Condition::I, Some((q1, q2)), false));
        }
        let (a, b) = cyclic_presentation(spec)?;
        if !splits(&a, &b)? {
            return Ok(verdict(Condition::None, None, false));
        }
        let witness = search_pair(spec, bx).map(|(x, _, _, w)| witness_from_search(spec, &x, &w));
        return Ok(verdict(Condition::II, witness, false));
    }
    if spec.m1.a.val().is_some() {
        if let Some(alpha) = root_of(&spec.m1)? {
            return Ok(verdict(Condition::III, Some(witness_degenerate(spec, &alpha)?), false));
        }
    }
    if spec.m2.a.val().is_some() {
        if let Some(alpha) = root_of(&spec.m2)? {
            let (q2, q1) = witness_degenerate(&spec.swapped(), &alpha)?;
            return Ok(verdict(Condition::IV, Some((q1, q2)), false));
        }
    }
    if spec.m1.a.val().is_some() || spec.m2.a.val().is_some() {
        return Ok(verdict(Condition::None, None, false));
    }
    // a1 = a2 = 0, so lambda = 0 and both generators square to scalars.
    let (b1, b2) = (&spec.m1.b, &spec.m2.b);
    let (s1, s2) = (b1.sqrt()?, b2.sqrt()?);
    let pi = Series::pi_pow(f, 1);
    let witness = match (s1, s2) {
        (Some(e1), Some(e2)) => {
            let n = |u: Series| Mat2::new(Series::zero(f), u, Series::zero(f), Series::zero(f));
            let q1 = &Mat2::scalar(e1.clone()) + &n(Series::one(f));
            let u = if e1 != e2 { Series::one(f) } else { pi };
            let q2 = &Mat2::scalar(e2) + &n(u);
            (q1, q2)
        }
        (None, None) => {
            let j = Mat2::new(Series::zero(f), pi.clone(), Series::one(f), Series::zero(f));
            let split = |b: &Series| -> Result<Mat2> {
                let e = b.even_sqrt();
                let odd = (b + &e.square()).div(&pi)?;
                let fo = odd.sqrt()?.ok_or_else(|| undetermined("odd part is not a square"))?;
                Ok(&Mat2::scalar(e) + &j.scale(&fo))
            };
            (split(b1)?, split(b2)?)
        }
        // a square root of a non-square commutes only with its own field,
        // which has no nilpotent elements
        _ => return Ok(verdict(Condition::None, None, false)),
    };
    Ok(verdict(Condition::V, Some(witness), true))
}

/// Check that a witness pair realises the spec: non-scalar, the prescribed
/// traces and determinants, and `q1 bar(q2) + q2 bar(q1) = lambda`, all at the
/// precision of the entries. Exact pairs must also pass `make_pair`.
pub fn validate_witness(spec: &AlgebraSpec, q1: &Mat2, q2: &Mat2) -> Result<bool> {
    if q1.is_scalar()? || q2.is_scalar()? {
        return Ok(false);
    }
    let same = |x: &Series, y: &Series| x.eq_at_precision(y);
    let full = &(q1 * &q2.bar()) + &(q2 * &q1.bar());
    let ok = same(&q1.trace(), &spec.m1.a)
        && same(&q1.det(), &spec.m1.b)
        && same(&q2.trace(), &spec.m2.a)
        && same(&q2.det(), &spec.m2.b)
        && full.b.is_zero()
        && full.c.is_zero()
        && same(&full.a, &spec.lambda)
        && same(&full.d, &spec.lambda);
    if ok && q1.is_exact() && q2.is_exact() {
        return Ok(make_pair(q1, q2)?.lambda == spec.lambda);
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::parse::parse_series;

    fn s(x: &str) -> Series {
        parse_series(Field::binary(), x).unwrap()
    }

    fn spec(lambda: &str, m1: (&str, &str), m2: (&str, &str)) -> AlgebraSpec {
        AlgebraSpec::from_coeffs(s(lambda), (s(m1.0), s(m1.1)), (s(m2.0), s(m2.1))).unwrap()
    }

    #[test]
    fn symbol_examples() {
        assert!(splits(&Series::zero(Field::binary()), &s("t + t^3")).unwrap());
        assert!(splits(&s("t^-3 + 1"), &s("1 + t^2")).unwrap());
        assert!(splits(&s("t^-1"), &s("t")).unwrap());
        assert!(!splits(&s("1"), &s("t")).unwrap());
    }

    #[test]
    fn presentations() {
        let sp = spec("t", ("1", "t^2"), ("0", "t"));
        assert_eq!(cyclic_presentation(&sp).unwrap(), (s("t^2"), sp.delta.clone()));
        let sp = spec("t^-1", ("0", "t"), ("0", "1 + t"));
        assert_eq!(cyclic_presentation(&sp).unwrap(), (s("t^3 + t^4"), s("1 + t")));
        let sp = spec("1", ("0", "0"), ("0", "0"));
        assert_eq!(cyclic_presentation(&sp).unwrap(), (Series::zero(Field::binary()), s("1")));
        assert!(cyclic_presentation(&spec("0", ("0", "t"), ("0", "t"))).is_err());
    }

    #[test]
    fn division_algebra_example() {
        // lambda = 0, m1 = X^2 + X + 1 (unramified), m2 = X^2 + t
        let sp = spec("0", ("1", "1"), ("0", "t"));
        let v = decide(&sp).unwrap();
        assert!(!v.exists);
        assert_eq!(v.matched_condition, Condition::None);
        let small = SearchBox { lo: -3, hi: 5, max_candidates: 1 << 10 };
        assert_eq!(search_pair(&sp, &small), None);
    }

    #[test]
    fn degenerate_with_root() {
        // m1 = X^2 + X + t has a root; choose lambda with Delta = 0
        let m1 = classify(&s("1"), &s("t")).unwrap();
        let m2 = classify(&s("0"), &s("t^2")).unwrap();
        // Delta = lambda^2 + b2 (a1 = 1, a2 = 0) vanishes for lambda = t
        let sp = AlgebraSpec::new(s("t"), m1, m2);
        assert!(sp.delta.is_zero());
        let v = decide(&sp).unwrap();
        assert_eq!(v.matched_condition, Condition::III);
        let (q1, q2) = v.witness.unwrap();
        assert!(validate_witness(&sp, &q1, &q2).unwrap());
    }

    #[test]
    fn commuting_case() {
        for (b1, b2) in [("t", "t^3"), ("1", "t^2"), ("t^2", "t^2")] {
            let sp = spec("0", ("0", b1), ("0", b2));
            let v = decide(&sp).unwrap();
            assert_eq!((v.exists, v.matched_condition, v.commutative_note), (true, Condition::V, true));
            let (q1, q2) = v.witness.unwrap();
            assert!(validate_witness(&sp, &q1, &q2).unwrap());
            assert_eq!(&(&q1 * &q2) + &(&q2 * &q1), Mat2::scalar(Series::zero(Field::binary())));
        }
        assert!(!decide(&spec("0", ("0", "t"), ("0", "1"))).unwrap().exists);
    }

    #[test]
    fn c_form_at_fixed_point() {
        let sp = spec("0", ("1", "t"), ("1", "1"));
        let one = s("1");
        let zero = Series::zero(Field::binary());
        let lambda = c_form(&sp, &zero, &one, &zero, &one).unwrap();
        let sp = AlgebraSpec::new(lambda.clone(), sp.m1, sp.m2);
        let (x, y, z, w) = search_pair(&sp, &SearchBox::default()).unwrap();
        assert!(c_form(&sp, &x, &y, &z, &w).unwrap().eq_at_precision(&lambda));
    }

    #[test]
    fn split_witnesses_validate() {
        for (lambda, m1, m2, cond) in [
            ("t^-1", ("1", "t"), ("0", "t"), Condition::I),
            ("1", ("0", "t"), ("1", "t"), Condition::I),
            ("t^-1", ("0", "t"), ("0", "t^3 + 1"), Condition::II),
            ("t^-1", ("1", "1"), ("1", "1"), Condition::II),
        ] {
            let sp = spec(lambda, m1, m2);
            let v = decide(&sp).unwrap();
            assert_eq!(v.matched_condition, cond, "{lambda}");
            let (q1, q2) = v.witness.expect("witness");
            assert!(validate_witness(&sp, &q1, &q2).unwrap(), "{lambda}");
            assert_eq!(v.independent, Some(true));
        }
    }
}

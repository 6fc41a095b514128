//! 2x2 matrices over `K`, the quaternion involution and the symmetric product
//! of a generator pair.

use std::fmt;
use std::ops::{Add, Mul};

use crate::defects::{classify, QuadPoly};
use crate::error::{undetermined, Error, Result};
use crate::field::Field;
use crate::parse::parse_series;
use crate::series::Series;

/// Row-major `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: Series,
    pub b: Series,
    pub c: Series,
    pub d: Series,
}

impl Mat2 {
    pub fn new(a: Series, b: Series, c: Series, d: Series) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn scalar(s: Series) -> Mat2 {
        let z = Series::zero(s.field());
        Mat2 { a: s.clone(), b: z.clone(), c: z, d: s }
    }

    pub fn identity(field: Field) -> Mat2 {
        Mat2::scalar(Series::one(field))
    }

    pub fn diag(a: Series, d: Series) -> Mat2 {
        let z = Series::zero(a.field());
        Mat2 { a, b: z.clone(), c: z, d }
    }

    pub fn field(&self) -> Field {
        self.a.field()
    }

    pub fn entries(&self) -> [&Series; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_exact(&self) -> bool {
        self.entries().iter().all(|e| e.is_exact())
    }

    pub fn trace(&self) -> Series {
        &self.a + &self.d
    }

    pub fn det(&self) -> Series {
        &(&self.a * &self.d) + &(&self.b * &self.c)
    }

    /// The involution `[[d, b], [c, a]]`; equals `det(A) A^{-1}` when invertible.
    pub fn bar(&self) -> Mat2 {
        Mat2 { a: self.d.clone(), b: self.b.clone(), c: self.c.clone(), d: self.a.clone() }
    }

    pub fn scale(&self, s: &Series) -> Mat2 {
        Mat2 { a: s * &self.a, b: s * &self.b, c: s * &self.c, d: s * &self.d }
    }

    pub fn add_scalar(&self, s: &Series) -> Mat2 {
        Mat2 { a: &self.a + s, b: self.b.clone(), c: self.c.clone(), d: &self.d + s }
    }

    /// `Err` when every visible entry agrees with a scalar but some entry is
    /// inexact.
    pub fn is_scalar(&self) -> Result<bool> {
        let diff = &self.a + &self.d;
        let visible = self.b.is_zero() && self.c.is_zero() && diff.is_zero();
        if !visible {
            return Ok(false);
        }
        if self.b.is_exact() && self.c.is_exact() && diff.is_exact() {
            Ok(true)
        } else {
            Err(undetermined("matrix is scalar to visible precision"))
        }
    }

    /// Inverse of an invertible matrix, `bar(A) / det(A)`.
    pub fn inv(&self) -> Result<Mat2> {
        Ok(self.bar().scale(&self.det().inv()?))
    }

    /// `g^{-1} self g`.
    pub fn conjugate_by(&self, g: &Mat2) -> Result<Mat2> {
        Ok(&(&g.inv()? * self) * g)
    }

    /// True when every entry is visibly in `O`.
    pub fn is_integral_entries(&self) -> bool {
        self.entries().iter().all(|e| e.val_lower() >= 0)
    }
}

impl<'a> Add<&'a Mat2> for &'a Mat2 {
    type Output = Mat2;

    fn add(self, o: &'a Mat2) -> Mat2 {
        Mat2 { a: &self.a + &o.a, b: &self.b + &o.b, c: &self.c + &o.c, d: &self.d + &o.d }
    }
}

impl<'a> Mul<&'a Mat2> for &'a Mat2 {
    type Output = Mat2;

    fn mul(self, o: &'a Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
}

impl serde::Serialize for Mat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}],[{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Split on `sep` at bracket/paren depth zero.
fn split_depth0(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut last = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[last..i]);
                last = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[last..]);
    out
}

fn strip_brackets(s: &str) -> Result<&str> {
    s.trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected `[...]`, got `{}`", s.trim())))
}

/// Parse `[[e11, e12],[e21, e22]]`.
pub fn parse_mat2(field: Field, s: &str) -> Result<Mat2> {
    let rows = split_depth0(strip_brackets(s)?, ',');
    if rows.len() != 2 {
        return Err(Error::Parse(format!("expected 2 rows, got {}", rows.len())));
    }
    let mut entries = Vec::with_capacity(4);
    for row in rows {
        let cols = split_depth0(strip_brackets(row)?, ',');
        if cols.len() != 2 {
            return Err(Error::Parse(format!("expected 2 columns in `{}`", row.trim())));
        }
        for c in cols {
            entries.push(parse_series(field, c)?);
        }
    }
    let mut it = entries.into_iter();
    let mut next = || it.next().unwrap();
    Ok(Mat2::new(next(), next(), next(), next()))
}

/// `ad' + bc' + cb' + da'`, the scalar `q1 bar(q2) + q2 bar(q1)`.
pub fn sym_product(q1: &Mat2, q2: &Mat2) -> Series {
    &q1.a * &q2.d + &q1.b * &q2.c + &q1.c * &q2.b + &q1.d * &q2.a
}

/// `lambda^2 + a1 a2 lambda + a1^2 b2 + a2^2 b1`.
pub fn discriminant(lambda: &Series, m1: &QuadPoly, m2: &QuadPoly) -> Series {
    let a1a2 = &m1.a * &m2.a;
    lambda.square() + &a1a2 * lambda + m1.a.square() * &m2.b + m2.a.square() * &m1.b
}

/// Cayley-Hamilton polynomial `X^2 + tr(q) X + det(q)`, classified.
pub fn min_poly(q: &Mat2) -> Result<QuadPoly> {
    if q.is_scalar()? {
        return Err(Error::ScalarMatrix);
    }
    let (tr, det) = (q.trace(), q.det());
    if tr.val_lower() < 0 || det.val_lower() < 0 {
        return Err(Error::NonIntegral);
    }
    classify(&tr, &det)
}

/// A validated generator pair with `q_i` integral, non-scalar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairConfig {
    pub q1: Mat2,
    pub q2: Mat2,
    pub m1: QuadPoly,
    pub m2: QuadPoly,
    pub lambda: Series,
}

impl PairConfig {
    pub fn discriminant(&self) -> Series {
        discriminant(&self.lambda, &self.m1, &self.m2)
    }
}

pub fn make_pair(q1: &Mat2, q2: &Mat2) -> Result<PairConfig> {
    let m1 = min_poly(q1)?;
    let m2 = min_poly(q2)?;
    let lambda = sym_product(q1, q2);
    let full = &(q1 * &q2.bar()) + &(q2 * &q1.bar());
    let scalar = full.b.is_zero() && full.c.is_zero() && (&full.a + &full.d).is_zero();
    if !scalar || !(&full.a + &lambda).is_zero() {
        return Err(Error::NonScalarProduct);
    }
    Ok(PairConfig { q1: q1.clone(), q2: q2.clone(), m1, m2, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defects::QuadClass;

    fn m(x: &str) -> Mat2 {
        parse_mat2(Field::binary(), x).unwrap()
    }

    fn s(x: &str) -> Series {
        parse_series(Field::binary(), x).unwrap()
    }

    #[test]
    fn bar_examples() {
        let f = Field::binary();
        assert_eq!(Mat2::identity(f).bar(), Mat2::identity(f));
        let a = m("[[1, t],[t^2, t^3]]");
        assert_eq!(a.bar(), m("[[t^3, t],[t^2, 1]]"));
        assert_eq!(&a * &a.bar(), Mat2::scalar(a.det()));
    }

    #[test]
    fn matrix_round_trip() {
        let a = m("[[1 + t^-1, 0],[t, t^2 + t^3]]");
        assert_eq!(m(&a.to_string()), a);
        assert!(parse_mat2(Field::binary(), "[[1, 0],[0]]").is_err());
        assert!(parse_mat2(Field::binary(), "[1, 0]").is_err());
    }

    #[test]
    fn sym_product_of_self_vanishes() {
        let q = m("[[1 + t, t^-1],[t^4, t^2]]");
        assert!(sym_product(&q, &q).is_exact_zero());
    }

    #[test]
    fn min_poly_examples() {
        let p = min_poly(&m("[[0, 1],[0, 0]]")).unwrap();
        assert_eq!(p.class, QuadClass::ReducibleInsep);
        let p = min_poly(&m("[[0, t],[1, 0]]")).unwrap();
        assert_eq!((p.class, p.t), (QuadClass::RamInsep, 0));
        let p = min_poly(&m("[[1, 0],[t, 0]]")).unwrap();
        assert_eq!(p.class, QuadClass::ReducibleSep);
        assert_eq!(min_poly(&Mat2::identity(Field::binary())), Err(Error::ScalarMatrix));
        assert_eq!(min_poly(&m("[[0, t^-1],[1, 0]]")), Err(Error::NonIntegral));
    }

    #[test]
    fn make_pair_examples() {
        let p = make_pair(&m("[[0, 1],[0, 0]]"), &m("[[0, 0],[1, 0]]")).unwrap();
        assert_eq!(p.lambda, Series::one(Field::binary()));
        let q = m("[[t, 1],[1, 0]]");
        assert!(make_pair(&q, &q).unwrap().lambda.is_exact_zero());
        // commuting diagonal pair: a1 alpha2 + a2 alpha1
        let (a1, al1, a2, al2) = (s("1"), s("t"), s("t"), s("1 + t^2"));
        let q1 = Mat2::diag(&al1 + &a1, al1.clone());
        let q2 = Mat2::diag(&al2 + &a2, al2.clone());
        let p = make_pair(&q1, &q2).unwrap();
        assert_eq!(p.lambda, &a1 * &al2 + &a2 * &al1);
    }

    #[test]
    fn table_row_three_pair() {
        // f(inf,0) and f(0,s): lambda = u v t^-s, Delta = lambda^2
        let s_ = 2;
        let q1 = m("[[0, 1],[0, 0]]");
        let q2 = Mat2::new(Series::zero(Field::binary()), Series::zero(Field::binary()), Series::pi_pow(Field::binary(), -s_), Series::zero(Field::binary()));
        let lambda = sym_product(&q1, &q2);
        assert_eq!(lambda, Series::pi_pow(Field::binary(), -2));
        let p1 = min_poly(&q1).unwrap();
        let p2 = crate::defects::classify(&Series::zero(Field::binary()), &Series::zero(Field::binary())).unwrap();
        assert_eq!(discriminant(&lambda, &p1, &p2), Series::pi_pow(Field::binary(), -4));
    }
}

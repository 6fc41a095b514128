//! Text form of field and series elements.
//!
//! A series is written as terms `c*t^e` joined by `+`, lowest exponent first.
//! The coefficient `c` is a polynomial in the residue generator `g`; it is
//! omitted when it equals 1 and parenthesised when it has several terms, e.g.
//! `t^-3 + 1 + (g+1)*t^2`. Truncated elements carry a ` (mod t^N)` suffix.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::series::Series;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Render a residue field element in the polynomial basis.
pub fn render_elem(c: FieldElem) -> String {
    if c.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for i in (0..32).rev() {
        if c.0 >> i & 1 == 1 {
            parts.push(match i {
                0 => "1".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            });
        }
    }
    parts.join("+")
}

fn render_coeff(c: FieldElem) -> String {
    let s = render_elem(c);
    if s.contains('+') {
        format!("({s})")
    } else {
        s
    }
}

impl serde::Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (e, c) in self.terms() {
            let coeff = render_coeff(c);
            let mono = match e {
                0 => None,
                1 => Some("t".to_string()),
                _ => Some(format!("t^{e}")),
            };
            terms.push(match (mono, c == FieldElem::ONE) {
                (None, _) => coeff,
                (Some(m), true) => m,
                (Some(m), false) => format!("{coeff}*{m}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", terms.join(" + "))?;
        }
        if let Some(p) = self.prec() {
            write!(f, " (mod t^{p})")?;
        }
        Ok(())
    }
}

/// Parse a residue field element: a `+`-separated sum of `0`, `1`, `g`, `g^k`.
pub fn parse_elem(field: Field, s: &str) -> Result<FieldElem> {
    let s = s.trim();
    let s = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(s);
    let mut acc = FieldElem::ZERO;
    for part in s.split('+') {
        let part = part.trim();
        let x = match part {
            "0" => FieldElem::ZERO,
            "1" => FieldElem::ONE,
            "g" => field.generator(),
            _ => {
                let k = part
                    .strip_prefix("g^")
                    .and_then(|k| k.trim().parse::<u64>().ok())
                    .ok_or_else(|| perr(format!("bad coefficient `{part}`")))?;
                field.pow(field.generator(), k)
            }
        };
        acc = field.add(acc, x);
    }
    Ok(acc)
}

fn parse_exponent(s: &str) -> Result<i64> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(1);
    }
    let e = s
        .strip_prefix('^')
        .ok_or_else(|| perr(format!("expected `^` in `t{s}`")))?
        .trim();
    let e = e.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(e);
    e.parse().map_err(|_| perr(format!("bad exponent `{e}`")))
}

fn parse_term(field: Field, term: &str) -> Result<(i64, FieldElem)> {
    let term = term.trim();
    if term.is_empty() {
        return Err(perr("empty term"));
    }
    let (coeff, mono) = match term.rsplit_once('*') {
        Some((c, m)) => (Some(c), Some(m)),
        None if term.starts_with('t') || term.starts_with("pi") => (None, Some(term)),
        None => (Some(term), None),
    };
    let c = match coeff {
        Some(c) => parse_elem(field, c)?,
        None => FieldElem::ONE,
    };
    let e = match mono {
        None => 0,
        Some(m) => {
            let m = m.trim();
            let rest = m
                .strip_prefix("pi")
                .or_else(|| m.strip_prefix('t'))
                .ok_or_else(|| perr(format!("expected `t` in `{m}`")))?;
            parse_exponent(rest)?
        }
    };
    Ok((e, c))
}

/// Split on `+` outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut last = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' if depth == 0 => {
                out.push(&s[last..i]);
                last = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[last..]);
    out
}

/// Parse a series in the grammar above. Parsing then rendering is the identity
/// on rendered output.
pub fn parse_series(field: Field, s: &str) -> Result<Series> {
    let mut body = s.trim();
    let mut prec = None;
    if let Some(open) = body.rfind("(mod") {
        let tail = body[open + 4..].trim();
        let tail = tail.strip_suffix(')').ok_or_else(|| perr("unclosed `(mod`"))?.trim();
        let n = tail
            .strip_prefix("t^")
            .or_else(|| tail.strip_prefix("pi^"))
            .ok_or_else(|| perr(format!("bad precision `{tail}`")))?;
        prec = Some(n.trim().parse::<i64>().map_err(|_| perr(format!("bad precision `{n}`")))?);
        body = body[..open].trim();
    }
    if body.is_empty() {
        return Err(perr("empty element"));
    }
    let terms = split_top(body)
        .into_iter()
        .map(|t| parse_term(field, t))
        .collect::<Result<Vec<_>>>()?;
    let exact = Series::from_terms(field, &terms);
    Ok(match prec {
        Some(p) => exact.truncate(p),
        None => exact,
    })
}

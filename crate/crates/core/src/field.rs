//! Residue field `F_{2^tau}` as bit vectors modulo an irreducible polynomial.
//!
//! Elements are stored in the polynomial basis `1, g, g^2, ...` where `g` is
//! the class of `x` modulo the configured modulus. The [`Field`] value also
//! carries the working precision used by the Laurent series layer, so a single
//! `Copy` handle describes the whole local field `F_{2^tau}((t))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of coefficient slots kept when an exact computation has
/// to be truncated (inverses of non-monomials, Hensel roots).
pub const DEFAULT_PREC: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    tau: u32,
    modulus: u32,
    prec: u32,
}

impl Field {
    /// Field `F_{2^tau}` with the given modulus (bit `i` = coefficient of `x^i`).
    pub fn new(tau: u32, modulus: u32) -> Result<Field> {
        if !(1..=16).contains(&tau) {
            return Err(Error::UnsupportedDegree(tau));
        }
        if !is_irreducible(tau, modulus) {
            return Err(Error::ReducibleModulus { tau, modulus });
        }
        Ok(Field { tau, modulus, prec: DEFAULT_PREC })
    }

    /// Field with the numerically smallest irreducible modulus of degree `tau`.
    pub fn with_degree(tau: u32) -> Result<Field> {
        if !(1..=16).contains(&tau) {
            return Err(Error::UnsupportedDegree(tau));
        }
        let modulus = default_modulus(tau);
        Field::new(tau, modulus)
    }

    /// `F_2((t))`.
    pub fn binary() -> Field {
        Field { tau: 1, modulus: 0b11, prec: DEFAULT_PREC }
    }

    pub fn with_prec(mut self, prec: u32) -> Field {
        self.prec = prec.max(8);
        self
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Working precision in coefficient slots.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn order(&self) -> u32 {
        1 << self.tau
    }

    /// All field elements, in increasing bit order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order()).map(FieldElem)
    }

    /// The class of `x`; equals `1` when `tau = 1`.
    pub fn generator(&self) -> FieldElem {
        self.reduce(0b10)
    }

    pub fn contains(&self, x: FieldElem) -> bool {
        x.0 < self.order()
    }

    fn reduce(&self, mut v: u32) -> FieldElem {
        let tau = self.tau;
        while v >> tau != 0 {
            let deg = 31 - v.leading_zeros();
            v ^= self.modulus << (deg - tau);
        }
        FieldElem(v)
    }

    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        FieldElem(x.0 ^ y.0)
    }

    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        if x.0 == 0 || y.0 == 0 {
            return FieldElem::ZERO;
        }
        if self.tau == 1 {
            return FieldElem::ONE;
        }
        let mut acc = 0u32;
        let mut a = x.0;
        let mut b = y.0;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
        }
        self.reduce(acc)
    }

    pub fn square(&self, x: FieldElem) -> FieldElem {
        self.mul(x, x)
    }

    pub fn pow(&self, x: FieldElem, mut e: u64) -> FieldElem {
        let mut base = x;
        let mut acc = FieldElem::ONE;
        while e != 0 {
            if e & 1 != 0 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(x, (1u64 << self.tau) - 2))
    }

    /// Unique square root, `x^(2^(tau-1))`.
    pub fn sqrt(&self, x: FieldElem) -> FieldElem {
        let mut y = x;
        for _ in 1..self.tau {
            y = self.square(y);
        }
        y
    }

    /// Absolute trace to `F_2`, returned as 0 or 1.
    pub fn trace(&self, x: FieldElem) -> u32 {
        let mut acc = FieldElem::ZERO;
        let mut y = x;
        for _ in 0..self.tau {
            acc = self.add(acc, y);
            y = self.square(y);
        }
        debug_assert!(acc.0 <= 1);
        acc.0
    }

    /// A root of `z^2 + z = u`, or `None` when `trace(u) = 1`.
    ///
    /// The map `z -> z^2 + z` is F_2-linear with kernel `{0, 1}`; solve the
    /// linear system by elimination over the polynomial basis.
    pub fn solve_artin_schreier(&self, u: FieldElem) -> Option<FieldElem> {
        if self.trace(u) != 0 {
            return None;
        }
        let n = self.tau as usize;
        // rows: (image bits, preimage bits)
        let mut rows: Vec<(u32, u32)> = (0..n)
            .map(|i| {
                let e = FieldElem(1 << i);
                (self.add(self.square(e), e).0, 1u32 << i)
            })
            .collect();
        let mut target = (u.0, 0u32);
        let mut pivot_row = 0;
        for bit in (0..n).rev() {
            let Some(p) = (pivot_row..n).find(|&r| rows[r].0 >> bit & 1 == 1) else {
                continue;
            };
            rows.swap(pivot_row, p);
            let (pi, pp) = rows[pivot_row];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != pivot_row && row.0 >> bit & 1 == 1 {
                    row.0 ^= pi;
                    row.1 ^= pp;
                }
            }
            if target.0 >> bit & 1 == 1 {
                target.0 ^= pi;
                target.1 ^= pp;
            }
            pivot_row += 1;
        }
        if target.0 != 0 {
            return None;
        }
        let z = FieldElem(target.1);
        debug_assert_eq!(self.add(self.square(z), z), u);
        Some(z)
    }
}

impl Default for Field {
    fn default() -> Self {
        Field::binary()
    }
}

fn poly_deg(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_deg(b);
    while a != 0 && poly_deg(a) >= db {
        a ^= b << (poly_deg(a) - db);
    }
    a
}

/// Trial division by every polynomial of degree `1..=tau/2`.
pub fn is_irreducible(tau: u32, modulus: u32) -> bool {
    if tau == 0 || tau > 16 || poly_deg(modulus) != tau as i32 {
        return false;
    }
    for d in 1..=tau / 2 {
        for low in 0..(1u32 << d) {
            let f = (1 << d) | low;
            if poly_rem(modulus, f) == 0 {
                return false;
            }
        }
    }
    true
}

pub fn default_modulus(tau: u32) -> u32 {
    let lo = 1u32 << tau;
    (lo..lo << 1)
        .find(|&m| is_irreducible(tau, m))
        .expect("irreducible polynomials exist in every degree")
}

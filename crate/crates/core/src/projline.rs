//! The projective line P¹(F_q) = F_q ∪ {∞} and the action of PGL₂(F_q) on it.

use std::fmt;

use rand::Rng;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

/// A point of P¹(F_q). Finite points are ordered by code; ∞ is greatest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Finite(Elem),
    Infinity,
}

impl ProjPoint {
    /// Position in the canonical order: the code for finite points, `q` for ∞.
    #[inline]
    pub fn index(self, q: u32) -> usize {
        match self {
            ProjPoint::Finite(x) => x.0 as usize,
            ProjPoint::Infinity => q as usize,
        }
    }

    #[inline]
    pub fn from_index(i: usize, q: u32) -> ProjPoint {
        if i == q as usize {
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(Elem(i as u32))
        }
    }

    pub fn finite(self) -> Option<Elem> {
        match self {
            ProjPoint::Finite(x) => Some(x),
            ProjPoint::Infinity => None,
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(x) => write!(f, "{x}"),
            ProjPoint::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ProjPoint::Finite(x) => s.serialize_u32(x.0),
            ProjPoint::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;
        impl Visitor<'_> for PointVisitor {
            type Value = ProjPoint;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an element code or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ProjPoint, E> {
                u32::try_from(v).map(|c| ProjPoint::Finite(Elem(c))).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ProjPoint, E> {
                u32::try_from(v).map(|c| ProjPoint::Finite(Elem(c))).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ProjPoint, E> {
                if v == "inf" {
                    Ok(ProjPoint::Infinity)
                } else {
                    Err(E::custom(format!("unknown point {v:?}")))
                }
            }
        }
        d.deserialize_any(PointVisitor)
    }
}

/// All q+1 points in canonical order.
pub fn points(field: &Field) -> Vec<ProjPoint> {
    (0..=field.q() as usize).map(|i| ProjPoint::from_index(i, field.q())).collect()
}

/// An invertible 2×2 matrix `(a b; c d)` over F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Matrix2 {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

impl Matrix2 {
    pub fn new(field: &Field, a: Elem, b: Elem, c: Elem, d: Elem) -> Result<Matrix2> {
        let m = Matrix2 { a, b, c, d };
        if m.det(field).is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(m)
    }

    pub fn identity() -> Matrix2 {
        Matrix2 { a: Elem::ONE, b: Elem::ZERO, c: Elem::ZERO, d: Elem::ONE }
    }

    pub fn det(&self, f: &Field) -> Elem {
        f.sub(f.mul(self.a, self.d), f.mul(self.b, self.c))
    }

    pub fn mul(&self, f: &Field, o: &Matrix2) -> Matrix2 {
        Matrix2 {
            a: f.add(f.mul(self.a, o.a), f.mul(self.b, o.c)),
            b: f.add(f.mul(self.a, o.b), f.mul(self.b, o.d)),
            c: f.add(f.mul(self.c, o.a), f.mul(self.d, o.c)),
            d: f.add(f.mul(self.c, o.b), f.mul(self.d, o.d)),
        }
    }

    /// Uniformly random invertible matrix.
    pub fn random<R: Rng + ?Sized>(f: &Field, rng: &mut R) -> Matrix2 {
        loop {
            let mut e = || Elem(rng.random_range(0..f.q()));
            let m = Matrix2 { a: e(), b: e(), c: e(), d: e() };
            if !m.det(f).is_zero() {
                return m;
            }
        }
    }
}

/// An element of PGL₂(F_q), stored as the representative whose first
/// nonzero entry in (a, b, c, d) order is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pgl2Element(Matrix2);

impl Pgl2Element {
    pub fn new(field: &Field, m: Matrix2) -> Result<Pgl2Element> {
        if m.det(field).is_zero() {
            return Err(Error::SingularMatrix);
        }
        let lead = [m.a, m.b, m.c, m.d].into_iter().find(|x| !x.is_zero()).expect("nonsingular");
        let s = field.inv(lead)?;
        Ok(Pgl2Element(Matrix2 {
            a: field.mul(m.a, s),
            b: field.mul(m.b, s),
            c: field.mul(m.c, s),
            d: field.mul(m.d, s),
        }))
    }

    pub fn identity() -> Pgl2Element {
        Pgl2Element(Matrix2::identity())
    }

    pub fn matrix(&self) -> Matrix2 {
        self.0
    }

    /// Fractional linear action `x ↦ (ax+b)/(cx+d)`.
    pub fn act(&self, f: &Field, x: ProjPoint) -> ProjPoint {
        let Matrix2 { a, b, c, d } = self.0;
        match x {
            ProjPoint::Finite(x) => {
                let den = f.add(f.mul(c, x), d);
                if den.is_zero() {
                    ProjPoint::Infinity
                } else {
                    let num = f.add(f.mul(a, x), b);
                    ProjPoint::Finite(f.div(num, den).expect("nonzero"))
                }
            }
            ProjPoint::Infinity => {
                if c.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(f.div(a, c).expect("nonzero"))
                }
            }
        }
    }

    /// `self ∘ other`, so that `(gh)·x = g·(h·x)`.
    pub fn compose(&self, f: &Field, other: &Pgl2Element) -> Pgl2Element {
        Pgl2Element::new(f, self.0.mul(f, &other.0)).expect("product of invertible matrices")
    }

    pub fn inverse(&self, f: &Field) -> Pgl2Element {
        let Matrix2 { a, b, c, d } = self.0;
        Pgl2Element::new(f, Matrix2 { a: d, b: f.neg(b), c: f.neg(c), d: a }).expect("invertible")
    }

    /// Point permutation induced on P¹, indexed by [`ProjPoint::index`].
    pub fn permutation(&self, f: &Field) -> Vec<usize> {
        points(f).into_iter().map(|x| self.act(f, x).index(f.q())).collect()
    }
}

/// The unique group element sending `p1 ↦ ∞`, `p2 ↦ 0`, `p3 ↦ 1`.
pub fn map_triple_to_canonical(
    f: &Field,
    p1: ProjPoint,
    p2: ProjPoint,
    p3: ProjPoint,
) -> Result<Pgl2Element> {
    if p1 == p2 || p1 == p3 || p2 == p3 {
        return Err(Error::DuplicatePoints);
    }
    use ProjPoint::*;
    let one = Elem::ONE;
    let zero = Elem::ZERO;
    let m = match (p1, p2, p3) {
        // x ↦ (x - p2) / (p3 - p2)
        (Infinity, Finite(y), Finite(z)) => Matrix2 { a: one, b: f.neg(y), c: zero, d: f.sub(z, y) },
        // x ↦ (p3 - p1) / (x - p1)
        (Finite(x), Infinity, Finite(z)) => Matrix2 { a: zero, b: f.sub(z, x), c: one, d: f.neg(x) },
        // x ↦ (x - p2) / (x - p1)
        (Finite(x), Finite(y), Infinity) => Matrix2 { a: one, b: f.neg(y), c: one, d: f.neg(x) },
        // x ↦ (x - p2)(p3 - p1) / ((x - p1)(p3 - p2))
        (Finite(x), Finite(y), Finite(z)) => {
            let s = f.sub(z, x);
            let t = f.sub(z, y);
            Matrix2 { a: s, b: f.neg(f.mul(y, s)), c: t, d: f.neg(f.mul(x, t)) }
        }
        _ => unreachable!("at most one point is infinite"),
    };
    Pgl2Element::new(f, m)
}

/// Every element of PGL₂(F_q) exactly once: first `(1 b; c d)` with
/// `d ≠ bc`, then `(0 1; c d)` with `c ≠ 0`, each in code order.
pub fn pgl2_iter(f: &Field) -> impl Iterator<Item = Pgl2Element> + '_ {
    let q = f.q();
    let lead_a = (0..q).flat_map(move |b| {
        (0..q).flat_map(move |c| {
            (0..q).filter_map(move |d| {
                let m = Matrix2 { a: Elem::ONE, b: Elem(b), c: Elem(c), d: Elem(d) };
                (!m.det(f).is_zero()).then_some(Pgl2Element(m))
            })
        })
    });
    let lead_b = (1..q).flat_map(move |c| {
        (0..q).map(move |d| Pgl2Element(Matrix2 { a: Elem::ZERO, b: Elem::ONE, c: Elem(c), d: Elem(d) }))
    });
    lead_a.chain(lead_b)
}

pub fn pgl2_order(q: u32) -> u64 {
    let q = q as u64;
    q * q * q - q
}

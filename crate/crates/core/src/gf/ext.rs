use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{poly, Elem, Field, FieldOps};
use crate::error::{Error, Result};

const EXT_LOG_TABLE_MAX: u64 = 1 << 16;

/// `a + b·β` in F_{q^2}, where β is a root of the extension modulus.
///
/// Ordered by the canonical code `a + q·b`. Serializes as `[a, b]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[Elem; 2]", into = "[Elem; 2]")]
pub struct ExtElem {
    pub a: Elem,
    pub b: Elem,
}

impl From<[Elem; 2]> for ExtElem {
    fn from([a, b]: [Elem; 2]) -> Self {
        ExtElem { a, b }
    }
}

impl From<ExtElem> for [Elem; 2] {
    fn from(x: ExtElem) -> Self {
        [x.a, x.b]
    }
}

impl Ord for ExtElem {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.b, self.a).cmp(&(other.b, other.a))
    }
}

impl PartialOrd for ExtElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

impl ExtElem {
    pub const ZERO: ExtElem = ExtElem { a: Elem::ZERO, b: Elem::ZERO };
    pub const ONE: ExtElem = ExtElem { a: Elem::ONE, b: Elem::ZERO };
}

struct Tables {
    exp: Vec<ExtElem>,
    log: Vec<u32>,
}

/// F_{q^2} = F_q[β]/(β² + c1·β + c0).
#[derive(Clone)]
pub struct ExtField {
    base: Field,
    c0: Elem,
    c1: Elem,
    tables: Option<Arc<Tables>>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtField")
            .field("base", &self.base)
            .field("c0", &self.c0)
            .field("c1", &self.c1)
            .finish()
    }
}

impl ExtField {
    /// Degree-2 extension using the smallest monic irreducible quadratic
    /// `Z² + c1·Z + c0`, searched with `c0` compared first.
    pub fn new(base: &Field) -> ExtField {
        let (c0, c1) = base
            .elements()
            .flat_map(|c0| base.elements().map(move |c1| (c0, c1)))
            .find(|&(c0, c1)| {
                base.elements()
                    .all(|z| !base.add(base.add(base.mul(z, z), base.mul(c1, z)), c0).is_zero())
            })
            .expect("irreducible quadratics exist over every finite field");
        let mut ext = ExtField { base: base.clone(), c0, c1, tables: None };
        let order = ext.order();
        if order <= EXT_LOG_TABLE_MAX {
            let n = order - 1;
            let factors = poly::distinct_prime_factors(n);
            let g = ext
                .elements()
                .skip(1)
                .find(|&g| factors.iter().all(|&r| ext.pow(g, n / r) != ExtElem::ONE))
                .expect("cyclic multiplicative group");
            let mut exp = Vec::with_capacity(n as usize);
            let mut log = vec![0u32; order as usize];
            let mut x = ExtElem::ONE;
            for i in 0..n {
                exp.push(x);
                log[ext.code(x) as usize] = i as u32;
                x = ext.mul_slow(x, g);
            }
            ext.tables = Some(Arc::new(Tables { exp, log }));
        }
        ext
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    /// `(c0, c1)` with β² + c1·β + c0 = 0.
    pub fn modulus(&self) -> (Elem, Elem) {
        (self.c0, self.c1)
    }

    pub fn order(&self) -> u64 {
        let q = self.base.q() as u64;
        q * q
    }

    #[inline]
    pub fn code(&self, x: ExtElem) -> u64 {
        x.a.0 as u64 + self.base.q() as u64 * x.b.0 as u64
    }

    pub fn from_code(&self, code: u64) -> Result<ExtElem> {
        if code >= self.order() {
            return Err(Error::InvalidElement { code, q: self.order() });
        }
        let q = self.base.q() as u64;
        Ok(ExtElem { a: Elem((code % q) as u32), b: Elem((code / q) as u32) })
    }

    pub fn elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        let q = self.base.q();
        (0..q).flat_map(move |b| (0..q).map(move |a| ExtElem { a: Elem(a), b: Elem(b) }))
    }

    #[inline]
    pub fn embed(&self, x: Elem) -> ExtElem {
        ExtElem { a: x, b: Elem::ZERO }
    }

    /// The embedded F_q element, if `x` lies in the base field.
    #[inline]
    pub fn to_base(&self, x: ExtElem) -> Option<Elem> {
        x.b.is_zero().then_some(x.a)
    }

    #[inline]
    pub fn add(&self, x: ExtElem, y: ExtElem) -> ExtElem {
        ExtElem { a: self.base.add(x.a, y.a), b: self.base.add(x.b, y.b) }
    }

    #[inline]
    pub fn sub(&self, x: ExtElem, y: ExtElem) -> ExtElem {
        ExtElem { a: self.base.sub(x.a, y.a), b: self.base.sub(x.b, y.b) }
    }

    #[inline]
    pub fn neg(&self, x: ExtElem) -> ExtElem {
        ExtElem { a: self.base.neg(x.a), b: self.base.neg(x.b) }
    }

    fn mul_slow(&self, x: ExtElem, y: ExtElem) -> ExtElem {
        let f = &self.base;
        let ac = f.mul(x.a, y.a);
        let bd = f.mul(x.b, y.b);
        let cross = f.add(f.mul(x.a, y.b), f.mul(x.b, y.a));
        // β² = -c1·β - c0
        ExtElem { a: f.sub(ac, f.mul(bd, self.c0)), b: f.sub(cross, f.mul(bd, self.c1)) }
    }

    #[inline]
    pub fn mul(&self, x: ExtElem, y: ExtElem) -> ExtElem {
        match &self.tables {
            Some(t) => {
                if x == ExtElem::ZERO || y == ExtElem::ZERO {
                    return ExtElem::ZERO;
                }
                let n = t.exp.len() as u32;
                let s = t.log[self.code(x) as usize] + t.log[self.code(y) as usize];
                t.exp[(if s >= n { s - n } else { s }) as usize]
            }
            None => self.mul_slow(x, y),
        }
    }

    /// `x^q`, the nontrivial automorphism over F_q: β^q = -c1 - β.
    #[inline]
    pub fn frobenius(&self, x: ExtElem) -> ExtElem {
        let f = &self.base;
        ExtElem { a: f.sub(x.a, f.mul(x.b, self.c1)), b: f.neg(x.b) }
    }

    /// `x · x^q`, an element of F_q.
    pub fn norm(&self, x: ExtElem) -> Elem {
        let n = self.mul(x, self.frobenius(x));
        debug_assert!(n.b.is_zero());
        n.a
    }

    pub fn inv(&self, x: ExtElem) -> Result<ExtElem> {
        if x == ExtElem::ZERO {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let n = t.exp.len() as u32;
            let l = t.log[self.code(x) as usize];
            return Ok(t.exp[((n - l) % n) as usize]);
        }
        let n_inv = self.base.inv(self.norm(x))?;
        let c = self.frobenius(x);
        Ok(ExtElem { a: self.base.mul(c.a, n_inv), b: self.base.mul(c.b, n_inv) })
    }

    pub fn div(&self, x: ExtElem, y: ExtElem) -> Result<ExtElem> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: ExtElem, mut n: u64) -> ExtElem {
        let mut r = ExtElem::ONE;
        let mut b = x;
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            n >>= 1;
        }
        r
    }

    /// `U_{q+1} = {u : u^{q+1} = 1}`, sorted by code.
    pub fn unit_circle(&self) -> Vec<ExtElem> {
        self.elements().filter(|&u| u != ExtElem::ZERO && self.norm(u) == Elem::ONE).collect()
    }
}

impl FieldOps for ExtField {
    type Elem = ExtElem;

    fn zero(&self) -> ExtElem {
        ExtElem::ZERO
    }
    fn one(&self) -> ExtElem {
        ExtElem::ONE
    }
    fn add(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        ExtField::add(self, a, b)
    }
    fn sub(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        ExtField::sub(self, a, b)
    }
    fn neg(&self, a: ExtElem) -> ExtElem {
        ExtField::neg(self, a)
    }
    fn mul(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        ExtField::mul(self, a, b)
    }
    fn inv(&self, a: ExtElem) -> Option<ExtElem> {
        ExtField::inv(self, a).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ext(p: u32, e: u32) -> ExtField {
        ExtField::new(&Field::new(p, e, None).unwrap())
    }

    #[test]
    fn over_f3_norm_is_onto() {
        let k = ext(3, 1);
        assert_eq!(k.order(), 9);
        let norms: BTreeSet<Elem> = k.elements().filter(|&x| x != ExtElem::ZERO).map(|x| k.norm(x)).collect();
        assert_eq!(norms, [Elem(1), Elem(2)].into_iter().collect());
    }

    #[test]
    fn frobenius_fixes_exactly_the_base() {
        for (p, e) in [(2, 2), (3, 1), (2, 3), (5, 1)] {
            let k = ext(p, e);
            let fixed: Vec<ExtElem> = k.elements().filter(|&x| k.frobenius(x) == x).collect();
            assert_eq!(fixed.len() as u32, k.base().q());
            assert!(fixed.iter().all(|x| x.b.is_zero()));
            for x in k.elements() {
                assert_eq!(k.frobenius(k.frobenius(x)), x);
                assert_eq!(k.frobenius(x), k.pow(x, k.base().q() as u64));
            }
        }
    }

    #[test]
    fn unit_circle_of_f27() {
        let k = ext(3, 3);
        let u = k.unit_circle();
        assert_eq!(u.len(), 28);
        let brute = k.elements().filter(|&x| k.pow(x, 28) == ExtElem::ONE).count();
        assert_eq!(brute, 28);
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let k = ext(2, 3);
        let f = k.base().clone();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(k.add(k.embed(a), k.embed(b)), k.embed(f.add(a, b)));
                assert_eq!(k.mul(k.embed(a), k.embed(b)), k.embed(f.mul(a, b)));
            }
        }
    }

    #[test]
    fn units_invert_by_frobenius() {
        for (p, e) in [(2, 1), (2, 2), (3, 1), (2, 3), (3, 2), (5, 1), (2, 4), (3, 3), (2, 5)] {
            let k = ext(p, e);
            for u in k.unit_circle() {
                assert_eq!(k.frobenius(u), k.inv(u).unwrap());
            }
        }
    }

    #[test]
    fn tables_match_schoolbook() {
        let k = ext(3, 2);
        assert!(k.tables.is_some());
        for x in k.elements() {
            for y in k.elements() {
                assert_eq!(k.mul(x, y), k.mul_slow(x, y));
            }
        }
    }

    #[test]
    fn code_round_trip_and_order() {
        let k = ext(3, 2);
        let all: Vec<ExtElem> = k.elements().collect();
        for (i, &x) in all.iter().enumerate() {
            assert_eq!(k.code(x), i as u64);
            assert_eq!(k.from_code(i as u64).unwrap(), x);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}

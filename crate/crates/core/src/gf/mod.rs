//! Finite fields F_{p^e} with canonical integer element codes, plus the
//! quadratic extension F_{q^2} used by the unit-circle model.
//!
//! An element of F_q = F_p[α]/(m(α)) is stored as the base-p evaluation of
//! its coefficient vector in the basis {1, α, …, α^{e-1}}, so code 0 is zero,
//! code 1 is one, and for prime fields the code is the residue itself.
//! Fields are immutable after construction and cheap to clone.

mod ext;
pub(crate) mod poly;

pub use ext::{ExtElem, ExtField};

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 20;

const ADD_TABLE_MAX: u32 = 1 << 10;
const LOG_TABLE_MAX: u32 = 1 << 16;

/// An element of F_q, identified by its canonical code in `[0, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Field arithmetic shared by F_q and F_{q^2}, so that linear algebra and
/// symmetric-function code can be written once.
pub trait FieldOps: Sync {
    type Elem: Copy + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }
}

/// Operation selector for [`Field::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
    /// Raise the single operand to the given exponent (negative allowed).
    Pow(i64),
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    generator: u32,
}

/// The finite field F_{p^e}.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.0.p)
            .field("e", &self.0.e)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `e` over F_p, with
/// coefficient vectors compared constant term first.
pub fn default_modulus(p: u32, e: u32) -> Vec<u32> {
    let e = e as usize;
    let total = (p as u64).pow(e as u32);
    for n in 0..total {
        // c_0 is the most significant digit of n
        let mut f = vec![0u32; e + 1];
        let mut rest = n;
        for i in (0..e).rev() {
            f[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        f[e] = 1;
        if poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// Builds F_{p^e}. Without an explicit modulus the deterministic default
    /// from [`default_modulus`] is used.
    pub fn new(p: u32, e: u32, modulus: Option<Vec<u32>>) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::ZeroDegree);
        }
        let q64 = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if q64 > MAX_ORDER {
            return Err(Error::FieldTooLarge(q64));
        }
        let q = q64 as u32;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != e as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        e + 1,
                        m.len()
                    )));
                }
                if m[e as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus(format!("coefficients must be below {p}")));
                }
                if !poly::is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus(m));
                }
                m
            }
            None => default_modulus(p, e),
        };
        let pow_p: Vec<u32> = (0..=e).map(|i| p.pow(i)).collect();
        let mut inner = Inner {
            p,
            e,
            q,
            modulus,
            pow_p,
            add: None,
            neg: Vec::new(),
            exp: Vec::new(),
            log: Vec::new(),
            generator: 0,
        };
        inner.neg = (0..q).map(|a| inner.neg_slow(a)).collect();
        if q <= ADD_TABLE_MAX {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = inner.add_slow(a, b);
                }
            }
            inner.add = Some(table);
        }
        inner.generator = inner.find_generator();
        if q <= LOG_TABLE_MAX {
            let mut exp = vec![0u32; (q - 1) as usize];
            let mut log = vec![0u32; q as usize];
            let mut x = 1u32;
            for (i, slot) in exp.iter_mut().enumerate() {
                *slot = x;
                log[x as usize] = i as u32;
                x = inner.mul_slow(x, inner.generator);
            }
            inner.exp = exp;
            inner.log = log;
        }
        Ok(Field(Arc::new(inner)))
    }

    /// Parses `"p^e"` or `"p^e:c0,c1,…,1"` (explicit modulus, constant term first).
    /// A bare prime `"p"` is accepted as `"p^1"`.
    pub fn from_spec(spec: &str) -> Result<Field> {
        let bad = || Error::BadFieldSpec(spec.to_string());
        let (head, modulus) = match spec.split_once(':') {
            Some((h, m)) => {
                let coeffs = m
                    .split(',')
                    .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                (h, Some(coeffs))
            }
            None => (spec, None),
        };
        let (p, e) = match head.split_once('^') {
            Some((p, e)) => (
                p.trim().parse::<u32>().map_err(|_| bad())?,
                e.trim().parse::<u32>().map_err(|_| bad())?,
            ),
            None => (head.trim().parse::<u32>().map_err(|_| bad())?, 1),
        };
        Field::new(p, e, modulus)
    }

    /// Explicit spec string `"p^e:c0,…,1"` that reconstructs this exact field.
    pub fn spec(&self) -> String {
        let coeffs: Vec<String> = self.0.modulus.iter().map(|c| c.to_string()).collect();
        format!("{}^{}:{}", self.0.p, self.0.e, coeffs.join(","))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.0.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// The smallest-code generator of the multiplicative group.
    pub fn generator(&self) -> Elem {
        Elem(self.0.generator)
    }

    pub fn elem(&self, code: u64) -> Result<Elem> {
        if code >= self.0.q as u64 {
            return Err(Error::InvalidElement { code, q: self.0.q as u64 });
        }
        Ok(Elem(code as u32))
    }

    /// The image of an integer under Z → F_p ⊆ F_q.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.0.q).map(Elem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (1..self.0.q).map(Elem)
    }

    /// Coordinates of `x` in the polynomial basis {1, α, …}.
    pub fn digits(&self, x: Elem) -> Vec<u32> {
        self.0.digits(x.0)
    }

    pub fn from_digits(&self, digits: &[u32]) -> Elem {
        Elem(self.0.encode_digits(digits))
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.add {
            Some(t) => Elem(t[(a.0 * self.0.q + b.0) as usize]),
            None => Elem(self.0.add_slow(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if self.0.log.is_empty() {
            return Elem(self.0.mul_slow(a.0, b.0));
        }
        let n = self.0.q - 1;
        let s = self.0.log[a.0 as usize] + self.0.log[b.0 as usize];
        Elem(self.0.exp[(if s >= n { s - n } else { s }) as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.0.log.is_empty() {
            return Ok(self.pow_u(a, self.0.q as u64 - 2));
        }
        let n = self.0.q - 1;
        let l = self.0.log[a.0 as usize];
        Ok(Elem(self.0.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    fn pow_u(&self, a: Elem, mut n: u64) -> Elem {
        let mut r = Elem::ONE;
        let mut b = a;
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            n >>= 1;
        }
        r
    }

    /// `a^n` by square-and-multiply; negative exponents require `a != 0`.
    pub fn pow(&self, a: Elem, n: i64) -> Result<Elem> {
        if n >= 0 {
            Ok(self.pow_u(a, n as u64))
        } else {
            let inv = self.inv(a)?;
            Ok(self.pow_u(inv, n.unsigned_abs()))
        }
    }

    /// Dispatching form of the field operations.
    pub fn arith(&self, op: ArithOp, operands: &[Elem]) -> Result<Elem> {
        let need = |name: &'static str, n: usize| {
            if operands.len() != n {
                Err(Error::Arity { op: name, expected: n, got: operands.len() })
            } else {
                Ok(())
            }
        };
        for &x in operands {
            self.elem(x.0 as u64)?;
        }
        match op {
            ArithOp::Add => need("add", 2).map(|_| self.add(operands[0], operands[1])),
            ArithOp::Sub => need("sub", 2).map(|_| self.sub(operands[0], operands[1])),
            ArithOp::Mul => need("mul", 2).map(|_| self.mul(operands[0], operands[1])),
            ArithOp::Div => {
                need("div", 2)?;
                self.div(operands[0], operands[1])
            }
            ArithOp::Neg => need("neg", 1).map(|_| self.neg(operands[0])),
            ArithOp::Inv => {
                need("inv", 1)?;
                self.inv(operands[0])
            }
            ArithOp::Pow(n) => {
                need("pow", 1)?;
                self.pow(operands[0], n)
            }
        }
    }

    /// `x^(p^j)`.
    pub fn frobenius(&self, x: Elem, j: u32) -> Elem {
        let mut y = x;
        for _ in 0..(j % self.0.e) {
            y = self.pow_u(y, self.0.p as u64);
        }
        y
    }

    /// Absolute trace F_q → F_p, returned as an element of the prime subfield.
    pub fn trace(&self, x: Elem) -> Elem {
        let mut acc = Elem::ZERO;
        let mut y = x;
        for _ in 0..self.0.e {
            acc = self.add(acc, y);
            y = self.pow_u(y, self.0.p as u64);
        }
        acc
    }

    pub fn is_square(&self, x: Elem) -> bool {
        if x.is_zero() || self.0.p == 2 {
            return true;
        }
        self.pow_u(x, (self.0.q as u64 - 1) / 2) == Elem::ONE
    }

    /// The subgroup of F_q^× of order `d` (the d-th roots of unity), sorted by code.
    pub fn mult_subgroup(&self, d: u64) -> Result<Vec<Elem>> {
        let n = self.0.q as u64 - 1;
        if d == 0 || !n.is_multiple_of(d) {
            return Err(Error::NotADivisor { d, q_minus_one: n });
        }
        let h = self.pow_u(self.generator(), n / d);
        let mut out = Vec::with_capacity(d as usize);
        let mut x = Elem::ONE;
        for _ in 0..d {
            out.push(x);
            x = self.mul(x, h);
        }
        out.sort();
        Ok(out)
    }

    /// Elements of the subfield F_{p^m} (fixed points of x ↦ x^(p^m)), sorted.
    pub fn subfield(&self, m: u32) -> Result<Vec<Elem>> {
        if m == 0 || !self.0.e.is_multiple_of(m) {
            return Err(Error::Precondition(format!("{m} does not divide {}", self.0.e)));
        }
        Ok(self.elements().filter(|&x| self.frobenius(x, m) == x).collect())
    }
}

impl Inner {
    fn digits(&self, mut code: u32) -> Vec<u32> {
        let mut d = vec![0u32; self.e as usize];
        for slot in d.iter_mut() {
            *slot = code % self.p;
            code /= self.p;
        }
        d
    }

    fn encode_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0u32, |acc, &d| acc * self.p + d)
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        for i in 0..self.e as usize {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * self.pow_p[i];
            a /= self.p;
            b /= self.p;
        }
        out
    }

    fn neg_slow(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        for i in 0..self.e as usize {
            let d = a % self.p;
            out += ((self.p - d) % self.p) * self.pow_p[i];
            a /= self.p;
        }
        out
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let prod = poly::mulmod(&self.digits(a), &self.digits(b), &self.modulus, self.p);
        self.encode_digits(&prod)
    }

    fn pow_slow(&self, a: u32, mut n: u64) -> u32 {
        let mut r = 1u32;
        let mut b = a;
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul_slow(r, b);
            }
            b = self.mul_slow(b, b);
            n >>= 1;
        }
        r
    }

    fn find_generator(&self) -> u32 {
        let n = self.q as u64 - 1;
        if n == 1 {
            return 1;
        }
        let factors = poly::distinct_prime_factors(n);
        (1..self.q)
            .find(|&g| factors.iter().all(|&r| self.pow_slow(g, n / r) != 1))
            .expect("the multiplicative group of a finite field is cyclic")
    }
}

impl FieldOps for Field {
    type Elem = Elem;

    fn zero(&self) -> Elem {
        Elem::ZERO
    }
    fn one(&self) -> Elem {
        Elem::ONE
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        Field::add(self, a, b)
    }
    fn sub(&self, a: Elem, b: Elem) -> Elem {
        Field::sub(self, a, b)
    }
    fn neg(&self, a: Elem) -> Elem {
        Field::neg(self, a)
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        Field::mul(self, a, b)
    }
    fn inv(&self, a: Elem) -> Option<Elem> {
        Field::inv(self, a).ok()
    }
}

//! Binary forms F_q[X,Y]_k, the evaluation map onto F_q^{q+1}, the GL₂ action
//! `(g·f)(X,Y) = f(dX - bY, -cX + aY)`, subspaces with membership tests, and
//! the Lucas subspaces together with their base-p digit machinery.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::linalg::{self, Echelon};
use crate::projline::{pgl2_iter, Matrix2, ProjPoint};

/// Seed used by randomized invariance checks unless the caller overrides it.
pub const DEFAULT_SEED: u64 = 0x6c75_6361_7321;

/// `Σ a_i X^{k-i} Y^i`, stored as `(a_0, …, a_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomPoly {
    coeffs: Vec<Elem>,
}

impl HomPoly {
    /// Panics on an empty coefficient list; every form has degree ≥ 0.
    pub fn new(coeffs: Vec<Elem>) -> HomPoly {
        assert!(!coeffs.is_empty(), "a form of degree k has k+1 coefficients");
        HomPoly { coeffs }
    }

    pub fn from_codes(field: &Field, codes: &[u64]) -> Result<HomPoly> {
        if codes.is_empty() {
            return Err(Error::Malformed("empty coefficient list".into()));
        }
        let coeffs = codes.iter().map(|&c| field.elem(c)).collect::<Result<Vec<_>>>()?;
        Ok(HomPoly { coeffs })
    }

    pub fn zero(k: usize) -> HomPoly {
        HomPoly { coeffs: vec![Elem::ZERO; k + 1] }
    }

    /// `X^{k-i} Y^i`.
    pub fn monomial(k: usize, i: usize) -> HomPoly {
        let mut f = HomPoly::zero(k);
        f.coeffs[i] = Elem::ONE;
        f
    }

    /// `X^q Y - X Y^q`, which vanishes on all of P¹(F_q).
    pub fn theta(field: &Field) -> HomPoly {
        let q = field.q() as usize;
        let mut f = HomPoly::zero(q + 1);
        f.coeffs[1] = Elem::ONE;
        f.coeffs[q] = field.neg(Elem::ONE);
        f
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Elem> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `f(x, 1)` at a finite point and `f(1, 0) = a_0` at ∞.
    pub fn evaluate(&self, field: &Field, x: ProjPoint) -> Elem {
        match x {
            ProjPoint::Finite(x) => self.coeffs.iter().fold(Elem::ZERO, |acc, &a| field.add(field.mul(acc, x), a)),
            ProjPoint::Infinity => self.coeffs[0],
        }
    }

    /// Values at all q+1 points: finite points by code, then ∞.
    pub fn ev_vector(&self, field: &Field) -> Vec<Elem> {
        crate::projline::points(field).into_iter().map(|x| self.evaluate(field, x)).collect()
    }

    pub fn mul(&self, field: &Field, other: &HomPoly) -> HomPoly {
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        HomPoly { coeffs: out }
    }

    pub fn add(&self, field: &Field, other: &HomPoly) -> Result<HomPoly> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch { expected: self.degree(), got: other.degree() });
        }
        Ok(HomPoly { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| field.add(a, b)).collect() })
    }

    pub fn scale(&self, field: &Field, c: Elem) -> HomPoly {
        HomPoly { coeffs: self.coeffs.iter().map(|&a| field.mul(a, c)).collect() }
    }
}

/// Rows `0..=n` of Pascal's triangle reduced mod p.
pub fn pascal_mod_p(n: usize, p: u32) -> Vec<Vec<u32>> {
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![1u32; i + 1];
        for j in 1..i {
            row[j] = (rows[i - 1][j - 1] + rows[i - 1][j]) % p;
        }
        rows.push(row);
    }
    rows
}

fn powers(field: &Field, x: Elem, n: usize) -> Vec<Elem> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Elem::ONE;
    for _ in 0..=n {
        out.push(acc);
        acc = field.mul(acc, x);
    }
    out
}

/// `(u X + w Y)^j` for `j = 0..=k`, from the binomial theorem with Pascal rows mod p.
fn linear_form_powers(field: &Field, u: Elem, w: Elem, k: usize, pascal: &[Vec<u32>]) -> Vec<Vec<Elem>> {
    let pu = powers(field, u, k);
    let pw = powers(field, w, k);
    (0..=k)
        .map(|j| {
            (0..=j)
                .map(|s| {
                    let c = pascal[j][s];
                    if c == 0 {
                        Elem::ZERO
                    } else {
                        field.mul(field.from_int(c as i64), field.mul(pu[j - s], pw[s]))
                    }
                })
                .collect()
        })
        .collect()
}

/// `(g·f)(X, Y) = f(dX - bY, -cX + aY)`.
pub fn gl2_act_poly(field: &Field, g: &Matrix2, f: &HomPoly) -> Result<HomPoly> {
    if g.det(field).is_zero() {
        return Err(Error::SingularMatrix);
    }
    let k = f.degree();
    let pascal = pascal_mod_p(k, field.p());
    let first = linear_form_powers(field, g.d, field.neg(g.b), k, &pascal);
    let second = linear_form_powers(field, field.neg(g.c), g.a, k, &pascal);
    let mut out = vec![Elem::ZERO; k + 1];
    for (i, &ai) in f.coeffs().iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let l1 = &first[k - i];
        let l2 = &second[i];
        for (s, &x) in l1.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let xa = field.mul(ai, x);
            for (t, &y) in l2.iter().enumerate() {
                out[s + t] = field.add(out[s + t], field.mul(xa, y));
            }
        }
    }
    Ok(HomPoly::new(out))
}

/// Base-p digits, least significant first.
pub fn digits_base_p(mut n: u64, p: u32) -> Vec<u32> {
    let mut out = Vec::new();
    while n > 0 {
        out.push((n % p as u64) as u32);
        n /= p as u64;
    }
    out
}

/// `i ≤_p k`: every base-p digit of `i` is at most the matching digit of `k`.
pub fn leq_p(i: u64, k: u64, p: u32) -> bool {
    let (mut i, mut k) = (i, k);
    let p = p as u64;
    while i > 0 {
        if i % p > k % p {
            return false;
        }
        i /= p;
        k /= p;
    }
    true
}

/// `Π (k_r + 1)` over the base-p digits of `k`.
pub fn lucas_dimension(k: u64, p: u32) -> u64 {
    digits_base_p(k, p).iter().map(|&d| d as u64 + 1).product()
}

/// `F_{k,p} = {a ∈ [0, k] : a ≰_p k}`, ascending.
pub fn forbidden_set(k: usize, p: u32) -> Vec<usize> {
    (0..=k).filter(|&a| !leq_p(a as u64, k as u64, p)).collect()
}

/// `|F_{k,p}| = (k+1) - Π(k_r + 1)`.
pub fn forbidden_count(k: usize, p: u32) -> usize {
    (k + 1) - lucas_dimension(k as u64, p) as usize
}

/// True iff adding the summands in base p produces no carries.
pub fn carry_free(summands: &[u64], p: u32) -> bool {
    let mut rest: Vec<u64> = summands.to_vec();
    let p = p as u64;
    while rest.iter().any(|&x| x > 0) {
        let s: u64 = rest.iter().map(|&x| x % p).sum();
        if s >= p {
            return false;
        }
        for x in rest.iter_mut() {
            *x /= p;
        }
    }
    true
}

/// A subspace of F_q[X,Y]_k in reduced row-echelon form, with a parity-check
/// basis of its annihilator for fast membership tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    k: usize,
    basis: Echelon<Elem>,
    checks: Vec<Vec<(usize, Elem)>>,
}

impl Subspace {
    pub fn span(field: &Field, k: usize, rows: Vec<HomPoly>) -> Result<Subspace> {
        let mut raw = Vec::with_capacity(rows.len());
        for f in rows {
            if f.degree() != k {
                return Err(Error::DegreeMismatch { expected: k, got: f.degree() });
            }
            raw.push(f.into_coeffs());
        }
        let basis = linalg::rref(field, raw, k + 1);
        let checks = linalg::kernel(field, &basis)
            .into_iter()
            .map(|h| h.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
            .collect();
        Ok(Subspace { k, basis, checks })
    }

    pub fn from_rows(field: &Field, k: usize, rows: &[Vec<u64>]) -> Result<Subspace> {
        let polys = rows.iter().map(|r| HomPoly::from_codes(field, r)).collect::<Result<Vec<_>>>()?;
        Subspace::span(field, k, polys)
    }

    pub fn full(field: &Field, k: usize) -> Subspace {
        Subspace::span(field, k, (0..=k).map(|i| HomPoly::monomial(k, i)).collect()).expect("degrees match")
    }

    /// `W_k^Luc = span{X^{k-i} Y^i : i ≤_p k}`.
    pub fn lucas(field: &Field, k: usize) -> Subspace {
        let rows = (0..=k)
            .filter(|&i| leq_p(i as u64, k as u64, field.p()))
            .map(|i| HomPoly::monomial(k, i))
            .collect();
        Subspace::span(field, k, rows).expect("degrees match")
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    pub fn rows(&self) -> Vec<HomPoly> {
        self.basis.rows.iter().map(|r| HomPoly::new(r.clone())).collect()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.basis.pivots
    }

    pub fn echelon(&self) -> &Echelon<Elem> {
        &self.basis
    }

    /// Sparse rows `h` with `f ∈ W ⇔ Σ h_i a_i = 0` for every row.
    pub fn parity_checks(&self) -> &[Vec<(usize, Elem)>] {
        &self.checks
    }

    /// Membership by reduction against the echelon basis.
    pub fn contains(&self, field: &Field, f: &HomPoly) -> Result<bool> {
        if f.degree() != self.k {
            return Err(Error::DegreeMismatch { expected: self.k, got: f.degree() });
        }
        Ok(linalg::in_row_space(field, &self.basis, f.coeffs()))
    }

    /// Membership via the parity checks; `coeffs` must have length k+1.
    #[inline]
    pub fn satisfies_checks(&self, field: &Field, coeffs: &[Elem]) -> bool {
        self.checks.iter().all(|row| {
            row.iter().fold(Elem::ZERO, |acc, &(i, h)| field.add(acc, field.mul(h, coeffs[i]))).is_zero()
        })
    }

    /// Coefficient rows as integer codes, the on-disk form.
    pub fn to_codes(&self) -> Vec<Vec<u32>> {
        self.basis.rows.iter().map(|r| r.iter().map(|c| c.0).collect()).collect()
    }
}

/// A failed invariance check: `g · rows[row]` left the subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceWitness {
    pub g: Matrix2,
    pub row: HomPoly,
    pub image: HomPoly,
}

fn check_matrix(field: &Field, w: &Subspace, g: &Matrix2) -> std::result::Result<(), InvarianceWitness> {
    for row in w.rows() {
        let image = gl2_act_poly(field, g, &row).expect("invertible");
        if !w.contains(field, &image).expect("same degree") {
            return Err(InvarianceWitness { g: *g, row, image });
        }
    }
    Ok(())
}

/// Checks `g·f ∈ W` for `trials` random invertible `g` and every basis row.
pub fn check_gl2_invariance(
    field: &Field,
    w: &Subspace,
    trials: usize,
    seed: u64,
) -> std::result::Result<(), InvarianceWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let g = Matrix2::random(field, &mut rng);
        check_matrix(field, w, &g)?;
    }
    Ok(())
}

/// Exhaustive version over PGL₂ representatives; scalar matrices act by
/// scalars and so preserve every subspace.
pub fn check_gl2_invariance_exhaustive(field: &Field, w: &Subspace) -> std::result::Result<(), InvarianceWitness> {
    for g in pgl2_iter(field) {
        check_matrix(field, w, &g.matrix())?;
    }
    Ok(())
}

/// `dim ker(Ev)` on F_q[X,Y]_k, by rank-nullity on the evaluation matrix.
pub fn kernel_dimension(field: &Field, k: usize) -> usize {
    let rows: Vec<Vec<Elem>> = (0..=k).map(|i| HomPoly::monomial(k, i).ev_vector(field)).collect();
    let rank = linalg::rref(field, rows, field.q() as usize + 1).rank();
    k + 1 - rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projline::points;
    use rand::Rng;

    fn field(p: u32, e: u32) -> Field {
        Field::new(p, e, None).unwrap()
    }

    #[test]
    fn evaluate_at_infinity() {
        let f = field(5, 1);
        assert_eq!(HomPoly::monomial(4, 4).evaluate(&f, ProjPoint::Infinity), Elem::ZERO);
        assert_eq!(HomPoly::monomial(4, 0).evaluate(&f, ProjPoint::Infinity), Elem::ONE);
    }

    #[test]
    fn theta_vanishes_everywhere() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (3, 3)] {
            let f = field(p, e);
            let th = HomPoly::theta(&f);
            assert!(th.ev_vector(&f).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn ev_vector_injective_below_q_plus_one() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4)] {
            let f = field(p, e);
            for k in 0..=f.q() as usize {
                assert_eq!(kernel_dimension(&f, k), 0, "q={} k={k}", f.q());
            }
        }
        assert!(HomPoly::zero(3).ev_vector(&field(5, 1)).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn kernel_dimension_examples() {
        let f4 = field(2, 2);
        assert_eq!(kernel_dimension(&f4, 4), 0);
        assert_eq!(kernel_dimension(&f4, 5), 1);
        assert_eq!(kernel_dimension(&field(3, 1), 6), 3);
        for k in 6..12 {
            assert_eq!(kernel_dimension(&f4, k), k - 4);
        }
    }

    #[test]
    fn leq_p_examples() {
        let le5: Vec<u64> = (0..=5).filter(|&i| leq_p(i, 5, 2)).collect();
        assert_eq!(le5, vec![0, 1, 4, 5]);
        let le7: Vec<u64> = (0..=7).filter(|&i| leq_p(i, 7, 3)).collect();
        assert_eq!(le7, vec![0, 1, 3, 4, 6, 7]);
        for k in 0..50 {
            assert!(leq_p(0, k, 3) && leq_p(k, k, 3));
        }
    }

    #[test]
    fn leq_p_is_lucas_nonvanishing() {
        for p in [2, 3, 5, 7] {
            let pascal = pascal_mod_p(200, p);
            for (k, row) in pascal.iter().enumerate() {
                for (i, &c) in row.iter().enumerate().take(k + 1) {
                    assert_eq!(leq_p(i as u64, k as u64, p), c != 0, "p={p} k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn forbidden_sets() {
        assert_eq!(forbidden_set(5, 2), vec![2, 3]);
        assert_eq!(forbidden_set(7, 3), vec![2, 5]);
        for p in [2, 3, 5, 7] {
            assert!(forbidden_set(p as usize - 1, p).is_empty());
            for k in 0..=200 {
                let fs = forbidden_set(k, p);
                assert_eq!(fs.len(), forbidden_count(k, p));
                for &a in &fs {
                    assert!(fs.contains(&(k - a)), "digit symmetry");
                }
                let dim = Subspace::lucas(&field(p, 1), k).dim();
                assert_eq!(dim as u64, lucas_dimension(k as u64, p));
            }
        }
    }

    #[test]
    fn carry_free_examples() {
        for p in [2, 3, 5] {
            assert!(carry_free(&[1, (p as u64).pow(3)], p));
        }
        assert!(!carry_free(&[1, 1, 1], 3));
        assert!(!carry_free(&[4, 5], 3));
        assert!(carry_free(&[4, 4], 3));
        assert!(carry_free(&[], 2));
    }

    #[test]
    fn lucas_bases() {
        let f27 = field(3, 3);
        let w7 = Subspace::lucas(&f27, 7);
        assert_eq!(w7.dim(), 6);
        assert_eq!(w7.pivots(), &[0, 1, 3, 4, 6, 7]);
        let f16 = field(2, 4);
        let w5 = Subspace::lucas(&f16, 5);
        assert_eq!(w5.pivots(), &[0, 1, 4, 5]);
        // k = a p^m - 1 gives the full space
        for (p, k) in [(3, 8), (3, 17), (2, 7), (5, 24), (5, 9)] {
            assert_eq!(Subspace::lucas(&field(p, 1), k).dim(), k + 1);
        }
    }

    #[test]
    fn membership() {
        let f = field(3, 3);
        let w7 = Subspace::lucas(&f, 7);
        assert!(w7.contains(&f, &HomPoly::zero(7)).unwrap());
        assert!(w7.contains(&f, &HomPoly::monomial(7, 4)).unwrap());
        assert!(!w7.contains(&f, &HomPoly::monomial(7, 2)).unwrap());
        let row = &w7.rows()[2];
        assert!(w7.contains(&f, row).unwrap());
        let bad = row.add(&f, &HomPoly::monomial(7, 5)).unwrap();
        assert!(!w7.contains(&f, &bad).unwrap());
        assert!(matches!(w7.contains(&f, &HomPoly::zero(6)), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn parity_checks_agree_with_reduction() {
        let f = field(5, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<HomPoly> = (0..3)
            .map(|_| HomPoly::new((0..7).map(|_| Elem(rng.random_range(0..5))).collect()))
            .collect();
        let w = Subspace::span(&f, 6, rows.clone()).unwrap();
        for _ in 0..500 {
            let g = if rng.random_bool(0.5) {
                HomPoly::new((0..7).map(|_| Elem(rng.random_range(0..5))).collect())
            } else {
                let c: Vec<Elem> = (0..3).map(|_| Elem(rng.random_range(0..5))).collect();
                rows.iter().zip(&c).fold(HomPoly::zero(6), |acc, (r, &ci)| acc.add(&f, &r.scale(&f, ci)).unwrap())
            };
            assert_eq!(w.contains(&f, &g).unwrap(), w.satisfies_checks(&f, g.coeffs()));
        }
    }

    #[test]
    fn action_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (p, e) in [(2, 3), (3, 2), (5, 1), (7, 1)] {
            let f = field(p, e);
            for _ in 0..30 {
                let g = Matrix2::random(&f, &mut rng);
                let h = Matrix2::random(&f, &mut rng);
                let poly = HomPoly::new((0..6).map(|_| Elem(rng.random_range(0..f.q()))).collect());
                assert_eq!(gl2_act_poly(&f, &Matrix2::identity(), &poly).unwrap(), poly);
                let lhs = gl2_act_poly(&f, &g, &gl2_act_poly(&f, &h, &poly).unwrap()).unwrap();
                let rhs = gl2_act_poly(&f, &g.mul(&f, &h), &poly).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        let f = field(3, 1);
        let singular = Matrix2 { a: Elem(1), b: Elem(1), c: Elem(1), d: Elem(1) };
        assert_eq!(gl2_act_poly(&f, &singular, &HomPoly::zero(2)), Err(Error::SingularMatrix));
    }

    #[test]
    fn zero_set_equivariance() {
        // roots of g·f are g applied to roots of f, with g acting by fractional maps
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (p, e) in [(2, 3), (3, 2), (7, 1)] {
            let f = field(p, e);
            for _ in 0..40 {
                let g = Matrix2::random(&f, &mut rng);
                let pg = crate::projline::Pgl2Element::new(&f, g).unwrap();
                let poly = HomPoly::new((0..5).map(|_| Elem(rng.random_range(0..f.q()))).collect());
                if poly.is_zero() {
                    continue;
                }
                let image = gl2_act_poly(&f, &g, &poly).unwrap();
                let mut expected: Vec<ProjPoint> = points(&f)
                    .into_iter()
                    .filter(|&x| poly.evaluate(&f, x).is_zero())
                    .map(|x| pg.act(&f, x))
                    .collect();
                expected.sort();
                let got: Vec<ProjPoint> = points(&f).into_iter().filter(|&x| image.evaluate(&f, x).is_zero()).collect();
                assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn invariance_checks() {
        let f = field(3, 2);
        assert!(check_gl2_invariance(&f, &Subspace::full(&f, 4), 50, DEFAULT_SEED).is_ok());
        assert!(check_gl2_invariance(&f, &Subspace::lucas(&f, 7), 200, DEFAULT_SEED).is_ok());
        assert!(check_gl2_invariance_exhaustive(&f, &Subspace::lucas(&f, 5)).is_ok());
        let single = Subspace::span(&f, 3, vec![HomPoly::monomial(3, 1)]).unwrap();
        let w = check_gl2_invariance(&f, &single, 20, DEFAULT_SEED).unwrap_err();
        assert!(!single.contains(&f, &w.image).unwrap());
        assert!(check_gl2_invariance_exhaustive(&f, &single).is_err());
    }
}

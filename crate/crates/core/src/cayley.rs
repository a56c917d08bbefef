//! The unit-circle model. The Cayley transform `κ(x) = (x - ξ)/(x - ξ^q)`,
//! `κ(∞) = 1`, identifies P¹(F_q) with `U_{q+1} ⊂ F_{q²}`, and a block
//! `T ⊂ U_{q+1}` is tested through linear relations among its elementary
//! symmetric polynomials.

use std::collections::{HashMap, HashSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::designs::{self, Block, BlockFamily, DesignReport, EnumOptions, Method};
use crate::error::{Error, Result};
use crate::gf::{Elem, ExtElem, ExtField, Field};
use crate::linalg;
use crate::polyspace::{forbidden_set, Subspace};
use crate::projline::{points, ProjPoint};
use crate::subsets::{binomial, par_subsets};

/// Cayley transform data for one field: ξ, the unit circle in code order,
/// and κ tabulated over P¹ in point-index order.
#[derive(Clone, Debug)]
pub struct CayleyCtx {
    field: Field,
    ext: ExtField,
    xi: ExtElem,
    unit: Vec<ExtElem>,
    unit_pos: HashMap<ExtElem, usize>,
    kappa: Vec<ExtElem>,
    kappa_inv: HashMap<ExtElem, ProjPoint>,
}

/// A k-subset of `U_{q+1}`, sorted by code. Serializes as a list of `[a, b]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitBlock(Vec<ExtElem>);

impl UnitBlock {
    pub fn new(ctx: &CayleyCtx, mut elems: Vec<ExtElem>) -> Result<UnitBlock> {
        if let Some(u) = elems.iter().find(|&&u| !ctx.is_unit(u)) {
            return Err(Error::Precondition(format!("{u} is not on the unit circle")));
        }
        elems.sort();
        if elems.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoints);
        }
        Ok(UnitBlock(elems))
    }

    pub fn elems(&self) -> &[ExtElem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Smallest-code root of `x² = n` for the smallest non-square `n` (odd p),
/// or smallest-code solution of `x^q + x = 1` (p = 2).
fn choose_xi(field: &Field, ext: &ExtField) -> ExtElem {
    if field.p() == 2 {
        ext.elements().find(|&x| ext.add(ext.frobenius(x), x) == ExtElem::ONE).expect("trace is onto")
    } else {
        let n = field.nonzero_elements().find(|&x| !field.is_square(x)).expect("F_q has non-squares");
        let target = ext.embed(n);
        ext.elements().find(|&x| ext.mul(x, x) == target).expect("every element of F_q is a square in F_{q^2}")
    }
}

impl CayleyCtx {
    pub fn new(field: &Field) -> CayleyCtx {
        let ext = ExtField::new(field);
        let xi = choose_xi(field, &ext);
        let xi_q = ext.frobenius(xi);
        let unit = ext.unit_circle();
        let unit_pos = unit.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let kappa: Vec<ExtElem> = points(field)
            .into_iter()
            .map(|x| match x {
                ProjPoint::Infinity => ExtElem::ONE,
                ProjPoint::Finite(t) => {
                    let t = ext.embed(t);
                    ext.div(ext.sub(t, xi), ext.sub(t, xi_q)).expect("ξ^q is not in F_q")
                }
            })
            .collect();
        let q = field.q();
        let kappa_inv = kappa.iter().enumerate().map(|(i, &u)| (u, ProjPoint::from_index(i, q))).collect();
        CayleyCtx { field: field.clone(), ext, xi, unit, unit_pos, kappa, kappa_inv }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ext(&self) -> &ExtField {
        &self.ext
    }

    pub fn xi(&self) -> ExtElem {
        self.xi
    }

    /// `U_{q+1}` in code order.
    pub fn unit_circle(&self) -> &[ExtElem] {
        &self.unit
    }

    pub fn is_unit(&self, u: ExtElem) -> bool {
        self.unit_pos.contains_key(&u)
    }

    /// Position of `u` in [`CayleyCtx::unit_circle`].
    pub fn unit_index(&self, u: ExtElem) -> Option<usize> {
        self.unit_pos.get(&u).copied()
    }

    pub fn kappa(&self, x: ProjPoint) -> ExtElem {
        self.kappa[x.index(self.field.q())]
    }

    pub fn kappa_inv(&self, u: ExtElem) -> Option<ProjPoint> {
        self.kappa_inv.get(&u).copied()
    }

    pub fn kappa_block(&self, b: &Block) -> UnitBlock {
        let mut v: Vec<ExtElem> = b.points().iter().map(|&x| self.kappa(x)).collect();
        v.sort();
        UnitBlock(v)
    }

    pub fn kappa_inv_block(&self, t: &UnitBlock) -> Block {
        Block::new(t.0.iter().map(|&u| self.kappa_inv(u).expect("unit block")).collect()).expect("κ is injective")
    }

    fn unit_block_from_indices(&self, idx: &[usize]) -> UnitBlock {
        UnitBlock(idx.iter().map(|&i| self.unit[i]).collect())
    }

    fn unit_indices(&self, t: &UnitBlock) -> Vec<usize> {
        t.0.iter().map(|&u| self.unit_pos[&u]).collect()
    }
}

/// `(e_0, …, e_n)` of the list, from the coefficients of `Π (1 + u Z)`.
pub fn elementary_symmetric_all(ext: &ExtField, t: &[ExtElem]) -> Vec<ExtElem> {
    let mut e = vec![ExtElem::ZERO; t.len() + 1];
    e[0] = ExtElem::ONE;
    for (n, &u) in t.iter().enumerate() {
        for a in (1..=n + 1).rev() {
            e[a] = ext.add(e[a], ext.mul(u, e[a - 1]));
        }
    }
    e
}

pub fn elementary_symmetric(ext: &ExtField, t: &[ExtElem], a: usize) -> Result<ExtElem> {
    if a > t.len() {
        return Err(Error::Precondition(format!("e_{a} of a {}-element list", t.len())));
    }
    Ok(elementary_symmetric_all(ext, t)[a])
}

/// One representative `a ≤ k/2` of each pair `{a, k-a}` in the forbidden set.
pub fn reduced_conditions(k: usize, p: u32) -> Vec<usize> {
    forbidden_set(k, p).into_iter().filter(|&a| a >= 1 && a <= k / 2).collect()
}

/// Number of orbits of `a ↦ k - a` on the forbidden set.
pub fn forbidden_orbit_count(k: usize, p: u32) -> usize {
    let fs = forbidden_set(k, p);
    fs.iter().filter(|&&a| a <= k - a).count()
}

/// Whether the Lucas block condition is a single equation, i.e. the
/// forbidden set is one `a ↦ k-a` orbit. The closed form
/// (`k = 5` for p = 2; `k ∈ {2p-3, 2p-2, 3p-2}` for odd p) is checked
/// against the orbit count.
pub fn single_equation_classify(p: u32, k: usize) -> Result<bool> {
    if k < 3 {
        return Err(Error::Precondition(format!("k = {k} < 3")));
    }
    let pk = p as usize;
    let closed = if p == 2 { k == 5 } else { k == 2 * pk - 3 || k == 2 * pk - 2 || k == 3 * pk - 2 };
    let direct = forbidden_orbit_count(k, p) == 1;
    if closed != direct {
        return Err(Error::CheckFailed(format!("classification disagrees with orbit count at p = {p}, k = {k}")));
    }
    Ok(direct)
}

/// `T` is a Lucas block iff `e_a(T) = 0` on the reduced forbidden indices.
pub fn unit_block_test_lucas(ctx: &CayleyCtx, t: &UnitBlock, k: usize) -> Result<bool> {
    if t.len() != k {
        return Err(Error::DegreeMismatch { expected: k, got: t.len() });
    }
    let e = elementary_symmetric_all(&ctx.ext, &t.0);
    Ok(reduced_conditions(k, ctx.field.p()).into_iter().all(|a| e[a] == ExtElem::ZERO))
}

/// `e_{k-a}(T) = e_k(T) · e_a(T)^q` for every a.
pub fn conjugate_symmetry_holds(ext: &ExtField, t: &[ExtElem]) -> bool {
    let e = elementary_symmetric_all(ext, t);
    let k = t.len();
    (0..=k).all(|a| e[k - a] == ext.mul(e[k], ext.frobenius(e[a])))
}

/// Condition rows (one per forbidden index) describing the Lucas subspace
/// after the change of variables, which leaves it unchanged.
pub fn lucas_conditions(k: usize, p: u32) -> Vec<Vec<ExtElem>> {
    forbidden_set(k, p)
        .into_iter()
        .map(|a| {
            let mut row = vec![ExtElem::ZERO; k + 1];
            row[a] = ExtElem::ONE;
            row
        })
        .collect()
}

fn poly_mul(ext: &ExtField, a: &[ExtElem], b: &[ExtElem]) -> Vec<ExtElem> {
    let mut out = vec![ExtElem::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ext.add(out[i + j], ext.mul(x, y));
        }
    }
    out
}

/// `f(ξ^q U - ξ V, U - V)` for a form over F_q.
pub fn transform_form(ctx: &CayleyCtx, coeffs: &[Elem]) -> Vec<ExtElem> {
    let ext = &ctx.ext;
    let k = coeffs.len() - 1;
    let l1 = [ext.frobenius(ctx.xi), ext.neg(ctx.xi)];
    let l2 = [ExtElem::ONE, ext.neg(ExtElem::ONE)];
    let pow = |l: &[ExtElem; 2]| {
        let mut v = vec![vec![ExtElem::ONE]];
        for j in 1..=k {
            let next = poly_mul(ext, &v[j - 1], l);
            v.push(next);
        }
        v
    };
    let p1 = pow(&l1);
    let p2 = pow(&l2);
    let mut out = vec![ExtElem::ZERO; k + 1];
    for (i, &a) in coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let term = poly_mul(ext, &p1[k - i], &p2[i]);
        let a = ext.embed(a);
        for (o, t) in out.iter_mut().zip(term) {
            *o = ext.add(*o, ext.mul(a, t));
        }
    }
    out
}

/// Rows λ with `W̃ = {c : Σ λ_a c_a = 0}`, where W̃ is the F_{q²}-span of
/// the transformed basis of `w`.
pub fn transformed_conditions(ctx: &CayleyCtx, w: &Subspace) -> Vec<Vec<ExtElem>> {
    let k = w.degree();
    let rows: Vec<Vec<ExtElem>> = w.rows().iter().map(|f| transform_form(ctx, f.coeffs())).collect();
    let ech = linalg::rref(&ctx.ext, rows, k + 1);
    linalg::kernel(&ctx.ext, &ech)
}

/// All k-subsets `T ⊂ U_{q+1}` with `Σ_a (-1)^a λ_{r,a} e_a(T) = 0` for every
/// row. Subsets are grown to size k-1 with their symmetric functions kept
/// incrementally; each condition is linear in the last point `u` because
/// `e_a(T' ∪ {u}) = e_a(T') + u·e_{a-1}(T')`, so u is solved for directly.
pub fn blocks_from_linear_conditions(ctx: &CayleyCtx, k: usize, conditions: &[Vec<ExtElem>]) -> Result<Vec<UnitBlock>> {
    if let Some(r) = conditions.iter().find(|r| r.len() != k + 1) {
        return Err(Error::DegreeMismatch { expected: k + 1, got: r.len() });
    }
    let n = ctx.unit.len();
    if k == 0 || k > n {
        return Err(Error::BlockSizeOutOfRange { k, v: n });
    }
    let ext = &ctx.ext;
    let signed: Vec<Vec<ExtElem>> = conditions
        .iter()
        .map(|r| r.iter().enumerate().map(|(a, &l)| if a % 2 == 1 { ext.neg(l) } else { l }).collect())
        .collect();
    let mut init = vec![ExtElem::ZERO; k];
    init[0] = ExtElem::ONE;
    let extend = |e: &Vec<ExtElem>, i: usize| {
        let u = ctx.unit[i];
        let mut next = e.clone();
        for a in (1..k).rev() {
            next[a] = ext.add(next[a], ext.mul(u, next[a - 1]));
        }
        Some(next)
    };
    let leaf = |chosen: &[usize], e: &Vec<ExtElem>| -> Option<Vec<Vec<usize>>> {
        let start = chosen.last().map_or(0, |&x| x + 1);
        // each condition reads A + u·B = 0
        let mut forced: Option<ExtElem> = None;
        let mut pending: Vec<(ExtElem, ExtElem)> = Vec::new();
        for row in &signed {
            let a_part = (0..k).fold(ExtElem::ZERO, |acc, a| ext.add(acc, ext.mul(row[a], e[a])));
            let b_part = (1..=k).fold(ExtElem::ZERO, |acc, a| ext.add(acc, ext.mul(row[a], e[a - 1])));
            if b_part == ExtElem::ZERO {
                if a_part != ExtElem::ZERO {
                    return None;
                }
            } else if forced.is_none() {
                forced = Some(ext.neg(ext.div(a_part, b_part).expect("nonzero")));
            } else {
                pending.push((a_part, b_part));
            }
        }
        match forced {
            None => Some((start..n).map(|j| extend_idx(chosen, j)).collect()),
            Some(u) => {
                let j = ctx.unit_index(u)?;
                if j < start || pending.iter().any(|&(a, b)| ext.add(a, ext.mul(u, b)) != ExtElem::ZERO) {
                    return None;
                }
                Some(vec![extend_idx(chosen, j)])
            }
        }
    };
    let found = par_subsets(n, k - 1, init, &extend, &leaf);
    let mut out: Vec<UnitBlock> = found.into_iter().flatten().map(|idx| ctx.unit_block_from_indices(&idx)).collect();
    out.sort();
    Ok(out)
}

fn extend_idx(chosen: &[usize], j: usize) -> Vec<usize> {
    let mut v = chosen.to_vec();
    v.push(j);
    v
}

/// Result of comparing κ(B_W) with the family enumerated on the unit circle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub field: String,
    pub k: usize,
    pub p1_blocks: usize,
    pub unit_blocks: usize,
    pub equal: bool,
    /// A block present on one side only.
    pub witness: Option<UnitBlock>,
}

/// Checks `κ(B_W) = B̃_W`, with B̃_W enumerated independently on the unit
/// circle from the Lucas conditions (or the transformed conditions for a
/// general W).
pub fn model_equivalence(ctx: &CayleyCtx, w: &Subspace, opts: &EnumOptions) -> Result<EquivalenceReport> {
    let field = &ctx.field;
    let k = w.degree();
    let family = designs::enumerate_blocks(field, w, Method::Orbit, opts)?;
    let conditions =
        if *w == Subspace::lucas(field, k) { lucas_conditions(k, field.p()) } else { transformed_conditions(ctx, w) };
    let needed = binomial(ctx.unit.len() as u64, k as u64 - 1);
    if needed > opts.cap {
        return Err(Error::CapExceeded { needed, cap: opts.cap });
    }
    let unit_side: HashSet<UnitBlock> = blocks_from_linear_conditions(ctx, k, &conditions)?.into_iter().collect();
    let mapped: HashSet<UnitBlock> = family.blocks().iter().map(|b| ctx.kappa_block(b)).collect();
    let mut witness: Option<UnitBlock> = mapped.symmetric_difference(&unit_side).min().cloned();
    if witness.is_none() {
        // forward inclusion through the direct Lucas test as well
        if conditions == lucas_conditions(k, field.p()) {
            for t in &mapped {
                if !unit_block_test_lucas(ctx, t, k)? {
                    witness = Some(t.clone());
                    break;
                }
            }
        }
    }
    Ok(EquivalenceReport {
        field: field.spec(),
        k,
        p1_blocks: family.len(),
        unit_blocks: unit_side.len(),
        equal: witness.is_none(),
        witness,
    })
}

/// Membership check for one five-point set in `U_{q+1} \ {1}`:
/// `e_2(y_1, …, y_5, 1, 1) ≠ 0`.
pub fn aux_e2_check(ctx: &CayleyCtx, ys: &[ExtElem]) -> Result<bool> {
    if ctx.field.p() != 3 {
        return Err(Error::Precondition("characteristic must be 3".into()));
    }
    if ys.len() != 5 {
        return Err(Error::Precondition(format!("expected 5 points, got {}", ys.len())));
    }
    if ys.contains(&ExtElem::ONE) {
        return Err(Error::Precondition("points must differ from 1".into()));
    }
    let block = UnitBlock::new(ctx, ys.to_vec())?;
    let mut list = block.0;
    list.extend([ExtElem::ONE, ExtElem::ONE]);
    Ok(elementary_symmetric(&ctx.ext, &list, 2)? != ExtElem::ZERO)
}

/// How many subsets to test in [`aux_e2_nonvanishing`].
#[derive(Clone, Copy, Debug)]
pub enum Coverage {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
}

/// Searches five-subsets of `U_{q+1} \ {1}` for a vanishing
/// `e_2(y_1, …, y_5, 1, 1)`; returns the first counterexample, if any.
pub fn aux_e2_nonvanishing(ctx: &CayleyCtx, coverage: Coverage) -> Result<Option<Vec<ExtElem>>> {
    if ctx.field.p() != 3 {
        return Err(Error::Precondition("characteristic must be 3".into()));
    }
    let rest: Vec<ExtElem> = ctx.unit.iter().copied().filter(|&u| u != ExtElem::ONE).collect();
    if rest.len() < 5 {
        return Ok(None);
    }
    match coverage {
        Coverage::Exhaustive => {
            let ext = &ctx.ext;
            let mut init = vec![ExtElem::ZERO; 6];
            init[0] = ExtElem::ONE;
            let extend = |e: &Vec<ExtElem>, i: usize| {
                let mut next = e.clone();
                for a in (1..6).rev() {
                    next[a] = ext.add(next[a], ext.mul(rest[i], next[a - 1]));
                }
                Some(next)
            };
            // e_2(Y ∪ {1, 1}) = e_2(Y) + 2 e_1(Y) + 1
            let two = ext.embed(ctx.field.from_int(2));
            let leaf = |c: &[usize], e: &Vec<ExtElem>| {
                let v = ext.add(ext.add(e[2], ext.mul(two, e[1])), ExtElem::ONE);
                (v == ExtElem::ZERO).then(|| c.iter().map(|&i| rest[i]).collect::<Vec<_>>())
            };
            Ok(par_subsets(rest.len(), 5, init, &extend, &leaf).into_iter().next())
        }
        Coverage::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let ys: Vec<ExtElem> = sample(&mut rng, rest.len(), 5).into_iter().map(|i| rest[i]).collect();
                if !aux_e2_check(ctx, &ys)? {
                    return Ok(Some(ys));
                }
            }
            Ok(None)
        }
    }
}

/// The six-subsets `A ⊂ U_{q+1}` with `e_4(A) e_2(A) = e_5(A) e_1(A)`.
pub fn six_subset_family(ctx: &CayleyCtx) -> Result<Vec<UnitBlock>> {
    if ctx.field.p() != 3 {
        return Err(Error::Precondition("characteristic must be 3".into()));
    }
    let ext = &ctx.ext;
    let mut init = vec![ExtElem::ZERO; 7];
    init[0] = ExtElem::ONE;
    let extend = |e: &Vec<ExtElem>, i: usize| {
        let u = ctx.unit[i];
        let mut next = e.clone();
        for a in (1..7).rev() {
            next[a] = ext.add(next[a], ext.mul(u, next[a - 1]));
        }
        Some(next)
    };
    let leaf = |c: &[usize], e: &Vec<ExtElem>| {
        (ext.mul(e[4], e[2]) == ext.mul(e[5], e[1])).then(|| ctx.unit_block_from_indices(c))
    };
    Ok(par_subsets(ctx.unit.len(), 6, init, &extend, &leaf))
}

/// `φ(B, x) = B \ {x}`.
pub fn phi(b: &UnitBlock, x: ExtElem) -> Result<UnitBlock> {
    if !b.0.contains(&x) {
        return Err(Error::Precondition(format!("{x} is not in the block")));
    }
    Ok(UnitBlock(b.0.iter().copied().filter(|&y| y != x).collect()))
}

/// Inverse of φ: `x = -e_2(A)/e_1(A)` and `B = A ∪ {x}`.
pub fn phi_inverse(ctx: &CayleyCtx, a: &UnitBlock) -> Result<(UnitBlock, ExtElem)> {
    let ext = &ctx.ext;
    let e = elementary_symmetric_all(ext, &a.0);
    let x = ext.neg(ext.div(e[2], e[1]).map_err(|_| Error::CheckFailed("e_1(A) = 0".into()))?);
    let mut b = a.0.clone();
    b.push(x);
    Ok((UnitBlock::new(ctx, b)?, x))
}

/// Summary of the six-subset correspondence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SixSetReport {
    pub field: String,
    pub six_sets: usize,
    pub w7_blocks: usize,
    pub factor_seven: bool,
    pub bijection: bool,
    pub design: DesignReport,
}

/// Builds the six-subset family and checks it against the degree-7 Lucas
/// family: `|A| = 7 |B̃|`, φ is a bijection with the stated inverse, and A
/// is a 3-design.
pub fn six_subset_report(ctx: &CayleyCtx, opts: &EnumOptions) -> Result<SixSetReport> {
    let field = &ctx.field;
    let fam6 = six_subset_family(ctx)?;
    let w7: BlockFamily = designs::enumerate_blocks(field, &Subspace::lucas(field, 7), Method::Orbit, opts)?;
    let unit7: Vec<UnitBlock> = w7.blocks().iter().map(|b| ctx.kappa_block(b)).collect();
    let set6: HashSet<&UnitBlock> = fam6.iter().collect();
    let mut images: HashSet<UnitBlock> = HashSet::new();
    let mut bijection = true;
    for b in &unit7 {
        for &x in b.elems() {
            let a = phi(b, x)?;
            bijection &= set6.contains(&a) && phi_inverse(ctx, &a)? == (b.clone(), x);
            images.insert(a);
        }
    }
    bijection &= images.len() == fam6.len();
    let idx: Vec<Vec<usize>> = fam6.iter().map(|a| ctx.unit_indices(a)).collect();
    let design = designs::verify_index_design(ctx.unit.len(), 6, 3, &idx)?;
    Ok(SixSetReport {
        field: field.spec(),
        six_sets: fam6.len(),
        w7_blocks: w7.len(),
        factor_seven: fam6.len() == 7 * w7.len(),
        bijection,
        design,
    })
}

//! Block families `B_W = {S : F_S ∈ W}` on the projective line: membership,
//! the stabilized λ-count at `{∞, 0, 1}`, full enumeration (brute force or
//! PGL₂ orbits), t-design verification, and the explicit constructions of
//! blocks from subgroups, subfields and carry-free unions.

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::polyspace::{self, carry_free, HomPoly, Subspace};
use crate::projline::{pgl2_iter, points, Pgl2Element, ProjPoint};
use crate::subsets::{binomial, for_each_subset, par_subsets, BinomTable};

/// Default bound on enumerated subsets or blocks.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// Number of random group elements used to confirm invariance before
/// trusting orbit expansion.
pub const INVARIANCE_SAMPLE: usize = 32;

/// A set of distinct points of P¹, kept sorted. Blocks compare
/// colexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Block(Vec<ProjPoint>);

impl Block {
    pub fn new(mut points: Vec<ProjPoint>) -> Result<Block> {
        points.sort();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoints);
        }
        Ok(Block(points))
    }

    /// From strictly increasing point indices.
    pub fn from_indices(idx: &[usize], q: u32) -> Block {
        Block(idx.iter().map(|&i| ProjPoint::from_index(i, q)).collect())
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: ProjPoint) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn indices(&self, q: u32) -> Vec<usize> {
        self.0.iter().map(|x| x.index(q)).collect()
    }

    pub fn image(&self, field: &Field, g: &Pgl2Element) -> Block {
        Block::new(self.0.iter().map(|&x| g.act(field, x)).collect()).expect("group elements act bijectively")
    }

    pub fn is_disjoint(&self, other: &Block) -> bool {
        self.0.iter().all(|&x| !other.contains(x))
    }
}

impl Ord for Block {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// How a family was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Brute,
    Orbit,
    Constructed,
    Complement,
    CodeSupport,
}

/// A deduplicated, colex-sorted family of k-subsets of P¹(F_q).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct BlockFamily {
    field: Field,
    k: usize,
    blocks: Vec<Block>,
    provenance: Provenance,
}

#[derive(Clone, Serialize, Deserialize)]
struct FamilyRepr {
    field: String,
    k: usize,
    blocks: Vec<Vec<ProjPoint>>,
    provenance: Provenance,
}

impl From<BlockFamily> for FamilyRepr {
    fn from(f: BlockFamily) -> FamilyRepr {
        FamilyRepr {
            field: f.field.spec(),
            k: f.k,
            blocks: f.blocks.into_iter().map(|b| b.0).collect(),
            provenance: f.provenance,
        }
    }
}

impl TryFrom<FamilyRepr> for BlockFamily {
    type Error = Error;

    fn try_from(r: FamilyRepr) -> Result<BlockFamily> {
        let field = Field::from_spec(&r.field)?;
        let n = r.blocks.len();
        let blocks = r.blocks.into_iter().map(Block::new).collect::<Result<Vec<_>>>()?;
        let family = BlockFamily::new(field, r.k, blocks, r.provenance)?;
        if family.blocks.len() != n {
            return Err(Error::Malformed("repeated block".into()));
        }
        Ok(family)
    }
}

impl BlockFamily {
    /// Validates sizes and point ranges, then sorts and removes duplicates.
    pub fn new(field: Field, k: usize, mut blocks: Vec<Block>, provenance: Provenance) -> Result<BlockFamily> {
        let q = field.q();
        for b in &blocks {
            if b.len() != k {
                return Err(Error::Malformed(format!("block of size {} in a family with k = {k}", b.len())));
            }
            if b.0.iter().any(|x| x.finite().is_some_and(|e| e.0 >= q)) {
                return Err(Error::Malformed("point outside P1(F_q)".into()));
            }
        }
        blocks.sort();
        blocks.dedup();
        Ok(BlockFamily { field, k, blocks, provenance })
    }

    fn from_index_sets(field: &Field, k: usize, sets: Vec<Vec<u32>>, provenance: Provenance) -> BlockFamily {
        let q = field.q();
        let mut blocks: Vec<Block> =
            sets.into_iter().map(|s| Block(s.into_iter().map(|i| ProjPoint::from_index(i as usize, q)).collect())).collect();
        blocks.sort();
        blocks.dedup();
        BlockFamily { field: field.clone(), k, blocks, provenance }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn v(&self) -> usize {
        self.field.q() as usize + 1
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn contains(&self, b: &Block) -> bool {
        self.blocks.binary_search(b).is_ok()
    }

    pub fn index_blocks(&self) -> Vec<Vec<usize>> {
        let q = self.field.q();
        self.blocks.iter().map(|b| b.indices(q)).collect()
    }

    /// True iff `g` maps the family onto itself.
    pub fn is_invariant_under(&self, g: &Pgl2Element) -> bool {
        self.blocks.iter().all(|b| self.contains(&b.image(&self.field, g)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<BlockFamily> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }
}

/// Verified `t-(v, k, λ)` parameters of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignReport {
    pub t: usize,
    pub v: usize,
    pub k: usize,
    pub lambda: Option<u64>,
    pub b: u64,
    pub is_design: bool,
    pub steiner: bool,
}

/// Multiplies a form by the linear factor of `x`: `X - xY`, or `Y` at ∞.
fn mul_linear(field: &Field, poly: &[Elem], x: ProjPoint) -> Vec<Elem> {
    let mut out = vec![Elem::ZERO; poly.len() + 1];
    match x {
        ProjPoint::Finite(t) => {
            let nt = field.neg(t);
            for (i, &a) in poly.iter().enumerate() {
                out[i] = field.add(out[i], a);
                out[i + 1] = field.mul(nt, a);
            }
        }
        ProjPoint::Infinity => out[1..].copy_from_slice(poly),
    }
    out
}

/// `F_S = Π_{t ∈ S} (X - tY)`, with the factor `Y` for `t = ∞`.
pub fn f_s(field: &Field, s: &[ProjPoint]) -> Result<HomPoly> {
    let mut sorted = s.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints);
    }
    let coeffs = s.iter().fold(vec![Elem::ONE], |acc, &x| mul_linear(field, &acc, x));
    Ok(HomPoly::new(coeffs))
}

/// `F_S ∈ W`.
pub fn block_membership(field: &Field, w: &Subspace, s: &Block) -> Result<bool> {
    if s.len() != w.degree() {
        return Err(Error::DegreeMismatch { expected: w.degree(), got: s.len() });
    }
    w.contains(field, &f_s(field, s.points())?)
}

fn check_block_size(field: &Field, k: usize) -> Result<()> {
    let v = field.q() as usize + 1;
    if k < 3 || k > v {
        return Err(Error::BlockSizeOutOfRange { k, v });
    }
    Ok(())
}

fn check_cap(needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    Ok(())
}

/// Blocks of `B_W` containing `{∞, 0, 1}`, found by extending the fixed
/// triple with every (k-3)-subset of the other q-2 points.
fn stabilized_search<T: Send>(
    field: &Field,
    w: &Subspace,
    cap: u128,
    leaf: &(dyn Fn(&[usize]) -> T + Sync),
) -> Result<Vec<T>> {
    let k = w.degree();
    check_block_size(field, k)?;
    let q = field.q() as usize;
    check_cap(binomial(q as u64 - 2, k as u64 - 3), cap)?;
    let base = f_s(field, &[ProjPoint::Infinity, ProjPoint::Finite(Elem::ZERO), ProjPoint::Finite(Elem::ONE)])?;
    // candidate i stands for the finite point with code i + 2
    let extend = |s: &Vec<Elem>, i: usize| Some(mul_linear(field, s, ProjPoint::Finite(Elem(i as u32 + 2))));
    let test = |chosen: &[usize], s: &Vec<Elem>| w.satisfies_checks(field, s).then(|| leaf(chosen));
    Ok(par_subsets(q - 2, k - 3, base.into_coeffs(), &extend, &test))
}

/// λ computed as the number of blocks through `{∞, 0, 1}`.
pub fn lambda_count(field: &Field, w: &Subspace) -> Result<u64> {
    lambda_count_capped(field, w, DEFAULT_CAP)
}

pub fn lambda_count_capped(field: &Field, w: &Subspace, cap: u128) -> Result<u64> {
    Ok(stabilized_search(field, w, cap, &|_| ())?.len() as u64)
}

/// The blocks of `B_W` that contain `{∞, 0, 1}`, colex-sorted.
pub fn base_blocks(field: &Field, w: &Subspace, cap: u128) -> Result<Vec<Block>> {
    let mut out = stabilized_search(field, w, cap, &|chosen| {
        let mut pts: Vec<ProjPoint> = vec![ProjPoint::Finite(Elem::ZERO), ProjPoint::Finite(Elem::ONE)];
        pts.extend(chosen.iter().map(|&i| ProjPoint::Finite(Elem(i as u32 + 2))));
        pts.push(ProjPoint::Infinity);
        Block(pts)
    })?;
    out.sort();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    Orbit,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    pub cap: u128,
    pub seed: u64,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { cap: DEFAULT_CAP, seed: polyspace::DEFAULT_SEED }
    }
}

/// Enumerates `B_W` for the degree of `w`.
pub fn enumerate_blocks(field: &Field, w: &Subspace, method: Method, opts: &EnumOptions) -> Result<BlockFamily> {
    let k = w.degree();
    check_block_size(field, k)?;
    match method {
        Method::Brute => enumerate_brute(field, w, opts.cap),
        Method::Orbit => enumerate_orbit(field, w, opts),
    }
}

fn enumerate_brute(field: &Field, w: &Subspace, cap: u128) -> Result<BlockFamily> {
    let k = w.degree();
    let q = field.q();
    let v = q as usize + 1;
    check_cap(binomial(v as u64, k as u64), cap)?;
    let extend = |s: &Vec<Elem>, i: usize| Some(mul_linear(field, s, ProjPoint::from_index(i, q)));
    let test = |chosen: &[usize], s: &Vec<Elem>| {
        w.satisfies_checks(field, s).then(|| chosen.iter().map(|&i| i as u32).collect::<Vec<u32>>())
    };
    let sets = par_subsets(v, k, vec![Elem::ONE], &extend, &test);
    Ok(BlockFamily::from_index_sets(field, k, sets, Provenance::Brute))
}

fn enumerate_orbit(field: &Field, w: &Subspace, opts: &EnumOptions) -> Result<BlockFamily> {
    if let Err(wit) = polyspace::check_gl2_invariance(field, w, INVARIANCE_SAMPLE, opts.seed) {
        return Err(Error::NotInvariant(format!("{:?} maps a basis row outside W", wit.g)));
    }
    let k = w.degree();
    let q = field.q();
    let v = q as u64 + 1;
    let base = base_blocks(field, w, opts.cap)?;
    // b·C(k,3) = λ·C(v,3)
    let expected = base.len() as u128 * binomial(v, 3) / binomial(k as u64, 3);
    check_cap(expected, opts.cap)?;

    let group: Vec<Pgl2Element> = pgl2_iter(field).collect();
    let is_base = |s: &[u32]| s.binary_search(&0).is_ok() && s.binary_search(&1).is_ok() && s.last() == Some(&q);
    let mut uncovered: HashSet<Vec<u32>> =
        base.iter().map(|b| b.indices(q).into_iter().map(|i| i as u32).collect()).collect();
    let mut family: HashSet<Vec<u32>> = HashSet::new();
    for b in &base {
        let key: Vec<u32> = b.indices(q).into_iter().map(|i| i as u32).collect();
        if !uncovered.contains(&key) {
            continue;
        }
        let images: Vec<Vec<u32>> = group
            .par_iter()
            .map(|g| {
                let mut img: Vec<u32> = b.points().iter().map(|&x| g.act(field, x).index(q) as u32).collect();
                img.sort_unstable();
                img
            })
            .collect();
        for img in images {
            if is_base(&img) {
                uncovered.remove(&img);
            }
            family.insert(img);
        }
        check_cap(family.len() as u128, opts.cap)?;
    }
    if family.len() as u128 != expected {
        return Err(Error::CheckFailed(format!(
            "orbit expansion produced {} blocks, λ-count predicts {expected}",
            family.len()
        )));
    }
    Ok(BlockFamily::from_index_sets(field, k, family.into_iter().collect(), Provenance::Orbit))
}

/// Tallies every t-subset of `0..v` over the blocks (each a strictly
/// increasing index list of length k).
pub fn verify_index_design(v: usize, k: usize, t: usize, blocks: &[Vec<usize>]) -> Result<DesignReport> {
    if t > k || k > v {
        return Err(Error::Precondition(format!("need t ≤ k ≤ v, got t = {t}, k = {k}, v = {v}")));
    }
    let slots = binomial(v as u64, t as u64);
    check_cap(slots, 1 << 28)?;
    let table = BinomTable::new(v, t);
    let mut sub_positions: Vec<Vec<usize>> = Vec::new();
    for_each_subset(k, t, |s| sub_positions.push(s.to_vec()));
    let mut tally = vec![0u64; slots as usize];
    let mut buf = vec![0usize; t];
    for blk in blocks {
        if blk.len() != k || blk.windows(2).any(|w| w[0] >= w[1]) || blk.last().is_some_and(|&x| x >= v) {
            return Err(Error::Malformed("block is not a sorted k-subset of the point set".into()));
        }
        for pos in &sub_positions {
            for (slot, &p) in buf.iter_mut().zip(pos) {
                *slot = blk[p];
            }
            tally[table.colex_rank(&buf) as usize] += 1;
        }
    }
    let b = blocks.len() as u64;
    let first = tally[0];
    let uniform = b > 0 && tally.iter().all(|&c| c == first);
    let lambda = uniform.then_some(first);
    let counts_ok = lambda.is_some_and(|l| b as u128 * binomial(k as u64, t as u64) == l as u128 * slots);
    let is_design = uniform && counts_ok;
    Ok(DesignReport { t, v, k, lambda, b, is_design, steiner: lambda == Some(1) })
}

pub fn verify_design(family: &BlockFamily, t: usize) -> Result<DesignReport> {
    verify_index_design(family.v(), family.k(), t, &family.index_blocks())
}

/// Each block replaced by its complement in P¹(F_q).
pub fn complement_family(family: &BlockFamily) -> Result<BlockFamily> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let v = family.v();
    let sets: Vec<Vec<u32>> = family
        .index_blocks()
        .into_iter()
        .map(|b| (0..v).filter(|i| b.binary_search(i).is_err()).map(|i| i as u32).collect())
        .collect();
    Ok(BlockFamily::from_index_sets(&family.field, v - family.k, sets, Provenance::Complement))
}

fn assert_lucas_member(field: &Field, b: &Block) -> Result<()> {
    let w = Subspace::lucas(field, b.len());
    if !block_membership(field, &w, b)? {
        return Err(Error::CheckFailed(format!("F_S is not in the Lucas subspace of degree {}", b.len())));
    }
    Ok(())
}

/// The order-d subgroup `H ⊂ F_q^×`, optionally with ∞, checked to lie in
/// `B_{W_d}` (resp. `B_{W_{d+1}}`) of the Lucas subspaces.
pub fn basic_block_subgroup(field: &Field, d: u64, with_infinity: bool) -> Result<Block> {
    let p = field.p() as u64;
    if d.is_multiple_of(p) {
        return Err(Error::Precondition(format!("p = {p} divides d = {d}")));
    }
    if with_infinity && (d + 1).is_multiple_of(p) {
        return Err(Error::Precondition(format!("p = {p} divides d + 1 = {}", d + 1)));
    }
    let h = field.mult_subgroup(d)?;
    let mut pts: Vec<ProjPoint> = h.into_iter().map(ProjPoint::Finite).collect();
    if with_infinity {
        pts.push(ProjPoint::Infinity);
    }
    let b = Block::new(pts)?;
    assert_lucas_member(field, &b)?;
    Ok(b)
}

/// `F_{p^m} ∪ {∞}`, a block of `B_{W_{p^m+1}}`.
pub fn basic_block_subfield(field: &Field, m: u32) -> Result<Block> {
    let sub = field.subfield(m)?;
    let mut pts: Vec<ProjPoint> = sub.into_iter().map(ProjPoint::Finite).collect();
    pts.push(ProjPoint::Infinity);
    let b = Block::new(pts)?;
    assert_lucas_member(field, &b)?;
    Ok(b)
}

/// Union of pairwise disjoint Lucas blocks whose sizes add without carries.
pub fn union_carry_free(field: &Field, blocks: &[Block]) -> Result<Block> {
    if blocks.is_empty() {
        return Err(Error::EmptyFamily);
    }
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            if !a.is_disjoint(b) {
                return Err(Error::Precondition("blocks overlap".into()));
            }
        }
    }
    let sizes: Vec<u64> = blocks.iter().map(|b| b.len() as u64).collect();
    if !carry_free(&sizes, field.p()) {
        return Err(Error::Precondition(format!("block sizes {sizes:?} carry in base {}", field.p())));
    }
    for b in blocks {
        let w = Subspace::lucas(field, b.len());
        if !block_membership(field, &w, b)? {
            return Err(Error::Precondition(format!("constituent of size {} is not a Lucas block", b.len())));
        }
    }
    let union = Block::new(blocks.iter().flat_map(|b| b.points().iter().copied()).collect())?;
    assert_lucas_member(field, &union)?;
    Ok(union)
}

/// Which construction produced a nonemptiness witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    Subgroup,
    SubgroupWithInfinity,
    Subfield,
    Search,
}

/// Outcome of deciding whether `B_{W_k}` (Lucas) is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Emptiness {
    EmptyPDivides,
    NonemptyWitness { block: Block, source: WitnessSource },
    ExhaustedEmpty,
}

fn ilog_exact(n: u64, p: u64) -> Option<u32> {
    let mut m = 0;
    let mut x = 1u64;
    while x < n {
        x = x.checked_mul(p)?;
        m += 1;
    }
    (x == n).then_some(m)
}

/// Decides emptiness of the Lucas family of degree k: `p | k` forces it,
/// subgroup and subfield constructions witness nonemptiness, and otherwise
/// the stabilized search settles it.
pub fn emptiness_oracle(field: &Field, k: usize, cap: u128) -> Result<Emptiness> {
    check_block_size(field, k)?;
    let p = field.p() as u64;
    let q = field.q() as u64;
    let k64 = k as u64;
    if k64.is_multiple_of(p) {
        return Ok(Emptiness::EmptyPDivides);
    }
    if let Some(m) = ilog_exact(k64 - 1, p) {
        if m >= 1 && field.e().is_multiple_of(m) {
            let block = basic_block_subfield(field, m)?;
            return Ok(Emptiness::NonemptyWitness { block, source: WitnessSource::Subfield });
        }
    }
    if (q - 1).is_multiple_of(k64) {
        let block = basic_block_subgroup(field, k64, false)?;
        return Ok(Emptiness::NonemptyWitness { block, source: WitnessSource::Subgroup });
    }
    if (q - 1).is_multiple_of(k64 - 1) && !(k64 - 1).is_multiple_of(p) {
        let block = basic_block_subgroup(field, k64 - 1, true)?;
        return Ok(Emptiness::NonemptyWitness { block, source: WitnessSource::SubgroupWithInfinity });
    }
    let w = Subspace::lucas(field, k);
    match base_blocks(field, &w, cap)?.into_iter().next() {
        Some(block) => Ok(Emptiness::NonemptyWitness { block, source: WitnessSource::Search }),
        None => Ok(Emptiness::ExhaustedEmpty),
    }
}

/// The Steiner system `S(3, p^m+1, q+1)` from the Lucas subspace of degree
/// `p^m + 1` when `m | e`, with its block count checked against
/// `q(q²-1) / (q₀(q₀²-1))`; when `m ∤ e` the family is checked to be empty.
pub fn steiner_q0_report(field: &Field, m: u32, opts: &EnumOptions) -> Result<DesignReport> {
    if m == 0 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let p = field.p() as u64;
    let q = field.q() as u64;
    let v = q as usize + 1;
    let q0 = p.checked_pow(m).ok_or_else(|| Error::Precondition("p^m overflows".into()))?;
    let k = (q0 + 1) as usize;
    let empty = DesignReport { t: 3, v, k, lambda: None, b: 0, is_design: false, steiner: false };
    if !field.e().is_multiple_of(m) {
        if k <= v {
            let lambda = lambda_count_capped(field, &Subspace::lucas(field, k), opts.cap)?;
            if lambda != 0 {
                return Err(Error::CheckFailed(format!("m ∤ e but λ = {lambda}")));
            }
        }
        return Ok(empty);
    }
    let family = enumerate_blocks(field, &Subspace::lucas(field, k), Method::Orbit, opts)?;
    let report = verify_design(&family, 3)?;
    let expected = q * (q * q - 1) / (q0 * (q0 * q0 - 1));
    if !report.steiner || report.b != expected {
        return Err(Error::CheckFailed(format!(
            "expected S(3, {k}, {v}) with {expected} blocks, got λ = {:?}, b = {}",
            report.lambda, report.b
        )));
    }
    Ok(report)
}

/// All points of P¹ as a block (the unique block when k = q+1).
pub fn whole_line(field: &Field) -> Block {
    Block(points(field))
}

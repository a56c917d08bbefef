//! Linear codes over F_q: the subcodes `C_W = Ev(W)` of projective
//! Reed–Solomon codes, duals, weight distributions (direct enumeration or the
//! MacWilliams transform), support designs, the monomial GL₂ action, and the
//! ternary Melas code.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{six_subset_family, CayleyCtx};
use crate::designs::{self, BlockFamily, DesignReport, EnumOptions, Method, Provenance};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::linalg::{self, Echelon};
use crate::polyspace::Subspace;
use crate::projline::{Matrix2, Pgl2Element, ProjPoint};
use crate::subsets::binomial;

/// Default cap on enumerated codewords (or scalar classes of codewords).
pub const DEFAULT_CODE_CAP: u128 = 100_000_000;

/// What the coordinate positions of a code stand for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coords {
    /// Points of P¹(F_q): finite points by code, then ∞.
    ProjectiveLine,
    /// Nonzero elements of an extension field, by code.
    MultiplicativeGroup,
    Generic,
}

/// A linear code given by a generator matrix in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    field: Field,
    n: usize,
    gen: Echelon<Elem>,
    coords: Coords,
}

impl LinearCode {
    pub fn new(field: &Field, n: usize, rows: Vec<Vec<Elem>>, coords: Coords) -> Result<LinearCode> {
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DegreeMismatch { expected: n, got: r.len() });
        }
        Ok(LinearCode { field: field.clone(), n, gen: linalg::rref(field, rows, n), coords })
    }

    /// The kernel of a parity-check matrix.
    pub fn from_parity_check(field: &Field, n: usize, checks: Vec<Vec<Elem>>, coords: Coords) -> Result<LinearCode> {
        let h = LinearCode::new(field, n, checks, coords)?;
        Ok(h.dual())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.gen.rank()
    }

    pub fn coords(&self) -> Coords {
        self.coords
    }

    pub fn rows(&self) -> &[Vec<Elem>] {
        &self.gen.rows
    }

    pub fn contains(&self, word: &[Elem]) -> bool {
        word.len() == self.n && linalg::in_row_space(&self.field, &self.gen, word)
    }

    pub fn encode(&self, msg: &[Elem]) -> Result<Vec<Elem>> {
        if msg.len() != self.dim() {
            return Err(Error::DegreeMismatch { expected: self.dim(), got: msg.len() });
        }
        let f = &self.field;
        let mut out = vec![Elem::ZERO; self.n];
        for (row, &c) in self.gen.rows.iter().zip(msg) {
            for (o, &x) in out.iter_mut().zip(row) {
                *o = f.add(*o, f.mul(c, x));
            }
        }
        Ok(out)
    }

    /// `C^⊥`, from the kernel of the generator matrix.
    pub fn dual(&self) -> LinearCode {
        let rows = linalg::kernel(&self.field, &self.gen);
        LinearCode { field: self.field.clone(), n: self.n, gen: linalg::rref(&self.field, rows, self.n), coords: self.coords }
    }

    fn q(&self) -> u128 {
        self.field.q() as u128
    }

    fn projective_classes(&self) -> u128 {
        let q = self.q();
        (q.pow(self.dim() as u32) - 1) / (q - 1)
    }
}

pub fn weight(word: &[Elem]) -> usize {
    word.iter().filter(|x| !x.is_zero()).count()
}

/// `C_W = Ev(W)` with coordinates in P¹ order.
pub fn code_from_subspace(field: &Field, w: &Subspace) -> Result<LinearCode> {
    let k = w.degree();
    if k > field.q() as usize {
        return Err(Error::Precondition(format!("k = {k} exceeds q = {}", field.q())));
    }
    if w.dim() == 0 {
        return Err(Error::Precondition("the subspace is zero".into()));
    }
    let rows = w.rows().iter().map(|f| f.ev_vector(field)).collect();
    LinearCode::new(field, field.q() as usize + 1, rows, Coords::ProjectiveLine)
}

/// The projective Reed–Solomon code `P_k`.
pub fn projective_rs(field: &Field, k: usize) -> Result<LinearCode> {
    code_from_subspace(field, &Subspace::full(field, k))
}

/// Visits codewords: every scalar class once (first nonzero message
/// coordinate equal to 1) when `projective`, otherwise every codeword. Work
/// is split across threads by the leading message coordinates and the
/// per-thread accumulators are merged with `merge`.
fn fold_codewords<T: Send>(
    code: &LinearCode,
    projective: bool,
    init: &(dyn Fn() -> T + Sync),
    visit: &(dyn Fn(&mut T, &[Elem]) + Sync),
    merge: fn(T, T) -> T,
) -> T {
    let f = &code.field;
    let q = f.q();
    let dim = code.dim();
    let n = code.n;
    let mults: Vec<Vec<Vec<Elem>>> = code
        .gen
        .rows
        .iter()
        .map(|row| (0..q).map(|c| row.iter().map(|&x| f.mul(Elem(c), x)).collect()).collect())
        .collect();
    // (base word, first free message coordinate)
    let mut tasks: Vec<(Vec<Elem>, usize)> = Vec::new();
    let mut seed = |base: Vec<Elem>, from: usize| {
        let depth = (dim - from).min(2);
        let mut prefixes = vec![(base, from)];
        for _ in 0..depth {
            prefixes = prefixes
                .into_iter()
                .flat_map(|(b, i)| {
                    let m = &mults[i];
                    (0..q as usize).map(move |c| (b.iter().zip(&m[c]).map(|(&x, &y)| f.add(x, y)).collect(), i + 1))
                })
                .collect();
        }
        tasks.extend(prefixes);
    };
    if projective {
        for j in 0..dim {
            seed(code.gen.rows[j].clone(), j + 1);
        }
    } else {
        seed(vec![Elem::ZERO; n], 0);
    }
    tasks
        .into_par_iter()
        .map(|(base, from)| {
            let mut acc = init();
            let depth = dim - from;
            let mut levels = vec![base; depth + 1];
            walk(f, &mults, from, 0, depth, &mut levels, &mut |w| visit(&mut acc, w));
            acc
        })
        .reduce(init, merge)
}

fn walk(
    f: &Field,
    mults: &[Vec<Vec<Elem>>],
    from: usize,
    level: usize,
    depth: usize,
    levels: &mut [Vec<Elem>],
    visit: &mut dyn FnMut(&[Elem]),
) {
    if level == depth {
        visit(&levels[level]);
        return;
    }
    let row = &mults[from + level];
    for m in row {
        let (lo, hi) = levels.split_at_mut(level + 1);
        for ((o, &x), &y) in hi[0].iter_mut().zip(&lo[level]).zip(m) {
            *o = f.add(x, y);
        }
        walk(f, mults, from, level + 1, depth, levels, visit);
    }
}

/// Exact minimum distance by exhausting scalar classes of codewords.
pub fn min_distance(code: &LinearCode, cap: u128) -> Result<usize> {
    if code.dim() == 0 {
        return Err(Error::Precondition("the zero code has no minimum distance".into()));
    }
    let needed = code.projective_classes();
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    Ok(fold_codewords(code, true, &|| usize::MAX, &|m, w| *m = (*m).min(weight(w)), std::cmp::min))
}

/// Weight distribution `A_0, …, A_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDist {
    pub n: usize,
    pub dim: usize,
    pub counts: Vec<u128>,
}

impl WeightDist {
    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    /// Smallest nonzero weight present, if any.
    pub fn min_weight(&self) -> Option<usize> {
        (1..=self.n).find(|&i| self.counts[i] > 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Direct,
    ViaDual,
    /// Whichever of the two enumerates fewer words.
    Auto,
}

fn direct_distribution(code: &LinearCode) -> WeightDist {
    let n = code.n;
    let mut counts: Vec<u128> = if code.dim() == 0 {
        vec![0; n + 1]
    } else {
        let per_class: Vec<u64> = fold_codewords(
            code,
            true,
            &|| vec![0u64; n + 1],
            &|c, w| c[weight(w)] += 1,
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
        per_class.into_iter().map(|c| c as u128 * (code.q() - 1)).collect()
    };
    counts[0] += 1;
    WeightDist { n, dim: code.dim(), counts }
}

pub fn weight_distribution(code: &LinearCode, strategy: Strategy, cap: u128) -> Result<WeightDist> {
    let q = code.q();
    let primal = q.checked_pow(code.dim() as u32).unwrap_or(u128::MAX);
    let dual_size = q.checked_pow((code.n - code.dim()) as u32).unwrap_or(u128::MAX);
    let strategy = match strategy {
        Strategy::Auto if primal <= dual_size => Strategy::Direct,
        Strategy::Auto => Strategy::ViaDual,
        s => s,
    };
    match strategy {
        Strategy::Direct => {
            if primal > cap {
                return Err(Error::CapExceeded { needed: primal, cap });
            }
            Ok(direct_distribution(code))
        }
        _ => {
            if dual_size > cap {
                return Err(Error::CapExceeded { needed: dual_size, cap });
            }
            macwilliams(&direct_distribution(&code.dual()), q as u64)
        }
    }
}

fn big_binomials(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![BigInt::one(); i + 1];
        for j in 1..i {
            row[j] = &rows[i - 1][j - 1] + &rows[i - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// Krawtchouk value `K_j(i) = Σ_s (-1)^s (q-1)^{j-s} C(i,s) C(n-i,j-s)`.
fn krawtchouk(binom: &[Vec<BigInt>], n: usize, q: u64, j: usize, i: usize) -> BigInt {
    let qm1 = BigInt::from(q - 1);
    let c = |a: usize, b: usize| if b > a { BigInt::zero() } else { binom[a][b].clone() };
    (0..=j).fold(BigInt::zero(), |acc, s| {
        let term = qm1.pow((j - s) as u32) * c(i, s) * c(n - i, j - s);
        if s % 2 == 1 {
            acc - term
        } else {
            acc + term
        }
    })
}

/// Weight distribution of the dual code, exactly:
/// `A^⊥_j = q^{-dim} Σ_i A_i K_j(i)`.
pub fn macwilliams_big(dist: &WeightDist, q: u64) -> Result<Vec<BigInt>> {
    let n = dist.n;
    let binom = big_binomials(n);
    let size = BigInt::from(q).pow(dist.dim as u32);
    (0..=n)
        .map(|j| {
            let s = (0..=n)
                .filter(|&i| dist.counts[i] > 0)
                .fold(BigInt::zero(), |acc, i| acc + BigInt::from(dist.counts[i]) * krawtchouk(&binom, n, q, j, i));
            if !(&s % &size).is_zero() || s.is_negative() {
                return Err(Error::CheckFailed(format!("MacWilliams transform is not integral at weight {j}")));
            }
            Ok(s / &size)
        })
        .collect()
}

pub fn macwilliams(dist: &WeightDist, q: u64) -> Result<WeightDist> {
    let counts = macwilliams_big(dist, q)?
        .into_iter()
        .map(|c| c.to_u128().ok_or_else(|| Error::Precondition("weight count exceeds 128 bits".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightDist { n: dist.n, dim: dist.n - dist.dim, counts })
}

/// A nonzero word of `C^⊥` supported on the first `dim + 1` coordinates,
/// so of weight at most `dim + 1`.
pub fn low_weight_dual_word(code: &LinearCode) -> Result<Vec<Elem>> {
    let m = code.dim() + 1;
    if m > code.n {
        return Err(Error::Precondition("the code is the whole space".into()));
    }
    let f = &code.field;
    let cols: Vec<Vec<Elem>> = code.gen.rows.iter().map(|r| r[..m].to_vec()).collect();
    let ech = linalg::rref(f, cols, m);
    let v = linalg::kernel(f, &ech).into_iter().next().expect("more columns than rows");
    let mut word = v;
    word.resize(code.n, Elem::ZERO);
    Ok(word)
}

/// Supports of the weight-w codewords and the t-design report on them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportDesign {
    pub w: usize,
    pub supports: Vec<Vec<usize>>,
    pub report: DesignReport,
}

impl SupportDesign {
    /// The supports as a block family on P¹, for codes with P¹ coordinates.
    pub fn to_family(&self, field: &Field) -> Result<BlockFamily> {
        let q = field.q();
        let blocks = self.supports.iter().map(|s| designs::Block::from_indices(s, q)).collect();
        BlockFamily::new(field.clone(), self.w, blocks, Provenance::CodeSupport)
    }
}

pub fn support_design(code: &LinearCode, w: usize, t: usize, cap: u128) -> Result<SupportDesign> {
    if w < 3 {
        return Err(Error::Precondition(format!("weight {w} < 3")));
    }
    if code.dim() == 0 {
        return Err(Error::Precondition("the zero code has no supports".into()));
    }
    let needed = code.projective_classes();
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let mut supports: Vec<Vec<usize>> = fold_codewords(
        code,
        true,
        &Vec::new,
        &|acc, word| {
            if weight(word) == w {
                acc.push(word.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i).collect());
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    supports.sort();
    supports.dedup();
    let report = designs::verify_index_design(code.n, w, t, &supports)?;
    Ok(SupportDesign { w, supports, report })
}

/// Design formed by the minimum-weight supports of `C_W`, obtained as the
/// complements of the blocks of `B_W` and, when the code is small enough,
/// cross-checked against the weight-(q+1-k) codewords themselves.
pub fn min_weight_support_design(field: &Field, w: &Subspace, opts: &EnumOptions) -> Result<DesignReport> {
    let family = designs::enumerate_blocks(field, w, Method::Orbit, opts)?;
    let comp = designs::complement_family(&family)?;
    let report = designs::verify_design(&comp, 3)?;
    let code = code_from_subspace(field, w)?;
    if code.projective_classes() <= opts.cap {
        let direct = support_design(&code, comp.k(), 3, opts.cap)?;
        let mut expected = comp.index_blocks();
        expected.sort();
        if direct.supports != expected {
            return Err(Error::CheckFailed("minimum-weight supports differ from the block complements".into()));
        }
    }
    Ok(report)
}

/// For each coordinate x: the source coordinate `g⁻¹·x` and the scalar of
/// the monomial action of `g` on `P_k`.
pub fn monomial_scalars(field: &Field, g: &Matrix2, k: usize) -> Result<Vec<(usize, Elem)>> {
    let pg = Pgl2Element::new(field, *g)?;
    let inv = pg.inverse(field);
    let q = field.q();
    let pw = |x: Elem| field.pow(x, k as i64).expect("nonnegative exponent");
    let Matrix2 { a, b, c, d } = *g;
    Ok(crate::projline::points(field)
        .into_iter()
        .map(|x| {
            let src = inv.act(field, x);
            let scalar = match (x, src) {
                (ProjPoint::Finite(x), ProjPoint::Finite(_)) => pw(field.sub(a, field.mul(c, x))),
                (ProjPoint::Finite(x), ProjPoint::Infinity) => pw(field.sub(field.mul(d, x), b)),
                (ProjPoint::Infinity, ProjPoint::Finite(_)) => pw(field.neg(c)),
                (ProjPoint::Infinity, ProjPoint::Infinity) => pw(d),
            };
            (src.index(q), scalar)
        })
        .collect())
}

/// `(g·u)_x = scalar_x · u_{g⁻¹·x}`.
pub fn monomial_action(field: &Field, g: &Matrix2, k: usize, u: &[Elem]) -> Result<Vec<Elem>> {
    if u.len() != field.q() as usize + 1 {
        return Err(Error::DegreeMismatch { expected: field.q() as usize + 1, got: u.len() });
    }
    Ok(monomial_scalars(field, g, k)?.into_iter().map(|(src, s)| field.mul(s, u[src])).collect())
}

/// The ternary Melas code of length `3^m - 1`: words `(c_x)` over the
/// nonzero `x ∈ F_{3^m}` with `Σ c_x x = 0` and `Σ c_x x⁻¹ = 0`, expanded
/// over F_3 in the polynomial basis.
pub fn melas_code(m: u32) -> Result<LinearCode> {
    if m < 2 {
        return Err(Error::Precondition(format!("m = {m} < 2")));
    }
    let fq = Field::new(3, m, None)?;
    let f3 = Field::new(3, 1, None)?;
    let xs: Vec<Elem> = fq.nonzero_elements().collect();
    let mut checks = vec![Vec::with_capacity(xs.len()); 2 * m as usize];
    for &x in &xs {
        let d = fq.digits(x);
        let di = fq.digits(fq.inv(x)?);
        for r in 0..m as usize {
            checks[r].push(Elem(d[r]));
            checks[m as usize + r].push(Elem(di[r]));
        }
    }
    let code = LinearCode::from_parity_check(&f3, xs.len(), checks, Coords::MultiplicativeGroup)?;
    let expected = xs.len() - 2 * m as usize;
    if code.dim() != expected {
        return Err(Error::CheckFailed(format!("Melas code has dimension {}, expected {expected}", code.dim())));
    }
    Ok(code)
}

/// Checks both defining constraints of a ternary word in F_{3^m} arithmetic.
pub fn melas_constraints_hold(m: u32, word: &[Elem]) -> Result<bool> {
    let fq = Field::new(3, m, None)?;
    let (mut s1, mut s2) = (Elem::ZERO, Elem::ZERO);
    for (x, &c) in fq.nonzero_elements().zip(word) {
        let c = fq.from_int(c.0 as i64);
        s1 = fq.add(s1, fq.mul(c, x));
        s2 = fq.add(s2, fq.mul(c, fq.inv(x)?));
    }
    Ok(s1.is_zero() && s2.is_zero())
}

/// Weight distribution of the trace code `{(Tr(a x + b x⁻¹))_x : a, b ∈ F_q}`,
/// the dual of the Melas code, by direct enumeration of its q² words.
pub fn melas_dual_distribution(m: u32, cap: u128) -> Result<WeightDist> {
    if m < 2 {
        return Err(Error::Precondition(format!("m = {m} < 2")));
    }
    let fq = Field::new(3, m, None)?;
    let q = fq.q() as usize;
    let needed = (q * q) as u128;
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let tr: Vec<u32> = fq.elements().map(|y| fq.trace(y).0).collect();
    let xs: Vec<Elem> = fq.nonzero_elements().collect();
    let xinv: Vec<Elem> = xs.iter().map(|&x| fq.inv(x).expect("nonzero")).collect();
    let n = q - 1;
    let counts: Vec<u64> = (0..q as u32)
        .into_par_iter()
        .map(|a| {
            let mut c = vec![0u64; n + 1];
            let ta: Vec<u32> = xs.iter().map(|&x| tr[fq.mul(Elem(a), x).0 as usize]).collect();
            for b in 0..q as u32 {
                let w = xinv
                    .iter()
                    .zip(&ta)
                    .filter(|&(&xi, &t)| !(t + tr[fq.mul(Elem(b), xi).0 as usize]).is_multiple_of(3))
                    .count();
                c[w] += 1;
            }
            c
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                x
            },
        );
    Ok(WeightDist { n, dim: 2 * m as usize, counts: counts.into_iter().map(|c| c as u128).collect() })
}

fn sign_m(m: u32) -> i128 {
    if m.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn exact_div(num: i128, den: i128, what: &str) -> Result<i128> {
    if num % den != 0 {
        return Err(Error::CheckFailed(format!("{what}: {num}/{den} is not an integer")));
    }
    Ok(num / den)
}

/// `A_5 = 4(q-1)(q² + ((-1)^m - 14)q + 36)/15`.
pub fn melas_a5_formula(m: u32) -> Result<i128> {
    let q = 3i128.pow(m);
    exact_div(4 * (q - 1) * (q * q + (sign_m(m) - 14) * q + 36), 15, "A5 formula")
}

/// `(q² + ((-1)^m - 14)q + 36)/24`.
pub fn lambda2_formula(m: u32) -> Result<i128> {
    let q = 3i128.pow(m);
    exact_div(q * q + (sign_m(m) - 14) * q + 36, 24, "lambda2 formula")
}

/// `(A_3, A_5)` of the Melas code from its dual via MacWilliams, checked
/// against `A_3 = 0` and the closed form for `A_5`.
pub fn melas_a3_a5(m: u32, cap: u128) -> Result<(u128, u128)> {
    let dual = melas_dual_distribution(m, cap)?;
    let a = macwilliams_big(&dual, 3)?;
    let a3 = a[3].to_u128().expect("small");
    let a5 = a[5].to_u128().expect("small");
    if a3 != 0 {
        return Err(Error::CheckFailed(format!("A3 = {a3}")));
    }
    let formula = melas_a5_formula(m)?;
    if a5 as i128 != formula {
        return Err(Error::CheckFailed(format!("A5 = {a5} by enumeration, {formula} by formula")));
    }
    Ok((a3, a5))
}

/// `λ₂` from `5A_5 / (32(q-1))`, which must agree with the closed form.
pub fn lambda2(m: u32, a5: u128) -> Result<u64> {
    let q = 3i128.pow(m);
    let from_a5 = exact_div(5 * a5 as i128, 32 * (q - 1), "5 A5 / 32(q-1)")?;
    let closed = lambda2_formula(m)?;
    if from_a5 != closed {
        return Err(Error::CheckFailed(format!("lambda2 = {from_a5} from A5, {closed} by formula")));
    }
    Ok(closed as u64)
}

pub fn lambda1(lambda2: u64) -> u64 {
    4 * lambda2
}

/// Output of the Melas pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MelasReport {
    pub m: u32,
    pub q: u64,
    #[serde(rename = "A3")]
    pub a3: u128,
    #[serde(rename = "A5")]
    pub a5: u128,
    pub lambda2: u64,
    pub lambda1: u64,
    pub oracle_agreement: bool,
}

/// Largest q for which λ₂ is also counted directly on the projective line.
pub const MELAS_LAMBDA_ORACLE_MAX_Q: u64 = 81;
/// Largest q for which the six-subset family is also enumerated.
pub const MELAS_SIXSET_ORACLE_MAX_Q: u64 = 27;

/// The full pipeline: dual enumeration, MacWilliams, the closed forms, and
/// the design-side oracles (λ-count of the degree-7 Lucas family, and the
/// six-subset count `λ₁ C(q+1,3)/C(6,3)`) where they are small enough.
pub fn melas_report(m: u32, cap: u128) -> Result<MelasReport> {
    let (a3, a5) = melas_a3_a5(m, cap)?;
    let l2 = lambda2(m, a5)?;
    let l1 = lambda1(l2);
    let q = 3u64.pow(m);
    let mut agree = true;
    if q <= MELAS_LAMBDA_ORACLE_MAX_Q {
        let f = Field::new(3, m, None)?;
        agree &= designs::lambda_count(&f, &Subspace::lucas(&f, 7))? == l2;
        if q <= MELAS_SIXSET_ORACLE_MAX_Q {
            let six = six_subset_family(&CayleyCtx::new(&f))?.len() as u128;
            agree &= six * binomial(6, 3) == l1 as u128 * binomial(q + 1, 3);
        }
    }
    Ok(MelasReport { m, q, a3, a5, lambda2: l2, lambda1: l1, oracle_agreement: agree })
}

/// Design-side check that `C_W` reaches `q+1-k` exactly when `B_W ≠ ∅`.
pub fn distance_matches_design(field: &Field, w: &Subspace, cap: u128) -> Result<bool> {
    let k = w.degree();
    let code = code_from_subspace(field, w)?;
    let d = min_distance(&code, cap)?;
    let nonempty = designs::lambda_count(field, w)? > 0;
    Ok(nonempty == (d == field.q() as usize + 1 - k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyspace::{gl2_act_poly, HomPoly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(p: u32, e: u32) -> Field {
        Field::new(p, e, None).unwrap()
    }

    #[test]
    fn rs_codes() {
        let f7 = field(7, 1);
        let p3 = projective_rs(&f7, 3).unwrap();
        assert_eq!((p3.n(), p3.dim()), (8, 4));
        assert_eq!(min_distance(&p3, DEFAULT_CODE_CAP).unwrap(), 5);
        for q in [(5, 1), (7, 1), (2, 2), (3, 1)] {
            let f = field(q.0, q.1);
            let qq = f.q() as usize;
            for k in 1..qq {
                let d = projective_rs(&f, k).unwrap().dual();
                assert_eq!(d.dim(), qq - k);
                assert_eq!(min_distance(&d, DEFAULT_CODE_CAP).unwrap(), k + 2);
            }
        }
        assert!(matches!(projective_rs(&f7, 8), Err(Error::Precondition(_))));
        let zero = Subspace::span(&f7, 3, vec![]).unwrap();
        assert!(matches!(code_from_subspace(&f7, &zero), Err(Error::Precondition(_))));
    }

    #[test]
    fn lucas_code_sizes() {
        let f27 = field(3, 3);
        let c = code_from_subspace(&f27, &Subspace::lucas(&f27, 7)).unwrap();
        assert_eq!((c.n(), c.dim()), (28, 6));
        let f16 = field(2, 4);
        let c = code_from_subspace(&f16, &Subspace::lucas(&f16, 5)).unwrap();
        assert_eq!(min_distance(&c, DEFAULT_CODE_CAP).unwrap(), 12);
        let f8 = field(2, 3);
        let w = Subspace::lucas(&f8, 5);
        let c = code_from_subspace(&f8, &w).unwrap();
        assert!(min_distance(&c, DEFAULT_CODE_CAP).unwrap() > 4);
        assert!(distance_matches_design(&f8, &w, DEFAULT_CODE_CAP).unwrap());
        assert!(distance_matches_design(&f16, &Subspace::lucas(&f16, 5), DEFAULT_CODE_CAP).unwrap());
    }

    #[test]
    fn duals() {
        let f = field(5, 1);
        let full = LinearCode::new(&f, 4, (0..4).map(|i| (0..4).map(|j| Elem((i == j) as u32)).collect()).collect(), Coords::Generic)
            .unwrap();
        assert_eq!(full.dual().dim(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let rows: Vec<Vec<Elem>> = (0..3).map(|_| (0..7).map(|_| Elem(rng.random_range(0..5))).collect()).collect();
            let c = LinearCode::new(&f, 7, rows, Coords::Generic).unwrap();
            assert_eq!(c.dual().dual(), c);
            assert_eq!(c.dim() + c.dual().dim(), 7);
        }
    }

    #[test]
    fn trivial_distributions() {
        let f = field(5, 1);
        let zero = LinearCode::new(&f, 6, vec![], Coords::Generic).unwrap();
        let d = weight_distribution(&zero, Strategy::Direct, DEFAULT_CODE_CAP).unwrap();
        assert_eq!(d.counts, vec![1, 0, 0, 0, 0, 0, 0]);
        let rep = LinearCode::new(&f, 6, vec![vec![Elem::ONE; 6]], Coords::Generic).unwrap();
        let d = weight_distribution(&rep, Strategy::Direct, DEFAULT_CODE_CAP).unwrap();
        assert_eq!(d.counts, vec![1, 0, 0, 0, 0, 0, 4]);
        assert_eq!(weight_distribution(&rep, Strategy::ViaDual, DEFAULT_CODE_CAP).unwrap(), d);
    }

    #[test]
    fn macwilliams_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let f = field(p, e);
            for _ in 0..10 {
                let dim = rng.random_range(1..5);
                let rows: Vec<Vec<Elem>> =
                    (0..dim).map(|_| (0..8).map(|_| Elem(rng.random_range(0..f.q()))).collect()).collect();
                let c = LinearCode::new(&f, 8, rows, Coords::Generic).unwrap();
                let direct = weight_distribution(&c, Strategy::Direct, DEFAULT_CODE_CAP).unwrap();
                assert_eq!(direct.total(), (f.q() as u128).pow(c.dim() as u32));
                let via = weight_distribution(&c, Strategy::ViaDual, DEFAULT_CODE_CAP).unwrap();
                assert_eq!(direct, via);
                let twice = macwilliams(&macwilliams(&direct, f.q() as u64).unwrap(), f.q() as u64).unwrap();
                assert_eq!(twice, direct);
            }
        }
    }

    #[test]
    fn support_designs() {
        let f7 = field(7, 1);
        let d = projective_rs(&f7, 4).unwrap().dual();
        let s = support_design(&d, 6, 3, DEFAULT_CODE_CAP).unwrap();
        assert!(s.report.is_design);
        assert_eq!((s.report.v, s.report.k), (8, 6));
        assert!(matches!(support_design(&d, 2, 3, DEFAULT_CODE_CAP), Err(Error::Precondition(_))));

        let f9 = field(3, 2);
        let c = code_from_subspace(&f9, &Subspace::lucas(&f9, 4)).unwrap().dual();
        assert_eq!((c.n(), c.dim()), (10, 6));
        let w0 = min_distance(&c, DEFAULT_CODE_CAP).unwrap();
        assert!(w0 <= 6);
        let s = support_design(&c, w0, 3, DEFAULT_CODE_CAP).unwrap();
        assert!(s.report.is_design);
    }

    #[test]
    fn min_weight_designs() {
        let opts = EnumOptions::default();
        let f16 = field(2, 4);
        let r = min_weight_support_design(&f16, &Subspace::lucas(&f16, 5), &opts).unwrap();
        assert!(r.is_design);
        assert_eq!((r.v, r.k), (17, 12));
        let f9 = field(3, 2);
        let r = min_weight_support_design(&f9, &Subspace::lucas(&f9, 4), &opts).unwrap();
        assert_eq!((r.v, r.k, r.is_design), (10, 6, true));
        let f8 = field(2, 3);
        assert_eq!(min_weight_support_design(&f8, &Subspace::lucas(&f8, 5), &opts), Err(Error::EmptyFamily));
    }

    #[test]
    fn dual_weight_bound() {
        for (p, e, k) in [(2, 4, 5), (3, 2, 4), (3, 3, 7), (2, 3, 5), (5, 1, 4)] {
            let f = field(p, e);
            let c = code_from_subspace(&f, &Subspace::lucas(&f, k)).unwrap();
            let w = low_weight_dual_word(&c).unwrap();
            assert!(weight(&w) >= 1 && weight(&w) <= k + 2);
            assert!(c.dual().contains(&w));
        }
    }

    #[test]
    fn monomial_action_matches_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (p, e, k) in [(2, 3, 4), (3, 2, 5), (7, 1, 3), (5, 1, 4)] {
            let f = field(p, e);
            for _ in 0..20 {
                let g = Matrix2::random(&f, &mut rng);
                let poly = HomPoly::new((0..=k).map(|_| Elem(rng.random_range(0..f.q()))).collect());
                let lhs = gl2_act_poly(&f, &g, &poly).unwrap().ev_vector(&f);
                let rhs = monomial_action(&f, &g, k, &poly.ev_vector(&f)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        for (p, e) in [(2, 3), (3, 2), (5, 1)] {
            let f = field(p, e);
            for _ in 0..20 {
                let g = Matrix2::random(&f, &mut rng);
                let sc = monomial_scalars(&f, &g, f.q() as usize - 1).unwrap();
                assert!(sc.iter().all(|&(_, s)| s == Elem::ONE));
            }
        }
    }

    #[test]
    fn melas_small() {
        let c = melas_code(3).unwrap();
        assert_eq!((c.n(), c.dim()), (26, 20));
        for row in c.rows() {
            assert!(melas_constraints_hold(3, row).unwrap());
        }
        let dist = weight_distribution(&c, Strategy::ViaDual, DEFAULT_CODE_CAP).unwrap();
        // x and -x with equal coefficients give the only weight-2 words
        assert_eq!((dist.counts[1], dist.counts[2], dist.counts[3]), (0, 26, 0));
        assert_eq!(low_weight_words(3, 2).len(), 26);
        assert!(low_weight_words(3, 1).is_empty());
        assert_eq!(dist.counts[5], 2496);
        assert!(matches!(melas_code(1), Err(Error::Precondition(_))));

        let c9 = melas_code(2).unwrap();
        assert_eq!(
            weight_distribution(&c9, Strategy::Direct, DEFAULT_CODE_CAP).unwrap(),
            weight_distribution(&c9, Strategy::ViaDual, DEFAULT_CODE_CAP).unwrap()
        );
        // the trace code is the dual of the Melas code
        let dual = melas_dual_distribution(2, DEFAULT_CODE_CAP).unwrap();
        assert_eq!(dual, weight_distribution(&c9.dual(), Strategy::Direct, DEFAULT_CODE_CAP).unwrap());
    }

    fn low_weight_words(m: u32, w: usize) -> Vec<Vec<Elem>> {
        let n = 3usize.pow(m) - 1;
        let mut out = Vec::new();
        crate::subsets::for_each_subset(n, w, |s| {
            for signs in 0..1u32 << w {
                let mut word = vec![Elem::ZERO; n];
                for (i, &j) in s.iter().enumerate() {
                    word[j] = Elem(1 + (signs >> i & 1));
                }
                if melas_constraints_hold(m, &word).unwrap() {
                    out.push(word);
                }
            }
        });
        out
    }

    #[test]
    fn melas_random_subcode_strategies_agree() {
        let c = melas_code(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let f3 = c.field().clone();
        let rows: Vec<Vec<Elem>> = (0..13)
            .map(|_| {
                let msg: Vec<Elem> = (0..c.dim()).map(|_| Elem(rng.random_range(0..3))).collect();
                c.encode(&msg).unwrap()
            })
            .collect();
        let sub = LinearCode::new(&f3, c.n(), rows, Coords::MultiplicativeGroup).unwrap();
        assert!(sub.rows().iter().all(|r| c.contains(r)));
        assert_eq!(
            weight_distribution(&sub, Strategy::Direct, DEFAULT_CODE_CAP).unwrap(),
            weight_distribution(&sub, Strategy::ViaDual, DEFAULT_CODE_CAP).unwrap()
        );
    }

    #[test]
    fn melas_formulas() {
        assert_eq!(melas_a5_formula(2).unwrap(), 0);
        assert_eq!(melas_a5_formula(3).unwrap(), 2496);
        assert_eq!(melas_a5_formula(4).unwrap(), 118_272);
        assert_eq!(lambda2_formula(2).unwrap(), 0);
        assert_eq!(lambda2_formula(3).unwrap(), 15);
        assert_eq!(lambda2_formula(4).unwrap(), 231);
        assert_eq!(melas_a3_a5(3, DEFAULT_CODE_CAP).unwrap(), (0, 2496));
        assert_eq!(lambda2(3, 2496).unwrap(), 15);
        assert!(lambda2(3, 2495).is_err());
        assert_eq!(lambda1(15), 60);
    }
}

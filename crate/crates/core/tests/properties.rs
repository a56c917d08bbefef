//! Randomized invariants over small fields.

use std::collections::HashSet;

use gl2designs::codes::{self, code_from_subspace, macwilliams, weight_distribution, LinearCode};
use gl2designs::designs::{enumerate_blocks, lambda_count, verify_design, Block, EnumOptions, Method};
use gl2designs::polyspace::{check_gl2_invariance, leq_p, lucas_dimension};
use gl2designs::projline::{pgl2_iter, pgl2_order, points};
use gl2designs::{Elem, Field, HomPoly, Matrix2, Pgl2Element, Subspace};
use proptest::prelude::*;

const SMALL_FIELDS: [(u32, u32); 8] = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1)];

fn field(p: u32, e: u32) -> Field {
    Field::new(p, e, None).unwrap()
}

fn small_field() -> impl Strategy<Value = Field> {
    prop::sample::select(SMALL_FIELDS.to_vec()).prop_map(|(p, e)| field(p, e))
}

fn matrix(f: &Field, raw: [u32; 4]) -> Option<Matrix2> {
    let q = f.q();
    let [a, b, c, d] = raw.map(|x| Elem(x % q));
    Matrix2::new(f, a, b, c, d).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(fp in small_field(), a in 0u32..1000, b in 0u32..1000, c in 0u32..1000) {
        let q = fp.q();
        let (a, b, c) = (Elem(a % q), Elem(b % q), Elem(c % q));
        prop_assert_eq!(fp.mul(a, fp.add(b, c)), fp.add(fp.mul(a, b), fp.mul(a, c)));
        prop_assert_eq!(fp.add(a, fp.neg(a)), Elem::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(fp.mul(a, fp.inv(a).unwrap()), Elem::ONE);
            prop_assert_eq!(fp.pow(a, q as i64 - 1).unwrap(), Elem::ONE);
        }
        prop_assert_eq!(fp.frobenius(a, fp.e()), a);
    }

    #[test]
    fn group_action_is_a_homomorphism(fp in small_field(), g in any::<[u32; 4]>(), h in any::<[u32; 4]>()) {
        let (Some(g), Some(h)) = (matrix(&fp, g), matrix(&fp, h)) else { return Ok(()) };
        let pg = Pgl2Element::new(&fp, g).unwrap();
        let ph = Pgl2Element::new(&fp, h).unwrap();
        let gh = pg.compose(&fp, &ph);
        for x in points(&fp) {
            prop_assert_eq!(gh.act(&fp, x), pg.act(&fp, ph.act(&fp, x)));
            prop_assert_eq!(pg.inverse(&fp).act(&fp, pg.act(&fp, x)), x);
        }
    }

    #[test]
    fn lucas_dimension_matches_digit_count(p in prop::sample::select(vec![2u32, 3, 5, 7]), k in 0u64..400) {
        let count = (0..=k).filter(|&i| leq_p(i, k, p)).count() as u64;
        prop_assert_eq!(lucas_dimension(k, p), count);
    }

    #[test]
    fn lucas_subspaces_are_invariant(fp in small_field(), k in 1usize..20, seed in any::<u64>()) {
        let w = Subspace::lucas(&fp, k);
        prop_assert!(check_gl2_invariance(&fp, &w, 5, seed).is_ok());
    }

    #[test]
    fn poly_action_moves_zero_sets(fp in small_field(), g in any::<[u32; 4]>(), coeffs in prop::collection::vec(any::<u32>(), 2..8)) {
        let Some(g) = matrix(&fp, g) else { return Ok(()) };
        let q = fp.q();
        let f = HomPoly::new(coeffs.iter().map(|&c| Elem(c % q)).collect());
        if f.is_zero() || f.degree() > q as usize {
            return Ok(());
        }
        let pg = Pgl2Element::new(&fp, g).unwrap();
        let image = gl2designs::polyspace::gl2_act_poly(&fp, &g, &f).unwrap();
        let zeros = |h: &HomPoly| points(&fp).into_iter().filter(|&x| h.evaluate(&fp, x).is_zero()).collect::<HashSet<_>>();
        let moved: HashSet<_> = zeros(&f).into_iter().map(|x| pg.act(&fp, x)).collect();
        prop_assert_eq!(zeros(&image), moved);
    }

    #[test]
    fn monomial_action_preserves_the_code(fp in small_field(), g in any::<[u32; 4]>(), k in 3usize..8, msg in prop::collection::vec(any::<u32>(), 8)) {
        let Some(g) = matrix(&fp, g) else { return Ok(()) };
        let q = fp.q();
        if k > q as usize {
            return Ok(());
        }
        let code = code_from_subspace(&fp, &Subspace::lucas(&fp, k)).unwrap();
        let msg: Vec<Elem> = msg[..code.dim()].iter().map(|&c| Elem(c % q)).collect();
        let word = code.encode(&msg).unwrap();
        let moved = codes::monomial_action(&fp, &g, k, &word).unwrap();
        prop_assert!(code.contains(&moved));
        prop_assert_eq!(codes::weight(&moved), codes::weight(&word));
    }

    #[test]
    fn macwilliams_is_an_involution(fp in prop::sample::select(vec![(2u32, 1u32), (3, 1), (2, 2)]), rows in prop::collection::vec(prop::collection::vec(any::<u32>(), 7), 1..4)) {
        let f = field(fp.0, fp.1);
        let q = f.q();
        let rows: Vec<Vec<Elem>> = rows.into_iter().map(|r| r.into_iter().map(|x| Elem(x % q)).collect()).collect();
        let code = LinearCode::new(&f, 7, rows, codes::Coords::Generic).unwrap();
        let d = weight_distribution(&code, codes::Strategy::Direct, 1 << 20).unwrap();
        let back = macwilliams(&macwilliams(&d, q as u64).unwrap(), q as u64).unwrap();
        prop_assert_eq!(back, d);
    }
}

#[test]
fn pgl2_acts_by_permutations_exhaustively() {
    for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4), (17, 1), (19, 1), (23, 1), (5, 2), (3, 3)] {
        let f = field(p, e);
        let mut perms = HashSet::new();
        for g in pgl2_iter(&f) {
            let perm = g.permutation(&f);
            let mut seen = vec![false; perm.len()];
            perm.iter().for_each(|&i| seen[i] = true);
            assert!(seen.iter().all(|&s| s), "not a bijection over F_{}", f.q());
            perms.insert(perm);
        }
        assert_eq!(perms.len() as u64, pgl2_order(f.q()), "PGL2 over F_{} acts faithfully", f.q());
    }
}

#[test]
fn lucas_families_are_invariant_designs() {
    let opts = EnumOptions::default();
    for (p, e) in [(2, 3), (3, 2), (2, 4), (5, 1), (7, 1), (13, 1)] {
        let f = field(p, e);
        for k in 3..=(f.q() as usize).min(9) {
            let w = Subspace::lucas(&f, k);
            let fam = enumerate_blocks(&f, &w, Method::Orbit, &opts).unwrap();
            if fam.is_empty() {
                assert_eq!(lambda_count(&f, &w).unwrap(), 0);
                continue;
            }
            let rep = verify_design(&fam, 3).unwrap();
            assert!(rep.is_design, "q={}, k={k}", f.q());
            assert_eq!(rep.lambda, Some(lambda_count(&f, &w).unwrap()));
            let g = Pgl2Element::new(&f, Matrix2::new(&f, Elem(1), Elem(1), Elem(0), Elem(1)).unwrap()).unwrap();
            assert!(fam.is_invariant_under(&g));
            let json = fam.to_json();
            assert_eq!(gl2designs::designs::BlockFamily::from_json(&json).unwrap(), fam);
            assert!(fam.blocks().iter().all(|b: &Block| b.len() == k));
        }
    }
}

#[test]
fn melas_m4() {
    let r = codes::melas_report(4, codes::DEFAULT_CODE_CAP).unwrap();
    assert_eq!((r.a3, r.a5, r.lambda2, r.lambda1), (0, 118_272, 231, 924));
    assert!(r.oracle_agreement);
}

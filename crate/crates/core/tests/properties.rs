mod common;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use qfa_core::automata::{Alphabet, Automaton, Gpfa, Kwqfa, Mcqfa};
use qfa_core::enumerate::{for_each_value, words};
use qfa_core::languages::free_reduce;
use qfa_core::numeric::{squared_norm, vec_mat, Matrix, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pythagorean cosine/sine pairs.
const TRIPLES: [(i64, i64, i64); 3] = [(3, 4, 5), (5, 12, 13), (8, 15, 17)];

/// Rational orthogonal matrix: a product of plane rotations given as
/// `(p, q, triple, sign)`.
fn rational_rotations(n: usize, plan: &[(usize, usize, usize, bool)]) -> Matrix<Rational> {
    let mut m = Matrix::identity(n);
    for &(p, q, t, neg) in plan {
        if p == q {
            continue;
        }
        let (a, b, c) = TRIPLES[t];
        let (cos, mut sin) = (r(a, c), r(b, c));
        if neg {
            sin = -sin;
        }
        let mut g = Matrix::identity(n);
        g[(p, p)] = cos.clone();
        g[(q, q)] = cos;
        g[(p, q)] = -sin.clone();
        g[(q, p)] = sin;
        m = m.mul(&g).unwrap();
    }
    m
}

fn plan_strategy(n: usize) -> impl Strategy<Value = Vec<(usize, usize, usize, bool)>> {
    prop::collection::vec((0..n, 0..n, 0..3usize, any::<bool>()), 0..4)
}

fn mirror_kwqfa(n: usize) -> impl Strategy<Value = (Kwqfa<Rational>, Kwqfa<f64>)> {
    (plan_strategy(n), plan_strategy(n), plan_strategy(n), plan_strategy(n), 0..n).prop_map(
        move |(l, a, b, rt, acc)| {
            let mats: Vec<Matrix<Rational>> = [l, a, b, rt].iter().map(|p| rational_rotations(n, p)).collect();
            let rej: Vec<usize> = (0..n).filter(|&q| q != acc && q != 0).take(1).collect();
            let ab = Alphabet::chars("ab");
            let exact = Kwqfa::new(
                ab.clone(),
                mats[0].clone(),
                vec![mats[1].clone(), mats[2].clone()],
                mats[3].clone(),
                &[acc],
                &rej,
            )
            .unwrap();
            let float = Kwqfa::new(
                ab,
                mats[0].to_float(),
                vec![mats[1].to_float(), mats[2].to_float()],
                mats[3].to_float(),
                &[acc],
                &rej,
            )
            .unwrap();
            (exact, float)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_arithmetic_is_exact(a in entry_strategy(false), b in entry_strategy(false), c in entry_strategy(false)) {
        prop_assert_eq!((a.clone() + &b) + &c, a.clone() + (b.clone() + &c));
        prop_assert_eq!((a.clone() * &b) * &c, a.clone() * (b.clone() * &c));
        prop_assert_eq!(a.clone() * (b.clone() + &c), a.clone() * &b + a * &c);
    }

    #[test]
    fn matrix_products_associate(g in gpfa_strategy(Alphabet::chars("abc"), 3, false)) {
        let (x, y, z) = (g.transition(0), g.transition(1), g.transition(2));
        prop_assert_eq!(x.mul(y).unwrap().mul(z).unwrap(), x.mul(&y.mul(z).unwrap()).unwrap());
    }

    #[test]
    fn gpfa_value_splits_at_any_point(g in gpfa_strategy(Alphabet::chars("ab"), 3, false), w in prop::collection::vec(0usize..2, 0..7), cut in 0usize..7) {
        let cut = cut.min(w.len());
        let (u, v) = w.split_at(cut);
        let left = vec_mat(g.initial_vector(), &g.word_matrix(u).unwrap()).unwrap();
        let right = qfa_core::numeric::mat_vec(&g.word_matrix(v).unwrap(), g.final_vector()).unwrap();
        prop_assert_eq!(g.value(&w).unwrap(), qfa_core::numeric::dot(&left, &right));
        prop_assert_eq!(g.value(&w).unwrap(), direct_value(&g, &w));
    }

    #[test]
    fn kwqfa_mass_is_conserved((exact, float) in mirror_kwqfa(3), w in prop::collection::vec(0usize..2, 0..7)) {
        let run = exact.run(&w).unwrap();
        let rest = squared_norm(run.vectors.last().unwrap());
        prop_assert_eq!(run.accept_prob.clone() + &run.reject_prob + &rest, Rational::one());
        let frun = float.run(&w).unwrap();
        let frest = squared_norm(frun.vectors.last().unwrap());
        prop_assert!((frun.accept_prob + frun.reject_prob + frest - 1.0).abs() < 1e-9);
    }

    #[test]
    fn float_and_rational_mirrors_agree((exact, float) in mirror_kwqfa(3)) {
        let mut exact_values = Vec::new();
        for_each_value(&exact, 8, |_, v| exact_values.push(v));
        let mut i = 0;
        let mut worst = 0f64;
        for_each_value(&float, 8, |_, v| {
            worst = worst.max((v - qfa_core::numeric::rational_to_f64(&exact_values[i])).abs());
            i += 1;
        });
        prop_assert!(worst < 1e-6, "difference {}", worst);
    }

    #[test]
    fn mcqfa_values_are_probabilities(l in plan_strategy(3), a in plan_strategy(3), b in plan_strategy(3), acc in prop::collection::vec(0usize..3, 0..3)) {
        let f = |p: &[(usize, usize, usize, bool)]| rational_rotations(3, p).to_float();
        let m = Mcqfa::new(Alphabet::chars("ab"), f(&l), vec![f(&a), f(&b)], Matrix::identity(3), &acc).unwrap();
        for_each_value(&m, 6, |w, v| {
            assert!((-1e-12..=1.0 + 1e-9).contains(&v), "{w:?}: {v}");
        });
    }

    #[test]
    fn free_reduce_is_idempotent_and_keeps_parity(w in prop::collection::vec((1u32..4, any::<bool>()), 0..12)) {
        let names: Vec<String> = w.iter().map(|&(i, inv)| format!("{}{i}", if inv { 'G' } else { 'g' })).collect();
        let once = free_reduce(&names).unwrap();
        prop_assert_eq!(free_reduce(&once).unwrap(), once.clone());
        prop_assert!(once.len() <= names.len());
        prop_assert_eq!(once.len() % 2, names.len() % 2);
    }
}

#[test]
fn pfa_values_lie_in_unit_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let p = random_pfa(&mut rng, 1 + i % 3, 6);
        for_each_value(&p, 8, |w, v| {
            assert!(v >= Rational::zero() && v <= Rational::one(), "{w:?}: {v}");
            assert_eq!(v, pfa_direct(&p, w));
        });
    }
}

#[test]
fn enumeration_is_length_then_lexicographic() {
    let all: Vec<Vec<usize>> = words(3, 4).collect();
    for pair in all.windows(2) {
        assert!((pair[0].len(), &pair[0]) < (pair[1].len(), &pair[1]));
    }
}

#[test]
fn gpfa_empty_word_is_inner_product() {
    let g = Gpfa::new(Alphabet::chars("a"), vec![Matrix::from_rows(vec![vec![r(2, 1)]]).unwrap()], vec![r(1, 1)], vec![r(1, 1)]).unwrap();
    assert_eq!(g.evaluate(&[]).unwrap(), r(1, 1));
    assert_eq!(g.evaluate(&[0, 0, 0]).unwrap(), r(8, 1));
}

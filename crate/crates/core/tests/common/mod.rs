//! Brute-force reference functions and random machine generators shared by
//! the integration tests. None of these go through the constructions they
//! are used to check.

#![allow(dead_code)]

use num_traits::{One, Zero};
use proptest::prelude::*;
use qfa_core::automata::{Alphabet, Automaton, Gpfa, Pfa};
use qfa_core::numeric::{ratio, Matrix, Rational};
use rand::Rng;

pub fn r(n: i64, d: i64) -> Rational {
    ratio(n, d)
}

/// `Σ_{uv=w} f₁(u)·f₂(v)`.
pub fn convolution(f1: impl Fn(&[usize]) -> Rational, f2: impl Fn(&[usize]) -> Rational, w: &[usize]) -> Rational {
    (0..=w.len()).fold(Rational::zero(), |acc, i| acc + f1(&w[..i]) * f2(&w[i..]))
}

/// Sum over factorizations `w = u₁⋯u_k` (`k ≥ 1`, all blocks but the last
/// nonempty) of `∏ f(u_i)`.
pub fn factorization_sum(f: &impl Fn(&[usize]) -> Rational, w: &[usize]) -> Rational {
    let mut total = f(w);
    for i in 1..=w.len() {
        let head = f(&w[..i]);
        if !head.is_zero() {
            total = total + head * factorization_sum(f, &w[i..]);
        }
    }
    total
}

/// All `u` over the source alphabet with `h(u) = w`, where `images[s]` is
/// nonempty for every source symbol.
pub fn preimages(images: &[Vec<usize>], w: &[usize]) -> Vec<Vec<usize>> {
    if w.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (s, img) in images.iter().enumerate() {
        if w.starts_with(img) {
            for mut rest in preimages(images, &w[img.len()..]) {
                rest.insert(0, s);
                out.push(rest);
            }
        }
    }
    out
}

/// Every word obtained from `w` by inserting a run of `kappa` of length
/// `< n_l` into each of the `|w| + 1` gaps.
pub fn paddings(w: &[usize], kappa: usize, n_l: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for gap in 0..=w.len() {
        let mut next = Vec::with_capacity(out.len() * n_l);
        for prefix in &out {
            for run in 0..n_l {
                let mut u = prefix.clone();
                u.extend(std::iter::repeat(kappa).take(run));
                if gap < w.len() {
                    u.push(w[gap]);
                }
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Value of `g` on a word given over another alphabet, mapping by name.
pub fn value_by_name(g: &Gpfa<Rational>, alphabet: &Alphabet, w: &[usize]) -> Rational {
    let mapped: Vec<usize> = w
        .iter()
        .map(|&s| g.alphabet().index_of(alphabet.symbol(s)).expect("symbol present"))
        .collect();
    g.value(&mapped).expect("valid word")
}

/// Direct product of the matrices along `w`, applied to `v0` and `f`.
pub fn direct_value(g: &Gpfa<Rational>, w: &[usize]) -> Rational {
    let mut v = g.initial_vector().to_vec();
    for &s in w {
        let a = g.transition(s);
        v = (0..g.n())
            .map(|j| (0..g.n()).fold(Rational::zero(), |acc, i| acc + &v[i] * &a[(i, j)]))
            .collect();
    }
    v.iter().zip(g.final_vector()).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

const SIGNED: [(i64, i64); 9] = [(0, 1), (0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2), (2, 1), (1, 3), (-2, 3)];
const NONNEG: [(i64, i64); 7] = [(0, 1), (0, 1), (0, 1), (1, 1), (1, 2), (2, 1), (1, 3)];

pub fn entry_strategy(nonneg: bool) -> impl Strategy<Value = Rational> {
    let table: &'static [(i64, i64)] = if nonneg { &NONNEG } else { &SIGNED };
    prop::sample::select(table).prop_map(|(n, d)| ratio(n, d))
}

/// Random rational GPFA over `alphabet` with 1 to `max_n` states.
pub fn gpfa_strategy(alphabet: Alphabet, max_n: usize, nonneg: bool) -> impl Strategy<Value = Gpfa<Rational>> {
    let k = alphabet.len();
    (1..=max_n).prop_flat_map(move |n| {
        let alphabet = alphabet.clone();
        let e = move || entry_strategy(nonneg);
        (
            prop::collection::vec(prop::collection::vec(e(), n * n), k),
            prop::collection::vec(e(), n),
            prop::collection::vec(e(), n),
        )
            .prop_map(move |(mats, v0, f)| {
                let trans = mats
                    .into_iter()
                    .map(|flat| Matrix::from_fn(n, n, |i, j| flat[i * n + j].clone()))
                    .collect();
                Gpfa::new(alphabet.clone(), trans, v0, f).expect("well-formed")
            })
    })
}

pub fn random_entry(rng: &mut impl Rng, nonneg: bool) -> Rational {
    let table: &[(i64, i64)] = if nonneg { &NONNEG } else { &SIGNED };
    let (n, d) = table[rng.gen_range(0..table.len())];
    ratio(n, d)
}

pub fn random_gpfa(rng: &mut impl Rng, alphabet: &Alphabet, n: usize, nonneg: bool) -> Gpfa<Rational> {
    let trans = (0..alphabet.len())
        .map(|_| Matrix::from_fn(n, n, |_, _| random_entry(rng, nonneg)))
        .collect();
    let v0 = (0..n).map(|_| random_entry(rng, nonneg)).collect();
    let f = (0..n).map(|_| random_entry(rng, nonneg)).collect();
    Gpfa::new(alphabet.clone(), trans, v0, f).expect("well-formed")
}

/// Random stochastic row with denominators dividing `den`.
pub fn random_stochastic_row(rng: &mut impl Rng, n: usize, den: i64) -> Vec<Rational> {
    let mut weights = vec![0i64; n];
    for _ in 0..den {
        weights[rng.gen_range(0..n)] += 1;
    }
    weights.into_iter().map(|w| ratio(w, den)).collect()
}

pub fn random_stochastic(rng: &mut impl Rng, n: usize, den: i64) -> Matrix<Rational> {
    Matrix::from_rows((0..n).map(|_| random_stochastic_row(rng, n, den)).collect()).expect("square")
}

/// Random rational PFA over `{a, b}` with `n` states, nonempty accepting set.
pub fn random_pfa(rng: &mut impl Rng, n: usize, den: i64) -> Pfa {
    let alphabet = Alphabet::chars("ab");
    let left = random_stochastic(rng, n, den);
    let trans = vec![random_stochastic(rng, n, den), random_stochastic(rng, n, den)];
    let right = random_stochastic(rng, n, den);
    let mut accepting: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if accepting.is_empty() {
        accepting.push(rng.gen_range(0..n));
    }
    Pfa::new(alphabet, left, trans, right, &accepting).expect("stochastic")
}

/// Acceptance probability of a PFA by direct row-vector products.
pub fn pfa_direct(p: &Pfa, w: &[usize]) -> Rational {
    let n = p.n();
    let step = |v: &[Rational], a: &Matrix<Rational>| -> Vec<Rational> {
        (0..n)
            .map(|j| (0..n).fold(Rational::zero(), |acc, i| acc + &v[i] * &a[(i, j)]))
            .collect()
    };
    let mut v = vec![Rational::zero(); n];
    v[0] = Rational::one();
    v = step(&v, p.left_marker());
    for &s in w {
        v = step(&v, p.transition(s));
    }
    v = step(&v, p.right_marker());
    p.accepting().iter().fold(Rational::zero(), |acc, &q| acc + &v[q])
}

//! Closure constructions on generalized automata. Every output's value
//! function is an exact algebraic image of the inputs' value functions.

use std::fmt;
use std::str::FromStr;

use crate::automata::{Alphabet, Automaton, Gpfa};
use crate::enumerate::for_each_value;
use crate::numeric::{dot, mat_vec, vec_mat, Field, Matrix};

use super::{ConstructionError, Homomorphism};

/// Which end of the word a quotient strips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl FromStr for Side {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(ConstructionError::InvalidParameter(format!(
                "side must be left or right, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// `col · row` as a matrix.
fn outer<T: Field>(col: &[T], row: &[T]) -> Matrix<T> {
    Matrix::from_fn(col.len(), row.len(), |i, j| col[i].clone() * &row[j])
}

/// Transition matrices of `g` reordered to follow `alphabet`, matched by name.
fn aligned<T: Field>(g: &Gpfa<T>, alphabet: &Alphabet) -> Result<Vec<Matrix<T>>, ConstructionError> {
    if !g.alphabet().same_symbols(alphabet) {
        return Err(ConstructionError::AlphabetMismatch(
            alphabet.to_string(),
            g.alphabet().to_string(),
        ));
    }
    Ok(alphabet
        .symbols()
        .iter()
        .map(|s| g.transition_named(s).expect("same symbols").clone())
        .collect())
}

/// Machine whose value on `w` is `Σ_{uv=w} f₁(u)·f₂(v)`.
pub fn gpfa_concat<T: Field>(g1: &Gpfa<T>, g2: &Gpfa<T>) -> Result<Gpfa<T>, ConstructionError> {
    let alphabet = g1.alphabet().clone();
    let second = aligned(g2, &alphabet)?;
    let (n1, n2) = (g1.n(), g2.n());
    let f1 = g1.final_vector();
    let v2 = g2.initial_vector();
    let eps1 = dot(g1.initial_vector(), f1);

    let trans = g1
        .transitions()
        .iter()
        .zip(&second)
        .map(|(a1, a2)| {
            let mut m = Matrix::zeros(n1 + n2, n1 + n2);
            m.set_block(0, 0, a1);
            m.set_block(0, n1, &outer(&mat_vec(a1, f1)?, v2));
            m.set_block(n1, n1, a2);
            Ok(m)
        })
        .collect::<Result<Vec<_>, ConstructionError>>()?;

    let mut v0 = g1.initial_vector().to_vec();
    v0.extend(v2.iter().map(|x| eps1.clone() * x));
    let mut f = vec![T::zero(); n1];
    f.extend_from_slice(g2.final_vector());
    Ok(Gpfa::new(alphabet, trans, v0, f)?)
}

/// Adds one isolated state carrying `delta` on the empty word only.
pub fn add_epsilon<T: Field>(g: &Gpfa<T>, delta: T) -> Gpfa<T> {
    let zero = Matrix::zeros(1, 1);
    let trans = g.transitions().iter().map(|a| a.direct_sum(&zero)).collect();
    let mut v0 = g.initial_vector().to_vec();
    v0.push(T::one());
    let mut f = g.final_vector().to_vec();
    f.push(delta);
    Gpfa::new(g.alphabet().clone(), trans, v0, f).expect("shapes preserved")
}

/// Star machine: `A'_σ = A_σ + (A_σ f)·v₀`.
///
/// The value on `w` is the sum, over factorizations `w = u₁⋯u_k` whose
/// blocks are nonempty except possibly the last, of `∏ f(u_i)`.
pub fn gpfa_star<T: Field>(g: &Gpfa<T>) -> Gpfa<T> {
    let v0 = g.initial_vector();
    let f = g.final_vector();
    let trans = g
        .transitions()
        .iter()
        .map(|a| {
            let restart = outer(&mat_vec(a, f).expect("square"), v0);
            a.add(&restart).expect("same shape")
        })
        .collect();
    Gpfa::new(g.alphabet().clone(), trans, v0.to_vec(), f.to_vec()).expect("shapes preserved")
}

/// `Σ_{j<n_L} A_κ^j`.
fn padding_sum<T: Field>(a: &Matrix<T>, n_l: usize) -> Matrix<T> {
    let n = a.rows();
    let mut acc = Matrix::zeros(n, n);
    let mut power = Matrix::identity(n);
    for _ in 0..n_l {
        acc = acc.add(&power).expect("square");
        power = power.mul(a).expect("square");
    }
    acc
}

/// Symbols, transitions and initial vector of a machine being rebuilt.
struct Parts<T> {
    symbols: Vec<String>,
    trans: Vec<Matrix<T>>,
    v0: Vec<T>,
}

impl<T: Field> Parts<T> {
    fn of(g: &Gpfa<T>) -> Self {
        Parts {
            symbols: g.alphabet().symbols().to_vec(),
            trans: g.transitions().to_vec(),
            v0: g.initial_vector().to_vec(),
        }
    }

    fn erase(&mut self, kappa: &str, n_l: usize) -> Result<(), ConstructionError> {
        let k = self
            .symbols
            .iter()
            .position(|s| s == kappa)
            .ok_or_else(|| ConstructionError::UnknownSymbol(kappa.to_string()))?;
        if n_l == 0 {
            return Err(ConstructionError::InvalidParameter(
                "padding bound must be at least 1".into(),
            ));
        }
        let x = padding_sum(&self.trans.remove(k), n_l);
        self.symbols.remove(k);
        for a in &mut self.trans {
            *a = a.mul(&x)?;
        }
        self.v0 = vec_mat(&self.v0, &x)?;
        Ok(())
    }
}

/// Machine over `Σ∖{κ}` whose value on `w` sums `f(u)` over every `u`
/// obtained from `w` by inserting runs of `κ` shorter than `n_L` before,
/// between and after its symbols.
pub fn gpfa_erasing_hom<T: Field>(
    g: &Gpfa<T>,
    kappa: &str,
    n_l: usize,
) -> Result<Gpfa<T>, ConstructionError> {
    let mut parts = Parts::of(g);
    parts.erase(kappa, n_l)?;
    if parts.symbols.is_empty() {
        return Err(ConstructionError::InvalidParameter(format!(
            "erasing {kappa:?} leaves an empty alphabet"
        )));
    }
    Ok(Gpfa::new(
        Alphabet::new(parts.symbols)?,
        parts.trans,
        parts.v0,
        g.final_vector().to_vec(),
    )?)
}

/// Machine over `h`'s target alphabet with value `Σ_{h(u)=w} f(u)`, for a
/// homomorphism with no empty images.
///
/// Source symbol `σ` with image `γ₁⋯γ_l` owns a region of `l` copies of the
/// state space. The copy at slot `i` holds the configuration before `σ` once
/// `γ₁⋯γ_i` has been matched; completing the image applies `A_σ` and restarts
/// slot 0 of every region. Only the first region's slot 0 is read out.
pub fn gpfa_nonerasing_hom<T: Field>(
    g: &Gpfa<T>,
    h: &Homomorphism,
) -> Result<Gpfa<T>, ConstructionError> {
    let source = h.source();
    let source_trans = aligned(g, source)?;
    if let Some(&e) = h.erased().first() {
        return Err(ConstructionError::ErasingImage(source.symbol(e).to_string()));
    }
    let n = g.n();
    let mut offsets = Vec::with_capacity(source.len());
    let mut total = 0;
    for s in 0..source.len() {
        offsets.push(total);
        total += h.image(s).len();
    }
    let dim = total * n;
    let slot = |s: usize, i: usize| (offsets[s] + i) * n;

    let identity = Matrix::identity(n);
    let trans = (0..h.target().len())
        .map(|gamma| {
            let mut m = Matrix::zeros(dim, dim);
            for s in 0..source.len() {
                let img = h.image(s);
                for (i, &letter) in img.iter().enumerate() {
                    if letter != gamma {
                        continue;
                    }
                    if i + 1 < img.len() {
                        m.set_block(slot(s, i), slot(s, i + 1), &identity);
                    } else {
                        for t in 0..source.len() {
                            m.set_block(slot(s, i), slot(t, 0), &source_trans[s]);
                        }
                    }
                }
            }
            m
        })
        .collect();

    let mut v0 = vec![T::zero(); dim];
    for s in 0..source.len() {
        v0[slot(s, 0)..slot(s, 0) + n].clone_from_slice(g.initial_vector());
    }
    let mut f = vec![T::zero(); dim];
    f[..n].clone_from_slice(g.final_vector());
    Ok(Gpfa::new(h.target().clone(), trans, v0, f)?)
}

/// General homomorphism: erases each symbol with an empty image, in source
/// alphabet order with the matching entry of `padding_bounds`, then applies
/// the non-erasing construction to what remains.
pub fn gpfa_hom<T: Field>(
    g: &Gpfa<T>,
    h: &Homomorphism,
    padding_bounds: &[usize],
) -> Result<Gpfa<T>, ConstructionError> {
    let erased = h.erased();
    if erased.len() != padding_bounds.len() {
        return Err(ConstructionError::PaddingBoundCount {
            expected: erased.len(),
            found: padding_bounds.len(),
        });
    }
    let source = h.source();
    aligned(g, source)?;

    let mut parts = Parts::of(g);
    for (&s, &n_l) in erased.iter().zip(padding_bounds) {
        parts.erase(source.symbol(s), n_l)?;
    }
    if parts.symbols.is_empty() {
        // only the empty word has preimages
        let n = g.n();
        let target = h.target().clone();
        let trans = vec![Matrix::zeros(n, n); target.len()];
        return Ok(Gpfa::new(target, trans, parts.v0, g.final_vector().to_vec())?);
    }
    let current = Gpfa::new(
        Alphabet::new(parts.symbols)?,
        parts.trans,
        parts.v0,
        g.final_vector().to_vec(),
    )?;
    let residual_symbols: Vec<usize> = (0..source.len()).filter(|s| !erased.contains(s)).collect();
    let residual_source = Alphabet::new(residual_symbols.iter().map(|&s| source.symbol(s)))?;
    let residual = Homomorphism::new(
        residual_source,
        h.target().clone(),
        residual_symbols.iter().map(|&s| h.image(s).to_vec()).collect(),
    )?;
    gpfa_nonerasing_hom(&current, &residual)
}

/// Machine over `h`'s source alphabet with value `f(h(w))`.
pub fn gpfa_inverse_hom<T: Field>(
    g: &Gpfa<T>,
    h: &Homomorphism,
) -> Result<Gpfa<T>, ConstructionError> {
    let target = h.target();
    let remap: Vec<usize> = target
        .symbols()
        .iter()
        .map(|s| {
            g.alphabet()
                .index_of(s)
                .ok_or_else(|| ConstructionError::UnknownSymbol(s.clone()))
        })
        .collect::<Result<_, _>>()?;
    let trans = (0..h.source().len())
        .map(|s| {
            let word: Vec<usize> = h.image(s).iter().map(|&t| remap[t]).collect();
            g.word_matrix(&word)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Gpfa::new(
        h.source().clone(),
        trans,
        g.initial_vector().to_vec(),
        g.final_vector().to_vec(),
    )?)
}

/// Transposed machine, with value `f(wᴿ)`.
pub fn gpfa_reverse<T: Field>(g: &Gpfa<T>) -> Gpfa<T> {
    Gpfa::new(
        g.alphabet().clone(),
        g.transitions().iter().map(Matrix::transpose).collect(),
        g.final_vector().to_vec(),
        g.initial_vector().to_vec(),
    )
    .expect("shapes preserved")
}

/// Left quotient has value `f(wy)` on `y`; right quotient `f(zw)` on `z`.
pub fn gpfa_quotient<T: Field>(
    g: &Gpfa<T>,
    word: &[usize],
    side: Side,
) -> Result<Gpfa<T>, ConstructionError> {
    let m = g.word_matrix(word)?;
    let (v0, f) = match side {
        Side::Left => (vec_mat(g.initial_vector(), &m)?, g.final_vector().to_vec()),
        Side::Right => (g.initial_vector().to_vec(), mat_vec(&m, g.final_vector())?),
    };
    Ok(Gpfa::new(g.alphabet().clone(), g.transitions().to_vec(), v0, f)?)
}

/// Tensor-product machine with value `f₁(w)·f₂(w)`.
pub fn gpfa_intersection<T: Field>(
    g1: &Gpfa<T>,
    g2: &Gpfa<T>,
) -> Result<Gpfa<T>, ConstructionError> {
    let second = aligned(g2, g1.alphabet())?;
    let trans = g1
        .transitions()
        .iter()
        .zip(&second)
        .map(|(a, b)| a.kron(b))
        .collect();
    let kron_vec = |x: &[T], y: &[T]| -> Vec<T> {
        x.iter()
            .flat_map(|a| y.iter().map(move |b| a.clone() * b))
            .collect()
    };
    Ok(Gpfa::new(
        g1.alphabet().clone(),
        trans,
        kron_vec(g1.initial_vector(), g2.initial_vector()),
        kron_vec(g1.final_vector(), g2.final_vector()),
    )?)
}

/// Direct-sum machine with value `f₁(w) + f₂(w)`.
pub fn gpfa_union<T: Field>(g1: &Gpfa<T>, g2: &Gpfa<T>) -> Result<Gpfa<T>, ConstructionError> {
    let second = aligned(g2, g1.alphabet())?;
    let trans = g1
        .transitions()
        .iter()
        .zip(&second)
        .map(|(a, b)| a.direct_sum(b))
        .collect();
    let cat = |x: &[T], y: &[T]| -> Vec<T> { x.iter().chain(y).cloned().collect() };
    Ok(Gpfa::new(
        g1.alphabet().clone(),
        trans,
        cat(g1.initial_vector(), g2.initial_vector()),
        cat(g1.final_vector(), g2.final_vector()),
    )?)
}

/// Smallest padding bound in `1..=max_probe` whose erased machine has the
/// same positive support as the `max_probe` machine on all words up to
/// `maxlen`. A bounded heuristic: it never certifies the bound for longer
/// words.
pub fn suggest_padding_bound<T: Field>(
    g: &Gpfa<T>,
    kappa: &str,
    max_probe: usize,
    maxlen: usize,
) -> Result<usize, ConstructionError> {
    let support = |n_l: usize| -> Result<Vec<bool>, ConstructionError> {
        let m = gpfa_erasing_hom(g, kappa, n_l)?;
        let mut out = Vec::new();
        for_each_value(&m, maxlen, |_, v| out.push(v > T::zero()));
        Ok(out)
    };
    let reference = support(max_probe.max(1))?;
    for n_l in 1..max_probe.max(1) {
        if support(n_l)? == reference {
            return Ok(n_l);
        }
    }
    Ok(max_probe.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{ratio, Rational};

    fn r(n: i64) -> Rational {
        ratio(n, 1)
    }

    /// Deterministic machine over `alphabet` valuing exactly `word` at 1.
    fn single_word(alphabet: &Alphabet, word: &str) -> Gpfa<Rational> {
        let w = alphabet.parse_word(word).unwrap();
        let n = w.len() + 1;
        let trans = (0..alphabet.len())
            .map(|s| Matrix::from_fn(n, n, |i, j| if i < w.len() && w[i] == s && j == i + 1 { r(1) } else { r(0) }))
            .collect();
        let mut v0 = vec![r(0); n];
        v0[0] = r(1);
        let mut f = vec![r(0); n];
        f[n - 1] = r(1);
        Gpfa::new(alphabet.clone(), trans, v0, f).unwrap()
    }

    #[test]
    fn concat_examples() {
        let ab = Alphabet::chars("ab");
        let c = gpfa_concat(&single_word(&ab, "a"), &single_word(&ab, "b")).unwrap();
        assert_eq!(c.evaluate_str("ab").unwrap(), r(1));
        assert_eq!(c.evaluate_str("ba").unwrap(), r(0));
        assert_eq!(c.n(), 4);
        let eps = single_word(&ab, "");
        let c = gpfa_concat(&eps, &eps).unwrap();
        assert_eq!(c.evaluate_str("").unwrap(), r(1));
    }

    #[test]
    fn add_epsilon_examples() {
        let ab = Alphabet::chars("ab");
        let g = add_epsilon(&single_word(&ab, "a"), r(1));
        assert_eq!(g.evaluate_str("").unwrap(), r(1));
        assert_eq!(g.evaluate_str("a").unwrap(), r(1));
        let five = Gpfa::new(Alphabet::chars("a"), vec![Matrix::identity(1)], vec![r(1)], vec![r(5)]).unwrap();
        let g = add_epsilon(&five, r(7));
        assert_eq!(g.evaluate_str("").unwrap(), r(12));
        assert_eq!(g.evaluate_str("a").unwrap(), r(5));
    }

    #[test]
    fn star_counts_factorizations() {
        // f(ε)=1, f(a)=1 via add_epsilon on the machine for {a}
        let a = Alphabet::chars("a");
        let g = add_epsilon(&single_word(&a, "a"), r(1));
        let s = gpfa_star(&g);
        assert_eq!(s.evaluate_str("").unwrap(), r(1));
        assert_eq!(s.evaluate_str("a").unwrap(), r(2));
        assert_eq!(s.evaluate_str("aa").unwrap(), r(2));
        assert_eq!(s.evaluate_str("aaa").unwrap(), r(2));
    }

    #[test]
    fn erasing_examples() {
        let ka = Alphabet::new(["k", "a"]).unwrap();
        let g = single_word(&ka, "k a k");
        let e = gpfa_erasing_hom(&g, "k", 2).unwrap();
        assert_eq!(e.alphabet().symbols(), ["a"]);
        assert_eq!(e.evaluate_str("a").unwrap(), r(1));
        let e1 = gpfa_erasing_hom(&g, "k", 1).unwrap();
        assert_eq!(e1.evaluate_str("a").unwrap(), r(0));
        assert!(gpfa_erasing_hom(&g, "z", 2).is_err());
        assert_eq!(suggest_padding_bound(&g, "k", 4, 3).unwrap(), 2);
    }

    #[test]
    fn nonerasing_doubling() {
        let a = Alphabet::chars("a");
        let g = single_word(&a, "a");
        let h = Homomorphism::from_pairs(a.clone(), a.clone(), &[("a", "aa")]).unwrap();
        let m = gpfa_nonerasing_hom(&g, &h).unwrap();
        assert_eq!(m.n(), 2 * g.n());
        assert_eq!(m.evaluate_str("aa").unwrap(), r(1));
        assert_eq!(m.evaluate_str("a").unwrap(), r(0));
        assert_eq!(m.evaluate_str("aaa").unwrap(), r(0));
    }

    #[test]
    fn hom_with_erasure() {
        let abc = Alphabet::chars("abc");
        let ab = Alphabet::chars("ab");
        let g = single_word(&abc, "acb");
        let h = Homomorphism::from_pairs(abc, ab, &[("a", "a"), ("b", "b"), ("c", "")]).unwrap();
        let m = gpfa_hom(&g, &h, &[2]).unwrap();
        assert!(m.evaluate_str("ab").unwrap() > r(0));
        assert!(matches!(
            gpfa_hom(&g, &h, &[]),
            Err(ConstructionError::PaddingBoundCount { expected: 1, found: 0 })
        ));
    }

    #[test]
    fn hom_erasing_everything() {
        let ab = Alphabet::chars("ab");
        let g = single_word(&ab, "ab");
        let h = Homomorphism::from_pairs(ab.clone(), Alphabet::chars("x"), &[("a", ""), ("b", "")]).unwrap();
        let m = gpfa_hom(&g, &h, &[2, 2]).unwrap();
        assert_eq!(m.evaluate_str("").unwrap(), r(1));
        assert_eq!(m.evaluate_str("x").unwrap(), r(0));
    }

    #[test]
    fn inverse_hom_examples() {
        let wp = super::super::word_problem_gpfa(2).unwrap();
        let x = Alphabet::chars("x");
        let h = Homomorphism::from_pairs(x.clone(), wp.alphabet().clone(), &[("x", "g1 G1")]).unwrap();
        let m = gpfa_inverse_hom(&wp, &h).unwrap();
        assert_eq!(m.evaluate_str("x").unwrap(), r(1));
        let ab = Alphabet::chars("ab");
        let g = single_word(&ab, "");
        let erase = Homomorphism::from_pairs(ab.clone(), ab.clone(), &[("a", ""), ("b", "")]).unwrap();
        let m = gpfa_inverse_hom(&g, &erase).unwrap();
        assert_eq!(m.evaluate_str("abba").unwrap(), r(1));
    }

    #[test]
    fn reverse_and_quotient() {
        let ab = Alphabet::chars("ab");
        let g = single_word(&ab, "aab");
        let rev = gpfa_reverse(&g);
        assert_eq!(rev.evaluate_str("baa").unwrap(), r(1));
        assert_eq!(rev.evaluate_str("aab").unwrap(), r(0));
        let left = gpfa_quotient(&g, &ab.parse_word("a").unwrap(), Side::Left).unwrap();
        assert_eq!(left.evaluate_str("ab").unwrap(), r(1));
        let right = gpfa_quotient(&g, &ab.parse_word("b").unwrap(), Side::Right).unwrap();
        assert_eq!(right.evaluate_str("aa").unwrap(), r(1));
        assert_eq!(gpfa_quotient(&g, &[], Side::Left).unwrap(), g);
        assert_eq!("right".parse::<Side>().unwrap(), Side::Right);
    }

    #[test]
    fn sum_and_product() {
        let a = Alphabet::chars("a");
        let two = Gpfa::new(a.clone(), vec![Matrix::identity(1)], vec![r(1)], vec![r(2)]).unwrap();
        let three = Gpfa::new(a.clone(), vec![Matrix::identity(1)], vec![r(1)], vec![r(3)]).unwrap();
        assert_eq!(gpfa_union(&two, &three).unwrap().evaluate_str("aa").unwrap(), r(5));
        assert_eq!(gpfa_intersection(&two, &three).unwrap().evaluate_str("aa").unwrap(), r(6));
        let b = Gpfa::new(Alphabet::chars("b"), vec![Matrix::identity(1)], vec![r(1)], vec![r(3)]).unwrap();
        assert!(matches!(gpfa_union(&two, &b), Err(ConstructionError::AlphabetMismatch(..))));
    }
}

//! Exhaustive enumeration of words up to a length bound.
//!
//! The canonical order is shorter words first, lexicographic by symbol
//! index within one length. Searches walk the word tree depth-first so
//! that machine states are shared between words with a common prefix, and
//! still report the order-minimal hit.

use crate::automata::Automaton;

/// Number of words of length at most `maxlen` over `k` symbols.
pub fn count_words(k: usize, maxlen: usize) -> u64 {
    (0..=maxlen).map(|l| (k as u64).pow(l as u32)).sum()
}

/// All words of length at most `maxlen`, in canonical order.
pub fn words(k: usize, maxlen: usize) -> Words {
    Words {
        k,
        maxlen,
        current: Some(Vec::new()),
    }
}

/// Iterator returned by [`words`].
#[derive(Debug, Clone)]
pub struct Words {
    k: usize,
    maxlen: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Words {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        // odometer increment; roll over to the next length when exhausted
        let mut i = next.len();
        loop {
            if i == 0 {
                let len = next.len() + 1;
                if len > self.maxlen || self.k == 0 {
                    self.current = None;
                    return Some(out);
                }
                next = vec![0; len];
                break;
            }
            i -= 1;
            if next[i] + 1 < self.k {
                next[i] += 1;
                break;
            }
            next[i] = 0;
        }
        self.current = Some(next);
        Some(out)
    }
}

/// Depth-first search over all words up to `maxlen`, carrying a state that
/// is extended one symbol at a time. Returns the canonical-order-minimal
/// word whose state satisfies `hit`.
pub fn search<S>(
    k: usize,
    maxlen: usize,
    init: S,
    step: impl Fn(&S, usize) -> S,
    mut hit: impl FnMut(&[usize], &S) -> bool,
) -> Option<Vec<usize>> {
    struct Ctx<'a, S, F, H> {
        k: usize,
        cap: usize,
        best: Option<Vec<usize>>,
        step: &'a F,
        hit: &'a mut H,
        _s: std::marker::PhantomData<S>,
    }

    fn go<S, F: Fn(&S, usize) -> S, H: FnMut(&[usize], &S) -> bool>(
        ctx: &mut Ctx<'_, S, F, H>,
        word: &mut Vec<usize>,
        state: &S,
    ) {
        if word.len() > ctx.cap {
            return;
        }
        if (ctx.hit)(word, state) {
            ctx.best = Some(word.clone());
            if word.is_empty() {
                ctx.cap = 0;
                return;
            }
            ctx.cap = word.len() - 1;
            return;
        }
        if word.len() == ctx.cap {
            return;
        }
        for sym in 0..ctx.k {
            if word.len() >= ctx.cap {
                break;
            }
            let next = (ctx.step)(state, sym);
            word.push(sym);
            go(ctx, word, &next);
            word.pop();
            if ctx.best.as_ref().is_some_and(|b| b.is_empty()) {
                return;
            }
        }
    }

    let mut ctx = Ctx {
        k,
        cap: maxlen,
        best: None,
        step: &step,
        hit: &mut hit,
        _s: std::marker::PhantomData,
    };
    go(&mut ctx, &mut Vec::new(), &init);
    ctx.best
}

/// Canonical-order-minimal word of length at most `maxlen` on which the
/// machine's value satisfies `pred`.
pub fn find_first<A: Automaton>(
    machine: &A,
    maxlen: usize,
    mut pred: impl FnMut(&[usize], &A::Value) -> bool,
) -> Option<Vec<usize>> {
    search(
        machine.alphabet().len(),
        maxlen,
        machine.initial(),
        |s, sym| machine.advance(s, sym),
        |w, s| pred(w, &machine.finish(s)),
    )
}

/// Visits every word up to `maxlen` with its value, depth-first.
pub fn for_each_value<A: Automaton>(machine: &A, maxlen: usize, mut f: impl FnMut(&[usize], A::Value)) {
    find_first(machine, maxlen, |w, v| {
        f(w, v.clone());
        false
    });
}

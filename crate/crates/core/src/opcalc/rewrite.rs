//! Adjacent-pair rewrite rules and the normal-ordering driver.
//!
//! A word is reducible when two neighbours are out of rank order, when two
//! diagonal powers of the same sector are adjacent, or when it contains a zero
//! diagonal power. Every rule either shortens the word or removes one inversion
//! of the rank order without adding any, so rewriting terminates. The measure is
//! the pair (word length, inversion count) in lexicographic order.

use std::collections::BTreeMap;

use super::{Letter, Monomial, NormalForm};
use crate::qnumbers::LaurentCoeff;

/// Which reducible position of a word is rewritten first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

pub type Word = Vec<Letter>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Boson,
    Fermion,
    Grassmann,
}

fn family(l: Letter) -> Family {
    match l {
        Letter::Adag | Letter::A | Letter::N | Letter::QN(_) => Family::Boson,
        Letter::Fdag | Letter::F | Letter::M | Letter::QM(_) => Family::Fermion,
        Letter::Psi | Letter::PsiBar => Family::Grassmann,
    }
}

fn one() -> LaurentCoeff {
    LaurentCoeff::one()
}

fn neg_one() -> LaurentCoeff {
    LaurentCoeff::from_integer(-1)
}

/// Replacement for the segment `x y`, or `None` when the pair is already in order.
pub fn rewrite_pair(x: Letter, y: Letter) -> Option<Vec<(LaurentCoeff, Word)>> {
    use Letter::*;
    match (x, y) {
        (QN(a), QN(b)) => return Some(vec![(one(), vec![QN(a + b)])]),
        (QM(a), QM(b)) => return Some(vec![(one(), vec![QM(a + b)])]),
        _ => {}
    }
    if x.rank() <= y.rank() {
        return None;
    }
    let swap = |c: LaurentCoeff| vec![(c, vec![y, x])];
    let out = match (x, y) {
        (A, Adag) => vec![(LaurentCoeff::q_pow(1), vec![Adag, A]), (one(), vec![QN(-4)])],
        (N, Adag) => vec![(one(), vec![Adag, N]), (one(), vec![Adag])],
        (N, A) => vec![(one(), vec![A, N]), (neg_one(), vec![A])],
        (QN(k), Adag) => swap(LaurentCoeff::s_pow(k)),
        (QN(k), A) => swap(LaurentCoeff::s_pow(-k)),
        (QN(_), N) => swap(one()),
        (F, Fdag) => vec![(one(), vec![]), (-LaurentCoeff::q_pow(1), vec![Fdag, F])],
        (M, Fdag) => vec![(one(), vec![Fdag, M]), (one(), vec![Fdag])],
        (M, F) => vec![(one(), vec![F, M]), (neg_one(), vec![F])],
        (QM(k), Fdag) => swap(LaurentCoeff::s_pow(k)),
        (QM(k), F) => swap(LaurentCoeff::s_pow(-k)),
        (QM(_), M) => swap(one()),
        (PsiBar, Psi) => swap(neg_one()),
        _ => match (family(x), family(y)) {
            (Family::Fermion, Family::Boson) | (Family::Grassmann, Family::Boson) => swap(one()),
            (Family::Grassmann, Family::Fermion) => match y {
                F | Fdag => swap(neg_one()),
                _ => swap(one()),
            },
            _ => unreachable!("pair {x:?} {y:?} has no rule"),
        },
    };
    Some(out)
}

fn is_zero_power(l: Letter) -> bool {
    matches!(l, Letter::QN(0) | Letter::QM(0))
}

/// Position of a reducible pair (or zero power) under `strategy`.
fn find_redex(w: &[Letter], strategy: Strategy) -> Option<usize> {
    let reducible = |i: usize| {
        is_zero_power(w[i]) || (i + 1 < w.len() && rewrite_pair(w[i], w[i + 1]).is_some())
    };
    match strategy {
        Strategy::Leftmost => (0..w.len()).find(|&i| reducible(i)),
        Strategy::Rightmost => (0..w.len()).rev().find(|&i| reducible(i)),
    }
}

fn push(pending: &mut BTreeMap<Word, LaurentCoeff>, w: Word, c: LaurentCoeff) {
    if c.is_zero() {
        return;
    }
    let e = pending.entry(w.clone()).or_insert_with(LaurentCoeff::zero);
    *e += &c;
    if e.is_zero() {
        pending.remove(&w);
    }
}

/// Normal-order a linear combination of words.
pub fn normal_order_words(words: Vec<(LaurentCoeff, Word)>, strategy: Strategy) -> NormalForm {
    let mut pending: BTreeMap<Word, LaurentCoeff> = BTreeMap::new();
    for (c, w) in words {
        push(&mut pending, w, c);
    }
    let mut out = NormalForm::zero();
    while let Some((w, c)) = pending.pop_first() {
        let Some(i) = find_redex(&w, strategy) else {
            out.add_term(Monomial::from_sorted_word(&w), &c);
            continue;
        };
        if is_zero_power(w[i]) {
            let mut nw = w.clone();
            nw.remove(i);
            push(&mut pending, nw, c);
            continue;
        }
        let reps = rewrite_pair(w[i], w[i + 1]).expect("redex has a rule");
        for (rc, seg) in reps {
            let mut nw = Vec::with_capacity(w.len());
            nw.extend_from_slice(&w[..i]);
            nw.extend(seg);
            nw.extend_from_slice(&w[i + 2..]);
            push(&mut pending, nw, &c * &rc);
        }
    }
    out
}

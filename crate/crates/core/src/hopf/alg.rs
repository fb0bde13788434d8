//! The word algebra of H_n: rational linear combinations of PBW-ordered
//! words in the generators, reduced modulo the structure identities.
//!
//! Normal form rewrites a word by (a) canonicalizing every delta index
//! (sorting its tail, swapping the symmetric pair j <= k, and moving tail
//! letters below slot k at the cost of the quadratic structure-identity
//! correction), and (b) bubble-sorting adjacent generator pairs with the
//! commutator table.  Termination: every bracket term strictly lowers the
//! number of X/Y letters; with that fixed, a structure rewrite strictly
//! lowers the total delta order of the correction words and the slot
//! disorder of the main word; with those fixed, a swap lowers the number
//! of adjacent inversions.  The measure is well-founded, so the error arm
//! of the rewriting loop can never fire.

use super::gens::{word_to_string, DeltaIdx, HGen};
use crate::poly::{rat_int, Rational};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Word = Vec<HGen>;

/// A rational linear combination of normal-form words; `n` is the ambient
/// dimension (the structure identities contract over 1..=n).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HopfElement {
    n: u8,
    terms: BTreeMap<Word, Rational>,
}

/// The commutator [a, b] of two generators, as (word, coefficient) pairs.
/// Derived once from the fixed vector fields / multiplication operators and
/// certified against the operator action in the test suite:
///   [X_k, X_l] = 0                         (flat R^n)
///   [Y^i_j, X_k] = delta_{jk} X_i
///   [Y^i_j, Y^k_l] = delta_{kj} Y^i_l - delta_{il} Y^k_j
///   [X_l, d^a_{bc L}] = d^a_{bc L l}
///   [Y^i_j, d^a_{bc L}] = sum over lower slots s with value j of
///       d^a with slot s replaced by i, minus delta_{ia} d^j_{bc L}
///   [d, d'] = 0                            (multiplication operators)
pub fn bracket_gens(a: &HGen, b: &HGen) -> Vec<(Word, Rational)> {
    match (a, b) {
        (HGen::X(_), HGen::X(_)) | (HGen::Delta(_), HGen::Delta(_)) => Vec::new(),
        (HGen::Y(i, j), HGen::X(k)) => {
            if j == k {
                vec![(vec![HGen::X(*i)], Rational::one())]
            } else {
                Vec::new()
            }
        }
        (HGen::Y(i, j), HGen::Y(k, l)) => {
            let mut out = Vec::new();
            if k == j {
                out.push((vec![HGen::Y(*i, *l)], Rational::one()));
            }
            if i == l {
                out.push((vec![HGen::Y(*k, *j)], -Rational::one()));
            }
            out
        }
        (HGen::X(l), HGen::Delta(d)) => {
            let mut ls = d.ls.clone();
            ls.push(*l);
            vec![(
                vec![HGen::Delta(DeltaIdx::new(d.i, d.j, d.k, ls))],
                Rational::one(),
            )]
        }
        (HGen::Y(i, j), HGen::Delta(d)) => {
            let mut out = Vec::new();
            // Lower slots: j, k, then the tail letters.
            let mut slots: Vec<u8> = vec![d.j, d.k];
            slots.extend_from_slice(&d.ls);
            for (s, &val) in slots.iter().enumerate() {
                if val == *j {
                    let mut new_slots = slots.clone();
                    new_slots[s] = *i;
                    let nd = DeltaIdx::new(d.i, new_slots[0], new_slots[1], new_slots[2..].to_vec());
                    out.push((vec![HGen::Delta(nd)], Rational::one()));
                }
            }
            if d.i == *i {
                out.push((
                    vec![HGen::Delta(DeltaIdx::new(*j, d.j, d.k, d.ls.clone()))],
                    -Rational::one(),
                ));
            }
            out
        }
        // Remaining orders by antisymmetry.
        _ => bracket_gens(b, a)
            .into_iter()
            .map(|(w, c)| (w, -c))
            .collect(),
    }
}

/// Apply ad_{X_l} to a product of deltas (Leibniz: append l to one factor).
fn ad_x_products(letters: &[u8], start: Vec<(Vec<DeltaIdx>, Rational)>) -> Vec<(Vec<DeltaIdx>, Rational)> {
    let mut cur = start;
    for &l in letters {
        let mut next = Vec::new();
        for (word, c) in &cur {
            for t in 0..word.len() {
                let mut w = word.clone();
                w[t].ls.push(l);
                next.push((w, c.clone()));
            }
        }
        cur = next;
    }
    cur
}

/// If the delta index is non-canonical, return an equal element (as raw
/// words) to splice in its place.
fn delta_rewrite(n: u8, d: &DeltaIdx) -> Option<Vec<(Word, Rational)>> {
    if !d.ls.windows(2).all(|w| w[0] <= w[1]) {
        let mut ls = d.ls.clone();
        ls.sort_unstable();
        return Some(vec![(
            vec![HGen::Delta(DeltaIdx::new(d.i, d.j, d.k, ls))],
            Rational::one(),
        )]);
    }
    if d.j > d.k {
        // gamma^i_{jk} is symmetric in (j, k) and the symmetry persists
        // under the horizontal derivatives.
        return Some(vec![(
            vec![HGen::Delta(DeltaIdx::new(d.i, d.k, d.j, d.ls.clone()))],
            Rational::one(),
        )]);
    }
    if let Some(&b) = d.ls.first() {
        if d.k > b {
            // Structure identity, with the tail carried along by ad_X:
            //   d^i_{j k (b,rest)} = d^i_{j b (k,rest)}
            //     + ad_{X_rest}( sum_s d^s_{jb} d^i_{sk} - d^s_{jk} d^i_{sb} )
            let (i, j, k) = (d.i, d.j, d.k);
            let rest = &d.ls[1..];
            let mut out: Vec<(Word, Rational)> = Vec::new();
            let mut main_ls = vec![k];
            main_ls.extend_from_slice(rest);
            out.push((
                vec![HGen::Delta(DeltaIdx::new(i, j, b, main_ls))],
                Rational::one(),
            ));
            let mut quads: Vec<(Vec<DeltaIdx>, Rational)> = Vec::new();
            for s in 1..=n {
                quads.push((
                    vec![DeltaIdx::new(s, j, b, vec![]), DeltaIdx::new(i, s, k, vec![])],
                    Rational::one(),
                ));
                quads.push((
                    vec![DeltaIdx::new(s, j, k, vec![]), DeltaIdx::new(i, s, b, vec![])],
                    -Rational::one(),
                ));
            }
            for (word, c) in ad_x_products(rest, quads) {
                out.push((word.into_iter().map(HGen::Delta).collect(), c));
            }
            return Some(out);
        }
    }
    None
}

/// First position holding a non-canonical delta, with its replacement.
fn first_delta_rewrite(n: u8, w: &[HGen]) -> Option<(usize, Vec<(Word, Rational)>)> {
    for (pos, g) in w.iter().enumerate() {
        if let HGen::Delta(d) = g {
            if let Some(repl) = delta_rewrite(n, d) {
                return Some((pos, repl));
            }
        }
    }
    None
}

/// First adjacent inversion against the PBW order.
fn first_inversion(w: &[HGen]) -> Option<usize> {
    w.windows(2).position(|pair| {
        let (a, b) = (&pair[0], &pair[1]);
        a.class() > b.class() || (a.class() == b.class() && a > b)
    })
}

fn splice(w: &[HGen], pos: usize, len: usize, sub: &[HGen]) -> Word {
    let mut out = Vec::with_capacity(w.len() - len + sub.len());
    out.extend_from_slice(&w[..pos]);
    out.extend_from_slice(sub);
    out.extend_from_slice(&w[pos + len..]);
    out
}

fn nf_word(n: u8, w: Word) -> BTreeMap<Word, Rational> {
    let mut out: BTreeMap<Word, Rational> = BTreeMap::new();
    let mut stack: Vec<(Word, Rational)> = vec![(w, Rational::one())];
    while let Some((w, c)) = stack.pop() {
        if let Some((pos, repl)) = first_delta_rewrite(n, &w) {
            for (sub, k) in &repl {
                stack.push((splice(&w, pos, 1, sub), c.clone() * k));
            }
            continue;
        }
        if let Some(i) = first_inversion(&w) {
            let mut swapped = w.clone();
            swapped.swap(i, i + 1);
            for (sub, k) in bracket_gens(&w[i], &w[i + 1]) {
                stack.push((splice(&w, i, 2, &sub), c.clone() * k));
            }
            stack.push((swapped, c));
            continue;
        }
        let e = out.entry(w).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            // Removed lazily below.
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl HopfElement {
    pub fn zero(n: u8) -> Self {
        HopfElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: u8) -> Self {
        HopfElement::from_word(n, Vec::new())
    }

    pub fn generator(n: u8, g: HGen) -> Self {
        HopfElement::from_word(n, vec![g])
    }

    /// Normal form of a raw word.
    pub fn from_word(n: u8, w: Word) -> Self {
        HopfElement {
            n,
            terms: nf_word(n, w),
        }
    }

    pub fn from_terms(n: u8, terms: Vec<(Word, Rational)>) -> Self {
        let mut out = HopfElement::zero(n);
        for (w, c) in terms {
            out = out.add(&HopfElement::from_word(n, w).scale(&c));
        }
        out
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Word, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the empty word.
    pub fn scalar_part(&self) -> Rational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|w| w.iter().map(HGen::degree).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &HopfElement) -> HopfElement {
        assert_eq!(self.n, other.n);
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            let e = terms.entry(w.clone()).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(w);
            }
        }
        HopfElement { n: self.n, terms }
    }

    pub fn neg(&self) -> HopfElement {
        self.scale(&(-Rational::one()))
    }

    pub fn sub(&self, other: &HopfElement) -> HopfElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> HopfElement {
        if c.is_zero() {
            return HopfElement::zero(self.n);
        }
        HopfElement {
            n: self.n,
            terms: self.terms.iter().map(|(w, k)| (w.clone(), k * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> HopfElement {
        self.scale(&rat_int(c))
    }

    pub fn mul(&self, other: &HopfElement) -> HopfElement {
        assert_eq!(self.n, other.n);
        let mut out = HopfElement::zero(self.n);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out = out.add(&HopfElement::from_word(self.n, w).scale(&(c1 * c2)));
            }
        }
        out
    }

    /// Commutator in the word algebra.
    pub fn commutator(&self, other: &HopfElement) -> HopfElement {
        self.mul(other).sub(&other.mul(self))
    }
}

impl fmt::Display for HopfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() && !w.is_empty() {
                write!(f, "{}", word_to_string(w))?;
            } else if w.is_empty() {
                write!(f, "{}", c)?;
            } else {
                write!(f, "{} {}", c, word_to_string(w))?;
            }
        }
        Ok(())
    }
}

/// Normal form of a raw word (free-standing convenience wrapper).
pub fn normal_form(n: u8, w: &[HGen]) -> HopfElement {
    HopfElement::from_word(n, w.to_vec())
}

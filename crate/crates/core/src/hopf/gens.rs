//! Generators of the Hopf algebra H_n.
//!
//! Three families: the horizontal vector fields X_k, the vertical vector
//! fields Y^i_j (= sum_m y^m_i d/dy^m_j), and the multiplication operators
//! delta^i_{jk l1..lr} acting by the jet coordinates gamma^i_{jk l1..lr}.
//! The derived order on `HGen` realizes the PBW word order: all deltas
//! first, then X's, then Y's.

use std::fmt;

/// Index data of a delta generator delta^i_{jk l1..lr}.  The canonical
/// representative has the tail sorted, j <= k, and k <= every tail letter;
/// the symmetric pair (j,k) is freely interchangeable while moving a tail
/// letter past slot k costs quadratic correction terms (the structure
/// identities).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DeltaIdx {
    pub i: u8,
    pub j: u8,
    pub k: u8,
    pub ls: Vec<u8>,
}

impl DeltaIdx {
    pub fn new(i: u8, j: u8, k: u8, ls: Vec<u8>) -> Self {
        DeltaIdx { i, j, k, ls }
    }

    /// Number of tail letters r (so the operator involves jets of order r+2).
    pub fn order(&self) -> usize {
        self.ls.len()
    }

    /// Canonical form: tail sorted, j <= k, and (if the tail is nonempty)
    /// k <= first tail letter.
    pub fn is_canonical(&self) -> bool {
        self.ls.windows(2).all(|w| w[0] <= w[1])
            && self.j <= self.k
            && self.ls.first().map_or(true, |&l| self.k <= l)
    }
}

impl fmt::Display for DeltaIdx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d^{}_{{{}{}", self.i, self.j, self.k)?;
        if !self.ls.is_empty() {
            write!(f, " ")?;
            for l in &self.ls {
                write!(f, "{}", l)?;
            }
        }
        write!(f, "}}")
    }
}

/// A single generator of H_n.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum HGen {
    Delta(DeltaIdx),
    X(u8),
    Y(u8, u8),
}

impl HGen {
    pub fn delta(i: u8, j: u8, k: u8, ls: &[u8]) -> Self {
        HGen::Delta(DeltaIdx::new(i, j, k, ls.to_vec()))
    }

    /// PBW class: deltas before X's before Y's.
    pub fn class(&self) -> u8 {
        match self {
            HGen::Delta(_) => 0,
            HGen::X(_) => 1,
            HGen::Y(_, _) => 2,
        }
    }

    /// Filtration degree: vector fields count 1, delta^i_{jk l1..lr}
    /// counts r+1 (it is an r-fold bracket of degree-1 operators).
    pub fn degree(&self) -> usize {
        match self {
            HGen::Delta(d) => d.order() + 1,
            _ => 1,
        }
    }
}

impl fmt::Display for HGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HGen::Delta(d) => write!(f, "{}", d),
            HGen::X(k) => write!(f, "X_{}", k),
            HGen::Y(i, j) => write!(f, "Y^{}_{}", i, j),
        }
    }
}

/// All generators of degree 1 for dimension n: X_k, Y^i_j, delta^i_{jk}
/// (canonical representatives j <= k only).
pub fn degree_one_generators(n: u8) -> Vec<HGen> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in j..=n {
                out.push(HGen::delta(i, j, k, &[]));
            }
        }
    }
    for k in 1..=n {
        out.push(HGen::X(k));
    }
    for i in 1..=n {
        for j in 1..=n {
            out.push(HGen::Y(i, j));
        }
    }
    out
}

/// Render a word in the notation of the generators, "1" for the empty word.
pub fn word_to_string(w: &[HGen]) -> String {
    if w.is_empty() {
        "1".to_string()
    } else {
        w.iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

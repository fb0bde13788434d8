//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are drawn from a fixed global alphabet (`Var`): simplex
//! coordinates `t_r`, base coordinates `x^i`, frame entries `y^i_j`, jet
//! symbols `J(a;i;mu)` and abstract gamma symbols for cocycle templates.
//! The variable order is (t, x, y, jets, gammas); the term order is
//! graded-lexicographic with respect to it.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Multi-index of partial-derivative directions, stored sorted ascending
/// with zero padding.  Directions are 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct MultiIdx([u8; 8]);

impl MultiIdx {
    pub fn new(dirs: &[u8]) -> Self {
        assert!(dirs.len() <= 8, "multi-index order above 8 unsupported");
        let mut buf = [0u8; 8];
        buf[..dirs.len()].copy_from_slice(dirs);
        buf[..dirs.len()].sort_unstable();
        MultiIdx(buf)
    }

    pub fn dirs(&self) -> &[u8] {
        let len = self.0.iter().position(|&d| d == 0).unwrap_or(8);
        &self.0[..len]
    }

    pub fn order(&self) -> usize {
        self.dirs().len()
    }

    pub fn push(&self, dir: u8) -> Self {
        let mut dirs: Vec<u8> = self.dirs().to_vec();
        dirs.push(dir);
        MultiIdx::new(&dirs)
    }

    /// mu! as a rational (product of factorials of direction multiplicities).
    pub fn factorial(&self) -> Rational {
        let mut counts = [0u32; 256];
        for &d in self.dirs() {
            counts[d as usize] += 1;
        }
        let mut f = BigInt::one();
        for &c in counts.iter() {
            for k in 2..=c {
                f *= BigInt::from(k);
            }
        }
        Rational::from(f)
    }
}

/// A symbol of the global variable alphabet.  The derived order realizes
/// the fixed global variable ordering.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// Simplex coordinate t_r, r >= 1 (t_0 is always eliminated).
    T(u8),
    /// Base coordinate x^i, 1-based.
    X(u8),
    /// Frame entry y^i_j.
    Y(u8, u8),
    /// Jet symbol J(a; i; mu): coefficient of the mu-th partial derivative
    /// of the i-th component of the a-th diffeomorphism.
    Jet { diffeo: u8, comp: u8, mu: MultiIdx },
    /// Abstract gamma symbol of leg `leg` evaluated at y = 1.
    Gamma { leg: u8, i: u8, j: u8, k: u8, ls: MultiIdx },
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T(r) => write!(f, "t{}", r),
            Var::X(i) => write!(f, "x{}", i),
            Var::Y(i, j) => write!(f, "y({};{})", i, j),
            Var::Jet { diffeo, comp, mu } => {
                write!(f, "J({};{};", diffeo, comp)?;
                for d in mu.dirs() {
                    write!(f, "{}", d)?;
                }
                write!(f, ")")
            }
            Var::Gamma { leg, i, j, k, ls } => {
                write!(f, "g({};{};{};{}", leg, i, j, k)?;
                if ls.order() > 0 {
                    write!(f, ";")?;
                    for d in ls.dirs() {
                        write!(f, "{}", d)?;
                    }
                }
                write!(f, ")")
            }
        }
    }
}

/// Exponent vector, sparse: sorted by variable, exponents positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Exact monomial quotient, None if any exponent would go negative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.0.clone();
        for &(v, e) in &other.0 {
            let slot = out.iter_mut().find(|p| p.0 == v)?;
            if slot.1 < e {
                return None;
            }
            slot.1 -= e;
        }
        out.retain(|&(_, e)| e > 0);
        Some(Monomial(out))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded-lexicographic: total degree first, then the earlier variable
    /// with the higher exponent wins.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (va, ea) = self.0[i];
            let (vb, eb) = other.0[j];
            match va.cmp(&vb) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match ea.cmp(&eb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            }
        }
        match (i < self.0.len(), j < other.0.len()) {
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

/// Sparse polynomial; no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(rat_int(n))
    }

    pub fn var(v: Var) -> Self {
        Poly::term(Monomial::var(v), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    /// Some(c) when the polynomial is the constant c (including 0).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.degree() == 0 {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn partial(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let m2 = m.div(&Monomial::var(v)).unwrap();
            out.add_term(m2, c * rat_int(e as i64));
        }
        out
    }

    pub fn depends_on(&self, pred: impl Fn(Var) -> bool) -> bool {
        self.terms.keys().any(|m| m.vars().any(|v| pred(v)))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .terms
            .keys()
            .flat_map(|m| m.vars())
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Evaluate at a point.  Every variable occurring must be assigned.
    pub fn eval(&self, point: &BTreeMap<Var, Rational>) -> Result<Rational, Var> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let val = point.get(&v).ok_or(v)?;
                for _ in 0..e {
                    t *= val;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitute polynomials for variables; unaffected variables stay.
    pub fn subst(&self, map: &BTreeMap<Var, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for &(v, e) in m.pairs() {
                let img = match map.get(&v) {
                    Some(p) => p.pow(e),
                    None => Poly::term(Monomial::from_pairs(vec![(v, e)]), Rational::one()),
                };
                t = t.mul(&img);
            }
            out = out.add(&t);
        }
        out
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Exact division: Some(q) with self = q * other, None when not divisible.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if let Some(c) = other.as_constant() {
            return Some(self.scale(&(Rational::one() / c)));
        }
        let (lm, lc) = other.leading().unwrap();
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let qm = rm.div(lm)?;
            let qc = rc / lc;
            quo.add_term(qm.clone(), qc.clone());
            let piece = other.mul(&Poly::term(qm, qc));
            rem = rem.sub(&piece);
        }
        Some(quo)
    }

    /// Content-normalized generator: self divided by its leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => {
                let c = c.clone();
                self.scale(&(Rational::one() / c))
            }
            None => Poly::zero(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // print highest terms first
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !abs.is_one() || m.degree() == 0;
            if show_coeff {
                if abs.denom().is_one() {
                    write!(f, "{}", abs.numer())?;
                } else {
                    write!(f, "({}/{})", abs.numer(), abs.denom())?;
                }
            }
            let mut started = show_coeff;
            for &(v, e) in m.pairs() {
                if started {
                    write!(f, "*")?;
                }
                started = true;
                if e == 1 {
                    write!(f, "{}", v)?;
                } else {
                    write!(f, "{}^{}", v, e)?;
                }
            }
        }
        Ok(())
    }
}

//! Coproduct of H_n by Leibniz probing, and the derived structure:
//! counit, antipode, twisted antipode, modular character, iterated
//! coproduct.
//!
//! The coproduct of a generator h is the unique tensor sum h_(1) x h_(2)
//! with h(a b) = sum h_(1)(a) h_(2)(b) on the crossed product.  It is
//! determined here by exact linear algebra over probe monomials
//! a = f U_{phi^{-1}}, b = g U_{psi^{-1}} with random polynomial
//! instantiations of the generic jets up to the recorded order bound
//! (degree of h plus two), evaluated at exact rational frame points.
//! The solved tensor is then re-verified on fresh probes; for the vector
//! field generators the matching identity is additionally certified
//! symbolically in generic jet coefficients.  Higher-order delta
//! generators are never hand-coded: their candidate support comes from
//! the coproduct commutator recursion delta_{L l} = [X_l, delta_L] in
//! H x H, and the coefficients are again produced by probing.

use super::act::{act_gen, act_word, mul_monomials, CrossedMonomial};
use super::alg::{HopfElement, Word};
use super::gens::{degree_one_generators, word_to_string, DeltaIdx, HGen};
use super::solve::{independent_columns, solve_dense, LinearSolver};
use crate::error::CoreError;
use crate::jet::JetDiffeo;
use crate::localized::LocalizedPoly;
use crate::poly::{Monomial, Poly, Rational, Var};
use crate::sample::{extend_with_y_point, random_diffeo, random_x_point};
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

// ---------------------------------------------------------------------------
// Tensors over the normal-form word basis.
// ---------------------------------------------------------------------------

/// An element of H_n (x) H_n over the normal-form word basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorElement {
    n: u8,
    terms: BTreeMap<(Word, Word), Rational>,
}

impl TensorElement {
    pub fn zero(n: u8) -> Self {
        TensorElement { n, terms: BTreeMap::new() }
    }

    pub fn one(n: u8) -> Self {
        let mut t = TensorElement::zero(n);
        t.add_term(Vec::new(), Vec::new(), Rational::one());
        t
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<(Word, Word), Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add c . nf(w1) (x) nf(w2), re-expanding the normal forms.
    pub fn add_term(&mut self, w1: Word, w2: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        let h1 = HopfElement::from_word(self.n, w1);
        let h2 = HopfElement::from_word(self.n, w2);
        for (u, cu) in h1.terms() {
            for (v, cv) in h2.terms() {
                let e = self
                    .terms
                    .entry((u.clone(), v.clone()))
                    .or_insert_with(Rational::zero);
                *e += &c * cu * cv;
                if e.is_zero() {
                    self.terms.remove(&(u.clone(), v.clone()));
                }
            }
        }
    }

    /// h1 (x) h2.
    pub fn from_product(h1: &HopfElement, h2: &HopfElement) -> Self {
        assert_eq!(h1.n(), h2.n());
        let mut t = TensorElement::zero(h1.n());
        for (w1, c1) in h1.terms() {
            for (w2, c2) in h2.terms() {
                let e = t
                    .terms
                    .entry((w1.clone(), w2.clone()))
                    .or_insert_with(Rational::zero);
                *e += c1 * c2;
            }
        }
        t.terms.retain(|_, c| !c.is_zero());
        t
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for ((w1, w2), c) in &other.terms {
            let e = out
                .terms
                .entry((w1.clone(), w2.clone()))
                .or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                out.terms.remove(&(w1.clone(), w2.clone()));
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> TensorElement {
        if c.is_zero() {
            return TensorElement::zero(self.n);
        }
        TensorElement {
            n: self.n,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> TensorElement {
        self.scale(&(-Rational::one()))
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        self.add(&other.neg())
    }

    /// Legwise product in H_n (x) H_n.
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.n, other.n);
        let mut out = TensorElement::zero(self.n);
        for ((a1, a2), c) in &self.terms {
            for ((b1, b2), d) in &other.terms {
                let mut w1 = a1.clone();
                w1.extend_from_slice(b1);
                let mut w2 = a2.clone();
                w2.extend_from_slice(b2);
                out.add_term(w1, w2, c * d);
            }
        }
        out
    }

    pub fn commutator(&self, other: &TensorElement) -> TensorElement {
        self.mul(other).sub(&other.mul(self))
    }

    /// Candidate support: the distinct (word, word) pairs.
    pub fn support(&self) -> Vec<(Word, Word)> {
        self.terms.keys().cloned().collect()
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((w1, w2), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if !c.is_one() {
                write!(f, "{} ", c)?;
            }
            write!(f, "{} (x) {}", word_to_string(w1), word_to_string(w2))?;
        }
        Ok(())
    }
}

/// An element of H_n^{(x) q} over the normal-form word basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorN {
    n: u8,
    q: usize,
    terms: BTreeMap<Vec<Word>, Rational>,
}

impl TensorN {
    pub fn zero(n: u8, q: usize) -> Self {
        TensorN { n, q, terms: BTreeMap::new() }
    }

    pub fn one(n: u8, q: usize) -> Self {
        let mut t = TensorN::zero(n, q);
        t.add_term(vec![Vec::new(); q], Rational::one());
        t
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Word>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add c . nf(w_1) (x) ... (x) nf(w_q).
    pub fn add_term(&mut self, legs: Vec<Word>, c: Rational) {
        assert_eq!(legs.len(), self.q);
        if c.is_zero() {
            return;
        }
        // Expand each leg's normal form and distribute.
        let mut expanded: Vec<(Vec<Word>, Rational)> = vec![(Vec::new(), c)];
        for leg in legs {
            let h = HopfElement::from_word(self.n, leg);
            let mut next = Vec::new();
            for (prefix, cc) in &expanded {
                for (w, cw) in h.terms() {
                    let mut p = prefix.clone();
                    p.push(w.clone());
                    next.push((p, cc * cw));
                }
            }
            expanded = next;
        }
        for (legs, cc) in expanded {
            let e = self.terms.entry(legs.clone()).or_insert_with(Rational::zero);
            *e += cc;
            if e.is_zero() {
                self.terms.remove(&legs);
            }
        }
    }

    pub fn from_legs(legs: &[HopfElement]) -> Self {
        let n = legs.first().map(|h| h.n()).unwrap_or(1);
        let mut out = TensorN::zero(n, legs.len());
        let mut expanded: Vec<(Vec<Word>, Rational)> = vec![(Vec::new(), Rational::one())];
        for h in legs {
            let mut next = Vec::new();
            for (prefix, c) in &expanded {
                for (w, cw) in h.terms() {
                    let mut p = prefix.clone();
                    p.push(w.clone());
                    next.push((p, c * cw));
                }
            }
            expanded = next;
        }
        for (legs, c) in expanded {
            if !c.is_zero() {
                let e = out.terms.entry(legs.clone()).or_insert_with(Rational::zero);
                *e += c;
                if e.is_zero() {
                    out.terms.remove(&legs);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &TensorN) -> TensorN {
        assert_eq!(self.q, other.q);
        let mut out = self.clone();
        for (legs, c) in &other.terms {
            let e = out.terms.entry(legs.clone()).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                out.terms.remove(legs);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> TensorN {
        if c.is_zero() {
            return TensorN::zero(self.n, self.q);
        }
        TensorN {
            n: self.n,
            q: self.q,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> TensorN {
        self.scale(&(-Rational::one()))
    }

    pub fn sub(&self, other: &TensorN) -> TensorN {
        self.add(&other.neg())
    }

    /// Legwise product.
    pub fn mul(&self, other: &TensorN) -> TensorN {
        assert_eq!(self.q, other.q);
        let mut out = TensorN::zero(self.n, self.q);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                let legs: Vec<Word> = a
                    .iter()
                    .zip(b)
                    .map(|(w1, w2)| {
                        let mut w = w1.clone();
                        w.extend_from_slice(w2);
                        w
                    })
                    .collect();
                out.add_term(legs, c * d);
            }
        }
        out
    }
}

impl fmt::Display for TensorN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (legs, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if !c.is_one() {
                write!(f, "{} ", c)?;
            }
            let rendered: Vec<String> = legs.iter().map(|w| word_to_string(w)).collect();
            write!(f, "{}", rendered.join(" (x) "))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Probe infrastructure.
// ---------------------------------------------------------------------------

type Point = BTreeMap<Var, Rational>;

/// Numeric gamma^i_{jk}(chi) at a frame point: (y^-1 J^-1 d_mu J y)^i_j y^mu_k
/// with everything evaluated exactly.
fn gamma_values(chi: &JetDiffeo, pt: &Point) -> Result<Vec<Vec<Vec<Rational>>>, CoreError> {
    let n = chi.n() as usize;
    let jac = chi.jacobian();
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut d_a: Vec<Vec<Vec<Rational>>> = vec![vec![vec![Rational::zero(); n]; n]; n];
    for i in 1..=n as u8 {
        for j in 1..=n as u8 {
            let entry = jac.at(i, j).numerator();
            a[(i - 1) as usize][(j - 1) as usize] = eval_poly(entry, pt)?;
            for mu in 1..=n as u8 {
                d_a[(mu - 1) as usize][(i - 1) as usize][(j - 1) as usize] =
                    eval_poly(&entry.partial(Var::X(mu)), pt)?;
            }
        }
    }
    let a_inv = mat_inv(&a)?;
    let mut y = vec![vec![Rational::zero(); n]; n];
    for i in 1..=n as u8 {
        for j in 1..=n as u8 {
            y[(i - 1) as usize][(j - 1) as usize] = pt
                .get(&Var::Y(i, j))
                .cloned()
                .ok_or_else(|| CoreError::Internal("probe point missing y".into()))?;
        }
    }
    let y_inv = mat_inv(&y)?;
    let mut gamma = vec![vec![vec![Rational::zero(); n]; n]; n];
    for mu in 0..n {
        let m = mat_mul(&mat_mul(&mat_mul(&y_inv, &a_inv), &d_a[mu]), &y);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = &m[i][j] * &y[mu][k];
                    gamma[i][j][k] += v;
                }
            }
        }
    }
    Ok(gamma)
}

fn eval_poly(p: &Poly, pt: &Point) -> Result<Rational, CoreError> {
    p.eval(pt)
        .map_err(|v| CoreError::Internal(format!("probe point missing {:?}", v)))
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let mut out = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = &a[i][k] * &b[k][j];
                out[i][j] += v;
            }
        }
    }
    out
}

fn mat_inv(a: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, CoreError> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        let col = solve_dense(&a.to_vec(), &e)
            .map_err(|_| CoreError::SingularPoint("probe matrix".into()))?;
        cols.push(col);
    }
    let mut out = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = cols[j][i].clone();
        }
    }
    Ok(out)
}

/// A random monomial in (x, y) of total degree <= 2.
fn random_monomial<R: Rng>(n: u8, rng: &mut R) -> LocalizedPoly {
    let mut vars: Vec<Var> = (1..=n).map(Var::X).collect();
    for i in 1..=n {
        for j in 1..=n {
            vars.push(Var::Y(i, j));
        }
    }
    let deg = rng.gen_range(0..=2u32);
    let mut mono = Monomial::one();
    for _ in 0..deg {
        let v = vars[rng.gen_range(0..vars.len())];
        mono = mono.mul(&Monomial::var(v));
    }
    LocalizedPoly::from(Poly::term(mono, Rational::one()))
}

struct ProbeSide {
    mono: CrossedMonomial,
    /// Evaluation point of this side's coefficients.
    point: Point,
    /// gamma^i_{jk}(phi) at the point, for the delta candidates.
    gamma: Vec<Vec<Vec<Rational>>>,
}

fn make_a_probe<R: Rng>(n: u8, order: u8, idx: usize, rng: &mut R) -> Result<ProbeSide, CoreError> {
    let f = random_monomial(n, rng);
    let phi = random_diffeo(n, order as u32, rng, &format!("probeA{}", idx));
    let mut point = random_x_point(n, rng);
    extend_with_y_point(&mut point, n, rng);
    let gamma = gamma_values(&phi, &point)?;
    Ok(ProbeSide {
        mono: CrossedMonomial::new(f, phi)?,
        point,
        gamma,
    })
}

/// The image of the a-side point under prolong(phi).
fn prolong_point(phi: &JetDiffeo, pt: &Point) -> Result<Point, CoreError> {
    let map = phi.prolong_map();
    let mut out = Point::new();
    for (v, img) in &map {
        out.insert(*v, eval_poly(img, pt)?);
    }
    Ok(out)
}

/// The value of a single candidate generator-or-unit word on a probe side.
fn candidate_value(w: &Word, side: &ProbeSide) -> Result<Rational, CoreError> {
    match w.as_slice() {
        [] => side.mono.f.evaluate(&side.point),
        [HGen::Delta(d)] if d.ls.is_empty() => {
            let g = &side.gamma[(d.i - 1) as usize][(d.j - 1) as usize][(d.k - 1) as usize];
            Ok(g * side.mono.f.evaluate(&side.point)?)
        }
        _ => act_word(w, &side.mono)?.f.evaluate(&side.point),
    }
}

/// Deterministic RNG for the probe batteries, keyed per use.
fn probe_rng(n: u8, salt: u64) -> StdRng {
    StdRng::seed_from_u64(0x48_6f_70_66_0000_0000u64 ^ ((n as u64) << 32) ^ salt)
}

// ---------------------------------------------------------------------------
// Degree-one block probe.
// ---------------------------------------------------------------------------

/// Probe all degree-one generator coproducts at once over the shared
/// candidate set {1} u {generators} on both legs.
fn block_probe(n: u8, order: u8) -> Result<BTreeMap<HGen, TensorElement>, CoreError> {
    let gens = degree_one_generators(n);
    let mut cand: Vec<Word> = vec![Vec::new()];
    cand.extend(gens.iter().map(|g| vec![g.clone()]));
    let m = cand.len();
    let mut rng = probe_rng(n, order as u64);

    // Select m a-probes with independent candidate-value rows.
    let mut a_probes: Vec<ProbeSide> = Vec::new();
    let mut u_rows: Vec<Vec<Rational>> = Vec::new();
    let mut rank = LinearSolver::new(m);
    let mut attempts = 0usize;
    while a_probes.len() < m {
        attempts += 1;
        if attempts > 60 + 20 * m {
            return Err(CoreError::OrderTooLow(order as u32));
        }
        let side = match make_a_probe(n, order, attempts, &mut rng) {
            Ok(s) => s,
            Err(CoreError::SingularPoint(_)) => continue,
            Err(e) => return Err(e),
        };
        let row: Result<Vec<Rational>, CoreError> =
            cand.iter().map(|w| candidate_value(w, &side)).collect();
        let row = match row {
            Ok(r) => r,
            Err(CoreError::SingularPoint(_)) => continue,
            Err(e) => return Err(e),
        };
        let before = rank.rank();
        rank.add_equation(row.clone(), Rational::zero())?;
        if rank.rank() > before {
            u_rows.push(row);
            a_probes.push(side);
        }
    }

    // b-probes: a slightly larger battery; independence is checked per
    // a-probe point below.
    let mut b_probes: Vec<CrossedMonomial> = Vec::new();
    let mut b_attempts = 0usize;
    while b_probes.len() < m + 6 {
        b_attempts += 1;
        if b_attempts > 200 + 20 * m {
            return Err(CoreError::OrderTooLow(order as u32));
        }
        let g = random_monomial(n, &mut rng);
        let psi = random_diffeo(n, order as u32, &mut rng, &format!("probeB{}", b_attempts));
        b_probes.push(CrossedMonomial::new(g, psi)?);
    }

    // Per a-probe: candidate values of the b battery at the prolonged point,
    // the composite group elements, and the numeric composite gammas.
    struct BlockRow {
        v_rows: Vec<Vec<Rational>>,
        sel: Vec<usize>,
        f_ab: Vec<LocalizedPoly>,
        comp_gamma: Vec<Vec<Vec<Vec<Rational>>>>,
    }
    let mut blocks: Vec<BlockRow> = Vec::new();
    for a in &a_probes {
        let w_pt = prolong_point(&a.mono.phi, &a.point)?;
        let mut v_rows = Vec::new();
        let mut f_ab = Vec::new();
        let mut comp_gamma = Vec::new();
        for b in &b_probes {
            let b_side = ProbeSide {
                mono: b.clone(),
                point: w_pt.clone(),
                gamma: gamma_values(&b.phi, &w_pt)?,
            };
            let row: Vec<Rational> = cand
                .iter()
                .map(|w| candidate_value(w, &b_side))
                .collect::<Result<_, _>>()?;
            v_rows.push(row);
            let ab = mul_monomials(&a.mono, b)?;
            comp_gamma.push(gamma_values(&ab.phi, &a.point)?);
            f_ab.push(ab.f);
        }
        // Select m independent b-probes for this block.
        let transposed: Vec<Vec<Rational>> = (0..m)
            .map(|v| v_rows.iter().map(|r| r[v].clone()).collect())
            .collect();
        let sel = independent_columns(&transposed, m)
            .ok_or(CoreError::OrderTooLow(order as u32))?;
        blocks.push(BlockRow {
            v_rows,
            sel,
            f_ab,
            comp_gamma,
        });
    }

    let mut out = BTreeMap::new();
    for h in &gens {
        // Left-hand side values per (a-probe, b-probe).
        let mut c_rows: Vec<Vec<Rational>> = Vec::new();
        for (a, block) in a_probes.iter().zip(&blocks) {
            let mut lhs_all: Vec<Rational> = Vec::with_capacity(b_probes.len());
            for (t, f_ab) in block.f_ab.iter().enumerate() {
                let v = match h {
                    HGen::Delta(d) => {
                        let g = &block.comp_gamma[t][(d.i - 1) as usize][(d.j - 1) as usize]
                            [(d.k - 1) as usize];
                        g * f_ab.evaluate(&a.point)?
                    }
                    _ => {
                        let acted = act_gen(
                            h,
                            &CrossedMonomial {
                                f: f_ab.clone(),
                                phi: a.mono.phi.clone(),
                            },
                        )?;
                        acted.f.evaluate(&a.point)?
                    }
                };
                lhs_all.push(v);
            }
            // Solve the selected square system for m_s, then verify the
            // unselected rows (the honest failure mode is order-too-low).
            let v_sq: Vec<Vec<Rational>> =
                block.sel.iter().map(|&t| block.v_rows[t].clone()).collect();
            let l_sq: Vec<Rational> = block.sel.iter().map(|&t| lhs_all[t].clone()).collect();
            let m_s = solve_dense(&v_sq, &l_sq)?;
            for (t, row) in block.v_rows.iter().enumerate() {
                let mut acc = Rational::zero();
                for (v, mv) in row.iter().zip(&m_s) {
                    acc += v * mv;
                }
                if acc != lhs_all[t] {
                    return Err(CoreError::OrderTooLow(order as u32));
                }
            }
            c_rows.push(m_s);
        }
        // Stage two: U . C[:, v] = m[:, v] for each candidate v.
        let mut tensor = TensorElement::zero(n);
        for v in 0..m {
            let rhs: Vec<Rational> = c_rows.iter().map(|r| r[v].clone()).collect();
            let col = solve_dense(&u_rows, &rhs)?;
            for (u, c) in col.into_iter().enumerate() {
                if !c.is_zero() {
                    tensor.add_term(cand[u].clone(), cand[v].clone(), c);
                }
            }
        }
        verify_probes(n, &[h.clone()], &tensor, order, 5, 1000 + order as u64)?;
        out.insert(h.clone(), tensor);
    }
    Ok(out)
}

/// Verify h(ab) = sum h_(1)(a) h_(2)(b) on `count` fresh random probes,
/// exactly.  `h_word` is acted as a raw word.
fn verify_probes(
    n: u8,
    h_word: &[HGen],
    tensor: &TensorElement,
    order: u8,
    count: usize,
    salt: u64,
) -> Result<(), CoreError> {
    let mut rng = probe_rng(n, 0xFEED ^ salt);
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < count {
        attempts += 1;
        if attempts > 50 + 10 * count {
            return Err(CoreError::OrderTooLow(order as u32));
        }
        let res = (|| -> Result<bool, CoreError> {
            let a = make_a_probe(n, order, 7000 + attempts, &mut rng)?;
            let g = random_monomial(n, &mut rng);
            let psi = random_diffeo(n, order as u32, &mut rng, &format!("probeV{}", attempts));
            let b_mono = CrossedMonomial::new(g, psi)?;
            let w_pt = prolong_point(&a.mono.phi, &a.point)?;
            let b = ProbeSide {
                gamma: gamma_values(&b_mono.phi, &w_pt)?,
                mono: b_mono,
                point: w_pt,
            };
            let ab = mul_monomials(&a.mono, &b.mono)?;
            let lhs = act_word(h_word, &ab)?.f.evaluate(&a.point)?;
            let mut rhs = Rational::zero();
            for ((w1, w2), c) in tensor.terms() {
                rhs += c * candidate_value(w1, &a)? * candidate_value(w2, &b)?;
            }
            Ok(lhs == rhs)
        })();
        match res {
            Ok(true) => done += 1,
            Ok(false) => return Err(CoreError::OrderTooLow(order as u32)),
            Err(CoreError::SingularPoint(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Symbolic certification of the Leibniz identity for a vector-field
/// generator: both sides are compared as exact coefficient functions with
/// fully generic jets of the given order on both probe legs.
fn certify_symbolic(n: u8, h: &HGen, tensor: &TensorElement, order: u8) -> Result<(), CoreError> {
    let phi = JetDiffeo::generic(n, 1, order);
    let psi = JetDiffeo::generic(n, 2, order);
    let p_map = phi.prolong_map();
    let mut batt: Vec<LocalizedPoly> = vec![LocalizedPoly::one()];
    for i in 1..=n {
        batt.push(LocalizedPoly::var(Var::X(i)));
    }
    for i in 1..=n {
        for j in 1..=n {
            batt.push(LocalizedPoly::var(Var::Y(i, j)));
        }
    }
    for f in &batt {
        let a = CrossedMonomial::new(f.clone(), phi.clone())?;
        for g in &batt {
            let b = CrossedMonomial::new(g.clone(), psi.clone())?;
            // Coefficient of the product, without building the composite
            // group element (only the coefficient identities are compared;
            // the group legs agree by construction).
            let f_ab = a.f.mul(&b.f.subst(&p_map)?);
            let lhs = act_gen(
                h,
                &CrossedMonomial {
                    f: f_ab,
                    phi: phi.clone(),
                },
            )?
            .f;
            let mut rhs = LocalizedPoly::zero();
            for ((w1, w2), c) in tensor.terms() {
                let ua = act_word(w1, &a)?.f;
                let vb = act_word(w2, &b)?.f.subst(&p_map)?;
                rhs = rhs.add(&ua.mul(&vb).scale(c));
            }
            if !lhs.sub(&rhs).normalize().is_zero() {
                return Err(CoreError::Internal(format!(
                    "symbolic Leibniz certification failed for {}",
                    h
                )));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// The cached coproduct.
// ---------------------------------------------------------------------------

static COPRODUCT_CACHE: Lazy<Mutex<HashMap<(u8, HGen), TensorElement>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// The probed coproduct of a single (canonical) generator, at the default
/// jet-order bound degree + 2.  Cached.
pub fn coproduct(n: u8, g: &HGen) -> Result<TensorElement, CoreError> {
    if let Some(t) = COPRODUCT_CACHE.lock().unwrap().get(&(n, g.clone())) {
        return Ok(t.clone());
    }
    let t = probe_generator(n, g, (g.degree() + 2) as u8)?;
    Ok(t)
}

/// Probe the coproduct of one generator at the given jet-order bound.
pub fn probe_generator(n: u8, g: &HGen, order: u8) -> Result<TensorElement, CoreError> {
    if g.degree() == 1 {
        let all = block_probe(n, order)?;
        // Certify the vector-field identities symbolically in generic jets.
        for (gen, tensor) in &all {
            if !matches!(gen, HGen::Delta(_)) {
                certify_symbolic(n, gen, tensor, order)?;
            }
        }
        let out = all
            .get(g)
            .cloned()
            .ok_or_else(|| CoreError::Internal("generator missing from block probe".into()))?;
        if order == (g.degree() + 2) as u8 {
            let mut cache = COPRODUCT_CACHE.lock().unwrap();
            for (gen, tensor) in all {
                cache.entry((n, gen)).or_insert(tensor);
            }
        }
        return Ok(out);
    }
    let d = match g {
        HGen::Delta(d) => d,
        _ => return Err(CoreError::Unsupported("only delta generators exceed degree one".into())),
    };
    if !d.is_canonical() {
        return Err(CoreError::Unsupported(
            "coproduct probe expects a canonical delta index".into(),
        ));
    }
    // Candidate support from the commutator recursion
    //   Delta(d^i_{jk L l}) = [Delta(X_l), Delta(d^i_{jk L})] .
    let l = *d.ls.last().unwrap();
    let parent = HGen::Delta(DeltaIdx::new(d.i, d.j, d.k, d.ls[..d.ls.len() - 1].to_vec()));
    let t_parent = coproduct(n, &parent)?;
    let t_x = coproduct(n, &HGen::X(l))?;
    let expected = t_x.commutator(&t_parent);
    let mut cand = expected.support();
    for extra in [
        (vec![g.clone()], Vec::new()),
        (Vec::new(), vec![g.clone()]),
    ] {
        if !cand.contains(&extra) {
            cand.push(extra);
        }
    }
    let tensor = probe_over_support(n, g, &cand, order)?;
    if tensor != expected {
        return Err(CoreError::Internal(format!(
            "probed coproduct of {} disagrees with the commutator recursion",
            g
        )));
    }
    verify_probes(n, std::slice::from_ref(g), &tensor, order, 5, 2000 + order as u64)?;
    if order == (g.degree() + 2) as u8 {
        COPRODUCT_CACHE
            .lock()
            .unwrap()
            .entry((n, g.clone()))
            .or_insert_with(|| tensor.clone());
    }
    Ok(tensor)
}

/// Solve for the coproduct coefficients over an explicit candidate support
/// by accumulating probe equations until the system is uniquely solvable.
fn probe_over_support(
    n: u8,
    g: &HGen,
    cand: &[(Word, Word)],
    order: u8,
) -> Result<TensorElement, CoreError> {
    let mut rng = probe_rng(n, 0xD0 ^ (order as u64));
    let mut solver = LinearSolver::new(cand.len());
    let mut attempts = 0usize;
    let target = cand.len();
    while solver.rank() < target {
        attempts += 1;
        if attempts > 80 + 20 * target {
            return Err(CoreError::OrderTooLow(order as u32));
        }
        let res = (|| -> Result<(Vec<Rational>, Rational), CoreError> {
            let a = make_a_probe(n, order, 9000 + attempts, &mut rng)?;
            let gm = random_monomial(n, &mut rng);
            let psi = random_diffeo(n, order as u32, &mut rng, &format!("probeS{}", attempts));
            let b_mono = CrossedMonomial::new(gm, psi)?;
            let w_pt = prolong_point(&a.mono.phi, &a.point)?;
            let b = ProbeSide {
                gamma: gamma_values(&b_mono.phi, &w_pt)?,
                mono: b_mono,
                point: w_pt,
            };
            let ab = mul_monomials(&a.mono, &b.mono)?;
            let rhs = act_gen(g, &ab)?.f.evaluate(&a.point)?;
            let row: Vec<Rational> = cand
                .iter()
                .map(|(w1, w2)| Ok(candidate_value(w1, &a)? * candidate_value(w2, &b)?))
                .collect::<Result<_, CoreError>>()?;
            Ok((row, rhs))
        })();
        match res {
            Ok((row, rhs)) => solver.add_equation(row, rhs)?,
            Err(CoreError::SingularPoint(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let sol = solver.solve_unique()?;
    let mut tensor = TensorElement::zero(n);
    for ((w1, w2), c) in cand.iter().zip(sol) {
        if !c.is_zero() {
            tensor.add_term(w1.clone(), w2.clone(), c);
        }
    }
    Ok(tensor)
}

/// The coproduct of a general element: multiplicative extension over the
/// normal-form words, every generator tensor produced by probing at jet
/// order at least max(order, degree + 2).
pub fn coproduct_probe(h: &HopfElement, order: u8) -> Result<TensorElement, CoreError> {
    let n = h.n();
    let mut out = TensorElement::zero(n);
    for (w, c) in h.terms() {
        let mut t = TensorElement::one(n);
        for g in w {
            let need = ((g.degree() + 2) as u8).max(order);
            let tg = if need == (g.degree() + 2) as u8 {
                coproduct(n, g)?
            } else {
                probe_generator(n, g, need)?
            };
            t = t.mul(&tg);
        }
        out = out.add(&t.scale(c));
    }
    Ok(out)
}

/// Coproduct of a normal-form word.
pub fn delta_word(n: u8, w: &[HGen]) -> Result<TensorElement, CoreError> {
    let mut t = TensorElement::one(n);
    for g in w {
        t = t.mul(&coproduct(n, g)?);
    }
    Ok(t)
}

/// The iterated coproduct with q legs (q >= 1).
pub fn iterated_coproduct(h: &HopfElement, q: usize) -> Result<TensorN, CoreError> {
    assert!(q >= 1);
    let n = h.n();
    let mut cur = TensorN::from_legs(std::slice::from_ref(h));
    while cur.q() < q {
        let mut next = TensorN::zero(n, cur.q() + 1);
        for (legs, c) in cur.terms() {
            let first = delta_word(n, &legs[0])?;
            for ((w1, w2), d) in first.terms() {
                let mut new_legs = vec![w1.clone(), w2.clone()];
                new_legs.extend_from_slice(&legs[1..]);
                next.add_term(new_legs, c * d);
            }
        }
        cur = next;
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// Counit, character, antipode, twisted antipode.
// ---------------------------------------------------------------------------

/// The counit eps(h) = h(1), computed by acting on 1 . U_id.
pub fn counit(h: &HopfElement) -> Result<Rational, CoreError> {
    let unit = CrossedMonomial::unit(h.n());
    let acted = super::act::act(h, &unit)?;
    let mut out = Rational::zero();
    for m in acted.terms() {
        if !m.phi.is_identity() {
            return Err(CoreError::Internal("counit left the identity fiber".into()));
        }
        out += m
            .f
            .as_constant()
            .ok_or_else(|| CoreError::Internal("counit value is not a scalar".into()))?;
    }
    Ok(out)
}

/// The modular character: delta(Y^i_j) = [i=j], delta(X_k) = 0,
/// delta(d^i_{jk l..}) = 0, extended multiplicatively.
pub fn character(h: &HopfElement) -> Rational {
    let mut out = Rational::zero();
    for (w, c) in h.terms() {
        let mut v = c.clone();
        for g in w {
            match g {
                HGen::Y(i, j) if i == j => {}
                _ => {
                    v = Rational::zero();
                    break;
                }
            }
        }
        out += v;
    }
    out
}

fn character_word(w: &[HGen]) -> Rational {
    for g in w {
        match g {
            HGen::Y(i, j) if i == j => {}
            _ => return Rational::zero(),
        }
    }
    Rational::one()
}

static ANTIPODE_CACHE: Lazy<Mutex<HashMap<(u8, HGen), HopfElement>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// The antipode on a single generator, from the axiom
/// sum S(h_(1)) h_(2) = eps(h) = 0 and the probed coproduct.
fn antipode_gen(n: u8, g: &HGen, in_progress: &mut Vec<HGen>) -> Result<HopfElement, CoreError> {
    if let Some(s) = ANTIPODE_CACHE.lock().unwrap().get(&(n, g.clone())) {
        return Ok(s.clone());
    }
    if in_progress.contains(g) {
        return Err(CoreError::Internal("cyclic antipode recursion".into()));
    }
    in_progress.push(g.clone());
    let delta = coproduct(n, g)?;
    // Split Delta(g) = g (x) 1 + 1 (x) g + sum c . u (x) v (u, v nonempty).
    let mut s = HopfElement::generator(n, g.clone()).neg();
    for ((w1, w2), c) in delta.terms() {
        if w1.is_empty() || w2.is_empty() {
            continue;
        }
        let su = antipode_word(n, w1, in_progress)?;
        let v = HopfElement::from_word(n, w2.clone());
        s = s.sub(&su.mul(&v).scale(c));
    }
    in_progress.pop();
    ANTIPODE_CACHE
        .lock()
        .unwrap()
        .entry((n, g.clone()))
        .or_insert_with(|| s.clone());
    Ok(s)
}

fn antipode_word(n: u8, w: &[HGen], in_progress: &mut Vec<HGen>) -> Result<HopfElement, CoreError> {
    let mut out = HopfElement::one(n);
    for g in w.iter().rev() {
        out = out.mul(&antipode_gen(n, g, in_progress)?);
    }
    Ok(out)
}

/// The antipode, anti-multiplicative over normal-form words.
pub fn antipode(h: &HopfElement) -> Result<HopfElement, CoreError> {
    let n = h.n();
    let mut out = HopfElement::zero(n);
    let mut guard = Vec::new();
    for (w, c) in h.terms() {
        out = out.add(&antipode_word(n, w, &mut guard)?.scale(c));
    }
    Ok(out)
}

/// The twisted antipode S_delta(h) = sum delta(h_(1)) S(h_(2)),
/// anti-multiplicative over normal-form words.
pub fn s_delta(h: &HopfElement) -> Result<HopfElement, CoreError> {
    let n = h.n();
    let mut out = HopfElement::zero(n);
    let mut guard = Vec::new();
    for (w, c) in h.terms() {
        let mut word_val = HopfElement::one(n);
        for g in w.iter().rev() {
            let delta = coproduct(n, g)?;
            let mut sg = HopfElement::zero(n);
            for ((w1, w2), d) in delta.terms() {
                let chi = character_word(w1);
                if !chi.is_zero() {
                    sg = sg.add(&antipode_word(n, w2, &mut guard)?.scale(&(d * chi)));
                }
            }
            word_val = word_val.mul(&sg);
        }
        out = out.add(&word_val.scale(c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::gens::degree_one_generators;
    use super::*;
    use crate::poly::rat_int;

    fn d(i: u8, j: u8, k: u8, ls: &[u8]) -> HGen {
        HGen::delta(i, j, k, ls)
    }

    fn gen_el(n: u8, g: HGen) -> HopfElement {
        HopfElement::generator(n, g)
    }

    /// Delta(X_k) = X_k (x) 1 + 1 (x) X_k + sum_{i,j} d^i_{jk} (x) Y^i_j.
    fn expected_delta_x(n: u8, k: u8) -> TensorElement {
        let mut t = TensorElement::zero(n);
        t.add_term(vec![HGen::X(k)], Vec::new(), rat_int(1));
        t.add_term(Vec::new(), vec![HGen::X(k)], rat_int(1));
        for i in 1..=n {
            for j in 1..=n {
                t.add_term(vec![d(i, j, k, &[])], vec![HGen::Y(i, j)], rat_int(1));
            }
        }
        t
    }

    fn primitive(n: u8, g: HGen) -> TensorElement {
        let mut t = TensorElement::zero(n);
        t.add_term(vec![g.clone()], Vec::new(), rat_int(1));
        t.add_term(Vec::new(), vec![g], rat_int(1));
        t
    }

    #[test]
    fn probed_coproducts_n1() {
        assert_eq!(coproduct(1, &HGen::X(1)).unwrap(), expected_delta_x(1, 1));
        assert_eq!(coproduct(1, &HGen::Y(1, 1)).unwrap(), primitive(1, HGen::Y(1, 1)));
        assert_eq!(
            coproduct(1, &d(1, 1, 1, &[])).unwrap(),
            primitive(1, d(1, 1, 1, &[]))
        );
    }

    #[test]
    fn probed_coproduct_of_higher_delta_n1() {
        // Delta(d^1_{111}) from the commutator recursion, re-probed:
        // [Delta X_1, Delta d^1_{11}] = d^1_{111} (x) 1 + 1 (x) d^1_{111}
        //   + d^1_{11} (x) [X_1 + Y^1_1, ...]-terms.
        let g = d(1, 1, 1, &[1]);
        let t = coproduct(1, &g).unwrap();
        // Coassociativity-derived sanity: the counit axiom picks out the
        // primitive part exactly.
        let mut prim = Rational::zero();
        for ((w1, w2), c) in t.terms() {
            if w1.is_empty() && w2 == &vec![g.clone()] {
                prim = c.clone();
            }
        }
        assert_eq!(prim, rat_int(1));
        // The full tensor satisfies Leibniz on fresh probes (done inside
        // the probe) and matches the recursion; just check it is nontrivial.
        assert!(t.terms().len() > 2);
    }

    #[test]
    fn probed_coproducts_n2_match_display() {
        for k in 1..=2 {
            assert_eq!(coproduct(2, &HGen::X(k)).unwrap(), expected_delta_x(2, k));
        }
        for g in degree_one_generators(2) {
            match g {
                HGen::X(_) => {}
                _ => assert_eq!(coproduct(2, &g).unwrap(), primitive(2, g)),
            }
        }
    }

    #[test]
    fn coassociativity_on_generators() {
        for n in [1u8, 2] {
            for g in degree_one_generators(n) {
                let t = coproduct(n, &g).unwrap();
                let mut left = TensorN::zero(n, 3);
                let mut right = TensorN::zero(n, 3);
                for ((w1, w2), c) in t.terms() {
                    for ((u1, u2), cc) in delta_word(n, w1).unwrap().terms() {
                        left.add_term(vec![u1.clone(), u2.clone(), w2.clone()], c * cc);
                    }
                    for ((u1, u2), cc) in delta_word(n, w2).unwrap().terms() {
                        right.add_term(vec![w1.clone(), u1.clone(), u2.clone()], c * cc);
                    }
                }
                assert_eq!(left, right, "coassociativity for {}", g);
            }
        }
    }

    #[test]
    fn counit_via_action() {
        assert_eq!(counit(&HopfElement::one(1)).unwrap(), rat_int(1));
        assert_eq!(counit(&gen_el(1, HGen::X(1))).unwrap(), rat_int(0));
        assert_eq!(counit(&gen_el(2, HGen::Y(1, 1))).unwrap(), rat_int(0));
        let w = gen_el(2, d(1, 1, 2, &[])).mul(&gen_el(2, HGen::X(1)));
        assert_eq!(counit(&w).unwrap(), rat_int(0));
    }

    #[test]
    fn antipode_on_generators() {
        // S(Y) = -Y, S(d) = -d, S(X_k) = -X_k + sum d^i_{jk} Y^i_j.
        for n in [1u8, 2] {
            for g in degree_one_generators(n) {
                let s = antipode(&gen_el(n, g.clone())).unwrap();
                match g {
                    HGen::X(k) => {
                        let mut want = gen_el(n, HGen::X(k)).neg();
                        for i in 1..=n {
                            for j in 1..=n {
                                want = want.add(
                                    &gen_el(n, d(i, j, k, &[])).mul(&gen_el(n, HGen::Y(i, j))),
                                );
                            }
                        }
                        assert_eq!(s, want);
                    }
                    _ => assert_eq!(s, gen_el(n, g).neg()),
                }
            }
        }
    }

    #[test]
    fn antipode_axiom_on_generators() {
        // m(S (x) id) Delta(h) = eps(h) 1 on generators and a product.
        for n in [1u8, 2] {
            for g in degree_one_generators(n) {
                let t = coproduct(n, &g).unwrap();
                let mut acc = HopfElement::zero(n);
                for ((w1, w2), c) in t.terms() {
                    let s1 = antipode(&HopfElement::from_word(n, w1.clone())).unwrap();
                    acc = acc.add(&s1.mul(&HopfElement::from_word(n, w2.clone())).scale(c));
                }
                assert!(acc.is_zero(), "antipode axiom for {}", g);
            }
        }
    }

    #[test]
    fn twisted_antipode_values_and_involution() {
        // S_delta(Y^i_j) = [i=j] - Y^i_j; S_delta^2 = Id on r <= 1 generators.
        let n = 2;
        for i in 1..=n {
            for j in 1..=n {
                let y = gen_el(n, HGen::Y(i, j));
                let want = HopfElement::one(n)
                    .scale(&rat_int(if i == j { 1 } else { 0 }))
                    .sub(&y);
                assert_eq!(s_delta(&y).unwrap(), want);
            }
        }
        let mut gens = degree_one_generators(n);
        gens.push(d(1, 1, 2, &[2]));
        for g in gens {
            let h = gen_el(n, g.clone());
            let twice = s_delta(&s_delta(&h).unwrap()).unwrap();
            assert_eq!(twice, h, "S_delta^2 on {}", g);
        }
    }

    #[test]
    fn iterated_coproduct_legs() {
        let h = gen_el(1, HGen::X(1));
        let t3 = iterated_coproduct(&h, 3).unwrap();
        // X (x) 1 (x) 1 appears with coefficient 1.
        let key = vec![vec![HGen::X(1)], Vec::new(), Vec::new()];
        assert_eq!(t3.terms().get(&key), Some(&rat_int(1)));
        // Total Leibniz consistency: applying eps to the middle leg
        // recovers Delta(X).
        let mut back = TensorElement::zero(1);
        for (legs, c) in t3.terms() {
            if legs[1].is_empty() {
                back.add_term(legs[0].clone(), legs[2].clone(), c.clone());
            }
        }
        assert_eq!(back, coproduct(1, &HGen::X(1)).unwrap());
    }
}

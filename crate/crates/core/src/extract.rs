//! From Chern group cocycles to Hopf cyclic tensors.
//!
//! The diffeomorphisms enter every basic cocycle solely through the
//! matrix-valued 1-forms Gamma(phi) = phi'^{-1} d phi', so the
//! inhomogeneous cocycle components C_J^{(p)}(phi_1, .., phi_p) admit a
//! *jet template*: a form whose coefficients are polynomials in abstract
//! per-leg gamma symbols at y = 1.  Substituting delta-generators for the
//! gamma symbols and one right X_k factor per remaining coordinate
//! direction produces the Hopf cyclic Chern tensor; the integrand-level
//! Phi check compares the group cochain with the characteristic pairing
//! of the tensor on sample crossed-product monomials.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chern::{chern_class_product, chern_cocycle, dt_form, t_poly, Mode};
use crate::cochain::GroupCochain;
use crate::cyclic::CyclicTensor;
use crate::error::CoreError;
use crate::form::{BiForm, FormMatrix, Gen, GenSet};
use crate::hopf::{act_word, mul_monomials, CrossedMonomial, HGen, TensorN, Word};
use crate::jet::{y_identity_map, JetDiffeo};
use crate::localized::LocalizedPoly;
use crate::poly::{rat_int, MultiIdx, Poly, Rational, Var};
use crate::sample::{random_diffeo, random_nonzero_rational, random_rational};

/// Inhomogeneous expansion of C_J^{(p)} in per-leg gamma symbols at y = 1.
///
/// The form lives on R^n (simplex already integrated out); its coefficients
/// are polynomials in `Var::Gamma { leg, .. }` with legs 1..=p and carry no
/// other variables.
#[derive(Clone, Debug)]
pub struct JetTemplate {
    n: u8,
    j_parts: Vec<u8>,
    p: u8,
    form: BiForm,
}

impl JetTemplate {
    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn j_parts(&self) -> &[u8] {
        &self.j_parts
    }

    pub fn form(&self) -> &BiForm {
        &self.form
    }

    /// Largest jet order r among the gamma symbols gamma^i_{jk l1..lr}.
    pub fn max_symbol_order(&self) -> usize {
        let mut max = 0;
        for (_, c) in self.form.terms() {
            for v in c.vars() {
                if let Var::Gamma { ls, .. } = v {
                    max = max.max(ls.order());
                }
            }
        }
        max
    }

    /// Substitute concrete diffeomorphisms for the legs.  The gamma symbol
    /// of leg a is evaluated at the prolonged point of the tail composite
    /// phi_{a+1} o .. o phi_p at y = 1, which is exactly how the connection
    /// form of the homogeneous argument rho_{a-1} decomposes leg by leg.
    pub fn evaluate(&self, legs: &[JetDiffeo]) -> Result<BiForm, CoreError> {
        let n = self.n;
        let p = self.p as usize;
        if legs.len() != p {
            return Err(CoreError::DimensionMismatch(format!(
                "template expects {} legs, got {}",
                p,
                legs.len()
            )));
        }
        // tails[a-1] = phi_{a+1} o .. o phi_p (identity for a = p)
        let mut tails: Vec<JetDiffeo> = vec![JetDiffeo::identity(n); p];
        for a in (0..p.saturating_sub(1)).rev() {
            tails[a] = legs[a + 1].compose(&tails[a + 1])?;
        }
        let prolongs: Vec<BTreeMap<Var, Poly>> =
            tails.iter().map(|t| t.prolong_map()).collect();
        let ymap = y_identity_map(n);
        let mut vals: BTreeMap<Var, LocalizedPoly> = BTreeMap::new();
        for (_, c) in self.form.terms() {
            for v in c.vars() {
                if vals.contains_key(&v) {
                    continue;
                }
                if let Var::Gamma { leg, i, j, k, ls } = &v {
                    let a = *leg as usize;
                    if a == 0 || a > p {
                        return Err(CoreError::Internal(format!(
                            "template symbol with leg {} out of 1..{}",
                            a, p
                        )));
                    }
                    let g = legs[a - 1].gamma_coeff(*i, *j, *k, ls.dirs(), true)?;
                    let g = g.subst(&prolongs[a - 1])?.subst(&ymap)?;
                    vals.insert(v, g);
                } else {
                    return Err(CoreError::Internal(format!(
                        "template coefficient carries non-gamma variable {}",
                        v
                    )));
                }
            }
        }
        let mut out = BiForm::zero(n, 0);
        for (gens, c) in self.form.terms() {
            if !c.denominators().is_empty() {
                return Err(CoreError::Internal(
                    "template coefficient has a denominator".into(),
                ));
            }
            for (m, k) in c.numerator().terms() {
                let mut acc = LocalizedPoly::constant(k.clone());
                for &(v, e) in m.pairs() {
                    acc = acc.mul(&vals[&v].pow(e as i64)?);
                }
                out.add_term(gens.clone(), acc);
            }
        }
        Ok(out)
    }
}

/// Connection template of the a-th leg: entries sum_k g(a;i;j;k) dx^k.
fn gamma_leg_matrix(n: u8, p: u8, leg: u8) -> FormMatrix {
    let mut m = FormMatrix::zero(n, p);
    for i in 1..=n {
        for j in 1..=n {
            let mut entry = BiForm::zero(n, p);
            for k in 1..=n {
                entry.add_term(
                    vec![Gen::Dx(k)],
                    LocalizedPoly::var(Var::Gamma {
                        leg,
                        i,
                        j,
                        k,
                        ls: MultiIdx::new(&[]),
                    }),
                );
            }
            m.set(i, j, entry);
        }
    }
    m
}

/// Build and validate the jet template of C_J^{(p)} in inhomogeneous
/// coordinates: the r-th homogeneous argument is the tail composite, whose
/// connection form is the sum of the leg templates a = r+1..p, so the
/// closed-form curvature expansion applies verbatim with formal symbols
/// (the exterior differential never reaches a gamma symbol).
pub fn jet_template(n: u8, j_parts: &[u8], p: u8) -> Result<JetTemplate, CoreError> {
    let total: u32 = j_parts.iter().map(|&q| q as u32).sum();
    if p as u32 > 2 * total {
        return Err(CoreError::InvalidClass(format!(
            "level p = {} exceeds 2|J| = {}",
            p,
            2 * total
        )));
    }
    // connection of the r-th homogeneous slot, r = 0..p (the last is e)
    let conns: Vec<FormMatrix> = (0..=p)
        .map(|r| {
            let mut acc = FormMatrix::zero(n, p);
            for a in (r + 1)..=p {
                acc = acc.add(&gamma_leg_matrix(n, p, a));
            }
            acc
        })
        .collect();
    let mut rhat = FormMatrix::zero(n, p);
    for (r, w) in conns.iter().enumerate() {
        let dt = dt_form(r as u8, n, p);
        let mut dt_w = FormMatrix::zero(n, p);
        for i in 1..=n {
            for j in 1..=n {
                dt_w.set(i, j, dt.wedge(w.at(i, j)));
            }
        }
        rhat = rhat.add(&dt_w);
        let t = LocalizedPoly::from(t_poly(r as u8, p));
        rhat = rhat.sub(&w.wedge_mul(w).mul_coeff(&t));
    }
    for (r, wr) in conns.iter().enumerate() {
        for (s, ws) in conns.iter().enumerate() {
            let trs = LocalizedPoly::from(t_poly(r as u8, p).mul(&t_poly(s as u8, p)));
            rhat = rhat.add(&wr.wedge_mul(ws).mul_coeff(&trs));
        }
    }
    let cj = chern_class_product(j_parts, &rhat)?;
    let mut form = cj.fiber_integrate()?;
    if p % 2 == 1 {
        form = form.neg();
    }
    let tpl = JetTemplate {
        n,
        j_parts: j_parts.to_vec(),
        p,
        form,
    };
    if tpl.max_symbol_order() > 1 {
        return Err(CoreError::Internal(
            "template uses a gamma symbol of jet order > 1".into(),
        ));
    }
    // validation: substitute concrete diffeomorphisms and compare with the
    // cocycle pipeline on random tuples
    let mut rng = ChaCha8Rng::seed_from_u64(0xE27AC7);
    for round in 0..5 {
        let legs: Vec<JetDiffeo> = (1..=p)
            .map(|a| {
                random_diffeo(
                    n,
                    2,
                    &mut rng,
                    &format!("tpl-n{}p{}r{}a{}", n, p, round, a),
                )
            })
            .collect();
        let mut rhos: Vec<JetDiffeo> = vec![JetDiffeo::identity(n); p as usize + 1];
        for r in (0..p as usize).rev() {
            rhos[r] = legs[r].compose(&rhos[r + 1])?;
        }
        let direct = chern_cocycle(j_parts, &rhos, Mode::Base)?;
        let templated = tpl.evaluate(&legs)?;
        if !templated.sub(&direct).is_zero() {
            return Err(CoreError::Internal(format!(
                "template validation mismatch for J = {:?}, p = {} (round {})",
                j_parts, p, round
            )));
        }
    }
    Ok(tpl)
}

/// Result of the template substitution: the cyclic tensor together with
/// its leading coefficient.  The constant is reported, never asserted.
#[derive(Clone, Debug)]
pub struct HopfExtraction {
    pub tensor: CyclicTensor,
    pub normalization: Option<Rational>,
}

/// Sign of the sequence as an arrangement of distinct numbers
/// (parity of the inversion count).
fn arrangement_sign(seq: &[u8]) -> i64 {
    let mut sign = 1i64;
    for i in 0..seq.len() {
        for j in (i + 1)..seq.len() {
            if seq[i] > seq[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Substitute delta-generators for the gamma symbols (one tensor slot per
/// leg) and one X_k leg per coordinate direction missing from the dx word,
/// antisymmetrized with the orientation sign of dx^K ^ dx^{K'} = +-vol;
/// then reduce to the quotient coalgebra.
pub fn extract_hopf_tensor(tpl: &JetTemplate) -> Result<HopfExtraction, CoreError> {
    let n = tpl.n;
    let p = tpl.p as usize;
    let total: usize = tpl.j_parts.iter().map(|&q| q as usize).sum();
    let d_f = 2 * total - p;
    let x_slots = (n as usize).saturating_sub(d_f);
    let q = p + x_slots;
    let mut acc = TensorN::zero(n, q);
    for (gens, coeff) in tpl.form.terms() {
        let mut dx_set: Vec<u8> = Vec::new();
        for g in gens {
            match g {
                Gen::Dx(k) => dx_set.push(*k),
                _ => {
                    return Err(CoreError::NotExtractable(
                        "template carries a non-base exterior generator".into(),
                    ))
                }
            }
        }
        if !coeff.denominators().is_empty() {
            return Err(CoreError::NotExtractable(
                "template coefficient depends on x through a denominator".into(),
            ));
        }
        let complement: Vec<u8> = (1..=n).filter(|k| !dx_set.contains(k)).collect();
        for (m, c) in coeff.numerator().terms() {
            let mut delta_legs: Vec<Word> = vec![Vec::new(); p];
            for &(v, e) in m.pairs() {
                match v {
                    Var::Gamma { leg, i, j, k, ref ls } => {
                        if leg as usize == 0 || leg as usize > p {
                            return Err(CoreError::Internal(format!(
                                "gamma symbol with leg {} out of 1..{}",
                                leg, p
                            )));
                        }
                        let (jj, kk) = if j <= k { (j, k) } else { (k, j) };
                        let mut tail = ls.dirs().to_vec();
                        tail.sort_unstable();
                        for _ in 0..e {
                            delta_legs[leg as usize - 1].push(HGen::delta(i, jj, kk, &tail));
                        }
                    }
                    _ => {
                        return Err(CoreError::NotExtractable(format!(
                            "template coefficient depends on {} explicitly",
                            v
                        )))
                    }
                }
            }
            for w in &mut delta_legs {
                w.sort();
            }
            for perm in complement.iter().copied().permutations(complement.len()) {
                let mut arrangement = dx_set.clone();
                arrangement.extend(&perm);
                let sign = arrangement_sign(&arrangement);
                let mut legs = delta_legs.clone();
                for k in &perm {
                    legs.push(vec![HGen::X(*k)]);
                }
                acc.add_term(legs, c.clone() * rat_int(sign));
            }
        }
    }
    let tensor = CyclicTensor::from_tensor(&acc);
    // structural check: every leg lies in the span of delta-words with at
    // most one trailing X factor
    for (legs, _) in tensor.inner().terms() {
        for w in legs {
            let x_count = w.iter().filter(|g| matches!(g, HGen::X(_))).count();
            let tail_ok = w
                .iter()
                .rev()
                .skip(1)
                .all(|g| matches!(g, HGen::Delta(_)));
            if x_count > 1 || !tail_ok || w.iter().any(|g| matches!(g, HGen::Y(_, _))) {
                return Err(CoreError::Internal(format!(
                    "extracted leg {:?} lies outside the delta/X span",
                    w
                )));
            }
        }
    }
    let normalization = tensor
        .inner()
        .terms()
        .iter()
        .next()
        .map(|(_, c)| c.clone());
    Ok(HopfExtraction {
        tensor,
        normalization,
    })
}

// --- integrand-level Phi comparison ----------------------------------------

/// One term omega (x) gamma_{rho_1}..gamma_{rho_l} U*_phi of the formal
/// crossed differential algebra; `omega` is homogeneous in exterior degree.
#[derive(Clone)]
struct FcTerm {
    omega: BiForm,
    gam: Vec<JetDiffeo>,
    phi: JetDiffeo,
}

fn split_by_degree(f: &BiForm) -> Vec<BiForm> {
    let mut by_deg: BTreeMap<usize, BiForm> = BTreeMap::new();
    for (gens, c) in f.terms() {
        by_deg
            .entry(gens.len())
            .or_insert_with(|| BiForm::zero(f.n(), f.p()))
            .add_term(gens.clone(), c.clone());
    }
    by_deg.into_values().filter(|b| !b.is_zero()).collect()
}

fn same_diffeo(a: &JetDiffeo, b: &JetDiffeo) -> bool {
    a.components() == b.components()
}

fn has_duplicate(gam: &[JetDiffeo]) -> bool {
    for i in 0..gam.len() {
        for j in (i + 1)..gam.len() {
            if same_diffeo(&gam[i], &gam[j]) {
                return true;
            }
        }
    }
    false
}

fn fc_monomial(a: &CrossedMonomial) -> Vec<FcTerm> {
    vec![FcTerm {
        omega: BiForm::scalar(a.n(), 0, a.f.clone()),
        gam: Vec::new(),
        phi: a.phi.clone(),
    }]
}

/// d(f U*_phi) = df U*_phi - f gamma_phi U*_phi, with gamma_id = 0.
fn fc_d(a: &CrossedMonomial) -> Vec<FcTerm> {
    let n = a.n();
    let mut out = Vec::new();
    let df = BiForm::scalar(n, 0, a.f.clone()).d();
    if !df.is_zero() {
        out.push(FcTerm {
            omega: df,
            gam: Vec::new(),
            phi: a.phi.clone(),
        });
    }
    if !a.phi.is_identity() {
        out.push(FcTerm {
            omega: BiForm::scalar(n, 0, a.f.neg()),
            gam: vec![a.phi.clone()],
            phi: a.phi.clone(),
        });
    }
    out
}

/// Product in the formal crossed algebra: U*_phi omega = (phi^* omega) U*_phi
/// and U*_phi gamma_rho = (gamma_{rho o phi} - gamma_phi) U*_phi, with the
/// Koszul sign for moving the pulled-back form past the left gamma word.
fn fc_mul(x: &[FcTerm], y: &[FcTerm]) -> Result<Vec<FcTerm>, CoreError> {
    let mut out = Vec::new();
    for ta in x {
        for tb in y {
            let pulled = tb.omega.pullback(&ta.phi)?;
            if pulled.is_zero() {
                continue;
            }
            let phi = tb.phi.compose(&ta.phi)?;
            let mut branches: Vec<(Vec<JetDiffeo>, i64)> = vec![(Vec::new(), 1)];
            for rho in &tb.gam {
                let moved = rho.compose(&ta.phi)?;
                let mut next = Vec::new();
                for (prefix, s) in &branches {
                    if !moved.is_identity() {
                        let mut w = prefix.clone();
                        w.push(moved.clone());
                        next.push((w, *s));
                    }
                    if !ta.phi.is_identity() {
                        let mut w = prefix.clone();
                        w.push(ta.phi.clone());
                        next.push((w, -*s));
                    }
                }
                branches = next;
            }
            for (suffix, s) in branches {
                let mut gam = ta.gam.clone();
                gam.extend(suffix);
                if has_duplicate(&gam) {
                    continue;
                }
                for part in split_by_degree(&pulled) {
                    let d = part.degree().unwrap_or(0);
                    let mut omega = ta.omega.wedge(&part);
                    if (ta.gam.len() * d) % 2 == 1 {
                        omega = omega.neg();
                    }
                    if s < 0 {
                        omega = omega.neg();
                    }
                    if omega.is_zero() {
                        continue;
                    }
                    out.push(FcTerm {
                        omega,
                        gam: gam.clone(),
                        phi: phi.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn factorial(k: usize) -> Rational {
    let mut f = Rational::one();
    for i in 2..=k {
        f *= rat_int(i as i64);
    }
    f
}

fn group_key(phi: &JetDiffeo) -> String {
    phi.components()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn map_add(map: &mut BTreeMap<String, BiForm>, key: String, v: BiForm) {
    if v.is_zero() {
        return;
    }
    match map.remove(&key) {
        Some(old) => {
            let s = old.add(&v);
            if !s.is_zero() {
                map.insert(key, s);
            }
        }
        None => {
            map.insert(key, v);
        }
    }
}

/// Outcome of the integrand comparison: the single proportionality
/// constant (None when every compared integrand vanished) and the number
/// of samples that were checked.
#[derive(Clone, Debug)]
pub struct IntegrandReport {
    pub constant: Option<Rational>,
    pub samples: usize,
}

/// Default sample families: the undifferentiated slot carries a constant
/// coefficient and the identity (the translation invariance that the honest
/// trace supplies by integration is not available at integrand level), the
/// remaining slots carry random polynomial coefficients and quadratic
/// diffeomorphisms, starting with x + x^2.
pub fn phi_samples(n: u8, m: usize, count: usize, seed: u64) -> Vec<Vec<CrossedMonomial>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for s in 0..count {
        let mut sample = Vec::with_capacity(m + 1);
        sample.push(
            CrossedMonomial::new(
                LocalizedPoly::constant(random_nonzero_rational(&mut rng)),
                JetDiffeo::identity(n),
            )
            .expect("constant coefficient"),
        );
        for i in 1..=m {
            let mut f = Poly::zero();
            for e in 0..=2u32 {
                let mut mono = Poly::one();
                for _ in 0..e {
                    mono = mono.mul(&Poly::var(Var::X(1)));
                }
                f = f.add(&mono.scale(&random_rational(&mut rng)));
            }
            if f.is_zero() {
                f = Poly::one();
            }
            let phi = if s == 0 && i == 1 {
                let x = Poly::var(Var::X(1));
                JetDiffeo::new(n, vec![x.add(&x.mul(&x))], "phi-sample-quad")
                    .expect("quadratic diffeomorphism")
            } else {
                random_diffeo(n, 2, &mut rng, &format!("phi-s{}i{}x{}", seed, s, i))
            };
            sample.push(
                CrossedMonomial::new(LocalizedPoly::from(f), phi).expect("polynomial coefficient"),
            );
        }
        out.push(sample);
    }
    out
}

pub(crate) fn infer_ratio(l: &LocalizedPoly, r: &LocalizedPoly) -> Result<Rational, CoreError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1A7E);
    for _ in 0..64 {
        let mut point = BTreeMap::new();
        for v in l.vars().into_iter().chain(r.vars()) {
            point.entry(v).or_insert_with(|| random_rational(&mut rng));
        }
        let rv = match r.evaluate(&point) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if rv.is_zero() {
            continue;
        }
        let lv = match l.evaluate(&point) {
            Ok(v) => v,
            Err(_) => continue,
        };
        return Ok(lv / rv);
    }
    Err(CoreError::Internal(
        "could not sample a regular point for the ratio".into(),
    ))
}

/// Compare, integrand by integrand and group element by group element, the
/// Phi evaluation of the cochain with the characteristic pairing of the
/// tensor on the given samples.  Both sides are n-forms on R^n tagged by
/// the total group element; they must agree up to one global constant.
pub fn phi_integrand_check(
    tensor: &CyclicTensor,
    cochain: &GroupCochain,
    samples: &[Vec<CrossedMonomial>],
) -> Result<IntegrandReport, CoreError> {
    let n = tensor.n();
    if n != 1 {
        return Err(CoreError::Unsupported(
            "integrand comparison is implemented for n = 1".into(),
        ));
    }
    let m = tensor.q();
    let ymap = y_identity_map(n);
    let vol: GenSet = (1..=n).map(Gen::Dx).collect();
    let mut pairs: Vec<(usize, String, BiForm, BiForm)> = Vec::new();
    for (si, sample) in samples.iter().enumerate() {
        if sample.len() != m + 1 {
            return Err(CoreError::DimensionMismatch(format!(
                "sample {} has {} monomials, tensor wants {}",
                si,
                sample.len(),
                m + 1
            )));
        }
        // Phi side
        let mut lhs: BTreeMap<String, BiForm> = BTreeMap::new();
        for j in 0..=m {
            let mut factors: Vec<Vec<FcTerm>> = Vec::new();
            for i in (j + 1)..=m {
                factors.push(fc_d(&sample[i]));
            }
            factors.push(fc_monomial(&sample[0]));
            for i in 1..=j {
                factors.push(fc_d(&sample[i]));
            }
            let mut prod = factors[0].clone();
            for f in &factors[1..] {
                prod = fc_mul(&prod, f)?;
            }
            let sgn = if (j * (m - j)) % 2 == 1 { -1 } else { 1 };
            for term in prod {
                if term.gam.len() != cochain.p() as usize {
                    continue;
                }
                let mut tuple = vec![JetDiffeo::identity(n)];
                tuple.extend(term.gam.iter().cloned());
                let lam = cochain.evaluate(&tuple)?;
                if lam.is_zero() {
                    continue;
                }
                let d_lam = lam.degree().ok_or_else(|| {
                    CoreError::Internal("inhomogeneous cochain value".into())
                })?;
                let pref = factorial(d_lam) / factorial(m + 1) * rat_int(sgn);
                let val = lam.wedge(&term.omega).scale(&pref);
                map_add(&mut lhs, group_key(&term.phi), val);
            }
        }
        // characteristic side
        let mut rhs: BTreeMap<String, BiForm> = BTreeMap::new();
        for (legs, c) in tensor.inner().terms() {
            let mut acc = sample[0].clone();
            for (i, w) in legs.iter().enumerate() {
                let h = act_word(w, &sample[i + 1])?;
                acc = mul_monomials(&acc, &h)?;
            }
            let f = acc.f.subst(&ymap)?;
            if f.is_zero() {
                continue;
            }
            let mut form = BiForm::zero(n, 0);
            form.add_term(vol.clone(), f.scale(c));
            map_add(&mut rhs, group_key(&acc.phi), form);
        }
        let keys: Vec<String> = lhs
            .keys()
            .chain(rhs.keys())
            .cloned()
            .sorted()
            .dedup()
            .collect();
        for key in keys {
            let l = lhs.get(&key).cloned().unwrap_or_else(|| BiForm::zero(n, 0));
            let r = rhs.get(&key).cloned().unwrap_or_else(|| BiForm::zero(n, 0));
            pairs.push((si, key, l, r));
        }
    }
    let mut constant: Option<Rational> = None;
    let mut witnesses: Vec<String> = Vec::new();
    for (si, _, l, r) in &pairs {
        let l_zero = l.is_zero();
        let r_zero = r.is_zero();
        if l_zero && r_zero {
            continue;
        }
        if r_zero {
            witnesses.push(format!(
                "sample {}: Phi integrand {} has no tensor counterpart",
                si, l
            ));
            continue;
        }
        if l_zero {
            match &constant {
                None => constant = Some(Rational::zero()),
                Some(k) if k.is_zero() => {}
                Some(k) => witnesses.push(format!(
                    "sample {}: tensor integrand {} unmatched (constant was {})",
                    si, r, k
                )),
            }
            continue;
        }
        let k = match &constant {
            Some(k) => k.clone(),
            None => {
                let (gens, cr) = r
                    .terms()
                    .find(|(_, c)| !c.is_zero())
                    .map(|(g, c)| (g.clone(), c.clone()))
                    .expect("nonzero form has a nonzero coefficient");
                let cl = l.coeff(&gens);
                let k = infer_ratio(&cl, &cr)?;
                constant = Some(k.clone());
                k
            }
        };
        if !l.sub(&r.scale(&k)).is_zero() {
            witnesses.push(format!(
                "sample {}: integrands not proportional with constant {}: Phi side {}, tensor side {}",
                si, k, l, r
            ));
        }
    }
    if !witnesses.is_empty() {
        return Err(CoreError::Internal(format!(
            "integrand comparison failed: {}",
            witnesses.join("; ")
        )));
    }
    Ok(IntegrandReport {
        constant,
        samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::chern_cochain;
    use crate::cyclic::{gl_invariance_check, is_null_tensor, rel_b, rel_big_b};
    use crate::hopf::HopfElement;

    fn quad() -> JetDiffeo {
        let x = Poly::var(Var::X(1));
        JetDiffeo::new(1, vec![x.add(&x.mul(&x))], "x+x^2").unwrap()
    }

    fn gv_class() -> CyclicTensor {
        CyclicTensor::from_legs(&[HopfElement::generator(1, HGen::delta(1, 1, 1, &[]))])
    }

    fn vanishes_relatively(t: &CyclicTensor) -> bool {
        t.is_zero() || is_null_tensor(t).unwrap()
    }

    #[test]
    fn template_fixture_n1() {
        let tpl = jet_template(1, &[1], 1).unwrap();
        let mut expect = BiForm::zero(1, 0);
        expect.add_term(
            vec![Gen::Dx(1)],
            LocalizedPoly::var(Var::Gamma {
                leg: 1,
                i: 1,
                j: 1,
                k: 1,
                ls: MultiIdx::new(&[]),
            }),
        );
        assert_eq!(tpl.form(), &expect);
        assert_eq!(tpl.max_symbol_order(), 0);
        // identity legs give zero
        assert!(tpl.evaluate(&[JetDiffeo::identity(1)]).unwrap().is_zero());
        // concrete leg agrees with the cocycle at (phi, id)
        let direct =
            chern_cocycle(&[1], &[quad(), JetDiffeo::identity(1)], Mode::Base).unwrap();
        assert_eq!(tpl.evaluate(&[quad()]).unwrap(), direct);
    }

    #[test]
    fn zero_template_gives_zero_tensor() {
        // for n = 1 the level-2 component is a 0-form built from a
        // curvature power that cannot carry the full dt word
        let tpl = jet_template(1, &[1], 2).unwrap();
        assert!(tpl.form().is_zero());
        let ex = extract_hopf_tensor(&tpl).unwrap();
        assert!(ex.tensor.is_zero());
        assert!(ex.normalization.is_none());
    }

    #[test]
    fn extraction_n1_is_the_one_dimensional_class() {
        let tpl = jet_template(1, &[1], 1).unwrap();
        let ex = extract_hopf_tensor(&tpl).unwrap();
        let k = ex.normalization.clone().expect("nonzero tensor");
        assert!(ex.tensor.sub(&gv_class().scale(&k)).is_zero());
        assert!(gl_invariance_check(&ex.tensor));
        assert!(vanishes_relatively(&rel_b(&ex.tensor).unwrap()));
        assert!(vanishes_relatively(&rel_big_b(&ex.tensor).unwrap()));
    }

    #[test]
    fn extraction_n2_level_one_structure() {
        let tpl = jet_template(2, &[1], 1).unwrap();
        let ex = extract_hopf_tensor(&tpl).unwrap();
        assert_eq!(ex.tensor.q(), 2);
        assert!(!ex.tensor.is_zero());
        for (legs, _) in ex.tensor.inner().terms() {
            assert_eq!(legs.len(), 2);
            assert!(matches!(legs[0][..], [HGen::Delta(_)]));
            assert!(matches!(legs[1][..], [HGen::X(_)]));
        }
        assert!(gl_invariance_check(&ex.tensor));
        assert!(vanishes_relatively(&rel_b(&ex.tensor).unwrap()));
        assert!(vanishes_relatively(&rel_big_b(&ex.tensor).unwrap()));
    }

    #[test]
    fn gl_invariance_for_the_degree_two_classes() {
        for j_parts in [vec![2u8], vec![1u8, 1u8]] {
            let tpl = jet_template(2, &j_parts, 2).unwrap();
            let ex = extract_hopf_tensor(&tpl).unwrap();
            assert_eq!(ex.tensor.q(), 2, "J = {:?}", j_parts);
            assert!(!ex.tensor.is_zero(), "J = {:?}", j_parts);
            assert!(gl_invariance_check(&ex.tensor), "J = {:?}", j_parts);
        }
    }

    #[test]
    fn integrand_comparison_n1() {
        let tpl = jet_template(1, &[1], 1).unwrap();
        let ex = extract_hopf_tensor(&tpl).unwrap();
        let cochain = chern_cochain(1, &[1], 1, Mode::Base);
        let samples = phi_samples(1, 1, 5, 0xF1);
        let report = phi_integrand_check(&ex.tensor, &cochain, &samples).unwrap();
        assert_eq!(report.samples, 5);
        let k = report.constant.expect("nontrivial comparison");
        assert!(!k.is_zero());
    }

    #[test]
    fn identity_leg_reduces_to_x_terms() {
        // a^1 = f U_id: gamma_id = 0 kills the group-cochain slots, and
        // the n = 1 tensor has no X legs, so both sides vanish
        let tpl = jet_template(1, &[1], 1).unwrap();
        let ex = extract_hopf_tensor(&tpl).unwrap();
        let cochain = chern_cochain(1, &[1], 1, Mode::Base);
        let x = Poly::var(Var::X(1));
        let sample = vec![
            CrossedMonomial::new(LocalizedPoly::constant(rat_int(3)), JetDiffeo::identity(1))
                .unwrap(),
            CrossedMonomial::new(LocalizedPoly::from(x.clone()), JetDiffeo::identity(1)).unwrap(),
        ];
        let report = phi_integrand_check(&ex.tensor, &cochain, &[sample]).unwrap();
        assert!(report.constant.is_none());
    }

    #[test]
    fn zero_tensor_against_zero_cochain() {
        let tensor = CyclicTensor::from_tensor(&TensorN::zero(1, 1));
        let cochain = GroupCochain::zero(1, 1);
        let samples = phi_samples(1, 1, 2, 0xF2);
        let report = phi_integrand_check(&tensor, &cochain, &samples).unwrap();
        assert!(report.constant.is_none());
    }
}

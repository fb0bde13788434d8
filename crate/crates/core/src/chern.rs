//! Simplicial connection and curvature for a tuple of diffeomorphisms,
//! invariant Chern polynomials, and the fiber-integrated group cocycle
//! components C_J^{(p)}.
//!
//! Two modes share one code path: `Frame` keeps the explicit GL_n
//! variables y (connection = pullback of y^{-1} dy), `Base` is its y = 1
//! section, whose connection matrix is Gamma(phi) = phi'^{-1} d phi'.

use itertools::Itertools;

use crate::error::CoreError;
use crate::form::{BiForm, FormMatrix, Gen};
use crate::jet::{y_identity_map, y_inverse, JetDiffeo};
use crate::localized::LocalizedPoly;
use crate::poly::{rat_int, Poly, Var};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Base,
    Frame,
}

/// The y = 1, dy = 0 section of a frame-mode form.
pub fn base_section(f: &BiForm) -> Result<BiForm, CoreError> {
    let map = y_identity_map(f.n());
    let mut out = BiForm::zero(f.n(), f.p());
    for (gens, c) in f.terms() {
        if gens.iter().any(|g| matches!(g, Gen::Dy(_, _))) {
            continue;
        }
        out.add_term(gens.clone(), c.subst(&map)?);
    }
    Ok(out)
}

/// Pullback of the flat connection omega = y^{-1} dy along the
/// prolongation of phi, optionally restricted to the base section.
pub fn connection_form(phi: &JetDiffeo, p: u8, mode: Mode) -> Result<FormMatrix, CoreError> {
    let n = phi.n();
    let yinv = y_inverse(n)?;
    let mut mc = FormMatrix::zero(n, p);
    for i in 1..=n {
        for j in 1..=n {
            let mut entry = BiForm::zero(n, p);
            for a in 1..=n {
                entry.add_term(vec![Gen::Dy(a, j)], yinv.at(i, a).clone());
            }
            mc.set(i, j, entry);
        }
    }
    let mut out = FormMatrix::zero(n, p);
    for i in 1..=n {
        for j in 1..=n {
            let pulled = mc.at(i, j).pullback(phi)?;
            let entry = match mode {
                Mode::Frame => pulled,
                Mode::Base => base_section(&pulled)?,
            };
            out.set(i, j, entry);
        }
    }
    Ok(out)
}

/// t_r as a polynomial in the eliminated coordinates (t_0 = 1 - sum t_s).
pub(crate) fn t_poly(r: u8, p: u8) -> Poly {
    if r == 0 {
        let mut t0 = Poly::one();
        for s in 1..=p {
            t0 = t0.sub(&Poly::var(Var::T(s)));
        }
        t0
    } else {
        Poly::var(Var::T(r))
    }
}

/// dt_r as a one-form (dt_0 = -sum dt_s).
pub(crate) fn dt_form(r: u8, n: u8, p: u8) -> BiForm {
    let mut f = BiForm::zero(n, p);
    if r == 0 {
        for s in 1..=p {
            f.add_term(vec![Gen::Dt(s)], LocalizedPoly::constant(rat_int(-1)));
        }
    } else {
        f.add_term(vec![Gen::Dt(r)], LocalizedPoly::one());
    }
    f
}

/// Simplicial connection omega-hat = sum_r t_r * pullback(omega, phi_r)
/// on Delta^p x R^n, p = tuple.len() - 1.
pub fn omega_hat(tuple: &[JetDiffeo], mode: Mode) -> Result<FormMatrix, CoreError> {
    let p = (tuple.len() - 1) as u8;
    let n = tuple[0].n();
    let mut acc = FormMatrix::zero(n, p);
    for (r, phi) in tuple.iter().enumerate() {
        if phi.n() != n {
            return Err(CoreError::DimensionMismatch("tuple mixes dimensions".into()));
        }
        let conn = connection_form(phi, p, mode)?;
        let t = LocalizedPoly::from(t_poly(r as u8, p));
        acc = acc.add(&conn.mul_coeff(&t));
    }
    Ok(acc)
}

/// Simplicial curvature by the closed-form expansion
/// R-hat = sum dt_r ^ w_r - sum t_r w_r ^ w_r + sum t_r t_s w_r ^ w_s,
/// cross-checked against the definition d(omega-hat) + omega-hat^2.
pub fn simplicial_curvature(tuple: &[JetDiffeo], mode: Mode) -> Result<FormMatrix, CoreError> {
    let p = (tuple.len() - 1) as u8;
    let n = tuple[0].n();
    let conns: Vec<FormMatrix> = tuple
        .iter()
        .map(|phi| connection_form(phi, p, mode))
        .collect::<Result<_, _>>()?;
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
    // constructor postcondition: closed form equals d(omega) + omega^2
    let omega = omega_hat(tuple, mode)?;
    let defn = omega.d().add(&omega.wedge_mul(&omega));
    if !rhat.sub(&defn).is_zero() {
        return Err(CoreError::Internal(
            "simplicial curvature: closed form differs from d(w) + w^w".into(),
        ));
    }
    Ok(rhat)
}

/// Invariant Chern polynomial
/// c_q(A) = sum_{i_1<..<i_q} sum_{mu in S_q} sgn(mu) prod_t A^{i_t}_{i_mu(t)}.
/// Entries must be of even homogeneous exterior degree (so they commute).
pub fn chern_polynomial(q: u8, a: &FormMatrix) -> Result<BiForm, CoreError> {
    let n = a.n();
    if q == 0 || q > n {
        return Err(CoreError::InvalidClass(format!("q = {} out of 1..{}", q, n)));
    }
    for i in 1..=n {
        for j in 1..=n {
            match a.at(i, j).degree() {
                Some(d) if d % 2 == 0 => {}
                Some(_) => return Err(CoreError::OddDegreeEntries),
                None => return Err(CoreError::OddDegreeEntries),
            }
        }
    }
    let mut out = BiForm::zero(n, a.p());
    for rows in (1..=n).combinations(q as usize) {
        for perm in (0..q as usize).permutations(q as usize) {
            let mut term = BiForm::one(n, a.p());
            for (t, &pt) in perm.iter().enumerate() {
                term = term.wedge(a.at(rows[t], rows[pt]));
            }
            if perm_sign(&perm) < 0 {
                term = term.neg();
            }
            out = out.add(&term);
        }
    }
    Ok(out)
}

fn perm_sign(perm: &[usize]) -> i8 {
    let mut sign = 1i8;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// c_J(A) = c_{j_1}(A) ^ ... ^ c_{j_k}(A) for a partition J with |J| <= n.
pub fn chern_class_product(j_parts: &[u8], a: &FormMatrix) -> Result<BiForm, CoreError> {
    let n = a.n();
    let total: u32 = j_parts.iter().map(|&q| q as u32).sum();
    if j_parts.is_empty() || total > n as u32 {
        return Err(CoreError::InvalidClass(format!(
            "|J| = {} exceeds n = {}",
            total, n
        )));
    }
    let mut out = BiForm::one(n, a.p());
    for &q in j_parts {
        out = out.wedge(&chern_polynomial(q, a)?);
    }
    Ok(out)
}

/// Group cocycle component C_J^{(p)}(phi_0..phi_p) =
/// (-1)^p * fiber integral over Delta^p of c_J(R-hat), a (2|J|-p)-form.
pub fn chern_cocycle(
    j_parts: &[u8],
    tuple: &[JetDiffeo],
    mode: Mode,
) -> Result<BiForm, CoreError> {
    if tuple.is_empty() {
        return Err(CoreError::DimensionMismatch("empty tuple".into()));
    }
    let p = (tuple.len() - 1) as u8;
    let total: u32 = j_parts.iter().map(|&q| q as u32).sum();
    if p as u32 > 2 * total {
        return Err(CoreError::InvalidClass(format!(
            "level p = {} exceeds 2|J| = {}",
            p,
            2 * total
        )));
    }
    let rhat = simplicial_curvature(tuple, mode)?;
    let cj = chern_class_product(j_parts, &rhat)?;
    let mut out = cj.fiber_integrate()?;
    if p % 2 == 1 {
        out = out.neg();
    }
    Ok(out)
}

/// Independent oracle for C_q^{(q)} up to a constant:
/// sum_{sigma in S_{q+1}} sgn(sigma) Tr(Gamma(phi_sigma(1)) ^ .. ^ Gamma(phi_sigma(q))).
pub fn antisym_trace(q: u8, tuple: &[JetDiffeo]) -> Result<BiForm, CoreError> {
    if tuple.len() != q as usize + 1 {
        return Err(CoreError::DimensionMismatch(format!(
            "antisym_trace wants {} diffeomorphisms, got {}",
            q + 1,
            tuple.len()
        )));
    }
    let n = tuple[0].n();
    let gammas: Vec<FormMatrix> = tuple
        .iter()
        .map(|phi| connection_form(phi, 0, Mode::Base))
        .collect::<Result<_, _>>()?;
    let mut out = BiForm::zero(n, 0);
    for sigma in (0..=q as usize).permutations(q as usize + 1) {
        let mut prod = FormMatrix::zero(n, 0);
        for i in 1..=n {
            prod.set(i, i, BiForm::one(n, 0));
        }
        for t in 1..=q as usize {
            prod = prod.wedge_mul(&gammas[sigma[t]]);
        }
        let mut tr = prod.trace();
        if perm_sign(&sigma) < 0 {
            tr = tr.neg();
        }
        out = out.add(&tr);
    }
    Ok(out)
}

/// Alternating full polarization of c_q on the connection forms:
/// sum over sigma in S_{q+1} of sgn(sigma) times the multilinear expansion
/// of c_q with Gamma(phi_{sigma(t)}) in the t-th factor (t = 1..q).
///
/// This is the exact top-level oracle: C_q^{(q)} is proportional to this
/// form for every tuple.  The single-trace alternation of `antisym_trace`
/// drops the Tr x Tr cross terms of c_q and agrees with it only for q = 1
/// (or for traceless connections, i.e. volume-preserving jets).
pub fn antisym_polarization(q: u8, tuple: &[JetDiffeo]) -> Result<BiForm, CoreError> {
    if tuple.len() != q as usize + 1 {
        return Err(CoreError::DimensionMismatch(format!(
            "antisym_polarization wants {} diffeomorphisms, got {}",
            q + 1,
            tuple.len()
        )));
    }
    let n = tuple[0].n();
    if q == 0 || q > n {
        return Err(CoreError::InvalidClass(format!("q = {} out of 1..{}", q, n)));
    }
    let gammas: Vec<FormMatrix> = tuple
        .iter()
        .map(|phi| connection_form(phi, 0, Mode::Base))
        .collect::<Result<_, _>>()?;
    let rows: Vec<u8> = (1..=n).collect();
    let mut out = BiForm::zero(n, 0);
    for sigma in (0..=q as usize).permutations(q as usize + 1) {
        let outer = perm_sign(&sigma);
        for idx in rows.iter().copied().combinations(q as usize) {
            for cols in idx.iter().copied().permutations(q as usize) {
                let mut sign = outer;
                // sign of the column permutation relative to the rows
                for a in 0..cols.len() {
                    for b in (a + 1)..cols.len() {
                        if cols[a] > cols[b] {
                            sign = -sign;
                        }
                    }
                }
                let mut term = BiForm::one(n, 0);
                for t in 0..q as usize {
                    term = term.wedge(gammas[sigma[t + 1]].at(idx[t], cols[t]));
                }
                if sign < 0 {
                    term = term.neg();
                }
                out = out.add(&term);
            }
        }
    }
    Ok(out)
}

/// Literal GL_n-basicness test: no y symbols and no dy factors.
pub fn is_gl_basic(f: &BiForm) -> bool {
    let g = f.normalize();
    !g.depends_on(|v| matches!(v, Var::Y(_, _)))
        && g
            .terms()
            .all(|(gens, _)| gens.iter().all(|g| !matches!(g, Gen::Dy(_, _))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localized::register;
    use crate::poly::{rat, Rational};
    use crate::sample::random_diffeo;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quad() -> JetDiffeo {
        let x = Poly::var(Var::X(1));
        JetDiffeo::new(1, vec![x.add(&x.mul(&x))], "x+x^2").unwrap()
    }

    fn inv_den() -> LocalizedPoly {
        // 2/(1+2x)
        let den = Poly::one().add(&Poly::var(Var::X(1)).scale(&rat_int(2)));
        let id = register(&den, "1+2x").unwrap();
        LocalizedPoly::constant(rat_int(2)).div_registered(id, 1)
    }

    #[test]
    fn level_zero_connection_is_gamma() {
        let conn = connection_form(&quad(), 0, Mode::Base).unwrap();
        let mut expect = BiForm::zero(1, 0);
        expect.add_term(vec![Gen::Dx(1)], inv_den());
        assert_eq!(conn.at(1, 1), &expect);
        // identity tuple gives zero connection
        let id = JetDiffeo::identity(1);
        assert!(omega_hat(&[id.clone(), id], Mode::Base).unwrap().is_zero());
    }

    #[test]
    fn omega_hat_example() {
        let tuple = [JetDiffeo::identity(1), quad()];
        let w = omega_hat(&tuple, Mode::Base).unwrap();
        let mut expect = BiForm::zero(1, 1);
        expect.add_term(
            vec![Gen::Dx(1)],
            inv_den().mul_poly(&Poly::var(Var::T(1))),
        );
        assert_eq!(w.at(1, 1), &expect);
    }

    #[test]
    fn curvature_flat_cases() {
        // p = 0 and identical tuples are flat
        assert!(simplicial_curvature(&[quad()], Mode::Base).unwrap().is_zero());
        assert!(simplicial_curvature(&[quad(), quad()], Mode::Base)
            .unwrap()
            .is_zero());
        let tuple = [JetDiffeo::identity(1), quad()];
        let r = simplicial_curvature(&tuple, Mode::Base).unwrap();
        let mut expect = BiForm::zero(1, 1);
        expect.add_term(vec![Gen::Dt(1), Gen::Dx(1)], inv_den());
        assert_eq!(r.at(1, 1), &expect);
    }

    #[test]
    fn chern_polynomial_scalars() {
        // c1 = trace, c2(diag(a, b)) = a b on scalar matrices
        let n = 2;
        let a = LocalizedPoly::var(Var::X(1));
        let b = LocalizedPoly::var(Var::X(2));
        let mut m = FormMatrix::zero(n, 0);
        m.set(1, 1, BiForm::scalar(n, 0, a.clone()));
        m.set(2, 2, BiForm::scalar(n, 0, b.clone()));
        let c1 = chern_polynomial(1, &m).unwrap();
        assert_eq!(c1.coeff(&[]), a.add(&b));
        let c2 = chern_polynomial(2, &m).unwrap();
        assert_eq!(c2.coeff(&[]), a.mul(&b));
    }

    #[test]
    fn chern_polynomial_conjugation_invariant() {
        let n = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            // random scalar matrix A and random invertible rational g
            let mut a = FormMatrix::zero(n, 0);
            for i in 1..=n {
                for j in 1..=n {
                    a.set(
                        i,
                        j,
                        BiForm::scalar(
                            n,
                            0,
                            LocalizedPoly::constant(crate::sample::random_rational(&mut rng)),
                        ),
                    );
                }
            }
            let (g11, g12, g21) = (rat(1, 1), rat(1, 2), rat(1, 3));
            let g22 = rat(2, 1); // det = 2 - 1/6 != 0
            let det = g11.clone() * g22.clone() - g12.clone() * g21.clone();
            let scalar = |r: Rational| BiForm::scalar(n, 0, LocalizedPoly::constant(r));
            let mut g = FormMatrix::zero(n, 0);
            g.set(1, 1, scalar(g11.clone()));
            g.set(1, 2, scalar(g12.clone()));
            g.set(2, 1, scalar(g21.clone()));
            g.set(2, 2, scalar(g22.clone()));
            let mut ginv = FormMatrix::zero(n, 0);
            ginv.set(1, 1, scalar(g22 / det.clone()));
            ginv.set(1, 2, scalar(-g12 / det.clone()));
            ginv.set(2, 1, scalar(-g21 / det.clone()));
            ginv.set(2, 2, scalar(g11 / det.clone()));
            let conj = g.wedge_mul(&a).wedge_mul(&ginv);
            for q in 1..=2 {
                assert_eq!(
                    chern_polynomial(q, &conj).unwrap(),
                    chern_polynomial(q, &a).unwrap()
                );
            }
        }
    }

    #[test]
    fn cocycle_fixtures_n1() {
        let id = JetDiffeo::identity(1);
        // C1^(0) = 0 by flatness
        assert!(chern_cocycle(&[1], &[quad()], Mode::Base).unwrap().is_zero());
        // C1^(1)(id, x+x^2) = -2/(1+2x) dx
        let c = chern_cocycle(&[1], &[id.clone(), quad()], Mode::Base).unwrap();
        let mut expect = BiForm::zero(1, 0);
        expect.add_term(vec![Gen::Dx(1)], inv_den().neg());
        assert_eq!(c, expect);
        // C1^(2) = 0 for n = 1
        let x = Poly::var(Var::X(1));
        let cub = JetDiffeo::new(1, vec![x.add(&x.pow(3))], "x+x^3").unwrap();
        assert!(chern_cocycle(&[1], &[id, quad(), cub], Mode::Base)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn antisym_trace_examples() {
        let id = JetDiffeo::identity(1);
        let a = antisym_trace(1, &[id, quad()]).unwrap();
        let mut expect = BiForm::zero(1, 0);
        expect.add_term(vec![Gen::Dx(1)], inv_den());
        assert_eq!(a, expect);
        assert!(antisym_trace(1, &[quad(), quad()]).unwrap().is_zero());
    }

    #[test]
    fn top_level_polarization_oracle() {
        // C_q^{(q)} is exactly proportional to the alternating full
        // polarization of c_q; the single-trace alternation differs from it
        // for q = 2 by the alternating Tr x Tr cross term, which is nonzero
        // on generic jets (it vanishes on volume-preserving ones).
        let n = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(3137);
        for q in [1u8, 2] {
            let mut kappa: Option<Rational> = None;
            for round in 0..3 {
                let tuple: Vec<JetDiffeo> = (0..=q)
                    .map(|i| random_diffeo(n, 2, &mut rng, &format!("pol{}-{}-{}", q, round, i)))
                    .collect();
                let c = chern_cocycle(&[q], &tuple, Mode::Base).unwrap();
                let pol = antisym_polarization(q, &tuple).unwrap();
                assert!(!pol.is_zero());
                let (gens, cr) = pol
                    .terms()
                    .find(|(_, v)| !v.is_zero())
                    .map(|(g, v)| (g.clone(), v.clone()))
                    .unwrap();
                let k = crate::extract::infer_ratio(&c.coeff(&gens), &cr).unwrap();
                assert!(c.sub(&pol.scale(&k)).is_zero(), "q = {} round {}", q, round);
                match &kappa {
                    None => kappa = Some(k),
                    Some(k0) => assert_eq!(k0, &k, "constant drifts at q = {}", q),
                }
                if q == 1 {
                    // for q = 1 the polarization and the single trace agree
                    assert_eq!(pol, antisym_trace(1, &tuple).unwrap());
                } else {
                    // for q = 2 the single trace alone misses the cross term
                    let tr = antisym_trace(q, &tuple).unwrap();
                    let (gens, cr) = tr
                        .terms()
                        .find(|(_, v)| !v.is_zero())
                        .map(|(g, v)| (g.clone(), v.clone()))
                        .unwrap();
                    let k = crate::extract::infer_ratio(&c.coeff(&gens), &cr).unwrap();
                    assert!(!c.sub(&tr.scale(&k)).is_zero());
                }
            }
        }
    }

    #[test]
    fn bianchi_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tuple = [
            JetDiffeo::identity(2),
            random_diffeo(2, 2, &mut rng, "b1"),
            random_diffeo(2, 2, &mut rng, "b2"),
        ];
        let w = omega_hat(&tuple, Mode::Base).unwrap();
        let r = simplicial_curvature(&tuple, Mode::Base).unwrap();
        let lhs = r.d();
        let rhs = r.wedge_mul(&w).sub(&w.wedge_mul(&r));
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn simplicial_compatibility_of_omega_hat() {
        use crate::form::{coface, degeneracy};
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let tuple = [
            JetDiffeo::identity(1),
            random_diffeo(1, 2, &mut rng, "s1"),
            random_diffeo(1, 3, &mut rng, "s2"),
        ];
        let p = 2u8;
        let w2 = omega_hat(&tuple, Mode::Base).unwrap();
        // faces: omitting entry i matches pulling back along coface i
        for i in 0..=p {
            let sub: Vec<JetDiffeo> = tuple
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i as usize)
                .map(|(_, f)| f.clone())
                .collect();
            let w1 = omega_hat(&sub, Mode::Base).unwrap();
            let pulled = w2.at(1, 1).simplex_map(p - 1, &coface(i, p));
            assert_eq!(&pulled, w1.at(1, 1), "face {} mismatch", i);
        }
        // degeneracies: repeating entry i matches pulling back along s_i
        let pair = [tuple[0].clone(), tuple[1].clone()];
        let w1 = omega_hat(&pair, Mode::Base).unwrap();
        for i in 0..=1u8 {
            let mut rep: Vec<JetDiffeo> = pair.to_vec();
            rep.insert(i as usize, pair[i as usize].clone());
            let w2 = omega_hat(&rep, Mode::Base).unwrap();
            let pulled = w1.at(1, 1).simplex_map(2, &degeneracy(i, 1));
            assert_eq!(&pulled, w2.at(1, 1), "degeneracy {} mismatch", i);
        }
    }

    #[test]
    fn frame_mode_is_gl_basic_n1() {
        let tuple = [JetDiffeo::identity(1), quad()];
        let r = simplicial_curvature(&tuple, Mode::Frame).unwrap();
        let c = chern_class_product(&[1], &r).unwrap();
        assert!(is_gl_basic(&c));
        // and its fiber integral agrees with the base-mode cocycle
        let frame = chern_cocycle(&[1], &tuple, Mode::Frame).unwrap();
        let base = chern_cocycle(&[1], &tuple, Mode::Base).unwrap();
        assert_eq!(base_section(&frame).unwrap(), base);
    }
}

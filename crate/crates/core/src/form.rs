//! Bigraded exterior forms on Delta^p x R^n (x GL_n in frame mode).
//!
//! A form is a sparse sum of terms `c * e_S` where `c` is a localized
//! polynomial in (t, x, y) and `S` is a sorted set of generators drawn
//! from dt_1..dt_p < dx_1..dx_n < dy_(1,1)..dy_(n,n).  The simplex
//! coordinate t_0 is always eliminated as 1 - sum t_r.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::CoreError;
use crate::jet::JetDiffeo;
use crate::localized::LocalizedPoly;
use crate::poly::{rat_int, Poly, Rational, Var};

/// A single exterior generator; the derived order is the canonical one.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Gen {
    Dt(u8),
    Dx(u8),
    Dy(u8, u8),
}

impl Gen {
    /// The coordinate this generator differentiates.
    pub fn var(self) -> Var {
        match self {
            Gen::Dt(r) => Var::T(r),
            Gen::Dx(i) => Var::X(i),
            Gen::Dy(i, j) => Var::Y(i, j),
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Dt(r) => write!(f, "dt{}", r),
            Gen::Dx(i) => write!(f, "dx{}", i),
            Gen::Dy(i, j) => write!(f, "dy({};{})", i, j),
        }
    }
}

/// Sorted, duplicate-free generator word.
pub type GenSet = Vec<Gen>;

/// Merge two sorted generator words; None on a repeated generator,
/// otherwise the merged word and the sign of the shuffle.
fn merge_gens(a: &[Gen], b: &[Gen]) -> Option<(GenSet, i8)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut sign = 1i8;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                if (a.len() - i) % 2 == 1 {
                    sign = -sign;
                }
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, sign))
}

/// Bigraded exterior form on Delta^p x R^n (x GL_n).
#[derive(Clone, Debug)]
pub struct BiForm {
    n: u8,
    p: u8,
    terms: BTreeMap<GenSet, LocalizedPoly>,
}

impl BiForm {
    pub fn zero(n: u8, p: u8) -> Self {
        BiForm {
            n,
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: u8, p: u8, c: LocalizedPoly) -> Self {
        let mut f = BiForm::zero(n, p);
        f.add_term(Vec::new(), c);
        f
    }

    pub fn one(n: u8, p: u8) -> Self {
        BiForm::scalar(n, p, LocalizedPoly::one())
    }

    pub fn generator(n: u8, p: u8, g: Gen) -> Self {
        let mut f = BiForm::zero(n, p);
        f.add_term(vec![g], LocalizedPoly::one());
        f
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GenSet, &LocalizedPoly)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, gens: GenSet, c: LocalizedPoly) {
        if c.is_zero() {
            return;
        }
        debug_assert!(gens.windows(2).all(|w| w[0] < w[1]), "generators unsorted");
        use std::collections::btree_map::Entry;
        match self.terms.entry(gens) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    /// Total exterior degree when homogeneous, None for a mix (or 0 on zero).
    pub fn degree(&self) -> Option<usize> {
        let mut degs: Vec<usize> = self.terms.keys().map(|g| g.len()).collect();
        degs.dedup();
        match degs.len() {
            0 => Some(0),
            1 => Some(degs[0]),
            _ => None,
        }
    }

    pub fn add(&self, other: &BiForm) -> BiForm {
        assert_eq!((self.n, self.p), (other.n, other.p));
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> BiForm {
        BiForm {
            n: self.n,
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (g.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &BiForm) -> BiForm {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> BiForm {
        if k.is_zero() {
            return BiForm::zero(self.n, self.p);
        }
        BiForm {
            n: self.n,
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (g.clone(), c.scale(k)))
                .collect(),
        }
    }

    pub fn mul_coeff(&self, k: &LocalizedPoly) -> BiForm {
        let mut out = BiForm::zero(self.n, self.p);
        for (g, c) in &self.terms {
            out.add_term(g.clone(), c.mul(k));
        }
        out
    }

    pub fn wedge(&self, other: &BiForm) -> BiForm {
        assert_eq!((self.n, self.p), (other.n, other.p));
        let mut out = BiForm::zero(self.n, self.p);
        for (ga, ca) in &self.terms {
            for (gb, cb) in &other.terms {
                if let Some((g, s)) = merge_gens(ga, gb) {
                    let mut c = ca.mul(cb);
                    if s < 0 {
                        c = c.neg();
                    }
                    out.add_term(g, c);
                }
            }
        }
        out
    }

    /// Exterior differential d = d_t + d_x + d_y.
    pub fn d(&self) -> BiForm {
        let mut out = BiForm::zero(self.n, self.p);
        let mut gens: Vec<Gen> = Vec::new();
        for r in 1..=self.p {
            gens.push(Gen::Dt(r));
        }
        for i in 1..=self.n {
            gens.push(Gen::Dx(i));
        }
        for i in 1..=self.n {
            for j in 1..=self.n {
                gens.push(Gen::Dy(i, j));
            }
        }
        for (word, c) in &self.terms {
            for &g in &gens {
                let dc = c.partial(g.var());
                if dc.is_zero() {
                    continue;
                }
                if let Some((merged, s)) = merge_gens(&[g], word) {
                    out.add_term(merged, if s < 0 { dc.neg() } else { dc });
                }
            }
        }
        out
    }

    /// Pullback along the prolongation of phi: x <- phi(x), y <- phi'(x) y,
    /// dx <- d(phi), dy <- d(phi' y); simplex coordinates are untouched.
    pub fn pullback(&self, phi: &JetDiffeo) -> Result<BiForm, CoreError> {
        if phi.n() != self.n {
            return Err(CoreError::DimensionMismatch("pullback: n differs".into()));
        }
        let n = self.n;
        let map = phi.prolong_map();
        let jac = phi.jacobian();
        // images of generators as one-forms
        let mut dx_img: BTreeMap<Gen, BiForm> = BTreeMap::new();
        for i in 1..=n {
            let mut img = BiForm::zero(n, self.p);
            for j in 1..=n {
                img.add_term(vec![Gen::Dx(j)], jac.at(i, j).clone());
            }
            dx_img.insert(Gen::Dx(i), img);
        }
        let mut dy_img: BTreeMap<Gen, BiForm> = BTreeMap::new();
        for i in 1..=n {
            for j in 1..=n {
                let mut img = BiForm::zero(n, self.p);
                for mu in 1..=n {
                    let mut c = Poly::zero();
                    for m in 1..=n {
                        c = c.add(
                            &jac.at(i, m)
                                .numerator()
                                .partial(Var::X(mu))
                                .mul(&Poly::var(Var::Y(m, j))),
                        );
                    }
                    img.add_term(vec![Gen::Dx(mu)], LocalizedPoly::from(c));
                }
                for m in 1..=n {
                    img.add_term(vec![Gen::Dy(m, j)], jac.at(i, m).clone());
                }
                dy_img.insert(Gen::Dy(i, j), img);
            }
        }
        let mut out = BiForm::zero(n, self.p);
        for (word, c) in &self.terms {
            let mut acc = BiForm::scalar(n, self.p, c.subst(&map)?);
            for g in word {
                let img = match g {
                    Gen::Dt(_) => BiForm::generator(n, self.p, *g),
                    Gen::Dx(_) => dx_img[g].clone(),
                    Gen::Dy(_, _) => dy_img[g].clone(),
                };
                acc = acc.wedge(&img);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Substitute along an affine simplex map t_r -> images[r-1] (polynomials
    /// in the target simplex coordinates), with dt_r -> d(images[r-1]).
    pub fn simplex_map(&self, p_new: u8, images: &[Poly]) -> BiForm {
        assert_eq!(images.len(), self.p as usize);
        let map: BTreeMap<Var, Poly> = (1..=self.p)
            .map(|r| (Var::T(r), images[(r - 1) as usize].clone()))
            .collect();
        let mut out = BiForm::zero(self.n, p_new);
        for (word, c) in &self.terms {
            let coeff = c
                .subst(&map)
                .expect("affine simplex substitution cannot hit a denominator");
            let mut acc = BiForm::scalar(self.n, p_new, coeff);
            for g in word {
                let img = match g {
                    Gen::Dt(r) => {
                        let image = &images[(*r - 1) as usize];
                        let mut one_form = BiForm::zero(self.n, p_new);
                        for s in 1..=p_new {
                            let dc = image.partial(Var::T(s));
                            if !dc.is_zero() {
                                one_form.add_term(vec![Gen::Dt(s)], LocalizedPoly::from(dc));
                            }
                        }
                        one_form
                    }
                    _ => BiForm::generator(self.n, p_new, *g),
                };
                acc = acc.wedge(&img);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Integrate over the fiber Delta^p with orientation dt_1 ^ .. ^ dt_p.
    /// Only components carrying the full dt word contribute; the simplex
    /// moment formula gives int t^a dt = (prod a_r!) / (p + sum a_r)!.
    pub fn fiber_integrate(&self) -> Result<BiForm, CoreError> {
        let p = self.p;
        let full: GenSet = (1..=p).map(Gen::Dt).collect();
        let mut out = BiForm::zero(self.n, 0);
        for (word, c) in &self.terms {
            let dt_part: Vec<Gen> = word
                .iter()
                .copied()
                .filter(|g| matches!(g, Gen::Dt(_)))
                .collect();
            if dt_part != full {
                continue;
            }
            let rest: GenSet = word[p as usize..].to_vec();
            for id in c.denominators().keys() {
                let den = crate::localized::den_poly(*id);
                if den.depends_on(|v| matches!(v, Var::T(_))) {
                    return Err(CoreError::Internal(
                        "fiber integration against t-dependent denominator".into(),
                    ));
                }
            }
            let mut integrated = Poly::zero();
            for (m, k) in c.numerator().terms() {
                let mut t_total: u64 = 0;
                let mut numer = Rational::one();
                let mut rest_mono = Vec::new();
                for &(v, e) in m.pairs() {
                    if let Var::T(_) = v {
                        t_total += e as u64;
                        for f in 2..=e as u64 {
                            numer *= rat_int(f as i64);
                        }
                    } else {
                        rest_mono.push((v, e));
                    }
                }
                let mut denom = Rational::one();
                for f in 2..=(t_total + p as u64) {
                    denom *= rat_int(f as i64);
                }
                integrated.add_term(
                    crate::poly::Monomial::from_pairs(rest_mono),
                    k * numer / denom,
                );
            }
            let mut coeff = LocalizedPoly::from(integrated);
            for (id, e) in c.denominators() {
                coeff = coeff.div_registered(*id, *e);
            }
            out.add_term(rest, coeff);
        }
        Ok(out)
    }

    /// Reinterpret over a different simplex dimension (no dt generators and
    /// no t-dependence allowed unless p grows).
    pub fn with_p(&self, p_new: u8) -> BiForm {
        BiForm {
            n: self.n,
            p: p_new,
            terms: self.terms.clone(),
        }
    }

    /// Evaluate every coefficient at a rational point, keeping the
    /// exterior structure.
    pub fn evaluate(&self, point: &BTreeMap<Var, Rational>) -> Result<BiForm, CoreError> {
        let mut out = BiForm::zero(self.n, self.p);
        for (g, c) in &self.terms {
            out.add_term(g.clone(), LocalizedPoly::constant(c.evaluate(point)?));
        }
        Ok(out)
    }

    /// Lazy cancellation on every coefficient.
    pub fn normalize(&self) -> BiForm {
        let mut out = BiForm::zero(self.n, self.p);
        for (g, c) in &self.terms {
            out.add_term(g.clone(), c.normalize());
        }
        out
    }

    pub fn depends_on(&self, pred: impl Fn(Var) -> bool + Copy) -> bool {
        self.terms
            .iter()
            .any(|(g, c)| g.iter().any(|gen| pred(gen.var())) || c.depends_on(pred))
    }

    pub fn coeff(&self, gens: &[Gen]) -> LocalizedPoly {
        self.terms
            .get(gens)
            .cloned()
            .unwrap_or_else(LocalizedPoly::zero)
    }
}

impl PartialEq for BiForm {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Display for BiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (g, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for gen in g {
                write!(f, "^{}", gen)?;
            }
        }
        Ok(())
    }
}

/// Coface map d_i : Delta^{p-1} -> Delta^p in eliminated coordinates,
/// returned as the images of t_1..t_p.
pub fn coface(i: u8, p: u8) -> Vec<Poly> {
    assert!(i <= p && p >= 1);
    let mut images = Vec::with_capacity(p as usize);
    for r in 1..=p {
        let img = if i == 0 {
            if r == 1 {
                // t_1 = s_0 = 1 - sum s_j
                let mut s0 = Poly::one();
                for s in 1..p {
                    s0 = s0.sub(&Poly::var(Var::T(s)));
                }
                s0
            } else {
                Poly::var(Var::T(r - 1))
            }
        } else if r < i {
            Poly::var(Var::T(r))
        } else if r == i {
            Poly::zero()
        } else {
            Poly::var(Var::T(r - 1))
        };
        images.push(img);
    }
    images
}

/// Degeneracy map s_i : Delta^{p+1} -> Delta^p in eliminated coordinates,
/// returned as the images of t_1..t_p.
pub fn degeneracy(i: u8, p: u8) -> Vec<Poly> {
    assert!(i <= p);
    let mut images = Vec::with_capacity(p as usize);
    for r in 1..=p {
        let img = if r < i {
            Poly::var(Var::T(r))
        } else if r == i {
            Poly::var(Var::T(r)).add(&Poly::var(Var::T(r + 1)))
        } else {
            Poly::var(Var::T(r + 1))
        };
        images.push(img);
    }
    images
}

/// n x n matrix of forms; the product wedges entries.
#[derive(Clone, Debug, PartialEq)]
pub struct FormMatrix {
    n: u8,
    p: u8,
    entries: Vec<BiForm>,
}

impl FormMatrix {
    pub fn zero(n: u8, p: u8) -> Self {
        FormMatrix {
            n,
            p,
            entries: vec![BiForm::zero(n, p); (n as usize).pow(2)],
        }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn at(&self, i: u8, j: u8) -> &BiForm {
        &self.entries[((i - 1) as usize) * self.n as usize + (j - 1) as usize]
    }

    pub fn set(&mut self, i: u8, j: u8, v: BiForm) {
        self.entries[((i - 1) as usize) * self.n as usize + (j - 1) as usize] = v;
    }

    pub fn add(&self, other: &FormMatrix) -> FormMatrix {
        assert_eq!((self.n, self.p), (other.n, other.p));
        let mut out = FormMatrix::zero(self.n, self.p);
        for i in 1..=self.n {
            for j in 1..=self.n {
                out.set(i, j, self.at(i, j).add(other.at(i, j)));
            }
        }
        out
    }

    pub fn sub(&self, other: &FormMatrix) -> FormMatrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FormMatrix {
        let mut out = FormMatrix::zero(self.n, self.p);
        for i in 1..=self.n {
            for j in 1..=self.n {
                out.set(i, j, self.at(i, j).neg());
            }
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> FormMatrix {
        let mut out = FormMatrix::zero(self.n, self.p);
        for i in 1..=self.n {
            for j in 1..=self.n {
                out.set(i, j, self.at(i, j).scale(k));
            }
        }
        out
    }

    pub fn mul_coeff(&self, c: &LocalizedPoly) -> FormMatrix {
        let mut out = FormMatrix::zero(self.n, self.p);
        for i in 1..=self.n {
            for j in 1..=self.n {
                out.set(i, j, self.at(i, j).mul_coeff(c));
            }
        }
        out
    }

    /// Matrix product with wedge of entries.
    pub fn wedge_mul(&self, other: &FormMatrix) -> FormMatrix {
        assert_eq!((self.n, self.p), (other.n, other.p));
        let mut out = FormMatrix::zero(self.n, self.p);
        for i in 1..=self.n {
            for j in 1..=self.n {
                let mut acc = BiForm::zero(self.n, self.p);
                for k in 1..=self.n {
                    acc = acc.add(&self.at(i, k).wedge(other.at(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn d(&self) -> FormMatrix {
        let mut out = FormMatrix::zero(self.n, self.p);
        for i in 1..=self.n {
            for j in 1..=self.n {
                out.set(i, j, self.at(i, j).d());
            }
        }
        out
    }

    pub fn trace(&self) -> BiForm {
        let mut acc = BiForm::zero(self.n, self.p);
        for i in 1..=self.n {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn lp(p: Poly) -> LocalizedPoly {
        LocalizedPoly::from(p)
    }

    #[test]
    fn wedge_anticommutes() {
        let n = 2;
        let dx1 = BiForm::generator(n, 1, Gen::Dx(1));
        let dx2 = BiForm::generator(n, 1, Gen::Dx(2));
        assert_eq!(dx1.wedge(&dx2), dx2.wedge(&dx1).neg());
        assert!(dx1.wedge(&dx1).is_zero());
        let dt = BiForm::generator(n, 1, Gen::Dt(1));
        assert_eq!(dt.wedge(&dx1), dx1.wedge(&dt).neg());
    }

    #[test]
    fn graded_commutativity_and_leibniz() {
        let n = 2;
        // omega = x1 x2 dx1, eta = x2 dt1 + x1^2 dx2
        let x1 = Poly::var(Var::X(1));
        let x2 = Poly::var(Var::X(2));
        let mut omega = BiForm::zero(n, 1);
        omega.add_term(vec![Gen::Dx(1)], lp(x1.mul(&x2)));
        let mut eta = BiForm::zero(n, 1);
        eta.add_term(vec![Gen::Dt(1)], lp(x2.clone()));
        eta.add_term(vec![Gen::Dx(2)], lp(x1.mul(&x1)));
        // both degree 1: omega ^ eta = - eta ^ omega
        assert_eq!(omega.wedge(&eta), eta.wedge(&omega).neg());
        // Leibniz: d(omega ^ eta) = d(omega) ^ eta - omega ^ d(eta)
        let lhs = omega.wedge(&eta).d();
        let rhs = omega.d().wedge(&eta).sub(&omega.wedge(&eta.d()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_squared_zero() {
        let n = 2;
        let x1 = Poly::var(Var::X(1));
        let t1 = Poly::var(Var::T(1));
        let y11 = Poly::var(Var::Y(1, 1));
        let mut omega = BiForm::zero(n, 2);
        omega.add_term(Vec::new(), lp(x1.mul(&t1).mul(&y11)));
        omega.add_term(vec![Gen::Dx(2)], lp(t1.mul(&t1).mul(&x1)));
        omega.add_term(vec![Gen::Dt(2), Gen::Dy(1, 2)], lp(x1.pow(3)));
        assert!(omega.d().d().is_zero());
    }

    #[test]
    fn fiber_integration_moments() {
        // int_{Delta^1} dt = 1, int t dt = 1/2, int t^2 dt = 1/3
        let n = 1;
        let t = Poly::var(Var::T(1));
        for (e, expect) in [(0u32, rat(1, 1)), (1, rat(1, 2)), (2, rat(1, 3))] {
            let mut f = BiForm::zero(n, 1);
            f.add_term(vec![Gen::Dt(1)], lp(t.pow(e)));
            let i = f.fiber_integrate().unwrap();
            assert_eq!(i.coeff(&[]).as_constant(), Some(expect));
        }
        // int_{Delta^2} dt1 dt2 = 1/2, int t1 t2 dt1 dt2 = 1/24
        let mut f = BiForm::zero(n, 2);
        f.add_term(vec![Gen::Dt(1), Gen::Dt(2)], LocalizedPoly::one());
        assert_eq!(
            f.fiber_integrate().unwrap().coeff(&[]).as_constant(),
            Some(rat(1, 2))
        );
        let mut g = BiForm::zero(n, 2);
        let t1t2 = Poly::var(Var::T(1)).mul(&Poly::var(Var::T(2)));
        g.add_term(vec![Gen::Dt(1), Gen::Dt(2)], lp(t1t2));
        assert_eq!(
            g.fiber_integrate().unwrap().coeff(&[]).as_constant(),
            Some(rat(1, 24))
        );
    }

    #[test]
    fn fiber_integration_keeps_x_structure() {
        let n = 1;
        let x = Poly::var(Var::X(1));
        let t = Poly::var(Var::T(1));
        let mut f = BiForm::zero(n, 1);
        f.add_term(vec![Gen::Dt(1), Gen::Dx(1)], lp(t.mul(&x)));
        // stray term without full dt word drops out
        f.add_term(vec![Gen::Dx(1)], lp(x.pow(5)));
        let i = f.fiber_integrate().unwrap();
        assert_eq!(i.coeff(&[Gen::Dx(1)]), lp(x.scale(&rat(1, 2))));
    }

    #[test]
    fn pullback_is_algebra_hom_and_commutes_with_d() {
        let n = 1;
        let x = Poly::var(Var::X(1));
        let phi = JetDiffeo::new(1, vec![x.add(&x.mul(&x))], "x+x^2").unwrap();
        let mut omega = BiForm::zero(n, 0);
        omega.add_term(Vec::new(), lp(x.pow(2)));
        let mut eta = BiForm::zero(n, 0);
        eta.add_term(vec![Gen::Dx(1)], lp(x.clone()));
        // phi^*(omega ^ eta) = phi^*omega ^ phi^*eta
        let lhs = omega.wedge(&eta).pullback(&phi).unwrap();
        let rhs = omega
            .pullback(&phi)
            .unwrap()
            .wedge(&eta.pullback(&phi).unwrap());
        assert_eq!(lhs, rhs);
        // phi^* d = d phi^*
        assert_eq!(omega.pullback(&phi).unwrap().d(), omega.d().pullback(&phi).unwrap());
        assert_eq!(eta.pullback(&phi).unwrap().d(), eta.d().pullback(&phi).unwrap());
    }

    #[test]
    fn pullback_functorial_on_frame_forms() {
        let n = 1;
        let x = Poly::var(Var::X(1));
        let phi = JetDiffeo::new(1, vec![x.add(&x.mul(&x))], "x+x^2").unwrap();
        let psi = JetDiffeo::new(1, vec![x.scale(&rat_int(2)).add(&x.pow(3))], "2x+x^3").unwrap();
        let comp = phi.compose(&psi).unwrap();
        let mut omega = BiForm::zero(n, 0);
        omega.add_term(vec![Gen::Dy(1, 1)], lp(Poly::var(Var::Y(1, 1)).mul(&x)));
        omega.add_term(vec![Gen::Dx(1)], lp(Poly::var(Var::Y(1, 1)).pow(2)));
        // (phi o psi)^* = psi^* o phi^*
        let lhs = omega.pullback(&comp).unwrap();
        let rhs = omega.pullback(&phi).unwrap().pullback(&psi).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn stokes_on_the_simplex() {
        // int_{Delta^p} d_t omega = sum_i (-1)^i int_{Delta^{p-1}} face_i^* omega
        // checked for p = 2 with omega = (t1^2 t2 + t2) dt2 x-independent
        let n = 1;
        let t1 = Poly::var(Var::T(1));
        let t2 = Poly::var(Var::T(2));
        let mut omega = BiForm::zero(n, 2);
        omega.add_term(
            vec![Gen::Dt(2)],
            lp(t1.pow(2).mul(&t2).add(&t2)),
        );
        let lhs = omega.d().fiber_integrate().unwrap().coeff(&[]);
        let mut rhs = LocalizedPoly::zero();
        for i in 0..=2u8 {
            let face = omega.simplex_map(1, &coface(i, 2));
            let val = face.fiber_integrate().unwrap().coeff(&[]);
            rhs = if i % 2 == 0 { rhs.add(&val) } else { rhs.sub(&val) };
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn simplicial_identities() {
        // coface relation d_j d_i = d_i d_{j-1} for i < j, as maps
        // Delta^{p-2} -> Delta^p, tested on coordinate polynomials via
        // composed substitution for p = 3.
        let p = 3u8;
        for i in 0..p {
            for j in (i + 1)..=p {
                // d_j : Delta^{p-1} -> Delta^p then pull t_r along d_i
                let dj = coface(j, p);
                let di = coface(i, p - 1);
                let m1: Vec<Poly> = dj
                    .iter()
                    .map(|img| {
                        let map: BTreeMap<Var, Poly> = (1..p)
                            .map(|r| (Var::T(r), di[(r - 1) as usize].clone()))
                            .collect();
                        img.subst(&map)
                    })
                    .collect();
                let di2 = coface(i, p);
                let djm1 = coface(j - 1, p - 1);
                let m2: Vec<Poly> = di2
                    .iter()
                    .map(|img| {
                        let map: BTreeMap<Var, Poly> = (1..p)
                            .map(|r| (Var::T(r), djm1[(r - 1) as usize].clone()))
                            .collect();
                        img.subst(&map)
                    })
                    .collect();
                assert_eq!(m1, m2, "coface identity failed at i={}, j={}", i, j);
            }
        }
    }

    #[test]
    fn degeneracy_sections() {
        // s_i . d_i = id and s_i . d_{i+1} = id on coordinates, p = 2
        let p = 2u8;
        for i in 0..=p {
            for off in 0..=1u8 {
                let d = coface(i + off, p + 1);
                let s = degeneracy(i, p);
                // apply d then s: t_r of Delta^{p+1} -> s-image, then subst
                let composed: Vec<Poly> = s
                    .iter()
                    .map(|img| {
                        let map: BTreeMap<Var, Poly> = (1..=p + 1)
                            .map(|r| (Var::T(r), d[(r - 1) as usize].clone()))
                            .collect();
                        img.subst(&map)
                    })
                    .collect();
                for (r, c) in composed.iter().enumerate() {
                    assert_eq!(c, &Poly::var(Var::T(r as u8 + 1)));
                }
            }
        }
    }
}

//! The crossed product A = C_c(FR^n) x| G and the action of H_n on it.
//!
//! Monomials f U_{phi^{-1}} are stored as (f, phi) with f a localized
//! polynomial in the frame coordinates (x, y) and phi the underlying
//! polynomial diffeomorphism.  The product is
//!   (f U_{phi^{-1}}) (g U_{psi^{-1}}) = f . (g o prolong(phi)) U_{(psi o phi)^{-1}} ,
//! which never inverts a diffeomorphism.  The generators act by
//!   X_k (f U) = X_k(f) U,   Y^i_j (f U) = Y^i_j(f) U,
//!   d^i_{jk l..} (f U_{phi^{-1}}) = gamma^i_{jk l..}(phi) f U_{phi^{-1}} ,
//! and words act by composition right-to-left.

use super::alg::{HopfElement, Word};
use super::gens::HGen;
use crate::error::CoreError;
use crate::jet::{horizontal_apply, vertical_apply, JetDiffeo};
use crate::localized::LocalizedPoly;
use crate::poly::{Rational, Var};
use std::collections::BTreeMap;

/// A monomial f U_{phi^{-1}} of the crossed product.
#[derive(Clone, Debug)]
pub struct CrossedMonomial {
    pub f: LocalizedPoly,
    pub phi: JetDiffeo,
}

impl CrossedMonomial {
    pub fn new(f: LocalizedPoly, phi: JetDiffeo) -> Result<Self, CoreError> {
        if f.depends_on(|v| !matches!(v, Var::X(_) | Var::Y(_, _))) {
            return Err(CoreError::Unsupported(
                "crossed monomial coefficient must involve only x, y".into(),
            ));
        }
        Ok(CrossedMonomial { f, phi })
    }

    /// The unit 1 . U_id.
    pub fn unit(n: u8) -> Self {
        CrossedMonomial {
            f: LocalizedPoly::one(),
            phi: JetDiffeo::identity(n),
        }
    }

    pub fn n(&self) -> u8 {
        self.phi.n()
    }
}

/// A finite linear combination of crossed monomials, merged by group element.
#[derive(Clone, Debug)]
pub struct CrossedElement {
    n: u8,
    terms: Vec<CrossedMonomial>,
}

fn same_group(a: &JetDiffeo, b: &JetDiffeo) -> bool {
    a.components() == b.components()
}

impl CrossedElement {
    pub fn zero(n: u8) -> Self {
        CrossedElement { n, terms: Vec::new() }
    }

    pub fn from_monomial(m: CrossedMonomial) -> Self {
        let n = m.n();
        let mut out = CrossedElement::zero(n);
        out.add_monomial(m);
        out
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn terms(&self) -> &[CrossedMonomial] {
        &self.terms
    }

    pub fn add_monomial(&mut self, m: CrossedMonomial) {
        for t in &mut self.terms {
            if same_group(&t.phi, &m.phi) {
                t.f = t.f.add(&m.f);
                return;
            }
        }
        self.terms.push(m);
    }

    pub fn add(&self, other: &CrossedElement) -> CrossedElement {
        let mut out = self.clone();
        for m in &other.terms {
            out.add_monomial(m.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> CrossedElement {
        CrossedElement {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|m| CrossedMonomial {
                    f: m.f.scale(c),
                    phi: m.phi.clone(),
                })
                .collect(),
        }
    }

    pub fn neg(&self) -> CrossedElement {
        self.scale(&(-Rational::from_integer(1.into())))
    }

    pub fn sub(&self, other: &CrossedElement) -> CrossedElement {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|m| m.f.is_zero())
    }

    /// Crossed-product multiplication, bilinear over the monomial product.
    pub fn mul(&self, other: &CrossedElement) -> Result<CrossedElement, CoreError> {
        let mut out = CrossedElement::zero(self.n);
        for a in &self.terms {
            for b in &other.terms {
                out.add_monomial(mul_monomials(a, b)?);
            }
        }
        Ok(out)
    }

    /// Evaluate every coefficient at the same frame point; returns pairs of
    /// (group-element index into terms, value).
    pub fn evaluate(&self, point: &BTreeMap<Var, Rational>) -> Result<Vec<Rational>, CoreError> {
        self.terms.iter().map(|m| m.f.evaluate(point)).collect()
    }
}

/// (f U_{phi^{-1}}) (g U_{psi^{-1}}).
pub fn mul_monomials(
    a: &CrossedMonomial,
    b: &CrossedMonomial,
) -> Result<CrossedMonomial, CoreError> {
    let map = a.phi.prolong_map();
    let pulled = b.f.subst(&map)?;
    Ok(CrossedMonomial {
        f: a.f.mul(&pulled),
        phi: b.phi.compose(&a.phi)?,
    })
}

/// Action of a single generator on a monomial.
pub fn act_gen(g: &HGen, m: &CrossedMonomial) -> Result<CrossedMonomial, CoreError> {
    let n = m.n();
    let f = match g {
        HGen::X(k) => horizontal_apply(n, *k, &m.f),
        HGen::Y(i, j) => vertical_apply(n, *i, *j, &m.f),
        HGen::Delta(d) => m
            .phi
            .gamma_coeff(d.i, d.j, d.k, &d.ls, true)?
            .mul(&m.f),
    };
    Ok(CrossedMonomial {
        f,
        phi: m.phi.clone(),
    })
}

/// Action of a word (composition, rightmost letter first).
pub fn act_word(w: &[HGen], m: &CrossedMonomial) -> Result<CrossedMonomial, CoreError> {
    let mut cur = m.clone();
    for g in w.iter().rev() {
        cur = act_gen(g, &cur)?;
    }
    Ok(cur)
}

/// Action of a Hopf element on a monomial.
pub fn act(h: &HopfElement, m: &CrossedMonomial) -> Result<CrossedElement, CoreError> {
    let mut out = CrossedElement::zero(m.n());
    for (w, c) in h.terms() {
        let r = act_word(w, m)?;
        out.add_monomial(CrossedMonomial {
            f: r.f.scale(c),
            phi: r.phi,
        });
    }
    Ok(out)
}

/// Action of a raw word list with coefficients (no normal form involved);
/// used by the operator oracle to compare raw words with their normal forms.
pub fn act_raw(terms: &[(Word, Rational)], m: &CrossedMonomial) -> Result<CrossedElement, CoreError> {
    let mut out = CrossedElement::zero(m.n());
    for (w, c) in terms {
        let r = act_word(w, m)?;
        out.add_monomial(CrossedMonomial {
            f: r.f.scale(c),
            phi: r.phi,
        });
    }
    Ok(out)
}

/// Action on a general crossed element.
pub fn act_element(h: &HopfElement, a: &CrossedElement) -> Result<CrossedElement, CoreError> {
    let mut out = CrossedElement::zero(a.n());
    for m in a.terms() {
        out = out.add(&act(h, m)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::poly::rat_int;

    fn mono(_n: u8, f: &str, phi: JetDiffeo) -> CrossedMonomial {
        CrossedMonomial::new(parse(f).unwrap(), phi).unwrap()
    }

    #[test]
    fn generator_actions_match_the_fixed_fields() {
        // Y^1_1 (y U_id) = y U_id for n = 1.
        let a = mono(1, "y(1;1)", JetDiffeo::identity(1));
        let r = act_gen(&HGen::Y(1, 1), &a).unwrap();
        assert_eq!(r.f, a.f);
        // X_1 (x U_id) = y U_id.
        let a = mono(1, "x1", JetDiffeo::identity(1));
        let r = act_gen(&HGen::X(1), &a).unwrap();
        assert_eq!(r.f, parse("y(1;1)").unwrap());
    }

    #[test]
    fn delta_action_is_gamma_multiplication() {
        // d^1_{11} (1 U_{phi^{-1}}) = (2y/(1+2x)) U_{phi^{-1}} for phi = x + x^2.
        let phi = JetDiffeo::new(1, vec![parse("x1 + x1^2").unwrap().numerator().clone()], "q").unwrap();
        let a = mono(1, "1", phi);
        let r = act_gen(&HGen::delta(1, 1, 1, &[]), &a).unwrap();
        let want = parse("2*y(1;1)").unwrap().mul(&parse("1 + 2*x1").unwrap().invert().unwrap());
        assert_eq!(r.f, want);
    }

    #[test]
    fn crossed_product_unit_laws_and_groups() {
        let phi = JetDiffeo::new(1, vec![parse("x1 + x1^3").unwrap().numerator().clone()], "c").unwrap();
        let a = mono(1, "x1*y(1;1)", phi.clone());
        let e = CrossedMonomial::unit(1);
        let left = mul_monomials(&e, &a).unwrap();
        let right = mul_monomials(&a, &e).unwrap();
        assert_eq!(left.f, a.f);
        assert_eq!(right.f, a.f);
        assert_eq!(left.phi.components(), a.phi.components());
        assert_eq!(right.phi.components(), a.phi.components());
    }

    #[test]
    fn crossed_product_is_associative() {
        use crate::sample::random_diffeo;
        use rand::rngs::StdRng;
        use rand::SeedableRng;
        let mut rng = StdRng::seed_from_u64(7);
        for s in 0..3 {
            let a = mono(2, "x1", random_diffeo(2, 2, &mut rng, &format!("assocA{}", s)));
            let b = mono(2, "y(1;2)", random_diffeo(2, 2, &mut rng, &format!("assocB{}", s)));
            let c = mono(2, "x2*y(2;1)", random_diffeo(2, 2, &mut rng, &format!("assocC{}", s)));
            let ab_c = mul_monomials(&mul_monomials(&a, &b).unwrap(), &c).unwrap();
            let a_bc = mul_monomials(&a, &mul_monomials(&b, &c).unwrap()).unwrap();
            assert_eq!(ab_c.phi.components(), a_bc.phi.components());
            assert!(ab_c.f.sub(&a_bc.f).normalize().is_zero());
        }
    }

    #[test]
    fn word_action_composes_right_to_left() {
        // (X_1 Y^1_1)(x y U_id): first Y^1_1 then X_1.
        let a = mono(1, "x1*y(1;1)", JetDiffeo::identity(1));
        let w = vec![HGen::X(1), HGen::Y(1, 1)];
        let r = act_word(&w, &a).unwrap();
        // Y^1_1(x y) = x y, then X_1 = y d/dx gives y^2.
        assert_eq!(r.f, parse("y(1;1)^2").unwrap());
        let h = HopfElement::from_word(1, w);
        let via_nf = act(&h, &a).unwrap();
        let raw = CrossedElement::from_monomial(r);
        assert!(via_nf.sub(&raw).is_zero());
        let _ = rat_int(0);
    }
}

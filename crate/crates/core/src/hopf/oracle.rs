//! Operator oracle: the action on the crossed product is the ground truth
//! for the word algebra.  Brackets and normal forms are certified by
//! acting on random crossed monomials with exact coefficients.

use super::act::{act_raw, CrossedMonomial};
use super::alg::{HopfElement, Word};
use crate::error::CoreError;
use crate::localized::LocalizedPoly;
use crate::poly::{Monomial, Poly, Rational, Var};
use crate::sample::random_diffeo;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A random crossed monomial: random (x, y)-monomial coefficient of degree
/// at most `fdeg` over a random polynomial diffeomorphism of the given
/// jet order.
pub fn random_crossed<R: Rng>(n: u8, order: u32, fdeg: u32, rng: &mut R, label: &str) -> CrossedMonomial {
    let mut vars: Vec<Var> = (1..=n).map(Var::X).collect();
    for i in 1..=n {
        for j in 1..=n {
            vars.push(Var::Y(i, j));
        }
    }
    let deg = rng.gen_range(0..=fdeg);
    let mut mono = Monomial::one();
    for _ in 0..deg {
        let v = vars[rng.gen_range(0..vars.len())];
        mono = mono.mul(&Monomial::var(v));
    }
    let f = LocalizedPoly::from(Poly::term(mono, Rational::one()));
    let phi = random_diffeo(n, order, rng, label);
    CrossedMonomial::new(f, phi).expect("x,y monomial")
}

/// Do the two raw-term operators act identically on `samples` random
/// crossed monomials (jet order `order`)?  Exact comparison.
pub fn operators_equal(
    n: u8,
    lhs: &[(Word, Rational)],
    rhs: &[(Word, Rational)],
    order: u32,
    samples: usize,
    seed: u64,
) -> Result<bool, CoreError> {
    let mut rng = StdRng::seed_from_u64(seed);
    for s in 0..samples {
        let m = random_crossed(n, order, 2, &mut rng, &format!("oracle{}_{}", seed, s));
        let l = act_raw(lhs, &m)?;
        let r = act_raw(rhs, &m)?;
        if !l.sub(&r).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn element_terms(h: &HopfElement) -> Vec<(Word, Rational)> {
    h.terms().iter().map(|(w, c)| (w.clone(), c.clone())).collect()
}

/// The bracket [h1, h2]: computed as the commutator in the word algebra and
/// certified against the operator action on random crossed monomials at a
/// jet order covering both arguments.
pub fn bracket(h1: &HopfElement, h2: &HopfElement) -> Result<HopfElement, CoreError> {
    let n = h1.n();
    let result = h1.commutator(h2);
    let order = (h1.degree() + h2.degree() + 2) as u32;
    // [h1, h2] as a raw composite operator.
    let mut raw: Vec<(Word, Rational)> = Vec::new();
    for (w1, c1) in h1.terms() {
        for (w2, c2) in h2.terms() {
            let mut w = w1.clone();
            w.extend_from_slice(w2);
            raw.push((w, c1 * c2));
            let mut w = w2.clone();
            w.extend_from_slice(w1);
            raw.push((w, -(c1 * c2)));
        }
    }
    if !operators_equal(n, &raw, &element_terms(&result), order, 3, 0xB7AC7)? {
        return Err(CoreError::Internal(
            "word-algebra bracket disagrees with the operator commutator".into(),
        ));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::super::alg::normal_form;
    use super::super::gens::HGen;
    use super::*;
    use crate::poly::rat_int;

    fn gen_el(n: u8, g: HGen) -> HopfElement {
        HopfElement::generator(n, g)
    }

    fn d(i: u8, j: u8, k: u8, ls: &[u8]) -> HGen {
        HGen::delta(i, j, k, ls)
    }

    #[test]
    fn bracket_is_operator_certified() {
        // Every entry of the commutator table for n = 2, certified by the
        // action on random crossed monomials inside bracket().
        let n = 2;
        // [X_1, d^1_{12}] = d^1_{121} = d^1_{112} + corrections.
        let got = bracket(&gen_el(n, HGen::X(1)), &gen_el(n, d(1, 1, 2, &[]))).unwrap();
        let want = normal_form(n, &[d(1, 1, 2, &[1])]);
        assert_eq!(got, want);
        // [Y^2_1, X_1] = X_2.
        let got = bracket(&gen_el(n, HGen::Y(2, 1)), &gen_el(n, HGen::X(1))).unwrap();
        assert_eq!(got, gen_el(n, HGen::X(2)));
        // [Y^1_2, d^2_{22}] = d^2_{12} + d^2_{21} = 2 d^2_{12}.
        let got = bracket(&gen_el(n, HGen::Y(1, 2)), &gen_el(n, d(2, 2, 2, &[]))).unwrap();
        assert_eq!(got, gen_el(n, d(2, 1, 2, &[])).scale(&rat_int(2)));
        // [Y^2_1, d^2_{11}] = d^2_{21} + d^2_{12} - d^1_{11}.
        let got = bracket(&gen_el(n, HGen::Y(2, 1)), &gen_el(n, d(2, 1, 1, &[]))).unwrap();
        let want = gen_el(n, d(2, 1, 2, &[]))
            .scale(&rat_int(2))
            .sub(&gen_el(n, d(1, 1, 1, &[])));
        assert_eq!(got, want);
        // [d, d'] = 0.
        let got = bracket(&gen_el(n, d(1, 1, 1, &[])), &gen_el(n, d(2, 1, 2, &[]))).unwrap();
        assert!(got.is_zero());
    }

    #[test]
    fn normal_form_is_operator_faithful() {
        // act(raw word) == act(normal form) on random crossed monomials,
        // and distinct normal forms act differently.
        use rand::rngs::StdRng;
        use rand::SeedableRng;
        let n = 2;
        let words: Vec<Word> = vec![
            vec![HGen::Y(1, 2), d(1, 1, 1, &[]), HGen::X(2)],
            vec![HGen::X(2), HGen::Y(2, 1), d(2, 1, 2, &[1])],
            vec![d(1, 2, 1, &[2]), HGen::X(1)],
        ];
        for (s, w) in words.iter().enumerate() {
            let nf = normal_form(n, w);
            let raw = vec![(w.clone(), rat_int(1))];
            let nf_terms: Vec<(Word, Rational)> =
                nf.terms().iter().map(|(u, c)| (u.clone(), c.clone())).collect();
            assert!(operators_equal(n, &raw, &nf_terms, 5, 3, 100 + s as u64).unwrap());
        }
        // Distinct normal forms are told apart by the action.
        let a = vec![(vec![d(1, 1, 1, &[])], rat_int(1))];
        let b = vec![(vec![d(1, 1, 2, &[])], rat_int(1))];
        assert!(!operators_equal(n, &a, &b, 4, 3, 7).unwrap());
        let mut rng = StdRng::seed_from_u64(11);
        let _ = random_crossed(n, 3, 2, &mut rng, "touch");
    }

    #[test]
    fn structure_identities_hold_as_operator_identities() {
        // d^i_{j l k} - d^i_{j k l} vs d^s_{jk} d^i_{sl} - d^s_{jl} d^i_{sk},
        // acting through raw gamma coefficients (no normal form involved).
        let n = 2;
        for (i, j, k, l) in [(1u8, 1u8, 1u8, 2u8), (2, 1, 2, 1), (1, 2, 2, 1)] {
            let lhs = vec![
                (vec![d(i, j, l, &[k])], rat_int(1)),
                (vec![d(i, j, k, &[l])], rat_int(-1)),
            ];
            let mut rhs = Vec::new();
            for s in 1..=n {
                rhs.push((vec![d(s, j, k, &[]), d(i, s, l, &[])], rat_int(1)));
                rhs.push((vec![d(s, j, l, &[]), d(i, s, k, &[])], rat_int(-1)));
            }
            assert!(operators_equal(n, &lhs, &rhs, 4, 3, 31 * (i + 2 * j + 4 * k + 8 * l) as u64).unwrap());
        }
    }
}

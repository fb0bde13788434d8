//! Deterministic sampling helpers for tests and the verification suite:
//! random polynomial diffeomorphisms with unipotent-triangular linear part
//! and random rational evaluation points.

use std::collections::BTreeMap;

use rand::Rng;

use crate::jet::JetDiffeo;
use crate::poly::{rat, Monomial, Poly, Rational, Var};

/// A small random rational with denominator 1..=3 and numerator -4..=4.
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

/// A small nonzero random rational.
pub fn random_nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let r = random_rational(rng);
        if r != rat(0, 1) {
            return r;
        }
    }
}

/// Random polynomial diffeomorphism x^i + (triangular linear mix) + higher
/// order terms up to `deg`; the linear part is unipotent triangular, hence
/// always invertible.
pub fn random_diffeo<R: Rng>(n: u8, deg: u32, rng: &mut R, label: &str) -> JetDiffeo {
    let mut components = Vec::new();
    for i in 1..=n {
        let mut p = Poly::var(Var::X(i));
        // strictly lower-triangular linear admixture
        for j in 1..i {
            p.add_term(
                Monomial::var(Var::X(j)),
                rat(rng.gen_range(-2..=2), 1),
            );
        }
        // a few higher-order monomials
        for _ in 0..3 {
            let d = rng.gen_range(2..=deg.max(2));
            let mut pairs = Vec::new();
            let mut rem = d;
            while rem > 0 {
                let v = Var::X(rng.gen_range(1..=n));
                let e = rng.gen_range(1..=rem);
                pairs.push((v, e));
                rem -= e;
            }
            p.add_term(Monomial::from_pairs(pairs), rat(rng.gen_range(-2..=2), rng.gen_range(1..=2)));
        }
        components.push(p);
    }
    JetDiffeo::new(n, components, label).expect("unipotent linear part is invertible")
}

/// Random rational x-point for dimension n.
pub fn random_x_point<R: Rng>(n: u8, rng: &mut R) -> BTreeMap<Var, Rational> {
    (1..=n)
        .map(|i| (Var::X(i), random_rational(rng)))
        .collect()
}

/// Extend a point with a y-frame near the identity (dominant diagonal, so
/// det(y) stays away from zero for these magnitudes).
pub fn extend_with_y_point<R: Rng>(point: &mut BTreeMap<Var, Rational>, n: u8, rng: &mut R) {
    for i in 1..=n {
        for j in 1..=n {
            let v = if i == j {
                rat(1, 1) + rat(rng.gen_range(0..=1), 3)
            } else {
                rat(rng.gen_range(-1..=1), 5)
            };
            point.insert(Var::Y(i, j), v);
        }
    }
}

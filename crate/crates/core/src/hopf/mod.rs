//! The Hopf algebra H_n, realized operationally on the crossed product
//! A = C_c(FR^n) x| Diff(R^n): generators and normal forms (PBW order and
//! the structure identities), the action, the coproduct obtained by
//! Leibniz probing, antipode, twisted antipode, and the modular character.

pub mod act;
pub mod alg;
pub mod coprod;
pub mod gens;
pub mod oracle;
pub mod solve;

pub use act::{act, act_element, act_gen, act_raw, act_word, mul_monomials, CrossedElement, CrossedMonomial};
pub use alg::{bracket_gens, normal_form, HopfElement, Word};
pub use coprod::{
    antipode, character, coproduct, coproduct_probe, counit, delta_word, iterated_coproduct,
    s_delta,
    TensorElement, TensorN,
};
pub use gens::{degree_one_generators, word_to_string, DeltaIdx, HGen};
pub use oracle::bracket;

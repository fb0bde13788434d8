//! Frozen sign conventions.
//!
//! The total complex pairs the group boundary with the de Rham
//! differential as D = delta-bar + (-1)^p d on level-p components.  The
//! relative sign is forced by the simplex Stokes identity
//!   fib_int(d w) - (-1)^p d fib_int(w) = sum_i (-1)^i fib_int(face_i^* w)
//! under the dt_1^..^dt_p orientation, and is validated end to end by the
//! symbolic (n=1) and randomized (n=2) closedness runs before being frozen
//! here.  Changing it breaks those runs.

/// Sign in front of d C^{(p+1)} in the level-p closedness identity
/// delta_bar(C^{(p)}) + total_d_sign(p) * d C^{(p+1)} = 0.
pub fn total_d_sign(p: u8) -> i64 {
    if p % 2 == 0 {
        1
    } else {
        -1
    }
}

//! Scaled Chebyshev polynomials `S_n` with `S_0 = 0`, `S_1 = 1` and
//! `S_n(x) = x S_{n-1}(x) - S_{n-2}(x)`, extended by `S_{-n} = -S_n`.
//!
//! Evaluation always runs the three-term recurrence, on either backend. The
//! `sinh` ratio closed form is never used, so `x = 2` needs no special case.

use crate::scalar::{BigFloat, Real, Scalar};

/// `S_n(x)` on any [`Real`] backend, in `O(|n|)` ring operations.
pub fn s_generic<T: Real>(n: i64, x: &T) -> T {
    s_pair(n, x).1
}

/// `(S_{n-1}(x), S_n(x))`, sharing one recurrence run.
pub fn s_pair<T: Real>(n: i64, x: &T) -> (T, T) {
    if n <= 0 {
        // S_{n-1} = -S_{1-n} and S_n = -S_{-n}, with 1 - n >= 1.
        let (below, above) = forward(1 - n, x);
        return (above.neg_ref(), below.neg_ref());
    }
    forward(n, x)
}

/// `(S_{k-1}(x), S_k(x))` for `k >= 1`.
fn forward<T: Real>(k: i64, x: &T) -> (T, T) {
    debug_assert!(k >= 1);
    let mut prev = x.int_like(0);
    let mut cur = x.int_like(1);
    for _ in 1..k {
        let next = x.mul_ref(&cur).sub_ref(&prev);
        prev = std::mem::replace(&mut cur, next);
    }
    (prev, cur)
}

/// Exact `S_n(x)`.
pub fn s_eval(n: i64, x: &Scalar) -> Scalar {
    s_generic(n, x)
}

/// `S_n(x)` in the float context of `x`.
pub fn s_eval_float(n: i64, x: &BigFloat) -> BigFloat {
    s_generic(n, x)
}

/// `S_{k+1}(x) - S_{k-1}(x)`: the trace of a `k`-th power of an element
/// with trace `x`.
pub fn power_trace<T: Real>(k: i64, x: &T) -> T {
    let (below, at) = s_pair(k, x);
    x.mul_ref(&at).sub_ref(&below).sub_ref(&below)
}

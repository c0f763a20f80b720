//! Hermite functions and associated Laguerre polynomials for quadrature
//! marginals, POVM elements, and Wigner kernels.
//!
//! The Hermite functions ψ_n(q) = π^{−1/4}(2ⁿn!)^{−1/2}H_n(q)e^{−q²/2} are
//! evaluated by the stable upward recurrence
//! ψ_{n+1} = √(2/(n+1))·q·ψ_n − √(n/(n+1))·ψ_{n−1},
//! which avoids factorial overflow at any cutoff used here.

use crate::num::{real, Real};

/// ψ_0..ψ_n at the point q.
pub fn hermite_functions<T: Real>(q: T, n_max: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n_max + 1);
    let psi0 = real::<T>(std::f64::consts::PI.powf(-0.25)) * (-q * q * real::<T>(0.5)).exp();
    out.push(psi0);
    if n_max == 0 {
        return out;
    }
    out.push(real::<T>(2.0).sqrt() * q * psi0);
    for n in 1..n_max {
        let a = (real::<T>(2.0) / real::<T>((n + 1) as f64)).sqrt();
        let b = (real::<T>(n as f64) / real::<T>((n + 1) as f64)).sqrt();
        let next = a * q * out[n] - b * out[n - 1];
        out.push(next);
    }
    out
}

/// Associated Laguerre polynomial L_n^{(k)}(x) by the three-term recurrence.
pub fn laguerre<T: Real>(n: usize, k: usize, x: T) -> T {
    let kk = real::<T>(k as f64);
    let mut lm1 = T::one(); // L_0
    if n == 0 {
        return lm1;
    }
    let mut l = T::one() + kk - x; // L_1
    for j in 1..n {
        let jj = real::<T>(j as f64);
        let next = ((real::<T>(2.0) * jj + T::one() + kk - x) * l - (jj + kk) * lm1)
            / (jj + T::one());
        lm1 = l;
        l = next;
    }
    l
}

/// Binomial coefficient as a float (arguments stay tiny here).
pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    real(acc)
}

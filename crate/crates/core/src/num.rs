//! Scalar abstraction and small numerical helpers shared across the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the core math is generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// Complex value from `f64` parts.
#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(real(re), real(im))
}

/// The imaginary unit.
#[inline]
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `x` as a purely real complex number.
#[inline]
pub fn re_c<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Trapezoidal integral of uniformly sampled values with spacing `dt`.
pub fn trapezoid<T: Real>(dt: T, values: &[T]) -> T {
    if values.len() < 2 {
        return T::zero();
    }
    let half = real::<T>(0.5);
    let inner: T = values[1..values.len() - 1].iter().copied().sum();
    dt * (half * (values[0] + values[values.len() - 1]) + inner)
}

/// Cumulative trapezoidal integral; output has the same length as the input
/// and starts at zero.
pub fn cumulative_trapezoid<T: Real>(dt: T, values: &[T]) -> Vec<T> {
    let half = real::<T>(0.5);
    let mut out = Vec::with_capacity(values.len());
    let mut acc = T::zero();
    out.push(acc);
    for w in values.windows(2) {
        acc += half * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T) -> T {
    fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
        (b - a) / real::<T>(6.0) * (fa + real::<T>(4.0) * fm + fb)
    }
    fn recurse<T: Real, F: Fn(T) -> T>(
        f: &F,
        a: T,
        m: T,
        b: T,
        fa: T,
        fm: T,
        fb: T,
        whole: T,
        tol: T,
        depth: u32,
    ) -> T {
        let lm = (a + m) * real::<T>(0.5);
        let rm = (m + b) * real::<T>(0.5);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= real::<T>(15.0) * tol {
            left + right + delta / real::<T>(15.0)
        } else {
            let half = tol * real::<T>(0.5);
            recurse(f, a, lm, m, fa, flm, fm, left, half, depth - 1)
                + recurse(f, m, rm, b, fm, frm, fb, right, half, depth - 1)
        }
    }
    // Pre-split into panels so localized features are seen before the
    // error estimate can accept a spuriously small whole-interval value.
    const PANELS: usize = 16;
    let width = (b - a) / real::<T>(PANELS as f64);
    let panel_tol = tol / real::<T>(PANELS as f64);
    let mut acc = T::zero();
    for k in 0..PANELS {
        let pa = a + width * real::<T>(k as f64);
        let pb = pa + width;
        let m = (pa + pb) * real::<T>(0.5);
        let (fa, fm, fb) = (f(pa), f(m), f(pb));
        let whole = simpson(pa, pb, fa, fm, fb);
        acc += recurse(f, pa, m, pb, fa, fm, fb, whole, panel_tol, 44);
    }
    acc
}

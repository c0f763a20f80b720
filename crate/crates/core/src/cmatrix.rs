//! Dense complex matrices for small Hilbert spaces.
//!
//! Everything downstream works on dimensions ≤ 16 (two temporal modes at
//! photon cutoff 3), so the implementations here are straightforward dense
//! loops. Eigenvalues of Hermitian matrices come from a cyclic Jacobi sweep,
//! which is plenty for positivity checks on matrices this small.

use num_complex::Complex;

use crate::num::{real, Real};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Outer product |v⟩⟨v| of a (not necessarily normalized) vector.
    pub fn outer(v: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self.at(i, i)).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn scale(&mut self, s: Complex<T>) {
        for x in &mut self.data {
            *x = *x * s;
        }
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        let mut m = self.clone();
        m.scale(s);
        m
    }

    pub fn add_scaled(&mut self, other: &Self, s: Complex<T>) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a = *a + *b * s;
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik.re == T::zero() && aik.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + aik * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.at(j, i).conj())
    }

    /// Kronecker product, with `self` acting on the leading (slow) index.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| {
            let (ia, ib) = (i / m, i % m);
            let (ja, jb) = (j / m, j % m);
            self.at(ia, ja) * other.at(ib, jb)
        })
    }

    /// tr(self · other).
    pub fn trace_mul(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                acc = acc + self.data[i * n + j] * other.data[j * n + i];
            }
        }
        acc
    }

    /// Largest absolute deviation from the Hermitian condition A = A†.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = self.at(i, j) - self.at(j, i).conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Replace the matrix by (A + A†)/2.
    pub fn hermitize(&mut self) {
        let half = real::<T>(0.5);
        for i in 0..self.dim {
            for j in i..self.dim {
                let avg = (self.at(i, j) + self.at(j, i).conj()) * Complex::new(half, T::zero());
                *self.at_mut(i, j) = avg;
                *self.at_mut(j, i) = avg.conj();
            }
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// max |A - I| entrywise.
    pub fn defect_from_identity(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut d = self.at(i, j);
                if i == j {
                    d = d - Complex::new(T::one(), T::zero());
                }
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations,
    /// ascending order. The input is assumed Hermitian; the strictly lower
    /// triangle is ignored.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let n = self.dim;
        let mut a = self.clone();
        a.hermitize();
        let scale = a.max_abs().max(T::one());
        let tol = (T::epsilon() * scale * real::<T>(100.0)).powi(2);
        let pivot_tol = tol / real::<T>((n * n) as f64);
        for _sweep in 0..100 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off + a.at(p, q).norm_sqr();
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.at(p, q);
                    if apq.norm_sqr() <= pivot_tol {
                        continue;
                    }
                    // Unitary 2x2 rotation zeroing a_pq: columns/rows p,q
                    // mixed with [c, s·e^{iφ}; -s·e^{-iφ}, c].
                    let app = a.at(p, p).re;
                    let aqq = a.at(q, q).re;
                    let mag = apq.norm();
                    let phase = apq / Complex::new(mag, T::zero());
                    let tau = (aqq - app) / (real::<T>(2.0) * mag);
                    let t = {
                        let s = if tau >= T::zero() { T::one() } else { -T::one() };
                        s / (tau.abs() + (T::one() + tau * tau).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    let cs = Complex::new(c, T::zero());
                    let sp = phase * Complex::new(s, T::zero());
                    // Update rows/columns p and q:  A ← J† A J.
                    for k in 0..n {
                        let akp = a.at(k, p);
                        let akq = a.at(k, q);
                        *a.at_mut(k, p) = akp * cs - akq * sp.conj();
                        *a.at_mut(k, q) = akq * cs + akp * sp;
                    }
                    for k in 0..n {
                        let apk = a.at(p, k);
                        let aqk = a.at(q, k);
                        *a.at_mut(p, k) = apk * cs - aqk * sp;
                        *a.at_mut(q, k) = aqk * cs + apk * sp.conj();
                    }
                }
            }
        }
        let mut eigs: Vec<T> = (0..n).map(|i| a.at(i, i).re).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eigs
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> T {
        self.hermitian_eigenvalues()[0]
    }
}

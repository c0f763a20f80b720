//! Truncated photon-number-basis states of one and two temporal modes, the
//! loss and phase-drift channels, quadrature marginals, Wigner functions,
//! state fidelity, and the single-photon-subspace projection.
//!
//! Quadratures follow q_φ = (a·e^{−iφ} + a†·e^{iφ})/√2 with [q, p] = i, so
//! the vacuum has variance 1/2. Two-mode basis states are ordered row-major
//! as |00⟩, |01⟩, …, |0n⟩, |10⟩, … with |nm⟩ = |n⟩_E ⊗ |m⟩_L; the time-bin
//! qubit basis is |L⟩ = |01⟩, |E⟩ = |10⟩.

use num_complex::Complex;
use thiserror::Error;

use crate::cmatrix::CMat;
use crate::hermite::{binomial, hermite_functions, laguerre};
use crate::num::{real, re_c, Real};

#[derive(Debug, Error)]
pub enum StateError {
    #[error("amplitude vector is identically zero")]
    ZeroAmplitude,
    #[error("dimension mismatch: state dim {state}, target dim {target}")]
    DimensionMismatch { state: usize, target: usize },
    #[error("transmissivity must lie in [0, 1], got {0}")]
    BadTransmissivity(f64),
    #[error("no valid time-bin events: single-photon subspace population is zero")]
    EmptySubspace,
    #[error("amplitude vector length {len} does not match cutoff {cutoff}")]
    BadLength { len: usize, cutoff: usize },
}

/// Quadrature convention marker: q_φ = (a·e^{−iφ} + a†·e^{iφ})/√2, [q,p] = i.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureConvention;

impl QuadratureConvention {
    pub const VACUUM_VARIANCE: f64 = 0.5;
}

/// Which temporal modes a channel acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeSet {
    Early,
    Late,
    Both,
}

impl ModeSet {
    fn weight(self) -> (usize, usize) {
        match self {
            ModeSet::Early => (1, 0),
            ModeSet::Late => (0, 1),
            ModeSet::Both => (1, 1),
        }
    }
}

/// Cardinal states of a qubit Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cardinal {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl Cardinal {
    pub const ALL: [Cardinal; 6] = [
        Cardinal::Zero,
        Cardinal::One,
        Cardinal::Plus,
        Cardinal::Minus,
        Cardinal::PlusI,
        Cardinal::MinusI,
    ];

    /// Basis amplitudes (α, β) with the state α|0⟩ + β|1⟩.
    pub fn amplitudes<T: Real>(self) -> (Complex<T>, Complex<T>) {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let r = re_c(real::<T>(0.5).sqrt());
        let i = Complex::new(T::zero(), T::one());
        match self {
            Cardinal::Zero => (one, zero),
            Cardinal::One => (zero, one),
            Cardinal::Plus => (r, r),
            Cardinal::Minus => (r, -r),
            Cardinal::PlusI => (r, r * i),
            Cardinal::MinusI => (r, -(r * i)),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Cardinal::Zero => "0",
            Cardinal::One => "1",
            Cardinal::Plus => "+",
            Cardinal::Minus => "-",
            Cardinal::PlusI => "+i",
            Cardinal::MinusI => "-i",
        }
    }
}

impl std::str::FromStr for Cardinal {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(Cardinal::Zero),
            "1" => Ok(Cardinal::One),
            "+" => Ok(Cardinal::Plus),
            "-" => Ok(Cardinal::Minus),
            "+i" => Ok(Cardinal::PlusI),
            "-i" => Ok(Cardinal::MinusI),
            other => Err(format!("unknown cardinal state `{other}` (use 0, 1, +, -, +i, -i)")),
        }
    }
}

fn normalize_amplitudes<T: Real>(amps: &[Complex<T>]) -> Result<Vec<Complex<T>>, StateError> {
    let norm_sq: T = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm_sq <= T::zero() {
        return Err(StateError::ZeroAmplitude);
    }
    let dev = (norm_sq - T::one()).abs();
    if dev > real::<T>(1e-8) {
        log::warn!(
            "pure-state amplitudes off normalization by {:.3e}; renormalizing",
            dev.to_f64().unwrap_or(f64::NAN)
        );
    }
    let inv = norm_sq.sqrt().recip();
    Ok(amps.iter().map(|&a| a * re_c(inv)).collect())
}

/// Single-mode density matrix on photon numbers 0..=cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct FockDensityMatrix<T> {
    cutoff: usize,
    mat: CMat<T>,
}

/// Two-temporal-mode density matrix with a common per-mode cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeDensityMatrix<T> {
    cutoff: usize,
    mat: CMat<T>,
}

/// Two-dimensional qubit density matrix (basis documented at the use site).
#[derive(Clone, Debug, PartialEq)]
pub struct QubitDensityMatrix<T> {
    pub mat: CMat<T>,
}

impl<T: Real> FockDensityMatrix<T> {
    pub fn from_matrix(cutoff: usize, mat: CMat<T>) -> Self {
        assert_eq!(mat.dim(), cutoff + 1);
        Self { cutoff, mat }
    }

    /// ρ = |ψ⟩⟨ψ| from amplitudes over |0⟩..|cutoff⟩; renormalizes with a
    /// warning when the norm is off by more than 1e-8.
    pub fn pure_state(amps: &[Complex<T>], cutoff: usize) -> Result<Self, StateError> {
        if amps.len() != cutoff + 1 {
            return Err(StateError::BadLength { len: amps.len(), cutoff });
        }
        let v = normalize_amplitudes(amps)?;
        Ok(Self { cutoff, mat: CMat::outer(&v) })
    }

    /// Vacuum state.
    pub fn vacuum(cutoff: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); cutoff + 1];
        amps[0] = Complex::new(T::one(), T::zero());
        Self::pure_state(&amps, cutoff).expect("vacuum is normalized")
    }

    /// Single-rail qubit α|0⟩ + β|1⟩ embedded at the given cutoff.
    pub fn single_rail(
        alpha: Complex<T>,
        beta: Complex<T>,
        cutoff: usize,
    ) -> Result<Self, StateError> {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); cutoff + 1];
        amps[0] = alpha;
        amps[1] = beta;
        Self::pure_state(&amps, cutoff)
    }

    /// Maximally mixed state.
    pub fn maximally_mixed(cutoff: usize) -> Self {
        let dim = cutoff + 1;
        let mut mat = CMat::zeros(dim);
        let p = re_c(real::<T>(1.0 / dim as f64));
        for i in 0..dim {
            *mat.at_mut(i, i) = p;
        }
        Self { cutoff, mat }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.mat
    }

    pub fn matrix_mut(&mut self) -> &mut CMat<T> {
        &mut self.mat
    }

    pub fn entry(&self, n: usize, m: usize) -> Complex<T> {
        self.mat.at(n, m)
    }

    pub fn trace(&self) -> T {
        self.mat.trace().re
    }

    pub fn photon_probabilities(&self) -> Vec<T> {
        (0..self.dim()).map(|n| self.mat.at(n, n).re).collect()
    }

    /// Bosonic pure-loss channel with transmissivity η.
    pub fn loss_channel(&self, eta: T) -> Result<Self, StateError> {
        check_eta(eta)?;
        let dim = self.dim();
        let mut out = CMat::zeros(dim);
        for n in 0..dim {
            for m in 0..dim {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..=(self.cutoff - n.max(m)) {
                    acc = acc
                        + re_c(loss_amplitude(n, k, eta) * loss_amplitude(m, k, eta))
                            * self.mat.at(n + k, m + k);
                }
                *out.at_mut(n, m) = acc;
            }
        }
        Ok(Self { cutoff: self.cutoff, mat: out })
    }

    /// Average over a uniform common phase e^{iθn̂}: coherences between
    /// different photon numbers vanish. Idempotent.
    pub fn phase_drift_channel(&self) -> Self {
        let mut out = CMat::zeros(self.dim());
        for n in 0..self.dim() {
            *out.at_mut(n, n) = self.mat.at(n, n);
        }
        Self { cutoff: self.cutoff, mat: out }
    }

    /// Rotate by a fixed phase θ: ρ → e^{iθn̂} ρ e^{−iθn̂}.
    pub fn rotated(&self, theta: T) -> Self {
        let mat = CMat::from_fn(self.dim(), |n, m| {
            let ph = theta * (real::<T>(n as f64) - real::<T>(m as f64));
            self.mat.at(n, m) * Complex::from_polar(T::one(), ph)
        });
        Self { cutoff: self.cutoff, mat }
    }

    pub fn quadrature_marginal(&self, phi: T) -> MarginalPdf<T> {
        MarginalPdf::from_operator(&self.mat, phi)
    }

    /// F = ⟨ψ_t|ρ|ψ_t⟩ against a pure target.
    pub fn fidelity(&self, target: &[Complex<T>]) -> Result<T, StateError> {
        fidelity_on(&self.mat, target)
    }

    pub fn wigner(&self, grid: &WignerGrid<T>) -> WignerField<T> {
        wigner_of(&self.mat, grid)
    }

    /// W(0, 0) from the parity sum (1/π)Σ(−1)ⁿρ_nn.
    pub fn wigner_origin(&self) -> T {
        let mut acc = T::zero();
        for n in 0..self.dim() {
            let sign = if n % 2 == 0 { T::one() } else { -T::one() };
            acc += sign * self.mat.at(n, n).re;
        }
        acc / T::PI()
    }
}

impl<T: Real> TwoModeDensityMatrix<T> {
    pub fn from_matrix(cutoff: usize, mat: CMat<T>) -> Self {
        assert_eq!(mat.dim(), (cutoff + 1) * (cutoff + 1));
        Self { cutoff, mat }
    }

    #[inline]
    pub fn index(&self, n: usize, m: usize) -> usize {
        n * (self.cutoff + 1) + m
    }

    /// ρ = |ψ⟩⟨ψ| from amplitudes over the row-major |nm⟩ basis.
    pub fn pure_state(amps: &[Complex<T>], cutoff: usize) -> Result<Self, StateError> {
        let dim = (cutoff + 1) * (cutoff + 1);
        if amps.len() != dim {
            return Err(StateError::BadLength { len: amps.len(), cutoff });
        }
        let v = normalize_amplitudes(amps)?;
        Ok(Self { cutoff, mat: CMat::outer(&v) })
    }

    /// Time-bin qubit α|01⟩ + β|10⟩ (α on |L⟩, β on |E⟩).
    pub fn timebin_qubit(
        alpha: Complex<T>,
        beta: Complex<T>,
        cutoff: usize,
    ) -> Result<Self, StateError> {
        let side = cutoff + 1;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); side * side];
        amps[1] = alpha; // |01⟩ = |L⟩
        amps[side] = beta; // |10⟩ = |E⟩
        Self::pure_state(&amps, cutoff)
    }

    /// Maximally mixed state.
    pub fn maximally_mixed(cutoff: usize) -> Self {
        let dim = (cutoff + 1) * (cutoff + 1);
        let mut mat = CMat::zeros(dim);
        let p = re_c(real::<T>(1.0 / dim as f64));
        for i in 0..dim {
            *mat.at_mut(i, i) = p;
        }
        Self { cutoff, mat }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn side(&self) -> usize {
        self.cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.side() * self.side()
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.mat
    }

    pub fn matrix_mut(&mut self) -> &mut CMat<T> {
        &mut self.mat
    }

    pub fn trace(&self) -> T {
        self.mat.trace().re
    }

    /// Per-mode pure-loss channel applied independently with the same η.
    pub fn loss_channel(&self, eta: T) -> Result<Self, StateError> {
        check_eta(eta)?;
        let side = self.side();
        // mode E (slow index)
        let mut a = CMat::zeros(self.dim());
        for ne in 0..side {
            for nel in 0..side {
                for m in 0..side {
                    for ml in 0..side {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for k in 0..=(self.cutoff - ne.max(nel)) {
                            acc = acc
                                + re_c(loss_amplitude(ne, k, eta) * loss_amplitude(nel, k, eta))
                                    * self.mat.at(self.index(ne + k, m), self.index(nel + k, ml));
                        }
                        *a.at_mut(self.index(ne, m), self.index(nel, ml)) = acc;
                    }
                }
            }
        }
        // mode L (fast index)
        let mut b = CMat::zeros(self.dim());
        for ne in 0..side {
            for nel in 0..side {
                for m in 0..side {
                    for ml in 0..side {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for k in 0..=(self.cutoff - m.max(ml)) {
                            acc = acc
                                + re_c(loss_amplitude(m, k, eta) * loss_amplitude(ml, k, eta))
                                    * a.at(self.index(ne, m + k), self.index(nel, ml + k));
                        }
                        *b.at_mut(self.index(ne, m), self.index(nel, ml)) = acc;
                    }
                }
            }
        }
        Ok(Self { cutoff: self.cutoff, mat: b })
    }

    /// Average over a uniform phase applied as e^{iθn̂} with the same θ on
    /// every listed mode: coherences between unequal listed-mode photon
    /// totals vanish. Idempotent.
    pub fn phase_drift_channel(&self, modes: ModeSet) -> Self {
        let (we, wl) = modes.weight();
        let side = self.side();
        let mat = CMat::from_fn(self.dim(), |i, j| {
            let (n, m) = (i / side, i % side);
            let (np, mp) = (j / side, j % side);
            if we * n + wl * m == we * np + wl * mp {
                self.mat.at(i, j)
            } else {
                Complex::new(T::zero(), T::zero())
            }
        });
        Self { cutoff: self.cutoff, mat }
    }

    /// Rotate the listed modes by a fixed common phase θ.
    pub fn rotated(&self, theta: T, modes: ModeSet) -> Self {
        let (we, wl) = modes.weight();
        let side = self.side();
        let mat = CMat::from_fn(self.dim(), |i, j| {
            let (n, m) = (i / side, i % side);
            let (np, mp) = (j / side, j % side);
            let tot = (we * n + wl * m) as f64 - (we * np + wl * mp) as f64;
            self.mat.at(i, j) * Complex::from_polar(T::one(), theta * real::<T>(tot))
        });
        Self { cutoff: self.cutoff, mat }
    }

    /// Partial trace keeping one mode.
    pub fn reduced(&self, keep: ModeSet) -> FockDensityMatrix<T> {
        let side = self.side();
        let mat = CMat::from_fn(side, |a, b| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..side {
                let (i, j) = match keep {
                    ModeSet::Early => (self.index(a, k), self.index(b, k)),
                    ModeSet::Late => (self.index(k, a), self.index(k, b)),
                    ModeSet::Both => panic!("reduced() keeps a single mode"),
                };
                acc = acc + self.mat.at(i, j);
            }
            acc
        });
        FockDensityMatrix { cutoff: self.cutoff, mat }
    }

    /// Joint quadrature density P(q_E, q_L | φ_E, φ_L).
    pub fn joint_marginal(&self, phi_e: T, phi_l: T) -> JointPdf<'_, T> {
        JointPdf { rho: self, phi_e, phi_l }
    }

    /// Unnormalized conditional mode-L operator for a measured q_E at phase
    /// φ_E: B_{mm'} = Σ_{nn'} ρ_{(n,m),(n',m')}·ψ_n(q_E)ψ_{n'}(q_E)·e^{i(n'−n)φ_E}.
    /// Its trace is the mode-E marginal density at q_E.
    pub fn conditional_late_operator(&self, q_e: T, phi_e: T) -> CMat<T> {
        let side = self.side();
        let psi = hermite_functions(q_e, self.cutoff);
        let mut b = CMat::zeros(side);
        for n in 0..side {
            for np in 0..side {
                let ph = Complex::from_polar(
                    psi[n] * psi[np],
                    phi_e * (real::<T>(np as f64) - real::<T>(n as f64)),
                );
                for m in 0..side {
                    for mp in 0..side {
                        *b.at_mut(m, mp) =
                            b.at(m, mp) + ph * self.mat.at(self.index(n, m), self.index(np, mp));
                    }
                }
            }
        }
        b
    }

    /// F = ⟨ψ_t|ρ|ψ_t⟩ against a pure target over the |nm⟩ basis.
    pub fn fidelity(&self, target: &[Complex<T>]) -> Result<T, StateError> {
        fidelity_on(&self.mat, target)
    }

    /// Fidelity against the ideal time-bin qubit α|01⟩ + β|10⟩.
    pub fn fidelity_timebin(&self, alpha: Complex<T>, beta: Complex<T>) -> T {
        let side = self.side();
        let mut target = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        target[1] = alpha;
        target[side] = beta;
        fidelity_on(&self.mat, &target).expect("matching dimensions")
    }

    /// Project onto the single-photon (time-bin) subspace {|01⟩, |10⟩} and
    /// renormalize; basis order of the result is (|L⟩, |E⟩).
    pub fn project_single_photon_subspace(&self) -> Result<QubitDensityMatrix<T>, StateError> {
        let (il, ie) = (self.index(0, 1), self.index(1, 0));
        let mut m = CMat::zeros(2);
        *m.at_mut(0, 0) = self.mat.at(il, il);
        *m.at_mut(0, 1) = self.mat.at(il, ie);
        *m.at_mut(1, 0) = self.mat.at(ie, il);
        *m.at_mut(1, 1) = self.mat.at(ie, ie);
        let tr = m.trace().re;
        if tr <= real::<T>(1e-12) {
            return Err(StateError::EmptySubspace);
        }
        m.scale(re_c(tr.recip()));
        Ok(QubitDensityMatrix { mat: m })
    }
}

impl<T: Real> QubitDensityMatrix<T> {
    pub fn pure(alpha: Complex<T>, beta: Complex<T>) -> Self {
        Self { mat: CMat::outer(&[alpha, beta]) }
    }

    pub fn fidelity(&self, target: &[Complex<T>]) -> Result<T, StateError> {
        fidelity_on(&self.mat, target)
    }

    /// Full dephasing of the off-diagonal elements.
    pub fn dephased(&self) -> Self {
        let mut m = CMat::zeros(2);
        *m.at_mut(0, 0) = self.mat.at(0, 0);
        *m.at_mut(1, 1) = self.mat.at(1, 1);
        Self { mat: m }
    }
}

fn check_eta<T: Real>(eta: T) -> Result<(), StateError> {
    if eta < T::zero() || eta > T::one() {
        return Err(StateError::BadTransmissivity(eta.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Kraus amplitude ⟨n|A_k|n+k⟩ = √(C(n+k,k)·η^n·(1−η)^k).
fn loss_amplitude<T: Real>(n: usize, k: usize, eta: T) -> T {
    let binom: T = binomial(n + k, k);
    (binom * eta.powi(n as i32) * (T::one() - eta).powi(k as i32)).sqrt()
}

fn fidelity_on<T: Real>(mat: &CMat<T>, target: &[Complex<T>]) -> Result<T, StateError> {
    if target.len() != mat.dim() {
        return Err(StateError::DimensionMismatch { state: mat.dim(), target: target.len() });
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..target.len() {
        for j in 0..target.len() {
            acc = acc + target[i].conj() * mat.at(i, j) * target[j];
        }
    }
    Ok(acc.re)
}

/// Single-mode quadrature probability density
/// P(q|φ) = Σ_{nm} ρ_{nm} ψ_n(q) ψ_m(q) e^{i(m−n)φ}, stored as real weights
/// over index pairs n ≤ m.
#[derive(Clone, Debug)]
pub struct MarginalPdf<T> {
    cutoff: usize,
    /// Weight per pair (n ≤ m): ρ_nn for n = m, 2·Re[ρ_{nm}e^{i(m−n)φ}] for n < m.
    weights: Vec<T>,
}

/// Enumerate pairs n ≤ m for a given cutoff, in row-major order.
pub fn pair_indices(cutoff: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for n in 0..=cutoff {
        for m in n..=cutoff {
            out.push((n, m));
        }
    }
    out
}

impl<T: Real> MarginalPdf<T> {
    /// Build from any Hermitian operator in the Fock basis (density matrix
    /// or unnormalized conditional operator).
    pub fn from_operator(mat: &CMat<T>, phi: T) -> Self {
        let cutoff = mat.dim() - 1;
        let weights = pair_indices(cutoff)
            .into_iter()
            .map(|(n, m)| {
                if n == m {
                    mat.at(n, n).re
                } else {
                    let ph = Complex::from_polar(T::one(), phi * real::<T>((m - n) as f64));
                    (mat.at(n, m) * ph).re * real::<T>(2.0)
                }
            })
            .collect();
        Self { cutoff, weights }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Density value at q.
    pub fn eval(&self, q: T) -> T {
        let psi = hermite_functions(q, self.cutoff);
        let mut acc = T::zero();
        for (w, (n, m)) in self.weights.iter().zip(pair_indices(self.cutoff)) {
            acc += *w * psi[n] * psi[m];
        }
        acc
    }

    /// ∫P dq equals the trace of the generating operator.
    pub fn total_mass(&self) -> T {
        pair_indices(self.cutoff)
            .into_iter()
            .zip(&self.weights)
            .filter(|((n, m), _)| n == m)
            .map(|(_, w)| *w)
            .sum()
    }
}

/// Joint two-mode quadrature density evaluated directly from the state.
pub struct JointPdf<'a, T> {
    rho: &'a TwoModeDensityMatrix<T>,
    phi_e: T,
    phi_l: T,
}

impl<T: Real> JointPdf<'_, T> {
    pub fn eval(&self, q_e: T, q_l: T) -> T {
        let b = self.rho.conditional_late_operator(q_e, self.phi_e);
        MarginalPdf::from_operator(&b, self.phi_l).eval(q_l)
    }
}

/// Uniform rectangular grid in (q, p).
#[derive(Clone, Copy, Debug)]
pub struct WignerGrid<T> {
    pub q0: T,
    pub p0: T,
    pub dq: T,
    pub dp: T,
    pub nq: usize,
    pub np: usize,
}

impl<T: Real> WignerGrid<T> {
    /// Square grid over [−half, half]² with n points per axis.
    pub fn square(half: T, n: usize) -> Self {
        let step = real::<T>(2.0) * half / real::<T>((n - 1) as f64);
        WignerGrid { q0: -half, p0: -half, dq: step, dp: step, nq: n, np: n }
    }

    pub fn q(&self, i: usize) -> T {
        self.q0 + self.dq * real::<T>(i as f64)
    }

    pub fn p(&self, j: usize) -> T {
        self.p0 + self.dp * real::<T>(j as f64)
    }
}

/// Wigner function samples, row-major over (q, p).
#[derive(Clone, Debug)]
pub struct WignerField<T> {
    pub grid: WignerGrid<T>,
    pub values: Vec<T>,
}

impl<T: Real> WignerField<T> {
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.grid.np + j]
    }

    /// Trapezoidal ∫∫ W dq dp.
    pub fn integral(&self) -> T {
        let mut acc = T::zero();
        let half = real::<T>(0.5);
        for i in 0..self.grid.nq {
            let wi = if i == 0 || i == self.grid.nq - 1 { half } else { T::one() };
            for j in 0..self.grid.np {
                let wj = if j == 0 || j == self.grid.np - 1 { half } else { T::one() };
                acc += wi * wj * self.at(i, j);
            }
        }
        acc * self.grid.dq * self.grid.dp
    }

    /// ∫ W dp along fixed q, the position marginal.
    pub fn marginal_q(&self) -> Vec<T> {
        let half = real::<T>(0.5);
        (0..self.grid.nq)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.grid.np {
                    let wj = if j == 0 || j == self.grid.np - 1 { half } else { T::one() };
                    acc += wj * self.at(i, j);
                }
                acc * self.grid.dp
            })
            .collect()
    }
}

/// Wigner kernel for |n⟩⟨m| with m ≥ n under the [q,p] = i convention:
/// W_{nm}(q,p) = ((−1)^n/π)·√(n!/m!)·(√2(q+ip))^{m−n}·e^{−(q²+p²)}·L_n^{m−n}(2(q²+p²)).
pub fn wigner_kernel<T: Real>(n: usize, m: usize, q: T, p: T) -> Complex<T> {
    debug_assert!(m >= n);
    let r2 = q * q + p * p;
    let k = m - n;
    // √(n!/m!) = 1/√(∏_{j=n+1..m} j)
    let mut prod = 1.0_f64;
    for j in (n + 1)..=m {
        prod *= j as f64;
    }
    let ratio = real::<T>(1.0 / prod.sqrt());
    let sign = if n % 2 == 0 { T::one() } else { -T::one() };
    let scalar = sign / T::PI() * ratio * (-r2).exp() * laguerre(n, k, real::<T>(2.0) * r2);
    let z = Complex::new(q, p) * re_c(real::<T>(2.0).sqrt());
    z.powu(k as u32) * re_c(scalar)
}

fn wigner_of<T: Real>(mat: &CMat<T>, grid: &WignerGrid<T>) -> WignerField<T> {
    let cutoff = mat.dim() - 1;
    let mut values = Vec::with_capacity(grid.nq * grid.np);
    for i in 0..grid.nq {
        let q = grid.q(i);
        for j in 0..grid.np {
            let p = grid.p(j);
            let mut acc = T::zero();
            for n in 0..=cutoff {
                acc += mat.at(n, n).re * wigner_kernel(n, n, q, p).re;
            }
            for n in 0..=cutoff {
                for m in (n + 1)..=cutoff {
                    let w = mat.at(n, m) * wigner_kernel(n, m, q, p);
                    acc += real::<T>(2.0) * w.re;
                }
            }
            values.push(acc);
        }
    }
    WignerField { grid: *grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::cplx;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        cplx(re, im)
    }

    fn timebin_plus(cutoff: usize) -> TwoModeDensityMatrix<f64> {
        let r = 0.5_f64.sqrt();
        TwoModeDensityMatrix::timebin_qubit(c(r, 0.0), c(r, 0.0), cutoff).unwrap()
    }

    #[test]
    fn pure_state_examples() {
        // |1⟩ → diag(0, 1, 0, 0)
        let one = FockDensityMatrix::single_rail(c(0.0, 0.0), c(1.0, 0.0), 3).unwrap();
        assert_relative_eq!(one.entry(1, 1).re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(one.trace(), 1.0, epsilon = 1e-15);

        // (|L⟩ + |E⟩)/√2 → four entries of magnitude 1/2 in the {|01⟩,|10⟩} block
        let tb = timebin_plus(3);
        let (il, ie) = (tb.index(0, 1), tb.index(1, 0));
        for (i, j) in [(il, il), (il, ie), (ie, il), (ie, ie)] {
            assert_relative_eq!(tb.matrix().at(i, j).norm(), 0.5, epsilon = 1e-14);
        }

        // all-zero amplitudes rejected
        assert!(matches!(
            FockDensityMatrix::<f64>::pure_state(&[c(0.0, 0.0); 4], 3),
            Err(StateError::ZeroAmplitude)
        ));
    }

    #[test]
    fn loss_identity_at_unit_eta() {
        let tb = timebin_plus(3);
        let out = tb.loss_channel(1.0).unwrap();
        assert!(out
            .matrix()
            .data()
            .iter()
            .zip(tb.matrix().data())
            .all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn loss_single_photon_two_outcomes() {
        // |1⟩⟨1| with η = 0.556 → 0.556|1⟩⟨1| + 0.444|0⟩⟨0|
        let one = FockDensityMatrix::single_rail(c(0.0, 0.0), c(1.0, 0.0), 3).unwrap();
        let out = one.loss_channel(0.556).unwrap();
        assert_relative_eq!(out.entry(1, 1).re, 0.556, epsilon = 1e-14);
        assert_relative_eq!(out.entry(0, 0).re, 0.444, epsilon = 1e-14);
        assert_relative_eq!(out.trace(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn loss_timebin_branch() {
        // (|10⟩+|01⟩)/√2 at η = 0.5 per mode → 0.5|ψ⟩⟨ψ| + 0.5|00⟩⟨00|
        let tb = timebin_plus(3);
        let out = tb.loss_channel(0.5).unwrap();
        let f = out.fidelity_timebin(c(0.5_f64.sqrt(), 0.0), c(0.5_f64.sqrt(), 0.0));
        assert_relative_eq!(f, 0.5, epsilon = 1e-13);
        let vac = out.matrix().at(0, 0).re;
        assert_relative_eq!(vac, 0.5, epsilon = 1e-13);
        assert_relative_eq!(out.trace(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn drift_single_rail_dephases() {
        let r = 0.5_f64.sqrt();
        let sr = FockDensityMatrix::single_rail(c(r, 0.0), c(r, 0.0), 3).unwrap();
        let out = sr.phase_drift_channel();
        assert_relative_eq!(out.entry(0, 1).norm(), 0.0, epsilon = 1e-15);
        let f = out.fidelity(&[c(r, 0.0), c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_relative_eq!(f, 0.5, epsilon = 1e-13);
        // idempotent
        assert_eq!(out.phase_drift_channel(), out);
    }

    #[test]
    fn drift_common_phase_preserves_timebin() {
        let tb = timebin_plus(3);
        let out = tb.phase_drift_channel(ModeSet::Both);
        let diff: f64 = out
            .matrix()
            .data()
            .iter()
            .zip(tb.matrix().data())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14, "common drift must leave the time-bin state unchanged");
    }

    #[test]
    fn drift_kills_unequal_total_coherence() {
        // |2⟩⟨0| coherence dies under uniform drift
        let amps = [c(0.5_f64.sqrt(), 0.0), c(0.0, 0.0), c(0.5_f64.sqrt(), 0.0)];
        let rho = FockDensityMatrix::pure_state(&amps, 2).unwrap();
        let out = rho.phase_drift_channel();
        assert_relative_eq!(out.entry(0, 2).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(out.entry(2, 2).re, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn marginal_vacuum_gaussian() {
        let vac = FockDensityMatrix::<f64>::vacuum(3);
        for phi in [0.0, 0.7, 3.9] {
            let pdf = vac.quadrature_marginal(phi);
            assert_relative_eq!(
                pdf.eval(0.0),
                1.0 / (std::f64::consts::PI).sqrt(),
                epsilon = 1e-12
            );
            // variance 1/2 ⇒ density at 1σ = P(0)·e^{−1/2}
            let sigma = 0.5_f64.sqrt();
            assert_relative_eq!(
                pdf.eval(sigma),
                pdf.eval(0.0) * (-0.5_f64).exp(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn marginal_single_photon_node() {
        let one = FockDensityMatrix::single_rail(c(0.0, 0.0), c(1.0, 0.0), 3).unwrap();
        let pdf = one.quadrature_marginal(1.2);
        assert_relative_eq!(pdf.eval(0.0), 0.0, epsilon = 1e-14);
        let q = 0.8_f64;
        let expect = 2.0 / std::f64::consts::PI.sqrt() * q * q * (-q * q).exp();
        assert_relative_eq!(pdf.eval(q), expect, epsilon = 1e-12);
    }

    #[test]
    fn marginal_normalization_by_quadrature() {
        let r = 0.5_f64.sqrt();
        let rho = FockDensityMatrix::single_rail(c(r, 0.0), c(0.0, r), 3)
            .unwrap()
            .loss_channel(0.7)
            .unwrap();
        let pdf = rho.quadrature_marginal(0.9);
        let total = crate::num::adaptive_simpson(&|q: f64| pdf.eval(q), -10.0, 10.0, 1e-12);
        assert_relative_eq!(total, 1.0, epsilon = 1e-8);
        // 2π-periodic in phase
        let pdf2 = rho.quadrature_marginal(0.9 + std::f64::consts::TAU);
        assert_relative_eq!(pdf.eval(0.37), pdf2.eval(0.37), epsilon = 1e-12);
    }

    #[test]
    fn joint_marginal_product_state() {
        // product state |1⟩_E ⊗ |0⟩_L: joint = product of marginals
        let side = 3 + 1;
        let mut amps = vec![c(0.0, 0.0); side * side];
        amps[side] = c(1.0, 0.0); // |10⟩
        let rho = TwoModeDensityMatrix::pure_state(&amps, 3).unwrap();
        let joint = rho.joint_marginal(0.3, 1.1);
        let e = FockDensityMatrix::single_rail(c(0.0, 0.0), c(1.0, 0.0), 3).unwrap();
        let l = FockDensityMatrix::<f64>::vacuum(3);
        for (qe, ql) in [(0.0, 0.0), (0.5, -1.0), (1.5, 0.7)] {
            let expect = e.quadrature_marginal(0.3).eval(qe) * l.quadrature_marginal(1.1).eval(ql);
            assert_relative_eq!(joint.eval(qe, ql), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn joint_marginal_covariance_flips_sign() {
        // covariance of (q_E, q_L) for (|10⟩+|01⟩)/√2 is cos(Δφ)/2
        let tb = timebin_plus(3);
        let cov = |dphi: f64| {
            let joint = tb.joint_marginal(dphi, 0.0);
            let mut acc = 0.0;
            let n = 81;
            let (lo, hi) = (-4.0, 4.0);
            let step = (hi - lo) / (n - 1) as f64;
            for i in 0..n {
                for j in 0..n {
                    let (qe, ql) = (lo + i as f64 * step, lo + j as f64 * step);
                    acc += qe * ql * joint.eval(qe, ql) * step * step;
                }
            }
            acc
        };
        let c0 = cov(0.0);
        let cpi = cov(std::f64::consts::PI);
        assert_relative_eq!(c0, 0.5, epsilon = 1e-3);
        assert_relative_eq!(cpi, -0.5, epsilon = 1e-3);
    }

    #[test]
    fn wigner_reference_values() {
        let vac = FockDensityMatrix::<f64>::vacuum(3);
        let grid = WignerGrid::square(4.0, 5);
        let w = vac.wigner(&grid);
        // center of the square grid is the origin
        assert_relative_eq!(w.at(2, 2), 1.0 / std::f64::consts::PI, epsilon = 1e-12);
        assert_relative_eq!(vac.wigner_origin(), 1.0 / std::f64::consts::PI, epsilon = 1e-14);

        let one = FockDensityMatrix::single_rail(c(0.0, 0.0), c(1.0, 0.0), 3).unwrap();
        assert_relative_eq!(one.wigner_origin(), -1.0 / std::f64::consts::PI, epsilon = 1e-14);

        // lossy single photon: W(0,0) = (1 − 2η)/π, still negative
        let lossy = one.loss_channel(0.556).unwrap();
        assert_relative_eq!(
            lossy.wigner_origin(),
            (1.0 - 2.0 * 0.556) / std::f64::consts::PI,
            epsilon = 1e-12
        );
        assert!(lossy.wigner_origin() < 0.0);
        assert_relative_eq!(lossy.wigner_origin(), -0.03565, epsilon = 5e-5);
    }

    #[test]
    fn fidelity_examples() {
        let r = 0.5_f64.sqrt();
        let target = [c(r, 0.0), c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let pure = FockDensityMatrix::pure_state(&target, 3).unwrap();
        assert_relative_eq!(pure.fidelity(&target).unwrap(), 1.0, epsilon = 1e-13);

        // maximally mixed qubit block vs any pure target in that block → 0.5
        let mut mixed = CMat::zeros(4);
        *mixed.at_mut(0, 0) = c(0.5, 0.0);
        *mixed.at_mut(1, 1) = c(0.5, 0.0);
        let mixed = FockDensityMatrix::from_matrix(3, mixed);
        assert_relative_eq!(mixed.fidelity(&target).unwrap(), 0.5, epsilon = 1e-14);

        // loss_channel of the time-bin |+⟩ vs the pure target → η
        let tb = timebin_plus(3);
        for eta in [0.3, 0.67, 0.9] {
            let f = tb.loss_channel(eta).unwrap().fidelity_timebin(c(r, 0.0), c(r, 0.0));
            assert_relative_eq!(f, eta, epsilon = 1e-12);
        }

        assert!(pure.fidelity(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn projection_recovers_pure_qubit() {
        let r = 0.5_f64.sqrt();
        let tb = timebin_plus(3).loss_channel(0.5).unwrap();
        let qubit = tb.project_single_photon_subspace().unwrap();
        let f = qubit.fidelity(&[c(r, 0.0), c(r, 0.0)]).unwrap();
        assert_relative_eq!(f, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_vacuum_errors() {
        let side = 3 + 1;
        let mut amps = vec![c(0.0, 0.0); side * side];
        amps[0] = c(1.0, 0.0);
        let vac2 = TwoModeDensityMatrix::pure_state(&amps, 3).unwrap();
        assert!(matches!(vac2.project_single_photon_subspace(), Err(StateError::EmptySubspace)));
    }

    #[test]
    fn reduced_states() {
        let tb = timebin_plus(3);
        let e = tb.reduced(ModeSet::Early);
        // mode E of (|10⟩+|01⟩)/√2 is an equal mixture of |0⟩ and |1⟩
        assert_relative_eq!(e.entry(0, 0).re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(e.entry(1, 1).re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(e.entry(0, 1).norm(), 0.0, epsilon = 1e-14);
    }
}

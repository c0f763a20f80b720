//! Heisenberg-picture coefficient dynamics of the driven
//! qubit–cavity–waveguide cascade.
//!
//! Ten coupled complex coefficients C_{vj,wl} = ⟨σ_{vj,wl}(t)⟩ are evolved by
//! fixed-step RK4 under the f0–g1 drive, cavity decay, relaxation, and
//! dephasing. The eleventh coefficient C_g1f0 is carried implicitly as the
//! conjugate of C_f0g1.
//!
//! Two integration frames are provided. The literal frame keeps the
//! rotating-frame phase factors i(2Δ+α), iΔ, i(Δ+α) on the coherences and
//! needs sub-picosecond steps to resolve them. The interaction frame removes
//! these common rotations analytically (they are pure gauge for every
//! observable used here); the relaxation feed into C_g0e0 then carries an
//! explicit e^{−iαt} factor and the mid-sequence e↔f swap converts through
//! the literal frame at the swap instant, so the two frames agree on all
//! |C| trajectories to integration accuracy.

use num_complex::Complex;
use thiserror::Error;

use crate::num::{imag_unit, real, re_c, trapezoid, Real};
use crate::pulse::{CosineCouplingPulse, Grid, SampledWaveform, TimebinSequence};
use crate::system::{derive_params, SystemParams};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("initial state not normalized: |c|² deviates by {0:.3e}")]
    NotNormalized(f64),
    #[error("integration unstable at t = {t:.3e} s: {what}")]
    Unstable { t: f64, what: String },
    #[error("pathological leftover population P_e0 = {0} ≥ 1")]
    PathologicalLeftover(f64),
    #[error("trace has zero energy")]
    ZeroEnergy,
    #[error("waveforms live on different grids")]
    GridMismatch,
    #[error("temporal mode split produced an empty bin")]
    EmptyBin,
}

/// Indices into the coefficient vector.
pub mod idx {
    pub const G0F0: usize = 0;
    pub const G0G1: usize = 1;
    pub const E0F0: usize = 2;
    pub const E0G1: usize = 3;
    pub const G0E0: usize = 4;
    pub const F0F0: usize = 5;
    pub const G1G1: usize = 6;
    pub const F0G1: usize = 7;
    pub const G0G0: usize = 8;
    pub const E0E0: usize = 9;
}

pub const N_COEFF: usize = 10;

/// The ten tracked qubit–cavity coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientVector<T>(pub [Complex<T>; N_COEFF]);

impl<T: Real> CoefficientVector<T> {
    pub fn zero() -> Self {
        Self([Complex::new(T::zero(), T::zero()); N_COEFF])
    }

    pub fn g0f0(&self) -> Complex<T> {
        self.0[idx::G0F0]
    }
    pub fn g0g1(&self) -> Complex<T> {
        self.0[idx::G0G1]
    }
    pub fn e0f0(&self) -> Complex<T> {
        self.0[idx::E0F0]
    }
    pub fn e0g1(&self) -> Complex<T> {
        self.0[idx::E0G1]
    }
    pub fn g0e0(&self) -> Complex<T> {
        self.0[idx::G0E0]
    }
    pub fn f0f0(&self) -> Complex<T> {
        self.0[idx::F0F0]
    }
    pub fn g1g1(&self) -> Complex<T> {
        self.0[idx::G1G1]
    }
    pub fn f0g1(&self) -> Complex<T> {
        self.0[idx::F0G1]
    }
    pub fn g0g0(&self) -> Complex<T> {
        self.0[idx::G0G0]
    }
    pub fn e0e0(&self) -> Complex<T> {
        self.0[idx::E0E0]
    }
    /// C_g1f0, tracked implicitly as conj(C_f0g1).
    pub fn g1f0(&self) -> Complex<T> {
        self.0[idx::F0G1].conj()
    }

    /// Real parts of the four populations (g0, e0, f0, g1).
    pub fn populations(&self) -> [T; 4] {
        [self.0[idx::G0G0].re, self.0[idx::E0E0].re, self.0[idx::F0F0].re, self.0[idx::G1G1].re]
    }

    pub fn population_sum(&self) -> T {
        self.populations().into_iter().sum()
    }

    fn scaled_add(&self, other: &Self, s: T) -> Self {
        let sc = re_c(s);
        let mut out = *self;
        for k in 0..N_COEFF {
            out.0[k] = out.0[k] + other.0[k] * sc;
        }
        out
    }
}

/// Initial amplitudes of |g0⟩, |e0⟩, |f0⟩.
#[derive(Clone, Copy, Debug)]
pub struct InitialState<T> {
    pub c0: Complex<T>,
    pub c1: Complex<T>,
    pub c2: Complex<T>,
}

impl<T: Real> InitialState<T> {
    pub fn new(c0: Complex<T>, c1: Complex<T>, c2: Complex<T>) -> Result<Self, DynamicsError> {
        let norm = c0.norm_sqr() + c1.norm_sqr() + c2.norm_sqr();
        let dev = (norm - T::one()).abs();
        if dev > real::<T>(1e-10) {
            return Err(DynamicsError::NotNormalized(dev.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { c0, c1, c2 })
    }

    /// Ground state |g0⟩.
    pub fn ground() -> Self {
        Self {
            c0: Complex::new(T::one(), T::zero()),
            c1: Complex::new(T::zero(), T::zero()),
            c2: Complex::new(T::zero(), T::zero()),
        }
    }

    /// Qubit Bloch state cos(θ/2)|g⟩ + e^{iφ}sin(θ/2)|e⟩ after the ideal
    /// π_ef/π_ge preparation that maps it onto cos(θ/2)|e0⟩ + e^{iφ}sin(θ/2)|f0⟩.
    pub fn from_bloch(theta: T, phi: T) -> Self {
        let half = real::<T>(0.5);
        Self {
            c0: Complex::new(T::zero(), T::zero()),
            c1: re_c((theta * half).cos()),
            c2: Complex::from_polar((theta * half).sin(), phi),
        }
    }

    /// The coherent-amplitude reference state C_0 = 1/√2, C_1 = C_2 = 1/2
    /// used for mean-field traces.
    pub fn mean_field_reference() -> Self {
        let half = real::<T>(0.5);
        Self {
            c0: re_c(half.sqrt()),
            c1: re_c(half),
            c2: re_c(half),
        }
    }

    /// Equal ground/f superposition C_0 = C_2 = 1/√2 used for the
    /// generation-efficiency evaluation.
    pub fn efficiency_reference() -> Self {
        let r = real::<T>(0.5).sqrt();
        Self { c0: re_c(r), c1: Complex::new(T::zero(), T::zero()), c2: re_c(r) }
    }

    /// Initial coefficients as outer products: C_{vj,wl}(0) equals the wl
    /// amplitude times the conjugate vj amplitude, so the emitted amplitude
    /// carries the phase of C_2.
    pub fn coefficients(&self) -> CoefficientVector<T> {
        let mut c = CoefficientVector::zero();
        c.0[idx::G0F0] = self.c0.conj() * self.c2;
        c.0[idx::E0F0] = self.c1.conj() * self.c2;
        c.0[idx::G0E0] = self.c0.conj() * self.c1;
        c.0[idx::F0F0] = re_c(self.c2.norm_sqr());
        c.0[idx::G0G0] = re_c(self.c0.norm_sqr());
        c.0[idx::E0E0] = re_c(self.c1.norm_sqr());
        c
    }
}

/// Rate and detuning constants entering the coefficient equations.
#[derive(Clone, Copy, Debug)]
pub struct ModelParams<T> {
    pub delta: T,
    pub alpha: T,
    pub kappa: T,
    pub kappa_ex: T,
    pub gamma1_ge: T,
    pub gamma1_ef: T,
    pub gamma2_ge: T,
    pub gamma2_ef: T,
    /// √(1/(T1_ge·T1_ef)) feed from C_e0f0 into C_g0e0.
    pub relax_cross: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(p: &SystemParams<T>) -> Self {
        let d = derive_params(p);
        ModelParams {
            delta: d.delta,
            alpha: p.alpha,
            kappa: d.kappa,
            kappa_ex: p.kappa_ex,
            gamma1_ge: p.t1_ge.recip(),
            gamma1_ef: p.t1_ef.recip(),
            gamma2_ge: p.t2_ge.recip(),
            gamma2_ef: p.t2_ef.recip(),
            relax_cross: (p.t1_ge * p.t1_ef).recip().sqrt(),
        }
    }

    /// Same detunings with every decoherence channel switched off;
    /// κ_in is dropped so κ = κ_ex.
    pub fn lossless(p: &SystemParams<T>) -> Self {
        let d = derive_params(p);
        ModelParams {
            delta: d.delta,
            alpha: p.alpha,
            kappa: p.kappa_ex,
            kappa_ex: p.kappa_ex,
            gamma1_ge: T::zero(),
            gamma1_ef: T::zero(),
            gamma2_ge: T::zero(),
            gamma2_ef: T::zero(),
            relax_cross: T::zero(),
        }
    }

    /// Rotating-frame phase (rad/s) removed from each coefficient in the
    /// interaction frame.
    fn frame_phase(&self, k: usize) -> T {
        let two = real::<T>(2.0);
        match k {
            idx::G0F0 | idx::G0G1 => two * self.delta + self.alpha,
            idx::E0F0 | idx::E0G1 => self.delta,
            idx::G0E0 => self.delta + self.alpha,
            _ => T::zero(),
        }
    }
}

/// Integration frame; see the module docs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Frame {
    /// Rotating-frame phases kept literally; needs dt ≲ 0.5 ps.
    Literal,
    /// Common coherence rotations removed analytically; dt = 0.1 ns suffices.
    #[default]
    Interaction,
}

/// Time-dependent drive envelope g_eff(t).
pub trait Drive<T: Real> {
    fn eval(&self, t: T) -> Complex<T>;
}

/// Drive that is identically zero.
pub struct ZeroDrive;

impl<T: Real> Drive<T> for ZeroDrive {
    fn eval(&self, _t: T) -> Complex<T> {
        Complex::new(T::zero(), T::zero())
    }
}

/// Adapter for closures.
pub struct DriveFn<F>(pub F);

impl<T: Real, F: Fn(T) -> Complex<T>> Drive<T> for DriveFn<F> {
    fn eval(&self, t: T) -> Complex<T> {
        (self.0)(t)
    }
}

impl<T: Real> Drive<T> for CosineCouplingPulse<T> {
    fn eval(&self, t: T) -> Complex<T> {
        CosineCouplingPulse::eval(self, t)
    }
}

impl<T: Real> Drive<T> for SampledWaveform<T> {
    fn eval(&self, t: T) -> Complex<T> {
        self.eval_lerp(t)
    }
}

/// Drive summing the two pulses of a [`TimebinSequence`].
pub struct SequenceDrive<'a, T>(pub &'a TimebinSequence<T>);

impl<T: Real> Drive<T> for SequenceDrive<'_, T> {
    fn eval(&self, t: T) -> Complex<T> {
        self.0.first.eval(t) + self.0.second.eval(t)
    }
}

/// Injected ac-Stark shift δ(t) = coeff·|g_eff(t)/reference_amplitude|²
/// acting on the |f0⟩ level (a positive coefficient lowers it, matching the
/// chirp convention in which C_ch = −coeff cancels the shift exactly).
#[derive(Clone, Copy, Debug)]
pub struct StarkInjection<T> {
    /// Shift at |g_eff| = reference_amplitude, in rad/s.
    pub coeff: T,
    /// Normalization amplitude, usually the pulse peak, in rad/s.
    pub reference_amplitude: T,
}

impl<T: Real> StarkInjection<T> {
    pub fn shift(&self, geff: Complex<T>) -> T {
        self.coeff * geff.norm_sqr() / (self.reference_amplitude * self.reference_amplitude)
    }
}

/// Time derivative of the coefficient vector.
///
/// `stark_shift` is the instantaneous injected δ(t) (zero when disabled); it
/// adds +iδ to the coherences with f0 on the right index (C_g0f0, C_e0f0)
/// and −iδ to C_f0g1.
pub fn coefficient_derivative<T: Real>(
    c: &CoefficientVector<T>,
    t: T,
    geff: Complex<T>,
    stark_shift: T,
    m: &ModelParams<T>,
    frame: Frame,
) -> CoefficientVector<T> {
    let i = imag_unit::<T>();
    let g = geff;
    let gc = geff.conj();
    let two = real::<T>(2.0);
    let half = real::<T>(0.5);
    let ids = re_c(stark_shift) * i;

    let (ph_a, ph_b, ph_c) = match frame {
        Frame::Literal => (
            i * re_c(two * m.delta + m.alpha),
            i * re_c(m.delta),
            i * re_c(m.delta + m.alpha),
        ),
        Frame::Interaction => {
            let z = Complex::new(T::zero(), T::zero());
            (z, z, z)
        }
    };
    // The C_e0f0 → C_g0e0 feed rotates at −α in the interaction frame.
    let feed_rot = match frame {
        Frame::Literal => re_c(T::one()),
        Frame::Interaction => Complex::from_polar(T::one(), -m.alpha * t),
    };

    let mut d = CoefficientVector::zero();
    d.0[idx::G0F0] = (ph_a + ids - re_c(m.gamma2_ef)) * c.0[idx::G0F0] - i * g * c.0[idx::G0G1];
    d.0[idx::G0G1] =
        (ph_a - re_c(half * m.kappa)) * c.0[idx::G0G1] - i * gc * c.0[idx::G0F0];
    d.0[idx::E0F0] = (ph_b + ids - re_c(m.gamma2_ge + m.gamma2_ef)) * c.0[idx::E0F0]
        - i * g * c.0[idx::E0G1];
    d.0[idx::E0G1] = (ph_b - re_c(half * m.kappa + m.gamma2_ge)) * c.0[idx::E0G1]
        - i * gc * c.0[idx::E0F0];
    d.0[idx::G0E0] = (ph_c - re_c(m.gamma2_ge)) * c.0[idx::G0E0]
        + re_c(m.relax_cross) * feed_rot * c.0[idx::E0F0];
    let g1f0 = c.0[idx::F0G1].conj();
    d.0[idx::F0F0] =
        i * gc * g1f0 - i * g * c.0[idx::F0G1] - re_c(m.gamma1_ef) * c.0[idx::F0F0];
    d.0[idx::G1G1] = i * g * c.0[idx::F0G1] - i * gc * g1f0 - re_c(m.kappa) * c.0[idx::G1G1];
    d.0[idx::F0G1] = i * gc * (c.0[idx::G1G1] - c.0[idx::F0F0])
        - (re_c(half * m.kappa + m.gamma2_ef) + ids) * c.0[idx::F0G1];
    d.0[idx::G0G0] = re_c(m.kappa) * c.0[idx::G1G1] + re_c(m.gamma1_ge) * c.0[idx::E0E0];
    d.0[idx::E0E0] =
        re_c(m.gamma1_ef) * c.0[idx::F0F0] - re_c(m.gamma1_ge) * c.0[idx::E0E0];
    d
}

/// Instantaneous ideal e↔f swap: exchanges the e0 and f0 indices of every
/// coefficient. Applying it twice is the identity; populations are conserved.
pub fn apply_ef_swap<T: Real>(c: &CoefficientVector<T>) -> CoefficientVector<T> {
    let mut out = *c;
    out.0.swap(idx::G0E0, idx::G0F0);
    out.0.swap(idx::E0G1, idx::F0G1);
    out.0.swap(idx::E0E0, idx::F0F0);
    // C_e0f0 ↔ C_f0e0 = conj(C_e0f0)
    out.0[idx::E0F0] = c.0[idx::E0F0].conj();
    out
}

/// Frame-aware swap: in the interaction frame the coefficients convert to
/// the literal frame at the swap instant, swap, and convert back, so both
/// frames agree on every |C| trajectory.
pub fn apply_ef_swap_in_frame<T: Real>(
    c: &CoefficientVector<T>,
    t: T,
    m: &ModelParams<T>,
    frame: Frame,
) -> CoefficientVector<T> {
    match frame {
        Frame::Literal => apply_ef_swap(c),
        Frame::Interaction => {
            let mut lit = *c;
            for k in 0..N_COEFF {
                let ph = m.frame_phase(k);
                if ph != T::zero() {
                    lit.0[k] = lit.0[k] * Complex::from_polar(T::one(), ph * t);
                }
            }
            let swapped = apply_ef_swap(&lit);
            let mut out = swapped;
            for k in 0..N_COEFF {
                let ph = m.frame_phase(k);
                if ph != T::zero() {
                    out.0[k] = out.0[k] * Complex::from_polar(T::one(), -ph * t);
                }
            }
            out
        }
    }
}

/// Fixed-step integration options.
#[derive(Clone, Copy, Debug)]
pub struct IntegrationOptions<T> {
    pub dt: T,
    pub frame: Frame,
    /// Populations below −this or a population sum above 1 + 100·this abort
    /// the run as a step-instability diagnostic.
    pub population_tol: T,
}

impl<T: Real> Default for IntegrationOptions<T> {
    fn default() -> Self {
        IntegrationOptions {
            dt: real(0.1e-9),
            frame: Frame::Interaction,
            population_tol: real(1e-10),
        }
    }
}

/// Trajectories of all coefficients on a uniform grid.
#[derive(Clone, Debug)]
pub struct DynamicsResult<T> {
    pub t0: T,
    pub dt: T,
    pub frame: Frame,
    pub kappa_ex: T,
    pub coeffs: Vec<CoefficientVector<T>>,
    /// Step index at which the e↔f swap was applied, if any.
    pub swap_index: Option<usize>,
}

impl<T: Real> DynamicsResult<T> {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn grid(&self) -> Grid<T> {
        Grid { t0: self.t0, dt: self.dt, len: self.coeffs.len() }
    }

    pub fn time(&self, i: usize) -> T {
        self.t0 + self.dt * real::<T>(i as f64)
    }

    pub fn end_time(&self) -> T {
        self.time(self.len().saturating_sub(1))
    }

    pub fn last(&self) -> &CoefficientVector<T> {
        self.coeffs.last().expect("non-empty trajectory")
    }

    /// Emitted wave-packet amplitude f(0,t) = −i·√κ_ex·C_g0g1(t).
    pub fn f0t(&self) -> SampledWaveform<T> {
        wavepacket_amplitude(self, self.kappa_ex)
    }

    /// Leftover |e0⟩ population at the end of the window.
    pub fn p_e0_end(&self) -> T {
        self.last().e0e0().re
    }
}

/// f(0,t) from a coefficient trajectory: −i·√κ_ex·C_g0g1(t) pointwise.
pub fn wavepacket_amplitude<T: Real>(
    result: &DynamicsResult<T>,
    kappa_ex: T,
) -> SampledWaveform<T> {
    let factor = Complex::new(T::zero(), -kappa_ex.sqrt());
    let samples = result.coeffs.iter().map(|c| factor * c.g0g1()).collect();
    SampledWaveform { t0: result.t0, dt: result.dt, samples }
}

fn rk4_step<T: Real>(
    c: &CoefficientVector<T>,
    t: T,
    dt: T,
    drive: &dyn Drive<T>,
    stark: Option<&StarkInjection<T>>,
    m: &ModelParams<T>,
    frame: Frame,
) -> CoefficientVector<T> {
    let half = real::<T>(0.5);
    let sixth = real::<T>(1.0 / 6.0);
    let t_mid = t + half * dt;
    let t_end = t + dt;
    let g0 = drive.eval(t);
    let g_mid = drive.eval(t_mid);
    let g1 = drive.eval(t_end);
    let s = |g: Complex<T>| stark.map(|s| s.shift(g)).unwrap_or(T::zero());
    let (s0, s_mid, s1) = (s(g0), s(g_mid), s(g1));

    let k1 = coefficient_derivative(c, t, g0, s0, m, frame);
    let y2 = c.scaled_add(&k1, half * dt);
    let k2 = coefficient_derivative(&y2, t_mid, g_mid, s_mid, m, frame);
    let y3 = c.scaled_add(&k2, half * dt);
    let k3 = coefficient_derivative(&y3, t_mid, g_mid, s_mid, m, frame);
    let y4 = c.scaled_add(&k3, dt);
    let k4 = coefficient_derivative(&y4, t_end, g1, s1, m, frame);

    let mut out = *c;
    for k in 0..N_COEFF {
        let sum = k1.0[k]
            + (k2.0[k] + k3.0[k]) * re_c(real::<T>(2.0))
            + k4.0[k];
        out.0[k] = out.0[k] + sum * re_c(sixth * dt);
    }
    out
}

fn check_populations<T: Real>(
    c: &CoefficientVector<T>,
    t: T,
    tol: T,
) -> Result<(), DynamicsError> {
    for (k, z) in c.0.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(DynamicsError::Unstable {
                t: t.to_f64().unwrap_or(f64::NAN),
                what: format!("coefficient {k} is non-finite"),
            });
        }
    }
    let pops = c.populations();
    for (name, p) in ["g0", "e0", "f0", "g1"].iter().zip(pops) {
        if p < -tol {
            return Err(DynamicsError::Unstable {
                t: t.to_f64().unwrap_or(f64::NAN),
                what: format!("population {name} = {:.3e}", p.to_f64().unwrap_or(f64::NAN)),
            });
        }
    }
    let sum: T = pops.into_iter().sum();
    if sum > T::one() + tol * real::<T>(100.0) {
        return Err(DynamicsError::Unstable {
            t: t.to_f64().unwrap_or(f64::NAN),
            what: format!("population sum = {}", sum.to_f64().unwrap_or(f64::NAN)),
        });
    }
    Ok(())
}

/// Integrate from a raw coefficient vector over `[t0, t1]`; the building
/// block under [`integrate`] and [`run_timebin_protocol`], exposed for
/// oracle tests that start from states outside the |g0⟩,|e0⟩,|f0⟩ span.
pub fn integrate_coefficients<T: Real>(
    start: CoefficientVector<T>,
    t0: T,
    t1: T,
    drive: &dyn Drive<T>,
    stark: Option<&StarkInjection<T>>,
    m: &ModelParams<T>,
    opts: &IntegrationOptions<T>,
) -> Result<Vec<CoefficientVector<T>>, DynamicsError> {
    let n = ((t1 - t0) / opts.dt).round().to_usize().unwrap_or(0);
    let mut out = Vec::with_capacity(n + 1);
    let mut c = start;
    out.push(c);
    for k in 0..n {
        let t = t0 + opts.dt * real::<T>(k as f64);
        c = rk4_step(&c, t, opts.dt, drive, stark, m, opts.frame);
        check_populations(&c, t + opts.dt, opts.population_tol)?;
        out.push(c);
    }
    Ok(out)
}

/// Integrate the coefficient equations over `[0, window]`.
pub fn integrate<T: Real>(
    init: &InitialState<T>,
    drive: &dyn Drive<T>,
    stark: Option<&StarkInjection<T>>,
    m: &ModelParams<T>,
    window: T,
    opts: &IntegrationOptions<T>,
) -> Result<DynamicsResult<T>, DynamicsError> {
    let coeffs =
        integrate_coefficients(init.coefficients(), T::zero(), window, drive, stark, m, opts)?;
    Ok(DynamicsResult {
        t0: T::zero(),
        dt: opts.dt,
        frame: opts.frame,
        kappa_ex: m.kappa_ex,
        coeffs,
        swap_index: None,
    })
}

/// Run the full two-bin protocol: integrate to the swap marker, apply the
/// ideal e↔f swap, and continue with the phase-offset second pulse. The
/// stored trajectory is uniform in time; the sample at the swap instant is
/// the pre-swap state.
pub fn run_timebin_protocol<T: Real>(
    init: &InitialState<T>,
    seq: &TimebinSequence<T>,
    stark: Option<&StarkInjection<T>>,
    m: &ModelParams<T>,
    opts: &IntegrationOptions<T>,
) -> Result<DynamicsResult<T>, DynamicsError> {
    let drive = SequenceDrive(seq);
    let first =
        integrate_coefficients(init.coefficients(), T::zero(), seq.swap_time, &drive, stark, m, opts)?;
    let n1 = first.len() - 1;
    let t_swap = opts.dt * real::<T>(n1 as f64);
    let swapped = apply_ef_swap_in_frame(first.last().unwrap(), t_swap, m, opts.frame);
    let second = integrate_coefficients(swapped, t_swap, seq.window, &drive, stark, m, opts)?;
    let mut coeffs = first;
    coeffs.extend_from_slice(&second[1..]);
    Ok(DynamicsResult {
        t0: T::zero(),
        dt: opts.dt,
        frame: opts.frame,
        kappa_ex: m.kappa_ex,
        coeffs,
        swap_index: Some(n1),
    })
}

/// Generation-efficiency report for the single-bin protocol.
#[derive(Clone, Copy, Debug)]
pub struct EfficiencyReport<T> {
    pub eta_gen: T,
    pub p_e0_sc: T,
    /// ∫|f(0,t)|² dt over the window.
    pub emitted_energy: T,
}

/// Evaluate the photon generation efficiency with the fixed reference
/// initial state C_0 = C_2 = 1/√2: η_gen = ∫|f|²dt / (|C_0|²|C_2|²(1 − P_e0)),
/// with the integral truncated at `window` where P_e0 is also read off.
pub fn generation_efficiency<T: Real>(
    m: &ModelParams<T>,
    pulse: &CosineCouplingPulse<T>,
    stark: Option<&StarkInjection<T>>,
    window: T,
    opts: &IntegrationOptions<T>,
) -> Result<(EfficiencyReport<T>, DynamicsResult<T>), DynamicsError> {
    let init = InitialState::efficiency_reference();
    let result = integrate(&init, pulse, stark, m, window, opts)?;
    let p_e0 = result.p_e0_end();
    if p_e0 >= T::one() {
        return Err(DynamicsError::PathologicalLeftover(p_e0.to_f64().unwrap_or(f64::NAN)));
    }
    let emitted = result.f0t().energy();
    let weight = init.c0.norm_sqr() * init.c2.norm_sqr();
    let eta = emitted / (weight * (T::one() - p_e0));
    Ok((EfficiencyReport { eta_gen: eta, p_e0_sc: p_e0, emitted_energy: emitted }, result))
}

/// Scale factor s with s²·∫|measured|² = ∫|simulated|².
pub fn normalize_measured_trace<T: Real>(
    measured: &SampledWaveform<T>,
    simulated: &SampledWaveform<T>,
) -> Result<T, DynamicsError> {
    if !measured.same_grid(simulated) {
        return Err(DynamicsError::GridMismatch);
    }
    let em = measured.energy();
    if em <= T::zero() {
        return Err(DynamicsError::ZeroEnergy);
    }
    Ok((simulated.energy() / em).sqrt())
}

/// Split an emitted trace at the swap marker into normalized temporal-mode
/// envelopes (u_E, u_L), each with unit energy and zero outside its bin.
/// Returns the envelopes and their overlap |∫u_E*·u_L dt| (expected ≈ 0).
pub fn split_temporal_modes<T: Real>(
    f0t: &SampledWaveform<T>,
    t_split: T,
) -> Result<(SampledWaveform<T>, SampledWaveform<T>, T), DynamicsError> {
    let grid = f0t.grid();
    let zero = Complex::new(T::zero(), T::zero());
    let mut early = f0t.clone();
    let mut late = f0t.clone();
    for (i, t) in grid.times().enumerate() {
        if t < t_split {
            late.samples[i] = zero;
        } else {
            early.samples[i] = zero;
        }
    }
    let (ee, el) = (early.energy(), late.energy());
    if ee <= T::zero() || el <= T::zero() {
        return Err(DynamicsError::EmptyBin);
    }
    let early = early.map_samples(|z| z / re_c(ee.sqrt()));
    let late = late.map_samples(|z| z / re_c(el.sqrt()));
    let overlap_sq: Vec<T> = early
        .samples
        .iter()
        .zip(&late.samples)
        .map(|(a, b)| (a.conj() * b).norm())
        .collect();
    let overlap = trapezoid(f0t.dt, &overlap_sq);
    Ok((early, late, overlap))
}

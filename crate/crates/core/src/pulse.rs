//! Drive-envelope synthesis: Gaussian control pulses with DRAG, cosine
//! coupling pulses with ac-Stark chirping, and the two-bin drive sequence.
//!
//! Sampled drives live on uniform grids. The coupling pulse also exists in an
//! analytic form ([`CosineCouplingPulse`]) whose chirp phase integral is
//! closed form, so the dynamics integrator can evaluate it exactly at
//! arbitrary Runge–Kutta stage times.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::{cumulative_trapezoid, real, re_c, trapezoid, Real};

/// Phase offset applied to the second coupling pulse, as calibrated for the
/// reference device (0.74π).
pub fn default_phase_offset<T: Real>() -> T {
    real::<T>(0.74) * T::PI()
}

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("grid spans [{have_lo:.3e}, {have_hi:.3e}] s but the envelope needs ±{need:.3e} s around its center")]
    GridTooShort { have_lo: f64, have_hi: f64, need: f64 },
    #[error("carrier undersampled: {samples_per_period:.2} samples per period (need ≥ 8); use baseband mode")]
    CarrierUndersampled { samples_per_period: f64 },
    #[error("waveforms live on different grids")]
    GridMismatch,
    #[error("envelope must be real-valued for DRAG synthesis")]
    EnvelopeNotReal,
    #[error("coupling pulses overlap: separation {separation:.3e} s < width {width:.3e} s")]
    OverlappingPulses { separation: f64, width: f64 },
    #[error("waveform has no samples")]
    Empty,
}

/// Uniform sampling grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    pub t0: T,
    pub dt: T,
    pub len: usize,
}

impl<T: Real> Grid<T> {
    /// Grid spanning [t0, t1] (inclusive of both ends, up to rounding).
    pub fn from_span(t0: T, t1: T, dt: T) -> Self {
        let len = ((t1 - t0) / dt).round().to_usize().unwrap_or(0) + 1;
        Grid { t0, dt, len }
    }

    #[inline]
    pub fn time(&self, i: usize) -> T {
        self.t0 + self.dt * real::<T>(i as f64)
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len).map(|i| self.time(i))
    }

    pub fn end(&self) -> T {
        self.time(self.len.saturating_sub(1))
    }
}

/// Complex envelope on a uniform time grid. Units depend on role: rad/s for
/// drives, dimensionless for normalized envelopes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledWaveform<T> {
    pub t0: T,
    pub dt: T,
    pub samples: Vec<Complex<T>>,
}

impl<T: Real> SampledWaveform<T> {
    pub fn new(grid: Grid<T>, samples: Vec<Complex<T>>) -> Self {
        assert_eq!(grid.len, samples.len());
        Self { t0: grid.t0, dt: grid.dt, samples }
    }

    pub fn constant(grid: Grid<T>, value: Complex<T>) -> Self {
        Self { t0: grid.t0, dt: grid.dt, samples: vec![value; grid.len] }
    }

    pub fn from_fn(grid: Grid<T>, mut f: impl FnMut(T) -> Complex<T>) -> Self {
        let samples = grid.times().map(&mut f).collect();
        Self { t0: grid.t0, dt: grid.dt, samples }
    }

    pub fn grid(&self) -> Grid<T> {
        Grid { t0: self.t0, dt: self.dt, len: self.samples.len() }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.t0 == other.t0 && self.dt == other.dt && self.samples.len() == other.samples.len()
    }

    pub fn map_samples(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { t0: self.t0, dt: self.dt, samples: self.samples.iter().map(|&z| f(z)).collect() }
    }

    /// Pointwise sum; both operands must live on the same grid.
    pub fn try_add(&self, other: &Self) -> Result<Self, PulseError> {
        if !self.same_grid(other) {
            return Err(PulseError::GridMismatch);
        }
        let samples =
            self.samples.iter().zip(&other.samples).map(|(&a, &b)| a + b).collect();
        Ok(Self { t0: self.t0, dt: self.dt, samples })
    }

    /// Trapezoidal ∫|a(t)|² dt.
    pub fn energy(&self) -> T {
        let sq: Vec<T> = self.samples.iter().map(|z| z.norm_sqr()).collect();
        trapezoid(self.dt, &sq)
    }

    pub fn max_abs(&self) -> T {
        self.samples.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Linear interpolation; zero outside the sampled window.
    pub fn eval_lerp(&self, t: T) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let x = (t - self.t0) / self.dt;
        if x < T::zero() {
            return zero;
        }
        let n = self.samples.len();
        let i = x.floor().to_usize().unwrap_or(usize::MAX);
        if i >= n - 1 {
            return if i == n - 1 && x == real::<T>(i as f64) { self.samples[i] } else { zero };
        }
        let frac = x - real::<T>(i as f64);
        let w = re_c(frac);
        self.samples[i] * (re_c(T::one()) - w) + self.samples[i + 1] * w
    }
}

/// Gaussian control-pulse parameters with DRAG correction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DragSpec<T> {
    /// Gaussian σ in seconds.
    pub width: T,
    /// Peak amplitude in rad/s.
    pub amplitude: T,
    /// Drive phase φ_g setting the equatorial rotation axis.
    pub drive_phase: T,
    /// Dimensionless DRAG coefficient β.
    pub beta: T,
    /// Carrier frequency ω_d in rad/s.
    pub drive_freq: T,
}

/// Output stage for DRAG synthesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DragMode {
    /// Real carrier-level waveform X·cos(ω_d t + φ_g) + β·X'·sin(ω_d t + φ_g).
    Carrier,
    /// Complex baseband I/Q envelope (X + iβ·X')·e^{iφ_g}; this is what the
    /// rotating-frame dynamics consume.
    Baseband,
}

/// Real Gaussian envelope with σ = `width`, peaking at `amplitude` at the
/// grid center. The grid must span at least ±3σ around its center.
pub fn gaussian_envelope<T: Real>(
    width: T,
    amplitude: T,
    grid: Grid<T>,
) -> Result<SampledWaveform<T>, PulseError> {
    let center = (grid.t0 + grid.end()) * real::<T>(0.5);
    let need = real::<T>(3.0) * width;
    if center - grid.t0 < need || grid.end() - center < need {
        return Err(PulseError::GridTooShort {
            have_lo: grid.t0.to_f64().unwrap_or(f64::NAN),
            have_hi: grid.end().to_f64().unwrap_or(f64::NAN),
            need: need.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(SampledWaveform::from_fn(grid, |t| {
        let x = (t - center) / width;
        re_c(amplitude * (-x * x * real::<T>(0.5)).exp())
    }))
}

/// Raised-cosine envelope peak·[1 − cos(2πt/w)]/2 supported on t ∈ [0, w]
/// (grid time), zero outside.
pub fn cosine_envelope<T: Real>(w: T, peak: T, grid: Grid<T>) -> SampledWaveform<T> {
    SampledWaveform::from_fn(grid, |t| {
        if t < T::zero() || t > w {
            re_c(T::zero())
        } else {
            let phase = T::TAU() * t / w;
            re_c(peak * (T::one() - phase.cos()) * real::<T>(0.5))
        }
    })
}

/// DRAG synthesis: adds the derivative quadrature β·dX/dt to a real envelope.
/// The derivative uses central differences with one-sided stencils at the
/// endpoints. In carrier mode the grid must resolve ω_d with at least 8
/// samples per period.
pub fn apply_drag<T: Real>(
    env: &SampledWaveform<T>,
    spec: &DragSpec<T>,
    mode: DragMode,
) -> Result<SampledWaveform<T>, PulseError> {
    if env.samples.is_empty() {
        return Err(PulseError::Empty);
    }
    if env.samples.iter().any(|z| z.im != T::zero()) {
        return Err(PulseError::EnvelopeNotReal);
    }
    let n = env.samples.len();
    let x: Vec<T> = env.samples.iter().map(|z| z.re).collect();
    let mut dx = vec![T::zero(); n];
    if n >= 2 {
        let half = real::<T>(0.5);
        dx[0] = (x[1] - x[0]) / env.dt;
        dx[n - 1] = (x[n - 1] - x[n - 2]) / env.dt;
        for i in 1..n - 1 {
            dx[i] = (x[i + 1] - x[i - 1]) * half / env.dt;
        }
    }
    match mode {
        DragMode::Baseband => {
            let rot = Complex::from_polar(T::one(), spec.drive_phase);
            let samples = x
                .iter()
                .zip(&dx)
                .map(|(&xi, &di)| Complex::new(xi, spec.beta * di) * rot)
                .collect();
            Ok(SampledWaveform { t0: env.t0, dt: env.dt, samples })
        }
        DragMode::Carrier => {
            let period_samples = T::TAU() / (spec.drive_freq.abs() * env.dt);
            if period_samples < real::<T>(8.0) {
                return Err(PulseError::CarrierUndersampled {
                    samples_per_period: period_samples.to_f64().unwrap_or(f64::NAN),
                });
            }
            let grid = env.grid();
            let samples = grid
                .times()
                .zip(x.iter().zip(&dx))
                .map(|(t, (&xi, &di))| {
                    let arg = spec.drive_freq * t + spec.drive_phase;
                    re_c(xi * arg.cos() + spec.beta * di * arg.sin())
                })
                .collect();
            Ok(SampledWaveform { t0: env.t0, dt: env.dt, samples })
        }
    }
}

/// Chirp a sampled pulse: a_c(t) = a_p(t)·exp(−i ∫₀ᵗ C_ch |a_p(t')|² dt'),
/// with the phase integral accumulated by the trapezoidal rule from the
/// first sample. `chirp_coeff` is in rad/s per (sample amplitude unit)².
/// |a_c| = |a_p| pointwise by construction.
pub fn apply_chirp<T: Real>(a_p: &SampledWaveform<T>, chirp_coeff: T) -> SampledWaveform<T> {
    let sq: Vec<T> = a_p.samples.iter().map(|z| z.norm_sqr()).collect();
    let cum = cumulative_trapezoid(a_p.dt, &sq);
    let samples = a_p
        .samples
        .iter()
        .zip(&cum)
        .map(|(&a, &integral)| a * Complex::from_polar(T::one(), -chirp_coeff * integral))
        .collect();
    SampledWaveform { t0: a_p.t0, dt: a_p.dt, samples }
}

/// Quadratic ac-Stark model: Δ_f0g1 = C_ch·|amplitude|².
pub fn stark_shift_model<T: Real>(amplitude: T, chirp_coeff: T) -> T {
    chirp_coeff * amplitude * amplitude
}

/// Analytic chirped cosine coupling pulse.
///
/// The envelope is `peak·[1 − cos(2π(t−start)/width)]/2` on
/// `start ≤ t ≤ start+width` and zero outside. The chirp phase is
/// −C_ch·∫₀ᵘ â⁴-type integral in closed form, with â the envelope normalized
/// to unit peak, so `chirp_coeff` is rad/s per normalized-amplitude².
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CosineCouplingPulse<T> {
    pub start: T,
    pub width: T,
    /// Peak effective coupling |g_eff| in rad/s.
    pub peak: T,
    /// Chirp coefficient in rad/s per normalized-amplitude².
    pub chirp_coeff: T,
    /// Constant phase of the pulse.
    pub phase: T,
}

impl<T: Real> CosineCouplingPulse<T> {
    /// Normalized envelope (peak 1).
    pub fn normalized_envelope(&self, t: T) -> T {
        let u = t - self.start;
        if u < T::zero() || u > self.width {
            T::zero()
        } else {
            (T::one() - (T::TAU() * u / self.width).cos()) * real::<T>(0.5)
        }
    }

    /// ∫₀ᵘ â(s)² ds in closed form (â the unit-peak envelope).
    fn norm_sq_integral(&self, t: T) -> T {
        let u = (t - self.start).max(T::zero()).min(self.width);
        let theta = T::TAU() * u / self.width;
        let c38 = real::<T>(3.0 / 8.0);
        let c4pi = self.width / (real::<T>(4.0) * T::PI());
        let c32pi = self.width / (real::<T>(32.0) * T::PI());
        c38 * u - c4pi * theta.sin() + c32pi * (theta * real::<T>(2.0)).sin()
    }

    /// Accumulated chirp phase at time t.
    pub fn chirp_phase(&self, t: T) -> T {
        -self.chirp_coeff * self.norm_sq_integral(t)
    }

    /// Complex drive value at time t.
    pub fn eval(&self, t: T) -> Complex<T> {
        let env = self.peak * self.normalized_envelope(t);
        if env == T::zero() {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::from_polar(env, self.phase + self.chirp_phase(t))
        }
    }

    pub fn end(&self) -> T {
        self.start + self.width
    }

    /// Sample onto a grid.
    pub fn sample(&self, grid: Grid<T>) -> SampledWaveform<T> {
        SampledWaveform::from_fn(grid, |t| self.eval(t))
    }
}

/// Cosine coupling-pulse parameters for one bin.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CouplingPulseSpec<T> {
    /// Pulse width w in seconds.
    pub width: T,
    /// Peak effective coupling in rad/s.
    pub peak_geff: T,
    /// Chirp coefficient in rad/s per normalized-amplitude².
    pub chirp_coeff: T,
    /// Phase offset of the second pulse relative to the first.
    pub phase_offset: T,
}

impl<T: Real> CouplingPulseSpec<T> {
    /// Defaults for the reference device: 1.3 MHz peak coupling (the cosine
    /// pulse sideband-leakage limit), 580 ns width so the f0→g1 transfer
    /// nearly completes inside the 0.95 µs generation window, chirp matched
    /// to the calibrated Stark coefficient, and 0.74π inter-bin offset.
    pub fn reference() -> Self {
        CouplingPulseSpec {
            width: real(580e-9),
            peak_geff: real(std::f64::consts::TAU * 1.3e6),
            chirp_coeff: real(std::f64::consts::TAU * -1.66e6),
            phase_offset: default_phase_offset(),
        }
    }
}

/// Bloch-sphere angles of the prepared qubit state.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BlochAngles<T> {
    pub theta: T,
    pub phi: T,
}

/// Full two-bin sequence specification.
#[derive(Clone, Copy, Debug)]
pub struct SequenceSpec<T> {
    pub coupling: CouplingPulseSpec<T>,
    /// Start of the first coupling pulse.
    pub first_start: T,
    /// Start-to-start separation of the two coupling pulses.
    pub bin_separation: T,
    /// Time kept after the second pulse for the cavity tail to ring down.
    pub tail: T,
    /// Sample interval of the emitted channel waveform.
    pub dt: T,
    /// JPA pump phases marking the measurement quadratures of each bin.
    pub jpa_phase_early: T,
    pub jpa_phase_late: T,
    /// Qubit state preparation angles.
    pub prep: BlochAngles<T>,
}

impl<T: Real> SequenceSpec<T> {
    pub fn reference(prep: BlochAngles<T>) -> Self {
        let coupling = CouplingPulseSpec::reference();
        SequenceSpec {
            coupling,
            first_start: real(100e-9),
            bin_separation: real(0.95e-6),
            tail: real(200e-9),
            dt: real(1e-9),
            jpa_phase_early: T::zero(),
            jpa_phase_late: T::zero(),
            prep,
        }
    }
}

/// Timing and phase markers emitted alongside the drive channels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EventMarker<T> {
    /// Ideal π pulse on e–f during state preparation.
    PrepPiEf { at: T },
    /// Ideal π pulse on g–e during state preparation.
    PrepPiGe { at: T },
    /// Ideal mid-sequence e↔f swap between the bins.
    SwapPiEf { at: T },
    /// Phase-selective amplification window for one temporal mode.
    JpaWindow { phase: T, start: T, stop: T },
}

/// Assembled two-bin sequence.
#[derive(Clone, Debug)]
pub struct TimebinSequence<T> {
    pub first: CosineCouplingPulse<T>,
    pub second: CosineCouplingPulse<T>,
    /// Time of the ideal e↔f swap, between the two pulses.
    pub swap_time: T,
    /// End of the simulated window.
    pub window: T,
    pub markers: Vec<EventMarker<T>>,
    /// Both coupling pulses sampled on a common grid.
    pub coupling_channel: SampledWaveform<T>,
}

/// Build the two-bin generation sequence: two identical chirped cosine
/// pulses, the second rotated by the spec's `phase_offset`, with the swap
/// marker centered between them. Pulses on the coupling channel must not
/// overlap.
pub fn build_timebin_sequence<T: Real>(
    spec: &SequenceSpec<T>,
) -> Result<TimebinSequence<T>, PulseError> {
    let w = spec.coupling.width;
    if spec.bin_separation < w {
        return Err(PulseError::OverlappingPulses {
            separation: spec.bin_separation.to_f64().unwrap_or(f64::NAN),
            width: w.to_f64().unwrap_or(f64::NAN),
        });
    }
    let first = CosineCouplingPulse {
        start: spec.first_start,
        width: w,
        peak: spec.coupling.peak_geff,
        chirp_coeff: spec.coupling.chirp_coeff,
        phase: T::zero(),
    };
    let second = CosineCouplingPulse {
        start: spec.first_start + spec.bin_separation,
        width: w,
        peak: spec.coupling.peak_geff,
        chirp_coeff: spec.coupling.chirp_coeff,
        phase: spec.coupling.phase_offset,
    };
    let swap_time = (first.end() + second.start) * real::<T>(0.5);
    let window = second.end() + spec.tail;
    let grid = Grid::from_span(T::zero(), window, spec.dt);
    let coupling_channel =
        SampledWaveform::from_fn(grid, |t| first.eval(t) + second.eval(t));
    let markers = vec![
        EventMarker::PrepPiEf { at: spec.first_start * real(0.25) },
        EventMarker::PrepPiGe { at: spec.first_start * real(0.75) },
        EventMarker::SwapPiEf { at: swap_time },
        EventMarker::JpaWindow {
            phase: spec.jpa_phase_early,
            start: first.start,
            stop: swap_time,
        },
        EventMarker::JpaWindow { phase: spec.jpa_phase_late, start: swap_time, stop: window },
    ];
    Ok(TimebinSequence { first, second, swap_time, window, markers, coupling_channel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{adaptive_simpson, cplx};
    use approx::assert_relative_eq;

    const TAU: f64 = std::f64::consts::TAU;

    #[test]
    fn gaussian_peak_and_width_convention() {
        let grid = Grid::from_span(-60e-9_f64, 60e-9, 0.1e-9);
        let w = gaussian_envelope(15e-9, 2.0, grid).unwrap();
        let center_idx = (w.samples.len() - 1) / 2;
        assert_relative_eq!(w.samples[center_idx].re, 2.0, epsilon = 1e-12);
        // value at center ± σ is e^{-1/2} of the peak
        let sigma_steps = (15e-9_f64 / 0.1e-9).round() as usize;
        assert_relative_eq!(
            w.samples[center_idx + sigma_steps].re,
            2.0 * (-0.5_f64).exp(),
            max_relative = 1e-6
        );
    }

    #[test]
    fn gaussian_zero_amplitude() {
        let grid = Grid::from_span(-60e-9_f64, 60e-9, 1e-9);
        let w = gaussian_envelope(15e-9, 0.0, grid).unwrap();
        assert!(w.samples.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn gaussian_grid_too_short() {
        let grid = Grid::from_span(-20e-9_f64, 20e-9, 1e-9);
        assert!(matches!(
            gaussian_envelope(15e-9, 1.0, grid),
            Err(PulseError::GridTooShort { .. })
        ));
    }

    #[test]
    fn cosine_envelope_values() {
        let w = 400e-9_f64;
        let grid = Grid::from_span(0.0, w, 1e-9);
        let env = cosine_envelope(w, 3.0, grid);
        assert_relative_eq!(env.samples[200].re, 3.0, epsilon = 1e-12); // t = w/2
        assert_relative_eq!(env.samples[0].re, 0.0, epsilon = 1e-12);
        assert!(env.samples[400].re.abs() < 1e-12);
        // time average over [0, w] is peak/2
        let mean = env.samples.iter().map(|z| z.re).sum::<f64>() / env.samples.len() as f64;
        assert_relative_eq!(mean, 1.5, max_relative = 5e-3);
    }

    #[test]
    fn drag_beta_zero_is_pure_carrier() {
        let grid = Grid::from_span(-60e-9_f64, 60e-9, 0.05e-9);
        let env = gaussian_envelope(15e-9, 1.0, grid).unwrap();
        let spec = DragSpec {
            width: 15e-9,
            amplitude: 1.0,
            drive_phase: 0.3,
            beta: 0.0,
            drive_freq: TAU * 0.5e9,
        };
        let carrier = apply_drag(&env, &spec, DragMode::Carrier).unwrap();
        for (i, t) in grid.times().enumerate() {
            let expect = env.samples[i].re * (spec.drive_freq * t + 0.3).cos();
            assert_relative_eq!(carrier.samples[i].re, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn drag_center_sample_matches_peak() {
        // At the Gaussian center the derivative term vanishes: β_ge = 0.92
        // leaves the carrier sample at X_max·cos(ω_d t_c + φ_g).
        let grid = Grid::from_span(-60e-9_f64, 60e-9, 0.05e-9);
        let env = gaussian_envelope(15e-9, 1.0, grid).unwrap();
        let spec = DragSpec {
            width: 15e-9,
            amplitude: 1.0,
            drive_phase: 0.7,
            beta: 0.92,
            drive_freq: TAU * 0.4e9,
        };
        let carrier = apply_drag(&env, &spec, DragMode::Carrier).unwrap();
        let c = (carrier.samples.len() - 1) / 2;
        let tc = grid.time(c);
        assert_relative_eq!(
            carrier.samples[c].re,
            (spec.drive_freq * tc + 0.7).cos(),
            max_relative = 1e-6
        );
    }

    #[test]
    fn drag_baseband_quadrature_matches_finite_difference_oracle() {
        // β_ef = 1.08: the baseband imaginary part must equal 1.08·dX/dt.
        let grid = Grid::from_span(-60e-9_f64, 60e-9, 0.1e-9);
        let env = gaussian_envelope(15e-9, 1.0, grid).unwrap();
        let spec = DragSpec {
            width: 15e-9,
            amplitude: 1.0,
            drive_phase: 0.0,
            beta: 1.08,
            drive_freq: TAU * 0.4e9,
        };
        let bb = apply_drag(&env, &spec, DragMode::Baseband).unwrap();
        // independent oracle: central difference of the analytic Gaussian
        let sigma = 15e-9_f64;
        let dfdt = |t: f64| {
            let h = 1e-12;
            let g = |t: f64| (-(t * t) / (2.0 * sigma * sigma)).exp();
            (g(t + h) - g(t - h)) / (2.0 * h)
        };
        for (i, t) in grid.times().enumerate().step_by(137) {
            if i == 0 || i == bb.samples.len() - 1 {
                continue;
            }
            assert_relative_eq!(
                bb.samples[i].im,
                1.08 * dfdt(t),
                max_relative = 1e-4,
                epsilon = 1e-3
            );
        }
    }

    #[test]
    fn drag_carrier_undersampled_rejected() {
        let grid = Grid::from_span(-60e-9_f64, 60e-9, 1e-9);
        let env = gaussian_envelope(15e-9, 1.0, grid).unwrap();
        let spec = DragSpec {
            width: 15e-9,
            amplitude: 1.0,
            drive_phase: 0.0,
            beta: 0.5,
            drive_freq: TAU * 7.8e9,
        };
        assert!(matches!(
            apply_drag(&env, &spec, DragMode::Carrier),
            Err(PulseError::CarrierUndersampled { .. })
        ));
        assert!(apply_drag(&env, &spec, DragMode::Baseband).is_ok());
    }

    #[test]
    fn chirp_zero_coefficient_is_identity() {
        let grid = Grid::from_span(0.0_f64, 400e-9, 1e-9);
        let env = cosine_envelope(400e-9, 1.0, grid);
        let out = apply_chirp(&env, 0.0);
        assert_eq!(out, env);
    }

    #[test]
    fn chirp_constant_amplitude_phase() {
        // constant |a| = A over [0, T]: accumulated phase at T is −C·A²·T
        let grid = Grid::from_span(0.0_f64, 100e-9, 0.1e-9);
        let a = SampledWaveform::constant(grid, cplx(2.0, 0.0));
        let c_ch = TAU * 1e6;
        let out = apply_chirp(&a, c_ch);
        let expect = -c_ch * 4.0 * 100e-9;
        assert_relative_eq!(out.samples.last().unwrap().arg(), expect.rem_euclid(TAU) - TAU, epsilon = 1e-9);
    }

    #[test]
    fn chirp_preserves_magnitude() {
        let grid = Grid::from_span(0.0_f64, 400e-9, 0.5e-9);
        let env = cosine_envelope(400e-9, 5.0, grid);
        let out = apply_chirp(&env, TAU * 2e6);
        for (a, b) in env.samples.iter().zip(&out.samples) {
            assert_relative_eq!(a.norm(), b.norm(), epsilon = 1e-13);
        }
    }

    #[test]
    fn chirp_phase_matches_quadrature_oracle() {
        // trapezoid accumulation vs adaptive quadrature of the
        // analytic |a_p|² for the cosine envelope
        let w = 400e-9_f64;
        let grid = Grid::from_span(0.0, w, 0.05e-9);
        let env = cosine_envelope(w, 1.0, grid);
        let c_ch = TAU * 1.66e6;
        let out = apply_chirp(&env, c_ch);
        // compare at an interior point where the envelope is nonzero
        let idx = (out.samples.len() - 1) * 3 / 4;
        let t_probe = grid.time(idx);
        let oracle = adaptive_simpson(
            &|t: f64| {
                let a = (1.0 - (TAU * t / w).cos()) / 2.0;
                a * a
            },
            0.0,
            t_probe,
            1e-15,
        );
        let got = out.samples[idx].arg();
        let expect = -c_ch * oracle;
        let diff = (got - expect).rem_euclid(TAU);
        let diff = diff.min(TAU - diff);
        assert!(diff < 1e-6, "phase mismatch: {diff:.3e} rad");
    }

    #[test]
    fn analytic_pulse_matches_sampled_chirp() {
        let pulse = CosineCouplingPulse {
            start: 0.0_f64,
            width: 400e-9,
            peak: TAU * 1.3e6,
            chirp_coeff: TAU * -1.66e6,
            phase: 0.2,
        };
        let grid = Grid::from_span(0.0, 400e-9, 0.05e-9);
        let env = cosine_envelope(400e-9, 1.0, grid);
        let chirped = apply_chirp(&env, pulse.chirp_coeff);
        for (i, t) in grid.times().enumerate().step_by(997) {
            let analytic = pulse.eval(t);
            let sampled = chirped.samples[i]
                * cplx::<f64>(0.2_f64.cos(), 0.2_f64.sin())
                * cplx::<f64>(TAU * 1.3e6, 0.0);
            assert_relative_eq!(analytic.re, sampled.re, epsilon = 1e-4 * TAU * 1.3e6);
            assert_relative_eq!(analytic.im, sampled.im, epsilon = 1e-4 * TAU * 1.3e6);
        }
    }

    #[test]
    fn stark_model_quadratic() {
        assert_eq!(stark_shift_model(0.0, -2.15), 0.0);
        let s1 = stark_shift_model(1.0, TAU * -2.15e6);
        assert_relative_eq!(s1 / TAU, -2.15e6, max_relative = 1e-12);
        let s2 = stark_shift_model(2.0, TAU * -2.15e6);
        assert_relative_eq!(s2, 4.0 * s1, max_relative = 1e-12);
    }

    #[test]
    fn sequence_second_pulse_phase_rotated() {
        let spec = SequenceSpec::<f64>::reference(BlochAngles { theta: 0.5, phi: 0.0 });
        let seq = build_timebin_sequence(&spec).unwrap();
        let phi_l = spec.coupling.phase_offset;
        // sample both pulses at matching offsets from their starts
        for frac in [0.25, 0.5, 0.75] {
            let t1 = seq.first.start + frac * seq.first.width;
            let t2 = seq.second.start + frac * seq.second.width;
            let a = seq.first.eval(t1);
            let b = seq.second.eval(t2);
            let rotated = a * cplx::<f64>(phi_l.cos(), phi_l.sin());
            assert_relative_eq!(b.re, rotated.re, epsilon = 1e-9 * a.norm().max(1.0));
            assert_relative_eq!(b.im, rotated.im, epsilon = 1e-9 * a.norm().max(1.0));
        }
        assert_relative_eq!(phi_l, 0.74 * std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn sequence_overlap_rejected() {
        let mut spec = SequenceSpec::reference(BlochAngles { theta: 0.0, phi: 0.0 });
        spec.bin_separation = spec.coupling.width * 0.5;
        assert!(matches!(
            build_timebin_sequence(&spec),
            Err(PulseError::OverlappingPulses { .. })
        ));
    }

    #[test]
    fn sequence_markers_ordered() {
        let spec = SequenceSpec::reference(BlochAngles { theta: 1.0, phi: 0.3 });
        let seq = build_timebin_sequence(&spec).unwrap();
        assert!(seq.first.end() < seq.swap_time);
        assert!(seq.swap_time < seq.second.start);
        assert!(seq.second.end() < seq.window);
        let swaps: Vec<_> = seq
            .markers
            .iter()
            .filter(|m| matches!(m, EventMarker::SwapPiEf { .. }))
            .collect();
        assert_eq!(swaps.len(), 1);
    }

    #[test]
    fn energy_grid_convergence() {
        // halving dt changes the trapezoid energy by < 1e-4 relative
        let w = 400e-9_f64;
        let coarse = cosine_envelope(w, 1.0, Grid::from_span(0.0, w, 1e-9));
        let fine = cosine_envelope(w, 1.0, Grid::from_span(0.0, w, 0.5e-9));
        let (e1, e2) = (coarse.energy(), fine.energy());
        assert!(((e1 - e2) / e2).abs() < 1e-4);
    }

    #[test]
    fn lerp_outside_support_is_zero() {
        let grid = Grid::from_span(0.0_f64, 10e-9, 1e-9);
        let w = SampledWaveform::constant(grid, cplx(1.0, 0.0));
        assert_eq!(w.eval_lerp(-1e-9).norm(), 0.0);
        assert_eq!(w.eval_lerp(11e-9).norm(), 0.0);
        assert_eq!(w.eval_lerp(5.5e-9).re, 1.0);
    }
}

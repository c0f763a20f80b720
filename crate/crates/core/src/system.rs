//! Device parameters, unit conventions, derived frequencies, and the local
//! oscillator frequency-matching validator.
//!
//! Configuration files carry frequencies in Hz and times in seconds; every
//! quantity inside the crate is angular (rad/s) or seconds. The loader is the
//! only place where the 2π conversion happens.

use num_complex::Complex;
use serde::Deserialize;
use thiserror::Error;

use crate::num::{real, Real};
use crate::pulse::SampledWaveform;

/// Relative tolerance for the ω_ef = ω_ge + α consistency check at load time.
pub const EF_CONSISTENCY_TOL: f64 = 1e-6;

/// Default tolerance (relative to ω_rep) for the LO matching condition.
pub const LO_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("parameter `{0}` must be positive")]
    NonPositive(&'static str),
    #[error("parameter `{0}` must be non-negative")]
    Negative(&'static str),
    #[error("anharmonicity must be negative for a transmon")]
    AlphaSign,
    #[error("coherence exceeds 2·T1 for the {0} transition")]
    CoherenceBound(&'static str),
    #[error("omega_ef inconsistent with omega_ge + alpha (relative error {0:.3e})")]
    EfInconsistent(f64),
    #[error("phase coherence condition violated: residual {residual:.6e} of omega_rep")]
    LoMismatch { residual: f64 },
    #[error("drive and qubit frequencies coincide; effective coupling is singular")]
    DegenerateDetuning,
    #[error("config has no [lo] section")]
    MissingLoSection,
}

/// Measured device parameters. Frequencies and rates are angular (rad/s),
/// times are seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams<T> {
    /// Bare cavity frequency.
    pub omega_c: T,
    /// Dressed cavity frequency with the qubit in its ground state.
    pub omega_c_g: T,
    /// g–e transition frequency.
    pub omega_ge: T,
    /// e–f transition frequency.
    pub omega_ef: T,
    /// Anharmonicity (negative).
    pub alpha: T,
    /// Qubit–cavity coupling rate.
    pub g: T,
    /// External cavity coupling rate.
    pub kappa_ex: T,
    /// Internal cavity loss rate.
    pub kappa_in: T,
    pub t1_ge: T,
    pub t2_ge: T,
    pub t1_ef: T,
    pub t2_ef: T,
}

/// Quantities derived from [`SystemParams`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedParams<T> {
    /// Total cavity linewidth κ = κ_ex + κ_in.
    pub kappa: T,
    /// Qubit–cavity detuning Δ = ω_ge − ω_c.
    pub delta: T,
    /// f0–g1 transition frequency 2ω_ge + α − ω_c.
    pub omega_f0g1: T,
}

/// Local-oscillator frequencies used for phase-coherent generation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoFrequencies<T> {
    pub omega_c_lo: T,
    pub omega_geef_lo: T,
    pub omega_f0g1_lo: T,
    pub omega_rep: T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    system: SystemSection,
    lo: Option<LoSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    omega_c_hz: f64,
    omega_c_g_hz: f64,
    omega_ge_hz: f64,
    omega_ef_hz: Option<f64>,
    alpha_hz: f64,
    g_hz: f64,
    kappa_ex_hz: f64,
    kappa_in_hz: f64,
    t1_ge_s: f64,
    t2_ge_s: f64,
    t1_ef_s: f64,
    t2_ef_s: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoSection {
    omega_c_lo_hz: f64,
    omega_geef_lo_hz: f64,
    omega_f0g1_lo_hz: f64,
    omega_rep_hz: f64,
}

impl<T: Real> SystemParams<T> {
    /// Check all structural invariants.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let zero = T::zero();
        if self.kappa_ex <= zero {
            return Err(ConfigError::NonPositive("kappa_ex"));
        }
        if self.kappa_in < zero {
            return Err(ConfigError::Negative("kappa_in"));
        }
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_c_g", self.omega_c_g),
            ("omega_ge", self.omega_ge),
            ("omega_ef", self.omega_ef),
            ("g", self.g),
            ("t1_ge", self.t1_ge),
            ("t2_ge", self.t2_ge),
            ("t1_ef", self.t1_ef),
            ("t2_ef", self.t2_ef),
        ] {
            if v <= zero {
                return Err(ConfigError::NonPositive(name));
            }
        }
        if self.alpha >= zero {
            return Err(ConfigError::AlphaSign);
        }
        let two = real::<T>(2.0);
        if self.t2_ge > two * self.t1_ge {
            return Err(ConfigError::CoherenceBound("g-e"));
        }
        if self.t2_ef > two * self.t1_ef {
            return Err(ConfigError::CoherenceBound("e-f"));
        }
        let expected = self.omega_ge + self.alpha;
        let rel = ((self.omega_ef - expected) / expected).abs();
        if rel > real::<T>(EF_CONSISTENCY_TOL) {
            return Err(ConfigError::EfInconsistent(rel.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }

    /// Reference parameter set for the 3D-cavity transmon device that the
    /// shipped `configs/device.toml` describes.
    pub fn default_device() -> Self {
        let tau = real::<T>(std::f64::consts::TAU);
        SystemParams {
            omega_c: tau * real(10.619e9),
            omega_c_g: tau * real(10.628e9),
            omega_ge: tau * real(7.813e9),
            omega_ef: tau * real(7.473e9),
            alpha: tau * real(-0.340e9),
            g: tau * real(156.1e6),
            kappa_ex: tau * real(2.91e6),
            kappa_in: tau * real(346e3),
            t1_ge: real(26e-6),
            t2_ge: real(15e-6),
            t1_ef: real(15e-6),
            t2_ef: real(16e-6),
        }
    }
}

/// Parse a `[system]`/`[lo]` config document. Frequencies are given in Hz in
/// the file and multiplied by 2π here; unknown keys are rejected. A missing
/// `omega_ef_hz` is filled in as ω_ge + α.
pub fn load_system_params<T: Real>(
    text: &str,
) -> Result<(SystemParams<T>, Option<LoFrequencies<T>>), ConfigError> {
    let cfg: ConfigFile = toml::from_str(text)?;
    let s = cfg.system;
    let tau = std::f64::consts::TAU;
    let omega_ef_hz = s.omega_ef_hz.unwrap_or(s.omega_ge_hz + s.alpha_hz);
    let params = SystemParams {
        omega_c: real(tau * s.omega_c_hz),
        omega_c_g: real(tau * s.omega_c_g_hz),
        omega_ge: real(tau * s.omega_ge_hz),
        omega_ef: real(tau * omega_ef_hz),
        alpha: real(tau * s.alpha_hz),
        g: real(tau * s.g_hz),
        kappa_ex: real(tau * s.kappa_ex_hz),
        kappa_in: real(tau * s.kappa_in_hz),
        t1_ge: real(s.t1_ge_s),
        t2_ge: real(s.t2_ge_s),
        t1_ef: real(s.t1_ef_s),
        t2_ef: real(s.t2_ef_s),
    };
    params.validate()?;
    let lo = cfg.lo.map(|l| {
        let lf = LoFrequencies {
            omega_c_lo: real(tau * l.omega_c_lo_hz),
            omega_geef_lo: real(tau * l.omega_geef_lo_hz),
            omega_f0g1_lo: real(tau * l.omega_f0g1_lo_hz),
            omega_rep: real(tau * l.omega_rep_hz),
        };
        if l.omega_c_lo_hz <= 0.0
            || l.omega_geef_lo_hz <= 0.0
            || l.omega_f0g1_lo_hz <= 0.0
            || l.omega_rep_hz <= 0.0
        {
            return Err(ConfigError::NonPositive("lo frequency"));
        }
        Ok(lf)
    });
    let lo = match lo {
        Some(r) => Some(r?),
        None => None,
    };
    Ok((params, lo))
}

/// Pure derivation of κ, Δ, and ω_f0g1. Idempotent.
pub fn derive_params<T: Real>(p: &SystemParams<T>) -> DerivedParams<T> {
    DerivedParams {
        kappa: p.kappa_ex + p.kappa_in,
        delta: p.omega_ge - p.omega_c,
        omega_f0g1: real::<T>(2.0) * p.omega_ge + p.alpha - p.omega_c,
    }
}

/// Check the repetition-rate matching condition
/// 2ω_geef − ω_c − ω_f0g1 = N_r·ω_rep and return the integer N_r.
///
/// `tol` is relative to ω_rep.
pub fn validate_lo_matching<T: Real>(lo: &LoFrequencies<T>, tol: T) -> Result<i64, ConfigError> {
    assert!(lo.omega_rep > T::zero(), "omega_rep must be positive");
    let combo = real::<T>(2.0) * lo.omega_geef_lo - lo.omega_c_lo - lo.omega_f0g1_lo;
    let ratio = combo / lo.omega_rep;
    let nearest = ratio.round();
    let residual = (ratio - nearest).abs();
    if residual <= tol {
        Ok(nearest.to_f64().unwrap() as i64)
    } else {
        Err(ConfigError::LoMismatch { residual: residual.to_f64().unwrap_or(f64::NAN) })
    }
}

/// Map a drive amplitude Ω(t) to the induced f0–g1 coupling
/// g_eff(t) = √2·α·g²·Ω(t) / [4(ω_c − ω_ge)³], pointwise on the grid.
///
/// The real prefactor is kept with its literal sign (negative for a transmon,
/// since α < 0); only |g_eff| and relative phase matter downstream.
pub fn effective_coupling<T: Real>(
    p: &SystemParams<T>,
    omega_drive: &SampledWaveform<T>,
) -> Result<SampledWaveform<T>, ConfigError> {
    let diff = p.omega_c - p.omega_ge;
    if diff == T::zero() {
        return Err(ConfigError::DegenerateDetuning);
    }
    let prefactor =
        real::<T>(2.0).sqrt() * p.alpha * p.g * p.g / (real::<T>(4.0) * diff * diff * diff);
    let scale = Complex::new(prefactor, T::zero());
    Ok(omega_drive.map_samples(|z| z * scale))
}

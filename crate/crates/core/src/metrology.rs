//! From force gradients to mechanical frequency shifts, the thermal-noise
//! floor on a measurable shift, and the force-gradient detection threshold.
//!
//! The Casimir backgrounds of the Au and Al trapping positions are taken to
//! cancel exactly in the differential measurement; no residual Casimir term
//! enters anywhere below.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::units::PhysConstants;

/// (4/3) pi (10 nm)^3 x 2500 kg/m^3. Quoted as 1.05e-20 kg when rounded;
/// this unrounded value is the one that reproduces the threshold
/// 2 m_s omega0 delta_omega_min = 6.2832e-23 kg/s^2.
pub const NOMINAL_SPHERE_MASS_KG: f64 = 4.0 / 3.0 * std::f64::consts::PI * 1e-24 * 2500.0;

/// Sphere mass as printed, used as the effective mass in the noise floor.
pub const PRINTED_SPHERE_MASS_KG: f64 = 1.05e-20;

/// Linewidth of the transmission feature, adopted as the minimum detectable
/// resonance shift.
pub const NOMINAL_LINEWIDTH_HZ: f64 = 3e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Effective mass, kg.
    pub m_eff: f64,
    /// Hz
    pub omega0: f64,
    pub q: f64,
    /// Measurement linewidth, Hz.
    pub delta_f: f64,
    /// K
    pub temperature: f64,
    /// Mean-square drive amplitude <x_c^2>, m^2.
    pub x2_mean: f64,
}

impl NoiseParams {
    pub fn nominal() -> Self {
        NoiseParams {
            m_eff: PRINTED_SPHERE_MASS_KG,
            omega0: 1e5,
            q: 3e12,
            delta_f: NOMINAL_LINEWIDTH_HZ,
            temperature: 1e-3,
            x2_mean: 100e-18,
        }
    }

    /// E_C = M_eff omega0^2 <x_c^2>, J.
    pub fn e_c(&self) -> f64 {
        self.m_eff * self.omega0 * self.omega0 * self.x2_mean
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(
            "noise parameters",
            &[
                self.m_eff,
                self.omega0,
                self.q,
                self.delta_f,
                self.temperature,
                self.x2_mean,
            ],
        )?;
        for (what, v) in [
            ("m_eff", self.m_eff),
            ("omega0", self.omega0),
            ("q", self.q),
            ("delta_f", self.delta_f),
            ("x2_mean", self.x2_mean),
        ] {
            if v <= 0.0 {
                return Err(Error::domain(what, v, "must be positive"));
            }
        }
        if self.temperature < 0.0 {
            return Err(Error::domain(
                "temperature",
                self.temperature,
                "must be nonnegative",
            ));
        }
        Ok(())
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::nominal()
    }
}

/// (omega' - omega0) / omega0 = -(1 / 2 m_s omega0^2) dF/dd.
pub fn fractional_shift(force_gradient_si: f64, m_s: f64, omega0: f64) -> Result<f64> {
    check_mass_and_frequency(m_s, omega0)?;
    ensure_finite("force gradient", &[force_gradient_si])?;
    Ok(-force_gradient_si / (2.0 * m_s * omega0 * omega0))
}

/// delta_omega = |d(dF)/dd| / (2 m_s omega0): separation of the two
/// transmission peaks produced by a differential gradient (N/m).
pub fn resonance_shift(differential_gradient_si: f64, m_s: f64, omega0: f64) -> Result<f64> {
    check_mass_and_frequency(m_s, omega0)?;
    ensure_finite("force gradient", &[differential_gradient_si])?;
    Ok(differential_gradient_si.abs() / (2.0 * m_s * omega0))
}

/// delta_omega_m = [(k_B T / E_C) (omega0 delta_f / Q)]^(1/2), Hz.
pub fn thermal_noise_floor(n: &NoiseParams, k: &PhysConstants) -> Result<f64> {
    n.validate()?;
    Ok((k.k_b * n.temperature / n.e_c() * n.omega0 * n.delta_f / n.q).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// N/m
    pub si: f64,
    /// eV^3
    pub natural: f64,
}

/// Smallest detectable differential force gradient, 2 m_s omega0 delta_omega_min.
pub fn gradient_threshold(
    delta_omega_min: f64,
    m_s: f64,
    omega0: f64,
    k: &PhysConstants,
) -> Result<Threshold> {
    check_mass_and_frequency(m_s, omega0)?;
    ensure_finite("minimum shift", &[delta_omega_min])?;
    if delta_omega_min < 0.0 {
        return Err(Error::domain(
            "minimum shift",
            delta_omega_min,
            "must be nonnegative",
        ));
    }
    let si = 2.0 * m_s * omega0 * delta_omega_min;
    Ok(Threshold {
        si,
        natural: k.force_gradient_si_to_natural(si)?,
    })
}

fn check_mass_and_frequency(m_s: f64, omega0: f64) -> Result<()> {
    ensure_finite("mass/frequency", &[m_s, omega0])?;
    if m_s <= 0.0 {
        return Err(Error::domain("m_s", m_s, "must be positive"));
    }
    if omega0 <= 0.0 {
        return Err(Error::domain("omega0", omega0, "must be positive"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DetectionMode {
    /// delta_omega_min equals the measurement linewidth delta_f.
    #[default]
    Linewidth,
    /// delta_omega_min from the thermal-noise floor.
    Thermal,
}

impl std::str::FromStr for DetectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linewidth" => Ok(DetectionMode::Linewidth),
            "thermal" => Ok(DetectionMode::Thermal),
            other => Err(Error::Config(format!(
                "unknown detection mode {other:?} (expected linewidth|thermal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub delta_omega_min_hz: f64,
    pub threshold_si_n_per_m: f64,
    pub threshold_natural_ev3: f64,
    pub mode: DetectionMode,
}

pub fn noise_report(
    mode: DetectionMode,
    noise: &NoiseParams,
    m_s: f64,
    k: &PhysConstants,
) -> Result<NoiseReport> {
    noise.validate()?;
    let delta_omega_min = match mode {
        DetectionMode::Linewidth => noise.delta_f,
        DetectionMode::Thermal => thermal_noise_floor(noise, k)?,
    };
    let t = gradient_threshold(delta_omega_min, m_s, noise.omega0, k)?;
    Ok(NoiseReport {
        delta_omega_min_hz: delta_omega_min,
        threshold_si_n_per_m: t.si,
        threshold_natural_ev3: t.natural,
        mode,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftReport {
    /// Hz
    pub delta_omega: f64,
    /// N/m
    pub threshold_si: f64,
    /// eV^3
    pub threshold_natural: f64,
    pub detectable: bool,
}

/// Compares the peak separation produced by a differential gradient (N/m)
/// with the minimum detectable shift.
pub fn assess_shift(
    differential_gradient_si: f64,
    delta_omega_min: f64,
    m_s: f64,
    omega0: f64,
    k: &PhysConstants,
) -> Result<ShiftReport> {
    let delta_omega = resonance_shift(differential_gradient_si, m_s, omega0)?;
    let t = gradient_threshold(delta_omega_min, m_s, omega0, k)?;
    Ok(ShiftReport {
        delta_omega,
        threshold_si: t.si,
        threshold_natural: t.natural,
        detectable: delta_omega >= delta_omega_min,
    })
}

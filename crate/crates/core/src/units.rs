//! Physical constants and SI <-> natural-unit (hbar = c = 1, energies in eV)
//! conversion for the handful of dimensions the pipeline touches.
//!
//! Two constant sets exist. [`ConstantsMode::Codata`] derives every
//! conversion factor from the exact SI defining constants. The
//! [`ConstantsMode::Printed`] set pins the rounded numbers the
//! reference analysis printed (nucleon and hydrogen masses, Boltzmann's
//! constant, the force-gradient factor 2.4313e5) so reproduced figures are
//! bit-stable against those digits.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsMode {
    #[default]
    Printed,
    Codata,
}

impl std::str::FromStr for ConstantsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(ConstantsMode::Printed),
            "codata" => Ok(ConstantsMode::Codata),
            other => Err(Error::Config(format!(
                "unknown constants mode {other:?} (expected printed|codata)"
            ))),
        }
    }
}

const HBAR: f64 = 1.054_571_817e-34;
const C: f64 = 299_792_458.0;
const EV_IN_J: f64 = 1.602_176_634e-19;
const K_B: f64 = 1.380_649e-23;

const M_P_EV: f64 = 938.272_088_16e6;
const M_N_EV: f64 = 939.565_420_52e6;
// 1.00782503223 u at 931.49410242 MeV/u
const M_H_EV: f64 = 938.783_073_793e6;

const PRINTED_K_B: f64 = 1.38e-23;
const PRINTED_M_EV: f64 = 938.9150e6;
const PRINTED_M_H_EV: f64 = 938.771e6;
const PRINTED_FORCE_GRADIENT_FACTOR: f64 = 2.4313e5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysConstants {
    pub mode: ConstantsMode,
    /// J s
    pub hbar: f64,
    /// m/s
    pub c: f64,
    /// J/K
    pub k_b: f64,
    /// J per eV
    pub ev_in_j: f64,
    /// eV m
    pub hbar_c: f64,
    /// eV
    pub m_n: f64,
    /// eV
    pub m_p: f64,
    /// Mean nucleon mass (m_n + m_p) / 2, eV.
    pub m: f64,
    /// Hydrogen-atom mass, eV.
    pub m_h: f64,
    /// eV^3 per (kg/s^2).
    pub force_gradient_factor: f64,
    /// MeV^4 per (kg/m^3).
    pub density_factor: f64,
}

impl PhysConstants {
    pub fn new(mode: ConstantsMode) -> Self {
        let hbar_c = HBAR * C / EV_IN_J;
        let density_factor = C * C / EV_IN_J * hbar_c.powi(3) * 1e-24;
        match mode {
            ConstantsMode::Codata => Self::assemble(
                mode,
                K_B,
                M_N_EV,
                M_P_EV,
                M_H_EV,
                hbar_c * hbar_c / EV_IN_J,
                density_factor,
            ),
            ConstantsMode::Printed => Self::assemble(
                mode,
                PRINTED_K_B,
                // m_p kept at its measured value; m_n absorbs the printed mean.
                2.0 * PRINTED_M_EV - M_P_EV,
                M_P_EV,
                PRINTED_M_H_EV,
                PRINTED_FORCE_GRADIENT_FACTOR,
                density_factor,
            ),
        }
    }

    pub fn nominal() -> Self {
        Self::new(ConstantsMode::Printed)
    }

    pub fn codata() -> Self {
        Self::new(ConstantsMode::Codata)
    }

    fn assemble(
        mode: ConstantsMode,
        k_b: f64,
        m_n: f64,
        m_p: f64,
        m_h: f64,
        force_gradient_factor: f64,
        density_factor: f64,
    ) -> Self {
        PhysConstants {
            mode,
            hbar: HBAR,
            c: C,
            k_b,
            ev_in_j: EV_IN_J,
            hbar_c: HBAR * C / EV_IN_J,
            m_n,
            m_p,
            m: 0.5 * (m_n + m_p),
            m_h,
            force_gradient_factor,
            density_factor,
        }
    }

    /// Meters to eV^-1.
    pub fn length_si_to_natural(&self, meters: f64) -> Result<f64> {
        ensure_finite("length", &[meters])?;
        if meters < 0.0 {
            return Err(Error::domain("length", meters, "must be nonnegative"));
        }
        Ok(meters / self.hbar_c)
    }

    pub fn length_natural_to_si(&self, inv_ev: f64) -> f64 {
        inv_ev * self.hbar_c
    }

    /// kg/s^2 (N/m) to eV^3.
    pub fn force_gradient_si_to_natural(&self, n_per_m: f64) -> Result<f64> {
        ensure_finite("force gradient", &[n_per_m])?;
        Ok(n_per_m * self.force_gradient_factor)
    }

    pub fn force_gradient_natural_to_si(&self, ev3: f64) -> f64 {
        ev3 / self.force_gradient_factor
    }

    /// kg/m^3 to MeV^4.
    pub fn density_si_to_natural(&self, kg_m3: f64) -> Result<f64> {
        ensure_finite("density", &[kg_m3])?;
        if kg_m3 < 0.0 {
            return Err(Error::domain("density", kg_m3, "must be nonnegative"));
        }
        Ok(kg_m3 * self.density_factor)
    }

    pub fn density_natural_to_si(&self, mev4: f64) -> f64 {
        mev4 / self.density_factor
    }

    /// Angular frequency (the "Hz" convention used throughout, no 2 pi) to eV.
    pub fn frequency_to_energy(&self, hz: f64) -> f64 {
        self.hbar * hz / self.ev_in_j
    }

    pub fn energy_to_frequency(&self, ev: f64) -> f64 {
        ev * self.ev_in_j / self.hbar
    }

    /// Audit dump of every constant and conversion factor.
    pub fn dump(&self) -> serde_json::Value {
        serde_json::json!({
            "mode": self.mode,
            "si": {
                "hbar_J_s": self.hbar,
                "c_m_per_s": self.c,
                "k_B_J_per_K": self.k_b,
                "eV_in_J": self.ev_in_j,
                "m_n_kg": self.m_n * self.ev_in_j / (self.c * self.c),
                "m_p_kg": self.m_p * self.ev_in_j / (self.c * self.c),
                "m_kg": self.m * self.ev_in_j / (self.c * self.c),
                "m_H_kg": self.m_h * self.ev_in_j / (self.c * self.c),
            },
            "natural": {
                "hbar_c_eV_m": self.hbar_c,
                "m_n_eV": self.m_n,
                "m_p_eV": self.m_p,
                "m_eV": self.m,
                "m_H_eV": self.m_h,
                "k_B_eV_per_K": self.k_b / self.ev_in_j,
            },
            "conversions": {
                "inverse_eV_per_m": 1.0 / self.hbar_c,
                "eV3_per_N_per_m": self.force_gradient_factor,
                "MeV4_per_kg_per_m3": self.density_factor,
                "eV_per_Hz": self.hbar / self.ev_in_j,
            },
        })
    }
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self::nominal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    /// m
    Length,
    /// eV^-1
    InverseEnergy,
    /// kg/m^3
    DensitySi,
    /// MeV^4
    DensityNatural,
    /// N/m
    ForceGradientSi,
    /// eV^3
    ForceGradientNatural,
    /// Hz (angular convention)
    Frequency,
    /// eV
    Energy,
}

impl Dimension {
    pub fn is_si(self) -> bool {
        matches!(
            self,
            Dimension::Length
                | Dimension::DensitySi
                | Dimension::ForceGradientSi
                | Dimension::Frequency
        )
    }

    /// The same physical dimension in the other unit system.
    pub fn counterpart(self) -> Dimension {
        use Dimension::*;
        match self {
            Length => InverseEnergy,
            InverseEnergy => Length,
            DensitySi => DensityNatural,
            DensityNatural => DensitySi,
            ForceGradientSi => ForceGradientNatural,
            ForceGradientNatural => ForceGradientSi,
            Frequency => Energy,
            Energy => Frequency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub dimension: Dimension,
}

impl Quantity {
    pub fn new(value: f64, dimension: Dimension) -> Self {
        Quantity { value, dimension }
    }

    /// Re-express in the other unit system.
    pub fn convert(self, k: &PhysConstants) -> Quantity {
        use Dimension::*;
        let value = match self.dimension {
            Length => self.value / k.hbar_c,
            InverseEnergy => k.length_natural_to_si(self.value),
            DensitySi => self.value * k.density_factor,
            DensityNatural => k.density_natural_to_si(self.value),
            ForceGradientSi => self.value * k.force_gradient_factor,
            ForceGradientNatural => k.force_gradient_natural_to_si(self.value),
            Frequency => k.frequency_to_energy(self.value),
            Energy => k.energy_to_frequency(self.value),
        };
        Quantity::new(value, self.dimension.counterpart())
    }

    pub fn to_natural(self, k: &PhysConstants) -> Quantity {
        if self.dimension.is_si() {
            self.convert(k)
        } else {
            self
        }
    }

    pub fn to_si(self, k: &PhysConstants) -> Quantity {
        if self.dimension.is_si() {
            self
        } else {
            self.convert(k)
        }
    }
}

//! Upper bounds on g^2/4pi from the detection threshold, and exclusion
//! curves over a log-spaced axion-mass grid.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axion::{self, Geometry, Material, MaterialSet, MASS_FLOOR};
use crate::error::{ensure_finite, Error, Result};
use crate::units::PhysConstants;

const MEV4_TO_EV4: f64 = 1e24;

/// Largest axion mass a bound is evaluated at, eV.
pub const MASS_CEILING: f64 = 100.0;

pub const MIN_POINTS_PER_DECADE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// g_ap^2 >> g_an^2
    ProtonDominant,
    /// g_an^2 >> g_ap^2
    NeutronDominant,
    /// g_an^2 = g_ap^2
    Equal,
}

impl Regime {
    pub const ALL: [Regime; 3] = [
        Regime::ProtonDominant,
        Regime::NeutronDominant,
        Regime::Equal,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Regime::ProtonDominant => "proton",
            Regime::NeutronDominant => "neutron",
            Regime::Equal => "equal",
        }
    }

    /// Nucleon-number weight of a material: Z/mu, N/mu or (Z + N)/mu.
    pub fn weight(self, m: &Material) -> f64 {
        match self {
            Regime::ProtonDominant => m.z_over_mu,
            Regime::NeutronDominant => m.n_over_mu,
            Regime::Equal => m.z_over_mu + m.n_over_mu,
        }
    }

    /// rho_Al w_Al - rho_Au w_Au, MeV^4.
    pub fn plate_factor(self, mats: &MaterialSet) -> f64 {
        mats.al.rho_natural * self.weight(&mats.al) - mats.au.rho_natural * self.weight(&mats.au)
    }

    /// rho_s w_s, MeV^4.
    pub fn sphere_factor(self, mats: &MaterialSet) -> f64 {
        mats.sphere.rho_natural * self.weight(&mats.sphere)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proton" | "proton_dominant" => Ok(Regime::ProtonDominant),
            "neutron" | "neutron_dominant" => Ok(Regime::NeutronDominant),
            "equal" => Ok(Regime::Equal),
            other => Err(Error::Usage(format!(
                "unknown regime {other:?} (expected proton|neutron|equal)"
            ))),
        }
    }
}

/// Everything a bound depends on besides the regime and the mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintSetup {
    pub geometry: Geometry,
    pub materials: MaterialSet,
    /// Smallest detectable differential force gradient, eV^3.
    pub threshold_natural: f64,
    #[serde(skip)]
    pub constants: PhysConstants,
}

impl ConstraintSetup {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.materials.al.validate()?;
        self.materials.au.validate()?;
        self.materials.sphere.validate()?;
        ensure_finite("threshold", &[self.threshold_natural])?;
        if self.threshold_natural <= 0.0 {
            return Err(Error::domain(
                "threshold",
                self.threshold_natural,
                "must be positive",
            ));
        }
        Ok(())
    }

    /// Bound for a precomputed integral I (eV^-1):
    /// g^2/4pi = m m_H sqrt(threshold / |pi F_plate F_sphere I|).
    pub fn bound_with_integral(&self, regime: Regime, integral: f64) -> f64 {
        let k = &self.constants;
        let plate = regime.plate_factor(&self.materials) * MEV4_TO_EV4;
        let sphere = regime.sphere_factor(&self.materials) * MEV4_TO_EV4;
        let denominator = (std::f64::consts::PI * plate * sphere * integral).abs();
        k.m * k.m_h * (self.threshold_natural / denominator).sqrt()
    }

    pub fn bound_at_mass(&self, regime: Regime, m_a: f64) -> Result<f64> {
        self.validate()?;
        check_mass(m_a)?;
        self.bound_from_integral(regime, m_a, self.integral(m_a)?)
    }

    fn integral(&self, m_a: f64) -> Result<f64> {
        axion::integral_i(&self.geometry, m_a)
            .map(|e| e.value)
            .map_err(|e| Error::AtMass {
                mass: m_a,
                source: Box::new(e),
            })
    }

    fn bound_from_integral(&self, regime: Regime, m_a: f64, integral: f64) -> Result<f64> {
        let b = self.bound_with_integral(regime, integral);
        if b.is_finite() && b > 0.0 {
            Ok(b)
        } else {
            Err(Error::AtMass {
                mass: m_a,
                source: Box::new(Error::domain("bound", b, "must be finite and positive")),
            })
        }
    }

    /// One curve per regime over a shared grid. I is evaluated once per mass.
    pub fn curves(&self, regimes: &[Regime], grid: &MassGrid) -> Result<Vec<ConstraintCurve>> {
        self.validate()?;
        let masses = grid.masses()?;
        let integrals = masses
            .par_iter()
            .map(|&m| self.integral(m))
            .collect::<Result<Vec<_>>>()?;
        regimes
            .iter()
            .map(|&regime| {
                let bounds = masses
                    .iter()
                    .zip(&integrals)
                    .map(|(&m, &i)| self.bound_from_integral(regime, m, i))
                    .collect::<Result<Vec<_>>>()?;
                let curve = ConstraintCurve {
                    masses: masses.clone(),
                    bounds,
                    regime,
                    provenance: Provenance::new(self, grid),
                };
                curve.check_monotone()?;
                Ok(curve)
            })
            .collect()
    }

    pub fn constraint_curve(&self, regime: Regime, grid: &MassGrid) -> Result<ConstraintCurve> {
        Ok(self.curves(&[regime], grid)?.remove(0))
    }
}

fn check_mass(m_a: f64) -> Result<()> {
    ensure_finite("axion mass", &[m_a])?;
    if !(MASS_FLOOR..=MASS_CEILING).contains(&m_a) {
        return Err(Error::domain(
            "axion mass",
            m_a,
            "must lie in [1e-12, 100] eV",
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassGrid {
    /// eV
    pub lo: f64,
    /// eV
    pub hi: f64,
    pub points_per_decade: usize,
}

impl Default for MassGrid {
    fn default() -> Self {
        MassGrid {
            lo: 1e-10,
            hi: 20.0,
            points_per_decade: 40,
        }
    }
}

impl MassGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_decade < MIN_POINTS_PER_DECADE {
            return Err(Error::Usage(format!(
                "points_per_decade must be at least {MIN_POINTS_PER_DECADE}, got {}",
                self.points_per_decade
            )));
        }
        check_mass(self.lo)?;
        check_mass(self.hi)?;
        if self.lo >= self.hi {
            return Err(Error::Usage(format!(
                "mass grid needs lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    /// Log-spaced masses from lo to hi inclusive, at least
    /// `points_per_decade` per decade.
    pub fn masses(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let decades = (self.hi / self.lo).log10();
        let n = (decades * self.points_per_decade as f64).ceil().max(1.0) as usize;
        let step = (b - a) / n as f64;
        Ok((0..=n)
            .map(|k| match k {
                0 => self.lo,
                k if k == n => self.hi,
                k => (a + k as f64 * step).exp(),
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool_version: &'static str,
    pub constants: serde_json::Value,
    pub geometry: Geometry,
    pub materials: MaterialSet,
    pub threshold_natural_ev3: f64,
    pub mass_grid: MassGrid,
}

impl Provenance {
    fn new(setup: &ConstraintSetup, grid: &MassGrid) -> Self {
        Provenance {
            tool_version: env!("CARGO_PKG_VERSION"),
            constants: setup.constants.dump(),
            geometry: setup.geometry,
            materials: setup.materials.clone(),
            threshold_natural_ev3: setup.threshold_natural,
            mass_grid: *grid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCurve {
    /// eV, strictly increasing.
    pub masses: Vec<f64>,
    /// Upper bounds on g^2/4pi, nondecreasing in mass.
    pub bounds: Vec<f64>,
    pub regime: Regime,
    pub provenance: Provenance,
}

impl ConstraintCurve {
    pub fn check_monotone(&self) -> Result<()> {
        if self.masses.len() != self.bounds.len() {
            return Err(Error::Usage("masses and bounds differ in length".into()));
        }
        for i in 1..self.masses.len() {
            if self.masses[i] <= self.masses[i - 1] || self.bounds[i] < self.bounds[i - 1] {
                return Err(Error::NotMonotone {
                    mass: self.masses[i],
                });
            }
        }
        Ok(())
    }
}

/// One row of a long-format comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlayRow {
    pub series: String,
    pub m_a_ev: f64,
    pub g2_over_4pi: f64,
}

#[derive(Debug, Deserialize)]
struct ReferenceRecord {
    #[serde(default)]
    series: Option<String>,
    m_a: f64,
    unit: String,
    g2_over_4pi: f64,
}

/// Mass unit multiplier to eV.
pub fn mass_unit_to_ev(unit: &str) -> Option<f64> {
    match unit.trim() {
        "eV" => Some(1.0),
        "meV" => Some(1e-3),
        "µeV" | "μeV" | "ueV" => Some(1e-6),
        _ => None,
    }
}

/// Reads a reference curve: CSV with columns `m_a`, `unit` (eV, meV or
/// µeV) and `g2_over_4pi`, plus an optional `series` label that otherwise
/// defaults to the file stem. Values are passed through unchanged apart
/// from the mass unit.
pub fn read_reference(path: &Path) -> Result<Vec<OverlayRow>> {
    let schema = |reason: String| Error::Schema {
        path: PathBuf::from(path),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    for required in ["m_a", "unit", "g2_over_4pi"] {
        if !headers.iter().any(|h| h == required) {
            return Err(schema(format!("missing column {required:?}")));
        }
    }
    if let Some(extra) = headers
        .iter()
        .find(|h| !["series", "m_a", "unit", "g2_over_4pi"].contains(h))
    {
        return Err(schema(format!("unexpected column {extra:?}")));
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "reference".into());
    let mut rows = Vec::new();
    for (line, record) in reader.deserialize::<ReferenceRecord>().enumerate() {
        let record = record.map_err(|e| schema(format!("row {}: {e}", line + 2)))?;
        let factor = mass_unit_to_ev(&record.unit).ok_or_else(|| {
            schema(format!(
                "row {}: unknown mass unit {:?}",
                line + 2,
                record.unit
            ))
        })?;
        rows.push(OverlayRow {
            series: record.series.unwrap_or_else(|| stem.clone()),
            m_a_ev: record.m_a * factor,
            g2_over_4pi: record.g2_over_4pi,
        });
    }
    Ok(rows)
}

/// Our curves followed by every reference file, in argument order.
pub fn overlay_export(
    curves: &[ConstraintCurve],
    reference_files: &[PathBuf],
) -> Result<Vec<OverlayRow>> {
    let mut rows: Vec<OverlayRow> = curves
        .iter()
        .flat_map(|c| {
            let series = format!("this_work_{}", c.regime);
            c.masses
                .iter()
                .zip(&c.bounds)
                .map(move |(&m, &b)| OverlayRow {
                    series: series.clone(),
                    m_a_ev: m,
                    g2_over_4pi: b,
                })
        })
        .collect();
    for path in reference_files {
        rows.extend(read_reference(path)?);
    }
    Ok(rows)
}

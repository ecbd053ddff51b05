//! Subcommand bodies shared by the binary and the acceptance runner. Each
//! returns the files it wrote; nothing here depends on wall-clock time or
//! evaluation order, so identical configs give byte-identical files.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::axion::{self, Couplings, Geometry, MaterialSet};
use crate::config::RunConfig;
use crate::constraint::{overlay_export, ConstraintSetup, MassGrid, Regime};
use crate::error::{Error, Result};
use crate::io::{curves_csv, json_bytes, overlay_csv, spectrum_csv, write_atomic};
use crate::metrology::{self, DetectionMode, NoiseReport};
use crate::optomech::{self, PeakReport, DEFAULT_WINDOW};
use crate::units::PhysConstants;

pub const DEFAULT_OFFSETS: [f64; 3] = [-10.0, 0.0, 10.0];

/// Coarse samples across the 200 Hz window.
pub const DEFAULT_N_COARSE: usize = 2001;

#[derive(Debug, Clone, Serialize)]
pub struct PeakEntry {
    pub omega_m_offset_hz: f64,
    pub spectrum_file: String,
    /// Absent when the window does not contain the resonance.
    pub peak: Option<PeakReport>,
}

pub fn spectrum_file_name(offset: f64) -> String {
    format!("spectrum_offset_{offset}.csv")
}

/// One spectrum CSV per mechanical offset omega_m - omega0, plus `peaks.json`.
pub fn spectrum(
    cfg: &RunConfig,
    offsets: &[f64],
    n_coarse: usize,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    if offsets.is_empty() {
        return Err(Error::Usage(
            "at least one omega_m offset is required".into(),
        ));
    }
    if offsets.iter().any(|x| !x.is_finite()) {
        return Err(Error::Usage("offsets must be finite".into()));
    }
    let mut files = Vec::new();
    let mut peaks = Vec::new();
    for &offset in offsets {
        let p = cfg.optomech.with_mechanical_offset(offset);
        let s = optomech::scan_spectrum(&p, DEFAULT_WINDOW, n_coarse)?;
        let name = spectrum_file_name(offset);
        let path = out.join(&name);
        write_atomic(&path, &spectrum_csv(&s)?)?;
        files.push(path);
        let peak = if s.peak_in_window {
            Some(optomech::locate_peak_in(&p, DEFAULT_WINDOW)?)
        } else {
            None
        };
        peaks.push(PeakEntry {
            omega_m_offset_hz: offset,
            spectrum_file: name,
            peak,
        });
    }
    let path = out.join("peaks.json");
    write_atomic(&path, &json_bytes(&peaks)?)?;
    files.push(path);
    Ok(files)
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseFloorReport {
    pub linewidth: NoiseReport,
    pub thermal: NoiseReport,
    /// Mode used for thresholds elsewhere in the run.
    pub selected: DetectionMode,
}

pub fn noise_floor_report(cfg: &RunConfig) -> Result<NoiseFloorReport> {
    let k = cfg.constants();
    let m_s = cfg.optomech.m_s;
    Ok(NoiseFloorReport {
        linewidth: metrology::noise_report(DetectionMode::Linewidth, &cfg.noise, m_s, &k)?,
        thermal: metrology::noise_report(DetectionMode::Thermal, &cfg.noise, m_s, &k)?,
        selected: cfg.detection,
    })
}

pub fn noise_floor(cfg: &RunConfig, out: &Path) -> Result<(NoiseFloorReport, Vec<PathBuf>)> {
    let report = noise_floor_report(cfg)?;
    let path = out.join("noise_floor.json");
    write_atomic(&path, &json_bytes(&report)?)?;
    Ok((report, vec![path]))
}

fn selected_threshold(cfg: &RunConfig) -> Result<NoiseReport> {
    metrology::noise_report(
        cfg.detection,
        &cfg.noise,
        cfg.optomech.m_s,
        &cfg.constants(),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct ForceGradientReport {
    pub couplings: Couplings,
    /// eV^-1
    pub integral_i: f64,
    pub integral_error: f64,
    pub gradient_al_ev3: f64,
    pub gradient_au_ev3: f64,
    pub differential_ev3: f64,
    pub differential_si_n_per_m: f64,
    pub delta_omega_hz: f64,
    pub delta_omega_min_hz: f64,
    pub detectable: bool,
}

pub fn force_gradient_report(cfg: &RunConfig) -> Result<ForceGradientReport> {
    let k = cfg.constants();
    let geo = cfg.geometry_natural()?;
    let mats = cfg.materials()?;
    let c = cfg.couplings;
    c.validate()?;
    let i = axion::integral_i(&geo, c.m_a)?;
    let al = axion::force_gradient_with_integral(&mats.al, &mats.sphere, &c, i.value, &k);
    let au = axion::force_gradient_with_integral(&mats.au, &mats.sphere, &c, i.value, &k);
    let diff = axion::differential_with_integral(&c, &mats.al, &mats.au, &mats.sphere, i.value, &k);
    let diff_si = k.force_gradient_natural_to_si(diff);
    let min = selected_threshold(cfg)?.delta_omega_min_hz;
    let shift = metrology::assess_shift(diff_si, min, cfg.optomech.m_s, cfg.optomech.omega0, &k)?;
    Ok(ForceGradientReport {
        couplings: c,
        integral_i: i.value,
        integral_error: i.error,
        gradient_al_ev3: al,
        gradient_au_ev3: au,
        differential_ev3: diff,
        differential_si_n_per_m: diff_si,
        delta_omega_hz: shift.delta_omega,
        delta_omega_min_hz: min,
        detectable: shift.detectable,
    })
}

pub fn force_gradient(cfg: &RunConfig, out: &Path) -> Result<(ForceGradientReport, Vec<PathBuf>)> {
    let report = force_gradient_report(cfg)?;
    let path = out.join("force_gradient.json");
    write_atomic(&path, &json_bytes(&report)?)?;
    Ok((report, vec![path]))
}

#[derive(Debug, Clone, Serialize)]
struct ConstrainProvenance<'a> {
    tool_version: &'static str,
    regimes: &'a [Regime],
    detection: &'a NoiseReport,
    constants: serde_json::Value,
    geometry_si_m: &'a crate::config::GeometrySi,
    geometry_natural_inv_ev: &'a Geometry,
    materials: &'a MaterialSet,
    mass_grid: &'a MassGrid,
    optomech_m_s_kg: f64,
    optomech_omega0_hz: f64,
}

pub fn constraint_setup(cfg: &RunConfig) -> Result<ConstraintSetup> {
    let k: PhysConstants = cfg.constants();
    Ok(ConstraintSetup {
        geometry: cfg.geometry_natural()?,
        materials: cfg.materials()?,
        threshold_natural: selected_threshold(cfg)?.threshold_natural_ev3,
        constants: k,
    })
}

/// `constraints.csv` with one block per regime, its provenance sidecar, and
/// `overlay.csv` when reference curves are given.
pub fn constrain(cfg: &RunConfig, references: &[PathBuf], out: &Path) -> Result<Vec<PathBuf>> {
    let setup = constraint_setup(cfg)?;
    let threshold = selected_threshold(cfg)?;
    let curves = setup.curves(&cfg.regimes, &cfg.mass_grid)?;

    let mut files = Vec::new();
    let path = out.join("constraints.csv");
    write_atomic(&path, &curves_csv(&curves)?)?;
    files.push(path);

    let provenance = ConstrainProvenance {
        tool_version: env!("CARGO_PKG_VERSION"),
        regimes: &cfg.regimes,
        detection: &threshold,
        constants: setup.constants.dump(),
        geometry_si_m: &cfg.geometry,
        geometry_natural_inv_ev: &setup.geometry,
        materials: &setup.materials,
        mass_grid: &cfg.mass_grid,
        optomech_m_s_kg: cfg.optomech.m_s,
        optomech_omega0_hz: cfg.optomech.omega0,
    };
    let path = out.join("constraints.provenance.json");
    write_atomic(&path, &json_bytes(&provenance)?)?;
    files.push(path);

    if !references.is_empty() {
        let rows = overlay_export(&curves, references)?;
        let path = out.join("overlay.csv");
        write_atomic(&path, &overlay_csv(&rows)?)?;
        files.push(path);
    }
    Ok(files)
}

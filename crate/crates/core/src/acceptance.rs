//! The acceptance suite: one check per criterion, each reporting pass or
//! fail with the measured quantity. Run from `axion-optomech check`, the
//! `--check` flag, and the `acceptance` test target.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::axion::{self, bessel_k1, phi, Couplings, Geometry, MaterialSet, NucleonPair};
use crate::commands;
use crate::config::RunConfig;
use crate::constraint::{ConstraintSetup, MassGrid, Regime};
use crate::metrology::{self, NoiseParams, NOMINAL_SPHERE_MASS_KG};
use crate::optomech::{self, OptomechParams, DEFAULT_WINDOW};
use crate::units::PhysConstants;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

type Check = fn() -> Result<String, String>;

pub const CRITERIA: [(u32, &str, Check); 10] = [
    (1, "thermal noise floor", noise_floor),
    (2, "threshold chain", threshold_chain),
    (3, "spectrum peaks", spectrum_peaks),
    (4, "baseline unitarity", baseline_unitarity),
    (5, "steady-state residual", steady_state_residual),
    (6, "quadrature oracle equivalence", quadrature_equivalence),
    (7, "exclusion-curve properties", exclusion_curves),
    (8, "trivial limits", trivial_limits),
    (9, "determinism", determinism),
    (10, "Bessel K1 accuracy", bessel_accuracy),
];

pub fn run(id: u32, name: &'static str, check: Check) -> Outcome {
    let start = Instant::now();
    let result = check();
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome {
        id,
        name,
        passed,
        detail,
        seconds,
    }
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA
        .iter()
        .map(|&(id, name, check)| run(id, name, check))
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn require(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn noise_floor() -> Result<String, String> {
    let k = PhysConstants::nominal();
    let v = metrology::thermal_noise_floor(&NoiseParams::nominal(), &k).map_err(err)?;
    let r = rel(v, 3.6253e-8);
    require(
        r < 1e-4,
        format!("{v:.6e} Hz, rel. deviation {r:.2e} (tol 1e-4)"),
    )
}

fn threshold_chain() -> Result<String, String> {
    let k = PhysConstants::nominal();
    let t = metrology::gradient_threshold(3e-8, NOMINAL_SPHERE_MASS_KG, 1e5, &k).map_err(err)?;
    let (r_si, r_nat) = (rel(t.si, 6.2832e-23), rel(t.natural, 1.5276e-17));
    require(
        r_si < 1e-4 && r_nat < 1e-3,
        format!(
            "{:.6e} kg/s^2 (rel {r_si:.2e}, tol 1e-4); {:.6e} eV^3 (rel {r_nat:.2e}, tol 1e-3)",
            t.si, t.natural
        ),
    )
}

fn spectrum_peaks() -> Result<String, String> {
    let base = OptomechParams::nominal();
    let mut worst_center = 0.0f64;
    let mut widths = Vec::new();
    let mut ok = true;
    for offset in [-10.0, 0.0, 10.0] {
        let p = base.with_mechanical_offset(offset);
        let r = optomech::locate_peak(&p).map_err(err)?;
        let dc = (r.center_hz - offset).abs() / p.gamma_m;
        worst_center = worst_center.max(dc);
        ok &= dc <= 1e-3 && (2.7e-8..=4.0e-8).contains(&r.fwhm_hz);
        widths.push(r.fwhm_hz);
    }
    require(
        ok,
        format!(
            "max |center - offset| = {worst_center:.2e} gamma_m (tol 1e-3); FWHM {:.4e}, {:.4e}, {:.4e} Hz (band [2.7e-8, 4.0e-8])",
            widths[0], widths[1], widths[2]
        ),
    )
}

fn baseline_unitarity() -> Result<String, String> {
    let base = OptomechParams::nominal();
    let mut worst = 0.0f64;
    let mut samples = 0usize;
    for offset in [-10.0, 0.0, 10.0] {
        let p = base.with_mechanical_offset(offset);
        let s = optomech::scan_spectrum(&p, DEFAULT_WINDOW, 20001).map_err(err)?;
        for (x, t) in s.offsets.iter().zip(&s.transmission) {
            if (x - offset).abs() > 1.0 {
                worst = worst.max((t - 1.0).abs());
                samples += 1;
            }
        }
    }
    require(
        worst < 1e-6,
        format!("max ||t|^2 - 1| = {worst:.2e} over {samples} samples (tol 1e-6)"),
    )
}

fn steady_state_residual() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| 10f64.powf(rng.random_range(lo..hi));
    let mut worst = 0.0f64;
    let mut multi = 0;
    for draw in 0..100 {
        let kappa = log_uniform(&mut rng, 3.0, 7.0);
        let omega_m = log_uniform(&mut rng, 3.0, 6.0);
        let mut p = OptomechParams {
            omega0: omega_m,
            omega_m,
            kappa,
            gamma_m: log_uniform(&mut rng, -8.0, -2.0),
            detuning: kappa * rng.random_range(-6.0..6.0),
            g: log_uniform(&mut rng, 0.0, 4.0),
            e_pu: kappa * log_uniform(&mut rng, -4.0, 1.0),
            ..OptomechParams::nominal()
        };
        if draw % 2 == 1 {
            // Drive chosen between the turning points of E^2(sigma), which
            // puts three roots on the cubic.
            p.detuning = kappa * rng.random_range(2.0..6.0);
            let alpha = 2.0 * p.g * p.g / p.omega_m;
            let root = (p.detuning * p.detuning - 3.0 * kappa * kappa).sqrt();
            let s1 = (2.0 * p.detuning - root) / (3.0 * alpha);
            let s2 = (2.0 * p.detuning + root) / (3.0 * alpha);
            let s = rng.random_range(s1..s2);
            let bracket = kappa * kappa + (p.detuning - alpha * s).powi(2);
            p.e_pu = (bracket * s).sqrt();
        }
        let s = optomech::steady_state(&p).map_err(err)?;
        worst = worst.max(s.relative_residual(&p));
        multi += s.multi_root as usize;
    }
    let linear = OptomechParams {
        g: 0.0,
        ..OptomechParams::nominal()
    };
    let sigma = optomech::steady_state_intensity(&linear).map_err(err)?;
    let exact = linear.e_pu * linear.e_pu / (linear.kappa * linear.kappa);
    let r_lin = rel(sigma, exact);
    require(
        worst < 1e-12 && r_lin <= 1e-14,
        format!("max residual {worst:.2e} over 100 draws ({multi} bistable) (tol 1e-12); g = 0 limit rel {r_lin:.1e} (tol 1e-14)"),
    )
}

fn nominal_geometry() -> Geometry {
    Geometry::nominal(&PhysConstants::nominal())
}

fn quadrature_equivalence() -> Result<String, String> {
    let geo = nominal_geometry();
    let grid = MassGrid {
        lo: 1e-10,
        hi: 20.0,
        points_per_decade: 5,
    };
    let masses = grid.masses().map_err(err)?;
    let mut worst = (0.0f64, 0.0);
    for &m in &masses {
        let a = axion::integral_i(&geo, m).map_err(err)?.value;
        let b = axion::integral_i_cosh(&geo, m).map_err(err)?;
        let r = rel(a, b);
        if r > worst.0 {
            worst = (r, m);
        }
    }
    require(
        worst.0 < 1e-8,
        format!(
            "max rel. disagreement {:.2e} at m_a = {:.2e} eV over {} masses (tol 1e-8)",
            worst.0,
            worst.1,
            masses.len()
        ),
    )
}

fn exclusion_curves() -> Result<String, String> {
    let k = PhysConstants::nominal();
    let setup = ConstraintSetup {
        geometry: Geometry::nominal(&k),
        materials: MaterialSet::nominal(),
        threshold_natural: 1.5276e-17,
        constants: k,
    };
    let grid = MassGrid {
        lo: 1e-10,
        hi: 20.0,
        points_per_decade: 10,
    };
    let curves = setup.curves(&Regime::ALL, &grid).map_err(err)?;
    let (p, n, e) = (&curves[0], &curves[1], &curves[2]);

    let flat: Vec<f64> = e
        .masses
        .iter()
        .zip(&e.bounds)
        .filter(|(m, _)| **m <= 1e-9)
        .map(|(_, b)| *b)
        .collect();
    let spread = flat.iter().cloned().fold(f64::MIN, f64::max)
        / flat.iter().cloned().fold(f64::MAX, f64::min)
        - 1.0;
    let monotone = curves.iter().all(|c| c.check_monotone().is_ok());
    let below = (0..e.bounds.len()).all(|i| e.bounds[i] < p.bounds[i].min(n.bounds[i]));

    let mut sqrt_dev = 0.0f64;
    for m in [1e-10, 1e-5, 1e-2, 0.3, 5.0] {
        let i = axion::integral_i(&setup.geometry, m).map_err(err)?.value;
        let quad = ConstraintSetup {
            threshold_natural: 4.0 * setup.threshold_natural,
            ..setup.clone()
        };
        for r in Regime::ALL {
            let ratio = quad.bound_with_integral(r, i) / setup.bound_with_integral(r, i);
            sqrt_dev = sqrt_dev.max((ratio - 2.0).abs() / 2.0);
        }
    }

    let m = &setup.materials;
    let plate = rel(
        Regime::Equal.plate_factor(m),
        Regime::ProtonDominant.plate_factor(m) + Regime::NeutronDominant.plate_factor(m),
    );
    let sphere = rel(
        Regime::Equal.sphere_factor(m),
        Regime::ProtonDominant.sphere_factor(m) + Regime::NeutronDominant.sphere_factor(m),
    );
    let identity = plate.max(sphere);

    require(
        spread < 1e-2 && monotone && below && sqrt_dev < 1e-10 && identity < 1e-12,
        format!(
            "plateau spread {spread:.2e} (tol 1e-2); monotone {monotone}; equal lowest {below}; \
             sqrt(threshold) dev {sqrt_dev:.1e} (tol 1e-10); bracket identity {identity:.1e} (tol 1e-12); \
             equal-regime plateau {:.4e}",
            e.bounds[0]
        ),
    )
}

fn trivial_limits() -> Result<String, String> {
    let k = PhysConstants::nominal();
    let mut worst = 0.0f64;
    for z in [1e-9, 1e-3, 1.0, 1e3] {
        worst = worst.max(phi(0.0, z).map_err(err)?.abs());
    }
    let mut flat = nominal_geometry();
    flat.width = 0.0;
    for m in [1e-10, 1e-3, 1.0] {
        worst = worst.max(axion::integral_i(&flat, m).map_err(err)?.value.abs());
    }
    let zero = Couplings {
        m_a: 1.0,
        gp2_over_4pi: 0.0,
        gn2_over_4pi: 1.0,
    };
    for pair in [NucleonPair::ProtonProton, NucleonPair::ProtonNeutron] {
        worst = worst.max(
            axion::two_axion_potential(1.0, &zero, pair, &k)
                .map_err(err)?
                .abs(),
        );
    }
    for x in [1e-25, 6.2832e-23, 3e-21] {
        let one = metrology::resonance_shift(x, NOMINAL_SPHERE_MASS_KG, 1e5).map_err(err)?;
        let two = metrology::resonance_shift(2.0 * x, NOMINAL_SPHERE_MASS_KG, 1e5).map_err(err)?;
        worst = worst.max(rel(two, 2.0 * one));
    }
    require(
        worst <= 1e-14,
        format!("max deviation {worst:.1e} (tol 1e-14)"),
    )
}

fn determinism() -> Result<String, String> {
    let cfg = RunConfig::default();
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut files = commands::constrain(&cfg, &[], dir.path()).map_err(err)?;
        files.extend(
            commands::spectrum(&cfg, &[10.0], commands::DEFAULT_N_COARSE, dir.path())
                .map_err(err)?,
        );
        let run: Vec<(String, Vec<u8>)> = files
            .iter()
            .filter(|f| f.extension().is_some_and(|e| e == "csv"))
            .map(|f| {
                let name = f.file_name().unwrap().to_string_lossy().into_owned();
                std::fs::read(f)
                    .map(|b| (name, b))
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?;
        bytes.push(run);
    }
    let names: Vec<&str> = bytes[0].iter().map(|(n, _)| n.as_str()).collect();
    require(
        bytes[0] == bytes[1],
        format!(
            "{} byte-identical across two runs: {}",
            if bytes[0] == bytes[1] { "all" } else { "NOT" },
            names.join(", ")
        ),
    )
}

/// K1(x) = int_0^inf e^{-x cosh t} cosh t dt by the trapezoid rule with step
/// 1/20; geometric convergence since the integrand is analytic in a strip.
fn k1_integral(x: f64) -> f64 {
    let h = 0.05;
    let mut sum = 0.5;
    let mut j = 1;
    loop {
        let t = j as f64 * h;
        let term = (-x * (t.cosh() - 1.0)).exp() * t.cosh();
        sum += term;
        if term < 1e-20 * sum {
            break;
        }
        j += 1;
    }
    sum * h * (-x).exp()
}

fn bessel_accuracy() -> Result<String, String> {
    let mut worst = (0.0f64, 0.0);
    for j in 0..=160 {
        let x = 10f64.powf(-6.0 + j as f64 / 20.0);
        let r = rel(bessel_k1(x).map_err(err)?, k1_integral(x));
        if r > worst.0 {
            worst = (r, x);
        }
    }
    require(
        worst.0 < 1e-10,
        format!(
            "max rel. error {:.2e} at x = {:.3e} over 161 points in [1e-6, 100] (tol 1e-10)",
            worst.0, worst.1
        ),
    )
}

//! Mean-field steady state of the pumped cavity and the probe transmission
//! spectrum of the levitated sphere.
//!
//! Frequencies follow one convention throughout: every rate and detuning is
//! a plain number labelled "Hz" and no factor of 2 pi is inserted anywhere,
//! so gamma_m = omega0 / Q holds literally.
//!
//! The mechanical line is ~1e-8 Hz wide while spectra span hundreds of Hz,
//! so probe detunings are handled as offsets from omega0 and the small
//! difference omega_m - delta is formed from offsets before it meets any
//! 1e5-sized number.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Probe window of the reproduced transmission figure, Hz relative to omega0.
pub const DEFAULT_WINDOW: (f64, f64) = (-100.0, 100.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptomechParams {
    /// Unperturbed mechanical resonance.
    pub omega0: f64,
    /// Actual mechanical resonance.
    pub omega_m: f64,
    /// Cavity amplitude decay rate.
    pub kappa: f64,
    /// Mechanical damping rate.
    pub gamma_m: f64,
    /// Pump detuning omega_c - omega_pu.
    pub detuning: f64,
    /// Single-photon optomechanical coupling.
    pub g: f64,
    pub e_pu: f64,
    pub e_pr: f64,
    /// Mechanical quality factor.
    pub q: f64,
    /// Sphere mass, kg.
    pub m_s: f64,
}

impl OptomechParams {
    /// Parameters of the reproduced transmission figure with omega_m = omega0.
    pub fn nominal() -> Self {
        let omega0 = 1e5;
        let q = 3e12;
        OptomechParams {
            omega0,
            omega_m: omega0,
            kappa: 1e6,
            gamma_m: omega0 / q,
            detuning: 0.0,
            g: 200.0,
            e_pu: 1e3,
            e_pr: 100.0,
            q,
            m_s: crate::metrology::NOMINAL_SPHERE_MASS_KG,
        }
    }

    /// Sets Q and recomputes gamma_m = omega0 / Q.
    pub fn with_quality_factor(mut self, q: f64) -> Self {
        self.q = q;
        self.gamma_m = self.omega0 / q;
        self
    }

    /// Places the mechanical resonance at omega0 + offset.
    pub fn with_mechanical_offset(mut self, offset: f64) -> Self {
        self.omega_m = self.omega0 + offset;
        self
    }

    /// omega_m - omega0, where the transmission feature sits.
    pub fn resonance_offset(&self) -> f64 {
        self.omega_m - self.omega0
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(
            "optomechanical parameters",
            &[
                self.omega0,
                self.omega_m,
                self.kappa,
                self.gamma_m,
                self.detuning,
                self.g,
                self.e_pu,
                self.e_pr,
                self.q,
                self.m_s,
            ],
        )?;
        let positive = [
            ("kappa", self.kappa),
            ("gamma_m", self.gamma_m),
            ("omega_m", self.omega_m),
            ("omega0", self.omega0),
            ("q", self.q),
            ("m_s", self.m_s),
        ];
        for (what, v) in positive {
            if v <= 0.0 {
                return Err(Error::domain(what, v, "must be positive"));
            }
        }
        for (what, v) in [("e_pu", self.e_pu), ("e_pr", self.e_pr)] {
            if v < 0.0 {
                return Err(Error::domain(what, v, "must be nonnegative"));
            }
        }
        Ok(())
    }
}

impl Default for OptomechParams {
    fn default() -> Self {
        Self::nominal()
    }
}

/// Solution of |E_pu|^2 = [kappa^2 + (Delta - 2 g^2 sigma / omega_m)^2] sigma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    /// Intracavity intensity |a0|^2; the smallest nonnegative root.
    pub sigma: f64,
    /// More than one positive root exists (bistable drive).
    pub multi_root: bool,
}

impl SteadyState {
    /// |E_pu^2 - [kappa^2 + (Delta - 2 g^2 sigma/omega_m)^2] sigma| / E_pu^2.
    pub fn relative_residual(&self, p: &OptomechParams) -> f64 {
        let e2 = p.e_pu * p.e_pu;
        if e2 == 0.0 {
            return self.sigma.abs();
        }
        (intensity_balance(p, self.sigma) - e2).abs() / e2
    }
}

fn intensity_balance(p: &OptomechParams, sigma: f64) -> f64 {
    let shift = p.detuning - 2.0 * p.g * p.g * sigma / p.omega_m;
    (p.kappa * p.kappa + shift * shift) * sigma
}

pub fn steady_state_intensity(p: &OptomechParams) -> Result<f64> {
    steady_state(p).map(|s| s.sigma)
}

pub fn steady_state(p: &OptomechParams) -> Result<SteadyState> {
    p.validate()?;
    let e2 = p.e_pu * p.e_pu;
    if e2 == 0.0 {
        return Ok(SteadyState {
            sigma: 0.0,
            multi_root: false,
        });
    }
    let alpha = 2.0 * p.g * p.g / p.omega_m;
    let k2 = p.kappa * p.kappa;
    if alpha == 0.0 {
        return Ok(SteadyState {
            sigma: e2 / (k2 + p.detuning * p.detuning),
            multi_root: false,
        });
    }

    // f(s) = a^2 s^3 - 2 Delta a s^2 + (k^2 + Delta^2) s - E^2; every root
    // lies in (0, E^2/k^2] because the bracket is at least k^2.
    let f = |s: f64| intensity_balance(p, s) - e2;
    let upper = e2 / k2;

    // Split at the turning points of f so that each piece is monotone.
    let mut knots = vec![0.0];
    let delta = p.detuning;
    let disc = delta * delta - 3.0 * k2;
    if delta > 0.0 && disc > 0.0 {
        let root = 2.0 * alpha * disc.sqrt();
        for s in [
            (4.0 * delta * alpha - root) / (6.0 * alpha * alpha),
            (4.0 * delta * alpha + root) / (6.0 * alpha * alpha),
        ] {
            if s > 0.0 && s < upper {
                knots.push(s);
            }
        }
    }
    knots.push(upper);

    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() {
            roots.push(bisect(&f, a, b, fa));
        }
    }
    if f(upper) == 0.0 {
        roots.push(upper);
    }
    roots.dedup();
    match roots.iter().copied().find(|&s| s > 0.0) {
        Some(sigma) => Ok(SteadyState {
            sigma,
            multi_root: roots.iter().filter(|&&s| s > 0.0).count() > 1,
        }),
        None => Err(Error::NoPositiveRoot {
            residual: f(upper).abs() / e2,
        }),
    }
}

/// Bisects a sign change down to adjacent floats and returns the endpoint
/// with the smaller residual.
fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    let mut fb = f(b);
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    if fa.abs() <= fb.abs() {
        a
    } else {
        b
    }
}

/// Intermediate coefficients of the probe sideband solution. K4 is real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KCoefficients {
    pub k1: Complex64,
    pub k2: Complex64,
    pub k3: Complex64,
    pub k4: f64,
}

impl KCoefficients {
    /// `mech_detuning` is omega_m - delta, supplied separately so that it
    /// keeps full precision near the mechanical line.
    pub fn new(p: &OptomechParams, delta: f64, mech_detuning: f64, sigma: f64) -> Self {
        let spring = 2.0 * p.g * p.g * sigma / p.omega_m;
        KCoefficients {
            k1: Complex64::new(mech_detuning * (p.omega_m + delta), -delta * p.gamma_m),
            k2: Complex64::new(-p.kappa, delta + p.detuning - spring),
            k3: Complex64::new(p.kappa, -delta + p.detuning - spring),
            k4: 2.0 * p.g * p.g * sigma * p.omega_m,
        }
    }

    /// a_plus / E_pr.
    ///
    /// The closed form E_pr K1 (K1 K2 - i K4) / [(K1 K3 - i K4)(K1 K2 - i K4) + K4^2]
    /// carries a common factor K1 between numerator and denominator; it is
    /// cancelled here, which removes the K4^2 cancellation in the denominator
    /// and keeps the expression finite where K1 vanishes.
    pub fn response(&self) -> Option<Complex64> {
        let i = Complex64::i();
        let num = self.k1 * self.k2 - i * self.k4;
        let den = self.k1 * self.k2 * self.k3 - i * self.k4 * (self.k2 + self.k3);
        if den.norm() == 0.0 || !den.is_finite() {
            None
        } else {
            Some(num / den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandSolution {
    pub sigma: f64,
    pub k: KCoefficients,
    pub a_plus: Complex64,
}

/// Upper probe sideband amplitude a_plus at absolute probe detuning `delta`.
pub fn probe_sideband(p: &OptomechParams, delta: f64, sigma: f64) -> Result<SidebandSolution> {
    sideband(p, delta, p.omega_m - delta, sigma)
}

fn sideband(
    p: &OptomechParams,
    delta: f64,
    mech_detuning: f64,
    sigma: f64,
) -> Result<SidebandSolution> {
    let k = KCoefficients::new(p, delta, mech_detuning, sigma);
    let response = k.response().ok_or(Error::Pole { delta })?;
    Ok(SidebandSolution {
        sigma,
        k,
        a_plus: p.e_pr * response,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission {
    pub t: Complex64,
    /// |t|^2
    pub power: f64,
}

/// t = 1 - 2 kappa a_plus / E_pr at absolute probe detuning `delta`.
pub fn transmission(p: &OptomechParams, delta: f64) -> Result<Transmission> {
    let sigma = steady_state(p)?.sigma;
    transmission_at(p, delta, p.omega_m - delta, sigma)
}

/// Transmission at probe offset delta - omega0 for a precomputed sigma.
pub fn transmission_at_offset(p: &OptomechParams, offset: f64, sigma: f64) -> Result<Transmission> {
    let mech = p.resonance_offset() - offset;
    transmission_at(p, p.omega0 + offset, mech, sigma)
}

fn transmission_at(
    p: &OptomechParams,
    delta: f64,
    mech_detuning: f64,
    sigma: f64,
) -> Result<Transmission> {
    if p.e_pr <= 0.0 {
        return Err(Error::domain("e_pr", p.e_pr, "transmission needs a probe"));
    }
    let k = KCoefficients::new(p, delta, mech_detuning, sigma);
    let response = k.response().ok_or(Error::Pole { delta })?;
    let t = Complex64::new(1.0, 0.0) - 2.0 * p.kappa * response;
    Ok(Transmission {
        t,
        power: t.norm_sqr(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    /// Half-width of the refined cluster, in units of gamma_m.
    pub half_width: f64,
    /// Samples per gamma_m inside the cluster.
    pub per_linewidth: u32,
}

impl Default for Refinement {
    fn default() -> Self {
        Refinement {
            half_width: 5.0,
            per_linewidth: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// delta - omega0, strictly increasing.
    pub offsets: Vec<f64>,
    /// |t|^2 at each offset.
    pub transmission: Vec<f64>,
    pub params: OptomechParams,
    /// False when the window does not contain omega_m - omega0.
    pub peak_in_window: bool,
}

pub fn scan_spectrum(p: &OptomechParams, window: (f64, f64), n_coarse: usize) -> Result<Spectrum> {
    scan_spectrum_with(p, window, n_coarse, Refinement::default())
}

/// Uniform coarse grid over `window` plus a cluster of samples on the
/// lattice `omega_m - omega0 + k gamma_m / per_linewidth`.
pub fn scan_spectrum_with(
    p: &OptomechParams,
    window: (f64, f64),
    n_coarse: usize,
    refinement: Refinement,
) -> Result<Spectrum> {
    let (lo, hi) = window;
    ensure_finite("spectrum window", &[lo, hi])?;
    if lo >= hi {
        return Err(Error::Usage(format!("empty spectrum window [{lo}, {hi}]")));
    }
    if n_coarse < 100 {
        return Err(Error::Usage(format!(
            "n_coarse must be at least 100, got {n_coarse}"
        )));
    }
    if refinement.per_linewidth == 0 || refinement.half_width <= 0.0 {
        return Err(Error::Usage("refinement must be positive".into()));
    }
    let sigma = steady_state(p)?.sigma;

    let step = (hi - lo) / (n_coarse - 1) as f64;
    let mut offsets: Vec<f64> = (0..n_coarse)
        .map(|i| {
            if i == n_coarse - 1 {
                hi
            } else {
                lo + i as f64 * step
            }
        })
        .collect();

    let center = p.resonance_offset();
    let peak_in_window = (lo..=hi).contains(&center);
    if peak_in_window {
        let fine = p.gamma_m / refinement.per_linewidth as f64;
        let n = (refinement.half_width * refinement.per_linewidth as f64).ceil() as i64;
        offsets.extend(
            (-n..=n)
                .map(|k| center + k as f64 * fine)
                .filter(|x| (lo..=hi).contains(x)),
        );
    }
    offsets.sort_by(f64::total_cmp);
    offsets.dedup();

    let transmission = offsets
        .par_iter()
        .map(|&x| transmission_at_offset(p, x, sigma).map(|t| t.power))
        .collect::<Result<Vec<_>>>()?;

    Ok(Spectrum {
        offsets,
        transmission,
        params: *p,
        peak_in_window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub center_hz: f64,
    pub fwhm_hz: f64,
    /// |t|^2 at the center.
    pub height: f64,
}

pub fn locate_peak(p: &OptomechParams) -> Result<PeakReport> {
    locate_peak_in(p, DEFAULT_WINDOW)
}

/// Finds the extremum of ||t|^2 - 1| near omega_m - omega0 and its full
/// width at half of that extremum.
pub fn locate_peak_in(p: &OptomechParams, window: (f64, f64)) -> Result<PeakReport> {
    let (lo, hi) = window;
    let no_peak = Error::NoPeak { lo, hi };
    let sigma = steady_state(p)?.sigma;
    let metric = |x: f64| transmission_at_offset(p, x, sigma).map(|t| (t.power - 1.0).abs());

    let guess = p.resonance_offset();
    if !(lo..=hi).contains(&guess) {
        return Err(no_peak);
    }
    let width = p.gamma_m;
    let tol = 1e-6 * width;

    // Coarse local scan, widened until the maximum sits strictly inside.
    const HALF: i64 = 400;
    let mut span = 50.0 * width;
    let (mut best, mut step) = (guess, 0.0);
    let mut found = false;
    for _ in 0..12 {
        step = span / HALF as f64;
        let samples = (-HALF..=HALF)
            .map(|k| guess + k as f64 * step)
            .filter(|x| (lo..=hi).contains(x))
            .map(|x| metric(x).map(|m| (x, m)))
            .collect::<Result<Vec<_>>>()?;
        let (imax, &(xmax, mmax)) = samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .ok_or(Error::NoPeak { lo, hi })?;
        let edge = samples[0].1.max(samples[samples.len() - 1].1);
        if imax > 0 && imax + 1 < samples.len() && mmax > 2.0 * edge && mmax > 1e-9 {
            best = xmax;
            found = true;
            break;
        }
        span *= 4.0;
    }
    if !found {
        return Err(no_peak);
    }

    let center = golden_max(&metric, best - step, best + step, tol)?;
    let peak = metric(center)?;
    let half = 0.5 * peak;

    let crossing = |dir: f64| -> Result<f64> {
        let mut inner = 0.0;
        let mut outer = 0.5 * width;
        while metric(center + dir * outer)? > half {
            inner = outer;
            outer *= 2.0;
            if center + dir * outer < lo || center + dir * outer > hi {
                return Err(Error::NoPeak { lo, hi });
            }
        }
        while outer - inner > tol {
            let mid = 0.5 * (inner + outer);
            if metric(center + dir * mid)? > half {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        Ok(0.5 * (inner + outer))
    };
    let right = crossing(1.0)?;
    let left = crossing(-1.0)?;

    Ok(PeakReport {
        center_hz: center,
        fwhm_hz: left + right,
        height: transmission_at_offset(p, center, sigma)?.power,
    })
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        if c <= a || d >= b {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn undriven_cavity_is_empty() {
        let p = OptomechParams {
            e_pu: 0.0,
            ..OptomechParams::nominal()
        };
        assert_eq!(steady_state_intensity(&p).unwrap(), 0.0);
    }

    #[test]
    fn linear_cavity_limit() {
        let p = OptomechParams {
            g: 0.0,
            ..OptomechParams::nominal()
        };
        assert_eq!(
            steady_state_intensity(&p).unwrap(),
            p.e_pu * p.e_pu / (p.kappa * p.kappa)
        );
    }

    #[test]
    fn nominal_intensity() {
        let p = OptomechParams::nominal();
        let s = steady_state(&p).unwrap();
        assert!(rel(s.sigma, 1.0e-6) < 1e-9);
        assert!(!s.multi_root);
        assert!(s.relative_residual(&p) < 1e-12);
    }

    #[test]
    fn bistable_drive_flags_multiple_roots() {
        // Delta^2 > 3 kappa^2 with a drive inside the hysteresis window
        let p = OptomechParams {
            kappa: 1.0,
            detuning: 10.0,
            g: 1.0,
            omega_m: 1.0,
            omega0: 1.0,
            e_pu: 5.0,
            ..OptomechParams::nominal()
        };
        let s = steady_state(&p).unwrap();
        assert!(s.multi_root);
        assert!(s.relative_residual(&p) < 1e-12);
        // smallest root: the branch connected to sigma = 0
        let lower = OptomechParams { e_pu: 1.0, ..p };
        assert!(steady_state(&lower).unwrap().sigma < s.sigma);
        assert!(s.sigma < 2.0);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let p = OptomechParams {
            kappa: -1.0,
            ..OptomechParams::nominal()
        };
        assert!(steady_state(&p).is_err());
        let p = OptomechParams {
            g: f64::NAN,
            ..OptomechParams::nominal()
        };
        assert!(matches!(steady_state(&p), Err(Error::NonFinite(_))));
    }

    #[test]
    fn uncoupled_sideband_is_bare_cavity() {
        let p = OptomechParams {
            g: 0.0,
            detuning: 3e5,
            ..OptomechParams::nominal()
        };
        let sigma = steady_state_intensity(&p).unwrap();
        for delta in [0.0, 5e4, 1e5, 2e6] {
            let a = probe_sideband(&p, delta, sigma).unwrap().a_plus;
            let expected = p.e_pr / Complex64::new(p.kappa, -delta + p.detuning);
            assert!((a - expected).norm() <= 1e-15 * expected.norm());
        }
    }

    #[test]
    fn no_probe_no_sideband() {
        let p = OptomechParams {
            e_pr: 0.0,
            ..OptomechParams::nominal()
        };
        let a = probe_sideband(&p, p.omega_m, 1e-6).unwrap().a_plus;
        assert_eq!(a, Complex64::new(0.0, 0.0));
        assert!(transmission(&p, p.omega_m).is_err());
    }

    #[test]
    fn on_resonance_bare_cavity_reflects_fully() {
        let p = OptomechParams {
            g: 0.0,
            ..OptomechParams::nominal()
        };
        let t = transmission(&p, 0.0).unwrap();
        assert_eq!(t.t, Complex64::new(-1.0, 0.0));
        assert_eq!(t.power, 1.0);
    }

    #[test]
    fn far_from_line_transmission_is_unity() {
        let p = OptomechParams::nominal();
        let t = transmission(&p, p.omega0 - 50.0).unwrap();
        assert!((t.power - 1.0).abs() < 1e-6);
    }

    #[test]
    fn k4_vanishes_without_coupling() {
        let p = OptomechParams {
            g: 0.0,
            ..OptomechParams::nominal()
        };
        let k = probe_sideband(&p, 1e5, 1e-6).unwrap().k;
        assert_eq!(k.k4, 0.0);
    }

    #[test]
    fn scan_refines_around_the_line() {
        let p = OptomechParams::nominal().with_mechanical_offset(10.0);
        let s = scan_spectrum(&p, DEFAULT_WINDOW, 201).unwrap();
        assert!(s.peak_in_window);
        assert!(s.offsets.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s.offsets.len(), s.transmission.len());
        let inside = s
            .offsets
            .iter()
            .filter(|x| (**x - 10.0).abs() <= p.gamma_m)
            .count();
        assert!(inside >= 20, "{inside} samples within one linewidth");
        let (imax, _) = s
            .transmission
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((s.offsets[imax] - 10.0).abs() <= p.gamma_m);
    }

    #[test]
    fn window_without_line_is_flagged() {
        let p = OptomechParams::nominal().with_mechanical_offset(150.0);
        let s = scan_spectrum(&p, DEFAULT_WINDOW, 101).unwrap();
        assert!(!s.peak_in_window);
        assert_eq!(s.offsets.len(), 101);
        assert!(matches!(locate_peak(&p), Err(Error::NoPeak { .. })));
    }

    #[test]
    fn scan_rejects_bad_grid() {
        let p = OptomechParams::nominal();
        assert!(scan_spectrum(&p, (1.0, -1.0), 200).is_err());
        assert!(scan_spectrum(&p, DEFAULT_WINDOW, 99).is_err());
    }

    #[test]
    fn refinement_doubling_keeps_samples() {
        let p = OptomechParams::nominal().with_mechanical_offset(10.0);
        let coarse = scan_spectrum(&p, DEFAULT_WINDOW, 100).unwrap();
        let fine = scan_spectrum_with(
            &p,
            DEFAULT_WINDOW,
            100,
            Refinement {
                per_linewidth: 40,
                ..Refinement::default()
            },
        )
        .unwrap();
        for (x, t) in coarse.offsets.iter().zip(&coarse.transmission) {
            let j = fine
                .offsets
                .iter()
                .position(|y| y == x)
                .expect("sample kept");
            assert_eq!(fine.transmission[j].to_bits(), t.to_bits());
        }
    }

    #[test]
    fn peak_at_shifted_resonance() {
        let p = OptomechParams::nominal().with_mechanical_offset(10.0);
        let r = locate_peak(&p).unwrap();
        assert!((r.center_hz - p.resonance_offset()).abs() <= 1e-3 * p.gamma_m);
        assert!((r.fwhm_hz - p.gamma_m).abs() <= 0.2 * p.gamma_m);
        assert!(r.height > 1.0);
    }

    #[test]
    fn linewidth_tracks_damping() {
        let p = OptomechParams::nominal();
        let narrow = locate_peak(&p).unwrap().fwhm_hz;
        let wide = locate_peak(&p.with_quality_factor(p.q / 2.0))
            .unwrap()
            .fwhm_hz;
        assert!(rel(wide / narrow, 2.0) < 0.05, "ratio {}", wide / narrow);
    }
}

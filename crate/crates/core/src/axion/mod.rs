//! Two-axion exchange between nucleons and the resulting sphere-plate force
//! gradient. Everything here is in natural units: lengths in eV^-1, masses
//! in eV, densities in MeV^4 (converted to eV^4 where they meet eV-valued
//! quantities).

pub mod bessel;
pub mod quadrature;

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::units::{ConstantsMode, PhysConstants};

pub use bessel::bessel_k1;

const MEV4_TO_EV4: f64 = 1e24;

/// Smallest axion mass the integral is evaluated at, eV.
pub const MASS_FLOOR: f64 = 1e-12;

/// Relative tolerance requested from the adaptive quadrature.
pub const INTEGRAL_REL_TOL: f64 = 1e-10;

const INTEGRAL_MAX_EVALUATIONS: usize = 2_000_000;

/// Ratio of the integrand to its maximum at the truncation point.
const TAIL_RATIO: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub label: String,
    /// MeV^4
    pub rho_natural: f64,
    pub z_over_mu: f64,
    pub n_over_mu: f64,
}

impl Material {
    pub fn new(
        label: impl Into<String>,
        rho_natural: f64,
        z_over_mu: f64,
        n_over_mu: f64,
    ) -> Result<Self> {
        let m = Material {
            label: label.into(),
            rho_natural,
            z_over_mu,
            n_over_mu,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_si_density(
        label: impl Into<String>,
        rho_kg_m3: f64,
        z_over_mu: f64,
        n_over_mu: f64,
        k: &PhysConstants,
    ) -> Result<Self> {
        Self::new(
            label,
            k.density_si_to_natural(rho_kg_m3)?,
            z_over_mu,
            n_over_mu,
        )
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(
            "material",
            &[self.rho_natural, self.z_over_mu, self.n_over_mu],
        )?;
        for (what, v) in [
            ("material density", self.rho_natural),
            ("Z/mu", self.z_over_mu),
            ("N/mu", self.n_over_mu),
        ] {
            if v <= 0.0 {
                return Err(Error::domain(what, v, "must be positive"));
            }
        }
        Ok(())
    }
}

/// Plate sections (Al, Au) and the levitated sphere (SiO2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSet {
    pub al: Material,
    pub au: Material,
    pub sphere: Material,
}

pub const AL_Z_OVER_MU: f64 = 0.48558;
pub const AL_N_OVER_MU: f64 = 0.52304;
pub const AU_Z_OVER_MU: f64 = 0.40422;
pub const AU_N_OVER_MU: f64 = 0.60378;
pub const SIO2_Z_OVER_MU: f64 = 0.503205;
pub const SIO2_N_OVER_MU: f64 = 0.505179;

pub const AL_DENSITY_KG_M3: f64 = 2700.0;
pub const AU_DENSITY_KG_M3: f64 = 19300.0;
/// Fused silica.
pub const SIO2_DENSITY_KG_M3: f64 = 2200.0;

impl MaterialSet {
    /// Densities as printed in MeV^4.
    pub fn nominal() -> Self {
        MaterialSet {
            al: Material::new("Al", 1.2e-5, AL_Z_OVER_MU, AL_N_OVER_MU).unwrap(),
            au: Material::new("Au", 8.3e-5, AU_Z_OVER_MU, AU_N_OVER_MU).unwrap(),
            sphere: Material::new("SiO2", 1.1e-5, SIO2_Z_OVER_MU, SIO2_N_OVER_MU).unwrap(),
        }
    }

    /// Densities converted from bulk SI values.
    pub fn from_si(k: &PhysConstants) -> Self {
        let make = |label: &str, rho: f64, z: f64, n: f64| {
            Material::from_si_density(label, rho, z, n, k).expect("tabulated material is valid")
        };
        MaterialSet {
            al: make("Al", AL_DENSITY_KG_M3, AL_Z_OVER_MU, AL_N_OVER_MU),
            au: make("Au", AU_DENSITY_KG_M3, AU_Z_OVER_MU, AU_N_OVER_MU),
            sphere: make("SiO2", SIO2_DENSITY_KG_M3, SIO2_Z_OVER_MU, SIO2_N_OVER_MU),
        }
    }

    pub fn for_mode(k: &PhysConstants) -> Self {
        match k.mode {
            ConstantsMode::Printed => Self::nominal(),
            ConstantsMode::Codata => Self::from_si(k),
        }
    }

    /// Overrides entries from a TOML table file of `[[material]]` records
    /// keyed by label ("Al", "Au", "SiO2"). Each record gives
    /// `rho_si_kg_m3` or `rho_natural_MeV4`, plus `Z_over_mu` and `N_over_mu`.
    pub fn apply_table_file(&mut self, path: &Path, k: &PhysConstants) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_table(&text, k)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply_table(&mut self, text: &str, k: &PhysConstants) -> Result<()> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Record {
            label: String,
            rho_si_kg_m3: Option<f64>,
            #[serde(rename = "rho_natural_MeV4")]
            rho_natural_mev4: Option<f64>,
            #[serde(rename = "Z_over_mu")]
            z_over_mu: f64,
            #[serde(rename = "N_over_mu")]
            n_over_mu: f64,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Table {
            material: Vec<Record>,
        }
        let table: Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for r in table.material {
            let rho = match (r.rho_si_kg_m3, r.rho_natural_mev4) {
                (Some(si), None) => k.density_si_to_natural(si)?,
                (None, Some(nat)) => nat,
                _ => {
                    return Err(Error::Config(format!(
                        "material {}: give exactly one of rho_si_kg_m3, rho_natural_MeV4",
                        r.label
                    )))
                }
            };
            let m = Material::new(r.label.clone(), rho, r.z_over_mu, r.n_over_mu)?;
            let slot = match r.label.as_str() {
                "Al" => &mut self.al,
                "Au" => &mut self.au,
                "SiO2" | "sphere" => &mut self.sphere,
                other => return Err(Error::Config(format!("unknown material label {other:?}"))),
            };
            *slot = m;
        }
        Ok(())
    }
}

/// Sphere-plate geometry in eV^-1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Sphere radius R.
    pub radius: f64,
    /// Width D of the alternating plate sections.
    pub width: f64,
    /// Au coating thickness t.
    pub coating: f64,
    /// Sphere-surface separation a.
    pub separation: f64,
    /// Effective distance d = a + t.
    pub distance: f64,
}

impl Geometry {
    pub fn new(radius: f64, width: f64, coating: f64, separation: f64) -> Result<Self> {
        let g = Geometry {
            radius,
            width,
            coating,
            separation,
            distance: separation + coating,
        };
        g.validate()?;
        Ok(g)
    }

    /// Lengths in meters.
    pub fn from_si(
        radius: f64,
        width: f64,
        coating: f64,
        separation: f64,
        k: &PhysConstants,
    ) -> Result<Self> {
        Self::new(
            k.length_si_to_natural(radius)?,
            k.length_si_to_natural(width)?,
            k.length_si_to_natural(coating)?,
            k.length_si_to_natural(separation)?,
        )
    }

    /// R = 10 nm, D = 100 um, t = 200 nm, a = 300 nm.
    pub fn nominal(k: &PhysConstants) -> Self {
        Self::from_si(10e-9, 100e-6, 200e-9, 300e-9, k).expect("default geometry is valid")
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(
            "geometry",
            &[
                self.radius,
                self.width,
                self.coating,
                self.separation,
                self.distance,
            ],
        )?;
        for (what, v) in [
            ("radius", self.radius),
            ("coating", self.coating),
            ("separation", self.separation),
        ] {
            if v <= 0.0 {
                return Err(Error::domain(what, v, "must be positive"));
            }
        }
        if self.width < 0.0 {
            return Err(Error::domain(
                "section width",
                self.width,
                "must be nonnegative",
            ));
        }
        let d = self.separation + self.coating;
        if (self.distance - d).abs() > 1e-12 * d {
            return Err(Error::domain(
                "distance",
                self.distance,
                "must equal separation + coating",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    /// Axion mass, eV.
    pub m_a: f64,
    /// g_ap^2 / 4 pi
    pub gp2_over_4pi: f64,
    /// g_an^2 / 4 pi
    pub gn2_over_4pi: f64,
}

impl Couplings {
    pub fn equal(m_a: f64, g2_over_4pi: f64) -> Self {
        Couplings {
            m_a,
            gp2_over_4pi: g2_over_4pi,
            gn2_over_4pi: g2_over_4pi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(
            "couplings",
            &[self.m_a, self.gp2_over_4pi, self.gn2_over_4pi],
        )?;
        if self.gp2_over_4pi < 0.0 || self.gn2_over_4pi < 0.0 {
            return Err(Error::domain(
                "coupling",
                self.gp2_over_4pi.min(self.gn2_over_4pi),
                "g^2/4pi must be nonnegative",
            ));
        }
        if self.m_a <= 0.0 {
            return Err(Error::domain("axion mass", self.m_a, "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NucleonPair {
    ProtonProton,
    NeutronNeutron,
    ProtonNeutron,
}

/// Two-axion exchange potential between two nucleons at separation `r`
/// (eV^-1), in eV:
/// V(r) = -(g_k^2 g_l^2 / 32 pi^3 m^2) (m_a / r^2) K1(2 m_a r).
///
/// Only valid for r >> 1/m; r must exceed 100/m.
pub fn two_axion_potential(
    r: f64,
    c: &Couplings,
    pair: NucleonPair,
    k: &PhysConstants,
) -> Result<f64> {
    c.validate()?;
    ensure_finite("separation", &[r])?;
    let cutoff = 100.0 / k.m;
    if r <= cutoff {
        return Err(Error::domain(
            "nucleon separation",
            r,
            "provided that r >> 1/m (r must exceed 100/m)",
        ));
    }
    let gp2 = 4.0 * PI * c.gp2_over_4pi;
    let gn2 = 4.0 * PI * c.gn2_over_4pi;
    let product = match pair {
        NucleonPair::ProtonProton => gp2 * gp2,
        NucleonPair::NeutronNeutron => gn2 * gn2,
        NucleonPair::ProtonNeutron => gp2 * gn2,
    };
    if product == 0.0 {
        return Ok(0.0);
    }
    let k1 = bessel_k1(2.0 * c.m_a * r)?;
    Ok(-product / (32.0 * PI.powi(3) * k.m * k.m) * (c.m_a / (r * r)) * k1)
}

/// Switch point in y = 2 r z between the series and the closed form of phi.
pub const PHI_SERIES_BELOW: f64 = 1e-4;

/// phi(r, z) = r - 1/(2z) + e^{-2rz} (r + 1/(2z)).
pub fn phi(r: f64, z: f64) -> Result<f64> {
    ensure_finite("phi", &[r, z])?;
    if z <= 0.0 {
        return Err(Error::domain("phi argument z", z, "must be positive"));
    }
    Ok(phi_unchecked(r, z))
}

fn phi_unchecked(r: f64, z: f64) -> f64 {
    let y = 2.0 * r * z;
    if y.abs() < PHI_SERIES_BELOW {
        // phi = r [1 + sum_{n>=1} (-1)^n n y^n / (n+1)!]
        let mut sum = 1.0;
        let mut power = 1.0;
        let mut factorial = 1.0;
        for n in 1..8 {
            power *= -y;
            factorial *= (n + 1) as f64;
            sum += n as f64 * power / factorial;
        }
        r * sum
    } else {
        let inv = 0.5 / z;
        r - inv + (-y).exp() * (r + inv)
    }
}

/// Product of every factor of the force-gradient integrand except the
/// square-root Jacobian sqrt(u^2 - 1)/u^2.
fn profile(geo: &Geometry, m_a: f64, u: f64) -> f64 {
    let onset = -(-2.0 * m_a * geo.width * u).exp_m1();
    onset * (-2.0 * m_a * geo.distance * u).exp() * phi_unchecked(geo.radius, m_a * u)
}

fn integrand_u(geo: &Geometry, m_a: f64, u: f64) -> f64 {
    if u <= 1.0 {
        return 0.0;
    }
    ((u - 1.0) * (u + 1.0)).sqrt() / (u * u) * profile(geo, m_a, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralEstimate {
    /// eV^-1
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    /// Upper limit used for u.
    pub u_max: f64,
    /// The requested mass was below [`MASS_FLOOR`] and was clamped to it.
    pub mass_floored: bool,
}

fn effective_mass(m_a: f64) -> Result<(f64, bool)> {
    ensure_finite("axion mass", &[m_a])?;
    if m_a <= 0.0 {
        return Err(Error::domain("axion mass", m_a, "must be positive"));
    }
    Ok(if m_a < MASS_FLOOR {
        (MASS_FLOOR, true)
    } else {
        (m_a, false)
    })
}

/// Locates the maximum of the integrand on a log grid in u - 1 and returns
/// (peak value, u beyond which the integrand stays below TAIL_RATIO * peak).
fn truncation(geo: &Geometry, m_a: f64) -> (f64, f64) {
    let point = |k: i32| 1.0 + 10f64.powf(k as f64 / 16.0);
    let eps = 2.0 * m_a * geo.distance;
    let mut peak = 0.0f64;
    let mut k = -160;
    loop {
        let u = point(k);
        let v = integrand_u(geo, m_a, u);
        peak = peak.max(v);
        if eps * u > 60.0 && (peak == 0.0 || v < TAIL_RATIO * peak) {
            break;
        }
        k += 1;
    }
    if peak == 0.0 {
        return (0.0, point(k));
    }
    let (mut lo, mut hi) = (point(k - 1), point(k));
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if integrand_u(geo, m_a, mid) < TAIL_RATIO * peak {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (peak, hi)
}

/// I = int_1^inf du sqrt(u^2-1)/u^2 (1 - e^{-2 m_a u D}) e^{-2 m_a d u} phi(R, m_a u).
///
/// Integrated adaptively in psi with u = 1/sin(psi): the substitution maps the
/// semi-infinite range onto (0, pi/2] and turns the square-root edge at u = 1
/// into the smooth factor cos^2(psi).
pub fn integral_i(geo: &Geometry, m_a: f64) -> Result<IntegralEstimate> {
    geo.validate()?;
    let (mass, mass_floored) = effective_mass(m_a)?;
    let (peak, u_max) = truncation(geo, mass);
    if peak == 0.0 {
        return Ok(IntegralEstimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            u_max,
            mass_floored,
        });
    }

    let psi_min = (1.0 / u_max).asin();
    let integrand = |psi: f64| {
        let (s, c) = psi.sin_cos();
        c * c / s * profile(geo, mass, 1.0 / s)
    };

    // Breaks: four per decade from psi_min up to 1, then a geometric
    // cluster toward pi/2 where large masses concentrate the integrand.
    let mut breaks = vec![psi_min];
    let mut b = psi_min;
    while b * 10f64.powf(0.25) < 1.0 {
        b *= 10f64.powf(0.25);
        breaks.push(b);
    }
    let gap = FRAC_PI_2 - 1.0;
    breaks.extend((0..10).map(|j| FRAC_PI_2 - gap * 0.5f64.powi(j)));
    breaks.push(FRAC_PI_2);
    breaks.retain(|&x| x >= psi_min);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let est = quadrature::adaptive(
        integrand,
        &breaks,
        INTEGRAL_REL_TOL,
        0.0,
        INTEGRAL_MAX_EVALUATIONS,
    )?;
    Ok(IntegralEstimate {
        value: est.value,
        error: est.error,
        evaluations: est.evaluations,
        u_max,
        mass_floored,
    })
}

/// Independent evaluation of the same integral: u = cosh(theta) and a fixed
/// composite 20-point Gauss-Legendre rule, with panel width set by the
/// exponential decay scale. Used to cross-check [`integral_i`].
pub fn integral_i_cosh(geo: &Geometry, m_a: f64) -> Result<f64> {
    geo.validate()?;
    let (mass, _) = effective_mass(m_a)?;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let rule = RULE.get_or_init(|| quadrature::gauss_legendre(20));

    let eps = 2.0 * mass * geo.distance;
    let theta_max = (1.0 + 60.0 / eps).acosh();
    let h = 0.25 * (1.0f64).min(1.0 / eps.sqrt());
    let panels = (theta_max / h).ceil() as usize;
    let f = |theta: f64| {
        let t = theta.tanh();
        t * t * profile(geo, mass, theta.cosh())
    };
    Ok(quadrature::composite_gauss_legendre(
        f, 0.0, theta_max, panels, rule,
    ))
}

/// C = rho (g_ap^2/4pi Z/mu + g_an^2/4pi N/mu), in MeV^4.
pub fn coupling_coefficient(mat: &Material, c: &Couplings) -> f64 {
    mat.rho_natural * (c.gp2_over_4pi * mat.z_over_mu + c.gn2_over_4pi * mat.n_over_mu)
}

/// d F / d d = pi / (m^2 m_H^2) C_plate C_sphere I, eV^3, for a given I.
pub fn force_gradient_with_integral(
    plate: &Material,
    sphere: &Material,
    c: &Couplings,
    integral: f64,
    k: &PhysConstants,
) -> f64 {
    let cp = coupling_coefficient(plate, c) * MEV4_TO_EV4;
    let cs = coupling_coefficient(sphere, c) * MEV4_TO_EV4;
    PI / (k.m * k.m * k.m_h * k.m_h) * cp * cs * integral
}

pub fn force_gradient(
    plate: &Material,
    sphere: &Material,
    geo: &Geometry,
    c: &Couplings,
    k: &PhysConstants,
) -> Result<f64> {
    c.validate()?;
    let i = integral_i(geo, c.m_a)?;
    Ok(force_gradient_with_integral(plate, sphere, c, i.value, k))
}

/// Difference of the Al and Au force gradients,
/// pi / (m^2 m_H^2) (C_Al - C_Au) C_s I, eV^3.
pub fn differential_force_gradient(
    geo: &Geometry,
    c: &Couplings,
    al: &Material,
    au: &Material,
    sphere: &Material,
    k: &PhysConstants,
) -> Result<f64> {
    c.validate()?;
    let i = integral_i(geo, c.m_a)?;
    Ok(differential_with_integral(c, al, au, sphere, i.value, k))
}

pub fn differential_with_integral(
    c: &Couplings,
    al: &Material,
    au: &Material,
    sphere: &Material,
    integral: f64,
    k: &PhysConstants,
) -> f64 {
    let diff = (coupling_coefficient(al, c) - coupling_coefficient(au, c)) * MEV4_TO_EV4;
    let cs = coupling_coefficient(sphere, c) * MEV4_TO_EV4;
    PI / (k.m * k.m * k.m_h * k.m_h) * diff * cs * integral
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn geo() -> Geometry {
        Geometry::nominal(&PhysConstants::nominal())
    }

    #[test]
    fn default_geometry() {
        let g = geo();
        assert!(rel(g.distance, 2.533_865_36) < 1e-8);
        assert!(rel(g.distance, g.separation + g.coating) < 1e-15);
        assert!(Geometry::new(1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn potential_vanishes_without_coupling() {
        let k = PhysConstants::nominal();
        let c = Couplings {
            m_a: 1.0,
            gp2_over_4pi: 0.0,
            gn2_over_4pi: 1.0,
        };
        assert_eq!(
            two_axion_potential(1.0, &c, NucleonPair::ProtonProton, &k).unwrap(),
            0.0
        );
        assert_eq!(
            two_axion_potential(1.0, &c, NucleonPair::ProtonNeutron, &k).unwrap(),
            0.0
        );
        assert!(two_axion_potential(1.0, &c, NucleonPair::NeutronNeutron, &k).unwrap() < 0.0);
    }

    #[test]
    fn potential_is_quartic_in_coupling() {
        let k = PhysConstants::nominal();
        let c = Couplings::equal(0.3, 1e-3);
        let c2 = Couplings::equal(0.3, 2e-3);
        let v = two_axion_potential(2.0, &c, NucleonPair::ProtonNeutron, &k).unwrap();
        let v2 = two_axion_potential(2.0, &c2, NucleonPair::ProtonNeutron, &k).unwrap();
        assert!(rel(v2, 4.0 * v) < 1e-14);
    }

    #[test]
    fn potential_validity_guard() {
        let k = PhysConstants::nominal();
        let c = Couplings::equal(1.0, 1.0);
        let err = two_axion_potential(1e-8, &c, NucleonPair::ProtonProton, &k).unwrap_err();
        assert!(err.to_string().contains("r >> 1/m"));
    }

    #[test]
    fn phi_limits() {
        for z in [1e-12, 1e-3, 1.0, 1e6] {
            assert_eq!(phi(0.0, z).unwrap(), 0.0);
        }
        // 2rz = 50 with 1/(2z) = 5e-13
        let (r, z) = (2.5e-11, 1e12);
        assert!((phi(r, z).unwrap() - r).abs() <= (-50f64).exp() + 1e-12);
        assert!(phi(1.0, 0.0).is_err());
    }

    #[test]
    fn phi_branches_agree_at_switch() {
        let r = 0.7;
        let z = PHI_SERIES_BELOW / (2.0 * r);
        let inv = 0.5 / z;
        let direct = r - inv + (-2.0 * r * z).exp() * (r + inv);
        let below = phi(r, z * (1.0 - 1e-12)).unwrap();
        assert!(rel(below, direct) < 1e-10);
    }

    #[test]
    fn zero_width_gives_zero_integral() {
        let k = PhysConstants::nominal();
        let g = Geometry::from_si(10e-9, 0.0, 200e-9, 300e-9, &k).unwrap();
        assert_eq!(integral_i(&g, 1.0).unwrap().value, 0.0);
        assert_eq!(integral_i_cosh(&g, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn integral_falls_with_mass() {
        let g = geo();
        let heavy = integral_i(&g, 10.0).unwrap().value;
        let light = integral_i(&g, 1.0).unwrap().value;
        assert!(heavy < light && heavy > 0.0);
    }

    #[test]
    fn mass_floor_is_flagged() {
        let g = geo();
        let below = integral_i(&g, 1e-14).unwrap();
        let at = integral_i(&g, MASS_FLOOR).unwrap();
        assert!(below.mass_floored && !at.mass_floored);
        assert_eq!(below.value, at.value);
        assert!(integral_i(&g, 0.0).is_err());
    }

    #[test]
    fn coefficient_identities() {
        let mats = MaterialSet::nominal();
        assert_eq!(
            coupling_coefficient(&mats.au, &Couplings::equal(1.0, 0.0)),
            0.0
        );
        let c = Couplings::equal(1.0, 3e-9);
        let expect = mats.al.rho_natural * 3e-9 * (AL_Z_OVER_MU + AL_N_OVER_MU);
        assert!(rel(coupling_coefficient(&mats.al, &c), expect) < 1e-15);
        let proton = Couplings {
            m_a: 1.0,
            gp2_over_4pi: 1.0,
            gn2_over_4pi: 0.0,
        };
        assert_eq!(coupling_coefficient(&mats.au, &proton), 8.3e-5 * 0.40422);
    }

    #[test]
    fn differential_gradient_sign_and_consistency() {
        let k = PhysConstants::nominal();
        let mats = MaterialSet::nominal();
        let g = geo();
        let c = Couplings::equal(0.1, 1e-10);
        let diff =
            differential_force_gradient(&g, &c, &mats.al, &mats.au, &mats.sphere, &k).unwrap();
        assert!(diff < 0.0);
        let al = force_gradient(&mats.al, &mats.sphere, &g, &c, &k).unwrap();
        let au = force_gradient(&mats.au, &mats.sphere, &g, &c, &k).unwrap();
        assert!(rel(diff, al - au) < 1e-12);
        let same =
            differential_force_gradient(&g, &c, &mats.au, &mats.au, &mats.sphere, &k).unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn material_table_override() {
        let k = PhysConstants::codata();
        let mut mats = MaterialSet::nominal();
        mats.apply_table(
            r#"
            [[material]]
            label = "SiO2"
            rho_si_kg_m3 = 2648.0
            Z_over_mu = 0.503205
            N_over_mu = 0.505179

            [[material]]
            label = "Au"
            rho_natural_MeV4 = 8.0e-5
            Z_over_mu = 0.40422
            N_over_mu = 0.60378
            "#,
            &k,
        )
        .unwrap();
        assert!(rel(mats.sphere.rho_natural, 1.1413e-5) < 1e-3);
        assert_eq!(mats.au.rho_natural, 8.0e-5);
        assert_eq!(mats.al, MaterialSet::nominal().al);

        let both = r#"
            [[material]]
            label = "Al"
            rho_si_kg_m3 = 2700.0
            rho_natural_MeV4 = 1.2e-5
            Z_over_mu = 0.5
            N_over_mu = 0.5
        "#;
        assert!(mats.apply_table(both, &k).is_err());
        let unknown = "[[material]]\nlabel = \"Cu\"\nrho_si_kg_m3 = 8960.0\nZ_over_mu = 0.45\nN_over_mu = 0.55\n";
        assert!(mats.apply_table(unknown, &k).is_err());
    }
}

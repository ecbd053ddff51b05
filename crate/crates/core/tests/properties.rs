use axion_optomech::axion::{self, Couplings, Geometry, MaterialSet};
use axion_optomech::constraint::{ConstraintSetup, Regime};
use axion_optomech::metrology::{self, NoiseParams};
use axion_optomech::optomech::{self, OptomechParams};
use axion_optomech::units::{Dimension, Quantity};
use axion_optomech::PhysConstants;
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

fn dimension() -> impl Strategy<Value = Dimension> {
    prop::sample::select(vec![
        Dimension::Length,
        Dimension::InverseEnergy,
        Dimension::DensitySi,
        Dimension::DensityNatural,
        Dimension::ForceGradientSi,
        Dimension::ForceGradientNatural,
        Dimension::Frequency,
        Dimension::Energy,
    ])
}

fn optomech_params() -> impl Strategy<Value = OptomechParams> {
    (
        log_uniform(1e3, 1e7),
        log_uniform(1e3, 1e6),
        log_uniform(1e-8, 1e-2),
        -6.0..6.0f64,
        log_uniform(1.0, 1e4),
        log_uniform(1e-4, 10.0),
    )
        .prop_map(|(kappa, omega_m, gamma_m, det, g, drive)| OptomechParams {
            omega0: omega_m,
            omega_m,
            kappa,
            gamma_m,
            detuning: det * kappa,
            g,
            e_pu: drive * kappa,
            ..OptomechParams::nominal()
        })
}

/// Random geometry in SI ranges around the default one, natural units.
fn geometry() -> impl Strategy<Value = Geometry> {
    (
        log_uniform(1e-9, 1e-7),
        log_uniform(1e-6, 1e-3),
        log_uniform(5e-8, 5e-7),
        log_uniform(1e-7, 1e-6),
    )
        .prop_map(|(r, w, t, a)| Geometry::from_si(r, w, t, a, &PhysConstants::codata()).unwrap())
}

proptest! {
    #[test]
    fn unit_round_trip(x in log_uniform(1e-30, 1e30), d in dimension(), codata in any::<bool>()) {
        let k = if codata { PhysConstants::codata() } else { PhysConstants::nominal() };
        let back = Quantity::new(x, d).convert(&k).convert(&k);
        prop_assert_eq!(back.dimension, d);
        prop_assert!(rel(back.value, x) < 1e-12);
    }

    #[test]
    fn steady_state_residual(p in optomech_params()) {
        let s = optomech::steady_state(&p).unwrap();
        prop_assert!(s.sigma >= 0.0);
        prop_assert!(s.relative_residual(&p) < 1e-12);
    }

    #[test]
    fn probe_amplitude_scaling(scale in log_uniform(1e-3, 1e3), offset in -100.0..100.0f64, near in -3.0..3.0f64) {
        let p = OptomechParams::nominal();
        let q = OptomechParams { e_pr: p.e_pr * scale, ..p };
        for x in [offset, near * p.gamma_m] {
            let a = optomech::transmission_at_offset(&p, x, 1e-6).unwrap().power;
            let b = optomech::transmission_at_offset(&q, x, 1e-6).unwrap().power;
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn linear_cavity_limit(offset in -100.0..100.0f64, kappa in log_uniform(1e4, 1e7)) {
        let p = OptomechParams { g: 0.0, kappa, ..OptomechParams::nominal() };
        let sigma = optomech::steady_state_intensity(&p).unwrap();
        let t = optomech::transmission_at_offset(&p, offset, sigma).unwrap();
        let delta = p.omega0 + offset;
        let want = Complex64::new(1.0, 0.0) - 2.0 * kappa / Complex64::new(kappa, -delta + p.detuning);
        prop_assert!((t.power - want.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn unitarity_off_resonance(offset in -100.0..100.0f64, probe in -100.0..100.0f64) {
        prop_assume!((probe - offset).abs() > 1.0);
        let p = OptomechParams::nominal().with_mechanical_offset(offset);
        let sigma = optomech::steady_state_intensity(&p).unwrap();
        let t = optomech::transmission_at_offset(&p, probe, sigma).unwrap();
        prop_assert!((t.power - 1.0).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn peak_tracks_mechanical_resonance(offset in -100.0..100.0f64) {
        let p = OptomechParams::nominal().with_mechanical_offset(offset);
        let r = optomech::locate_peak(&p).unwrap();
        prop_assert!((r.center_hz - p.resonance_offset()).abs() <= 1e-3 * p.gamma_m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn integral_nonnegative_and_monotone(geo in geometry(), m_a in log_uniform(1e-8, 5.0)) {
        let i = |g: &Geometry, m: f64| axion::integral_i(g, m).unwrap().value;
        let base = i(&geo, m_a);
        prop_assert!(base >= 0.0);
        let slack = 1.0 + 1e-9;
        // decreasing in m_a and in d
        prop_assert!(i(&geo, 2.0 * m_a) <= base * slack);
        let far = Geometry::new(geo.radius, geo.width, 2.0 * geo.coating, 2.0 * geo.separation).unwrap();
        prop_assert!(i(&far, m_a) <= base * slack);
        // increasing in D and in R
        let wide = Geometry::new(geo.radius, 2.0 * geo.width, geo.coating, geo.separation).unwrap();
        prop_assert!(i(&wide, m_a) * slack >= base);
        let big = Geometry::new(2.0 * geo.radius, geo.width, geo.coating, geo.separation).unwrap();
        prop_assert!(i(&big, m_a) * slack >= base);
    }

    #[test]
    fn bound_scales_with_root_threshold(threshold in log_uniform(1e-20, 1e-14), m_a in log_uniform(1e-10, 10.0)) {
        let k = PhysConstants::nominal();
        let setup = ConstraintSetup {
            geometry: Geometry::nominal(&k),
            materials: MaterialSet::nominal(),
            threshold_natural: threshold,
            constants: k,
        };
        let quad = ConstraintSetup { threshold_natural: 4.0 * threshold, ..setup.clone() };
        for r in Regime::ALL {
            let ratio = quad.bound_at_mass(r, m_a).unwrap() / setup.bound_at_mass(r, m_a).unwrap();
            prop_assert!((ratio - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn plate_swap_leaves_bound(m_a in log_uniform(1e-10, 10.0)) {
        let k = PhysConstants::nominal();
        let setup = ConstraintSetup {
            geometry: Geometry::nominal(&k),
            materials: MaterialSet::nominal(),
            threshold_natural: 1.5276e-17,
            constants: k,
        };
        let mut swapped = setup.clone();
        std::mem::swap(&mut swapped.materials.al, &mut swapped.materials.au);
        for r in Regime::ALL {
            prop_assert_eq!(setup.bound_at_mass(r, m_a).unwrap(), swapped.bound_at_mass(r, m_a).unwrap());
        }
    }

    #[test]
    fn differential_is_difference_of_gradients(m_a in log_uniform(1e-8, 5.0), gp in log_uniform(1e-14, 1e-6), gn in log_uniform(1e-14, 1e-6)) {
        let k = PhysConstants::nominal();
        let geo = Geometry::nominal(&k);
        let m = MaterialSet::nominal();
        let c = Couplings { m_a, gp2_over_4pi: gp, gn2_over_4pi: gn };
        let al = axion::force_gradient(&m.al, &m.sphere, &geo, &c, &k).unwrap();
        let au = axion::force_gradient(&m.au, &m.sphere, &geo, &c, &k).unwrap();
        let diff = axion::differential_force_gradient(&geo, &c, &m.al, &m.au, &m.sphere, &k).unwrap();
        prop_assert!(rel(diff, al - au) < 1e-12);
    }
}

proptest! {
    #[test]
    fn threshold_and_shift_are_inverse(x in log_uniform(1e-12, 1e-3)) {
        let k = PhysConstants::nominal();
        let m_s = metrology::NOMINAL_SPHERE_MASS_KG;
        let t = metrology::gradient_threshold(x, m_s, 1e5, &k).unwrap();
        prop_assert!(rel(metrology::resonance_shift(t.si, m_s, 1e5).unwrap(), x) < 1e-12);
    }

    #[test]
    fn noise_floor_scaling_laws(t in log_uniform(1e-4, 1.0), df in log_uniform(1e-9, 1e-6)) {
        let k = PhysConstants::nominal();
        let n = NoiseParams { temperature: t, delta_f: df, ..NoiseParams::nominal() };
        let base = metrology::thermal_noise_floor(&n, &k).unwrap();
        let f = |m: NoiseParams| metrology::thermal_noise_floor(&m, &k).unwrap() / base;
        let bumps = [
            (NoiseParams { temperature: 4.0 * t, ..n }, 2.0),
            (NoiseParams { delta_f: 4.0 * df, ..n }, 2.0),
            (NoiseParams { q: 4.0 * n.q, ..n }, 0.5),
            (NoiseParams { x2_mean: 4.0 * n.x2_mean, ..n }, 0.5),
        ];
        for (m, want) in bumps {
            prop_assert!(rel(f(m), want) < 1e-12);
        }
        prop_assert!(rel(n.e_c(), n.m_eff * n.omega0 * n.omega0 * n.x2_mean) < 1e-12);
    }
}

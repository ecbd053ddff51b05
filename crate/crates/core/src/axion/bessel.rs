//! Modified Bessel function of the second kind, order one.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// K_1(x) for x > 0. Relative error below 1e-10 on [1e-8, 700]; results
/// underflow to zero once e^-x leaves the f64 range.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain("bessel_k1 argument", x, "must be positive"));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(if x <= 2.0 { k1_series(x) } else { k1_steed(x) })
}

/// Ascending series
/// K1(x) = 1/x + ln(x/2) I1(x) - (x/4) sum_k [psi(k+1) + psi(k+2)] (x^2/4)^k / (k! (k+1)!).
fn k1_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let ln_half = (0.5 * x).ln();

    // term = (x^2/4)^k / (k! (k+1)!)
    let mut term = 1.0;
    let mut i1_sum = 0.0;
    let mut psi_sum = 0.0;
    // psi(k+1) = -gamma + H_k, psi(k+2) = -gamma + H_{k+1}
    let mut h_k = 0.0;
    for k in 0..60 {
        let h_k1 = h_k + 1.0 / (k + 1) as f64;
        i1_sum += term;
        let contribution = (h_k + h_k1 - 2.0 * EULER_GAMMA) * term;
        psi_sum += contribution;
        if k > 2 && term < 1e-18 * i1_sum {
            break;
        }
        term *= y / ((k + 1) as f64 * (k + 2) as f64);
        h_k = h_k1;
    }
    let i1 = 0.5 * x * i1_sum;
    1.0 / x + ln_half * i1 - 0.25 * x * psi_sum
}

/// Steed's continued fraction (CF2) for K_0 with the Temme normalisation
/// sum, then K_1 from the ratio. Valid and fast for x >= 2.
fn k1_steed(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    k0 * (x + 0.5 - h) / x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn small_argument_limit() {
        let x = 1e-6;
        assert!(rel(x * bessel_k1(x).unwrap(), 1.0) < 1e-6);
    }

    #[test]
    fn large_argument_asymptote() {
        let x: f64 = 100.0;
        let asym = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 3.0 / (8.0 * x));
        assert!(rel(bessel_k1(x).unwrap(), asym) < 1e-4);
    }

    #[test]
    fn continuous_across_branch_switch() {
        let below = bessel_k1(2.0).unwrap();
        let above = k1_steed(2.0);
        assert!(rel(below, above) < 1e-12, "{below} vs {above}");
    }

    #[test]
    fn domain() {
        assert!(bessel_k1(0.0).is_err());
        assert!(bessel_k1(-1.0).is_err());
        assert!(bessel_k1(f64::NAN).is_err());
        assert_eq!(bessel_k1(1e4).unwrap(), 0.0);
    }
}

use core::f64::consts::FRAC_PI_2;
#[allow(unused_imports)] // unused when a dependency links std
use num_traits::Float;

use crate::{Error, Result};

/// Complete elliptic integral of the first kind `K(k)`, `0 ≤ k < 1`.
pub fn complete_elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(alloc::format!("K(k) needs 0 <= k < 1, got {k}")));
    }
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(agm_ke(k, kp).0)
}

/// Complete elliptic integral of the second kind `E(k)`, `0 ≤ k ≤ 1`.
pub fn complete_elliptic_e(k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::Domain(alloc::format!("E(k) needs 0 <= k <= 1, got {k}")));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(agm_ke(k, kp).1)
}

/// `(K, E)` parametrised by the complementary modulus `k' = √(1−k²) ∈ (0, 1]`.
///
/// Keeps full relative accuracy as `k → 1`, where `k` itself rounds to 1.
pub fn elliptic_ke_complement(kp: f64) -> (f64, f64) {
    debug_assert!(kp > 0.0 && kp <= 1.0);
    let k = ((1.0 - kp) * (1.0 + kp)).sqrt();
    agm_ke(k, kp)
}

fn agm_ke(k: f64, kp: f64) -> (f64, f64) {
    let mut a = 1.0;
    let mut b = kp;
    let mut c = k;
    let mut pow = 0.5;
    let mut sum = pow * c * c;
    for _ in 0..64 {
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        c = 0.5 * (a - b);
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        pow *= 2.0;
        sum += pow * c * c;
    }
    let kk = FRAC_PI_2 / a;
    (kk, kk * (1.0 - sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    // Composite trapezoid on [0, π/2]; the integrands extend to smooth
    // π-periodic even functions, so the rule is spectrally accurate.
    fn brute(k: f64, first_kind: bool) -> f64 {
        let n = 1_000_000;
        let h = FRAC_PI_2 / n as f64;
        let g = |th: f64| {
            let s = th.sin();
            let w = (1.0 - k * k * s * s).sqrt();
            if first_kind { 1.0 / w } else { w }
        };
        let mut acc = 0.5 * (g(0.0) + g(FRAC_PI_2));
        for i in 1..n {
            acc += g(i as f64 * h);
        }
        acc * h
    }

    #[test]
    fn trivial_values() {
        assert_eq!(complete_elliptic_k(0.0).unwrap(), FRAC_PI_2);
        assert_eq!(complete_elliptic_e(0.0).unwrap(), FRAC_PI_2);
        assert_eq!(complete_elliptic_e(1.0).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(complete_elliptic_k(1.0).is_err());
        assert!(complete_elliptic_k(-0.1).is_err());
        assert!(complete_elliptic_e(1.0 + 1e-12).is_err());
    }

    #[test]
    fn half_modulus_against_brute_force() {
        // brute(0.5, ..) evaluated once and frozen:
        // K(0.5) = 1.685750354812596, E(0.5) = 1.467462209339427
        let k = complete_elliptic_k(0.5).unwrap();
        let e = complete_elliptic_e(0.5).unwrap();
        assert!((k - brute(0.5, true)).abs() < 1e-12);
        assert!((e - brute(0.5, false)).abs() < 1e-12);
        assert!((k - 1.685750354812596).abs() < 1e-14);
        assert!((e - 1.467462209339427).abs() < 1e-14);
    }

    #[test]
    fn grid_against_brute_force() {
        for i in 0..50 {
            let k = 0.999 * i as f64 / 49.0;
            let kk = complete_elliptic_k(k).unwrap();
            let ee = complete_elliptic_e(k).unwrap();
            // the trapezoid rule slows down near k=1; use a denser rule there
            assert!((kk - brute(k, true)).abs() < 1e-11 * kk, "K at {k}");
            assert!((ee - brute(k, false)).abs() < 1e-11, "E at {k}");
        }
    }

    #[test]
    fn legendre_relation() {
        for i in 1..10 {
            let k = i as f64 / 10.0;
            let kp = (1.0 - k * k).sqrt();
            let (k1, e1) = (complete_elliptic_k(k).unwrap(), complete_elliptic_e(k).unwrap());
            let (k2, e2) = (complete_elliptic_k(kp).unwrap(), complete_elliptic_e(kp).unwrap());
            assert!((e1 * k2 + e2 * k1 - k1 * k2 - PI / 2.0).abs() < 1e-11);
        }
    }

    #[test]
    fn near_one_is_monotone_and_finite() {
        let a = complete_elliptic_k(1.0 - 1e-12).unwrap();
        let b = complete_elliptic_k(1.0 - 1e-10).unwrap();
        assert!(a.is_finite() && a > b);
        // K ≈ ln(4/k') for small k'
        let kp = 1e-20;
        let (kk, ee) = elliptic_ke_complement(kp);
        assert!((kk - (4.0 / kp).ln()).abs() < 1e-12);
        assert!((ee - 1.0).abs() < 1e-12);
    }
}

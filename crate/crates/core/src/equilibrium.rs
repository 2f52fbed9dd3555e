//! Equilibrium density `ρ_T` of the constrained log-gas, its Stieltjes
//! transform `G_T`, and the midpoint spectral duality `ρ*_T`.

use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)] // unused when a dependency links std
use num_traits::Float;

use crate::specfun::{bisect, elliptic_ke_complement, gauss_kronrod, QuadratureRule};
use crate::{Error, Result};

/// The critical area `π²` separating the two phases.
pub const CRITICAL_AREA: f64 = PI * PI;

/// Lower end of the search range for `ln k'`. Beyond this the width of the
/// transition region `β − α ∝ k'²` underflows.
const LN_KP_MIN: f64 = -330.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumMeasure {
    pub t: f64,
    pub regime: Regime,
    /// Elliptic modulus (0 in the subcritical phase).
    pub k: f64,
    /// Complementary modulus `√(1−k²)`, kept separately because `k` rounds to 1 for large `T`.
    pub kp: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `β − α`, computed without cancellation.
    pub gap: f64,
    pub kk: f64,
    pub ee: f64,
}

/// `8EK − 4k'²K²` as a function of the complementary modulus.
pub fn elliptic_phase_map(kp: f64) -> f64 {
    let (kk, ee) = elliptic_ke_complement(kp);
    8.0 * ee * kk - 4.0 * kp * kp * kk * kk
}

fn phase_map_log(u: f64) -> (f64, f64) {
    let kp = u.exp();
    let (kk, ee) = elliptic_ke_complement(kp);
    let k2 = (1.0 - kp) * (1.0 + kp);
    let f = 8.0 * ee * kk - 4.0 * kp * kp * kk * kk;
    // d/du of the map, u = ln k'
    let df = -8.0 * ee * (ee - kp * kp * kk) / k2;
    (f, df)
}

/// Solve for the equilibrium measure at total area `t`.
pub fn solve_equilibrium(t: f64) -> Result<EquilibriumMeasure> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(alloc::format!("total area must be positive, got {t}")));
    }
    if t <= CRITICAL_AREA {
        let beta = 2.0 / t.sqrt();
        return Ok(EquilibriumMeasure {
            t,
            regime: Regime::Subcritical,
            k: 0.0,
            kp: 1.0,
            alpha: 0.0,
            beta,
            gap: beta,
            kk: FRAC_PI_2,
            ee: FRAC_PI_2,
        });
    }
    let (f_min, _) = phase_map_log(LN_KP_MIN);
    if t >= f_min {
        return Err(Error::Domain(alloc::format!("total area {t} too large (supported up to {f_min:.0})")));
    }
    let mut u = bisect(LN_KP_MIN, 0.0, |u| phase_map_log(u).0 - t);
    let (f, df) = phase_map_log(u);
    let polished = u - (f - t) / df;
    if polished < 0.0 && (phase_map_log(polished).0 - t).abs() <= (f - t).abs() {
        u = polished;
    }
    let kp = u.exp();
    let k = ((1.0 - kp) * (1.0 + kp)).sqrt();
    let (kk, ee) = elliptic_ke_complement(kp);
    let beta = 4.0 * kk / t;
    Ok(EquilibriumMeasure {
        t,
        regime: Regime::Supercritical,
        k,
        kp,
        alpha: k * beta,
        beta,
        gap: beta * kp * kp / (1.0 + k),
        kk,
        ee,
    })
}

impl EquilibriumMeasure {
    /// `|8EK − 4(1−k²)K² − T|`; zero by construction in the subcritical phase.
    pub fn elliptic_residual(&self) -> f64 {
        match self.regime {
            Regime::Subcritical => 0.0,
            Regime::Supercritical => {
                (8.0 * self.ee * self.kk - 4.0 * self.kp * self.kp * self.kk * self.kk - self.t).abs()
            }
        }
    }

    /// `ρ_T(x)`.
    pub fn density(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax >= self.beta {
            return 0.0;
        }
        if ax <= self.alpha && self.regime == Regime::Supercritical {
            return 1.0;
        }
        self.density_local((ax - self.alpha) / self.gap)
    }

    /// `ρ_T(α + (β−α)u)` for `u ∈ [0, 1]`. Resolves the transition region even
    /// when `β − α` is far below the spacing of doubles near `α`.
    pub fn density_local(&self, u: f64) -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        if u <= 0.0 && self.regime == Regime::Supercritical {
            return 1.0;
        }
        let u = u.max(0.0);
        let x = self.alpha + self.gap * u;
        match self.regime {
            Regime::Subcritical => self.t / (2.0 * PI) * ((self.beta - x) * (self.beta + x)).sqrt(),
            Regime::Supercritical => {
                // x² − α² and β² − x² in factored form
                let inner = self.gap * u * (x + self.alpha);
                let outer_factor = (1.0 - u) * (self.beta + x);
                let c = inner / (x * x);
                let root = self.gap * (u * (x + self.alpha) * outer_factor).sqrt();
                let rho = 2.0 * root / (PI * self.beta * x) * self.edge_integral(c);
                rho.clamp(0.0, 1.0)
            }
        }
    }

    /// `∫₀^∞ √(1+t²) dt / ((t²+c)√(t²+k'²))`, integrated in `ln t`.
    fn edge_integral(&self, c: f64) -> f64 {
        let kp = self.kp;
        let scale = c.sqrt().min(kp);
        let lo = scale.ln() - 40.0;
        let hi = 40.0;
        let rule = QuadratureRule::gauss_kronrod(1e-300, 1e-14).with_budget(1 << 16);
        let g = |w: f64| {
            let t = w.exp();
            let t2 = t * t;
            t * (1.0 + t2).sqrt() / ((t2 + c) * (t2 + kp * kp).sqrt())
        };
        match gauss_kronrod(g, lo, hi, &QuadratureRule { node_count: 16, ..rule }) {
            Ok((v, _)) => v,
            Err(_) => gauss_kronrod(g, lo, hi, &QuadratureRule { node_count: 64, rel_tol: 1e-11, ..rule })
                .map(|(v, _)| v)
                .unwrap_or(f64::NAN),
        }
    }

    fn distance_to_support(&self, z: Complex64) -> f64 {
        if z.re.abs() <= self.beta {
            z.im.abs()
        } else {
            (Complex64::new(z.re.abs() - self.beta, z.im)).norm()
        }
    }

    /// Stieltjes transform `G_T(z) = ∫ρ_T(x)/(z−x) dx` for `z` off `[−β, β]`.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        if !(self.distance_to_support(z) > 1e-8) {
            return Err(Error::Domain(alloc::format!("z = {z} lies within 1e-8 of the support")));
        }
        let one = Complex64::new(1.0, 0.0);
        let z2 = z * z;
        let b = (one - self.beta * self.beta / z2).sqrt();
        match self.regime {
            Regime::Subcritical => Ok(2.0 / (z * (one + b))),
            Regime::Supercritical => {
                let a2 = one - self.alpha * self.alpha / z2;
                let a = a2.sqrt();
                let kp2 = self.kp * self.kp;
                let j = self.stieltjes_integral(a2, kp2)?;
                let first = 0.5 * self.t * self.beta * self.beta * kp2 / (z * a * (a + b));
                let second = 2.0 * self.alpha * self.alpha / (self.beta * z) * (b / a) * j;
                Ok(first + second)
            }
        }
    }

    /// `∫₀^{π/2} sin²ψ dψ / ((sin²ψ + A²cos²ψ) √(sin²ψ + k'²cos²ψ))`.
    fn stieltjes_integral(&self, a2: Complex64, kp2: f64) -> Result<Complex64> {
        let g = |psi: f64| {
            let (s, c) = psi.sin_cos();
            let (s2, c2) = (s * s, c * c);
            let denom = (a2 * c2 + s2) * (s2 + kp2 * c2).sqrt();
            Complex64::new(s2, 0.0) / denom
        };
        // Grade the initial panels towards ψ = 0, where the integrand has
        // structure on the scales |A| and k'.
        let mut total = Complex64::new(0.0, 0.0);
        let rule = QuadratureRule::gauss_kronrod(1e-15, 1e-14).with_budget(1 << 18);
        let mut hi = FRAC_PI_2;
        let floor = (a2.norm().sqrt().min(kp2.sqrt()) * 1e-3).max(1e-300);
        while hi > floor {
            let lo = if hi * 0.125 > floor { hi * 0.125 } else { 0.0 };
            total += gauss_kronrod(g, lo, hi, &rule)?.0;
            hi = lo;
        }
        if hi > 0.0 {
            total += gauss_kronrod(g, 0.0, hi, &rule)?.0;
        }
        Ok(total)
    }

    /// Midpoint spectral density `ρ*_T(e^{iθ}) = ψ(θ)/π`, where `ψ` inverts
    /// `x ↦ πρ_T(x)` on `(α, β)`. Even in `θ`; returns `β/π` at `θ = 0` and
    /// `α/π` at `|θ| = π`. In the subcritical phase `πρ_T ≤ √T`, so
    /// `ψ(θ) = 0` for `|θ| ≥ √T`.
    pub fn midpoint_spectral_density(&self, theta: f64) -> Result<f64> {
        let th = theta.abs();
        if th > PI {
            return Err(Error::Domain(alloc::format!("theta must lie in [-pi, pi], got {theta}")));
        }
        if th == 0.0 {
            return Ok(self.beta / PI);
        }
        if th >= PI {
            return Ok(self.alpha / PI);
        }
        let top = PI * self.density_local(0.0);
        if th >= top {
            return Ok(self.alpha / PI);
        }
        let u = bisect(0.0, 1.0, |u| PI * self.density_local(u) - th);
        Ok((self.alpha + self.gap * u) / PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::GaussLegendre;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Brute-force mass and Stieltjes transform via the local variable
    /// u = sin²(πv/2) on the transition region.
    fn brute_transition<F: FnMut(f64, f64) -> Complex64>(m: &EquilibriumMeasure, n: usize, mut f: F) -> Complex64 {
        let gl = GaussLegendre::new(n);
        gl.integrate(0.0, 1.0, |v| {
            let s = (FRAC_PI_2 * v).sin();
            let u = s * s;
            let du = FRAC_PI_2 * (PI * v).sin();
            let x = m.alpha + m.gap * u;
            f(x, m.density_local(u)) * (m.gap * du)
        })
    }

    #[test]
    fn subcritical_values() {
        let m = solve_equilibrium(1.0).unwrap();
        assert_eq!(m.regime, Regime::Subcritical);
        assert_eq!((m.alpha, m.beta), (0.0, 2.0));
        assert!((m.density(0.0) - 1.0 / PI).abs() < 1e-15);
        let crit = solve_equilibrium(CRITICAL_AREA).unwrap();
        assert_eq!(crit.regime, Regime::Subcritical);
        assert!((crit.density(0.0) - 1.0).abs() < 1e-15);
        assert!((crit.beta - 2.0 / PI).abs() < 1e-15);
        assert!(solve_equilibrium(0.0).is_err());
        assert!(solve_equilibrium(-1.0).is_err());
    }

    #[test]
    fn supercritical_solve() {
        for t in [CRITICAL_AREA + 1e-6, CRITICAL_AREA + 0.01, 12.0, 16.0, 25.0, 100.0, 400.0, 1000.0] {
            let m = solve_equilibrium(t).unwrap();
            assert_eq!(m.regime, Regime::Supercritical);
            assert!(m.elliptic_residual() <= 1e-10, "T={t}: {}", m.elliptic_residual());
            assert!(m.alpha < m.beta || m.gap > 0.0);
        }
        // β is continuous at the transition
        let above = solve_equilibrium(CRITICAL_AREA * (1.0 + 1e-12)).unwrap();
        assert!((above.beta - 2.0 / PI).abs() < 1e-8);
    }

    #[test]
    fn phase_map_derivative() {
        for u in [-0.3, -2.0, -20.0] {
            let h = 1e-6;
            let fd = (phase_map_log(u + h).0 - phase_map_log(u - h).0) / (2.0 * h);
            let (_, df) = phase_map_log(u);
            assert!((fd - df).abs() < 1e-6 * df.abs(), "u={u}");
        }
    }

    #[test]
    fn mass_and_bounds() {
        for t in [0.5, 1.0, CRITICAL_AREA, 12.0, 16.0, 25.0, 100.0] {
            let m = solve_equilibrium(t).unwrap();
            let plateau = 2.0 * m.alpha;
            let side = brute_transition(&m, 400, |_, rho| c(rho, 0.0)).re;
            let mass = plateau + 2.0 * side;
            assert!((mass - 1.0).abs() < 1e-8, "T={t}: mass {mass}");
            for i in 0..=1000 {
                let x = -m.beta - 0.1 + (2.0 * m.beta + 0.2) * i as f64 / 1000.0;
                let r = m.density(x);
                assert!((0.0..=1.0 + 1e-12).contains(&r));
                assert_eq!(r, m.density(-x));
            }
        }
    }

    #[test]
    fn density_decreasing_on_transition_region() {
        let m = solve_equilibrium(16.0).unwrap();
        let mut prev = 1.0;
        for i in 1..200 {
            let r = m.density_local(i as f64 / 200.0);
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn density_midpoint_matches_paper_integral() {
        // The defining integral with s = sin φ, evaluated by a 10⁶-node
        // midpoint rule (the integrand is smooth after the substitution).
        let m = solve_equilibrium(16.0).unwrap();
        let x = 0.5 * (m.alpha + m.beta);
        let q = m.alpha * m.alpha / (x * x);
        let n = 1_000_000;
        let h = FRAC_PI_2 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let s = ((i as f64 + 0.5) * h).sin();
            acc += 1.0 / ((1.0 - q * s * s) * (1.0 - m.k * m.k * s * s).sqrt());
        }
        let brute = 2.0 * ((x * x - m.alpha * m.alpha) * (m.beta * m.beta - x * x)).sqrt() / (PI * m.beta * x) * acc * h;
        let v = m.density(x);
        assert!(v > 0.0 && v < 1.0);
        assert!((v - brute).abs() < 1e-8, "{v} vs {brute}");
    }

    #[test]
    fn continuity_across_transition() {
        let lo = solve_equilibrium(CRITICAL_AREA - 1e-6).unwrap();
        let hi = solve_equilibrium(CRITICAL_AREA + 1e-6).unwrap();
        for i in 0..=400 {
            let x = 0.7 * i as f64 / 400.0;
            assert!((lo.density(x) - hi.density(x)).abs() <= 1e-3);
        }
    }

    #[test]
    fn stieltjes_against_direct_quadrature() {
        for t in [1.0, 5.0, 16.0, 25.0] {
            let m = solve_equilibrium(t).unwrap();
            for z in [c(3.0, 0.0), c(0.3, 0.4), c(-1.1, 0.05), c(m.beta + 0.2, -0.3), c(0.0, 2.0)] {
                let plateau = if m.alpha > 0.0 { ((z + m.alpha) / (z - m.alpha)).ln() } else { c(0.0, 0.0) };
                let side = brute_transition(&m, 2000, |x, rho| z * 2.0 * rho / (z * z - x * x));
                let direct = plateau + side;
                let g = m.stieltjes(z).unwrap();
                assert!((g - direct).norm() < 1e-9, "T={t} z={z}: {g} vs {direct}");
            }
        }
    }

    #[test]
    fn stieltjes_paper_form_agrees() {
        // G = zT/2 − (2/(βz))√((z²−α²)(z²−β²)) ∫₀¹ ds / ((1−α²s²/z²)√((1−s²)(1−k²s²)))
        let m = solve_equilibrium(16.0).unwrap();
        let z = c(0.9, 0.7);
        let gl = GaussLegendre::new(400);
        let q = m.alpha * m.alpha / (z * z);
        let integral = gl.integrate(0.0, FRAC_PI_2, |phi| {
            let s = phi.sin();
            (c(1.0, 0.0) - q * s * s).inv() / (1.0 - m.k * m.k * s * s).sqrt()
        });
        let one = c(1.0, 0.0);
        let root = z * z * (one - m.alpha * m.alpha / (z * z)).sqrt() * (one - m.beta * m.beta / (z * z)).sqrt();
        let paper = z * m.t / 2.0 - 2.0 / (m.beta * z) * root * integral;
        assert!((paper - m.stieltjes(z).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn stieltjes_examples() {
        let m = solve_equilibrium(1.0).unwrap();
        let g = m.stieltjes(c(3.0, 0.0)).unwrap();
        assert!((g.re - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14 && g.im.abs() < 1e-15);
        for t in [1.0, 16.0, 400.0] {
            let m = solve_equilibrium(t).unwrap();
            let z = c(1e6, 0.0);
            assert!(((m.stieltjes(z).unwrap() * z).re - 1.0).abs() < 1e-5);
        }
        // conjugate density: Re G(x + i0) = xT/2 on the transition region
        let m = solve_equilibrium(16.0).unwrap();
        let x = 0.5 * (m.alpha + m.beta);
        let g = m.stieltjes(c(x, 1e-7)).unwrap();
        assert!((g.re - x * 8.0).abs() < 1e-5, "{}", g.re);
        // and −Im G / π recovers the density
        assert!((-g.im / PI - m.density(x)).abs() < 1e-5);
        assert!(m.stieltjes(c(0.1, 1e-9)).is_err());
    }

    #[test]
    fn midpoint_duality_round_trip() {
        let m = solve_equilibrium(16.0).unwrap();
        assert!((m.midpoint_spectral_density(0.0).unwrap() - m.beta / PI).abs() < 1e-15);
        assert!((m.midpoint_spectral_density(PI).unwrap() - m.alpha / PI).abs() < 1e-15);
        for i in 1..50 {
            let th = PI * i as f64 / 50.0;
            let r = m.midpoint_spectral_density(th).unwrap();
            assert!((PI * m.density(PI * r) - th).abs() < 1e-8);
            assert_eq!(r, m.midpoint_spectral_density(-th).unwrap());
        }
        // T = 1: πρ₁ takes values in (0, 1]; θ = 1/2 solves ρ₁(x) = 1/(2π), x = √3
        let m = solve_equilibrium(1.0).unwrap();
        let r = m.midpoint_spectral_density(0.5).unwrap();
        assert!((PI * r - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(m.midpoint_spectral_density(2.0).unwrap(), 0.0);
    }
}

//! Master field on powers of simple loops, the planar limit and the
//! spectral density of a simple-loop holonomy.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)] // unused when a dependency links std
use num_traits::Float;

use crate::equilibrium::{solve_equilibrium, EquilibriumMeasure, Regime, CRITICAL_AREA};
use crate::specfun::{contour_integrate, gauss_kronrod, Circle, ContourOptions, GaussLegendre, QuadratureRule};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimpleMethod {
    Quadrature,
    SubcriticalSeries,
    Contour,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleLoopValue {
    pub n: i64,
    pub a1: f64,
    pub a2: f64,
    pub t: f64,
    pub value: f64,
    pub method: SimpleMethod,
}

/// One Gauss–Legendre level on `v ∈ [0, 1]` with `ρ_T` tabulated at `u = sin²(πv/2)`.
#[derive(Debug, Clone)]
struct Level {
    x: Vec<f64>,
    // x − α, kept separately so it survives when β − α is below rounding of α
    offset: Vec<f64>,
    weight: Vec<f64>,
    rho: Vec<f64>,
}

/// `φ_T(n, a₁, a₂)` for a fixed total area, with the density tabulated once.
#[derive(Debug, Clone)]
pub struct SimpleField {
    eq: EquilibriumMeasure,
    levels: Vec<Level>,
    tol: f64,
}

const LEVEL_SIZES: [usize; 6] = [24, 48, 96, 192, 384, 768];

impl SimpleField {
    pub fn new(t: f64) -> Result<Self> {
        Self::with_equilibrium(solve_equilibrium(t)?)
    }

    pub fn with_equilibrium(eq: EquilibriumMeasure) -> Result<Self> {
        let levels = LEVEL_SIZES
            .iter()
            .map(|&n| {
                let gl = GaussLegendre::new(n);
                let mut level = Level { x: Vec::with_capacity(n), offset: Vec::with_capacity(n), weight: Vec::with_capacity(n), rho: Vec::with_capacity(n) };
                // u = sin²(πv/2) removes the square-root behaviour of ρ at both edges
                for (v, w) in gl.on_interval(0.0, 1.0) {
                    let s = (FRAC_PI_2 * v).sin();
                    let u = s * s;
                    level.x.push(eq.alpha + eq.gap * u);
                    level.offset.push(eq.gap * u);
                    level.weight.push(w * FRAC_PI_2 * (PI * v).sin() * eq.gap);
                    level.rho.push(eq.density_local(u));
                }
                level
            })
            .collect();
        Ok(Self { eq, levels, tol: 1e-13 })
    }

    pub fn equilibrium(&self) -> &EquilibriumMeasure {
        &self.eq
    }

    pub fn t(&self) -> f64 {
        self.eq.t
    }

    fn check_area(&self, a1: f64) -> Result<()> {
        let t = self.eq.t;
        if !(a1 >= -1e-12 * t && a1 <= t * (1.0 + 1e-12)) {
            return Err(Error::Domain(alloc::format!("area {a1} outside [0, {t}]")));
        }
        Ok(())
    }

    /// `φ_T(n, a₁, T−a₁) = (2/nπ) ∫_α^β cosh((a₁−a₂)nx/2) sin(nπρ_T(x)) dx`.
    pub fn phi(&self, n: i64, a1: f64) -> Result<f64> {
        self.phi_with_error(n, a1).map(|(v, _)| v)
    }

    /// [`Self::phi`] with the difference between the last two quadrature levels.
    pub fn phi_with_error(&self, n: i64, a1: f64) -> Result<(f64, f64)> {
        if n == 0 {
            return Err(Error::Domain("winding power must be nonzero".into()));
        }
        self.check_area(a1)?;
        let n = n.unsigned_abs() as f64;
        let a1 = a1.clamp(0.0, self.eq.t);
        let diff = (2.0 * a1 - self.eq.t).abs();
        let scale = self.quadrature_condition(n as i64, a1);
        let mut prev = f64::NAN;
        for level in &self.levels {
            let mut acc = 0.0;
            for i in 0..level.x.len() {
                acc += level.weight[i] * (0.5 * diff * n * level.x[i]).cosh() * (n * PI * level.rho[i]).sin();
            }
            let value = 2.0 / (n * PI) * acc;
            let err = (value - prev).abs();
            if err <= self.tol * value.abs().max(scale) {
                return Ok((value, err));
            }
            prev = value;
        }
        // Near the phase transition ρ_T has structure on the scale α ≪ β;
        // fall back to adaptive quadrature with the density evaluated on the fly.
        let eq = &self.eq;
        let g = |v: f64| {
            let s = (FRAC_PI_2 * v).sin();
            let u = s * s;
            let x = eq.alpha + eq.gap * u;
            FRAC_PI_2 * (PI * v).sin() * eq.gap * (0.5 * diff * n * x).cosh() * (n * PI * eq.density_local(u)).sin()
        };
        let rule = QuadratureRule::gauss_kronrod(1e-13 * scale, 1e-12).with_budget(1 << 17);
        let (acc, err) = gauss_kronrod(g, 0.0, 1.0, &QuadratureRule { node_count: 16, ..rule })?;
        Ok((2.0 / (n * PI) * acc, 2.0 / (n * PI) * err))
    }

    /// Contour evaluation `(1/2πin) ∮ exp{−n(az − G_T(z))} dz` on a circle
    /// just outside `[−β, β]`, with `a` the smaller of the two areas.
    pub fn contour_phi(&self, n: i64, a1: f64) -> Result<f64> {
        // |integrand| reaches e^{n a r} at z = −r, so stay close to the support
        let a = a1.min(self.eq.t - a1).max(0.0);
        let margin = (1.0 / (n.unsigned_abs() as f64 * a).max(1e-300)).clamp(0.05, 0.5);
        self.contour_phi_radius(n, a1, self.eq.beta + margin)
    }

    /// Size of the quadrature integrand, `cosh(n|a₁−a₂|β/2)`, against an O(1) result.
    pub fn quadrature_condition(&self, n: i64, a1: f64) -> f64 {
        (0.5 * (2.0 * a1 - self.eq.t).abs() * n.unsigned_abs() as f64 * self.eq.beta).cosh()
    }

    /// Rough relative conditioning of [`Self::contour_phi`]: the ratio of the
    /// largest integrand value to an O(1) result.
    pub fn contour_condition(&self, n: i64, a1: f64) -> f64 {
        let a = a1.min(self.eq.t - a1).max(0.0);
        (n.unsigned_abs() as f64 * a * self.eq.beta).exp()
    }

    /// [`Self::contour_phi`] on a circle of the given radius (which must exceed `β`).
    pub fn contour_phi_radius(&self, n: i64, a1: f64, radius: f64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("winding power must be nonzero".into()));
        }
        self.check_area(a1)?;
        if !(radius > self.eq.beta) {
            return Err(Error::Domain(alloc::format!("radius {radius} does not enclose the support")));
        }
        let nf = n.unsigned_abs() as f64;
        let a = a1.min(self.eq.t - a1).max(0.0);
        let mut err = None;
        let g = |z: Complex64| match self.eq.stieltjes(z) {
            Ok(gz) => (-(z * a - gz) * nf).exp(),
            Err(e) => {
                err = Some(e);
                Complex64::new(0.0, 0.0)
            }
        };
        let opts = ContourOptions { abs_tol: 1e-13, rel_tol: 1e-13, ..Default::default() };
        let v = contour_integrate(g, &Circle::centered(radius), &opts)?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(v.re / nf)
    }
}

/// `φ_T(n, a₁, T−a₁)` by quadrature of the density.
pub fn phi_simple(n: i64, a1: f64, t: f64) -> Result<f64> {
    SimpleField::new(t)?.phi(n, a1)
}

/// Contour evaluation of `φ_T(n, a₁, T−a₁)`; independent of the density quadrature.
pub fn contour_phi_simple(n: i64, a1: f64, t: f64) -> Result<f64> {
    SimpleField::new(t)?.contour_phi(n, a1)
}

/// Subcritical series `Σ_m (−n²a₁a₂/T)^m / (m!(m+1)!)`, valid for `T ≤ π²`.
pub fn phi_simple_subcritical_series(n: i64, a1: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || t > CRITICAL_AREA {
        return Err(Error::Domain(alloc::format!("series needs 0 < T <= pi^2, got {t}")));
    }
    if !(0.0..=t).contains(&a1) {
        return Err(Error::Domain(alloc::format!("area {a1} outside [0, {t}]")));
    }
    let x = -((n * n) as f64) * a1 * (t - a1) / t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..10_000 {
        term *= x / (m as f64 * (m + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    Ok(sum)
}

/// Planar limit `(e^{−nt/2}/2πin) ∮ (1+1/z)^n e^{−ntz} dz`, summed by residues:
/// `e^{−nt/2} Σ_{k=0}^{n−1} C(n,k+1) (−nt)^k / (n·k!)`.
pub fn phi_planar(n: i64, t: f64) -> Result<f64> {
    if n < 1 || !(t >= 0.0) {
        return Err(Error::Domain(alloc::format!("planar limit needs n >= 1 and t >= 0 (got {n}, {t})")));
    }
    let nf = n as f64;
    let mut binom = nf; // C(n, 1)
    let mut power = 1.0; // (−nt)^k / k!
    let mut sum = 0.0;
    for k in 0..n {
        sum += binom * power;
        let kf = k as f64;
        binom *= (nf - kf - 1.0) / (kf + 2.0);
        power *= -nf * t / (kf + 1.0);
    }
    Ok((-0.5 * nf * t).exp() * sum / nf)
}

/// Contour quadrature of the planar limit, for cross-checking [`phi_planar`].
pub fn phi_planar_contour(n: i64, t: f64) -> Result<f64> {
    if n < 1 || !(t >= 0.0) {
        return Err(Error::Domain(alloc::format!("planar limit needs n >= 1 and t >= 0 (got {n}, {t})")));
    }
    let nf = n as f64;
    let one = Complex64::new(1.0, 0.0);
    // |(1+1/z)^n e^{−ntz}| is smallest near |z| = 1/t
    let radius = (1.0 / t.max(1e-300)).clamp(0.2, 1.0);
    let opts = ContourOptions { abs_tol: 1e-14 * (0.5 * nf * t).exp().max(1.0), ..Default::default() };
    let v = contour_integrate(|z| (one + z.inv()).powi(n as i32) * (-z * nf * t).exp(), &Circle::centered(radius), &opts)?;
    Ok((-0.5 * nf * t).exp() * v.re / nf)
}

/// `log(1 + w) − w`.
fn log1p_minus_id(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        let mut term = -w * w * 0.5;
        let mut acc = term;
        for k in 3..8 {
            term = -term * w * ((k - 1) as f64 / k as f64);
            acc += term;
        }
        acc
    } else {
        (w + 1.0).ln() - w
    }
}

fn exp_m1(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        w * (Complex64::new(1.0, 0.0) + w * (0.5 + w * (1.0 / 6.0 + w / 24.0)))
    } else {
        w.exp() - 1.0
    }
}

/// Semicircle density of variance `s` at `x`.
pub fn semicircle(s: f64, x: f64) -> f64 {
    let edge = 2.0 * s.sqrt();
    if x.abs() >= edge {
        0.0
    } else {
        ((edge - x.abs()) * (edge + x.abs())).sqrt() / (2.0 * PI * s)
    }
}

/// Limiting eigenvalue density of a simple-loop holonomy at angle `θ`:
/// the semicircle of variance `a₁a₂/T`, for `T ≤ π²`.
pub fn spectral_density_simple(t: f64, a1: f64, theta: f64) -> Result<f64> {
    if !(t > 0.0) || t > CRITICAL_AREA {
        return Err(Error::Domain(alloc::format!("spectral density needs 0 < T <= pi^2, got {t}")));
    }
    if !(a1 > 0.0 && a1 < t) {
        return Err(Error::Domain(alloc::format!("area {a1} outside (0, {t})")));
    }
    if theta.abs() > PI {
        return Err(Error::Domain(alloc::format!("theta {theta} outside [-pi, pi]")));
    }
    Ok(semicircle(a1 * (t - a1) / t, theta))
}

impl SimpleField {
    /// `φ_T(n, t, T−t) − φ_planar(n, t)` evaluated without cancellation.
    ///
    /// With `G_∞(z) = log((z+½)/(z−½))` the Stieltjes transform of the
    /// indicator of `[−½, ½]`, the difference is
    /// `(1/2πin) ∮ e^{−ntz} e^{nG_∞(z)} expm1(n(G_T − G_∞)(z)) dz`, and
    /// `G_T − G_∞` is assembled from quantities of the size of the transition
    /// region `β − α`, which is exponentially small for large `T`.
    pub fn planar_gap(&self, n: i64, t: f64) -> Result<f64> {
        if n < 1 || !(t > 0.0 && t < self.eq.t) {
            return Err(Error::Domain(alloc::format!("planar gap needs n >= 1 and 0 < t < T (got {n}, {t})")));
        }
        if self.eq.regime == Regime::Subcritical {
            return Ok(self.phi(n, t)? - phi_planar(n, t)?);
        }
        let eq = &self.eq;
        let level = self.levels.last().expect("levels");
        // mass outside the plateau on one side, = ½ − α
        let side_mass: f64 = level.weight.iter().zip(&level.rho).map(|(w, r)| w * r).sum();
        let half = Complex64::new(0.5, 0.0);
        let nf = n as f64;
        // Each log term of the plateau is paired with the matching edge, so
        // that only differences of size (β − α) or δ = ½ − α are summed.
        let g = |z: Complex64| {
            let zp = (z + half).inv();
            let zm = (z - eq.alpha).inv();
            let mut dg = log1p_minus_id(-zp * side_mass) + log1p_minus_id(-zm * side_mass);
            for i in 0..level.x.len() {
                let x = level.x[i];
                let d = level.offset[i];
                let m = level.weight[i] * level.rho[i];
                dg += (zm * d / (z - x) + zp * (side_mass - d) / (z + x)) * m;
            }
            (-z * nf * t).exp() * ((z + half) / (z - half)).powi(n as i32) * exp_m1(dg * nf)
        };
        let radius = eq.beta + 0.5;
        // the integral cancels strongly; tolerance is set by the integrand size
        let scale = g(Complex64::new(-radius, 0.0)).norm() * radius;
        let opts = ContourOptions { abs_tol: 1e-10 * scale, rel_tol: 1e-9, ..Default::default() };
        let v = contour_integrate(g, &Circle::centered(radius), &opts)?;
        Ok(v.re / nf)
    }

    /// Evaluate by the requested method.
    pub fn value(&self, n: i64, a1: f64, method: SimpleMethod) -> Result<SimpleLoopValue> {
        let t = self.eq.t;
        let value = match method {
            SimpleMethod::Quadrature => self.phi(n, a1)?,
            SimpleMethod::Contour => self.contour_phi(n, a1)?,
            SimpleMethod::SubcriticalSeries => {
                if self.eq.regime != Regime::Subcritical {
                    return Err(Error::Domain("series is only valid for T <= pi^2".into()));
                }
                phi_simple_subcritical_series(n.abs(), a1, t)?
            }
        };
        Ok(SimpleLoopValue { n, a1, a2: t - a1, t, value, method })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_symmetry() {
        for t in [1.0, CRITICAL_AREA, 16.0] {
            let f = SimpleField::new(t).unwrap();
            assert!((f.phi(1, 0.0).unwrap() - 1.0).abs() < 1e-12, "T={t}");
            for n in 1..=6 {
                for i in 1..=9 {
                    let a = t * i as f64 / 10.0;
                    let v = f.phi(n, a).unwrap_or_else(|e| panic!("T={t} n={n} a={a}: {e}"));
                    assert!(v.abs() <= 1.0 + 1e-12);
                    assert!((v - f.phi(n, t - a).unwrap()).abs() < 1e-14 * f.quadrature_condition(n, a));
                    assert_eq!(v, f.phi(-n, a).unwrap());
                }
            }
        }
        assert!(phi_simple(1, 1.5, 1.0).is_err());
        assert!(phi_simple(0, 0.5, 1.0).is_err());
    }

    #[test]
    fn half_split_at_unit_area() {
        let series = phi_simple_subcritical_series(1, 0.5, 1.0).unwrap();
        // Σ (−1/4)^m/(m!(m+1)!) summed exactly in rationals to 12 terms
        let mut exact = 0.0;
        let mut fact = 1.0;
        for m in 0..12 {
            if m > 0 {
                fact *= m as f64;
            }
            exact += (-0.25f64).powi(m) / (fact * fact * (m + 1) as f64);
        }
        assert!((series - exact).abs() < 1e-15);
        assert!((series - 0.880_101_171_489_866_7).abs() < 1e-15);
        assert!((phi_simple(1, 0.5, 1.0).unwrap() - series).abs() < 1e-12);
        assert!((contour_phi_simple(1, 0.5, 1.0).unwrap() - series).abs() < 1e-12);
    }

    #[test]
    fn three_way_agreement() {
        for t in [1.0, 4.0, 9.0] {
            let f = SimpleField::new(t).unwrap();
            for n in 1..=4 {
                for frac in [0.1, 0.3, 0.5] {
                    let a = frac * t;
                    let q = f.phi(n, a).unwrap();
                    let s = phi_simple_subcritical_series(n, a, t).unwrap();
                    let c = f.contour_phi(n, a).unwrap();
                    let tol = 1e-13 * f.contour_condition(n, a);
                    assert!((q - s).abs() < 1e-10, "T={t} n={n} a={a}: {q} vs {s}");
                    assert!((q - c).abs() < tol.max(1e-12), "T={t} n={n} a={a}: {q} vs {c}");
                }
            }
        }
        let s = phi_simple_subcritical_series(3, 0.2, 1.0).unwrap();
        assert!((contour_phi_simple(3, 0.2, 1.0).unwrap() - s).abs() < 1e-8);
    }

    #[test]
    fn supercritical_quadrature_matches_contour() {
        for t in [12.0, 16.0, 25.0, 50.0] {
            let f = SimpleField::new(t).unwrap();
            for n in 1..=3 {
                for a in [0.3, 1.0, 0.5 * t] {
                    let q = f.phi(n, a).unwrap();
                    let c = f.contour_phi(n, a).unwrap();
                    let tol = 1e-13 * (f.contour_condition(n, a) + f.quadrature_condition(n, a));
                    assert!((q - c).abs() < tol, "T={t} n={n} a={a}: {q} vs {c}");
                }
            }
        }
    }

    #[test]
    fn contour_radius_invariance() {
        let f = SimpleField::new(16.0).unwrap();
        let base = f.contour_phi(2, 0.3).unwrap();
        let beta = f.equilibrium().beta;
        for dr in [0.1, 0.5, 1.0, 2.0] {
            assert!((f.contour_phi_radius(2, 0.3, beta + dr).unwrap() - base).abs() < 1e-10);
        }
    }

    #[test]
    fn planar_limit_values() {
        for t in [0.0, 0.3, 1.0, 2.5] {
            assert!((phi_planar(1, t).unwrap() - (-t / 2.0).exp()).abs() < 1e-15);
            assert!((phi_planar(2, t).unwrap() - (-t).exp() * (1.0 - t)).abs() < 1e-15);
            for n in 1..=6 {
                let a = phi_planar(n, t).unwrap();
                let b = phi_planar_contour(n, t).unwrap();
                assert!((a - b).abs() < 1e-12, "n={n} t={t}");
            }
        }
        assert_eq!(phi_planar(2, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn spectral_density_moments() {
        let t = 1.0;
        let a1 = 0.3;
        let s = a1 * (t - a1) / t;
        let edge = 2.0 * s.sqrt();
        assert_eq!(spectral_density_simple(t, a1, edge).unwrap(), 0.0);
        assert_eq!(spectral_density_simple(t, a1, edge + 0.1).unwrap(), 0.0);
        let mid = spectral_density_simple(4.0, 2.0, 0.0).unwrap();
        assert!((mid - 2.0 / (PI * 2.0)).abs() < 1e-15);
        // moments by quadrature in θ = edge·sin(πv/2·2−π/2) to remove the edge roots
        let gl = GaussLegendre::new(200);
        for n in 1..=4 {
            let m = gl.integrate(-FRAC_PI_2, FRAC_PI_2, |phi| {
                let th = edge * phi.sin();
                (n as f64 * th).cos() * spectral_density_simple(t, a1, th).unwrap() * edge * phi.cos()
            });
            let series = phi_simple_subcritical_series(n, a1, t).unwrap();
            assert!((m - series).abs() < 1e-8, "n={n}");
        }
        // ∫θ^{2m} s_t = t^m (2m)!/(m!(m+1)!), the Catalan moments
        for (m, catalan) in [(1, 1.0), (2, 2.0), (3, 5.0)] {
            let v = gl.integrate(-FRAC_PI_2, FRAC_PI_2, |phi| {
                let th = edge * phi.sin();
                th.powi(2 * m) * semicircle(s, th) * edge * phi.cos()
            });
            assert!((v - catalan * s.powi(m)).abs() < 1e-12);
        }
        assert!(spectral_density_simple(16.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn series_is_gated() {
        assert!(phi_simple_subcritical_series(1, 1.0, 10.0).is_err());
        assert_eq!(phi_simple_subcritical_series(2, 0.0, 3.0).unwrap(), 1.0);
        let f = SimpleField::new(16.0).unwrap();
        assert!(f.value(1, 1.0, SimpleMethod::SubcriticalSeries).is_err());
    }

    #[test]
    fn planar_gap_shrinks() {
        for (n, t) in [(1, 1.0), (2, 1.0), (3, 0.5)] {
            let mut prev = f64::INFINITY;
            for big in [20.0, 50.0, 100.0, 200.0, 400.0] {
                let f = SimpleField::new(big).unwrap();
                let gap = f.planar_gap(n, t).unwrap();
                let naive = f.contour_phi(n, t).unwrap() - phi_planar(n, t).unwrap();
                assert!((naive - gap).abs() < 1e-13);
                assert!(gap > 0.0 && gap < prev, "n={n} t={t} T={big}: {gap}");
                prev = gap;
            }
            assert!(prev < 1e-80);
        }
    }
}

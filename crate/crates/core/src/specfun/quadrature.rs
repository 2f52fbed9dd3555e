use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // unused when a dependency links std
use num_traits::Float;

use crate::{Error, Result};

/// Values a quadrature rule can sum: `f64` and `Complex64`.
pub trait Scalar: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    /// Gauss–Legendre, node count doubled until two successive values agree.
    GaussLegendre,
    /// Globally adaptive 7/15-point Gauss–Kronrod; `node_count` is the number of initial panels.
    GaussKronrod,
    /// Trapezoid rule for integrands periodic on the interval, doubled until converged.
    PeriodicTrapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub node_count: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of integrand evaluations.
    pub budget: usize,
}

impl QuadratureRule {
    pub fn new(kind: RuleKind, node_count: usize, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if node_count < 2 || !(abs_tol > 0.0) || !(rel_tol > 0.0) {
            return Err(Error::Domain(alloc::format!(
                "quadrature rule needs node_count >= 2 and positive tolerances \
                 (got {node_count}, {abs_tol}, {rel_tol})"
            )));
        }
        Ok(Self { kind, node_count, abs_tol, rel_tol, budget: 1 << 20 })
    }

    pub fn gauss_kronrod(abs_tol: f64, rel_tol: f64) -> Self {
        Self { kind: RuleKind::GaussKronrod, node_count: 2, abs_tol, rel_tol, budget: 1 << 20 }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss_kronrod(1e-13, 1e-13)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Nodes mapped to `[a, b]` with weights scaled by the half-length.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<S: Scalar>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> S) -> S {
        let mut acc = S::default();
        for (x, w) in self.on_interval(a, b) {
            acc = acc + f(x) * w;
        }
        acc
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate a real function on `[a, b]`; returns `(value, error estimate)`.
pub fn integrate(f: impl FnMut(f64) -> f64, a: f64, b: f64, rule: &QuadratureRule) -> Result<(f64, f64)> {
    integrate_scalar(f, a, b, rule)
}

/// [`integrate`] for any [`Scalar`] integrand (real or complex).
pub fn integrate_scalar<S: Scalar>(
    mut f: impl FnMut(f64) -> S,
    a: f64,
    b: f64,
    rule: &QuadratureRule,
) -> Result<(S, f64)> {
    match rule.kind {
        RuleKind::GaussKronrod => gauss_kronrod(f, a, b, rule),
        RuleKind::GaussLegendre => {
            let mut n = rule.node_count;
            let mut prev = GaussLegendre::new(n).integrate(a, b, &mut f);
            let mut used = n;
            loop {
                n *= 2;
                used += n;
                if used > rule.budget {
                    return Err(Error::NoConvergence(alloc::format!(
                        "Gauss-Legendre doubling exceeded {} evaluations",
                        rule.budget
                    )));
                }
                let next = GaussLegendre::new(n).integrate(a, b, &mut f);
                let err = (next - prev).magnitude();
                if err <= rule.tolerance(next.magnitude()) {
                    return Ok((next, err));
                }
                prev = next;
            }
        }
        RuleKind::PeriodicTrapezoid => {
            let mut n = rule.node_count;
            let h = b - a;
            let mut sum = S::default();
            for i in 0..n {
                sum = sum + f(a + h * i as f64 / n as f64);
            }
            let mut prev = sum * (h / n as f64);
            loop {
                if 2 * n > rule.budget {
                    return Err(Error::NoConvergence(alloc::format!(
                        "trapezoid doubling exceeded {} evaluations",
                        rule.budget
                    )));
                }
                for i in 0..n {
                    sum = sum + f(a + h * (2 * i + 1) as f64 / (2 * n) as f64);
                }
                n *= 2;
                let next = sum * (h / n as f64);
                let err = (next - prev).magnitude();
                if err <= rule.tolerance(next.magnitude()) {
                    return Ok((next, err));
                }
                prev = next;
            }
        }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn kronrod15<S: Scalar>(f: &mut impl FnMut(f64) -> S, a: f64, b: f64) -> (S, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    (k * h, (k - g).magnitude() * h.abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) with a priority on the largest local error.
pub fn gauss_kronrod<S: Scalar>(
    mut f: impl FnMut(f64) -> S,
    a: f64,
    b: f64,
    rule: &QuadratureRule,
) -> Result<(S, f64)> {
    let panels = rule.node_count.max(1);
    let mut segs: Vec<(f64, f64, S, f64)> = Vec::with_capacity(64);
    for i in 0..panels {
        let lo = a + (b - a) * i as f64 / panels as f64;
        let hi = a + (b - a) * (i + 1) as f64 / panels as f64;
        let (v, e) = kronrod15(&mut f, lo, hi);
        segs.push((lo, hi, v, e));
    }
    let mut evals = 15 * panels;
    loop {
        let mut total = S::default();
        let mut err = 0.0;
        let mut worst = 0;
        for (i, s) in segs.iter().enumerate() {
            total = total + s.2;
            err += s.3;
            if s.3 > segs[worst].3 {
                worst = i;
            }
        }
        if err <= rule.tolerance(total.magnitude()) {
            return Ok((total, err));
        }
        let (lo, hi, _, _) = segs[worst];
        let mid = 0.5 * (lo + hi);
        if evals + 30 > rule.budget || mid <= lo || mid >= hi {
            // Round-off floor: accept when the worst panel can no longer be split
            // and the remaining error is at the level of the result's precision.
            if err <= 1e3 * f64::EPSILON * total.magnitude().max(rule.abs_tol) {
                return Ok((total, err));
            }
            return Err(Error::NoConvergence(alloc::format!(
                "adaptive Gauss-Kronrod: error estimate {err:e} after {evals} evaluations"
            )));
        }
        let left = kronrod15(&mut f, lo, mid);
        let right = kronrod15(&mut f, mid, hi);
        evals += 30;
        segs[worst] = (lo, mid, left.0, left.1);
        segs.push((mid, hi, right.0, right.1));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn gauss_legendre_nodes_are_interior_and_exact_on_polynomials() {
        for n in [2, 3, 7, 20, 64, 257] {
            let gl = GaussLegendre::new(n);
            assert!(gl.nodes.iter().all(|x| x.abs() < 1.0));
            let wsum: f64 = gl.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13);
            // degree 2n-1 exactness
            let d = (2 * n - 1) as i32;
            let v = gl.integrate(0.0, 1.0, |x| x.powi(d));
            assert!((v - 1.0 / (d as f64 + 1.0)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn simple_integrals_all_rules() {
        let rules = [
            QuadratureRule::new(RuleKind::GaussLegendre, 4, 1e-14, 1e-14).unwrap(),
            QuadratureRule::new(RuleKind::GaussKronrod, 2, 1e-14, 1e-14).unwrap(),
        ];
        for rule in &rules {
            let (v, _) = integrate(|_| 1.0, 0.0, 1.0, rule).unwrap();
            assert!((v - 1.0).abs() < 1e-14);
            let (v, _) = integrate(f64::sin, 0.0, PI, rule).unwrap();
            assert!((v - 2.0).abs() < 1e-12);
            let (v, _) = integrate(|x| x * x, 0.0, 2.0, rule).unwrap();
            assert!((v - 8.0 / 3.0).abs() < 1e-13);
        }
        let trap = QuadratureRule::new(RuleKind::PeriodicTrapezoid, 4, 1e-14, 1e-14).unwrap();
        let (v, _) = integrate(|x| 1.0 / (2.0 + x.cos()), 0.0, 2.0 * PI, &trap).unwrap();
        assert!((v - 2.0 * PI / 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bad_rule_parameters() {
        assert!(QuadratureRule::new(RuleKind::GaussLegendre, 1, 1e-8, 1e-8).is_err());
        assert!(QuadratureRule::new(RuleKind::GaussLegendre, 8, 0.0, 1e-8).is_err());
    }

    #[test]
    fn adaptive_handles_endpoint_peak_and_complex_values() {
        let rule = QuadratureRule::gauss_kronrod(1e-13, 1e-13);
        let (v, _) = integrate(|x| x.sqrt(), 0.0, 1.0, &rule).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        let (v, _) = integrate_scalar(|x| Complex64::new(0.0, x).exp(), 0.0, PI, &rule).unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let rule = QuadratureRule::gauss_kronrod(1e-15, 1e-15).with_budget(100);
        let r = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, &rule);
        assert!(matches!(r, Err(Error::NoConvergence(_))));
    }
}

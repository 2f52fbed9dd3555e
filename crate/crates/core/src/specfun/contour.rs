use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)] // unused when a dependency links std
use num_traits::Float;

use crate::{Error, Result};

/// A smooth closed curve `t ↦ z(t)`, `t ∈ [0, 1)`, positively oriented.
pub trait Contour {
    /// Returns `(z(t), z'(t))`.
    fn eval(&self, t: f64) -> (Complex64, Complex64);
}

#[derive(Debug, Clone, Copy)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn centered(radius: f64) -> Self {
        Self { center: Complex64::new(0.0, 0.0), radius }
    }
}

impl Contour for Circle {
    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        let w = Complex64::from_polar(1.0, TAU * t);
        (self.center + w * self.radius, w * Complex64::new(0.0, TAU * self.radius))
    }
}

/// Axis-aligned ellipse with semi-axes `a` (real direction) and `b`.
#[derive(Debug, Clone, Copy)]
pub struct Ellipse {
    pub center: Complex64,
    pub a: f64,
    pub b: f64,
}

impl Ellipse {
    /// Smallest-area ellipse of this family through the corners of the box
    /// `[x0 - margin, x1 + margin] × [-margin, margin]`, so it encloses the
    /// stadium of width `margin` around the real segment `[x0, x1]`.
    pub fn around_segment(x0: f64, x1: f64, margin: f64) -> Self {
        let half = 0.5 * (x1 - x0) + margin;
        Self {
            center: Complex64::new(0.5 * (x0 + x1), 0.0),
            a: core::f64::consts::SQRT_2 * half,
            b: core::f64::consts::SQRT_2 * margin,
        }
    }
}

impl Contour for Ellipse {
    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        let (s, c) = (TAU * t).sin_cos();
        (
            self.center + Complex64::new(self.a * c, self.b * s),
            Complex64::new(-self.a * s, self.b * c) * TAU,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions {
    pub initial_nodes: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_nodes: usize,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { initial_nodes: 32, abs_tol: 1e-13, rel_tol: 0.0, max_nodes: 1 << 18 }
    }
}

/// `(1/2πi) ∮ g(z) dz` by the periodic trapezoid rule, doubling the node
/// count until two successive values differ by less than the tolerance.
pub fn contour_integrate(
    mut g: impl FnMut(Complex64) -> Complex64,
    contour: &impl Contour,
    opts: &ContourOptions,
) -> Result<Complex64> {
    let mut n = opts.initial_nodes.max(4);
    let mut sum = Complex64::new(0.0, 0.0);
    // Σ|g dz|, for the rounding floor of the sum
    let mut mass = 0.0;
    let mut term = |t: f64| {
        let (z, dz) = contour.eval(t);
        g(z) * dz
    };
    for i in 0..n {
        let v = term(i as f64 / n as f64);
        mass += v.norm();
        sum += v;
    }
    let scale = Complex64::new(0.0, -1.0 / TAU);
    let mut prev = sum / n as f64 * scale;
    loop {
        if 2 * n > opts.max_nodes {
            return Err(Error::NoConvergence(alloc::format!(
                "contour integral not converged with {n} nodes (singularity near the contour?)"
            )));
        }
        for i in 0..n {
            let v = term((2 * i + 1) as f64 / (2 * n) as f64);
            mass += v.norm();
            sum += v;
        }
        n *= 2;
        let next = sum / n as f64 * scale;
        let floor = 8.0 * f64::EPSILON * mass / (n as f64 * TAU);
        if (next - prev).norm() <= opts.abs_tol.max(opts.rel_tol * next.norm()).max(floor) {
            return Ok(next);
        }
        prev = next;
    }
}

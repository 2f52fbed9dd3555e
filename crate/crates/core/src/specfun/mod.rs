//! Special functions and quadrature primitives.

mod contour;
mod elliptic;
mod quadrature;

pub use contour::{contour_integrate, Circle, Contour, ContourOptions, Ellipse};
pub use elliptic::{complete_elliptic_e, complete_elliptic_k, elliptic_ke_complement};
pub use quadrature::{
    gauss_kronrod, integrate, integrate_scalar, GaussLegendre, QuadratureRule, RuleKind, Scalar,
};

/// Bisection for a sign change of `f` on `[lo, hi]`, run until the midpoint
/// is no longer distinct from an endpoint. `f(lo)` and `f(hi)` must differ in sign.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let f_lo = f(lo);
    let lo_negative = f_lo < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

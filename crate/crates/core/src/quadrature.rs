//! Adaptive Gauss-Legendre integration for smooth complex-valued integrands.

use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use thiserror::Error;

/// Points per panel of the base rule.
pub const PANEL_ORDER: usize = 20;

const MAX_DEPTH: u32 = 48;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("interval [{a}, {b}] is not finite")]
    NonFinite { a: f64, b: f64 },
    #[error("no convergence on [{a}, {b}]: error estimate {estimate:e} above {tolerance:e}")]
    NoConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        tolerance: f64,
    },
}

/// Value of an integral together with the accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

fn base_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(PANEL_ORDER)
            .expect("panel order is at least 2")
            .as_node_weight_pairs()
            .to_vec()
    })
}

/// Fixed-order Gauss-Legendre panel on `[a, b]`.
pub fn panel<F>(f: &F, a: f64, b: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in base_rule() {
        acc += f(mid + half * x) * w;
    }
    acc * half
}

/// Integrates `f` over `[a, b]` by recursive bisection until the two-panel
/// refinement agrees with the parent panel to within `tol` (absolute,
/// distributed proportionally to panel width).
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature, QuadratureError>
where
    F: Fn(f64) -> Complex64,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::NonFinite { a, b });
    }
    if a == b {
        return Ok(Quadrature {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let whole = panel(&f, a, b);
    let mut out = Quadrature {
        value: Complex64::new(0.0, 0.0),
        error: 0.0,
        evaluations: PANEL_ORDER,
    };
    recurse(&f, a, b, whole, tol, (b - a).abs(), 0, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    total_width: f64,
    depth: u32,
    out: &mut Quadrature,
) -> Result<(), QuadratureError>
where
    F: Fn(f64) -> Complex64,
{
    let mid = 0.5 * (a + b);
    let left = panel(f, a, mid);
    let right = panel(f, mid, b);
    out.evaluations += 2 * PANEL_ORDER;
    let refined = left + right;
    let estimate = (refined - whole).norm();
    let local_tol = tol * (b - a).abs() / total_width;
    if estimate <= local_tol.max(f64::EPSILON * refined.norm()) {
        out.value += refined;
        out.error += estimate;
        return Ok(());
    }
    if depth >= MAX_DEPTH {
        return Err(QuadratureError::NoConvergence {
            a,
            b,
            estimate,
            tolerance: local_tol,
        });
    }
    recurse(f, a, mid, left, tol, total_width, depth + 1, out)?;
    recurse(f, mid, b, right, tol, total_width, depth + 1, out)
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64), QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let q = integrate(|x| Complex64::new(f(x), 0.0), a, b, tol)?;
    Ok((q.value.re, q.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate_real(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, 1e-12).unwrap();
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        let k = 37.0;
        let q = integrate(|x| Complex64::new(0.0, k * x).exp(), 0.0, 3.0, 1e-12).unwrap();
        let exact = (Complex64::new(0.0, 3.0 * k).exp() - 1.0) / Complex64::new(0.0, k);
        assert!((q.value - exact).norm() < 1e-11);
    }

    #[test]
    fn kink_forces_bisection() {
        let (v, _) = integrate_real(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-9);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let (v, _) = integrate_real(f64::exp, 1.0, 0.0, 1e-12).unwrap();
        assert!((v + (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn infinite_limit_rejected() {
        assert!(integrate_real(|x| x, 0.0, f64::INFINITY, 1e-9).is_err());
    }
}

//! Quantitative verification of computed solutions: the Pohozaev integral
//! identities, the flux (mass) identities, asymptotic-slope recovery, and the
//! h <= w0 + w1 comparison.
//!
//! Pairing each equation with x·grad w and integrating over the plane gives
//! integral identities that pin two moments of the solution to closed forms
//! in (gamma0, gamma1). For radial fields the left side telescopes exactly:
//! ∫ (x·grad w) Delta w dx = pi [ (r w')^2 ]_0^inf = -pi gamma^2, while the
//! right side integrates by parts to -∫ (A + 2B + C) dx with A = 1 - e^{2w0},
//! B = 1 - e^{w1-w0}, C = 1 - e^{-2w1}. Combining with the two flux
//! identities ∫ Delta w_i dx = -2 pi gamma_i and solving the linear system
//! for the three integrals yields, for (a, b) = (2, 2):
//!
//! ```text
//!     ∫ (1 - e^{2 w0})  dx =  (pi/4) (6 g0 + 2 g1 - g0^2 - g1^2)
//!     ∫ (1 - e^{-2 w1}) dx = -(pi/4) (2 g0 + 6 g1 + g0^2 + g1^2)
//! ```
//!
//! The fluxes hold for every (a, b); the Pohozaev pair is specific to (2, 2)
//! and is skipped (reported as unavailable) for other exponents.

use crate::grid::{self, RadialField};
use crate::toda::{BoundaryData, Solution};
use serde::Serialize;
use std::f64::consts::PI;

/// One identity: expected vs measured, with the relative error normalized by
/// 1 + |expected| so zero targets are covered.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityCheck {
    pub expected: f64,
    pub measured: f64,
    pub rel_err: f64,
}

impl IdentityCheck {
    fn new(expected: f64, measured: f64) -> Self {
        IdentityCheck {
            expected,
            measured,
            rel_err: (measured - expected).abs() / (1.0 + expected.abs()),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeCheck {
    pub requested: f64,
    pub fitted: f64,
    pub abs_err: f64,
}

/// Full verification record for one solution.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    /// Pohozaev checks; None unless (a, b) = (2, 2), where the closed forms
    /// hold (deriving them for other exponents needs the pairing argument
    /// redone for that system).
    pub pohozaev0: Option<IdentityCheck>,
    pub pohozaev1: Option<IdentityCheck>,
    pub pohozaev_status: String,
    pub flux0: IdentityCheck,
    pub flux1: IdentityCheck,
    pub slope0: SlopeCheck,
    pub slope1: SlopeCheck,
    /// max over nodes of the positive part of the h-vs-(w0+w1) comparison
    /// defect (orientation-aware for mirrored solves).
    pub h_comparison_violation: f64,
    /// sup-norm residual of the discrete system in the log-radial form.
    pub residual: f64,
}

/// Closed-form Pohozaev expectations for (a, b) = (2, 2).
pub fn pohozaev_expected(bd: BoundaryData) -> (f64, f64) {
    let (g0, g1) = (bd.gamma0, bd.gamma1);
    (
        PI / 4.0 * (6.0 * g0 + 2.0 * g1 - g0 * g0 - g1 * g1),
        -PI / 4.0 * (2.0 * g0 + 6.0 * g1 + g0 * g0 + g1 * g1),
    )
}

/// Flux expectations: ∫ Delta w_i dx = -2 pi gamma_i, valid for every (a, b).
pub fn flux_expected(bd: BoundaryData) -> (f64, f64) {
    (-2.0 * PI * bd.gamma0, -2.0 * PI * bd.gamma1)
}

/// Left-hand side of the pairing identity, computed by quadrature:
/// ∫ (x·grad w0) RHS0 + (x·grad w1) RHS1 dx with x·grad w = dw/ds.
/// Equals -pi (gamma0^2 + gamma1^2) for a solution; exposed for tests that
/// re-derive the closed forms numerically term by term.
pub fn pairing_integral(sol: &Solution) -> f64 {
    let grid = sol.w0.grid();
    let d = grid.spacing();
    let mut vals = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        // centered dw/ds inside, one-sided at the ends
        let dw = |w: &RadialField| -> f64 {
            if i == 0 {
                (w[1] - w[0]) / d
            } else if i == grid.len() - 1 {
                (w[i] - w[i - 1]) / d
            } else {
                (w[i + 1] - w[i - 1]) / (2.0 * d)
            }
        };
        let (f, g) = sol.spec.rhs(sol.w0[i], sol.w1[i]);
        vals.push(dw(&sol.w0) * f + dw(&sol.w1) * g);
    }
    let f = RadialField::new(grid, vals).expect("finite integrand");
    grid::integrate_plane(&f)
}

/// Measure every identity for a converged solution. Never fails; out-of-scope
/// checks are reported as unavailable.
pub fn verify(sol: &Solution) -> VerificationReport {
    let grid = sol.w0.grid();
    let window = grid::default_slope_window(grid);
    let bd = sol.boundary;

    let (fit_g0, fit_a0) = grid::fit_log_slope(&sol.w0, window.clone()).unwrap_or((0.0, 0.0));
    let (fit_g1, fit_a1) = grid::fit_log_slope(&sol.w1, window).unwrap_or((0.0, 0.0));

    let is22 = (sol.spec.a() - 2.0).abs() < 1e-12 && (sol.spec.b() - 2.0).abs() < 1e-12;
    let (pohozaev0, pohozaev1, pohozaev_status) = if is22 {
        let (p0e, p1e) = pohozaev_expected(bd);
        let p0m = integrate_with_inner_correction(
            &sol.w0.map(|v| 1.0 - (2.0 * v).exp()),
            2.0 * fit_g0,
            2.0 * fit_a0,
        );
        let p1m = integrate_with_inner_correction(
            &sol.w1.map(|v| 1.0 - (-2.0 * v).exp()),
            -2.0 * fit_g1,
            -2.0 * fit_a1,
        );
        (
            Some(IdentityCheck::new(p0e, p0m)),
            Some(IdentityCheck::new(p1e, p1m)),
            "ok".to_string(),
        )
    } else {
        (
            None,
            None,
            "not available (derive the pairing identity for these exponents if needed)".to_string(),
        )
    };

    let (f0e, f1e) = flux_expected(bd);
    let a = sol.spec.a();
    let b = sol.spec.b();
    let flux0_field = sol.w0.zip_map(&sol.w1, |u0, u1| (a * u0).exp() - (u1 - u0).exp());
    let flux1_field = sol.w0.zip_map(&sol.w1, |u0, u1| (u1 - u0).exp() - (-b * u1).exp());
    let flux0 = IdentityCheck::new(f0e, grid::integrate_plane(&flux0_field));
    let flux1 = IdentityCheck::new(f1e, grid::integrate_plane(&flux1_field));

    let h_comparison_violation = (0..sol.h.len())
        .map(|i| {
            let gap = sol.h[i] - sol.w0[i] - sol.w1[i];
            if sol.mirrored {
                -gap
            } else {
                gap
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);

    VerificationReport {
        pohozaev0,
        pohozaev1,
        pohozaev_status,
        flux0,
        flux1,
        slope0: SlopeCheck {
            requested: bd.gamma0,
            fitted: fit_g0,
            abs_err: (fit_g0 - bd.gamma0).abs(),
        },
        slope1: SlopeCheck {
            requested: bd.gamma1,
            fitted: fit_g1,
            abs_err: (fit_g1 - bd.gamma1).abs(),
        },
        h_comparison_violation,
        residual: grid::pde_residual_s(&sol.w0, &sol.w1, &sol.spec),
    }
}

/// Trapezoid integral over the annulus plus the analytic estimate of the
/// missed inner disk: the integrand behaves like 1 - e^{beta} r^{alpha} below
/// r_min, contributing pi r_min^2 - 2 pi e^{beta} r_min^{2+alpha} / (2+alpha).
fn integrate_with_inner_correction(f: &RadialField, alpha: f64, beta: f64) -> f64 {
    let grid = f.grid();
    let raw = grid::integrate_plane(f);
    let rmin2 = (2.0 * grid.s_min()).exp();
    let mut corr = PI * rmin2;
    if 2.0 + alpha > 0.05 {
        corr -= 2.0 * PI * beta.exp() * ((2.0 + alpha) * grid.s_min()).exp() / (2.0 + alpha);
    }
    raw + corr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use crate::toda::{solve, SolveConfig, SystemSpec};

    #[test]
    fn pohozaev_expected_values() {
        let (p0, p1) = pohozaev_expected(BoundaryData::new(0.0, 0.0));
        assert_eq!((p0, p1), (0.0, 0.0));
        // (3, 1): (pi/4)(18+2-9-1) = 2.5 pi and -(pi/4)(6+6+9+1) = -5.5 pi
        let (p0, p1) = pohozaev_expected(BoundaryData::new(3.0, 1.0));
        assert!((p0 - 2.5 * PI).abs() < 1e-12);
        assert!((p1 + 5.5 * PI).abs() < 1e-12);
        // (3/5, 1/5): 0.9 pi and -0.7 pi
        let (p0, p1) = pohozaev_expected(BoundaryData::new(0.6, 0.2));
        assert!((p0 - 0.9 * PI).abs() < 1e-12);
        assert!((p1 + 0.7 * PI).abs() < 1e-12);
    }

    #[test]
    fn flux_expected_values() {
        let (f0, f1) = flux_expected(BoundaryData::new(3.0, 1.0));
        assert!((f0 + 6.0 * PI).abs() < 1e-12);
        assert!((f1 + 2.0 * PI).abs() < 1e-12);
        let (f0, f1) = flux_expected(BoundaryData::new(1.0 / 3.0, 1.0));
        assert!((f0 + 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((f1 + 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn zero_solution_reports_zero() {
        let spec = SystemSpec::preset(2, 2).unwrap();
        let sol = solve(
            &spec,
            BoundaryData::new(0.0, 0.0),
            RadialGrid::default_grid(),
            &SolveConfig::default(),
        )
        .unwrap();
        let rep = verify(&sol);
        let p0 = rep.pohozaev0.unwrap();
        assert!(p0.expected.abs() < 1e-12);
        // the inner-disk correction contributes pi r_min^2 ~ 2e-12
        assert!(p0.measured.abs() < 1e-10);
        assert!(rep.flux0.measured.abs() < 1e-10);
        assert_eq!(rep.h_comparison_violation, 0.0);
    }

    #[test]
    fn interior_identities_hold_to_quadrature_accuracy() {
        let spec = SystemSpec::preset(2, 2).unwrap();
        let sol = solve(
            &spec,
            BoundaryData::new(0.6, 0.2),
            RadialGrid::default_grid(),
            &SolveConfig::default(),
        )
        .unwrap();
        let rep = verify(&sol);
        let p0 = rep.pohozaev0.unwrap();
        let p1 = rep.pohozaev1.unwrap();
        assert!(p0.rel_err < 1e-4, "pohozaev0 rel err {}", p0.rel_err);
        assert!(p1.rel_err < 1e-4, "pohozaev1 rel err {}", p1.rel_err);
        assert!(rep.flux0.rel_err < 1e-4);
        assert!(rep.flux1.rel_err < 1e-4);
        assert!(rep.slope0.abs_err < 0.02);
        assert!(rep.slope1.abs_err < 0.02);
        assert!(rep.h_comparison_violation <= 1e-8);
        assert!(rep.residual < 1e-6);
    }

    #[test]
    fn pairing_integral_matches_gamma_squares() {
        // Independent route to the closed forms: the pairing integral must
        // equal -pi (g0^2 + g1^2) on a converged solution.
        let spec = SystemSpec::preset(2, 2).unwrap();
        let bd = BoundaryData::new(0.6, 0.2);
        let sol = solve(&spec, bd, RadialGrid::default_grid(), &SolveConfig::default()).unwrap();
        let lhs = pairing_integral(&sol);
        let rhs = -PI * (bd.gamma0 * bd.gamma0 + bd.gamma1 * bd.gamma1);
        assert!(
            (lhs - rhs).abs() / rhs.abs() < 5e-3,
            "pairing {lhs} vs {rhs}"
        );
    }

    #[test]
    fn range_bounds_are_sharp_in_measured_slopes() {
        // The upper bounds of the solvable range restated measurably: the
        // fitted singular strengths of any admissible solve satisfy
        // gamma0 - gamma1 <= 2 + tol and b gamma1 <= 2 + tol, with near
        // equality at a boundary target.
        let spec = SystemSpec::preset(2, 2).unwrap();
        let sol = solve(
            &spec,
            BoundaryData::new(1.0 / 3.0, 1.0),
            RadialGrid::default_grid(),
            &SolveConfig::default(),
        )
        .unwrap();
        let rep = verify(&sol);
        let tol = 0.05;
        assert!(rep.slope0.fitted - rep.slope1.fitted <= 2.0 + tol);
        assert!(2.0 * rep.slope1.fitted <= 2.0 + tol);
        // gamma1 = 2/b is active here: the fitted value sits against the cap
        assert!(2.0 * rep.slope1.fitted > 2.0 - tol, "fitted {}", rep.slope1.fitted);
    }

    #[test]
    fn non22_spec_skips_pohozaev() {
        let spec = SystemSpec::preset(2, 1).unwrap();
        let sol = solve(
            &spec,
            BoundaryData::new(0.4, 0.3),
            RadialGrid::default_grid(),
            &SolveConfig::default(),
        )
        .unwrap();
        let rep = verify(&sol);
        assert!(rep.pohozaev0.is_none());
        assert!(rep.pohozaev_status.contains("not available"));
        assert!(rep.flux0.rel_err < 1e-4, "flux0 {}", rep.flux0.rel_err);
        assert!(rep.flux1.rel_err < 1e-4);
    }
}

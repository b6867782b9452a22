//! Scalar comparison problems bracketing the coupled system: the function h
//! with  Delta h = e^{sigma h} - 1  and the sub-solutions q0, q1 with
//!
//! ```text
//!     Delta q0 = e^{a q0} - e^{h - 2 q0}
//!     Delta q1 = e^{2 q1 - h} - e^{-b q1}
//! ```
//!
//! all with slope gamma at the inner truncation and 0 at the outer one. Every
//! solution of the coupled system lies between (q0, q1) and 0, and h bounds
//! w0 + w1 from below.
//!
//! Each problem is solved by a linearized sweep: subtract c(s)·u from both
//! sides with c frozen from the previous iterate so the right-hand side is
//! non-increasing in u on the bracket, then solve the linear BVP. For h the
//! constant shift sigma makes the sweep a classical monotone scheme; for q0
//! and q1 the shift freezes each exponential at the end of the bracket where
//! its derivative is largest.

use crate::error::{Error, Result};
use crate::grid::{self, RadialField, RadialGrid};
use crate::toda::SystemSpec;

/// Tolerances for the scalar sweeps.
#[derive(Debug, Clone, Copy)]
pub struct ScalarConfig {
    /// sup-norm difference between successive iterates at which to stop.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ScalarConfig {
    fn default() -> Self {
        ScalarConfig {
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

/// Which scalar problem a [`ScalarProblem`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    H,
    Q0,
    Q1,
}

/// Descriptor for one scalar solve. `h_input` is required for Q0/Q1.
#[derive(Debug, Clone)]
pub struct ScalarProblem {
    pub kind: ScalarKind,
    /// Prescribed log-slope at the origin; must be >= 0 (the negative range
    /// is reached through the system involution, not here).
    pub gamma: f64,
    /// Exponent in the H equation; ignored for Q0/Q1.
    pub sigma: f64,
    pub h_input: Option<RadialField>,
}

impl ScalarProblem {
    pub fn solve(&self, grid: RadialGrid, spec: &SystemSpec, cfg: &ScalarConfig) -> Result<RadialField> {
        match self.kind {
            ScalarKind::H => solve_h(grid, self.gamma, self.sigma, cfg),
            ScalarKind::Q0 => {
                let h = self.h_input.as_ref().ok_or_else(|| Error::invalid("Q0 needs h_input"))?;
                solve_q0(grid, self.gamma, h, spec, cfg)
            }
            ScalarKind::Q1 => {
                let h = self.h_input.as_ref().ok_or_else(|| Error::invalid("Q1 needs h_input"))?;
                solve_q1(grid, self.gamma, h, spec, cfg)
            }
        }
    }
}

/// Shared sweep driver: repeatedly solve
/// (Delta - c) u_next = rhs(u_prev) - c u_prev with c = shift(u_prev).
fn sweep(
    grid: RadialGrid,
    gamma: f64,
    cfg: &ScalarConfig,
    context: &str,
    shift: impl Fn(&RadialField) -> RadialField,
    rhs: impl Fn(&RadialField) -> RadialField,
) -> Result<RadialField> {
    let mut u = RadialField::zeros(grid);
    let mut delta = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        let c = shift(&u);
        let cu = u.zip_map(&c, |uv, cv| uv * cv);
        let f = rhs(&u).zip_map(&cu, |gv, x| gv - x);
        let next = grid::solve_linear_bvp(grid, &c, &f, gamma, 0.0)?;
        delta = next.max_abs_diff(&u);
        u = next;
        if delta < cfg.tol {
            return Ok(u);
        }
    }
    Err(Error::NoConvergence {
        context: context.to_string(),
        iterations: cfg.max_iter,
        last_delta: delta,
        residual: f64::NAN,
        last_iterate: Box::new(u),
    })
}

/// Solve  Delta h = e^{sigma h} - 1  with h'(s_min) = gamma, h(s_max) = 0 by
/// the monotone iteration (Delta - sigma) h_next = e^{sigma h} - 1 - sigma h
/// started from 0. Iterates are non-increasing; the limit satisfies h <= 0.
pub fn solve_h(grid: RadialGrid, gamma: f64, sigma: f64, cfg: &ScalarConfig) -> Result<RadialField> {
    if gamma < 0.0 {
        return Err(Error::invalid(format!("solve_h needs gamma >= 0, got {gamma}")));
    }
    if sigma <= 0.0 {
        return Err(Error::invalid(format!("solve_h needs sigma > 0, got {sigma}")));
    }
    sweep(
        grid,
        gamma,
        cfg,
        "solve_h",
        |_| RadialField::constant(grid, sigma),
        move |u| u.map(|v| (sigma * v).exp() - 1.0),
    )
}

/// Fitted inner slope of a profile, used to detect edge-of-range data.
fn fitted_gamma(f: &RadialField) -> f64 {
    grid::fit_log_slope(f, grid::default_slope_window(f.grid()))
        .map(|(s, _)| s)
        .unwrap_or(0.0)
}

const EDGE_TOL: f64 = 1e-9;
const EPS_LADDER: [f64; 3] = [0.1, 0.05, 0.025];
const LADDER_ACCEPT: f64 = 1e-6;

/// Solve  Delta q0 = e^{a q0} - e^{h - 2 q0}  with slope gamma0 and decay.
///
/// The direct sweep needs gamma0 - (gamma_h - gamma0) < 2 (the singular term
/// e^{h-2q0} must stay integrable); at the edge the solution is obtained as
/// the decreasing limit of solves at gamma0 - eps, Richardson-extrapolated.
pub fn solve_q0(
    grid: RadialGrid,
    gamma0: f64,
    h: &RadialField,
    spec: &SystemSpec,
    cfg: &ScalarConfig,
) -> Result<RadialField> {
    if gamma0 < 0.0 {
        return Err(Error::invalid(format!("solve_q0 needs gamma0 >= 0, got {gamma0}")));
    }
    if h.grid() != grid {
        return Err(Error::invalid("h lives on a different grid"));
    }
    let gh = fitted_gamma(h);
    if 2.0 * gamma0 - gh < 2.0 - EDGE_TOL {
        return q0_direct(grid, gamma0, h, spec, cfg);
    }
    eps_ladder(gamma0, |g| q0_direct(grid, g, h, spec, cfg))
}

fn q0_direct(
    grid: RadialGrid,
    gamma0: f64,
    h: &RadialField,
    spec: &SystemSpec,
    cfg: &ScalarConfig,
) -> Result<RadialField> {
    let a = spec.a();
    let h = h.clone();
    sweep(
        grid,
        gamma0,
        cfg,
        "solve_q0",
        {
            let h = h.clone();
            move |u| u.zip_map(&h, |q, hv| a + 2.0 * (hv - 2.0 * q).exp())
        },
        move |u| u.zip_map(&h, |q, hv| (a * q).exp() - (hv - 2.0 * q).exp()),
    )
}

/// Solve  Delta q1 = e^{2 q1 - h} - e^{-b q1}  with slope gamma1 and decay.
/// Edge of range is gamma1 = 2/b, handled by the same eps-ladder.
pub fn solve_q1(
    grid: RadialGrid,
    gamma1: f64,
    h: &RadialField,
    spec: &SystemSpec,
    cfg: &ScalarConfig,
) -> Result<RadialField> {
    if gamma1 < 0.0 {
        return Err(Error::invalid(format!("solve_q1 needs gamma1 >= 0, got {gamma1}")));
    }
    if h.grid() != grid {
        return Err(Error::invalid("h lives on a different grid"));
    }
    if gamma1 < 2.0 / spec.b() - EDGE_TOL {
        return q1_direct(grid, gamma1, h, spec, cfg);
    }
    eps_ladder(gamma1, |g| q1_direct(grid, g, h, spec, cfg))
}

fn q1_direct(
    grid: RadialGrid,
    gamma1: f64,
    h: &RadialField,
    spec: &SystemSpec,
    cfg: &ScalarConfig,
) -> Result<RadialField> {
    let b = spec.b();
    let h = h.clone();
    sweep(
        grid,
        gamma1,
        cfg,
        "solve_q1",
        {
            let h = h.clone();
            move |u| u.zip_map(&h, |q, hv| 2.0 * (2.0 * q - hv).exp() + b * (-b * q).exp())
        },
        move |u| u.zip_map(&h, |q, hv| (2.0 * q - hv).exp() - (-b * q).exp()),
    )
}

/// Decreasing-in-eps limit for edge-of-range slopes: solve at gamma - eps for
/// eps in {0.1, 0.05, 0.025} and Richardson-extrapolate the halving tail.
/// Accepted when successive extrapolants agree to 1e-6; the deepest
/// extrapolant is returned either way.
fn eps_ladder(gamma: f64, solve_at: impl Fn(f64) -> Result<RadialField>) -> Result<RadialField> {
    let mut sols = Vec::with_capacity(EPS_LADDER.len());
    for eps in EPS_LADDER {
        sols.push(solve_at((gamma - eps).max(0.0))?);
    }
    let e1 = sols[1].zip_map(&sols[0], |b, a| 2.0 * b - a);
    let e2 = sols[2].zip_map(&sols[1], |b, a| 2.0 * b - a);
    let _converged = e2.max_abs_diff(&e1) < LADDER_ACCEPT;
    Ok(e2)
}

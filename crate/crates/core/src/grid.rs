//! Log-radial discretization of the punctured plane and the linear two-point
//! BVP kernel shared by every nonlinear solver in this crate.
//!
//! Radial functions on R^2 \ {0} are sampled on a uniform grid in s = log r.
//! In this variable the planar Laplacian of u(r) is e^{-2s} u''(s), so the
//! model problem
//!
//! ```text
//!     Delta u - c(r) u = f(r)
//! ```
//!
//! becomes  u'' - e^{2s} c u = e^{2s} f,  which is what [`solve_linear_bvp`]
//! discretizes. The singular boundary behaviour u ~ gamma log r at the origin
//! is a Neumann condition du/ds = gamma at s_min; decay at infinity is a
//! Dirichlet 0 at s_max.

use crate::error::{Error, Result};
use crate::toda::SystemSpec;
use serde::Serialize;

/// Uniform grid in s = log r on [s_min, s_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    s_min: f64,
    s_max: f64,
    m: usize,
    spacing: f64,
}

impl RadialGrid {
    pub fn new(s_min: f64, s_max: f64, m: usize) -> Result<Self> {
        if !s_min.is_finite() || !s_max.is_finite() || s_min >= s_max {
            return Err(Error::invalid(format!(
                "grid bounds must satisfy s_min < s_max, got [{s_min}, {s_max}]"
            )));
        }
        if m < 3 {
            return Err(Error::invalid(format!("grid needs m >= 3 nodes, got {m}")));
        }
        Ok(RadialGrid {
            s_min,
            s_max,
            m,
            spacing: (s_max - s_min) / (m - 1) as f64,
        })
    }

    /// Default truncation: s in [-14, 3] (r in [8.3e-7, 20.1]) with spacing 0.01.
    pub fn default_grid() -> Self {
        RadialGrid::new(-14.0, 3.0, 1701).expect("default grid parameters are valid")
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn s_min(&self) -> f64 {
        self.s_min
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn s(&self, i: usize) -> f64 {
        debug_assert!(i < self.m);
        self.s_min + i as f64 * self.spacing
    }

    pub fn r(&self, i: usize) -> f64 {
        self.s(i).exp()
    }

    /// Same span with half the spacing (m -> 2m - 1).
    pub fn refined(&self) -> Self {
        RadialGrid::new(self.s_min, self.s_max, 2 * self.m - 1).expect("refinement keeps bounds")
    }
}

/// Real-valued profile sampled on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "field has {} values for a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("field contains non-finite value {v}")));
        }
        Ok(RadialField { grid, values })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        RadialField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: RadialGrid, v: f64) -> Self {
        RadialField {
            grid,
            values: vec![v; grid.len()],
        }
    }

    /// Sample `f(s)` at every node.
    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        RadialField {
            grid,
            values: (0..grid.len()).map(|i| f(grid.s(i))).collect(),
        }
    }

    pub fn grid(&self) -> RadialGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// sup-norm of the difference with another field on the same grid.
    pub fn max_abs_diff(&self, other: &RadialField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// max over nodes of (self - other), signed.
    pub fn max_diff(&self, other: &RadialField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RadialField {
        RadialField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &RadialField, f: impl Fn(f64, f64) -> f64) -> RadialField {
        debug_assert_eq!(self.grid, other.grid);
        RadialField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl std::ops::Index<usize> for RadialField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Solve the tridiagonal system in place (Thomas algorithm).
/// `lower[i]` multiplies x[i-1] in row i, `upper[i]` multiplies x[i+1].
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    if diag[0] == 0.0 {
        return Err(Error::internal("singular tridiagonal system (zero pivot)"));
    }
    cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - lower[i] * cp[i - 1];
        if den == 0.0 || !den.is_finite() {
            return Err(Error::internal(format!(
                "singular tridiagonal system (pivot {den} at row {i})"
            )));
        }
        cp[i] = upper[i] / den;
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Solve  u''(s) - e^{2s} c(s) u(s) = e^{2s} f(s)  on the grid, with the
/// Neumann condition u'(s_min) = inner_slope (second-order one-sided stencil)
/// and the Dirichlet condition u(s_max) = outer_value.
///
/// Requires c >= 0 pointwise so the discrete operator is an M-matrix and the
/// maximum principle holds node-wise.
pub fn solve_linear_bvp(
    grid: RadialGrid,
    c: &RadialField,
    f: &RadialField,
    inner_slope: f64,
    outer_value: f64,
) -> Result<RadialField> {
    if c.grid() != grid || f.grid() != grid {
        return Err(Error::invalid("coefficient fields must live on the target grid"));
    }
    if let Some(i) = c.values().iter().position(|&v| v < 0.0) {
        return Err(Error::invalid(format!(
            "zeroth-order coefficient must be >= 0, found {} at node {i}",
            c[i]
        )));
    }
    let m = grid.len();
    let d = grid.spacing();
    let d2 = d * d;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];

    for i in 1..m - 1 {
        let w = d2 * (2.0 * grid.s(i)).exp();
        lower[i] = 1.0;
        diag[i] = -(2.0 + w * c[i]);
        upper[i] = 1.0;
        rhs[i] = w * f[i];
    }

    // One-sided second-order Neumann row: (-3 u0 + 4 u1 - u2) / (2d) = slope.
    // Eliminate u2 with the interior equation at node 1 to stay tridiagonal:
    //   u2 = d^2 e^{2s_1} f_1 - u0 + (2 + d^2 e^{2s_1} c_1) u1
    // giving  -2 u0 + (2 - d^2 e^{2s_1} c_1) u1 = 2 d slope + d^2 e^{2s_1} f_1.
    let w1 = d2 * (2.0 * grid.s(1)).exp();
    diag[0] = -2.0;
    upper[0] = 2.0 - w1 * c[1];
    rhs[0] = 2.0 * d * inner_slope + w1 * f[1];

    diag[m - 1] = 1.0;
    rhs[m - 1] = outer_value;

    let u = thomas(&lower, &diag, &upper, &rhs)?;
    RadialField::new(grid, u)
}

/// Integral of a radial function over the plane: 2 pi ∫ f(s) e^{2s} ds by the
/// trapezoid rule, equal to ∫ f dx over the truncated annulus.
pub fn integrate_plane(f: &RadialField) -> f64 {
    let grid = f.grid();
    let d = grid.spacing();
    let mut sum = 0.0;
    for i in 0..grid.len() {
        let w = if i == 0 || i == grid.len() - 1 { 0.5 } else { 1.0 };
        sum += w * f[i] * (2.0 * grid.s(i)).exp();
    }
    2.0 * std::f64::consts::PI * sum * d
}

/// Least-squares line f(s) ~ slope * s + intercept over a node window.
/// Used to read the log-coefficient gamma and the O(1) constant off a
/// computed profile near the inner truncation.
pub fn fit_log_slope(f: &RadialField, window: std::ops::Range<usize>) -> Result<(f64, f64)> {
    let n = window.len();
    if n < 2 || window.end > f.len() {
        return Err(Error::invalid(format!(
            "slope window {window:?} needs >= 2 nodes inside the grid"
        )));
    }
    let grid = f.grid();
    let (mut ss, mut sf, mut ssf, mut ss2) = (0.0, 0.0, 0.0, 0.0);
    for i in window.clone() {
        let s = grid.s(i);
        ss += s;
        sf += f[i];
        ssf += s * f[i];
        ss2 += s * s;
    }
    let nf = n as f64;
    let det = nf * ss2 - ss * ss;
    if det == 0.0 {
        return Err(Error::invalid("degenerate slope window"));
    }
    let slope = (nf * ssf - ss * sf) / det;
    let intercept = (sf * ss2 - ss * ssf) / det;
    Ok((slope, intercept))
}

/// Default window for slope fits: the inner stretch s in [s_min, s_min + 1.5].
pub fn default_slope_window(grid: RadialGrid) -> std::ops::Range<usize> {
    let n = ((1.5 / grid.spacing()).round() as usize).clamp(2, grid.len());
    0..n
}

/// Sup-norm residual of the coupled system in Laplacian form: the max over
/// interior nodes and both equations of |u''/e^{2s} - RHS|.
///
/// Near the inner truncation the division by e^{2s} amplifies second-difference
/// rounding noise by e^{-2 s_min}; see [`pde_residual_s`] for the equivalent
/// form without the amplification, which the solvers use for stopping.
pub fn pde_residual(w0: &RadialField, w1: &RadialField, spec: &SystemSpec) -> f64 {
    residual_impl(w0, w1, spec, false)
}

/// Sup-norm residual in the log-radial form: max |u'' - e^{2s} RHS|.
pub fn pde_residual_s(w0: &RadialField, w1: &RadialField, spec: &SystemSpec) -> f64 {
    residual_impl(w0, w1, spec, true)
}

fn residual_impl(w0: &RadialField, w1: &RadialField, spec: &SystemSpec, s_form: bool) -> f64 {
    debug_assert_eq!(w0.grid(), w1.grid());
    let grid = w0.grid();
    let d2 = grid.spacing() * grid.spacing();
    let mut worst: f64 = 0.0;
    for i in 1..grid.len() - 1 {
        let e2 = (2.0 * grid.s(i)).exp();
        let lap0 = (w0[i - 1] - 2.0 * w0[i] + w0[i + 1]) / d2;
        let lap1 = (w1[i - 1] - 2.0 * w1[i] + w1[i + 1]) / d2;
        let (rhs0, rhs1) = spec.rhs(w0[i], w1[i]);
        let (r0, r1) = if s_form {
            (lap0 - e2 * rhs0, lap1 - e2 * rhs1)
        } else {
            (lap0 / e2 - rhs0, lap1 / e2 - rhs1)
        };
        worst = worst.max(r0.abs()).max(r1.abs());
    }
    worst
}

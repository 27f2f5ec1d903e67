//! Uniform frequency grids on the unit period and quadrature rules over them.
//!
//! Grid nodes sit at `xi_i = -1/2 + i/m`, `i = 0..m`. Every function handled
//! here (squared Slepians, spectral windows, power spectra, `|D_N|^2`) is
//! 1-periodic, so the equal-weight rule over the whole period is the periodic
//! trapezoid rule and is exact for trigonometric polynomials of degree below
//! `m`.
//!
//! Sub-interval integrals such as `int_{-W}^{W}` use [`IntervalRule`]: on
//! every grid cell the integrand is replaced by the degree-5 Lagrange
//! interpolant through the six surrounding nodes and that polynomial is
//! integrated exactly over the part of the cell that lies inside the
//! interval. Near the ends the stencil is shifted inward so that it only uses
//! nodes in `[a, b]`. The rule is sixth-order accurate for integrands smooth
//! on `[a, b]` and does not require the end points to coincide with nodes.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Number of nodes in the local interpolation stencil.
const STENCIL: usize = 6;
/// Offset of the first stencil node relative to the left node of a cell.
const STENCIL_START: i64 = -2;
/// End points closer than this (in units of the spacing) to a node count as
/// lying on it.
const EDGE_TOLERANCE: f64 = 1e-9;

/// Uniform discretization of `I = [-1/2, 1/2)` with equal quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl FrequencyGrid {
    /// Builds an `m`-point grid. `m` must be even and at least 8.
    pub fn new(m: usize) -> Result<Self> {
        if m < 8 || !m.is_multiple_of(2) {
            return Err(invalid("m", format!("grid size must be even and >= 8, got {m}")));
        }
        let h = 1.0 / m as f64;
        let points = (0..m).map(|i| -0.5 + i as f64 * h).collect();
        let weights = vec![h; m];
        Ok(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Position of the (possibly out-of-range) node index `c`, without wrapping.
    pub fn node_position(&self, c: i64) -> f64 {
        -0.5 + c as f64 / self.len() as f64
    }

    /// Wraps an unwrapped node index into `0..m`.
    pub fn wrap(&self, c: i64) -> usize {
        c.rem_euclid(self.len() as i64) as usize
    }

    /// Index of the node at `-xi_i`.
    pub fn mirror(&self, i: usize) -> usize {
        (self.len() - i) % self.len()
    }

    /// Index of the node located at `xi_i - xi_j` (mod 1).
    pub fn difference(&self, i: usize, j: usize) -> usize {
        let m = self.len();
        (i + m - j + m / 2) % m
    }

    /// Nearest node to `xi`, taken modulo 1.
    pub fn nearest(&self, xi: f64) -> usize {
        let u = (xi + 0.5) * self.len() as f64;
        self.wrap(u.round() as i64)
    }

    /// Integral over the whole period.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Errors unless the grid has at least `required` points.
    pub fn require(&self, required: usize) -> Result<()> {
        if self.len() < required {
            return Err(crate::Error::GridTooCoarse {
                m: self.len(),
                required,
            });
        }
        Ok(())
    }
}

/// Quadrature weights for `int_a^b g(xi) d xi` on the nodes of a grid.
///
/// Weights are stored for a contiguous run of unwrapped node indices starting
/// at `first`; node `c` sits at `-1/2 + c/m` and corresponds to sample
/// `c mod m` of a periodic function.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRule {
    first: i64,
    weights: Vec<f64>,
    m: usize,
}

impl IntervalRule {
    /// Rule for `[a, b]`, `a <= b <= a + 1`.
    pub fn new(grid: &FrequencyGrid, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b < a || b - a > 1.0 + 1e-12 {
            return Err(invalid(
                "interval",
                format!("need a <= b <= a + 1, got [{a}, {b}]"),
            ));
        }
        let m = grid.len();
        let h = grid.spacing();
        let ua = (a + 0.5) * m as f64;
        let ub = (b + 0.5) * m as f64;
        let first_cell = ua.floor() as i64;
        let last_cell = (ub.ceil() as i64 - 1).max(first_cell);
        // Nodes inside [a, b]. Stencils stay within them so the integrand only
        // needs to be smooth on the interval itself. A full period has no
        // edges and keeps the centred stencils everywhere.
        let lo_node = (ua - EDGE_TOLERANCE).ceil() as i64;
        let hi_node = (ub + EDGE_TOLERANCE).floor() as i64;
        let clamp = b - a < 1.0 - EDGE_TOLERANCE / m as f64 && hi_node - lo_node + 1 >= STENCIL as i64;

        let first = first_cell + STENCIL_START;
        let span = (last_cell - first_cell) as usize + STENCIL;
        let mut weights = vec![0.0; span];
        let basis = lagrange_antiderivatives();
        for cell in first_cell..=last_cell {
            let s0 = (ua - cell as f64).max(0.0);
            let s1 = (ub - cell as f64).min(1.0);
            if s1 <= s0 {
                continue;
            }
            let mut start = cell + STENCIL_START;
            if clamp {
                start = start.clamp(lo_node, hi_node - STENCIL as i64 + 1);
            }
            // Local coordinate of the cell's left node within the stencil.
            let shift = (cell - start) as f64 + STENCIL_START as f64;
            let offset = (start - first) as usize;
            for (k, anti) in basis.iter().enumerate() {
                weights[offset + k] += h * (eval_poly(anti, s1 + shift) - eval_poly(anti, s0 + shift));
            }
        }
        Ok(Self { first, weights, m })
    }

    /// Iterates `(unwrapped node index, weight)`.
    pub fn nodes(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(k, &w)| (self.first + k as i64, w))
    }

    /// Integrates a 1-periodic function sampled on the grid.
    pub fn integrate_periodic(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.m);
        let m = self.m as i64;
        self.nodes()
            .map(|(c, w)| w * values[c.rem_euclid(m) as usize])
            .sum()
    }

    /// Integrates a function evaluated at node positions.
    pub fn integrate_fn(&self, grid: &FrequencyGrid, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes().map(|(c, w)| w * f(grid.node_position(c))).sum()
    }

    /// Folds the rule onto the periodic grid: dense weights of length `m`.
    pub fn periodic_weights(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.m];
        let m = self.m as i64;
        for (c, w) in self.nodes() {
            dense[c.rem_euclid(m) as usize] += w;
        }
        dense
    }

    /// Total weight, equal to `b - a` up to rounding.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Coefficients (ascending powers of `s`) of the antiderivatives of the six
/// Lagrange basis polynomials on nodes `s = -2, ..., 3`.
fn lagrange_antiderivatives() -> [[f64; STENCIL + 1]; STENCIL] {
    let nodes: [f64; STENCIL] = std::array::from_fn(|k| (STENCIL_START + k as i64) as f64);
    let mut out = [[0.0; STENCIL + 1]; STENCIL];
    for k in 0..STENCIL {
        // Build prod_{j != k} (s - s_j) / (s_k - s_j) by repeated multiplication.
        let mut poly = [0.0; STENCIL];
        poly[0] = 1.0;
        let mut degree = 0;
        let mut denom = 1.0;
        for j in 0..STENCIL {
            if j == k {
                continue;
            }
            for d in (0..=degree).rev() {
                poly[d + 1] += poly[d];
                poly[d] *= -nodes[j];
            }
            degree += 1;
            denom *= nodes[k] - nodes[j];
        }
        for d in 0..STENCIL {
            out[k][d + 1] = poly[d] / denom / (d + 1) as f64;
        }
    }
    out
}

fn eval_poly(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

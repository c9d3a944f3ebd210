//! Derivatives, the reduced bilaplacian factor and singular-weight quadrature
//! on a uniform grid in `t = ln r`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Decay threshold below which a grid end counts as resolved.
pub const DECAY_TOL: f64 = 1e-12;

/// Uniform grid in the log-radial variable `t = ln r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
}

impl LogGrid {
    pub fn new(t_min: f64, t_max: f64, n_points: usize) -> Result<Self> {
        if !(t_min < t_max) {
            return Err(Error::Domain(format!(
                "grid needs t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if n_points < 16 {
            return Err(Error::Domain(format!(
                "grid needs n_points >= 16, got {n_points}"
            )));
        }
        Ok(Self {
            t_min,
            t_max,
            n_points,
        })
    }

    /// Default lab grid: `t` in `[-20, 20]`, 4096 points.
    pub fn default_lab() -> Self {
        Self {
            t_min: -20.0,
            t_max: 20.0,
            n_points: 4096,
        }
    }

    /// Grid covering `[r_lo, r_hi]` with spacing at most `h_max`.
    pub fn covering(r_lo: f64, r_hi: f64, h_max: f64) -> Result<Self> {
        if !(r_lo > 0.0 && r_hi > r_lo) {
            return Err(Error::Config(format!(
                "cannot cover radial range [{r_lo}, {r_hi}]"
            )));
        }
        let t_min = r_lo.ln();
        let t_max = r_hi.ln();
        let n = ((t_max - t_min) / h_max).ceil() as usize + 1;
        Self::new(t_min, t_max, n.max(16))
    }

    pub fn h(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_points - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_min + self.h() * i as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.t(i).exp()
    }

    pub fn ts(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.t(i))
    }
}

/// Real-valued function sampled on a [`LogGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: LogGrid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: LogGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::Config(format!(
                "value length {} does not match grid of {} points",
                values.len(),
                grid.n_points
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite grid value".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: LogGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.n_points).map(|i| f(grid.r(i))).collect();
        Self::new(grid, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Fornberg's algorithm: weights of the `m`-th derivative at `z` for the
/// nodes `xs`.
fn fd_weights(z: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Finite-difference stencils in `t` for one grid resolution: interior
/// 5-point central rows, 6-point one-sided rows at the two nodes of each end.
#[derive(Debug, Clone)]
pub struct Stencils {
    central: Vec<f64>,
    left: [Vec<f64>; 2],
    right: [Vec<f64>; 2],
    order: usize,
    h: f64,
}

impl Stencils {
    pub fn new(h: f64, order: usize) -> Result<Self> {
        if order != 1 && order != 2 {
            return Err(Error::Domain(format!(
                "derivative order must be 1 or 2, got {order}"
            )));
        }
        let scale = h.powi(-(order as i32));
        let idx: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let central = fd_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], order)
            .into_iter()
            .map(|w| w * scale)
            .collect();
        let mk = |z: f64| -> Vec<f64> {
            fd_weights(z, &idx, order)
                .into_iter()
                .map(|w| w * scale)
                .collect()
        };
        Ok(Self {
            central,
            left: [mk(0.0), mk(1.0)],
            right: [mk(4.0), mk(5.0)],
            order,
            h,
        })
    }

    /// Stencil row for node `i` of an `n`-point grid: `(start column, weights)`.
    pub fn row<'a>(&'a self, i: usize, n: usize) -> (usize, &'a [f64]) {
        if i < 2 {
            (0, &self.left[i])
        } else if i >= n - 2 {
            (n - 6, &self.right[i + 2 - n])
        } else {
            (i - 2, &self.central)
        }
    }

    /// Apply the stencil to a value array.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let n = values.len();
        assert!(n >= 6, "grids are at least 16 points");
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let (start, w) = self.row(i, n);
            *o = w
                .iter()
                .enumerate()
                .map(|(j, wj)| wj * values[start + j])
                .sum();
        }
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

/// `df/dr` or `d^2 f/dr^2` by 4th-order differences in `t` and the chain
/// rule `d/dr = e^{-t} d/dt`.
pub fn derivative(f: &GridFunction, order: usize) -> Result<GridFunction> {
    let h = f.grid.h();
    let d1 = Stencils::new(h, 1)?.apply(&f.values);
    let values = match order {
        1 => f
            .grid
            .ts()
            .zip(&d1)
            .map(|(t, ft)| (-t).exp() * ft)
            .collect(),
        2 => {
            let d2 = Stencils::new(h, 2)?.apply(&f.values);
            f.grid
                .ts()
                .zip(d1.iter().zip(&d2))
                .map(|(t, (ft, ftt))| (-2.0 * t).exp() * (ftt - ft))
                .collect()
        }
        other => {
            return Err(Error::Domain(format!(
                "derivative order must be 1 or 2, got {other}"
            )))
        }
    };
    GridFunction::new(f.grid, values)
}

/// Reduced bilaplacian factor of the ansatz `u = x_1 f(|x|)`:
/// `Lf = f'' + (N+1) f'/r`, i.e. `e^{-2t}(f_tt + N f_t)` in `t`.
pub fn reduced_laplacian(f: &GridFunction, n: u32) -> Result<GridFunction> {
    if n < 5 {
        return Err(Error::Domain(format!("N = {n} violates N >= 5")));
    }
    let h = f.grid.h();
    let d1 = Stencils::new(h, 1)?.apply(&f.values);
    let d2 = Stencils::new(h, 2)?.apply(&f.values);
    let values = f
        .grid
        .ts()
        .zip(d1.iter().zip(&d2))
        .map(|(t, (ft, ftt))| (-2.0 * t).exp() * (ftt + n as f64 * ft))
        .collect();
    GridFunction::new(f.grid, values)
}

/// Truncation policy for weighted integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Error out unless the weighted integrand has decayed at both grid ends.
    Strict,
    /// The caller accepts the restriction to the grid support.
    Acknowledged,
}

/// Composite Simpson weights on `n` uniform nodes with spacing `h`.
/// An odd interval count is closed with a 3/8 block at the right end.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 5);
    let mut w = vec![0.0; n];
    let intervals = n - 1;
    let simpson_end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
    let mut i = 0;
    while i + 2 <= simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if simpson_end != n - 1 {
        let c = 3.0 * h / 8.0;
        w[n - 4] += c;
        w[n - 3] += 3.0 * c;
        w[n - 2] += 3.0 * c;
        w[n - 1] += c;
    }
    w
}

/// `int g(r) r^p dr` over the grid support, computed as
/// `int g(e^t) e^{(p+1)t} dt` by composite Simpson.
pub fn integrate_weighted(f: &GridFunction, power_p: f64, trunc: Truncation) -> Result<f64> {
    let grid = &f.grid;
    let integrand: Vec<f64> = grid
        .ts()
        .zip(&f.values)
        .map(|(t, v)| v * ((power_p + 1.0) * t).exp())
        .collect();
    let max = integrand.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max > 0.0 && trunc == Truncation::Strict {
        let left = integrand[0].abs() / max;
        let right = integrand[grid.n_points - 1].abs() / max;
        if left > DECAY_TOL || right > DECAY_TOL {
            return Err(Error::Truncation { left, right });
        }
    }
    let w = simpson_weights(grid.n_points, grid.h());
    Ok(integrand.iter().zip(&w).map(|(g, w)| g * w).sum())
}

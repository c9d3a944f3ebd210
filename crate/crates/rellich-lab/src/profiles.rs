//! Reduced energies of the ansatz `u = x_1 f(|x|)`, the conformal scaling
//! action and profile normalization.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Serialize;

use crate::constants::{sphere_moment, DimensionConfig};
use crate::error::{Error, Result};
use crate::radial_calculus::{
    integrate_weighted, reduced_laplacian, GridFunction, LogGrid, Truncation,
};

/// Radial factor `f` of the ansatz `u = x_1 f(|x|)` in dimension `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub f: GridFunction,
    pub n: u32,
}

impl RadialProfile {
    pub fn new(f: GridFunction, n: u32) -> Result<Self> {
        if n < 5 {
            return Err(Error::Domain(format!("N = {n} violates N >= 5")));
        }
        Ok(Self { f, n })
    }

    pub fn from_fn(grid: LogGrid, n: u32, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(GridFunction::from_fn(grid, f)?, n)
    }
}

/// The four integrals entering the quotient, in the units of the functional
/// (sphere moments included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// `int |Delta u|^2`
    pub bending: f64,
    /// `int u^2 / |x|^4`
    pub hardy: f64,
    /// `int |u|^{2*_s} / |x|^s`
    pub sobolev_s: f64,
    /// `int |u|^{2*_0}`
    pub sobolev_0: f64,
}

/// All four energies of the ansatz, reduced to 1D quadrature:
/// bending `= w(2) int (Lf)^2 r^{N+1} dr`, hardy `= w(2) int f^2 r^{N-3} dr`,
/// sobolev_s `= w(2*_s) int |f|^{2*_s} r^{2*_s+N-1-s} dr`.
pub fn energies(
    p: &RadialProfile,
    cfg: &DimensionConfig,
    trunc: Truncation,
) -> Result<EnergyBreakdown> {
    if p.n != cfg.n {
        return Err(Error::Config(format!(
            "profile dimension {} does not match configuration dimension {}",
            p.n, cfg.n
        )));
    }
    let n = cfg.n as f64;
    let grid = p.f.grid;
    let w2 = sphere_moment(cfg.n, 2.0)?;

    let lf = reduced_laplacian(&p.f, cfg.n)?;
    let lf2 = GridFunction::new(grid, lf.values.iter().map(|v| v * v).collect())?;
    let bending = w2 * integrate_weighted(&lf2, n + 1.0, trunc)?;

    let f2 = GridFunction::new(grid, p.f.values.iter().map(|v| v * v).collect())?;
    let hardy = w2 * integrate_weighted(&f2, n - 3.0, trunc)?;

    let sob = |s: f64| -> Result<f64> {
        let q = 2.0 * (n - s) / (n - 4.0);
        let fq = GridFunction::new(grid, p.f.values.iter().map(|v| v.abs().powf(q)).collect())?;
        Ok(sphere_moment(cfg.n, q)? * integrate_weighted(&fq, q + n - 1.0 - s, trunc)?)
    };

    Ok(EnergyBreakdown {
        bending,
        hardy,
        sobolev_s: sob(cfg.s)?,
        sobolev_0: sob(0.0)?,
    })
}

/// `Q_{gamma,s}(u) = (bending - gamma*hardy) / sobolev_s^{2/2*_s}`.
pub fn rayleigh_quotient(
    p: &RadialProfile,
    cfg: &DimensionConfig,
    trunc: Truncation,
) -> Result<f64> {
    let e = energies(p, cfg, trunc)?;
    quotient_from_energies(&e, cfg)
}

/// Quotient from a precomputed breakdown.
pub fn quotient_from_energies(e: &EnergyBreakdown, cfg: &DimensionConfig) -> Result<f64> {
    if e.sobolev_s <= 0.0 || !e.sobolev_s.is_finite() {
        return Err(Error::Degenerate(format!(
            "sobolev term {} is not positive",
            e.sobolev_s
        )));
    }
    Ok((e.bending - cfg.gamma * e.hardy) / e.sobolev_s.powf(2.0 / cfg.two_star_s()))
}

/// Largest fraction of the profile's weighted mass that may be pushed off
/// the grid by a rescale before it counts as support loss.
const SUPPORT_LOSS_TOL: f64 = 1e-9;

/// Conformal rescale restricted to the ansatz:
/// `f -> rho^{(N-2)/2} f(rho r)`, implemented as an exact grid-index shift.
/// `r_scale` is snapped to the nearest commensurate scale `exp(k*h)`;
/// the scale actually used is returned alongside the profile.
pub fn conformal_rescale(p: &RadialProfile, r_scale: f64) -> Result<(RadialProfile, f64)> {
    if !(r_scale > 0.0 && r_scale.is_finite()) {
        return Err(Error::Domain(format!("scale {r_scale} must be positive")));
    }
    let grid = p.f.grid;
    let h = grid.h();
    let k = (r_scale.ln() / h).round() as i64;
    let actual = (k as f64 * h).exp();
    let n_pts = grid.n_points as i64;
    if k.unsigned_abs() as usize >= grid.n_points {
        return Err(Error::SupportLoss {
            shift: k,
            dropped: 1.0,
        });
    }
    // values shifted past a grid end are discarded; make sure they carry no
    // meaningful share of the weighted mass under either energy weight
    let dropped_range = if k >= 0 {
        0..k as usize
    } else {
        (n_pts + k) as usize..grid.n_points
    };
    let mut dropped = 0.0f64;
    for w in [p.n as f64 - 2.0, p.n as f64 + 2.0] {
        let mass = |i: usize| {
            let v = p.f.values[i];
            v * v * (w * grid.t(i)).exp()
        };
        let total: f64 = (0..grid.n_points).map(mass).sum();
        if total > 0.0 {
            let lost: f64 = dropped_range.clone().map(mass).sum();
            dropped = dropped.max(lost / total);
        }
    }
    if dropped > SUPPORT_LOSS_TOL {
        return Err(Error::SupportLoss { shift: k, dropped });
    }
    let amp = actual.powf((p.n as f64 - 2.0) / 2.0);
    let values: Vec<f64> = (0..n_pts)
        .map(|i| {
            let j = i + k;
            if (0..n_pts).contains(&j) {
                amp * p.f.values[j as usize]
            } else {
                0.0
            }
        })
        .collect();
    Ok((
        RadialProfile::new(GridFunction::new(grid, values)?, p.n)?,
        actual,
    ))
}

/// Radius `rho` splitting the weighted mass
/// `int |f|^{2*_s} r^{2*_s+N-1-s} dr` in half, located by cumulative
/// trapezoid quadrature plus linear interpolation (resolution: one cell).
pub fn half_mass_radius(p: &RadialProfile, cfg: &DimensionConfig) -> Result<f64> {
    let grid = p.f.grid;
    let n = cfg.n as f64;
    let q = cfg.two_star_s();
    let pw = q + n - 1.0 - cfg.s;
    let g: Vec<f64> = grid
        .ts()
        .zip(&p.f.values)
        .map(|(t, f)| f.abs().powf(q) * (pw * t).exp())
        .collect();
    let h = grid.h();
    let mut cum = vec![0.0; grid.n_points];
    for i in 1..grid.n_points {
        cum[i] = cum[i - 1] + 0.5 * h * (g[i - 1] + g[i]);
    }
    let total = cum[grid.n_points - 1];
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::Degenerate(
            "profile carries no weighted mass".into(),
        ));
    }
    let half = total / 2.0;
    let i = cum.partition_point(|&c| c < half);
    debug_assert!(i > 0 && i < grid.n_points);
    let frac = (half - cum[i - 1]) / (cum[i] - cum[i - 1]);
    Ok((grid.t(i - 1) + frac * h).exp())
}

/// Write a profile as `t,f` CSV with 17-significant-digit floats.
pub fn write_profile_csv(path: &Path, p: &RadialProfile) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "t,f")?;
    for (t, v) in p.f.grid.ts().zip(&p.f.values) {
        writeln!(out, "{t:.16e},{v:.16e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Read a `t,f` CSV back into a profile. The grid must be uniform.
pub fn read_profile_csv(path: &Path, n: u32) -> Result<RadialProfile> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut ts = Vec::new();
    let mut fs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if lineno == 0 {
            if line.trim() != "t,f" {
                return Err(Error::Config(format!(
                    "expected header `t,f`, found `{line}`"
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| {
            Error::Config(format!("line {}: expected `t,f` pair", lineno + 1))
        })?;
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))
        };
        ts.push(parse(a)?);
        fs.push(parse(b)?);
    }
    if ts.len() < 16 {
        return Err(Error::Config(format!(
            "profile has only {} rows",
            ts.len()
        )));
    }
    let h = (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64;
    for (i, &t) in ts.iter().enumerate() {
        if (t - (ts[0] + h * i as f64)).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(Error::Config(format!("grid is not uniform at row {i}")));
        }
    }
    let grid = LogGrid::new(ts[0], ts[ts.len() - 1], ts.len())?;
    RadialProfile::new(GridFunction::new(grid, fs)?, n)
}

//! Ray analysis of the energy functional: the two-term closed forms, the
//! three-term ray maximum, the threshold window and Palais–Smale level caps.

use serde::Serialize;

use crate::constants::{beta_star, DimensionConfig};
use crate::error::{Error, Result};
use crate::profiles::{energies, EnergyBreakdown, RadialProfile};
use crate::radial_calculus::Truncation;

/// Ray data of `E(t u0)`: the three coefficients, the two-term closed-form
/// maximum and the true three-term maximum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RayAnalysis {
    /// coercive quadratic coefficient `int (|Delta u0|^2 - gamma u0^2/|x|^4)`
    pub r1: f64,
    /// Hardy–Sobolev mass `int |u0|^{2*_s}/|x|^s`
    pub r2: f64,
    /// Sobolev mass `int |u0|^{2*_0}`
    pub r3: f64,
    /// maximizer of the two-term ray `f1(t) = r1 t^2/2 - r3 t^{2*_0}/2*_0`
    pub t_max: f64,
    /// `f1(t_max) = (2/N) (r1 / r3^{2/2*_0})^{N/4}`
    pub sup_f1: f64,
    /// maximizer of the full three-term ray
    pub t_star: f64,
    /// `E(t_star u0)`
    pub e_sup: f64,
    /// `sup_f1 - e_sup`, strictly positive when `r2 > 0`
    pub strict_gap: f64,
}

/// Energy functional
/// `E(u) = (bending - gamma*hardy)/2 - sobolev_s/2*_s - sobolev_0/2*_0`.
pub fn energy(p: &RadialProfile, cfg: &DimensionConfig, trunc: Truncation) -> Result<f64> {
    let e = energies(p, cfg, trunc)?;
    Ok(energy_from_breakdown(&e, cfg))
}

/// Energy from a precomputed breakdown.
pub fn energy_from_breakdown(e: &EnergyBreakdown, cfg: &DimensionConfig) -> f64 {
    0.5 * (e.bending - cfg.gamma * e.hardy)
        - e.sobolev_s / cfg.two_star_s()
        - e.sobolev_0 / cfg.two_star_zero()
}

/// Ray analysis from raw coefficients. `r1` must be positive (coercivity)
/// and at least one of `r2`, `r3` positive, otherwise the ray is unbounded.
pub fn analyze_ray(r1: f64, r2: f64, r3: f64, cfg: &DimensionConfig) -> Result<RayAnalysis> {
    if !(r1 > 0.0 && r1.is_finite()) {
        return Err(Error::Domain(format!(
            "quadratic coefficient R1 = {r1} must be positive (coercivity)"
        )));
    }
    if r2 < 0.0 || r3 < 0.0 {
        return Err(Error::Domain(format!(
            "masses must be nonnegative, got R2 = {r2}, R3 = {r3}"
        )));
    }
    if r2 == 0.0 && r3 == 0.0 {
        return Err(Error::NoMaximum);
    }
    let q0 = cfg.two_star_zero();
    let qs = cfg.two_star_s();
    let nf = cfg.n as f64;

    // two-term ray f1(t) = r1 t^2 / 2 - r3 t^{q0} / q0
    let (t_max, sup_f1) = if r3 > 0.0 {
        let t_max = (r1 / r3).powf(1.0 / (q0 - 2.0));
        let sup_f1 = (2.0 / nf) * (r1 / r3.powf(2.0 / q0)).powf(nf / 4.0);
        (t_max, sup_f1)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    // full ray derivative e'(t)/t = r1 - r2 t^{qs-2} - r3 t^{q0-2}:
    // strictly decreasing in t > 0, so the positive root is unique
    let dphi = |t: f64| r1 - r2 * t.powf(qs - 2.0) - r3 * t.powf(q0 - 2.0);
    let mut lo = 0.0;
    let mut hi = {
        let from_r3 = if r3 > 0.0 { t_max } else { 0.0 };
        let from_r2 = if r2 > 0.0 {
            (r1 / r2).powf(1.0 / (qs - 2.0))
        } else {
            0.0
        };
        2.0 * from_r3.max(from_r2)
    };
    debug_assert!(dphi(hi) < 0.0);
    // safeguarded Newton with bisection fallback
    let mut t = 0.5 * hi;
    for _ in 0..200 {
        let v = dphi(t);
        if v > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let dv = -r2 * (qs - 2.0) * t.powf(qs - 3.0) - r3 * (q0 - 2.0) * t.powf(q0 - 3.0);
        let newton = t - v / dv;
        t = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let t_star = t;
    let ray = |t: f64| {
        0.5 * r1 * t * t - r2 * t.powf(qs) / qs - r3 * t.powf(q0) / q0
    };
    let e_sup = ray(t_star);
    Ok(RayAnalysis {
        r1,
        r2,
        r3,
        t_max,
        sup_f1,
        t_star,
        e_sup,
        strict_gap: sup_f1 - e_sup,
    })
}

/// Ray analysis of `E(t p)` with the coefficients taken from the profile's
/// energies.
pub fn ray_scan(p: &RadialProfile, cfg: &DimensionConfig, trunc: Truncation) -> Result<RayAnalysis> {
    let e = energies(p, cfg, trunc)?;
    analyze_ray(e.bending - cfg.gamma * e.hardy, e.sobolev_s, e.sobolev_0, cfg)
}

/// Asymptotic Palais–Smale mass caps at level `beta`:
/// Hardy–Sobolev `2 beta (N-s)/(4-s)` and Sobolev `N beta / 2`.
pub fn ps_level_bounds(beta: f64, cfg: &DimensionConfig) -> Result<(f64, f64)> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    let nf = cfg.n as f64;
    Ok((
        2.0 * beta * (nf - cfg.s) / (4.0 - cfg.s),
        nf * beta / 2.0,
    ))
}

/// Admissibility of the level `beta` against the threshold
/// `beta* = min{(2/N) q0^{N/4}, ((4-s)/(2(N-s))) qs^{(N-s)/(4-s)}}`
/// (open interval), with the margin `beta* - beta`.
pub fn level_window_check(
    beta: f64,
    q0: f64,
    qs: f64,
    cfg: &DimensionConfig,
) -> Result<(bool, f64)> {
    let bs = beta_star(cfg.n, cfg.s, q0, qs)?;
    Ok((beta > 0.0 && beta < bs, bs - beta))
}

//! Command-line front end: validated run configurations, CSV/JSON artifacts,
//! parallel sweeps.

use std::collections::HashMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{
    cone_hardy_constant, hardy_constants, indicial_roots, sphere_area, sphere_moment,
    sphere_spectrum, DimensionConfig, IndicialRoots,
};
use crate::error::{Error, Result};
use crate::minimizer::{minimize_quotient, q_upper_bound_report, BoundChannel};
use crate::mountain_pass::{analyze_ray, level_window_check, ps_level_bounds};
use crate::profiles::{energies, write_profile_csv, RadialProfile};
use crate::radial_calculus::{simpson_weights, LogGrid, Truncation};
use crate::test_functions::{
    bubble_radial, fit_asymptotics, hardy_sequence, strict_upper_bound_scan, CutoffSpec,
    DEFAULT_EPS_LADDER,
};

const ABOUT: &str = "Numerical laboratory for a fourth-order Hardy-Rellich \
problem on the half-space";

#[derive(Parser, Debug)]
#[command(name = "rellich-lab", about = ABOUT, version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// dimension N (>= 5)
    #[arg(long, global = true)]
    dim: Option<u32>,

    /// Hardy-Sobolev weight exponent s in [0, 4]
    #[arg(long, global = true, allow_hyphen_values = true)]
    s: Option<f64>,

    /// Hardy parameter gamma; `sweep` accepts a comma-separated list
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<String>,

    /// comma-separated epsilon ladder
    #[arg(long, global = true)]
    eps: Option<String>,

    /// bubble center distance a (x0 = a e_1)
    #[arg(long, global = true)]
    a: Option<f64>,

    /// bubble cutoff radius delta (0 < delta < a/2)
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// number of grid points
    #[arg(long, global = true)]
    grid_points: Option<usize>,

    /// grid start in t = ln r
    #[arg(long, global = true, allow_hyphen_values = true)]
    t_min: Option<f64>,

    /// grid end in t = ln r
    #[arg(long, global = true, allow_hyphen_values = true)]
    t_max: Option<f64>,

    /// CSV output path (JSON reports always go to stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// worker threads (default: RELLICH_LAB_JOBS, then all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// seed for Monte-Carlo oracles (fixed default keeps runs reproducible)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// flat `key = value` config file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Exponents, Hardy constants, indicial roots and sphere moments
    Constants,
    /// Indicial roots with quartic residual certificates
    Roots,
    /// Hardy log-sequence energies over an epsilon ladder, with slope fits
    HardySeq,
    /// Cut-off bubble energies over an epsilon ladder, with asymptotic fit
    Bubble,
    /// Quotient minimization: upper bound with residual certificate
    Minimize,
    /// Ray analysis of the energy functional (closed forms and level caps)
    MountainPass,
    /// Indicial-root sweep over a gamma list (parallel)
    Sweep,
}

/// Fully resolved run configuration (flags > config file > defaults).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dim: u32,
    pub s: f64,
    pub gammas: Vec<f64>,
    pub eps: Vec<f64>,
    pub a: f64,
    pub delta: f64,
    pub grid_points: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: u64,
}

fn parse_kv_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "{}:{}: expected `key = value`, found `{raw}`",
                path.display(),
                lineno + 1
            ))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad {what} entry `{p}`: {e}")))
        })
        .collect()
}

impl RunConfig {
    fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => parse_kv_file(path)?,
            None => HashMap::new(),
        };
        fn pick<T, E: std::fmt::Display>(
            flag: Option<T>,
            file: &HashMap<String, String>,
            key: &str,
            parse: impl Fn(&str) -> std::result::Result<T, E>,
        ) -> Result<Option<T>> {
            if flag.is_some() {
                return Ok(flag);
            }
            match file.get(key) {
                Some(v) => parse(v)
                    .map(Some)
                    .map_err(|e| Error::Config(format!("config key `{key}`: {e}"))),
                None => Ok(None),
            }
        }
        let gammas = match pick(cli.gamma.clone(), &file, "gamma", |v| {
            Ok::<_, std::convert::Infallible>(v.to_string())
        })? {
            Some(text) => parse_list(&text, "gamma")?,
            None => vec![0.0],
        };
        let eps = match pick(cli.eps.clone(), &file, "eps", |v| {
            Ok::<_, std::convert::Infallible>(v.to_string())
        })? {
            Some(text) => {
                let l = parse_list(&text, "eps")?;
                if l.is_empty() {
                    return Err(Error::Config("empty epsilon ladder".into()));
                }
                l
            }
            None => DEFAULT_EPS_LADDER.to_vec(),
        };
        let jobs = match pick(cli.jobs, &file, "jobs", str::parse::<usize>)? {
            Some(j) => Some(j),
            None => match std::env::var("RELLICH_LAB_JOBS") {
                Ok(v) => Some(v.parse().map_err(|e| {
                    Error::Config(format!("RELLICH_LAB_JOBS = `{v}`: {e}"))
                })?),
                Err(_) => None,
            },
        };
        Ok(Self {
            dim: pick(cli.dim, &file, "dim", str::parse)?.unwrap_or(8),
            s: pick(cli.s, &file, "s", str::parse)?.unwrap_or(0.0),
            gammas,
            eps,
            a: pick(cli.a, &file, "a", str::parse)?.unwrap_or(1.0),
            delta: pick(cli.delta, &file, "delta", str::parse)?.unwrap_or(0.25),
            grid_points: pick(cli.grid_points, &file, "grid-points", str::parse)?
                .unwrap_or(4096),
            t_min: pick(cli.t_min, &file, "t-min", str::parse)?.unwrap_or(-20.0),
            t_max: pick(cli.t_max, &file, "t-max", str::parse)?.unwrap_or(20.0),
            out: cli
                .out
                .clone()
                .or_else(|| file.get("out").map(PathBuf::from)),
            jobs,
            seed: pick(cli.seed, &file, "seed", str::parse)?.unwrap_or(12345),
        })
    }

    fn gamma(&self) -> Result<f64> {
        if self.gammas.len() != 1 {
            return Err(Error::Config(format!(
                "this command needs exactly one gamma, got {}",
                self.gammas.len()
            )));
        }
        Ok(self.gammas[0])
    }

    fn dimension_config(&self) -> Result<DimensionConfig> {
        DimensionConfig::new(self.dim, self.s, self.gamma()?)
    }

    fn grid(&self) -> Result<LogGrid> {
        LogGrid::new(self.t_min, self.t_max, self.grid_points)
    }
}

fn emit_json<T: Serialize>(value: &T) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value)
        .map_err(|e| Error::Numerical(format!("JSON serialization failed: {e}")))?;
    writeln!(stdout)?;
    Ok(())
}

fn emit_csv(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// subcommands

#[derive(Serialize)]
struct ConstantsReport {
    n: u32,
    s: f64,
    gamma: f64,
    two_star_s: f64,
    two_star_zero: f64,
    hardy_interior: f64,
    hardy_half_space: f64,
    cone_constant: f64,
    cone_min_index: u32,
    indicial_roots: IndicialRoots,
    w2: f64,
    w_qs: f64,
    w_q0: f64,
    sphere_area: f64,
}

fn cmd_constants(rc: &RunConfig) -> Result<()> {
    let cfg = rc.dimension_config()?;
    cfg.require_subcritical()?;
    cfg.require_indicial_range()?;
    let hc = hardy_constants(cfg.n)?;
    let report = ConstantsReport {
        n: cfg.n,
        s: cfg.s,
        gamma: cfg.gamma,
        two_star_s: cfg.two_star_s(),
        two_star_zero: cfg.two_star_zero(),
        hardy_interior: hc.interior,
        hardy_half_space: hc.half_space,
        cone_constant: cone_hardy_constant(cfg.n, &sphere_spectrum(cfg.n, 1, 64))?,
        cone_min_index: hc.cone_min_index,
        indicial_roots: indicial_roots(&cfg)?,
        w2: sphere_moment(cfg.n, 2.0)?,
        w_qs: sphere_moment(cfg.n, cfg.two_star_s())?,
        w_q0: sphere_moment(cfg.n, cfg.two_star_zero())?,
        sphere_area: sphere_area(cfg.n),
    };
    emit_json(&report)
}

#[derive(Serialize)]
struct RootsReport {
    n: u32,
    gamma: f64,
    #[serde(flatten)]
    roots: IndicialRoots,
}

fn cmd_roots(rc: &RunConfig) -> Result<()> {
    let cfg = rc.dimension_config()?;
    cfg.require_indicial_range()?;
    emit_json(&RootsReport {
        n: cfg.n,
        gamma: cfg.gamma,
        roots: indicial_roots(&cfg)?,
    })
}

#[derive(Serialize)]
struct HardySeqReport {
    n: u32,
    w2: f64,
    /// linear-fit slope of hardy against ln(1/eps); target 2 w(2)
    slope_hardy: f64,
    /// linear-fit slope of bending against ln(1/eps); target 2 w(2) (N^2-4)^2/16
    slope_bending: f64,
    /// plain ratios bending/hardy in ladder order
    ratios: Vec<f64>,
    /// differenced ratio between the two smallest eps; the O(1) cutoff
    /// constants cancel, leaving the half-space constant
    extrapolated_ratio: f64,
    target_ratio: f64,
}

fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn cmd_hardy_seq(rc: &RunConfig) -> Result<()> {
    let gamma = rc.gamma()?;
    let cfg = DimensionConfig::new(rc.dim, rc.s, gamma)?;
    let cut = CutoffSpec::default();
    let mut eps = rc.eps.clone();
    eps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let rows: Vec<(f64, f64, f64)> = eps
        .iter()
        .map(|&e| -> Result<_> {
            let p = hardy_sequence(rc.dim, e, &cut)?;
            let en = energies(&p, &cfg, Truncation::Acknowledged)?;
            Ok((e, en.bending, en.hardy))
        })
        .collect::<Result<_>>()?;
    let mut csv = String::from("epsilon,bending,hardy,ratio\n");
    for &(e, b, h) in &rows {
        csv.push_str(&format!("{e:.16e},{b:.16e},{h:.16e},{:.16e}\n", b / h));
    }
    emit_csv(&rc.out, &csv)?;

    let xs: Vec<f64> = rows.iter().map(|r| (1.0 / r.0).ln()).collect();
    let bend: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let hard: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let k = rows.len() - 1;
    let extrapolated_ratio = (bend[k] - bend[k - 1]) / (hard[k] - hard[k - 1]);
    emit_json(&HardySeqReport {
        n: rc.dim,
        w2: sphere_moment(rc.dim, 2.0)?,
        slope_hardy: linear_slope(&xs, &hard),
        slope_bending: linear_slope(&xs, &bend),
        ratios: rows.iter().map(|r| r.1 / r.2).collect(),
        extrapolated_ratio,
        target_ratio: hardy_constants(rc.dim)?.half_space,
    })
}

#[derive(Serialize)]
struct CandidateComparison {
    /// `a^{-4} int U^2` (change-of-variables prediction)
    full: f64,
    /// `a^{-4} int U^2 / 2`
    half: f64,
    fitted: f64,
    closer_to: &'static str,
}

#[derive(Serialize)]
struct BubbleReport {
    n: u32,
    gamma: f64,
    a: f64,
    delta: f64,
    sn_estimate: f64,
    /// gamma > 0: smallest-eps quotient strictly below sn_estimate;
    /// gamma <= 0: all quotients at or above it
    verdict_holds: bool,
    fit: Option<crate::test_functions::AsymptoticFit>,
    fit_error: Option<String>,
    /// N >= 9 only: fitted eps^4 coefficient of the Hardy integral against
    /// the two candidate constants
    coefficient_check: Option<CandidateComparison>,
}

fn whole_space_u2(n: u32) -> Result<f64> {
    let u = bubble_radial(n)?;
    let grid = LogGrid::new(-30.0, 30.0, 8193)?;
    let w = simpson_weights(grid.n_points, grid.h());
    let nf = n as f64;
    Ok(sphere_area(n)
        * (0..grid.n_points)
            .map(|i| {
                let t = grid.t(i);
                w[i] * u.value(t.exp()).powi(2) * (nf * t).exp()
            })
            .sum::<f64>())
}

fn cmd_bubble(rc: &RunConfig) -> Result<()> {
    let gamma = rc.gamma()?;
    let scan = strict_upper_bound_scan(rc.dim, rc.a, rc.delta, &rc.eps, gamma)?;
    let mut csv = String::from("epsilon,bending,hardy,sobolev0,quotient\n");
    for r in &scan.rows {
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.epsilon, r.bending, r.hardy, r.sobolev0, r.quotient
        ));
    }
    emit_csv(&rc.out, &csv)?;

    let pts: Vec<(f64, f64)> = scan.rows.iter().map(|r| (r.epsilon, r.hardy)).collect();
    let (fit, fit_error) = match fit_asymptotics(&pts, rc.dim) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let coefficient_check = if rc.dim >= 9 {
        let full = whole_space_u2(rc.dim)? / rc.a.powi(4);
        fit.as_ref().map(|f| CandidateComparison {
            full,
            half: full / 2.0,
            fitted: f.coefficient,
            closer_to: if (f.coefficient - full).abs() <= (f.coefficient - full / 2.0).abs() {
                "full"
            } else {
                "half"
            },
        })
    } else {
        None
    };
    emit_json(&BubbleReport {
        n: rc.dim,
        gamma,
        a: rc.a,
        delta: rc.delta,
        sn_estimate: scan.sn_estimate,
        verdict_holds: scan.verdict_holds,
        fit,
        fit_error,
        coefficient_check,
    })
}

#[derive(Serialize)]
struct GridJson {
    t_min: f64,
    t_max: f64,
    n_points: usize,
}

#[derive(Serialize)]
struct MinimizeReport {
    n: u32,
    s: f64,
    gamma: f64,
    /// upper bound (symmetric ansatz; for s = 0 possibly the bubble channel)
    q_estimate: f64,
    el_residual: f64,
    iterations: usize,
    grid: GridJson,
    channel: BoundChannel,
    /// present when the s = 0 bubble channel was evaluated
    sn_estimate: Option<f64>,
    certifies_below_sn: Option<bool>,
}

fn cmd_minimize(rc: &RunConfig) -> Result<()> {
    let cfg = rc.dimension_config()?;
    let grid = rc.grid()?;
    let rep = q_upper_bound_report(&cfg, grid)?;
    if let Some(path) = &rc.out {
        write_profile_csv(path, &rep.ansatz.profile)?;
    }
    emit_json(&MinimizeReport {
        n: cfg.n,
        s: cfg.s,
        gamma: cfg.gamma,
        q_estimate: rep.q_bound,
        el_residual: rep.ansatz.el_residual,
        iterations: rep.ansatz.iterations,
        grid: GridJson {
            t_min: grid.t_min,
            t_max: grid.t_max,
            n_points: grid.n_points,
        },
        channel: rep.channel,
        sn_estimate: rep.bubble_scan.as_ref().map(|s| s.sn_estimate),
        certifies_below_sn: rep.certifies_below_sn,
    })
}

#[derive(Serialize)]
struct MountainPassReport {
    n: u32,
    s: f64,
    gamma: f64,
    ray: crate::mountain_pass::RayAnalysis,
    /// Palais-Smale mass caps at level beta = e_sup
    ps_cap_hardy_sobolev: f64,
    ps_cap_sobolev: f64,
    beta_star: f64,
    level_admissible: bool,
    level_margin: f64,
}

fn cmd_mountain_pass(rc: &RunConfig) -> Result<()> {
    let cfg = rc.dimension_config()?;
    if cfg.gamma >= hardy_constants(cfg.n)?.half_space {
        return Err(Error::Domain(format!(
            "gamma = {} is not below the half-space constant",
            cfg.gamma
        )));
    }
    let grid = rc.grid()?;
    // ray through the minimizer profile, normalized to sobolev_0 = 1
    let min = minimize_quotient(&cfg, grid, None)?;
    let e = energies(&min.profile, &cfg, Truncation::Acknowledged)?;
    let scale = e.sobolev_0.powf(-1.0 / cfg.two_star_zero());
    let pn = RadialProfile::new(
        crate::radial_calculus::GridFunction::new(
            grid,
            min.profile.f.values.iter().map(|v| v * scale).collect(),
        )?,
        cfg.n,
    )?;
    let en = energies(&pn, &cfg, Truncation::Acknowledged)?;
    let ray = analyze_ray(en.bending - cfg.gamma * en.hardy, en.sobolev_s, en.sobolev_0, &cfg)?;

    if let Some(path) = &rc.out {
        // ray trace t,E on request
        let mut csv = String::from("t,E\n");
        let qs = cfg.two_star_s();
        let q0 = cfg.two_star_zero();
        for i in 0..=1000 {
            let t = 2.0 * ray.t_star * i as f64 / 1000.0;
            let v = 0.5 * ray.r1 * t * t
                - ray.r2 * t.powf(qs) / qs
                - ray.r3 * t.powf(q0) / q0;
            csv.push_str(&format!("{t:.16e},{v:.16e}\n"));
        }
        std::fs::write(path, csv)?;
    }

    let (cap_hs, cap_s) = ps_level_bounds(ray.e_sup, &cfg)?;
    // quotient proxies of the normalized profile for the threshold window
    let q0hat = ray.r1 / ray.r3.powf(2.0 / cfg.two_star_zero());
    let qshat = ray.r1 / ray.r2.powf(2.0 / cfg.two_star_s());
    let bs = crate::constants::beta_star(cfg.n, cfg.s, q0hat, qshat)?;
    let (ok, margin) = level_window_check(ray.e_sup, q0hat, qshat, &cfg)?;
    emit_json(&MountainPassReport {
        n: cfg.n,
        s: cfg.s,
        gamma: cfg.gamma,
        ray,
        ps_cap_hardy_sobolev: cap_hs,
        ps_cap_sobolev: cap_s,
        beta_star: bs,
        level_admissible: ok,
        level_margin: margin,
    })
}

#[derive(Serialize)]
struct SweepReport {
    n: u32,
    points: usize,
    failures: usize,
}

fn cmd_sweep(rc: &RunConfig) -> Result<()> {
    let n = rc.dim;
    if n < 5 {
        return Err(Error::Domain(format!("N = {n} violates N >= 5")));
    }
    let rows: Vec<(f64, std::result::Result<IndicialRoots, String>)> = rc
        .gammas
        .par_iter()
        .map(|&gamma| {
            let out = DimensionConfig::new(n, rc.s, gamma)
                .and_then(|cfg| {
                    cfg.require_indicial_range()?;
                    indicial_roots(&cfg)
                })
                .map_err(|e| e.to_string());
            (gamma, out)
        })
        .collect();
    let mut csv =
        String::from("gamma,alpha_minus,alpha_plus,beta_minus,beta_plus,errors\n");
    let mut failures = 0;
    for (gamma, out) in &rows {
        match out {
            Ok(r) => csv.push_str(&format!(
                "{gamma:.16e},{:.16e},{:.16e},{:.16e},{:.16e},\n",
                r.alpha_minus, r.alpha_plus, r.beta_minus, r.beta_plus
            )),
            Err(msg) => {
                failures += 1;
                csv.push_str(&format!("{gamma:.16e},,,,,{}\n", msg.replace(',', ";")));
            }
        }
    }
    emit_csv(&rc.out, &csv)?;
    if failures == rows.len() {
        return Err(Error::Numerical(format!(
            "all {failures} sweep points failed"
        )));
    }
    emit_json(&SweepReport {
        n,
        points: rows.len(),
        failures,
    })
}

fn run(cli: &Cli) -> Result<()> {
    let rc = RunConfig::resolve(cli)?;
    let jobs = rc.jobs;
    let body = move || match cli.command {
        Command::Constants => cmd_constants(&rc),
        Command::Roots => cmd_roots(&rc),
        Command::HardySeq => cmd_hardy_seq(&rc),
        Command::Bubble => cmd_bubble(&rc),
        Command::Minimize => cmd_minimize(&rc),
        Command::MountainPass => cmd_mountain_pass(&rc),
        Command::Sweep => cmd_sweep(&rc),
    };
    match jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot build a {jobs}-thread pool: {e}")))?
            .install(body),
        None => body(),
    }
}

/// CLI entry point; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

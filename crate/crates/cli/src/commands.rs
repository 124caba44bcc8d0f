use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mdpc::{
    analytic_limits, burgers_diagonal_error, burgers_shock_time, empirical_cfl, error_norms,
    exact_circular, exact_constant_advection, max_abs_amplification, optimize_icf,
    phase_speed_spread, polar_diagram, power_region_margin, solve, wendroff_condition,
    EmpiricalCflOptions, GridSpec, ProblemSpec, ScalarField, SolveConfig, SolveResult,
    SpatialScheme, TimeStepRule, Velocity,
};

use crate::config::{
    parse_config, AnalyzeConfig, BenchConfig, BetaChoice, CommandConfig, CommandKind, DtChoice,
    IcfConfig, RunCommandConfig, StabilityConfig,
};
use crate::error::{CliError, Result};

/// What a command produced: files on disk plus a human-readable report for stdout.
pub struct Execution {
    pub files: Vec<PathBuf>,
    pub report: String,
}

/// Parse the config text for `kind` and run the command, writing outputs under
/// the resolved directory (`out_override` wins over the config's `out_dir`).
pub fn execute(kind: CommandKind, config_text: &str, out_override: Option<&Path>) -> Result<Execution> {
    let parsed = parse_config(config_text, kind)?;
    let out_dir = match out_override {
        Some(p) => p.to_path_buf(),
        None => PathBuf::from(parsed.out_dir.as_deref().unwrap_or(".")),
    };
    fs::create_dir_all(&out_dir)?;
    match parsed.command {
        CommandConfig::Analyze(cfg) => analyze(&cfg, &out_dir),
        CommandConfig::Icf(cfg) => icf(&cfg, &out_dir),
        CommandConfig::Stability(cfg) => stability(&cfg, &out_dir),
        CommandConfig::Run(cfg) => run(&cfg, &out_dir),
        CommandConfig::Bench(cfg) => bench(&cfg, &out_dir),
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn resolve_beta(choice: BetaChoice, order: u32, dims: usize, ppw_ref: f64) -> Result<f64> {
    match choice {
        BetaChoice::Fixed(b) => Ok(b),
        BetaChoice::Auto => {
            if dims < 2 {
                return Err(CliError::config(
                    "beta = auto needs a two- or three-dimensional setting",
                ));
            }
            Ok(optimize_icf(order, ppw_ref, dims)?)
        }
    }
}

fn write_csv(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = out_dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn analyze(cfg: &AnalyzeConfig, out_dir: &Path) -> Result<Execution> {
    let beta = resolve_beta(cfg.beta, cfg.order, 2, cfg.ppw_ref)?;
    let rows = polar_diagram(cfg.order, beta, &cfg.ppw, cfg.n_theta)?;
    let mut csv = String::from("ppw,theta,kh,phase_velocity,group_velocity_x,group_velocity_y\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            num(r.ppw),
            num(r.theta),
            num(r.kh),
            num(r.phase_velocity),
            num(r.group_velocity[0]),
            num(r.group_velocity[1]),
        );
    }
    let path = write_csv(out_dir, "polar.csv", &csv)?;
    let mut report = format!(
        "dispersion survey: order {}, beta {:.6}, {} angles per resolution\n",
        cfg.order, beta, cfg.n_theta
    );
    for &ppw in &cfg.ppw {
        let spread = phase_speed_spread(cfg.order, beta, ppw, 181)?;
        let _ = writeln!(report, "  ppw {ppw:>6.2}: phase speed spread {spread:.3e}");
    }
    Ok(Execution { files: vec![path], report })
}

fn icf(cfg: &IcfConfig, out_dir: &Path) -> Result<Execution> {
    let mut csv = String::from("ppw,beta\n");
    let mut rows = 0usize;
    let mut ppw = cfg.ppw_min;
    while ppw <= cfg.ppw_max + 1e-9 {
        let beta = optimize_icf(cfg.order, ppw, cfg.dims)?;
        let _ = writeln!(csv, "{},{}", num(ppw), num(beta));
        rows += 1;
        ppw += cfg.ppw_step;
    }
    let path = write_csv(out_dir, "icf.csv", &csv)?;
    let report = format!(
        "isotropy corrector sweep: order {}, {}D, ppw {}..{} step {} ({} rows)\n",
        cfg.order, cfg.dims, cfg.ppw_min, cfg.ppw_max, cfg.ppw_step, rows,
    );
    Ok(Execution { files: vec![path], report })
}

fn stability(cfg: &StabilityConfig, out_dir: &Path) -> Result<Execution> {
    let dims = cfg.speeds.len();
    let beta = resolve_beta(cfg.beta, cfg.order, dims, cfg.ppw_ref)?;
    let rep = analytic_limits(&cfg.speeds, cfg.order, beta)?;

    let mut csv = String::from("key,value\n");
    let _ = writeln!(csv, "order,{}", cfg.order);
    let _ = writeln!(csv, "beta,{}", num(beta));
    for (i, c) in cfg.speeds.iter().enumerate() {
        let _ = writeln!(csv, "speed_{i},{}", num(*c));
    }
    let _ = writeln!(csv, "xi_max,{}", num(rep.xi_max));
    let _ = writeln!(csv, "limit_1d_sigma,{}", num(rep.limit_1d));
    let _ = writeln!(csv, "md_primary_axis,{}", rep.limit_md.primary_axis);
    let _ = writeln!(csv, "md_dt_per_h,{}", num(rep.limit_md.dt_per_h));
    let _ = writeln!(csv, "diagonal_limit_sigma,{}", num(rep.limit_diagonal));

    let mut report = format!(
        "stability report: order {}, beta {:.6}, speeds {:?}\n",
        cfg.order, beta, cfg.speeds
    );
    let _ = writeln!(report, "  xi_max               {:.6}", rep.xi_max);
    let _ = writeln!(report, "  line limit sigma     {:.6}", rep.limit_1d);
    let _ = writeln!(
        report,
        "  md restriction       dt <= {:.6} h (primary axis {})",
        rep.limit_md.dt_per_h, rep.limit_md.primary_axis
    );
    let _ = writeln!(report, "  diagonal limit sigma {:.6}", rep.limit_diagonal);

    if let Some(sigma) = &cfg.sigma {
        let margin = power_region_margin(rep.xi_max, sigma);
        let inside = margin >= 0.0;
        let n_eta = if dims == 3 { 101 } else { 201 };
        let g = max_abs_amplification(cfg.order, beta, sigma, n_eta)?;
        let _ = writeln!(csv, "power_region_margin,{}", num(margin));
        let _ = writeln!(csv, "power_region_satisfied,{inside}");
        let _ = writeln!(csv, "max_abs_g,{}", num(g));
        let _ = writeln!(report, "  at sigma {sigma:?}:");
        let _ = writeln!(
            report,
            "    power region margin {margin:+.6} ({})",
            if inside { "inside" } else { "outside" }
        );
        if dims == 2 {
            let w = wendroff_condition(sigma[0], sigma[1]);
            let _ = writeln!(csv, "product_form_margin,{}", num(w.margin));
            let _ = writeln!(csv, "product_form_satisfied,{}", w.satisfied);
            let _ = writeln!(
                report,
                "    product-form margin {:+.6} ({})",
                w.margin,
                if w.satisfied { "inside" } else { "outside" }
            );
        }
        let _ = writeln!(report, "    max |G| on {n_eta}^{dims} grid: {g:.9}");
    }

    let path = write_csv(out_dir, "stability.csv", &csv)?;
    Ok(Execution { files: vec![path], report })
}

fn node_coords(grid: &GridSpec, origin: &[f64], flat: usize) -> Vec<f64> {
    let n = grid.n_per_axis();
    let h = grid.h();
    let mut idx = flat;
    let mut coords = Vec::with_capacity(grid.dims());
    for d in 0..grid.dims() {
        coords.push(origin[d] + (idx % n[d]) as f64 * h);
        idx /= n[d];
    }
    coords
}

fn write_solution(
    out_dir: &Path,
    problem: &ProblemSpec,
    state: &ScalarField,
    t: f64,
) -> Result<PathBuf> {
    let grid = state.grid();
    let dims = grid.dims();
    let axis_names = ["x", "y", "z"];
    let mut csv = String::new();
    let mut meta_keys: Vec<String> = (0..dims).map(|d| format!("n{}", axis_names[d])).collect();
    meta_keys.push("h".into());
    meta_keys.push("t".into());
    let _ = writeln!(csv, "{}", meta_keys.join(","));
    let mut meta_vals: Vec<String> = grid.n_per_axis().iter().map(|n| n.to_string()).collect();
    meta_vals.push(num(grid.h()));
    meta_vals.push(num(t));
    let _ = writeln!(csv, "{}", meta_vals.join(","));
    let mut cols: Vec<&str> = axis_names[..dims].to_vec();
    cols.push("u");
    let _ = writeln!(csv, "{}", cols.join(","));
    for (flat, u) in state.values().iter().enumerate() {
        let coords = node_coords(grid, &problem.domain_min, flat);
        for c in coords {
            let _ = write!(csv, "{},", num(c));
        }
        let _ = writeln!(csv, "{}", num(*u));
    }
    write_csv(out_dir, "solution.csv", &csv)
}

fn write_norms(out_dir: &Path, result: &SolveResult) -> Result<PathBuf> {
    let mut csv = String::from("step,time,max_abs,mean\n");
    for rec in &result.history {
        let _ = writeln!(csv, "{},{},{},{}", rec.step, num(rec.time), num(rec.max_abs), num(rec.mean));
    }
    write_csv(out_dir, "norms.csv", &csv)
}

fn exact_error_lines(problem: &ProblemSpec, grid: &GridSpec, state: &ScalarField, t: f64) -> Result<String> {
    let mut out = String::new();
    match &problem.velocity {
        Velocity::Rotation { .. } => {
            let exact = exact_circular(problem, grid, t)?;
            let (l2, linf) = error_norms(state, &exact)?;
            let _ = writeln!(out, "  error vs rotated exact: L2 {l2:.6e}, Linf {linf:.6e}");
        }
        Velocity::Constant(_) => {
            let exact = exact_constant_advection(problem, grid, t)?;
            let (l2, linf) = error_norms(state, &exact)?;
            let _ = writeln!(out, "  error vs translated exact: L2 {l2:.6e}, Linf {linf:.6e}");
        }
        Velocity::SelfAdvection => {
            let t_shock = burgers_shock_time(problem)?;
            if t < t_shock {
                let (l2, linf) = burgers_diagonal_error(problem, grid, state, t)?;
                let _ = writeln!(
                    out,
                    "  diagonal error vs characteristics: L2 {l2:.6e}, Linf {linf:.6e} (shock at t = {t_shock:.4})"
                );
            } else {
                let _ = writeln!(out, "  past characteristic crossing (t >= {t_shock:.4}); no smooth exact solution");
            }
        }
    }
    Ok(out)
}

fn run(cfg: &RunCommandConfig, out_dir: &Path) -> Result<Execution> {
    let problem = cfg.problem.build();
    let grid = problem.grid(cfg.n)?;
    let beta = resolve_beta(cfg.beta, cfg.order, problem.dims, cfg.ppw_ref)?;
    let scheme = SpatialScheme::Prefactored { order: cfg.order, beta };
    let time_step = match cfg.dt {
        DtChoice::Fixed(dt) => TimeStepRule::Fixed(dt),
        DtChoice::Auto => TimeStepRule::StableFraction(0.9),
    };
    let solve_cfg = SolveConfig { scheme, time_step, final_time: cfg.final_time };
    let result = solve(&problem, &grid, &solve_cfg)?;

    let solution = write_solution(out_dir, &problem, &result.state, result.time)?;
    let norms = write_norms(out_dir, &result)?;

    let mut report = format!(
        "run: {} problem, order {}, beta {:.6}, {} points per axis\n",
        cfg.problem.name(),
        cfg.order,
        beta,
        cfg.n
    );
    let _ = writeln!(
        report,
        "  marched {} steps of dt = {:.6e} to t = {:.6}",
        result.steps, result.dt, result.time
    );
    report.push_str(&exact_error_lines(&problem, &grid, &result.state, result.time)?);
    Ok(Execution { files: vec![solution, norms], report })
}

fn median3_time(problem: &ProblemSpec, grid: &GridSpec, cfg: &SolveConfig) -> Result<(f64, SolveResult)> {
    let mut result = solve(problem, grid, cfg)?;
    let mut times = [0.0f64; 3];
    for slot in &mut times {
        let start = Instant::now();
        result = solve(problem, grid, cfg)?;
        *slot = start.elapsed().as_secs_f64();
    }
    times.sort_by(f64::total_cmp);
    Ok((times[1], result))
}

/// Grid-refinement factor at which the unblended scheme's directional
/// phase-speed spread falls to the blended scheme's spread at `ppw_ref`.
/// Solved by bisection on points-per-wavelength (spread decreases with ppw).
fn matched_refinement(order: u32, beta: f64, ppw_ref: f64) -> Result<f64> {
    const N_THETA: usize = 181;
    let target = phase_speed_spread(order, beta, ppw_ref, N_THETA)?;
    if phase_speed_spread(order, 0.0, ppw_ref, N_THETA)? <= target {
        return Ok(1.0);
    }
    let mut lo = ppw_ref;
    let mut hi = 2.0 * ppw_ref;
    while phase_speed_spread(order, 0.0, hi, N_THETA)? > target {
        hi *= 2.0;
        if hi > 4096.0 * ppw_ref {
            break;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if phase_speed_spread(order, 0.0, mid, N_THETA)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi) / ppw_ref)
}

struct MeasuredRun {
    sigma: f64,
    dt: f64,
    wall: f64,
}

fn measure(
    problem: &ProblemSpec,
    grid: &GridSpec,
    scheme: SpatialScheme,
    final_time: f64,
    opts: &EmpiricalCflOptions,
) -> Result<MeasuredRun> {
    let speeds = problem.axis_max_speeds(grid)?;
    let c_ref = speeds.iter().fold(0.0f64, |m, &v| m.max(v));
    let sigma = empirical_cfl(problem, grid, scheme, opts)?;
    let dt = 0.9 * sigma * grid.h() / c_ref;
    let cfg = SolveConfig {
        scheme,
        time_step: TimeStepRule::Fixed(dt),
        final_time: Some(final_time),
    };
    let (wall, _) = median3_time(problem, grid, &cfg)?;
    Ok(MeasuredRun { sigma, dt, wall })
}

fn bench(cfg: &BenchConfig, out_dir: &Path) -> Result<Execution> {
    let problem = cfg.problem.build();
    let grid = problem.grid(cfg.n)?;
    let beta = resolve_beta(cfg.beta, cfg.order, problem.dims, cfg.ppw_ref)?;
    let final_time = cfg.final_time.unwrap_or(problem.final_time);
    let baseline_id = format!("pc{}", cfg.order);
    let md_id = format!("mpc{}", cfg.order);
    let opts = EmpiricalCflOptions {
        horizon: 100,
        noise_amplitude: 1e-6,
        ..EmpiricalCflOptions::default()
    };

    let base_scheme = SpatialScheme::Prefactored { order: cfg.order, beta: 0.0 };
    let md_scheme = SpatialScheme::Prefactored { order: cfg.order, beta };
    let base = measure(&problem, &grid, base_scheme, final_time, &opts)?;
    let md = measure(&problem, &grid, md_scheme, final_time, &opts)?;

    let dt_ratio = md.dt / base.dt;
    let speedup = 100.0 * (base.wall - md.wall) / base.wall;

    let matched = if cfg.isotropy_match {
        let factor = matched_refinement(cfg.order, beta, cfg.ppw_ref)?;
        let n_matched = ((cfg.n as f64 * factor).round() as usize).max(cfg.n);
        let grid_matched = problem.grid(n_matched)?;
        let run = measure(&problem, &grid_matched, base_scheme, final_time, &opts)?;
        Some((n_matched, run))
    } else {
        None
    };

    let mut csv = String::from(
        "baseline,md,order,beta,n,final_time,sigma_baseline,sigma_md,dt_baseline,dt_md,dt_ratio,\
         time_baseline_s,time_md_s,speedup_pct,matched_n,matched_time_s,matched_speedup_pct\n",
    );
    let (mn, mt, ms) = match &matched {
        Some((n_matched, run)) => {
            let s = 100.0 * (run.wall - md.wall) / run.wall;
            (n_matched.to_string(), num(run.wall), num(s))
        }
        None => (String::new(), String::new(), String::new()),
    };
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        baseline_id,
        md_id,
        cfg.order,
        num(beta),
        cfg.n,
        num(final_time),
        num(base.sigma),
        num(md.sigma),
        num(base.dt),
        num(md.dt),
        num(dt_ratio),
        num(base.wall),
        num(md.wall),
        num(speedup),
        mn,
        mt,
        ms,
    );
    let path = write_csv(out_dir, "bench.csv", &csv)?;

    let mut report = format!(
        "benchmark: {} problem, order {}, n {}, T = {:.4}\n",
        cfg.problem.name(),
        cfg.order,
        cfg.n,
        final_time
    );
    let _ = writeln!(report, "  scheme  beta      sigma       dt            wall [s]");
    let _ = writeln!(
        report,
        "  {:<7} {:<9.4} {:<11.6} {:<13.6e} {:.4}",
        baseline_id, 0.0, base.sigma, base.dt, base.wall
    );
    let _ = writeln!(
        report,
        "  {:<7} {:<9.4} {:<11.6} {:<13.6e} {:.4}",
        md_id, beta, md.sigma, md.dt, md.wall
    );
    let _ = writeln!(report, "  dt ratio ({md_id}/{baseline_id})  {dt_ratio:.4}");
    let _ = writeln!(report, "  wall-time speedup    {speedup:.1}%");
    if let Some((n_matched, run)) = &matched {
        let s = 100.0 * (run.wall - md.wall) / run.wall;
        let _ = writeln!(
            report,
            "  spread-matched baseline: n = {n_matched}, wall {:.4} s, speedup {s:.1}%",
            run.wall
        );
    }
    Ok(Execution { files: vec![path], report })
}

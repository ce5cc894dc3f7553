//! `geophase` — loop-transport experiments for driven three-level systems.
//!
//! Exit codes: 0 on success/pass, 2 when a verification gate fails,
//! 1 on any error (including bad usage).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, TAU};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use geophase_cli::config::{ConnectionKind, ExperimentConfig, OutputFormat};
use geophase_cli::experiments::{
    alpha_scan, composed_path_pd, default_alpha_grid, two_method_report, Method,
    MethodDiagnostics, SelectedConnection, AGREEMENT_TOLERANCE, REFERENCE_MAX_PD,
};
use geophase_cli::output::{emit, format_float, render, CliError, ScanRow};

use geophase_core::dynamics::{
    doublet_leakage, evolve, LoopSchedule, QuantumState,
};
use geophase_core::holonomy::{
    discretize, loop_integral, solid_angle, wilson_loop, LoopSpec,
};
use geophase_core::lambda::{
    curvature, energy_levels, gamma_angle, AbelianTestField, FullFrameConnection, MixingAngles,
};
use geophase_core::numerics::{matexp_skew, unitarity_residual, CMatrix};
use geophase_core::spin_half::{
    adiabatic_connection, curvature as spin_curvature, curvature_fd, monopole_flux, Branch,
    MagneticField,
};

const GATE_FAIL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "geophase",
    version,
    about = "Wilson loops, gauge curvature, and Schrödinger dynamics for three-level lambda systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Clone, Debug)]
struct Overrides {
    /// JSON experiment configuration; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Detuning Δ (units of Ω).
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Effective Rabi frequency Ω.
    #[arg(long, global = true)]
    omega: Option<f64>,
    /// Relative pulse amplitude for both loop templates.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Relative pulse delay for both loop templates.
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Wilson-loop segment count.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Propagator step (units of 1/Ω).
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Traversal time per loop (units of 1/Ω).
    #[arg(long, global = true)]
    duration: Option<f64>,
    /// Seed for randomized verification commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file for tabular results.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads for scans (0 = automatic).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    connection: Option<ConnectionArg>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ConnectionArg {
    Frame,
    LargeDetuning,
    Abelian,
}

#[derive(Subcommand)]
enum Command {
    /// Solid-angle benchmark: Abelian Wilson loops on θ₀ circles.
    AbelianLoop {
        /// Run a single θ₀ instead of the standard set {π/6, π/4, π/3}.
        #[arg(long)]
        theta0: Option<f64>,
    },
    /// Map ‖F_θφ‖ of the selected connection over the (θ, φ) grid.
    CurvatureMap {
        /// Grid points per axis.
        #[arg(long, default_value_t = 100)]
        grid: usize,
    },
    /// Spin-1/2 monopole checks: finite-difference curl vs closed form,
    /// and the sphere-flux Chern number.
    SpinHalf {
        /// Number of random off-pole sample points.
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Wilson loop of the first configured loop.
    Wilson {
        /// Transport with the full 3x3 frame connection instead of the
        /// doublet projection.
        #[arg(long)]
        unprojected: bool,
    },
    /// Composed-path order dependence, both methods.
    Compose,
    /// Single Schrödinger run along the first configured loop.
    Evolve,
    /// α-scan at fixed β: one row per α, both methods, CSV/JSON out.
    Scan {
        /// Comma-separated α grid (default 0.1..1.0 step 0.1).
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
    },
    /// Two-method equivalence report on the configured loop pair.
    Report,
}

fn build_config(overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
    let mut config = match &overrides.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(delta) = overrides.delta {
        config.params.delta = delta;
    }
    if let Some(omega) = overrides.omega {
        config.params.omega = omega;
    }
    if let Some(steps) = overrides.steps {
        config.wilson_steps = steps;
    }
    if let Some(dt) = overrides.dt {
        config.dt = dt;
    }
    if let Some(duration) = overrides.duration {
        config.duration = duration;
    }
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(workers) = overrides.workers {
        config.workers = workers;
    }
    if let Some(output) = &overrides.output {
        config.output = Some(output.clone());
    }
    if let Some(format) = overrides.format {
        config.format = match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    if let Some(connection) = overrides.connection {
        config.connection = match connection {
            ConnectionArg::Frame => ConnectionKind::Frame,
            ConnectionArg::LargeDetuning => ConnectionKind::LargeDetuning,
            ConnectionArg::Abelian => ConnectionKind::Abelian,
        };
    }
    if overrides.alpha.is_some() || overrides.beta.is_some() {
        let (template_alpha, template_beta) = match &config.loop1 {
            LoopSpec::Lissajous { alpha, beta, .. } => (*alpha, *beta),
            _ => {
                return Err(CliError::Config(
                    "--alpha/--beta need lissajous loop templates".into(),
                ))
            }
        };
        config = config.with_alpha_beta(
            overrides.alpha.unwrap_or(template_alpha),
            overrides.beta.unwrap_or(template_beta),
        )?;
    }
    config.validate()?;
    Ok(config)
}

fn print_matrix(label: &str, m: &CMatrix) {
    println!("{label}:");
    for i in 0..m.dim() {
        let mut line = String::from("  ");
        for j in 0..m.dim() {
            let z = m[(i, j)];
            line.push_str(&format!("{:+.6}{:+.6}i  ", z.re, z.im));
        }
        println!("{line}");
    }
}

fn wrapped_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn cmd_abelian_loop(config: &ExperimentConfig, theta0: Option<f64>) -> Result<u8, CliError> {
    let set = match theta0 {
        Some(t) => vec![t],
        None => vec![FRAC_PI_6, FRAC_PI_4, FRAC_PI_3],
    };
    let n = config.wilson_steps.max(8);
    let mut worst = 0.0f64;
    println!("abelian solid-angle benchmark (n = {n})");
    for t0 in set {
        let lp = discretize(&LoopSpec::Circle { theta0: t0 }, n)?;
        let h = wilson_loop(&lp, &AbelianTestField)?;
        let expected = solid_angle(t0) / 2.0;
        let phase = h.matrix[(0, 0)].arg();
        let deviation = wrapped_distance(phase, expected);
        worst = worst.max(deviation);
        println!(
            "  theta0 = {t0:.6}: phase = {phase:+.9}, half solid angle = {expected:.9} \
             (mod 2pi dev {:.3e}, unitarity {:.3e}, richardson {:.3e})",
            deviation,
            unitarity_residual(&h.matrix),
            h.richardson_error,
        );
    }
    let pass = worst <= 1e-6;
    println!("max phase deviation: {worst:.3e} -> {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { GATE_FAIL })
}

fn cmd_curvature_map(config: &ExperimentConfig, grid: usize) -> Result<u8, CliError> {
    if grid < 2 {
        return Err(CliError::Config("grid must be at least 2".into()));
    }
    let field = SelectedConnection(config.connection);
    let mut sup = 0.0f64;
    let mut lines = String::from("theta,phi,f_norm\n");
    for i in 0..grid {
        let theta = FRAC_PI_2 * (i as f64 + 0.5) / grid as f64;
        for j in 0..grid {
            let phi = TAU * (j as f64 + 0.5) / grid as f64;
            let f = curvature(&field, theta, phi).frobenius_norm();
            sup = sup.max(f);
            lines.push_str(&format!(
                "{},{},{}\n",
                format_float(theta),
                format_float(phi),
                format_float(f)
            ));
        }
    }
    if let Some(path) = &config.output {
        std::fs::write(path, lines)
            .map_err(|source| CliError::IoFailure { path: path.clone(), source })?;
        println!("wrote {} x {grid} curvature map to {}", grid, path.display());
    }
    let gated = config.connection != ConnectionKind::Abelian;
    println!("sup ||F_theta_phi|| over the {grid}x{grid} grid: {sup:.6e}");
    if !gated {
        println!("(abelian surrogate carries real curvature; no flatness gate)");
        return Ok(0);
    }
    let pass = sup <= 1e-9;
    println!("flatness gate (<= 1e-9): {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { GATE_FAIL })
}

fn cmd_spin_half(config: &ExperimentConfig, points: usize) -> Result<u8, CliError> {
    let mut rng = StdRng::seed_from_u64(config.seed);
    let mut worst_rel = 0.0f64;
    for _ in 0..points {
        let field = loop {
            let candidate = MagneticField {
                bx: rng.gen_range(-2.0..2.0),
                by: rng.gen_range(-2.0..2.0),
                bz: rng.gen_range(-2.0..2.0),
            };
            let b = candidate.norm();
            if b > 0.3 && b - candidate.bz.abs() > 0.1 * b {
                break candidate;
            }
        };
        for branch in [Branch::Plus, Branch::Minus] {
            let exact = spin_curvature(&field, branch);
            let fd = curvature_fd(&field, branch, 1e-6)?;
            let scale = 1.0 / (2.0 * field.norm() * field.norm());
            for i in 0..3 {
                for j in 0..3 {
                    worst_rel = worst_rel.max((exact[i][j] - fd[i][j]).abs() / scale);
                }
            }
        }
    }
    let flux_minus = monopole_flux(Branch::Minus, 1.0, 200, 400);
    let flux_plus = monopole_flux(Branch::Plus, 1.0, 200, 400);
    let sample = MagneticField { bx: 1.0, by: 0.0, bz: 0.0 };
    let a_plus = adiabatic_connection(&sample, Branch::Plus)?;

    println!("spin-1/2 monopole checks ({points} off-pole points, seed {})", config.seed);
    println!("  A+ at B = (1,0,0): ({:.3}, {:.3}, {:.3})", a_plus[0], a_plus[1], a_plus[2]);
    println!("  max |closed-form - finite-difference| / |F|: {worst_rel:.3e}");
    println!("  sphere flux, minus branch: {flux_minus:+.6} (expect +2pi = {:+.6})", TAU);
    println!("  sphere flux, plus branch:  {flux_plus:+.6} (expect -2pi)");
    let pass = worst_rel <= 1e-6
        && (flux_minus - TAU).abs() <= 0.005 * TAU
        && (flux_plus + TAU).abs() <= 0.005 * TAU;
    println!("monopole gate: {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { GATE_FAIL })
}

fn cmd_wilson(config: &ExperimentConfig, unprojected: bool) -> Result<u8, CliError> {
    let lp = discretize(&config.loop1, config.wilson_steps)?;
    let (holonomy, integral) = if unprojected {
        let field = FullFrameConnection { gamma: gamma_angle(&config.params) };
        (wilson_loop(&lp, &field)?, loop_integral(&lp, &field))
    } else {
        let field = SelectedConnection(config.connection);
        (wilson_loop(&lp, &field)?, loop_integral(&lp, &field))
    };
    let dim = holonomy.matrix.dim();
    println!(
        "wilson loop over {} segments ({}):",
        holonomy.steps,
        if unprojected { "full 3x3 frame connection" } else { "projected doublet connection" }
    );
    print_matrix("U", &holonomy.matrix);
    let identity_gap = (holonomy.matrix - CMatrix::identity(dim)).frobenius_norm();
    let ordering_gap = (holonomy.matrix
        - matexp_skew(&integral.scale(num_complex::Complex64::new(-1.0, 0.0)))?)
    .frobenius_norm();
    println!("  unitarity residual : {:.3e}", unitarity_residual(&holonomy.matrix));
    println!("  richardson error   : {:.3e}", holonomy.richardson_error);
    println!("  ||U - I||          : {:.3e}", identity_gap);
    println!("  ||loop integral||  : {:.6}", integral.frobenius_norm());
    println!("  ordering gap ||U - exp(-integral)||: {:.3e}", ordering_gap);
    Ok(0)
}

fn print_composed(label: &str, result: &geophase_cli::experiments::ComposedPathResult) {
    println!("{label}:");
    println!(
        "  populations loop1then2: [{:.9}, {:.9}, {:.9}]",
        result.populations_ab[0], result.populations_ab[1], result.populations_ab[2]
    );
    println!(
        "  populations loop2then1: [{:.9}, {:.9}, {:.9}]",
        result.populations_ba[0], result.populations_ba[1], result.populations_ba[2]
    );
    println!("  P_d = {:.6e}", result.pd);
    match result.diagnostics {
        MethodDiagnostics::Holonomy { commutator_norm, richardson_error } => {
            println!("  commutator norm = {commutator_norm:.6e}, richardson = {richardson_error:.3e}");
        }
        MethodDiagnostics::Tdse { leakage, norm_drift } => {
            println!("  leakage = {leakage:.3e}, norm drift = {norm_drift:.3e}");
        }
    }
}

fn cmd_compose(config: &ExperimentConfig) -> Result<u8, CliError> {
    let holonomy = composed_path_pd(config, Method::Holonomy)?;
    let tdse = composed_path_pd(config, Method::Tdse)?;
    print_composed("holonomy method", &holonomy);
    print_composed("tdse method", &tdse);
    println!("|pd_holonomy - pd_tdse| = {:.6e}", (holonomy.pd - tdse.pd).abs());
    Ok(0)
}

fn cmd_evolve(config: &ExperimentConfig) -> Result<u8, CliError> {
    let schedule = LoopSchedule::new(config.loop1.clone(), config.duration)?;
    let psi0 = match config.initial_state {
        geophase_cli::config::InitialState::Named(_) => QuantumState::dark(),
        geophase_cli::config::InitialState::Amplitudes(a) => QuantumState([
            num_complex::Complex64::new(a[0][0], a[0][1]),
            num_complex::Complex64::new(a[1][0], a[1][1]),
            num_complex::Complex64::new(a[2][0], a[2][1]),
        ]),
    };
    let out = evolve(&schedule, &config.params, &psi0, config.dt)?;
    let (theta, phi) = schedule.angles_at(schedule.duration());
    let leakage = doublet_leakage(
        &out.final_state,
        &MixingAngles::new(theta, phi, gamma_angle(&config.params)),
    );
    let [_, e_minus, _] = energy_levels(&config.params);
    println!("schrodinger run: duration {} (units 1/omega), dt {}", config.duration, config.dt);
    println!(
        "  final populations: [{:.9}, {:.9}, {:.9}]",
        out.populations[0], out.populations[1], out.populations[2]
    );
    println!("  norm drift      : {:.3e}", out.norm_drift);
    println!("  min gap         : {:.6}", out.min_gap);
    println!("  doublet leakage : {:.3e}", leakage);
    println!("  dynamical bound : {:.6e}", e_minus.abs() * config.duration);
    if let Some(path) = &config.output {
        let record = serde_json::json!({
            "populations": out.populations,
            "norm_drift": out.norm_drift,
            "min_gap": out.min_gap,
            "leakage": leakage,
            "dynamical_phase_bound": e_minus.abs() * config.duration,
        });
        let mut body = serde_json::to_string_pretty(&record).expect("record serializes");
        body.push('\n');
        std::fs::write(path, body)
            .map_err(|source| CliError::IoFailure { path: path.clone(), source })?;
        println!("wrote run record to {}", path.display());
    }
    Ok(0)
}

fn cmd_scan(config: &ExperimentConfig, alphas: Option<Vec<f64>>, beta: Option<f64>) -> Result<u8, CliError> {
    let grid = alphas.unwrap_or_else(default_alpha_grid);
    let beta = beta.unwrap_or(0.5);
    let rows = alpha_scan(config, &grid, beta)?;
    match &config.output {
        Some(path) => {
            emit(&rows, config.format, path)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{}", render(&rows, config.format)),
    }
    summarize_scan(&rows);
    let max_gap = rows
        .iter()
        .map(|r| (r.pd_holonomy - r.pd_tdse).abs())
        .fold(0.0f64, f64::max);
    Ok(if max_gap <= AGREEMENT_TOLERANCE { 0 } else { GATE_FAIL })
}

fn summarize_scan(rows: &[ScanRow]) {
    let max_pd = rows.iter().map(|r| r.pd_holonomy.max(r.pd_tdse)).fold(0.0f64, f64::max);
    let max_gap = rows
        .iter()
        .map(|r| (r.pd_holonomy - r.pd_tdse).abs())
        .fold(0.0f64, f64::max);
    println!("scan summary:");
    println!(
        "  attained max P_d = {max_pd:.6e} (reference magnitude for this experiment class: {REFERENCE_MAX_PD})"
    );
    println!("  max |pd_holonomy - pd_tdse| = {max_gap:.6e} (tolerance {AGREEMENT_TOLERANCE})");
}

fn cmd_report(config: &ExperimentConfig) -> Result<u8, CliError> {
    let report = two_method_report(config)?;
    print_composed("holonomy method", &report.holonomy);
    print_composed("tdse method", &report.tdse);
    println!("max population difference : {:.6e}", report.max_population_diff);
    println!("|pd_holonomy - pd_tdse|   : {:.6e}", report.pd_difference);
    println!("dynamical phase bound     : {:.6e} rad", report.dynamical_phase_bound);
    println!("doublet leakage           : {:.3e}", report.leakage);
    println!("norm drift                : {:.3e}", report.norm_drift);
    match report.failure_cause {
        None => println!("two-method agreement (tolerance {AGREEMENT_TOLERANCE}): PASS"),
        Some(cause) => {
            println!("two-method agreement (tolerance {AGREEMENT_TOLERANCE}): FAIL ({cause})")
        }
    }
    Ok(if report.pass { 0 } else { GATE_FAIL })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let config = build_config(&cli.overrides)?;
    match cli.command {
        Command::AbelianLoop { theta0 } => cmd_abelian_loop(&config, theta0),
        Command::CurvatureMap { grid } => cmd_curvature_map(&config, grid),
        Command::SpinHalf { points } => cmd_spin_half(&config, points),
        Command::Wilson { unprojected } => cmd_wilson(&config, unprojected),
        Command::Compose => cmd_compose(&config),
        Command::Evolve => cmd_evolve(&config),
        Command::Scan { alphas } => cmd_scan(&config, alphas, cli.overrides.beta),
        Command::Report => cmd_report(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                // clap would exit 2; keep 2 reserved for gate failures
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nonlocal_neumann::geometry::{write_cloud_csv, ManifoldCase, Mode};
use nonlocal_neumann::harness::{
    convergence_study, e2_from_samples, emit_lemma_report, emit_report, expand_config_args,
    lemma_diagnostics, StudyConfig,
};
use nonlocal_neumann::kernels::{KernelProfile, ScaledKernel};
use nonlocal_neumann::variants::{solve_variant, Field, NeumannData, Variant, VariantConfig};
use nonlocal_neumann::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "nonlocal", version, about = "Nonlocal point-cloud Poisson solver with Neumann boundary")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep resolutions and seeds, fit the e2 slope.
    Converge(ConvergeArgs),
    /// Solve one problem instance.
    Solve(SolveArgs),
    /// Kernel-lemma order diagnostics.
    Lemmas(LemmaArgs),
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, default_value = "hemisphere2")]
    case: String,
    #[arg(long, default_value = "full")]
    mode: String,
    #[arg(long, default_value = "none")]
    variant: String,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.5)]
    p: f64,
    #[arg(long = "g-case", default_value = "manufactured")]
    g_case: String,
    /// Two-column `r R(r)` table replacing the cosine profile.
    #[arg(long)]
    kernel_table: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    jacobi: bool,
    /// Accepted only as a file key; expanded before parsing.
    #[arg(long, hide = true)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated resolutions.
    #[arg(long, default_value = "5,10,15,20,30,40")]
    t: String,
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    #[arg(long)]
    out: PathBuf,
    /// Report wall_ms = 0 so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    /// Exit 0 even when some runs did not converge.
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 10)]
    t: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    export_matrix: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct LemmaArgs {
    #[arg(long, default_value = "hemisphere2")]
    case: String,
    #[arg(long, default_value = "0.4,0.2,0.1,0.05")]
    deltas: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, hide = true)]
    config: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Error::Configuration(format!("bad {what} entry '{v}' in '{s}'")))
        })
        .collect()
}

struct Model {
    case: ManifoldCase,
    mode: Mode,
    variant: VariantConfig,
    profile: KernelProfile,
}

fn model(args: &ModelArgs) -> Result<Model> {
    let case: ManifoldCase = args.case.parse()?;
    let mode: Mode = args.mode.parse()?;
    let kind: Variant = args.variant.parse()?;
    let mut variant = VariantConfig::new(kind);
    variant.lambda = Field::Constant(args.lambda);
    variant.p = args.p;
    variant.g_case = args.g_case.parse::<NeumannData>()?;
    variant.solve.tol = args.tol;
    variant.solve.jacobi = args.jacobi;
    variant.validate(case.intrinsic_dim())?;
    let profile = match &args.kernel_table {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io {
                path: p.clone(),
                source: e,
            })?;
            KernelProfile::from_table_text(&text)?
        }
        None => KernelProfile::cosine(),
    };
    Ok(Model {
        case,
        mode,
        variant,
        profile,
    })
}

fn write(path: PathBuf, body: &str) -> Result<()> {
    std::fs::write(&path, body).map_err(|e| Error::Io { path, source: e })
}

fn mkdir(dir: &PathBuf) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })
}

fn converge(args: ConvergeArgs) -> Result<()> {
    let m = model(&args.model)?;
    let ts: Vec<usize> = parse_list(&args.t, "t")?;
    let cfg = StudyConfig {
        case: m.case,
        ts,
        seeds: args.seeds,
        mode: m.mode,
        variant: m.variant,
        profile: m.profile,
        timing: !args.no_timing,
    };
    let report = convergence_study(&cfg)?;
    let stem = format!("converge_{}_{}_{}", report.case, report.mode, report.variant);
    let paths = emit_report(&report, &args.out, &stem)?;
    println!("slope = {:.4}", report.slope);
    for (d, e) in report.medians() {
        println!("  delta = {d:.4}  median e2 = {e:.4e}");
    }
    println!("wrote {} and {}", paths.csv.display(), paths.svg.display());
    if !report.all_converged() && !args.allow_partial {
        return Err(Error::NonConvergence("some runs did not converge (see #nonconverged in the CSV)".into()));
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<()> {
    let m = model(&args.model)?;
    let cloud = nonlocal_neumann::geometry::sample_case(m.case, args.t, args.seed)?;
    let kernel = ScaledKernel::new(&m.profile, cloud.delta, cloud.intrinsic_dim)?;
    if let Some(path) = &args.export_matrix {
        let system = nonlocal_neumann::assembly::assemble(&cloud, &kernel, m.mode)?;
        system.export_matrix(path)?;
    }
    let sol = solve_variant(&cloud, &kernel, m.mode, &m.variant)?;
    let e2 = e2_from_samples(&sol.result.u, &sol.exact, &cloud.volume_weights)?;
    mkdir(&args.out)?;
    let d = cloud.dim;
    let mut s = String::from("index");
    for a in 0..d {
        let _ = write!(s, ",x{a}");
    }
    s.push_str(",weight,u,exact\n");
    for i in 0..cloud.len() {
        let _ = write!(s, "{i}");
        for v in cloud.point(i) {
            let _ = write!(s, ",{v:?}");
        }
        let _ = writeln!(s, ",{:?},{:?},{:?}", cloud.volume_weights[i], sol.result.u[i], sol.exact[i]);
    }
    write(args.out.join("solution.csv"), &s)?;
    write(args.out.join("cloud.csv"), &write_cloud_csv(&cloud))?;
    let summary = format!(
        "case = {}\nmode = {}\nvariant = {}\nt = {}\nseed = {}\ndelta = {:?}\nn0 = {}\nm0 = {}\ne2 = {:e}\niterations = {}\nresidual = {:e}\nconverged = {}\n",
        m.case,
        m.mode,
        m.variant.kind,
        args.t,
        args.seed,
        cloud.delta,
        cloud.len(),
        cloud.boundary_len(),
        e2,
        sol.result.iterations,
        sol.result.residual,
        sol.result.converged
    );
    write(args.out.join("summary.txt"), &summary)?;
    print!("{summary}");
    if !sol.result.converged {
        return Err(Error::NonConvergence(format!("residual {:.3e}", sol.result.residual)));
    }
    Ok(())
}

fn lemmas(args: LemmaArgs) -> Result<()> {
    let case: ManifoldCase = args.case.parse()?;
    let deltas: Vec<f64> = parse_list(&args.deltas, "delta")?;
    let report = lemma_diagnostics(case, &deltas, &KernelProfile::cosine(), None)?;
    let paths = emit_lemma_report(&report, &args.out)?;
    println!("C_R = {:.10}", report.cr);
    for r in &report.rows {
        println!(
            "  delta = {:.4}  |B - C_R| = {:.3e}  |omega_hat - delta C_R| = {:.3e}",
            r.delta, r.boundary_deviation, r.omega_deviation
        );
    }
    println!(
        "boundary-sum order = {:.3}, omega order = {:.3}",
        report.boundary_order, report.omega_order
    );
    println!("wrote {}", paths.csv.display());
    Ok(())
}

fn run() -> Result<()> {
    let argv = expand_config_args(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match cli.command {
        Command::Converge(a) => converge(a),
        Command::Solve(a) => solve(a),
        Command::Lemmas(a) => lemmas(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

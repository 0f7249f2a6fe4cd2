//! Command-line front end: certificate sweeps, action minimization, orbit
//! extension and table dumps, with machine-readable reports.
//!
//! Exit codes: 0 success, 1 analytic failure (failed certificate, collapsed
//! minimization, endpoint collision), 2 usage error.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fourbody::extension::{
    c1_junction_check, classify_period, extend, newton_residual, write_trajectory_csv,
    ExtensionError, Extender, PeriodClass, ENDPOINT_TOL,
};
use fourbody::geometry::RotationAngle;
use fourbody::minimizer::{minimize, MinimizeError, MinimizeOptions, PathRecord};
use fourbody::testpaths::{all_tables, certificate_sweep, certified_max, table_by_id, Frac, Variant};
use fourbody::{g1, g2};

#[derive(Parser)]
#[command(name = "fourbody", version, about = "Planar equal-mass four-body action minimizers under rotation constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify A_test(theta) < g(theta) over the certified angle range
    Certify(CertifyArgs),
    /// Minimize the action over discrete paths with free structured boundaries
    Minimize(MinimizeArgs),
    /// Extend a minimizer path file to a periodic or quasi-periodic orbit
    Extend(ExtendArgs),
    /// Inspect the embedded node tables
    Tables(TablesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    E1,
    E2,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::E1 => Variant::E1,
            VariantArg::E2 => Variant::E2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_enum)]
    variant: VariantArg,
    /// Grid step as <p>/<q>pi
    #[arg(long, default_value = "1/10000pi")]
    step: String,
    /// Upper end of the sweep as <p>/<q>pi (defaults to the certified max)
    #[arg(long)]
    theta_max: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct MinimizeArgs {
    #[arg(long, value_enum)]
    variant: VariantArg,
    /// Rotation angle as <p>/<q>pi
    #[arg(long)]
    theta: String,
    /// Number of time segments N
    #[arg(long, default_value_t = 40)]
    segments: usize,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-8)]
    gradient_tolerance: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ExtendArgs {
    /// Path JSON produced by `minimize`
    #[arg(long)]
    path: String,
    /// Time window [t0, t1]; defaults to one period (or two blocks when
    /// quasi-periodic)
    #[arg(long, num_args = 2, value_names = ["T0", "T1"])]
    window: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    samples_per_unit: usize,
    /// Treat the angle as irrational with this value in radians
    /// (classification escape hatch)
    #[arg(long)]
    theta_real: Option<f64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct TablesArgs {
    /// List all embedded tables
    #[arg(long)]
    list: bool,
    /// Dump one table's CSV by id (e.g. e1-0539)
    #[arg(long)]
    dump: Option<String>,
    /// With --dump: print the values as published, before repair
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: Option<String>,
}

fn parse_frac_pi(s: &str) -> Result<Frac, String> {
    let body = s
        .strip_suffix("pi")
        .ok_or_else(|| format!("angle `{s}` must end in `pi`, e.g. 1/20pi"))?;
    let (p, q) = body
        .split_once('/')
        .ok_or_else(|| format!("angle `{s}` must be of the form <p>/<q>pi"))?;
    let p: i64 = p.trim().parse().map_err(|e| format!("bad numerator in `{s}`: {e}"))?;
    let q: i64 = q.trim().parse().map_err(|e| format!("bad denominator in `{s}`: {e}"))?;
    if q <= 0 {
        return Err(format!("denominator in `{s}` must be positive"));
    }
    Ok(Frac { p, q })
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn write_out(out: &Option<String>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| format!("writing {path}: {e}")),
        None => {
            print!("{content}");
            std::io::stdout().flush().map_err(|e| e.to_string())
        }
    }
}

fn cmd_certify(args: &CertifyArgs) -> ExitCode {
    let variant: Variant = args.variant.into();
    let step = match parse_frac_pi(&args.step) {
        Ok(f) if f.p > 0 => f,
        Ok(_) => return usage_error("step must be positive"),
        Err(e) => return usage_error(&e),
    };
    let hi = certified_max(variant);
    let range_hi = match &args.theta_max {
        None => None,
        Some(s) => match parse_frac_pi(s) {
            Err(e) => return usage_error(&e),
            Ok(f) => {
                let beyond = (f.p as i128) * (hi.q as i128) > (hi.p as i128) * (f.q as i128);
                if f.p <= 0 || beyond {
                    return usage_error(&format!(
                        "theta-max {}/{}pi outside the certified range (0, {}/{}pi]",
                        f.p, f.q, hi.p, hi.q
                    ));
                }
                Some(f)
            }
        },
    };
    let report = certificate_sweep(variant, step, range_hi);
    let tables: std::collections::BTreeSet<&str> = report
        .records
        .iter()
        .filter_map(|r| r.table.as_deref())
        .collect();
    println!(
        "{variant:?}: {} angles across {} tables, min margin {:.6} at {}/{} pi -> {}",
        report.records.len(),
        tables.len(),
        report.min_margin,
        report.min_margin_theta.p,
        report.min_margin_theta.q,
        if report.overall_pass { "PASS" } else { "FAIL" }
    );
    let content = match args.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Csv => {
            let mut s = String::from("theta_p,theta_q,theta_radians,table,a_test,g,margin\n");
            for r in &report.records {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.theta.p,
                    r.theta.q,
                    r.theta_radians,
                    r.table.as_deref().unwrap_or(""),
                    r.a_test.map(|v| v.to_string()).unwrap_or_default(),
                    r.g.map(|v| v.to_string()).unwrap_or_default(),
                    r.margin
                ));
            }
            s
        }
    };
    if args.out.is_some() {
        if let Err(e) = write_out(&args.out, &content) {
            return usage_error(&e);
        }
    }
    if report.overall_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_minimize(args: &MinimizeArgs) -> ExitCode {
    let variant: Variant = args.variant.into();
    let frac = match parse_frac_pi(&args.theta) {
        Ok(f) => f,
        Err(e) => return usage_error(&e),
    };
    let theta = match RotationAngle::rational(frac.p, frac.q) {
        Ok(t) => t,
        Err(e) => return usage_error(&e.to_string()),
    };
    let opts = MinimizeOptions {
        restarts: args.restarts,
        seed: args.seed,
        max_iterations: args.max_iterations,
        gradient_tolerance: args.gradient_tolerance,
    };
    let res = match minimize(variant, theta, args.segments, &opts) {
        Ok(r) => r,
        Err(MinimizeError::AllRestartsCollapsed) => {
            eprintln!("all restarts terminated at the collision guard");
            return ExitCode::from(1);
        }
        Err(e) => return usage_error(&e.to_string()),
    };
    let g = match variant {
        Variant::E1 => g1(theta.radians()),
        Variant::E2 => g2(theta.radians()),
    };
    println!("action            {:.12}", res.action);
    match g {
        Ok(g) => println!("g(theta)          {:.12}  (margin {:+.6})", g, g - res.action),
        Err(_) => println!("g(theta)          n/a (theta outside (0, pi/10])"),
    }
    println!("min pair distance {:.6}", res.min_pair_distance);
    println!(
        "residuals         start {:.3e}, end {:.3e}",
        res.residuals.start, res.residuals.end
    );
    let record = match res.to_record() {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    let json = serde_json::to_string_pretty(&record).expect("record serializes") + "\n";
    if let Err(e) = write_out(&args.out, &json) {
        return usage_error(&e);
    }
    ExitCode::SUCCESS
}

fn cmd_extend(args: &ExtendArgs) -> ExitCode {
    let raw = match fs::read_to_string(&args.path) {
        Ok(s) => s,
        Err(e) => return usage_error(&format!("reading {}: {e}", args.path)),
    };
    let record: PathRecord = match serde_json::from_str(&raw) {
        Ok(r) => r,
        Err(e) => return usage_error(&format!("parsing {}: {e}", args.path)),
    };
    let var = match record.to_variable() {
        Ok(v) => v,
        Err(e) => return usage_error(&e.to_string()),
    };
    let theta = match args.theta_real {
        Some(rad) => RotationAngle::irrational(rad),
        None => var.theta,
    };
    let base = var.to_polyline();
    let classification = classify_period(record.variant, theta);
    let ext = match Extender::new(base.clone(), record.variant, theta, ENDPOINT_TOL) {
        Ok(e) => e,
        Err(err @ ExtensionError::EndpointCollision { .. }) => {
            eprintln!("{err}");
            return ExitCode::from(1);
        }
        Err(e) => return usage_error(&e.to_string()),
    };
    let (t0, t1) = match &args.window {
        Some(w) => (w[0], w[1]),
        None => match classification {
            PeriodClass::Periodic { period } => (0.0, period),
            PeriodClass::QuasiPeriodic => (0.0, 2.0 * ext.block_len()),
        },
    };
    if !(t1 > t0) {
        return usage_error("window end must exceed window start");
    }
    let traj = match extend(&base, record.variant, theta, t0, t1, args.samples_per_unit) {
        Ok(t) => t,
        Err(err @ ExtensionError::EndpointCollision { .. }) => {
            eprintln!("{err}");
            return ExitCode::from(1);
        }
        Err(e) => return usage_error(&e.to_string()),
    };
    match classification {
        PeriodClass::Periodic { period } => println!("classification    periodic, period {period}"),
        PeriodClass::QuasiPeriodic => println!("classification    quasi-periodic"),
    }
    let n = record.n;
    let h = 1.0 / n as f64;
    let tol = 10.0 / (n as f64 * n as f64);
    let juncs = ext.junctions(t0, t1);
    let c1 = c1_junction_check(&ext, &juncs, h, tol);
    println!(
        "C1 junctions      {} checked, max velocity jump {:.3e} (tol {:.1e}) -> {}",
        c1.jumps.len(),
        c1.max_jump,
        tol,
        if c1.pass { "PASS" } else { "FAIL" }
    );
    let nr = newton_residual(&ext, 0.0, ext.block_len(), (n as f64 * ext.block_len()) as usize + 1);
    println!("Newton residual   max {:.3e}, rms {:.3e} over one block", nr.max, nr.rms);

    let mut csv = Vec::new();
    write_trajectory_csv(&traj, &mut csv).expect("in-memory write");
    if let Err(e) = write_out(&args.out, &String::from_utf8(csv).expect("utf8 csv")) {
        return usage_error(&e);
    }
    ExitCode::SUCCESS
}

fn cmd_tables(args: &TablesArgs) -> ExitCode {
    if let Some(id) = &args.dump {
        let table = match table_by_id(id) {
            Some(t) => t,
            None => return usage_error(&format!("unknown table id `{id}`")),
        };
        let mut content = String::new();
        if args.raw {
            content.push_str(&table.raw_csv());
        } else {
            content.push_str(table.csv);
        }
        if table.repairs.is_empty() {
            content.push_str("# repairs: none\n");
        } else {
            content.push_str("# repairs applied to the published values:\n");
            for r in &table.repairs {
                content.push_str(&format!(
                    "#   t={} {}: {} -> {} ({})\n",
                    r.t, r.column, r.printed, r.repaired, r.rule
                ));
            }
        }
        if let Err(e) = write_out(&args.out, &content) {
            return usage_error(&e);
        }
        return ExitCode::SUCCESS;
    }
    // default to --list
    let _ = args.list;
    let mut lines = String::new();
    for t in all_tables() {
        let (lo, hi) = t.interval;
        lines.push_str(&format!(
            "{}  {:?}  theta0 {:.6}  interval ({}/{} pi, {}/{} pi]  repairs {}\n",
            t.id,
            t.variant,
            t.theta0.radians(),
            lo.p,
            lo.q,
            hi.p,
            hi.q,
            t.repairs.len()
        ));
    }
    if let Err(e) = write_out(&args.out, &lines) {
        return usage_error(&e);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Certify(args) => cmd_certify(&args),
        Command::Minimize(args) => cmd_minimize(&args),
        Command::Extend(args) => cmd_extend(&args),
        Command::Tables(args) => cmd_tables(&args),
    }
}

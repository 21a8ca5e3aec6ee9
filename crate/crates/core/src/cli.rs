//! Command-line front end. Parsing lives here (not in the binary) so the
//! dispatch and output schemas can be tested in-process.

use std::f64::consts::SQRT_2;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bounds::{
    eq3_upper_bound, least_positive_root, minimize_s, sextic, sign_changes, triangle_feasible, SEXTIC_IN_Y,
};
use crate::error::Error;
use crate::format::{csv_field, json_num, num};
use crate::lowdim::{
    boundary_polyline_2d, disk_segment_outline, export_mtl, export_obj, export_obj_with_mtllib, mesh_3d,
    triangle_outline,
};
use crate::verify::{run_all, width_sweep, WIDTH_TOL};
use crate::volume::{exact_volume, mc_volume_radial, mc_volume_with_tol, radius_table, VolumeResult};

/// Environment variable naming a directory that relative `--out` paths are
/// resolved against.
pub const OUT_DIR_ENV: &str = "CONSTWIDTH_OUT_DIR";

pub const RADIUS_TABLE_HEADER: &str = "n,r_exact,r_schramm_lower,r_eq4_upper";
pub const VOLUME_HEADER: &str =
    "n,method,log_volume,volume,effective_radius,log_ci_low,log_ci_high,ci_low,ci_high,samples,seed";
pub const WIDTH_CHECK_HEADER: &str = "n,samples,seed,max_abs_width_dev,passed";
pub const VERIFY_HEADER: &str = "check,status,detail";
pub const BOUNDS_HEADER: &str = "key,value";
pub const PLOT_HEADER: &str = "series,a,b";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quadrature,
    Mc,
    Radial,
    All,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "constwidth", version, about = "Small-volume bodies of constant width 2")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Write to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for every random stream
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Monte Carlo sample count
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub samples: u64,

    /// Additive tolerance on the membership test in rejection sampling
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Exact effective radius with the lower and upper bounds, per dimension
    RadiusTable {
        #[arg(long = "from")]
        n_from: usize,
        #[arg(long = "to")]
        n_to: usize,
        #[arg(long, default_value_t = 1)]
        step: usize,
    },
    /// Volume and effective radius in one dimension
    Volume {
        #[arg(short = 'n', long = "dim")]
        n: usize,
        #[arg(long, value_enum, default_value = "quadrature")]
        method: MethodArg,
    },
    /// Maximum deviation of the width from 2 over random directions
    WidthCheck {
        #[arg(short = 'n', long = "dim")]
        n: usize,
    },
    /// Triangle bounds, the optimal triangle and the sextic root
    Bounds {
        /// Solve for the optimal triangle size s
        #[arg(long)]
        solve_s: bool,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Dimension for the effective-radius bound of the given triangle
        #[arg(short = 'n', long = "dim")]
        n: Option<usize>,
    },
    /// Run every self-check; exits 1 on any failure
    Verify,
    /// Triangle mesh of the 3D body as Wavefront OBJ
    Mesh {
        #[arg(long, default_value_t = 5)]
        level: u32,
        /// Group faces by octant with one material per group
        #[arg(long)]
        colorize: bool,
    },
    /// Closed boundary polyline of the planar body
    Boundary2d {
        #[arg(long, default_value_t = 256)]
        points_per_arc: usize,
    },
    /// Point lists outlining the disk segment A and triangles T(alpha, beta)
    PlotData {
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        /// Defaults to 0.7·√2
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 128)]
        points: usize,
    },
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    CheckFailed = 1,
    Usage = 2,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CheckFailed(_) | Error::QuadratureBudget { .. } | Error::ZeroHits(_) => {
                Failure::Check(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = std::result::Result<Status, Failure>;

/// Resolves `--out` against [`OUT_DIR_ENV`] when the path is relative.
pub fn resolve_out(out: &Path, env_dir: Option<&Path>) -> PathBuf {
    match env_dir {
        Some(dir) if out.is_relative() => dir.join(out),
        _ => out.to_path_buf(),
    }
}

/// Runs one command, writing the report to `--out` or `stdout` and
/// diagnostics to `stderr`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Status {
    let env_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let result = match &config.out {
        Some(path) => {
            let path = resolve_out(path, env_dir.as_deref());
            match File::create(&path) {
                Ok(f) => {
                    let mut w = BufWriter::new(f);
                    let r = dispatch(config, &mut w, stderr, Some(&path));
                    r.and_then(|s| w.flush().map(|_| s).map_err(Failure::Io))
                }
                Err(e) => Err(Failure::Io(e)),
            }
        }
        None => dispatch(config, stdout, stderr, None),
    };
    match result {
        Ok(s) => s,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            Status::Usage
        }
        Err(Failure::Check(msg)) => {
            let _ = writeln!(stderr, "check failed: {msg}");
            Status::CheckFailed
        }
        // reader went away (e.g. `| head`); nothing left to report
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => Status::Success,
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "i/o error: {e}");
            Status::CheckFailed
        }
    }
}

fn dispatch(cfg: &RunConfig, w: &mut dyn Write, err: &mut dyn Write, out_path: Option<&Path>) -> CmdResult {
    match &cfg.command {
        Command::RadiusTable { n_from, n_to, step } => radius_table_cmd(cfg, w, err, *n_from, *n_to, *step),
        Command::Volume { n, method } => volume_cmd(cfg, w, *n, *method),
        Command::WidthCheck { n } => width_check_cmd(cfg, w, *n),
        Command::Bounds {
            solve_s,
            alpha,
            beta,
            n,
        } => bounds_cmd(cfg, w, *solve_s, *alpha, *beta, *n),
        Command::Verify => verify_cmd(cfg, w),
        Command::Mesh { level, colorize } => mesh_cmd(w, *level, *colorize, out_path),
        Command::Boundary2d { points_per_arc } => boundary_cmd(cfg, w, *points_per_arc),
        Command::PlotData { alpha, beta, points } => plot_cmd(cfg, w, *alpha, beta.unwrap_or(0.7 * SQRT_2), *points),
    }
}

fn write_json(w: &mut dyn Write, v: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    writeln!(w)
}

fn radius_table_cmd(
    cfg: &RunConfig,
    w: &mut dyn Write,
    err: &mut dyn Write,
    from: usize,
    to: usize,
    step: usize,
) -> CmdResult {
    let table = radius_table(from, to, step)?;
    match cfg.format {
        Format::Csv => {
            writeln!(w, "{RADIUS_TABLE_HEADER}")?;
            for r in &table.rows {
                writeln!(
                    w,
                    "{},{},{},{}",
                    r.n,
                    num(r.r_exact),
                    num(r.r_lower_schramm),
                    num(r.r_upper_eq4)
                )?;
            }
            match table.threshold_n {
                Some(t) => writeln!(err, "first computed n with r_n < 0.9: {t}")?,
                None => writeln!(err, "no computed n with r_n < 0.9")?,
            }
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "r_exact": json_num(r.r_exact),
                        "r_schramm_lower": json_num(r.r_lower_schramm),
                        "r_eq4_upper": json_num(r.r_upper_eq4),
                        "log_volume": json_num(r.log_volume),
                    })
                })
                .collect();
            write_json(w, &json!({ "rows": rows, "threshold_n": table.threshold_n }))?;
        }
    }
    Ok(Status::Success)
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn volume_json(v: &VolumeResult) -> Value {
    let opt = |x: Option<f64>| x.map(json_num).unwrap_or(Value::Null);
    json!({
        "n": v.n,
        "method": v.method.as_str(),
        "log_volume": json_num(v.log_volume),
        "volume": json_num(v.volume()),
        "effective_radius": json_num(v.effective_radius),
        "log_ci_low": opt(v.log_ci_low),
        "log_ci_high": opt(v.log_ci_high),
        "ci_low": opt(v.ci_low),
        "ci_high": opt(v.ci_high),
        "samples": v.samples,
        "seed": v.seed,
    })
}

fn volume_cmd(cfg: &RunConfig, w: &mut dyn Write, n: usize, method: MethodArg) -> CmdResult {
    let mut results = Vec::new();
    if matches!(method, MethodArg::Quadrature | MethodArg::All) {
        results.push(exact_volume(n)?);
    }
    if matches!(method, MethodArg::Mc | MethodArg::All) {
        results.push(mc_volume_with_tol(n, cfg.samples, cfg.seed, cfg.tol)?);
    }
    if matches!(method, MethodArg::Radial | MethodArg::All) {
        results.push(mc_volume_radial(n, cfg.samples, cfg.seed)?);
    }
    match cfg.format {
        Format::Csv => {
            writeln!(w, "{VOLUME_HEADER}")?;
            for v in &results {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    v.n,
                    v.method.as_str(),
                    num(v.log_volume),
                    num(v.volume()),
                    num(v.effective_radius),
                    opt_num(v.log_ci_low),
                    opt_num(v.log_ci_high),
                    opt_num(v.ci_low),
                    opt_num(v.ci_high),
                    v.samples.map(|s| s.to_string()).unwrap_or_default(),
                    v.seed.map(|s| s.to_string()).unwrap_or_default(),
                )?;
            }
        }
        Format::Json => write_json(w, &Value::Array(results.iter().map(volume_json).collect()))?,
    }
    Ok(Status::Success)
}

fn width_check_cmd(cfg: &RunConfig, w: &mut dyn Write, n: usize) -> CmdResult {
    let dev = width_sweep(n, cfg.samples, cfg.seed)?;
    let passed = dev < WIDTH_TOL;
    match cfg.format {
        Format::Csv => {
            writeln!(w, "{WIDTH_CHECK_HEADER}")?;
            writeln!(w, "{},{},{},{},{}", n, cfg.samples, cfg.seed, num(dev), passed)?;
        }
        Format::Json => write_json(
            w,
            &json!({
                "n": n,
                "samples": cfg.samples,
                "seed": cfg.seed,
                "max_abs_width_dev": json_num(dev),
                "passed": passed,
            }),
        )?,
    }
    Ok(if passed { Status::Success } else { Status::CheckFailed })
}

fn bounds_cmd(
    cfg: &RunConfig,
    w: &mut dyn Write,
    solve_s: bool,
    alpha: Option<f64>,
    beta: Option<f64>,
    n: Option<usize>,
) -> CmdResult {
    let mut obj = Map::new();
    obj.insert("p_at_0".into(), json_num(sextic(0.0)));
    obj.insert("p_at_1".into(), json_num(sextic(1.0)));
    obj.insert("descartes_sign_changes".into(), json!(sign_changes(&SEXTIC_IN_Y)));

    let hand = triangle_feasible(1.5, 0.7 * SQRT_2)?;
    obj.insert(
        "hand_check".into(),
        json!({
            "alpha": json_num(hand.alpha),
            "beta": json_num(hand.beta),
            "alpha2_plus_beta2": json_num(hand.s_candidate * hand.s_candidate),
            "feasible": hand.feasible,
        }),
    );

    if solve_s {
        let o = minimize_s()?;
        obj.insert("x_star".into(), json_num(o.x_star));
        obj.insert("s".into(), json_num(o.s));
        obj.insert("s_numeric".into(), json_num(o.s_numeric));
        obj.insert("alpha_star".into(), json_num(o.alpha_star));
        obj.insert("beta_star".into(), json_num(o.beta_star));
        obj.insert("residual".into(), json_num(o.residual));
        obj.insert("constraint_residual".into(), json_num(o.constraint_residual));
        obj.insert("s_less_than_1.8".into(), json!(o.s < 1.8));
    } else {
        obj.insert("x_star".into(), json_num(least_positive_root()));
    }

    match (alpha, beta) {
        (Some(a), Some(b)) => {
            let t = triangle_feasible(a, b)?;
            let mut tri = json!({
                "alpha": json_num(a),
                "beta": json_num(b),
                "s_candidate": json_num(t.s_candidate),
                "feasible": t.feasible,
            });
            if let Some(n) = n {
                tri["n"] = json!(n);
                tri["r_upper_eq3"] = match eq3_upper_bound(n, a, b) {
                    Ok(v) => json_num(v),
                    Err(_) => Value::Null,
                };
            }
            obj.insert("triangle".into(), tri);
        }
        (None, None) => {}
        _ => return Err(Failure::Usage("--alpha and --beta must be given together".into())),
    }

    let value = Value::Object(obj);
    match cfg.format {
        Format::Json => write_json(w, &value)?,
        Format::Csv => {
            writeln!(w, "{BOUNDS_HEADER}")?;
            write_flat(w, "", &value)?;
        }
    }
    Ok(Status::Success)
}

fn write_flat(w: &mut dyn Write, prefix: &str, v: &Value) -> io::Result<()> {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                write_flat(w, &key, v)?;
            }
            Ok(())
        }
        other => writeln!(w, "{},{}", csv_field(prefix), csv_field(&other.to_string())),
    }
}

fn verify_cmd(cfg: &RunConfig, w: &mut dyn Write) -> CmdResult {
    let outcomes = run_all(cfg.samples, cfg.seed);
    let passed = outcomes.iter().all(|o| o.passed);
    match cfg.format {
        Format::Csv => {
            writeln!(w, "{VERIFY_HEADER}")?;
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                writeln!(w, "{},{},{}", o.check, status, csv_field(&o.detail))?;
            }
        }
        Format::Json => write_json(w, &json!({ "passed": passed, "checks": outcomes }))?,
    }
    Ok(if passed { Status::Success } else { Status::CheckFailed })
}

fn mesh_cmd(w: &mut dyn Write, level: u32, colorize: bool, out_path: Option<&Path>) -> CmdResult {
    let mesh = mesh_3d(level)?;
    match out_path {
        Some(path) if colorize => {
            let mtl_path = path.with_extension("mtl");
            let lib = mtl_path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default();
            export_obj_with_mtllib(&mesh, &lib, &mut *w)?;
            let mut mtl = BufWriter::new(File::create(&mtl_path)?);
            export_mtl(&mut mtl)?;
            mtl.flush()?;
        }
        _ => export_obj(&mesh, colorize, &mut *w)?,
    }
    Ok(Status::Success)
}

fn boundary_cmd(cfg: &RunConfig, w: &mut dyn Write, points_per_arc: usize) -> CmdResult {
    let poly = boundary_polyline_2d(points_per_arc)?;
    match cfg.format {
        Format::Csv => poly.write_csv(&mut *w)?,
        Format::Json => write_json(w, &poly.to_json())?,
    }
    Ok(Status::Success)
}

fn plot_cmd(cfg: &RunConfig, w: &mut dyn Write, alpha: f64, beta: f64, points: usize) -> CmdResult {
    triangle_feasible(alpha, beta)?;
    let opt = minimize_s()?;
    let series = [
        ("disk_segment", disk_segment_outline(points)),
        ("triangle", triangle_outline(alpha, beta)),
        ("triangle_optimal", triangle_outline(opt.alpha_star, opt.beta_star)),
    ];
    match cfg.format {
        Format::Csv => {
            writeln!(w, "{PLOT_HEADER}")?;
            for (name, pts) in &series {
                for p in pts {
                    writeln!(w, "{name},{},{}", num(p[0]), num(p[1]))?;
                }
            }
        }
        Format::Json => {
            let mut m = Map::new();
            for (name, pts) in &series {
                let arr = pts.iter().map(|p| json!([json_num(p[0]), json_num(p[1])])).collect();
                m.insert((*name).into(), Value::Array(arr));
            }
            write_json(w, &Value::Object(m))?;
        }
    }
    Ok(Status::Success)
}

//! Command-line front end.
//!
//! Each subcommand writes one or more CSV tables plus a JSON summary
//! `<command>_summary.json` into the output directory, which defaults to
//! `$SLOWDIV_OUT_DIR` or the current directory. Exit status is 0 on success,
//! 2 for invalid input and 3 for numerical failures.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::canard::{self, CanardSetup, CyclicityInput, FitRange};
use crate::error::{Error, Result};
use crate::fractal::{self, Multiplicity, SequenceOptions};
use crate::models::{self, ModelFile};
use crate::output::{num, read_column, write_csv, RunSummary};
use crate::pws::{self, classify_boundary_point, PwsSystem, SlidingSegment};
use crate::regularization::{make_tanh_regularizer, Regularizer};
use crate::sdi;
use crate::simulator::{self, CycleOptions, SimOptions};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SLOWDIV_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "slowdiv", version, about = "Slow divergence integrals for regularized piecewise-smooth systems")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Common {
    /// Model file in the pws-model/1 JSON format.
    #[arg(long, global = true, conflicts_with = "builtin")]
    model: Option<PathBuf>,
    /// Built-in model: canonical, tuned-simple, tuned-double or simulation.
    #[arg(long, global = true)]
    builtin: Option<String>,
    /// Regularizer name (tanh or arctan); defaults to the model's.
    #[arg(long, global = true)]
    reg: Option<String>,
    /// Output directory [default: $SLOWDIV_OUT_DIR or .]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify points of the switching line.
    Classify(ClassifyArgs),
    /// Slow divergence integral along a segment of y = 0.
    Sdi(SdiArgs),
    /// Tabulate I(s) and the slow relation function G(s).
    SlowRelation(SlowRelationArgs),
    /// Entry-exit orbit of the slow relation function.
    Orbit(OrbitArgs),
    /// Minkowski dimension of a sequence stored in a CSV column.
    Dimension(DimensionArgs),
    /// Return map and limit cycles of the regularized system.
    Simulate(SimulateArgs),
    /// Sweep the breaking parameter and locate the saddle-node of cycles.
    Sweep(SweepArgs),
    /// Assumption checks, multiplicity and cyclicity prediction.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
struct ClassifyArgs {
    /// Explicit points `x,y` (repeatable).
    #[arg(long = "point", value_parser = parse_point)]
    points: Vec<[f64; 2]>,
    /// Start of a sample range along y = 0.
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long, default_value_t = 21)]
    n: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SdiArgs {
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    #[arg(long, default_value_t = sdi::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SlowRelationArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    s_min: f64,
    /// Upper end of the table [default: sBar]
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long, default_value_t = 21)]
    n: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
struct OrbitArgs {
    #[arg(long)]
    s0: f64,
    #[arg(long, default_value_t = canard::DEFAULT_FLOOR)]
    floor: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
struct DimensionArgs {
    /// CSV file holding the sequence.
    #[arg(long)]
    sequence: PathBuf,
    /// Column name [default: the last column]
    #[arg(long)]
    column: Option<String>,
    #[arg(long, default_value_t = 16)]
    min_points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SimGrid {
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Section grid start [default: -0.8 sBar]
    #[arg(long, allow_hyphen_values = true)]
    s_from: Option<f64>,
    /// Section grid end [default: 0.8 sBar]
    #[arg(long, allow_hyphen_values = true)]
    s_to: Option<f64>,
    #[arg(long, default_value_t = 17)]
    s_n: usize,
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    grid: SimGrid,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda_tilde: f64,
    /// Also write the trajectory starting at this section parameter.
    #[arg(long, allow_hyphen_values = true)]
    trajectory_s: Option<f64>,
    #[arg(long, default_value_t = 5.0)]
    t_max: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SweepArgs {
    #[command(flatten)]
    grid: SimGrid,
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    #[arg(long, default_value_t = 11)]
    n: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ReportArgs {
    #[arg(long, default_value_t = 1e-4)]
    fit_lo: f64,
    #[arg(long, default_value_t = 1e-2)]
    fit_hi: f64,
    #[arg(long, default_value_t = 50)]
    fit_n: usize,
}

fn parse_point(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected x,y but got {s:?}"));
    }
    let x = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let y = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok([x, y])
}

/// Parses `argv` (including the program name), runs the command and
/// returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(summary) => {
            println!("{}", summary.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Maps an error to the exit status contract.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

struct Loaded {
    system: PwsSystem,
    reg: Regularizer,
    file: Option<ModelFile>,
    name: String,
}

fn load(common: &Common) -> Result<Loaded> {
    let (system, file, name, default_reg) = match (&common.model, &common.builtin) {
        (Some(path), _) => {
            let f = ModelFile::load(path)?;
            let reg = f.to_regularizer()?;
            (f.to_system()?, Some(f.clone()), f.name.clone(), reg)
        }
        (None, b) => {
            let name = b.clone().unwrap_or_else(|| "canonical".into());
            let sys = match name.as_str() {
                "canonical" => models::canonical_vi3(),
                "tuned-simple" => models::default_tuned_simple()?.system,
                "tuned-double" => models::default_tuned_double()?.system,
                "simulation" => models::simulation_tuned_simple()?.system,
                other => return Err(Error::InvalidInput(format!("unknown built-in model {other:?}"))),
            };
            (sys, None, name, make_tanh_regularizer())
        }
    };
    let reg = match &common.reg {
        Some(r) => models::regularizer_by_name(r, None).map_err(|e| Error::InvalidInput(e.to_string()))?,
        None => default_reg,
    };
    Ok(Loaded {
        system,
        reg,
        file,
        name,
    })
}

fn canard_setup(common: &Common, loaded: &Loaded) -> Result<CanardSetup> {
    let reg = loaded.reg.clone();
    if let Some(f) = &loaded.file {
        let s = CanardSetup::from_model_file(f)?;
        return Ok(CanardSetup { reg, ..s });
    }
    match common.builtin.as_deref().unwrap_or("canonical") {
        "canonical" => CanardSetup::canonical(reg, 0.5),
        "tuned-simple" => CanardSetup::from_tuned(&models::default_tuned_simple()?, reg),
        "tuned-double" => CanardSetup::from_tuned(&models::default_tuned_double()?, reg),
        "simulation" => CanardSetup::from_tuned(&models::simulation_tuned_simple()?, reg),
        other => Err(Error::InvalidInput(format!("unknown built-in model {other:?}"))),
    }
}

fn out_dir(common: &Common) -> PathBuf {
    common
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Serialize)]
struct Inputs<'a, A: Serialize> {
    model: Option<&'a Path>,
    model_name: &'a str,
    regularizer: &'a str,
    out_dir: &'a Path,
    args: &'a A,
}

fn dispatch(cli: &Cli) -> Result<PathBuf> {
    let loaded = load(&cli.common)?;
    let dir = out_dir(&cli.common);
    macro_rules! summary {
        ($name:expr, $args:expr) => {
            RunSummary::new(
                $name,
                &Inputs {
                    model: cli.common.model.as_deref(),
                    model_name: &loaded.name,
                    regularizer: loaded.reg.name(),
                    out_dir: &dir,
                    args: $args,
                },
            )
        };
    }
    match &cli.command {
        Command::Classify(a) => {
            let mut s = summary!("classify", a);
            classify(&loaded, a, &dir, &mut s)?;
            s.write(&dir)
        }
        Command::Sdi(a) => {
            let mut s = summary!("sdi", a);
            run_sdi(&loaded, a, &dir, &mut s)?;
            s.write(&dir)
        }
        Command::SlowRelation(a) => {
            let mut s = summary!("slow-relation", a);
            slow_relation(&canard_setup(&cli.common, &loaded)?, a, &dir, &mut s)?;
            s.write(&dir)
        }
        Command::Orbit(a) => {
            let mut s = summary!("orbit", a);
            orbit(&canard_setup(&cli.common, &loaded)?, a, &dir, &mut s)?;
            s.write(&dir)
        }
        Command::Dimension(a) => {
            let mut s = summary!("dimension", a);
            dimension(a, &dir, &mut s)?;
            s.write(&dir)
        }
        Command::Simulate(a) => {
            let mut s = summary!("simulate", a);
            simulate(&canard_setup(&cli.common, &loaded)?, a, &dir, &mut s)?;
            s.write(&dir)
        }
        Command::Sweep(a) => {
            let mut s = summary!("sweep", a);
            sweep(&canard_setup(&cli.common, &loaded)?, a, &dir, &mut s)?;
            s.write(&dir)
        }
        Command::Report(a) => {
            let mut s = summary!("report", a);
            report(&canard_setup(&cli.common, &loaded)?, a, &dir, &mut s)?;
            s.write(&dir)
        }
    }
}

fn label<T: std::fmt::Debug>(v: Option<T>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_else(|| "-".into())
}

fn classify(l: &Loaded, a: &ClassifyArgs, dir: &Path, s: &mut RunSummary) -> Result<()> {
    let mut points = a.points.clone();
    match (a.from, a.to) {
        (Some(f), Some(t)) => {
            if !(f < t) || a.n < 2 {
                return Err(Error::InvalidInput("classify needs --from < --to and --n ≥ 2".into()));
            }
            points.extend((0..a.n).map(|i| [f + (t - f) * i as f64 / (a.n - 1) as f64, 0.0]));
        }
        (None, None) => {}
        _ => return Err(Error::InvalidInput("--from and --to must be given together".into())),
    }
    if points.is_empty() {
        return Err(Error::InvalidInput("no points to classify".into()));
    }
    let mut rows = Vec::new();
    for p in &points {
        let c = classify_boundary_point(&l.system, *p)?;
        let two_fold = match c.tangency {
            Some(d) if d.side == pws::TangencySide::Both && l.system.is_normal_form() => {
                pws::classify_two_fold(&l.system, *p).ok()
            }
            _ => None,
        };
        let t = c.tangency;
        rows.push(vec![
            num(p[0]),
            num(p[1]),
            format!("{:?}", c.tag),
            label(t.map(|d| d.side)),
            label(t.and_then(|d| d.plus)),
            label(t.and_then(|d| d.minus)),
            label(two_fold),
        ]);
    }
    let path = dir.join("classify.csv");
    write_csv(
        &path,
        &["x[len]", "y[len]", "class[-]", "tangent[-]", "visibility_plus[-]", "visibility_minus[-]", "two_fold[-]"],
        rows,
    )?;
    s.output(&path);
    s.result("points", points.len());
    Ok(())
}

fn run_sdi(l: &Loaded, a: &SdiArgs, dir: &Path, s: &mut RunSummary) -> Result<()> {
    if !(a.from < a.to) {
        return Err(Error::InvalidInput(format!(
            "--from {} must be smaller than --to {}",
            a.from, a.to
        )));
    }
    if !(a.tol > 0.0) {
        return Err(Error::InvalidInput("--tol must be positive".into()));
    }
    let sys = &l.system;
    let origin_two_fold = sys.is_normal_form()
        && classify_boundary_point(sys, [0.0, 0.0])
            .map(|c| c.tangency.map(|d| d.side) == Some(pws::TangencySide::Both))
            .unwrap_or(false);
    let origin_tangent = sys.is_normal_form()
        && classify_boundary_point(sys, [0.0, 0.0])
            .map(|c| c.tangency.is_some())
            .unwrap_or(false);
    let (kind, r) = if a.from < 0.0 && a.to > 0.0 && origin_two_fold {
        ("splitSum", sdi::sdi_split_sum(sys, &l.reg, a.from, a.to, a.tol)?)
    } else if (a.from == 0.0 || a.to == 0.0) && origin_tangent {
        let x1 = if a.from == 0.0 { a.to } else { a.from };
        if origin_two_fold {
            ("twoFold", sdi::sdi_to_two_fold(sys, &l.reg, x1, a.tol)?)
        } else {
            ("tangency", sdi::sdi_to_tangency(sys, &l.reg, x1, a.tol)?)
        }
    } else {
        let seg = SlidingSegment::on_axis(a.from, a.to);
        ("regular", sdi::sdi_regular_segment(sys, &l.reg, &seg, a.tol)?)
    };
    let path = dir.join("sdi.csv");
    write_csv(
        &path,
        &["from[len]", "to[len]", "kind[-]", "value[1]", "abs_error[1]", "subdivisions[1]", "converged[-]"],
        [vec![
            num(a.from),
            num(a.to),
            kind.to_string(),
            num(r.value),
            num(r.abs_error_estimate),
            r.subdivisions.to_string(),
            r.converged.to_string(),
        ]],
    )?;
    s.output(&path);
    s.result("kind", kind);
    s.result("sdi", r);
    Ok(())
}

fn slow_relation(setup: &CanardSetup, a: &SlowRelationArgs, dir: &Path, s: &mut RunSummary) -> Result<()> {
    let hi = a.s_max.unwrap_or(setup.s_bar);
    if !(a.s_min < hi) || a.n < 2 || !(a.tol > 0.0) {
        return Err(Error::InvalidInput("need --s-min < --s-max, --n ≥ 2 and --tol > 0".into()));
    }
    let mut rows = Vec::new();
    for i in 0..a.n {
        let x = a.s_min + (hi - a.s_min) * i as f64 / (a.n - 1) as f64;
        let (m, p) = canard::connection_endpoints(setup, x)?;
        let i_s = canard::sdi_i(setup, x)?;
        let g = canard::slow_relation_g(setup, x, a.tol)?;
        let res = canard::slow_relation_residual(setup, x, g)?;
        rows.push(vec![num(x), num(m), num(p), num(i_s), num(g), num(res)]);
    }
    let path = dir.join("slow_relation.csv");
    write_csv(
        &path,
        &["s[len]", "psi_minus[len]", "psi_plus[len]", "I[1]", "G[len]", "residual[1]"],
        rows,
    )?;
    s.output(&path);
    s.result("sBar", setup.s_bar);
    Ok(())
}

fn orbit(setup: &CanardSetup, a: &OrbitArgs, dir: &Path, s: &mut RunSummary) -> Result<()> {
    if !(a.floor > 0.0) || a.max_iter == 0 {
        return Err(Error::InvalidInput("--floor must be positive and --max-iter nonzero".into()));
    }
    let o = canard::generate_orbit(setup, a.s0, a.floor, a.max_iter)?;
    let path = dir.join("orbit.csv");
    write_csv(
        &path,
        &["n[1]", "s[len]"],
        o.terms.iter().enumerate().map(|(n, v)| vec![n.to_string(), num(*v)]),
    )?;
    s.output(&path);
    s.result("direction", o.direction);
    s.result("stopReason", o.stop_reason);
    s.result("terms", o.terms.len());
    s.result("failure", &o.failure);
    let positive: Vec<f64> = o.terms.iter().cloned().filter(|v| *v > 0.0).collect();
    if let Ok(d) = fractal::dim_sequence(&positive) {
        s.result("dimension", d.value);
    }
    Ok(())
}

fn dimension(a: &DimensionArgs, dir: &Path, s: &mut RunSummary) -> Result<()> {
    let seq = read_column(&a.sequence, a.column.as_deref())?;
    let positive: Vec<f64> = seq.into_iter().filter(|v| *v > 0.0).collect();
    let est = fractal::dim_sequence_with(
        &positive,
        SequenceOptions {
            min_points: a.min_points,
            ..SequenceOptions::default()
        },
    )?;
    let path = dir.join("dimension_fit.csv");
    write_csv(
        &path,
        &["delta[len]", "measure[len]"],
        est.samples.iter().map(|(d, m)| vec![num(*d), num(*m)]),
    )?;
    s.output(&path);
    let m = fractal::multiplicity_from_dim(est.value.min(0.999_999))?;
    s.result("d", est.value);
    s.result("estimate", &est);
    s.result("multiplicity", &m);
    if let Ok(p) = canard::predict_cyclicity(CyclicityInput::Dimension(est.value)) {
        s.result("cyclicity", p);
    }
    Ok(())
}

fn sim_grid(setup: &CanardSetup, g: &SimGrid) -> Result<(Vec<f64>, SimOptions)> {
    let a = g.s_from.unwrap_or(-0.8 * setup.s_bar);
    let b = g.s_to.unwrap_or(0.8 * setup.s_bar);
    if !(a < b) || g.s_n < 3 || !(g.rtol > 0.0) {
        return Err(Error::InvalidInput("need --s-from < --s-to, --s-n ≥ 3 and --rtol > 0".into()));
    }
    if !(g.eps > 0.0 && g.eps <= 0.2) {
        return Err(Error::InvalidInput(format!("--eps {} must lie in (0, 0.2]", g.eps)));
    }
    let opts = SimOptions {
        rtol: g.rtol,
        ..SimOptions::default()
    };
    Ok((simulator::uniform_grid(a, b, g.s_n), opts))
}

fn simulate(setup: &CanardSetup, a: &SimulateArgs, dir: &Path, s: &mut RunSummary) -> Result<()> {
    let (grid, opts) = sim_grid(setup, &a.grid)?;
    let eps = a.grid.eps;
    let p = simulator::return_map_grid(setup, eps, a.lambda_tilde, &grid, &opts);
    let path = dir.join("return_map.csv");
    write_csv(
        &path,
        &["s[len]", "P[len]", "displacement[len]"],
        grid.iter().zip(&p).map(|(x, r)| {
            let v = r.as_ref().map(|v| *v).unwrap_or(f64::NAN);
            vec![num(*x), num(v), num(v - x)]
        }),
    )?;
    s.output(&path);
    s.result("failedPoints", p.iter().filter(|r| r.is_err()).count());
    let cycles = simulator::find_limit_cycles(setup, eps, a.lambda_tilde, &grid, &opts, &CycleOptions::default())?;
    s.result("cycles", &cycles);
    if let Some(z) = a.trajectory_s {
        let tr = simulator::flow_regularized(setup, eps, a.lambda_tilde, setup.section_point(z), a.t_max, &opts)?;
        let path = dir.join("trajectory.csv");
        write_csv(
            &path,
            &["t[time]", "x[len]", "y[len]"],
            tr.times.iter().zip(&tr.points).map(|(t, p)| vec![num(*t), num(p[0]), num(p[1])]),
        )?;
        s.output(&path);
        s.result("trajectoryStats", tr.stats);
        s.result("sectionEvents", &tr.events);
    }
    Ok(())
}

fn sweep(setup: &CanardSetup, a: &SweepArgs, dir: &Path, s: &mut RunSummary) -> Result<()> {
    let (grid, opts) = sim_grid(setup, &a.grid)?;
    if !(a.from < a.to) || a.n < 2 {
        return Err(Error::InvalidInput("need --from < --to and --n ≥ 2".into()));
    }
    let eps = a.grid.eps;
    let cy = CycleOptions::default();
    let lts = simulator::uniform_grid(a.from, a.to, a.n);
    let mut count_rows = Vec::new();
    let mut cycle_rows = Vec::new();
    let mut counts = Vec::new();
    for &lt in &lts {
        let c = simulator::fixed_point_count(setup, eps, lt, &grid, &opts);
        let cycles = simulator::find_limit_cycles(setup, eps, lt, &grid, &opts, &cy)?;
        counts.push(c);
        count_rows.push(vec![num(lt), c.to_string(), cycles.len().to_string()]);
        for (k, r) in cycles.iter().enumerate() {
            cycle_rows.push(vec![
                num(lt),
                k.to_string(),
                num(r.s_star),
                num(r.multiplier),
                format!("{:?}", r.classification),
            ]);
        }
    }
    let p1 = dir.join("sweep_counts.csv");
    write_csv(&p1, &["lambda_tilde[1]", "sign_changes[1]", "cycles[1]"], count_rows)?;
    let p2 = dir.join("sweep_cycles.csv");
    write_csv(
        &p2,
        &["lambda_tilde[1]", "index[1]", "s_star[len]", "multiplier[1]", "class[-]"],
        cycle_rows,
    )?;
    s.output(&p1);
    s.output(&p2);
    s.result("maxCount", counts.iter().max());
    let pair = (0..counts.len() - 1).find(|&i| counts[i].min(counts[i + 1]) == 0 && counts[i].max(counts[i + 1]) >= 2);
    if let Some(i) = pair {
        let sn = simulator::saddle_node_sweep(setup, eps, (lts[i], lts[i + 1]), &grid, &opts, &cy)?;
        s.result("saddleNode", sn);
    }
    Ok(())
}

fn report(setup: &CanardSetup, a: &ReportArgs, dir: &Path, s: &mut RunSummary) -> Result<()> {
    let checks = canard::check_assumptions(setup);
    s.result("assumptions", &checks);
    s.result("allPassed", checks.all_passed());
    let i0 = canard::sdi_i(setup, 0.0)?;
    s.result("I0", i0);
    let range = FitRange {
        lo: a.fit_lo,
        hi: a.fit_hi.min(setup.s_bar),
        n: a.fit_n,
    };
    if i0.abs() > 1e-9 {
        s.result("cyclicity", canard::predict_cyclicity(CyclicityInput::Unbalanced { i0 })?);
        return Ok(());
    }
    let m = canard::multiplicity_of_i(setup, range)?;
    let path = dir.join("report_I.csv");
    write_csv(
        &path,
        &["s[len]", "I[1]"],
        m.samples.iter().map(|(x, v)| vec![num(*x), num(*v)]),
    )?;
    s.output(&path);
    s.result("multiplicity", &m);
    match m.multiplicity {
        Some(Multiplicity::Finite(k)) => {
            s.result(
                "cyclicity",
                canard::predict_cyclicity(CyclicityInput::Multiplicity(Multiplicity::Finite(k)))?,
            );
        }
        Some(Multiplicity::Infinite) => s.result("cyclicity", "no finite bound (I vanishes identically)"),
        None => s.result("cyclicity", "indeterminate multiplicity"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_parser() {
        assert_eq!(parse_point("0.5,-1").unwrap(), [0.5, -1.0]);
        assert!(parse_point("1").is_err());
        assert!(parse_point("a,b").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidInput("x".into())), 2);
        assert_eq!(exit_code(&Error::NoReturn { t_max: 1.0 }), 3);
        assert_eq!(run(["slowdiv", "bogus"]), 2);
        assert_eq!(run(["slowdiv", "sdi", "--from", "0.3", "--to", "0.1"]), 2);
    }
}

//! `mcflab`: command-line front end for the flow laboratory.
//!
//! Exit codes: 0 success, 1 a check ran and failed, 2 usage or input error,
//! 3 numerical abort.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mcf_lab::analysis::{
    density_monotonicity, fit_grim_reaper, jacobi_lambda1, CheckRegistry, FitInit, REAPER_REJECTION,
};
use mcf_lab::construction::{build_ancient_family, run_eternal, ConstructionConfig};
use mcf_lab::geometry::{
    profile_half_width, CatenoidSpec, CurveMode, Probe, ProfileCurve, Truncation,
};
use mcf_lab::integrator::{run_flow, FlowTrajectory, StopCriteria};
use mcf_lab::interface::{
    load_trajectory, save_trajectory, splice, trajectory_svg, Overlay, RunManifest, SvgOptions,
};
use mcf_lab::{Error, Result};

const WORKERS_ENV: &str = "MCF_WORKERS";

#[derive(Parser)]
#[command(
    name = "mcflab",
    version,
    about = "Rotationally symmetric mean curvature flow out of catenoids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the catenoid profile.
    Catenoid(CatenoidArgs),
    /// Evolve a normal offset of the catenoid.
    Flow(FlowArgs),
    /// Build the ancient family by escape-time bisection.
    Construct(ConstructArgs),
    /// Long forward run of a perturbed catenoid with reaper fits.
    Eternal(EternalArgs),
    /// Run a named check on a stored trajectory.
    Analyze(AnalyzeArgs),
    /// Gaussian density ratios along a stored trajectory.
    Density(DensityArgs),
    /// Principal Jacobi eigenvalue on an arclength window of the catenoid.
    Stability(StabilityArgs),
    /// Fit a grim reaper to the tip region of a stored snapshot.
    FitReaper(FitArgs),
    /// Render a stored trajectory as SVG.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Graph,
    Parametric,
}

impl From<ModeArg> for CurveMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Graph => CurveMode::Graph,
            ModeArg::Parametric => CurveMode::Parametric,
        }
    }
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Hypersurface dimension.
    #[arg(long)]
    n: u32,
    /// Neck radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

impl SpecArgs {
    fn spec(&self) -> Result<CatenoidSpec> {
        CatenoidSpec::new(self.n, self.radius)
    }
}

/// Overrides of the numerical defaults.
#[derive(Args, Clone, Default)]
struct NumericArgs {
    /// Integrator: graphical or parametric (mode follows the scheme).
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    dx: Option<f64>,
    /// Truncate the profile at this height.
    #[arg(long, conflicts_with = "abscissa")]
    height: Option<f64>,
    /// Truncate the profile at |x| = this value.
    #[arg(long)]
    abscissa: Option<f64>,
    #[arg(long)]
    snapshot_interval: Option<f64>,
    /// Escape threshold.
    #[arg(long)]
    eps1: Option<f64>,
}

impl NumericArgs {
    fn config(&self, spec: CatenoidSpec) -> Result<ConstructionConfig> {
        let mut cfg = ConstructionConfig::new(spec);
        if let Some(s) = &self.scheme {
            cfg.mode = match s.as_str() {
                "graphical" => CurveMode::Graph,
                "parametric" => CurveMode::Parametric,
                other => {
                    return Err(Error::Unknown {
                        kind: "scheme",
                        name: other.into(),
                    })
                }
            };
            cfg.scheme = s.clone();
        }
        if let Some(dx) = self.dx {
            cfg.dx = dx;
        }
        if let Some(y) = self.height {
            cfg.truncation = Truncation::Height(y);
        }
        if let Some(x) = self.abscissa {
            cfg.truncation = Truncation::Abscissa(x);
        }
        if let Some(s) = self.snapshot_interval {
            cfg.snapshot_interval = s;
        }
        if let Some(e) = self.eps1 {
            cfg.eps1 = e;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct CatenoidArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Exact sample count (uniform in the mode's parameter).
    #[arg(long, conflicts_with = "dx")]
    samples: Option<usize>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, conflicts_with = "abscissa")]
    height: Option<f64>,
    #[arg(long)]
    abscissa: Option<f64>,
    /// Output file: `.json` for a curve document, CSV otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    spec: Option<SpecArgs>,
    /// Offset along the outward normal; negative for inward.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Final time [default: 1; on resume, the recorded one].
    #[arg(long)]
    t_end: Option<f64>,
    /// Stop when the distance to the catenoid reaches the escape threshold.
    #[arg(long)]
    stop_on_escape: bool,
    #[arg(long)]
    tip_height: Option<f64>,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Continue the run recorded in this manifest from its last snapshot.
    #[arg(long, conflicts_with_all = ["delta", "n"])]
    resume: Option<PathBuf>,
    /// Trajectory output (JSON lines); the manifest is written beside it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Target escape times.
    #[arg(long, value_delimiter = ',', required = true)]
    j: Vec<f64>,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EternalArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 0.02)]
    delta: f64,
    #[arg(long, default_value_t = 8.0)]
    tip_height: f64,
    #[arg(long, default_value_t = 200.0)]
    t_max: f64,
    #[command(flatten)]
    numeric: NumericArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    traj: PathBuf,
    /// Check name; `list` prints the available checks.
    #[arg(long)]
    check: String,
    /// Also write the report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    traj: PathBuf,
    /// Center time; defaults to the final snapshot.
    #[arg(long)]
    t: Option<f64>,
    /// `tip` or `x,rho`.
    #[arg(long, default_value = "tip")]
    probe: String,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 1.0])]
    radii: Vec<f64>,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Arclength half-length of the window.
    #[arg(long = "half-length", short = 'L')]
    half_length: Option<f64>,
    #[arg(long, default_value_t = 400)]
    grid: usize,
    /// Locate the critical half-length by bisection on `lo,hi`.
    #[arg(long, value_delimiter = ',')]
    bisect: Option<Vec<f64>>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    traj: PathBuf,
    /// Snapshot time; defaults to the last.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 3.0)]
    window: f64,
    /// Initial half-width; defaults to the tip curvature guess for n = 2 and
    /// 0.9 times the asymptotic width otherwise.
    #[arg(long)]
    width: Option<f64>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    traj: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Plot every k-th snapshot (the last is always included).
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Overlay the reference catenoid.
    #[arg(long)]
    catenoid: bool,
    /// Overlay a reaper fitted to the last snapshot.
    #[arg(long)]
    reaper: bool,
}

enum Outcome {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
            _ => {
                eprintln!("error: {WORKERS_ENV} must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        }
    }
    match dispatch(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { 3 } else { 2 })
        }
    }
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Catenoid(a) => catenoid(a),
        Command::Flow(a) => flow(a),
        Command::Construct(a) => construct(a),
        Command::Eternal(a) => eternal(a),
        Command::Analyze(a) => analyze(a),
        Command::Density(a) => density(a),
        Command::Stability(a) => stability(a),
        Command::FitReaper(a) => fit_reaper(a),
        Command::Export(a) => export(a),
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    print_text(&(serde_json::to_string_pretty(value)? + "\n"))
}

/// Writes to stdout; a closed pipe is not an error.
fn print_text(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn verdict(pass: bool) -> Outcome {
    if pass {
        Outcome::Ok
    } else {
        Outcome::CheckFailed
    }
}

fn catenoid(a: CatenoidArgs) -> Result<Outcome> {
    let spec = a.spec.spec()?;
    let r = spec.radius;
    let mode: CurveMode = a.mode.map(Into::into).unwrap_or(if spec.n.get() == 2 {
        CurveMode::Graph
    } else {
        CurveMode::Parametric
    });
    let truncation = match (a.height, a.abscissa) {
        (Some(y), _) => Truncation::Height(y),
        (_, Some(x)) => Truncation::Abscissa(x),
        _ if spec.n.get() == 2 => Truncation::Abscissa(3.0 * r),
        _ => Truncation::Height(6.0 * r),
    };
    let framed = match a.samples {
        Some(count) => spec.sample_count(mode, truncation, count)?,
        None => spec.framed_samples(&mcf_lab::geometry::Sampling {
            mode,
            spacing: a.dx.unwrap_or(0.01 * r),
            truncation,
        })?,
    };
    let residual = framed
        .iter()
        .map(|f| spec.first_integral_residual(f))
        .fold(0.0, f64::max);
    let curve =
        ProfileCurve::new(mode, framed.iter().map(|f| f.point).collect())?.with_symmetry(true);
    let body = match &a.out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => curve.to_json(spec.n.get())?,
        _ => curve.to_csv(),
    };
    match &a.out {
        Some(p) => {
            fs::write(p, body)?;
            print_json(&json!({
                "samples": curve.len(),
                "symmetry_defect": curve.symmetry_defect(),
                "first_integral_residual": residual,
                "out": p,
            }))?;
        }
        None => print_text(&body)?,
    }
    Ok(Outcome::Ok)
}

fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn parent(p: &Path) -> PathBuf {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Saves the partial trajectory of an aborted run before reporting the error.
fn save_partial(err: Error, out: Option<&Path>) -> Error {
    if let (Error::Aborted { partial, .. }, Some(out)) = (&err, out) {
        if save_trajectory(partial, out).is_ok() {
            eprintln!("partial trajectory written to {}", out.display());
        }
    }
    err
}

fn flow_summary(traj: &FlowTrajectory) -> serde_json::Value {
    let last = traj.last();
    json!({
        "final_time": traj.final_time(),
        "snapshots": traj.snapshots.len(),
        "stop_reason": traj.stop_reason,
        "escape": traj.escape,
        "min_h": traj.snapshots.iter().map(|s| s.diag.min_h).fold(f64::INFINITY, f64::min),
        "tip_height": last.diag.tip_height,
        "sup_distance": last.diag.sup_distance,
    })
}

fn flow(a: FlowArgs) -> Result<Outcome> {
    if let Some(manifest) = &a.resume {
        return resume_flow(manifest, a.t_end);
    }
    let (Some(spec_args), Some(delta)) = (&a.spec, a.delta) else {
        return Err(Error::Precondition(
            "flow needs --n and --delta (or --resume)".into(),
        ));
    };
    let spec = spec_args.spec()?;
    let cfg = a.numeric.config(spec)?;
    let t_end = a.t_end.unwrap_or(1.0);
    let mut stop = StopCriteria::until(t_end);
    if a.stop_on_escape {
        stop = stop.with_escape(cfg.eps1, spec);
    }
    if let Some(h) = a.tip_height {
        stop = stop.with_tip_height(h);
    }
    let state = cfg.offset_state(delta)?;
    let traj = run_flow(state.clone(), &stop).map_err(|e| save_partial(e, a.out.as_deref()))?;
    if let Some(out) = &a.out {
        save_trajectory(&traj, out)?;
        let mut m = RunManifest::new("flow")
            .with_config(&state.config)?
            .with_stop(&stop)?
            .artifact("trajectory", &file_name(out));
        m.spec = Some(spec);
        m.initial = json!({
            "kind": "normal-offset",
            "delta": delta,
            "sampling": cfg.sampling(),
        });
        m.parameters = json!({ "delta": delta, "eps1": cfg.eps1, "t_end": t_end });
        m.seal(&parent(out))?;
        m.save(&manifest_path(out))?;
    }
    print_json(&flow_summary(&traj))?;
    Ok(Outcome::Ok)
}

fn resume_flow(manifest_file: &Path, t_end: Option<f64>) -> Result<Outcome> {
    let mut m = RunManifest::load(manifest_file)?;
    let root = parent(manifest_file);
    let rel = m
        .artifacts
        .get("trajectory")
        .cloned()
        .ok_or_else(|| Error::Precondition("manifest lists no trajectory".into()))?;
    let path = root.join(&rel);
    let base = load_trajectory(&path)?;
    if let Some(t) = t_end {
        let mut stop = m.stop_criteria()?;
        stop.t_end = t;
        m = m.with_stop(&stop)?;
    }
    let (state, stop) = m.resume_state(&base)?;
    let more = run_flow(state, &stop).map_err(|e| save_partial(e, None))?;
    let traj = splice(base, more);
    save_trajectory(&traj, &path)?;
    m.seal(&root)?;
    m.save(manifest_file)?;
    print_json(&flow_summary(&traj))?;
    Ok(Outcome::Ok)
}

fn construct(a: ConstructArgs) -> Result<Outcome> {
    let spec = a.spec.spec()?;
    let cfg = a.numeric.config(spec)?;
    let family = build_ancient_family(&a.j, &cfg)?;
    fs::create_dir_all(&a.out)?;
    let mut m = RunManifest::new("construct")
        .with_config(&cfg)?
        .with_stop(&json!({
            "escape": { "eps1": cfg.eps1 },
        }))?;
    m.spec = Some(spec);
    m.initial = json!({ "kind": "normal-offset", "sampling": cfg.sampling() });
    let mut files = Vec::new();
    for member in &family.members {
        let name = format!("member-j{}.jsonl", member.j);
        save_trajectory(&member.trajectory, &a.out.join(&name))?;
        m = m.artifact(&format!("member-j{}", member.j), &name);
        files.push(name);
    }
    let summary = family.summary();
    m.parameters = json!({
        "eps1": cfg.eps1,
        "j": a.j,
        "family": summary,
        "trajectories": files,
    });
    m.seal(&a.out)?;
    m.save(&a.out.join("manifest.json"))?;
    print_json(&serde_json::to_value(&summary)?)?;
    Ok(Outcome::Ok)
}

fn eternal(a: EternalArgs) -> Result<Outcome> {
    let spec = a.spec.spec()?;
    let cfg = a.numeric.config(spec)?;
    let run = run_eternal(a.delta, a.t_max, a.tip_height, &cfg)?;
    fs::create_dir_all(&a.out)?;
    save_trajectory(&run.trajectory, &a.out.join("trajectory.jsonl"))?;
    let report = json!({
        "eps1": run.eps1,
        "escape_time": run.escape_time,
        "asymptotic_half_width": profile_half_width(spec.n) * spec.radius,
        "final_fit": run.final_fit(),
        "final_speed": run.final_speed(),
        "flatness_at_escape": run.flatness_at_escape(),
        "fit_series": run.fit_series,
        "tip_series": run.tip_series,
        "flatness_series": run.flatness_series,
    });
    fs::write(
        a.out.join("eternal.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    let mut m = RunManifest::new("eternal")
        .with_config(&cfg)?
        .with_stop(&StopCriteria::until(a.t_max).with_tip_height(a.tip_height))?
        .artifact("trajectory", "trajectory.jsonl")
        .artifact("report", "eternal.json");
    m.spec = Some(spec);
    m.initial = json!({ "kind": "normal-offset", "delta": a.delta, "sampling": cfg.sampling() });
    m.parameters = json!({ "delta": a.delta, "tip_height": a.tip_height, "t_max": a.t_max });
    m.seal(&a.out)?;
    m.save(&a.out.join("manifest.json"))?;
    print_json(&json!({
        "final_time": run.trajectory.final_time(),
        "stop_reason": run.trajectory.stop_reason,
        "escape_time": run.escape_time,
        "final_fit": run.final_fit(),
        "final_speed": run.final_speed(),
    }))?;
    Ok(Outcome::Ok)
}

fn analyze(a: AnalyzeArgs) -> Result<Outcome> {
    let registry = CheckRegistry::default();
    if a.check == "list" {
        print_text(&registry.names().join("\n"))?;
        print_text("\n")?;
        return Ok(Outcome::Ok);
    }
    let check = registry.get(&a.check)?;
    let traj = load_trajectory(&a.traj)?;
    let report = check.run(&traj)?;
    let value = serde_json::to_value(&report)?;
    if let Some(p) = &a.json {
        fs::write(p, serde_json::to_string_pretty(&value)? + "\n")?;
    }
    print_json(&value)?;
    Ok(verdict(report.pass))
}

fn parse_probe(s: &str, traj: &FlowTrajectory, t: f64) -> Result<Probe> {
    if s == "tip" {
        let curve = traj
            .curve_at(t)
            .ok_or_else(|| Error::InsufficientHistory(format!("no profile at t = {t}")))?;
        let (x, rho) = curve.tip();
        return Ok(Probe { x, rho });
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Precondition(format!("bad probe `{s}`")))?;
    match parts[..] {
        [x, rho] => Ok(Probe { x, rho }),
        _ => Err(Error::Precondition(format!(
            "probe must be `tip` or `x,rho`, got `{s}`"
        ))),
    }
}

fn density(a: DensityArgs) -> Result<Outcome> {
    let traj = load_trajectory(&a.traj)?;
    let t = a.t.unwrap_or_else(|| traj.final_time());
    let probe = parse_probe(&a.probe, &traj, t)?;
    let report = density_monotonicity(&traj, probe, t, &a.radii)?;
    print_json(&serde_json::to_value(&report)?)?;
    Ok(verdict(report.pass))
}

fn stability(a: StabilityArgs) -> Result<Outcome> {
    let spec = a.spec.spec()?;
    if let Some(b) = &a.bisect {
        let [mut lo, mut hi] = b[..] else {
            return Err(Error::Precondition("--bisect takes `lo,hi`".into()));
        };
        let l_lo = jacobi_lambda1(&spec, lo, a.grid)?.lambda1;
        let l_hi = jacobi_lambda1(&spec, hi, a.grid)?.lambda1;
        if !(l_lo > 0.0 && l_hi < 0.0) {
            return Err(Error::BracketNotFound { target: 0.0 });
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if jacobi_lambda1(&spec, mid, a.grid)?.lambda1 > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-10 {
                break;
            }
        }
        print_json(&json!({ "critical_half_length": 0.5 * (lo + hi), "bracket": [lo, hi] }))?;
        return Ok(Outcome::Ok);
    }
    let l = a
        .half_length
        .ok_or_else(|| Error::Precondition("stability needs --half-length or --bisect".into()))?;
    let r = jacobi_lambda1(&spec, l, a.grid)?;
    print_json(&json!({
        "half_length": r.half_length,
        "lambda1": r.lambda1,
        "stable": r.lambda1 > 0.0,
        "grid": r.grid,
        "iterations": r.iterations,
    }))?;
    Ok(Outcome::Ok)
}

fn snapshot_at(traj: &FlowTrajectory, t: Option<f64>) -> Result<(f64, ProfileCurve)> {
    match t {
        None => Ok((traj.final_time(), traj.last().curve.clone())),
        Some(t) => traj
            .curve_at(t)
            .map(|c| (t, c))
            .ok_or_else(|| Error::InsufficientHistory(format!("no profile at t = {t}"))),
    }
}

fn fit_init(traj: &FlowTrajectory, width: Option<f64>) -> FitInit {
    match width {
        Some(w) => FitInit::Width(w),
        None if traj.n.get() == 2 => FitInit::TipCurvature,
        None => {
            let r = traj.reference.map_or(1.0, |s| s.radius);
            FitInit::Width(0.9 * profile_half_width(traj.n) * r)
        }
    }
}

fn fit_reaper(a: FitArgs) -> Result<Outcome> {
    let traj = load_trajectory(&a.traj)?;
    let (t, curve) = snapshot_at(&traj, a.t)?;
    let fit = fit_grim_reaper(&curve, traj.n, a.window, fit_init(&traj, a.width))?;
    let accepted = fit.residual <= REAPER_REJECTION;
    print_json(&json!({
        "t": t,
        "fit": fit,
        "speed": fit.speed(),
        "accepted": accepted,
        "rejection": REAPER_REJECTION,
    }))?;
    Ok(verdict(accepted))
}

fn export(a: ExportArgs) -> Result<Outcome> {
    let traj = load_trajectory(&a.traj)?;
    let mut opts = SvgOptions::default();
    let (lo, hi) = traj.snapshots.iter().map(|s| s.curve.bbox()).fold(
        ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
        |acc, b| {
            (
                [acc.0[0].min(b.0[0]), acc.0[1].min(b.0[1])],
                [acc.1[0].max(b.1[0]), acc.1[1].max(b.1[1])],
            )
        },
    );
    if a.catenoid {
        let spec = traj.reference.ok_or_else(|| {
            Error::Precondition("trajectory records no reference catenoid".into())
        })?;
        let reference = mcf_lab::geometry::CatenoidReference::covering(&spec, &traj.first().curve)?;
        let points = reference
            .points
            .into_iter()
            .filter(|p| p[0] >= lo[0] && p[0] <= hi[0] && p[1] <= hi[1])
            .collect();
        opts.overlays
            .push(Overlay::new("catenoid", points, "#1f77b4"));
    }
    if a.reaper {
        let fit = fit_grim_reaper(&traj.last().curve, traj.n, 3.0, fit_init(&traj, None))?;
        let reaper = fit.reaper()?;
        let extent = 0.999 * fit.half_width;
        let curve = reaper.sample(CurveMode::Parametric, fit.half_width / 200.0, extent, 0.0)?;
        let points = curve.points.into_iter().filter(|p| p[1] <= hi[1]).collect();
        opts.overlays
            .push(Overlay::new("reaper", points, "#d62728"));
    }
    let svg = trajectory_svg(&traj, a.stride, &opts)?;
    fs::write(&a.out, svg)?;
    Ok(Outcome::Ok)
}

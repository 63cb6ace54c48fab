//! Command-line front end. Every check is reachable from exactly one
//! subcommand; reports are deterministic JSON on stdout (a fixed seed gives
//! byte-identical output), wall-clock timing goes to stderr only.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pwlab::config::{parse_config, serialize_config, Gauge, MetricSpec, ProfileKind, ProfileVariant};
use pwlab::report::ReportDoc;
use pwlab::suites::{
    frame_curvature_rows, geodesic_suite, holonomy_suite, liealg_suite, quaternion_suite,
    run_verify, wave_suite, VERIFY_SUITES,
};
use pwlab::waves::{wave_geodesic, PlaneWaveSpec, WaveProfile, WaveState};
use serde_json::json;

fn tool() -> String {
    format!("pwlab {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Parser)]
#[command(
    name = "pwlab",
    version,
    about = "Residual checks, trajectories, and reports for degenerate wave metrics",
    after_help = "Reports are deterministic: a fixed --seed gives a byte-identical report.\n\
PWLAB_THREADS caps worker threads (default 1) without changing any output.\n\
Exit codes: 0 all checks pass, 1 at least one check failed, 2 configuration error."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the verification suites on a metric configuration
    Verify(VerifyArgs),
    /// Integrate the canonical inward geodesic and emit trajectory tables
    Geodesic(GeodesicArgs),
    /// Holonomy generators, identities, and the 2x2 normal form
    Holonomy(CommonArgs),
    /// Structure checks and exports for the homogeneous model algebra
    Liealg(LiealgArgs),
    /// Lorentzian wave checks: isometries, brackets, curvature profile
    Wave(WaveArgs),
    /// Quaternionic wedge-kernel flatness report
    Quaternion(QuaternionArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Key-value configuration file (defaults to the bundled spec)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Directory for report artifacts (report.json plus command tables)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Restrict to one suite: metric, curvature, kahler, ambrose_singer, osserman, walker
    #[arg(long)]
    suite: Option<String>,
    /// Number of sampled evaluation points
    #[arg(long, default_value_t = 40)]
    samples: usize,
    /// Sampling seed
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// In-memory negative control applied after parsing
    #[arg(long, value_enum)]
    mutate: Option<VerifyMutation>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMutation {
    /// Overwrite every coupling's second polynomial with its first
    BreakCauchyRiemann,
}

#[derive(Args)]
struct GeodesicArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Integrator tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct LiealgArgs {
    /// Oscillator block count of the model algebra
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Profile value at the base point
    #[arg(long, default_value_t = 0.75, allow_hyphen_values = true)]
    bp: f64,
    /// Profile curvature coefficient
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    b0: f64,
    /// In-memory negative control applied to one bracket
    #[arg(long, value_enum)]
    mutate: Option<LiealgMutation>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LiealgMutation {
    /// Flip the sign of one structure constant (breaks the Jacobi identity)
    FlipBracketSign,
}

#[derive(Args)]
struct WaveArgs {
    /// Profile kind
    #[arg(long, value_enum, default_value_t = WaveProfileArg::ScaleInvariant)]
    profile: WaveProfileArg,
    /// Transverse dimension
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Diagonal profile coefficient
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    b0: f64,
    /// Comma-separated +1/-1 transverse signs (default all +1)
    #[arg(long)]
    eps: Option<String>,
    /// Base parameter for oscillators and sampling
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    u0: f64,
    #[arg(long, default_value_t = 40)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Trajectory integrator tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WaveProfileArg {
    Constant,
    ScaleInvariant,
}

#[derive(Args)]
struct QuaternionArgs {
    /// Positive 4-blocks of the flat model
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Negative 4-blocks of the flat model
    #[arg(long, default_value_t = 1)]
    q: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let t0 = std::time::Instant::now();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    eprintln!("timing: {:.1} ms", t0.elapsed().as_secs_f64() * 1e3);
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Geodesic(a) => cmd_geodesic(a),
        Cmd::Holonomy(a) => cmd_holonomy(a),
        Cmd::Liealg(a) => cmd_liealg(a),
        Cmd::Wave(a) => cmd_wave(a),
        Cmd::Quaternion(a) => cmd_quaternion(a),
    }
}

fn default_spec() -> MetricSpec {
    MetricSpec {
        n: 0,
        epsilons: vec![],
        profile: ProfileKind {
            variant: ProfileVariant::SingularScaleInvariant,
            b0: 4.0,
            harmonic_extra: vec![],
        },
        couplings: vec![],
        gauge: Gauge::Literal,
    }
}

fn load_spec(path: &Option<PathBuf>) -> Result<MetricSpec> {
    let Some(p) = path else {
        return Ok(default_spec());
    };
    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    let spec = parse_config(&text).with_context(|| format!("parsing {}", p.display()))?;
    Ok(spec)
}

/// Print the report to stdout, write artifacts, and turn the verdict into
/// an exit code (failing checks are also listed on stderr).
fn finish(doc: &ReportDoc, out: Option<&PathBuf>, extra: &[(&str, String)]) -> Result<i32> {
    let json = doc.to_json();
    print!("{json}");
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(dir.join("report.json"), &json)?;
        for (name, body) in extra {
            fs::write(dir.join(name), body)?;
        }
    }
    if doc.pass {
        Ok(0)
    } else {
        for c in doc.failing() {
            eprintln!("FAIL {}: max residual {} exceeds {}", c.name, c.max_residual, c.threshold);
        }
        Ok(1)
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let parsed = load_spec(&a.common.spec)?;
    let mut command = String::from("verify");
    let mut spec = parsed.clone();
    if let Some(VerifyMutation::BreakCauchyRiemann) = a.mutate {
        if spec.couplings.iter().all(|c| c.is_zero()) {
            bail!("break-cauchy-riemann needs at least one nonzero coupling");
        }
        for c in &mut spec.couplings {
            c.break_cauchy_riemann();
        }
        command.push_str(" --mutate break-cauchy-riemann");
    }
    if let Some(s) = &a.suite {
        if !VERIFY_SUITES.contains(&s.as_str()) {
            bail!("unknown suite '{s}' (expected one of {})", VERIFY_SUITES.join(", "));
        }
        command.push_str(&format!(" --suite {s}"));
    }
    let suites = run_verify(&spec, a.suite.as_deref(), a.samples, a.seed)?;
    // the echo is the parseable input configuration; mutations exist only
    // in memory and are recorded in the command string instead
    let doc = ReportDoc::new(&tool(), &command, serialize_config(&parsed), a.seed, a.samples, suites);
    finish(&doc, a.common.out.as_ref(), &[])
}

fn cmd_geodesic(a: GeodesicArgs) -> Result<i32> {
    let spec = load_spec(&a.common.spec)?;
    let art = geodesic_suite(&spec, a.tol)?;
    let rows = frame_curvature_rows(&spec, a.tol)?;
    let mut plot = String::from("t,value,predicted\n");
    for (t, v, p) in &rows {
        plot.push_str(&format!("{t},{v},{p}\n"));
    }
    let doc = ReportDoc::new(&tool(), "geodesic", serialize_config(&spec), 0, 0, vec![art.suite]);
    finish(
        &doc,
        a.common.out.as_ref(),
        &[("trajectory.csv", art.trajectory.to_csv()), ("plotdata.csv", plot)],
    )
}

fn cmd_holonomy(a: CommonArgs) -> Result<i32> {
    let spec = load_spec(&a.spec)?;
    let (suite, rep, su) = holonomy_suite(&spec)?;
    let su_value = match &su {
        Some(s) => {
            let mat_pairs = |m: &[[num_complex::Complex64; 2]; 2]| -> Vec<Vec<[f64; 2]>> {
                m.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
            };
            json!({
                "b": s.b,
                "sign": s.sign,
                "raw": mat_pairs(&s.raw),
                "normal_form": mat_pairs(&s.normal_form),
                "frame_residual": s.frame_residual,
                "trace_abs": s.trace_abs,
                "square_max": s.square_max,
                "membership": s.membership,
            })
        }
        None => serde_json::Value::Null,
    };
    let mut artifact =
        serde_json::to_string_pretty(&json!({ "holonomy": rep, "su11": su_value }))?;
    artifact.push('\n');
    let doc = ReportDoc::new(&tool(), "holonomy", serialize_config(&spec), 0, 0, vec![suite]);
    finish(&doc, a.out.as_ref(), &[("holonomy.json", artifact)])
}

fn cmd_liealg(a: LiealgArgs) -> Result<i32> {
    if a.n > 16 {
        bail!("n = {} is outside the supported range (0..=16)", a.n);
    }
    let flip = matches!(a.mutate, Some(LiealgMutation::FlipBracketSign));
    let art = liealg_suite(a.n, a.bp, a.b0, flip);
    let command = if flip {
        String::from("liealg --mutate flip-bracket-sign")
    } else {
        String::from("liealg")
    };
    let echo = format!("liealg.n = {}\nliealg.b_p = {}\nliealg.b0 = {}\n", a.n, a.bp, a.b0);
    let mut kjson =
        serde_json::to_string_pretty(&json!({ "fit": art.k_fit, "blowup": art.k_blowup }))?;
    kjson.push('\n');
    let mut algebra = art.algebra_json.clone();
    algebra.push('\n');
    let doc = ReportDoc::new(&tool(), &command, echo, 0, 0, vec![art.suite]);
    finish(&doc, a.out.as_ref(), &[("algebra.json", algebra), ("kgeodesic.json", kjson)])
}

fn cmd_wave(a: WaveArgs) -> Result<i32> {
    if a.n == 0 {
        bail!("wave needs at least one transverse direction (--n 1)");
    }
    let eps: Option<Vec<f64>> = match &a.eps {
        None => None,
        Some(s) => Some(
            s.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|_| anyhow::anyhow!("bad eps entry '{}'", tok.trim()))
                })
                .collect::<Result<Vec<f64>>>()?,
        ),
    };
    let mat: Vec<Vec<f64>> = (0..a.n)
        .map(|i| (0..a.n).map(|j| if i == j { a.b0 } else { 0.0 }).collect())
        .collect();
    let (profile, kind) = match a.profile {
        WaveProfileArg::Constant => (WaveProfile::Constant(mat), "constant"),
        WaveProfileArg::ScaleInvariant => (WaveProfile::ScaleInvariant(mat), "scale_invariant"),
    };
    let wspec =
        PlaneWaveSpec::new(profile, eps).map_err(|e| anyhow::anyhow!("wave configuration: {e}"))?;
    if wspec.is_scale_invariant() && a.u0 == 0.0 {
        bail!("the scale-invariant profile has a pole at u = 0; pick u0 != 0");
    }
    let suite = wave_suite(&wspec, a.u0, a.samples, a.seed)?;

    let dim = wspec.dim();
    let mut pos = vec![0.0; dim];
    pos[0] = a.u0;
    for slot in pos.iter_mut().skip(2) {
        *slot = 0.5;
    }
    let mut vel = vec![0.0; dim];
    let ssi = wspec.is_scale_invariant();
    // drive u toward the pole for the scale-invariant profile so the
    // trajectory demonstrates the wall flag; otherwise integrate away
    vel[0] = if ssi { -a.u0.signum() } else { 1.0 };
    if dim > 2 {
        vel[2] = 0.1;
    }
    let t_end = if ssi { a.u0.abs() + 1.0 } else { 5.0 };
    let traj = wave_geodesic(&wspec, &WaveState { position: pos, velocity: vel, t: 0.0 }, t_end, a.tol)?;

    let mut echo = format!(
        "wave.profile = {kind}\nwave.n = {}\nwave.b0 = {}\nwave.u0 = {}\n",
        a.n, a.b0, a.u0
    );
    echo.push_str(&format!(
        "wave.epsilons = {}\n",
        wspec.epsilons.iter().map(|e| format!("{e}")).collect::<Vec<_>>().join(" ")
    ));
    let doc = ReportDoc::new(&tool(), "wave", echo, a.seed, a.samples, vec![suite]);
    finish(&doc, a.out.as_ref(), &[("wave_trajectory.csv", traj.to_csv())])
}

fn cmd_quaternion(a: QuaternionArgs) -> Result<i32> {
    if a.p == 0 || a.q == 0 {
        bail!("signature (4p, 4q) needs p >= 1 and q >= 1");
    }
    let (suite, rep) =
        quaternion_suite(a.p, a.q).map_err(|e| anyhow::anyhow!("quaternionic model: {e}"))?;
    let mut flat = serde_json::to_string_pretty(&rep)?;
    flat.push('\n');
    let echo = format!("quaternion.p = {}\nquaternion.q = {}\n", a.p, a.q);
    let doc = ReportDoc::new(&tool(), "quaternion", echo, 0, 0, vec![suite]);
    finish(&doc, a.out.as_ref(), &[("flatness.json", flat)])
}

//! `funnel-lab` argument parsing and dispatch.
//!
//! Precedence, lowest first: built-in defaults, `--config` file, `--set`
//! overrides, named flags. `FUNNEL_LAB_OUT` replaces `--out`.

use super::commands::{run_command, CommandOutput, Subcommand};
use super::config::Config;
use super::output::{spec_echo, write_outputs, OutputPaths};
use super::{ExperimentError, EXIT_ANALYSIS, EXIT_CONFIG, EXIT_OK};
use clap::{Args, Parser};
use std::ffi::OsString;
use std::path::PathBuf;

pub const OUT_ENV: &str = "FUNNEL_LAB_OUT";

#[derive(Debug, Parser)]
#[command(name = "funnel-lab", version, about = "Return maps near a saddle-focus and an elliptic burster")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Iterate a map from (z0, phi0).
    IterateMap(MapCmd),
    /// Rotation numbers of the circle map over a range of omega_tilde.
    CircleSweep(MapCmd),
    /// Invariant graph of an annulus map by graph transform.
    InvariantCurve(MapCmd),
    /// Diffeomorphism condition, invariant curve and its attraction.
    CheckProp1(MapCmd),
    /// Horseshoe alternatives on an interval.
    CheckProp2(MapCmd),
    /// Fixed points of the n = 0 singular limit and their eigenvalues.
    CheckProp3(MapCmd),
    /// Certify a horseshoe and shadow random symbol sequences.
    Horseshoe(MapCmd),
    /// Monotone branches of the sine circle map.
    SineBranches(MapCmd),
    /// Lyapunov exponents of a map.
    MapLyapunov(MapCmd),
    /// Integrate the burster and sample the trajectory.
    BursterRun(BursterCmd),
    /// Poincaré section of the burster.
    BursterSection(BursterCmd),
    /// Classify the burster regime.
    BursterClassify(BursterCmd),
    /// Equilibrium and limit-cycle branches of the fast subsystem.
    FastBranch(BursterCmd),
    /// Parameter scan.
    Scan(ScanCmd),
    /// Run the built-in closed-form examples.
    Selftest(CommonArgs),
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overridden by FUNNEL_LAB_OUT).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Scan worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    /// Override any configuration key, e.g. `--set burster.t_max=5e4`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Clone, Args)]
struct MapArgs {
    /// full, rescaled, singular, circle, sine or model1d.
    #[arg(long = "map")]
    kind: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega_over_rho: Option<f64>,
    /// sine, exp_sine or constant.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi_star: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega_tilde: Option<f64>,
    #[arg(long)]
    n: Option<u8>,
    #[arg(long, allow_negative_numbers = true)]
    eps_r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps_phi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    amplitude: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["PHI1", "PHI2"], allow_negative_numbers = true)]
    interval: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    z0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi0: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    target_phi: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    sweep_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sweep_max: Option<f64>,
    #[arg(long)]
    sweep_count: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct BursterArgs {
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu_slow: Option<f64>,
    /// Applied current I.
    #[arg(long, allow_negative_numbers = true)]
    drive: Option<f64>,
    #[arg(long)]
    t_span: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_transient: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
struct MapCmd {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    map: MapArgs,
}

#[derive(Debug, Clone, Args)]
struct BursterCmd {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    burster: BursterArgs,
}

#[derive(Debug, Clone, Args)]
struct ScanCmd {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    map: MapArgs,
    #[command(flatten)]
    burster: BursterArgs,
    /// map-family, circle-map or burster.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    analysis: Option<String>,
    /// `name=min:max:count[:log]`; repeat for a second axis. Replaces the
    /// configured axes.
    #[arg(long = "axis", allow_hyphen_values = true)]
    axes: Vec<String>,
}

type Overrides = Vec<(&'static str, toml::Value)>;

fn push_f(o: &mut Overrides, key: &'static str, v: Option<f64>) {
    if let Some(v) = v {
        o.push((key, toml::Value::Float(v)));
    }
}

fn push_i(o: &mut Overrides, key: &'static str, v: Option<usize>) {
    if let Some(v) = v {
        o.push((key, toml::Value::Integer(v as i64)));
    }
}

fn push_s(o: &mut Overrides, key: &'static str, v: &Option<String>) {
    if let Some(v) = v {
        o.push((key, toml::Value::String(v.clone())));
    }
}

impl MapArgs {
    fn overrides(&self, o: &mut Overrides) {
        push_s(o, "map.kind", &self.kind);
        push_f(o, "saddle.nu", self.nu);
        push_f(o, "saddle.omega_over_rho", self.omega_over_rho);
        push_s(o, "profile.kind", &self.profile);
        push_f(o, "profile.a", self.a);
        push_f(o, "profile.s", self.s);
        push_f(o, "global.mu", self.mu);
        push_f(o, "global.phi_star", self.phi_star);
        push_f(o, "global.omega_tilde", self.omega_tilde);
        push_i(o, "global.n", self.n.map(usize::from));
        push_f(o, "global.eps_r", self.eps_r);
        push_f(o, "global.eps_phi", self.eps_phi);
        push_f(o, "map.amplitude", self.amplitude);
        push_i(o, "map.m", self.m);
        if let Some(iv) = &self.interval {
            o.push(("map.interval", toml::Value::Array(iv.iter().map(|&x| toml::Value::Float(x)).collect())));
        }
        push_f(o, "map.z0", self.z0);
        push_f(o, "map.phi0", self.phi0);
        push_i(o, "map.steps", self.steps);
        push_f(o, "map.target_phi", self.target_phi);
        push_i(o, "map.grid", self.grid);
        push_f(o, "map.sweep_min", self.sweep_min);
        push_f(o, "map.sweep_max", self.sweep_max);
        push_i(o, "map.sweep_count", self.sweep_count);
    }
}

impl BursterArgs {
    fn overrides(&self, o: &mut Overrides) {
        push_f(o, "burster.c", self.c);
        push_f(o, "burster.delta", self.delta);
        push_f(o, "burster.mu_slow", self.mu_slow);
        push_f(o, "burster.I", self.drive);
        push_f(o, "burster.t_span", self.t_span);
        push_f(o, "burster.dt", self.dt);
        push_f(o, "burster.t_transient", self.t_transient);
        push_f(o, "burster.t_max", self.t_max);
        push_f(o, "burster.y_min", self.y_min);
        push_f(o, "burster.y_max", self.y_max);
    }
}

fn parse_axis(raw: &str) -> Result<toml::Value, ExperimentError> {
    let bad = || ExperimentError::Config(format!("axis `{raw}` is not name=min:max:count[:log|linear]"));
    let (name, rest) = raw.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let count: i64 = parts[2].trim().parse().map_err(|_| bad())?;
    let mut t = toml::Table::new();
    t.insert("name".into(), toml::Value::String(name.trim().into()));
    t.insert("min".into(), toml::Value::Float(num(parts[0])?));
    t.insert("max".into(), toml::Value::Float(num(parts[1])?));
    t.insert("count".into(), toml::Value::Integer(count));
    if let Some(s) = parts.get(3) {
        t.insert("spacing".into(), toml::Value::String(s.trim().into()));
    }
    Ok(toml::Value::Table(t))
}

/// A parsed command line with its fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub subcommand: Subcommand,
    pub config: Config,
    pub out_dir: PathBuf,
}

impl Invocation {
    /// Parses `args` (program name first). Help and version requests come
    /// back as [`ExperimentError::Usage`] carrying the rendered text.
    pub fn parse<I, T>(args: I) -> Result<Self, ExperimentError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| ExperimentError::Usage(e.render().to_string()))?;
        Self::from_cli(cli)
    }

    fn from_cli(cli: Cli) -> Result<Self, ExperimentError> {
        let mut o = Overrides::new();
        let (sub, common) = match cli.command {
            Command::IterateMap(c) => (Subcommand::IterateMap, map_cmd(c, &mut o)),
            Command::CircleSweep(c) => (Subcommand::CircleSweep, map_cmd(c, &mut o)),
            Command::InvariantCurve(c) => (Subcommand::InvariantCurve, map_cmd(c, &mut o)),
            Command::CheckProp1(c) => (Subcommand::CheckProp1, map_cmd(c, &mut o)),
            Command::CheckProp2(c) => (Subcommand::CheckProp2, map_cmd(c, &mut o)),
            Command::CheckProp3(c) => (Subcommand::CheckProp3, map_cmd(c, &mut o)),
            Command::Horseshoe(c) => (Subcommand::Horseshoe, map_cmd(c, &mut o)),
            Command::SineBranches(c) => (Subcommand::SineBranches, map_cmd(c, &mut o)),
            Command::MapLyapunov(c) => (Subcommand::MapLyapunov, map_cmd(c, &mut o)),
            Command::BursterRun(c) => (Subcommand::BursterRun, burster_cmd(c, &mut o)),
            Command::BursterSection(c) => (Subcommand::BursterSection, burster_cmd(c, &mut o)),
            Command::BursterClassify(c) => (Subcommand::BursterClassify, burster_cmd(c, &mut o)),
            Command::FastBranch(c) => (Subcommand::FastBranch, burster_cmd(c, &mut o)),
            Command::Scan(c) => {
                c.map.overrides(&mut o);
                c.burster.overrides(&mut o);
                push_s(&mut o, "scan.target", &c.target);
                push_s(&mut o, "scan.analysis", &c.analysis);
                if !c.axes.is_empty() {
                    let axes = c.axes.iter().map(|a| parse_axis(a)).collect::<Result<Vec<_>, _>>()?;
                    o.push(("scan.axes", toml::Value::Array(axes)));
                }
                (Subcommand::Scan, c.common)
            }
            Command::Selftest(c) => (Subcommand::Selftest, c),
        };
        let mut config = match &common.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        for s in &common.set {
            config.apply_override(s)?;
        }
        for (key, value) in o {
            config.set(key, value)?;
        }
        if let Some(seed) = common.seed {
            config.run.seed = seed;
        }
        if let Some(w) = common.workers {
            config.run.workers = w;
        }
        let out_dir = match std::env::var_os(OUT_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => common.out,
        };
        Ok(Self {
            subcommand: sub,
            config,
            out_dir,
        })
    }
}

fn map_cmd(c: MapCmd, o: &mut Overrides) -> CommonArgs {
    c.map.overrides(o);
    c.common
}

fn burster_cmd(c: BursterCmd, o: &mut Overrides) -> CommonArgs {
    c.burster.overrides(o);
    c.common
}

/// What a completed run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub invocation: Invocation,
    pub output: CommandOutput,
    pub paths: OutputPaths,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.output.failure.is_some() {
            EXIT_ANALYSIS
        } else {
            EXIT_OK
        }
    }
}

/// Parses, runs and writes outputs. Runs whose analysis fails still write
/// their files and come back as `Ok` with a failure in the output.
pub fn execute<I, T>(args: I) -> Result<RunReport, ExperimentError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    complete(Invocation::parse(args)?)
}

fn complete(mut inv: Invocation) -> Result<RunReport, ExperimentError> {
    let output = run_command(inv.subcommand, &mut inv.config)?;
    let spec = spec_echo(inv.subcommand.as_str(), &inv.config)?;
    let paths = write_outputs(&inv.out_dir, inv.subcommand.as_str(), &spec, &output.table, inv.config.run.seed)?;
    Ok(RunReport {
        invocation: inv,
        output,
        paths,
    })
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match Invocation::from_cli(cli).and_then(complete) {
        Ok(r) => {
            println!("{}", r.output.summary);
            eprintln!("wrote {} and {}", r.paths.csv.display(), r.paths.json.display());
            if let Some(f) = &r.output.failure {
                eprintln!("error: {f}");
            }
            r.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_set() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[profile]\na = 0.5\n[map]\nm = 3\n").unwrap();
        let inv = Invocation::parse([
            "funnel-lab", "check-prop2", "--config", path.to_str().unwrap(), "--set", "profile.a=0.7", "--a", "0.96", "--interval", "1", "4",
        ])
        .unwrap();
        assert_eq!(inv.subcommand, Subcommand::CheckProp2);
        assert_eq!(inv.config.profile.a, 0.96);
        assert_eq!(inv.config.map.m, 3);
        assert_eq!(inv.config.map.interval, [1.0, 4.0]);
    }

    #[test]
    fn negative_values_and_axes() {
        let inv = Invocation::parse([
            "funnel-lab", "scan", "--target", "burster", "--analysis", "classify_regime", "--axis", "c=-1.5:-1.0:6", "--c", "-1.2",
        ])
        .unwrap();
        assert_eq!(inv.config.scan.axes.len(), 1);
        assert_eq!(inv.config.scan.axes[0].min, -1.5);
        assert_eq!(inv.config.scan.axes[0].count, 6);
        assert_eq!(inv.config.burster.c, -1.2);
    }

    #[test]
    fn usage_errors_are_exit_two() {
        for args in [
            vec!["funnel-lab"],
            vec!["funnel-lab", "no-such-command"],
            vec!["funnel-lab", "selftest", "--bogus"],
            vec!["funnel-lab", "check-prop2", "--a", "x"],
        ] {
            let e = Invocation::parse(args.clone()).unwrap_err();
            assert_eq!(e.exit_code(), EXIT_CONFIG, "{args:?}");
        }
        let e = Invocation::parse(["funnel-lab", "selftest", "--set", "nope.x=1"]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_CONFIG);
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hallwave::dynamics::KernelSpec;
use hallwave::run::{load_manifest, load_preset, parse_config, preset_description, preset_names, preset_text, run, ParsedConfig, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(name = "hallwave", version, about = "Emitters on a photonic Harper-Hofstadter lattice")]
struct Cli {
    /// Output directory; defaults to the config's `output`, else `runs/<name>`.
    #[arg(long, global = true, env = "HALLWAVE_OUT")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps; defaults to all cores.
    #[arg(long, global = true, env = "HALLWAVE_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Where the physical configuration comes from.
#[derive(Args, Debug)]
struct Source {
    /// TOML run configuration.
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Use a shipped preset instead of a file.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a configuration file as written.
    Run {
        config: PathBuf,
    },
    /// Eigenfrequencies and mode centres.
    Spectrum {
        #[command(flatten)]
        source: Source,
    },
    /// Local density of states at one site.
    Ldos {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = parse_site)]
        site: Option<[usize; 2]>,
        #[arg(long, allow_negative_numbers = true)]
        omega_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        omega_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        broadening: Option<f64>,
        /// Analytic Landau-level profile to export alongside; repeatable.
        #[arg(long = "level")]
        levels: Vec<usize>,
    },
    /// Photon propagator between two sites.
    Greens {
        #[command(flatten)]
        source: Source,
        #[arg(long = "from", value_parser = parse_site)]
        from: Option<[usize; 2]>,
        #[arg(long = "to", value_parser = parse_site)]
        to: Option<[usize; 2]>,
        #[arg(long)]
        points: Option<usize>,
        /// Also evaluate the lowest-Landau-level closed form.
        #[arg(long)]
        continuum: bool,
        /// Store a `|G|` map at this time; repeatable.
        #[arg(long = "map-time")]
        map_times: Vec<f64>,
    },
    /// Time evolution of the coupled system.
    Evolve {
        #[command(flatten)]
        source: Source,
        #[arg(long, conflicts_with = "excite_site")]
        excite_emitter: Option<usize>,
        #[arg(long, value_parser = parse_site)]
        excite_site: Option<[usize; 2]>,
    },
    /// Memory-kernel solution for the configured emitters.
    Kernel {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        kernel: Option<KernelArg>,
        /// Strip length for `--kernel finite-ly`.
        #[arg(long)]
        ly: Option<f64>,
    },
    /// Two-emitter state transfer.
    Transfer {
        #[command(flatten)]
        source: Source,
        /// Fidelity search window `t0,t1`.
        #[arg(long, value_parser = parse_window)]
        window: Option<[f64; 2]>,
    },
    /// Parameter sweeps; the grid lives in the configuration's scenario table.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        #[command(flatten)]
        source: Source,
    },
    /// Run a named preset.
    Scenario {
        name: String,
    },
    /// Inspect shipped presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
    /// Check a manifest's derived quantities against its configuration.
    Verify {
        manifest: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum PresetAction {
    List,
    Show { name: String },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KernelArg {
    Exact,
    GaussianLll,
    FiniteLy,
    FlatMarkov,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum SweepKind {
    #[value(name = "revival_map")]
    RevivalMap,
    #[value(name = "disorder_sweep")]
    DisorderSweep,
}

fn parse_site(s: &str) -> Result<[usize; 2], String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    Ok([x.trim().parse().map_err(|e| format!("{e}"))?, y.trim().parse().map_err(|e| format!("{e}"))?])
}

fn parse_window(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `t0,t1`, got `{s}`"))?;
    Ok([a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?])
}

type CliResult<T> = Result<T, String>;

fn load(source: &Source) -> CliResult<(ParsedConfig, String)> {
    match (&source.config, &source.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let stem = path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
            Ok((parse_config(&text).map_err(|e| e.to_string())?, stem))
        }
        (None, Some(name)) => Ok((load_preset(name).map_err(|e| e.to_string())?, name.clone())),
        (None, None) => Err("give a configuration file or --preset".into()),
    }
}

fn need<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| format!("missing --{flag} (or put the scenario table in the configuration)"))
}

/// Replace the configured scenario, recording the substitution.
fn set_scenario(parsed: &mut ParsedConfig, scenario: ScenarioConfig) {
    if parsed.config.scenario != scenario {
        parsed.defaults_applied.push(format!("scenario replaced by the `{}` subcommand", scenario.name()));
        parsed.config.scenario = scenario;
    }
}

fn execute(cli: Cli) -> CliResult<ExitCode> {
    let (mut parsed, name) = match cli.command {
        Command::Presets { action: PresetAction::List } => {
            for n in preset_names() {
                println!("{n:<10} {}", preset_description(n).unwrap_or(""));
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Presets { action: PresetAction::Show { name } } => {
            print!("{}", preset_text(&name).map_err(|e| e.to_string())?);
            return Ok(ExitCode::SUCCESS);
        }
        Command::Verify { manifest } => {
            let m = load_manifest(&manifest).map_err(|e| e.to_string())?;
            println!("{}: derived quantities match (run {})", manifest.display(), m.run_id);
            return Ok(ExitCode::SUCCESS);
        }
        Command::Run { config } => load(&Source { config: Some(config), preset: None })?,
        Command::Scenario { name } => (load_preset(&name).map_err(|e| e.to_string())?, name),
        Command::Spectrum { source } => {
            let (mut p, n) = load(&source)?;
            set_scenario(&mut p, ScenarioConfig::Spectrum);
            (p, n)
        }
        Command::Ldos { source, site, omega_min, omega_max, points, broadening, levels } => {
            let (mut p, n) = load(&source)?;
            let scenario = match p.config.scenario.clone() {
                ScenarioConfig::Ldos { site: s, omega_min: a, omega_max: b, points: k, broadening: w, levels: l } => ScenarioConfig::Ldos {
                    site: site.unwrap_or(s),
                    omega_min: omega_min.unwrap_or(a),
                    omega_max: omega_max.unwrap_or(b),
                    points: points.unwrap_or(k),
                    broadening: broadening.unwrap_or(w),
                    levels: if levels.is_empty() { l } else { levels },
                },
                _ => ScenarioConfig::Ldos {
                    site: need(site, "site")?,
                    omega_min: need(omega_min, "omega-min")?,
                    omega_max: need(omega_max, "omega-max")?,
                    points: points.unwrap_or(801),
                    broadening: broadening.unwrap_or(hallwave::propagator::DEFAULT_BROADENING),
                    levels,
                },
            };
            set_scenario(&mut p, scenario);
            (p, n)
        }
        Command::Greens { source, from, to, points, continuum, map_times } => {
            let (mut p, n) = load(&source)?;
            let scenario = match p.config.scenario.clone() {
                ScenarioConfig::Greens { source: s, target: t, points: k, continuum: c, map_times: m } => ScenarioConfig::Greens {
                    source: from.unwrap_or(s),
                    target: to.unwrap_or(t),
                    points: points.unwrap_or(k),
                    continuum: continuum || c,
                    map_times: if map_times.is_empty() { m } else { map_times },
                },
                _ => ScenarioConfig::Greens {
                    source: need(from, "from")?,
                    target: need(to, "to")?,
                    points: points.unwrap_or(801),
                    continuum,
                    map_times,
                },
            };
            set_scenario(&mut p, scenario);
            (p, n)
        }
        Command::Evolve { source, excite_emitter, excite_site } => {
            let (mut p, n) = load(&source)?;
            set_scenario(&mut p, ScenarioConfig::Evolve { excite_emitter, excite_site });
            (p, n)
        }
        Command::Kernel { source, kernel, ly } => {
            let (mut p, n) = load(&source)?;
            let spec = match (kernel, &p.config.scenario) {
                (None, ScenarioConfig::Kernel { kernel }) => *kernel,
                (None, ScenarioConfig::Emission { kernel: Some(k) }) => *k,
                (None, _) => KernelSpec::Exact,
                (Some(KernelArg::Exact), _) => KernelSpec::Exact,
                (Some(KernelArg::GaussianLll), _) => KernelSpec::GaussianLll,
                (Some(KernelArg::FlatMarkov), _) => KernelSpec::FlatMarkov,
                (Some(KernelArg::FiniteLy), _) => KernelSpec::FiniteLy { ly: need(ly, "ly")? },
            };
            set_scenario(&mut p, ScenarioConfig::Kernel { kernel: spec });
            (p, n)
        }
        Command::Transfer { source, window } => {
            let (mut p, n) = load(&source)?;
            let scenario = match p.config.scenario.clone() {
                ScenarioConfig::Transfer { window: w, tolerance } => ScenarioConfig::Transfer { window: window.or(w), tolerance },
                _ => ScenarioConfig::Transfer { window, tolerance: hallwave::scenarios::DEFAULT_RELATIVE_TOLERANCE },
            };
            set_scenario(&mut p, scenario);
            (p, n)
        }
        Command::Sweep { kind, source } => {
            let (p, n) = load(&source)?;
            let matches = match (&p.config.scenario, kind) {
                (ScenarioConfig::RevivalMap { .. }, SweepKind::RevivalMap) => true,
                (ScenarioConfig::DisorderSweep { .. }, SweepKind::DisorderSweep) => true,
                _ => false,
            };
            if !matches {
                return Err(format!(
                    "configuration scenario is `{}`; a {kind:?} sweep needs its grid in the [scenario] table",
                    p.config.scenario.name()
                ));
            }
            (p, n)
        }
    };
    let out = cli.out.or_else(|| parsed.config.output.clone()).unwrap_or_else(|| Path::new("runs").join(&name));
    parsed.config.output = None;
    let manifest = run(&parsed, &out, cli.jobs).map_err(|e| e.to_string())?;
    println!("{} run {} -> {} ({:.1} s)", manifest.scenario, manifest.run_id, out.display(), manifest.wall_clock_seconds);
    for f in &manifest.files {
        println!("  {:<20} {:>10} bytes  sha256 {}", f.name, f.bytes, &f.sha256[..16]);
    }
    println!("{}", serde_json::to_string_pretty(&manifest.summary).unwrap_or_default());
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    if manifest.violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &manifest.violations {
            eprintln!("invariant violated: {v}");
        }
        Ok(ExitCode::from(2))
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

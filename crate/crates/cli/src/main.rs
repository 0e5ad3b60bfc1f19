//! `opidyn`: simulate, classify, and analyze opinion dynamics on signed
//! multigraphs from scenario JSON files or bundled presets.
//!
//! Exit codes: 0 on success (for `simulate`: converged or oscillating),
//! 1 on errors including scenario validation failures, 2 when a simulation
//! ends undetermined.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use opidyn::analysis;
use opidyn::dynamics::{simulate, LimitStatus, SimOptions, TieRule, UpdateRule};
use opidyn::equilibria;
use opidyn::graph::{OpinionVector, SignedMultigraph};
use opidyn::scenario::{self, Scenario};
use opidyn::spectral;
use opidyn::spectrum::Opinion;
use opidyn::verify::{run_trials, TrialConfig};

#[derive(Parser)]
#[command(
    name = "opidyn",
    about = "Opinion dynamics on signed multigraphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the updating process and write a trajectory CSV plus a limit
    /// report JSON.
    Simulate(SimulateArgs),
    /// Classify the network's closed groups (polarizes / diverges /
    /// neutral consensus) and print the result as JSON.
    Classify(ScenarioArgs),
    /// Influence weights and long-run prediction for balanced aperiodic
    /// networks; prints the regime otherwise.
    Influence(InfluenceArgs),
    /// Consensus characterization, constructed equilibria, optional
    /// exhaustive fixed-point search and wisdom verdict.
    Equilibria(EquilibriaArgs),
    /// Run the randomized agreement harness and emit its report.
    Verify(VerifyArgs),
    /// List the bundled preset scenarios.
    Presets,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Path to a scenario JSON file, or the name of a bundled preset.
    scenario: String,
    /// Require exact row-stochasticity instead of renormalizing rows that
    /// are off by at most 1e-9.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    /// Pick from the spectrum: averaging on intervals, majority on labels.
    Auto,
    Continuous,
    Discrete,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    /// Keep the current opinion when tied, else lowest label.
    KeepCurrent,
    LowestLabel,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = RuleArg::Auto)]
    rule: RuleArg,
    #[arg(long, value_enum, default_value_t = TieArg::KeepCurrent)]
    tie: TieArg,
    /// Maximum number of steps.
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Convergence tolerance (sup-norm per-step change).
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Directory for the output files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct InfluenceArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Restrict to a group first (comma-separated 1-based agents), e.g.
    /// --group 1,2,3; rows are renormalized over the group.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Args)]
struct EquilibriaArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Exogenous true value for a wisdom verdict: a number on interval
    /// spectra, a label on discrete ones.
    #[arg(long)]
    mu: Option<String>,
    /// Enumerate all discrete fixed points (bounded state space).
    #[arg(long)]
    brute_force: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long, default_value_t = 0xD15C_0BAD)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 0.5)]
    sign_prob: f64,
    /// continuous runs the full property list; discrete restricts to the
    /// discrete limit-set and best-response suites.
    #[arg(long, value_enum, default_value_t = RuleArg::Continuous)]
    rule: RuleArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    if Path::new(arg).exists() {
        let text = std::fs::read_to_string(arg)
            .with_context(|| format!("reading scenario file `{arg}`"))?;
        return Scenario::from_json_str(&text).map_err(Into::into);
    }
    if let Ok(preset) = scenario::load_preset(arg) {
        return Ok(preset);
    }
    bail!(
        "`{arg}` is neither a readable file nor a preset (presets: {})",
        scenario::PRESET_NAMES.join(", ")
    );
}

fn build(args: &ScenarioArgs) -> Result<(Scenario, SignedMultigraph, OpinionVector)> {
    let scenario = load_scenario(&args.scenario)?;
    let (graph, b0) = scenario.build(args.strict)?;
    Ok((scenario, graph, b0))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let (scenario, graph, b0) = build(&args.scenario)?;
    let rule = match args.rule {
        RuleArg::Auto => UpdateRule::default_for(&graph),
        RuleArg::Continuous => UpdateRule::Continuous,
        RuleArg::Discrete => UpdateRule::Discrete(match args.tie {
            TieArg::KeepCurrent => TieRule::KeepCurrent,
            TieArg::LowestLabel => TieRule::LowestLabel,
        }),
    };
    let opts = SimOptions {
        t_max: args.steps,
        tol: args.tol,
        ..SimOptions::default()
    };
    let (trajectory, report) = simulate(&graph, &b0, rule, &opts)?;

    let stem = scenario.name.clone().unwrap_or_else(|| {
        Path::new(&args.scenario.scenario)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".to_string())
    });
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory {:?}", args.out))?;
    let csv_path = args.out.join(format!("{stem}.trajectory.csv"));
    let json_path = args.out.join(format!("{stem}.limit.json"));
    std::fs::write(
        &csv_path,
        scenario::trajectory_to_csv(graph.spectrum(), &trajectory),
    )?;
    let limit_doc = scenario::limit_report_to_json(graph.spectrum(), &report);
    std::fs::write(&json_path, format!("{:#}\n", limit_doc))?;
    println!("{limit_doc:#}");
    eprintln!("wrote {} and {}", csv_path.display(), json_path.display());

    Ok(match report.status {
        LimitStatus::Undetermined { .. } => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    })
}

fn cmd_classify(args: &ScenarioArgs) -> Result<ExitCode> {
    let (_, graph, _) = build(args)?;
    let result = analysis::classify(&graph);
    println!("{:#}", scenario::classification_to_json(&result));
    Ok(ExitCode::SUCCESS)
}

fn parse_group(spec: &str, n: usize) -> Result<Vec<usize>> {
    let mut agents = Vec::new();
    for tok in spec.split(',') {
        let agent: usize = tok
            .trim()
            .parse()
            .map_err(|_| anyhow!("`{tok}` is not an agent number"))?;
        if agent == 0 || agent > n {
            bail!("agent {agent} is out of range 1..={n}");
        }
        let idx = agent - 1;
        if !agents.contains(&idx) {
            agents.push(idx);
        }
    }
    Ok(agents)
}

fn cmd_influence(args: &InfluenceArgs) -> Result<ExitCode> {
    let (_, graph, b0) = build(&args.scenario)?;
    let (graph, b0) = match &args.group {
        None => (graph, b0),
        Some(spec) => {
            let agents = parse_group(spec, graph.n())?;
            let sub = graph.induced_subgraph(&agents)?;
            let sub_b0 = match &b0 {
                OpinionVector::Continuous(v) => {
                    OpinionVector::Continuous(agents.iter().map(|&i| v[i]).collect())
                }
                OpinionVector::Discrete(v) => {
                    OpinionVector::Discrete(agents.iter().map(|&i| v[i]).collect())
                }
            };
            (sub, sub_b0)
        }
    };
    match spectral::influence_report(&graph) {
        Ok(report) => {
            let example = b0.as_continuous().map(|v| v.to_vec());
            println!(
                "{:#}",
                scenario::influence_to_json(graph.spectrum(), &report, example.as_deref())
            );
        }
        Err(opidyn::Error::Regime { condition }) => {
            println!(
                "{:#}",
                json!({
                    "schema_version": 1,
                    "regime": condition,
                    "s": null,
                    "g_signs": null,
                    "example_prediction": null,
                })
            );
        }
        Err(e) => return Err(e.into()),
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_mu(graph: &SignedMultigraph, raw: &str) -> Result<Opinion> {
    if graph.spectrum().is_continuous() {
        let v: f64 = raw.parse().map_err(|_| anyhow!("`{raw}` is not a number"))?;
        Ok(Opinion::Value(v))
    } else {
        graph
            .spectrum()
            .label_index(raw)
            .map(Opinion::Label)
            .ok_or_else(|| anyhow!("`{raw}` is not a spectrum label"))
    }
}

fn cmd_equilibria(args: &EquilibriaArgs) -> Result<ExitCode> {
    let (_, graph, _) = build(&args.scenario)?;
    let rule = UpdateRule::default_for(&graph);

    let (characterization, unavailable) = match equilibria::consensus_fixed_points(&graph, rule) {
        Ok(c) => (Some(c), None),
        Err(opidyn::Error::Unavailable(reason)) => (None, Some(reason)),
        Err(e) => return Err(e.into()),
    };

    let all: Vec<usize> = (0..graph.n()).collect();
    // construct what the certificates admit, using the extreme opinions as
    // opposing viewpoints where the single deviation function allows it
    let extremes = extreme_pair(&graph);
    let polarization = analysis::opposition_bipartition(&graph, &all).and_then(|cert| {
        extremes.and_then(|(x, y)| equilibria::build_polarization(&graph, &cert, x, y).ok())
    });
    let oscillation = analysis::reverse_opposition_bipartition(&graph, &all).and_then(|cert| {
        extremes.and_then(|(x, y)| equilibria::build_oscillation_pair(&graph, &cert, x, y).ok())
    });

    let brute = if args.brute_force {
        Some(equilibria::brute_force_fixed_points(
            &graph,
            TieRule::KeepCurrent,
        )?)
    } else {
        None
    };

    let wisdom = match &args.mu {
        None => None,
        Some(raw) => {
            let mu = parse_mu(&graph, raw)?;
            let verdict = equilibria::wisdom_verdict(&graph, mu, rule)?;
            Some((mu, verdict))
        }
    };

    let doc = scenario::equilibria_to_json(
        graph.spectrum(),
        characterization.as_ref(),
        unavailable.as_deref(),
        polarization.as_ref(),
        oscillation.as_ref(),
        brute.as_deref(),
        wisdom.as_ref().map(|(mu, v)| (mu, *v)),
    );
    println!("{doc:#}");
    Ok(ExitCode::SUCCESS)
}

/// A candidate opposing-viewpoint pair: the spectrum extremes under the
/// network's single deviation function, when they invert to each other.
fn extreme_pair(g: &SignedMultigraph) -> Option<(Opinion, Opinion)> {
    match g.spectrum() {
        opidyn::spectrum::OpinionSpectrum::Interval { lo, hi } => {
            if g.spectrum().is_real_line() {
                Some((Opinion::Value(1.0), Opinion::Value(-1.0)))
            } else {
                Some((Opinion::Value(*hi), Opinion::Value(*lo)))
            }
        }
        opidyn::spectrum::OpinionSpectrum::Discrete { labels } => Some((
            Opinion::Label(labels.len() - 1),
            Opinion::Label(0),
        )),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let config = TrialConfig {
        rule: match args.rule {
            RuleArg::Discrete => UpdateRule::Discrete(TieRule::KeepCurrent),
            _ => UpdateRule::Continuous,
        },
        trials: args.trials,
        n_max: args.n_max,
        seed: args.seed,
        edge_density: args.density,
        sign_probability: args.sign_prob,
        ..TrialConfig::default()
    };
    let report = run_trials(&config);
    let mut doc = serde_json::to_value(&report)?;
    doc.as_object_mut()
        .unwrap()
        .insert("schema_version".into(), json!(1));
    let text = format!("{doc:#}\n");
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text)
                .with_context(|| format!("writing report to {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    let failures: u64 = report.properties.iter().map(|p| p.fail).sum();
    eprintln!(
        "{} properties, {} failures",
        report.properties.len(),
        failures
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Influence(args) => cmd_influence(args),
        Command::Equilibria(args) => cmd_equilibria(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Presets => {
            for name in scenario::PRESET_NAMES {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

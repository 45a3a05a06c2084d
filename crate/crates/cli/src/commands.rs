use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use pbnq::control::{dp_finite_horizon, optctl_via_quotient, stabilize_via_quotient, synthesize_stabilizer};
use pbnq::oracle::{self, Trajectory};
use pbnq::quotient::build_quotient;
use pbnq::relations::{check_lumpability, max_lumpable_refinement, projection_pair, Lumpability};
use pbnq::{Partition, Pbn};

use crate::schema::{
    format_number, from_json, to_canonical_json, Controller, ControllerFile, CostFile, MatrixModel, ModelFile,
    PartitionFile, TargetFile,
};
use crate::{dot, fixtures, CliError, Outcome, EXIT_INFEASIBLE, EXIT_OK};

/// Quotients of probabilistic Boolean networks.
///
/// File arguments accept a path or `@name` for a bundled fixture
/// (example1, example1_partition, example2_seed, example3_costs, lac_operon,
/// lac_stab_target, lac_optctl_costs).
#[derive(Debug, Parser)]
#[command(name = "pbnq", version)]
pub struct Cli {
    /// Numerical tolerance for probability and cost comparisons.
    #[arg(long, global = true, default_value_t = pbnq::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Write the result document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the matrix form of a model.
    Convert {
        #[arg(long = "in")]
        input: String,
    },
    /// Coarsest lumpable partition refining a seed partition.
    Refine {
        #[arg(long)]
        model: String,
        #[arg(long)]
        seed_partition: String,
    },
    /// Quotient model of a lumpable partition.
    Quotient {
        #[arg(long)]
        model: String,
        #[arg(long)]
        partition: String,
        /// Only report whether the partition is lumpable.
        #[arg(long)]
        check_only: bool,
    },
    /// State feedback stabilizing the model to a target set with probability one.
    Stabilize {
        #[arg(long)]
        model: String,
        /// Comma-separated states, a target file, or a fixture.
        #[arg(long)]
        target: String,
        #[arg(long)]
        via_quotient: bool,
    },
    /// Finite-horizon optimal policy.
    Optctl {
        #[arg(long)]
        model: String,
        #[arg(long)]
        costs: String,
        #[arg(long)]
        via_quotient: bool,
    },
    /// Monte-Carlo trajectories as CSV.
    Simulate {
        #[arg(long)]
        model: String,
        /// Controller file; use `--input` for a constant input instead.
        #[arg(long, conflicts_with = "input")]
        controller: Option<String>,
        #[arg(long)]
        input: Option<usize>,
        #[arg(long)]
        x0: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the frequency table of final states instead of trajectories.
        #[arg(long)]
        frequencies: bool,
    },
    /// Graphviz transition diagram of a model or of its quotient.
    ExportDot {
        #[arg(long)]
        model: String,
        #[arg(long)]
        partition: Option<String>,
    },
    /// Print a bundled fixture.
    Fixture { name: String },
}

fn read_source(spec: &str) -> Result<String, CliError> {
    match spec.strip_prefix('@') {
        Some(name) => fixtures::embedded(name)
            .map(str::to_string)
            .ok_or_else(|| CliError::Invalid(format!("unknown fixture `{name}`"))),
        None => fs::read_to_string(spec).map_err(|e| CliError::Invalid(format!("{spec}: {e}"))),
    }
}

fn load_model(spec: &str, tol: f64) -> Result<Pbn, CliError> {
    from_json::<ModelFile>(&read_source(spec)?, "model")?.to_pbn(tol)
}

fn load_partition(spec: &str, n: usize) -> Result<Partition, CliError> {
    let p = from_json::<PartitionFile>(&read_source(spec)?, "partition")?.to_partition()?;
    if p.n_states() != n {
        return Err(CliError::Invalid(format!(
            "partition covers {} states, model has {n}",
            p.n_states()
        )));
    }
    Ok(p)
}

fn load_target(spec: &str, n: usize) -> Result<Vec<usize>, CliError> {
    let inline = !spec.is_empty() && spec.chars().all(|c| c.is_ascii_digit() || c == ',' || c == ' ');
    let target = if inline {
        spec.split(',')
            .map(|t| t.trim().parse().map_err(|_| CliError::Invalid(format!("bad target `{spec}`"))))
            .collect::<Result<Vec<usize>, _>>()?
    } else {
        let f: TargetFile = from_json(&read_source(spec)?, "target")?;
        if f.n_states != n {
            return Err(CliError::Invalid(format!("target is for {} states, model has {n}", f.n_states)));
        }
        f.target
    };
    if let Some(&x) = target.iter().find(|&&x| x == 0 || x > n) {
        return Err(CliError::Invalid(format!("target state {x} outside 1..={n}")));
    }
    Ok(target)
}

/// Sorted states with runs collapsed, e.g. `1-3,7`.
fn compress(states: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut j = i;
        while j + 1 < states.len() && states[j + 1] == states[j] + 1 {
            j += 1;
        }
        parts.push(match j - i {
            0 => states[i].to_string(),
            1 => format!("{},{}", states[i], states[j]),
            _ => format!("{}-{}", states[i], states[j]),
        });
        i = j + 1;
    }
    parts.join(",")
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = cli.tol;
    match &cli.command {
        Command::Convert { input } => {
            let pbn = load_model(input, tol)?;
            let doc = to_canonical_json(&ModelFile::Matrix(MatrixModel::from_pbn(&pbn, None)));
            Ok(Outcome::ok(
                doc,
                format!("{} states, {} inputs, {} constituents", pbn.n_states(), pbn.n_inputs(), pbn.constituents().len()),
            ))
        }
        Command::Refine { model, seed_partition } => {
            let pbn = load_model(model, tol)?;
            let seed = load_partition(seed_partition, pbn.n_states())?;
            let r = max_lumpable_refinement(pbn.transition(), &seed, tol)?;
            Ok(Outcome::ok(
                to_canonical_json(&PartitionFile::from_partition(&r.partition, Some(r.fixpoint_index()))),
                format!("{} blocks after {} iterations", r.partition.block_count(), r.fixpoint_index()),
            ))
        }
        Command::Quotient {
            model,
            partition,
            check_only,
        } => {
            let pbn = load_model(model, tol)?;
            let part = load_partition(partition, pbn.n_states())?;
            if *check_only {
                return Ok(match check_lumpability(pbn.transition(), &part, tol)? {
                    Lumpability::Holds => Outcome {
                        document: None,
                        summary: "lumpable".into(),
                        code: EXIT_OK,
                    },
                    Lumpability::Violated(cx) => Outcome {
                        document: None,
                        summary: format!("not lumpable: {cx}"),
                        code: EXIT_INFEASIBLE,
                    },
                });
            }
            let q = build_quotient(pbn.transition(), &projection_pair(&part), tol)?;
            let qpbn = Pbn::from_matrix(q.transition().clone(), tol)?;
            Ok(Outcome::ok(
                to_canonical_json(&ModelFile::Matrix(MatrixModel::from_pbn(&qpbn, Some(&part)))),
                format!("{} blocks", q.size()),
            ))
        }
        Command::Stabilize {
            model,
            target,
            via_quotient,
        } => {
            let pbn = load_model(model, tol)?;
            let target = load_target(target, pbn.n_states())?;
            let (feedback, mut summary) = if *via_quotient {
                let out = stabilize_via_quotient(pbn.transition(), &target, tol)?;
                (out.feedback, format!("quotient blocks: {}\n", out.partition.block_count()))
            } else {
                (synthesize_stabilizer(pbn.transition(), &target, tol)?.feedback, String::new())
            };
            Ok(match feedback {
                Some(fb) => {
                    summary.push_str("stabilizable: true");
                    for u in 1..=fb.n_inputs() {
                        summary.push_str(&format!("\ninput {u} at states: {}", compress(&fb.states_with_input(u))));
                    }
                    Outcome::ok(to_canonical_json(&ControllerFile::from_feedback(&fb)), summary)
                }
                None => Outcome {
                    document: None,
                    summary: summary + "stabilizable: false",
                    code: EXIT_INFEASIBLE,
                },
            })
        }
        Command::Optctl {
            model,
            costs,
            via_quotient,
        } => {
            let pbn = load_model(model, tol)?;
            let spec = from_json::<CostFile>(&read_source(costs)?, "costs")?.to_spec()?;
            let (policy, cost, mut summary) = if *via_quotient {
                let out = optctl_via_quotient(pbn.transition(), &spec, tol)?;
                let s = format!("quotient blocks: {}\n", out.partition.block_count());
                (out.policy, out.cost, s)
            } else {
                let sol = dp_finite_horizon(pbn.transition(), &spec, tol)?;
                let cost = sol.value(0, spec.x0());
                (sol.policy, cost, String::new())
            };
            summary.push_str(&format!("optimal cost: {}", format_number(cost)));
            if let Some(u) = policy.constant_input() {
                summary.push_str(&format!("\nconstant input: {u}"));
            }
            Ok(Outcome::ok(to_canonical_json(&ControllerFile::from_policy(&policy, Some(cost))), summary))
        }
        Command::Simulate {
            model,
            controller,
            input,
            x0,
            steps,
            runs,
            seed,
            frequencies,
        } => {
            let pbn = load_model(model, tol)?;
            let ctl = match (controller, input) {
                (Some(spec), None) => match from_json::<ControllerFile>(&read_source(spec)?, "controller")?.to_controller()? {
                    Controller::Static(fb) => oracle::Controller::Feedback(fb),
                    Controller::Policy(p) => oracle::Controller::Policy(p),
                },
                (None, Some(u)) => oracle::Controller::Constant(*u),
                _ => return Err(CliError::Invalid("give either --controller or --input".into())),
            };
            let trs = oracle::simulate_runs(&pbn, &ctl, *x0, *steps, *runs, *seed)?;
            let doc = if *frequencies {
                frequency_csv(&trs, pbn.n_states())?
            } else {
                trajectory_csv(&trs)?
            };
            Ok(Outcome::ok(doc, format!("{runs} runs of {steps} steps, seed {seed}")))
        }
        Command::ExportDot { model, partition } => {
            let pbn = load_model(model, tol)?;
            let p = match partition {
                Some(spec) => {
                    let part = load_partition(spec, pbn.n_states())?;
                    build_quotient(pbn.transition(), &projection_pair(&part), tol)?
                        .transition()
                        .clone()
                }
                None => pbn.transition().clone(),
            };
            Ok(Outcome::ok(dot::export_dot(&p)?, format!("{} nodes", p.rows())))
        }
        Command::Fixture { name } => fixtures::embedded(name)
            .map(|text| Outcome::ok(text.to_string(), format!("fixture {name}")))
            .ok_or_else(|| CliError::Invalid(format!("unknown fixture `{name}`"))),
    }
}

/// Columns `run,t,state,input,theta`; the final state of each run has empty
/// input and theta.
pub fn trajectory_csv(trs: &[Trajectory]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["run", "t", "state", "input", "theta"])?;
    for tr in trs {
        for (t, x) in tr.states.iter().enumerate() {
            let (u, th) = match (tr.inputs.get(t), tr.thetas.get(t)) {
                (Some(u), Some(th)) => (u.to_string(), th.to_string()),
                _ => (String::new(), String::new()),
            };
            w.write_record([tr.run.to_string(), t.to_string(), x.to_string(), u, th])?;
        }
    }
    String::from_utf8(w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))?)
        .map_err(|e| CliError::Invalid(e.to_string()))
}

/// Columns `state,count,frequency` over the final states of all runs.
pub fn frequency_csv(trs: &[Trajectory], n: usize) -> Result<String, CliError> {
    let mut counts = vec![0u64; n];
    for tr in trs {
        counts[tr.states.last().expect("nonempty") - 1] += 1;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["state", "count", "frequency"])?;
    for (x, &c) in counts.iter().enumerate() {
        if c > 0 {
            let f = c as f64 / trs.len() as f64;
            w.write_record([(x + 1).to_string(), c.to_string(), format_number(f)])?;
        }
    }
    String::from_utf8(w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))?)
        .map_err(|e| CliError::Invalid(e.to_string()))
}

/// Parses arguments as the binary would; used by tests.
pub fn run_args<I, T>(args: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Invalid(e.to_string()))?;
    run(&cli)
}

//! Command-line front end. Results are JSON on the output stream; the exit
//! code reports the answer or the kind of failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::demo::{build_language_demo, build_tm_config_graph, Instance, TmDescription};
use crate::epistemic::{eval_foel, iterate_update, ActionJson, ActionModel, EpistemicModel, ModelJson};
use crate::error::{Error, Result};
use crate::logic::parse_formula;
use crate::planner::{bfs_plan, class_quotient, decide_plan, solution_automaton, Answer, PlanResult, Quotient};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_FRAGMENT: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;
pub const EXIT_INPUT: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "epp", version, about = "First-order epistemic planning over automatic structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a formula at a world.
    Check {
        model: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long)]
        formula: String,
    },
    /// Apply the action model n times and write the result.
    Update {
        model: PathBuf,
        action: PathBuf,
        #[arg(short, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the interpretation classes of all histories.
    Classes {
        model: PathBuf,
        action: PathBuf,
        #[arg(long, default_value_t = crate::planner::DEFAULT_CLASS_CAP)]
        cap: usize,
    },
    /// Search for a plan reaching a goal.
    Plan {
        model: PathBuf,
        action: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long)]
        goal: String,
        #[command(flatten)]
        method: Method,
    },
    /// Write the automaton of all plans reaching a goal.
    Solutions {
        model: PathBuf,
        action: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Built-in instances.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Method {
    /// Use the decision procedure (quantifier-free post-conditions).
    #[arg(long, conflicts_with = "bfs")]
    pub decide: bool,
    /// Use bounded breadth-first search.
    #[arg(long)]
    pub bfs: bool,
    #[arg(long, default_value_t = 6)]
    pub max_depth: usize,
}

#[derive(Subcommand, Debug)]
pub enum Demo {
    /// Build a target language from generators by union and complement.
    Lang {
        #[arg(long, value_delimiter = ',')]
        generators: Vec<String>,
        #[arg(long)]
        target: String,
        /// Also offer concatenation with each generator.
        #[arg(long)]
        concat: bool,
        #[arg(long, value_delimiter = ',')]
        alphabet: Option<Vec<String>>,
        #[command(flatten)]
        method: Method,
        /// Write model.json and action.json to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reachability of acceptance in a Turing machine configuration graph.
    Tm {
        machine: PathBuf,
        #[arg(long, default_value_t = 5)]
        bfs_depth: usize,
        #[arg(long)]
        decide: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Fragment(_) => EXIT_FRAGMENT,
        Error::StateCap(_) | Error::ClassCap(_) => EXIT_RESOURCE,
        _ => EXIT_INPUT,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn json_err(path: &Path, e: serde_json::Error) -> Error {
    Error::Input(format!("{}: {e}", path.display()))
}

pub fn load_model(path: &Path) -> Result<EpistemicModel> {
    let j: ModelJson = serde_json::from_str(&read(path)?).map_err(|e| json_err(path, e))?;
    j.to_model()
}

pub fn load_action(path: &Path, model: &EpistemicModel) -> Result<ActionModel> {
    let j: ActionJson = serde_json::from_str(&read(path)?).map_err(|e| json_err(path, e))?;
    j.to_action(model)
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn save_instance(dir: &Path, inst: &Instance) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
    write(&dir.join("model.json"), &pretty(&ModelJson::from(&inst.model)))?;
    write(&dir.join("action.json"), &pretty(&ActionJson::from(&inst.action)))
}

fn answer_code(r: &PlanResult) -> i32 {
    match r.answer {
        Answer::Yes => EXIT_YES,
        Answer::No => EXIT_NO,
        Answer::Unknown => EXIT_UNKNOWN,
    }
}

fn plan(inst: &Instance, world: usize, method: &Method) -> Result<PlanResult> {
    if method.bfs {
        bfs_plan(&inst.model, world, &inst.action, &inst.goal, method.max_depth)
    } else {
        decide_plan(&inst.model, world, &inst.action, &inst.goal)
    }
}

/// Runs a command, writing its JSON result to `out`. Returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let mut emit = |s: String| writeln!(out, "{s}").map_err(|e| Error::Input(e.to_string()));
    match cli.command {
        Command::Check { model, world, formula } => {
            let m = load_model(&model)?;
            let w = m.world_index(&world)?;
            let phi = parse_formula(&formula, &m.signature)?;
            let holds = eval_foel(&m, w, &phi, &Default::default())?;
            emit(pretty(&json!({"world": world, "formula": phi.to_string(), "holds": holds})))?;
            Ok(if holds { EXIT_YES } else { EXIT_NO })
        }
        Command::Update { model, action, n, out: dir } => {
            let m = load_model(&model)?;
            let a = load_action(&action, &m)?;
            let updated = iterate_update(&m, &a, n)?;
            std::fs::create_dir_all(&dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
            let path = dir.join("model.json");
            write(&path, &pretty(&ModelJson::from(&updated)))?;
            emit(pretty(&json!({"worlds": updated.worlds, "out": path})))?;
            Ok(EXIT_YES)
        }
        Command::Classes { model, action, cap } => {
            let m = load_model(&model)?;
            let a = load_action(&action, &m)?;
            match class_quotient(&m, &a, cap)? {
                Quotient::Complete(ca) => {
                    let initial: serde_json::Map<String, serde_json::Value> =
                        ca.worlds.iter().zip(&ca.initial).map(|(w, &c)| (w.clone(), json!(c))).collect();
                    let delta: Vec<serde_json::Map<String, serde_json::Value>> = ca
                        .delta
                        .iter()
                        .map(|row| ca.events.iter().zip(row).map(|(e, t)| (e.clone(), json!(t))).collect())
                        .collect();
                    emit(pretty(&json!({
                        "status": "complete",
                        "classes": ca.classes.len(),
                        "initial": initial,
                        "delta": delta,
                    })))?;
                    Ok(EXIT_YES)
                }
                Quotient::CapExceeded { classes } => {
                    emit(pretty(&json!({"status": "cap-exceeded", "classes": classes})))?;
                    Ok(EXIT_RESOURCE)
                }
            }
        }
        Command::Plan { model, action, world, goal, method } => {
            let m = load_model(&model)?;
            let a = load_action(&action, &m)?;
            let w = m.world_index(&world)?;
            let goal = parse_formula(&goal, &m.signature)?;
            let inst = Instance { model: m, action: a, goal };
            let r = plan(&inst, w, &method)?;
            emit(pretty(&r))?;
            Ok(answer_code(&r))
        }
        Command::Solutions { model, action, world, goal, out: file } => {
            let m = load_model(&model)?;
            let a = load_action(&action, &m)?;
            let w = m.world_index(&world)?;
            let goal = parse_formula(&goal, &m.signature)?;
            let sol = solution_automaton(&m, w, &a, &goal)?;
            write(&file, &pretty(&sol.to_json()))?;
            emit(pretty(&json!({"states": sol.num_states(), "empty": sol.is_empty(), "out": file})))?;
            Ok(if sol.is_empty() { EXIT_NO } else { EXIT_YES })
        }
        Command::Demo { demo: Demo::Lang { generators, target, concat, alphabet, method, out: dir } } => {
            let gens: Vec<&str> = generators.iter().map(String::as_str).collect();
            let inst = build_language_demo(&gens, &target, concat, alphabet)?;
            if let Some(dir) = dir {
                save_instance(&dir, &inst)?;
            }
            let mut method = method;
            if concat && !method.decide {
                method.bfs = true;
            }
            let r = plan(&inst, 0, &method)?;
            emit(pretty(&r))?;
            Ok(answer_code(&r))
        }
        Command::Demo { demo: Demo::Tm { machine, bfs_depth, decide, out: dir } } => {
            let desc: TmDescription = serde_json::from_str(&read(&machine)?).map_err(|e| json_err(&machine, e))?;
            let inst = build_tm_config_graph(&desc)?;
            if let Some(dir) = dir {
                save_instance(&dir, &inst)?;
            }
            let method = Method {
                decide,
                bfs: !decide,
                max_depth: bfs_depth,
            };
            let r = plan(&inst, 0, &method)?;
            emit(pretty(&r))?;
            Ok(answer_code(&r))
        }
    }
}

/// Parses arguments, runs, and reports errors on stderr.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(out, "{e}");
            return EXIT_YES;
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

//! `dagtrail`: d-separation, activated trails, active cycles and the
//! verification suite from the command line.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dagtrail::decompose::{decompose, ActivationWitness};
use dagtrail::dsep::validate_query;
use dagtrail::io::{parse_graph, parse_node_list, Format, IoError};
use dagtrail::order::keyed_trails;
use dagtrail::structure::{decompose_local, local_violation};
use dagtrail::trail::{Conditioning, ConnectionKind};
use dagtrail::verify::{self, CheckConfig, GenMode, GenSpec};
use dagtrail::{d_separated, find_active_cycles, minimal_trails, Dag, NodeSet, QueryError, Trail, TrailKey};

const EXIT_NOT_SEPARATED: u8 = 10;
const EXIT_CYCLE_FOUND: u8 = 11;
const EXIT_CHECK_FAILED: u8 = 12;
const EXIT_NOT_LOCAL: u8 = 13;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_NO_INPUT: u8 = 66;

/// Blocking details are listed for at most this many trails.
const BLOCKING_SHOWN: usize = 20;

#[derive(Parser)]
#[command(name = "dagtrail", version, about = "Trails and d-separation in DAGs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Output::Text)]
    output: Output,
    /// Graph input format; guessed from the extension or content if absent.
    #[arg(long, value_enum, global = true)]
    format: Option<InputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Json,
    Dot,
}

#[derive(clap::Args)]
struct Query {
    /// Comma-separated labels.
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Comma-separated labels; "" for the empty set.
    #[arg(long, default_value = "")]
    z: String,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a graph and report its size and a topological order.
    Validate { graph: PathBuf },
    /// Decide whether X and Y are d-separated by Z.
    Dsep {
        graph: PathBuf,
        #[command(flatten)]
        query: Query,
    },
    /// List the trails between X and Y activated by Z, with their keys.
    Trails {
        graph: PathBuf,
        #[command(flatten)]
        query: Query,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// The minimal activated trails and their decompositions.
    Minimal {
        graph: PathBuf,
        #[command(flatten)]
        query: Query,
    },
    /// Search for active cycles.
    Cycles {
        graph: PathBuf,
        /// Report every active cycle instead of the first.
        #[arg(long)]
        all: bool,
    },
    /// Test whether a node set has local relationships.
    Localrel {
        graph: PathBuf,
        #[arg(long)]
        k: String,
        /// Also print the partition into connected, d-separated blocks.
        #[arg(long)]
        decompose: bool,
    },
    /// Run the verification suite over generated graphs.
    Verify {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Comma-separated check names; all checks by default.
        #[arg(long)]
        checks: Option<String>,
        /// Drop generated graphs that contain an active cycle.
        #[arg(long)]
        require_no_active_cycle: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl std::fmt::Display) -> Failure {
        Failure {
            code: EXIT_DATA,
            message: message.to_string(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::data(e)
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        Failure::data(e)
    }
}

/// What a command produced: the JSON form, the text form and the exit code.
struct Report {
    json: Value,
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let output = cli.output;
    match run(cli) {
        Ok(r) => {
            let body = match output {
                Output::Json => serde_json::to_string_pretty(&r.json).unwrap() + "\n",
                Output::Text => r.text,
            };
            // a closed pipe (`| head`) is not an error
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::from(r.code)
        }
        Err(f) => {
            if output == Output::Json {
                println!("{}", json!({ "error": f.message, "exit_code": f.code }));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path, format: Option<InputFormat>) -> Result<Dag, Failure> {
    let mut bytes = Vec::new();
    let read = if path == Path::new("-") {
        std::io::stdin().read_to_end(&mut bytes).map(|_| ())
    } else {
        std::fs::read(path).map(|b| bytes = b)
    };
    read.map_err(|e| Failure {
        code: EXIT_NO_INPUT,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let fmt = match format {
        Some(InputFormat::Json) => Format::Json,
        Some(InputFormat::Dot) => Format::Dot,
        None => Format::detect(Some(path), &bytes),
    };
    Ok(parse_graph(&bytes, fmt)?)
}

fn sets(d: &Dag, q: &Query) -> Result<(NodeSet, NodeSet, NodeSet), Failure> {
    let (x, y, z) = (
        parse_node_list(d, &q.x)?,
        parse_node_list(d, &q.y)?,
        parse_node_list(d, &q.z)?,
    );
    validate_query(d, &x, &y, &z)?;
    Ok((x, y, z))
}

fn names(d: &Dag, s: &NodeSet) -> Vec<String> {
    s.iter().map(|v| d.label(v)).collect()
}

fn braces(d: &Dag, s: &NodeSet) -> String {
    format!("{{{}}}", names(d, s).join(", "))
}

fn key_json(k: &TrailKey) -> Value {
    let (a, b, c, e) = k.as_tuple();
    json!([a, b, c, e])
}

fn key_text(k: &TrailKey) -> String {
    format!("{:?}", k.as_tuple())
}

fn run(cli: Cli) -> Result<Report, Failure> {
    let fmt = cli.format;
    match cli.command {
        Command::Validate { graph } => validate(&load(&graph, fmt)?),
        Command::Dsep { graph, query } => {
            let d = load(&graph, fmt)?;
            let (x, y, z) = sets(&d, &query)?;
            dsep(&d, &x, &y, &z)
        }
        Command::Trails { graph, query, limit } => {
            let d = load(&graph, fmt)?;
            let (x, y, z) = sets(&d, &query)?;
            trails(&d, &x, &y, &z, limit)
        }
        Command::Minimal { graph, query } => {
            let d = load(&graph, fmt)?;
            let (x, y, z) = sets(&d, &query)?;
            minimal(&d, &x, &y, &z)
        }
        Command::Cycles { graph, all } => cycles(&load(&graph, fmt)?, all),
        Command::Localrel { graph, k, decompose } => {
            let d = load(&graph, fmt)?;
            let k = parse_node_list(&d, &k)?;
            localrel(&d, &k, decompose)
        }
        Command::Verify {
            mode,
            n,
            p,
            seed,
            count,
            checks,
            require_no_active_cycle,
        } => {
            let spec = GenSpec {
                mode: match mode {
                    Mode::Exhaustive => GenMode::Exhaustive { n },
                    Mode::Random => GenMode::Random { n, p, seed, count },
                },
                require_no_active_cycle,
            };
            let names: Vec<String> = match checks {
                Some(list) => list
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect(),
                None => verify::all_checks().into_iter().map(String::from).collect(),
            };
            run_verify(&spec, &names)
        }
    }
}

fn validate(d: &Dag) -> Result<Report, Failure> {
    let order: Vec<String> = d.topological_order().into_iter().map(|v| d.label(v)).collect();
    Ok(Report {
        text: format!(
            "nodes: {}\narcs: {}\ntopological order: {}\n",
            d.node_count(),
            d.arc_count(),
            order.join(" ")
        ),
        json: json!({
            "nodes": d.node_count(),
            "arcs": d.arc_count(),
            "topological_order": order,
        }),
        code: 0,
    })
}

/// The first interior position blocking `t`, with the reason.
fn blocking(cond: &Conditioning, t: &Trail) -> Option<(usize, &'static str)> {
    (1..t.len() - 1).find_map(|i| {
        let v = t.nodes()[i];
        match t.connection_at(i) {
            ConnectionKind::Converging if !cond.opens_collider(v) => {
                Some((i, "converging node with no descendant in Z"))
            }
            ConnectionKind::Converging => None,
            _ if cond.set().contains(v) => Some((i, "non-converging node in Z")),
            _ => None,
        }
    })
}

fn dsep(d: &Dag, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> Result<Report, Failure> {
    let separated = d_separated(d, x, y, z)?;
    let cond = Conditioning::new(d, z);
    let mut witness = None;
    let mut blocked = Vec::new();
    'pairs: for a in x.iter() {
        for b in y.iter() {
            for t in dagtrail::enumerate_trails(d, a, b) {
                match blocking(&cond, &t) {
                    None if witness.is_none() => {
                        witness = Some(t.render(d));
                        if !separated {
                            break 'pairs;
                        }
                    }
                    None => {}
                    Some((i, why)) if blocked.len() < BLOCKING_SHOWN => {
                        blocked.push((t.render(d), d.label(t.nodes()[i]), why));
                    }
                    Some(_) => {}
                }
                if separated && blocked.len() >= BLOCKING_SHOWN {
                    break 'pairs;
                }
            }
        }
    }
    let mut text = format!(
        "{separated}\n{} and {} are {}d-separated by {}\n",
        braces(d, x),
        braces(d, y),
        if separated { "" } else { "not " },
        braces(d, z)
    );
    if let Some(w) = &witness {
        text.push_str(&format!("activated trail: {w}\n"));
    }
    if separated {
        if blocked.is_empty() {
            text.push_str("no trail joins X and Y\n");
        }
        for (t, v, why) in &blocked {
            text.push_str(&format!("blocked at {v} ({why}): {t}\n"));
        }
    }
    Ok(Report {
        json: json!({
            "separated": separated,
            "x": names(d, x),
            "y": names(d, y),
            "z": names(d, z),
            "witness": witness,
            "blocking": if separated {
                blocked
                    .iter()
                    .map(|(t, v, why)| json!({ "trail": t, "node": v, "reason": why }))
                    .collect::<Vec<_>>()
            } else {
                Vec::new()
            },
        }),
        text,
        code: if separated { 0 } else { EXIT_NOT_SEPARATED },
    })
}

fn trails(d: &Dag, x: &NodeSet, y: &NodeSet, z: &NodeSet, limit: Option<usize>) -> Result<Report, Failure> {
    let all = keyed_trails(d, x, y, z)?;
    let shown = &all[..limit.unwrap_or(all.len()).min(all.len())];
    let mut text = format!("{} activated trail(s)\n", all.len());
    for (t, k) in shown {
        text.push_str(&format!("{}  key {}\n", t.render(d), key_text(k)));
    }
    Ok(Report {
        json: json!({
            "count": all.len(),
            "trails": shown
                .iter()
                .map(|(t, k)| json!({ "trail": t.render(d), "key": key_json(k) }))
                .collect::<Vec<_>>(),
        }),
        text,
        code: 0,
    })
}

fn minimal(d: &Dag, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> Result<Report, Failure> {
    let m = minimal_trails(d, x, y, z)?;
    let Some(min_key) = m.min_key else {
        return Ok(Report {
            json: json!({ "min_key": null, "minimizers": [] }),
            text: "no activated trail: X and Y are d-separated by Z\n".into(),
            code: 0,
        });
    };
    let mut text = format!("min key {}\n{} minimizer(s)\n", key_text(&min_key), m.minimizers.len());
    let mut items = Vec::new();
    for t in &m.minimizers {
        let dec = decompose(d, t, z)?;
        text.push_str(&format!("{}\n  C = {}\n", t.render(d), dec.count()));
        let mut witnesses = Vec::new();
        for (c, w) in dec.converging.iter().zip(&dec.witnesses) {
            match w {
                ActivationWitness::InZ => {
                    text.push_str(&format!("  {}: in Z\n", d.label(*c)));
                    witnesses.push(json!({ "node": d.label(*c), "kind": "InZ" }));
                }
                ActivationWitness::ViaDescendant(p) => {
                    let path: Vec<String> = p.nodes().into_iter().map(|v| d.label(v)).collect();
                    let path = path.join(" -> ");
                    text.push_str(&format!("  {}: via descendant {}\n", d.label(*c), path));
                    witnesses.push(json!({
                        "node": d.label(*c),
                        "kind": "ViaDescendant",
                        "path": path,
                        "target": d.label(p.target),
                    }));
                }
            }
        }
        let subtrails: Vec<String> = dec.subtrails.iter().map(|s| s.render(d)).collect();
        text.push_str(&format!("  subtrails: {}\n", subtrails.join(" | ")));
        items.push(json!({
            "trail": t.render(d),
            "key": key_json(&min_key),
            "converging": dec.converging.iter().map(|&c| d.label(c)).collect::<Vec<_>>(),
            "witnesses": witnesses,
            "subtrails": subtrails,
        }));
    }
    Ok(Report {
        json: json!({ "min_key": key_json(&min_key), "minimizers": items }),
        text,
        code: 0,
    })
}

fn cycles(d: &Dag, all: bool) -> Result<Report, Failure> {
    let found = find_active_cycles(d, !all);
    let mut text = if found.is_empty() {
        "no active cycle\n".to_string()
    } else {
        String::new()
    };
    for c in &found {
        text.push_str(&format!("{}\n", c.render(d)));
    }
    Ok(Report {
        json: json!({
            "found": !found.is_empty(),
            "cycles": found
                .iter()
                .map(|c| json!({
                    "apex": d.label(c.apex),
                    "parents": [d.label(c.left_parent), d.label(c.right_parent)],
                    "cycle": c.render(d),
                }))
                .collect::<Vec<_>>(),
        }),
        text,
        code: if found.is_empty() { 0 } else { EXIT_CYCLE_FOUND },
    })
}

fn localrel(d: &Dag, k: &NodeSet, want_partition: bool) -> Result<Report, Failure> {
    if k.is_empty() {
        return Err(Failure::data("K must be nonempty"));
    }
    match local_violation(d, k) {
        Some(w) => Ok(Report {
            text: format!(
                "false\n{} and {} are not adjacent but joined by {}\n",
                d.label(w.v1),
                d.label(w.v2),
                w.trail.render(d)
            ),
            json: json!({
                "local": false,
                "witness": {
                    "v1": d.label(w.v1),
                    "v2": d.label(w.v2),
                    "trail": w.trail.render(d),
                },
            }),
            code: EXIT_NOT_LOCAL,
        }),
        None => {
            let mut text = "true\n".to_string();
            let mut json = json!({ "local": true, "witness": null });
            if want_partition {
                let p = decompose_local(d, k)?;
                let blocks: Vec<Vec<String>> = p.blocks.iter().map(|b| names(d, b)).collect();
                for b in &p.blocks {
                    text.push_str(&format!("block {}\n", braces(d, b)));
                }
                json["partition"] = json!(blocks);
            }
            Ok(Report { json, text, code: 0 })
        }
    }
}

fn run_verify(spec: &GenSpec, names: &[String]) -> Result<Report, Failure> {
    let reports = verify::run_suite(spec, names, &CheckConfig::default()).map_err(|e| match e {
        verify::VerifyError::Graph(_) => Failure::data(e),
        _ => Failure::usage(e.to_string()),
    })?;
    let passed = reports.iter().all(|r| r.passed());
    let mut text = String::new();
    for r in &reports {
        text.push_str(&r.summary_line());
        text.push('\n');
        for f in &r.failures {
            text.push_str(&format!(
                "  graph #{} {}  query {}  violated: {}\n",
                f.graph_serial,
                serde_json::to_string(&f.graph).unwrap(),
                f.query,
                f.clause
            ));
        }
    }
    text.push_str(if passed { "all checks passed\n" } else { "FAILURES FOUND\n" });
    Ok(Report {
        json: json!({
            "spec": spec,
            "passed": passed,
            "reports": reports,
        }),
        text,
        code: if passed { 0 } else { EXIT_CHECK_FAILED },
    })
}

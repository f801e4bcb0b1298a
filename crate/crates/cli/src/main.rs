use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use homcirc::circuit::{self, Repr};
use homcirc::compile::compile_td_with_stats;
use homcirc::flows::{flow_from_json, mu_of_flow};
use homcirc::harness::{emit_report, run_subw_experiment, run_tw_experiment, ExperimentConfig};
use homcirc::instgen::flowgen::check_flow_structure;
use homcirc::instgen::{gen_flow_structure, gen_hard_graph};
use homcirc::rational;
use homcirc::rect::{cover_summary, extract_cover_repr, rectangle_bound_check, verify_cover, WeightFunction};
use homcirc::relcore::{graph_structure, hypergraph_of, Structure};
use homcirc::widths::{fhtw_of_td, frac_edge_cover_number, largest_hcs, treewidth_exact, TreeDecomposition};

#[derive(Parser)]
#[command(name = "homcirc", about = "Union/product circuits for homomorphism sets", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Treewidth, fractional edge cover number and fhtw of a query.
    Widths {
        #[arg(long)]
        structure: PathBuf,
        /// Decomposition to evaluate; an optimal-treewidth one is used otherwise.
        #[arg(long)]
        td: Option<PathBuf>,
    },
    /// Circuit file utilities.
    Circuit {
        #[command(subcommand)]
        op: CircuitOp,
    },
    /// Compile a query and database along a tree decomposition.
    Compile {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        td: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Extract and verify a balanced rectangle cover.
    Cover {
        #[arg(long)]
        circuit: PathBuf,
        /// JSON map from variable name to weight.
        #[arg(long)]
        weights: PathBuf,
        /// Also check rectangles against the hard-graph bound; needs --graph and --n.
        #[arg(long)]
        check_bound: bool,
        /// Pattern graph whose vertices are the circuit variables.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random hard graph with certificates.
    GenHard {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        retries: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Flow-induced random structure with certificates.
    GenFlow {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        flow: PathBuf,
        #[arg(long = "N")]
        big_n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        retries: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment pipeline.
    Experiment {
        kind: ExperimentKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CircuitOp {
    Validate { file: PathBuf },
    /// Print every computed function as a JSON object per line.
    Eval { file: PathBuf },
    /// Count by the deterministic formula after checking determinism.
    Count { file: PathBuf },
    Smooth {
        file: PathBuf,
        /// JSON map from variable to its values; all circuit values otherwise.
        #[arg(long)]
        domains: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    Fanin2 {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Tw,
    Subw,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_circuit(path: &Path) -> Result<Repr> {
    Ok(circuit::parse(&read(path)?)?)
}

fn need_circuit(r: &Repr) -> Result<&circuit::Circuit> {
    r.circuit().context("the file holds the empty representation")
}

fn widths(structure: &Path, td: Option<&Path>) -> Result<Value> {
    let a = Structure::load(structure)?;
    let h = hypergraph_of(&a);
    let (tw, opt) = treewidth_exact(&h)?;
    let all: Vec<usize> = (0..h.num_vertices()).collect();
    let rho = frac_edge_cover_number(&h, &all)?;
    let td = match td {
        Some(p) => TreeDecomposition::load(p, &h)?,
        None => opt,
    };
    Ok(json!({
        "treewidth": tw,
        "rho_star": rational::fmt(&rho.value),
        "fhtw_of_td": rational::fmt(&fhtw_of_td(&h, &td)?),
        "td_width": td.width(),
    }))
}

fn circuit_op(op: CircuitOp) -> Result<()> {
    match op {
        CircuitOp::Validate { file } => {
            let r = load_circuit(&file)?;
            let Some(c) = r.circuit() else {
                println!("OK (empty)");
                return Ok(());
            };
            let rep = circuit::validate_circuit(c);
            println!("{rep}");
            if !rep.is_ok() {
                bail!("circuit is invalid");
            }
        }
        CircuitOp::Eval { file } => {
            let r = load_circuit(&file)?;
            if let Some(c) = r.circuit() {
                let f = circuit::eval_circuit(c)?;
                let mut out = std::io::stdout().lock();
                for row in &f.rows {
                    let m: BTreeMap<&str, &str> =
                        f.vars.iter().zip(row).map(|(&x, &d)| (c.vars()[x].as_str(), c.values()[d].as_str())).collect();
                    match writeln!(out, "{}", serde_json::to_string(&m)?) {
                        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => break,
                        r => r?,
                    }
                }
            }
        }
        CircuitOp::Count { file } => {
            let r = load_circuit(&file)?;
            match r.circuit() {
                Some(c) => println!("{}", circuit::count_checked(c)?),
                None => println!("0"),
            }
        }
        CircuitOp::Smooth { file, domains, out } => {
            let r = load_circuit(&file)?;
            let c = need_circuit(&r)?;
            let doms: BTreeMap<String, Vec<String>> = match domains {
                Some(p) => serde_json::from_str(&read(&p)?)?,
                None => c.vars().iter().map(|v| (v.clone(), c.values().to_vec())).collect(),
            };
            write(&out, &circuit::serialize(&Repr::Circuit(circuit::smooth(c, &doms)?)))?;
        }
        CircuitOp::Fanin2 { file, out } => {
            let r = load_circuit(&file)?;
            let c = need_circuit(&r)?;
            write(&out, &circuit::serialize(&Repr::Circuit(circuit::to_fanin2(c))))?;
        }
    }
    Ok(())
}

fn compile(structure: &Path, data: &Path, td: &Path, out: &Path, stats: Option<&Path>) -> Result<()> {
    let a = Structure::load(structure)?;
    let b = Structure::load(data)?;
    let td = TreeDecomposition::load(td, &hypergraph_of(&a))?;
    let (repr, st) = compile_td_with_stats(&a, &b, &td)?;
    write(out, &circuit::serialize(&repr))?;
    if let Some(p) = stats {
        write(p, &(serde_json::to_string_pretty(&st)? + "\n"))?;
    }
    for w in &st.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn cover(
    circuit_path: &Path,
    weights: &Path,
    check_bound: bool,
    graph: Option<&Path>,
    n: Option<usize>,
) -> Result<Value> {
    let r = load_circuit(circuit_path)?;
    let vars: Vec<String> = r.circuit().map(|c| c.vars().to_vec()).unwrap_or_default();
    let f = WeightFunction::from_json(&read(weights)?, &vars)?;
    let cover = extract_cover_repr(&r, &f)?;
    let check = verify_cover(&cover, &f, r.size())?;
    let hom = r.count();
    let mut report = json!({
        "circuit_size": r.size(),
        "cover_size": cover.len(),
        "max_rectangle": cover.max_rectangle(),
        "hom_count": hom.to_string(),
        "verification": check.to_string(),
        "rectangles": serde_json::to_value(cover_summary(&cover, &f))?,
    });
    if check_bound {
        let (Some(gp), Some(n)) = (graph, n) else { bail!("--check-bound needs --graph and --n") };
        let g = hypergraph_of(&Structure::load(gp)?).primal_graph();
        if g.names() != vars.as_slice() {
            bail!("graph vertices must match the circuit variables in order");
        }
        let (k, w) = largest_hcs(&g)?;
        let w = w.filter(|_| k > 0).unwrap_or_default();
        let rep = rectangle_bound_check(&cover, &g, &w, k, n, &hom);
        report["bound_check"] = serde_json::to_value(&rep)?;
        report["hcs"] = json!({ "k": k, "w": w.iter().map(|&v| g.name(v)).collect::<Vec<_>>() });
    }
    Ok(report)
}

fn gen_hard(t: usize, n: usize, seed: u64, retries: usize, out: &Path) -> Result<()> {
    let cert = gen_hard_graph(t, n, seed, retries)?;
    let doc = json!({
        "certificate": serde_json::to_value(&cert)?,
        "structure": serde_json::to_value(graph_structure(&cert.graph).to_file())?,
    });
    write(out, &(serde_json::to_string_pretty(&doc)? + "\n"))
}

fn gen_flow(structure: &Path, flow: &Path, big_n: u64, seed: u64, retries: usize, out: &Path) -> Result<()> {
    let a = Structure::load(structure)?;
    let h = hypergraph_of(&a);
    let fw = flow_from_json(&h, &read(flow)?)?;
    let mu = mu_of_flow(&h, &fw.total());
    let fs = gen_flow_structure(&a, &mu, big_n, seed, retries)?;
    let (coordinate, order) = check_flow_structure(&a, &fs)?;
    let doms: BTreeMap<&str, Vec<&str>> = a
        .universe()
        .iter()
        .zip(&fs.doms)
        .map(|(v, d)| (v.as_str(), d.iter().map(|&e| fs.structure.universe()[e].as_str()).collect()))
        .collect();
    let doc = json!({
        "certificate": serde_json::to_value(&fs)?,
        "coordinate_respecting": coordinate,
        "order_respecting": order,
        "domains": doms,
        "structure": serde_json::to_value(fs.structure.to_file())?,
    });
    write(out, &(serde_json::to_string_pretty(&doc)? + "\n"))
}

fn experiment(kind: ExperimentKind, config: &Path, out: &Path) -> ExitCode {
    let cfg = match ExperimentConfig::load(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config {}: {e}", config.display());
            return ExitCode::from(1);
        }
    };
    let rep = match kind {
        ExperimentKind::Tw => run_tw_experiment(&cfg),
        ExperimentKind::Subw => run_subw_experiment(&cfg),
    };
    let rep = match rep {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match emit_report(&rep, out) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    for r in rep.rows.iter().filter(|r| !r.is_ok()) {
        eprintln!("cell {} (n={}, seed={}): {}", r.cell, r.n, r.seed, r.error.as_deref().unwrap_or(""));
    }
    if rep.errors() > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn print_or_write(v: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Widths { structure, td } => print_or_write(&widths(&structure, td.as_deref())?, None),
        Cmd::Circuit { op } => circuit_op(op),
        Cmd::Compile { structure, data, td, out, stats } => compile(&structure, &data, &td, &out, stats.as_deref()),
        Cmd::Cover { circuit, weights, check_bound, graph, n, out } => {
            print_or_write(&cover(&circuit, &weights, check_bound, graph.as_deref(), n)?, out.as_deref())
        }
        Cmd::GenHard { t, n, seed, retries, out } => gen_hard(t, n, seed, retries, &out),
        Cmd::GenFlow { structure, flow, big_n, seed, retries, out } => {
            gen_flow(&structure, &flow, big_n, seed, retries, &out)
        }
        Cmd::Experiment { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Cmd::Experiment { kind, config, out } = &cli.cmd {
        return experiment(*kind, config, out);
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

//! Experiment pipelines: hard graphs against a treewidth-bounded query, and
//! flow-induced structures against a single-tuple query, with one report
//! row per (size, seed) cell.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::circuit::DEFAULT_EVAL_BUDGET;
use crate::compile::compile_td_with_stats;
use crate::flows::{
    alpha_of_flow, flow_from_json, max_uniform_concurrent_flow, mu_of_flow, search_clique_partition,
    validate_concurrent, ConcurrentFlow, FlowWitness,
};
use crate::instgen::flowgen::check_flow_structure;
use crate::instgen::hard::{gen_hard_graph_budget, MAX_CLIQUE_T};
use crate::instgen::{alpha_balance_report, count_t_cliques, gen_flow_structure, DEFAULT_BICLIQUE_BUDGET};
use crate::rational::{self, Rational};
use crate::rect::{cover_certificate, extract_cover_budget, rectangle_bound, rectangle_bound_check, WeightFunction};
use crate::relcore::{count_homs_with_budget, graph_structure, hypergraph_of, Hypergraph, Structure, StructureBuilder};
use crate::widths::{largest_hcs, treewidth_exact};
use crate::{Error, Result};

pub const DEFAULT_HOM_BUDGET: u64 = 20_000_000;

/// The query of an experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum QueryFamily {
    /// `K_k`.
    Clique { k: usize },
    /// The `m × m` grid.
    Grid { m: usize },
    /// The path with `len` vertices.
    Path { len: usize },
    /// The cycle with `len` vertices.
    Cycle { len: usize },
    /// `R(x,y), S(y,z), T(x,z)`.
    Triangle,
    /// A structure file.
    File { path: PathBuf },
}

fn default_retries() -> usize {
    200
}
fn default_max_path_len() -> usize {
    4
}
fn default_partition_budget() -> usize {
    10_000
}
fn default_biclique_budget() -> u64 {
    DEFAULT_BICLIQUE_BUDGET
}
fn default_eval_budget() -> usize {
    DEFAULT_EVAL_BUDGET
}
fn default_hom_budget() -> u64 {
    DEFAULT_HOM_BUDGET
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub query: QueryFamily,
    /// `n` (hard-graph size) or `N` (relation bound), one cell per size and seed.
    pub sizes: Vec<u64>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
    /// Clique partition by element names; searched when absent.
    #[serde(default)]
    pub cliques: Option<Vec<Vec<String>>>,
    /// Concurrent flow witness file; computed when absent.
    #[serde(default)]
    pub flow: Option<PathBuf>,
    #[serde(default = "default_max_path_len")]
    pub max_path_len: usize,
    #[serde(default = "default_partition_budget")]
    pub partition_budget: usize,
    #[serde(default = "default_biclique_budget")]
    pub biclique_budget: u64,
    #[serde(default = "default_eval_budget")]
    pub eval_budget: usize,
    #[serde(default = "default_hom_budget")]
    pub hom_budget: u64,
}

impl ExperimentConfig {
    pub fn new(query: QueryFamily, sizes: Vec<u64>, seeds: Vec<u64>) -> Self {
        Self {
            query,
            sizes,
            seeds,
            max_retries: default_retries(),
            cliques: None,
            flow: None,
            max_path_len: default_max_path_len(),
            partition_budget: default_partition_budget(),
            biclique_budget: default_biclique_budget(),
            eval_budget: default_eval_budget(),
            hom_budget: default_hom_budget(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(&fs::read_to_string(path)?)?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Sizes and budgets must be positive and seeds nonempty when sizes are.
    pub fn check(&self) -> Result<()> {
        if self.sizes.contains(&0) {
            return Err(Error::InvalidArgument("sizes must be positive".into()));
        }
        if !self.sizes.is_empty() && self.seeds.is_empty() {
            return Err(Error::InvalidArgument("at least one seed is required".into()));
        }
        if self.max_retries == 0
            || self.max_path_len == 0
            || self.partition_budget == 0
            || self.biclique_budget == 0
            || self.eval_budget == 0
            || self.hom_budget == 0
        {
            return Err(Error::InvalidArgument("budgets must be positive".into()));
        }
        Ok(())
    }

    fn cells(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.sizes.iter().flat_map(move |&n| self.seeds.iter().map(move |&s| (n, s)))
    }
}

/// One cell of an experiment. Columns not produced by an experiment stay
/// empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub cell: usize,
    pub n: u64,
    pub seed: u64,
    pub status: String,
    pub error: Option<String>,
    /// Query vertices.
    pub t: Option<usize>,
    pub attempts: Option<usize>,
    pub b_size: Option<usize>,
    pub hom_count: Option<String>,
    pub oracle_hom_count: Option<String>,
    pub circuit_size: Option<usize>,
    pub fhtw: Option<String>,
    pub cover_size: Option<usize>,
    pub max_rectangle: Option<usize>,
    /// Analytic bound on a balanced rectangle.
    pub bound: Option<f64>,
    pub bound_violations: Option<usize>,
    /// `|Hom| / max balanced rectangle`, or `|Hom| / bound` when the cover
    /// is over budget.
    pub certificate: Option<String>,
    pub certificate_source: Option<String>,
    /// `|Hom| / bound`.
    pub analytic_certificate: Option<f64>,
    pub hcs_k: Option<usize>,
    pub edges: Option<usize>,
    pub clique_count: Option<String>,
    pub biclique: Option<String>,
    pub epsilon: Option<String>,
    /// `Σ μ(v)`.
    pub t_mu: Option<String>,
    pub scattered: Option<bool>,
    pub coordinate_respecting: Option<bool>,
    pub order_respecting: Option<bool>,
    pub balanced_cliques: Option<usize>,
    pub k_x_times_k_y: Option<usize>,
}

impl ExperimentRow {
    fn new(cell: usize, n: u64, seed: u64) -> Self {
        Self { cell, n, seed, status: "ok".into(), ..Default::default() }
    }

    fn failed(mut self, e: &Error) -> Self {
        self.status = "error".into();
        self.error = Some(e.to_string());
        self
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn errors(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_ok()).count()
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn family_graph(q: &QueryFamily) -> Result<Hypergraph> {
    Ok(match q {
        QueryFamily::Clique { k } => {
            Hypergraph::new(names("x", *k), (0..*k).flat_map(|u| (u + 1..*k).map(move |v| vec![u, v])))
        }
        QueryFamily::Grid { m } => {
            let m = *m;
            let vs = (0..m * m).map(|i| format!("x{}_{}", i / m, i % m)).collect();
            let mut edges = Vec::new();
            for i in 0..m {
                for j in 0..m {
                    if j + 1 < m {
                        edges.push(vec![i * m + j, i * m + j + 1]);
                    }
                    if i + 1 < m {
                        edges.push(vec![i * m + j, (i + 1) * m + j]);
                    }
                }
            }
            Hypergraph::new(vs, edges)
        }
        QueryFamily::Path { len } => Hypergraph::new(names("x", *len), (1..*len).map(|i| vec![i - 1, i])),
        QueryFamily::Cycle { len } => {
            Hypergraph::new(names("x", *len), (0..*len).map(|i| vec![i.min((i + 1) % len), i.max((i + 1) % len)]))
        }
        QueryFamily::Triangle => Hypergraph::new(names("x", 3), vec![vec![0, 1], vec![1, 2], vec![0, 2]]),
        QueryFamily::File { path } => hypergraph_of(&Structure::load(path)?).primal_graph(),
    })
}

/// The query as a structure with one binary relation per edge, oriented
/// from the lower to the higher vertex, or the file's structure.
fn family_structure(q: &QueryFamily) -> Result<Structure> {
    match q {
        QueryFamily::File { path } => Structure::load(path),
        QueryFamily::Triangle => Ok(StructureBuilder::new()
            .relation("R", 2)
            .relation("S", 2)
            .relation("T", 2)
            .tuple("R", &["x", "y"])
            .tuple("S", &["y", "z"])
            .tuple("T", &["x", "z"])
            .build()),
        _ => {
            let g = family_graph(q)?;
            let mut b = StructureBuilder::new().elements(g.names().iter());
            for e in g.edges() {
                let (u, v) = (g.name(e[0]), g.name(e[1]));
                let rel = format!("E_{u}_{v}");
                b.declare(&rel, 2);
                b.add(&rel, &[u, v])?;
            }
            Ok(b.build())
        }
    }
}

fn big_f64(x: &BigUint) -> f64 {
    x.to_string().parse().unwrap_or(f64::INFINITY)
}

/// Hard graph `H(t, n)` against the query graph `G`, compiled along an
/// optimal tree decomposition; the cover is taken with `f = |· ∩ W|` for
/// the largest highly connected set `W` of `G`.
pub fn run_tw_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.check()?;
    let mut rows = Vec::new();
    for (cell, (n, seed)) in cfg.cells().enumerate() {
        let row = ExperimentRow::new(cell, n, seed);
        rows.push(tw_cell(cfg, row.clone(), n, seed).unwrap_or_else(|e| row.failed(&e)));
    }
    Ok(ExperimentReport { experiment: "tw".into(), config: cfg.clone(), rows })
}

fn tw_cell(cfg: &ExperimentConfig, mut row: ExperimentRow, n: u64, seed: u64) -> Result<ExperimentRow> {
    let g = family_graph(&cfg.query)?;
    let t = g.num_vertices();
    row.t = Some(t);
    let a = graph_structure(&g);
    let (_, td) = treewidth_exact(&g)?;
    let (k, w) = largest_hcs(&g)?;
    let w = w.filter(|_| k > 0).unwrap_or_default();
    row.hcs_k = Some(k);

    let tc = t.clamp(2, MAX_CLIQUE_T);
    let cert = gen_hard_graph_budget(tc, n as usize, seed, cfg.max_retries, cfg.biclique_budget)?;
    row.attempts = Some(cert.attempts);
    row.edges = Some(cert.edges);
    row.clique_count = Some(cert.t_clique_count.to_string());
    row.biclique = Some(serde_json::to_string(&cert.biclique)?);
    let b = graph_structure(&cert.graph);
    row.b_size = Some(b.size());

    let (repr, stats) = compile_td_with_stats(&a, &b, &td)?;
    let hom = repr.count();
    row.hom_count = Some(hom.to_string());
    row.circuit_size = Some(repr.size());
    row.fhtw = Some(stats.fhtw);
    match count_homs_with_budget(&a, &b, cfg.hom_budget) {
        Ok(c) => {
            row.oracle_hom_count = Some(c.to_string());
            if BigUint::from(c) != hom {
                return Err(Error::InvalidCircuit(format!("circuit counts {hom}, oracle counts {c}")));
            }
        }
        Err(Error::BudgetExceeded(_)) => {}
        Err(e) => return Err(e),
    }
    if t <= MAX_CLIQUE_T && g.edges().len() == t * (t - 1) / 2 {
        let fact: u64 = (1..=t as u64).product();
        let via_cliques = count_t_cliques(&cert.graph, t)? * fact;
        if via_cliques != hom {
            return Err(Error::InvalidCircuit(format!("circuit counts {hom}, t!·cliques gives {via_cliques}")));
        }
    }

    let bound = rectangle_bound(n as usize, t, k);
    row.bound = Some(bound);
    let analytic = big_f64(&hom) / bound;
    row.analytic_certificate = Some(analytic);
    let f = if w.is_empty() { WeightFunction::uniform(t) } else { WeightFunction::indicator(t, &w) };
    let cover = match repr.circuit() {
        None => None,
        Some(c) => match extract_cover_budget(c, &f, cfg.eval_budget) {
            Ok(cover) => Some(cover),
            Err(Error::BudgetExceeded(_)) => None,
            Err(e) => return Err(e),
        },
    };
    match cover {
        Some(cover) => {
            let rep = rectangle_bound_check(&cover, &g, &w, k, n as usize, &hom);
            row.cover_size = Some(cover.len());
            row.max_rectangle = Some(rep.max_rectangle);
            row.bound_violations = Some(rep.violations.len());
            row.certificate = Some(rational::fmt(&cover_certificate(&hom, &cover)));
            row.certificate_source = Some("measured".into());
        }
        None if repr.circuit().is_none() => {
            row.cover_size = Some(0);
            row.certificate = Some("0".into());
            row.certificate_source = Some("empty".into());
        }
        None => {
            row.certificate = Some(format!("{analytic}"));
            row.certificate_source = Some("analytic".into());
        }
    }
    Ok(row)
}

fn resolve_cliques(h: &Hypergraph, cliques: &[Vec<String>]) -> Result<Vec<Vec<usize>>> {
    cliques
        .iter()
        .map(|k| {
            k.iter()
                .map(|v| h.vertex(v).ok_or_else(|| Error::InvalidFlow(format!("unknown vertex `{v}`"))))
                .collect()
        })
        .collect()
}

fn concurrent_flow(cfg: &ExperimentConfig, h: &Hypergraph) -> Result<ConcurrentFlow> {
    if let Some(path) = &cfg.flow {
        let FlowWitness::Concurrent(cf) = flow_from_json(h, &fs::read_to_string(path)?)? else {
            return Err(Error::InvalidFlow("expected a concurrent flow".into()));
        };
        let rep = validate_concurrent(h, &cf);
        if !rep.is_ok() {
            return Err(Error::InvalidFlow(rep.to_string()));
        }
        return Ok(cf);
    }
    match &cfg.cliques {
        Some(cl) => max_uniform_concurrent_flow(h, &resolve_cliques(h, cl)?, cfg.max_path_len),
        None => search_clique_partition(h, cfg.max_path_len, cfg.partition_budget)?
            .ok_or_else(|| Error::InvalidFlow("no clique partition carries a positive flow".into())),
    }
}

/// Flow-induced random structures `B(N)` against a single-tuple,
/// order-respecting query; the cover is taken with `f = α`.
pub fn run_subw_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.check()?;
    let mut rows = Vec::new();
    for (cell, (n, seed)) in cfg.cells().enumerate() {
        let row = ExperimentRow::new(cell, n, seed);
        rows.push(subw_cell(cfg, row.clone(), n, seed).unwrap_or_else(|e| row.failed(&e)));
    }
    Ok(ExperimentReport { experiment: "subw".into(), config: cfg.clone(), rows })
}

fn subw_cell(cfg: &ExperimentConfig, mut row: ExperimentRow, n: u64, seed: u64) -> Result<ExperimentRow> {
    let a = family_structure(&cfg.query)?;
    let h = hypergraph_of(&a);
    row.t = Some(a.len());
    let cf = concurrent_flow(cfg, &h)?;
    row.epsilon = Some(rational::fmt(&cf.epsilon));
    let mu = mu_of_flow(&h, &cf.total());
    let alpha = alpha_of_flow(&h, &cf);
    row.t_mu = Some(rational::fmt(&mu.total()));

    let fs = gen_flow_structure(&a, &mu, n, seed, cfg.max_retries)?;
    row.attempts = Some(fs.attempts);
    row.b_size = Some(fs.size);
    row.scattered = Some(fs.scattered);
    let (coord, order) = check_flow_structure(&a, &fs)?;
    row.coordinate_respecting = Some(coord);
    row.order_respecting = Some(order);

    let (_, td) = treewidth_exact(&h)?;
    let (repr, stats) = compile_td_with_stats(&a, &fs.structure, &td)?;
    let hom = repr.count();
    row.hom_count = Some(hom.to_string());
    row.oracle_hom_count = Some(fs.hom_count.to_string());
    if BigUint::from(fs.hom_count) != hom {
        return Err(Error::InvalidCircuit(format!("circuit counts {hom}, oracle counts {}", fs.hom_count)));
    }
    row.circuit_size = Some(repr.size());
    row.fhtw = Some(stats.fhtw);

    let f = WeightFunction::from_vertex_weights(&alpha);
    let Some(c) = repr.circuit() else {
        row.cover_size = Some(0);
        row.certificate = Some("0".into());
        row.certificate_source = Some("empty".into());
        return Ok(row);
    };
    match extract_cover_budget(c, &f, cfg.eval_budget) {
        Ok(cover) => {
            row.cover_size = Some(cover.len());
            row.max_rectangle = Some(cover.max_rectangle());
            row.certificate = Some(rational::fmt(&cover_certificate(&hom, &cover)));
            row.certificate_source = Some("measured".into());
            if let Some(r) = cover.rectangles.iter().max_by_key(|r| r.size()) {
                let rep = alpha_balance_report(&r.partition, &cf.cliques, &alpha, &cf.delta(), Some(&cf));
                row.balanced_cliques = Some(rep.balanced_count);
                row.k_x_times_k_y = Some(rep.k_x_times_k_y);
            }
        }
        Err(Error::BudgetExceeded(_)) => row.certificate_source = Some("over-budget".into()),
        Err(e) => return Err(e),
    }
    Ok(row)
}

pub fn write_csv(rep: &ExperimentReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in &rep.rows {
        w.serialize(r)?;
    }
    if rep.rows.is_empty() {
        // Header only.
        w.serialize(ExperimentRow::default())?;
        drop(w);
        let text = fs::read_to_string(path)?;
        fs::write(path, text.lines().next().map(|h| format!("{h}\n")).unwrap_or_default())?;
        return Ok(());
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<ExperimentRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|x| x.map_err(Error::from)).collect()
}

pub fn write_json(rep: &ExperimentReport, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(rep)? + "\n")?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<ExperimentReport> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    /// `(n, y)`; `y` is absent for failed cells.
    pub points: Vec<(u64, Option<f64>)>,
}

/// Plottable series over the size column, one point per row.
pub fn svg_data(rep: &ExperimentReport) -> Vec<Series> {
    let cert: fn(&ExperimentRow) -> Option<f64> = |r| r.certificate.as_deref().and_then(|c| rational::parse(c).ok()).map(|q: Rational| rational::to_f64(&q));
    type Column = fn(&ExperimentRow) -> Option<f64>;
    let columns: [(&str, Column); 4] = [
        ("certificate", cert),
        ("analytic_certificate", |r| r.analytic_certificate),
        ("circuit_size", |r| r.circuit_size.map(|s| s as f64)),
        ("b_size", |r| r.b_size.map(|s| s as f64)),
    ];
    columns
        .iter()
        .map(|(name, get)| Series { name: name.to_string(), points: rep.rows.iter().map(|r| (r.n, get(r))).collect() })
        .collect()
}

/// Writes `<experiment>.csv`, `<experiment>.json` and
/// `<experiment>.svg-data.json` into `dir`.
pub fn emit_report(rep: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{}.csv", rep.experiment));
    let json = dir.join(format!("{}.json", rep.experiment));
    let svg = dir.join(format!("{}.svg-data.json", rep.experiment));
    write_csv(rep, &csv)?;
    write_json(rep, &json)?;
    fs::write(&svg, serde_json::to_string_pretty(&svg_data(rep))? + "\n")?;
    Ok(vec![csv, json, svg])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_graphs() {
        assert_eq!(family_graph(&QueryFamily::Clique { k: 4 }).unwrap().edges().len(), 6);
        assert_eq!(family_graph(&QueryFamily::Grid { m: 3 }).unwrap().edges().len(), 12);
        assert_eq!(family_graph(&QueryFamily::Cycle { len: 5 }).unwrap().edges().len(), 5);
        let s = family_structure(&QueryFamily::Clique { k: 3 }).unwrap();
        assert_eq!(s.signature().len(), 3);
        assert!(s.relations().all(|(_, ts)| ts.len() == 1));
    }

    #[test]
    fn empty_sizes_give_empty_report() {
        let cfg = ExperimentConfig::new(QueryFamily::Clique { k: 3 }, vec![], vec![1]);
        assert!(run_tw_experiment(&cfg).unwrap().rows.is_empty());
    }

    #[test]
    fn bad_configs_are_rejected() {
        let cfg = ExperimentConfig::new(QueryFamily::Clique { k: 3 }, vec![0], vec![1]);
        assert!(run_tw_experiment(&cfg).is_err());
        let mut cfg = ExperimentConfig::new(QueryFamily::Clique { k: 3 }, vec![8], vec![1]);
        cfg.eval_budget = 0;
        assert!(run_subw_experiment(&cfg).is_err());
    }

    #[test]
    fn small_tw_cell() {
        let cfg = ExperimentConfig::new(QueryFamily::Clique { k: 3 }, vec![12], vec![5]);
        let rep = run_tw_experiment(&cfg).unwrap();
        let r = &rep.rows[0];
        assert!(r.is_ok(), "{:?}", r.error);
        assert_eq!(r.hom_count, r.oracle_hom_count);
        assert_eq!(r.hcs_k, Some(1));
        assert!(r.cover_size.unwrap() <= r.circuit_size.unwrap());
        assert_eq!(r.bound_violations, Some(0));
    }

    #[test]
    fn bad_flow_file_is_a_cell_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("flow.json");
        fs::write(&p, "{\"nonsense\": true}").unwrap();
        let mut cfg = ExperimentConfig::new(QueryFamily::Triangle, vec![16], vec![1]);
        cfg.flow = Some(p);
        let rep = run_subw_experiment(&cfg).unwrap();
        assert_eq!(rep.errors(), 1);
    }
}

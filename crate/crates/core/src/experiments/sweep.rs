use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{connectedness_spec, relative_size_spec, Baseline, ExperimentConfig, GraphSource};
use crate::cascade::{sample_sketches, UtilityVector};
use crate::error::Result;
use crate::optimize::{
    dc_lower_bounds, run_greedy, saturate_dc_with, saturate_maximin_with, Evaluator, Objective, Strategy,
};
use crate::rng::derive_seed;
use crate::welfare::{pof, total_influence, utility_gap, WelfareParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Utilitarian,
    Welfare,
    Maximin,
    Dc,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Utilitarian => "utilitarian",
            Method::Welfare => "welfare",
            Method::Maximin => "maximin",
            Method::Dc => "dc",
        }
    }
}

/// Which replication a row describes, or which aggregate over replications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Run(usize),
    Mean,
    Std,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub instance: usize,
    pub replication: RowKind,
    pub method: Method,
    pub alpha: Option<f64>,
    pub k: usize,
    pub utilities: Vec<f64>,
    pub total: f64,
    pub gap: f64,
    pub pof: f64,
}

impl ResultRow {
    fn sort_key(&self) -> (usize, usize, Method, u64, RowKind) {
        // alphas are finite; map them to an order-preserving integer
        let a = self.alpha.unwrap_or(0.0);
        let bits = a.to_bits();
        let ordered = if a.is_sign_negative() { !bits } else { bits | 1 << 63 };
        (self.instance, self.k, self.method, ordered, self.replication)
    }

    /// Rows of the same cell across replications share this key.
    fn cell(&self) -> (usize, usize, Method, Option<u64>) {
        (self.instance, self.k, self.method, self.alpha.map(f64::to_bits))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<ResultRow>,
    pub num_communities: usize,
}

impl SweepTable {
    pub fn runs(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| matches!(r.replication, RowKind::Run(_)))
    }

    pub fn means(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| r.replication == RowKind::Mean)
    }

    pub fn find(&self, instance: usize, kind: RowKind, method: Method, alpha: Option<f64>, k: usize) -> Option<&ResultRow> {
        self.rows.iter().find(|r| {
            r.instance == instance && r.replication == kind && r.method == method && r.alpha == alpha && r.k == k
        })
    }

    pub fn csv_header(&self) -> String {
        let mut h = String::from("instance,replication,method,k,alpha,gap,pof,total");
        for c in 0..self.num_communities {
            write!(h, ",u_{c}").unwrap();
        }
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header();
        out.push('\n');
        for r in &self.rows {
            let rep = match r.replication {
                RowKind::Run(i) => i.to_string(),
                RowKind::Mean => "mean".into(),
                RowKind::Std => "std".into(),
            };
            let alpha = r.alpha.map(|a| a.to_string()).unwrap_or_default();
            write!(out, "{},{rep},{},{},{alpha},{},{},{}", r.instance, r.method.label(), r.k, r.gap, r.pof, r.total)
                .unwrap();
            for c in 0..self.num_communities {
                match r.utilities.get(c) {
                    Some(u) => write!(out, ",{u}").unwrap(),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Companion record for a sweep's CSV output.
#[derive(Debug, Clone, Serialize)]
pub struct SweepMetadata {
    pub version: &'static str,
    pub configs: Vec<ExperimentConfig>,
    /// Parameter value behind each instance id, for level sweeps.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<f64>,
    pub notes: Vec<&'static str>,
}

pub const SWEEP_NOTES: [&str; 3] = [
    "graphs use RNG key (master_seed, instance, replication, 0); sketches (.., 1); DC bound sketches (.., 2) then community",
    "budget left once the maximin or DC objective stops improving is spent on total influence",
    "welfare uses a tangent extension of the isoelastic function below epsilon (default 1/(2n))",
];

impl SweepMetadata {
    pub fn new(configs: Vec<ExperimentConfig>, levels: Vec<f64>) -> Self {
        SweepMetadata { version: env!("CARGO_PKG_VERSION"), configs, levels, notes: SWEEP_NOTES.to_vec() }
    }
}

fn row(instance: usize, rep: usize, method: Method, alpha: Option<f64>, k: usize, u: &UtilityVector, im_total: f64) -> Result<ResultRow> {
    let total = total_influence(u);
    Ok(ResultRow {
        instance,
        replication: RowKind::Run(rep),
        method,
        alpha,
        k,
        utilities: u.values().to_vec(),
        total,
        gap: utility_gap(u),
        pof: pof(total, im_total)?,
    })
}

fn run_job(cfg: &ExperimentConfig, instance: usize, rep: usize) -> Result<Vec<ResultRow>> {
    let key = |tag: u64| derive_seed(cfg.master_seed, &[instance as u64, rep as u64, tag]);
    let (g, part) = cfg.instantiate(key(0))?;
    let sk = sample_sketches(&g, cfg.sketches, key(1))?;
    let ev = Evaluator::new(&sk, &part)?;
    let eps = cfg.epsilon.unwrap_or(1.0 / (2.0 * g.n() as f64));
    let mut rows = Vec::new();
    for k in cfg.budgets_for(g.n())? {
        let (util_seeds, _) = run_greedy(&ev, &Objective::Total, None, k, Strategy::Lazy)?;
        let u = ev.utilities(util_seeds.vertices());
        let im_total = total_influence(&u);
        rows.push(row(instance, rep, Method::Utilitarian, None, k, &u, im_total)?);
        for &alpha in &cfg.alphas {
            let params = WelfareParams::new(alpha, eps)?;
            let (seeds, _) = run_greedy(&ev, &Objective::Welfare(params), None, k, Strategy::Lazy)?;
            rows.push(row(instance, rep, Method::Welfare, Some(alpha), k, &ev.utilities(seeds.vertices()), im_total)?);
        }
        if cfg.baselines.contains(&Baseline::Maximin) {
            let sel = saturate_maximin_with(&ev, k, cfg.tol)?;
            rows.push(row(instance, rep, Method::Maximin, None, k, &sel.utilities, im_total)?);
        }
        if cfg.baselines.contains(&Baseline::Dc) {
            let bounds = dc_lower_bounds(&g, &part, k, cfg.sketches, key(2))?;
            let sel = saturate_dc_with(&ev, k, &bounds, cfg.tol)?;
            rows.push(row(instance, rep, Method::Dc, None, k, &sel.utilities, im_total)?);
        }
    }
    Ok(rows)
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn aggregate(runs: &[ResultRow]) -> Vec<ResultRow> {
    let mut cells: BTreeMap<_, Vec<&ResultRow>> = BTreeMap::new();
    for r in runs {
        cells.entry(r.cell()).or_default().push(r);
    }
    let mut out = Vec::new();
    for group in cells.values() {
        let first = group[0];
        let stat = |f: &dyn Fn(&ResultRow) -> f64| mean_std(group.iter().map(|r| f(r)));
        let nc = first.utilities.len();
        let utils: Vec<(f64, f64)> = (0..nc).map(|c| stat(&|r| r.utilities[c])).collect();
        let (total, gap, pof) = (stat(&|r| r.total), stat(&|r| r.gap), stat(&|r| r.pof));
        for (kind, pick) in [(RowKind::Mean, 0), (RowKind::Std, 1)] {
            let get = |p: (f64, f64)| if pick == 0 { p.0 } else { p.1 };
            out.push(ResultRow {
                replication: kind,
                utilities: utils.iter().map(|&p| get(p)).collect(),
                total: get(total),
                gap: get(gap),
                pof: get(pof),
                ..first.clone()
            });
        }
    }
    out
}

/// Runs every config as one instance id (its index), each over its replications.
pub fn run_family(configs: &[ExperimentConfig]) -> Result<SweepTable> {
    for cfg in configs {
        cfg.validate()?;
    }
    let jobs: Vec<(usize, usize)> = configs
        .iter()
        .enumerate()
        .flat_map(|(i, cfg)| (0..cfg.replications).map(move |r| (i, r)))
        .collect();
    let results: Vec<Vec<ResultRow>> =
        jobs.par_iter().map(|&(i, r)| run_job(&configs[i], i, r)).collect::<Result<_>>()?;
    let mut rows: Vec<ResultRow> = results.into_iter().flatten().collect();
    rows.sort_by_key(ResultRow::sort_key);
    let mut all = aggregate(&rows);
    all.append(&mut rows);
    all.sort_by_key(ResultRow::sort_key);
    let num_communities = all.iter().map(|r| r.utilities.len()).max().unwrap_or(0);
    Ok(SweepTable { rows: all, num_communities })
}

/// Utilitarian run plus every configured α and baseline, for each budget and
/// replication, on shared sketch sets. Deterministic given the master seed.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    run_family(std::slice::from_ref(cfg))
}

/// A sweep over one structural parameter; instance `i` corresponds to `levels[i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSweep {
    pub levels: Vec<f64>,
    pub configs: Vec<ExperimentConfig>,
    pub table: SweepTable,
}

impl LevelSweep {
    pub fn metadata(&self) -> SweepMetadata {
        SweepMetadata::new(self.configs.clone(), self.levels.clone())
    }
}

fn level_configs(base: &ExperimentConfig, specs: Vec<crate::sbm::SbmSpec>) -> Vec<ExperimentConfig> {
    specs
        .into_iter()
        .map(|spec| {
            let mut cfg = base.clone();
            cfg.source = GraphSource::Sbm(spec);
            if cfg.budgets.is_empty() && cfg.budget_fractions.is_empty() {
                cfg.budget_fractions = vec![0.1];
            }
            cfg
        })
        .collect()
}

pub const CONNECTEDNESS_LEVELS: [f64; 7] = [0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06];

/// Third community's within probability swept over [`CONNECTEDNESS_LEVELS`]. The
/// base config supplies methods, replications, seeds and sketches; its source is
/// replaced. Without budgets in the base config, `k = 0.1 n`.
pub fn relative_connectedness_experiment(base: &ExperimentConfig) -> Result<LevelSweep> {
    let levels = CONNECTEDNESS_LEVELS.to_vec();
    let configs = level_configs(base, levels.iter().map(|&q| connectedness_spec(q)).collect());
    let table = run_family(&configs)?;
    Ok(LevelSweep { levels, configs, table })
}

/// Second community grown from 100 to 900 vertices (ratio 1 to 9).
pub fn relative_size_experiment(base: &ExperimentConfig) -> Result<LevelSweep> {
    let ratios: Vec<usize> = (1..=9).collect();
    let configs = level_configs(base, ratios.iter().map(|&r| relative_size_spec(r)).collect());
    let table = run_family(&configs)?;
    Ok(LevelSweep { levels: ratios.iter().map(|&r| r as f64).collect(), configs, table })
}

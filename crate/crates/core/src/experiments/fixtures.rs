//! Hand-built counterexample graphs and the claims each one witnesses.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::cascade::{exact_utilities, reachable_counts, sample_sketches, UtilityVector};
use crate::error::{Error, Result};
use crate::graph::{induced_within_community_subgraph, CommunityPartition, Graph, SeedSet};
use crate::io::GraphDocument;
use crate::optimize::{
    dc_lower_bounds, exhaustive_opt, greedy_welfare, saturate_dc, saturate_maximin, seed_sets, ExhaustiveObjective,
    UtilitySource, DEFAULT_COMBINATION_LIMIT, DEFAULT_TOL,
};
use crate::welfare::{
    check_gap_reduction, check_monotonicity_preference, dp_satisfied, leximin_compare, total_influence,
    utility_gap, welfare_difference, PrincipleVerdict, WelfareParams,
};

pub const FIXTURE_NAMES: [&str; 6] = [
    "gap_reduction_witness",
    "approx_dp_leveling_down",
    "exact_dp_leveling_down",
    "dc_gap",
    "maximin_gap",
    "dp_unconcerned",
];

pub const BUNDLED_FIXTURES: [(&str, &str); 6] = [
    ("gap_reduction_witness", include_str!("../../fixtures/gap_reduction_witness.json")),
    ("approx_dp_leveling_down", include_str!("../../fixtures/approx_dp_leveling_down.json")),
    ("exact_dp_leveling_down", include_str!("../../fixtures/exact_dp_leveling_down.json")),
    ("dc_gap", include_str!("../../fixtures/dc_gap.json")),
    ("maximin_gap", include_str!("../../fixtures/maximin_gap.json")),
    ("dp_unconcerned", include_str!("../../fixtures/dp_unconcerned.json")),
];

/// α values the welfare sign checks sweep over.
pub const ALPHA_GRID: [f64; 9] = [-5.0, -2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 0.9];

const EXACT_TOL: f64 = 1e-12;
/// Allowed distance between sketch-estimated and exact DC bounds.
pub const DC_SKETCH_TOL: f64 = 0.02;
const SKETCHES: usize = 10_000;

/// One parsed fixture: graph, partition and the named seed sets it ships with.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub graph: Graph,
    pub partition: CommunityPartition,
    pub k: usize,
    pub delta: Option<f64>,
    pub community_names: Vec<String>,
    pub solutions: BTreeMap<String, Vec<usize>>,
}

impl Fixture {
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("{name}: {e}")))?;
        let meta = doc.meta.clone().ok_or_else(|| Error::Malformed(format!("{name}: missing meta")))?;
        let bad = |what: &str| Error::Malformed(format!("{name}: bad or missing meta.{what}"));
        let k = meta.get("k").and_then(|v| v.as_u64()).ok_or_else(|| bad("k"))? as usize;
        let delta = meta.get("delta").and_then(|v| v.as_f64());
        let community_names = serde_json::from_value(meta.get("community_names").cloned().unwrap_or_default())
            .unwrap_or_default();
        let solutions = serde_json::from_value(meta.get("solutions").cloned().ok_or_else(|| bad("solutions"))?)
            .map_err(|_| bad("solutions"))?;
        let (graph, partition) = doc.into_parts()?;
        Ok(Fixture { name: name.to_string(), graph, partition, k, delta, community_names, solutions })
    }

    pub fn seeds(&self, solution: &str) -> Result<SeedSet> {
        let ids = self
            .solutions
            .get(solution)
            .ok_or_else(|| Error::Malformed(format!("{}: no solution named {solution}", self.name)))?;
        SeedSet::from_vertices(ids.iter().copied(), self.graph.n())
    }

    pub fn exact(&self, solution: &str) -> Result<UtilityVector> {
        exact_utilities(&self.graph, &self.seeds(solution)?, &self.partition)
    }

    fn delta(&self) -> Result<f64> {
        self.delta.ok_or_else(|| Error::Malformed(format!("{}: missing meta.delta", self.name)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureCheck {
    pub fixture: String,
    pub claim: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FixtureReport {
    pub checks: Vec<FixtureCheck>,
}

impl FixtureReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FixtureCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, fixture: &str, claim: &str, passed: bool, detail: String) {
        self.checks.push(FixtureCheck { fixture: fixture.into(), claim: claim.into(), passed, detail });
    }
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {} ({})", c.fixture, c.claim, c.detail)?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

fn fmt_u(u: &UtilityVector) -> String {
    let parts: Vec<String> = u.values().iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn close(u: &UtilityVector, expect: &[f64], tol: f64) -> bool {
    u.len() == expect.len() && u.values().iter().zip(expect).all(|(a, b)| (a - b).abs() <= tol)
}

fn params(alpha: f64, n: usize) -> Result<WelfareParams> {
    WelfareParams::for_population(alpha, n)
}

/// Checks the bundled fixtures.
pub fn verify_fixtures() -> Result<FixtureReport> {
    let parsed: Vec<Fixture> =
        BUNDLED_FIXTURES.iter().map(|(name, text)| Fixture::parse(name, text)).collect::<Result<_>>()?;
    verify_parsed(&parsed)
}

/// Checks `<dir>/<name>.json` for every fixture name.
pub fn verify_fixtures_in(dir: impl AsRef<Path>) -> Result<FixtureReport> {
    let mut parsed = Vec::new();
    for name in FIXTURE_NAMES {
        let path = dir.as_ref().join(format!("{name}.json"));
        let text = std::fs::read_to_string(&path).map_err(|e| Error::file(&path, e))?;
        parsed.push(Fixture::parse(name, &text)?);
    }
    verify_parsed(&parsed)
}

fn verify_parsed(fixtures: &[Fixture]) -> Result<FixtureReport> {
    let mut report = FixtureReport::default();
    for fx in fixtures {
        match fx.name.as_str() {
            "gap_reduction_witness" => gap_reduction_witness(fx, &mut report)?,
            "approx_dp_leveling_down" => approx_dp_leveling_down(fx, &mut report)?,
            "exact_dp_leveling_down" => exact_dp_leveling_down(fx, &mut report)?,
            "dc_gap" => dc_gap(fx, &mut report)?,
            "maximin_gap" => maximin_gap(fx, &mut report)?,
            "dp_unconcerned" => dp_unconcerned(fx, &mut report)?,
            other => return Err(Error::Malformed(format!("unknown fixture {other}"))),
        }
    }
    Ok(report)
}

fn gap_reduction_witness(fx: &Fixture, report: &mut FixtureReport) -> Result<()> {
    let name = &fx.name;
    let (a, b) = (fx.seeds("single_community_centers")?, fx.seeds("neighbor")?);
    let ca = reachable_counts(&fx.graph, &a, &fx.partition)?;
    let cb = reachable_counts(&fx.graph, &b, &fx.partition)?;
    report.record(
        name,
        "reach counts are (30, 70, 80) and (34, 60, 86)",
        ca == [30, 70, 80] && cb == [34, 60, 86],
        format!("{ca:?} vs {cb:?}"),
    );
    let (ua, ub) = (fx.exact("single_community_centers")?, fx.exact("neighbor")?);
    let (ta, tb) = (ca.iter().sum::<usize>(), cb.iter().sum::<usize>());
    report.record(name, "equal total influence 180", ta == 180 && tb == 180, format!("{ta} vs {tb}"));
    // gaps from integer counts over equal community sizes of 100
    let gap = |c: &[usize]| c.iter().max().unwrap() - c.iter().min().unwrap();
    let (ga, gb) = (utility_gap(&ua), utility_gap(&ub));
    report.record(
        name,
        "gaps are 0.50 and 0.52",
        gap(&ca) == 50 && gap(&cb) == 52 && (ga - 0.5).abs() < EXACT_TOL && (gb - 0.52).abs() < EXACT_TOL,
        format!("{ga} vs {gb}"),
    );
    let verdict = check_gap_reduction(&ua, &ub)?;
    report.record(
        name,
        "gap reduction prefers the single-community centers",
        verdict == PrincipleVerdict::PrefersFirst,
        format!("{verdict:?}"),
    );
    let n = fx.graph.n();
    let mut diffs = Vec::new();
    for alpha in ALPHA_GRID {
        diffs.push((alpha, welfare_difference(&ua, &ub, &params(alpha, n)?)?));
    }
    let all_negative = diffs.iter().all(|&(_, d)| d < 0.0);
    report.record(
        name,
        "welfare prefers the neighbor solution for every alpha on the grid",
        all_negative,
        diffs.iter().map(|(a, d)| format!("{a}:{d:.4}")).collect::<Vec<_>>().join(" "),
    );
    let log_diff = diffs.iter().find(|(a, _)| *a == 0.0).map(|d| d.1).unwrap_or(f64::NAN);
    report.record(
        name,
        "log welfare difference is about -4.3",
        (log_diff + 4.3).abs() <= 0.1,
        format!("{log_diff:.4}"),
    );
    Ok(())
}

fn approx_dp_leveling_down(fx: &Fixture, report: &mut FixtureReport) -> Result<()> {
    let name = &fx.name;
    let delta = fx.delta()?;
    let p = fx.graph.p();
    let sizes = fx.partition.sizes();
    let (n0, n1) = (sizes[0] as f64, sizes[1] as f64);
    let util = fx.exact("utilitarian")?;
    let fair = fx.exact("dp_feasible")?;
    let expect_util = [(1.0 + (n0 - 1.0) * p) / n0, (1.0 + 2.0 * p) / n1];
    let expect_fair = [(1.0 + p + (n0 - 2.0) * p * p) / n0, (1.0 + 2.0 * p * p) / n1];
    report.record(
        name,
        "exact utilities match the closed forms",
        close(&util, &expect_util, EXACT_TOL) && close(&fair, &expect_fair, EXACT_TOL),
        format!("{} and {}", fmt_u(&util), fmt_u(&fair)),
    );
    report.record(
        name,
        "utilitarian violates DP while the fair solution satisfies it",
        !dp_satisfied(&util, delta) && dp_satisfied(&fair, delta),
        format!("gaps {:.4} and {:.4}, delta {delta}", utility_gap(&util), utility_gap(&fair)),
    );
    let verdict = check_monotonicity_preference(&util, &fair)?;
    report.record(
        name,
        "utilitarian Pareto-dominates the fair solution",
        verdict == PrincipleVerdict::PrefersFirst,
        format!("{verdict:?}"),
    );
    // every budget-k set, with exact utilities
    let n = fx.graph.n();
    let mut best_total = f64::NEG_INFINITY;
    let mut feasible = 0usize;
    let mut dominated = 0usize;
    for set in seed_sets(n, fx.k) {
        let u = exact_utilities(&fx.graph, &SeedSet::new(set, fx.k, n)?, &fx.partition)?;
        best_total = best_total.max(total_influence(&u));
        if dp_satisfied(&u, delta) {
            feasible += 1;
            if check_monotonicity_preference(&util, &u)? == PrincipleVerdict::PrefersFirst {
                dominated += 1;
            }
        }
    }
    let util_total = total_influence(&util);
    report.record(
        name,
        "the utilitarian set is a global optimum of total influence",
        (best_total - util_total).abs() <= 1e-9,
        format!("best {best_total:.6}, utilitarian {util_total:.6}"),
    );
    report.record(
        name,
        "every DP-feasible set is Pareto-dominated by the utilitarian set",
        feasible > 0 && dominated == feasible,
        format!("{dominated} of {feasible} feasible sets dominated"),
    );
    Ok(())
}

fn exact_dp_leveling_down(fx: &Fixture, report: &mut FixtureReport) -> Result<()> {
    let name = &fx.name;
    let delta = fx.delta()?;
    let fair = fx.exact("dp_feasible")?;
    let both = fx.exact("both_centers")?;
    report.record(
        name,
        "utilities are (0.35, 0.35) and (0.55, 0.35)",
        close(&fair, &[0.35, 0.35], EXACT_TOL) && close(&both, &[0.55, 0.35], EXACT_TOL),
        format!("{} and {}", fmt_u(&fair), fmt_u(&both)),
    );
    report.record(
        name,
        "exact DP admits only the equalized solution",
        dp_satisfied(&fair, delta) && !dp_satisfied(&both, delta),
        format!("gaps {:.4} and {:.4}", utility_gap(&fair), utility_gap(&both)),
    );
    let verdict = check_monotonicity_preference(&both, &fair)?;
    report.record(
        name,
        "the rejected solution Pareto-dominates the DP one",
        verdict == PrincipleVerdict::PrefersFirst,
        format!("{verdict:?}"),
    );
    Ok(())
}

fn dc_gap(fx: &Fixture, report: &mut FixtureReport) -> Result<()> {
    let name = &fx.name;
    let util = fx.exact("utilitarian")?;
    let fair = fx.exact("dc_feasible")?;
    let best = exhaustive_opt(
        UtilitySource::Exact(&fx.graph),
        &fx.partition,
        fx.k,
        &ExhaustiveObjective::Total,
        DEFAULT_COMBINATION_LIMIT,
    )?;
    report.record(
        name,
        "utilitarian solution is the unique-first exhaustive optimum",
        best.seeds == fx.seeds("utilitarian")?,
        format!("exhaustive {:?}", best.seeds.vertices()),
    );
    // bounds come from a greedy inside each community; with exact marginals here
    let n = fx.graph.n();
    let mut exact_bounds = Vec::new();
    for c in 0..fx.partition.num_communities() {
        let budget = fx.k * fx.partition.size(c) / n;
        let sub = induced_within_community_subgraph(&fx.graph, &fx.partition, c)?;
        let local = CommunityPartition::new(vec![0; sub.graph.n()])?;
        exact_bounds.push(exact_greedy(&sub.graph, &local, budget)?.values()[0]);
    }
    let feasible = |u: &UtilityVector| u.values().iter().zip(&exact_bounds).all(|(a, b)| *a >= b - EXACT_TOL);
    report.record(
        name,
        "utilitarian violates the greedy DC bounds, the fair solution meets them",
        !feasible(&util) && feasible(&fair),
        format!("bounds {exact_bounds:.4?}, utilitarian {}, fair {}", fmt_u(&util), fmt_u(&fair)),
    );
    let est = dc_lower_bounds(&fx.graph, &fx.partition, fx.k, SKETCHES, 7)?;
    let worst = est.bounds.iter().zip(&exact_bounds).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report.record(
        name,
        "sketch DC bounds match the exact bounds",
        worst <= DC_SKETCH_TOL,
        format!("estimated {:.4?}, max error {worst:.4}", est.bounds),
    );
    let sk = sample_sketches(&fx.graph, SKETCHES, 8)?;
    let sel = saturate_dc(&sk, &fx.partition, fx.k, &est, DEFAULT_TOL)?;
    let chosen = exact_utilities(&fx.graph, &sel.seeds, &fx.partition)?;
    report.record(
        name,
        "DC selection reaches the fair solution's utilities",
        close(&chosen, fair.values(), 1e-9),
        format!("seeds {:?}, utilities {}", sel.seeds.vertices(), fmt_u(&chosen)),
    );
    let verdict = check_gap_reduction(&util, &fair)?;
    report.record(
        name,
        "gap reduction prefers the utilitarian solution over the DC one",
        verdict == PrincipleVerdict::PrefersFirst,
        format!("{verdict:?}; gaps {:.4} and {:.4}", utility_gap(&util), utility_gap(&fair)),
    );
    Ok(())
}

/// Total-influence greedy with exact marginals; lowest id wins ties.
fn exact_greedy(g: &Graph, part: &CommunityPartition, k: usize) -> Result<UtilityVector> {
    let mut chosen: Vec<usize> = Vec::new();
    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for v in (0..g.n()).filter(|v| !chosen.contains(v)) {
            let mut with = chosen.clone();
            with.push(v);
            let t = total_influence(&exact_utilities(g, &SeedSet::from_vertices(with, g.n())?, part)?);
            if best.is_none_or(|(b, _)| t > b + EXACT_TOL) {
                best = Some((t, v));
            }
        }
        chosen.extend(best.map(|b| b.1));
    }
    exact_utilities(g, &SeedSet::from_vertices(chosen, g.n())?, part)
}

fn maximin_gap(fx: &Fixture, report: &mut FixtureReport) -> Result<()> {
    let name = &fx.name;
    let larger = fx.exact("larger_star_center")?;
    let smaller = fx.exact("smaller_star_center")?;
    let lex = leximin_compare(&smaller, &larger)?;
    report.record(
        name,
        "leximin prefers the smaller star's center",
        lex == Ordering::Greater,
        format!("{} vs {}", fmt_u(&smaller), fmt_u(&larger)),
    );
    let verdict = check_gap_reduction(&larger, &smaller)?;
    report.record(
        name,
        "gap reduction prefers the larger star's center",
        verdict == PrincipleVerdict::PrefersFirst,
        format!("{verdict:?}; gaps {:.4} and {:.4}", utility_gap(&larger), utility_gap(&smaller)),
    );
    let best = exhaustive_opt(
        UtilitySource::Exact(&fx.graph),
        &fx.partition,
        fx.k,
        &ExhaustiveObjective::Maximin,
        DEFAULT_COMBINATION_LIMIT,
    )?;
    let target = fx.seeds("smaller_star_center")?;
    report.record(
        name,
        "exhaustive maximin picks the smaller star's center",
        best.seeds == target,
        format!("{:?}", best.seeds.vertices()),
    );
    let sk = sample_sketches(&fx.graph, 1000, 11)?;
    let params = params(-20.0, fx.graph.n())?;
    let (greedy, _) = greedy_welfare(&sk, &fx.partition, fx.k, &params)?;
    let sat = saturate_maximin(&sk, &fx.partition, fx.k, DEFAULT_TOL)?;
    report.record(
        name,
        "welfare greedy at alpha -20 and the maximin selector both pick it",
        greedy == target && sat.seeds == target,
        format!("greedy {:?}, maximin {:?}", greedy.vertices(), sat.seeds.vertices()),
    );
    Ok(())
}

fn dp_unconcerned(fx: &Fixture, report: &mut FixtureReport) -> Result<()> {
    let name = &fx.name;
    let delta = fx.delta()?;
    let [u, u2, v, v2] = ["u", "u_prime", "v", "v_prime"].map(|s| fx.exact(s));
    let (u, u2, v, v2) = (u?, u2?, v?, v2?);
    let expect = |x: &UtilityVector, a: f64, b: f64| close(x, &[a / 80.0, b / 80.0], EXACT_TOL);
    report.record(
        name,
        "utilities are 13, 22 and 9, 22 influenced out of 80",
        expect(&u, 13.0, 9.0) && expect(&u2, 22.0, 9.0) && expect(&v, 13.0, 22.0) && expect(&v2, 22.0, 22.0),
        format!("{} {} {} {}", fmt_u(&u), fmt_u(&u2), fmt_u(&v), fmt_u(&v2)),
    );
    let dp = [&u, &u2, &v, &v2].map(|x| dp_satisfied(x, delta));
    report.record(
        name,
        "DP keeps u over u' but v' over v for the same change",
        dp == [true, false, false, true],
        format!("feasible u, u', v, v' = {dp:?}"),
    );
    let n = fx.graph.n();
    let mut consistent = true;
    for alpha in ALPHA_GRID {
        let p = params(alpha, n)?;
        consistent &= welfare_difference(&u2, &u, &p)? > 0.0 && welfare_difference(&v2, &v, &p)? > 0.0;
    }
    report.record(
        name,
        "welfare prefers u' and v' for every alpha on the grid",
        consistent,
        format!("{} alphas", ALPHA_GRID.len()),
    );
    Ok(())
}

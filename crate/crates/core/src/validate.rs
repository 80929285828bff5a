//! Self-checks of the miner, index and ranking against independent oracles.

use std::collections::BTreeSet;
use std::fmt;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::bench::{sample_query, SHAPES};
use crate::context::{Dim, ElemId, TriadicContext};
use crate::error::Result;
use crate::index::InvertedIndex;
use crate::miner::{
    mine_concepts, mine_concepts_bruteforce_with_cap, ConceptSet, TriadicConcept, DEFAULT_BRUTE_FORCE_CAP,
};
use crate::query::{relevant_concepts, relevant_concepts_scan, rerank, MatchMode, Query, RankedHit, ToleranceScope};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidateConfig {
    pub queries: usize,
    pub seed: u64,
    pub brute_force_cap: u64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            queries: 200,
            seed: 1,
            brute_force_cap: DEFAULT_BRUTE_FORCE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, outcome: std::result::Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check { name, passed, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

type TriSet = [Vec<ElemId>; 3];

fn trisets(set: &ConceptSet) -> BTreeSet<TriSet> {
    set.iter().map(|c| c.components().map(<[ElemId]>::to_vec)).collect()
}

fn describe(set: &ConceptSet, sets: &TriSet) -> String {
    let parts: Vec<String> = Dim::ALL
        .iter()
        .map(|&d| {
            let labels: Vec<&str> = sets[d.index()]
                .iter()
                .map(|&e| set.dictionary(d).label(e).unwrap_or("?"))
                .collect();
            format!("{{{}}}", labels.join(","))
        })
        .collect();
    format!("({})", parts.join(", "))
}

/// Runs every check on `ctx`. With `store`, the supplied concepts are
/// checked against the context and used for the index checks; otherwise
/// the freshly mined concepts are.
pub fn validate(ctx: &TriadicContext, store: Option<&ConceptSet>, config: ValidateConfig) -> Result<ValidationReport> {
    let oracle = mine_concepts_bruteforce_with_cap(ctx, config.brute_force_cap)?;
    let mined = mine_concepts(ctx);
    let expected = trisets(&oracle);
    let mut report = ValidationReport::default();

    report.push(
        "miner equals brute force",
        compare_sets(&oracle, &expected, &trisets(&mined)),
    );

    let concepts = match store {
        Some(store) => {
            report.push("stored tri-sets are closed", check_closed(ctx, store));
            report.push("store is complete", compare_sets(store, &expected, &trisets(store)));
            store
        }
        None => &mined,
    };

    let index = InvertedIndex::build(concepts);
    report.push("index postings equal scan", check_postings(&index, concepts));
    report.push("index round-trips", check_round_trip(&index));

    let queries = sample_queries(concepts, config.queries, config.seed);
    report.push(
        "index retrieval equals scan",
        check_retrieval(&index, concepts, &queries),
    );
    report.push(
        "scores recompute from the formula",
        check_scores(&index, concepts, &queries),
    );
    Ok(report)
}

fn compare_sets(
    set: &ConceptSet,
    expected: &BTreeSet<TriSet>,
    got: &BTreeSet<TriSet>,
) -> std::result::Result<String, String> {
    if let Some(missing) = expected.difference(got).next() {
        return Err(format!("missing {}", describe(set, missing)));
    }
    if let Some(extra) = got.difference(expected).next() {
        return Err(format!("unexpected {}", describe(set, extra)));
    }
    Ok(format!("{} concepts", got.len()))
}

fn check_closed(ctx: &TriadicContext, store: &ConceptSet) -> std::result::Result<String, String> {
    if store
        .dictionaries()
        .iter()
        .zip(ctx.dictionaries())
        .any(|(a, b)| a.len() > b.len())
    {
        return Err("store has more elements than the context".into());
    }
    for c in store {
        let closed = ctx
            .is_closed_triset(c.components())
            .map_err(|e| format!("concept {}: {e}", c.id))?;
        if !closed {
            return Err(format!(
                "concept {} {} is not a closed tri-set",
                c.id,
                describe(store, &c.components().map(<[ElemId]>::to_vec))
            ));
        }
    }
    Ok(format!("{} concepts", store.len()))
}

fn check_postings(index: &InvertedIndex, concepts: &ConceptSet) -> std::result::Result<String, String> {
    let mut lists: Vec<Vec<u32>> = Vec::new();
    for d in Dim::ALL {
        lists.clear();
        lists.resize(concepts.dictionary(d).len(), Vec::new());
        for c in concepts {
            for &e in c.component(d) {
                lists[e as usize].push(c.id as u32);
            }
        }
        for (e, list) in lists.iter().enumerate() {
            if index.postings(d, e as ElemId) != list.as_slice() {
                return Err(format!("{d} element {e} posting list differs"));
            }
        }
    }
    Ok(format!("{} postings", index.total_postings()))
}

fn check_round_trip(index: &InvertedIndex) -> std::result::Result<String, String> {
    let mut buf = Vec::new();
    index.write_to(&mut buf).map_err(|e| e.to_string())?;
    match InvertedIndex::read_from(buf.as_slice()) {
        Ok(back) if &back == index => Ok(format!("{} bytes", buf.len())),
        Ok(_) => Err("reloaded index differs".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Concept-derived queries of every shape with random tolerance, mode and
/// scope, plus a few random element picks that need not co-occur.
pub fn sample_queries(concepts: &ConceptSet, count: usize, seed: u64) -> Vec<Query> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 10 {
        attempts += 1;
        let shape = *SHAPES.choose(&mut rng).expect("shapes");
        let base = if rng.gen_bool(0.75) {
            sample_query(concepts, shape, &mut rng)
        } else {
            random_query(concepts, shape, &mut rng)
        };
        let Some(q) = base else { continue };
        let theta = rng.gen_range(0..=q.len() as i64);
        let mode = if rng.gen_bool(0.2) {
            MatchMode::Exact
        } else {
            MatchMode::Contains
        };
        let scope = if rng.gen_bool(0.2) {
            ToleranceScope::PerDimension
        } else {
            ToleranceScope::Total
        };
        if let Ok(q) = q.with_theta(theta) {
            out.push(q.with_mode(mode).with_scope(scope));
        }
    }
    out
}

fn random_query(concepts: &ConceptSet, shape: [bool; 3], rng: &mut StdRng) -> Option<Query> {
    let sets = Dim::ALL.map(|d| {
        let n = concepts.dictionary(d).len() as ElemId;
        if !shape[d.index()] || n == 0 {
            return Vec::new();
        }
        (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..n)).collect()
    });
    Query::new(sets).ok()
}

fn check_retrieval(
    index: &InvertedIndex,
    concepts: &ConceptSet,
    queries: &[Query],
) -> std::result::Result<String, String> {
    for (i, q) in queries.iter().enumerate() {
        if relevant_concepts(index, concepts, q) != relevant_concepts_scan(concepts, q) {
            return Err(format!("query {i} {} differs", q.render(concepts.dictionaries())));
        }
    }
    Ok(format!("{} queries", queries.len()))
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact score as a reduced fraction.
pub fn exact_score(q: &Query, c: &TriadicConcept) -> (u128, u128) {
    let (mut num, mut den) = (0u128, 1u128);
    for d in Dim::ALL {
        let x = q.component(d);
        if x.is_empty() {
            continue;
        }
        let a = c.component(d);
        let inter = x.iter().filter(|e| a.binary_search(e).is_ok()).count() as u128;
        let m = x.len().max(a.len()) as u128;
        // inter * (m + 1) / m * |x| / |q|
        let (tn, td) = (inter * (m + 1) * x.len() as u128, m * q.len() as u128);
        num = num * td + tn * den;
        den *= td;
        let g = gcd(num, den).max(1);
        num /= g;
        den /= g;
    }
    (num, den)
}

fn check_scores(
    index: &InvertedIndex,
    concepts: &ConceptSet,
    queries: &[Query],
) -> std::result::Result<String, String> {
    let mut scored = 0;
    for (i, q) in queries.iter().enumerate() {
        let ranked: Vec<RankedHit> = rerank(&relevant_concepts(index, concepts, q), q, concepts);
        for hit in &ranked {
            let c = concepts
                .get(hit.id)
                .ok_or_else(|| format!("query {i}: unknown id {}", hit.id))?;
            let (num, den) = exact_score(q, c);
            let exact = num as f64 / den as f64;
            if (exact - hit.score).abs() >= 1e-9 {
                return Err(format!(
                    "query {i}: concept {} scored {} but the formula gives {exact}",
                    hit.id, hit.score
                ));
            }
            scored += 1;
        }
        if ranked.windows(2).any(|w| w[0].score < w[1].score) {
            return Err(format!("query {i}: ranking is not by descending score"));
        }
    }
    Ok(format!("{scored} scores"))
}

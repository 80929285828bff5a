//! Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if
//! any fails.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use triq::baseline::BaselineEngine;
use triq::bench::{self, BenchConfig};
use triq::fixtures::{concept, purchases, PURCHASES_NAMED_CONCEPTS};
use triq::format::render_concept;
use triq::query::{parse_query, relevant_concepts, relevant_concepts_scan, rerank, LabelStyle};
use triq::synth::{numbered_dictionaries, uniform, PrototypeShape};
use triq::validate::sample_queries;
use triq::{
    mine_concepts, mine_concepts_bruteforce, search, ConceptId, ConceptSet, Dim, ElemId, InvertedIndex, MatchMode,
    Query, TriadicConcept, TriadicContext,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

struct Sample {
    ctx: TriadicContext,
    set: ConceptSet,
    index: InvertedIndex,
}

impl Sample {
    fn new() -> Sample {
        let ctx = purchases();
        let set = mine_concepts(&ctx);
        let index = InvertedIndex::build(&set);
        Sample { ctx, set, index }
    }

    fn q(&self, text: &str) -> Query {
        parse_query(text, self.set.dictionaries(), LabelStyle::Chars).unwrap()
    }

    fn id(&self, shorthand: &str) -> Option<ConceptId> {
        self.set
            .id_of(concept(&self.ctx, shorthand).each_ref().map(Vec::as_slice))
    }

    fn ids(&self, shorthands: &[&str]) -> BTreeSet<ConceptId> {
        shorthands.iter().map(|s| self.id(s).unwrap_or(usize::MAX)).collect()
    }

    fn show(&self, id: ConceptId) -> String {
        render_concept(self.set.dictionaries(), self.set.get(id).unwrap())
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Expected `(shorthand, score)` prefix of the ranking, in order.
fn ranked_prefix(s: &Sample, q: &Query, expected: &[(&str, f64)]) -> Outcome {
    let hits = search(&s.index, &s.set, q);
    let mut shown = Vec::new();
    for (i, (shorthand, score)) in expected.iter().enumerate() {
        let hit = hits.get(i).ok_or(format!("only {} hits", hits.len()))?;
        shown.push(format!("{}={:.2}", s.show(hit.id), hit.score));
        if Some(hit.id) != s.id(shorthand) || (round2(hit.score) - score).abs() > 0.005 {
            return Err(format!(
                "rank {} is {}={:.4}, want {shorthand}={score}",
                i + 1,
                s.show(hit.id),
                hit.score
            ));
        }
    }
    Ok(shown.join(" "))
}

fn kp_scores() -> Outcome {
    let start = Instant::now();
    let s = Sample::new();
    let q = s.q("(-,KP,-)");
    let detail = ranked_prefix(
        &s,
        &q,
        &[("1346|KP|ab", 3.00), ("146|KNP|ab", 2.67), ("346|KPR|ab", 2.67)],
    )?;
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 1.0 {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{detail} in {elapsed:.2?}"))
}

fn r_ab_scores() -> Outcome {
    let s = Sample::new();
    let hits = search(&s.index, &s.set, &s.q("(-,R,ab)"));
    if hits.len() < 3 {
        return Err(format!("only {} hits", hits.len()));
    }
    let first_ok = Some(hits[0].id) == s.id("23456|R|ab") && (round2(hits[0].score) - 2.67).abs() <= 0.005;
    let next: BTreeSet<ConceptId> = hits[1..3].iter().map(|h| h.id).collect();
    let next_ok = next == s.ids(&["3456|KR|ab", "246|NR|ab"])
        && hits[1..3].iter().all(|h| (round2(h.score) - 2.50).abs() <= 0.005);
    let shown: Vec<String> = hits[..3]
        .iter()
        .map(|h| format!("{}={:.2}", s.show(h.id), h.score))
        .collect();
    if first_ok && next_ok {
        Ok(shown.join(" "))
    } else {
        Err(shown.join(" "))
    }
}

fn three_r_c_scores() -> Outcome {
    let s = Sample::new();
    let q = s.q("(3,R,c)").with_theta(2).unwrap();
    let detail = ranked_prefix(&s, &q, &[("16|R|ac", 1.17), ("23456|R|ab", 1.07), ("3456|KR|ab", 0.92)])?;
    let hits = search(&s.index, &s.set, &q);
    let fifth = hits.get(4).map(|h| h.id);
    if fifth != s.id("123456||abcd") {
        return Err(format!("rank 5 is {:?}", fifth.map(|id| s.show(id))));
    }
    Ok(format!("{detail}, rank 5 {}", s.show(hits[4].id)))
}

fn tolerance() -> Outcome {
    let s = Sample::new();
    let six = [
        "1346|KP|ab",
        "1346|P|abd",
        "13456|K|ab",
        "123456|NP|ad",
        "123456|KNPRST|a",
        "123456||abcd",
    ];
    let seven = [
        "16|R|ac",
        "146|KNP|ab",
        "146|NP|abd",
        "346|KPR|ab",
        "3456|KR|ab",
        "1246|N|abd",
        "23456|R|ab",
    ];
    let got = |theta| -> BTreeSet<ConceptId> {
        let q = s.q("(13,-,-)").with_theta(theta).unwrap();
        relevant_concepts(&s.index, &s.set, &q).iter().map(|c| c.id).collect()
    };
    let (zero, one) = (got(0), got(1));
    let want_one = s.ids(&[&six[..], &seven[..]].concat());
    if zero == s.ids(&six) && one == want_one && one.len() == 13 {
        Ok(format!("Θ=0: {} concepts, Θ=1: {} concepts", zero.len(), one.len()))
    } else {
        Err(format!("Θ=0: {} concepts, Θ=1: {} concepts", zero.len(), one.len()))
    }
}

fn exact_mode() -> Outcome {
    let s = Sample::new();
    let q = s.q("(146,-,-)").with_mode(MatchMode::Exact);
    let got: BTreeSet<ConceptId> = relevant_concepts(&s.index, &s.set, &q).iter().map(|c| c.id).collect();
    let shown: Vec<String> = got.iter().map(|&id| s.show(id)).collect();
    if got == s.ids(&["146|KNP|ab", "146|NP|abd"]) {
        Ok(shown.join(" "))
    } else {
        Err(shown.join(" "))
    }
}

fn baseline_agreement() -> Outcome {
    let s = Sample::new();
    let engine = BaselineEngine::build(&s.ctx, s.set.clone());
    let cases: [(&str, i64, &[&str]); 3] = [
        ("(-,KP,-)", 0, &["1346|KP|ab"]),
        ("(-,R,ab)", 0, &["23456|R|ab"]),
        ("(3,R,c)", 2, &["16|R|ac", "123456||abcd", "23456|R|ab"]),
    ];
    let mut detail = Vec::new();
    for (text, theta, want) in cases {
        let q = s.q(text).with_theta(theta).unwrap();
        let answer: BTreeSet<ConceptId> = engine.answer(&q).map_err(|e| e.to_string())?.into_iter().collect();
        if answer != s.ids(want) {
            let shown: Vec<String> = answer.iter().map(|&id| s.show(id)).collect();
            return Err(format!("{text}: baseline gave {}", shown.join(" ")));
        }
        let top5: BTreeSet<ConceptId> = search(&s.index, &s.set, &q.with_k(Some(5)))
            .iter()
            .map(|h| h.id)
            .collect();
        if !answer.is_subset(&top5) {
            return Err(format!("{text}: baseline answer not within our top-5"));
        }
        detail.push(format!("{text} -> {}", answer.len()));
    }
    Ok(detail.join(", "))
}

fn miner_correctness() -> Outcome {
    let ctx = purchases();
    let mined = mine_concepts(&ctx);
    if mined != mine_concepts_bruteforce(&ctx).map_err(|e| e.to_string())? {
        return Err("sample context differs from brute force".into());
    }
    let s = Sample::new();
    if let Some(missing) = PURCHASES_NAMED_CONCEPTS.iter().find(|c| s.id(c).is_none()) {
        return Err(format!("{missing} not mined"));
    }
    let mut rng = StdRng::seed_from_u64(2024);
    for i in 0..100 {
        let sizes = [rng.gen_range(1..=5), rng.gen_range(1..=5), rng.gen_range(1..=4)];
        let density = rng.gen_range(0.1..0.9);
        let ctx = uniform(sizes, density, rng.gen());
        let oracle = mine_concepts_bruteforce(&ctx).map_err(|e| e.to_string())?;
        if mine_concepts(&ctx) != oracle {
            return Err(format!("random context {i} ({sizes:?}, density {density:.2}) differs"));
        }
    }
    Ok(format!(
        "sample: {} concepts, 16 named present; 100 random contexts agree",
        mined.len()
    ))
}

/// Score as a reduced fraction, straight from the definition.
fn rational_score(q: &Query, c: &TriadicConcept) -> (u128, u128) {
    fn gcd(a: u128, b: u128) -> u128 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let total = q.len() as u128;
    let (mut num, mut den) = (0u128, 1u128);
    for d in Dim::ALL {
        let x: HashSet<ElemId> = q.component(d).iter().copied().collect();
        if x.is_empty() {
            continue;
        }
        let a: HashSet<ElemId> = c.component(d).iter().copied().collect();
        let inter = x.intersection(&a).count() as u128;
        let m = x.len().max(a.len()) as u128;
        let (tn, td) = ((inter * m + inter) * x.len() as u128, m * total);
        num = num * td + tn * den;
        den *= td;
        let g = gcd(num, den).max(1);
        num /= g;
        den /= g;
    }
    (num, den)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(77);
    let (mut queries, mut scored) = (0, 0);
    for i in 0..20 {
        let sizes = [rng.gen_range(3..=8), rng.gen_range(3..=6), rng.gen_range(2..=4)];
        let ctx = uniform(sizes, rng.gen_range(0.3..0.8), rng.gen());
        let set = mine_concepts(&ctx);
        let index = InvertedIndex::build(&set);
        for q in sample_queries(&set, 10, rng.gen()) {
            queries += 1;
            let via_index = relevant_concepts(&index, &set, &q);
            if via_index != relevant_concepts_scan(&set, &q) {
                return Err(format!(
                    "context {i}: {} retrieval differs",
                    q.render(set.dictionaries())
                ));
            }
            for hit in rerank(&via_index, &q, &set) {
                let (num, den) = rational_score(&q, set.get(hit.id).unwrap());
                let err = (num as f64 / den as f64 - hit.score).abs();
                if err >= 1e-9 {
                    return Err(format!("context {i}: score error {err:e}"));
                }
                scored += 1;
            }
        }
    }
    if queries != 200 {
        return Err(format!("only {queries} queries sampled"));
    }
    Ok(format!("{queries} queries, {scored} scores recomputed"))
}

fn scalability() -> Outcome {
    let ctx = PrototypeShape::mushroom().generate();
    let set = mine_concepts(&ctx);
    if set.len() < 1000 {
        return Err(format!("only {} concepts", set.len()));
    }
    let report = bench::run(
        &ctx,
        &set,
        BenchConfig {
            repetitions: 5,
            queries: 20,
            seed: 3,
        },
    )
    .map_err(|e| e.to_string())?;
    let build = report.row(bench::STRUCTURE_ROW).unwrap();
    let one_d = report.row("(-,-,X₃)").unwrap();
    let ratio = one_d.baseline.mean_ms / one_d.ours.mean_ms;
    let detail = format!(
        "{} concepts; build {:.3} ms vs {:.3} ms; (-,-,X₃) {:.4} ms vs {:.3} ms ({ratio:.0}x)",
        set.len(),
        build.ours.mean_ms,
        build.baseline.mean_ms,
        one_d.ours.mean_ms,
        one_d.baseline.mean_ms
    );
    if build.ours.mean_ms < build.baseline.mean_ms && ratio >= 10.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn synthetic_store(n: usize, seed: u64) -> ConceptSet {
    let sizes = [400, 60, 12];
    let mut rng = StdRng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    while seen.len() < n {
        let sets: [Vec<ElemId>; 3] = sizes.map(|m| {
            let mut v: Vec<ElemId> = (0..rng.gen_range(0..=8))
                .map(|_| rng.gen_range(0..m as ElemId))
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        });
        seen.insert(sets);
    }
    ConceptSet::from_trisets(numbered_dictionaries(sizes), seen)
}

fn round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for (name, set) in [
        ("sample", mine_concepts(&purchases())),
        ("synthetic", synthetic_store(10_000, 5)),
    ] {
        let index = InvertedIndex::build(&set);
        let path = dir.path().join(format!("{name}.idx"));
        index.save(&path).map_err(|e| e.to_string())?;
        let back = InvertedIndex::load(&path).map_err(|e| e.to_string())?;
        let same = Dim::ALL.iter().all(|&d| {
            back.element_count(d) == index.element_count(d)
                && (0..index.element_count(d) as ElemId).all(|e| back.postings(d, e) == index.postings(d, e))
        });
        if !same || back != index || back.concept_count() != set.len() {
            return Err(format!("{name} posting maps differ after reload"));
        }
        detail.push(format!(
            "{name}: {} concepts, {} postings",
            set.len(),
            index.total_postings()
        ));
    }
    Ok(detail.join("; "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("score reproduction (-,KP,-)", kp_scores),
        ("score reproduction (-,R,ab)", r_ab_scores),
        ("score reproduction (3,R,c)", three_r_c_scores),
        ("tolerance semantics (13,-,-)", tolerance),
        ("exact mode (146,-,-)", exact_mode),
        ("baseline agreement", baseline_agreement),
        ("miner correctness", miner_correctness),
        ("oracle equivalence", oracle_equivalence),
        ("scalability", scalability),
        ("index round-trip", round_trip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS {name}: {detail}"),
            Ok(Err(detail)) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Timing harness comparing the index engine with the baseline engine on
//! structure creation and the seven query shapes.

use std::fmt;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::baseline::BaselineEngine;
use crate::context::{Dim, ElemId, TriadicContext};
use crate::error::Result;
use crate::index::InvertedIndex;
use crate::miner::ConceptSet;
use crate::query::{search, Query};

/// Query shapes in report order; `true` marks a specified dimension.
pub const SHAPES: [[bool; 3]; 7] = [
    [false, false, true],
    [false, true, false],
    [true, false, false],
    [false, true, true],
    [true, false, true],
    [true, true, false],
    [true, true, true],
];

pub const STRUCTURE_ROW: &str = "Create data structure";

/// `(-,-,X₃)` style label.
pub fn shape_label(shape: [bool; 3]) -> String {
    let fields: Vec<&str> = Dim::ALL
        .iter()
        .map(|d| match (shape[d.index()], d) {
            (false, _) => "-",
            (true, Dim::Object) => "X₁",
            (true, Dim::Attribute) => "X₂",
            (true, Dim::Condition) => "X₃",
        })
        .collect();
    format!("({})", fields.join(","))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BenchConfig {
    pub repetitions: usize,
    /// Queries sampled per shape.
    pub queries: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            repetitions: 3,
            queries: 20,
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dataset {
    pub objects: usize,
    pub attributes: usize,
    pub conditions: usize,
    pub incidence: usize,
    pub concepts: usize,
}

/// Samples in milliseconds with their mean and sample standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub samples_ms: Vec<f64>,
    pub mean_ms: f64,
    pub std_ms: f64,
}

impl Timing {
    pub fn from_samples(samples: &[Duration]) -> Timing {
        let samples_ms: Vec<f64> = samples.iter().map(|d| d.as_secs_f64() * 1e3).collect();
        let n = samples_ms.len() as f64;
        let mean_ms = samples_ms.iter().sum::<f64>() / n;
        let std_ms = if samples_ms.len() > 1 {
            (samples_ms.iter().map(|x| (x - mean_ms).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Timing {
            samples_ms,
            mean_ms,
            std_ms,
        }
    }
}

impl fmt::Display for Timing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.samples_ms.is_empty() {
            return f.write_str("n/a");
        }
        write!(f, "{} ± {}", sig3(self.mean_ms), sig3(self.std_ms))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub operation: String,
    pub ours: Timing,
    pub baseline: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub dataset: Dataset,
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, operation: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.operation == operation)
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.dataset;
        writeln!(
            f,
            "context {}x{}x{}, |Y| = {}, {} concepts, {} repetitions, {} queries per shape (ms)",
            d.objects,
            d.attributes,
            d.conditions,
            d.incidence,
            d.concepts,
            self.config.repetitions,
            self.config.queries
        )?;
        let cells: Vec<[String; 3]> = self
            .rows
            .iter()
            .map(|r| [r.operation.clone(), r.ours.to_string(), r.baseline.to_string()])
            .collect();
        let header = ["operation".to_string(), "ours".to_string(), "baseline".to_string()];
        let widths: Vec<usize> = (0..3)
            .map(|i| {
                cells
                    .iter()
                    .chain(std::iter::once(&header))
                    .map(|c| c[i].chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        for line in std::iter::once(&header).chain(&cells) {
            let padded: Vec<String> = line
                .iter()
                .zip(&widths)
                .map(|(s, &w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
                .collect();
            writeln!(f, "{}", padded.join(" | ").trim_end())?;
        }
        Ok(())
    }
}

/// Three significant digits, no exponent.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = 2 - magnitude;
    if decimals >= 0 {
        format!("{x:.*}", decimals as usize)
    } else {
        let unit = 10f64.powi(-decimals);
        format!("{:.0}", (x / unit).round() * unit)
    }
}

/// Random query for `shape`: a uniformly drawn concept whose specified
/// components are non-empty, reduced to a random non-empty subset in each
/// specified dimension. `None` if no concept qualifies.
pub fn sample_query(concepts: &ConceptSet, shape: [bool; 3], rng: &mut StdRng) -> Option<Query> {
    let eligible: Vec<_> = concepts
        .iter()
        .filter(|c| {
            Dim::ALL
                .iter()
                .all(|&d| !shape[d.index()] || !c.component(d).is_empty())
        })
        .collect();
    let concept = eligible.choose(rng)?;
    let sets = Dim::ALL.map(|d| {
        if !shape[d.index()] {
            return Vec::new();
        }
        let from = concept.component(d);
        let n = rng.gen_range(1..=from.len());
        let mut picked: Vec<ElemId> = from.choose_multiple(rng, n).copied().collect();
        picked.sort_unstable();
        picked
    });
    Query::new(sets).ok()
}

/// Builds both engines `repetitions` times, then times every sampled query
/// on each engine, one engine after the other.
pub fn run(ctx: &TriadicContext, concepts: &ConceptSet, config: BenchConfig) -> Result<BenchReport> {
    let reps = config.repetitions.max(1);
    let mut index_samples = Vec::with_capacity(reps);
    let mut dyadic_samples = Vec::with_capacity(reps);
    let mut index = InvertedIndex::build(concepts);
    let mut engine = BaselineEngine::build(ctx, concepts.clone());
    for _ in 0..reps {
        let start = Instant::now();
        index = InvertedIndex::build(concepts);
        index_samples.push(start.elapsed());
        engine = BaselineEngine::build(ctx, concepts.clone());
        dyadic_samples.push(engine.metrics().total);
    }
    let mut rows = vec![BenchRow {
        operation: STRUCTURE_ROW.to_string(),
        ours: Timing::from_samples(&index_samples),
        baseline: Timing::from_samples(&dyadic_samples),
    }];

    let mut rng = StdRng::seed_from_u64(config.seed);
    for shape in SHAPES {
        let queries: Vec<Query> = (0..config.queries)
            .filter_map(|_| sample_query(concepts, shape, &mut rng))
            .collect();
        let (mut ours, mut baseline) = (Vec::new(), Vec::new());
        if !queries.is_empty() {
            for _ in 0..reps {
                let start = Instant::now();
                for q in &queries {
                    std::hint::black_box(search(&index, concepts, q));
                }
                ours.push(start.elapsed() / queries.len() as u32);
                let start = Instant::now();
                for q in &queries {
                    std::hint::black_box(engine.answer(q)?);
                }
                baseline.push(start.elapsed() / queries.len() as u32);
            }
        }
        rows.push(BenchRow {
            operation: shape_label(shape),
            ours: Timing::from_samples(&ours),
            baseline: Timing::from_samples(&baseline),
        });
    }

    let [objects, attributes, conditions] = ctx.sizes();
    Ok(BenchReport {
        dataset: Dataset {
            objects,
            attributes,
            conditions,
            incidence: ctx.incidence_len(),
            concepts: concepts.len(),
        },
        config: BenchConfig {
            repetitions: reps,
            ..config
        },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::purchases;
    use crate::miner::mine_concepts;

    #[test]
    fn three_significant_digits() {
        assert_eq!(sig3(0.0001234), "0.000123");
        assert_eq!(sig3(1.2345), "1.23");
        assert_eq!(sig3(12.345), "12.3");
        assert_eq!(sig3(123.45), "123");
        assert_eq!(sig3(12345.6), "12300");
        assert_eq!(sig3(0.0), "0");
    }

    #[test]
    fn labels_in_report_order() {
        let labels: Vec<String> = SHAPES.iter().map(|&s| shape_label(s)).collect();
        assert_eq!(
            labels,
            [
                "(-,-,X₃)",
                "(-,X₂,-)",
                "(X₁,-,-)",
                "(-,X₂,X₃)",
                "(X₁,-,X₃)",
                "(X₁,X₂,-)",
                "(X₁,X₂,X₃)"
            ]
        );
    }

    #[test]
    fn timing_statistics() {
        let t = Timing::from_samples(&[
            Duration::from_millis(1),
            Duration::from_millis(2),
            Duration::from_millis(3),
        ]);
        assert!((t.mean_ms - 2.0).abs() < 1e-12);
        assert!((t.std_ms - 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_has_every_row() {
        let ctx = purchases();
        let set = mine_concepts(&ctx);
        let report = run(&ctx, &set, BenchConfig::default()).unwrap();
        assert_eq!(report.rows.len(), 8);
        assert_eq!(report.rows[0].operation, STRUCTURE_ROW);
        for (row, shape) in report.rows[1..].iter().zip(SHAPES) {
            assert_eq!(row.operation, shape_label(shape));
            assert_eq!(row.ours.samples_ms.len(), 3);
            assert_eq!(row.baseline.samples_ms.len(), 3);
        }
        assert_eq!(report.dataset.concepts, set.len());
        let table = report.to_string();
        assert!(table.contains("(X₁,X₂,X₃)"));
    }

    #[test]
    fn sampling_is_seeded_and_respects_shape() {
        let set = mine_concepts(&purchases());
        for shape in SHAPES {
            let draw = |seed| {
                let mut rng = StdRng::seed_from_u64(seed);
                (0..10)
                    .map(|_| sample_query(&set, shape, &mut rng).unwrap())
                    .collect::<Vec<_>>()
            };
            let a = draw(5);
            assert_eq!(a, draw(5));
            for q in &a {
                assert_eq!(q.shape(), shape);
                let from_some_concept = set.iter().any(|c| {
                    Dim::ALL
                        .iter()
                        .all(|&d| q.component(d).iter().all(|e| c.component(d).contains(e)))
                });
                assert!(from_some_concept);
            }
        }
    }
}

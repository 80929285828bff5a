//! Triple queries over the inverted index and their similarity ranking.
//!
//! A query `(X1, X2, X3)` names elements in up to three dimensions. The
//! index yields every concept sharing at least `|query| - Θ` of those
//! elements; each candidate `(A1, A2, A3)` is then scored with
//!
//! ```text
//! ΔAi   = |Xi ∩ Ai| + |Xi ∩ Ai| / max(|Xi|, |Ai|)      (for non-empty Xi)
//! score = Σ ΔAi · |Xi| / |query|
//! ```
//!
//! so dimensions carrying more query elements weigh more, and a component
//! that matches the query without extra elements scores highest.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::context::{Dim, ElemId, ElementDictionary};
use crate::error::{Error, Result};
use crate::format::{render_set, single_char_labels};
use crate::index::InvertedIndex;
use crate::miner::{ConceptId, ConceptSet, TriadicConcept};

/// How candidate components must relate to the query sets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMode {
    /// Shared elements are counted; tolerance bounds the missing ones.
    #[default]
    Contains,
    /// Every specified component must equal its query set.
    Exact,
}

/// What the tolerance Θ bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceScope {
    /// Missing elements summed over all dimensions.
    #[default]
    Total,
    /// Missing elements within each specified dimension.
    PerDimension,
}

/// How a bare query field is split into labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelStyle {
    /// Every character is a label: `KP` is `{K, P}`.
    Chars,
    /// Whitespace separates labels: `10 12` is `{10, 12}`.
    Spaced,
}

impl LabelStyle {
    /// `Chars` when all labels of all dimensions are one character long.
    pub fn detect(dicts: &[ElementDictionary; 3]) -> LabelStyle {
        if dicts.iter().all(single_char_labels) {
            LabelStyle::Chars
        } else {
            LabelStyle::Spaced
        }
    }
}

macro_rules! impl_from_str {
    ($ty:ty, $($text:literal => $val:expr),+) => {
        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text => Ok($val),)+
                    other => Err(format!("unknown value `{other}`")),
                }
            }
        }
    };
}

impl_from_str!(MatchMode, "contains" => MatchMode::Contains, "exact" => MatchMode::Exact);
impl_from_str!(ToleranceScope, "total" => ToleranceScope::Total, "per-dimension" => ToleranceScope::PerDimension);
impl_from_str!(LabelStyle, "chars" => LabelStyle::Chars, "spaced" => LabelStyle::Spaced);

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchMode::Contains => "contains",
            MatchMode::Exact => "exact",
        })
    }
}

/// A triple query with its retrieval settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    sets: [Vec<ElemId>; 3],
    theta: usize,
    mode: MatchMode,
    scope: ToleranceScope,
    k: Option<usize>,
}

impl Query {
    /// At least one set must be non-empty. Tolerance starts at 0.
    pub fn new(mut sets: [Vec<ElemId>; 3]) -> Result<Query> {
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
        }
        if sets.iter().all(Vec::is_empty) {
            return Err(Error::EmptyQuery);
        }
        Ok(Query {
            sets,
            theta: 0,
            mode: MatchMode::default(),
            scope: ToleranceScope::default(),
            k: None,
        })
    }

    /// Sets Θ, clamped to `|query|`.
    pub fn with_theta(mut self, theta: i64) -> Result<Query> {
        if theta < 0 {
            return Err(Error::NegativeTolerance(theta));
        }
        self.theta = (theta as u64).min(self.len() as u64) as usize;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: MatchMode) -> Query {
        self.mode = mode;
        self
    }

    pub fn with_scope(mut self, scope: ToleranceScope) -> Query {
        self.scope = scope;
        self
    }

    pub fn with_k(mut self, k: Option<usize>) -> Query {
        self.k = k;
        self
    }

    pub fn component(&self, dim: Dim) -> &[ElemId] {
        &self.sets[dim.index()]
    }

    pub fn components(&self) -> [&[ElemId]; 3] {
        [&self.sets[0], &self.sets[1], &self.sets[2]]
    }

    /// `|X1| + |X2| + |X3|`.
    pub fn len(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Which dimensions are specified.
    pub fn shape(&self) -> [bool; 3] {
        self.sets.each_ref().map(|s| !s.is_empty())
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn mode(&self) -> MatchMode {
        self.mode
    }

    pub fn scope(&self) -> ToleranceScope {
        self.scope
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    /// `(13, -, -)` style rendering.
    pub fn render(&self, dicts: &[ElementDictionary; 3]) -> String {
        let fields: Vec<String> = Dim::ALL
            .iter()
            .map(|&d| match self.component(d) {
                [] => "-".to_owned(),
                ids => render_set(&dicts[d.index()], ids),
            })
            .collect();
        format!("({})", fields.join(", "))
    }
}

/// Parses `(F1, F2, F3)`. A field is `-` (unspecified), a braced list of
/// labels `{10, 12}`, or a bare token split according to `style`.
pub fn parse_query(text: &str, dicts: &[ElementDictionary; 3], style: LabelStyle) -> Result<Query> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::QuerySyntax(format!("expected `(F1, F2, F3)`, got `{}`", text.trim())))?;

    let fields = split_fields(inner)?;
    let mut sets: [Vec<ElemId>; 3] = Default::default();
    for d in Dim::ALL {
        let field = fields[d.index()];
        let labels: Vec<String> = if field == "-" {
            Vec::new()
        } else if let Some(list) = field.strip_prefix('{').and_then(|f| f.strip_suffix('}')) {
            list.split(',')
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_owned)
                .collect()
        } else if field.is_empty() {
            return Err(Error::QuerySyntax(format!("empty {d} field; use `-` for unspecified")));
        } else {
            match style {
                LabelStyle::Chars => field.chars().filter(|c| !c.is_whitespace()).map(String::from).collect(),
                LabelStyle::Spaced => field.split_whitespace().map(str::to_owned).collect(),
            }
        };
        for label in labels {
            sets[d.index()].push(dicts[d.index()].resolve(&label)?);
        }
    }
    Query::new(sets)
}

fn split_fields(inner: &str) -> Result<[&str; 3]> {
    let mut fields = Vec::with_capacity(3);
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in inner.char_indices() {
        match ch {
            '{' => depth += 1,
            '}' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::QuerySyntax("unbalanced `}`".into()))?
            }
            ',' if depth == 0 => {
                fields.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::QuerySyntax("unbalanced `{`".into()));
    }
    fields.push(inner[start..].trim());
    fields
        .try_into()
        .map_err(|f: Vec<&str>| Error::QuerySyntax(format!("expected 3 fields, got {}", f.len())))
}

/// A retrieved concept with the number of query elements it holds per
/// dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub id: ConceptId,
    pub overlap: [usize; 3],
}

impl Candidate {
    pub fn hits(&self) -> usize {
        self.overlap.iter().sum()
    }
}

/// A ranked answer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedHit {
    pub id: ConceptId,
    pub score: f64,
    /// `|Xi ∩ Ai|` per dimension.
    pub overlap: [usize; 3],
    pub hits: usize,
    /// Query elements absent from the concept.
    pub missing: usize,
}

fn admits(q: &Query, overlap: [usize; 3], concept: &TriadicConcept) -> bool {
    let hits: usize = overlap.iter().sum();
    if hits == 0 {
        return false;
    }
    let within_tolerance = match q.scope {
        ToleranceScope::Total => hits + q.theta >= q.len(),
        ToleranceScope::PerDimension => Dim::ALL
            .iter()
            .all(|&d| overlap[d.index()] + q.theta >= q.component(d).len()),
    };
    within_tolerance
        && (q.mode == MatchMode::Contains
            || Dim::ALL
                .iter()
                .filter(|&&d| !q.component(d).is_empty())
                .all(|&d| q.component(d) == concept.component(d)))
}

/// Concepts sharing enough query elements, gathered from the posting lists
/// of the query's elements. Sorted by id.
pub fn relevant_concepts(index: &InvertedIndex, concepts: &ConceptSet, q: &Query) -> Vec<Candidate> {
    let mut counts = vec![[0usize; 3]; index.concept_count()];
    let mut touched = Vec::new();
    for d in Dim::ALL {
        for &e in q.component(d) {
            for &c in index.postings(d, e) {
                let slot = &mut counts[c as usize];
                if *slot == [0; 3] {
                    touched.push(c as usize);
                }
                slot[d.index()] += 1;
            }
        }
    }
    touched.sort_unstable();
    touched
        .into_iter()
        .filter_map(|id| {
            let overlap = counts[id];
            let concept = concepts.get(id)?;
            admits(q, overlap, concept).then_some(Candidate { id, overlap })
        })
        .collect()
}

/// Linear scan computing the same answer as [`relevant_concepts`] without
/// the index.
pub fn relevant_concepts_scan(concepts: &ConceptSet, q: &Query) -> Vec<Candidate> {
    concepts
        .iter()
        .filter_map(|c| {
            let overlap = Dim::ALL.map(|d| intersection_len(q.component(d), c.component(d)));
            admits(q, overlap, c).then_some(Candidate { id: c.id, overlap })
        })
        .collect()
}

/// Similarity of one concept to the query.
pub fn score(q: &Query, concept: &TriadicConcept) -> f64 {
    let total = q.len() as f64;
    Dim::ALL
        .iter()
        .filter(|&&d| !q.component(d).is_empty())
        .map(|&d| {
            let x = q.component(d);
            let a = concept.component(d);
            let mut delta = intersection_len(x, a) as f64;
            delta += delta / x.len().max(a.len()) as f64;
            delta * x.len() as f64 / total
        })
        .sum()
}

/// Scores every candidate and orders them by score (descending), then by
/// (extent, intent, modus) and id.
pub fn rerank(candidates: &[Candidate], q: &Query, concepts: &ConceptSet) -> Vec<RankedHit> {
    let mut hits: Vec<(RankedHit, &TriadicConcept)> = candidates
        .iter()
        .filter_map(|cand| {
            let concept = concepts.get(cand.id)?;
            let overlap = Dim::ALL.map(|d| intersection_len(q.component(d), concept.component(d)));
            let hits = overlap.iter().sum();
            Some((
                RankedHit {
                    id: cand.id,
                    score: score(q, concept),
                    overlap,
                    hits,
                    missing: q.len() - hits,
                },
                concept,
            ))
        })
        .collect();
    hits.sort_by(|(a, ca), (b, cb)| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| ca.components().cmp(&cb.components()))
            .then_with(|| a.id.cmp(&b.id))
    });
    hits.into_iter().map(|(h, _)| h).collect()
}

/// Retrieval, ranking, then the optional top-k cut.
pub fn search(index: &InvertedIndex, concepts: &ConceptSet, q: &Query) -> Vec<RankedHit> {
    let mut ranked = rerank(&relevant_concepts(index, concepts, q), q, concepts);
    if let Some(k) = q.k {
        ranked.truncate(k);
    }
    ranked
}

/// `|a ∩ b|` for sorted slices.
pub(crate) fn intersection_len(a: &[ElemId], b: &[ElemId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

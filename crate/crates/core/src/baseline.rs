//! The derivation-based approximation engine used as the comparison point.
//!
//! Queries are answered from the three dyadic projections of the context:
//!
//! * one dimension `Xi`: derive `Xi^(i)`, factorize the pair set into maximal
//!   rectangles, close each rectangle back to a concept and keep those whose
//!   `i`-th component is minimal;
//! * two dimensions: derive the missing component, then close the given ones
//!   in both orders (one or two concepts);
//! * three dimensions: the triple itself when it is a stored concept,
//!   otherwise the union of its three two-dimensional sub-queries, each
//!   closed in a single order (missing component, then the lower given
//!   dimension, then the higher one).
//!
//! Results are unranked and listed in concept-id order.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::context::{Dim, ElemId, TriadicContext};
use crate::dyadic::DyadicContext;
use crate::error::{Error, Result};
use crate::miner::{factorize, ConceptId, ConceptSet};
use crate::query::Query;

/// Time spent materializing each projection.
#[derive(Clone, Copy, Debug, Default)]
pub struct BuildMetrics {
    pub projections: [Duration; 3],
    pub total: Duration,
}

/// Which closure orders a two-dimensional query runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Orders {
    Both,
    /// Missing component first, then the lower given dimension.
    Primary,
}

pub struct BaselineEngine {
    projections: [DyadicContext; 3],
    concepts: ConceptSet,
    metrics: BuildMetrics,
}

impl BaselineEngine {
    /// Materializes all three projections eagerly.
    pub fn build(ctx: &TriadicContext, concepts: ConceptSet) -> Self {
        let start = Instant::now();
        let mut times = [Duration::ZERO; 3];
        let projections = Dim::ALL.map(|d| {
            let t = Instant::now();
            let p = ctx.project_dyadic(d);
            times[d.index()] = t.elapsed();
            p
        });
        BaselineEngine {
            projections,
            concepts,
            metrics: BuildMetrics {
                projections: times,
                total: start.elapsed(),
            },
        }
    }

    pub fn metrics(&self) -> BuildMetrics {
        self.metrics
    }

    pub fn projection(&self, dim: Dim) -> &DyadicContext {
        &self.projections[dim.index()]
    }

    pub fn concepts(&self) -> &ConceptSet {
        &self.concepts
    }

    /// Dispatches on how many dimensions the query specifies. Tolerance,
    /// mode and k are ignored.
    pub fn answer(&self, q: &Query) -> Result<Vec<ConceptId>> {
        let given: Vec<Dim> = Dim::ALL.into_iter().filter(|&d| !q.component(d).is_empty()).collect();
        match given.as_slice() {
            [d] => self.query_1d(*d, q.component(*d)),
            [a, b] => {
                let missing = Dim::ALL.into_iter().find(|d| !given.contains(d)).expect("one missing");
                self.query_2d(missing, q.component(*a), q.component(*b))
            }
            [_, _, _] => self.query_3d(
                q.component(Dim::Object),
                q.component(Dim::Attribute),
                q.component(Dim::Condition),
            ),
            _ => Err(Error::EmptyQuery),
        }
    }

    /// [`answer`](Self::answer) together with its wall-clock time.
    pub fn answer_timed(&self, q: &Query) -> Result<(Vec<ConceptId>, Duration)> {
        let start = Instant::now();
        let out = self.answer(q)?;
        Ok((out, start.elapsed()))
    }

    /// Smallest concepts whose `dim` component contains `xs`.
    pub fn query_1d(&self, dim: Dim, xs: &[ElemId]) -> Result<Vec<ConceptId>> {
        if xs.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let proj = self.projection(dim);
        let shared = proj.derive_rows(xs)?;
        let (n_first, n_second) = proj.column_dims();
        let features = factorize(n_first, n_second, &proj.pairs(&shared));

        let mut closed: Vec<(Vec<ElemId>, ConceptId)> = Vec::with_capacity(features.len());
        for f in features {
            let own = proj.derive_columns(&f.first, &f.second)?;
            let id = self.lookup(dim, &own, &f.first, &f.second)?;
            closed.push((own, id));
        }
        let mut out: Vec<ConceptId> = closed
            .iter()
            .filter(|(own, _)| {
                !closed
                    .iter()
                    .any(|(other, _)| other.len() < own.len() && is_subset(other, own))
            })
            .map(|&(_, id)| id)
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Two given components, `first` and `second` in ascending dimension
    /// order, with `missing` unspecified.
    pub fn query_2d(&self, missing: Dim, first: &[ElemId], second: &[ElemId]) -> Result<Vec<ConceptId>> {
        self.close_2d(missing, first, second, Orders::Both)
    }

    /// Full triple query.
    pub fn query_3d(&self, x1: &[ElemId], x2: &[ElemId], x3: &[ElemId]) -> Result<Vec<ConceptId>> {
        if x1.is_empty() || x2.is_empty() || x3.is_empty() {
            return Err(Error::EmptyQuery);
        }
        if let Some(id) = self.concepts.id_of([x1, x2, x3]) {
            return Ok(vec![id]);
        }
        let mut out = BTreeSet::new();
        out.extend(self.close_2d(Dim::Condition, x1, x2, Orders::Primary)?);
        out.extend(self.close_2d(Dim::Attribute, x1, x3, Orders::Primary)?);
        out.extend(self.close_2d(Dim::Object, x2, x3, Orders::Primary)?);
        Ok(out.into_iter().collect())
    }

    fn close_2d(&self, missing: Dim, first: &[ElemId], second: &[ElemId], orders: Orders) -> Result<Vec<ConceptId>> {
        if first.is_empty() || second.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let (low, high) = missing.others();
        let derived = self.projection(missing).derive_columns(first, second)?;

        let mut out = BTreeSet::new();
        // low first: A_low = (X_high, A_missing), then A_high = (A_low, A_missing)
        let a_low = self.derive(low, &[(high, second), (missing, &derived)])?;
        let a_high = self.derive(high, &[(low, &a_low), (missing, &derived)])?;
        out.insert(self.lookup_parts([(low, &a_low), (high, &a_high), (missing, &derived)])?);
        if orders == Orders::Both {
            let b_high = self.derive(high, &[(low, first), (missing, &derived)])?;
            let b_low = self.derive(low, &[(high, &b_high), (missing, &derived)])?;
            out.insert(self.lookup_parts([(low, &b_low), (high, &b_high), (missing, &derived)])?);
        }
        Ok(out.into_iter().collect())
    }

    /// `(X_j, X_k)^(dim)` on the projection of `dim`, with the two inputs
    /// given by dimension in any order.
    fn derive(&self, dim: Dim, inputs: &[(Dim, &[ElemId]); 2]) -> Result<Vec<ElemId>> {
        let (j, _) = dim.others();
        let (first, second) = if inputs[0].0 == j {
            (inputs[0].1, inputs[1].1)
        } else {
            (inputs[1].1, inputs[0].1)
        };
        self.projection(dim).derive_columns(first, second)
    }

    fn lookup(&self, dim: Dim, own: &[ElemId], first: &[ElemId], second: &[ElemId]) -> Result<ConceptId> {
        let (j, k) = dim.others();
        self.lookup_parts([(dim, own), (j, first), (k, second)])
    }

    fn lookup_parts(&self, parts: [(Dim, &[ElemId]); 3]) -> Result<ConceptId> {
        let mut sets: [&[ElemId]; 3] = [&[]; 3];
        for (d, s) in parts {
            sets[d.index()] = s;
        }
        self.concepts
            .id_of(sets)
            .ok_or_else(|| Error::UnknownConcept(format!("{sets:?}")))
    }
}

fn is_subset(small: &[ElemId], big: &[ElemId]) -> bool {
    small.iter().all(|e| big.binary_search(e).is_ok())
}

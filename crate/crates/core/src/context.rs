//! Triadic contexts `(K1, K2, K3, Y)`, their element dictionaries and the two
//! triadic derivation operators.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicContext;
use crate::error::{Error, Result};

/// Dense element id within one dimension.
pub type ElemId = u32;

/// One of the three dimensions of a triadic context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dim {
    Object,
    Attribute,
    Condition,
}

impl Dim {
    pub const ALL: [Dim; 3] = [Dim::Object, Dim::Attribute, Dim::Condition];

    /// Zero-based position (objects = 0).
    pub fn index(self) -> usize {
        self as usize
    }

    /// Parses the 1-based dimension index used in the CLI and in formulas.
    pub fn from_index(i: usize) -> Result<Dim> {
        match i {
            1 => Ok(Dim::Object),
            2 => Ok(Dim::Attribute),
            3 => Ok(Dim::Condition),
            _ => Err(Error::InvalidDimension(i)),
        }
    }

    /// The two remaining dimensions in ascending order.
    pub fn others(self) -> (Dim, Dim) {
        match self {
            Dim::Object => (Dim::Attribute, Dim::Condition),
            Dim::Attribute => (Dim::Object, Dim::Condition),
            Dim::Condition => (Dim::Object, Dim::Attribute),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dim::Object => "object",
            Dim::Attribute => "attribute",
            Dim::Condition => "condition",
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Places `(a_i, a_j, a_k)` back into `(a1, a2, a3)` order, where `j < k`
/// are the dimensions other than `dim`.
#[inline]
pub fn compose(dim: Dim, a_i: ElemId, a_j: ElemId, a_k: ElemId) -> [ElemId; 3] {
    match dim {
        Dim::Object => [a_i, a_j, a_k],
        Dim::Attribute => [a_j, a_i, a_k],
        Dim::Condition => [a_j, a_k, a_i],
    }
}

/// Bijection between the labels of one dimension and dense ids `0..len`.
///
/// Labels are compared as exact strings. The same label may live in two
/// dimensions; each dimension has its own dictionary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementDictionary {
    dim: Dim,
    labels: Vec<String>,
    ids: HashMap<String, ElemId>,
}

impl ElementDictionary {
    pub fn new(dim: Dim) -> Self {
        ElementDictionary {
            dim,
            labels: Vec::new(),
            ids: HashMap::new(),
        }
    }

    /// Builds a dictionary from labels in id order; repeated labels keep
    /// their first id.
    pub fn from_labels<I, S>(dim: Dim, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut dict = ElementDictionary::new(dim);
        for label in labels {
            dict.intern(label.as_ref());
        }
        dict
    }

    /// Returns the id of `label`, assigning the next free id if it is new.
    pub fn intern(&mut self, label: &str) -> ElemId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len() as ElemId;
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<ElemId> {
        self.ids.get(label).copied()
    }

    /// Like [`id`](Self::id) but reports the unknown label.
    pub fn resolve(&self, label: &str) -> Result<ElemId> {
        self.id(label).ok_or_else(|| Error::UnknownLabel {
            dim: self.dim,
            label: label.to_owned(),
        })
    }

    pub fn label(&self, id: ElemId) -> Option<&str> {
        self.labels.get(id as usize).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub(crate) fn check(&self, id: ElemId) -> Result<()> {
        if (id as usize) < self.labels.len() {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                dim: self.dim,
                id,
                size: self.labels.len(),
            })
        }
    }

    pub(crate) fn check_all(&self, ids: &[ElemId]) -> Result<()> {
        ids.iter().try_for_each(|&id| self.check(id))
    }
}

/// Fresh dictionaries for objects, attributes and conditions.
pub fn empty_dictionaries() -> [ElementDictionary; 3] {
    Dim::ALL.map(ElementDictionary::new)
}

/// A triadic context: three element dictionaries and the ternary incidence
/// relation `Y`.
///
/// `Y` is held twice: as a sorted list of id triples and as a dense bit cube
/// for constant-time membership tests. Immutable after construction.
#[derive(Clone, Debug)]
pub struct TriadicContext {
    dicts: [ElementDictionary; 3],
    triples: Vec<[ElemId; 3]>,
    cube: FixedBitSet,
}

impl PartialEq for TriadicContext {
    fn eq(&self, other: &Self) -> bool {
        self.dicts == other.dicts && self.triples == other.triples
    }
}

impl TriadicContext {
    /// Builds a context from labelled triples. Duplicate triples collapse;
    /// label ids follow first appearance.
    pub fn from_triples<I, A, B, C>(triples: I) -> Self
    where
        I: IntoIterator<Item = (A, B, C)>,
        A: AsRef<str>,
        B: AsRef<str>,
        C: AsRef<str>,
    {
        let mut dicts = empty_dictionaries();
        let mut ids = Vec::new();
        for (a, b, c) in triples {
            ids.push([
                dicts[0].intern(a.as_ref()),
                dicts[1].intern(b.as_ref()),
                dicts[2].intern(c.as_ref()),
            ]);
        }
        Self::from_parts(dicts, ids).expect("interned ids are in range")
    }

    /// Builds a context from existing dictionaries and id triples.
    pub fn from_parts(dicts: [ElementDictionary; 3], mut triples: Vec<[ElemId; 3]>) -> Result<Self> {
        for t in &triples {
            for d in Dim::ALL {
                dicts[d.index()].check(t[d.index()])?;
            }
        }
        triples.sort_unstable();
        triples.dedup();
        let sizes = [dicts[0].len(), dicts[1].len(), dicts[2].len()];
        let mut cube = FixedBitSet::with_capacity(sizes[0] * sizes[1] * sizes[2]);
        for t in &triples {
            cube.insert(cube_offset(sizes, *t));
        }
        Ok(TriadicContext { dicts, triples, cube })
    }

    pub fn dictionary(&self, dim: Dim) -> &ElementDictionary {
        &self.dicts[dim.index()]
    }

    pub fn dictionaries(&self) -> &[ElementDictionary; 3] {
        &self.dicts
    }

    pub fn size(&self, dim: Dim) -> usize {
        self.dicts[dim.index()].len()
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.dicts[0].len(), self.dicts[1].len(), self.dicts[2].len()]
    }

    /// The incidence relation as sorted id triples.
    pub fn triples(&self) -> &[[ElemId; 3]] {
        &self.triples
    }

    /// `|Y|`.
    pub fn incidence_len(&self) -> usize {
        self.triples.len()
    }

    #[inline]
    pub fn contains(&self, triple: [ElemId; 3]) -> bool {
        let sizes = self.sizes();
        triple.iter().zip(sizes).all(|(&a, n)| (a as usize) < n) && self.cube.contains(cube_offset(sizes, triple))
    }

    /// The dyadic projection `K^(i)`: rows `K_i`, columns `K_j x K_k`.
    pub fn project_dyadic(&self, dim: Dim) -> DyadicContext {
        DyadicContext::project(self, dim)
    }

    /// `X_i^(i)`: the pairs `(a_j, a_k)` related to every element of `xs`.
    /// An empty `xs` yields the whole pair universe `K_j x K_k`.
    pub fn derive_outer(&self, dim: Dim, xs: &[ElemId]) -> Result<Vec<(ElemId, ElemId)>> {
        self.dictionary(dim).check_all(xs)?;
        let (dj, dk) = dim.others();
        let (nj, nk) = (self.size(dj) as ElemId, self.size(dk) as ElemId);
        let mut pairs = Vec::new();
        for aj in 0..nj {
            for ak in 0..nk {
                if xs.iter().all(|&ai| self.contains(compose(dim, ai, aj, ak))) {
                    pairs.push((aj, ak));
                }
            }
        }
        Ok(pairs)
    }

    /// `(X_j, X_k)^(i)`: the elements of `K_i` related to every pair of
    /// `first x second`, where `first` belongs to the lower of the two other
    /// dimensions. An empty product yields all of `K_i`.
    pub fn derive_inner(&self, dim: Dim, first: &[ElemId], second: &[ElemId]) -> Result<Vec<ElemId>> {
        let (dj, dk) = dim.others();
        self.dictionary(dj).check_all(first)?;
        self.dictionary(dk).check_all(second)?;
        let n = self.size(dim) as ElemId;
        Ok((0..n)
            .filter(|&ai| {
                first
                    .iter()
                    .all(|&aj| second.iter().all(|&ak| self.contains(compose(dim, ai, aj, ak))))
            })
            .collect())
    }

    /// True iff `A1 x A2 x A3` lies in `Y` and no single element can be added
    /// to any component without leaving `Y`.
    pub fn is_closed_triset(&self, sets: [&[ElemId]; 3]) -> Result<bool> {
        for d in Dim::ALL {
            self.dictionary(d).check_all(sets[d.index()])?;
        }
        if !self.product_in_relation(sets) {
            return Ok(false);
        }
        for d in Dim::ALL {
            let (dj, dk) = d.others();
            let (sj, sk) = (sets[dj.index()], sets[dk.index()]);
            let own = sets[d.index()];
            let n = self.size(d) as ElemId;
            for e in (0..n).filter(|e| !own.contains(e)) {
                let extendable = sj
                    .iter()
                    .all(|&aj| sk.iter().all(|&ak| self.contains(compose(d, e, aj, ak))));
                if extendable {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn product_in_relation(&self, sets: [&[ElemId]; 3]) -> bool {
        sets[0].iter().all(|&a| {
            sets[1]
                .iter()
                .all(|&b| sets[2].iter().all(|&c| self.contains([a, b, c])))
        })
    }
}

#[inline]
fn cube_offset(sizes: [usize; 3], t: [ElemId; 3]) -> usize {
    (t[0] as usize * sizes[1] + t[1] as usize) * sizes[2] + t[2] as usize
}

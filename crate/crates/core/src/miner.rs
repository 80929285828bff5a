//! Triadic concept mining.
//!
//! [`mine_concepts`] enumerates the dyadic concepts of `K^(1)` (objects
//! against attribute/condition pairs), factorizes each intent into maximal
//! attribute x condition rectangles and closes every rectangle back to its
//! full extent. [`mine_concepts_bruteforce`] is the reference oracle.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;

use crate::closure::Bipartite;
use crate::context::{Dim, ElemId, ElementDictionary, TriadicContext};
use crate::error::{Error, Result};

/// Default cap on `|K1| * |K2| * |K3|` for the brute-force oracle.
pub const DEFAULT_BRUTE_FORCE_CAP: u64 = 1 << 18;

/// Maximum number of seed pairs the brute-force oracle will try.
const MAX_BRUTE_FORCE_SEEDS: u64 = 1 << 22;

pub type ConceptId = usize;

/// A closed tri-set `(extent, intent, modus)` with sorted components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TriadicConcept {
    pub id: ConceptId,
    sets: [Vec<ElemId>; 3],
}

impl TriadicConcept {
    pub fn extent(&self) -> &[ElemId] {
        &self.sets[0]
    }

    pub fn intent(&self) -> &[ElemId] {
        &self.sets[1]
    }

    pub fn modus(&self) -> &[ElemId] {
        &self.sets[2]
    }

    pub fn component(&self, dim: Dim) -> &[ElemId] {
        &self.sets[dim.index()]
    }

    pub fn components(&self) -> [&[ElemId]; 3] {
        [&self.sets[0], &self.sets[1], &self.sets[2]]
    }

    /// Total number of elements over the three components.
    pub fn len(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An ordered, duplicate-free collection of triadic concepts with ids
/// `0..len`, together with the dictionaries their ids refer to.
#[derive(Clone, Debug)]
pub struct ConceptSet {
    dicts: [ElementDictionary; 3],
    concepts: Vec<TriadicConcept>,
    lookup: HashMap<[Vec<ElemId>; 3], ConceptId>,
}

impl PartialEq for ConceptSet {
    fn eq(&self, other: &Self) -> bool {
        self.dicts == other.dicts && self.concepts == other.concepts
    }
}

impl ConceptSet {
    /// Canonical form: components sorted, duplicates dropped, concepts ordered
    /// lexicographically by (extent, intent, modus) and numbered in that order.
    pub fn from_trisets(dicts: [ElementDictionary; 3], trisets: impl IntoIterator<Item = [Vec<ElemId>; 3]>) -> Self {
        let mut sets: Vec<[Vec<ElemId>; 3]> = trisets.into_iter().map(normalize).collect();
        sets.sort_unstable();
        sets.dedup();
        Self::build(dicts, sets)
    }

    /// Keeps the given order (position = id). Fails on duplicates or on ids
    /// outside the dictionaries.
    pub fn from_ordered(dicts: [ElementDictionary; 3], trisets: Vec<[Vec<ElemId>; 3]>) -> Result<Self> {
        let sets: Vec<[Vec<ElemId>; 3]> = trisets.into_iter().map(normalize).collect();
        let mut seen = HashSet::with_capacity(sets.len());
        for (line, s) in sets.iter().enumerate() {
            for d in Dim::ALL {
                dicts[d.index()].check_all(&s[d.index()])?;
            }
            if !seen.insert(s) {
                return Err(Error::Parse {
                    line: line + 1,
                    message: "duplicate concept".into(),
                });
            }
        }
        Ok(Self::build(dicts, sets))
    }

    fn build(dicts: [ElementDictionary; 3], sets: Vec<[Vec<ElemId>; 3]>) -> Self {
        let lookup = sets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let concepts = sets
            .into_iter()
            .enumerate()
            .map(|(id, sets)| TriadicConcept { id, sets })
            .collect();
        ConceptSet {
            dicts,
            concepts,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn get(&self, id: ConceptId) -> Option<&TriadicConcept> {
        self.concepts.get(id)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TriadicConcept> {
        self.concepts.iter()
    }

    pub fn concepts(&self) -> &[TriadicConcept] {
        &self.concepts
    }

    /// Id of the concept with exactly these components (any order, no
    /// duplicates assumed).
    pub fn id_of(&self, sets: [&[ElemId]; 3]) -> Option<ConceptId> {
        let key = normalize(sets.map(<[ElemId]>::to_vec));
        self.lookup.get(&key).copied()
    }

    pub fn dictionaries(&self) -> &[ElementDictionary; 3] {
        &self.dicts
    }

    pub fn dictionary(&self, dim: Dim) -> &ElementDictionary {
        &self.dicts[dim.index()]
    }

    /// Sum of component sizes over all concepts.
    pub fn total_occurrences(&self) -> usize {
        self.concepts.iter().map(TriadicConcept::len).sum()
    }
}

impl<'a> IntoIterator for &'a ConceptSet {
    type Item = &'a TriadicConcept;
    type IntoIter = std::slice::Iter<'a, TriadicConcept>;

    fn into_iter(self) -> Self::IntoIter {
        self.concepts.iter()
    }
}

fn normalize(mut sets: [Vec<ElemId>; 3]) -> [Vec<ElemId>; 3] {
    for s in &mut sets {
        s.sort_unstable();
        s.dedup();
    }
    sets
}

/// A maximal rectangle `first x second` inside a pair relation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rectangle {
    pub first: Vec<ElemId>,
    pub second: Vec<ElemId>,
}

/// All maximal rectangles of `pairs` seen as a relation between `0..n_first`
/// and `0..n_second`, boundary rectangles with an empty side included.
/// Output is sorted.
pub fn factorize(n_first: usize, n_second: usize, pairs: &[(ElemId, ElemId)]) -> Vec<Rectangle> {
    let rel = Bipartite::from_pairs(n_first, n_second, pairs.iter().map(|&(a, b)| (a as usize, b as usize)));
    let mut rects: Vec<Rectangle> = rel
        .concepts()
        .into_iter()
        .map(|(e, i)| Rectangle {
            first: to_ids(&e),
            second: to_ids(&i),
        })
        .collect();
    rects.sort_unstable();
    rects
}

pub(crate) fn to_ids(bits: &FixedBitSet) -> Vec<ElemId> {
    bits.ones().map(|b| b as ElemId).collect()
}

/// Every triadic concept of `ctx`, in canonical order.
pub fn mine_concepts(ctx: &TriadicContext) -> ConceptSet {
    let [n1, n2, n3] = ctx.sizes();
    let objects = Bipartite::from_pairs(
        n1,
        n2 * n3,
        ctx.triples()
            .iter()
            .map(|t| (t[0] as usize, t[1] as usize * n3 + t[2] as usize)),
    );

    let mut found: HashSet<[Vec<ElemId>; 3]> = HashSet::new();
    let mut cols = FixedBitSet::with_capacity(n2 * n3);
    for (_, pair_intent) in objects.concepts() {
        let features = Bipartite::from_pairs(n2, n3, pair_intent.ones().map(|c| (c / n3, c % n3)));
        for (attrs, conds) in features.concepts() {
            cols.clear();
            for a in attrs.ones() {
                for c in conds.ones() {
                    cols.insert(a * n3 + c);
                }
            }
            let extent = objects.extent_of(&cols);
            found.insert([to_ids(&extent), to_ids(&attrs), to_ids(&conds)]);
        }
    }
    ConceptSet::from_trisets(ctx.dictionaries().clone(), found)
}

/// Brute-force oracle with the default cell cap.
pub fn mine_concepts_bruteforce(ctx: &TriadicContext) -> Result<ConceptSet> {
    mine_concepts_bruteforce_with_cap(ctx, DEFAULT_BRUTE_FORCE_CAP)
}

/// Tries every pair of subsets of the two smallest dimensions, derives the
/// third component straight from the triple list and keeps the closed ones.
pub fn mine_concepts_bruteforce_with_cap(ctx: &TriadicContext, cap: u64) -> Result<ConceptSet> {
    let sizes = ctx.sizes();
    let cells = sizes.iter().map(|&n| n as u64).product::<u64>();
    if cells > cap {
        return Err(Error::CapExceeded { requested: cells, cap });
    }
    let mut dims = Dim::ALL;
    dims.sort_by_key(|d| std::cmp::Reverse(sizes[d.index()]));
    let [big, dj, dk] = dims;
    let seed_bits = (sizes[dj.index()] + sizes[dk.index()]) as u32;
    let seeds = 1u64.checked_shl(seed_bits).unwrap_or(u64::MAX);
    if seeds > MAX_BRUTE_FORCE_SEEDS {
        return Err(Error::CapExceeded {
            requested: seeds,
            cap: MAX_BRUTE_FORCE_SEEDS,
        });
    }

    let relation: HashSet<[ElemId; 3]> = ctx.triples().iter().copied().collect();
    let subsets = |n: usize| -> Vec<Vec<ElemId>> {
        (0u32..1 << n)
            .map(|m| (0..n as ElemId).filter(|&b| m & (1 << b) != 0).collect())
            .collect()
    };
    let mut found = Vec::new();
    for sj in subsets(sizes[dj.index()]) {
        for sk in subsets(sizes[dk.index()]) {
            let si: Vec<ElemId> = (0..sizes[big.index()] as ElemId)
                .filter(|&a| {
                    sj.iter().all(|&x| {
                        sk.iter().all(|&y| {
                            let mut t = [0; 3];
                            t[big.index()] = a;
                            t[dj.index()] = x;
                            t[dk.index()] = y;
                            relation.contains(&t)
                        })
                    })
                })
                .collect();
            let mut sets: [Vec<ElemId>; 3] = Default::default();
            sets[big.index()] = si;
            sets[dj.index()] = sj.clone();
            sets[dk.index()] = sk.clone();
            if ctx.is_closed_triset([&sets[0], &sets[1], &sets[2]])? {
                found.push(sets);
            }
        }
    }
    Ok(ConceptSet::from_trisets(ctx.dictionaries().clone(), found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{concept, purchases, PURCHASES_NAMED_CONCEPTS};

    #[test]
    fn factorize_four_pairs() {
        let ctx = purchases();
        let a = |l| ctx.dictionary(Dim::Attribute).id(l).unwrap();
        let c = |l| ctx.dictionary(Dim::Condition).id(l).unwrap();
        let pairs = [(a("K"), c("a")), (a("K"), c("b")), (a("R"), c("a")), (a("R"), c("b"))];
        let rects = factorize(6, 4, &pairs);
        let mut kr = vec![a("K"), a("R")];
        kr.sort();
        assert!(rects.contains(&Rectangle {
            first: kr,
            second: vec![c("a"), c("b")]
        }));
        // plus (all attributes, {}) and ({}, all conditions)
        assert_eq!(rects.len(), 3);
    }

    #[test]
    fn factorize_empty_relation() {
        let rects = factorize(2, 3, &[]);
        assert_eq!(
            rects,
            vec![
                Rectangle {
                    first: vec![],
                    second: vec![0, 1, 2]
                },
                Rectangle {
                    first: vec![0, 1],
                    second: vec![]
                },
            ]
        );
    }

    #[test]
    fn factorize_diagonal() {
        let rects = factorize(3, 3, &[(0, 0), (1, 1), (2, 2)]);
        let unit: Vec<_> = rects
            .iter()
            .filter(|r| r.first.len() == 1 && r.second.len() == 1)
            .collect();
        assert_eq!(unit.len(), 3);
        assert_eq!(rects.len(), 5);
    }

    #[test]
    fn purchases_contains_named_concepts() {
        let ctx = purchases();
        let set = mine_concepts(&ctx);
        for named in PURCHASES_NAMED_CONCEPTS {
            assert!(
                set.id_of(concept(&ctx, named).each_ref().map(Vec::as_slice)).is_some(),
                "{named} missing"
            );
        }
    }

    #[test]
    fn purchases_matches_bruteforce() {
        let ctx = purchases();
        assert_eq!(mine_concepts(&ctx), mine_concepts_bruteforce(&ctx).unwrap());
    }

    #[test]
    fn mined_concepts_are_closed_and_self_deriving() {
        let ctx = purchases();
        for c in &mine_concepts(&ctx) {
            assert!(ctx.is_closed_triset(c.components()).unwrap());
            for d in Dim::ALL {
                let (j, k) = d.others();
                assert_eq!(
                    ctx.derive_inner(d, c.component(j), c.component(k)).unwrap(),
                    c.component(d)
                );
            }
        }
    }

    #[test]
    fn empty_context_has_one_boundary_concept() {
        let ctx = TriadicContext::from_triples(Vec::<(&str, &str, &str)>::new());
        let set = mine_concepts(&ctx);
        assert_eq!(set.len(), 1);
        assert!(set.get(0).unwrap().is_empty());
        assert_eq!(set, mine_concepts_bruteforce(&ctx).unwrap());
    }

    #[test]
    fn full_cuboid_has_single_concept() {
        let mut triples = Vec::new();
        for a in ["1", "2"] {
            for b in ["x", "y"] {
                for c in ["u", "v"] {
                    triples.push((a, b, c));
                }
            }
        }
        let ctx = TriadicContext::from_triples(triples);
        let set = mine_concepts(&ctx);
        assert_eq!(set.len(), 1);
        assert_eq!(set.get(0).unwrap().components(), [&[0, 1][..], &[0, 1], &[0, 1]]);
    }

    #[test]
    fn ids_follow_canonical_order() {
        let set = mine_concepts(&purchases());
        for (i, w) in set.concepts().windows(2).enumerate() {
            assert!(w[0].components() < w[1].components());
            assert_eq!(w[0].id, i);
        }
        assert_eq!(set, mine_concepts(&purchases()));
    }

    #[test]
    fn bruteforce_cap() {
        let ctx = purchases();
        assert!(matches!(
            mine_concepts_bruteforce_with_cap(&ctx, 100),
            Err(Error::CapExceeded {
                requested: 144,
                cap: 100
            })
        ));
    }

    #[test]
    fn ordered_store_rejects_duplicates() {
        let dicts = purchases().dictionaries().clone();
        let s = [vec![0], vec![1], vec![2]];
        assert!(ConceptSet::from_ordered(dicts, vec![s.clone(), s]).is_err());
    }
}

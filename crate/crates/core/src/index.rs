//! Inverted index from `(dimension, element)` to the concepts containing it.
//!
//! # On-disk layout
//!
//! All integers are little-endian.
//!
//! | field            | type        |
//! |------------------|-------------|
//! | magic `TRQX`     | `[u8; 4]`   |
//! | format version   | `u16` (= 1) |
//! | reserved         | `u16` (= 0) |
//! | concept count    | `u32`       |
//! | element counts   | `u32` x 3   |
//! | posting sections | see below   |
//! | CRC-32 of all preceding bytes | `u32` |
//!
//! Each dimension's section holds, for every element id in order, the list
//! length as `u32` followed by that many `u32` concept ids.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::context::{Dim, ElemId};
use crate::error::{Error, Result};
use crate::miner::ConceptSet;

pub const MAGIC: [u8; 4] = *b"TRQX";
pub const FORMAT_VERSION: u16 = 1;

const HEADER_LEN: usize = 4 + 2 + 2 + 4 + 3 * 4;

/// Per-dimension posting lists of concept ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvertedIndex {
    postings: [Vec<Vec<u32>>; 3],
    concept_count: usize,
}

impl InvertedIndex {
    /// One pass over the concepts; every element occurrence appends one
    /// posting. Ids are visited in increasing order, so lists come out sorted.
    pub fn build(concepts: &ConceptSet) -> Self {
        // size each list for the mean posting length of its dimension
        let mut postings = Dim::ALL.map(|d| {
            let n = concepts.dictionary(d).len();
            let occurrences: usize = concepts.iter().map(|c| c.component(d).len()).sum();
            let mean = occurrences.checked_div(n).unwrap_or(0);
            (0..n).map(|_| Vec::with_capacity(mean)).collect::<Vec<_>>()
        });
        for c in concepts {
            for d in Dim::ALL {
                for &e in c.component(d) {
                    postings[d.index()][e as usize].push(c.id as u32);
                }
            }
        }
        InvertedIndex {
            postings,
            concept_count: concepts.len(),
        }
    }

    /// Concept ids containing `element` in dimension `dim`; empty for an
    /// element the index has never seen.
    pub fn postings(&self, dim: Dim, element: ElemId) -> &[u32] {
        self.postings[dim.index()]
            .get(element as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Label-level lookup through the concept set's dictionaries.
    pub fn postings_for_label<'a>(&'a self, concepts: &ConceptSet, dim: Dim, label: &str) -> &'a [u32] {
        match concepts.dictionary(dim).id(label) {
            Some(e) => self.postings(dim, e),
            None => &[],
        }
    }

    pub fn concept_count(&self) -> usize {
        self.concept_count
    }

    pub fn element_count(&self, dim: Dim) -> usize {
        self.postings[dim.index()].len()
    }

    /// Sum of all posting-list lengths.
    pub fn total_postings(&self) -> usize {
        self.postings.iter().flatten().map(Vec::len).sum()
    }

    /// Fails unless the index was built over a store of the same shape.
    pub fn check_against(&self, concepts: &ConceptSet) -> Result<()> {
        let same_dims = Dim::ALL
            .iter()
            .all(|&d| self.element_count(d) == concepts.dictionary(d).len());
        if self.concept_count != concepts.len() || !same_dims {
            return Err(Error::IndexMismatch {
                index: self.concept_count,
                store: concepts.len(),
            });
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = Vec::with_capacity(
            HEADER_LEN + 4 * (self.total_postings() + self.postings.iter().map(Vec::len).sum::<usize>()) + 4,
        );
        buf.extend_from_slice(&MAGIC);
        buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        buf.extend_from_slice(&0u16.to_le_bytes());
        buf.extend_from_slice(&(self.concept_count as u32).to_le_bytes());
        for lists in &self.postings {
            buf.extend_from_slice(&(lists.len() as u32).to_le_bytes());
        }
        for lists in &self.postings {
            for list in lists {
                buf.extend_from_slice(&(list.len() as u32).to_le_bytes());
                for id in list {
                    buf.extend_from_slice(&id.to_le_bytes());
                }
            }
        }
        let crc = crc32fast::hash(&buf);
        buf.extend_from_slice(&crc.to_le_bytes());
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        if bytes.len() >= 4 && bytes[..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes.len() >= 6 {
            let version = u16::from_le_bytes([bytes[4], bytes[5]]);
            if version != FORMAT_VERSION {
                return Err(Error::UnsupportedVersion {
                    found: version,
                    expected: FORMAT_VERSION,
                });
            }
        }
        if bytes.len() < HEADER_LEN + 4 {
            return Err(Error::CorruptIndex("truncated header".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let stored_crc = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
        if crc32fast::hash(body) != stored_crc {
            return Err(Error::CorruptIndex("checksum mismatch (truncated or damaged)".into()));
        }

        let mut cur = Cursor { bytes: body, pos: 8 };
        let concept_count = cur.u32()? as usize;
        let counts = [cur.u32()?, cur.u32()?, cur.u32()?];
        let mut postings: [Vec<Vec<u32>>; 3] = Default::default();
        for d in 0..3 {
            let mut lists = Vec::with_capacity(counts[d] as usize);
            for _ in 0..counts[d] {
                let len = cur.u32()? as usize;
                let mut list = Vec::with_capacity(len.min(concept_count));
                for _ in 0..len {
                    let id = cur.u32()?;
                    if id as usize >= concept_count || list.last().is_some_and(|&prev| prev >= id) {
                        return Err(Error::CorruptIndex(format!("invalid posting {id}")));
                    }
                    list.push(id);
                }
                lists.push(list);
            }
            postings[d] = lists;
        }
        if cur.pos != body.len() {
            return Err(Error::CorruptIndex("trailing bytes".into()));
        }
        Ok(InvertedIndex {
            postings,
            concept_count,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

/// Builds the index for `concepts`.
pub fn build_index(concepts: &ConceptSet) -> InvertedIndex {
    InvertedIndex::build(concepts)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn u32(&mut self) -> Result<u32> {
        let end = self.pos + 4;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::CorruptIndex("unexpected end of posting data".into()))?;
        self.pos = end;
        Ok(u32::from_le_bytes(chunk.try_into().expect("4 bytes")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{empty_dictionaries, ElementDictionary};
    use crate::fixtures::{concept, purchases};
    use crate::miner::mine_concepts;

    fn scan(concepts: &ConceptSet, dim: Dim, e: ElemId) -> Vec<u32> {
        concepts
            .iter()
            .filter(|c| c.component(dim).contains(&e))
            .map(|c| c.id as u32)
            .collect()
    }

    #[test]
    fn postings_match_scan() {
        let set = mine_concepts(&purchases());
        let index = build_index(&set);
        for d in Dim::ALL {
            for e in 0..set.dictionary(d).len() as ElemId {
                assert_eq!(index.postings(d, e), scan(&set, d, e).as_slice());
            }
        }
        assert_eq!(index.total_postings(), set.total_occurrences());
    }

    #[test]
    fn attribute_r_postings() {
        let ctx = purchases();
        let set = mine_concepts(&ctx);
        let index = build_index(&set);
        let r = index.postings_for_label(&set, Dim::Attribute, "R");
        for named in [
            "16|R|ac",
            "23456|R|ab",
            "3456|KR|ab",
            "256|R|abd",
            "256|NPR|ad",
            "246|NR|ab",
            "346|KPR|ab",
            "123456|KNPRST|a",
        ] {
            let id = set.id_of(concept(&ctx, named).each_ref().map(Vec::as_slice)).unwrap();
            assert!(r.contains(&(id as u32)), "{named}");
        }
        let six = ctx.dictionary(Dim::Object).id("6").unwrap();
        assert_eq!(
            index.postings(Dim::Object, six).len(),
            scan(&set, Dim::Object, six).len()
        );
    }

    #[test]
    fn unknown_element_has_no_postings() {
        let set = mine_concepts(&purchases());
        let index = build_index(&set);
        assert!(index.postings(Dim::Condition, 99).is_empty());
        assert!(index.postings_for_label(&set, Dim::Attribute, "Z").is_empty());
    }

    #[test]
    fn empty_set_index() {
        let index = build_index(&ConceptSet::from_trisets(empty_dictionaries(), []));
        assert_eq!(index.concept_count(), 0);
        assert_eq!(index.total_postings(), 0);
    }

    #[test]
    fn round_trip() {
        let set = mine_concepts(&purchases());
        let index = build_index(&set);
        let mut buf = Vec::new();
        index.write_to(&mut buf).unwrap();
        assert_eq!(InvertedIndex::read_from(buf.as_slice()).unwrap(), index);
    }

    #[test]
    fn malformed_files() {
        let index = build_index(&mine_concepts(&purchases()));
        let mut buf = Vec::new();
        index.write_to(&mut buf).unwrap();

        let truncated = &buf[..buf.len() - 9];
        assert!(matches!(
            InvertedIndex::read_from(truncated),
            Err(Error::CorruptIndex(_))
        ));
        assert!(matches!(
            InvertedIndex::read_from(&buf[..10]),
            Err(Error::CorruptIndex(_))
        ));

        let mut bad_magic = buf.clone();
        bad_magic[0] = b'X';
        assert!(matches!(
            InvertedIndex::read_from(bad_magic.as_slice()),
            Err(Error::BadMagic)
        ));

        let mut bad_version = buf.clone();
        bad_version[4] = 9;
        assert!(matches!(
            InvertedIndex::read_from(bad_version.as_slice()),
            Err(Error::UnsupportedVersion { found: 9, .. })
        ));

        let mut flipped = buf.clone();
        let mid = buf.len() / 2;
        flipped[mid] ^= 0x40;
        assert!(matches!(
            InvertedIndex::read_from(flipped.as_slice()),
            Err(Error::CorruptIndex(_))
        ));
    }

    #[test]
    fn mismatch_with_store_is_reported() {
        let set = mine_concepts(&purchases());
        let index = build_index(&set);
        index.check_against(&set).unwrap();
        let other = ConceptSet::from_trisets(
            Dim::ALL.map(|d| ElementDictionary::from_labels(d, ["x"])),
            [[vec![0], vec![0], vec![0]]],
        );
        assert!(matches!(index.check_against(&other), Err(Error::IndexMismatch { .. })));
    }
}

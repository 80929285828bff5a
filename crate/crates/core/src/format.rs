//! Text formats: triple files, compact grids, concept stores, and the
//! human-readable rendering of concepts.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::context::{empty_dictionaries, Dim, ElemId, ElementDictionary, TriadicContext};
use crate::error::{Error, Result};
use crate::miner::{ConceptSet, TriadicConcept};

const STORE_HEADER: &str = "# triadic concept store v1";
const DICT_PREFIX: &str = "#@";

/// Reads `object,attribute,condition` lines. Blank lines and lines starting
/// with `#` are skipped.
pub fn read_triples<R: BufRead>(reader: R) -> Result<TriadicContext> {
    let mut triples = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match fields.as_slice() {
            [a, b, c] if !a.is_empty() && !b.is_empty() && !c.is_empty() => {
                triples.push((a.to_string(), b.to_string(), c.to_string()))
            }
            _ => {
                return Err(Error::Parse {
                    line: n + 1,
                    message: format!("expected `object,attribute,condition`, got `{line}`"),
                })
            }
        }
    }
    Ok(TriadicContext::from_triples(triples))
}

/// Writes the relation in the triple-file format, labels in id order.
pub fn write_triples<W: Write>(ctx: &TriadicContext, mut out: W) -> Result<()> {
    let [d1, d2, d3] = ctx.dictionaries();
    for t in ctx.triples() {
        writeln!(
            out,
            "{},{},{}",
            d1.label(t[0]).unwrap_or_default(),
            d2.label(t[1]).unwrap_or_default(),
            d3.label(t[2]).unwrap_or_default()
        )?;
    }
    Ok(())
}

/// Reads a grid: a header row of attribute labels, then one row per object
/// with its label followed by one cell per attribute. A cell lists condition
/// labels as single characters (`abd`); `-` marks an empty cell.
///
/// Objects and attributes are numbered in file order, conditions in natural
/// label order.
pub fn read_compact_table<R: BufRead>(reader: R) -> Result<TriadicContext> {
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<(usize, String, Vec<String>)> = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        match &header {
            None => header = Some(tokens),
            Some(h) => {
                if tokens.len() != h.len() + 1 {
                    return Err(Error::Parse {
                        line: n + 1,
                        message: format!(
                            "expected {} cells after the object label, got {}",
                            h.len(),
                            tokens.len() - 1
                        ),
                    });
                }
                let mut it = tokens.into_iter();
                let object = it.next().expect("non-empty line");
                rows.push((n + 1, object, it.collect()));
            }
        }
    }
    let header = header.unwrap_or_default();

    let mut conditions: Vec<String> = rows
        .iter()
        .flat_map(|(_, _, cells)| cells.iter())
        .filter(|cell| cell.as_str() != "-")
        .flat_map(|cell| cell.chars().map(String::from))
        .collect();
    conditions.sort_by(|a, b| natural_cmp(a, b));
    conditions.dedup();

    let mut dicts = [
        ElementDictionary::new(Dim::Object),
        ElementDictionary::from_labels(Dim::Attribute, &header),
        ElementDictionary::from_labels(Dim::Condition, &conditions),
    ];
    if dicts[1].len() != header.len() {
        return Err(Error::Parse {
            line: 1,
            message: "duplicate attribute in header".into(),
        });
    }
    let mut triples = Vec::new();
    for (line, object, cells) in rows {
        if dicts[0].id(&object).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("duplicate object `{object}`"),
            });
        }
        let o = dicts[0].intern(&object);
        for (a, cell) in cells.iter().enumerate() {
            if cell == "-" {
                continue;
            }
            for ch in cell.chars() {
                let c = dicts[2].resolve(&ch.to_string())?;
                triples.push([o, a as ElemId, c]);
            }
        }
    }
    TriadicContext::from_parts(dicts, triples)
}

/// Writes a concept store: dictionary declarations followed by one concept
/// per line (`1,3,4,6|K,P|a,b`). Line order is id order.
pub fn write_concept_store<W: Write>(set: &ConceptSet, mut out: W) -> Result<()> {
    writeln!(out, "{STORE_HEADER}")?;
    for d in Dim::ALL {
        writeln!(
            out,
            "{DICT_PREFIX}{} {}",
            d.name(),
            set.dictionary(d).labels().join(",")
        )?;
    }
    for c in set {
        let fields: Vec<String> = Dim::ALL
            .iter()
            .map(|&d| sorted_labels(set.dictionary(d), c.component(d)).join(","))
            .collect();
        writeln!(out, "{}", fields.join("|"))?;
    }
    Ok(())
}

/// Reads a concept store. Without `#@` declarations, element ids follow
/// first appearance.
pub fn read_concept_store<R: BufRead>(reader: R) -> Result<ConceptSet> {
    let mut dicts = empty_dictionaries();
    let mut declared = [false; 3];
    let mut lines = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if let Some(decl) = trimmed.strip_prefix(DICT_PREFIX) {
            let (name, labels) = decl.split_once(' ').unwrap_or((decl, ""));
            let dim = Dim::ALL
                .into_iter()
                .find(|d| d.name() == name)
                .ok_or_else(|| Error::Parse {
                    line: n + 1,
                    message: format!("unknown dimension `{name}`"),
                })?;
            let labels: Vec<&str> = labels.split(',').map(str::trim).filter(|l| !l.is_empty()).collect();
            dicts[dim.index()] = ElementDictionary::from_labels(dim, &labels);
            declared[dim.index()] = true;
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines.push((n + 1, trimmed.to_owned()));
    }

    let mut sets = Vec::with_capacity(lines.len());
    for (line, text) in lines {
        let fields: Vec<&str> = text.split('|').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected three `|`-separated fields, got {}", fields.len()),
            });
        }
        let mut sets_line: [Vec<ElemId>; 3] = Default::default();
        for d in Dim::ALL {
            for label in fields[d.index()].split(',').map(str::trim).filter(|l| !l.is_empty()) {
                let dict = &mut dicts[d.index()];
                let id = if declared[d.index()] {
                    dict.resolve(label).map_err(|e| Error::Parse {
                        line,
                        message: e.to_string(),
                    })?
                } else {
                    dict.intern(label)
                };
                sets_line[d.index()].push(id);
            }
        }
        sets.push(sets_line);
    }
    ConceptSet::from_ordered(dicts, sets)
}

/// Labels of `ids` in natural order (numbers numerically, then text).
pub fn sorted_labels<'a>(dict: &'a ElementDictionary, ids: &[ElemId]) -> Vec<&'a str> {
    let mut labels: Vec<&str> = ids.iter().filter_map(|&i| dict.label(i)).collect();
    labels.sort_by(|a, b| natural_cmp(a, b));
    labels
}

/// Numeric labels compare as numbers and sort before non-numeric ones.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// True when every label of the dictionary is a single character.
pub fn single_char_labels(dict: &ElementDictionary) -> bool {
    dict.labels().iter().all(|l| l.chars().count() == 1)
}

/// Renders a set the compact way (`KPR`) when labels are single characters,
/// comma-joined otherwise; `∅` when empty.
pub fn render_set(dict: &ElementDictionary, ids: &[ElemId]) -> String {
    if ids.is_empty() {
        return "∅".to_owned();
    }
    let labels = sorted_labels(dict, ids);
    if single_char_labels(dict) {
        labels.concat()
    } else {
        labels.join(",")
    }
}

/// `(346, KPR, ab)`.
pub fn render_concept(dicts: &[ElementDictionary; 3], c: &TriadicConcept) -> String {
    let mut s = String::from("(");
    for d in Dim::ALL {
        if d != Dim::Object {
            s.push_str(", ");
        }
        let _ = write!(s, "{}", render_set(&dicts[d.index()], c.component(d)));
    }
    s.push(')');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{purchases, PURCHASES_GRID};
    use crate::miner::mine_concepts;

    #[test]
    fn triples_round_trip() {
        let ctx = purchases();
        let mut buf = Vec::new();
        write_triples(&ctx, &mut buf).unwrap();
        let back = read_triples(buf.as_slice()).unwrap();
        assert_eq!(back.incidence_len(), ctx.incidence_len());
        assert_eq!(back.sizes(), ctx.sizes());
    }

    #[test]
    fn triples_skip_comments_and_report_bad_lines() {
        let ctx = read_triples("# header\n\n1, P, a\n1,P,a\n2,N,b\n".as_bytes()).unwrap();
        assert_eq!(ctx.incidence_len(), 2);
        let err = read_triples("1,P,a\n1,P\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn compact_table_shape() {
        let ctx = read_compact_table(PURCHASES_GRID.as_bytes()).unwrap();
        assert_eq!(ctx.sizes(), [6, 6, 4]);
        assert_eq!(ctx.dictionary(Dim::Condition).labels(), ["a", "b", "c", "d"]);
        assert_eq!(ctx.dictionary(Dim::Attribute).labels(), ["P", "N", "R", "K", "S", "T"]);
    }

    #[test]
    fn compact_table_rejects_ragged_rows() {
        let err = read_compact_table("P N\n1 a\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn concept_store_round_trip() {
        let set = mine_concepts(&purchases());
        let mut buf = Vec::new();
        write_concept_store(&set, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\n1,3,4,6|K,P|a,b\n"), "{text}");
        assert!(text.contains("\n1,2,3,4,5,6||a,b,c,d\n"));
        assert_eq!(read_concept_store(buf.as_slice()).unwrap(), set);
    }

    #[test]
    fn concept_store_without_declarations() {
        let set = read_concept_store("1,6|R|a,c\n3,4,6|K,P,R|a,b\n".as_bytes()).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.dictionary(Dim::Object).labels(), ["1", "6", "3", "4"]);
    }

    #[test]
    fn concept_store_bad_field_count() {
        let err = read_concept_store("1|R\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn rendering() {
        let ctx = purchases();
        let set = mine_concepts(&ctx);
        let id = set.id_of([&[0, 5], &[2], &[0, 2]]).unwrap();
        assert_eq!(render_concept(set.dictionaries(), set.get(id).unwrap()), "(16, R, ac)");
        assert_eq!(natural_cmp("10", "9"), Ordering::Greater);
    }
}

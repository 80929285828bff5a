//! A small customer x supplier x product purchase context used throughout the
//! tests and docs.

use crate::context::{Dim, ElemId, TriadicContext};
use crate::format::read_compact_table;

/// Rows are customers, columns suppliers, cells the products bought.
pub const PURCHASES_GRID: &str = "\
# customers x suppliers; cells list products
     P     N     R     K     S     T
1    abd   abd   ac    ab    a     a
2    ad    abcd  abd   ad    ad    a
3    abd   ad    ab    ab    a     a
4    abd   abd   ab    ab    ad    a
5    ad    ad    abd   abc   a     ab
6    abcd  abcd  abcd  abcd  abcd  abcd
";

/// Concepts of the purchase context referred to across the test-suite, in
/// `extent|intent|modus` shorthand.
pub const PURCHASES_NAMED_CONCEPTS: [&str; 16] = [
    "256|R|abd",
    "256|NPR|ad",
    "146|KNP|ab",
    "146|NP|abd",
    "1346|KP|ab",
    "13456|K|ab",
    "123456|KNPRST|a",
    "123456||abcd",
    "16|R|ac",
    "23456|R|ab",
    "3456|KR|ab",
    "246|NR|ab",
    "346|KPR|ab",
    "1246|N|abd",
    "1346|P|abd",
    "123456|NP|ad",
];

pub fn purchases() -> TriadicContext {
    read_compact_table(PURCHASES_GRID.as_bytes()).expect("fixture grid is well-formed")
}

/// Resolves `extent|intent|modus` shorthand with single-character labels.
pub fn concept(ctx: &TriadicContext, shorthand: &str) -> [Vec<ElemId>; 3] {
    let fields: Vec<&str> = shorthand.split('|').collect();
    assert_eq!(fields.len(), 3, "bad shorthand `{shorthand}`");
    let mut out: [Vec<ElemId>; 3] = Default::default();
    for d in Dim::ALL {
        out[d.index()] = fields[d.index()]
            .chars()
            .map(|ch| ctx.dictionary(d).resolve(&ch.to_string()).expect("known label"))
            .collect();
        out[d.index()].sort_unstable();
    }
    out
}

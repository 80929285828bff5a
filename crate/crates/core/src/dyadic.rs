//! Dyadic projections `K^(i) = (K_i, K_j x K_k, Y^(i))` of a triadic context.

use fixedbitset::FixedBitSet;

use crate::context::{compose, Dim, ElemId, TriadicContext};
use crate::error::{Error, Result};

/// A materialized dyadic projection.
///
/// Column `c` stands for the pair `(c / |K_k|, c % |K_k|)`; the column
/// universe is the full product `K_j x K_k` whether or not a column carries
/// any incidence. Incidence is stored row-wise (row intents) and column-wise
/// (column extents).
#[derive(Clone, Debug)]
pub struct DyadicContext {
    row_dim: Dim,
    n_rows: usize,
    n_first: usize,
    n_second: usize,
    row_intents: Vec<FixedBitSet>,
    col_extents: Vec<FixedBitSet>,
}

impl DyadicContext {
    pub(crate) fn project(ctx: &TriadicContext, dim: Dim) -> Self {
        let (dj, dk) = dim.others();
        let n_rows = ctx.size(dim);
        let (n_first, n_second) = (ctx.size(dj), ctx.size(dk));
        let n_cols = n_first * n_second;
        let mut row_intents = vec![FixedBitSet::with_capacity(n_cols); n_rows];
        let mut col_extents = vec![FixedBitSet::with_capacity(n_rows); n_cols];
        for t in ctx.triples() {
            let row = t[dim.index()] as usize;
            let col = t[dj.index()] as usize * n_second + t[dk.index()] as usize;
            row_intents[row].insert(col);
            col_extents[col].insert(row);
        }
        DyadicContext {
            row_dim: dim,
            n_rows,
            n_first,
            n_second,
            row_intents,
            col_extents,
        }
    }

    pub fn row_dim(&self) -> Dim {
        self.row_dim
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// `|K_j| * |K_k|`, including empty columns.
    pub fn n_cols(&self) -> usize {
        self.n_first * self.n_second
    }

    /// Sizes of the two column dimensions `(|K_j|, |K_k|)`.
    pub fn column_dims(&self) -> (usize, usize) {
        (self.n_first, self.n_second)
    }

    #[inline]
    pub fn column(&self, a_j: ElemId, a_k: ElemId) -> usize {
        a_j as usize * self.n_second + a_k as usize
    }

    #[inline]
    pub fn pair(&self, col: usize) -> (ElemId, ElemId) {
        ((col / self.n_second) as ElemId, (col % self.n_second) as ElemId)
    }

    pub fn contains(&self, row: ElemId, a_j: ElemId, a_k: ElemId) -> bool {
        (row as usize) < self.n_rows
            && (a_j as usize) < self.n_first
            && (a_k as usize) < self.n_second
            && self.row_intents[row as usize].contains(self.column(a_j, a_k))
    }

    /// Number of crosses in the projection.
    pub fn incidence_len(&self) -> usize {
        self.row_intents.iter().map(|r| r.count_ones(..)).sum()
    }

    /// All `(row, (a_j, a_k))` incidences, row-major.
    pub fn incidence(&self) -> impl Iterator<Item = (ElemId, (ElemId, ElemId))> + '_ {
        self.row_intents
            .iter()
            .enumerate()
            .flat_map(move |(r, bits)| bits.ones().map(move |c| (r as ElemId, self.pair(c))))
    }

    /// Maps a projection incidence back to its triple in `(a1, a2, a3)` order.
    pub fn triple(&self, row: ElemId, (a_j, a_k): (ElemId, ElemId)) -> [ElemId; 3] {
        compose(self.row_dim, row, a_j, a_k)
    }

    /// Columns shared by all `rows`, as a bitset over the column universe.
    /// No rows gives every column.
    pub fn derive_rows(&self, rows: &[ElemId]) -> Result<FixedBitSet> {
        self.check(self.row_dim, rows, self.n_rows)?;
        let mut cols = FixedBitSet::with_capacity(self.n_cols());
        cols.insert_range(..);
        for &r in rows {
            cols.intersect_with(&self.row_intents[r as usize]);
        }
        Ok(cols)
    }

    /// Rows related to every column of `first x second`. An empty product
    /// gives every row.
    pub fn derive_columns(&self, first: &[ElemId], second: &[ElemId]) -> Result<Vec<ElemId>> {
        let (dj, dk) = self.row_dim.others();
        self.check(dj, first, self.n_first)?;
        self.check(dk, second, self.n_second)?;
        let mut rows = FixedBitSet::with_capacity(self.n_rows);
        rows.insert_range(..);
        'outer: for &aj in first {
            for &ak in second {
                rows.intersect_with(&self.col_extents[self.column(aj, ak)]);
                if rows.is_clear() {
                    break 'outer;
                }
            }
        }
        Ok(rows.ones().map(|r| r as ElemId).collect())
    }

    /// Decodes a column bitset into sorted `(a_j, a_k)` pairs.
    pub fn pairs(&self, cols: &FixedBitSet) -> Vec<(ElemId, ElemId)> {
        cols.ones().map(|c| self.pair(c)).collect()
    }

    fn check(&self, dim: Dim, ids: &[ElemId], size: usize) -> Result<()> {
        match ids.iter().find(|&&id| id as usize >= size) {
            Some(&id) => Err(Error::ElementOutOfRange { dim, id, size }),
            None => Ok(()),
        }
    }
}

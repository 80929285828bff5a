//! Close-by-One enumeration of all formal concepts (maximal rectangles) of a
//! binary relation.

use fixedbitset::FixedBitSet;

/// A binary relation between `rows` and `cols`, stored both ways.
#[derive(Clone, Debug)]
pub struct Bipartite {
    n_rows: usize,
    n_cols: usize,
    // col -> rows holding it
    col_extents: Vec<FixedBitSet>,
    // row -> cols it holds
    row_intents: Vec<FixedBitSet>,
}

impl Bipartite {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Bipartite {
            n_rows,
            n_cols,
            col_extents: vec![FixedBitSet::with_capacity(n_rows); n_cols],
            row_intents: vec![FixedBitSet::with_capacity(n_cols); n_rows],
        }
    }

    pub fn from_pairs<I>(n_rows: usize, n_cols: usize, pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rel = Bipartite::new(n_rows, n_cols);
        for (r, c) in pairs {
            rel.insert(r, c);
        }
        rel
    }

    pub fn insert(&mut self, row: usize, col: usize) {
        self.col_extents[col].insert(row);
        self.row_intents[row].insert(col);
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn col_extent(&self, col: usize) -> &FixedBitSet {
        &self.col_extents[col]
    }

    pub fn transpose(&self) -> Bipartite {
        Bipartite {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            col_extents: self.row_intents.clone(),
            row_intents: self.col_extents.clone(),
        }
    }

    /// Rows holding every column in `cols`.
    pub fn extent_of(&self, cols: &FixedBitSet) -> FixedBitSet {
        let mut rows = FixedBitSet::with_capacity(self.n_rows);
        rows.insert_range(..);
        for c in cols.ones() {
            rows.intersect_with(&self.col_extents[c]);
        }
        rows
    }

    /// Columns held by every row in `rows`.
    pub fn intent_of(&self, rows: &FixedBitSet) -> FixedBitSet {
        let mut cols = FixedBitSet::with_capacity(self.n_cols);
        for c in 0..self.n_cols {
            if rows.is_subset(&self.col_extents[c]) {
                cols.insert(c);
            }
        }
        cols
    }

    /// Every formal concept `(extent, intent)`, including the top and bottom
    /// ones whose sides may be empty. Enumeration runs over the smaller side.
    pub fn concepts(&self) -> Vec<(FixedBitSet, FixedBitSet)> {
        if self.n_rows < self.n_cols {
            return self.transpose().concepts().into_iter().map(|(e, i)| (i, e)).collect();
        }
        let mut out = Vec::new();
        let mut all_rows = FixedBitSet::with_capacity(self.n_rows);
        all_rows.insert_range(..);
        let top_intent = self.intent_of(&all_rows);
        self.close_by_one(all_rows, top_intent, 0, &mut out);
        out
    }

    fn close_by_one(
        &self,
        extent: FixedBitSet,
        intent: FixedBitSet,
        start: usize,
        out: &mut Vec<(FixedBitSet, FixedBitSet)>,
    ) {
        for j in start..self.n_cols {
            if intent.contains(j) {
                continue;
            }
            let mut child_extent = extent.clone();
            child_extent.intersect_with(&self.col_extents[j]);
            let child_intent = self.intent_of(&child_extent);
            // canonicity: the closure may not add any column below j
            let canonical = child_intent.difference(&intent).next().is_none_or(|c| c >= j);
            if canonical {
                self.close_by_one(child_extent, child_intent, j + 1, out);
            }
        }
        out.push((extent, intent));
    }
}

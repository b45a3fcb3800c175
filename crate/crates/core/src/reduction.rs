//! Sparse GF(2) boundary matrices and the `D = R·U` decomposition.
//!
//! Columns are sorted lists of row indices. `R` and `D` are stored
//! column-major with a row directory, `U` row-major with a column directory:
//! transposition updates need column additions and low queries on `R` but row
//! additions and a superdiagonal entry query on `U`, and both need adjacent
//! row/column swaps, so each matrix is kept in the orientation its operations
//! favour and the directory serves the other.

use std::collections::HashSet;

use thiserror::Error;

use crate::bifiltration::GradedComplex;

/// Support of a GF(2) column vector: strictly increasing row indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Column {
    rows: Vec<usize>,
}

impl Column {
    pub fn new(mut rows: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        Column { rows }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Largest row index, or `None` for the zero column.
    pub fn low(&self) -> Option<usize> {
        self.rows.last().copied()
    }
}

/// Column-major sparse GF(2) matrix with a row directory.
#[derive(Debug, Clone)]
pub(crate) struct ColMatrix {
    cols: Vec<Vec<usize>>,
    rows: Vec<HashSet<usize>>,
}

impl ColMatrix {
    pub(crate) fn from_columns(n_rows: usize, cols: Vec<Vec<usize>>) -> Self {
        let mut rows = vec![HashSet::new(); n_rows];
        for (c, col) in cols.iter().enumerate() {
            debug_assert!(col.windows(2).all(|w| w[0] < w[1]));
            for &r in col {
                rows[r].insert(c);
            }
        }
        ColMatrix { cols, rows }
    }

    pub(crate) fn col(&self, c: usize) -> &[usize] {
        &self.cols[c]
    }

    pub(crate) fn low(&self, c: usize) -> Option<usize> {
        self.cols[c].last().copied()
    }

    pub(crate) fn entry(&self, r: usize, c: usize) -> bool {
        self.cols[c].binary_search(&r).is_ok()
    }

    pub(crate) fn row(&self, r: usize) -> &HashSet<usize> {
        &self.rows[r]
    }

    /// `col dst += col src` over GF(2).
    pub(crate) fn add_col(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let (a, b) = (&self.cols[src], &self.cols[dst]);
        let mut merged = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    self.rows[x].remove(&dst);
                    i += 1;
                    j += 1;
                }
                (Some(&x), Some(&y)) if x < y => {
                    self.rows[x].insert(dst);
                    merged.push(x);
                    i += 1;
                }
                (Some(_), Some(&y)) => {
                    merged.push(y);
                    j += 1;
                }
                (Some(&x), None) => {
                    self.rows[x].insert(dst);
                    merged.push(x);
                    i += 1;
                }
                (None, Some(&y)) => {
                    merged.push(y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        self.cols[dst] = merged;
    }

    /// Swaps adjacent rows `r` and `r + 1`, patching every affected column.
    pub(crate) fn swap_rows(&mut self, r: usize) {
        let only_r: Vec<usize> = self.rows[r]
            .difference(&self.rows[r + 1])
            .copied()
            .collect();
        let only_r1: Vec<usize> = self.rows[r + 1]
            .difference(&self.rows[r])
            .copied()
            .collect();
        for &c in &only_r {
            let pos = self.cols[c].binary_search(&r).unwrap();
            self.cols[c][pos] = r + 1;
        }
        for &c in &only_r1 {
            let pos = self.cols[c].binary_search(&(r + 1)).unwrap();
            self.cols[c][pos] = r;
        }
        self.rows.swap(r, r + 1);
    }

    /// Swaps adjacent columns `c` and `c + 1`.
    pub(crate) fn swap_cols(&mut self, c: usize) {
        for &r in &self.cols[c] {
            self.rows[r].remove(&c);
        }
        for &r in &self.cols[c + 1] {
            self.rows[r].remove(&(c + 1));
        }
        self.cols.swap(c, c + 1);
        for &r in &self.cols[c] {
            self.rows[r].insert(c);
        }
        for &r in &self.cols[c + 1] {
            self.rows[r].insert(c + 1);
        }
    }

    pub(crate) fn snapshot(&self, c: usize) -> Column {
        Column {
            rows: self.cols[c].clone(),
        }
    }
}

/// Row-major sparse GF(2) matrix with a column directory.
#[derive(Debug, Clone)]
pub(crate) struct RowMatrix {
    rows: Vec<Vec<usize>>,
    cols: Vec<HashSet<usize>>,
}

impl RowMatrix {
    pub(crate) fn identity(n: usize) -> Self {
        RowMatrix {
            rows: (0..n).map(|i| vec![i]).collect(),
            cols: (0..n).map(|i| HashSet::from([i])).collect(),
        }
    }

    pub(crate) fn entry(&self, r: usize, c: usize) -> bool {
        self.rows[r].binary_search(&c).is_ok()
    }

    pub(crate) fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub(crate) fn col(&self, c: usize) -> &HashSet<usize> {
        &self.cols[c]
    }

    /// Removes a single entry. Caller guarantees the entry is present.
    pub(crate) fn remove_entry(&mut self, r: usize, c: usize) {
        let pos = self.rows[r].binary_search(&c).expect("entry present");
        self.rows[r].remove(pos);
        self.cols[c].remove(&r);
    }

    /// `row dst += row src` over GF(2).
    pub(crate) fn add_row(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let (a, b) = (&self.rows[src], &self.rows[dst]);
        let mut merged = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    self.cols[x].remove(&dst);
                    i += 1;
                    j += 1;
                }
                (Some(&x), Some(&y)) if x < y => {
                    self.cols[x].insert(dst);
                    merged.push(x);
                    i += 1;
                }
                (Some(_), Some(&y)) => {
                    merged.push(y);
                    j += 1;
                }
                (Some(&x), None) => {
                    self.cols[x].insert(dst);
                    merged.push(x);
                    i += 1;
                }
                (None, Some(&y)) => {
                    merged.push(y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        self.rows[dst] = merged;
    }

    pub(crate) fn swap_rows(&mut self, r: usize) {
        for &c in &self.rows[r] {
            self.cols[c].remove(&r);
        }
        for &c in &self.rows[r + 1] {
            self.cols[c].remove(&(r + 1));
        }
        self.rows.swap(r, r + 1);
        for &c in &self.rows[r] {
            self.cols[c].insert(r);
        }
        for &c in &self.rows[r + 1] {
            self.cols[c].insert(r + 1);
        }
    }

    pub(crate) fn swap_cols(&mut self, c: usize) {
        let only_c: Vec<usize> = self.cols[c]
            .difference(&self.cols[c + 1])
            .copied()
            .collect();
        let only_c1: Vec<usize> = self.cols[c + 1]
            .difference(&self.cols[c])
            .copied()
            .collect();
        for &r in &only_c {
            let pos = self.rows[r].binary_search(&c).unwrap();
            self.rows[r][pos] = c + 1;
        }
        for &r in &only_c1 {
            let pos = self.rows[r].binary_search(&(c + 1)).unwrap();
            self.rows[r][pos] = c;
        }
        self.cols.swap(c, c + 1);
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BoundaryError {
    #[error("facet `{facet}` of `{simplex}` is missing from the filtration order")]
    FacetMissing { simplex: String, facet: String },
    #[error("facet `{facet}` of `{simplex}` appears after its coface")]
    FacetAfterCoface { simplex: String, facet: String },
}

/// Boundary matrix of simplices in a given filtration order: column `j`
/// lists the order-positions of the facets of the `j`-th simplex.
///
/// `order` pairs simplex ids with their (strictly increasing) arrival
/// positions, as produced by [`crate::bifiltration::filtration_along_path`].
pub fn boundary_matrix(
    complex: &GradedComplex,
    order: &[(usize, usize)],
) -> Result<Vec<Column>, BoundaryError> {
    let mut index_of = vec![usize::MAX; complex.n()];
    for (j, &(s, _)) in order.iter().enumerate() {
        index_of[s] = j;
    }
    let mut by_simplex = std::collections::HashMap::new();
    for &(s, _) in order {
        by_simplex.insert(complex.simplex(s).clone(), s);
    }
    let mut cols = Vec::with_capacity(order.len());
    for (j, &(s, _)) in order.iter().enumerate() {
        let mut rows = Vec::new();
        for facet in complex.simplex(s).facets() {
            let fid = *by_simplex
                .get(&facet)
                .ok_or_else(|| BoundaryError::FacetMissing {
                    simplex: complex.simplex(s).to_string(),
                    facet: facet.to_string(),
                })?;
            let fj = index_of[fid];
            if fj >= j {
                return Err(BoundaryError::FacetAfterCoface {
                    simplex: complex.simplex(s).to_string(),
                    facet: facet.to_string(),
                });
            }
            rows.push(fj);
        }
        cols.push(Column::new(rows));
    }
    Ok(cols)
}

/// A maintained `D = R·U` decomposition over GF(2): `R` reduced (distinct
/// lows), `U` upper-triangular with unit diagonal.
#[derive(Debug, Clone)]
pub struct RUDecomposition {
    pub(crate) d: ColMatrix,
    pub(crate) r: ColMatrix,
    pub(crate) u: RowMatrix,
    n: usize,
}

impl RUDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r_column(&self, c: usize) -> Column {
        self.r.snapshot(c)
    }

    pub fn d_column(&self, c: usize) -> Column {
        self.d.snapshot(c)
    }

    /// True when column `c` of `R` is zero, i.e. the `c`-th simplex creates a
    /// homology class.
    pub fn is_positive(&self, c: usize) -> bool {
        self.r.col(c).is_empty()
    }

    pub fn r_low(&self, c: usize) -> Option<usize> {
        self.r.low(c)
    }

    /// The column of `R` whose low is `r`, if any. Resolved through the row
    /// directory so it stays correct across updates.
    pub fn col_with_low(&self, r: usize) -> Option<usize> {
        self.r
            .row(r)
            .iter()
            .copied()
            .find(|&c| self.r.low(c) == Some(r))
    }

    pub(crate) fn u_entry(&self, r: usize, c: usize) -> bool {
        self.u.entry(r, c)
    }

    /// Checks `D = R·U`, reducedness of `R` and unitriangularity of `U` by
    /// direct sparse arithmetic. Quadratic-ish; intended for small inputs.
    pub fn verify_invariants(&self) -> Result<(), String> {
        let n = self.n;
        for c in 0..n {
            let mut acc: HashSet<usize> = HashSet::new();
            let mut contributors: Vec<usize> = self.u.col(c).iter().copied().collect();
            contributors.sort_unstable();
            for m in contributors {
                for &r in self.r.col(m) {
                    if !acc.remove(&r) {
                        acc.insert(r);
                    }
                }
            }
            let expect: HashSet<usize> = self.d.col(c).iter().copied().collect();
            if acc != expect {
                return Err(format!("D != R*U at column {c}"));
            }
        }
        let mut lows = HashSet::new();
        for c in 0..n {
            if let Some(l) = self.r.low(c) {
                if !lows.insert(l) {
                    return Err(format!("R not reduced: duplicate low {l}"));
                }
            }
        }
        for r in 0..n {
            let row = self.u.row(r);
            if row.binary_search(&r).is_err() {
                return Err(format!("U missing diagonal at {r}"));
            }
            if row.first().copied() != Some(r) {
                return Err(format!("U not upper-triangular at row {r}"));
            }
        }
        Ok(())
    }
}

/// Left-to-right reduction. While two columns share a low, the earlier one is
/// added to the later; the same operation is mirrored into `U` to keep
/// `D = R·U` exact.
pub fn ru_decompose(d: &[Column]) -> RUDecomposition {
    let n = d.len();
    let cols: Vec<Vec<usize>> = d.iter().map(|c| c.rows.clone()).collect();
    let dm = ColMatrix::from_columns(n, cols.clone());
    let mut r = ColMatrix::from_columns(n, cols);
    let mut u = RowMatrix::identity(n);
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        while let Some(low) = r.low(j) {
            match owner[low] {
                Some(k) => {
                    r.add_col(k, j);
                    u.add_row(j, k);
                }
                None => {
                    owner[low] = Some(j);
                    break;
                }
            }
        }
    }
    RUDecomposition { d: dm, r, u, n }
}

/// One persistence interval slot: birth/death path positions and the
/// homology dimension of the class. `death == None` is the implicit
/// past-the-end death of an essential class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairEntry {
    pub birth: usize,
    pub death: Option<usize>,
    pub dim: usize,
}

/// Persistence intervals in birth-position order. The list index is the slot
/// id; it stays aligned with the meta-rank lists across the whole sweep.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairingList {
    pub entries: Vec<PairEntry>,
}

impl PairingList {
    /// Intervals as a sorted multiset, death `None` ordered last.
    pub fn interval_multiset(&self) -> Vec<(usize, usize, Option<usize>)> {
        let mut v: Vec<(usize, usize, Option<usize>)> = self
            .entries
            .iter()
            .map(|e| (e.dim, e.birth, e.death))
            .collect();
        v.sort_by_key(|&(d, b, dth)| (d, b, dth.unwrap_or(usize::MAX)));
        v
    }
}

/// Reads the pairing off the lows of `R`: column `j` with `low(R_j) = i`
/// pairs the class born at position `positions[i]` with death at
/// `positions[j]`; positive columns without a matching low stay unpaired.
pub fn extract_pairs(ru: &RUDecomposition, positions: &[usize], dims: &[usize]) -> PairingList {
    let mut entries = Vec::new();
    for c in 0..ru.n() {
        if ru.is_positive(c) {
            let death = ru.col_with_low(c).map(|d| positions[d]);
            entries.push(PairEntry {
                birth: positions[c],
                death,
                dim: dims[c],
            });
        }
    }
    entries.sort_by_key(|e| e.birth);
    PairingList { entries }
}

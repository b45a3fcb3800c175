//! Brute-force ground truth, kept deliberately independent of the sweep.
//!
//! The rank invariant is computed pair by pair from two-step filtrations with
//! a plain column reduction of its own (no shared code with the maintained
//! decomposition, no U matrix, no updates). From the rank function the full
//! meta-rank table is reconstructed by inclusion-exclusion, which is the
//! primary exactness check for the fast path. Closed-form tables for
//! rectangle-sum modules and disjoint unions of complexes provide module-
//! level ground truth that does not depend on realizing anything simplicially.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bifiltration::{Axis, GradeMap, GradedComplex, GridIndex, LookupMode};
use crate::signed::Rect;
use crate::table::{Bar, MetaRankTable};

/// XOR-merge of two sorted index lists.
fn xor_merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(&x), Some(&y)) if x < y => {
                out.push(x);
                i += 1;
            }
            (Some(_), Some(&y)) => {
                out.push(y);
                j += 1;
            }
            (Some(&x), None) => {
                out.push(x);
                i += 1;
            }
            (None, Some(&y)) => {
                out.push(y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Standalone left-to-right reduction; returns `owner[r]` = column with low `r`.
fn reduce_columns(cols: &mut [Vec<usize>]) -> Vec<Option<usize>> {
    let n = cols.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        while let Some(&low) = cols[j].last() {
            match owner[low] {
                Some(k) => {
                    let merged = xor_merge(&cols[k], &cols[j]);
                    cols[j] = merged;
                }
                None => {
                    owner[low] = Some(j);
                    break;
                }
            }
        }
    }
    owner
}

/// Per-dimension Betti numbers of the subcomplex `F(a, b)`.
pub fn betti_numbers(complex: &GradedComplex, a: usize, b: usize) -> Vec<u64> {
    let ids = complex.subcomplex_at(a, b);
    let max_dim = complex.max_dim().unwrap_or(0);
    let ranks = two_step_rank(complex, ids.clone(), Vec::new());
    let _ = max_dim;
    ranks
}

/// Rank of the map induced by `block1 ⊆ block1 ∪ block2`, per dimension:
/// classes born in the first block that survive the whole two-step
/// filtration. Blocks are sorted by x-grade internally, which is
/// face-monotone because distinct simplices have distinct x-grades.
fn two_step_rank(
    complex: &GradedComplex,
    mut block1: Vec<usize>,
    mut block2: Vec<usize>,
) -> Vec<u64> {
    let max_dim = complex.max_dim().unwrap_or(0);
    block1.sort_by_key(|&s| complex.xgrade(s));
    block2.sort_by_key(|&s| complex.xgrade(s));
    let order: Vec<usize> = block1.iter().chain(block2.iter()).copied().collect();
    let n1 = block1.len();
    let mut local = vec![usize::MAX; complex.n()];
    for (j, &s) in order.iter().enumerate() {
        local[s] = j;
    }
    let mut by_simplex = std::collections::HashMap::new();
    for &s in &order {
        by_simplex.insert(complex.simplex(s).clone(), s);
    }
    let mut cols: Vec<Vec<usize>> = Vec::with_capacity(order.len());
    for &s in &order {
        let mut rows: Vec<usize> = complex
            .simplex(s)
            .facets()
            .map(|f| local[by_simplex[&f]])
            .collect();
        rows.sort_unstable();
        cols.push(rows);
    }
    let owner = reduce_columns(&mut cols);
    let mut ranks = vec![0u64; max_dim + 1];
    for j in 0..n1 {
        if cols[j].is_empty() && owner[j].is_none() {
            ranks[complex.dim_of(order[j])] += 1;
        }
    }
    ranks
}

/// The rank invariant: for every comparable pair of grid points, the rank of
/// the induced map in each homology dimension.
#[derive(Debug, Clone)]
pub struct RankFunction {
    n: usize,
    max_dim: usize,
    /// `data[dim][idx(a, b, c, d)]`, zero wherever not computed.
    data: Vec<Vec<u32>>,
}

impl RankFunction {
    fn idx(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
        (((a - 1) * n + (b - 1)) * n + (c - 1)) * n + (d - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Rank of `H_dim(F(a, b)) → H_dim(F(c, d))`; zero for indices off the
    /// grid, which is how the inclusion-exclusion formulas consume it.
    pub fn rank(&self, dim: usize, (a, b): (usize, usize), (c, d): (usize, usize)) -> u64 {
        if dim > self.max_dim || a < 1 || b < 1 || c < a || d < b || c > self.n || d > self.n {
            return 0;
        }
        self.data[dim][Self::idx(self.n, a, b, c, d)] as u64
    }

    /// Monotonicity of ranks under shrinking the source or growing the
    /// target; used as a sanity check on computed rank functions.
    pub fn check_monotone(&self) -> Result<(), String> {
        let n = self.n;
        for dim in 0..=self.max_dim {
            for a in 1..=n {
                for b in 1..=n {
                    for c in a..=n {
                        for d in b..=n {
                            let r = self.rank(dim, (a, b), (c, d));
                            if c < n && self.rank(dim, (a, b), (c + 1, d)) > r {
                                return Err(format!("rank grew towards ({},{})", c + 1, d));
                            }
                            if d < n && self.rank(dim, (a, b), (c, d + 1)) > r {
                                return Err(format!("rank grew towards ({},{})", c, d + 1));
                            }
                            if a > 1 && self.rank(dim, (a - 1, b), (c, d)) > r {
                                return Err(format!("rank grew from ({},{})", a - 1, b));
                            }
                            if b > 1 && self.rank(dim, (a, b - 1), (c, d)) > r {
                                return Err(format!("rank grew from ({},{})", a, b - 1));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Computes the full rank invariant by a fresh two-step reduction per
/// comparable pair. Quartic-and-then-some by design; the point is exactness,
/// not speed, so keep `n` modest.
pub fn rank_invariant(complex: &GradedComplex) -> RankFunction {
    let n = complex.n();
    let max_dim = complex.max_dim().unwrap_or(0);
    let mut data = vec![vec![0u32; if n == 0 { 0 } else { n * n * n * n }]; max_dim + 1];
    let sources: Vec<(usize, usize)> = (1..=n).flat_map(|a| (1..=n).map(move |b| (a, b))).collect();
    #[allow(clippy::type_complexity)]
    let per_source: Vec<Vec<((usize, usize), Vec<u64>)>> = sources
        .par_iter()
        .map(|&(a, b)| {
            let block1 = complex.subcomplex_at(a, b);
            let in_block1: Vec<bool> = {
                let mut v = vec![false; n];
                for &s in &block1 {
                    v[s] = true;
                }
                v
            };
            let mut out = Vec::with_capacity((n - a + 1) * (n - b + 1));
            for c in a..=n {
                for d in b..=n {
                    let block2: Vec<usize> = complex
                        .subcomplex_at(c, d)
                        .into_iter()
                        .filter(|&s| !in_block1[s])
                        .collect();
                    out.push(((c, d), two_step_rank(complex, block1.clone(), block2)));
                }
            }
            out
        })
        .collect();
    for (&(a, b), targets) in sources.iter().zip(&per_source) {
        for &((c, d), ref ranks) in targets {
            for (dim, &r) in ranks.iter().enumerate() {
                data[dim][RankFunction::idx(n, a, b, c, d)] = r as u32;
            }
        }
    }
    RankFunction { n, max_dim, data }
}

/// Bar multisets per `(dim, s, t)` cell, the oracle-side table shape.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleTable {
    n: usize,
    max_dim: usize,
    cells: BTreeMap<(usize, usize, usize), BTreeMap<Bar, u64>>,
}

impl OracleTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.max_dim).collect()
    }

    pub fn bar_multiset(&self, dim: usize, s: usize, t: usize) -> BTreeMap<Bar, u64> {
        self.cells.get(&(dim, s, t)).cloned().unwrap_or_default()
    }

    pub fn meta_diagram(&self) -> crate::signed::MetaDiagram {
        let dims: Vec<usize> = self.dims();
        crate::signed::mobius_invert_cells(self.n, &dims, |dim, s, t| self.bar_multiset(dim, s, t))
    }
}

/// Reconstructs every meta-rank cell from the rank function: the multiplicity
/// of the closed bar `[lo, hi]` in cell `[s, t]` is the alternating sum of
/// the four ranks at rows `lo-1, lo` and `hi, hi+1`, with off-grid ranks
/// contributing zero (the two-term form for bars reaching the top row falls
/// out of the same convention).
pub fn mrk_from_rank(rk: &RankFunction) -> Result<OracleTable, String> {
    let n = rk.n();
    let mut cells = BTreeMap::new();
    for dim in 0..=rk.max_dim() {
        for t in 1..=n {
            for s in 1..=t {
                let mut bars: BTreeMap<Bar, u64> = BTreeMap::new();
                for lo in 1..=n {
                    for hi in lo..=n {
                        let m = rk.rank(dim, (s, lo), (t, hi)) as i64
                            - rk.rank(dim, (s, lo - 1), (t, hi)) as i64
                            - rk.rank(dim, (s, lo), (t, hi + 1)) as i64
                            + rk.rank(dim, (s, lo - 1), (t, hi + 1)) as i64;
                        if m < 0 {
                            return Err(format!(
                                "negative multiplicity {m} for [{lo},{hi}] in cell [{s},{t}] dim {dim}"
                            ));
                        }
                        if m > 0 {
                            bars.insert(Bar::new(lo, hi), m as u64);
                        }
                    }
                }
                if !bars.is_empty() {
                    cells.insert((dim, s, t), bars);
                }
            }
        }
    }
    Ok(OracleTable {
        n,
        max_dim: rk.max_dim(),
        cells,
    })
}

/// Rank read off the meta-rank table in grid coordinates: the number of bars
/// in cell `[s, t]` containing the row range `[y, y']`.
pub fn rank_from_mrk(
    table: &MetaRankTable,
    dim: usize,
    (s, y): (usize, usize),
    (t, y2): (usize, usize),
) -> u64 {
    debug_assert!(s <= t && y <= y2);
    table
        .bars(dim, s, t)
        .filter(|b| b.lo as usize <= y && y2 <= b.hi as usize)
        .count() as u64
}

/// Rank at real coordinates: the source and target columns are the last grid
/// columns at or below the query points, and a bar contains the row range
/// when its half-open real support does.
pub fn rank_from_mrk_real(
    table: &MetaRankTable,
    map: &GradeMap,
    dim: usize,
    (sx, sy): (f64, f64),
    (tx, ty): (f64, f64),
) -> u64 {
    let (a, b) = match (
        map.lookup(Axis::X, LookupMode::Le, sx),
        map.lookup(Axis::X, LookupMode::Le, tx),
    ) {
        (GridIndex::At(a), GridIndex::At(b)) => (a, b),
        _ => return 0,
    };
    let n = table.n();
    table
        .bars(dim, a, b)
        .filter(|bar| {
            let lo = map.value(Axis::Y, bar.lo as usize);
            let hi = if (bar.hi as usize) < n {
                map.value(Axis::Y, bar.hi as usize + 1)
            } else {
                f64::INFINITY
            };
            lo <= sy && ty < hi
        })
        .count() as u64
}

/// Closed-form meta-rank cell of a sum of rectangle modules: each rectangle
/// contributes its row span at `[a, b]` iff its column span contains it.
pub fn synth_rectangle_mrk(rects: &[Rect], a: usize, b: usize) -> BTreeMap<Bar, u64> {
    debug_assert!(a <= b);
    let mut out = BTreeMap::new();
    for r in rects {
        if r.s <= a && b <= r.t {
            *out.entry(Bar::new(r.lo, r.hi)).or_insert(0) += 1;
        }
    }
    out
}

/// A synthetic rectangle-sum module on an `n × n` grid.
#[derive(Debug, Clone)]
pub struct RectangleSumModule {
    pub n: usize,
    pub rects: Vec<Rect>,
}

impl RectangleSumModule {
    pub fn meta_diagram(&self) -> crate::signed::MetaDiagram {
        crate::signed::mobius_invert_cells(self.n, &[0], |_, a, b| {
            synth_rectangle_mrk(&self.rects, a, b)
        })
    }
}

/// A disjoint union of two graded complexes on a common refined grid, with
/// the prefix maps needed to re-index component results.
#[derive(Debug, Clone)]
pub struct DisjointUnion {
    pub complex: GradedComplex,
    pub map: GradeMap,
    /// `a_x_prefix[s - 1]` = number of A-simplices among union x-grades `1..=s`.
    pub a_x_prefix: Vec<usize>,
    pub a_y_prefix: Vec<usize>,
}

impl DisjointUnion {
    pub fn b_x_prefix(&self) -> Vec<usize> {
        self.a_x_prefix
            .iter()
            .enumerate()
            .map(|(i, &a)| i + 1 - a)
            .collect()
    }

    pub fn b_y_prefix(&self) -> Vec<usize> {
        self.a_y_prefix
            .iter()
            .enumerate()
            .map(|(i, &a)| i + 1 - a)
            .collect()
    }
}

/// Disjoint union: B's vertex ids are offset past A's, and the grades are
/// interleaved into one strictly refined grid by a stable merge on the real
/// values, ties taking A first. Each factor keeps its internal grade order
/// on both axes.
pub fn disjoint_union(
    a: &GradedComplex,
    amap: &GradeMap,
    b: &GradedComplex,
    bmap: &GradeMap,
) -> DisjointUnion {
    let offset = a
        .simplices()
        .iter()
        .flat_map(|s| s.vertices().iter().copied())
        .max()
        .map_or(0, |m| m + 1);
    let mut simplices = a.simplices().to_vec();
    for s in b.simplices() {
        let verts: Vec<u32> = s.vertices().iter().map(|&v| v + offset).collect();
        simplices.push(crate::bifiltration::Simplex::new(verts).expect("valid simplex"));
    }
    let n_a = a.n();
    let n_b = b.n();
    let n = n_a + n_b;

    // Merge one axis: returns (grade per union id, values, a-prefix).
    let merge = |a_at: &dyn Fn(usize) -> usize,
                 b_at: &dyn Fn(usize) -> usize,
                 a_vals: &[f64],
                 b_vals: &[f64]|
     -> (Vec<usize>, Vec<f64>, Vec<usize>) {
        let mut grade = vec![0usize; n];
        let mut values = Vec::with_capacity(n);
        let mut prefix = Vec::with_capacity(n);
        let (mut i, mut j) = (0, 0);
        let mut g = 0;
        while i < n_a || j < n_b {
            let take_a = i < n_a && (j >= n_b || a_vals[i] <= b_vals[j]);
            g += 1;
            if take_a {
                grade[a_at(i + 1)] = g;
                values.push(a_vals[i]);
                i += 1;
            } else {
                grade[n_a + b_at(j + 1)] = g;
                values.push(b_vals[j]);
                j += 1;
            }
            prefix.push(i);
        }
        (grade, values, prefix)
    };

    let (xgrade, xvalues, a_x_prefix) = merge(
        &|g| a.simplex_with_xgrade(g),
        &|g| b.simplex_with_xgrade(g),
        amap.values(Axis::X),
        bmap.values(Axis::X),
    );
    let (ygrade, yvalues, a_y_prefix) = merge(
        &|g| a.simplex_with_ygrade(g),
        &|g| b.simplex_with_ygrade(g),
        amap.values(Axis::Y),
        bmap.values(Axis::Y),
    );

    DisjointUnion {
        complex: GradedComplex::from_parts(simplices, xgrade, ygrade),
        map: GradeMap::new(xvalues, yvalues),
        a_x_prefix,
        a_y_prefix,
    }
}

//! The meta-rank table: one barcode list per grid interval `[s, t]`.
//!
//! `table[s, t]` describes the image of the morphism from the vertical slice
//! module at column `s` to the slice at column `t`, as a list of closed bars
//! `[lo, hi] ⊆ [1, n]` aligned slot-by-slot with the interval list of the
//! sweep. The whole triangular table is filled in O(n³): the diagonal cells
//! come from restricting the path intervals to the current column, and each
//! off-diagonal cell is the slot-wise intersection of its two neighbours.

use crate::bifiltration::GradedComplex;
use crate::reduction::PairingList;
use crate::vineyard::{CheckLevel, SweepState};

/// A closed bar `[lo, hi]` with `1 ≤ lo ≤ hi` in grid row coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bar {
    pub lo: u32,
    pub hi: u32,
}

impl Bar {
    pub fn new(lo: usize, hi: usize) -> Bar {
        debug_assert!(lo <= hi);
        Bar {
            lo: lo as u32,
            hi: hi as u32,
        }
    }

    pub fn intersect(self, other: Bar) -> Option<Bar> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Bar { lo, hi })
        } else {
            None
        }
    }

    pub fn contains(self, other: Bar) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// Converts the live interval list at column `i` into the barcode of the
/// column's slice module: each path interval `[birth, death)` is intersected
/// with the vertical segment positions `[i, i + n - 1]` and shifted down by
/// `i - 1` into `[1, n]`. Intervals that miss the segment leave an empty
/// placeholder so slot alignment is preserved.
pub fn restrict_and_shift(pairs: &PairingList, i: usize, n: usize) -> Vec<Option<Bar>> {
    pairs
        .entries
        .iter()
        .map(|e| {
            let lo_pos = e.birth.max(i);
            let hi_pos = match e.death {
                Some(d) => (d - 1).min(i + n - 1),
                None => i + n - 1,
            };
            if lo_pos > hi_pos {
                None
            } else {
                Some(Bar::new(lo_pos - (i - 1), hi_pos - (i - 1)))
            }
        })
        .collect()
}

/// Slot-wise closed-interval intersection; empty placeholders absorb.
pub fn intersect_step(curr: &[Option<Bar>], prev: &[Option<Bar>]) -> Vec<Option<Bar>> {
    assert_eq!(curr.len(), prev.len(), "slot alignment broken");
    curr.iter()
        .zip(prev)
        .map(|(c, p)| match (c, p) {
            (Some(a), Some(b)) => a.intersect(*b),
            _ => None,
        })
        .collect()
}

/// The full triangular meta-rank table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaRankTable {
    n: usize,
    slot_dims: Vec<usize>,
    /// `cells[t(t-1)/2 + (s-1)]` is the list for `[s, t]`, `1 ≤ s ≤ t ≤ n`.
    cells: Vec<Vec<Option<Bar>>>,
}

impl MetaRankTable {
    fn idx(&self, s: usize, t: usize) -> usize {
        debug_assert!(1 <= s && s <= t && t <= self.n);
        t * (t - 1) / 2 + (s - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slot_dims(&self) -> &[usize] {
        &self.slot_dims
    }

    /// Homology dimensions that carry at least one slot.
    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.slot_dims.clone();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn cell(&self, s: usize, t: usize) -> &[Option<Bar>] {
        &self.cells[self.idx(s, t)]
    }

    /// Non-empty bars of one dimension in a cell, in slot order.
    pub fn bars(&self, dim: usize, s: usize, t: usize) -> impl Iterator<Item = Bar> + '_ {
        self.cell(s, t)
            .iter()
            .zip(&self.slot_dims)
            .filter(move |(_, &d)| d == dim)
            .filter_map(|(b, _)| *b)
    }

    pub fn bar_multiset(
        &self,
        dim: usize,
        s: usize,
        t: usize,
    ) -> std::collections::BTreeMap<Bar, u64> {
        let mut out = std::collections::BTreeMap::new();
        for b in self.bars(dim, s, t) {
            *out.entry(b).or_insert(0) += 1;
        }
        out
    }

    /// Builds a table from raw parts (used by respreading helpers).
    pub(crate) fn from_parts(
        n: usize,
        slot_dims: Vec<usize>,
        cells: Vec<Vec<Option<Bar>>>,
    ) -> Self {
        debug_assert_eq!(cells.len(), n * (n + 1) / 2);
        MetaRankTable {
            n,
            slot_dims,
            cells,
        }
    }

    /// Test hook: blanks the first non-empty slot so downstream verification
    /// must fail. Returns the damaged cell.
    #[doc(hidden)]
    pub fn corrupt_first_bar(&mut self) -> Option<(usize, usize)> {
        for t in 1..=self.n {
            for s in 1..=t {
                let idx = self.idx(s, t);
                if let Some(slot) = self.cells[idx].iter().position(|b| b.is_some()) {
                    self.cells[idx][slot] = None;
                    return Some((s, t));
                }
            }
        }
        None
    }
}

/// One finished table column handed to the streaming consumer: `cells[k - 1]`
/// is the list for `[k, i]`, every list aligned with `slot_dims`.
pub struct ColumnCells<'a> {
    pub i: usize,
    pub cells: &'a [Vec<Option<Bar>>],
    pub slot_dims: &'a [usize],
}

/// Computes the table column by column, handing each finished column to
/// `on_column`; nothing else is retained, so memory stays O(n²) regardless
/// of the consumer. Returns the slot dimension tags shared by every list.
///
/// Cells are produced by the relation-cascade engine. With
/// [`CheckLevel::Full`] a vineyard sweep runs alongside: its own per-column
/// from-scratch verification fires, and every diagonal cell is compared
/// against the restricted interval list, so the two independent engines must
/// agree on every slice barcode.
pub fn sweep_metarank<F>(complex: &GradedComplex, check: CheckLevel, mut on_column: F) -> Vec<usize>
where
    F: FnMut(ColumnCells<'_>),
{
    let n = complex.n();
    if n == 0 {
        return Vec::new();
    }
    let order: Vec<usize> = (1..=n).map(|g| complex.simplex_with_xgrade(g)).collect();
    // Discovery pass: the full class list fixes the slot alignment.
    let mut discovery = crate::cascade::CellEngine::new(complex);
    for &s in &order {
        discovery.insert(complex, s);
    }
    let slot_dims = discovery.slot_dims();
    let total_slots = slot_dims.len();
    drop(discovery);

    let mut cross_check = match check {
        CheckLevel::Full => Some(SweepState::new(complex, CheckLevel::Full)),
        CheckLevel::None => None,
    };

    let mut engine = crate::cascade::CellEngine::new(complex);
    let mut source_slots: Vec<usize> = Vec::with_capacity(n);
    for i in 1..=n {
        engine.insert(complex, order[i - 1]);
        source_slots.push(engine.slot_count());
        let mut column: Vec<Vec<Option<Bar>>> = Vec::with_capacity(i);
        for k in 1..=i {
            let mut bars = engine.resolve_cell(source_slots[k - 1]);
            bars.resize(total_slots, None);
            column.push(bars);
        }
        if let Some(sweep) = cross_check.as_mut() {
            if i > 1 {
                sweep.sweep_column();
            }
            let diag = restrict_and_shift(&sweep.pairing_list(), i, n);
            let sweep_dims = sweep.slot_dims();
            let mut want: Vec<(usize, Bar)> = diag
                .iter()
                .zip(&sweep_dims)
                .filter_map(|(b, &d)| b.map(|b| (d, b)))
                .collect();
            let mut got: Vec<(usize, Bar)> = column[i - 1]
                .iter()
                .zip(&slot_dims)
                .filter_map(|(b, &d)| b.map(|b| (d, b)))
                .collect();
            want.sort_unstable();
            got.sort_unstable();
            assert_eq!(
                got, want,
                "cell engine and vineyard sweep disagree on the slice at column {i}"
            );
        }
        on_column(ColumnCells {
            i,
            cells: &column,
            slot_dims: &slot_dims,
        });
    }
    slot_dims
}

/// Re-indexes a table onto a refined grid. `x_prefix[s - 1]` is the source
/// column the refined column `s` reads from (0 while no source column has
/// arrived yet), and likewise `y_prefix` for rows; both are weakly increasing
/// with unit steps. Bars are respread over the refined rows whose prefix
/// value they cover.
pub fn spread_table(
    table: &MetaRankTable,
    x_prefix: &[usize],
    y_prefix: &[usize],
) -> MetaRankTable {
    let m = x_prefix.len();
    assert_eq!(m, y_prefix.len());
    let spread_bar = |bar: Bar| -> Option<Bar> {
        // Refined rows whose source row lies inside the bar form a
        // contiguous range because the prefix is weakly increasing.
        let lo = y_prefix.partition_point(|&r| r < bar.lo as usize) + 1;
        let hi = y_prefix.partition_point(|&r| r <= bar.hi as usize);
        if lo > hi {
            None
        } else {
            Some(Bar::new(lo, hi))
        }
    };
    let slots = table.slot_dims().len();
    let mut cells = Vec::with_capacity(m * (m + 1) / 2);
    for t in 1..=m {
        for s in 1..=t {
            let (a, b) = (x_prefix[s - 1], x_prefix[t - 1]);
            if a == 0 {
                cells.push(vec![None; slots]);
            } else {
                cells.push(
                    table
                        .cell(a, b)
                        .iter()
                        .map(|o| o.and_then(spread_bar))
                        .collect(),
                );
            }
        }
    }
    MetaRankTable::from_parts(m, table.slot_dims().to_vec(), cells)
}

/// Computes the full meta-rank table for all homology dimensions at once.
pub fn compute_metarank(complex: &GradedComplex, check: CheckLevel) -> MetaRankTable {
    let n = complex.n();
    let mut cells: Vec<Vec<Option<Bar>>> = vec![Vec::new(); n * (n + 1) / 2];
    let slot_dims = sweep_metarank(complex, check, |col| {
        for (k, list) in col.cells.iter().enumerate() {
            cells[col.i * (col.i - 1) / 2 + k] = list.clone();
        }
    });
    MetaRankTable {
        n,
        slot_dims,
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifiltration::{filtration_along_path, parse_bifiltration, refine_to_simplexwise};
    use crate::generators::{
        random_incremental_bifiltration, rectangle_module_complex, triangle_bifiltration,
    };
    use crate::reduction::{boundary_matrix, extract_pairs, ru_decompose, PairEntry};
    use rand::rngs::SmallRng;
    use rand::SeedableRng;
    use std::collections::BTreeMap;

    #[test]
    fn restrict_clamps_essential_interval_at_top() {
        let pairs = PairingList {
            entries: vec![PairEntry {
                birth: 2,
                death: None,
                dim: 0,
            }],
        };
        assert_eq!(restrict_and_shift(&pairs, 1, 7), vec![Some(Bar::new(2, 7))]);
    }

    #[test]
    fn restrict_drops_interval_past_the_column() {
        let pairs = PairingList {
            entries: vec![PairEntry {
                birth: 8,
                death: None,
                dim: 0,
            }],
        };
        // n = 7, i = 1: the vertical segment is positions [1, 7].
        assert_eq!(restrict_and_shift(&pairs, 1, 7), vec![None]);
    }

    /// Fresh 1-parameter reduction of a single column of the grid.
    fn column_barcode(complex: &GradedComplex, i: usize) -> BTreeMap<(usize, Bar), u64> {
        let n = complex.n();
        let mut ids: Vec<usize> = (0..n).filter(|&s| complex.xgrade(s) <= i).collect();
        ids.sort_by_key(|&s| complex.ygrade(s));
        let order: Vec<(usize, usize)> = ids.iter().map(|&s| (s, complex.ygrade(s))).collect();
        let d = boundary_matrix(complex, &order).unwrap();
        let ru = ru_decompose(&d);
        let positions: Vec<usize> = order.iter().map(|&(_, p)| p).collect();
        let dims: Vec<usize> = order.iter().map(|&(s, _)| complex.dim_of(s)).collect();
        let pairs = extract_pairs(&ru, &positions, &dims);
        let mut out = BTreeMap::new();
        for e in &pairs.entries {
            let hi = e.death.map_or(n, |d| d - 1);
            if e.birth <= hi {
                *out.entry((e.dim, Bar::new(e.birth, hi))).or_insert(0) += 1;
            }
        }
        out
    }

    fn table_cell_multiset(
        table: &MetaRankTable,
        s: usize,
        t: usize,
    ) -> BTreeMap<(usize, Bar), u64> {
        let mut out = BTreeMap::new();
        for dim in table.dims() {
            for b in table.bars(dim, s, t) {
                *out.entry((dim, b)).or_insert(0) += 1;
            }
        }
        out
    }

    #[test]
    fn diagonal_cells_match_independent_column_reductions() {
        let (complex, _) = triangle_bifiltration();
        let table = compute_metarank(&complex, CheckLevel::Full);
        for i in 1..=complex.n() {
            assert_eq!(
                table_cell_multiset(&table, i, i),
                column_barcode(&complex, i),
                "column {i}"
            );
        }
    }

    #[test]
    fn restrict_at_column_two_matches_column_reduction() {
        let (complex, _) = triangle_bifiltration();
        let order = filtration_along_path(&complex, 2);
        let d = boundary_matrix(&complex, &order).unwrap();
        let ru = ru_decompose(&d);
        let positions: Vec<usize> = order.iter().map(|&(_, p)| p).collect();
        let dims: Vec<usize> = order.iter().map(|&(s, _)| complex.dim_of(s)).collect();
        let pairs = extract_pairs(&ru, &positions, &dims);
        let bars = restrict_and_shift(&pairs, 2, complex.n());
        let mut got = BTreeMap::new();
        for (slot, b) in bars.iter().enumerate() {
            if let Some(b) = b {
                *got.entry((pairs.entries[slot].dim, *b)).or_insert(0u64) += 1;
            }
        }
        assert_eq!(got, column_barcode(&complex, 2));
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(
            Bar::new(1, 4).intersect(Bar::new(3, 6)),
            Some(Bar::new(3, 4))
        );
        assert_eq!(Bar::new(1, 2).intersect(Bar::new(3, 6)), None);
        // Composing through a middle column can kill an interval even though
        // each single step survives.
        let a_to_b = Bar::new(2, 5).intersect(Bar::new(4, 8));
        assert_eq!(a_to_b, Some(Bar::new(4, 5)));
        assert_eq!(a_to_b.unwrap().intersect(Bar::new(6, 9)), None);
    }

    #[test]
    fn intersect_step_requires_alignment() {
        let got = intersect_step(
            &[Some(Bar::new(1, 4)), None],
            &[Some(Bar::new(3, 6)), Some(Bar::new(1, 1))],
        );
        assert_eq!(got, vec![Some(Bar::new(3, 4)), None]);
    }

    /// The realized rectangle module, read at real coordinates: for source
    /// and target columns inside the rectangle's span the H₁ cell is the
    /// single bar `[0, 2)`, and empty otherwise. Comparisons go through the
    /// real conversion, which discards the degenerate bars living between
    /// tied grid indices.
    #[test]
    fn rectangle_module_table_matches_closed_form() {
        use crate::bifiltration::Axis;
        use crate::metrics::to_real_barcode;
        let (complex, map) = rectangle_module_complex();
        let table = compute_metarank(&complex, CheckLevel::Full);
        let cell_real = |sx: f64, tx: f64| -> Vec<(f64, f64)> {
            use crate::bifiltration::LookupMode;
            let a = map.lookup(Axis::X, LookupMode::Le, sx).index().unwrap();
            let b = map.lookup(Axis::X, LookupMode::Le, tx).index().unwrap();
            to_real_barcode(table.bars(1, a, b), &map, Axis::Y)
                .iter()
                .map(|rb| (rb.lo, rb.hi))
                .collect()
        };
        for (sx, tx) in [(0.0, 0.0), (0.0, 0.5), (0.5, 0.999)] {
            assert_eq!(cell_real(sx, tx), vec![(0.0, 2.0)], "cell at ({sx},{tx})");
        }
        for (sx, tx) in [(0.0, 1.0), (1.0, 1.0), (0.5, 2.0)] {
            assert!(cell_real(sx, tx).is_empty(), "cell at ({sx},{tx})");
        }
    }

    /// Growing the target can only shrink each slot's bar (quotients preserve
    /// births); moving the source left can only shrink the whole image, which
    /// shows up as monotone bar-containment counts.
    #[test]
    fn nesting_and_composition_invariants_hold() {
        let mut rng = SmallRng::seed_from_u64(991);
        for _ in 0..8 {
            let (complex, _) = random_incremental_bifiltration(&mut rng, 16);
            let n = complex.n();
            if n == 0 {
                continue;
            }
            let table = compute_metarank(&complex, CheckLevel::Full);
            let dims = table.dims();
            for t in 1..=n {
                for s in 1..=t {
                    for slot in 0..table.slot_dims().len() {
                        if s < t {
                            if let Some(b) = table.cell(s, t)[slot] {
                                let prev = table.cell(s, t - 1)[slot]
                                    .expect("previous cell empty while current non-empty");
                                assert!(prev.contains(b));
                                assert_eq!(prev.lo, b.lo, "births are preserved");
                            }
                        }
                    }
                    // Rank monotonicity in the source column.
                    if s < t {
                        for &dim in &dims {
                            for y in 1..=n {
                                for y2 in y..=n {
                                    let probe = Bar::new(y, y2);
                                    let narrow =
                                        table.bars(dim, s, t).filter(|b| b.contains(probe)).count();
                                    let wide = table
                                        .bars(dim, s + 1, t)
                                        .filter(|b| b.contains(probe))
                                        .count();
                                    assert!(narrow <= wide, "rank shrank at [{s},{t}] {y},{y2}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn transpose_axes_is_an_involution() {
        let (complex, map) = triangle_bifiltration();
        let twice = complex.transpose_axes().transpose_axes();
        assert_eq!(complex, twice);
        let map_twice = map.transpose_axes().transpose_axes();
        assert_eq!(map, map_twice);
    }

    #[test]
    fn transpose_axes_fixed_point_for_symmetric_grades() {
        let raw = parse_bifiltration("0 ; 1 1\n1 ; 2 2\n0 1 ; 3 3").unwrap();
        let (complex, _) = refine_to_simplexwise(&raw).unwrap();
        assert_eq!(complex.transpose_axes(), complex);
    }

    #[test]
    fn empty_complex_gives_empty_table() {
        let raw = parse_bifiltration("").unwrap();
        let (complex, _) = refine_to_simplexwise(&raw).unwrap();
        let table = compute_metarank(&complex, CheckLevel::Full);
        assert_eq!(table.n(), 0);
        assert!(table.dims().is_empty());
    }
}

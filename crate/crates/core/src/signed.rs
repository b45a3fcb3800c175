//! Signed barcodes and the meta-diagram.
//!
//! A signed barcode is a formal difference of two barcodes. Its canonical
//! representative has disjoint positive and negative supports, which the
//! multiplicity-map representation enforces by construction: a bar maps to a
//! non-zero integer, positive part and negative part are the sub-maps by
//! sign. The meta-diagram assigns one signed barcode to each grid interval
//! by an alternating four-term difference of neighbouring meta-rank cells
//! (two terms on the boundary, one at the corner), and expanding each cell
//! into rectangles yields the rank decomposition.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::table::{Bar, MetaRankTable};

/// An integer-multiplicity multiset of bars; the canonical representative of
/// a formal difference of barcodes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignedBarcode {
    mult: BTreeMap<Bar, i64>,
}

impl SignedBarcode {
    pub fn is_zero(&self) -> bool {
        self.mult.is_empty()
    }

    pub fn add(&mut self, bar: Bar, count: i64) {
        if count == 0 {
            return;
        }
        let entry = self.mult.entry(bar).or_insert(0);
        *entry += count;
        if *entry == 0 {
            self.mult.remove(&bar);
        }
    }

    pub fn add_all(&mut self, other: &SignedBarcode) {
        for (&bar, &count) in &other.mult {
            self.add(bar, count);
        }
    }

    pub fn multiplicity(&self, bar: Bar) -> i64 {
        self.mult.get(&bar).copied().unwrap_or(0)
    }

    /// All bars with their signed multiplicities, sorted.
    pub fn iter(&self) -> impl Iterator<Item = (Bar, i64)> + '_ {
        self.mult.iter().map(|(&b, &m)| (b, m))
    }

    pub fn positive_part(&self) -> impl Iterator<Item = (Bar, u64)> + '_ {
        self.mult
            .iter()
            .filter(|(_, &m)| m > 0)
            .map(|(&b, &m)| (b, m as u64))
    }

    pub fn negative_part(&self) -> impl Iterator<Item = (Bar, u64)> + '_ {
        self.mult
            .iter()
            .filter(|(_, &m)| m < 0)
            .map(|(&b, &m)| (b, (-m) as u64))
    }

    /// Total multiplicities by sign: `(positive, negative)`.
    pub fn counts(&self) -> (u64, u64) {
        let mut pos = 0;
        let mut neg = 0;
        for &m in self.mult.values() {
            if m > 0 {
                pos += m as u64;
            } else {
                neg += (-m) as u64;
            }
        }
        (pos, neg)
    }
}

/// Subtracts common bars, leaving the unique representative with disjoint
/// positive and negative supports.
pub fn canonicalize(
    pos: impl IntoIterator<Item = Bar>,
    neg: impl IntoIterator<Item = Bar>,
) -> SignedBarcode {
    let mut out = SignedBarcode::default();
    for b in pos {
        out.add(b, 1);
    }
    for b in neg {
        out.add(b, -1);
    }
    out
}

/// A grid rectangle `[s, t] × [lo, hi]` in closed index coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rect {
    pub s: usize,
    pub t: usize,
    pub lo: usize,
    pub hi: usize,
}

impl Rect {
    pub fn new(s: usize, t: usize, lo: usize, hi: usize) -> Rect {
        debug_assert!(s <= t && lo <= hi);
        Rect { s, t, lo, hi }
    }

    pub fn contains_point(&self, x: usize, y: usize) -> bool {
        self.s <= x && x <= self.t && self.lo <= y && y <= self.hi
    }
}

/// The meta-diagram: per homology dimension, a signed barcode for each grid
/// interval `[s, t]`. Cells that invert to zero are not stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetaDiagram {
    n: usize,
    cells: BTreeMap<(usize, usize, usize), SignedBarcode>,
}

impl MetaDiagram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cell(&self, dim: usize, s: usize, t: usize) -> Option<&SignedBarcode> {
        self.cells.get(&(dim, s, t))
    }

    /// Non-zero cells as `((dim, s, t), barcode)`, sorted.
    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize, usize), &SignedBarcode)> {
        self.cells.iter()
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.cells.keys().map(|&(dim, _, _)| dim).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Total signed-bar multiplicities by sign across all cells.
    pub fn signed_bar_count(&self) -> (u64, u64) {
        let mut pos = 0;
        let mut neg = 0;
        for bc in self.cells.values() {
            let (p, n) = bc.counts();
            pos += p;
            neg += n;
        }
        (pos, neg)
    }

    fn insert_nonzero(&mut self, key: (usize, usize, usize), bc: SignedBarcode) {
        if !bc.is_zero() {
            self.cells.insert(key, bc);
        }
    }
}

/// The alternating difference defining one meta-diagram cell from bar
/// multisets: four terms in the interior, two on the `s = 1` and `t = n`
/// boundaries, one at the corner.
fn invert_cell(
    n: usize,
    s: usize,
    t: usize,
    mut get: impl FnMut(usize, usize, i64, &mut SignedBarcode),
) -> SignedBarcode {
    let mut out = SignedBarcode::default();
    get(s, t, 1, &mut out);
    if t < n {
        get(s, t + 1, -1, &mut out);
    }
    if s > 1 {
        get(s - 1, t, -1, &mut out);
    }
    if s > 1 && t < n {
        get(s - 1, t + 1, 1, &mut out);
    }
    out
}

/// Möbius inversion of a full meta-rank table, one shared sweep over the
/// slot-aligned lists per cell.
pub fn mobius_invert(table: &MetaRankTable) -> MetaDiagram {
    let n = table.n();
    let mut out = MetaDiagram {
        n,
        cells: BTreeMap::new(),
    };
    let dims = table.dims();
    for dim in dims {
        for t in 1..=n {
            for s in 1..=t {
                let bc = invert_cell(n, s, t, |a, b, sign, acc| {
                    for bar in table.bars(dim, a, b) {
                        acc.add(bar, sign);
                    }
                });
                out.insert_nonzero((dim, s, t), bc);
            }
        }
    }
    out
}

/// Möbius inversion of an arbitrary cell-multiset source on an `n × n` grid,
/// for callers that do not hold a slot-aligned table.
pub fn mobius_invert_cells(
    n: usize,
    dims: &[usize],
    mut cell: impl FnMut(usize, usize, usize) -> BTreeMap<Bar, u64>,
) -> MetaDiagram {
    let mut out = MetaDiagram {
        n,
        cells: BTreeMap::new(),
    };
    for &dim in dims {
        for t in 1..=n {
            for s in 1..=t {
                let bc = invert_cell(n, s, t, |a, b, sign, acc| {
                    for (bar, m) in cell(dim, a, b) {
                        acc.add(bar, sign * m as i64);
                    }
                });
                out.insert_nonzero((dim, s, t), bc);
            }
        }
    }
    out
}

/// Inverts one column `t` of a streamed table given column `t + 1` (absent
/// exactly when `t = n`, where the boundary two-term form applies). Returns
/// the non-zero cells as `((dim, s), barcode)`. Used by consumers that never
/// hold the whole table.
pub fn invert_streamed_column(
    t: usize,
    col_t: &[Vec<Option<Bar>>],
    col_next: Option<&[Vec<Option<Bar>>]>,
    slot_dims: &[usize],
) -> Vec<((usize, usize), SignedBarcode)> {
    let mut out = Vec::new();
    let acc = |list: &[Option<Bar>], sign: i64, per_dim: &mut BTreeMap<usize, SignedBarcode>| {
        for (slot, bar) in list.iter().enumerate() {
            if let Some(b) = bar {
                per_dim.entry(slot_dims[slot]).or_default().add(*b, sign);
            }
        }
    };
    for s in 1..=t {
        let mut per_dim: BTreeMap<usize, SignedBarcode> = BTreeMap::new();
        acc(&col_t[s - 1], 1, &mut per_dim);
        if s > 1 {
            acc(&col_t[s - 2], -1, &mut per_dim);
        }
        if let Some(next) = col_next {
            acc(&next[s - 1], -1, &mut per_dim);
            if s > 1 {
                acc(&next[s - 2], 1, &mut per_dim);
            }
        }
        for (dim, bc) in per_dim {
            if !bc.is_zero() {
                out.push(((dim, s), bc));
            }
        }
    }
    out
}

#[derive(Debug, Error, PartialEq)]
pub enum InversionError {
    #[error("negative multiplicity {mult} of bar [{lo}, {hi}] reconstructing cell [{s}, {t}]")]
    NegativeMultiplicity {
        s: usize,
        t: usize,
        lo: usize,
        hi: usize,
        mult: i64,
    },
}

/// Reconstructs a meta-rank cell by summing the meta-diagram over all grid
/// intervals containing `[s, t]`. A negative multiplicity in the sum means
/// the diagram did not come from a meta-rank and is reported as an error.
pub fn mrk_from_mdgm(
    mdgm: &MetaDiagram,
    dim: usize,
    s: usize,
    t: usize,
) -> Result<BTreeMap<Bar, u64>, InversionError> {
    let mut acc = SignedBarcode::default();
    for a in 1..=s {
        for b in t..=mdgm.n() {
            if let Some(bc) = mdgm.cell(dim, a, b) {
                acc.add_all(bc);
            }
        }
    }
    let mut out = BTreeMap::new();
    for (bar, m) in acc.iter() {
        if m < 0 {
            return Err(InversionError::NegativeMultiplicity {
                s,
                t,
                lo: bar.lo as usize,
                hi: bar.hi as usize,
                mult: m,
            });
        }
        out.insert(bar, m as u64);
    }
    Ok(out)
}

/// Signed multisets of grid rectangles: the positive part `r` and negative
/// part `s` of the rank decomposition, with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankDecomposition {
    pub r: BTreeMap<Rect, u64>,
    pub s: BTreeMap<Rect, u64>,
}

impl RankDecomposition {
    /// Signed count of rectangles containing both grid points.
    pub fn rank_at(&self, w1: (usize, usize), w2: (usize, usize)) -> i64 {
        let covers = |m: &BTreeMap<Rect, u64>| -> i64 {
            m.iter()
                .filter(|(rect, _)| {
                    rect.contains_point(w1.0, w1.1) && rect.contains_point(w2.0, w2.1)
                })
                .map(|(_, &c)| c as i64)
                .sum()
        };
        covers(&self.r) - covers(&self.s)
    }

    pub fn counts(&self) -> (u64, u64) {
        (self.r.values().sum(), self.s.values().sum())
    }
}

/// Expands one dimension of a meta-diagram into rectangles: a bar `[lo, hi]`
/// with multiplicity `m` in cell `[s, t]` contributes `|m|` copies of
/// `[s, t] × [lo, hi]` to the part matching its sign. Minimality comes for
/// free from the canonical cell representatives.
pub fn rank_decomposition(mdgm: &MetaDiagram, dim: usize) -> RankDecomposition {
    let mut out = RankDecomposition::default();
    for (&(d, s, t), bc) in mdgm.iter() {
        if d != dim {
            continue;
        }
        for (bar, m) in bc.iter() {
            let rect = Rect::new(s, t, bar.lo as usize, bar.hi as usize);
            if m > 0 {
                *out.r.entry(rect).or_insert(0) += m as u64;
            } else {
                *out.s.entry(rect).or_insert(0) += (-m) as u64;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bar(lo: usize, hi: usize) -> Bar {
        Bar::new(lo, hi)
    }

    #[test]
    fn canonical_representative_subtracts_common_bars() {
        // pos {[0,4],[1,3],[2,4]}, neg {[1,3],[3,4]} → [0,4] + [2,4] − [3,4]
        let got = canonicalize(
            vec![bar(0, 4), bar(1, 3), bar(2, 4)],
            vec![bar(1, 3), bar(3, 4)],
        );
        let pos: Vec<(Bar, u64)> = got.positive_part().collect();
        let neg: Vec<(Bar, u64)> = got.negative_part().collect();
        assert_eq!(pos, vec![(bar(0, 4), 1), (bar(2, 4), 1)]);
        assert_eq!(neg, vec![(bar(3, 4), 1)]);
    }

    #[test]
    fn canonicalize_full_cancellation() {
        let got = canonicalize(vec![bar(1, 2), bar(3, 4)], vec![bar(1, 2), bar(3, 4)]);
        assert!(got.is_zero());
    }

    #[test]
    fn canonicalize_respects_multiplicity() {
        let got = canonicalize(vec![bar(1, 2), bar(1, 2)], vec![bar(1, 2)]);
        assert_eq!(got.multiplicity(bar(1, 2)), 1);
    }

    #[test]
    fn mrk_from_mdgm_top_cell_is_its_own_sum() {
        let mut mdgm = MetaDiagram {
            n: 3,
            cells: BTreeMap::new(),
        };
        let mut bc = SignedBarcode::default();
        bc.add(bar(1, 2), 2);
        mdgm.cells.insert((0, 1, 3), bc);
        let got = mrk_from_mdgm(&mdgm, 0, 1, 3).unwrap();
        assert_eq!(got, BTreeMap::from([(bar(1, 2), 2)]));
    }

    #[test]
    fn mrk_from_mdgm_flags_negative_sums() {
        let mut mdgm = MetaDiagram {
            n: 2,
            cells: BTreeMap::new(),
        };
        let mut bc = SignedBarcode::default();
        bc.add(bar(1, 1), -1);
        mdgm.cells.insert((0, 1, 2), bc);
        assert!(mrk_from_mdgm(&mdgm, 0, 1, 2).is_err());
    }

    #[test]
    fn zero_table_inverts_to_zero_diagram() {
        let mdgm = mobius_invert_cells(4, &[0], |_, _, _| BTreeMap::new());
        assert!(mdgm.iter().next().is_none());
        assert_eq!(mdgm.signed_bar_count(), (0, 0));
    }

    /// A single rectangle summand inverts to one positive cell at exactly its
    /// column span, carrying its row span.
    #[test]
    fn rectangle_closed_form_inverts_to_one_cell() {
        let n = 6;
        let rect = Rect::new(2, 4, 1, 3);
        let cell = |_dim: usize, a: usize, b: usize| -> BTreeMap<Bar, u64> {
            if rect.s <= a && b <= rect.t {
                BTreeMap::from([(bar(rect.lo, rect.hi), 1)])
            } else {
                BTreeMap::new()
            }
        };
        let mdgm = mobius_invert_cells(n, &[0], cell);
        let cells: Vec<_> = mdgm.iter().collect();
        assert_eq!(cells.len(), 1);
        let (&(dim, s, t), bc) = cells[0];
        assert_eq!((dim, s, t), (0, 2, 4));
        assert_eq!(bc.multiplicity(bar(1, 3)), 1);
        let decomp = rank_decomposition(&mdgm, 0);
        assert_eq!(decomp.r, BTreeMap::from([(rect, 1)]));
        assert!(decomp.s.is_empty());
        assert_eq!(mdgm.signed_bar_count(), (1, 0));
    }

    /// Direct evaluation of the alternating difference, written out inline,
    /// must agree with the library inversion cell by cell on a random sum of
    /// rectangle modules.
    #[test]
    fn random_rectangle_sums_invert_like_the_direct_formula() {
        use rand::rngs::SmallRng;
        use rand::{Rng, SeedableRng};
        let mut rng = SmallRng::seed_from_u64(664);
        for _ in 0..20 {
            let n = 6;
            let rects: Vec<Rect> = (0..5)
                .map(|_| {
                    let s = rng.random_range(1..=n);
                    let t = rng.random_range(s..=n);
                    let lo = rng.random_range(1..=n);
                    let hi = rng.random_range(lo..=n);
                    Rect::new(s, t, lo, hi)
                })
                .collect();
            let cell = |a: usize, b: usize| -> BTreeMap<Bar, u64> {
                let mut out = BTreeMap::new();
                for r in &rects {
                    if r.s <= a && b <= r.t {
                        *out.entry(Bar::new(r.lo, r.hi)).or_insert(0) += 1;
                    }
                }
                out
            };
            let mdgm = mobius_invert_cells(n, &[0], |_, a, b| cell(a, b));
            for t in 1..=n {
                for s in 1..=t {
                    let mut direct = SignedBarcode::default();
                    let mut take = |a: usize, b: usize, sign: i64| {
                        for (bar, m) in cell(a, b) {
                            direct.add(bar, sign * m as i64);
                        }
                    };
                    take(s, t, 1);
                    if t < n {
                        take(s, t + 1, -1);
                    }
                    if s > 1 {
                        take(s - 1, t, -1);
                    }
                    if s > 1 && t < n {
                        take(s - 1, t + 1, 1);
                    }
                    let got = mdgm.cell(0, s, t).cloned().unwrap_or_default();
                    assert_eq!(got, direct, "cell [{s},{t}]");
                }
            }
        }
    }

    /// The slot-aligned inversion of a computed table and the generic
    /// multiset inversion are independent code paths and must agree.
    #[test]
    fn slot_and_multiset_inversions_agree() {
        use crate::generators::random_incremental_bifiltration;
        use crate::table::compute_metarank;
        use crate::vineyard::CheckLevel;
        use rand::rngs::SmallRng;
        use rand::SeedableRng;
        let mut rng = SmallRng::seed_from_u64(4451);
        for _ in 0..6 {
            let (complex, _) = random_incremental_bifiltration(&mut rng, 14);
            let table = compute_metarank(&complex, CheckLevel::None);
            let via_slots = mobius_invert(&table);
            let dims = table.dims();
            let via_multisets =
                mobius_invert_cells(table.n(), &dims, |dim, s, t| table.bar_multiset(dim, s, t));
            assert_eq!(via_slots, via_multisets);
        }
    }

    proptest! {
        /// Adding the same multiset to both sides never changes the canonical
        /// representative, and canonicalization is idempotent.
        #[test]
        fn canonicalization_invariant_under_common_padding(
            pos in proptest::collection::vec((0usize..6, 0usize..4), 0..8),
            neg in proptest::collection::vec((0usize..6, 0usize..4), 0..8),
            padding in proptest::collection::vec((0usize..6, 0usize..4), 0..6),
        ) {
            let mk = |v: &[(usize, usize)]| -> Vec<Bar> {
                v.iter().map(|&(lo, d)| bar(lo, lo + d)).collect()
            };
            let base = canonicalize(mk(&pos), mk(&neg));
            let padded = canonicalize(
                mk(&pos).into_iter().chain(mk(&padding)).collect::<Vec<_>>(),
                mk(&neg).into_iter().chain(mk(&padding)).collect::<Vec<_>>(),
            );
            prop_assert_eq!(&base, &padded);
            let again = canonicalize(
                base.positive_part().flat_map(|(b, m)| std::iter::repeat_n(b, m as usize)).collect::<Vec<_>>(),
                base.negative_part().flat_map(|(b, m)| std::iter::repeat_n(b, m as usize)).collect::<Vec<_>>(),
            );
            prop_assert_eq!(base, again);
        }
    }
}

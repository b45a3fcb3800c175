//! Staircase-path sweep with in-place persistence updates.
//!
//! [`SweepState`] holds the filtration along the current path together with
//! its `D = R·U` decomposition and the slot-stable interval list. Pushing the
//! path through one unit square either leaves the filtration unchanged,
//! shifts one simplex's arrival position by one, or transposes two adjacent
//! simplices. Transpositions are handled by the update rules below in O(n):
//! either the pairing function changes and the interval values stay put, or
//! the pairing is unchanged and exactly two intervals move by one in a single
//! coordinate.
//!
//! Within one column sweep, the only simplex that ever moves earlier is the
//! one entering the new column, and each other simplex moves later at most
//! once. The sweep asserts the resulting monotonicity: an interval death that
//! decreased never increases again in the same column, and a birth that
//! increased never decreases again. A violation panics, since it signals a
//! broken update rule rather than bad input.

use crate::bifiltration::{filtration_along_path, path_position, GradedComplex};
use crate::reduction::{
    boundary_matrix, extract_pairs, ru_decompose, PairEntry, PairingList, RUDecomposition,
};

/// How the filtration changes when the path is pushed through one square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareChange {
    NoChange,
    /// One simplex's arrival position moves by `delta` without reordering.
    ArrivalShift {
        simplex: usize,
        delta: i64,
    },
    /// The simplices at matrix columns `lower`, `lower + 1` swap positions.
    Transposition {
        lower: usize,
    },
}

/// How a transposition rewires the interval slots.
///
/// When the two columns keep their partners, the slots follow their
/// simplices across the swap and exactly two interval endpoints move by one
/// (the four single-coordinate cases). When two paired creators trade
/// partners, each class keeps its own birth simplex but acquires the other's
/// death, so the slots follow the simplices on both endpoints. When a death
/// is traded through an essential class or across a birth/death role swap,
/// the slot values stay put positionally and only the underlying simplex
/// attribution changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SlotUpdate {
    SwapEndpoints,
    FollowBirths,
    KeepValues,
}

/// Extra self-checking performed during sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckLevel {
    /// No structural checks beyond the always-on monotonicity assertions.
    #[default]
    None,
    /// After every column: `D = R·U`, reducedness, and the pairing compared
    /// against a from-scratch reduction of the current path filtration.
    /// Costs a reduction per column; meant for tests and `verify`.
    Full,
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    birth_col: usize,
    death_col: Option<usize>,
    dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Birth(usize),
    Death(usize),
}

impl Role {
    fn slot(self) -> usize {
        match self {
            Role::Birth(s) | Role::Death(s) => s,
        }
    }
}

/// Mutable sweep state: the filtration along the current path `γ_i`, its
/// decomposition, and the interval slots.
pub struct SweepState<'a> {
    complex: &'a GradedComplex,
    column: usize,
    ru: RUDecomposition,
    /// Matrix column -> current path position; strictly increasing.
    pos: Vec<usize>,
    /// Matrix column -> simplex id, and its inverse.
    simplex_at: Vec<usize>,
    col_of: Vec<usize>,
    /// Matrix column -> simplex dimension.
    dims: Vec<usize>,
    slots: Vec<Slot>,
    /// Matrix column -> the slot this column currently births or kills.
    role: Vec<Role>,
    check: CheckLevel,
    // Per-simplex arrival monotonicity flags, reset each column sweep: within
    // one column only the entering simplex moves earlier (possibly often) and
    // every other simplex moves later at most once. Tracked only while a
    // column sweep is in progress.
    in_sweep: bool,
    moved_earlier: Vec<bool>,
    moved_later: Vec<bool>,
}

impl<'a> SweepState<'a> {
    /// Reduces the filtration along `γ_1` and sets up the interval slots.
    pub fn new(complex: &'a GradedComplex, check: CheckLevel) -> SweepState<'a> {
        let n = complex.n();
        let order = if n == 0 {
            Vec::new()
        } else {
            filtration_along_path(complex, 1)
        };
        let d = boundary_matrix(complex, &order).expect("refined complex has faces before cofaces");
        let ru = ru_decompose(&d);
        let pos: Vec<usize> = order.iter().map(|&(_, p)| p).collect();
        let simplex_at: Vec<usize> = order.iter().map(|&(s, _)| s).collect();
        let mut col_of = vec![usize::MAX; n];
        for (c, &s) in simplex_at.iter().enumerate() {
            col_of[s] = c;
        }
        let dims: Vec<usize> = simplex_at.iter().map(|&s| complex.dim_of(s)).collect();

        let mut slots = Vec::new();
        let mut role = vec![Role::Birth(usize::MAX); n];
        for c in 0..n {
            if ru.is_positive(c) {
                let death_col = ru.col_with_low(c);
                let slot = slots.len();
                slots.push(Slot {
                    birth_col: c,
                    death_col,
                    dim: dims[c],
                });
                role[c] = Role::Birth(slot);
                if let Some(dc) = death_col {
                    role[dc] = Role::Death(slot);
                }
            }
        }
        debug_assert!(role.iter().all(|r| r.slot() != usize::MAX));

        let state = SweepState {
            complex,
            column: 1,
            ru,
            pos,
            simplex_at,
            col_of,
            dims,
            slots,
            role,
            check,
            in_sweep: false,
            moved_earlier: vec![false; n],
            moved_later: vec![false; n],
        };
        if check == CheckLevel::Full {
            state.verify_against_scratch();
        }
        state
    }

    /// The column index `i` of the current path `γ_i`.
    pub fn column(&self) -> usize {
        self.column
    }

    pub fn n(&self) -> usize {
        self.complex.n()
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_dims(&self) -> Vec<usize> {
        self.slots.iter().map(|s| s.dim).collect()
    }

    /// Interval of a slot in current path positions, death `None` = implicit.
    pub fn slot_interval(&self, slot: usize) -> (usize, Option<usize>, usize) {
        let s = &self.slots[slot];
        (
            self.pos[s.birth_col],
            s.death_col.map(|d| self.pos[d]),
            s.dim,
        )
    }

    /// Snapshot of the interval list, in slot order.
    pub fn pairing_list(&self) -> PairingList {
        PairingList {
            entries: (0..self.slots.len())
                .map(|s| {
                    let (birth, death, dim) = self.slot_interval(s);
                    PairEntry { birth, death, dim }
                })
                .collect(),
        }
    }

    /// Classifies the square with upper-left corner `(i, j)` on the current
    /// sweep, where `i` is the current column. `σ`, the simplex entering
    /// column `i+1`, crosses the square when its y-grade lies below the
    /// square's top; `τ`, the simplex at height `j`, crosses when its x-grade
    /// lies left of the square. Exactly one crossing shifts an arrival, both
    /// together transpose two adjacent arrivals.
    pub fn classify_square(&self, j: usize) -> SquareChange {
        let i = self.column;
        let n = self.n();
        debug_assert!(i < n && 2 <= j && j <= n);
        let sigma = self.complex.simplex_with_xgrade(i + 1);
        let tau = self.complex.simplex_with_ygrade(j);
        let sigma_moves = self.complex.ygrade(sigma) < j;
        let tau_moves = self.complex.xgrade(tau) <= i;
        match (sigma_moves, tau_moves) {
            (false, false) => SquareChange::NoChange,
            (true, false) => SquareChange::ArrivalShift {
                simplex: sigma,
                delta: -1,
            },
            (false, true) => SquareChange::ArrivalShift {
                simplex: tau,
                delta: 1,
            },
            (true, true) => {
                let c_tau = self.col_of[tau];
                let c_sigma = self.col_of[sigma];
                debug_assert_eq!(c_sigma, c_tau + 1);
                debug_assert_eq!(self.pos[c_sigma], self.pos[c_tau] + 1);
                SquareChange::Transposition { lower: c_tau }
            }
        }
    }

    fn apply_shift(&mut self, simplex: usize, delta: i64) {
        let c = self.col_of[simplex];
        let old = self.pos[c];
        let new = (old as i64 + delta) as usize;
        // The shift never reorders: the target position is free.
        if delta < 0 {
            debug_assert!(c == 0 || self.pos[c - 1] < new);
        } else {
            debug_assert!(c + 1 == self.pos.len() || self.pos[c + 1] > new);
        }
        self.pos[c] = new;
        self.record_move(simplex, delta < 0);
    }

    /// Transposes the simplices at matrix columns `c`, `c + 1`, restoring a
    /// valid reduced decomposition of the transposed filtration and rewiring
    /// the interval slots. Returns whether the pairing function changed (in
    /// which case the interval multiset is unchanged).
    pub(crate) fn transpose_update(&mut self, c: usize) -> bool {
        let cp = c + 1;
        assert!(
            !self.ru.d.entry(c, cp),
            "transposition of a face/coface pair at column {c}"
        );

        let c_positive = self.ru.is_positive(c);
        let cp_positive = self.ru.is_positive(cp);
        let mut u_entry = self.ru.u_entry(c, cp);

        // A unit superdiagonal entry over a zero R column can be dropped:
        // it changes D's column c+1 by R's column c, which is zero.
        if u_entry && c_positive {
            self.ru.u.remove_entry(c, cp);
            u_entry = false;
        }

        let (update, pairing_changed) = match (c_positive, cp_positive) {
            (true, true) => {
                // Both creators. Lows at rows c and c+1 swap under the row
                // transposition; a shared entry in the later death column
                // needs one column addition to keep R reduced.
                let k = self.ru.col_with_low(c);
                let l = self.ru.col_with_low(cp);
                let entry_in_l = l.is_some_and(|l| self.ru.r.entry(c, l));
                match (k, l) {
                    (Some(k), Some(l)) if entry_in_l => {
                        debug_assert_eq!(self.dims[k], self.dims[l]);
                        if k < l {
                            self.ru.r.add_col(k, l);
                            self.ru.u.add_row(l, k);
                            self.swap_matrices(c);
                            (SlotUpdate::SwapEndpoints, false)
                        } else {
                            // The creators trade deaths: each class keeps its
                            // own birth simplex and inherits the other's
                            // death column.
                            self.ru.r.add_col(l, k);
                            self.ru.u.add_row(k, l);
                            self.swap_matrices(c);
                            (SlotUpdate::FollowBirths, true)
                        }
                    }
                    (None, Some(_)) if entry_in_l => {
                        // The earlier class is essential and steals the
                        // death; positionally nothing moves.
                        self.swap_matrices(c);
                        (SlotUpdate::KeepValues, true)
                    }
                    _ => {
                        self.swap_matrices(c);
                        (SlotUpdate::SwapEndpoints, false)
                    }
                }
            }
            (false, false) => {
                if u_entry {
                    debug_assert_eq!(self.dims[c], self.dims[cp]);
                    let b1 = self.ru.r_low(c).unwrap();
                    let b2 = self.ru.r_low(cp).unwrap();
                    self.ru.r.add_col(c, cp);
                    self.ru.u.add_row(cp, c);
                    if b1 < b2 {
                        self.swap_matrices(c);
                        (SlotUpdate::SwapEndpoints, false)
                    } else {
                        self.swap_matrices(c);
                        self.ru.r.add_col(c, cp);
                        self.ru.u.add_row(cp, c);
                        (SlotUpdate::KeepValues, true)
                    }
                } else {
                    self.swap_matrices(c);
                    (SlotUpdate::SwapEndpoints, false)
                }
            }
            (false, true) => {
                if u_entry {
                    debug_assert_eq!(self.dims[c], self.dims[cp]);
                    self.ru.r.add_col(c, cp);
                    self.ru.u.add_row(cp, c);
                    self.swap_matrices(c);
                    self.ru.r.add_col(c, cp);
                    self.ru.u.add_row(cp, c);
                    (SlotUpdate::KeepValues, true)
                } else {
                    self.swap_matrices(c);
                    (SlotUpdate::SwapEndpoints, false)
                }
            }
            (true, false) => {
                // The death paired right after its birth would require a
                // face relation, which is excluded.
                debug_assert_ne!(self.ru.r_low(cp), Some(c));
                self.swap_matrices(c);
                (SlotUpdate::SwapEndpoints, false)
            }
        };

        self.simplex_at.swap(c, cp);
        self.col_of[self.simplex_at[c]] = c;
        self.col_of[self.simplex_at[cp]] = cp;
        self.dims.swap(c, cp);
        self.record_move(self.simplex_at[c], true);
        self.record_move(self.simplex_at[cp], false);

        match update {
            SlotUpdate::SwapEndpoints => {
                // Each simplex keeps its partner: the slot references at the
                // two columns follow their simplices, and exactly the two
                // affected endpoints trade adjacent positions.
                let role_c = self.role[c];
                let role_cp = self.role[cp];
                self.role.swap(c, cp);
                for (new_col, role) in [(c, role_cp), (cp, role_c)] {
                    match role {
                        Role::Birth(s) => self.slots[s].birth_col = new_col,
                        Role::Death(s) => self.slots[s].death_col = Some(new_col),
                    }
                }
            }
            SlotUpdate::FollowBirths => {
                // Both columns are creators and their death columns traded
                // lows; each slot follows its birth simplex and re-reads its
                // death column. The interval multiset is preserved while
                // both slots jump wholesale.
                let Role::Birth(slot_c) = self.role[c] else {
                    unreachable!("creator column without a birth role")
                };
                let Role::Birth(slot_cp) = self.role[cp] else {
                    unreachable!("creator column without a birth role")
                };
                self.role.swap(c, cp);
                self.slots[slot_c].birth_col = cp;
                self.slots[slot_cp].birth_col = c;
                let death_c = self.slots[slot_c].death_col;
                let death_cp = self.slots[slot_cp].death_col;
                self.slots[slot_c].death_col = death_cp;
                self.slots[slot_cp].death_col = death_c;
                if let Some(d) = death_cp {
                    self.role[d] = Role::Death(slot_c);
                }
                if let Some(d) = death_c {
                    self.role[d] = Role::Death(slot_cp);
                }
            }
            SlotUpdate::KeepValues => {
                // Positional pairs are unchanged; the simplices swapped
                // attribution underneath them, so every slot keeps its value.
            }
        }
        pairing_changed
    }

    fn swap_matrices(&mut self, c: usize) {
        self.ru.d.swap_cols(c);
        self.ru.d.swap_rows(c);
        self.ru.r.swap_cols(c);
        self.ru.r.swap_rows(c);
        self.ru.u.swap_cols(c);
        self.ru.u.swap_rows(c);
    }

    /// Arrival-order monotonicity within one column sweep: a simplex that
    /// moved earlier never moves later again and vice versa. A violation
    /// means the update rules are broken, so it panics.
    fn record_move(&mut self, simplex: usize, earlier: bool) {
        if !self.in_sweep {
            return;
        }
        if earlier {
            assert!(
                !self.moved_later[simplex],
                "monotonicity violated: simplex {simplex} moved earlier after moving later"
            );
            self.moved_earlier[simplex] = true;
        } else {
            assert!(
                !self.moved_earlier[simplex],
                "monotonicity violated: simplex {simplex} moved later after moving earlier"
            );
            self.moved_later[simplex] = true;
        }
    }

    /// Pushes the path from `γ_i` to `γ_{i+1}`, processing the squares of
    /// column `i` from the top down.
    pub fn sweep_column(&mut self) {
        let n = self.n();
        let i = self.column;
        assert!(i < n, "already at the last column");
        self.in_sweep = true;
        self.moved_earlier.iter_mut().for_each(|f| *f = false);
        self.moved_later.iter_mut().for_each(|f| *f = false);
        for j in (2..=n).rev() {
            match self.classify_square(j) {
                SquareChange::NoChange => {}
                SquareChange::ArrivalShift { simplex, delta } => self.apply_shift(simplex, delta),
                SquareChange::Transposition { lower } => {
                    self.transpose_update(lower);
                }
            }
        }
        self.in_sweep = false;
        self.column = i + 1;
        debug_assert!((0..n)
            .all(|s| { self.pos[self.col_of[s]] == path_position(self.complex, self.column, s) }));
        if self.check == CheckLevel::Full {
            self.ru.verify_invariants().unwrap_or_else(|e| {
                panic!(
                    "decomposition invariant broken at column {}: {e}",
                    self.column
                )
            });
            self.verify_against_scratch();
        }
    }

    /// Compares the maintained intervals against a from-scratch reduction of
    /// the current path filtration.
    fn verify_against_scratch(&self) {
        let order: Vec<(usize, usize)> = {
            let mut o: Vec<(usize, usize)> = self
                .simplex_at
                .iter()
                .enumerate()
                .map(|(c, &s)| (s, self.pos[c]))
                .collect();
            o.sort_by_key(|&(_, p)| p);
            o
        };
        let d = boundary_matrix(self.complex, &order).expect("path order is face-monotone");
        let ru = ru_decompose(&d);
        let positions: Vec<usize> = order.iter().map(|&(_, p)| p).collect();
        let dims: Vec<usize> = order.iter().map(|&(s, _)| self.complex.dim_of(s)).collect();
        let fresh = extract_pairs(&ru, &positions, &dims);
        assert_eq!(
            self.pairing_list().interval_multiset(),
            fresh.interval_multiset(),
            "sweep state diverged from scratch reduction at column {}",
            self.column
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifiltration::{parse_bifiltration, refine_to_simplexwise};
    use crate::generators::{random_incremental_bifiltration, triangle_bifiltration};
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn classify_no_incidence() {
        let raw = parse_bifiltration("0 ; 1 1\n1 ; 2 2").unwrap();
        let (complex, _) = refine_to_simplexwise(&raw).unwrap();
        let state = SweepState::new(&complex, CheckLevel::Full);
        assert_eq!(state.classify_square(2), SquareChange::NoChange);
    }

    #[test]
    fn classify_single_shift_moves_earlier() {
        // σ has xgrade 2 and ygrade 1, τ (ygrade 2) sits right of the
        // square: at square (1, 2) only σ crosses, one position earlier.
        let raw = parse_bifiltration("0 ; 0 2\n1 ; 1 0\n2 ; 2 1").unwrap();
        let (complex, _) = refine_to_simplexwise(&raw).unwrap();
        let state = SweepState::new(&complex, CheckLevel::Full);
        let sigma = complex.simplex_with_xgrade(2);
        assert_eq!(complex.ygrade(sigma), 1);
        assert_eq!(
            state.classify_square(2),
            SquareChange::ArrivalShift {
                simplex: sigma,
                delta: -1
            }
        );
    }

    /// Walks the intermediate staircase paths of a column sweep and diffs the
    /// arrival maps square by square, as an independent oracle for
    /// `classify_square`.
    fn classify_by_path_diff(complex: &GradedComplex, i: usize, j: usize) -> SquareChange {
        let arrivals = |corner_j: usize| -> Vec<usize> {
            // Path with corner (i, corner_j - 1): column i up to height
            // corner_j - 1, step right, then column i+1 upward. corner_j =
            // n + 1 is γ_i itself.
            let n = complex.n();
            let mut points = Vec::new();
            for a in 1..=i {
                points.push((a, 1));
            }
            for b in 2..corner_j {
                points.push((i, b));
            }
            for b in (corner_j - 1).max(1)..=n {
                points.push((i + 1, b));
            }
            for a in i + 2..=n {
                points.push((a, n));
            }
            let mut pos_of = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            for (idx, &(a, b)) in points.iter().enumerate() {
                for s in complex.subcomplex_at(a, b) {
                    if !seen[s] {
                        seen[s] = true;
                        pos_of[s] = idx + 1;
                    }
                }
            }
            pos_of
        };
        let before = arrivals(j + 1);
        let after = arrivals(j);
        let movers: Vec<usize> = (0..complex.n())
            .filter(|&s| before[s] != after[s])
            .collect();
        match movers.len() {
            0 => SquareChange::NoChange,
            1 => SquareChange::ArrivalShift {
                simplex: movers[0],
                delta: after[movers[0]] as i64 - before[movers[0]] as i64,
            },
            2 => {
                let (a, b) = (movers[0], movers[1]);
                assert_eq!(before[a], after[b]);
                assert_eq!(before[b], after[a]);
                let lower_pos = before[a].min(before[b]);
                let _ = lower_pos;
                SquareChange::Transposition {
                    lower: usize::MAX, // column index checked separately
                }
            }
            _ => panic!("more than two arrivals changed across one square"),
        }
    }

    #[test]
    fn classification_matches_path_diff_on_fixture() {
        let (complex, _) = triangle_bifiltration();
        let n = complex.n();
        let mut state = SweepState::new(&complex, CheckLevel::Full);
        for i in 1..n {
            for j in (2..=n).rev() {
                let expect = classify_by_path_diff(&complex, i, j);
                let got = state.classify_square(j);
                match (got, expect) {
                    (SquareChange::Transposition { .. }, SquareChange::Transposition { .. }) => {}
                    (g, e) => assert_eq!(g, e, "square ({i}, {j})"),
                }
                match state.classify_square(j) {
                    SquareChange::NoChange => {}
                    SquareChange::ArrivalShift { simplex, delta } => {
                        state.apply_shift(simplex, delta);
                    }
                    SquareChange::Transposition { lower } => {
                        state.transpose_update(lower);
                    }
                }
            }
            state.column += 1;
            state.verify_against_scratch();
        }
    }

    #[test]
    fn transposing_unpaired_creators_swaps_births() {
        let raw = parse_bifiltration("0 ; 1 2\n1 ; 2 1").unwrap();
        let (complex, _) = refine_to_simplexwise(&raw).unwrap();
        let mut state = SweepState::new(&complex, CheckLevel::Full);
        let before = state.pairing_list();
        let pairing_changed = state.transpose_update(0);
        assert!(!pairing_changed);
        let after = state.pairing_list();
        assert_eq!(after.interval_multiset(), before.interval_multiset());
        // The two birth coordinates traded places under the slots.
        assert_ne!(after.entries, before.entries);
        assert!(after.entries.iter().all(|e| e.death.is_none()));
        state.ru.verify_invariants().unwrap();
    }

    /// A transposition of simplices in different dimensions with disjoint
    /// pairs: both intervals change, each in exactly one coordinate.
    #[test]
    fn transposition_across_dimensions_moves_both_intervals() {
        // Order: a b c ab bc ca abc d e de — transpose abc (kills the cycle)
        // with the vertex d.
        let text = "0 ; 1 1\n1 ; 2 2\n2 ; 3 3\n0 1 ; 4 4\n1 2 ; 5 5\n0 2 ; 6 6\n\
                    0 1 2 ; 7 7\n3 ; 8 8\n4 ; 9 9\n3 4 ; 10 10";
        let raw = parse_bifiltration(text).unwrap();
        let (complex, _) = refine_to_simplexwise(&raw).unwrap();
        let mut state = SweepState::new(&complex, CheckLevel::Full);
        // On γ_1 every simplex after the first arrives along the top at
        // position xgrade + n - 1, so ca sits at 15, abc at 16, d at 17.
        let before = state.pairing_list();
        assert!(before.entries.contains(&PairEntry {
            birth: 15,
            death: Some(16),
            dim: 1
        }));
        assert!(before.entries.contains(&PairEntry {
            birth: 17,
            death: None,
            dim: 0
        }));
        let pairing_changed = state.transpose_update(6);
        assert!(!pairing_changed);
        let after = state.pairing_list();
        assert!(after.entries.contains(&PairEntry {
            birth: 15,
            death: Some(17),
            dim: 1
        }));
        assert!(after.entries.contains(&PairEntry {
            birth: 16,
            death: None,
            dim: 0
        }));
        state.ru.verify_invariants().unwrap();
    }

    /// Randomized transpositions against a from-scratch reduction. Every
    /// update must leave a valid decomposition whose pairing equals the
    /// scratch one, whether or not the pairing function changed.
    #[test]
    fn random_transpositions_match_scratch_reduction() {
        let mut rng = SmallRng::seed_from_u64(7151129);
        let mut total = 0usize;
        while total < 10_000 {
            let (complex, _) = random_incremental_bifiltration(&mut rng, 14);
            let n = complex.n();
            if n < 2 {
                continue;
            }
            let mut state = SweepState::new(&complex, CheckLevel::None);
            for _ in 0..200 {
                let c = rng.random_range(0..n - 1);
                if state.ru.d.entry(c, c + 1) {
                    continue; // face/coface pairs stay put
                }
                state.transpose_update(c);
                total += 1;
                state.verify_against_scratch();
                if total.is_multiple_of(50) {
                    state.ru.verify_invariants().unwrap();
                }
                if total >= 10_000 {
                    break;
                }
            }
        }
    }

    #[test]
    fn sweep_single_simplex_is_noop() {
        let raw = parse_bifiltration("0 ; 0 0").unwrap();
        let (complex, _) = refine_to_simplexwise(&raw).unwrap();
        let state = SweepState::new(&complex, CheckLevel::Full);
        assert_eq!(state.column(), 1);
        assert_eq!(state.n(), 1);
        // n = 1: no squares to sweep, nothing to do.
    }

    #[test]
    fn sweep_column_with_no_changes_keeps_pairing() {
        let raw = parse_bifiltration("0 ; 1 1\n1 ; 2 2").unwrap();
        let (complex, _) = refine_to_simplexwise(&raw).unwrap();
        let mut state = SweepState::new(&complex, CheckLevel::Full);
        let before = state.pairing_list();
        state.sweep_column();
        assert_eq!(state.pairing_list(), before);
    }

    #[test]
    fn sweep_matches_scratch_on_fixture_every_column() {
        let (complex, _) = triangle_bifiltration();
        // CheckLevel::Full re-verifies against scratch after each column.
        let mut state = SweepState::new(&complex, CheckLevel::Full);
        for _ in 1..complex.n() {
            state.sweep_column();
        }
        assert_eq!(state.column(), complex.n());
    }

    #[test]
    fn sweep_matches_scratch_on_random_complexes() {
        let mut rng = SmallRng::seed_from_u64(40292);
        for _ in 0..12 {
            let (complex, _) = random_incremental_bifiltration(&mut rng, 18);
            if complex.n() < 2 {
                continue;
            }
            let mut state = SweepState::new(&complex, CheckLevel::Full);
            for _ in 1..complex.n() {
                state.sweep_column();
            }
        }
    }
}

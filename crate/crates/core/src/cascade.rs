//! Exact cell computation for the meta-rank table.
//!
//! The slices of the grid are the y-filtered subcomplexes `F(i, ·)`; moving
//! from column `i` to `i + 1` inserts one simplex into the slice. This module
//! maintains the slice's persistence under those insertions and records, for
//! every homology class, the *relation* its death imposes: past the death
//! row, the class equals a sum of strictly older classes (the cycle
//! expression of the killing column). Relations may be rewritten when a
//! later insertion steals a death, and a death column whose victim is stolen
//! can empty out and become a class itself, so both the relation table and
//! the class set evolve with the column index.
//!
//! A cell `[k, i]` of the table is the image of the column-`k` slice module
//! in the column-`i` slice. Its barcode is resolved symbolically: one chain
//! per class born in the source, each a formal sum of classes, processed
//! against the active relations in death-row order. A substitution that
//! empties a chain kills it outright; a substitution that makes two chains
//! equal kills the younger, which is exactly the persistence pairing of the
//! image module. This stays exact where a slot-wise interval intersection
//! does not: an image element can outlive its own class by leaking into an
//! older class that the source never saw.

use std::collections::HashMap;
use std::rc::Rc;

use crate::bifiltration::GradedComplex;
use crate::table::Bar;

/// XOR-merge of two sorted row lists.
fn xor_merge(a: &[u32], b: &[u32]) -> Vec<u32> {
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

#[derive(Debug, Clone)]
struct DeathColumn {
    /// y-row of the killing simplex.
    row: u32,
    /// Reduced boundary column, sorted y-rows, low last.
    col: Vec<u32>,
    /// Chain with `∂(chain) = col`, sorted y-rows.
    chain: Vec<u32>,
}

#[derive(Debug, Clone)]
struct Relation {
    /// Row at which the class dies.
    death_row: u32,
    /// The class equals this sum of strictly older classes past the death.
    rhs: Rc<Vec<u32>>,
}

/// Incremental slice state plus the per-class relation table.
pub(crate) struct CellEngine {
    n: usize,
    /// y-row -> simplex dimension.
    dim_of_row: Vec<usize>,
    /// simplex id -> sorted y-rows of its facets.
    facet_rows: Vec<Vec<u32>>,
    /// y-row -> owner death column currently killing this class row.
    owner: Vec<Option<DeathColumn>>,
    /// y-row -> cycle representative of the class born there (support rows ≤ row).
    cycles: Vec<Option<Rc<Vec<u32>>>>,
    /// y-row -> active relation.
    relations: Vec<Option<Relation>>,
    /// Active relations sorted by death row: death_row -> class row.
    by_death_row: std::collections::BTreeMap<u32, u32>,
    /// Class rows in slot order (order of first positivity, then row).
    classes: Vec<u32>,
    /// y-row -> slot index, or MAX.
    slot_of_row: Vec<usize>,
    /// Per-column substitution schedule: `(death_row, class, expression)`
    /// in ascending row order, each expression expanded over classes alive
    /// at its own row. Rebuilt lazily after insertions.
    events: Vec<(u32, u32, Rc<Vec<u32>>)>,
    events_dirty: bool,
}

impl CellEngine {
    pub(crate) fn new(complex: &GradedComplex) -> CellEngine {
        let n = complex.n();
        let mut dim_of_row = vec![0usize; n + 1];
        for s in 0..n {
            dim_of_row[complex.ygrade(s)] = complex.dim_of(s);
        }
        let by_simplex: HashMap<&crate::bifiltration::Simplex, usize> =
            (0..n).map(|s| (complex.simplex(s), s)).collect();
        let facet_rows: Vec<Vec<u32>> = (0..n)
            .map(|s| {
                let mut rows: Vec<u32> = complex
                    .simplex(s)
                    .facets()
                    .map(|f| complex.ygrade(by_simplex[&f]) as u32)
                    .collect();
                rows.sort_unstable();
                rows
            })
            .collect();
        CellEngine {
            n,
            dim_of_row,
            facet_rows,
            owner: vec![None; n + 1],
            cycles: vec![None; n + 1],
            relations: vec![None; n + 1],
            by_death_row: Default::default(),
            classes: Vec::new(),
            slot_of_row: vec![usize::MAX; n + 1],
            events: Vec::new(),
            events_dirty: false,
        }
    }

    /// Dimension tags of the slots discovered so far, in slot order.
    pub(crate) fn slot_dims(&self) -> Vec<usize> {
        self.classes
            .iter()
            .map(|&r| self.dim_of_row[r as usize])
            .collect()
    }

    pub(crate) fn slot_count(&self) -> usize {
        self.classes.len()
    }

    fn new_class(&mut self, row: u32, cycle: Vec<u32>) {
        debug_assert_eq!(cycle.last().copied(), Some(row));
        self.cycles[row as usize] = Some(Rc::new(cycle));
        self.slot_of_row[row as usize] = self.classes.len();
        self.classes.push(row);
    }

    /// Records the killing of class `low` by the settled column. The relation
    /// is the cycle expression of the column minus the class itself.
    fn record_relation(&mut self, dc: &DeathColumn) {
        let low = *dc.col.last().expect("death column is non-empty");
        // Express the killing cycle over the class cycles; the residual's
        // largest row is always a class because cycles span all cycles.
        let mut residual = dc.col.clone();
        let mut rhs = Vec::new();
        while let Some(&top) = residual.last() {
            let cycle = self.cycles[top as usize]
                .as_ref()
                .expect("cycle expression hit a non-class row")
                .clone();
            residual = xor_merge(&residual, &cycle);
            if top != low {
                rhs.push(top);
            }
        }
        rhs.sort_unstable();
        if let Some(old) = self.relations[low as usize].take() {
            self.by_death_row.remove(&old.death_row);
        }
        self.relations[low as usize] = Some(Relation {
            death_row: dc.row,
            rhs: Rc::new(rhs),
        });
        self.by_death_row.insert(dc.row, low);
    }

    /// Inserts the next simplex (in x-grade order) into the slice, updating
    /// pairings, cycles and relations through the usual insertion cascade.
    pub(crate) fn insert(&mut self, complex: &GradedComplex, simplex: usize) {
        self.events_dirty = true;
        let row = complex.ygrade(simplex) as u32;
        let col = self.facet_rows[simplex].clone();
        let mut current = DeathColumn {
            row,
            col,
            chain: vec![row],
        };
        loop {
            let Some(&low) = current.col.last() else {
                // The column emptied: its chain is a new cycle born at the
                // row of the youngest simplex in it.
                let cycle = current.chain;
                let birth = *cycle.last().expect("chain contains its own simplex");
                self.new_class(birth, cycle);
                return;
            };
            match self.owner[low as usize].take() {
                None => {
                    self.record_relation(&current);
                    self.owner[low as usize] = Some(current);
                    return;
                }
                Some(existing) => {
                    if existing.row < current.row {
                        // Receive the older column and keep reducing.
                        current.col = xor_merge(&current.col, &existing.col);
                        current.chain = xor_merge(&current.chain, &existing.chain);
                        self.owner[low as usize] = Some(existing);
                    } else {
                        // The newer-in-y column is displaced: we take the
                        // death, it absorbs us and keeps cascading.
                        let mut displaced = existing;
                        displaced.col = xor_merge(&displaced.col, &current.col);
                        displaced.chain = xor_merge(&displaced.chain, &current.chain);
                        self.record_relation(&current);
                        self.owner[low as usize] = Some(current);
                        current = displaced;
                    }
                }
            }
        }
    }

    /// Builds the per-column substitution schedule. Relations are processed
    /// in ascending death-row order; a dying class's raw expression may name
    /// classes that are already dead at that row, which are replaced by
    /// their current expressions. The kept expressions are themselves
    /// rewritten as later classes die, so every scheduled expression only
    /// names classes alive at its own row.
    fn rebuild_events(&mut self) {
        self.events.clear();
        // Dead class -> current expression over classes alive "now".
        let mut exp: HashMap<u32, Vec<u32>> = HashMap::new();
        // Class -> dead classes whose expression currently names it.
        let mut containing: HashMap<u32, Vec<u32>> = HashMap::new();
        for (&death_row, &class) in self.by_death_row.iter() {
            let raw = self.relations[class as usize]
                .as_ref()
                .expect("scheduled class has a relation")
                .rhs
                .clone();
            let mut snapshot: Vec<u32> = Vec::new();
            for &q in raw.iter() {
                match exp.get(&q) {
                    Some(e) => snapshot = xor_merge(&snapshot, e),
                    None => snapshot = xor_merge(&snapshot, &[q]),
                }
            }
            let rc = Rc::new(snapshot.clone());
            self.events.push((death_row, class, rc));
            // The newly dead class disappears from every stored expression.
            if let Some(holders) = containing.remove(&class) {
                for holder in holders {
                    let cur = exp.get_mut(&holder).expect("holder is dead");
                    let mut next = xor_merge(cur, std::slice::from_ref(&class));
                    next = xor_merge(&next, &snapshot);
                    for &q in &snapshot {
                        let entry = containing.entry(q).or_default();
                        match entry.iter().position(|&e| e == holder) {
                            Some(p) => {
                                entry.swap_remove(p);
                            }
                            None => entry.push(holder),
                        }
                    }
                    *cur = next;
                }
            }
            for &q in &snapshot {
                containing.entry(q).or_default().push(class);
            }
            exp.insert(class, snapshot);
        }
        self.events_dirty = false;
    }

    /// Barcode of the image of the column-`k` slice in the current slice,
    /// as a slot-aligned list over the classes discovered so far.
    ///
    /// `source_slots` must hold the slot count at the end of column `k`
    /// (classes are discovered monotonically, so this identifies the source).
    pub(crate) fn resolve_cell(&mut self, source_slots: usize) -> Vec<Option<Bar>> {
        if self.events_dirty {
            self.rebuild_events();
        }
        let total_slots = self.classes.len();
        let mut bars: Vec<Option<Bar>> = vec![None; total_slots];
        // One chain per source class: chains[j] tracks the image of class j.
        let mut vectors: Vec<Vec<u32>> = (0..source_slots).map(|j| vec![self.classes[j]]).collect();
        let mut alive: Vec<bool> = vec![true; source_slots];
        // leading row -> chain.
        let mut owner_of: HashMap<u32, usize> = HashMap::new();
        // class row -> chains containing it.
        let mut containing: HashMap<u32, Vec<usize>> = HashMap::new();
        for (j, v) in vectors.iter().enumerate() {
            owner_of.insert(v[0], j);
            containing.entry(v[0]).or_default().push(j);
        }
        let events = self.events.clone();

        for (death_row, class, rhs) in events {
            let members = match containing.remove(&class) {
                Some(m) => m,
                None => continue,
            };
            let mut worklist: Vec<usize> = Vec::new();
            for j in members {
                if !alive[j] || vectors[j].binary_search(&class).is_err() {
                    continue;
                }
                let old_leading = *vectors[j].last().unwrap();
                let mut v = xor_merge(&vectors[j], std::slice::from_ref(&class));
                v = xor_merge(&v, &rhs);
                for &q in rhs.iter() {
                    let entry = containing.entry(q).or_default();
                    match entry.iter().position(|&e| e == j) {
                        Some(p) => {
                            entry.swap_remove(p);
                        }
                        None => entry.push(j),
                    }
                }
                vectors[j] = v;
                if owner_of.get(&old_leading) == Some(&j) {
                    owner_of.remove(&old_leading);
                }
                worklist.push(j);
            }
            // Re-echelonize: on a leading-row collision the younger-born
            // chain absorbs the elder; an emptied chain dies here.
            while let Some(j) = worklist.pop() {
                if !alive[j] {
                    continue;
                }
                let Some(&leading) = vectors[j].last() else {
                    alive[j] = false;
                    let birth = self.classes[j] as usize;
                    if (death_row as usize) > birth {
                        bars[j] = Some(Bar::new(birth, death_row as usize - 1));
                    }
                    continue;
                };
                match owner_of.get(&leading).copied() {
                    None => {
                        owner_of.insert(leading, j);
                    }
                    Some(other) if other == j => {}
                    Some(other) => {
                        // Distinct chains, same leading: reduce the younger.
                        let (younger, elder) = if self.classes[j] > self.classes[other] {
                            (j, other)
                        } else {
                            (other, j)
                        };
                        if younger != j {
                            owner_of.insert(leading, j);
                        }
                        let merged = xor_merge(&vectors[younger], &vectors[elder]);
                        // Containment index updates for the symmetric difference.
                        for &q in vectors[elder].clone().iter() {
                            let entry = containing.entry(q).or_default();
                            match entry.iter().position(|&e| e == younger) {
                                Some(p) => {
                                    entry.swap_remove(p);
                                }
                                None => entry.push(younger),
                            }
                        }
                        vectors[younger] = merged;
                        worklist.push(younger);
                    }
                }
            }
        }
        for j in 0..source_slots {
            if alive[j] {
                bars[j] = Some(Bar::new(self.classes[j] as usize, self.n));
            }
        }
        bars
    }
}

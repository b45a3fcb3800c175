//! Example and test-corpus bifiltrations.
//!
//! Everything here goes through [`refine_to_simplexwise`], so the outputs are
//! valid graded complexes by construction. The random families are seeded by
//! the caller and deterministic for a fixed seed.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::bifiltration::{
    parse_bifiltration, refine_to_simplexwise, GradeMap, GradedComplex, RawBifiltration, Simplex,
};

/// A filled triangle with generic grades: three vertices, three edges, one
/// 2-cell. Small enough to hand-check, rich enough to have interesting
/// homology in dimensions 0 and 1.
pub fn triangle_bifiltration() -> (GradedComplex, GradeMap) {
    let text = "\
0 ; 1 1
1 ; 2 5
2 ; 3 2
0 1 ; 4 6
0 2 ; 5 3
1 2 ; 6 7
0 1 2 ; 7 8
";
    let raw = parse_bifiltration(text).expect("fixture parses");
    refine_to_simplexwise(&raw).expect("fixture is valid")
}

/// A triangulated 2-sphere graded so that its 1-dimensional homology is a
/// single class supported on `[0, 1) × [0, 2)` in real coordinates: the
/// equatorial cycle appears at the origin, one hemisphere fills it for
/// `x ≥ 1`, the other for `y ≥ 2`.
pub fn rectangle_module_complex() -> (GradedComplex, GradeMap) {
    let text = "\
0 ; 0 0
1 ; 0 0
2 ; 0 0
0 1 ; 0 0
0 2 ; 0 0
1 2 ; 0 0
0 1 2 ; 1 0
3 ; 0 2
0 3 ; 0 2
1 3 ; 0 2
2 3 ; 0 2
0 1 3 ; 0 2
0 2 3 ; 0 2
1 2 3 ; 0 2
";
    let raw = parse_bifiltration(text).expect("fixture parses");
    refine_to_simplexwise(&raw).expect("fixture is valid")
}

fn grade_bump(rng: &mut impl Rng) -> f64 {
    // Ties with the carrying face are deliberately common; the refinement
    // has to break them.
    if rng.random_bool(0.3) {
        0.0
    } else {
        rng.random_range(0.0..0.5)
    }
}

/// Random flag complex: random vertex bigrades, random edges graded above
/// their endpoints, and every 3-clique filled in above its edges.
pub fn random_flag_bifiltration(
    rng: &mut impl Rng,
    n_vertices: usize,
    edge_probability: f64,
) -> (GradedComplex, GradeMap) {
    let mut raw = RawBifiltration::default();
    let mut grades: Vec<(f64, f64)> = Vec::new();
    for v in 0..n_vertices {
        let g = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        grades.push(g);
        raw.simplices
            .push((Simplex::new(vec![v as u32]).unwrap(), g.0, g.1));
    }
    let mut edge_grade = vec![vec![None; n_vertices]; n_vertices];
    for a in 0..n_vertices {
        for b in a + 1..n_vertices {
            if rng.random_bool(edge_probability) {
                let g = (
                    grades[a].0.max(grades[b].0) + grade_bump(rng),
                    grades[a].1.max(grades[b].1) + grade_bump(rng),
                );
                edge_grade[a][b] = Some(g);
                raw.simplices
                    .push((Simplex::new(vec![a as u32, b as u32]).unwrap(), g.0, g.1));
            }
        }
    }
    for a in 0..n_vertices {
        for b in a + 1..n_vertices {
            for c in b + 1..n_vertices {
                if let (Some(ab), Some(ac), Some(bc)) =
                    (edge_grade[a][b], edge_grade[a][c], edge_grade[b][c])
                {
                    let g = (
                        ab.0.max(ac.0).max(bc.0) + grade_bump(rng),
                        ab.1.max(ac.1).max(bc.1) + grade_bump(rng),
                    );
                    raw.simplices.push((
                        Simplex::new(vec![a as u32, b as u32, c as u32]).unwrap(),
                        g.0,
                        g.1,
                    ));
                }
            }
        }
    }
    refine_to_simplexwise(&raw).expect("construction is closed and monotone")
}

/// Random complex built one simplex at a time: vertices appear at random
/// bigrades, and higher simplices are attached over already-present
/// boundaries, graded at or above their facets.
pub fn random_incremental_bifiltration(
    rng: &mut impl Rng,
    target_n: usize,
) -> (GradedComplex, GradeMap) {
    let mut raw = RawBifiltration::default();
    let mut present: std::collections::HashMap<Simplex, (f64, f64)> = Default::default();
    let mut vertices: Vec<u32> = Vec::new();
    while raw.simplices.len() < target_n {
        let want_vertex = vertices.len() < 3 || rng.random_bool(0.3);
        if want_vertex {
            let v = vertices.len() as u32;
            let g = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
            let s = Simplex::new(vec![v]).unwrap();
            present.insert(s.clone(), g);
            raw.simplices.push((s, g.0, g.1));
            vertices.push(v);
            continue;
        }
        let dim = *[1usize, 1, 1, 2, 2, 3].choose(rng).unwrap();
        let mut attached = false;
        for _ in 0..8 {
            if vertices.len() < dim + 1 {
                break;
            }
            let mut verts: Vec<u32> = vertices.choose_multiple(rng, dim + 1).copied().collect();
            verts.sort_unstable();
            let candidate = Simplex::new(verts).unwrap();
            if present.contains_key(&candidate) {
                continue;
            }
            let facet_grades: Option<Vec<(f64, f64)>> = candidate
                .facets()
                .map(|f| present.get(&f).copied())
                .collect();
            let Some(fg) = facet_grades else { continue };
            let g = (
                fg.iter().map(|g| g.0).fold(0.0, f64::max) + grade_bump(rng),
                fg.iter().map(|g| g.1).fold(0.0, f64::max) + grade_bump(rng),
            );
            present.insert(candidate.clone(), g);
            raw.simplices.push((candidate, g.0, g.1));
            attached = true;
            break;
        }
        if !attached {
            let v = vertices.len() as u32;
            let g = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
            let s = Simplex::new(vec![v]).unwrap();
            present.insert(s.clone(), g);
            raw.simplices.push((s, g.0, g.1));
            vertices.push(v);
        }
    }
    refine_to_simplexwise(&raw).expect("construction is closed and monotone")
}

/// Triangulated `k × k` grid, graded by a sweep from the lower-left corner:
/// the x-grade favours columns, the y-grade rows, so the two axes order the
/// simplices very differently. Trimmed down to exactly `target_n` simplices
/// by repeatedly deleting a maximal simplex with the largest x-grade. `seed`
/// jitters the grades deterministically.
pub fn triangulated_grid_bifiltration(target_n: usize, seed: u64) -> (GradedComplex, GradeMap) {
    assert!(target_n >= 1);
    let mut k = 2usize;
    while 6 * k * k - 8 * k + 3 < target_n {
        k += 1;
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut raw = RawBifiltration::default();
    let vid = |i: usize, j: usize| (i * k + j) as u32;
    let mut vgrade = vec![(0.0f64, 0.0f64); k * k];
    for i in 0..k {
        for j in 0..k {
            let jitter = rng.random_range(0.0..1e-3);
            let g = (
                i as f64 + 0.01 * j as f64 + jitter,
                j as f64 + 0.01 * i as f64 + jitter,
            );
            vgrade[(vid(i, j)) as usize] = g;
            raw.simplices
                .push((Simplex::new(vec![vid(i, j)]).unwrap(), g.0, g.1));
        }
    }
    let mut push = |verts: Vec<u32>, rng: &mut rand_chacha::ChaCha8Rng| {
        let gx = verts
            .iter()
            .map(|&v| vgrade[v as usize].0)
            .fold(0.0, f64::max)
            + (verts.len() - 1) as f64 * 1e-4
            + rng.random_range(0.0..1e-5);
        let gy = verts
            .iter()
            .map(|&v| vgrade[v as usize].1)
            .fold(0.0, f64::max)
            + (verts.len() - 1) as f64 * 1e-4
            + rng.random_range(0.0..1e-5);
        raw.simplices.push((Simplex::new(verts).unwrap(), gx, gy));
    };
    for i in 0..k {
        for j in 0..k {
            if i + 1 < k {
                push(vec![vid(i, j), vid(i + 1, j)], &mut rng);
            }
            if j + 1 < k {
                push(vec![vid(i, j), vid(i, j + 1)], &mut rng);
            }
            if i + 1 < k && j + 1 < k {
                push(vec![vid(i, j), vid(i + 1, j + 1)], &mut rng);
                push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)], &mut rng);
                push(vec![vid(i, j), vid(i, j + 1), vid(i + 1, j + 1)], &mut rng);
            }
        }
    }

    // Trim maximal simplices, largest x-grade first, until the size is exact.
    while raw.simplices.len() > target_n {
        let mut coface_count = vec![0usize; raw.simplices.len()];
        let index: std::collections::HashMap<&Simplex, usize> = raw
            .simplices
            .iter()
            .enumerate()
            .map(|(i, (s, _, _))| (s, i))
            .collect();
        for (s, _, _) in &raw.simplices {
            for f in s.facets() {
                coface_count[index[&f]] += 1;
            }
        }
        let victim = (0..raw.simplices.len())
            .filter(|&i| coface_count[i] == 0)
            .max_by(|&a, &b| raw.simplices[a].1.total_cmp(&raw.simplices[b].1))
            .expect("a maximal simplex always exists");
        raw.simplices.remove(victim);
    }
    refine_to_simplexwise(&raw).expect("construction is closed and monotone")
}

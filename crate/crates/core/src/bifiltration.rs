//! Bifiltered simplicial complexes on an integer grid.
//!
//! A bifiltration assigns each simplex a bigrade; the sublevel sets
//! `F(a, b) = {σ : xgrade(σ) ≤ a, ygrade(σ) ≤ b}` form a family of complexes
//! monotone in both coordinates. [`refine_to_simplexwise`] rescales the input
//! grades so that each axis carries a permutation of `1..=n`, which is exactly
//! the condition for every unit step of the grid to add at most one simplex.
//! The original real grades are kept in a [`GradeMap`] for the conversions
//! back to real coordinates.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// A simplex, stored as its strictly increasing list of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<u32>,
}

impl Simplex {
    /// Builds a simplex from vertex ids. Ids are sorted; duplicates are rejected.
    pub fn new(mut vertices: Vec<u32>) -> Option<Self> {
        if vertices.is_empty() {
            return None;
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// The codimension-one faces, in vertex order.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.vertices.len()).filter_map(move |skip| {
            if self.vertices.len() == 1 {
                return None;
            }
            let mut v = Vec::with_capacity(self.vertices.len() - 1);
            v.extend(
                self.vertices
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, &x)| x),
            );
            Some(Simplex { vertices: v })
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.vertices {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Parse result: simplices in file order with their real bigrades.
#[derive(Debug, Clone, Default)]
pub struct RawBifiltration {
    pub simplices: Vec<(Simplex, f64, f64)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: expected `v0 v1 ... vk ; x y`")]
    MalformedLine { line: usize },
    #[error("line {line}: malformed grade `{token}`")]
    MalformedGrade { line: usize, token: String },
    #[error("line {line}: malformed vertex id `{token}`")]
    MalformedVertex { line: usize, token: String },
    #[error("line {line}: repeated vertex in simplex")]
    RepeatedVertex { line: usize },
    #[error("line {line}: duplicate simplex")]
    DuplicateSimplex { line: usize },
}

/// Parses the plain-text bifiltration format: one simplex per line as
/// `v0 v1 ... vk ; x y`, `#` starting a comment. Line order is significant,
/// it is the tie-breaking input index used by [`refine_to_simplexwise`].
pub fn parse_bifiltration(text: &str) -> Result<RawBifiltration, ParseError> {
    let mut out = RawBifiltration::default();
    let mut seen: HashSet<Simplex> = HashSet::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        if content.trim().is_empty() {
            continue;
        }
        let (verts, grades) = content
            .split_once(';')
            .ok_or(ParseError::MalformedLine { line })?;
        let mut vertices = Vec::new();
        for tok in verts.split_whitespace() {
            let v: u32 = tok.parse().map_err(|_| ParseError::MalformedVertex {
                line,
                token: tok.to_string(),
            })?;
            vertices.push(v);
        }
        if vertices.is_empty() {
            return Err(ParseError::MalformedLine { line });
        }
        let grade_toks: Vec<&str> = grades.split_whitespace().collect();
        if grade_toks.len() != 2 {
            return Err(ParseError::MalformedGrade {
                line,
                token: grades.trim().to_string(),
            });
        }
        let mut xy = [0.0f64; 2];
        for (slot, tok) in xy.iter_mut().zip(&grade_toks) {
            *slot = tok.parse().map_err(|_| ParseError::MalformedGrade {
                line,
                token: tok.to_string(),
            })?;
        }
        let simplex = Simplex::new(vertices).ok_or(ParseError::RepeatedVertex { line })?;
        if !seen.insert(simplex.clone()) {
            return Err(ParseError::DuplicateSimplex { line });
        }
        out.simplices.push((simplex, xy[0], xy[1]));
    }
    Ok(out)
}

#[derive(Debug, Error, PartialEq)]
pub enum ValidationError {
    #[error("missing facet `{facet}` of simplex `{simplex}`")]
    MissingFacet { simplex: String, facet: String },
    #[error(
        "face-monotonicity violation: facet `{facet}` at ({fx}, {fy}) \
         arrives after coface `{coface}` at ({cx}, {cy})"
    )]
    FaceMonotonicity {
        facet: String,
        coface: String,
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
    },
    #[error("grade is not finite for simplex `{simplex}`")]
    NonFiniteGrade { simplex: String },
}

/// A simplicial complex with one integer bigrade per simplex, where the
/// x-grades and y-grades are each a permutation of `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedComplex {
    simplices: Vec<Simplex>,
    /// 1-based grade per simplex, a permutation of `1..=n` on each axis.
    xgrade: Vec<usize>,
    ygrade: Vec<usize>,
    /// Inverse maps: `x_at[g - 1]` is the simplex with x-grade `g`.
    x_at: Vec<usize>,
    y_at: Vec<usize>,
}

impl GradedComplex {
    pub fn n(&self) -> usize {
        self.simplices.len()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, id: usize) -> &Simplex {
        &self.simplices[id]
    }

    pub fn dim_of(&self, id: usize) -> usize {
        self.simplices[id].dimension()
    }

    /// Largest simplex dimension, or `None` for the empty complex.
    pub fn max_dim(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.dimension()).max()
    }

    pub fn xgrade(&self, id: usize) -> usize {
        self.xgrade[id]
    }

    pub fn ygrade(&self, id: usize) -> usize {
        self.ygrade[id]
    }

    pub fn simplex_with_xgrade(&self, g: usize) -> usize {
        self.x_at[g - 1]
    }

    pub fn simplex_with_ygrade(&self, g: usize) -> usize {
        self.y_at[g - 1]
    }

    /// Ids of the simplices in `F(a, b)`, in no particular order.
    pub fn subcomplex_at(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&s| self.xgrade[s] <= a && self.ygrade[s] <= b)
            .collect()
    }

    /// Swaps the two grading axes.
    pub fn transpose_axes(&self) -> GradedComplex {
        GradedComplex {
            simplices: self.simplices.clone(),
            xgrade: self.ygrade.clone(),
            ygrade: self.xgrade.clone(),
            x_at: self.y_at.clone(),
            y_at: self.x_at.clone(),
        }
    }

    /// Assembles a complex from pre-computed grade permutations. The caller
    /// guarantees closure and face-monotonicity (checked in debug builds).
    pub(crate) fn from_parts(
        simplices: Vec<Simplex>,
        xgrade: Vec<usize>,
        ygrade: Vec<usize>,
    ) -> GradedComplex {
        let n = simplices.len();
        let mut x_at = vec![usize::MAX; n];
        let mut y_at = vec![usize::MAX; n];
        for s in 0..n {
            x_at[xgrade[s] - 1] = s;
            y_at[ygrade[s] - 1] = s;
        }
        debug_assert!(x_at.iter().all(|&s| s != usize::MAX));
        debug_assert!(y_at.iter().all(|&s| s != usize::MAX));
        let complex = GradedComplex {
            simplices,
            xgrade,
            ygrade,
            x_at,
            y_at,
        };
        debug_assert!({
            let by_simplex: std::collections::HashMap<&Simplex, usize> = complex
                .simplices
                .iter()
                .enumerate()
                .map(|(i, s)| (s, i))
                .collect();
            complex.simplices.iter().enumerate().all(|(id, s)| {
                s.facets().all(|f| {
                    by_simplex.get(&f).is_some_and(|&fid| {
                        complex.xgrade[fid] < complex.xgrade[id]
                            && complex.ygrade[fid] < complex.ygrade[id]
                    })
                })
            })
        });
        complex
    }
}

/// Real grade values per grid index. `xvalues[i - 1]` is the real x-grade of
/// the simplex refined to x-index `i`; ties in the input produce repeated
/// values at distinct indices, so the lists are weakly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeMap {
    xvalues: Vec<f64>,
    yvalues: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Inequality used by [`GradeMap::lookup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LookupMode {
    /// Largest index whose value is `< t`.
    Lt,
    /// Largest index whose value is `≤ t`.
    Le,
    /// Smallest index whose value is `≥ t`.
    Ge,
    /// Smallest index whose value is `> t`.
    Gt,
}

/// Result of a grade lookup: a 1-based grid index or one of the two
/// out-of-range sentinels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridIndex {
    /// No grade satisfies the inequality from below (value below the grid).
    Below,
    At(usize),
    /// No grade satisfies the inequality from above (value past the top).
    Infinity,
}

impl GridIndex {
    pub fn index(self) -> Option<usize> {
        match self {
            GridIndex::At(i) => Some(i),
            _ => None,
        }
    }
}

impl GradeMap {
    pub fn new(xvalues: Vec<f64>, yvalues: Vec<f64>) -> Self {
        debug_assert!(xvalues.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(yvalues.windows(2).all(|w| w[0] <= w[1]));
        GradeMap { xvalues, yvalues }
    }

    /// A map whose value at index `i` is `i` itself, on both axes.
    pub fn unit(n: usize) -> Self {
        let v: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        GradeMap::new(v.clone(), v)
    }

    pub fn n(&self) -> usize {
        self.xvalues.len()
    }

    pub fn values(&self, axis: Axis) -> &[f64] {
        match axis {
            Axis::X => &self.xvalues,
            Axis::Y => &self.yvalues,
        }
    }

    /// Real value of a 1-based grid index.
    pub fn value(&self, axis: Axis, index: usize) -> f64 {
        self.values(axis)[index - 1]
    }

    pub fn transpose_axes(&self) -> GradeMap {
        GradeMap {
            xvalues: self.yvalues.clone(),
            yvalues: self.xvalues.clone(),
        }
    }

    /// Min/max grid index whose real value satisfies the mode's inequality
    /// with `t`. Empty-from-below queries return [`GridIndex::Below`];
    /// queries past the top value return [`GridIndex::Infinity`].
    pub fn lookup(&self, axis: Axis, mode: LookupMode, t: f64) -> GridIndex {
        let values = self.values(axis);
        let n = values.len();
        match mode {
            LookupMode::Lt => {
                let c = values.partition_point(|&v| v < t);
                if c == 0 {
                    GridIndex::Below
                } else {
                    GridIndex::At(c)
                }
            }
            LookupMode::Le => {
                let c = values.partition_point(|&v| v <= t);
                if c == 0 {
                    GridIndex::Below
                } else {
                    GridIndex::At(c)
                }
            }
            LookupMode::Ge => {
                let c = values.partition_point(|&v| v < t);
                if c == n {
                    GridIndex::Infinity
                } else {
                    GridIndex::At(c + 1)
                }
            }
            LookupMode::Gt => {
                let c = values.partition_point(|&v| v <= t);
                if c == n {
                    GridIndex::Infinity
                } else {
                    GridIndex::At(c + 1)
                }
            }
        }
    }

    /// The same grid with all values translated by `(dx, dy)`.
    pub fn shifted(&self, dx: f64, dy: f64) -> GradeMap {
        GradeMap {
            xvalues: self.xvalues.iter().map(|v| v + dx).collect(),
            yvalues: self.yvalues.iter().map(|v| v + dy).collect(),
        }
    }

    /// `(max consecutive gap) − (min consecutive gap)` over the distinct
    /// values of an axis; zero iff the distinct values are evenly spaced.
    pub fn irregularity(&self, axis: Axis) -> f64 {
        let values = self.values(axis);
        let mut distinct: Vec<f64> = Vec::with_capacity(values.len());
        for &v in values {
            if distinct.last().is_none_or(|&last| v > last) {
                distinct.push(v);
            }
        }
        if distinct.len() < 2 {
            return 0.0;
        }
        let gaps = distinct.windows(2).map(|w| w[1] - w[0]);
        let max = gaps.clone().fold(f64::NEG_INFINITY, f64::max);
        let min = gaps.fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Refines real bigrades into the simplex-wise grid form: distinct integer
/// x-grades `1..=n` assigned by sorting on (real x-grade, dimension, input
/// index), and likewise for y. Dimension-first tie-breaking keeps the integer
/// grades face-monotone; input index makes the result deterministic.
pub fn refine_to_simplexwise(
    raw: &RawBifiltration,
) -> Result<(GradedComplex, GradeMap), ValidationError> {
    let n = raw.simplices.len();
    for (s, x, y) in &raw.simplices {
        if !x.is_finite() || !y.is_finite() {
            return Err(ValidationError::NonFiniteGrade {
                simplex: s.to_string(),
            });
        }
    }

    // Closure and non-strict face-monotonicity on the real grades.
    let mut by_simplex: std::collections::HashMap<&Simplex, usize> = Default::default();
    for (idx, (s, _, _)) in raw.simplices.iter().enumerate() {
        by_simplex.insert(s, idx);
    }
    for (s, x, y) in &raw.simplices {
        for facet in s.facets() {
            match by_simplex.get(&facet) {
                None => {
                    return Err(ValidationError::MissingFacet {
                        simplex: s.to_string(),
                        facet: facet.to_string(),
                    });
                }
                Some(&f) => {
                    let (_, fx, fy) = &raw.simplices[f];
                    if fx > x || fy > y {
                        return Err(ValidationError::FaceMonotonicity {
                            facet: facet.to_string(),
                            coface: s.to_string(),
                            fx: *fx,
                            fy: *fy,
                            cx: *x,
                            cy: *y,
                        });
                    }
                }
            }
        }
    }

    let assign = |key: &dyn Fn(usize) -> f64| -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            key(a)
                .partial_cmp(&key(b))
                .unwrap()
                .then(
                    raw.simplices[a]
                        .0
                        .dimension()
                        .cmp(&raw.simplices[b].0.dimension()),
                )
                .then(a.cmp(&b))
        });
        let mut grade = vec![0usize; n];
        let mut values = Vec::with_capacity(n);
        for (g, &s) in order.iter().enumerate() {
            grade[s] = g + 1;
            values.push(key(s));
        }
        (grade, order, values)
    };

    let (xgrade, x_at, xvalues) = assign(&|s| raw.simplices[s].1);
    let (ygrade, y_at, yvalues) = assign(&|s| raw.simplices[s].2);

    let complex = GradedComplex {
        simplices: raw.simplices.iter().map(|(s, _, _)| s.clone()).collect(),
        xgrade,
        ygrade,
        x_at,
        y_at,
    };

    // The integer grades are strictly face-monotone by the dimension tie-break.
    debug_assert!(complex.simplices.iter().enumerate().all(|(id, s)| {
        s.facets().all(|f| {
            let fid = by_simplex[&f];
            complex.xgrade[fid] < complex.xgrade[id] && complex.ygrade[fid] < complex.ygrade[id]
        })
    }));

    Ok((complex, GradeMap::new(xvalues, yvalues)))
}

/// Arrival position of every simplex along the staircase path
/// `(1,1) → (i,1) → (i,n) → (n,n)`, as `(simplex id, position)` sorted by
/// position. Positions range over `1..=2n-1`; every simplex gets a distinct
/// position, so the sorted list is a valid filtration order.
pub fn filtration_along_path(complex: &GradedComplex, i: usize) -> Vec<(usize, usize)> {
    let n = complex.n();
    assert!(
        n == 0 || (1 <= i && i <= n),
        "column index {i} out of 1..={n}"
    );
    let mut out: Vec<(usize, usize)> = (0..n).map(|s| (s, path_position(complex, i, s))).collect();
    out.sort_by_key(|&(_, p)| p);
    debug_assert!(out.windows(2).all(|w| w[0].1 < w[1].1));
    out
}

/// Arrival position of one simplex on the path `γ_i`.
pub(crate) fn path_position(complex: &GradedComplex, i: usize, s: usize) -> usize {
    let n = complex.n();
    let x = complex.xgrade(s);
    let y = complex.ygrade(s);
    if x <= i {
        if y == 1 {
            x
        } else {
            i + y - 1
        }
    } else {
        x + n - 1
    }
}

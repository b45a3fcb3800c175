//! The JSON output document: meta-rank cells, meta-diagram cells and the
//! rank decomposition, with grid indices plus the grade-value arrays needed
//! to reconstruct real coordinates. Field order is fixed and all lists are
//! sorted, so identical inputs serialize byte-identically.

use serde::{Deserialize, Serialize};

use crate::bifiltration::{Axis, GradeMap};
use crate::signed::{rank_decomposition, MetaDiagram};
use crate::table::MetaRankTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub meta: Meta,
    pub mrk: Vec<MrkCell>,
    pub mdgm: Vec<MdgmCell>,
    pub rank_decomposition: RankDecompositionDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub n: usize,
    pub dims: Vec<usize>,
    pub grade_values_x: Vec<f64>,
    pub grade_values_y: Vec<f64>,
}

/// One non-empty meta-rank cell: closed bars `[lo, hi]` in grid rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrkCell {
    pub dim: usize,
    pub s: usize,
    pub t: usize,
    pub bars: Vec<[usize; 2]>,
}

/// One non-zero meta-diagram cell, multiplicities expanded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdgmCell {
    pub dim: usize,
    pub s: usize,
    pub t: usize,
    pub pos: Vec<[usize; 2]>,
    pub neg: Vec<[usize; 2]>,
}

/// Rectangles `[s, t] × [lo, hi]` of the rank decomposition, multiplicities
/// expanded. `R` and `S` cover the first dimension in `meta.dims`; `by_dim`
/// carries every requested dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDecompositionDoc {
    #[serde(rename = "R")]
    pub r: Vec<[usize; 4]>,
    #[serde(rename = "S")]
    pub s: Vec<[usize; 4]>,
    pub by_dim: Vec<DimRankDecomposition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimRankDecomposition {
    pub dim: usize,
    #[serde(rename = "R")]
    pub r: Vec<[usize; 4]>,
    #[serde(rename = "S")]
    pub s: Vec<[usize; 4]>,
}

fn expand_rects(rects: &std::collections::BTreeMap<crate::signed::Rect, u64>) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for (rect, &mult) in rects {
        for _ in 0..mult {
            out.push([rect.s, rect.t, rect.lo, rect.hi]);
        }
    }
    out
}

/// Assembles the document for the requested dimensions.
pub fn build_document(
    table: &MetaRankTable,
    mdgm: &MetaDiagram,
    map: &GradeMap,
    dims: &[usize],
) -> Document {
    let n = table.n();
    let mut mrk = Vec::new();
    for &dim in dims {
        for t in 1..=n {
            for s in 1..=t {
                let mut bars: Vec<[usize; 2]> = table
                    .bars(dim, s, t)
                    .map(|b| [b.lo as usize, b.hi as usize])
                    .collect();
                if bars.is_empty() {
                    continue;
                }
                bars.sort_unstable();
                mrk.push(MrkCell { dim, s, t, bars });
            }
        }
    }
    let mut mdgm_cells = Vec::new();
    for (&(dim, s, t), bc) in mdgm.iter() {
        if !dims.contains(&dim) {
            continue;
        }
        let mut pos = Vec::new();
        for (bar, m) in bc.positive_part() {
            for _ in 0..m {
                pos.push([bar.lo as usize, bar.hi as usize]);
            }
        }
        let mut neg = Vec::new();
        for (bar, m) in bc.negative_part() {
            for _ in 0..m {
                neg.push([bar.lo as usize, bar.hi as usize]);
            }
        }
        mdgm_cells.push(MdgmCell {
            dim,
            s,
            t,
            pos,
            neg,
        });
    }
    let by_dim: Vec<DimRankDecomposition> = dims
        .iter()
        .map(|&dim| {
            let decomp = rank_decomposition(mdgm, dim);
            DimRankDecomposition {
                dim,
                r: expand_rects(&decomp.r),
                s: expand_rects(&decomp.s),
            }
        })
        .collect();
    let (r, s) = by_dim
        .first()
        .map(|d| (d.r.clone(), d.s.clone()))
        .unwrap_or_default();
    Document {
        meta: Meta {
            n,
            dims: dims.to_vec(),
            grade_values_x: map.values(Axis::X).to_vec(),
            grade_values_y: map.values(Axis::Y).to_vec(),
        },
        mrk,
        mdgm: mdgm_cells,
        rank_decomposition: RankDecompositionDoc { r, s, by_dim },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::triangle_bifiltration;
    use crate::signed::mobius_invert;
    use crate::table::compute_metarank;
    use crate::vineyard::CheckLevel;

    #[test]
    fn document_roundtrips_through_json() {
        let (complex, map) = triangle_bifiltration();
        let table = compute_metarank(&complex, CheckLevel::None);
        let mdgm = mobius_invert(&table);
        let doc = build_document(&table, &mdgm, &map, &[0, 1, 2]);
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: Document = serde_json::from_str(&text).unwrap();
        assert_eq!(doc, back);
        // Serialization is deterministic.
        assert_eq!(text, serde_json::to_string_pretty(&back).unwrap());
    }

    #[test]
    fn empty_complex_document() {
        let raw = crate::bifiltration::parse_bifiltration("").unwrap();
        let (complex, map) = crate::bifiltration::refine_to_simplexwise(&raw).unwrap();
        let table = compute_metarank(&complex, CheckLevel::None);
        let mdgm = mobius_invert(&table);
        let doc = build_document(&table, &mdgm, &map, &[0]);
        assert_eq!(doc.meta.n, 0);
        assert!(doc.mrk.is_empty() && doc.mdgm.is_empty());
        assert!(doc.rank_decomposition.r.is_empty());
    }
}

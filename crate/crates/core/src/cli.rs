//! Command-line surface.
//!
//! Exit codes: 0 success, 1 input/validation error, 2 internal invariant
//! failure (caught as a panic by `main`), 3 verification mismatch.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bifiltration::{
    parse_bifiltration, refine_to_simplexwise, Axis, GradeMap, GradedComplex,
};
use crate::json::build_document;
use crate::metrics::{
    candidate_epsilons, candidate_resolution, erosion_mdgm, erosion_mrk, refine_to_common,
};
use crate::oracle::{mrk_from_rank, rank_from_mrk, rank_invariant};
use crate::signed::{mobius_invert, mrk_from_mdgm, rank_decomposition};
use crate::table::{compute_metarank, sweep_metarank};
use crate::vineyard::CheckLevel;

fn log_enabled() -> bool {
    static ENABLED: OnceLock<bool> = OnceLock::new();
    *ENABLED.get_or_init(|| {
        std::env::var("METARANK_LOG")
            .map(|v| {
                let v = v.to_ascii_lowercase();
                v == "debug" || v == "info" || v == "trace"
            })
            .unwrap_or(false)
    })
}

macro_rules! log_line {
    ($($arg:tt)*) => {
        if log_enabled() {
            eprintln!("[metarank] {}", format!($($arg)*));
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceKind {
    Mrk,
    Mdgm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderTarget {
    DiagramOfDiagrams,
    SignedBarcode,
}

#[derive(Parser, Debug)]
#[command(
    name = "metarank",
    version,
    about = "Meta-ranks, meta-diagrams and signed barcodes of bifiltered complexes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for parallel verification and oracle work.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the meta-rank table, meta-diagram and rank decomposition.
    Compute {
        #[arg(long)]
        input: PathBuf,
        /// Homology dimensions (default: all up to the top simplex dimension).
        #[arg(long)]
        dim: Vec<usize>,
        #[arg(long, value_enum, default_value_t = AxisArg::X)]
        axis: AxisArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit results as JSON lines without retaining the full table.
        #[arg(long)]
        stream: bool,
    },
    /// Check the fast path against the brute-force oracle.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Refuse inputs larger than this (the oracle is deliberately slow).
        #[arg(long, default_value_t = 40)]
        oracle_cap: usize,
        /// Negative-control hook: damage the computed table first.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Erosion distance between the invariants of two inputs.
    Distance {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        input_b: PathBuf,
        #[arg(long, value_enum, default_value_t = DistanceKind::Mrk)]
        kind: DistanceKind,
        /// Homology dimensions to compare (default: all present).
        #[arg(long)]
        dim: Vec<usize>,
        #[arg(long, value_enum, default_value_t = AxisArg::X)]
        axis: AxisArg,
        /// Use the narrower right-endpoint erosion for meta-diagrams.
        #[arg(long)]
        strict_paper_def412: bool,
    },
    /// Render an SVG view of the meta-diagram.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        target: RenderTarget,
        #[arg(long, default_value_t = 0)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = AxisArg::X)]
        axis: AxisArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the sweep over triangulated-grid inputs and report signed-bar
    /// counts as CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 200, 400, 800])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1729)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_input(path: &Path) -> Result<(GradedComplex, GradeMap), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let raw = parse_bifiltration(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let refined = refine_to_simplexwise(&raw).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(refined)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

fn requested_dims(dim: &[usize], complex: &GradedComplex) -> Vec<usize> {
    if dim.is_empty() {
        (0..=complex.max_dim().unwrap_or(0)).collect()
    } else {
        let mut d = dim.to_vec();
        d.sort_unstable();
        d.dedup();
        d
    }
}

fn oriented(complex: GradedComplex, map: GradeMap, axis: AxisArg) -> (GradedComplex, GradeMap) {
    match axis {
        AxisArg::X => (complex, map),
        AxisArg::Y => (complex.transpose_axes(), map.transpose_axes()),
    }
}

impl Cli {
    pub fn run(self) -> i32 {
        if let Some(t) = self.threads {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global();
        }
        let result = match self.command {
            Command::Compute {
                input,
                dim,
                axis,
                format,
                out,
                stream,
            } => cmd_compute(&input, &dim, axis, format, &out, stream),
            Command::Verify {
                input,
                oracle_cap,
                corrupt,
            } => cmd_verify(&input, oracle_cap, corrupt),
            Command::Distance {
                input,
                input_b,
                kind,
                dim,
                axis,
                strict_paper_def412,
            } => cmd_distance(&input, &input_b, kind, &dim, axis, strict_paper_def412),
            Command::Render {
                input,
                target,
                dim,
                axis,
                out,
            } => cmd_render(&input, target, dim, axis, &out),
            Command::Bench {
                sizes,
                seed,
                repeats,
                out,
            } => cmd_bench(&sizes, seed, repeats, &out),
        };
        match result {
            Ok(code) => code,
            Err(msg) => {
                eprintln!("error: {msg}");
                1
            }
        }
    }
}

fn cmd_compute(
    input: &Path,
    dim: &[usize],
    axis: AxisArg,
    format: FormatArg,
    out: &Option<PathBuf>,
    stream: bool,
) -> Result<i32, String> {
    let (complex, map) = load_input(input)?;
    let (complex, map) = oriented(complex, map, axis);
    let dims = requested_dims(dim, &complex);
    log_line!("computing n = {} dims {:?}", complex.n(), dims);
    if stream {
        let content = stream_document(&complex, &map, &dims);
        write_output(out, &content)?;
        return Ok(0);
    }
    let table = compute_metarank(&complex, CheckLevel::None);
    let mdgm = mobius_invert(&table);
    match format {
        FormatArg::Json => {
            let doc = build_document(&table, &mdgm, &map, &dims);
            let mut text = serde_json::to_string_pretty(&doc)
                .map_err(|e| format!("serialization failed: {e}"))?;
            text.push('\n');
            write_output(out, &text)?;
        }
        FormatArg::Text => {
            let (pos, neg) = mdgm.signed_bar_count();
            let mut text = String::new();
            text.push_str(&format!("n: {}\n", table.n()));
            text.push_str(&format!("dims: {:?}\n", dims));
            let non_empty = dims
                .iter()
                .map(|&d| {
                    (1..=table.n())
                        .flat_map(|t| (1..=t).map(move |s| (s, t)))
                        .filter(|&(s, t)| table.bars(d, s, t).next().is_some())
                        .count()
                })
                .sum::<usize>();
            text.push_str(&format!("non-empty meta-rank cells: {non_empty}\n"));
            text.push_str(&format!("meta-diagram cells: {}\n", mdgm.iter().count()));
            text.push_str(&format!("signed bars: +{pos} -{neg}\n"));
            write_output(out, &text)?;
        }
    }
    Ok(0)
}

/// JSON-lines output: a meta line, one line per non-empty meta-rank cell as
/// the sweep produces it, then the meta-diagram cells and the rank
/// decomposition. The full table is never materialized.
fn stream_document(complex: &GradedComplex, map: &GradeMap, dims: &[usize]) -> String {
    use serde_json::json;
    let n = complex.n();
    let mut lines = Vec::new();
    lines.push(
        json!({"kind": "meta", "n": n, "dims": dims,
               "grade_values_x": map.values(Axis::X),
               "grade_values_y": map.values(Axis::Y)})
        .to_string(),
    );
    let mut mdgm_cells: Vec<(usize, usize, usize, crate::signed::SignedBarcode)> = Vec::new();
    let mut prev: Option<Vec<Vec<Option<crate::table::Bar>>>> = None;
    sweep_metarank(complex, CheckLevel::None, |col| {
        for (k, list) in col.cells.iter().enumerate() {
            for &d in dims {
                let bars: Vec<[usize; 2]> = list
                    .iter()
                    .zip(col.slot_dims)
                    .filter(|(b, &sd)| b.is_some() && sd == d)
                    .map(|(b, _)| {
                        let b = b.unwrap();
                        [b.lo as usize, b.hi as usize]
                    })
                    .collect();
                if !bars.is_empty() {
                    lines.push(
                        json!({"kind": "mrk", "dim": d, "s": k + 1, "t": col.i, "bars": bars})
                            .to_string(),
                    );
                }
            }
        }
        if let Some(prev_cells) = prev.take() {
            for ((d, s), bc) in crate::signed::invert_streamed_column(
                col.i - 1,
                &prev_cells,
                Some(col.cells),
                col.slot_dims,
            ) {
                if dims.contains(&d) {
                    mdgm_cells.push((d, s, col.i - 1, bc));
                }
            }
        }
        if col.i == n {
            for ((d, s), bc) in
                crate::signed::invert_streamed_column(n, col.cells, None, col.slot_dims)
            {
                if dims.contains(&d) {
                    mdgm_cells.push((d, s, n, bc));
                }
            }
        }
        prev = Some(col.cells.to_vec());
    });
    mdgm_cells.sort_by_key(|&(d, s, t, _)| (d, s, t));
    let mut rects_r: Vec<[usize; 4]> = Vec::new();
    let mut rects_s: Vec<[usize; 4]> = Vec::new();
    for (d, s, t, bc) in &mdgm_cells {
        let pos: Vec<[usize; 2]> = bc
            .positive_part()
            .flat_map(|(b, m)| std::iter::repeat_n([b.lo as usize, b.hi as usize], m as usize))
            .collect();
        let neg: Vec<[usize; 2]> = bc
            .negative_part()
            .flat_map(|(b, m)| std::iter::repeat_n([b.lo as usize, b.hi as usize], m as usize))
            .collect();
        if *d == dims[0] {
            for b in &pos {
                rects_r.push([*s, *t, b[0], b[1]]);
            }
            for b in &neg {
                rects_s.push([*s, *t, b[0], b[1]]);
            }
        }
        lines.push(
            serde_json::json!({"kind": "mdgm", "dim": d, "s": s, "t": t, "pos": pos, "neg": neg})
                .to_string(),
        );
    }
    rects_r.sort_unstable();
    rects_s.sort_unstable();
    lines.push(
        serde_json::json!({"kind": "rank_decomposition", "R": rects_r, "S": rects_s}).to_string(),
    );
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn cmd_verify(input: &Path, oracle_cap: usize, corrupt: bool) -> Result<i32, String> {
    let (complex, _map) = load_input(input)?;
    let n = complex.n();
    if n > oracle_cap {
        return Err(format!(
            "input has {n} simplices, above the oracle cap {oracle_cap}; \
             raise --oracle-cap to force"
        ));
    }
    log_line!("verifying n = {n}");
    let mut table = compute_metarank(&complex, CheckLevel::Full);
    if corrupt {
        if let Some((s, t)) = table.corrupt_first_bar() {
            eprintln!("corrupted cell [{s},{t}] for negative control");
        }
    }
    let rk = rank_invariant(&complex);
    let oracle = mrk_from_rank(&rk).map_err(|e| format!("oracle failure: {e}"))?;
    let dims: Vec<usize> = (0..=complex.max_dim().unwrap_or(0)).collect();
    let mut failed = false;

    // rank → meta-rank: the reconstructed table equals the computed one.
    let mut first_mismatch = None;
    'outer: for &d in &dims {
        for t in 1..=n {
            for s in 1..=t {
                if table.bar_multiset(d, s, t) != oracle.bar_multiset(d, s, t) {
                    first_mismatch = Some(format!("cell [{s},{t}] dim {d}"));
                    break 'outer;
                }
            }
        }
    }
    report("rank -> meta-rank", &first_mismatch, &mut failed);

    // meta-rank → rank: counting bars reproduces every rank value.
    let mut first_mismatch = None;
    'outer2: for &d in &dims {
        for a in 1..=n {
            for b in 1..=n {
                for c in a..=n {
                    for e in b..=n {
                        if rank_from_mrk(&table, d, (a, b), (c, e)) != rk.rank(d, (a, b), (c, e)) {
                            first_mismatch = Some(format!("pair ({a},{b})->({c},{e}) dim {d}"));
                            break 'outer2;
                        }
                    }
                }
            }
        }
    }
    report("meta-rank -> rank", &first_mismatch, &mut failed);

    // Möbius roundtrip.
    let mdgm = mobius_invert(&table);
    let mut first_mismatch = None;
    'outer3: for &d in &dims {
        for t in 1..=n {
            for s in 1..=t {
                match mrk_from_mdgm(&mdgm, d, s, t) {
                    Ok(cell) if cell == table.bar_multiset(d, s, t) => {}
                    Ok(_) => {
                        first_mismatch = Some(format!("cell [{s},{t}] dim {d}"));
                        break 'outer3;
                    }
                    Err(e) => {
                        first_mismatch = Some(e.to_string());
                        break 'outer3;
                    }
                }
            }
        }
    }
    report("mobius roundtrip", &first_mismatch, &mut failed);

    // Rank-decomposition identity at every comparable pair.
    let mut first_mismatch = None;
    'outer4: for &d in &dims {
        let decomp = rank_decomposition(&mdgm, d);
        for a in 1..=n {
            for b in 1..=n {
                for c in a..=n {
                    for e in b..=n {
                        let got = decomp.rank_at((a, b), (c, e));
                        if got != rk.rank(d, (a, b), (c, e)) as i64 {
                            first_mismatch = Some(format!("pair ({a},{b})->({c},{e}) dim {d}"));
                            break 'outer4;
                        }
                    }
                }
            }
        }
    }
    report("rank decomposition", &first_mismatch, &mut failed);

    Ok(if failed { 3 } else { 0 })
}

fn report(name: &str, first_mismatch: &Option<String>, failed: &mut bool) {
    match first_mismatch {
        None => println!("check {name}: ok"),
        Some(m) => {
            println!("check {name}: FAIL at {m}");
            *failed = true;
        }
    }
}

fn cmd_distance(
    input: &Path,
    input_b: &Path,
    kind: DistanceKind,
    dim: &[usize],
    axis: AxisArg,
    narrow_erosion: bool,
) -> Result<i32, String> {
    let (ca, ma) = load_input(input)?;
    let (ca, ma) = oriented(ca, ma, axis);
    let (cb, mb) = load_input(input_b)?;
    let (cb, mb) = oriented(cb, mb, axis);
    let dims = if dim.is_empty() {
        let top = ca.max_dim().unwrap_or(0).max(cb.max_dim().unwrap_or(0));
        (0..=top).collect::<Vec<_>>()
    } else {
        dim.to_vec()
    };
    let ta = compute_metarank(&ca, CheckLevel::None);
    let tb = compute_metarank(&cb, CheckLevel::None);
    let candidates = candidate_epsilons(&[&ma, &mb]);
    let resolution = candidate_resolution(&candidates);
    let mut worst: f64 = 0.0;
    match kind {
        DistanceKind::Mrk => {
            for &d in &dims {
                let v = erosion_mrk(&ta, &ma, &tb, &mb, d);
                println!("distance mrk dim {d}: {}", fmt_dist(v));
                worst = worst.max(v);
            }
        }
        DistanceKind::Mdgm => {
            let (ra, rb, rmap) = refine_to_common(&ta, &ma, &tb, &mb);
            let da = mobius_invert(&ra);
            let db = mobius_invert(&rb);
            for &d in &dims {
                let v = erosion_mdgm(&da, &rmap, &db, &rmap, d, narrow_erosion);
                println!("distance mdgm dim {d}: {}", fmt_dist(v));
                worst = worst.max(v);
            }
        }
    }
    println!("distance max: {}", fmt_dist(worst));
    println!("candidate resolution: {resolution}");
    for (label, map) in [("A", &ma), ("B", &mb)] {
        println!(
            "irreg(S) input {label}: x={} y={}",
            map.irregularity(Axis::X),
            map.irregularity(Axis::Y)
        );
    }
    Ok(0)
}

fn fmt_dist(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

fn cmd_render(
    input: &Path,
    target: RenderTarget,
    dim: usize,
    axis: AxisArg,
    out: &Option<PathBuf>,
) -> Result<i32, String> {
    let (complex, map) = load_input(input)?;
    let (complex, map) = oriented(complex, map, axis);
    let table = compute_metarank(&complex, CheckLevel::None);
    let mdgm = mobius_invert(&table);
    let svg = match target {
        RenderTarget::DiagramOfDiagrams => crate::svg::render_diagram_of_diagrams(&mdgm, &map, dim),
        RenderTarget::SignedBarcode => {
            let decomp = rank_decomposition(&mdgm, dim);
            crate::svg::render_signed_barcode(&decomp, &map)
        }
    };
    write_output(out, &svg)?;
    Ok(0)
}

fn cmd_bench(
    sizes: &[usize],
    seed: u64,
    repeats: usize,
    out: &Option<PathBuf>,
) -> Result<i32, String> {
    let rows = crate::bench::run_bench(sizes, seed, repeats);
    let mut csv = String::from("n,seconds,positive_bars,negative_bars\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{:.6},{},{}\n",
            r.n, r.seconds, r.positive_bars, r.negative_bars
        ));
    }
    write_output(out, &csv)?;
    Ok(0)
}

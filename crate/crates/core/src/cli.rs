//! Table renderers, the verification pipeline and the argument parser used
//! by the `wmub` binary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    intersection, lines_through_origin, pair_census, partition_s, redundancy, FactorIndex,
    LinePairCensus, MaximalLineCatalog,
};
use crate::wmub::{
    build_wmub, classify_pair, duality_report, factor_structure_check, label_conjugation_deviation,
    normalization_error, partition_t, wmub_census, OverlapCategory, WmubCensus, WmubSet,
    OVERLAP_EPS,
};
use crate::zring::{dedekind_psi, CrtContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Side {
    #[default]
    Lines,
    Bases,
}

/// A rendered table. JSON output serializes this struct directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDocument<R> {
    pub d: u64,
    pub d1: u64,
    pub d2: u64,
    pub kind: String,
    pub rows: Vec<R>,
}

impl<R: Serialize> OutputDocument<R> {
    fn new(ctx: &CrtContext, kind: &str, rows: Vec<R>) -> Self {
        Self {
            d: ctx.d(),
            d1: ctx.d1(),
            d2: ctx.d2(),
            kind: kind.to_string(),
            rows,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).expect("flat rows serialize");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
    }
}

fn text_table(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(" | ");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(" | "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineRow {
    pub index: usize,
    pub generator: String,
    pub matrix: String,
    pub component1: String,
    pub component1_label: String,
    pub component2: String,
    pub component2_label: String,
}

fn component_label(f: FactorIndex) -> String {
    match f {
        FactorIndex::Reference => String::new(),
        f => format!("g{f}"),
    }
}

pub fn lines_document(ctx: &CrtContext) -> OutputDocument<LineRow> {
    let catalog = MaximalLineCatalog::new(ctx);
    let rows = catalog
        .entries()
        .iter()
        .map(|e| {
            let ((a1, b1), (a2, b2)) = e.components;
            LineRow {
                index: e.index,
                generator: e.line.to_string(),
                matrix: e.matrix.to_string(),
                component1: format!("L1({a1},{b1})"),
                component1_label: component_label(e.factors.0),
                component2: format!("L2({a2},{b2})"),
                component2_label: component_label(e.factors.1),
            }
        })
        .collect();
    OutputDocument::new(ctx, "lines", rows)
}

pub fn render_lines(ctx: &CrtContext, format: Format) -> String {
    let doc = lines_document(ctx);
    match format {
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
        Format::Text => text_table(
            &["line", "generator", "symplectic", "component1", "component2"].map(String::from),
            doc.rows.iter().map(|r| {
                vec![
                    format!("L_{}", r.index),
                    r.generator.clone(),
                    r.matrix.clone(),
                    r.component1.clone(),
                    r.component2.clone(),
                ]
            }),
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisRow {
    pub index: usize,
    pub label: String,
    pub factor1: String,
    pub factor2: String,
}

/// Symplectic label and factor labels for every basis. Only labels are
/// needed here, so the vectors are not built.
pub fn wmub_document(ctx: &CrtContext) -> OutputDocument<BasisRow> {
    let catalog = MaximalLineCatalog::new(ctx);
    let rows = catalog
        .entries()
        .iter()
        .map(|e| {
            let [k, l, m, n] = e.matrix.entries();
            BasisRow {
                index: e.index,
                label: format!("X({k},{l}|{m},{n})"),
                factor1: format!("X1{}", e.factors.0),
                factor2: format!("X2{}", e.factors.1),
            }
        })
        .collect();
    OutputDocument::new(ctx, "wmub", rows)
}

pub fn render_wmub(ctx: &CrtContext, format: Format) -> String {
    let doc = wmub_document(ctx);
    match format {
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
        Format::Text => text_table(
            &["basis", "symplectic", "factor1", "factor2"].map(String::from),
            doc.rows.iter().map(|r| {
                vec![
                    format!("B_{}", r.index),
                    r.label.clone(),
                    r.factor1.clone(),
                    r.factor2.clone(),
                ]
            }),
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub set: String,
    pub members: Vec<usize>,
}

pub fn partitions_document(ctx: &CrtContext, side: Side) -> OutputDocument<PartitionRow> {
    let (sets, prefix, kind) = match side {
        Side::Lines => (partition_s(ctx), "S", "partition-lines"),
        Side::Bases => {
            // Labels alone determine T; build a label-only set view.
            let sets = partition_t_from_labels(ctx);
            (sets, "T", "partition-bases")
        }
    };
    let rows = sets
        .into_iter()
        .enumerate()
        .map(|(n, set)| PartitionRow {
            set: format!("{prefix}_{n}"),
            members: set.into_iter().collect(),
        })
        .collect();
    OutputDocument::new(ctx, kind, rows)
}

fn partition_t_from_labels(ctx: &CrtContext) -> Vec<BTreeSet<usize>> {
    let doc = wmub_document(ctx);
    crate::geometry::partition_factor_pairs(ctx)
        .into_iter()
        .map(|set| {
            set.into_iter()
                .map(|(f1, f2)| {
                    let (x1, x2) = (format!("X1{f1}"), format!("X2{f2}"));
                    doc.rows
                        .iter()
                        .find(|r| r.factor1 == x1 && r.factor2 == x2)
                        .map(|r| r.index)
                        .expect("every factor pair labels one basis")
                })
                .collect()
        })
        .collect()
}

pub fn render_partitions(ctx: &CrtContext, side: Side, format: Format) -> String {
    let doc = partitions_document(ctx, side);
    let height = doc.rows.first().map_or(0, |r| r.members.len());
    let grid = |cell: &dyn Fn(usize) -> String| -> Vec<Vec<String>> {
        (0..height)
            .map(|k| doc.rows.iter().map(|r| cell(r.members[k])).collect())
            .collect()
    };
    let header: Vec<String> = doc.rows.iter().map(|r| r.set.clone()).collect();
    match format {
        Format::Json => doc.to_json(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory");
            for row in grid(&|i| i.to_string()) {
                w.write_record(&row).expect("in-memory");
            }
            String::from_utf8(w.into_inner().expect("in-memory")).expect("utf-8")
        }
        Format::Text => {
            let prefix = match side {
                Side::Lines => "L",
                Side::Bases => "B",
            };
            text_table(&header, grid(&|i| format!("{prefix}_{i}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of the full pipeline for one `(d1, d2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub ctx: CrtContext,
    pub checks: Vec<CheckRow>,
    pub census: Option<WmubCensus>,
    pub duality_ok: bool,
    pub redundancy: String,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckRow> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn summary(&self) -> String {
        let pairs = {
            let psi = ((self.ctx.d1() + 1) * (self.ctx.d2() + 1)) as usize;
            psi * (psi - 1) / 2
        };
        let census = match &self.census {
            Some(c) => format!(
                "d1^{{-1/2}}:{} d2^{{-1/2}}:{} d^{{-1/2}}:{}",
                c.sub_d1, c.sub_d2, c.full
            ),
            None => "census unavailable".to_string(),
        };
        format!(
            "pairs: {pairs} | {census} | duality: {} | redundancy: {}",
            if self.duality_ok { "OK" } else { "FAILED" },
            self.redundancy
        )
    }

    pub fn document(&self) -> OutputDocument<CheckRow> {
        OutputDocument::new(&self.ctx, "verify", self.checks.clone())
    }
}

type CheckResult = std::result::Result<String, String>;

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn check_catalog(ctx: &CrtContext, catalog: &MaximalLineCatalog) -> CheckResult {
    let psi = dedekind_psi(&ctx.modulus()) as usize;
    if catalog.len() != psi {
        return Err(format!("{} lines, expected {psi}", catalog.len()));
    }
    let maximal = lines_through_origin(&ctx.modulus())
        .remove(&ctx.d())
        .unwrap_or_default();
    let enumerated: BTreeSet<_> = maximal.iter().map(|l| l.canonical_generator()).collect();
    let listed: BTreeSet<_> = catalog
        .entries()
        .iter()
        .map(|e| e.line.canonical_generator())
        .collect();
    if listed != enumerated {
        return Err("catalog differs from exhaustive enumeration".into());
    }
    Ok(format!("{psi} maximal lines, symplectic images verified"))
}

fn check_line_census(ctx: &CrtContext, catalog: &MaximalLineCatalog) -> CheckResult {
    let got = lib(pair_census(catalog))?;
    let want = LinePairCensus::expected(ctx);
    if got != want {
        return Err(format!("got {got:?}, expected {want:?}"));
    }
    Ok(format!(
        "{}:{} {}:{} 1:{}",
        ctx.d2(),
        got.size_d2,
        ctx.d1(),
        got.size_d1,
        got.size_1
    ))
}

fn check_orthonormal(s: &WmubSet, tol: f64) -> CheckResult {
    let worst = s
        .entries()
        .iter()
        .map(|e| (e.index, e.basis.orthonormality_error()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, 0.0));
    if worst.1 > tol {
        return Err(format!("B_{} deviates by {:e}", worst.0, worst.1));
    }
    Ok(format!("max deviation {:e}", worst.1))
}

fn check_overlap_census(s: &WmubSet, tol: f64) -> CheckResult {
    let got = lib(wmub_census(s, tol))?;
    let want = WmubCensus::expected(s.ctx());
    if got != want {
        return Err(format!("got {got:?}, expected {want:?}"));
    }
    Ok(format!("{}/{}/{}", got.sub_d1, got.sub_d2, got.full))
}

fn check_normalization(s: &WmubSet, tol: f64) -> CheckResult {
    for (i, j) in s.pairs() {
        let e = lib(normalization_error(s, i, j))?;
        if e > tol {
            return Err(format!("pair ({i}, {j}) row sums deviate by {e:e}"));
        }
    }
    Ok("all row sums equal 1".into())
}

fn check_conjugation(s: &WmubSet, tol: f64) -> CheckResult {
    let mut worst = 0.0f64;
    for i in 1..=s.len() {
        let e = lib(label_conjugation_deviation(s, i))?;
        if e > tol {
            return Err(format!("B_{i} with label {} deviates by {e:e}", s.get(i).map(|b| b.label.to_string()).unwrap_or_default()));
        }
        worst = worst.max(e);
    }
    Ok(format!("max deviation {worst:e}"))
}

fn check_factor_structure(s: &WmubSet, tol: f64) -> CheckResult {
    let r = lib(factor_structure_check(s, tol))?;
    match r.pairs.iter().find(|p| !p.consistent) {
        Some(p) => Err(format!("pair ({}, {}): {:?}", p.i, p.j, p)),
        None => Ok(format!("{} pairs consistent", r.pairs.len())),
    }
}

fn check_partitions(
    catalog: &MaximalLineCatalog,
    s: &WmubSet,
    tol: f64,
) -> CheckResult {
    let ps = partition_s(catalog.ctx());
    let pt = partition_t(s);
    if ps != pt {
        return Err("line and basis partitions differ".into());
    }
    for set in &ps {
        let v: Vec<usize> = set.iter().copied().collect();
        for (x, &a) in v.iter().enumerate() {
            for &b in &v[x + 1..] {
                let la = &lib(catalog.get(a))?.line;
                let lb = &lib(catalog.get(b))?.line;
                let common = lib(intersection(la, lb))?.len();
                if common != 1 {
                    return Err(format!("L_{a} and L_{b} share {common} points"));
                }
                let c = lib(classify_pair(s, a, b, tol))?;
                if c.category != OverlapCategory::Full {
                    return Err(format!("B_{a} and B_{b} are not mutually unbiased"));
                }
            }
        }
    }
    Ok(format!("{} sets of {}", ps.len(), ps[0].len()))
}

fn check_redundancy(ctx: &CrtContext) -> CheckResult {
    let m = ctx.modulus();
    let r = redundancy(&m);
    let d = ctx.d() as i64;
    let psi = dedekind_psi(&m) as i64;
    let lhs = r * (d * d - 1) + (d * d - 1);
    if lhs != num_rational::Ratio::from_integer(psi * (d - 1)) {
        return Err(format!("r = {r} fails r(d^2-1) + d^2 - 1 = psi(d)(d-1)"));
    }
    Ok(r.to_string())
}

/// Runs every check for `ctx` at tolerance `tol`.
pub fn verify(ctx: &CrtContext, tol: f64) -> VerifyReport {
    let catalog = MaximalLineCatalog::new(ctx);
    let mut checks = Vec::new();
    let mut push = |name: &str, r: CheckResult| {
        let passed = r.is_ok();
        checks.push(CheckRow {
            check: name.to_string(),
            passed,
            detail: r.unwrap_or_else(|e| e),
        });
        passed
    };

    push("catalog", check_catalog(ctx, &catalog));
    push("line-census", check_line_census(ctx, &catalog));
    let mut census = None;
    let mut duality_ok = false;
    match build_wmub(ctx) {
        Err(e) => {
            push("build", Err(e.to_string()));
        }
        Ok(s) => {
            push("orthonormality", check_orthonormal(&s, tol));
            if push("overlap-census", check_overlap_census(&s, tol)) {
                census = wmub_census(&s, tol).ok();
            }
            push("normalization", check_normalization(&s, tol));
            let duality = match duality_report(&catalog, &s, tol) {
                Ok(r) if r.all_match() => Ok(format!("{} pairs matched", r.pairs.len())),
                Ok(_) => Err("report contains mismatches".to_string()),
                Err(e) => Err(e.to_string()),
            };
            duality_ok = push("duality", duality);
            push("conjugation", check_conjugation(&s, tol));
            push("factor-structure", check_factor_structure(&s, tol));
            push("partitions", check_partitions(&catalog, &s, tol));
        }
    }
    push("redundancy", check_redundancy(ctx));
    VerifyReport {
        ctx: *ctx,
        checks,
        census,
        duality_ok,
        redundancy: redundancy(&ctx.modulus()).to_string(),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wmub",
    version,
    about = "Maximal lines in Z(d)xZ(d) and weak mutually unbiased bases for d = d1*d2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Dims {
    /// Smaller odd prime factor.
    #[arg(long)]
    d1: u64,
    /// Larger odd prime factor.
    #[arg(long)]
    d2: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximal lines through the origin with their symplectic matrices and
    /// component lines.
    Lines {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Weak mutually unbiased bases with symplectic and factor labels.
    Wmub {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// The partitions S_n of the lines or T_n of the bases.
    Partitions {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, value_enum, default_value_t)]
        side: Side,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run the full verification pipeline.
    Verify {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = OVERLAP_EPS)]
        tolerance: f64,
        #[arg(long)]
        json: bool,
    },
}

/// Parses `args` (including the program name), writes the document to `out`
/// and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let dims = match &cli.command {
        Command::Lines { dims, .. }
        | Command::Wmub { dims, .. }
        | Command::Partitions { dims, .. }
        | Command::Verify { dims, .. } => dims,
    };
    let ctx = match CrtContext::new(dims.d1, dims.d2) {
        Ok(c) => c,
        Err(e @ Error::InvalidDims { .. }) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let written = match cli.command {
        Command::Lines { format, .. } => write!(out, "{}", render_lines(&ctx, format)),
        Command::Wmub { format, .. } => write!(out, "{}", render_wmub(&ctx, format)),
        Command::Partitions { side, format, .. } => {
            write!(out, "{}", render_partitions(&ctx, side, format))
        }
        Command::Verify {
            tolerance, json, ..
        } => {
            if !(tolerance.is_finite() && tolerance >= 0.0) {
                let _ = writeln!(err, "error: tolerance must be a non-negative number");
                return 2;
            }
            let report = verify(&ctx, tolerance);
            let w = if json {
                write!(out, "{}", report.document().to_json())
            } else {
                let mut text = String::new();
                for c in &report.checks {
                    let status = if c.passed { "PASS" } else { "FAIL" };
                    text.push_str(&format!("{status} {}: {}\n", c.check, c.detail));
                }
                text.push_str(&report.summary());
                text.push('\n');
                write!(out, "{text}")
            };
            if let Some(f) = report.first_failure() {
                let _ = writeln!(err, "verification failed at {}: {}", f.check, f.detail);
                let _ = w;
                return 1;
            }
            w
        }
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

//! Command-line driver: verification reports, tables, invariant listings and
//! coefficient queries.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::chase::{check_remark, verify_theorem, ChaseContext, RemarkCheck, Status, TheoremReplay};
use crate::dimformulas::{d_tail_discrepancy, GradedDimVector, Table};
use crate::error::{Error, Result};
use crate::linalg::{rat, Rational};
use crate::oracle;
use crate::repspace::{InvariantCache, SpaceDescriptor};
use crate::yoneda::{build_class, coefficient, compose, map_on_invariants, ClassName, PairingKind, PairingTable, Side};

pub const WORKERS_ENV: &str = "EQUIVEXT_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "equivext",
    version,
    about = "Exact checks of equivariant Ext dimensions for generalized Kummer varieties"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the full verification over a range of n
    Verify(VerifyArgs),
    /// Closed-form and raw dimension vectors side by side
    Table(TableArgs),
    /// Invariant subspace of W(n; k, dual, rho)
    Invariants(InvariantsArgs),
    /// Yoneda product of two named classes
    Compose(ComposeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    /// Extend the dimension tables with the character oracle up to this n
    #[arg(long, default_value_t = 8)]
    pub oracle_n_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also run the full top-row chase in every degree
    #[arg(long)]
    pub check_remark: bool,
    /// Build θ from u instead of v
    #[arg(long)]
    pub swap_uv: bool,
    /// Include the invariant bases used by the rank checks
    #[arg(long)]
    pub print_bases: bool,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// One of h_OP, h_G, ext_G_OP, ext_G_G, d
    pub which: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Number of dual legs
    #[arg(long, default_value_t = 0)]
    pub dual: usize,
    /// Number of legs
    #[arg(long, default_value_t = 0)]
    pub rho: usize,
    /// Print only the dimension
    #[arg(long, conflicts_with = "print_bases")]
    pub dim_only: bool,
    /// Print the basis (the default)
    #[arg(long)]
    pub print_bases: bool,
    /// Use the character oracle instead of explicit bases
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Debug)]
pub struct ComposeArgs {
    /// Left class, e.g. theta(v), omega, phi(u), xi
    pub left: String,
    /// Right class
    pub right: String,
    #[arg(long)]
    pub n: usize,
    /// Print only this coefficient, e.g. u1^v1|e1
    #[arg(long)]
    pub monomial: Option<String>,
    #[arg(long, default_value = "literal")]
    pub pairing: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub oracle_n_max: usize,
    pub format: Format,
    pub output: Option<String>,
    pub check_remark: bool,
    pub swap_uv: bool,
    pub print_bases: bool,
}

impl RunConfig {
    pub fn new(n_min: usize, n_max: usize) -> Self {
        Self {
            n_min,
            n_max,
            oracle_n_max: n_max,
            format: Format::Json,
            output: None,
            check_remark: false,
            swap_uv: false,
            print_bases: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min < 2 {
            return Err(Error::Config(format!("--n-min must be at least 2, got {}", self.n_min)));
        }
        if self.n_min > self.n_max {
            return Err(Error::Config(format!(
                "--n-min {} exceeds --n-max {}",
                self.n_min, self.n_max
            )));
        }
        if self.oracle_n_max < self.n_max {
            return Err(Error::Config(format!(
                "--oracle-n-max {} is below --n-max {}",
                self.oracle_n_max, self.n_max
            )));
        }
        Ok(())
    }
}

impl From<&VerifyArgs> for RunConfig {
    fn from(a: &VerifyArgs) -> Self {
        Self {
            n_min: a.n_min,
            n_max: a.n_max,
            oracle_n_max: a.oracle_n_max,
            format: a.format,
            output: a.output.as_ref().map(|p| p.display().to_string()),
            check_remark: a.check_remark,
            swap_uv: a.swap_uv,
            print_bases: a.print_bases,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub n: Option<usize>,
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub table: Table,
    pub formula: GradedDimVector,
    pub raw: GradedDimVector,
    pub oracle: GradedDimVector,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub id: String,
    pub value: String,
    pub expected: String,
    pub status: Status,
}

impl Check {
    fn new(id: impl Into<String>, value: impl ToString, expected: impl Into<String>, ok: bool) -> Self {
        Self {
            id: id.into(),
            value: value.to_string(),
            expected: expected.into(),
            status: status(ok),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleAgreement {
    pub spaces_checked: usize,
    pub mismatches: Vec<String>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisListing {
    pub space: String,
    pub vectors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NReport {
    pub n: usize,
    pub tables: Vec<TableRow>,
    pub identities: Vec<Check>,
    pub oracle: OracleAgreement,
    pub ranks: Vec<Check>,
    pub coefficients: Vec<Check>,
    pub chase: TheoremReplay,
    #[serde(rename = "ext1_MM")]
    pub ext1_mm: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remark: Option<RemarkCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bases: Vec<BasisListing>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleRow {
    pub n: usize,
    pub table: Table,
    pub oracle: GradedDimVector,
    pub formula: GradedDimVector,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub version: String,
    pub config: RunConfig,
    pub per_n: Vec<NReport>,
    pub oracle_extension: Vec<OracleRow>,
    pub warnings: Vec<Warning>,
    pub verdict: Status,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict == Status::Pass
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn all_pass<'a>(it: impl IntoIterator<Item = &'a Status>) -> bool {
    it.into_iter().all(|s| *s == Status::Pass)
}

fn class(name: &str, n: usize) -> Result<crate::yoneda::DistinguishedClass> {
    build_class(name.parse::<ClassName>()?, n)
}

/// The spaces every per-n run touches: all four tables plus the targets of
/// the rank checks.
fn spaces_used(n: usize) -> Vec<SpaceDescriptor> {
    let mut out: Vec<SpaceDescriptor> = [Table::HOp, Table::HG, Table::ExtGOp, Table::ExtGG]
        .into_iter()
        .flat_map(|t| t.spaces(n))
        .collect();
    out.push(SpaceDescriptor::new(n, 2, 1, 1));
    out.sort_by_key(|s| (s.k, s.a, s.b));
    out.dedup();
    out
}

fn coefficient_checks(n: usize) -> Result<Vec<Check>> {
    let cases = [
        ("theta(v)", "omega", "u1^v1^v2|e2", PairingKind::Literal, rat(3)),
        ("theta(v)", "phi(v)", "v1^v2|d1|e2", PairingKind::Literal, rat(3)),
        ("theta(v)", "phi(u)", "u1^v1|d1|e1", PairingKind::Literal, rat(4)),
        ("xi", "theta(v)", "u1^v1|e1", PairingKind::Literal, rat(1 - n as i64)),
    ];
    cases
        .into_iter()
        .map(|(l, r, m, kind, expected): (&str, &str, &str, PairingKind, Rational)| {
            let product = compose(&class(l, n)?.value, &class(r, n)?.value, &PairingTable::new(kind, n))?;
            let c = coefficient(&product, m)?;
            Ok(Check::new(
                format!("{l} o {r} at {m} ({kind} pairing)"),
                &c,
                expected.to_string(),
                c == expected,
            ))
        })
        .collect()
}

fn rank_checks(ctx: &ChaseContext) -> Result<Vec<Check>> {
    let n = ctx.n;
    let mut out = Vec::new();
    for i in 0..n {
        let r = ctx.push_on_op(2 * i)?;
        out.push(Check::new(format!("theta_* on H{}(O_P)", 2 * i), r, "1", r == 1));
    }
    let m = map_on_invariants(
        &ctx.theta,
        Side::Push,
        SpaceDescriptor::new(n, 1, 1, 0),
        &ctx.pairing,
        ctx.cache,
    )?;
    out.push(Check::new(
        "theta_* on Ext1(G,O_P)",
        m.rank,
        "2",
        m.rank == 2 && m.source.len() == 2,
    ));
    let m = map_on_invariants(
        &ctx.theta,
        Side::Pull,
        SpaceDescriptor::new(n, 1, 1, 1),
        &ctx.pairing,
        ctx.cache,
    )?;
    out.push(Check::new("theta^* on Ext1(G,G) -> H2(G)", m.rank, ">= 1", m.rank >= 1));
    Ok(out)
}

fn identity_checks(n: usize, tables: &[TableRow]) -> Vec<Check> {
    let row = |t: Table| tables.iter().find(|r| r.table == t).expect("all tables present");
    let (hg, ext_op, ext_gg, d) = (row(Table::HG), row(Table::ExtGOp), row(Table::ExtGG), row(Table::D));
    let sum = ext_op.raw.add(&ext_gg.raw);
    let mut out = vec![
        Check::new(
            "ext_G_OP + ext_G_G = d (raw)",
            &sum,
            d.formula.to_string(),
            sum == d.formula,
        ),
        Check::new("h1(G) = 2", hg.raw.get(1), "2", hg.raw.get(1) == 2),
        Check::new(
            "ext_G_OP is h_G reversed",
            &ext_op.raw,
            hg.raw.reversed().to_string(),
            ext_op.raw == hg.raw.reversed(),
        ),
    ];
    for r in tables {
        out.push(Check::new(
            format!("{} palindromic", r.table),
            &r.raw,
            "palindrome",
            r.raw.is_palindrome(),
        ));
    }
    let h_op = row(Table::HOp);
    let ok = h_op.raw.len() == 2 * n + 1
        && h_op
            .raw
            .dims
            .iter()
            .enumerate()
            .all(|(k, &d)| d == u64::from(k % 2 == 0));
    out.push(Check::new("h_OP = (1,0,1,...,1)", &h_op.raw, "(1,0,...,0,1)", ok));
    out
}

fn verify_n(n: usize, cfg: &RunConfig) -> Result<NReport> {
    let cache = InvariantCache::new();
    let tables = Table::ALL
        .into_iter()
        .map(|t| {
            let formula = t.formula(n)?;
            let raw = t.raw(n, &cache)?;
            let oracle = oracle::table(t, n)?;
            let ok = formula == raw && raw == oracle;
            Ok(TableRow {
                table: t,
                formula,
                raw,
                oracle,
                status: status(ok),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let identities = identity_checks(n, &tables);

    let spaces = spaces_used(n);
    let mut mismatches = Vec::new();
    for s in &spaces {
        let (o, e) = (oracle::invariant_dim(*s)?, cache.dim(*s) as u64);
        if o != e {
            mismatches.push(format!("{s}: oracle {o}, nullspace {e}"));
        }
    }
    let oracle = OracleAgreement {
        spaces_checked: spaces.len(),
        status: status(mismatches.is_empty()),
        mismatches,
    };

    let ctx = ChaseContext::new(n, cfg.swap_uv, &cache)?;
    let ranks = rank_checks(&ctx)?;
    let coefficients = coefficient_checks(n)?;
    let chase = verify_theorem(&ctx)?;
    let remark = if cfg.check_remark {
        Some(check_remark(&ctx)?)
    } else {
        None
    };
    let bases = if cfg.print_bases {
        [(0, 0, 0), (2, 0, 0), (1, 1, 0), (1, 1, 1), (2, 0, 1)]
            .into_iter()
            .map(|(k, a, b)| {
                let s = SpaceDescriptor::new(n, k, a, b);
                BasisListing {
                    space: s.to_string(),
                    vectors: cache.get(s).vectors.iter().map(|v| v.to_string()).collect(),
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let ok = all_pass(tables.iter().map(|t| &t.status))
        && all_pass(identities.iter().map(|c| &c.status))
        && oracle.status == Status::Pass
        && all_pass(ranks.iter().map(|c| &c.status))
        && all_pass(coefficients.iter().map(|c| &c.status))
        && chase.passed()
        && chase.ext1_m_m == Some(2)
        && remark.as_ref().is_none_or(|r| r.passed);
    Ok(NReport {
        n,
        tables,
        identities,
        oracle,
        ranks,
        coefficients,
        ext1_mm: chase.ext1_m_m,
        chase,
        remark,
        bases,
        status: status(ok),
    })
}

fn fmt_tail(v: &[u64]) -> String {
    let body: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("(...,{})", body.join(","))
}

fn warnings(cfg: &RunConfig) -> Result<Vec<Warning>> {
    let mut out = vec![
        Warning {
            n: None,
            code: "pairing".into(),
            message: "the published pairing e'_j(e_i) (delta on i,j <= n, -1 on the border, n in the corner) is not \
                      preserved by the group action; coefficients use it verbatim, pull maps use the invariant pairing \
                      delta_ij - 1/(n+1)"
                .into(),
        },
        Warning {
            n: None,
            code: "wedge_typo".into(),
            message:
                "published monomial (ue1^ue1)|d1|e1 is identically zero; coefficient 4 is checked at (ue1^ve1)|d1|e1"
                    .into(),
        },
    ];
    for n in cfg.n_min..=cfg.n_max {
        if let Some(note) = d_tail_discrepancy(n)? {
            out.push(Warning {
                n: Some(n),
                code: "d_tail".into(),
                message: format!(
                    "published d vector ends {} but the convolution gives the palindromic tail {}",
                    fmt_tail(&note.published_tail),
                    fmt_tail(&note.computed_tail)
                ),
            });
        }
    }
    Ok(out)
}

fn oracle_extension(cfg: &RunConfig) -> Result<Vec<OracleRow>> {
    (cfg.n_max + 1..=cfg.oracle_n_max)
        .into_par_iter()
        .map(|n| {
            Table::ALL
                .into_iter()
                .map(|t| {
                    let oracle = oracle::table(t, n)?;
                    let formula = t.formula(n)?;
                    let ok = oracle == formula;
                    Ok(OracleRow {
                        n,
                        table: t,
                        oracle,
                        formula,
                        status: status(ok),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect())
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let w: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")))?;
        if w == 0 {
            return Err(Error::Config(format!("{WORKERS_ENV} must be positive")));
        }
        b = b.num_threads(w);
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let pool = thread_pool()?;
    let (per_n, oracle_extension) = pool.install(|| {
        rayon::join(
            || {
                (cfg.n_min..=cfg.n_max)
                    .into_par_iter()
                    .map(|n| verify_n(n, cfg))
                    .collect::<Result<Vec<_>>>()
            },
            || oracle_extension(cfg),
        )
    });
    let (per_n, oracle_extension) = (per_n?, oracle_extension?);
    let ok = all_pass(per_n.iter().map(|r| &r.status)) && all_pass(oracle_extension.iter().map(|r| &r.status));
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        per_n,
        oracle_extension,
        warnings: warnings(cfg)?,
        verdict: status(ok),
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(out: &mut String, fields: &[&str]) {
    let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    let _ = writeln!(out, "{}", line.join(","));
}

pub fn render_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_csv(report: &Report) -> String {
    let mut out = String::new();
    csv_line(&mut out, &["n", "section", "item", "value", "expected", "status"]);
    for r in &report.per_n {
        let n = r.n.to_string();
        for t in &r.tables {
            let value = format!("formula {} raw {} oracle {}", t.formula, t.raw, t.oracle);
            csv_line(
                &mut out,
                &[
                    &n,
                    "table",
                    t.table.name(),
                    &value,
                    &t.formula.to_string(),
                    &t.status.to_string(),
                ],
            );
        }
        for (section, checks) in [
            ("identity", &r.identities),
            ("rank", &r.ranks),
            ("coefficient", &r.coefficients),
        ] {
            for c in checks {
                csv_line(
                    &mut out,
                    &[&n, section, &c.id, &c.value, &c.expected, &c.status.to_string()],
                );
            }
        }
        let o = &r.oracle;
        let value = format!("{} spaces, {} mismatches", o.spaces_checked, o.mismatches.len());
        csv_line(
            &mut out,
            &[
                &n,
                "oracle",
                "invariant dimensions",
                &value,
                "0 mismatches",
                &o.status.to_string(),
            ],
        );
        for s in &r.chase.steps {
            csv_line(
                &mut out,
                &[
                    &n,
                    "replay",
                    &format!("{} {}", s.id, s.claim),
                    &s.value,
                    "",
                    &s.status.to_string(),
                ],
            );
        }
        if let Some(rm) = &r.remark {
            let value = rm.h_m.as_ref().map_or("?".to_string(), |h| h.to_string());
            csv_line(
                &mut out,
                &[
                    &n,
                    "remark",
                    "h(M)",
                    &value,
                    "(0,1,...,1)",
                    &status(rm.passed).to_string(),
                ],
            );
        }
        let e = r.ext1_mm.map_or("?".to_string(), |v| v.to_string());
        csv_line(&mut out, &[&n, "result", "ext1_MM", &e, "2", &r.status.to_string()]);
    }
    for o in &report.oracle_extension {
        csv_line(
            &mut out,
            &[
                &o.n.to_string(),
                "oracle_extension",
                o.table.name(),
                &o.oracle.to_string(),
                &o.formula.to_string(),
                &o.status.to_string(),
            ],
        );
    }
    for w in &report.warnings {
        let n = w.n.map_or(String::new(), |n| n.to_string());
        csv_line(&mut out, &[&n, "warning", &w.code, &w.message, "", "WARN"]);
    }
    csv_line(&mut out, &["", "verdict", "", "", "", &report.verdict.to_string()]);
    out
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let c = &report.config;
    let _ = writeln!(
        out,
        "equivext {}  n = {}..{}  oracle to {}",
        report.version, c.n_min, c.n_max, c.oracle_n_max
    );
    for r in &report.per_n {
        let _ = writeln!(out, "\nn = {}  [{}]", r.n, r.status);
        let _ = writeln!(out, "  tables (formula | raw | oracle)");
        for t in &r.tables {
            let _ = writeln!(
                out,
                "    [{}] {:<9} {} | {} | {}",
                t.status,
                t.table.name(),
                t.formula,
                t.raw,
                t.oracle
            );
        }
        for (title, checks) in [
            ("identities", &r.identities),
            ("ranks", &r.ranks),
            ("coefficients", &r.coefficients),
        ] {
            let _ = writeln!(out, "  {title}");
            for ch in checks {
                let _ = writeln!(
                    out,
                    "    [{}] {}: {} (expected {})",
                    ch.status, ch.id, ch.value, ch.expected
                );
            }
        }
        let _ = writeln!(
            out,
            "  oracle: {} spaces, {} mismatches [{}]",
            r.oracle.spaces_checked,
            r.oracle.mismatches.len(),
            r.oracle.status
        );
        for m in &r.oracle.mismatches {
            let _ = writeln!(out, "    {m}");
        }
        let _ = writeln!(out, "  replay");
        for s in &r.chase.steps {
            let _ = writeln!(out, "    [{}] {} {}: {}", s.status, s.id, s.claim, s.value);
        }
        for d in &r.chase.derived {
            let _ = writeln!(out, "    derived: {d}");
        }
        if let Some(rm) = &r.remark {
            let h = rm.h_m.as_ref().map_or("?".to_string(), |h| h.to_string());
            let _ = writeln!(
                out,
                "  remark: theta_* ranks {:?}, h(M) = {h} [{}]",
                rm.push_ranks,
                status(rm.passed)
            );
        }
        for b in &r.bases {
            let _ = writeln!(out, "  basis of {}", b.space);
            for v in &b.vectors {
                let _ = writeln!(out, "    {v}");
            }
        }
        let e = r.ext1_mm.map_or("?".to_string(), |v| v.to_string());
        let _ = writeln!(out, "  ext1(M,M) = {e}");
    }
    if !report.oracle_extension.is_empty() {
        let _ = writeln!(out, "\noracle extension");
        for o in &report.oracle_extension {
            let _ = writeln!(out, "  [{}] n={} {:<9} {}", o.status, o.n, o.table.name(), o.oracle);
        }
    }
    if !report.warnings.is_empty() {
        let _ = writeln!(out);
        for w in &report.warnings {
            let at = w.n.map_or(String::new(), |n| format!(" (n={n})"));
            let _ = writeln!(out, "WARN {}{at}: {}", w.code, w.message);
        }
    }
    let _ = writeln!(out, "\nverdict: {}", report.verdict);
    out
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        Format::Csv => render_csv(report),
        Format::Json => render_json(report),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub table: Table,
    pub n: usize,
    pub formula: GradedDimVector,
    pub raw: GradedDimVector,
    pub agree: bool,
}

pub fn cmd_table(which: &str, n: usize) -> Result<TableReport> {
    let table: Table = which.parse()?;
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    let formula = table.formula(n)?;
    let raw = table.raw(n, &InvariantCache::new())?;
    Ok(TableReport {
        table,
        n,
        agree: formula == raw,
        formula,
        raw,
    })
}

pub fn render_table(t: &TableReport, format: Format) -> String {
    let mark = if t.agree { "OK" } else { "MISMATCH" };
    match format {
        Format::Text => format!(
            "{} n={}  formula | raw | agreement\n{} | {} | {mark}\n",
            t.table, t.n, t.formula, t.raw
        ),
        Format::Csv => {
            let mut out = String::new();
            csv_line(&mut out, &["table", "n", "formula", "raw", "agreement"]);
            csv_line(
                &mut out,
                &[
                    t.table.name(),
                    &t.n.to_string(),
                    &t.formula.to_string(),
                    &t.raw.to_string(),
                    mark,
                ],
            );
            out
        }
        Format::Json => serde_json::to_string_pretty(t).expect("table serializes") + "\n",
    }
}

pub fn cmd_invariants(args: &InvariantsArgs) -> Result<String> {
    if args.n == 0 {
        return Err(Error::InvalidN { n: 0, min: 1 });
    }
    if args.k > 2 * args.n {
        return Err(Error::Config(format!("--k must be at most 2n = {}", 2 * args.n)));
    }
    let s = SpaceDescriptor::new(args.n, args.k, args.dual, args.rho);
    if args.oracle {
        return Ok(format!("dim {}\n", oracle::invariant_dim(s)?));
    }
    let basis = InvariantCache::new().get(s);
    let mut out = format!("dim {}\n", basis.len());
    if !args.dim_only {
        for v in &basis.vectors {
            let _ = writeln!(out, "{v}");
        }
    }
    Ok(out)
}

pub fn cmd_compose(args: &ComposeArgs) -> Result<String> {
    let kind: PairingKind = args.pairing.parse()?;
    let x = class(&args.left, args.n)?;
    let y = class(&args.right, args.n)?;
    let product = compose(&x.value, &y.value, &PairingTable::new(kind, args.n))?;
    Ok(match &args.monomial {
        Some(m) => format!("{}\n", coefficient(&product, m)?),
        None => format!("{}\n", product),
    })
}

fn exit_code(report: &Report) -> i32 {
    if report.passed() {
        0
    } else {
        1
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::Config(format!("write failed: {e}"));
    match &cli.command {
        Command::Verify(a) => {
            let cfg = RunConfig::from(a);
            let report = cmd_verify(&cfg)?;
            let text = render(&report, cfg.format);
            match &a.output {
                Some(p) => std::fs::write(p, text).map_err(io)?,
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
            Ok(exit_code(&report))
        }
        Command::Table(a) => {
            let t = cmd_table(&a.which, a.n)?;
            out.write_all(render_table(&t, a.format).as_bytes()).map_err(io)?;
            Ok(if t.agree { 0 } else { 1 })
        }
        Command::Invariants(a) => {
            out.write_all(cmd_invariants(a)?.as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Compose(a) => {
            out.write_all(cmd_compose(a)?.as_bytes()).map_err(io)?;
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code: 0 on PASS, 1 on FAIL, 2 on usage or internal errors.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("equivext").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::new(2, 3).validate().is_ok());
        assert!(RunConfig::new(1, 3).validate().is_err());
        assert!(RunConfig::new(4, 3).validate().is_err());
        let mut c = RunConfig::new(2, 4);
        c.oracle_n_max = 3;
        assert!(c.validate().is_err());
    }

    #[test]
    fn table_rows() {
        let (code, out, _) = run_args(&["table", "ext_G_G", "--n", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("(1,2,5,2,1) | (1,2,5,2,1) | OK"), "{out}");
        let (_, out, _) = run_args(&["table", "h_OP", "--n", "3"]);
        assert!(out.contains("(1,0,1,0,1,0,1)"));
        let (_, out, _) = run_args(&["table", "h_G", "--n", "2", "--format", "csv"]);
        assert!(out.contains("h_G,2,\"(0,2,1,2,0)\",\"(0,2,1,2,0)\",OK"), "{out}");
        let (code, _, err) = run_args(&["table", "h_X", "--n", "2"]);
        assert_eq!(code, 2);
        assert!(err.contains("unknown table"));
    }

    #[test]
    fn invariants_listing() {
        let (code, out, _) = run_args(&["invariants", "--n", "2", "--k", "2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "dim 1");
        assert!(lines[1].contains("u1^v1"));
        let (_, out, _) = run_args(&["invariants", "--n", "3", "--k", "1", "--rho", "1", "--dim-only"]);
        assert_eq!(out, "dim 2\n");
        let (_, out, _) = run_args(&["invariants", "--n", "2", "--k", "1"]);
        assert_eq!(out, "dim 0\n");
        let (_, out, _) = run_args(&[
            "invariants",
            "--n",
            "3",
            "--k",
            "2",
            "--dual",
            "1",
            "--rho",
            "1",
            "--oracle",
        ]);
        assert_eq!(out, "dim 6\n");
    }

    #[test]
    fn compose_queries() {
        let (code, out, _) = run_args(&["compose", "xi", "theta(v)", "--n", "4", "--monomial", "u1^v1|e1"]);
        assert_eq!((code, out.as_str()), (0, "-3\n"));
        let (_, out, _) = run_args(&["compose", "theta(v)", "omega", "--n", "2", "--monomial", "u1^v1^v2|e2"]);
        assert_eq!(out, "3\n");
        let (code, _, _) = run_args(&["compose", "omega", "xi", "--n", "2"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_args(&["compose", "xi", "theta(v)", "--n", "2", "--pairing", "bogus"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["verify", "--n-min", "1"]).0, 2);
        assert_eq!(run_args(&["verify", "--n-min", "3", "--n-max", "2"]).0, 2);
        assert_eq!(run_args(&["verify", "--bogus"]).0, 2);
        assert_eq!(run_args(&[]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn verify_n2_report() {
        let mut cfg = RunConfig::new(2, 2);
        cfg.check_remark = true;
        cfg.print_bases = true;
        let r = cmd_verify(&cfg).unwrap();
        assert!(r.passed());
        assert_eq!(r.per_n[0].ext1_mm, Some(2));
        assert!(r.warnings.iter().all(|w| w.code != "d_tail"));
        let json = render_json(&r);
        assert!(json.contains("\"ext1_MM\": 2"));
        let text = render_text(&r);
        assert!(text.contains("verdict: PASS"));
        let csv = render_csv(&r);
        assert!(csv.lines().last().unwrap().ends_with("PASS"));
    }
}

//! Command-line frontend. `dispatch` parses argv, runs one subcommand and
//! returns the exit code together with everything meant for stdout.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::defects::{as_defect, classify, quad_defect, QuadClass};
use crate::error::{Error, Result};
use crate::existence::{decide_with_box, AlgebraSpec, SearchBox};
use crate::field::{default_modulus, Field, DEFAULT_PREC};
use crate::parse::parse_series;
use crate::predictor::{branch_shape, compare, fake_distance, predict_relpos, Verdict};
use crate::quaternion::{make_pair, parse_mat2, Mat2};
use crate::selftest::{selftest, SelfTestConfig};
use crate::series::Series;
use crate::tree::{enumerate_window, measure_intersection, oracle_branch, to_dot, MeasureConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    Text,
    Json,
}

/// Branches of quaternion orders in the Bruhat-Tits tree over F_{2^tau}((t)).
///
/// Elements use the grammar `t^-3 + 1 + g*t^2 (mod t^12)`, matrices
/// `[[a, b],[c, d]]`. Any value may be given as `@path` to read it from a file.
#[derive(Parser, Debug)]
#[command(name = "quatbranch", version)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Degree of the residue field over F_2.
    #[arg(long, global = true, default_value_t = 1)]
    pub tau: u32,
    /// Defining polynomial of the residue field as a bit mask, e.g. 0b111.
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Working precision for inverses and roots.
    #[arg(long, global = true, default_value_t = DEFAULT_PREC)]
    pub prec: u32,
    /// Window radius for oracle measurements.
    #[arg(long, global = true, default_value_t = 8)]
    pub radius: u32,
    /// Distance a certified shape keeps from the window boundary.
    #[arg(long, global = true, default_value_t = 2)]
    pub margin: u32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the oracle window as a DOT graph.
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Artin-Schreier or quadratic defect of an element.
    Defect {
        #[arg(value_enum)]
        kind: DefectKind,
        elem: String,
    },
    /// Class of X^2 + aX + b.
    Classify { a: String, b: String },
    /// Fake distance of a pair of polynomials with symmetric product lambda.
    Df(PolyPair),
    /// Closed-form branch of a matrix.
    Branch { matrix: String },
    /// Predicted relative position of two branches.
    Relpos { q1: String, q2: String },
    /// Prediction against window measurement.
    Oracle { q1: String, q2: String },
    /// Existence of a generator pair.
    Exists {
        #[command(flatten)]
        pair: PolyPair,
        /// Print the witness pair.
        #[arg(long)]
        witness: bool,
        /// Support `LO,HI` of the search for explicit solutions.
        #[arg(long, value_name = "LO,HI")]
        search_box: Option<String>,
    },
    /// Differential self-test against the oracles.
    Selftest {
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DefectKind {
    As,
    Quad,
}

#[derive(Args, Debug)]
pub struct PolyPair {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    /// Coefficients `a,b` of X^2 + aX + b.
    #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
    pub m1: String,
    #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
    pub m2: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectRecord {
    pub kind: String,
    pub input: String,
    pub ideal: String,
    pub ideal_val: Option<i64>,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyRecord {
    pub a: String,
    pub b: String,
    pub class: QuadClass,
    pub family: String,
    pub t: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfRecord {
    pub lambda: String,
    pub m1: ClassifyRecord,
    pub m2: ClassifyRecord,
    pub delta: String,
    pub df: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub matrix: String,
    pub class: QuadClass,
    pub shape: serde_json::Value,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelposRecord {
    pub q1: String,
    pub q2: String,
    pub lambda: String,
    pub relpos: serde_json::Value,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub predicted: RelposRecord,
    pub measured: serde_json::Value,
    pub verdict: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExistsRecord {
    pub lambda: String,
    pub delta: String,
    pub exists: bool,
    pub condition: String,
    pub witness: Option<(String, String)>,
    pub commutative_note: bool,
    pub independent: Option<bool>,
}

/// Resolve `@path` arguments.
fn arg_value(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map(|c| c.trim().to_string())
            .map_err(|e| Error::Parse(format!("cannot read {path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

fn parse_modulus(s: &str) -> Result<u32> {
    let s = s.trim();
    let parsed = if let Some(b) = s.strip_prefix("0b") {
        u32::from_str_radix(b, 2)
    } else if let Some(h) = s.strip_prefix("0x") {
        u32::from_str_radix(h, 16)
    } else {
        s.parse()
    };
    parsed.map_err(|_| Error::Parse(format!("bad modulus `{s}`")))
}

impl RunArgs {
    pub fn field(&self) -> Result<Field> {
        let modulus = match &self.modulus {
            Some(m) => parse_modulus(m)?,
            None => default_modulus(self.tau),
        };
        Ok(Field::new(self.tau, modulus)?.with_prec(self.prec))
    }
}

struct Ctx {
    field: Field,
    run: RunArgs,
}

impl Ctx {
    fn series(&self, s: &str) -> Result<Series> {
        parse_series(self.field, &arg_value(s)?)
    }

    fn matrix(&self, s: &str) -> Result<Mat2> {
        parse_mat2(self.field, &arg_value(s)?)
    }

    fn coeffs(&self, s: &str) -> Result<(Series, Series)> {
        let s = arg_value(s)?;
        let (a, b) = s.split_once(',').ok_or_else(|| Error::Parse(format!("expected `a,b`, got `{s}`")))?;
        Ok((parse_series(self.field, a)?, parse_series(self.field, b)?))
    }

    fn spec(&self, p: &PolyPair) -> Result<AlgebraSpec> {
        AlgebraSpec::from_coeffs(self.series(&p.lambda)?, self.coeffs(&p.m1)?, self.coeffs(&p.m2)?)
    }

    fn emit<T: Serialize>(&self, record: &T, text: String) -> String {
        match self.run.format {
            Format::Json => serde_json::to_string_pretty(record).expect("record serializes") + "\n",
            Format::Text => text,
        }
    }
}

fn classify_record(a: &Series, b: &Series) -> Result<ClassifyRecord> {
    let m = classify(a, b)?;
    Ok(ClassifyRecord { a: a.to_string(), b: b.to_string(), class: m.class, family: m.class.family().into(), t: m.t })
}

fn relpos_record(q1: &Mat2, q2: &Mat2) -> Result<RelposRecord> {
    let pair = make_pair(q1, q2)?;
    let rel = predict_relpos(&pair)?;
    Ok(RelposRecord {
        q1: q1.to_string(),
        q2: q2.to_string(),
        lambda: pair.lambda.to_string(),
        relpos: serde_json::to_value(&rel).expect("relpos serializes"),
        summary: rel.to_string(),
    })
}

fn parse_box(s: &str) -> Result<SearchBox> {
    let bad = || Error::Parse(format!("expected `LO,HI`, got `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if hi < lo {
        return Err(bad());
    }
    Ok(SearchBox { lo, hi, ..SearchBox::default() })
}

fn run(ctx: &Ctx, cmd: &Command) -> Result<(i32, String)> {
    let out = match cmd {
        Command::Defect { kind, elem } => {
            let a = ctx.series(elem)?;
            let (name, d) = match kind {
                DefectKind::As => ("as", as_defect(&a)?),
                DefectKind::Quad => ("quad", quad_defect(&a)?),
            };
            let rec = DefectRecord {
                kind: name.into(),
                input: a.to_string(),
                ideal: d.ideal.to_string(),
                ideal_val: d.ideal.val,
                witness: d.witness.to_string(),
            };
            let text = format!("ideal {}\nwitness {}\n", rec.ideal, rec.witness);
            ctx.emit(&rec, text)
        }
        Command::Classify { a, b } => {
            let rec = classify_record(&ctx.series(a)?, &ctx.series(b)?)?;
            let text = format!("{:?} ({}) t={}\n", rec.class, rec.family, rec.t);
            ctx.emit(&rec, text)
        }
        Command::Df(p) => {
            let spec = ctx.spec(p)?;
            let df = fake_distance(&spec.lambda, &spec.m1, &spec.m2)?;
            let rec = DfRecord {
                lambda: spec.lambda.to_string(),
                m1: classify_record(&spec.m1.a, &spec.m1.b)?,
                m2: classify_record(&spec.m2.a, &spec.m2.b)?,
                delta: spec.delta.to_string(),
                df: df.to_string(),
            };
            let text = format!("delta {}\ndf {}\n", rec.delta, rec.df);
            ctx.emit(&rec, text)
        }
        Command::Branch { matrix } => {
            let q = ctx.matrix(matrix)?;
            let class = crate::quaternion::min_poly(&q)?.class;
            let shape = branch_shape(&q)?;
            let rec = BranchRecord {
                matrix: q.to_string(),
                class,
                shape: serde_json::to_value(&shape).expect("shape serializes"),
                summary: shape.to_string(),
            };
            if let Some(path) = &ctx.run.dot {
                let w = enumerate_window(ctx.field, ctx.run.radius)?;
                write_dot(path, &to_dot(&w, &[oracle_branch(&q, &w)?]))?;
            }
            let text = format!("{:?}: {}\n", rec.class, rec.summary);
            ctx.emit(&rec, text)
        }
        Command::Relpos { q1, q2 } => {
            let rec = relpos_record(&ctx.matrix(q1)?, &ctx.matrix(q2)?)?;
            let text = format!("{}\n", rec.summary);
            ctx.emit(&rec, text)
        }
        Command::Oracle { q1, q2 } => {
            let (q1, q2) = (ctx.matrix(q1)?, ctx.matrix(q2)?);
            let predicted = relpos_record(&q1, &q2)?;
            let rel = predict_relpos(&make_pair(&q1, &q2)?)?;
            let w = enumerate_window(ctx.field, ctx.run.radius)?;
            let cfg = MeasureConfig::new(ctx.run.radius, ctx.run.margin);
            let meas = measure_intersection(&q1, &q2, &w, &cfg)?;
            let verdict = compare(&rel, &meas);
            if let Some(path) = &ctx.run.dot {
                write_dot(path, &to_dot(&w, &[oracle_branch(&q1, &w)?, oracle_branch(&q2, &w)?]))?;
            }
            let (label, detail, code) = match &verdict {
                Verdict::Match => ("MATCH", String::new(), EXIT_PASS),
                Verdict::Skipped(r) => ("SKIPPED", r.clone(), EXIT_PASS),
                Verdict::Mismatch(r) => ("MISMATCH", r.clone(), EXIT_MISMATCH),
            };
            let measured_text = describe_measure(&meas);
            let rec = OracleRecord {
                predicted,
                measured: serde_json::to_value(&meas).expect("measure serializes"),
                verdict: label.into(),
                detail: detail.clone(),
            };
            let text = format!(
                "predicted: {}\nmeasured:  {measured_text}\nverdict:   {label}{}\n",
                rec.predicted.summary,
                if detail.is_empty() { String::new() } else { format!(" ({detail})") }
            );
            return Ok((code, ctx.emit(&rec, text)));
        }
        Command::Exists { pair, witness, search_box } => {
            let spec = ctx.spec(pair)?;
            let bx = match search_box {
                Some(s) => parse_box(s)?,
                None => SearchBox::default(),
            };
            let v = decide_with_box(&spec, &bx)?;
            let rec = ExistsRecord {
                lambda: spec.lambda.to_string(),
                delta: spec.delta.to_string(),
                exists: v.exists,
                condition: format!("{:?}", v.matched_condition),
                witness: v.witness.as_ref().map(|(a, b)| (a.to_string(), b.to_string())),
                commutative_note: v.commutative_note,
                independent: v.independent,
            };
            let mut text = format!("exists {}\ncondition {}\n", rec.exists, rec.condition);
            if v.commutative_note {
                text.push_str("note: the pair generates a commutative subalgebra\n");
            }
            if *witness {
                match &rec.witness {
                    Some((a, b)) => text.push_str(&format!("q1 {a}\nq2 {b}\n")),
                    None => text.push_str("no explicit witness found in the search box\n"),
                }
            }
            ctx.emit(&rec, text)
        }
        Command::Selftest { count } => {
            let cfg = SelfTestConfig::new(ctx.field, ctx.run.radius, ctx.run.margin, ctx.run.seed, *count);
            let report = selftest(&cfg)?;
            let code = if report.passed() { EXIT_PASS } else { EXIT_MISMATCH };
            let out = match ctx.run.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.summary(),
            };
            return Ok((code, out));
        }
    };
    Ok((EXIT_PASS, out))
}

fn describe_measure(m: &crate::tree::PairMeasure) -> String {
    let mut s = format!("branches of {} and {} vertices", m.b1.vertex_set.len(), m.b2.vertex_set.len());
    match (&m.stem_meet, m.stem_distance) {
        (Some(meet), _) => s.push_str(&format!(
            ", stems meet in {} vertices, diameter {}{}",
            meet.vertices.len(),
            meet.diameter,
            if meet.interior { "" } else { " (reaches the boundary)" }
        )),
        (None, Some(d)) => s.push_str(&format!(", stems at distance {d}")),
        (None, None) => s.push_str(", a stem misses the window"),
    }
    if m.branch_containment {
        s.push_str(", one branch contains the other");
    }
    s
}

fn write_dot(path: &PathBuf, dot: &str) -> Result<()> {
    fs::write(path, dot).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UndeterminedAtPrecision(_) | Error::InexactInput => EXIT_PRECISION,
        _ => EXIT_USAGE,
    }
}

/// Parse `argv` (including the program name) and run the command.
pub fn dispatch<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            return (code, e.render().to_string());
        }
    };
    let field = match cli.run.field() {
        Ok(f) => f,
        Err(e) => return (EXIT_USAGE, format!("error: {e}\n")),
    };
    let ctx = Ctx { field, run: cli.run };
    match run(&ctx, &cli.command) {
        Ok(r) => r,
        Err(e) => (exit_code(&e), format!("error: {e}\n")),
    }
}

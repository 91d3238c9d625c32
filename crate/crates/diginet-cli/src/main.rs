//! `dnet`: construction, discrepancy, Haar coefficients and verification
//! sweeps for digital nets over GF(2).

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use diginet::discrepancy::{l2_sq_exact, linf_exact, lp_norm, DEFAULT_TOL};
use diginet::gf2::BitMatrix;
use diginet::haar::{
    parseval_for_set, ClosedConfig, ClosedForms, Fault, HaarCoefficientReport, HaarIndex, Transcription,
    DEFAULT_PARSEVAL_CAP,
};
use diginet::netgen::{generate_net, is_0n2_net, net_from_a, rank_criterion, symmetrize, AVector, GeneratorSpec, PointSet};
use diginet::rational::{format_rational, Rational};
use diginet::study::{run_scaling_study, run_verify, Family, VerifyReport};

#[derive(Parser, Debug)]
#[command(name = "dnet", version, about = "Digital (0,n,2)-nets over GF(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct NetArgs {
    #[arg(long)]
    n: usize,
    /// Bits a_1 ... a_{n-1}; defaults to all zeros (the Hammersley net).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Add the reflection y -> 1 - y of every point.
    #[arg(long)]
    sym: bool,
}

impl NetArgs {
    fn a_vector(&self) -> diginet::Result<AVector> {
        match &self.a {
            Some(bits) => AVector::parse_for(self.n, bits),
            None => AVector::zeros(self.n),
        }
    }

    fn point_set(&self) -> diginet::Result<PointSet> {
        let net = net_from_a(&self.a_vector()?);
        if self.sym {
            symmetrize(&net)
        } else {
            Ok(net)
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct ClosedArgs {
    /// Evaluate the closed forms as printed, without corrections.
    #[arg(long)]
    published: bool,
    /// Corrupt one closed-form constant (self-test of the verifier).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

impl ClosedArgs {
    fn config(&self) -> ClosedConfig {
        ClosedConfig {
            transcription: if self.published { Transcription::Published } else { Transcription::Corrected },
            fault: self.inject_fault.then_some(Fault::CornerOffset),
            ..Default::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the points of a net.
    Gen {
        #[command(flatten)]
        net: NetArgs,
    },
    /// Test the (0,n,2)-net property and the rank criterion.
    Check {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["c1_file", "c2_file"])]
        a: Option<String>,
        /// Matrix file: n lines of n '0'/'1' characters.
        #[arg(long, requires = "c2_file")]
        c1_file: Option<PathBuf>,
        #[arg(long, requires = "c1_file")]
        c2_file: Option<PathBuf>,
    },
    /// Exact squared L2 discrepancy.
    L2 {
        #[command(flatten)]
        net: NetArgs,
    },
    /// Exact star discrepancy.
    Linf {
        #[command(flatten)]
        net: NetArgs,
    },
    /// Lp discrepancy by quadrature.
    Lp {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// One Haar coefficient, oracle and closed form.
    Haar {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        j1: i32,
        #[arg(long, allow_hyphen_values = true)]
        j2: i32,
        #[arg(long, default_value_t = 0)]
        m1: u64,
        #[arg(long, default_value_t = 0)]
        m2: u64,
        #[command(flatten)]
        closed: ClosedArgs,
    },
    /// Closed forms against the oracle for every a with n <= n-cap.
    Verify {
        #[arg(long)]
        n_cap: u32,
        #[command(flatten)]
        closed: ClosedArgs,
    },
    /// Both sides of the Parseval identity.
    Parseval {
        #[command(flatten)]
        net: NetArgs,
    },
    /// Normalized discrepancy over a range of n.
    Scaling {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n_from: u32,
        #[arg(long)]
        n_to: u32,
        /// zero, one, balanced, random, or custom:<bits>.
        #[arg(long, default_value = "one")]
        family: String,
        /// Seed of the random family.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

/// Failure categories with their exit codes.
enum Failure {
    /// A verification found mismatches.
    Check,
    Usage(String),
}

impl From<diginet::Error> for Failure {
    fn from(e: diginet::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Serialize)]
struct PointRow {
    x: String,
    y: String,
}

#[derive(Serialize)]
struct CheckRow {
    n: usize,
    is_0n2_net: bool,
    rank_criterion: bool,
}

#[derive(Serialize)]
struct ExactRow {
    measure: &'static str,
    mode: &'static str,
    numerator: String,
    denominator: String,
}

impl ExactRow {
    fn new(measure: &'static str, r: &Rational) -> Self {
        ExactRow { measure, mode: "exact", numerator: r.numer().to_string(), denominator: r.denom().to_string() }
    }
}

#[derive(Serialize)]
struct ApproxRow {
    measure: &'static str,
    mode: &'static str,
    p: f64,
    value: f64,
    error_bound: f64,
}

#[derive(Serialize)]
struct ParsevalRow {
    lhs: String,
    rhs: String,
    equal: bool,
}

/// One line of the verify listing: a coefficient or a formula that failed.
struct VerifyRow {
    kind: String,
    n: u32,
    a: String,
    j1: String,
    j2: String,
    m1: String,
    m2: String,
    case: String,
    actual: String,
    expected: String,
    bound: String,
}

impl VerifyRow {
    const HEADER: [&'static str; 11] =
        ["kind", "n", "a", "j1", "j2", "m1", "m2", "case", "actual", "expected", "bound"];

    fn record(self) -> Vec<String> {
        vec![
            self.kind,
            self.n.to_string(),
            self.a,
            self.j1,
            self.j2,
            self.m1,
            self.m2,
            self.case,
            self.actual,
            self.expected,
            self.bound,
        ]
    }
}

fn verify_rows(report: &VerifyReport) -> Vec<VerifyRow> {
    let opt = |r: &Option<Rational>| r.as_ref().map(format_rational).unwrap_or_default();
    let mut rows: Vec<VerifyRow> = report
        .coefficient_failures
        .iter()
        .map(|f| VerifyRow {
            kind: "coefficient".into(),
            n: f.n,
            a: f.a.clone(),
            j1: f.report.index.j1.to_string(),
            j2: f.report.index.j2.to_string(),
            m1: f.report.index.m1.to_string(),
            m2: f.report.index.m2.to_string(),
            case: f.report.case.case.to_string(),
            actual: format_rational(&f.report.oracle_value),
            expected: opt(&f.report.closed_value),
            bound: opt(&f.report.bound),
        })
        .collect();
    rows.extend(report.failed_checks().map(|c| VerifyRow {
        kind: c.name.clone(),
        n: c.n,
        a: c.a.clone(),
        j1: String::new(),
        j2: String::new(),
        m1: String::new(),
        m2: String::new(),
        case: String::new(),
        actual: format_rational(&c.actual),
        expected: format_rational(&c.expected),
        bound: String::new(),
    }));
    rows
}

struct Output {
    format: Format,
    sink: Box<dyn Write>,
}

impl Output {
    fn open(format: Format, path: &Option<PathBuf>) -> Result<Self, Failure> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
            None => Box::new(io::BufWriter::new(io::stdout().lock())),
        };
        Ok(Output { format, sink })
    }

    /// A single record: one CSV row under a header, or one JSON object.
    fn one<T: Serialize>(self, row: &T) -> Result<(), Failure> {
        match self.format {
            Format::Json => self.json(row),
            Format::Csv => self.rows(std::slice::from_ref(row)),
        }
    }

    fn rows<T: Serialize>(mut self, rows: &[T]) -> Result<(), Failure> {
        match self.format {
            Format::Json => self.json(&rows),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut self.sink);
                for r in rows {
                    w.serialize(r)?;
                }
                w.flush()?;
                drop(w);
                self.sink.flush()?;
                Ok(())
            }
        }
    }

    fn raw_csv(mut self, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
        let mut w = csv::Writer::from_writer(&mut self.sink);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        drop(w);
        self.sink.flush()?;
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(mut self, value: &T) -> Result<(), Failure> {
        serde_json::to_writer_pretty(&mut self.sink, value)?;
        writeln!(self.sink)?;
        self.sink.flush()?;
        Ok(())
    }
}

fn read_matrix(path: &PathBuf) -> Result<BitMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(BitMatrix::parse(&text)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = Output::open(cli.format, &cli.out)?;
    match cli.command {
        Command::Gen { net } => {
            let set = net.point_set()?;
            let d = Rational::from_integer((1u64 << set.scale()).into());
            let rows: Vec<PointRow> = set
                .points()
                .iter()
                .map(|q| PointRow {
                    x: format_rational(&(Rational::from_integer(q.x.into()) / &d)),
                    y: format_rational(&(Rational::from_integer(q.y.into()) / &d)),
                })
                .collect();
            out.rows(&rows)
        }
        Command::Check { n, a, c1_file, c2_file } => {
            let spec = match (c1_file, c2_file) {
                (Some(f1), Some(f2)) => {
                    let (c1, c2) = (read_matrix(&f1)?, read_matrix(&f2)?);
                    if c1.dim() != n || c2.dim() != n {
                        return Err(Failure::Usage(format!("matrices must be {n}x{n}")));
                    }
                    GeneratorSpec::custom(c1, c2)?
                }
                _ => match a {
                    Some(bits) => GeneratorSpec::nut_a(&AVector::parse_for(n, &bits)?)?,
                    None => GeneratorSpec::hammersley(n)?,
                },
            };
            let set = generate_net(&spec)?;
            out.one(&CheckRow { n, is_0n2_net: is_0n2_net(&set)?, rank_criterion: rank_criterion(&spec) })
        }
        Command::L2 { net } => out.one(&ExactRow::new("l2_sq", &l2_sq_exact(&net.point_set()?))),
        Command::Linf { net } => out.one(&ExactRow::new("linf", &linf_exact(&net.point_set()?))),
        Command::Lp { net, p, tol } => {
            let r = lp_norm(&net.point_set()?, p, tol)?;
            out.one(&ApproxRow { measure: "lp", mode: "quadrature", p, value: r.as_f64(), error_bound: r.error_bound() })
        }
        Command::Haar { n, a, j1, j2, m1, m2, closed } => {
            let a = match a {
                Some(bits) => AVector::parse_for(n, &bits)?,
                None => AVector::zeros(n)?,
            };
            let idx = HaarIndex::new(j1, j2, m1, m2)?;
            let forms = ClosedForms::new(&a, closed.config());
            let (value, label) = forms.eval(&idx);
            let oracle = diginet::haar::haar_coeff_oracle(&net_from_a(&a), &idx);
            let report = HaarCoefficientReport {
                index: idx,
                oracle_value: oracle.clone(),
                closed_value: value.exact().map(|v| v.to_rational()),
                bound: match value {
                    diginet::haar::ClosedValue::Bound { bound, .. } => Some(bound.to_rational()),
                    diginet::haar::ClosedValue::Exact(_) => None,
                },
                case: label,
                matched: diginet::Dyadic::try_from_rational(&oracle).is_some_and(|o| value.accepts(o)),
            };
            match out.format {
                Format::Json => out.json(&report),
                Format::Csv => out.raw_csv(&HaarCoefficientReport::CSV_HEADER, &[report.csv_row()]),
            }
        }
        Command::Verify { n_cap, closed } => {
            let report = run_verify(n_cap, closed.config())?;
            eprintln!(
                "verify n_cap={n_cap}: {} coefficients checked, {} mismatched, {} J7 count violations, {} J6 magnitude violations, {} formula checks, {} failed",
                report.sweep.checked(),
                report.sweep.mismatched(),
                report.sweep.j7_count_violations,
                report.sweep.j6_magnitude_violations,
                report.checks.len(),
                report.failed_checks().count(),
            );
            let passed = report.passed();
            match out.format {
                Format::Json => out.json(&report)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = verify_rows(&report).into_iter().map(VerifyRow::record).collect();
                    out.raw_csv(&VerifyRow::HEADER, &rows)?
                }
            }
            if passed {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Parseval { net } => {
            if net.n > DEFAULT_PARSEVAL_CAP {
                return Err(Failure::Usage(format!("n = {} exceeds the Parseval cap {DEFAULT_PARSEVAL_CAP}", net.n)));
            }
            let r = parseval_for_set(&net.point_set()?)?;
            out.one(&ParsevalRow { lhs: format_rational(&r.lhs), rhs: format_rational(&r.rhs), equal: r.equal })
        }
        Command::Scaling { p, n_from, n_to, family, seed, tol } => {
            let family: Family = if family == "random" { Family::Random { seed } } else { family.parse()? };
            let rows = run_scaling_study(p, n_from, n_to, &family, tol)?;
            out.rows(&rows)
        }
    }
}

/// 0 on success, 1 when a verification fails, 2 on bad input.
fn exit_code(result: &Result<(), Failure>) -> u8 {
    match result {
        Ok(()) => 0,
        Err(Failure::Check) => 1,
        Err(Failure::Usage(_)) => 2,
    }
}

fn main() -> ExitCode {
    let result = run(Cli::parse());
    if let Err(Failure::Usage(msg)) = &result {
        eprintln!("error: {msg}");
    }
    ExitCode::from(exit_code(&result))
}

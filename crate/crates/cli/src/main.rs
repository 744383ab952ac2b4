//! `geocycle`: scriptable exact checks on quadratic lattices, flats and
//! hyperplane arrangements.
//!
//! Exit codes: 0 ok, 1 a checked claim failed, 2 bad input. Stdout carries one
//! JSON document (or CSV with `--csv`); timings and summaries go to stderr.

use std::fs;
use std::io::Read;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geocycle::arrangement::{
    intersection_matrix, plot_rows, search_parameters, ArrangementSpec, BoostParams, RotationPair,
};
use geocycle::exactla::rational::{compact_json, parse_rational, parse_rational_list};
use geocycle::exactla::{RatVec, RationalMatrix};
use geocycle::isometry::{in_congruence_subgroup, spinor_norm, Isometry};
use geocycle::obstruct::{enumerate_roots, enumerate_roots_in};
use geocycle::qlattice::{k3_block, standard_lattice, LatticeKind, QuadLattice};
use geocycle::signcalc::{sign_report, AdmissibleV};
use geocycle::verify::{run_all, run_check, DEFAULT_SEED};
use geocycle::{Error, NClause};
use serde::Serialize;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "geocycle", version, about = "Exact lattice, flat and arrangement checks")]
struct Cli {
    /// Emit JSON (default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV where the payload is a matrix or table.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a standard lattice; with --classify print its invariants.
    Lattice {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        classify: bool,
    },
    /// Spinor norm of an isometry.
    Spinor(IsometryArgs),
    /// Intersection matrix of the rotated flat/hyperplane family.
    Arrange(ArrangeArgs),
    /// The projected sign matrix of k = R^{e_p} R^v.
    Signs {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// Comma-separated rationals, length q.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Root vectors (self-pairing -2) in a coordinate box.
    Roots {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 1)]
        bound: u32,
        /// Restrict to a K3 block, e.g. `e8:1` or `h:2`.
        #[arg(long)]
        block: Option<String>,
    },
    /// Membership of an integral isometry in the level-N congruence subgroup.
    Congruence {
        #[command(flatten)]
        isometry: IsometryArgs,
        #[arg(long)]
        modulus: u64,
    },
    /// Run the acceptance checks.
    VerifyAll {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run only this check (1-8).
        #[arg(long)]
        only: Option<u8>,
    },
}

#[derive(Args)]
struct LatticeArgs {
    /// bpq, hyperbolic, e8_neg, e8_pos or k3.
    #[arg(long, alias = "lattice")]
    kind: String,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
}

impl LatticeArgs {
    fn build(&self) -> Result<QuadLattice, Error> {
        let kind: LatticeKind = self.kind.parse()?;
        let params = match (self.p, self.q) {
            (Some(p), Some(q)) => Some((p, q)),
            _ => None,
        };
        standard_lattice(kind, params)
    }
}

#[derive(Args)]
struct IsometryArgs {
    /// Isometry JSON file (`-` for stdin).
    #[arg(long, conflicts_with_all = ["matrix", "kind"])]
    isometry: Option<String>,
    /// Rows separated by `;`, entries by `,`.
    #[arg(long, requires = "kind", allow_hyphen_values = true)]
    matrix: Option<String>,
    #[arg(long, alias = "lattice")]
    kind: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
}

impl IsometryArgs {
    fn build(&self) -> Result<Isometry, Error> {
        if let Some(path) = &self.isometry {
            let text = read_input(path)?;
            return serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()));
        }
        let (Some(m), Some(kind)) = (&self.matrix, &self.kind) else {
            return Err(Error::Parse("give --isometry FILE or --matrix with --kind".into()));
        };
        let l = LatticeArgs { kind: kind.clone(), p: self.p, q: self.q }.build()?;
        Isometry::from_matrix(parse_matrix(m)?, &l)
    }
}

#[derive(Args)]
struct ArrangeArgs {
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Search m and t instead of taking them from flags.
    #[arg(long)]
    auto_params: bool,
    /// Boost coefficients `a,b`.
    #[arg(long, default_value = "5/4,3/4")]
    boost: String,
    #[arg(long)]
    m: Option<u32>,
    /// Rotation parameter t: (c, s) = ((1 - t^2), -2t) / (1 + t^2).
    #[arg(long)]
    t: Option<String>,
    /// ArrangementSpec JSON file (`-` for stdin); overrides the other flags.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long, value_enum)]
    n_clause: Option<NClauseArg>,
    /// Write (k, tan, lower, upper) rows as CSV to this path.
    #[arg(long)]
    emit_plot_data: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NClauseArg {
    Enforce,
    SkipIfTrivial,
    Skip,
}

impl From<NClauseArg> for NClause {
    fn from(a: NClauseArg) -> Self {
        match a {
            NClauseArg::Enforce => NClause::Enforce,
            NClauseArg::SkipIfTrivial => NClause::SkipIfTrivial,
            NClauseArg::Skip => NClause::Skip,
        }
    }
}

impl ArrangeArgs {
    fn build(&self) -> Result<ArrangementSpec, Error> {
        let mut spec = if let Some(path) = &self.spec {
            let s: ArrangementSpec =
                serde_json::from_str(&read_input(path)?).map_err(|e| Error::Parse(e.to_string()))?;
            s.validate()?;
            s
        } else {
            let need = |x: Option<usize>, name: &str| x.ok_or_else(|| Error::MissingParams(name.into()));
            let (p, q, n) = (need(self.p, "p")?, need(self.q, "q")?, need(self.n, "n")?);
            let parts = parse_rational_list(&self.boost)?;
            let [a, b] = <[_; 2]>::try_from(parts).map_err(|_| Error::Parse("--boost expects a,b".into()))?;
            let boost = BoostParams::new(a, b)?;
            if self.auto_params {
                let (m, t) = search_parameters(p, q, n, &boost)?;
                ArrangementSpec::new(p, q, boost, m, RotationPair::from_t(&t)?, n)?
            } else {
                let m = self.m.ok_or_else(|| Error::MissingParams("m (or --auto-params)".into()))?;
                let t = self.t.as_deref().ok_or_else(|| Error::MissingParams("t (or --auto-params)".into()))?;
                ArrangementSpec::new(p, q, boost, m, RotationPair::from_t(&parse_rational(t)?)?, n)?
            }
        };
        if let Some(c) = self.n_clause {
            spec.n_clause = c.into();
        }
        Ok(spec)
    }
}

fn read_input(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))
    }
}

fn parse_matrix(s: &str) -> Result<RationalMatrix, Error> {
    let rows: Vec<RatVec> = s.split(';').map(parse_rational_list).collect::<Result<_, _>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    RationalMatrix::from_rows(cols, &rows)
}

fn matrix_json(m: &RationalMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array(m.row(i).iter().map(compact_json).collect())).collect())
}

fn csv_rows<T: ToString>(rows: impl IntoIterator<Item = Vec<T>>) -> String {
    rows.into_iter()
        .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(",") + "\n")
        .collect()
}

fn matrix_csv(m: &RationalMatrix) -> String {
    csv_rows((0..m.nrows()).map(|i| {
        m.row(i).iter().map(|x| geocycle::exactla::rational::format_rational(x)).collect::<Vec<_>>()
    }))
}

enum Payload {
    Json(Value),
    Text(String),
}

struct Outcome {
    payload: Payload,
    /// A checked claim failed.
    failed: bool,
}

impl Outcome {
    fn ok(payload: Payload) -> Self {
        Self { payload, failed: false }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

#[derive(Serialize)]
struct ClassOut {
    signature: [usize; 2],
    parity: geocycle::Parity,
    unimodular: bool,
}

#[derive(Serialize)]
struct LatticeOut {
    name: Option<String>,
    rank: usize,
    gram: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct SignsOut {
    matrix: Value,
    det: Value,
    claim_holds: bool,
}

#[derive(Serialize)]
struct ArrangeOut {
    spec: ArrangementSpec,
    matrix: geocycle::arrangement::IntersectionMatrix,
}

#[derive(Serialize)]
struct CongruenceOut {
    modulus: u64,
    member: bool,
}

#[derive(Serialize)]
struct VerifyOut {
    seed: u64,
    passed: bool,
    checks: Vec<geocycle::verify::CheckOutcome>,
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let csv = cli.csv;
    match &cli.command {
        Command::Lattice { lattice, classify } => {
            let l = lattice.build()?;
            if *classify {
                let c = l.classify();
                let out = ClassOut { signature: [c.signature.0, c.signature.1], parity: c.parity, unimodular: c.unimodular };
                return Ok(Outcome::ok(Payload::Json(to_value(&out))));
            }
            if csv {
                return Ok(Outcome::ok(Payload::Text(csv_rows(l.gram().to_vec()))));
            }
            let out = LatticeOut { name: l.name().map(str::to_string), rank: l.rank(), gram: l.gram().to_vec() };
            Ok(Outcome::ok(Payload::Json(to_value(&out))))
        }
        Command::Spinor(args) => {
            let g = args.build()?;
            Ok(Outcome::ok(Payload::Json(to_value(&spinor_norm(&g)))))
        }
        Command::Congruence { isometry, modulus } => {
            let g = isometry.build()?;
            let member = in_congruence_subgroup(&g, *modulus)?;
            Ok(Outcome::ok(Payload::Json(to_value(&CongruenceOut { modulus: *modulus, member }))))
        }
        Command::Signs { p, q, v } => {
            let v = AdmissibleV::new(*p, *q, parse_rational_list(v)?)?;
            let r = sign_report(*p, *q, &v)?;
            let payload = if csv {
                Payload::Text(matrix_csv(&r.matrix))
            } else {
                Payload::Json(to_value(&SignsOut {
                    matrix: matrix_json(&r.matrix),
                    det: compact_json(&r.det),
                    claim_holds: r.claim_holds,
                }))
            };
            Ok(Outcome { payload, failed: !r.claim_holds })
        }
        Command::Arrange(args) => {
            let spec = args.build()?;
            let m = intersection_matrix(&spec)?;
            if let Some(path) = &args.emit_plot_data {
                let mut text = String::from("k,tan,lower,upper\n");
                text.push_str(&csv_rows(plot_rows(&spec).into_iter().map(|r| r.to_vec())));
                fs::write(path, text).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            }
            let failed = !(m.lower_triangular && m.shift_consistent);
            let payload =
                if csv { Payload::Text(m.to_csv()) } else { Payload::Json(to_value(&ArrangeOut { spec, matrix: m })) };
            Ok(Outcome { payload, failed })
        }
        Command::Roots { lattice, bound, block } => {
            let l = lattice.build()?;
            let roots = match block {
                None => enumerate_roots(&l, *bound),
                Some(b) => {
                    let (name, idx) = b.split_once(':').ok_or_else(|| Error::Parse(format!("bad block {b}")))?;
                    let idx: usize = idx.parse().map_err(|_| Error::Parse(format!("bad block {b}")))?;
                    if l.rank() != 22 {
                        return Err(Error::Parse("--block applies to the k3 lattice".into()));
                    }
                    let range = k3_block(name, idx).ok_or_else(|| Error::Parse(format!("unknown block {b}")))?;
                    enumerate_roots_in(&l, &range.collect::<Vec<_>>(), *bound)?
                }
            };
            eprintln!("{} roots", roots.len());
            let coords: Vec<Vec<i64>> = roots.into_iter().map(|r| r.coords).collect();
            let payload = if csv { Payload::Text(csv_rows(coords)) } else { Payload::Json(to_value(&coords)) };
            Ok(Outcome::ok(payload))
        }
        Command::VerifyAll { seed, only } => {
            let checks = match only {
                Some(id) => vec![run_check(*id, *seed).ok_or_else(|| Error::Parse(format!("no check {id}")))?],
                None => run_all(*seed),
            };
            for c in &checks {
                eprintln!("{}", c.line());
            }
            let passed = checks.iter().all(|c| c.passed);
            Ok(Outcome { payload: Payload::Json(to_value(&VerifyOut { seed: *seed, passed, checks })), failed: !passed })
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("GEOCYCLE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let start = Instant::now();
    let result = run(&cli);
    eprintln!("elapsed: {} ms", start.elapsed().as_millis());
    match result {
        Ok(out) => {
            match out.payload {
                Payload::Json(v) => println!("{}", serde_json::to_string(&v).expect("json")),
                Payload::Text(t) => print!("{t}"),
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

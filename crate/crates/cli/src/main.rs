use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use padic_sos::certifier::{certify_sos4, Verdict};
use padic_sos::json::{parse_rational, to_value, SCHEMA};
use padic_sos::newton_polygon::{eisenstein_irreducible, factor_degree_divisor, newton_diagram};
use padic_sos::padic::{is_square_in_q2, padic_sqrt, unit_mod8, valuation, DEFAULT_PRECISION};
use padic_sos::ratpoly::{
    count_distinct_and_real_roots, discriminant, hankel_matrix, is_positive_on_reals,
    is_squarefree, power_sums, rank_signature, rational_to_string, sturm_real_root_count,
};
use padic_sos::reduction::{
    algorithm6, algorithm9, algorithm_n, gr4_reduce, make_dos, make_fkn, nos_reduce_with,
    picky_reduce, reduce_dispatch, Alg9Outcome, DispatchOutcome, NosBudget, PickyOutcome,
    DEFAULT_ALG9_CAP,
};
use padic_sos::text::parse_poly;
use padic_sos::{Error, RatPoly, Rational};

#[derive(Parser)]
#[command(
    name = "padic-sos",
    version,
    about = "Certify sums of four squares of rational polynomials via 2-adic criteria"
)]
struct Cli {
    /// Write the JSON document to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PolyArgs {
    /// Polynomial as a JSON coefficient array or an expression in x.
    #[arg(long, conflicts_with = "poly_file")]
    poly: Option<String>,
    /// File holding the polynomial in either accepted form.
    #[arg(long)]
    poly_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Alg6,
    Algn,
    Alg9,
    Nos,
    Gr4,
    Picky,
}

#[derive(Subcommand)]
enum Command {
    /// Strict positivity on the real line via the Hankel signature.
    Positivity(PolyArgs),
    /// Power sums, Hankel matrix, rank and signature.
    Hankel(PolyArgs),
    /// Number of real roots by a Sturm chain.
    Sturm(PolyArgs),
    /// Discriminant as the resultant of f and f'.
    Discriminant(PolyArgs),
    /// Newton diagram at 2, purity, and the factor-degree divisor.
    NewtonPolygon(PolyArgs),
    /// Whether a rational is a square in Q_2.
    PadicSquare {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Square root in Q_2 to a given number of digits.
    PadicSqrt {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u32,
    },
    /// Three-valued sum-of-four-squares certificate.
    Sos4Certify {
        #[command(flatten)]
        poly: PolyArgs,
        /// Split f = A^2 + c given as "A:c".
        #[arg(long, allow_hyphen_values = true)]
        witness: Option<String>,
    },
    /// Find h with f - h^2 certified a sum of four squares.
    Reduce {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Iteration cap for alg9.
        #[arg(long, default_value_t = DEFAULT_ALG9_CAP)]
        cap: u32,
        /// Largest odd N tried by nos.
        #[arg(long)]
        budget: Option<u64>,
        /// Split f = A^2 + c given as "A:c" (alg9).
        #[arg(long, allow_hyphen_values = true)]
        witness: Option<String>,
    },
    /// Run alg9 on the counterexample family f_{k,N}.
    Alg9Demo {
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long = "N", default_value_t = 65)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_ALG9_CAP)]
        cap: u32,
    },
    /// Generate f_{k,N} (with --k and --N) or g^2 + 8a - 1 (with --g and --a).
    Family {
        #[arg(long)]
        k: Option<u32>,
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
        #[arg(long)]
        a: Option<u64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Positivity(_) => "positivity",
            Command::Hankel(_) => "hankel",
            Command::Sturm(_) => "sturm",
            Command::Discriminant(_) => "discriminant",
            Command::NewtonPolygon(_) => "newton-polygon",
            Command::PadicSquare { .. } => "padic-square",
            Command::PadicSqrt { .. } => "padic-sqrt",
            Command::Sos4Certify { .. } => "sos4-certify",
            Command::Reduce { .. } => "reduce",
            Command::Alg9Demo { .. } => "alg9-demo",
            Command::Family { .. } => "family",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Inconclusive,
    NonTermination,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Inconclusive => "inconclusive",
            Status::NonTermination => "non-termination",
        }
    }

    fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            _ => 2,
        }
    }
}

type Outcome = Result<(Status, Value), Error>;

fn read_poly(args: &PolyArgs) -> Result<RatPoly, Error> {
    match (&args.poly, &args.poly_file) {
        (Some(text), _) => parse_poly(text),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
                pos: 0,
                msg: format!("cannot read {}: {e}", path.display()),
            })?;
            parse_poly(&text)
        }
        (None, None) => Err(Error::Precondition("one of --poly or --poly-file is required".into())),
    }
}

fn parse_witness(s: &str) -> Result<(RatPoly, Rational), Error> {
    let (a, c) = s.rsplit_once(':').ok_or_else(|| Error::Parse {
        pos: 0,
        msg: "witness must have the form A:c".into(),
    })?;
    Ok((parse_poly(a)?, parse_rational(c)?))
}

fn ok(v: Value) -> Outcome {
    Ok((Status::Ok, v))
}

fn run(command: &Command) -> Outcome {
    match command {
        Command::Positivity(p) => ok(to_value(&is_positive_on_reals(&read_poly(p)?))),
        Command::Hankel(p) => {
            let f = read_poly(p)?;
            let m = hankel_matrix(&f)?;
            let (rank, signature) = rank_signature(&m);
            let (distinct, real) = count_distinct_and_real_roots(&f)?;
            let rows: Vec<Vec<String>> = m
                .entries()
                .iter()
                .map(|r| r.iter().map(rational_to_string).collect())
                .collect();
            let sums: Vec<String> = power_sums(&f)?.iter().map(rational_to_string).collect();
            ok(to_value(&json!({
                "power_sums": sums,
                "matrix": rows,
                "rank": rank,
                "signature": signature,
                "distinct_roots": distinct,
                "real_roots": real,
            })))
        }
        Command::Sturm(p) => {
            let n = sturm_real_root_count(&read_poly(p)?)?;
            ok(to_value(&json!({ "real_roots": n })))
        }
        Command::Discriminant(p) => {
            let f = read_poly(p)?;
            let d = discriminant(&f)?;
            ok(to_value(&json!({
                "discriminant": rational_to_string(&d),
                "squarefree": is_squarefree(&f),
            })))
        }
        Command::NewtonPolygon(p) => {
            let f = read_poly(p)?;
            if f.is_zero() {
                return Err(Error::ZeroPolynomial);
            }
            let d = newton_diagram(&f);
            ok(to_value(&json!({
                "diagram": d,
                "pure": d.is_pure(),
                "eisenstein_irreducible": eisenstein_irreducible(&f),
                "factor_degree_divisor": factor_degree_divisor(&d).ok(),
            })))
        }
        Command::PadicSquare { q } => {
            let q = parse_rational(q)?;
            ok(to_value(&json!({
                "q": rational_to_string(&q),
                "valuation": valuation(&q),
                "unit_mod8": unit_mod8(&q),
                "square": is_square_in_q2(&q),
            })))
        }
        Command::PadicSqrt { q, precision } => {
            ok(to_value(&padic_sqrt(&parse_rational(q)?, *precision)?))
        }
        Command::Sos4Certify { poly, witness } => {
            let f = read_poly(poly)?;
            let w = witness.as_deref().map(parse_witness).transpose()?;
            let cert = certify_sos4(&f, w.as_ref().map(|(a, c)| (a, c)))?;
            let status = if cert.verdict == Verdict::Inconclusive {
                Status::Inconclusive
            } else {
                Status::Ok
            };
            Ok((status, to_value(&cert)))
        }
        Command::Reduce {
            poly,
            method,
            cap,
            budget,
            witness,
        } => {
            let f = read_poly(poly)?;
            let w = witness.as_deref().map(parse_witness).transpose()?;
            reduce(&f, *method, *cap, *budget, w)
        }
        Command::Alg9Demo { k, n, cap } => {
            let (f, a, c) = make_fkn(*k, *n)?;
            alg9(&f, *cap, Some((&a, &c)))
        }
        Command::Family { k, n, g, a } => family(*k, *n, g.as_deref(), *a),
    }
}

fn alg9(f: &RatPoly, cap: u32, w: Option<(&RatPoly, &Rational)>) -> Outcome {
    let out = algorithm9(f, cap, w)?;
    let status = match out {
        Alg9Outcome::Reduced(_) => Status::Ok,
        Alg9Outcome::NonTermination(_) => Status::NonTermination,
    };
    Ok((status, to_value(&out)))
}

fn reduce(
    f: &RatPoly,
    method: MethodArg,
    cap: u32,
    budget: Option<u64>,
    w: Option<(RatPoly, Rational)>,
) -> Outcome {
    let w = w.as_ref().map(|(a, c)| (a, c));
    match method {
        MethodArg::Auto => {
            let out = reduce_dispatch(f)?;
            let status = match out {
                DispatchOutcome::Reduced(_) => Status::Ok,
                DispatchOutcome::Inconclusive(_) => Status::Inconclusive,
            };
            Ok((status, to_value(&out)))
        }
        MethodArg::Alg6 => ok(to_value(&algorithm6(f)?)),
        MethodArg::Algn => ok(to_value(&algorithm_n(f)?)),
        MethodArg::Alg9 => alg9(f, cap, w),
        MethodArg::Nos => {
            let mut b = NosBudget::default();
            if let Some(n) = budget {
                b.max_n = n;
            }
            ok(to_value(&nos_reduce_with(f, b)?))
        }
        MethodArg::Gr4 => ok(to_value(&gr4_reduce(f)?)),
        MethodArg::Picky => {
            let out = picky_reduce(f)?;
            let status = match out {
                PickyOutcome::Reduced(_) => Status::Ok,
                _ => Status::Inconclusive,
            };
            Ok((status, to_value(&out)))
        }
    }
}

fn family(k: Option<u32>, n: Option<u64>, g: Option<&str>, a: Option<u64>) -> Outcome {
    let (f, wa, wc) = match (k, n, g, a) {
        (_, Some(n), None, None) => make_fkn(k.unwrap_or(0), n)?,
        (None, None, Some(g), Some(a)) => make_dos(&parse_poly(g)?, a)?,
        _ => {
            return Err(Error::Precondition(
                "use --k and --N for f_{k,N}, or --g and --a for g^2 + 8a - 1".into(),
            ))
        }
    };
    ok(to_value(&json!({
        "polynomial": f,
        "human": f.to_string(),
        "witness": { "a": wa, "c": rational_to_string(&wc) },
    })))
}

fn emit(out: &Option<PathBuf>, doc: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(doc).expect("serializable") + "\n";
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = cli.command.name();
    let (doc, code) = match run(&cli.command) {
        Ok((status, result)) => (
            json!({ "schema": SCHEMA, "command": name, "status": status.as_str(), "result": result }),
            status.exit_code(),
        ),
        Err(e) => {
            eprintln!("error: {e}");
            (
                json!({ "schema": SCHEMA, "command": name, "status": "error", "message": e.to_string() }),
                1,
            )
        }
    };
    if let Err(msg) = emit(&cli.out, &doc) {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use logmono::boundforge::{self, BoundKind, ForgeError};
use logmono::certify::{self, Certificate, CertifyError, RatioEvidence};
use logmono::exactnum::{QuadNum, Sign};
use logmono::expr::parse_ratfun;
use logmono::logcheck::{self, CheckError, Direction, RangeVerdict, Strictness};
use logmono::ratfun::RatFun;
use logmono::reproduce::{self, Report};
use logmono::sequences::{builtin, parse_spec, SeqError, SequenceSpec, TermCache};
use serde::Serialize;

const EXIT_REFUTED: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_GUARD: u8 = 4;

#[derive(Parser)]
#[command(name = "logmono", version, about = "Exact log-behavior checks and certificates for combinatorial sequences")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print exact terms of a sequence.
    Gen {
        /// Builtin name or path to a DSL file.
        seq: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Exponent of the generalized harmonic numbers.
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        json: bool,
    },
    /// Check a log-behavior predicate on a range of middle indices.
    Check {
        predicate: Predicate,
        seq: String,
        #[arg(long, default_value_t = 2)]
        from: i64,
        #[arg(long, default_value_t = 40)]
        to: i64,
        /// Order for `order-k`; root index for `initial`.
        #[arg(long, default_value_t = 2)]
        k: i64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Use weak inequalities (order-k and the plain checks default to weak).
        #[arg(long)]
        weak: bool,
        #[arg(long)]
        strict: bool,
        /// Direction for `initial`.
        #[arg(long, value_enum, default_value_t = Dir::Concave)]
        dir: Dir,
    },
    /// Build a certificate for one theorem.
    Certify {
        theorem: Theorem,
        seq: String,
        /// Bound g (thm-pos) or h (thm-neg), over Q or Q(sqrt(d)).
        #[arg(long)]
        bound: Option<String>,
        /// Theorem threshold N: the claim is about n >= N.
        #[arg(long)]
        from: Option<i64>,
        /// Floor for thm-neg (default 3u/4).
        #[arg(long)]
        floor: Option<String>,
        /// Join with an exact ratio check from this middle index.
        #[arg(long)]
        stitch: Option<i64>,
        /// Root index k for the root criteria.
        #[arg(long, default_value_t = 1)]
        k: i64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Last middle index of the finite ratio evidence for root criteria.
        #[arg(long, default_value_t = 2000)]
        ratio_end: i64,
        /// Last middle index of the exact root check.
        #[arg(long, default_value_t = 60)]
        desk_end: i64,
    },
    /// Construct a bound for a three-term sequence.
    Forge {
        seq: String,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
    },
    /// Run the built-in reproduction suite.
    Reproduce {
        /// Claim id or id prefix, e.g. `domb` or `harmonic.m2`.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        /// Also write report.json and report.md here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Predicate {
    Logconcave,
    Logconvex,
    OrderK,
    RatioLogconcave,
    RatioLogconvex,
    RootLogconcave,
    RootLogconvex,
    Initial,
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    ThmPos,
    ThmNeg,
    RootConcave,
    RootConvex,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Concave,
    Convex,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Lower,
    Upper,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Json,
}

/// A failure with its exit code.
struct Fail(u8, String);

type Res = Result<u8, Fail>;

fn input(e: impl ToString) -> Fail {
    Fail(EXIT_INPUT, e.to_string())
}

fn from_check(e: CheckError) -> Fail {
    match e {
        CheckError::GuardExceeded { .. } => Fail(EXIT_GUARD, e.to_string()),
        CheckError::NonPositive { .. } => Fail(EXIT_REFUTED, e.to_string()),
        _ => input(e),
    }
}

fn from_certify(e: CertifyError) -> Fail {
    match e {
        CertifyError::Check(c) => from_check(c),
        CertifyError::Seq(_) | CertifyError::NotThreeTerm(_) | CertifyError::BadThreshold { .. } => input(e),
        _ => Fail(EXIT_REFUTED, e.to_string()),
    }
}

fn resolve(seq: &str, m: u32) -> Result<SequenceSpec, Fail> {
    let path = Path::new(seq);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(input)?;
        return parse_spec(&text).map_err(input);
    }
    builtin(seq, m).map_err(|e| match e {
        SeqError::Unknown(_) => input(format!("{e}; builtins: {}", logmono::sequences::builtin_names().join(", "))),
        _ => input(e),
    })
}

fn print_json<T: Serialize>(x: &T) {
    println!("{}", serde_json::to_string_pretty(x).expect("serializable"));
}

fn bound_arg(text: &Option<String>, what: &str) -> Result<RatFun<QuadNum>, Fail> {
    let t = text.as_deref().ok_or_else(|| input(format!("--bound is required for {what}")))?;
    parse_ratfun(t).map_err(|e| input(format!("bad bound: {e}")))
}

fn gen(seq: &str, count: usize, m: u32, json: bool) -> Res {
    let spec = resolve(seq, m)?;
    let mut cache = TermCache::new(spec);
    let first = cache.first_index();
    let terms = cache.range(first, first + count as i64 - 1).map_err(input)?;
    let strs: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
    if json {
        print_json(&serde_json::json!({ "sequence": cache.spec().name, "first_index": first, "terms": strs }));
    } else {
        println!("{}", strs.join(" "));
    }
    Ok(0)
}

fn verdict_code(vs: &[RangeVerdict]) -> u8 {
    if vs.iter().all(|v| v.holds) { 0 } else { EXIT_REFUTED }
}

#[allow(clippy::too_many_arguments)]
fn check(p: Predicate, seq: &str, from: i64, to: i64, k: i64, m: u32, weak: bool, strict: bool, dir: Dir) -> Res {
    let mut c = TermCache::new(resolve(seq, m)?);
    // ratio and root predicates default to strict, the plain ones to weak
    let s = |default_strict: bool| Strictness::from_flag(if weak { false } else { strict || default_strict });
    let one = |v: Result<RangeVerdict, CheckError>| -> Res {
        let v = v.map_err(from_check)?;
        print_json(&v);
        Ok(verdict_code(std::slice::from_ref(&v)))
    };
    match p {
        Predicate::Logconcave => one(logcheck::check_terms(&mut c, from, to, Direction::Concave, s(false))),
        Predicate::Logconvex => one(logcheck::check_terms(&mut c, from, to, Direction::Convex, s(false))),
        Predicate::RatioLogconcave => one(logcheck::check_ratio(&mut c, from, to, Direction::Concave, s(true))),
        Predicate::RatioLogconvex => one(logcheck::check_ratio(&mut c, from, to, Direction::Convex, s(true))),
        Predicate::RootLogconcave => one(logcheck::check_root(&mut c, from, to, Direction::Concave, s(true))),
        Predicate::RootLogconvex => one(logcheck::check_root(&mut c, from, to, Direction::Convex, s(true))),
        Predicate::OrderK => {
            let k = usize::try_from(k).map_err(|_| input("--k must be nonnegative"))?;
            let vs = logcheck::check_order_k(&mut c, k, from, to, strict && !weak).map_err(from_check)?;
            print_json(&vs);
            Ok(verdict_code(&vs))
        }
        Predicate::Initial => {
            let d = match dir {
                Dir::Concave => Direction::Concave,
                Dir::Convex => Direction::Convex,
            };
            let b = certify::initial_condition(&mut c, k, d).map_err(from_certify)?;
            print_json(&b);
            Ok(if b.holds { 0 } else { EXIT_REFUTED })
        }
    }
}

/// Finite ratio evidence starting as early as possible at or after middle
/// `k + 2`, restarting past each failure while the root check can still
/// cover the gap.
fn finite_evidence(c: &mut TermCache, k: i64, dir: Direction, ratio_end: i64, desk_end: i64) -> Result<RangeVerdict, Fail> {
    let mut start = k + 2;
    loop {
        let v = logcheck::check_ratio(c, start, ratio_end, dir, Strictness::Strict).map_err(from_check)?;
        match v.first_failure {
            None => return Ok(v),
            Some(at) if at + 1 < desk_end && at + 1 <= ratio_end => start = at + 1,
            Some(at) => return Err(Fail(EXIT_REFUTED, format!("{} fails at middle index {at}", v.predicate))),
        }
    }
}

fn theorem_certificate(
    c: &mut TermCache,
    thm: Theorem,
    bound: &Option<String>,
    floor: &Option<String>,
    from: Option<i64>,
    stitch: Option<i64>,
) -> Result<Certificate, Fail> {
    let from = from.ok_or_else(|| input("--from is required"))?;
    let cert = match thm {
        Theorem::ThmPos => certify::certify_ratio_logconcave_pos(c, &bound_arg(bound, "thm-pos")?, from),
        _ => {
            let floor = match floor {
                Some(f) => Some(parse_ratfun(f).map_err(|e| input(format!("bad floor: {e}")))?),
                None => None,
            };
            certify::certify_ratio_logconcave_neg(c, &bound_arg(bound, "thm-neg")?, from, floor.as_ref())
        }
    }
    .map_err(from_certify)?;
    match stitch {
        Some(m) => certify::stitch(c, cert, m).map_err(from_certify),
        None => Ok(cert),
    }
}

#[allow(clippy::too_many_arguments)]
fn certify_cmd(
    thm: Theorem,
    seq: &str,
    bound: &Option<String>,
    from: Option<i64>,
    floor: &Option<String>,
    stitch: Option<i64>,
    k: i64,
    m: u32,
    ratio_end: i64,
    desk_end: i64,
) -> Res {
    let mut c = TermCache::new(resolve(seq, m)?);
    let cert = match thm {
        Theorem::ThmPos | Theorem::ThmNeg => theorem_certificate(&mut c, thm, bound, floor, from, stitch)?,
        Theorem::RootConcave | Theorem::RootConvex => {
            let dir = match thm {
                Theorem::RootConcave => Direction::Concave,
                _ => Direction::Convex,
            };
            let evidence = if bound.is_some() {
                // a symbolic ratio certificate from the theorem matching the sign of v
                let which = match certify::v_sign(&c) {
                    Some(Sign::Positive) => Theorem::ThmPos,
                    Some(Sign::Negative) => Theorem::ThmNeg,
                    _ => return Err(input("a ratio bound needs a three-term sequence with sign-definite v")),
                };
                RatioEvidence::Certificate(Box::new(theorem_certificate(&mut c, which, bound, floor, from, stitch)?))
            } else {
                RatioEvidence::Finite(finite_evidence(&mut c, k, dir, ratio_end, desk_end)?)
            };
            certify::certify_root(&mut c, k, dir, evidence, desk_end).map_err(from_certify)?
        }
    };
    print_json(&cert);
    eprintln!(
        "certified: {:?} from {} ({})",
        cert.claim.property,
        cert.conclusion_from,
        if cert.tail { "all n" } else { "finite range" }
    );
    Ok(0)
}

fn forge_cmd(seq: &str, kind: Kind, max_depth: usize) -> Res {
    let spec = resolve(seq, 1)?;
    let kind = match kind {
        Kind::Lower => BoundKind::Lower,
        Kind::Upper => BoundKind::Upper,
    };
    match boundforge::forge(&spec, kind, max_depth) {
        Ok(o) => {
            print_json(&serde_json::json!({
                "bound": o.bound.to_string(),
                "certificate": o.certificate,
                "trace": o.trace,
            }));
            Ok(0)
        }
        Err(b) => {
            let (e, trace) = *b;
            print_json(&trace);
            let code = match e {
                ForgeError::NotThreeTerm(_) | ForgeError::KindMismatch { .. } => EXIT_INPUT,
                _ => EXIT_REFUTED,
            };
            Err(Fail(code, e.to_string()))
        }
    }
}

fn reproduce_cmd(only: Option<&str>, format: Format, out_dir: Option<&Path>) -> Res {
    if let Some(p) = only {
        if reproduce::select(Some(p)).is_empty() {
            return Err(input(format!("no claim matches {p:?}")));
        }
    }
    let stamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let report = Report::new(reproduce::run(only), stamp);
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    let md = report.to_markdown();
    match format {
        Format::Json => println!("{json}"),
        Format::Markdown => print!("{md}"),
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(input)?;
        std::fs::write(dir.join("report.json"), &json).map_err(input)?;
        std::fs::write(dir.join("report.md"), &md).map_err(input)?;
    }
    let failed: Vec<&str> = report
        .claims
        .iter()
        .filter(|c| c.status == reproduce::Status::Failed)
        .map(|c| c.id.as_str())
        .collect();
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("failed claims: {}", failed.join(", "));
        Ok(EXIT_REFUTED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Gen { seq, count, m, json } => gen(seq, *count, *m, *json),
        Cmd::Check { predicate, seq, from, to, k, m, weak, strict, dir } => {
            check(*predicate, seq, *from, *to, *k, *m, *weak, *strict, *dir)
        }
        Cmd::Certify { theorem, seq, bound, from, floor, stitch, k, m, ratio_end, desk_end } => {
            certify_cmd(*theorem, seq, bound, *from, floor, *stitch, *k, *m, *ratio_end, *desk_end)
        }
        Cmd::Forge { seq, kind, max_depth } => forge_cmd(seq, *kind, *max_depth),
        Cmd::Reproduce { only, format, out_dir } => reproduce_cmd(only.as_deref(), *format, out_dir.as_deref()),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

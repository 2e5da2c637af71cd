use std::collections::HashSet;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

use qstirling::{
    block_to_half_edge, cdes, closed_form_coefficient, decode_block_tree, des, encode_block_tree,
    ends, enumerate_block_trees, enumerate_code_pairs, enumerate_half_edge_trees, enumerate_words,
    half_edge_to_block, is_log_concave, is_quasi_stirling, is_real_rooted, is_unimodal,
    quasi_stirling_polynomial, special_counts, stirling_reduction, tree_ends, tree_to_word,
    verify_identity, visit_trees, word_count, word_to_tree, Error, HalfEdgeTree, IntPoly, Multiset,
    PolyMethod, Word,
};

const DES_NOTE: &str =
    "note: des counts strict descents plus one, so every polynomial here is divisible by t";

/// Exact verification tool for quasi-Stirling permutation combinatorics:
/// descent polynomials, the closed-form series identity, the word/tree and
/// block-tree/code correspondences, and polynomial root analysis.
#[derive(Parser)]
#[command(name = "qstirling", version, after_help = DES_NOTE)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the descent polynomial over quasi-Stirling words
    Poly(PolyArgs),
    /// Compare series coefficients with the closed form, term by term
    #[command(name = "verify-identity")]
    VerifyIdentity(VerifyArgs),
    /// Round-trip the structural correspondences and compare cardinalities
    Bijections(BijectionsArgs),
    /// Real-rootedness, log-concavity, unimodality, and the Stirling reduction
    Analyze(AnalyzeArgs),
    /// Object counts for one multiset
    Count(CountArgs),
    /// Run identity, analysis, and bijection checks over every multiset up to a size
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Words,
    Trees,
    Both,
}

#[derive(clap::Args)]
struct PolyArgs {
    /// Multiplicities "k1,k2,...,kn"
    #[arg(long)]
    multiset: String,
    #[arg(long, value_enum, default_value = "both")]
    method: Method,
    /// Enumeration size cap (overrides QSTIRLING_MAX_K; default 9)
    #[arg(long)]
    max_size: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    multiset: String,
    /// Number of series coefficients to check (m = 0..=terms)
    #[arg(long, default_value_t = 10)]
    terms: usize,
    #[arg(long)]
    max_size: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(clap::Args)]
struct BijectionsArgs {
    #[arg(long)]
    multiset: String,
    /// Half-edge budget range "a..b" (inclusive) or a single value
    #[arg(long, default_value = "0..4")]
    m: String,
    /// Check only the word/tree correspondence
    #[arg(long)]
    phi_only: bool,
    /// Round-trip one word through its tree instead of enumerating
    #[arg(long)]
    spot: Option<String>,
    #[arg(long)]
    max_size: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    #[arg(long)]
    multiset: String,
    #[arg(long)]
    max_size: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(clap::Args)]
struct CountArgs {
    #[arg(long)]
    multiset: String,
    /// Also list per-m object counts over this range
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    max_size: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Largest multiset size K to cover (must stay within the global cap)
    #[arg(long, default_value_t = 6)]
    max_size: u32,
    #[arg(long, default_value_t = 10)]
    terms: usize,
    /// Half-edge budget range for the bijection checks
    #[arg(long, default_value = "0..2")]
    m: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyMultiset
            | Error::InvalidMultiplicity(_)
            | Error::EmptyWord
            | Error::InvalidWordToken(_)
            | Error::WordMismatch(_)
            | Error::NotQuasiStirling
            | Error::Parse { .. }
            | Error::SizeCap { .. } => Failure::Usage(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

type CmdResult = Result<bool, Failure>;

fn main() -> ExitCode {
    // die silently on closed pipes (`... | head`) instead of panicking;
    // Rust ignores SIGPIPE by default
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Poly(a) => cmd_poly(a),
        Cmd::VerifyIdentity(a) => cmd_verify(a),
        Cmd::Bijections(a) => cmd_bijections(a),
        Cmd::Analyze(a) => cmd_analyze(a),
        Cmd::Count(a) => cmd_count(a),
        Cmd::Sweep(a) => cmd_sweep(a),
    };
    match outcome {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal check failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn global_cap() -> Result<u32, Failure> {
    match std::env::var("QSTIRLING_MAX_K") {
        Ok(s) => {
            let cap: u32 = s
                .parse()
                .map_err(|_| usage(format!("QSTIRLING_MAX_K is not a number: {s:?}")))?;
            if cap == 0 {
                return Err(usage("QSTIRLING_MAX_K must be positive"));
            }
            Ok(cap)
        }
        Err(_) => Ok(9),
    }
}

fn resolve_cap(flag: Option<u32>) -> Result<u32, Failure> {
    match flag {
        Some(0) => Err(usage("--max-size must be positive")),
        Some(c) => Ok(c),
        None => global_cap(),
    }
}

fn parse_multiset(s: &str) -> Result<Multiset, Failure> {
    s.parse::<Multiset>().map_err(Failure::from)
}

fn parse_m_range(s: &str) -> Result<(usize, usize), Failure> {
    let parse_end = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| usage(format!("bad range bound {t:?} in --m")))
    };
    if let Some((a, b)) = s.split_once("..") {
        let lo = parse_end(a)?;
        let hi = parse_end(b)?;
        if hi < lo {
            return Err(usage(format!("empty range --m {s}")));
        }
        Ok((lo, hi))
    } else {
        let m = parse_end(s)?;
        Ok((m, m))
    }
}

fn json_out<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

fn big(b: &BigInt) -> String {
    b.to_string()
}

// --- poly -------------------------------------------------------------------

#[derive(Serialize)]
struct PolyJson {
    multiset: String,
    method: &'static str,
    polynomial: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    methods_agree: Option<bool>,
    des_convention: &'static str,
}

fn cmd_poly(a: PolyArgs) -> CmdResult {
    let spec = parse_multiset(&a.multiset)?;
    let cap = resolve_cap(a.max_size)?;
    let (poly, agree, method) = match a.method {
        Method::Words => (
            quasi_stirling_polynomial(&spec, PolyMethod::Words, cap)?,
            None,
            "words",
        ),
        Method::Trees => (
            quasi_stirling_polynomial(&spec, PolyMethod::Trees, cap)?,
            None,
            "trees",
        ),
        Method::Both => {
            let by_words = quasi_stirling_polynomial(&spec, PolyMethod::Words, cap)?;
            let by_trees = quasi_stirling_polynomial(&spec, PolyMethod::Trees, cap)?;
            let agree = by_words == by_trees;
            (by_words, Some(agree), "both")
        }
    };
    match a.format {
        Format::Text => {
            println!("multiset: {spec}");
            println!("polynomial: {poly}");
            if let Some(agree) = agree {
                println!("methods agree: {agree}");
            }
            println!("{DES_NOTE}");
        }
        Format::Json => json_out(&PolyJson {
            multiset: spec.to_string(),
            method,
            polynomial: poly.to_string(),
            methods_agree: agree,
            des_convention: "strict descents plus one",
        }),
        Format::Csv => return Err(usage("csv output is not available for poly")),
    }
    Ok(agree.unwrap_or(true))
}

// --- verify-identity ----------------------------------------------------------

#[derive(Serialize)]
struct IdentityJson {
    multiset: String,
    #[serde(rename = "K")]
    k: u32,
    n: usize,
    m_max: usize,
    rows: Vec<IdentityRowJson>,
    pass: bool,
}

#[derive(Serialize)]
struct IdentityRowJson {
    m: usize,
    series: String,
    closed_form: String,
    ok: bool,
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let spec = parse_multiset(&a.multiset)?;
    let cap = resolve_cap(a.max_size)?;
    let report = verify_identity(&spec, a.terms, cap)?;
    match a.format {
        Format::Text => {
            println!("multiset: {spec}   K: {}   n: {}", report.k_total, report.n);
            println!("polynomial: {}", report.polynomial);
            println!("methods agree: {}", report.methods_agree);
            println!("{:>4}  {:>16}  {:>16}  ok", "m", "series", "closed form");
            for row in &report.rows {
                println!(
                    "{:>4}  {:>16}  {:>16}  {}",
                    row.m,
                    row.series.to_string(),
                    row.closed_form.to_string(),
                    if row.ok { "yes" } else { "NO" }
                );
            }
            println!("pass: {}", report.pass);
            println!("{DES_NOTE}");
        }
        Format::Json => json_out(&IdentityJson {
            multiset: spec.to_string(),
            k: report.k_total,
            n: report.n,
            m_max: report.m_max,
            rows: report
                .rows
                .iter()
                .map(|r| IdentityRowJson {
                    m: r.m,
                    series: big(&r.series),
                    closed_form: big(&r.closed_form),
                    ok: r.ok,
                })
                .collect(),
            pass: report.pass,
        }),
        Format::Csv => {
            println!("m,series,closed_form,ok");
            for row in &report.rows {
                println!("{},{},{},{}", row.m, row.series, row.closed_form, row.ok);
            }
        }
    }
    Ok(report.pass)
}

// --- bijections -----------------------------------------------------------------

#[derive(Serialize)]
struct SpotJson {
    multiset: String,
    word: String,
    tree: String,
    descents: usize,
    first: String,
    last: String,
    round_trip: bool,
    statistics_match: bool,
    pass: bool,
}

#[derive(Serialize)]
struct BijectionsJson {
    multiset: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    words_trees: Option<PhiJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    rows: Vec<ObjectRowJson>,
    pass: bool,
}

#[derive(Serialize)]
struct PhiJson {
    objects: usize,
    ok: bool,
}

#[derive(Serialize)]
struct ObjectRowJson {
    m: usize,
    block_trees: usize,
    half_edge_trees: usize,
    code_pairs: usize,
    closed_form: String,
    ok: bool,
}

struct PhiOutcome {
    objects: usize,
    failures: Vec<String>,
}

fn check_phi(spec: &Multiset) -> PhiOutcome {
    let mut failures = Vec::new();
    let mut images = HashSet::new();
    visit_trees(spec, &mut |tree| {
        if failures.len() >= 5 {
            return;
        }
        let word = match tree_to_word(tree) {
            Ok(w) => w,
            Err(e) => {
                failures.push(format!("tree {tree}: {e}"));
                return;
            }
        };
        if !is_quasi_stirling(&word) {
            failures.push(format!("tree {tree} maps to non-quasi-Stirling {word}"));
            return;
        }
        match word_to_tree(&word) {
            Ok(back) if &back == tree => {}
            _ => {
                failures.push(format!("round trip failed for tree {tree}"));
                return;
            }
        }
        let stats_ok = des(&word).ok() == Some(cdes(tree)) && ends(&word) == tree_ends(tree);
        if !stats_ok {
            failures.push(format!("statistics differ on tree {tree}"));
            return;
        }
        if !images.insert(word.clone()) {
            failures.push(format!("word {word} produced twice"));
        }
    });
    let qs_words = enumerate_words(spec).filter(is_quasi_stirling).count();
    if images.len() != qs_words {
        failures.push(format!(
            "tree images cover {} of {qs_words} quasi-Stirling words",
            images.len()
        ));
    }
    PhiOutcome {
        objects: qs_words,
        failures,
    }
}

fn cmd_bijections(a: BijectionsArgs) -> CmdResult {
    let spec = parse_multiset(&a.multiset)?;
    let cap = resolve_cap(a.max_size)?;

    if let Some(text) = &a.spot {
        let word: Word = text.parse()?;
        if !word.matches(&spec) {
            return Err(usage(format!(
                "word {word} does not arrange multiset {spec}"
            )));
        }
        let tree = word_to_tree(&word)?;
        let back = tree_to_word(&tree)?;
        let round_trip = back == word;
        let descents = des(&word)?;
        let (first, last) = ends(&word);
        let statistics_match = cdes(&tree) == descents && tree_ends(&tree) == (first, last);
        let pass = round_trip && statistics_match;
        match a.format {
            Format::Text => {
                println!("multiset: {spec}");
                println!("word: {word}");
                println!("tree: {tree}");
                println!("descent statistic: {descents}   first: {first}   last: {last}");
                println!("round trip: {round_trip}");
                println!("statistics preserved: {statistics_match}");
                println!("pass: {pass}");
            }
            Format::Json => json_out(&SpotJson {
                multiset: spec.to_string(),
                word: word.to_string(),
                tree: tree.to_string(),
                descents,
                first: first.to_string(),
                last: last.to_string(),
                round_trip,
                statistics_match,
                pass,
            }),
            Format::Csv => return Err(usage("csv output is not available for bijections")),
        }
        return Ok(pass);
    }

    spec.ensure_within(cap)?;
    let phi = check_phi(&spec);
    let mut failures = phi.failures.clone();

    let mut rows = Vec::new();
    if !a.phi_only {
        let (lo, hi) = parse_m_range(&a.m)?;
        for m in lo..=hi {
            let trees = enumerate_block_trees(&spec, m, cap)?;
            let halves = enumerate_half_edge_trees(&spec, m, cap)?;
            let pairs = enumerate_code_pairs(&spec, m, cap)?;
            let closed = closed_form_coefficient(&spec, m);
            let mut ok = BigInt::from(trees.len()) == closed
                && trees.len() == halves.len()
                && trees.len() == pairs.len();
            let half_set: HashSet<&HalfEdgeTree> = halves.iter().collect();
            for t in &trees {
                let h = block_to_half_edge(&spec, t)?;
                if !half_set.contains(&h) || half_edge_to_block(&h) != *t {
                    ok = false;
                    failures.push(format!("m={m}: wall rewriting failed on {t}"));
                    break;
                }
                let pair = encode_block_tree(&spec, t)?;
                if decode_block_tree(&spec, &pair)? != *t {
                    ok = false;
                    failures.push(format!("m={m}: coding failed on {t}"));
                    break;
                }
            }
            if !ok && failures.len() == phi.failures.len() {
                failures.push(format!("m={m}: cardinalities disagree"));
            }
            rows.push(ObjectRowJson {
                m,
                block_trees: trees.len(),
                half_edge_trees: halves.len(),
                code_pairs: pairs.len(),
                closed_form: big(&closed),
                ok,
            });
        }
    }

    let pass = failures.is_empty();
    match a.format {
        Format::Text => {
            println!("multiset: {spec}");
            println!(
                "words/trees: {} objects, {}",
                phi.objects,
                if phi.failures.is_empty() {
                    "ok"
                } else {
                    "FAILED"
                }
            );
            for row in &rows {
                println!(
                    "m={}: block trees {}, half-edge trees {}, code pairs {}, closed form {}, {}",
                    row.m,
                    row.block_trees,
                    row.half_edge_trees,
                    row.code_pairs,
                    row.closed_form,
                    if row.ok { "ok" } else { "FAILED" }
                );
            }
            for f in &failures {
                println!("failure: {f}");
            }
            println!("pass: {pass}");
        }
        Format::Json => json_out(&BijectionsJson {
            multiset: spec.to_string(),
            words_trees: Some(PhiJson {
                objects: phi.objects,
                ok: phi.failures.is_empty(),
            }),
            rows,
            pass,
        }),
        Format::Csv => return Err(usage("csv output is not available for bijections")),
    }
    Ok(pass)
}

// --- analyze ---------------------------------------------------------------------

#[derive(Serialize)]
struct AnalyzeJson {
    multiset: String,
    polynomial: String,
    all_real: bool,
    all_nonpositive: bool,
    log_concave: bool,
    unimodal: bool,
    #[serde(rename = "corollary_M_prime")]
    corollary_m_prime: String,
    corollary_equal: bool,
}

struct AnalysisOutcome {
    polynomial: IntPoly,
    t_valuation: usize,
    distinct_real_roots: usize,
    all_real: bool,
    all_nonpositive: bool,
    log_concave: bool,
    unimodal: bool,
    m_prime: Multiset,
    equal: bool,
}

impl AnalysisOutcome {
    fn pass(&self) -> bool {
        self.all_real && self.all_nonpositive && self.log_concave && self.unimodal && self.equal
    }
}

fn run_analysis(spec: &Multiset, cap: u32) -> Result<AnalysisOutcome, Failure> {
    let reduction = stirling_reduction(spec, cap)?;
    let root = is_real_rooted(&reduction.polynomial)?;
    let log_concave = is_log_concave(&reduction.polynomial)?;
    let unimodal = is_unimodal(&reduction.polynomial)?;
    Ok(AnalysisOutcome {
        polynomial: reduction.polynomial,
        t_valuation: root.t_valuation,
        distinct_real_roots: root.distinct_real_roots,
        all_real: root.all_real,
        all_nonpositive: root.all_nonpositive,
        log_concave,
        unimodal,
        m_prime: reduction.m_prime,
        equal: reduction.equal,
    })
}

fn cmd_analyze(a: AnalyzeArgs) -> CmdResult {
    let spec = parse_multiset(&a.multiset)?;
    let cap = resolve_cap(a.max_size)?;
    let out = run_analysis(&spec, cap)?;
    match a.format {
        Format::Text => {
            println!("multiset: {spec}");
            println!("polynomial: {}", out.polynomial);
            println!("t valuation: {}", out.t_valuation);
            println!(
                "distinct real roots (squarefree part): {}",
                out.distinct_real_roots
            );
            println!("all real: {}", out.all_real);
            println!("all nonpositive: {}", out.all_nonpositive);
            println!("log-concave: {}", out.log_concave);
            println!("unimodal: {}", out.unimodal);
            println!("reduced multiset: {}", out.m_prime);
            println!("reduction equal: {}", out.equal);
            println!("pass: {}", out.pass());
            println!("{DES_NOTE}");
        }
        Format::Json => json_out(&AnalyzeJson {
            multiset: spec.to_string(),
            polynomial: out.polynomial.to_string(),
            all_real: out.all_real,
            all_nonpositive: out.all_nonpositive,
            log_concave: out.log_concave,
            unimodal: out.unimodal,
            corollary_m_prime: out.m_prime.to_string(),
            corollary_equal: out.equal,
        }),
        Format::Csv => return Err(usage("csv output is not available for analyze")),
    }
    Ok(out.pass())
}

// --- count ------------------------------------------------------------------------

#[derive(Serialize)]
struct CountJson {
    multiset: String,
    arrangements: String,
    quasi_stirling: String,
    descent_counts: Vec<DesCountJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_total: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_top: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    rows: Vec<ObjectCountJson>,
    pass: bool,
}

#[derive(Serialize)]
struct DesCountJson {
    des: usize,
    count: String,
}

#[derive(Serialize)]
struct ObjectCountJson {
    m: usize,
    count: String,
}

fn cmd_count(a: CountArgs) -> CmdResult {
    let spec = parse_multiset(&a.multiset)?;
    let cap = resolve_cap(a.max_size)?;
    let poly = quasi_stirling_polynomial(&spec, PolyMethod::Trees, cap)?;
    let total = poly.eval_at_one();
    let arrangements = word_count(&spec);
    let special = special_counts(&spec);
    let mut pass = true;
    if let Some(expect) = &special.total {
        pass &= expect == &total;
    }
    if let Some(expect) = &special.top_descents {
        pass &= expect == &poly.coeff(spec.n());
    }
    let rows = match &a.m {
        Some(range) => {
            let (lo, hi) = parse_m_range(range)?;
            (lo..=hi)
                .map(|m| ObjectCountJson {
                    m,
                    count: big(&closed_form_coefficient(&spec, m)),
                })
                .collect()
        }
        None => Vec::new(),
    };
    let descent_counts: Vec<DesCountJson> = poly
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !num_traits_is_zero(c))
        .map(|(d, c)| DesCountJson {
            des: d,
            count: big(c),
        })
        .collect();
    match a.format {
        Format::Text => {
            println!("multiset: {spec}");
            println!("arrangements: {arrangements}");
            println!("quasi-stirling words: {total}");
            for d in &descent_counts {
                println!("des={}: {}", d.des, d.count);
            }
            if let Some(expect) = &special.total {
                println!("predicted total: {expect}");
            }
            if let Some(expect) = &special.top_descents {
                println!("predicted top-descent count: {expect}");
            }
            for r in &rows {
                println!(
                    "m={}: {} trees with that many half-edges or blocks",
                    r.m, r.count
                );
            }
            println!("pass: {pass}");
        }
        Format::Json => json_out(&CountJson {
            multiset: spec.to_string(),
            arrangements: big(&arrangements),
            quasi_stirling: big(&total),
            descent_counts,
            predicted_total: special.total.as_ref().map(big),
            predicted_top: special.top_descents.as_ref().map(big),
            rows,
            pass,
        }),
        Format::Csv => return Err(usage("csv output is not available for count")),
    }
    Ok(pass)
}

fn num_traits_is_zero(b: &BigInt) -> bool {
    use num_bigint::Sign;
    b.sign() == Sign::NoSign
}

// --- sweep -------------------------------------------------------------------------

#[derive(Serialize)]
struct SweepJson {
    max_size: u32,
    terms: usize,
    m_lo: usize,
    m_hi: usize,
    multisets: usize,
    rows: Vec<SweepRowJson>,
    pass: bool,
}

#[derive(Serialize, Clone)]
struct SweepRowJson {
    multiset: String,
    identity: bool,
    analysis: bool,
    bijections: bool,
}

fn compositions_up_to(total: u32) -> Vec<Multiset> {
    let mut out = Vec::new();
    let mut parts = Vec::new();
    fn rec(remaining: u32, parts: &mut Vec<u32>, out: &mut Vec<Multiset>) {
        if remaining == 0 {
            out.push(Multiset::new(parts.clone()).expect("parts are positive"));
            return;
        }
        for k in 1..=remaining {
            parts.push(k);
            rec(remaining - k, parts, out);
            parts.pop();
        }
    }
    for k_total in 1..=total {
        rec(k_total, &mut parts, &mut out);
    }
    out
}

fn sweep_one(
    spec: &Multiset,
    terms: usize,
    m_range: (usize, usize),
    cap: u32,
) -> Result<SweepRowJson, Failure> {
    let identity = verify_identity(spec, terms, cap)?.pass;
    let analysis = run_analysis(spec, cap)?.pass();
    let mut bijections = check_phi(spec).failures.is_empty();
    for m in m_range.0..=m_range.1 {
        let trees = enumerate_block_trees(spec, m, cap)?;
        let halves = enumerate_half_edge_trees(spec, m, cap)?;
        let pairs = enumerate_code_pairs(spec, m, cap)?;
        let closed = closed_form_coefficient(spec, m);
        bijections &= BigInt::from(trees.len()) == closed
            && halves.len() == trees.len()
            && pairs.len() == trees.len();
        let half_set: HashSet<&HalfEdgeTree> = halves.iter().collect();
        for t in &trees {
            let h = block_to_half_edge(spec, t)?;
            bijections &= half_set.contains(&h) && half_edge_to_block(&h) == *t;
            let pair = encode_block_tree(spec, t)?;
            bijections &= decode_block_tree(spec, &pair)? == *t;
            if !bijections {
                break;
            }
        }
    }
    Ok(SweepRowJson {
        multiset: spec.to_string(),
        identity,
        analysis,
        bijections,
    })
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let cap = global_cap()?;
    if a.max_size == 0 || a.max_size > cap {
        return Err(usage(format!(
            "--max-size {} outside the global cap {cap} (set QSTIRLING_MAX_K to raise it)",
            a.max_size
        )));
    }
    let m_range = parse_m_range(&a.m)?;
    let specs = compositions_up_to(a.max_size);

    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(specs.len().max(1));
    let chunk = specs.len().div_ceil(workers);
    let mut rows: Vec<SweepRowJson> = Vec::with_capacity(specs.len());
    let results: Vec<Result<Vec<SweepRowJson>, Failure>> = std::thread::scope(|scope| {
        specs
            .chunks(chunk.max(1))
            .map(|batch| {
                scope.spawn(move || {
                    batch
                        .iter()
                        .map(|spec| sweep_one(spec, a.terms, m_range, cap))
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    for r in results {
        rows.extend(r?);
    }

    let identity_ok = rows.iter().filter(|r| r.identity).count();
    let analysis_ok = rows.iter().filter(|r| r.analysis).count();
    let bijections_ok = rows.iter().filter(|r| r.bijections).count();
    let pass =
        identity_ok == rows.len() && analysis_ok == rows.len() && bijections_ok == rows.len();

    match a.format {
        Format::Text => {
            println!(
                "multisets: {}   (K <= {}, terms {}, m {}..{})",
                rows.len(),
                a.max_size,
                a.terms,
                m_range.0,
                m_range.1
            );
            println!("identity: {identity_ok}/{} pass", rows.len());
            println!("analysis: {analysis_ok}/{} pass", rows.len());
            println!("bijections: {bijections_ok}/{} pass", rows.len());
            for r in rows
                .iter()
                .filter(|r| !(r.identity && r.analysis && r.bijections))
            {
                println!(
                    "failure: {} identity={} analysis={} bijections={}",
                    r.multiset, r.identity, r.analysis, r.bijections
                );
            }
            println!("pass: {pass}");
        }
        Format::Json => json_out(&SweepJson {
            max_size: a.max_size,
            terms: a.terms,
            m_lo: m_range.0,
            m_hi: m_range.1,
            multisets: rows.len(),
            rows,
            pass,
        }),
        Format::Csv => {
            println!("multiset,identity,analysis,bijections");
            for r in &rows {
                println!(
                    "\"{}\",{},{},{}",
                    r.multiset, r.identity, r.analysis, r.bijections
                );
            }
        }
    }
    Ok(pass)
}

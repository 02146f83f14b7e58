//! Command-line front end: parse polynomials, pick a field/grading, and run
//! identity checks, reductions, basis listings, and witness construction.
//!
//! Exit codes for `check`: 0 the polynomial vanished (identity at the
//! bound, or at the given truncation), 1 a non-identity witness was found
//! and printed, 2 a parse or configuration error.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use grident_core::catalog;
use grident_core::field::FieldSpec;
use grident_core::freealg::FreePolynomial;
use grident_core::gradings::Grading;
use grident_core::grassmann::{GrassmannAlgebra, GrassmannElement, MAX_GENERATORS};
use grident_core::parse::{parse_element, parse_polynomial};
use grident_core::ssform::reduce;
use grident_core::witness::{
    is_graded_identity, scalar_witness, theorem_witness, verify_witness, IdentityVerdict,
    Strategy, VerdictStatus, Witness, WitnessCase,
};
use serde_json::json;
use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "grident", version, about = "Graded identities of Grassmann algebras over finite fields")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// Coefficient field, |F| = p^n with p an odd prime
    #[arg(long, global = true, default_value = "3^1")]
    field: String,
    /// Grading: `canonical | infinity | kstar:<k> | k:<k>`
    #[arg(long, global = true, default_value = "canonical")]
    grading: String,
    /// Truncation: number of Grassmann generators
    #[arg(long = "n", global = true, default_value_t = 12)]
    n: u32,
    /// Seed for every randomized procedure
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random substitutions per variable assignment search
    #[arg(long, global = true, default_value_t = 200)]
    samples: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Read the expression (or certificate) from a file instead of an argument
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an expression is a graded identity at the truncation
    Check { expr: Option<String> },
    /// Print the normal form modulo the grading's identities
    Reduce { expr: Option<String> },
    /// List the generating identities of the configured grading
    Basis,
    /// Construct a replayable non-identity certificate
    Witness { expr: Option<String> },
    /// Re-check a certificate produced by `witness`
    VerifyWitness,
    /// Run a quick internal consistency battery
    Selftest,
}

struct Env {
    field: FieldSpec,
    grading: Grading,
    opts: GlobalOpts,
}

impl Env {
    fn new(opts: &GlobalOpts) -> Result<Env> {
        let field = FieldSpec::parse(&opts.field)?;
        let grading = Grading::parse(&opts.grading)?;
        if opts.n == 0 || opts.n > MAX_GENERATORS {
            return Err(anyhow!("truncation must be within 1..={MAX_GENERATORS}"));
        }
        if let Some(k) = grading.k() {
            if k >= opts.n {
                return Err(anyhow!("grading parameter k={k} needs a larger truncation than {}", opts.n));
            }
        }
        Ok(Env { field, grading, opts: opts.clone() })
    }

    fn algebra(&self) -> Result<GrassmannAlgebra> {
        Ok(GrassmannAlgebra::new(self.field.clone(), self.opts.n)?)
    }

    fn read_expr(&self, arg: &Option<String>) -> Result<String> {
        if let Some(path) = &self.opts.input {
            return std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()));
        }
        arg.clone().ok_or_else(|| anyhow!("an expression argument (or --in FILE) is required"))
    }

    fn parse(&self, src: &str) -> Result<FreePolynomial> {
        Ok(parse_polynomial(src.trim(), &self.field)?)
    }

    fn meta(&self) -> serde_json::Value {
        json!({
            "field": self.field.spec_string(),
            "grading": self.grading.to_string(),
            "n": self.opts.n,
            "seed": self.opts.seed,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let env = Env::new(&cli.opts)?;
    match &cli.cmd {
        Command::Check { expr } => cmd_check(&env, expr),
        Command::Reduce { expr } => cmd_reduce(&env, expr),
        Command::Basis => cmd_basis(&env),
        Command::Witness { expr } => cmd_witness(&env, expr),
        Command::VerifyWitness => cmd_verify_witness(&env),
        Command::Selftest => cmd_selftest(&env),
    }
}

fn witness_json(env: &Env, w: &Witness) -> serde_json::Value {
    let assignment: serde_json::Map<String, serde_json::Value> = w
        .assignment
        .iter()
        .map(|(v, el)| (v.to_string(), json!(el.display(&env.field))))
        .collect();
    let mut meta = env.meta();
    // The recorded truncation must cover every generator the assignment
    // touches; theorem witnesses size their own truncation.
    let needed = w
        .assignment
        .values()
        .map(|el| el.support().max_index())
        .max()
        .unwrap_or(0);
    meta["n"] = json!(env.opts.n.max(needed));
    meta["expr"] = json!(w.instance.display(&env.field));
    meta["assignment"] = serde_json::Value::Object(assignment);
    meta["value"] = json!(w.value.display(&env.field));
    meta
}

fn describe_status(v: &IdentityVerdict) -> &'static str {
    match v.status {
        VerdictStatus::IdentityVerifiedAtBound => "identity (verified at bound)",
        VerdictStatus::VanishedAtTruncation => "vanished at truncation (below the bound)",
        VerdictStatus::NonIdentity => "non-identity",
    }
}

fn cmd_check(env: &Env, expr: &Option<String>) -> Result<ExitCode> {
    let src = env.read_expr(expr)?;
    let f = env.parse(&src)?;
    let strategy = if f.is_multilinear() {
        Strategy::ExhaustiveMultilinear
    } else {
        Strategy::WitnessFirst { samples: env.opts.samples, seed: env.opts.seed }
    };
    let verdict = is_graded_identity(&f, env.grading, &env.field, env.opts.n, strategy)?;
    match env.opts.format {
        Format::Json => {
            let mut out = env.meta();
            out["expr"] = json!(src.trim());
            out["strategy"] = json!(verdict.strategy);
            out["status"] = json!(describe_status(&verdict));
            if let Some(w) = &verdict.witness {
                out["witness"] = witness_json(env, w);
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Text => {
            println!("{} [strategy {}, n={}]", describe_status(&verdict), verdict.strategy, verdict.n_used);
            if let Some(w) = &verdict.witness {
                for (v, el) in &w.assignment {
                    println!("  {v} -> {}", el.display(&env.field));
                }
                println!("  value: {}", w.value.display(&env.field));
            }
        }
    }
    Ok(if verdict.status == VerdictStatus::NonIdentity {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_reduce(env: &Env, expr: &Option<String>) -> Result<ExitCode> {
    let src = env.read_expr(expr)?;
    let f = env.parse(&src)?;
    let tp = reduce(&f, env.grading, &env.field)?;
    match env.opts.format {
        Format::Json => {
            let mut out = env.meta();
            out["expr"] = json!(src.trim());
            out["normal_form"] = tp.to_json(&env.field);
            out["display"] = json!(tp.display(&env.field));
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Text => println!("{}", tp.display(&env.field)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_basis(env: &Env) -> Result<ExitCode> {
    let items = catalog::basis_for_grading(env.grading, &env.field);
    match env.opts.format {
        Format::Json => {
            let mut out = env.meta();
            out["identities"] = json!(items
                .iter()
                .map(|(name, p)| json!({"name": name, "poly": p.display(&env.field)}))
                .collect::<Vec<_>>());
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Text => {
            for (name, p) in &items {
                println!("{name}: {}", p.display(&env.field));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_witness(env: &Env, expr: &Option<String>) -> Result<ExitCode> {
    let src = env.read_expr(expr)?;
    let f = env.parse(&src)?;
    if f.has_generic_vars() {
        // Generic identities: search the parity instances through the
        // standard machinery.
        let verdict = is_graded_identity(
            &f,
            env.grading,
            &env.field,
            env.opts.n,
            Strategy::WitnessFirst { samples: env.opts.samples, seed: env.opts.seed },
        )?;
        return finish_witness(env, &src, verdict.witness, json!("witness_first"));
    }
    let tp = reduce(&f, env.grading, &env.field)?;
    if tp.is_zero() {
        println!("the polynomial reduces to zero: it is a graded identity");
        return Ok(ExitCode::from(1));
    }
    if tp.pairs().is_empty() {
        // Pure p-polynomial: a scalar witness settles it.
        if let Some(scalars) = scalar_witness(&tp.f0, &env.field)? {
            let alg = env.algebra()?;
            let mut assignment: BTreeMap<_, _> = scalars
                .iter()
                .map(|(&i, &c)| (grident_core::Variable::y(i), alg.scalar(c)))
                .collect();
            for v in f.variables() {
                assignment.entry(v).or_insert_with(|| alg.zero());
            }
            let value = grident_core::freealg::gsubstitute(
                &tp.expand(&env.field),
                &assignment,
                env.grading,
                &alg,
            )?;
            let w = Witness { instance: f.clone(), assignment, value };
            return finish_witness(env, &src, Some(w), json!("scalar"));
        }
        println!("the p-polynomial part vanishes identically");
        return Ok(ExitCode::from(1));
    }
    match theorem_witness(&tp, env.grading, &env.field, env.opts.seed) {
        Ok(tw) => {
            let case = match tw.case {
                WitnessCase::TypeLeading => "type sequence for the leading term",
                WitnessCase::AlmostTypeLeading => "almost-type sequence for the leading term",
                WitnessCase::TypeLeadingBad => "type sequence for the greatest bad term",
            };
            let alg = env.algebra()?;
            let mut assignment = tw.assignment;
            for v in f.variables() {
                assignment.entry(v).or_insert_with(|| alg.zero());
            }
            let w = Witness { instance: f.clone(), assignment, value: tw.value };
            finish_witness(env, &src, Some(w), json!(case))
        }
        Err(_) => {
            let verdict = is_graded_identity(
                &f,
                env.grading,
                &env.field,
                env.opts.n,
                Strategy::Randomized { samples: env.opts.samples, seed: env.opts.seed },
            )?;
            finish_witness(env, &src, verdict.witness, json!("randomized"))
        }
    }
}

fn finish_witness(
    env: &Env,
    src: &str,
    witness: Option<Witness>,
    method: serde_json::Value,
) -> Result<ExitCode> {
    match witness {
        Some(w) => {
            let mut cert = witness_json(env, &w);
            cert["method"] = method;
            cert["input"] = json!(src.trim());
            match env.opts.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&cert)?),
                Format::Text => {
                    println!("non-identity; certificate ({}):", cert["method"].as_str().unwrap_or("?"));
                    println!("{}", serde_json::to_string_pretty(&cert)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("no witness found; the polynomial appears to be an identity");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_verify_witness(env: &Env) -> Result<ExitCode> {
    let raw = match &env.opts.input {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?,
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    let cert: serde_json::Value = serde_json::from_str(&raw).context("certificate is not JSON")?;
    let field = FieldSpec::parse(
        cert["field"].as_str().ok_or_else(|| anyhow!("certificate lacks \"field\""))?,
    )?;
    let grading = Grading::parse(
        cert["grading"].as_str().ok_or_else(|| anyhow!("certificate lacks \"grading\""))?,
    )?;
    let n = cert["n"].as_u64().ok_or_else(|| anyhow!("certificate lacks \"n\""))? as u32;
    let alg = GrassmannAlgebra::new(field.clone(), n)?;
    let expr = cert["expr"].as_str().ok_or_else(|| anyhow!("certificate lacks \"expr\""))?;
    let instance = parse_polynomial(expr, &field)?;
    let mut assignment: BTreeMap<grident_core::Variable, GrassmannElement> = BTreeMap::new();
    let map = cert["assignment"]
        .as_object()
        .ok_or_else(|| anyhow!("certificate lacks \"assignment\""))?;
    for (name, v) in map {
        let poly = parse_polynomial(name, &field)?;
        let var = poly
            .variables()
            .into_iter()
            .next()
            .ok_or_else(|| anyhow!("bad variable name {name:?}"))?;
        let el = parse_element(
            v.as_str().ok_or_else(|| anyhow!("assignment values must be strings"))?,
            &alg,
        )?;
        assignment.insert(var, el);
    }
    let claimed = parse_element(
        cert["value"].as_str().ok_or_else(|| anyhow!("certificate lacks \"value\""))?,
        &alg,
    )?;
    let w = Witness { instance, assignment, value: claimed };
    let ok = verify_witness(&w, grading, &alg)?;
    match env.opts.format {
        Format::Json => println!("{}", json!({"valid": ok})),
        Format::Text => println!("{}", if ok { "valid: the witness replays to the recorded nonzero value" } else { "INVALID witness" }),
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_selftest(env: &Env) -> Result<ExitCode> {
    use rand_chacha::rand_core::SeedableRng;
    let f = &env.field;
    let mut failures = 0;
    let mut report = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "ok  " } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    // Field laws on the configured field.
    let mut ok = true;
    for a in f.enumerate() {
        ok &= f.pow(a, f.q()) == a;
        if !a.is_zero() {
            ok &= f.mul(a, f.inv(a).unwrap()) == f.one();
        }
    }
    report("field: frobenius and inverses", ok);

    // Wedge kernel associativity on E_4.
    let alg4 = GrassmannAlgebra::new(f.clone(), 4)?;
    let blades: Vec<GrassmannElement> = (0..16u8)
        .map(|b| {
            alg4.monomial(
                grident_core::BasisMonomial::from_bits(b as u128),
                f.one(),
            )
        })
        .collect();
    let mut ok = true;
    for a in &blades {
        for b in &blades {
            for c in &blades {
                ok &= alg4.mul(&alg4.mul(a, b), c) == alg4.mul(a, &alg4.mul(b, c));
            }
        }
    }
    report("grassmann: associativity on E_4", ok);

    // Straightening round trip on random polynomials.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(env.opts.seed);
    let vars = [
        grident_core::Variable::y(1),
        grident_core::Variable::y(2),
        grident_core::Variable::z(1),
        grident_core::Variable::z(2),
    ];
    let mut ok = true;
    for _ in 0..30 {
        use rand::Rng;
        let mut p = FreePolynomial::zero();
        for _ in 0..rng.random_range(1..4) {
            let len = rng.random_range(0..5usize);
            let w: Vec<_> = (0..len).map(|_| vars[rng.random_range(0..vars.len())]).collect();
            p = p.add(&FreePolynomial::monomial(w, f.element(rng.random_range(1..3))), f);
        }
        ok &= grident_core::freealg::straighten(&p, f).expand(f) == p;
    }
    report("freealg: straighten round trip", ok);

    // Basis identities of the configured grading hold.
    let mut ok = true;
    for (_, g) in catalog::basis_for_grading(env.grading, f) {
        let strategy = if g.is_multilinear() {
            Strategy::ExhaustiveMultilinear
        } else {
            Strategy::Randomized { samples: 80, seed: env.opts.seed }
        };
        let n = grident_core::witness::truncation_bound(&g, env.grading).max(env.opts.n);
        let v = is_graded_identity(&g, env.grading, f, n, strategy)?;
        ok &= v.status != VerdictStatus::NonIdentity;
    }
    report("catalog: basis identities vanish", ok);

    // Reduction preserves evaluations.
    let mut ok = true;
    for _ in 0..10 {
        use rand::Rng;
        let mut p = FreePolynomial::zero();
        for _ in 0..rng.random_range(1..4) {
            let len = rng.random_range(1..5usize);
            let w: Vec<_> = (0..len).map(|_| vars[rng.random_range(0..vars.len())]).collect();
            p = p.add(&FreePolynomial::monomial(w, f.element(rng.random_range(1..3))), f);
        }
        let tp = reduce(&p, env.grading, f)?;
        let diff = tp.expand(f).sub(&p, f);
        let v = is_graded_identity(
            &diff,
            env.grading,
            f,
            env.opts.n,
            Strategy::Randomized { samples: 40, seed: env.opts.seed },
        )?;
        ok &= v.status != VerdictStatus::NonIdentity;
    }
    report("ssform: reduce agrees with evaluation", ok);

    if failures == 0 {
        println!("selftest passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("selftest FAILED ({failures})");
        Ok(ExitCode::from(1))
    }
}

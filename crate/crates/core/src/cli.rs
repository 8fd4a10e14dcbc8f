//! Command-line front end.
//!
//! Every command produces a [`RunReport`], rendered as text, JSON or CSV.
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails,
//! 2 for usage, input and budget errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::counterexample::{approx_symmetry_certificates, build_phi, build_rho, verify_transposition_identities};
use crate::error::{Error, Result};
use crate::forms::{BilinearForm, MultilinearForm, SparseForm};
use crate::gf2::{subspace_from_constraints, BitVec, Subspace};
use crate::prank::{
    analytic_rank, bias_with_budget, exact_prank_oracle, min_distance_to_symmetric, verify_certificate,
    CertificateFile, PartitionCertificate, DEFAULT_BUDGET_LOG2,
};
use crate::regularity::{bilinear_regularize, counting_check_with_budget, Coset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "f2forms", version, about = "Multilinear forms over GF(2)")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Maximum number of elementary evaluations for exhaustive commands.
    #[arg(long, default_value_t = 1u64 << DEFAULT_BUDGET_LOG2, global = true)]
    pub max_enum: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write φ and ρ as sparse form files.
    GenPhi {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check the transposition identities and the 24 symmetry certificates.
    CheckIdentities {
        #[arg(long)]
        n: usize,
        /// Also write each certificate to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact bias and analytic rank of a form.
    Bias {
        #[arg(long)]
        form: PathBuf,
    },
    /// Check a partition-rank certificate against a form.
    VerifyCert {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Regularize bilinear forms against ρ.
    Regularize {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long = "beta")]
        betas: Vec<PathBuf>,
        #[arg(long)]
        m: usize,
    },
    /// Count value vectors of bilinear forms over a coset.
    Counting {
        #[arg(long = "alpha", required = true)]
        alphas: Vec<PathBuf>,
        /// Linear functional cutting out the coset, as a bit string.
        #[arg(long = "constraint")]
        constraints: Vec<String>,
        /// Coset shift as a bit string (defaults to zero).
        #[arg(long)]
        shift: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
    },
    /// Distance from φ at n = 2 (or from a given form) to the symmetric forms.
    DistanceN2 {
        #[arg(long)]
        form: Option<PathBuf>,
    },
    /// Write a random form; requires --seed.
    GenRandom {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Exact rank (bilinear forms only).
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GenPhi { .. } => "gen-phi",
            Command::CheckIdentities { .. } => "check-identities",
            Command::Bias { .. } => "bias",
            Command::VerifyCert { .. } => "verify-cert",
            Command::Regularize { .. } => "regularize",
            Command::Counting { .. } => "counting",
            Command::DistanceN2 { .. } => "distance-n2",
            Command::GenRandom { .. } => "gen-random",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Param {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// Outcome of one command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: Vec<Param>,
    pub results: Vec<Entry>,
    pub checks: Vec<Check>,
    pub seed: Option<u64>,
    pub wall_time_secs: f64,
}

impl RunReport {
    fn new(command: &str, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            parameters: Vec::new(),
            results: Vec::new(),
            checks: Vec::new(),
            seed,
            wall_time_secs: 0.0,
        }
    }

    fn param(&mut self, name: &str, value: impl ToString) {
        self.parameters.push(Param {
            name: name.into(),
            value: value.to_string(),
        });
    }

    fn result(&mut self, name: &str, value: impl Serialize) {
        self.results.push(Entry {
            name: name.into(),
            value: serde_json::to_value(value).expect("report values serialize"),
        });
    }

    fn check(&mut self, name: &str, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            passed,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.results.iter().find(|e| e.name == name).map(|e| &e.value)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_text(&self) -> String {
        let mut s = format!("command: {}\n", self.command);
        if let Some(seed) = self.seed {
            s += &format!("seed: {seed}\n");
        }
        if !self.parameters.is_empty() {
            s += "parameters:\n";
            for p in &self.parameters {
                s += &format!("  {} = {}\n", p.name, p.value);
            }
        }
        if !self.results.is_empty() {
            s += "results:\n";
            for e in &self.results {
                s += &format!("  {} = {}\n", e.name, text_value(&e.value));
            }
        }
        if !self.checks.is_empty() {
            s += "checks:\n";
            for c in &self.checks {
                s += &format!("  {} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name);
            }
        }
        s += &format!("wall_time: {:.3} s\n", self.wall_time_secs);
        s
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut row = |a: &str, b: &str, c: &str| w.write_record([a, b, c]).expect("in-memory write");
        row("section", "name", "value");
        row("meta", "command", &self.command);
        if let Some(seed) = self.seed {
            row("meta", "seed", &seed.to_string());
        }
        for p in &self.parameters {
            row("parameter", &p.name, &p.value);
        }
        for e in &self.results {
            row("result", &e.name, &text_value(&e.value));
        }
        for c in &self.checks {
            row("check", &c.name, if c.passed { "pass" } else { "fail" });
        }
        row("meta", "wall_time_secs", &format!("{:.6}", self.wall_time_secs));
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn read_form(path: &Path) -> Result<MultilinearForm> {
    let text = fs::read_to_string(path)?;
    MultilinearForm::from_sparse(&SparseForm::from_json(&text)?)
}

pub fn read_bilinear(path: &Path) -> Result<BilinearForm> {
    BilinearForm::from_multilinear(&read_form(path)?)
}

pub fn write_form(path: &Path, form: &MultilinearForm) -> Result<()> {
    fs::write(path, form.to_sparse().to_json())?;
    Ok(())
}

pub fn read_certificate(path: &Path) -> Result<PartitionCertificate> {
    PartitionCertificate::from_file(&CertificateFile::from_json(&fs::read_to_string(path)?)?)
}

pub fn parse_bits(text: &str) -> Result<BitVec> {
    let bits = text
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("bad bit {other:?} in {text:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BitVec::from_bools(&bits))
}

/// `floor(log2(max_enum))`, the budget exponent used by exhaustive commands.
fn budget_log2(max_enum: u64) -> Result<u32> {
    if max_enum == 0 {
        return Err(Error::Precondition("--max-enum must be positive".into()));
    }
    Ok(63 - max_enum.leading_zeros())
}

fn require_seed(seed: Option<u64>, command: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::Precondition(format!("{command} is randomized and needs --seed")))
}

/// Runs one command without touching stdout.
pub fn execute(cli: &Cli) -> Result<RunReport> {
    let start = Instant::now();
    let g = &cli.global;
    let mut report = RunReport::new(cli.command.name(), g.seed);
    match &cli.command {
        Command::GenPhi { n, out } => {
            if *n == 0 {
                return Err(Error::Precondition("n must be at least 1".into()));
            }
            report.param("n", n);
            fs::create_dir_all(out)?;
            let phi = build_phi(*n);
            let rho = build_rho(*n).to_multilinear();
            let (phi_path, rho_path) = (out.join("phi.json"), out.join("rho.json"));
            write_form(&phi_path, &phi)?;
            write_form(&rho_path, &rho)?;
            report.result("phi_file", phi_path.display().to_string());
            report.result("phi_monomials", phi.monomial_count());
            report.result("rho_file", rho_path.display().to_string());
            report.result("rho_monomials", rho.monomial_count());
        }
        Command::CheckIdentities { n, out } => {
            report.param("n", n);
            let ids = verify_transposition_identities(*n)?;
            report.check("phi = phi∘(1 2)", ids.swap_12);
            report.check("phi = phi∘(1 3)", ids.swap_13);
            report.check("phi + phi∘(1 4) = rho(x,y)rho(z,w) + rho(x,z)rho(y,w)", ids.swap_14);
            let certs = match approx_symmetry_certificates(*n) {
                Ok(c) => c,
                Err(Error::Verification(msg)) => {
                    report.result("certificate_error", msg);
                    report.check("certificates verify", false);
                    Vec::new()
                }
                Err(e) => return Err(e),
            };
            if let Some(dir) = out {
                fs::create_dir_all(dir)?;
            }
            let mut max_summands = 0;
            for c in &certs {
                max_summands = max_summands.max(c.certificate.len());
                report.result(&format!("v[{}]", c.permutation), c.element.to_string());
                if let Some(dir) = out {
                    let tag: String = c.permutation.images().iter().map(|i| (i + 1).to_string()).collect();
                    fs::write(dir.join(format!("cert_{tag}.json")), c.certificate.to_file().to_json())?;
                }
            }
            if !certs.is_empty() {
                report.result("max_summands", max_summands);
                report.check("24 certificates verify", certs.len() == 24);
                report.check("every certificate has at most 3 summands", max_summands <= 3);
            }
        }
        Command::Bias { form } => {
            report.param("form", form.display());
            let alpha = read_form(form)?;
            let b = bias_with_budget(&alpha, budget_log2(g.max_enum)?)?;
            report.result("arity", alpha.arity());
            report.result("dim", alpha.dim());
            report.result("bias", b.to_string());
            report.result("analytic_rank", analytic_rank_value(b.neg_log2()));
        }
        Command::VerifyCert { form, cert } => {
            report.param("form", form.display());
            report.param("cert", cert.display());
            let alpha = read_form(form)?;
            let c = read_certificate(cert)?;
            report.result("summands", c.len());
            report.check("certificate sums to the form", verify_certificate(&alpha, &c)?);
            if c.len() <= 16 {
                if let Ok(ar) = analytic_rank(&alpha) {
                    report.result("analytic_rank", analytic_rank_value(ar));
                    report.check("analytic rank <= summands", ar <= c.len() as f64 + 1e-9);
                }
            }
        }
        Command::Regularize { rho, betas, m } => {
            report.param("rho", rho.display());
            for b in betas {
                report.param("beta", b.display());
            }
            report.param("m", m);
            let rho = read_bilinear(rho)?;
            let betas = betas.iter().map(|p| read_bilinear(p)).collect::<Result<Vec<_>>>()?;
            let res = bilinear_regularize(&rho, &betas, *m)?;
            let audit = res.audit(&rho, &betas)?;
            report.result("rank_hypothesis_holds", res.rank_hypothesis_holds);
            report.result("kept_inputs", res.kept_inputs.iter().map(|i| i + 1).collect::<Vec<_>>());
            report.result("codim", res.subspace.codim());
            report.result(
                "subspace_basis",
                res.subspace.basis().row_slice().iter().map(ToString::to_string).collect::<Vec<_>>(),
            );
            report.result("expressions", &res.expressions);
            report.result("steps", &res.steps);
            report.result("audit", &audit);
            report.check("survivors <= inputs", audit.survivors_le_inputs);
            report.check("codim <= 2rm", audit.codim_within_bound);
            report.check("nonzero combinations have rank >= m", audit.combinations_regular);
            report.check("expressions reproduce inputs", audit.expressions_exact);
        }
        Command::Counting {
            alphas,
            constraints,
            shift,
            epsilon,
        } => {
            for a in alphas {
                report.param("alpha", a.display());
            }
            for c in constraints {
                report.param("constraint", c);
            }
            if let Some(s) = shift {
                report.param("shift", s);
            }
            report.param("epsilon", epsilon);
            let alphas = alphas.iter().map(|p| read_bilinear(p)).collect::<Result<Vec<_>>>()?;
            let n = alphas[0].dim();
            let funcs = constraints.iter().map(|c| parse_bits(c)).collect::<Result<Vec<_>>>()?;
            let space = subspace_from_constraints(&funcs, &Subspace::full(n))?;
            let shift = match shift {
                Some(s) => parse_bits(s)?,
                None => BitVec::zeros(n),
            };
            let coset = Coset::new(space, shift)?;
            let rep = counting_check_with_budget(&alphas, &coset, *epsilon, budget_log2(g.max_enum)?)?;
            report.result("codim", rep.codim);
            report.result("coset_size", rep.coset_size);
            report.result("value_counts", &rep.value_counts);
            report.result("epsilon_achieved", rep.epsilon_achieved);
            report.result("surjective", rep.surjective);
            report.result("conclusion_holds", rep.conclusion_holds);
            report.result("min_combination_rank", rep.min_combination_rank);
            report.result("hypothesis_holds", rep.hypothesis_holds);
            report.check(
                "hypothesis implies near-uniform counts",
                !rep.hypothesis_holds || rep.conclusion_holds,
            );
        }
        Command::DistanceN2 { form } => {
            let alpha = match form {
                Some(p) => {
                    report.param("form", p.display());
                    read_form(p)?
                }
                None => {
                    report.param("form", "phi");
                    report.param("n", 2);
                    build_phi(2)
                }
            };
            let d = min_distance_to_symmetric(&alpha)?;
            report.result("prank", exact_prank_oracle(&alpha)?);
            report.result("distance", d.distance);
            report.result("candidates", d.candidates);
            report.result("witness", d.witness.to_sparse().monomials);
        }
        Command::GenRandom { n, arity, rank, out } => {
            let seed = require_seed(g.seed, "gen-random")?;
            report.param("n", n);
            report.param("arity", arity);
            if let Some(r) = rank {
                report.param("rank", r);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let form = match (arity, rank) {
                (2, Some(r)) if *r <= *n => BilinearForm::random_with_rank(*n, *r, &mut rng).to_multilinear(),
                (2, Some(r)) => {
                    return Err(Error::Precondition(format!("rank {r} exceeds dimension {n}")));
                }
                (_, Some(_)) => return Err(Error::Precondition("--rank needs --arity 2".into())),
                (k, None) => MultilinearForm::try_zero(*k, *n)
                    .map(|_| MultilinearForm::random(*k, *n, &mut rng))?,
            };
            write_form(out, &form)?;
            report.result("file", out.display().to_string());
            report.result("monomials", form.monomial_count());
            report.result("first_draw_after", rng.gen::<u32>());
        }
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

fn analytic_rank_value(ar: f64) -> Value {
    if ar.is_finite() {
        json!(ar)
    } else {
        json!("inf")
    }
}

/// Exit code for a finished command.
pub fn exit_code(outcome: &Result<RunReport>) -> i32 {
    match outcome {
        Ok(r) if r.passed() => EXIT_OK,
        Ok(_) | Err(Error::Verification(_)) => EXIT_CHECK_FAILED,
        Err(_) => EXIT_USAGE,
    }
}

/// Parses `args`, runs the command on the requested thread pool and writes
/// the report to `out` (errors go to `err`). Returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(if code == 0 { &mut *out as &mut dyn Write } else { err }, "{e}");
            return code;
        }
    };
    let outcome = match cli.global.workers {
        Some(0) => Err(Error::Precondition("--workers must be positive".into())),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::Precondition(format!("cannot start {w} workers: {e}"))),
        },
        None => execute(&cli),
    };
    match &outcome {
        Ok(report) => {
            let _ = out.write_all(report.render(cli.global.format).as_bytes());
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
        }
    }
    exit_code(&outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("f2forms").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parse_bits_round_trip() {
        let v = parse_bits("10110").unwrap();
        assert_eq!(v.to_string(), "10110");
        assert!(parse_bits("10a").is_err());
    }

    #[test]
    fn budget_exponent() {
        assert_eq!(budget_log2(1 << 30).unwrap(), 30);
        assert_eq!(budget_log2((1 << 30) + 5).unwrap(), 30);
        assert_eq!(budget_log2(1).unwrap(), 0);
        assert!(budget_log2(0).is_err());
    }

    #[test]
    fn gen_random_needs_seed() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("f.json");
        let (code, _, err) = run_capture(&["gen-random", "--n", "3", "--out", out.to_str().unwrap()]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--seed"));
    }

    #[test]
    fn unknown_command_is_usage_error() {
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bias"]).0, EXIT_USAGE);
    }

    #[test]
    fn check_identities_small() {
        let (code, out, _) = run_capture(&["check-identities", "--n", "3"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("PASS 24 certificates verify"));
    }

    #[test]
    fn csv_report_has_header() {
        let (code, out, _) = run_capture(&["--format", "csv", "distance-n2"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("section,name,value\n"));
    }
}

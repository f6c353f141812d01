//! The `relcat` command line.
//!
//! Exit status is 0 when everything checked holds, 1 when some check
//! fails, and 2 on usage, input or parse errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dsl::{self, CheckReport};
use crate::protocols::{self, DHInstance, EquationVerdict, ProtocolInstance};
use crate::relcore::{FiniteSet, Permutation, Rel};
use crate::search::{self, Constraint, SearchSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "relcat",
    version,
    about = "Check and synthesize protocols as matrices of relations"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "human", global = true)]
    pub format: Format,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for sampled runs.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every `check` in a term file.
    Check { file: PathBuf },
    /// Check a one-time pad instance.
    VerifyOtp {
        /// Addition modulo n.
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        group: Option<usize>,
        /// A JSON instance, in the layout `enumerate` prints.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Check the key exchange in the cyclic group of prime order q.
    VerifyDh {
        #[arg(long)]
        prime: usize,
        /// Also use the identity element as a base (expected to fail).
        #[arg(long)]
        include_identity: bool,
        /// Keep the published values instead of erasing them (expected to fail).
        #[arg(long)]
        without_erasure: bool,
    },
    /// Enumerate every implementation at the given sizes.
    Enumerate {
        /// Plaintext, key and ciphertext sizes, as p,k,c.
        #[arg(long, value_parser = parse_sizes)]
        sizes: (usize, usize, usize),
        /// Comma-separated: correctness, S1, S2, S3, S4.
        #[arg(long, value_delimiter = ',', default_value = "correctness")]
        constraints: Vec<Constraint>,
        /// Keep one representative per relabeling orbit.
        #[arg(long)]
        dedup: bool,
        /// Include wall-clock time in the summary (breaks byte-identical output).
        #[arg(long)]
        timings: bool,
    },
    /// Check the decryption, reconstruction and implication theorems over
    /// every correct implementation, or over random candidates.
    Theorems {
        #[arg(long, value_parser = parse_sizes)]
        sizes: (usize, usize, usize),
        /// Sample this many candidates instead of enumerating.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long)]
        timings: bool,
    },
}

fn parse_sizes(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [p, k, c] if p > 0 && k > 0 && c > 0 => Ok((p, k, c)),
        [_, _, _] => Err("sizes must be positive".into()),
        _ => Err(format!("expected three sizes p,k,c, got `{s}`")),
    }
}

/// An instance in the layout of an enumerated solution.
#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub pi: Vec<usize>,
    /// One row per ciphertext, one column per (plaintext, key).
    pub e: Vec<Vec<u8>>,
    /// Per ciphertext: one row per plaintext, one column per key.
    pub d: Vec<Vec<Vec<u8>>>,
}

impl InstanceFile {
    pub fn instance(&self) -> Result<ProtocolInstance> {
        let c = self.e.len();
        let k = self.pi.len();
        let p = self.d.first().map(Vec::len).ok_or_else(|| anyhow!("`d` is empty"))?;
        if c == 0 || k == 0 || p == 0 {
            bail!("instance sizes must be positive");
        }
        let (ps, ks, cs) = (FiniteSet::new(p), FiniteSet::new(k), FiniteSet::new(c));
        let e = Rel::from_matrix(&ps.product(&ks), &cs, &self.e).context("matrix `e`")?;
        let d = self
            .d
            .iter()
            .enumerate()
            .map(|(i, m)| Rel::from_matrix(&ks, &ps, m).with_context(|| format!("matrix `d[{i}]`")))
            .collect::<Result<Vec<_>>>()?;
        let pi = Permutation::new(self.pi.clone()).context("`pi`")?;
        Ok(ProtocolInstance::from_parts(p, k, c, e, d, &pi)?)
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n.max(1));
    }
    Ok(b.build()?)
}

fn emit_json(out: &mut dyn Write, v: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn verdict_line(v: &EquationVerdict) -> String {
    let mut s = format!("{:<24} {}", v.name, if v.holds { "pass" } else { "FAIL" });
    if let Some(w) = &v.witness {
        s.push_str(&format!("  [{}]", w.detail));
    }
    if let Some(n) = &v.note {
        s.push_str(&format!("  ({n})"));
    }
    s
}

/// Runs a parsed command line, writing reports to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let pool = pool(cli.threads)?;
    let format = cli.format;
    let (threads, seed) = (cli.threads, cli.seed);
    let mut buf: Vec<u8> = Vec::new();
    let code = pool.install(|| {
        let out: &mut dyn Write = &mut buf;
        match cli.command {
            Command::Check { file } => cmd_check(&file, format, out),
            Command::VerifyOtp { group, file } => cmd_verify_otp(group, file.as_deref(), format, out),
            Command::VerifyDh {
                prime,
                include_identity,
                without_erasure,
            } => cmd_verify_dh(prime, include_identity, without_erasure, format, out),
            Command::Enumerate {
                sizes,
                constraints,
                dedup,
                timings,
            } => cmd_enumerate(sizes, &constraints, dedup, timings, threads, format, out),
            Command::Theorems { sizes, sample, timings } => {
                cmd_theorems(sizes, sample, seed, timings, threads, format, out)
            }
        }
    })?;
    out.write_all(&buf)?;
    Ok(code)
}

pub fn cmd_check(file: &Path, format: Format, out: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    let reports: Vec<CheckReport> = dsl::check_source(&text).map_err(|e| anyhow!("{}: {e}", file.display()))?;
    let code = dsl::exit_code(&reports);
    match format {
        Format::Json => emit_json(
            out,
            &json!({
                "file": file.display().to_string(),
                "checks": reports,
                "status": code,
            }),
        )?,
        Format::Human => {
            for r in &reports {
                writeln!(out, "{r}")?;
            }
            let equal = reports.iter().filter(|r| r.is_equal()).count();
            writeln!(out, "{equal} of {} checks equal", reports.len())?;
        }
    }
    Ok(code)
}

pub fn cmd_verify_otp(group: Option<usize>, file: Option<&Path>, format: Format, out: &mut dyn Write) -> Result<i32> {
    let (source, inst) = match (group, file) {
        (Some(n), _) => (format!("group {n}"), protocols::group_instance(n)?),
        (None, Some(f)) => {
            let text = std::fs::read_to_string(f).with_context(|| format!("cannot read {}", f.display()))?;
            let parsed: InstanceFile =
                serde_json::from_str(&text).with_context(|| format!("{} is not an instance", f.display()))?;
            (f.display().to_string(), parsed.instance()?)
        }
        (None, None) => bail!("give --group or --file"),
    };
    let vs = protocols::verify_all(&inst);
    let code = if vs.iter().all(|v| v.holds) { 0 } else { 1 };
    match format {
        Format::Json => {
            let keyed: BTreeMap<&str, &EquationVerdict> = vs.iter().map(|v| (v.name.as_str(), v)).collect();
            emit_json(
                out,
                &json!({
                    "instance": source,
                    "sizes": [inst.p.size(), inst.k.size(), inst.c.size()],
                    "verdicts": keyed,
                    "status": code,
                }),
            )?;
        }
        Format::Human => {
            writeln!(out, "instance: {source}")?;
            for v in &vs {
                writeln!(out, "{}", verdict_line(v))?;
            }
        }
    }
    Ok(code)
}

pub fn cmd_verify_dh(
    q: usize,
    include_identity: bool,
    without_erasure: bool,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32> {
    let mut dh = DHInstance::new(q)?;
    if include_identity {
        dh = dh.including_identity();
    }
    let v = if without_erasure {
        protocols::check_dh_without_erasure(&dh)
    } else {
        protocols::check_dh(&dh)
    };
    let code = if v.holds { 0 } else { 1 };
    match format {
        Format::Json => emit_json(
            out,
            &json!({
                "prime": q,
                "bases": dh.base_set,
                "verdict": v,
                "status": code,
            }),
        )?,
        Format::Human => {
            writeln!(out, "q = {q}, bases {:?}", dh.base_set)?;
            writeln!(out, "{}", verdict_line(&v))?;
        }
    }
    Ok(code)
}

fn triple_line(r: &search::SolutionRecord) -> String {
    let mut s = format!("pi={:?} e={:?} d={:?} eta={:?}", r.pi, r.e, r.d, r.eta);
    if let Some(n) = r.orbit_size {
        s.push_str(&format!(" orbit={n}"));
    }
    s
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_enumerate(
    sizes: (usize, usize, usize),
    constraints: &[Constraint],
    dedup: bool,
    timings: bool,
    threads: Option<usize>,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32> {
    let spec = SearchSpec::new(sizes.0, sizes.1, sizes.2, constraints).with_dedup(dedup);
    let budget = search::budget_from_env();
    let start = Instant::now();
    let records = search::enumerate(&spec, budget, threads)?;
    let mut summary = json!({
        "sizes": [sizes.0, sizes.1, sizes.2],
        "constraints": spec.constraints,
        "dedup": dedup,
        "candidates": spec.candidates().map(|c| c.to_string()),
        "solutions": records.len(),
    });
    if timings {
        summary["elapsed_ms"] = Value::from(start.elapsed().as_millis() as u64);
    }
    match format {
        Format::Json => {
            for r in &records {
                emit_json(out, r)?;
            }
            emit_json(out, &json!({ "summary": summary }))?;
        }
        Format::Human => {
            for r in &records {
                writeln!(out, "{}", triple_line(r))?;
            }
            writeln!(
                out,
                "{} solution(s) at sizes {:?} under {}{}",
                records.len(),
                sizes,
                spec.constraints.iter().map(|c| c.name()).collect::<Vec<_>>().join(", "),
                if dedup { ", up to relabeling" } else { "" }
            )?;
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_theorems(
    sizes: (usize, usize, usize),
    sample: Option<usize>,
    seed: u64,
    timings: bool,
    threads: Option<usize>,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32> {
    let start = Instant::now();
    let (report, sampled) = match sample {
        Some(n) => (search::sample_theorems(sizes, n, seed, threads)?.theorems, Some(n)),
        None => (
            search::verify_theorems(sizes, search::budget_from_env(), threads)?,
            None,
        ),
    };
    let code = if report.counterexamples() == 0 { 0 } else { 1 };
    match format {
        Format::Json => {
            let mut v = json!({ "report": report, "status": code });
            if let Some(n) = sampled {
                v["sampled"] = json!(n);
                v["seed"] = json!(seed);
            }
            if timings {
                v["elapsed_ms"] = Value::from(start.elapsed().as_millis() as u64);
            }
            emit_json(out, &v)?;
        }
        Format::Human => {
            match sampled {
                Some(n) => writeln!(out, "{n} random candidates (seed {seed}), {} correct", report.correct)?,
                None => writeln!(out, "{} correct implementations at sizes {:?}", report.correct, sizes)?,
            }
            if !report.applicable {
                writeln!(out, "|P| != |K|: decryption and reconstruction theorems do not apply")?;
            }
            for (name, t) in [
                ("decryption bijective", &report.d_bijective),
                ("decryption inverse", &report.d_inverse),
                ("encryption rebuilt", &report.e_reconstruction),
                ("encryption not invertible", &report.e_noninvertible),
                ("S1 implies S2, S3, S4", &report.s1_implies_rest),
            ] {
                writeln!(
                    out,
                    "{name:<26} {} checked, {} counterexamples",
                    t.checked, t.counterexamples
                )?;
                for e in &t.examples {
                    writeln!(out, "    {e}")?;
                }
            }
            writeln!(out, "correct but failing S1: {}", report.s1_violating)?;
        }
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let cli = Cli::try_parse_from(std::iter::once("relcat").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let code = run(cli, &mut buf).unwrap();
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn sizes_parse() {
        assert_eq!(parse_sizes("2,2,2"), Ok((2, 2, 2)));
        assert!(parse_sizes("2,2").is_err());
        assert!(parse_sizes("0,1,1").is_err());
    }

    #[test]
    fn group_two_passes() {
        let (code, text) = run_args(&["verify-otp", "--group", "2"]);
        assert_eq!(code, 0, "{text}");
    }

    #[test]
    fn enumerated_record_reads_back_as_instance() {
        let (_, text) = run_args(&["--format", "json", "enumerate", "--sizes", "2,2,2"]);
        let first = text.lines().next().unwrap();
        let inst: InstanceFile = serde_json::from_str(first).unwrap();
        assert!(protocols::check_correctness(&inst.instance().unwrap()).holds);
    }
}

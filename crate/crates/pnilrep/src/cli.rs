//! The `pnilrep` command line.
//!
//! Every command writes one report to stdout (JSON or CSV) and returns an
//! exit code: 0 when every check passes, 1 on a property failure and 2 on a
//! usage error.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dual::{enumerate_dual_ball, peter_weyl_report, RepLabel, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::group::{Coords, GroupId, GroupLaw, MAX_DIM};
use crate::oscint::{gaussian_case, parse_rat};
use crate::padic::Modulus;
use crate::rep::{fourier_transform, plancherel, rep_matrix, synthesize, Rep, TestFunction};
use crate::suites::{run_suite, Suite, SuiteConfig, TOL};
use crate::vt::{canonical_directions, hermitian_eigen, hypoellipticity_margin, spectrum_report, sublaplacian_symbol};

pub const SCHEMA: &str = "pnilrep/1";
pub const THREADS_ENV: &str = "PNILREP_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "pnilrep", version, about = "Unitary duals, characters and VT spectra of small p-adic nilpotent groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Group law: zp, zpN, h1, h2, b4, g52, g53, g54, g55, g56.
    #[arg(long, default_value = "h1")]
    pub group: String,
    #[arg(long, default_value_t = 3)]
    pub prime: u64,
    #[arg(long, default_value_t = 1)]
    pub level: u32,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; the PNILREP_THREADS environment variable takes precedence.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Largest number of cosets or oracle points a single sum may visit.
    #[arg(long, default_value_t = DEFAULT_CAP as u64)]
    pub cap: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the dual ball B(n) and check the Peter-Weyl count.
    Dual(Common),
    /// Run a seeded property suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: String,
        /// Random points or pairs per label.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Thin per-label suites to this many nontrivial labels.
        #[arg(long)]
        label_samples: Option<usize>,
        /// Random Gaussian cases.
        #[arg(long, default_value_t = 50)]
        draws: usize,
        /// Random parameters per auxiliary identity (defaults to min(draws, 10)).
        #[arg(long)]
        aux_draws: Option<usize>,
    },
    /// Eigenvalue table of the sub-Laplacian symbol for every label of B(n).
    Spectrum(Common),
    /// One Gaussian disk integral, optionally against the Riemann-sum oracle.
    Gaussian {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: i32,
        #[arg(long)]
        oracle: bool,
    },
    /// Plancherel identity and Fourier round trip for a random test function.
    Plancherel(Common),
    /// Print one representation matrix.
    Rep {
        #[command(flatten)]
        common: Common,
        /// Dual point, e.g. "1,1,1/3".
        #[arg(long)]
        xi: String,
        /// Group element coordinates, e.g. "1,2,0".
        #[arg(long)]
        x: String,
    },
}

/// Outcome of one command.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn usage(e: &Error) -> bool {
    matches!(
        e,
        Error::BadPrime(_)
            | Error::PrimeTooSmall { .. }
            | Error::Parse(_)
            | Error::UnknownGroup(_)
            | Error::NotInDual(_)
            | Error::ResourceCap { .. }
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange(_)
            | Error::PrecisionTooLarge { .. }
    )
}

/// Parse arguments and run; never exits the process.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli.command) {
        Ok((pass, stdout)) => Outcome { code: if pass { 0 } else { 1 }, stdout, stderr: String::new() },
        Err(e) => Outcome { code: if usage(&e) { 2 } else { 1 }, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Dual(c) | Command::Spectrum(c) | Command::Plancherel(c) => c,
        Command::Verify { common, .. } | Command::Gaussian { common, .. } | Command::Rep { common, .. } => common,
    }
}

/// Thread count from the environment override, then the flag, then the default.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .map(Some)
            .ok_or_else(|| Error::Parse(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        Err(_) => match flag {
            Some(0) => Err(Error::Parse("--threads must be positive".into())),
            other => Ok(other),
        },
    }
}

fn execute(cmd: &Command) -> Result<(bool, String)> {
    let c = common(cmd);
    if c.cap == 0 {
        return Err(Error::Parse("--cap must be positive".into()));
    }
    if c.alpha.is_nan() || c.alpha <= 0.0 || !c.alpha.is_finite() {
        return Err(Error::Parse("--alpha must be a positive number".into()));
    }
    let threads = thread_count(c.threads)?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Error::Parse(e.to_string()))?
    };
    pool.install(|| match cmd {
        Command::Dual(c) => cmd_dual(c),
        Command::Verify { common, suite, samples, label_samples, draws, aux_draws } => {
            let suite: Suite = suite.parse()?;
            cmd_verify(common, suite, *samples, *label_samples, *draws, aux_draws.unwrap_or((*draws).min(10)))
        }
        Command::Spectrum(c) => cmd_spectrum(c),
        Command::Gaussian { common, a, b, gamma, oracle } => cmd_gaussian(common, a, b, *gamma, *oracle),
        Command::Plancherel(c) => cmd_plancherel(c),
        Command::Rep { common, xi, x } => cmd_rep(common, xi, x),
    })
}

fn law_of(c: &Common) -> Result<GroupLaw> {
    let law = GroupLaw::new(c.group.parse()?);
    law.check_prime(c.prime)?;
    Ok(law)
}

/// Fixed description of the dual parametrizations in use.
pub fn provenance() -> Value {
    json!({
        "matrix_convention": "pi(x)[h][h'] is nonzero when h = h' + shift(x), with the phase evaluated at the row index",
        "g53_dual": "xi5 != 0: xi3, xi4 reduced modulo p^-k5, xi1, xi2 modulo p^-m with m = max(k5, k4 - k5), dimension p^(m + k5), induced when |xi4| > |xi5|; xi5 = 0: xi1, xi2 reduced modulo p^-k4",
        "g54_dual": "xi5 != 0: induced from a character of an abelian normal subgroup, inducing along x1 when k4 <= k5 and along x2 otherwise; xi5 = 0: labels of the Engel quotient",
        "g56_dual": "xi5 != 0: xi4 reduced modulo p^-k5, xi3 modulo p^-m with m = max(k5, k4 - k5), xi1 and xi2 modulo the translation lattice of the stabilizer, dimension p^max(k3, k4, 2 k5), induced from a skew lattice in the (x1, x2) plane; xi5 = 0: labels of the Engel quotient",
    })
}

fn envelope(command: &str, config: Value, report: Value, pass: bool) -> String {
    let v = json!({
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "provenance": provenance(),
        "report": report,
        "pass": pass,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn config_json(c: &Common) -> Value {
    json!({
        "group": c.group,
        "prime": c.prime,
        "level": c.level,
        "alpha": c.alpha,
        "seed": c.seed,
        "cap": c.cap,
    })
}

fn csv_string<F>(header: &[&str], fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> std::result::Result<(), csv::Error>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Parse(e.to_string()))?;
    fill(&mut w).map_err(|e| Error::Parse(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf8"))
}

fn fmt_f(v: f64) -> String {
    if v.is_finite() {
        let r = format!("{v:.12}");
        if r.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            r.trim_start_matches('-').to_string()
        } else {
            r
        }
    } else {
        String::new()
    }
}

pub fn cmd_dual(c: &Common) -> Result<(bool, String)> {
    let law = law_of(c)?;
    let labels = enumerate_dual_ball(&law, c.prime, c.level, c.cap as u128)?;
    let pw = peter_weyl_report(&law, c.prime, c.level, &labels);
    let out = match c.format {
        Format::Json => envelope("dual", config_json(c), json!({ "labels": labels, "peter_weyl": pw }), pw.pass),
        Format::Csv => csv_string(&["label", "dim", "branch", "level"], |w| {
            for l in &labels {
                w.write_record([l.to_string(), l.dim.to_string(), l.branch.to_string(), l.level.to_string()])?;
            }
            Ok(())
        })?,
    };
    Ok((pw.pass, out))
}

pub fn cmd_verify(
    c: &Common,
    suite: Suite,
    samples: usize,
    label_samples: Option<usize>,
    draws: usize,
    aux_draws: usize,
) -> Result<(bool, String)> {
    let group: GroupId = c.group.parse()?;
    let needs_group = suite != Suite::Gaussians;
    if needs_group {
        GroupLaw::new(group).check_prime(c.prime)?;
    } else if !crate::padic::is_odd_prime(c.prime) {
        return Err(Error::BadPrime(c.prime));
    }
    let cfg = SuiteConfig {
        group,
        prime: c.prime,
        level: c.level,
        alpha: c.alpha,
        seed: c.seed,
        samples,
        label_samples,
        draws,
        aux_draws,
        cap: c.cap as u128,
    };
    let reports = run_suite(&cfg, suite)?;
    let pass = reports.iter().all(|r| r.pass);
    let out = match c.format {
        Format::Json => {
            let mut config = config_json(c);
            config["suite"] = json!(suite);
            config["samples"] = json!(samples);
            config["label_samples"] = json!(label_samples);
            config["draws"] = json!(draws);
            config["aux_draws"] = json!(aux_draws);
            envelope("verify", config, json!({ "suites": reports }), pass)
        }
        Format::Csv => csv_string(&["suite", "property", "cases", "worst", "worst_case", "tolerance", "pass"], |w| {
            for r in &reports {
                for ch in &r.checks {
                    w.write_record([
                        r.suite.to_string(),
                        ch.property.clone(),
                        ch.cases.to_string(),
                        fmt_f(ch.worst),
                        ch.worst_case.clone().unwrap_or_default(),
                        ch.tolerance.to_string(),
                        ch.pass.to_string(),
                    ])?;
                }
            }
            Ok(())
        })?,
    };
    Ok((pass, out))
}

#[derive(Serialize)]
struct SpectrumRow {
    label: String,
    tau: String,
    h_prime: String,
    closed_form: Option<f64>,
    numeric: f64,
    diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_ok: Option<bool>,
}

fn spectrum_rows(law: &GroupLaw, c: &Common) -> Result<(bool, Vec<SpectrumRow>, Value)> {
    let dirs = canonical_directions(law);
    let labels = enumerate_dual_ball(law, c.prime, c.level, c.cap as u128)?;
    let mut rows = Vec::new();
    let mut pass = true;
    if law.id == GroupId::G56 {
        let m = hypoellipticity_margin(law, c.prime, c.alpha, c.level, c.cap as u128)?;
        let bound: std::collections::HashMap<String, bool> =
            m.rows.iter().map(|r| (r.label.to_string(), r.bound_ok.unwrap_or(true))).collect();
        for l in &labels {
            let rep = Rep::new(l)?;
            let (vals, _) = hermitian_eigen(&sublaplacian_symbol(&rep, &dirs, c.alpha)?);
            let ok = bound.get(&l.to_string()).copied().unwrap_or(true);
            pass &= ok;
            for v in vals {
                rows.push(SpectrumRow {
                    label: l.to_string(),
                    tau: String::new(),
                    h_prime: String::new(),
                    closed_form: None,
                    numeric: v,
                    diff: None,
                    bound_ok: Some(ok),
                });
            }
        }
        let extra = json!({ "c_star": m.c_star, "minimizer": m.minimizer.map(|l| l.to_string()) });
        return Ok((pass && m.pass, rows, extra));
    }
    for l in &labels {
        let rep = Rep::new(l)?;
        let r = spectrum_report(&rep, &dirs, c.alpha, TOL)?;
        pass &= r.pass;
        if r.entries.is_empty() {
            for v in &r.eigenvalues_numeric {
                rows.push(SpectrumRow {
                    label: l.to_string(),
                    tau: String::new(),
                    h_prime: String::new(),
                    closed_form: None,
                    numeric: *v,
                    diff: None,
                    bound_ok: None,
                });
            }
            continue;
        }
        let aligned = r.eigenvalues_numeric.len() == r.entries.len();
        for (i, e) in r.entries.iter().enumerate() {
            let numeric = if aligned { r.eigenvalues_numeric[i] } else { f64::NAN };
            rows.push(SpectrumRow {
                label: l.to_string(),
                tau: e.tau.join(";"),
                h_prime: e.h_prime.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(";"),
                closed_form: Some(e.value),
                numeric,
                diff: aligned.then(|| (e.value - numeric).abs()),
                bound_ok: None,
            });
        }
    }
    Ok((pass, rows, json!({})))
}

pub fn cmd_spectrum(c: &Common) -> Result<(bool, String)> {
    let law = law_of(c)?;
    let (pass, rows, extra) = spectrum_rows(&law, c)?;
    let g56 = law.id == GroupId::G56;
    let out = match c.format {
        Format::Json => envelope("spectrum", config_json(c), json!({ "rows": rows, "summary": extra }), pass),
        Format::Csv => {
            let mut header = vec!["label", "tau", "h_prime", "closed_form", "numeric", "diff"];
            if g56 {
                header.push("bound_ok");
            }
            csv_string(&header, |w| {
                for r in &rows {
                    let mut rec = vec![
                        r.label.clone(),
                        r.tau.clone(),
                        r.h_prime.clone(),
                        r.closed_form.map(fmt_f).unwrap_or_default(),
                        fmt_f(r.numeric),
                        r.diff.map(fmt_f).unwrap_or_default(),
                    ];
                    if g56 {
                        rec.push(r.bound_ok.unwrap_or(true).to_string());
                    }
                    w.write_record(rec)?;
                }
                Ok(())
            })?
        }
    };
    Ok((pass, out))
}

pub fn cmd_gaussian(c: &Common, a: &str, b: &str, gamma: i32, oracle: bool) -> Result<(bool, String)> {
    let (a, b) = (parse_rat(a)?, parse_rat(b)?);
    let case = gaussian_case(c.prime, &a, &b, gamma, oracle, c.cap as u128, TOL)?;
    let out = match c.format {
        Format::Json => {
            let config = json!({ "prime": c.prime, "a": case.a, "b": case.b, "gamma": gamma, "oracle": oracle });
            envelope("gaussian", config, serde_json::to_value(&case).expect("serializable"), case.pass)
        }
        Format::Csv => csv_string(&["a", "b", "gamma", "closed_form_re", "closed_form_im", "oracle_re", "oracle_im", "abs_diff"], |w| {
            let o = case.oracle.map(|o| [fmt_f(o[0]), fmt_f(o[1])]).unwrap_or_default();
            w.write_record([
                case.a.clone(),
                case.b.clone(),
                gamma.to_string(),
                fmt_f(case.closed_form[0]),
                fmt_f(case.closed_form[1]),
                o[0].clone(),
                o[1].clone(),
                case.abs_diff.map(fmt_f).unwrap_or_default(),
            ])
        })?,
    };
    Ok((case.pass, out))
}

pub fn cmd_plancherel(c: &Common) -> Result<(bool, String)> {
    let law = law_of(c)?;
    let labels = enumerate_dual_ball(&law, c.prime, c.level, c.cap as u128)?;
    let reps = labels.iter().map(Rep::new).collect::<Result<Vec<_>>>()?;
    let f = TestFunction::random(law, c.prime, c.level, c.seed);
    let (lhs, rhs) = plancherel(&f, &reps, c.cap as u128)?;
    let coeffs = reps.iter().map(|r| fourier_transform(&f, r, c.cap as u128)).collect::<Result<Vec<_>>>()?;
    let pairs: Vec<_> = reps.iter().zip(&coeffs).map(|(r, k)| (r, &k.matrix)).collect();
    let g = synthesize(law, c.prime, c.level, &pairs)?;
    let round_trip = f.values.iter().zip(&g.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let pass = (lhs - rhs).abs() < TOL && round_trip < TOL;
    let out = match c.format {
        Format::Json => envelope(
            "plancherel",
            config_json(c),
            json!({ "labels": reps.len(), "l2_norm_sq": lhs, "sum_d_tr": rhs, "abs_diff": (lhs - rhs).abs(), "round_trip": round_trip }),
            pass,
        ),
        Format::Csv => csv_string(&["labels", "l2_norm_sq", "sum_d_tr", "abs_diff", "round_trip"], |w| {
            w.write_record([reps.len().to_string(), fmt_f(lhs), fmt_f(rhs), fmt_f((lhs - rhs).abs()), fmt_f(round_trip)])
        })?,
    };
    Ok((pass, out))
}

fn parse_coords(law: &GroupLaw, md: &Modulus, s: &str) -> Result<Coords> {
    let vals: Vec<i128> = s
        .trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|t| t.trim().parse::<i128>().map_err(|_| Error::Parse(format!("bad coordinate {t:?}"))))
        .collect::<Result<_>>()?;
    if vals.len() != law.dim {
        return Err(Error::DimensionMismatch { expected: law.dim, got: vals.len() });
    }
    let mut x = [0u64; MAX_DIM];
    for (i, v) in vals.iter().enumerate() {
        x[i] = md.reduce(*v);
    }
    Ok(x)
}

pub fn cmd_rep(c: &Common, xi: &str, x: &str) -> Result<(bool, String)> {
    let law = law_of(c)?;
    let label = RepLabel::parse(law, c.prime, xi)?;
    let rep = Rep::new(&label)?;
    let coords = parse_coords(&law, &rep.md, x)?;
    let m = rep_matrix(&rep, &coords);
    let out = match c.format {
        Format::Json => {
            let config = json!({ "group": c.group, "prime": c.prime, "xi": label.to_string(), "x": x });
            envelope("rep", config, json!({ "label": label, "matrix": m }), true)
        }
        Format::Csv => {
            let mut s = String::new();
            let mat = rep.matrix(&coords);
            for r in 0..rep.dim {
                let row: Vec<String> = (0..rep.dim).map(|k| complex_str(mat[(r, k)])).collect();
                let _ = writeln!(s, "{}", row.join(","));
            }
            s
        }
    };
    Ok((true, out))
}

fn complex_str(z: Complex64) -> String {
    let re = if z.re.abs() < 1e-15 { 0.0 } else { z.re };
    let im = if z.im.abs() < 1e-15 { 0.0 } else { z.im };
    format!("{re:.12}{im:+.12}i")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(s: &str) -> Outcome {
        run(std::iter::once("pnilrep").chain(s.split_whitespace()))
    }

    #[test]
    fn dual_g52_counts() {
        let o = run_args("dual --group g52 --prime 3 --level 1");
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["report"]["labels"].as_array().unwrap().len(), 51);
        assert_eq!(v["report"]["peter_weyl"]["sum_d_squared"], 243);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args("dual --group g54 --prime 3 --level 1").code, 2);
        assert_eq!(run_args("dual --group nope").code, 2);
        assert_eq!(run_args("frobnicate").code, 2);
        assert_eq!(run_args("verify --suite nope").code, 2);
    }

    #[test]
    fn level_zero_dual() {
        let o = run_args("dual --group h2 --prime 3 --level 0");
        assert_eq!(o.code, 0);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["report"]["labels"].as_array().unwrap().len(), 1);
    }
}

//! Seeded property suites shared by the CLI and the acceptance tests.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dual::{enumerate_dual_ball, RepLabel};
use crate::error::{Error, Result};
use crate::group::{Coords, GroupId, GroupLaw};
use crate::oscint::{gaussian_case, random_tail, verify_aux_lemma, AuxLemma};
use crate::padic::{ipow, DualElem, Rat};
use crate::rep::{fourier_transform, plancherel, random_coords, synthesize, Rep, TestFunction};
use crate::vt::{
    canonical_directions, closed_form_eigenfunction, hermitian_eigen, hypoellipticity_margin, spectrum_report, sublaplacian_apply,
    sublaplacian_symbol, vt_apply, vt_eigenvalue,
};

pub const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Reps,
    Characters,
    Gaussians,
    Plancherel,
    Spectrum,
    Hypoelliptic,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Reps, Suite::Characters, Suite::Gaussians, Suite::Plancherel, Suite::Spectrum, Suite::Hypoelliptic];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Reps => "reps",
            Suite::Characters => "characters",
            Suite::Gaussians => "gaussians",
            Suite::Plancherel => "plancherel",
            Suite::Spectrum => "spectrum",
            Suite::Hypoelliptic => "hypoelliptic",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH.into_iter().chain([Suite::All]).find(|x| x.to_string() == s).ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub group: GroupId,
    pub prime: u64,
    pub level: u32,
    pub alpha: f64,
    pub seed: u64,
    /// Random points (or pairs) per label.
    pub samples: usize,
    /// Restrict per-label suites to this many nontrivial labels plus the trivial one.
    pub label_samples: Option<usize>,
    /// Random Gaussian cases.
    pub draws: usize,
    /// Random parameters per auxiliary identity.
    pub aux_draws: usize,
    pub cap: u128,
}

impl SuiteConfig {
    pub fn new(group: GroupId, prime: u64, level: u32) -> Self {
        SuiteConfig {
            group,
            prime,
            level,
            alpha: 1.0,
            seed: 0,
            samples: 100,
            label_samples: None,
            draws: 50,
            aux_draws: 10,
            cap: crate::dual::DEFAULT_CAP,
        }
    }

    pub fn law(&self) -> GroupLaw {
        GroupLaw::new(self.group)
    }
}

/// The worst value of one property over the cases it was evaluated on.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub property: String,
    pub cases: usize,
    pub worst: f64,
    pub worst_case: Option<String>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(property: &str) -> Self {
        Check { property: property.into(), cases: 0, worst: 0.0, worst_case: None, tolerance: TOL, pass: true, note: None }
    }

    fn tol(mut self, t: f64) -> Self {
        self.tolerance = t;
        self
    }

    /// Record one residual; NaN counts as a failure.
    fn record(&mut self, value: f64, case: impl fmt::Display) {
        self.cases += 1;
        let v = if value.is_nan() { f64::INFINITY } else { value };
        if self.worst_case.is_none() || v > self.worst {
            self.worst = v;
            self.worst_case = Some(case.to_string());
        }
        self.pass = self.worst < self.tolerance;
    }

    fn merge(&mut self, other: Check) {
        self.cases += other.cases;
        if let Some(c) = other.worst_case {
            if self.worst_case.is_none() || other.worst > self.worst {
                self.worst = other.worst;
                self.worst_case = Some(c);
            }
        }
        self.pass = self.worst < self.tolerance;
        if self.note.is_none() {
            self.note = other.note;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub group: String,
    pub prime: u64,
    pub level: u32,
    pub alpha: f64,
    pub seed: u64,
    pub labels: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn report(cfg: &SuiteConfig, suite: Suite, labels: usize, checks: Vec<Check>) -> SuiteReport {
    SuiteReport {
        suite,
        group: cfg.group.to_string(),
        prime: cfg.prime,
        level: cfg.level,
        alpha: cfg.alpha,
        seed: cfg.seed,
        labels,
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Labels of `B(n)`, optionally thinned to a seeded sample.
pub fn select_labels(cfg: &SuiteConfig) -> Result<Vec<RepLabel>> {
    let law = cfg.law();
    law.check_prime(cfg.prime)?;
    let all = enumerate_dual_ball(&law, cfg.prime, cfg.level, cfg.cap)?;
    let Some(k) = cfg.label_samples else { return Ok(all) };
    if k + 1 >= all.len() {
        return Ok(all);
    }
    let mut idx: Vec<usize> = (1..all.len()).collect();
    idx.shuffle(&mut rng_for(cfg.seed, u64::MAX));
    let mut keep: Vec<usize> = idx[..k].to_vec();
    keep.push(0);
    keep.sort_unstable();
    Ok(keep.into_iter().map(|i| all[i].clone()).collect())
}

/// Run per-label work in parallel with a per-label random stream, merging
/// the resulting checks in label order.
fn per_label<F>(cfg: &SuiteConfig, labels: &[RepLabel], names: &[&str], f: F) -> Result<Vec<Check>>
where
    F: Fn(&Rep, &mut ChaCha8Rng, &mut [Check]) -> Result<()> + Sync,
{
    let parts: Vec<Result<Vec<Check>>> = labels
        .par_iter()
        .enumerate()
        .map(|(i, l)| {
            let rep = Rep::new(l)?;
            let mut rng = rng_for(cfg.seed, i as u64);
            let mut checks: Vec<Check> = names.iter().map(|n| Check::new(n)).collect();
            f(&rep, &mut rng, &mut checks)?;
            Ok(checks)
        })
        .collect();
    let mut out: Vec<Check> = names.iter().map(|n| Check::new(n)).collect();
    for part in parts {
        for (o, c) in out.iter_mut().zip(part?) {
            o.merge(c);
        }
    }
    Ok(out)
}

fn kernel_element(rep: &Rep, rng: &mut ChaCha8Rng) -> Coords {
    let pl = ipow(rep.prime(), rep.level());
    let mut x = random_coords(&rep.law(), &rep.md, rng);
    for v in x.iter_mut() {
        *v = (*v * pl) % rep.md.m;
    }
    x
}

pub fn suite_reps(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let labels = select_labels(cfg)?;
    let checks = per_label(cfg, &labels, &["homomorphism", "unitarity", "kernel", "vt_eigenvalue"], |rep, rng, c| {
        let law = rep.law();
        for _ in 0..cfg.samples {
            let x = random_coords(&law, &rep.md, rng);
            let y = random_coords(&law, &rep.md, rng);
            c[0].record(rep.hom_residual(&x, &y), &rep.label);
            c[1].record(rep.unitarity_residual(&x), &rep.label);
            let k = kernel_element(rep, rng);
            c[2].record(if rep.is_identity_at(&k) { 0.0 } else { 1.0 }, &rep.label);
        }
        if rep.level() > 0 {
            let m = rep.level();
            let lam = vt_eigenvalue(rep.prime(), law.dim as u32, cfg.alpha, m);
            let (h, h2) = (rng.gen_range(0..rep.dim), rng.gen_range(0..rep.dim));
            let f = |x: &Coords| rep.matrix_coefficient(h, h2, x).unwrap_or_default();
            for _ in 0..cfg.samples.min(4) {
                let x = random_coords(&law, &rep.md, rng);
                let v = vt_apply(&law, rep.prime(), cfg.alpha, m, f, &x)?;
                c[3].record((v - f(&x) * lam).norm(), &rep.label);
            }
        }
        Ok(())
    })?;
    let mut checks = checks;
    checks[2].tolerance = 0.5;
    checks[2].pass = checks[2].worst < 0.5;
    Ok(report(cfg, Suite::Reps, labels.len(), checks))
}

pub fn suite_characters(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let labels = select_labels(cfg)?;
    let checks = per_label(cfg, &labels, &["character_l2_norm", "character_closed_form"], |rep, rng, c| {
        c[0].record((rep.character_l2_norm(cfg.cap)? - 1.0).abs(), &rep.label);
        for _ in 0..cfg.samples {
            let x = random_coords(&rep.law(), &rep.md, rng);
            c[1].record((rep.trace(&x) - rep.character_closed_form(&x)).norm(), &rep.label);
        }
        Ok(())
    })?;
    Ok(report(cfg, Suite::Characters, labels.len(), checks))
}

pub fn suite_plancherel(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let law = cfg.law();
    law.check_prime(cfg.prime)?;
    let labels = enumerate_dual_ball(&law, cfg.prime, cfg.level, cfg.cap)?;
    let reps = labels.iter().map(Rep::new).collect::<Result<Vec<_>>>()?;
    let f = TestFunction::random(law, cfg.prime, cfg.level, cfg.seed);
    let mut pl = Check::new("plancherel");
    let (lhs, rhs) = plancherel(&f, &reps, cfg.cap)?;
    pl.record((lhs - rhs).abs(), format!("lhs={lhs} rhs={rhs}"));
    let coeffs = reps.iter().map(|r| fourier_transform(&f, r, cfg.cap)).collect::<Result<Vec<_>>>()?;
    let pairs: Vec<_> = reps.iter().zip(&coeffs).map(|(r, c)| (r, &c.matrix)).collect();
    let g = synthesize(law, cfg.prime, cfg.level, &pairs)?;
    let mut rt = Check::new("round_trip");
    let worst = f.values.iter().zip(&g.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    rt.record(worst, "pointwise");
    let small: Vec<RepLabel> = labels.into_iter().filter(|l| l.dim <= 64).collect();
    let mut schur = per_label(cfg, &small, &["schur_orthogonality"], |rep, _, c| {
        c[0].record(rep.schur_residual(cfg.cap)?, &rep.label);
        Ok(())
    })?;
    Ok(report(cfg, Suite::Plancherel, reps.len(), vec![pl, rt, schur.remove(0)]))
}

/// Random Gaussian cases with `|a| <= p^4`, `|b| <= p^4` and `|gamma| <= 2`,
/// plus random parameters for each auxiliary identity.
pub fn suite_gaussians(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let p = cfg.prime;
    let cases: Vec<(Rat, Rat, i32)> = {
        let mut rng = rng_for(cfg.seed, 0);
        (0..cfg.draws).map(|_| (random_tail(&mut rng, p, 4), random_tail(&mut rng, p, 4), rng.gen_range(-2..=2))).collect()
    };
    let mut g = Check::new("gaussian_vs_oracle");
    for (a, b, gamma) in &cases {
        let c = gaussian_case(p, a, b, *gamma, true, cfg.cap, TOL)?;
        let v = if c.doubling_delta.unwrap_or(0.0) < 1e-12 { c.abs_diff.unwrap_or(0.0) } else { f64::INFINITY };
        g.record(v, format!("a={} b={} gamma={}", c.a, c.b, c.gamma));
    }
    let mut checks = vec![g];
    for (j, lemma) in AuxLemma::ALL.into_iter().enumerate() {
        let mut rng = rng_for(cfg.seed, 1 + j as u64);
        let mut c = Check::new(&format!("aux_{lemma}"));
        let mut drawn = 0;
        while drawn < cfg.aux_draws {
            let xi: Vec<Rat> = (0..lemma.arity()).map(|_| random_tail(&mut rng, p, 2)).collect();
            if !lemma.in_regime(p, &xi) {
                continue;
            }
            drawn += 1;
            let r = verify_aux_lemma(lemma, p, &xi, cfg.cap)?;
            c.record(r.abs_diff, format!("({})", r.xi.join(",")));
        }
        if lemma == AuxLemma::G54 {
            c.note = Some("parameters drawn with xi1 = 0 or |xi1| <= |xi3|".into());
        }
        checks.push(c);
    }
    let mut rep = report(cfg, Suite::Gaussians, 0, checks);
    rep.group = String::new();
    Ok(rep)
}

fn symbol_eigenfunction_residual(rep: &Rep, dirs: &[Vec<u64>], alpha: f64, rng: &mut ChaCha8Rng, points: usize) -> Result<f64> {
    let sigma = sublaplacian_symbol(rep, dirs, alpha)?;
    let (vals, vecs) = hermitian_eigen(&sigma);
    let law = rep.law();
    let mut worst: f64 = 0.0;
    let j = rng.gen_range(0..vals.len());
    let v = vecs.column(j).into_owned();
    let h = rng.gen_range(0..rep.dim);
    let f = |x: &Coords| (rep.matrix(x) * &v)[h];
    for _ in 0..points {
        let x = random_coords(&law, &rep.md, rng);
        let lf = sublaplacian_apply(&law, rep.prime(), dirs, alpha, rep.md.n, f, &x)?;
        worst = worst.max((lf - f(&x) * vals[j]).norm());
    }
    Ok(worst)
}

fn closed_form_eigenfunction_residual(
    rep: &Rep,
    dirs: &[Vec<u64>],
    alpha: f64,
    rng: &mut ChaCha8Rng,
    points: usize,
) -> Result<Option<f64>> {
    if rep.is_induced() {
        return Ok(None);
    }
    let entries = match crate::vt::closed_form_spectrum(&rep.label, dirs, alpha) {
        Ok(e) => e,
        Err(Error::UnsupportedLaw(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let law = rep.law();
    let p = rep.prime();
    let picks: Vec<usize> =
        if entries.len() <= 8 { (0..entries.len()).collect() } else { (0..8).map(|_| rng.gen_range(0..entries.len())).collect() };
    let mut worst: f64 = 0.0;
    for i in picks {
        let en = &entries[i];
        let tau = en.tau.iter().map(|s| DualElem::parse(p, s)).collect::<Result<Vec<_>>>()?;
        let e = |x: &Coords| closed_form_eigenfunction(rep, &en.h_prime, &tau, x).unwrap_or_default();
        for _ in 0..points {
            let x = random_coords(&law, &rep.md, rng);
            let le = sublaplacian_apply(&law, p, dirs, alpha, rep.md.n, e, &x)?;
            worst = worst.max((le - e(&x) * en.value).norm());
        }
    }
    Ok(Some(worst))
}

/// Symbol against closed form for each label, plus the two eigenfunction
/// relations.
pub fn suite_spectrum(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let labels = select_labels(cfg)?;
    let law = cfg.law();
    let dirs = canonical_directions(&law);
    let names = ["closed_form_spectrum", "symbol_hermitian", "symbol_eigenfunction", "closed_form_eigenfunction"];
    let mut checks = per_label(cfg, &labels, &names, |rep, rng, c| {
        let r = spectrum_report(rep, &dirs, cfg.alpha, TOL)?;
        c[1].record(r.hermitian_residual, &rep.label);
        if r.eigenvalues_closed_form.is_some() {
            c[0].record(r.max_abs_diff.unwrap_or(f64::INFINITY), &rep.label);
        } else if c[0].note.is_none() {
            c[0].note = r.note.clone();
        }
        c[2].record(symbol_eigenfunction_residual(rep, &dirs, cfg.alpha, rng, 20)?, &rep.label);
        match closed_form_eigenfunction_residual(rep, &dirs, cfg.alpha, rng, 20)? {
            Some(v) => c[3].record(v, &rep.label),
            None if c[3].note.is_none() => c[3].note = Some("not evaluated for induced or unsupported labels".into()),
            None => {}
        }
        Ok(())
    })?;
    if law.id == GroupId::G56 {
        let m = hypoellipticity_margin(&law, cfg.prime, cfg.alpha, cfg.level, cfg.cap)?;
        let mut b = Check::new("lower_bound").tol(0.5);
        for row in &m.rows {
            b.record(if row.bound_ok == Some(false) { 1.0 } else { 0.0 }, &row.label);
        }
        b.note = Some(format!("c* = {}", m.c_star));
        checks.push(b);
    }
    Ok(report(cfg, Suite::Spectrum, labels.len(), checks))
}

pub fn suite_hypoelliptic(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let law = cfg.law();
    law.check_prime(cfg.prime)?;
    let m = hypoellipticity_margin(&law, cfg.prime, cfg.alpha, cfg.level, cfg.cap)?;
    let mut c = Check::new("c_star_positive").tol(0.5);
    c.record(if m.c_star > 1e-12 { 0.0 } else { 1.0 }, m.minimizer.as_ref().map(|l| l.to_string()).unwrap_or_default());
    c.note = Some(format!("c* = {}", m.c_star));
    let mut checks = vec![c];
    if law.id == GroupId::G56 {
        let mut b = Check::new("lower_bound").tol(0.5);
        for row in &m.rows {
            b.record(if row.bound_ok == Some(false) { 1.0 } else { 0.0 }, &row.label);
        }
        checks.push(b);
    }
    Ok(report(cfg, Suite::Hypoelliptic, m.rows.len() + 1, checks))
}

pub fn run_suite(cfg: &SuiteConfig, suite: Suite) -> Result<Vec<SuiteReport>> {
    match suite {
        Suite::Reps => Ok(vec![suite_reps(cfg)?]),
        Suite::Characters => Ok(vec![suite_characters(cfg)?]),
        Suite::Gaussians => Ok(vec![suite_gaussians(cfg)?]),
        Suite::Plancherel => Ok(vec![suite_plancherel(cfg)?]),
        Suite::Spectrum => Ok(vec![suite_spectrum(cfg)?]),
        Suite::Hypoelliptic => Ok(vec![suite_hypoelliptic(cfg)?]),
        Suite::All => Suite::EACH.iter().map(|s| run_suite(cfg, *s).map(|mut v| v.remove(0))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h1_suites_pass() {
        let mut cfg = SuiteConfig::new(GroupId::H(1), 3, 1);
        cfg.samples = 10;
        for s in [Suite::Reps, Suite::Characters, Suite::Plancherel, Suite::Hypoelliptic] {
            let r = run_suite(&cfg, s).unwrap().remove(0);
            assert!(r.pass, "{s}: {r:?}");
        }
    }

    #[test]
    fn empty_gaussian_suite_passes() {
        let mut cfg = SuiteConfig::new(GroupId::Zp(1), 5, 0);
        cfg.draws = 0;
        cfg.aux_draws = 0;
        let r = suite_gaussians(&cfg).unwrap();
        assert!(r.pass);
        assert!(r.checks.iter().all(|c| c.cases == 0));
    }

    #[test]
    fn symbol_eigenvectors_give_eigenfunctions() {
        let mut cfg = SuiteConfig::new(GroupId::B4, 3, 1);
        cfg.label_samples = Some(4);
        let r = suite_spectrum(&cfg).unwrap();
        let c = r.checks.iter().find(|c| c.property == "symbol_eigenfunction").unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn label_sampling_is_seeded() {
        let mut cfg = SuiteConfig::new(GroupId::H(1), 3, 2);
        cfg.label_samples = Some(5);
        let a = select_labels(&cfg).unwrap();
        assert_eq!(a.len(), 6);
        assert!(a[0].is_trivial());
        assert_eq!(a, select_labels(&cfg).unwrap());
    }
}

//! p-adic Gaussian integrals on disks and the L^2 identities for the
//! oscillatory integrals that appear in the characters of the Engel-type
//! groups, each paired with a brute-force Riemann-sum oracle.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{frac_part_rat, ipow, is_odd_prime, lambda_p, rat_norm, DualElem, PhaseRational, Rat};
use crate::phase::{PhasePoly, RatPoly, RootTable, MAX_VARS};
use crate::sum::det_sum;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A polynomial phase `u -> {P(u)}_p` in at most `MAX_VARS` variables.
#[derive(Clone, Debug)]
pub struct PhasePolynomial {
    pub prime: u64,
    pub nvars: usize,
    pub poly: RatPoly,
}

impl PhasePolynomial {
    pub fn new(prime: u64, nvars: usize) -> Result<Self> {
        if !is_odd_prime(prime) {
            return Err(Error::BadPrime(prime));
        }
        if nvars > MAX_VARS {
            return Err(Error::DimensionMismatch { expected: MAX_VARS, got: nvars });
        }
        Ok(PhasePolynomial { prime, nvars, poly: RatPoly::new() })
    }

    pub fn add(&mut self, c: Rat, vars: &[usize]) -> &mut Self {
        self.poly.add(c, vars);
        self
    }

    /// Smallest `r` such that the phase is constant on cosets of `p^r Z_p^n`.
    pub fn constancy_index(&self) -> u32 {
        self.poly.denom_exp(self.prime)
    }

    /// The phase of `P(p^gamma v)`, i.e. the integrand after rescaling the
    /// disk `p^gamma Z_p` onto `Z_p`.
    pub fn rescaled(&self, gamma: i32) -> PhasePolynomial {
        let p = Rat::from_integer(self.prime as i128);
        let scale = |deg: i32| if gamma * deg >= 0 { p.pow(gamma * deg) } else { Rat::from_integer(1) / p.pow(-gamma * deg) };
        let mut out = PhasePolynomial { prime: self.prime, nvars: self.nvars, poly: RatPoly::new() };
        for (c, m) in &self.poly.terms {
            let deg: i32 = m.iter().map(|&k| k as i32).sum();
            out.poly.terms.push((c * scale(deg), *m));
        }
        out
    }

    pub fn eval(&self, u: &[u64]) -> Result<PhaseRational> {
        Ok(self.poly.compile(self.prime)?.eval(&pad(u)))
    }
}

fn pad(u: &[u64]) -> [u64; MAX_VARS] {
    let mut v = [0u64; MAX_VARS];
    v[..u.len()].copy_from_slice(u);
    v
}

fn decode(mut idx: u64, pr: u64, n: usize, out: &mut [u64]) {
    for j in (0..n).rev() {
        out[j] = idx % pr;
        idx /= pr;
    }
}

fn points(p: u64, r: u32, n: usize, cap: u128) -> Result<u64> {
    let need = (ipow(p, r) as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if need > cap {
        return Err(Error::ResourceCap { what: "oracle points".into(), need, cap });
    }
    Ok(need as u64)
}

/// `p^{-r n} sum_{u mod p^r} e^{2 pi i {P(u)}_p}`, the integral of the phase
/// over `(p^gamma Z_p)^n` computed after rescaling, times `p^{-gamma n}`.
pub fn riemann_oscillatory_oracle(phase: &PhasePolynomial, gamma: i32, r: u32, cap: u128) -> Result<Complex64> {
    let scaled = phase.rescaled(gamma);
    let e = scaled.constancy_index().max(r);
    let compiled = PhasePoly::compile(&scaled.poly, phase.prime, e)?;
    let roots = RootTable::new(compiled.pe);
    let n = phase.nvars;
    let pr = ipow(phase.prime, r);
    let total = points(phase.prime, r, n, cap)?;
    let s = det_sum(total, ZERO, |i| {
        let mut u = [0u64; MAX_VARS];
        decode(i, pr, n, &mut u);
        roots.get(compiled.eval_tail(&u))
    });
    let measure = (phase.prime as f64).powi(-gamma * n as i32);
    Ok(s / total as f64 * measure)
}

/// Oracle at the default resolution (constancy index + 1) together with the
/// change observed at one more digit.
pub fn riemann_oracle_checked(phase: &PhasePolynomial, gamma: i32, cap: u128) -> Result<(Complex64, f64)> {
    let r = phase.rescaled(gamma).constancy_index() + 1;
    let a = riemann_oscillatory_oracle(phase, gamma, r, cap)?;
    let b = riemann_oscillatory_oracle(phase, gamma, r + 1, cap)?;
    Ok((a, (a - b).norm()))
}

/// `Lambda(a, b) = lambda_p(a) |a|^{-1/2} e^{2 pi i {-b^2/4a}_p}`.
pub fn gaussian_lambda(p: u64, a: &Rat, b: &Rat) -> Result<Complex64> {
    let lam = lambda_p(p, a)?;
    let phase = frac_part_rat(p, &(-(b * b) / (a * Rat::from_integer(4))));
    Ok(lam * rat_norm(p, a).powf(-0.5) * phase.to_complex())
}

/// `int_{p^gamma Z_p} e^{2 pi i {a u^2 + b u}_p} du` in closed form.
pub fn gaussian_disk_integral(p: u64, a: &Rat, b: &Rat, gamma: i32) -> Result<Complex64> {
    if !is_odd_prime(p) {
        return Err(Error::BadPrime(p));
    }
    let pf = p as f64;
    let a_norm = rat_norm(p, a);
    if a_norm <= pf.powi(2 * gamma) {
        let inside = rat_norm(p, b) <= pf.powi(gamma);
        return Ok(Complex64::new(if inside { pf.powi(-gamma) } else { 0.0 }, 0.0));
    }
    if rat_norm(p, &(b / a)) > pf.powi(-gamma) {
        return Ok(ZERO);
    }
    gaussian_lambda(p, a, b)
}

/// The phase `a u^2 + b u` in one variable.
pub fn gaussian_phase(p: u64, a: &Rat, b: &Rat) -> Result<PhasePolynomial> {
    let mut ph = PhasePolynomial::new(p, 1)?;
    ph.add(*a, &[0, 0]).add(*b, &[0]);
    Ok(ph)
}

/// Closed form against oracle for one Gaussian case.
#[derive(Clone, Debug, Serialize)]
pub struct GaussianCase {
    pub prime: u64,
    pub a: String,
    pub b: String,
    pub gamma: i32,
    pub closed_form: [f64; 2],
    pub oracle: Option<[f64; 2]>,
    pub abs_diff: Option<f64>,
    pub doubling_delta: Option<f64>,
    pub pass: bool,
}

pub fn gaussian_case(p: u64, a: &Rat, b: &Rat, gamma: i32, with_oracle: bool, cap: u128, tol: f64) -> Result<GaussianCase> {
    let cf = gaussian_disk_integral(p, a, b, gamma)?;
    let (oracle, delta) = if with_oracle {
        let (o, d) = riemann_oracle_checked(&gaussian_phase(p, a, b)?, gamma, cap)?;
        (Some(o), Some(d))
    } else {
        (None, None)
    };
    let abs_diff = oracle.map(|o| (o - cf).norm());
    Ok(GaussianCase {
        prime: p,
        a: rat_string(a),
        b: rat_string(b),
        gamma,
        closed_form: [cf.re, cf.im],
        oracle: oracle.map(|o| [o.re, o.im]),
        abs_diff,
        doubling_delta: delta,
        pass: abs_diff.is_none_or(|d| d < tol) && delta.is_none_or(|d| d < 1e-12),
    })
}

pub fn rat_string(q: &Rat) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `a`, `a/b` or a decimal-free p-power tail into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// The oscillatory-integral L^2 identities.
///
/// Each is `int |int_{Z_p} e^{2 pi i {P(x, u)}_p} du|^2 dx = ||xi||_p^{-1}`
/// for a phase `P` linear in the outer variables `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuxLemma {
    /// `(xi3, xi4)`: `(xi3 x2 + xi4 x3) u + xi4 x2 u^2 / 2` over `(x2, x3)`.
    B4,
    /// `(xi4, xi5)`: `(xi4 x2 + xi5 x4) u` over `(x2, x4)`.
    G53,
    /// `(xi1, xi2, xi3)`: `xi1 x1 u^2 + (xi2 x1 + xi3 x2) u` over `(x1, x2)`.
    /// The identity requires `xi1 = 0` or `|xi1| <= |xi3|`.
    G54,
    /// `(xi3, xi4, xi5)`: `(xi3 x2 + xi4 x3 + xi5 x4) u + xi4 x2 u^2 / 2` over `(x2, x3, x4)`.
    G56,
}

impl AuxLemma {
    pub const ALL: [AuxLemma; 4] = [AuxLemma::B4, AuxLemma::G53, AuxLemma::G54, AuxLemma::G56];

    pub fn arity(self) -> usize {
        match self {
            AuxLemma::B4 | AuxLemma::G53 => 2,
            AuxLemma::G54 | AuxLemma::G56 => 3,
        }
    }

    /// Number of outer variables.
    pub fn outer(self) -> usize {
        match self {
            AuxLemma::G56 => 3,
            _ => 2,
        }
    }

    /// The phase in `(x..., u)`, with `u` the last variable.
    pub fn phase(self, p: u64, xi: &[Rat]) -> Result<PhasePolynomial> {
        if xi.len() != self.arity() {
            return Err(Error::DimensionMismatch { expected: self.arity(), got: xi.len() });
        }
        let half = Rat::new(1, 2);
        let mut ph = PhasePolynomial::new(p, self.outer() + 1)?;
        match self {
            AuxLemma::B4 => {
                let u = 2;
                ph.add(xi[0], &[0, u]).add(xi[1], &[1, u]).add(xi[1] * half, &[0, u, u]);
            }
            AuxLemma::G53 => {
                let u = 2;
                ph.add(xi[0], &[0, u]).add(xi[1], &[1, u]);
            }
            AuxLemma::G54 => {
                let u = 2;
                ph.add(xi[0], &[0, u, u]).add(xi[1], &[0, u]).add(xi[2], &[1, u]);
            }
            AuxLemma::G56 => {
                let u = 3;
                ph.add(xi[0], &[0, u]).add(xi[1], &[1, u]).add(xi[2], &[2, u]).add(xi[1] * half, &[0, u, u]);
            }
        }
        Ok(ph)
    }

    /// Whether the identity is claimed for these parameters.
    pub fn in_regime(self, p: u64, xi: &[Rat]) -> bool {
        match self {
            AuxLemma::G54 => *xi[0].numer() == 0 || rat_norm(p, &xi[0]) <= rat_norm(p, &xi[2]),
            _ => true,
        }
    }
}

impl fmt::Display for AuxLemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AuxLemma::B4 => "b4",
            AuxLemma::G53 => "g53",
            AuxLemma::G54 => "g54",
            AuxLemma::G56 => "g56",
        };
        f.write_str(s)
    }
}

impl FromStr for AuxLemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AuxLemma::ALL
            .into_iter()
            .find(|l| l.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown auxiliary identity {s:?}")))
    }
}

/// `int_{Z_p^k} |int_{Z_p} e^{2 pi i {P(x, u)}_p} du|^2 dx`, with the last
/// variable of `phase` integrated inside the modulus.
pub fn nested_l2_oracle(phase: &PhasePolynomial, r: u32, cap: u128) -> Result<f64> {
    let p = phase.prime;
    let outer = phase.nvars - 1;
    let e = phase.constancy_index().max(r);
    let compiled = PhasePoly::compile(&phase.poly, p, e)?;
    let roots = RootTable::new(compiled.pe);
    let pr = ipow(p, r);
    let n_out = points(p, r, outer, cap)?;
    points(p, r, phase.nvars, cap)?;
    let s = det_sum(n_out, 0.0, |i| {
        let mut v = [0u64; MAX_VARS];
        decode(i, pr, outer, &mut v);
        let mut inner = ZERO;
        for u in 0..pr {
            v[outer] = u;
            inner += roots.get(compiled.eval_tail(&v));
        }
        (inner / pr as f64).norm_sqr()
    });
    Ok(s / n_out as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct AuxLemmaReport {
    pub lemma: AuxLemma,
    pub prime: u64,
    pub xi: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub in_regime: bool,
    pub pass: bool,
}

/// Evaluate one identity: lhs by the nested oracle at the constancy index,
/// rhs `= ||xi||_p^{-1}`.
pub fn verify_aux_lemma(lemma: AuxLemma, p: u64, xi: &[Rat], cap: u128) -> Result<AuxLemmaReport> {
    let ph = lemma.phase(p, xi)?;
    let r = ph.constancy_index().max(1);
    let lhs = nested_l2_oracle(&ph, r, cap)?;
    let norm = xi.iter().map(|q| rat_norm(p, q)).fold(1.0, f64::max);
    let rhs = 1.0 / norm;
    let abs_diff = (lhs - rhs).abs();
    Ok(AuxLemmaReport {
        lemma,
        prime: p,
        xi: xi.iter().map(rat_string).collect(),
        lhs,
        rhs,
        abs_diff,
        in_regime: lemma.in_regime(p, xi),
        pass: abs_diff < 1e-9,
    })
}

/// A random canonical dual element with `|q|_p <= p^kmax`.
pub fn random_tail<R: rand::Rng>(rng: &mut R, p: u64, kmax: u32) -> Rat {
    let k = rng.gen_range(0..=kmax);
    let pk = ipow(p, k);
    let num = rng.gen_range(0..pk);
    DualElem::new(p, num as i128, k).to_rat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CAP: u128 = 10_000_000;

    fn q(s: &str) -> Rat {
        parse_rat(s).unwrap()
    }

    #[test]
    fn gaussian_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(gaussian_disk_integral(3, &q("0"), &q("0"), 0).unwrap(), one);
        assert_eq!(gaussian_disk_integral(5, &q("7"), &q("1/5"), 0).unwrap(), ZERO);
        let v = gaussian_disk_integral(5, &q("1/25"), &q("0"), 0).unwrap();
        assert!((v - one / 5.0).norm() < 1e-15);
        let o = riemann_oscillatory_oracle(&gaussian_phase(5, &q("1/25"), &q("0")).unwrap(), 0, 2, CAP).unwrap();
        assert!((o - one / 5.0).norm() < 1e-12);
        let o = riemann_oscillatory_oracle(&gaussian_phase(5, &q("0"), &q("1/5")).unwrap(), 0, 1, CAP).unwrap();
        assert!(o.norm() < 1e-12);
        let c = PhasePolynomial::new(7, 2).unwrap();
        assert!((riemann_oscillatory_oracle(&c, 0, 2, CAP).unwrap() - one).norm() < 1e-12);
    }

    #[test]
    fn gauss_sum_at_three() {
        // sum_{u mod 3} e(u^2/3) / 3 = i / sqrt(3)
        let v = gaussian_disk_integral(3, &q("1/3"), &q("0"), 0).unwrap();
        assert!((v - Complex64::new(0.0, 1.0 / 3f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn aux_examples() {
        let r = verify_aux_lemma(AuxLemma::B4, 3, &[q("1/3"), q("1")], CAP).unwrap();
        assert!((r.lhs - 1.0 / 3.0).abs() < 1e-12 && r.pass);
        for l in AuxLemma::ALL {
            let z = vec![q("0"); l.arity()];
            let r = verify_aux_lemma(l, 5, &z, CAP).unwrap();
            assert!((r.lhs - 1.0).abs() < 1e-12, "{l}");
        }
        let r = verify_aux_lemma(AuxLemma::G56, 3, &[q("1/9"), q("1/3"), q("2")], CAP).unwrap();
        assert!((r.lhs - 1.0 / 9.0).abs() < 1e-12 && r.pass);
        let r = verify_aux_lemma(AuxLemma::G53, 3, &[q("2/9"), q("1/3")], CAP).unwrap();
        assert!((r.lhs - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn g54_identity_fails_outside_regime() {
        let xi = [q("1/3"), q("0"), q("0")];
        assert!(!AuxLemma::G54.in_regime(3, &xi));
        let r = verify_aux_lemma(AuxLemma::G54, 3, &xi, CAP).unwrap();
        assert!((r.lhs - 5.0 / 9.0).abs() < 1e-12);
        assert!(!r.pass);
    }

    #[test]
    fn rescaling_moves_the_disk() {
        let ph = gaussian_phase(3, &q("1/3"), &q("1/9")).unwrap();
        let a = riemann_oscillatory_oracle(&ph, 1, 2, CAP).unwrap();
        let cf = gaussian_disk_integral(3, &q("1/3"), &q("1/9"), 1).unwrap();
        assert!((a - cf).norm() < 1e-12);
    }

    fn arb_case() -> impl Strategy<Value = (u64, u64, u32, u64, u32, i32)> {
        (prop::sample::select(vec![3u64, 5]), any::<u64>(), 0u32..=4, any::<u64>(), 0u32..=4, -2i32..=2)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn gaussian_matches_oracle((p, an, ak, bn, bk, g) in arb_case()) {
            let a = DualElem::new(p, (an % ipow(p, ak)) as i128, ak).to_rat();
            let b = DualElem::new(p, (bn % ipow(p, bk)) as i128, bk).to_rat();
            let c = gaussian_case(p, &a, &b, g, true, 1 << 26, 1e-9).unwrap();
            prop_assert!(c.pass, "{c:?}");
        }

        #[test]
        fn lambda_has_modulus(p in prop::sample::select(vec![3u64, 5, 7, 11]), n in 1i128..1000, k in 0u32..4, up in any::<bool>()) {
            let pk = ipow(p, k) as i128;
            let a = if up { Rat::new(n, pk) } else { Rat::from_integer(n * pk) };
            let v = gaussian_lambda(p, &a, &Rat::from_integer(0)).unwrap();
            prop_assert!((v.norm() - rat_norm(p, &a).powf(-0.5)).abs() < 1e-12);
        }

        #[test]
        fn oracle_translation_invariant(p in prop::sample::select(vec![3u64, 5]), an in 0u64..25, bn in 0u64..25, s in 0i128..25) {
            let (a, b) = (Rat::new(an as i128, (p * p) as i128), Rat::new(bn as i128, (p * p) as i128));
            let ph = gaussian_phase(p, &a, &b).unwrap();
            let mut sh = PhasePolynomial::new(p, 1).unwrap();
            let sr = Rat::from_integer(s);
            sh.add(a, &[0, 0]).add(a * sr * Rat::from_integer(2) + b, &[0]).add(a * sr * sr + b * sr, &[]);
            let x = riemann_oscillatory_oracle(&ph, 0, 3, CAP).unwrap();
            let y = riemann_oscillatory_oracle(&sh, 0, 3, CAP).unwrap();
            prop_assert!((x - y).norm() < 1e-12);
        }
    }
}

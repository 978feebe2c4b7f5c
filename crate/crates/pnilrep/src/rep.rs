//! Explicit realizations of the irreducible representations, characters,
//! the group Fourier transform on finite quotients and Fourier synthesis.
//!
//! Every representation here is monomial: `pi(x)` has exactly one nonzero
//! entry per column, a root of unity. Most labels are realized on
//! `prod Z/p^{k_i}` by
//!
//! `pi(x)[a][a + s(x)] = e(P(x, a))`
//!
//! with a phase polynomial `P` and a shift `s(x)` given by the first one or
//! two coordinates. The remaining labels (generic `G^{5,4}` labels,
//! `G^{5,3}` labels with `|xi4| > |xi5| > 1` and `G^{5,6}` labels with
//! `xi5` nontrivial) are induced from a character of a normal subgroup cut
//! out by a possibly skew lattice in the `(x1, x2)` plane.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{G56Exps, RepLabel};
use crate::error::{Error, Result};
use crate::group::{quotient_coords, quotient_index, Coords, GroupId, GroupLaw, MAX_DIM};
use crate::padic::{ipow, Modulus, PhaseRational, Rat};
use crate::phase::{PhasePoly, RatPoly, RootTable, MAX_VARS};
use crate::sum::{det_fold, det_sum};
use crate::vt::integrate_locally_constant;

/// Phase-polynomial variable indices of the index-set coordinates.
pub const U1: usize = 5;
pub const U2: usize = 6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
enum Kind {
    Monomial {
        shift: Vec<usize>,
    },
    Induced {
        /// Whether the lattice is parametrized by `x1` rather than `x2`.
        by_x1: bool,
        r: u64,
        /// When set, the skew term is `r * (g - a) / p^s` with `a` the
        /// reduced leading coordinate, so that `r` may stand for a
        /// non-integral slope times `p^s`.
        rel: Option<u32>,
        sigma: Vec<Coords>,
        sigma_inv: Vec<Coords>,
    },
}

/// A concrete unitary representation attached to a label.
#[derive(Clone, Debug)]
pub struct Rep {
    pub label: RepLabel,
    pub md: Modulus,
    pub dim: usize,
    sizes: Vec<u64>,
    kind: Kind,
    poly: PhasePoly,
    roots: RootTable,
}

fn b4_terms(poly: &mut RatPoly, x3: Rat, x4: Rat) {
    let half = Rat::new(1, 2);
    poly.add(x3, &[U1, 1]).add(x4, &[U1, 2]).add(x4 * half, &[U1, U1, 1]);
}

impl Rep {
    pub fn new(label: &RepLabel) -> Result<Rep> {
        let p = label.prime;
        let law = label.law;
        law.check_prime(p)?;
        let q = |i: usize| label.component(i).to_rat();
        let k = |i: usize| label.component(i).denom_exp;
        let half = Rat::new(1, 2);
        let sixth = Rat::new(1, 6);
        let mut poly = RatPoly::new();
        for i in 0..law.dim {
            poly.add(q(i), &[i]);
        }
        let sizes: Vec<u64> = label.index_exps.iter().map(|e| ipow(p, *e)).collect();
        let mut induced = None;
        let shift = match law.id {
            GroupId::Zp(_) => vec![],
            GroupId::H(d) => {
                let d = d as usize;
                for i in 0..d {
                    poly.add(q(2 * d), &[U1 + i, d + i]);
                }
                (0..d).collect()
            }
            GroupId::B4 => {
                b4_terms(&mut poly, q(2), q(3));
                vec![0]
            }
            GroupId::G52 => {
                poly.add(q(3), &[U1, 1]).add(q(4), &[U1, 2]);
                vec![0]
            }
            GroupId::G53 if label.component(3).is_trivial() || k(4) == 0 => {
                poly.add(q(3), &[U1, 1]).add(q(4), &[U1, 3]).add(q(4) * half, &[U1, U1, 1]).add(q(4), &[U2, 2]);
                vec![0, 1]
            }
            GroupId::G53 => {
                induced = Some((true, Rat::from_integer(0), None));
                vec![]
            }
            GroupId::G54 if k(4) == 0 => {
                b4_terms(&mut poly, q(2), q(3));
                vec![0]
            }
            GroupId::G54 => {
                let (e3, e4, e5) = (q(2), q(3), q(4));
                let by_x1 = k(3) <= k(4);
                let (r, c3, var) = if by_x1 { (-(e4 / e5), -(e4 * e4) / (e5 * 6), 0) } else { (-(e5 / e4), (e5 * e5) / (e4 * 6), 1) };
                poly.add(c3, &[var, var, var]).add(-half * e3 * r, &[var, var]);
                induced = Some((by_x1, r, None));
                vec![]
            }
            GroupId::G55 => {
                b4_terms(&mut poly, q(2), q(3));
                poly.add(q(4), &[U1, 3]).add(q(4) * half, &[U1, U1, 2]).add(q(4) * sixth, &[U1, U1, U1, 1]);
                vec![0]
            }
            GroupId::G56 if k(4) == 0 => {
                b4_terms(&mut poly, q(2), q(3));
                vec![0]
            }
            GroupId::G56 => {
                let (e3, e4, e5) = (q(2), q(3), q(4));
                let mu = e4 / e5;
                poly.add(half * e3 * mu, &[0, 0]);
                let m = G56Exps::new(k(2) as i64, k(3) as i64, k(4) as i64).m as u32;
                let scale = Rat::from_integer(ipow(p, m) as i128);
                induced = Some((true, -mu * scale, Some(m)));
                vec![]
            }
        };
        let e = poly.denom_exp(p);
        let d_exp: u32 = label.index_exps.iter().sum();
        let md = Modulus::new(p, label.level.max(e).max(d_exp) + 2)?;
        let poly = poly.compile(p)?;
        let kind = match induced {
            None => Kind::Monomial { shift },
            Some((by_x1, r, rel)) => {
                let r = md.from_rat(&r)?;
                let mut sigma = Vec::new();
                for a in 0..sizes[0] {
                    for b in 0..sizes[1] {
                        let mut s = [0u64; MAX_DIM];
                        let skew = if rel.is_some() { b } else { md.add(md.mul(r, a), b) };
                        if by_x1 {
                            s[0] = a;
                            s[1] = skew;
                        } else {
                            s[0] = skew;
                            s[1] = a;
                        }
                        sigma.push(s);
                    }
                }
                let sigma_inv = sigma.iter().map(|s| law.inverse(&md, s)).collect();
                Kind::Induced { by_x1, r, rel, sigma, sigma_inv }
            }
        };
        let dim = label.dim as usize;
        let roots = RootTable::new(poly.pe);
        Ok(Rep { label: label.clone(), md, dim, sizes, kind, poly, roots })
    }

    pub fn law(&self) -> GroupLaw {
        self.label.law
    }

    pub fn prime(&self) -> u64 {
        self.label.prime
    }

    /// Whether the realization is induced rather than given by a shift.
    pub fn is_induced(&self) -> bool {
        matches!(self.kind, Kind::Induced { .. })
    }

    fn reduce(&self, x: &Coords) -> Coords {
        x.map(|v| v % self.md.m)
    }

    fn tuple(&self, mut idx: usize) -> [u64; 2] {
        let mut t = [0u64; 2];
        for i in (0..self.sizes.len()).rev() {
            t[i] = idx as u64 % self.sizes[i];
            idx /= self.sizes[i] as usize;
        }
        t
    }

    fn linear(&self, t: &[u64; 2]) -> usize {
        let mut idx = 0u64;
        for (i, s) in self.sizes.iter().enumerate() {
            idx = idx * s + t[i];
        }
        idx as usize
    }

    fn coset(&self, g: &Coords) -> usize {
        match &self.kind {
            Kind::Induced { by_x1, r, rel, .. } => {
                let md = &self.md;
                let (a, b) = if *by_x1 { (g[0], g[1]) } else { (g[1], g[0]) };
                let a0 = a % self.sizes[0];
                let lin = match rel {
                    Some(s) => md.mul(*r, (a - a0) / ipow(self.prime(), *s)),
                    None => md.mul(*r, a),
                };
                let t = [a0, md.sub(b, lin) % self.sizes[1]];
                self.linear(&t)
            }
            Kind::Monomial { .. } => unreachable!("cosets belong to induced realizations"),
        }
    }

    /// Row index and phase numerator (over `p^e`) of the nonzero entry in column `c`.
    pub fn column_tail(&self, x: &Coords, c: usize) -> (usize, u64) {
        let x = self.reduce(x);
        match &self.kind {
            Kind::Monomial { shift } => {
                let b = self.tuple(c);
                let mut a = [0u64; 2];
                let mut vars = [0u64; MAX_VARS];
                vars[..MAX_DIM].copy_from_slice(&x);
                for (i, &s) in shift.iter().enumerate() {
                    let n = self.sizes[i];
                    a[i] = (b[i] + n - x[s] % n) % n;
                    vars[U1 + i] = a[i];
                }
                (self.linear(&a), self.poly.eval_tail(&vars))
            }
            Kind::Induced { sigma, sigma_inv, .. } => {
                let law = self.law();
                let g = law.star(&self.md, &x, &sigma[c]);
                let v = self.coset(&g);
                let h = law.star(&self.md, &sigma_inv[v], &g);
                (v, self.eval_h(&h))
            }
        }
    }

    /// `P(x, u)` as a phase numerator over `p^e`, for shift realizations.
    pub fn phase_poly_tail(&self, x: &Coords, u: &[u64]) -> Option<u64> {
        if self.is_induced() {
            return None;
        }
        let mut vars = [0u64; MAX_VARS];
        vars[..MAX_DIM].copy_from_slice(&self.reduce(x));
        for (i, ui) in u.iter().enumerate() {
            vars[U1 + i] = *ui;
        }
        Some(self.poly.eval_tail(&vars))
    }

    /// Number of index factors and their sizes `p^{k_i}`.
    pub fn index_sizes(&self) -> &[u64] {
        &self.sizes
    }

    fn eval_h(&self, h: &Coords) -> u64 {
        let mut vars = [0u64; MAX_VARS];
        vars[..MAX_DIM].copy_from_slice(h);
        self.poly.eval_tail(&vars)
    }

    /// The nonzero entry of every column.
    pub fn columns(&self, x: &Coords) -> Vec<(usize, u64)> {
        (0..self.dim).map(|c| self.column_tail(x, c)).collect()
    }

    #[inline]
    pub fn root(&self, tail: u64) -> Complex64 {
        self.roots.get(tail)
    }

    pub fn phase(&self, tail: u64) -> PhaseRational {
        PhaseRational::new(self.prime(), tail as i128, self.poly.e)
    }

    pub fn matrix(&self, x: &Coords) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, ZERO);
        for (c, (r, t)) in self.columns(x).into_iter().enumerate() {
            m[(r, c)] = self.root(t);
        }
        m
    }

    fn check_index(&self, h: usize) -> Result<()> {
        if h >= self.dim {
            return Err(Error::IndexOutOfRange(h));
        }
        Ok(())
    }

    /// `pi(x)[h][h']` as an exact phase, or `None` where the indicator vanishes.
    pub fn matrix_coefficient_exact(&self, h: usize, h2: usize, x: &Coords) -> Result<Option<PhaseRational>> {
        self.check_index(h)?;
        self.check_index(h2)?;
        let (r, t) = self.column_tail(x, h2);
        Ok((r == h).then(|| self.phase(t)))
    }

    pub fn matrix_coefficient(&self, h: usize, h2: usize, x: &Coords) -> Result<Complex64> {
        Ok(self.matrix_coefficient_exact(h, h2, x)?.map(|q| q.to_complex()).unwrap_or(ZERO))
    }

    /// Whether the character can be nonzero at `x`; depends on `(x1, x2)` only.
    pub fn supported(&self, x: &Coords) -> bool {
        let x = self.reduce(x);
        match &self.kind {
            Kind::Monomial { shift } => shift.iter().enumerate().all(|(i, &s)| x[s].is_multiple_of(self.sizes[i])),
            Kind::Induced { .. } => {
                let mut g = [0u64; MAX_DIM];
                g[0] = x[0];
                g[1] = x[1];
                self.coset(&g) == 0
            }
        }
    }

    /// `Tr pi(x)` from the matrix action.
    pub fn trace(&self, x: &Coords) -> Complex64 {
        if !self.supported(x) {
            return ZERO;
        }
        let mut acc = ZERO;
        for c in 0..self.dim {
            let (r, t) = self.column_tail(x, c);
            if r == c {
                acc += self.root(t);
            }
        }
        acc
    }

    /// The closed-form character: `d` times the integral of `e(P(x, u))` over
    /// the index set when the shift vanishes, and the Frobenius sum of the
    /// inducing character over conjugates for induced labels.
    pub fn character_closed_form(&self, x: &Coords) -> Complex64 {
        if !self.supported(x) {
            return ZERO;
        }
        let x = self.reduce(x);
        match &self.kind {
            Kind::Monomial { .. } => {
                let mut vars = [0u64; MAX_VARS];
                vars[..MAX_DIM].copy_from_slice(&x);
                let ks = &self.label.index_exps;
                let r = ks.iter().copied().max().unwrap_or(0);
                let integral = integrate_locally_constant(self.prime(), ks.len(), r, |u| {
                    let mut v = vars;
                    for (i, ui) in u.iter().enumerate() {
                        v[U1 + i] = *ui;
                    }
                    self.root(self.poly.eval_tail(&v))
                });
                integral * self.dim as f64
            }
            Kind::Induced { sigma, sigma_inv, .. } => {
                let law = self.law();
                let mut acc = ZERO;
                for (s, si) in sigma.iter().zip(sigma_inv) {
                    let conj = law.star(&self.md, &law.star(&self.md, si, &x), s);
                    acc += self.root(self.eval_h(&conj));
                }
                acc
            }
        }
    }

    /// Resolution at which the representation is constant on cosets.
    pub fn level(&self) -> u32 {
        self.label.level
    }

    /// `int |chi|^2` as an exact coset average over `G / G(p^m Z_p)`,
    /// `m = level`, skipping the `(x1, x2)` cosets off the support.
    pub fn character_l2_norm(&self, cap: u128) -> Result<f64> {
        character_l2_norm_of(self.law(), self.prime(), self.level(), cap, |x| self.supported(x), |x| self.trace(x))
    }

    /// `int f(x) pi(x)^* dx` at resolution `max(f.m, level)`.
    pub fn fourier_transform(&self, f: &TestFunction, cap: u128) -> Result<DMatrix<Complex64>> {
        let law = self.law();
        let m = f.m.max(self.level());
        let pm = ipow(self.prime(), m);
        let total = (pm as u128).pow(law.dim as u32);
        if total > cap {
            return Err(Error::ResourceCap { what: "Fourier transform".into(), need: total, cap });
        }
        let d = self.dim;
        let acc = det_fold(
            total as u64,
            4096,
            || DMatrix::from_element(d, d, ZERO),
            |acc, i| {
                let x = quotient_coords(i, pm, law.dim);
                let fx = f.value(&x);
                if fx == ZERO {
                    return;
                }
                for (c, (r, t)) in self.columns(&x).into_iter().enumerate() {
                    acc[(c, r)] += fx * self.root(t).conj();
                }
            },
            |a, b| a + b,
        );
        Ok(acc / Complex64::new(total as f64, 0.0))
    }

    /// `max |<pi_{hh'}, pi_{kk'}> - delta/d|` over all coefficient pairs.
    pub fn schur_residual(&self, cap: u128) -> Result<f64> {
        let law = self.law();
        let pm = ipow(self.prime(), self.level());
        let total = (pm as u128).pow(law.dim as u32);
        let d = self.dim;
        if total > cap || d > 64 {
            return Err(Error::ResourceCap { what: "Schur Gram matrix".into(), need: total, cap });
        }
        let n = d * d;
        let gram = det_fold(
            total as u64,
            (total as u64).div_ceil(8).max(1),
            || DMatrix::from_element(n, n, ZERO),
            |acc, i| {
                let x = quotient_coords(i, pm, law.dim);
                let cols = self.columns(&x);
                for (c1, (r1, t1)) in cols.iter().enumerate() {
                    let a = self.root(*t1).conj();
                    for (c2, (r2, t2)) in cols.iter().enumerate() {
                        acc[(r1 * d + c1, r2 * d + c2)] += a * self.root(*t2);
                    }
                }
            },
            |a, b| a + b,
        ) / Complex64::new(total as f64, 0.0);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 / d as f64 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - want).norm());
            }
        }
        Ok(worst)
    }

    /// `|| pi(x y) - pi(x) pi(y) ||_F` with dense matrices.
    pub fn hom_residual(&self, x: &Coords, y: &Coords) -> f64 {
        let xy = self.law().star(&self.md, &self.reduce(x), &self.reduce(y));
        (self.matrix(&xy) - self.matrix(x) * self.matrix(y)).norm()
    }

    /// `|| pi(x) pi(x)^* - I ||_F`.
    pub fn unitarity_residual(&self, x: &Coords) -> f64 {
        let m = self.matrix(x);
        (&m * m.adjoint() - DMatrix::identity(self.dim, self.dim)).norm()
    }

    /// Exact test that `pi(x) = I`.
    pub fn is_identity_at(&self, x: &Coords) -> bool {
        self.columns(x).into_iter().enumerate().all(|(c, (r, t))| r == c && t == 0)
    }
}

/// Shared coset-average of `|chi|^2`, with a support filter on `(x1, x2)`.
pub(crate) fn character_l2_norm_of<S, T>(law: GroupLaw, p: u64, m: u32, cap: u128, supported: S, trace: T) -> Result<f64>
where
    S: Fn(&Coords) -> bool + Sync,
    T: Fn(&Coords) -> Complex64 + Sync,
{
    let pm = ipow(p, m);
    let total = (pm as u128).pow(law.dim as u32);
    if total > cap {
        return Err(Error::ResourceCap { what: "character norm".into(), need: total, cap });
    }
    let np = law.dim.min(2);
    let prefixes: Vec<Coords> = (0..pm.pow(np as u32)).map(|i| quotient_coords(i, pm, np)).filter(|c| supported(c)).collect();
    let inner = pm.pow((law.dim - np) as u32);
    let s = det_sum(prefixes.len() as u64 * inner, 0.0, |i| {
        let mut x = prefixes[(i / inner) as usize];
        let rest = quotient_coords(i % inner, pm, law.dim - np);
        x[np..law.dim].copy_from_slice(&rest[..law.dim - np]);
        trace(&x).norm_sqr()
    });
    Ok(s / total as f64)
}

/// A function on `G / G(p^m Z_p)`, stored in lexicographic coset order.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub law: GroupLaw,
    pub prime: u64,
    pub m: u32,
    pub values: Vec<Complex64>,
}

impl TestFunction {
    pub fn new(law: GroupLaw, prime: u64, m: u32, values: Vec<Complex64>) -> Result<Self> {
        let n = ipow(prime, m).pow(law.dim as u32) as usize;
        if values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: values.len() });
        }
        Ok(TestFunction { law, prime, m, values })
    }

    pub fn from_fn<F: Fn(&Coords) -> Complex64>(law: GroupLaw, prime: u64, m: u32, f: F) -> Self {
        let pm = ipow(prime, m);
        let n = pm.pow(law.dim as u32);
        let values = (0..n).map(|i| f(&quotient_coords(i, pm, law.dim))).collect();
        TestFunction { law, prime, m, values }
    }

    pub fn constant(law: GroupLaw, prime: u64, c: Complex64) -> Self {
        TestFunction { law, prime, m: 0, values: vec![c] }
    }

    /// Independent uniform real and imaginary parts in `[-1, 1)`.
    pub fn random(law: GroupLaw, prime: u64, m: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = ipow(prime, m).pow(law.dim as u32);
        let values = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        TestFunction { law, prime, m, values }
    }

    pub fn value(&self, x: &Coords) -> Complex64 {
        let pm = ipow(self.prime, self.m);
        self.values[quotient_index(x, pm, self.law.dim) as usize]
    }

    /// `int |f|^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }
}

/// Fourier coefficients of one function over a set of labels.
#[derive(Clone, Debug)]
pub struct FourierCoefficient {
    pub label: RepLabel,
    pub matrix: DMatrix<Complex64>,
}

pub fn fourier_transform(f: &TestFunction, rep: &Rep, cap: u128) -> Result<FourierCoefficient> {
    Ok(FourierCoefficient { label: rep.label.clone(), matrix: rep.fourier_transform(f, cap)? })
}

/// `f(x) = sum d_xi Tr[pi_xi(x) fhat(xi)]` on `G / G(p^n Z_p)`.
///
/// The coefficient set must cover `B(n)` exactly, which is checked through
/// the Peter-Weyl count.
pub fn synthesize(law: GroupLaw, prime: u64, n: u32, coeffs: &[(&Rep, &DMatrix<Complex64>)]) -> Result<TestFunction> {
    let expected = (ipow(prime, n) as u128).pow(law.dim as u32);
    let mut sum: u128 = 0;
    let mut seen = std::collections::HashSet::new();
    for (rep, m) in coeffs {
        if rep.law() != law || rep.prime() != prime || rep.level() > n || !seen.insert(rep.label.xi.clone()) {
            return Err(Error::IncompleteCoefficients(format!("unexpected label {}", rep.label)));
        }
        if m.nrows() != rep.dim || m.ncols() != rep.dim {
            return Err(Error::DimensionMismatch { expected: rep.dim, got: m.nrows() });
        }
        sum += (rep.dim as u128).pow(2);
    }
    if sum != expected {
        return Err(Error::IncompleteCoefficients(format!("sum of d^2 is {sum}, B({n}) needs {expected}")));
    }
    let pn = ipow(prime, n);
    let values = (0..expected as u64)
        .map(|i| {
            let x = quotient_coords(i, pn, law.dim);
            let mut acc = ZERO;
            for (rep, f) in coeffs {
                let mut tr = ZERO;
                for (c, (r, t)) in rep.columns(&x).into_iter().enumerate() {
                    tr += rep.root(t) * f[(c, r)];
                }
                acc += tr * rep.dim as f64;
            }
            acc
        })
        .collect();
    TestFunction::new(law, prime, n, values)
}

/// Both sides of the Plancherel identity: `sum d ||fhat||_HS^2` and `||f||^2`.
pub fn plancherel(f: &TestFunction, reps: &[Rep], cap: u128) -> Result<(f64, f64)> {
    let mut lhs = 0.0;
    for rep in reps {
        let fh = rep.fourier_transform(f, cap)?;
        lhs += rep.dim as f64 * fh.norm_squared();
    }
    Ok((lhs, f.l2_norm_sq()))
}

/// A representation matrix with its label.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepMatrix {
    pub xi: Vec<String>,
    pub x: Vec<u64>,
    pub dim: usize,
    /// Row-major entries as `[re, im]`.
    pub entries: Vec<Vec<[f64; 2]>>,
}

pub fn rep_matrix(rep: &Rep, x: &Coords) -> RepMatrix {
    let m = rep.matrix(x);
    let entries = (0..rep.dim).map(|r| (0..rep.dim).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
    RepMatrix { xi: rep.label.xi.strings(), x: x[..rep.law().dim].to_vec(), dim: rep.dim, entries }
}

/// A uniformly random element of `G` modulo the representation's precision.
pub fn random_coords(law: &GroupLaw, md: &Modulus, rng: &mut ChaCha8Rng) -> Coords {
    let mut c = [0u64; MAX_DIM];
    for v in c.iter_mut().take(law.dim) {
        *v = rng.gen_range(0..md.m);
    }
    c
}

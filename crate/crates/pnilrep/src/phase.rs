//! Polynomials with rational coefficients evaluated exactly modulo 1 at
//! p-adic integer points.
//!
//! Every coefficient `q` with `|q|_p <= p^E` is stored as its tail `t` with
//! `q = t / p^E (mod Z_p)`, so the phase at an integer point is a single
//! integer modulo `p^E`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::padic::{inv_mod, ipow, rat_valuation, PhaseRational, Rat, Valuation};

pub const MAX_VARS: usize = 8;

/// Exponent vector of a monomial.
pub type Mono = [u8; MAX_VARS];

/// The monomial that multiplies the listed variables, with repetition for powers.
pub fn mono(vars: &[usize]) -> Mono {
    let mut m = [0u8; MAX_VARS];
    for &v in vars {
        m[v] += 1;
    }
    m
}

/// A polynomial with rational coefficients, before compilation.
#[derive(Clone, Debug, Default)]
pub struct RatPoly {
    pub terms: Vec<(Rat, Mono)>,
}

impl RatPoly {
    pub fn new() -> Self {
        RatPoly::default()
    }

    pub fn add(&mut self, c: Rat, vars: &[usize]) -> &mut Self {
        if *c.numer() != 0 {
            self.terms.push((c, mono(vars)));
        }
        self
    }

    /// Largest p-power in the coefficient denominators.
    pub fn denom_exp(&self, p: u64) -> u32 {
        self.terms
            .iter()
            .map(|(c, _)| match rat_valuation(p, c) {
                Valuation::Finite(v) if v < 0 => (-v) as u32,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn compile(&self, p: u64) -> Result<PhasePoly> {
        PhasePoly::compile(self, p, self.denom_exp(p))
    }
}

/// Tail numerator of `q` at denominator `p^e`.
pub fn tail(q: &Rat, p: u64, e: u32) -> Result<u64> {
    let pe = ipow(p, e);
    let mut den = *q.denom();
    let mut j = 0u32;
    while den % p as i128 == 0 {
        den /= p as i128;
        j += 1;
    }
    if j > e {
        return Err(Error::InsufficientPrecision { have: e, need: j });
    }
    if e == 0 {
        return Ok(0);
    }
    let inv = inv_mod(den, pe).ok_or(Error::NotInvertible { k: den, p })?;
    let a = q.numer().rem_euclid(pe as i128) as u128;
    let t = (a * inv as u128 % pe as u128) * ipow(p, e - j) as u128 % pe as u128;
    Ok(t as u64)
}

/// A compiled phase polynomial.
#[derive(Clone, Debug)]
pub struct PhasePoly {
    pub p: u64,
    pub e: u32,
    pub pe: u64,
    terms: Vec<(u64, Mono)>,
}

impl PhasePoly {
    pub fn compile(poly: &RatPoly, p: u64, e: u32) -> Result<Self> {
        let pe = ipow(p, e);
        let mut terms = Vec::with_capacity(poly.terms.len());
        for (c, m) in &poly.terms {
            let t = tail(c, p, e)?;
            if t != 0 {
                terms.push((t, *m));
            }
        }
        Ok(PhasePoly { p, e, pe, terms })
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Phase numerator modulo `p^e` at an integer point.
    #[inline]
    pub fn eval_tail(&self, vars: &[u64]) -> u64 {
        if self.pe == 1 {
            return 0;
        }
        let pe = self.pe as u128;
        let mut acc: u128 = 0;
        for (c, m) in &self.terms {
            let mut v = *c as u128;
            for (i, &k) in m.iter().enumerate() {
                for _ in 0..k {
                    v = v * (vars[i] as u128 % pe) % pe;
                }
            }
            acc += v;
        }
        (acc % pe) as u64
    }

    pub fn eval(&self, vars: &[u64]) -> PhaseRational {
        PhaseRational::new(self.p, self.eval_tail(vars) as i128, self.e)
    }
}

/// Precomputed roots of unity `e^{2 pi i t / p^e}`.
#[derive(Clone, Debug)]
pub struct RootTable {
    pub pe: u64,
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(pe: u64) -> Self {
        let roots = (0..pe)
            .map(|t| {
                let a = 2.0 * PI * (t as f64) / (pe as f64);
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        RootTable { pe, roots }
    }

    #[inline]
    pub fn get(&self, t: u64) -> Complex64 {
        self.roots[(t % self.pe) as usize]
    }
}

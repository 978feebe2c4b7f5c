//! Truncated p-adic integers, elements of Q_p/Z_p, exact phases and the
//! quadratic Gauss-sum factor.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rationals used for label-dependent coefficients such as `xi4^2/(6 xi5)`.
pub type Rat = Ratio<i128>;

/// `p^k` with overflow detection.
pub fn ipow(p: u64, k: u32) -> u64 {
    p.checked_pow(k).expect("p-power overflow")
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Modular inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub fn inv_mod(a: i128, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let m = m as i128;
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m) as u64)
}

/// Arithmetic modulo `p^n`, with the inverses of 2 and 6 cached for the
/// group laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    pub p: u64,
    pub n: u32,
    pub m: u64,
    pub inv2: u64,
    pub inv6: Option<u64>,
}

impl Modulus {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::BadPrime(p));
        }
        let m = p.checked_pow(n).filter(|m| *m < (1u64 << 62)).ok_or(Error::PrecisionTooLarge { p, n })?;
        let inv2 = inv_mod(2, m).unwrap_or(0);
        let inv6 = if p > 3 { inv_mod(6, m) } else { None };
        Ok(Modulus { p, n, m, inv2, inv6 })
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }

    #[inline]
    pub fn reduce(&self, a: i128) -> u64 {
        a.rem_euclid(self.m as i128) as u64
    }

    /// `6^{-1}`; only called by laws whose minimum prime excludes 3.
    #[inline]
    pub fn inv6(&self) -> u64 {
        self.inv6.expect("1/6 needs p > 3")
    }

    /// Residue of an exact rational with p-free denominator.
    pub fn from_rat(&self, q: &Rat) -> Result<u64> {
        let d = inv_mod(*q.denom(), self.m).ok_or(Error::NotInvertible { k: *q.denom(), p: self.p })?;
        Ok(self.mul(self.reduce(*q.numer()), d))
    }
}

/// The p-adic valuation of a value, with the two non-finite cases kept apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    /// The exact zero.
    Infinite,
    /// A residue that vanishes at the working precision `N`.
    AtLeast(u32),
}

/// An element of Z_p known modulo `p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicInt {
    pub prime: u64,
    pub precision: u32,
    pub residue: u64,
}

impl PadicInt {
    pub fn new(prime: u64, precision: u32, value: i128) -> Result<Self> {
        let md = Modulus::new(prime, precision)?;
        Ok(PadicInt { prime, precision, residue: md.reduce(value) })
    }

    fn modulus(&self) -> Modulus {
        Modulus::new(self.prime, self.precision).expect("validated at construction")
    }

    fn check(&self, other: &PadicInt) -> Result<Modulus> {
        if self.prime != other.prime || self.precision != other.precision {
            return Err(Error::Mismatch(self.to_string(), other.to_string()));
        }
        Ok(self.modulus())
    }

    pub fn checked_add(&self, other: &PadicInt) -> Result<PadicInt> {
        let md = self.check(other)?;
        Ok(PadicInt { residue: md.add(self.residue, other.residue), ..*self })
    }

    pub fn checked_sub(&self, other: &PadicInt) -> Result<PadicInt> {
        let md = self.check(other)?;
        Ok(PadicInt { residue: md.sub(self.residue, other.residue), ..*self })
    }

    pub fn checked_mul(&self, other: &PadicInt) -> Result<PadicInt> {
        let md = self.check(other)?;
        Ok(PadicInt { residue: md.mul(self.residue, other.residue), ..*self })
    }

    pub fn neg(&self) -> PadicInt {
        PadicInt { residue: self.modulus().neg(self.residue), ..*self }
    }

    pub fn valuation(&self) -> Valuation {
        if self.residue == 0 {
            return Valuation::AtLeast(self.precision);
        }
        let mut r = self.residue;
        let mut v = 0;
        while r.is_multiple_of(self.prime) {
            r /= self.prime;
            v += 1;
        }
        Valuation::Finite(v)
    }

    /// `p^{-valuation}`, or 0 for a residue that vanishes at this precision.
    pub fn norm(&self) -> f64 {
        match self.valuation() {
            Valuation::Finite(v) => (self.prime as f64).powi(-(v as i32)),
            _ => 0.0,
        }
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.prime, self.precision)
    }
}

/// `y` with `k y = x (mod p^N)`.
pub fn div_exact(x: &PadicInt, k: i128) -> Result<PadicInt> {
    let md = x.modulus();
    let inv = inv_mod(k, md.m).ok_or(Error::NotInvertible { k, p: x.prime })?;
    Ok(PadicInt { residue: md.mul(x.residue, inv), ..*x })
}

/// An element `numer / p^k` of Q_p/Z_p in canonical form; `k = 0` is the
/// trivial character, printed "1".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualElem {
    pub prime: u64,
    pub denom_exp: u32,
    pub numer: u64,
}

impl DualElem {
    pub fn trivial(prime: u64) -> Self {
        DualElem { prime, denom_exp: 0, numer: 0 }
    }

    /// Canonical representative of `numer / p^k` modulo Z_p.
    pub fn new(prime: u64, numer: i128, k: u32) -> Self {
        let mut k = k;
        let mut c = numer.rem_euclid(ipow(prime, k) as i128) as u64;
        while k > 0 && c.is_multiple_of(prime) {
            c /= prime;
            k -= 1;
        }
        if k == 0 {
            c = 0;
        }
        DualElem { prime, denom_exp: k, numer: c }
    }

    /// Class of an exact rational in Q_p/Z_p.
    pub fn from_rat(prime: u64, q: &Rat) -> Self {
        let ph = frac_part_rat(prime, q);
        DualElem::new(prime, ph.numer as i128, ph.denom_exp)
    }

    pub fn is_trivial(&self) -> bool {
        self.denom_exp == 0
    }

    pub fn norm(&self) -> u64 {
        ipow(self.prime, self.denom_exp)
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_trivial() {
            Valuation::Infinite
        } else {
            Valuation::Finite(-(self.denom_exp as i64))
        }
    }

    /// The canonical representative as an exact rational in `[0, 1)`.
    pub fn to_rat(&self) -> Rat {
        Rat::new(self.numer as i128, ipow(self.prime, self.denom_exp) as i128)
    }

    /// Canonical modulo `p^{-m} Z_p`: trivial, or `numer/p^k < p^{-m}`.
    /// The constraint is vacuous for `m <= 0`.
    pub fn canonical_mod(&self, m: i64) -> bool {
        if m <= 0 || self.is_trivial() {
            return true;
        }
        let k = self.denom_exp as i64;
        k > m && self.numer < ipow(self.prime, (k - m) as u32)
    }

    pub fn parse(prime: u64, s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" || s == "0" {
            return Ok(DualElem::trivial(prime));
        }
        let (a, b) = s.split_once('/').ok_or_else(|| Error::Parse(s.to_string()))?;
        let num: i128 = a.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        let mut den: u64 = b.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        let mut k = 0;
        while den > 1 && den.is_multiple_of(prime) {
            den /= prime;
            k += 1;
        }
        if den != 1 {
            return Err(Error::Parse(format!("{s}: denominator is not a power of {prime}")));
        }
        Ok(DualElem::new(prime, num, k))
    }
}

impl fmt::Display for DualElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            write!(f, "1")
        } else {
            write!(f, "{}/{}", self.numer, self.norm())
        }
    }
}

impl PartialOrd for DualElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DualElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_rat().cmp(&other.to_rat())
    }
}

/// A tuple of dual elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualPoint {
    pub components: Vec<DualElem>,
}

impl DualPoint {
    pub fn new(components: Vec<DualElem>) -> Self {
        DualPoint { components }
    }

    pub fn norm(&self) -> u64 {
        self.components.iter().map(DualElem::norm).max().unwrap_or(1)
    }

    pub fn level(&self) -> u32 {
        self.components.iter().map(|c| c.denom_exp).max().unwrap_or(0)
    }

    pub fn parse(prime: u64, s: &str) -> Result<Self> {
        let comps = s.split(',').map(|t| DualElem::parse(prime, t)).collect::<Result<Vec<_>>>()?;
        Ok(DualPoint { components: comps })
    }

    pub fn strings(&self) -> Vec<String> {
        self.components.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for DualPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.strings().join(","))
    }
}

/// An exact element `numer / p^k` of Q/Z with p-power denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseRational {
    pub prime: u64,
    pub denom_exp: u32,
    pub numer: u64,
}

impl PhaseRational {
    pub fn zero(prime: u64) -> Self {
        PhaseRational { prime, denom_exp: 0, numer: 0 }
    }

    pub fn new(prime: u64, numer: i128, k: u32) -> Self {
        let d = DualElem::new(prime, numer, k);
        PhaseRational { prime, denom_exp: d.denom_exp, numer: d.numer }
    }

    pub fn add(&self, other: &PhaseRational) -> PhaseRational {
        let k = self.denom_exp.max(other.denom_exp);
        let a = self.numer as i128 * ipow(self.prime, k - self.denom_exp) as i128;
        let b = other.numer as i128 * ipow(self.prime, k - other.denom_exp) as i128;
        PhaseRational::new(self.prime, a + b, k)
    }

    pub fn neg(&self) -> PhaseRational {
        PhaseRational::new(self.prime, -(self.numer as i128), self.denom_exp)
    }

    pub fn is_zero(&self) -> bool {
        self.numer == 0
    }

    pub fn value(&self) -> f64 {
        self.numer as f64 / ipow(self.prime, self.denom_exp) as f64
    }

    /// `|q|_p` of the class, with the integral class mapped to 1.
    pub fn norm(&self) -> u64 {
        ipow(self.prime, self.denom_exp)
    }

    /// `e^{2 pi i q}`, evaluated once from the exact reduced phase.
    pub fn to_complex(&self) -> Complex64 {
        let t = 2.0 * PI * self.value();
        Complex64::new(t.cos(), t.sin())
    }
}

/// `{q}_p` for an exact rational `q`.
pub fn frac_part_rat(prime: u64, q: &Rat) -> PhaseRational {
    let mut den = *q.denom();
    let mut k = 0u32;
    while den % prime as i128 == 0 {
        den /= prime as i128;
        k += 1;
    }
    if k == 0 {
        return PhaseRational::zero(prime);
    }
    let pk = ipow(prime, k);
    let inv = inv_mod(den, pk).expect("p-free denominator");
    let t = ((q.numer().rem_euclid(pk as i128) as u128 * inv as u128) % pk as u128) as i128;
    PhaseRational::new(prime, t, k)
}

/// p-adic valuation of a nonzero exact rational.
pub fn rat_valuation(prime: u64, q: &Rat) -> Valuation {
    if *q.numer() == 0 {
        return Valuation::Infinite;
    }
    let p = prime as i128;
    let (mut a, mut b) = (*q.numer(), *q.denom());
    let mut v = 0i64;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    while b % p == 0 {
        b /= p;
        v -= 1;
    }
    Valuation::Finite(v)
}

/// `|q|_p` of an exact rational as a float, 0 for zero.
pub fn rat_norm(prime: u64, q: &Rat) -> f64 {
    match rat_valuation(prime, q) {
        Valuation::Finite(v) => (prime as f64).powi(-(v as i32)),
        _ => 0.0,
    }
}

/// `{xi x}_p`, depending only on `x mod p^k`.
pub fn fractional_part(xi: &DualElem, x: &PadicInt) -> Result<PhaseRational> {
    if xi.prime != x.prime {
        return Err(Error::Mismatch(xi.to_string(), x.to_string()));
    }
    if x.precision < xi.denom_exp {
        return Err(Error::InsufficientPrecision { have: x.precision, need: xi.denom_exp });
    }
    let pk = xi.norm();
    let t = (xi.numer as u128 * (x.residue % pk) as u128 % pk as u128) as i128;
    Ok(PhaseRational::new(xi.prime, t, xi.denom_exp))
}

/// The additive character `x -> e^{2 pi i {xi . x}_p}` of Z_p^d.
pub fn character_eval(xi: &DualPoint, x: &[PadicInt]) -> Result<Complex64> {
    if xi.components.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: xi.components.len(), got: x.len() });
    }
    let mut acc = PhaseRational::zero(x.first().map(|v| v.prime).unwrap_or(3));
    for (c, v) in xi.components.iter().zip(x) {
        acc = acc.add(&fractional_part(c, v)?);
    }
    Ok(acc.to_complex())
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(a: i128, p: u64) -> i32 {
    let md = Modulus::new(p, 1).expect("odd prime");
    let a = md.reduce(a);
    if a == 0 {
        return 0;
    }
    let mut base = a;
    let mut e = (p - 1) / 2;
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = md.mul(r, base);
        }
        base = md.mul(base, base);
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Leading p-adic digit of a nonzero rational.
pub fn leading_digit(prime: u64, q: &Rat) -> u64 {
    let p = prime as i128;
    let (mut a, mut b) = (*q.numer(), *q.denom());
    while a % p == 0 {
        a /= p;
    }
    while b % p == 0 {
        b /= p;
    }
    let inv = inv_mod(b, prime).expect("unit");
    (a.rem_euclid(p) as u64 * inv) % prime
}

/// The factor `lambda_p(a)` of the p-adic Gaussian integral.
pub fn lambda_p(prime: u64, a: &Rat) -> Result<Complex64> {
    let v = match rat_valuation(prime, a) {
        Valuation::Finite(v) => v,
        _ => return Err(Error::ZeroArgument),
    };
    if v.rem_euclid(2) == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let l = legendre(leading_digit(prime, a) as i128, prime) as f64;
    if prime % 4 == 1 {
        Ok(Complex64::new(l, 0.0))
    } else {
        Ok(Complex64::new(0.0, l))
    }
}

/// Per-direction one-dimensional VT multiplier `|x|^alpha - c1` for `|x| > 1`,
/// zero otherwise.
pub fn vt_multiplier(prime: u64, norm: u64, alpha: f64) -> f64 {
    if norm <= 1 {
        return 0.0;
    }
    p_pow(norm as f64, alpha) - vt_constant(prime, 1, alpha)
}

/// `(1 - p^{-d}) / (1 - p^{-(alpha + d)})`.
pub fn vt_constant(prime: u64, d: u32, alpha: f64) -> f64 {
    let p = prime as f64;
    (1.0 - p.powi(-(d as i32))) / (1.0 - p_pow(p, -(alpha + d as f64)))
}

/// `x^alpha` with an exact integer power when alpha is integral.
pub fn p_pow(x: f64, alpha: f64) -> f64 {
    if alpha.fract() == 0.0 && alpha.abs() < 64.0 {
        x.powi(alpha as i32)
    } else {
        x.powf(alpha)
    }
}

//! Unitary dual balls: membership predicates, dimensions, index sets and
//! Peter-Weyl counting.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupId, GroupLaw};
use crate::padic::{ipow, DualElem, DualPoint};

/// Default cap on `sum d^2` for a materialized dual ball.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// Which of the indexing sets of the dual parametrization a label belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    A1,
    A2,
    A3,
    A4,
    A5,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::A1 => "A1",
            Branch::A2 => "A2",
            Branch::A3 => "A3",
            Branch::A4 => "A4",
            Branch::A5 => "A5",
        };
        f.write_str(s)
    }
}

/// Result of a successful membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub branch: Branch,
    /// Exponents of the index set `prod Z/p^{k_i}`, first factor outermost.
    pub index_exps: Vec<u32>,
}

/// A validated point of the unitary dual.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RepLabel {
    pub law: GroupLaw,
    pub prime: u64,
    pub xi: DualPoint,
    pub dim: u64,
    pub branch: Branch,
    pub index_exps: Vec<u32>,
    pub level: u32,
}

#[derive(Serialize, Deserialize)]
struct LabelJson {
    xi: Vec<String>,
    dim: u64,
    branch: String,
    level: u32,
}

impl Serialize for RepLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LabelJson { xi: self.xi.strings(), dim: self.dim, branch: self.branch.to_string(), level: self.level }.serialize(s)
    }
}

impl RepLabel {
    pub fn new(law: GroupLaw, xi: DualPoint) -> Result<Self> {
        let prime = xi.components.first().map(|c| c.prime).ok_or_else(|| Error::NotInDual("()".into()))?;
        if xi.components.len() != law.dim {
            return Err(Error::DimensionMismatch { expected: law.dim, got: xi.components.len() });
        }
        if xi.components.iter().any(|c| c.prime != prime) {
            return Err(Error::Mismatch(xi.to_string(), format!("p = {prime}")));
        }
        let m = membership(&law, &xi.components).ok_or_else(|| Error::NotInDual(xi.to_string()))?;
        let dim = m.index_exps.iter().map(|k| ipow(prime, *k)).product();
        let level = xi.level();
        Ok(RepLabel { law, prime, xi, dim, branch: m.branch, index_exps: m.index_exps, level })
    }

    pub fn parse(law: GroupLaw, prime: u64, s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        RepLabel::new(law, DualPoint::parse(prime, s)?)
    }

    pub fn trivial(law: GroupLaw, prime: u64) -> Self {
        RepLabel::new(law, DualPoint::new(vec![DualElem::trivial(prime); law.dim])).expect("trivial label")
    }

    pub fn is_trivial(&self) -> bool {
        self.level == 0
    }

    pub fn component(&self, i: usize) -> &DualElem {
        &self.xi.components[i]
    }

    /// Index tuple of a linear index, first factor outermost.
    pub fn index_tuple(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0; self.index_exps.len()];
        for (i, k) in self.index_exps.iter().enumerate().rev() {
            let m = ipow(self.prime, *k) as usize;
            out[i] = (idx % m) as u64;
            idx /= m;
        }
        out
    }
}

impl fmt::Display for RepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.xi)
    }
}

fn k(c: &DualElem) -> i64 {
    c.denom_exp as i64
}

fn canon(c: &DualElem, m: i64) -> bool {
    c.canonical_mod(m)
}

fn b4_rules(x: &[DualElem]) -> Option<(Branch, u32)> {
    let (k3, k4) = (k(&x[2]), k(&x[3]));
    let kk = k3.max(k4);
    if kk == 0 {
        return Some((Branch::A1, 0));
    }
    if k4 < k3 {
        return (canon(&x[0], k3) && canon(&x[1], k3)).then_some((Branch::A2, kk as u32));
    }
    if k3 == 0 {
        return canon(&x[0], k4).then_some((Branch::A3, kk as u32));
    }
    None
}

/// Membership in the dual of `law`, with the branch and index set.
///
/// A component constrained modulo `p^{-m} Z_p` must be trivial or have
/// denominator exponent above `m` with numerator below `p^{k-m}`; the
/// constraint is vacuous when `m <= 0`.
pub fn membership(law: &GroupLaw, x: &[DualElem]) -> Option<Membership> {
    if x.len() != law.dim {
        return None;
    }
    let mk = |branch, index_exps: Vec<u32>| Some(Membership { branch, index_exps });
    match law.id {
        GroupId::Zp(_) => mk(Branch::A1, vec![]),
        GroupId::H(d) => {
            let d = d as usize;
            let kl = k(&x[2 * d]);
            if !x[..2 * d].iter().all(|c| canon(c, kl)) {
                return None;
            }
            let br = if kl == 0 { Branch::A1 } else { Branch::A2 };
            mk(br, vec![kl as u32; d])
        }
        GroupId::B4 => {
            let (br, kk) = b4_rules(x)?;
            mk(br, vec![kk])
        }
        GroupId::G52 => {
            let (k4, k5) = (k(&x[3]), k(&x[4]));
            let kk = k4.max(k5);
            if kk == 0 {
                mk(Branch::A1, vec![0])
            } else if k4 > k5 {
                (canon(&x[0], k4) && canon(&x[1], k4)).then(|| Membership { branch: Branch::A2, index_exps: vec![kk as u32] })
            } else {
                (canon(&x[0], k5) && canon(&x[2], k5)).then(|| Membership { branch: Branch::A3, index_exps: vec![kk as u32] })
            }
        }
        GroupId::G53 => {
            let (k4, k5) = (k(&x[3]), k(&x[4]));
            if k5 == 0 {
                return (canon(&x[0], k4) && canon(&x[1], k4)).then(|| Membership { branch: Branch::A1, index_exps: vec![k4 as u32, 0] });
            }
            let m = k5.max(k4 - k5);
            let ok = canon(&x[3], k5) && canon(&x[2], k5) && canon(&x[0], m) && canon(&x[1], m);
            let br = if x[3].is_trivial() { Branch::A3 } else { Branch::A2 };
            ok.then(|| Membership { branch: br, index_exps: vec![m as u32, k5 as u32] })
        }
        GroupId::G54 => {
            let (k3, k4, k5) = (k(&x[2]), k(&x[3]), k(&x[4]));
            if k5 == 0 {
                let (_, kk) = b4_rules(&x[..4])?;
                return mk(Branch::A1, vec![kk]);
            }
            if k4 <= k5 {
                let kk = k3.max(k5);
                let ok = canon(&x[2], k5) && canon(&x[1], kk) && canon(&x[0], kk - k5);
                let br = if x[2].is_trivial() { Branch::A2 } else { Branch::A5 };
                ok.then(|| Membership { branch: br, index_exps: vec![(kk - k5) as u32, k5 as u32] })
            } else {
                let kk = k3.max(k4);
                let ok = canon(&x[2], k4) && canon(&x[0], kk) && canon(&x[1], kk - k4);
                let br = if x[2].is_trivial() { Branch::A3 } else { Branch::A4 };
                ok.then(|| Membership { branch: br, index_exps: vec![(kk - k4) as u32, k4 as u32] })
            }
        }
        GroupId::G55 => {
            let (k3, k4, k5) = (k(&x[2]), k(&x[3]), k(&x[4]));
            if k5 == 0 {
                let (_, kk) = b4_rules(&x[..4])?;
                return mk(Branch::A1, vec![kk]);
            }
            let kk = k3.max(k4).max(k5);
            let ok = canon(&x[3], k5) && canon(&x[2], k4 - k5) && canon(&x[1], k3 - k4.max(k5)) && canon(&x[0], kk);
            ok.then(|| Membership { branch: Branch::A2, index_exps: vec![kk as u32] })
        }
        GroupId::G56 => {
            let (k3, k4, k5) = (k(&x[2]), k(&x[3]), k(&x[4]));
            if k5 == 0 {
                let (_, kk) = b4_rules(&x[..4])?;
                return mk(Branch::A1, vec![kk, 0]);
            }
            let e = G56Exps::new(k3, k4, k5);
            let ok = canon(&x[3], k5) && canon(&x[2], e.m) && canon(&x[0], e.a) && canon(&x[1], e.c);
            let br = if x[3].is_trivial() { Branch::A2 } else { Branch::A3 };
            ok.then(|| Membership { branch: br, index_exps: vec![e.m as u32, (k5 + e.beta) as u32] })
        }
    }
}

/// Exponents describing a `G^{5,6}` label with `xi5` nontrivial.
///
/// The stabilizer of `(xi3, xi4, xi5)` in the `(x1, x2)` plane is the lattice
/// `t in p^m Z_p, s + t xi4/xi5 in p^{k5} Z_p`; the representation has
/// dimension `p^d` with `d = max(k3, k4, 2 k5)` and is induced from the
/// sublattice where `s + t xi4/xi5 in p^{k5 + beta} Z_p`. The pair
/// `(xi1, xi2)` is canonical modulo `p^{-a}` and `p^{-c}` respectively.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct G56Exps {
    pub m: i64,
    pub beta: i64,
    pub a: i64,
    pub c: i64,
    pub d: i64,
}

impl G56Exps {
    pub(crate) fn new(k3: i64, k4: i64, k5: i64) -> Self {
        let m = k5.max(k4 - k5);
        let d = k3.max(k4).max(2 * k5);
        let beta = (k3 - m - k5).max(0);
        let a = k4.max(k5).max(k3 - k5).max(k3 + k4 - k5 - m);
        let c = 2 * d - k5 - m - a;
        G56Exps { m, beta, a, c, d }
    }
}

/// `d_xi` for a member label.
pub fn rep_dimension(law: &GroupLaw, xi: &DualPoint) -> Result<u64> {
    Ok(RepLabel::new(*law, xi.clone())?.dim)
}

/// All labels with `||xi|| <= p^n`, in lexicographic order of the numerators
/// `c_i` of `c_i / p^n`, first component outermost.
pub fn enumerate_dual_ball(law: &GroupLaw, prime: u64, n: u32, cap: u128) -> Result<Vec<RepLabel>> {
    law.check_prime(prime)?;
    let pn = ipow(prime, n);
    let total = (pn as u128).pow(law.dim as u32);
    if total > cap {
        return Err(Error::ResourceCap { what: format!("dual ball B({n}) of {}", law.id), need: total, cap });
    }
    let elems: Vec<DualElem> = (0..pn).map(|c| DualElem::new(prime, c as i128, n)).collect();
    let rest = total / pn as u128;
    let chunks: Vec<Vec<RepLabel>> = (0..pn)
        .into_par_iter()
        .map(|c0| {
            let mut out = Vec::new();
            let mut buf = vec![elems[c0 as usize]; law.dim];
            for mut idx in 0..rest as u64 {
                for i in (1..law.dim).rev() {
                    buf[i] = elems[(idx % pn) as usize];
                    idx /= pn;
                }
                if membership(law, &buf).is_some() {
                    out.push(RepLabel::new(*law, DualPoint::new(buf.clone())).expect("member"));
                }
            }
            out
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeterWeylReport {
    pub group: String,
    pub prime: u64,
    pub level: u32,
    pub labels: usize,
    pub sum_d_squared: u128,
    pub expected: u128,
    pub pass: bool,
}

pub fn peter_weyl_report(law: &GroupLaw, prime: u64, n: u32, labels: &[RepLabel]) -> PeterWeylReport {
    let sum: u128 = labels.iter().map(|l| (l.dim as u128).pow(2)).sum();
    let expected = (ipow(prime, n) as u128).pow(law.dim as u32);
    PeterWeylReport {
        group: law.id.to_string(),
        prime,
        level: n,
        labels: labels.len(),
        sum_d_squared: sum,
        expected,
        pass: sum == expected,
    }
}

pub fn peter_weyl_check(law: &GroupLaw, prime: u64, n: u32, cap: u128) -> Result<PeterWeylReport> {
    let labels = enumerate_dual_ball(law, prime, n, cap)?;
    Ok(peter_weyl_report(law, prime, n, &labels))
}

//! Polynomial group laws on Z_p^d, inverses, one-parameter subgroups and
//! finite quotients `G / G(p^n Z_p)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{ipow, Modulus};

pub const MAX_DIM: usize = 5;

/// Coordinates of a group element; entries past the group dimension are zero.
pub type Coords = [u64; MAX_DIM];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupId {
    /// The abelian group Z_p^d.
    Zp(u8),
    /// The Heisenberg group of dimension 2d+1 in coordinates (x, y, z).
    H(u8),
    B4,
    G52,
    G53,
    G54,
    G55,
    G56,
}

impl GroupId {
    pub const FIVE_DIM: [GroupId; 5] = [GroupId::G52, GroupId::G53, GroupId::G54, GroupId::G55, GroupId::G56];

    pub fn all() -> Vec<GroupId> {
        vec![
            GroupId::Zp(1),
            GroupId::H(1),
            GroupId::H(2),
            GroupId::B4,
            GroupId::G52,
            GroupId::G53,
            GroupId::G54,
            GroupId::G55,
            GroupId::G56,
        ]
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Zp(1) => write!(f, "zp"),
            GroupId::Zp(d) => write!(f, "zp{d}"),
            GroupId::H(d) => write!(f, "h{d}"),
            GroupId::B4 => write!(f, "b4"),
            GroupId::G52 => write!(f, "g52"),
            GroupId::G53 => write!(f, "g53"),
            GroupId::G54 => write!(f, "g54"),
            GroupId::G55 => write!(f, "g55"),
            GroupId::G56 => write!(f, "g56"),
        }
    }
}

impl FromStr for GroupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Ok(match s.as_str() {
            "zp" => GroupId::Zp(1),
            "h1" => GroupId::H(1),
            "h2" => GroupId::H(2),
            "b4" => GroupId::B4,
            "g52" => GroupId::G52,
            "g53" => GroupId::G53,
            "g54" => GroupId::G54,
            "g55" => GroupId::G55,
            "g56" => GroupId::G56,
            other => match other.strip_prefix("zp").and_then(|d| d.parse::<u8>().ok()) {
                Some(d) if (1..=MAX_DIM as u8).contains(&d) => GroupId::Zp(d),
                _ => return Err(Error::UnknownGroup(s.clone())),
            },
        })
    }
}

/// Static data of a group law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupLaw {
    pub id: GroupId,
    pub dim: usize,
    /// Nilpotency class.
    pub class: u32,
    pub min_prime: u64,
    /// Number of generators, the dimension of g/[g,g].
    pub kappa: usize,
}

impl GroupLaw {
    pub fn new(id: GroupId) -> Self {
        let (dim, class, min_prime, kappa) = match id {
            GroupId::Zp(d) => (d as usize, 1, 3, d as usize),
            GroupId::H(d) => (2 * d as usize + 1, 2, 3, 2 * d as usize),
            // Class 3, but the law and its dual only need 1/2; the counting
            // checks at p = 3 are part of the acceptance suite.
            GroupId::B4 => (4, 3, 3, 2),
            GroupId::G52 => (5, 2, 3, 3),
            GroupId::G53 => (5, 3, 5, 3),
            GroupId::G54 => (5, 3, 5, 2),
            GroupId::G55 => (5, 4, 5, 2),
            GroupId::G56 => (5, 4, 5, 2),
        };
        GroupLaw { id, dim, class, min_prime, kappa }
    }

    pub fn check_prime(&self, p: u64) -> Result<()> {
        if !crate::padic::is_odd_prime(p) {
            return Err(Error::BadPrime(p));
        }
        if p < self.min_prime {
            return Err(Error::PrimeTooSmall { group: self.id.to_string(), min_prime: self.min_prime, p });
        }
        Ok(())
    }

    /// `x * y` modulo `p^N`.
    pub fn star(&self, md: &Modulus, x: &Coords, y: &Coords) -> Coords {
        let a = |u, v| md.add(u, v);
        let m = |u, v| md.mul(u, v);
        let mut r = [0u64; MAX_DIM];
        match self.id {
            GroupId::Zp(d) => {
                for i in 0..d as usize {
                    r[i] = a(x[i], y[i]);
                }
            }
            GroupId::H(d) => {
                let d = d as usize;
                let mut z = a(x[2 * d], y[2 * d]);
                for i in 0..d {
                    r[i] = a(x[i], y[i]);
                    r[d + i] = a(x[d + i], y[d + i]);
                    z = a(z, m(x[i], y[d + i]));
                }
                r[2 * d] = z;
            }
            GroupId::B4 => {
                r[0] = a(x[0], y[0]);
                r[1] = a(x[1], y[1]);
                r[2] = a(a(x[2], y[2]), m(x[0], y[1]));
                let t = m(md.inv2, m(m(x[0], x[0]), y[1]));
                r[3] = a(a(a(x[3], y[3]), m(x[0], y[2])), t);
            }
            GroupId::G52 => {
                r[0] = a(x[0], y[0]);
                r[1] = a(x[1], y[1]);
                r[2] = a(x[2], y[2]);
                r[3] = a(a(x[3], y[3]), m(x[0], y[1]));
                r[4] = a(a(x[4], y[4]), m(x[0], y[2]));
            }
            GroupId::G53 => {
                r[0] = a(x[0], y[0]);
                r[1] = a(x[1], y[1]);
                r[2] = a(x[2], y[2]);
                r[3] = a(a(x[3], y[3]), m(x[0], y[1]));
                let t = m(md.inv2, m(m(x[0], x[0]), y[1]));
                r[4] = a(a(a(a(x[4], y[4]), m(x[1], y[2])), m(x[0], y[3])), t);
            }
            GroupId::G54 => {
                r[0] = a(x[0], y[0]);
                r[1] = a(x[1], y[1]);
                r[2] = a(a(x[2], y[2]), m(x[0], y[1]));
                let t4 = m(md.inv2, m(m(x[0], x[0]), y[1]));
                r[3] = a(a(a(x[3], y[3]), t4), m(x[0], y[2]));
                let t5 = m(md.inv2, m(m(x[0], y[1]), y[1]));
                let s5 = a(m(x[1], y[2]), m(m(x[0], x[1]), y[1]));
                r[4] = a(a(a(x[4], y[4]), t5), s5);
            }
            GroupId::G55 | GroupId::G56 => {
                r[0] = a(x[0], y[0]);
                r[1] = a(x[1], y[1]);
                r[2] = a(a(x[2], y[2]), m(x[0], y[1]));
                let x1sq = m(x[0], x[0]);
                let t4 = m(md.inv2, m(x1sq, y[1]));
                r[3] = a(a(a(x[3], y[3]), t4), m(x[0], y[2]));
                let cube = m(md.inv6(), m(m(x1sq, x[0]), y[1]));
                let half = m(md.inv2, m(x1sq, y[2]));
                let mut z = a(a(a(a(x[4], y[4]), cube), half), m(x[0], y[3]));
                if self.id == GroupId::G56 {
                    let sq = m(md.inv2, m(m(x[0], y[1]), y[1]));
                    z = a(a(a(z, sq), m(x[1], y[2])), m(m(x[0], x[1]), y[1]));
                }
                r[4] = z;
            }
        }
        r
    }

    /// `x^{-1}`, solved coordinate by coordinate: coordinate `i` of `x * y`
    /// is `x_i + y_i` plus terms in `y_j` with `j < i`.
    pub fn inverse(&self, md: &Modulus, x: &Coords) -> Coords {
        let mut y = [0u64; MAX_DIM];
        for i in 0..self.dim {
            let z = self.star(md, x, &y);
            y[i] = md.sub(y[i], z[i]);
        }
        y
    }

    pub fn identity(&self) -> Coords {
        [0; MAX_DIM]
    }

    /// `gamma_w(t)` for a direction `w` in the generating stratum.
    pub fn one_param(&self, md: &Modulus, w: &[u64], t: u64) -> Result<Coords> {
        if w.len() != self.kappa {
            return Err(Error::DimensionMismatch { expected: self.kappa, got: w.len() });
        }
        let m = |u, v| md.mul(u, v);
        let w: Vec<u64> = w.iter().map(|v| v % md.m).collect();
        let t = t % md.m;
        let mut r = [0u64; MAX_DIM];
        match self.id {
            GroupId::Zp(_) => {
                for (i, wi) in w.iter().enumerate() {
                    r[i] = m(t, *wi);
                }
            }
            GroupId::H(d) => {
                let d = d as usize;
                let mut ab = 0;
                for i in 0..d {
                    r[i] = m(t, w[i]);
                    r[d + i] = m(t, w[d + i]);
                    ab = md.add(ab, m(w[i], w[d + i]));
                }
                r[2 * d] = m(md.inv2, m(m(t, t), ab));
            }
            GroupId::G52 => {
                r[0] = m(t, w[0]);
                r[1] = m(t, w[1]);
                r[2] = m(t, w[2]);
                r[3] = m(md.inv2, m(m(t, t), m(w[0], w[1])));
                r[4] = m(md.inv2, m(m(t, t), m(w[0], w[2])));
            }
            GroupId::G53 => {
                r[0] = m(t, w[0]);
                r[1] = m(t, w[1]);
                r[2] = m(t, w[2]);
                let t2 = m(t, t);
                r[3] = m(md.inv2, m(t2, m(w[0], w[1])));
                let quad = m(md.inv2, m(t2, m(w[1], w[2])));
                let cubic = m(md.inv6(), m(m(t2, t), m(m(w[0], w[0]), w[1])));
                r[4] = md.add(quad, cubic);
            }
            GroupId::B4 | GroupId::G54 | GroupId::G55 | GroupId::G56 => {
                let k = canonical_direction(&w).ok_or_else(|| Error::NonGeneratorDirection(format!("{w:?}")))?;
                r[k] = t;
            }
        }
        Ok(r)
    }

    /// Coset representatives of `G / G(p^n Z_p)` in lexicographic order,
    /// first coordinate outermost.
    pub fn enumerate_quotient(&self, p: u64, n: u32, cap: u128) -> Result<Vec<Coords>> {
        let pn = ipow(p, n);
        let total = (pn as u128).pow(self.dim as u32);
        if total > cap {
            return Err(Error::ResourceCap { what: format!("quotient of {}", self.id), need: total, cap });
        }
        Ok((0..total as u64).map(|i| quotient_coords(i, pn, self.dim)).collect())
    }
}

/// Coordinates of the `idx`-th element of `G / G(p^m Z_p)` in lexicographic order.
pub fn quotient_coords(mut idx: u64, pm: u64, dim: usize) -> Coords {
    let mut c = [0u64; MAX_DIM];
    for i in (0..dim).rev() {
        c[i] = idx % pm;
        idx /= pm;
    }
    c
}

/// Inverse of [`quotient_coords`] after reduction modulo `p^m`.
pub fn quotient_index(c: &Coords, pm: u64, dim: usize) -> u64 {
    c[..dim].iter().fold(0, |acc, v| acc * pm + v % pm)
}

fn canonical_direction(w: &[u64]) -> Option<usize> {
    let nz: Vec<usize> = (0..w.len()).filter(|&i| w[i] != 0).collect();
    match nz.as_slice() {
        [k] if w[*k] == 1 => Some(*k),
        _ => None,
    }
}

/// A group element with its law and working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub law: GroupLaw,
    pub md: Modulus,
    pub coords: Coords,
}

impl GroupElement {
    pub fn new(law: GroupLaw, md: Modulus, coords: &[i128]) -> Result<Self> {
        if coords.len() != law.dim {
            return Err(Error::DimensionMismatch { expected: law.dim, got: coords.len() });
        }
        let mut c = [0u64; MAX_DIM];
        for (i, v) in coords.iter().enumerate() {
            c[i] = md.reduce(*v);
        }
        Ok(GroupElement { law, md, coords: c })
    }

    fn check(&self, other: &GroupElement) -> Result<()> {
        if self.law != other.law || self.md != other.md {
            return Err(Error::Mismatch(self.to_string(), other.to_string()));
        }
        Ok(())
    }

    pub fn star(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check(other)?;
        Ok(GroupElement { coords: self.law.star(&self.md, &self.coords, &other.coords), ..*self })
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { coords: self.law.inverse(&self.md, &self.coords), ..*self }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords[..self.law.dim].iter().map(|c| c.to_string()).collect();
        write!(f, "({}) mod {}^{}", parts.join(","), self.md.p, self.md.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn md(p: u64, n: u32) -> Modulus {
        Modulus::new(p, n).unwrap()
    }

    fn el(law: GroupLaw, m: Modulus, c: &[i128]) -> GroupElement {
        GroupElement::new(law, m, c).unwrap()
    }

    #[test]
    fn star_examples() {
        let m = md(5, 3);
        let h1 = GroupLaw::new(GroupId::H(1));
        let r = el(h1, m, &[1, 0, 0]).star(&el(h1, m, &[0, 1, 0])).unwrap();
        assert_eq!(r.coords[..3], [1, 1, 1]);
        let b4 = GroupLaw::new(GroupId::B4);
        let r = el(b4, m, &[1, 1, 0, 0]).star(&el(b4, m, &[1, 0, 0, 0])).unwrap();
        assert_eq!(r.coords[..4], [2, 1, 0, 0]);
    }

    #[test]
    fn inverse_examples() {
        let m = md(5, 3);
        let g52 = GroupLaw::new(GroupId::G52);
        let x = el(g52, m, &[1, 1, 1, 0, 0]);
        assert_eq!(x.inverse(), el(g52, m, &[-1, -1, -1, 1, 1]));
        let h1 = GroupLaw::new(GroupId::H(1));
        assert_eq!(el(h1, m, &[1, 1, 0]).inverse(), el(h1, m, &[-1, -1, 1]));
    }

    #[test]
    fn inverse_formulas() {
        // G52: (-x1,-x2,-x3,-x4+x1x2,-x5+x1x3); G56 as printed.
        let m = md(7, 4);
        let g52 = GroupLaw::new(GroupId::G52);
        let g56 = GroupLaw::new(GroupId::G56);
        let (x1, x2, x3, x4, x5) = (3i128, 5, 11, 2, 9);
        let a = el(g52, m, &[x1, x2, x3, x4, x5]).inverse();
        assert_eq!(a, el(g52, m, &[-x1, -x2, -x3, -x4 + x1 * x2, -x5 + x1 * x3]));
        let inv2 = m.inv2 as i128;
        let inv6 = m.inv6() as i128;
        let b = el(g56, m, &[x1, x2, x3, x4, x5]).inverse();
        let want = [
            -x1,
            -x2,
            -x3 + x1 * x2,
            -x4 + x1 * x3 - inv2 * x2 * x1 * x1,
            -x5 + x1 * x4 + x2 * x3 - inv2 * x3 * x1 * x1 - inv2 * x2 * x2 * x1 + inv6 * x2 * x1 * x1 * x1,
        ];
        assert_eq!(b, el(g56, m, &want));
    }

    #[test]
    fn quotient_sizes() {
        let h1 = GroupLaw::new(GroupId::H(1));
        assert_eq!(h1.enumerate_quotient(3, 1, 1 << 20).unwrap().len(), 27);
        assert_eq!(h1.enumerate_quotient(3, 0, 1 << 20).unwrap().len(), 1);
        let g52 = GroupLaw::new(GroupId::G52);
        let q = g52.enumerate_quotient(3, 1, 1 << 20).unwrap();
        assert_eq!(q.len(), 243);
        assert_eq!(q[1], [0, 0, 0, 0, 1]);
        assert!(g52.enumerate_quotient(3, 4, 1000).is_err());
    }

    #[test]
    fn one_param_examples() {
        let m = md(5, 4);
        let h1 = GroupLaw::new(GroupId::H(1));
        let t = 7;
        let g = h1.one_param(&m, &[1, 1], t).unwrap();
        assert_eq!(g[..3], [7, 7, m.mul(m.inv2, 49)]);
        for id in GroupId::all() {
            let law = GroupLaw::new(id);
            let mut w = vec![0u64; law.kappa];
            w[0] = 1;
            assert_eq!(law.one_param(&m, &w, 0).unwrap(), [0; MAX_DIM]);
            let g = law.one_param(&m, &w, 3).unwrap();
            let mut want = [0; MAX_DIM];
            want[0] = 3;
            assert_eq!(g, want);
        }
        let g55 = GroupLaw::new(GroupId::G55);
        assert!(matches!(g55.one_param(&m, &[1, 1], 1), Err(Error::NonGeneratorDirection(_))));
    }

    #[test]
    fn prime_rules() {
        assert!(GroupLaw::new(GroupId::G54).check_prime(3).is_err());
        assert!(GroupLaw::new(GroupId::G52).check_prime(3).is_ok());
        assert!(matches!(GroupLaw::new(GroupId::H(1)).check_prime(9), Err(Error::BadPrime(9))));
        assert!(GroupLaw::new(GroupId::B4).check_prime(3).is_ok());
    }

    fn arb_coords(m: u64) -> impl Strategy<Value = Coords> {
        proptest::array::uniform5(0..m)
    }

    fn arb_law() -> impl Strategy<Value = GroupLaw> {
        proptest::sample::select(GroupId::all()).prop_map(GroupLaw::new)
    }

    fn trim(law: &GroupLaw, mut c: Coords) -> Coords {
        for v in c.iter_mut().skip(law.dim) {
            *v = 0;
        }
        c
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn associativity(law in arb_law(), x in arb_coords(5u64.pow(6)), y in arb_coords(5u64.pow(6)), z in arb_coords(5u64.pow(6))) {
            let m = md(5, 6);
            let (x, y, z) = (trim(&law, x), trim(&law, y), trim(&law, z));
            let l = law.star(&m, &law.star(&m, &x, &y), &z);
            let r = law.star(&m, &x, &law.star(&m, &y, &z));
            prop_assert_eq!(l, r);
        }

        #[test]
        fn identity_and_inverse(law in arb_law(), x in arb_coords(5u64.pow(6))) {
            let m = md(5, 6);
            let x = trim(&law, x);
            let e = law.identity();
            prop_assert_eq!(law.star(&m, &x, &e), x);
            prop_assert_eq!(law.star(&m, &e, &x), x);
            let xi = law.inverse(&m, &x);
            prop_assert_eq!(law.star(&m, &x, &xi), e);
            prop_assert_eq!(law.star(&m, &xi, &x), e);
        }

        #[test]
        fn balls_are_normal(law in arb_law(), x in arb_coords(5u64.pow(5)), g in arb_coords(5u64.pow(3)), n in 1u32..3) {
            let m = md(5, 5);
            let x = trim(&law, x);
            let pn = 5u64.pow(n);
            let g: Coords = trim(&law, g.map(|v| v * pn % m.m));
            let c = law.star(&m, &law.star(&m, &x, &g), &law.inverse(&m, &x));
            prop_assert!(c.iter().all(|v| v % pn == 0));
        }

        #[test]
        fn quotient_closure(law in arb_law(), x in arb_coords(5u64.pow(5)), y in arb_coords(5u64.pow(5)), n in 1u32..4) {
            let m = md(5, 5);
            let (x, y) = (trim(&law, x), trim(&law, y));
            let pn = 5u64.pow(n);
            let r = |c: Coords| c.map(|v| v % pn);
            prop_assert_eq!(r(law.star(&m, &x, &y)), r(law.star(&m, &r(x), &r(y))));
        }

        #[test]
        fn one_param_is_homomorphism(id in proptest::sample::select(vec![GroupId::Zp(3), GroupId::H(1), GroupId::H(2), GroupId::G52, GroupId::G53]),
                                     w in proptest::collection::vec(0u64..625, 4), t in 0u64..625, s in 0u64..625) {
            let m = md(5, 4);
            let law = GroupLaw::new(id);
            let w = &w[..law.kappa.min(4)];
            let w: Vec<u64> = (0..law.kappa).map(|i| *w.get(i).unwrap_or(&1)).collect();
            let a = law.one_param(&m, &w, t + s).unwrap();
            let b = law.star(&m, &law.one_param(&m, &w, t).unwrap(), &law.one_param(&m, &w, s).unwrap());
            prop_assert_eq!(a, b);
        }

        #[test]
        fn canonical_one_param_is_homomorphism(law in arb_law(), k in 0usize..2, t in 0u64..625, s in 0u64..625) {
            let m = md(5, 4);
            let mut w = vec![0u64; law.kappa];
            w[k.min(law.kappa - 1)] = 1;
            let a = law.one_param(&m, &w, t + s).unwrap();
            let b = law.star(&m, &law.one_param(&m, &w, t).unwrap(), &law.one_param(&m, &w, s).unwrap());
            prop_assert_eq!(a, b);
        }
    }
}

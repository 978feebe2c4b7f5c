//! Independent check of the dual parametrizations: the coadjoint orbits of
//! `G` on `(p^{-n} Z / Z)^d` are computed by union-find from the Lie
//! brackets alone, and every label set must be a transversal with
//! `|orbit| = d_xi^2`.

use std::collections::{HashSet, VecDeque};

use pnilrep::dual::{enumerate_dual_ball, membership, RepLabel};
use pnilrep::group::{GroupId, GroupLaw};
use pnilrep::padic::{inv_mod, ipow, DualElem, DualPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `[X_i, X_j] = X_k` triples (0-based, i < j).
fn brackets(id: GroupId) -> Vec<(usize, usize, usize)> {
    match id {
        GroupId::Zp(_) => vec![],
        GroupId::H(d) => {
            let d = d as usize;
            (0..d).map(|i| (i, d + i, 2 * d)).collect()
        }
        GroupId::B4 => vec![(0, 1, 2), (0, 2, 3)],
        GroupId::G52 => vec![(0, 1, 3), (0, 2, 4)],
        GroupId::G53 => vec![(0, 1, 3), (1, 2, 4), (0, 3, 4)],
        GroupId::G54 => vec![(0, 1, 2), (0, 2, 3), (1, 2, 4)],
        GroupId::G55 => vec![(0, 1, 2), (0, 2, 3), (0, 3, 4)],
        GroupId::G56 => vec![(0, 1, 2), (0, 2, 3), (0, 3, 4), (1, 2, 4)],
    }
}

/// Matrix of `ad X_i` with `m[k][j]` the `X_k` coefficient of `[X_i, X_j]`.
fn ad(dim: usize, br: &[(usize, usize, usize)], i: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; dim]; dim];
    for &(a, b, c) in br {
        if a == i {
            m[c][b] += 1;
        }
        if b == i {
            m[c][a] -= 1;
        }
    }
    m
}

/// `exp(-ad X_i)` modulo `p^n`.
fn exp_neg_ad(dim: usize, br: &[(usize, usize, usize)], i: usize, pn: u64) -> Vec<Vec<u64>> {
    let a = ad(dim, br, i);
    let mul = |x: &Vec<Vec<i128>>, y: &Vec<Vec<i64>>| -> Vec<Vec<i128>> {
        (0..dim).map(|r| (0..dim).map(|c| (0..dim).map(|k| x[r][k] * y[k][c] as i128).sum()).collect()).collect()
    };
    let mut term: Vec<Vec<i128>> = (0..dim).map(|r| (0..dim).map(|c| (r == c) as i128).collect()).collect();
    let mut out = term.clone();
    let mut fact: i128 = 1;
    for k in 1..=dim {
        term = mul(&term, &a);
        fact *= k as i128;
        let sign = if k % 2 == 1 { -1 } else { 1 };
        if term.iter().all(|r| r.iter().all(|v| *v == 0)) {
            break;
        }
        let inv = inv_mod(fact, pn).expect("p > class") as i128;
        for r in 0..dim {
            for c in 0..dim {
                out[r][c] += sign * term[r][c] * inv;
            }
        }
    }
    out.iter().map(|r| r.iter().map(|v| v.rem_euclid(pn as i128) as u64).collect()).collect()
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let g = parent[parent[x as usize] as usize];
        parent[x as usize] = g;
        x = g;
    }
    x
}

fn encode(a: &[u64], pn: u64) -> u32 {
    a.iter().fold(0u64, |acc, v| acc * pn + v) as u32
}

fn generators(id: GroupId, dim: usize, pn: u64) -> Vec<Vec<Vec<u64>>> {
    let br = brackets(id);
    (0..dim).map(|i| exp_neg_ad(dim, &br, i, pn)).collect()
}

fn act(m: &[Vec<u64>], a: &[u64], pn: u64) -> Vec<u64> {
    (0..a.len()).map(|j| (0..a.len()).fold(0u64, |s, k| (s + a[k] * m[k][j]) % pn)).collect()
}

/// Orbit root of every point and the size of every orbit.
fn orbits(id: GroupId, p: u64, n: u32) -> (Vec<u32>, Vec<u32>) {
    let law = GroupLaw::new(id);
    let dim = law.dim;
    let pn = ipow(p, n);
    let total = pn.pow(dim as u32) as usize;
    let mats = generators(id, dim, pn);
    let mut parent: Vec<u32> = (0..total as u32).collect();
    let mut a = vec![0u64; dim];
    for idx in 0..total {
        let mut r = idx as u64;
        for j in (0..dim).rev() {
            a[j] = r % pn;
            r /= pn;
        }
        for m in &mats {
            let b = act(m, &a, pn);
            let (x, y) = (find(&mut parent, idx as u32), find(&mut parent, encode(&b, pn)));
            if x != y {
                parent[x.max(y) as usize] = x.min(y);
            }
        }
    }
    let mut size = vec![0u32; total];
    for i in 0..total as u32 {
        let r = find(&mut parent, i);
        parent[i as usize] = r;
        size[r as usize] += 1;
    }
    (parent, size)
}

fn point(l: &RepLabel, n: u32) -> Vec<u64> {
    l.xi.components.iter().map(|c| c.numer * ipow(l.prime, n - c.denom_exp)).collect()
}

/// Labels whose orbit size disagrees with `d^2`, and labels sharing an orbit.
fn check(id: GroupId, p: u64, n: u32) -> (usize, Vec<String>) {
    let law = GroupLaw::new(id);
    let labels = enumerate_dual_ball(&law, p, n, u128::MAX).unwrap();
    let (root, size) = orbits(id, p, n);
    let pn = ipow(p, n);
    let mut seen = std::collections::HashMap::new();
    let mut bad = Vec::new();
    for l in &labels {
        let r = root[encode(&point(l, n), pn) as usize];
        let s = size[r as usize] as u64;
        if s != l.dim * l.dim {
            bad.push(format!("{l}: d^2 = {} but orbit has {s}", l.dim * l.dim));
        }
        if let Some(other) = seen.insert(r, l.to_string()) {
            bad.push(format!("{l} and {other} share an orbit"));
        }
    }
    let n_orbits = root.iter().enumerate().filter(|(i, r)| *i as u32 == **r).count();
    if n_orbits != labels.len() {
        bad.push(format!("{n_orbits} orbits but {} labels", labels.len()));
    }
    (labels.len(), bad)
}

fn run(cases: &[(GroupId, u64, u32)]) {
    let mut failures = Vec::new();
    for &(id, p, n) in cases {
        let (count, bad) = check(id, p, n);
        if !bad.is_empty() {
            failures.push(format!("{id}@({p},{n}) [{count} labels]: {} problems, e.g. {}", bad.len(), bad[..bad.len().min(4)].join("; ")));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn low_dimensional_transversals() {
    run(&[
        (GroupId::Zp(2), 3, 2),
        (GroupId::H(1), 3, 3),
        (GroupId::H(1), 5, 2),
        (GroupId::H(2), 3, 2),
        (GroupId::B4, 3, 3),
        (GroupId::B4, 5, 2),
    ]);
}

#[test]
fn five_dimensional_transversals_p3() {
    run(&[(GroupId::G52, 3, 2), (GroupId::G52, 3, 3)]);
}

#[test]
fn five_dimensional_transversals_p5() {
    run(&[(GroupId::G52, 5, 2), (GroupId::G53, 5, 2), (GroupId::G54, 5, 2), (GroupId::G55, 5, 2), (GroupId::G56, 5, 2)]);
}

/// Orbit of a single point by breadth-first search, or `None` past `cap`.
fn orbit_of(mats: &[Vec<Vec<u64>>], start: Vec<u64>, pn: u64, cap: usize) -> Option<Vec<Vec<u64>>> {
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(a) = queue.pop_front() {
        for m in mats {
            let b = act(m, &a, pn);
            if seen.insert(b.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(b);
            }
        }
        out.push(a);
    }
    Some(out)
}

/// Sampled points at a level too deep for exhaustive union-find: every
/// orbit must contain exactly one label, of dimension `sqrt |orbit|`.
fn sampled(id: GroupId, p: u64, n: u32, draws: usize, seed: u64) -> (usize, Vec<String>) {
    let law = GroupLaw::new(id);
    let dim = law.dim;
    let pn = ipow(p, n);
    let mats = generators(id, dim, pn);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let mut done = 0;
    for _ in 0..draws {
        let start: Vec<u64> = (0..dim)
            .map(|_| {
                let k = rng.gen_range(0..=n);
                let unit = loop {
                    let u = rng.gen_range(1..pn);
                    if u % p != 0 {
                        break u;
                    }
                };
                if k == 0 {
                    0
                } else {
                    unit % ipow(p, k) * ipow(p, n - k)
                }
            })
            .collect();
        let Some(orbit) = orbit_of(&mats, start, pn, 400_000) else { continue };
        done += 1;
        let members: Vec<RepLabel> = orbit
            .iter()
            .map(|a| a.iter().map(|v| DualElem::new(p, *v as i128, n)).collect::<Vec<_>>())
            .filter(|c| membership(&law, c).is_some())
            .map(|c| RepLabel::new(law, DualPoint::new(c)).unwrap())
            .collect();
        match members.as_slice() {
            [l] if (l.dim * l.dim) as usize == orbit.len() => {}
            [l] => bad.push(format!("{l}: d^2 = {} but orbit has {}", l.dim * l.dim, orbit.len())),
            ls => bad.push(format!(
                "orbit of size {} holds {} labels: {}",
                orbit.len(),
                ls.len(),
                ls.iter().take(3).map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
            )),
        }
    }
    (done, bad)
}

#[test]
fn sampled_orbits_at_depth() {
    let cases = [
        (GroupId::H(1), 3, 5),
        (GroupId::B4, 3, 5),
        (GroupId::B4, 5, 4),
        (GroupId::G52, 3, 4),
        (GroupId::G53, 5, 3),
        (GroupId::G54, 5, 3),
        (GroupId::G55, 5, 3),
        (GroupId::G56, 5, 3),
    ];
    let mut failures = Vec::new();
    for (i, &(id, p, n)) in cases.iter().enumerate() {
        let (done, bad) = sampled(id, p, n, 60, 7 + i as u64);
        assert!(done >= 20, "{id}@({p},{n}): only {done} orbits under the cap");
        if !bad.is_empty() {
            failures.push(format!("{id}@({p},{n}): {}", bad[..bad.len().min(4)].join("; ")));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

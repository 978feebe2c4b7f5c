//! Mackey's criterion for the induced realizations at depths where the
//! character norm is too expensive to sum: the inducing subgroup `H` is
//! normal, `pi` restricted to `H` is diagonal with the conjugates of the
//! inducing character on the diagonal, and `pi` is irreducible exactly when
//! those conjugates are pairwise distinct.

use std::collections::HashSet;

use pnilrep::dual::{membership, RepLabel};
use pnilrep::group::{Coords, GroupId, GroupLaw, MAX_DIM};
use pnilrep::padic::{ipow, DualElem, DualPoint};
use pnilrep::rep::{random_coords, Rep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Topological generators of the inducing subgroup: the last three axes
/// together with the members of `H` among `(p^{k2}, 0)`, `(0, p^{k2})` and
/// the first lifts `(p^{k1}, y)`, `(y, p^{k1})` on the support.
fn subgroup_generators(rep: &Rep) -> Vec<Coords> {
    let sizes = rep.index_sizes();
    let plane = |a: u64, b: u64| {
        let mut g = [0u64; MAX_DIM];
        g[0] = a;
        g[1] = b;
        g
    };
    let mut gens: Vec<Coords> = (2..5)
        .map(|i| {
            let mut e = [0u64; MAX_DIM];
            e[i] = 1;
            e
        })
        .collect();
    let mut cands = vec![plane(sizes[1], 0), plane(0, sizes[1])];
    cands.extend((0..rep.md.m).map(|y| plane(sizes[0], y)).find(|g| rep.supported(g)));
    cands.extend((0..rep.md.m).map(|y| plane(y, sizes[0])).find(|g| rep.supported(g)));
    gens.extend(cands.into_iter().filter(|g| rep.supported(g)));
    gens
}

fn check_induced(rep: &Rep) -> Result<(), String> {
    let gens = subgroup_generators(rep);
    let mut seen = HashSet::new();
    for c in 0..rep.dim {
        let mut sig = Vec::with_capacity(gens.len());
        for g in &gens {
            let (r, t) = rep.column_tail(g, c);
            if r != c {
                return Err(format!("{}: H does not act diagonally", rep.label));
            }
            sig.push(t);
        }
        if !seen.insert(sig) {
            return Err(format!("{}: two conjugates of the inducing character agree", rep.label));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..if rep.dim <= 625 { 4 } else { 0 } {
        let x = random_coords(&rep.law(), &rep.md, &mut rng);
        let y = random_coords(&rep.law(), &rep.md, &mut rng);
        let res = rep.hom_residual(&x, &y);
        if res > 1e-9 {
            return Err(format!("{}: homomorphism residual {res:e}", rep.label));
        }
    }
    Ok(())
}

/// Random canonical labels at level `n` with nontrivial last coordinate,
/// each component's denominator exponent drawn uniformly.
fn random_labels(id: GroupId, p: u64, n: u32, count: usize, seed: u64) -> Vec<RepLabel> {
    let law = GroupLaw::new(id);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let xi: Vec<DualElem> = (0..law.dim)
            .map(|i| {
                let k = if i == law.dim - 1 { rng.gen_range(1..=n) } else { rng.gen_range(0..=n) };
                DualElem::new(p, rng.gen_range(0..ipow(p, k)) as i128, k)
            })
            .collect();
        if membership(&law, &xi).is_some() {
            out.push(RepLabel::new(law, DualPoint::new(xi)).unwrap());
        }
    }
    out
}

#[test]
fn deep_induced_labels_are_irreducible() {
    let law53 = GroupLaw::new(GroupId::G53);
    let law56 = GroupLaw::new(GroupId::G56);
    let mut labels = vec![
        RepLabel::parse(law53, 5, "1,1,1,3/125,1/5").unwrap(),
        RepLabel::parse(law53, 5, "1,1,1,1/125,1/25").unwrap(),
        RepLabel::parse(law56, 5, "1,1,1,1/125,1/5").unwrap(),
        RepLabel::parse(law56, 5, "1,3/25,2/125,7/125,1/5").unwrap(),
        RepLabel::parse(law56, 5, "1,1,11/125,1,2/5").unwrap(),
        RepLabel::parse(law56, 5, "1,1,1/125,1,1/25").unwrap(),
    ];
    labels.extend(random_labels(GroupId::G53, 5, 3, 40, 11));
    labels.extend(random_labels(GroupId::G56, 5, 3, 40, 12));
    labels.extend(random_labels(GroupId::G54, 5, 3, 20, 13));
    let mut failures = Vec::new();
    let mut induced = 0;
    for l in &labels {
        let rep = Rep::new(l).unwrap();
        if !rep.is_induced() || rep.dim > 4000 {
            continue;
        }
        induced += 1;
        if let Err(e) = check_induced(&rep) {
            failures.push(e);
        }
    }
    assert!(induced >= 40, "only {induced} induced labels exercised");
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

//! Vladimirov-Taibleson operators, directional VT operators along
//! one-parameter subgroups, sub-Laplacian symbols, closed-form spectra and
//! the hypoellipticity margin.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dual::{enumerate_dual_ball, RepLabel};
use crate::error::{Error, Result};
use crate::group::{quotient_coords, Coords, GroupId, GroupLaw};
use crate::padic::{ipow, p_pow, vt_constant, vt_multiplier, DualElem, Modulus, Rat};
use crate::rep::Rep;
use crate::sum::det_sum;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `int_{Z_p^n} f` for `f` constant modulo `p^r`, as an exact coset average.
pub fn integrate_locally_constant<F>(p: u64, nvars: usize, r: u32, f: F) -> Complex64
where
    F: Fn(&[u64]) -> Complex64 + Sync,
{
    let pr = ipow(p, r);
    let total = pr.pow(nvars as u32);
    let s = det_sum(total, ZERO, |i| {
        let mut u = [0u64; 8];
        let mut idx = i;
        for j in (0..nvars).rev() {
            u[j] = idx % pr;
            idx /= pr;
        }
        f(&u[..nvars])
    });
    s / total as f64
}

/// Integral at resolution `r` together with the change seen at `r + 1`.
pub fn integrate_checked<F>(p: u64, nvars: usize, r: u32, f: F) -> (Complex64, f64)
where
    F: Fn(&[u64]) -> Complex64 + Sync,
{
    let a = integrate_locally_constant(p, nvars, r, &f);
    let b = integrate_locally_constant(p, nvars, r + 1, &f);
    (a, (a - b).norm())
}

/// `(1 - p^alpha) / (1 - p^{-(alpha + d)})`, the normalizing constant of `D^alpha`.
pub fn vt_normalizer(p: u64, d: u32, alpha: f64) -> f64 {
    let pf = p as f64;
    (1.0 - p_pow(pf, alpha)) / (1.0 - p_pow(pf, -(alpha + d as f64)))
}

/// Eigenvalue of `D^alpha` on matrix coefficients of a label of level `l`.
pub fn vt_eigenvalue(p: u64, d: u32, alpha: f64, level: u32) -> f64 {
    if level == 0 {
        return 0.0;
    }
    p_pow(ipow(p, level) as f64, alpha) - vt_constant(p, d, alpha)
}

fn min_valuation(p: u64, y: &[u64], cap: u32) -> u32 {
    y.iter()
        .map(|&v| {
            if v == 0 {
                return cap;
            }
            let mut v = v;
            let mut k = 0;
            while v % p == 0 && k < cap {
                v /= p;
                k += 1;
            }
            k
        })
        .min()
        .unwrap_or(cap)
}

/// `D^alpha f(x)` for `f` constant on cosets of `G(p^m Z_p)`.
///
/// The integral over `G` splits into spheres `||y|| = p^{-k}`, `k < m`; the
/// ball `G(p^m Z_p)` contributes nothing.
pub fn vt_apply<F>(law: &GroupLaw, p: u64, alpha: f64, m: u32, f: F, x: &Coords) -> Result<Complex64>
where
    F: Fn(&Coords) -> Complex64 + Sync,
{
    if m == 0 {
        return Ok(ZERO);
    }
    let md = Modulus::new(p, m)?;
    let d = law.dim;
    let pm = md.m;
    let total = pm.pow(d as u32);
    let x = x.map(|v| v % pm);
    let fx = f(&x);
    let c = vt_normalizer(p, d as u32, alpha);
    let s = det_sum(total, ZERO, |i| {
        let y = quotient_coords(i, pm, d);
        let k = min_valuation(p, &y[..d], m);
        if k >= m {
            return ZERO;
        }
        let w = p_pow(p as f64, k as f64 * (alpha + d as f64));
        (f(&law.star(&md, &x, &law.inverse(&md, &y))) - fx) * w
    });
    Ok(s * c / total as f64)
}

/// `d_w^alpha f(x)`: the one-variable VT integral along `t -> gamma_w(t)`.
pub fn directional_vt_apply<F>(law: &GroupLaw, p: u64, w: &[u64], alpha: f64, m: u32, f: F, x: &Coords) -> Result<Complex64>
where
    F: Fn(&Coords) -> Complex64,
{
    if m == 0 {
        law.one_param(&Modulus::new(p, 1)?, w, 0)?;
        return Ok(ZERO);
    }
    let md = Modulus::new(p, m)?;
    let x = x.map(|v| v % md.m);
    let fx = f(&x);
    let c = vt_normalizer(p, 1, alpha);
    let mut acc = ZERO;
    for t in 1..md.m {
        let k = min_valuation(p, &[t], m);
        let g = law.inverse(&md, &law.one_param(&md, w, t)?);
        let wt = p_pow(p as f64, k as f64 * (alpha + 1.0));
        acc += (f(&law.star(&md, &x, &g)) - fx) * wt;
    }
    Ok(acc * c / md.m as f64)
}

/// The canonical basis `e_1, ..., e_kappa` of the generating stratum.
pub fn canonical_directions(law: &GroupLaw) -> Vec<Vec<u64>> {
    (0..law.kappa)
        .map(|i| {
            let mut w = vec![0; law.kappa];
            w[i] = 1;
            w
        })
        .collect()
}

/// `sigma(xi) = sum_w d_w^alpha pi(x)|_{x=e}`, a `d x d` matrix.
pub fn sublaplacian_symbol(rep: &Rep, directions: &[Vec<u64>], alpha: f64) -> Result<DMatrix<Complex64>> {
    let law = rep.law();
    let p = rep.prime();
    let d = rep.dim;
    let m = rep.level();
    let mut sigma = DMatrix::from_element(d, d, ZERO);
    if m == 0 {
        for w in directions {
            law.one_param(&rep.md, w, 0)?;
        }
        return Ok(sigma);
    }
    let pm = ipow(p, m);
    let c = vt_normalizer(p, 1, alpha) / pm as f64;
    for w in directions {
        for t in 1..pm {
            let k = min_valuation(p, &[t], m);
            let g = law.inverse(&rep.md, &law.one_param(&rep.md, w, t)?);
            let wt = c * p_pow(p as f64, k as f64 * (alpha + 1.0));
            for (col, (row, tail)) in rep.columns(&g).into_iter().enumerate() {
                sigma[(row, col)] += rep.root(tail) * wt;
            }
            for i in 0..d {
                sigma[(i, i)] -= Complex64::new(wt, 0.0);
            }
        }
    }
    Ok(sigma)
}

/// Sorted eigenvalues and eigenvectors of the Hermitian part of a symbol.
pub fn hermitian_eigen(sigma: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let h = (sigma + sigma.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(sigma.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// `|| sigma - sigma^* ||_F`.
pub fn hermitian_residual(sigma: &DMatrix<Complex64>) -> f64 {
    (sigma - sigma.adjoint()).norm()
}

/// One eigenvalue of a closed-form spectrum with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub tau: Vec<String>,
    pub h_prime: Vec<u64>,
    pub value: f64,
}

fn dual_of(p: u64, q: &Rat) -> DualElem {
    DualElem::from_rat(p, q)
}

fn dot(p: u64, a: &[Rat], w: &[u64]) -> DualElem {
    let s = a.iter().zip(w).fold(Rat::from_integer(0), |acc, (x, wi)| acc + x * Rat::from_integer(*wi as i128));
    dual_of(p, &s)
}

fn tuples(sizes: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &s in sizes {
        out = out.into_iter().flat_map(|t| (0..s).map(move |v| [t.clone(), vec![v]].concat())).collect();
    }
    out
}

fn is_canonical_basis(law: &GroupLaw, directions: &[Vec<u64>]) -> bool {
    directions == canonical_directions(law).as_slice()
}

/// The closed-form eigenvalue list over `(tau, h')`.
///
/// Each direction contributes `|.|^alpha - (1 - p^{-1})/(1 - p^{-(alpha+1)})`
/// when its argument has norm above 1 and 0 otherwise. For `H_d`, `G^{5,2}`
/// and `G^{5,3}` a general collection `W` enters through `A(tau, h') . w`;
/// the remaining laws accept the canonical basis only.
pub fn closed_form_spectrum(label: &RepLabel, directions: &[Vec<u64>], alpha: f64) -> Result<Vec<SpectrumEntry>> {
    let law = label.law;
    let p = label.prime;
    let q = |i: usize| label.component(i).to_rat();
    let k = |i: usize| label.component(i).denom_exp;
    let r = |v: u64| Rat::from_integer(v as i128);
    let half = Rat::new(1, 2);
    for w in directions {
        law.one_param(&Modulus::new(p, 1)?, w, 0)?;
    }
    let general = matches!(law.id, GroupId::Zp(_) | GroupId::H(_) | GroupId::G52 | GroupId::G53);
    if !general && !is_canonical_basis(&law, directions) {
        return Err(Error::NonGeneratorDirection(format!("{directions:?} (closed form uses the canonical basis)")));
    }
    // (tau exponents, h' exponents, argument builder)
    type Args = Box<dyn Fn(&[Rat], &[u64]) -> Vec<Rat>>;
    let (tk, hk, args): (Vec<u32>, Vec<u32>, Args) = match law.id {
        GroupId::Zp(d) => {
            let xi: Vec<Rat> = (0..d as usize).map(q).collect();
            (vec![], vec![], Box::new(move |_, _| xi.clone()))
        }
        GroupId::H(d) => {
            let d = d as usize;
            let kl = k(2 * d);
            let xi: Vec<Rat> = (0..2 * d).map(q).collect();
            let lam = q(2 * d);
            (
                vec![kl; d],
                vec![kl; d],
                Box::new(move |t, h| {
                    let mut a: Vec<Rat> = (0..d).map(|i| xi[i] + t[i]).collect();
                    a.extend((0..d).map(|i| xi[d + i] + lam * r(h[i])));
                    a
                }),
            )
        }
        GroupId::B4 => {
            let kk = k(2).max(k(3));
            let (x1, x2, x3, x4) = (q(0), q(1), q(2), q(3));
            (vec![kk], vec![kk], Box::new(move |t, h| vec![x1 + t[0], x2 + x3 * r(h[0]) + x4 * half * r(h[0] * h[0])]))
        }
        GroupId::G52 => {
            let kk = k(3).max(k(4));
            let (x1, x2, x3, x4, x5) = (q(0), q(1), q(2), q(3), q(4));
            (vec![kk], vec![kk], Box::new(move |t, h| vec![x1 + t[0], x2 + x4 * r(h[0]), x3 + x5 * r(h[0])]))
        }
        GroupId::G53 => {
            if k(4) > 0 && !label.component(3).is_trivial() {
                return Err(Error::UnsupportedLaw(format!("g53 label {label} has |xi4| > |xi5| > 1")));
            }
            let kk = k(3).max(k(4));
            let (x1, x2, x3, x4, x5) = (q(0), q(1), q(2), q(3), q(4));
            (
                vec![kk, k(4)],
                vec![kk, k(4)],
                Box::new(move |t, h| {
                    let h1 = r(h[0]);
                    vec![x1 + t[0], x2 + t[1] + x4 * h1 + half * h1 * h1 * x5, x3 + r(h[1]) * x5]
                }),
            )
        }
        GroupId::G54 if k(4) == 0 => {
            let kk = k(2).max(k(3));
            let (x1, x2, x3, x4) = (q(0), q(1), q(2), q(3));
            (vec![kk], vec![kk], Box::new(move |t, h| vec![x1 + t[0], x2 + x3 * r(h[0]) + x4 * half * r(h[0] * h[0])]))
        }
        GroupId::G54 => {
            if label.component(3).is_trivial() {
                return Err(Error::UnsupportedLaw(format!("g54 label {label} has xi4 trivial")));
            }
            let kk = k(2).max(k(3));
            let (x1, x2, x3, x4, x5) = (q(0), q(1), q(2), q(3), q(4));
            let ratio = x3 * x5 / x4;
            (
                vec![kk],
                vec![kk],
                Box::new(move |t, h| {
                    let hh = r(h[0]);
                    vec![x1 + t[0] + half * x5 * hh * hh, x2 + t[0] + ratio * hh]
                }),
            )
        }
        GroupId::G55 => {
            let kk = k(2).max(k(3)).max(k(4));
            let (x1, x2, x3, x4, x5) = (q(0), q(1), q(2), q(3), q(4));
            (
                vec![kk],
                vec![kk],
                Box::new(move |t, h| {
                    let hh = r(h[0]);
                    vec![x1 + t[0], x2 + x3 * hh + x4 * half * hh * hh + x5 * Rat::new(1, 6) * hh * hh * hh]
                }),
            )
        }
        GroupId::G56 => return Err(Error::UnsupportedLaw("g56 has only a lower bound".into())),
    };
    let tsizes: Vec<u64> = tk.iter().map(|e| ipow(p, *e)).collect();
    let hsizes: Vec<u64> = hk.iter().map(|e| ipow(p, *e)).collect();
    let mut out = Vec::new();
    for tn in tuples(&tsizes) {
        let tau: Vec<Rat> = tn.iter().zip(&tk).map(|(c, e)| Rat::new(*c as i128, ipow(p, *e) as i128)).collect();
        let tau_s: Vec<String> = tau.iter().map(|t| dual_of(p, t).to_string()).collect();
        for h in tuples(&hsizes) {
            let a = args(&tau, &h);
            let value = directions.iter().map(|w| vt_multiplier(p, dot(p, &a, w).norm(), alpha)).sum();
            out.push(SpectrumEntry { tau: tau_s.clone(), h_prime: h.clone(), value });
        }
    }
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(out)
}

/// Numeric against closed-form spectrum for one label.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub label: RepLabel,
    /// Eigenvalues of the symbol, each repeated `d` times (once per `h'`).
    pub eigenvalues_numeric: Vec<f64>,
    pub eigenvalues_closed_form: Option<Vec<f64>>,
    pub entries: Vec<SpectrumEntry>,
    pub max_abs_diff: Option<f64>,
    pub hermitian_residual: f64,
    pub note: Option<String>,
    pub pass: bool,
}

pub fn spectrum_report(rep: &Rep, directions: &[Vec<u64>], alpha: f64, tol: f64) -> Result<SpectrumReport> {
    let sigma = sublaplacian_symbol(rep, directions, alpha)?;
    let (vals, _) = hermitian_eigen(&sigma);
    let numeric: Vec<f64> = vals.iter().flat_map(|v| std::iter::repeat_n(*v, rep.dim)).collect();
    let (closed, entries, note) = match closed_form_spectrum(&rep.label, directions, alpha) {
        Ok(e) => (Some(e.iter().map(|x| x.value).collect::<Vec<f64>>()), e, None),
        Err(err @ Error::UnsupportedLaw(_)) => (None, vec![], Some(err.to_string())),
        Err(err) => return Err(err),
    };
    let mut note = note;
    let diff = closed.as_ref().and_then(|c| {
        if c.len() != numeric.len() {
            note = Some(format!("closed form lists {} values, symbol gives {}", c.len(), numeric.len()));
            None
        } else {
            Some(c.iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        }
    });
    let pass = diff.is_some_and(|d| d < tol);
    Ok(SpectrumReport {
        label: rep.label.clone(),
        eigenvalues_numeric: numeric,
        eigenvalues_closed_form: closed,
        entries,
        max_abs_diff: diff,
        hermitian_residual: hermitian_residual(&sigma),
        note,
        pass,
    })
}

/// Apply `sum_w d_w^alpha` to a function at `x`.
pub fn sublaplacian_apply<F>(law: &GroupLaw, p: u64, directions: &[Vec<u64>], alpha: f64, m: u32, f: F, x: &Coords) -> Result<Complex64>
where
    F: Fn(&Coords) -> Complex64,
{
    let mut acc = ZERO;
    for w in directions {
        acc += directional_vt_apply(law, p, w, alpha, m, &f, x)?;
    }
    Ok(acc)
}

/// The closed-form eigenfunction `e(P(x, h') + tau . (x1, ...))`
/// for shift realizations.
pub fn closed_form_eigenfunction(rep: &Rep, h: &[u64], tau: &[DualElem], x: &Coords) -> Option<Complex64> {
    let t = rep.phase_poly_tail(x, h)?;
    let mut ph = rep.phase(t);
    for (i, ti) in tau.iter().enumerate() {
        let xi = crate::padic::PadicInt { prime: rep.prime(), precision: rep.md.n, residue: x[i] % rep.md.m };
        ph = ph.add(&crate::padic::fractional_part(ti, &xi).ok()?);
    }
    Some(ph.to_complex())
}

/// Hypoellipticity data for one label.
#[derive(Clone, Debug, Serialize)]
pub struct MarginRow {
    pub label: RepLabel,
    pub inf_norm: f64,
    pub generator_norm: u64,
    pub ratio: f64,
    pub bound_ok: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginReport {
    pub group: String,
    pub prime: u64,
    pub level: u32,
    pub alpha: f64,
    pub c_star: f64,
    pub minimizer: Option<RepLabel>,
    pub rows: Vec<MarginRow>,
    pub pass: bool,
}

/// `||(xi_1, ..., xi_kappa)||_p`.
pub fn generator_norm(label: &RepLabel) -> u64 {
    (0..label.law.kappa).map(|i| label.component(i).norm()).max().unwrap_or(1)
}

/// `c* = min ||sigma(xi)||_inf / ||(xi_1..xi_kappa)||^alpha` over nontrivial labels of `B(n)`.
pub fn hypoellipticity_margin(law: &GroupLaw, p: u64, alpha: f64, n: u32, cap: u128) -> Result<MarginReport> {
    let labels = enumerate_dual_ball(law, p, n, cap)?;
    let dirs = canonical_directions(law);
    let mut rows = Vec::new();
    for l in labels.iter().filter(|l| !l.is_trivial()) {
        let rep = Rep::new(l)?;
        let (vals, _) = hermitian_eigen(&sublaplacian_symbol(&rep, &dirs, alpha)?);
        let inf = vals.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        let g = generator_norm(l);
        rows.push(MarginRow { label: l.clone(), inf_norm: inf, generator_norm: g, ratio: inf / p_pow(g as f64, alpha), bound_ok: None });
    }
    let (c_star, minimizer) =
        rows.iter().min_by(|a, b| a.ratio.total_cmp(&b.ratio)).map(|r| (r.ratio, Some(r.label.clone()))).unwrap_or((f64::INFINITY, None));
    if law.id == GroupId::G56 {
        for r in rows.iter_mut() {
            r.bound_ok = Some(r.inf_norm >= c_star * p_pow(r.generator_norm as f64, alpha) * (1.0 - 1e-12));
        }
    }
    let pass = c_star > 1e-12 && rows.iter().all(|r| r.bound_ok != Some(false));
    Ok(MarginReport { group: law.id.to_string(), prime: p, level: n, alpha, c_star, minimizer, rows, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::DEFAULT_CAP;
    use crate::padic::PhaseRational;

    fn label(id: GroupId, p: u64, s: &str) -> RepLabel {
        RepLabel::parse(GroupLaw::new(id), p, s).unwrap()
    }

    #[test]
    fn integration_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(integrate_locally_constant(5, 2, 2, |_| one * 3.0), one * 3.0);
        let ind = integrate_locally_constant(3, 1, 2, |u| if u[0] % 3 == 0 { one } else { ZERO });
        assert!((ind.re - 1.0 / 3.0).abs() < 1e-15);
        let ch = integrate_locally_constant(5, 1, 1, |u| PhaseRational::new(5, u[0] as i128, 1).to_complex());
        assert!(ch.norm() < 1e-12);
        let (_, delta) = integrate_checked(5, 1, 2, |u| PhaseRational::new(5, u[0] as i128, 2).to_complex());
        assert!(delta < 1e-12);
    }

    #[test]
    fn vt_of_constant_is_zero() {
        let law = GroupLaw::new(GroupId::H(1));
        let v = vt_apply(&law, 3, 1.0, 2, |_| Complex64::new(2.0, 0.0), &[1, 2, 3, 0, 0]).unwrap();
        assert!(v.norm() < 1e-12);
        let d = directional_vt_apply(&law, 3, &[1, 0], 1.5, 2, |_| Complex64::new(2.0, 0.0), &[1, 2, 3, 0, 0]).unwrap();
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn vt_on_abelian_character() {
        let law = GroupLaw::new(GroupId::Zp(1));
        let f = |x: &Coords| PhaseRational::new(3, x[0] as i128, 1).to_complex();
        let v = vt_apply(&law, 3, 1.0, 1, f, &[2, 0, 0, 0, 0]).unwrap();
        assert!((v - f(&[2, 0, 0, 0, 0]) * 2.25).norm() < 1e-12);
        let law2 = GroupLaw::new(GroupId::Zp(2));
        let g = |x: &Coords| PhaseRational::new(3, (x[0] + 4 * x[1]) as i128, 2).to_complex();
        for (i, norm) in [(0, 9u64), (1, 9)] {
            let mut w = vec![0, 0];
            w[i] = 1;
            let want = vt_multiplier(3, norm, 0.5);
            let v = directional_vt_apply(&law2, 3, &w, 0.5, 2, g, &[1, 1, 0, 0, 0]).unwrap();
            assert!((v - g(&[1, 1, 0, 0, 0]) * want).norm() < 1e-12);
        }
    }

    #[test]
    fn vt_on_matrix_coefficients() {
        for (id, p, s) in [(GroupId::H(1), 3, "1,1,1/3"), (GroupId::B4, 3, "1,1/3,1,1/3"), (GroupId::G54, 5, "1,1,1,1,1/5")] {
            let rep = Rep::new(&label(id, p, s)).unwrap();
            let law = rep.law();
            let f = |x: &Coords| rep.matrix_coefficient(0, 1, x).unwrap();
            let lam = vt_eigenvalue(p, law.dim as u32, 2.0, rep.level());
            for x in [[1, 2, 0, 1, 0], [0, 1, 2, 2, 1]] {
                let v = vt_apply(&law, p, 2.0, rep.level(), f, &x).unwrap();
                assert!((v - f(&x) * lam).norm() < 1e-9, "{id}");
            }
        }
    }

    #[test]
    fn trivial_symbol_is_zero() {
        let rep = Rep::new(&RepLabel::trivial(GroupLaw::new(GroupId::B4), 3)).unwrap();
        let s = sublaplacian_symbol(&rep, &canonical_directions(&rep.law()), 1.0).unwrap();
        assert_eq!(s.shape(), (1, 1));
        assert_eq!(s[(0, 0)], ZERO);
    }

    #[test]
    fn symbol_is_hermitian() {
        let law = GroupLaw::new(GroupId::G56);
        for l in enumerate_dual_ball(&law, 5, 1, DEFAULT_CAP).unwrap().iter().step_by(5) {
            let rep = Rep::new(l).unwrap();
            let s = sublaplacian_symbol(&rep, &canonical_directions(&law), 1.0).unwrap();
            assert!(hermitian_residual(&s) < 1e-9, "{l}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let l = label(GroupId::H(1), 3, "1,1,1/3");
        let e = closed_form_spectrum(&l, &canonical_directions(&l.law), 1.0).unwrap();
        assert_eq!(e.len(), 9);
        let row = e.iter().find(|r| r.tau == ["1/3"] && r.h_prime == [1]).unwrap();
        assert!((row.value - 4.5).abs() < 1e-12);
        let t = RepLabel::trivial(GroupLaw::new(GroupId::G52), 3);
        let e = closed_form_spectrum(&t, &canonical_directions(&t.law), 1.0).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].value, 0.0);
        let b = label(GroupId::B4, 5, "1/25,1/5,1,1");
        let e = closed_form_spectrum(&b, &canonical_directions(&b.law), 1.0).unwrap();
        let c1 = vt_constant(5, 1, 1.0);
        assert!((e[0].value - (25.0 + 5.0 - 2.0 * c1)).abs() < 1e-12);
        let g56 = RepLabel::trivial(GroupLaw::new(GroupId::G56), 5);
        assert!(matches!(closed_form_spectrum(&g56, &canonical_directions(&g56.law), 1.0), Err(Error::UnsupportedLaw(_))));
    }

    #[test]
    fn abelian_margin() {
        let law = GroupLaw::new(GroupId::Zp(1));
        let r = hypoellipticity_margin(&law, 3, 1.0, 2, DEFAULT_CAP).unwrap();
        let c1 = vt_constant(3, 1, 1.0);
        assert!((r.c_star - (3.0 - c1) / 3.0).abs() < 1e-12);
        assert!(r.pass);
    }
}

//! The states χ_N^M, the quantum Berezin transform β_N^M = (1 ⊗ χ_N^M)Δ,
//! fuzzy spectral subspaces and bands with their explicit monomial bases,
//! L²-orthogonal projections onto finite subspaces, and the image-structure
//! and coinvariance checks.

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{evaluate_su2, AlgebraElement, Monomial};
use crate::linalg::Hermitian;
use crate::corep::l2_inner;
use crate::qnum::{qint, Q_ONE_EPS};

#[derive(Debug, Error)]
pub enum StateError {
    #[error("EvalSU2 requires q = 1, got q = {0}")]
    EvalNeedsClassicalQ(f64),
    #[error("the Gram matrix of the projection basis is not positive definite")]
    DegenerateGram,
}

/// Tagged state descriptors.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// The Haar state h.
    Haar,
    /// The counit ε.
    Counit,
    /// χ_N^M(x) = h((ξ_N^M)* x ξ_N^M).
    Chi { n: usize, m: usize },
    /// h_r(x) = ⟨r+1⟩_q · h((a*)^r x a^r), the Podleś Berezin states.
    HPodles { r: usize },
    /// Evaluation at the SU(2) point with first column (α, β); q = 1 only.
    EvalSU2 { alpha: Complex64, beta: Complex64 },
}

/// ξ_N^M = (M+1)^{-1/2} Σ_{r=N}^{N+M} ⟨r+1⟩_q^{1/2} a^r.
pub fn xi_element(n: usize, m: usize, q: f64) -> AlgebraElement {
    let mut out = AlgebraElement::zero(q);
    for r in n..=n + m {
        let w = (qint(r as i64 + 1, q) / (m as f64 + 1.0)).sqrt();
        out = &out
            + &AlgebraElement::from_monomial(q, Monomial::new(r as i32, 0, 0), Complex64::new(w, 0.0));
    }
    out
}

/// Evaluate a tagged state on an element. χ goes through the direct
/// Haar-sandwich definition; the band-decomposition route is available
/// separately as a cross-check.
pub fn evaluate_state(s: &StateSpec, x: &AlgebraElement) -> Result<Complex64, StateError> {
    let q = x.q();
    match s {
        StateSpec::Haar => Ok(x.haar()),
        StateSpec::Counit => Ok(x.counit()),
        StateSpec::Chi { n, m } => {
            let xi = xi_element(*n, *m, q);
            Ok((&(&xi.adjoint() * x) * &xi).haar())
        }
        StateSpec::HPodles { r } => {
            let ar = AlgebraElement::from_monomial(
                q,
                Monomial::new(*r as i32, 0, 0),
                Complex64::new(1.0, 0.0),
            );
            Ok((&(&ar.adjoint() * x) * &ar).haar() * qint(*r as i64 + 1, q))
        }
        StateSpec::EvalSU2 { alpha, beta } => {
            if (q - 1.0).abs() >= Q_ONE_EPS {
                return Err(StateError::EvalNeedsClassicalQ(q));
            }
            Ok(evaluate_su2(x, *alpha, *beta).expect("q = 1"))
        }
    }
}

/// P_m(x) = (a*)^m Π^L_m(x) + Π^L_{-m}(x) a^m for m > 0, and Π^L_0(x) at m = 0;
/// lands in the grade-zero subalgebra.
pub fn p_operator(m: usize, x: &AlgebraElement) -> AlgebraElement {
    let q = x.q();
    if m == 0 {
        return x.grade_project(0);
    }
    let am = AlgebraElement::from_monomial(q, Monomial::new(m as i32, 0, 0), Complex64::new(1.0, 0.0));
    let plus = &am.adjoint() * &x.grade_project(m as i64);
    let minus = &x.grade_project(-(m as i64)) * &am;
    &plus + &minus
}

/// χ_N^M through the band decomposition
/// χ_N^M(x) = (M+1)^{-1} Σ_{r=N}^{N+M} Σ_{m=0}^{N+M-r} √(⟨m+r+1⟩/⟨r+1⟩) h_r(P_m(x)).
pub fn chi_band_route(n: usize, m: usize, x: &AlgebraElement) -> Complex64 {
    let q = x.q();
    let mut acc = Complex64::default();
    for r in n..=n + m {
        for mm in 0..=(n + m - r) {
            let w = (qint((mm + r) as i64 + 1, q) / qint(r as i64 + 1, q)).sqrt();
            let hr = evaluate_state(&StateSpec::HPodles { r }, &p_operator(mm, x))
                .expect("h_r is defined for every q");
            acc += hr * w / (m as f64 + 1.0);
        }
    }
    acc
}

/// The quantum Berezin transform β_N^M(x) = (1 ⊗ χ_N^M)Δ(x).
pub fn berezin(n: usize, m: usize, x: &AlgebraElement) -> AlgebraElement {
    let chi = StateSpec::Chi { n, m };
    x.coproduct()
        .slice_right(|g| evaluate_state(&chi, g).expect("χ is defined for every q"))
}

/// A fuzzy spectral subspace or band: ordered monomial basis with grade labels.
#[derive(Debug, Clone)]
pub struct FuzzyBandBasis {
    pub q: f64,
    /// Fuzzy degree N.
    pub level: usize,
    /// The grades covered: a single m, or -K..=K for a band.
    pub grades_covered: Vec<i64>,
    pub monomials: Vec<Monomial>,
}

impl FuzzyBandBasis {
    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn elements(&self) -> Vec<AlgebraElement> {
        self.monomials
            .iter()
            .map(|mo| AlgebraElement::from_monomial(self.q, *mo, Complex64::new(1.0, 0.0)))
            .collect()
    }

    pub fn grades(&self) -> Vec<i64> {
        self.monomials.iter().map(|mo| mo.left_grade()).collect()
    }

    /// Gram matrix under the GNS inner product.
    pub fn gram(&self) -> Hermitian {
        gram_of(&self.elements())
    }
}

fn gram_of(els: &[AlgebraElement]) -> Hermitian {
    let d = els.len();
    let mut g = Hermitian::zeros(d);
    for i in 0..d {
        for j in i..d {
            let v = l2_inner(&els[i], &els[j]);
            g.set(i, j, v);
            g.set(j, i, v.conj());
        }
    }
    g
}

/// The explicit monomial basis of Fuzz_N(A^m); dimension (N+|m|+1)(N+1).
pub fn fuzzy_basis(n: usize, m: i64, q: f64) -> FuzzyBandBasis {
    let nn = n as i32;
    let mut monomials = Vec::new();
    if m > 0 {
        let mm = m as i32;
        for i in 0..=nn {
            for j in 0..=(nn - i) {
                monomials.push(Monomial::new(j + mm, i as u32, (i + j) as u32));
                monomials.push(Monomial::new(-j, (i + j + mm) as u32, i as u32));
            }
        }
        for k in 1..mm {
            for i in 0..=nn {
                monomials.push(Monomial::new(k, (i + mm - k) as u32, i as u32));
            }
        }
    } else if m < 0 {
        let p = (-m) as i32;
        for i in 0..=nn {
            for j in 0..=(nn - i) {
                monomials.push(Monomial::new(-(j + p), (i + j) as u32, i as u32));
                monomials.push(Monomial::new(j, i as u32, (i + j + p) as u32));
            }
        }
        for k in 1..p {
            for i in 0..=nn {
                monomials.push(Monomial::new(-k, i as u32, (i + p - k) as u32));
            }
        }
    } else {
        for i in 0..=nn {
            monomials.push(Monomial::new(0, i as u32, i as u32));
        }
        for j in 1..=nn {
            for i in 0..=(nn - j) {
                monomials.push(Monomial::new(j, i as u32, (i + j) as u32));
                monomials.push(Monomial::new(-j, (i + j) as u32, i as u32));
            }
        }
    }
    monomials.sort();
    monomials.dedup();
    FuzzyBandBasis { q, level: n, grades_covered: vec![m], monomials }
}

/// The fuzzy spectral K-band: concatenation of Fuzz_N(A^m) over |m| ≤ K.
pub fn fuzzy_band(n: usize, k: usize, q: f64) -> FuzzyBandBasis {
    let mut monomials = Vec::new();
    let mut grades = Vec::new();
    for m in -(k as i64)..=(k as i64) {
        monomials.extend(fuzzy_basis(n, m, q).monomials);
        grades.push(m);
    }
    monomials.sort();
    monomials.dedup();
    FuzzyBandBasis { q, level: n, grades_covered: grades, monomials }
}

/// L²-orthogonal projection of x onto the span of the given elements.
pub fn project_onto_span(
    els: &[AlgebraElement],
    x: &AlgebraElement,
) -> Result<AlgebraElement, StateError> {
    let q = x.q();
    if els.is_empty() {
        return Ok(AlgebraElement::zero(q));
    }
    let gram = gram_of(els);
    let rhs: Vec<Complex64> = els.iter().map(|f| l2_inner(f, x)).collect();
    let coeffs = gram.solve(&rhs).ok_or(StateError::DegenerateGram)?;
    let mut out = AlgebraElement::zero(q);
    for (c, f) in coeffs.iter().zip(els.iter()) {
        out = &out + &f.scale(*c);
    }
    Ok(out)
}

/// Projection onto a fuzzy basis.
pub fn project_onto(basis: &FuzzyBandBasis, x: &AlgebraElement) -> Result<AlgebraElement, StateError> {
    project_onto_span(&basis.elements(), x)
}

/// Report from the Berezin image-structure check at (N, M, m).
#[derive(Debug, Clone)]
pub struct ImageCheckReport {
    pub rank: usize,
    pub expected_rank: usize,
    pub containment_residual: f64,
    pub spanning_set_size: usize,
}

/// Spanning monomials of the grade-m slice up to total degree `max_degree`.
fn grade_slice_monomials(m: i64, max_degree: u32) -> Vec<Monomial> {
    crate::algebra::monomials_up_to(max_degree)
        .into_iter()
        .filter(|mo| mo.left_grade() == m)
        .collect()
}

/// Computes the rank of β_N^M on the grade-m slice and verifies containment of
/// the image in Fuzz_{N+M-|m|}(A^m) by projection residuals.
pub fn berezin_image_check(n: usize, m: usize, grade: i64, q: f64) -> ImageCheckReport {
    assert!(grade.unsigned_abs() as usize <= m, "image check needs |grade| <= M");
    let degree = (2 * (n + m)) as u32 - grade.unsigned_abs() as u32;
    let spanning = grade_slice_monomials(grade, degree);
    let images: Vec<AlgebraElement> = spanning
        .iter()
        .map(|mo| {
            berezin(
                n,
                m,
                &AlgebraElement::from_monomial(q, *mo, Complex64::new(1.0, 0.0)),
            )
        })
        .filter(|x| !x.is_zero())
        .collect();
    let rank = if images.is_empty() { 0 } else { gram_of(&images).rank(1e-10) };
    let expected_rank =
        (n + m + 1) * (n + m + 1 - grade.unsigned_abs() as usize);
    let target = fuzzy_basis(n + m - grade.unsigned_abs() as usize, grade, q);
    let target_els = target.elements();
    let mut containment_residual = 0.0f64;
    for img in &images {
        let proj = project_onto_span(&target_els, img).expect("fuzzy Gram is positive definite");
        let diff = img - &proj;
        let scale = img.haar_norm().max(1e-300);
        containment_residual = containment_residual.max(diff.haar_norm() / scale);
    }
    ImageCheckReport {
        rank,
        expected_rank,
        containment_residual,
        spanning_set_size: spanning.len(),
    }
}

/// Report from the coinvariance check of Fuzz_N(B^K).
#[derive(Debug, Clone)]
pub struct CoinvarianceReport {
    pub max_residual: f64,
    pub elements_checked: usize,
}

/// Checks that Δ maps every basis element of Fuzz_N(B^K) into
/// O(SU_q(2)) ⊗ Fuzz_N(B^K): the right legs project onto the band with
/// relative residual below tolerance.
pub fn coinvariance_check(n: usize, k: usize, q: f64) -> CoinvarianceReport {
    let basis = fuzzy_band(n, k, q);
    let els = basis.elements();
    let gram = gram_of(&els);
    let mut max_residual = 0.0f64;
    for x in &els {
        let t = x.coproduct();
        // group the tensor by left monomial: T = Σ_l l ⊗ r_l
        let mut groups: std::collections::BTreeMap<Monomial, AlgebraElement> =
            std::collections::BTreeMap::new();
        for ((ml, mr), c) in t.terms() {
            let entry = groups
                .entry(*ml)
                .or_insert_with(|| AlgebraElement::zero(q));
            *entry = &*entry + &AlgebraElement::from_monomial(q, *mr, *c);
        }
        let left_monos: Vec<Monomial> = groups.keys().copied().collect();
        let defects: Vec<AlgebraElement> = groups
            .values()
            .map(|r| {
                let proj = project_onto_span(&els, r).expect("band Gram");
                r - &proj
            })
            .collect();
        let _ = gram.dim;
        // ‖Σ_l l ⊗ d_l‖²_{h⊗h} = Σ_{l,l'} h(l* l') ⟨d_l, d_{l'}⟩
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        let rights: Vec<&AlgebraElement> = groups.values().collect();
        for (i, li) in left_monos.iter().enumerate() {
            for (j, lj) in left_monos.iter().enumerate() {
                let li_el = AlgebraElement::from_monomial(q, *li, Complex64::new(1.0, 0.0));
                let lj_el = AlgebraElement::from_monomial(q, *lj, Complex64::new(1.0, 0.0));
                let gl = l2_inner(&li_el, &lj_el);
                if gl.norm() < 1e-16 {
                    continue;
                }
                num += (gl * l2_inner(&defects[i], &defects[j])).re;
                den += (gl * l2_inner(rights[i], rights[j])).re;
            }
        }
        let rel = if den > 0.0 { (num.max(0.0) / den).sqrt() } else { 0.0 };
        max_residual = max_residual.max(rel);
    }
    CoinvarianceReport { max_residual, elements_checked: els.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_element, Gen};
    use crate::corep::corep_level;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn chi_is_a_state() {
        let q = 0.6;
        let one = AlgebraElement::unit(q);
        for (n, m) in [(0, 0), (1, 2), (3, 1)] {
            let chi = StateSpec::Chi { n, m };
            let v = evaluate_state(&chi, &one).unwrap();
            assert!((v - c(1.0)).norm() < 1e-12, "χ_{n}^{m}(1) = {v}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let chi = StateSpec::Chi { n: 1, m: 1 };
        for _ in 0..200 {
            let x = random_element(q, 2, 2, &mut rng);
            let xx = &x.adjoint() * &x;
            let v = evaluate_state(&chi, &xx).unwrap();
            assert!(v.re >= -1e-10, "positivity: {v}");
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn chi_00_is_haar() {
        let q = 0.45;
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        let chi = StateSpec::Chi { n: 0, m: 0 };
        for _ in 0..50 {
            let x = random_element(q, 3, 3, &mut rng);
            let v = evaluate_state(&chi, &x).unwrap();
            assert!((v - x.haar()).norm() < 1e-12);
        }
        // χ_0^0(a*a) = 1/(1+q²)
        let a = AlgebraElement::generator(Gen::A, q);
        let v = evaluate_state(&chi, &(&a.adjoint() * &a)).unwrap();
        assert!((v - c(1.0 / (1.0 + q * q))).norm() < 1e-12);
    }

    #[test]
    fn chi_band_route_agrees() {
        let q = 0.7;
        let mut rng = ChaCha8Rng::seed_from_u64(131);
        for (n, m) in [(0usize, 1usize), (1, 1), (2, 2)] {
            let chi = StateSpec::Chi { n, m };
            for _ in 0..25 {
                let x = random_element(q, 3, 3, &mut rng);
                let direct = evaluate_state(&chi, &x).unwrap();
                let banded = chi_band_route(n, m, &x);
                assert!(
                    (direct - banded).norm() < 1e-9,
                    "(N,M)=({n},{m}): {direct} vs {banded}"
                );
            }
        }
    }

    #[test]
    fn weak_star_convergence_trend() {
        let q = 0.5;
        let a = AlgebraElement::generator(Gen::A, q);
        let b = AlgebraElement::generator(Gen::B, q);
        for x in [&a.adjoint() * &a, &b * &b.adjoint(), a.adjoint()] {
            let eps = x.counit();
            let mut prev = f64::INFINITY;
            for nm in [2usize, 4, 6] {
                let v = evaluate_state(&StateSpec::Chi { n: nm, m: nm }, &x).unwrap();
                let gap = (v - eps).norm();
                assert!(gap < prev + 1e-12, "N=M={nm}: {gap} vs {prev}");
                prev = gap;
            }
        }
    }

    #[test]
    fn berezin_is_unital_and_star_preserving() {
        let q = 0.55;
        let one = AlgebraElement::unit(q);
        assert!(berezin(0, 0, &one).approx_eq(&one, 1e-12));
        assert!(berezin(2, 1, &one).approx_eq(&one, 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(137);
        for _ in 0..20 {
            let x = random_element(q, 3, 2, &mut rng);
            let lhs = berezin(1, 1, &x.adjoint());
            let rhs = berezin(1, 1, &x).adjoint();
            assert!(lhs.approx_eq(&rhs, 1e-10));
        }
    }

    #[test]
    fn berezin_kills_high_grades() {
        let q = 0.65;
        for (n, m) in [(0usize, 0usize), (1, 1), (2, 1)] {
            for grade in [-(m as i64) - 1, m as i64 + 1, m as i64 + 2] {
                for mono in grade_slice_monomials(grade, 2 * (n + m + 2) as u32) {
                    let x = AlgebraElement::from_monomial(q, mono, c(1.0));
                    let img = berezin(n, m, &x);
                    assert!(img.is_zero(), "β_{n}^{m} on grade {grade}: {img:?}");
                }
            }
        }
    }

    #[test]
    fn berezin_scales_matrix_coefficients() {
        // β_N^M(u^{2j+m}_{ij}) = u^{2j+m}_{ij} · χ_N^M(u^{2j+m}_{jj}),
        // nonzero iff j ≤ N+M-m.
        let q = 0.6;
        let (n, m) = (1usize, 1usize);
        let chi = StateSpec::Chi { n, m };
        for mm in 0..=m as i64 {
            for j in 0..=(n + m + 1) {
                let lvl = 2 * j + mm as usize;
                let level = corep_level(lvl, q);
                for i in 0..=lvl {
                    let x = level.entry(i, j + mm as usize);
                    let img = berezin(n, m, x);
                    let weight =
                        evaluate_state(&chi, level.entry(j + mm as usize, j + mm as usize))
                            .unwrap();
                    let expect = x.scale(weight);
                    // the u^n coefficients grow like q^{-(i+j)}, so roundoff
                    // scales with the coefficient size
                    let tol = 1e-9 * x.linf_norm().max(1.0);
                    assert!(
                        img.approx_eq(&expect, tol),
                        "level {lvl} entry ({i},{})",
                        j + mm as usize
                    );
                    let nonzero = j <= n + m - mm as usize;
                    let effectively_zero = img.linf_norm() <= tol;
                    assert_eq!(!effectively_zero, nonzero, "level {lvl} j={j}");
                    if nonzero {
                        assert!(weight.re > 0.0, "positivity of χ(u_jj)");
                    }
                }
            }
        }
    }

    #[test]
    fn fuzzy_dimensions() {
        let q = 0.5;
        for n in 0..=3usize {
            for m in -3..=3i64 {
                let f = fuzzy_basis(n, m, q);
                let expect = (n + m.unsigned_abs() as usize + 1) * (n + 1);
                assert_eq!(f.dim(), expect, "N={n} m={m}");
                for mo in &f.monomials {
                    assert_eq!(mo.left_grade(), m);
                }
            }
        }
        // band dimension is the sum over |m| ≤ K
        for n in 0..=2usize {
            for k in 0..=2usize {
                let band = fuzzy_band(n, k, q);
                let expect: usize = (-(k as i64)..=k as i64)
                    .map(|m| (n + m.unsigned_abs() as usize + 1) * (n + 1))
                    .sum();
                assert_eq!(band.dim(), expect, "N={n} K={k}");
            }
        }
        // N = 0, m = 0: just the unit
        let f = fuzzy_basis(0, 0, q);
        assert_eq!(f.dim(), 1);
        assert_eq!(f.monomials[0], Monomial::ONE);
    }

    #[test]
    fn fuzzy_band_is_star_closed_and_positive_definite() {
        let q = 0.5;
        let band = fuzzy_band(1, 1, q);
        for mo in &band.monomials {
            assert!(band.monomials.contains(&mo.adjoint()), "missing adjoint of {mo:?}");
        }
        let evs = band.gram().eigenvalues();
        assert!(evs[0] > 0.0, "min Gram eigenvalue {}", evs[0]);
    }

    #[test]
    fn projection_properties() {
        let q = 0.6;
        let band = fuzzy_band(1, 1, q);
        let els = band.elements();
        // projection fixes the basis
        for f in &els {
            let p = project_onto(&band, f).unwrap();
            assert!((f - &p).haar_norm() < 1e-9);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(139);
        for _ in 0..50 {
            let x = random_element(q, 3, 3, &mut rng);
            let p = project_onto(&band, &x).unwrap();
            // idempotent
            let pp = project_onto(&band, &p).unwrap();
            assert!((&p - &pp).haar_norm() < 1e-9);
            // x - p ⟂ span
            let d = &x - &p;
            for f in &els {
                assert!(l2_inner(f, &d).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn image_check_small_cases() {
        let q = 0.5;
        // (N,M,m) = (1,1,0): rank 9
        let r = berezin_image_check(1, 1, 0, q);
        assert_eq!(r.rank, 9);
        assert_eq!(r.expected_rank, 9);
        assert!(r.containment_residual < 1e-8, "{}", r.containment_residual);
        // (N,M,m) = (0,1,1): rank 2
        let r = berezin_image_check(0, 1, 1, q);
        assert_eq!(r.rank, 2);
        assert_eq!(r.expected_rank, 2);
        assert!(r.containment_residual < 1e-8);
    }

    #[test]
    fn coinvariance_small_band() {
        let q = 0.5;
        let rep = coinvariance_check(1, 1, q);
        assert!(rep.max_residual < 1e-8, "{}", rep.max_residual);
        assert!(rep.elements_checked > 0);
        // classical point q = 1
        let rep = coinvariance_check(1, 1, 1.0);
        assert!(rep.max_residual < 1e-8, "{}", rep.max_residual);
    }

    #[test]
    fn eval_su2_state_requires_classical_q() {
        let x = AlgebraElement::generator(Gen::A, 0.9);
        let s = StateSpec::EvalSU2 { alpha: c(1.0), beta: c(0.0) };
        assert!(evaluate_state(&s, &x).is_err());
        let x1 = AlgebraElement::generator(Gen::A, 1.0);
        assert!((evaluate_state(&s, &x1).unwrap() - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn phi_rs_positivity_pattern() {
        // φ_{r,s}(u^n_{ij}) ≥ 0, nonzero iff (n-2j = r-s, i = j, j ≤ s).
        let q = 0.7;
        for n in 0..=4usize {
            let level = corep_level(n, q);
            for i in 0..=n {
                for j in 0..=n {
                    for r in 0..=3usize {
                        for s in 0..=3usize {
                            let ar = AlgebraElement::from_monomial(
                                q,
                                Monomial::new(r as i32, 0, 0),
                                c(1.0),
                            );
                            let as_ = AlgebraElement::from_monomial(
                                q,
                                Monomial::new(s as i32, 0, 0),
                                c(1.0),
                            );
                            let v = (&(&as_.adjoint() * level.entry(i, j)) * &ar).haar();
                            let nonzero = n as i64 - 2 * j as i64 == r as i64 - s as i64
                                && i == j
                                && j <= s;
                            assert!(v.im.abs() < 1e-12);
                            assert!(v.re > -1e-12, "negative φ value at ({n},{i},{j},{r},{s})");
                            assert_eq!(
                                v.norm() > 1e-12,
                                nonzero,
                                "pattern at ({n},{i},{j},{r},{s}): {v}"
                            );
                        }
                    }
                }
            }
        }
    }
}

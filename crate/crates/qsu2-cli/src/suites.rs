//! The identity suites behind `qsu2 check`.

use num_complex::Complex64;
use qsu2::algebra::{
    monomials_up_to, random_element, AlgebraElement, GenTag, GeneratorAction, Side,
};
use qsu2::berezin;
use qsu2::corep;
use qsu2::dirac;
use qsu2::qnum::{qint, QParams};
use qsu2::schur;
use rand::SeedableRng;
use rand_chacha::rand_core::RngCore;

use crate::config::RunConfig;

type Rng = rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn check(name: impl Into<String>, residual: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name: name.into(),
        residual,
        tolerance,
        passed: residual <= tolerance,
    }
}

/// Known suite names, in the order `--suite all` runs them.
pub const SUITE_NAMES: [&str; 8] = [
    "relations",
    "hopf",
    "haar",
    "pairing",
    "derV",
    "firstorder",
    "schur",
    "berezin",
];

/// Test instrumentation: deliberate table corruptions for mutation testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    DeltaSignFlip,
}

pub fn run_suite(
    name: &str,
    cfg: &RunConfig,
    mutation: Option<Mutation>,
) -> anyhow::Result<Vec<CheckResult>> {
    let p = QParams::new(cfg.q, cfg.t).map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(match name {
        "relations" => relations_suite(cfg, p),
        "hopf" => hopf_suite(cfg),
        "haar" => haar_suite(cfg),
        "pairing" => pairing_suite(cfg),
        "derV" => derv_suite(cfg, mutation),
        "firstorder" => firstorder_suite(cfg, p),
        "schur" => schur_suite(cfg, p),
        "berezin" => berezin_suite(cfg),
        other => anyhow::bail!("unknown suite {other:?} (expected one of {SUITE_NAMES:?})"),
    })
}

fn rng_for(cfg: &RunConfig, salt: u64) -> Rng {
    Rng::seed_from_u64(cfg.seed ^ salt)
}

fn relations_suite(cfg: &RunConfig, _p: QParams) -> Vec<CheckResult> {
    let q = cfg.q;
    let tol = cfg.tolerance;
    let mut out = Vec::new();
    let rel = qsu2::algebra::relation_residues(q);
    let names = ["ba=qab", "b*a=qab*", "bb*=b*b", "a*a+q²bb*=1", "aa*+bb*=1"];
    for (n, r) in names.iter().zip(rel.iter()) {
        out.push(check(format!("relation {n}"), *r, tol));
    }
    // action tables: star compatibility and twisted Leibniz on monomials
    let monos = monomials_up_to(cfg.max_degree);
    let mut worst_star = 0.0f64;
    for mono in &monos {
        let x = AlgebraElement::from_monomial(q, *mono, Complex64::new(1.0, 0.0));
        for side in [Side::Left, Side::Right] {
            let lhs = x.adjoint().act(GeneratorAction { side, tag: GenTag::E });
            let rhs = x
                .act(GeneratorAction { side, tag: GenTag::F })
                .adjoint()
                .scale_re(-1.0 / q);
            worst_star = worst_star.max((&lhs - &rhs).linf_norm());
        }
    }
    out.push(check("∂_e(x*) = -q⁻¹∂_f(x)* and δ-analogue", worst_star, tol));
    let mut worst_leib = 0.0f64;
    let small = monomials_up_to(cfg.max_degree.min(3));
    for mx in &small {
        for my in &small {
            let x = AlgebraElement::from_monomial(q, *mx, Complex64::new(1.0, 0.0));
            let y = AlgebraElement::from_monomial(q, *my, Complex64::new(1.0, 0.0));
            let de = GeneratorAction::left(GenTag::E);
            let lhs = (&x * &y).act(de);
            let rhs = &(&x.act(de) * &y.act(GeneratorAction::left(GenTag::K)))
                + &(&x.act(GeneratorAction::left(GenTag::KInv)) * &y.act(de));
            worst_leib = worst_leib.max((&lhs - &rhs).linf_norm());
        }
    }
    out.push(check("twisted Leibniz for ∂_e", worst_leib, tol));
    out
}

fn hopf_suite(cfg: &RunConfig) -> Vec<CheckResult> {
    let q = cfg.q;
    let tol = cfg.tolerance;
    let monos = monomials_up_to(cfg.max_degree.min(5));
    let mut counit_res = 0.0f64;
    let mut coassoc_res = 0.0f64;
    let mut antipode_res = 0.0f64;
    for mono in &monos {
        let x = AlgebraElement::from_monomial(q, *mono, Complex64::new(1.0, 0.0));
        let d = x.coproduct();
        counit_res = counit_res.max((&d.counit_left() - &x).linf_norm());
        counit_res = counit_res.max((&d.counit_right() - &x).linf_norm());
        coassoc_res = coassoc_res.max(d.coproduct_left().linf_distance(&d.coproduct_right()));
        let folded = d.mul_after_left(|f| f.antipode());
        let expect = AlgebraElement::unit(q).scale(x.counit());
        antipode_res = antipode_res.max((&folded - &expect).linf_norm());
    }
    vec![
        check("counit axiom (ε⊗id)Δ = id = (id⊗ε)Δ", counit_res, tol),
        check("coassociativity (Δ⊗id)Δ = (id⊗Δ)Δ", coassoc_res, tol),
        check("antipode axiom m(S⊗id)Δ = ε(·)1", antipode_res, tol),
    ]
}

fn haar_suite(cfg: &RunConfig) -> Vec<CheckResult> {
    let q = cfg.q;
    let tol = cfg.tolerance;
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for m in 0..=6u32 {
        let x = AlgebraElement::from_monomial(
            q,
            qsu2::algebra::Monomial::new(0, m, m),
            Complex64::new(1.0, 0.0),
        );
        worst = worst.max((x.haar() - Complex64::new(1.0 / qint(m as i64 + 1, q), 0.0)).norm());
    }
    out.push(check("h(b^m b*^m) = 1/⟨m+1⟩", worst, 1e-12));
    let mut rng = rng_for(cfg, 0x11);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let x = random_element(q, cfg.max_degree.min(3), 1, &mut rng);
        let y = random_element(q, cfg.max_degree.min(3), 1, &mut rng);
        let lhs = (&x * &y).haar();
        let rhs = (&y.modular_nu(1.0) * &x).haar();
        worst = worst.max((lhs - rhs).norm());
    }
    out.push(check("twisted trace h(xy) = h(ν(y)x)", worst, tol));
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut rng2 = rng_for(cfg, 0x12 ^ rng.next_u64());
        let x = random_element(q, cfg.max_degree.min(3), 2, &mut rng2);
        let d = x.coproduct();
        let expect = AlgebraElement::unit(q).scale(x.haar());
        worst = worst.max((&d.haar_left() - &expect).linf_norm());
        worst = worst.max((&d.haar_right() - &expect).linf_norm());
    }
    out.push(check("Haar bi-invariance", worst, 1e-10));
    out
}

fn pairing_suite(cfg: &RunConfig) -> Vec<CheckResult> {
    let q = cfg.q;
    let tol = cfg.tolerance;
    let mut out = Vec::new();
    let nmax = 4usize;
    let mut worst = 0.0f64;
    for n in 0..=nmax {
        worst = worst.max(corep::unitarity_residue(n, q));
    }
    out.push(check("u^n unitarity (n ≤ 4)", worst, tol));
    let mut worst = 0.0f64;
    for n in 0..=nmax {
        for i in 0..=n {
            for j in 0..=n {
                worst = worst.max(corep::adjoint_formula_residue(n, i, j, q));
            }
        }
    }
    out.push(check("(u^n_{ij})* = (-q)^{j-i} u^n_{n-i,n-j}", worst, tol));
    let mut worst = 0.0f64;
    for n in 0..=nmax {
        let level = corep::corep_level(n, q);
        for i in 0..=n {
            for j in 0..=n {
                let lhs = level.entry(i, j).act(GeneratorAction::left(GenTag::E));
                let mut rhs = AlgebraElement::zero(q);
                for k in 0..=n {
                    let w = corep::pairing(corep::PairingGen::E, n as i64, k as i64, j as i64, q);
                    rhs = &rhs + &level.entry(i, k).scale(w);
                }
                worst = worst.max((&lhs - &rhs).linf_norm());
            }
        }
    }
    out.push(check("∂_e = Σ u·⟨e,·⟩ pairing consistency", worst, tol));
    let mut worst = 0.0f64;
    for n in 0..=nmax {
        let level = corep::corep_level(n, q);
        for i in 0..=n {
            for j in 0..=n {
                let norm2 = corep::l2_inner(level.entry(i, j), level.entry(i, j));
                let expect = q.powi(2 * (n as i32 - i as i32)) / qint(n as i64 + 1, q);
                worst = worst.max((norm2 - Complex64::new(expect, 0.0)).norm());
            }
        }
    }
    out.push(check("‖u^n_{ij}‖₂² = q^{2(n-i)}/⟨n+1⟩", worst, tol));
    out
}

fn derv_suite(cfg: &RunConfig, mutation: Option<Mutation>) -> Vec<CheckResult> {
    let q = cfg.q;
    let tol = cfg.tolerance;
    let monos = monomials_up_to(cfg.max_degree.min(4));
    let p = QParams::diagonal(q).expect("q in (0,1]");
    let u = dirac::fundamental_unitary(q);
    let mut worst = 0.0f64;
    for mono in &monos {
        let x = AlgebraElement::from_monomial(q, *mono, Complex64::new(1.0, 0.0));
        let lhs = u.mul(&dirac::derivative(&x, p)).mul(&u.adjoint());
        let mut rhs = dirac::delta_derivative(&x);
        if mutation == Some(Mutation::DeltaSignFlip) {
            rhs.entries[1][0] = rhs.entries[1][0].scale_re(-1.0);
        }
        worst = worst.max(lhs.sub(&rhs).linf_norm());
    }
    vec![check("u ∂_{q,q}(x) u* = δ(x)", worst, tol)]
}

fn firstorder_suite(cfg: &RunConfig, p: QParams) -> Vec<CheckResult> {
    let q = cfg.q;
    let mut rng = rng_for(cfg, 0x31);
    let mut out = Vec::new();
    for trial in 0..2 {
        let x = random_element(q, cfg.max_degree.min(2), 1, &mut rng);
        let y = random_element(q, cfg.max_degree.min(2), 1, &mut rng);
        let rep = dirac::first_order_check(&x, &y, p, 5);
        out.push(check(
            format!("[IyI, ∂^H(x)] = 0 (trial {trial})"),
            rep.horizontal_residual,
            1e-8,
        ));
        out.push(check(
            format!("[IyI, ∂^V(x)] = 0 (trial {trial})"),
            rep.vertical_residual,
            1e-8,
        ));
    }
    out
}

fn schur_suite(cfg: &RunConfig, p: QParams) -> Vec<CheckResult> {
    let q = cfg.q;
    let mut out = Vec::new();
    let mut rng = rng_for(cfg, 0x41);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = random_element(q, cfg.max_degree.min(4), 3, &mut rng);
        let lhs = schur::antiderivative_v(&x, p);
        let rhs = &x - &x.grade_project(0);
        worst = worst.max((&lhs - &rhs).linf_norm());
    }
    out.push(check("∫_t^V ∂_t^V = 1 - Π₀", worst, 1e-10));
    let delta = 0.5f64;
    let expect = std::f64::consts::PI * (delta.sqrt() + 1.0 / delta.sqrt()) / 3f64.sqrt();
    out.push(check(
        "ε(δ,0) = π(δ^{1/2}+δ^{-1/2})/√3",
        (schur::epsilon_null(delta, 0) - expect).abs(),
        1e-12,
    ));
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = random_element(q, cfg.max_degree.min(3), 3, &mut rng);
        let pg = schur::MultiplierSpec::PhiT(p.t)
            .apply(&schur::MultiplierSpec::GammaM(2).apply(&x));
        let gp = schur::MultiplierSpec::GammaM(2)
            .apply(&schur::MultiplierSpec::PhiT(p.t).apply(&x));
        worst = worst.max((&pg - &gp).linf_norm());
    }
    out.push(check("M(φ_t)∘M(γ_M) = M(γ_M)∘M(φ_t)", worst, 1e-12));
    out
}

fn berezin_suite(cfg: &RunConfig) -> Vec<CheckResult> {
    let q = cfg.q;
    let mut out = Vec::new();
    let mut rng = rng_for(cfg, 0x51);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = random_element(q, cfg.max_degree.min(3), 3, &mut rng);
        let direct = berezin::evaluate_state(&berezin::StateSpec::Chi { n: 1, m: 1 }, &x)
            .expect("χ defined");
        let banded = berezin::chi_band_route(1, 1, &x);
        worst = worst.max((direct - banded).norm());
    }
    out.push(check("χ_N^M: direct = band decomposition", worst, 1e-9));
    let mut dim_defect = 0.0f64;
    for n in 0..=2usize {
        for m in -2..=2i64 {
            let f = berezin::fuzzy_basis(n, m, q);
            let expect = (n + m.unsigned_abs() as usize + 1) * (n + 1);
            dim_defect = dim_defect.max((f.dim() as f64 - expect as f64).abs());
        }
    }
    out.push(check("dim Fuzz_N(A^m) = (N+|m|+1)(N+1)", dim_defect, 0.0));
    let r = berezin::berezin_image_check(1, 1, 0, q);
    out.push(check(
        "rank β_1^1 on grade 0 = 9",
        (r.rank as f64 - r.expected_rank as f64).abs(),
        0.0,
    ));
    out.push(check("image ⊆ fuzzy subspace", r.containment_residual, 1e-8));
    out
}

//! Irreducible corepresentation matrix coefficients u^n_{ij}, their disk/memory
//! cache, the dual pairing with the quantum enveloping algebra, L² inner
//! products, and the spectral-subspace reconstruction identity.
//!
//! Levels are generated upward: u⁰ = 1, u¹ = the fundamental unitary, and
//! u^{n+1} is solved from the a*·u^n_{ij} product rule on the interior block.
//! The boundary entries (row i = n+1, column j = n+1) come from single-term
//! instances of the b*-, b- and a-rules, which are exact there because
//! ⟨0⟩_q = 0 kills the second summand.

use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use dashmap::DashMap;
use num_complex::Complex64;

use crate::algebra::{AlgebraElement, Gen};
use crate::qnum::qint;

/// One corepresentation level: the (n+1)×(n+1) matrix of coefficients.
#[derive(Debug, Clone)]
pub struct CorepLevel {
    pub n: usize,
    entries: Vec<AlgebraElement>,
}

impl CorepLevel {
    pub fn entry(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.entries[i * (self.n + 1) + j]
    }
}

/// A matrix coefficient with its cached expansion.
#[derive(Debug, Clone)]
pub struct MatrixCoeff {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    pub expansion: AlgebraElement,
}

type LevelStack = Arc<Mutex<Vec<Arc<CorepLevel>>>>;

static CACHE: OnceLock<DashMap<u64, LevelStack>> = OnceLock::new();

fn cache() -> &'static DashMap<u64, LevelStack> {
    CACHE.get_or_init(DashMap::new)
}

fn cache_dir() -> std::path::PathBuf {
    match std::env::var_os("QSU2_CACHE_DIR") {
        Some(dir) => std::path::PathBuf::from(dir),
        None => std::env::temp_dir().join("qsu2-corep-cache"),
    }
}

fn level_path(q: f64, n: usize) -> std::path::PathBuf {
    cache_dir().join(format!("q{q}_n{n}.json"))
}

fn level_to_json(level: &CorepLevel, q: f64) -> serde_json::Value {
    serde_json::json!({
        "schema": 1,
        "q": q,
        "n": level.n,
        "entries": level.entries.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
    })
}

fn level_from_json(v: &serde_json::Value, q: f64, n: usize) -> Option<CorepLevel> {
    if v.get("q")?.as_f64()? != q || v.get("n")?.as_u64()? != n as u64 {
        return None;
    }
    let arr = v.get("entries")?.as_array()?;
    if arr.len() != (n + 1) * (n + 1) {
        return None;
    }
    let mut entries = Vec::with_capacity(arr.len());
    for e in arr {
        entries.push(AlgebraElement::from_json(e).ok()?);
    }
    Some(CorepLevel { n, entries })
}

fn load_level_from_disk(q: f64, n: usize) -> Option<CorepLevel> {
    let text = std::fs::read_to_string(level_path(q, n)).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    level_from_json(&v, q, n)
}

fn store_level_to_disk(level: &CorepLevel, q: f64) {
    let dir = cache_dir();
    if std::fs::create_dir_all(&dir).is_err() {
        return;
    }
    let path = level_path(q, level.n);
    let tmp = dir.join(format!(
        ".tmp-{}-{}-{}",
        std::process::id(),
        level.n,
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.subsec_nanos())
            .unwrap_or(0)
    ));
    let payload = level_to_json(level, q).to_string();
    let ok = std::fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(payload.as_bytes()))
        .is_ok();
    if ok {
        let _ = std::fs::rename(&tmp, &path);
    } else {
        let _ = std::fs::remove_file(&tmp);
    }
}

/// Build level n+1 from levels n and n-1.
fn next_level(q: f64, cur: &CorepLevel, prev: Option<&CorepLevel>) -> CorepLevel {
    let n = cur.n;
    let np = n + 1;
    let astar = AlgebraElement::generator(Gen::AStar, q);
    let a = AlgebraElement::generator(Gen::A, q);
    let b = AlgebraElement::generator(Gen::B, q);
    let bstar = AlgebraElement::generator(Gen::BStar, q);
    let qn1 = qint(n as i64 + 1, q);
    let mut entries = vec![AlgebraElement::zero(q); (np + 1) * (np + 1)];
    // interior: solve the a*-rule for u^{n+1}_{ij}
    for i in 0..=n {
        for j in 0..=n {
            let mut rhs = &astar * cur.entry(i, j);
            if i >= 1 && j >= 1 {
                let low = prev.expect("level n-1 present for n >= 1").entry(i - 1, j - 1);
                let coeff = (qint(i as i64, q) * qint(j as i64, q)).sqrt() / qn1;
                rhs = &rhs - &low.scale_re(coeff);
            }
            let denom = q.powi((i + j) as i32)
                * (qint(n as i64 - i as i64 + 1, q) * qint(n as i64 - j as i64 + 1, q)).sqrt()
                / qn1;
            entries[i * (np + 1) + j] = rhs.scale_re(1.0 / denom);
        }
    }
    // bottom row from the b*-rule (single term at i = n)
    for j in 0..=n {
        let rhs = &bstar * cur.entry(n, j);
        let denom =
            q.powi(j as i32) * (qn1 * qint(n as i64 - j as i64 + 1, q)).sqrt() / qn1;
        entries[np * (np + 1) + j] = rhs.scale_re(1.0 / denom);
    }
    // right column from the b-rule (single term at j = n)
    for i in 0..=n {
        let rhs = &b * cur.entry(i, n);
        let denom =
            -q.powi(i as i32 - 1) * (qn1 * qint(n as i64 - i as i64 + 1, q)).sqrt() / qn1;
        entries[i * (np + 1) + np] = rhs.scale_re(1.0 / denom);
    }
    // corner from the a-rule: a·u^n_{nn} = u^{n+1}_{n+1,n+1} exactly
    entries[np * (np + 1) + np] = &a * cur.entry(n, n);
    CorepLevel { n: np, entries }
}

fn seed_levels(q: f64) -> Vec<Arc<CorepLevel>> {
    let one = AlgebraElement::unit(q);
    let level0 = CorepLevel { n: 0, entries: vec![one] };
    let a = AlgebraElement::generator(Gen::A, q);
    let b = AlgebraElement::generator(Gen::B, q);
    let level1 = CorepLevel {
        n: 1,
        entries: vec![a.adjoint(), b.scale_re(-q), b.adjoint(), a],
    };
    vec![Arc::new(level0), Arc::new(level1)]
}

/// The full corepresentation level n (generated and cached as needed).
pub fn corep_level(n: usize, q: f64) -> Arc<CorepLevel> {
    let stack = cache()
        .entry(q.to_bits())
        .or_insert_with(|| Arc::new(Mutex::new(Vec::new())))
        .clone();
    let mut levels = stack.lock().expect("corep cache lock");
    if levels.is_empty() {
        *levels = seed_levels(q);
    }
    while levels.len() <= n {
        let cur_n = levels.len() - 1;
        if let Some(from_disk) = load_level_from_disk(q, cur_n + 1) {
            levels.push(Arc::new(from_disk));
            continue;
        }
        let prev = if cur_n >= 1 { Some(levels[cur_n - 1].as_ref()) } else { None };
        let next = next_level(q, levels[cur_n].as_ref(), prev);
        store_level_to_disk(&next, q);
        levels.push(Arc::new(next));
    }
    levels[n].clone()
}

/// Matrix coefficient u^n_{ij}; out-of-range indices give the zero element.
pub fn matrix_coeff(n: i64, i: i64, j: i64, q: f64) -> MatrixCoeff {
    if n < 0 || i < 0 || j < 0 || i > n || j > n {
        return MatrixCoeff {
            n: n.max(0) as usize,
            i: i.max(0) as usize,
            j: j.max(0) as usize,
            expansion: AlgebraElement::zero(q),
        };
    }
    let level = corep_level(n as usize, q);
    MatrixCoeff {
        n: n as usize,
        i: i as usize,
        j: j as usize,
        expansion: level.entry(i as usize, j as usize).clone(),
    }
}

/// Dual-pairing tag for the closed-form pairing values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingGen {
    E,
    F,
    K,
}

/// Closed-form pairing ⟨η, u^n_{ij}⟩.
pub fn pairing(gen: PairingGen, n: i64, i: i64, j: i64, q: f64) -> Complex64 {
    if n < 0 || i < 0 || j < 0 || i > n || j > n {
        return Complex64::default();
    }
    let value = match gen {
        PairingGen::K => {
            if i == j {
                q.powf(j as f64 - n as f64 / 2.0)
            } else {
                0.0
            }
        }
        PairingGen::E => {
            if i == j - 1 {
                q.powf((1.0 - n as f64) / 2.0)
                    * (qint(n - j + 1, q) * qint(j, q)).sqrt()
            } else {
                0.0
            }
        }
        PairingGen::F => {
            if i == j + 1 {
                q.powf((1.0 - n as f64) / 2.0)
                    * (qint(n - j, q) * qint(j + 1, q)).sqrt()
            } else {
                0.0
            }
        }
    };
    Complex64::new(value, 0.0)
}

/// GNS inner product ⟨x, y⟩ = h(x* y).
pub fn l2_inner(x: &AlgebraElement, y: &AlgebraElement) -> Complex64 {
    (&x.adjoint() * y).haar()
}

/// Verifies (u^n_{ij})* = (-q)^{j-i} u^n_{n-i,n-j} through the algebra engine.
pub fn adjoint_formula_check(n: usize, i: usize, j: usize, q: f64) -> bool {
    adjoint_formula_residue(n, i, j, q) < 1e-9
}

pub fn adjoint_formula_residue(n: usize, i: usize, j: usize, q: f64) -> f64 {
    let level = corep_level(n, q);
    let lhs = level.entry(i, j).adjoint();
    let sign = (-q).powi(j as i32 - i as i32);
    let rhs = level.entry(n - i, n - j).scale_re(sign);
    (&lhs - &rhs).linf_norm()
}

/// Largest residue of the two unitarity identities at level n.
pub fn unitarity_residue(n: usize, q: f64) -> f64 {
    let level = corep_level(n, q);
    let unit = AlgebraElement::unit(q);
    let mut worst = 0.0f64;
    for i in 0..=n {
        for j in 0..=n {
            let mut row = AlgebraElement::zero(q);
            let mut col = AlgebraElement::zero(q);
            for k in 0..=n {
                row = &row + &(level.entry(i, k) * &level.entry(j, k).adjoint());
                col = &col + &(&level.entry(k, i).adjoint() * level.entry(k, j));
            }
            let expect = if i == j { unit.clone() } else { AlgebraElement::zero(q) };
            worst = worst.max((&row - &expect).linf_norm());
            worst = worst.max((&col - &expect).linf_norm());
        }
    }
    worst
}

/// Spectral-subspace reconstruction: for m ≥ 0 returns
/// Σ_i (u^m_{i0})* Π^L_0(u^m_{i0} · x), and the mirror formula for m < 0;
/// the result equals Π^L_m(x) (asserted).
pub fn reconstruct_spectral(x: &AlgebraElement, m: i64) -> AlgebraElement {
    let q = x.q();
    let am = m.unsigned_abs() as usize;
    let level = corep_level(am, q);
    let mut acc = AlgebraElement::zero(q);
    for i in 0..=am {
        let v = if m >= 0 { level.entry(i, 0) } else { level.entry(i, am) };
        let inner = (v * x).grade_project(0);
        acc = &acc + &(&v.adjoint() * &inner);
    }
    let expect = x.grade_project(m);
    let scale = x.linf_norm().max(1.0);
    assert!(
        (&acc - &expect).linf_norm() <= 1e-9 * scale,
        "reconstruction identity failed at grade {m}"
    );
    acc
}

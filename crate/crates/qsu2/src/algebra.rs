//! Exact normal-ordered arithmetic in the coordinate algebra of quantum SU(2),
//! together with its Hopf *-structure, the enveloping-algebra actions, the Haar
//! state, the modular automorphisms and the left-circle grading.
//!
//! Elements are finite complex combinations of the basis monomials
//! ξ^{klm} = a^k b^l (b*)^m (k ≥ 0) and b^l (b*)^m (a*)^{-k} (k < 0).

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use dashmap::DashMap;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qnum::{qint, ParamError, QParams, PRUNE_TOL, Q_ONE_EPS};

/// Basis monomial ξ^{klm}: a^k b^l (b*)^m for k ≥ 0, b^l (b*)^m (a*)^{-k} for k < 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub k: i32,
    pub l: u32,
    pub m: u32,
}

impl Monomial {
    pub fn new(k: i32, l: u32, m: u32) -> Self {
        Monomial { k, l, m }
    }

    pub const ONE: Monomial = Monomial { k: 0, l: 0, m: 0 };

    /// σ_L-grade k + l − m.
    pub fn left_grade(&self) -> i64 {
        self.k as i64 + self.l as i64 - self.m as i64
    }

    /// σ_R-grade k − l + m.
    pub fn right_grade(&self) -> i64 {
        self.k as i64 - self.l as i64 + self.m as i64
    }

    /// Total word length |k| + l + m.
    pub fn degree(&self) -> u32 {
        self.k.unsigned_abs() + self.l + self.m
    }

    /// Adjoint monomial: (ξ^{klm})* = ξ^{-k,m,l}, exactly.
    pub fn adjoint(&self) -> Monomial {
        Monomial { k: -self.k, l: self.m, m: self.l }
    }

    /// The generator word in canonical order.
    fn word(&self) -> Vec<Gen> {
        let mut w = Vec::with_capacity(self.degree() as usize);
        if self.k >= 0 {
            w.extend(std::iter::repeat(Gen::A).take(self.k as usize));
            w.extend(std::iter::repeat(Gen::B).take(self.l as usize));
            w.extend(std::iter::repeat(Gen::BStar).take(self.m as usize));
        } else {
            w.extend(std::iter::repeat(Gen::B).take(self.l as usize));
            w.extend(std::iter::repeat(Gen::BStar).take(self.m as usize));
            w.extend(std::iter::repeat(Gen::AStar).take((-self.k) as usize));
        }
        w
    }
}

/// The four algebra generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gen {
    A,
    B,
    AStar,
    BStar,
}

impl Gen {
    fn monomial(self) -> Monomial {
        match self {
            Gen::A => Monomial::new(1, 0, 0),
            Gen::B => Monomial::new(0, 1, 0),
            Gen::AStar => Monomial::new(-1, 0, 0),
            Gen::BStar => Monomial::new(0, 0, 1),
        }
    }

    fn left_grade(self) -> i64 {
        self.monomial().left_grade()
    }

    fn right_grade(self) -> i64 {
        self.monomial().right_grade()
    }
}

/// Finite complex combination of basis monomials over a fixed q.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    q: f64,
    terms: BTreeMap<Monomial, Complex64>,
}

type ContractionKey = (u64, bool, u32, u32);

// a^p (a*)^s and (a*)^s a^p expansions, memoised per (q, p, s). These dominate
// the cost of Berezin-state evaluations.
static CONTRACTION_MEMO: std::sync::OnceLock<DashMap<ContractionKey, Arc<AlgebraElement>>> =
    std::sync::OnceLock::new();

fn contraction_memo() -> &'static DashMap<ContractionKey, Arc<AlgebraElement>> {
    CONTRACTION_MEMO.get_or_init(DashMap::new)
}

// Monomial coproducts, memoised per (q, monomial); Berezin transforms revisit
// the same monomials across image and coinvariance checks.
static COPRODUCT_MEMO: std::sync::OnceLock<DashMap<(u64, Monomial), Arc<TensorElement>>> =
    std::sync::OnceLock::new();

fn coproduct_memo() -> &'static DashMap<(u64, Monomial), Arc<TensorElement>> {
    COPRODUCT_MEMO.get_or_init(DashMap::new)
}

fn coproduct_monomial(q: f64, mono: Monomial) -> Arc<TensorElement> {
    let key = (q.to_bits(), mono);
    if let Some(hit) = coproduct_memo().get(&key) {
        return hit.clone();
    }
    let mut acc = TensorElement::one(q);
    for g in mono.word() {
        acc = acc.mul_tensor(&coproduct_generator(g, q));
    }
    let arc = Arc::new(acc);
    coproduct_memo().insert(key, arc.clone());
    arc
}

impl AlgebraElement {
    pub fn zero(q: f64) -> Self {
        AlgebraElement { q, terms: BTreeMap::new() }
    }

    pub fn unit(q: f64) -> Self {
        Self::from_monomial(q, Monomial::ONE, Complex64::new(1.0, 0.0))
    }

    pub fn generator(g: Gen, q: f64) -> Self {
        Self::from_monomial(q, g.monomial(), Complex64::new(1.0, 0.0))
    }

    pub fn from_monomial(q: f64, mono: Monomial, coeff: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff.norm() >= PRUNE_TOL {
            terms.insert(mono, coeff);
        }
        AlgebraElement { q, terms }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Monomial) -> Complex64 {
        self.terms.get(mono).copied().unwrap_or_default()
    }

    /// Largest coefficient modulus; the residue measure for exact identities.
    pub fn linf_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient moduli.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    fn insert(&mut self, mono: Monomial, coeff: Complex64) {
        let entry = self.terms.entry(mono).or_insert_with(Complex64::default);
        *entry += coeff;
        if entry.norm() < PRUNE_TOL {
            self.terms.remove(&mono);
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.q);
        for (mono, c) in &self.terms {
            out.insert(*mono, c * s);
        }
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).linf_norm() <= tol
    }

    /// Product with q-mismatch reported as an error.
    pub fn try_mul(&self, other: &Self) -> Result<Self, ParamError> {
        if self.q != other.q {
            return Err(ParamError::MismatchedQ(self.q, other.q));
        }
        let mut out = Self::zero(self.q);
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                mono_mul_into(&mut out, self.q, *x, *y, cx * cy);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Adjoint: antilinear, antimultiplicative, involutive. Exact on monomials.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.q);
        for (mono, c) in &self.terms {
            out.insert(mono.adjoint(), c.conj());
        }
        out
    }

    /// Counit ε: *-character with ε(a) = 1, ε(b) = 0.
    pub fn counit(&self) -> Complex64 {
        self.terms
            .iter()
            .filter(|(m, _)| m.l == 0 && m.m == 0)
            .map(|(_, c)| *c)
            .sum()
    }

    /// Antipode S: antihomomorphism with S(a) = a*, S(b) = -q^{-1} b.
    /// On monomials: S(ξ^{klm}) = (-1)^{l+m} q^{m-l} ξ^{-k,l,m}.
    pub fn antipode(&self) -> Self {
        let mut out = Self::zero(self.q);
        for (mono, c) in &self.terms {
            let sign = if (mono.l + mono.m) % 2 == 0 { 1.0 } else { -1.0 };
            let factor = sign * self.q.powi(mono.m as i32 - mono.l as i32);
            out.insert(Monomial::new(-mono.k, mono.l, mono.m), c * factor);
        }
        out
    }

    /// Coproduct Δ, extended multiplicatively from the fundamental unitary.
    pub fn coproduct(&self) -> TensorElement {
        let mut out = TensorElement::zero(self.q);
        for (mono, c) in &self.terms {
            out.add_scaled(coproduct_monomial(self.q, *mono).as_ref(), *c);
        }
        out.prune();
        out
    }

    /// Haar state: h(ξ^{0mm}) = 1/⟨m+1⟩_q, zero elsewhere.
    pub fn haar(&self) -> Complex64 {
        let mut acc = Complex64::default();
        for (mono, c) in &self.terms {
            if mono.k == 0 && mono.l == mono.m {
                acc += c / qint(mono.l as i64 + 1, self.q);
            }
        }
        acc
    }

    /// L²(h)-norm √h(x*x).
    pub fn haar_norm(&self) -> f64 {
        let xx = self.adjoint().try_mul(self).expect("same q");
        xx.haar().re.max(0.0).sqrt()
    }

    /// Modular automorphism family ν^e with ν = δ_{k^{-2}}∘∂_{k^{-2}};
    /// scales ξ^{klm} by q^{-2ke}. e = 1 is ν itself, e = ±1/2 the square roots.
    pub fn modular_nu(&self, e: f64) -> Self {
        let mut out = Self::zero(self.q);
        for (mono, c) in &self.terms {
            let factor = self.q.powf(-2.0 * mono.k as f64 * e);
            out.insert(*mono, c * factor);
        }
        out
    }

    /// Decomposition into σ_L-homogeneous components, keyed by grade k + l − m.
    /// This is Π^L_n on polynomials.
    pub fn grade(&self) -> BTreeMap<i64, AlgebraElement> {
        let mut out: BTreeMap<i64, AlgebraElement> = BTreeMap::new();
        for (mono, c) in &self.terms {
            out.entry(mono.left_grade())
                .or_insert_with(|| AlgebraElement::zero(self.q))
                .insert(*mono, *c);
        }
        out
    }

    /// Decomposition into σ_R-homogeneous components, keyed by grade k − l + m.
    pub fn right_grade(&self) -> BTreeMap<i64, AlgebraElement> {
        let mut out: BTreeMap<i64, AlgebraElement> = BTreeMap::new();
        for (mono, c) in &self.terms {
            out.entry(mono.right_grade())
                .or_insert_with(|| AlgebraElement::zero(self.q))
                .insert(*mono, *c);
        }
        out
    }

    /// Spectral projection Π^L_n onto the grade-n component.
    pub fn grade_project(&self, n: i64) -> Self {
        let mut out = Self::zero(self.q);
        for (mono, c) in &self.terms {
            if mono.left_grade() == n {
                out.insert(*mono, *c);
            }
        }
        out
    }

    /// σ_L(s^{1/2}, ·) on polynomials: scales the grade-n component by s^{n/2}.
    pub fn grade_scale(&self, s: f64) -> Self {
        assert!(s > 0.0, "grade_scale needs a positive scaling parameter");
        let mut out = Self::zero(self.q);
        for (mono, c) in &self.terms {
            out.insert(*mono, c * s.powf(mono.left_grade() as f64 / 2.0));
        }
        out
    }

    /// Banach-*-norm ‖x‖_{t,q} of the analytic subalgebra, restricted to
    /// polynomials; `oracle` supplies the C*-norm.
    pub fn analytic_norm_tq(&self, p: QParams, oracle: impl Fn(&AlgebraElement) -> f64) -> f64 {
        let up = oracle(&self.grade_scale(p.t)) + oracle(&self.grade_scale(p.q));
        let down = oracle(&self.grade_scale(1.0 / p.t)) + oracle(&self.grade_scale(1.0 / p.q));
        up.max(down)
    }

    /// Left or right action of an enveloping-algebra generator.
    pub fn act(&self, action: GeneratorAction) -> Self {
        let mut out = Self::zero(self.q);
        match action.tag {
            GenTag::K | GenTag::KInv => {
                let sign = if action.tag == GenTag::K { 1.0 } else { -1.0 };
                for (mono, c) in &self.terms {
                    let g = match action.side {
                        Side::Left => mono.left_grade(),
                        Side::Right => mono.right_grade(),
                    };
                    out.insert(*mono, c * self.q.powf(sign * g as f64 / 2.0));
                }
            }
            GenTag::E | GenTag::F => {
                for (mono, c) in &self.terms {
                    let contrib = act_ef_monomial(self.q, action, *mono);
                    out = &out + &contrib.scale(*c);
                }
            }
        }
        out.prune();
        out
    }

    /// Composite action ∂_{ηk^{-1}} resp. δ_{ηk^{-1}}: act(k_inv) then act(η).
    pub fn act_seq(&self, actions: &[GeneratorAction]) -> Self {
        let mut x = self.clone();
        for a in actions.iter().rev() {
            x = x.act(*a);
        }
        x
    }

    /// Canonical JSON: {"q": .., "terms": [{"k","l","m","re","im"}, ..]} with
    /// terms sorted lexicographically by (k, l, m).
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(mono, c)| {
                serde_json::json!({
                    "k": mono.k, "l": mono.l, "m": mono.m, "re": c.re, "im": c.im,
                })
            })
            .collect();
        serde_json::json!({ "q": self.q, "terms": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let q = v
            .get("q")
            .and_then(|x| x.as_f64())
            .ok_or_else(|| "missing field q".to_string())?;
        let mut out = Self::zero(q);
        let terms = v
            .get("terms")
            .and_then(|x| x.as_array())
            .ok_or_else(|| "missing field terms".to_string())?;
        for t in terms {
            let get = |name: &str| {
                t.get(name)
                    .and_then(|x| x.as_f64())
                    .ok_or_else(|| format!("missing term field {name}"))
            };
            let k = get("k")? as i32;
            let l = get("l")? as u32;
            let m = get("m")? as u32;
            out.insert(Monomial::new(k, l, m), Complex64::new(get("re")?, get("im")?));
        }
        Ok(out)
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.terms == other.terms
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.q, rhs.q, "mismatched q between operands");
        let mut out = self.clone();
        for (mono, c) in &rhs.terms {
            out.insert(*mono, *c);
        }
        out
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.q, rhs.q, "mismatched q between operands");
        let mut out = self.clone();
        for (mono, c) in &rhs.terms {
            out.insert(*mono, -*c);
        }
        out
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_mul(rhs).expect("mismatched q between operands")
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale_re(-1.0)
    }
}

/// Which dual-pairing action: left ∂_η or right δ_η.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Enveloping-algebra generator tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenTag {
    E,
    F,
    K,
    KInv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorAction {
    pub side: Side,
    pub tag: GenTag,
}

impl GeneratorAction {
    pub const fn left(tag: GenTag) -> Self {
        GeneratorAction { side: Side::Left, tag }
    }
    pub const fn right(tag: GenTag) -> Self {
        GeneratorAction { side: Side::Right, tag }
    }
}

/// Table values of ∂_e, ∂_f, δ_e, δ_f on the generators; zero unless listed.
fn ef_table(q: f64, action: GeneratorAction, g: Gen) -> AlgebraElement {
    let one = Complex64::new(1.0, 0.0);
    match (action.side, action.tag, g) {
        (Side::Left, GenTag::E, Gen::A) => {
            AlgebraElement::from_monomial(q, Gen::BStar.monomial(), one)
        }
        (Side::Left, GenTag::E, Gen::B) => {
            AlgebraElement::from_monomial(q, Gen::AStar.monomial(), one * (-1.0 / q))
        }
        (Side::Left, GenTag::F, Gen::AStar) => {
            AlgebraElement::from_monomial(q, Gen::B.monomial(), one * (-q))
        }
        (Side::Left, GenTag::F, Gen::BStar) => {
            AlgebraElement::from_monomial(q, Gen::A.monomial(), one)
        }
        (Side::Right, GenTag::E, Gen::AStar) => {
            AlgebraElement::from_monomial(q, Gen::BStar.monomial(), one)
        }
        (Side::Right, GenTag::E, Gen::B) => {
            AlgebraElement::from_monomial(q, Gen::A.monomial(), one * (-1.0 / q))
        }
        (Side::Right, GenTag::F, Gen::A) => {
            AlgebraElement::from_monomial(q, Gen::B.monomial(), one * (-q))
        }
        (Side::Right, GenTag::F, Gen::BStar) => {
            AlgebraElement::from_monomial(q, Gen::AStar.monomial(), one)
        }
        _ => AlgebraElement::zero(q),
    }
}

/// Twisted-Leibniz extension of ∂_e/∂_f (resp. δ_e/δ_f) to a monomial:
/// d(g_1…g_d) = Σ_i k^{-1}(g_1…g_{i-1}) · d(g_i) · k(g_{i+1}…g_d),
/// with k the grading automorphism of the matching side.
fn act_ef_monomial(q: f64, action: GeneratorAction, mono: Monomial) -> AlgebraElement {
    let word = mono.word();
    let grade_of = |g: Gen| match action.side {
        Side::Left => g.left_grade(),
        Side::Right => g.right_grade(),
    };
    let mut out = AlgebraElement::zero(q);
    let total_grade: i64 = word.iter().map(|&g| grade_of(g)).sum();
    let mut prefix_grade: i64 = 0;
    let mut prefix = AlgebraElement::unit(q);
    for (i, &g) in word.iter().enumerate() {
        let hit = ef_table(q, action, g);
        if !hit.is_zero() {
            let suffix_grade = total_grade - prefix_grade - grade_of(g);
            let mut suffix = AlgebraElement::unit(q);
            for &h in &word[i + 1..] {
                suffix = &suffix * &AlgebraElement::generator(h, q);
            }
            let twist = q.powf((suffix_grade - prefix_grade) as f64 / 2.0);
            out = &out + &(&(&prefix * &hit) * &suffix).scale_re(twist);
        }
        prefix_grade += grade_of(g);
        prefix = &prefix * &AlgebraElement::generator(g, q);
    }
    out
}

/// a^p (a*)^s in normal form (outer = false) or (a*)^s a^p (outer = true).
fn contraction(q: f64, outer_star: bool, p: u32, s: u32) -> Arc<AlgebraElement> {
    let key = (q.to_bits(), outer_star, p, s);
    if let Some(hit) = contraction_memo().get(&key) {
        return hit.clone();
    }
    let result = if p == 0 || s == 0 {
        let k = if outer_star { p as i32 - s as i32 } else { p as i32 - s as i32 };
        AlgebraElement::from_monomial(q, Monomial::new(k, 0, 0), Complex64::new(1.0, 0.0))
    } else if outer_star {
        // (a*)^s a^p = (a*)^{s-1} a^{p-1} · (1 - q^{2p} bb*)
        let prev = contraction(q, true, p - 1, s - 1);
        let mut factor = AlgebraElement::unit(q);
        factor.insert(Monomial::new(0, 1, 1), Complex64::new(-q.powi(2 * p as i32), 0.0));
        prev.as_ref() * &factor
    } else {
        // a^p (a*)^s = a^{p-1} (a*)^{s-1} · (1 - q^{-2(s-1)} bb*)
        let prev = contraction(q, false, p - 1, s - 1);
        let mut factor = AlgebraElement::unit(q);
        factor.insert(
            Monomial::new(0, 1, 1),
            Complex64::new(-q.powi(-2 * (s as i32 - 1)), 0.0),
        );
        prev.as_ref() * &factor
    };
    let arc = Arc::new(result);
    contraction_memo().insert(key, arc.clone());
    arc
}

/// Accumulate coeff · ξ^{x} · ξ^{y} into `out` in normal form.
fn mono_mul_into(out: &mut AlgebraElement, q: f64, x: Monomial, y: Monomial, coeff: Complex64) {
    if coeff.norm() == 0.0 {
        return;
    }
    match (x.k >= 0, y.k >= 0) {
        (true, true) => {
            // b-letters of x hop over a^{y.k}: q per crossing.
            let factor = q.powi((x.l + x.m) as i32 * y.k);
            out.insert(
                Monomial::new(x.k + y.k, x.l + y.l, x.m + y.m),
                coeff * factor,
            );
        }
        (false, false) => {
            // (a*)^{s1} hops over the b-letters of y.
            let s1 = -x.k;
            let factor = q.powi(s1 * (y.l + y.m) as i32);
            out.insert(
                Monomial::new(x.k + y.k, x.l + y.l, x.m + y.m),
                coeff * factor,
            );
        }
        (true, false) => {
            // a^{k1} B1 · B2 (a*)^s = q^{-s(L+M)} a^{k1}(a*)^s b^L (b*)^M.
            let s = (-y.k) as u32;
            let big_l = x.l + y.l;
            let big_m = x.m + y.m;
            let pre = q.powi(-(s as i32) * (big_l + big_m) as i32);
            let core = contraction(q, false, x.k as u32, s);
            for (mono, c) in core.terms() {
                // mono = ξ^{κ,j,j}; attach b^L (b*)^M on the right.
                let kappa = mono.k;
                let attach = if kappa >= 0 {
                    1.0
                } else {
                    q.powi(-kappa * (big_l + big_m) as i32)
                };
                out.insert(
                    Monomial::new(kappa, mono.l + big_l, mono.m + big_m),
                    coeff * c * pre * attach,
                );
            }
        }
        (false, true) => {
            // B1 (a*)^{s1} · a^{k2} B2 = B1 · ((a*)^{s1} a^{k2}) · B2.
            let s1 = (-x.k) as u32;
            let core = contraction(q, true, y.k as u32, s1);
            for (mono, c) in core.terms() {
                let kappa = mono.k;
                let (left_factor, right_factor) = if kappa >= 0 {
                    (q.powi(kappa * (x.l + x.m) as i32), 1.0)
                } else {
                    (1.0, q.powi(-kappa * (y.l + y.m) as i32))
                };
                out.insert(
                    Monomial::new(kappa, mono.l + x.l + y.l, mono.m + x.m + y.m),
                    coeff * c * left_factor * right_factor,
                );
            }
        }
    }
}

/// Δ on a single generator, from Δ(u) = u ⊗ u.
fn coproduct_generator(g: Gen, q: f64) -> TensorElement {
    let el = |gg: Gen| AlgebraElement::generator(gg, q);
    let mut t = TensorElement::zero(q);
    match g {
        Gen::A => {
            t.add_product(&el(Gen::A), &el(Gen::A), Complex64::new(1.0, 0.0));
            t.add_product(&el(Gen::BStar), &el(Gen::B), Complex64::new(-q, 0.0));
        }
        Gen::B => {
            t.add_product(&el(Gen::AStar), &el(Gen::B), Complex64::new(1.0, 0.0));
            t.add_product(&el(Gen::B), &el(Gen::A), Complex64::new(1.0, 0.0));
        }
        Gen::AStar => {
            t.add_product(&el(Gen::AStar), &el(Gen::AStar), Complex64::new(1.0, 0.0));
            t.add_product(&el(Gen::B), &el(Gen::BStar), Complex64::new(-q, 0.0));
        }
        Gen::BStar => {
            t.add_product(&el(Gen::BStar), &el(Gen::AStar), Complex64::new(1.0, 0.0));
            t.add_product(&el(Gen::A), &el(Gen::BStar), Complex64::new(1.0, 0.0));
        }
    }
    t
}

/// Finite combination of pure tensors of basis monomials.
#[derive(Debug, Clone)]
pub struct TensorElement {
    q: f64,
    terms: BTreeMap<(Monomial, Monomial), Complex64>,
}

impl TensorElement {
    pub fn zero(q: f64) -> Self {
        TensorElement { q, terms: BTreeMap::new() }
    }

    pub fn one(q: f64) -> Self {
        let mut t = Self::zero(q);
        t.terms
            .insert((Monomial::ONE, Monomial::ONE), Complex64::new(1.0, 0.0));
        t
    }

    /// The pure tensor x ⊗ y.
    pub fn pure(x: &AlgebraElement, y: &AlgebraElement) -> Self {
        assert_eq!(x.q(), y.q(), "mismatched q between operands");
        let mut t = Self::zero(x.q());
        t.add_product(x, y, Complex64::new(1.0, 0.0));
        t
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, key: (Monomial, Monomial), coeff: Complex64) {
        let entry = self.terms.entry(key).or_insert_with(Complex64::default);
        *entry += coeff;
        if entry.norm() < PRUNE_TOL {
            self.terms.remove(&key);
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    fn add_scaled(&mut self, other: &TensorElement, s: Complex64) {
        for (key, c) in &other.terms {
            self.insert(*key, c * s);
        }
    }

    /// Insert x ⊗ y expanded over monomial pairs.
    fn add_product(&mut self, x: &AlgebraElement, y: &AlgebraElement, s: Complex64) {
        for (mx, cx) in x.terms() {
            for (my, cy) in y.terms() {
                self.insert((*mx, *my), cx * cy * s);
            }
        }
    }

    /// Legwise product (x₁⊗y₁)(x₂⊗y₂) = x₁x₂ ⊗ y₁y₂.
    pub fn mul_tensor(&self, rhs: &TensorElement) -> TensorElement {
        assert_eq!(self.q, rhs.q, "mismatched q between operands");
        let mut out = TensorElement::zero(self.q);
        for ((xl, xr), cx) in &self.terms {
            for ((yl, yr), cy) in &rhs.terms {
                let mut left = AlgebraElement::zero(self.q);
                mono_mul_into(&mut left, self.q, *xl, *yl, Complex64::new(1.0, 0.0));
                let mut right = AlgebraElement::zero(self.q);
                mono_mul_into(&mut right, self.q, *xr, *yr, Complex64::new(1.0, 0.0));
                out.add_product(&left, &right, cx * cy);
            }
        }
        out.prune();
        out
    }

    /// (ε ⊗ id): collapse the left leg with the counit.
    pub fn counit_left(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.q);
        for ((ml, mr), c) in &self.terms {
            if ml.l == 0 && ml.m == 0 {
                out.insert(*mr, *c);
            }
        }
        out
    }

    /// (id ⊗ ε): collapse the right leg with the counit.
    pub fn counit_right(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.q);
        for ((ml, mr), c) in &self.terms {
            if mr.l == 0 && mr.m == 0 {
                out.insert(*ml, *c);
            }
        }
        out
    }

    /// (h ⊗ id): collapse the left leg with the Haar state.
    pub fn haar_left(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.q);
        for ((ml, mr), c) in &self.terms {
            if ml.k == 0 && ml.l == ml.m {
                out.insert(*mr, c / qint(ml.l as i64 + 1, self.q));
            }
        }
        out
    }

    /// (id ⊗ h): collapse the right leg with the Haar state.
    pub fn haar_right(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.q);
        for ((ml, mr), c) in &self.terms {
            if mr.k == 0 && mr.l == mr.m {
                out.insert(*ml, c / qint(mr.l as i64 + 1, self.q));
            }
        }
        out
    }

    /// (id ⊗ φ) for a linear functional φ given on algebra elements.
    pub fn slice_right(&self, mut phi: impl FnMut(&AlgebraElement) -> Complex64) -> AlgebraElement {
        // Group by right monomial so φ is evaluated once per distinct monomial.
        let mut grouped: BTreeMap<Monomial, AlgebraElement> = BTreeMap::new();
        for ((ml, mr), c) in &self.terms {
            grouped
                .entry(*mr)
                .or_insert_with(|| AlgebraElement::zero(self.q))
                .insert(*ml, *c);
        }
        let mut out = AlgebraElement::zero(self.q);
        for (mr, left) in grouped {
            let w = phi(&AlgebraElement::from_monomial(
                self.q,
                mr,
                Complex64::new(1.0, 0.0),
            ));
            if w.norm() > 0.0 {
                out = &out + &left.scale(w);
            }
        }
        out.prune();
        out
    }

    /// m(f ⊗ id): apply f to the left leg and multiply the legs together.
    pub fn mul_after_left(&self, f: impl Fn(&AlgebraElement) -> AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.q);
        for ((ml, mr), c) in &self.terms {
            let fl = f(&AlgebraElement::from_monomial(
                self.q,
                *ml,
                Complex64::new(1.0, 0.0),
            ));
            let right = AlgebraElement::from_monomial(self.q, *mr, Complex64::new(1.0, 0.0));
            out = &out + &(&fl * &right).scale(*c);
        }
        out.prune();
        out
    }

    /// Apply Δ to every left leg, producing the left-associated triple tensor.
    pub fn coproduct_left(&self) -> Tensor3 {
        let mut out = Tensor3 { q: self.q, terms: BTreeMap::new() };
        for ((ml, mr), c) in &self.terms {
            let dl = AlgebraElement::from_monomial(self.q, *ml, Complex64::new(1.0, 0.0))
                .coproduct();
            for ((m1, m2), c2) in &dl.terms {
                out.insert((*m1, *m2, *mr), c * c2);
            }
        }
        out
    }

    /// Apply Δ to every right leg.
    pub fn coproduct_right(&self) -> Tensor3 {
        let mut out = Tensor3 { q: self.q, terms: BTreeMap::new() };
        for ((ml, mr), c) in &self.terms {
            let dr = AlgebraElement::from_monomial(self.q, *mr, Complex64::new(1.0, 0.0))
                .coproduct();
            for ((m1, m2), c2) in &dr.terms {
                out.insert((*ml, *m1, *m2), c * c2);
            }
        }
        out
    }

    pub fn linf_distance(&self, other: &TensorElement) -> f64 {
        let mut keys: std::collections::BTreeSet<(Monomial, Monomial)> = std::collections::BTreeSet::new();
        keys.extend(self.terms.keys().copied());
        keys.extend(other.terms.keys().copied());
        keys.into_iter()
            .map(|k| {
                (self.terms.get(&k).copied().unwrap_or_default()
                    - other.terms.get(&k).copied().unwrap_or_default())
                .norm()
            })
            .fold(0.0, f64::max)
    }
}

impl Add for &TensorElement {
    type Output = TensorElement;
    fn add(self, rhs: &TensorElement) -> TensorElement {
        assert_eq!(self.q, rhs.q, "mismatched q between operands");
        let mut out = self.clone();
        for (key, c) in &rhs.terms {
            out.insert(*key, *c);
        }
        out
    }
}

impl Sub for &TensorElement {
    type Output = TensorElement;
    fn sub(self, rhs: &TensorElement) -> TensorElement {
        assert_eq!(self.q, rhs.q, "mismatched q between operands");
        let mut out = self.clone();
        for (key, c) in &rhs.terms {
            out.insert(*key, -*c);
        }
        out
    }
}

/// Triple tensor used only for the coassociativity check.
#[derive(Debug, Clone)]
pub struct Tensor3 {
    #[allow(dead_code)]
    q: f64,
    terms: BTreeMap<(Monomial, Monomial, Monomial), Complex64>,
}

impl Tensor3 {
    fn insert(&mut self, key: (Monomial, Monomial, Monomial), coeff: Complex64) {
        let entry = self.terms.entry(key).or_insert_with(Complex64::default);
        *entry += coeff;
        if entry.norm() < PRUNE_TOL {
            self.terms.remove(&key);
        }
    }

    pub fn linf_distance(&self, other: &Tensor3) -> f64 {
        let mut keys: std::collections::BTreeSet<_> = self.terms.keys().copied().collect();
        keys.extend(other.terms.keys().copied());
        keys.into_iter()
            .map(|k| {
                (self.terms.get(&k).copied().unwrap_or_default()
                    - other.terms.get(&k).copied().unwrap_or_default())
                .norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Residues of the five defining relations, each normalised to canonical form.
/// All five must vanish identically for the rewriting system to be sound.
pub fn relation_residues(q: f64) -> [f64; 5] {
    let a = AlgebraElement::generator(Gen::A, q);
    let b = AlgebraElement::generator(Gen::B, q);
    let astar = a.adjoint();
    let bstar = b.adjoint();
    let unit = AlgebraElement::unit(q);
    [
        (&(&b * &a) - &(&a * &b).scale_re(q)).linf_norm(),
        (&(&bstar * &a) - &(&a * &bstar).scale_re(q)).linf_norm(),
        (&(&b * &bstar) - &(&bstar * &b)).linf_norm(),
        (&(&(&astar * &a) + &(&bstar * &b).scale_re(q * q)) - &unit).linf_norm(),
        (&(&(&a * &astar) + &(&b * &bstar)) - &unit).linf_norm(),
    ]
}

/// All basis monomials with |k| + l + m ≤ max_degree.
pub fn monomials_up_to(max_degree: u32) -> Vec<Monomial> {
    let d = max_degree as i32;
    let mut out = Vec::new();
    for k in -d..=d {
        for l in 0..=(d - k.abs()) {
            for m in 0..=(d - k.abs() - l) {
                out.push(Monomial::new(k, l as u32, m as u32));
            }
        }
    }
    out
}

/// A deterministic pseudo-random element supported on degree ≤ max_degree.
pub fn random_element(q: f64, max_degree: u32, terms: usize, rng: &mut impl rand::Rng) -> AlgebraElement {
    let basis = monomials_up_to(max_degree);
    let mut out = AlgebraElement::zero(q);
    for _ in 0..terms {
        let mono = basis[rng.gen_range(0..basis.len())];
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        out.insert(mono, c);
    }
    out
}

/// q = 1 only: evaluate an element as a function on SU(2) at the point with
/// first column (α, β); the generators act by a ↦ conj(α), b ↦ conj(β).
pub fn evaluate_su2(x: &AlgebraElement, alpha: Complex64, beta: Complex64) -> Result<Complex64, ParamError> {
    if (x.q() - 1.0).abs() >= Q_ONE_EPS {
        return Err(ParamError::BadQ(x.q()));
    }
    let av = alpha.conj();
    let bv = beta.conj();
    let mut acc = Complex64::default();
    for (mono, c) in x.terms() {
        let apart = if mono.k >= 0 {
            av.powi(mono.k)
        } else {
            av.conj().powi(-mono.k)
        };
        acc += c * apart * bv.powu(mono.l) * bv.conj().powu(mono.m);
    }
    Ok(acc)
}

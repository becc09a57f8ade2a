//! Monge-Kantorovič distance estimation between states restricted to fuzzy
//! spectral bands, the explicit bound formulas from the uniform-approximation
//! estimates, and diameter/continuity experiment drivers.
//!
//! The optimiser maximises |μ(x) − ν(x)| over selfadjoint x in the band span
//! with L_{t,q}(x) ≤ 1 by ratio ascent with subgradients from the top singular
//! pair of the norm-attaining representation matrix. Only lower bounds are
//! produced; paper inequalities are consumed as upper bounds, so comparisons
//! stay one-sided.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{AlgebraElement, Monomial};
use crate::berezin::{evaluate_state, p_operator, FuzzyBandBasis, StateError, StateSpec};
use crate::dirac::derivative;
use crate::qnum::{qint, QParams};
use crate::repnorm::{cstar_norm_mat2, Mat2, Mat2NormProtocol, NormOptions};

/// Options for the distance optimiser.
#[derive(Debug, Clone)]
pub struct MkOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub random_directions: usize,
    pub search_theta: usize,
    pub full_theta: usize,
    pub search_power_iters: usize,
    pub full_power_iters: usize,
    pub seed: u64,
    pub cutoff: Option<usize>,
}

impl Default for MkOptions {
    fn default() -> Self {
        MkOptions {
            restarts: 16,
            max_iters: 500,
            random_directions: 100_000,
            search_theta: 4,
            full_theta: 64,
            search_power_iters: 35,
            full_power_iters: 900,
            seed: 0,
            cutoff: None,
        }
    }
}

/// Optimiser output: a certified lower bound with diagnostics.
#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub lower_bound: f64,
    /// Coefficients of the maximiser over the selfadjoint band basis,
    /// normalised so the seminorm estimate is 1.
    pub maximizer: Vec<f64>,
    pub seminorm_at_maximizer: f64,
    /// Best value found by the pure random-direction search (certified the
    /// same way); the optimiser dominates it by construction.
    pub random_search_value: f64,
    pub gap: f64,
    pub restarts: usize,
    pub iterations: usize,
    pub degenerate: bool,
    pub flat_direction_flagged: bool,
    /// Relative disagreement between the fixed-protocol seminorm and the
    /// adaptive oracle at the maximiser.
    pub norm_residual: f64,
}

/// Selfadjoint spanning family of the band with the scalar direction removed:
/// ξ + ξ* and i(ξ − ξ*) over monomial pairs, ξ itself when selfadjoint.
pub fn selfadjoint_basis(f: &FuzzyBandBasis) -> Vec<AlgebraElement> {
    let q = f.q;
    let mut out = Vec::new();
    for mo in &f.monomials {
        if *mo == Monomial::ONE {
            continue;
        }
        let adj = mo.adjoint();
        if adj == *mo {
            out.push(AlgebraElement::from_monomial(q, *mo, Complex64::new(1.0, 0.0)));
        } else if *mo < adj {
            let x = AlgebraElement::from_monomial(q, *mo, Complex64::new(1.0, 0.0));
            let xs = x.adjoint();
            out.push(&x + &xs);
            out.push((&x - &xs).scale(Complex64::new(0.0, 1.0)));
        }
    }
    out
}

/// Reusable distance solver over a fixed band: protocols and the random-search
/// direction evaluations are built once and shared across state pairs.
pub struct MkSolver {
    pub params: QParams,
    pub opts: MkOptions,
    basis: Vec<AlgebraElement>,
    proto_search: Mat2NormProtocol,
    proto_full: Mat2NormProtocol,
    directions: Vec<f64>,
    direction_norms: Vec<f64>,
}

fn gaussian_direction(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(d);
    while v.len() < d {
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * std::f64::consts::PI * u2;
        v.push(r * th.cos());
        if v.len() < d {
            v.push(r * th.sin());
        }
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in &mut v {
            *x /= n;
        }
    }
    v
}

impl MkSolver {
    pub fn new(f: &FuzzyBandBasis, p: QParams, opts: MkOptions) -> Self {
        let basis = selfadjoint_basis(f);
        let mats: Vec<Mat2> = basis.iter().map(|g| derivative(g, p).entries).collect();
        let proto_search = Mat2NormProtocol::new(
            &mats,
            p,
            opts.search_theta,
            opts.cutoff,
            opts.search_power_iters,
            opts.seed,
        );
        let mut proto_full = Mat2NormProtocol::new(
            &mats,
            p,
            opts.full_theta,
            opts.cutoff,
            opts.full_power_iters,
            opts.seed,
        );
        proto_full.block = 4;
        MkSolver {
            params: p,
            opts,
            basis,
            proto_search,
            proto_full,
            directions: Vec::new(),
            direction_norms: Vec::new(),
        }
    }

    pub fn basis(&self) -> &[AlgebraElement] {
        &self.basis
    }

    /// Assemble Σ v_i g_i.
    pub fn element_at(&self, v: &[f64]) -> AlgebraElement {
        let q = self.basis[0].q();
        let mut out = AlgebraElement::zero(q);
        for (c, g) in v.iter().zip(self.basis.iter()) {
            if *c != 0.0 {
                out = &out + &g.scale_re(*c);
            }
        }
        out
    }

    fn ensure_directions(&mut self) {
        if !self.directions.is_empty() || self.opts.random_directions == 0 {
            return;
        }
        let d = self.basis.len();
        let count = self.opts.random_directions;
        let seed = self.opts.seed;
        let dirs: Vec<Vec<f64>> = (0..count)
            .into_par_iter()
            .map(|idx| {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x2545f4914f6cdd1d));
                gaussian_direction(&mut rng, d)
            })
            .collect();
        let norms: Vec<f64> = dirs
            .par_iter()
            .map(|w| self.proto_search.norm(w))
            .collect();
        self.directions = dirs.into_iter().flatten().collect();
        self.direction_norms = norms;
    }

    fn state_values(&self, s: &StateSpec) -> Result<Vec<f64>, StateError> {
        self.basis
            .iter()
            .map(|g| {
                let v = evaluate_state(s, g)?;
                debug_assert!(v.im.abs() < 1e-8, "state not real on selfadjoint element");
                Ok(v.re)
            })
            .collect()
    }

    /// Maximise |μ(x) − ν(x)| over the band's L-unit ball (lower bound).
    pub fn distance(&mut self, mu: &StateSpec, nu: &StateSpec) -> Result<DistanceResult, StateError> {
        let d = self.basis.len();
        let cmu = self.state_values(mu)?;
        let cnu = self.state_values(nu)?;
        let c: Vec<f64> = cmu.iter().zip(cnu.iter()).map(|(a, b)| a - b).collect();
        let cnorm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if cnorm < 1e-13 {
            return Ok(DistanceResult {
                lower_bound: 0.0,
                maximizer: vec![0.0; d],
                seminorm_at_maximizer: 0.0,
                random_search_value: 0.0,
                gap: 0.0,
                restarts: 0,
                iterations: 0,
                degenerate: true,
                flat_direction_flagged: false,
                norm_residual: 0.0,
            });
        }

        // random-direction oracle over the shared cache
        self.ensure_directions();
        let mut top: Vec<(f64, usize)> = Vec::new();
        if !self.direction_norms.is_empty() {
            let mut ranked: Vec<(f64, usize)> = self
                .direction_norms
                .par_iter()
                .enumerate()
                .map(|(i, l)| {
                    let w = &self.directions[i * d..(i + 1) * d];
                    let cv: f64 = w.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
                    let ratio = if *l > 1e-13 { cv.abs() / l } else { 0.0 };
                    (ratio, i)
                })
                .collect();
            ranked.par_sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
            top = ranked.into_iter().take(10).collect();
        }

        let mut flat_flag = false;
        let mut total_iters = 0usize;
        // restart seeds: deterministic random starts, plus the best random
        // direction, plus the raw objective direction
        let mut seeds: Vec<Vec<f64>> = Vec::new();
        for r in 0..self.opts.restarts.saturating_sub(2) {
            let mut rng = ChaCha8Rng::seed_from_u64(
                self.opts.seed ^ 0xabcd ^ (r as u64).wrapping_mul(0x9e3779b97f4a7c15),
            );
            seeds.push(gaussian_direction(&mut rng, d));
        }
        seeds.push(c.iter().map(|x| x / cnorm).collect());
        if let Some((_, idx)) = top.first() {
            seeds.push(self.directions[idx * d..(idx + 1) * d].to_vec());
        }

        let ascents: Vec<(f64, Vec<f64>, usize, bool)> = seeds
            .par_iter()
            .map(|v0| self.ascend(&c, v0))
            .collect();
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        for (_, v, iters, flat) in &ascents {
            candidates.push(v.clone());
            total_iters += iters;
            flat_flag |= flat;
        }
        for (_, idx) in &top {
            candidates.push(self.directions[idx * d..(idx + 1) * d].to_vec());
        }

        // score every candidate under the full fixed protocol
        let score = |v: &[f64]| -> f64 {
            let l = self.proto_full.norm(v);
            let cv: f64 = v.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
            if l > 1e-13 {
                cv.abs() / l
            } else {
                0.0
            }
        };
        let scored: Vec<f64> = candidates.par_iter().map(|v| score(v)).collect();
        let n_ascent = ascents.len();
        let best_idx = scored
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        let best_random_idx = scored
            .iter()
            .enumerate()
            .skip(n_ascent)
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i);

        // certify a candidate: the seminorm is taken as the larger of the
        // fixed-protocol value and the adaptive oracle's value, so the
        // reported ratio is the conservative one
        let certify = |v: &[f64]| -> (f64, f64, f64) {
            let l_protocol = self.proto_full.norm(v);
            let x = self.element_at(v);
            let adaptive_opts = NormOptions {
                theta_grid: self.opts.full_theta,
                seed: self.opts.seed,
                ..NormOptions::default()
            };
            let adapt = crate::dirac::seminorm_l(&x, self.params, &adaptive_opts);
            let l_cert = l_protocol.max(adapt.value);
            let cv: f64 = v.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
            let value = if l_cert > 1e-13 { cv.abs() / l_cert } else { 0.0 };
            let residual = if l_cert > 0.0 {
                (l_protocol - adapt.value).abs() / l_cert
            } else {
                0.0
            };
            (value, l_cert, residual)
        };
        let (value_w, l_w, residual_w) = certify(&candidates[best_idx]);
        let (value_r, _, _) = match best_random_idx {
            Some(i) if i != best_idx => certify(&candidates[i]),
            Some(i) => (value_w, 0.0, i as f64 * 0.0),
            None => (0.0, 0.0, 0.0),
        };
        // the reported bound dominates the certified random-search value by
        // construction: the winner maximises over a superset of candidates,
        // and ties fall back to the random candidate itself
        let (winner, lower_bound, l_cert, norm_residual) = if value_r > value_w {
            let i = best_random_idx.unwrap();
            let (v2, l2, r2) = certify(&candidates[i]);
            (candidates[i].clone(), v2, l2, r2)
        } else {
            (candidates[best_idx].clone(), value_w, l_w, residual_w)
        };
        let cv: f64 = winner.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
        let (maximizer, seminorm_at_maximizer) = if l_cert > 1e-13 {
            let m: Vec<f64> = winner
                .iter()
                .map(|x| x * cv.signum() / l_cert)
                .collect();
            (m, 1.0)
        } else {
            flat_flag = true;
            (winner, 0.0)
        };
        Ok(DistanceResult {
            lower_bound,
            maximizer,
            seminorm_at_maximizer,
            random_search_value: value_r,
            gap: lower_bound - value_r,
            restarts: n_ascent,
            iterations: total_iters,
            degenerate: false,
            flat_direction_flagged: flat_flag,
            norm_residual,
        })
    }

    /// Ratio ascent |c·v|/L(v) with 1/k steps and tail averaging.
    fn ascend(&self, c: &[f64], v0: &[f64]) -> (f64, Vec<f64>, usize, bool) {
        let d = c.len();
        let normalize = |v: &mut Vec<f64>| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 0.0 {
                for x in v.iter_mut() {
                    *x /= n;
                }
            }
        };
        let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let mut v = v0.to_vec();
        normalize(&mut v);
        if dot(c, &v) < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        let mut best_f = f64::NEG_INFINITY;
        let mut best_v = v.clone();
        let mut avg = vec![0.0f64; d];
        let mut avg_count = 0usize;
        let mut stall = 0usize;
        let mut iters = 0usize;
        let mut flat = false;
        for k in 1..=self.opts.max_iters {
            iters = k;
            let (l, grad_l) = self.proto_search.norm_grad(&v);
            if l < 1e-13 {
                flat = true;
                break;
            }
            let cv = dot(c, &v);
            let f = cv / l;
            if f > best_f + 1e-12 * f.abs().max(1e-30) {
                best_f = f;
                best_v = v.clone();
                stall = 0;
            } else {
                stall += 1;
                if stall > 40 {
                    break;
                }
            }
            // ∇(c·v/L) = (c − f ∇L)/L, stepped along its direction
            let mut g: Vec<f64> = (0..d).map(|i| c[i] - f * grad_l[i]).collect();
            let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gn < 1e-14 {
                break;
            }
            for x in g.iter_mut() {
                *x /= gn;
            }
            let step = 0.5 / k as f64;
            for i in 0..d {
                v[i] += step * g[i];
            }
            normalize(&mut v);
            if dot(c, &v) < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
            if k > self.opts.max_iters / 2 {
                for i in 0..d {
                    avg[i] += v[i];
                }
                avg_count += 1;
            }
        }
        if avg_count > 0 {
            normalize(&mut avg);
            let l = self.proto_search.norm(&avg);
            if l > 1e-13 {
                let f = dot(c, &avg).abs() / l;
                if f > best_f {
                    best_f = f;
                    best_v = avg;
                }
            }
        }
        (best_f, best_v, iters, flat)
    }
}

/// One-shot distance between two states over a fuzzy band.
pub fn mk_distance(
    mu: &StateSpec,
    nu: &StateSpec,
    f: &FuzzyBandBasis,
    p: QParams,
    opts: MkOptions,
) -> Result<DistanceResult, StateError> {
    MkSolver::new(f, p, opts).distance(mu, nu)
}

/// The intermediary functional
/// ψ_N^M(x) = (M+1)^{-1} Σ_{r=N}^{N+M} Σ_{m=0}^{N+M-r} √(⟨m+r+1⟩/⟨r+1⟩) ε(P_m(x)).
pub fn psi_functional(n: usize, m: usize, x: &AlgebraElement) -> Complex64 {
    let q = x.q();
    let mut acc = Complex64::default();
    for r in n..=n + m {
        for mm in 0..=(n + m - r) {
            let w = (qint((mm + r) as i64 + 1, q) / qint(r as i64 + 1, q)).sqrt();
            acc += p_operator(mm, x).counit() * w / (m as f64 + 1.0);
        }
    }
    acc
}

/// C(K, δ) = (2K+1)(1+K)^{1/2}(δ^{1/2} + δ^{-1/2} + 1).
pub fn prop_constant_c(k: usize, delta: f64) -> f64 {
    (2 * k + 1) as f64 * (1.0 + k as f64).sqrt() * (delta.sqrt() + 1.0 / delta.sqrt() + 1.0)
}

/// ε_{N,M} = (2K+1)(1/(N+1) + 1/(M+1))(δ^{1/2} + δ^{-1/2}).
pub fn prop_epsilon_nm(k: usize, delta: f64, n: usize, m: usize) -> f64 {
    (2 * k + 1) as f64
        * (1.0 / (n as f64 + 1.0) + 1.0 / (m as f64 + 1.0))
        * (delta.sqrt() + 1.0 / delta.sqrt())
}

/// Upper bound C(K,δ)·sup_{N≤r≤N+M} d_q⁰(h_r, ε) + ε_{N,M} on the distance
/// d_{t,q}(χ_N^M|_{B^K}, ε|_{B^K}); the Podleś distances are supplied by the
/// caller (lower bounds from the fuzzy-sphere optimiser).
pub fn mulspe_bound(k: usize, delta: f64, n: usize, m: usize, podles_sup: f64) -> f64 {
    prop_constant_c(k, delta) * podles_sup + prop_epsilon_nm(k, delta, n, m)
}

/// Diameter experiment report.
#[derive(Debug, Clone)]
pub struct DiameterReport {
    pub lower_bound: f64,
    pub best_pair: (StateSpec, StateSpec),
    pub vertical_term: f64,
    pub podles_diameter_lower_bound: f64,
    /// 2π(t^{1/2}+t^{-1/2})/√3 + Podleś term; the Podleś ingredient is itself
    /// only a lower bound of the true Podleś diameter.
    pub structural_expression: f64,
    pub pair_values: Vec<(StateSpec, StateSpec, f64)>,
}

/// Lower-bounds the diameter by maximising the distance over state pairs, and
/// reports the structural upper-bound expression alongside.
pub fn diameter_report(
    p: QParams,
    band: &FuzzyBandBasis,
    states: &[StateSpec],
    podles_level: usize,
    podles_states: &[StateSpec],
    opts: MkOptions,
) -> Result<DiameterReport, StateError> {
    let mut solver = MkSolver::new(band, p, opts.clone());
    let mut best = 0.0f64;
    let mut best_pair = (states[0].clone(), states[0].clone());
    let mut pair_values = Vec::new();
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let r = solver.distance(&states[i], &states[j])?;
            pair_values.push((states[i].clone(), states[j].clone(), r.lower_bound));
            if r.lower_bound > best {
                best = r.lower_bound;
                best_pair = (states[i].clone(), states[j].clone());
            }
        }
    }
    // Podleś diameter via pair maximisation on the fuzzy sphere
    let sphere = crate::berezin::fuzzy_basis(podles_level, 0, p.q);
    let mut podles_solver = MkSolver::new(&sphere, QParams::diagonal(p.q).unwrap(), opts);
    let mut podles_best = 0.0f64;
    for i in 0..podles_states.len() {
        for j in (i + 1)..podles_states.len() {
            let r = podles_solver.distance(&podles_states[i], &podles_states[j])?;
            podles_best = podles_best.max(r.lower_bound);
        }
    }
    let vertical_term =
        2.0 * std::f64::consts::PI * (p.t.sqrt() + 1.0 / p.t.sqrt()) / 3f64.sqrt();
    Ok(DiameterReport {
        lower_bound: best,
        best_pair,
        vertical_term,
        podles_diameter_lower_bound: podles_best,
        structural_expression: vertical_term + podles_best,
        pair_values,
    })
}

/// One row of a continuity sweep table.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub t: f64,
    pub q: f64,
    pub value: f64,
    pub diagnostic: f64,
}

/// Tabulates L_{t,q} of a q-dependent test element over a parameter grid.
pub fn seminorm_sweep(
    element_at: impl Fn(f64) -> AlgebraElement,
    grid: &[(f64, f64)],
    opts: &NormOptions,
) -> Vec<SweepRow> {
    grid.iter()
        .map(|&(t, q)| {
            let p = QParams::new(q, t).expect("grid point in (0,1]²");
            let est = crate::dirac::seminorm_l(&element_at(q), p, opts);
            SweepRow { t, q, value: est.value, diagnostic: est.residual }
        })
        .collect()
}

/// Tabulates mk-distance lower bounds over a parameter grid.
pub fn distance_sweep(
    mu: &StateSpec,
    nu: &StateSpec,
    band_level: usize,
    band_k: usize,
    grid: &[(f64, f64)],
    opts: &MkOptions,
) -> Result<Vec<SweepRow>, StateError> {
    let mut out = Vec::new();
    for &(t, q) in grid {
        let p = QParams::new(q, t).expect("grid point in (0,1]²");
        let band = crate::berezin::fuzzy_band(band_level, band_k, q);
        let mut solver = MkSolver::new(&band, p, opts.clone());
        let r = solver.distance(mu, nu)?;
        out.push(SweepRow { t, q, value: r.lower_bound, diagnostic: r.gap });
    }
    Ok(out)
}

/// Largest |Δvalue/Δkey| over consecutive rows; rows keyed by `key(row)`.
pub fn max_step_modulus(rows: &[SweepRow], key: impl Fn(&SweepRow) -> f64) -> f64 {
    let mut worst = 0.0f64;
    for w in rows.windows(2) {
        let dk = key(&w[1]) - key(&w[0]);
        if dk.abs() > 1e-300 {
            worst = worst.max((w[1].value - w[0].value).abs() / dk.abs());
        }
    }
    worst
}

/// Norm estimate of a linear combination at fixed seminorm protocol; exposed
/// for the acceptance suite's direct consistency checks.
pub fn certified_seminorm(x: &AlgebraElement, p: QParams, theta: usize, seed: u64) -> f64 {
    let opts = NormOptions { theta_grid: theta, seed, ..NormOptions::default() };
    cstar_norm_mat2(&derivative(x, p).entries, &opts).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berezin::fuzzy_band;

    fn small_opts() -> MkOptions {
        MkOptions {
            restarts: 6,
            max_iters: 120,
            random_directions: 2000,
            search_theta: 4,
            full_theta: 8,
            search_power_iters: 35,
            full_power_iters: 300,
            seed: 7,
            cutoff: None,
        }
    }

    #[test]
    fn distance_to_self_is_zero() {
        let p = QParams::diagonal(0.5).unwrap();
        let band = fuzzy_band(1, 1, p.q);
        let r = mk_distance(
            &StateSpec::Haar,
            &StateSpec::Haar,
            &band,
            p,
            small_opts(),
        )
        .unwrap();
        assert!(r.degenerate);
        assert_eq!(r.lower_bound, 0.0);
    }

    #[test]
    fn optimizer_dominates_random_search() {
        let p = QParams::diagonal(0.5).unwrap();
        let band = fuzzy_band(1, 1, p.q);
        let mut solver = MkSolver::new(&band, p, small_opts());
        let r = solver
            .distance(&StateSpec::Chi { n: 0, m: 0 }, &StateSpec::Counit)
            .unwrap();
        assert!(r.lower_bound > 0.0, "distance should be positive");
        assert!(
            r.lower_bound >= r.random_search_value,
            "{} < {}",
            r.lower_bound,
            r.random_search_value
        );
        assert!(r.gap >= 0.0);
        assert!(r.norm_residual < 1e-4, "norm residual {}", r.norm_residual);
        // maximizer is selfadjoint with seminorm 1 within tolerance
        let x = solver.element_at(&r.maximizer);
        assert!((&x - &x.adjoint()).linf_norm() < 1e-10);
        let l = certified_seminorm(&x, p, 8, 7);
        assert!((l - 1.0).abs() < 1e-6, "seminorm at maximizer {l}");
    }

    #[test]
    fn distance_is_symmetric() {
        let p = QParams::diagonal(0.6).unwrap();
        let band = fuzzy_band(1, 1, p.q);
        let mut solver = MkSolver::new(&band, p, small_opts());
        let a = solver
            .distance(&StateSpec::Chi { n: 1, m: 1 }, &StateSpec::Counit)
            .unwrap();
        let b = solver
            .distance(&StateSpec::Counit, &StateSpec::Chi { n: 1, m: 1 })
            .unwrap();
        assert!(
            (a.lower_bound - b.lower_bound).abs() < 1e-6 * a.lower_bound.max(1.0),
            "{} vs {}",
            a.lower_bound,
            b.lower_bound
        );
    }

    #[test]
    fn triangle_inequality_sampled() {
        let p = QParams::diagonal(0.6).unwrap();
        let band = fuzzy_band(1, 1, p.q);
        let mut solver = MkSolver::new(&band, p, small_opts());
        let s1 = StateSpec::Haar;
        let s2 = StateSpec::Counit;
        let s3 = StateSpec::Chi { n: 1, m: 1 };
        let d12 = solver.distance(&s1, &s2).unwrap().lower_bound;
        let d13 = solver.distance(&s1, &s3).unwrap().lower_bound;
        let d23 = solver.distance(&s2, &s3).unwrap().lower_bound;
        // all values are lower bounds of a true metric with shared tolerance;
        // the optimiser resolves each to ~1e-3 of the true sup on this band
        assert!(d12 <= d13 + d23 + 2e-2 * (d12.max(1.0)), "{d12} vs {d13}+{d23}");
    }

    #[test]
    fn band_monotonicity() {
        let p = QParams::diagonal(0.7).unwrap();
        let small = fuzzy_band(0, 1, p.q);
        let large = fuzzy_band(1, 1, p.q);
        let mu = StateSpec::Chi { n: 0, m: 0 };
        let nu = StateSpec::Counit;
        let d_small = mk_distance(&mu, &nu, &small, p, small_opts())
            .unwrap()
            .lower_bound;
        let d_large = mk_distance(&mu, &nu, &large, p, small_opts())
            .unwrap()
            .lower_bound;
        assert!(
            d_large + 1e-6 >= d_small,
            "enlarging the band shrank the distance: {d_small} -> {d_large}"
        );
    }

    #[test]
    fn psi_of_unit_is_one() {
        let q = 0.55;
        let one = AlgebraElement::unit(q);
        for (n, m) in [(0usize, 0usize), (1, 2), (3, 1)] {
            let v = psi_functional(n, m, &one);
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12, "ψ_{n}^{m}(1) = {v}");
        }
    }

    #[test]
    fn psi_eps_bound_on_homogeneous_samples() {
        let p = QParams::new(0.6, 0.6).unwrap();
        let opts = NormOptions {
            theta_grid: 8,
            start_cutoff: 40,
            ..NormOptions::default()
        };
        let monos = [
            Monomial::new(1, 0, 0),
            Monomial::new(-1, 1, 1),
            Monomial::new(2, 1, 1),
            Monomial::new(0, 2, 1),
        ];
        for mono in monos {
            let x = AlgebraElement::from_monomial(p.q, mono, Complex64::new(1.0, 0.0));
            let g = mono.left_grade().unsigned_abs() as usize;
            for (n, m) in [(1usize, 3usize), (2, 4)] {
                if m < g {
                    continue;
                }
                let lhs = (psi_functional(n, m, &x) - x.counit()).norm();
                let l = crate::dirac::seminorm_l(&x, p, &opts).value;
                let rhs = (1.0 / (n as f64 + 1.0) + 1.0 / (m as f64 + 1.0))
                    * (p.t.sqrt() + 1.0 / p.t.sqrt())
                    * l;
                assert!(lhs <= rhs + 1e-9, "mono {mono:?} (N,M)=({n},{m}): {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn bound_formula_constants() {
        let delta: f64 = 0.5;
        let c0 = prop_constant_c(0, delta);
        assert!((c0 - (delta.sqrt() + 1.0 / delta.sqrt() + 1.0)).abs() < 1e-14);
        // ε_{N,M} → 0 as N, M → ∞
        let mut prev = prop_epsilon_nm(1, delta, 1, 1);
        for s in [2usize, 4, 8, 16, 32] {
            let cur = prop_epsilon_nm(1, delta, s, s);
            assert!(cur < prev);
            prev = cur;
        }
        assert!(prop_epsilon_nm(1, delta, 10_000, 10_000) < 2e-3);
    }

    #[test]
    fn sweep_helpers_work() {
        let grid: Vec<(f64, f64)> = vec![(0.8, 0.8), (0.9, 0.9), (1.0, 1.0)];
        let opts = NormOptions {
            theta_grid: 4,
            start_cutoff: 40,
            su2_points: 2000,
            ..NormOptions::default()
        };
        let rows = seminorm_sweep(
            |q| AlgebraElement::unit(q),
            &grid,
            &opts,
        );
        for r in &rows {
            assert!(r.value < 1e-10, "L(1) = {}", r.value);
        }
        let rows = seminorm_sweep(
            |q| AlgebraElement::generator(crate::algebra::Gen::B, q),
            &grid,
            &opts,
        );
        let modulus = max_step_modulus(&rows, |r| r.t);
        assert!(modulus.is_finite());
        for r in &rows {
            assert!(r.value > 0.0);
        }
    }
}

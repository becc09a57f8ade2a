//! Small dense linear-algebra helpers: power iteration for spectral norms,
//! Jacobi eigenvalues for Hermitian matrices, and Cholesky solves for Gram
//! systems. Dimensions stay in the low hundreds, so hand-rolled routines are
//! plenty.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A linear operator given through matrix-vector products.
pub trait LinOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
    fn apply_adj(&self, x: &[Complex64], y: &mut [Complex64]);
}

#[derive(Debug, Clone)]
pub struct SpectralEstimate {
    pub sigma: f64,
    /// Top right-singular vector (unit).
    pub right: Vec<Complex64>,
    /// Top left-singular vector (unit), sigma * left = op(right).
    pub left: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut [Complex64]) -> f64 {
    let n = norm2(x);
    if n > 0.0 {
        for c in x.iter_mut() {
            *c /= n;
        }
    }
    n
}

/// Largest singular value of `op` by power iteration on op*op.
/// Deterministic under the seed; the estimate approaches the norm from below.
pub fn spectral_norm(op: &dyn LinOp, max_iters: usize, rel_tol: f64, seed: u64) -> SpectralEstimate {
    let n = op.dim();
    if n == 0 {
        return SpectralEstimate {
            sigma: 0.0,
            right: vec![],
            left: vec![],
            iterations: 0,
            converged: true,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let mut x: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut x);
    let mut y = vec![Complex64::default(); n];
    let mut z = vec![Complex64::default(); n];
    let mut sigma_prev = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    for it in 0..max_iters {
        op.apply(&x, &mut y);
        let sigma = norm2(&y);
        op.apply_adj(&y, &mut z);
        let zn = normalize(&mut z);
        std::mem::swap(&mut x, &mut z);
        iterations = it + 1;
        if zn == 0.0 {
            return SpectralEstimate {
                sigma: 0.0,
                right: x,
                left: y,
                iterations,
                converged: true,
            };
        }
        if (sigma - sigma_prev).abs() <= rel_tol * sigma.max(1e-300) {
            converged = true;
            break;
        }
        sigma_prev = sigma;
    }
    op.apply(&x, &mut y);
    let sigma = normalize(&mut y);
    SpectralEstimate {
        sigma,
        right: x,
        left: y,
        iterations,
        converged,
    }
}

/// Largest singular value by block (subspace) iteration with Rayleigh-Ritz on
/// op*op. Far more reliable than single-vector power iteration when the top
/// singular values cluster, as they do for truncated weighted shifts: the
/// estimate error is bounded by the width of the top cluster the block spans.
pub fn spectral_norm_block(
    op: &dyn LinOp,
    block: usize,
    max_iters: usize,
    rel_tol: f64,
    seed: u64,
) -> f64 {
    let n = op.dim();
    if n == 0 {
        return 0.0;
    }
    let b = block.max(1).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5851f42d4c957f2d);
    let mut basis: Vec<Vec<Complex64>> = (0..b)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    orthonormalize(&mut basis);
    let mut work = vec![Complex64::default(); n];
    let mut images: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); n]; b];
    // Ritz value of the current subspace: λ_max of the Gram of M·Q
    let mut ritz = |basis: &[Vec<Complex64>], images: &mut [Vec<Complex64>]| -> f64 {
        for (v, y) in basis.iter().zip(images.iter_mut()) {
            op.apply(v, y);
        }
        let mut gram = vec![Complex64::default(); b * b];
        for i in 0..b {
            for j in i..b {
                let g: Complex64 = images[i]
                    .iter()
                    .zip(images[j].iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                gram[i * b + j] = g;
                gram[j * b + i] = g.conj();
            }
        }
        small_hermitian_top_eigenvalue(&gram, b).max(0.0).sqrt()
    };
    let check_every = 6usize;
    let mut lam_prev = 0.0f64;
    for it in 0..max_iters {
        for v in basis.iter_mut() {
            op.apply(v, &mut work);
            op.apply_adj(&work, v);
        }
        orthonormalize(&mut basis);
        if it % check_every == check_every - 1 || it + 1 == max_iters {
            let lam = ritz(&basis, &mut images);
            if (lam - lam_prev).abs() <= rel_tol * lam.max(1e-300) {
                return lam;
            }
            lam_prev = lam;
        }
    }
    lam_prev.max(ritz(&basis, &mut images))
}

/// Largest eigenvalue of a small Hermitian PSD matrix by power iteration.
fn small_hermitian_top_eigenvalue(g: &[Complex64], b: usize) -> f64 {
    let mut x: Vec<Complex64> = (0..b)
        .map(|i| Complex64::new(1.0 + (i as f64) * 0.3, 0.1 * i as f64))
        .collect();
    let mut lam = 0.0f64;
    for _ in 0..60 {
        let mut y = vec![Complex64::default(); b];
        for i in 0..b {
            for j in 0..b {
                y[i] += g[i * b + j] * x[j];
            }
        }
        let nn = norm2(&y);
        if nn == 0.0 {
            return 0.0;
        }
        for c in y.iter_mut() {
            *c /= nn;
        }
        lam = nn;
        x = y;
    }
    // Rayleigh quotient at the final vector
    let mut gx = vec![Complex64::default(); b];
    for i in 0..b {
        for j in 0..b {
            gx[i] += g[i * b + j] * x[j];
        }
    }
    let rq: f64 = x.iter().zip(gx.iter()).map(|(a, c)| (a.conj() * c).re).sum();
    rq.max(lam).max(0.0)
}

fn orthonormalize(basis: &mut [Vec<Complex64>]) {
    for i in 0..basis.len() {
        for j in 0..i {
            let proj: Complex64 = basis[j]
                .iter()
                .zip(basis[i].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let (head, tail) = basis.split_at_mut(i);
            for (a, b) in head[j].iter().zip(tail[0].iter_mut()) {
                *b -= proj * a;
            }
        }
        let nn = norm2(&basis[i]);
        if nn > 1e-300 {
            for c in basis[i].iter_mut() {
                *c /= nn;
            }
        }
    }
}

/// Spectral norm of a 2×2 complex matrix [[a, b], [c, d]], closed form.
pub fn sigma_max_2x2(m: &[Complex64; 4]) -> f64 {
    let f2 = m.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let det = m[0] * m[3] - m[1] * m[2];
    let disc = (f2 * f2 - 4.0 * det.norm_sqr()).max(0.0).sqrt();
    (0.5 * (f2 + disc)).max(0.0).sqrt()
}

/// Dense Hermitian matrix in row-major storage.
#[derive(Debug, Clone)]
pub struct Hermitian {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl Hermitian {
    pub fn zeros(dim: usize) -> Self {
        Hermitian { dim, data: vec![Complex64::default(); dim * dim] }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    /// Eigenvalues via cyclic Jacobi on the real-symmetric embedding
    /// [[Re, -Im], [Im, Re]]; each eigenvalue of the embedding appears twice,
    /// so the doubled spectrum is collapsed before returning (ascending).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim;
        if d == 0 {
            return vec![];
        }
        let n = 2 * d;
        let mut a = vec![0.0f64; n * n];
        for i in 0..d {
            for j in 0..d {
                let v = self.get(i, j);
                a[i * n + j] = v.re;
                a[(i + d) * n + (j + d)] = v.re;
                a[(i + d) * n + j] = v.im;
                a[i * n + (j + d)] = -v.im;
            }
        }
        jacobi_symmetric_eigenvalues(&mut a, n);
        let mut evs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // collapse pairs
        evs.into_iter().step_by(2).collect()
    }

    /// Cholesky factorisation H = L L*; fails if not positive definite.
    pub fn cholesky(&self) -> Option<Vec<Complex64>> {
        let d = self.dim;
        let mut l = vec![Complex64::default(); d * d];
        for i in 0..d {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for k in 0..j {
                    sum -= l[i * d + k] * l[j * d + k].conj();
                }
                if i == j {
                    if sum.re <= 0.0 || sum.im.abs() > 1e-9 * sum.re.abs().max(1.0) {
                        return None;
                    }
                    l[i * d + j] = Complex64::new(sum.re.sqrt(), 0.0);
                } else {
                    l[i * d + j] = sum / l[j * d + j];
                }
            }
        }
        Some(l)
    }

    /// Solve H x = b through the Cholesky factor.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        let d = self.dim;
        let l = self.cholesky()?;
        let mut y = b.to_vec();
        for i in 0..d {
            for k in 0..i {
                let lik = l[i * d + k];
                y[i] = y[i] - lik * y[k];
            }
            y[i] /= l[i * d + i];
        }
        for i in (0..d).rev() {
            for k in (i + 1)..d {
                let lki = l[k * d + i].conj();
                y[i] = y[i] - lki * y[k];
            }
            y[i] /= l[i * d + i];
        }
        Some(y)
    }

    /// Rank: eigenvalues above rel_tol times the largest one.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let evs = self.eigenvalues();
        let max = evs.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        if max == 0.0 {
            return 0;
        }
        evs.iter().filter(|&&e| e.abs() > rel_tol * max).count()
    }
}

/// In-place cyclic Jacobi sweeps; on exit the diagonal holds the eigenvalues.
fn jacobi_symmetric_eigenvalues(a: &mut [f64], n: usize) {
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[i * n + j] * a[i * n + j];
            }
        }
        s
    };
    let frob: f64 = a.iter().map(|x| x * x).sum();
    let tol = 1e-28 * frob.max(1e-300);
    for _sweep in 0..64 {
        if off(a) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense {
        n: usize,
        a: Vec<Complex64>,
    }

    impl LinOp for Dense {
        fn dim(&self) -> usize {
            self.n
        }
        fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
            for i in 0..self.n {
                let mut acc = Complex64::default();
                for j in 0..self.n {
                    acc += self.a[i * self.n + j] * x[j];
                }
                y[i] = acc;
            }
        }
        fn apply_adj(&self, x: &[Complex64], y: &mut [Complex64]) {
            for j in 0..self.n {
                let mut acc = Complex64::default();
                for i in 0..self.n {
                    acc += self.a[i * self.n + j].conj() * x[i];
                }
                y[j] = acc;
            }
        }
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let n = 5;
        let mut a = vec![Complex64::default(); n * n];
        for i in 0..n {
            a[i * n + i] = Complex64::new((i as f64 + 1.0) * 0.3, 0.0);
        }
        let op = Dense { n, a };
        let est = spectral_norm(&op, 500, 1e-13, 1);
        assert!((est.sigma - 1.5).abs() < 1e-10);
        assert!(est.converged);
    }

    #[test]
    fn sigma2x2_matches_power_iteration() {
        let m = [
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.0, -1.2),
            Complex64::new(0.7, 0.0),
        ];
        let closed = sigma_max_2x2(&m);
        let op = Dense { n: 2, a: m.to_vec() };
        let est = spectral_norm(&op, 2000, 1e-14, 3);
        assert!((closed - est.sigma).abs() < 1e-9, "{closed} vs {}", est.sigma);
    }

    #[test]
    fn hermitian_eigenvalues_and_solve() {
        // H = V D V* for a simple unitary-ish construction
        let mut h = Hermitian::zeros(3);
        h.set(0, 0, Complex64::new(2.0, 0.0));
        h.set(1, 1, Complex64::new(3.0, 0.0));
        h.set(2, 2, Complex64::new(5.0, 0.0));
        h.set(0, 1, Complex64::new(0.5, 0.25));
        h.set(1, 0, Complex64::new(0.5, -0.25));
        h.set(1, 2, Complex64::new(-0.1, 0.4));
        h.set(2, 1, Complex64::new(-0.1, -0.4));
        let evs = h.eigenvalues();
        assert_eq!(evs.len(), 3);
        let trace: f64 = evs.iter().sum();
        assert!((trace - 10.0).abs() < 1e-9);
        // solve against a known vector
        let x = vec![
            Complex64::new(1.0, -1.0),
            Complex64::new(0.5, 2.0),
            Complex64::new(-0.25, 0.0),
        ];
        let mut b = vec![Complex64::default(); 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += h.get(i, j) * x[j];
            }
        }
        let solved = h.solve(&b).unwrap();
        for i in 0..3 {
            assert!((solved[i] - x[i]).norm() < 1e-9);
        }
        assert_eq!(h.rank(1e-12), 3);
    }
}

use rand::Rng as _;
use rand_distr::StandardNormal;

use super::dregular::dregular_edges;
use super::{EnsembleSpec, EntryDistribution};
use crate::error::{Error, Result};
use crate::linalg::{householder_qr, Dense};
use crate::matrix::SymMatrix;
use crate::rng::{rng_from_seed, Rng};

/// Draws one matrix from `spec`. Deterministic in `(spec, seed)`.
pub fn sample(spec: &EnsembleSpec, seed: u64) -> Result<SymMatrix> {
    spec.validate()?;
    sample_with(spec, &mut rng_from_seed(seed))
}

fn wigner_part(n: usize, dist: &EntryDistribution, rng: &mut Rng) -> SymMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    let xs = dist.fill(rng, n * (n + 1) / 2);
    let mut it = xs.into_iter();
    SymMatrix::from_lower_fn(n, |_, _| it.next().expect("enough draws") * scale)
}

pub(crate) fn sample_with(spec: &EnsembleSpec, rng: &mut Rng) -> Result<SymMatrix> {
    let mut h = match spec {
        EnsembleSpec::Wigner { n, dist, .. } => wigner_part(*n, dist, rng),
        EnsembleSpec::ErdosRenyi { n, p, .. } => {
            let scale = 1.0 / (*n as f64 * p * (1.0 - p)).sqrt();
            SymMatrix::from_lower_fn(*n, |_, _| if rng.random::<f64>() < *p { scale } else { 0.0 })
        }
        EnsembleSpec::DRegular { n, d, .. } => {
            let mut a = dregular_from_edges(*n, &dregular_edges(*n, *d, rng)?);
            a.scale(1.0 / (*d as f64 * (1.0 - *d as f64 / *n as f64)).sqrt());
            a
        }
        EnsembleSpec::Band { n, bandwidth, dist, .. } => {
            let scale = 1.0 / ((2 * bandwidth + 1) as f64).sqrt();
            let n = *n;
            SymMatrix::from_lower_fn(n, |i, j| {
                let dd = i - j;
                if dd.min(n - dd) <= *bandwidth {
                    dist.draw(rng) * scale
                } else {
                    0.0
                }
            })
        }
        EnsembleSpec::Covariance { rows, cols, dist, .. } => {
            let y = dist.fill(rng, rows * cols);
            let inv = 1.0 / *cols as f64;
            SymMatrix::from_lower_fn(*rows, |i, j| {
                let (ri, rj) = (&y[i * cols..(i + 1) * cols], &y[j * cols..(j + 1) * cols]);
                ri.iter().zip(rj).map(|(a, b)| a * b).sum::<f64>() * inv
            })
        }
        EnsembleSpec::VarianceProfile { mean, variances } => SymMatrix::from_lower_fn(mean.n(), |i, j| {
            let z: f64 = rng.sample(StandardNormal);
            mean.get(i, j) + z * variances[i][j].sqrt()
        }),
        EnsembleSpec::BlockGaussian { blocks, n, means, variances, goe_diagonal } => {
            let k = *blocks;
            SymMatrix::from_lower_fn(k * n, |g, h| {
                let (i, j) = (g / k, g % k);
                let (i2, j2) = (h / k, h % k);
                let mut v = if i == i2 { means[i].get(j, j2) } else { 0.0 };
                if j == j2 {
                    let mut var = variances[j][i][i2];
                    if *goe_diagonal && i == i2 {
                        var *= 2.0;
                    }
                    let z: f64 = rng.sample(StandardNormal);
                    v += z * var.sqrt();
                }
                v
            })
        }
        EnsembleSpec::FreeAddition { a_diag, b_diag, .. } => {
            let n = a_diag.len();
            let o = haar_with(n, rng);
            let ob = Dense::from_fn(n, n, |i, k| o.get(i, k) * b_diag[k]);
            SymMatrix::from_lower_fn(n, |i, j| {
                let s: f64 = ob.row(i).iter().zip(o.row(j)).map(|(a, b)| a * b).sum();
                if i == j {
                    s + a_diag[i]
                } else {
                    s
                }
            })
        }
        EnsembleSpec::LongRangeShift { base, shift_std } => {
            // The base already carries its shift; return early to avoid
            // subtracting it twice.
            let mut h = sample_with(base, rng)?;
            let z: f64 = rng.sample(StandardNormal);
            h.add_to_diag(z * shift_std / (base.dim() as f64).sqrt());
            return Ok(h);
        }
        EnsembleSpec::OutlierCounterexample { n, dist, theta } => {
            let mut h = wigner_part(*n, dist, rng);
            let big = (*n as f64).powf(*theta).exp();
            for i in 0..outlier_count(*n, *theta) {
                h.set(i, i, h.get(i, i) + big);
            }
            h
        }
        EnsembleSpec::KernelCounterexample { n, dist } => kernel_with(*n, dist, rng).0,
    };
    h.add_to_diag(-spec.shift());
    Ok(h)
}

/// Number of planted diagonal entries, `#{i >= 1 : i < N^{1-θ}}`.
pub fn outlier_count(n: usize, theta: f64) -> usize {
    let bound = (n as f64).powf(1.0 - theta);
    (bound.ceil() as usize).saturating_sub(1).min(n)
}

fn kernel_with(n: usize, dist: &EntryDistribution, rng: &mut Rng) -> (SymMatrix, bool) {
    let hit = rng.random::<f64>() < 1.0 / n as f64;
    let mut h = wigner_part(n, dist, rng);
    if hit {
        h.add_to_diag(n as f64);
    }
    (h, hit)
}

/// Kernel counterexample sample together with whether `X_0 = N` occurred.
pub fn sample_kernel(n: usize, dist: &EntryDistribution, seed: u64) -> Result<(SymMatrix, bool)> {
    EnsembleSpec::KernelCounterexample { n, dist: *dist }.validate()?;
    Ok(kernel_with(n, dist, &mut rng_from_seed(seed)))
}

fn dregular_from_edges(n: usize, edges: &[(usize, usize)]) -> SymMatrix {
    let mut a = SymMatrix::zeros(n);
    for &(u, v) in edges {
        a.set(u, v, 1.0);
    }
    a
}

/// 0/1 adjacency of a simple `d`-regular graph on `n` vertices.
pub fn sample_dregular_adjacency(n: usize, d: usize, seed: u64) -> Result<SymMatrix> {
    let edges = dregular_edges(n, d, &mut rng_from_seed(seed))?;
    Ok(dregular_from_edges(n, &edges))
}

fn haar_with(n: usize, rng: &mut Rng) -> Dense {
    let g = Dense::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let (mut q, rdiag) = householder_qr(&g);
    for i in 0..n {
        for (j, r) in rdiag.iter().enumerate() {
            if *r < 0.0 {
                q.data[i * n + j] = -q.data[i * n + j];
            }
        }
    }
    q
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// columns of `Q` multiplied by the signs of `diag R`.
pub fn sample_haar_orthogonal(n: usize, seed: u64) -> Result<Dense> {
    if n == 0 {
        return Err(Error::spec("Haar dimension must be at least 1"));
    }
    Ok(haar_with(n, &mut rng_from_seed(seed)))
}

/// `ℓ` Gaussian Wigner matrices `√ρ W_0 + √(1-ρ) W_i` sharing `W_0`.
pub fn sample_correlated_wigner_family(n: usize, rho: f64, count: usize, seed: u64) -> Result<Vec<SymMatrix>> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidRho(rho));
    }
    if n == 0 {
        return Err(Error::spec("N must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let g = EntryDistribution::gaussian();
    let common = wigner_part(n, &g, &mut rng);
    let (a, b) = (rho.sqrt(), (1.0 - rho).sqrt());
    Ok((0..count)
        .map(|_| {
            let own = wigner_part(n, &g, &mut rng);
            SymMatrix::from_lower_fn(n, |i, j| a * common.get(i, j) + b * own.get(i, j))
        })
        .collect())
}

pub fn sample_correlated_wigner_pair(n: usize, rho: f64, seed: u64) -> Result<(SymMatrix, SymMatrix)> {
    let mut v = sample_correlated_wigner_family(n, rho, 2, seed)?;
    let second = v.pop().expect("two samples");
    let first = v.pop().expect("two samples");
    Ok((first, second))
}

//! Matrix Dyson Equation `Id + (z - A + S[M]) M = 0`, `Im M > 0`, for
//! independent-entry variance profiles where `S[M] = diag(s · diag M)`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use super::{inversion_edge_threshold, ReferenceMeasure};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::matrix::SymMatrix;
use crate::spectral::eigenvalues;

const MAX_ITERATIONS: usize = 20_000;
/// Accepted bound on `‖Id + (z - A + S[M]) M‖_max`.
pub const MDE_RESIDUAL_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A Matrix Dyson Equation with mean `A` and variance profile `s`.
///
/// The index set is partitioned into blocks with no mean coupling between
/// them, so the resolvent `-(z - A + S[M])^{-1}` can be inverted block by
/// block.
#[derive(Clone, Debug)]
pub struct MdeProblem {
    n: usize,
    a: SymMatrix,
    blocks: Vec<Vec<usize>>,
    s: Vec<f64>,
}

impl MdeProblem {
    /// `s` is the `N x N` profile, row-major, `s[i*N + j] = E[W_ij²]`.
    pub fn new(a: SymMatrix, s: Vec<f64>) -> Result<Self> {
        let n = a.n();
        if n == 0 {
            return Err(Error::param("MDE dimension must be positive"));
        }
        validate_profile(&s, n)?;
        let blocks = components(&a);
        Ok(Self { n, a, blocks, s })
    }

    /// `A = 0`, `s_ij = 1/N`: the semicircle problem.
    pub fn flat_goe(n: usize) -> Result<Self> {
        Self::new(SymMatrix::zeros(n), vec![1.0 / n as f64; n * n])
    }

    /// Block problem on `ℝ^{K×K} ⊗ ℝ^{N×N}` with means `a_i` (each `K x K`,
    /// one per `i < N`) and one `N x N` profile `s^{(j)}` per component `j < K`.
    ///
    /// Global index of component `j` at site `i` is `i*K + j`.
    pub fn block(means: &[SymMatrix], variances: &[Vec<f64>]) -> Result<Self> {
        let n_sites = means.len();
        let k = variances.len();
        if n_sites == 0 || k == 0 {
            return Err(Error::param("block MDE needs N >= 1 sites and K >= 1 components"));
        }
        if means.iter().any(|m| m.n() != k) {
            return Err(Error::param("every block mean must be K x K"));
        }
        for v in variances {
            validate_profile(v, n_sites)?;
        }
        let n = n_sites * k;
        let a = SymMatrix::from_lower_fn(n, |g, h| {
            let (i, j) = (g / k, g % k);
            let (i2, j2) = (h / k, h % k);
            if i == i2 {
                means[i].get(j, j2)
            } else {
                0.0
            }
        });
        let mut s = vec![0.0; n * n];
        for i in 0..n_sites {
            for l in 0..n_sites {
                for (j, v) in variances.iter().enumerate() {
                    s[(i * k + j) * n + l * k + j] = v[i * n_sites + l];
                }
            }
        }
        let blocks = (0..n_sites).map(|i| (i * k..(i + 1) * k).collect()).collect();
        Ok(Self { n, a, blocks, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> &SymMatrix {
        &self.a
    }

    pub fn profile(&self) -> &[f64] {
        &self.s
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Smallest `p >= 1` with `1/(pN) <= s_ij <= p/N` for all entries;
    /// infinite when some entry vanishes.
    pub fn flatness_constant(&self) -> f64 {
        let nf = self.n as f64;
        self.s.iter().fold(1.0f64, |p, &v| {
            if v <= 0.0 {
                f64::INFINITY
            } else {
                p.max(v * nf).max(1.0 / (v * nf))
            }
        })
    }

    /// `max_i Σ_j s_ij`.
    fn max_row_sum(&self) -> f64 {
        self.s.chunks(self.n).map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max)
    }

    fn s_action(&self, d: &[Complex64]) -> Vec<Complex64> {
        self.s
            .chunks(self.n)
            .map(|row| row.iter().zip(d).filter(|(s, _)| **s != 0.0).map(|(s, v)| *s * v).sum())
            .collect()
    }

    /// `M = -(z - A + diag(v))^{-1}` per block.
    fn resolvent_blocks(&self, z: Complex64, v: &[Complex64]) -> Result<Vec<CMatrix>> {
        self.blocks
            .iter()
            .map(|b| {
                let k = b.len();
                let mut x = CMatrix::zeros(k);
                for (p, &gi) in b.iter().enumerate() {
                    for (q, &gj) in b.iter().enumerate() {
                        x.set(p, q, c(-self.a.get(gi, gj)));
                    }
                    x.set(p, p, x.get(p, p) + z + v[gi]);
                }
                if k == 1 {
                    let inv = x.get(0, 0).inv();
                    if !inv.is_finite() {
                        return Err(Error::Singular);
                    }
                    let mut m = CMatrix::zeros(1);
                    m.set(0, 0, -inv);
                    return Ok(m);
                }
                let mut m = x.inverse()?;
                m.data.iter_mut().for_each(|e| *e = -*e);
                Ok(m)
            })
            .collect()
    }

    fn diag_of(&self, blocks: &[CMatrix]) -> Vec<Complex64> {
        let mut d = vec![c(0.0); self.n];
        for (b, m) in self.blocks.iter().zip(blocks) {
            for (p, &g) in b.iter().enumerate() {
                d[g] = m.get(p, p);
            }
        }
        d
    }

    /// Fixed-point map `d ↦ diag(-(z - A + diag(s d))^{-1})`.
    fn phi(&self, z: Complex64, d: &[Complex64]) -> Result<(Vec<Complex64>, Vec<CMatrix>)> {
        let v = self.s_action(d);
        let blocks = self.resolvent_blocks(z, &v)?;
        Ok((self.diag_of(&blocks), blocks))
    }

    /// Newton step for `d - Φ(d) = 0`; the Jacobian of `Φ` is `(M∘M) s`
    /// restricted to blocks.
    fn newton_step(&self, d: &[Complex64], phi: &[Complex64], blocks: &[CMatrix]) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut jac = CMatrix::identity(n);
        for (b, m) in self.blocks.iter().zip(blocks) {
            for (p, &gi) in b.iter().enumerate() {
                for (q, &gl) in b.iter().enumerate() {
                    let w = m.get(p, q) * m.get(p, q);
                    let srow = &self.s[gl * n..(gl + 1) * n];
                    for (k, sv) in srow.iter().enumerate() {
                        if *sv != 0.0 {
                            jac.data[gi * n + k] -= w * *sv;
                        }
                    }
                }
            }
        }
        let rhs: Vec<Complex64> = phi.iter().zip(d).map(|(p, x)| p - x).collect();
        let delta = jac.solve(&rhs)?;
        Ok(d.iter().zip(&delta).map(|(x, dx)| x + dx).collect())
    }

    /// `‖Id + (z - A + S[M]) M‖_max` with `S[M]` taken from `M` itself.
    fn residual(&self, z: Complex64, blocks: &[CMatrix]) -> f64 {
        let v = self.s_action(&self.diag_of(blocks));
        let mut worst = 0.0f64;
        for (b, m) in self.blocks.iter().zip(blocks) {
            let k = b.len();
            for p in 0..k {
                for q in 0..k {
                    let mut acc = if p == q { c(1.0) } else { c(0.0) };
                    for (r, &gr) in b.iter().enumerate() {
                        let mut x = c(-self.a.get(b[p], gr));
                        if r == p {
                            x += z + v[b[p]];
                        }
                        acc += x * m.get(r, q);
                    }
                    worst = worst.max(acc.norm());
                }
            }
        }
        worst
    }
}

fn validate_profile(s: &[f64], n: usize) -> Result<()> {
    if s.len() != n * n {
        return Err(Error::param(format!("variance profile must have {} entries, got {}", n * n, s.len())));
    }
    for i in 0..n {
        for j in 0..n {
            let v = s[i * n + j];
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param("variance profile must be finite and nonnegative"));
            }
            if v != s[j * n + i] {
                return Err(Error::param("variance profile must be symmetric"));
            }
        }
    }
    Ok(())
}

/// Connected components of the off-diagonal sparsity pattern of `a`.
fn components(a: &SymMatrix) -> Vec<Vec<usize>> {
    let n = a.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in 0..i {
            if a.get(i, j) != 0.0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Solution of the MDE at one spectral parameter.
#[derive(Clone, Debug)]
pub struct MdeSolution {
    pub z: Complex64,
    /// Diagonal of `M(z)`.
    pub diag: Vec<Complex64>,
    /// Diagonal blocks of `M(z)`, aligned with [`MdeProblem::blocks`].
    pub blocks: Vec<CMatrix>,
    pub residual: f64,
    pub iterations: usize,
}

impl MdeSolution {
    /// `(1/N) Tr M(z)`, the Stieltjes transform of the reference measure.
    pub fn normalized_trace(&self) -> Complex64 {
        self.diag.iter().sum::<Complex64>() / self.diag.len() as f64
    }

    /// Full `N x N` matrix `M(z)`.
    pub fn matrix(&self, prob: &MdeProblem) -> CMatrix {
        let mut m = CMatrix::zeros(prob.n);
        for (b, mb) in prob.blocks.iter().zip(&self.blocks) {
            for (p, &gi) in b.iter().enumerate() {
                for (q, &gj) in b.iter().enumerate() {
                    m.set(gi, gj, mb.get(p, q));
                }
            }
        }
        m
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Solves the MDE at `z` from the default starting point `(i/(1+|z|)) Id`.
pub fn mde_solve(prob: &MdeProblem, z: Complex64) -> Result<MdeSolution> {
    mde_solve_from(prob, z, None)
}

/// Damped fixed-point iteration with Newton acceleration, optionally warm
/// started from a nearby solution's diagonal. A warm start that fails to
/// converge is retried from the default point.
pub fn mde_solve_from(prob: &MdeProblem, z: Complex64, init: Option<&[Complex64]>) -> Result<MdeSolution> {
    if !(z.im > 0.0) {
        return Err(Error::param("MDE needs Im z > 0"));
    }
    let n = prob.n;
    if prob.s.iter().all(|&v| v == 0.0) {
        let blocks = prob.resolvent_blocks(z, &vec![c(0.0); n])?;
        return finish(prob, z, blocks, 0);
    }
    match init {
        Some(v) if v.len() == n && v.iter().all(|x| x.im > 0.0 && x.is_finite()) => {
            iterate(prob, z, v.to_vec()).or_else(|_| iterate(prob, z, cold_start(z, n)))
        }
        _ => iterate(prob, z, cold_start(z, n)),
    }
}

fn cold_start(z: Complex64, n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 1.0 / (1.0 + z.norm())); n]
}

/// Newton with backtracking that keeps `Im d > 0`; falls back to a damped
/// fixed-point step when no Newton fraction lowers the residual.
fn iterate(prob: &MdeProblem, z: Complex64, mut d: Vec<Complex64>) -> Result<MdeSolution> {
    let (mut phi, mut blocks) = prob.phi(z, &d)?;
    let mut r = max_diff(&phi, &d);
    let mut theta = 0.5;
    let mut iterations = 0;
    let scale = d.iter().fold(1.0f64, |m, x| m.max(x.norm()));
    'outer: while r > 1e-15 * scale && iterations < MAX_ITERATIONS {
        iterations += 1;
        if let Ok(dn) = prob.newton_step(&d, &phi, &blocks) {
            let mut t = 1.0;
            for _ in 0..6 {
                let cand: Vec<Complex64> = d.iter().zip(&dn).map(|(x, y)| x + t * (y - x)).collect();
                if cand.iter().all(|x| x.im > 0.0 && x.is_finite()) {
                    if let Ok((pn, bn)) = prob.phi(z, &cand) {
                        let rn = max_diff(&pn, &cand);
                        if rn < r {
                            d = cand;
                            phi = pn;
                            blocks = bn;
                            r = rn;
                            continue 'outer;
                        }
                    }
                }
                t *= 0.5;
            }
        }
        let dt: Vec<Complex64> = d.iter().zip(&phi).map(|(x, p)| (1.0 - theta) * x + theta * p).collect();
        let (pt, bt) = prob.phi(z, &dt)?;
        let rt = max_diff(&pt, &dt);
        if rt >= r && r < 1e-12 * scale {
            // Rounding floor reached.
            break;
        }
        theta = if rt > r { (theta * 0.5).max(1e-6) } else { (theta * 2.0).min(0.5) };
        d = dt;
        phi = pt;
        blocks = bt;
        r = rt;
    }
    finish(prob, z, blocks, iterations)
}

fn finish(prob: &MdeProblem, z: Complex64, blocks: Vec<CMatrix>, iterations: usize) -> Result<MdeSolution> {
    let residual = prob.residual(z, &blocks);
    if !(residual <= MDE_RESIDUAL_TOL) {
        return Err(Error::NoConvergence { what: "matrix Dyson equation", iterations });
    }
    for m in &blocks {
        let k = m.n;
        let im = SymMatrix::from_lower_fn(k, |i, j| 0.5 * (m.get(i, j).im + m.get(j, i).im));
        let min = if k == 1 { im.get(0, 0) } else { eigenvalues(&im)?[0] };
        if !(min > 0.0) {
            return Err(Error::ImViolation("matrix Dyson equation"));
        }
    }
    let diag = prob.diag_of(&blocks);
    Ok(MdeSolution { z, diag, blocks, residual, iterations })
}

/// Solves the block MDE and returns `(m_1, …, m_N)`, each `K x K`.
pub fn block_mde_solve(means: &[SymMatrix], variances: &[Vec<f64>], z: Complex64) -> Result<Vec<CMatrix>> {
    let prob = MdeProblem::block(means, variances)?;
    Ok(mde_solve(&prob, z)?.blocks)
}

/// Options for extracting a density by Stieltjes inversion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityOptions {
    pub eta0: f64,
    pub points: usize,
    /// Grid span; defaults to one unit beyond a coarse support estimate.
    pub range: Option<(f64, f64)>,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self { eta0: 1e-3, points: 4001, range: None }
    }
}

/// Grid density from an MDE together with the raw Stieltjes values.
#[derive(Clone, Debug)]
pub struct MdeDensity {
    pub measure: ReferenceMeasure,
    /// Factor applied to the raw `Im Tr M / (Nπ)` values to reach unit mass.
    pub renormalization: f64,
    pub eta0: f64,
    pub x: Vec<f64>,
    /// `(1/N) Tr M(x + iη₀)` at each grid point.
    pub trace: Vec<Complex64>,
}

impl MdeDensity {
    /// Rows `(re_z, im_z, re_trace, im_trace)`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["re_z", "im_z", "re_tr_m_over_n", "im_tr_m_over_n"])?;
        for (x, m) in self.x.iter().zip(&self.trace) {
            wr.write_record([x, &self.eta0, &m.re, &m.im].map(|v| format!("{v:.12e}")))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Number of independent warm-start chains in a grid sweep. Fixed, so the
/// result does not depend on the thread count.
const SWEEP_CHAINS: usize = 16;

/// Evaluates `f` along `xs` in a fixed number of chains, each warm started
/// from its previous point.
pub(crate) fn sweep<T, S, F>(xs: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    S: Clone + Send,
    F: Fn(f64, Option<&S>) -> Result<(T, S)> + Sync + Send,
{
    let chunk = xs.len().div_ceil(SWEEP_CHAINS).max(1);
    let chunks: Vec<&[f64]> = xs.chunks(chunk).collect();
    let parts = crate::par::map_slice(&chunks, |part| -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(part.len());
        let mut state: Option<S> = None;
        for &x in part.iter() {
            let (v, s) = f(x, state.as_ref())?;
            out.push(v);
            state = Some(s);
        }
        Ok(out)
    });
    let mut all = Vec::with_capacity(xs.len());
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

/// Density `Im Tr M(x + iη₀) / (Nπ)` on a uniform grid, renormalized to mass 1.
pub fn mde_density(prob: &MdeProblem, opts: DensityOptions) -> Result<MdeDensity> {
    if !(opts.eta0 > 0.0) || opts.points < 2 {
        return Err(Error::param("density extraction needs eta0 > 0 and at least two points"));
    }
    let (lo, hi) = match opts.range {
        Some(r) => r,
        None => {
            let eig = eigenvalues(&prob.a)?;
            let spread = 2.0 * prob.max_row_sum().sqrt();
            (eig[0] - spread - 1.0, eig[eig.len() - 1] + spread + 1.0)
        }
    };
    let h = (hi - lo) / (opts.points - 1) as f64;
    let xs: Vec<f64> = (0..opts.points).map(|k| lo + h * k as f64).collect();
    let trace = sweep(&xs, |x, warm: Option<&Vec<Complex64>>| {
        let sol = mde_solve_from(prob, Complex64::new(x, opts.eta0), warm.map(|v| v.as_slice()))?;
        Ok((sol.normalized_trace(), sol.diag))
    })?;
    let raw: Vec<f64> = trace.iter().map(|m| (m.im / PI).max(0.0)).collect();
    let (measure, renormalization) = ReferenceMeasure::grid_with_threshold(lo, hi, raw, inversion_edge_threshold(opts.eta0))?;
    Ok(MdeDensity { measure, renormalization, eta0: opts.eta0, x: xs, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_goe_at_i() {
        let p = MdeProblem::flat_goe(5).unwrap();
        let sol = mde_solve(&p, Complex64::new(0.0, 1.0)).unwrap();
        let want = Complex64::new(0.0, (5f64.sqrt() - 1.0) / 2.0);
        for d in &sol.diag {
            assert!((d - want).norm() < 1e-12);
        }
        assert!(sol.residual <= MDE_RESIDUAL_TOL);
    }

    #[test]
    fn decoupled_resolvent() {
        let a = SymMatrix::from_diag(&[1.0, -0.5, 2.0]);
        let p = MdeProblem::new(a, vec![0.0; 9]).unwrap();
        let z = Complex64::new(0.3, 0.01);
        let sol = mde_solve(&p, z).unwrap();
        for (j, aj) in [1.0, -0.5, 2.0].iter().enumerate() {
            assert!((sol.diag[j] - (c(*aj) - z).inv()).norm() < 1e-14);
        }
    }

    #[test]
    fn components_split_diagonal_mean() {
        let a = SymMatrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 3.0]]).unwrap();
        assert_eq!(components(&a), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn profile_validation() {
        assert!(MdeProblem::new(SymMatrix::zeros(2), vec![0.1, 0.2, 0.3, 0.1]).is_err());
        assert!(MdeProblem::new(SymMatrix::zeros(2), vec![0.1, -0.2, -0.2, 0.1]).is_err());
    }
}

use serde::{Deserialize, Serialize};

use super::domain::Domain;
use super::family::MeasureFamily;
use crate::error::{Error, Result};
use crate::par::map_indexed;

/// Default grid points per axis for the coarse search.
pub const GRID_POINTS: usize = 401;
/// Cap on the number of coarse grid evaluations; the per-axis count shrinks
/// for `m >= 3` to respect it.
pub const MAX_GRID_EVALUATIONS: usize = 200_000;
/// Factor between the pilot estimate of `sup exp(Φ(u)) / max(‖u‖, 1)` and the
/// envelope constant `C`.
pub const ENVELOPE_SAFETY: f64 = 3.0;
/// Envelope radius beyond which a problem is declared to have no decay.
pub const MAX_SEARCH_RADIUS: f64 = 1e6;
/// Inner-approximation sequence `ε_k = 2^{-k}` used by [`solve_restricted`].
pub const RESTRICTED_EPS_STEPS: usize = 20;

/// `sup_{u ∈ D} S_α[u]` for a measure family.
#[derive(Clone, Debug)]
pub struct VarProblem {
    pub family: MeasureFamily,
    pub alpha: f64,
    /// Exponent shift `p` in the weight `e^{-(N+p)α‖u‖²}`.
    pub p_shift: f64,
    pub domain: Domain,
}

impl VarProblem {
    pub fn new(family: MeasureFamily, alpha: f64, domain: Domain) -> Result<Self> {
        let p = Self { family, alpha, p_shift: 0.0, domain };
        p.validate()?;
        Ok(p)
    }

    pub fn with_p_shift(mut self, p: f64) -> Self {
        self.p_shift = p;
        self
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::param(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(1..=3).contains(&self.dim()) {
            return Err(Error::spec(format!("only 1 <= m <= 3 is supported, got {}", self.dim())));
        }
        if !self.p_shift.is_finite() {
            return Err(Error::param("p_shift must be finite"));
        }
        self.domain.validate(self.dim())
    }
}

/// `∫ log|λ| μ(u)(dλ) - α‖u‖²`; `-∞` when the log-potential diverges.
pub fn s_alpha(prob: &VarProblem, u: &[f64]) -> Result<f64> {
    let phi = prob.family.measure(u)?.log_potential(0.0);
    Ok(phi - prob.alpha * norm2(u))
}

fn norm2(u: &[f64]) -> f64 {
    u.iter().map(|x| x * x).sum()
}

/// Membership of `u` in the nested sets `G_{+ε} ⊆ G ⊆ G_{-ε}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoodSetClass {
    InGPlusEps,
    InG,
    InGMinusEps,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub class: GoodSetClass,
    pub left_edge: f64,
    /// `μ((-∞, -ε))`.
    pub mass_below: f64,
    /// Slack used when comparing the left edge with `0` and `2ε`.
    pub tolerance: f64,
    /// Whether the left edge is within `tolerance` of a class boundary.
    pub near_boundary: bool,
}

fn edge_tolerance(left: f64) -> f64 {
    1e-12 * left.abs().max(1.0)
}

pub fn good_set_membership(prob: &VarProblem, u: &[f64], eps: f64) -> Result<Membership> {
    if !(eps > 0.0) {
        return Err(Error::param("eps must be positive"));
    }
    let mu = prob.family.measure(u)?;
    let l = mu.left_edge();
    let tol = edge_tolerance(l);
    let below = mu.cdf_left(-eps);
    let class = if l >= 2.0 * eps - tol {
        GoodSetClass::InGPlusEps
    } else if l >= -tol {
        GoodSetClass::InG
    } else if below <= eps {
        GoodSetClass::InGMinusEps
    } else {
        GoodSetClass::Outside
    };
    let near_boundary = (l - 2.0 * eps).abs() <= tol || l.abs() <= tol;
    Ok(Membership { class, left_edge: l, mass_below: below, tolerance: tol, near_boundary })
}

/// Maximizer of `S_α` and the search it came from.
#[derive(Clone, Debug, Serialize)]
pub struct VarSolution {
    pub u: Vec<f64>,
    pub value: f64,
    /// Radius of the ball outside which the envelope lies below the incumbent.
    pub radius: f64,
    /// Envelope constant `C` in `S_α[u] <= log(C max(‖u‖,1)) - α‖u‖²`.
    pub envelope_c: f64,
    pub evaluations: usize,
}

/// Pilot estimate of the envelope constant: `ENVELOPE_SAFETY` times the largest
/// `exp(Φ(u)) / max(‖u‖, 1)` over `u = ±2^k e_i` and `2^k (1,…,1)/√m`, `k < 11`.
pub fn envelope_constant(family: &MeasureFamily) -> Result<f64> {
    let m = family.dim();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..m {
        for s in [-1.0, 1.0] {
            let mut e = vec![0.0; m];
            e[i] = s;
            dirs.push(e);
        }
    }
    dirs.push(vec![1.0 / (m as f64).sqrt(); m]);
    let mut best = f64::NEG_INFINITY;
    for k in 0..11 {
        let r = (1u32 << k) as f64;
        for d in &dirs {
            let u: Vec<f64> = d.iter().map(|x| x * r).collect();
            let phi = family.measure(&u)?.log_potential(0.0);
            best = best.max(phi - r.max(1.0).ln());
        }
    }
    Ok(ENVELOPE_SAFETY * best.exp())
}

fn envelope(c: f64, alpha: f64, r: f64) -> f64 {
    (c * r.max(1.0)).ln() - alpha * r * r
}

/// Smallest radius beyond which the envelope stays below `incumbent`.
fn search_radius(c: f64, alpha: f64, incumbent: f64) -> Result<f64> {
    // The envelope decreases for r >= max(1, 1/sqrt(2α)).
    let r0 = 1.0f64.max((0.5 / alpha).sqrt());
    if envelope(c, alpha, r0) < incumbent {
        return Ok(r0);
    }
    let mut hi = r0;
    while envelope(c, alpha, hi) >= incumbent {
        hi *= 2.0;
        if hi > MAX_SEARCH_RADIUS {
            return Err(Error::UnboundedDomainNoDecay(MAX_SEARCH_RADIUS));
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if envelope(c, alpha, mid) >= incumbent {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn points_per_axis(m: usize) -> usize {
    let cap = (MAX_GRID_EVALUATIONS as f64).powf(1.0 / m as f64).floor() as usize;
    GRID_POINTS.min(cap).max(3)
}

fn axis_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Objective with infeasible points mapped to `-∞`.
struct Objective<'a> {
    prob: &'a VarProblem,
    /// `Some(ε)` restricts to `G_{+ε}` (`ε = 0` is `G` itself).
    good: Option<f64>,
}

impl Objective<'_> {
    fn eval(&self, u: &[f64]) -> Result<f64> {
        if !self.prob.domain.contains(u) {
            return Ok(f64::NEG_INFINITY);
        }
        let mu = self.prob.family.measure(u)?;
        if let Some(eps) = self.good {
            let l = mu.left_edge();
            if l < 2.0 * eps - edge_tolerance(l) {
                return Ok(f64::NEG_INFINITY);
            }
        }
        Ok(mu.log_potential(0.0) - self.prob.alpha * norm2(u))
    }

    /// Best point on the tensor grid over `ranges`.
    fn grid(&self, ranges: &[(f64, f64)], n: usize) -> Result<(Vec<f64>, f64, usize)> {
        let axes: Vec<Vec<f64>> = ranges.iter().map(|&(lo, hi)| axis_points(lo, hi, n)).collect();
        let total: usize = axes.iter().map(|a| a.len()).product();
        let point = |mut idx: usize| -> Vec<f64> {
            axes.iter()
                .map(|a| {
                    let x = a[idx % a.len()];
                    idx /= a.len();
                    x
                })
                .collect()
        };
        let vals = map_indexed(total, |k| self.eval(&point(k)));
        let mut best = (Vec::new(), f64::NEG_INFINITY);
        for (k, v) in vals.into_iter().enumerate() {
            let v = v?;
            if v > best.1 {
                best = (point(k), v);
            }
        }
        Ok((best.0, best.1, total))
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[a, b]`; `hint` is a point known to
/// be feasible, used to break ties between two infeasible probes.
fn golden(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, hint: f64, evals: &mut usize) -> Result<(f64, f64)> {
    let tol = 1e-11 * (1.0 + a.abs().max(b.abs()));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    *evals += 2;
    while b - a > tol {
        let left = if fc == fd && fc == f64::NEG_INFINITY { hint < 0.5 * (c + d) } else { fc >= fd };
        if left {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        *evals += 1;
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [a, b] {
        let v = f(x)?;
        *evals += 1;
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// Coarse grid followed by cyclic golden-section refinement, one coordinate at
/// a time within one grid cell of the incumbent.
fn maximize(obj: &Objective<'_>, ranges: &[(f64, f64)]) -> Result<(Vec<f64>, f64, usize)> {
    let n = points_per_axis(ranges.len());
    let (mut u, mut v, mut evals) = obj.grid(ranges, n)?;
    if v == f64::NEG_INFINITY {
        return Ok((u, v, evals));
    }
    let cells: Vec<f64> = ranges.iter().map(|&(lo, hi)| (hi - lo) / (n - 1) as f64).collect();
    for _ in 0..50 {
        let before = v;
        for k in 0..u.len() {
            if cells[k] == 0.0 {
                continue;
            }
            let a = (u[k] - cells[k]).max(ranges[k].0);
            let b = (u[k] + cells[k]).min(ranges[k].1);
            let base = u.clone();
            let g = |t: f64| {
                let mut w = base.clone();
                w[k] = t;
                obj.eval(&w)
            };
            let (t, gv) = golden(&g, a, b, u[k], &mut evals)?;
            if gv > v {
                u[k] = t;
                v = gv;
            }
        }
        if v - before <= 1e-14 * (1.0 + v.abs()) {
            break;
        }
    }
    Ok((u, v, evals))
}

/// Finds a feasible incumbent on growing cubes `[-4^k, 4^k]^m ∩ D`.
fn probe_incumbent(obj: &Objective<'_>) -> Result<Option<(Vec<f64>, f64, usize)>> {
    let m = obj.prob.dim();
    let mut evals = 0;
    for k in 0..9 {
        let r = 4f64.powi(k);
        let ranges: Option<Vec<(f64, f64)>> = (0..m)
            .map(|i| {
                let (lo, hi) = obj.prob.domain.coord_range(i);
                let (lo, hi) = (lo.max(-r), hi.min(r));
                (lo <= hi).then_some((lo, hi))
            })
            .collect();
        let Some(ranges) = ranges else { continue };
        let (u, v, e) = obj.grid(&ranges, 21)?;
        evals += e;
        if v > f64::NEG_INFINITY {
            return Ok(Some((u, v, evals)));
        }
    }
    Ok(None)
}

fn solve_with(obj: &Objective<'_>, c: f64) -> Result<Option<VarSolution>> {
    let Some((u0, v0, e0)) = probe_incumbent(obj)? else { return Ok(None) };
    let r = search_radius(c, obj.prob.alpha, v0)?;
    let ranges: Vec<(f64, f64)> = (0..obj.prob.dim())
        .map(|i| {
            let (lo, hi) = obj.prob.domain.coord_range(i);
            (lo.max(-r), hi.min(r))
        })
        .collect();
    let (mut u, mut v, e) = maximize(obj, &ranges)?;
    if v0 > v {
        (u, v) = (u0, v0);
    }
    Ok(Some(VarSolution { u, value: v, radius: r, envelope_c: c, evaluations: e0 + e }))
}

/// `sup_{u ∈ D} S_α[u]`, searched over the ball where the envelope can still
/// beat a probed incumbent.
pub fn solve_unrestricted(prob: &VarProblem) -> Result<VarSolution> {
    prob.validate()?;
    let c = envelope_constant(&prob.family)?;
    solve_with(&Objective { prob, good: None }, c)?.ok_or_else(|| Error::spec("domain has no probed point with finite S_alpha"))
}

/// One step of the inner approximation.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub eps: f64,
    pub u: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictedSolution {
    /// Maximizer over `D ∩ G`.
    pub solution: VarSolution,
    /// Maximizers over `D ∩ G_{+ε}` for `ε = 1, 1/2, …`, largest first.
    pub trace: Vec<TraceRow>,
}

impl RestrictedSolution {
    /// Whether the trace values are nondecreasing as `ε` shrinks, up to `tol`,
    /// and stay below the final value.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.trace.windows(2).all(|w| w[1].value >= w[0].value - tol)
            && self.trace.iter().all(|r| r.value <= self.solution.value + tol)
    }
}

/// `sup_{u ∈ D ∩ G} S_α[u]` via the inner approximations `G_{+ε}`, `ε ↓ 0`.
pub fn solve_restricted(prob: &VarProblem) -> Result<RestrictedSolution> {
    prob.validate()?;
    let c = envelope_constant(&prob.family)?;
    if probe_incumbent(&Objective { prob, good: Some(1.0) })?.is_none() {
        return Err(Error::EmptyGoodSet);
    }
    let mut trace = Vec::new();
    for k in 0..=RESTRICTED_EPS_STEPS {
        let eps = 0.5f64.powi(k as i32);
        if let Some(s) = solve_with(&Objective { prob, good: Some(eps) }, c)? {
            trace.push(TraceRow { eps, u: s.u, value: s.value });
        }
    }
    let solution = solve_with(&Objective { prob, good: Some(0.0) }, c)?.ok_or(Error::EmptyGoodSet)?;
    Ok(RestrictedSolution { solution, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proto(alpha: f64, domain: Domain) -> VarProblem {
        VarProblem::new(MeasureFamily::shifted_semicircle(), alpha, domain).unwrap()
    }

    #[test]
    fn s_alpha_values() {
        let p = proto(0.5, Domain::whole());
        assert!((s_alpha(&p, &[0.0]).unwrap() + 0.5).abs() < 1e-9);
        assert!((s_alpha(&p, &[1.0]).unwrap() + 0.75).abs() < 1e-9);
    }

    #[test]
    fn membership_classes() {
        let p = proto(0.5, Domain::whole());
        assert_eq!(good_set_membership(&p, &[2.0], 0.1).unwrap().class, GoodSetClass::InG);
        assert_eq!(good_set_membership(&p, &[2.2], 0.1).unwrap().class, GoodSetClass::InGPlusEps);
        assert_eq!(good_set_membership(&p, &[0.0], 0.1).unwrap().class, GoodSetClass::Outside);
        assert_eq!(good_set_membership(&p, &[1.95], 0.1).unwrap().class, GoodSetClass::InGMinusEps);
    }

    #[test]
    fn point_domain() {
        let p = proto(0.5, Domain::point(&[3.0]));
        let s = solve_unrestricted(&p).unwrap();
        assert_eq!(s.u, vec![3.0]);
        assert!((s.value - s_alpha(&p, &[3.0]).unwrap()).abs() < 1e-15);
    }
}

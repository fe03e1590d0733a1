//! Regularized logarithms and their convex/concave decompositions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `log|λ + iη| = ½ log(λ² + η²)`.
pub fn log_eta(lambda: f64, eta: f64) -> f64 {
    let (a, b) = (lambda.abs(), eta.abs());
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big == 0.0 {
        return f64::NEG_INFINITY;
    }
    if big.is_infinite() {
        return f64::INFINITY;
    }
    let r = small / big;
    big.ln() + 0.5 * (r * r).ln_1p()
}

/// `min(log_η(λ), log_η(K))`.
pub fn log_eta_k(lambda: f64, eta: f64, k: f64) -> f64 {
    log_eta(lambda, eta).min(log_eta(k, eta))
}

/// Regularization parameters `(η, K)` with an optional energy shift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegLogParams {
    pub eta: f64,
    pub k: f64,
    #[serde(default)]
    pub shift: Option<f64>,
}

impl RegLogParams {
    pub fn new(eta: f64, k: f64) -> Result<Self> {
        if !(eta > 0.0 && k > eta) {
            return Err(Error::param(format!("need 0 < eta < K, got eta={eta}, K={k}")));
        }
        Ok(Self { eta, k, shift: None })
    }

    pub fn with_shift(mut self, e: f64) -> Self {
        self.shift = Some(e);
        self
    }

    pub fn log_eta(&self, lambda: f64) -> f64 {
        log_eta(lambda - self.shift.unwrap_or(0.0), self.eta)
    }

    pub fn log_eta_k(&self, lambda: f64) -> f64 {
        log_eta_k(lambda - self.shift.unwrap_or(0.0), self.eta, self.k)
    }
}

/// The `N`-dependent parameter cascade driven by a single control `κ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub kappa: f64,
    pub n: usize,
    pub eta: f64,
    pub t: f64,
    pub w_b: f64,
    pub p_b: f64,
    pub epsilon: f64,
    /// `log K = N^ε`; `K` itself overflows quickly.
    pub log_k: f64,
}

impl Schedule {
    pub const DEFAULT_KAPPA: f64 = 0.1;

    pub fn new(n: usize, kappa: f64) -> Result<Self> {
        if n == 0 || !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::param(format!("schedule needs N >= 1 and kappa in (0,1), got N={n}, kappa={kappa}")));
        }
        let nf = n as f64;
        let epsilon = kappa * kappa / 16.0;
        Ok(Self {
            kappa,
            n,
            eta: nf.powf(-kappa / 2.0),
            t: nf.powf(-kappa / 4.0),
            w_b: nf.powf(-kappa / 4.0),
            p_b: nf.powf(-kappa * kappa / 8.0),
            epsilon,
            log_k: nf.powf(epsilon),
        })
    }

    pub fn reg_log(&self) -> Result<RegLogParams> {
        RegLogParams::new(self.eta, self.log_k.exp())
    }
}

/// Splits `log_η^K` into one convex and two concave pieces, each
/// `1/(2η)`-Lipschitz.
pub fn convex3_pieces(lambda: f64, eta: f64, k: f64) -> (f64, f64, f64) {
    let c = 0.5 / eta;
    let l_eta = log_eta(eta, eta);
    let x = lambda;
    let log1 = if x <= -eta {
        -c * x - 0.5 + l_eta
    } else if x >= eta {
        c * x - 0.5 + l_eta
    } else {
        log_eta(x, eta)
    };
    let log2 = if x <= eta { c * x } else { log_eta_k(x, eta, k) + 0.5 - l_eta };
    let log3 = if x >= -eta { -c * x } else { log_eta_k(x, eta, k) + 0.5 - l_eta };
    (log1, log2, log3)
}

/// Five-piece decomposition of `x ↦ log_η^K(x² - E)` into convex and concave
/// parts. Built once per `(E, η, K)`, evaluated pointwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Convex5 {
    /// `E <= 0`: one convex piece and two concave ones; the last two vanish.
    NonPositive { e: f64, eta: f64, k: f64, b: f64, c: f64 },
    /// `E > 0`: inflection points `b_n < √E < b_f`.
    Positive { e: f64, eta: f64, k: f64, b_n: f64, b_f: f64, c1: f64, c3: f64 },
}

fn inflection_cubic(y: f64, e: f64, eta: f64) -> f64 {
    ((y - e) * y - (e * e + 3.0 * eta * eta)) * y + e * (e * e + eta * eta)
}

/// Finds the sign change of `p` from `<= 0` to `> 0` in `[lo, hi]`.
fn bisect_up(p: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl Convex5 {
    pub fn new(e: f64, eta: f64, k: f64) -> Result<Self> {
        if !(eta > 0.0 && k > eta) {
            return Err(Error::param(format!("need 0 < eta < K, got eta={eta}, K={k}")));
        }
        let p = |y: f64| inflection_cubic(y, e, eta);
        let too_large = |reason: &str| Error::EtaTooLarge { energy: e, reason: reason.to_string() };
        let f = |x: f64| log_eta(x * x - e, eta);
        let cap = log_eta(k, eta);
        if e <= 0.0 {
            let lo = -e;
            let mut hi = lo + eta + 1.0;
            while p(hi) <= 0.0 {
                hi *= 2.0;
            }
            let b = bisect_up(p, lo, hi).sqrt();
            if f(b) > cap {
                return Err(too_large("K below the value at the inflection point"));
            }
            let c = fprime(b, e, eta);
            return Ok(Convex5::NonPositive { e, eta, k, b, c });
        }
        // p(0) > 0 > p(E): b_n² in (0, E); p increases again past b_f² > E.
        let bn2 = bisect_up(|y| -p(y), 0.0, e);
        let mut hi = 2.0 * e + eta + 1.0;
        while p(hi) <= 0.0 {
            hi *= 2.0;
        }
        let bf2 = bisect_up(p, e, hi);
        let (b_n, b_f) = (bn2.sqrt(), bf2.sqrt());
        if !(b_n > 0.0 && b_n < e.sqrt() && b_f > e.sqrt()) {
            return Err(too_large("inflection points not ordered"));
        }
        if f(0.0).max(f(b_f)) > cap {
            return Err(too_large("K below the values on [0, b_f]"));
        }
        // c3 grows with c1, so when η is not small relative to E the default
        // c1 = 100E²/η² is raised until the outer slope dominates f'(b_f).
        let mut c1 = (100.0 * e * e / (eta * eta)).max(-fprime(b_n, e, eta));
        let need = (fprime(b_f, e, eta) * b_f - f(b_n) - f(b_f)) / b_n;
        if c1 < need {
            c1 = need * (1.0 + 1e-12);
        }
        let c3 = (c1 * b_n + f(b_n) + f(b_f)) / b_f;
        Ok(Convex5::Positive { e, eta, k, b_n, b_f, c1, c3 })
    }

    /// Pieces in the order (convex or concave as documented on each variant).
    pub fn pieces(&self, x: f64) -> [f64; 5] {
        match *self {
            Convex5::NonPositive { e, eta, k, b, c } => {
                let f = |x: f64| log_eta(x * x - e, eta);
                let g = |x: f64| log_eta_k(x * x - e, eta, k);
                let fb = f(b);
                let l1 = if x.abs() <= b { f(x) } else { fb + c * (x.abs() - b) };
                let l2 = |x: f64| if x <= b { c * x } else { g(x) + c * b - fb };
                [l1, l2(x), l2(-x), 0.0, 0.0]
            }
            Convex5::Positive { e, eta, k, b_n, b_f, c1, c3 } => {
                let f = |x: f64| log_eta(x * x - e, eta);
                let g = |x: f64| log_eta_k(x * x - e, eta, k);
                let (fn_, ff) = (f(b_n), f(b_f));
                let l1 = if x.abs() <= b_n { f(x) } else { fn_ - c1 * (x.abs() - b_n) };
                let l2 = |x: f64| {
                    if x <= b_n {
                        fn_ - c1 * (x - b_n)
                    } else if x <= b_f {
                        f(x)
                    } else {
                        ff + c3 * (x - b_f)
                    }
                };
                let l3 = |x: f64| if x <= b_f { ff + c3 * (x - b_f) } else { g(x) };
                [l1, l2(x), l2(-x), l3(x), l3(-x)]
            }
        }
    }

    /// `+1` for a convex piece, `-1` for a concave one, `0` for a vanishing one.
    pub fn curvature_signs(&self) -> [i8; 5] {
        match self {
            Convex5::NonPositive { .. } => [1, -1, -1, 0, 0],
            Convex5::Positive { .. } => [-1, 1, 1, -1, -1],
        }
    }

    /// A Lipschitz constant valid for every piece.
    pub fn lipschitz_bound(&self) -> f64 {
        match *self {
            Convex5::NonPositive { eta, c, .. } => c.max(1.0 / eta),
            // |f'(x)| <= |x|/η, and the linear pieces use slopes c1, c3.
            Convex5::Positive { eta, b_f, c1, c3, .. } => c1.max(c3).max(b_f / eta),
        }
    }

    /// `c1 b_n + f(b_n) - c3 b_f + f(b_f)`; zero up to rounding by construction.
    pub fn constraint_residual(&self) -> Option<f64> {
        match *self {
            Convex5::Positive { e, eta, b_n, b_f, c1, c3, .. } => {
                Some(c1 * b_n + log_eta(b_n * b_n - e, eta) - c3 * b_f + log_eta(b_f * b_f - e, eta))
            }
            Convex5::NonPositive { .. } => None,
        }
    }

    pub fn inflection_points(&self) -> (f64, f64) {
        match *self {
            Convex5::NonPositive { b, .. } => (b, b),
            Convex5::Positive { b_n, b_f, .. } => (b_n, b_f),
        }
    }
}

/// Derivative of `x ↦ log_η(x² - E)`.
fn fprime(x: f64, e: f64, eta: f64) -> f64 {
    let t = x * x - e;
    2.0 * x * t / (t * t + eta * eta)
}

/// Convenience wrapper returning the five pieces at `x`.
pub fn convex5_pieces(x: f64, e: f64, eta: f64, k: f64) -> Result<[f64; 5]> {
    Ok(Convex5::new(e, eta, k)?.pieces(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_eta_values() {
        assert!((log_eta(0.0, 0.1) - 0.1f64.ln()).abs() < 1e-15);
        assert!((log_eta_k(1e9, 0.1, 100.0) - 0.5 * (1e4f64 + 0.01).ln()).abs() < 1e-12);
        assert!((log_eta(1.0, 0.01) - 0.5 * 1.0001f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn convex3_at_zero() {
        let (a, b, c) = convex3_pieces(0.0, 0.1, 10.0);
        assert!((a - 0.1f64.ln()).abs() < 1e-15);
        assert_eq!((b, c), (0.0, 0.0));
    }

    #[test]
    fn schedule_matches_kappa() {
        let s = Schedule::new(10_000, 0.1).unwrap();
        assert!((s.eta - 10_000f64.powf(-0.05)).abs() < 1e-15);
        assert!((s.epsilon - 0.01 / 16.0).abs() < 1e-18);
        assert!(s.reg_log().unwrap().k > s.eta);
    }

    #[test]
    fn convex5_inflection_points_approach_sqrt_e() {
        let mut prev: Option<(f64, f64)> = None;
        for eta in [1e-2, 1e-3, 1e-4] {
            let d = Convex5::new(1.0, eta, 1e6).unwrap();
            let (bn, bf) = d.inflection_points();
            assert!(bn < 1.0 && 1.0 < bf);
            if let Some((pn, pf)) = prev {
                assert!(bn > pn && bf < pf);
            }
            prev = Some((bn, bf));
        }
    }
}

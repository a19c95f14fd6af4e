//! Level-set intervals between boundary crossings and their candidate
//! frequencies (interval midpoints or maximizers of Hermite cubics).

use core::f64::consts::TAU;

use crate::prelude::*;
use crate::system::{Domain, Frequency};
use crate::transfer::GainEvaluator;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Midpoint,
    Cubic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSetInterval {
    pub lo: Frequency,
    pub hi: Frequency,
    /// Discrete wrap-around interval `[θ_l, θ_0 + 2π]`.
    pub wraps: bool,
    pub candidate: Option<Frequency>,
    pub candidate_gain: Option<f64>,
    pub scheme: Scheme,
    pub below_curve: bool,
}

impl LevelSetInterval {
    fn new(lo: Frequency, hi: Frequency, wraps: bool) -> Self {
        Self { lo, hi, wraps, candidate: None, candidate_gain: None, scheme: Scheme::Midpoint, below_curve: false }
    }

    /// Upper end in unwrapped coordinates (`hi + 2π` for the wrap interval).
    pub fn hi_unwrapped(&self) -> f64 {
        if self.wraps {
            self.hi.value + TAU
        } else {
            self.hi.value
        }
    }

    pub fn width(&self) -> f64 {
        self.hi_unwrapped() - self.lo.value
    }
}

/// Consecutive intervals between sorted crossings; the discrete case adds the
/// wrap-around interval. Crossings closer than `1e-12 · max(1, span)` are
/// collapsed first. Fewer than two crossings give no intervals.
pub fn build_intervals(crossings: &[f64], domain: Domain) -> Vec<LevelSetInterval> {
    if crossings.len() < 2 {
        return Vec::new();
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    let tol = 1e-12 * span.max(1.0);
    let mut pts: Vec<f64> = Vec::with_capacity(crossings.len());
    for &c in crossings {
        if pts.last().is_none_or(|&l| c - l > tol) {
            pts.push(c);
        }
    }
    if domain == Domain::Discrete && pts.len() >= 2 && pts[0] + TAU - pts[pts.len() - 1] <= tol {
        pts.pop();
    }
    if pts.len() < 2 {
        return Vec::new();
    }
    let f = |x: f64| Frequency::new(domain, x);
    let mut out: Vec<LevelSetInterval> = pts.windows(2).map(|w| LevelSetInterval::new(f(w[0]), f(w[1]), false)).collect();
    if domain == Domain::Discrete {
        out.push(LevelSetInterval::new(f(pts[pts.len() - 1]), f(pts[0]), true));
    }
    out
}

/// Arithmetic midpoint in unwrapped coordinates, reduced for angles.
pub fn midpoint_candidate(interval: &LevelSetInterval, domain: Domain) -> Frequency {
    Frequency::new(domain, 0.5 * (interval.lo.value + interval.hi_unwrapped()))
}

/// Hermite cubic `c(t) = c3 t³ + c2 t² + c1 t + c0` in the shifted variable
/// `t = ω - lo`, `t ∈ [0, width]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicInterpolant {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    pub interval_width: f64,
}

impl CubicInterpolant {
    pub fn hermite(width: f64, g_lo: f64, g_hi: f64, gp_lo: f64, gp_hi: f64) -> Self {
        let h = width;
        let slope = (g_hi - g_lo) / h;
        Self { c3: (gp_lo + gp_hi - 2.0 * slope) / (h * h), c2: (3.0 * slope - 2.0 * gp_lo - gp_hi) / h, c1: gp_lo, c0: g_lo, interval_width: h }
    }

    pub fn eval(&self, t: f64) -> f64 {
        ((self.c3 * t + self.c2) * t + self.c1) * t + self.c0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        (3.0 * self.c3 * t + 2.0 * self.c2) * t + self.c1
    }

    pub fn is_degenerate(&self) -> bool {
        let scale = 1e-14 * self.c1.abs().max(self.c0.abs()).max(1.0);
        self.c3.abs() < scale && self.c2.abs() < scale
    }

    /// Maximizer over `[0, width]`, or `None` for a degenerate interpolant.
    /// Ties go to an interior point, then to `t = 0`.
    pub fn argmax(&self) -> Option<f64> {
        if self.is_degenerate() {
            return None;
        }
        let h = self.interval_width;
        let mut interior: Vec<f64> = Vec::with_capacity(2);
        for t in quadratic_roots(3.0 * self.c3, 2.0 * self.c2, self.c1) {
            if t > 0.0 && t < h {
                interior.push(t);
            }
        }
        let tie = |v: f64| 1e-14 * v.abs().max(1.0);
        let mut best: Option<(f64, f64)> = None;
        for &t in &interior {
            let v = self.eval(t);
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((t, v));
            }
        }
        for t in [0.0, h] {
            let v = self.eval(t);
            match best {
                None => best = Some((t, v)),
                Some((bt, bv)) => {
                    let interior_best = bt > 0.0 && bt < h;
                    if v > bv + if interior_best { tie(bv) } else { 0.0 } {
                        best = Some((t, v));
                    }
                }
            }
        }
        best.map(|b| b.0)
    }
}

/// Real roots of `a t² + b t + c`, computed without cancellation.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Maximizer of the Hermite cubic through the endpoint data; the midpoint
/// when the cubic is degenerate.
pub fn cubic_candidate(interval: &LevelSetInterval, domain: Domain, g_lo: f64, g_hi: f64, gp_lo: f64, gp_hi: f64) -> Frequency {
    let cubic = CubicInterpolant::hermite(interval.width(), g_lo, g_hi, gp_lo, gp_hi);
    match cubic.argmax() {
        Some(t) => Frequency::new(domain, interval.lo.value + t),
        None => midpoint_candidate(interval, domain),
    }
}

/// Computes candidates per `scheme`, evaluates their gains once each, keeps
/// the intervals whose candidate reaches `gamma` and sorts them by candidate
/// gain, best first. Intervals whose evaluation fails are dropped.
pub fn classify_and_rank(eval: &GainEvaluator<'_>, intervals: Vec<LevelSetInterval>, gamma: f64, scheme: Scheme, threads: usize) -> Vec<LevelSetInterval> {
    let domain = eval.system().domain();
    let mut intervals = intervals;
    match scheme {
        Scheme::Midpoint => {
            for iv in intervals.iter_mut() {
                iv.candidate = Some(midpoint_candidate(iv, domain));
                iv.scheme = Scheme::Midpoint;
            }
        }
        Scheme::Cubic => {
            // endpoint data, each distinct endpoint evaluated once
            let mut ends: Vec<f64> = intervals.iter().flat_map(|iv| [iv.lo.value, iv.hi.value]).collect();
            ends.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
            ends.dedup();
            let data = crate::par::map(&ends, threads, |&w| eval.derivatives(Frequency::new(domain, w), false).ok());
            let lookup = |w: f64| ends.iter().position(|&e| e == w).and_then(|k| data[k]);
            for iv in intervals.iter_mut() {
                match (lookup(iv.lo.value), lookup(iv.hi.value)) {
                    (Some(a), Some(b)) if a.simple && b.simple => {
                        iv.candidate = Some(cubic_candidate(iv, domain, a.value, b.value, a.first, b.first));
                        iv.scheme = Scheme::Cubic;
                    }
                    _ => {
                        iv.candidate = Some(midpoint_candidate(iv, domain));
                        iv.scheme = Scheme::Midpoint;
                    }
                }
            }
        }
    }
    let gains = crate::par::map(&intervals, threads, |iv| eval.gain(iv.candidate.unwrap()).ok());
    let mut kept: Vec<LevelSetInterval> = intervals
        .into_iter()
        .zip(gains)
        .filter_map(|(mut iv, g)| {
            let g = g?;
            iv.candidate_gain = Some(g);
            iv.below_curve = g >= gamma;
            iv.below_curve.then_some(iv)
        })
        .collect();
    kept.sort_by(|a, b| b.candidate_gain.partial_cmp(&a.candidate_gain).unwrap_or(core::cmp::Ordering::Equal));
    kept
}

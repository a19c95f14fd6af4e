//! Safeguarded Newton / secant maximization of the gain along frequency.
//!
//! Both modes keep a bracket known to contain a local maximizer and only
//! accept iterates that increase the gain (ties only when closer to
//! stationarity). Rejected or out-of-bracket steps fall back to bisection.

use crate::error::Result;
use crate::prelude::*;
use crate::system::{Domain, Frequency};
use crate::transfer::GainEvaluator;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Newton,
    Secant,
    /// Newton when `min(m, p) ≤ dims_threshold`, secant otherwise.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    pub opt_tol: f64,
    pub max_iters: usize,
    /// First secant step, relative to `max(1, |x0|)`.
    pub secant_h0: f64,
    pub dims_threshold: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { method: Method::Auto, opt_tol: 1e-14, max_iters: 100, secant_h0: 1e-6, dims_threshold: 64 }
    }
}

impl OptimizerConfig {
    fn uses_newton(&self, eval: &GainEvaluator<'_>) -> bool {
        match self.method {
            Method::Newton => true,
            Method::Secant => false,
            Method::Auto => {
                let sys = eval.system();
                sys.m().min(sys.p()) <= self.dims_threshold
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalMaximum {
    pub frequency: Frequency,
    pub gain: f64,
    pub iterations: usize,
    pub converged: bool,
    pub at_box_edge: bool,
    /// Accepted iterates `(x, g(x))` in unwrapped coordinates, starting point first.
    pub trace: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug)]
struct Point {
    x: f64,
    g: f64,
    d1: f64,
    d2: Option<f64>,
}

/// Gain and derivatives at `x`. A non-simple `σ₁` is retried once at a
/// slightly perturbed point; `None` if that fails too.
fn probe(eval: &GainEvaluator<'_>, x: f64, newton: bool, limits: (f64, f64)) -> Result<Option<Point>> {
    let domain = eval.system().domain();
    let at = |x: f64| eval.derivatives(Frequency::new(domain, x), newton);
    let d = at(x)?;
    if d.simple {
        return Ok(Some(Point { x, g: d.value, d1: d.first, d2: d.second }));
    }
    let h = 1e-10 * x.abs().max(1.0);
    let y = if x + h <= limits.1 { x + h } else { x - h };
    if y < limits.0 {
        return Ok(None);
    }
    let d = at(y)?;
    Ok(d.simple.then_some(Point { x: y, g: d.value, d1: d.first, d2: d.second }))
}

fn ulp_scale(x: f64) -> f64 {
    4.0 * f64::EPSILON * x.abs().max(1.0)
}

/// Maximizes the gain over `[lo, hi]` (unwrapped coordinates) from `x0`.
pub fn maximize_boxed(eval: &GainEvaluator<'_>, interval: (f64, f64), x0: f64, cfg: &OptimizerConfig) -> Result<LocalMaximum> {
    let (lo, hi) = interval;
    run(eval, x0.clamp(lo, hi), Some((lo, hi)), cfg)
}

/// Maximizes the gain from `x0` without constraints; each step moves at most
/// `10 · (1 + |x0|)` (and at most `π` for angles).
pub fn maximize_unconstrained(eval: &GainEvaluator<'_>, x0: f64, cfg: &OptimizerConfig) -> Result<LocalMaximum> {
    run(eval, x0, None, cfg)
}

fn run(eval: &GainEvaluator<'_>, x0: f64, bounds: Option<(f64, f64)>, cfg: &OptimizerConfig) -> Result<LocalMaximum> {
    let domain = eval.system().domain();
    let newton = cfg.uses_newton(eval);
    let mut cap = 10.0 * (1.0 + x0.abs());
    if domain == Domain::Discrete {
        cap = cap.min(core::f64::consts::PI);
    }
    let limits = bounds.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let (mut a, mut b) = bounds.unwrap_or((x0 - cap, x0 + cap));

    let mut cur = match probe(eval, x0, newton, limits)? {
        Some(p) => p,
        None => {
            let g = eval.gain(Frequency::new(domain, x0))?;
            return Ok(LocalMaximum { frequency: Frequency::new(domain, x0), gain: g, iterations: 0, converged: false, at_box_edge: false, trace: vec![(x0, g)] });
        }
    };
    let mut prev: Option<Point> = None;
    let mut trace = vec![(cur.x, cur.g)];
    let mut iterations = 0;
    let mut converged = false;
    let mut at_box_edge = false;
    let mut force_bisect = false;
    let mut edge_tried = (false, false);

    while iterations < cfg.max_iters {
        if cur.d1.abs() <= cfg.opt_tol * cur.g.max(1.0) {
            converged = true;
            break;
        }
        if let Some((lo, hi)) = bounds {
            if (cur.x <= lo && cur.d1 < 0.0) || (cur.x >= hi && cur.d1 > 0.0) {
                converged = true;
                at_box_edge = true;
                break;
            }
        }
        if cur.d1 > 0.0 {
            a = a.max(cur.x);
            if bounds.is_none() && b - cur.x < 1e-3 * cap {
                b = cur.x + cap;
            }
        } else {
            b = b.min(cur.x);
            if bounds.is_none() && cur.x - a < 1e-3 * cap {
                a = cur.x - cap;
            }
        }
        if b - a <= ulp_scale(cur.x) {
            converged = true;
            break;
        }
        let dir = cur.d1.signum();
        let curvature = if newton { cur.d2 } else { None }.or_else(|| {
            prev.and_then(|p| {
                let c = (cur.d1 - p.d1) / (cur.x - p.x);
                c.is_finite().then_some(c)
            })
        });
        // the model predicts no gain increase representable in floating point
        if let Some(c) = curvature.filter(|&c| c < 0.0) {
            if cur.d1 * cur.d1 / (-2.0 * c) <= f64::EPSILON * cur.g.max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
        iterations += 1;
        let mut t = if force_bisect {
            0.5 * (a + b)
        } else if !newton && prev.is_none() {
            cur.x + dir * cfg.secant_h0 * cur.x.abs().max(1.0)
        } else {
            match curvature {
                Some(c) if c < 0.0 => {
                    let step = (-cur.d1 / c).clamp(-cap, cap);
                    cur.x + step
                }
                // no usable model: head for the bracket end uphill
                _ => {
                    if dir > 0.0 {
                        b
                    } else {
                        a
                    }
                }
            }
        };
        if t >= b || t <= a {
            let edge_hi = bounds.is_some_and(|(_, hi)| b >= hi) && t >= b && !edge_tried.1;
            let edge_lo = bounds.is_some_and(|(lo, _)| a <= lo) && t <= a && !edge_tried.0;
            if edge_hi {
                t = b;
                edge_tried.1 = true;
            } else if edge_lo {
                t = a;
                edge_tried.0 = true;
            } else {
                t = 0.5 * (a + b);
            }
        }
        force_bisect = false;
        if (t - cur.x).abs() <= ulp_scale(cur.x) {
            converged = true;
            break;
        }
        match probe(eval, t, newton, limits) {
            // a tie in g (flat to rounding) is accepted when it is more stationary
            Ok(Some(p)) if p.g > cur.g || (p.g == cur.g && p.d1.abs() < cur.d1.abs()) => {
                prev = Some(cur);
                cur = p;
                trace.push((cur.x, cur.g));
            }
            _ => {
                if t > cur.x {
                    b = t;
                } else {
                    a = t;
                }
                force_bisect = true;
            }
        }
    }
    Ok(LocalMaximum { frequency: Frequency::new(domain, cur.x), gain: cur.g, iterations, converged, at_box_edge, trace })
}

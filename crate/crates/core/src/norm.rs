//! Global H∞ norm drivers (level-set iterations with optional local
//! optimization) and the seed-only local approximation.

use core::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::levelset::{build_intervals, classify_and_rank, LevelSetInterval, Scheme};
use crate::optim1d::{maximize_boxed, maximize_unconstrained, Method, OptimizerConfig};
use crate::pencil::{boundary_eigenvalues, build_pencil_guarded, BoundaryCrossing, DEFAULT_BAND_TOL};
use crate::prelude::*;
use crate::system::{filter_spectrum, initial_frequencies, sparse_seed_frequencies, Domain, Frequency, StateSpaceSystem, Storage, DEFAULT_TOL_CTRB, SPARSE_SEED_COUNT};
use crate::transfer::GainEvaluator;

/// Largest offset, as a power of two times `max(1, |ω|)`, sampled beyond the
/// outermost crossing when the level is below `‖D‖₂`.
const END_SAMPLE_DOUBLINGS: i32 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Level-set iteration on interval midpoints.
    BBBS,
    /// Level-set iteration on cubic-interpolant maximizers.
    Cubic,
    HybridNewtonInterp,
    HybridNewtonMP,
    HybridSecantInterp,
    HybridSecantMP,
    /// Local optimization from the seeds only, no certificate.
    LocalOnly,
}

impl Variant {
    /// The six variants that end with a level-set certificate.
    pub const EXACT: [Variant; 6] =
        [Variant::BBBS, Variant::Cubic, Variant::HybridNewtonInterp, Variant::HybridNewtonMP, Variant::HybridSecantInterp, Variant::HybridSecantMP];

    pub fn name(self) -> &'static str {
        match self {
            Variant::BBBS => "bbbs",
            Variant::Cubic => "cubic",
            Variant::HybridNewtonInterp => "hybrid-newton-interp",
            Variant::HybridNewtonMP => "hybrid-newton-mp",
            Variant::HybridSecantInterp => "hybrid-secant-interp",
            Variant::HybridSecantMP => "hybrid-secant-mp",
            Variant::LocalOnly => "local-only",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::EXACT.into_iter().chain([Variant::LocalOnly]).find(|v| v.name() == s)
    }

    fn scheme(self) -> Scheme {
        match self {
            Variant::BBBS | Variant::HybridNewtonMP | Variant::HybridSecantMP => Scheme::Midpoint,
            _ => Scheme::Cubic,
        }
    }

    /// Optimizer method for the hybrid variants, `None` for the pure level-set ones.
    fn optimizer(self, cfg: &OptimizerConfig) -> Option<OptimizerConfig> {
        let method = match self {
            Variant::BBBS | Variant::Cubic => return None,
            Variant::HybridNewtonInterp | Variant::HybridNewtonMP => Method::Newton,
            Variant::HybridSecantInterp | Variant::HybridSecantMP => Method::Secant,
            Variant::LocalOnly => cfg.method,
        };
        Some(OptimizerConfig { method, ..*cfg })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgoConfig {
    pub variant: Variant,
    /// Intervals (or seeds) optimized per round.
    pub phi: usize,
    pub band_tol: f64,
    /// Relative inflation of `γ` for the verification eigensolve.
    pub level_bump: f64,
    pub optimizer: OptimizerConfig,
    pub tol_ctrb: f64,
    /// User-supplied starting frequencies.
    pub seeds: Vec<Frequency>,
    /// Also derive seeds from the spectrum of `(A, E)`.
    pub spectrum_seeds: bool,
    pub threads: usize,
    pub max_outer: usize,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        Self {
            variant: Variant::HybridNewtonInterp,
            phi: 1,
            band_tol: DEFAULT_BAND_TOL,
            level_bump: 1e-12,
            optimizer: OptimizerConfig::default(),
            tol_ctrb: DEFAULT_TOL_CTRB,
            seeds: Vec::new(),
            spectrum_seeds: true,
            threads: 1,
            max_outer: 50,
        }
    }
}

impl AlgoConfig {
    pub fn with_variant(variant: Variant) -> Self {
        Self { variant, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.phi == 0 {
            return Err(Error::InvalidConfig("phi must be at least 1".into()));
        }
        if !(self.level_bump >= 0.0) || !self.level_bump.is_finite() {
            return Err(Error::InvalidConfig("level_bump must be finite and nonnegative".into()));
        }
        if !(self.band_tol > 0.0) || !self.band_tol.is_finite() {
            return Err(Error::InvalidConfig("band_tol must be finite and positive".into()));
        }
        if !(self.optimizer.opt_tol >= 0.0) {
            return Err(Error::InvalidConfig("opt_tol must be nonnegative".into()));
        }
        if !(self.tol_ctrb >= 0.0) {
            return Err(Error::InvalidConfig("tol_ctrb must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormResult {
    pub gamma: f64,
    pub frequency: Frequency,
    /// The last verification eigensolve found no crossings.
    pub certified_global: bool,
    pub iterations: usize,
    pub pencil_eig_count: usize,
    pub gain_eval_count: usize,
    /// `(iteration, γ)` each time `γ` increased; iteration 0 is the initialization.
    pub history: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LevelCheck {
    NoCrossings,
    Crossings(Vec<BoundaryCrossing>),
}

/// Boundary crossings of the pencil at `gamma · (1 + level_bump)`.
pub fn verify_level(sys: &StateSpaceSystem, gamma: f64, cfg: &AlgoConfig) -> Result<LevelCheck> {
    cfg.validate()?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidConfig("gamma must be finite and positive".into()));
    }
    let pencil = build_pencil_guarded(sys, gamma * (1.0 + cfg.level_bump))?;
    let crossings = boundary_eigenvalues(&pencil, cfg.band_tol, false)?;
    Ok(if crossings.is_empty() { LevelCheck::NoCrossings } else { LevelCheck::Crossings(crossings) })
}

/// Best point found so far.
#[derive(Clone, Copy, Debug)]
struct Best {
    gamma: f64,
    frequency: Frequency,
}

impl Best {
    fn offer(&mut self, gamma: f64, frequency: Frequency) -> bool {
        if gamma > self.gamma {
            *self = Best { gamma, frequency };
            true
        } else {
            false
        }
    }
}

fn seed_frequencies(sys: &StateSpaceSystem, cfg: &AlgoConfig) -> Result<Vec<Frequency>> {
    if !cfg.spectrum_seeds {
        let mut out: Vec<Frequency> = Vec::new();
        for f in &cfg.seeds {
            let f = Frequency::new(sys.domain(), f.value);
            if f.value.is_finite() && !out.contains(&f) {
                out.push(f);
            }
        }
        return Ok(out);
    }
    Ok(match sys.storage() {
        Storage::Dense => {
            let spectrum = filter_spectrum(sys, cfg.tol_ctrb)?;
            initial_frequencies(sys, &spectrum, &cfg.seeds)
        }
        Storage::Sparse => sparse_seed_frequencies(sys, SPARSE_SEED_COUNT, &cfg.seeds),
    })
}

/// Seed gains, sorted best first; seeds sitting on a pole are skipped.
fn ranked_seeds(eval: &GainEvaluator<'_>, seeds: &[Frequency], threads: usize) -> Vec<(Frequency, f64)> {
    let gains = crate::par::map(seeds, threads, |&f| eval.gain(f).ok());
    let mut out: Vec<(Frequency, f64)> = seeds.iter().zip(gains).filter_map(|(&f, g)| g.map(|g| (f, g))).collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(core::cmp::Ordering::Equal));
    out
}

/// Initialization: best seed gain, improved by unconstrained maximization from
/// the top `phi` seeds when an optimizer is given.
fn initialize(eval: &GainEvaluator<'_>, seeds: &[Frequency], opt: Option<&OptimizerConfig>, phi: usize, threads: usize) -> Result<Best> {
    let ranked = ranked_seeds(eval, seeds, threads);
    let Some(&(f0, g0)) = ranked.first() else {
        return Err(Error::NoSeedsAvailable);
    };
    let mut best = Best { gamma: g0, frequency: f0 };
    if let Some(opt) = opt {
        let top = &ranked[..phi.min(ranked.len())];
        let runs = crate::par::map(top, threads, |&(f, _)| maximize_unconstrained(eval, f.value, opt).ok());
        for r in runs.into_iter().flatten() {
            best.offer(r.gain, r.frequency);
        }
    }
    Ok(best)
}

/// Continuous time: the gain tends to `‖D‖₂` as `ω → ∞`.
fn apply_d_fallback(sys: &StateSpaceSystem, best: &mut Best) {
    if sys.domain() != Domain::Continuous {
        return;
    }
    let d = sys.d_norm();
    if d > 0.0 && best.gamma <= d * (1.0 + 8.0 * f64::EPSILON) {
        *best = Best { gamma: d, frequency: Frequency::infinity() };
    }
}

/// Continuous time with `γ < ‖D‖₂`: the components `(-∞, ω_min)` and
/// `(ω_max, ∞)` lie above the level. Each is sampled on offsets growing
/// geometrically away from its crossing, then maximized from the best sample
/// when an optimizer is given.
fn end_components(eval: &GainEvaluator<'_>, points: &[f64], opt: Option<&OptimizerConfig>) -> Vec<(f64, Frequency)> {
    let lo = points.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::new();
    for (c, dir) in [(hi, 1.0), (lo, -1.0)] {
        let scale = c.abs().max(1.0);
        let sample = (-4..=END_SAMPLE_DOUBLINGS)
            .filter_map(|j| {
                let x = c + dir * scale * 2f64.powi(j);
                eval.gain(Frequency::omega(x)).ok().map(|g| (g, x))
            })
            .max_by(|a, b| a.0.total_cmp(&b.0));
        let Some((g, x)) = sample else { continue };
        out.push((g, Frequency::omega(x)));
        if let Some(r) = opt.and_then(|o| maximize_unconstrained(eval, x, o).ok()) {
            out.push((r.gain, r.frequency));
        }
    }
    out
}

/// Box for an interval in unwrapped coordinates and a start point inside it.
fn interval_box(iv: &LevelSetInterval) -> ((f64, f64), f64) {
    let (lo, hi) = (iv.lo.value, iv.hi_unwrapped());
    let mut x0 = iv.candidate.map_or(0.5 * (lo + hi), |c| c.value);
    if iv.wraps && x0 < lo {
        x0 += TAU;
    }
    ((lo, hi), x0.clamp(lo, hi))
}

/// Computes the H∞ norm of a dense system.
///
/// The exact variants iterate level-set eigensolves until one of them finds
/// no boundary crossings above the current `γ`, which certifies `γ` as the
/// global maximum of the gain. `LocalOnly` runs the seed phase alone.
pub fn hinf_norm(sys: &StateSpaceSystem, cfg: &AlgoConfig) -> Result<NormResult> {
    cfg.validate()?;
    if cfg.variant == Variant::LocalOnly {
        return hinf_approx_local(sys, cfg);
    }
    if sys.storage() != Storage::Dense {
        return Err(Error::DenseRequired);
    }
    let domain = sys.domain();
    let eval = GainEvaluator::new(sys);
    let opt = cfg.variant.optimizer(&cfg.optimizer);
    let scheme = cfg.variant.scheme();

    let seeds = seed_frequencies(sys, cfg)?;
    let mut best = initialize(&eval, &seeds, opt.as_ref(), cfg.phi, cfg.threads)?;
    let d_norm = if domain == Domain::Continuous { sys.d_norm() } else { 0.0 };
    let mut history = vec![(0, best.gamma)];
    let mut pencil_eig_count = 0;
    let mut iterations = 0;
    let mut certified = false;

    while iterations < cfg.max_outer {
        if !(best.gamma > 0.0) {
            // G vanishes at every seed; nothing to level against
            break;
        }
        iterations += 1;
        let level = best.gamma * (1.0 + cfg.level_bump);
        let pencil = build_pencil_guarded(sys, level)?;
        let crossings = boundary_eigenvalues(&pencil, cfg.band_tol, false)?;
        pencil_eig_count += 1;
        if crossings.is_empty() {
            certified = true;
            break;
        }
        let mut points: Vec<f64> = crossings.iter().map(|c| c.frequency.value).collect();
        // g equals γ at the incumbent, so it bounds the level set too; this
        // matters when it is a local minimum whose crossing pair escaped the band
        if !best.frequency.at_infinity {
            points.push(best.frequency.value);
            points.sort_by(f64::total_cmp);
        }
        let gamma = best.gamma;
        let mut improved = false;

        let intervals = classify_and_rank(&eval, build_intervals(&points, domain), gamma, scheme, cfg.threads);
        for iv in &intervals {
            if let (Some(f), Some(g)) = (iv.candidate, iv.candidate_gain) {
                improved |= best.offer(g, f);
            }
        }
        if let Some(opt) = &opt {
            let top = &intervals[..cfg.phi.min(intervals.len())];
            let runs = crate::par::map(top, cfg.threads, |iv| {
                let (bx, x0) = interval_box(iv);
                maximize_boxed(&eval, bx, x0, opt).ok()
            });
            for r in runs.into_iter().flatten() {
                improved |= best.offer(r.gain, r.frequency);
            }
        }
        if d_norm > level {
            // the level set also contains both ends of the axis
            for (g, f) in end_components(&eval, &points, opt.as_ref()) {
                improved |= best.offer(g, f);
            }
        }
        if intervals.is_empty() {
            // crossings too close to delimit an interval: try the points themselves
            let freqs: Vec<Frequency> = crossings.iter().map(|c| c.frequency).collect();
            for (f, g) in ranked_seeds(&eval, &freqs, cfg.threads) {
                improved |= best.offer(g, f);
            }
        }
        if !improved {
            break;
        }
        history.push((iterations, best.gamma));
    }

    apply_d_fallback(sys, &mut best);
    if history.last().is_some_and(|&(_, g)| best.gamma > g) {
        history.push((iterations, best.gamma));
    }
    Ok(NormResult {
        gamma: best.gamma,
        frequency: best.frequency,
        certified_global: certified,
        iterations,
        pencil_eig_count,
        gain_eval_count: eval.count(),
        history,
    })
}

/// Local approximation: maximizes the gain from the top `phi` seeds and
/// returns the best value found. Works for sparse systems; never certified.
pub fn hinf_approx_local(sys: &StateSpaceSystem, cfg: &AlgoConfig) -> Result<NormResult> {
    cfg.validate()?;
    let seeds = seed_frequencies(sys, cfg)?;
    if seeds.is_empty() {
        return Err(Error::NoSeedsAvailable);
    }
    let eval = GainEvaluator::new(sys);
    let opt = Variant::LocalOnly.optimizer(&cfg.optimizer);
    let mut best = initialize(&eval, &seeds, opt.as_ref(), cfg.phi, cfg.threads)?;
    let mut history = vec![(0, best.gamma)];
    apply_d_fallback(sys, &mut best);
    if best.gamma > history[0].1 {
        history.push((0, best.gamma));
    }
    Ok(NormResult {
        gamma: best.gamma,
        frequency: best.frequency,
        certified_global: false,
        iterations: 0,
        pencil_eig_count: 0,
        gain_eval_count: eval.count(),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMat, C64};
    use crate::transfer::gain;

    fn scalar(domain: Domain, a: f64) -> StateSpaceSystem {
        StateSpaceSystem::from_real(&[&[a]], &[&[1.0]], &[&[1.0]], &[&[0.0]], domain).unwrap()
    }

    /// Two lightly damped modes at ω = 1 and ω = 4, the second one taller.
    fn two_peaks() -> StateSpaceSystem {
        let a: &[&[f64]] = &[&[-0.05, 1.0, 0.0, 0.0], &[-1.0, -0.05, 0.0, 0.0], &[0.0, 0.0, -0.02, 4.0], &[0.0, 0.0, -4.0, -0.02]];
        StateSpaceSystem::from_real(a, &[&[0.0], &[1.0], &[0.0], &[1.0]], &[&[1.0, 0.0, 1.0, 0.0]], &[&[0.0]], Domain::Continuous).unwrap()
    }

    #[test]
    fn scalar_examples_all_exact_variants() {
        for v in Variant::EXACT {
            let cfg = AlgoConfig::with_variant(v);
            let r = hinf_norm(&scalar(Domain::Continuous, -1.0), &cfg).unwrap();
            assert!((r.gamma - 1.0).abs() < 1e-12, "{v:?} {r:?}");
            assert!(r.frequency.value.abs() < 1e-8 && r.certified_global);
            let r = hinf_norm(&scalar(Domain::Discrete, 0.5), &cfg).unwrap();
            assert!((r.gamma - 2.0).abs() < 1e-12, "{v:?} {r:?}");
            assert!(r.certified_global);
        }
    }

    #[test]
    fn single_peak_needs_one_eigensolve() {
        let r = hinf_norm(&scalar(Domain::Continuous, -1.0), &AlgoConfig::default()).unwrap();
        assert_eq!(r.pencil_eig_count, 1);
        assert_eq!(r.frequency.value, 0.0);
        assert_eq!(r.history, vec![(0, 1.0)]);
    }

    #[test]
    fn feedthrough_only_is_at_infinity() {
        let s = StateSpaceSystem::from_real(&[&[-1.0]], &[&[1.0]], &[&[0.0]], &[&[3.0]], Domain::Continuous).unwrap();
        for v in Variant::EXACT {
            let r = hinf_norm(&s, &AlgoConfig::with_variant(v)).unwrap();
            assert_eq!(r.gamma, 3.0);
            assert!(r.frequency.at_infinity);
        }
        let r = hinf_approx_local(&s, &AlgoConfig::default()).unwrap();
        assert_eq!(r.gamma, 3.0);
        assert!(r.frequency.at_infinity && !r.certified_global);
    }

    #[test]
    fn two_peaks_global_and_local() {
        let s = two_peaks();
        let mut results = Vec::new();
        for v in Variant::EXACT {
            let r = hinf_norm(&s, &AlgoConfig::with_variant(v)).unwrap();
            assert!(r.certified_global, "{v:?}");
            assert!(r.history.windows(2).all(|w| w[1].1 > w[0].1));
            results.push(r.gamma);
        }
        let g = results[0];
        for x in &results {
            assert!((x - g).abs() <= 1e-12 * g, "{results:?}");
        }
        // the taller peak sits near ω = 4
        let top = hinf_norm(&s, &AlgoConfig::default()).unwrap();
        assert!((top.frequency.value.abs() - 4.0).abs() < 0.1);

        let cfg = AlgoConfig { seeds: vec![Frequency::omega(0.9)], spectrum_seeds: false, ..AlgoConfig::default() };
        let local = hinf_approx_local(&s, &cfg).unwrap();
        assert!(local.gamma < g);
        assert!((local.frequency.value - 1.0).abs() < 0.1);
    }

    #[test]
    fn local_from_a_far_seed() {
        let cfg = AlgoConfig { seeds: vec![Frequency::omega(5.0)], spectrum_seeds: false, ..AlgoConfig::default() };
        let r = hinf_approx_local(&scalar(Domain::Continuous, -1.0), &cfg).unwrap();
        assert!((r.gamma - 1.0).abs() < 1e-14);
        assert!(r.frequency.value.abs() < 1e-8);
    }

    #[test]
    fn no_seeds() {
        let cfg = AlgoConfig { spectrum_seeds: false, ..AlgoConfig::default() };
        assert_eq!(hinf_approx_local(&scalar(Domain::Continuous, -1.0), &cfg), Err(Error::NoSeedsAvailable));
    }

    #[test]
    fn verify_level_examples() {
        let s = scalar(Domain::Continuous, -1.0);
        let cfg = AlgoConfig::default();
        assert_eq!(verify_level(&s, 1.0, &cfg).unwrap(), LevelCheck::NoCrossings);
        match verify_level(&s, 0.5f64.sqrt(), &AlgoConfig { level_bump: 0.0, ..cfg.clone() }).unwrap() {
            LevelCheck::Crossings(c) => {
                assert_eq!(c.len(), 2);
                assert!((c[0].frequency.value + 1.0).abs() < 1e-10);
                assert!((c[1].frequency.value - 1.0).abs() < 1e-10);
            }
            other => panic!("{other:?}"),
        }
        let d = StateSpaceSystem::from_real(&[&[-1.0]], &[&[1.0]], &[&[1.0]], &[&[2.0]], Domain::Continuous).unwrap();
        assert!(verify_level(&d, 2.0, &AlgoConfig { level_bump: 0.0, ..cfg }).is_ok());
    }

    #[test]
    fn invalid_configs() {
        let s = scalar(Domain::Continuous, -1.0);
        assert!(matches!(hinf_norm(&s, &AlgoConfig { phi: 0, ..AlgoConfig::default() }), Err(Error::InvalidConfig(_))));
        assert!(matches!(hinf_norm(&s, &AlgoConfig { level_bump: -1.0, ..AlgoConfig::default() }), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn phi_above_seed_count_is_clamped() {
        let cfg = AlgoConfig { phi: 5, seeds: vec![Frequency::omega(-3.0), Frequency::omega(2.0), Frequency::omega(7.0)], spectrum_seeds: false, ..AlgoConfig::default() };
        let r = hinf_approx_local(&two_peaks(), &cfg).unwrap();
        assert!(r.gamma > 0.0);
    }

    #[test]
    fn complex_system_and_descriptor() {
        let z = |re: f64, im: f64| C64::new(re, im);
        let a = CMat::from_rows(&[vec![z(-1.0, 0.0), z(0.0, 1.0)], vec![z(0.0, 0.0), z(-0.5, 2.0)]]);
        let b = CMat::from_rows(&[vec![z(1.0, 0.0)], vec![z(0.5, -0.5)]]);
        let c = CMat::from_rows(&[vec![z(1.0, 1.0), z(0.0, 1.0)]]);
        let d = CMat::from_rows(&[vec![z(0.1, 0.0)]]);
        let e = CMat::from_rows(&[vec![z(2.0, 0.0), z(0.0, 0.0)], vec![z(0.3, 0.0), z(1.0, 0.0)]]);
        let s = StateSpaceSystem::new(a, b, c, d, Some(e), Domain::Continuous).unwrap();
        let r = hinf_norm(&s, &AlgoConfig::with_variant(Variant::BBBS)).unwrap();
        let h = hinf_norm(&s, &AlgoConfig::default()).unwrap();
        assert!(r.certified_global && h.certified_global);
        assert!((r.gamma - h.gamma).abs() <= 1e-12 * h.gamma);
        // nothing on a grid beats it
        for k in -4000..=4000 {
            let w = k as f64 * 0.005;
            assert!(gain(&s, Frequency::omega(w)).unwrap() <= h.gamma * (1.0 + 1e-12));
        }
    }
}

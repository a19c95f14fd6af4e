//! Transfer-function evaluation and derivatives of the gain `g = σ₁(G)`.
//!
//! One factorization of `Z = sE - A` (with `s = iω` or `s = e^{iθ}`) is made
//! per frequency and kept in the [`TransferSample`]; derivative calls reuse
//! it, so their marginal cost is a handful of extra triangular solves.

use core::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::linalg::{dotc, largest_triplet, CMat, Lu, SparseLu, Svd, C64};
use crate::prelude::*;
use crate::system::{Domain, Frequency, Operator, StateSpaceSystem};

/// Full SVD is used automatically up to this `min(m, p)`.
pub const FULL_SVD_THRESHOLD: usize = 64;

/// Relative gap `σ₁ - σ₂ ≥ SIMPLE_GAP · max(1, σ₁)` required for derivatives.
pub const SIMPLE_GAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SvdMode {
    Full,
    LargestOnly,
}

impl SvdMode {
    pub fn for_system(sys: &StateSpaceSystem) -> Self {
        if sys.m().min(sys.p()) <= FULL_SVD_THRESHOLD {
            SvdMode::Full
        } else {
            SvdMode::LargestOnly
        }
    }
}

#[derive(Debug)]
enum Factorization {
    Dense(Lu),
    Sparse(SparseLu),
}

impl Factorization {
    fn solve(&self, b: &mut [C64]) {
        match self {
            Factorization::Dense(lu) => lu.solve_in_place(b),
            Factorization::Sparse(lu) => lu.solve_in_place(b),
        }
    }

    fn solve_adjoint(&self, b: &mut [C64]) {
        match self {
            Factorization::Dense(lu) => lu.solve_adjoint_in_place(b),
            Factorization::Sparse(lu) => lu.solve_adjoint_in_place(b),
        }
    }
}

/// Which side of `Z` is solved against: `X = Z⁻¹B` or `W = Z⁻ᴴCᴴ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Right,
    Adjoint,
}

/// The transfer matrix at one frequency, its SVD and the factorization of `Z`.
#[derive(Debug)]
pub struct TransferSample {
    pub frequency: Frequency,
    pub g: CMat,
    /// All singular values (full mode) or just `σ₁`.
    pub sigma: Vec<f64>,
    /// Left singular vectors: `p × p` in full mode, `p × 1` otherwise.
    pub u: CMat,
    /// Right singular vectors: `m × m` in full mode, `m × 1` otherwise.
    pub v: CMat,
    pub svd_mode: SvdMode,
    domain: Domain,
    point: C64,
    fact: Factorization,
    side: Side,
    /// `Z⁻¹B` (right side) or `Z⁻ᴴCᴴ` (adjoint side).
    basis: CMat,
    solves: AtomicUsize,
}

/// Gain value and derivatives at one frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainDerivatives {
    pub value: f64,
    pub first: f64,
    pub second: Option<f64>,
    pub simple: bool,
}

/// `s = iω` or `s = e^{iθ}`.
pub fn frequency_point(domain: Domain, f: Frequency) -> C64 {
    match domain {
        Domain::Continuous => C64::new(0.0, f.value),
        Domain::Discrete => C64::from_polar(1.0, f.value),
    }
}

/// Evaluates `G` at `freq` and attaches its SVD.
pub fn eval_transfer(sys: &StateSpaceSystem, freq: Frequency, svd_mode: SvdMode) -> Result<TransferSample> {
    if freq.at_infinity || !freq.value.is_finite() {
        return Err(Error::InvalidConfig("transfer evaluation needs a finite frequency".into()));
    }
    let domain = sys.domain();
    let freq = Frequency::new(domain, freq.value);
    let s = frequency_point(domain, freq);
    let n = sys.n();

    let fact = match sys.a() {
        Operator::Dense(a) => {
            let z = match sys.e() {
                None => {
                    let mut z = a.scale_real(-1.0);
                    for i in 0..n {
                        z[(i, i)] += s;
                    }
                    z
                }
                Some(e) => e.to_dense().lincomb(s, a, C64::new(-1.0, 0.0)),
            };
            let lu = Lu::factor(&z).ok_or(Error::SingularShift)?;
            if lu.relative_min_pivot() < 1e-18 {
                return Err(Error::SingularShift);
            }
            Factorization::Dense(lu)
        }
        Operator::Sparse(a) => {
            let e = match sys.e() {
                None => crate::linalg::CscMatrix::identity(n),
                Some(e) => e.to_sparse(),
            };
            let z = e.lincomb(s, a, C64::new(-1.0, 0.0));
            let lu = SparseLu::factor(&z).ok_or(Error::SingularShift)?;
            if lu.pivot_ratio() < 1e-18 {
                return Err(Error::SingularShift);
            }
            Factorization::Sparse(lu)
        }
    };

    let (m, p) = (sys.m(), sys.p());
    let side = if m <= p { Side::Right } else { Side::Adjoint };
    let mut solves = 0usize;
    let (basis, mut g) = match side {
        Side::Right => {
            let mut x = sys.b().clone();
            for j in 0..m {
                fact.solve(x.col_mut(j));
                solves += 1;
            }
            let g = sys.c().matmul(&x);
            (x, g)
        }
        Side::Adjoint => {
            let mut w = sys.c().adjoint();
            for j in 0..p {
                fact.solve_adjoint(w.col_mut(j));
                solves += 1;
            }
            let g = w.adjoint_matmul(sys.b());
            (w, g)
        }
    };
    g = g.add(sys.d());
    if !g.as_slice().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::SingularShift);
    }

    let (sigma, u, v) = match svd_mode {
        SvdMode::Full => {
            let svd = Svd::compute(&g);
            (svd.s, svd.u, svd.v)
        }
        SvdMode::LargestOnly => {
            let (s1, u1, v1) = largest_triplet(&g);
            (vec![s1], CMat::from_col_major(p, 1, u1), CMat::from_col_major(m, 1, v1))
        }
    };

    Ok(TransferSample { frequency: freq, g, sigma, u, v, svd_mode, domain, point: s, fact, side, basis, solves: AtomicUsize::new(solves) })
}

/// `g(freq) = ‖G‖₂` (largest singular value only).
pub fn gain(sys: &StateSpaceSystem, freq: Frequency) -> Result<f64> {
    Ok(eval_transfer(sys, freq, SvdMode::LargestOnly)?.gain())
}

impl TransferSample {
    pub fn gain(&self) -> f64 {
        self.sigma[0]
    }

    pub fn u1(&self) -> &[C64] {
        self.u.col(0)
    }

    pub fn v1(&self) -> &[C64] {
        self.v.col(0)
    }

    /// The point `s` on the imaginary axis or unit circle.
    pub fn point(&self) -> C64 {
        self.point
    }

    /// `σ₁ - σ₂` clears the simplicity threshold. Always `true` when only the
    /// leading triplet was computed.
    pub fn is_simple(&self) -> bool {
        match self.sigma.get(1) {
            Some(&s2) => self.sigma[0] - s2 >= SIMPLE_GAP * self.sigma[0].max(1.0),
            None => true,
        }
    }

    /// Factorizations of `Z` made for this sample (always one).
    pub fn factorization_count(&self) -> usize {
        1
    }

    /// Triangular solve pairs (one per right-hand side) made so far.
    pub fn solve_count(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }

    fn count(&self, k: usize) {
        self.solves.fetch_add(k, Ordering::Relaxed);
    }

    /// `dZ⁻¹/dfreq` scale: `G' = f1 · C Z⁻¹EZ⁻¹ B`.
    fn first_factor(&self) -> C64 {
        match self.domain {
            Domain::Continuous => C64::new(0.0, -1.0),
            Domain::Discrete => C64::new(0.0, -1.0) * self.point,
        }
    }

    /// `u₁ᴴ (C Z⁻¹EZ⁻¹B) v₁` with one extra solve.
    fn p1_bilinear(&self, sys: &StateSpaceSystem) -> C64 {
        let (u1, v1) = (self.u1(), self.v1());
        self.count(1);
        match self.side {
            Side::Right => {
                let x = self.basis.mul_vec(v1);
                let mut y = sys.apply_e(&x);
                self.fact.solve(&mut y);
                dotc(u1, &sys.c().mul_vec(&y))
            }
            Side::Adjoint => {
                let w = self.basis.mul_vec(u1);
                let mut w2 = sys.apply_e_adjoint(&w);
                self.fact.solve_adjoint(&mut w2);
                dotc(&w2, &sys.b().mul_vec(v1))
            }
        }
    }

    /// `P1 = C Z⁻¹EZ⁻¹B` in full, plus `u₁ᴴ P2 v₁` with `P2 = C Z⁻¹EZ⁻¹EZ⁻¹B`.
    fn p1_matrix_and_p2_bilinear(&self, sys: &StateSpaceSystem) -> (CMat, C64) {
        let (u1, v1) = (self.u1(), self.v1());
        match self.side {
            Side::Right => {
                let m = sys.m();
                let mut y1 = CMat::zeros(sys.n(), m);
                for j in 0..m {
                    let mut col = sys.apply_e(self.basis.col(j));
                    self.fact.solve(&mut col);
                    y1.col_mut(j).copy_from_slice(&col);
                }
                let p1 = sys.c().matmul(&y1);
                let mut y2 = sys.apply_e(&y1.mul_vec(v1));
                self.fact.solve(&mut y2);
                self.count(m + 1);
                (p1, dotc(u1, &sys.c().mul_vec(&y2)))
            }
            Side::Adjoint => {
                let p = sys.p();
                let mut w2 = CMat::zeros(sys.n(), p);
                for j in 0..p {
                    let mut col = sys.apply_e_adjoint(self.basis.col(j));
                    self.fact.solve_adjoint(&mut col);
                    w2.col_mut(j).copy_from_slice(&col);
                }
                let p1 = w2.adjoint_matmul(sys.b());
                let mut w3 = sys.apply_e_adjoint(&w2.mul_vec(u1));
                self.fact.solve_adjoint(&mut w3);
                self.count(p + 1);
                (p1, dotc(&w3, &sys.b().mul_vec(v1)))
            }
        }
    }
}

/// `g' = Re(u₁ᴴ G' v₁)`.
pub fn gain_first_derivative(sample: &TransferSample, sys: &StateSpaceSystem) -> Result<f64> {
    if !sample.is_simple() {
        return Err(Error::NonSimpleSingularValue);
    }
    Ok((sample.first_factor() * sample.p1_bilinear(sys)).re)
}

/// `g''`: the second derivative of the largest eigenvalue of the Hermitian
/// family `[[0, G], [Gᴴ, 0]]`, assembled from the SVD of `G` without forming
/// that matrix.
pub fn gain_second_derivative(sample: &TransferSample, sys: &StateSpaceSystem) -> Result<f64> {
    Ok(derivatives_with_second(sample, sys)?.1)
}

/// Value, first and (when possible) second derivative in one pass.
///
/// The second derivative is attempted only in full SVD mode; a degenerate
/// spectrum leaves it `None` instead of failing.
pub fn gain_derivatives(sample: &TransferSample, sys: &StateSpaceSystem, want_second: bool) -> Result<GainDerivatives> {
    let simple = sample.is_simple();
    if !simple {
        return Err(Error::NonSimpleSingularValue);
    }
    if want_second && sample.svd_mode == SvdMode::Full {
        match derivatives_with_second(sample, sys) {
            Ok((first, second)) => return Ok(GainDerivatives { value: sample.gain(), first, second: Some(second), simple }),
            Err(Error::DegenerateSpectrum) => {}
            Err(e) => return Err(e),
        }
    }
    let first = gain_first_derivative(sample, sys)?;
    Ok(GainDerivatives { value: sample.gain(), first, second: None, simple })
}

fn derivatives_with_second(sample: &TransferSample, sys: &StateSpaceSystem) -> Result<(f64, f64)> {
    if sample.svd_mode != SvdMode::Full {
        return Err(Error::InvalidConfig("second derivative needs the full SVD".into()));
    }
    if !sample.is_simple() {
        return Err(Error::NonSimpleSingularValue);
    }
    let s1 = sample.gain();
    if s1 <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    let (p, m) = sample.g.shape();
    let r = p.min(m);
    let f1 = sample.first_factor();
    let (p1, p2_11) = sample.p1_matrix_and_p2_bilinear(sys);
    let gp = p1.scale(f1);
    // a_ij = u_iᴴ G' v_j
    let a = sample.u.adjoint_matmul(&gp.matmul(&sample.v));

    let u1 = sample.u1();
    let v1 = sample.v1();
    let p1_11 = dotc(u1, &p1.mul_vec(v1));
    let gpp_11 = match sample.domain {
        Domain::Continuous => p2_11 * -2.0,
        Domain::Discrete => {
            let z = sample.point;
            z * p1_11 - z * z * p2_11 * 2.0
        }
    };

    let mut second = gpp_11.re;
    for k in 1..r {
        let gap = s1 - sample.sigma[k];
        let num = (a[(0, k)] + a[(k, 0)].conj()).norm_sqr();
        if gap <= 0.0 {
            return Err(Error::DegenerateSpectrum);
        }
        second += num / (2.0 * gap);
    }
    for k in 0..r {
        second += (a[(k, 0)].conj() - a[(0, k)]).norm_sqr() / (2.0 * (s1 + sample.sigma[k]));
    }
    for k in r..p {
        second += a[(k, 0)].norm_sqr() / s1;
    }
    for k in r..m {
        second += a[(0, k)].norm_sqr() / s1;
    }
    Ok((a[(0, 0)].re, second))
}

/// Counts transfer evaluations for one system; shareable across threads.
#[derive(Debug)]
pub struct GainEvaluator<'a> {
    sys: &'a StateSpaceSystem,
    svd_mode: SvdMode,
    evals: AtomicUsize,
}

impl<'a> GainEvaluator<'a> {
    pub fn new(sys: &'a StateSpaceSystem) -> Self {
        Self { sys, svd_mode: SvdMode::for_system(sys), evals: AtomicUsize::new(0) }
    }

    pub fn system(&self) -> &'a StateSpaceSystem {
        self.sys
    }

    pub fn svd_mode(&self) -> SvdMode {
        self.svd_mode
    }

    /// Number of `eval_transfer` calls made through this evaluator.
    pub fn count(&self) -> usize {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn sample(&self, f: Frequency) -> Result<TransferSample> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        eval_transfer(self.sys, f, self.svd_mode)
    }

    pub fn gain(&self, f: Frequency) -> Result<f64> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        Ok(eval_transfer(self.sys, f, SvdMode::LargestOnly)?.gain())
    }

    /// Gain and derivatives; a non-simple `σ₁` is reported in `simple` with
    /// zero derivatives rather than as an error.
    pub fn derivatives(&self, f: Frequency, want_second: bool) -> Result<GainDerivatives> {
        let s = self.sample(f)?;
        match gain_derivatives(&s, self.sys, want_second) {
            Err(Error::NonSimpleSingularValue) => Ok(GainDerivatives { value: s.gain(), first: 0.0, second: None, simple: false }),
            other => other,
        }
    }
}

//! System data model, validation and spectrum-derived starting frequencies.

use core::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::{self, norm2, CMat, CscMatrix, C64};
use crate::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Continuous,
    Discrete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Storage {
    Dense,
    Sparse,
}

/// An `n × n` state operator (`A` or `E`), dense or sparse.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Dense(CMat),
    Sparse(CscMatrix),
}

impl Operator {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Operator::Dense(m) => m.shape(),
            Operator::Sparse(m) => m.shape(),
        }
    }

    pub fn storage(&self) -> Storage {
        match self {
            Operator::Dense(_) => Storage::Dense,
            Operator::Sparse(_) => Storage::Sparse,
        }
    }

    pub fn to_dense(&self) -> CMat {
        match self {
            Operator::Dense(m) => m.clone(),
            Operator::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CscMatrix {
        match self {
            Operator::Dense(m) => CscMatrix::from_dense(m),
            Operator::Sparse(m) => m.clone(),
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        match self {
            Operator::Dense(m) => m.mul_vec(x),
            Operator::Sparse(m) => m.mul_vec(x),
        }
    }

    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        match self {
            Operator::Dense(m) => m.adjoint_mul_vec(x),
            Operator::Sparse(m) => m.adjoint_mul_vec(x),
        }
    }

    pub fn norm_fro(&self) -> f64 {
        match self {
            Operator::Dense(m) => m.norm_fro(),
            Operator::Sparse(m) => m.norm_fro(),
        }
    }
}

impl From<CMat> for Operator {
    fn from(m: CMat) -> Self {
        Operator::Dense(m)
    }
}

impl From<CscMatrix> for Operator {
    fn from(m: CscMatrix) -> Self {
        Operator::Sparse(m)
    }
}

/// A frequency on the imaginary axis (`ω`, possibly infinite) or the unit
/// circle (`θ`, reduced into `[0, 2π)`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frequency {
    pub value: f64,
    pub at_infinity: bool,
}

impl Frequency {
    pub fn omega(w: f64) -> Self {
        Self { value: w, at_infinity: false }
    }

    pub fn theta(t: f64) -> Self {
        Self { value: reduce_angle(t), at_infinity: false }
    }

    pub fn infinity() -> Self {
        Self { value: f64::INFINITY, at_infinity: true }
    }

    pub fn new(domain: Domain, value: f64) -> Self {
        match domain {
            Domain::Continuous => Self::omega(value),
            Domain::Discrete => Self::theta(value),
        }
    }
}

/// Reduces an angle into `[0, 2π)`.
pub fn reduce_angle(t: f64) -> f64 {
    let r = num_traits::Euclid::rem_euclid(&t, &TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// One eigenvalue of `(A, E)` with its controllability/observability data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumPoint {
    pub eigenvalue: C64,
    pub right_vec_norm_cx: f64,
    pub left_vec_norm_by: f64,
    pub controllable: bool,
    pub observable: bool,
    pub finite: bool,
}

impl SpectrumPoint {
    pub fn admissible(&self) -> bool {
        self.finite && self.controllable && self.observable
    }
}

/// `E ẋ = A x + B u, y = C x + D u` (or the discrete-time analogue).
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpaceSystem {
    a: Operator,
    b: CMat,
    c: CMat,
    d: CMat,
    /// `None` is the identity marker.
    e: Option<Operator>,
    domain: Domain,
}

/// Threshold for flagging an eigenvalue `alpha / beta` of `(A, E)` as infinite.
pub const INFINITE_EIG_TOL: f64 = 1e-12;

/// Default tolerance for the controllability/observability flags.
pub const DEFAULT_TOL_CTRB: f64 = 1e-10;

/// Checks shapes and assembles a system. `e = None` stands for `E = I`.
pub fn validate_system(a: Operator, b: CMat, c: CMat, d: CMat, e: Option<Operator>, domain: Domain) -> Result<StateSpaceSystem> {
    let (n, na) = a.shape();
    let (nb, m) = b.shape();
    let (p, nc) = c.shape();
    if n == 0 || na == 0 || m == 0 || p == 0 || nb == 0 || nc == 0 {
        return Err(Error::EmptySystem);
    }
    if n != na {
        return Err(Error::DimensionMismatch(format!("A is {n}x{na}, expected square")));
    }
    if nb != n {
        return Err(Error::DimensionMismatch(format!("B has {nb} rows, A has {n}")));
    }
    if nc != n {
        return Err(Error::DimensionMismatch(format!("C has {nc} columns, A has {n}")));
    }
    if d.shape() != (p, m) {
        return Err(Error::DimensionMismatch(format!("D is {}x{}, expected {p}x{m}", d.rows(), d.cols())));
    }
    if let Some(e) = &e {
        if e.shape() != (n, n) {
            let (r, k) = e.shape();
            return Err(Error::DimensionMismatch(format!("E is {r}x{k}, expected {n}x{n}")));
        }
        if e.storage() != a.storage() {
            return Err(Error::DimensionMismatch("A and E must use the same storage".into()));
        }
    }
    Ok(StateSpaceSystem { a, b, c, d, e, domain })
}

impl StateSpaceSystem {
    /// Dense constructor; `e = None` means `E = I`.
    pub fn new(a: CMat, b: CMat, c: CMat, d: CMat, e: Option<CMat>, domain: Domain) -> Result<Self> {
        validate_system(a.into(), b, c, d, e.map(Operator::Dense), domain)
    }

    pub fn new_sparse(a: CscMatrix, b: CMat, c: CMat, d: CMat, e: Option<CscMatrix>, domain: Domain) -> Result<Self> {
        validate_system(a.into(), b, c, d, e.map(Operator::Sparse), domain)
    }

    /// Dense system from real row-major literals.
    pub fn from_real(a: &[&[f64]], b: &[&[f64]], c: &[&[f64]], d: &[&[f64]], domain: Domain) -> Result<Self> {
        Self::new(CMat::from_real_rows(a), CMat::from_real_rows(b), CMat::from_real_rows(c), CMat::from_real_rows(d), None, domain)
    }

    pub fn a(&self) -> &Operator {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn c(&self) -> &CMat {
        &self.c
    }

    pub fn d(&self) -> &CMat {
        &self.d
    }

    /// `None` when `E` is the identity marker.
    pub fn e(&self) -> Option<&Operator> {
        self.e.as_ref()
    }

    pub fn e_is_identity(&self) -> bool {
        self.e.is_none()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn storage(&self) -> Storage {
        self.a.storage()
    }

    pub fn n(&self) -> usize {
        self.b.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn p(&self) -> usize {
        self.c.rows()
    }

    pub fn is_real(&self) -> bool {
        let op_real = |o: &Operator| match o {
            Operator::Dense(m) => m.is_real(),
            Operator::Sparse(m) => m.triplets().iter().all(|t| t.2.im == 0.0),
        };
        op_real(&self.a) && self.e.as_ref().is_none_or(op_real) && self.b.is_real() && self.c.is_real() && self.d.is_real()
    }

    /// Dense `A`; errors for sparse storage.
    pub fn a_dense(&self) -> Result<&CMat> {
        match &self.a {
            Operator::Dense(m) => Ok(m),
            Operator::Sparse(_) => Err(Error::DenseRequired),
        }
    }

    /// Dense `E` (explicit identity when marked).
    pub fn e_dense(&self) -> Result<CMat> {
        match &self.e {
            None => Ok(CMat::identity(self.n())),
            Some(Operator::Dense(m)) => Ok(m.clone()),
            Some(Operator::Sparse(_)) => Err(Error::DenseRequired),
        }
    }

    /// `E x`.
    pub fn apply_e(&self, x: &[C64]) -> Vec<C64> {
        match &self.e {
            None => x.to_vec(),
            Some(e) => e.mul_vec(x),
        }
    }

    /// `E^H x`.
    pub fn apply_e_adjoint(&self, x: &[C64]) -> Vec<C64> {
        match &self.e {
            None => x.to_vec(),
            Some(e) => e.adjoint_mul_vec(x),
        }
    }

    /// `‖D‖₂`.
    pub fn d_norm(&self) -> f64 {
        linalg::spectral_norm(&self.d)
    }

    /// Same matrices, different time domain.
    pub fn with_domain(&self, domain: Domain) -> Self {
        Self { domain, ..self.clone() }
    }
}

/// All eigenvalues of `(A, E)` with controllability/observability flags.
///
/// Requires dense storage; sparse systems take their seeds from
/// [`sparse_seed_frequencies`] instead.
pub fn filter_spectrum(sys: &StateSpaceSystem, tol_ctrb: f64) -> Result<Vec<SpectrumPoint>> {
    let a = sys.a_dense()?;
    let e = match sys.e() {
        None => None,
        Some(_) => Some(sys.e_dense()?),
    };
    let pairs: Vec<(C64, C64)> = match &e {
        None => linalg::eigenvalues(a).map_err(|_| Error::EigensolveFailure)?.into_iter().map(|l| (l, C64::new(1.0, 0.0))).collect(),
        Some(e) => linalg::generalized_eigenvalues(a, e).map_err(|_| Error::EigensolveFailure)?.into_iter().map(|g| (g.alpha, g.beta)).collect(),
    };
    let b_scale = sys.b().norm_fro().max(1.0);
    let c_scale = sys.c().norm_fro().max(1.0);
    let mut out = Vec::with_capacity(pairs.len());
    for (alpha, beta) in pairs {
        if beta.norm() <= INFINITE_EIG_TOL * alpha.norm().max(1.0) {
            out.push(SpectrumPoint {
                eigenvalue: C64::new(f64::INFINITY, 0.0),
                right_vec_norm_cx: 0.0,
                left_vec_norm_by: 0.0,
                controllable: false,
                observable: false,
                finite: false,
            });
            continue;
        }
        let lambda = alpha / beta;
        let (x, y) = linalg::inverse_iteration(a, e.as_ref(), lambda);
        let cx = norm2(&sys.c().mul_vec(&x));
        let by = norm2(&sys.b().adjoint_mul_vec(&y));
        out.push(SpectrumPoint {
            eigenvalue: lambda,
            right_vec_norm_cx: cx,
            left_vec_norm_by: by,
            controllable: by > tol_ctrb * b_scale,
            observable: cx > tol_ctrb * c_scale,
            finite: true,
        });
    }
    Ok(out)
}

/// Default starting frequencies from the admissible spectrum, followed by
/// `extra` seeds. Duplicates are removed, first occurrence wins.
pub fn initial_frequencies(sys: &StateSpaceSystem, spectrum: &[SpectrumPoint], extra: &[Frequency]) -> Vec<Frequency> {
    let admissible: Vec<C64> = spectrum.iter().filter(|s| s.admissible()).map(|s| s.eigenvalue).collect();
    let mut out = Vec::new();
    match sys.domain() {
        Domain::Continuous => {
            out.push(Frequency::omega(0.0));
            if let Some(max_re) = admissible.iter().map(|z| z.re).reduce(f64::max) {
                let tie = 1e-10 * max_re.abs().max(1.0);
                let im = admissible.iter().filter(|z| z.re >= max_re - tie).map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
                out.push(Frequency::omega(im));
            }
        }
        Domain::Discrete => {
            out.push(Frequency::theta(0.0));
            out.push(Frequency::theta(PI));
            if let Some(max_mod) = admissible.iter().map(|z| z.norm()).reduce(f64::max) {
                let tie = 1e-10 * max_mod.max(1.0);
                let best = admissible
                    .iter()
                    .filter(|z| z.norm() >= max_mod - tie)
                    .map(|z| reduce_angle(z.arg()))
                    .fold(f64::INFINITY, f64::min);
                out.push(Frequency::theta(best));
            }
        }
    }
    for f in extra {
        out.push(Frequency::new(sys.domain(), f.value));
    }
    dedup_frequencies(out)
}

fn dedup_frequencies(freqs: Vec<Frequency>) -> Vec<Frequency> {
    let mut out: Vec<Frequency> = Vec::with_capacity(freqs.len());
    for f in freqs {
        if !f.value.is_finite() {
            continue;
        }
        let dup = out.iter().any(|g| (g.value - f.value).abs() <= 1e-12 * f.value.abs().max(1.0));
        if !dup {
            out.push(f);
        }
    }
    out
}

/// Default number of spectrum seeds on the sparse path.
pub const SPARSE_SEED_COUNT: usize = 20;

/// Seeds for systems where a full eigensolve is not affordable: the constant
/// guesses plus the frequencies of `count` eigenvalues of `(A, E)` found by
/// shift-invert Arnoldi (near `s = 0` in continuous time, near `z = 1` in
/// discrete time), followed by `extra`.
pub fn sparse_seed_frequencies(sys: &StateSpaceSystem, count: usize, extra: &[Frequency]) -> Vec<Frequency> {
    let a = sys.a().to_sparse();
    let e = sys.e().map(|e| e.to_sparse());
    let shifts: [C64; 3] = match sys.domain() {
        Domain::Continuous => [C64::new(0.0, 0.0), C64::new(0.0, 1e-6), C64::new(1e-3, 1e-3)],
        Domain::Discrete => [C64::new(1.0, 0.0), C64::new(1.0, 1e-6), C64::new(0.999, 1e-3)],
    };
    let mut ritz = Vec::new();
    for s in shifts {
        if let Some(r) = linalg::shift_invert_ritz_values(&a, e.as_ref(), s, count) {
            ritz = r;
            break;
        }
    }
    let mut out = match sys.domain() {
        Domain::Continuous => vec![Frequency::omega(0.0)],
        Domain::Discrete => vec![Frequency::theta(0.0), Frequency::theta(PI)],
    };
    for z in ritz {
        if !(z.re.is_finite() && z.im.is_finite()) {
            continue;
        }
        out.push(match sys.domain() {
            Domain::Continuous => Frequency::omega(z.im),
            Domain::Discrete => Frequency::theta(z.arg()),
        });
    }
    for f in extra {
        out.push(Frequency::new(sys.domain(), f.value));
    }
    dedup_frequencies(out)
}

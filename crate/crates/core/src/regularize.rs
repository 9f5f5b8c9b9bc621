//! Orthonormal-series regularization of a cylindrical process into a
//! `Φ'_q`-valued path, radonification through an operator, and a priori
//! truncation planning.
//!
//! A [`RegularizedPath`] stores the coordinates `c_j(t) = X_t(φ_j)` of
//! `Y_t = Σ_{j≤m} c_j(t) f_j` on the event set of the underlying sample. Since
//! `(f_j)` is `q′`-orthonormal, `q′(Y_t)² = Σ_j c_j(t)²`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cylindrical::{
    check_time, compose, interpolate, ComposedProcess, CylindricalLevy, EventPath, PathSource,
};
use crate::error::{check_dim, Error, Result};
use crate::operators::{sazonov_seminorm, LinearOperator};
use crate::space::{domination_constant, HilbertianSeminorm, ModelVector, OrthonormalSystem, DEFAULT_GS_TOL};

/// `Y_t = Σ_{j≤m} c_j(t) f_j` on the event set of one sample.
#[derive(Clone, Debug)]
pub struct RegularizedPath {
    system: Arc<OrthonormalSystem>,
    m: usize,
    times: Vec<f64>,
    grid_index: Vec<usize>,
    horizon: f64,
    coords: Vec<EventPath>,
    tail_bound: Option<f64>,
    kernel_deviation: f64,
    seed: u64,
    replica: u64,
}

/// `t ↦ q′(Y_t)` on the event set, with left limits and the running sup.
#[derive(Clone, Debug, PartialEq)]
pub struct QNormPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub left: Vec<f64>,
    pub sup: f64,
}

/// Build `Y` from `c_j = X(φ_j)`, `j ≤ m`.
///
/// The sample is also evaluated on every kernel residual of the system; the
/// largest absolute value found is stored as [`RegularizedPath::kernel_deviation`].
pub fn regularize_series<P: PathSource>(sample: &P, system: &Arc<OrthonormalSystem>, m: usize) -> Result<RegularizedPath> {
    if m > system.len() {
        return Err(Error::TruncationTooLarge { m, size: system.len() });
    }
    check_dim(system.dim(), sample.test_dim())?;
    let coords = system.vectors()[..m].iter().map(|phi| sample.eval_events(phi)).collect::<Result<Vec<_>>>()?;
    let mut kernel_deviation = 0.0f64;
    for (_, r) in system.kernel_residuals() {
        if r.is_zero() {
            continue;
        }
        let p = sample.eval_events(r)?;
        kernel_deviation = p.values.iter().chain(&p.left).fold(kernel_deviation, |a, v| a.max(v.abs()));
    }
    let (seed, replica) = sample.stream_id();
    Ok(RegularizedPath {
        system: Arc::clone(system),
        m,
        times: sample.times().to_vec(),
        grid_index: sample.grid_index().to_vec(),
        horizon: sample.horizon(),
        coords,
        tail_bound: None,
        kernel_deviation,
        seed,
        replica,
    })
}

impl RegularizedPath {
    pub fn system(&self) -> &Arc<OrthonormalSystem> {
        &self.system
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn grid_index(&self) -> &[usize] {
        &self.grid_index
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Coordinate path `c_j` (0-based `j`).
    pub fn coord(&self, j: usize) -> &EventPath {
        &self.coords[j]
    }

    pub fn coords(&self) -> &[EventPath] {
        &self.coords
    }

    pub fn tail_bound(&self) -> Option<f64> {
        self.tail_bound
    }

    pub fn with_tail_bound(mut self, bound: Option<f64>) -> Self {
        self.tail_bound = bound;
        self
    }

    /// Largest `|X_t(r)|` over kernel residuals `r` of the system.
    pub fn kernel_deviation(&self) -> f64 {
        self.kernel_deviation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replica(&self) -> u64 {
        self.replica
    }

    fn weights(&self, phi: &ModelVector) -> Result<Vec<f64>> {
        check_dim(self.system.dim(), phi.dim())?;
        phi.ensure_finite()?;
        Ok(self.system.duals()[..self.m].iter().map(|f| f.dot(phi)).collect())
    }

    /// `⟨Y_t, φ⟩` and `⟨Y_{t-}, φ⟩` at every event time.
    pub fn pairing_events(&self, phi: &ModelVector) -> Result<EventPath> {
        let w = self.weights(phi)?;
        let e = self.times.len();
        let mut out = EventPath::zeros(e);
        for (c, &wj) in self.coords.iter().zip(&w) {
            if wj == 0.0 {
                continue;
            }
            for k in 0..e {
                out.values[k] += wj * c.values[k];
                out.left[k] += wj * c.left[k];
            }
        }
        Ok(out)
    }

    /// `⟨Y_t, φ⟩ = Σ_{j≤m} c_j(t) ⟨f_j, φ⟩`.
    pub fn eval_dual_pairing(&self, phi: &ModelVector, t: f64) -> Result<f64> {
        check_time(t, self.horizon)?;
        let p = self.pairing_events(phi)?;
        Ok(interpolate(&self.times, &p.values, &p.left, t))
    }

    /// `Y_{t_k}` as a dual vector, paired with test vectors by the Euclidean product.
    pub fn state(&self, k: usize) -> ModelVector {
        let mut out = ModelVector::zeros(self.system.dim());
        for (c, f) in self.coords.iter().zip(self.system.duals()) {
            out.axpy(c.values[k], f);
        }
        out
    }

    /// Coordinate values `c_j(t_k)` at one event.
    pub fn coords_at(&self, k: usize) -> Vec<f64> {
        self.coords.iter().map(|c| c.values[k]).collect()
    }

    /// Coordinate values `c_j(t)` at an arbitrary time.
    pub fn coords_at_time(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t, self.horizon)?;
        Ok(self.coords.iter().map(|c| interpolate(&self.times, &c.values, &c.left, t)).collect())
    }

    /// Weights `⟨f_j, φ⟩`, `j ≤ m`, so that `⟨Y_t, φ⟩ = Σ_j c_j(t) w_j`.
    pub fn pairing_weights(&self, phi: &ModelVector) -> Result<Vec<f64>> {
        self.weights(phi)
    }

    /// `q′(Y_t)` on the event set.
    pub fn qnorm_path(&self) -> QNormPath {
        let e = self.times.len();
        let mut values = vec![0.0; e];
        let mut left = vec![0.0; e];
        for c in &self.coords {
            for k in 0..e {
                values[k] += c.values[k] * c.values[k];
                left[k] += c.left[k] * c.left[k];
            }
        }
        values.iter_mut().chain(left.iter_mut()).for_each(|v| *v = v.sqrt());
        let sup = values.iter().chain(&left).fold(0.0f64, |a, &b| a.max(b));
        QNormPath { times: self.times.clone(), values, left, sup }
    }

    /// `sup_t q′(Y_t)` over event values and left limits.
    pub fn sup_qnorm(&self) -> f64 {
        self.sup_qnorm_between(0, self.m)
    }

    /// `sup_t q′(Y^{hi}_t − Y^{lo}_t)`, i.e. the sup of `sqrt(Σ_{lo<j≤hi} c_j²)`.
    pub fn sup_qnorm_between(&self, lo: usize, hi: usize) -> f64 {
        let hi = hi.min(self.m);
        if lo >= hi {
            return 0.0;
        }
        let e = self.times.len();
        let mut best = 0.0f64;
        for k in 0..e {
            let (mut v, mut l) = (0.0, 0.0);
            for c in &self.coords[lo..hi] {
                v += c.values[k] * c.values[k];
                l += c.left[k] * c.left[k];
            }
            best = best.max(v).max(l);
        }
        best.sqrt()
    }

    /// The partial sum `Y^{m'}` for `m' ≤ m`.
    pub fn truncated(&self, m: usize) -> Result<RegularizedPath> {
        if m > self.m {
            return Err(Error::TruncationTooLarge { m, size: self.m });
        }
        let mut out = self.clone();
        out.coords.truncate(m);
        out.m = m;
        Ok(out)
    }
}

impl PathSource for RegularizedPath {
    fn test_dim(&self) -> usize {
        self.system.dim()
    }

    fn times(&self) -> &[f64] {
        &self.times
    }

    fn grid_index(&self) -> &[usize] {
        &self.grid_index
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn stream_id(&self) -> (u64, u64) {
        (self.seed, self.replica)
    }

    fn eval_events(&self, phi: &ModelVector) -> Result<EventPath> {
        self.pairing_events(phi)
    }
}

/// Precomputed radonification of `X` through `S` in the seminorm `q`.
///
/// Construction checks that `p_S = ‖S·‖` is dominated by a multiple of `q` and
/// builds the `q`-orthonormal system from the reference basis.
#[derive(Clone, Debug)]
pub struct Radonifier {
    process: ComposedProcess,
    system: Arc<OrthonormalSystem>,
    m: usize,
    domination_constant: f64,
    /// `‖Sφ_j‖²` for every vector of the system.
    image_mass: Vec<f64>,
}

impl Radonifier {
    pub fn new(x: CylindricalLevy, s: LinearOperator, q: &HilbertianSeminorm, m: usize) -> Result<Self> {
        check_dim(x.dim(), s.rows())?;
        check_dim(s.cols(), q.dim())?;
        let c = domination_constant(&sazonov_seminorm(&s), q)?;
        let system = OrthonormalSystem::from_standard_basis(q, DEFAULT_GS_TOL)?;
        if m > system.len() {
            return Err(Error::TruncationTooLarge { m, size: system.len() });
        }
        let image_mass = system.vectors().iter().map(|phi| s.apply_unchecked(phi).norm().powi(2)).collect();
        let process = compose(x, s)?;
        Ok(Self { process, system: Arc::new(system), m, domination_constant: c, image_mass })
    }

    pub fn process(&self) -> &ComposedProcess {
        &self.process
    }

    pub fn system(&self) -> &Arc<OrthonormalSystem> {
        &self.system
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn with_m(mut self, m: usize) -> Result<Self> {
        if m > self.system.len() {
            return Err(Error::TruncationTooLarge { m, size: self.system.len() });
        }
        self.m = m;
        Ok(self)
    }

    /// Smallest `c` with `‖Sφ‖ ≤ c·q(φ)`.
    pub fn domination_constant(&self) -> f64 {
        self.domination_constant
    }

    /// `Σ_{j>m} ‖Sφ_j‖²` over the system in use.
    pub fn discarded_mass(&self, m: usize) -> f64 {
        self.image_mass.iter().skip(m).sum()
    }

    /// Doob `L²` bound `4·K·Σ_{j>m} ‖Sφ_j‖²` on `E sup_t q′(Y − Y^m)²`, for martingale drivers.
    pub fn tail_bound(&self, m: usize, horizon: f64) -> Option<f64> {
        let base = self.process.base();
        if !base.is_martingale() {
            return None;
        }
        let k = base.moment_scale(2.0, horizon)?;
        Some(doob_constant(2.0) * k * self.discarded_mass(m))
    }

    /// One regularized replica: `c_j(t) = X_t(Sφ_j)`, `j ≤ m`.
    pub fn replica(&self, horizon: f64, resolution: usize, seed: u64, replica: u64) -> Result<RegularizedPath> {
        let sample = self.process.sample_paths(horizon, resolution, seed, replica)?;
        Ok(regularize_series(&sample, &self.system, self.m)?.with_tail_bound(self.tail_bound(self.m, horizon)))
    }
}

/// Sample `X` once, compose with `S`, and regularize in the `q`-orthonormal system.
#[allow(clippy::too_many_arguments)]
pub fn radonify(
    x: CylindricalLevy,
    s: LinearOperator,
    q: &HilbertianSeminorm,
    m: usize,
    horizon: f64,
    resolution: usize,
    seed: u64,
    replica: u64,
) -> Result<RegularizedPath> {
    Radonifier::new(x, s, q, m)?.replica(horizon, resolution, seed, replica)
}

/// `(r/(r−1))^r`
pub fn doob_constant(r: f64) -> f64 {
    (r / (r - 1.0)).powf(r)
}

fn check_order(r: f64) -> Result<()> {
    if r >= 2.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("moment order must be >= 2, got {r}")))
    }
}

/// `B(m) = C·K·Σ_{j>m} σ_j^r` with `C` the Doob constant for martingale
/// drivers and `1` otherwise, and `K` the drivers' moment scale at `T`.
pub fn truncation_tail_bound(
    s: &LinearOperator,
    x: &CylindricalLevy,
    m: usize,
    r: f64,
    horizon: f64,
    martingale: bool,
) -> Result<f64> {
    check_order(r)?;
    let k = moment_scale_or_err(x, r, horizon)?;
    let c = if martingale { doob_constant(r) } else { 1.0 };
    Ok(c * k * s.tail(m, r))
}

fn moment_scale_or_err(x: &CylindricalLevy, r: f64, horizon: f64) -> Result<f64> {
    x.moment_scale(r, horizon).ok_or_else(|| {
        Error::InvalidParameter(format!("driver `{}` has no finite centered moment scale of order {r}", x.label()))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    SchattenTail,
    DoobSchattenTail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub m: usize,
    pub r: f64,
    pub tol: f64,
    pub bound_kind: BoundKind,
    pub achieved_bound: f64,
}

/// Smallest `m` with `B(m) ≤ tol`.
pub fn choose_truncation(
    s: &LinearOperator,
    x: &CylindricalLevy,
    r: f64,
    tol: f64,
    horizon: f64,
    martingale: bool,
) -> Result<TruncationPlan> {
    check_order(r)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let k = moment_scale_or_err(x, r, horizon)?;
    let c = if martingale { doob_constant(r) } else { 1.0 };
    let profile = s.tail_profile(r);
    let m = profile.iter().position(|&t| c * k * t <= tol).unwrap_or(profile.len() - 1);
    Ok(TruncationPlan {
        m,
        r,
        tol,
        bound_kind: if martingale { BoundKind::DoobSchattenTail } else { BoundKind::SchattenTail },
        achieved_bound: c * k * profile[m],
    })
}

/// Mean and standard error of `sup_t q′(Y_t)^r` over replicas.
pub fn sup_moment_estimate(paths: &[RegularizedPath], r: f64) -> Result<(f64, f64)> {
    if paths.len() < 2 {
        return Err(Error::TooFewReplicas { needed: 2, got: paths.len() });
    }
    let xs: Vec<f64> = paths.iter().map(|p| p.sup_qnorm().powf(r)).collect();
    Ok(crate::stats::mean_stderr(&xs))
}

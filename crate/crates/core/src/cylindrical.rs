//! Coordinate-driven cylindrical Lévy processes `X_t(φ) = Σ_j φ_j β_j(t)`.
//!
//! Each coordinate `β_j` is an independent real Lévy process. A sample is
//! stored on the event set `grid ∪ jump times`, on which every value is exact
//! in law: jumps are drawn first, then Gaussian and stable increments are drawn
//! over the merged event intervals. Values between events are linear
//! interpolants of the continuous part, for display only.
//!
//! RNG streams: the ChaCha8 key is the 256-bit tuple
//! `(seed, replica, coordinate, purpose)`, so every (replica, coordinate) pair
//! owns an independent stream regardless of evaluation order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::operators::LinearOperator;
use crate::space::ModelVector;

const PURPOSE_JUMPS: u64 = 0;
const PURPOSE_CONTINUOUS: u64 = 1;

/// Independent generator for one `(seed, replica, coordinate, purpose)` cell.
pub fn stream_rng(seed: u64, replica: u64, coord: u64, purpose: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&replica.to_le_bytes());
    key[16..24].copy_from_slice(&coord.to_le_bytes());
    key[24..].copy_from_slice(&purpose.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpLaw {
    Normal { mean: f64, std: f64 },
    Constant { value: f64 },
    /// `+size` with probability `prob`, `-size` otherwise.
    TwoPoint { size: f64, prob: f64 },
}

impl JumpLaw {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            JumpLaw::Normal { mean, std } => mean.is_finite() && std.is_finite() && std >= 0.0,
            JumpLaw::Constant { value } => value.is_finite(),
            JumpLaw::TwoPoint { size, prob } => size.is_finite() && (0.0..=1.0).contains(&prob),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid jump law {self:?}")))
        }
    }

    pub fn char_function(&self, u: f64) -> Complex64 {
        match *self {
            JumpLaw::Normal { mean, std } => Complex64::new(-0.5 * std * std * u * u, mean * u).exp(),
            JumpLaw::Constant { value } => Complex64::new(0.0, u * value).exp(),
            JumpLaw::TwoPoint { size, prob } => {
                Complex64::new(0.0, u * size).exp() * prob + Complex64::new(0.0, -u * size).exp() * (1.0 - prob)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            JumpLaw::Normal { mean, .. } => mean,
            JumpLaw::Constant { value } => value,
            JumpLaw::TwoPoint { size, prob } => size * (2.0 * prob - 1.0),
        }
    }

    pub fn second_moment(&self) -> f64 {
        match *self {
            JumpLaw::Normal { mean, std } => mean * mean + std * std,
            JumpLaw::Constant { value } => value * value,
            JumpLaw::TwoPoint { size, .. } => size * size,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            JumpLaw::Normal { mean, std } => mean + std * rng.sample::<f64, _>(StandardNormal),
            JumpLaw::Constant { value } => value,
            JumpLaw::TwoPoint { size, prob } => {
                if rng.random::<f64>() < prob {
                    size
                } else {
                    -size
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JumpPart {
    None,
    CompoundPoisson { rate: f64, law: JumpLaw },
    /// Symmetric α-stable with `E e^{iuL_1} = exp(-c^α |u|^α)`.
    Stable { alpha: f64, scale: f64 },
}

/// A real Lévy process with triplet-style parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevyDriver {
    pub drift: f64,
    pub variance: f64,
    pub jumps: JumpPart,
}

impl LevyDriver {
    pub fn wiener() -> Self {
        Self { drift: 0.0, variance: 1.0, jumps: JumpPart::None }
    }

    pub fn zero() -> Self {
        Self { drift: 0.0, variance: 0.0, jumps: JumpPart::None }
    }

    pub fn compound_poisson(rate: f64, law: JumpLaw) -> Result<Self> {
        let d = Self { drift: 0.0, variance: 0.0, jumps: JumpPart::CompoundPoisson { rate, law } };
        d.validate()?;
        Ok(d)
    }

    /// Symmetric α-stable driver; `α = 2` is routed to the Gaussian with variance `2c²`.
    pub fn alpha_stable(alpha: f64, scale: f64) -> Result<Self> {
        if alpha == 2.0 && scale > 0.0 && scale.is_finite() {
            return Ok(Self { drift: 0.0, variance: 2.0 * scale * scale, jumps: JumpPart::None });
        }
        let d = Self { drift: 0.0, variance: 0.0, jumps: JumpPart::Stable { alpha, scale } };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.drift.is_finite() || !self.variance.is_finite() || self.variance < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "driver needs finite drift and nonnegative variance, got b={}, σ²={}",
                self.drift, self.variance
            )));
        }
        match self.jumps {
            JumpPart::None => Ok(()),
            JumpPart::CompoundPoisson { rate, law } => {
                if !(rate > 0.0) || !rate.is_finite() {
                    return Err(Error::InvalidParameter(format!("jump rate must be positive, got {rate}")));
                }
                law.validate()
            }
            JumpPart::Stable { alpha, scale } => {
                if !(alpha > 0.0 && alpha < 2.0) {
                    return Err(Error::InvalidParameter(format!("stability index must lie in (0, 2), got {alpha}")));
                }
                if !(scale > 0.0) || !scale.is_finite() {
                    return Err(Error::InvalidParameter(format!("stable scale must be positive, got {scale}")));
                }
                Ok(())
            }
        }
    }

    /// Lévy exponent `ψ(u)` with `E e^{iuL_t} = e^{tψ(u)}`.
    pub fn exponent(&self, u: f64) -> Complex64 {
        let mut psi = Complex64::new(-0.5 * self.variance * u * u, self.drift * u);
        match self.jumps {
            JumpPart::None => {}
            JumpPart::CompoundPoisson { rate, law } => psi += (law.char_function(u) - 1.0) * rate,
            JumpPart::Stable { alpha, scale } => psi -= (scale * u.abs()).powf(alpha),
        }
        psi
    }

    pub fn has_jumps(&self) -> bool {
        !matches!(self.jumps, JumpPart::None)
    }

    /// Piecewise constant between jumps: compound Poisson with no drift and no Gaussian part.
    pub fn is_pure_jump(&self) -> bool {
        matches!(self.jumps, JumpPart::CompoundPoisson { .. }) && self.drift == 0.0 && self.variance == 0.0
    }

    pub fn is_deterministic(&self) -> bool {
        self.variance == 0.0 && matches!(self.jumps, JumpPart::None)
    }

    /// `E L_1`, if finite.
    pub fn mean_rate(&self) -> Option<f64> {
        match self.jumps {
            JumpPart::None => Some(self.drift),
            JumpPart::CompoundPoisson { rate, law } => Some(self.drift + rate * law.mean()),
            JumpPart::Stable { alpha, .. } if alpha > 1.0 => Some(self.drift),
            JumpPart::Stable { .. } => None,
        }
    }

    /// `Var L_1`, if finite.
    pub fn variance_rate(&self) -> Option<f64> {
        match self.jumps {
            JumpPart::None => Some(self.variance),
            JumpPart::CompoundPoisson { rate, law } => Some(self.variance + rate * law.second_moment()),
            JumpPart::Stable { .. } => None,
        }
    }

    pub fn is_martingale(&self) -> bool {
        self.mean_rate() == Some(0.0)
    }

    pub fn jump_rate(&self) -> f64 {
        match self.jumps {
            JumpPart::CompoundPoisson { rate, .. } => rate,
            _ => 0.0,
        }
    }

    /// Scale `K` with `E|L_T(w)|^r ≤ K·|w|^r` for centered drivers:
    /// `T^{r/2} σ^r 2^{r/2} Γ((r+1)/2)/√π` for Gaussian drivers (any `r`),
    /// and `T·Var L_1` for `r = 2` with finite variance.
    pub fn moment_scale(&self, r: f64, horizon: f64) -> Option<f64> {
        if !self.is_martingale() {
            return None;
        }
        match self.jumps {
            JumpPart::None => Some(gaussian_abs_moment(r) * (self.variance * horizon).powf(r / 2.0)),
            _ if r == 2.0 => self.variance_rate().map(|v| v * horizon),
            _ => None,
        }
    }

    fn sample_jumps<R: Rng>(&self, horizon: f64, rng: &mut R) -> Vec<(f64, f64)> {
        let JumpPart::CompoundPoisson { rate, law } = self.jumps else {
            return Vec::new();
        };
        let count = Poisson::new(rate * horizon).map(|p| p.sample(rng)).unwrap_or(0.0) as usize;
        let mut times: Vec<f64> = (0..count)
            .map(|_| {
                // uniform on (0, T]
                horizon * (1.0 - rng.random::<f64>())
            })
            .collect();
        times.sort_by(f64::total_cmp);
        times.into_iter().map(|t| (t, law.sample(rng))).collect()
    }

    fn continuous_increment<R: Rng>(&self, dt: f64, rng: &mut R) -> f64 {
        let mut inc = self.drift * dt;
        if self.variance > 0.0 {
            inc += (self.variance * dt).sqrt() * rng.sample::<f64, _>(StandardNormal);
        }
        if let JumpPart::Stable { alpha, scale } = self.jumps {
            inc += scale * dt.powf(1.0 / alpha) * symmetric_stable(alpha, rng);
        }
        inc
    }
}

/// `E|Z|^r` for `Z ~ N(0, 1)`.
pub fn gaussian_abs_moment(r: f64) -> f64 {
    2f64.powf(r / 2.0) * statrs::function::gamma::gamma((r + 1.0) / 2.0) / PI.sqrt()
}

/// Chambers–Mallows–Stuck draw from the standard symmetric α-stable law,
/// characteristic function `exp(-|u|^α)`.
pub fn symmetric_stable<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    let w: f64 = rng.sample(Exp1);
    if alpha == 1.0 {
        return v.tan();
    }
    (alpha * v).sin() / v.cos().powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Config form of a driver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DriverSpec {
    Zero,
    Wiener {
        #[serde(default = "one")]
        variance: f64,
        #[serde(default)]
        drift: f64,
    },
    Cpoisson {
        rate: f64,
        jump: JumpLaw,
        #[serde(default)]
        drift: f64,
        #[serde(default)]
        variance: f64,
    },
    Stable {
        alpha: f64,
        scale: f64,
        #[serde(default)]
        drift: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl DriverSpec {
    pub fn build(&self) -> Result<LevyDriver> {
        let d = match *self {
            DriverSpec::Zero => LevyDriver::zero(),
            DriverSpec::Wiener { variance, drift } => LevyDriver { drift, variance, jumps: JumpPart::None },
            DriverSpec::Cpoisson { rate, jump, drift, variance } => {
                LevyDriver { drift, variance, jumps: JumpPart::CompoundPoisson { rate, law: jump } }
            }
            DriverSpec::Stable { alpha, scale, drift } => {
                let mut d = LevyDriver::alpha_stable(alpha, scale)?;
                d.drift = drift;
                d
            }
        };
        d.validate()?;
        Ok(d)
    }
}

/// Requested process family for [`make_cylindrical`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProcessKind {
    Wiener,
    CompoundPoisson { rate: f64, law: JumpLaw },
    AlphaStable { alpha: f64, scale: f64 },
    Composite(LevyDriver),
}

/// `X_t(φ) = Σ_j φ_j β_j(t)` with independent drivers `β_j`.
#[derive(Clone, Debug)]
pub struct CylindricalLevy {
    label: String,
    drivers: Vec<LevyDriver>,
}

pub fn make_cylindrical(kind: ProcessKind, n: usize) -> Result<CylindricalLevy> {
    let (label, driver) = match kind {
        ProcessKind::Wiener => ("wiener", LevyDriver::wiener()),
        ProcessKind::CompoundPoisson { rate, law } => ("compound_poisson", LevyDriver::compound_poisson(rate, law)?),
        ProcessKind::AlphaStable { alpha, scale } => ("alpha_stable", LevyDriver::alpha_stable(alpha, scale)?),
        ProcessKind::Composite(d) => ("composite", d),
    };
    CylindricalLevy::iid(label, driver, n)
}

impl CylindricalLevy {
    pub fn new(label: impl Into<String>, drivers: Vec<LevyDriver>) -> Result<Self> {
        if drivers.is_empty() {
            return Err(Error::InvalidParameter("cylindrical process needs at least one driver".into()));
        }
        for d in &drivers {
            d.validate()?;
        }
        Ok(Self { label: label.into(), drivers })
    }

    pub fn iid(label: impl Into<String>, driver: LevyDriver, n: usize) -> Result<Self> {
        Self::new(label, vec![driver; n])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.drivers.len()
    }

    pub fn drivers(&self) -> &[LevyDriver] {
        &self.drivers
    }

    pub fn is_martingale(&self) -> bool {
        self.drivers.iter().all(LevyDriver::is_martingale)
    }

    pub fn is_pure_jump(&self) -> bool {
        self.drivers.iter().all(|d| d.is_pure_jump() || *d == LevyDriver::zero())
    }

    pub fn is_wiener_like(&self) -> bool {
        self.drivers.iter().all(|d| d.drift == 0.0 && !d.has_jumps())
    }

    /// Largest per-coordinate [`LevyDriver::moment_scale`]; `None` if any is unavailable.
    pub fn moment_scale(&self, r: f64, horizon: f64) -> Option<f64> {
        self.drivers
            .iter()
            .map(|d| d.moment_scale(r, horizon))
            .try_fold(0.0f64, |m, k| k.map(|k| m.max(k)))
    }

    /// `E exp(i X_t(φ)) = exp(t Σ_j ψ_j(φ_j))`.
    pub fn char_function(&self, phi: &ModelVector, t: f64) -> Result<Complex64> {
        check_dim(self.dim(), phi.dim())?;
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
        }
        let s: Complex64 = self.drivers.iter().zip(phi.as_slice()).map(|(d, &u)| d.exponent(u)).sum();
        Ok((s * t).exp())
    }

    pub fn sample_paths(&self, horizon: f64, resolution: usize, seed: u64, replica: u64) -> Result<CylPathSample> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidParameter(format!("horizon must be positive, got {horizon}")));
        }
        if resolution == 0 {
            return Err(Error::InvalidParameter("grid resolution must be at least 1".into()));
        }
        let n = self.dim();
        let jumps: Vec<Vec<(f64, f64)>> = self
            .drivers
            .iter()
            .enumerate()
            .map(|(i, d)| d.sample_jumps(horizon, &mut stream_rng(seed, replica, i as u64, PURPOSE_JUMPS)))
            .collect();

        let grid: Vec<f64> = (0..=resolution).map(|k| k as f64 * horizon / resolution as f64).collect();
        let mut jump_times: Vec<f64> = jumps.iter().flatten().map(|&(t, _)| t).collect();
        jump_times.sort_by(f64::total_cmp);
        let mut times = Vec::with_capacity(grid.len() + jump_times.len());
        let mut grid_index = Vec::with_capacity(grid.len());
        let (mut gi, mut ji) = (0, 0);
        while gi < grid.len() || ji < jump_times.len() {
            let next = match (grid.get(gi), jump_times.get(ji)) {
                (Some(&g), Some(&j)) if j < g => {
                    ji += 1;
                    j
                }
                (Some(&g), _) => {
                    grid_index.push(times.len());
                    gi += 1;
                    g
                }
                (None, Some(&j)) => {
                    ji += 1;
                    j
                }
                (None, None) => unreachable!(),
            };
            if times.last() == Some(&next) {
                if let Some(last) = grid_index.last_mut() {
                    if *last == times.len() {
                        *last = times.len() - 1;
                    }
                }
                continue;
            }
            times.push(next);
        }

        let e = times.len();
        let mut values = vec![0.0; n * e];
        let mut left = vec![0.0; n * e];
        for (i, d) in self.drivers.iter().enumerate() {
            let row_v = &mut values[i * e..(i + 1) * e];
            let row_l = &mut left[i * e..(i + 1) * e];
            let mut rng = (!d.is_deterministic() || d.drift != 0.0)
                .then(|| stream_rng(seed, replica, i as u64, PURPOSE_CONTINUOUS));
            let mut cont = 0.0;
            let mut jsum = 0.0;
            let mut next_jump = 0;
            let own = &jumps[i];
            for k in 0..e {
                if k > 0 {
                    if let Some(rng) = rng.as_mut() {
                        cont += d.continuous_increment(times[k] - times[k - 1], rng);
                    }
                }
                row_l[k] = cont + jsum;
                while next_jump < own.len() && own[next_jump].0 == times[k] {
                    jsum += own[next_jump].1;
                    next_jump += 1;
                }
                row_v[k] = cont + jsum;
            }
        }

        Ok(CylPathSample { dim: n, horizon, resolution, seed, replica, times, grid_index, values, left, jumps })
    }
}

/// Values of a real path at every event time together with its left limits.
#[derive(Clone, Debug, PartialEq)]
pub struct EventPath {
    pub values: Vec<f64>,
    pub left: Vec<f64>,
}

impl EventPath {
    pub fn zeros(len: usize) -> Self {
        Self { values: vec![0.0; len], left: vec![0.0; len] }
    }
}

/// Càdlàg evaluation at arbitrary `t` from event values: exact at events,
/// linear in the continuous part between them.
pub fn interpolate(times: &[f64], values: &[f64], left: &[f64], t: f64) -> f64 {
    let k = times.partition_point(|&s| s <= t).saturating_sub(1);
    if times[k] == t || k + 1 >= times.len() {
        return values[k];
    }
    let w = (t - times[k]) / (times[k + 1] - times[k]);
    values[k] + w * (left[k + 1] - values[k])
}

/// Anything that evaluates a cylindrical process pathwise on a fixed event set.
pub trait PathSource {
    /// Dimension of the test space.
    fn test_dim(&self) -> usize;
    fn times(&self) -> &[f64];
    /// Event index of each grid point `k·T/K`.
    fn grid_index(&self) -> &[usize];
    fn horizon(&self) -> f64;
    /// `(seed, replica)` of the underlying driver sample.
    fn stream_id(&self) -> (u64, u64);
    /// `X_t(φ)` and `X_{t-}(φ)` at every event time.
    fn eval_events(&self, phi: &ModelVector) -> Result<EventPath>;

    fn eval(&self, phi: &ModelVector, t: f64) -> Result<f64> {
        check_time(t, self.horizon())?;
        let p = self.eval_events(phi)?;
        Ok(interpolate(self.times(), &p.values, &p.left, t))
    }
}

pub(crate) fn check_time(t: f64, horizon: f64) -> Result<()> {
    if (0.0..=horizon).contains(&t) {
        Ok(())
    } else {
        Err(Error::TimeOutOfRange { t, horizon })
    }
}

/// One realization of all driver paths.
#[derive(Clone, Debug, PartialEq)]
pub struct CylPathSample {
    dim: usize,
    horizon: f64,
    resolution: usize,
    seed: u64,
    replica: u64,
    times: Vec<f64>,
    grid_index: Vec<usize>,
    values: Vec<f64>,
    left: Vec<f64>,
    jumps: Vec<Vec<(f64, f64)>>,
}

/// Borrowed view of one coordinate path.
#[derive(Clone, Copy, Debug)]
pub struct DriverPath<'a> {
    pub times: &'a [f64],
    pub values: &'a [f64],
    pub left: &'a [f64],
    pub jumps: &'a [(f64, f64)],
}

impl DriverPath<'_> {
    pub fn value(&self, t: f64) -> f64 {
        interpolate(self.times, self.values, self.left, t)
    }
}

impl CylPathSample {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replica(&self) -> u64 {
        self.replica
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn driver(&self, i: usize) -> DriverPath<'_> {
        let e = self.times.len();
        DriverPath {
            times: &self.times,
            values: &self.values[i * e..(i + 1) * e],
            left: &self.left[i * e..(i + 1) * e],
            jumps: &self.jumps[i],
        }
    }

    pub fn jumps(&self, i: usize) -> &[(f64, f64)] {
        &self.jumps[i]
    }

    pub fn total_jumps(&self) -> usize {
        self.jumps.iter().map(Vec::len).sum()
    }
}

impl PathSource for CylPathSample {
    fn test_dim(&self) -> usize {
        self.dim
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
        check_dim(self.dim, phi.dim())?;
        phi.ensure_finite()?;
        let e = self.times.len();
        let mut out = EventPath::zeros(e);
        for (i, w) in phi.nonzeros() {
            let v = &self.values[i * e..(i + 1) * e];
            let l = &self.left[i * e..(i + 1) * e];
            for k in 0..e {
                out.values[k] += w * v[k];
                out.left[k] += w * l[k];
            }
        }
        Ok(out)
    }
}

/// `X ∘ S`: a cylindrical process on the domain of `S`.
#[derive(Clone, Debug)]
pub struct ComposedProcess {
    base: CylindricalLevy,
    operator: LinearOperator,
}

pub fn compose(base: CylindricalLevy, operator: LinearOperator) -> Result<ComposedProcess> {
    check_dim(base.dim(), operator.rows())?;
    Ok(ComposedProcess { base, operator })
}

impl ComposedProcess {
    pub fn base(&self) -> &CylindricalLevy {
        &self.base
    }

    pub fn operator(&self) -> &LinearOperator {
        &self.operator
    }

    pub fn dim(&self) -> usize {
        self.operator.cols()
    }

    pub fn char_function(&self, phi: &ModelVector, t: f64) -> Result<Complex64> {
        let s_phi = self.operator.apply(phi)?;
        self.base.char_function(&s_phi, t)
    }

    pub fn sample_paths(&self, horizon: f64, resolution: usize, seed: u64, replica: u64) -> Result<ComposedSample<'_>> {
        Ok(ComposedSample { base: self.base.sample_paths(horizon, resolution, seed, replica)?, operator: &self.operator })
    }
}

/// A driver sample read through `S`: `φ ↦ X_t(Sφ)`.
#[derive(Clone, Debug)]
pub struct ComposedSample<'a> {
    pub base: CylPathSample,
    pub operator: &'a LinearOperator,
}

impl PathSource for ComposedSample<'_> {
    fn test_dim(&self) -> usize {
        self.operator.cols()
    }

    fn times(&self) -> &[f64] {
        self.base.times()
    }

    fn grid_index(&self) -> &[usize] {
        self.base.grid_index()
    }

    fn horizon(&self) -> f64 {
        self.base.horizon()
    }

    fn stream_id(&self) -> (u64, u64) {
        self.base.stream_id()
    }

    fn eval_events(&self, phi: &ModelVector) -> Result<EventPath> {
        let s_phi = self.operator.apply(phi)?;
        self.base.eval_events(&s_phi)
    }
}

/// `ℝⁿ`-valued path `(X_t(φ_1), …, X_t(φ_n))` on the event set.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedPath {
    pub times: Vec<f64>,
    pub components: Vec<Vec<f64>>,
}

pub fn project<P: PathSource>(sample: &P, phis: &[ModelVector]) -> Result<ProjectedPath> {
    let components = phis.iter().map(|phi| sample.eval_events(phi).map(|p| p.values)).collect::<Result<_>>()?;
    Ok(ProjectedPath { times: sample.times().to_vec(), components })
}

//! Truncated sequence-space model of the test space.
//!
//! Every test vector lives in `span(e_1, …, e_N)` and every Hilbertian
//! seminorm is a positive-semidefinite Gram matrix `G` with
//! `p(φ) = sqrt(φᵀ G φ)`. Dual elements are represented inside the same
//! ambient space and act through the Euclidean pairing `⟨f, φ⟩ = Σ f_i φ_i`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Default relative threshold used when routing Gram–Schmidt inputs to the kernel.
pub const DEFAULT_GS_TOL: f64 = 1e-10;

/// Relative PSD tolerance applied when the caller does not provide one.
pub const DEFAULT_PSD_RTOL: f64 = 1e-10;

/// A finite coordinate vector with respect to the reference basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModelVector(Vec<f64>);

impl ModelVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("model vector must have positive dimension".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("model vector"));
        }
        Ok(Self(coeffs))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// The reference basis vector `e_k` (zero-based `k`).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        Self(v)
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<f64>) -> Self {
        Self(coeffs)
    }

    pub(crate) fn from_dvector(v: &DVector<f64>) -> Self {
        Self(v.iter().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    /// Euclidean pairing `⟨self, other⟩`.
    pub fn dot(&self, other: &ModelVector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &ModelVector) {
        debug_assert_eq!(self.dim(), x.dim());
        for (s, xi) in self.0.iter_mut().zip(&x.0) {
            *s += a * xi;
        }
    }

    pub fn scaled(&self, a: f64) -> ModelVector {
        ModelVector(self.0.iter().map(|c| a * c).collect())
    }

    /// Indices and values of the nonzero coordinates.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0.iter().copied().enumerate().filter(|&(_, c)| c != 0.0)
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        if self.0.iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("model vector"))
        }
    }
}

impl Add for &ModelVector {
    type Output = ModelVector;
    fn add(self, rhs: &ModelVector) -> ModelVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector addition");
        ModelVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ModelVector {
    type Output = ModelVector;
    fn sub(self, rhs: &ModelVector) -> ModelVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector subtraction");
        ModelVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&ModelVector> for f64 {
    type Output = ModelVector;
    fn mul(self, rhs: &ModelVector) -> ModelVector {
        rhs.scaled(self)
    }
}

impl Neg for &ModelVector {
    type Output = ModelVector;
    fn neg(self) -> ModelVector {
        self.scaled(-1.0)
    }
}

#[derive(Clone, Debug)]
enum Gram {
    Diagonal(Vec<f64>),
    /// The symmetrized Gram and a range factor `F = U_r Λ_r^{1/2}` with
    /// `F Fᵀ` equal to the Gram with kernel eigenvalues set to zero.
    Dense(DMatrix<f64>, DMatrix<f64>),
}

/// Eigen-decomposition of the Gram matrix. For diagonal Grams the eigenvectors
/// are the reference basis in index order; dense spectra are sorted descending.
#[derive(Clone, Debug)]
struct Spectrum {
    values: Vec<f64>,
    vectors: Option<DMatrix<f64>>,
}

/// A seminorm `p(φ) = sqrt(φᵀ G φ)` induced by a PSD Gram matrix.
#[derive(Clone, Debug)]
pub struct HilbertianSeminorm {
    label: String,
    gram: Gram,
    tol_psd: f64,
    spectrum: Spectrum,
}

impl HilbertianSeminorm {
    pub fn diagonal(label: impl Into<String>, diag: Vec<f64>) -> Result<Self> {
        Self::diagonal_with_tol(label, diag, None)
    }

    pub fn diagonal_with_tol(label: impl Into<String>, mut diag: Vec<f64>, tol_psd: Option<f64>) -> Result<Self> {
        let label = label.into();
        if diag.is_empty() {
            return Err(Error::InvalidParameter("seminorm must have positive dimension".into()));
        }
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFinite("gram diagonal"));
        }
        let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let tol = resolve_tol(tol_psd, scale)?;
        for d in diag.iter_mut() {
            if *d < -tol {
                return Err(Error::NotPositiveSemidefinite { label, eigenvalue: *d, tol });
            }
            if *d < 0.0 {
                *d = 0.0;
            }
        }
        let spectrum = Spectrum { values: diag.clone(), vectors: None };
        Ok(Self { label, gram: Gram::Diagonal(diag), tol_psd: tol, spectrum })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal("identity", vec![1.0; dim]).expect("identity gram is valid")
    }

    pub fn dense(label: impl Into<String>, gram: DMatrix<f64>) -> Result<Self> {
        Self::dense_with_tol(label, gram, None)
    }

    pub fn dense_with_tol(label: impl Into<String>, gram: DMatrix<f64>, tol_psd: Option<f64>) -> Result<Self> {
        let label = label.into();
        let n = gram.nrows();
        if n == 0 || gram.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "gram matrix `{label}` must be square and nonempty, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        if gram.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gram matrix"));
        }
        let scale = gram.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let asymmetry = (&gram - gram.transpose()).iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if asymmetry > 1e-12 * scale.max(f64::MIN_POSITIVE) && asymmetry > 0.0 {
            return Err(Error::NotSymmetric { label, asymmetry });
        }
        let gram = (&gram + gram.transpose()) * 0.5;
        let tol = resolve_tol(tol_psd, scale)?;
        let eig = gram.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let mut values = Vec::with_capacity(n);
        let mut vectors = DMatrix::zeros(n, n);
        for (col, &idx) in order.iter().enumerate() {
            let mut lambda = eig.eigenvalues[idx];
            if lambda < -tol {
                return Err(Error::NotPositiveSemidefinite { label, eigenvalue: lambda, tol });
            }
            if lambda < 0.0 {
                lambda = 0.0;
            }
            values.push(lambda);
            let mut v = eig.eigenvectors.column(idx).into_owned();
            // deterministic sign: largest-magnitude entry positive
            let (imax, _) = v.iter().enumerate().fold((0, 0.0f64), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
            if v[imax] < 0.0 {
                v.neg_mut();
            }
            vectors.set_column(col, &v);
        }
        let spectrum = Spectrum { values, vectors: Some(vectors) };
        let mut out = Self { label, gram: Gram::Dense(gram, DMatrix::zeros(n, 0)), tol_psd: tol, spectrum };
        let rank_tol = out.rank_tol();
        let range: Vec<usize> = (0..n).filter(|&k| out.spectrum.values[k] > rank_tol).collect();
        let vecs = out.spectrum.vectors.as_ref().expect("dense spectrum");
        let factor = DMatrix::from_fn(n, range.len(), |i, c| vecs[(i, range[c])] * out.spectrum.values[range[c]].sqrt());
        if let Gram::Dense(_, f) = &mut out.gram {
            *f = factor;
        }
        Ok(out)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        match &self.gram {
            Gram::Diagonal(d) => d.len(),
            Gram::Dense(g, _) => g.nrows(),
        }
    }

    pub fn tol_psd(&self) -> f64 {
        self.tol_psd
    }

    /// The diagonal of a diagonal Gram, if this seminorm has one.
    pub fn diagonal_entries(&self) -> Option<&[f64]> {
        match &self.gram {
            Gram::Diagonal(d) => Some(d),
            Gram::Dense(..) => None,
        }
    }

    /// Gram matrix with eigenvalues below the rank tolerance set to zero.
    pub fn gram_matrix(&self) -> DMatrix<f64> {
        match &self.gram {
            Gram::Diagonal(d) => DMatrix::from_diagonal(&DVector::from_column_slice(d)),
            Gram::Dense(_, f) => f * f.transpose(),
        }
    }

    /// Clamped eigenvalues of the Gram matrix.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    fn eigenvector(&self, k: usize) -> ModelVector {
        match &self.spectrum.vectors {
            None => ModelVector::basis(self.dim(), k),
            Some(v) => ModelVector::from_dvector(&v.column(k).into_owned()),
        }
    }

    /// Eigenvalues at or below this threshold are treated as kernel directions.
    pub fn rank_tol(&self) -> f64 {
        let lmax = self.spectrum.values.iter().fold(0.0f64, |m, &v| m.max(v));
        self.tol_psd.max(self.dim() as f64 * f64::EPSILON * lmax)
    }

    pub fn rank(&self) -> usize {
        let tol = self.rank_tol();
        self.spectrum.values.iter().filter(|&&v| v > tol).count()
    }

    /// An orthonormal (Euclidean) basis of `ker(G)`.
    pub fn kernel_basis(&self) -> Vec<ModelVector> {
        let tol = self.rank_tol();
        (0..self.dim())
            .filter(|&k| self.spectrum.values[k] <= tol)
            .map(|k| self.eigenvector(k))
            .collect()
    }

    /// `G φ`, with kernel eigenvalues of a dense Gram treated as exact zeros.
    pub fn apply_gram(&self, phi: &ModelVector) -> ModelVector {
        match &self.gram {
            Gram::Diagonal(d) => ModelVector(d.iter().zip(phi.as_slice()).map(|(g, x)| g * x).collect()),
            Gram::Dense(_, f) => ModelVector::from_dvector(&(f * (f.tr_mul(&phi.to_dvector())))),
        }
    }

    /// The bilinear form `φᵀ G ψ` with no input validation.
    pub fn form(&self, phi: &ModelVector, psi: &ModelVector) -> f64 {
        match &self.gram {
            Gram::Diagonal(d) => d
                .iter()
                .zip(phi.as_slice())
                .zip(psi.as_slice())
                .map(|((g, x), y)| g * x * y)
                .sum(),
            Gram::Dense(_, f) => f.tr_mul(&phi.to_dvector()).dot(&f.tr_mul(&psi.to_dvector())),
        }
    }

    fn validate(&self, phi: &ModelVector) -> Result<()> {
        check_dim(self.dim(), phi.dim())?;
        phi.ensure_finite()
    }

    pub fn inner(&self, phi: &ModelVector, psi: &ModelVector) -> Result<f64> {
        self.validate(phi)?;
        self.validate(psi)?;
        Ok(self.form(phi, psi))
    }

    /// `p(φ) = sqrt(max(φᵀ G φ, 0))`
    pub fn eval(&self, phi: &ModelVector) -> Result<f64> {
        self.validate(phi)?;
        Ok(self.form(phi, phi).max(0.0).sqrt())
    }

    /// Dual norm `p′(f) = sup{|⟨f, φ⟩| : p(φ) ≤ 1}`.
    ///
    /// Returns `f64::INFINITY` when `f` does not annihilate `ker(G)`, i.e. when
    /// `f` is not an element of the dual Hilbert space.
    pub fn dual_norm(&self, f: &ModelVector) -> Result<f64> {
        self.validate(f)?;
        let tol = self.rank_tol();
        let fnorm = f.norm();
        let mut kernel_mass = 0.0;
        let mut dual_sq = 0.0;
        match &self.spectrum.vectors {
            None => {
                for (lambda, fi) in self.spectrum.values.iter().zip(f.as_slice()) {
                    if *lambda > tol {
                        dual_sq += fi * fi / lambda;
                    } else {
                        kernel_mass += fi * fi;
                    }
                }
            }
            Some(vectors) => {
                let fv = f.to_dvector();
                for (k, lambda) in self.spectrum.values.iter().enumerate() {
                    let c = vectors.column(k).dot(&fv);
                    if *lambda > tol {
                        dual_sq += c * c / lambda;
                    } else {
                        kernel_mass += c * c;
                    }
                }
            }
        }
        if kernel_mass.sqrt() > 1e-8 * fnorm.max(f64::MIN_POSITIVE) && kernel_mass > 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(dual_sq.sqrt())
    }
}

fn resolve_tol(tol_psd: Option<f64>, scale: f64) -> Result<f64> {
    match tol_psd {
        Some(t) if !(t >= 0.0) || !t.is_finite() => {
            Err(Error::InvalidParameter(format!("tol_psd must be a nonnegative finite number, got {t}")))
        }
        Some(t) => Ok(t),
        None => Ok(DEFAULT_PSD_RTOL * scale),
    }
}

/// `true` iff `G_q - G_p` is positive semidefinite within the looser of the two tolerances.
pub fn dominates(p: &HilbertianSeminorm, q: &HilbertianSeminorm) -> Result<bool> {
    Ok(domination_violation(p, q)?.is_none())
}

/// The most negative direction of `G_q - G_p`, if it is below `-tol`.
pub fn domination_violation(p: &HilbertianSeminorm, q: &HilbertianSeminorm) -> Result<Option<(ModelVector, f64)>> {
    check_dim(p.dim(), q.dim())?;
    let tol = p.tol_psd.max(q.tol_psd);
    if let (Some(dp), Some(dq)) = (p.diagonal_entries(), q.diagonal_entries()) {
        let worst = dq
            .iter()
            .zip(dp)
            .map(|(a, b)| a - b)
            .enumerate()
            .fold((0usize, f64::INFINITY), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc });
        return Ok((worst.1 < -tol).then(|| (ModelVector::basis(p.dim(), worst.0), -worst.1)));
    }
    let diff = q.gram_matrix() - p.gram_matrix();
    let diff = (&diff + diff.transpose()) * 0.5;
    let eig = diff.symmetric_eigen();
    let (imin, lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0usize, f64::INFINITY), |acc, (i, &l)| if l < acc.1 { (i, l) } else { acc });
    if lmin < -tol {
        let v = eig.eigenvectors.column(imin).into_owned();
        Ok(Some((ModelVector::from_dvector(&v), -lmin)))
    } else {
        Ok(None)
    }
}

/// Smallest `c ≥ 0` with `p ≤ c·q`.
///
/// Fails with [`Error::Domination`] when `p` does not vanish on `ker(q)`.
pub fn domination_constant(p: &HilbertianSeminorm, q: &HilbertianSeminorm) -> Result<f64> {
    check_dim(p.dim(), q.dim())?;
    let ptol = p.rank_tol().max(p.tol_psd);
    for u in q.kernel_basis() {
        let pu = p.form(&u, &u);
        if pu > ptol.max(1e-14) {
            return Err(Error::Domination {
                lower: p.label.clone(),
                upper: q.label.clone(),
                direction: u.into_vec(),
                excess: pu.sqrt(),
            });
        }
    }
    let tol = q.rank_tol();
    let range: Vec<usize> = (0..q.dim()).filter(|&k| q.spectrum.values[k] > tol).collect();
    if range.is_empty() {
        return Ok(0.0);
    }
    if let (Some(dp), Some(dq)) = (p.diagonal_entries(), q.diagonal_entries()) {
        let c2 = range.iter().map(|&k| dp[k] / dq[k]).fold(0.0f64, f64::max);
        return Ok(c2.sqrt());
    }
    // W = Λ^{-1/2} Uᵣᵀ G_p Uᵣ Λ^{-1/2}
    let n = q.dim();
    let mut basis = DMatrix::zeros(n, range.len());
    for (col, &k) in range.iter().enumerate() {
        let u = q.eigenvector(k).to_dvector() / q.spectrum.values[k].sqrt();
        basis.set_column(col, &u);
    }
    let w = basis.transpose() * p.gram_matrix() * &basis;
    let w = (&w + w.transpose()) * 0.5;
    let c2 = w.symmetric_eigenvalues().iter().fold(0.0f64, |m, &l| m.max(l));
    Ok(c2.max(0.0).sqrt())
}

/// Increasing family `p_1 ≤ p_2 ≤ …` generating a countably Hilbertian topology.
#[derive(Clone, Debug)]
pub struct SeminormChain {
    members: Vec<HilbertianSeminorm>,
}

impl SeminormChain {
    pub fn new(members: Vec<HilbertianSeminorm>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("seminorm chain must be nonempty".into()));
        }
        for pair in members.windows(2) {
            if let Some((direction, excess)) = domination_violation(&pair[0], &pair[1])? {
                return Err(Error::Domination {
                    lower: pair[0].label.clone(),
                    upper: pair[1].label.clone(),
                    direction: direction.into_vec(),
                    excess,
                });
            }
        }
        Ok(Self { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&HilbertianSeminorm> {
        self.members.get(n)
    }

    pub fn iter(&self) -> impl Iterator<Item = &HilbertianSeminorm> {
        self.members.iter()
    }
}

/// A `q`-orthonormal system built from an enumerated dense set, with its dual
/// system, the triangular decomposition coefficients, and kernel residuals.
#[derive(Clone, Debug)]
pub struct OrthonormalSystem {
    seminorm: HilbertianSeminorm,
    vectors: Vec<ModelVector>,
    duals: Vec<ModelVector>,
    /// `coefficients[k][j] = a_{j,k}` for the k-th input.
    coefficients: Vec<Vec<f64>>,
    /// One residual per input; exactly zero up to rounding unless the input was routed to the kernel.
    residuals: Vec<ModelVector>,
    kernel_inputs: Vec<usize>,
}

impl OrthonormalSystem {
    pub fn seminorm(&self) -> &HilbertianSeminorm {
        &self.seminorm
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.seminorm.dim()
    }

    pub fn vectors(&self) -> &[ModelVector] {
        &self.vectors
    }

    pub fn duals(&self) -> &[ModelVector] {
        &self.duals
    }

    pub fn coefficients(&self, k: usize) -> &[f64] {
        &self.coefficients[k]
    }

    pub fn residuals(&self) -> &[ModelVector] {
        &self.residuals
    }

    /// Inputs that were routed to `ker(q)`, with their residuals.
    pub fn kernel_residuals(&self) -> impl Iterator<Item = (usize, &ModelVector)> {
        self.kernel_inputs.iter().map(move |&k| (k, &self.residuals[k]))
    }

    pub fn num_inputs(&self) -> usize {
        self.coefficients.len()
    }

    /// `Σ_j a_{j,k} φ_j + residual_k`, which reproduces the k-th input.
    pub fn reconstruct(&self, k: usize) -> ModelVector {
        let mut v = self.residuals[k].clone();
        for (a, phi) in self.coefficients[k].iter().zip(&self.vectors) {
            v.axpy(*a, phi);
        }
        v
    }

    /// Projection onto the span of the first `m` vectors along `ker(q)`:
    /// `Σ_{j≤m} ⟨f_j, φ⟩ φ_j`.
    pub fn project(&self, phi: &ModelVector, m: usize) -> Result<ModelVector> {
        check_dim(self.dim(), phi.dim())?;
        let mut out = ModelVector::zeros(self.dim());
        for (f, v) in self.duals.iter().zip(&self.vectors).take(m) {
            out.axpy(f.dot(phi), v);
        }
        Ok(out)
    }

    /// Replace the basis by `φ'_i = Σ_j R_{ij} φ_j` for an orthogonal `R`.
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Result<OrthonormalSystem> {
        let m = self.len();
        if rotation.nrows() != m || rotation.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, got: rotation.nrows() });
        }
        let mut vectors = Vec::with_capacity(m);
        for i in 0..m {
            let mut v = ModelVector::zeros(self.dim());
            for j in 0..m {
                v.axpy(rotation[(i, j)], &self.vectors[j]);
            }
            vectors.push(v);
        }
        let duals = vectors.iter().map(|v| self.seminorm.apply_gram(v)).collect();
        Ok(OrthonormalSystem {
            seminorm: self.seminorm.clone(),
            vectors,
            duals,
            coefficients: Vec::new(),
            residuals: Vec::new(),
            kernel_inputs: Vec::new(),
        })
    }

    /// Gram–Schmidt over the reference basis `e_1, …, e_N`, with a direct
    /// construction for diagonal Grams that yields the same system.
    pub fn from_standard_basis(q: &HilbertianSeminorm, tol: f64) -> Result<OrthonormalSystem> {
        check_tol(tol)?;
        let Some(diag) = q.diagonal_entries() else {
            let n = q.dim();
            let inputs: Vec<ModelVector> = (0..n).map(|k| ModelVector::basis(n, k)).collect();
            return gram_schmidt_onb(q, &inputs, tol);
        };
        let n = diag.len();
        let mut sys = OrthonormalSystem::empty(q.clone());
        let mut scale = 0.0f64;
        for (k, &g) in diag.iter().enumerate() {
            let norm = g.max(0.0).sqrt();
            scale = scale.max(norm);
            let mut coeffs = vec![0.0; sys.len()];
            if norm > tol * scale && norm > 0.0 {
                let mut phi = ModelVector::zeros(n);
                phi.0[k] = 1.0 / norm;
                sys.duals.push(q.apply_gram(&phi));
                sys.vectors.push(phi);
                coeffs.push(norm);
                sys.residuals.push(ModelVector::zeros(n));
            } else {
                sys.residuals.push(ModelVector::basis(n, k));
                sys.kernel_inputs.push(k);
            }
            sys.coefficients.push(coeffs);
        }
        Ok(sys)
    }

    fn empty(seminorm: HilbertianSeminorm) -> Self {
        Self {
            seminorm,
            vectors: Vec::new(),
            duals: Vec::new(),
            coefficients: Vec::new(),
            residuals: Vec::new(),
            kernel_inputs: Vec::new(),
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")))
    }
}

/// Modified Gram–Schmidt (two passes) in the `q`-inner product.
///
/// An input whose projected `q`-norm is at most `tol` times the largest input
/// `q`-norm seen so far is routed to the kernel: it contributes no basis vector
/// and its projected remainder is stored as its residual.
pub fn gram_schmidt_onb(q: &HilbertianSeminorm, dense_set: &[ModelVector], tol: f64) -> Result<OrthonormalSystem> {
    if dense_set.is_empty() {
        return Err(Error::InvalidParameter("dense set must be nonempty".into()));
    }
    check_tol(tol)?;
    for xi in dense_set {
        q.validate(xi)?;
    }
    let mut sys = OrthonormalSystem::empty(q.clone());
    let mut scale = 0.0f64;
    for (k, xi) in dense_set.iter().enumerate() {
        scale = scale.max(q.form(xi, xi).max(0.0).sqrt());
        let mut v = xi.clone();
        let mut coeffs = vec![0.0; sys.len()];
        for _pass in 0..2 {
            for (j, phi) in sys.vectors.iter().enumerate() {
                let c = q.form(&v, phi);
                v.axpy(-c, phi);
                coeffs[j] += c;
            }
        }
        let norm = q.form(&v, &v).max(0.0).sqrt();
        if norm > tol * scale && norm > 0.0 {
            let phi = v.scaled(1.0 / norm);
            sys.duals.push(q.apply_gram(&phi));
            sys.vectors.push(phi);
            coeffs.push(norm);
            let mut residual = xi.clone();
            for (a, phi) in coeffs.iter().zip(&sys.vectors) {
                residual.axpy(-a, phi);
            }
            sys.residuals.push(residual);
        } else {
            sys.residuals.push(v);
            sys.kernel_inputs.push(k);
        }
        sys.coefficients.push(coeffs);
    }
    Ok(sys)
}

/// Hilbert–Schmidt norm of the canonical inclusion `i_{p,q}` together with its
/// tail profile `t_m = Σ_{j>m} p(φ_j^q)²`, `m = 0..=len`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HsInclusion {
    pub hs_value: f64,
    pub tail_profile: Vec<f64>,
}

pub fn hs_inclusion_norm(p: &HilbertianSeminorm, q: &HilbertianSeminorm) -> Result<HsInclusion> {
    if let Some((direction, excess)) = domination_violation(p, q)? {
        return Err(Error::Domination {
            lower: p.label.clone(),
            upper: q.label.clone(),
            direction: direction.into_vec(),
            excess,
        });
    }
    let system = OrthonormalSystem::from_standard_basis(q, DEFAULT_GS_TOL)?;
    hs_inclusion_norm_for_system(p, &system)
}

/// Same as [`hs_inclusion_norm`] but over a caller-supplied `q`-orthonormal system.
pub fn hs_inclusion_norm_for_system(p: &HilbertianSeminorm, system: &OrthonormalSystem) -> Result<HsInclusion> {
    check_dim(p.dim(), system.dim())?;
    let squares: Vec<f64> = system.vectors().iter().map(|v| p.form(v, v).max(0.0)).collect();
    let mut tail_profile = vec![0.0; squares.len() + 1];
    for m in (0..squares.len()).rev() {
        tail_profile[m] = tail_profile[m + 1] + squares[m];
    }
    Ok(HsInclusion { hs_value: tail_profile[0].sqrt(), tail_profile })
}

/// Config form of a seminorm: exactly one of `diag`, `dense` or `identity`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeminormSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<bool>,
}

impl SeminormSpec {
    pub fn identity() -> Self {
        Self { label: None, tol: None, diag: None, dense: None, identity: Some(true) }
    }

    /// Build the seminorm on a model space of dimension `dim`.
    pub fn build(&self, dim: usize) -> Result<HilbertianSeminorm> {
        let label = self.label.clone().unwrap_or_else(|| "q".to_string());
        let chosen = [self.diag.is_some(), self.dense.is_some(), self.identity == Some(true)];
        if chosen.iter().filter(|&&c| c).count() != 1 {
            return Err(Error::Config("seminorm needs exactly one of `diag`, `dense`, `identity = true`".into()));
        }
        let s = if let Some(d) = &self.diag {
            HilbertianSeminorm::diagonal_with_tol(label, d.clone(), self.tol)?
        } else if let Some(rows) = &self.dense {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::Config("seminorm `dense` must be a square matrix".into()));
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            HilbertianSeminorm::dense_with_tol(label, DMatrix::from_row_slice(n, n, &flat), self.tol)?
        } else {
            HilbertianSeminorm::diagonal_with_tol(label, vec![1.0; dim], self.tol)?
        };
        check_dim(dim, s.dim())?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> ModelVector {
        ModelVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn seminorm_eval_examples() {
        let id = HilbertianSeminorm::identity(3);
        assert_eq!(id.eval(&v(&[3.0, 4.0, 0.0])).unwrap(), 5.0);
        let k = HilbertianSeminorm::diagonal("k", vec![1.0, 0.0]).unwrap();
        assert_eq!(k.eval(&v(&[0.0, 7.0])).unwrap(), 0.0);
        // dense-matrix oracle: e_2ᵀ G e_2 with G = diag(1/j⁴)
        let diag: Vec<f64> = (1..=4).map(|j| 1.0 / (j as f64).powi(4)).collect();
        let p = HilbertianSeminorm::diagonal("p", diag.clone()).unwrap();
        let g = DMatrix::from_diagonal(&DVector::from_vec(diag));
        let e2 = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
        let oracle = (e2.transpose() * &g * &e2)[(0, 0)].sqrt();
        assert_relative_eq!(p.eval(&ModelVector::basis(4, 1)).unwrap(), oracle, max_relative = 1e-15);
        assert_relative_eq!(oracle, 0.25);
    }

    #[test]
    fn seminorm_eval_errors() {
        let id = HilbertianSeminorm::identity(3);
        assert!(matches!(id.eval(&v(&[1.0, 2.0])), Err(Error::DimensionMismatch { .. })));
        assert!(ModelVector::new(vec![f64::NAN]).is_err());
        let bad = ModelVector::from_vec_unchecked(vec![f64::NAN, 0.0, 0.0]);
        assert!(matches!(id.eval(&bad), Err(Error::NonFinite(_))));
    }

    #[test]
    fn psd_clamping_and_rejection() {
        let s = HilbertianSeminorm::diagonal("s", vec![1.0, -1e-12]).unwrap();
        assert_eq!(s.eigenvalues()[1], 0.0);
        assert!(matches!(
            HilbertianSeminorm::diagonal("s", vec![1.0, -1e-3]),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(HilbertianSeminorm::dense("a", asym), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn dual_norm_examples() {
        let id = HilbertianSeminorm::identity(2);
        assert_relative_eq!(id.dual_norm(&v(&[3.0, 4.0])).unwrap(), 5.0);
        let q = HilbertianSeminorm::diagonal("q", vec![4.0, 1.0]).unwrap();
        // brute-force oracle: maximise ⟨e_1, φ⟩ over q(φ) ≤ 1 on a fine angle grid
        let brute = (0..200_000)
            .map(|i| {
                let th = i as f64 * std::f64::consts::TAU / 200_000.0;
                // boundary of the q-ball: (cos θ / 2, sin θ)
                (th.cos() / 2.0).abs()
            })
            .fold(0.0f64, f64::max);
        assert_relative_eq!(q.dual_norm(&ModelVector::basis(2, 0)).unwrap(), brute, max_relative = 1e-9);
        assert_relative_eq!(brute, 0.5, max_relative = 1e-9);
        let k = HilbertianSeminorm::diagonal("k", vec![1.0, 0.0]).unwrap();
        assert!(k.dual_norm(&ModelVector::basis(2, 1)).unwrap().is_infinite());
    }

    #[test]
    fn gram_schmidt_examples() {
        let id = HilbertianSeminorm::identity(2);
        let e = [ModelVector::basis(2, 0), ModelVector::basis(2, 1)];
        let sys = gram_schmidt_onb(&id, &e, DEFAULT_GS_TOL).unwrap();
        assert_eq!(sys.vectors(), &e);
        assert_eq!(sys.coefficients(0), &[1.0]);
        assert_eq!(sys.coefficients(1), &[0.0, 1.0]);
        assert_eq!(sys.kernel_residuals().count(), 0);

        let k = HilbertianSeminorm::diagonal("k", vec![1.0, 0.0]).unwrap();
        let sys = gram_schmidt_onb(&k, &e, DEFAULT_GS_TOL).unwrap();
        assert_eq!(sys.len(), 1);
        assert_eq!(sys.vectors()[0], e[0]);
        let res: Vec<_> = sys.kernel_residuals().collect();
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].0, 1);
        assert_eq!(res[0].1, &e[1]);
        assert_eq!(k.eval(res[0].1).unwrap(), 0.0);
    }

    /// Textbook classical Gram–Schmidt with explicit q-inner products on 2×2 data.
    fn oracle_cgs(g: [[f64; 2]; 2], xs: [[f64; 2]; 2]) -> Vec<[f64; 2]> {
        let ip = |a: [f64; 2], b: [f64; 2]| {
            let mut s = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    s += a[i] * g[i][j] * b[j];
                }
            }
            s
        };
        let mut out: Vec<[f64; 2]> = Vec::new();
        for x in xs {
            let mut w = x;
            for u in &out {
                let c = ip(x, *u);
                w = [w[0] - c * u[0], w[1] - c * u[1]];
            }
            let n = ip(w, w).sqrt();
            out.push([w[0] / n, w[1] / n]);
        }
        out
    }

    #[test]
    fn gram_schmidt_weighted_matches_oracle() {
        let q = HilbertianSeminorm::diagonal("q", vec![4.0, 1.0]).unwrap();
        let xs = [v(&[1.0, 1.0]), v(&[0.0, 1.0])];
        let sys = gram_schmidt_onb(&q, &xs, DEFAULT_GS_TOL).unwrap();
        let oracle = oracle_cgs([[4.0, 0.0], [0.0, 1.0]], [[1.0, 1.0], [0.0, 1.0]]);
        for (phi, o) in sys.vectors().iter().zip(&oracle) {
            assert_relative_eq!(phi.as_slice()[0], o[0], epsilon = 1e-14);
            assert_relative_eq!(phi.as_slice()[1], o[1], epsilon = 1e-14);
        }
        let s5 = 5f64.sqrt();
        assert_relative_eq!(sys.vectors()[0].as_slice()[0], 1.0 / s5, epsilon = 1e-15);
        assert_relative_eq!(sys.coefficients(0)[0], s5, epsilon = 1e-15);
        for (k, x) in xs.iter().enumerate().take(2) {
            let r = sys.reconstruct(k);
            assert_relative_eq!((&r - x).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn standard_basis_fast_path_matches_general() {
        let diag = vec![2.0, 0.0, 0.5, 1e-30, 3.0];
        let q = HilbertianSeminorm::diagonal("q", diag).unwrap();
        let fast = OrthonormalSystem::from_standard_basis(&q, DEFAULT_GS_TOL).unwrap();
        let inputs: Vec<_> = (0..5).map(|k| ModelVector::basis(5, k)).collect();
        let slow = gram_schmidt_onb(&q, &inputs, DEFAULT_GS_TOL).unwrap();
        assert_eq!(fast.len(), slow.len());
        for (a, b) in fast.vectors().iter().zip(slow.vectors()) {
            assert_relative_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
        let fk: Vec<usize> = fast.kernel_residuals().map(|(k, _)| k).collect();
        let sk: Vec<usize> = slow.kernel_residuals().map(|(k, _)| k).collect();
        assert_eq!(fk, sk);
        assert_eq!(fk, vec![1, 3]);
    }

    #[test]
    fn hs_inclusion_examples() {
        // oracle: the partial sum Σ_{j≤1000} 1/j², summed from the small end
        let oracle: f64 = (1..=1000).rev().map(|j| 1.0 / ((j * j) as f64)).sum();
        let p = HilbertianSeminorm::diagonal("p", (1..=1000).map(|j| 1.0 / ((j * j) as f64)).collect()).unwrap();
        let q = HilbertianSeminorm::identity(1000);
        let hs = hs_inclusion_norm(&p, &q).unwrap();
        assert_relative_eq!(hs.hs_value.powi(2), oracle, max_relative = 1e-12);
        assert_relative_eq!(hs.hs_value.powi(2), 1.643_934_566_681_56, max_relative = 1e-12);
        assert!(hs.hs_value.powi(2) < std::f64::consts::PI.powi(2) / 6.0);
        assert_eq!(hs.tail_profile.len(), 1001);
        assert_eq!(*hs.tail_profile.last().unwrap(), 0.0);

        let g = HilbertianSeminorm::diagonal("g", vec![1.0, 2.0, 0.0]).unwrap();
        let hs = hs_inclusion_norm(&g, &g).unwrap();
        assert_relative_eq!(hs.hs_value.powi(2), 2.0, max_relative = 1e-14);

        let zero = HilbertianSeminorm::diagonal("0", vec![0.0; 4]).unwrap();
        assert_eq!(hs_inclusion_norm(&zero, &HilbertianSeminorm::identity(4)).unwrap().hs_value, 0.0);

        let err = hs_inclusion_norm(&HilbertianSeminorm::identity(2), &HilbertianSeminorm::diagonal("small", vec![1.0, 0.5]).unwrap());
        match err {
            Err(Error::Domination { direction, .. }) => assert_eq!(direction, vec![0.0, 1.0]),
            other => panic!("expected domination error, got {other:?}"),
        }
    }

    #[test]
    fn dominates_examples() {
        let a = HilbertianSeminorm::diagonal("a", vec![1.0, 1.0]).unwrap();
        let b = HilbertianSeminorm::diagonal("b", vec![2.0, 3.0]).unwrap();
        assert!(dominates(&a, &b).unwrap());
        let c = HilbertianSeminorm::diagonal("c", vec![2.0, 0.0]).unwrap();
        assert!(!dominates(&c, &a).unwrap());
        let g = HilbertianSeminorm::dense("g", DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        assert!(dominates(&g, &g).unwrap());
        assert!(dominates(&a, &g).unwrap());
        assert!(matches!(dominates(&a, &HilbertianSeminorm::identity(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn domination_constant_cases() {
        let p = HilbertianSeminorm::diagonal("p", vec![1.0, 0.25]).unwrap();
        let q = HilbertianSeminorm::diagonal("q", vec![0.5, 1.0]).unwrap();
        assert_relative_eq!(domination_constant(&p, &q).unwrap(), 2f64.sqrt(), max_relative = 1e-14);
        let qk = HilbertianSeminorm::diagonal("qk", vec![1.0, 0.0]).unwrap();
        assert!(matches!(domination_constant(&p, &qk), Err(Error::Domination { .. })));
        // dense route agrees with the diagonal route on a rotated copy
        let rot = DMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        let pd = HilbertianSeminorm::dense("pd", &rot * p.gram_matrix() * rot.transpose()).unwrap();
        let qd = HilbertianSeminorm::dense("qd", &rot * q.gram_matrix() * rot.transpose()).unwrap();
        assert_relative_eq!(domination_constant(&pd, &qd).unwrap(), 2f64.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn seminorm_chain_checks_dominance() {
        let a = HilbertianSeminorm::diagonal("a", vec![1.0, 0.0]).unwrap();
        let b = HilbertianSeminorm::identity(2);
        assert_eq!(SeminormChain::new(vec![a.clone(), b.clone()]).unwrap().len(), 2);
        assert!(SeminormChain::new(vec![b, a]).is_err());
    }

    #[test]
    fn spec_parsing() {
        let spec: SeminormSpec = toml::from_str("label = \"q\"\ndiag = [1.0, 2.0]\ntol = 1e-9").unwrap();
        let s = spec.build(2).unwrap();
        assert_eq!(s.label(), "q");
        assert_eq!(s.tol_psd(), 1e-9);
        let spec: SeminormSpec = toml::from_str("dense = [[2.0, 1.0], [1.0, 2.0]]").unwrap();
        assert_eq!(spec.build(2).unwrap().rank(), 2);
        let spec: SeminormSpec = toml::from_str("diag = [1.0]\ndense = [[1.0]]").unwrap();
        assert!(spec.build(1).is_err());
        assert!(toml::from_str::<SeminormSpec>("diagonal = [1.0]").is_err());
    }
}

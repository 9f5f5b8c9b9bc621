//! Linear operators between truncated model spaces.
//!
//! Singular values are computed once at construction and drive every norm,
//! tail and rank query.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::space::{gram_schmidt_onb, HilbertianSeminorm, ModelVector};

/// Singular values below this fraction of `σ_1` count as zero.
pub const SINGULAR_RTOL: f64 = 1e-14;

#[derive(Clone, Debug)]
enum Repr {
    Diagonal(Vec<f64>),
    Dense(DMatrix<f64>),
}

#[derive(Clone, Debug)]
pub struct LinearOperator {
    repr: Repr,
    singular_values: Vec<f64>,
}

impl LinearOperator {
    pub fn diagonal(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("operator must have positive dimension".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("operator diagonal"));
        }
        let mut sv: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { repr: Repr::Diagonal(values), singular_values: sv })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(vec![1.0; n]).expect("identity is valid")
    }

    /// `diag(j^{-power})`, `j = 1..=n`.
    pub fn power_decay(n: usize, power: f64) -> Result<Self> {
        Self::diagonal((1..=n).map(|j| (j as f64).powf(-power)).collect())
    }

    pub fn dense(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::InvalidParameter("operator must have positive dimensions".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("operator matrix"));
        }
        let mut sv: Vec<f64> = matrix.clone().svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { repr: Repr::Dense(matrix), singular_values: sv })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != nc) {
            return Err(Error::InvalidParameter("ragged operator rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::dense(DMatrix::from_row_slice(nr, nc, &flat))
    }

    pub fn zero(rows: usize, cols: usize) -> Result<Self> {
        Self::dense(DMatrix::zeros(rows, cols))
    }

    /// Smoothing kernel `K_ij = exp(-((i-j)/n)² / (2h²)) / n`, a symmetric PSD
    /// operator with rapidly decaying spectrum.
    pub fn gaussian_kernel(n: usize, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::InvalidParameter(format!("kernel bandwidth must be positive, got {bandwidth}")));
        }
        let nf = n as f64;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let d = (i as f64 - j as f64) / nf;
            (-d * d / (2.0 * bandwidth * bandwidth)).exp() / nf
        });
        Self::dense(m)
    }

    pub fn rows(&self) -> usize {
        match &self.repr {
            Repr::Diagonal(d) => d.len(),
            Repr::Dense(m) => m.nrows(),
        }
    }

    pub fn cols(&self) -> usize {
        match &self.repr {
            Repr::Diagonal(d) => d.len(),
            Repr::Dense(m) => m.ncols(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.repr, Repr::Diagonal(_))
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        match &self.repr {
            Repr::Diagonal(d) => DMatrix::from_diagonal(&DVector::from_column_slice(d)),
            Repr::Dense(m) => m.clone(),
        }
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    fn cutoff(&self) -> f64 {
        SINGULAR_RTOL * self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Singular values above the relative cutoff.
    fn effective(&self) -> impl Iterator<Item = f64> + '_ {
        let cut = self.cutoff();
        self.singular_values.iter().copied().filter(move |&s| s > cut)
    }

    pub fn rank(&self) -> usize {
        self.effective().count()
    }

    pub fn operator_norm(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn apply(&self, phi: &ModelVector) -> Result<ModelVector> {
        check_dim(self.cols(), phi.dim())?;
        phi.ensure_finite()?;
        Ok(self.apply_unchecked(phi))
    }

    pub(crate) fn apply_unchecked(&self, phi: &ModelVector) -> ModelVector {
        match &self.repr {
            Repr::Diagonal(d) => {
                ModelVector::from_vec_unchecked(d.iter().zip(phi.as_slice()).map(|(a, x)| a * x).collect())
            }
            Repr::Dense(m) => {
                let mut out = vec![0.0; m.nrows()];
                for (j, x) in phi.nonzeros() {
                    for (o, a) in out.iter_mut().zip(m.column(j).iter()) {
                        *o += a * x;
                    }
                }
                ModelVector::from_vec_unchecked(out)
            }
        }
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &LinearOperator) -> Result<LinearOperator> {
        check_dim(self.cols(), inner.rows())?;
        match (&self.repr, &inner.repr) {
            (Repr::Diagonal(a), Repr::Diagonal(b)) => {
                LinearOperator::diagonal(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            _ => LinearOperator::dense(self.matrix() * inner.matrix()),
        }
    }

    /// Frobenius norm `sqrt(Σ σ_j²)`.
    pub fn hs_norm(&self) -> f64 {
        self.effective().map(|s| s * s).sum::<f64>().sqrt()
    }

    /// `(Σ σ_j^r)^{1/r}` for `r ≥ 1`.
    pub fn schatten_norm(&self, r: f64) -> Result<f64> {
        if !(r >= 1.0) {
            return Err(Error::InvalidParameter(format!("Schatten exponent must be >= 1, got {r}")));
        }
        if r.is_infinite() {
            return Ok(self.operator_norm());
        }
        Ok(self.effective().map(|s| s.powf(r)).sum::<f64>().powf(1.0 / r))
    }

    /// `Σ_{j>m} σ_j^r`
    pub fn tail(&self, m: usize, r: f64) -> f64 {
        self.effective().skip(m).map(|s| s.powf(r)).sum()
    }

    /// Suffix sums `Σ_{j>m} σ_j^r` for `m = 0..=rank`.
    pub fn tail_profile(&self, r: f64) -> Vec<f64> {
        let powers: Vec<f64> = self.effective().map(|s| s.powf(r)).collect();
        let mut out = vec![0.0; powers.len() + 1];
        for m in (0..powers.len()).rev() {
            out[m] = out[m + 1] + powers[m];
        }
        out
    }
}

/// The seminorm `p_S(φ) = ‖Sφ‖` with Gram `SᵀS`.
pub fn sazonov_seminorm(s: &LinearOperator) -> HilbertianSeminorm {
    let label = "sazonov";
    match &s.repr {
        Repr::Diagonal(d) => HilbertianSeminorm::diagonal(label, d.iter().map(|x| x * x).collect()),
        Repr::Dense(m) => {
            let g = m.transpose() * m;
            HilbertianSeminorm::dense(label, (&g + g.transpose()) * 0.5)
        }
    }
    .expect("SᵀS is symmetric PSD")
}

/// `S = j_B ∘ S_0 ∘ i_p`: quotient by `ker(p)` onto `p`-orthonormal coordinates,
/// the induced core operator, and an isometric embedding of `range(S)`.
#[derive(Clone, Debug)]
pub struct HsFactorization {
    pub p: HilbertianSeminorm,
    pub quotient: LinearOperator,
    pub core: LinearOperator,
    pub embedding: LinearOperator,
}

impl HsFactorization {
    pub fn recompose(&self) -> Result<LinearOperator> {
        self.embedding.compose(&self.core)?.compose(&self.quotient)
    }
}

pub fn factorize(s: &LinearOperator, p: &HilbertianSeminorm) -> Result<HsFactorization> {
    check_dim(s.cols(), p.dim())?;
    let n = p.dim();
    let ptol = p.rank_tol();
    let stol = 1e-10 * s.operator_norm().max(f64::MIN_POSITIVE);
    for u in p.kernel_basis() {
        let image = s.apply_unchecked(&u).norm();
        if image > stol {
            return Err(Error::KernelObstruction {
                seminorm: p.label().to_string(),
                direction: u.into_vec(),
                image_norm: image,
            });
        }
    }

    // range directions of p with their eigenvalues
    let range: Vec<(ModelVector, f64)> = match p.diagonal_entries() {
        Some(d) => d
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > ptol)
            .map(|(k, &l)| (ModelVector::basis(n, k), l))
            .collect(),
        None => {
            let eig = p.gram_matrix().symmetric_eigen();
            let mut idx: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > ptol).collect();
            idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
            idx.iter()
                .map(|&k| (ModelVector::from_vec_unchecked(eig.eigenvectors.column(k).iter().copied().collect()), eig.eigenvalues[k]))
                .collect()
        }
    };
    let r = range.len();
    if r == 0 {
        return Err(Error::InvalidParameter(format!("seminorm `{}` is identically zero", p.label())));
    }

    let quotient = if p.diagonal_entries().is_some() && r == n {
        LinearOperator::diagonal(range.iter().map(|(_, l)| l.sqrt()).collect())?
    } else {
        let mut q = DMatrix::zeros(r, n);
        for (i, (u, l)) in range.iter().enumerate() {
            for (j, x) in u.as_slice().iter().enumerate() {
                q[(i, j)] = l.sqrt() * x;
            }
        }
        LinearOperator::dense(q)?
    };

    // T = S Uᵣ Λ^{-1/2}: S read in p-orthonormal coordinates
    let out = s.rows();
    let columns: Vec<ModelVector> = range.iter().map(|(u, l)| s.apply_unchecked(u).scaled(1.0 / l.sqrt())).collect();
    let euclid = HilbertianSeminorm::identity(out);
    let nonzero: Vec<ModelVector> = columns.iter().filter(|c| !c.is_zero()).cloned().collect();
    let basis: Vec<ModelVector> = if nonzero.is_empty() {
        Vec::new()
    } else {
        gram_schmidt_onb(&euclid, &nonzero, 1e-12)?.vectors().to_vec()
    };
    let k = basis.len();
    if k == 0 {
        return Ok(HsFactorization {
            p: p.clone(),
            quotient,
            core: LinearOperator::zero(1, r)?,
            embedding: LinearOperator::zero(out, 1)?,
        });
    }
    let embedding_m = DMatrix::from_fn(out, k, |i, j| basis[j].as_slice()[i]);
    let core_m = DMatrix::from_fn(k, r, |i, j| basis[i].dot(&columns[j]));
    let is_identity = k == out && r == n && embedding_m == DMatrix::identity(out, out);
    let embedding = if is_identity { LinearOperator::identity(out) } else { LinearOperator::dense(embedding_m)? };
    let core = match (&s.repr, is_identity && p.diagonal_entries().is_some()) {
        (Repr::Diagonal(_), true) => LinearOperator::diagonal((0..r).map(|i| core_m[(i, i)]).collect())?,
        _ => LinearOperator::dense(core_m)?,
    };
    Ok(HsFactorization { p: p.clone(), quotient, core, embedding })
}

/// Config form of an operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    /// `diag(j^{-decay})` on the model dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelSpec {
    Gaussian { bandwidth: f64 },
}

impl OperatorSpec {
    pub fn decay(power: f64) -> Self {
        Self { diag: None, dense: None, kernel: None, decay: Some(power), identity: None }
    }

    pub fn identity() -> Self {
        Self { diag: None, dense: None, kernel: None, decay: None, identity: Some(true) }
    }

    /// Build on a domain of dimension `dim`.
    pub fn build(&self, dim: usize) -> Result<LinearOperator> {
        let chosen = [
            self.diag.is_some(),
            self.dense.is_some(),
            self.kernel.is_some(),
            self.decay.is_some(),
            self.identity == Some(true),
        ];
        if chosen.iter().filter(|&&c| c).count() != 1 {
            return Err(Error::Config(
                "operator needs exactly one of `diag`, `dense`, `kernel`, `decay`, `identity = true`".into(),
            ));
        }
        let op = if let Some(d) = &self.diag {
            LinearOperator::diagonal(d.clone())?
        } else if let Some(rows) = &self.dense {
            LinearOperator::from_rows(rows)?
        } else if let Some(KernelSpec::Gaussian { bandwidth }) = &self.kernel {
            LinearOperator::gaussian_kernel(dim, *bandwidth)?
        } else if let Some(p) = self.decay {
            LinearOperator::power_decay(dim, p)?
        } else {
            LinearOperator::identity(dim)
        };
        check_dim(dim, op.cols())?;
        Ok(op)
    }
}

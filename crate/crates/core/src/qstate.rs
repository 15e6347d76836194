//! Sparse kets, density operators over explicit support bases, partial
//! trace, partial transpose, and Hermitian spectra.
//!
//! States live in product spaces whose ambient dimension can be huge
//! (7^8 for the largest shipped fixtures) but have few terms; every
//! operation here works on the stored labels only and never materializes
//! the full space.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Amplitudes below this are pruned from sparse kets.
pub const PRUNE_TOL: f64 = 1e-15;
/// Hermiticity tolerance for density operators.
pub const HERM_TOL: f64 = 1e-12;
/// Eigenpair residual bound, relative to the matrix norm.
pub const EIG_RESIDUAL_TOL: f64 = 1e-9;
/// Off-diagonal magnitude bound for "diagonal in the product basis".
pub const DIAG_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum QstateError {
    #[error("site index {0} out of range for {1} sites")]
    SiteOutOfRange(usize, usize),
    #[error("kept site set must be non-empty")]
    EmptyKeep,
    #[error("transposed set must be a non-empty strict subset of the kept sites")]
    BadTransposeSet,
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("label {0:?} does not match site dimensions")]
    BadLabel(String),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("dimension {0} exceeds the dense-matrix guard {1}")]
    DimensionGuard(usize, usize),
}

pub type Label = Vec<u8>;

/// A pure state over product-basis labels, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseKet {
    dims: Vec<usize>,
    amps: BTreeMap<Label, Complex64>,
}

impl SparseKet {
    pub fn zero(dims: Vec<usize>) -> SparseKet {
        assert!(!dims.is_empty() && dims.iter().all(|&d| d >= 2));
        SparseKet {
            dims,
            amps: BTreeMap::new(),
        }
    }

    pub fn from_amplitudes(
        dims: Vec<usize>,
        amps: impl IntoIterator<Item = (Label, Complex64)>,
    ) -> Result<SparseKet, QstateError> {
        let mut ket = SparseKet::zero(dims);
        for (label, a) in amps {
            ket.check_label(&label)?;
            ket.add_amplitude(&label, a);
        }
        Ok(ket)
    }

    fn check_label(&self, label: &[u8]) -> Result<(), QstateError> {
        if label.len() != self.dims.len()
            || label.iter().zip(&self.dims).any(|(&l, &d)| l as usize >= d)
        {
            return Err(QstateError::BadLabel(label_string(label)));
        }
        Ok(())
    }

    pub fn add_amplitude(&mut self, label: &[u8], a: Complex64) {
        let entry = self.amps.entry(label.to_vec()).or_insert(Complex64::ZERO);
        *entry += a;
        if entry.norm() < PRUNE_TOL {
            self.amps.remove(label);
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn site_count(&self) -> usize {
        self.dims.len()
    }

    pub fn term_count(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&Label, &Complex64)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, label: &[u8]) -> Complex64 {
        self.amps.get(label).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<SparseKet, QstateError> {
        let n = self.norm();
        if n < PRUNE_TOL {
            return Err(QstateError::ZeroNorm);
        }
        let mut out = self.clone();
        for a in out.amps.values_mut() {
            *a /= n;
        }
        Ok(out)
    }

    pub fn inner(&self, other: &SparseKet) -> Complex64 {
        // <self|other>
        self.amps
            .iter()
            .map(|(l, a)| a.conj() * other.amplitude(l))
            .sum()
    }

    /// Applies a single-site operator (d x d) to the given site.
    pub fn apply_local(&self, site: usize, op: &DMatrix<Complex64>) -> Result<SparseKet, QstateError> {
        if site >= self.dims.len() {
            return Err(QstateError::SiteOutOfRange(site, self.dims.len()));
        }
        let d = self.dims[site];
        assert_eq!(op.nrows(), d);
        assert_eq!(op.ncols(), d);
        let mut out = SparseKet::zero(self.dims.clone());
        for (label, &a) in &self.amps {
            let col = label[site] as usize;
            for row in 0..d {
                let c = op[(row, col)];
                if c.norm() < PRUNE_TOL {
                    continue;
                }
                let mut l = label.clone();
                l[site] = row as u8;
                out.add_amplitude(&l, c * a);
            }
        }
        Ok(out)
    }

    /// Returns the ket with sites reordered so that new site i is old
    /// site perm[i].
    pub fn permute_sites(&self, perm: &[usize]) -> SparseKet {
        assert_eq!(perm.len(), self.dims.len());
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut out = SparseKet::zero(dims);
        for (label, &a) in &self.amps {
            let l: Label = perm.iter().map(|&p| label[p]).collect();
            out.add_amplitude(&l, a);
        }
        out
    }

    /// JSON form: {"dims":[2,2,2],"amps":[{"label":"000","re":..,"im":..}]}.
    pub fn to_json(&self) -> serde_json::Value {
        let amps: Vec<serde_json::Value> = self
            .amps
            .iter()
            .map(|(l, a)| {
                serde_json::json!({"label": label_string(l), "re": a.re, "im": a.im})
            })
            .collect();
        serde_json::json!({"dims": self.dims, "amps": amps})
    }

    pub fn from_json(v: &serde_json::Value) -> Result<SparseKet, QstateError> {
        let dims: Vec<usize> = v
            .get("dims")
            .and_then(|d| serde_json::from_value(d.clone()).ok())
            .ok_or_else(|| QstateError::BadLabel("missing dims".into()))?;
        let amps = v
            .get("amps")
            .and_then(|a| a.as_array())
            .ok_or_else(|| QstateError::BadLabel("missing amps".into()))?;
        let mut ket = SparseKet::zero(dims);
        for entry in amps {
            let label = entry
                .get("label")
                .and_then(|l| l.as_str())
                .ok_or_else(|| QstateError::BadLabel("missing label".into()))?;
            let label = parse_label(label)?;
            ket.check_label(&label)?;
            let re = entry.get("re").and_then(|x| x.as_f64()).unwrap_or(0.0);
            let im = entry.get("im").and_then(|x| x.as_f64()).unwrap_or(0.0);
            ket.add_amplitude(&label, Complex64::new(re, im));
        }
        Ok(ket)
    }
}

/// Digits 0-9 then a-z, so local dimensions up to 36 round-trip.
pub fn label_string(label: &[u8]) -> String {
    label
        .iter()
        .map(|&d| {
            if d < 10 {
                (b'0' + d) as char
            } else {
                (b'a' + d - 10) as char
            }
        })
        .collect()
}

pub fn parse_label(s: &str) -> Result<Label, QstateError> {
    s.chars()
        .map(|c| match c {
            '0'..='9' => Ok(c as u8 - b'0'),
            'a'..='z' => Ok(c as u8 - b'a' + 10),
            _ => Err(QstateError::BadLabel(s.to_string())),
        })
        .collect()
}

/// A Hermitian, unit-trace operator over an explicit support basis of
/// product labels on the kept sites.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    dims: Vec<usize>,
    support: Vec<Label>,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn support(&self) -> &[Label] {
        &self.support
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn site_count(&self) -> usize {
        self.dims.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.support.len()).map(|i| self.matrix[(i, i)].re).sum()
    }

    fn from_parts(
        dims: Vec<usize>,
        support: Vec<Label>,
        matrix: DMatrix<Complex64>,
    ) -> Result<DensityOperator, QstateError> {
        let dev = hermitian_deviation(&matrix);
        if dev > HERM_TOL {
            return Err(QstateError::NotHermitian(dev));
        }
        let mut rho = DensityOperator {
            dims,
            support,
            matrix,
        };
        let tr = rho.trace();
        if tr <= 0.0 {
            return Err(QstateError::ZeroNorm);
        }
        rho.matrix /= Complex64::new(tr, 0.0);
        Ok(rho)
    }

    /// Builds a density operator over the full product basis from a dense
    /// matrix (test fixtures, Werner states).
    pub fn from_dense(dims: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<DensityOperator, QstateError> {
        let total: usize = dims.iter().product();
        assert_eq!(matrix.nrows(), total);
        let support: Vec<Label> = (0..total).map(|i| index_to_label(i, &dims)).collect();
        Self::from_parts(dims, support, matrix)
    }

    /// Partial trace of |psi><psi| keeping the given sites (sorted,
    /// distinct), normalized to unit trace. Works on stored labels only.
    pub fn reduce(psi: &SparseKet, keep: &[usize]) -> Result<DensityOperator, QstateError> {
        let (_, reduced) = reduce_unnormalized(psi, keep)?;
        let (dims, support, matrix) = reduced;
        Self::from_parts(dims, support, matrix)
    }

    /// Partial trace of a uniform mixture sum_i |t_i><t_i| (terms may be
    /// unnormalized), keeping the given sites.
    pub fn reduce_mixture(terms: &[SparseKet], keep: &[usize]) -> Result<DensityOperator, QstateError> {
        let first = terms.first().ok_or(QstateError::ZeroNorm)?;
        let dims_in = first.dims().to_vec();
        // merged support over all terms keeps the block sum well-defined
        let mut support: BTreeSet<Label> = BTreeSet::new();
        for t in terms {
            assert_eq!(t.dims(), &dims_in[..], "mixture terms must share dims");
            let (_, (_, s, _)) = reduce_unnormalized(t, keep)?;
            support.extend(s);
        }
        let support: Vec<Label> = support.into_iter().collect();
        let index: BTreeMap<&Label, usize> = support.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let dims: Vec<usize> = keep.iter().map(|&s| dims_in[s]).collect();
        let mut matrix = DMatrix::zeros(support.len(), support.len());
        for t in terms {
            let (_, (_, s, m)) = reduce_unnormalized(t, keep)?;
            for (i, li) in s.iter().enumerate() {
                for (j, lj) in s.iter().enumerate() {
                    matrix[(index[li], index[lj])] += m[(i, j)];
                }
            }
        }
        Self::from_parts(dims, support, matrix)
    }

    /// Further partial trace over the support basis; `keep` indexes the
    /// current sites.
    pub fn reduce_sites(&self, keep: &[usize]) -> Result<DensityOperator, QstateError> {
        validate_keep(keep, self.dims.len())?;
        let traced: Vec<usize> = (0..self.dims.len()).filter(|s| !keep.contains(s)).collect();
        let restrict = |l: &Label, sites: &[usize]| -> Label { sites.iter().map(|&s| l[s]).collect() };
        let mut support: BTreeSet<Label> = BTreeSet::new();
        for l in &self.support {
            support.insert(restrict(l, keep));
        }
        let support: Vec<Label> = support.into_iter().collect();
        let index: BTreeMap<&Label, usize> = support.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let dims: Vec<usize> = keep.iter().map(|&s| self.dims[s]).collect();
        let mut matrix = DMatrix::zeros(support.len(), support.len());
        for (i, li) in self.support.iter().enumerate() {
            for (j, lj) in self.support.iter().enumerate() {
                if restrict(li, &traced) == restrict(lj, &traced) {
                    matrix[(index[&restrict(li, keep)], index[&restrict(lj, keep)])] +=
                        self.matrix[(i, j)];
                }
            }
        }
        Self::from_parts(dims, support, matrix)
    }

    /// Partial transpose over the given (relative) site subset. The
    /// support is closed under digit mixing first; the result is Hermitian
    /// with the same trace but possibly non-positive.
    pub fn partial_transpose(&self, transposed: &[usize]) -> Result<DensityOperator, QstateError> {
        let n = self.dims.len();
        if transposed.is_empty() || transposed.len() >= n {
            return Err(QstateError::BadTransposeSet);
        }
        for &s in transposed {
            if s >= n {
                return Err(QstateError::SiteOutOfRange(s, n));
            }
        }
        let mix = |a: &Label, b: &Label| -> Label {
            let mut out = a.clone();
            for &s in transposed {
                out[s] = b[s];
            }
            out
        };
        let mut closure: BTreeSet<Label> = BTreeSet::new();
        for a in &self.support {
            for b in &self.support {
                closure.insert(mix(a, b));
            }
        }
        let closure: Vec<Label> = closure.into_iter().collect();
        let index: BTreeMap<&Label, usize> = closure.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut matrix = DMatrix::zeros(closure.len(), closure.len());
        for (i, a) in self.support.iter().enumerate() {
            for (j, b) in self.support.iter().enumerate() {
                matrix[(index[&mix(a, b)], index[&mix(b, a)])] = self.matrix[(i, j)];
            }
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERM_TOL {
            return Err(QstateError::NotHermitian(dev));
        }
        Ok(DensityOperator {
            dims: self.dims.clone(),
            support: closure,
            matrix,
        })
    }

    /// True iff every off-diagonal entry is at most `DIAG_TOL` in
    /// magnitude.
    pub fn is_diagonal_in_product_basis(&self) -> bool {
        let n = self.support.len();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.matrix[(i, j)].norm() > DIAG_TOL {
                    return false;
                }
            }
        }
        true
    }

    /// Dense matrix over the full product space; guarded by `max_dim`.
    pub fn to_dense(&self, max_dim: usize) -> Result<DMatrix<Complex64>, QstateError> {
        let total: usize = self.dims.iter().product();
        if total > max_dim {
            return Err(QstateError::DimensionGuard(total, max_dim));
        }
        let mut out = DMatrix::zeros(total, total);
        for (i, li) in self.support.iter().enumerate() {
            for (j, lj) in self.support.iter().enumerate() {
                out[(label_to_index(li, &self.dims), label_to_index(lj, &self.dims))] =
                    self.matrix[(i, j)];
            }
        }
        Ok(out)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>, QstateError> {
        eigenvalues(&self.matrix)
    }
}

pub fn label_to_index(label: &[u8], dims: &[usize]) -> usize {
    label
        .iter()
        .zip(dims)
        .fold(0, |acc, (&l, &d)| acc * d + l as usize)
}

pub fn index_to_label(mut index: usize, dims: &[usize]) -> Label {
    let mut out = vec![0u8; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = (index % d) as u8;
        index /= d;
    }
    out
}

fn validate_keep(keep: &[usize], n: usize) -> Result<(), QstateError> {
    if keep.is_empty() {
        return Err(QstateError::EmptyKeep);
    }
    for w in keep.windows(2) {
        assert!(w[0] < w[1], "keep must be sorted and distinct");
    }
    if let Some(&max) = keep.last() {
        if max >= n {
            return Err(QstateError::SiteOutOfRange(max, n));
        }
    }
    Ok(())
}

type ReducedParts = (Vec<usize>, Vec<Label>, DMatrix<Complex64>);

/// Unnormalized partial trace of |psi><psi|; returns (<psi|psi>, parts).
fn reduce_unnormalized(psi: &SparseKet, keep: &[usize]) -> Result<(f64, ReducedParts), QstateError> {
    validate_keep(keep, psi.site_count())?;
    let traced: Vec<usize> = (0..psi.site_count()).filter(|s| !keep.contains(s)).collect();
    // bucket amplitudes by their restriction to the traced sites
    let mut buckets: BTreeMap<Label, Vec<(Label, Complex64)>> = BTreeMap::new();
    for (label, &a) in psi.amplitudes() {
        let tr: Label = traced.iter().map(|&s| label[s]).collect();
        let kp: Label = keep.iter().map(|&s| label[s]).collect();
        buckets.entry(tr).or_default().push((kp, a));
    }
    let support: Vec<Label> = {
        let mut s: BTreeSet<Label> = BTreeSet::new();
        for group in buckets.values() {
            for (kp, _) in group {
                s.insert(kp.clone());
            }
        }
        s.into_iter().collect()
    };
    let index: BTreeMap<&Label, usize> = support.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let mut matrix = DMatrix::zeros(support.len(), support.len());
    for group in buckets.values() {
        for (la, a) in group {
            for (lb, b) in group {
                matrix[(index[la], index[lb])] += a * b.conj();
            }
        }
    }
    let dims: Vec<usize> = keep.iter().map(|&s| psi.dims()[s]).collect();
    Ok((psi.norm_sqr(), (dims, support, matrix)))
}

pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Ascending real eigenvalues of a Hermitian matrix.
pub fn eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>, QstateError> {
    let dev = hermitian_deviation(h);
    if dev > 1e-10 {
        return Err(QstateError::NotHermitian(dev));
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut vals: Vec<f64> = sym
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

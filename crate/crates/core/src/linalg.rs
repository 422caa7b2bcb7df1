//! Spectral coordinates of a least-squares design.
//!
//! Everything downstream only needs the eigenvalues `s₁ ≤ … ≤ s_p` of
//! `XᵀX/n`, its eigenvectors `V`, and the rotated response `Vᵀ(Xᵀy)/n`, so the
//! SVD of `X` is never formed. The eigensolver is cyclic Jacobi, which is
//! accurate to a few ulps of `‖A‖_F` for the `p ≲ 200` sizes used here.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_THRESHOLD: f64 = 1e-14;
const SYMMETRY_TOL: f64 = 1e-10;
const ZERO_CLAMP_REL: f64 = 1e-12;

/// Ascending nonnegative eigenvalues of a sample covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` ascending; rejects empty, negative or non-finite input.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::contract("spectrum must be nonempty"));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::Data(format!(
                "eigenvalue {i} = {v} is not a finite nonnegative number"
            )));
        }
        values.sort_by(f64::total_cmp);
        Ok(Spectrum { eigenvalues: values })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Smallest eigenvalue `μ = s₁`.
    pub fn mu(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Largest eigenvalue `L = s_p`.
    pub fn big_l(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Condition number `L/μ`, defined only when `μ > 0`.
    pub fn kappa(&self) -> Option<f64> {
        (self.mu() > 0.0).then(|| self.big_l() / self.mu())
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|&&s| s > 0.0).count()
    }
}

/// A design in the eigenbasis of `XᵀX/n`.
#[derive(Debug, Clone)]
pub struct SpectralDesign {
    pub n: usize,
    pub p: usize,
    pub spectrum: Spectrum,
    /// Columns are the eigenvectors `v_i`, in the order of `spectrum`.
    pub v_basis: DMatrix<f64>,
    /// `v_iᵀXᵀy/n` once a response is attached.
    pub rotated_channel: Option<Vec<f64>>,
}

impl SpectralDesign {
    /// A design given directly by its spectrum and eigenbasis (no data matrix).
    pub fn from_parts(n: usize, spectrum: Spectrum, v_basis: DMatrix<f64>) -> Result<Self> {
        let p = spectrum.len();
        if n == 0 {
            return Err(Error::contract("n must be positive"));
        }
        if v_basis.nrows() != p || v_basis.ncols() != p {
            return Err(Error::contract(format!(
                "basis is {}x{}, spectrum has {p} entries",
                v_basis.nrows(),
                v_basis.ncols()
            )));
        }
        Ok(SpectralDesign {
            n,
            p,
            spectrum,
            v_basis,
            rotated_channel: None,
        })
    }

    /// `Vᵀβ`.
    pub fn rotate(&self, beta: &[f64]) -> Result<Vec<f64>> {
        self.check_len(beta.len())?;
        Ok((self.v_basis.tr_mul(&DVector::from_column_slice(beta)))
            .iter()
            .copied()
            .collect())
    }

    /// `V a`, the inverse of [`rotate`](Self::rotate).
    pub fn unrotate(&self, coords: &[f64]) -> Result<Vec<f64>> {
        self.check_len(coords.len())?;
        Ok((&self.v_basis * DVector::from_column_slice(coords))
            .iter()
            .copied()
            .collect())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.p {
            return Err(Error::contract(format!(
                "vector has length {len}, design has p = {}",
                self.p
            )));
        }
        Ok(())
    }
}

/// Symmetric eigendecomposition `A = QΛQᵀ` with ascending eigenvalues.
pub fn sym_eig(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let p = a.nrows();
    if a.ncols() != p {
        return Err(Error::contract(format!("matrix is {}x{}, not square", p, a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("matrix has non-finite entries".into()));
    }
    let scale = a.amax().max(1.0);
    for i in 0..p {
        for j in (i + 1)..p {
            if (a[(i, j)] - a[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::contract(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    a[(i, j)],
                    a[(j, i)]
                )));
            }
        }
    }

    let mut w = a.clone();
    let mut q = DMatrix::<f64>::identity(p, p);
    let threshold = JACOBI_REL_THRESHOLD * a.norm();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&w) <= threshold {
            converged = true;
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let aij = w[(i, j)];
                if aij == 0.0 {
                    continue;
                }
                let theta = (w[(j, j)] - w[(i, i)]) / (2.0 * aij);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_columns(&mut w, i, j, c, s);
                rotate_rows(&mut w, i, j, c, s);
                w[(i, j)] = 0.0;
                w[(j, i)] = 0.0;
                rotate_columns(&mut q, i, j, c, s);
            }
        }
    }
    if !converged && off_diagonal_norm(&w) > threshold {
        return Err(Error::domain(format!(
            "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| w[(x, x)].total_cmp(&w[(y, y)]));
    let values = order.iter().map(|&k| w[(k, k)]).collect();
    let vectors = DMatrix::from_fn(p, p, |r, c| q[(r, order[c])]);
    Ok((values, vectors))
}

fn off_diagonal_norm(w: &DMatrix<f64>) -> f64 {
    let mut acc = 0.0;
    for (idx, v) in w.iter().enumerate() {
        if idx % w.nrows() != idx / w.nrows() {
            acc += v * v;
        }
    }
    acc.sqrt()
}

fn rotate_columns(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let (mi, mj) = (m[(k, i)], m[(k, j)]);
        m[(k, i)] = c * mi - s * mj;
        m[(k, j)] = s * mi + c * mj;
    }
}

fn rotate_rows(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for k in 0..m.ncols() {
        let (mi, mj) = (m[(i, k)], m[(j, k)]);
        m[(i, k)] = c * mi - s * mj;
        m[(j, k)] = s * mi + c * mj;
    }
}

/// Eigendecomposition of `XᵀX/n` for an `n × p` design.
pub fn design_decompose(x: &DMatrix<f64>) -> Result<SpectralDesign> {
    let (n, p) = x.shape();
    if n == 0 || p == 0 {
        return Err(Error::contract("design must have n ≥ 1 and p ≥ 1"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("design matrix has non-finite entries".into()));
    }
    let mut gram = x.tr_mul(x) / n as f64;
    // tr_mul computes (i, j) and (j, i) separately
    for i in 0..p {
        for j in (i + 1)..p {
            let m = 0.5 * (gram[(i, j)] + gram[(j, i)]);
            gram[(i, j)] = m;
            gram[(j, i)] = m;
        }
    }
    let (mut values, vectors) = sym_eig(&gram)?;
    // Eigenvalues within rounding of zero, of either sign, are exact zeros.
    let floor = ZERO_CLAMP_REL * gram.norm();
    for v in values.iter_mut() {
        if v.abs() <= floor {
            *v = 0.0;
        }
    }
    let spectrum = Spectrum::new(values)?;
    SpectralDesign::from_parts(n, spectrum, vectors)
}

/// Attaches `v_iᵀXᵀy/n` to a design produced from `x`.
pub fn attach_response(mut design: SpectralDesign, x: &DMatrix<f64>, y: &[f64]) -> Result<SpectralDesign> {
    if x.nrows() != design.n || x.ncols() != design.p {
        return Err(Error::contract(format!(
            "design is {}x{}, matrix is {}x{}",
            design.n,
            design.p,
            x.nrows(),
            x.ncols()
        )));
    }
    if y.len() != design.n {
        return Err(Error::contract(format!(
            "response has length {}, expected n = {}",
            y.len(),
            design.n
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("response has non-finite entries".into()));
    }
    let xty = x.tr_mul(&DVector::from_column_slice(y)) / design.n as f64;
    let channel = design.v_basis.tr_mul(&xty);
    design.rotated_channel = Some(channel.iter().copied().collect());
    Ok(design)
}

/// Reads a headerless comma-separated matrix, one row per line.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row =
            rec.iter()
                .map(|field| {
                    field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                        Error::Data(format!("{}: row {}: bad number {field:?}", path.display(), line + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{}: empty matrix", path.display())));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Data(format!("{}: ragged rows", path.display())));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

/// Reads a vector stored as a single CSV column or a single row.
pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix_csv(path)?;
    if m.ncols() == 1 || m.nrows() == 1 {
        Ok(m.iter().copied().collect())
    } else {
        Err(Error::Data(format!(
            "{}: expected a single row or column, got {}x{}",
            path.display(),
            m.nrows(),
            m.ncols()
        )))
    }
}

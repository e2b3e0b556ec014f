//! Gauge-fixing factorizations: structure-preserving diagonalization of
//! Hermitian algebra elements, `g = n_+^{-1} b_-` and the Iwasawa
//! decomposition `g = n a k`.

use nalgebra::SymmetricEigen;

use super::{c, determinant, ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::rootsys::{Family, RootDatum};

/// Eigenvalue gap below which a spectrum is treated as degenerate.
pub const SPECTRAL_GAP_TOLERANCE: f64 = 1e-8;
/// Relative pivot size below which the Gauss decomposition is declared to fail.
pub const PIVOT_TOLERANCE: f64 = 1e-12;
const HERMITIAN_TOLERANCE: f64 = 1e-9;
const UNITARITY_TOLERANCE: f64 = 1e-8;

/// `k X k^{-1} = diag pattern(qhat)` with `k` in the compact group.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub k: ComplexMatrix,
    /// Spectrum coordinates in the open Weyl chamber.
    pub qhat: Vec<f64>,
    /// Full spectrum of `X`, descending (before the D-type sign flip).
    pub spectrum: Vec<f64>,
}

/// `nplus * g = glow` with `nplus` unipotent upper and `glow` lower triangular.
#[derive(Debug, Clone)]
pub struct GaussFactors {
    pub nplus: ComplexMatrix,
    pub glow: ComplexMatrix,
}

/// `g = nplus * diag(a) * k`.
#[derive(Debug, Clone)]
pub struct IwasawaFactors {
    pub nplus: ComplexMatrix,
    pub a: Vec<f64>,
    pub k: ComplexMatrix,
}

impl IwasawaFactors {
    pub fn recombine(&self) -> ComplexMatrix {
        let a = ComplexMatrix::from_real_diagonal(&self.a);
        &(&self.nplus * &a) * &self.k
    }
}

fn unitarity_defect(k: &ComplexMatrix) -> f64 {
    (&(k * &k.adjoint()) - &ComplexMatrix::identity(k.rows())).frobenius_norm()
}

/// Brings a Hermitian element of the algebra to its diagonal Cartan pattern.
///
/// The eigenvector of `-q_i` is taken as the `Omega`-image of the eigenvector
/// of `q_i`, so the resulting `k` preserves the form. For B the kernel vector
/// is rescaled to be `Omega`-self-dual, and for D an odd determinant is
/// repaired by swapping the two middle rows, which flips the sign of `q_n`.
pub fn structured_diagonalize(datum: &RootDatum, x: &ComplexMatrix) -> Result<Diagonalization> {
    let big = datum.dim();
    let n = datum.rank();
    x.ensure_shape(big, big, "X")?;
    datum.ensure_in_algebra(x)?;
    let scale = x.frobenius_norm().max(1.0);
    let anti = (x - &x.adjoint()).frobenius_norm() / 2.0;
    if anti > HERMITIAN_TOLERANCE * scale {
        return Err(Error::Structural(format!(
            "X has a nonzero compact component (norm {anti:.3e})"
        )));
    }

    let hermitian = (x + &x.adjoint()).scale_real(0.5);
    let eig = SymmetricEigen::new(hermitian.into_nalgebra());
    let mut order: Vec<usize> = (0..big).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let spectrum: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let spread = spectrum.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let gap = spectrum
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    if gap < SPECTRAL_GAP_TOLERANCE * spread {
        return Err(Error::DegenerateSpectrum {
            gap,
            tolerance: SPECTRAL_GAP_TOLERANCE * spread,
        });
    }
    // Row i of k is the conjugated eigenvector of the i-th largest eigenvalue.
    let eigen_row = |slot: usize| -> Vec<C64> {
        let col = order[slot];
        (0..big).map(|r| eig.eigenvectors[(r, col)].conj()).collect()
    };

    let mut k = ComplexMatrix::zeros(big, big);
    let mut qhat = spectrum[..n].to_vec();
    match datum.family() {
        Family::A => {
            for slot in 0..big {
                for (j, z) in eigen_row(slot).into_iter().enumerate() {
                    k[(slot, j)] = z;
                }
            }
        }
        family => {
            let omega = datum.omega();
            for i in 0..n {
                let row = eigen_row(i);
                for (j, z) in row.iter().enumerate() {
                    k[(i, j)] = *z;
                }
                // conj(row) * Omega
                for j in 0..big {
                    let mut acc = c(0.0);
                    for (l, z) in row.iter().enumerate() {
                        acc += z.conj() * omega[(l, j)];
                    }
                    k[(big - 1 - i, j)] = acc;
                }
            }
            if family == Family::B {
                let mut v0 = eigen_row(n);
                let image: Vec<C64> = (0..big)
                    .map(|j| (0..big).map(|l| v0[l].conj() * omega[(l, j)]).sum())
                    .collect();
                let pivot = (0..big)
                    .max_by(|&a, &b| v0[a].norm().total_cmp(&v0[b].norm()))
                    .unwrap_or(0);
                let root = (image[pivot] / v0[pivot]).sqrt();
                for z in &mut v0 {
                    *z *= root;
                }
                for (j, z) in v0.into_iter().enumerate() {
                    k[(n, j)] = z;
                }
                if determinant(&k)?.re < 0.0 {
                    for j in 0..big {
                        k[(n, j)] = -k[(n, j)];
                    }
                }
            }
            if family == Family::D && determinant(&k)?.re < 0.0 {
                for j in 0..big {
                    let tmp = k[(n - 1, j)];
                    k[(n - 1, j)] = k[(n, j)];
                    k[(n, j)] = tmp;
                }
                qhat[n - 1] = -qhat[n - 1];
            }
        }
    }

    let defect = unitarity_defect(&k);
    let group = datum.group_residual(&k)?;
    if defect > UNITARITY_TOLERANCE || group > UNITARITY_TOLERANCE {
        return Err(Error::Internal(format!(
            "diagonalizer left the compact group (unitarity {defect:.3e}, form {group:.3e})"
        )));
    }
    if datum.chamber_margin(&qhat) <= 0.0 {
        return Err(Error::Internal(format!(
            "spectrum {qhat:?} could not be moved into the Weyl chamber"
        )));
    }
    Ok(Diagonalization { k, qhat, spectrum })
}

/// Factorizes `g = nplus^{-1} glow`.
///
/// Uses Doolittle elimination on the index-reversed matrix, which turns the
/// trailing principal minors of `g` into the leading ones.
pub fn lower_triangularize(datum: &RootDatum, g: &ComplexMatrix) -> Result<GaussFactors> {
    let big = datum.dim();
    g.ensure_shape(big, big, "g")?;
    datum.ensure_in_group(g)?;
    let threshold = PIVOT_TOLERANCE * g.frobenius_norm();
    let rev = |i: usize| big - 1 - i;

    // M = R g R, eliminated in place into U with unit lower multipliers L.
    let mut u = ComplexMatrix::from_fn(big, big, |i, j| g[(rev(i), rev(j))]);
    let mut l = ComplexMatrix::identity(big);
    let mut minor = c(1.0);
    for j in 0..big {
        let pivot = u[(j, j)];
        minor *= pivot;
        if pivot.norm() < threshold {
            return Err(Error::GaussDecomposition {
                order: j + 1,
                value: minor.norm(),
            });
        }
        for i in j + 1..big {
            let factor = u[(i, j)] / pivot;
            l[(i, j)] = factor;
            for col in j..big {
                let delta = factor * u[(j, col)];
                u[(i, col)] -= delta;
            }
            u[(i, j)] = c(0.0);
        }
    }
    // g = (R L R)(R U R) with R L R unit upper triangular.
    let upper = ComplexMatrix::from_fn(big, big, |i, j| l[(rev(i), rev(j))]);
    let glow = ComplexMatrix::from_fn(big, big, |i, j| u[(rev(i), rev(j))]);
    let nplus = invert_unit_upper(&upper);
    Ok(GaussFactors { nplus, glow })
}

/// Back substitution for a unit upper triangular matrix.
fn invert_unit_upper(u: &ComplexMatrix) -> ComplexMatrix {
    let n = u.rows();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        for i in (0..col).rev() {
            let mut acc = c(0.0);
            for m in i + 1..=col {
                acc += u[(i, m)] * inv[(m, col)];
            }
            inv[(i, col)] = -acc;
        }
    }
    inv
}

/// `g = nplus * diag(a) * k` by Gram-Schmidt on the rows of `g`, starting from
/// the bottom row.
pub fn iwasawa(datum: &RootDatum, g: &ComplexMatrix) -> Result<IwasawaFactors> {
    let big = datum.dim();
    g.ensure_shape(big, big, "g")?;
    datum.ensure_in_group(g)?;
    let mut k = ComplexMatrix::zeros(big, big);
    let mut t = ComplexMatrix::zeros(big, big);
    let floor = 1e-14 * g.frobenius_norm();
    for i in (0..big).rev() {
        let mut row: Vec<C64> = (0..big).map(|j| g[(i, j)]).collect();
        // Two passes of modified Gram-Schmidt against the rows already built.
        for _ in 0..2 {
            for m in i + 1..big {
                let proj: C64 = (0..big).map(|j| row[j] * k[(m, j)].conj()).sum();
                t[(i, m)] += proj;
                for (j, z) in row.iter_mut().enumerate() {
                    *z -= proj * k[(m, j)];
                }
            }
        }
        let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > floor) {
            return Err(Error::Singular("g has linearly dependent rows".into()));
        }
        t[(i, i)] = c(norm);
        for (j, z) in row.into_iter().enumerate() {
            k[(i, j)] = z / norm;
        }
    }
    let a: Vec<f64> = (0..big).map(|i| t[(i, i)].re).collect();
    let nplus = ComplexMatrix::from_fn(big, big, |i, j| if j >= i { t[(i, j)] / a[j] } else { c(0.0) });
    Ok(IwasawaFactors { nplus, a, k })
}

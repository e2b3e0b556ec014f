//! The duality map between the Toda gauge and the Moser gauge.
//!
//! Toda to Goldfish: diagonalize `X` by `k in K`; the residual `N_+` action
//! brings `g k^{-1}` to the lower triangular Moser gauge, whose diagonal
//! `ahat` is read off the bottom row (see [`toda_to_moser`]). Goldfish to Toda: Iwasawa
//! factorize the Moser `g = n a k`, read `q` from `a` and `p` from the Cartan
//! part of `k X k^{-1}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::goldfish::{a_from_p, goldfish_hamiltonians, p_from_a, GoldfishPoint};
use crate::linalg::{
    bottom_right_minor, iwasawa, relative_difference,
    structured_diagonalize, ComplexMatrix,
};
use crate::moser::{
    build_moser_g, cauchy_binet_minor, MoserPoint,
};
use crate::rootsys::RootDatum;
use crate::toda::{build_lax, hamiltonians_of_lax, TodaPoint};

/// Smallest admissible modulus of a diagonal entry before phase fixing.
pub const PHASE_TOLERANCE: f64 = 1e-12;
/// Minimal distance of the image from the chamber walls.
pub const CHAMBER_TOLERANCE: f64 = 1e-8;
/// Bound on the Moser momentum residual of the gauge-fixed image.
pub const IMAGE_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// The Moser-gauge representative of a Toda point.
#[derive(Debug, Clone)]
pub struct MoserImage {
    pub point: MoserPoint,
    /// Lower triangular `g` with real positive A-block diagonal.
    pub g: ComplexMatrix,
    /// Largest mismatch, relative to the row scale, between the moduli of
    /// the bottom row of `g k^{-1}` and of the rebuilt Moser `g`.
    pub residual: f64,
}

/// Each column of the Moser `g` is its diagonal entry times a vector that
/// only depends on `qhat`, and the bottom row of `g k^{-1}` is the bottom row
/// of its lower triangular factor. So `ahat_j` is the ratio of moduli of the
/// bottom-row entries of `g k^{-1}` and of the `ahat = 1` template. This
/// avoids eliminating the eigenvector matrix, which loses digits once `ahat`
/// spans several orders of magnitude.
pub fn toda_to_moser(datum: &RootDatum, pt: &TodaPoint) -> Result<MoserImage> {
    let lax = build_lax(datum, pt)?;
    let diag = structured_diagonalize(datum, &lax.x)?;
    let margin = datum.chamber_margin(&diag.qhat);
    if margin < CHAMBER_TOLERANCE {
        return Err(Error::NonGeneric(format!(
            "spectrum {:?} is within {margin:.3e} of a chamber wall",
            diag.qhat
        )));
    }
    let rotated = &lax.g * &diag.k.adjoint();
    let n = datum.rank();
    let last = datum.dim() - 1;
    let template = build_moser_g(datum, &MoserPoint::new(diag.qhat.clone(), vec![1.0; n])?)?;
    let scale = (0..=last).map(|j| rotated[(last, j)].norm()).fold(0.0, f64::max);
    let mut ahat = Vec::with_capacity(n);
    for j in 0..n {
        let z = rotated[(last, j)].norm();
        let t = template[(last, j)].norm();
        if z <= PHASE_TOLERANCE * scale || t == 0.0 {
            return Err(Error::NonGeneric(format!(
                "bottom-row entry {} vanishes ({z:.3e})",
                j + 1
            )));
        }
        ahat.push(z / t);
    }
    let point = MoserPoint::new(diag.qhat, ahat)?;
    let g = build_moser_g(datum, &point)?;
    let residual = (0..=last)
        .map(|j| (rotated[(last, j)].norm() - g[(last, j)].norm()).abs() / scale)
        .fold(0.0, f64::max);
    if residual > IMAGE_RESIDUAL_TOLERANCE {
        return Err(Error::Consistency(format!(
            "bottom row of the image disagrees with the Moser gauge (residual {residual:.3e})"
        )));
    }
    Ok(MoserImage { point, g, residual })
}

pub fn toda_to_goldfish(datum: &RootDatum, pt: &TodaPoint) -> Result<GoldfishPoint> {
    let image = toda_to_moser(datum, pt)?;
    p_from_a(datum, &image.point)
}

pub fn goldfish_to_toda(datum: &RootDatum, gp: &GoldfishPoint) -> Result<TodaPoint> {
    let mp = a_from_p(datum, gp)?;
    let g = build_moser_g(datum, &mp)?;
    let x = datum.cartan_element(&mp.qhat);
    let factors = iwasawa(datum, &g)?;
    let x_toda = &(&factors.k * &x) * &factors.k.adjoint();
    let n = datum.rank();
    let q = factors.a[..n].iter().map(|a| a.ln()).collect();
    let p = datum
        .cartan_coordinates(&x_toda)
        .into_iter()
        .map(|z| z.re)
        .collect();
    TodaPoint::new(q, p)
}

/// Both families of invariants evaluated in both gauges.
#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    /// `H_k` at the Toda point.
    pub toda_values: Vec<f64>,
    /// Closed-form `Hhat_k` at the Goldfish image.
    pub goldfish_values: Vec<f64>,
    /// `J_k = m_k(g g^dagger)` in the Toda gauge.
    pub jk_toda_gauge: Vec<f64>,
    /// `m_k(g g^dagger)` of the gauge-fixed Moser `g`.
    pub jk_moser_gauge: Vec<f64>,
    /// `I_k = Tr X^deg(k)` of the Toda Lax matrix.
    pub ik_toda_gauge: Vec<f64>,
    /// Power sums of the diagonal pattern of `qhat`.
    pub ik_moser_gauge: Vec<f64>,
    pub qhat: Vec<f64>,
    pub phat: Vec<f64>,
    pub moser_residual: f64,
    pub max_relative_mismatch: f64,
}

pub fn verify_duality_identities(
    datum: &RootDatum,
    pt: &TodaPoint,
    kmax: usize,
) -> Result<DualityReport> {
    let n = datum.rank();
    if kmax == 0 || kmax > n {
        return Err(Error::InvalidArgument(format!("kmax {kmax} outside 1..={n}")));
    }
    let algebra = datum.algebra();
    let lax = build_lax(datum, pt)?;
    let toda_values = hamiltonians_of_lax(algebra, &lax.x, kmax);
    let image = toda_to_moser(datum, pt)?;
    let gp = p_from_a(datum, &image.point)?;
    let goldfish_values = goldfish_hamiltonians(datum, &gp, kmax)?;

    let gg = &lax.g * &lax.g.adjoint();
    let mut jk_toda_gauge = Vec::with_capacity(kmax);
    let mut jk_moser_gauge = Vec::with_capacity(kmax);
    let mut ik_toda_gauge = Vec::with_capacity(kmax);
    let mut ik_moser_gauge = Vec::with_capacity(kmax);
    let mut mismatch: f64 = 0.0;
    let pattern = datum.cartan_diagonal(&image.point.qhat);
    for k in 1..=kmax {
        let toda_side = bottom_right_minor(&gg, k)?.re;
        // Sum of squared minors of the triangular g; the trailing minor of
        // g g^dagger itself cancels badly once ahat spans many decades.
        let moser_side = cauchy_binet_minor(&image.g, k)?;
        mismatch = mismatch
            .max(relative_difference(toda_side, moser_side))
            .max(relative_difference(toda_side, goldfish_values[k - 1]));
        jk_toda_gauge.push(toda_side);
        jk_moser_gauge.push(moser_side);

        let degree = algebra.trace_degree(k) as i32;
        let trace = lax.x.power(degree as u32).trace().re;
        let sum: f64 = pattern.iter().map(|d| d.powi(degree)).sum();
        let scale: f64 = pattern.iter().map(|d| d.abs().powi(degree)).sum();
        if scale > 0.0 {
            mismatch = mismatch.max((trace - sum).abs() / scale);
        }
        ik_toda_gauge.push(trace);
        ik_moser_gauge.push(sum);
    }
    Ok(DualityReport {
        toda_values,
        goldfish_values,
        jk_toda_gauge,
        jk_moser_gauge,
        ik_toda_gauge,
        ik_moser_gauge,
        qhat: gp.qhat,
        phat: gp.phat,
        moser_residual: image.residual,
        max_relative_mismatch: mismatch,
    })
}

/// Result of [`symplectomorphism_check`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymplecticCheck {
    /// `min over sigma of ||J^T OmegaHat J - sigma Omega||_F`.
    pub residual: f64,
    /// The sign attaining the minimum.
    pub sigma: i32,
}

/// Compares the pull-back of `s sum dqhat ^ dphat` along the duality map with
/// `s sum dp ^ dq`, using a central-difference Jacobian with the given step.
pub fn symplectomorphism_check(datum: &RootDatum, pt: &TodaPoint, step: f64) -> Result<SymplecticCheck> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let n = datum.rank();
    let dim = 2 * n;
    let z = pt.to_vec();
    let image = |z: &[f64]| -> Result<Vec<f64>> {
        Ok(toda_to_goldfish(datum, &TodaPoint::from_slice(z)?)?.to_vec())
    };
    image(&z)?;
    let mut jac = vec![vec![0.0; dim]; dim];
    let mut work = z.clone();
    for col in 0..dim {
        work[col] = z[col] + step;
        let plus = image(&work)?;
        work[col] = z[col] - step;
        let minus = image(&work)?;
        work[col] = z[col];
        for row in 0..dim {
            jac[row][col] = (plus[row] - minus[row]) / (2.0 * step);
        }
    }
    let s = datum.algebra().symplectic_scale();
    // Omega on (q, p) for s dp^dq and OmegaHat on (qhat, phat) for s dqhat^dphat.
    let omega = |i: usize, j: usize| -> f64 {
        if i < n && j == i + n {
            -s
        } else if i >= n && j + n == i {
            s
        } else {
            0.0
        }
    };
    let omega_hat = |i: usize, j: usize| -omega(i, j);
    let mut plus = 0.0;
    let mut minus = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let mut pulled = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    let w = omega_hat(i, j);
                    if w != 0.0 {
                        pulled += jac[i][a] * w * jac[j][b];
                    }
                }
            }
            plus += (pulled - omega(a, b)).powi(2);
            minus += (pulled + omega(a, b)).powi(2);
        }
    }
    let (plus, minus) = (plus.sqrt(), minus.sqrt());
    Ok(if plus <= minus {
        SymplecticCheck { residual: plus, sigma: 1 }
    } else {
        SymplecticCheck { residual: minus, sigma: -1 }
    })
}

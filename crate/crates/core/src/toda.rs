//! Open Toda chains in the Toda gauge: `g = exp(q)` diagonal, `X` the Lax matrix.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::rootsys::{AlgebraType, Family, RootDatum};

/// Canonical coordinates `(q, p)` of an open Toda chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TodaPoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl TodaPoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::Dimension(format!(
                "q has {} entries but p has {}",
                q.len(),
                p.len()
            )));
        }
        if q.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("Toda coordinates must be finite".into()));
        }
        Ok(Self { q, p })
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    /// Euclidean norm of the concatenated vector `(q, p)`.
    pub fn norm(&self) -> f64 {
        self.q.iter().chain(&self.p).map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `(q_1..q_n, p_1..p_n)`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    pub fn from_slice(z: &[f64]) -> Result<Self> {
        if z.len() % 2 != 0 {
            return Err(Error::Dimension(format!("odd phase-space vector length {}", z.len())));
        }
        let n = z.len() / 2;
        Self::new(z[..n].to_vec(), z[n..].to_vec())
    }

    fn check_rank(&self, datum: &RootDatum) -> Result<()> {
        if self.rank() != datum.rank() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, {} needs {}",
                self.rank(),
                datum.algebra(),
                datum.rank()
            )));
        }
        Ok(())
    }
}

/// Reduced symplectic form `scale * sum dp ^ dq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticForm {
    pub scale: f64,
}

impl SymplecticForm {
    pub fn for_algebra(algebra: AlgebraType) -> Self {
        Self {
            scale: algebra.symplectic_scale(),
        }
    }
}

/// Group and algebra components of a point of the reduced phase space.
#[derive(Debug, Clone)]
pub struct LaxPair {
    pub g: ComplexMatrix,
    pub x: ComplexMatrix,
}

pub fn build_lax(datum: &RootDatum, pt: &TodaPoint) -> Result<LaxPair> {
    pt.check_rank(datum)?;
    let d = datum.cartan_diagonal(&pt.q);
    let g = ComplexMatrix::from_real_diagonal(&d.iter().map(|v| v.exp()).collect::<Vec<_>>());
    let mut x = datum.cartan_element(&pt.p);
    let lambda = datum.momentum_value();
    let big = datum.dim();
    for i in 0..big {
        for j in 0..i {
            let l = lambda[(i, j)].re;
            if l != 0.0 {
                let v = C64::new(l * (d[j] - d[i]).exp(), 0.0);
                x[(i, j)] = v;
                x[(j, i)] = v;
            }
        }
    }
    Ok(LaxPair { g, x })
}

fn check_kmax(datum: &RootDatum, kmax: usize) -> Result<()> {
    if kmax == 0 || kmax > datum.rank() {
        return Err(Error::InvalidArgument(format!(
            "Hamiltonian index {kmax} outside 1..={}",
            datum.rank()
        )));
    }
    Ok(())
}

/// `Tr(X^m)` for `m = 1..=max_degree`, real parts.
fn trace_powers(x: &ComplexMatrix, max_degree: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_degree);
    let mut power = x.clone();
    for m in 1..=max_degree {
        if m > 1 {
            power = &power * x;
        }
        out.push(power.trace().re);
    }
    out
}

/// `H_k(X)` for `k = 1..=kmax`: `Tr(X^k)/k` for A, `Tr(X^{2k})/(4k)` otherwise.
pub fn hamiltonians_of_lax(algebra: AlgebraType, x: &ComplexMatrix, kmax: usize) -> Vec<f64> {
    let traces = trace_powers(x, algebra.trace_degree(kmax));
    (1..=kmax)
        .map(|k| match algebra.family() {
            Family::A => traces[k - 1] / k as f64,
            _ => traces[2 * k - 1] / (4 * k) as f64,
        })
        .collect()
}

pub fn toda_hamiltonians(datum: &RootDatum, pt: &TodaPoint, kmax: usize) -> Result<Vec<f64>> {
    check_kmax(datum, kmax)?;
    let lax = build_lax(datum, pt)?;
    Ok(hamiltonians_of_lax(datum.algebra(), &lax.x, kmax))
}

/// A single Toda Hamiltonian `H_k`.
pub fn toda_hamiltonian(datum: &RootDatum, pt: &TodaPoint, k: usize) -> Result<f64> {
    Ok(toda_hamiltonians(datum, pt, k)?[k - 1])
}

/// Eigenvalues of the Lax matrix, descending.
pub fn lax_spectrum(datum: &RootDatum, pt: &TodaPoint) -> Result<Vec<f64>> {
    let lax = build_lax(datum, pt)?;
    let eig = SymmetricEigen::new(lax.x.into_nalgebra());
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Residuals of the two momentum-map equations in the Toda gauge:
/// `||Pr_{n-}(g X g^{-1}) - lambda||_F` and `||Pr_k(X)||_F`.
pub fn toda_momentum_residuals(datum: &RootDatum, pt: &TodaPoint) -> Result<(f64, f64)> {
    let lax = build_lax(datum, pt)?;
    let ginv = lax.g.try_inverse()?;
    let conj = &(&lax.g * &lax.x) * &ginv;
    let lower = datum.project_lower_nilpotent(&conj)?;
    let first = lower.distance(datum.momentum_value());
    let second = datum.project_compact(&lax.x)?.frobenius_norm();
    Ok((first, second))
}

/// Exact gradient `(dH/dq, dH/dp)` of `H_index`.
///
/// With `H = Tr(X^m)/c`, `dH = (m/c) Tr(X^{m-1} dX)`. `dX/dp_l` is the Cartan
/// generator `h_l`; an off-diagonal pair `X_ij = X_ji = lambda_ij e^{d_j - d_i}`
/// picks up the factor `(dd_j - dd_i)/dq_l` from the linear map `d = d(q)`.
pub fn hamiltonian_gradient(datum: &RootDatum, pt: &TodaPoint, hamiltonian_index: usize) -> Result<Vec<f64>> {
    pt.check_rank(datum)?;
    check_kmax(datum, hamiltonian_index)?;
    let n = datum.rank();
    let big = datum.dim();
    let algebra = datum.algebra();
    let m = algebra.trace_degree(hamiltonian_index);
    let c = match algebra.family() {
        Family::A => hamiltonian_index as f64,
        _ => 4.0 * hamiltonian_index as f64,
    };
    let x = build_lax(datum, pt)?.x;
    let mut power = ComplexMatrix::identity(big);
    for _ in 1..m {
        power = &power * &x;
    }
    let weight = m as f64 / c;
    let directions: Vec<Vec<f64>> = (0..n)
        .map(|l| {
            let mut e = vec![0.0; n];
            e[l] = 1.0;
            datum.cartan_diagonal(&e)
        })
        .collect();
    let mut grad = vec![0.0; 2 * n];
    for (l, dir) in directions.iter().enumerate() {
        let mut dq = 0.0;
        let mut dp = 0.0;
        for i in 0..big {
            dp += power[(i, i)].re * dir[i];
            for j in 0..i {
                let v = x[(i, j)].re;
                if v != 0.0 {
                    dq += 2.0 * power[(j, i)].re * v * (dir[j] - dir[i]);
                }
            }
        }
        grad[l] = weight * dq;
        grad[n + l] = weight * dp;
    }
    Ok(grad)
}

/// Hamiltonian vector field `(dq, dp) = s^{-1} (dH/dp, -dH/dq)` of `H_index`.
pub fn equations_of_motion(
    datum: &RootDatum,
    pt: &TodaPoint,
    hamiltonian_index: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = datum.rank();
    let s = datum.algebra().symplectic_scale();
    let grad = hamiltonian_gradient(datum, pt, hamiltonian_index)?;
    let dq = grad[n..].iter().map(|v| v / s).collect();
    let dp = grad[..n].iter().map(|v| -v / s).collect();
    Ok((dq, dp))
}

/// Fixed-point tolerance and iteration cap of one implicit-midpoint step.
pub const MIDPOINT_TOLERANCE: f64 = 1e-12;
pub const MIDPOINT_MAX_ITERATIONS: usize = 100;

/// Time stepping used by [`integrate_flow_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FlowScheme {
    /// One implicit-midpoint step per time step (second order).
    Midpoint,
    /// Three implicit-midpoint substeps with the symmetric fourth-order
    /// triple-jump weights; still symplectic.
    #[default]
    ComposedMidpoint,
}

/// Triple-jump weights `(g1, g2, g1)` with `2 g1 + g2 = 1`.
fn triple_jump() -> [f64; 3] {
    let cbrt2 = 2f64.cbrt();
    let g1 = 1.0 / (2.0 - cbrt2);
    [g1, -cbrt2 * g1, g1]
}

/// One implicit-midpoint step `z1 = z + dt F((z + z1)/2)` solved by fixed-point
/// iteration from an explicit Euler predictor.
fn midpoint_step(
    z: &[f64],
    dt: f64,
    step: usize,
    field: &impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let f0 = field(z)?;
    let mut next: Vec<f64> = z.iter().zip(&f0).map(|(a, b)| a + dt * b).collect();
    for _ in 0..MIDPOINT_MAX_ITERATIONS {
        let mid: Vec<f64> = z.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        let f = field(&mid)?;
        let update: Vec<f64> = z.iter().zip(&f).map(|(a, b)| a + dt * b).collect();
        let change = update
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = update.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        next = update;
        if !next.iter().all(|v| v.is_finite()) {
            break;
        }
        if change <= MIDPOINT_TOLERANCE * scale {
            return Ok(next);
        }
    }
    Err(Error::StepFailure {
        step,
        iterations: MIDPOINT_MAX_ITERATIONS,
    })
}

/// Flow of `H_index` with the default [`FlowScheme`]; returns all `steps + 1`
/// points, the initial one first.
pub fn integrate_flow(
    datum: &RootDatum,
    pt: &TodaPoint,
    hamiltonian_index: usize,
    dt: f64,
    steps: usize,
) -> Result<Vec<TodaPoint>> {
    integrate_flow_with(datum, pt, hamiltonian_index, dt, steps, FlowScheme::default())
}

pub fn integrate_flow_with(
    datum: &RootDatum,
    pt: &TodaPoint,
    hamiltonian_index: usize,
    dt: f64,
    steps: usize,
    scheme: FlowScheme,
) -> Result<Vec<TodaPoint>> {
    pt.check_rank(datum)?;
    check_kmax(datum, hamiltonian_index)?;
    if !dt.is_finite() || !(dt * steps as f64).is_finite() {
        return Err(Error::InvalidArgument(format!("time step {dt} is not finite")));
    }
    let n = datum.rank();
    let field = |z: &[f64]| -> Result<Vec<f64>> {
        let (dq, dp) = equations_of_motion(datum, &TodaPoint::from_slice(z)?, hamiltonian_index)?;
        Ok(dq.into_iter().chain(dp).collect())
    };
    let weights: &[f64] = match scheme {
        FlowScheme::Midpoint => &[1.0],
        FlowScheme::ComposedMidpoint => &triple_jump(),
    };

    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(pt.clone());
    let mut z = pt.to_vec();
    for step in 1..=steps {
        if dt == 0.0 {
            trajectory.push(pt.clone());
            continue;
        }
        for w in weights {
            z = midpoint_step(&z, w * dt, step, &field)?;
        }
        trajectory.push(TodaPoint {
            q: z[..n].to_vec(),
            p: z[n..].to_vec(),
        });
    }
    Ok(trajectory)
}

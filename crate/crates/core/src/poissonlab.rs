//! Finite-difference Poisson brackets on the reduced phase spaces.
//!
//! Both sides carry the form `s sum dp ^ dq` with `s` the symplectic scale
//! of the algebra, so `{f, g} = s^{-1} sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i)`.
//! Gradients are central differences, Richardson-extrapolated over the step
//! pair `(h, h/2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goldfish::{goldfish_hamiltonians, GoldfishPoint};
use crate::rootsys::{AlgebraType, RootDatum};
use crate::toda::{toda_hamiltonians, TodaPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObservableFamily {
    Toda,
    Goldfish,
}

/// The `k`-th Hamiltonian of one of the two families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObservableHandle {
    family: ObservableFamily,
    index: usize,
    algebra: AlgebraType,
}

impl ObservableHandle {
    pub fn new(family: ObservableFamily, index: usize, algebra: AlgebraType) -> Result<Self> {
        if index == 0 || index > algebra.rank() {
            return Err(Error::InvalidArgument(format!(
                "observable index {index} outside 1..={}",
                algebra.rank()
            )));
        }
        Ok(Self { family, index, algebra })
    }

    pub fn family(&self) -> ObservableFamily {
        self.family
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn algebra(&self) -> AlgebraType {
        self.algebra
    }
}

/// A point of either reduced phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PhasePoint {
    Toda(TodaPoint),
    Goldfish(GoldfishPoint),
}

impl PhasePoint {
    pub fn family(&self) -> ObservableFamily {
        match self {
            PhasePoint::Toda(_) => ObservableFamily::Toda,
            PhasePoint::Goldfish(_) => ObservableFamily::Goldfish,
        }
    }

    /// Coordinates `(q, p)` or `(qhat, phat)`.
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            PhasePoint::Toda(p) => p.to_vec(),
            PhasePoint::Goldfish(p) => p.to_vec(),
        }
    }
}

/// All Hamiltonians `1..=kmax` of a family at the coordinate vector `z`.
pub fn family_values(
    datum: &RootDatum,
    family: ObservableFamily,
    z: &[f64],
    kmax: usize,
) -> Result<Vec<f64>> {
    match family {
        ObservableFamily::Toda => toda_hamiltonians(datum, &TodaPoint::from_slice(z)?, kmax),
        ObservableFamily::Goldfish => {
            goldfish_hamiltonians(datum, &GoldfishPoint::from_slice(z)?, kmax)
        }
    }
}

/// Richardson-extrapolated central-difference Jacobian of a vector function;
/// row `r` is the gradient of component `r`.
pub fn richardson_jacobian(
    z: &[f64],
    step: f64,
    mut f: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<Vec<Vec<f64>>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let outputs = f(z)?.len();
    let mut jac = vec![vec![0.0; z.len()]; outputs];
    let mut work = z.to_vec();
    for col in 0..z.len() {
        let mut diff = |h: f64| -> Result<Vec<f64>> {
            work[col] = z[col] + h;
            let plus = f(&work)?;
            work[col] = z[col] - h;
            let minus = f(&work)?;
            work[col] = z[col];
            Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        let coarse = diff(step)?;
        let fine = diff(step / 2.0)?;
        for r in 0..outputs {
            jac[r][col] = (4.0 * fine[r] - coarse[r]) / 3.0;
        }
    }
    Ok(jac)
}

/// `s^{-1} sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i)` from gradients over `(q, p)`.
pub fn bracket_from_gradients(scale: f64, df: &[f64], dg: &[f64]) -> f64 {
    let n = df.len() / 2;
    let mut acc = 0.0;
    for i in 0..n {
        acc += df[i] * dg[n + i] - df[n + i] * dg[i];
    }
    acc / scale
}

/// Bracket of two arbitrary functions of `(q, p)` under the form `scale * sum dp ^ dq`.
pub fn bracket_of_functions(
    scale: f64,
    z: &[f64],
    step: f64,
    f: impl Fn(&[f64]) -> Result<f64>,
    g: impl Fn(&[f64]) -> Result<f64>,
) -> Result<f64> {
    let jac = richardson_jacobian(z, step, |w| Ok(vec![f(w)?, g(w)?]))?;
    Ok(bracket_from_gradients(scale, &jac[0], &jac[1]))
}

pub fn poisson_bracket(
    datum: &RootDatum,
    f: &ObservableHandle,
    g: &ObservableHandle,
    point: &PhasePoint,
    step: f64,
) -> Result<f64> {
    if f.algebra() != datum.algebra() || g.algebra() != datum.algebra() {
        return Err(Error::InvalidArgument("observables belong to another algebra".into()));
    }
    if f.family() != g.family() || f.family() != point.family() {
        return Err(Error::InvalidArgument(
            "observables and point must belong to the same family".into(),
        ));
    }
    if f == g {
        return Ok(0.0);
    }
    let z = point.to_vec();
    let kmax = f.index().max(g.index());
    let (i, j) = (f.index() - 1, g.index() - 1);
    let jac = richardson_jacobian(&z, step, |w| {
        let values = family_values(datum, f.family(), w, kmax)?;
        Ok(vec![values[i], values[j]])
    })?;
    Ok(bracket_from_gradients(datum.algebra().symplectic_scale(), &jac[0], &jac[1]))
}

/// `|{H_j, H_k}| / (|grad H_j| |grad H_k|)` for all pairs of one family; the
/// diagonal is zero by antisymmetry.
pub fn commutativity_matrix(
    datum: &RootDatum,
    family: ObservableFamily,
    point: &PhasePoint,
    step: f64,
) -> Result<Vec<Vec<f64>>> {
    if family != point.family() {
        return Err(Error::InvalidArgument("point belongs to the other family".into()));
    }
    let n = datum.rank();
    let z = point.to_vec();
    let jac = richardson_jacobian(&z, step, |w| family_values(datum, family, w, n))?;
    let scale = datum.algebra().symplectic_scale();
    let norms: Vec<f64> = jac
        .iter()
        .map(|row| row.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut out = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let denom = norms[a] * norms[b];
            let value = bracket_from_gradients(scale, &jac[a], &jac[b]).abs();
            let normalized = if denom > 0.0 { value / denom } else { value };
            out[a][b] = normalized;
            out[b][a] = normalized;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Family;

    fn handle(family: ObservableFamily, k: usize, d: &RootDatum) -> ObservableHandle {
        ObservableHandle::new(family, k, d.algebra()).unwrap()
    }

    #[test]
    fn self_bracket_is_exactly_zero() {
        let d = RootDatum::new(Family::A, 3).unwrap();
        let h = handle(ObservableFamily::Toda, 2, &d);
        let pt = PhasePoint::Toda(TodaPoint::new(vec![0.1, 0.2, 0.3], vec![0.4, 0.5, 0.6]).unwrap());
        assert_eq!(poisson_bracket(&d, &h, &h, &pt, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn toda_a3_brackets_vanish() {
        let d = RootDatum::new(Family::A, 3).unwrap();
        let pt = PhasePoint::Toda(TodaPoint::new(vec![0.3, -0.1, 0.2], vec![0.5, -0.4, 0.1]).unwrap());
        let h2 = handle(ObservableFamily::Toda, 2, &d);
        let h3 = handle(ObservableFamily::Toda, 3, &d);
        let v = poisson_bracket(&d, &h2, &h3, &pt, 1e-3).unwrap();
        assert!(v.abs() < 1e-8, "{v}");
        let back = poisson_bracket(&d, &h3, &h2, &pt, 1e-3).unwrap();
        assert!((v + back).abs() < 1e-12);
    }

    #[test]
    fn goldfish_c2_brackets_vanish() {
        let d = RootDatum::new(Family::C, 2).unwrap();
        let pt = PhasePoint::Goldfish(GoldfishPoint::new(vec![1.4, 0.6], vec![0.2, -0.3]).unwrap());
        let m = commutativity_matrix(&d, ObservableFamily::Goldfish, &pt, 1e-3).unwrap();
        assert_eq!(m[0][0], 0.0);
        assert!(m[0][1] < 1e-8, "{m:?}");
    }

    #[test]
    fn non_commuting_pair_detected() {
        // {q_1, p_1} for the B/C/D scale is 1/2.
        let z = [0.3, 0.7];
        let v = bracket_of_functions(2.0, &z, 1e-3, |w| Ok(w[0]), |w| Ok(w[1])).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let v = bracket_of_functions(1.0, &z, 1e-3, |w| Ok(w[0]), |w| Ok(w[1])).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leibniz_rule() {
        let z = [0.3, -0.2, 0.5, 0.1];
        let f = |w: &[f64]| Ok(w[0].sin() * w[3] + w[2] * w[2]);
        let g = |w: &[f64]| Ok((w[1] + w[2]).exp());
        let h = |w: &[f64]| Ok(w[0] * w[3] - w[1]);
        let lhs = bracket_of_functions(2.0, &z, 1e-3, f, |w| Ok(g(w)? * h(w)?)).unwrap();
        let fg = bracket_of_functions(2.0, &z, 1e-3, f, g).unwrap();
        let fh = bracket_of_functions(2.0, &z, 1e-3, f, h).unwrap();
        let rhs = fg * h(&z).unwrap() + g(&z).unwrap() * fh;
        assert!((lhs - rhs).abs() <= 1e-5 * lhs.abs().max(1e-12));
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let d = RootDatum::new(Family::C, 2).unwrap();
        let t = handle(ObservableFamily::Toda, 1, &d);
        let g = handle(ObservableFamily::Goldfish, 1, &d);
        let pt = PhasePoint::Toda(TodaPoint::new(vec![0.1, 0.2], vec![0.3, 0.4]).unwrap());
        assert!(poisson_bracket(&d, &t, &g, &pt, 1e-3).is_err());
        assert!(ObservableHandle::new(ObservableFamily::Toda, 3, d.algebra()).is_err());
        let wall = PhasePoint::Goldfish(GoldfishPoint::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap());
        assert!(commutativity_matrix(&d, ObservableFamily::Goldfish, &wall, 1e-3).is_err());
    }
}

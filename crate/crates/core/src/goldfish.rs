//! Rational Goldfish models: the closed-form Hamiltonians in canonical
//! coordinates `(qhat, phat)`, the change of variables `ahat <-> phat`, and the
//! A-type Ruijsenaars-Schneider Hamiltonians whose strong-coupling limit they are.
//!
//! In every family `Hhat_k = m_k(g g^dagger)` for the Moser-gauge `g`; the
//! closed forms below are sums over pairs `(I, J)` of index sets, where `I`
//! selects columns carrying `ahat_i` and `J` the mirrored columns carrying
//! `1/ahat_j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::subsets;
use crate::moser::{check_chamber, MoserPoint};
use crate::rootsys::{Family, RootDatum};

/// Canonical coordinates of a Goldfish model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldfishPoint {
    pub qhat: Vec<f64>,
    pub phat: Vec<f64>,
}

impl GoldfishPoint {
    pub fn new(qhat: Vec<f64>, phat: Vec<f64>) -> Result<Self> {
        if qhat.len() != phat.len() {
            return Err(Error::Dimension(format!(
                "qhat has {} entries but phat has {}",
                qhat.len(),
                phat.len()
            )));
        }
        if qhat.iter().chain(&phat).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("Goldfish coordinates must be finite".into()));
        }
        Ok(Self { qhat, phat })
    }

    pub fn rank(&self) -> usize {
        self.qhat.len()
    }

    /// `(qhat_1..qhat_n, phat_1..phat_n)`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.qhat.iter().chain(&self.phat).copied().collect()
    }

    pub fn from_slice(z: &[f64]) -> Result<Self> {
        if z.len() % 2 != 0 {
            return Err(Error::Dimension(format!("odd phase-space vector length {}", z.len())));
        }
        let n = z.len() / 2;
        Self::new(z[..n].to_vec(), z[n..].to_vec())
    }
}

/// Coupling constant `nu > 0` of the rational Ruijsenaars-Schneider model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RSCoupling {
    nu: f64,
}

impl RSCoupling {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidArgument(format!("coupling must be positive, got {nu}")));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// `ahat_i^2 / e^{2 phat_i}` for each `i`.
fn variable_change_factors(datum: &RootDatum, qhat: &[f64]) -> Vec<f64> {
    let n = qhat.len();
    (0..n)
        .map(|i| {
            let mut f = 1.0;
            for j in i + 1..n {
                f *= qhat[i] - qhat[j];
            }
            for l in 0..i {
                f /= qhat[l] - qhat[i];
            }
            match datum.family() {
                Family::A => {}
                Family::C => f *= (0..n).map(|k| qhat[i] + qhat[k]).product::<f64>(),
                Family::B => f *= qhat[i] * (0..n).map(|k| qhat[i] + qhat[k]).product::<f64>(),
                Family::D => {
                    f *= (0..n).filter(|&k| k != i).map(|k| qhat[i] + qhat[k]).product::<f64>()
                }
            }
            f
        })
        .collect()
}

fn checked_factors(datum: &RootDatum, qhat: &[f64]) -> Result<Vec<f64>> {
    check_chamber(datum, qhat)?;
    let factors = variable_change_factors(datum, qhat);
    if let Some(i) = factors.iter().position(|f| !(*f > 0.0) || !f.is_finite()) {
        return Err(Error::Chamber(format!(
            "variable change factor {} for index {} is not positive",
            factors[i],
            i + 1
        )));
    }
    Ok(factors)
}

/// `ahat_i = e^{phat_i} sqrt(factor_i(qhat))`.
pub fn a_from_p(datum: &RootDatum, gp: &GoldfishPoint) -> Result<MoserPoint> {
    let factors = checked_factors(datum, &gp.qhat)?;
    let ahat = gp
        .phat
        .iter()
        .zip(&factors)
        .map(|(p, f)| p.exp() * f.sqrt())
        .collect();
    MoserPoint::new(gp.qhat.clone(), ahat)
}

/// Inverse of [`a_from_p`]: `phat_i = log(ahat_i^2 / factor_i) / 2`.
pub fn p_from_a(datum: &RootDatum, mp: &MoserPoint) -> Result<GoldfishPoint> {
    let factors = checked_factors(datum, &mp.qhat)?;
    let phat = mp
        .ahat
        .iter()
        .zip(&factors)
        .map(|(a, f)| a.ln() - 0.5 * f.ln())
        .collect();
    GoldfishPoint::new(mp.qhat.clone(), phat)
}

/// Weights of one `(I, J)` term shared by the B, C and D closed forms.
struct Terms<'a> {
    q: &'a [f64],
    p: &'a [f64],
}

impl Terms<'_> {
    /// `e^{2 p_i} / (prod_{m not in I} |q_i - q_m| prod_{m not in J} |q_i + q_m|)`.
    fn i_factor(&self, i: usize, in_i: &[bool], in_j: &[bool]) -> f64 {
        let q = self.q;
        let mut v = (2.0 * self.p[i]).exp();
        for m in 0..q.len() {
            if !in_i[m] {
                v /= (q[i] - q[m]).abs();
            }
            if !in_j[m] {
                v /= (q[i] + q[m]).abs();
            }
        }
        v
    }

    /// `e^{-2 p_j} / (prod_{m not in I} |q_j + q_m| prod_{m not in J} |q_j - q_m|)`.
    fn j_factor(&self, j: usize, in_i: &[bool], in_j: &[bool]) -> f64 {
        let q = self.q;
        let mut v = (-2.0 * self.p[j]).exp();
        for m in 0..q.len() {
            if !in_i[m] {
                v /= (q[j] + q[m]).abs();
            }
            if !in_j[m] {
                v /= (q[j] - q[m]).abs();
            }
        }
        v
    }
}

fn mask(n: usize, set: &[usize]) -> Vec<bool> {
    let mut out = vec![false; n];
    for &i in set {
        out[i] = true;
    }
    out
}

/// Calls `f(I, J)` for every pair of subsets of `0..n` with `|I| + |J| = total`.
fn for_each_pair(n: usize, total: usize, mut f: impl FnMut(&[usize], &[usize])) {
    for s in 0..=total.min(n) {
        if total - s > n {
            continue;
        }
        for i_set in subsets(n, s) {
            for j_set in subsets(n, total - s) {
                f(&i_set, &j_set);
            }
        }
    }
}

fn hamiltonian_a(q: &[f64], p: &[f64], k: usize) -> f64 {
    let n = q.len();
    let mut total = 0.0;
    for set in subsets(n, k) {
        let inside = mask(n, &set);
        let mut v = 1.0;
        for &i in &set {
            v *= (2.0 * p[i]).exp();
            for j in 0..n {
                if !inside[j] {
                    v /= (q[i] - q[j]).abs();
                }
            }
        }
        total += v;
    }
    total
}

fn hamiltonian_c(q: &[f64], p: &[f64], k: usize) -> f64 {
    let n = q.len();
    let t = Terms { q, p };
    let mut total = 0.0;
    for_each_pair(n, k, |i_set, j_set| {
        let (in_i, in_j) = (mask(n, i_set), mask(n, j_set));
        let mut v = 1.0;
        for &i in i_set {
            v *= t.i_factor(i, &in_i, &in_j);
        }
        for &j in j_set {
            v *= t.j_factor(j, &in_i, &in_j);
        }
        total += v;
    });
    total
}

fn hamiltonian_b(q: &[f64], p: &[f64], k: usize) -> f64 {
    let n = q.len();
    let t = Terms { q, p };
    let mut total = 0.0;
    for_each_pair(n, k, |i_set, j_set| {
        let (in_i, in_j) = (mask(n, i_set), mask(n, j_set));
        let mut v = 1.0;
        for &i in i_set {
            v *= t.i_factor(i, &in_i, &in_j) / q[i].abs();
        }
        for &j in j_set {
            v *= t.j_factor(j, &in_i, &in_j) / q[j].abs();
        }
        total += v;
    });
    // Terms through the middle column.
    for_each_pair(n, k - 1, |i_set, j_set| {
        let (in_i, in_j) = (mask(n, i_set), mask(n, j_set));
        let mut v = 1.0;
        for m in 0..n {
            if !in_i[m] {
                v /= q[m].abs();
            }
            if !in_j[m] {
                v /= q[m].abs();
            }
        }
        for &i in i_set {
            v *= t.i_factor(i, &in_i, &in_j);
        }
        for &j in j_set {
            v *= t.j_factor(j, &in_i, &in_j);
        }
        total += v;
    });
    total
}

fn hamiltonian_d(q: &[f64], p: &[f64], k: usize) -> f64 {
    let n = q.len();
    let t = Terms { q, p };
    let mut total = 0.0;
    for_each_pair(n, k, |i_set, j_set| {
        let (in_i, in_j) = (mask(n, i_set), mask(n, j_set));
        let mut v = 1.0;
        for &i in i_set {
            v *= t.i_factor(i, &in_i, &in_j);
        }
        for &j in j_set {
            v *= t.j_factor(j, &in_i, &in_j);
        }
        if k < n {
            for &m in i_set.iter().chain(j_set) {
                v *= 2.0 * q[m].abs();
            }
        } else {
            let s = i_set.len();
            let prod_i: f64 = i_set.iter().map(|&i| q[i]).product();
            let prod_j: f64 = j_set.iter().map(|&j| q[j]).product();
            let prod_rest: f64 = (0..n).filter(|&m| !in_j[m]).map(|m| q[m]).product();
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            let bracket = prod_i + sign * prod_rest;
            v *= 2f64.powi(n as i32 - 2) * (prod_j / prod_i).abs() * bracket * bracket;
        }
        total += v;
    });
    total
}

/// Closed-form `Hhat_1..Hhat_kmax`.
///
/// `Hhat_k = m_k(g g^dagger)` uniformly; the Sp(4) convention `Hhat_2 = m_2/2`
/// is left to the caller.
pub fn goldfish_hamiltonians(datum: &RootDatum, gp: &GoldfishPoint, kmax: usize) -> Result<Vec<f64>> {
    let n = datum.rank();
    if kmax == 0 || kmax > n {
        return Err(Error::InvalidArgument(format!("Hamiltonian index {kmax} outside 1..={n}")));
    }
    if gp.rank() != n {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, {} needs {n}",
            gp.rank(),
            datum.algebra()
        )));
    }
    check_chamber(datum, &gp.qhat)?;
    let (q, p) = (&gp.qhat[..], &gp.phat[..]);
    Ok((1..=kmax)
        .map(|k| match datum.family() {
            Family::A => hamiltonian_a(q, p, k),
            Family::B => hamiltonian_b(q, p, k),
            Family::C => hamiltonian_c(q, p, k),
            Family::D => hamiltonian_d(q, p, k),
        })
        .collect())
}

pub fn goldfish_hamiltonian(datum: &RootDatum, gp: &GoldfishPoint, k: usize) -> Result<f64> {
    Ok(goldfish_hamiltonians(datum, gp, k)?[k - 1])
}

/// The first D-type Hamiltonian in its printed form, with an inner sum over
/// `j` where the closed form has a product:
/// `sum_i 2 cosh(2 phat_i) sum_{j != i} 1/|qhat_i^2 - qhat_j^2|`.
/// Kept only to log its disagreement with `m_1`.
pub fn printed_d_first_hamiltonian(gp: &GoldfishPoint) -> f64 {
    let (q, p) = (&gp.qhat, &gp.phat);
    let n = q.len();
    (0..n)
        .map(|i| {
            let inner: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / ((q[i] - q[j]).abs() * (q[i] + q[j]).abs()))
                .sum();
            2.0 * (2.0 * p[i]).cosh() * inner
        })
        .sum()
}

/// A-type Goldfish Hamiltonian with signed denominators,
/// `sum_{|I|=k} prod_{i in I, j not in I} 1/(qhat_i - qhat_j) prod e^{2 phat}`.
/// This is the strong-coupling limit of [`rs_hamiltonian_a`].
pub fn signed_goldfish_hamiltonian_a(gp: &GoldfishPoint, k: usize) -> Result<f64> {
    rs_sum(gp, k, |x| 1.0 / x)
}

/// `H_k^RS = sum_{|I|=k} prod_{i in I, j not in I} (qhat_i - qhat_j + nu)/(qhat_i - qhat_j) prod e^{2 phat}`.
pub fn rs_hamiltonian_a(gp: &GoldfishPoint, coupling: RSCoupling, k: usize) -> Result<f64> {
    let nu = coupling.nu();
    for i in 0..gp.rank() {
        for j in 0..gp.rank() {
            if i != j && (gp.qhat[i] - gp.qhat[j] + nu).abs() < 1e-12 * nu {
                return Err(Error::Singular(format!(
                    "qhat_{} - qhat_{} hits -nu",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    rs_sum(gp, k, |x| (x + nu) / x)
}

fn rs_sum(gp: &GoldfishPoint, k: usize, weight: impl Fn(f64) -> f64) -> Result<f64> {
    let n = gp.rank();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("Hamiltonian index {k} outside 1..={n}")));
    }
    let q = &gp.qhat;
    for i in 0..n {
        for j in i + 1..n {
            if (q[i] - q[j]).abs() < 1e-12 {
                return Err(Error::Singular(format!("qhat_{} = qhat_{}", i + 1, j + 1)));
            }
        }
    }
    let mut total = 0.0;
    for set in subsets(n, k) {
        let inside = mask(n, &set);
        let mut v = 1.0;
        for &i in &set {
            v *= (2.0 * gp.phat[i]).exp();
            for j in 0..n {
                if !inside[j] {
                    v *= weight(q[i] - q[j]);
                }
            }
        }
        total += v;
    }
    Ok(total)
}

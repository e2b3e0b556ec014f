//! Moser gauge: `X` diagonal with spectrum `qhat`, `g` lower triangular.
//!
//! The first momentum equation `g X g^{-1} - X = lambda` is solved column by
//! column for the strictly lower entries once the diagonal of `g` is fixed
//! to `(ahat, [1], 1/ahat reversed)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    bottom_right_minor, c, general_minor, relative_difference, subsets, ComplexMatrix,
    MinorSelector,
};
use crate::rootsys::{Family, RootDatum};

/// Distance below which a denominator counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-8;
/// Agreement required between the two minor evaluations.
pub const MINOR_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoserPoint {
    pub qhat: Vec<f64>,
    pub ahat: Vec<f64>,
}

impl MoserPoint {
    pub fn new(qhat: Vec<f64>, ahat: Vec<f64>) -> Result<Self> {
        if qhat.len() != ahat.len() {
            return Err(Error::Dimension(format!(
                "qhat has {} entries but ahat has {}",
                qhat.len(),
                ahat.len()
            )));
        }
        if qhat.iter().chain(&ahat).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("Moser coordinates must be finite".into()));
        }
        if ahat.iter().any(|&a| a <= 0.0) {
            return Err(Error::InvalidArgument(format!("ahat must be positive: {ahat:?}")));
        }
        Ok(Self { qhat, ahat })
    }

    pub fn rank(&self) -> usize {
        self.qhat.len()
    }
}

/// Checks length and the open Weyl chamber condition for `qhat`.
pub(crate) fn check_chamber(datum: &RootDatum, qhat: &[f64]) -> Result<()> {
    if qhat.len() != datum.rank() {
        return Err(Error::Dimension(format!(
            "{} needs {} spectral coordinates, got {}",
            datum.algebra(),
            datum.rank(),
            qhat.len()
        )));
    }
    let margin = datum.chamber_margin(qhat);
    if !(margin > 0.0) {
        return Err(Error::Chamber(format!(
            "{qhat:?} is outside the open {} Weyl chamber",
            datum.algebra()
        )));
    }
    Ok(())
}

/// Parameters `(b, x)` of the lower triangular matrix
/// `M_ij = b_j prod_{k=j+1}^{i} 1/(x_j - x_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuijsenaarsMatrixSpec {
    pub b: Vec<f64>,
    pub x: Vec<f64>,
}

impl RuijsenaarsMatrixSpec {
    pub fn new(b: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if b.len() != x.len() {
            return Err(Error::Dimension(format!(
                "b has {} entries but x has {}",
                b.len(),
                x.len()
            )));
        }
        if b.iter().chain(&x).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix parameters must be finite".into()));
        }
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                if (x[i] - x[j]).abs() <= 1e-10 {
                    return Err(Error::Singular(format!(
                        "x_{} and x_{} coincide ({})",
                        i + 1,
                        j + 1,
                        x[i]
                    )));
                }
            }
        }
        Ok(Self { b, x })
    }

    pub fn size(&self) -> usize {
        self.b.len()
    }
}

pub fn build_ruijsenaars_matrix(spec: &RuijsenaarsMatrixSpec) -> ComplexMatrix {
    let m = spec.size();
    let mut out = ComplexMatrix::zeros(m, m);
    for j in 0..m {
        let mut v = spec.b[j];
        out[(j, j)] = c(v);
        for i in j + 1..m {
            v /= spec.x[j] - spec.x[i];
            out[(i, j)] = c(v);
        }
    }
    out
}

/// Minor of `M(b, x)` on its bottom `cols.len()` rows and the given columns:
/// `prod_r b_{i_r} prod_{j > i_r, j not in cols} 1/(x_{i_r} - x_j)`.
pub fn closed_form_minor(spec: &RuijsenaarsMatrixSpec, cols: &[usize]) -> Result<f64> {
    let m = spec.size();
    MinorSelector::bottom_rows(m, cols.to_vec())?;
    if cols.last().is_some_and(|&j| j >= m) {
        return Err(Error::InvalidArgument(format!("column index out of range for size {m}")));
    }
    let mut in_cols = vec![false; m];
    for &j in cols {
        in_cols[j] = true;
    }
    let mut value = 1.0;
    for &i in cols {
        value *= spec.b[i];
        for j in i + 1..m {
            if !in_cols[j] {
                value /= spec.x[i] - spec.x[j];
            }
        }
    }
    Ok(value)
}

/// Diagonal of the Moser-gauge `g`: `(ahat, [1], 1/ahat reversed)`.
fn moser_diagonal(datum: &RootDatum, ahat: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = ahat.iter().map(|a| a.ln()).collect();
    let mut d: Vec<f64> = datum.cartan_diagonal(&logs).iter().map(|v| v.exp()).collect();
    // Keep the A-block exact rather than round-tripping through log/exp.
    d[..ahat.len()].copy_from_slice(ahat);
    if datum.family() != Family::A {
        let big = d.len();
        for (i, a) in ahat.iter().enumerate() {
            d[big - 1 - i] = 1.0 / a;
        }
    }
    d
}

/// Lower triangular `g` with `g X g^{-1} - X = lambda`, `X = diag pattern(qhat)`.
pub fn build_moser_g(datum: &RootDatum, mp: &MoserPoint) -> Result<ComplexMatrix> {
    check_chamber(datum, &mp.qhat).map_err(|e| match e {
        Error::Chamber(msg) => Error::Singular(msg),
        other => other,
    })?;
    let big = datum.dim();
    let d = datum.cartan_diagonal(&mp.qhat);
    let lambda = datum.momentum_value();
    let mut g = ComplexMatrix::zeros(big, big);
    for (j, v) in moser_diagonal(datum, &mp.ahat).into_iter().enumerate() {
        g[(j, j)] = c(v);
    }
    for j in 0..big {
        for i in j + 1..big {
            // (lambda g)_{ij}; lambda is strictly lower, g is lower.
            let mut rhs = 0.0;
            for l in j..i {
                let lam = lambda[(i, l)].re;
                if lam != 0.0 {
                    rhs += lam * g[(l, j)].re;
                }
            }
            if rhs == 0.0 {
                continue;
            }
            let denom = d[j] - d[i];
            if denom.abs() < POLE_TOLERANCE {
                return Err(Error::Singular(format!(
                    "pole: spectral coordinates {} and {} of the pattern nearly coincide",
                    d[j], d[i]
                )));
            }
            g[(i, j)] = c(rhs / denom);
        }
    }
    Ok(g)
}

/// `||g X g^{-1} - X - lambda||_F` for an arbitrary `g` and `X = diag pattern(qhat)`.
pub fn moser_gauge_residual(datum: &RootDatum, g: &ComplexMatrix, qhat: &[f64]) -> Result<f64> {
    let big = datum.dim();
    g.ensure_shape(big, big, "g")?;
    let x = datum.cartan_element(qhat);
    let ginv = g.try_inverse()?;
    let lhs = &(&(&(g * &x) * &ginv) - &x) - datum.momentum_value();
    Ok(lhs.frobenius_norm())
}

pub fn moser_momentum_residual(datum: &RootDatum, mp: &MoserPoint) -> Result<f64> {
    let g = build_moser_g(datum, mp)?;
    moser_gauge_residual(datum, &g, &mp.qhat)
}

/// `m_k(g g^dagger)` by Cauchy-Binet: sum over column sets `S` of
/// `|det g[last k rows, S]|^2`.
pub fn cauchy_binet_minor(g: &ComplexMatrix, k: usize) -> Result<f64> {
    let big = g.ensure_square("g")?;
    if k == 0 || k > big {
        return Err(Error::InvalidArgument(format!("minor order {k} outside 1..={big}")));
    }
    let mut total = 0.0;
    for cols in subsets(big, k) {
        let sel = MinorSelector::bottom_rows(big, cols)?;
        total += general_minor(g, &sel)?.norm_sqr();
    }
    Ok(total)
}

/// `m_k(g g^dagger)` as a trailing principal minor of the product.
pub fn brute_force_minor(g: &ComplexMatrix, k: usize) -> Result<f64> {
    let product = g * &g.adjoint();
    Ok(bottom_right_minor(&product, k)?.re)
}

/// `m_k(g g^dagger) = det(B B^dagger)` with `B` the bottom `k` rows of `g`,
/// from a QR factorization `B^dagger = Q R` as `prod |R_ii|^2`. Unlike
/// [`brute_force_minor`] it does not square the conditioning of `g`.
pub fn gram_minor(g: &ComplexMatrix, k: usize) -> Result<f64> {
    let big = g.ensure_square("g")?;
    if k == 0 || k > big {
        return Err(Error::InvalidArgument(format!("minor order {k} outside 1..={big}")));
    }
    let rows = g.as_nalgebra().rows(big - k, k).adjoint();
    let r = rows.qr().unpack_r();
    Ok((0..k).map(|i| r[(i, i)].norm_sqr()).product())
}

/// `m_k(g g^dagger)` for the Moser-gauge `g`, cross-checked between the
/// Cauchy-Binet sum and the QR evaluation. `k` may run up to `N`.
pub fn minor_oracle_mk(datum: &RootDatum, mp: &MoserPoint, k: usize) -> Result<f64> {
    let g = build_moser_g(datum, mp)?;
    checked_minor(&g, k)
}

pub(crate) fn checked_minor(g: &ComplexMatrix, k: usize) -> Result<f64> {
    let gram = gram_minor(g, k)?;
    let summed = cauchy_binet_minor(g, k)?;
    let diff = relative_difference(gram, summed);
    if diff > MINOR_AGREEMENT {
        return Err(Error::Consistency(format!(
            "m_{k}: QR evaluation {gram:.16e} vs Cauchy-Binet {summed:.16e} (relative {diff:.3e})"
        )));
    }
    Ok(summed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn chamber_sample(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        // Spacing at least 0.2 inside (0.3, 0.3 + 0.6 n].
        let mut q: Vec<f64> = (0..n).map(|i| 0.3 + 0.6 * i as f64 + rng.gen_range(0.0..0.4)).collect();
        q.reverse();
        q
    }

    fn point(rng: &mut ChaCha8Rng, n: usize) -> MoserPoint {
        let q = chamber_sample(rng, n);
        let a = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        MoserPoint::new(q, a).unwrap()
    }

    #[test]
    fn ruijsenaars_matrix_entries() {
        let spec = RuijsenaarsMatrixSpec::new(vec![2.0], vec![0.3]).unwrap();
        assert_eq!(build_ruijsenaars_matrix(&spec), ComplexMatrix::from_real_diagonal(&[2.0]));
        let spec = RuijsenaarsMatrixSpec::new(vec![1.5, 0.5, 2.0], vec![0.9, 0.2, -0.4]).unwrap();
        let m = build_ruijsenaars_matrix(&spec);
        assert!((m[(1, 0)].re - 1.5 / 0.7).abs() < 1e-15);
        assert!((m[(2, 0)].re - 1.5 / (0.7 * 1.3)).abs() < 1e-14);
        assert_eq!(m[(0, 2)], c(0.0));
        assert!(RuijsenaarsMatrixSpec::new(vec![1.0, 1.0], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn determinant_is_product_of_b() {
        let spec = RuijsenaarsMatrixSpec::new(vec![1.5, -0.5, 2.0], vec![0.9, 0.2, -0.4]).unwrap();
        let det = crate::linalg::determinant(&build_ruijsenaars_matrix(&spec)).unwrap();
        assert!((det.re + 1.5).abs() < 1e-14);
        assert!((closed_form_minor(&spec, &[0, 1, 2]).unwrap() + 1.5).abs() < 1e-14);
    }

    #[test]
    fn closed_form_minor_small_cases() {
        let spec = RuijsenaarsMatrixSpec::new(vec![1.3, 0.4], vec![1.0, 0.25]).unwrap();
        assert!((closed_form_minor(&spec, &[0]).unwrap() - 1.3 / 0.75).abs() < 1e-15);
        assert!(closed_form_minor(&spec, &[1, 0]).is_err());
        assert!(closed_form_minor(&spec, &[0, 5]).is_err());
    }

    #[test]
    fn closed_form_minor_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let m = rng.gen_range(1..=6);
            let b = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let x = chamber_sample(&mut rng, m);
            let spec = RuijsenaarsMatrixSpec::new(b, x).unwrap();
            let full = build_ruijsenaars_matrix(&spec);
            for k in 1..=m {
                for cols in subsets(m, k) {
                    let sel = MinorSelector::bottom_rows(m, cols.clone()).unwrap();
                    let brute = general_minor(&full, &sel).unwrap().re;
                    let closed = closed_form_minor(&spec, &cols).unwrap();
                    assert!(relative_difference(brute, closed) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn a_type_g_is_a_ruijsenaars_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=6 {
            let d = RootDatum::new(Family::A, n).unwrap();
            let mp = point(&mut rng, n);
            let g = build_moser_g(&d, &mp).unwrap();
            let spec = RuijsenaarsMatrixSpec::new(mp.ahat.clone(), mp.qhat.clone()).unwrap();
            assert!(g.distance(&build_ruijsenaars_matrix(&spec)) < 1e-13);
        }
    }

    #[test]
    fn a2_and_c2_entries() {
        let (q1, q2, p1, p2) = (1.7_f64, 0.6_f64, 0.3_f64, -0.2_f64);
        let a2 = RootDatum::new(Family::A, 2).unwrap();
        let g = build_moser_g(&a2, &MoserPoint::new(vec![q1, q2], vec![p1.exp(), p2.exp()]).unwrap()).unwrap();
        assert!((g[(1, 0)].re - p1.exp() / (q1 - q2)).abs() < 1e-15);

        let c2 = RootDatum::new(Family::C, 2).unwrap();
        let g = build_moser_g(&c2, &MoserPoint::new(vec![q1, q2], vec![p1.exp(), p2.exp()]).unwrap()).unwrap();
        let want = -p1.exp() / (2.0 * q1 * (q1 * q1 - q2 * q2));
        assert!((g[(3, 0)].re - want).abs() < 1e-14);
    }

    #[test]
    fn c_type_bottom_rows_are_a_ruijsenaars_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=5 {
            let d = RootDatum::new(Family::C, n).unwrap();
            let mp = point(&mut rng, n);
            let g = build_moser_g(&d, &mp).unwrap();
            let mut b: Vec<f64> = (0..n)
                .map(|j| if (n - j) % 2 == 0 { mp.ahat[j] } else { -mp.ahat[j] })
                .collect();
            b.extend(mp.ahat.iter().rev().map(|a| 1.0 / a));
            let mut x: Vec<f64> = mp.qhat.iter().map(|q| -q).collect();
            x.extend(mp.qhat.iter().rev());
            let m = build_ruijsenaars_matrix(&RuijsenaarsMatrixSpec::new(b, x).unwrap());
            for i in n..2 * n {
                for j in 0..2 * n {
                    assert!((g[(i, j)] - m[(i, j)]).norm() < 1e-12 * m.max_abs());
                }
            }
        }
    }

    #[test]
    fn b_type_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=5 {
            let d = RootDatum::new(Family::B, n).unwrap();
            let mp = point(&mut rng, n);
            let q = &mp.qhat;
            let g = build_moser_g(&d, &mp).unwrap();
            let a_nj = |j: usize| g[(n - 1, j)].re;
            for j in 0..n {
                assert!((g[(n, j)].re - a_nj(j) / q[j]).abs() < 1e-13);
            }
            for i in 1..=n {
                let c2: f64 = (1..=i).map(|k| -1.0 / q[n - k]).product();
                assert!((g[(n + i, n)].re - c2).abs() < 1e-12);
                for j in 0..n {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    let prod: f64 = (1..=i).map(|l| 1.0 / (q[j] + q[n - l])).product();
                    let want = sign * a_nj(j) / q[j] * prod;
                    assert!((g[(n + i, j)].re - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn d_type_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=5 {
            let d = RootDatum::new(Family::D, n).unwrap();
            let mp = point(&mut rng, n);
            let q = &mp.qhat;
            let g = build_moser_g(&d, &mp).unwrap();
            let a = |i: usize, j: usize| g[(i, j)].re;
            // First row of the lower-left block; its last entry vanishes.
            assert_eq!(g[(n, n - 1)], c(0.0));
            for j in 0..n - 1 {
                assert!((g[(n, j)].re + a(n - 2, j) / (q[j] + q[n - 1])).abs() < 1e-13);
            }
            for i in 2..=n {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                for j in 0..n {
                    let want = if j == n - 1 {
                        let prod: f64 = (2..=i).map(|k| 1.0 / (q[j] + q[n - k])).product();
                        sign * a(n - 1, j) * prod
                    } else {
                        let prod: f64 = (1..=i).map(|k| 1.0 / (q[j] + q[n - k])).product();
                        sign * 2.0 * q[j] * a(n - 1, j) * prod
                    };
                    assert!((g[(n + i - 1, j)].re - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn group_membership_and_momentum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for family in Family::ALL {
            for n in family.min_rank()..=6 {
                let d = RootDatum::new(family, n).unwrap();
                for _ in 0..5 {
                    let mp = point(&mut rng, n);
                    let g = build_moser_g(&d, &mp).unwrap();
                    assert!(d.group_residual(&g).unwrap() < 1e-9, "{family}{n}");
                    assert!(moser_momentum_residual(&d, &mp).unwrap() < 1e-9);
                    for i in 0..n {
                        assert_eq!(g[(i, i)].re, mp.ahat[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn d_type_accepts_negative_last_coordinate() {
        let d = RootDatum::new(Family::D, 3).unwrap();
        let mp = MoserPoint::new(vec![2.0, 1.2, -0.5], vec![1.0, 0.7, 1.3]).unwrap();
        assert!(moser_momentum_residual(&d, &mp).unwrap() < 1e-10);
        let mp = MoserPoint::new(vec![2.0, 1.2, 0.0], vec![1.0, 0.7, 1.3]).unwrap();
        assert!(moser_momentum_residual(&d, &mp).unwrap() < 1e-10);
    }

    #[test]
    fn perturbation_is_detected() {
        let d = RootDatum::new(Family::C, 2).unwrap();
        let mp = MoserPoint::new(vec![1.5, 0.5], vec![1.2, 0.8]).unwrap();
        let mut g = build_moser_g(&d, &mp).unwrap();
        assert!(moser_gauge_residual(&d, &g, &mp.qhat).unwrap() < 1e-12);
        g[(2, 1)] += c(0.1);
        assert!(moser_gauge_residual(&d, &g, &mp.qhat).unwrap() > 1e-3);
    }

    #[test]
    fn chamber_and_pole_violations() {
        let c2 = RootDatum::new(Family::C, 2).unwrap();
        let bad = MoserPoint::new(vec![0.5, 1.5], vec![1.0, 1.0]).unwrap();
        assert!(matches!(build_moser_g(&c2, &bad), Err(Error::Singular(_))));
        let wall = MoserPoint::new(vec![1.5, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(build_moser_g(&c2, &wall).is_err());
        let b2 = RootDatum::new(Family::B, 2).unwrap();
        let near = MoserPoint::new(vec![1.5, 1e-10], vec![1.0, 1.0]).unwrap();
        assert!(matches!(build_moser_g(&b2, &near), Err(Error::Singular(_))));
        assert!(MoserPoint::new(vec![1.0], vec![-1.0]).is_err());
    }

    #[test]
    fn minor_oracle_examples() {
        let (q1, q2, p1, p2) = (1.3_f64, -0.4_f64, 0.2_f64, 0.5_f64);
        let d = RootDatum::new(Family::A, 2).unwrap();
        let mp = MoserPoint::new(vec![q1, q2], vec![p1.exp(), p2.exp()]).unwrap();
        let m1 = minor_oracle_mk(&d, &mp, 1).unwrap();
        let want = (2.0 * p1).exp() / (q1 - q2).powi(2) + (2.0 * p2).exp();
        assert!(relative_difference(m1, want) < 1e-14);
        let m2 = minor_oracle_mk(&d, &mp, 2).unwrap();
        assert!(relative_difference(m2, (2.0 * p1 + 2.0 * p2).exp()) < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for family in [Family::B, Family::C, Family::D] {
            let dd = RootDatum::new(family, 3).unwrap();
            let mp = point(&mut rng, 3);
            let full = minor_oracle_mk(&dd, &mp, dd.dim()).unwrap();
            assert!((full - 1.0).abs() < 1e-9);
            for k in 1..=3 {
                assert!(minor_oracle_mk(&dd, &mp, k).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn three_minor_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = RootDatum::new(Family::C, 3).unwrap();
        let g = build_moser_g(&d, &point(&mut rng, 3)).unwrap();
        for k in 1..=d.dim() {
            let a = brute_force_minor(&g, k).unwrap();
            let b = cauchy_binet_minor(&g, k).unwrap();
            let c = gram_minor(&g, k).unwrap();
            assert!(relative_difference(a, b) < 1e-11 && relative_difference(b, c) < 1e-11);
        }
        assert!(gram_minor(&g, 0).is_err());
    }
}

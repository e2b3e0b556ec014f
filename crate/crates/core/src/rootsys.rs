//! Vector representations of `gl(n)`, `so(2n+1)`, `sp(2n)` and `so(2n)`.
//!
//! All four families use the anti-diagonal bilinear form, so the Borel
//! subalgebra is upper triangular, `n_-` is strictly lower triangular and the
//! Cartan subalgebra is diagonal:
//!
//! | family | N      | form `Omega`                          | Cartan `h_i`                 |
//! |--------|--------|---------------------------------------|------------------------------|
//! | A      | n      | identity (unused, `gl(n)`)            | `E_ii`                       |
//! | B      | 2n+1   | `sum_i E_{N+1-i,i}`                    | `E_ii - E_{N+1-i,N+1-i}`     |
//! | C      | 2n     | `sum_{i<=n} E_{i,N+1-i} - E_{N+1-i,i}` | `E_ii - E_{N+1-i,N+1-i}`     |
//! | D      | 2n     | `sum_i E_{i,N+1-i}`                    | `E_ii - E_{N+1-i,N+1-i}`     |
//!
//! (one-based indices in the table, zero-based everywhere in code).
//!
//! Negative simple root vectors are fixed so that their sum is the momentum
//! value `lambda` used by the reduction; positive ones are their transposes,
//! which keeps every Lax matrix `p + sum e^{(alpha,q)} (e_alpha + e_-alpha)`
//! real symmetric.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::A, Family::B, Family::C, Family::D];

    /// Smallest admissible rank.
    pub fn min_rank(self) -> usize {
        match self {
            Family::D => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            other => Err(Error::InvalidAlgebra(format!(
                "unknown family {other:?}, expected one of A, B, C, D"
            ))),
        }
    }
}

/// A classical algebra: family plus rank `n`.
///
/// For `A` the rank is the matrix size (the algebra is `gl(n)`, which has `n`
/// Cartan coordinates).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraType {
    family: Family,
    rank: usize,
}

impl AlgebraType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        if rank < family.min_rank() {
            return Err(Error::InvalidAlgebra(format!(
                "{family} needs rank >= {}, got {rank}",
                family.min_rank()
            )));
        }
        Ok(Self { family, rank })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Size `N` of the vector representation.
    pub fn dim(&self) -> usize {
        match self.family {
            Family::A => self.rank,
            Family::B => 2 * self.rank + 1,
            Family::C | Family::D => 2 * self.rank,
        }
    }

    /// Scale `s` of the reduced form `s * sum dp ^ dq` (1 for A, 2 otherwise).
    pub fn symplectic_scale(&self) -> f64 {
        match self.family {
            Family::A => 1.0,
            _ => 2.0,
        }
    }

    /// Index of the quadratic Hamiltonian `Tr(X^2)/2` (A) or `Tr(X^2)/4`
    /// (B/C/D) in the vector returned by [`crate::toda::toda_hamiltonians`].
    pub fn quadratic_hamiltonian_index(&self) -> usize {
        match self.family {
            Family::A => 2,
            _ => 1,
        }
    }

    /// Degree of the trace behind the `k`-th Toda Hamiltonian.
    pub fn trace_degree(&self, k: usize) -> usize {
        match self.family {
            Family::A => k,
            _ => 2 * k,
        }
    }
}

impl fmt::Display for AlgebraType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

/// A simple root `alpha` with its root vectors.
#[derive(Debug, Clone)]
pub struct SimpleRoot {
    /// Coefficients of `alpha` in the orthonormal basis `e_1..e_n`.
    pub coefficients: Vec<i32>,
    pub positive: ComplexMatrix,
    pub negative: ComplexMatrix,
}

impl SimpleRoot {
    /// `(alpha, q)` for `q = sum q_i e_i`.
    pub fn pairing(&self, q: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .zip(q)
            .map(|(&a, &x)| a as f64 * x)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct RootDatum {
    algebra: AlgebraType,
    omega: ComplexMatrix,
    cartan: Vec<ComplexMatrix>,
    simple_roots: Vec<SimpleRoot>,
    momentum_value: ComplexMatrix,
}

fn unit(n: usize, entries: &[(usize, usize, f64)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] += c(v);
    }
    m
}

pub fn build_root_datum(algebra: AlgebraType) -> RootDatum {
    let n = algebra.rank();
    let big = algebra.dim();
    let mirror = |i: usize| big - 1 - i;
    let family = algebra.family();

    let omega = match family {
        Family::A => ComplexMatrix::identity(big),
        Family::B | Family::D => ComplexMatrix::from_real_fn(big, big, |i, j| {
            if i + j == big - 1 {
                1.0
            } else {
                0.0
            }
        }),
        Family::C => ComplexMatrix::from_real_fn(big, big, |i, j| {
            if i + j != big - 1 {
                0.0
            } else if i < n {
                1.0
            } else {
                -1.0
            }
        }),
    };

    let cartan: Vec<ComplexMatrix> = (0..n)
        .map(|i| match family {
            Family::A => unit(big, &[(i, i, 1.0)]),
            _ => unit(big, &[(i, i, 1.0), (mirror(i), mirror(i), -1.0)]),
        })
        .collect();

    let mut simple_roots = Vec::with_capacity(n);
    for i in 0..n.saturating_sub(1) {
        let mut coefficients = vec![0; n];
        coefficients[i] = 1;
        coefficients[i + 1] = -1;
        let negative = match family {
            Family::A => unit(big, &[(i + 1, i, 1.0)]),
            _ => unit(big, &[(i + 1, i, 1.0), (mirror(i), mirror(i + 1), -1.0)]),
        };
        simple_roots.push(SimpleRoot {
            coefficients,
            positive: negative.transpose(),
            negative,
        });
    }
    let last = match family {
        Family::A => None,
        Family::B => {
            // e_n, through the middle row/column.
            let mut coefficients = vec![0; n];
            coefficients[n - 1] = 1;
            Some((coefficients, unit(big, &[(n, n - 1, 1.0), (n + 1, n, -1.0)])))
        }
        Family::C => {
            let mut coefficients = vec![0; n];
            coefficients[n - 1] = 2;
            Some((coefficients, unit(big, &[(n, n - 1, 1.0)])))
        }
        Family::D => {
            let mut coefficients = vec![0; n];
            coefficients[n - 2] = 1;
            coefficients[n - 1] = 1;
            Some((
                coefficients,
                unit(big, &[(n + 1, n - 1, 1.0), (n, n - 2, -1.0)]),
            ))
        }
    };
    if let Some((coefficients, negative)) = last {
        simple_roots.push(SimpleRoot {
            coefficients,
            positive: negative.transpose(),
            negative,
        });
    }

    let mut momentum_value = ComplexMatrix::zeros(big, big);
    for root in &simple_roots {
        momentum_value = &momentum_value + &root.negative;
    }

    RootDatum {
        algebra,
        omega,
        cartan,
        simple_roots,
        momentum_value,
    }
}

/// Tolerance used when an operation requires its input to lie in the algebra.
const STRUCTURE_TOLERANCE: f64 = 1e-9;

impl RootDatum {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        Ok(build_root_datum(AlgebraType::new(family, rank)?))
    }

    pub fn algebra(&self) -> AlgebraType {
        self.algebra
    }

    pub fn family(&self) -> Family {
        self.algebra.family()
    }

    pub fn rank(&self) -> usize {
        self.algebra.rank()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    pub fn cartan(&self) -> &[ComplexMatrix] {
        &self.cartan
    }

    pub fn simple_roots(&self) -> &[SimpleRoot] {
        &self.simple_roots
    }

    /// `lambda = sum over simple roots of e_{-alpha}`; strictly lower triangular.
    pub fn momentum_value(&self) -> &ComplexMatrix {
        &self.momentum_value
    }

    /// `[e_alpha, e_{-alpha}]` for every simple root.
    pub fn coroots(&self) -> Vec<ComplexMatrix> {
        self.simple_roots
            .iter()
            .map(|r| r.positive.commutator(&r.negative))
            .collect()
    }

    /// Strictly lower triangular part, i.e. the `n_-` component.
    pub fn project_lower_nilpotent(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        m.ensure_shape(n, n, "matrix to project")?;
        Ok(ComplexMatrix::from_fn(n, n, |i, j| {
            if i > j {
                m[(i, j)]
            } else {
                c(0.0)
            }
        }))
    }

    /// The `k`-component `(X - X^dagger)/2` of an algebra element.
    pub fn project_compact(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.ensure_in_algebra(x)?;
        Ok((x - &x.adjoint()).scale_real(0.5))
    }

    /// `||M Omega + Omega M^T||_F`, zero for `gl(n)`.
    pub fn algebra_residual(&self, m: &ComplexMatrix) -> Result<f64> {
        let n = self.dim();
        m.ensure_shape(n, n, "matrix")?;
        if self.family() == Family::A {
            return Ok(0.0);
        }
        Ok((&(m * &self.omega) + &(&self.omega * &m.transpose())).frobenius_norm())
    }

    /// `||g Omega g^T - Omega||_F`, zero for `GL(n)`.
    pub fn group_residual(&self, g: &ComplexMatrix) -> Result<f64> {
        let n = self.dim();
        g.ensure_shape(n, n, "group element")?;
        if self.family() == Family::A {
            return Ok(0.0);
        }
        Ok((&(&(g * &self.omega) * &g.transpose()) - &self.omega).frobenius_norm())
    }

    pub fn ensure_in_algebra(&self, x: &ComplexMatrix) -> Result<()> {
        let residual = self.algebra_residual(x)?;
        if residual > STRUCTURE_TOLERANCE * x.frobenius_norm().max(1.0) {
            return Err(Error::Structural(format!(
                "matrix is not in the {} algebra (residual {residual:.3e})",
                self.algebra
            )));
        }
        Ok(())
    }

    pub fn ensure_in_group(&self, g: &ComplexMatrix) -> Result<()> {
        let residual = self.group_residual(g)?;
        let scale = g.frobenius_norm().powi(2).max(1.0);
        if residual > STRUCTURE_TOLERANCE * scale {
            return Err(Error::Structural(format!(
                "matrix is not in the {} group (residual {residual:.3e})",
                self.algebra
            )));
        }
        Ok(())
    }

    /// Diagonal of `sum_i v_i h_i`.
    pub fn cartan_diagonal(&self, values: &[f64]) -> Vec<f64> {
        let n = self.rank();
        debug_assert_eq!(values.len(), n);
        let mirrored = values.iter().rev().map(|v| -v);
        match self.family() {
            Family::A => values.to_vec(),
            Family::B => values
                .iter()
                .copied()
                .chain(std::iter::once(0.0))
                .chain(mirrored)
                .collect(),
            Family::C | Family::D => values.iter().copied().chain(mirrored).collect(),
        }
    }

    /// The diagonal matrix `sum_i v_i h_i`.
    pub fn cartan_element(&self, values: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.cartan_diagonal(values))
    }

    /// Cartan coordinates of `x` through the trace pairing,
    /// `v_i = Tr(x h_i) / Tr(h_i h_i)` (the `h_i` are trace-orthogonal).
    pub fn cartan_coordinates(&self, x: &ComplexMatrix) -> Vec<crate::linalg::C64> {
        self.cartan
            .iter()
            .map(|h| (x * h).trace() / (h * h).trace())
            .collect()
    }

    /// Distance of `qhat` from the walls of the open Weyl chamber; positive
    /// inside.
    ///
    /// A: `q_1 > ... > q_n`; B, C: additionally `q_n > 0`;
    /// D: `q_1 > ... > q_{n-1} > |q_n|`.
    pub fn chamber_margin(&self, qhat: &[f64]) -> f64 {
        let n = qhat.len();
        let mut margin = f64::INFINITY;
        for w in qhat.windows(2) {
            margin = margin.min(w[0] - w[1]);
        }
        match self.family() {
            Family::A => {}
            Family::B | Family::C => margin = margin.min(qhat[n - 1]),
            Family::D => margin = margin.min(qhat[n - 2] + qhat[n - 1]),
        }
        margin
    }
}

//! The elementary transforms `Δ^m_{B,A}` and `δ^m_{B,A}`.
//!
//! The one-step maps `X ↦ BXA − X` and `X ↦ BX − XA` are the defining
//! semantics; [`triangle`] and [`delta`] evaluate the equivalent binomial
//! sums with precomputed powers, and [`TransformInstance::apply_iterated`]
//! applies the one-step map `m` times.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{c64, CMatrix};

/// Which of the two transforms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    /// `Δ^m_{B,A}(X) = (L_B R_A − I)^m (X)`, left-(X,m)-invertibility.
    Triangle,
    /// `δ^m_{B,A}(X) = (L_B − R_A)^m (X)`, (X,m)-adjointness.
    Delta,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Triangle => "triangle",
            TransformKind::Delta => "delta",
        }
    }
}

impl std::str::FromStr for TransformKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangle" => Ok(TransformKind::Triangle),
            "delta" => Ok(TransformKind::Delta),
            other => Err(Error::Parse(format!("unknown transform '{other}' (expected triangle|delta)"))),
        }
    }
}

/// Exact binomial coefficient. Orders in this crate stay far below the
/// overflow point of `u128`.
pub fn binomial(m: usize, j: usize) -> u128 {
    if j > m {
        return 0;
    }
    let j = j.min(m - j);
    let mut acc: u128 = 1;
    for i in 0..j {
        // acc * (m - i) is divisible by (i + 1) at every step
        acc = acc * (m - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn signed_binomial(m: usize, j: usize) -> f64 {
    let c = binomial(m, j) as f64;
    if j % 2 == 0 {
        c
    } else {
        -c
    }
}

fn check_operands(b: &CMatrix, a: &CMatrix, x: &CMatrix, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidOrder("transform order must be at least 1".into()));
    }
    for (name, op) in [("B", b), ("A", a), ("X", x)] {
        if !op.is_square() {
            return Err(Error::DimensionMismatch(format!("{name} is {}x{}, expected square", op.rows(), op.cols())));
        }
    }
    if b.rows() != a.rows() || x.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "B, A, X have sizes {}, {}, {}",
            b.rows(),
            a.rows(),
            x.rows()
        )));
    }
    Ok(())
}

/// `Δ^m_{B,A}(X) = Σ_{j=0}^m (−1)^j C(m,j) B^{m−j} X A^{m−j}`.
pub fn triangle(b: &CMatrix, a: &CMatrix, x: &CMatrix, m: usize) -> Result<CMatrix> {
    check_operands(b, a, x, m)?;
    let bp = b.powers(m)?;
    let ap = a.powers(m)?;
    let mut acc = CMatrix::zeros(x.rows(), x.cols());
    for j in 0..=m {
        let term = &(&bp[m - j] * x) * &ap[m - j];
        acc = &acc + &term.scale_real(signed_binomial(m, j));
    }
    Ok(acc)
}

/// `δ^m_{B,A}(X) = Σ_{j=0}^m (−1)^j C(m,j) B^{m−j} X A^j`.
pub fn delta(b: &CMatrix, a: &CMatrix, x: &CMatrix, m: usize) -> Result<CMatrix> {
    check_operands(b, a, x, m)?;
    let bp = b.powers(m)?;
    let ap = a.powers(m)?;
    let mut acc = CMatrix::zeros(x.rows(), x.cols());
    for j in 0..=m {
        let term = &(&bp[m - j] * x) * &ap[j];
        acc = &acc + &term.scale_real(signed_binomial(m, j));
    }
    Ok(acc)
}

/// Dispatches on `kind` to [`triangle`] or [`delta`].
pub fn transform(kind: TransformKind, b: &CMatrix, a: &CMatrix, x: &CMatrix, m: usize) -> Result<CMatrix> {
    match kind {
        TransformKind::Triangle => triangle(b, a, x, m),
        TransformKind::Delta => delta(b, a, x, m),
    }
}

/// `Δ^m_{A*,A}(X)`; zero exactly when `A` is (X,m)-isometric.
pub fn isometry_defect(a: &CMatrix, x: &CMatrix, m: usize) -> Result<CMatrix> {
    triangle(&a.adjoint(), a, x, m)
}

/// `δ^m_{A*,A}(X)`; zero exactly when `A` is (X,m)-selfadjoint.
pub fn selfadjoint_defect(a: &CMatrix, x: &CMatrix, m: usize) -> Result<CMatrix> {
    delta(&a.adjoint(), a, x, m)
}

/// Natural magnitude of an order-`m` transform of `X`:
/// `(1 + ‖A‖_F ‖B‖_F)^m ‖X‖_F`. Residuals are judged against this.
pub fn transform_scale(b: &CMatrix, a: &CMatrix, x_norm: f64, m: usize) -> f64 {
    (1.0 + a.frobenius_norm() * b.frobenius_norm()).powi(m as i32) * x_norm
}

/// A validated `(kind, B, A, m)` triple.
#[derive(Clone, Debug)]
pub struct TransformInstance {
    pub kind: TransformKind,
    pub left: CMatrix,
    pub right: CMatrix,
    pub order: usize,
}

impl TransformInstance {
    pub fn new(kind: TransformKind, left: CMatrix, right: CMatrix, order: usize) -> Result<Self> {
        check_operands(&left, &right, &CMatrix::zeros(right.rows(), right.rows()), order)?;
        Ok(TransformInstance { kind, left, right, order })
    }

    /// One application of the defining map.
    pub fn step(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.rows() != self.right.rows() || !x.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "weight is {}x{}, operators are {}x{}",
                x.rows(),
                x.cols(),
                self.right.rows(),
                self.right.rows()
            )));
        }
        Ok(match self.kind {
            TransformKind::Triangle => &(&(&self.left * x) * &self.right) - x,
            TransformKind::Delta => &(&self.left * x) - &(x * &self.right),
        })
    }

    /// The defining map applied `order` times.
    pub fn apply_iterated(&self, x: &CMatrix) -> Result<CMatrix> {
        let mut y = x.clone();
        for _ in 0..self.order {
            y = self.step(&y)?;
        }
        Ok(y)
    }

    /// Binomial-sum evaluation.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        transform(self.kind, &self.left, &self.right, x, self.order)
    }

    pub fn scale(&self, x: &CMatrix) -> f64 {
        transform_scale(&self.left, &self.right, x.frobenius_norm(), self.order)
    }
}

/// Identity-scaled helper used by tests and examples: `s·I_n`.
pub fn scalar(n: usize, s: f64) -> CMatrix {
    CMatrix::scalar_identity(n, c64(s, 0.0))
}

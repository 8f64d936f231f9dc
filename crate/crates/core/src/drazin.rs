//! Drazin index, Drazin inverse and the core-nilpotent decomposition
//! `C^n = A^p(C^n) ⊕ ker A^p` with `A = A1 ⊕ A2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, NumericPolicy};

/// Rank of `A^k`, judged against `σ_max(A)^k` so that rounding noise left
/// over in a nilpotent part does not register as rank.
fn power_rank(power: &CMatrix, smax: f64, k: usize, policy: &NumericPolicy) -> usize {
    if k == 0 {
        return power.rows();
    }
    power.rank_relative_to(smax.powi(k as i32), policy)
}

/// Smallest `k ≥ 0` with `rank(A^k) = rank(A^{k+1})`; `0` iff `A` is invertible.
pub fn index_of(a: &CMatrix, policy: &NumericPolicy) -> Result<usize> {
    Ok(index_and_power(a, policy)?.0)
}

fn index_and_power(a: &CMatrix, policy: &NumericPolicy) -> Result<(usize, CMatrix, usize)> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let smax = a.spectral_norm();
    let mut pk = CMatrix::identity(n);
    let mut rk = n;
    for k in 0..=n {
        let next = &pk * a;
        let rnext = power_rank(&next, smax, k + 1, policy);
        if rnext == rk {
            return Ok((k, pk, rk));
        }
        pk = next;
        rk = rnext;
    }
    // ranks strictly decrease at most n times, so the loop always returns
    Ok((n, pk, rk))
}

/// First `k ≥ 1` with `‖N^k‖_F ≤ atol + rtol‖N‖_F^k`, or `None` when no
/// such `k ≤ n` exists. An empty matrix has order 0.
pub fn nilpotency_order(nmat: &CMatrix, policy: &NumericPolicy) -> Option<usize> {
    let n = nmat.rows();
    if n == 0 {
        return Some(0);
    }
    let norm = nmat.frobenius_norm();
    let mut pk = CMatrix::identity(n);
    for k in 1..=n {
        pk = &pk * nmat;
        if pk.frobenius_norm() <= policy.tolerance(norm.powi(k as i32)) {
            return Some(k);
        }
    }
    None
}

/// Everything the core-nilpotent decomposition produces.
#[derive(Clone, Debug)]
pub struct DrazinData {
    /// Drazin index.
    pub p: usize,
    pub a_d: CMatrix,
    /// Columns: orthonormal basis of `H1 = range A^p`, then of `H2 = ker A^p`.
    pub s: CMatrix,
    pub s_inv: CMatrix,
    /// Invertible core block.
    pub a1: CMatrix,
    /// Nilpotent block.
    pub a2: CMatrix,
    pub dim_h1: usize,
    pub dim_h2: usize,
    /// Condition number of `s`.
    pub condition: f64,
    /// Frobenius norm of the off-diagonal blocks of `S⁻¹AS`.
    pub off_block_residual: f64,
}

impl DrazinData {
    pub fn n(&self) -> usize {
        self.dim_h1 + self.dim_h2
    }

    /// `S (M ⊕ N) S⁻¹`.
    pub fn assemble(&self, core: &CMatrix, nil: &CMatrix) -> CMatrix {
        &(&self.s * &core.direct_sum(nil)) * &self.s_inv
    }
}

/// Computes `p`, the decomposition, and `A_d = S (A1⁻¹ ⊕ 0) S⁻¹`.
pub fn core_nilpotent_decompose(a: &CMatrix, policy: &NumericPolicy) -> Result<DrazinData> {
    let (p, ap, r) = index_and_power(a, policy)?;
    let n = a.rows();
    let (range, null) = ap.split_bases(r);
    let s = range.hstack(&null)?;
    let condition = if n == 0 { 1.0 } else { s.condition_number() };
    if !(condition <= policy.cond_max) {
        return Err(Error::IllConditioned { condition, limit: policy.cond_max });
    }
    let s_inv = s.inverse(policy)?;
    let t = &(&s_inv * a) * &s;
    let a1 = t.block(0, 0, r, r);
    let a2 = t.block(r, r, n - r, n - r);
    let off = t.block(0, r, r, n - r).frobenius_norm().hypot(t.block(r, 0, n - r, r).frobenius_norm());
    let a1_inv = a1.inverse(policy)?;
    let a_d = &(&s * &a1_inv.direct_sum(&CMatrix::zeros(n - r, n - r))) * &s_inv;
    Ok(DrazinData {
        p,
        a_d,
        s,
        s_inv,
        a1,
        a2,
        dim_h1: r,
        dim_h2: n - r,
        condition,
        off_block_residual: off,
    })
}

pub fn drazin_inverse(a: &CMatrix, policy: &NumericPolicy) -> Result<CMatrix> {
    Ok(core_nilpotent_decompose(a, policy)?.a_d)
}

/// Frobenius norms of the three defining identities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomResiduals {
    /// `‖A_d A − A A_d‖`
    pub commutator: f64,
    /// `‖A_d² A − A_d‖`
    pub idempotence: f64,
    /// `‖A^{p+1} A_d − A^p‖`
    pub power: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        self.commutator.max(self.idempotence).max(self.power)
    }
}

pub fn axiom_residuals(a: &CMatrix, a_d: &CMatrix, p: usize) -> AxiomResiduals {
    let ap = a.power(p).expect("square");
    let commutator = (&(a_d * a) - &(a * a_d)).frobenius_norm();
    let idempotence = (&(&(a_d * a_d) * a) - a_d).frobenius_norm();
    let power = (&(&(&ap * a) * a_d) - &ap).frobenius_norm();
    AxiomResiduals { commutator, idempotence, power }
}

/// `atol + rtol ‖A‖₁^{p+2}`.
pub fn axiom_tolerance(a: &CMatrix, p: usize, policy: &NumericPolicy) -> f64 {
    policy.tolerance(a.norm_one().powi(p as i32 + 2))
}

/// Serializable summary of a decomposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DrazinReport {
    pub index: usize,
    pub drazin_inverse: CMatrix,
    pub dim_h1: usize,
    pub dim_h2: usize,
    pub residuals: AxiomResiduals,
    pub tolerance: f64,
    pub condition: f64,
}

impl DrazinReport {
    pub fn new(a: &CMatrix, dd: &DrazinData, policy: &NumericPolicy) -> Self {
        DrazinReport {
            index: dd.p,
            drazin_inverse: dd.a_d.clone(),
            dim_h1: dd.dim_h1,
            dim_h2: dd.dim_h2,
            residuals: axiom_residuals(a, &dd.a_d, dd.p),
            tolerance: axiom_tolerance(a, dd.p, policy),
            condition: dd.condition,
        }
    }

    pub fn axioms_hold(&self) -> bool {
        self.residuals.max() <= self.tolerance
    }
}

/// Blocks of `S⁻¹ X S` at the `(dim_H1, dim_H2)` split.
#[derive(Clone, Debug)]
pub struct BlockView {
    pub x11: CMatrix,
    pub x12: CMatrix,
    pub x21: CMatrix,
    pub x22: CMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockNorms {
    pub x11: f64,
    pub x12: f64,
    pub x21: f64,
    pub x22: f64,
}

impl BlockView {
    pub fn norms(&self) -> BlockNorms {
        BlockNorms {
            x11: self.x11.frobenius_norm(),
            x12: self.x12.frobenius_norm(),
            x21: self.x21.frobenius_norm(),
            x22: self.x22.frobenius_norm(),
        }
    }

    /// `S [X11 X12; X21 X22] S⁻¹`.
    pub fn reassemble(&self, dd: &DrazinData) -> CMatrix {
        let n = dd.n();
        let mut t = CMatrix::zeros(n, n);
        t.set_block(0, 0, &self.x11);
        t.set_block(0, dd.dim_h1, &self.x12);
        t.set_block(dd.dim_h1, 0, &self.x21);
        t.set_block(dd.dim_h1, dd.dim_h1, &self.x22);
        &(&dd.s * &t) * &dd.s_inv
    }
}

pub fn block_view(x: &CMatrix, dd: &DrazinData) -> Result<BlockView> {
    let n = dd.n();
    if x.rows() != n || x.cols() != n {
        return Err(Error::DimensionMismatch(format!("weight is {}x{}, decomposition is {n}x{n}", x.rows(), x.cols())));
    }
    let t = &(&dd.s_inv * x) * &dd.s;
    let (r, q) = (dd.dim_h1, dd.dim_h2);
    Ok(BlockView {
        x11: t.block(0, 0, r, r),
        x12: t.block(0, r, r, q),
        x21: t.block(r, 0, q, r),
        x22: t.block(r, r, q, q),
    })
}

/// The left operator `B` paired with `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairSelector {
    #[serde(rename = "self")]
    SelfPair,
    #[serde(rename = "adjoint")]
    AdjointPair,
    #[serde(rename = "drazin")]
    DrazinPair,
    #[serde(rename = "drazin-adjoint")]
    DrazinAdjointPair,
}

impl PairSelector {
    pub const ALL: [PairSelector; 4] =
        [PairSelector::SelfPair, PairSelector::AdjointPair, PairSelector::DrazinPair, PairSelector::DrazinAdjointPair];

    pub fn name(self) -> &'static str {
        match self {
            PairSelector::SelfPair => "self",
            PairSelector::AdjointPair => "adjoint",
            PairSelector::DrazinPair => "drazin",
            PairSelector::DrazinAdjointPair => "drazin-adjoint",
        }
    }

    pub fn needs_drazin(self) -> bool {
        matches!(self, PairSelector::DrazinPair | PairSelector::DrazinAdjointPair)
    }

    /// For `Δ^m_{B,A}(X) = 0 ⟹ δ^m_{C,A}(X) = 0`, the selector of `C`
    /// given the selector of `B`.
    pub fn paired_delta(self) -> PairSelector {
        match self {
            PairSelector::SelfPair => PairSelector::DrazinPair,
            PairSelector::DrazinPair => PairSelector::SelfPair,
            PairSelector::AdjointPair => PairSelector::DrazinAdjointPair,
            PairSelector::DrazinAdjointPair => PairSelector::AdjointPair,
        }
    }

    /// Picks `A`, `A*`, `A_d` or `A_d*` given precomputed Drazin data.
    pub fn resolve_with(self, a: &CMatrix, a_d: &CMatrix) -> CMatrix {
        match self {
            PairSelector::SelfPair => a.clone(),
            PairSelector::AdjointPair => a.adjoint(),
            PairSelector::DrazinPair => a_d.clone(),
            PairSelector::DrazinAdjointPair => a_d.adjoint(),
        }
    }
}

impl std::str::FromStr for PairSelector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PairSelector::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown pair '{s}' (expected self|adjoint|drazin|drazin-adjoint)")))
    }
}

/// Returns `A`, `A*`, `A_d` or `A_d*`.
pub fn resolve_pair(a: &CMatrix, sel: PairSelector, policy: &NumericPolicy) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if sel.needs_drazin() {
        let a_d = drazin_inverse(a, policy)?;
        Ok(sel.resolve_with(a, &a_d))
    } else {
        Ok(sel.resolve_with(a, a))
    }
}

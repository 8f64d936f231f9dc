//! Block structure of weights against Drazin pairs, the failing converses,
//! and the commuting-weight selfadjointness result.

use rand::Rng;

use super::Trial;
use crate::classify::kernel;
use crate::drazin::{block_view, core_nilpotent_decompose, PairSelector};
use crate::elemops::{transform, transform_scale, TransformKind};
use crate::error::Result;
use crate::genx::{drazin_block_with, remark3_fixture, remark3_with, BlockOptions, CoreSpectrum};
use crate::matcore::{CMatrix, EPS};

/// Relative bound on off-core blocks of kernel elements.
const BLOCK_RTOL: f64 = 1e-7;

fn thm1_fixture(t: &mut Trial) -> Result<()> {
    let a = CMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
    let k = kernel(TransformKind::Triangle, &a.adjoint(), &a, 1, &t.policy)?;
    t.holds(format!("fixture kernel has dimension 1 (got {})", k.dim), k.dim == 1);
    if let Some(x) = k.basis.first() {
        let off = (x.frobenius_norm().powi(2) - x.get(0, 0).norm_sqr()).max(0.0).sqrt();
        t.zero("fixture kernel is spanned by E11", off, 1e-12);
        let dd = core_nilpotent_decompose(&a, &t.policy)?;
        let bn = block_view(x, &dd)?.norms();
        t.zero("fixture kernel element has block form X11 + 0", bn.x12.max(bn.x21).max(bn.x22), 1e-12);
    }
    Ok(())
}

/// Kernels of `Δ^m_{B,A}` for the four pairs live on the core block, and
/// each is killed by the paired `δ^m`.
pub(super) fn thm1(t: &mut Trial) -> Result<()> {
    if t.idx == 0 {
        thm1_fixture(t)?;
    }
    let n = t.dim(3);
    let n2 = t.rng.random_range(2..n);
    let p = t.rng.random_range(2..=n2);
    let m = t.order();
    let spectrum = CoreSpectrum::ALL[t.idx % CoreSpectrum::ALL.len()];
    t.describe(format!("n1={} n2={n2} p={p} m={m} spectrum={spectrum:?}", n - n2));
    let opts = BlockOptions { conjugate: true, spectrum, jordan_max: 2, unitary_frame: true };
    let inst = drazin_block_with(n - n2, n2, p, opts, &mut t.rng)?;
    let a = inst.get("A");
    let dd = core_nilpotent_decompose(a, &t.policy)?;
    for sel in PairSelector::ALL {
        let b = sel.resolve_with(a, &dd.a_d);
        let c = sel.paired_delta().resolve_with(a, &dd.a_d);
        let k = kernel(TransformKind::Triangle, &b, a, m, &t.policy)?;
        for (j, x) in k.basis.iter().enumerate() {
            let bn = block_view(x, &dd)?.norms();
            let bound = BLOCK_RTOL * x.frobenius_norm();
            let name = sel.name();
            t.zero(format!("{name}: kernel element {j} has X12 = 0"), bn.x12, bound);
            t.zero(format!("{name}: kernel element {j} has X21 = 0"), bn.x21, bound);
            t.zero(format!("{name}: kernel element {j} has X22 = 0"), bn.x22, bound);
            t.transform_zero(
                format!("{name}: kernel element {j} is killed by delta with {}", sel.paired_delta().name()),
                TransformKind::Delta,
                &c,
                a,
                x,
                m,
            )?;
        }
    }
    Ok(())
}

/// Counterexample checks on `(A, X)` whose core block has size `n1`.
fn converse_failure(t: &mut Trial, a: &CMatrix, x: &CMatrix, n1: usize, fixture: bool) -> Result<()> {
    let label = if fixture { "fixture" } else { "seeded" };
    let dd = core_nilpotent_decompose(a, &t.policy)?;
    let ad_star = dd.a_d.adjoint();
    let d3 = transform(TransformKind::Delta, &a.adjoint(), a, x, 3)?.frobenius_norm();
    let t3 = transform(TransformKind::Triangle, &ad_star, a, x, 3)?.frobenius_norm();
    let d_scale = transform_scale(&a.adjoint(), a, x.frobenius_norm(), 3);
    let t_scale = transform_scale(&ad_star, a, x.frobenius_norm(), 3);
    t.zero(format!("{label}: delta^3_(A*,A)(X) <= 1e-9"), d3, if fixture { 1e-10 } else { 1e-9 });
    t.at_least(format!("{label}: triangle^3_(A_d*,A)(X) >= 0.5"), t3, 0.5);
    t.at_least(format!("{label}: triangle^3 exceeds 1e3 x tolerance"), t3, 1e3 * t.tol(t_scale));
    t.at_least(format!("{label}: separation factor >= 1e6"), t3 / d3.max(EPS * d_scale), 1e6);

    // dropping the nilpotent part of the weight, or the nilpotent block itself, restores the implication
    let x11 = x.block(0, 0, n1, n1);
    let a1 = a.block(0, 0, n1, n1);
    let n2 = a.rows() - n1;
    let x_core = x11.direct_sum(&CMatrix::zeros(n2, n2));
    t.transform_zero(format!("{label}: X11 + 0 is killed by triangle^3"), TransformKind::Triangle, &ad_star, a, &x_core, 3)?;
    let a1_inv_star = a1.inverse(&t.policy)?.adjoint();
    t.transform_zero(format!("{label}: without the nilpotent block triangle^3 vanishes"), TransformKind::Triangle, &a1_inv_star, &a1, &x11, 3)?;
    Ok(())
}

pub(super) fn remark3(t: &mut Trial) -> Result<()> {
    // (a) δ_{A,A}-kernels are block diagonal but not supported on the core
    let n = t.dim(3);
    let n2 = t.rng.random_range(1..n);
    let p = t.rng.random_range(1..=n2);
    let m = t.order();
    let spectrum = CoreSpectrum::ALL[t.idx % CoreSpectrum::ALL.len()];
    t.describe(format!("n1={} n2={n2} p={p} m={m} spectrum={spectrum:?}", n - n2));
    let opts = BlockOptions { conjugate: true, spectrum, jordan_max: 2, unitary_frame: true };
    let inst = drazin_block_with(n - n2, n2, p, opts, &mut t.rng)?;
    let a = inst.get("A");
    let dd = core_nilpotent_decompose(a, &t.policy)?;
    let k = kernel(TransformKind::Delta, a, a, m, &t.policy)?;
    let mut widest: f64 = 0.0;
    for (j, x) in k.basis.iter().enumerate() {
        let bn = block_view(x, &dd)?.norms();
        let bound = BLOCK_RTOL * x.frobenius_norm();
        t.zero(format!("delta kernel element {j} has X12 = 0"), bn.x12, bound);
        t.zero(format!("delta kernel element {j} has X21 = 0"), bn.x21, bound);
        widest = widest.max(bn.x22 / x.frobenius_norm());
    }
    t.at_least("some delta kernel element has ||X22|| > 1e-3", widest, 1e-3);

    // (b) δ³_{A*,A}(X) = 0 without Δ³_{A_d*,A}(X) = 0
    if t.idx == 0 {
        let (a, x) = remark3_fixture();
        converse_failure(t, &a, &x, 2, true)?;
    } else {
        let n1 = t.rng.random_range(1..=t.dim_max.max(3) - 2);
        let inst = remark3_with(n1, &mut t.rng)?;
        converse_failure(t, inst.get("A"), inst.get("X"), n1, false)?;
    }
    Ok(())
}

/// An invertible commuting core weight in `ker Δ^m_{A_d*,A}` forces
/// `δ^{m+2p−2}_{A*,A}(I) = 0`.
pub(super) fn thm2(t: &mut Trial) -> Result<()> {
    let n = t.dim(2);
    let n2 = t.rng.random_range(1..n);
    let n1 = n - n2;
    let p = t.rng.random_range(1..=n2);
    let m = if t.idx % 2 == 0 { 2 } else { t.order() };
    t.describe(format!("n1={n1} n2={n2} p={p} m={m}"));
    let opts = BlockOptions {
        conjugate: true,
        spectrum: CoreSpectrum::RealNonnormal,
        jordan_max: m.div_ceil(2),
        unitary_frame: true,
    };
    let inst = drazin_block_with(n1, n2, p, opts, &mut t.rng)?;
    let (a, a1, u) = (inst.get("A"), inst.get("A1"), inst.get("U"));
    let c = t.rng.random_range(-0.3..0.3);
    let x11 = &CMatrix::identity(n1) + &a1.scale_real(c);
    let x = &(u * &x11.direct_sum(&CMatrix::zeros(n2, n2))) * &u.adjoint();
    let dd = core_nilpotent_decompose(a, &t.policy)?;

    let smin = x11.singular_values().last().copied().unwrap_or(0.0);
    if !t.hypothesis("X11 invertible", x11.spectral_norm() / t.policy.cond_max, smin) {
        return Ok(());
    }
    if !t.commute_hypothesis("[A,X] = 0", a, &x)? {
        return Ok(());
    }
    if !t.transform_hypothesis(format!("triangle^{m}_(A_d*,A)(X) = 0"), TransformKind::Triangle, &dd.a_d.adjoint(), a, &x, m)? {
        return Ok(());
    }
    let i = CMatrix::identity(n);
    let k = m + 2 * p - 2;
    t.transform_zero(format!("A is {k}-selfadjoint"), TransformKind::Delta, &a.adjoint(), a, &i, k)?;
    if m == 2 {
        let k = 2 * p - 1;
        t.transform_zero(format!("A is {k}-selfadjoint"), TransformKind::Delta, &a.adjoint(), a, &i, k)?;
    }
    Ok(())
}

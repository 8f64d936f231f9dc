//! Drazin axioms, order monotonicity, the always-true and spectral facts
//! about `δ_{A,A}`, and the failure of left-m-invertibility by `A_d`.

use rand::Rng;

use super::Trial;
use crate::classify::{minimal_order, MinimalOrder};
use crate::drazin::{axiom_residuals, axiom_tolerance, block_view, core_nilpotent_decompose, index_of};
use crate::elemops::{transform, transform_scale, TransformKind};
use crate::error::{Error, Result};
use crate::genx::{
    complex_gaussian, coupled_pair, drazin_block_with, generate, haar_unitary, nilpotent_matrix, sample_kernel,
    scalar_plus_nilpotent_with, unit_phase, BlockOptions, CoreSpectrum, Family, InstanceSpec,
};
use crate::matcore::{c64, CMatrix, EPS};

fn axioms(t: &mut Trial, name: &str, a: &CMatrix, expected_index: Option<usize>) -> Result<()> {
    let p = index_of(a, &t.policy)?;
    if let Some(q) = expected_index {
        t.holds(format!("index({name}) = {q} (computed {p})"), p == q);
    }
    let dd = core_nilpotent_decompose(a, &t.policy)?;
    let r = axiom_residuals(a, &dd.a_d, dd.p);
    let tol = axiom_tolerance(a, dd.p, &t.policy);
    t.zero(format!("[{name}_d, {name}] = 0"), r.commutator, tol);
    t.zero(format!("{name}_d^2 {name} = {name}_d"), r.idempotence, tol);
    t.zero(format!("{name}^(p+1) {name}_d = {name}^p"), r.power, tol);
    Ok(())
}

/// Drazin axioms and exact index recovery, rotating through every family.
pub(super) fn drazin_axioms(t: &mut Trial) -> Result<()> {
    let family = Family::ALL[t.idx % Family::ALL.len()];
    let seed = t.rng.random::<u64>();
    let spec = match family {
        Family::Unitary | Family::Invertible => InstanceSpec::new(family, vec![t.dim(1)], vec![]),
        Family::Nilpotent => {
            let n = t.dim(1);
            let q = t.rng.random_range(1..=n);
            InstanceSpec::new(family, vec![n], vec![q])
        }
        Family::DrazinBlock => {
            let n = t.dim(2);
            let n2 = t.rng.random_range(1..n);
            let p = t.rng.random_range(1..=n2);
            InstanceSpec::new(family, vec![n - n2, n2], vec![p])
        }
        Family::AbZeroPair => {
            let n = t.dim(4);
            let n2 = t.rng.random_range(2..=n - 1);
            let b_core = t.rng.random_range(0..=n - n2 - 1);
            InstanceSpec::new(family, vec![n - n2 - b_core, n2, b_core], vec![])
        }
        Family::Hypothesis1 => {
            let n = t.dim(2);
            let na = t.rng.random_range(1..n);
            let (m, k) = (t.order(), t.order());
            InstanceSpec::new(family, vec![na, n - na], vec![m, k])
        }
        Family::Remark3 => InstanceSpec::new(family, vec![t.rng.random_range(1..=t.dim_max.max(3) - 2)], vec![]),
        Family::ScalarPlusNilpotent => {
            let n = t.dim(1);
            let q = t.rng.random_range(1..=n);
            let s = if t.coin() { [0.0, 0.0] } else { [t.rng.random_range(-2.0..2.0), t.rng.random_range(-2.0..2.0)] };
            InstanceSpec { scalar: Some(s), ..InstanceSpec::new(family, vec![n], vec![q]) }
        }
    };
    let spec = InstanceSpec { seed, ..spec };
    t.describe(format!("family={} dims={:?} orders={:?} inst_seed={seed}", family.name(), spec.dims, spec.orders));
    let inst = generate(&spec)?;
    let a = inst.get("A");
    axioms(t, "A", a, inst.constructed_index)?;
    if family == Family::AbZeroPair {
        let b = inst.get("B");
        let qa = index_of(a, &t.policy)?;
        let qb = index_of(b, &t.policy)?;
        axioms(t, "B", b, None)?;
        axioms(t, "A+B", &(a + b), Some(qa.max(qb)))?;
    }
    if family == Family::Hypothesis1 {
        axioms(t, "B", inst.get("B"), None)?;
    }
    Ok(())
}

/// Higher-order persistence of a vanishing defect, and its transfer to the
/// inverse pair.
pub(super) fn prop1(t: &mut Trial) -> Result<()> {
    let kind = if t.coin() { TransformKind::Triangle } else { TransformKind::Delta };
    let n = t.dim(2);
    let m = t.order();
    let (b, a) = if t.coin() {
        t.describe(format!("source=coupled kind={} n={n} m={m}", kind.name()));
        coupled_pair(n, kind, &mut t.rng)
    } else {
        // sI + N against its adjoint: unimodular s for Δ, real s for δ
        let q = t.rng.random_range(1..=n.min(3));
        let s = match kind {
            TransformKind::Triangle => unit_phase(&mut t.rng),
            TransformKind::Delta => c64(t.rng.random_range(0.5..2.0) * if t.coin() { 1.0 } else { -1.0 }, 0.0),
        };
        t.describe(format!("source=scalar-plus-nilpotent kind={} n={n} q={q} m={m}", kind.name()));
        let a = scalar_plus_nilpotent_with(n, q, s, &mut t.rng)?.get("A").clone();
        (a.adjoint(), a)
    };
    let Some(x) = sample_kernel(kind, &b, &a, m, &t.policy, &mut t.rng)? else {
        t.skip(format!("empty kernel at order {m}"));
        return Ok(());
    };
    if !t.transform_hypothesis("X in the order-m kernel", kind, &b, &a, &x, m)? {
        return Ok(());
    }
    for k in m..=m + 3 {
        t.transform_zero(format!("order {k} defect vanishes"), kind, &b, &a, &x, k)?;
    }
    match minimal_order(kind, &b, &a, &x, m + 3, &t.policy) {
        Ok(res) => {
            let found = matches!(res.minimal_order, MinimalOrder::Found(k) if k <= m);
            t.holds(format!("minimal order <= {m} ({:?})", res.minimal_order), found);
        }
        Err(Error::ToleranceInconsistency { zero_at, order }) => {
            t.holds(format!("tolerance inconsistency: zero at {zero_at}, nonzero at {order}"), false);
        }
        Err(e) => return Err(e),
    }

    // inverse pair: T^m_{B⁻¹,A⁻¹}(X) = (−1)^m B^{−m} T^m_{B,A}(X) A^{−m}
    let bi = b.inverse(&t.policy)?;
    let ai = a.inverse(&t.policy)?;
    t.transform_zero("inverse pair kills X", kind, &bi, &ai, &x, m)?;
    if let Some(x2) = sample_kernel(kind, &bi, &ai, m, &t.policy, &mut t.rng)? {
        t.transform_zero("original pair kills an inverse-pair kernel element", kind, &b, &a, &x2, m)?;
    }
    let z = complex_gaussian(n, n, &mut t.rng);
    let lhs = transform(kind, &bi, &ai, &z, m)?;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = (&(&bi.power(m)? * &transform(kind, &b, &a, &z, m)?) * &ai.power(m)?).scale_real(sign);
    let scale = transform_scale(&bi, &ai, z.frobenius_norm(), m) * (1.0 + transform_scale(&b, &a, 1.0, m));
    t.zero("inverse-pair identity", (&lhs - &rhs).frobenius_norm(), t.tol(scale));
    Ok(())
}

/// Eigenvalue distance tolerance for a defective spectrum: a Jordan chain of
/// length `k` spreads a rounding error `ε` into `ε^(1/k)`.
fn eig_tol(a: &CMatrix, k: usize) -> f64 {
    10.0 * (EPS * a.frobenius_norm().max(1.0)).powf(1.0 / k.max(1) as f64)
}

/// Hermitian `H` of size `n` with entries of order one.
fn hermitian<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let g = complex_gaussian(n, n, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

pub(super) fn remark2(t: &mut Trial) -> Result<()> {
    let n = t.dim(2);
    let m = t.order();
    t.describe(format!("n={n} m={m}"));

    // (a) the identity is always in the kernel of δ_{A,A}
    let a = complex_gaussian(n, n, &mut t.rng);
    t.transform_zero(format!("delta^{m}_(A,A)(I) = 0"), TransformKind::Delta, &a, &a, &CMatrix::identity(n), m)?;

    // (b) 2-selfadjoint iff selfadjoint, on both sides of the boundary
    let variant = t.idx % 4;
    let h = hermitian(n, &mut t.rng);
    let a = match variant {
        0 => h,
        1 => {
            let eps = t.rng.random_range(1e-2..1e-1);
            &h + &hermitian(n, &mut t.rng).scale(c64(0.0, eps))
        }
        2 => {
            let q = t.rng.random_range(2..=n.min(3));
            let s = t.rng.random_range(-2.0..2.0);
            &CMatrix::scalar_identity(n, c64(s, 0.0)) + &nilpotent_matrix(n, q, true, &mut t.rng)?
        }
        _ => complex_gaussian(n, n, &mut t.rng),
    };
    let i = CMatrix::identity(n);
    let (r2, tol2) = t.defect(TransformKind::Delta, &a.adjoint(), &a, &i, 2)?;
    let two_sa = r2 <= tol2;
    let sa = (&a - &a.adjoint()).frobenius_norm() <= t.tol(a.frobenius_norm());
    t.holds(format!("2-selfadjoint ({two_sa}) iff selfadjoint ({sa}), variant {variant}"), two_sa == sa);
    if variant == 0 {
        t.holds("Hermitian matrices are 2-selfadjoint", two_sa);
    } else {
        // the perturbations above are far above tolerance
        t.holds("non-Hermitian matrices are not 2-selfadjoint", !two_sa);
    }

    // (c) δ^k_{A_d*,A}(I) = 0 puts σ(A) on the unit circle and at 0
    let k = if t.idx % 2 == 0 { 2 } else { t.rng.random_range(2..=t.order_max.max(2)) };
    let n1 = t.rng.random_range(1..n);
    let n2 = n - n1;
    let p = t.rng.random_range(1..=n2.min(k));
    let opts = BlockOptions { conjugate: true, spectrum: CoreSpectrum::UnitCircle, jordan_max: k.div_ceil(2), unitary_frame: true };
    let inst = drazin_block_with(n1, n2, p, opts, &mut t.rng)?;
    let a = inst.get("A");
    let dd = core_nilpotent_decompose(a, &t.policy)?;
    if !t.transform_hypothesis(format!("delta^{k}_(A_d*,A)(I) = 0"), TransformKind::Delta, &dd.a_d.adjoint(), a, &i, k)? {
        return Ok(());
    }
    let etol = eig_tol(a, k.max(p));
    let eigs = a.eigenvalues()?;
    let worst = eigs.iter().map(|z| (z.norm() - 1.0).abs().min(z.norm())).fold(0.0, f64::max);
    t.zero("eigenvalues on the unit circle or at 0", worst, etol);
    let off = eigs.iter().filter(|&&z| z.norm() > etol && (z - c64(1.0, 0.0)).norm() > etol && (z + c64(1.0, 0.0)).norm() > etol).count();
    if off > 0 {
        t.note(format!("trial {}: {off} unimodular eigenvalue(s) other than +1, -1", t.idx));
    }
    Ok(())
}

/// `Δ^m_{B,A}(I)` for `B = A_d, A_d*` equals `(−1)^m I` on the nilpotent block.
pub(super) fn no_left_m_inv(t: &mut Trial) -> Result<()> {
    let n = t.dim(1);
    let n2 = t.rng.random_range(1..=n);
    let p = t.rng.random_range(1..=n2);
    let m = t.order();
    let spectrum = CoreSpectrum::ALL[t.rng.random_range(0..CoreSpectrum::ALL.len())];
    t.describe(format!("n1={} n2={n2} p={p} m={m} spectrum={spectrum:?}", n - n2));
    let opts = BlockOptions { conjugate: true, spectrum, jordan_max: 2, unitary_frame: true };
    let inst = drazin_block_with(n - n2, n2, p, opts, &mut t.rng)?;
    let a = inst.get("A");
    let dd = core_nilpotent_decompose(a, &t.policy)?;
    let i = CMatrix::identity(n);
    let expected = CMatrix::identity(n2).scale_real(if m % 2 == 0 { 1.0 } else { -1.0 });
    for (label, b) in [("A_d", dd.a_d.clone()), ("A_d*", dd.a_d.adjoint())] {
        let d = transform(TransformKind::Triangle, &b, a, &i, m)?;
        t.at_least(format!("||triangle^{m}_({label},A)(I)|| >= sqrt(dim H2)"), d.frobenius_norm(), (n2 as f64).sqrt() - 1e-6);
        let x22 = block_view(&d, &dd)?.x22;
        let scale = transform_scale(&b, a, i.frobenius_norm(), m) * dd.condition;
        t.zero(format!("H2 block of triangle^{m}_({label},A)(I) = (-1)^m I"), (&x22 - &expected).frobenius_norm(), t.tol(scale));
    }
    // the same holds after an independent unitary change of basis
    let u = haar_unitary(n, &mut t.rng);
    let a2 = &(&u * a) * &u.adjoint();
    let d2 = core_nilpotent_decompose(&a2, &t.policy)?;
    let d = transform(TransformKind::Triangle, &d2.a_d.adjoint(), &a2, &i, m)?;
    t.at_least("unitarily rotated instance", d.frobenius_norm(), (n2 as f64).sqrt() - 1e-6);
    Ok(())
}

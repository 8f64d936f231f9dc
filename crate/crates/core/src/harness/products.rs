//! Products, sums and nilpotent perturbations of weighted pairs.

use rand::Rng;

use super::Trial;
use crate::drazin::{block_view, core_nilpotent_decompose, drazin_inverse};
use crate::elemops::{transform, transform_scale, TransformKind};
use crate::error::Result;
use crate::genx::{
    ab_zero_pair_with, coupled_pair, haar_unitary, hypothesis1_quadruple_with, nilpotent_matrix, sample_kernel,
    scalar_plus_nilpotent_with, unit_phase, AbZeroShape, CoreSpectrum, GeneratedInstance, QuadrupleSpec, WeightKind,
};
use crate::matcore::{c64, CMatrix};

use TransformKind::{Delta, Triangle};

/// `T^k_{B,A}(W) ≈ 0` where `W = XY` is judged at the scale of `‖X‖‖Y‖`.
#[allow(clippy::too_many_arguments)]
fn product_zero(
    t: &mut Trial,
    clause: impl Into<String>,
    kind: TransformKind,
    b: &CMatrix,
    a: &CMatrix,
    w: &CMatrix,
    weight_norm: f64,
    k: usize,
) -> Result<bool> {
    let r = transform(kind, b, a, w, k)?.frobenius_norm();
    let tol = t.tol(transform_scale(b, a, weight_norm, k));
    Ok(t.zero(clause, r, tol))
}

/// Re-checks hypothesis (1) on a quadruple; `false` marks the trial skipped.
fn commutator_hypotheses(t: &mut Trial, a: &CMatrix, b: &CMatrix, x: &CMatrix, y: &CMatrix) -> Result<bool> {
    Ok(t.commute_hypothesis("[X,Y] = 0", x, y)?
        && t.commute_hypothesis("[A,B] = 0", a, b)?
        && t.commute_hypothesis("[A*,Y] = 0", &a.adjoint(), y)?
        && t.commute_hypothesis("[B*,X] = 0", &b.adjoint(), x)?)
}

fn quadruple(t: &mut Trial, weights: WeightKind) -> Result<(GeneratedInstance, QuadrupleSpec)> {
    let n = t.dim(2);
    let na = t.rng.random_range(1..n);
    let spec = QuadrupleSpec { na, nb: n - na, m: t.order(), n: t.order(), weights, conjugate: true };
    t.describe(format!("na={} nb={} m={} n={} weights={weights:?}", spec.na, spec.nb, spec.m, spec.n));
    let inst = hypothesis1_quadruple_with(spec, &mut t.rng)?;
    if inst.flags.iter().any(|f| f == "trivial weight") {
        t.flag_trivial();
    }
    Ok((inst, spec))
}

/// Products and sums of `(X,m)`- and `(Y,n)`-selfadjoint operators are
/// `(XY, m+n−1)`-selfadjoint.
fn selfadjoint_conclusions(t: &mut Trial, a: &CMatrix, b: &CMatrix, w: &CMatrix, wn: f64, k: usize) -> Result<()> {
    let ab = a * b;
    let s = a + b;
    product_zero(t, format!("AB is (W,{k})-selfadjoint"), Delta, &ab.adjoint(), &ab, w, wn, k)?;
    product_zero(t, format!("A+B is (W,{k})-selfadjoint"), Delta, &s.adjoint(), &s, w, wn, k)?;
    Ok(())
}

pub(super) fn prop2(t: &mut Trial) -> Result<()> {
    let (inst, spec) = quadruple(t, WeightKind::AdjointDelta)?;
    let (a, b, x, y, u) = (inst.get("A"), inst.get("B"), inst.get("X"), inst.get("Y"), inst.get("U"));
    if !commutator_hypotheses(t, a, b, x, y)?
        || !t.transform_hypothesis("A is (X,m)-selfadjoint", Delta, &a.adjoint(), a, x, spec.m)?
        || !t.transform_hypothesis("B is (Y,n)-selfadjoint", Delta, &b.adjoint(), b, y, spec.n)?
    {
        return Ok(());
    }
    let w = x * y;
    let wn = x.frobenius_norm() * y.frobenius_norm();
    selfadjoint_conclusions(t, a, b, &w, wn, spec.m + spec.n - 1)?;

    // (ii) a q-nilpotent N commuting with A, supported where A is scalar
    let q = t.rng.random_range(1..=spec.nb);
    let nb = nilpotent_matrix(spec.nb, q, true, &mut t.rng)?;
    let nm = &(u * &CMatrix::zeros(spec.na, spec.na).direct_sum(&nb)) * &u.adjoint();
    if !t.commute_hypothesis("[A,N] = 0", a, &nm)? {
        return Ok(());
    }
    let an = a + &nm;
    let k = spec.m + q - 1;
    t.transform_zero(format!("delta^{k}_(A*,A+N)(X) = 0"), Delta, &a.adjoint(), &an, x, k)?;
    let k = spec.m + 2 * q - 2;
    t.transform_zero(format!("A+N is (X,{k})-selfadjoint"), Delta, &an.adjoint(), &an, x, k)?;
    Ok(())
}

/// One weight shared by two commuting operators.
pub(super) fn cor1(t: &mut Trial) -> Result<()> {
    let (inst, spec) = quadruple(t, WeightKind::AdjointDelta)?;
    let (a, b) = (inst.get("A"), inst.get("B"));
    let w = inst.get("X") * inst.get("Y");
    let wn = w.frobenius_norm();
    if wn == 0.0 {
        t.flag_trivial();
    }
    if !t.commute_hypothesis("[A,B] = 0", a, b)?
        || !t.transform_hypothesis("A is (W,m)-selfadjoint", Delta, &a.adjoint(), a, &w, spec.m)?
        || !t.transform_hypothesis("B is (W,n)-selfadjoint", Delta, &b.adjoint(), b, &w, spec.n)?
    {
        return Ok(());
    }
    selfadjoint_conclusions(t, a, b, &w, wn, spec.m + spec.n - 1)
}

/// `(B, A, X)` with `Δ^m_{B,A}(X) ≈ 0`: a coupled invertible pair, or
/// `(A*, A)` with `A` a unimodular scalar plus a nilpotent.
fn triangle_triple(t: &mut Trial, n: usize, m: usize) -> Result<Option<(CMatrix, CMatrix, CMatrix)>> {
    let (b, a) = if t.coin() {
        coupled_pair(n, Triangle, &mut t.rng)
    } else {
        let q = t.rng.random_range(1..=n.min(3));
        let s = unit_phase(&mut t.rng);
        let a = scalar_plus_nilpotent_with(n, q, s, &mut t.rng)?.get("A").clone();
        (a.adjoint(), a)
    };
    Ok(sample_kernel(Triangle, &b, &a, m, &t.policy, &mut t.rng)?.map(|x| (b, a, x)))
}

/// Products of left-`(X_i, m_i)`-invertible pairs, and perturbation by a
/// commuting nilpotent.
pub(super) fn remark1(t: &mut Trial) -> Result<()> {
    let n = t.dim(2);
    let na = t.rng.random_range(1..n);
    let nb = n - na;
    let (m1, m2) = (t.order(), t.order());
    t.describe(format!("na={na} nb={nb} m1={m1} m2={m2}"));
    let (Some((r, p, xa)), Some((tt, qq, xb))) = (triangle_triple(t, na, m1)?, triangle_triple(t, nb, m2)?) else {
        t.skip("empty kernel");
        return Ok(());
    };
    let alpha = c64(t.rng.random_range(0.5..2.0), 0.0) * unit_phase(&mut t.rng);
    let beta = c64(t.rng.random_range(0.5..2.0), 0.0) * unit_phase(&mut t.rng);
    let one = c64(1.0, 0.0);
    let u = haar_unitary(n, &mut t.rng);
    let conj = |m: CMatrix| &(&u * &m) * &u.adjoint();
    let a1 = conj(p.direct_sum(&CMatrix::scalar_identity(nb, alpha)));
    let a2 = conj(CMatrix::scalar_identity(na, beta).direct_sum(&qq));
    let b1 = conj(r.direct_sum(&CMatrix::scalar_identity(nb, one / alpha)));
    let b2 = conj(CMatrix::scalar_identity(na, one / beta).direct_sum(&tt));
    let x1 = conj(xa.direct_sum(&CMatrix::identity(nb)));
    let x2 = conj(CMatrix::identity(na).direct_sum(&xb));

    // the listed commutators together with the three the product expansion also uses
    let pairs: [(&str, &CMatrix, &CMatrix); 8] = [
        ("[A1,A2] = 0", &a1, &a2),
        ("[A1,B2] = 0", &a1, &b2),
        ("[X1,X2] = 0", &x1, &x2),
        ("[A1,X2] = 0", &a1, &x2),
        ("[A2,X1] = 0", &a2, &x1),
        ("[B1,B2] = 0", &b1, &b2),
        ("[B2,X1] = 0", &b2, &x1),
        ("[B1,X2] = 0", &b1, &x2),
    ];
    for (name, l, r) in pairs {
        if !t.commute_hypothesis(name, l, r)? {
            return Ok(());
        }
    }
    if !t.transform_hypothesis("(B1,A1) left-(X1,m1)-invertible", Triangle, &b1, &a1, &x1, m1)?
        || !t.transform_hypothesis("(B2,A2) left-(X2,m2)-invertible", Triangle, &b2, &a2, &x2, m2)?
    {
        return Ok(());
    }
    let k = m1 + m2 - 1;
    let wn = x1.frobenius_norm() * x2.frobenius_norm();
    product_zero(t, format!("(B1B2,A1A2) left-(X1X2,{k})-invertible"), Triangle, &(&b1 * &b2), &(&a1 * &a2), &(&x1 * &x2), wn, k)?;

    // nilpotent perturbation on the block where A1 is scalar
    let q = t.rng.random_range(1..=nb);
    let nm = conj(CMatrix::zeros(na, na).direct_sum(&nilpotent_matrix(nb, q, true, &mut t.rng)?));
    if !t.commute_hypothesis("[A1,N] = 0", &a1, &nm)? {
        return Ok(());
    }
    let k = m1 + q - 1;
    t.transform_zero(format!("triangle^{k}_(B1,A1+N)(X1) = 0"), Triangle, &b1, &(&a1 + &nm), &x1, k)?;
    Ok(())
}

pub(super) fn thm3(t: &mut Trial) -> Result<()> {
    let (inst, spec) = quadruple(t, WeightKind::DrazinAdjointTriangle)?;
    let (a, b, x, y) = (inst.get("A"), inst.get("B"), inst.get("X"), inst.get("Y"));
    if !commutator_hypotheses(t, a, b, x, y)? {
        return Ok(());
    }
    let ad = drazin_inverse(a, &t.policy)?;
    let bd = drazin_inverse(b, &t.policy)?;
    if !t.transform_hypothesis("(A_d*,A) left-(X,m)-invertible", Triangle, &ad.adjoint(), a, x, spec.m)?
        || !t.transform_hypothesis("(B_d*,B) left-(Y,n)-invertible", Triangle, &bd.adjoint(), b, y, spec.n)?
    {
        return Ok(());
    }
    let w = x * y;
    let wn = x.frobenius_norm() * y.frobenius_norm();
    let k = spec.m + spec.n - 1;
    selfadjoint_conclusions(t, a, b, &w, wn, k)?;

    let ab = a * b;
    let abd = drazin_inverse(&ab, &t.policy)?;
    let prod = &ad * &bd;
    let scale = ad.frobenius_norm() * bd.frobenius_norm();
    t.zero("(AB)_d = A_d B_d", (&abd - &prod).frobenius_norm(), t.tol(scale));
    product_zero(t, format!("(A_d*B_d*,AB) left-(XY,{k})-invertible"), Triangle, &(&ad.adjoint() * &bd.adjoint()), &ab, &w, wn, k)?;
    Ok(())
}

/// A pair with `AB = BA = 0`, weights sampled from the kernels of
/// `T^m_{C(A),A}` and `T^n_{C(B),B}` where `C` picks the left operator.
struct ZeroProductCase {
    a: CMatrix,
    b: CMatrix,
    x: CMatrix,
    y: CMatrix,
    m: usize,
    n: usize,
}

fn zero_product_case(
    t: &mut Trial,
    spectrum: CoreSpectrum,
    left: fn(&CMatrix, &CMatrix) -> CMatrix,
) -> Result<Option<ZeroProductCase>> {
    let total = t.dim(4);
    let n2 = t.rng.random_range(2..=total - 2);
    let b_core = t.rng.random_range(1..=total - n2 - 1);
    let n1 = total - n2 - b_core;
    let (m, n) = (t.order(), t.order());
    t.describe(format!("n1={n1} n2={n2} b_core={b_core} m={m} n={n} spectrum={spectrum:?}"));
    let shape = AbZeroShape { n1, n2, b_core, spectrum_a: spectrum, spectrum_b: spectrum, conjugate: true };
    let inst = ab_zero_pair_with(shape, &mut t.rng)?;
    let (a, b) = (inst.get("A").clone(), inst.get("B").clone());
    let ad = drazin_inverse(&a, &t.policy)?;
    let bd = drazin_inverse(&b, &t.policy)?;
    let (ca, cb) = (left(&a, &ad), left(&b, &bd));
    let x = sample_kernel(Triangle, &ca, &a, m, &t.policy, &mut t.rng)?;
    let y = sample_kernel(Triangle, &cb, &b, n, &t.policy, &mut t.rng)?;
    let (Some(x), Some(y)) = (x, y) else {
        t.skip("empty weight kernel");
        return Ok(None);
    };
    if !t.transform_hypothesis("weight hypothesis on X", Triangle, &ca, &a, &x, m)?
        || !t.transform_hypothesis("weight hypothesis on Y", Triangle, &cb, &b, &y, n)?
    {
        return Ok(None);
    }
    let scale = a.frobenius_norm() * b.frobenius_norm();
    if !t.hypothesis("AB = 0", (&a * &b).frobenius_norm(), t.tol(scale)) || !commutator_hypotheses(t, &a, &b, &x, &y)? {
        return Ok(None);
    }
    // disjoint supports force XY = 0
    if (&x * &y).frobenius_norm() <= t.tol(x.frobenius_norm() * y.frobenius_norm()) {
        t.flag_trivial();
    }
    Ok(Some(ZeroProductCase { a, b, x, y, m, n }))
}

pub(super) fn thm4(t: &mut Trial) -> Result<()> {
    let Some(c) = zero_product_case(t, CoreSpectrum::RealNonnormal, |_, ad| ad.adjoint())? else {
        return Ok(());
    };
    let s = &c.a + &c.b;
    let sd = drazin_inverse(&s, &t.policy)?;
    let sds = sd.adjoint();
    let w = &c.x * &c.y;
    let wn = c.x.frobenius_norm() * c.y.frobenius_norm();
    let k = c.m + c.n - 1;
    product_zero(t, format!("delta^{k}_((A+B)_d*,A+B)(XY) = 0"), Delta, &sds, &s, &w, wn, k)?;
    product_zero(t, format!("triangle^{k}_((A+B)_d*,A+B)(XY) = 0"), Triangle, &sds, &s, &w, wn, k)?;
    // the intermediate step of the argument, on each weight alone
    t.transform_zero(format!("triangle^{}_((A+B)_d*,A+B)(X) = 0", c.m), Triangle, &sds, &s, &c.x, c.m)?;
    t.transform_zero(format!("triangle^{}_((A+B)_d*,A+B)(Y) = 0", c.n), Triangle, &sds, &s, &c.y, c.n)?;

    // (A+B)_d = A1⁻¹ ⊕ (A2 + B22)_d in A's core-nilpotent frame
    let dd = core_nilpotent_decompose(&c.a, &t.policy)?;
    let bv = block_view(&c.b, &dd)?;
    let bscale = c.b.frobenius_norm() * dd.condition;
    t.zero("B11 = 0", bv.x11.frobenius_norm(), t.tol(bscale));
    t.zero("B12 = 0", bv.x12.frobenius_norm(), t.tol(bscale));
    t.zero("B21 = 0", bv.x21.frobenius_norm(), t.tol(bscale));
    let lower = &dd.a2 + &bv.x22;
    let formula = dd.assemble(&dd.a1.inverse(&t.policy)?, &drazin_inverse(&lower, &t.policy)?);
    let scale = sd.frobenius_norm().max(1.0) * dd.condition;
    t.zero("block formula for (A+B)_d", (&formula - &sd).frobenius_norm(), t.tol(scale));
    Ok(())
}

pub(super) fn thm5(t: &mut Trial) -> Result<()> {
    let Some(c) = zero_product_case(t, CoreSpectrum::UnitCircle, |a, _| a.adjoint())? else {
        return Ok(());
    };
    let s = &c.a + &c.b;
    let sd = drazin_inverse(&s, &t.policy)?;
    let w = &c.x * &c.y;
    let wn = c.x.frobenius_norm() * c.y.frobenius_norm();
    let k = c.m + c.n - 1;
    product_zero(t, format!("A+B is (XY,{k})-isometric"), Triangle, &s.adjoint(), &s, &w, wn, k)?;
    product_zero(t, format!("delta^{k}_((A+B)_d*,A+B)(XY) = 0"), Delta, &sd.adjoint(), &s, &w, wn, k)?;
    for (name, x, m) in [("X", &c.x, c.m), ("Y", &c.y, c.n)] {
        t.transform_zero(format!("A+B is ({name},{m})-isometric"), Triangle, &s.adjoint(), &s, x, m)?;
        t.transform_zero(format!("delta^{m}_((A+B)_d*,A+B)({name}) = 0"), Delta, &sd.adjoint(), &s, x, m)?;
    }
    Ok(())
}

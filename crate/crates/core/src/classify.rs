//! Class membership, minimal orders and weight kernels.
//!
//! Under column-major vectorization `vec(BXA) = (Aᵀ ⊗ B) vec(X)`, so each
//! transform is a single `n² × n²` matrix whose numerical nullspace is the
//! space of admissible weights `X`.

use serde::{Deserialize, Serialize};

use crate::elemops::{binomial, transform, transform_scale, TransformKind};
use crate::error::{Error, Result};
use crate::matcore::{CMatrix, NumericPolicy, EPS};

fn check_pair(b: &CMatrix, a: &CMatrix, m: usize) -> Result<usize> {
    if m == 0 {
        return Err(Error::InvalidOrder("transform order must be at least 1".into()));
    }
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "B is {}x{}, A is {}x{}",
            b.rows(),
            b.cols(),
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.rows())
}

/// The `n² × n²` matrix of `X ↦ Δ^m_{B,A}(X)` or `X ↦ δ^m_{B,A}(X)`.
pub fn transform_matrix(kind: TransformKind, b: &CMatrix, a: &CMatrix, m: usize) -> Result<CMatrix> {
    let n = check_pair(b, a, m)?;
    let bp = b.powers(m)?;
    let ap = a.powers(m)?;
    let mut acc = CMatrix::zeros(n * n, n * n);
    for j in 0..=m {
        let right = match kind {
            TransformKind::Triangle => &ap[m - j],
            TransformKind::Delta => &ap[j],
        };
        let c = binomial(m, j) as f64 * if j % 2 == 0 { 1.0 } else { -1.0 };
        acc = &acc + &right.transpose().kron(&bp[m - j]).scale_real(c);
    }
    Ok(acc)
}

/// Orthonormal (Frobenius) basis of the weights annihilated by a transform.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelBasis {
    pub kind: TransformKind,
    pub m: usize,
    pub dim: usize,
    pub basis: Vec<CMatrix>,
    /// Smallest accepted singular value over largest rejected one;
    /// infinite when either side is empty. Small values flag an
    /// unreliable dimension.
    #[serde(skip)]
    pub gap: f64,
}

/// Numerical nullspace of [`transform_matrix`]. Singular values at or below
/// `max(rank_rtol σ_max, 64 ε (1 + ‖A‖‖B‖)^m)` count as zero.
pub fn kernel(kind: TransformKind, b: &CMatrix, a: &CMatrix, m: usize, policy: &NumericPolicy) -> Result<KernelBasis> {
    let n = check_pair(b, a, m)?;
    let t = transform_matrix(kind, b, a, m)?;
    let sv = t.singular_values();
    let smax = sv.first().copied().unwrap_or(0.0);
    let floor = 64.0 * EPS * transform_scale(b, a, 1.0, m);
    let cutoff = (policy.rank_rtol * smax).max(floor);
    let r = sv.iter().take_while(|&&s| s > cutoff).count();
    let gap = match (r.checked_sub(1).map(|i| sv[i]), sv.get(r)) {
        (Some(kept), Some(&dropped)) if dropped > 0.0 => kept / dropped,
        _ => f64::INFINITY,
    };
    let (_, null) = t.split_bases(r);
    let basis = (0..null.cols())
        .map(|k| CMatrix::unvectorize(&null.column(k), n, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelBasis { kind, m, dim: basis.len(), basis, gap })
}

impl KernelBasis {
    /// `Σ c_k X_k`.
    pub fn combine(&self, coeffs: &[crate::matcore::C64]) -> Option<CMatrix> {
        let first = self.basis.first()?;
        let mut acc = CMatrix::zeros(first.rows(), first.cols());
        for (x, &c) in self.basis.iter().zip(coeffs) {
            acc = &acc + &(x * c);
        }
        Some(acc)
    }
}

fn zero_defect(kind: TransformKind, b: &CMatrix, a: &CMatrix, x: &CMatrix, m: usize, policy: &NumericPolicy) -> Result<bool> {
    let d = transform(kind, b, a, x, m)?;
    Ok(d.is_zero(transform_scale(b, a, x.frobenius_norm(), m), policy))
}

/// Whether `Δ^m_{B,A}(X) ≈ 0` at scale `(1 + ‖A‖‖B‖)^m ‖X‖_F`.
pub fn is_left_x_m_invertible(b: &CMatrix, a: &CMatrix, x: &CMatrix, m: usize, policy: &NumericPolicy) -> Result<bool> {
    zero_defect(TransformKind::Triangle, b, a, x, m, policy)
}

/// Whether `δ^m_{B,A}(X) ≈ 0` at the same scale.
pub fn is_x_m_adjoint(b: &CMatrix, a: &CMatrix, x: &CMatrix, m: usize, policy: &NumericPolicy) -> Result<bool> {
    zero_defect(TransformKind::Delta, b, a, x, m, policy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimalOrder {
    Found(usize),
    NotFound { bound: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub kind: TransformKind,
    pub member: bool,
    pub minimal_order: MinimalOrder,
    /// `‖defect‖_F` for orders `1..=bound`.
    pub residuals: Vec<f64>,
    /// The zero threshold used at each order.
    pub tolerances: Vec<f64>,
}

/// Scans orders `1..=bound` for the first vanishing defect. A vanishing
/// defect followed by a nonvanishing one is reported as
/// [`Error::ToleranceInconsistency`]: in exact arithmetic the defect stays
/// zero at every higher order.
pub fn minimal_order(
    kind: TransformKind,
    b: &CMatrix,
    a: &CMatrix,
    x: &CMatrix,
    bound: usize,
    policy: &NumericPolicy,
) -> Result<ClassificationResult> {
    if bound == 0 {
        return Err(Error::InvalidOrder("order bound must be at least 1".into()));
    }
    let xn = x.frobenius_norm();
    let mut residuals = Vec::with_capacity(bound);
    let mut tolerances = Vec::with_capacity(bound);
    let mut first = None;
    for m in 1..=bound {
        let r = transform(kind, b, a, x, m)?.frobenius_norm();
        let tol = policy.tolerance(transform_scale(b, a, xn, m));
        residuals.push(r);
        tolerances.push(tol);
        match first {
            None if r <= tol => first = Some(m),
            Some(z) if r > tol => return Err(Error::ToleranceInconsistency { zero_at: z, order: m }),
            _ => {}
        }
    }
    Ok(ClassificationResult {
        kind,
        member: first.is_some(),
        minimal_order: first.map_or(MinimalOrder::NotFound { bound }, MinimalOrder::Found),
        residuals,
        tolerances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elemops::{delta, triangle};
    use crate::matcore::c64;
    use proptest::prelude::*;

    fn pol() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn jordan2() -> CMatrix {
        CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]])
    }

    /// Exact rank of an integer matrix by fraction-free elimination.
    fn exact_rank(mut rows: Vec<Vec<i128>>) -> usize {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut rank = 0;
        let mut prev = 1i128;
        for col in 0..ncols {
            let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
            rows.swap(rank, piv);
            for i in rank + 1..rows.len() {
                for j in col + 1..ncols {
                    rows[i][j] = (rows[rank][col] * rows[i][j] - rows[i][col] * rows[rank][j]) / prev;
                }
                rows[i][col] = 0;
            }
            prev = rows[rank][col];
            rank += 1;
        }
        rank
    }

    /// Integer matrix of the map `X ↦ transform(X)` built from its action on
    /// the unit matrices `E_ij`, independent of the Kronecker construction.
    fn integer_map(kind: TransformKind, b: &CMatrix, a: &CMatrix, m: usize) -> Vec<Vec<i128>> {
        let n = a.rows();
        let mut cols = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let y = transform(kind, b, a, &CMatrix::unit(n, i, j), m).unwrap();
                cols.push(y.vectorize());
            }
        }
        (0..n * n)
            .map(|r| {
                cols.iter()
                    .map(|c| {
                        let z = c.get(r, 0);
                        assert!(z.im == 0.0 && z.re.fract() == 0.0);
                        z.re as i128
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn transform_matrix_examples() {
        let i3 = CMatrix::identity(3);
        assert_eq!(transform_matrix(TransformKind::Triangle, &i3, &i3, 2).unwrap(), CMatrix::zeros(9, 9));
        let t = transform_matrix(TransformKind::Triangle, &CMatrix::real_diag(&[3.0]), &CMatrix::real_diag(&[5.0]), 1).unwrap();
        assert_eq!(t, CMatrix::real_diag(&[14.0]));
        assert!(transform_matrix(TransformKind::Delta, &i3, &CMatrix::identity(2), 1).is_err());
    }

    #[test]
    fn kernel_examples() {
        let p = pol();
        let k = kernel(TransformKind::Triangle, &CMatrix::real_diag(&[0.5]), &CMatrix::real_diag(&[2.0]), 1, &p).unwrap();
        assert_eq!(k.dim, 1);

        let a = CMatrix::real_diag(&[2.0, 0.0]);
        let k = kernel(TransformKind::Triangle, &a, &a, 1, &p).unwrap();
        assert_eq!(k.dim, 0);
        assert_eq!(exact_rank(integer_map(TransformKind::Triangle, &a, &a, 1)), 4);

        let a = CMatrix::real_diag(&[1.0]).direct_sum(&CMatrix::unit(2, 0, 1));
        let b = a.adjoint();
        let k = kernel(TransformKind::Triangle, &b, &a, 1, &p).unwrap();
        assert_eq!(k.dim, 9 - exact_rank(integer_map(TransformKind::Triangle, &b, &a, 1)));
        assert_eq!(k.dim, 1);
        let x = &k.basis[0];
        // unit norm and a phase multiple of E11
        assert!((x.get(0, 0).norm() - 1.0).abs() < 1e-12);
        assert!((x.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_serializes_without_gap() {
        let a = CMatrix::real_diag(&[2.0]);
        let k = kernel(TransformKind::Triangle, &CMatrix::real_diag(&[0.5]), &a, 1, &pol()).unwrap();
        let v = serde_json::to_value(&k).unwrap();
        assert_eq!(v["kind"], "triangle");
        assert_eq!(v["dim"], 1);
        assert!(v.get("gap").is_none());
        assert_eq!(v["basis"][0]["rows"], 1);
    }

    #[test]
    fn membership_examples() {
        let p = pol();
        let x = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let i2 = CMatrix::identity(2);
        assert!(is_left_x_m_invertible(&i2, &i2, &x, 2, &p).unwrap());
        let a = jordan2();
        assert!(is_left_x_m_invertible(&a.adjoint(), &a, &i2, 3, &p).unwrap());
        assert!(!is_left_x_m_invertible(&a.adjoint(), &a, &i2, 2, &p).unwrap());

        let g = CMatrix::from_rows(&[&[c64(1.0, 1.0), c64(0.0, 2.0)], &[c64(-1.0, 0.0), c64(0.5, 0.0)]]);
        assert!(is_x_m_adjoint(&g, &g, &i2, 4, &p).unwrap());
        let h = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -1.0]]);
        assert!(is_x_m_adjoint(&h.adjoint(), &h, &i2, 1, &p).unwrap());
        let e = CMatrix::unit(2, 0, 1);
        assert!(!is_x_m_adjoint(&e.adjoint(), &e, &i2, 2, &p).unwrap());
    }

    #[test]
    fn minimal_order_examples() {
        let p = pol();
        let a = jordan2();
        let i2 = CMatrix::identity(2);
        for kind in [TransformKind::Delta, TransformKind::Triangle] {
            let res = minimal_order(kind, &a.adjoint(), &a, &i2, 5, &p).unwrap();
            assert_eq!(res.minimal_order, MinimalOrder::Found(3));
            assert!(res.member);
            assert_eq!(res.residuals.len(), 5);
        }
        let h = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let res = minimal_order(TransformKind::Delta, &h, &h, &i2, 3, &p).unwrap();
        assert_eq!(res.minimal_order, MinimalOrder::Found(1));

        let e = CMatrix::unit(2, 0, 1);
        let res = minimal_order(TransformKind::Triangle, &e.adjoint(), &e, &i2, 5, &p).unwrap();
        assert_eq!(res.minimal_order, MinimalOrder::NotFound { bound: 5 });
        assert!(!res.member);
        let v = serde_json::to_value(&res).unwrap();
        assert_eq!(v["minimal_order"]["not_found"]["bound"], 5);
    }

    #[test]
    fn nonmonotone_defect_is_an_error() {
        // scalar defects (a² − 1)^m: 1.25, 1.5625, ... for a = 1.5
        let a = CMatrix::real_diag(&[1.5]);
        let i1 = CMatrix::identity(1);
        let loose = NumericPolicy { atol: 1.3, rtol: 0.0, ..pol() };
        assert!(matches!(
            minimal_order(TransformKind::Triangle, &a, &a, &i1, 3, &loose),
            Err(Error::ToleranceInconsistency { zero_at: 1, order: 2 })
        ));
        // 0.69, 0.48, 0.33 for a = 1.3: decreasing, so the first pass stands
        let a = CMatrix::real_diag(&[1.3]);
        let r = minimal_order(TransformKind::Triangle, &a, &a, &i1, 3, &NumericPolicy { atol: 0.5, ..loose }).unwrap();
        assert_eq!(r.minimal_order, MinimalOrder::Found(2));
        assert!(matches!(minimal_order(TransformKind::Delta, &a, &a, &i1, 0, &loose), Err(Error::InvalidOrder(_))));
    }

    fn cplx() -> impl Strategy<Value = (f64, f64)> {
        (-1.0f64..1.0, -1.0f64..1.0)
    }

    fn mat(n: usize, e: &[(f64, f64)]) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| c64(e[i * n + j].0, e[i * n + j].1))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn transform_matrix_acts_like_transform(
            n in 1usize..4,
            m in 1usize..4,
            delta_kind in any::<bool>(),
            e in prop::collection::vec(cplx(), 27),
        ) {
            let kind = if delta_kind { TransformKind::Delta } else { TransformKind::Triangle };
            let (b, a, x) = (mat(n, &e[0..9]), mat(n, &e[9..18]), mat(n, &e[18..27]));
            let t = transform_matrix(kind, &b, &a, m).unwrap();
            let lhs = &t * &x.vectorize();
            let rhs = transform(kind, &b, &a, &x, m).unwrap().vectorize();
            let scale = transform_scale(&b, &a, x.frobenius_norm(), m);
            prop_assert!((&lhs - &rhs).frobenius_norm() <= 1e-8 * scale);
        }

        #[test]
        fn kernels_are_sound_complete_and_monotone(
            n in 2usize..4,
            m in 1usize..4,
            delta_kind in any::<bool>(),
            e in prop::collection::vec(cplx(), 18),
        ) {
            let p = pol();
            let kind = if delta_kind { TransformKind::Delta } else { TransformKind::Triangle };
            let mut a = mat(n, &e[0..9]).scale_real(0.4);
            a = &a + &CMatrix::identity(n);
            let b = match kind {
                TransformKind::Triangle => a.inverse(&p).unwrap(),
                TransformKind::Delta => a.clone(),
            };
            let k = kernel(kind, &b, &a, m, &p).unwrap();
            prop_assert!(k.dim >= 1);
            for x in &k.basis {
                let d = transform(kind, &b, &a, x, m).unwrap();
                prop_assert!(d.is_zero(transform_scale(&b, &a, 1.0, m), &p));
                for extra in 0..4 {
                    prop_assert!(transform(kind, &b, &a, x, m + extra).unwrap()
                        .is_zero(transform_scale(&b, &a, 1.0, m + extra), &p));
                }
                // invertible pair equivalence
                let (bi, ai) = (b.inverse(&p).unwrap(), a.inverse(&p).unwrap());
                prop_assert!(transform(kind, &bi, &ai, x, m).unwrap()
                    .is_zero(transform_scale(&bi, &ai, 1.0, m), &p));
            }
            // a random weight with its kernel component removed is not annihilated
            let mut r = mat(n, &e[9..18]);
            for x in &k.basis {
                let ip: crate::matcore::C64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| x.get(i, j).conj() * r.get(i, j)).sum();
                r = &r - &(x * ip);
            }
            if r.frobenius_norm() > 1e-3 {
                let d = transform(kind, &b, &a, &r, m).unwrap();
                prop_assert!(!d.is_zero(transform_scale(&b, &a, r.frobenius_norm(), m), &p));
            }
        }
    }

    #[test]
    fn triangle_and_delta_agree_with_their_matrices_on_fixture() {
        let a = jordan2();
        let t = transform_matrix(TransformKind::Triangle, &a.adjoint(), &a, 2).unwrap();
        let y = CMatrix::unvectorize(&(&t * &CMatrix::identity(2).vectorize()), 2, 2).unwrap();
        assert_eq!(y, triangle(&a.adjoint(), &a, &CMatrix::identity(2), 2).unwrap());
        let t = transform_matrix(TransformKind::Delta, &a.adjoint(), &a, 2).unwrap();
        let y = CMatrix::unvectorize(&(&t * &CMatrix::identity(2).vectorize()), 2, 2).unwrap();
        assert_eq!(y, delta(&a.adjoint(), &a, &CMatrix::identity(2), 2).unwrap());
    }
}

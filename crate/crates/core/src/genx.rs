//! Seeded generators for the structured instance families.
//!
//! Every generator is deterministic in its RNG state. Public `make_*`
//! entry points take a `u64` seed and self-certify the properties they
//! promise; the `*_with` variants draw from a caller-supplied stream so
//! that parallel trials can use independent counter-split streams.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::classify::kernel;
use crate::drazin::{axiom_residuals, axiom_tolerance, core_nilpotent_decompose, index_of, nilpotency_order};
use crate::elemops::{delta, isometry_defect, selfadjoint_defect, transform_scale, triangle, TransformKind};
use crate::error::{Error, Result};
use crate::matcore::{c64, CMatrix, NumericPolicy, C64};

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn gauss<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Entries `(x + iy)/√2` with `x, y` standard normal.
pub fn complex_gaussian<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| c64(s * gauss(rng), s * gauss(rng)))
}

pub(crate) fn unit_phase<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

fn sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Log-uniform draw from `[lo, hi]`.
fn log_uniform<R: Rng>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let g = complex_gaussian(n, n, rng).into_dmatrix();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..n {
            q[(i, k)] *= ph;
        }
    }
    CMatrix::from_dmatrix(q).expect("finite QR factor")
}

/// Seeded unitary with `‖U*U − I‖_F ≤ 1e-12` checked.
pub fn random_unitary(n: usize, seed: u64) -> Result<CMatrix> {
    let u = haar_unitary(n, &mut rng_for(seed, 0));
    let defect = (&(&u.adjoint() * &u) - &CMatrix::identity(n)).frobenius_norm();
    if defect > 1e-12 {
        return Err(Error::GenerationFailed(format!("unitary defect {defect:e}")));
    }
    Ok(u)
}

/// `W Σ V*` with singular values log-uniform in `[lo, hi]`.
pub fn conditioned_matrix<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> CMatrix {
    let w = haar_unitary(n, rng);
    let v = haar_unitary(n, rng);
    let sig: Vec<f64> = (0..n).map(|_| log_uniform(lo, hi, rng)).collect();
    &(&w * &CMatrix::real_diag(&sig)) * &v.adjoint()
}

/// Invertible matrix with condition number at most 10.
pub fn invertible_matrix<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    conditioned_matrix(n, 0.25, 2.5, rng)
}

pub fn random_invertible(n: usize, seed: u64) -> CMatrix {
    invertible_matrix(n, &mut rng_for(seed, 0))
}

/// Strictly upper-triangular chain block of size `q`: superdiagonal
/// entries of modulus in `[0.4, 1]`, and when `noisy`, extra entries
/// strictly above the superdiagonal. Nilpotent of order exactly `q`.
fn chain_block<R: Rng>(q: usize, noisy: bool, rng: &mut R) -> CMatrix {
    let mut n = CMatrix::zeros(q, q);
    for k in 0..q.saturating_sub(1) {
        n.set(k, k + 1, unit_phase(rng) * rng.random_range(0.4..1.0));
    }
    if noisy {
        for i in 0..q {
            for j in i + 2..q {
                n.set(i, j, unit_phase(rng) * rng.random_range(0.0..0.3));
            }
        }
    }
    n
}

/// An `n × n` nilpotent of order exactly `q`: one chain of length `q`
/// carrying the noise, the remaining coordinates split into chains of
/// length at most `q`, optionally conjugated by a Haar unitary.
pub fn nilpotent_matrix<R: Rng>(n: usize, q: usize, conjugate: bool, rng: &mut R) -> Result<CMatrix> {
    if q == 0 || q > n {
        return Err(Error::InvalidOrder(format!("nilpotency order {q} must lie in 1..={n}")));
    }
    let mut parts = vec![chain_block(q, true, rng)];
    let mut left = n - q;
    while left > 0 {
        let len = rng.random_range(1..=left.min(q));
        parts.push(chain_block(len, false, rng));
        left -= len;
    }
    let refs: Vec<&CMatrix> = parts.iter().collect();
    let nm = CMatrix::block_diag(&refs);
    Ok(if conjugate {
        let u = haar_unitary(n, rng);
        &(&u * &nm) * &u.adjoint()
    } else {
        nm
    })
}

/// Seeded, unitarily conjugated nilpotent with certified order `q`.
pub fn random_nilpotent(n: usize, q: usize, seed: u64) -> Result<CMatrix> {
    let nm = nilpotent_matrix(n, q, true, &mut rng_for(seed, 0))?;
    let policy = NumericPolicy::default();
    match nilpotency_order(&nm, &policy) {
        Some(k) if k == q => Ok(nm),
        other => Err(Error::GenerationFailed(format!("nilpotent order {other:?}, wanted {q}"))),
    }
}

/// Spectral pattern of an invertible core block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoreSpectrum {
    /// Complex eigenvalues of modulus in `[0.5, 2]`.
    General,
    /// Real eigenvalues, no Jordan structure, unitary frame: a Hermitian core.
    Selfadjoint,
    /// Real eigenvalues with optional Jordan structure.
    RealNonnormal,
    /// Unimodular eigenvalues.
    UnitCircle,
    /// Eigenvalues in pairs `λ, 1/λ` (a trailing group may stay unpaired).
    InversionClosed,
}

impl CoreSpectrum {
    pub const ALL: [CoreSpectrum; 5] = [
        CoreSpectrum::General,
        CoreSpectrum::Selfadjoint,
        CoreSpectrum::RealNonnormal,
        CoreSpectrum::UnitCircle,
        CoreSpectrum::InversionClosed,
    ];
}

fn group_sizes<R: Rng>(n: usize, jordan_max: usize, rng: &mut R) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = rng.random_range(1..=left.min(jordan_max.max(1)));
        sizes.push(s);
        left -= s;
    }
    sizes
}

fn well_separated(values: &[C64], z: C64) -> bool {
    values.iter().all(|v| (v - z).norm() >= 0.15)
}

fn draw_eigenvalue<R: Rng>(spectrum: CoreSpectrum, taken: &[C64], rng: &mut R) -> C64 {
    for _ in 0..64 {
        let z = match spectrum {
            CoreSpectrum::General => C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU)),
            CoreSpectrum::Selfadjoint | CoreSpectrum::RealNonnormal => c64(sign(rng) * rng.random_range(0.5..2.0), 0.0),
            CoreSpectrum::UnitCircle => unit_phase(rng),
            CoreSpectrum::InversionClosed => C64::from_polar(rng.random_range(0.5..0.8), rng.random_range(0.0..std::f64::consts::TAU)),
        };
        if well_separated(taken, z) {
            return z;
        }
    }
    // the sampling regions are wide enough that this is unreachable at desk scale
    c64(1.0 + taken.len() as f64, 0.0)
}

/// `I + N` with `N` a scaled chain of length `s`.
fn jordan_like<R: Rng>(s: usize, rng: &mut R) -> CMatrix {
    &CMatrix::identity(s) + &chain_block(s, false, rng).scale_real(0.6)
}

/// Invertible `n × n` core `P (⊕_g λ_g (I + N_g)) P⁻¹` where each `N_g` is
/// a chain of length at most `jordan_max`. `P` is a Haar unitary when
/// `unitary_frame`, otherwise a matrix with singular values in `[0.7, 1.4]`.
pub fn core_matrix<R: Rng>(n: usize, spectrum: CoreSpectrum, jordan_max: usize, unitary_frame: bool, rng: &mut R) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let jordan_max = match spectrum {
        CoreSpectrum::Selfadjoint => 1,
        _ => jordan_max.max(1),
    };
    let unitary_frame = unitary_frame || spectrum == CoreSpectrum::Selfadjoint;
    let mut blocks = Vec::new();
    let mut taken: Vec<C64> = Vec::new();
    let mut sizes = group_sizes(n, jordan_max, rng).into_iter().peekable();
    while let Some(s) = sizes.next() {
        let lam = draw_eigenvalue(spectrum, &taken, rng);
        taken.push(lam);
        blocks.push(&jordan_like(s, rng) * lam);
        if spectrum == CoreSpectrum::InversionClosed {
            // partner group 1/λ of the next size, if any remain
            if let Some(s2) = sizes.next() {
                let inv = c64(1.0, 0.0) / lam;
                taken.push(inv);
                blocks.push(&jordan_like(s2, rng) * inv);
            }
        }
    }
    let refs: Vec<&CMatrix> = blocks.iter().collect();
    let j = CMatrix::block_diag(&refs);
    if unitary_frame {
        let u = haar_unitary(n, rng);
        &(&u * &j) * &u.adjoint()
    } else {
        let p = conditioned_matrix(n, 0.7, 1.4, rng);
        let pinv = p.inverse(&NumericPolicy::default()).expect("well-conditioned similarity");
        &(&p * &j) * &pinv
    }
}

/// Named matrices plus the checks they passed at generation time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratedInstance {
    pub family: Family,
    pub matrices: BTreeMap<String, CMatrix>,
    pub certified: Vec<Certification>,
    /// Non-fatal observations, e.g. `"trivial weight"`.
    pub flags: Vec<String>,
    /// Drazin index the construction promises, when it promises one.
    pub constructed_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub property: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl GeneratedInstance {
    fn new(family: Family) -> Self {
        GeneratedInstance { family, matrices: BTreeMap::new(), certified: Vec::new(), flags: Vec::new(), constructed_index: None }
    }

    fn put(&mut self, name: &str, m: CMatrix) -> &mut Self {
        self.matrices.insert(name.to_string(), m);
        self
    }

    /// Records a check passing when `residual ≤ tolerance`.
    fn certify(&mut self, property: impl Into<String>, residual: f64, tolerance: f64) {
        self.certified.push(Certification { property: property.into(), residual, tolerance, passed: residual <= tolerance });
    }

    /// Records a check passing when `residual ≥ threshold`.
    fn certify_at_least(&mut self, property: impl Into<String>, value: f64, threshold: f64) {
        self.certified.push(Certification { property: property.into(), residual: value, tolerance: threshold, passed: value >= threshold });
    }

    fn finish(self) -> Result<Self> {
        let bad: Vec<&str> = self.certified.iter().filter(|c| !c.passed).map(|c| c.property.as_str()).collect();
        if bad.is_empty() {
            Ok(self)
        } else {
            Err(Error::GenerationFailed(format!("{}: failed {}", self.family.name(), bad.join(", "))))
        }
    }

    pub fn get(&self, name: &str) -> &CMatrix {
        &self.matrices[name]
    }

    pub fn all_certified(&self) -> bool {
        self.certified.iter().all(|c| c.passed)
    }
}

fn certify_drazin(inst: &mut GeneratedInstance, name: &str, a: &CMatrix, p: usize, policy: &NumericPolicy) {
    match core_nilpotent_decompose(a, policy) {
        Ok(dd) => {
            inst.certify(format!("index({name}) = {p}"), (dd.p as f64 - p as f64).abs(), 0.0);
            inst.certify(format!("drazin axioms({name})"), axiom_residuals(a, &dd.a_d, dd.p).max(), axiom_tolerance(a, dd.p, policy));
        }
        Err(e) => inst.certify(format!("decomposition({name}): {e}"), f64::INFINITY, 0.0),
    }
}

/// Options for Drazin block construction beyond the shape.
#[derive(Clone, Copy, Debug)]
pub struct BlockOptions {
    pub conjugate: bool,
    pub spectrum: CoreSpectrum,
    pub jordan_max: usize,
    pub unitary_frame: bool,
}

impl Default for BlockOptions {
    fn default() -> Self {
        BlockOptions { conjugate: true, spectrum: CoreSpectrum::General, jordan_max: 1, unitary_frame: false }
    }
}

/// `A = U (A1 ⊕ A2) U*` with `A1` an invertible core and `A2` nilpotent of
/// order `p`; `U = I` unless `opts.conjugate`.
pub fn drazin_block_with<R: Rng>(n1: usize, n2: usize, p: usize, opts: BlockOptions, rng: &mut R) -> Result<GeneratedInstance> {
    let valid = (n2 == 0 && p == 0) || (n2 >= 1 && p >= 1 && p <= n2);
    if !valid || n1 + n2 == 0 {
        return Err(Error::InvalidOrder(format!("drazin block needs n2 >= p >= 1 or n2 = p = 0 (got n1={n1}, n2={n2}, p={p})")));
    }
    let policy = NumericPolicy::default();
    let a1 = core_matrix(n1, opts.spectrum, opts.jordan_max, opts.unitary_frame, rng);
    let a2 = if n2 == 0 { CMatrix::zeros(0, 0) } else { nilpotent_matrix(n2, p, true, rng)? };
    let u = if opts.conjugate { haar_unitary(n1 + n2, rng) } else { CMatrix::identity(n1 + n2) };
    let a = &(&u * &a1.direct_sum(&a2)) * &u.adjoint();
    let mut inst = GeneratedInstance::new(Family::DrazinBlock);
    inst.constructed_index = Some(p);
    certify_drazin(&mut inst, "A", &a, p, &policy);
    inst.put("A", a).put("A1", a1).put("A2", a2).put("U", u);
    inst.finish()
}

/// Seeded Drazin block with a general, well-conditioned core.
pub fn make_drazin_block(n1: usize, n2: usize, p: usize, seed: u64, conjugate: bool) -> Result<GeneratedInstance> {
    drazin_block_with(n1, n2, p, BlockOptions { conjugate, ..BlockOptions::default() }, &mut rng_for(seed, 0))
}

/// Shape of a commuting pair with `AB = BA = 0`.
#[derive(Clone, Copy, Debug)]
pub struct AbZeroShape {
    /// Size of `A`'s core.
    pub n1: usize,
    /// Size of the shared nilpotent region; `A2` takes the first half and
    /// `B`'s nilpotent part the second.
    pub n2: usize,
    /// Size of an invertible block of `B` where `A` vanishes.
    pub b_core: usize,
    pub spectrum_a: CoreSpectrum,
    pub spectrum_b: CoreSpectrum,
    pub conjugate: bool,
}

/// `A = A1 ⊕ A2 ⊕ 0 ⊕ 0` and `B = 0 ⊕ 0 ⊕ N_B ⊕ B1` on disjoint coordinate
/// blocks, under a shared optional unitary. `AB = BA = [A, B] = 0`.
pub fn ab_zero_pair_with<R: Rng>(shape: AbZeroShape, rng: &mut R) -> Result<GeneratedInstance> {
    let AbZeroShape { n1, n2, b_core, .. } = shape;
    if n2 < 2 {
        return Err(Error::InvalidOrder(format!("the nilpotent region needs n2 >= 2 (got {n2})")));
    }
    let policy = NumericPolicy::default();
    let ha = n2.div_ceil(2);
    let hb = n2 - ha;
    let qa = rng.random_range(1..=ha);
    let qb = rng.random_range(1..=hb);
    let a1 = core_matrix(n1, shape.spectrum_a, 1, true, rng);
    let a2 = nilpotent_matrix(ha, qa, false, rng)?;
    let nb = nilpotent_matrix(hb, qb, false, rng)?;
    let b1 = core_matrix(b_core, shape.spectrum_b, 1, true, rng);
    let a = CMatrix::block_diag(&[&a1, &a2, &CMatrix::zeros(hb, hb), &CMatrix::zeros(b_core, b_core)]);
    let b = CMatrix::block_diag(&[&CMatrix::zeros(n1, n1), &CMatrix::zeros(ha, ha), &nb, &b1]);
    let n = a.rows();
    let u = if shape.conjugate { haar_unitary(n, rng) } else { CMatrix::identity(n) };
    let conj = |m: &CMatrix| &(&u * m) * &u.adjoint();
    let (a, b) = (conj(&a), conj(&b));
    let scale = a.frobenius_norm() * b.frobenius_norm();
    let mut inst = GeneratedInstance::new(Family::AbZeroPair);
    inst.certify("AB = 0", (&a * &b).frobenius_norm(), policy.tolerance(scale));
    inst.certify("BA = 0", (&b * &a).frobenius_norm(), policy.tolerance(scale));
    inst.certify("[A,B] = 0", a.commutator(&b)?.frobenius_norm(), policy.tolerance(scale));
    // both operators vanish on some coordinate block, so each index is its nilpotent order
    certify_drazin(&mut inst, "A", &a, qa, &policy);
    certify_drazin(&mut inst, "B", &b, qb, &policy);
    inst.constructed_index = Some(qa);
    inst.put("A", a).put("B", b).put("U", u);
    inst.finish()
}

/// Seeded pair with `A = A1 ⊕ A2`, `B = 0 ⊕ B22`, disjoint nilpotent
/// supports, and an invertible block of `B` of size `b_core` (zero gives
/// a purely nilpotent `B`).
pub fn make_ab_zero_pair(n1: usize, n2: usize, b_core: usize, seed: u64) -> Result<GeneratedInstance> {
    let shape = AbZeroShape {
        n1,
        n2,
        b_core,
        spectrum_a: CoreSpectrum::General,
        spectrum_b: CoreSpectrum::General,
        conjugate: false,
    };
    ab_zero_pair_with(shape, &mut rng_for(seed, 0))
}

/// Which class the quadruple's weights are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    /// `X ∈ ker Δ^m_{A_d*,A}`, `Y ∈ ker Δ^n_{B_d*,B}`.
    DrazinAdjointTriangle,
    /// `X ∈ ker δ^m_{A*,A}`, `Y ∈ ker δ^n_{B*,B}`.
    AdjointDelta,
    /// `X ∈ ker Δ^m_{A*,A}`, `Y ∈ ker Δ^n_{B*,B}`.
    AdjointTriangle,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadrupleSpec {
    /// Size of the block where `A` is structured and `B` is scalar.
    pub na: usize,
    /// Size of the block where `B` is structured and `A` is scalar.
    pub nb: usize,
    pub m: usize,
    pub n: usize,
    pub weights: WeightKind,
    pub conjugate: bool,
}

const RETRY_LIMIT: usize = 24;

/// Random unit-norm combination of a kernel basis; `None` for an empty kernel.
pub fn sample_kernel<R: Rng>(
    kind: TransformKind,
    b: &CMatrix,
    a: &CMatrix,
    m: usize,
    policy: &NumericPolicy,
    rng: &mut R,
) -> Result<Option<CMatrix>> {
    let k = kernel(kind, b, a, m, policy)?;
    if k.dim == 0 {
        return Ok(None);
    }
    let coeffs: Vec<C64> = (0..k.dim).map(|_| c64(gauss(rng), gauss(rng))).collect();
    let x = k.combine(&coeffs).expect("nonempty basis");
    let nrm = x.frobenius_norm();
    Ok(Some(x.scale_real(1.0 / nrm)))
}

fn structured_block<R: Rng>(size: usize, weights: WeightKind, rng: &mut R) -> Result<CMatrix> {
    // roughly half core, half nilpotent; at least one core coordinate
    let core = size.div_ceil(2).max(1);
    let nil = size - core;
    let p = if nil == 0 { 0 } else { rng.random_range(1..=nil.min(2)) };
    let spectrum = match weights {
        WeightKind::AdjointTriangle => CoreSpectrum::UnitCircle,
        _ if rng.random::<bool>() => CoreSpectrum::Selfadjoint,
        _ => CoreSpectrum::RealNonnormal,
    };
    let opts = BlockOptions { conjugate: true, spectrum, jordan_max: 2, unitary_frame: true };
    Ok(drazin_block_with(core, nil, p, opts, rng)?.get("A").clone())
}

fn weight_for<R: Rng>(a: &CMatrix, order: usize, weights: WeightKind, policy: &NumericPolicy, rng: &mut R) -> Result<Option<CMatrix>> {
    match weights {
        WeightKind::DrazinAdjointTriangle => {
            let dd = core_nilpotent_decompose(a, policy)?;
            sample_kernel(TransformKind::Triangle, &dd.a_d.adjoint(), a, order, policy, rng)
        }
        WeightKind::AdjointDelta => sample_kernel(TransformKind::Delta, &a.adjoint(), a, order, policy, rng),
        WeightKind::AdjointTriangle => sample_kernel(TransformKind::Triangle, &a.adjoint(), a, order, policy, rng),
    }
}

fn nonzero_real<R: Rng>(rng: &mut R) -> f64 {
    sign(rng) * rng.random_range(0.5..2.0)
}

/// Quadruple satisfying `[X,Y] = [A,B] = [A*,Y] = [B*,X] = 0`:
/// `A = A_a ⊕ aI`, `B = bI ⊕ B_b`, `X = X_a ⊕ I`, `Y = I ⊕ Y_b` with real
/// `a, b` and kernel-sampled `X_a`, `Y_b`, under a shared unitary.
pub fn hypothesis1_quadruple_with<R: Rng>(spec: QuadrupleSpec, rng: &mut R) -> Result<GeneratedInstance> {
    if spec.na == 0 || spec.nb == 0 || spec.m == 0 || spec.n == 0 {
        return Err(Error::InvalidOrder("quadruple needs positive block sizes and orders".into()));
    }
    let policy = NumericPolicy::default();
    for _ in 0..RETRY_LIMIT {
        let aa = structured_block(spec.na, spec.weights, rng)?;
        let bb = structured_block(spec.nb, spec.weights, rng)?;
        let (Some(xa), Some(yb)) =
            (weight_for(&aa, spec.m, spec.weights, &policy, rng)?, weight_for(&bb, spec.n, spec.weights, &policy, rng)?)
        else {
            continue;
        };
        // unimodular scalars keep the scalar blocks isometric; real ones keep them selfadjoint
        let (a_s, b_s) = match spec.weights {
            WeightKind::AdjointTriangle => (unit_phase(rng), unit_phase(rng)),
            _ => (c64(nonzero_real(rng), 0.0), c64(nonzero_real(rng), 0.0)),
        };
        let ia = CMatrix::identity(spec.na);
        let ib = CMatrix::identity(spec.nb);
        let a = aa.direct_sum(&CMatrix::scalar_identity(spec.nb, a_s));
        let b = CMatrix::scalar_identity(spec.na, b_s).direct_sum(&bb);
        let x = xa.direct_sum(&ib);
        let y = ia.direct_sum(&yb);
        let n = a.rows();
        let u = if spec.conjugate { haar_unitary(n, rng) } else { CMatrix::identity(n) };
        let conj = |m: &CMatrix| &(&u * m) * &u.adjoint();
        let (a, b, x, y) = (conj(&a), conj(&b), conj(&x), conj(&y));

        let mut inst = GeneratedInstance::new(Family::Hypothesis1);
        let sc = |p: &CMatrix, q: &CMatrix| policy.tolerance(p.frobenius_norm() * q.frobenius_norm());
        inst.certify("[X,Y] = 0", x.commutator(&y)?.frobenius_norm(), sc(&x, &y));
        inst.certify("[A,B] = 0", a.commutator(&b)?.frobenius_norm(), sc(&a, &b));
        inst.certify("[A*,Y] = 0", a.adjoint().commutator(&y)?.frobenius_norm(), sc(&a, &y));
        inst.certify("[B*,X] = 0", b.adjoint().commutator(&x)?.frobenius_norm(), sc(&b, &x));
        let (hx, hy) = hypothesis_defects(&a, &b, &x, &y, spec, &policy)?;
        inst.certify("weight hypothesis on X", hx.0, hx.1);
        inst.certify("weight hypothesis on Y", hy.0, hy.1);
        if x.frobenius_norm() == 0.0 || y.frobenius_norm() == 0.0 || (&x * &y).frobenius_norm() <= policy.atol {
            inst.flags.push("trivial weight".into());
        }
        inst.put("A", a).put("B", b).put("X", x).put("Y", y).put("U", u);
        if inst.all_certified() {
            return Ok(inst);
        }
    }
    Err(Error::GenerationFailed(format!("hypothesis-(1) quadruple: retry limit {RETRY_LIMIT} exhausted")))
}

/// `(residual, tolerance)` of the weight hypotheses on `X` and `Y`.
fn hypothesis_defects(
    a: &CMatrix,
    b: &CMatrix,
    x: &CMatrix,
    y: &CMatrix,
    spec: QuadrupleSpec,
    policy: &NumericPolicy,
) -> Result<((f64, f64), (f64, f64))> {
    let one = |op: &CMatrix, w: &CMatrix, order: usize| -> Result<(f64, f64)> {
        let (left, kind) = match spec.weights {
            WeightKind::DrazinAdjointTriangle => (core_nilpotent_decompose(op, policy)?.a_d.adjoint(), TransformKind::Triangle),
            WeightKind::AdjointDelta => (op.adjoint(), TransformKind::Delta),
            WeightKind::AdjointTriangle => (op.adjoint(), TransformKind::Triangle),
        };
        let d = crate::elemops::transform(kind, &left, op, w, order)?;
        Ok((d.frobenius_norm(), policy.tolerance(transform_scale(&left, op, w.frobenius_norm(), order))))
    };
    Ok((one(a, x, spec.m)?, one(b, y, spec.n)?))
}

/// Seeded hypothesis-(1) quadruple.
pub fn make_hypothesis1_quadruple(spec: QuadrupleSpec, seed: u64) -> Result<GeneratedInstance> {
    hypothesis1_quadruple_with(spec, &mut rng_for(seed, 0))
}

/// The fixed converse-failure instance: `A = diag(1, 2) ⊕ E12`,
/// `X = I_2 ⊕ I_2`.
pub fn remark3_fixture() -> (CMatrix, CMatrix) {
    let a = CMatrix::real_diag(&[1.0, 2.0]).direct_sum(&CMatrix::unit(2, 0, 1));
    (a, CMatrix::identity(4))
}

/// Builds `(A, X) = (A1 ⊕ N2, X11 ⊕ I_2)` and certifies the converse
/// failure: `δ³_{A*,A}(X) ≈ 0` but `Δ³_{A_d*,A}(X)` bounded away from 0.
fn remark3_certify(inst: &mut GeneratedInstance, a: &CMatrix, x: &CMatrix, policy: &NumericPolicy) -> Result<()> {
    let dd = core_nilpotent_decompose(a, policy)?;
    let d3 = selfadjoint_defect(a, x, 3)?;
    let t3 = triangle(&dd.a_d.adjoint(), a, x, 3)?;
    inst.certify("delta^3_{A*,A}(X) = 0", d3.frobenius_norm(), 1e-10);
    inst.certify_at_least("||triangle^3_{A_d*,A}(X)|| >= 0.5", t3.frobenius_norm(), 0.5);
    Ok(())
}

/// Seeded converse-failure instance with `A1` a real diagonal with
/// distinct nonzero entries, `X11` a real diagonal and `N2 = αE12`.
pub fn remark3_with<R: Rng>(n1: usize, rng: &mut R) -> Result<GeneratedInstance> {
    if n1 == 0 {
        return Err(Error::InvalidOrder("the core block needs n1 >= 1".into()));
    }
    let policy = NumericPolicy::default();
    let mut diag: Vec<f64> = Vec::new();
    while diag.len() < n1 {
        let v = nonzero_real(rng);
        if diag.iter().all(|d| (d - v).abs() >= 0.15) {
            diag.push(v);
        }
    }
    let xd: Vec<f64> = (0..n1).map(|_| rng.random_range(0.5..1.5)).collect();
    let alpha = unit_phase(rng) * rng.random_range(0.5..1.0);
    let mut n2 = CMatrix::zeros(2, 2);
    n2.set(0, 1, alpha);
    let a = CMatrix::real_diag(&diag).direct_sum(&n2);
    let x = CMatrix::real_diag(&xd).direct_sum(&CMatrix::identity(2));
    let mut inst = GeneratedInstance::new(Family::Remark3);
    inst.constructed_index = Some(2);
    remark3_certify(&mut inst, &a, &x, &policy)?;
    inst.put("A", a).put("X", x);
    inst.finish()
}

pub fn make_remark3_counterexample(seed: u64) -> Result<GeneratedInstance> {
    remark3_with(2, &mut rng_for(seed, 0))
}

/// `A = sI + N` with `N` nilpotent of order `q`. Certifies
/// `(2q−1)`-selfadjointness for real `s` and `(2q−1)`-isometry for `|s| = 1`.
pub fn scalar_plus_nilpotent_with<R: Rng>(n: usize, q: usize, s: C64, rng: &mut R) -> Result<GeneratedInstance> {
    let policy = NumericPolicy::default();
    let nm = nilpotent_matrix(n, q, true, rng)?;
    let a = &CMatrix::scalar_identity(n, s) + &nm;
    let i = CMatrix::identity(n);
    let order = 2 * q - 1;
    let mut inst = GeneratedInstance::new(Family::ScalarPlusNilpotent);
    inst.constructed_index = Some(if s.norm() == 0.0 { q } else { 0 });
    if s.im == 0.0 {
        let d = selfadjoint_defect(&a, &i, order)?;
        inst.certify(format!("{order}-selfadjoint"), d.frobenius_norm(), policy.tolerance(transform_scale(&a.adjoint(), &a, i.frobenius_norm(), order)));
    }
    if (s.norm() - 1.0).abs() <= 1e-14 {
        let d = isometry_defect(&a, &i, order)?;
        inst.certify(format!("{order}-isometric"), d.frobenius_norm(), policy.tolerance(transform_scale(&a.adjoint(), &a, i.frobenius_norm(), order)));
    }
    let no = nilpotency_order(&nm, &policy);
    inst.certify(format!("N is {q}-nilpotent"), if no == Some(q) { 0.0 } else { 1.0 }, 0.0);
    inst.put("A", a).put("N", nm).put("S", CMatrix::scalar_identity(n, s));
    inst.finish()
}

pub fn make_scalar_plus_nilpotent(n: usize, q: usize, s: C64, seed: u64) -> Result<GeneratedInstance> {
    scalar_plus_nilpotent_with(n, q, s, &mut rng_for(seed, 0))
}

/// Invertible pair `A = P D P⁻¹`, `B = Q E Q⁻¹` (diagonal `D`, `E`) whose
/// eigenvalues are coupled so that the transform of `kind` has a nontrivial
/// kernel: some `E_i = 1/D_j` for `Triangle`, some `E_i = D_j` for `Delta`.
pub fn coupled_pair<R: Rng>(n: usize, kind: TransformKind, rng: &mut R) -> (CMatrix, CMatrix) {
    let mut d: Vec<C64> = Vec::new();
    while d.len() < n {
        let z = C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
        if well_separated(&d, z) {
            d.push(z);
        }
    }
    let couplings = rng.random_range(1..=n);
    let mut e: Vec<C64> = Vec::new();
    for (k, dk) in d.iter().enumerate() {
        let v = if k < couplings {
            match kind {
                TransformKind::Triangle => c64(1.0, 0.0) / dk,
                TransformKind::Delta => *dk,
            }
        } else {
            C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU))
        };
        e.push(v);
    }
    let policy = NumericPolicy::default();
    let p = conditioned_matrix(n, 0.7, 1.4, rng);
    let q = conditioned_matrix(n, 0.7, 1.4, rng);
    let a = &(&p * &CMatrix::diag(&d)) * &p.inverse(&policy).expect("well conditioned");
    let b = &(&q * &CMatrix::diag(&e)) * &q.inverse(&policy).expect("well conditioned");
    (a, b)
}

/// The families reachable from [`generate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Unitary,
    Nilpotent,
    Invertible,
    DrazinBlock,
    AbZeroPair,
    Hypothesis1,
    Remark3,
    ScalarPlusNilpotent,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Unitary,
        Family::Nilpotent,
        Family::Invertible,
        Family::DrazinBlock,
        Family::AbZeroPair,
        Family::Hypothesis1,
        Family::Remark3,
        Family::ScalarPlusNilpotent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Unitary => "unitary",
            Family::Nilpotent => "nilpotent",
            Family::Invertible => "invertible",
            Family::DrazinBlock => "drazin-block",
            Family::AbZeroPair => "ab-zero-pair",
            Family::Hypothesis1 => "hypothesis1",
            Family::Remark3 => "remark3",
            Family::ScalarPlusNilpotent => "scalar-plus-nilpotent",
        }
    }

    /// One-line description of the expected `dims` / `orders` arity.
    pub fn usage(self) -> &'static str {
        match self {
            Family::Unitary | Family::Invertible => "--dims n",
            Family::Nilpotent => "--dims n --orders q",
            Family::DrazinBlock => "--dims n1,n2 --orders p",
            Family::AbZeroPair => "--dims n1,n2[,b_core]",
            Family::Hypothesis1 => "--dims na,nb --orders m,n",
            Family::Remark3 => "[--dims n1]",
            Family::ScalarPlusNilpotent => "--dims n --orders q [--scalar re,im]",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
            Error::Parse(format!("unknown family '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

/// Family plus shape parameters and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub dims: Vec<usize>,
    pub orders: Vec<usize>,
    pub seed: u64,
    /// Scalar for `scalar-plus-nilpotent`, default `1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<[f64; 2]>,
}

impl InstanceSpec {
    /// Seed 0, no scalar.
    pub fn new(family: Family, dims: Vec<usize>, orders: Vec<usize>) -> Self {
        InstanceSpec { family, dims, orders, seed: 0, scalar: None }
    }
}

fn arity(spec: &InstanceSpec, dims: usize, orders: usize) -> Result<()> {
    if spec.dims.len() != dims || spec.orders.len() != orders {
        return Err(Error::InvalidOrder(format!(
            "{} expects {} (got {} dims, {} orders)",
            spec.family.name(),
            spec.family.usage(),
            spec.dims.len(),
            spec.orders.len()
        )));
    }
    if spec.dims.iter().any(|&d| d == 0) && spec.family != Family::DrazinBlock && spec.family != Family::AbZeroPair {
        return Err(Error::InvalidOrder("dimensions must be positive".into()));
    }
    Ok(())
}

/// Dispatches an [`InstanceSpec`] to its generator.
pub fn generate(spec: &InstanceSpec) -> Result<GeneratedInstance> {
    let policy = NumericPolicy::default();
    let mut rng = rng_for(spec.seed, 0);
    match spec.family {
        Family::Unitary => {
            arity(spec, 1, 0)?;
            let u = haar_unitary(spec.dims[0], &mut rng);
            let mut inst = GeneratedInstance::new(Family::Unitary);
            inst.constructed_index = Some(0);
            let d = isometry_defect(&u, &CMatrix::identity(u.rows()), 1)?;
            inst.certify("1-isometric", d.frobenius_norm(), 1e-12);
            inst.put("A", u);
            inst.finish()
        }
        Family::Invertible => {
            arity(spec, 1, 0)?;
            let a = invertible_matrix(spec.dims[0], &mut rng);
            let mut inst = GeneratedInstance::new(Family::Invertible);
            inst.constructed_index = Some(0);
            inst.certify_at_least("inverse condition", 1.0 / a.condition_number(), 1.0 / 100.0);
            certify_drazin(&mut inst, "A", &a, 0, &policy);
            inst.put("A", a);
            inst.finish()
        }
        Family::Nilpotent => {
            arity(spec, 1, 1)?;
            let (n, q) = (spec.dims[0], spec.orders[0]);
            let nm = nilpotent_matrix(n, q, true, &mut rng)?;
            let mut inst = GeneratedInstance::new(Family::Nilpotent);
            inst.constructed_index = Some(q);
            let norm = nm.frobenius_norm();
            inst.certify(format!("N^{q} = 0"), nm.power(q)?.frobenius_norm(), policy.tolerance(norm.powi(q as i32)));
            if q >= 2 {
                inst.certify_at_least(format!("rank N^{} >= 1", q - 1), nm.power(q - 1)?.rank(&policy) as f64, 1.0);
            }
            certify_drazin(&mut inst, "A", &nm, q, &policy);
            inst.put("A", nm);
            inst.finish()
        }
        Family::DrazinBlock => {
            arity(spec, 2, 1)?;
            drazin_block_with(spec.dims[0], spec.dims[1], spec.orders[0], BlockOptions::default(), &mut rng)
        }
        Family::AbZeroPair => {
            if !(spec.dims.len() == 2 || spec.dims.len() == 3) || !spec.orders.is_empty() {
                return Err(Error::InvalidOrder(format!("ab-zero-pair expects {}", Family::AbZeroPair.usage())));
            }
            let shape = AbZeroShape {
                n1: spec.dims[0],
                n2: spec.dims[1],
                b_core: spec.dims.get(2).copied().unwrap_or(0),
                spectrum_a: CoreSpectrum::General,
                spectrum_b: CoreSpectrum::General,
                conjugate: false,
            };
            ab_zero_pair_with(shape, &mut rng)
        }
        Family::Hypothesis1 => {
            arity(spec, 2, 2)?;
            let q = QuadrupleSpec {
                na: spec.dims[0],
                nb: spec.dims[1],
                m: spec.orders[0],
                n: spec.orders[1],
                weights: WeightKind::DrazinAdjointTriangle,
                conjugate: true,
            };
            hypothesis1_quadruple_with(q, &mut rng)
        }
        Family::Remark3 => {
            if spec.dims.len() > 1 || !spec.orders.is_empty() {
                return Err(Error::InvalidOrder(format!("remark3 expects {}", Family::Remark3.usage())));
            }
            remark3_with(spec.dims.first().copied().unwrap_or(2), &mut rng)
        }
        Family::ScalarPlusNilpotent => {
            arity(spec, 1, 1)?;
            let s = spec.scalar.map_or(c64(1.0, 0.0), |[re, im]| c64(re, im));
            scalar_plus_nilpotent_with(spec.dims[0], spec.orders[0], s, &mut rng)
        }
    }
}

/// Δ and δ defects at order `m` of a weight against a pair, for callers
/// that want both numbers at once.
pub fn both_defects(b: &CMatrix, a: &CMatrix, x: &CMatrix, m: usize) -> Result<(f64, f64)> {
    Ok((triangle(b, a, x, m)?.frobenius_norm(), delta(b, a, x, m)?.frobenius_norm()))
}

/// Drazin index certified by the drazin module, for external re-checks.
pub fn certified_index(a: &CMatrix) -> Result<usize> {
    index_of(a, &NumericPolicy::default())
}

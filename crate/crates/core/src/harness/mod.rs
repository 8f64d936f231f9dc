//! Property suites: one per identity, implication or counterexample.
//!
//! Each suite runs `trials` independent seeded trials. A trial draws an
//! instance, certifies the hypotheses it relies on (a failed hypothesis
//! discards the trial as skipped), then checks the conclusions. Trials run
//! in parallel on counter-split RNG streams, so reports are identical for
//! serial and parallel execution.

mod basic;
mod products;
mod structure;

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elemops::{transform, transform_scale, TransformKind};
use crate::error::{Error, Result};
use crate::genx::rng_for;
use crate::matcore::{CMatrix, NumericPolicy};

/// Every available suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Prop1,
    Prop2,
    Remark1,
    Cor1,
    Remark2,
    NoLeftMInv,
    Thm1,
    Remark3,
    Thm2,
    Thm3,
    Thm4,
    Thm5,
    DrazinAxioms,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::DrazinAxioms,
        Suite::Prop1,
        Suite::Prop2,
        Suite::Remark1,
        Suite::Cor1,
        Suite::Remark2,
        Suite::NoLeftMInv,
        Suite::Thm1,
        Suite::Remark3,
        Suite::Thm2,
        Suite::Thm3,
        Suite::Thm4,
        Suite::Thm5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Prop1 => "prop1",
            Suite::Prop2 => "prop2",
            Suite::Remark1 => "remark1",
            Suite::Cor1 => "cor1",
            Suite::Remark2 => "remark2",
            Suite::NoLeftMInv => "no_left_m_inv",
            Suite::Thm1 => "thm1",
            Suite::Remark3 => "remark3",
            Suite::Thm2 => "thm2",
            Suite::Thm3 => "thm3",
            Suite::Thm4 => "thm4",
            Suite::Thm5 => "thm5",
            Suite::DrazinAxioms => "drazin_axioms",
        }
    }

    /// What the suite checks, in one line.
    pub fn summary(self) -> &'static str {
        match self {
            Suite::Prop1 => "vanishing defects persist to higher orders and survive inverting both operators",
            Suite::Prop2 => "products and sums of weighted m-selfadjoint commuting pairs; commuting nilpotent perturbation",
            Suite::Remark1 => "products of left-(X,m)-invertible pairs; nilpotent perturbation of such pairs",
            Suite::Cor1 => "shared-weight products and sums of weighted m-selfadjoint commuting operators",
            Suite::Remark2 => "delta_{A,A}(I) = 0; 2-selfadjoint iff selfadjoint; spectrum when delta_{A_d*,A}(I) = 0",
            Suite::NoLeftMInv => "no Drazin invertible A is left-m-invertible by A_d or A_d*",
            Suite::Thm1 => "left-(X,m)-invertible weights are supported on the core; four triangle => delta implications",
            Suite::Remark3 => "the converse implications fail; delta_{A,A} kernels carry a nilpotent-block component",
            Suite::Thm2 => "commuting core-invertible weight forces (m+2p-2)-selfadjointness",
            Suite::Thm3 => "hypothesis-(1) quadruples: AB and A+B are (XY, m+n-1)-selfadjoint",
            Suite::Thm4 => "with AB = 0: ((A+B)_d*, A+B) is an (XY, m+n-1)-adjoint pair",
            Suite::Thm5 => "with AB = 0: A+B is (XY, m+n-1)-isometric and ((A+B)_d*, A+B) is an adjoint pair",
            Suite::DrazinAxioms => "Drazin axioms and index recovery on every generator family",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub trials: usize,
    pub dim_max: usize,
    pub order_max: usize,
    pub seed: u64,
    pub policy: NumericPolicy,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig { suite, trials: 200, dim_max: 6, order_max: 4, seed: 0, policy: NumericPolicy::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidOrder("trials must be at least 1".into()));
        }
        if self.dim_max < 2 {
            return Err(Error::InvalidOrder("dim_max must be at least 2".into()));
        }
        if self.order_max == 0 {
            return Err(Error::InvalidOrder("order_max must be at least 1".into()));
        }
        self.policy.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    /// `None` for suite-level failures such as an exhausted skip budget.
    pub trial: Option<usize>,
    pub instance: String,
    pub clause: String,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: SuiteConfig,
    pub trials: usize,
    pub passes: usize,
    pub skips: usize,
    pub generation_failures: usize,
    pub failures: Vec<FailureRecord>,
    /// Largest residual among all vanishing claims.
    pub max_residual: f64,
    /// Largest residual-to-tolerance ratio among all vanishing claims.
    pub max_ratio: f64,
    /// Trials whose weights were numerically zero where it matters.
    pub trivial_weights: usize,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// One human-readable line.
    pub fn summary_line(&self) -> String {
        format!(
            "{:<14} {:<4} trials={} passes={} skips={} genfail={} failures={} max_residual={:.2e} max_ratio={:.2e}",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" },
            self.trials,
            self.passes,
            self.skips,
            self.generation_failures,
            self.failures.len(),
            self.max_residual,
            self.max_ratio
        )
    }
}

#[derive(Clone, Debug)]
struct Check {
    clause: String,
    residual: f64,
    tolerance: f64,
    /// `true` for "residual ≤ tolerance" claims, `false` for lower bounds.
    vanishing: bool,
    passed: bool,
}

/// Per-trial state handed to suite bodies.
pub(crate) struct Trial {
    pub idx: usize,
    pub rng: ChaCha8Rng,
    pub policy: NumericPolicy,
    pub dim_max: usize,
    pub order_max: usize,
    instance: String,
    checks: Vec<Check>,
    skipped: Option<String>,
    notes: Vec<String>,
    trivial: bool,
}

impl Trial {
    fn new(cfg: &SuiteConfig, idx: usize) -> Self {
        let stream = ((cfg.suite as u64) << 32) | idx as u64;
        Trial {
            idx,
            rng: rng_for(cfg.seed, stream),
            policy: cfg.policy,
            dim_max: cfg.dim_max,
            order_max: cfg.order_max,
            instance: format!("seed={} stream={stream}", cfg.seed),
            checks: Vec::new(),
            skipped: None,
            notes: Vec::new(),
            trivial: false,
        }
    }

    /// Appends `key=value` style text to the instance description.
    pub fn describe(&mut self, text: impl AsRef<str>) {
        self.instance.push(' ');
        self.instance.push_str(text.as_ref());
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn flag_trivial(&mut self) {
        self.trivial = true;
    }

    /// Uniform in `lo..=max(lo, dim_max)`.
    pub fn dim(&mut self, lo: usize) -> usize {
        let hi = self.dim_max.max(lo);
        self.rng.random_range(lo..=hi)
    }

    /// Uniform in `1..=order_max`.
    pub fn order(&mut self) -> usize {
        self.rng.random_range(1..=self.order_max)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random::<bool>()
    }

    pub fn tol(&self, scale: f64) -> f64 {
        self.policy.tolerance(scale)
    }

    /// Records `residual ≤ tolerance`.
    pub fn zero(&mut self, clause: impl Into<String>, residual: f64, tolerance: f64) -> bool {
        let passed = residual <= tolerance;
        self.checks.push(Check { clause: clause.into(), residual, tolerance, vanishing: true, passed });
        passed
    }

    /// Records `value ≥ threshold`.
    pub fn at_least(&mut self, clause: impl Into<String>, value: f64, threshold: f64) -> bool {
        let passed = value >= threshold;
        self.checks.push(Check { clause: clause.into(), residual: value, tolerance: threshold, vanishing: false, passed });
        passed
    }

    /// Records a yes/no claim.
    pub fn holds(&mut self, clause: impl Into<String>, ok: bool) -> bool {
        self.zero(clause, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    /// A hypothesis `residual ≤ tolerance`; on failure the trial is skipped.
    pub fn hypothesis(&mut self, clause: impl Into<String>, residual: f64, tolerance: f64) -> bool {
        if residual <= tolerance {
            return true;
        }
        if self.skipped.is_none() {
            self.skipped = Some(format!("{} (residual {residual:.2e} > {tolerance:.2e})", clause.into()));
        }
        false
    }

    pub fn skip(&mut self, reason: impl Into<String>) {
        if self.skipped.is_none() {
            self.skipped = Some(reason.into());
        }
    }

    /// Norm and scaled tolerance of `T^m_{B,A}(X)`.
    pub fn defect(&self, kind: TransformKind, b: &CMatrix, a: &CMatrix, x: &CMatrix, m: usize) -> Result<(f64, f64)> {
        let d = transform(kind, b, a, x, m)?;
        Ok((d.frobenius_norm(), self.tol(transform_scale(b, a, x.frobenius_norm(), m))))
    }

    /// Conclusion `T^m_{B,A}(X) ≈ 0`.
    pub fn transform_zero(
        &mut self,
        clause: impl Into<String>,
        kind: TransformKind,
        b: &CMatrix,
        a: &CMatrix,
        x: &CMatrix,
        m: usize,
    ) -> Result<bool> {
        let (r, t) = self.defect(kind, b, a, x, m)?;
        Ok(self.zero(clause, r, t))
    }

    /// Hypothesis `T^m_{B,A}(X) ≈ 0`.
    pub fn transform_hypothesis(
        &mut self,
        clause: impl Into<String>,
        kind: TransformKind,
        b: &CMatrix,
        a: &CMatrix,
        x: &CMatrix,
        m: usize,
    ) -> Result<bool> {
        let (r, t) = self.defect(kind, b, a, x, m)?;
        Ok(self.hypothesis(clause, r, t))
    }

    /// Hypothesis `[P, Q] ≈ 0` at scale `‖P‖‖Q‖`.
    pub fn commute_hypothesis(&mut self, clause: &str, p: &CMatrix, q: &CMatrix) -> Result<bool> {
        let r = p.commutator(q)?.frobenius_norm();
        let t = self.tol(p.frobenius_norm() * q.frobenius_norm());
        Ok(self.hypothesis(clause, r, t))
    }
}

enum Outcome {
    Pass,
    Fail,
    Skip,
    GenFailed,
}

struct TrialResult {
    outcome: Outcome,
    failures: Vec<FailureRecord>,
    max_residual: f64,
    max_ratio: f64,
    trivial: bool,
    notes: Vec<String>,
}

type SuiteBody = fn(&mut Trial) -> Result<()>;

fn body(suite: Suite) -> SuiteBody {
    match suite {
        Suite::DrazinAxioms => basic::drazin_axioms,
        Suite::Prop1 => basic::prop1,
        Suite::Remark2 => basic::remark2,
        Suite::NoLeftMInv => basic::no_left_m_inv,
        Suite::Thm1 => structure::thm1,
        Suite::Remark3 => structure::remark3,
        Suite::Thm2 => structure::thm2,
        Suite::Prop2 => products::prop2,
        Suite::Cor1 => products::cor1,
        Suite::Remark1 => products::remark1,
        Suite::Thm3 => products::thm3,
        Suite::Thm4 => products::thm4,
        Suite::Thm5 => products::thm5,
    }
}

fn run_trial(cfg: &SuiteConfig, idx: usize) -> TrialResult {
    let mut t = Trial::new(cfg, idx);
    let res = body(cfg.suite)(&mut t);
    let mut failures = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    for c in &t.checks {
        if c.vanishing && c.tolerance > 0.0 {
            max_residual = max_residual.max(c.residual);
            max_ratio = max_ratio.max(c.residual / c.tolerance);
        }
        if !c.passed {
            let mut residuals = BTreeMap::new();
            residuals.insert("residual".to_string(), c.residual);
            residuals.insert(if c.vanishing { "tolerance" } else { "threshold" }.to_string(), c.tolerance);
            failures.push(FailureRecord { trial: Some(idx), instance: t.instance.clone(), clause: c.clause.clone(), residuals });
        }
    }
    let outcome = match res {
        Err(Error::GenerationFailed(msg)) => {
            t.notes.push(format!("trial {idx}: generation failed: {msg}"));
            Outcome::GenFailed
        }
        Err(e) => {
            failures.push(FailureRecord {
                trial: Some(idx),
                instance: t.instance.clone(),
                clause: format!("error: {e}"),
                residuals: BTreeMap::new(),
            });
            Outcome::Fail
        }
        Ok(()) if !failures.is_empty() => Outcome::Fail,
        Ok(()) if t.skipped.is_some() => Outcome::Skip,
        Ok(()) => Outcome::Pass,
    };
    if let (Outcome::Skip, Some(reason)) = (&outcome, &t.skipped) {
        t.notes.push(format!("trial {idx} skipped: {reason}"));
    }
    TrialResult { outcome, failures, max_residual, max_ratio, trivial: t.trivial, notes: t.notes }
}

/// Notes kept per report; further ones are summarized by a count.
const NOTE_LIMIT: usize = 40;

/// Runs one suite.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let results: Vec<TrialResult> = (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect();
    let mut report = SuiteReport {
        suite: cfg.suite.name().to_string(),
        config: cfg.clone(),
        trials: cfg.trials,
        passes: 0,
        skips: 0,
        generation_failures: 0,
        failures: Vec::new(),
        max_residual: 0.0,
        max_ratio: 0.0,
        trivial_weights: 0,
        notes: Vec::new(),
        verdict: Verdict::Pass,
    };
    let mut dropped = 0usize;
    for r in results {
        match r.outcome {
            Outcome::Pass => report.passes += 1,
            Outcome::Skip => report.skips += 1,
            Outcome::GenFailed => report.generation_failures += 1,
            Outcome::Fail => {}
        }
        report.failures.extend(r.failures);
        report.max_residual = report.max_residual.max(r.max_residual);
        report.max_ratio = report.max_ratio.max(r.max_ratio);
        report.trivial_weights += r.trivial as usize;
        for n in r.notes {
            if report.notes.len() < NOTE_LIMIT {
                report.notes.push(n);
            } else {
                dropped += 1;
            }
        }
    }
    if report.trivial_weights > 0 {
        report.notes.insert(
            0,
            format!("{} of {} trials had a product weight XY that is numerically zero", report.trivial_weights, report.trials),
        );
    }
    if dropped > 0 {
        report.notes.push(format!("{dropped} further notes omitted"));
    }
    let discarded = report.skips + report.generation_failures;
    if 2 * discarded > report.trials {
        let mut residuals = BTreeMap::new();
        residuals.insert("discarded".to_string(), discarded as f64);
        residuals.insert("trials".to_string(), report.trials as f64);
        report.failures.push(FailureRecord {
            trial: None,
            instance: "suite".into(),
            clause: "more than half of the trials were skipped or failed to generate".into(),
            residuals,
        });
    }
    report.verdict = if report.failures.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

/// Runs several suites with shared settings.
pub fn run_suites(suites: &[Suite], template: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    suites.iter().map(|&s| run_suite(&SuiteConfig { suite: s, ..template.clone() })).collect()
}

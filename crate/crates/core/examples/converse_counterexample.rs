// A = diag(1, 2) ⊕ E12 with X = I is (X,3)-selfadjoint, yet (A_d*, A) is
// not left-(X,3)-invertible.

use opcheck::drazin::core_nilpotent_decompose;
use opcheck::elemops::{delta, triangle};
use opcheck::genx::{make_remark3_counterexample, remark3_fixture};
use opcheck::{CMatrix, NumericPolicy, Result};

fn report(label: &str, a: &CMatrix, x: &CMatrix) -> Result<()> {
    let dd = core_nilpotent_decompose(a, &NumericPolicy::default())?;
    let d3 = delta(&a.adjoint(), a, x, 3)?.frobenius_norm();
    let t3 = triangle(&dd.a_d.adjoint(), a, x, 3)?.frobenius_norm();
    println!("{label:<10} |delta^3_(A*,A)(X)| = {d3:.1e}   |triangle^3_(A_d*,A)(X)| = {t3:.4}");
    Ok(())
}

pub fn run() -> Result<()> {
    let (a, x) = remark3_fixture();
    report("fixture", &a, &x)?;
    for seed in 0..3 {
        let inst = make_remark3_counterexample(seed)?;
        report(&format!("seed {seed}"), inst.get("A"), inst.get("X"))?;
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}

// Minimal orders of m-isometry and m-selfadjointness for small fixtures.

use opcheck::classify::{minimal_order, MinimalOrder};
use opcheck::elemops::TransformKind;
use opcheck::genx::make_scalar_plus_nilpotent;
use opcheck::{c64, CMatrix, NumericPolicy, Result};

fn show(label: &str, kind: TransformKind, a: &CMatrix, x: &CMatrix, bound: usize) -> Result<()> {
    let res = minimal_order(kind, &a.adjoint(), a, x, bound, &NumericPolicy::default())?;
    let order = match res.minimal_order {
        MinimalOrder::Found(m) => m.to_string(),
        MinimalOrder::NotFound { bound } => format!("none <= {bound}"),
    };
    let table: Vec<String> = res.residuals.iter().map(|r| format!("{r:.1e}")).collect();
    println!("{label:<32} {:<9} order {order:<10} residuals [{}]", kind.name(), table.join(", "));
    Ok(())
}

pub fn run() -> Result<()> {
    let jordan = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
    let i2 = CMatrix::identity(2);
    show("[[1,1],[0,1]]", TransformKind::Triangle, &jordan, &i2, 6)?;
    show("[[1,1],[0,1]]", TransformKind::Delta, &jordan, &i2, 6)?;

    let e12 = CMatrix::unit(2, 0, 1);
    show("E12", TransformKind::Triangle, &e12, &i2, 5)?;

    // sI + N with N q-nilpotent reaches order 2q - 1
    for q in 1..=3 {
        let inst = make_scalar_plus_nilpotent(4, q, c64(0.0, 1.0), 5)?;
        let a = inst.get("A");
        show(&format!("iI + N, q = {q}"), TransformKind::Triangle, a, &CMatrix::identity(4), 6)?;
    }

    // a weight can lower the order: E11 kills the Jordan defect at order 1
    let w = CMatrix::unit(2, 0, 0);
    show("[[1,1],[0,1]], weight E11", TransformKind::Delta, &jordan, &w, 4)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}

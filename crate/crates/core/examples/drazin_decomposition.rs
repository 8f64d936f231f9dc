// Core-nilpotent decomposition of a conjugated block matrix, its Drazin
// inverse and the three defining identities.

use opcheck::drazin::{axiom_residuals, axiom_tolerance, block_view, core_nilpotent_decompose};
use opcheck::genx::make_drazin_block;
use opcheck::{NumericPolicy, Result};

pub fn run() -> Result<()> {
    let policy = NumericPolicy::default();
    let inst = make_drazin_block(2, 3, 3, 11, true)?;
    let a = inst.get("A");
    let dd = core_nilpotent_decompose(a, &policy)?;
    println!("A is {}x{}, constructed index {:?}", a.rows(), a.cols(), inst.constructed_index);
    println!("index p = {}, dim H1 = {}, dim H2 = {}, cond(S) = {:.3}", dd.p, dd.dim_h1, dd.dim_h2, dd.condition);

    let r = axiom_residuals(a, &dd.a_d, dd.p);
    println!("[A_d, A]            {:.2e}", r.commutator);
    println!("A_d^2 A - A_d       {:.2e}", r.idempotence);
    println!("A^(p+1) A_d - A^p   {:.2e}", r.power);
    println!("tolerance           {:.2e}", axiom_tolerance(a, dd.p, &policy));

    // A_d lives on the core: its off-core blocks vanish
    let n = block_view(&dd.a_d, &dd)?.norms();
    println!("A_d blocks: |X11| = {:.3}, |X12| = {:.1e}, |X21| = {:.1e}, |X22| = {:.1e}", n.x11, n.x12, n.x21, n.x22);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}

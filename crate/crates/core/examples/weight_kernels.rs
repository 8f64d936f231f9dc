// Weights X with Δ^m_{B,A}(X) = 0 for B = A, A*, A_d, A_d*. Every one of
// them lives on the core block.

use opcheck::classify::kernel;
use opcheck::drazin::{block_view, core_nilpotent_decompose, PairSelector};
use opcheck::elemops::TransformKind;
use opcheck::genx::{drazin_block_with, rng_for, BlockOptions, CoreSpectrum};
use opcheck::{NumericPolicy, Result};

pub fn run() -> Result<()> {
    let policy = NumericPolicy::default();
    let opts = BlockOptions { conjugate: true, spectrum: CoreSpectrum::UnitCircle, jordan_max: 1, unitary_frame: true };
    let inst = drazin_block_with(2, 2, 2, opts, &mut rng_for(3, 0))?;
    let a = inst.get("A");
    let dd = core_nilpotent_decompose(a, &policy)?;
    for m in 1..=2 {
        for sel in PairSelector::ALL {
            let b = sel.resolve_with(a, &dd.a_d);
            let k = kernel(TransformKind::Triangle, &b, a, m, &policy)?;
            let mut worst: f64 = 0.0;
            for x in &k.basis {
                let n = block_view(x, &dd)?.norms();
                worst = worst.max(n.x12).max(n.x21).max(n.x22);
            }
            println!("m = {m}  B = {:<15} kernel dim {}  largest off-core block {:.1e}", sel.name(), k.dim, worst);
        }
    }
    // δ_{A,A} kernels are block diagonal but reach into the nilpotent block
    let k = kernel(TransformKind::Delta, a, a, 1, &policy)?;
    let reach = k.basis.iter().map(|x| block_view(x, &dd).map(|v| v.norms().x22)).collect::<Result<Vec<_>>>()?;
    println!("delta_(A,A) kernel dim {}  |X22| per element {:?}", k.dim, reach.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}

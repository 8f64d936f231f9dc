// One seeded instance per generator family, with its self-certification.

use opcheck::genx::{generate, Family, InstanceSpec};
use opcheck::Result;

fn shape(family: Family) -> (Vec<usize>, Vec<usize>) {
    match family {
        Family::Unitary | Family::Invertible => (vec![3], vec![]),
        Family::Nilpotent => (vec![3], vec![3]),
        Family::DrazinBlock => (vec![2, 2], vec![2]),
        Family::AbZeroPair => (vec![1, 3, 1], vec![]),
        Family::Hypothesis1 => (vec![2, 2], vec![2, 1]),
        Family::Remark3 => (vec![2], vec![]),
        Family::ScalarPlusNilpotent => (vec![3], vec![2]),
    }
}

pub fn run() -> Result<()> {
    for family in Family::ALL {
        let (dims, orders) = shape(family);
        let spec = InstanceSpec { seed: 2024, ..InstanceSpec::new(family, dims, orders) };
        let inst = generate(&spec)?;
        let names: Vec<&str> = inst.matrices.keys().map(String::as_str).collect();
        println!("{:<22} matrices {:?} index {:?}", family.name(), names, inst.constructed_index);
        for c in &inst.certified {
            println!("    {:<40} {:.1e} (threshold {:.1e})", c.property, c.residual, c.tolerance);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}

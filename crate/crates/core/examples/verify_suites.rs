// Every property suite at a reduced trial count.

use opcheck::harness::{run_suites, Suite, SuiteConfig};
use opcheck::Result;

pub fn run() -> Result<()> {
    let template = SuiteConfig { trials: 20, dim_max: 4, order_max: 3, seed: 1, ..SuiteConfig::new(Suite::Prop1) };
    for rep in run_suites(&Suite::ALL, &template)? {
        println!("{}", rep.summary_line());
        for note in rep.notes.iter().take(1) {
            println!("    note: {note}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}

//! Acceptance criteria A1 to A12 at their stated sizes. One line per
//! criterion; the process fails if any criterion fails.

use kldihedral::verify::{check_ids, run_check, Suite, VerifyOptions};

fn main() {
    let opts = VerifyOptions::new(Suite::Reference);
    let mut failed = Vec::new();
    println!();
    println!("running {} acceptance criteria", check_ids().count());
    for id in check_ids() {
        let result = run_check(id, &opts).expect("known criterion");
        println!("{result}");
        if !result.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: FAILED {}", failed.join(", "));
        std::process::exit(1);
    }
}

//! One line per acceptance criterion; exits non-zero if any fails.

use revsurf::verify::{run_check, CheckId, VerifyOptions};

fn main() {
    let opts = VerifyOptions::default();
    let mut failed = 0;
    println!("\nacceptance criteria");
    for id in CheckId::ALL {
        let out = run_check(id, &opts);
        let tag = if id.is_primary() { "[PRIMARY]" } else { "[EXTRA]  " };
        println!("{tag} {out}");
        println!("            {}", id.description());
        if !out.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} checks, {failed} failed\n", CheckId::ALL.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Runs the identity, invariance and conjecture suites over every generator
//! kind and prints a summary per run.
//!
//! ```text
//! cargo run --release --example verify_suites [trials] [seed]
//! ```

use atiyah::verify::{
    run_conjecture_scan, run_identity_suite, run_invariance_suite, GeneratorKind, GeneratorSpec, SuiteOptions,
};

fn main() -> atiyah::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1000);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(42);

    let mut clean = true;
    for kind in GeneratorKind::ALL {
        for n in [3, 4, 5] {
            let spec = GeneratorSpec::new(kind, n, seed).with_degeneracy(1.0);
            for report in [
                run_identity_suite(&spec, &SuiteOptions::new(trials, 1e-8))?,
                run_invariance_suite(&spec, &SuiteOptions::new(trials, 1e-9))?,
            ] {
                print!("{}", report.summary());
                clean &= report.is_clean();
            }
        }
        let spec = GeneratorSpec::new(kind, 4, seed).with_degeneracy(1.0);
        let scan = run_conjecture_scan(&spec, &SuiteOptions::new(trials * 10, 1e-9))?;
        print!("{}", scan.summary());
        clean &= scan.is_clean();
    }
    println!("{}", if clean { "all suites clean" } else { "FAILURES" });
    Ok(())
}

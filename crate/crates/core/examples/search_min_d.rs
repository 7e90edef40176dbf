//! Searches for four-point configurations minimising `|D|` and the
//! conjecture gaps, and prints the best configuration found.
//!
//! ```text
//! cargo run --release --example search_min_d [restarts] [seed]
//! ```

use atiyah::search::{minimize, Objective, SearchProblem};

fn main() -> atiyah::Result<()> {
    let mut args = std::env::args().skip(1);
    let restarts: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(50);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);

    for (n, objective) in [(3, Objective::AbsD), (4, Objective::AbsD), (5, Objective::AbsD), (4, Objective::Gap2), (4, Objective::Gap3)] {
        let problem = SearchProblem::new(n, objective).with_restarts(restarts).with_seed(seed);
        let result = minimize(&problem)?;
        let worst_gauge = result.restarts.iter().map(|r| r.gauge_residual).fold(0.0, f64::max);
        println!(
            "n = {n}, {objective}: best {:.12} (restart {}, collinearity {:.2e}, gauge residual {:.1e})",
            result.best_value, result.restart, result.collinearity, worst_gauge
        );
        if objective == Objective::AbsD && n == 4 {
            for p in result.best_configuration.points() {
                println!("    [{:+.9}, {:+.9}, {:+.9}]", p.t, p.u, p.v);
            }
        }
    }
    Ok(())
}

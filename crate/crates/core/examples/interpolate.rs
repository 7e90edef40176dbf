//! Recovers `Re(det M)` and `|det M|^2` for four points as exact
//! polynomials in the six edge lengths, from high-precision samples.
//!
//! ```text
//! cargo run --release --example interpolate [degree-12: yes|no]
//! ```

use std::time::Instant;

use atiyah::sympoly::interpolate::{interpolate_homogeneous, InterpolationOptions, Target};
use atiyah::sympoly::expand_re_det_m;

fn main() -> atiyah::Result<()> {
    let full = std::env::args().nth(1).is_none_or(|a| a != "no");

    let start = Instant::now();
    let re = interpolate_homogeneous(Target::ReDetM, &InterpolationOptions::new(6))?;
    println!(
        "Re(det M): {} terms from {} samples, residual {:.1e}, {:.1?}",
        re.terms,
        re.samples,
        re.residual,
        start.elapsed()
    );
    println!("  matches the closed form: {}", re.poly == expand_re_det_m());

    if full {
        let start = Instant::now();
        let sq = interpolate_homogeneous(Target::AbsDetMSquared, &InterpolationOptions::new(12))?;
        println!(
            "|det M|^2: {} terms from {} samples, residual {:.1e}, rounding {:.1e}, {:.1?}",
            sq.terms,
            sq.samples,
            sq.residual,
            sq.max_rounding_error,
            start.elapsed()
        );
        let denominators: std::collections::BTreeSet<_> = sq.poly.terms().map(|(_, c)| c.denom().clone()).collect();
        println!("  coefficient denominators: {denominators:?}");
    }
    Ok(())
}

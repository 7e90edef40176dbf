//! Four points from their six edge lengths: the closed form for `Re det M`,
//! the two conjectured gaps and the exact edge polynomial.
//!
//! ```text
//! cargo run --example tetrahedra [r21 r31 r32 r41 r42 r43]
//! ```

use atiyah::closed_forms::{cayley_menger_144v2, conjecture_gaps, re_det_m_n4, EdgeLengths4};
use atiyah::determinant::atiyah_det;
use atiyah::sympoly::{cm_poly_144v2, expand_re_det_m, re_det_m_without_volume};

fn main() -> atiyah::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let r: [f64; 6] = args.try_into().unwrap_or([1.0, 1.2, 0.9, 1.1, 1.3, 0.8]);
    let e = EdgeLengths4::from_array(r)?;
    e.check_realizable()?;

    let det = atiyah_det(&e.embed()?)?;
    let closed = re_det_m_n4(&e)?;
    let gaps = conjecture_gaps(&e)?;
    println!("edges             {r:?}");
    println!("det M             {:.12} {:+.3e}i", det.det_m.re, det.det_m.im);
    println!("closed form       {closed:.12}");
    println!("144 V^2           {:.12}", cayley_menger_144v2(&e));
    println!("|D|               {:.12}", det.d.norm());
    println!("|det M| - 64 prod {:.6e}", gaps.gap2);
    println!("|det M|^2 - faces {:.6e}", gaps.gap3);

    let full = expand_re_det_m();
    println!();
    println!("Re det M expansion: {} terms, value {:.12}", full.len(), full.eval_f64(&r));
    println!("  without 288 V^2:  {} terms", re_det_m_without_volume().len());
    println!("  144 V^2:          {} terms", cm_poly_144v2().len());
    Ok(())
}

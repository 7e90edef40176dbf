//! `det M` and `D` for a handful of named configurations.
//!
//! ```text
//! cargo run --example determinants
//! ```

use atiyah::determinant::atiyah_det;
use atiyah::geometry::{Configuration, Point3};

fn line(xs: &[f64]) -> Vec<Point3> {
    xs.iter().map(|&x| Point3::new(x, 0.0, 0.0)).collect()
}

fn polygon(n: usize) -> Vec<Point3> {
    (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            Point3::new(0.0, a.cos(), a.sin())
        })
        .collect()
}

fn main() -> atiyah::Result<()> {
    let h = 3f64.sqrt() / 2.0;
    let regular = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, 0.5, h),
        Point3::new((2.0f64 / 3.0).sqrt(), 0.5, h / 3.0),
    ];
    let octahedron = vec![
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(-1.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, -1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        Point3::new(0.0, 0.0, -1.0),
    ];
    let cases = [
        ("pair", line(&[0.0, 1.0])),
        ("equilateral triangle", polygon(3)),
        ("collinear triple", line(&[0.0, 1.0, 3.0])),
        ("regular tetrahedron", regular),
        ("square", polygon(4)),
        ("collinear four", line(&[0.0, 1.0, 2.0, 4.0])),
        ("regular pentagon", polygon(5)),
        ("octahedron", octahedron),
    ];

    println!("{:<22} {:>3} {:>31} {:>22}", "configuration", "n", "det M", "D");
    for (name, points) in cases {
        let det = atiyah_det(&Configuration::new(points)?)?;
        println!(
            "{name:<22} {:>3} {:>18.6}{:+12.6}i {:>10.6}{:+10.6}i",
            det.n, det.det_m.re, det.det_m.im, det.d.re, det.d.im
        );
    }
    Ok(())
}

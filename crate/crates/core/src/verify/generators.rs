//! Seeded configuration generators.
//!
//! Trial `k` of a spec draws from its own ChaCha stream, seeded by hashing
//! the master seed with `k`, so trials can be produced in any order and on
//! any number of threads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitBall, UnitDisc, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Point3, Rotation, Vec3};

/// Pairwise distances never fall below this fraction of the scale.
pub const MIN_SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// Independent uniform points in a ball of radius `scale`.
    UniformBall,
    /// Points on a random segment, pushed off it by `scale * 10^(-7 degeneracy)`.
    NearCollinear,
    /// Points in a plane `t = const`, squashed towards a line as the
    /// degeneracy goes to 1.
    Planar,
    /// A uniform configuration whose first two points are joined by a
    /// nearly vertical segment, where the two charts of the lift meet.
    NearAntipodalPair,
    /// Two tight clusters of radius `scale * 10^(-4 degeneracy) / 2`.
    Clustered,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::UniformBall,
        GeneratorKind::NearCollinear,
        GeneratorKind::Planar,
        GeneratorKind::NearAntipodalPair,
        GeneratorKind::Clustered,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::UniformBall => "uniform-ball",
            GeneratorKind::NearCollinear => "near-collinear",
            GeneratorKind::Planar => "planar",
            GeneratorKind::NearAntipodalPair => "near-antipodal-pair",
            GeneratorKind::Clustered => "clustered",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown generator kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub scale: f64,
    /// In `[0, 1]`; how close to the degenerate limit of the kind.
    pub degeneracy: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, seed: u64) -> Self {
        Self { kind, n, scale: 1.0, degeneracy: 0.5, seed }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_degeneracy(mut self, degeneracy: f64) -> Self {
        self.degeneracy = degeneracy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 points, got {}", self.n)));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {}", self.scale)));
        }
        if !(0.0..=1.0).contains(&self.degeneracy) {
            return Err(Error::InvalidInput(format!("degeneracy must lie in [0, 1], got {}", self.degeneracy)));
        }
        Ok(())
    }

    /// Seed of the random stream for one trial.
    pub fn trial_seed(&self, trial: u64) -> u64 {
        splitmix64(self.seed ^ splitmix64(trial.wrapping_add(0x51_7cc1_b727_220a)))
    }

    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.trial_seed(trial))
    }

    /// Configuration number `trial`. Draws are repeated until every pair is
    /// at least `MIN_SEPARATION * scale` apart.
    pub fn generate(&self, trial: u64) -> Result<Configuration> {
        self.validate()?;
        let mut rng = self.rng(trial);
        loop {
            let points = self.draw(&mut rng);
            let separated = (0..points.len())
                .all(|i| (i + 1..points.len()).all(|j| points[i].distance(&points[j]) >= MIN_SEPARATION * self.scale));
            if separated {
                if let Ok(cfg) = Configuration::new(points) {
                    return Ok(cfg.with_label(format!("{}#{trial}", self.kind)));
                }
            }
        }
    }

    /// Iterator over the first `trials` configurations.
    pub fn iter(&self, trials: u64) -> impl Iterator<Item = Result<Configuration>> + '_ {
        (0..trials).map(|k| self.generate(k))
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<Point3> {
        let s = self.scale;
        let deg = self.degeneracy;
        let ball = |rng: &mut ChaCha8Rng| {
            let [t, u, v]: [f64; 3] = UnitBall.sample(rng);
            Vec3::new(t, u, v).scale(s)
        };
        match self.kind {
            GeneratorKind::UniformBall => (0..self.n).map(|_| Point3::ORIGIN + ball(rng)).collect(),
            GeneratorKind::NearCollinear => {
                let dir = unit_vector(rng);
                let centre = ball(rng);
                let spread = s * 10f64.powf(-7.0 * deg);
                (0..self.n)
                    .map(|_| {
                        let along = rng.random_range(-s..s);
                        Point3::ORIGIN + centre + dir.scale(along) + ball(rng).scale(spread / s)
                    })
                    .collect()
            }
            GeneratorKind::Planar => {
                let t0 = rng.random_range(-s..s);
                let squash = 1.0 - deg;
                let angle = rng.random_range(0.0..std::f64::consts::TAU);
                let (sin, cos) = angle.sin_cos();
                (0..self.n)
                    .map(|_| {
                        let [x, y]: [f64; 2] = UnitDisc.sample(rng);
                        let (x, y) = (x * s, y * s * squash);
                        Point3::new(t0, cos * x - sin * y, sin * x + cos * y)
                    })
                    .collect()
            }
            GeneratorKind::NearAntipodalPair => {
                let mut pts: Vec<Point3> = (0..self.n).map(|_| Point3::ORIGIN + ball(rng)).collect();
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let tilt = 10f64.powf(-8.0 * deg) * s;
                let len = rng.random_range(0.2 * s..s);
                let [a, b]: [f64; 2] = UnitDisc.sample(rng);
                pts[1] = pts[0] + Vec3::new(sign * len, a * tilt, b * tilt);
                pts
            }
            GeneratorKind::Clustered => {
                let radius = 0.5 * s * 10f64.powf(-4.0 * deg);
                let centres = [ball(rng), ball(rng)];
                (0..self.n)
                    .map(|k| Point3::ORIGIN + centres[k % 2] + ball(rng).scale(radius / s))
                    .collect()
            }
        }
    }
}

/// Uniformly random rotation from a normalised Gaussian quaternion.
pub fn random_rotation(rng: &mut impl Rng) -> Rotation {
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    Rotation::from_quaternion(q[0], q[1], q[2], q[3])
}

pub fn unit_vector(rng: &mut impl Rng) -> Vec3 {
    let [t, u, v]: [f64; 3] = UnitSphere.sample(rng);
    Vec3::new(t, u, v)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

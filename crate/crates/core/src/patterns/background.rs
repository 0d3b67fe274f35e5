//! Background location processes.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::Point;

/// Redraws allowed when a clustered background has too few points.
const MAX_REDRAWS: usize = 1000;

/// Fewest points a generated background may have.
pub const MIN_BACKGROUND_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackgroundSpec {
    /// `n` iid uniform points in the unit square.
    UnitSquareUniform { n: usize },
    /// Uniform on `(0,1)^2 U (delta,1+delta)^2`.
    ShiftedSquareDiag { n: usize, delta: f64 },
    /// Uniform on `(0,1)^2 U (1+delta,2+delta)x(0,1)`.
    TwoSquaresXaxis { n: usize, delta: f64 },
    /// Uniform on `k` unit squares along the x-axis separated by `delta`.
    KSquaresXaxis { n: usize, delta: f64, k: usize },
    /// Matern cluster process: Poisson(`kappa`) parents in the unit square,
    /// each with Poisson(`mu`) offspring uniform in the radius-`r` disc.
    Matern {
        kappa: f64,
        r: f64,
        mu: f64,
        /// Drop offspring falling outside the unit square.
        #[serde(default)]
        clip: bool,
    },
}

impl BackgroundSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match *self {
            BackgroundSpec::UnitSquareUniform { n }
            | BackgroundSpec::ShiftedSquareDiag { n, .. }
            | BackgroundSpec::TwoSquaresXaxis { n, .. }
            | BackgroundSpec::KSquaresXaxis { n, .. }
                if n < MIN_BACKGROUND_POINTS =>
            {
                bad(format!(
                    "background needs at least {MIN_BACKGROUND_POINTS} points, got {n}"
                ))
            }
            BackgroundSpec::ShiftedSquareDiag { delta, .. }
            | BackgroundSpec::TwoSquaresXaxis { delta, .. }
            | BackgroundSpec::KSquaresXaxis { delta, .. }
                if !(delta >= 0.0 && delta.is_finite()) =>
            {
                bad(format!("delta must be finite and >= 0, got {delta}"))
            }
            BackgroundSpec::KSquaresXaxis { k: 0, .. } => bad("k must be >= 1".into()),
            BackgroundSpec::Matern { kappa, r, mu, .. } => {
                for (name, v) in [("kappa", kappa), ("r", r), ("mu", mu)] {
                    if !(v > 0.0 && v.is_finite()) {
                        return bad(format!("{name} must be finite and > 0, got {v}"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Lower-left corners of the unit squares forming the support.
    fn squares(&self) -> Vec<(f64, f64)> {
        match *self {
            BackgroundSpec::UnitSquareUniform { .. } => vec![(0.0, 0.0)],
            BackgroundSpec::ShiftedSquareDiag { delta, .. } => vec![(0.0, 0.0), (delta, delta)],
            BackgroundSpec::TwoSquaresXaxis { delta, .. } => vec![(0.0, 0.0), (1.0 + delta, 0.0)],
            BackgroundSpec::KSquaresXaxis { delta, k, .. } => (0..k).map(|j| (j as f64 * (1.0 + delta), 0.0)).collect(),
            BackgroundSpec::Matern { .. } => Vec::new(),
        }
    }
}

/// Uniform points on a union of unit squares. A component is chosen
/// uniformly (all have unit area) and the draw is kept with probability
/// `1 / (number of components covering it)`, so overlaps are not
/// over-weighted.
fn union_of_squares<R: Rng + ?Sized>(squares: &[(f64, f64)], n: usize, rng: &mut R) -> Vec<Point> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (x0, y0) = squares[rng.random_range(0..squares.len())];
        let p = Point::new(x0 + rng.random::<f64>(), y0 + rng.random::<f64>());
        let cover = squares
            .iter()
            .filter(|&&(a, b)| p.x >= a && p.x < a + 1.0 && p.y >= b && p.y < b + 1.0)
            .count()
            .max(1);
        if cover == 1 || rng.random::<f64>() * (cover as f64) < 1.0 {
            out.push(p);
        }
    }
    out
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    Poisson::new(mean).expect("validated positive mean").sample(rng) as usize
}

fn matern<R: Rng + ?Sized>(kappa: f64, r: f64, mu: f64, clip: bool, rng: &mut R) -> Vec<Point> {
    let mut out = Vec::new();
    for _ in 0..poisson(kappa, rng) {
        let (px, py) = (rng.random::<f64>(), rng.random::<f64>());
        for _ in 0..poisson(mu, rng) {
            let rho = r * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            let p = Point::new(px + rho * theta.cos(), py + rho * theta.sin());
            if !clip || (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y) {
                out.push(p);
            }
        }
    }
    out
}

/// Draws one background. Clustered backgrounds with fewer than
/// [`MIN_BACKGROUND_POINTS`] points are redrawn.
pub fn generate_background<R: Rng + ?Sized>(spec: &BackgroundSpec, rng: &mut R) -> Result<Vec<Point>> {
    spec.validate()?;
    match *spec {
        BackgroundSpec::Matern { kappa, r, mu, clip } => {
            for _ in 0..MAX_REDRAWS {
                let pts = matern(kappa, r, mu, clip, rng);
                if pts.len() >= MIN_BACKGROUND_POINTS {
                    return Ok(pts);
                }
            }
            Err(Error::InvalidSpec(format!(
                "cluster process produced fewer than {MIN_BACKGROUND_POINTS} points in {MAX_REDRAWS} draws"
            )))
        }
        BackgroundSpec::UnitSquareUniform { n }
        | BackgroundSpec::ShiftedSquareDiag { n, .. }
        | BackgroundSpec::TwoSquaresXaxis { n, .. }
        | BackgroundSpec::KSquaresXaxis { n, .. } => Ok(union_of_squares(&spec.squares(), n, rng)),
    }
}

//! Seeded sampling of evaluation points with singular-locus guards.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Assignment, Expr};

pub const DEFAULT_SAMPLES: usize = 20;
pub const DEFAULT_BOX: (f64, f64) = (-2.0, 2.0);
/// Threshold below which a sampled quantity counts as zero.
pub const ZERO_TOL: f64 = 1e-9;
/// Minimum distance from a singular locus before a point is accepted.
pub const SINGULAR_MARGIN: f64 = 1e-6;

const MAX_ATTEMPTS_PER_POINT: usize = 200;

/// Expressions that must stay away from zero (explicit loci) or whose own
/// singular quantities must stay away from zero (watched expressions).
#[derive(Clone, Debug, Default)]
pub struct Guard {
    pub loci: Vec<Expr>,
    pub watched: Vec<Expr>,
    pub margin: f64,
}

impl Guard {
    pub fn new(margin: f64) -> Guard {
        Guard {
            loci: Vec::new(),
            watched: Vec::new(),
            margin,
        }
    }

    pub fn locus(mut self, e: Expr) -> Guard {
        self.loci.push(e);
        self
    }

    pub fn loci(mut self, es: impl IntoIterator<Item = Expr>) -> Guard {
        self.loci.extend(es);
        self
    }

    pub fn watch(mut self, e: Expr) -> Guard {
        self.watched.push(e);
        self
    }

    pub fn watch_all(mut self, es: impl IntoIterator<Item = Expr>) -> Guard {
        self.watched.extend(es);
        self
    }

    pub fn admits(&self, a: &Assignment) -> bool {
        self.loci.iter().all(|e| match e.evaluate(a) {
            Ok(v) => v.norm() >= self.margin,
            Err(_) => false,
        }) && self
            .watched
            .iter()
            .all(|e| e.singular_margin(a) >= self.margin)
    }
}

/// Uniform sampler over the box `[lo, hi]^dim`, deterministic per seed.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
    dim: usize,
    lo: f64,
    hi: f64,
}

impl Sampler {
    pub fn new(seed: u64, dim: usize, bounds: (f64, f64)) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
            lo: bounds.0,
            hi: bounds.1,
        }
    }

    pub fn point(&mut self) -> Vec<f64> {
        (0..self.dim)
            .map(|_| self.rng.gen_range(self.lo..self.hi))
            .collect()
    }

    /// Draws `count` points admitted by `guard`, resampling rejected ones.
    /// Returns the points and the number of rejections.
    pub fn guarded(&mut self, count: usize, guard: &Guard) -> (Vec<Assignment>, usize) {
        self.guarded_with(count, |a| guard.admits(a))
    }

    pub fn guarded_with(
        &mut self,
        count: usize,
        admits: impl Fn(&Assignment) -> bool,
    ) -> (Vec<Assignment>, usize) {
        let mut points = Vec::with_capacity(count);
        let mut rejected = 0;
        let budget = count * MAX_ATTEMPTS_PER_POINT;
        while points.len() < count && rejected < budget {
            let a = Assignment::real(&self.point());
            if admits(&a) {
                points.push(a);
            } else {
                rejected += 1;
            }
        }
        (points, rejected)
    }
}

/// Maximum of `|e|` over points where it evaluates; `None` if it fails
/// everywhere.
pub fn max_abs(e: &Expr, points: &[Assignment]) -> Option<f64> {
    points
        .iter()
        .filter_map(|p| e.evaluate(p).ok())
        .map(|v| v.norm())
        .fold(None, |acc, v| Some(acc.map_or(v, |m: f64| m.max(v))))
}

/// Numeric zero test at sample points (the equality oracle used throughout).
pub fn numerically_zero(e: &Expr, points: &[Assignment], tol: f64) -> bool {
    if e.simplify().is_zero() {
        return true;
    }
    max_abs(e, points).is_some_and(|m| m < tol)
}

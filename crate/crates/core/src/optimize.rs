//! Derivative-free multistart maximization over pairs of unit vectors.
//!
//! The search space is the product of two unit spheres. Two-dimensional
//! spaces use the angle chart `(theta_x, theta_y)`; higher dimensions
//! optimize raw ambient coordinates of both vectors and renormalize on
//! every evaluation. The local engine is Nelder-Mead simplex descent,
//! which needs only objective comparisons, so results are invariant under
//! positive affine rescaling of the objective.
//!
//! Determinism: restart `r` draws its start from a ChaCha stream seeded
//! with `seed ^ r`, reductions are sequential, and value ties between
//! restarts are broken toward the lexicographically smallest witness.
//! Increasing `restarts` never decreases the reported value.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ortho::PairWitness;
use crate::space::{SpaceSpec, Vector};

/// Multistart search budget and reproducibility knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptConfig {
    /// Independent Nelder-Mead restarts; the best result is kept.
    pub restarts: usize,
    /// Iteration cap per restart.
    pub max_iters: usize,
    /// Seed for the start-point stream.
    pub seed: u64,
    /// Initial simplex edge length in chart coordinates.
    pub simplex_init: f64,
    /// Convergence tolerance on the relative simplex value spread.
    pub opt_tol: f64,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            restarts: 64,
            max_iters: 400,
            seed: 0,
            simplex_init: 0.25,
            opt_tol: 1e-9,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::Validation(
                "restarts and max_iters must be >= 1".into(),
            ));
        }
        if !(self.simplex_init.is_finite() && self.simplex_init > 0.0) {
            return Err(Error::Validation("simplex_init must be finite and > 0".into()));
        }
        if !(self.opt_tol.is_finite() && self.opt_tol > 0.0) {
            return Err(Error::Validation("opt_tol must be finite and > 0".into()));
        }
        Ok(())
    }
}

/// How an estimate is certified.
///
/// `GridCertified` marks exhaustive grid scans at a stated resolution;
/// the heuristic variants mark multistart searches, which bound the true
/// supremum from below (maximization) or the infimum from above
/// (minimization) by the value of an actually evaluated feasible point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certification {
    GridCertified,
    HeuristicLowerBound,
    HeuristicUpperBound,
}

impl Certification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certification::GridCertified => "grid-certified",
            Certification::HeuristicLowerBound => "heuristic-lower-bound",
            Certification::HeuristicUpperBound => "heuristic-upper-bound",
        }
    }
}

impl std::fmt::Display for Certification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Certification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Result of a search: the extremal value found, the pair achieving it,
/// and bookkeeping for reproducibility audits. `bound_window` is only
/// populated by grid scans, where it reports the largest objective change
/// between adjacent grid cells (a crude modulus-of-continuity reading;
/// small windows mean the grid is fine enough to trust).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub witness: PairWitness,
    pub cert: Certification,
    /// Objective evaluations performed.
    pub evals: u64,
    /// Non-finite evaluations (grid) or discarded restarts (multistart).
    pub skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_window: Option<f64>,
}

/// Maximizes `objective` over ordered pairs of unit vectors. The result
/// is a certified-feasible lower bound on the supremum; see the module
/// docs for the determinism contract. Fails with `DegenerateObjective`
/// when no restart produced a finite value.
pub fn maximize_pair_objective<F: FnMut(&Vector, &Vector) -> f64>(
    space: &SpaceSpec,
    objective: F,
    cfg: &OptConfig,
) -> Result<Estimate> {
    extremize(space, objective, cfg)
}

/// Minimizes `objective` over ordered pairs of unit vectors; the mirror
/// image of `maximize_pair_objective`, certified as an upper bound on
/// the infimum.
pub fn minimize_pair_objective<F: FnMut(&Vector, &Vector) -> f64>(
    space: &SpaceSpec,
    mut objective: F,
    cfg: &OptConfig,
) -> Result<Estimate> {
    let mut est = extremize(space, |x: &Vector, y: &Vector| -objective(x, y), cfg)?;
    est.value = -est.value;
    est.cert = Certification::HeuristicUpperBound;
    Ok(est)
}

/// One Nelder-Mead descent seeded at `start`, for polishing a witness
/// found by a coarser search (typically a grid scan). Maximizes. The
/// simplex contains the start point, so the result never falls below the
/// start's objective value when that value is finite.
pub fn local_refine<F: FnMut(&Vector, &Vector) -> f64>(
    space: &SpaceSpec,
    mut objective: F,
    start: &PairWitness,
    cfg: &OptConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let chart = Chart::new(space);
    let params = chart.encode(space, &start.x, &start.y)?;
    let mut evals = 0u64;
    let mut best_pair: Option<(Vector, Vector)> = None;
    let mut f = |p: &[f64]| {
        evals += 1;
        match chart.decode(space, p) {
            Some((x, y)) => {
                let v = objective(&x, &y);
                if v.is_finite() {
                    -v
                } else {
                    f64::INFINITY
                }
            }
            None => f64::INFINITY,
        }
    };
    let step = cfg.simplex_init * 0.2;
    let nm = nelder_mead(&mut f, &params, step, cfg.max_iters, cfg.opt_tol);
    if !nm.value.is_finite() {
        return Err(Error::DegenerateObjective(
            "objective is not finite near the start pair".into(),
        ));
    }
    if let Some((x, y)) = chart.decode(space, &nm.params) {
        best_pair = Some((x, y));
    }
    let (x, y) = best_pair.ok_or_else(|| {
        Error::DegenerateObjective("refined point failed to decode".into())
    })?;
    Ok(Estimate {
        value: -nm.value,
        witness: PairWitness::new(x, y, None)?,
        cert: Certification::HeuristicLowerBound,
        evals,
        skipped: 0,
        bound_window: None,
    })
}

fn extremize<F: FnMut(&Vector, &Vector) -> f64>(
    space: &SpaceSpec,
    mut objective: F,
    cfg: &OptConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let chart = Chart::new(space);
    let mut total_evals = 0u64;
    let mut skipped = 0u64;
    // Best over restarts: value, then lexicographically smallest witness.
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for r in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ r as u64);
        let Some(start) = chart.random_start(space, &mut rng) else {
            skipped += 1;
            continue;
        };
        let mut evals = 0u64;
        let mut f = |p: &[f64]| {
            evals += 1;
            match chart.decode(space, p) {
                Some((x, y)) => {
                    let v = objective(&x, &y);
                    if v.is_finite() {
                        -v
                    } else {
                        f64::INFINITY
                    }
                }
                None => f64::INFINITY,
            }
        };
        let nm = nelder_mead(&mut f, &start, cfg.simplex_init, cfg.max_iters, cfg.opt_tol);
        total_evals += evals;
        if !nm.value.is_finite() {
            skipped += 1;
            continue;
        }
        let Some((x, y)) = chart.decode(space, &nm.params) else {
            skipped += 1;
            continue;
        };
        let value = -nm.value;
        let candidate = (value, x.coords().to_vec(), y.coords().to_vec());
        best = Some(match best.take() {
            None => candidate,
            Some(cur) => {
                if candidate.0 > cur.0
                    || (candidate.0 == cur.0 && lex_less(&candidate, &cur))
                {
                    candidate
                } else {
                    cur
                }
            }
        });
    }
    let (value, xs, ys) = best.ok_or_else(|| {
        Error::DegenerateObjective(
            "objective produced no finite value in any restart".into(),
        )
    })?;
    Ok(Estimate {
        value,
        witness: PairWitness::new(Vector::new(xs)?, Vector::new(ys)?, None)?,
        cert: Certification::HeuristicLowerBound,
        evals: total_evals,
        skipped,
        bound_window: None,
    })
}

fn lex_less(a: &(f64, Vec<f64>, Vec<f64>), b: &(f64, Vec<f64>, Vec<f64>)) -> bool {
    for (x, y) in a.1.iter().zip(&b.1).chain(a.2.iter().zip(&b.2)) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Chart between optimizer parameters and unit-vector pairs.
enum Chart {
    /// Periodic angles `(theta_x, theta_y)`.
    Angles,
    /// Raw ambient coordinates of both vectors, renormalized on decode.
    Ambient { dim: usize },
}

impl Chart {
    fn new(space: &SpaceSpec) -> Chart {
        if space.dim() == 2 {
            Chart::Angles
        } else {
            Chart::Ambient { dim: space.dim() }
        }
    }

    fn decode(&self, space: &SpaceSpec, p: &[f64]) -> Option<(Vector, Vector)> {
        match self {
            Chart::Angles => {
                if !(p[0].is_finite() && p[1].is_finite()) {
                    return None;
                }
                let x = space.boundary_point_2d(p[0]).ok()?;
                let y = space.boundary_point_2d(p[1]).ok()?;
                Some((x, y))
            }
            Chart::Ambient { dim } => {
                let half = |c: &[f64]| -> Option<Vector> {
                    if c.iter().any(|v| !v.is_finite()) {
                        return None;
                    }
                    let n = space.norm_slice(c);
                    if !n.is_finite() || n < 1e-9 {
                        return None;
                    }
                    Some(Vector::new(c.iter().map(|v| v / n).collect()).ok()?)
                };
                Some((half(&p[..*dim])?, half(&p[*dim..])?))
            }
        }
    }

    fn encode(&self, space: &SpaceSpec, x: &Vector, y: &Vector) -> Result<Vec<f64>> {
        match self {
            Chart::Angles => {
                let ang = |v: &Vector| -> Result<f64> {
                    if v.is_zero() {
                        return Err(Error::Degenerate(
                            "cannot refine from a zero witness component".into(),
                        ));
                    }
                    Ok(v.coords()[1].atan2(v.coords()[0]))
                };
                Ok(vec![ang(x)?, ang(y)?])
            }
            Chart::Ambient { .. } => {
                let ux = space.unit(x)?;
                let uy = space.unit(y)?;
                let mut p = ux.coords().to_vec();
                p.extend_from_slice(uy.coords());
                Ok(p)
            }
        }
    }

    /// Draws a start point; `None` if the draw failed to decode (kept as
    /// a guard, the Gaussian draw makes it practically impossible).
    fn random_start(&self, space: &SpaceSpec, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        use rand::Rng;
        for _ in 0..4 {
            let p: Vec<f64> = match self {
                Chart::Angles => (0..2)
                    .map(|_| rng.gen::<f64>() * 2.0 * std::f64::consts::PI)
                    .collect(),
                Chart::Ambient { dim } => (0..2 * dim)
                    .map(|_| StandardNormal.sample(rng))
                    .collect(),
            };
            if self.decode(space, &p).is_some() {
                return Some(p);
            }
        }
        None
    }
}

pub(crate) struct NmResult {
    pub(crate) params: Vec<f64>,
    pub(crate) value: f64,
}

/// Nelder-Mead simplex minimization with the standard coefficients
/// (reflect 1, expand 2, contract 1/2, shrink 1/2). Stops when the
/// simplex value spread falls below `ftol` relatively, the simplex
/// collapses geometrically, or `max_iters` is reached. `f` must map
/// non-finite evaluations to `+inf` itself.
pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    start: &[f64],
    step: f64,
    max_iters: usize,
    ftol: f64,
) -> NmResult {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step;
        let v = f(&p);
        simplex.push((p, v));
    }
    let mut iters = 0usize;
    while iters < max_iters {
        iters += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if best.is_finite() && worst.is_finite() && (worst - best) <= ftol * (1.0 + best.abs()) {
            break;
        }
        if simplex_collapsed(&simplex) {
            break;
        }
        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0f64; n];
        for (p, _) in simplex.iter().take(n) {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let worst_p = simplex[n].0.clone();
        let lerp = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst_p)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let reflected = lerp(1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(2.0);
            let fe = f(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[n].1 { lerp(0.5) } else { lerp(-0.5) };
            let fc = f(&contracted);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (p, a) in entry.0.iter_mut().zip(&anchor) {
                        *p = a + 0.5 * (*p - a);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    NmResult {
        params: simplex[0].0.clone(),
        value: simplex[0].1,
    }
}

fn simplex_collapsed(simplex: &[(Vec<f64>, f64)]) -> bool {
    let n = simplex[0].0.len();
    let mut scale = 1.0f64;
    for (p, _) in simplex {
        for v in p {
            scale = scale.max(v.abs());
        }
    }
    for d in 0..n {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (p, _) in simplex {
            lo = lo.min(p[d]);
            hi = hi.max(p[d]);
        }
        if hi - lo > 1e-11 * scale {
            return false;
        }
    }
    true
}

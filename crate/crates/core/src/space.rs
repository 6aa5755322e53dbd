//! Finite-dimensional real normed spaces.
//!
//! A space is a norm on `R^n`, described by `SpaceSpec`. Four families are
//! supported: `l_p` spaces, weighted `l_p` spaces, polyhedral norms given by
//! a spanning set of linear functionals, and the sup norm on a discretized
//! interval (a finite-dimensional stand-in for `C[alpha, beta]`).
//!
//! The module also carries the shared `ToleranceConfig` and the seeded
//! sampling helpers used by every estimator. Sampling is deterministic: a
//! given seed always yields the same vectors in the same order.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::Error as _;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Numerical tolerances shared across the crate.
///
/// Invariant: `0 < eq_tol <= opt_tol <= verify_tol < 1` and
/// `lambda_max >= 1`. `eq_tol` is the dead band for equality predicates
/// (orthogonality tests), `opt_tol` the optimizer convergence tolerance,
/// `verify_tol` the default acceptance tolerance for identity checks, and
/// `lambda_max` the largest scaling ratio searched when completing a
/// direction to an isosceles-orthogonal pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceConfig {
    pub eq_tol: f64,
    pub opt_tol: f64,
    pub verify_tol: f64,
    pub lambda_max: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eq_tol: 1e-9,
            opt_tol: 1e-9,
            verify_tol: 1e-3,
            lambda_max: 16.0,
        }
    }
}

impl ToleranceConfig {
    /// Builds a config, rejecting orderings that would make the equality
    /// dead band wider than the verification tolerance.
    pub fn new(eq_tol: f64, opt_tol: f64, verify_tol: f64, lambda_max: f64) -> Result<Self> {
        let cfg = ToleranceConfig {
            eq_tol,
            opt_tol,
            verify_tol,
            lambda_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eq_tol, self.opt_tol, self.verify_tol, self.lambda_max];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tolerances must be finite".into()));
        }
        if !(self.eq_tol > 0.0 && self.eq_tol <= self.opt_tol) {
            return Err(Error::Validation(
                "tolerances must satisfy 0 < eq_tol <= opt_tol".into(),
            ));
        }
        if !(self.opt_tol <= self.verify_tol && self.verify_tol < 1.0) {
            return Err(Error::Validation(
                "tolerances must satisfy opt_tol <= verify_tol < 1".into(),
            ));
        }
        if self.lambda_max < 1.0 {
            return Err(Error::Validation("lambda_max must be >= 1".into()));
        }
        Ok(())
    }
}

/// A point of `R^n` with finite coordinates. The coordinate vector is
/// non-empty and every entry is finite; both are enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    /// Validates and wraps a coordinate vector.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Validation("vector must have at least one coordinate".into()));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("vector coordinate {i} is not finite")));
        }
        Ok(Vector { coords })
    }

    /// Wraps coordinates already known to be valid.
    pub(crate) fn from_coords(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Vector { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector::from_coords(self.coords.iter().map(|x| c * x).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector::from_coords(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector::from_coords(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// True when every coordinate is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == 0.0)
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coords.len()))?;
        for c in &self.coords {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        Vector::new(coords).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// The exponent of an `l_p` norm: a finite `p >= 1` or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn is_two(&self) -> bool {
        matches!(self, Exponent::Finite(p) if *p == 2.0)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Exponent::Finite(p) if !p.is_finite() => {
                Err(Error::NonFinite("exponent p must be finite or the string \"inf\"".into()))
            }
            Exponent::Finite(p) if *p < 1.0 => {
                Err(Error::Validation(format!("exponent p must be >= 1 (got {p})")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let exp = match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Exponent::Finite(p),
            Raw::Text(s) if s.eq_ignore_ascii_case("inf") => Exponent::Infinity,
            Raw::Text(s) => {
                return Err(D::Error::custom(format!(
                    "exponent must be a number or \"inf\", got \"{s}\""
                )))
            }
        };
        exp.validate().map_err(|e| D::Error::custom(e.to_string()))?;
        Ok(exp)
    }
}

/// Description of a normed space on `R^n`.
///
/// Construct through the family constructors (`lp`, `weighted_lp`,
/// `polyhedral`, `discretized_sup`) or by parsing a JSON space document
/// with `parse_space_spec`; both paths validate the same rules.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceSpec {
    /// `l_p` norm on `R^dim`.
    Lp { p: Exponent, dim: usize },
    /// `(sum_i w_i |x_i|^p)^(1/p)` with positive weights (max-form for
    /// `p = inf`). Dimension is the weight count.
    WeightedLp { p: Exponent, weights: Vec<f64> },
    /// `max_i |<a_i, x>|` over a functional set closed under negation and
    /// spanning the dual, so the unit ball is a bounded symmetric polytope.
    Polyhedral { functionals: Vec<Vector>, dim: usize },
    /// Sup norm on functions `[alpha, beta] -> R` sampled at `grid` equally
    /// spaced nodes. Coordinates are the sampled values.
    DiscretizedSup { grid: usize, alpha: f64, beta: f64 },
}

impl SpaceSpec {
    pub fn lp(p: Exponent, dim: usize) -> Result<Self> {
        p.validate()?;
        if dim == 0 {
            return Err(Error::Validation("dim must be >= 1".into()));
        }
        Ok(SpaceSpec::Lp { p, dim })
    }

    pub fn weighted_lp(p: Exponent, weights: Vec<f64>) -> Result<Self> {
        p.validate()?;
        if weights.is_empty() {
            return Err(Error::Validation("weights must be non-empty".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::Validation(format!(
                "weights must all be finite and > 0 (weight {i} is {})",
                weights[i]
            )));
        }
        Ok(SpaceSpec::WeightedLp { p, weights })
    }

    /// Builds a polyhedral norm. The given functionals are closed under
    /// negation (exact duplicates are not re-added) and must span the dual
    /// space, otherwise the "norm" would vanish on a nonzero vector.
    pub fn polyhedral(functionals: Vec<Vector>) -> Result<Self> {
        if functionals.is_empty() {
            return Err(Error::Validation("functionals must be non-empty".into()));
        }
        let dim = functionals[0].dim();
        for (i, a) in functionals.iter().enumerate() {
            if a.dim() != dim {
                return Err(Error::Validation(format!(
                    "functional {i} has length {}, expected {dim}",
                    a.dim()
                )));
            }
        }
        let mut closed: Vec<Vector> = Vec::with_capacity(functionals.len() * 2);
        for a in &functionals {
            let neg = a.scale(-1.0);
            if !closed.contains(a) {
                closed.push(a.clone());
            }
            if !closed.contains(&neg) {
                closed.push(neg);
            }
        }
        let rank = rank_of(&closed, dim);
        if rank < dim {
            return Err(Error::Validation(format!(
                "functionals must span the dual space: rank {rank} < dim {dim}"
            )));
        }
        Ok(SpaceSpec::Polyhedral {
            functionals: closed,
            dim,
        })
    }

    pub fn discretized_sup(grid: usize, alpha: f64, beta: f64) -> Result<Self> {
        if grid < 2 {
            return Err(Error::Validation("grid must be >= 2".into()));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::NonFinite("alpha and beta must be finite".into()));
        }
        if alpha >= beta {
            return Err(Error::Validation(format!(
                "alpha must be < beta (got alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(SpaceSpec::DiscretizedSup { grid, alpha, beta })
    }

    /// Regular octagonal norm on the plane: functionals at angles
    /// `k*pi/4`, a polyhedral space whose ball has vertices both on and
    /// off the coordinate axes.
    pub fn octagon() -> Self {
        let mut rows = Vec::new();
        for k in 0..4 {
            let t = std::f64::consts::FRAC_PI_4 * k as f64;
            rows.push(Vector::from_coords(vec![t.cos(), t.sin()]));
        }
        SpaceSpec::polyhedral(rows).expect("octagon functionals span the plane")
    }

    /// Seeded random symmetric polytope norm: `pairs` functionals with
    /// uniformly random directions and dual radii in `[0.75, 1.5]`.
    /// Requires `pairs >= dim` so the functionals can span.
    pub fn random_polyhedral(dim: usize, pairs: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("dim must be >= 1".into()));
        }
        if pairs < dim {
            return Err(Error::Validation(format!(
                "pairs must be >= dim (got pairs = {pairs}, dim = {dim})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Spanning can fail with probability zero in exact arithmetic; retry
        // a few times to be safe against degenerate float draws.
        for _ in 0..16 {
            let mut rows = Vec::with_capacity(pairs);
            for _ in 0..pairs {
                let dir = gaussian_direction(&mut rng, dim);
                let radius = 0.75 + 0.75 * uniform01(&mut rng);
                rows.push(Vector::from_coords(
                    dir.iter().map(|d| d / radius).collect(),
                ));
            }
            if let Ok(space) = SpaceSpec::polyhedral(rows) {
                return Ok(space);
            }
        }
        Err(Error::Degenerate(
            "random functionals failed to span after 16 attempts".into(),
        ))
    }

    pub fn dim(&self) -> usize {
        match self {
            SpaceSpec::Lp { dim, .. } => *dim,
            SpaceSpec::WeightedLp { weights, .. } => weights.len(),
            SpaceSpec::Polyhedral { dim, .. } => *dim,
            SpaceSpec::DiscretizedSup { grid, .. } => *grid,
        }
    }

    /// True when the norm comes from an inner product, which holds for
    /// `p = 2` (weighted or not) and for every one-dimensional space.
    pub fn is_hilbert(&self) -> bool {
        if self.dim() == 1 {
            return true;
        }
        match self {
            SpaceSpec::Lp { p, .. } => p.is_two(),
            SpaceSpec::WeightedLp { p, .. } => p.is_two(),
            _ => false,
        }
    }

    /// Short stable label, e.g. `lp:1:2` or `poly:2:8`. Used in reports
    /// and CSV output; contains no whitespace or commas.
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Norm of `x`. Validates dimension and finiteness of the input; the
    /// result can still overflow to infinity for extreme coordinates.
    pub fn norm(&self, x: &Vector) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        // Vector construction guarantees finite coordinates.
        Ok(self.norm_slice(x.coords()))
    }

    /// Unchecked norm on a raw slice: the hot path used by the grid oracle
    /// and estimators. Callers guarantee the length matches `dim()`.
    pub(crate) fn norm_slice(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            SpaceSpec::Lp { p, .. } => lp_norm(*p, x, None),
            SpaceSpec::WeightedLp { p, weights } => lp_norm(*p, x, Some(weights)),
            SpaceSpec::Polyhedral { functionals, .. } => {
                let mut best = 0.0f64;
                for a in functionals {
                    let d = dot(a.coords(), x).abs();
                    if d > best {
                        best = d;
                    }
                }
                best
            }
            SpaceSpec::DiscretizedSup { .. } => {
                x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
        }
    }

    /// Normalizes `x` to the unit sphere. Errors on (numerically) zero
    /// vectors instead of dividing by a vanishing norm.
    pub fn unit(&self, x: &Vector) -> Result<Vector> {
        let n = self.norm(x)?;
        if n < 1e-12 {
            return Err(Error::Degenerate("cannot normalize a vector with norm < 1e-12".into()));
        }
        if !n.is_finite() {
            return Err(Error::NonFinite("norm overflowed while normalizing".into()));
        }
        Ok(x.scale(1.0 / n))
    }

    /// The unit-sphere point in direction `theta`, i.e.
    /// `(cos theta, sin theta)` scaled to norm one. Two-dimensional spaces
    /// only.
    pub fn boundary_point_2d(&self, theta: f64) -> Result<Vector> {
        if self.dim() != 2 {
            return Err(Error::Contract(format!(
                "boundary_point_2d requires dim 2, space has dim {}",
                self.dim()
            )));
        }
        if !theta.is_finite() {
            return Err(Error::NonFinite("theta must be finite".into()));
        }
        let dir = [theta.cos(), theta.sin()];
        let n = self.norm_slice(&dir);
        debug_assert!(n > 0.0);
        Ok(Vector::from_coords(vec![dir[0] / n, dir[1] / n]))
    }

    /// Deterministic sample of `n >= 1` unit vectors: Gaussian directions
    /// from a ChaCha stream seeded with `seed`, normalized in this norm.
    pub fn sample_unit_vectors(&self, seed: u64, n: usize) -> Result<Vec<Vector>> {
        if n == 0 {
            return Err(Error::Validation("sample count must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let dir = gaussian_direction(&mut rng, self.dim());
            let norm = self.norm_slice(&dir);
            debug_assert!(norm.is_finite() && norm > 0.0);
            out.push(Vector::from_coords(dir.iter().map(|d| d / norm).collect()));
        }
        Ok(out)
    }

    /// Node positions of a discretized-sup space; `None` for other families.
    pub fn sup_grid_nodes(&self) -> Option<Vec<f64>> {
        match self {
            SpaceSpec::DiscretizedSup { grid, alpha, beta } => {
                let m = *grid;
                let step = (beta - alpha) / (m - 1) as f64;
                Some((0..m).map(|k| alpha + step * k as f64).collect())
            }
            _ => None,
        }
    }

    /// Samples a function on the nodes of a discretized-sup space, giving
    /// the vector of its values. Errors for other families and for
    /// functions that produce non-finite values.
    pub fn sample_function<F: Fn(f64) -> f64>(&self, f: F) -> Result<Vector> {
        let nodes = self.sup_grid_nodes().ok_or_else(|| {
            Error::Contract("sample_function requires a discretized-sup space".into())
        })?;
        let values: Vec<f64> = nodes.iter().map(|r| f(*r)).collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "sampled function is not finite at node {i}"
            )));
        }
        Vector::new(values)
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lp { p, dim } => write!(f, "lp:{p}:{dim}"),
            SpaceSpec::WeightedLp { p, weights } => write!(f, "wlp:{p}:{}", weights.len()),
            SpaceSpec::Polyhedral { functionals, dim } => {
                write!(f, "poly:{dim}:{}", functionals.len())
            }
            SpaceSpec::DiscretizedSup { grid, alpha, beta } => {
                write!(f, "supgrid:{grid}:{alpha}..{beta}")
            }
        }
    }
}

impl Serialize for SpaceSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SpaceSpec::Lp { p, dim } => {
                let mut map = serializer.serialize_map(Some(3))?;
                map.serialize_entry("family", "lp")?;
                map.serialize_entry("p", p)?;
                map.serialize_entry("dim", dim)?;
                map.end()
            }
            SpaceSpec::WeightedLp { p, weights } => {
                let mut map = serializer.serialize_map(Some(3))?;
                map.serialize_entry("family", "weighted-lp")?;
                map.serialize_entry("p", p)?;
                map.serialize_entry("weights", weights)?;
                map.end()
            }
            SpaceSpec::Polyhedral { functionals, .. } => {
                let rows: Vec<&[f64]> = functionals.iter().map(|a| a.coords()).collect();
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("family", "polyhedral")?;
                map.serialize_entry("functionals", &rows)?;
                map.end()
            }
            SpaceSpec::DiscretizedSup { grid, alpha, beta } => {
                let mut map = serializer.serialize_map(Some(4))?;
                map.serialize_entry("family", "discretized-sup")?;
                map.serialize_entry("grid", grid)?;
                map.serialize_entry("alpha", alpha)?;
                map.serialize_entry("beta", beta)?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for SpaceSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = SpaceDoc::deserialize(deserializer)?;
        doc.into_spec().map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Raw shape of a JSON space document; field applicability depends on the
/// family and is checked in `into_spec`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDoc {
    family: String,
    #[serde(default)]
    p: Option<Exponent>,
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
    #[serde(default)]
    functionals: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    grid: Option<usize>,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    beta: Option<f64>,
}

impl SpaceDoc {
    fn into_spec(self) -> Result<SpaceSpec> {
        let family = self.family.clone();
        let reject = |field: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::Validation(format!(
                    "field \"{field}\" does not apply to family \"{family}\""
                )))
            } else {
                Ok(())
            }
        };
        match self.family.as_str() {
            "lp" => {
                reject("weights", self.weights.is_some())?;
                reject("functionals", self.functionals.is_some())?;
                reject("grid", self.grid.is_some())?;
                reject("alpha", self.alpha.is_some())?;
                reject("beta", self.beta.is_some())?;
                let p = self.p.ok_or_else(|| {
                    Error::Validation("family \"lp\" requires field \"p\"".into())
                })?;
                let dim = self.dim.ok_or_else(|| {
                    Error::Validation("family \"lp\" requires field \"dim\"".into())
                })?;
                SpaceSpec::lp(p, dim)
            }
            "weighted-lp" => {
                reject("functionals", self.functionals.is_some())?;
                reject("grid", self.grid.is_some())?;
                reject("alpha", self.alpha.is_some())?;
                reject("beta", self.beta.is_some())?;
                let p = self.p.ok_or_else(|| {
                    Error::Validation("family \"weighted-lp\" requires field \"p\"".into())
                })?;
                let weights = self.weights.ok_or_else(|| {
                    Error::Validation("family \"weighted-lp\" requires field \"weights\"".into())
                })?;
                if let Some(dim) = self.dim {
                    if dim != weights.len() {
                        return Err(Error::Validation(format!(
                            "weights length {} does not match dim {dim}",
                            weights.len()
                        )));
                    }
                }
                SpaceSpec::weighted_lp(p, weights)
            }
            "polyhedral" => {
                reject("p", self.p.is_some())?;
                reject("weights", self.weights.is_some())?;
                reject("grid", self.grid.is_some())?;
                reject("alpha", self.alpha.is_some())?;
                reject("beta", self.beta.is_some())?;
                let rows = self.functionals.ok_or_else(|| {
                    Error::Validation("family \"polyhedral\" requires field \"functionals\"".into())
                })?;
                let rows: Result<Vec<Vector>> = rows.into_iter().map(Vector::new).collect();
                let rows = rows?;
                if let (Some(dim), Some(first)) = (self.dim, rows.first()) {
                    if dim != first.dim() {
                        return Err(Error::Validation(format!(
                            "functional length {} does not match dim {dim}",
                            first.dim()
                        )));
                    }
                }
                SpaceSpec::polyhedral(rows)
            }
            "discretized-sup" => {
                reject("p", self.p.is_some())?;
                reject("dim", self.dim.is_some())?;
                reject("weights", self.weights.is_some())?;
                reject("functionals", self.functionals.is_some())?;
                let grid = self.grid.ok_or_else(|| {
                    Error::Validation("family \"discretized-sup\" requires field \"grid\"".into())
                })?;
                SpaceSpec::discretized_sup(
                    grid,
                    self.alpha.unwrap_or(0.0),
                    self.beta.unwrap_or(1.0),
                )
            }
            other => Err(Error::Validation(format!(
                "unknown family \"{other}\" (expected lp, weighted-lp, polyhedral, discretized-sup)"
            ))),
        }
    }
}

/// Parses a JSON space document. Unknown families, unknown fields, and
/// out-of-range parameters are rejected with a message naming the rule.
pub fn parse_space_spec(text: &str) -> Result<SpaceSpec> {
    let doc: SpaceDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_spec()
}

/// Compensated (Kahan) summation; the grid oracle sums millions of terms
/// and plain accumulation costs digits exactly where ties are decided.
pub(crate) fn kahan_sum<I: Iterator<Item = f64>>(iter: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in iter {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0f64;
    for i in 0..a.len() {
        acc = a[i].mul_add(b[i], acc);
    }
    acc
}

fn lp_norm(p: Exponent, x: &[f64], weights: Option<&[f64]>) -> f64 {
    let w = |i: usize| weights.map_or(1.0, |ws| ws[i]);
    match p {
        Exponent::Infinity => {
            let mut best = 0.0f64;
            for (i, v) in x.iter().enumerate() {
                let t = w(i) * v.abs();
                if t > best {
                    best = t;
                }
            }
            best
        }
        Exponent::Finite(p) if p == 1.0 => {
            kahan_sum(x.iter().enumerate().map(|(i, v)| w(i) * v.abs()))
        }
        Exponent::Finite(p) if p == 2.0 => {
            kahan_sum(x.iter().enumerate().map(|(i, v)| w(i) * v * v)).sqrt()
        }
        Exponent::Finite(p) => {
            kahan_sum(x.iter().enumerate().map(|(i, v)| w(i) * v.abs().powf(p))).powf(1.0 / p)
        }
    }
}

/// Gaussian direction normalized in `l_2`, resampled while numerically
/// zero. Consumes `dim` normal draws per attempt from `rng`.
pub(crate) fn gaussian_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = kahan_sum(v.iter().map(|c| c * c)).sqrt();
        if n > 1e-6 {
            return v.iter().map(|c| c / n).collect();
        }
    }
}

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    use rand::Rng;
    rng.gen::<f64>()
}

/// Rank of the row set via Gaussian elimination with partial pivoting.
fn rank_of(rows: &[Vector], dim: usize) -> usize {
    let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    let mut rank = 0;
    for col in 0..dim {
        let pivot = (rank..m.len())
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()));
        let Some(pivot) = pivot else { break };
        if m[pivot][col].abs() < 1e-12 {
            continue;
        }
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            let factor = m[r][col] / m[rank][col];
            for c in col..dim {
                m[r][c] -= factor * m[rank][c];
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

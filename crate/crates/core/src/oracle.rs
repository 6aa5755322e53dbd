//! Exhaustive grid search over pairs of unit-sphere points in the plane.
//!
//! This is the slow, trusted reference that the multistart optimizer is
//! checked against: it evaluates the objective on every pair drawn from a
//! deterministic angle grid and reports the extremum together with a
//! neighborhood variation window. The grid always contains the multiples
//! of `pi/4` (where the classical extremal configurations of `l_p` planes
//! live) and, for polyhedral norms, the exact vertex and facet directions
//! of the unit ball, so suprema attained at polygon corners are hit
//! exactly rather than approximated.
//!
//! The same machinery runs on any `Plane`: either a two-dimensional space
//! itself or a two-dimensional section of a higher-dimensional space,
//! which is how the crate searches isosceles pairs in dimension three and
//! up (every pair lies in the plane it spans, so sections lose nothing).

use crate::error::{Error, Result};
use crate::optimize::{Certification, Estimate};
use crate::ortho::{iso_scales_core, PairWitness};
use crate::space::{dot, SpaceSpec, ToleranceConfig, Vector};

/// A two-dimensional slice of a normed space: coordinates are taken in a
/// fixed basis of the slice, and `norm2` evaluates the ambient norm there.
pub(crate) trait Plane {
    fn norm2(&mut self, c: [f64; 2]) -> f64;
    /// Ambient vector with slice coordinates `c`.
    fn lift(&self, c: [f64; 2]) -> Vector;
    /// Directions (in slice coordinates) of unit-ball vertices and facet
    /// normals, when the norm structure exposes them; empty otherwise.
    fn special_angles(&mut self) -> Vec<f64>;
}

/// A two-dimensional space viewed as its own plane.
pub(crate) struct SpacePlane<'a> {
    space: &'a SpaceSpec,
}

impl<'a> SpacePlane<'a> {
    pub(crate) fn new(space: &'a SpaceSpec) -> Result<Self> {
        if space.dim() != 2 {
            return Err(Error::Contract(format!(
                "the grid oracle requires a two-dimensional space, got dim {}",
                space.dim()
            )));
        }
        Ok(SpacePlane { space })
    }
}

impl Plane for SpacePlane<'_> {
    fn norm2(&mut self, c: [f64; 2]) -> f64 {
        self.space.norm_slice(&c)
    }

    fn lift(&self, c: [f64; 2]) -> Vector {
        Vector::new(vec![c[0], c[1]]).expect("finite slice coordinates")
    }

    fn special_angles(&mut self) -> Vec<f64> {
        let rows: Vec<[f64; 2]> = dual_rows(self.space)
            .into_iter()
            .map(|r| [r[0], r[1]])
            .collect();
        poly_special_angles(&rows)
    }
}

/// The plane spanned by two ambient directions, orthonormalized (in the
/// Euclidean sense, purely for numerical conditioning) at construction.
pub(crate) struct SectionPlane<'a> {
    space: &'a SpaceSpec,
    ea: Vec<f64>,
    eb: Vec<f64>,
    buf: Vec<f64>,
}

impl<'a> SectionPlane<'a> {
    pub(crate) fn new(space: &'a SpaceSpec, a: &Vector, b: &Vector) -> Result<Self> {
        let d = space.dim();
        if a.dim() != d || b.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.dim().max(b.dim()),
            });
        }
        let na = dot(a.coords(), a.coords()).sqrt();
        if na < 1e-9 {
            return Err(Error::Degenerate("section direction a is numerically zero".into()));
        }
        let ea: Vec<f64> = a.coords().iter().map(|v| v / na).collect();
        let proj = dot(&ea, b.coords());
        let mut eb: Vec<f64> = b
            .coords()
            .iter()
            .zip(&ea)
            .map(|(v, e)| v - proj * e)
            .collect();
        let nb = dot(&eb, &eb).sqrt();
        if nb < 1e-9 {
            return Err(Error::Degenerate(
                "section directions are numerically parallel".into(),
            ));
        }
        for v in &mut eb {
            *v /= nb;
        }
        Ok(SectionPlane {
            space,
            ea,
            eb,
            buf: vec![0.0; d],
        })
    }
}

impl Plane for SectionPlane<'_> {
    fn norm2(&mut self, c: [f64; 2]) -> f64 {
        for i in 0..self.buf.len() {
            self.buf[i] = c[0].mul_add(self.ea[i], c[1] * self.eb[i]);
        }
        self.space.norm_slice(&self.buf)
    }

    fn lift(&self, c: [f64; 2]) -> Vector {
        let coords: Vec<f64> = self
            .ea
            .iter()
            .zip(&self.eb)
            .map(|(a, b)| c[0].mul_add(*a, c[1] * *b))
            .collect();
        Vector::new(coords).expect("finite section coordinates")
    }

    fn special_angles(&mut self) -> Vec<f64> {
        let rows: Vec<[f64; 2]> = dual_rows(self.space)
            .into_iter()
            .map(|r| [dot(&r, &self.ea), dot(&r, &self.eb)])
            .collect();
        poly_special_angles(&rows)
    }
}

/// Supporting functionals `a` with `||x|| = max |<a, x>|`, for the norm
/// families whose unit ball is a polytope; empty for smooth norms. The
/// returned set is closed under negation. The `l_1` expansion is skipped
/// above dimension 12 (it is exponential in the dimension).
fn dual_rows(space: &SpaceSpec) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    match space {
        SpaceSpec::Polyhedral { functionals, .. } => {
            return functionals.iter().map(|a| a.coords().to_vec()).collect();
        }
        SpaceSpec::Lp { p, dim } => match p {
            crate::space::Exponent::Infinity => {
                for i in 0..*dim {
                    let mut e = vec![0.0; *dim];
                    e[i] = 1.0;
                    rows.push(e);
                }
            }
            crate::space::Exponent::Finite(p) if *p == 1.0 && *dim <= 12 => {
                sign_patterns(&vec![1.0; *dim], &mut rows);
            }
            _ => {}
        },
        SpaceSpec::WeightedLp { p, weights } => match p {
            crate::space::Exponent::Infinity => {
                for (i, w) in weights.iter().enumerate() {
                    let mut e = vec![0.0; weights.len()];
                    e[i] = *w;
                    rows.push(e);
                }
            }
            crate::space::Exponent::Finite(p) if *p == 1.0 && weights.len() <= 12 => {
                sign_patterns(weights, &mut rows);
            }
            _ => {}
        },
        SpaceSpec::DiscretizedSup { grid, .. } => {
            for i in 0..*grid {
                let mut e = vec![0.0; *grid];
                e[i] = 1.0;
                rows.push(e);
            }
        }
    }
    let negs: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|v| -v).collect())
        .collect();
    rows.extend(negs);
    rows
}

/// All `(+1, sigma_2, ..., sigma_d)` sign patterns scaled by `weights`;
/// together with their negations these support the weighted `l_1` norm.
fn sign_patterns(weights: &[f64], rows: &mut Vec<Vec<f64>>) {
    let d = weights.len();
    for mask in 0..(1usize << (d - 1)) {
        let mut row = Vec::with_capacity(d);
        row.push(weights[0]);
        for (i, w) in weights.iter().enumerate().skip(1) {
            let sign = if mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 };
            row.push(sign * w);
        }
        rows.push(row);
    }
}

/// Directions of facet normals and facet-pair intersections (unit-ball
/// vertex candidates) for a polytope norm given by rows of supporting
/// functionals. Vertex enumeration is quadratic in the row count, so it
/// is skipped for more than 40 rows and only normals are reported.
fn poly_special_angles(rows: &[[f64; 2]]) -> Vec<f64> {
    let mut out = Vec::new();
    for r in rows {
        let n2 = r[0] * r[0] + r[1] * r[1];
        if n2 > 1e-20 {
            out.push(r[1].atan2(r[0]));
        }
    }
    if rows.len() <= 40 {
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let (a, b) = (rows[i], rows[j]);
                let det = a[0] * b[1] - a[1] * b[0];
                let scale = (a[0] * a[0] + a[1] * a[1]).sqrt() * (b[0] * b[0] + b[1] * b[1]).sqrt();
                if det.abs() > 1e-12 * scale.max(1e-300) {
                    let x0 = (b[1] - a[1]) / det;
                    let x1 = (a[0] - b[0]) / det;
                    if x0 != 0.0 || x1 != 0.0 {
                        out.push(x1.atan2(x0));
                    }
                }
            }
        }
    }
    out
}

/// The deterministic angle set used by every planar search: `resolution`
/// uniform angles, the multiples of `pi/4`, and the plane's special
/// directions, normalized to `[0, 2pi)`, sorted, deduplicated.
pub(crate) fn plane_thetas<P: Plane>(plane: &mut P, resolution: usize) -> Vec<f64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut thetas: Vec<f64> = (0..resolution)
        .map(|k| two_pi * k as f64 / resolution as f64)
        .collect();
    for k in 0..8 {
        thetas.push(std::f64::consts::FRAC_PI_4 * k as f64);
    }
    thetas.extend(plane.special_angles());
    for t in &mut thetas {
        *t = t.rem_euclid(two_pi);
        if !t.is_finite() {
            *t = 0.0;
        }
    }
    thetas.sort_by(|a, b| a.total_cmp(b));
    thetas.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    thetas
}

/// Unit-sphere point of the plane in direction `theta`.
pub(crate) fn boundary2<P: Plane>(plane: &mut P, theta: f64) -> [f64; 2] {
    let dir = [theta.cos(), theta.sin()];
    let n = plane.norm2(dir);
    debug_assert!(n > 0.0 && n.is_finite());
    [dir[0] / n, dir[1] / n]
}

/// Precomputed angle grid and boundary points for scans over isosceles
/// pairs in a plane.
pub(crate) struct IsoScan {
    pub(crate) thetas: Vec<f64>,
    pub(crate) pts2: Vec<[f64; 2]>,
}

impl IsoScan {
    pub(crate) fn build<P: Plane>(plane: &mut P, resolution: usize) -> Result<IsoScan> {
        check_resolution(resolution)?;
        let thetas = plane_thetas(plane, resolution);
        let pts2 = thetas.iter().map(|t| boundary2(plane, *t)).collect();
        Ok(IsoScan { thetas, pts2 })
    }

    /// Enumerates every feasible triple `(x_i, y_j, lambda)` with
    /// `x_i I-orthogonal to lambda y_j` found by the scale search, in row-major pair
    /// order with ascending `lambda`, and hands the visitor the slice
    /// coordinates of `x_i` and of `z = lambda y_j`.
    pub(crate) fn run<P: Plane>(
        &self,
        plane: &mut P,
        tol: &ToleranceConfig,
        visitor: &mut dyn FnMut(&mut P, usize, usize, f64, [f64; 2], [f64; 2]),
    ) {
        let mut scales: Vec<f64> = Vec::with_capacity(128);
        for (i, &x2) in self.pts2.iter().enumerate() {
            for (j, &y2) in self.pts2.iter().enumerate() {
                iso_scales_core(
                    |l| {
                        let plus = plane.norm2([l.mul_add(y2[0], x2[0]), l.mul_add(y2[1], x2[1])]);
                        let minus =
                            plane.norm2([l.mul_add(-y2[0], x2[0]), l.mul_add(-y2[1], x2[1])]);
                        (plus, minus)
                    },
                    tol.eq_tol,
                    tol.lambda_max,
                    &mut scales,
                );
                for &l in &scales {
                    visitor(plane, i, j, l, x2, [l * y2[0], l * y2[1]]);
                }
            }
        }
    }
}

fn check_resolution(resolution: usize) -> Result<()> {
    if !(8..=65536).contains(&resolution) {
        return Err(Error::Validation(format!(
            "resolution must be between 8 and 65536 (got {resolution})"
        )));
    }
    Ok(())
}

/// Exhaustive scan of `objective` over all grid pairs on the unit sphere
/// of a two-dimensional space; returns the maximum with a grid-certified
/// witness. Non-finite objective values are skipped (and counted); if
/// nothing evaluates finitely the search fails as degenerate.
pub fn grid_sup_2d<F: FnMut(&Vector, &Vector) -> f64>(
    space: &SpaceSpec,
    objective: F,
    resolution: usize,
) -> Result<Estimate> {
    grid_extremum(space, objective, resolution, true)
}

/// Companion of `grid_sup_2d` for infima.
pub fn grid_inf_2d<F: FnMut(&Vector, &Vector) -> f64>(
    space: &SpaceSpec,
    objective: F,
    resolution: usize,
) -> Result<Estimate> {
    grid_extremum(space, objective, resolution, false)
}

fn grid_extremum<F: FnMut(&Vector, &Vector) -> f64>(
    space: &SpaceSpec,
    mut objective: F,
    resolution: usize,
    maximize: bool,
) -> Result<Estimate> {
    check_resolution(resolution)?;
    let mut plane = SpacePlane::new(space)?;
    let thetas = plane_thetas(&mut plane, resolution);
    let n = thetas.len();
    let pts: Vec<Vector> = thetas
        .iter()
        .map(|t| {
            let c = boundary2(&mut plane, *t);
            plane.lift(c)
        })
        .collect();
    let mut vals = vec![f64::NAN; n * n];
    let mut skipped = 0u64;
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        for j in 0..n {
            let v = objective(&pts[i], &pts[j]);
            if !v.is_finite() {
                skipped += 1;
                continue;
            }
            vals[i * n + j] = v;
            let better = match best {
                None => true,
                Some((bv, _, _)) => {
                    if maximize {
                        v > bv
                    } else {
                        v < bv
                    }
                }
            };
            if better {
                best = Some((v, i, j));
            }
        }
    }
    let (value, bi, bj) = best.ok_or_else(|| {
        Error::DegenerateObjective("objective was non-finite on every grid pair".into())
    })?;
    let window = neighbor_window(&vals, n);
    Ok(Estimate {
        value,
        witness: PairWitness::new(pts[bi].clone(), pts[bj].clone(), None)?,
        cert: Certification::GridCertified,
        evals: (n * n) as u64,
        skipped,
        bound_window: window,
    })
}

/// Exhaustive scan of a raw pair objective over the isosceles-orthogonal
/// pairs `(x, lambda y)` found on the grid of a two-dimensional space.
/// The witness records the scaled partner and its `lambda`. Fails as
/// degenerate when the grid exposes no feasible pair with a finite value.
pub fn constrained_grid_sup_2d<F: FnMut(&Vector, &Vector) -> f64>(
    space: &SpaceSpec,
    mut objective: F,
    resolution: usize,
    tol: &ToleranceConfig,
) -> Result<Estimate> {
    tol.validate()?;
    let mut plane = SpacePlane::new(space)?;
    let scan = IsoScan::build(&mut plane, resolution)?;
    let n = scan.pts2.len();
    let pts: Vec<Vector> = scan.pts2.iter().map(|c| plane.lift(*c)).collect();
    let mut cellbest = vec![f64::NAN; n * n];
    let mut best: Option<(f64, usize, usize, f64)> = None;
    let mut evals = 0u64;
    let mut skipped = 0u64;
    scan.run(&mut plane, tol, &mut |plane, i, j, l, _x2, z2| {
        let z = plane.lift(z2);
        let v = objective(&pts[i], &z);
        evals += 1;
        if !v.is_finite() {
            skipped += 1;
            return;
        }
        let cell = &mut cellbest[i * n + j];
        if cell.is_nan() || v > *cell {
            *cell = v;
        }
        let better = match best {
            None => true,
            Some((bv, _, _, _)) => v > bv,
        };
        if better {
            best = Some((v, i, j, l));
        }
    });
    let (value, bi, bj, bl) = best.ok_or_else(|| {
        Error::DegenerateObjective(
            "no isosceles-orthogonal pair with a finite objective value was found at this resolution"
                .into(),
        )
    })?;
    let window = neighbor_window(&cellbest, n);
    Ok(Estimate {
        value,
        witness: PairWitness::new(pts[bi].clone(), pts[bj].scale(bl), Some(bl))?,
        cert: Certification::GridCertified,
        evals,
        skipped,
        bound_window: window,
    })
}

/// Largest absolute change between horizontally or vertically adjacent
/// finite cells, with wraparound (the axes are periodic angles).
pub(crate) fn neighbor_window(vals: &[f64], n: usize) -> Option<f64> {
    let mut window: Option<f64> = None;
    for i in 0..n {
        for j in 0..n {
            let v = vals[i * n + j];
            if v.is_nan() {
                continue;
            }
            for (ni, nj) in [((i + 1) % n, j), (i, (j + 1) % n)] {
                let w = vals[ni * n + nj];
                if w.is_nan() {
                    continue;
                }
                let d = (v - w).abs();
                window = Some(window.map_or(d, |cur| cur.max(d)));
            }
        }
    }
    window
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Exponent;

    fn lp(p: f64) -> SpaceSpec {
        SpaceSpec::lp(Exponent::Finite(p), 2).unwrap()
    }

    fn a2(space: &SpaceSpec) -> impl FnMut(&Vector, &Vector) -> f64 + '_ {
        |x, y| {
            let plus = space.norm(&x.add(y)).unwrap();
            let minus = space.norm(&x.sub(y)).unwrap();
            0.5 * (plus + minus)
        }
    }

    #[test]
    fn euclidean_a2_is_exact_on_the_grid() {
        let space = lp(2.0);
        let est = grid_sup_2d(&space, a2(&space), 64).unwrap();
        assert!((est.value - 2.0f64.sqrt()).abs() <= 1e-12, "value {}", est.value);
        assert_eq!(est.cert, Certification::GridCertified);
        assert!(est.bound_window.unwrap() > 0.0);
    }

    #[test]
    fn l1_a2_attains_two_exactly() {
        let space = lp(1.0);
        let est = grid_sup_2d(&space, a2(&space), 64).unwrap();
        assert!((est.value - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn refinement_is_monotone_for_nested_grids() {
        let space = lp(3.0);
        let mut last = f64::NEG_INFINITY;
        for res in [16usize, 32, 64, 128] {
            let est = grid_sup_2d(&space, a2(&space), res).unwrap();
            assert!(est.value >= last - 1e-15, "res {res}");
            last = est.value;
        }
    }

    #[test]
    fn window_shrinks_with_resolution() {
        let space = lp(2.0);
        let coarse = grid_sup_2d(&space, a2(&space), 32).unwrap();
        let fine = grid_sup_2d(&space, a2(&space), 512).unwrap();
        // The objective is Lipschitz in the angles (slope about 1/2 at
        // its kink), so the window tracks the grid step: 16x the
        // resolution should shrink it by close to 16x, and at 512 the
        // step 2*pi/512 caps it near 6e-3.
        let (w32, w512) = (coarse.bound_window.unwrap(), fine.bound_window.unwrap());
        assert!(w512 < w32 / 8.0, "w32 {w32}, w512 {w512}");
        assert!(w512 < 1e-2, "w512 {w512}");
    }

    #[test]
    fn inf_scan_finds_antipodal_pairs() {
        let space = lp(2.0);
        let est = grid_inf_2d(&space, |x, y| space.norm(&x.add(y)).unwrap(), 64).unwrap();
        assert!(est.value.abs() <= 1e-12, "value {}", est.value);
    }

    #[test]
    fn constrained_scan_euclidean_ratio() {
        let space = lp(2.0);
        let tol = ToleranceConfig::default();
        // sup (||x|| + ||z||) / ||x + z|| over isosceles pairs is sqrt2 in
        // the Euclidean plane, attained at orthogonal pairs of equal norm.
        let est = constrained_grid_sup_2d(
            &space,
            |x, z| {
                let nx = space.norm(x).unwrap();
                let nz = space.norm(z).unwrap();
                (nx + nz) / space.norm(&x.add(z)).unwrap()
            },
            128,
            &tol,
        )
        .unwrap();
        assert!((est.value - 2.0f64.sqrt()).abs() <= 1e-9, "value {}", est.value);
        let w = est.witness;
        assert!(w.lambda.is_some());
        // The witness really is isosceles.
        let plus = space.norm(&w.x.add(&w.y)).unwrap();
        let minus = space.norm(&w.x.sub(&w.y)).unwrap();
        assert!((plus - minus).abs() <= 1e-8);
    }

    #[test]
    fn constrained_scan_sup_norm_ratio_is_two() {
        let space = SpaceSpec::lp(Exponent::Infinity, 2).unwrap();
        let tol = ToleranceConfig::default();
        let est = constrained_grid_sup_2d(
            &space,
            |x, z| {
                let nx = space.norm(x).unwrap();
                let nz = space.norm(z).unwrap();
                (nx + nz) / space.norm(&x.add(z)).unwrap()
            },
            128,
            &tol,
        )
        .unwrap();
        assert!((est.value - 2.0).abs() <= 1e-9, "value {}", est.value);
    }

    #[test]
    fn octagon_vertices_are_grid_points() {
        let oct = SpaceSpec::octagon();
        let mut plane = SpacePlane::new(&oct).unwrap();
        let thetas = plane_thetas(&mut plane, 16);
        // Vertices of the regular octagon ball sit at pi/8 + k pi/4.
        for k in 0..8 {
            let v = std::f64::consts::FRAC_PI_8 + std::f64::consts::FRAC_PI_4 * k as f64;
            let v = v.rem_euclid(2.0 * std::f64::consts::PI);
            assert!(
                thetas.iter().any(|t| (t - v).abs() < 1e-9),
                "vertex angle {v} missing"
            );
        }
    }

    #[test]
    fn degenerate_objective_is_an_error() {
        let space = lp(2.0);
        assert!(matches!(
            grid_sup_2d(&space, |_, _| f64::NAN, 16),
            Err(Error::DegenerateObjective(_))
        ));
    }

    #[test]
    fn dimension_contract_is_enforced() {
        let space = SpaceSpec::lp(Exponent::Finite(2.0), 3).unwrap();
        assert!(matches!(
            grid_sup_2d(&space, |_, _| 1.0, 16),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn section_plane_restricts_the_ambient_norm() {
        let space = SpaceSpec::lp(Exponent::Finite(1.0), 3).unwrap();
        let a = Vector::new(vec![1.0, 0.0, 0.0]).unwrap();
        let b = Vector::new(vec![0.0, 1.0, 0.0]).unwrap();
        let mut plane = SectionPlane::new(&space, &a, &b).unwrap();
        // The section through two coordinate axes of l1(3) is l1(2).
        let v = plane.norm2([0.3, -0.4]);
        assert!((v - 0.7).abs() < 1e-15);
        let lifted = plane.lift([0.3, -0.4]);
        assert_eq!(lifted.coords(), &[0.3, -0.4, 0.0]);
        // Parallel directions are rejected.
        assert!(SectionPlane::new(&space, &a, &a).is_err());
    }
}

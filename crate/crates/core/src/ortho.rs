//! Orthogonality relations in normed spaces.
//!
//! The central notion for this crate is isosceles orthogonality:
//! `x I-orthogonal to y` iff `||x + y|| = ||x - y||`. Equality of floats is decided
//! inside a relative dead band of width `eq_tol`. The module provides the
//! defect function, tests for four classical relations, the `(u, v)`
//! change of variables that trades an isosceles pair for an equal-norm
//! pair, and the scale search that lists every `lambda > 0` making
//! `x I-orthogonal to lambda y` for fixed directions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{bisect_sign_change, golden_min};
use crate::space::{SpaceSpec, ToleranceConfig, Vector};

/// Classical orthogonality relations decidable by norm evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthoKind {
    /// `||x + y|| = ||x - y||`.
    Isosceles,
    /// `||x - y||^2 = ||x||^2 + ||y||^2`.
    Pythagorean,
    /// `||x + t y|| >= ||x||` for every real `t`.
    Birkhoff,
    /// `||x + t y|| = ||x - t y||` for every real `t`.
    Roberts,
}

/// A pair of vectors reported as the argmax (or argmin) of a search.
///
/// For searches over isosceles pairs, `y` is the actual scaled partner
/// and `lambda` records the scale applied to the searched unit direction;
/// for unconstrained searches `lambda` is `None`. Coordinates are always
/// finite; `lambda`, when present, is finite and positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitness {
    pub x: Vector,
    pub y: Vector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl PairWitness {
    pub fn new(x: Vector, y: Vector, lambda: Option<f64>) -> Result<Self> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: y.dim(),
            });
        }
        if let Some(l) = lambda {
            if !l.is_finite() || l <= 0.0 {
                return Err(Error::Validation(format!(
                    "witness lambda must be finite and > 0 (got {l})"
                )));
            }
        }
        Ok(PairWitness { x, y, lambda })
    }
}

/// Isosceles defect `||x + y|| - ||x - y||`; zero exactly on orthogonal
/// pairs.
pub fn iso_defect(space: &SpaceSpec, x: &Vector, y: &Vector) -> Result<f64> {
    let plus = space.norm(&x.add(y))?;
    let minus = space.norm(&x.sub(y))?;
    Ok(plus - minus)
}

/// Decides `x perp y` for the given relation, inside the `eq_tol` dead
/// band of `tol`. The Birkhoff and Roberts relations quantify over a
/// scale `t`; the search covers `|t| <= lambda_max` on a grid plus a
/// golden-section refinement (Birkhoff), which is exact enough because
/// `t -> ||x + t y||` is convex.
pub fn orthogonality_test(
    space: &SpaceSpec,
    kind: OrthoKind,
    x: &Vector,
    y: &Vector,
    tol: &ToleranceConfig,
) -> Result<bool> {
    tol.validate()?;
    let nx = space.norm(x)?;
    let ny = space.norm(y)?;
    match kind {
        OrthoKind::Isosceles => {
            let plus = space.norm(&x.add(y))?;
            let minus = space.norm(&x.sub(y))?;
            let scale = plus.max(minus).max(1.0);
            Ok((plus - minus).abs() <= tol.eq_tol * scale)
        }
        OrthoKind::Pythagorean => {
            let d = space.norm(&x.sub(y))?;
            let lhs = d * d;
            let rhs = nx * nx + ny * ny;
            Ok((lhs - rhs).abs() <= tol.eq_tol * (rhs + 1.0))
        }
        OrthoKind::Birkhoff => {
            // Convex in t, so grid + golden refinement finds the min.
            let mut h = |t: f64| space.norm_slice_combo(x, t, y);
            let n = 1024usize;
            let (mut best_t, mut best_v) = (0.0f64, nx);
            for k in 0..=n {
                let t = -tol.lambda_max + 2.0 * tol.lambda_max * k as f64 / n as f64;
                let v = h(t);
                if v < best_v {
                    best_v = v;
                    best_t = t;
                }
            }
            let step = 2.0 * tol.lambda_max / n as f64;
            let (_, refined) = golden_min(&mut h, best_t - step, best_t + step, 120);
            let min = refined.min(best_v);
            Ok(min >= nx - tol.eq_tol * (nx + 1.0))
        }
        OrthoKind::Roberts => {
            let n = 256usize;
            for k in 0..=n {
                let t = tol.lambda_max * k as f64 / n as f64;
                let plus = space.norm_slice_combo(x, t, y);
                let minus = space.norm_slice_combo(x, -t, y);
                let scale = plus.max(minus).max(1.0);
                if (plus - minus).abs() > tol.eq_tol * scale {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Rebuilds an isosceles pair from the equal-norm change of variables:
/// given `||u|| = ||v||` (within the dead band) and `scale > 0`, returns
/// `x = scale (u + v)`, `y = scale (u - v)`, which satisfy `x I-orthogonal to y`
/// because `||x + y|| = 2 scale ||u||` and `||x - y|| = 2 scale ||v||`.
pub fn pair_from_uv(
    space: &SpaceSpec,
    u: &Vector,
    v: &Vector,
    scale: f64,
    tol: &ToleranceConfig,
) -> Result<PairWitness> {
    tol.validate()?;
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::Validation(format!("scale must be finite and > 0 (got {scale})")));
    }
    let nu = space.norm(u)?;
    let nv = space.norm(v)?;
    if nu < 1e-12 && nv < 1e-12 {
        return Err(Error::Degenerate("u and v are both numerically zero".into()));
    }
    if (nu - nv).abs() > tol.eq_tol * nu.max(nv).max(1.0) {
        return Err(Error::Contract(format!(
            "u and v must have equal norms within the dead band (got {nu} and {nv})"
        )));
    }
    let x = u.add(v).scale(scale);
    let y = u.sub(v).scale(scale);
    PairWitness::new(x, y, None)
}

/// All scales `lambda in (0, lambda_max]` with `x I-orthogonal to lambda y`, for
/// fixed nonzero `x` and `y`.
///
/// The defect `g(lambda) = ||x + lambda y|| - ||x - lambda y||` is scanned
/// on a 512-point grid; isolated sign changes are bisected to roots, and
/// plateau stretches where `|g|` stays inside the dead band are returned
/// through representatives (both endpoints plus every eighth grid point)
/// rather than the full continuum. The result is sorted ascending and
/// deduplicated; it is empty when no scale works.
pub fn isosceles_scales(
    space: &SpaceSpec,
    x: &Vector,
    y: &Vector,
    tol: &ToleranceConfig,
) -> Result<Vec<f64>> {
    tol.validate()?;
    if space.norm(x)? < 1e-12 {
        return Err(Error::Degenerate("x is numerically zero".into()));
    }
    if space.norm(y)? < 1e-12 {
        return Err(Error::Degenerate("y is numerically zero".into()));
    }
    let mut out = Vec::new();
    let mut plus = vec![0.0f64; space.dim()];
    let mut minus = vec![0.0f64; space.dim()];
    let xs = x.coords();
    let ys = y.coords();
    iso_scales_core(
        |lambda| {
            for i in 0..xs.len() {
                plus[i] = lambda.mul_add(ys[i], xs[i]);
                minus[i] = lambda.mul_add(-ys[i], xs[i]);
            }
            (space.norm_slice(&plus), space.norm_slice(&minus))
        },
        tol.eq_tol,
        tol.lambda_max,
        &mut out,
    );
    Ok(out)
}

/// Grid resolution of the scale search; `lambda = 1` must be a grid point
/// (it is: `512 * 1/16 = 32`), because exact-arithmetic plateaus are
/// reported through grid representatives.
const SCALE_GRID: usize = 512;

/// Interior plateau points are thinned to every eighth grid index.
const PLATEAU_STRIDE: usize = 8;

/// Core of the scale search, shared by the ambient-space and section
/// implementations. `norm_pm(lambda)` returns
/// `(||x + lambda y||, ||x - lambda y||)`. Appends results to `out`
/// (cleared first), sorted ascending.
pub(crate) fn iso_scales_core<F: FnMut(f64) -> (f64, f64)>(
    mut norm_pm: F,
    eq_tol: f64,
    lambda_max: f64,
    out: &mut Vec<f64>,
) {
    out.clear();
    let n = SCALE_GRID;
    let mut g = [0.0f64; SCALE_GRID + 1];
    let mut plateau = [false; SCALE_GRID + 1];
    let lambda_at = |i: usize| lambda_max * i as f64 / n as f64;
    for i in 1..=n {
        let (np, nm) = norm_pm(lambda_at(i));
        g[i] = np - nm;
        plateau[i] = g[i].abs() <= eq_tol * np.max(nm).max(1.0);
    }
    let mut i = 1usize;
    while i <= n {
        if plateau[i] {
            let mut j = i;
            while j < n && plateau[j + 1] {
                j += 1;
            }
            out.push(lambda_at(i));
            for k in i + 1..j {
                if k % PLATEAU_STRIDE == 0 {
                    out.push(lambda_at(k));
                }
            }
            if j > i {
                out.push(lambda_at(j));
            }
            i = j + 1;
        } else {
            if i < n && !plateau[i + 1] && g[i] * g[i + 1] < 0.0 {
                let root = bisect_sign_change(
                    |lambda| {
                        let (np, nm) = norm_pm(lambda);
                        np - nm
                    },
                    lambda_at(i),
                    lambda_at(i + 1),
                    g[i],
                    60,
                );
                out.push(root);
            }
            i += 1;
        }
    }
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * lambda_max);
}

impl SpaceSpec {
    /// `||x + t y||` without allocating; only used by the quantified
    /// orthogonality tests above.
    fn norm_slice_combo(&self, x: &Vector, t: f64, y: &Vector) -> f64 {
        // Cold path: allocation per call is fine here.
        let v: Vec<f64> = x
            .coords()
            .iter()
            .zip(y.coords())
            .map(|(a, b)| t.mul_add(*b, *a))
            .collect();
        self.norm_slice(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Exponent;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn l1() -> SpaceSpec {
        SpaceSpec::lp(Exponent::Finite(1.0), 2).unwrap()
    }

    fn l2() -> SpaceSpec {
        SpaceSpec::lp(Exponent::Finite(2.0), 2).unwrap()
    }

    #[test]
    fn euclidean_orthogonality_passes_all_relations() {
        let tol = ToleranceConfig::default();
        let space = l2();
        let (x, y) = (v(&[1.0, 0.0]), v(&[0.0, 1.0]));
        for kind in [
            OrthoKind::Isosceles,
            OrthoKind::Pythagorean,
            OrthoKind::Birkhoff,
            OrthoKind::Roberts,
        ] {
            assert!(orthogonality_test(&space, kind, &x, &y, &tol).unwrap());
        }
        let skew = v(&[1.0, 0.3]);
        for kind in [
            OrthoKind::Isosceles,
            OrthoKind::Pythagorean,
            OrthoKind::Birkhoff,
            OrthoKind::Roberts,
        ] {
            assert!(!orthogonality_test(&space, kind, &skew, &y, &tol).unwrap());
        }
    }

    #[test]
    fn l1_separates_isosceles_from_pythagorean() {
        let tol = ToleranceConfig::default();
        let space = l1();
        let (x, y) = (v(&[1.0, 1.0]), v(&[1.0, -1.0]));
        assert!(orthogonality_test(&space, OrthoKind::Isosceles, &x, &y, &tol).unwrap());
        // ||x - y||^2 = 4 but ||x||^2 + ||y||^2 = 8.
        assert!(!orthogonality_test(&space, OrthoKind::Pythagorean, &x, &y, &tol).unwrap());
    }

    #[test]
    fn birkhoff_is_not_symmetric_in_l1() {
        let tol = ToleranceConfig::default();
        let space = l1();
        let x = v(&[1.0, 0.0]);
        let y = v(&[-0.5, 1.0]);
        assert!(orthogonality_test(&space, OrthoKind::Birkhoff, &x, &y, &tol).unwrap());
        assert!(!orthogonality_test(&space, OrthoKind::Birkhoff, &y, &x, &tol).unwrap());
    }

    #[test]
    fn defect_signs_match_inner_product() {
        let space = l2();
        // <x, y> > 0 gives positive defect, < 0 negative.
        let x = v(&[1.0, 0.0]);
        assert!(iso_defect(&space, &x, &v(&[0.5, 1.0])).unwrap() > 0.0);
        assert!(iso_defect(&space, &x, &v(&[-0.5, 1.0])).unwrap() < 0.0);
        assert!(iso_defect(&space, &x, &v(&[0.0, 1.0])).unwrap().abs() < 1e-15);
    }

    #[test]
    fn pair_from_uv_round_trips() {
        let tol = ToleranceConfig::default();
        let space = l1();
        let u = v(&[1.0, 0.0]);
        let w = v(&[0.0, 1.0]);
        let pair = pair_from_uv(&space, &u, &w, 1.0, &tol).unwrap();
        assert_eq!(pair.x, v(&[1.0, 1.0]));
        assert_eq!(pair.y, v(&[1.0, -1.0]));
        assert!(orthogonality_test(&space, OrthoKind::Isosceles, &pair.x, &pair.y, &tol).unwrap());
        // Unequal norms are a contract violation.
        let bad = pair_from_uv(&space, &u, &v(&[0.0, 2.0]), 1.0, &tol);
        assert!(matches!(bad, Err(Error::Contract(_))));
    }

    #[test]
    fn scales_on_euclidean_orthogonal_pair_form_a_plateau() {
        let tol = ToleranceConfig::default();
        let space = l2();
        let scales =
            isosceles_scales(&space, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &tol).unwrap();
        assert!(!scales.is_empty());
        // Every scale works in exact arithmetic; lambda = 1 must be listed.
        assert!(scales.iter().any(|l| (*l - 1.0).abs() < 1e-12));
        // Sorted ascending.
        assert!(scales.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn scales_absent_when_defect_never_vanishes() {
        let tol = ToleranceConfig::default();
        let space = l2();
        // <x, y> > 0 for y = (1, 1)/sqrt2, so g(lambda) > 0 for all lambda.
        let y = space.unit(&v(&[1.0, 1.0])).unwrap();
        let scales = isosceles_scales(&space, &v(&[1.0, 0.0]), &y, &tol).unwrap();
        assert!(scales.is_empty());
    }

    #[test]
    fn every_returned_scale_has_tiny_defect() {
        let tol = ToleranceConfig::default();
        for space in [
            l1(),
            l2(),
            SpaceSpec::lp(Exponent::Finite(3.0), 2).unwrap(),
            SpaceSpec::octagon(),
        ] {
            for k in 0..12 {
                let a = 2.0 * std::f64::consts::PI * (k as f64) / 12.0 + 0.05;
                let b = a + 1.3;
                let x = space.boundary_point_2d(a).unwrap();
                let y = space.boundary_point_2d(b).unwrap();
                for lambda in isosceles_scales(&space, &x, &y, &tol).unwrap() {
                    let z = y.scale(lambda);
                    let plus = space.norm(&x.add(&z)).unwrap();
                    let minus = space.norm(&x.sub(&z)).unwrap();
                    let band = 1e-6 * plus.max(minus).max(1.0);
                    assert!(
                        (plus - minus).abs() <= band,
                        "space {space}, lambda {lambda}: defect {}",
                        plus - minus
                    );
                }
            }
        }
    }

    #[test]
    fn scales_reject_zero_vectors() {
        let tol = ToleranceConfig::default();
        let space = l2();
        let zero = v(&[0.0, 0.0]);
        assert!(matches!(
            isosceles_scales(&space, &zero, &v(&[1.0, 0.0]), &tol),
            Err(Error::Degenerate(_))
        ));
    }
}

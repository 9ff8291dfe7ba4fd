//! The equidistant conic with two standard parallels (Delisle's projection).
//!
//! Meridians are straight lines through a common apex, spaced so that
//! latitude degrees are equal along them; parallels are circles about the
//! apex, hence orthogonal to the meridians. With `ρ(φ) = ρ₁ + (φ₁ − φ)` and
//! cone constant `n`, the parallel scale is
//!
//! ```text
//! k(φ) = n·ρ(φ) / cos φ
//! ```
//!
//! Requiring `k(φ₁) = k(φ₂) = 1` fixes `n = (cos φ₁ − cos φ₂)/(φ₂ − φ₁)`
//! and `ρ₁ = cos φ₁ / n`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{chord_deviation, fit_circle};
use crate::projections::{PlanePoint, ProjectionSpec};
use crate::scalar::Scalar;
use crate::sphere::{sample_geodesic, GeoPoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicParams<T> {
    phi1: T,
    phi2: T,
    n: T,
    rho1: T,
}

impl<T: Scalar> ConicParams<T> {
    pub fn phi1(&self) -> T {
        self.phi1
    }

    pub fn phi2(&self) -> T {
        self.phi2
    }

    /// Cone constant: plane angle at the apex per unit of longitude.
    pub fn n(&self) -> T {
        self.n
    }

    /// Plane radius of the parallel `phi1` about the apex.
    pub fn rho1(&self) -> T {
        self.rho1
    }

    /// Plane radius of the parallel `phi` about the apex.
    pub fn rho(&self, phi: T) -> T {
        self.rho1 + (self.phi1 - phi)
    }

    /// Latitude coordinate at which `ρ` vanishes.
    pub fn apex_latitude(&self) -> T {
        self.phi1 + self.rho1
    }

    /// Ratio of the longitude degree to the latitude degree on the map,
    /// divided by the same ratio on the sphere.
    pub fn parallel_scale(&self, phi: T) -> Result<T> {
        let apex = self.apex_latitude();
        if phi >= apex {
            return Err(Error::BeyondApex { lat: phi.as_f64().to_degrees(), apex: apex.as_f64().to_degrees() });
        }
        if !(phi.abs() < T::FRAC_PI_2()) {
            return Err(Error::InvalidLatitude(phi.as_f64().to_degrees()));
        }
        Ok(self.n * self.rho(phi) / phi.cos())
    }

    pub fn spec(self) -> ProjectionSpec<T> {
        ProjectionSpec::EquidistantConic { params: self }
    }
}

/// `(cos a − cos b)/(b − a)` without cancellation; tends to `sin a` as
/// `b → a`.
pub fn cone_constant<T: Scalar>(a: T, b: T) -> T {
    let half = (b - a) * T::half();
    let mid = (a + b) * T::half();
    if half == T::zero() {
        return mid.sin();
    }
    mid.sin() * half.sin() / half
}

/// Parallel scale at `phi` of the conic through standard parallels `a`,
/// `b`, written so that it stays finite when `n = 0` (the cylindrical
/// limit of a window symmetric about the equator).
pub fn pair_scale<T: Scalar>(a: T, b: T, phi: T) -> T {
    let n = cone_constant(a, b);
    (a.cos() + n * (a - phi)) / phi.cos()
}

/// Builds the conic that is true to scale on `phi1` and `phi2`.
pub fn build_conic<T: Scalar>(phi1: T, phi2: T) -> Result<ConicParams<T>> {
    if !(phi1.is_finite() && phi2.is_finite()) {
        return Err(Error::BadParallels("non-finite latitude".into()));
    }
    if !(phi1 > T::zero() && phi2 < T::FRAC_PI_2()) {
        return Err(Error::BadParallels("standard parallels must lie in (0°, 90°)".into()));
    }
    if !(phi1 < phi2) {
        return Err(Error::BadParallels(format!(
            "phi1 must be below phi2 (got {}° and {}°)",
            phi1.as_f64().to_degrees(),
            phi2.as_f64().to_degrees()
        )));
    }
    let n = cone_constant(phi1, phi2);
    Ok(ConicParams { phi1, phi2, n, rho1: phi1.cos() / n })
}

fn check_window<T: Scalar>(phi_s: T, phi_n: T, allow_equal: bool) -> Result<()> {
    let half_pi = T::FRAC_PI_2();
    let ordered = if allow_equal { phi_s <= phi_n } else { phi_s < phi_n };
    if !(phi_s.is_finite() && phi_n.is_finite() && phi_s > -half_pi && phi_n < half_pi) {
        return Err(Error::BadWindow("window must lie strictly inside (-90°, 90°)".into()));
    }
    if !ordered {
        return Err(Error::BadWindow(format!(
            "southern edge {}° must be below northern edge {}°",
            phi_s.as_f64().to_degrees(),
            phi_n.as_f64().to_degrees()
        )));
    }
    Ok(())
}

/// Standard parallels a quarter of the window in from each edge, i.e.
/// halfway between each edge and the central parallel.
pub fn midpoint_standard_parallels<T: Scalar>(phi_s: T, phi_n: T) -> Result<(T, T)> {
    check_window(phi_s, phi_n, false)?;
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    Ok(((three * phi_s + phi_n) / four, (phi_s + three * phi_n) / four))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation<T> {
    pub value: T,
    pub argmax_phi: T,
}

const DENSE_INTERVALS: usize = 2048;

fn golden_max<T: Scalar>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, tol: T) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Largest `|k(φ) − 1|` over `[phi_s, phi_n]`: dense sampling, then a
/// golden-section refinement around the best sample.
pub fn max_deviation<T: Scalar>(params: &ConicParams<T>, phi_s: T, phi_n: T) -> Result<Deviation<T>> {
    check_window(phi_s, phi_n, true)?;
    params.parallel_scale(phi_n)?;
    let dev = |phi: T| (params.parallel_scale(phi).expect("inside window") - T::one()).abs();
    if phi_s == phi_n {
        return Ok(Deviation { value: dev(phi_s), argmax_phi: phi_s });
    }
    let width = phi_n - phi_s;
    let cells = T::from_usize(DENSE_INTERVALS).unwrap();
    let at = |i: usize| {
        if i == DENSE_INTERVALS {
            phi_n
        } else {
            phi_s + width * T::from_usize(i).unwrap() / cells
        }
    };
    let (mut best_i, mut best) = (0, dev(phi_s));
    for i in 1..=DENSE_INTERVALS {
        let v = dev(at(i));
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut result = Deviation { value: best, argmax_phi: at(best_i) };
    if best_i > 0 && best_i < DENSE_INTERVALS {
        let (x, v) = golden_max(dev, at(best_i - 1), at(best_i + 1), T::tol(1e-12));
        if v > result.value {
            result = Deviation { value: v, argmax_phi: x };
        }
    }
    Ok(result)
}

/// Minimax objective of a candidate pair over a window.
///
/// For `n·ρ > 0` the numerator of `k′` is increasing in `φ`, so `k` has at
/// most one critical point (a minimum) and the deviation peaks at an edge
/// or there; the critical point is bracketed by bisection on `k′`.
pub fn pair_deviation<T: Scalar>(a: T, b: T, phi_s: T, phi_n: T) -> T {
    let n = cone_constant(a, b);
    let k = |phi: T| pair_scale(a, b, phi);
    // sign of k'(φ) · cos²φ
    let slope = |phi: T| -n * phi.cos() + (a.cos() + n * (a - phi)) * phi.sin();
    let edge = (k(phi_s) - T::one()).abs().max((k(phi_n) - T::one()).abs());
    if slope(phi_s) >= T::zero() || slope(phi_n) <= T::zero() {
        return edge;
    }
    let (mut lo, mut hi) = (phi_s, phi_n);
    for _ in 0..100 {
        let mid = (lo + hi) * T::half();
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    edge.max((k((lo + hi) * T::half()) - T::one()).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerResult<T> {
    pub phi1_opt: T,
    pub phi2_opt: T,
    pub minimax_deviation: T,
    pub midpoint_deviation: T,
    /// `midpoint_deviation / minimax_deviation`, at least 1.
    pub improvement_ratio: T,
}

/// Grid resolution of the coarse search.
pub const OPTIMIZER_GRID: usize = 200;

/// Minimises the largest parallel-scale deviation over the window with
/// respect to both standard parallels.
///
/// A 200 × 200 grid over `phi_s < phi1 < phi2 < phi_n` seeds a refinement
/// that alternates golden-section line searches along each coordinate with
/// a shrinking pattern search along the axes and diagonals. The midpoint
/// pair is always a candidate, so the result is never worse than it.
pub fn optimize_standard_parallels<T: Scalar>(phi_s: T, phi_n: T) -> Result<OptimizerResult<T>> {
    check_window(phi_s, phi_n, false)?;
    let (m1, m2) = midpoint_standard_parallels(phi_s, phi_n)?;
    let objective = |a: T, b: T| {
        if !(phi_s < a && a < b && b < phi_n) {
            return T::infinity();
        }
        pair_deviation(a, b, phi_s, phi_n)
    };
    let midpoint_deviation = objective(m1, m2);

    let cells = T::from_usize(OPTIMIZER_GRID).unwrap();
    let width = phi_n - phi_s;
    let node = |i: usize| phi_s + width * T::from_usize(i).unwrap() / cells;
    let pairs: Vec<(usize, usize)> = (1..OPTIMIZER_GRID)
        .flat_map(|i| ((i + 1)..OPTIMIZER_GRID).map(move |j| (i, j)))
        .collect();
    // lowest index wins ties
    let (gi, gj, gv) = pairs
        .par_iter()
        .map(|&(i, j)| (i, j, objective(node(i), node(j))))
        .reduce(
            || (usize::MAX, usize::MAX, T::infinity()),
            |x, y| {
                if y.2 < x.2 || (y.2 == x.2 && (y.0, y.1) < (x.0, x.1)) {
                    y
                } else {
                    x
                }
            },
        );

    let (mut a, mut b, mut best) = if midpoint_deviation <= gv { (m1, m2, midpoint_deviation) } else { (node(gi), node(gj), gv) };
    let cell = width / cells;
    let tol = T::tol(1e-8);

    let golden_min = |f: &dyn Fn(T) -> T, lo: T, hi: T| golden_max(|x| -f(x), lo, hi, tol * T::lit(1e-2));
    for _ in 0..50 {
        let before = best;
        let (x, v) = golden_min(&|x| objective(x, b), (a - cell).max(phi_s), (a + cell).min(b));
        if -v < best {
            a = x;
            best = -v;
        }
        let (x, v) = golden_min(&|x| objective(a, x), (b - cell).max(a), (b + cell).min(phi_n));
        if -v < best {
            b = x;
            best = -v;
        }
        if before - best <= T::epsilon() * best {
            break;
        }
    }
    // pattern search handles the kinks where the coordinate steps stall
    let dirs = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)];
    let mut step = cell;
    while step > tol * T::lit(1e-2) {
        let mut moved = false;
        for (da, db) in dirs {
            let (ca, cb) = (a + step * T::lit(da as f64), b + step * T::lit(db as f64));
            let v = objective(ca, cb);
            if v < best {
                a = ca;
                b = cb;
                best = v;
                moved = true;
                break;
            }
        }
        if !moved {
            step = step * T::half();
        }
    }
    let ratio = if best > T::zero() { midpoint_deviation / best } else { T::one() };
    Ok(OptimizerResult {
        phi1_opt: a,
        phi2_opt: b,
        minimax_deviation: best,
        midpoint_deviation,
        improvement_ratio: ratio,
    })
}

/// Latitude coordinate of the point where all meridian images meet.
pub fn apex_latitude<T: Scalar>(params: &ConicParams<T>) -> T {
    params.apex_latitude()
}

/// Plane angle at the apex spanned by `dlon` of longitude.
pub fn parallel_angular_span<T: Scalar>(params: &ConicParams<T>, dlon: T) -> T {
    params.n * dlon
}

/// Longitude covered by a given plane angle at the apex; a half-turn
/// gives `π/n`.
pub fn longitude_for_plane_angle<T: Scalar>(params: &ConicParams<T>, angle: T) -> T {
    angle / params.n
}

/// How far a projected great-circle arc is from a straight segment and
/// from its best-fit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcFit<T> {
    pub chord: T,
    /// Largest perpendicular distance from the chord.
    pub max_line_residual: T,
    /// `None` when the image is a straight segment to working precision.
    pub circle: Option<CircleSummary<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSummary<T> {
    pub center: PlanePoint<T>,
    pub radius: T,
    pub rms_residual: T,
}

/// Projects a sampled arc, unwrapping longitude so that a seamed map is
/// followed continuously; fails if the arc leaves the domain.
pub fn project_arc<T: Scalar>(
    spec: &ProjectionSpec<T>,
    a: GeoPoint<T>,
    b: GeoPoint<T>,
    nsamples: usize,
) -> Result<Vec<PlanePoint<T>>> {
    let pts = sample_geodesic(a, b, nsamples)?;
    let tau = T::PI() + T::PI();
    let mut out = Vec::with_capacity(pts.len());
    let mut prev_lon: Option<T> = None;
    for p in pts {
        let mut lon = p.lon();
        if let Some(prev) = prev_lon {
            while lon - prev > T::PI() {
                lon = lon - tau;
            }
            while prev - lon > T::PI() {
                lon = lon + tau;
            }
        }
        prev_lon = Some(lon);
        if spec.has_seam() && lon.abs() > T::PI() {
            return Err(Error::OutOfDomain("arc crosses the antimeridian cut".into()));
        }
        out.push(spec.forward_unwrapped(p.lat(), lon)?);
    }
    Ok(out)
}

/// Fits an already projected arc.
pub fn arc_fit<T: Scalar>(pts: &[PlanePoint<T>]) -> Result<ArcFit<T>> {
    let (sagitta, chord) = chord_deviation(pts)?;
    let circle = fit_circle(pts)?.map(|c| CircleSummary {
        center: c.center,
        radius: c.radius,
        rms_residual: c.rms_residual,
    });
    Ok(ArcFit { chord, max_line_residual: sagitta, circle })
}

/// Straightness of the conic image of the great-circle arc from `a` to `b`.
pub fn geodesic_flatness<T: Scalar>(
    params: &ConicParams<T>,
    a: GeoPoint<T>,
    b: GeoPoint<T>,
    nsamples: usize,
) -> Result<ArcFit<T>> {
    if nsamples < 16 {
        return Err(Error::BadSampleCount(nsamples));
    }
    let pts = project_arc(&params.spec(), a, b, nsamples)?;
    arc_fit(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(d: f64) -> f64 {
        d.to_radians()
    }

    fn fixture() -> ConicParams<f64> {
        build_conic(r(47.5), r(62.5)).unwrap()
    }

    #[test]
    fn midpoint_rule() {
        let (a, b) = midpoint_standard_parallels(r(40.0), r(70.0)).unwrap();
        assert!((a.to_degrees() - 47.5).abs() < 1e-12);
        assert!((b.to_degrees() - 62.5).abs() < 1e-12);
        let (a, b) = midpoint_standard_parallels(-0.6f64, 0.6).unwrap();
        assert!((a + 0.3).abs() < 1e-15 && (b - 0.3).abs() < 1e-15);
        let (a, b) = midpoint_standard_parallels(0.0, r(60.0)).unwrap();
        assert!((a.to_degrees() - 15.0).abs() < 1e-12 && (b.to_degrees() - 45.0).abs() < 1e-12);
        assert!(matches!(midpoint_standard_parallels(r(70.0), r(40.0)), Err(Error::BadWindow(_))));
        assert!(matches!(midpoint_standard_parallels(r(-90.0), r(40.0)), Err(Error::BadWindow(_))));
    }

    #[test]
    fn conic_constants() {
        let p = fixture();
        // independent arithmetic from k(φ₁) = k(φ₂) = 1
        let n = (r(47.5).cos() - r(62.5).cos()) / r(15.0);
        assert!((p.n() - n).abs() < 1e-12);
        assert!((p.n() - 0.816_814_7).abs() < 1e-6);
        assert!((p.rho1() - r(47.5).cos() / n).abs() < 1e-12);
        assert!((p.rho1() - 0.827_103_4).abs() < 1e-6);
        assert!((p.parallel_scale(p.phi1()).unwrap() - 1.0).abs() < 1e-12);
        assert!((p.parallel_scale(p.phi2()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_parallels() {
        assert!(matches!(build_conic(r(70.0), r(40.0)), Err(Error::BadParallels(_))));
        assert!(matches!(build_conic(r(40.0), r(40.0)), Err(Error::BadParallels(_))));
        assert!(matches!(build_conic(r(-10.0), r(40.0)), Err(Error::BadParallels(_))));
        assert!(matches!(build_conic(r(10.0), r(90.0)), Err(Error::BadParallels(_))));
    }

    #[test]
    fn tangent_limit() {
        let phi1 = r(45.0);
        let p = build_conic(phi1, phi1 + 1e-6).unwrap();
        assert!((p.n() - phi1.sin()).abs() < 1e-6);
        assert_eq!(cone_constant(phi1, phi1), phi1.sin());
        // apex of the tangent cone: φ₁ + cot φ₁
        let apex = phi1 + phi1.cos() / phi1.sin();
        assert!((apex.to_degrees() - 102.2958).abs() < 1e-3);
        assert!((p.apex_latitude() - apex).abs() < 1e-5);
    }

    #[test]
    fn scale_values() {
        let p = fixture();
        assert!((p.parallel_scale(r(70.0)).unwrap() - 1.037_447).abs() < 1e-6);
        assert!((p.parallel_scale(r(55.0)).unwrap() - 0.991_445).abs() < 1e-6);
        assert!(matches!(p.parallel_scale(r(96.0)), Err(Error::BeyondApex { .. })));
    }

    #[test]
    fn deviation_profile() {
        let p = fixture();
        let d = max_deviation(&p, r(40.0), r(70.0)).unwrap();
        assert!((d.value - 0.037_447_13).abs() < 1e-8);
        assert_eq!(d.argmax_phi, r(70.0));

        let d = max_deviation(&p, p.phi1(), p.phi2()).unwrap();
        let min_k = 0.991_410_885_6;
        assert!((d.value - (1.0 - min_k)).abs() < 1e-9, "{}", d.value);
        assert!((d.argmax_phi.to_degrees() - 55.476).abs() < 1e-2);

        let d = max_deviation(&p, p.phi1(), p.phi1()).unwrap();
        assert!(d.value < 1e-15);
    }

    #[test]
    fn pair_objective_matches_dense_search() {
        let p = fixture();
        let fast = pair_deviation(p.phi1(), p.phi2(), r(40.0), r(70.0));
        let slow = max_deviation(&p, r(40.0), r(70.0)).unwrap().value;
        assert!((fast - slow).abs() < 1e-14);
        let fast = pair_deviation(p.phi1(), p.phi2(), r(50.0), r(60.0));
        let slow = max_deviation(&p, r(50.0), r(60.0)).unwrap().value;
        assert!((fast - slow).abs() < 1e-12);
    }

    #[test]
    fn symmetric_window_is_finite() {
        // n = 0: cylindrical limit
        assert_eq!(cone_constant(-0.3, 0.3), 0.0);
        let k = pair_scale(-0.3f64, 0.3, 0.0);
        assert!((k - 0.3f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn apex_and_span() {
        let p = fixture();
        assert!((apex_latitude(&p).to_degrees() - 94.8895).abs() < 1e-3);
        let lon = longitude_for_plane_angle(&p, std::f64::consts::PI).to_degrees();
        assert!((lon - 220.368).abs() < 1e-3);
        assert_eq!(parallel_angular_span(&p, 0.0), 0.0);
        assert!(parallel_angular_span(&p, std::f64::consts::TAU) < std::f64::consts::TAU);
    }

    #[test]
    fn meridian_arc_is_straight() {
        let p = fixture();
        let a = GeoPoint::from_degrees(42.0, 20.0).unwrap();
        let b = GeoPoint::from_degrees(68.0, 20.0).unwrap();
        let fit = geodesic_flatness(&p, a, b, 64).unwrap();
        assert!(fit.max_line_residual < 1e-10);
        assert!(fit.circle.is_none());
        assert!(matches!(geodesic_flatness(&p, a, b, 8), Err(Error::BadSampleCount(8))));
        assert!(matches!(geodesic_flatness(&p, a, a, 32), Err(Error::DegenerateArc)));
    }

    #[test]
    fn arc_crossing_the_cut_is_rejected() {
        let p = fixture();
        let a = GeoPoint::from_degrees(50.0, 170.0).unwrap();
        let b = GeoPoint::from_degrees(50.0, -170.0).unwrap();
        assert!(matches!(geodesic_flatness(&p, a, b, 32), Err(Error::OutOfDomain(_))));
    }
}

//! Local metric analysis of a projection by finite differences.
//!
//! At a point the forward map is differentiated along the meridian and the
//! parallel through it. From the two image vectors we read
//!
//! * `h`, the scale along the meridian,
//! * `k`, the scale along the parallel (against true arc length, so the
//!   longitude derivative is divided by `cos φ`),
//! * `theta`, the angle between the images of the two directions,
//! * `omega`, the maximal angular distortion `2·asin((σ₁−σ₂)/(σ₁+σ₂))`,
//! * `s = h·k·sin θ`, the areal scale.
//!
//! A map that kept `h = k = 1` and `theta = π/2` everywhere would preserve
//! lengths along both foliations and send them to orthogonal families. The
//! "perfect defect" measures how far a projection is from that on a region.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::projections::{PlanePoint, ProjectionSpec};
use crate::scalar::Scalar;
use crate::sphere::{GeoPoint, Region};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample<T> {
    pub at: GeoPoint<T>,
    pub h: T,
    pub k: T,
    pub theta: T,
    pub omega: T,
    pub s: T,
}

/// How the partial derivatives are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Differencing {
    /// Second-order central differences.
    #[default]
    Central,
    /// Richardson extrapolation of central differences at `step` and
    /// `step/2`; fourth order.
    Richardson,
}

fn central<T: Scalar>(
    spec: &ProjectionSpec<T>,
    lat: T,
    lon: T,
    step: T,
) -> Result<(PlanePoint<T>, PlanePoint<T>)> {
    let f = |la: T, lo: T| spec.forward_unwrapped(la, lo);
    let two_h = step + step;
    let (n, s) = (f(lat + step, lon)?, f(lat - step, lon)?);
    let (e, w) = (f(lat, lon + step)?, f(lat, lon - step)?);
    Ok((
        PlanePoint::new((n.x - s.x) / two_h, (n.y - s.y) / two_h),
        PlanePoint::new((e.x - w.x) / two_h, (e.y - w.y) / two_h),
    ))
}

/// Partial derivatives of the forward map with respect to latitude and
/// longitude at `p`.
pub fn partials<T: Scalar>(
    spec: &ProjectionSpec<T>,
    p: GeoPoint<T>,
    step: T,
    diff: Differencing,
) -> Result<(PlanePoint<T>, PlanePoint<T>)> {
    if !(step > T::zero() && step <= T::lit(1e-3)) {
        return Err(Error::BadStep(step.as_f64()));
    }
    let (lat, lon) = (p.lat(), p.lon());
    if lat.cos() < T::lit(1e-6) || p.is_pole() {
        return Err(Error::NearPole(p.lat_deg()));
    }
    if (lat.abs() + step) > T::FRAC_PI_2() {
        return Err(Error::OutOfDomain("difference stencil crosses a pole".into()));
    }
    spec.forward(p)?;
    let (a, b) = central(spec, lat, lon, step)?;
    match diff {
        Differencing::Central => Ok((a, b)),
        Differencing::Richardson => {
            let (a2, b2) = central(spec, lat, lon, step * T::half())?;
            let three = T::lit(3.0);
            let rich = |fine: PlanePoint<T>, coarse: PlanePoint<T>| {
                PlanePoint::new(
                    fine.x + (fine.x - coarse.x) / three,
                    fine.y + (fine.y - coarse.y) / three,
                )
            };
            Ok((rich(a2, a), rich(b2, b)))
        }
    }
}

/// Builds the metric sample from the derivatives along latitude (`d_lat`)
/// and longitude (`d_lon`).
pub fn metric_from_partials<T: Scalar>(at: GeoPoint<T>, d_lat: PlanePoint<T>, d_lon: PlanePoint<T>) -> MetricSample<T> {
    let cos_lat = at.lat().cos();
    // columns of the differential in the orthonormal (north, east) frame
    let (ax, ay) = (d_lat.x, d_lat.y);
    let (bx, by) = (d_lon.x / cos_lat, d_lon.y / cos_lat);
    let h = ax.hypot(ay);
    let k = bx.hypot(by);
    let cross = ax * by - ay * bx;
    let dot = ax * bx + ay * by;
    let theta = cross.abs().atan2(dot);
    let det = cross.abs();
    let sum_sq = h * h + k * k;
    let plus = (sum_sq + det + det).sqrt();
    let minus = (sum_sq - det - det).max(T::zero()).sqrt();
    let ratio = if plus > T::zero() { (minus / plus).min(T::one()) } else { T::zero() };
    let omega = T::two() * ratio.asin();
    MetricSample { at, h, k, theta, omega, s: h * k * theta.sin() }
}

/// Local metric at `p` with central differences of size `step`.
pub fn local_metric<T: Scalar>(spec: &ProjectionSpec<T>, p: GeoPoint<T>, step: T) -> Result<MetricSample<T>> {
    local_metric_with(spec, p, step, Differencing::Central)
}

pub fn local_metric_with<T: Scalar>(
    spec: &ProjectionSpec<T>,
    p: GeoPoint<T>,
    step: T,
    diff: Differencing,
) -> Result<MetricSample<T>> {
    let (d_lat, d_lon) = partials(spec, p, step, diff)?;
    Ok(metric_from_partials(p, d_lat, d_lon))
}

/// Extremes of one sampled quantity. Ties keep the first sample in
/// row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStats<T> {
    pub min: T,
    pub max: T,
    pub argmin: GeoPoint<T>,
    pub argmax: GeoPoint<T>,
}

impl<T: Scalar> FieldStats<T> {
    fn of(samples: &[MetricSample<T>], field: impl Fn(&MetricSample<T>) -> T) -> Self {
        let first = &samples[0];
        let mut st = Self { min: field(first), max: field(first), argmin: first.at, argmax: first.at };
        for s in &samples[1..] {
            let v = field(s);
            if v < st.min {
                st.min = v;
                st.argmin = s.at;
            }
            if v > st.max {
                st.max = v;
                st.argmax = s.at;
            }
        }
        st
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSummary<T> {
    pub h: FieldStats<T>,
    pub k: FieldStats<T>,
    pub omega: FieldStats<T>,
    pub s: FieldStats<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionGrid<T> {
    /// Row-major: latitude outer, longitude inner.
    pub samples: Vec<MetricSample<T>>,
    /// Grid points skipped because they (or their stencil) left the domain.
    pub skipped: usize,
    pub summary: GridSummary<T>,
}

/// Evaluates the local metric on an `nlat × nlon` grid covering `region`,
/// bounds included. Points whose stencil leaves the domain are skipped.
pub fn distortion_grid<T: Scalar>(
    spec: &ProjectionSpec<T>,
    region: &Region<T>,
    res: (usize, usize),
) -> Result<DistortionGrid<T>> {
    distortion_grid_with(spec, region, res, T::lit(T::FD_STEP))
}

pub fn distortion_grid_with<T: Scalar>(
    spec: &ProjectionSpec<T>,
    region: &Region<T>,
    res: (usize, usize),
    step: T,
) -> Result<DistortionGrid<T>> {
    if !(step > T::zero() && step <= T::lit(1e-3)) {
        return Err(Error::BadStep(step.as_f64()));
    }
    let (lats, lons) = region.grid_axes(res.0, res.1)?;
    let points: Vec<(T, T)> = lats.iter().flat_map(|&la| lons.iter().map(move |&lo| (la, lo))).collect();
    let evaluated: Vec<Option<MetricSample<T>>> = points
        .par_iter()
        .map(|&(la, lo)| {
            let p = GeoPoint::new(la, lo).ok()?;
            local_metric(spec, p, step).ok()
        })
        .collect();
    let total = evaluated.len();
    let samples: Vec<MetricSample<T>> = evaluated.into_iter().flatten().collect();
    let skipped = total - samples.len();
    if samples.is_empty() {
        return Err(Error::EmptyGrid(skipped));
    }
    let summary = GridSummary {
        h: FieldStats::of(&samples, |m| m.h),
        k: FieldStats::of(&samples, |m| m.k),
        omega: FieldStats::of(&samples, |m| m.omega),
        s: FieldStats::of(&samples, |m| m.s),
    };
    Ok(DistortionGrid { samples, skipped, summary })
}

/// Worst violation of the two length-and-angle conditions on a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectReport<T> {
    pub defect: T,
    pub argmax: GeoPoint<T>,
    /// `(|h − 1|, |k − 1|, |cos θ|)` at `argmax`.
    pub residuals: (T, T, T),
    pub skipped: usize,
}

fn residuals<T: Scalar>(m: &MetricSample<T>) -> (T, T, T) {
    ((m.h - T::one()).abs(), (m.k - T::one()).abs(), m.theta.cos().abs())
}

/// Defect over an already computed grid.
pub fn defect_of<T: Scalar>(grid: &DistortionGrid<T>) -> DefectReport<T> {
    let mut best: Option<(T, &MetricSample<T>)> = None;
    for m in &grid.samples {
        let (a, b, c) = residuals(m);
        let d = a.max(b).max(c);
        if best.is_none_or(|(v, _)| d > v) {
            best = Some((d, m));
        }
    }
    let (defect, m) = best.expect("grid is non-empty");
    DefectReport { defect, argmax: m.at, residuals: residuals(m), skipped: grid.skipped }
}

/// `max(|h − 1|, |k − 1|, |cos θ|)` over the grid.
pub fn perfect_defect<T: Scalar>(
    spec: &ProjectionSpec<T>,
    region: &Region<T>,
    res: (usize, usize),
) -> Result<DefectReport<T>> {
    Ok(defect_of(&distortion_grid(spec, region, res)?))
}

/// Which of the classic map properties hold on a region to tolerance `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassFlags {
    pub conformal: bool,
    pub equal_area: bool,
    pub meridian_equidistant: bool,
}

pub fn classify<T: Scalar>(
    spec: &ProjectionSpec<T>,
    region: &Region<T>,
    res: (usize, usize),
    tol: T,
) -> Result<ClassFlags> {
    let grid = distortion_grid(spec, region, res)?;
    let max_of = |f: &dyn Fn(&MetricSample<T>) -> T| grid.samples.iter().map(f).fold(T::zero(), T::max);
    Ok(ClassFlags {
        conformal: max_of(&|m| m.omega) < tol,
        equal_area: max_of(&|m| (m.s - T::one()).abs()) < tol,
        meridian_equidistant: max_of(&|m| (m.h - T::one()).abs()) < tol,
    })
}

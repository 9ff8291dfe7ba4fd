//! Line and circle fits for projected curves.

use crate::error::{Error, Result};
use crate::projections::PlanePoint;
use crate::scalar::Scalar;

/// Total-least-squares line through a point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub centroid: PlanePoint<T>,
    /// Unit direction.
    pub direction: (T, T),
    /// Largest perpendicular distance of a sample from the line.
    pub max_residual: T,
    pub rms_residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit<T> {
    pub center: PlanePoint<T>,
    pub radius: T,
    /// RMS of `|p - center| - radius` over the samples.
    pub rms_residual: T,
    pub max_residual: T,
}

fn centroid<T: Scalar>(pts: &[PlanePoint<T>]) -> PlanePoint<T> {
    let n = T::from_usize(pts.len()).unwrap();
    let (sx, sy) = pts.iter().fold((T::zero(), T::zero()), |(sx, sy), p| (sx + p.x, sy + p.y));
    PlanePoint::new(sx / n, sy / n)
}

/// Perpendicular distance from `p` to the line through `origin` along the
/// unit vector `dir`.
pub fn line_distance<T: Scalar>(p: PlanePoint<T>, origin: PlanePoint<T>, dir: (T, T)) -> T {
    ((p.x - origin.x) * dir.1 - (p.y - origin.y) * dir.0).abs()
}

fn residual_stats<T: Scalar>(res: impl Iterator<Item = T>) -> (T, T) {
    let (mut max, mut ss, mut n) = (T::zero(), T::zero(), 0usize);
    for r in res {
        max = max.max(r.abs());
        ss = ss + r * r;
        n += 1;
    }
    (max, (ss / T::from_usize(n.max(1)).unwrap()).sqrt())
}

/// Principal-axis line fit.
pub fn fit_line<T: Scalar>(pts: &[PlanePoint<T>]) -> Result<LineFit<T>> {
    if pts.len() < 2 {
        return Err(Error::FitUnderdetermined(pts.len()));
    }
    let c = centroid(pts);
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for p in pts {
        let (dx, dy) = (p.x - c.x, p.y - c.y);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    // major axis angle of the scatter matrix
    let angle = (T::two() * sxy).atan2(sxx - syy) * T::half();
    let dir = (angle.cos(), angle.sin());
    let (max, rms) = residual_stats(pts.iter().map(|p| line_distance(*p, c, dir)));
    Ok(LineFit { centroid: c, direction: dir, max_residual: max, rms_residual: rms })
}

/// Largest perpendicular distance of the samples from the segment joining
/// the first and last sample (the sagitta for an arc), and the chord length.
pub fn chord_deviation<T: Scalar>(pts: &[PlanePoint<T>]) -> Result<(T, T)> {
    if pts.len() < 2 {
        return Err(Error::FitUnderdetermined(pts.len()));
    }
    let (a, b) = (pts[0], pts[pts.len() - 1]);
    let chord = a.dist(b);
    if chord == T::zero() {
        return Err(Error::DegenerateArc);
    }
    let dir = ((b.x - a.x) / chord, (b.y - a.y) / chord);
    let max = pts.iter().map(|p| line_distance(*p, a, dir)).fold(T::zero(), T::max);
    Ok((max, chord))
}

/// Residuals of the samples about a circle with known centre: returns the
/// mean radius and the largest deviation from it.
pub fn concentric_residual<T: Scalar>(pts: &[PlanePoint<T>], center: PlanePoint<T>) -> (T, T) {
    let n = T::from_usize(pts.len().max(1)).unwrap();
    let mean = pts.iter().map(|p| p.dist(center)).fold(T::zero(), |a, b| a + b) / n;
    let max = pts.iter().map(|p| (p.dist(center) - mean).abs()).fold(T::zero(), T::max);
    (mean, max)
}

fn solve3<T: Scalar>(m: [[T; 3]; 3], b: [T; 3]) -> Option<[T; 3]> {
    let det = |m: &[[T; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    let scale = m.iter().flatten().fold(T::zero(), |a, v| a.max(v.abs()));
    if !d.is_finite() || d.abs() <= scale * scale * scale * T::epsilon() * T::lit(64.0) {
        return None;
    }
    let mut out = [T::zero(); 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = b[row];
        }
        *o = det(&mc) / d;
    }
    Some(out)
}

fn circle_residuals<T: Scalar>(pts: &[PlanePoint<T>], c: PlanePoint<T>, r: T) -> (T, T) {
    residual_stats(pts.iter().map(|p| p.dist(c) - r))
}

/// Algebraic (Kåsa) circle fit refined by one Gauss-Newton step on the
/// geometric residuals. The step is kept only if it lowers the RMS.
///
/// Returns `None` when the samples are collinear to working precision.
pub fn fit_circle<T: Scalar>(pts: &[PlanePoint<T>]) -> Result<Option<CircleFit<T>>> {
    if pts.len() < 3 {
        return Err(Error::FitUnderdetermined(pts.len()));
    }
    // centre and scale the data for conditioning
    let c0 = centroid(pts);
    let spread = pts.iter().map(|p| p.dist(c0)).fold(T::zero(), T::max);
    if spread == T::zero() {
        return Ok(None);
    }
    let local: Vec<(T, T)> = pts.iter().map(|p| ((p.x - c0.x) / spread, (p.y - c0.y) / spread)).collect();

    // minimise sum (x² + y² + D x + E y + F)²
    let mut m = [[T::zero(); 3]; 3];
    let mut b = [T::zero(); 3];
    for &(x, y) in &local {
        let row = [x, y, T::one()];
        let z = -(x * x + y * y);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = m[i][j] + row[i] * row[j];
            }
            b[i] = b[i] + row[i] * z;
        }
    }
    let Some([d, e, f]) = solve3(m, b) else {
        return Ok(None);
    };
    let (cx, cy) = (-d * T::half(), -e * T::half());
    let r2 = cx * cx + cy * cy - f;
    if !(r2 > T::zero()) {
        return Ok(None);
    }
    let mut center = PlanePoint::new(c0.x + cx * spread, c0.y + cy * spread);
    let mut radius = r2.sqrt() * spread;
    if !(center.is_finite() && radius.is_finite()) {
        return Ok(None);
    }
    let (mut max, mut rms) = circle_residuals(pts, center, radius);

    // one geometric Gauss-Newton step on (cx, cy, r)
    let mut jtj = [[T::zero(); 3]; 3];
    let mut jtr = [T::zero(); 3];
    for p in pts {
        let dist = p.dist(center);
        if dist == T::zero() {
            continue;
        }
        let row = [-(p.x - center.x) / dist, -(p.y - center.y) / dist, -T::one()];
        let res = dist - radius;
        for i in 0..3 {
            for j in 0..3 {
                jtj[i][j] = jtj[i][j] + row[i] * row[j];
            }
            jtr[i] = jtr[i] - row[i] * res;
        }
    }
    if let Some([dx, dy, dr]) = solve3(jtj, jtr) {
        let c1 = PlanePoint::new(center.x + dx, center.y + dy);
        let r1 = radius + dr;
        if c1.is_finite() && r1 > T::zero() {
            let (max1, rms1) = circle_residuals(pts, c1, r1);
            if rms1 < rms {
                center = c1;
                radius = r1;
                max = max1;
                rms = rms1;
            }
        }
    }
    Ok(Some(CircleFit { center, radius, rms_residual: rms, max_residual: max }))
}

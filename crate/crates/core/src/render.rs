//! Projected graticules, geodesic traces and window outlines, written out
//! as SVG or CSV.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::projections::{PlanePoint, ProjectionSpec};
use crate::scalar::Scalar;
use crate::sphere::{sample_geodesic, GeoPoint, Region};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraticuleSpec<T> {
    pub region: Region<T>,
    pub parallel_step: T,
    pub meridian_step: T,
    pub samples_per_curve: usize,
}

impl<T: Scalar> GraticuleSpec<T> {
    pub fn new(region: Region<T>, parallel_step: T, meridian_step: T, samples_per_curve: usize) -> Result<Self> {
        if !(parallel_step > T::zero() && meridian_step > T::zero()) {
            return Err(Error::BadRegion("graticule steps must be positive".into()));
        }
        if samples_per_curve < 2 {
            return Err(Error::BadSampleCount(samples_per_curve));
        }
        Ok(Self { region, parallel_step, meridian_step, samples_per_curve })
    }
}

/// What a polyline depicts. Angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathLabel {
    Meridian { lon: f64 },
    Parallel { lat: f64 },
    Geodesic,
    Outline,
}

impl PathLabel {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Meridian { .. } => "meridian",
            Self::Parallel { .. } => "parallel",
            Self::Geodesic => "geodesic",
            Self::Outline => "outline",
        }
    }

    /// Comma-free text form used in CSV and SVG attributes.
    pub fn text(&self) -> String {
        match self {
            Self::Meridian { lon } => format!("meridian lon={lon}"),
            Self::Parallel { lat } => format!("parallel lat={lat}"),
            _ => self.kind().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<T> {
    pub label: PathLabel,
    /// Index of this piece among the pieces of the same curve.
    pub segment: usize,
    pub points: Vec<PlanePoint<T>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSet<T> {
    pub paths: Vec<Polyline<T>>,
}

impl<T: Scalar> PathSet<T> {
    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn extend(&mut self, other: PathSet<T>) {
        self.paths.extend(other.paths);
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self.paths.iter().flat_map(|l| &l.points) {
            let (x, y) = (p.x.as_f64(), p.y.as_f64());
            b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
        }
        b
    }
}

/// Projects a sampled curve, starting a new piece wherever a sample is out
/// of the domain or the curve jumps across the antimeridian cut. Pieces
/// with fewer than two points are dropped.
fn project_curve<T: Scalar>(spec: &ProjectionSpec<T>, label: PathLabel, pts: &[GeoPoint<T>]) -> Vec<Polyline<T>> {
    let mut out = Vec::new();
    let mut current: Vec<PlanePoint<T>> = Vec::new();
    let mut prev: Option<GeoPoint<T>> = None;
    let flush = |current: &mut Vec<PlanePoint<T>>, out: &mut Vec<Polyline<T>>| {
        if current.len() >= 2 {
            let segment = out.len();
            out.push(Polyline { label, segment, points: std::mem::take(current) });
        } else {
            current.clear();
        }
    };
    for &p in pts {
        if let Some(q) = prev {
            if spec.has_seam() && (p.lon() - q.lon()).abs() > T::PI() {
                flush(&mut current, &mut out);
            }
        }
        prev = Some(p);
        match spec.forward(p) {
            Ok(xy) => current.push(xy),
            Err(_) => flush(&mut current, &mut out),
        }
    }
    flush(&mut current, &mut out);
    out
}

fn steps<T: Scalar>(lo: T, hi: T, step: T) -> Vec<T> {
    let slack = step * T::lit(1e-9);
    let mut out = Vec::new();
    let mut i = 0usize;
    loop {
        let v = lo + step * T::from_usize(i).unwrap();
        if v > hi + slack {
            break;
        }
        out.push(v.min(hi));
        i += 1;
    }
    out
}

/// Images of the meridians and parallels of the graticule.
///
/// Parallels come first (south to north), then meridians (west to east).
/// Parallels at a pole are omitted since they collapse to a point.
pub fn graticule_paths<T: Scalar>(spec: &ProjectionSpec<T>, g: &GraticuleSpec<T>) -> Result<PathSet<T>> {
    let r = g.region;
    let n = g.samples_per_curve;
    let mut paths = Vec::new();
    for lat in steps(r.lat_min, r.lat_max, g.parallel_step) {
        if lat.abs() >= T::FRAC_PI_2() {
            continue;
        }
        let pts = crate::sphere::sample_parallel(lat, (r.lon_min, r.lon_max), n)?;
        let label = PathLabel::Parallel { lat: lat.as_f64().to_degrees() };
        paths.extend(project_curve(spec, label, &pts));
    }
    for lon in steps(r.lon_min, r.lon_max, g.meridian_step) {
        let pts = crate::sphere::sample_meridian(lon, (r.lat_min, r.lat_max), n)?;
        let label = PathLabel::Meridian { lon: lon.as_f64().to_degrees() };
        paths.extend(project_curve(spec, label, &pts));
    }
    if paths.is_empty() {
        return Err(Error::EmptyPathSet);
    }
    Ok(PathSet { paths })
}

/// Image of the great-circle arc from `a` to `b`.
pub fn geodesic_paths<T: Scalar>(spec: &ProjectionSpec<T>, a: GeoPoint<T>, b: GeoPoint<T>, n: usize) -> Result<PathSet<T>> {
    let pts = sample_geodesic(a, b, n)?;
    let paths = project_curve(spec, PathLabel::Geodesic, &pts);
    if paths.is_empty() {
        return Err(Error::EmptyPathSet);
    }
    Ok(PathSet { paths })
}

/// Image of the boundary of a region, traced counter-clockwise from its
/// south-west corner with `n` samples per side.
pub fn outline_paths<T: Scalar>(spec: &ProjectionSpec<T>, region: &Region<T>, n: usize) -> Result<PathSet<T>> {
    use crate::sphere::{sample_meridian, sample_parallel};
    let r = region;
    let mut pts = Vec::new();
    let mut side = |v: Result<Vec<GeoPoint<T>>>| -> Result<()> {
        let v = v?;
        let skip = usize::from(!pts.is_empty());
        pts.extend(v.into_iter().skip(skip));
        Ok(())
    };
    let pole_safe = |lat: T| lat.abs() < T::FRAC_PI_2();
    if pole_safe(r.lat_min) {
        side(sample_parallel(r.lat_min, (r.lon_min, r.lon_max), n))?;
    }
    side(sample_meridian(r.lon_max, (r.lat_min, r.lat_max), n))?;
    if pole_safe(r.lat_max) {
        side(sample_parallel(r.lat_max, (r.lon_max, r.lon_min), n))?;
    }
    side(sample_meridian(r.lon_min, (r.lat_max, r.lat_min), n))?;
    let paths = project_curve(spec, PathLabel::Outline, &pts);
    if paths.is_empty() {
        return Err(Error::EmptyPathSet);
    }
    Ok(PathSet { paths })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stroke {
    pub color: String,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub width_px: f64,
    pub meridian: Stroke,
    pub parallel: Stroke,
    pub geodesic: Stroke,
    pub outline: Stroke,
    /// Adds a `<title>` with the label text to every path.
    pub labels: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        let s = |c: &str, w: f64| Stroke { color: c.to_string(), width: w };
        Self {
            width_px: 800.0,
            meridian: s("#1f4e79", 1.0),
            parallel: s("#7f3f00", 1.0),
            geodesic: s("#c00000", 1.5),
            outline: s("#000000", 1.5),
            labels: false,
        }
    }
}

impl SvgStyle {
    fn stroke(&self, label: &PathLabel) -> &Stroke {
        match label {
            PathLabel::Meridian { .. } => &self.meridian,
            PathLabel::Parallel { .. } => &self.parallel,
            PathLabel::Geodesic => &self.geodesic,
            PathLabel::Outline => &self.outline,
        }
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// SVG 1.1 document with north up (plane `y` negated), the view box being
/// the bounding box widened by 2 % on each side.
pub fn emit_svg<T: Scalar>(paths: &PathSet<T>, style: &SvgStyle) -> Result<String> {
    if paths.is_empty() {
        return Err(Error::EmptyPathSet);
    }
    let (x0, y0, x1, y1) = paths.bounds();
    // svg y runs downward
    let (top, bottom) = (-y1, -y0);
    let mut w = x1 - x0;
    let mut h = bottom - top;
    let extent = w.max(h).max(f64::MIN_POSITIVE);
    if w <= 0.0 {
        w = extent * 1e-3;
    }
    if h <= 0.0 {
        h = extent * 1e-3;
    }
    let (mx, my) = (0.02 * w, 0.02 * h);
    let (vx, vy, vw, vh) = (x0 - mx, top - my, w + 2.0 * mx, h + 2.0 * my);
    let width_px = style.width_px;
    let height_px = width_px * vh / vw;
    // strokes in pixels regardless of plane units
    let px = vw / width_px;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    s.push_str("<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" \"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        num(width_px),
        num(height_px),
        num(vx),
        num(vy),
        num(vw),
        num(vh)
    );
    for line in &paths.paths {
        let stroke = style.stroke(&line.label);
        let mut d = String::new();
        for (i, p) in line.points.iter().enumerate() {
            let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, num(p.x.as_f64()), num(-p.y.as_f64()));
        }
        let _ = write!(
            s,
            "  <path class=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" d=\"{}\"",
            line.label.kind(),
            stroke.color,
            num(stroke.width * px),
            d
        );
        if style.labels {
            let _ = writeln!(s, "><title>{}</title></path>", line.label.text());
        } else {
            s.push_str("/>\n");
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// CSV with columns `label,segment_index,point_index,x,y`; coordinates in
/// 17 significant digits.
pub fn emit_csv<T: Scalar>(paths: &PathSet<T>) -> Result<String> {
    if paths.is_empty() {
        return Err(Error::EmptyPathSet);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(format!("csv: {e}"));
    w.write_record(["label", "segment_index", "point_index", "x", "y"]).map_err(io)?;
    for line in &paths.paths {
        for (i, p) in line.points.iter().enumerate() {
            w.write_record([
                line.label.text(),
                line.segment.to_string(),
                i.to_string(),
                format!("{:.16e}", p.x.as_f64()),
                format!("{:.16e}", p.y.as_f64()),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

//! Geometry on the unit sphere: points, great-circle arcs, spherical
//! triangles and samplers for the meridian and parallel foliations.
//!
//! The sphere has radius 1, so every length is an angle in radians.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Plain 3-vector used as a computation carrier.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn plus(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn minus(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    /// Scalar triple product `self · (b × c)`.
    pub fn triple(self, b: Self, c: Self) -> T {
        self.dot(b.cross(c))
    }
}

/// A point of the unit sphere as a Cartesian unit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3<T>(Vec3<T>);

impl<T: Scalar> UnitVec3<T> {
    /// Accepts `(x, y, z)` only if its norm is 1 to within `1e-9`.
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let v = Vec3::new(x, y, z);
        let norm = v.norm();
        if !norm.is_finite() || (norm - T::one()).abs() > T::tol(1e-9) {
            return Err(Error::NonUnitVector(norm.as_f64()));
        }
        Ok(Self(v.scale(norm.recip())))
    }

    /// Projects a non-zero vector onto the sphere.
    pub fn normalize(v: Vec3<T>) -> Option<Self> {
        let norm = v.norm();
        if norm.is_finite() && norm > T::epsilon() * T::lit(16.0) {
            Some(Self(v.scale(norm.recip())))
        } else {
            None
        }
    }

    pub fn vec(self) -> Vec3<T> {
        self.0
    }

    pub fn x(self) -> T {
        self.0.x
    }

    pub fn y(self) -> T {
        self.0.y
    }

    pub fn z(self) -> T {
        self.0.z
    }
}

/// Latitude and longitude in radians.
///
/// Longitude is normalized to `(-π, π]`; at either pole it is set to 0 so
/// that equal positions compare equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint<T> {
    lat: T,
    lon: T,
}

/// Wraps a longitude into `(-π, π]`.
pub fn normalize_lon<T: Scalar>(lon: T) -> T {
    let pi = T::PI();
    let tau = pi + pi;
    let mut l = lon % tau;
    if l > pi {
        l = l - tau;
    } else if l <= -pi {
        l = l + tau;
    }
    l
}

impl<T: Scalar> GeoPoint<T> {
    pub fn new(lat: T, lon: T) -> Result<Self> {
        let half_pi = T::FRAC_PI_2();
        if !lat.is_finite() || lat.abs() > half_pi {
            return Err(Error::InvalidLatitude(lat.as_f64().to_degrees()));
        }
        if !lon.is_finite() {
            return Err(Error::InvalidLongitude);
        }
        let lon = if lat.abs() == half_pi {
            T::zero()
        } else {
            normalize_lon(lon)
        };
        Ok(Self { lat, lon })
    }

    pub fn from_degrees(lat: f64, lon: f64) -> Result<Self> {
        Self::new(T::deg(lat), T::deg(lon))
    }

    pub fn north_pole() -> Self {
        Self { lat: T::FRAC_PI_2(), lon: T::zero() }
    }

    pub fn south_pole() -> Self {
        Self { lat: -T::FRAC_PI_2(), lon: T::zero() }
    }

    pub fn lat(&self) -> T {
        self.lat
    }

    pub fn lon(&self) -> T {
        self.lon
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat.as_f64().to_degrees()
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon.as_f64().to_degrees()
    }

    pub fn is_pole(&self) -> bool {
        self.lat.abs() == T::FRAC_PI_2()
    }

    pub fn antipode(&self) -> Self {
        Self::new(-self.lat, self.lon + T::PI()).expect("antipode of a valid point")
    }
}

/// Unit vector of a geographic point. Poles map to exactly `(0, 0, ±1)`.
pub fn geo_to_vec<T: Scalar>(p: GeoPoint<T>) -> UnitVec3<T> {
    if p.is_pole() {
        return UnitVec3(Vec3::new(T::zero(), T::zero(), p.lat.signum()));
    }
    let (sl, cl) = p.lat.sin_cos();
    let (so, co) = p.lon.sin_cos();
    UnitVec3(Vec3::new(cl * co, cl * so, sl))
}

/// Geographic coordinates of a unit vector.
pub fn vec_to_geo<T: Scalar>(v: UnitVec3<T>) -> Result<GeoPoint<T>> {
    let v = v.vec();
    let norm = v.norm();
    if (norm - T::one()).abs() > T::tol(1e-9) {
        return Err(Error::NonUnitVector(norm.as_f64()));
    }
    let horiz = v.x.hypot(v.y);
    let lat = v.z.atan2(horiz);
    let lon = if horiz == T::zero() { T::zero() } else { v.y.atan2(v.x) };
    GeoPoint::new(lat, lon)
}

/// Angle between two unit vectors, `atan2(|a × b|, a · b)`.
pub fn vec_angle<T: Scalar>(a: Vec3<T>, b: Vec3<T>) -> T {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Great-circle distance in radians, in `[0, π]`.
pub fn great_circle_distance<T: Scalar>(p: GeoPoint<T>, q: GeoPoint<T>) -> T {
    vec_angle(geo_to_vec(p).vec(), geo_to_vec(q).vec())
}

/// Unit tangent at `p` pointing along the minor arc toward `q`, together
/// with the arc length.
fn arc_frame<T: Scalar>(p: UnitVec3<T>, q: UnitVec3<T>) -> Result<(Vec3<T>, T)> {
    let (p, q) = (p.vec(), q.vec());
    let omega = vec_angle(p, q);
    let guard = T::tol(1e-12);
    if omega < guard || omega > T::PI() - guard {
        return Err(Error::DegenerateArc);
    }
    let perp = q.minus(p.scale(p.dot(q)));
    let tangent = UnitVec3::normalize(perp).ok_or(Error::DegenerateArc)?;
    Ok((tangent.vec(), omega))
}

/// Point at fraction `t` of the way from `p` to `q` along the minor arc.
pub fn geodesic_point<T: Scalar>(p: GeoPoint<T>, q: GeoPoint<T>, t: T) -> Result<GeoPoint<T>> {
    if t == T::zero() {
        arc_frame(geo_to_vec(p), geo_to_vec(q))?;
        return Ok(p);
    }
    if t == T::one() {
        arc_frame(geo_to_vec(p), geo_to_vec(q))?;
        return Ok(q);
    }
    let pv = geo_to_vec(p);
    let (tangent, omega) = arc_frame(pv, geo_to_vec(q))?;
    let (s, c) = (t * omega).sin_cos();
    let v = pv.vec().scale(c).plus(tangent.scale(s));
    vec_to_geo(UnitVec3::normalize(v).ok_or(Error::DegenerateArc)?)
}

/// `n` points spaced evenly along the minor arc from `p` to `q`, endpoints
/// included.
pub fn sample_geodesic<T: Scalar>(p: GeoPoint<T>, q: GeoPoint<T>, n: usize) -> Result<Vec<GeoPoint<T>>> {
    if n < 2 {
        return Err(Error::BadSampleCount(n));
    }
    let pv = geo_to_vec(p);
    let (tangent, omega) = arc_frame(pv, geo_to_vec(q))?;
    let last = T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| {
            if i == 0 {
                return Ok(p);
            }
            if i == n - 1 {
                return Ok(q);
            }
            let a = omega * T::from_usize(i).unwrap() / last;
            let (s, c) = a.sin_cos();
            vec_to_geo(UnitVec3::normalize(pv.vec().scale(c).plus(tangent.scale(s))).unwrap())
        })
        .collect()
}

/// Point reached from `p` by travelling `distance` along the great circle
/// leaving at `azimuth` (clockwise from north).
pub fn destination<T: Scalar>(p: GeoPoint<T>, azimuth: T, distance: T) -> Result<GeoPoint<T>> {
    let (north, east) = local_frame(p);
    let (sa, ca) = azimuth.sin_cos();
    let dir = north.scale(ca).plus(east.scale(sa));
    let (sd, cd) = distance.sin_cos();
    let v = geo_to_vec(p).vec().scale(cd).plus(dir.scale(sd));
    vec_to_geo(UnitVec3::normalize(v).ok_or(Error::DegenerateArc)?)
}

/// Unit north and east tangent vectors at `p`. At the poles, longitude 0
/// fixes the frame.
pub fn local_frame<T: Scalar>(p: GeoPoint<T>) -> (Vec3<T>, Vec3<T>) {
    let (sl, cl) = p.lat.sin_cos();
    let (so, co) = p.lon.sin_cos();
    let cl = if p.is_pole() { T::zero() } else { cl };
    let north = Vec3::new(-sl * co, -sl * so, cl);
    let east = Vec3::new(-so, co, T::zero());
    (north, east)
}

/// Three vertices forming a non-degenerate spherical triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalTriangle<T> {
    a: GeoPoint<T>,
    b: GeoPoint<T>,
    c: GeoPoint<T>,
}

impl<T: Scalar> SphericalTriangle<T> {
    /// Rejects coincident or antipodal vertices and vertices on one great
    /// circle.
    pub fn new(a: GeoPoint<T>, b: GeoPoint<T>, c: GeoPoint<T>) -> Result<Self> {
        let (va, vb, vc) = (geo_to_vec(a).vec(), geo_to_vec(b).vec(), geo_to_vec(c).vec());
        for (p, q) in [(va, vb), (vb, vc), (vc, va)] {
            let side = vec_angle(p, q);
            if side <= T::zero() {
                return Err(Error::DegenerateTriangle("coincident vertices"));
            }
            if side >= T::PI() {
                return Err(Error::DegenerateTriangle("antipodal vertices"));
            }
        }
        if va.triple(vb, vc).abs() <= T::epsilon() * T::lit(16.0) {
            return Err(Error::DegenerateTriangle("vertices lie on one great circle"));
        }
        Ok(Self { a, b, c })
    }

    pub fn vertices(&self) -> [GeoPoint<T>; 3] {
        [self.a, self.b, self.c]
    }

    /// Side lengths opposite A, B, C.
    pub fn sides(&self) -> [T; 3] {
        [
            great_circle_distance(self.b, self.c),
            great_circle_distance(self.c, self.a),
            great_circle_distance(self.a, self.b),
        ]
    }
}

/// Interior angle at `v` between the arcs toward `p` and `q`: the angle
/// between the planes `v × p` and `v × q`.
fn vertex_angle<T: Scalar>(v: Vec3<T>, p: Vec3<T>, q: Vec3<T>) -> T {
    let np = v.cross(p);
    let nq = v.cross(q);
    np.cross(nq).norm().atan2(np.dot(nq))
}

/// Interior angles at A, B and C.
pub fn triangle_angles<T: Scalar>(t: &SphericalTriangle<T>) -> Result<(T, T, T)> {
    let [a, b, c] = t.vertices().map(|p| geo_to_vec(p).vec());
    let angles = (vertex_angle(a, b, c), vertex_angle(b, c, a), vertex_angle(c, a, b));
    for x in [angles.0, angles.1, angles.2] {
        if !(x > T::zero() && x < T::PI()) {
            return Err(Error::DegenerateTriangle("interior angle outside (0, π)"));
        }
    }
    Ok(angles)
}

/// Angle sum minus π.
pub fn spherical_excess<T: Scalar>(t: &SphericalTriangle<T>) -> Result<T> {
    let (a, b, c) = triangle_angles(t)?;
    Ok(a + b + c - T::PI())
}

/// Length of the arc joining the midpoints of AB and BC, and half of AC.
pub fn triangle_midline<T: Scalar>(t: &SphericalTriangle<T>) -> Result<(T, T)> {
    let half = T::half();
    let d = geodesic_point(t.a, t.b, half).map_err(|_| Error::DegenerateTriangle("side AB"))?;
    let e = geodesic_point(t.b, t.c, half).map_err(|_| Error::DegenerateTriangle("side BC"))?;
    Ok((great_circle_distance(d, e), great_circle_distance(t.a, t.c) * half))
}

fn lerp_samples<T: Scalar>(from: T, to: T, n: usize) -> impl Iterator<Item = T> {
    let last = T::from_usize(n - 1).unwrap();
    (0..n).map(move |i| {
        if i == n - 1 {
            to
        } else {
            from + (to - from) * T::from_usize(i).unwrap() / last
        }
    })
}

/// `n` points on the meridian `lon`, latitudes evenly spaced over
/// `lat_range` inclusive.
pub fn sample_meridian<T: Scalar>(lon: T, lat_range: (T, T), n: usize) -> Result<Vec<GeoPoint<T>>> {
    if n < 2 {
        return Err(Error::BadSampleCount(n));
    }
    lerp_samples(lat_range.0, lat_range.1, n).map(|lat| GeoPoint::new(lat, lon)).collect()
}

/// `n` points on the parallel `lat`, longitudes evenly spaced over
/// `lon_range` inclusive.
pub fn sample_parallel<T: Scalar>(lat: T, lon_range: (T, T), n: usize) -> Result<Vec<GeoPoint<T>>> {
    if n < 2 {
        return Err(Error::BadSampleCount(n));
    }
    if lat.abs() >= T::FRAC_PI_2() {
        return Err(Error::PoleParallel(lat.as_f64().to_degrees()));
    }
    lerp_samples(lon_range.0, lon_range.1, n).map(|lon| GeoPoint::new(lat, lon)).collect()
}

/// A latitude/longitude window. Longitudes are kept as given (not wrapped)
/// so a window may straddle the antimeridian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region<T> {
    pub lat_min: T,
    pub lat_max: T,
    pub lon_min: T,
    pub lon_max: T,
}

impl<T: Scalar> Region<T> {
    pub fn new(lat_min: T, lat_max: T, lon_min: T, lon_max: T) -> Result<Self> {
        let half_pi = T::FRAC_PI_2();
        if ![lat_min, lat_max, lon_min, lon_max].iter().all(|v| v.is_finite()) {
            return Err(Error::BadRegion("non-finite bound".into()));
        }
        if lat_min < -half_pi || lat_max > half_pi {
            return Err(Error::BadRegion("latitudes must lie in [-90°, 90°]".into()));
        }
        if lat_min >= lat_max {
            return Err(Error::BadRegion("lat_min must be below lat_max".into()));
        }
        let span = lon_max - lon_min;
        if span <= T::zero() || span > T::PI() + T::PI() {
            return Err(Error::BadRegion("longitude span must lie in (0°, 360°]".into()));
        }
        Ok(Self { lat_min, lat_max, lon_min, lon_max })
    }

    pub fn from_degrees(lat_min: f64, lat_max: f64, lon_min: f64, lon_max: f64) -> Result<Self> {
        Self::new(T::deg(lat_min), T::deg(lat_max), T::deg(lon_min), T::deg(lon_max))
    }

    /// Grid latitudes and longitudes, both inclusive of the bounds.
    pub fn grid_axes(&self, nlat: usize, nlon: usize) -> Result<(Vec<T>, Vec<T>)> {
        if nlat < 2 || nlon < 2 {
            return Err(Error::BadSampleCount(nlat.min(nlon)));
        }
        Ok((
            lerp_samples(self.lat_min, self.lat_max, nlat).collect(),
            lerp_samples(self.lon_min, self.lon_max, nlon).collect(),
        ))
    }
}

//! Forward and inverse transforms for the supported projection families.
//!
//! Each family is characterised by where it sends meridians and parallels:
//!
//! * polar stereographic: parallels to circles about the image of the
//!   opposite pole, meridians to lines through it;
//! * gnomonic: every great circle to a straight line;
//! * cylindrical: meridians to vertical lines, parallels to horizontal lines;
//! * equidistant conic: meridians to lines through a common apex, parallels
//!   to circles about that apex, lengths kept along meridians.

use crate::delisle::ConicParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sphere::{geo_to_vec, local_frame, normalize_lon, vec_to_geo, GeoPoint, UnitVec3, Vec3};

/// A point of the map plane, in sphere radii.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanePoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> PlanePoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn dist(self, o: Self) -> T {
        (self.x - o.x).hypot(self.y - o.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pole {
    North,
    South,
}

/// Height function of a cylindrical map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CylindricalProfile {
    /// `y = φ`: true along meridians.
    Equirectangular,
    /// `y = ln tan(π/4 + φ/2)` (Mercator): conformal.
    Conformal,
    /// `y = sin φ` (Lambert): equal-area.
    EqualArea,
}

/// A projection with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectionSpec<T> {
    /// Projection from `from` onto the plane tangent at the opposite pole.
    Stereographic { from: Pole },
    /// Projection from the antipode of `tangent` onto the plane tangent at
    /// `tangent`.
    ObliqueStereographic { tangent: GeoPoint<T> },
    /// Central projection onto the plane tangent at `tangent`.
    Gnomonic { tangent: GeoPoint<T> },
    /// `x = λ·cos(ref_lat)`; the height is scaled so the map keeps its class
    /// property and is true to scale along `ref_lat`.
    Cylindrical { profile: CylindricalProfile, ref_lat: T },
    EquidistantConic { params: ConicParams<T> },
}

fn out_of_domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::OutOfDomain(msg.into()))
}

fn out_of_image<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::OutOfImage(msg.into()))
}

/// Orthonormal tangent frame `(east, north, up)` at a point.
fn tangent_frame<T: Scalar>(p: GeoPoint<T>) -> (Vec3<T>, Vec3<T>, Vec3<T>) {
    let (north, east) = local_frame(p);
    (east, north, geo_to_vec(p).vec())
}

fn point_at<T: Scalar>(lat: T, lon: T) -> Vec3<T> {
    let (sl, cl) = lat.sin_cos();
    let (so, co) = lon.sin_cos();
    let cl = if lat.abs() == T::FRAC_PI_2() { T::zero() } else { cl };
    Vec3::new(cl * co, cl * so, sl)
}

impl<T: Scalar> ProjectionSpec<T> {
    pub fn cylindrical(profile: CylindricalProfile, ref_lat: T) -> Result<Self> {
        let spec = Self::Cylindrical { profile, ref_lat };
        spec.validate()?;
        Ok(spec)
    }

    pub fn conic(params: ConicParams<T>) -> Self {
        Self::EquidistantConic { params }
    }

    /// Checks parameter ranges that the enum cannot enforce itself.
    pub fn validate(&self) -> Result<()> {
        if let Self::Cylindrical { ref_lat, .. } = *self {
            if !(ref_lat.is_finite() && ref_lat.abs() < T::FRAC_PI_2()) {
                return Err(Error::BadProjection(format!(
                    "cylindrical ref_lat {}° must lie in (-90°, 90°)",
                    ref_lat.as_f64().to_degrees()
                )));
            }
        }
        Ok(())
    }

    /// Whether the map is cut along the antimeridian.
    pub fn has_seam(&self) -> bool {
        matches!(self, Self::Cylindrical { .. } | Self::EquidistantConic { .. })
    }

    pub fn domain(&self) -> DomainPredicate<'_, T> {
        DomainPredicate { spec: self }
    }

    pub fn forward(&self, p: GeoPoint<T>) -> Result<PlanePoint<T>> {
        self.forward_unwrapped(p.lat(), p.lon())
    }

    /// Forward transform at a raw `(lat, lon)` pair. Longitude is not
    /// wrapped, so cylindrical and conic maps extend continuously past the
    /// antimeridian; this is what finite-difference stencils need.
    pub fn forward_unwrapped(&self, lat: T, lon: T) -> Result<PlanePoint<T>> {
        let half_pi = T::FRAC_PI_2();
        if !(lat.is_finite() && lon.is_finite()) || lat.abs() > half_pi {
            return out_of_domain("latitude outside [-90°, 90°]");
        }
        let two = T::two();
        let q = match *self {
            Self::Stereographic { from: Pole::North } => {
                if lat >= half_pi {
                    return out_of_domain("stereographic: point is the projection pole (north)");
                }
                let r = two * (T::FRAC_PI_4() + lat * T::half()).tan();
                let (s, c) = lon.sin_cos();
                PlanePoint::new(r * c, r * s)
            }
            Self::Stereographic { from: Pole::South } => {
                if lat <= -half_pi {
                    return out_of_domain("stereographic: point is the projection pole (south)");
                }
                let r = two * (T::FRAC_PI_4() - lat * T::half()).tan();
                let (s, c) = lon.sin_cos();
                PlanePoint::new(r * c, r * s)
            }
            Self::ObliqueStereographic { tangent } => {
                let (e, n, u) = tangent_frame(tangent);
                let p = point_at(lat, lon);
                let denom = T::one() + p.dot(u);
                if denom <= T::epsilon() * T::lit(16.0) {
                    return out_of_domain("stereographic: point is the projection centre");
                }
                PlanePoint::new(two * p.dot(e) / denom, two * p.dot(n) / denom)
            }
            Self::Gnomonic { tangent } => {
                let (e, n, u) = tangent_frame(tangent);
                let p = point_at(lat, lon);
                let cos_c = p.dot(u);
                if cos_c <= T::epsilon() * T::lit(16.0) {
                    return out_of_domain("gnomonic: angular distance from tangent point must be < 90°");
                }
                PlanePoint::new(p.dot(e) / cos_c, p.dot(n) / cos_c)
            }
            Self::Cylindrical { profile, ref_lat } => {
                self.validate()?;
                let c = ref_lat.cos();
                let y = match profile {
                    CylindricalProfile::Equirectangular => lat,
                    CylindricalProfile::Conformal => {
                        if lat.abs() >= half_pi {
                            return out_of_domain("conformal cylindrical: |lat| must be < 90°");
                        }
                        c * lat.tan().asinh()
                    }
                    CylindricalProfile::EqualArea => lat.sin() / c,
                };
                PlanePoint::new(lon * c, y)
            }
            Self::EquidistantConic { params } => {
                let apex = params.apex_latitude();
                if lat >= apex {
                    return out_of_domain(format!(
                        "conic: latitude must be below the apex latitude {}°",
                        apex.as_f64().to_degrees()
                    ));
                }
                let rho = params.rho(lat);
                let (s, c) = (params.n() * lon).sin_cos();
                PlanePoint::new(rho * s, params.rho1() - rho * c)
            }
        };
        if q.is_finite() {
            Ok(q)
        } else {
            out_of_domain("image is not finite")
        }
    }

    pub fn inverse(&self, q: PlanePoint<T>) -> Result<GeoPoint<T>> {
        if !q.is_finite() {
            return out_of_image("non-finite plane point");
        }
        let two = T::two();
        let lon_slack = T::PI() * (T::one() + T::tol(1e-12));
        match *self {
            Self::Stereographic { from } => {
                let r = q.x.hypot(q.y);
                let lon = if r == T::zero() { T::zero() } else { q.y.atan2(q.x) };
                let polar = two * (r / two).atan();
                let lat = match from {
                    Pole::North => polar - T::FRAC_PI_2(),
                    Pole::South => T::FRAC_PI_2() - polar,
                };
                GeoPoint::new(lat, lon)
            }
            Self::ObliqueStereographic { tangent } => {
                let (e, n, u) = tangent_frame(tangent);
                let r = q.x.hypot(q.y);
                if r == T::zero() {
                    return Ok(tangent);
                }
                let c = two * (r / two).atan();
                let dir = e.scale(q.x / r).plus(n.scale(q.y / r));
                let v = u.scale(c.cos()).plus(dir.scale(c.sin()));
                vec_to_geo(UnitVec3::normalize(v).expect("unit combination"))
            }
            Self::Gnomonic { tangent } => {
                let (e, n, u) = tangent_frame(tangent);
                let v = u.plus(e.scale(q.x)).plus(n.scale(q.y));
                vec_to_geo(UnitVec3::normalize(v).expect("non-zero: up component is 1"))
            }
            Self::Cylindrical { profile, ref_lat } => {
                self.validate()?;
                let c = ref_lat.cos();
                let lon = q.x / c;
                if lon.abs() > lon_slack {
                    return out_of_image("cylindrical: |x| exceeds 180° of longitude");
                }
                let lat = match profile {
                    CylindricalProfile::Equirectangular => {
                        if q.y.abs() > T::FRAC_PI_2() {
                            return out_of_image("equirectangular: |y| exceeds 90°");
                        }
                        q.y
                    }
                    CylindricalProfile::Conformal => (q.y / c).sinh().atan(),
                    CylindricalProfile::EqualArea => {
                        let s = q.y * c;
                        if s.abs() > T::one() {
                            return out_of_image("equal-area cylindrical: |y| exceeds the pole line");
                        }
                        s.asin()
                    }
                };
                GeoPoint::new(lat, lon)
            }
            Self::EquidistantConic { params } => {
                let dy = params.rho1() - q.y;
                let rho = q.x.hypot(dy);
                let lon = q.x.atan2(dy) / params.n();
                if lon.abs() > lon_slack {
                    return out_of_image("conic: angle about the apex exceeds n·180°");
                }
                let lat = params.phi1() + params.rho1() - rho;
                if lat.abs() > T::FRAC_PI_2() {
                    return out_of_image("conic: radius about the apex is outside the latitude range");
                }
                GeoPoint::new(lat, normalize_lon(lon))
            }
        }
    }

    pub fn in_domain(&self, p: GeoPoint<T>) -> bool {
        self.forward(p).is_ok()
    }
}

/// The set of points a projection can map.
#[derive(Debug, Clone, Copy)]
pub struct DomainPredicate<'a, T> {
    spec: &'a ProjectionSpec<T>,
}

impl<T: Scalar> DomainPredicate<'_, T> {
    pub fn contains(&self, p: GeoPoint<T>) -> bool {
        self.spec.in_domain(p)
    }

    /// Like [`contains`](Self::contains) but names the violated constraint.
    pub fn check(&self, p: GeoPoint<T>) -> Result<()> {
        self.spec.forward(p).map(|_| ())
    }
}

pub fn forward<T: Scalar>(spec: &ProjectionSpec<T>, p: GeoPoint<T>) -> Result<PlanePoint<T>> {
    spec.forward(p)
}

pub fn inverse<T: Scalar>(spec: &ProjectionSpec<T>, q: PlanePoint<T>) -> Result<GeoPoint<T>> {
    spec.inverse(q)
}

pub fn in_domain<T: Scalar>(spec: &ProjectionSpec<T>, p: GeoPoint<T>) -> bool {
    spec.in_domain(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delisle::build_conic;
    use crate::sphere::great_circle_distance;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    fn g(lat: f64, lon: f64) -> GeoPoint<f64> {
        GeoPoint::from_degrees(lat, lon).unwrap()
    }

    fn s_pole_gnomonic() -> ProjectionSpec<f64> {
        ProjectionSpec::Gnomonic { tangent: GeoPoint::south_pole() }
    }

    #[test]
    fn gnomonic_tangent_point_is_origin() {
        let q = s_pole_gnomonic().forward(g(-90.0, 0.0)).unwrap();
        assert_eq!((q.x, q.y), (0.0, 0.0));
        let p = s_pole_gnomonic().inverse(PlanePoint::new(0.0, 0.0)).unwrap();
        assert_eq!(p, GeoPoint::south_pole());
    }

    #[test]
    fn gnomonic_horizon_excluded() {
        assert!(!s_pole_gnomonic().in_domain(g(0.0, 0.0)));
        assert!(!s_pole_gnomonic().in_domain(g(0.0, 123.0)));
        assert!(s_pole_gnomonic().in_domain(g(-1.0, 123.0)));
        let err = s_pole_gnomonic().forward(g(10.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::OutOfDomain(ref m) if m.contains("90°")));
    }

    #[test]
    fn stereographic_equator_radius_two() {
        let spec = ProjectionSpec::Stereographic { from: Pole::North };
        // similar triangles: the ray from (0,0,1) through (1,0,0) meets z = -1 at x = 2
        let q = spec.forward(g(0.0, 0.0)).unwrap();
        assert!((q.x - 2.0).abs() < 1e-15 && q.y.abs() < 1e-15);
        for lat in [-60.0, -10.0, 30.0, 75.0] {
            let q = spec.forward(g(lat, 40.0)).unwrap();
            let colat_from_south = (lat + 90.0f64).to_radians();
            assert!((q.x.hypot(q.y) - 2.0 * (colat_from_south / 2.0).tan()).abs() < 1e-12);
        }
        assert!(!spec.in_domain(GeoPoint::north_pole()));
        assert!(spec.in_domain(GeoPoint::south_pole()));
    }

    #[test]
    fn mercator_equator_is_isometric() {
        let spec = ProjectionSpec::cylindrical(CylindricalProfile::Conformal, 0.0).unwrap();
        let q = spec.forward(g(0.0, 30.0)).unwrap();
        assert!((q.x - FRAC_PI_6).abs() < 1e-15 && q.y == 0.0);
        assert!(!spec.in_domain(GeoPoint::north_pole()));
    }

    #[test]
    fn plate_carree_inverse() {
        let spec = ProjectionSpec::cylindrical(CylindricalProfile::Equirectangular, 0.0).unwrap();
        let p = spec.inverse(PlanePoint::new(0.4, -0.3)).unwrap();
        assert_eq!((p.lat(), p.lon()), (-0.3, 0.4));
        assert!(matches!(spec.inverse(PlanePoint::new(0.0, 2.0)), Err(Error::OutOfImage(_))));
        assert!(matches!(spec.inverse(PlanePoint::new(4.0, 0.0)), Err(Error::OutOfImage(_))));
    }

    #[test]
    fn equal_area_inverse_limits() {
        let spec = ProjectionSpec::cylindrical(CylindricalProfile::EqualArea, 0.0).unwrap();
        assert!(matches!(spec.inverse(PlanePoint::new(0.0, 1.01)), Err(Error::OutOfImage(_))));
        let p = spec.inverse(PlanePoint::new(0.0, 1.0)).unwrap();
        assert_eq!(p, GeoPoint::north_pole());
    }

    #[test]
    fn bad_ref_lat_rejected() {
        assert!(ProjectionSpec::cylindrical(CylindricalProfile::Conformal, FRAC_PI_2).is_err());
    }

    #[test]
    fn conic_domain_and_image() {
        let params = build_conic(47.5f64.to_radians(), 62.5f64.to_radians()).unwrap();
        let spec = ProjectionSpec::conic(params);
        assert!(spec.in_domain(g(80.0, 0.0)));
        assert!(spec.in_domain(GeoPoint::north_pole()));
        let apex = PlanePoint::new(0.0, params.rho1());
        assert!(matches!(spec.inverse(apex), Err(Error::OutOfImage(_))));
        // angle about the apex beyond n·π
        let far = PlanePoint::new(-0.1, params.rho1() + 0.5);
        assert!(matches!(spec.inverse(far), Err(Error::OutOfImage(_))));
    }

    #[test]
    fn round_trips_fixed_points() {
        let params = build_conic(0.8, 1.1).unwrap();
        let specs = [
            ProjectionSpec::Stereographic { from: Pole::North },
            ProjectionSpec::Stereographic { from: Pole::South },
            ProjectionSpec::ObliqueStereographic { tangent: g(55.0, 100.0) },
            ProjectionSpec::Gnomonic { tangent: g(30.0, -20.0) },
            ProjectionSpec::cylindrical(CylindricalProfile::Equirectangular, 0.3).unwrap(),
            ProjectionSpec::cylindrical(CylindricalProfile::Conformal, 0.0).unwrap(),
            ProjectionSpec::cylindrical(CylindricalProfile::EqualArea, -0.5).unwrap(),
            ProjectionSpec::conic(params),
        ];
        let pts = [g(35.0, -10.0), g(10.0, 5.0), g(50.0, 179.0), g(20.0, -35.0)];
        for spec in &specs {
            for p in pts {
                if let Ok(q) = spec.forward(p) {
                    let back = spec.inverse(q).unwrap();
                    assert!(great_circle_distance(p, back) < 1e-12, "{spec:?} {p:?}");
                }
            }
        }
    }

    #[test]
    fn unwrapped_longitude_is_continuous() {
        let spec = ProjectionSpec::cylindrical(CylindricalProfile::Equirectangular, 0.0).unwrap();
        let a = spec.forward_unwrapped(0.0, std::f64::consts::PI + 0.1).unwrap();
        assert!((a.x - (std::f64::consts::PI + 0.1)).abs() < 1e-15);
    }

    #[test]
    fn single_precision_forward() {
        let spec = ProjectionSpec::<f32>::Stereographic { from: Pole::North };
        let q = spec.forward(GeoPoint::from_degrees(0.0, 0.0).unwrap()).unwrap();
        assert!((q.x - 2.0).abs() < 1e-6);
    }
}

//! WGS84 transverse Mercator projection into a fixed UTM zone.
//!
//! Forward and inverse use the USGS series expansions (third order in the
//! eccentricity). Everything is generic over the float type.

use num_traits::Float;

use crate::error::{Error, Result};

const WGS84_A: f64 = 6_378_137.0;
const WGS84_F: f64 = 1.0 / 298.257_223_563;
const K0: f64 = 0.9996;
const FALSE_EASTING: f64 = 500_000.0;
const FALSE_NORTHING_SOUTH: f64 = 10_000_000.0;
pub const MAX_UTM_LATITUDE: f64 = 84.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtmPoint<F> {
    pub easting: F,
    pub northing: F,
    pub zone: u8,
    pub south: bool,
}

#[inline]
fn c<F: Float>(x: f64) -> F {
    F::from(x).expect("constant representable")
}

/// Zone number for a longitude in degrees (1..=60).
pub fn zone_for_longitude<F: Float>(lon: F) -> u8 {
    let lon = lon.to_f64().unwrap_or(0.0);
    let z = ((lon + 180.0) / 6.0).floor() as i64 + 1;
    z.clamp(1, 60) as u8
}

pub fn central_meridian<F: Float>(zone: u8) -> F {
    c::<F>(f64::from(zone) * 6.0 - 183.0)
}

/// Projects `(lat, lon)` in degrees into UTM `zone`; `south` selects the
/// southern-hemisphere false northing.
pub fn latlon_to_utm_in_zone<F: Float>(lat: F, lon: F, zone: u8, south: bool) -> Result<UtmPoint<F>> {
    if !(lat.abs() <= c(MAX_UTM_LATITUDE)) {
        return Err(Error::OutOfDomain(format!(
            "latitude {:?} outside UTM domain",
            lat.to_f64()
        )));
    }
    let a: F = c(WGS84_A);
    let f: F = c(WGS84_F);
    let k0: F = c(K0);
    let e2 = f * (c::<F>(2.0) - f);
    let ep2 = e2 / (F::one() - e2);
    let e4 = e2 * e2;
    let e6 = e4 * e2;

    let phi = lat.to_radians();
    let dlam = (lon - central_meridian::<F>(zone)).to_radians();
    let (sin_phi, cos_phi) = phi.sin_cos();
    let tan_phi = sin_phi / cos_phi;

    let n = a / (F::one() - e2 * sin_phi * sin_phi).sqrt();
    let t = tan_phi * tan_phi;
    let cc = ep2 * cos_phi * cos_phi;
    let aa = dlam * cos_phi;

    let m = meridian_arc(phi, a, e2, e4, e6);

    let a2 = aa * aa;
    let a3 = a2 * aa;
    let a4 = a3 * aa;
    let a5 = a4 * aa;
    let a6 = a5 * aa;

    let easting = k0
        * n
        * (aa + (F::one() - t + cc) * a3 / c(6.0)
            + (c::<F>(5.0) - c::<F>(18.0) * t + t * t + c::<F>(72.0) * cc - c::<F>(58.0) * ep2) * a5
                / c(120.0))
        + c(FALSE_EASTING);
    let mut northing = k0
        * (m + n
            * tan_phi
            * (a2 / c(2.0)
                + (c::<F>(5.0) - t + c::<F>(9.0) * cc + c::<F>(4.0) * cc * cc) * a4 / c(24.0)
                + (c::<F>(61.0) - c::<F>(58.0) * t + t * t + c::<F>(600.0) * cc - c::<F>(330.0) * ep2)
                    * a6
                    / c(720.0)));
    if south {
        northing = northing + c(FALSE_NORTHING_SOUTH);
    }
    Ok(UtmPoint { easting, northing, zone, south })
}

/// Projects into the zone that contains the point itself.
pub fn latlon_to_utm<F: Float>(lat: F, lon: F) -> Result<UtmPoint<F>> {
    latlon_to_utm_in_zone(lat, lon, zone_for_longitude(lon), lat < F::zero())
}

fn meridian_arc<F: Float>(phi: F, a: F, e2: F, e4: F, e6: F) -> F {
    a * ((F::one() - e2 / c(4.0) - c::<F>(3.0) * e4 / c(64.0) - c::<F>(5.0) * e6 / c(256.0)) * phi
        - (c::<F>(3.0) * e2 / c(8.0) + c::<F>(3.0) * e4 / c(32.0) + c::<F>(45.0) * e6 / c(1024.0))
            * (c::<F>(2.0) * phi).sin()
        + (c::<F>(15.0) * e4 / c(256.0) + c::<F>(45.0) * e6 / c(1024.0)) * (c::<F>(4.0) * phi).sin()
        - (c::<F>(35.0) * e6 / c(3072.0)) * (c::<F>(6.0) * phi).sin())
}

/// Inverse projection; returns `(lat, lon)` in degrees.
pub fn utm_to_latlon<F: Float>(p: UtmPoint<F>) -> (F, F) {
    let a: F = c(WGS84_A);
    let f: F = c(WGS84_F);
    let k0: F = c(K0);
    let e2 = f * (c::<F>(2.0) - f);
    let ep2 = e2 / (F::one() - e2);
    let e4 = e2 * e2;
    let e6 = e4 * e2;

    let x = p.easting - c(FALSE_EASTING);
    let y = if p.south { p.northing - c(FALSE_NORTHING_SOUTH) } else { p.northing };

    let m = y / k0;
    let mu = m / (a * (F::one() - e2 / c(4.0) - c::<F>(3.0) * e4 / c(64.0) - c::<F>(5.0) * e6 / c(256.0)));
    let sq = (F::one() - e2).sqrt();
    let e1 = (F::one() - sq) / (F::one() + sq);
    let e1_2 = e1 * e1;
    let e1_3 = e1_2 * e1;
    let e1_4 = e1_3 * e1;
    let phi1 = mu
        + (c::<F>(1.5) * e1 - c::<F>(27.0) * e1_3 / c(32.0)) * (c::<F>(2.0) * mu).sin()
        + (c::<F>(21.0) * e1_2 / c(16.0) - c::<F>(55.0) * e1_4 / c(32.0)) * (c::<F>(4.0) * mu).sin()
        + (c::<F>(151.0) * e1_3 / c(96.0)) * (c::<F>(6.0) * mu).sin()
        + (c::<F>(1097.0) * e1_4 / c(512.0)) * (c::<F>(8.0) * mu).sin();

    let (sin1, cos1) = phi1.sin_cos();
    let tan1 = sin1 / cos1;
    let c1 = ep2 * cos1 * cos1;
    let t1 = tan1 * tan1;
    let w = F::one() - e2 * sin1 * sin1;
    let n1 = a / w.sqrt();
    let r1 = a * (F::one() - e2) / (w * w.sqrt());
    let d = x / (n1 * k0);
    let d2 = d * d;
    let d3 = d2 * d;
    let d4 = d3 * d;
    let d5 = d4 * d;
    let d6 = d5 * d;

    let phi = phi1
        - (n1 * tan1 / r1)
            * (d2 / c(2.0)
                - (c::<F>(5.0) + c::<F>(3.0) * t1 + c::<F>(10.0) * c1 - c::<F>(4.0) * c1 * c1 - c::<F>(9.0) * ep2)
                    * d4
                    / c(24.0)
                + (c::<F>(61.0) + c::<F>(90.0) * t1 + c::<F>(298.0) * c1 + c::<F>(45.0) * t1 * t1
                    - c::<F>(252.0) * ep2
                    - c::<F>(3.0) * c1 * c1)
                    * d6
                    / c(720.0));
    let lam = (d - (F::one() + c::<F>(2.0) * t1 + c1) * d3 / c(6.0)
        + (c::<F>(5.0) - c::<F>(2.0) * c1 + c::<F>(28.0) * t1 - c::<F>(3.0) * c1 * c1 + c::<F>(8.0) * ep2
            + c::<F>(24.0) * t1 * t1)
            * d5
            / c(120.0))
        / cos1;

    (phi.to_degrees(), central_meridian::<F>(p.zone) + lam.to_degrees())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn central_meridian_on_equator_is_false_origin() {
        let p = latlon_to_utm_in_zone(0.0_f64, -117.0, 11, false).unwrap();
        assert!((p.easting - 500_000.0).abs() < 1e-6);
        assert!(p.northing.abs() < 1e-6);
    }

    #[test]
    fn southern_california_is_zone_11() {
        assert_eq!(zone_for_longitude(-117.5_f64), 11);
        assert_eq!(zone_for_longitude(-116.2_f64), 11);
        assert_eq!(zone_for_longitude(-119.0_f64), 11);
        assert_eq!(zone_for_longitude(-120.1_f64), 10);
    }

    #[test]
    fn polar_latitudes_rejected() {
        assert!(matches!(latlon_to_utm(85.0_f64, 0.0), Err(Error::OutOfDomain(_))));
        assert!(matches!(latlon_to_utm(-84.5_f64, 0.0), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let p = latlon_to_utm_in_zone(34.0_f32, -117.0, 11, false).unwrap();
        assert!((p.easting - 500_000.0).abs() < 1.0);
        let (lat, lon) = utm_to_latlon(p);
        assert!((lat - 34.0).abs() < 1e-3 && (lon + 117.0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn round_trip_within_zone(lat in -80.0_f64..84.0, off in -3.0_f64..3.0, zone in 1u8..=60) {
            let lon = central_meridian::<f64>(zone) + off;
            let p = latlon_to_utm_in_zone(lat, lon, zone, lat < 0.0).unwrap();
            let (lat2, lon2) = utm_to_latlon(p);
            prop_assert!((lat - lat2).abs() < 1e-6, "lat {lat} -> {lat2}");
            prop_assert!((lon - lon2).abs() < 1e-6, "lon {lon} -> {lon2}");
        }
    }
}

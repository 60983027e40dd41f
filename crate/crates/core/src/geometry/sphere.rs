use serde::{Deserialize, Serialize};

use super::{rational_sqrt, SpherePoint};
use crate::arith::BigRational;
use crate::error::{Error, Result};

/// The two atlases of S^2 used here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Atlas {
    /// Six charts U_i = {x_i > 0}, U_{3+i} = {x_i < 0}, each dropping x_i.
    HalfSphere,
    /// Chart 1 projects from (0,0,1), chart 2 from (0,0,-1).
    Stereographic,
}

impl Atlas {
    pub fn chart_count(self) -> usize {
        match self {
            Atlas::HalfSphere => 6,
            Atlas::Stereographic => 2,
        }
    }

    fn check_index(self, i: usize) -> Result<()> {
        if i == 0 || i > self.chart_count() {
            return Err(Error::domain(format!(
                "chart index {i} out of range 1..={} for the {self:?} atlas",
                self.chart_count()
            )));
        }
        Ok(())
    }
}

/// Axis (1-based) dropped by half-sphere chart i, and whether x_axis > 0 there.
fn half_sphere_axis(i: usize) -> (usize, bool) {
    ((i - 1) % 3 + 1, i <= 3)
}

fn kept_axes(axis: usize) -> (usize, usize) {
    match axis {
        1 => (2, 3),
        2 => (1, 3),
        _ => (1, 2),
    }
}

/// Local coordinates of `pt` in chart i.
pub fn chart(atlas: Atlas, i: usize, pt: &SpherePoint) -> Result<[BigRational; 2]> {
    atlas.check_index(i)?;
    match atlas {
        Atlas::HalfSphere => {
            let (axis, positive) = half_sphere_axis(i);
            let x = pt.x(axis);
            let inside = if positive { *x > 0 } else { *x < 0 };
            if !inside {
                return Err(Error::domain(format!("{pt} is outside half-sphere chart {i}")));
            }
            let (a, b) = kept_axes(axis);
            Ok([pt.x(a).clone(), pt.x(b).clone()])
        }
        Atlas::Stereographic => {
            let (x1, x2, x3) = (pt.x(1), pt.x(2), pt.x(3));
            let den = if i == 1 {
                BigRational::from(1 - x3)
            } else {
                BigRational::from(1 + x3)
            };
            if den == 0 {
                return Err(Error::domain(format!("{pt} is the excluded pole of stereographic chart {i}")));
            }
            Ok([BigRational::from(x1 / &den), BigRational::from(x2 / &den)])
        }
    }
}

/// Point of S^2 with local coordinates `c` in chart i.
///
/// Half-sphere inverses need sqrt(1 - c1^2 - c2^2); it fails unless that
/// square root is rational.
pub fn chart_inverse(atlas: Atlas, i: usize, c: &[BigRational; 2]) -> Result<SpherePoint> {
    atlas.check_index(i)?;
    let [c1, c2] = c;
    let r2 = BigRational::from(c1 * c1) + BigRational::from(c2 * c2);
    match atlas {
        Atlas::HalfSphere => {
            let (axis, positive) = half_sphere_axis(i);
            let rest = BigRational::from(1 - &r2);
            if rest <= 0 {
                return Err(Error::domain(format!("({c1}, {c2}) is outside the image of half-sphere chart {i}")));
            }
            let root = rational_sqrt(&rest).ok_or_else(|| {
                Error::domain(format!("sqrt({rest}) is irrational; no exact preimage in chart {i}"))
            })?;
            let missing = if positive { root } else { -root };
            let mut x: [BigRational; 3] = Default::default();
            let (a, b) = kept_axes(axis);
            x[axis - 1] = missing;
            x[a - 1] = c1.clone();
            x[b - 1] = c2.clone();
            let [x1, x2, x3] = x;
            SpherePoint::new(x1, x2, x3)
        }
        Atlas::Stereographic => {
            let den = BigRational::from(&r2 + 1u32);
            let x1 = BigRational::from(c1 * 2u32) / &den;
            let x2 = BigRational::from(c2 * 2u32) / &den;
            let x3 = if i == 1 {
                BigRational::from(&r2 - 1u32) / den
            } else {
                (1 - r2) / den
            };
            SpherePoint::new(x1, x2, x3)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrip {
    pub coords: [BigRational; 2],
    /// phi_i^-1(phi_i(pt)) - pt.
    pub residual: [BigRational; 3],
    /// Half-sphere only: the dropped coordinate squared equals 1 minus the
    /// squares of the kept ones.
    pub squared_identity: Option<bool>,
}

impl RoundTrip {
    pub fn is_exact(&self) -> bool {
        self.residual.iter().all(|r| *r == 0) && self.squared_identity != Some(false)
    }
}

pub fn chart_roundtrip(atlas: Atlas, i: usize, pt: &SpherePoint) -> Result<RoundTrip> {
    let coords = chart(atlas, i, pt)?;
    let back = chart_inverse(atlas, i, &coords)?;
    let residual = [1, 2, 3].map(|k| BigRational::from(back.x(k) - pt.x(k)));
    let squared_identity = match atlas {
        Atlas::HalfSphere => {
            let (axis, _) = half_sphere_axis(i);
            let [c1, c2] = &coords;
            let rest = (1 - BigRational::from(c1 * c1)) - BigRational::from(c2 * c2);
            Some(BigRational::from(pt.x(axis) * pt.x(axis)) == rest)
        }
        Atlas::Stereographic => None,
    };
    Ok(RoundTrip {
        coords,
        residual,
        squared_identity,
    })
}

/// phi_1 o phi_2^-1 for the stereographic atlas (from chart 2 coordinates to chart 1).
/// With `reverse`, phi_2 o phi_1^-1.
pub fn stereographic_transition(v: &[BigRational; 2], reverse: bool) -> Result<[BigRational; 2]> {
    let (from, to) = if reverse { (1, 2) } else { (2, 1) };
    let pt = chart_inverse(Atlas::Stereographic, from, v)?;
    chart(Atlas::Stereographic, to, &pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational_sphere_point;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from((n, d))
    }

    fn p3412() -> SpherePoint {
        SpherePoint::from_ints([3, 4, 12], 13).unwrap()
    }

    #[test]
    fn stereographic_roundtrip_is_exact() {
        let r = chart_roundtrip(Atlas::Stereographic, 1, &p3412()).unwrap();
        assert_eq!(r.coords, [q(3, 1), q(4, 1)]);
        assert!(r.is_exact());
        let r = chart_roundtrip(Atlas::Stereographic, 2, &p3412()).unwrap();
        assert_eq!(r.coords, [q(3, 25), q(4, 25)]);
        assert!(r.is_exact());
    }

    #[test]
    fn stereographic_poles_are_excluded() {
        let north = SpherePoint::from_ints([0, 0, 1], 1).unwrap();
        assert!(chart(Atlas::Stereographic, 1, &north).is_err());
        assert!(chart(Atlas::Stereographic, 2, &north).is_ok());
        let south = SpherePoint::from_ints([0, 0, -1], 1).unwrap();
        assert!(chart(Atlas::Stereographic, 2, &south).is_err());
    }

    #[test]
    fn half_sphere_charts() {
        let p = SpherePoint::from_ints([-3, 4, 12], 13).unwrap();
        let r = chart_roundtrip(Atlas::HalfSphere, 2, &p).unwrap();
        assert_eq!(r.coords, [q(-3, 13), q(12, 13)]);
        assert_eq!(r.squared_identity, Some(true));
        assert!(r.is_exact());
        assert!(chart(Atlas::HalfSphere, 1, &p).is_err());
        assert!(chart_roundtrip(Atlas::HalfSphere, 4, &p).unwrap().is_exact());
        assert!(chart(Atlas::HalfSphere, 7, &p).is_err());
        // boundary x3 = 0 lies in neither U_3 nor U_6
        let eq = SpherePoint::from_ints([3, 4, 0], 5).unwrap();
        assert!(chart(Atlas::HalfSphere, 3, &eq).is_err());
        assert!(chart(Atlas::HalfSphere, 6, &eq).is_err());
    }

    #[test]
    fn half_sphere_inverse_needs_rational_root() {
        assert!(chart_inverse(Atlas::HalfSphere, 1, &[q(1, 2), q(1, 2)]).is_err());
        assert!(chart_inverse(Atlas::HalfSphere, 1, &[q(1, 1), q(0, 1)]).is_err());
    }

    #[test]
    fn composite_is_self_inverse_not_identity() {
        for (a, b) in [(3, 4), (1, 7), (-2, 5), (5, -11)] {
            let pt = rational_sphere_point((q(a, 3), q(b, 2)));
            let u = chart(Atlas::Stereographic, 1, &pt).unwrap();
            let v = stereographic_transition(&u, true).unwrap();
            assert_eq!(stereographic_transition(&v, false).unwrap(), u);
            // the coordinate change is inversion in the unit circle
            let r2 = BigRational::from(&v[0] * &v[0]) + BigRational::from(&v[1] * &v[1]);
            assert_eq!(u[0], BigRational::from(&v[0] / &r2));
        }
    }
}

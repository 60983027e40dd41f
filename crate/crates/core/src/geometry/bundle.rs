use super::{dot, SpherePoint};
use crate::arith::BigRational;
use crate::error::{Error, Result};

pub type Mat2 = [[BigRational; 2]; 2];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let entry = |i: usize, j: usize| {
        BigRational::from(&a[i][0] * &b[0][j]) + BigRational::from(&a[i][1] * &b[1][j])
    };
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

fn apply(m: &Mat2, y: &[BigRational; 2]) -> [BigRational; 2] {
    let row = |i: usize| BigRational::from(&m[i][0] * &y[0]) + BigRational::from(&m[i][1] * &y[1]);
    [row(0), row(1)]
}

fn in_bundle_chart(i: usize, pt: &SpherePoint) -> Result<()> {
    if !(1..=3).contains(&i) {
        return Err(Error::domain(format!("bundle chart index {i} out of range 1..=3")));
    }
    if BigRational::from(pt.x(i).abs_ref()) >= 1 {
        return Err(Error::domain(format!("{pt} is outside U_{i} = {{|x_{i}| < 1}}")));
    }
    Ok(())
}

/// g_ij at a point of U_i n U_j, for (i, j) in {(2,1), (3,2), (1,3)}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    pub pair: (usize, usize),
    pub base: SpherePoint,
    pub entries: Mat2,
}

impl TransitionMatrix {
    pub fn det(&self) -> BigRational {
        let [[a, b], [c, d]] = &self.entries;
        BigRational::from(a * d) - BigRational::from(b * c)
    }

    pub fn apply(&self, y: &[BigRational; 2]) -> [BigRational; 2] {
        apply(&self.entries, y)
    }
}

pub fn transition_matrix(pair: (usize, usize), pt: &SpherePoint) -> Result<TransitionMatrix> {
    let (i, j) = pair;
    let (x1, x2, x3) = (pt.x(1), pt.x(2), pt.x(3));
    // (product on the diagonal, off-diagonal coordinate, the two squared coordinates)
    let (diag, off, s1, s2) = match pair {
        (2, 1) => (BigRational::from(x1 * x2), x3, x2, x3),
        (3, 2) => (BigRational::from(x2 * x3), x1, x1, x3),
        (1, 3) => (BigRational::from(x1 * x3), x2, x1, x2),
        _ => {
            return Err(Error::domain(format!(
                "no closed-form transition for ({i}, {j}); use (2,1), (3,2) or (1,3)"
            )))
        }
    };
    in_bundle_chart(i, pt)?;
    in_bundle_chart(j, pt)?;
    let scale = -(BigRational::from(s1 * s1) + BigRational::from(s2 * s2)).recip();
    let entries = [
        [BigRational::from(&scale * &diag), BigRational::from(&scale * off)],
        [-BigRational::from(&scale * off), BigRational::from(&scale * &diag)],
    ];
    let g = TransitionMatrix {
        pair,
        base: pt.clone(),
        entries,
    };
    if g.det() == 0 {
        return Err(Error::Internal(format!("g_{i}{j} is singular at {pt}")));
    }
    Ok(g)
}

/// Fiber coordinates of the tangent vector t = (u, v, w) at `pt` in bundle chart i:
/// chart 1 (v x3 - w x2, u), chart 2 (w x1 - u x3, v), chart 3 (u x2 - v x1, w).
pub fn bundle_trivialization(i: usize, pt: &SpherePoint, t: &[BigRational; 3]) -> Result<[BigRational; 2]> {
    in_bundle_chart(i, pt)?;
    let x = pt.coords();
    if dot(x, t) != 0 {
        return Err(Error::domain(format!(
            "({}, {}, {}) is not tangent at {pt}",
            t[0], t[1], t[2]
        )));
    }
    let [x1, x2, x3] = x;
    let [u, v, w] = t;
    let cross = |a: &BigRational, b: &BigRational, c: &BigRational, d: &BigRational| {
        BigRational::from(a * b) - BigRational::from(c * d)
    };
    Ok(match i {
        1 => [cross(v, x3, w, x2), u.clone()],
        2 => [cross(w, x1, u, x3), v.clone()],
        _ => [cross(u, x2, v, x1), w.clone()],
    })
}

/// The tangent vector at `pt` whose chart-i fiber coordinates are `y`.
pub fn bundle_inverse(i: usize, pt: &SpherePoint, y: &[BigRational; 2]) -> Result<[BigRational; 3]> {
    in_bundle_chart(i, pt)?;
    // cyclic successor axes of i
    let (j, k) = match i {
        1 => (2, 3),
        2 => (3, 1),
        _ => (1, 2),
    };
    let (xi, xj, xk) = (pt.x(i), pt.x(j), pt.x(k));
    let [a, b] = y;
    // t_j x_k - t_k x_j = a and t_j x_j + t_k x_k = -b x_i
    let det = BigRational::from(xj * xj) + BigRational::from(xk * xk);
    let bxi = BigRational::from(b * xi);
    let tj = (BigRational::from(a * xk) - BigRational::from(&bxi * xj)) / &det;
    let tk = (-BigRational::from(&bxi * xk) - BigRational::from(a * xj)) / &det;
    let mut t: [BigRational; 3] = Default::default();
    t[i - 1] = b.clone();
    t[j - 1] = tj;
    t[k - 1] = tk;
    Ok(t)
}

/// psi_ij(x, y): chart-j fiber coordinates mapped to chart-i ones through the tangent vector.
pub fn transition_apply(i: usize, j: usize, pt: &SpherePoint, y: &[BigRational; 2]) -> Result<[BigRational; 2]> {
    let t = bundle_inverse(j, pt, y)?;
    bundle_trivialization(i, pt, &t)
}

/// g_13 g_32 g_21 at a point of the triple overlap.
pub fn cocycle_product(pt: &SpherePoint) -> Result<Mat2> {
    let g21 = transition_matrix((2, 1), pt)?;
    let g32 = transition_matrix((3, 2), pt)?;
    let g13 = transition_matrix((1, 3), pt)?;
    Ok(mul(&g13.entries, &mul(&g32.entries, &g21.entries)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational_sphere_point;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from((n, d))
    }

    fn p3412() -> SpherePoint {
        SpherePoint::from_ints([3, 4, 12], 13).unwrap()
    }

    fn identity() -> Mat2 {
        [[q(1, 1), q(0, 1)], [q(0, 1), q(1, 1)]]
    }

    #[test]
    fn g21_closed_form() {
        let g = transition_matrix((2, 1), &p3412()).unwrap();
        // -169/160 * [[12/169, 12/13], [-12/13, 12/169]]
        assert_eq!(g.entries[0][0], q(-12, 160));
        assert_eq!(g.entries[0][1], q(-12 * 13, 160));
        assert_eq!(g.entries[1][0], q(12 * 13, 160));
        assert_eq!(g.entries[1][1], q(-12, 160));
        assert_ne!(g.det(), 0);
    }

    #[test]
    fn cocycle_at_3_4_12() {
        assert_eq!(cocycle_product(&p3412()).unwrap(), identity());
    }

    #[test]
    fn overlap_and_pair_checks() {
        let axis = SpherePoint::from_ints([1, 0, 0], 1).unwrap();
        assert!(transition_matrix((2, 1), &axis).is_err());
        assert!(transition_matrix((3, 2), &axis).is_ok());
        assert!(transition_matrix((1, 2), &p3412()).is_err());
    }

    #[test]
    fn fibers_at_axis_point() {
        let pt = SpherePoint::from_ints([1, 0, 0], 1).unwrap();
        let t = [q(0, 1), q(1, 1), q(0, 1)];
        // (1,0,0) is on the boundary of U_1
        assert!(bundle_trivialization(1, &pt, &t).is_err());
        assert_eq!(bundle_trivialization(2, &pt, &t).unwrap(), [q(0, 1), q(1, 1)]);
        let bad = [q(1, 1), q(0, 1), q(0, 1)];
        assert!(bundle_trivialization(2, &pt, &bad).is_err());
    }

    #[test]
    fn inverse_recovers_vector() {
        let pt = p3412();
        // (4, -3, 0) and (12, 0, -3) are tangent at (3,4,12)/13
        for t in [[q(4, 1), q(-3, 1), q(0, 1)], [q(12, 1), q(0, 1), q(-3, 1)]] {
            for i in 1..=3 {
                let y = bundle_trivialization(i, &pt, &t).unwrap();
                assert_eq!(bundle_inverse(i, &pt, &y).unwrap(), t);
            }
        }
    }

    fn seed() -> impl Strategy<Value = (i64, i64, i64, i64)> {
        (-40i64..40, 1i64..20, -40i64..40, 1i64..20)
    }

    proptest! {
        #[test]
        fn psi_is_left_multiplication((a, d, b, e) in seed(), y1 in -50i64..50, y2 in -50i64..50) {
            let pt = rational_sphere_point((q(a, d), q(b, e)));
            for (i, j) in [(2, 1), (3, 2), (1, 3)] {
                let Ok(g) = transition_matrix((i, j), &pt) else { continue };
                let y = [q(y1, 7), q(y2, 3)];
                prop_assert_eq!(transition_apply(i, j, &pt, &y).unwrap(), g.apply(&y));
            }
        }

        #[test]
        fn cocycle_holds((a, d, b, e) in seed()) {
            let pt = rational_sphere_point((q(a, d), q(b, e)));
            prop_assume!(pt.coords().iter().all(|x| BigRational::from(x.abs_ref()) < 1));
            prop_assert_eq!(cocycle_product(&pt).unwrap(), identity());
        }

        #[test]
        fn tangent_inputs_never_rejected((a, d, b, e) in seed(), c1 in -9i64..9, c2 in -9i64..9) {
            let pt = rational_sphere_point((q(a, d), q(b, e)));
            // x cross (c1, c2, 0) is always tangent
            let [x1, x2, x3] = pt.coords();
            let (c1, c2) = (q(c1, 1), q(c2, 1));
            let t = [-BigRational::from(x3 * &c2), BigRational::from(x3 * &c1),
                     BigRational::from(x1 * &c2) - BigRational::from(x2 * &c1)];
            for i in 1..=3 {
                if BigRational::from(pt.x(i).abs_ref()) < 1 {
                    prop_assert!(bundle_trivialization(i, &pt, &t).is_ok());
                }
            }
        }
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bundle::{cocycle_product, transition_apply, transition_matrix};
use super::sphere::{chart_roundtrip, Atlas};
use super::{rational_sphere_point, SpherePoint};
use crate::arith::BigRational;

/// Deterministic rational points in the triple overlap |x1|, |x2|, |x3| < 1.
pub fn sample_points(samples: usize, seed: u64) -> Vec<SpherePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let a = BigRational::from((rng.gen_range(-30i64..=30), rng.gen_range(1i64..=12)));
        let b = BigRational::from((rng.gen_range(-30i64..=30), rng.gen_range(1i64..=12)));
        let pt = rational_sphere_point((a, b));
        if pt.coords().iter().all(|x| BigRational::from(x.abs_ref()) < 1) {
            out.push(pt);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub index: usize,
    pub point: SpherePoint,
    pub cocycle_identity: bool,
    pub determinants_nonzero: bool,
    pub stereographic_exact: bool,
    /// Half-sphere charts containing the point; all must round-trip exactly.
    pub half_sphere_charts: Vec<usize>,
    pub half_sphere_exact: bool,
    /// psi_ij(x, y) = (x, g_ij(x) y) on a fixed set of fiber vectors.
    pub transition_consistent: bool,
}

impl SampleReport {
    pub fn ok(&self) -> bool {
        self.cocycle_identity
            && self.determinants_nonzero
            && self.stereographic_exact
            && self.half_sphere_exact
            && self.transition_consistent
    }
}

fn check(index: usize, pt: SpherePoint) -> SampleReport {
    let one = BigRational::from(1);
    let zero = BigRational::new();
    let identity = [[one.clone(), zero.clone()], [zero, one]];
    let cocycle_identity = cocycle_product(&pt).map(|m| m == identity).unwrap_or(false);
    let pairs = [(2, 1), (3, 2), (1, 3)];
    let determinants_nonzero = pairs
        .iter()
        .all(|&pair| transition_matrix(pair, &pt).map(|g| g.det() != 0).unwrap_or(false));
    let stereographic_exact = (1..=2).all(|i| {
        chart_roundtrip(Atlas::Stereographic, i, &pt)
            .map(|r| r.is_exact())
            .unwrap_or(false)
    });
    let mut half_sphere_charts = Vec::new();
    let mut half_sphere_exact = true;
    for i in 1..=6 {
        if let Ok(r) = chart_roundtrip(Atlas::HalfSphere, i, &pt) {
            half_sphere_charts.push(i);
            half_sphere_exact &= r.is_exact();
        }
    }
    let fibers = [(1, 0), (0, 1), (3, -7)].map(|(a, b)| [BigRational::from(a), BigRational::from(b)]);
    let transition_consistent = pairs.iter().all(|&(i, j)| {
        let Ok(g) = transition_matrix((i, j), &pt) else {
            return false;
        };
        fibers
            .iter()
            .all(|y| transition_apply(i, j, &pt, y).map(|z| z == g.apply(y)).unwrap_or(false))
    });
    SampleReport {
        index,
        point: pt,
        cocycle_identity,
        determinants_nonzero,
        stereographic_exact,
        half_sphere_charts,
        half_sphere_exact,
        transition_consistent,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChartReport {
    pub samples: usize,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub reports: Vec<SampleReport>,
}

/// Runs every exact chart and bundle check on `samples` generated points.
pub fn verify_charts(samples: usize, seed: u64) -> ChartReport {
    let reports: Vec<SampleReport> = sample_points(samples, seed)
        .into_par_iter()
        .enumerate()
        .map(|(i, pt)| check(i, pt))
        .collect();
    let passed = reports.iter().filter(|r| r.ok()).count();
    ChartReport {
        samples,
        seed,
        passed,
        failed: samples - passed,
        reports,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_points_pass_everything() {
        let r = verify_charts(50, 7);
        assert_eq!(r.failed, 0, "{:?}", r.reports.iter().find(|s| !s.ok()));
        assert!(r.reports.iter().all(|s| !s.half_sphere_charts.is_empty()));
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_points(20, 3), sample_points(20, 3));
        assert_ne!(sample_points(20, 3), sample_points(20, 4));
    }
}

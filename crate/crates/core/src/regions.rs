//! Inequality regions in divisor-coefficient space.
//!
//! A region table predicts, for divisors supported on a fixed set of rays,
//! in which degrees the cohomology of `O(D)` is nonzero: degree `i` is
//! nonvanishing exactly when the coefficient point satisfies all
//! inequalities of at least one region of degree `i`. Tables are fixture
//! data verified pointwise against the cohomology engine.

use serde::{Deserialize, Serialize};

/// An affine condition `coeffs . x >= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
}

impl Inequality {
    pub fn holds(&self, x: &[i64]) -> bool {
        assert_eq!(self.coeffs.len(), x.len());
        let lhs: i128 = self.coeffs.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum();
        lhs >= self.rhs as i128
    }
}

/// A conjunction of inequalities tied to a cohomology degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub id: u32,
    pub degree: usize,
    pub ineqs: Vec<Inequality>,
}

impl Region {
    pub fn contains(&self, x: &[i64]) -> bool {
        self.ineqs.iter().all(|ineq| ineq.holds(x))
    }
}

/// A full nonvanishing table: which rays the coefficients vary over, and the
/// regions per degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionTable {
    /// Ray indices the scanned coefficients attach to; all other
    /// coefficients are zero.
    pub vary_rays: Vec<usize>,
    pub regions: Vec<Region>,
}

impl RegionTable {
    pub fn max_degree(&self) -> usize {
        self.regions.iter().map(|r| r.degree).max().unwrap_or(0)
    }

    /// Predicted nonvanishing pattern for a coefficient point, indexed by
    /// degree `0..=max_degree`.
    pub fn nonvanishing(&self, x: &[i64]) -> Vec<bool> {
        let mut out = vec![false; self.max_degree() + 1];
        for r in &self.regions {
            if !out[r.degree] && r.contains(x) {
                out[r.degree] = true;
            }
        }
        out
    }

    /// The divisor with the given coefficients on the varying rays.
    pub fn divisor(&self, ray_count: usize, x: &[i64]) -> crate::fan::TorusDivisor {
        assert_eq!(x.len(), self.vary_rays.len());
        let mut coeffs = vec![0i64; ray_count];
        for (&ray, &v) in self.vary_rays.iter().zip(x) {
            coeffs[ray] = v;
        }
        crate::fan::TorusDivisor::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_membership() {
        let table = RegionTable {
            vary_rays: vec![0, 1],
            regions: vec![
                Region {
                    id: 1,
                    degree: 0,
                    ineqs: vec![Inequality { coeffs: vec![1, 1], rhs: 0 }],
                },
                Region {
                    id: 2,
                    degree: 1,
                    ineqs: vec![Inequality { coeffs: vec![-1, -1], rhs: 2 }],
                },
            ],
        };
        assert_eq!(table.nonvanishing(&[0, 0]), vec![true, false]);
        assert_eq!(table.nonvanishing(&[-1, -1]), vec![false, true]);
        assert_eq!(table.nonvanishing(&[0, -1]), vec![false, false]);
        assert_eq!(table.max_degree(), 1);
        assert_eq!(table.divisor(4, &[3, -2]).coeffs(), &[3, -2, 0, 0]);
    }
}

//! Built-in fans, quivers and nonvanishing tables used by the test suites
//! and shipped as JSON for the command-line tools.

use crate::collections::{Quiver, QuiverArrow, QuiverVertex};
use crate::fan::Fan;
use crate::regions::{Inequality, Region, RegionTable};
use crate::strata::FacetSet;

/// The projective line: rays +1, -1.
pub fn p1() -> Fan {
    Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).expect("valid fixture")
}

/// The projective plane.
pub fn p2() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 0]],
    )
    .expect("valid fixture")
}

/// The product of two projective lines.
pub fn p1xp1() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
        vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
    )
    .expect("valid fixture")
}

/// The first Hirzebruch surface (the plane blown up in a point).
pub fn hirzebruch1() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, 1], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .expect("valid fixture")
}

/// A smooth complete toric threefold with seven rays whose polytope is
/// combinatorially a pentagonal prism. Rays, in order:
///
/// ```text
/// e1 = ( 1, 1, 0)    e2 = (-1,-1, 0)    e3 = (1,0,0)    e4 = (0,1,0)
/// e5 = ( 0, 0, 1)    e6 = ( 0,-1,-1)    e7 = (0,1,1)
/// ```
///
/// The two prism caps are the facets of `e1`, `e2`; the five side facets
/// belong to `e3..e7` with pentagon adjacency 3-5-7-4-6-3. Each cap vertex
/// joins two consecutive side facets, giving the ten maximal cones.
pub fn pentagonal_prism() -> Fan {
    Fan::new(
        3,
        vec![
            vec![1, 1, 0],
            vec![-1, -1, 0],
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![0, -1, -1],
            vec![0, 1, 1],
        ],
        vec![
            vec![0, 2, 4],
            vec![0, 4, 6],
            vec![0, 3, 6],
            vec![0, 3, 5],
            vec![0, 2, 5],
            vec![1, 2, 4],
            vec![1, 4, 6],
            vec![1, 3, 6],
            vec![1, 3, 5],
            vec![1, 2, 5],
        ],
    )
    .expect("valid fixture")
}

/// Rays whose classes generate the Picard lattice of
/// [`pentagonal_prism`]: `E_1, E_2, E_6, E_7`.
pub fn pentagonal_prism_class_basis() -> Vec<usize> {
    vec![0, 1, 5, 6]
}

/// The eleven facet sets of [`pentagonal_prism`] whose union has two
/// connected components (both caps, or opposite runs of side facets).
pub fn pentagonal_prism_two_component_sets() -> Vec<FacetSet> {
    [
        vec![0, 1],
        vec![2, 3],
        vec![2, 6],
        vec![3, 4],
        vec![4, 5],
        vec![5, 6],
        vec![2, 3, 6],
        vec![2, 3, 4],
        vec![3, 4, 5],
        vec![4, 5, 6],
        vec![2, 5, 6],
    ]
    .into_iter()
    .map(FacetSet::from_indices)
    .collect()
}

/// The quiver presenting [`pentagonal_prism`] as a moduli space: five
/// weighted vertices and one arrow per ray.
pub fn pentagonal_prism_quiver() -> Quiver {
    let vertex = |id: &str, weight: i64| QuiverVertex { id: id.into(), weight: Some(weight) };
    let arrow = |id: &str, tail: usize, head: usize, ray: usize| QuiverArrow {
        id: id.into(),
        tail,
        head,
        ray,
    };
    // Vertices: a(-2), b(7), c(-9), d(-4), e(8).
    Quiver::new(
        vec![
            vertex("a", -2),
            vertex("b", 7),
            vertex("c", -9),
            vertex("d", -4),
            vertex("e", 8),
        ],
        vec![
            arrow("1", 3, 1, 0),
            arrow("2", 3, 4, 1),
            arrow("3", 1, 4, 2),
            arrow("4", 0, 4, 3),
            arrow("5", 0, 1, 4),
            arrow("6", 2, 1, 5),
            arrow("7", 2, 0, 6),
        ],
    )
    .expect("valid fixture")
}

/// The 24-region nonvanishing table for [`pentagonal_prism`], in the
/// coefficients `(d1, d2, d6, d7)` on the basis rays `E_1, E_2, E_6, E_7`.
/// Degree `i` cohomology of `O(D)` is nonzero exactly when the point lies
/// in some region of degree `i`.
pub fn pentagonal_prism_regions() -> RegionTable {
    // (id, degree, [(coeffs on (d1,d2,d6,d7), rhs)]): conditions coeffs.x >= rhs.
    #[rustfmt::skip]
    const REGIONS: &[(u32, usize, &[([i64; 4], i64)])] = &[
        (1, 0, &[([1, 1, 0, 0], 0), ([0, 0, 1, 1], 0), ([0, 1, 0, 0], 0), ([0, 0, 1, 0], 0)]),
        (2, 1, &[([-1, -1, 0, 0], 2), ([0, 0, 1, 1], 0), ([-1, 0, 0, 0], 1), ([0, 0, 1, 0], 0)]),
        (3, 1, &[([1, 1, 0, 0], 0), ([0, 0, 1, 1], 0), ([1, 0, 0, 0], 2), ([1, 0, 1, 0], 1)]),
        (4, 1, &[([1, 1, 0, 0], 0), ([0, 0, 1, 0], 0), ([0, 0, 0, -1], 1), ([1, 0, 1, 0], 1), ([1, 0, 0, -1], 2)]),
        (5, 1, &[([1, 1, 0, 0], 0), ([0, 0, 1, 1], 0), ([0, 0, 0, 1], 2), ([0, 1, 0, 1], 1)]),
        (6, 1, &[([1, 1, 0, 0], 0), ([0, 1, 0, 1], 1), ([0, 1, 0, 0], 0), ([0, 1, -1, 0], 2)]),
        (7, 1, &[([1, 1, 0, 0], 0), ([0, 0, -1, -1], 2), ([0, 1, 0, 0], 0), ([0, 0, 0, -1], 1)]),
        (8, 1, &[([1, 1, 0, 0], 0), ([1, 0, 1, 0], 1), ([1, 0, 0, 0], 2), ([1, 0, 0, -1], 2)]),
        (9, 1, &[([1, 1, 0, 0], 0), ([0, 0, 1, 1], 0), ([1, 0, 0, 0], 2), ([0, 0, 0, 1], 2)]),
        (10, 1, &[([1, 1, 0, 0], 0), ([0, 1, 0, 1], 1), ([0, 0, -1, 0], 3), ([0, 0, 0, 1], 2), ([0, 1, -1, 0], 2)]),
        (11, 1, &[([1, 1, 0, 0], 0), ([0, 0, -1, -1], 2), ([0, 1, 0, 0], 0), ([0, 1, -1, 0], 2)]),
        (12, 1, &[([1, 1, 0, 0], 0), ([0, 0, -1, -1], 2), ([0, 0, 0, -1], 1), ([1, 0, 0, -1], 2)]),
        (13, 2, &[([1, 1, 0, 0], 0), ([0, 0, -1, -1], 2), ([1, 0, 0, 0], 2), ([0, 0, -1, 0], 3)]),
        (14, 2, &[([-1, -1, 0, 0], 2), ([0, 0, -1, -1], 2), ([-1, 0, 0, 0], 1), ([-1, 0, -1, 0], 3)]),
        (15, 2, &[([-1, -1, 0, 0], 2), ([0, 0, -1, 0], 3), ([0, 0, 0, 1], 2), ([-1, 0, -1, 0], 3), ([-1, 0, 0, 1], 2)]),
        (16, 2, &[([-1, -1, 0, 0], 2), ([0, 0, -1, -1], 2), ([0, 0, 0, -1], 1), ([0, -1, 0, -1], 3)]),
        (17, 2, &[([-1, -1, 0, 0], 2), ([0, -1, 0, -1], 3), ([0, -1, 0, 0], 3), ([0, -1, 1, 0], 2)]),
        (18, 2, &[([-1, -1, 0, 0], 2), ([0, 0, 1, 1], 0), ([0, -1, 0, 0], 3), ([0, 0, 0, 1], 2)]),
        (19, 2, &[([-1, -1, 0, 0], 2), ([-1, 0, -1, 0], 3), ([-1, 0, 0, 0], 1), ([-1, 0, 0, 1], 2)]),
        (20, 2, &[([-1, -1, 0, 0], 2), ([0, 0, -1, -1], 2), ([-1, 0, 0, 0], 1), ([0, 0, 0, -1], 1)]),
        (21, 2, &[([-1, -1, 0, 0], 2), ([0, -1, 0, -1], 3), ([0, 0, 1, 0], 0), ([0, 0, 0, -1], 1), ([0, -1, 1, 0], 2)]),
        (22, 2, &[([-1, -1, 0, 0], 2), ([0, 0, 1, 1], 0), ([0, -1, 0, 0], 3), ([0, -1, 1, 0], 2)]),
        (23, 2, &[([-1, -1, 0, 0], 2), ([0, 0, 1, 1], 0), ([0, 0, 0, 1], 2), ([-1, 0, 0, 1], 2)]),
        (24, 3, &[([-1, -1, 0, 0], 2), ([0, 0, -1, -1], 2), ([0, -1, 0, 0], 3), ([0, 0, -1, 0], 3)]),
    ];
    RegionTable {
        vary_rays: pentagonal_prism_class_basis(),
        regions: REGIONS
            .iter()
            .map(|&(id, degree, ineqs)| Region {
                id,
                degree,
                ineqs: ineqs
                    .iter()
                    .map(|&(coeffs, rhs)| Inequality { coeffs: coeffs.to_vec(), rhs })
                    .collect(),
            })
            .collect(),
    }
}

/// All fixture fans with short names, for sweeping tests.
pub fn named_fans() -> Vec<(&'static str, Fan)> {
    vec![
        ("p1", p1()),
        ("p2", p2()),
        ("p1xp1", p1xp1()),
        ("hirzebruch1", hirzebruch1()),
        ("pentagonal_prism", pentagonal_prism()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::ClassLattice;

    #[test]
    fn all_fixture_fans_are_smooth_and_complete() {
        for (name, fan) in named_fans() {
            let report = fan.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(report.complete, "{name} not complete");
            assert!(report.simplicial, "{name} not simplicial");
            assert!(report.smooth, "{name} not smooth");
        }
    }

    #[test]
    fn prism_picard_lattice() {
        let fan = pentagonal_prism();
        let lattice = ClassLattice::with_basis(&fan, &pentagonal_prism_class_basis()).unwrap();
        assert_eq!(lattice.free_rank(), 4);
        assert!(lattice.torsion().is_empty());
    }

    #[test]
    fn prism_class_relations() {
        use crate::fan::TorusDivisor;
        let fan = pentagonal_prism();
        let lattice = ClassLattice::with_basis(&fan, &pentagonal_prism_class_basis()).unwrap();
        let class = |coeffs: [i64; 7]| lattice.class_of(&TorusDivisor::new(coeffs.to_vec())).unwrap();
        // E_3 = E_2 - E_1, E_5 = E_6 - E_7, E_4 = -E_1 + E_2 + E_6 - E_7.
        assert_eq!(class([0, 0, 1, 0, 0, 0, 0]), class([-1, 1, 0, 0, 0, 0, 0]));
        assert_eq!(class([0, 0, 0, 0, 1, 0, 0]), class([0, 0, 0, 0, 0, 1, -1]));
        assert_eq!(class([0, 0, 0, 1, 0, 0, 0]), class([-1, 1, 0, 0, 0, 1, -1]));
        // Canonical representatives live on the basis rays.
        let c = class([1, 1, 1, 1, 1, 1, 1]);
        let rep = c.representative().coeffs();
        assert_eq!(rep[2], 0);
        assert_eq!(rep[3], 0);
        assert_eq!(rep[4], 0);
    }

    #[test]
    fn region_table_shape() {
        let table = pentagonal_prism_regions();
        assert_eq!(table.regions.len(), 24);
        assert_eq!(table.max_degree(), 3);
        assert_eq!(table.regions.iter().filter(|r| r.degree == 0).count(), 1);
        assert_eq!(table.regions.iter().filter(|r| r.degree == 1).count(), 11);
        assert_eq!(table.regions.iter().filter(|r| r.degree == 2).count(), 11);
        assert_eq!(table.regions.iter().filter(|r| r.degree == 3).count(), 1);
        // The canonical class sits in the top-degree region only.
        assert_eq!(table.nonvanishing(&[1, -3, -3, 1]), vec![false, false, false, true]);
    }

    #[test]
    fn prism_quiver_shape() {
        let q = pentagonal_prism_quiver();
        assert_eq!(q.vertices().len(), 5);
        assert_eq!(q.arrows().len(), 7);
        let weights: i64 = q.vertices().iter().map(|v| v.weight.unwrap()).sum();
        assert_eq!(weights, 0);
    }
}

//! Combinatorics of the polytope stratification.
//!
//! A complete fan determines a stratified polytope whose closed top faces
//! F_i correspond to the rays. For a divisor `D` and weight `m`, the subset
//! `Z(m, D)` is the union of the F_i with `<m, e_i> < -d_i`; it is recorded
//! purely combinatorially as the index set [`FacetSet`]. Nonempty
//! intersections of the F_i are faces of the polytope, hence contractible,
//! so the nerve of the cover computes the cohomology of `Z`; the order
//! complex (barycentric subdivision) provides an independent oracle.

use crate::cohomology::SimplicialComplex;
use crate::error::Result;
use crate::fan::{pair, Fan, TorusDivisor};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;

/// A set of facet indices (equivalently, ray indices), stored as a bitmask.
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacetSet {
    bits: u64,
}

impl FacetSet {
    pub fn empty() -> Self {
        Self { bits: 0 }
    }

    pub fn from_bits(bits: u64) -> Self {
        Self { bits }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut bits = 0u64;
        for i in indices {
            assert!(i < 64, "facet index out of range");
            bits |= 1 << i;
        }
        Self { bits }
    }

    pub fn full(ray_count: usize) -> Self {
        assert!(ray_count <= 64);
        if ray_count == 64 {
            Self { bits: u64::MAX }
        } else {
            Self { bits: (1u64 << ray_count) - 1 }
        }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(&self, i: usize) -> bool {
        i < 64 && self.bits & (1 << i) != 0
    }

    pub fn is_subset(&self, other: &FacetSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn complement(&self, ray_count: usize) -> FacetSet {
        FacetSet { bits: Self::full(ray_count).bits & !self.bits }
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..64).filter(|&i| self.contains(i)).collect()
    }
}

impl fmt::Debug for FacetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

impl Serialize for FacetSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.indices().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FacetSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = indices.iter().find(|&&i| i >= 64) {
            return Err(D::Error::custom(format!("facet index {bad} out of range")));
        }
        Ok(FacetSet::from_indices(indices))
    }
}

/// The common-cone complex `K`: subsets of rays contained in a single
/// maximal cone. Nonempty intersections of closed facets of the polytope
/// correspond exactly to its nonempty faces.
#[derive(Clone, Debug)]
pub struct FacetComplex {
    ray_count: usize,
    cone_masks: Vec<u64>,
}

impl FacetComplex {
    pub fn ray_count(&self) -> usize {
        self.ray_count
    }

    pub fn cone_masks(&self) -> &[u64] {
        &self.cone_masks
    }

    /// Is the set contained in a single maximal cone?
    pub fn contains(&self, s: FacetSet) -> bool {
        !s.is_empty() && self.cone_masks.iter().any(|&c| s.bits() & !c == 0)
    }

    /// All nonempty faces as bitmasks, sorted by (cardinality, value).
    pub fn faces(&self) -> Vec<u64> {
        let mut set = BTreeSet::new();
        for &cone in &self.cone_masks {
            // Enumerate nonempty submasks.
            let mut sub = cone;
            while sub != 0 {
                set.insert(sub);
                sub = (sub - 1) & cone;
            }
        }
        let mut faces: Vec<u64> = set.into_iter().collect();
        faces.sort_by_key(|&f| (f.count_ones(), f));
        faces
    }
}

/// The complex generated by the ray sets of the maximal cones.
pub fn facet_complex(fan: &Fan) -> FacetComplex {
    let mut masks: Vec<u64> = fan
        .max_cones()
        .iter()
        .map(|cone| cone.iter().fold(0u64, |m, &i| m | (1 << i)))
        .collect();
    masks.sort_unstable();
    masks.dedup();
    FacetComplex { ray_count: fan.ray_count(), cone_masks: masks }
}

/// The facet set `J = { i : <m, e_i> < -d_i }` describing `Z(m, D)`.
pub fn facet_set(fan: &Fan, d: &TorusDivisor, m: &[i64]) -> Result<FacetSet> {
    fan.check_divisor(d)?;
    fan.check_weight(m)?;
    let mut bits = 0u64;
    for (i, ray) in fan.rays().iter().enumerate() {
        if pair(m, ray)? < -(d.coeff(i) as i128) {
            bits |= 1 << i;
        }
    }
    Ok(FacetSet::from_bits(bits))
}

fn mask_vertices(mask: u64) -> Vec<u32> {
    (0..64).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Nerve of the closed cover `{F_i}_{i in J}`: the subcomplex of `K`
/// induced on `J`. Its reduced cohomology equals that of `Z`.
pub fn nerve(k: &FacetComplex, j: FacetSet) -> SimplicialComplex {
    let mut maximal = BTreeSet::new();
    for &cone in &k.cone_masks {
        let s = cone & j.bits();
        if s != 0 {
            maximal.insert(s);
        }
    }
    SimplicialComplex::from_maximal(maximal.into_iter().map(mask_vertices))
}

/// Order complex of the faces of `K` meeting `J`: the barycentric
/// subdivision of `Z` as a subcomplex of the polytope boundary. Vertices are
/// faces, simplices are chains under inclusion.
pub fn order_complex(k: &FacetComplex, j: FacetSet) -> SimplicialComplex {
    let faces: Vec<u64> = k.faces().into_iter().filter(|&f| f & j.bits() != 0).collect();
    if faces.is_empty() {
        return SimplicialComplex::empty();
    }
    // Faces are sorted by cardinality, so chain vertex ids increase along
    // inclusions and every chain is an ascending vertex list.
    let mut chains: Vec<Vec<u32>> = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    fn extend(
        faces: &[u64],
        from: usize,
        stack: &mut Vec<u32>,
        chains: &mut Vec<Vec<u32>>,
    ) {
        for next in from..faces.len() {
            let top = faces[stack[stack.len() - 1] as usize];
            let f = faces[next];
            if top != f && top & !f == 0 {
                stack.push(next as u32);
                chains.push(stack.clone());
                extend(faces, next + 1, stack, chains);
                stack.pop();
            }
        }
    }
    for start in 0..faces.len() {
        stack.push(start as u32);
        chains.push(stack.clone());
        extend(&faces, start + 1, &mut stack, &mut chains);
        stack.pop();
    }
    SimplicialComplex::from_maximal(chains)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::reduced_betti;
    use crate::fan::canonical_divisor;

    fn p2() -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        )
        .unwrap()
    }

    fn p1() -> Fan {
        Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap()
    }

    #[test]
    fn facet_complex_on_plane() {
        let k = facet_complex(&p2());
        assert!(k.contains(FacetSet::from_indices([0, 1])));
        assert!(k.contains(FacetSet::from_indices([1, 2])));
        assert!(!k.contains(FacetSet::from_indices([0, 1, 2])));
        for i in 0..3 {
            assert!(k.contains(FacetSet::from_indices([i])));
        }
        assert!(!k.contains(FacetSet::empty()));
        // Faces: 3 vertices + 3 edges of the triangle boundary.
        assert_eq!(k.faces().len(), 6);
    }

    #[test]
    fn facet_set_examples() {
        let p1 = p1();
        let d = TorusDivisor::new(vec![-1, -1]);
        let j = facet_set(&p1, &d, &[0]).unwrap();
        assert_eq!(j, FacetSet::from_indices([0, 1]));

        // Weights inside the polytope give an empty facet set.
        let p2 = p2();
        let twice = TorusDivisor::new(vec![0, 0, 2]);
        assert!(facet_set(&p2, &twice, &[1, 1]).unwrap().is_empty());

        // The canonical divisor puts every facet into J at m = 0.
        let k = canonical_divisor(&p2);
        assert_eq!(facet_set(&p2, &k, &[0, 0]).unwrap(), FacetSet::full(3));
    }

    #[test]
    fn nerve_of_empty_set_is_empty() {
        let k = facet_complex(&p2());
        assert!(nerve(&k, FacetSet::empty()).is_empty());
        assert!(order_complex(&k, FacetSet::empty()).is_empty());
    }

    #[test]
    fn nerve_of_full_plane_is_a_circle() {
        let k = facet_complex(&p2());
        let b = reduced_betti(&nerve(&k, FacetSet::full(3)));
        assert_eq!(b.betti(), &[0, 1]);
    }

    #[test]
    fn order_complex_single_facet_is_contractible() {
        let k = facet_complex(&p1());
        let c = order_complex(&k, FacetSet::from_indices([0]));
        assert!(!c.is_empty());
        assert!(reduced_betti(&c).betti().iter().all(|&b| b == 0));
    }

    #[test]
    fn nerve_and_order_complex_agree_on_plane_subsets() {
        let k = facet_complex(&p2());
        for bits in 0u64..8 {
            let j = FacetSet::from_bits(bits);
            let via_nerve = reduced_betti(&nerve(&k, j));
            let via_order = reduced_betti(&order_complex(&k, j));
            assert_eq!(via_nerve.padded(3), via_order.padded(3), "J = {:?}", j.indices());
            assert_eq!(via_nerve.is_empty_complex(), via_order.is_empty_complex());
        }
    }

    #[test]
    fn nerve_monotone_in_j() {
        let k = facet_complex(&p2());
        for small in 0u64..8 {
            for big in 0u64..8 {
                if small & !big != 0 {
                    continue;
                }
                let a = nerve(&k, FacetSet::from_bits(small));
                let b = nerve(&k, FacetSet::from_bits(big));
                for d in 0..=a.dim().map_or(0, |x| x) {
                    for s in a.simplices(d) {
                        assert!(b.simplices(d).contains(s));
                    }
                }
            }
        }
    }

    #[test]
    fn empty_facet_set_means_polytope_membership() {
        use crate::fan::polytope_lattice_points;
        let fan = p2();
        for d in [vec![0, 0, 2], vec![-1, 2, 1], vec![-2, 0, 0]] {
            let d = TorusDivisor::new(d);
            let points = polytope_lattice_points(&fan, &d).unwrap();
            for m1 in -4..=4 {
                for m2 in -4..=4 {
                    let j = facet_set(&fan, &d, &[m1, m2]).unwrap();
                    assert_eq!(j.is_empty(), points.contains(&vec![m1, m2]));
                }
            }
        }
    }

    #[test]
    fn facet_set_bitmask_round_trip() {
        let j = FacetSet::from_indices([0, 2, 5]);
        assert_eq!(j.indices(), vec![0, 2, 5]);
        assert_eq!(j.len(), 3);
        assert!(j.contains(2) && !j.contains(1));
        assert_eq!(j.complement(6), FacetSet::from_indices([1, 3, 4]));
        let json = serde_json::to_string(&j).unwrap();
        assert_eq!(json, "[0,2,5]");
        assert_eq!(serde_json::from_str::<FacetSet>(&json).unwrap(), j);
    }
}

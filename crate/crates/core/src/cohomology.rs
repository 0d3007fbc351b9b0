//! Reduced simplicial cohomology over the rationals and the per-weight
//! cohomology of line bundles.
//!
//! For a weight `m`, the facet set `J` determines everything: `h^0` is 1
//! exactly when `J` is empty, and `h^p` for `p >= 1` is the reduced Betti
//! number `b_{p-1}` of the union `Z` of the facets in `J`. Three independent
//! routes compute those numbers: the nerve of the closed facet cover, its
//! barycentric subdivision (order complex), and a Čech complex over the
//! cover of the variety by maximal-cone charts. All ranks are exact.

use crate::error::{Error, Result};
use crate::exactlin;
use crate::fan::{Fan, TorusDivisor};
use crate::strata::{facet_set, nerve, order_complex, FacetComplex, FacetSet};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::sync::{OnceLock, RwLock};

/// An abstract simplicial complex with simplices grouped by dimension.
/// Vertex lists are ascending; listing maximal simplices is enough, the
/// downward closure is generated on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Vec<u32>>>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self { by_dim: Vec::new() }
    }

    pub fn from_maximal<I: IntoIterator<Item = Vec<u32>>>(maximal: I) -> Self {
        let mut closure: BTreeSet<Vec<u32>> = BTreeSet::new();
        for simplex in maximal {
            let mut verts: Vec<u32> = simplex;
            verts.sort_unstable();
            verts.dedup();
            assert!(verts.len() <= 32, "simplex too large");
            let full: u32 = if verts.len() == 32 { u32::MAX } else { (1u32 << verts.len()) - 1 };
            let mut sub = full;
            while sub != 0 {
                let face: Vec<u32> =
                    (0..verts.len()).filter(|&i| sub & (1 << i) != 0).map(|i| verts[i]).collect();
                closure.insert(face);
                sub = (sub - 1) & full;
            }
        }
        let max_dim = closure.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut by_dim = vec![Vec::new(); max_dim];
        for s in closure {
            let d = s.len() - 1;
            by_dim[d].push(s);
        }
        for level in &mut by_dim {
            level.sort_unstable();
        }
        Self { by_dim }
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    /// Dimension of the complex, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn simplex_count(&self, d: usize) -> usize {
        self.by_dim.get(d).map_or(0, Vec::len)
    }

    pub fn simplices(&self, d: usize) -> &[Vec<u32>] {
        self.by_dim.get(d).map_or(&[], Vec::as_slice)
    }

    /// Euler characteristic (unreduced): alternating sum of face counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(d, faces)| {
                let c = faces.len() as i64;
                if d % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    /// Coboundary matrix from d-simplices to (d+1)-simplices. Entries are the
    /// usual position-parity signs; vertex lists are ascending.
    fn coboundary(&self, d: usize) -> (usize, usize, Vec<i64>) {
        let cols = self.simplex_count(d);
        let rows = self.simplex_count(d + 1);
        let mut data = vec![0i64; rows * cols];
        if rows == 0 || cols == 0 {
            return (rows, cols, data);
        }
        let lower = &self.by_dim[d];
        for (r, tau) in self.by_dim[d + 1].iter().enumerate() {
            for omit in 0..tau.len() {
                let face: Vec<u32> = tau
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != omit)
                    .map(|(_, &v)| v)
                    .collect();
                let c = lower.binary_search(&face).expect("closure contains every face");
                data[r * cols + c] = if omit % 2 == 0 { 1 } else { -1 };
            }
        }
        (rows, cols, data)
    }
}

/// Reduced Betti numbers of a complex; `empty` records the empty complex,
/// whose reduced cohomology is trivial in every degree here.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    empty: bool,
    betti: Vec<u64>,
}

impl BettiVector {
    pub fn empty_complex() -> Self {
        Self { empty: true, betti: Vec::new() }
    }

    pub fn is_empty_complex(&self) -> bool {
        self.empty
    }

    pub fn betti(&self) -> &[u64] {
        &self.betti
    }

    pub fn get(&self, p: usize) -> u64 {
        self.betti.get(p).copied().unwrap_or(0)
    }

    /// Betti numbers padded (or checked-truncated) to a fixed length.
    pub fn padded(&self, len: usize) -> Vec<u64> {
        let mut v = self.betti.clone();
        assert!(v.iter().skip(len).all(|&b| b == 0), "nonzero Betti number beyond padding");
        v.resize(len, 0);
        v.truncate(len);
        v
    }
}

/// Reduced Betti numbers over the rationals via the augmented cochain
/// complex; exact integer elimination throughout.
pub fn reduced_betti(c: &SimplicialComplex) -> BettiVector {
    if c.is_empty() {
        return BettiVector::empty_complex();
    }
    let top = c.dim().expect("nonempty");
    // rank of the augmentation map C^{-1} -> C^0 (all-ones) is 1.
    let mut rank_below = 1usize;
    let mut betti = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let (rows, cols, data) = c.coboundary(d);
        let rank_d = if rows == 0 || cols == 0 { 0 } else { exactlin::rank_i64(rows, cols, &data) };
        let n_d = c.simplex_count(d);
        betti.push((n_d - rank_d - rank_below) as u64);
        rank_below = rank_d;
    }
    BettiVector { empty: false, betti }
}

/// Cohomology of one weight space: the weight, its facet set and the
/// dimension vector `h^0..h^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightCohomology {
    pub weight: Vec<i64>,
    pub facets: FacetSet,
    pub h: Vec<u64>,
}

impl WeightCohomology {
    pub fn is_zero(&self) -> bool {
        self.h.iter().all(|&x| x == 0)
    }
}

/// Per-facet-set cache: dense array of `OnceLock` slots when the ray count
/// is small, hash map behind a lock otherwise.
enum HCache {
    Dense(Box<[OnceLock<Box<[u64]>>]>),
    Sparse(RwLock<HashMap<u64, Box<[u64]>>>),
}

const DENSE_CACHE_RAYS: usize = 16;

impl HCache {
    fn new(ray_count: usize) -> Self {
        if ray_count <= DENSE_CACHE_RAYS {
            let slots = (0..1usize << ray_count).map(|_| OnceLock::new()).collect();
            HCache::Dense(slots)
        } else {
            HCache::Sparse(RwLock::new(HashMap::new()))
        }
    }

    fn with<R>(
        &self,
        key: u64,
        compute: impl FnOnce() -> Result<Box<[u64]>>,
        read: impl FnOnce(&[u64]) -> R,
    ) -> Result<R> {
        match self {
            HCache::Dense(slots) => {
                let slot = &slots[key as usize];
                if let Some(v) = slot.get() {
                    return Ok(read(v));
                }
                let value = compute()?;
                Ok(read(slot.get_or_init(|| value)))
            }
            HCache::Sparse(map) => {
                if let Some(v) = map.read().expect("cache lock").get(&key) {
                    return Ok(read(v));
                }
                let value = compute()?;
                let mut guard = map.write().expect("cache lock");
                let entry = guard.entry(key).or_insert(value);
                Ok(read(entry))
            }
        }
    }
}

/// Čech oracles need the subset lattice of the maximal-cone cover.
const CECH_MAX_CONES: usize = 16;

/// Cohomology engine for a fixed fan: holds the facet complex and memoizes
/// per-facet-set dimension vectors for all three computation routes.
///
/// All methods take `&self`; caches are synchronized, so one engine can be
/// shared across threads for data-parallel weight scans.
pub struct CohomologyEngine<'f> {
    fan: &'f Fan,
    complex: FacetComplex,
    /// Common rays of every subset of maximal cones (index = subset mask),
    /// present when the cone count permits the Čech oracle.
    subset_common: Option<Vec<u64>>,
    nerve_cache: HCache,
    order_cache: HCache,
    cech_cache: HCache,
}

impl<'f> CohomologyEngine<'f> {
    pub fn new(fan: &'f Fan) -> Self {
        let complex = crate::strata::facet_complex(fan);
        let k = fan.max_cones().len();
        let subset_common = (k <= CECH_MAX_CONES).then(|| {
            let masks: Vec<u64> = fan
                .max_cones()
                .iter()
                .map(|cone| cone.iter().fold(0u64, |m, &i| m | (1 << i)))
                .collect();
            let mut common = vec![0u64; 1 << k];
            for s in 1usize..1 << k {
                let low = s.trailing_zeros() as usize;
                let rest = s & (s - 1);
                common[s] = if rest == 0 { masks[low] } else { common[rest] & masks[low] };
            }
            common
        });
        let r = fan.ray_count();
        Self {
            fan,
            complex,
            subset_common,
            nerve_cache: HCache::new(r),
            order_cache: HCache::new(r),
            cech_cache: HCache::new(r),
        }
    }

    pub fn fan(&self) -> &Fan {
        self.fan
    }

    pub fn facet_complex(&self) -> &FacetComplex {
        &self.complex
    }

    fn h_len(&self) -> usize {
        self.fan.dim() + 1
    }

    fn nerve_h(&self, j: FacetSet) -> Result<Box<[u64]>> {
        let betti = reduced_betti(&nerve(&self.complex, j));
        let mut h = vec![0u64; self.h_len()];
        h[0] = u64::from(j.is_empty());
        for p in 1..self.h_len() {
            h[p] = betti.get(p - 1);
        }
        if betti.betti().len() + 1 > self.h_len() {
            for p in self.h_len()..=betti.betti().len() {
                if betti.get(p - 1) != 0 {
                    return Err(Error::OracleMismatch(format!(
                        "nerve cohomology above the fan dimension for J = {:?}",
                        j.indices()
                    )));
                }
            }
        }
        Ok(h.into_boxed_slice())
    }

    fn order_h(&self, j: FacetSet) -> Result<Box<[u64]>> {
        let betti = reduced_betti(&order_complex(&self.complex, j));
        let mut h = vec![0u64; self.h_len()];
        h[0] = u64::from(j.is_empty());
        for p in 1..self.h_len() {
            h[p] = betti.get(p - 1);
        }
        Ok(h.into_boxed_slice())
    }

    fn cech_h(&self, j: FacetSet) -> Result<Box<[u64]>> {
        let Some(common) = &self.subset_common else {
            return Err(Error::Input(format!(
                "Čech oracle supports at most {CECH_MAX_CONES} maximal cones, fan has {}",
                self.fan.max_cones().len()
            )));
        };
        let k = self.fan.max_cones().len();
        // A cover subset is active when no common ray of its cones lies in J:
        // exactly then the corresponding chart section survives in weight m.
        let active = |s: usize| common[s] & j.bits() == 0;

        let mut subsets_by_size: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
        for s in 1usize..1 << k {
            if active(s) {
                subsets_by_size[s.count_ones() as usize].push(s);
            }
        }

        let mut counts = vec![0usize; k];
        for p in 0..k {
            counts[p] = subsets_by_size[p + 1].len();
        }
        // ranks[p] = rank of the differential C^p -> C^{p+1}.
        let mut ranks = vec![0usize; k];
        let mut prev_index: HashMap<usize, usize> = HashMap::new();
        for (idx, &s) in subsets_by_size[1].iter().enumerate() {
            prev_index.insert(s, idx);
        }
        for p in 1..k {
            let rows = &subsets_by_size[p + 1];
            let cols = counts[p - 1];
            if rows.is_empty() || cols == 0 {
                prev_index = rows.iter().enumerate().map(|(i, &s)| (s, i)).collect();
                continue;
            }
            let mut data = vec![0i64; rows.len() * cols];
            for (r, &t) in rows.iter().enumerate() {
                let mut rest = t;
                let mut omit = 0usize;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    let s = t & !bit;
                    if let Some(&c) = prev_index.get(&s) {
                        data[r * cols + c] = if omit % 2 == 0 { 1 } else { -1 };
                    }
                    rest &= rest - 1;
                    omit += 1;
                }
            }
            ranks[p - 1] = exactlin::rank_i64(rows.len(), cols, &data);
            prev_index = rows.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        }

        let mut h = vec![0u64; k.max(self.h_len())];
        for p in 0..k {
            let below = if p == 0 { 0 } else { ranks[p - 1] };
            h[p] = (counts[p] - ranks[p] - below) as u64;
        }
        for (p, &v) in h.iter().enumerate().skip(self.h_len()) {
            if v != 0 {
                return Err(Error::OracleMismatch(format!(
                    "Čech cohomology h^{p} = {v} above the fan dimension for J = {:?}",
                    j.indices()
                )));
            }
        }
        h.truncate(self.h_len());
        Ok(h.into_boxed_slice())
    }

    /// Dimension vector for a facet set via the nerve route (the primary
    /// computation), from cache.
    pub fn h_for_facet_set(&self, j: FacetSet) -> Result<Vec<u64>> {
        self.nerve_cache.with(j.bits(), || self.nerve_h(j), <[u64]>::to_vec)
    }

    pub fn h_for_facet_set_order(&self, j: FacetSet) -> Result<Vec<u64>> {
        self.order_cache.with(j.bits(), || self.order_h(j), <[u64]>::to_vec)
    }

    pub fn h_for_facet_set_cech(&self, j: FacetSet) -> Result<Vec<u64>> {
        self.cech_cache.with(j.bits(), || self.cech_h(j), <[u64]>::to_vec)
    }

    /// Reduced Betti data of `Z` for a facet set (nerve route).
    pub fn betti_for_facet_set(&self, j: FacetSet) -> Result<BettiVector> {
        if j.is_empty() {
            return Ok(BettiVector::empty_complex());
        }
        let n = self.fan.dim();
        let h = self.h_for_facet_set(j)?;
        Ok(BettiVector { empty: false, betti: h[1..=n.min(h.len() - 1)].to_vec() })
    }

    /// Adds the dimension vector for `j` into `totals`; returns whether any
    /// entry was nonzero. Reads the cache without cloning.
    pub(crate) fn accumulate(&self, j: FacetSet, totals: &mut [u64]) -> Result<bool> {
        self.nerve_cache.with(j.bits(), || self.nerve_h(j), |h| {
            let mut any = false;
            for (t, &v) in totals.iter_mut().zip(h) {
                *t += v;
                any |= v != 0;
            }
            any
        })
    }

    fn assemble(&self, d: &TorusDivisor, m: &[i64], h: Vec<u64>, j: FacetSet) -> WeightCohomology {
        let _ = d;
        WeightCohomology { weight: m.to_vec(), facets: j, h }
    }

    /// Per-weight cohomology via the nerve of the facet cover.
    pub fn weight_cohomology(&self, d: &TorusDivisor, m: &[i64]) -> Result<WeightCohomology> {
        let j = facet_set(self.fan, d, m)?;
        Ok(self.assemble(d, m, self.h_for_facet_set(j)?, j))
    }

    /// Per-weight cohomology via the barycentric (order complex) oracle.
    pub fn order_weight_cohomology(&self, d: &TorusDivisor, m: &[i64]) -> Result<WeightCohomology> {
        let j = facet_set(self.fan, d, m)?;
        Ok(self.assemble(d, m, self.h_for_facet_set_order(j)?, j))
    }

    /// Per-weight cohomology via the Čech complex over the maximal-cone
    /// cover; fully independent ranks, including `h^0`.
    pub fn cech_weight_cohomology(&self, d: &TorusDivisor, m: &[i64]) -> Result<WeightCohomology> {
        let j = facet_set(self.fan, d, m)?;
        Ok(self.assemble(d, m, self.h_for_facet_set_cech(j)?, j))
    }
}

/// Per-weight cohomology of `O(D)` in weight `m`, from the facet set and
/// the nerve Betti numbers. Rejects non-Cartier divisors.
pub fn weight_cohomology(fan: &Fan, d: &TorusDivisor, m: &[i64]) -> Result<WeightCohomology> {
    crate::fan::require_cartier(fan, d)?;
    CohomologyEngine::new(fan).weight_cohomology(d, m)
}

/// Independent Čech computation of the same weight space.
pub fn cech_weight_cohomology(fan: &Fan, d: &TorusDivisor, m: &[i64]) -> Result<WeightCohomology> {
    crate::fan::require_cartier(fan, d)?;
    CohomologyEngine::new(fan).cech_weight_cohomology(d, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::canonical_divisor;

    fn p1() -> Fan {
        Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap()
    }

    fn p2() -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        )
        .unwrap()
    }

    #[test]
    fn betti_of_small_complexes() {
        // Two isolated vertices: one extra component.
        let two = SimplicialComplex::from_maximal([vec![0], vec![1]]);
        assert_eq!(reduced_betti(&two).betti(), &[1]);

        // Triangle boundary: a circle.
        let circle = SimplicialComplex::from_maximal([vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert_eq!(reduced_betti(&circle).betti(), &[0, 1]);

        // Solid triangle: contractible.
        let disk = SimplicialComplex::from_maximal([vec![0, 1, 2]]);
        assert_eq!(reduced_betti(&disk).betti(), &[0, 0, 0]);

        // Boundary of the tetrahedron: a 2-sphere.
        let sphere = SimplicialComplex::from_maximal([
            vec![0, 1, 2],
            vec![0, 1, 3],
            vec![0, 2, 3],
            vec![1, 2, 3],
        ]);
        assert_eq!(reduced_betti(&sphere).betti(), &[0, 0, 1]);

        // Empty complex.
        assert!(reduced_betti(&SimplicialComplex::empty()).is_empty_complex());
    }

    #[test]
    fn betti_of_torus_triangulation() {
        // The 7-vertex triangulation of the 2-torus: triangles
        // (i, i+1, i+3) and (i, i+2, i+3) mod 7.
        let torus = (0u32..7).flat_map(|i| {
            [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]]
        });
        let c = SimplicialComplex::from_maximal(torus);
        assert_eq!(c.simplex_count(0), 7);
        assert_eq!(c.simplex_count(1), 21);
        assert_eq!(c.simplex_count(2), 14);
        assert_eq!(c.euler_characteristic(), 0);
        assert_eq!(reduced_betti(&c).betti(), &[0, 2, 1]);
    }

    #[test]
    fn betti_of_projective_plane_vanishes_rationally() {
        // Minimal 6-vertex triangulation of RP^2 (antipodal icosahedron).
        // Its homology is pure 2-torsion, so over the rationals every
        // reduced Betti number vanishes.
        let rp2 = [
            [0, 1, 3],
            [0, 1, 4],
            [0, 2, 3],
            [0, 2, 5],
            [0, 4, 5],
            [1, 2, 4],
            [1, 2, 5],
            [1, 3, 5],
            [2, 3, 4],
            [3, 4, 5],
        ];
        let c = SimplicialComplex::from_maximal(rp2.iter().map(|t| t.to_vec()));
        // Closed surface sanity: every edge lies in exactly two triangles.
        let mut edge_count: HashMap<Vec<u32>, usize> = HashMap::new();
        for t in c.simplices(2) {
            for omit in 0..3 {
                let e: Vec<u32> =
                    t.iter().enumerate().filter(|&(k, _)| k != omit).map(|(_, &v)| v).collect();
                *edge_count.entry(e).or_default() += 1;
            }
        }
        assert!(edge_count.values().all(|&c| c == 2));
        assert_eq!(c.euler_characteristic(), 1);
        assert_eq!(reduced_betti(&c).betti(), &[0, 0, 0]);
    }

    #[test]
    fn weight_cohomology_on_p1() {
        let fan = p1();
        let d = TorusDivisor::new(vec![-1, -1]);
        let wc = weight_cohomology(&fan, &d, &[0]).unwrap();
        assert_eq!(wc.h, vec![0, 1]);
        let cech = cech_weight_cohomology(&fan, &d, &[0]).unwrap();
        assert_eq!(cech.h, vec![0, 1]);
        // Weights outside the relevant window contribute nothing.
        for m in [-3, -2, 1, 2, 3] {
            assert!(weight_cohomology(&fan, &d, &[m]).unwrap().is_zero());
        }
    }

    #[test]
    fn weight_cohomology_on_p2() {
        let fan = p2();
        let d = TorusDivisor::new(vec![0, 0, 1]);
        let wc = weight_cohomology(&fan, &d, &[0, 0]).unwrap();
        assert_eq!(wc.h, vec![1, 0, 0]);
        assert!(wc.facets.is_empty());
        let cech = cech_weight_cohomology(&fan, &d, &[0, 0]).unwrap();
        assert_eq!(cech.h, vec![1, 0, 0]);

        // Canonical divisor at the origin weight: every facet enters J and
        // the nerve is a circle, so all cohomology sits in top degree.
        let k = canonical_divisor(&fan);
        let wc = weight_cohomology(&fan, &k, &[0, 0]).unwrap();
        assert_eq!(wc.facets, FacetSet::full(3));
        assert_eq!(wc.h, vec![0, 0, 1]);
        let cech = cech_weight_cohomology(&fan, &k, &[0, 0]).unwrap();
        assert_eq!(cech.h, vec![0, 0, 1]);
        // One facet short of the full set: contractible, no cohomology.
        assert!(weight_cohomology(&fan, &k, &[-1, -1]).unwrap().is_zero());
    }

    #[test]
    fn three_routes_agree_on_plane() {
        let fan = p2();
        let engine = CohomologyEngine::new(&fan);
        for bits in 0u64..8 {
            let j = FacetSet::from_bits(bits);
            let nerve_h = engine.h_for_facet_set(j).unwrap();
            let order_h = engine.h_for_facet_set_order(j).unwrap();
            let cech_h = engine.h_for_facet_set_cech(j).unwrap();
            assert_eq!(nerve_h, order_h, "J = {:?}", j.indices());
            assert_eq!(nerve_h, cech_h, "J = {:?}", j.indices());
        }
    }

    #[test]
    fn euler_characteristic_consistency() {
        // Alternating sum of h equals 1 when J is empty, else 1 - chi(Z).
        let fan = p2();
        let engine = CohomologyEngine::new(&fan);
        let complex = engine.facet_complex();
        for bits in 0u64..8 {
            let j = FacetSet::from_bits(bits);
            let h = engine.h_for_facet_set(j).unwrap();
            let signed: i64 = h
                .iter()
                .enumerate()
                .map(|(p, &v)| if p % 2 == 0 { v as i64 } else { -(v as i64) })
                .sum();
            let expected = if j.is_empty() {
                1
            } else {
                1 - nerve(complex, j).euler_characteristic()
            };
            assert_eq!(signed, expected, "J = {:?}", j.indices());
        }
    }

    #[test]
    fn rejects_non_cartier() {
        let quadric = Fan::new(
            2,
            vec![vec![1, 0], vec![1, 2], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .unwrap();
        let d = TorusDivisor::new(vec![1, 0, 0, 0]);
        assert!(matches!(
            weight_cohomology(&quadric, &d, &[0, 0]),
            Err(Error::NotCartier { .. })
        ));
    }
}

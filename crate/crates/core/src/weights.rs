//! Weight enumeration and aggregation: the total cohomology of `O(D)` as a
//! finite sum of weight-space dimensions.
//!
//! The enumeration region is a box around all vertices of the hyperplane
//! arrangement `{ <m, e_i> = -d_i }`, expanded by one and certified by
//! checking that every lattice point on the box boundary carries no
//! cohomology. A failed certificate doubles the box (up to three times)
//! before giving up, and the doubling-stability of every total is part of
//! the test suite.

use crate::cohomology::{BettiVector, CohomologyEngine, WeightCohomology};
use crate::error::{Error, Result};
use crate::fan::{self, Fan, TorusDivisor};
use crate::strata::{facet_set, FacetSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Componentwise integer bounds for a weight scan (both ends inclusive).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl WeightBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b), "box must be nonempty");
        Self { lo, hi }
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        m.len() == self.dim()
            && m.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&x, (&l, &h))| l <= x && x <= h)
    }

    pub fn point_count(&self) -> u128 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| (h - l + 1) as u128)
            .product()
    }

    /// The box grown by half its width on every side.
    pub fn doubled(&self) -> WeightBox {
        let lo = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| l - ((h - l + 1) / 2).max(1))
            .collect();
        let hi = self
            .hi
            .iter()
            .zip(&self.lo)
            .map(|(&h, &l)| h + ((h - l + 1) / 2).max(1))
            .collect();
        WeightBox::new(lo, hi)
    }

    /// Visit every lattice point in lexicographic order.
    fn for_each_point(&self, mut f: impl FnMut(&[i64]) -> Result<()>) -> Result<()> {
        let n = self.dim();
        let mut m = self.lo.clone();
        'scan: loop {
            f(&m)?;
            for k in (0..n).rev() {
                m[k] += 1;
                if m[k] <= self.hi[k] {
                    continue 'scan;
                }
                m[k] = self.lo[k];
                if k == 0 {
                    break 'scan;
                }
            }
            if n == 0 {
                break;
            }
        }
        Ok(())
    }

    /// Visit every boundary lattice point exactly once.
    fn for_each_boundary_point(&self, mut f: impl FnMut(&[i64]) -> Result<()>) -> Result<()> {
        let n = self.dim();
        let mut m = vec![0i64; n];
        // Points are classified by the first coordinate sitting on a face.
        fn rec(
            b: &WeightBox,
            k: usize,
            face_at: usize,
            m: &mut Vec<i64>,
            f: &mut impl FnMut(&[i64]) -> Result<()>,
        ) -> Result<()> {
            if k == b.dim() {
                return f(m);
            }
            if k < face_at {
                // Strict interior before the face coordinate.
                for v in b.lo[k] + 1..b.hi[k] {
                    m[k] = v;
                    rec(b, k + 1, face_at, m, f)?;
                }
            } else if k == face_at {
                m[k] = b.lo[k];
                rec(b, k + 1, face_at, m, f)?;
                if b.hi[k] != b.lo[k] {
                    m[k] = b.hi[k];
                    rec(b, k + 1, face_at, m, f)?;
                }
            } else {
                for v in b.lo[k]..=b.hi[k] {
                    m[k] = v;
                    rec(b, k + 1, face_at, m, f)?;
                }
            }
            Ok(())
        }
        for face_at in 0..n {
            rec(self, 0, face_at, &mut m, &mut f)?;
        }
        Ok(())
    }
}

/// Totals and contributing weights of `H^*(X, O(D))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyTable {
    /// `h^0..h^n` summed over all weights.
    pub totals: Vec<u64>,
    /// The verified enumeration box.
    pub weight_box: WeightBox,
    /// Weights with nonzero cohomology, lexicographically sorted.
    pub weights: Vec<WeightCohomology>,
}

/// One row of the facet-set classification of a weight box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetClassRow {
    pub facets: FacetSet,
    pub count: u64,
    pub betti: BettiVector,
}

const MAX_DOUBLINGS: usize = 3;

fn initial_box(fan: &Fan, d: &TorusDivisor) -> Result<WeightBox> {
    let n = fan.dim();
    let vertices = fan::arrangement_vertices(fan, d)?;
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for v in &vertices {
        for k in 0..n {
            let f = i64::try_from(&v[k].floor().to_integer()).map_err(|_| Error::Overflow)?;
            let c = i64::try_from(&v[k].ceil().to_integer()).map_err(|_| Error::Overflow)?;
            lo[k] = lo[k].min(f);
            hi[k] = hi[k].max(c);
        }
    }
    if vertices.is_empty() {
        lo = vec![0; n];
        hi = vec![0; n];
    }
    let lo = lo.iter().map(|&l| l.checked_sub(1).ok_or(Error::Overflow)).collect::<Result<_>>()?;
    let hi = hi.iter().map(|&h| h.checked_add(1).ok_or(Error::Overflow)).collect::<Result<_>>()?;
    Ok(WeightBox::new(lo, hi))
}

fn boundary_acyclic(engine: &CohomologyEngine, d: &TorusDivisor, b: &WeightBox) -> Result<bool> {
    let mut ok = true;
    b.for_each_boundary_point(|m| {
        if !ok {
            return Ok(());
        }
        let j = facet_set(engine.fan(), d, m)?;
        let mut probe = vec![0u64; engine.fan().dim() + 1];
        if engine.accumulate(j, &mut probe)? {
            ok = false;
        }
        Ok(())
    })?;
    Ok(ok)
}

/// Enumeration box for the weights of `D`: vertex hull of the pairing
/// arrangement expanded by one, then certified acyclic on its boundary
/// (doubling on failure, up to three times).
pub fn weight_box_with(engine: &CohomologyEngine, d: &TorusDivisor) -> Result<WeightBox> {
    let mut b = initial_box(engine.fan(), d)?;
    for _ in 0..=MAX_DOUBLINGS {
        if boundary_acyclic(engine, d, &b)? {
            return Ok(b);
        }
        b = b.doubled();
    }
    Err(Error::BoxVerification { doublings: MAX_DOUBLINGS })
}

/// See [`weight_box_with`]; builds a transient engine.
pub fn weight_box(fan: &Fan, d: &TorusDivisor) -> Result<WeightBox> {
    weight_box_with(&CohomologyEngine::new(fan), d)
}

/// Parallelism threshold: boxes below this are scanned serially.
const PARALLEL_MIN_POINTS: u128 = 1 << 12;

fn scan_slab(
    engine: &CohomologyEngine,
    d: &TorusDivisor,
    slab: &WeightBox,
) -> Result<(Vec<u64>, Vec<WeightCohomology>)> {
    let n = engine.fan().dim();
    let mut totals = vec![0u64; n + 1];
    let mut weights = Vec::new();
    slab.for_each_point(|m| {
        let j = facet_set(engine.fan(), d, m)?;
        if engine.accumulate(j, &mut totals)? {
            let h = engine.h_for_facet_set(j)?;
            weights.push(WeightCohomology { weight: m.to_vec(), facets: j, h });
        }
        Ok(())
    })?;
    Ok((totals, weights))
}

/// Scan an explicit box, without boundary certification. Used for the
/// doubling-stability checks; ordinary callers want [`total_cohomology`].
pub fn total_cohomology_in(
    engine: &CohomologyEngine,
    d: &TorusDivisor,
    b: &WeightBox,
) -> Result<CohomologyTable> {
    fan::require_cartier(engine.fan(), d)?;
    let n = engine.fan().dim();
    let slabs: Vec<WeightBox> = if b.point_count() >= PARALLEL_MIN_POINTS && n > 0 {
        (b.lo[0]..=b.hi[0])
            .map(|x0| {
                let mut lo = b.lo.clone();
                let mut hi = b.hi.clone();
                lo[0] = x0;
                hi[0] = x0;
                WeightBox::new(lo, hi)
            })
            .collect()
    } else {
        vec![b.clone()]
    };
    let parts: Result<Vec<_>> =
        slabs.par_iter().map(|slab| scan_slab(engine, d, slab)).collect();
    let mut totals = vec![0u64; n + 1];
    let mut weights = Vec::new();
    for (t, w) in parts? {
        for (acc, v) in totals.iter_mut().zip(&t) {
            *acc += v;
        }
        weights.extend(w);
    }
    // Slabs arrive in first-coordinate order and are lex-sorted internally,
    // but keep the contract explicit.
    weights.sort_by(|a, b| a.weight.cmp(&b.weight));
    Ok(CohomologyTable { totals, weight_box: b.clone(), weights })
}

/// Total cohomology `h^0..h^n` of `O(D)`, with the contributing weights.
pub fn total_cohomology_with(engine: &CohomologyEngine, d: &TorusDivisor) -> Result<CohomologyTable> {
    fan::require_cartier(engine.fan(), d)?;
    let b = weight_box_with(engine, d)?;
    total_cohomology_in(engine, d, &b)
}

/// See [`total_cohomology_with`]; builds a transient engine.
pub fn total_cohomology(fan: &Fan, d: &TorusDivisor) -> Result<CohomologyTable> {
    total_cohomology_with(&CohomologyEngine::new(fan), d)
}

/// Group the box weights of `D` by facet set; every class reports its weight
/// count (including acyclic classes) and the Betti data of `Z`.
pub fn classify_weights_with(
    engine: &CohomologyEngine,
    d: &TorusDivisor,
) -> Result<Vec<FacetClassRow>> {
    fan::require_cartier(engine.fan(), d)?;
    let b = weight_box_with(engine, d)?;
    let mut counts: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
    b.for_each_point(|m| {
        let j = facet_set(engine.fan(), d, m)?;
        *counts.entry(j.bits()).or_default() += 1;
        Ok(())
    })?;
    counts
        .into_iter()
        .map(|(bits, count)| {
            let facets = FacetSet::from_bits(bits);
            Ok(FacetClassRow { facets, count, betti: engine.betti_for_facet_set(facets)? })
        })
        .collect()
}

/// See [`classify_weights_with`]; builds a transient engine.
pub fn classify_weights(fan: &Fan, d: &TorusDivisor) -> Result<Vec<FacetClassRow>> {
    classify_weights_with(&CohomologyEngine::new(fan), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{canonical_divisor, is_ample, polytope_lattice_points};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

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
    fn box_for_negative_bundle_on_line() {
        let fan = p1();
        let d = TorusDivisor::new(vec![-1, -1]);
        let b = weight_box(&fan, &d).unwrap();
        // Arrangement vertices at -1 and 1, margin one on each side.
        assert_eq!(b.lo(), &[-2]);
        assert_eq!(b.hi(), &[2]);
    }

    #[test]
    fn totals_on_p1() {
        let fan = p1();
        let t = total_cohomology(&fan, &TorusDivisor::new(vec![-1, -1])).unwrap();
        assert_eq!(t.totals, vec![0, 1]);
        assert_eq!(t.weights.len(), 1);
        assert_eq!(t.weights[0].weight, vec![0]);

        let t = total_cohomology(&fan, &TorusDivisor::new(vec![3, 0])).unwrap();
        assert_eq!(t.totals, vec![4, 0]);
    }

    #[test]
    fn totals_on_p2() {
        let fan = p2();
        // O(2): six sections, nothing higher.
        let t = total_cohomology(&fan, &TorusDivisor::new(vec![0, 0, 2])).unwrap();
        assert_eq!(t.totals, vec![6, 0, 0]);
        // O(-3) = K: one class in top degree.
        let t = total_cohomology(&fan, &canonical_divisor(&fan)).unwrap();
        assert_eq!(t.totals, vec![0, 0, 1]);
        // The trivial bundle.
        let t = total_cohomology(&fan, &TorusDivisor::zero(3)).unwrap();
        assert_eq!(t.totals, vec![1, 0, 0]);
        assert_eq!(t.weights.len(), 1);
        assert_eq!(t.weights[0].weight, vec![0, 0]);
    }

    #[test]
    fn doubling_keeps_totals() {
        let fan = p2();
        let engine = CohomologyEngine::new(&fan);
        let mut rng = StdRng::seed_from_u64(61);
        for _ in 0..25 {
            let d = TorusDivisor::new((0..3).map(|_| rng.random_range(-3..=3)).collect());
            let b = weight_box_with(&engine, &d).unwrap();
            let normal = total_cohomology_in(&engine, &d, &b).unwrap();
            let doubled = total_cohomology_in(&engine, &d, &b.doubled()).unwrap();
            assert_eq!(normal.totals, doubled.totals, "divisor {:?}", d.coeffs());
            assert_eq!(normal.weights, doubled.weights);
        }
    }

    #[test]
    fn h0_equals_lattice_point_count() {
        let fan = p2();
        let engine = CohomologyEngine::new(&fan);
        let mut rng = StdRng::seed_from_u64(67);
        for _ in 0..40 {
            let d = TorusDivisor::new((0..3).map(|_| rng.random_range(-3..=3)).collect());
            let t = total_cohomology_with(&engine, &d).unwrap();
            let pts = polytope_lattice_points(&fan, &d).unwrap();
            assert_eq!(t.totals[0] as usize, pts.len(), "divisor {:?}", d.coeffs());
        }
    }

    #[test]
    fn ample_vanishing_on_p2() {
        let fan = p2();
        let engine = CohomologyEngine::new(&fan);
        let mut rng = StdRng::seed_from_u64(71);
        let mut ample_seen = 0;
        for _ in 0..60 {
            let d = TorusDivisor::new((0..3).map(|_| rng.random_range(-2..=3)).collect());
            if !is_ample(&fan, &d).unwrap() {
                continue;
            }
            ample_seen += 1;
            let t = total_cohomology_with(&engine, &d).unwrap();
            assert!(t.totals[1..].iter().all(|&x| x == 0));
            assert!(t.totals[0] > 0);
        }
        assert!(ample_seen > 3);
    }

    #[test]
    fn classification_partitions_the_box() {
        let fan = p1();
        // O(-2) supported on one ray: classes {0}, {1}, {0,1} partition the
        // box; the two-facet class carries the h^1.
        let d = TorusDivisor::new(vec![-2, 0]);
        let rows = classify_weights(&fan, &d).unwrap();
        let b = weight_box(&fan, &d).unwrap();
        let total: u64 = rows.iter().map(|r| r.count).sum();
        assert_eq!(total as u128, b.point_count());
        let sets: Vec<FacetSet> = rows.iter().map(|r| r.facets).collect();
        assert!(sets.contains(&FacetSet::from_indices([0])));
        assert!(sets.contains(&FacetSet::from_indices([1])));
        assert!(sets.contains(&FacetSet::from_indices([0, 1])));
        assert!(!sets.contains(&FacetSet::empty()));
        let two = rows.iter().find(|r| r.facets.len() == 2).unwrap();
        assert_eq!(two.count, 1);
        assert_eq!(two.betti.get(0), 1);
    }

    #[test]
    fn serre_duality_small_sample() {
        let fan = p2();
        let engine = CohomologyEngine::new(&fan);
        let k = canonical_divisor(&fan);
        let mut rng = StdRng::seed_from_u64(73);
        for _ in 0..20 {
            let d = TorusDivisor::new((0..3).map(|_| rng.random_range(-3..=3)).collect());
            let t = total_cohomology_with(&engine, &d).unwrap();
            let dual = k.checked_sub(&d).unwrap();
            let td = total_cohomology_with(&engine, &dual).unwrap();
            for p in 0..=2 {
                assert_eq!(t.totals[p], td.totals[2 - p], "divisor {:?}", d.coeffs());
            }
        }
    }

    #[test]
    fn table_json_round_trip() {
        let fan = p2();
        let t = total_cohomology(&fan, &TorusDivisor::new(vec![0, 1, 1])).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let back: CohomologyTable = serde_json::from_str(&json).unwrap();
        assert_eq!(t, back);
    }
}

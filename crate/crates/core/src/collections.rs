//! Collections of line bundles: universal bundles of a quiver presentation,
//! the Buchsbaum-Rim extension, Bondal's pushforward collection, and the
//! strong-exceptionality checker built on exact Ext tables.

use crate::cohomology::CohomologyEngine;
use crate::error::{Error, Result};
use crate::fan::{ClassLattice, DivisorClass, Fan, TorusDivisor};
use crate::weights::total_cohomology_with;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverVertex {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<i64>,
}

/// An arrow with resolved vertex indices and its associated ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverArrow {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub ray: usize,
}

#[derive(Serialize, Deserialize)]
struct ArrowData {
    id: String,
    tail: String,
    head: String,
    ray: usize,
}

#[derive(Serialize, Deserialize)]
struct QuiverData {
    vertices: Vec<QuiverVertex>,
    arrows: Vec<ArrowData>,
}

/// A connected quiver whose arrows are matched with fan rays. Vertex weights
/// are carried as metadata only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QuiverData", into = "QuiverData")]
pub struct Quiver {
    vertices: Vec<QuiverVertex>,
    arrows: Vec<QuiverArrow>,
}

impl TryFrom<QuiverData> for Quiver {
    type Error = Error;

    fn try_from(d: QuiverData) -> Result<Quiver> {
        let index: BTreeMap<&str, usize> =
            d.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        if index.len() != d.vertices.len() {
            return Err(Error::Input("duplicate quiver vertex id".into()));
        }
        let arrows = d
            .arrows
            .into_iter()
            .map(|a| {
                let tail = *index
                    .get(a.tail.as_str())
                    .ok_or_else(|| Error::Input(format!("unknown tail vertex {}", a.tail)))?;
                let head = *index
                    .get(a.head.as_str())
                    .ok_or_else(|| Error::Input(format!("unknown head vertex {}", a.head)))?;
                Ok(QuiverArrow { id: a.id, tail, head, ray: a.ray })
            })
            .collect::<Result<Vec<_>>>()?;
        Quiver::new(d.vertices, arrows)
    }
}

impl From<Quiver> for QuiverData {
    fn from(q: Quiver) -> QuiverData {
        let arrows = q
            .arrows
            .iter()
            .map(|a| ArrowData {
                id: a.id.clone(),
                tail: q.vertices[a.tail].id.clone(),
                head: q.vertices[a.head].id.clone(),
                ray: a.ray,
            })
            .collect();
        QuiverData { vertices: q.vertices, arrows }
    }
}

impl Quiver {
    pub fn new(vertices: Vec<QuiverVertex>, arrows: Vec<QuiverArrow>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Input("quiver has no vertices".into()));
        }
        let mut rays = BTreeSet::new();
        for a in &arrows {
            if a.tail >= vertices.len() || a.head >= vertices.len() {
                return Err(Error::Input(format!("arrow {} references a missing vertex", a.id)));
            }
            if !rays.insert(a.ray) {
                return Err(Error::Input(format!("ray {} is used by two arrows", a.ray)));
            }
        }
        let q = Self { vertices, arrows };
        if !q.is_connected() {
            return Err(Error::Input("quiver is not connected".into()));
        }
        Ok(q)
    }

    pub fn vertices(&self) -> &[QuiverVertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[QuiverArrow] {
        &self.arrows
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for a in &self.arrows {
                for (x, y) in [(a.tail, a.head), (a.head, a.tail)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Where a bundle class came from; kept so collections are reproducible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Universal { vertex: String },
    BuchsbaumRim { arrows: Vec<String>, powers: Vec<(String, u32)> },
    Bondal { denominator: u64, numerators: Vec<i64> },
    Input { label: String },
}

impl Provenance {
    pub fn label(&self) -> String {
        match self {
            Provenance::Universal { vertex } => format!("L({vertex})"),
            Provenance::BuchsbaumRim { arrows, powers } => {
                let p: Vec<String> =
                    powers.iter().map(|(v, k)| format!("{v}^{k}")).collect();
                format!("BR[{}|{}]", arrows.join("+"), p.join(","))
            }
            Provenance::Bondal { denominator, numerators } => {
                format!("B({:?}/{denominator})", numerators)
            }
            Provenance::Input { label } => label.clone(),
        }
    }
}

/// A divisor class together with its provenance in a collection.
#[derive(Clone, Debug)]
pub struct BundleClass {
    pub class: DivisorClass,
    pub provenance: Provenance,
}

impl PartialEq for BundleClass {
    fn eq(&self, other: &Self) -> bool {
        self.class == other.class
    }
}

impl Eq for BundleClass {}

/// Classes of the universal bundles, one per quiver vertex in vertex order,
/// normalized so the base vertex gets the trivial class.
///
/// Sign convention: crossing an arrow `a` from tail to head adds the class
/// of the corresponding prime divisor, i.e. `class(head) - class(tail) =
/// [E_a]`. Classes propagate along a spanning tree and every non-tree arrow
/// is verified against the same relation.
pub fn universal_classes(
    lattice: &ClassLattice,
    quiver: &Quiver,
    base_vertex: usize,
) -> Result<Vec<BundleClass>> {
    let r = lattice.ray_count();
    if base_vertex >= quiver.vertices().len() {
        return Err(Error::Input(format!("base vertex {base_vertex} out of range")));
    }
    if let Some(bad) = quiver.arrows().iter().find(|a| a.ray >= r) {
        return Err(Error::InconsistentQuiver(format!(
            "arrow {} names ray {}, fan has {r}",
            bad.id, bad.ray
        )));
    }

    // Divisor-level representatives, propagated over a spanning tree.
    let mut reps: Vec<Option<TorusDivisor>> = vec![None; quiver.vertices().len()];
    reps[base_vertex] = Some(TorusDivisor::zero(r));
    let mut queue = VecDeque::from([base_vertex]);
    while let Some(v) = queue.pop_front() {
        let current = reps[v].clone().expect("queued vertices have classes");
        for a in quiver.arrows() {
            let mut unit = vec![0i64; r];
            unit[a.ray] = 1;
            let e = TorusDivisor::new(unit);
            if a.tail == v && reps[a.head].is_none() {
                reps[a.head] = Some(current.checked_add(&e)?);
                queue.push_back(a.head);
            } else if a.head == v && reps[a.tail].is_none() {
                reps[a.tail] = Some(current.checked_sub(&e)?);
                queue.push_back(a.tail);
            }
        }
    }

    let reps: Vec<TorusDivisor> = reps
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Input("quiver is not connected".into()))?;

    // Every arrow relation must close up in the class group.
    for a in quiver.arrows() {
        let mut unit = vec![0i64; r];
        unit[a.ray] = 1;
        let lhs = lattice.class_of(&reps[a.head].checked_sub(&reps[a.tail])?)?;
        let rhs = lattice.class_of(&TorusDivisor::new(unit))?;
        if lhs != rhs {
            return Err(Error::InconsistentQuiver(format!(
                "arrow {} (ray {}) does not match the class relation",
                a.id, a.ray
            )));
        }
    }

    reps.iter()
        .enumerate()
        .map(|(v, rep)| {
            Ok(BundleClass {
                class: lattice.class_of(rep)?,
                provenance: Provenance::Universal { vertex: quiver.vertices()[v].id.clone() },
            })
        })
        .collect()
}

/// Compositions of `total` into `parts` positive integers.
fn for_each_composition(total: u32, parts: usize, mut f: impl FnMut(&[u32]) -> Result<()>) -> Result<()> {
    fn rec(rest: u32, buf: &mut Vec<u32>, parts: usize, f: &mut impl FnMut(&[u32]) -> Result<()>) -> Result<()> {
        if buf.len() + 1 == parts {
            if rest >= 1 {
                buf.push(rest);
                f(buf)?;
                buf.pop();
            }
            return Ok(());
        }
        let remaining_parts = (parts - buf.len() - 1) as u32;
        for v in 1..=rest.saturating_sub(remaining_parts) {
            buf.push(v);
            rec(rest - v, buf, parts, f)?;
            buf.pop();
        }
        Ok(())
    }
    if parts == 0 {
        return Ok(());
    }
    rec(total, &mut Vec::new(), parts, &mut f)
}

/// The Buchsbaum-Rim collection: universal classes plus every class
/// `sum_{a in R} L_{head(a)} - sum_v P(v) L_v` over `R: arrows -> {0,1}`,
/// `P: vertices -> {1,2,...}` with `|P| + 1 = |R|` and
/// `|vertices| + 1 <= |R| <= |arrows|`, deduplicated by divisor class.
///
/// The enumeration is purely combinatorial; whether the underlying complex
/// actually resolves (the codimension condition on the base) is not checked
/// here.
pub fn buchsbaum_rim_classes(
    lattice: &ClassLattice,
    quiver: &Quiver,
    base_vertex: usize,
) -> Result<Vec<BundleClass>> {
    let universal = universal_classes(lattice, quiver, base_vertex)?;
    let m = quiver.vertices().len();
    let n = quiver.arrows().len();

    let mut seen: BTreeSet<DivisorClass> = universal.iter().map(|b| b.class.clone()).collect();
    let mut out = universal.clone();

    // Sums of head classes for each arrow subset, on divisor representatives.
    let head_rep = |a: &QuiverArrow| universal[a.head].class.representative().clone();
    let vertex_rep = |v: usize| universal[v].class.representative().clone();

    for size in m + 1..=n {
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        let mut pick = vec![0usize; 0];
        fn choose(from: usize, n: usize, size: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if pick.len() == size {
                out.push(pick.clone());
                return;
            }
            for i in from..n {
                pick.push(i);
                choose(i + 1, n, size, pick, out);
                pick.pop();
            }
        }
        choose(0, n, size, &mut pick, &mut subsets);

        for subset in subsets {
            let mut head_sum = TorusDivisor::zero(lattice.ray_count());
            for &ai in &subset {
                head_sum = head_sum.checked_add(&head_rep(&quiver.arrows()[ai]))?;
            }
            let arrows: Vec<String> =
                subset.iter().map(|&ai| quiver.arrows()[ai].id.clone()).collect();
            for_each_composition((size - 1) as u32, m, |p| {
                let mut rep = head_sum.clone();
                for (v, &k) in p.iter().enumerate() {
                    for _ in 0..k {
                        rep = rep.checked_sub(&vertex_rep(v))?;
                    }
                }
                let class = lattice.class_of(&rep)?;
                if seen.insert(class.clone()) {
                    let powers = p
                        .iter()
                        .enumerate()
                        .map(|(v, &k)| (quiver.vertices()[v].id.clone(), k))
                        .collect();
                    out.push(BundleClass {
                        class,
                        provenance: Provenance::BuchsbaumRim { arrows: arrows.clone(), powers },
                    });
                }
                Ok(())
            })?;
        }
    }
    Ok(out)
}

/// Bondal's collection with a stabilization flag.
#[derive(Clone, Debug)]
pub struct BondalCollection {
    pub classes: Vec<BundleClass>,
    /// Whether the largest denominator contributed nothing new.
    pub stabilized: bool,
}

/// Classes `O(sum_i floor(<e_i, m>) E_i)` for `m` running over the grids
/// `{0, 1/l, ..., (l-1)/l}^n`, one grid per requested denominator,
/// deduplicated by divisor class.
pub fn bondal_classes(
    lattice: &ClassLattice,
    fan: &Fan,
    denominators: &[u64],
) -> Result<BondalCollection> {
    let mut dens: Vec<u64> = denominators.iter().copied().filter(|&l| l > 0).collect();
    dens.sort_unstable();
    dens.dedup();
    if dens.is_empty() {
        return Err(Error::Input("no denominators given".into()));
    }
    let n = fan.dim();
    let mut seen: BTreeSet<DivisorClass> = BTreeSet::new();
    let mut out = Vec::new();
    let mut last_added = false;
    for &l in &dens {
        last_added = false;
        let mut k = vec![0i64; n];
        'grid: loop {
            let coeffs: Vec<i64> = fan
                .rays()
                .iter()
                .map(|ray| {
                    let num = crate::fan::pair(&k, ray)?;
                    i64::try_from(num.div_euclid(l as i128)).map_err(|_| Error::Overflow)
                })
                .collect::<Result<_>>()?;
            let class = lattice.class_of(&TorusDivisor::new(coeffs))?;
            if seen.insert(class.clone()) {
                last_added = true;
                out.push(BundleClass {
                    class,
                    provenance: Provenance::Bondal { denominator: l, numerators: k.clone() },
                });
            }
            for i in (0..n).rev() {
                k[i] += 1;
                if k[i] < l as i64 {
                    continue 'grid;
                }
                k[i] = 0;
                if i == 0 {
                    break 'grid;
                }
            }
            if n == 0 {
                break;
            }
        }
    }
    Ok(BondalCollection { classes: out, stabilized: !last_added })
}

/// Full table of cohomology vectors `h(q - p)` over ordered pairs of
/// classes; `Ext^k(L_p, L_q)` has dimension `entry(p, q)[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtTable {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<Vec<u64>>>,
}

impl ExtTable {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn entry(&self, p: usize, q: usize) -> &[u64] {
        &self.entries[p][q]
    }

    /// First ordered pair (including the diagonal) with nonzero higher
    /// cohomology, scanning rows then columns then degree.
    pub fn first_higher_witness(&self) -> Option<(usize, usize, usize)> {
        self.first_higher_witness_within(&(0..self.size()).collect::<Vec<_>>())
    }

    pub fn first_higher_witness_within(&self, subset: &[usize]) -> Option<(usize, usize, usize)> {
        for &p in subset {
            for &q in subset {
                if let Some(k) = self.entries[p][q].iter().skip(1).position(|&v| v != 0) {
                    return Some((p, q, k + 1));
                }
            }
        }
        None
    }

    /// Whether the Hom-arrows between distinct members form an acyclic
    /// digraph, i.e. the collection admits an ordering with all Homs
    /// pointing forward. Informational only.
    pub fn hom_acyclic(&self) -> bool {
        let n = self.size();
        let mut indegree = vec![0usize; n];
        for p in 0..n {
            for q in 0..n {
                if p != q && self.entries[p][q][0] != 0 {
                    indegree[q] += 1;
                }
            }
        }
        let mut removed = 0;
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&q| indegree[q] == 0).collect();
        while let Some(v) = queue.pop_front() {
            removed += 1;
            for q in 0..n {
                if q != v && self.entries[v][q][0] != 0 {
                    indegree[q] -= 1;
                    if indegree[q] == 0 {
                        queue.push_back(q);
                    }
                }
            }
        }
        removed == n
    }
}

/// Cohomology of `L_q (x) L_p^*` for every ordered pair, computed on the
/// canonical representative of the class difference.
pub fn ext_table(
    engine: &CohomologyEngine,
    lattice: &ClassLattice,
    classes: &[BundleClass],
) -> Result<ExtTable> {
    let labels = classes.iter().map(|c| c.provenance.label()).collect();
    let pairs: Vec<(usize, usize)> =
        (0..classes.len()).flat_map(|p| (0..classes.len()).map(move |q| (p, q))).collect();
    let computed: Result<Vec<Vec<u64>>> = pairs
        .par_iter()
        .map(|&(p, q)| {
            let diff = lattice.sub(&classes[q].class, &classes[p].class)?;
            Ok(total_cohomology_with(engine, diff.representative())?.totals)
        })
        .collect();
    let computed = computed?;
    let size = classes.len();
    let entries = (0..size)
        .map(|p| (0..size).map(|q| computed[p * size + q].clone()).collect())
        .collect();
    Ok(ExtTable { labels, entries })
}

/// Verdict of the strong-exceptionality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExceptionalVerdict {
    /// No higher Ext anywhere (pairs and selves). `hom_acyclic` reports
    /// whether an admissible ordering of the collection exists.
    StronglyExceptional { hom_acyclic: bool },
    /// `Ext^degree(L_p, L_q) != 0` for the named pair.
    Witness { p: usize, q: usize, degree: usize },
}

impl ExceptionalVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, ExceptionalVerdict::StronglyExceptional { .. })
    }
}

/// A collection is strongly exceptional when every ordered pair (including
/// each bundle against itself) has vanishing higher cohomology.
pub fn is_strongly_exceptional(
    engine: &CohomologyEngine,
    lattice: &ClassLattice,
    classes: &[BundleClass],
) -> Result<ExceptionalVerdict> {
    let table = ext_table(engine, lattice, classes)?;
    Ok(match table.first_higher_witness() {
        Some((p, q, degree)) => ExceptionalVerdict::Witness { p, q, degree },
        None => ExceptionalVerdict::StronglyExceptional { hom_acyclic: table.hom_acyclic() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn vertex(id: &str) -> QuiverVertex {
        QuiverVertex { id: id.into(), weight: None }
    }

    #[test]
    fn single_arrow_universal_classes() {
        let fan = p1();
        let lattice = ClassLattice::new(&fan).unwrap();
        let quiver = Quiver::new(
            vec![vertex("v"), vertex("w")],
            vec![QuiverArrow { id: "a".into(), tail: 0, head: 1, ray: 0 }],
        )
        .unwrap();
        let classes = universal_classes(&lattice, &quiver, 0).unwrap();
        assert!(classes[0].class.is_zero());
        let e0 = lattice.class_of(&TorusDivisor::new(vec![1, 0])).unwrap();
        assert_eq!(classes[1].class, e0);
    }

    #[test]
    fn quiver_rejects_duplicate_ray() {
        let err = Quiver::new(
            vec![vertex("v"), vertex("w")],
            vec![
                QuiverArrow { id: "a".into(), tail: 0, head: 1, ray: 0 },
                QuiverArrow { id: "b".into(), tail: 1, head: 0, ray: 0 },
            ],
        );
        assert!(err.is_err());
    }

    #[test]
    fn inconsistent_ray_dictionary_is_detected() {
        // On the plane, a triangle quiver whose arrows all point the same
        // way around cannot satisfy head - tail = [E_a]: each [E_i] is the
        // hyperplane class, so the cycle would sum to 3H != 0.
        let fan = p2();
        let lattice = ClassLattice::new(&fan).unwrap();
        let quiver = Quiver::new(
            vec![vertex("u"), vertex("v"), vertex("w")],
            vec![
                QuiverArrow { id: "a".into(), tail: 0, head: 1, ray: 0 },
                QuiverArrow { id: "b".into(), tail: 1, head: 2, ray: 1 },
                QuiverArrow { id: "c".into(), tail: 2, head: 0, ray: 2 },
            ],
        )
        .unwrap();
        assert!(matches!(
            universal_classes(&lattice, &quiver, 0),
            Err(Error::InconsistentQuiver(_))
        ));
    }

    #[test]
    fn universal_classes_independent_of_arrow_order() {
        let fan = p2();
        let lattice = ClassLattice::new(&fan).unwrap();
        // A path quiver is always consistent; listing its arrows in either
        // order must give the same vertex classes.
        let make = |flip: bool| {
            let mut arrows = vec![
                QuiverArrow { id: "a".into(), tail: 0, head: 1, ray: 0 },
                QuiverArrow { id: "b".into(), tail: 1, head: 2, ray: 1 },
            ];
            if flip {
                arrows.reverse();
            }
            Quiver::new(vec![vertex("u"), vertex("v"), vertex("w")], arrows).unwrap()
        };
        let c1 = universal_classes(&lattice, &make(false), 0).unwrap();
        let c2 = universal_classes(&lattice, &make(true), 0).unwrap();
        for (a, b) in c1.iter().zip(&c2) {
            assert_eq!(a.class, b.class);
        }
    }

    #[test]
    fn bondal_on_p1() {
        let fan = p1();
        let lattice = ClassLattice::new(&fan).unwrap();
        let b = bondal_classes(&lattice, &fan, &(1..=6).collect::<Vec<_>>()).unwrap();
        assert_eq!(b.classes.len(), 2);
        assert!(b.stabilized);
        let zero = lattice.zero_class();
        let minus_one = lattice.class_of(&TorusDivisor::new(vec![0, -1])).unwrap();
        let got: BTreeSet<_> = b.classes.iter().map(|c| c.class.clone()).collect();
        assert_eq!(got, BTreeSet::from([zero, minus_one]));
    }

    #[test]
    fn bondal_monotone_in_denominators() {
        let fan = p2();
        let lattice = ClassLattice::new(&fan).unwrap();
        let small = bondal_classes(&lattice, &fan, &[1, 2, 3]).unwrap();
        let large = bondal_classes(&lattice, &fan, &(1..=8).collect::<Vec<_>>()).unwrap();
        let small_set: BTreeSet<_> = small.classes.iter().map(|c| c.class.clone()).collect();
        let large_set: BTreeSet<_> = large.classes.iter().map(|c| c.class.clone()).collect();
        assert!(small_set.is_subset(&large_set));
    }

    #[test]
    fn ext_table_diagonal_is_structure_sheaf() {
        let fan = p2();
        let lattice = ClassLattice::new(&fan).unwrap();
        let engine = CohomologyEngine::new(&fan);
        let classes: Vec<BundleClass> = [0i64, 1, 2]
            .iter()
            .map(|&k| BundleClass {
                class: lattice.class_of(&TorusDivisor::new(vec![k, 0, 0])).unwrap(),
                provenance: Provenance::Input { label: format!("O({k})") },
            })
            .collect();
        let table = ext_table(&engine, &lattice, &classes).unwrap();
        for p in 0..3 {
            assert_eq!(table.entry(p, p), &[1, 0, 0]);
        }
        // O, O(1), O(2) on the plane is the classical strongly exceptional
        // collection.
        let verdict = is_strongly_exceptional(&engine, &lattice, &classes).unwrap();
        assert_eq!(verdict, ExceptionalVerdict::StronglyExceptional { hom_acyclic: true });
    }

    #[test]
    fn twisted_collection_fails_with_witness() {
        let fan = p2();
        let lattice = ClassLattice::new(&fan).unwrap();
        let engine = CohomologyEngine::new(&fan);
        // Ext^2(O, O(-3)) = H^2(O(-3)) is nonzero on the plane.
        let classes: Vec<BundleClass> = [0i64, -3]
            .iter()
            .map(|&k| BundleClass {
                class: lattice.class_of(&TorusDivisor::new(vec![k, 0, 0])).unwrap(),
                provenance: Provenance::Input { label: format!("O({k})") },
            })
            .collect();
        let verdict = is_strongly_exceptional(&engine, &lattice, &classes).unwrap();
        assert_eq!(verdict, ExceptionalVerdict::Witness { p: 0, q: 1, degree: 2 });
    }

    #[test]
    fn ext_entry_depends_only_on_class_difference() {
        let fan = p2();
        let lattice = ClassLattice::new(&fan).unwrap();
        let engine = CohomologyEngine::new(&fan);
        // Same classes, shifted representatives.
        let a = BundleClass {
            class: lattice.class_of(&TorusDivisor::new(vec![1, 0, 0])).unwrap(),
            provenance: Provenance::Input { label: "A".into() },
        };
        let a_shifted = BundleClass {
            class: lattice.class_of(&TorusDivisor::new(vec![0, 1, 0])).unwrap(),
            provenance: Provenance::Input { label: "A'".into() },
        };
        let b = BundleClass {
            class: lattice.class_of(&TorusDivisor::new(vec![-1, -1, -1])).unwrap(),
            provenance: Provenance::Input { label: "B".into() },
        };
        let t1 = ext_table(&engine, &lattice, &[a, b.clone()]).unwrap();
        let t2 = ext_table(&engine, &lattice, &[a_shifted, b]).unwrap();
        assert_eq!(t1.entries, t2.entries);
    }

    #[test]
    fn quiver_json_round_trip() {
        let q = Quiver::new(
            vec![vertex("v"), vertex("w")],
            vec![QuiverArrow { id: "a".into(), tail: 0, head: 1, ray: 0 }],
        )
        .unwrap();
        let json = serde_json::to_string(&q).unwrap();
        let back: Quiver = serde_json::from_str(&json).unwrap();
        assert_eq!(q, back);
        assert!(json.contains("\"tail\":\"v\""));
    }
}

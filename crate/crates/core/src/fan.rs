//! Complete fans, torus-invariant divisors, support functions and divisor
//! classes.
//!
//! A [`Fan`] is purely combinatorial data: primitive ray generators in the
//! lattice `N` and maximal cones as ray-index sets. Everything downstream
//! (facet complexes, weight scans, class groups) is derived from it.

use crate::error::{Error, Result};
use crate::exactlin::{
    self, CokernelPresentation, IntMatrix, NormalForm,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Facet sets and weight caches are stored as 64-bit masks.
pub const MAX_RAYS: usize = 64;

/// Exact pairing of a weight with a ray, with overflow surfaced as an error.
pub(crate) fn pair(m: &[i64], ray: &[i64]) -> Result<i128> {
    debug_assert_eq!(m.len(), ray.len());
    let mut acc: i128 = 0;
    for (a, b) in m.iter().zip(ray) {
        acc = acc.checked_add((*a as i128) * (*b as i128)).ok_or(Error::Overflow)?;
    }
    Ok(acc)
}

fn gcd_all(xs: &[i64]) -> i64 {
    xs.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Iterate over all `k`-element subsets of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Clone, Serialize, Deserialize)]
struct FanData {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

/// A complete fan given by primitive ray generators and maximal cones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FanData", into = "FanData")]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl TryFrom<FanData> for Fan {
    type Error = Error;

    fn try_from(d: FanData) -> Result<Fan> {
        Fan::new(d.dim, d.rays, d.max_cones)
    }
}

impl From<Fan> for FanData {
    fn from(f: Fan) -> FanData {
        FanData { dim: f.dim, rays: f.rays, max_cones: f.max_cones }
    }
}

/// Validation verdict for a fan; structural defects are reported as errors
/// instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanReport {
    pub complete: bool,
    pub simplicial: bool,
    pub smooth: bool,
}

impl Fan {
    /// Builds a fan after shape checks (dimensions, index bounds). The deeper
    /// geometric checks live in [`Fan::validate`].
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidFan("dimension must be positive".into()));
        }
        if rays.is_empty() {
            return Err(Error::InvalidFan("fan has no rays".into()));
        }
        if rays.len() > MAX_RAYS {
            return Err(Error::TooManyRays(rays.len()));
        }
        for (i, ray) in rays.iter().enumerate() {
            if ray.len() != dim {
                return Err(Error::InvalidFan(format!(
                    "ray {i} has {} coordinates, expected {dim}",
                    ray.len()
                )));
            }
        }
        if max_cones.is_empty() {
            return Err(Error::InvalidFan("fan has no maximal cones".into()));
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (c, cone) in max_cones.into_iter().enumerate() {
            let mut sorted = cone;
            sorted.sort_unstable();
            let before = sorted.len();
            sorted.dedup();
            if sorted.len() != before {
                return Err(Error::InvalidFan(format!("cone {c} repeats a ray index")));
            }
            if let Some(&bad) = sorted.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("cone {c} references missing ray {bad}")));
            }
            if sorted.is_empty() {
                return Err(Error::InvalidFan(format!("cone {c} is empty")));
            }
            cones.push(sorted);
        }
        Ok(Self { dim, rays, max_cones: cones })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn check_divisor(&self, d: &TorusDivisor) -> Result<()> {
        if d.coeffs().len() != self.ray_count() {
            return Err(Error::DivisorLength { got: d.coeffs().len(), expected: self.ray_count() });
        }
        Ok(())
    }

    pub fn check_weight(&self, m: &[i64]) -> Result<()> {
        if m.len() != self.dim {
            return Err(Error::WeightLength { got: m.len(), expected: self.dim });
        }
        Ok(())
    }

    /// Ray matrix of a cone: rows are the cone's ray generators. The column
    /// count is always the ambient dimension, even for the empty ray set.
    fn cone_matrix(&self, cone: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zero(cone.len(), self.dim);
        for (r, &i) in cone.iter().enumerate() {
            for (c, &x) in self.rays[i].iter().enumerate() {
                m.set(r, c, BigInt::from(x));
            }
        }
        m
    }

    /// Exact membership test of a rational point in a simplicial cone.
    /// Returns the barycentric coordinates when the point lies in the cone.
    fn cone_coordinates(&self, cone: &[usize], v: &[BigRational]) -> Option<Vec<BigRational>> {
        // Columns are the rays, so solve R^T lambda = v.
        let mat = self.cone_matrix(cone).transpose();
        let lambda = exactlin::solve_rational(&mat, v)?;
        // solve_rational returns a particular solution; for simplicial cones
        // it is the unique one, but verify to guard degenerate inputs.
        let check = (0..self.dim).all(|r| {
            let sum: BigRational = (0..cone.len()).map(|c| &lambda[c] * BigRational::from(BigInt::from(self.rays[cone[c]][r]))).sum();
            sum == v[r]
        });
        if !check {
            return None;
        }
        if lambda.iter().all(|l| !l.is_negative()) {
            Some(lambda)
        } else {
            None
        }
    }

    /// Full validation: structural errors are `Err`, geometric classification
    /// is the report. Completeness testing is only implemented for simplicial
    /// fans; non-simplicial fans report `complete: false`.
    pub fn validate(&self) -> Result<FanReport> {
        let n = self.dim;
        for (i, ray) in self.rays.iter().enumerate() {
            if ray.iter().all(|&x| x == 0) {
                return Err(Error::InvalidFan(format!("ray {i} is zero")));
            }
            if gcd_all(ray).abs() != 1 {
                return Err(Error::InvalidFan(format!("ray {i} is not primitive: {ray:?}")));
            }
            for (j, other) in self.rays.iter().enumerate().skip(i + 1) {
                if ray == other {
                    return Err(Error::InvalidFan(format!("rays {i} and {j} are equal")));
                }
            }
        }
        let mut used = vec![false; self.ray_count()];
        for cone in &self.max_cones {
            for &i in cone {
                used[i] = true;
            }
        }
        if let Some(unused) = used.iter().position(|u| !u) {
            return Err(Error::InvalidFan(format!("ray {unused} appears in no maximal cone")));
        }
        for (c, cone) in self.max_cones.iter().enumerate() {
            if cone.len() < n {
                return Err(Error::InvalidFan(format!(
                    "cone {c} has {} rays, too few to span dimension {n}",
                    cone.len()
                )));
            }
            for (c2, other) in self.max_cones.iter().enumerate().skip(c + 1) {
                if cone == other {
                    return Err(Error::InvalidFan(format!("cones {c} and {c2} are equal")));
                }
            }
        }

        let simplicial = self.max_cones.iter().all(|c| c.len() == n);
        if !simplicial {
            // Completeness certification is restricted to the simplicial case.
            return Ok(FanReport { complete: false, simplicial: false, smooth: false });
        }

        let mut smooth = true;
        for (c, cone) in self.max_cones.iter().enumerate() {
            let det = exactlin::determinant(&self.cone_matrix(cone));
            if det.is_zero() {
                return Err(Error::InvalidFan(format!("cone {c} is degenerate (rays dependent)")));
            }
            if det.abs() != BigInt::one() {
                smooth = false;
            }
        }

        // Wall structure: every (n-1)-subset of a maximal cone, mapped to the
        // cones containing it.
        let mut walls: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (c, cone) in self.max_cones.iter().enumerate() {
            for skip in 0..cone.len() {
                let facet: Vec<usize> =
                    cone.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &r)| r).collect();
                walls.entry(facet).or_default().push(c);
            }
        }

        let mut complete = true;
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); self.max_cones.len()];
        for (facet, cones) in &walls {
            match cones.len() {
                1 => complete = false,
                2 => {
                    // The two cones must sit on strictly opposite sides of the
                    // wall hyperplane.
                    let wall_matrix = self.cone_matrix(facet);
                    let kernel = exactlin::kernel_basis(&wall_matrix);
                    if kernel.len() != 1 {
                        return Err(Error::InvalidFan(format!(
                            "wall {facet:?} does not span a hyperplane"
                        )));
                    }
                    let w = &kernel[0];
                    let mut signs = Vec::new();
                    for &c in cones {
                        let opp = self.max_cones[c]
                            .iter()
                            .copied()
                            .find(|r| !facet.contains(r))
                            .expect("simplicial cone has one ray off each wall");
                        let s: BigInt = self.rays[opp]
                            .iter()
                            .zip(w)
                            .map(|(&a, b)| BigInt::from(a) * b)
                            .sum();
                        signs.push(s);
                    }
                    if signs[0].is_zero()
                        || signs[1].is_zero()
                        || signs[0].sign() == signs[1].sign()
                    {
                        return Err(Error::InvalidFan(format!(
                            "cones {} and {} meet improperly along wall {facet:?}",
                            cones[0], cones[1]
                        )));
                    }
                    adjacency[cones[0]].push(cones[1]);
                    adjacency[cones[1]].push(cones[0]);
                }
                _ => {
                    return Err(Error::InvalidFan(format!(
                        "wall {facet:?} is shared by {} maximal cones",
                        cones.len()
                    )));
                }
            }
        }

        // Interior points of one cone may not lie in any other cone.
        for (c, cone) in self.max_cones.iter().enumerate() {
            let barycenter: Vec<BigRational> = (0..n)
                .map(|k| {
                    BigRational::from(BigInt::from(
                        cone.iter().map(|&r| self.rays[r][k]).sum::<i64>(),
                    ))
                })
                .collect();
            for (c2, other) in self.max_cones.iter().enumerate() {
                if c2 != c && self.cone_coordinates(other, &barycenter).is_some() {
                    return Err(Error::InvalidFan(format!(
                        "cones {c} and {c2} overlap improperly"
                    )));
                }
            }
        }

        // Connectivity of the wall-adjacency graph.
        if complete {
            let mut seen = vec![false; self.max_cones.len()];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(c) = stack.pop() {
                for &next in &adjacency[c] {
                    if !seen[next] {
                        seen[next] = true;
                        stack.push(next);
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                complete = false;
            }
        }

        Ok(FanReport { complete, simplicial, smooth })
    }

    /// Wall-adjacent pairs of maximal cones (each unordered pair once).
    pub(crate) fn wall_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.dim;
        let mut walls: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (c, cone) in self.max_cones.iter().enumerate() {
            if cone.len() != n {
                continue;
            }
            for skip in 0..cone.len() {
                let facet: Vec<usize> =
                    cone.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &r)| r).collect();
                walls.entry(facet).or_default().push(c);
            }
        }
        let mut pairs = BTreeSet::new();
        for cones in walls.values() {
            if cones.len() == 2 {
                pairs.insert((cones[0].min(cones[1]), cones[0].max(cones[1])));
            }
        }
        pairs.into_iter().collect()
    }
}

/// A torus-invariant divisor `D = sum d_i E_i`, one coefficient per ray.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusDivisor {
    coeffs: Vec<i64>,
}

impl TorusDivisor {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(ray_count: usize) -> Self {
        Self { coeffs: vec![0; ray_count] }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs[i]
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(Self { coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.checked_sub(*b).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(Self { coeffs })
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }
}

/// The canonical divisor `-sum E_i`.
pub fn canonical_divisor(fan: &Fan) -> TorusDivisor {
    TorusDivisor::new(vec![-1; fan.ray_count()])
}

/// Per-maximal-cone linear functionals `m_sigma` with
/// `<m_sigma, e_i> = -d_i` on the rays of the cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierData {
    m_sigma: Vec<Vec<BigInt>>,
}

impl CartierData {
    pub fn functional(&self, cone: usize) -> &[BigInt] {
        &self.m_sigma[cone]
    }

    pub fn functionals(&self) -> &[Vec<BigInt>] {
        &self.m_sigma
    }
}

fn cartier_functionals(fan: &Fan, d: &TorusDivisor) -> Result<CartierData> {
    fan.check_divisor(d)?;
    let mut m_sigma = Vec::with_capacity(fan.max_cones().len());
    for (c, cone) in fan.max_cones().iter().enumerate() {
        let mat = fan.cone_matrix(cone);
        let b: Vec<BigInt> = cone.iter().map(|&i| BigInt::from(-d.coeff(i))).collect();
        match exactlin::solve_integral(&mat, &b) {
            Some(m) => m_sigma.push(m),
            None => return Err(Error::NotCartier { cone: c }),
        }
    }
    Ok(CartierData { m_sigma })
}

/// Cartier data for `D`, or `None` when some cone admits no integral
/// functional (only possible on non-smooth fans).
pub fn cartier_data(fan: &Fan, d: &TorusDivisor) -> Result<Option<CartierData>> {
    match cartier_functionals(fan, d) {
        Ok(cd) => Ok(Some(cd)),
        Err(Error::NotCartier { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub(crate) fn require_cartier(fan: &Fan, d: &TorusDivisor) -> Result<CartierData> {
    cartier_functionals(fan, d)
}

/// Value of the support function `psi_D` at a rational point of `N`.
///
/// The point must lie in some maximal cone; on walls the value is computed
/// through every containing cone and asserted equal.
pub fn support_value(fan: &Fan, cd: &CartierData, v: &[BigRational]) -> Result<BigRational> {
    if v.len() != fan.dim() {
        return Err(Error::WeightLength { got: v.len(), expected: fan.dim() });
    }
    let mut value: Option<BigRational> = None;
    for (c, cone) in fan.max_cones().iter().enumerate() {
        if fan.cone_coordinates(cone, v).is_none() {
            continue;
        }
        let val: BigRational = cd
            .functional(c)
            .iter()
            .zip(v)
            .map(|(m, x)| BigRational::from(m.clone()) * x)
            .sum();
        match &value {
            None => value = Some(val),
            Some(prev) => assert_eq!(
                *prev, val,
                "support function disagrees between cones containing the point"
            ),
        }
    }
    value.ok_or(Error::OutsideSupport)
}

/// Strict convexity of `psi_D` across every wall; the ample criterion.
pub fn is_ample(fan: &Fan, d: &TorusDivisor) -> Result<bool> {
    let cd = require_cartier(fan, d)?;
    for (a, b) in fan.wall_pairs() {
        for (this, other) in [(a, b), (b, a)] {
            let m = cd.functional(this);
            for &e in &fan.max_cones()[other] {
                if fan.max_cones()[this].contains(&e) {
                    continue;
                }
                let value: BigInt =
                    fan.ray(e).iter().zip(m).map(|(&x, mi)| BigInt::from(x) * mi).sum();
                if value <= BigInt::from(-d.coeff(e)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// All rational vertices of the hyperplane arrangement
/// `{ m : <m, e_i> = -d_i }`, one per linearly independent n-subset of rays.
pub(crate) fn arrangement_vertices(fan: &Fan, d: &TorusDivisor) -> Result<Vec<Vec<BigRational>>> {
    fan.check_divisor(d)?;
    let n = fan.dim();
    let mut vertices = Vec::new();
    for_each_combination(fan.ray_count(), n, |subset| {
        let mat = fan.cone_matrix(subset);
        if exactlin::determinant(&mat).is_zero() {
            return;
        }
        let b: Vec<BigRational> =
            subset.iter().map(|&i| BigRational::from(BigInt::from(-d.coeff(i)))).collect();
        if let Some(v) = exactlin::solve_rational(&mat, &b) {
            vertices.push(v);
        }
    });
    Ok(vertices)
}

fn rational_to_i64_floor(q: &BigRational) -> Result<i64> {
    i64::try_from(&q.floor().to_integer()).map_err(|_| Error::Overflow)
}

fn rational_to_i64_ceil(q: &BigRational) -> Result<i64> {
    i64::try_from(&q.ceil().to_integer()).map_err(|_| Error::Overflow)
}

/// All lattice points of the polytope `P_D = { m : <m, e_i> >= -d_i }`,
/// in lexicographic order. These are exactly the weights with `Z(m, D)`
/// empty, i.e. the weights contributing to `H^0`.
pub fn polytope_lattice_points(fan: &Fan, d: &TorusDivisor) -> Result<Vec<Vec<i64>>> {
    fan.check_divisor(d)?;
    let n = fan.dim();
    let feasible: Vec<Vec<BigRational>> = arrangement_vertices(fan, d)?
        .into_iter()
        .filter(|v| {
            fan.rays().iter().enumerate().all(|(i, ray)| {
                let val: BigRational = ray
                    .iter()
                    .zip(v)
                    .map(|(&a, x)| BigRational::from(BigInt::from(a)) * x)
                    .sum();
                val >= BigRational::from(BigInt::from(-d.coeff(i)))
            })
        })
        .collect();
    if feasible.is_empty() {
        // A nonempty bounded polyhedron has a vertex, so no feasible vertex
        // means the polytope is empty.
        return Ok(Vec::new());
    }
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for v in &feasible {
        for k in 0..n {
            lo[k] = lo[k].min(rational_to_i64_floor(&v[k])?);
            hi[k] = hi[k].max(rational_to_i64_ceil(&v[k])?);
        }
    }
    let mut out = Vec::new();
    let mut m = lo.clone();
    'scan: loop {
        let inside = (0..fan.ray_count()).try_fold(true, |ok, i| -> Result<bool> {
            Ok(ok && pair(&m, fan.ray(i))? >= -(d.coeff(i) as i128))
        })?;
        if inside {
            out.push(m.clone());
        }
        for k in (0..n).rev() {
            m[k] += 1;
            if m[k] <= hi[k] {
                continue 'scan;
            }
            m[k] = lo[k];
            if k == 0 {
                break 'scan;
            }
        }
        if n == 0 {
            break;
        }
    }
    out.sort();
    Ok(out)
}

/// A divisor class: normal form in the class group plus a stored divisor
/// representative. Equality, ordering and hashing use only the normal form.
#[derive(Clone, Debug)]
pub struct DivisorClass {
    normal: NormalForm,
    rep: TorusDivisor,
}

impl DivisorClass {
    pub fn normal(&self) -> &NormalForm {
        &self.normal
    }

    pub fn representative(&self) -> &TorusDivisor {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.normal.free.iter().all(|x| x.is_zero())
            && self.normal.torsion.iter().all(|x| x.is_zero())
    }
}

impl PartialEq for DivisorClass {
    fn eq(&self, other: &Self) -> bool {
        self.normal == other.normal
    }
}

impl Eq for DivisorClass {}

impl PartialOrd for DivisorClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DivisorClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.normal.cmp(&other.normal)
    }
}

impl std::hash::Hash for DivisorClass {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.normal.hash(state);
    }
}

/// The class group `Z^rays / im(M)` of a fan, with an optional distinguished
/// set of rays whose classes form a basis (used to canonicalize divisor
/// representatives).
#[derive(Clone, Debug)]
pub struct ClassLattice {
    ray_count: usize,
    coker: CokernelPresentation,
    basis: Option<Vec<usize>>,
    basis_matrix: Option<IntMatrix>,
}

impl ClassLattice {
    /// Builds the class lattice, choosing a canonical basis of rays greedily
    /// (first rays whose classes stay independent, accepted only when the
    /// resulting square matrix is unimodular).
    pub fn new(fan: &Fan) -> Result<Self> {
        Self::build(fan, None)
    }

    /// Builds the class lattice with an explicit ray basis; errors when the
    /// chosen ray classes do not form a basis of a free class group.
    pub fn with_basis(fan: &Fan, basis_rays: &[usize]) -> Result<Self> {
        Self::build(fan, Some(basis_rays.to_vec()))
    }

    fn build(fan: &Fan, requested: Option<Vec<usize>>) -> Result<Self> {
        // Rays pair against the character lattice: the class group is the
        // cokernel of the r x n ray matrix acting on M.
        let ray_matrix = IntMatrix::from_i64_rows(fan.rays());
        let coker = exactlin::cokernel_map(&ray_matrix);
        let f = coker.free_rank();

        let class_vec = |i: usize| -> Vec<BigInt> {
            let mut v = vec![BigInt::zero(); fan.ray_count()];
            v[i] = BigInt::one();
            coker.project(&v).free
        };

        let matrix_for = |rays: &[usize]| -> IntMatrix {
            // Columns are the free coordinates of the chosen ray classes.
            let cols: Vec<Vec<BigInt>> = rays.iter().map(|&i| class_vec(i)).collect();
            let mut m = IntMatrix::zero(f, rays.len());
            for (j, col) in cols.iter().enumerate() {
                for (i, x) in col.iter().enumerate() {
                    m.set(i, j, x.clone());
                }
            }
            m
        };

        let basis = if let Some(req) = requested {
            if !coker.is_free() {
                return Err(Error::Input(
                    "canonical ray basis requires a torsion-free class group".into(),
                ));
            }
            if req.len() != f {
                return Err(Error::Input(format!(
                    "basis needs {f} rays, got {}",
                    req.len()
                )));
            }
            let m = matrix_for(&req);
            if exactlin::determinant(&m).abs() != BigInt::one() {
                return Err(Error::Input(
                    "chosen ray classes do not form a lattice basis".into(),
                ));
            }
            Some(req)
        } else if coker.is_free() && f > 0 {
            let mut chosen: Vec<usize> = Vec::new();
            for i in 0..fan.ray_count() {
                if chosen.len() == f {
                    break;
                }
                let mut candidate = chosen.clone();
                candidate.push(i);
                if exactlin::rank_q(&matrix_for(&candidate)) == candidate.len() {
                    chosen = candidate;
                }
            }
            if chosen.len() == f && exactlin::determinant(&matrix_for(&chosen)).abs() == BigInt::one()
            {
                Some(chosen)
            } else {
                None
            }
        } else if f == 0 && coker.is_free() {
            Some(Vec::new())
        } else {
            None
        };

        let basis_matrix = basis.as_ref().map(|b| matrix_for(b));
        Ok(Self { ray_count: fan.ray_count(), coker, basis, basis_matrix })
    }

    pub fn ray_count(&self) -> usize {
        self.ray_count
    }

    pub fn free_rank(&self) -> usize {
        self.coker.free_rank()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.coker.torsion()
    }

    pub fn basis(&self) -> Option<&[usize]> {
        self.basis.as_deref()
    }

    fn project(&self, d: &TorusDivisor) -> NormalForm {
        let v: Vec<BigInt> = d.coeffs().iter().map(|&c| BigInt::from(c)).collect();
        self.coker.project(&v)
    }

    /// Divisor supported on the basis rays representing the given free
    /// coordinates, when a canonical basis exists.
    fn canonical_rep(&self, normal: &NormalForm) -> Option<TorusDivisor> {
        let basis = self.basis.as_ref()?;
        if normal.torsion.iter().any(|t| !t.is_zero()) {
            return None;
        }
        let m = self.basis_matrix.as_ref()?;
        let x = exactlin::solve_integral(m, &normal.free)?;
        let mut coeffs = vec![0i64; self.ray_count];
        for (&ray, xi) in basis.iter().zip(&x) {
            coeffs[ray] = i64::try_from(xi).ok()?;
        }
        Some(TorusDivisor::new(coeffs))
    }

    /// The class of a divisor. The stored representative is canonicalized to
    /// the basis rays when a basis is available.
    pub fn class_of(&self, d: &TorusDivisor) -> Result<DivisorClass> {
        if d.coeffs().len() != self.ray_count {
            return Err(Error::DivisorLength { got: d.coeffs().len(), expected: self.ray_count });
        }
        let normal = self.project(d);
        let rep = self.canonical_rep(&normal).unwrap_or_else(|| d.clone());
        Ok(DivisorClass { normal, rep })
    }

    pub fn zero_class(&self) -> DivisorClass {
        self.class_of(&TorusDivisor::zero(self.ray_count)).expect("zero divisor always valid")
    }

    pub fn add(&self, a: &DivisorClass, b: &DivisorClass) -> Result<DivisorClass> {
        self.class_of(&a.rep.checked_add(&b.rep)?)
    }

    pub fn sub(&self, a: &DivisorClass, b: &DivisorClass) -> Result<DivisorClass> {
        self.class_of(&a.rep.checked_sub(&b.rep)?)
    }

    pub fn neg(&self, a: &DivisorClass) -> Result<DivisorClass> {
        self.class_of(&a.rep.neg())
    }
}

/// The class of `D` in the class group, built from a fresh [`ClassLattice`].
pub fn divisor_class(fan: &Fan, d: &TorusDivisor) -> Result<DivisorClass> {
    ClassLattice::new(fan)?.class_of(d)
}

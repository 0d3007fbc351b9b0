//! Exact integer and rational linear algebra.
//!
//! Everything here runs over arbitrary-precision integers (or exact
//! rationals); there is no floating point and no modular shortcut. The
//! matrices in this crate are small, so correctness and reproducibility win
//! over asymptotics: Smith normal form uses a deterministic minimal-pivot
//! rule, ranks use fraction-free Bareiss elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Dense integer matrix, row-major, arbitrary precision.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Self::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = a * rhs.at(k, j);
                    let cur = out.at(i, j) + add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Diagonal entries, up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self.at(i, i).clone()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Quotient rounded to the nearest integer, ties kept at the truncated value.
fn div_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.magnitude() * 2u32 > *b.magnitude() {
        if r.sign() == b.sign() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Smith normal form `A = U * D * V` with unimodular `U`, `V`.
///
/// `D` is diagonal with nonnegative entries and `d_1 | d_2 | ...`. The
/// inverses of `U` and `V` come out of the same elimination for free and are
/// kept, since cokernel projections need them.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

struct SnfWork {
    m: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    u_inv: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfWork {
    // Invariant maintained by every operation: a_original = u * m * v.

    fn row_swap(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        self.u.swap_cols(a, b);
        self.u_inv.swap_rows(a, b);
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        self.m.swap_cols(a, b);
        self.v.swap_rows(a, b);
        self.v_inv.swap_cols(a, b);
    }

    /// row_i -= q * row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.m.cols() {
            let val = self.m.at(i, j) - q * self.m.at(t, j);
            self.m.set(i, j, val);
        }
        for r in 0..self.u.rows() {
            let val = self.u.at(r, t) + q * self.u.at(r, i);
            self.u.set(r, t, val);
        }
        for j in 0..self.u_inv.cols() {
            let val = self.u_inv.at(i, j) - q * self.u_inv.at(t, j);
            self.u_inv.set(i, j, val);
        }
    }

    /// row_t += row_i
    fn row_add(&mut self, t: usize, i: usize) {
        let minus_one = -BigInt::one();
        self.row_sub(t, i, &minus_one);
    }

    /// col_j -= q * col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.m.rows() {
            let val = self.m.at(i, j) - q * self.m.at(i, t);
            self.m.set(i, j, val);
        }
        for c in 0..self.v.cols() {
            let val = self.v.at(t, c) + q * self.v.at(j, c);
            self.v.set(t, c, val);
        }
        for i in 0..self.v_inv.rows() {
            let val = self.v_inv.at(i, j) - q * self.v_inv.at(i, t);
            self.v_inv.set(i, j, val);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.m.cols() {
            let val = -self.m.at(i, j);
            self.m.set(i, j, val);
        }
        for r in 0..self.u.rows() {
            let val = -self.u.at(r, i);
            self.u.set(r, i, val);
        }
        for j in 0..self.u_inv.cols() {
            let val = -self.u_inv.at(i, j);
            self.u_inv.set(i, j, val);
        }
    }
}

/// Deterministic pivot: minimal absolute value among nonzero entries of the
/// active submatrix, ties broken by row-major order.
fn select_pivot(m: &IntMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..m.rows() {
        for j in from..m.cols() {
            let e = m.at(i, j);
            if e.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if m.at(bi, bj).magnitude() <= e.magnitude() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

pub fn snf(a: &IntMatrix) -> SnfResult {
    let rows = a.rows();
    let cols = a.cols();
    let mut w = SnfWork {
        m: a.clone(),
        u: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        u_inv: IntMatrix::identity(rows),
        v_inv: IntMatrix::identity(cols),
    };

    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = select_pivot(&w.m, t) else {
            break;
        };
        w.row_swap(t, pi);
        w.col_swap(t, pj);

        'place: loop {
            // Clear column t with nearest-quotient reductions; a nonzero
            // remainder becomes the new, strictly smaller pivot.
            for i in t + 1..rows {
                if w.m.at(i, t).is_zero() {
                    continue;
                }
                let q = div_nearest(w.m.at(i, t), w.m.at(t, t));
                w.row_sub(i, t, &q);
                if !w.m.at(i, t).is_zero() {
                    w.row_swap(t, i);
                    continue 'place;
                }
            }
            for j in t + 1..cols {
                if w.m.at(t, j).is_zero() {
                    continue;
                }
                let q = div_nearest(w.m.at(t, j), w.m.at(t, t));
                w.col_sub(j, t, &q);
                if !w.m.at(t, j).is_zero() {
                    w.col_swap(t, j);
                    continue 'place;
                }
            }
            // Pivot divides the rest of the submatrix, or we fold an
            // offending row in and keep reducing.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !w.m.at(i, j).mod_floor(w.m.at(t, t)).is_zero() {
                        w.row_add(t, i);
                        continue 'place;
                    }
                }
            }
            break;
        }

        if w.m.at(t, t).is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }

    SnfResult { d: w.m, u: w.u, v: w.v, u_inv: w.u_inv, v_inv: w.v_inv, rank: t }
}

/// Rank over the rationals by fraction-free Bareiss elimination.
pub fn rank_q(a: &IntMatrix) -> usize {
    let mut m = a.clone();
    bareiss(&mut m).0
}

/// Determinant of a square matrix, exact.
pub fn determinant(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows(), a.cols(), "determinant needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let (rank, sign) = bareiss(&mut m);
    if rank < n {
        return BigInt::zero();
    }
    let pivot = m.at(n - 1, n - 1).clone();
    if sign < 0 {
        -pivot
    } else {
        pivot
    }
}

/// In-place Bareiss; returns (rank, sign of row/col permutation).
fn bareiss(m: &mut IntMatrix) -> (usize, i32) {
    let rows = m.rows();
    let cols = m.cols();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    let mut r = 0;
    while r < rows.min(cols) {
        // First nonzero in row-major order keeps the elimination deterministic.
        let mut pivot = None;
        'search: for i in r..rows {
            for j in r..cols {
                if !m.at(i, j).is_zero() {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != r {
            m.swap_rows(r, pi);
            sign = -sign;
        }
        if pj != r {
            m.swap_cols(r, pj);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in r + 1..cols {
                let num = m.at(r, r) * m.at(i, j) - m.at(i, r) * m.at(r, j);
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                m.set(i, j, q);
            }
            m.set(i, r, BigInt::zero());
        }
        prev = m.at(r, r).clone();
        r += 1;
    }
    (r, sign)
}

/// Bareiss rank on machine integers with automatic promotion to `BigInt`
/// when an intermediate value would overflow. Hot path for the small
/// {-1,0,1} cochain matrices.
pub(crate) fn rank_i64(rows: usize, cols: usize, data: &[i64]) -> usize {
    assert_eq!(rows * cols, data.len());
    let mut m = data.to_vec();
    let at = |m: &Vec<i64>, i: usize, j: usize| m[i * cols + j];
    let mut prev: i64 = 1;
    let mut r = 0;
    while r < rows.min(cols) {
        let mut pivot = None;
        'search: for i in r..rows {
            for j in r..cols {
                if at(&m, i, j) != 0 {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != r {
            for j in 0..cols {
                m.swap(r * cols + j, pi * cols + j);
            }
        }
        if pj != r {
            for i in 0..rows {
                m.swap(i * cols + r, i * cols + pj);
            }
        }
        for i in r + 1..rows {
            for j in r + 1..cols {
                let p = at(&m, r, r).checked_mul(at(&m, i, j));
                let q = at(&m, i, r).checked_mul(at(&m, r, j));
                let num = match (p, q) {
                    (Some(p), Some(q)) => p.checked_sub(q),
                    _ => None,
                };
                match num {
                    Some(num) => m[i * cols + j] = num / prev,
                    None => {
                        // Overflow: redo the whole computation exactly.
                        let big = IntMatrix::from_rows(
                            (0..rows)
                                .map(|i| {
                                    (0..cols).map(|j| BigInt::from(data[i * cols + j])).collect()
                                })
                                .collect(),
                        );
                        return rank_q(&big);
                    }
                }
            }
            m[i * cols + r] = 0;
        }
        prev = at(&m, r, r);
        r += 1;
    }
    r
}

/// Some integral solution of `A x = b`, if one exists.
///
/// Goes through the Smith normal form, so rank-deficient and non-square
/// systems are handled uniformly; absence of a solution is a value, not an
/// error.
pub fn solve_integral(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "dimension mismatch");
    let s = snf(a);
    let c = s.u_inv.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols()];
    for i in 0..a.rows() {
        if i < s.rank {
            let d = s.d.at(i, i);
            let (q, r) = c[i].div_rem(d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return None;
        }
    }
    let x = s.v_inv.mul_vec(&y);
    debug_assert_eq!(a.mul_vec(&x), b);
    Some(x)
}

/// Basis of the integer kernel `{x : A x = 0}` (columns of `V^{-1}` past the
/// rank).
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = snf(a);
    (s.rank..a.cols())
        .map(|j| (0..a.cols()).map(|i| s.v_inv.at(i, j).clone()).collect())
        .collect()
}

/// Exact solution of a linear system over the rationals by Gaussian
/// elimination; `None` when inconsistent. Free variables are set to zero.
pub fn solve_rational(a: &IntMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    assert_eq!(a.rows(), b.len(), "dimension mismatch");
    let rows = a.rows();
    let cols = a.cols();
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<BigRational> =
                a.row(i).iter().map(|e| BigRational::from(e.clone())).collect();
            row.push(b[i].clone());
            row
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for j in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][j].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][j].clone();
        for x in m[r].iter_mut() {
            *x /= inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][j].is_zero() {
                let f = m[i][j].clone();
                for k in j..=cols {
                    let sub = &f * &m[r][k];
                    m[i][k] -= sub;
                }
            }
        }
        pivot_cols.push(j);
        r += 1;
        if r == rows {
            break;
        }
    }
    for row in m.iter().skip(r) {
        if !row[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (k, &j) in pivot_cols.iter().enumerate() {
        x[j] = m[k][cols].clone();
    }
    Some(x)
}

/// Normal-form coordinates of a vector in a finitely generated abelian
/// group `Z^r / im(A)`: free coordinates plus torsion residues.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalForm {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

/// Presentation of the cokernel `Z^rows / column-span(A)`.
///
/// Two vectors project to the same normal form exactly when they differ by
/// an element of the column span.
#[derive(Clone, Debug)]
pub struct CokernelPresentation {
    rows: usize,
    free_rows: Vec<usize>,
    torsion_rows: Vec<(usize, BigInt)>,
    u_inv: IntMatrix,
}

impl CokernelPresentation {
    pub fn ambient_rank(&self) -> usize {
        self.rows
    }

    pub fn free_rank(&self) -> usize {
        self.free_rows.len()
    }

    /// Torsion invariants `d > 1`, in divisibility order.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.torsion_rows.iter().map(|(_, d)| d.clone()).collect()
    }

    pub fn is_free(&self) -> bool {
        self.torsion_rows.is_empty()
    }

    pub fn project(&self, v: &[BigInt]) -> NormalForm {
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        let c = self.u_inv.mul_vec(v);
        NormalForm {
            free: self.free_rows.iter().map(|&i| c[i].clone()).collect(),
            torsion: self.torsion_rows.iter().map(|(i, d)| c[*i].mod_floor(d)).collect(),
        }
    }
}

/// Presentation of `Z^rows / column-span(A)` via the Smith normal form.
pub fn cokernel_map(a: &IntMatrix) -> CokernelPresentation {
    let s = snf(a);
    let mut free_rows: Vec<usize> = (s.rank..a.rows()).collect();
    let mut torsion_rows = Vec::new();
    for i in 0..s.rank {
        let d = s.d.at(i, i).clone();
        if d.is_zero() {
            // Zero invariant factors only appear past the rank by
            // construction, but keep the classification robust.
            free_rows.push(i);
        } else if !d.is_one() {
            torsion_rows.push((i, d));
        }
    }
    free_rows.sort_unstable();
    CokernelPresentation { rows: a.rows(), free_rows, torsion_rows, u_inv: s.u_inv }
}

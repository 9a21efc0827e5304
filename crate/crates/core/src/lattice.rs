//! Exact integer linear algebra: matrices over `BigInt`, Smith normal form,
//! cokernels and the affine sublattices cut out by integrality constraints.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::fan::StackyFan;
use crate::rational::frac_part;

/// Dense integer matrix with arbitrary-precision entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from row vectors. Panics if rows have unequal length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows_with_cols(rows, cols)
    }

    /// Like [`IntMatrix::from_rows`], but keeps the column count when there are no rows.
    pub fn from_rows_with_cols<T: Into<BigInt> + Clone>(rows: &[Vec<T>], cols: usize) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            entries.extend(r.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: rows.len(), cols, entries }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows*cols");
        IntMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.entries[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_rational_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + BigRational::from_integer(a.clone()) * b)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn pow(&self, mut e: u32) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        integer_rank(self.to_rows(), self.cols)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = self.get(src, c) * k;
            self.entries[dst * self.cols + c] += v;
        }
    }

    /// `col[dst] += k * col[src]`
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = self.get(r, src) * k;
            self.entries[r * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let idx = r * self.cols + c;
            self.entries[idx] = -&self.entries[idx];
        }
    }
}

/// Rank of an integer matrix given as rows, via Bareiss elimination.
pub(crate) fn integer_rank(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let rows = a.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][j] * &a[rank][c] - &a[r][c] * &a[rank][j];
                a[r][j] = v / &prev;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal with `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl SmithDecomposition {
    /// The diagonal entries of `D` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form by elementary operations.
///
/// The pivot is always the nonzero entry of least absolute value in the
/// remaining block, ties resolved in row-major order, so the output is a
/// deterministic function of the input.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pr, pc)) = smallest_entry(&d, t) else {
                return SmithDecomposition { u, v, d };
            };
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);

            let pivot = d.get(t, t).clone();
            let mut dirty = false;
            for r in t + 1..rows {
                if d.get(r, t).is_zero() {
                    continue;
                }
                let q = -(d.get(r, t).div_floor(&pivot));
                d.add_row_multiple(r, t, &q);
                u.add_row_multiple(r, t, &q);
                dirty |= !d.get(r, t).is_zero();
            }
            for c in t + 1..cols {
                if d.get(t, c).is_zero() {
                    continue;
                }
                let q = -(d.get(t, c).div_floor(&pivot));
                d.add_col_multiple(c, t, &q);
                v.add_col_multiple(c, t, &q);
                dirty |= !d.get(t, c).is_zero();
            }
            if dirty {
                continue;
            }
            // Row and column are clear; enforce divisibility of the remaining block.
            let offender = (t + 1..rows)
                .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
                .find(|&(r, c)| !d.get(r, c).is_multiple_of(&pivot));
            match offender {
                Some((r, _)) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, r, &one);
                    u.add_row_multiple(t, r, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithDecomposition { u, v, d }
}

fn smallest_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for r in t..d.rows() {
        for c in t..d.cols() {
            let e = d.get(r, c);
            if e.is_zero() {
                continue;
            }
            let a = e.abs();
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((r, c, a));
            }
        }
    }
    best.map(|(r, c, _)| (r, c))
}

/// Invariants of a finitely generated abelian group `Z^free_rank ⊕ ⨁ Z/t_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianGroup {
    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Order of the group, or `None` if it is infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }
}

/// The cokernel `Z^rows / im(A)` of `A: Z^cols → Z^rows`.
pub fn cokernel_invariants(a: &IntMatrix) -> AbelianGroup {
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    AbelianGroup {
        torsion: diag.into_iter().filter(|d| d > &BigInt::one()).collect(),
        free_rank: a.rows() - rank,
    }
}

/// Image in the torus `R^n / Z^n` of `{ m ∈ R^n : C·m ∈ Z^k }`.
///
/// The set is a finite union of translates of a subtorus: `basis` spans the
/// subtorus directions and `shifts` lists one representative per translate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSublattice {
    pub ambient_rank: usize,
    pub basis: Vec<Vec<BigInt>>,
    pub shifts: Vec<Vec<BigRational>>,
    constraints: IntMatrix,
}

impl AffineSublattice {
    /// Solves the integrality constraints `C·m ∈ Z^k` through the Smith form of `C`.
    pub fn from_constraints(c: &IntMatrix) -> Self {
        let n = c.cols();
        let snf = smith_normal_form(c);
        let diag = snf.diagonal();
        let rank = snf.rank();

        // With m = V·y the constraints decouple: d_i·y_i ∈ Z for i < rank.
        let mut shifts = vec![vec![BigRational::zero(); n]];
        for (i, d) in diag.iter().enumerate().take(rank) {
            let mut next = Vec::new();
            let steps = d.to_string().parse::<u64>().expect("invariant factor too large to enumerate");
            for s in &shifts {
                for j in 0..steps {
                    let mut y = s.clone();
                    y[i] = BigRational::new(BigInt::from(j), d.clone());
                    next.push(y);
                }
            }
            shifts = next;
        }
        let mut shifts: Vec<Vec<BigRational>> = shifts
            .into_iter()
            .map(|y| snf.v.mul_rational_vec(&y).iter().map(frac_part).collect())
            .collect();
        shifts.sort();
        shifts.dedup();

        let basis = (rank..n).map(|j| snf.v.column(j)).collect();
        AffineSublattice { ambient_rank: n, basis, shifts, constraints: c.clone() }
    }

    /// The whole torus of rank `n`.
    pub fn full_torus(n: usize) -> Self {
        Self::from_constraints(&IntMatrix::zeros(0, n))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn shift_count(&self) -> usize {
        self.shifts.len()
    }

    pub fn constraints(&self) -> &IntMatrix {
        &self.constraints
    }

    /// Whether the torus point `p` (any lift) lies in the set.
    pub fn contains_point(&self, p: &[BigRational]) -> bool {
        self.constraints.mul_rational_vec(p).iter().all(|v| v.is_integer())
    }

    /// Set containment `other ⊆ self`.
    pub fn contains(&self, other: &AffineSublattice) -> bool {
        if other.ambient_rank != self.ambient_rank {
            return false;
        }
        other.shifts.iter().all(|s| self.contains_point(s))
            && other.basis.iter().all(|b| self.constraints.mul_vec(b).iter().all(Zero::is_zero))
    }
}

/// The set `π(σ^{⊥β})`: points of the dual torus with `b_ρ⟨m, u_ρ⟩ ∈ Z` for every ray of the cone.
pub fn perp_beta_sublattice(fan: &StackyFan, cone_index: usize) -> AffineSublattice {
    let cone = &fan.cones()[cone_index];
    let rows: Vec<Vec<BigInt>> = cone
        .iter()
        .map(|&r| fan.rays()[r].iter().map(|x| BigInt::from(*x) * BigInt::from(fan.multiplicities()[r])).collect())
        .collect();
    AffineSublattice::from_constraints(&IntMatrix::from_rows_with_cols(&rows, fan.rank()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn check(a: &IntMatrix) -> SmithDecomposition {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u.det().abs(), BigInt::one());
        assert_eq!(s.v.det().abs(), BigInt::one());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if !w[0].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            } else {
                assert!(w[1].is_zero());
            }
        }
        s
    }

    #[test]
    fn upper_triangular() {
        let s = check(&m(&[&[1, 1], &[0, 2]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(2)]);
        for n in 1..12 {
            let s = check(&m(&[&[1, 1], &[0, n]]));
            assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(n)]);
        }
    }

    #[test]
    fn zero_matrix_is_fixed() {
        let s = check(&IntMatrix::zeros(2, 2));
        assert_eq!(s.u, IntMatrix::identity(2));
        assert_eq!(s.v, IntMatrix::identity(2));
        assert!(s.d.is_zero());
    }

    #[test]
    fn rectangular_and_divisibility() {
        let s = check(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let s = check(&m(&[&[6, 0], &[0, 4]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(12)]);
        check(&m(&[&[1, 0], &[1, 1], &[1, 2]]));
    }

    #[test]
    fn cokernels() {
        let an = m(&[&[1, 0], &[1, 5]]);
        assert_eq!(cokernel_invariants(&an), AbelianGroup { torsion: vec![BigInt::from(5)], free_rank: 0 });
        assert!(cokernel_invariants(&IntMatrix::identity(2)).is_trivial());
        let p1 = m(&[&[1], &[-1]]);
        assert_eq!(cokernel_invariants(&p1), AbelianGroup { torsion: vec![], free_rank: 1 });
    }

    #[test]
    fn det_and_rank() {
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), BigInt::from(-1));
        assert_eq!(m(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]]).det(), BigInt::from(4));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(IntMatrix::zeros(3, 0).rank(), 0);
    }

    #[test]
    fn sublattice_from_rays() {
        let l = AffineSublattice::from_constraints(&m(&[&[1, 4]]));
        assert_eq!(l.dim(), 1);
        assert_eq!(l.shift_count(), 1);
        let l = AffineSublattice::from_constraints(&m(&[&[1, 0], &[1, 4]]));
        assert_eq!(l.dim(), 0);
        assert_eq!(l.shift_count(), 4);
        let full = AffineSublattice::full_torus(2);
        assert_eq!(full.dim(), 2);
        assert_eq!(full.shifts, vec![vec![BigRational::zero(), BigRational::zero()]]);
        assert!(full.contains(&l));
        assert!(!l.contains(&full));
    }
}

//! Sparse exact matrices with rank/kernel/solve.
//!
//! Elimination is fraction-free (Bareiss): rows are cleared to a common
//! denominator first, then every update is `(pivot*a - b*c) / previous_pivot`
//! with the division exact by the Sylvester identity. Pivoting is
//! deterministic (first nonzero in row-major order) so every downstream
//! report is reproducible bit for bit.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimal ring interface used by the generic matrix type. Values are
/// self-describing (they know their own field / truncation order), so zero
/// and one are manufactured from an exemplar.
pub trait RingElem: Clone + PartialEq + std::fmt::Debug {
    fn r_add(&self, o: &Self) -> Self;
    fn r_sub(&self, o: &Self) -> Self;
    fn r_mul(&self, o: &Self) -> Self;
    fn r_neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
}

pub trait FieldElem: RingElem {
    fn f_inv(&self) -> Result<Self>;
    fn f_div(&self, o: &Self) -> Result<Self> {
        Ok(self.r_mul(&o.f_inv()?))
    }
}

/// Sparse matrix; only nonzero entries are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), T>,
}

pub type ExactMatrix = Mat<Scalar>;

impl<T: RingElem> Mat<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize, one: &T) -> Self {
        let mut m = Mat::new(n, n);
        for i in 0..n {
            m.entries.insert((i, i), one.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&T> {
        self.entries.get(&(r, c))
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: T) {
        if v.is_zero() {
            return;
        }
        match self.entries.remove(&(r, c)) {
            None => {
                self.entries.insert((r, c), v);
            }
            Some(old) => {
                let s = old.r_add(&v);
                if !s.is_zero() {
                    self.entries.insert((r, c), s);
                }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (r, c, v) in other.iter() {
            out.add_to(r, c, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Mat::new(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            out.entries.insert((r, c), v.r_neg());
        }
        out
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = Mat::new(self.rows, self.cols);
        if s.is_zero() {
            return out;
        }
        for (r, c, v) in self.iter() {
            let w = v.r_mul(s);
            if !w.is_zero() {
                out.entries.insert((r, c), w);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Mat::new(self.rows, other.cols);
        for (r, k, v) in self.iter() {
            // walk row k of `other`
            for (&(_, c), w) in other.entries.range((k, 0)..=(k, usize::MAX)) {
                out.add_to(r, c, v.r_mul(w));
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Mat::new(self.cols, self.rows);
        for (r, c, v) in self.iter() {
            out.entries.insert((c, r), v.clone());
        }
        out
    }

    pub fn map<U: RingElem>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        let mut out = Mat::new(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            let w = f(v);
            if !w.is_zero() {
                out.entries.insert((r, c), w);
            }
        }
        out
    }

    /// Column `c` as a rows x 1 matrix.
    pub fn col(&self, c: usize) -> Self {
        let mut out = Mat::new(self.rows, 1);
        for (&(r, cc), v) in &self.entries {
            if cc == c {
                out.entries.insert((r, 0), v.clone());
            }
        }
        out
    }

    pub fn from_dense(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        let mut out = Mat::new(rows, cols);
        for (i, v) in data.into_iter().enumerate() {
            if !v.is_zero() {
                out.entries.insert((i / cols, i % cols), v);
            }
        }
        out
    }

    pub fn to_dense(&self, zero: &T) -> Vec<Vec<T>> {
        let mut out = vec![vec![zero.clone(); self.cols]; self.rows];
        for (r, c, v) in self.iter() {
            out[r][c] = v.clone();
        }
        out
    }
}

// ---------------------------------------------------------------------------
// elimination
// ---------------------------------------------------------------------------

type SparseRow = Vec<(usize, Scalar)>;

fn row_get(row: &SparseRow, c: usize) -> Option<&Scalar> {
    row.binary_search_by_key(&c, |e| e.0)
        .ok()
        .map(|i| &row[i].1)
}

/// Clears denominators so that fraction-free updates stay small. Row scaling
/// by a nonzero constant changes neither rank, kernel, nor solvability.
fn clear_denominators(row: &mut SparseRow) {
    if row.is_empty() {
        return;
    }
    match &row[0].1 {
        Scalar::Rational(_) => {
            let mut l = BigInt::one();
            for (_, v) in row.iter() {
                if let Scalar::Rational(r) = v {
                    l = l.lcm(r.denom());
                }
            }
            if !l.is_one() {
                let f = BigRational::from(l);
                for (_, v) in row.iter_mut() {
                    if let Scalar::Rational(r) = v {
                        *v = Scalar::Rational(&*r * &f);
                    }
                }
            }
        }
        Scalar::Cyclotomic { .. } => {
            let mut l = BigInt::one();
            for (_, v) in row.iter() {
                if let Scalar::Cyclotomic { coeffs, .. } = v {
                    for c in coeffs {
                        l = l.lcm(c.denom());
                    }
                }
            }
            if !l.is_one() {
                let f = BigRational::from(l);
                for (_, v) in row.iter_mut() {
                    if let Scalar::Cyclotomic { n, coeffs } = v {
                        *v = Scalar::Cyclotomic {
                            n: *n,
                            coeffs: coeffs.iter().map(|c| c * &f).collect(),
                        };
                    }
                }
            }
        }
        Scalar::Prime { .. } => {}
    }
}

/// Row echelon data produced by the forward pass.
pub struct Echelon {
    pub rank: usize,
    /// (row-of-echelon, pivot column) in elimination order.
    pub pivots: Vec<(usize, usize)>,
    /// Echelon rows, fully reduced (each pivot is 1 and is the only nonzero
    /// entry in its column among echelon rows).
    pub rref_rows: Vec<SparseRow>,
    pub cols: usize,
}

/// Fraction-free forward elimination followed by normalization to RREF.
pub fn echelonize(m: &Mat<Scalar>) -> Echelon {
    let mut rows: Vec<SparseRow> = vec![Vec::new(); m.rows];
    for (r, c, v) in m.iter() {
        rows[r].push((c, v.clone()));
    }
    for row in rows.iter_mut() {
        clear_denominators(row);
    }

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; m.rows];
    let mut prev_pivot: Option<Scalar> = None;
    let mut echelon: Vec<SparseRow> = Vec::new();

    for col in 0..m.cols {
        // first nonzero in row-major order
        let mut pivot_row = None;
        for (r, row) in rows.iter().enumerate() {
            if !used[r] && row_get(row, col).is_some() {
                pivot_row = Some(r);
                break;
            }
        }
        let Some(pr) = pivot_row else { continue };
        used[pr] = true;
        let prow = rows[pr].clone();
        let pval = row_get(&prow, col).unwrap().clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if used[r] || row.is_empty() {
                continue;
            }
            let rc = row_get(row, col).cloned();
            let new_row = bareiss_update(row, &prow, &pval, rc.as_ref(), col, prev_pivot.as_ref());
            *row = new_row;
        }
        pivots.push((echelon.len(), col));
        echelon.push(prow);
        prev_pivot = Some(pval);
    }

    // normalize to reduced echelon form with field divisions
    let mut rref = echelon;
    for i in (0..rref.len()).rev() {
        let (_, pc) = pivots[i];
        let pv = row_get(&rref[i], pc).unwrap().clone();
        let inv = pv.inv().expect("pivot is invertible");
        for (_, v) in rref[i].iter_mut() {
            *v = v.mul(&inv);
        }
        // eliminate this pivot from earlier rows
        let prow = rref[i].clone();
        for j in 0..i {
            if let Some(f) = row_get(&rref[j], pc).cloned() {
                let updated = row_axpy(&rref[j], &prow, &f.neg());
                rref[j] = updated;
            }
        }
    }

    Echelon {
        rank: pivots.len(),
        pivots,
        rref_rows: rref,
        cols: m.cols,
    }
}

/// `row + f * prow` as a sparse merge.
fn row_axpy(row: &SparseRow, prow: &SparseRow, f: &Scalar) -> SparseRow {
    let mut out: SparseRow = Vec::with_capacity(row.len() + prow.len());
    let mut i = 0;
    let mut j = 0;
    while i < row.len() || j < prow.len() {
        if j >= prow.len() || (i < row.len() && row[i].0 < prow[j].0) {
            out.push(row[i].clone());
            i += 1;
        } else if i >= row.len() || prow[j].0 < row[i].0 {
            let v = prow[j].1.mul(f);
            if !v.is_zero() {
                out.push((prow[j].0, v));
            }
            j += 1;
        } else {
            let v = row[i].1.add(&prow[j].1.mul(f));
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// One Bareiss step on a single row: `(p * row - row[col] * prow) / prev`.
/// The division is exact; over a field it is carried out directly.
fn bareiss_update(
    row: &SparseRow,
    prow: &SparseRow,
    pval: &Scalar,
    rc: Option<&Scalar>,
    col: usize,
    prev: Option<&Scalar>,
) -> SparseRow {
    let mut out: SparseRow = Vec::with_capacity(row.len() + prow.len());
    let mut i = 0;
    let mut j = 0;
    let zero = pval.field().zero();
    let rc = rc.unwrap_or(&zero);
    while i < row.len() || j < prow.len() {
        let (c, a, b) = if j >= prow.len() || (i < row.len() && row[i].0 < prow[j].0) {
            let e = (row[i].0, row[i].1.clone(), zero.clone());
            i += 1;
            e
        } else if i >= row.len() || prow[j].0 < row[i].0 {
            let e = (prow[j].0, zero.clone(), prow[j].1.clone());
            j += 1;
            e
        } else {
            let e = (row[i].0, row[i].1.clone(), prow[j].1.clone());
            i += 1;
            j += 1;
            e
        };
        if c == col {
            continue; // eliminated position
        }
        let mut v = pval.mul(&a).sub(&rc.mul(&b));
        if let Some(pp) = prev {
            v = v.div(pp).expect("bareiss division is exact");
        }
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    out
}

/// Rank and a kernel basis in reduced echelon form (each basis vector has a
/// leading 1 in its own free column and 0 in the other free columns). The
/// field is passed explicitly so the kernel of an all-zero matrix still has
/// well-typed entries.
pub fn rank_kernel(m: &Mat<Scalar>, field: &crate::scalar::FieldSpec) -> (usize, Vec<Mat<Scalar>>) {
    let ech = echelonize(m);
    let kernel = kernel_from_echelon(&ech, field);
    (ech.rank, kernel)
}

fn kernel_from_echelon(ech: &Echelon, field: &crate::scalar::FieldSpec) -> Vec<Mat<Scalar>> {
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    let is_pivot = {
        let mut v = vec![false; ech.cols];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for f in 0..ech.cols {
        if is_pivot[f] {
            continue;
        }
        let mut v = Mat::new(ech.cols, 1);
        v.set(f, 0, field.one());
        for (i, &(_, pc)) in ech.pivots.iter().enumerate() {
            if let Some(x) = row_get(&ech.rref_rows[i], f) {
                v.set(pc, 0, x.neg());
            }
        }
        basis.push(v);
    }
    basis
}

/// Solves `M x = b` exactly; `None` when inconsistent. Free variables are set
/// to zero in echelon order, so the solution is deterministic.
pub fn solve(m: &Mat<Scalar>, b: &Mat<Scalar>) -> Result<Option<Mat<Scalar>>> {
    if b.rows() != m.rows() || b.cols() != 1 {
        return Err(Error::Dimension(format!(
            "solve: {}x{} vs rhs {}x{}",
            m.rows(),
            m.cols(),
            b.rows(),
            b.cols()
        )));
    }
    // augment
    let mut aug = Mat::new(m.rows(), m.cols() + 1);
    for (r, c, v) in m.iter() {
        aug.set(r, c, v.clone());
    }
    for (r, _, v) in b.iter() {
        aug.set(r, m.cols(), v.clone());
    }
    let ech = echelonize(&aug);
    // inconsistent iff some pivot sits in the rhs column
    if ech.pivots.iter().any(|&(_, c)| c == m.cols()) {
        return Ok(None);
    }
    let mut x = Mat::new(m.cols(), 1);
    for (i, &(_, pc)) in ech.pivots.iter().enumerate() {
        if let Some(v) = row_get(&ech.rref_rows[i], m.cols()) {
            x.set(pc, 0, v.clone());
        }
    }
    Ok(Some(x))
}

/// Inverse of a square invertible matrix (multi-RHS solve).
pub fn invert(m: &Mat<Scalar>) -> Result<Mat<Scalar>> {
    if m.rows() != m.cols() {
        return Err(Error::Dimension("invert: matrix not square".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Mat::new(0, 0));
    }
    let mut aug = Mat::new(n, 2 * n);
    let mut one: Option<Scalar> = None;
    for (r, c, v) in m.iter() {
        one.get_or_insert_with(|| v.field().one());
        aug.set(r, c, v.clone());
    }
    let one = one.ok_or(Error::NotInvertible)?;
    for i in 0..n {
        aug.set(i, n + i, one.clone());
    }
    let ech = echelonize(&aug);
    if ech.rank < n
        || ech
            .pivots
            .iter()
            .take(n)
            .any(|&(i, c)| c != ech.pivots[i].1 || c >= n)
    {
        return Err(Error::NotInvertible);
    }
    if ech.pivots.len() < n || ech.pivots[n - 1].1 >= n {
        return Err(Error::NotInvertible);
    }
    let mut out = Mat::new(n, n);
    for (i, &(_, pc)) in ech.pivots.iter().enumerate() {
        if pc >= n {
            break;
        }
        for (c, v) in &ech.rref_rows[i] {
            if *c >= n {
                out.set(pc, c - n, v.clone());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldSpec;

    fn mq(rows: usize, cols: usize, data: &[i64]) -> Mat<Scalar> {
        let f = FieldSpec::Rational;
        Mat::from_dense(rows, cols, data.iter().map(|&v| f.from_i64(v)).collect())
    }

    fn mf2(rows: usize, cols: usize, data: &[i64]) -> Mat<Scalar> {
        let f = FieldSpec::Prime(2);
        Mat::from_dense(rows, cols, data.iter().map(|&v| f.from_i64(v)).collect())
    }

    #[test]
    fn rank_one_kernel() {
        let m = mq(2, 2, &[1, 2, 2, 4]);
        let (rank, ker) = rank_kernel(&m, &FieldSpec::Rational);
        assert_eq!(rank, 1);
        assert_eq!(ker.len(), 1);
        // kernel basis (-2, 1)
        let f = FieldSpec::Rational;
        assert_eq!(ker[0].get(0, 0), Some(&f.from_i64(-2)));
        assert_eq!(ker[0].get(1, 0), Some(&f.from_i64(1)));
        assert!(m.mul(&ker[0]).is_zero());
    }

    #[test]
    fn rank_over_f2() {
        let m = mf2(2, 2, &[1, 1, 1, 1]);
        let (rank, ker) = rank_kernel(&m, &FieldSpec::Prime(2));
        assert_eq!(rank, 1);
        assert_eq!(ker.len(), 1);
        let f = FieldSpec::Prime(2);
        assert_eq!(ker[0].get(0, 0), Some(&f.one()));
        assert_eq!(ker[0].get(1, 0), Some(&f.one()));
    }

    #[test]
    fn identity_full_rank() {
        let f = FieldSpec::Rational;
        let m = Mat::identity(3, &f.one());
        let (rank, ker) = rank_kernel(&m, &FieldSpec::Rational);
        assert_eq!(rank, 3);
        assert!(ker.is_empty());
    }

    #[test]
    fn solve_identity() {
        let f = FieldSpec::Rational;
        let m = Mat::identity(2, &f.one());
        let b = mq(2, 1, &[3, 5]);
        let x = solve(&m, &b).unwrap().unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solve_consistent_rank_one() {
        let m = mq(2, 2, &[1, 2, 2, 4]);
        let b = mq(2, 1, &[1, 2]);
        let x = solve(&m, &b).unwrap().unwrap();
        // free variable zeroed: x = (1, 0)
        let f = FieldSpec::Rational;
        assert_eq!(x.get(0, 0), Some(&f.one()));
        assert_eq!(x.get(1, 0), None);
        assert_eq!(m.mul(&x), b);
    }

    #[test]
    fn solve_inconsistent() {
        let m = mq(2, 2, &[1, 2, 2, 4]);
        let b = mq(2, 1, &[1, 1]);
        assert!(solve(&m, &b).unwrap().is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let m = mq(2, 2, &[2, 1, 1, 1]);
        let inv = invert(&m).unwrap();
        let f = FieldSpec::Rational;
        assert_eq!(m.mul(&inv), Mat::identity(2, &f.one()));
    }

    #[test]
    fn kernel_vectors_annihilate() {
        // a 4x5 rational matrix with known dependencies
        let m = mq(
            4,
            5,
            &[
                1, 2, 3, 0, 1, //
                0, 1, 1, 1, 0, //
                1, 3, 4, 1, 1, //
                2, 4, 6, 0, 2,
            ],
        );
        let (rank, ker) = rank_kernel(&m, &FieldSpec::Rational);
        assert_eq!(rank + ker.len(), 5);
        for v in &ker {
            assert!(m.mul(v).is_zero());
        }
    }

    #[test]
    fn cyclotomic_elimination() {
        let f = FieldSpec::Cyclotomic(5);
        let z = f.zeta().unwrap();
        // [[z, 1], [z^2, z]] has rank 1
        let mut m = Mat::new(2, 2);
        m.set(0, 0, z.clone());
        m.set(0, 1, f.one());
        m.set(1, 0, z.mul(&z));
        m.set(1, 1, z.clone());
        let (rank, ker) = rank_kernel(&m, &f);
        assert_eq!(rank, 1);
        assert_eq!(ker.len(), 1);
        assert!(m.mul(&ker[0]).is_zero());
    }
}

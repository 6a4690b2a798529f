//! The deformation complex of a tensor category: spaces of natural
//! transformations between the left- and right-comb product functors,
//! coboundary matrices, cohomology with representatives, and cobounding.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::category::FusionDatum;
use crate::error::{Error, Result};
use crate::matrix::{echelonize, rank_kernel, solve, Mat};
use crate::scalar::Scalar;
use crate::tree::{channels, generalized_associator, Channel, ParenTree};

/// One basis label of the degree-n space: a simple tuple together with a
/// channel pair (source channel of the left comb, target channel of the
/// right comb) sharing the same total simple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisLabel {
    pub tuple: Vec<usize>,
    pub total: usize,
    pub src_ch: usize,
    pub tgt_ch: usize,
}

/// Ordered basis of a degree, optionally with the coboundary matrix out of
/// this degree.
#[derive(Clone, Debug)]
pub struct ComplexSlice {
    pub degree: usize,
    pub basis: Vec<BasisLabel>,
    pub matrix: Option<Mat<Scalar>>,
}

/// A cochain: component matrices (target channels x source channels) per
/// simple tuple; absent tuples are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub components: BTreeMap<Vec<usize>, Mat<Scalar>>,
}

impl Cochain {
    pub fn zero(degree: usize) -> Self {
        Cochain {
            degree,
            components: BTreeMap::new(),
        }
    }

    pub fn component(&self, tuple: &[usize]) -> Option<&Mat<Scalar>> {
        self.components.get(tuple)
    }

    pub fn set_component(&mut self, tuple: Vec<usize>, mat: Mat<Scalar>) {
        if mat.is_zero() {
            self.components.remove(&tuple);
        } else {
            self.components.insert(tuple, mat);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|m| m.is_zero())
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (t, m) in &other.components {
            let cur = match out.components.remove(t) {
                Some(c) => c.add(m),
                None => m.clone(),
            };
            if !cur.is_zero() {
                out.components.insert(t.clone(), cur);
            }
        }
        out
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cochain {
        Cochain {
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|(t, m)| (t.clone(), m.neg()))
                .collect(),
        }
    }
}

/// Default maximum degree: spaces are built through max_degree + 1 so the
/// top coboundary still has a target.
pub const DEFAULT_MAX_DEGREE: usize = 5;

/// Per-degree summary of the computed cohomology.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeReport {
    pub degree: usize,
    pub dim: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub h_dim: usize,
}

#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub degrees: Vec<DegreeReport>,
    /// representatives per degree, when requested
    pub representatives: BTreeMap<usize, Vec<Cochain>>,
}

/// The deformation complex of a fusion datum, with memoized bases and
/// coboundary matrices.
pub struct TensorComplex<'a> {
    pub datum: &'a FusionDatum,
    pub max_degree: usize,
    bases: HashMap<usize, Vec<BasisLabel>>,
    matrices: HashMap<usize, Mat<Scalar>>,
    channel_cache: HashMap<(ParenTree, Vec<usize>), Vec<Channel>>,
}

impl<'a> TensorComplex<'a> {
    pub fn new(datum: &'a FusionDatum) -> Self {
        Self::with_max_degree(datum, DEFAULT_MAX_DEGREE)
    }

    pub fn with_max_degree(datum: &'a FusionDatum, max_degree: usize) -> Self {
        TensorComplex {
            datum,
            max_degree,
            bases: HashMap::new(),
            matrices: HashMap::new(),
            channel_cache: HashMap::new(),
        }
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n < 1 || n > self.max_degree + 1 {
            return Err(Error::Degree(format!(
                "degree {n} outside 1..={}",
                self.max_degree + 1
            )));
        }
        Ok(())
    }

    fn chans(&mut self, tree: &ParenTree, tuple: &[usize]) -> &Vec<Channel> {
        let key = (tree.clone(), tuple.to_vec());
        if !self.channel_cache.contains_key(&key) {
            let c = channels(self.datum, tree, tuple);
            self.channel_cache.insert(key.clone(), c);
        }
        self.channel_cache.get(&key).unwrap()
    }

    /// Deterministic ordered basis of the degree-n space.
    pub fn basis(&mut self, n: usize) -> Result<&Vec<BasisLabel>> {
        self.check_degree(n)?;
        if !self.bases.contains_key(&n) {
            let r = self.datum.rank();
            let lc = ParenTree::left_comb(n);
            let rc = ParenTree::right_comb(n);
            let mut out = Vec::new();
            for tuple in tuples_lex(r, n) {
                let sc = self.chans(&lc, &tuple).clone();
                let tc = self.chans(&rc, &tuple).clone();
                for k in 0..r {
                    for (si, s) in sc.iter().enumerate() {
                        if s.total != k {
                            continue;
                        }
                        for (ti, t) in tc.iter().enumerate() {
                            if t.total != k {
                                continue;
                            }
                            out.push(BasisLabel {
                                tuple: tuple.clone(),
                                total: k,
                                src_ch: si,
                                tgt_ch: ti,
                            });
                        }
                    }
                }
            }
            self.bases.insert(n, out);
        }
        Ok(self.bases.get(&n).unwrap())
    }

    pub fn dim(&mut self, n: usize) -> Result<usize> {
        Ok(self.basis(n)?.len())
    }

    pub fn cochain_space(&mut self, n: usize) -> Result<ComplexSlice> {
        Ok(ComplexSlice {
            degree: n,
            basis: self.basis(n)?.clone(),
            matrix: None,
        })
    }

    /// The coboundary matrix from degree n to degree n + 1.
    pub fn coboundary_matrix(&mut self, n: usize) -> Result<&Mat<Scalar>> {
        self.check_degree(n)?;
        self.check_degree(n + 1)?;
        if !self.matrices.contains_key(&n) {
            let m = self.assemble_coboundary(n)?;
            self.matrices.insert(n, m);
        }
        Ok(self.matrices.get(&n).unwrap())
    }

    fn assemble_coboundary(&mut self, n: usize) -> Result<Mat<Scalar>> {
        let datum = self.datum;
        let r = datum.rank();
        let basis_in = self.basis(n)?.clone();
        let basis_out = self.basis(n + 1)?.clone();

        // column bookkeeping per input tuple
        let mut col_of: HashMap<(Vec<usize>, usize, usize), usize> = HashMap::new();
        for (c, l) in basis_in.iter().enumerate() {
            col_of.insert((l.tuple.clone(), l.src_ch, l.tgt_ch), c);
        }
        // input channel data per tuple
        let lc_n = ParenTree::left_comb(n);
        let rc_n = ParenTree::right_comb(n);
        let mut in_channels: HashMap<Vec<usize>, (Vec<Channel>, Vec<Channel>)> = HashMap::new();
        for tuple in tuples_lex(r, n) {
            let sc = self.chans(&lc_n, &tuple).clone();
            let tc = self.chans(&rc_n, &tuple).clone();
            in_channels.insert(tuple, (sc, tc));
        }

        // row offsets per output tuple (labels are sorted by tuple)
        let mut row_offset: HashMap<Vec<usize>, usize> = HashMap::new();
        for (i, l) in basis_out.iter().enumerate() {
            row_offset.entry(l.tuple.clone()).or_insert(i);
        }

        let out_tuples: Vec<Vec<usize>> = tuples_lex(r, n + 1).collect();
        let triplets: Vec<Vec<(usize, usize, Scalar)>> = out_tuples
            .par_iter()
            .map(|a| {
                term_contributions(datum, n, a, &col_of, &in_channels, &row_offset)
                    .expect("coboundary term assembly")
            })
            .collect();

        let mut m = Mat::new(basis_out.len(), basis_in.len());
        for chunk in triplets {
            for (row, col, v) in chunk {
                m.add_to(row, col, v);
            }
        }
        Ok(m)
    }

    /// Cochain -> coordinate vector in the degree basis.
    pub fn vectorize(&mut self, c: &Cochain) -> Result<Mat<Scalar>> {
        let basis = self.basis(c.degree)?.clone();
        let mut v = Mat::new(basis.len(), 1);
        for (i, l) in basis.iter().enumerate() {
            if let Some(m) = c.component(&l.tuple) {
                if let Some(x) = m.get(l.tgt_ch, l.src_ch) {
                    v.set(i, 0, x.clone());
                }
            }
        }
        // verify the cochain has no entries outside the graded basis
        let mut total: usize = 0;
        for m in c.components.values() {
            total += m.nnz();
        }
        if total != v.nnz() {
            return Err(Error::Validation(
                "cochain has entries between channels of different total simples".into(),
            ));
        }
        Ok(v)
    }

    pub fn devectorize(&mut self, v: &Mat<Scalar>, degree: usize) -> Result<Cochain> {
        let basis = self.basis(degree)?.clone();
        if v.rows() != basis.len() || v.cols() != 1 {
            return Err(Error::Dimension(
                "coordinate vector has wrong length".into(),
            ));
        }
        let lc = ParenTree::left_comb(degree);
        let rc = ParenTree::right_comb(degree);
        let mut out = Cochain::zero(degree);
        for (i, _, val) in v.iter() {
            let l = &basis[i];
            let dims = (
                self.chans(&rc, &l.tuple).len(),
                self.chans(&lc, &l.tuple).len(),
            );
            let entry = out
                .components
                .entry(l.tuple.clone())
                .or_insert_with(|| Mat::new(dims.0, dims.1));
            entry.add_to(l.tgt_ch, l.src_ch, val.clone());
        }
        out.components.retain(|_, m| !m.is_zero());
        Ok(out)
    }

    /// Applies the coboundary to a cochain.
    pub fn coboundary(&mut self, c: &Cochain) -> Result<Cochain> {
        let v = self.vectorize(c)?;
        let m = self.coboundary_matrix(c.degree)?.clone();
        let w = m.mul(&v);
        self.devectorize(&w, c.degree + 1)
    }

    pub fn is_closed(&mut self, c: &Cochain) -> Result<bool> {
        Ok(self.coboundary(c)?.is_zero())
    }

    /// Dimensions, ranks and representatives through `max_degree`.
    pub fn cohomology(&mut self, max_degree: usize, with_reps: bool) -> Result<CohomologyReport> {
        if max_degree > self.max_degree {
            return Err(Error::Degree(format!(
                "max degree {max_degree} exceeds configured {}",
                self.max_degree
            )));
        }
        let field = self.datum.field.clone();
        let mut degrees = Vec::new();
        let mut reps = BTreeMap::new();
        let mut prev_rank = 0usize; // rank of the incoming coboundary
        for n in 1..=max_degree {
            let dim = self.dim(n)?;
            let m = self.coboundary_matrix(n)?.clone();
            let (rank, kernel) = rank_kernel(&m, &field);
            let kernel_dim = dim - rank;
            let h_dim = kernel_dim - prev_rank;
            degrees.push(DegreeReport {
                degree: n,
                dim,
                rank,
                kernel_dim,
                h_dim,
            });
            if with_reps {
                let image_cols: Vec<Mat<Scalar>> = if n >= 2 {
                    let dm = self.coboundary_matrix(n - 1)?.clone();
                    (0..dm.cols()).map(|c| dm.col(c)).collect()
                } else {
                    Vec::new()
                };
                let rep_vecs = coset_representatives(&image_cols, &kernel, dim);
                let mut cochains = Vec::new();
                for v in rep_vecs {
                    cochains.push(self.devectorize(&v, n)?);
                }
                reps.insert(n, cochains);
            }
            prev_rank = rank;
        }
        Ok(CohomologyReport {
            degrees,
            representatives: reps,
        })
    }

    /// Finds phi with delta(phi) = b - a, diagnosing non-closed inputs
    /// first. Returns None when the classes differ.
    pub fn cobound(&mut self, a: &Cochain, b: &Cochain) -> Result<Option<Cochain>> {
        if a.degree != b.degree {
            return Err(Error::Dimension("cobound: degree mismatch".into()));
        }
        let n = a.degree;
        if !self.is_closed(a)? {
            return Err(Error::NotClosed(n));
        }
        if !self.is_closed(b)? {
            return Err(Error::NotClosed(n));
        }
        let diff = self.vectorize(&b.sub(a))?;
        if n == 1 {
            return Ok(if diff.is_zero() {
                Some(Cochain::zero(0))
            } else {
                None
            });
        }
        let m = self.coboundary_matrix(n - 1)?.clone();
        match solve(&m, &diff)? {
            None => Ok(None),
            Some(x) => Ok(Some(self.devectorize(&x, n - 1)?)),
        }
    }
}

/// Canonical coset representatives for kernel / image: reduce each kernel
/// vector against the echelonized image, then echelonize the reductions and
/// return the nonzero rows.
pub(crate) fn coset_representatives(
    image: &[Mat<Scalar>],
    kernel: &[Mat<Scalar>],
    dim: usize,
) -> Vec<Mat<Scalar>> {
    if kernel.is_empty() {
        return Vec::new();
    }
    // echelon basis of the image subspace, rows in a dim-column matrix
    let mut im_rows = Mat::new(image.len().max(1), dim);
    for (i, v) in image.iter().enumerate() {
        for (r, _, val) in v.iter() {
            im_rows.set(i, r, val.clone());
        }
    }
    let im_ech = echelonize(&im_rows);
    // reduce kernel vectors against the echelonized image
    let mut red_rows = Mat::new(kernel.len(), dim);
    for (i, v) in kernel.iter().enumerate() {
        let mut row: Vec<(usize, Scalar)> = v.iter().map(|(r, _, val)| (r, val.clone())).collect();
        for (pi, &(_, pc)) in im_ech.pivots.iter().enumerate() {
            let coeff = row.iter().find(|(c, _)| *c == pc).map(|(_, v)| v.clone());
            if let Some(f) = coeff {
                row = sparse_axpy(&row, &im_ech.rref_rows[pi], &f.neg());
            }
        }
        for (c, val) in row {
            red_rows.set(i, c, val);
        }
    }
    let red_ech = echelonize(&red_rows);
    red_ech
        .rref_rows
        .iter()
        .map(|row| {
            let mut v = Mat::new(dim, 1);
            for (c, val) in row {
                v.set(*c, 0, val.clone());
            }
            v
        })
        .collect()
}

fn sparse_axpy(
    row: &[(usize, Scalar)],
    prow: &[(usize, Scalar)],
    f: &Scalar,
) -> Vec<(usize, Scalar)> {
    let mut out = Vec::with_capacity(row.len() + prow.len());
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

/// Iterates all tuples of the given length over 0..r in lexicographic order.
pub fn tuples_lex(r: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = r
        .checked_pow(len as u32)
        .expect("tuple space fits in usize");
    (0..total).map(move |mut i| {
        let mut t = vec![0usize; len];
        for slot in (0..len).rev() {
            t[slot] = i % r;
            i /= r;
        }
        t
    })
}

/// All contributions of the coboundary terms at output tuple `a`, as sparse
/// triplets into the global matrix.
fn term_contributions(
    datum: &FusionDatum,
    n: usize,
    a: &[usize],
    col_of: &HashMap<(Vec<usize>, usize, usize), usize>,
    in_channels: &HashMap<Vec<usize>, (Vec<Channel>, Vec<Channel>)>,
    row_offset: &HashMap<Vec<usize>, usize>,
) -> Result<Vec<(usize, usize, Scalar)>> {
    let lc1 = ParenTree::left_comb(n + 1);
    let rc1 = ParenTree::right_comb(n + 1);
    let out_src = channels(datum, &lc1, a);
    let out_tgt = channels(datum, &rc1, a);
    // local row index per same-total channel pair, in basis enumeration order
    let mut rowmap: HashMap<(usize, usize), usize> = HashMap::new();
    {
        let mut idx = 0usize;
        for k in 0..datum.rank() {
            for (si, s) in out_src.iter().enumerate() {
                if s.total != k {
                    continue;
                }
                for (ti, t) in out_tgt.iter().enumerate() {
                    if t.total == k {
                        rowmap.insert((ti, si), idx);
                        idx += 1;
                    }
                }
            }
        }
    }
    let base_row = match row_offset.get(a) {
        Some(&b) => b,
        None => return Ok(Vec::new()), // no hom pairs at this tuple
    };
    let mut out: Vec<(usize, usize, Scalar)> = Vec::new();

    let emit = |l_mat: &Mat<Scalar>,
                r_mat: &Mat<Scalar>,
                t_fat: usize,
                s_fat: usize,
                col: usize,
                sign_neg: bool,
                out: &mut Vec<(usize, usize, Scalar)>| {
        // contribution = sign * outer(L[:, t_fat], R[s_fat, :])
        let lcol = l_mat.col(t_fat);
        for (t1, _, lv) in lcol.iter() {
            for (s1c, rv) in r_mat
                .iter()
                .filter(|(rr, _, _)| *rr == s_fat)
                .map(|(_, cc, v)| (cc, v))
            {
                if let Some(&lr) = rowmap.get(&(t1, s1c)).as_ref() {
                    let mut v = lv.mul(rv);
                    if sign_neg {
                        v = v.neg();
                    }
                    out.push((base_row + lr, col, v));
                }
            }
        }
    };

    // --- left prolongation term: 1_{a0} (x) f, sign +
    {
        let b = a[1..].to_vec();
        if let Some((in_src, in_tgt)) = in_channels.get(&b) {
            let src_tree = ParenTree::node(ParenTree::Leaf, ParenTree::left_comb(n));
            let tgt_tree = ParenTree::node(ParenTree::Leaf, ParenTree::right_comb(n));
            let r_mat = generalized_associator(datum, &lc1, &src_tree, a)?;
            let l_mat = generalized_associator(datum, &tgt_tree, &rc1, a)?;
            let fat_src = channels(datum, &src_tree, a);
            let fat_tgt = channels(datum, &tgt_tree, a);
            let smap = prolong_index(&fat_src, in_src);
            let tmap = prolong_index(&fat_tgt, in_tgt);
            for (si, s) in in_src.iter().enumerate() {
                for (ti, t) in in_tgt.iter().enumerate() {
                    if t.total != s.total {
                        continue;
                    }
                    let Some(&col) = col_of.get(&(b.clone(), si, ti)) else {
                        continue;
                    };
                    for k in 0..datum.rank() {
                        for mu in 0..datum.n(a[0], s.total, k) {
                            let s_fat = smap[&(si, k, mu)];
                            let t_fat = tmap[&(ti, k, mu)];
                            emit(&l_mat, &r_mat, t_fat, s_fat, col, false, &mut out);
                        }
                    }
                }
            }
        }
    }

    // --- merge terms: f at (.., a_i (x) a_{i+1}, ..), sign (-1)^{i+1}
    for i in 0..n {
        let pair = ParenTree::node(ParenTree::Leaf, ParenTree::Leaf);
        let src_tree = ParenTree::left_comb(n).replace_leaf(i, &pair);
        let tgt_tree = ParenTree::right_comb(n).replace_leaf(i, &pair);
        let r_mat = generalized_associator(datum, &lc1, &src_tree, a)?;
        let l_mat = generalized_associator(datum, &tgt_tree, &rc1, a)?;
        let fat_src = channels(datum, &src_tree, a);
        let fat_tgt = channels(datum, &tgt_tree, a);
        let src_pos = fattened_vertex_pos(&ParenTree::left_comb(n), i);
        let tgt_pos = fattened_vertex_pos(&ParenTree::right_comb(n), i);
        let smap = merge_index(&fat_src, src_pos);
        let tmap = merge_index(&fat_tgt, tgt_pos);
        let sign_neg = i % 2 == 0; // (-1)^{i+1} with i zero-based
        for m in 0..datum.rank() {
            if datum.n(a[i], a[i + 1], m) == 0 {
                continue;
            }
            let mut b = Vec::with_capacity(n);
            b.extend_from_slice(&a[..i]);
            b.push(m);
            b.extend_from_slice(&a[i + 2..]);
            let Some((in_src, in_tgt)) = in_channels.get(&b) else {
                continue;
            };
            for (si, s) in in_src.iter().enumerate() {
                for (ti, t) in in_tgt.iter().enumerate() {
                    if t.total != s.total {
                        continue;
                    }
                    let Some(&col) = col_of.get(&(b.clone(), si, ti)) else {
                        continue;
                    };
                    for mu in 0..datum.n(a[i], a[i + 1], m) {
                        let skey = (channel_key(s), m, mu);
                        let tkey = (channel_key(t), m, mu);
                        let s_fat = smap[&skey];
                        let t_fat = tmap[&tkey];
                        emit(&l_mat, &r_mat, t_fat, s_fat, col, sign_neg, &mut out);
                    }
                }
            }
        }
    }

    // --- right prolongation term: f (x) 1_{a_n}, sign (-1)^{n+1}
    {
        let b = a[..n].to_vec();
        if let Some((in_src, in_tgt)) = in_channels.get(&b) {
            let src_tree = ParenTree::node(ParenTree::left_comb(n), ParenTree::Leaf);
            let tgt_tree = ParenTree::node(ParenTree::right_comb(n), ParenTree::Leaf);
            let r_mat = generalized_associator(datum, &lc1, &src_tree, a)?;
            let l_mat = generalized_associator(datum, &tgt_tree, &rc1, a)?;
            let fat_src = channels(datum, &src_tree, a);
            let fat_tgt = channels(datum, &tgt_tree, a);
            let smap = prolong_index(&fat_src, in_src);
            let tmap = prolong_index(&fat_tgt, in_tgt);
            let sign_neg = n % 2 == 0; // (-1)^{n+1}
            for (si, s) in in_src.iter().enumerate() {
                for (ti, t) in in_tgt.iter().enumerate() {
                    if t.total != s.total {
                        continue;
                    }
                    let Some(&col) = col_of.get(&(b.clone(), si, ti)) else {
                        continue;
                    };
                    for k in 0..datum.rank() {
                        for mu in 0..datum.n(s.total, a[n], k) {
                            let s_fat = smap[&(si, k, mu)];
                            let t_fat = tmap[&(ti, k, mu)];
                            emit(&l_mat, &r_mat, t_fat, s_fat, col, sign_neg, &mut out);
                        }
                    }
                }
            }
        }
    }

    Ok(out)
}

fn channel_key(c: &Channel) -> (Vec<usize>, Vec<usize>, usize) {
    (c.labels.clone(), c.mults.clone(), c.total)
}

/// Index of fattened-tree channels by (inner channel index, root label/mult):
/// the prolonged tree Node(Leaf, inner) or Node(inner, Leaf) carries the
/// inner data in postorder positions 0..n_inner and the root last.
fn prolong_index(fat: &[Channel], inner: &[Channel]) -> HashMap<(usize, usize, usize), usize> {
    let n_inner = if fat.is_empty() {
        0
    } else {
        fat[0].labels.len() - 1
    };
    // inner labels determine the inner total, so labels + mults identify the
    // inner channel uniquely
    let mut inner_map: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
    for (i, c) in inner.iter().enumerate() {
        inner_map.insert((c.labels.clone(), c.mults.clone()), i);
    }
    let mut out = HashMap::new();
    for (fi, c) in fat.iter().enumerate() {
        let key = (c.labels[..n_inner].to_vec(), c.mults[..n_inner].to_vec());
        if let Some(&ii) = inner_map.get(&key) {
            out.insert((ii, c.labels[n_inner], c.mults[n_inner]), fi);
        }
    }
    out
}

/// Index of fattened-tree channels by (stripped inner key, vertex label,
/// vertex mult) for the merge terms.
fn merge_index(
    fat: &[Channel],
    pos: usize,
) -> HashMap<((Vec<usize>, Vec<usize>, usize), usize, usize), usize> {
    let mut out = HashMap::new();
    for (fi, c) in fat.iter().enumerate() {
        let labels: Vec<usize> = c
            .labels
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pos)
            .map(|(_, &v)| v)
            .collect();
        let mults: Vec<usize> = c
            .mults
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pos)
            .map(|(_, &v)| v)
            .collect();
        out.insert(((labels, mults, c.total), c.labels[pos], c.mults[pos]), fi);
    }
    out
}

/// Postorder position acquired by the vertex inserted at leaf `slot`.
fn fattened_vertex_pos(base: &ParenTree, slot: usize) -> usize {
    fn walk(t: &ParenTree, slot: usize, acc: &mut usize) -> Option<usize> {
        match t {
            ParenTree::Leaf => {
                if slot == 0 {
                    Some(*acc)
                } else {
                    None
                }
            }
            ParenTree::Node(l, r) => {
                let nl = l.leaves();
                if slot < nl {
                    walk(l, slot, acc)
                } else {
                    *acc += l.internal_nodes();
                    walk(r, slot - nl, acc)
                }
            }
        }
    }
    let mut acc = 0;
    walk(base, slot, &mut acc).expect("slot in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::gen_pointed;
    use crate::group::GroupTable;
    use crate::scalar::FieldSpec;

    fn z2_f2() -> FusionDatum {
        gen_pointed(&GroupTable::cyclic(2), &FieldSpec::Prime(2), None).unwrap()
    }

    #[test]
    fn basis_sizes_pointed() {
        let d = z2_f2();
        let mut cx = TensorComplex::new(&d);
        assert_eq!(cx.dim(1).unwrap(), 2);
        assert_eq!(cx.dim(2).unwrap(), 4);
        assert_eq!(cx.dim(3).unwrap(), 8);
    }

    #[test]
    fn delta_squared_zero_z2() {
        let d = z2_f2();
        let mut cx = TensorComplex::new(&d);
        for n in 1..=3 {
            let d1 = cx.coboundary_matrix(n).unwrap().clone();
            let d2 = cx.coboundary_matrix(n + 1).unwrap().clone();
            assert!(d2.mul(&d1).is_zero(), "delta^2 != 0 at degree {n}");
        }
    }

    #[test]
    fn product_cochain_is_two_cocycle() {
        // phi(g, h) = g*h over F2 is a 2-cocycle
        let d = z2_f2();
        let mut cx = TensorComplex::new(&d);
        let f = FieldSpec::Prime(2);
        let mut phi = Cochain::zero(2);
        let mut m = Mat::new(1, 1);
        m.set(0, 0, f.one());
        phi.set_component(vec![1, 1], m);
        assert!(cx.is_closed(&phi).unwrap());
    }

    #[test]
    fn identity_cochain_is_one_cocycle() {
        // psi(g) = g over F2: delta psi (g, h) = psi(h) + psi(g+h) + psi(g) = 0
        let d = z2_f2();
        let mut cx = TensorComplex::new(&d);
        let f = FieldSpec::Prime(2);
        let mut psi = Cochain::zero(1);
        let mut m = Mat::new(1, 1);
        m.set(0, 0, f.one());
        psi.set_component(vec![1], m);
        assert!(cx.is_closed(&psi).unwrap());
    }

    #[test]
    fn cohomology_z2_rational_vanishes() {
        let d = gen_pointed(&GroupTable::cyclic(2), &FieldSpec::Rational, None).unwrap();
        let mut cx = TensorComplex::new(&d);
        let rep = cx.cohomology(3, false).unwrap();
        for dr in &rep.degrees {
            assert_eq!(dr.h_dim, 0, "H^{} over Q", dr.degree);
        }
    }

    #[test]
    fn cohomology_z2_f2() {
        let d = z2_f2();
        let mut cx = TensorComplex::new(&d);
        let rep = cx.cohomology(3, true).unwrap();
        let h: Vec<usize> = rep.degrees.iter().map(|d| d.h_dim).collect();
        assert_eq!(h, vec![1, 1, 1]);
        // the degree-3 representative must be the class of g*h*k
        let reps = &rep.representatives[&3];
        assert_eq!(reps.len(), 1);
        let mut cx2 = TensorComplex::new(&d);
        assert!(cx2.is_closed(&reps[0]).unwrap());
    }

    #[test]
    fn cobound_trivial_and_nontrivial() {
        let d = z2_f2();
        let mut cx = TensorComplex::new(&d);
        let f = FieldSpec::Prime(2);
        // a == b
        let mut a = Cochain::zero(3);
        let mut m = Mat::new(1, 1);
        m.set(0, 0, f.one());
        a.set_component(vec![1, 1, 1], m);
        assert!(cx.is_closed(&a).unwrap());
        let phi = cx.cobound(&a, &a).unwrap().unwrap();
        assert!(phi.is_zero());
        // zero vs the nontrivial class: not equivalent
        let zero = Cochain::zero(3);
        assert!(cx.cobound(&zero, &a).unwrap().is_none());
    }
}

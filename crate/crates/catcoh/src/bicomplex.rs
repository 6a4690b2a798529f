//! The double complex of a bitensor category: bigraded spaces of natural
//! transformations, the two differentials, identity verification, total
//! cohomology, the boundary equations on the extended range, pushback
//! candidates and deformation-triple verification.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::category::BitensorDatum;
use crate::complex::tuples_lex;
use crate::error::{Error, Result};
use crate::matrix::{rank_kernel, Mat};
use crate::scalar::Scalar;
use crate::word::{
    append_left_comb_coproduct, append_right_comb_product, apply_move, commensuration,
    extract_normal_form, normalize, normalize_full, plan_matrix, word_f_std, word_g_std, Dag,
    MoveKind, Normalized, Pattern, VData, Vert, Wire,
};

/// One basis label of X^{i,j}: an input tuple with a channel pair of the
/// two standard functor words sharing the same output grading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiLabel {
    pub in_tuple: Vec<usize>,
    pub out_tuple: Vec<usize>,
    pub f_ch: usize,
    pub g_ch: usize,
}

#[derive(Clone, Debug)]
pub struct BiBasis {
    pub bidegree: (usize, usize),
    pub labels: Vec<BiLabel>,
}

/// A bigraded cochain: component matrices (target channels x source
/// channels, in the standard-word channel bases) per input tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct BiCochain {
    pub bidegree: (usize, usize),
    pub components: BTreeMap<Vec<usize>, Mat<Scalar>>,
}

impl BiCochain {
    pub fn zero(bidegree: (usize, usize)) -> Self {
        BiCochain {
            bidegree,
            components: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|m| m.is_zero())
    }
}

/// Identity-check outcome at one bidegree.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub bidegree: (usize, usize),
    pub tensor_squared_zero: bool,
    pub coprod_squared_zero: bool,
    pub anticommute: bool,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.tensor_squared_zero && self.coprod_squared_zero && self.anticommute
    }
}

#[derive(Clone, Debug)]
pub struct TripleCandidate {
    pub a: BiCochain,
    pub k: BiCochain,
    pub b: BiCochain,
}

impl TripleCandidate {
    pub fn zero() -> Self {
        TripleCandidate {
            a: BiCochain::zero((3, 1)),
            k: BiCochain::zero((2, 2)),
            b: BiCochain::zero((1, 3)),
        }
    }
}

/// Verdict of the four linearized coherence equations on a triple.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleVerdict {
    /// per equation: holds, with a witnessing output label index otherwise
    pub equations: Vec<(bool, Option<Vec<usize>>)>,
}

impl TripleVerdict {
    pub fn ok(&self) -> bool {
        self.equations.iter().all(|(b, _)| *b)
    }
}

#[derive(Clone, Debug)]
pub struct D1D2Report {
    pub which: &'static str,
    pub dim: usize,
    pub solutions: Vec<BiCochain>,
    pub pushbacks: Vec<(TripleCandidate, TripleVerdict)>,
}

/// Term shape shared by both differentials.
struct TermDags {
    src: Dag,
    tgt: Dag,
    src_inner: Vec<usize>,
    tgt_inner: Vec<usize>,
    src_outer: Vec<usize>,
    tgt_outer: Vec<usize>,
    inner_in_src: Vec<Wire>,
    inner_in_tgt: Vec<Wire>,
    inner_out_src: Vec<Wire>,
    inner_out_tgt: Vec<Wire>,
    negate: bool,
}

/// The double complex engine with memoized bases and matrices.
pub struct BiComplex<'a> {
    pub datum: &'a BitensorDatum,
    bases: HashMap<(usize, usize), BiBasis>,
    std_f: HashMap<(usize, usize), (Dag, Normalized)>,
    std_g: HashMap<(usize, usize), (Dag, Normalized)>,
    t_mats: HashMap<(usize, usize), Mat<Scalar>>,
    c_mats: HashMap<(usize, usize), Mat<Scalar>>,
}

impl<'a> BiComplex<'a> {
    pub fn new(datum: &'a BitensorDatum) -> Self {
        BiComplex {
            datum,
            bases: HashMap::new(),
            std_f: HashMap::new(),
            std_g: HashMap::new(),
            t_mats: HashMap::new(),
            c_mats: HashMap::new(),
        }
    }

    fn check_bidegree(&self, i: usize, j: usize) -> Result<()> {
        if i == 0 && j == 0 {
            return Err(Error::Degree("bidegree (0, 0) is excluded".into()));
        }
        if (i == 0 || j == 0) && !self.datum.is_biunital() {
            return Err(Error::NonBiunital);
        }
        Ok(())
    }

    fn std_words(&mut self, i: usize, j: usize) -> Result<()> {
        if self.std_f.contains_key(&(i, j)) {
            return Ok(());
        }
        let f = word_f_std(i, j);
        let g = word_g_std(i, j);
        let nf = normalize_full(&f)?;
        let ng = normalize_full(&g)?;
        if nf.form != ng.form {
            return Err(Error::NotCommensurable(
                nf.form.to_string(),
                ng.form.to_string(),
            ));
        }
        self.std_f.insert((i, j), (f, nf));
        self.std_g.insert((i, j), (g, ng));
        Ok(())
    }

    /// Basis of X^{i,j} in deterministic order.
    pub fn basis(&mut self, i: usize, j: usize) -> Result<&BiBasis> {
        self.check_bidegree(i, j)?;
        if !self.bases.contains_key(&(i, j)) {
            self.std_words(i, j)?;
            let fd = &self.std_f[&(i, j)].0;
            let gd = &self.std_g[&(i, j)].0;
            let r = self.datum.rank();
            let mut labels = Vec::new();
            for tuple in tuples_lex(r, i) {
                let fch = fd.channels(self.datum, &tuple);
                let gch = gd.channels(self.datum, &tuple);
                for (fi, fc) in fch.iter().enumerate() {
                    let fout = fd.out_tuple(fc, &tuple);
                    for (gi, gc) in gch.iter().enumerate() {
                        if gd.out_tuple(gc, &tuple) == fout {
                            labels.push(BiLabel {
                                in_tuple: tuple.clone(),
                                out_tuple: fout.clone(),
                                f_ch: fi,
                                g_ch: gi,
                            });
                        }
                    }
                }
            }
            self.bases.insert(
                (i, j),
                BiBasis {
                    bidegree: (i, j),
                    labels,
                },
            );
        }
        Ok(self.bases.get(&(i, j)).unwrap())
    }

    pub fn dim(&mut self, i: usize, j: usize) -> Result<usize> {
        Ok(self.basis(i, j)?.labels.len())
    }

    /// The input-raising differential X^{i,j} -> X^{i+1,j} (untwisted).
    pub fn diff_tensor_matrix(&mut self, i: usize, j: usize) -> Result<&Mat<Scalar>> {
        if !self.t_mats.contains_key(&(i, j)) {
            let m = self.assemble(i, j, true)?;
            self.t_mats.insert((i, j), m);
        }
        Ok(self.t_mats.get(&(i, j)).unwrap())
    }

    /// The output-raising differential X^{i,j} -> X^{i,j+1} (untwisted).
    pub fn diff_coprod_matrix(&mut self, i: usize, j: usize) -> Result<&Mat<Scalar>> {
        if !self.c_mats.contains_key(&(i, j)) {
            let m = self.assemble(i, j, false)?;
            self.c_mats.insert((i, j), m);
        }
        Ok(self.c_mats.get(&(i, j)).unwrap())
    }

    /// The output-raising differential with the Koszul sign (-1)^i baked in;
    /// this is the matrix stored in complex slices so that the three
    /// identities hold and the total differential squares to zero.
    pub fn slice_coprod_matrix(&mut self, i: usize, j: usize) -> Result<Mat<Scalar>> {
        let m = self.diff_coprod_matrix(i, j)?.clone();
        Ok(if i % 2 == 1 { m.neg() } else { m })
    }

    fn assemble(&mut self, i: usize, j: usize, raise_input: bool) -> Result<Mat<Scalar>> {
        let (i2, j2) = if raise_input { (i + 1, j) } else { (i, j + 1) };
        self.check_bidegree(i, j)?;
        self.check_bidegree(i2, j2)?;
        let in_basis = self.basis(i, j)?.labels.clone();
        let out_basis = self.basis(i2, j2)?.labels.clone();
        self.std_words(i, j)?;
        self.std_words(i2, j2)?;
        let datum = self.datum;

        let mut col_of: HashMap<(Vec<usize>, usize, usize), usize> = HashMap::new();
        for (c, l) in in_basis.iter().enumerate() {
            col_of.insert((l.in_tuple.clone(), l.f_ch, l.g_ch), c);
        }
        let mut row_offset: HashMap<Vec<usize>, usize> = HashMap::new();
        for (r, l) in out_basis.iter().enumerate() {
            row_offset.entry(l.in_tuple.clone()).or_insert(r);
        }

        let terms = if raise_input {
            build_terms_tensor(i, j)
        } else {
            build_terms_coprod(i, j)
        };
        // normalize everything once; plans are tuple-independent
        let std_src = &self.std_f[&(i2, j2)].1;
        let std_tgt = &self.std_g[&(i2, j2)].1;
        let inner_f = &self.std_f[&(i, j)].0;
        let inner_g = &self.std_g[&(i, j)].0;
        let mut norm_terms = Vec::new();
        for t in &terms {
            let ns = normalize_full(&t.src)?;
            let nt = normalize_full(&t.tgt)?;
            if ns.form != std_src.form || nt.form != std_tgt.form {
                return Err(Error::NotCommensurable(
                    ns.form.to_string(),
                    std_src.form.to_string(),
                ));
            }
            norm_terms.push((ns, nt));
        }

        let r = datum.rank();
        let out_tuples: Vec<Vec<usize>> = tuples_lex(r, i2).collect();
        let fd2 = &self.std_f[&(i2, j2)].0;
        let gd2 = &self.std_g[&(i2, j2)].0;
        let chunks: Vec<Vec<(usize, usize, Scalar)>> = out_tuples
            .par_iter()
            .map(|a| {
                assemble_at(
                    datum,
                    a,
                    &terms,
                    &norm_terms,
                    std_src,
                    std_tgt,
                    fd2,
                    gd2,
                    inner_f,
                    inner_g,
                    &col_of,
                    &row_offset,
                )
                .expect("differential term assembly")
            })
            .collect();
        let mut m = Mat::new(out_basis.len(), in_basis.len());
        for ch in chunks {
            for (r, c, v) in ch {
                m.add_to(r, c, v);
            }
        }
        Ok(m)
    }

    pub fn vectorize(&mut self, c: &BiCochain) -> Result<Mat<Scalar>> {
        let (i, j) = c.bidegree;
        let basis = self.basis(i, j)?.labels.clone();
        let mut v = Mat::new(basis.len(), 1);
        for (idx, l) in basis.iter().enumerate() {
            if let Some(m) = c.components.get(&l.in_tuple) {
                if let Some(x) = m.get(l.g_ch, l.f_ch) {
                    v.set(idx, 0, x.clone());
                }
            }
        }
        Ok(v)
    }

    pub fn devectorize(&mut self, v: &Mat<Scalar>, bidegree: (usize, usize)) -> Result<BiCochain> {
        let basis = self.basis(bidegree.0, bidegree.1)?.labels.clone();
        if v.rows() != basis.len() || v.cols() != 1 {
            return Err(Error::Dimension(
                "bicochain coordinate vector length".into(),
            ));
        }
        self.std_words(bidegree.0, bidegree.1)?;
        let fd = &self.std_f[&bidegree].0;
        let gd = &self.std_g[&bidegree].0;
        let datum = self.datum;
        let mut out = BiCochain::zero(bidegree);
        for (idx, _, val) in v.iter() {
            let l = &basis[idx];
            let rows = gd.channels(datum, &l.in_tuple).len();
            let cols = fd.channels(datum, &l.in_tuple).len();
            let entry = out
                .components
                .entry(l.in_tuple.clone())
                .or_insert_with(|| Mat::new(rows, cols));
            entry.add_to(l.g_ch, l.f_ch, val.clone());
        }
        out.components.retain(|_, m| !m.is_zero());
        Ok(out)
    }

    /// Applies the input-raising differential to a cochain.
    pub fn diff_tensor(&mut self, s: &BiCochain) -> Result<BiCochain> {
        let (i, j) = s.bidegree;
        let v = self.vectorize(s)?;
        let m = self.diff_tensor_matrix(i, j)?.clone();
        self.devectorize(&m.mul(&v), (i + 1, j))
    }

    /// Applies the output-raising differential to a cochain (untwisted).
    pub fn diff_coprod(&mut self, s: &BiCochain) -> Result<BiCochain> {
        let (i, j) = s.bidegree;
        let v = self.vectorize(s)?;
        let m = self.diff_coprod_matrix(i, j)?.clone();
        self.devectorize(&m.mul(&v), (i, j + 1))
    }

    /// Checks the three matrix identities at one bidegree (with the twisted
    /// coproduct differential).
    pub fn verify_at(&mut self, i: usize, j: usize) -> Result<IdentityReport> {
        let t0 = self.diff_tensor_matrix(i, j)?.clone();
        let t1 = self.diff_tensor_matrix(i + 1, j)?.clone();
        let c0 = self.slice_coprod_matrix(i, j)?;
        let c1 = self.slice_coprod_matrix(i, j + 1)?;
        let c_right = self.slice_coprod_matrix(i + 1, j)?;
        let t_up = self.diff_tensor_matrix(i, j + 1)?.clone();
        let tensor_squared_zero = t1.mul(&t0).is_zero();
        let coprod_squared_zero = c1.mul(&c0).is_zero();
        let anticommute = t_up.mul(&c0).add(&c_right.mul(&t0)).is_zero();
        Ok(IdentityReport {
            bidegree: (i, j),
            tensor_squared_zero,
            coprod_squared_zero,
            anticommute,
        })
    }

    /// Verifies all bidegrees in the rectangle (or the basic range when the
    /// datum is not biunital).
    pub fn verify_bicomplex(&mut self, max_i: usize, max_j: usize) -> Result<Vec<IdentityReport>> {
        let lo = usize::from(!self.datum.is_biunital());
        let mut out = Vec::new();
        for i in lo..=max_i {
            for j in lo..=max_j {
                if i == 0 && j == 0 {
                    continue;
                }
                out.push(self.verify_at(i, j)?);
            }
        }
        Ok(out)
    }

    /// Basic-complex total differential at total degree n (spaces indexed by
    /// i + j = n + 1, i, j >= 1, ordered by descending i).
    pub fn total_blocks(&self, n: usize) -> Vec<(usize, usize)> {
        (1..=n)
            .rev()
            .filter(|&i| n + 1 - i >= 1)
            .map(|i| (i, n + 1 - i))
            .collect()
    }

    pub fn total_dim(&mut self, n: usize) -> Result<usize> {
        let mut d = 0;
        for (i, j) in self.total_blocks(n) {
            d += self.dim(i, j)?;
        }
        Ok(d)
    }

    pub fn total_matrix(&mut self, n: usize) -> Result<Mat<Scalar>> {
        let src_blocks = self.total_blocks(n);
        let tgt_blocks = self.total_blocks(n + 1);
        let mut src_off = HashMap::new();
        let mut off = 0usize;
        for &(i, j) in &src_blocks {
            src_off.insert((i, j), off);
            off += self.dim(i, j)?;
        }
        let src_dim = off;
        let mut tgt_off = HashMap::new();
        let mut off = 0usize;
        for &(i, j) in &tgt_blocks {
            tgt_off.insert((i, j), off);
            off += self.dim(i, j)?;
        }
        let tgt_dim = off;
        let mut m = Mat::new(tgt_dim, src_dim);
        for &(i, j) in &src_blocks {
            let so = src_off[&(i, j)];
            let t = self.diff_tensor_matrix(i, j)?.clone();
            if let Some(&to) = tgt_off.get(&(i + 1, j)) {
                for (r, c, v) in t.iter() {
                    m.add_to(to + r, so + c, v.clone());
                }
            }
            let c_tw = self.slice_coprod_matrix(i, j)?;
            if let Some(&to) = tgt_off.get(&(i, j + 1)) {
                for (r, c, v) in c_tw.iter() {
                    m.add_to(to + r, so + c, v.clone());
                }
            }
        }
        Ok(m)
    }

    /// Dimensions of the basic-complex cohomology through `max_total`, with
    /// degree-3 representatives decomposed as triples.
    pub fn total_cohomology(&mut self, max_total: usize) -> Result<TotalReport> {
        let field = self.datum.base.field.clone();
        let mut dims = Vec::new();
        let mut prev_rank = 0usize;
        let mut triples = Vec::new();
        for n in 1..=max_total {
            let d = self.total_matrix(n)?;
            let dn = self.total_dim(n)?;
            // D^2 = 0 sanity
            let d_next = self.total_matrix(n + 1)?;
            if !d_next.mul(&d).is_zero() {
                return Err(Error::Validation(format!(
                    "total differential does not square to zero at degree {n}"
                )));
            }
            let (rank, kernel) = rank_kernel(&d, &field);
            let h = (dn - rank) - prev_rank;
            dims.push((n, dn, h));
            if n == 3 {
                let image: Vec<Mat<Scalar>> = if n >= 2 {
                    let dm = self.total_matrix(n - 1)?;
                    (0..dm.cols()).map(|c| dm.col(c)).collect()
                } else {
                    Vec::new()
                };
                let reps = crate::complex::coset_representatives(&image, &kernel, dn);
                for k in &reps {
                    triples.push(self.split_total3(k)?);
                }
            }
            prev_rank = rank;
        }
        Ok(TotalReport {
            degrees: dims,
            degree3_triples: triples,
        })
    }

    /// Splits a total-degree-3 coordinate vector into its (a, k, b) blocks.
    pub fn split_total3(&mut self, v: &Mat<Scalar>) -> Result<TripleCandidate> {
        let blocks = self.total_blocks(3);
        let mut off = 0usize;
        let mut parts = Vec::new();
        for (i, j) in blocks {
            let d = self.dim(i, j)?;
            let mut part = Mat::new(d, 1);
            for (r, _, val) in v.iter() {
                if r >= off && r < off + d {
                    part.set(r - off, 0, val.clone());
                }
            }
            parts.push(self.devectorize(&part, (i, j))?);
            off += d;
        }
        let b = parts.pop().unwrap();
        let k = parts.pop().unwrap();
        let a = parts.pop().unwrap();
        Ok(TripleCandidate { a, k, b })
    }

    /// The four linearized coherence equations for a triple.
    pub fn verify_triple(&mut self, t: &TripleCandidate) -> Result<TripleVerdict> {
        if t.a.bidegree != (3, 1) || t.k.bidegree != (2, 2) || t.b.bidegree != (1, 3) {
            return Err(Error::Degree(
                "triple bidegrees must be (3,1), (2,2), (1,3)".into(),
            ));
        }
        let va = self.vectorize(&t.a)?;
        let vk = self.vectorize(&t.k)?;
        let vb = self.vectorize(&t.b)?;
        let e1 = self.diff_tensor_matrix(3, 1)?.clone().mul(&va);
        let e2 = self
            .slice_coprod_matrix(3, 1)?
            .mul(&va)
            .add(&self.diff_tensor_matrix(2, 2)?.clone().mul(&vk));
        let e3 = self
            .slice_coprod_matrix(2, 2)?
            .mul(&vk)
            .add(&self.diff_tensor_matrix(1, 3)?.clone().mul(&vb));
        let e4 = self.slice_coprod_matrix(1, 3)?.mul(&vb);
        let mut equations = Vec::new();
        for (vec, bideg) in [(e1, (4, 1)), (e2, (3, 2)), (e3, (2, 3)), (e4, (1, 4))] {
            if vec.is_zero() {
                equations.push((true, None));
            } else {
                let row = vec.iter().next().map(|(r, _, _)| r).unwrap();
                let witness = self.basis(bideg.0, bideg.1)?.labels[row].in_tuple.clone();
                equations.push((false, Some(witness)));
            }
        }
        Ok(TripleVerdict { equations })
    }

    /// Kernel of the input-raising differential on X^{3,0}.
    pub fn solve_d1(&mut self) -> Result<D1D2Report> {
        self.check_bidegree(3, 0)?;
        let field = self.datum.base.field.clone();
        let m = self.diff_tensor_matrix(3, 0)?.clone();
        let (_, kernel) = rank_kernel(&m, &field);
        let mut solutions = Vec::new();
        let mut pushbacks = Vec::new();
        for v in &kernel {
            solutions.push(self.devectorize(v, (3, 0))?);
            let tc = self.pushback_d1(v)?;
            let verdict = self.verify_triple(&tc)?;
            pushbacks.push((tc, verdict));
        }
        Ok(D1D2Report {
            which: "d1",
            dim: kernel.len(),
            solutions,
            pushbacks,
        })
    }

    /// Kernel of the output-raising differential on X^{0,3}.
    pub fn solve_d2(&mut self) -> Result<D1D2Report> {
        self.check_bidegree(0, 3)?;
        let field = self.datum.base.field.clone();
        let m = self.diff_coprod_matrix(0, 3)?.clone();
        let (_, kernel) = rank_kernel(&m, &field);
        let mut solutions = Vec::new();
        let mut pushbacks = Vec::new();
        for v in &kernel {
            solutions.push(self.devectorize(v, (0, 3))?);
            let tc = self.pushback_d2(v)?;
            let verdict = self.verify_triple(&tc)?;
            pushbacks.push((tc, verdict));
        }
        Ok(D1D2Report {
            which: "d2",
            dim: kernel.len(),
            solutions,
            pushbacks,
        })
    }

    /// Edge map: move a boundary solution one step into the basic range with
    /// the complementary differential.
    pub fn pushback_d1(&mut self, s: &Mat<Scalar>) -> Result<TripleCandidate> {
        let m = self.diff_tensor_matrix(3, 0)?.clone();
        if !m.mul(s).is_zero() {
            return Err(Error::Validation("input does not solve d1".into()));
        }
        let a_vec = self.slice_coprod_matrix(3, 0)?.mul(s);
        Ok(TripleCandidate {
            a: self.devectorize(&a_vec, (3, 1))?,
            k: BiCochain::zero((2, 2)),
            b: BiCochain::zero((1, 3)),
        })
    }

    pub fn pushback_d2(&mut self, s: &Mat<Scalar>) -> Result<TripleCandidate> {
        let m = self.diff_coprod_matrix(0, 3)?.clone();
        if !m.mul(s).is_zero() {
            return Err(Error::Validation("input does not solve d2".into()));
        }
        let b_vec = self.diff_tensor_matrix(0, 3)?.clone().mul(s);
        Ok(TripleCandidate {
            a: BiCochain::zero((3, 1)),
            k: BiCochain::zero((2, 2)),
            b: self.devectorize(&b_vec, (1, 3))?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct TotalReport {
    /// (total degree, dimension, cohomology dimension)
    pub degrees: Vec<(usize, usize, usize)>,
    pub degree3_triples: Vec<TripleCandidate>,
}

// ---------------------------------------------------------------------------
// term construction
// ---------------------------------------------------------------------------

/// Appends the source-functor recipe (left-comb product, right-comb
/// coproduct) on the given wires; returns the output wires and the vids.
fn append_f_inner(verts: &mut Vec<Vert>, ws: &[Wire], j: usize) -> (Vec<Wire>, Vec<usize>) {
    let start = verts.len();
    let mut inner_verts = Vec::new();
    let base = crate::word::append_left_comb_product(verts, ws);
    let outs = crate::word::append_right_comb_coproduct(verts, base, j);
    inner_verts.extend(start..verts.len());
    (outs, inner_verts)
}

/// Appends the target-functor recipe (per-input left-comb coproducts, then
/// per-slot right-comb products).
fn append_g_inner(verts: &mut Vec<Vert>, ws: &[Wire], j: usize) -> (Vec<Wire>, Vec<usize>) {
    let start = verts.len();
    let mut cof: Vec<Vec<Wire>> = Vec::new();
    for &w in ws {
        cof.push(append_left_comb_coproduct(verts, w, j));
    }
    let mut outs = Vec::new();
    for r in 0..j {
        let leaves: Vec<Wire> = (0..ws.len()).map(|t| cof[t][r]).collect();
        outs.push(append_right_comb_product(verts, &leaves));
    }
    let inner_verts = (start..verts.len()).collect();
    (outs, inner_verts)
}

type InnerAppend = fn(&mut Vec<Vert>, &[Wire], usize) -> (Vec<Wire>, Vec<usize>);

/// Terms of the input-raising differential out of X^{i,j}.
fn build_terms_tensor(i: usize, j: usize) -> Vec<TermDags> {
    let i2 = i + 1;
    let mut terms = Vec::new();

    let make = |builder: &TermBuilder, negate: bool| make_term(builder, i2, negate);

    // leading term: burst the new first input and pair it slotwise
    terms.push(make(
        &|inner: InnerAppend, verts: &mut Vec<Vert>| {
            let cofs = append_left_comb_coproduct(verts, Wire::In(0), j);
            let ws: Vec<Wire> = (1..=i).map(Wire::In).collect();
            let (iouts, ivids) = inner(verts, &ws, j);
            let mut outs = Vec::new();
            for r in 0..j {
                verts.push(Vert::Tensor(cofs[r], iouts[r]));
                outs.push(Wire::TOut(verts.len() - 1));
            }
            (outs, ivids, ws, iouts)
        },
        false,
    ));

    // merge terms
    for s in 0..i {
        terms.push(make(
            &move |inner: InnerAppend, verts: &mut Vec<Vert>| {
                verts.push(Vert::Tensor(Wire::In(s), Wire::In(s + 1)));
                let merged = Wire::TOut(verts.len() - 1);
                let mut ws: Vec<Wire> = Vec::new();
                for t in 0..s {
                    ws.push(Wire::In(t));
                }
                ws.push(merged);
                for t in s + 2..i2 {
                    ws.push(Wire::In(t));
                }
                let (iouts, ivids) = inner(verts, &ws, j);
                (iouts.clone(), ivids, ws, iouts)
            },
            s % 2 == 0, // sign (-1)^{s+1}
        ));
    }

    // trailing term: burst the new last input
    terms.push(make(
        &|inner: InnerAppend, verts: &mut Vec<Vert>| {
            let cofs = append_left_comb_coproduct(verts, Wire::In(i2 - 1), j);
            let ws: Vec<Wire> = (0..i).map(Wire::In).collect();
            let (iouts, ivids) = inner(verts, &ws, j);
            let mut outs = Vec::new();
            for r in 0..j {
                verts.push(Vert::Tensor(iouts[r], cofs[r]));
                outs.push(Wire::TOut(verts.len() - 1));
            }
            (outs, ivids, ws, iouts)
        },
        i % 2 == 0, // sign (-1)^{i+1}
    ));

    terms
}

/// A term builder fills in the outer wiring around the inner word and
/// reports (outputs, inner vids, inner input wires, inner output wires).
type TermBuilder<'b> =
    dyn Fn(InnerAppend, &mut Vec<Vert>) -> (Vec<Wire>, Vec<usize>, Vec<Wire>, Vec<Wire>) + 'b;

/// Instantiates one term with both inner recipes and records the aligned
/// outer vertex lists.
fn make_term(builder: &TermBuilder, n_in: usize, negate: bool) -> TermDags {
    let mut sv = Vec::new();
    let (s_outs, s_inner, s_in, s_io) = builder(append_f_inner, &mut sv);
    let mut tv = Vec::new();
    let (t_outs, t_inner, t_in, t_io) = builder(append_g_inner, &mut tv);
    let src_outer: Vec<usize> = (0..sv.len()).filter(|v| !s_inner.contains(v)).collect();
    let tgt_outer: Vec<usize> = (0..tv.len()).filter(|v| !t_inner.contains(v)).collect();
    TermDags {
        src: Dag {
            n_in,
            verts: sv,
            outs: s_outs,
        },
        tgt: Dag {
            n_in,
            verts: tv,
            outs: t_outs,
        },
        src_inner: s_inner,
        tgt_inner: t_inner,
        src_outer,
        tgt_outer,
        inner_in_src: s_in,
        inner_in_tgt: t_in,
        inner_out_src: s_io,
        inner_out_tgt: t_io,
        negate,
    }
}

/// Terms of the output-raising differential out of X^{i,j}.
fn build_terms_coprod(i: usize, j: usize) -> Vec<TermDags> {
    let mut terms = Vec::new();

    let make = |builder: &TermBuilder, negate: bool| make_term(builder, i, negate);

    // leading term: split every input once; firsts multiply into slot 0
    terms.push(make(
        &|inner: InnerAppend, verts: &mut Vec<Vert>| {
            let mut firsts = Vec::new();
            let mut seconds = Vec::new();
            for t in 0..i {
                verts.push(Vert::Delta(Wire::In(t)));
                let d = verts.len() - 1;
                firsts.push(Wire::DOutL(d));
                seconds.push(Wire::DOutR(d));
            }
            let (iouts, ivids) = inner(verts, &seconds, j);
            let slot0 = append_right_comb_product(verts, &firsts);
            let mut outs = vec![slot0];
            outs.extend(iouts.iter().copied());
            (outs, ivids, seconds, iouts)
        },
        false,
    ));

    // middle terms: coproduct applied to output slot t-1
    for t in 1..=j {
        terms.push(make(
            &move |inner: InnerAppend, verts: &mut Vec<Vert>| {
                let ws: Vec<Wire> = (0..i).map(Wire::In).collect();
                let (iouts, ivids) = inner(verts, &ws, j);
                verts.push(Vert::Delta(iouts[t - 1]));
                let d = verts.len() - 1;
                let mut outs = Vec::new();
                outs.extend(iouts[..t - 1].iter().copied());
                outs.push(Wire::DOutL(d));
                outs.push(Wire::DOutR(d));
                outs.extend(iouts[t..].iter().copied());
                (outs, ivids, ws, iouts)
            },
            t % 2 == 1, // sign (-1)^t
        ));
    }

    // trailing term: seconds multiply into the last slot
    terms.push(make(
        &|inner: InnerAppend, verts: &mut Vec<Vert>| {
            let mut firsts = Vec::new();
            let mut seconds = Vec::new();
            for t in 0..i {
                verts.push(Vert::Delta(Wire::In(t)));
                let d = verts.len() - 1;
                firsts.push(Wire::DOutL(d));
                seconds.push(Wire::DOutR(d));
            }
            let (iouts, ivids) = inner(verts, &firsts, j);
            let slot_last = append_right_comb_product(verts, &seconds);
            let mut outs: Vec<Wire> = iouts.to_vec();
            outs.push(slot_last);
            (outs, ivids, firsts, iouts)
        },
        j % 2 == 0, // sign (-1)^{j+1}
    ));

    terms
}

// ---------------------------------------------------------------------------
// per-tuple assembly
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn assemble_at(
    datum: &BitensorDatum,
    a: &[usize],
    terms: &[TermDags],
    norm_terms: &[(Normalized, Normalized)],
    std_src: &Normalized,
    std_tgt: &Normalized,
    fd2: &Dag,
    gd2: &Dag,
    inner_f: &Dag,
    inner_g: &Dag,
    col_of: &HashMap<(Vec<usize>, usize, usize), usize>,
    row_offset: &HashMap<Vec<usize>, usize>,
) -> Result<Vec<(usize, usize, Scalar)>> {
    let Some(&base_row) = row_offset.get(a) else {
        return Ok(Vec::new());
    };
    // local row index per (f_ch, g_ch) of the output space at tuple a
    let f2ch = fd2.channels(datum, a);
    let g2ch = gd2.channels(datum, a);
    let mut rowmap: HashMap<(usize, usize), usize> = HashMap::new();
    {
        let mut idx = 0usize;
        for (fi, fc) in f2ch.iter().enumerate() {
            let fout = fd2.out_tuple(fc, a);
            for (gi, gc) in g2ch.iter().enumerate() {
                if gd2.out_tuple(gc, a) == fout {
                    rowmap.insert((fi, gi), idx);
                    idx += 1;
                }
            }
        }
    }
    let mut out = Vec::new();
    // caches of standalone inner channel index maps per inner tuple
    let mut f_inner_idx: HashMap<Vec<usize>, HashMap<Vec<VData>, usize>> = HashMap::new();
    let mut g_inner_idx: HashMap<Vec<usize>, HashMap<Vec<VData>, usize>> = HashMap::new();

    for (term, (ns, nt)) in terms.iter().zip(norm_terms) {
        let gamma_src = commensuration(datum, std_src, ns, a)?;
        let gamma_tgt = commensuration(datum, nt, std_tgt, a)?;
        let src_ch = term.src.channels(datum, a);
        let tgt_ch = term.tgt.channels(datum, a);
        // decompose target channels and group them
        type Key = (Vec<VData>, Vec<usize>, Vec<usize>);
        let mut tgt_groups: HashMap<Key, Vec<(usize, usize)>> = HashMap::new();
        for (ti, tc) in tgt_ch.iter().enumerate() {
            let outer: Vec<VData> = term.tgt_outer.iter().map(|&v| tc[v].clone()).collect();
            let aprime: Vec<usize> = term
                .inner_in_tgt
                .iter()
                .map(|&w| term.tgt.resolve(tc, w, a))
                .collect();
            let bprime: Vec<usize> = term
                .inner_out_tgt
                .iter()
                .map(|&w| term.tgt.resolve(tc, w, a))
                .collect();
            let inner_data: Vec<VData> = term.tgt_inner.iter().map(|&v| tc[v].clone()).collect();
            let gmap = g_inner_idx.entry(aprime.clone()).or_insert_with(|| {
                inner_g
                    .channels(datum, &aprime)
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| (c, i))
                    .collect()
            });
            let Some(&gi) = gmap.get(&inner_data) else {
                return Err(Error::Other("inner target channel not found".into()));
            };
            tgt_groups
                .entry((outer, aprime, bprime))
                .or_default()
                .push((ti, gi));
        }
        for (si, sc) in src_ch.iter().enumerate() {
            let outer: Vec<VData> = term.src_outer.iter().map(|&v| sc[v].clone()).collect();
            let aprime: Vec<usize> = term
                .inner_in_src
                .iter()
                .map(|&w| term.src.resolve(sc, w, a))
                .collect();
            let bprime: Vec<usize> = term
                .inner_out_src
                .iter()
                .map(|&w| term.src.resolve(sc, w, a))
                .collect();
            let inner_data: Vec<VData> = term.src_inner.iter().map(|&v| sc[v].clone()).collect();
            let fmap = f_inner_idx.entry(aprime.clone()).or_insert_with(|| {
                inner_f
                    .channels(datum, &aprime)
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| (c, i))
                    .collect()
            });
            let Some(&fi) = fmap.get(&inner_data) else {
                return Err(Error::Other("inner source channel not found".into()));
            };
            let Some(group) = tgt_groups.get(&(outer, aprime.clone(), bprime)) else {
                continue;
            };
            for &(ti, gi) in group {
                let Some(&col) = col_of.get(&(aprime.clone(), fi, gi)) else {
                    continue;
                };
                // contribution: outer(gamma_tgt[:, ti], gamma_src[si, :])
                let lcol = gamma_tgt.col(ti);
                for (r_out, _, lv) in lcol.iter() {
                    for (c_in, rv) in gamma_src
                        .iter()
                        .filter(|(rr, _, _)| *rr == si)
                        .map(|(_, cc, v)| (cc, v))
                    {
                        // r_out indexes G_std(i2,j2) channels, c_in F_std
                        let f_idx = c_in;
                        let g_idx = r_out;
                        // rows are (f, g) pairs
                        let Some(&lr) = rowmap.get(&(f_idx, g_idx)) else {
                            continue;
                        };
                        let mut v = lv.mul(rv);
                        if term.negate {
                            v = v.neg();
                        }
                        out.push((base_row + lr, col, v));
                    }
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// coherence validation battery
// ---------------------------------------------------------------------------

/// Compares the canonical normalization of a word against a route that
/// starts with a different admissible move; mismatching tuples returned.
fn two_route_check(
    datum: &BitensorDatum,
    dag: &Dag,
    alt_first: Pattern,
) -> Result<Vec<Vec<usize>>> {
    let canonical = normalize_full(dag)?;
    let first = apply_move(dag, alt_first);
    let rest = normalize(&first.after);
    let mut steps = vec![first];
    steps.extend(rest);
    let final_dag = steps.last().unwrap().after.clone();
    let (form, canon, map) = extract_normal_form(&final_dag)?;
    if form != canonical.form {
        return Err(Error::NotCommensurable(
            form.to_string(),
            canonical.form.to_string(),
        ));
    }
    let r = datum.rank();
    let mut failures = Vec::new();
    for tuple in tuples_lex(r, dag.n_in) {
        let m1 = canonical.matrix(datum, &tuple);
        let m2 = plan_matrix(datum, dag, &steps, &canon, &map, &tuple);
        if m1 != m2 {
            failures.push(tuple);
        }
    }
    Ok(failures)
}

/// Validates the coproduct-side coherence axioms by comparing independent
/// normalization routes on the defining words, plus the base pentagon.
pub fn validate_bitensor(datum: &BitensorDatum) -> Result<()> {
    datum.validate_structure()?;
    crate::tree::validate_fusion(&datum.base)?;

    // dual pentagon: two routes through the 4-fold coproduct comb
    {
        let mut verts = Vec::new();
        let outs = append_left_comb_coproduct(&mut verts, Wire::In(0), 4);
        let dag = Dag {
            n_in: 1,
            verts,
            outs,
        };
        let betas: Vec<usize> = dag
            .verts
            .iter()
            .enumerate()
            .filter(|(_, v)| matches!(v, Vert::Delta(Wire::DOutL(_))))
            .map(|(vid, _)| vid)
            .collect();
        if betas.len() >= 2 {
            let fails = two_route_check(
                datum,
                &dag,
                Pattern {
                    kind: MoveKind::Beta,
                    consumer: *betas.last().unwrap(),
                },
            )?;
            if let Some(t) = fails.first() {
                return Err(Error::Validation(format!(
                    "dual pentagon fails at simple {:?}",
                    t
                )));
            }
        }
    }

    // coherer hexagon: coproduct of a triple product, alternative route
    // re-associates first
    {
        let mut verts = vec![
            Vert::Tensor(Wire::In(0), Wire::In(1)),
            Vert::Tensor(Wire::TOut(0), Wire::In(2)),
            Vert::Delta(Wire::TOut(1)),
        ];
        let outs = vec![Wire::DOutL(2), Wire::DOutR(2)];
        let dag = Dag {
            n_in: 3,
            verts: std::mem::take(&mut verts),
            outs,
        };
        let fails = two_route_check(
            datum,
            &dag,
            Pattern {
                kind: MoveKind::Alpha,
                consumer: 1,
            },
        )?;
        if let Some(t) = fails.first() {
            return Err(Error::Validation(format!(
                "coherer coherence fails at simples {:?}",
                t
            )));
        }
    }

    // triangle through the unit: ((x I) y) via rho vs associator + lambda
    {
        let verts = vec![
            Vert::UnitI,
            Vert::Tensor(Wire::In(0), Wire::IOut(0)),
            Vert::Tensor(Wire::TOut(1), Wire::In(1)),
        ];
        let dag = Dag {
            n_in: 2,
            verts,
            outs: vec![Wire::TOut(2)],
        };
        let fails = two_route_check(
            datum,
            &dag,
            Pattern {
                kind: MoveKind::Alpha,
                consumer: 2,
            },
        )?;
        if let Some(t) = fails.first() {
            return Err(Error::Validation(format!(
                "unit triangle fails at simples {:?}",
                t
            )));
        }
    }

    if datum.is_biunital() {
        // counit multiplicativity across a triple product
        {
            let verts = vec![
                Vert::Tensor(Wire::In(0), Wire::In(1)),
                Vert::Tensor(Wire::TOut(0), Wire::In(2)),
                Vert::Counit(Wire::TOut(1)),
            ];
            let dag = Dag {
                n_in: 3,
                verts,
                outs: vec![],
            };
            let fails = two_route_check(
                datum,
                &dag,
                Pattern {
                    kind: MoveKind::Alpha,
                    consumer: 1,
                },
            )?;
            if let Some(t) = fails.first() {
                return Err(Error::Validation(format!(
                    "counit multiplicativity fails at simples {:?}",
                    t
                )));
            }
        }
        // counit against coassociativity: strip before or after the
        // co-associator move
        {
            let verts = vec![
                Vert::Delta(Wire::In(0)),
                Vert::Delta(Wire::DOutL(0)),
                Vert::Counit(Wire::DOutR(1)),
            ];
            let dag = Dag {
                n_in: 1,
                verts,
                outs: vec![Wire::DOutL(1), Wire::DOutR(0)],
            };
            let fails = two_route_check(
                datum,
                &dag,
                Pattern {
                    kind: MoveKind::Beta,
                    consumer: 1,
                },
            )?;
            if let Some(t) = fails.first() {
                return Err(Error::Validation(format!(
                    "counit coassociativity compatibility fails at {:?}",
                    t
                )));
            }
        }
        // coproduct of x (x) I: coherer + tau versus rho
        {
            let verts = vec![
                Vert::UnitI,
                Vert::Tensor(Wire::In(0), Wire::IOut(0)),
                Vert::Delta(Wire::TOut(1)),
            ];
            let dag = Dag {
                n_in: 1,
                verts,
                outs: vec![Wire::DOutL(2), Wire::DOutR(2)],
            };
            let fails = two_route_check(
                datum,
                &dag,
                Pattern {
                    kind: MoveKind::RhoStrip,
                    consumer: 1,
                },
            )?;
            if let Some(t) = fails.first() {
                return Err(Error::Validation(format!(
                    "coproduct unit compatibility fails at {:?}",
                    t
                )));
            }
        }
        // counit of x (x) I: counit multiplicativity + eta versus rho
        {
            let verts = vec![
                Vert::UnitI,
                Vert::Tensor(Wire::In(0), Wire::IOut(0)),
                Vert::Counit(Wire::TOut(1)),
            ];
            let dag = Dag {
                n_in: 1,
                verts,
                outs: vec![],
            };
            let fails = two_route_check(
                datum,
                &dag,
                Pattern {
                    kind: MoveKind::RhoStrip,
                    consumer: 1,
                },
            )?;
            if let Some(t) = fails.first() {
                return Err(Error::Validation(format!(
                    "counit unit compatibility fails at {:?}",
                    t
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{gen_function_bitensor, gen_grouplike_bitensor};
    use crate::group::GroupTable;
    use crate::scalar::FieldSpec;

    #[test]
    fn grouplike_dims() {
        let d = gen_grouplike_bitensor(&GroupTable::cyclic(2), &FieldSpec::Rational).unwrap();
        let mut bx = BiComplex::new(&d);
        for j in 1..=3 {
            assert_eq!(bx.dim(3, j).unwrap(), 8, "X^(3,{j})");
        }
        assert_eq!(bx.dim(3, 0).unwrap(), 8, "X^(3,0)");
    }

    #[test]
    fn trivial_group_lines() {
        let d = gen_grouplike_bitensor(&GroupTable::trivial(), &FieldSpec::Rational).unwrap();
        let mut bx = BiComplex::new(&d);
        for i in 0..=3 {
            for j in 0..=3 {
                if i == 0 && j == 0 {
                    continue;
                }
                assert_eq!(bx.dim(i, j).unwrap(), 1, "({i},{j})");
            }
        }
    }

    #[test]
    fn trivial_group_coprod_scalar() {
        // the output-raising differential is multiplication by the
        // alternating sum: 0 for even j, 1 for odd j
        let d = gen_grouplike_bitensor(&GroupTable::trivial(), &FieldSpec::Rational).unwrap();
        let mut bx = BiComplex::new(&d);
        for j in 1..=4 {
            let m = bx.diff_coprod_matrix(1, j).unwrap().clone();
            let expect_zero = j % 2 == 0;
            assert_eq!(m.is_zero(), expect_zero, "coprod at (1,{j})");
        }
    }

    #[test]
    fn grouplike_identities_small() {
        let d = gen_grouplike_bitensor(&GroupTable::cyclic(2), &FieldSpec::Prime(2)).unwrap();
        let mut bx = BiComplex::new(&d);
        for i in 0..=2 {
            for j in 0..=2 {
                if i == 0 && j == 0 {
                    continue;
                }
                let rep = bx.verify_at(i, j).unwrap();
                assert!(rep.ok(), "identities at ({i},{j}): {rep:?}");
            }
        }
    }

    #[test]
    fn function_bitensor_identities_small() {
        let d = gen_function_bitensor(&GroupTable::cyclic(2), &FieldSpec::Rational).unwrap();
        let mut bx = BiComplex::new(&d);
        for i in 0..=2 {
            for j in 0..=2 {
                if i == 0 && j == 0 {
                    continue;
                }
                let rep = bx.verify_at(i, j).unwrap();
                assert!(rep.ok(), "identities at ({i},{j}): {rep:?}");
            }
        }
    }

    #[test]
    fn grouplike_reduction_matches_tensor_complex() {
        use crate::complex::TensorComplex;
        for group in [GroupTable::cyclic(2), GroupTable::cyclic(3)] {
            let d = gen_grouplike_bitensor(&group, &FieldSpec::Rational).unwrap();
            let mut bx = BiComplex::new(&d);
            let mut cx = TensorComplex::new(&d.base);
            for i in 1..=3 {
                let bt = bx.diff_tensor_matrix(i, 1).unwrap().clone();
                let ct = cx.coboundary_matrix(i).unwrap().clone();
                assert_eq!(bt, ct, "group order {} degree {i}", group.order());
            }
        }
    }

    #[test]
    fn d1_solutions_z2_f2() {
        let d = gen_grouplike_bitensor(&GroupTable::cyclic(2), &FieldSpec::Prime(2)).unwrap();
        let mut bx = BiComplex::new(&d);
        let rep = bx.solve_d1().unwrap();
        assert_eq!(rep.dim, 3, "Z^3(Z/2; F2)");
        for (_, verdict) in &rep.pushbacks {
            assert!(verdict.ok(), "pushback candidate must verify");
        }
    }

    #[test]
    fn validate_generated_bitensor_data() {
        for g in [GroupTable::cyclic(2), GroupTable::cyclic(3)] {
            let d = gen_grouplike_bitensor(&g, &FieldSpec::Rational).unwrap();
            validate_bitensor(&d).unwrap();
            let f = gen_function_bitensor(&g, &FieldSpec::Rational).unwrap();
            validate_bitensor(&f).unwrap();
        }
    }

    #[test]
    fn total_cohomology_runs_trivial() {
        let d = gen_grouplike_bitensor(&GroupTable::trivial(), &FieldSpec::Rational).unwrap();
        let mut bx = BiComplex::new(&d);
        let rep = bx.total_cohomology(3).unwrap();
        assert_eq!(rep.degrees.len(), 3);
        for t in &rep.degree3_triples {
            assert!(bx.verify_triple(t).unwrap().ok());
        }
    }
}

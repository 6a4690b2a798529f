//! Skeletal tensor and bitensor category data: simples, fusion
//! multiplicities, associator blocks, coproduct data, and the generators for
//! the group-based families.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::matrix::{ExactMatrix, Mat};
use crate::scalar::{FieldSpec, Scalar};

/// Unit object: either a simple, or a multiplicity vector over the simples.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitSpec {
    Simple(usize),
    Sum(Vec<usize>),
}

impl UnitSpec {
    pub fn mults(&self, n_simples: usize) -> Vec<usize> {
        match self {
            UnitSpec::Simple(i) => {
                let mut v = vec![0; n_simples];
                v[*i] = 1;
                v
            }
            UnitSpec::Sum(v) => v.clone(),
        }
    }

    pub fn as_simple(&self) -> Option<usize> {
        match self {
            UnitSpec::Simple(i) => Some(*i),
            UnitSpec::Sum(v) => {
                let nz: Vec<usize> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m > 0)
                    .map(|(i, _)| i)
                    .collect();
                if nz.len() == 1 && v[nz[0]] == 1 {
                    Some(nz[0])
                } else {
                    None
                }
            }
        }
    }
}

/// Associator blocks F^{ijk}_l, keyed by the four simple indices.
///
/// The stored matrix is the matrix of the structural isomorphism
/// (i x j) x k -> i x (j x k) acting on splitting channels: columns are
/// indexed by left-tree channels (m, mu, nu) and rows by right-tree channels
/// (n, rho, sigma), both in lexicographic order. Missing blocks mean the
/// identity in the index-aligned bases.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssociatorTable {
    pub blocks: BTreeMap<(usize, usize, usize, usize), ExactMatrix>,
}

/// Left-tree channels (m, mu, nu) of Hom(l, (i x j) x k), lexicographic.
pub fn left3_channels(
    fusion: &[Vec<Vec<usize>>],
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for m in 0..fusion.len() {
        for mu in 0..fusion[i][j][m] {
            for nu in 0..fusion[m][k][l] {
                out.push((m, mu, nu));
            }
        }
    }
    out
}

/// Right-tree channels (n, rho, sigma) of Hom(l, i x (j x k)), lexicographic.
pub fn right3_channels(
    fusion: &[Vec<Vec<usize>>],
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for n in 0..fusion.len() {
        for rho in 0..fusion[j][k][n] {
            for sigma in 0..fusion[i][n][l] {
                out.push((n, rho, sigma));
            }
        }
    }
    out
}

/// Skeletal tensor category datum.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionDatum {
    pub field: FieldSpec,
    pub simples: Vec<String>,
    pub unit: UnitSpec,
    /// fusion[i][j][k] = multiplicity of simple k in i x j
    pub fusion: Vec<Vec<Vec<usize>>>,
    pub f_table: AssociatorTable,
    pub unit_iso: Option<UnitIso>,
}

/// Unit isomorphism scalars rho_i : i x 1 -> i and lambda_i : 1 x i -> i.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitIso {
    pub rho: Vec<Scalar>,
    pub lambda: Vec<Scalar>,
}

impl FusionDatum {
    pub fn rank(&self) -> usize {
        self.simples.len()
    }

    pub fn n(&self, i: usize, j: usize, k: usize) -> usize {
        self.fusion[i][j][k]
    }

    /// Associator block for the simple quadruple; identity when absent.
    pub fn f_block(&self, i: usize, j: usize, k: usize, l: usize) -> ExactMatrix {
        let left = left3_channels(&self.fusion, i, j, k, l);
        let right = right3_channels(&self.fusion, i, j, k, l);
        if let Some(b) = self.f_table.blocks.get(&(i, j, k, l)) {
            return b.clone();
        }
        assert_eq!(
            left.len(),
            right.len(),
            "cannot default a non-square associator block to the identity"
        );
        Mat::identity(left.len(), &self.field.one())
    }

    /// Multiplicity vector of simples in the iterated product of `tuple`
    /// (any parenthesization; the fusion ring is associative).
    pub fn product_mults(&self, tuple: &[usize]) -> Vec<usize> {
        let r = self.rank();
        if tuple.is_empty() {
            return self.unit.mults(r);
        }
        let mut acc = vec![0usize; r];
        acc[tuple[0]] = 1;
        for &t in &tuple[1..] {
            let mut next = vec![0usize; r];
            for (m, &mult) in acc.iter().enumerate() {
                if mult == 0 {
                    continue;
                }
                for (k, row) in next.iter_mut().enumerate() {
                    *row += mult * self.fusion[m][t][k];
                }
            }
            acc = next;
        }
        acc
    }

    /// Structural checks that do not involve the associator: index ranges,
    /// fusion-ring associativity, and unit laws.
    pub fn validate_structure(&self) -> Result<()> {
        self.field.validate()?;
        let r = self.rank();
        if r == 0 {
            return Err(Error::Validation(
                "category needs at least one simple".into(),
            ));
        }
        if self.fusion.len() != r
            || self
                .fusion
                .iter()
                .any(|p| p.len() != r || p.iter().any(|q| q.len() != r))
        {
            return Err(Error::Validation("fusion tensor has wrong shape".into()));
        }
        // ring associativity
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let lhs: usize = (0..r)
                            .map(|m| self.fusion[i][j][m] * self.fusion[m][k][l])
                            .sum();
                        let rhs: usize = (0..r)
                            .map(|n| self.fusion[j][k][n] * self.fusion[i][n][l])
                            .sum();
                        if lhs != rhs {
                            return Err(Error::Validation(format!(
                                "fusion ring not associative at ({i}, {j}, {k}, {l})"
                            )));
                        }
                    }
                }
            }
        }
        // unit laws
        let u = self.unit.mults(r);
        if u.len() != r {
            return Err(Error::Validation(
                "unit multiplicity vector has wrong length".into(),
            ));
        }
        if let Some(e) = self.unit.as_simple() {
            for j in 0..r {
                for k in 0..r {
                    let want = usize::from(j == k);
                    if self.fusion[e][j][k] != want || self.fusion[j][e][k] != want {
                        return Err(Error::Validation(format!(
                            "unit law fails: N[{e}][{j}][{k}] or N[{j}][{e}][{k}]"
                        )));
                    }
                }
            }
        } else {
            // non-simple unit: x (x) I = x = I (x) x as multiplicity vectors
            for x in 0..r {
                for a in 0..r {
                    let right: usize = (0..r).map(|b| self.fusion[x][b][a] * u[b]).sum();
                    let left: usize = (0..r).map(|b| u[b] * self.fusion[b][x][a]).sum();
                    let want = usize::from(a == x);
                    if right != want || left != want {
                        return Err(Error::Validation(format!(
                            "non-simple unit law fails at simple {x}"
                        )));
                    }
                }
            }
        }
        // block shapes
        for (&(i, j, k, l), b) in &self.f_table.blocks {
            if i >= r || j >= r || k >= r || l >= r {
                return Err(Error::Validation(
                    "associator block index out of range".into(),
                ));
            }
            let lc = left3_channels(&self.fusion, i, j, k, l).len();
            let rc = right3_channels(&self.fusion, i, j, k, l).len();
            if b.rows() != rc || b.cols() != lc {
                return Err(Error::Validation(format!(
                    "associator block ({i},{j},{k},{l}) has shape {}x{}, expected {rc}x{lc}",
                    b.rows(),
                    b.cols()
                )));
            }
            for (_, _, v) in b.iter() {
                if v.field() != self.field {
                    return Err(Error::FieldMismatch(
                        v.field().to_string(),
                        self.field.to_string(),
                    ));
                }
            }
        }
        if let Some(iso) = &self.unit_iso {
            if iso.rho.len() != r || iso.lambda.len() != r {
                return Err(Error::Validation(
                    "unit isomorphism tables have wrong length".into(),
                ));
            }
            if iso.rho.iter().chain(iso.lambda.iter()).any(|s| s.is_zero()) {
                return Err(Error::Validation(
                    "unit isomorphism scalars must be nonzero".into(),
                ));
            }
        }
        Ok(())
    }

    /// Predicted dimension of the degree-n space of natural transformations,
    /// computed from multiplicities alone.
    pub fn nat_dim(&self, n: usize) -> usize {
        let r = self.rank();
        let mut total = 0usize;
        let mut tuple = vec![0usize; n];
        loop {
            let mults = self.product_mults(&tuple);
            total += mults.iter().map(|&m| m * m).sum::<usize>();
            // advance odometer
            let mut pos = n;
            loop {
                if pos == 0 {
                    return total;
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < r {
                    break;
                }
                tuple[pos] = 0;
            }
        }
    }
}

/// Structural summary: predicted dimensions per degree.
#[derive(Clone, Debug, PartialEq)]
pub struct DimsReport {
    pub degrees: Vec<(usize, usize)>,
}

pub fn dims_report(datum: &FusionDatum, max_degree: usize) -> DimsReport {
    DimsReport {
        degrees: (1..=max_degree).map(|n| (n, datum.nat_dim(n))).collect(),
    }
}

// ---------------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------------

/// Checks the multiplicative 3-cocycle condition for omega: G^3 -> K^x.
pub fn check_three_cocycle(
    group: &GroupTable,
    omega: &dyn Fn(usize, usize, usize) -> Scalar,
) -> Result<()> {
    let n = group.order();
    for g in 0..n {
        for h in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if omega(g, h, k).is_zero() {
                        return Err(Error::Validation(format!("omega({g},{h},{k}) vanishes")));
                    }
                    // w(h,k,l) w(g,hk,l) w(g,h,k) = w(gh,k,l) w(g,h,kl)
                    let lhs = omega(h, k, l)
                        .mul(&omega(g, group.mul(h, k), l))
                        .mul(&omega(g, h, k));
                    let rhs = omega(group.mul(g, h), k, l).mul(&omega(g, h, group.mul(k, l)));
                    if lhs != rhs {
                        return Err(Error::NotCocycle(g, h, k, l));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Pointed category on a finite group, with an optional associator twist by
/// a multiplicative 3-cocycle (checked).
pub fn gen_pointed(
    group: &GroupTable,
    field: &FieldSpec,
    omega: Option<&dyn Fn(usize, usize, usize) -> Scalar>,
) -> Result<FusionDatum> {
    field.validate()?;
    let n = group.order();
    let mut fusion = vec![vec![vec![0usize; n]; n]; n];
    for g in 0..n {
        for h in 0..n {
            fusion[g][h][group.mul(g, h)] = 1;
        }
    }
    let mut blocks = BTreeMap::new();
    if let Some(w) = omega {
        check_three_cocycle(group, w)?;
        for g in 0..n {
            for h in 0..n {
                for k in 0..n {
                    let val = w(g, h, k);
                    if !val.is_one() {
                        let l = group.mul(group.mul(g, h), k);
                        let mut b = Mat::new(1, 1);
                        b.set(0, 0, val);
                        blocks.insert((g, h, k, l), b);
                    }
                }
            }
        }
    }
    let datum = FusionDatum {
        field: field.clone(),
        simples: (0..n).map(|g| format!("g{g}")).collect(),
        unit: UnitSpec::Simple(0),
        fusion,
        f_table: AssociatorTable { blocks },
        unit_iso: None,
    };
    datum.validate_structure()?;
    Ok(datum)
}

/// Recovers the group table of a pointed category (every product of two
/// simples is a single simple).
pub fn group_from_pointed(datum: &FusionDatum) -> Result<GroupTable> {
    let r = datum.rank();
    let mut mul = vec![vec![0usize; r]; r];
    for g in 0..r {
        for h in 0..r {
            let ks: Vec<usize> = (0..r).filter(|&k| datum.fusion[g][h][k] > 0).collect();
            if ks.len() != 1 || datum.fusion[g][h][ks[0]] != 1 {
                return Err(Error::Validation("category is not pointed".into()));
            }
            mul[g][h] = ks[0];
        }
    }
    GroupTable::new(mul)
}

/// Twists a pointed category's associator by the multiplicative coboundary
/// of beta: G^2 -> K^x. The result is an equivalent category.
pub fn gauge_twist(
    datum: &FusionDatum,
    group: &GroupTable,
    beta: &dyn Fn(usize, usize) -> Scalar,
) -> Result<FusionDatum> {
    let n = group.order();
    if datum.rank() != n {
        return Err(Error::Dimension("gauge_twist: group order vs rank".into()));
    }
    let mut out = datum.clone();
    let mut blocks = BTreeMap::new();
    for g in 0..n {
        for h in 0..n {
            for k in 0..n {
                let l = group.mul(group.mul(g, h), k);
                let old = datum
                    .f_block(g, h, k, l)
                    .get(0, 0)
                    .cloned()
                    .unwrap_or_else(|| datum.field.zero());
                // coboundary: b(h,k) b(gh,k)^-1 b(g,hk) b(g,h)^-1
                let cob = beta(h, k)
                    .mul(&beta(group.mul(g, h), k).inv()?)
                    .mul(&beta(g, group.mul(h, k)))
                    .mul(&beta(g, h).inv()?);
                let val = old.mul(&cob);
                if !val.is_one() {
                    let mut b = Mat::new(1, 1);
                    b.set(0, 0, val);
                    blocks.insert((g, h, k, l), b);
                }
            }
        }
    }
    out.f_table = AssociatorTable { blocks };
    Ok(out)
}

// ---------------------------------------------------------------------------
// bitensor data
// ---------------------------------------------------------------------------

/// Block table for one of the coproduct-side structure transformations,
/// keyed by simple indices; missing entries default to index-aligned
/// identities (valid only when both channel enumerations have equal length).
pub type BlockTable<K> = BTreeMap<K, ExactMatrix>;

/// Biunital structure scalars and blocks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CounitIso {
    /// r_x : (1 (x) eps) Delta(x) -> x
    pub r: Option<Vec<Scalar>>,
    /// l_x : (eps (x) 1) Delta(x) -> x
    pub l: Option<Vec<Scalar>>,
    /// eps(x (x) y) -> eps(x) (x) eps(y), keyed by (x, y)
    pub eps_mult: BlockTable<(usize, usize)>,
    /// Delta(I) -> I boxtimes I, keyed by the output pair (a, b)
    pub tau: BlockTable<(usize, usize)>,
    /// eps(I) -> K
    pub eta: Option<Scalar>,
}

/// Skeletal bitensor category datum.
#[derive(Clone, Debug, PartialEq)]
pub struct BitensorDatum {
    pub base: FusionDatum,
    /// delta[k][i][j] = multiplicity of (i, j) in Delta(k)
    pub delta: Vec<Vec<Vec<usize>>>,
    /// co-associator blocks keyed by (k, a, b, c)
    pub cof: BlockTable<(usize, usize, usize, usize)>,
    /// coherer blocks keyed by (x, y, u, v)
    pub kappa: BlockTable<(usize, usize, usize, usize)>,
    /// counit dimension vector eps(X_i); None for non-biunital data
    pub counit: Option<Vec<usize>>,
    pub counit_iso: CounitIso,
}

impl BitensorDatum {
    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    pub fn dm(&self, k: usize, i: usize, j: usize) -> usize {
        self.delta[k][i][j]
    }

    pub fn is_biunital(&self) -> bool {
        self.counit.is_some()
    }

    pub fn counit_dims(&self) -> Result<&Vec<usize>> {
        self.counit.as_ref().ok_or(Error::NonBiunital)
    }

    pub fn unit_mults(&self) -> Vec<usize> {
        self.base.unit.mults(self.rank())
    }

    /// Left co-tree channels (m, mu1, mu2) of (Delta boxtimes 1) Delta from k
    /// to (a, b, c): first k -> (m, c), then m -> (a, b).
    pub fn cochannels_left3(
        &self,
        k: usize,
        a: usize,
        b: usize,
        c: usize,
    ) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for m in 0..self.rank() {
            for mu1 in 0..self.dm(k, m, c) {
                for mu2 in 0..self.dm(m, a, b) {
                    out.push((m, mu1, mu2));
                }
            }
        }
        out
    }

    /// Right co-tree channels (n, nu1, nu2): first k -> (a, n), then
    /// n -> (b, c).
    pub fn cochannels_right3(
        &self,
        k: usize,
        a: usize,
        b: usize,
        c: usize,
    ) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for n in 0..self.rank() {
            for nu1 in 0..self.dm(k, a, n) {
                for nu2 in 0..self.dm(n, b, c) {
                    out.push((n, nu1, nu2));
                }
            }
        }
        out
    }

    /// Co-associator block for (k; a, b, c): rows right co-channels, columns
    /// left co-channels; identity when absent.
    pub fn cof_block(&self, k: usize, a: usize, b: usize, c: usize) -> ExactMatrix {
        if let Some(b) = self.cof.get(&(k, a, b, c)) {
            return b.clone();
        }
        let l = self.cochannels_left3(k, a, b, c).len();
        let r = self.cochannels_right3(k, a, b, c).len();
        assert_eq!(l, r, "cannot default a non-square co-associator block");
        Mat::identity(l, &self.base.field.one())
    }

    /// Source channels (w, t, m) of the coherer at (x, y; u, v): the object
    /// Delta(x (x) y) restricted to output pair (u, v).
    pub fn kappa_src(&self, x: usize, y: usize, u: usize, v: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for w in 0..self.rank() {
            for t in 0..self.base.n(x, y, w) {
                for m in 0..self.dm(w, u, v) {
                    out.push((w, t, m));
                }
            }
        }
        out
    }

    /// Target channels (a, b, c, d, mu, nu, rho, sigma) of the coherer at
    /// (x, y; u, v): Delta(x) Delta(y) restricted to (u, v).
    #[allow(clippy::type_complexity)]
    pub fn kappa_tgt(
        &self,
        x: usize,
        y: usize,
        u: usize,
        v: usize,
    ) -> Vec<(usize, usize, usize, usize, usize, usize, usize, usize)> {
        let r = self.rank();
        let mut out = Vec::new();
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    for d in 0..r {
                        for mu in 0..self.dm(x, a, b) {
                            for nu in 0..self.dm(y, c, d) {
                                for rho in 0..self.base.n(a, c, u) {
                                    for sigma in 0..self.base.n(b, d, v) {
                                        out.push((a, b, c, d, mu, nu, rho, sigma));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Coherer block Delta(x (x) y) -> Delta(x) Delta(y) at output pair
    /// (u, v); identity when absent.
    pub fn kappa_block(&self, x: usize, y: usize, u: usize, v: usize) -> ExactMatrix {
        if let Some(b) = self.kappa.get(&(x, y, u, v)) {
            return b.clone();
        }
        let s = self.kappa_src(x, y, u, v).len();
        let t = self.kappa_tgt(x, y, u, v).len();
        assert_eq!(s, t, "cannot default a non-square coherer block");
        Mat::identity(s, &self.base.field.one())
    }

    pub fn eps_dim(&self, x: usize) -> usize {
        self.counit.as_ref().map(|c| c[x]).unwrap_or(0)
    }

    /// eps(x (x) y) ~ eps(x) eps(y); identity default.
    pub fn eps_mult_block(&self, x: usize, y: usize) -> ExactMatrix {
        if let Some(b) = self.counit_iso.eps_mult.get(&(x, y)) {
            return b.clone();
        }
        let src: usize = (0..self.rank())
            .map(|w| self.base.n(x, y, w) * self.eps_dim(w))
            .sum();
        let tgt = self.eps_dim(x) * self.eps_dim(y);
        assert_eq!(src, tgt, "cannot default a non-square counit block");
        Mat::identity(src, &self.base.field.one())
    }

    /// Delta(I) ~ I boxtimes I at output pair (a, b); identity default.
    pub fn tau_block(&self, a: usize, b: usize) -> ExactMatrix {
        if let Some(m) = self.counit_iso.tau.get(&(a, b)) {
            return m.clone();
        }
        let u = self.unit_mults();
        let src: usize = (0..self.rank()).map(|k| u[k] * self.dm(k, a, b)).sum();
        let tgt = u[a] * u[b];
        assert_eq!(src, tgt, "cannot default a non-square tau block");
        Mat::identity(src, &self.base.field.one())
    }

    pub fn eta_scalar(&self) -> Scalar {
        self.counit_iso
            .eta
            .clone()
            .unwrap_or_else(|| self.base.field.one())
    }

    pub fn r_scalar(&self, x: usize) -> Scalar {
        self.counit_iso
            .r
            .as_ref()
            .map(|v| v[x].clone())
            .unwrap_or_else(|| self.base.field.one())
    }

    pub fn l_scalar(&self, x: usize) -> Scalar {
        self.counit_iso
            .l
            .as_ref()
            .map(|v| v[x].clone())
            .unwrap_or_else(|| self.base.field.one())
    }

    pub fn rho_scalar(&self, x: usize) -> Scalar {
        self.base
            .unit_iso
            .as_ref()
            .map(|iso| iso.rho[x].clone())
            .unwrap_or_else(|| self.base.field.one())
    }

    pub fn lambda_scalar(&self, x: usize) -> Scalar {
        self.base
            .unit_iso
            .as_ref()
            .map(|iso| iso.lambda[x].clone())
            .unwrap_or_else(|| self.base.field.one())
    }

    /// Dimension bookkeeping for the coproduct side: shapes of stored
    /// blocks, and the unit/counit stripping identities that every move in
    /// the normalizer relies on.
    pub fn validate_structure(&self) -> Result<()> {
        self.base.validate_structure()?;
        let r = self.rank();
        if self.delta.len() != r
            || self
                .delta
                .iter()
                .any(|p| p.len() != r || p.iter().any(|q| q.len() != r))
        {
            return Err(Error::Validation("delta tensor has wrong shape".into()));
        }
        // coassociativity of the coproduct multiplicities
        for k in 0..r {
            for a in 0..r {
                for b in 0..r {
                    for c in 0..r {
                        let lhs: usize = (0..r).map(|m| self.dm(k, m, c) * self.dm(m, a, b)).sum();
                        let rhs: usize = (0..r).map(|n| self.dm(k, a, n) * self.dm(n, b, c)).sum();
                        if lhs != rhs {
                            return Err(Error::Validation(format!(
                                "coproduct multiplicities not coassociative at ({k}; {a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        }
        // coherer dimension match: Delta is multiplicative on multiplicities
        for x in 0..r {
            for y in 0..r {
                for u in 0..r {
                    for v in 0..r {
                        let s = self.kappa_src(x, y, u, v).len();
                        let t = self.kappa_tgt(x, y, u, v).len();
                        if s != t {
                            return Err(Error::Validation(format!(
                                "coherer spaces have different dimensions at ({x}, {y}; {u}, {v}): {s} vs {t}"
                            )));
                        }
                    }
                }
            }
        }
        if let Some(c) = &self.counit {
            if c.len() != r {
                return Err(Error::Validation("counit vector has wrong length".into()));
            }
            let u = self.unit_mults();
            // stripping identities
            for x in 0..r {
                for a in 0..r {
                    let right: usize = (0..r).map(|b| self.dm(x, a, b) * c[b]).sum();
                    if right != usize::from(a == x) {
                        return Err(Error::Validation(format!(
                            "(1 x eps) Delta is not the identity at simple {x}"
                        )));
                    }
                    let left: usize = (0..r).map(|b| self.dm(x, b, a) * c[b]).sum();
                    if left != usize::from(a == x) {
                        return Err(Error::Validation(format!(
                            "(eps x 1) Delta is not the identity at simple {x}"
                        )));
                    }
                }
            }
            let eta_dim: usize = (0..r).map(|a| u[a] * c[a]).sum();
            if eta_dim != 1 {
                return Err(Error::Validation(format!(
                    "eps(I) has dimension {eta_dim}, expected 1"
                )));
            }
            // counit multiplicativity dims
            for x in 0..r {
                for y in 0..r {
                    let src: usize = (0..r).map(|w| self.base.n(x, y, w) * c[w]).sum();
                    if src != c[x] * c[y] {
                        return Err(Error::Validation(format!(
                            "eps not multiplicative at ({x}, {y})"
                        )));
                    }
                }
            }
        }
        // tau dims when the unit participates in Delta
        let u = self.unit_mults();
        for a in 0..r {
            for b in 0..r {
                let src: usize = (0..r).map(|k| u[k] * self.dm(k, a, b)).sum();
                if src != u[a] * u[b] {
                    return Err(Error::Validation(format!(
                        "Delta(I) is not I boxtimes I at pair ({a}, {b})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Grouplike bitensor structure: Delta(g) = (g, g), eps = ground field.
pub fn gen_grouplike_bitensor(group: &GroupTable, field: &FieldSpec) -> Result<BitensorDatum> {
    let base = gen_pointed(group, field, None)?;
    let n = group.order();
    let mut delta = vec![vec![vec![0usize; n]; n]; n];
    for (g, plane) in delta.iter_mut().enumerate() {
        plane[g][g] = 1;
    }
    let datum = BitensorDatum {
        base,
        delta,
        cof: BTreeMap::new(),
        kappa: BTreeMap::new(),
        counit: Some(vec![1; n]),
        counit_iso: CounitIso::default(),
    };
    datum.validate_structure()?;
    Ok(datum)
}

/// Function-algebra bitensor structure: diagonal product, Delta(g) summing
/// over factorizations, non-simple unit, counit supported at the identity.
pub fn gen_function_bitensor(group: &GroupTable, field: &FieldSpec) -> Result<BitensorDatum> {
    field.validate()?;
    let n = group.order();
    let mut fusion = vec![vec![vec![0usize; n]; n]; n];
    for (g, plane) in fusion.iter_mut().enumerate() {
        plane[g][g] = 1;
    }
    let base = FusionDatum {
        field: field.clone(),
        simples: (0..n).map(|g| format!("g{g}")).collect(),
        unit: UnitSpec::Sum(vec![1; n]),
        fusion,
        f_table: AssociatorTable::default(),
        unit_iso: None,
    };
    let mut delta = vec![vec![vec![0usize; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            delta[group.mul(a, b)][a][b] = 1;
        }
    }
    let mut counit = vec![0usize; n];
    counit[0] = 1;
    let datum = BitensorDatum {
        base,
        delta,
        cof: BTreeMap::new(),
        kappa: BTreeMap::new(),
        counit: Some(counit),
        counit_iso: CounitIso::default(),
    };
    datum.validate_structure()?;
    Ok(datum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sign_omega(field: &FieldSpec) -> impl Fn(usize, usize, usize) -> Scalar + '_ {
        move |g, h, k| field.from_i64(if g == 1 && h == 1 && k == 1 { -1 } else { 1 })
    }

    #[test]
    fn pointed_z2_trivial() {
        let g = GroupTable::cyclic(2);
        let d = gen_pointed(&g, &FieldSpec::Rational, None).unwrap();
        assert_eq!(d.rank(), 2);
        assert!(d.f_table.blocks.is_empty());
    }

    #[test]
    fn pointed_z2_sign_cocycle() {
        let g = GroupTable::cyclic(2);
        let f = FieldSpec::Rational;
        let w = sign_omega(&f);
        // oracle: direct multiplicative coboundary over all 16 quadruples
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for e in 0..2 {
                        let lhs = w(b, c, e).mul(&w(a, (b + c) % 2, e)).mul(&w(a, b, c));
                        let rhs = w((a + b) % 2, c, e).mul(&w(a, b, (c + e) % 2));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
        let d = gen_pointed(&g, &f, Some(&w)).unwrap();
        assert_eq!(d.f_table.blocks.len(), 1);
        assert_eq!(d.f_block(1, 1, 1, 1).get(0, 0), Some(&f.from_i64(-1)));
    }

    #[test]
    fn pointed_z3_f3() {
        let g = GroupTable::cyclic(3);
        let d = gen_pointed(&g, &FieldSpec::Prime(3), None).unwrap();
        assert_eq!(d.rank(), 3);
        // all 27 blocks are trivial
        assert!(d.f_table.blocks.is_empty());
    }

    #[test]
    fn non_cocycle_rejected() {
        let g = GroupTable::cyclic(2);
        let f = FieldSpec::Rational;
        // w(g,h,k) = -1 iff g=h=k=0 is not a cocycle
        let w = |a: usize, b: usize, c: usize| {
            f.from_i64(if a == 0 && b == 0 && c == 0 { -1 } else { 1 })
        };
        let err = gen_pointed(&g, &f, Some(&w)).unwrap_err();
        assert!(matches!(err, Error::NotCocycle(..)));
    }

    #[test]
    fn grouplike_bitensor_z2() {
        let g = GroupTable::cyclic(2);
        let d = gen_grouplike_bitensor(&g, &FieldSpec::Rational).unwrap();
        assert_eq!(d.rank(), 2);
        assert_eq!(d.dm(1, 1, 1), 1);
        assert_eq!(d.dm(1, 0, 1), 0);
    }

    #[test]
    fn function_bitensor_units() {
        let g = GroupTable::cyclic(2);
        let d = gen_function_bitensor(&g, &FieldSpec::Rational).unwrap();
        assert_eq!(d.unit_mults(), vec![1, 1]);
        // Delta(g) has |G| summands
        let g3 = GroupTable::cyclic(3);
        let d3 = gen_function_bitensor(&g3, &FieldSpec::Prime(3)).unwrap();
        for g in 0..3 {
            let total: usize = (0..3)
                .flat_map(|a| (0..3).map(move |b| (a, b)))
                .map(|(a, b)| d3.dm(g, a, b))
                .sum();
            assert_eq!(total, 3);
        }
    }

    #[test]
    fn trivial_group_coincidence() {
        let g = GroupTable::trivial();
        let a = gen_grouplike_bitensor(&g, &FieldSpec::Rational).unwrap();
        let b = gen_function_bitensor(&g, &FieldSpec::Rational).unwrap();
        assert_eq!(a.delta, b.delta);
        assert_eq!(a.counit, b.counit);
        assert_eq!(a.base.fusion, b.base.fusion);
        assert_eq!(a.unit_mults(), b.unit_mults());
    }

    #[test]
    fn gauge_twist_identity() {
        let g = GroupTable::cyclic(2);
        let f = FieldSpec::Rational;
        let d = gen_pointed(&g, &f, None).unwrap();
        let t = gauge_twist(&d, &g, &|_, _| f.one()).unwrap();
        assert_eq!(d, t);
    }

    #[test]
    fn gauge_twist_inverse_round_trip() {
        let g = GroupTable::cyclic(2);
        let f = FieldSpec::Rational;
        let d = gen_pointed(&g, &f, None).unwrap();
        let beta = |a: usize, b: usize| f.from_i64(if a == 1 && b == 1 { 7 } else { 1 });
        let beta_inv = |a: usize, b: usize| {
            if a == 1 && b == 1 {
                Scalar::Rational("1/7".parse().unwrap())
            } else {
                f.one()
            }
        };
        let t = gauge_twist(&d, &g, &beta).unwrap();
        let back = gauge_twist(&t, &g, &beta_inv).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn dims_pointed() {
        let g = GroupTable::cyclic(2);
        let d = gen_pointed(&g, &FieldSpec::Rational, None).unwrap();
        let rep = dims_report(&d, 3);
        assert_eq!(rep.degrees, vec![(1, 2), (2, 4), (3, 8)]);
    }
}

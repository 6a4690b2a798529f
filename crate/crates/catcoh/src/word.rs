//! Functor words for bitensor categories: composition dags over the
//! primitives Id, tensor, coproduct, unit and counit, channel enumeration,
//! structural rewriting moves, and the commensuration normalizer.
//!
//! A word is stored as a wiring dag in topological order. Every wire has a
//! single consumer (or is an output), which makes each structural move a
//! local surgery. Normalization runs in three phases: first coproducts and
//! counits are pushed through tensors and units (coherer, counit
//! multiplicativity, tau, eta moves), then counits on coproduct cofactors
//! are stripped and coproduct bursts right-coassociated (r, l, co-associator
//! moves), finally unit factors are stripped and products right-associated
//! (rho, lambda, associator moves). Two words are commensurable exactly when
//! they normalize to the same form; the commensuration matrix is the
//! composite of one normalization with the inverse of the other.

use std::collections::HashMap;
use std::fmt;

use crate::category::{left3_channels, right3_channels, BitensorDatum};
use crate::error::{Error, Result};
use crate::matrix::{invert, Mat};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wire {
    In(usize),
    TOut(usize),
    DOutL(usize),
    DOutR(usize),
    IOut(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Vert {
    Tensor(Wire, Wire),
    Delta(Wire),
    UnitI,
    Counit(Wire),
}

/// A functor word as a wiring dag; vertices are topologically ordered and
/// `outs` lists the category-valued outputs in order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dag {
    pub n_in: usize,
    pub verts: Vec<Vert>,
    pub outs: Vec<Wire>,
}

/// Channel data per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VData {
    /// tensor output simple and multiplicity index
    T { out: usize, mu: usize },
    /// coproduct output pair and multiplicity index
    D { l: usize, r: usize, mu: usize },
    /// unit constituent and its multiplicity index
    I { a: usize, mu: usize },
    /// counit coordinate
    C { q: usize },
}

pub type WChannel = Vec<VData>;

impl Dag {
    pub fn resolve(&self, ch: &WChannel, w: Wire, tuple: &[usize]) -> usize {
        match w {
            Wire::In(i) => tuple[i],
            Wire::TOut(v) => match &ch[v] {
                VData::T { out, .. } => *out,
                _ => unreachable!(),
            },
            Wire::DOutL(v) => match &ch[v] {
                VData::D { l, .. } => *l,
                _ => unreachable!(),
            },
            Wire::DOutR(v) => match &ch[v] {
                VData::D { r, .. } => *r,
                _ => unreachable!(),
            },
            Wire::IOut(v) => match &ch[v] {
                VData::I { a, .. } => *a,
                _ => unreachable!(),
            },
        }
    }

    pub fn out_tuple(&self, ch: &WChannel, tuple: &[usize]) -> Vec<usize> {
        self.outs
            .iter()
            .map(|&w| self.resolve(ch, w, tuple))
            .collect()
    }

    /// All channels on the given input tuple, in deterministic order.
    pub fn channels(&self, datum: &BitensorDatum, tuple: &[usize]) -> Vec<WChannel> {
        assert_eq!(tuple.len(), self.n_in);
        let r = datum.rank();
        let u = datum.unit_mults();
        let mut states: Vec<WChannel> = vec![Vec::new()];
        for vert in &self.verts {
            let mut next = Vec::new();
            for st in &states {
                match vert {
                    Vert::Tensor(a, b) => {
                        let x = self.resolve(st, *a, tuple);
                        let y = self.resolve(st, *b, tuple);
                        for k in 0..r {
                            for mu in 0..datum.base.n(x, y, k) {
                                let mut s = st.clone();
                                s.push(VData::T { out: k, mu });
                                next.push(s);
                            }
                        }
                    }
                    Vert::Delta(x) => {
                        let xs = self.resolve(st, *x, tuple);
                        for l in 0..r {
                            for rr in 0..r {
                                for mu in 0..datum.dm(xs, l, rr) {
                                    let mut s = st.clone();
                                    s.push(VData::D { l, r: rr, mu });
                                    next.push(s);
                                }
                            }
                        }
                    }
                    Vert::UnitI => {
                        for (a, &m) in u.iter().enumerate() {
                            for mu in 0..m {
                                let mut s = st.clone();
                                s.push(VData::I { a, mu });
                                next.push(s);
                            }
                        }
                    }
                    Vert::Counit(x) => {
                        let xs = self.resolve(st, *x, tuple);
                        for q in 0..datum.eps_dim(xs) {
                            let mut s = st.clone();
                            s.push(VData::C { q });
                            next.push(s);
                        }
                    }
                }
            }
            states = next;
        }
        states
    }
}

// ---------------------------------------------------------------------------
// move patterns and rewriting
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveKind {
    Alpha,
    Beta,
    Kappa,
    EpsMult,
    Tau,
    Eta,
    RStrip,
    LStrip,
    RhoStrip,
    LambdaStrip,
}

/// A move application: the consumer vertex determines the full local site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub kind: MoveKind,
    pub consumer: usize,
}

/// One rewriting step with enough bookkeeping to compute its matrix.
#[derive(Clone, Debug)]
pub struct Step {
    pub before: Dag,
    pub after: Dag,
    pub kind: MoveKind,
    /// vids removed from `before`, in role order per kind
    pub locals_old: Vec<usize>,
    /// vids created in `after`, in role order per kind
    pub locals_new: Vec<usize>,
    /// surviving vertices: (old vid, new vid)
    pub survivors: Vec<(usize, usize)>,
}

fn producer(w: Wire) -> Option<usize> {
    match w {
        Wire::In(_) => None,
        Wire::TOut(v) | Wire::DOutL(v) | Wire::DOutR(v) | Wire::IOut(v) => Some(v),
    }
}

fn vert_input_wires(v: &Vert) -> Vec<Wire> {
    match v {
        Vert::Tensor(a, b) => vec![*a, *b],
        Vert::Delta(x) | Vert::Counit(x) => vec![*x],
        Vert::UnitI => vec![],
    }
}

/// Phase-1 pattern: a coproduct or counit applied to a tensor or unit
/// output; scanned outermost-first.
pub fn find_c1(dag: &Dag) -> Option<Pattern> {
    for vid in (0..dag.verts.len()).rev() {
        match &dag.verts[vid] {
            Vert::Delta(x) => match x {
                Wire::TOut(_) => {
                    return Some(Pattern {
                        kind: MoveKind::Kappa,
                        consumer: vid,
                    })
                }
                Wire::IOut(_) => {
                    return Some(Pattern {
                        kind: MoveKind::Tau,
                        consumer: vid,
                    })
                }
                _ => {}
            },
            Vert::Counit(x) => match x {
                Wire::TOut(_) => {
                    return Some(Pattern {
                        kind: MoveKind::EpsMult,
                        consumer: vid,
                    })
                }
                Wire::IOut(_) => {
                    return Some(Pattern {
                        kind: MoveKind::Eta,
                        consumer: vid,
                    })
                }
                _ => {}
            },
            _ => {}
        }
    }
    None
}

/// Phase-2 pattern: counit strips first, then left-nested coproducts.
pub fn find_c2(dag: &Dag) -> Option<Pattern> {
    for (vid, v) in dag.verts.iter().enumerate() {
        if let Vert::Counit(x) = v {
            match x {
                Wire::DOutR(_) => {
                    return Some(Pattern {
                        kind: MoveKind::RStrip,
                        consumer: vid,
                    })
                }
                Wire::DOutL(_) => {
                    return Some(Pattern {
                        kind: MoveKind::LStrip,
                        consumer: vid,
                    })
                }
                _ => {}
            }
        }
    }
    for (vid, v) in dag.verts.iter().enumerate() {
        if let Vert::Delta(Wire::DOutL(_)) = v {
            return Some(Pattern {
                kind: MoveKind::Beta,
                consumer: vid,
            });
        }
    }
    None
}

/// Phase-3 pattern: unit strips first, then left-nested tensors.
pub fn find_c3(dag: &Dag) -> Option<Pattern> {
    for (vid, v) in dag.verts.iter().enumerate() {
        if let Vert::Tensor(a, b) = v {
            if matches!(b, Wire::IOut(_)) {
                return Some(Pattern {
                    kind: MoveKind::RhoStrip,
                    consumer: vid,
                });
            }
            if matches!(a, Wire::IOut(_)) {
                return Some(Pattern {
                    kind: MoveKind::LambdaStrip,
                    consumer: vid,
                });
            }
        }
    }
    for (vid, v) in dag.verts.iter().enumerate() {
        if let Vert::Tensor(Wire::TOut(p), _) = v {
            if matches!(dag.verts[*p], Vert::Tensor(..)) {
                return Some(Pattern {
                    kind: MoveKind::Alpha,
                    consumer: vid,
                });
            }
        }
    }
    None
}

/// Wire reference in a rewrite template: either an existing wire of the old
/// dag or an output of a newly inserted vertex.
#[derive(Clone, Copy, Debug)]
enum WRef {
    Old(Wire),
    NewT(usize),
    NewDL(usize),
    NewDR(usize),
    NewI(usize),
}

#[derive(Clone, Debug)]
enum VertTemplate {
    Tensor(WRef, WRef),
    Delta(WRef),
    UnitI,
    Counit(WRef),
}

struct Rewrite {
    remove: Vec<usize>,
    insert_at: usize,
    inserts: Vec<VertTemplate>,
    redirects: Vec<(Wire, WRef)>,
}

fn apply_rewrite(dag: &Dag, rw: &Rewrite) -> (Dag, Vec<(usize, usize)>, Vec<usize>) {
    // assign new ids
    let mut new_id: HashMap<usize, usize> = HashMap::new();
    let mut insert_ids: Vec<usize> = Vec::new();
    let mut counter = 0usize;
    for vid in 0..dag.verts.len() {
        if vid == rw.insert_at {
            for _ in 0..rw.inserts.len() {
                insert_ids.push(counter);
                counter += 1;
            }
        }
        if !rw.remove.contains(&vid) {
            new_id.insert(vid, counter);
            counter += 1;
        }
    }
    if rw.insert_at >= dag.verts.len() {
        for _ in 0..rw.inserts.len() {
            insert_ids.push(counter);
            counter += 1;
        }
    }
    let resolve_ref = |r: &WRef, remap: &dyn Fn(Wire) -> Wire| -> Wire {
        match r {
            WRef::Old(w) => remap(*w),
            WRef::NewT(i) => Wire::TOut(insert_ids[*i]),
            WRef::NewDL(i) => Wire::DOutL(insert_ids[*i]),
            WRef::NewDR(i) => Wire::DOutR(insert_ids[*i]),
            WRef::NewI(i) => Wire::IOut(insert_ids[*i]),
        }
    };
    // wire remapping: redirects first, then structural renumbering
    fn remap_wire(
        w: Wire,
        redirects: &[(Wire, WRef)],
        new_id: &HashMap<usize, usize>,
        insert_ids: &[usize],
    ) -> Wire {
        if let Some((_, r)) = redirects.iter().find(|(old, _)| *old == w) {
            return match r {
                WRef::Old(w2) => remap_wire(*w2, &[], new_id, insert_ids),
                WRef::NewT(i) => Wire::TOut(insert_ids[*i]),
                WRef::NewDL(i) => Wire::DOutL(insert_ids[*i]),
                WRef::NewDR(i) => Wire::DOutR(insert_ids[*i]),
                WRef::NewI(i) => Wire::IOut(insert_ids[*i]),
            };
        }
        match w {
            Wire::In(i) => Wire::In(i),
            Wire::TOut(v) => Wire::TOut(new_id[&v]),
            Wire::DOutL(v) => Wire::DOutL(new_id[&v]),
            Wire::DOutR(v) => Wire::DOutR(new_id[&v]),
            Wire::IOut(v) => Wire::IOut(new_id[&v]),
        }
    }
    let remap = |w: Wire| remap_wire(w, &rw.redirects, &new_id, &insert_ids);

    let mut verts: Vec<Vert> = Vec::with_capacity(counter);
    for vid in 0..dag.verts.len() {
        if vid == rw.insert_at {
            for t in &rw.inserts {
                verts.push(match t {
                    VertTemplate::Tensor(a, b) => {
                        Vert::Tensor(resolve_ref(a, &remap), resolve_ref(b, &remap))
                    }
                    VertTemplate::Delta(x) => Vert::Delta(resolve_ref(x, &remap)),
                    VertTemplate::UnitI => Vert::UnitI,
                    VertTemplate::Counit(x) => Vert::Counit(resolve_ref(x, &remap)),
                });
            }
        }
        if !rw.remove.contains(&vid) {
            verts.push(match &dag.verts[vid] {
                Vert::Tensor(a, b) => Vert::Tensor(remap(*a), remap(*b)),
                Vert::Delta(x) => Vert::Delta(remap(*x)),
                Vert::UnitI => Vert::UnitI,
                Vert::Counit(x) => Vert::Counit(remap(*x)),
            });
        }
    }
    if rw.insert_at >= dag.verts.len() {
        for t in &rw.inserts {
            verts.push(match t {
                VertTemplate::Tensor(a, b) => {
                    Vert::Tensor(resolve_ref(a, &remap), resolve_ref(b, &remap))
                }
                VertTemplate::Delta(x) => Vert::Delta(resolve_ref(x, &remap)),
                VertTemplate::UnitI => Vert::UnitI,
                VertTemplate::Counit(x) => Vert::Counit(resolve_ref(x, &remap)),
            });
        }
    }
    let outs: Vec<Wire> = dag.outs.iter().map(|&w| remap(w)).collect();
    let after = Dag {
        n_in: dag.n_in,
        verts,
        outs,
    };
    let survivors: Vec<(usize, usize)> = (0..dag.verts.len())
        .filter(|v| !rw.remove.contains(v))
        .map(|v| (v, new_id[&v]))
        .collect();
    // redirected wires can point forward; restore topological order
    let (after, perm) = toposort(&after);
    let survivors = survivors.into_iter().map(|(o, n)| (o, perm[n])).collect();
    let insert_ids = insert_ids.into_iter().map(|v| perm[v]).collect();
    (after, survivors, insert_ids)
}

/// Stable topological sort (smallest available id first); returns the
/// re-sorted dag and the old-id -> new-id permutation.
fn toposort(dag: &Dag) -> (Dag, Vec<usize>) {
    let n = dag.verts.len();
    let deps: Vec<Vec<usize>> = dag
        .verts
        .iter()
        .map(|v| {
            vert_input_wires(v)
                .into_iter()
                .filter_map(producer)
                .collect()
        })
        .collect();
    let mut placed = vec![false; n];
    let mut perm = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .find(|&v| !placed[v] && deps[v].iter().all(|&d| placed[d]))
            .expect("dag has a cycle");
        placed[next] = true;
        perm[next] = order.len();
        order.push(next);
    }
    let remap = |w: Wire| -> Wire {
        match w {
            Wire::In(i) => Wire::In(i),
            Wire::TOut(v) => Wire::TOut(perm[v]),
            Wire::DOutL(v) => Wire::DOutL(perm[v]),
            Wire::DOutR(v) => Wire::DOutR(perm[v]),
            Wire::IOut(v) => Wire::IOut(perm[v]),
        }
    };
    let verts: Vec<Vert> = order
        .iter()
        .map(|&old| match &dag.verts[old] {
            Vert::Tensor(a, b) => Vert::Tensor(remap(*a), remap(*b)),
            Vert::Delta(x) => Vert::Delta(remap(*x)),
            Vert::UnitI => Vert::UnitI,
            Vert::Counit(x) => Vert::Counit(remap(*x)),
        })
        .collect();
    let outs = dag.outs.iter().map(|&w| remap(w)).collect();
    (
        Dag {
            n_in: dag.n_in,
            verts,
            outs,
        },
        perm,
    )
}

/// Applies one move, producing the rewritten dag and the bookkeeping needed
/// for matrices.
pub fn apply_move(dag: &Dag, p: Pattern) -> Step {
    let c = p.consumer;
    let (rw, locals_old) = match p.kind {
        MoveKind::Kappa => {
            let Vert::Delta(Wire::TOut(t)) = dag.verts[c] else {
                panic!("kappa pattern")
            };
            let Vert::Tensor(xw, yw) = dag.verts[t] else {
                panic!("kappa pattern")
            };
            (
                Rewrite {
                    remove: vec![t, c],
                    insert_at: c,
                    inserts: vec![
                        VertTemplate::Delta(WRef::Old(xw)),
                        VertTemplate::Delta(WRef::Old(yw)),
                        VertTemplate::Tensor(WRef::NewDL(0), WRef::NewDL(1)),
                        VertTemplate::Tensor(WRef::NewDR(0), WRef::NewDR(1)),
                    ],
                    redirects: vec![
                        (Wire::DOutL(c), WRef::NewT(2)),
                        (Wire::DOutR(c), WRef::NewT(3)),
                    ],
                },
                vec![t, c],
            )
        }
        MoveKind::Beta => {
            let Vert::Delta(Wire::DOutL(d1)) = dag.verts[c] else {
                panic!("beta pattern")
            };
            let Vert::Delta(kw) = dag.verts[d1] else {
                panic!("beta pattern")
            };
            (
                Rewrite {
                    remove: vec![d1, c],
                    insert_at: c,
                    inserts: vec![
                        VertTemplate::Delta(WRef::Old(kw)),
                        VertTemplate::Delta(WRef::NewDR(0)),
                    ],
                    redirects: vec![
                        (Wire::DOutL(c), WRef::NewDL(0)),
                        (Wire::DOutR(c), WRef::NewDL(1)),
                        (Wire::DOutR(d1), WRef::NewDR(1)),
                    ],
                },
                vec![d1, c],
            )
        }
        MoveKind::Alpha => {
            let Vert::Tensor(Wire::TOut(t1), cw) = dag.verts[c] else {
                panic!("alpha pattern")
            };
            let Vert::Tensor(aw, bw) = dag.verts[t1] else {
                panic!("alpha pattern")
            };
            (
                Rewrite {
                    remove: vec![t1, c],
                    insert_at: c,
                    inserts: vec![
                        VertTemplate::Tensor(WRef::Old(bw), WRef::Old(cw)),
                        VertTemplate::Tensor(WRef::Old(aw), WRef::NewT(0)),
                    ],
                    redirects: vec![(Wire::TOut(c), WRef::NewT(1))],
                },
                vec![t1, c],
            )
        }
        MoveKind::EpsMult => {
            let Vert::Counit(Wire::TOut(t)) = dag.verts[c] else {
                panic!("eps pattern")
            };
            let Vert::Tensor(xw, yw) = dag.verts[t] else {
                panic!("eps pattern")
            };
            (
                Rewrite {
                    remove: vec![t, c],
                    insert_at: c,
                    inserts: vec![
                        VertTemplate::Counit(WRef::Old(xw)),
                        VertTemplate::Counit(WRef::Old(yw)),
                    ],
                    redirects: vec![],
                },
                vec![t, c],
            )
        }
        MoveKind::Tau => {
            let Vert::Delta(Wire::IOut(u)) = dag.verts[c] else {
                panic!("tau pattern")
            };
            (
                Rewrite {
                    remove: vec![u, c],
                    insert_at: c,
                    inserts: vec![VertTemplate::UnitI, VertTemplate::UnitI],
                    redirects: vec![
                        (Wire::DOutL(c), WRef::NewI(0)),
                        (Wire::DOutR(c), WRef::NewI(1)),
                    ],
                },
                vec![u, c],
            )
        }
        MoveKind::Eta => {
            let Vert::Counit(Wire::IOut(u)) = dag.verts[c] else {
                panic!("eta pattern")
            };
            (
                Rewrite {
                    remove: vec![u, c],
                    insert_at: c,
                    inserts: vec![],
                    redirects: vec![],
                },
                vec![u, c],
            )
        }
        MoveKind::RStrip => {
            let Vert::Counit(Wire::DOutR(d)) = dag.verts[c] else {
                panic!("r pattern")
            };
            let Vert::Delta(xw) = dag.verts[d] else {
                panic!("r pattern")
            };
            (
                Rewrite {
                    remove: vec![d, c],
                    insert_at: c,
                    inserts: vec![],
                    redirects: vec![(Wire::DOutL(d), WRef::Old(xw))],
                },
                vec![d, c],
            )
        }
        MoveKind::LStrip => {
            let Vert::Counit(Wire::DOutL(d)) = dag.verts[c] else {
                panic!("l pattern")
            };
            let Vert::Delta(xw) = dag.verts[d] else {
                panic!("l pattern")
            };
            (
                Rewrite {
                    remove: vec![d, c],
                    insert_at: c,
                    inserts: vec![],
                    redirects: vec![(Wire::DOutR(d), WRef::Old(xw))],
                },
                vec![d, c],
            )
        }
        MoveKind::RhoStrip => {
            let Vert::Tensor(xw, Wire::IOut(u)) = dag.verts[c] else {
                panic!("rho pattern")
            };
            (
                Rewrite {
                    remove: vec![u, c],
                    insert_at: c,
                    inserts: vec![],
                    redirects: vec![(Wire::TOut(c), WRef::Old(xw))],
                },
                vec![u, c],
            )
        }
        MoveKind::LambdaStrip => {
            let Vert::Tensor(Wire::IOut(u), yw) = dag.verts[c] else {
                panic!("lambda pattern")
            };
            (
                Rewrite {
                    remove: vec![u, c],
                    insert_at: c,
                    inserts: vec![],
                    redirects: vec![(Wire::TOut(c), WRef::Old(yw))],
                },
                vec![u, c],
            )
        }
    };
    let (after, survivors, locals_new) = apply_rewrite(dag, &rw);
    Step {
        before: dag.clone(),
        after,
        kind: p.kind,
        locals_old,
        locals_new,
        survivors,
    }
}

/// Full canonical normalization: phase 1, then 2, then 3.
pub fn normalize(dag: &Dag) -> Vec<Step> {
    let mut steps = Vec::new();
    let mut cur = dag.clone();
    loop {
        let p = find_c1(&cur)
            .or_else(|| find_c2(&cur))
            .or_else(|| find_c3(&cur));
        let Some(p) = p else { break };
        let step = apply_move(&cur, p);
        cur = step.after.clone();
        steps.push(step);
    }
    steps
}

// ---------------------------------------------------------------------------
// step matrices
// ---------------------------------------------------------------------------

/// Matrix of a single move at the given input tuple: rows index channels of
/// `step.after`, columns channels of `step.before`.
pub fn step_matrix(datum: &BitensorDatum, step: &Step, tuple: &[usize]) -> Mat<Scalar> {
    let old_ch = step.before.channels(datum, tuple);
    let new_ch = step.after.channels(datum, tuple);
    // survivor signature: data at surviving vertices in old-vid order,
    // plus the boundary simples of the local site
    let survivors_old: Vec<usize> = step.survivors.iter().map(|&(o, _)| o).collect();
    let survivors_new: Vec<usize> = step.survivors.iter().map(|&(_, n)| n).collect();

    let mut groups: HashMap<(Vec<VData>, Vec<usize>), Vec<(usize, Vec<VData>)>> = HashMap::new();
    for (oi, ch) in old_ch.iter().enumerate() {
        let sig: Vec<VData> = survivors_old.iter().map(|&v| ch[v].clone()).collect();
        let boundary = boundary_old(datum, step, ch, tuple);
        let local: Vec<VData> = step.locals_old.iter().map(|&v| ch[v].clone()).collect();
        groups.entry((sig, boundary)).or_default().push((oi, local));
    }

    let mut mat = Mat::new(new_ch.len(), old_ch.len());
    for (ni, ch) in new_ch.iter().enumerate() {
        let sig: Vec<VData> = survivors_new.iter().map(|&v| ch[v].clone()).collect();
        let boundary = boundary_new(datum, step, ch, tuple);
        let Some(group) = groups.get(&(sig, boundary.clone())) else {
            continue;
        };
        let local_new: Vec<VData> = step.locals_new.iter().map(|&v| ch[v].clone()).collect();
        for (oi, local_old) in group {
            if let Some(v) = block_entry(datum, step.kind, &boundary, &local_new, local_old) {
                if !v.is_zero() {
                    mat.set(ni, *oi, v);
                }
            }
        }
    }
    mat
}

/// Boundary simples of the local site, from an old channel.
fn boundary_old(datum: &BitensorDatum, step: &Step, ch: &WChannel, tuple: &[usize]) -> Vec<usize> {
    let d = &step.before;
    let lo = &step.locals_old;
    let _ = datum;
    match step.kind {
        MoveKind::Alpha => {
            let Vert::Tensor(aw, bw) = d.verts[lo[0]] else {
                unreachable!()
            };
            let Vert::Tensor(_, cw) = d.verts[lo[1]] else {
                unreachable!()
            };
            let p = match &ch[lo[1]] {
                VData::T { out, .. } => *out,
                _ => unreachable!(),
            };
            vec![
                d.resolve(ch, aw, tuple),
                d.resolve(ch, bw, tuple),
                d.resolve(ch, cw, tuple),
                p,
            ]
        }
        MoveKind::Beta => {
            let Vert::Delta(kw) = d.verts[lo[0]] else {
                unreachable!()
            };
            let k = d.resolve(ch, kw, tuple);
            let (a, b) = match &ch[lo[1]] {
                VData::D { l, r, .. } => (*l, *r),
                _ => unreachable!(),
            };
            let c = match &ch[lo[0]] {
                VData::D { r, .. } => *r,
                _ => unreachable!(),
            };
            vec![k, a, b, c]
        }
        MoveKind::Kappa => {
            let Vert::Tensor(xw, yw) = d.verts[lo[0]] else {
                unreachable!()
            };
            let (u, v) = match &ch[lo[1]] {
                VData::D { l, r, .. } => (*l, *r),
                _ => unreachable!(),
            };
            vec![d.resolve(ch, xw, tuple), d.resolve(ch, yw, tuple), u, v]
        }
        MoveKind::EpsMult => {
            let Vert::Tensor(xw, yw) = d.verts[lo[0]] else {
                unreachable!()
            };
            vec![d.resolve(ch, xw, tuple), d.resolve(ch, yw, tuple)]
        }
        MoveKind::Tau => {
            let (b, c) = match &ch[lo[1]] {
                VData::D { l, r, .. } => (*l, *r),
                _ => unreachable!(),
            };
            vec![b, c]
        }
        MoveKind::Eta => vec![],
        MoveKind::RStrip | MoveKind::LStrip => {
            let Vert::Delta(xw) = d.verts[lo[0]] else {
                unreachable!()
            };
            vec![d.resolve(ch, xw, tuple)]
        }
        MoveKind::RhoStrip => {
            let Vert::Tensor(xw, _) = d.verts[lo[1]] else {
                unreachable!()
            };
            vec![d.resolve(ch, xw, tuple)]
        }
        MoveKind::LambdaStrip => {
            let Vert::Tensor(_, yw) = d.verts[lo[1]] else {
                unreachable!()
            };
            vec![d.resolve(ch, yw, tuple)]
        }
    }
}

/// Boundary simples of the local site, from a new channel; must equal the
/// old boundary for a nonzero entry.
fn boundary_new(datum: &BitensorDatum, step: &Step, ch: &WChannel, tuple: &[usize]) -> Vec<usize> {
    let d = &step.after;
    let ln = &step.locals_new;
    let _ = datum;
    match step.kind {
        MoveKind::Alpha => {
            let Vert::Tensor(bw, cw) = d.verts[ln[0]] else {
                unreachable!()
            };
            let Vert::Tensor(aw, _) = d.verts[ln[1]] else {
                unreachable!()
            };
            let p = match &ch[ln[1]] {
                VData::T { out, .. } => *out,
                _ => unreachable!(),
            };
            vec![
                d.resolve(ch, aw, tuple),
                d.resolve(ch, bw, tuple),
                d.resolve(ch, cw, tuple),
                p,
            ]
        }
        MoveKind::Beta => {
            let Vert::Delta(kw) = d.verts[ln[0]] else {
                unreachable!()
            };
            let k = d.resolve(ch, kw, tuple);
            let a = match &ch[ln[0]] {
                VData::D { l, .. } => *l,
                _ => unreachable!(),
            };
            let (b, c) = match &ch[ln[1]] {
                VData::D { l, r, .. } => (*l, *r),
                _ => unreachable!(),
            };
            vec![k, a, b, c]
        }
        MoveKind::Kappa => {
            let Vert::Delta(xw) = d.verts[ln[0]] else {
                unreachable!()
            };
            let Vert::Delta(yw) = d.verts[ln[1]] else {
                unreachable!()
            };
            let u = match &ch[ln[2]] {
                VData::T { out, .. } => *out,
                _ => unreachable!(),
            };
            let v = match &ch[ln[3]] {
                VData::T { out, .. } => *out,
                _ => unreachable!(),
            };
            vec![d.resolve(ch, xw, tuple), d.resolve(ch, yw, tuple), u, v]
        }
        MoveKind::EpsMult => {
            let Vert::Counit(xw) = d.verts[ln[0]] else {
                unreachable!()
            };
            let Vert::Counit(yw) = d.verts[ln[1]] else {
                unreachable!()
            };
            vec![d.resolve(ch, xw, tuple), d.resolve(ch, yw, tuple)]
        }
        MoveKind::Tau => {
            let b = match &ch[ln[0]] {
                VData::I { a, .. } => *a,
                _ => unreachable!(),
            };
            let c = match &ch[ln[1]] {
                VData::I { a, .. } => *a,
                _ => unreachable!(),
            };
            vec![b, c]
        }
        MoveKind::Eta => vec![],
        MoveKind::RStrip | MoveKind::LStrip | MoveKind::RhoStrip | MoveKind::LambdaStrip => {
            // the stripped site survives as a plain wire; recover its simple
            // from the old-side boundary by rerunning on the redirect target:
            // the boundary is the simple of the surviving wire, which the
            // new channel resolves through whatever produces it. The wire is
            // recorded implicitly; recompute from the before-dag redirect.
            strip_boundary_new(step, ch, tuple)
        }
    }
}

/// For strips, the surviving wire in the new dag is the image of the old
/// carrier; resolve its simple in the new channel.
fn strip_boundary_new(step: &Step, ch: &WChannel, tuple: &[usize]) -> Vec<usize> {
    // locate the old carrier wire and map it through the survivors
    let d_old = &step.before;
    let lo = &step.locals_old;
    let old_wire = match step.kind {
        MoveKind::RStrip | MoveKind::LStrip => {
            let Vert::Delta(xw) = d_old.verts[lo[0]] else {
                unreachable!()
            };
            xw
        }
        MoveKind::RhoStrip => {
            let Vert::Tensor(xw, _) = d_old.verts[lo[1]] else {
                unreachable!()
            };
            xw
        }
        MoveKind::LambdaStrip => {
            let Vert::Tensor(_, yw) = d_old.verts[lo[1]] else {
                unreachable!()
            };
            yw
        }
        _ => unreachable!(),
    };
    let new_wire = match old_wire {
        Wire::In(i) => Wire::In(i),
        Wire::TOut(v) | Wire::DOutL(v) | Wire::DOutR(v) | Wire::IOut(v) => {
            let nv = step
                .survivors
                .iter()
                .find(|&&(o, _)| o == v)
                .map(|&(_, n)| n)
                .expect("carrier survives");
            match old_wire {
                Wire::TOut(_) => Wire::TOut(nv),
                Wire::DOutL(_) => Wire::DOutL(nv),
                Wire::DOutR(_) => Wire::DOutR(nv),
                Wire::IOut(_) => Wire::IOut(nv),
                Wire::In(_) => unreachable!(),
            }
        }
    };
    vec![step.after.resolve(ch, new_wire, tuple)]
}

/// The block coefficient connecting local channel data across one move.
fn block_entry(
    datum: &BitensorDatum,
    kind: MoveKind,
    boundary: &[usize],
    local_new: &[VData],
    local_old: &[VData],
) -> Option<Scalar> {
    match kind {
        MoveKind::Alpha => {
            let (a, b, c, p) = (boundary[0], boundary[1], boundary[2], boundary[3]);
            let (m, mu) = match &local_old[0] {
                VData::T { out, mu } => (*out, *mu),
                _ => unreachable!(),
            };
            let nu = match &local_old[1] {
                VData::T { mu, .. } => *mu,
                _ => unreachable!(),
            };
            let (n, rho) = match &local_new[0] {
                VData::T { out, mu } => (*out, *mu),
                _ => unreachable!(),
            };
            let sigma = match &local_new[1] {
                VData::T { mu, .. } => *mu,
                _ => unreachable!(),
            };
            let left = left3_channels(&datum.base.fusion, a, b, c, p);
            let right = right3_channels(&datum.base.fusion, a, b, c, p);
            let col = left.iter().position(|&t| t == (m, mu, nu))?;
            let row = right.iter().position(|&t| t == (n, rho, sigma))?;
            datum.base.f_block(a, b, c, p).get(row, col).cloned()
        }
        MoveKind::Beta => {
            let (k, a, b, c) = (boundary[0], boundary[1], boundary[2], boundary[3]);
            let (m, mu1) = match &local_old[0] {
                VData::D { l, mu, .. } => (*l, *mu),
                _ => unreachable!(),
            };
            let mu2 = match &local_old[1] {
                VData::D { mu, .. } => *mu,
                _ => unreachable!(),
            };
            let (n, nu1) = match &local_new[0] {
                VData::D { r, mu, .. } => (*r, *mu),
                _ => unreachable!(),
            };
            let nu2 = match &local_new[1] {
                VData::D { mu, .. } => *mu,
                _ => unreachable!(),
            };
            let left = datum.cochannels_left3(k, a, b, c);
            let right = datum.cochannels_right3(k, a, b, c);
            let col = left.iter().position(|&t| t == (m, mu1, mu2))?;
            let row = right.iter().position(|&t| t == (n, nu1, nu2))?;
            datum.cof_block(k, a, b, c).get(row, col).cloned()
        }
        MoveKind::Kappa => {
            let (x, y, u, v) = (boundary[0], boundary[1], boundary[2], boundary[3]);
            let (w, s) = match &local_old[0] {
                VData::T { out, mu } => (*out, *mu),
                _ => unreachable!(),
            };
            let m = match &local_old[1] {
                VData::D { mu, .. } => *mu,
                _ => unreachable!(),
            };
            let (a, b, mu) = match &local_new[0] {
                VData::D { l, r, mu } => (*l, *r, *mu),
                _ => unreachable!(),
            };
            let (c, dd, nu) = match &local_new[1] {
                VData::D { l, r, mu } => (*l, *r, *mu),
                _ => unreachable!(),
            };
            let rho = match &local_new[2] {
                VData::T { mu, .. } => *mu,
                _ => unreachable!(),
            };
            let sigma = match &local_new[3] {
                VData::T { mu, .. } => *mu,
                _ => unreachable!(),
            };
            let src = datum.kappa_src(x, y, u, v);
            let tgt = datum.kappa_tgt(x, y, u, v);
            let col = src.iter().position(|&t| t == (w, s, m))?;
            let row = tgt
                .iter()
                .position(|&t| t == (a, b, c, dd, mu, nu, rho, sigma))?;
            datum.kappa_block(x, y, u, v).get(row, col).cloned()
        }
        MoveKind::EpsMult => {
            let (x, y) = (boundary[0], boundary[1]);
            let (w, s) = match &local_old[0] {
                VData::T { out, mu } => (*out, *mu),
                _ => unreachable!(),
            };
            let q = match &local_old[1] {
                VData::C { q } => *q,
                _ => unreachable!(),
            };
            let q1 = match &local_new[0] {
                VData::C { q } => *q,
                _ => unreachable!(),
            };
            let q2 = match &local_new[1] {
                VData::C { q } => *q,
                _ => unreachable!(),
            };
            // source channels (w, s, q); target channels (q1, q2)
            let mut col = None;
            let mut idx = 0;
            for ww in 0..datum.rank() {
                for ss in 0..datum.base.n(x, y, ww) {
                    for qq in 0..datum.eps_dim(ww) {
                        if (ww, ss, qq) == (w, s, q) {
                            col = Some(idx);
                        }
                        idx += 1;
                    }
                }
            }
            let row = q1 * datum.eps_dim(y) + q2;
            datum.eps_mult_block(x, y).get(row, col?).cloned()
        }
        MoveKind::Tau => {
            let (b, c) = (boundary[0], boundary[1]);
            let u = datum.unit_mults();
            let (a, mu_u) = match &local_old[0] {
                VData::I { a, mu } => (*a, *mu),
                _ => unreachable!(),
            };
            let m = match &local_old[1] {
                VData::D { mu, .. } => *mu,
                _ => unreachable!(),
            };
            let nu1 = match &local_new[0] {
                VData::I { mu, .. } => *mu,
                _ => unreachable!(),
            };
            let nu2 = match &local_new[1] {
                VData::I { mu, .. } => *mu,
                _ => unreachable!(),
            };
            let mut col = None;
            let mut idx = 0;
            for k in 0..datum.rank() {
                for uu in 0..u[k] {
                    for mm in 0..datum.dm(k, b, c) {
                        if (k, uu, mm) == (a, mu_u, m) {
                            col = Some(idx);
                        }
                        idx += 1;
                    }
                }
            }
            let row = nu1 * u[c] + nu2;
            datum.tau_block(b, c).get(row, col?).cloned()
        }
        MoveKind::Eta => Some(datum.eta_scalar()),
        MoveKind::RStrip => Some(datum.r_scalar(boundary[0])),
        MoveKind::LStrip => Some(datum.l_scalar(boundary[0])),
        MoveKind::RhoStrip => Some(datum.rho_scalar(boundary[0])),
        MoveKind::LambdaStrip => Some(datum.lambda_scalar(boundary[0])),
    }
}

// ---------------------------------------------------------------------------
// normal forms and commensuration
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputFate {
    Eps,
    Burst(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlotForm {
    Unit,
    Product(Vec<(usize, usize)>),
}

/// The canonical shape a word normalizes to: per-input coproduct burst
/// sizes (or a counit), and per-output-slot ordered cofactor lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub inputs: Vec<InputFate>,
    pub slots: Vec<SlotForm>,
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "inputs[")?;
        for (i, fate) in self.inputs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match fate {
                InputFate::Eps => write!(f, "eps")?,
                InputFate::Burst(k) => write!(f, "d{k}")?,
            }
        }
        write!(f, "] slots[")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                SlotForm::Unit => write!(f, "I")?,
                SlotForm::Product(v) => {
                    for (j, (t, c)) in v.iter().enumerate() {
                        if j > 0 {
                            write!(f, "*")?;
                        }
                        write!(f, "{t}.{c}")?;
                    }
                }
            }
        }
        write!(f, "]")
    }
}

/// Reads the normal form off a fully normalized dag and rebuilds it in the
/// canonical vertex order, with the vid mapping final -> canonical.
pub fn extract_normal_form(dag: &Dag) -> Result<(NormalForm, Dag, Vec<usize>)> {
    let nv = dag.verts.len();
    // consumer of each wire
    let mut consumer: HashMap<Wire, usize> = HashMap::new();
    for (vid, v) in dag.verts.iter().enumerate() {
        for w in vert_input_wires(v) {
            if consumer.insert(w, vid).is_some() {
                return Err(Error::Other("wire consumed twice".into()));
            }
        }
    }
    let mut fate = Vec::new();
    let mut cof_wire: HashMap<Wire, (usize, usize)> = HashMap::new();
    let mut role: Vec<Option<usize>> = vec![None; nv]; // final vid -> canonical vid
    let mut canon_verts: Vec<Vert> = Vec::new();
    let mut pending_inputs: Vec<Vec<(usize, Wire)>> = Vec::new(); // canonical burst verts per input

    for i in 0..dag.n_in {
        let mut w = Wire::In(i);
        match consumer.get(&w) {
            Some(&vid) if matches!(dag.verts[vid], Vert::Counit(_)) => {
                fate.push(InputFate::Eps);
                pending_inputs.push(vec![(vid, w)]);
            }
            Some(&vid) if matches!(dag.verts[vid], Vert::Delta(_)) => {
                // right-coassociated burst
                let mut burst = Vec::new();
                let mut cofs = Vec::new();
                let mut cur = vid;
                loop {
                    burst.push((cur, w));
                    cofs.push(Wire::DOutL(cur));
                    w = Wire::DOutR(cur);
                    match consumer.get(&w) {
                        Some(&nxt) if matches!(dag.verts[nxt], Vert::Delta(_)) => cur = nxt,
                        _ => break,
                    }
                }
                cofs.push(w);
                for (ci, cw) in cofs.iter().enumerate() {
                    cof_wire.insert(*cw, (i, ci));
                }
                fate.push(InputFate::Burst(cofs.len()));
                pending_inputs.push(burst);
            }
            _ => {
                // bare input used directly
                cof_wire.insert(w, (i, 0));
                fate.push(InputFate::Burst(1));
                pending_inputs.push(vec![]);
            }
        }
    }

    // canonical input processing verts
    for (i, burst) in pending_inputs.iter().enumerate() {
        match &fate[i] {
            InputFate::Eps => {
                let (vid, _) = burst[0];
                role[vid] = Some(canon_verts.len());
                canon_verts.push(Vert::Counit(Wire::In(i)));
            }
            InputFate::Burst(k) => {
                let mut prev: Option<usize> = None;
                for (bi, &(vid, _)) in burst.iter().enumerate() {
                    let cid = canon_verts.len();
                    role[vid] = Some(cid);
                    let input = match prev {
                        None => Wire::In(i),
                        Some(p) => Wire::DOutR(p),
                    };
                    canon_verts.push(Vert::Delta(input));
                    prev = Some(cid);
                    let _ = bi;
                }
                let _ = k;
            }
        }
    }
    // canonical cofactor wires
    let mut canon_cof: HashMap<(usize, usize), Wire> = HashMap::new();
    {
        let mut canon_idx = 0usize;
        for (i, f) in fate.iter().enumerate() {
            match f {
                InputFate::Eps => {
                    canon_idx += 1;
                }
                InputFate::Burst(k) => {
                    if pending_inputs[i].is_empty() {
                        canon_cof.insert((i, 0), Wire::In(i));
                    } else {
                        let first = canon_idx;
                        for c in 0..*k - 1 {
                            canon_cof.insert((i, c), Wire::DOutL(first + c));
                        }
                        canon_cof.insert((i, k - 1), Wire::DOutR(first + k - 2));
                        canon_idx += k - 1;
                    }
                }
            }
        }
    }

    // slots
    let mut slots = Vec::new();
    let mut canon_outs = Vec::new();
    for &ow in &dag.outs {
        if let Some(&(t, c)) = cof_wire.get(&ow) {
            slots.push(SlotForm::Product(vec![(t, c)]));
            canon_outs.push(canon_cof[&(t, c)]);
            continue;
        }
        match ow {
            Wire::IOut(vid) => {
                let cid = canon_verts.len();
                role[vid] = Some(cid);
                canon_verts.push(Vert::UnitI);
                slots.push(SlotForm::Unit);
                canon_outs.push(Wire::IOut(cid));
            }
            Wire::TOut(tv) => {
                // right-comb product: collect leaves and the spine
                let mut spine = Vec::new();
                let mut leaves = Vec::new();
                let mut cur = tv;
                loop {
                    let Vert::Tensor(a, b) = dag.verts[cur] else {
                        return Err(Error::Other("slot product is not a tensor comb".into()));
                    };
                    spine.push(cur);
                    let Some(&la) = cof_wire.get(&a) else {
                        return Err(Error::Other("product leaf is not a cofactor".into()));
                    };
                    leaves.push(la);
                    match b {
                        Wire::TOut(nxt) => cur = nxt,
                        _ => {
                            let Some(&lb) = cof_wire.get(&b) else {
                                return Err(Error::Other("product leaf is not a cofactor".into()));
                            };
                            leaves.push(lb);
                            break;
                        }
                    }
                }
                // canonical: innermost first
                let k = leaves.len();
                let mut prev: Option<usize> = None;
                for d in (0..k - 1).rev() {
                    let cid = canon_verts.len();
                    role[spine[d]] = Some(cid);
                    let left = canon_cof[&leaves[d]];
                    let right = match prev {
                        None => canon_cof[&leaves[d + 1]],
                        Some(p) => Wire::TOut(p),
                    };
                    canon_verts.push(Vert::Tensor(left, right));
                    prev = Some(cid);
                }
                slots.push(SlotForm::Product(leaves));
                canon_outs.push(Wire::TOut(prev.unwrap()));
            }
            _ => {
                return Err(Error::Other(
                    "unrecognized output wire in normal form".into(),
                ))
            }
        }
    }

    // every vertex must have a role
    let map: Result<Vec<usize>> = role
        .into_iter()
        .enumerate()
        .map(|(v, r)| r.ok_or_else(|| Error::Other(format!("vertex {v} not in normal form"))))
        .collect();
    let map = map?;
    let canon = Dag {
        n_in: dag.n_in,
        verts: canon_verts,
        outs: canon_outs,
    };
    Ok((
        NormalForm {
            inputs: fate,
            slots,
        },
        canon,
        map,
    ))
}

/// The product of all step matrices for a normalization plan at one tuple,
/// re-expressed in the canonical dag's channel order.
pub fn plan_matrix(
    datum: &BitensorDatum,
    start: &Dag,
    steps: &[Step],
    canon: &Dag,
    vid_map: &[usize],
    tuple: &[usize],
) -> Mat<Scalar> {
    let start_n = start.channels(datum, tuple).len();
    let mut m = Mat::identity(start_n, &datum.base.field.one());
    for s in steps {
        let sm = step_matrix(datum, s, tuple);
        m = sm.mul(&m);
    }
    // permutation from the final dag's channel order to the canonical order
    let final_dag = steps.last().map(|s| &s.after).unwrap_or(start);
    let final_ch = final_dag.channels(datum, tuple);
    let canon_ch = canon.channels(datum, tuple);
    let mut canon_index: HashMap<WChannel, usize> = HashMap::new();
    for (i, c) in canon_ch.iter().enumerate() {
        canon_index.insert(c.clone(), i);
    }
    let mut perm = Mat::new(canon_ch.len(), final_ch.len());
    let one = datum.base.field.one();
    for (fi, fc) in final_ch.iter().enumerate() {
        let mut cc: WChannel =
            vec![VData::C { q: usize::MAX }; canon_ch.first().map(|c| c.len()).unwrap_or(0)];
        for (fv, data) in fc.iter().enumerate() {
            cc[vid_map[fv]] = data.clone();
        }
        let ci = canon_index
            .get(&cc)
            .copied()
            .expect("canonical channel exists");
        perm.set(ci, fi, one.clone());
    }
    perm.mul(&m)
}

/// A word together with its normalization, ready to produce matrices.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub start: Dag,
    pub steps: Vec<Step>,
    pub form: NormalForm,
    pub canon: Dag,
    pub vid_map: Vec<usize>,
}

pub fn normalize_full(dag: &Dag) -> Result<Normalized> {
    let steps = normalize(dag);
    let final_dag = steps
        .last()
        .map(|s| s.after.clone())
        .unwrap_or_else(|| dag.clone());
    let (form, canon, vid_map) = extract_normal_form(&final_dag)?;
    Ok(Normalized {
        start: dag.clone(),
        steps,
        form,
        canon,
        vid_map,
    })
}

impl Normalized {
    pub fn matrix(&self, datum: &BitensorDatum, tuple: &[usize]) -> Mat<Scalar> {
        plan_matrix(
            datum,
            &self.start,
            &self.steps,
            &self.canon,
            &self.vid_map,
            tuple,
        )
    }
}

/// The unique coherence isomorphism between two commensurable words, per
/// input tuple: normalize both and compose one with the inverse of the
/// other.
pub fn commensuration(
    datum: &BitensorDatum,
    src: &Normalized,
    tgt: &Normalized,
    tuple: &[usize],
) -> Result<Mat<Scalar>> {
    if src.form != tgt.form {
        return Err(Error::NotCommensurable(
            src.form.to_string(),
            tgt.form.to_string(),
        ));
    }
    let ms = src.matrix(datum, tuple);
    let mt = tgt.matrix(datum, tuple);
    Ok(invert(&mt)?.mul(&ms))
}

// ---------------------------------------------------------------------------
// standard words
// ---------------------------------------------------------------------------

/// Builds the i-input left-comb product followed by the j-output right-comb
/// coproduct (the source functor of a bicomplex space).
pub fn word_f_std(i: usize, j: usize) -> Dag {
    let mut verts = Vec::new();
    let base = append_left_comb_product(&mut verts, &(0..i).map(Wire::In).collect::<Vec<_>>());
    let outs = append_right_comb_coproduct(&mut verts, base, j);
    Dag {
        n_in: i,
        verts,
        outs,
    }
}

/// Builds the per-input left-comb coproducts, the grading shuffle, and the
/// per-slot right-comb products (the target functor).
pub fn word_g_std(i: usize, j: usize) -> Dag {
    let mut verts = Vec::new();
    let mut cof: Vec<Vec<Wire>> = Vec::new();
    for t in 0..i {
        cof.push(append_left_comb_coproduct(&mut verts, Wire::In(t), j));
    }
    let mut outs = Vec::new();
    for r in 0..j {
        let leaves: Vec<Wire> = (0..i).map(|t| cof[t][r]).collect();
        outs.push(append_right_comb_product(&mut verts, &leaves));
    }
    Dag {
        n_in: i,
        verts,
        outs,
    }
}

/// ((w0 w1) w2) ...; empty list gives the unit object.
pub fn append_left_comb_product(verts: &mut Vec<Vert>, ws: &[Wire]) -> Wire {
    if ws.is_empty() {
        verts.push(Vert::UnitI);
        return Wire::IOut(verts.len() - 1);
    }
    let mut acc = ws[0];
    for &w in &ws[1..] {
        verts.push(Vert::Tensor(acc, w));
        acc = Wire::TOut(verts.len() - 1);
    }
    acc
}

/// w0 (w1 (w2 ...)); built innermost-first; empty list gives the unit.
pub fn append_right_comb_product(verts: &mut Vec<Vert>, ws: &[Wire]) -> Wire {
    if ws.is_empty() {
        verts.push(Vert::UnitI);
        return Wire::IOut(verts.len() - 1);
    }
    let mut acc = ws[ws.len() - 1];
    for &w in ws[..ws.len() - 1].iter().rev() {
        verts.push(Vert::Tensor(w, acc));
        acc = Wire::TOut(verts.len() - 1);
    }
    acc
}

/// Right-comb coproduct burst of `base` into j cofactors; j = 0 applies the
/// counit and yields no output wires.
pub fn append_right_comb_coproduct(verts: &mut Vec<Vert>, base: Wire, j: usize) -> Vec<Wire> {
    if j == 0 {
        verts.push(Vert::Counit(base));
        return vec![];
    }
    if j == 1 {
        return vec![base];
    }
    let mut outs = Vec::new();
    let mut cur = base;
    for _ in 0..j - 1 {
        verts.push(Vert::Delta(cur));
        let d = verts.len() - 1;
        outs.push(Wire::DOutL(d));
        cur = Wire::DOutR(d);
    }
    outs.push(cur);
    outs
}

/// Left-comb coproduct burst: coproducts applied repeatedly to the first
/// cofactor; j = 0 applies the counit.
pub fn append_left_comb_coproduct(verts: &mut Vec<Vert>, base: Wire, j: usize) -> Vec<Wire> {
    if j == 0 {
        verts.push(Vert::Counit(base));
        return vec![];
    }
    if j == 1 {
        return vec![base];
    }
    // first coproduct splits off the last cofactor, and so on
    let mut tail = Vec::new();
    let mut cur = base;
    for _ in 0..j - 1 {
        verts.push(Vert::Delta(cur));
        let d = verts.len() - 1;
        tail.push(Wire::DOutR(d));
        cur = Wire::DOutL(d);
    }
    let mut outs = vec![cur];
    outs.extend(tail.into_iter().rev());
    outs
}

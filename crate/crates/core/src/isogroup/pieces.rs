//! Pieces of a 2-connected graph and the ± quotient of the piece/cycle
//! incidence graph.
//!
//! A piece is a class of directed edges lying on exactly the same simple
//! cycles of length ≥ 3. Every such cycle is a disjoint union of pieces, so
//! a signed map of piece classes that sends cycle unions to cycle unions,
//! combined with any relabeling inside the pieces, is cycle-preserving.

use std::collections::HashMap;

use serde::Serialize;

use super::Caps;
use crate::error::{Error, Result};
use crate::graphkit::{is_2_connected, CycleSet, DirectedSymGraph, EdgeId, SimpleCycle};
use crate::whitney::SignedEdgeBijection;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceDecomposition {
    /// Sorted directed-edge sets, ordered by smallest edge.
    pub pieces: Vec<Vec<EdgeId>>,
    /// Simple directed cycles with at least 3 edges.
    #[serde(skip)]
    pub cycles: Vec<SimpleCycle>,
    /// Pieces making up each cycle.
    pub cycle_pieces: Vec<Vec<usize>>,
    /// `λ(p) = |p|`.
    pub labels: Vec<usize>,
    /// Index of `−p`.
    pub neg: Vec<usize>,
    /// Piece containing each directed edge.
    #[serde(skip)]
    pub piece_of: Vec<usize>,
    pub quotient: Quotient,
}

/// `([V], [F], λ)`: classes `{p, −p}` of pieces and `{c, −c}` of cycles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Quotient {
    /// The two pieces of each class; the first has the smaller edge and is
    /// the representative.
    pub classes: Vec<[usize; 2]>,
    pub class_of: Vec<usize>,
    pub labels: Vec<usize>,
    /// Piece classes adjacent to each cycle class, sorted.
    pub cycle_classes: Vec<Vec<usize>>,
}

impl PieceDecomposition {
    /// `incidence[p][c]`: piece `p` lies on cycle `c`.
    pub fn incidence(&self) -> Vec<Vec<bool>> {
        let mut out = vec![vec![false; self.cycles.len()]; self.pieces.len()];
        for (c, ps) in self.cycle_pieces.iter().enumerate() {
            for &p in ps {
                out[p][c] = true;
            }
        }
        out
    }

    /// `e_i^p`: the representative of each class lists its edges sorted and
    /// the negative piece lists their reverses in the same order.
    pub fn enumerated(&self, p: usize) -> Vec<EdgeId> {
        let [rep, _] = self.quotient.classes[self.quotient.class_of[p]];
        let base = &self.pieces[rep];
        if p == rep {
            base.clone()
        } else {
            base.iter().map(|e| e.rev()).collect()
        }
    }

    /// σ built from a signed class map `class ↦ (image class, flip)` and a
    /// permutation of positions inside each class. `None` if the result is
    /// not cycle-preserving.
    pub fn assemble(&self, image: &[(usize, bool)], inner: &[Vec<usize>], cycles: &CycleSet) -> Option<SignedEdgeBijection> {
        let n_edges = self.piece_of.len() / 2;
        let q = &self.quotient;
        let mut forward = vec![EdgeId(0); n_edges];
        for (c, &[rep, _]) in q.classes.iter().enumerate() {
            let (target, flip) = image[c];
            let [trep, _] = q.classes[target];
            let src = &self.pieces[rep];
            let dst = &self.pieces[trep];
            if src.len() != dst.len() {
                return None;
            }
            for (i, &e) in src.iter().enumerate() {
                let mut f = dst[inner[c][i]];
                if flip {
                    f = f.rev();
                }
                let (e, f) = if e.is_reversed() { (e.rev(), f.rev()) } else { (e, f) };
                forward[e.undirected()] = f;
            }
        }
        let sigma = SignedEdgeBijection::from_forward_images(&forward);
        self.cycles
            .iter()
            .all(|c| {
                let img: Vec<EdgeId> = c.edges().iter().map(|&e| sigma.apply(e)).collect();
                cycles.contains_edges(&img)
            })
            .then_some(sigma)
    }
}

/// Pieces of a 2-connected graph.
pub fn pieces(g: &DirectedSymGraph, caps: &Caps) -> Result<PieceDecomposition> {
    if !is_2_connected(g).connected {
        return Err(Error::GraphNot2Connected);
    }
    let cycles = caps.long_cycles(g)?;
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); g.num_directed()];
    for (i, c) in cycles.iter().enumerate() {
        for &e in c.edges() {
            membership[e.index()].push(i);
        }
    }
    let mut groups: HashMap<&[usize], Vec<EdgeId>> = HashMap::new();
    for e in g.directed_edges() {
        groups.entry(&membership[e.index()]).or_default().push(e);
    }
    let mut pieces: Vec<Vec<EdgeId>> = groups.into_values().collect();
    for p in &mut pieces {
        p.sort_unstable();
    }
    pieces.sort();
    let mut piece_of = vec![0; g.num_directed()];
    for (i, p) in pieces.iter().enumerate() {
        for &e in p {
            piece_of[e.index()] = i;
        }
    }
    let neg: Vec<usize> = pieces.iter().map(|p| piece_of[p[0].rev().index()]).collect();
    let labels: Vec<usize> = pieces.iter().map(Vec::len).collect();
    let cycle_pieces: Vec<Vec<usize>> = cycles
        .iter()
        .map(|c| {
            let mut ps: Vec<usize> = c.edges().iter().map(|e| piece_of[e.index()]).collect();
            ps.sort_unstable();
            ps.dedup();
            ps
        })
        .collect();

    let mut classes = Vec::new();
    let mut class_of = vec![usize::MAX; pieces.len()];
    for p in 0..pieces.len() {
        if class_of[p] == usize::MAX {
            class_of[p] = classes.len();
            class_of[neg[p]] = classes.len();
            classes.push([p, neg[p]]);
        }
    }
    let class_labels = classes.iter().map(|&[p, _]| labels[p]).collect();
    let mut cycle_classes: Vec<Vec<usize>> = cycle_pieces
        .iter()
        .map(|ps| {
            let mut cs: Vec<usize> = ps.iter().map(|&p| class_of[p]).collect();
            cs.sort_unstable();
            cs.dedup();
            cs
        })
        .collect();
    // c and −c have the same class set; keep one entry per cycle class.
    let mut keep: Vec<(SimpleCycle, Vec<usize>)> = Vec::new();
    for (c, cs) in cycles.iter().zip(cycle_classes.drain(..)) {
        if *c <= c.reversed() {
            keep.push((c.clone(), cs));
        }
    }
    let cycle_classes = keep.into_iter().map(|(_, cs)| cs).collect();
    Ok(PieceDecomposition {
        pieces,
        cycles,
        cycle_pieces,
        labels,
        neg,
        piece_of,
        quotient: Quotient { classes, class_of, labels: class_labels, cycle_classes },
    })
}

/// Permutations of the piece classes preserving labels and mapping the
/// family of cycle-class neighbourhoods onto itself (with multiplicity).
/// A cycle class is determined by its neighbourhood, so these are the
/// automorphisms of the quotient as seen on `[V₁]`.
pub fn quotient_automorphisms(q: &Quotient) -> Vec<Vec<usize>> {
    let k = q.labels.len();
    let mut family: HashMap<Vec<usize>, usize> = HashMap::new();
    for cs in &q.cycle_classes {
        *family.entry(cs.clone()).or_default() += 1;
    }
    // Invariant per class: label and sorted sizes of its neighbourhoods.
    let mut invariant: Vec<(usize, Vec<usize>)> = q.labels.iter().map(|&l| (l, Vec::new())).collect();
    for cs in &q.cycle_classes {
        for &c in cs {
            invariant[c].1.push(cs.len());
        }
    }
    for inv in &mut invariant {
        inv.1.sort_unstable();
    }
    // A neighbourhood is checked once its largest member is assigned.
    let mut due: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); k];
    for cs in family.keys() {
        if let Some(&last) = cs.last() {
            due[last].push(cs);
        }
    }
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; k];
    let mut used = vec![false; k];
    extend(0, &invariant, &family, &due, &mut perm, &mut used, &mut out);
    out
}

fn extend(
    i: usize,
    invariant: &[(usize, Vec<usize>)],
    family: &HashMap<Vec<usize>, usize>,
    due: &[Vec<&Vec<usize>>],
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    if i == perm.len() {
        out.push(perm.clone());
        return;
    }
    for t in 0..perm.len() {
        if used[t] || invariant[t] != invariant[i] {
            continue;
        }
        perm[i] = t;
        used[t] = true;
        let ok = due[i].iter().all(|cs| {
            let mut img: Vec<usize> = cs.iter().map(|&c| perm[c]).collect();
            img.sort_unstable();
            family.get(&img) == family.get(*cs)
        });
        if ok {
            extend(i + 1, invariant, family, due, perm, used, out);
        }
        used[t] = false;
    }
}

/// Orientation choices `flip[c]` making the class map `perm` (with trivial
/// inner permutations) cycle-preserving. Backtracks over classes and checks
/// each cycle once its classes are fixed.
pub(crate) fn sign_lifts(dec: &PieceDecomposition, perm: &[usize], cycles: &CycleSet) -> Vec<Vec<bool>> {
    let q = &dec.quotient;
    let k = q.classes.len();
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, ps) in dec.cycle_pieces.iter().enumerate() {
        let last = ps.iter().map(|&p| q.class_of[p]).max().unwrap();
        due[last].push(i);
    }
    let mut out = Vec::new();
    let mut flip = vec![false; k];
    signs(dec, perm, cycles, &due, 0, &mut flip, &mut out);
    out
}

fn signs(
    dec: &PieceDecomposition,
    perm: &[usize],
    cycles: &CycleSet,
    due: &[Vec<usize>],
    c: usize,
    flip: &mut Vec<bool>,
    out: &mut Vec<Vec<bool>>,
) {
    if c == flip.len() {
        out.push(flip.clone());
        return;
    }
    let q = &dec.quotient;
    for f in [false, true] {
        flip[c] = f;
        let ok = due[c].iter().all(|&i| {
            let mut img = Vec::with_capacity(dec.cycles[i].len());
            for &p in &dec.cycle_pieces[i] {
                let cls = q.class_of[p];
                let [trep, tneg] = q.classes[perm[cls]];
                // p is the representative or its negative; flip swaps the side.
                let same_side = (p == q.classes[cls][0]) != flip[cls];
                let target = if same_side { trep } else { tneg };
                img.extend_from_slice(&dec.pieces[target]);
            }
            cycles.contains_edges(&img)
        });
        if ok {
            signs(dec, perm, cycles, due, c + 1, flip, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphkit::families;

    fn dec(g: &DirectedSymGraph) -> PieceDecomposition {
        pieces(g, &Caps::default()).unwrap()
    }

    #[test]
    fn spec_piece_counts() {
        let c4 = dec(&families::cycle(4));
        assert_eq!(c4.pieces.len(), 2);
        assert_eq!(c4.labels, vec![4, 4]);
        let theta = dec(&families::theta(&[1, 1, 1]));
        assert_eq!(theta.pieces.len(), 6);
        assert!(theta.labels.iter().all(|&l| l == 2));
        let k4 = dec(&families::complete(4));
        assert_eq!(k4.pieces.len(), 12);
        assert!(k4.labels.iter().all(|&l| l == 1));
    }

    #[test]
    fn structural_invariants() {
        for g in [families::cycle(5), families::theta(&[1, 2, 2]), families::complete(4), families::prism()] {
            let d = dec(&g);
            let mut all: Vec<EdgeId> = d.pieces.iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, g.directed_edges().collect::<Vec<_>>());
            for p in 0..d.pieces.len() {
                assert_eq!(d.neg[d.neg[p]], p);
                assert_eq!(d.labels[d.neg[p]], d.labels[p]);
                let mut negs: Vec<EdgeId> = d.pieces[p].iter().map(|e| e.rev()).collect();
                negs.sort_unstable();
                assert_eq!(negs, d.pieces[d.neg[p]]);
            }
            for (c, ps) in d.cycles.iter().zip(&d.cycle_pieces) {
                let total: usize = ps.iter().map(|&p| d.labels[p]).sum();
                assert_eq!(total, c.len());
            }
        }
    }

    #[test]
    fn quotient_automorphisms_of_small_graphs() {
        assert_eq!(quotient_automorphisms(&dec(&families::cycle(4)).quotient).len(), 1);
        assert_eq!(quotient_automorphisms(&dec(&families::theta(&[1, 1, 1])).quotient).len(), 6);
        assert_eq!(quotient_automorphisms(&dec(&families::theta(&[1, 1, 2])).quotient).len(), 2);
        assert_eq!(quotient_automorphisms(&dec(&families::complete(4)).quotient).len(), 24);
    }

    #[test]
    fn identity_lifts_with_both_global_signs() {
        for g in [families::cycle(3), families::theta(&[1, 1, 1]), families::complete(4)] {
            let d = dec(&g);
            let set = CycleSet::new(&d.cycles);
            let id: Vec<usize> = (0..d.quotient.classes.len()).collect();
            let lifts = sign_lifts(&d, &id, &set);
            assert_eq!(lifts.len(), 2);
        }
    }
}

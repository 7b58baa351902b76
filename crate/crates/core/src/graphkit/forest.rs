//! Spanning forests ("bases"), unoriented cycles and ranks of molecule
//! families.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::DirectedSymGraph;
use crate::error::{Error, Result};
use crate::metric::{elementary_molecule, FiniteMetricSpace};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Number of edges in a spanning forest of the edge set `sub`.
fn forest_rank(g: &DirectedSymGraph, sub: &[usize]) -> usize {
    let mut uf = UnionFind::new(g.num_vertices());
    sub.iter().filter(|&&k| uf.union(g.edges()[k].0, g.edges()[k].1)).count()
}

/// Whether `e0` is a spanning forest of the subgraph formed by `sub`.
pub fn is_basis_of(g: &DirectedSymGraph, sub: &[usize], e0: &[usize]) -> bool {
    let within: HashSet<usize> = sub.iter().copied().collect();
    let mut distinct = HashSet::new();
    if !e0.iter().all(|k| within.contains(k) && distinct.insert(*k)) {
        return false;
    }
    let mut uf = UnionFind::new(g.num_vertices());
    if !e0.iter().all(|&k| uf.union(g.edges()[k].0, g.edges()[k].1)) {
        return false;
    }
    e0.len() == forest_rank(g, sub)
}

/// Whether `e0` is a spanning forest of the whole graph.
pub fn is_basis(g: &DirectedSymGraph, e0: &[usize]) -> bool {
    let all: Vec<usize> = (0..g.num_edges()).collect();
    is_basis_of(g, &all, e0)
}

/// Greedily extends the acyclic part of `start` to a spanning forest of
/// `sub`, scanning `sub` in order.
pub fn extend_to_basis(g: &DirectedSymGraph, sub: &[usize], start: &[usize]) -> Vec<usize> {
    let mut uf = UnionFind::new(g.num_vertices());
    let mut out = Vec::new();
    for &k in start.iter().chain(sub) {
        if uf.union(g.edges()[k].0, g.edges()[k].1) {
            out.push(k);
        }
    }
    out.sort_unstable();
    out
}

/// A spanning forest of `sub` from a random edge order.
pub fn random_basis<R: Rng + ?Sized>(g: &DirectedSymGraph, sub: &[usize], rng: &mut R) -> Vec<usize> {
    let mut order = sub.to_vec();
    order.shuffle(rng);
    extend_to_basis(g, &order, &[])
}

/// Every spanning forest of `sub`. Exponential; meant for small edge sets.
pub fn exhaustive_bases(g: &DirectedSymGraph, sub: &[usize]) -> Vec<Vec<usize>> {
    let r = forest_rank(g, sub);
    let mut sorted = sub.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(r);
    choose(g, &sorted, 0, r, &mut chosen, &mut out);
    out
}

fn choose(g: &DirectedSymGraph, pool: &[usize], from: usize, r: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if chosen.len() == r {
        out.push(chosen.clone());
        return;
    }
    for i in from..pool.len() {
        if pool.len() - i < r - chosen.len() {
            break;
        }
        chosen.push(pool[i]);
        let mut uf = UnionFind::new(g.num_vertices());
        if chosen.iter().all(|&k| uf.union(g.edges()[k].0, g.edges()[k].1)) {
            choose(g, pool, i + 1, r, chosen, out);
        }
        chosen.pop();
    }
}

/// Whether a set of directed pairs contains a cycle once orientations are
/// forgotten. Pairs `(x, y)` and `(y, x)` together are rejected.
pub fn has_unoriented_cycle(pairs: &[(usize, usize)]) -> Result<bool> {
    let set: HashSet<(usize, usize)> = pairs.iter().copied().collect();
    if set.iter().any(|&(a, b)| a == b || set.contains(&(b, a))) {
        return Err(Error::OppositePairPresent);
    }
    let n = set.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let mut uf = UnionFind::new(n);
    Ok(!set.iter().all(|&(a, b)| uf.union(a, b)))
}

/// Rank of a list of vectors by Gaussian elimination.
pub fn rank_of<S: Scalar>(mut rows: Vec<Vec<S>>) -> usize {
    let Some(width) = rows.first().map(Vec::len) else { return 0 };
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero_tol()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero_tol() {
                continue;
            }
            let f = rows[r][col].clone() / pivot.clone();
            for c in col..width {
                let sub = f.clone() * rows[rank][c].clone();
                rows[r][c] = rows[r][c].clone() - sub;
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of the span of the elementary molecules `m_{xy}` for the given
/// pairs, as vectors indexed by the points.
pub fn molecule_rank<S: Scalar>(space: &FiniteMetricSpace<S>, pairs: &[(usize, usize)]) -> Result<usize> {
    let n = space.len();
    let mut rows = Vec::with_capacity(pairs.len());
    for &(x, y) in pairs {
        let m = elementary_molecule(space, x, y)?;
        let mut row = vec![S::zero(); n];
        for (i, c) in m.iter() {
            row[i] = c.clone();
        }
        rows.push(row);
    }
    Ok(rank_of(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphkit::{families, graph_metric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bases_of_triangle() {
        let g = families::complete(3);
        assert!(is_basis(&g, &[0, 1]));
        assert!(!is_basis(&g, &[0, 1, 2]));
        assert!(!is_basis(&g, &[0]));
        assert!(!is_basis(&g, &[0, 0]));
        assert_eq!(exhaustive_bases(&g, &[0, 1, 2]).len(), 3);
    }

    #[test]
    fn k4_has_sixteen_spanning_trees() {
        let g = families::complete(4);
        let all: Vec<usize> = (0..6).collect();
        let trees = exhaustive_bases(&g, &all);
        assert_eq!(trees.len(), 16);
        assert!(trees.iter().all(|t| is_basis(&g, t)));
    }

    #[test]
    fn random_and_extended_bases_are_bases() {
        let g = families::prism();
        let all: Vec<usize> = (0..g.num_edges()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            assert!(is_basis(&g, &random_basis(&g, &all, &mut rng)));
        }
        let b = extend_to_basis(&g, &all, &[0, 1, 2]);
        assert!(is_basis(&g, &b));
        assert!(b.contains(&0) && b.contains(&1) && !b.contains(&2));
    }

    #[test]
    fn unoriented_cycles() {
        assert!(has_unoriented_cycle(&[(0, 1), (2, 1), (2, 0)]).unwrap());
        assert!(!has_unoriented_cycle(&[(0, 1), (1, 2), (3, 2)]).unwrap());
        assert_eq!(has_unoriented_cycle(&[(0, 1), (1, 0)]), Err(Error::OppositePairPresent));
    }

    #[test]
    fn molecule_rank_matches_forest_rank() {
        let g = families::cycle(4);
        let m = graph_metric(&g).unwrap();
        assert_eq!(molecule_rank(&m, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap(), 3);
        assert_eq!(molecule_rank(&m, &[(0, 1), (2, 3)]).unwrap(), 2);
        assert_eq!(molecule_rank(&m, &[(0, 2), (2, 0)]).unwrap(), 1);
    }
}

//! Splitting a molecule along the blocks of a graph and checking that the
//! norm is additive over the pieces.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphkit::{block_cut_tree, graph_metric, DirectedSymGraph};
use crate::metric::{FiniteMetricSpace, Molecule};
use crate::scalar::{rat, Rational};
use crate::transport::free_norm;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct L1Report {
    pub blocks: usize,
    pub samples: usize,
    /// Samples where the norm was not the sum of the block norms.
    pub mismatches: usize,
}

impl L1Report {
    pub fn holds(&self) -> bool {
        self.mismatches == 0
    }
}

/// Writes `x` as a sum of molecules supported on single blocks. Each part
/// is returned with the block's vertices (in the graph's indexing) and
/// coefficients indexed into that vertex list.
pub fn split_along_blocks(g: &DirectedSymGraph, x: &Molecule) -> Result<Vec<(Vec<usize>, Molecule)>> {
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let tree = block_cut_tree(g);
    let pos: Vec<HashMap<usize, usize>> = tree
        .block_vertices
        .iter()
        .map(|vs| vs.iter().enumerate().map(|(i, &v)| (v, i)).collect())
        .collect();
    let mut parts: Vec<Molecule> = vec![Molecule::zero(); tree.blocks.len()];
    let root = 0;
    // x = Σ c_v (δ_v − δ_root), and each difference runs through the blocks
    // on the route, entering and leaving at cut vertices.
    for (v, c) in x.iter() {
        if v == root {
            continue;
        }
        for (b, enter, exit) in tree.route(v, root) {
            parts[b].add_term(pos[b][&enter], c.clone());
            parts[b].add_term(pos[b][&exit], -c.clone());
        }
    }
    Ok(tree.block_vertices.into_iter().zip(parts).filter(|(_, m)| !m.is_zero()).collect())
}

/// A random molecule with small integer coefficients on 2 to 5 points.
pub(crate) fn random_molecule<R: Rng>(space: &FiniteMetricSpace, rng: &mut R) -> Molecule {
    let n = space.len();
    let k = rng.gen_range(2..=n.min(5));
    let mut points: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        points.swap(i, j);
    }
    let mut coeffs: Vec<(usize, Rational)> = Vec::with_capacity(k);
    for &p in &points[..k - 1] {
        let c = rng.gen_range(-6i64..=6);
        coeffs.push((p, rat(c, rng.gen_range(1..=3))));
    }
    let sum: Rational = coeffs.iter().map(|(_, c)| c.clone()).sum();
    coeffs.push((points[k - 1], -sum));
    Molecule::new(space, coeffs).expect("coefficients sum to zero")
}

/// Compares `‖x‖` with the sum of the norms of its block parts for
/// `samples` random molecules.
pub fn l1_decomposition_check(g: &DirectedSymGraph, samples: usize, seed: u64) -> Result<L1Report> {
    let space = graph_metric(g)?;
    let tree = block_cut_tree(g);
    if tree.blocks.len() < 2 {
        return Err(Error::SingleComponent);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for _ in 0..samples {
        let x = random_molecule(&space, &mut rng);
        if !split_is_additive(&space, g, &x)? {
            mismatches += 1;
        }
    }
    Ok(L1Report { blocks: tree.blocks.len(), samples, mismatches })
}

pub(crate) fn split_is_additive(space: &FiniteMetricSpace, g: &DirectedSymGraph, x: &Molecule) -> Result<bool> {
    let whole = free_norm(space, x)?.value;
    let mut sum = Rational::from_integer(0.into());
    for (vs, part) in split_along_blocks(g, x)? {
        sum += free_norm(&space.subspace(&vs), &part)?.value;
    }
    Ok(whole == sum)
}

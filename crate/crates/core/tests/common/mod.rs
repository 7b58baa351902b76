//! Random inputs shared by the integration tests.
#![allow(dead_code)]

use freeiso::graphkit::DirectedSymGraph;
use freeiso::{rat, validate_metric, FiniteMetricSpace, Molecule, Rational};
use rand::Rng;

/// Shortest-path closure of random positive weights on the complete graph,
/// always a metric. Small weight ranges make ties (and so sparse `E_ext`)
/// common.
pub fn random_space<R: Rng>(rng: &mut R, n: usize, max_w: i64) -> FiniteMetricSpace {
    let mut d = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(1..=max_w);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    let raw = d.iter().map(|row| row.iter().map(|&v| rat(v, 1)).collect()).collect();
    validate_metric(raw, (0..n).map(|i| i.to_string()).collect()).unwrap()
}

/// A molecule on 2..=n points with small rational coefficients.
pub fn random_molecule<R: Rng>(rng: &mut R, m: &FiniteMetricSpace) -> Molecule {
    let n = m.len();
    let k = rng.gen_range(2..=n);
    let mut pts: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pts.swap(i, j);
    }
    let mut terms: Vec<(usize, Rational)> = Vec::new();
    let mut sum = rat(0, 1);
    for &p in &pts[..k - 1] {
        let c = rat(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        sum += &c;
        terms.push((p, c));
    }
    terms.push((pts[k - 1], -sum));
    Molecule::new(m, terms).unwrap()
}

/// A connected graph: a random spanning tree plus `extra` random edges.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, extra: usize) -> DirectedSymGraph {
    let mut pairs = Vec::new();
    for v in 1..n {
        pairs.push((rng.gen_range(0..v), v));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !pairs.contains(&(a.min(b), a.max(b))) {
            pairs.push((a.min(b), a.max(b)));
        }
    }
    DirectedSymGraph::numbered(n, &pairs).unwrap()
}

/// Shortest-path closure of random rational weights with small
/// denominators.
pub fn random_rational_space<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace {
    let mut d = vec![vec![rat(0, 1); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rat(rng.gen_range(1..=30), rng.gen_range(1..=6));
            d[i][j] = w.clone();
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    validate_metric(d, (0..n).map(|i| i.to_string()).collect()).unwrap()
}

//! The Lipschitz-free norm of a molecule as an optimal transport cost.
//!
//! The primal route ships the positive part of the molecule onto the negative
//! part by successive shortest paths on the complete directed graph of the
//! space. Shortest-path potentials of the final residual graph are a
//! 1-Lipschitz function attaining the norm, so every call also returns a
//! dual certificate. The independent dual route is [`crate::lp::lipschitz_lp_value`].

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, LipschitzWitness, Molecule};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct NormReport<S> {
    pub value: S,
    pub witness: LipschitzWitness<S>,
    /// Optimal transport plan as `(from, to, mass)` triples.
    pub plan: Vec<(usize, usize, S)>,
}

/// Exact norm of `x` in `F(space)`, with an optimal 1-Lipschitz witness.
pub fn free_norm<S: Scalar>(space: &FiniteMetricSpace<S>, x: &Molecule<S>) -> Result<NormReport<S>> {
    let n = space.len();
    let mut total = S::zero();
    for (i, c) in x.iter() {
        if i >= n {
            return Err(Error::UnknownLabel(format!("#{i}")));
        }
        total = total + c.clone();
    }
    if !total.is_zero_tol() {
        return Err(Error::NotAMolecule(total.render()));
    }

    let mut supply: Vec<S> = vec![S::zero(); n];
    let mut demand: Vec<S> = vec![S::zero(); n];
    for (i, c) in x.iter() {
        if c.is_pos() {
            supply[i] = c.clone();
        } else if c.is_neg() {
            demand[i] = -c.clone();
        }
    }
    let mut flow: Vec<Vec<S>> = vec![vec![S::zero(); n]; n];

    // Source is node n, sink is node n + 1.
    let src = n;
    let sink = n + 1;
    loop {
        if supply.iter().all(|s| !s.is_pos()) {
            break;
        }
        let (dist, pred) = bellman_ford(space, &flow, Some((&supply, &demand)), src);
        let Some(_) = dist[sink].as_ref() else {
            // Cannot happen for a valid molecule: total supply equals total demand.
            unreachable!("unbalanced transport instance");
        };
        // Walk back from the sink collecting the path and its bottleneck.
        let mut path = Vec::new();
        let mut v = sink;
        while v != src {
            let u = pred[v].expect("predecessor on shortest path");
            path.push((u, v));
            v = u;
        }
        path.reverse();
        let mut amount: Option<S> = None;
        let mut tighten = |cap: S| {
            amount = Some(match amount.take() {
                None => cap,
                Some(a) => S::min_of(a, cap),
            });
        };
        for &(u, v) in &path {
            if u == src {
                tighten(supply[v].clone());
            } else if v == sink {
                tighten(demand[u].clone());
            } else if flow[v][u].is_pos() {
                // Travelling u -> v cancels flow on v -> u.
                tighten(flow[v][u].clone());
            }
        }
        let amount = amount.expect("path has a bounded arc");
        for &(u, v) in &path {
            if u == src {
                supply[v] = supply[v].clone() - amount.clone();
            } else if v == sink {
                demand[u] = demand[u].clone() - amount.clone();
            } else if flow[v][u].is_pos() {
                flow[v][u] = flow[v][u].clone() - amount.clone();
            } else {
                flow[u][v] = flow[u][v].clone() + amount.clone();
            }
        }
    }

    let mut value = S::zero();
    let mut plan = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if flow[i][j].is_pos() {
                value = value + flow[i][j].clone() * space.dist(i, j).clone();
                plan.push((i, j, flow[i][j].clone()));
            }
        }
    }

    // Potentials from a virtual root joined to every point by zero-cost arcs.
    let (phi, _) = bellman_ford(space, &flow, None, n);
    let phi: Vec<S> = phi.into_iter().take(n).map(|p| p.expect("every point is reachable")).collect();
    let shift = phi[0].clone();
    let values = phi.into_iter().map(|p| shift.clone() - p).collect();
    Ok(NormReport { value, witness: LipschitzWitness { values }, plan })
}

/// Bellman–Ford over the residual graph. With `terminals`, node `n` is the
/// source (arcs to points with remaining supply) and `n + 1` the sink;
/// without, node `n` is a virtual root with zero-cost arcs to all points.
#[allow(clippy::type_complexity)]
fn bellman_ford<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    flow: &[Vec<S>],
    terminals: Option<(&[S], &[S])>,
    root: usize,
) -> (Vec<Option<S>>, Vec<Option<usize>>) {
    let n = space.len();
    let mut dist: Vec<Option<S>> = vec![None; n + 2];
    let mut pred: Vec<Option<usize>> = vec![None; n + 2];
    dist[root] = Some(S::zero());
    for i in 0..n {
        let open = match terminals {
            Some((supply, _)) => supply[i].is_pos(),
            None => true,
        };
        if open {
            dist[i] = Some(S::zero());
            pred[i] = Some(root);
        }
    }
    let relax = |dist: &mut Vec<Option<S>>, pred: &mut Vec<Option<usize>>, u: usize, v: usize, cost: S| -> bool {
        let Some(du) = dist[u].clone() else { return false };
        let cand = du + cost;
        let better = match &dist[v] {
            None => true,
            Some(dv) => cand.cmp_tol(dv) == Ordering::Less,
        };
        if better {
            dist[v] = Some(cand);
            pred[v] = Some(u);
        }
        better
    };
    for _ in 0..n + 2 {
        let mut changed = false;
        for u in 0..n {
            if dist[u].is_none() {
                continue;
            }
            for v in 0..n {
                if u == v {
                    continue;
                }
                changed |= relax(&mut dist, &mut pred, u, v, space.dist(u, v).clone());
                if flow[v][u].is_pos() {
                    changed |= relax(&mut dist, &mut pred, u, v, -space.dist(u, v).clone());
                }
            }
            if let Some((_, demand)) = terminals {
                if demand[u].is_pos() {
                    changed |= relax(&mut dist, &mut pred, u, n + 1, S::zero());
                }
            }
        }
        if !changed {
            break;
        }
    }
    (dist, pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{elementary_molecule, validate_metric};
    use crate::scalar::{rat, Rational};

    fn space(rows: &[&[i64]]) -> FiniteMetricSpace {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        let d = rows.iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect();
        validate_metric(d, labels).unwrap()
    }

    #[test]
    fn elementary_molecules_have_unit_norm() {
        let m = space(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        for x in 0..3 {
            for y in 0..3 {
                if x != y {
                    let e = elementary_molecule(&m, x, y).unwrap();
                    assert_eq!(free_norm(&m, &e).unwrap().value, rat(1, 1));
                    let d = Molecule::dirac_difference(x, y);
                    assert_eq!(free_norm(&m, &d).unwrap().value, m.dist(x, y).clone());
                }
            }
        }
    }

    #[test]
    fn collinear_second_difference() {
        // max f(0) - 2 f(1) + f(2) over 1-Lipschitz f is 2 (f = |t - 1|).
        let m = space(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        let x = Molecule::new(&m, [(0, rat(1, 1)), (1, rat(-2, 1)), (2, rat(1, 1))]).unwrap();
        let r = free_norm(&m, &x).unwrap();
        assert_eq!(r.value, rat(2, 1));
        assert_eq!(r.witness.eval(&x), rat(2, 1));
        assert!(r.witness.is_one_lipschitz(&m));
    }

    #[test]
    fn zero_molecule_has_zero_norm() {
        let m = space(&[&[0, 1], &[1, 0]]);
        let r = free_norm(&m, &Molecule::<Rational>::zero()).unwrap();
        assert_eq!(r.value, rat(0, 1));
    }

    #[test]
    fn rejects_non_molecules() {
        let m = space(&[&[0, 1], &[1, 0]]);
        let mut x = Molecule::zero();
        x.add_term(0, rat(1, 1));
        assert!(matches!(free_norm(&m, &x), Err(Error::NotAMolecule(_))));
    }
}

//! A small dictionary simplex (Bland's rule) and the Lipschitz dual LP.
//!
//! This route never looks at transport plans: it maximizes `f(x)` over
//! functions with `f(i) − f(j) ≤ d(i,j)` directly, so it serves as an
//! independent check on [`crate::transport::free_norm`].

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Molecule};
use crate::scalar::Scalar;

/// Outcome of [`maximize`].
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { value: S, point: Vec<S> },
    Unbounded,
}

/// Maximizes `c·x` subject to `A x ≤ b`, `x ≥ 0`, for `b ≥ 0` (so the origin
/// is feasible and no phase one is needed).
pub fn maximize<S: Scalar>(c: &[S], a: &[Vec<S>], b: &[S]) -> LpOutcome<S> {
    let n = c.len();
    let m = b.len();
    assert!(a.len() == m && a.iter().all(|row| row.len() == n), "LP shape mismatch");
    assert!(b.iter().all(|v| !v.is_neg()), "origin must be feasible");

    // Variables 0..n are structural, n..n+m are slacks.
    let mut basic: Vec<usize> = (n..n + m).collect();
    let mut nonbasic: Vec<usize> = (0..n).collect();
    // Row r reads: x_basic[r] = rhs[r] − Σ_j coef[r][j] · x_nonbasic[j].
    let mut rhs: Vec<S> = b.to_vec();
    let mut coef: Vec<Vec<S>> = a.to_vec();
    let mut obj: Vec<S> = c.to_vec();
    let mut z = S::zero();

    loop {
        let entering = (0..n).filter(|&j| obj[j].is_pos()).min_by_key(|&j| nonbasic[j]);
        let Some(col) = entering else { break };
        let mut leave: Option<(usize, S)> = None;
        for r in 0..m {
            if !coef[r][col].is_pos() {
                continue;
            }
            let ratio = rhs[r].clone() / coef[r][col].clone();
            let take = match &leave {
                None => true,
                Some((lr, best)) => match ratio.cmp_tol(best) {
                    Ordering::Less => true,
                    Ordering::Equal => basic[r] < basic[*lr],
                    Ordering::Greater => false,
                },
            };
            if take {
                leave = Some((r, ratio));
            }
        }
        let Some((row, _)) = leave else { return LpOutcome::Unbounded };

        let piv = coef[row][col].clone();
        // Solve the pivot row for the entering variable.
        let inv = S::one() / piv;
        rhs[row] = rhs[row].clone() * inv.clone();
        for j in 0..n {
            coef[row][j] = if j == col { inv.clone() } else { coef[row][j].clone() * inv.clone() };
        }
        for r in 0..m {
            if r == row || coef[r][col].is_zero_tol() {
                continue;
            }
            let f = coef[r][col].clone();
            rhs[r] = rhs[r].clone() - f.clone() * rhs[row].clone();
            for j in 0..n {
                coef[r][j] = if j == col {
                    -(f.clone() * coef[row][col].clone())
                } else {
                    coef[r][j].clone() - f.clone() * coef[row][j].clone()
                };
            }
        }
        let f = obj[col].clone();
        z = z + f.clone() * rhs[row].clone();
        for j in 0..n {
            obj[j] = if j == col {
                -(f.clone() * coef[row][col].clone())
            } else {
                obj[j].clone() - f.clone() * coef[row][j].clone()
            };
        }
        std::mem::swap(&mut basic[row], &mut nonbasic[col]);
    }

    let mut point = vec![S::zero(); n];
    for (r, &v) in basic.iter().enumerate() {
        if v < n {
            point[v] = rhs[r].clone();
        }
    }
    LpOutcome::Optimal { value: z, point }
}

/// `sup { f(x) : f 1-Lipschitz }` by linear programming over the values of `f`.
///
/// Pins `f(p₀) = 0` and substitutes `g_i = f_i + d(i, p₀) ≥ 0`; the
/// constraint right-hand sides are then nonnegative by the triangle
/// inequality.
pub fn lipschitz_lp_value<S: Scalar>(space: &FiniteMetricSpace<S>, x: &Molecule<S>) -> Result<S> {
    let n = space.len();
    let total = x.iter().fold(S::zero(), |acc, (_, c)| acc + c.clone());
    if !total.is_zero_tol() {
        return Err(Error::NotAMolecule(total.render()));
    }
    if n == 1 {
        return Ok(S::zero());
    }
    let vars = n - 1;
    let d0 = |i: usize| space.dist(i, 0).clone();
    let c: Vec<S> = (1..n).map(|i| x.coeff(i)).collect();
    let constant = (1..n).fold(S::zero(), |acc, i| acc + x.coeff(i) * d0(i));
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 1..n {
        for j in 1..n {
            if i == j {
                continue;
            }
            let mut row = vec![S::zero(); vars];
            row[i - 1] = S::one();
            row[j - 1] = -S::one();
            a.push(row);
            b.push(space.dist(i, j).clone() + d0(i) - d0(j));
        }
        let mut row = vec![S::zero(); vars];
        row[i - 1] = S::one();
        a.push(row);
        b.push(d0(i) + d0(i));
    }
    // Float inputs may carry tiny negative slack from rounding.
    for v in b.iter_mut() {
        if v.is_zero_tol() {
            *v = S::zero();
        }
    }
    match maximize(&c, &a, &b) {
        LpOutcome::Optimal { value, .. } => Ok(value - constant),
        LpOutcome::Unbounded => unreachable!("Lipschitz LP is bounded"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::validate_metric;
    use crate::scalar::{rat, Rational};

    #[test]
    fn textbook_lp() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3  ->  x=3, y=1, value 11.
        let c = vec![rat(3, 1), rat(2, 1)];
        let a = vec![
            vec![rat(1, 1), rat(1, 1)],
            vec![rat(1, 1), rat(3, 1)],
            vec![rat(1, 1), rat(0, 1)],
        ];
        let b = vec![rat(4, 1), rat(6, 1), rat(3, 1)];
        assert_eq!(
            maximize(&c, &a, &b),
            LpOutcome::Optimal { value: rat(11, 1), point: vec![rat(3, 1), rat(1, 1)] }
        );
    }

    #[test]
    fn detects_unbounded() {
        let c = vec![rat(1, 1)];
        let a = vec![vec![rat(-1, 1)]];
        let b = vec![rat(1, 1)];
        assert_eq!(maximize::<Rational>(&c, &a, &b), LpOutcome::Unbounded);
    }

    #[test]
    fn collinear_value() {
        let labels = vec!["0".into(), "1".into(), "2".into()];
        let d = [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
            .iter()
            .map(|r| r.iter().map(|&v| rat(v, 1)).collect())
            .collect();
        let m = validate_metric(d, labels).unwrap();
        let x = Molecule::new(&m, [(0, rat(1, 1)), (1, rat(-2, 1)), (2, rat(1, 1))]).unwrap();
        assert_eq!(lipschitz_lp_value(&m, &x).unwrap(), rat(2, 1));
    }
}

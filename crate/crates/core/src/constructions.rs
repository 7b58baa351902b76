//! New spaces from old: ℓp-sums, disjoint unions, and the graph family
//! that is 2- but not 3-connected while each of its parts is rigid.
//!
//! p-th roots of rationals are rarely rational, so sums and basepoint
//! unions keep every distance as its exact p-th power when `p` is an
//! integer. Triangle and strict-triangle tests run on those powers exactly
//! for `p ∈ {1, 2}`; other exponents fall back to floats.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extgraph::{ext_graph, ExtGraph};
use crate::graphkit::DirectedSymGraph;
use crate::metric::{validate_metric, FiniteMetricSpace};
use crate::scalar::{exact_root, Approx, Rational, Scalar};

/// Parameters of a construction, echoed in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ConstructionRecipe {
    LpSum { p: String },
    UnionBounded { cross: String },
    UnionBasepoint { p: String, base_m: String, base_n: String },
    ThreeCliqueGraph { cliques: [usize; 3], connectors: [[usize; 3]; 3] },
}

/// A metric given by exact `p`-th powers of its distances (integer `p`),
/// with a floating copy for everything downstream.
#[derive(Clone, Debug)]
pub struct PowerMetric {
    p: Rational,
    powers: Option<Vec<Vec<Rational>>>,
    approx: FiniteMetricSpace<Approx>,
    pub warnings: Vec<String>,
}

fn integer_p(p: &Rational) -> Option<u32> {
    if p.is_integer() {
        p.to_integer().to_u32()
    } else {
        None
    }
}

fn check_p(p: &Rational, strict: bool) -> Result<()> {
    let one = Rational::one();
    if *p < one || (strict && *p == one) {
        return Err(Error::InvalidP(p.to_string()));
    }
    Ok(())
}

/// Compares `√a` with `√b + √c` for nonnegative rationals.
fn cmp_sqrt_sum(a: &Rational, b: &Rational, c: &Rational) -> Ordering {
    let t = a - b - c;
    if t.is_negative() {
        return Ordering::Less;
    }
    let four_bc = Rational::from_integer(4.into()) * b * c;
    (&t * &t).cmp(&four_bc)
}

impl PowerMetric {
    /// `powers[i][j] = d(i,j)^p`, exact; `p` must be an integer ≥ 1.
    fn from_powers(p: Rational, labels: Vec<String>, powers: Vec<Vec<Rational>>) -> Result<Self> {
        let k = integer_p(&p).expect("integer exponent");
        let inv = 1.0 / k as f64;
        let approx_d: Vec<Vec<Approx>> = powers
            .iter()
            .map(|row| row.iter().map(|v| Approx(Approx::from_rational(v).0.powf(inv))).collect())
            .collect();
        let approx = validate_metric(approx_d, labels)?;
        let pm = PowerMetric { p, powers: Some(powers), approx, warnings: Vec::new() };
        if pm.certified() {
            let n = pm.len();
            for i in 0..n {
                for kk in 0..n {
                    for j in 0..n {
                        if i != j && j != kk && i != kk && pm.cmp_via(i, kk, j) == Ordering::Greater {
                            let l = |x: usize| pm.approx.label(x).to_string();
                            return Err(Error::TriangleViolation { i: l(i), j: l(j), k: l(kk) });
                        }
                    }
                }
            }
        }
        Ok(pm)
    }

    fn from_floats(p: Rational, labels: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self> {
        let approx = validate_metric(d.into_iter().map(|r| r.into_iter().map(Approx).collect()).collect(), labels)?;
        Ok(PowerMetric { p, powers: None, approx, warnings: Vec::new() })
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.approx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.approx.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        self.approx.labels()
    }

    /// `d(i,j)^p` when stored exactly.
    pub fn power(&self, i: usize, j: usize) -> Option<&Rational> {
        self.powers.as_ref().map(|p| &p[i][j])
    }

    /// Whether comparisons are exact (`p` is 1 or 2).
    pub fn certified(&self) -> bool {
        self.powers.is_some() && matches!(integer_p(&self.p), Some(1 | 2))
    }

    pub fn approx(&self) -> &FiniteMetricSpace<Approx> {
        &self.approx
    }

    /// The space with rational distances, if every root is rational.
    pub fn exact(&self) -> Option<FiniteMetricSpace<Rational>> {
        let k = integer_p(&self.p)?;
        let powers = self.powers.as_ref()?;
        let d: Vec<Vec<Rational>> = powers
            .iter()
            .map(|row| row.iter().map(|v| exact_root(v, k)).collect::<Option<_>>())
            .collect::<Option<_>>()?;
        validate_metric(d, self.labels().to_vec()).ok()
    }

    /// `d(x,y)` against `d(x,z) + d(z,y)`.
    fn cmp_via(&self, x: usize, y: usize, z: usize) -> Ordering {
        if self.certified() {
            let pw = self.powers.as_ref().unwrap();
            let (a, b, c) = (&pw[x][y], &pw[x][z], &pw[z][y]);
            if integer_p(&self.p) == Some(1) {
                a.cmp(&(b + c))
            } else {
                cmp_sqrt_sum(a, b, c)
            }
        } else {
            let d = &self.approx;
            d.dist(x, y).cmp_tol(&(*d.dist(x, z) + *d.dist(z, y)))
        }
    }

    /// Strict triangle test for `(x, y)`, exact when [`certified`](Self::certified).
    pub fn is_preserved_extreme(&self, x: usize, y: usize) -> Result<bool> {
        if x == y {
            return Err(Error::SamePoint(self.approx.label(x).to_string()));
        }
        Ok((0..self.len()).filter(|&z| z != x && z != y).all(|z| self.cmp_via(x, y, z) == Ordering::Less))
    }

    /// `G_ext` decided on the exact powers, weighted by the float distances.
    pub fn ext_graph(&self) -> ExtGraph<Approx> {
        let n = self.len();
        let mut pairs = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                if self.is_preserved_extreme(x, y).unwrap() {
                    pairs.push((x, y));
                    pairs.push((y, x));
                }
            }
        }
        ExtGraph::from_pairs(&self.approx, &pairs).expect("symmetric by construction")
    }
}

fn pow_rat(r: &Rational, k: u32) -> Rational {
    num_traits::pow(r.clone(), k as usize)
}

fn pow_f64(r: &Rational, p: f64) -> f64 {
    Approx::from_rational(r).0.powf(p)
}

/// `M ×_p N` with `d((x,y),(u,v)) = ‖(d_M(x,u), d_N(y,v))‖_p`.
pub fn lp_sum(m: &FiniteMetricSpace, n: &FiniteMetricSpace, p: &Rational) -> Result<PowerMetric> {
    check_p(p, false)?;
    let pts: Vec<(usize, usize)> = (0..m.len()).flat_map(|a| (0..n.len()).map(move |b| (a, b))).collect();
    let labels: Vec<String> = pts.iter().map(|&(a, b)| format!("({},{})", m.label(a), n.label(b))).collect();
    let mut out = match integer_p(p) {
        Some(k) => {
            let powers = pts
                .iter()
                .map(|&(a, b)| pts.iter().map(|&(c, d)| pow_rat(m.dist(a, c), k) + pow_rat(n.dist(b, d), k)).collect())
                .collect();
            PowerMetric::from_powers(p.clone(), labels, powers)?
        }
        None => {
            let pf = Approx::from_rational(p).0;
            let d = pts
                .iter()
                .map(|&(a, b)| {
                    pts.iter()
                        .map(|&(c, e)| (pow_f64(m.dist(a, c), pf) + pow_f64(n.dist(b, e), pf)).powf(1.0 / pf))
                        .collect()
                })
                .collect();
            PowerMetric::from_floats(p.clone(), labels, d)?
        }
    };
    if p.is_one() {
        out.warnings.push("p = 1: product pairs are not guaranteed extreme".into());
    }
    Ok(out)
}

/// Index of `(x, y)` in [`lp_sum`]'s point order.
pub fn product_index(n_len: usize, x: usize, y: usize) -> usize {
    x * n_len + y
}

/// Strict triangle test for a pair of product points, `pair = ((x1,y1),(x2,y2))`.
pub fn preserved_extreme_in_sum(
    m: &FiniteMetricSpace,
    n: &FiniteMetricSpace,
    p: &Rational,
    pair: ((usize, usize), (usize, usize)),
) -> Result<bool> {
    check_p(p, true)?;
    let ((x1, y1), (x2, y2)) = pair;
    if x1 >= m.len() || x2 >= m.len() || y1 >= n.len() || y2 >= n.len() {
        return Err(Error::Input("product point out of range".into()));
    }
    let sum = lp_sum(m, n, p)?;
    sum.is_preserved_extreme(product_index(n.len(), x1, y1), product_index(n.len(), x2, y2))
}

/// Labels of `M ⊔ N`, suffixing colliding labels with `#L` and `#R`.
fn union_labels(left: &[String], right: &[String]) -> Vec<String> {
    let l: HashSet<&String> = left.iter().collect();
    let r: HashSet<&String> = right.iter().collect();
    let mut out: Vec<String> =
        left.iter().map(|s| if r.contains(s) { format!("{s}#L") } else { s.clone() }).collect();
    out.extend(right.iter().map(|s| if l.contains(s) { format!("{s}#R") } else { s.clone() }));
    out
}

/// `M ⊔ N` with every cross distance `1 + max(diam M, diam N)`.
pub fn union_bounded<S: Scalar>(m: &FiniteMetricSpace<S>, n: &FiniteMetricSpace<S>) -> Result<FiniteMetricSpace<S>> {
    let dm = m.diameter();
    let dn = n.diameter();
    let cross = S::one() + if dn.cmp_tol(&dm) == Ordering::Greater { dn } else { dm };
    let (a, b) = (m.len(), n.len());
    let mut d = vec![vec![cross.clone(); a + b]; a + b];
    for i in 0..a {
        for j in 0..a {
            d[i][j] = m.dist(i, j).clone();
        }
    }
    for i in 0..b {
        for j in 0..b {
            d[a + i][a + j] = n.dist(i, j).clone();
        }
    }
    validate_metric(d, union_labels(m.labels(), n.labels()))
}

/// `M ⊔ (N \ {0_N})` with `d(x,y) = (d_M(x,0_M)^p + d_N(0_N,y)^p)^{1/p}`.
/// Warnings flag the cases where rigidity is not guaranteed.
pub fn union_basepoint(
    m: &FiniteMetricSpace,
    n: &FiniteMetricSpace,
    base_m: &str,
    base_n: &str,
    p: &Rational,
) -> Result<PowerMetric> {
    check_p(p, true)?;
    let om = m.index_of(base_m)?;
    let on = n.index_of(base_n)?;
    let rest: Vec<usize> = (0..n.len()).filter(|&y| y != on).collect();
    let right: Vec<String> = rest.iter().map(|&y| n.label(y).to_string()).collect();
    let labels = union_labels(m.labels(), &right);
    let a = m.len();
    let total = a + rest.len();
    // Point i of the union as (side, index in that side's space).
    let side = |i: usize| if i < a { (true, i) } else { (false, rest[i - a]) };
    let mut out = match integer_p(p) {
        Some(k) => {
            let pw = |r: &Rational| pow_rat(r, k);
            let powers = (0..total)
                .map(|i| {
                    (0..total)
                        .map(|j| match (side(i), side(j)) {
                            ((true, x), (true, y)) => pw(m.dist(x, y)),
                            ((false, x), (false, y)) => pw(n.dist(x, y)),
                            ((true, x), (false, y)) | ((false, y), (true, x)) => {
                                pw(m.dist(x, om)) + pw(n.dist(on, y))
                            }
                        })
                        .collect()
                })
                .collect();
            PowerMetric::from_powers(p.clone(), labels, powers)?
        }
        None => {
            let pf = Approx::from_rational(p).0;
            let d = (0..total)
                .map(|i| {
                    (0..total)
                        .map(|j| match (side(i), side(j)) {
                            ((true, x), (true, y)) => Approx::from_rational(m.dist(x, y)).0,
                            ((false, x), (false, y)) => Approx::from_rational(n.dist(x, y)).0,
                            ((true, x), (false, y)) | ((false, y), (true, x)) => {
                                (pow_f64(m.dist(x, om), pf) + pow_f64(n.dist(on, y), pf)).powf(1.0 / pf)
                            }
                        })
                        .collect()
                })
                .collect();
            PowerMetric::from_floats(p.clone(), labels, d)?
        }
    };
    if n.len() < 4 {
        out.warnings.push(format!("|N| = {} < 4: rigidity is not guaranteed", n.len()));
    }
    let g = ext_graph(n);
    if g.graph().num_edges() != n.len() * (n.len() - 1) / 2 {
        out.warnings.push("NotUniformlyConcave: some triangle in N is degenerate".into());
    }
    Ok(out)
}

/// Three cliques and three extra vertices `a₁, a₂, a₃`; `a_j` is joined to
/// the first `e[j][k]` vertices of clique `k` for `k ≠ j`.
#[derive(Clone, Debug)]
pub struct ThreeCliqueGraph {
    pub graph: DirectedSymGraph,
    /// Vertex ids of each clique.
    pub cliques: [Vec<usize>; 3],
    pub hubs: [usize; 3],
    pub recipe: ConstructionRecipe,
}

impl ThreeCliqueGraph {
    /// `G_j`: clique `j` with the connector edges from the other hubs.
    pub fn part(&self, j: usize) -> DirectedSymGraph {
        let inside: HashSet<usize> = self.cliques[j].iter().copied().collect();
        let keep: Vec<usize> = self
            .graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| {
                let hub = |w: usize| self.hubs.iter().enumerate().any(|(k, &h)| k != j && h == w);
                (inside.contains(&u) && inside.contains(&v))
                    || (inside.contains(&u) && hub(v))
                    || (inside.contains(&v) && hub(u))
            })
            .map(|(k, _)| k)
            .collect();
        self.graph.edge_subgraph(&keep).0
    }
}

pub fn gen_three_clique(i: [usize; 3], e: [[usize; 3]; 3]) -> Result<ThreeCliqueGraph> {
    let mut off = Vec::new();
    for j in 0..3 {
        if e[j][j] != 0 {
            return Err(Error::PreconditionViolated(format!("E[{j}][{j}] = {} must be 0", e[j][j])));
        }
        for k in 0..3 {
            if j != k {
                off.push(e[j][k]);
            }
        }
    }
    if let Some(&small) = off.iter().find(|&&x| x < 3) {
        return Err(Error::PreconditionViolated(format!("connector multiplicity {small} < 3")));
    }
    let distinct: HashSet<usize> = off.iter().copied().collect();
    if distinct.len() != off.len() {
        return Err(Error::PreconditionViolated("connector multiplicities are not pairwise distinct".into()));
    }
    let max_e = *off.iter().max().unwrap();
    let min_i = *i.iter().min().unwrap();
    if min_i <= 2 + max_e {
        return Err(Error::PreconditionViolated(format!(
            "smallest clique {min_i} is not larger than 2 + max multiplicity {max_e}"
        )));
    }
    let mut labels = Vec::new();
    let mut cliques: [Vec<usize>; 3] = Default::default();
    for j in 0..3 {
        for t in 0..i[j] {
            cliques[j].push(labels.len());
            labels.push(format!("K{}_{t}", j + 1));
        }
    }
    let hubs = [labels.len(), labels.len() + 1, labels.len() + 2];
    labels.extend((1..=3).map(|j| format!("a{j}")));
    let mut pairs = Vec::new();
    for c in &cliques {
        for (x, &u) in c.iter().enumerate() {
            pairs.extend(c[x + 1..].iter().map(|&v| (u, v)));
        }
    }
    for j in 0..3 {
        for k in 0..3 {
            if j != k {
                pairs.extend(cliques[k][..e[j][k]].iter().map(|&v| (hubs[j], v)));
            }
        }
    }
    let graph = DirectedSymGraph::new(labels, &pairs)?;
    Ok(ThreeCliqueGraph { graph, cliques, hubs, recipe: ConstructionRecipe::ThreeCliqueGraph { cliques: i, connectors: e } })
}

/// Shorthand used by reports.
pub fn render_p(p: &Rational) -> String {
    if p.denom().is_one() {
        p.numer().to_string()
    } else {
        p.to_string()
    }
}

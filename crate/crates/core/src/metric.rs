//! Finite metric spaces, molecules and metric symmetries.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// A finite metric space with labeled points and a validated distance matrix.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace<S = Rational> {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    d: Vec<Vec<S>>,
}

/// Checks every metric axiom and builds the space.
///
/// Errors name the offending labels; for a triangle violation the triple
/// `(i, j, k)` satisfies `d(i,k) > d(i,j) + d(j,k)`.
pub fn validate_metric<S: Scalar>(raw: Vec<Vec<S>>, labels: Vec<String>) -> Result<FiniteMetricSpace<S>> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    if raw.len() != n || raw.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch { labels: n });
    }
    let mut index = HashMap::with_capacity(n);
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    let lab = |i: usize| labels[i].clone();
    for i in 0..n {
        if !raw[i][i].is_zero_tol() {
            return Err(Error::NonzeroDiagonal(lab(i)));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if !raw[i][j].same(&raw[j][i]) {
                return Err(Error::AsymmetricMatrix { i: lab(i), j: lab(j) });
            }
            if raw[i][j].is_neg() {
                return Err(Error::NegativeDistance { i: lab(i), j: lab(j) });
            }
            if raw[i][j].is_zero_tol() {
                return Err(Error::ZeroOffDiagonal { i: lab(i), j: lab(j) });
            }
        }
    }
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let via = raw[i][j].clone() + raw[j][k].clone();
                if raw[i][k].cmp_tol(&via) == Ordering::Greater {
                    return Err(Error::TriangleViolation { i: lab(i), j: lab(j), k: lab(k) });
                }
            }
        }
    }
    Ok(FiniteMetricSpace { labels, index, d: raw })
}

impl<S: Scalar> FiniteMetricSpace<S> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dist(&self, i: usize, j: usize) -> &S {
        &self.d[i][j]
    }

    pub fn matrix(&self) -> &[Vec<S>] {
        &self.d
    }

    pub fn diameter(&self) -> S {
        let mut best = S::zero();
        for row in &self.d {
            for v in row {
                if v.cmp_tol(&best) == Ordering::Greater {
                    best = v.clone();
                }
            }
        }
        best
    }

    /// The subspace on the given points (in the given order).
    pub fn subspace(&self, points: &[usize]) -> FiniteMetricSpace<S> {
        let labels: Vec<String> = points.iter().map(|&p| self.labels[p].clone()).collect();
        let d = points
            .iter()
            .map(|&a| points.iter().map(|&b| self.d[a][b].clone()).collect())
            .collect();
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        FiniteMetricSpace { labels, index, d }
    }

    /// Off-diagonal distances, sorted.
    pub fn distance_multiset(&self) -> Vec<S> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.d[i][j].clone());
            }
        }
        out.sort_by(|a, b| a.cmp_tol(b));
        out
    }

    /// Sorted row of distances from `i`, used to prune isometry search.
    fn signature(&self, i: usize) -> Vec<S> {
        let mut row = self.d[i].clone();
        row.sort_by(|a, b| a.cmp_tol(b));
        row
    }
}

/// A finitely supported function on points with zero coefficient sum.
///
/// Coefficients are keyed by point index in the ambient space; zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Molecule<S = Rational> {
    coeffs: BTreeMap<usize, S>,
}

impl<S: Scalar> Molecule<S> {
    pub fn zero() -> Self {
        Molecule { coeffs: BTreeMap::new() }
    }

    /// Builds a molecule, rejecting coefficient sums that are not zero and
    /// indices outside the space.
    pub fn new(space: &FiniteMetricSpace<S>, coeffs: impl IntoIterator<Item = (usize, S)>) -> Result<Self> {
        let mut m = Molecule::zero();
        for (i, c) in coeffs {
            if i >= space.len() {
                return Err(Error::UnknownLabel(format!("#{i}")));
            }
            m.add_term(i, c);
        }
        m.check_sum()?;
        Ok(m)
    }

    pub fn from_labels<'a>(
        space: &FiniteMetricSpace<S>,
        coeffs: impl IntoIterator<Item = (&'a str, S)>,
    ) -> Result<Self> {
        let mut pairs = Vec::new();
        for (l, c) in coeffs {
            pairs.push((space.index_of(l)?, c));
        }
        Molecule::new(space, pairs)
    }

    /// `δ_x − δ_y`.
    pub fn dirac_difference(x: usize, y: usize) -> Self {
        let mut m = Molecule::zero();
        m.add_term(x, S::one());
        m.add_term(y, -S::one());
        m
    }

    fn check_sum(&self) -> Result<()> {
        let total = self.coeffs.values().fold(S::zero(), |acc, c| acc + c.clone());
        if total.is_zero_tol() {
            Ok(())
        } else {
            Err(Error::NotAMolecule(total.render()))
        }
    }

    pub fn add_term(&mut self, i: usize, c: S) {
        let entry = self.coeffs.entry(i).or_insert_with(S::zero);
        *entry = entry.clone() + c;
        if entry.is_zero_tol() {
            self.coeffs.remove(&i);
        }
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(&i).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, c: &S) -> Self {
        let mut m = Molecule::zero();
        for (&i, v) in &self.coeffs {
            m.add_term(i, v.clone() * c.clone());
        }
        m
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (&i, v) in &other.coeffs {
            m.add_term(i, v.clone());
        }
        m
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(&-S::one()))
    }

    /// Sum of the positive coefficients (equals the negative mass).
    pub fn positive_mass(&self) -> S {
        self.coeffs.values().filter(|c| c.is_pos()).fold(S::zero(), |a, c| a + c.clone())
    }

    /// Exact equality for rationals, tolerance equality for floats.
    pub fn same(&self, other: &Self) -> bool {
        self.minus(other).is_zero()
    }

    /// Relabels the support through a point map.
    pub fn map_points(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut m = Molecule::zero();
        for (&i, v) in &self.coeffs {
            m.add_term(f(i), v.clone());
        }
        m
    }

    pub fn to_labels(&self, space: &FiniteMetricSpace<S>) -> BTreeMap<String, String> {
        self.coeffs.iter().map(|(&i, c)| (space.label(i).to_string(), c.render())).collect()
    }
}

/// The normalized elementary molecule `(χ_x − χ_y) / d(x,y)`.
pub fn elementary_molecule<S: Scalar>(space: &FiniteMetricSpace<S>, x: usize, y: usize) -> Result<Molecule<S>> {
    if x >= space.len() {
        return Err(Error::UnknownLabel(format!("#{x}")));
    }
    if y >= space.len() {
        return Err(Error::UnknownLabel(format!("#{y}")));
    }
    if x == y {
        return Err(Error::SamePoint(space.label(x).to_string()));
    }
    let w = S::one() / space.dist(x, y).clone();
    let mut m = Molecule::zero();
    m.add_term(x, w.clone());
    m.add_term(y, -w);
    Ok(m)
}

/// A function on the points of a space; a certificate for lower norm bounds
/// when it is 1-Lipschitz.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzWitness<S = Rational> {
    pub values: Vec<S>,
}

impl<S: Scalar> LipschitzWitness<S> {
    /// `f(x) = Σ x(p) f(p)`.
    pub fn eval(&self, m: &Molecule<S>) -> S {
        m.iter().fold(S::zero(), |acc, (i, c)| acc + c.clone() * self.values[i].clone())
    }

    pub fn is_one_lipschitz(&self, space: &FiniteMetricSpace<S>) -> bool {
        let n = space.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let diff = self.values[i].clone() - self.values[j].clone();
                diff.cmp_tol(space.dist(i, j)) != Ordering::Greater
            })
        })
    }
}

/// All distance-preserving permutations of the points, in lexicographic order.
pub fn compute_isometries<S: Scalar>(space: &FiniteMetricSpace<S>) -> Vec<Vec<usize>> {
    dilations_with_scale(space, &S::one())
}

/// A surjective self-map with `d(x,y) = scale · d(map(x), map(y))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dilation<S = Rational> {
    pub scale: S,
    pub map: Vec<usize>,
}

/// All surjective dilations of a finite space.
///
/// A bijection scaling every distance by `1/a` maps the multiset of
/// distances onto itself scaled by `1/a`; candidate scales are derived from
/// the image of the first pair and only those whose scaled multiset equals
/// the original survive. On a finite space the only survivor is `a = 1`.
pub fn compute_dilations<S: Scalar>(space: &FiniteMetricSpace<S>) -> Vec<Dilation<S>> {
    let n = space.len();
    if n < 2 {
        return vec![Dilation { scale: S::one(), map: (0..n).collect() }];
    }
    let base = space.dist(0, 1).clone();
    let multiset = space.distance_multiset();
    let mut scales: Vec<S> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let a = base.clone() / space.dist(i, j).clone();
            if scales.iter().any(|s| s.same(&a)) {
                continue;
            }
            let mut scaled: Vec<S> = multiset.iter().map(|v| v.clone() * a.clone()).collect();
            scaled.sort_by(|x, y| x.cmp_tol(y));
            if scaled.iter().zip(&multiset).all(|(x, y)| x.same(y)) {
                scales.push(a);
            }
        }
    }
    assert!(
        scales.len() == 1 && scales[0].same(&S::one()),
        "finite distance multiset admits a scale other than 1"
    );
    let mut out = Vec::new();
    for a in scales {
        for map in dilations_with_scale(space, &a) {
            out.push(Dilation { scale: a.clone(), map });
        }
    }
    out
}

fn dilations_with_scale<S: Scalar>(space: &FiniteMetricSpace<S>, scale: &S) -> Vec<Vec<usize>> {
    let n = space.len();
    let sigs: Vec<Vec<S>> = (0..n).map(|i| space.signature(i)).collect();
    let scaled_sigs: Vec<Vec<S>> = sigs
        .iter()
        .map(|row| row.iter().map(|v| v.clone() / scale.clone()).collect())
        .collect();
    let compatible: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| sigs[j].iter().zip(&scaled_sigs[i]).all(|(a, b)| a.same(b)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend_map(space, scale, &compatible, 0, &mut map, &mut used, &mut out);
    out
}

fn extend_map<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    scale: &S,
    compatible: &[Vec<usize>],
    i: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    if i == map.len() {
        out.push(map.clone());
        return;
    }
    for &cand in &compatible[i] {
        if used[cand] {
            continue;
        }
        let ok = (0..i).all(|k| {
            let want = space.dist(i, k).clone() / scale.clone();
            space.dist(cand, map[k]).same(&want)
        });
        if !ok {
            continue;
        }
        map[i] = cand;
        used[cand] = true;
        extend_map(space, scale, compatible, i + 1, map, used, out);
        used[cand] = false;
        map[i] = usize::MAX;
    }
}

/// Composition `(a ∘ b)(x) = a(b(x))` of point permutations.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

pub fn invert(a: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::scalar::rat;

    pub(crate) fn space(rows: &[&[i64]]) -> FiniteMetricSpace {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        let d = rows.iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect();
        validate_metric(d, labels).unwrap()
    }

    fn raw(rows: &[&[i64]]) -> Result<FiniteMetricSpace> {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        let d = rows.iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect();
        validate_metric(d, labels)
    }

    #[test]
    fn validates_small_spaces() {
        assert_eq!(raw(&[&[0, 1], &[1, 0]]).unwrap().len(), 2);
        assert_eq!(raw(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap().len(), 3);
        assert_eq!(
            raw(&[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]]).unwrap_err(),
            Error::TriangleViolation { i: "0".into(), j: "1".into(), k: "2".into() }
        );
    }

    #[test]
    fn rejects_malformed_matrices() {
        assert!(matches!(raw(&[&[0, 1], &[2, 0]]), Err(Error::AsymmetricMatrix { .. })));
        assert!(matches!(raw(&[&[0, -1], &[-1, 0]]), Err(Error::NegativeDistance { .. })));
        assert!(matches!(raw(&[&[0, 0], &[0, 0]]), Err(Error::ZeroOffDiagonal { .. })));
        assert!(matches!(raw(&[&[1, 1], &[1, 0]]), Err(Error::NonzeroDiagonal(_))));
        assert!(matches!(raw(&[]), Err(Error::EmptySpace)));
        let bad = validate_metric(vec![vec![rat(0, 1)]], vec!["a".into(), "b".into()]);
        assert!(matches!(bad, Err(Error::ShapeMismatch { .. })));
        let dup = validate_metric(
            vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]],
            vec!["a".into(), "a".into()],
        );
        assert!(matches!(dup, Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn elementary_molecules() {
        let m = space(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        let e = elementary_molecule(&m, 0, 2).unwrap();
        assert_eq!(e.coeff(0), rat(1, 2));
        assert_eq!(e.coeff(2), rat(-1, 2));
        let u = elementary_molecule(&m, 0, 1).unwrap();
        assert_eq!(u.coeff(0), rat(1, 1));
        assert_eq!(u.coeff(1), rat(-1, 1));
        let rev = elementary_molecule(&m, 2, 0).unwrap();
        assert!(rev.same(&e.scaled(&rat(-1, 1))));
        assert_eq!(elementary_molecule(&m, 1, 1).unwrap_err(), Error::SamePoint("1".into()));
        assert!(matches!(elementary_molecule(&m, 0, 7), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn molecule_sum_must_vanish() {
        let m = space(&[&[0, 1], &[1, 0]]);
        assert!(matches!(Molecule::new(&m, [(0, rat(1, 1))]), Err(Error::NotAMolecule(_))));
        assert!(Molecule::from_labels(&m, [("0", rat(1, 1)), ("1", rat(-1, 1))]).is_ok());
    }

    #[test]
    fn isometry_counts() {
        let tri = space(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        assert_eq!(compute_isometries(&tri).len(), 6);
        let line = space(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        assert_eq!(compute_isometries(&line), vec![vec![0, 1, 2], vec![2, 1, 0]]);
    }

    #[test]
    fn dilations_collapse_to_isometries() {
        let two = space(&[&[0, 3], &[3, 0]]);
        let dil = compute_dilations(&two);
        assert_eq!(dil.len(), 2);
        assert_eq!(dil[0], Dilation { scale: rat(1, 1), map: vec![0, 1] });
        assert_eq!(dil[1], Dilation { scale: rat(1, 1), map: vec![1, 0] });
        let eq4 = space(&[&[0, 1, 1, 1], &[1, 0, 1, 1], &[1, 1, 0, 1], &[1, 1, 1, 0]]);
        let dil = compute_dilations(&eq4);
        assert_eq!(dil.len(), 24);
        assert!(dil.iter().all(|d| d.scale == rat(1, 1)));
    }
}

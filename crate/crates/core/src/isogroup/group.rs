//! The isometry group of the free space over an unweighted graph, assembled
//! from its blocks.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::enumerate::find_sigmas;
use super::pieces::{pieces, quotient_automorphisms, sign_lifts, PieceDecomposition};
use super::{Caps, Mode};
use crate::error::{Error, Result};
use crate::extgraph::ext_graph;
use crate::graphkit::{edge_components, graph_metric, CycleSet, DirectedSymGraph, EdgeId};
use crate::whitney::SignedEdgeBijection;

/// Orders are reported as decimal strings.
fn decimal<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// Abstract structure of a finite group as a term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupStructure {
    Trivial,
    Symmetric { n: usize },
    Cyclic2,
    /// A group known only by its order.
    Opaque {
        name: String,
        #[serde(serialize_with = "decimal")]
        order: BigUint,
    },
    Direct { factors: Vec<GroupStructure> },
    /// `factors` are the groups permuted by `acting`.
    Wreath { factors: Vec<GroupStructure>, acting: Box<GroupStructure> },
}

impl GroupStructure {
    pub fn order(&self) -> BigUint {
        match self {
            GroupStructure::Trivial => BigUint::one(),
            GroupStructure::Symmetric { n } => (1..=*n).map(BigUint::from).product(),
            GroupStructure::Cyclic2 => BigUint::from(2u32),
            GroupStructure::Opaque { order, .. } => order.clone(),
            GroupStructure::Direct { factors } => factors.iter().map(GroupStructure::order).product(),
            GroupStructure::Wreath { factors, acting } => {
                factors.iter().map(GroupStructure::order).product::<BigUint>() * acting.order()
            }
        }
    }

    fn is_trivial(&self) -> bool {
        matches!(self, GroupStructure::Trivial | GroupStructure::Symmetric { n: 0 | 1 })
    }

    /// Drops trivial factors and flattens nested direct products.
    pub fn simplify(self) -> GroupStructure {
        match self {
            GroupStructure::Symmetric { n: 0 | 1 } => GroupStructure::Trivial,
            GroupStructure::Direct { factors } => {
                let mut flat = Vec::new();
                for f in factors.into_iter().map(GroupStructure::simplify) {
                    match f {
                        GroupStructure::Direct { factors } => flat.extend(factors),
                        f if f.is_trivial() => {}
                        f => flat.push(f),
                    }
                }
                match flat.len() {
                    0 => GroupStructure::Trivial,
                    1 => flat.pop().unwrap(),
                    _ => GroupStructure::Direct { factors: flat },
                }
            }
            GroupStructure::Wreath { factors, acting } => {
                let acting = acting.simplify();
                let factors: Vec<_> = factors.into_iter().map(GroupStructure::simplify).collect();
                if acting.is_trivial() {
                    GroupStructure::Direct { factors }.simplify()
                } else if factors.iter().all(GroupStructure::is_trivial) {
                    acting
                } else {
                    GroupStructure::Wreath { factors, acting: Box::new(acting) }
                }
            }
            other => other,
        }
    }

    fn atomic(&self) -> bool {
        !matches!(self, GroupStructure::Direct { .. } | GroupStructure::Wreath { .. })
    }

    fn fmt_wrapped(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atomic() {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }

    /// Runs of equal factors are shown as powers.
    fn fmt_product(factors: &[GroupStructure], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < factors.len() {
            let mut j = i + 1;
            while j < factors.len() && factors[j] == factors[i] {
                j += 1;
            }
            if i > 0 {
                write!(f, " x ")?;
            }
            if j - i > 1 {
                factors[i].fmt_wrapped(f)?;
                write!(f, "^{}", j - i)?;
            } else if factors.len() > 1 {
                factors[i].fmt_wrapped(f)?;
            } else {
                write!(f, "{}", factors[i])?;
            }
            i = j;
        }
        Ok(())
    }
}

impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupStructure::Trivial => write!(f, "1"),
            GroupStructure::Symmetric { n } => write!(f, "S_{n}"),
            GroupStructure::Cyclic2 => write!(f, "Z2"),
            GroupStructure::Opaque { name, .. } => write!(f, "{name}"),
            GroupStructure::Direct { factors } => GroupStructure::fmt_product(factors, f),
            GroupStructure::Wreath { factors, acting } => {
                let same = factors.windows(2).all(|w| w[0] == w[1]);
                if factors.len() == 1 {
                    factors[0].fmt_wrapped(f)?;
                } else if same {
                    GroupStructure::fmt_product(factors, f)?;
                } else {
                    write!(f, "(")?;
                    GroupStructure::fmt_product(factors, f)?;
                    write!(f, ")")?;
                }
                write!(f, " wr ")?;
                acting.fmt_wrapped(f)
            }
        }
    }
}

/// Per-block data behind a [`GroupDescription`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockSummary {
    /// Undirected edge ids of the graph.
    pub edges: Vec<usize>,
    pub pieces: usize,
    pub piece_sizes: Vec<usize>,
    /// Automorphisms of the quotient that lift to signed edge maps.
    pub aut_order: usize,
    /// Automorphisms of the quotient with no lift.
    pub unliftable: usize,
    #[serde(serialize_with = "decimal")]
    pub order: BigUint,
    /// Index of the isometry class of the block's free space.
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupDescription {
    #[serde(serialize_with = "decimal")]
    pub order: BigUint,
    #[serde(skip)]
    pub generators: Vec<SignedEdgeBijection>,
    pub structure: GroupStructure,
    pub blocks: Vec<BlockSummary>,
    /// Order of the closure of the generators when it was computed.
    pub closure_order: Option<usize>,
}

/// Size of the group generated by `gens`, or `None` above `limit`.
pub fn closure_order(gens: &[SignedEdgeBijection], edges: usize, limit: usize) -> Option<usize> {
    closure(gens, edges, limit).map(|s| s.len())
}

fn closure(gens: &[SignedEdgeBijection], edges: usize, limit: usize) -> Option<HashSet<SignedEdgeBijection>> {
    let id = SignedEdgeBijection::identity(edges);
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if !seen.contains(&y) {
                if seen.len() >= limit {
                    return None;
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Some(seen)
}

/// Keeps only generators that enlarge the group, when closures are small
/// enough to compute.
fn prune(gens: Vec<SignedEdgeBijection>, edges: usize, limit: usize) -> Vec<SignedEdgeBijection> {
    let mut kept: Vec<SignedEdgeBijection> = Vec::new();
    let mut group = closure(&kept, edges, limit);
    for g in gens {
        if g.is_identity() {
            continue;
        }
        match &group {
            Some(set) if set.contains(&g) => continue,
            _ => {}
        }
        kept.push(g);
        if group.is_some() {
            group = closure(&kept, edges, limit);
        }
    }
    kept
}

/// Group of one 2-connected block, in the block's own edge indexing.
struct BlockGroup {
    order: BigUint,
    structure: GroupStructure,
    generators: Vec<SignedEdgeBijection>,
    pieces: usize,
    piece_sizes: Vec<usize>,
    aut_order: usize,
    unliftable: usize,
}

fn single_edge_group() -> BlockGroup {
    BlockGroup {
        order: BigUint::from(2u32),
        structure: GroupStructure::Cyclic2,
        generators: vec![SignedEdgeBijection::negation(1)],
        pieces: 2,
        piece_sizes: vec![1, 1],
        aut_order: 1,
        unliftable: 0,
    }
}

fn position_cycle(len: usize, shift: bool) -> Vec<usize> {
    if shift {
        (0..len).map(|i| (i + 1) % len).collect()
    } else {
        let mut p: Vec<usize> = (0..len).collect();
        p.swap(0, 1);
        p
    }
}

fn block_group(g: &DirectedSymGraph, caps: &Caps) -> Result<BlockGroup> {
    if g.num_edges() == 1 {
        return Ok(single_edge_group());
    }
    let dec: PieceDecomposition = pieces(g, caps)?;
    let q = &dec.quotient;
    let k = q.classes.len();
    let set = CycleSet::new(&dec.cycles);
    let identity_inner: Vec<Vec<usize>> = q.labels.iter().map(|&l| (0..l).collect()).collect();

    let auts = quotient_automorphisms(q);
    let id: Vec<usize> = (0..k).collect();
    let base_lifts = sign_lifts(&dec, &id, &set);
    let mut generators = Vec::new();
    let mut lift_total = 0usize;
    let mut liftable = 0usize;
    let mut uniform = true;
    for perm in &auts {
        let lifts = sign_lifts(&dec, perm, &set);
        if lifts.is_empty() {
            continue;
        }
        liftable += 1;
        lift_total += lifts.len();
        uniform &= lifts.len() == base_lifts.len();
        let is_id = perm == &id;
        for (i, flip) in lifts.iter().enumerate() {
            // One lift per automorphism, and every sign pattern of the identity.
            if i > 0 && !is_id {
                break;
            }
            let image: Vec<(usize, bool)> = perm.iter().copied().zip(flip.iter().copied()).collect();
            let sigma = dec.assemble(&image, &identity_inner, &set).expect("lift checked on cycles");
            generators.push(sigma);
        }
    }
    let plain: Vec<(usize, bool)> = (0..k).map(|c| (c, false)).collect();
    for (c, &l) in q.labels.iter().enumerate() {
        for shift in [false, true] {
            if l < 2 || (shift && l < 3) {
                continue;
            }
            let mut inner = identity_inner.clone();
            inner[c] = position_cycle(l, shift);
            generators.push(dec.assemble(&plain, &inner, &set).expect("inner permutations keep cycles"));
        }
    }

    let inner_order: BigUint = q.labels.iter().map(|&l| (1..=l).map(BigUint::from).product::<BigUint>()).product();
    let order = inner_order * BigUint::from(lift_total);
    let s: Vec<GroupStructure> = q.labels.iter().map(|&n| GroupStructure::Symmetric { n }).collect();
    let structure = if uniform && base_lifts.len() == 2 {
        let aut = match liftable {
            1 => GroupStructure::Trivial,
            n => GroupStructure::Opaque { name: format!("Aut[{n}]"), order: BigUint::from(n) },
        };
        GroupStructure::Direct {
            factors: vec![GroupStructure::Wreath { factors: s, acting: Box::new(aut) }, GroupStructure::Cyclic2],
        }
    } else {
        GroupStructure::Opaque { name: format!("G[{order}]"), order: order.clone() }
    };
    let mut piece_sizes = dec.labels.clone();
    piece_sizes.sort_unstable();
    Ok(BlockGroup {
        order,
        structure: structure.simplify(),
        generators,
        pieces: dec.pieces.len(),
        piece_sizes,
        aut_order: liftable,
        unliftable: auts.len() - liftable,
    })
}

/// Carries a block-local σ into the whole graph, identity elsewhere.
fn embed(local: &SignedEdgeBijection, edges: &[usize], total: usize) -> SignedEdgeBijection {
    embed_between(local, edges, edges, total, None)
}

/// σ on the whole graph acting as `local : block a → block b` and, when
/// given, `back : block b → block a`.
fn embed_between(
    local: &SignedEdgeBijection,
    from: &[usize],
    to: &[usize],
    total: usize,
    back: Option<&SignedEdgeBijection>,
) -> SignedEdgeBijection {
    let mut forward: Vec<EdgeId> = (0..total).map(|k| EdgeId::new(k, false)).collect();
    for (i, &k) in from.iter().enumerate() {
        let img = local.apply(EdgeId::new(i, false));
        forward[k] = EdgeId::new(to[img.undirected()], img.is_reversed());
    }
    if let Some(back) = back {
        for (i, &k) in to.iter().enumerate() {
            let img = back.apply(EdgeId::new(i, false));
            forward[k] = EdgeId::new(from[img.undirected()], img.is_reversed());
        }
    }
    SignedEdgeBijection::from_forward_images(&forward)
}

/// `LIso(F(G))` for a connected unweighted graph with its graph metric.
pub fn graph_liso(g: &DirectedSymGraph, caps: &Caps) -> Result<GroupDescription> {
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let total = g.num_edges();
    if total == 0 {
        return Ok(GroupDescription {
            order: BigUint::one(),
            generators: Vec::new(),
            structure: GroupStructure::Trivial,
            blocks: Vec::new(),
            closure_order: Some(1),
        });
    }
    let blocks = edge_components(g);
    let mut subs = Vec::with_capacity(blocks.len());
    let mut groups = Vec::with_capacity(blocks.len());
    for b in &blocks {
        // edge_subgraph keeps the sorted edge order and vertex order.
        let (sub, _) = g.edge_subgraph(b);
        groups.push(block_group(&sub, caps)?);
        subs.push(sub);
    }

    // Isometry classes of blocks and, per class, maps from the first member.
    let mut class = vec![usize::MAX; blocks.len()];
    let mut members: Vec<Vec<(usize, Option<SignedEdgeBijection>)>> = Vec::new();
    let census: Vec<_> = subs.iter().map(|s| block_census(s, caps)).collect::<Result<_>>()?;
    for i in 0..blocks.len() {
        if class[i] != usize::MAX {
            continue;
        }
        class[i] = members.len();
        let mut list = vec![(i, None)];
        let mi = graph_metric(&subs[i])?;
        let gi = ext_graph(&mi);
        for j in i + 1..blocks.len() {
            if class[j] != usize::MAX || census[j] != census[i] {
                continue;
            }
            let mj = graph_metric(&subs[j])?;
            let gj = ext_graph(&mj);
            let found = find_sigmas(&gi, &gj, &mi, &mj, Mode::SaSb, caps, Some(1))?;
            if let Some(tau) = found.sigmas.into_iter().next() {
                class[j] = class[i];
                list.push((j, Some(tau)));
            }
        }
        members.push(list);
    }

    let mut generators = Vec::new();
    for (b, grp) in groups.iter().enumerate() {
        if members[class[b]][0].0 == b {
            generators.extend(grp.generators.iter().map(|s| embed(s, &blocks[b], total)));
        }
    }
    let mut factors = Vec::new();
    let mut order = BigUint::one();
    for list in &members {
        let first = list[0].0;
        let k = list.len();
        order *= groups[first].order.pow(k as u32) * (1..=k).map(BigUint::from).product::<BigUint>();
        let g0 = groups[first].structure.clone();
        factors.push(if k == 1 {
            g0
        } else {
            GroupStructure::Wreath { factors: vec![g0; k], acting: Box::new(GroupStructure::Symmetric { n: k }) }
        });
        if k < 2 {
            continue;
        }
        let taus: Vec<SignedEdgeBijection> = list
            .iter()
            .map(|(_, t)| t.clone().unwrap_or_else(|| SignedEdgeBijection::identity(blocks[first].len())))
            .collect();
        // Swap of the first two blocks, and the cycle through all of them.
        let (b0, b1) = (list[0].0, list[1].0);
        generators.push(embed_between(&taus[1], &blocks[b0], &blocks[b1], total, Some(&taus[1].inverse())));
        if k > 2 {
            let mut forward: Vec<EdgeId> = (0..total).map(|e| EdgeId::new(e, false)).collect();
            for j in 0..k {
                let next = (j + 1) % k;
                // block j → block next through the first block.
                let step = taus[next].compose(&taus[j].inverse());
                let (bj, bn) = (list[j].0, list[next].0);
                for (i, &e) in blocks[bj].iter().enumerate() {
                    let img = step.apply(EdgeId::new(i, false));
                    forward[e] = EdgeId::new(blocks[bn][img.undirected()], img.is_reversed());
                }
            }
            generators.push(SignedEdgeBijection::from_forward_images(&forward));
        }
    }
    let structure = GroupStructure::Direct { factors }.simplify();
    debug_assert_eq!(structure.order(), order);
    let generators = prune(generators, total, caps.closure_limit);
    let closure_order = closure_order(&generators, total, caps.closure_limit);
    if let Some(c) = closure_order {
        if BigUint::from(c) != order {
            return Err(Error::Input(format!("generators close to {c} elements, expected {order}")));
        }
    }
    let blocks = blocks
        .iter()
        .zip(&groups)
        .enumerate()
        .map(|(b, (edges, grp))| BlockSummary {
            edges: edges.clone(),
            pieces: grp.pieces,
            piece_sizes: grp.piece_sizes.clone(),
            aut_order: grp.aut_order,
            unliftable: grp.unliftable,
            order: grp.order.clone(),
            class: class[b],
        })
        .collect();
    Ok(GroupDescription { order, generators, structure, blocks, closure_order })
}

/// Cheap isomorphism invariant: vertex and edge counts, cycle-length census.
fn block_census(g: &DirectedSymGraph, caps: &Caps) -> Result<(usize, usize, Vec<(usize, usize)>)> {
    let cycles = caps.long_cycles(g)?;
    let mut hist: HashMap<usize, usize> = HashMap::new();
    for c in &cycles {
        *hist.entry(c.len()).or_default() += 1;
    }
    let mut hist: Vec<_> = hist.into_iter().collect();
    hist.sort_unstable();
    Ok((g.num_vertices(), g.num_edges(), hist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphkit::families;

    fn liso(g: &DirectedSymGraph) -> GroupDescription {
        graph_liso(g, &Caps::default()).unwrap()
    }

    #[test]
    fn golden_orders_and_structures() {
        let cases: [(DirectedSymGraph, u32, &str); 8] = [
            (families::path(1), 2, "Z2"),
            (families::path(2), 8, "Z2^2 wr S_2"),
            (families::path(3), 48, "Z2^3 wr S_3"),
            (families::cycle(3), 12, "S_3 x Z2"),
            (families::cycle(4), 48, "S_4 x Z2"),
            (families::complete(4), 48, "Aut[24] x Z2"),
            (families::bowtie(), 288, "(S_3 x Z2)^2 wr S_2"),
            (families::theta(&[1, 1, 1]), 96, "(S_2^3 wr Aut[6]) x Z2"),
        ];
        for (g, order, text) in cases {
            let d = liso(&g);
            assert_eq!(d.order, BigUint::from(order));
            assert_eq!(d.structure.order(), d.order);
            assert_eq!(d.structure.to_string(), text);
            assert_eq!(d.closure_order, Some(order as usize));
        }
    }

    #[test]
    fn cycle_formula() {
        for n in 3..=6 {
            let d = liso(&families::cycle(n));
            let fact: u32 = (1..=n as u32).product();
            assert_eq!(d.order, BigUint::from(2 * fact));
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = DirectedSymGraph::numbered(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(graph_liso(&g, &Caps::default()), Err(Error::NotConnected));
    }

    #[test]
    fn rendering_and_simplification() {
        let w = GroupStructure::Wreath {
            factors: vec![GroupStructure::Symmetric { n: 4 }, GroupStructure::Symmetric { n: 4 }],
            acting: Box::new(GroupStructure::Symmetric { n: 2 }),
        };
        let g = GroupStructure::Direct { factors: vec![w, GroupStructure::Symmetric { n: 1 }, GroupStructure::Cyclic2] };
        let g = g.simplify();
        assert_eq!(g.to_string(), "(S_4^2 wr S_2) x Z2");
        assert_eq!(g.order(), BigUint::from(24u32 * 24 * 2 * 2));
    }
}

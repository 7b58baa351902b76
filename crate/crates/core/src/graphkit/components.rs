//! Edge components: the finest partition of the edges such that every
//! simple cycle lies inside one class. These are the biconnected blocks,
//! with bridges as singleton classes.

use super::DirectedSymGraph;

/// Edge components as sorted lists of undirected edge indices, ordered by
/// their smallest edge.
pub fn edge_components(g: &DirectedSymGraph) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut stack: Vec<usize> = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        // Frames: (vertex, edge used to enter it, next neighbour position).
        let mut frames: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        while let Some(&mut (v, parent_edge, ref mut pos)) = frames.last_mut() {
            if *pos < g.neighbors(v).len() {
                let (w, e) = g.neighbors(v)[*pos];
                *pos += 1;
                let k = e.undirected();
                if Some(k) == parent_edge {
                    continue;
                }
                if disc[w] == usize::MAX {
                    stack.push(k);
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    frames.push((w, Some(k), 0));
                } else if disc[w] < disc[v] {
                    stack.push(k);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                frames.pop();
                if let Some(&(u, _, _)) = frames.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let k = parent_edge.unwrap();
                        let mut block = Vec::new();
                        while let Some(top) = stack.pop() {
                            block.push(top);
                            if top == k {
                                break;
                            }
                        }
                        block.sort_unstable();
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks.sort();
    blocks
}

/// Blocks, articulation points and their incidence.
#[derive(Clone, Debug)]
pub struct BlockCutTree {
    pub blocks: Vec<Vec<usize>>,
    /// Vertices of each block.
    pub block_vertices: Vec<Vec<usize>>,
    pub cut_vertices: Vec<usize>,
}

impl BlockCutTree {
    /// Path of blocks from the block containing `a` to the one containing
    /// `b`, with the vertices where consecutive blocks meet. Requires a
    /// connected graph.
    pub fn route(&self, a: usize, b: usize) -> Vec<(usize, usize, usize)> {
        // Nodes: blocks 0..B, then vertices as B + v. BFS over incidence.
        let nb = self.blocks.len();
        let nv = self.block_vertices.iter().flatten().max().map_or(0, |m| m + 1).max(a + 1).max(b + 1);
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nb + nv];
        for (i, vs) in self.block_vertices.iter().enumerate() {
            for &v in vs {
                adj[i].push(nb + v);
                adj[nb + v].push(i);
            }
        }
        let mut pred = vec![usize::MAX; nb + nv];
        let start = nb + a;
        pred[start] = start;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if pred[w] == usize::MAX {
                    pred[w] = u;
                    queue.push_back(w);
                }
            }
        }
        let mut nodes = vec![nb + b];
        while *nodes.last().unwrap() != start {
            let prev = pred[*nodes.last().unwrap()];
            assert!(prev != usize::MAX, "route between disconnected vertices");
            nodes.push(prev);
        }
        nodes.reverse();
        // nodes alternates vertex, block, vertex, ..., vertex.
        nodes.windows(3).step_by(2).map(|w| (w[1], w[0] - nb, w[2] - nb)).collect()
    }
}

pub fn block_cut_tree(g: &DirectedSymGraph) -> BlockCutTree {
    let blocks = edge_components(g);
    let mut block_vertices = Vec::with_capacity(blocks.len());
    let mut count = vec![0usize; g.num_vertices()];
    for b in &blocks {
        let mut vs: Vec<usize> = b.iter().flat_map(|&k| [g.edges()[k].0, g.edges()[k].1]).collect();
        vs.sort_unstable();
        vs.dedup();
        for &v in &vs {
            count[v] += 1;
        }
        block_vertices.push(vs);
    }
    let cut_vertices = (0..g.num_vertices()).filter(|&v| count[v] > 1).collect();
    BlockCutTree { blocks, block_vertices, cut_vertices }
}

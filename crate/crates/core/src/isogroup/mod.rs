//! Isometry-inducing edge bijections and the groups they form.

mod conditions;
mod enumerate;
mod group;
mod l1;
mod pieces;
mod rigidity;

use crate::graphkit::{simple_cycles, CycleOptions, DirectedSymGraph, SimpleCycle};
use crate::error::{Error, Result};
use crate::graphkit::UnionFind;

pub use conditions::{apply_sigma, check_conditions, path_sum, CheckedSigma, ConditionReport};
pub use enumerate::{enumerate_sigma, find_sigmas, SigmaSet};
pub use group::{closure_order, graph_liso, BlockSummary, GroupDescription, GroupStructure};
pub use l1::{l1_decomposition_check, split_along_blocks, L1Report};
pub use pieces::{pieces, quotient_automorphisms, PieceDecomposition, Quotient};
pub use rigidity::{
    decide_rigidity, decide_rigidity_with_ext, factor_sigma, factorization_holds, Factorization, RigidityPath,
    RigidityVerdict,
};

/// Which conditions an edge bijection must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Mode {
    /// Cycle preservation and cycle-wise constant weight ratio.
    SaSb,
    /// Additionally the path-sum norm condition, in both directions.
    SaSbSc,
}

/// Limits that turn worst cases into errors instead of hangs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_cycles: usize,
    pub max_cycle_len: Option<usize>,
    pub search_nodes: u64,
    /// Group closure is only attempted up to this many elements.
    pub closure_limit: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_cycles: crate::graphkit::DEFAULT_MAX_CYCLES,
            max_cycle_len: None,
            search_nodes: 20_000_000,
            closure_limit: 1_000_000,
        }
    }
}

impl Caps {
    pub(crate) fn cycle_options(&self) -> CycleOptions {
        CycleOptions { min_len: 3, max_len: self.max_cycle_len, max_count: self.max_cycles }
    }

    /// All simple directed cycles of length ≥ 3; an error if a cap was hit.
    pub(crate) fn long_cycles(&self, g: &DirectedSymGraph) -> Result<Vec<SimpleCycle>> {
        if self.max_cycle_len.is_some_and(|l| l < g.num_vertices()) && !is_forest(g) {
            // Longer cycles may exist and would be missing from the list.
            return Err(Error::IncompleteCycleList);
        }
        simple_cycles(g, self.cycle_options())?.require_complete(self.max_cycles)
    }
}

fn is_forest(g: &DirectedSymGraph) -> bool {
    let mut uf = UnionFind::new(g.num_vertices());
    g.edges().iter().all(|&(a, b)| uf.union(a, b))
}

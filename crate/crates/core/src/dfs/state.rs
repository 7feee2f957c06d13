use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Forest, Graph, Vertex};
use crate::percolation::EdgeOracle;

/// Which of the four disjoint sets a vertex is in. The safe stack is a
/// sub-structure of the active stack and has no status of its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VertexStatus {
    #[cfg_attr(feature = "serde", serde(rename = "U"))]
    Unprocessed,
    #[cfg_attr(feature = "serde", serde(rename = "A"))]
    Active,
    #[cfg_attr(feature = "serde", serde(rename = "W"))]
    Processed,
    #[cfg_attr(feature = "serde", serde(rename = "T"))]
    Trashed,
}

/// What a single search step did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepEvent {
    /// The active stack was empty; the first unprocessed vertex became its root.
    Started(Vertex),
    /// A positive query from the head moved `child` onto the stack.
    Extended { parent: Vertex, child: Vertex },
    /// The head had no unqueried unprocessed neighbours left and was processed.
    Processed(Vertex),
}

/// The evolving search state: the `W/A/U/T` partition, the safe stack, the
/// forest of positive queries and the block counters.
#[derive(Clone, Debug)]
pub struct DfsState {
    pub(crate) status: Vec<VertexStatus>,
    pub(crate) active: Vec<Vertex>,
    pub(crate) safe: Vec<Vertex>,
    pub(crate) forest: Forest,
    pub(crate) cursor: Vec<usize>,
    pub(crate) next_unprocessed: usize,
    pub(crate) processed: usize,
    pub(crate) block: usize,
    pub(crate) block_outcomes: Vec<bool>,
    pub(crate) block_first: Option<Vertex>,
    pub(crate) processed_in: Vec<Option<usize>>,
    pub(crate) steps: u64,
}

impl DfsState {
    /// Initial state: everything unprocessed, block 1 open.
    pub fn new(n: usize) -> Self {
        DfsState {
            status: vec![VertexStatus::Unprocessed; n],
            active: Vec::new(),
            safe: Vec::new(),
            forest: Forest::new(n),
            cursor: vec![0; n],
            next_unprocessed: 0,
            processed: 0,
            block: 1,
            block_outcomes: Vec::new(),
            block_first: None,
            processed_in: vec![None; n],
            steps: 0,
        }
    }

    /// Hand-built state for exercising the boundary rules. `parent` must
    /// describe a forest and `active` must follow it from a root.
    pub fn from_parts(
        status: Vec<VertexStatus>,
        active: Vec<Vertex>,
        safe: Vec<Vertex>,
        parent: Vec<Option<Vertex>>,
    ) -> Result<Self> {
        let n = status.len();
        if parent.len() != n {
            return Err(Error::Input("status and parent lengths differ"));
        }
        let forest = Forest::from_parents(parent)?;
        let mut state = DfsState::new(n);
        state.next_unprocessed = status
            .iter()
            .position(|&s| s == VertexStatus::Unprocessed)
            .unwrap_or(n);
        state.processed = status
            .iter()
            .filter(|&&s| s != VertexStatus::Unprocessed && s != VertexStatus::Active)
            .count();
        state.status = status;
        state.active = active;
        state.safe = safe;
        state.forest = forest;
        Ok(state)
    }

    pub fn vertex_count(&self) -> usize {
        self.status.len()
    }

    pub fn status(&self, v: Vertex) -> VertexStatus {
        self.status[v]
    }

    pub fn statuses(&self) -> &[VertexStatus] {
        &self.status
    }

    /// Active stack, bottom first; the head is the last element.
    pub fn active(&self) -> &[Vertex] {
        &self.active
    }

    pub fn safe(&self) -> &[Vertex] {
        &self.safe
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn processed_count(&self) -> usize {
        self.processed
    }

    /// 1-based index of the block currently receiving queries.
    pub fn current_block(&self) -> usize {
        self.block
    }

    /// Fresh queries charged to the open block so far.
    pub fn block_queries(&self) -> usize {
        self.block_outcomes.len()
    }

    pub fn block_of(&self, v: Vertex) -> Option<usize> {
        self.processed_in[v]
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn is_finished(&self) -> bool {
        self.active.is_empty() && self.first_unprocessed().is_none()
    }

    fn first_unprocessed(&self) -> Option<Vertex> {
        (self.next_unprocessed..self.status.len()).find(|&v| self.status[v] == VertexStatus::Unprocessed)
    }

    /// One step of the search.
    pub fn step(&mut self, g: &Graph, oracle: &mut EdgeOracle<'_>) -> Result<StepEvent> {
        let Some(&head) = self.active.last() else {
            let v = self
                .first_unprocessed()
                .ok_or(Error::State("step called on a finished search"))?;
            self.next_unprocessed = v + 1;
            self.status[v] = VertexStatus::Active;
            self.active.push(v);
            self.steps += 1;
            return Ok(StepEvent::Started(v));
        };
        self.steps += 1;
        let nbrs = g.neighbors(head);
        while self.cursor[head] < nbrs.len() {
            let u = nbrs[self.cursor[head]];
            self.cursor[head] += 1;
            if self.status[u] != VertexStatus::Unprocessed {
                continue;
            }
            let fresh = oracle.layer1_memo(head, u).is_none();
            let present = oracle.query_layer1(head, u, self.block)?;
            if fresh {
                self.block_outcomes.push(present);
            }
            if present {
                self.status[u] = VertexStatus::Active;
                self.active.push(u);
                self.forest.link(u, head);
                return Ok(StepEvent::Extended {
                    parent: head,
                    child: u,
                });
            }
        }
        self.active.pop();
        self.status[head] = VertexStatus::Processed;
        self.processed += 1;
        self.processed_in[head] = Some(self.block);
        self.block_first.get_or_insert(head);
        Ok(StepEvent::Processed(head))
    }

    /// The active vertex nearest to `x` in the forest, if `x` shares a tree
    /// with the active path. The active path runs from its tree's root, so
    /// this is the deepest active ancestor of `x` (or `x` itself).
    pub fn closest_active(&self, x: Vertex) -> Option<Vertex> {
        let mut v = x;
        loop {
            if self.status[v] == VertexStatus::Active {
                return Some(v);
            }
            v = self.forest.parent(v)?;
        }
    }

    /// Bad-block rollback to the top safe vertex `y`: every active vertex
    /// above `y` and each of their processed descendants is trashed, and `y`
    /// leaves the safe stack. Returns the trashed vertices, or the reason the
    /// search must stop.
    pub fn rollback(&mut self) -> core::result::Result<(Vertex, Vec<Vertex>), FailureReason> {
        let &y = self.safe.last().ok_or(FailureReason::NoSafeVertex)?;
        if self.status[y] != VertexStatus::Active {
            return Err(FailureReason::SafeNotActive(y));
        }
        let mut trashed = Vec::new();
        let mut stack = Vec::new();
        while let Some(&top) = self.active.last() {
            if top == y {
                break;
            }
            self.active.pop();
            self.status[top] = VertexStatus::Trashed;
            trashed.push(top);
            stack.push(top);
            while let Some(v) = stack.pop() {
                for &c in self.forest.children(v) {
                    if self.status[c] == VertexStatus::Processed {
                        self.status[c] = VertexStatus::Trashed;
                        trashed.push(c);
                        stack.push(c);
                    }
                }
            }
        }
        self.safe.pop();
        Ok((y, trashed))
    }
}

/// Why the search stopped and failed at a bad block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FailureReason {
    NoSafeVertex,
    SafeNotActive(Vertex),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::percolation::split_probability;
    use VertexStatus::*;

    #[test]
    fn empty_stack_takes_first_unprocessed() {
        let g = Graph::empty(10);
        let mut status = vec![Processed; 10];
        status[5] = Unprocessed;
        status[9] = Unprocessed;
        let mut st = DfsState::from_parts(status, vec![], vec![], vec![None; 10]).unwrap();
        let mut o = EdgeOracle::new(&g, split_probability(0.5, 0.0).unwrap(), 0).unwrap();
        assert_eq!(st.step(&g, &mut o).unwrap(), StepEvent::Started(5));
        assert_eq!(st.active(), &[5]);
    }

    #[test]
    fn zero_probability_head_exhausts_neighbours() {
        // star: centre 0 with three leaves
        let g = generators::complete_bipartite(1, 3).unwrap();
        let mut o = EdgeOracle::new(&g, split_probability(0.0, 0.0).unwrap(), 0).unwrap();
        let mut st = DfsState::new(4);
        st.step(&g, &mut o).unwrap();
        assert_eq!(st.step(&g, &mut o).unwrap(), StepEvent::Processed(0));
        assert_eq!(st.block_outcomes, vec![false, false, false]);
        assert_eq!(st.status(0), Processed);
        assert_eq!(st.processed_count(), 1);
    }

    #[test]
    fn path_trace_with_certain_edges() {
        let g = generators::path(3).unwrap();
        let mut o = EdgeOracle::new(&g, split_probability(1.0, 0.0).unwrap(), 0).unwrap();
        let mut st = DfsState::new(3);
        let mut trace = Vec::new();
        while !st.is_finished() {
            st.step(&g, &mut o).unwrap();
            trace.push((st.active().to_vec(), st.statuses().to_vec()));
        }
        let want = [
            (vec![0], vec![Active, Unprocessed, Unprocessed]),
            (vec![0, 1], vec![Active, Active, Unprocessed]),
            (vec![0, 1, 2], vec![Active, Active, Active]),
            (vec![0, 1], vec![Active, Active, Processed]),
            (vec![0], vec![Active, Processed, Processed]),
            (vec![], vec![Processed, Processed, Processed]),
        ];
        assert_eq!(trace, want);
        assert!(st.step(&g, &mut o).is_err());
        assert_eq!(st.forest().parent(2), Some(1));
    }

    #[test]
    fn rollback_trashes_above_and_descendants() {
        // r=0, y=1, u=2, w=3 on the path; a=4, b=5 processed under u
        let status = vec![Active, Active, Active, Active, Processed, Processed, Unprocessed];
        let parent = vec![None, Some(0), Some(1), Some(2), Some(2), Some(4), None];
        let mut st = DfsState::from_parts(status, vec![0, 1, 2, 3], vec![1], parent).unwrap();
        let (y, mut trashed) = st.rollback().unwrap();
        assert_eq!(y, 1);
        trashed.sort_unstable();
        assert_eq!(trashed, vec![2, 3, 4, 5]);
        assert_eq!(st.active(), &[0, 1]);
        assert!(st.safe().is_empty());
        assert_eq!(st.status(6), Unprocessed);
    }

    #[test]
    fn rollback_at_head_only_pops_safe() {
        let status = vec![Active, Active];
        let mut st = DfsState::from_parts(status, vec![0, 1], vec![0, 1], vec![None, Some(0)]).unwrap();
        let (y, trashed) = st.rollback().unwrap();
        assert_eq!((y, trashed.len()), (1, 0));
        assert_eq!(st.safe(), &[0]);
        assert_eq!(st.active(), &[0, 1]);
    }

    #[test]
    fn rollback_failures() {
        let mut st = DfsState::from_parts(vec![Active], vec![0], vec![], vec![None]).unwrap();
        assert_eq!(st.rollback(), Err(FailureReason::NoSafeVertex));
        let mut st = DfsState::from_parts(
            vec![Active, Processed],
            vec![0],
            vec![1],
            vec![None, Some(0)],
        )
        .unwrap();
        assert_eq!(st.rollback(), Err(FailureReason::SafeNotActive(1)));
    }

    #[test]
    fn closest_active_examples() {
        // path 0-1-2-3 active; 4 under 2, 5 under 4 processed; 6 separate
        let status = vec![Active, Active, Active, Active, Processed, Processed, Processed];
        let parent = vec![None, Some(0), Some(1), Some(2), Some(2), Some(4), None];
        let st = DfsState::from_parts(status, vec![0, 1, 2, 3], vec![], parent).unwrap();
        assert_eq!(st.closest_active(3), Some(3));
        assert_eq!(st.closest_active(5), Some(2));
        assert_eq!(st.closest_active(6), None);
    }
}

use crate::graph::Vertex;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("({0}, {1}) is not an edge of the ambient graph")]
    NotAnEdge(Vertex, Vertex),
    #[error("forest parent pointers contain a cycle through vertex {0}")]
    ForestCycle(Vertex),
    #[error("invalid input: {0}")]
    Input(&'static str),
    #[error("graph generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("enumeration of C({n}, {k}) subsets exceeds budget {budget}; use sampled certification")]
    BudgetExceeded { n: usize, k: usize, budget: u64 },
    #[error("infeasible sprinkling split: p = {p}, p2 = {p2}")]
    InfeasibleSplit { p: f64, p2: f64 },
    #[error("probability out of range: {0}")]
    Probability(f64),
    #[error("outside the bound's domain: {0}")]
    Domain(&'static str),
    #[error("search state error: {0}")]
    State(&'static str),
    #[error("cycle failed revalidation at edge ({0}, {1})")]
    InvalidCycle(Vertex, Vertex),
}

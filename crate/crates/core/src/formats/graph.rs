use serde::Serialize;

use crate::error::{Error, Result};

/// Virtual bond between two cores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub dim: usize,
}

/// Physical mode attached to a core.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OpenLeg {
    pub node: usize,
    pub mode: usize,
    pub dim: usize,
}

/// Bond structure of a tensor-network model: cores, virtual bonds and the
/// open legs carrying the physical modes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorNetworkGraph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    open_legs: Vec<OpenLeg>,
}

impl TensorNetworkGraph {
    pub fn new(nodes: Vec<String>, edges: Vec<Edge>, mut open_legs: Vec<OpenLeg>) -> Result<Self> {
        let n = nodes.len();
        for e in &edges {
            if e.a >= n || e.b >= n {
                return Err(Error::Graph(format!(
                    "edge {e:?} references a missing node"
                )));
            }
            if e.a == e.b {
                return Err(Error::Graph(format!("self-loop on node {}", nodes[e.a])));
            }
            if e.dim == 0 {
                return Err(Error::Graph(format!("edge {e:?} has zero dimension")));
            }
        }
        open_legs.sort_by_key(|l| l.mode);
        for (k, leg) in open_legs.iter().enumerate() {
            if leg.mode != k {
                return Err(Error::Graph(format!(
                    "open legs must cover modes 0..{} exactly once",
                    open_legs.len()
                )));
            }
            if leg.node >= n || leg.dim == 0 {
                return Err(Error::Graph(format!("invalid open leg {leg:?}")));
            }
        }
        Ok(Self {
            nodes,
            edges,
            open_legs,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Open legs sorted by mode.
    pub fn open_legs(&self) -> &[OpenLeg] {
        &self.open_legs
    }

    /// Number of physical modes.
    pub fn order(&self) -> usize {
        self.open_legs.len()
    }

    pub fn physical_dims(&self) -> Vec<usize> {
        self.open_legs.iter().map(|l| l.dim).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leg(node: usize, mode: usize) -> OpenLeg {
        OpenLeg { node, mode, dim: 2 }
    }

    #[test]
    fn validates_legs_and_edges() {
        let nodes = vec!["a".to_string(), "b".to_string()];
        let edge = Edge { a: 0, b: 1, dim: 3 };
        assert!(
            TensorNetworkGraph::new(nodes.clone(), vec![edge], vec![leg(0, 0), leg(1, 1)]).is_ok()
        );
        // missing mode 1
        assert!(
            TensorNetworkGraph::new(nodes.clone(), vec![edge], vec![leg(0, 0), leg(1, 2)]).is_err()
        );
        // duplicated mode
        assert!(
            TensorNetworkGraph::new(nodes.clone(), vec![edge], vec![leg(0, 0), leg(1, 0)]).is_err()
        );
        let zero = Edge { a: 0, b: 1, dim: 0 };
        assert!(TensorNetworkGraph::new(nodes.clone(), vec![zero], vec![leg(0, 0)]).is_err());
        let selfloop = Edge { a: 1, b: 1, dim: 2 };
        assert!(TensorNetworkGraph::new(nodes, vec![selfloop], vec![leg(0, 0)]).is_err());
    }

    #[test]
    fn connectivity() {
        let nodes = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let g = TensorNetworkGraph::new(
            nodes.clone(),
            vec![Edge { a: 0, b: 1, dim: 2 }],
            vec![leg(0, 0), leg(2, 1)],
        )
        .unwrap();
        assert!(!g.is_connected());
        let g = TensorNetworkGraph::new(
            nodes,
            vec![Edge { a: 0, b: 1, dim: 2 }, Edge { a: 1, b: 2, dim: 2 }],
            vec![leg(0, 0), leg(2, 1)],
        )
        .unwrap();
        assert!(g.is_connected());
    }
}

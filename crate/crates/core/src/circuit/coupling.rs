use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected hardware connectivity graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCoupling", into = "RawCoupling")]
pub struct CouplingGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawCoupling {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawCoupling> for CouplingGraph {
    type Error = Error;

    fn try_from(r: RawCoupling) -> Result<Self> {
        CouplingGraph::new(r.n, &r.edges)
    }
}

impl From<CouplingGraph> for RawCoupling {
    fn from(g: CouplingGraph) -> Self {
        RawCoupling {
            n: g.n,
            edges: g.edges(),
        }
    }
}

impl CouplingGraph {
    /// Build from an edge list; the graph must be connected and loop-free.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("coupling graph needs at least one node".into()));
        }
        let mut sets = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) out of range for {n} nodes"
                )));
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop on node {a}")));
            }
            sets[a].insert(b);
            sets[b].insert(a);
        }
        let adj: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let dist: Vec<Vec<usize>> = (0..n).map(|s| bfs(&adj, s)).collect();
        if dist[0].contains(&usize::MAX) {
            return Err(Error::DisconnectedGraph);
        }
        Ok(CouplingGraph { n, adj, dist })
    }

    pub fn all_to_all(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Self::new(n, &edges).expect("complete graph is connected")
    }

    pub fn line(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path is connected")
    }

    pub fn ring(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Self::new(n, &edges).expect("ring is connected")
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if c + 1 < cols {
                    edges.push((i, i + 1));
                }
                if r + 1 < rows {
                    edges.push((i, i + cols));
                }
            }
        }
        Self::new(rows * cols, &edges).expect("grid is connected")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, a: usize) -> &[usize] {
        &self.adj[a]
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.dist[a][b] == 1
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.dist[a][b]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ns) in self.adj.iter().enumerate() {
            for &b in ns {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if d[v] == usize::MAX {
                d[v] = d[u] + 1;
                q.push_back(v);
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_disconnected_and_loops() {
        assert!(matches!(
            CouplingGraph::new(3, &[(0, 1)]),
            Err(Error::DisconnectedGraph)
        ));
        assert!(CouplingGraph::new(2, &[(1, 1), (0, 1)]).is_err());
    }

    #[test]
    fn distances_on_a_path() {
        let g = CouplingGraph::line(4);
        assert_eq!(g.distance(0, 3), 3);
        assert!(g.is_edge(1, 2));
        assert!(!g.is_edge(0, 2));
    }

    #[test]
    fn json_is_an_edge_list() {
        let g = CouplingGraph::line(3);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        let back: CouplingGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}

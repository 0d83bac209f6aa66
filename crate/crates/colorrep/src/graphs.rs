//! Finite simple graphs on vertex set [n]: construction, spanning trees,
//! girth, and cycle counting through a vertex set.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Simple undirected graph; vertices are `1..=n`, edges stored as `(i, j)`
/// with `i < j`, in insertion order (the order matters for the deterministic
/// spanning tree).
#[derive(Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    connected: OnceLock<bool>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph {
            n: self.n,
            edges: self.edges.clone(),
            connected: OnceLock::new(),
        }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}
impl Eq for Graph {}

impl Graph {
    pub fn from_edge_list(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("graph needs at least one vertex"));
        }
        let mut edges = Vec::with_capacity(pairs.len());
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in pairs {
            if a == b {
                return Err(Error::validation(format!("loop edge ({a},{b})")));
            }
            if a < 1 || a > n || b < 1 || b > n {
                return Err(Error::validation(format!(
                    "edge ({a},{b}) out of range for n={n}"
                )));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::validation(format!("duplicate edge ({},{})", e.0, e.1)));
            }
            edges.push(e);
        }
        Ok(Graph {
            n,
            edges,
            connected: OnceLock::new(),
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut pairs = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                pairs.push((i, j));
            }
        }
        Graph::from_edge_list(n, &pairs)
    }

    pub fn path(k: usize) -> Result<Self> {
        let pairs: Vec<_> = (1..k).map(|i| (i, i + 1)).collect();
        Graph::from_edge_list(k, &pairs)
    }

    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::validation("cycle needs at least 3 vertices"));
        }
        let mut pairs: Vec<_> = (1..k).map(|i| (i, i + 1)).collect();
        pairs.push((1, k));
        Graph::from_edge_list(k, &pairs)
    }

    /// Named presets accepted on the CLI: `K3`..`K8`, `path_k`, `cycle_k`.
    pub fn preset(name: &str) -> Result<Self> {
        if let Some(rest) = name.strip_prefix('K') {
            let n: usize = rest
                .parse()
                .map_err(|_| Error::validation(format!("bad preset `{name}`")))?;
            if !(1..=8).contains(&n) {
                return Err(Error::validation(format!("preset `{name}` out of range K1..K8")));
            }
            return Graph::complete(n);
        }
        if let Some(rest) = name.strip_prefix("path_") {
            let k: usize = rest
                .parse()
                .map_err(|_| Error::validation(format!("bad preset `{name}`")))?;
            return Graph::path(k);
        }
        if let Some(rest) = name.strip_prefix("cycle_") {
            let k: usize = rest
                .parse()
                .map_err(|_| Error::validation(format!("bad preset `{name}`")))?;
            return Graph::cycle(k);
        }
        Err(Error::validation(format!(
            "unknown graph preset `{name}` (expected K3..K8, path_k, cycle_k)"
        )))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_connected(&self) -> bool {
        *self.connected.get_or_init(|| {
            let mut seen = vec![false; self.n + 1];
            let mut stack = vec![1usize];
            seen[1] = true;
            let mut count = 1;
            while let Some(v) = stack.pop() {
                for &(a, b) in &self.edges {
                    let w = if a == v {
                        b
                    } else if b == v {
                        a
                    } else {
                        continue;
                    };
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        stack.push(w);
                    }
                }
            }
            count == self.n
        })
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() == self.n - 1
    }

    /// Deterministic spanning tree: BFS from vertex 1, scanning the edge list
    /// in input order at each step.
    pub fn spanning_tree(&self) -> Result<Graph> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let mut in_tree = vec![false; self.n + 1];
        in_tree[1] = true;
        let mut queue = std::collections::VecDeque::from([1usize]);
        let mut tree_edges = Vec::with_capacity(self.n - 1);
        while let Some(v) = queue.pop_front() {
            for &(a, b) in &self.edges {
                let w = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !in_tree[w] {
                    in_tree[w] = true;
                    tree_edges.push((a, b));
                    queue.push_back(w);
                }
            }
        }
        Graph::from_edge_list(self.n, &tree_edges)
    }

    /// Length of the shortest cycle, or `None` for acyclic graphs.
    pub fn girth(&self) -> Option<usize> {
        (3..=self.n)
            .find(|&len| !self.simple_cycles_of_length(len).is_empty())
    }

    /// Number of simple cycles of length exactly `m` containing every vertex
    /// of `s`. Brute-force DFS; fine for the desk-scale graphs in scope.
    pub fn cycles_through(&self, s: &[usize], m: usize) -> usize {
        if m < 3 {
            return 0;
        }
        self.simple_cycles_of_length(m)
            .iter()
            .filter(|cyc| s.iter().all(|v| cyc.contains(v)))
            .count()
    }

    /// All simple cycles of the given length, each listed once: the smallest
    /// vertex comes first and its smaller neighbour second.
    fn simple_cycles_of_length(&self, len: usize) -> Vec<Vec<usize>> {
        let mut adj = vec![vec![]; self.n + 1];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut out = Vec::new();
        let mut path = Vec::with_capacity(len);
        let mut used = vec![false; self.n + 1];

        fn dfs(
            adj: &[Vec<usize>],
            start: usize,
            len: usize,
            path: &mut Vec<usize>,
            used: &mut [bool],
            out: &mut Vec<Vec<usize>>,
        ) {
            let v = *path.last().unwrap();
            if path.len() == len {
                if adj[v].contains(&start) && path[1] < path[len - 1] {
                    out.push(path.clone());
                }
                return;
            }
            for &w in &adj[v] {
                if !used[w] && w > start {
                    used[w] = true;
                    path.push(w);
                    dfs(adj, start, len, path, used, out);
                    path.pop();
                    used[w] = false;
                }
            }
        }

        for start in 1..=self.n {
            path.clear();
            path.push(start);
            used[start] = true;
            dfs(&adj, start, len, &mut path, &mut used, &mut out);
            used[start] = false;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_validation() {
        assert_eq!(Graph::complete(4).unwrap().edge_count(), 6);
        assert_eq!(Graph::complete(5).unwrap().edge_count(), 10);
        let p = Graph::from_edge_list(3, &[(1, 2), (2, 3)]).unwrap();
        assert_eq!(p, Graph::path(3).unwrap());
        assert!(Graph::from_edge_list(3, &[(1, 2), (2, 1)]).is_err());
        assert!(Graph::from_edge_list(3, &[(1, 4)]).is_err());
        assert!(Graph::from_edge_list(3, &[(2, 2)]).is_err());
    }

    #[test]
    fn presets() {
        assert_eq!(Graph::preset("K4").unwrap(), Graph::complete(4).unwrap());
        assert_eq!(Graph::preset("path_4").unwrap(), Graph::path(4).unwrap());
        assert_eq!(Graph::preset("cycle_5").unwrap(), Graph::cycle(5).unwrap());
        assert!(Graph::preset("Q3").is_err());
        assert!(Graph::preset("K9").is_err());
    }

    #[test]
    fn spanning_tree_properties() {
        for g in [
            Graph::complete(3).unwrap(),
            Graph::complete(4).unwrap(),
            Graph::cycle(5).unwrap(),
            Graph::path(4).unwrap(),
        ] {
            let t = g.spanning_tree().unwrap();
            assert_eq!(t.edge_count(), g.n() - 1);
            assert!(t.is_connected());
            assert!(t.girth().is_none());
            assert!(t.edges().iter().all(|e| g.edges().contains(e)));
        }
        // a tree is its own spanning tree
        let p = Graph::path(4).unwrap();
        assert_eq!(p.spanning_tree().unwrap(), p);
        // K3 spanning tree is a 2-edge path
        assert_eq!(
            Graph::complete(3).unwrap().spanning_tree().unwrap().edge_count(),
            2
        );
        let disconnected = Graph::from_edge_list(4, &[(1, 2), (3, 4)]).unwrap();
        assert!(disconnected.spanning_tree().is_err());
    }

    #[test]
    fn girth_and_cycle_counts() {
        for n in 3..=8 {
            assert_eq!(Graph::complete(n).unwrap().girth(), Some(3));
        }
        assert_eq!(Graph::cycle(5).unwrap().girth(), Some(5));
        assert_eq!(Graph::path(4).unwrap().girth(), None);
        assert_eq!(Graph::path(4).unwrap().cycles_through(&[1], 3), 0);
        // K_n: a 3-set spans exactly one triangle
        for n in 4..=6 {
            let g = Graph::complete(n).unwrap();
            assert_eq!(g.cycles_through(&[1, 2, 3], 3), 1);
            // triangles through one vertex: C(n-1, 2)
            assert_eq!(g.cycles_through(&[1], 3), (n - 1) * (n - 2) / 2);
        }
    }
}

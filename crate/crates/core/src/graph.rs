//! Simple undirected graphs, edge-list parsing, and the matrices built
//! from them.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SymMatrix};
use crate::scalar::Scalar;

/// Unordered vertex pair stored as `(min, max)`.
pub type Edge = (usize, usize);

pub fn ordered(u: usize, v: usize) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Simple undirected unweighted graph on vertices `0..n`.
///
/// Immutable after construction. Connected components are labelled in
/// order of their smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    component_id: Vec<usize>,
    components: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, silently collapsing duplicate edges. Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop { line: 0, vertex: u });
            }
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            set.insert(ordered(u, v));
        }
        Ok(Self::from_sorted(n, set.into_iter().collect()))
    }

    fn from_sorted(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        let (component_id, components) = label_components(&adj);
        Self { n, edges, adj, component_id, components }
    }

    pub fn path(n: usize) -> Self {
        Self::from_sorted(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<Edge> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((0, n - 1));
        edges.sort_unstable();
        Self::from_sorted(n, edges)
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_sorted(n, edges)
    }

    pub fn star(leaves: usize) -> Self {
        Self::from_sorted(leaves + 1, (1..=leaves).map(|v| (0, v)).collect())
    }

    /// Parses the line-oriented edge-list format: two non-negative integers
    /// per line, `#` comments, and an optional leading `n=<count>` header.
    /// A third integer column (edge type tag) is accepted and ignored.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut header_n: Option<usize> = None;
        let mut seen_data = false;
        let mut raw = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("n=") {
                if seen_data || header_n.is_some() {
                    return Err(parse_err(lineno, "vertex-count header must precede edges"));
                }
                header_n = Some(parse_index(rest.trim(), lineno)?);
                continue;
            }
            seen_data = true;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 && tokens.len() != 3 {
                return Err(parse_err(lineno, "expected two vertex indices"));
            }
            let u = parse_index(tokens[0], lineno)?;
            let v = parse_index(tokens[1], lineno)?;
            if let Some(tag) = tokens.get(2) {
                parse_index(tag, lineno)?;
            }
            if u == v {
                return Err(Error::SelfLoop { line: lineno, vertex: u });
            }
            raw.push((lineno, ordered(u, v)));
        }

        let max_index = raw.iter().map(|&(_, (_, v))| v + 1).max().unwrap_or(0);
        let n = match header_n {
            Some(n) => {
                if let Some(&(line, (_, v))) = raw.iter().find(|&&(_, (_, v))| v >= n) {
                    return Err(parse_err(line, &format!("vertex {v} exceeds header n={n}")));
                }
                n
            }
            None => max_index,
        };

        let mut set = BTreeSet::new();
        let mut duplicates = 0usize;
        for (_, e) in raw {
            if !set.insert(e) {
                duplicates += 1;
            }
        }
        if duplicates > 0 {
            log::warn!("collapsed {duplicates} duplicate edge(s)");
        }
        Ok(Self::from_sorted(n, set.into_iter().collect()))
    }

    /// Edge list text with an `n=` header, each edge once as `u v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// New graph with the extra edges inserted.
    pub fn with_edges(&self, extra: impl IntoIterator<Item = Edge>) -> Result<Self> {
        Self::new(self.n, self.edges.iter().copied().chain(extra))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component_id[v]
    }

    pub fn component_ids(&self) -> &[usize] {
        &self.component_id
    }

    /// Vertex lists of each component, ascending within a component.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }

    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.component_id[u] == self.component_id[v]
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Pairs `u < v` in the same component that are not edges, in
    /// lexicographic order.
    pub fn candidate_non_edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for comp in &self.components {
            for (a, &u) in comp.iter().enumerate() {
                for &v in &comp[a + 1..] {
                    if !self.has_edge(u, v) {
                        out.push((u, v));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Graph induced on one component, relabelled `0..n_c` in ascending
    /// vertex order. Returns the subgraph and the local-to-global map.
    pub fn component_subgraph(&self, c: usize) -> (Graph, Vec<usize>) {
        let verts = self.components[c].clone();
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, _)| self.component_id[u] == c)
            .map(|&(u, v)| ordered(local[u], local[v]))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        (Self::from_sorted(verts.len(), edges), verts)
    }

    /// Two-colourability of every component, indexed like [`Graph::components`].
    pub fn is_bipartite(&self) -> Vec<bool> {
        let mut colour = vec![u8::MAX; self.n];
        self.components
            .iter()
            .map(|comp| {
                let root = comp[0];
                colour[root] = 0;
                let mut queue = VecDeque::from([root]);
                let mut ok = true;
                while let Some(x) = queue.pop_front() {
                    for &y in &self.adj[x] {
                        if colour[y] == u8::MAX {
                            colour[y] = 1 - colour[x];
                            queue.push_back(y);
                        } else if colour[y] == colour[x] {
                            ok = false;
                        }
                    }
                }
                ok
            })
            .collect()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn adjacency<T: Scalar>(&self) -> SymMatrix<T> {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            a[(u, v)] = T::one();
            a[(v, u)] = T::one();
        }
        SymMatrix::from_dense_upper(&a)
    }

    /// `L = D - A`.
    pub fn laplacian<T: Scalar>(&self) -> SymMatrix<T> {
        let mut l = DenseMatrix::zeros(self.n, self.n);
        for v in 0..self.n {
            l[(v, v)] = T::from_usize_lossy(self.degree(v));
        }
        for &(u, v) in &self.edges {
            l[(u, v)] = -T::one();
            l[(v, u)] = -T::one();
        }
        SymMatrix::from_dense_upper(&l)
    }

    /// `D^{-1/2} A D^{-1/2}`. Isolated vertices get zero rows and columns.
    pub fn normalized_adjacency<T: Scalar>(&self) -> SymMatrix<T> {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            let w = T::one() / T::from_usize_lossy(self.degree(u) * self.degree(v)).sqrt();
            a[(u, v)] = w;
            a[(v, u)] = w;
        }
        SymMatrix::from_dense_upper(&a)
    }

    /// `I - D^{-1/2} A D^{-1/2}` on non-isolated vertices; isolated
    /// vertices get zero rows and columns (each is its own trivial
    /// component with eigenvalue 0).
    pub fn normalized_laplacian<T: Scalar>(&self) -> SymMatrix<T> {
        let a = self.normalized_adjacency::<T>();
        SymMatrix::from_upper(self.n, |i, j| {
            if i == j {
                if self.degree(i) > 0 {
                    T::one() - a.get(i, i)
                } else {
                    T::zero()
                }
            } else {
                -a.get(i, j)
            }
        })
    }

    pub(crate) fn inv_sqrt_degrees<T: Scalar>(&self) -> Vec<T> {
        (0..self.n)
            .map(|v| match self.degree(v) {
                0 => T::zero(),
                d => T::one() / T::from_usize_lossy(d).sqrt(),
            })
            .collect()
    }

    /// Vertex-by-edge incidence matrix; column `e = (u, v)` with `u < v`
    /// holds `+1` at `u` and `-1` at `v`.
    pub fn boundary_matrix<T: Scalar>(&self) -> DenseMatrix<T> {
        let mut b = DenseMatrix::zeros(self.n, self.edges.len());
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            b[(u, e)] = T::one();
            b[(v, e)] = -T::one();
        }
        b
    }
}

fn label_components(adj: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = adj.len();
    let mut id = vec![usize::MAX; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if id[s] != usize::MAX {
            continue;
        }
        let c = comps.len();
        id[s] = c;
        let mut members = vec![s];
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if id[y] == usize::MAX {
                    id[y] = c;
                    members.push(y);
                    stack.push(y);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    (id, comps)
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse { line, msg: msg.to_string() }
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    if tok.starts_with('-') {
        return Err(parse_err(line, &format!("negative index {tok:?}")));
    }
    tok.parse::<usize>().map_err(|_| parse_err(line, &format!("not a non-negative integer: {tok:?}")))
}

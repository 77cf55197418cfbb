//! Tree representation, parsing, BFS ordering, random generation via
//! Prüfer sequences, and exhaustive free-tree enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

/// Free-tree enumeration refuses sizes above this cap.
pub const DEFAULT_ENUMERATION_CAP: usize = 14;

/// Up to this size the enumeration walks every Prüfer sequence (m^(m-2)
/// labeled trees); beyond it, representatives grow by leaf augmentation.
const PRUFER_LIMIT: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("line {line}: malformed input: {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("missing vertex-count header line")]
    MissingVertexCount,
    #[error("vertex count must be a positive integer")]
    InvalidVertexCount,
    #[error("vertex {vertex} out of range 1..={m}")]
    VertexOutOfRange { vertex: usize, m: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(usize, usize),
    #[error("expected {expected} edges, found {found}")]
    WrongEdgeCount { expected: usize, found: usize },
    #[error("edge set contains a cycle")]
    CycleDetected,
    #[error("edge set is disconnected")]
    Disconnected,
    #[error("root {root} out of range 1..={m}")]
    RootOutOfRange { root: usize, m: usize },
    #[error("enumeration of trees on {m} vertices exceeds the cap of {cap}")]
    EnumerationCapExceeded { m: usize, cap: usize },
}

/// A tree on vertices `1..=m`; adjacency lists are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    m: usize,
    adj: Vec<Vec<usize>>,
}

impl Tree {
    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Tree, TreeError> {
        if m == 0 {
            return Err(TreeError::InvalidVertexCount);
        }
        let mut adj = vec![Vec::new(); m + 1];
        let mut seen = std::collections::HashSet::new();
        // union-find over 1..=m
        let mut parent: Vec<usize> = (0..=m).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v) in edges {
            if u < 1 || u > m {
                return Err(TreeError::VertexOutOfRange { vertex: u, m });
            }
            if v < 1 || v > m {
                return Err(TreeError::VertexOutOfRange { vertex: v, m });
            }
            if u == v {
                return Err(TreeError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(TreeError::DuplicateEdge(key.0, key.1));
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return Err(TreeError::CycleDetected);
            }
            parent[ru] = rv;
            adj[u].push(v);
            adj[v].push(u);
        }
        let root = find(&mut parent, 1);
        for v in 2..=m {
            if find(&mut parent, v) != root {
                return Err(TreeError::Disconnected);
            }
        }
        // connected and acyclic already imply the right count; kept as a net
        if edges.len() != m - 1 {
            return Err(TreeError::WrongEdgeCount {
                expected: m - 1,
                found: edges.len(),
            });
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        Ok(Tree { m, adj })
    }

    pub fn single_vertex() -> Tree {
        Tree::from_edges(1, &[]).expect("one vertex, zero edges")
    }

    pub fn vertex_count(&self) -> usize {
        self.m
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m.saturating_sub(1));
        for u in 1..=self.m {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn serialize(&self) -> String {
        let mut s = format!("{}\n", self.m);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

/// Parses the edge-list format: a vertex-count header line, then one edge
/// per line as "u v". Blank lines and lines starting with `#` are ignored.
pub fn parse_tree(text: &str) -> Result<Tree, TreeError> {
    let mut m: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if m.is_none() {
            let count: usize = line.parse().map_err(|_| TreeError::MalformedLine {
                line: line_no,
                content: raw.to_string(),
            })?;
            if count == 0 {
                return Err(TreeError::InvalidVertexCount);
            }
            m = Some(count);
            continue;
        }
        let mut parts = line.split_whitespace();
        let (u, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => {
                let u = a.parse::<usize>();
                let v = b.parse::<usize>();
                match (u, v) {
                    (Ok(u), Ok(v)) => (u, v),
                    _ => {
                        return Err(TreeError::MalformedLine {
                            line: line_no,
                            content: raw.to_string(),
                        })
                    }
                }
            }
            _ => {
                return Err(TreeError::MalformedLine {
                    line: line_no,
                    content: raw.to_string(),
                })
            }
        };
        edges.push((u, v));
    }
    let m = m.ok_or(TreeError::MissingVertexCount)?;
    Tree::from_edges(m, &edges)
}

/// BFS order from `root`, visiting neighbors in increasing label order.
/// Every non-root vertex has exactly one earlier neighbor (its parent).
pub fn bfs_order(t: &Tree, root: usize) -> Result<Vec<usize>, TreeError> {
    let m = t.vertex_count();
    if root < 1 || root > m {
        return Err(TreeError::RootOutOfRange { root, m });
    }
    let mut order = Vec::with_capacity(m);
    let mut visited = vec![false; m + 1];
    let mut queue = VecDeque::new();
    queue.push_back(root);
    visited[root] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in t.neighbors(v) {
            if !visited[w] {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    debug_assert_eq!(order.len(), m);
    // unique earlier neighbor, automatic in a tree
    for (pos, &v) in order.iter().enumerate().skip(1) {
        let earlier = t
            .neighbors(v)
            .iter()
            .filter(|w| order[..pos].contains(w))
            .count();
        debug_assert_eq!(earlier, 1, "vertex {v} has {earlier} earlier neighbors");
    }
    Ok(order)
}

/// Decodes a Prüfer sequence over `1..=m` (length `m - 2`) into the edge
/// list of the corresponding labeled tree.
pub fn prufer_decode(m: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    assert!(m >= 2);
    assert_eq!(seq.len(), m - 2);
    let mut degree = vec![1u32; m + 1];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(m - 1);
    let mut ptr = (1..=m).find(|&j| degree[j] == 1).expect("a leaf exists");
    let mut leaf = ptr;
    for &v in seq {
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 && v < ptr {
            leaf = v;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf, m));
    edges
}

/// Uniform random labeled tree on `m` vertices (Prüfer decode of a uniform
/// random sequence). Deterministic for a fixed seed.
pub fn random_tree(m: usize, seed: u64) -> Tree {
    assert!(m >= 1);
    if m == 1 {
        return Tree::single_vertex();
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let seq: Vec<usize> = (0..m - 2).map(|_| rng.gen_range(1..=m)).collect();
    let edges = prufer_decode(m, &seq);
    Tree::from_edges(m, &edges).expect("Prüfer decode yields a tree")
}

fn centers_of(adj: &[Vec<usize>], m: usize) -> Vec<usize> {
    if m == 1 {
        return vec![1];
    }
    let mut degree: Vec<usize> = (0..=m).map(|v| if v == 0 { 0 } else { adj[v].len() }).collect();
    let mut removed = vec![false; m + 1];
    let mut layer: Vec<usize> = (1..=m).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = m;
    while remaining > 2 {
        let mut next = Vec::new();
        for &v in &layer {
            removed[v] = true;
            remaining -= 1;
            for &w in &adj[v] {
                if !removed[w] {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    let mut centers: Vec<usize> = (1..=m).filter(|&v| !removed[v]).collect();
    centers.sort_unstable();
    centers
}

fn ahu_string(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut children: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| ahu_string(adj, w, v))
        .collect();
    children.sort_unstable();
    let mut s = String::with_capacity(2 + children.iter().map(String::len).sum::<usize>());
    s.push('(');
    for c in children {
        s.push_str(&c);
    }
    s.push(')');
    s
}

fn canonical_key_of_adj(adj: &[Vec<usize>], m: usize) -> String {
    centers_of(adj, m)
        .iter()
        .map(|&c| ahu_string(adj, c, 0))
        .min()
        .expect("at least one center")
}

/// AHU canonical key rooted at the tree center; equal keys iff isomorphic.
pub fn canonical_form(t: &Tree) -> String {
    canonical_key_of_adj(&t.adj, t.m)
}

pub fn enumerate_free_trees(m: usize) -> Result<Vec<Tree>, TreeError> {
    enumerate_free_trees_with_cap(m, DEFAULT_ENUMERATION_CAP)
}

/// One representative per isomorphism class of trees on `m` vertices, in
/// canonical-key order. Small sizes enumerate all m^(m-2) Prüfer sequences
/// and dedup by canonical form; larger sizes extend each representative on
/// m-1 vertices by one leaf (every tree arises this way, since deleting a
/// leaf yields a smaller tree). Results are cached per process.
pub fn enumerate_free_trees_with_cap(m: usize, cap: usize) -> Result<Vec<Tree>, TreeError> {
    if m == 0 {
        return Err(TreeError::InvalidVertexCount);
    }
    if m > cap {
        return Err(TreeError::EnumerationCapExceeded { m, cap });
    }
    Ok(enumerate_cached(m).as_ref().clone())
}

fn enumerate_cached(m: usize) -> Arc<Vec<Tree>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Tree>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&m) {
        return Arc::clone(hit);
    }
    let trees = if m <= PRUFER_LIMIT {
        enumerate_by_prufer(m)
    } else {
        augment_by_leaf(&enumerate_cached(m - 1), m)
    };
    let trees = Arc::new(trees);
    cache
        .lock()
        .unwrap()
        .entry(m)
        .or_insert_with(|| Arc::clone(&trees))
        .clone()
}

/// Attach a new leaf `m` to every vertex of every representative on m-1
/// vertices and dedup the results by canonical form.
fn augment_by_leaf(smaller: &[Tree], m: usize) -> Vec<Tree> {
    let mut classes: BTreeMap<String, Tree> = BTreeMap::new();
    for t in smaller {
        for attach in 1..m {
            let mut edges = t.edges();
            edges.push((attach, m));
            let grown = Tree::from_edges(m, &edges).expect("leaf augmentation keeps a tree");
            let key = canonical_form(&grown);
            classes.entry(key).or_insert(grown);
        }
    }
    classes.into_values().collect()
}

fn enumerate_by_prufer(m: usize) -> Vec<Tree> {
    if m == 1 {
        return vec![Tree::single_vertex()];
    }
    if m == 2 {
        return vec![Tree::from_edges(2, &[(1, 2)]).unwrap()];
    }
    let mut classes: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::new();
    let mut seq = vec![1usize; m - 2];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    loop {
        let edges = prufer_decode(m, &seq);
        for list in adj.iter_mut() {
            list.clear();
        }
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let key = canonical_key_of_adj(&adj, m);
        classes.entry(key).or_insert(edges);
        // odometer over [1..m]^(m-2)
        let mut pos = 0;
        loop {
            if pos == seq.len() {
                return classes
                    .into_values()
                    .map(|edges| Tree::from_edges(m, &edges).expect("decoded tree is valid"))
                    .collect();
            }
            if seq[pos] < m {
                seq[pos] += 1;
                break;
            }
            seq[pos] = 1;
            pos += 1;
        }
    }
}

//! Balanced two-subtree splits and the recursive assignment of
//! `{-1,1,2}`-vectors whose coordinate-wise sums characterize adjacency:
//! two vertices are adjacent exactly when their code sum avoids zero in
//! every coordinate.

use crate::tree::Tree;
use std::collections::HashMap;
use thiserror::Error;

/// Padding pattern appended blockwise when equalizing dimensions; sums of
/// two stacked blocks are (-2, 2, 4), never zero.
const PAD_BLOCK: [i8; 3] = [-1, 1, 2];
const SUFFIX_SIDE1: [i8; 3] = [-1, 1, 2];
const SUFFIX_SHARED: [i8; 3] = [2, 1, -1];
const SUFFIX_SIDE2: [i8; 3] = [1, 2, -1];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("splitting requires at least 3 vertices, got {0}")]
    TreeTooSmall(usize),
}

/// Two subtrees covering the tree with exactly one vertex in common, each
/// holding at least a third of the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitResult {
    pub shared: usize,
    /// Vertices of the first subtree, sorted, including `shared`.
    pub side1: Vec<usize>,
    /// Vertices of the second subtree, sorted, including `shared`.
    pub side2: Vec<usize>,
}

/// Vertex codes in `{-1,1,2}^d` with balanced coordinate counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    d: usize,
    codes: Vec<Vec<i8>>, // 1-indexed; codes[0] unused
}

impl Encoding {
    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn code(&self, v: usize) -> &[i8] {
        &self.codes[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.codes.len() - 1
    }
}

/// Connected component of `t - removed` containing `seed`, unsorted.
fn component_without(t: &Tree, removed: usize, seed: usize) -> Vec<usize> {
    let mut verts = vec![seed];
    let mut seen = vec![false; t.vertex_count() + 1];
    seen[seed] = true;
    seen[removed] = true;
    let mut stack = vec![seed];
    while let Some(v) = stack.pop() {
        for &w in t.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                verts.push(w);
                stack.push(w);
            }
        }
    }
    verts
}

/// All components of `t - removed`, one per neighbor of `removed`.
fn components_without(t: &Tree, removed: usize) -> Vec<Vec<usize>> {
    t.neighbors(removed)
        .iter()
        .map(|&w| component_without(t, removed, w))
        .collect()
}

/// Largest component of `t - removed` with the neighbor seeding it; ties
/// go to the component containing the smallest label.
fn largest_component_without(t: &Tree, removed: usize) -> (Vec<usize>, usize) {
    t.neighbors(removed)
        .iter()
        .map(|&w| (component_without(t, removed, w), w))
        .max_by(|(a, _), (b, _)| {
            a.len()
                .cmp(&b.len())
                .then_with(|| b.iter().min().cmp(&a.iter().min()))
        })
        .expect("tree vertices have neighbors for m >= 2")
}

/// Splits a tree on `m >= 3` vertices into two subtrees sharing exactly one
/// vertex, each of size at least `m / 3`.
///
/// Walks v_1 (the smallest leaf), v_2, ... where v_{k+1} is the neighbor of
/// v_k inside the largest component of the tree minus v_k, and stops at the
/// first index i >= 2 where those components stop shrinking. The split then
/// comes from removing the edge between v_{i-1} and v_i; when the side of
/// v_i is smaller than m/3, components hanging off v_{i-1} are greedily
/// unioned (largest first) until the first side reaches m/3.
pub fn split_tree(t: &Tree) -> Result<SplitResult, EncodeError> {
    let m = t.vertex_count();
    if m < 3 {
        return Err(EncodeError::TreeTooSmall(m));
    }
    let v1 = (1..=m)
        .find(|&v| t.degree(v) == 1)
        .expect("a tree on >= 2 vertices has a leaf");

    let mut prev: Option<usize> = None;
    let mut cur = v1;
    let mut cur_size = m; // |T_k| with cur = v_k
    loop {
        let (comp, seed) = largest_component_without(t, cur);
        if let Some(p) = prev {
            if cur_size <= comp.len() {
                return Ok(build_split(t, p, cur));
            }
        }
        prev = Some(cur);
        cur = seed;
        cur_size = comp.len();
    }
}

/// Builds the split at the stopping edge `prev - cur` of the walk.
fn build_split(t: &Tree, prev: usize, cur: usize) -> SplitResult {
    let m = t.vertex_count();
    // side of cur once the walked edge is removed
    let near = component_without(t, prev, cur);
    let result = if 3 * near.len() >= m {
        let mut in_near = vec![false; m + 1];
        for &v in &near {
            in_near[v] = true;
        }
        let side1: Vec<usize> = (1..=m).filter(|&v| !in_near[v]).collect();
        let mut side2 = near;
        side2.push(prev);
        side2.sort_unstable();
        SplitResult {
            shared: prev,
            side1,
            side2,
        }
    } else {
        // every component of t - prev is smaller than m/3, so the greedy
        // union lands in [m/3, 2m/3)
        let mut comps = components_without(t, prev);
        comps.sort_by(|a, b| {
            b.len()
                .cmp(&a.len())
                .then_with(|| a.iter().min().cmp(&b.iter().min()))
        });
        let mut acc: Vec<usize> = Vec::new();
        let mut rest: Vec<usize> = Vec::new();
        let mut filled = false;
        for comp in comps {
            if filled {
                rest.extend(comp);
            } else {
                acc.extend(comp);
                filled = 3 * acc.len() >= m;
            }
        }
        acc.push(prev);
        rest.push(prev);
        acc.sort_unstable();
        rest.sort_unstable();
        SplitResult {
            shared: prev,
            side1: acc,
            side2: rest,
        }
    };
    assert!(3 * result.side1.len() >= m, "side1 below m/3");
    assert!(3 * result.side2.len() >= m, "side2 below m/3");
    assert_eq!(result.side1.len() + result.side2.len(), m + 1);
    result
}

/// Induced subtree on `verts` relabeled to `1..=k` in sorted label order,
/// with the local-to-original map (1-indexed).
fn induced_subtree(t: &Tree, verts: &[usize]) -> (Tree, Vec<usize>) {
    let mut to_orig = vec![0usize];
    to_orig.extend_from_slice(verts);
    let to_local: HashMap<usize, usize> = verts
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i + 1))
        .collect();
    let mut edges = Vec::new();
    for &v in verts {
        for &w in t.neighbors(v) {
            if v < w {
                if let (Some(&lv), Some(&lw)) = (to_local.get(&v), to_local.get(&w)) {
                    edges.push((lv, lw));
                }
            }
        }
    }
    let sub = Tree::from_edges(verts.len(), &edges).expect("split sides are subtrees");
    (sub, to_orig)
}

fn pad_to(codes: &mut [Vec<i8>], d: usize) {
    for code in codes.iter_mut().skip(1) {
        while code.len() < d {
            code.extend_from_slice(&PAD_BLOCK);
        }
    }
}

/// Coordinate permutation carrying `from` onto `to`, matching equal values
/// position by position in order. `perm[i]` is the new index of coordinate
/// `i`.
fn matching_permutation(from: &[i8], to: &[i8]) -> Vec<usize> {
    let mut perm = vec![0usize; from.len()];
    for value in [-1i8, 1, 2] {
        let sources = from
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == value)
            .map(|(i, _)| i);
        let targets: Vec<usize> = to
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == value)
            .map(|(i, _)| i)
            .collect();
        for (k, i) in sources.enumerate() {
            perm[i] = targets[k];
        }
    }
    perm
}

fn apply_permutation(perm: &[usize], code: &[i8]) -> Vec<i8> {
    let mut out = vec![0i8; code.len()];
    for (i, &c) in code.iter().enumerate() {
        out[perm[i]] = c;
    }
    out
}

/// Assigns every vertex a code in `{-1,1,2}^d` realizing the adjacency
/// characterization, with `d <= 10 ln m / ln(3/2)` for `m >= 2`.
pub fn encode_tree(t: &Tree) -> Encoding {
    let codes = encode_rec(t);
    let d = codes[1].len();
    Encoding { d, codes }
}

fn encode_rec(t: &Tree) -> Vec<Vec<i8>> {
    let m = t.vertex_count();
    match m {
        1 => vec![Vec::new(), vec![-1, 1, 2]],
        2 => vec![Vec::new(), vec![-1, 1, 2], vec![2, 1, -1]],
        3 => {
            // a tree on 3 vertices is a path; ends ordered by label
            let center = (1..=3).find(|&v| t.degree(v) == 2).expect("path center");
            let ends: Vec<usize> = (1..=3).filter(|&v| v != center).collect();
            let mut codes = vec![Vec::new(); 4];
            codes[ends[0]] = vec![-1, 1, 2];
            codes[center] = vec![2, 1, -1];
            codes[ends[1]] = vec![1, 2, -1];
            codes
        }
        _ => {
            let split = split_tree(t).expect("m >= 4");
            combine(t, &split)
        }
    }
}

fn combine(t: &Tree, split: &SplitResult) -> Vec<Vec<i8>> {
    let (sub1, map1) = induced_subtree(t, &split.side1);
    let (sub2, map2) = induced_subtree(t, &split.side2);
    let mut codes1 = encode_rec(&sub1);
    let mut codes2 = encode_rec(&sub2);
    let d1 = codes1[1].len();
    let d2 = codes2[1].len();
    let d_max = d1.max(d2);
    pad_to(&mut codes1, d_max);
    pad_to(&mut codes2, d_max);

    let shared_local1 = map1
        .iter()
        .position(|&v| v == split.shared)
        .expect("shared vertex lies on side1");
    let shared_local2 = map2
        .iter()
        .position(|&v| v == split.shared)
        .expect("shared vertex lies on side2");

    // permute side1 so the shared vertex's two codes coincide
    let perm = matching_permutation(&codes1[shared_local1], &codes2[shared_local2]);
    for code in codes1.iter_mut().skip(1) {
        *code = apply_permutation(&perm, code);
    }
    debug_assert_eq!(codes1[shared_local1], codes2[shared_local2]);

    let m = t.vertex_count();
    let mut out = vec![Vec::new(); m + 1];
    for (local, &orig) in map1.iter().enumerate().skip(1) {
        if orig != split.shared {
            let mut code = codes1[local].clone();
            code.extend_from_slice(&SUFFIX_SIDE1);
            out[orig] = code;
        }
    }
    let mut shared_code = codes2[shared_local2].clone();
    shared_code.extend_from_slice(&SUFFIX_SHARED);
    out[split.shared] = shared_code;
    for (local, &orig) in map2.iter().enumerate().skip(1) {
        if orig != split.shared {
            let mut code = codes2[local].clone();
            code.extend_from_slice(&SUFFIX_SIDE2);
            out[orig] = code;
        }
    }
    debug_assert_eq!(out[1].len(), d_max + 3);
    out
}

/// True when `a + b` has no zero coordinate, i.e. the sum lies in
/// `{-2,1,2,3,4}^d`.
pub fn sum_avoids_zero(a: &[i8], b: &[i8]) -> bool {
    a.iter().zip(b).all(|(x, y)| x + y != 0)
}

/// Upper bound on the encoding dimension for a tree on `m >= 2` vertices.
pub fn dimension_bound(m: usize) -> f64 {
    10.0 * (m as f64).ln() / 1.5f64.ln()
}

/// Checks every encoding invariant against the tree; returns a description
/// of the first violation.
pub fn check_encoding(t: &Tree, enc: &Encoding) -> Result<(), String> {
    let m = t.vertex_count();
    if enc.vertex_count() != m {
        return Err(format!(
            "encoding covers {} vertices, tree has {m}",
            enc.vertex_count()
        ));
    }
    let d = enc.dimension();
    if d % 3 != 0 {
        return Err(format!("dimension {d} not divisible by 3"));
    }
    if m >= 2 && (d as f64) > dimension_bound(m) + 1e-9 {
        return Err(format!(
            "dimension {d} exceeds bound {} for m={m}",
            dimension_bound(m)
        ));
    }
    for v in 1..=m {
        let code = enc.code(v);
        if code.len() != d {
            return Err(format!("vertex {v} has code length {}", code.len()));
        }
        for value in [-1i8, 1, 2] {
            let count = code.iter().filter(|&&c| c == value).count();
            if count != d / 3 {
                return Err(format!(
                    "vertex {v}: value {value} appears {count} times, expected {}",
                    d / 3
                ));
            }
        }
        if code.iter().any(|c| ![-1, 1, 2].contains(c)) {
            return Err(format!("vertex {v} has a coordinate outside {{-1,1,2}}"));
        }
    }
    for y in 1..=m {
        for z in y + 1..=m {
            let adjacent = t.has_edge(y, z);
            let clean = sum_avoids_zero(enc.code(y), enc.code(z));
            if adjacent != clean {
                return Err(format!(
                    "pair ({y},{z}): adjacency {adjacent} but zero-free sum {clean}"
                ));
            }
        }
    }
    for y in 1..=m {
        for z in y + 1..=m {
            if enc.code(y) == enc.code(z) {
                return Err(format!("vertices {y} and {z} share a code"));
            }
        }
    }
    Ok(())
}

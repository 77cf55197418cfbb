//! The constructive pipeline: turn a vertex encoding into CRT residues
//! modulo a product of primes from 5, then walk the tree in BFS order
//! choosing labels whose pairwise sums are prime exactly on tree edges.

use crate::encode::{encode_tree, Encoding};
use crate::numtheory::{crt_solve, next_prime_in_ap, NumTheoryError, PrimalityConfig};
use crate::numtheory::{gcd, primes_from_5};
use crate::tree::{bfs_order, Tree, TreeError};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

/// Per-vertex residues modulo `q`, the product of the `d` consecutive
/// primes starting at 5, matching each code coordinate modulo the
/// corresponding prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueAssignment {
    pub d: usize,
    pub moduli: Vec<u64>,
    pub q: BigUint,
    residues: Vec<BigUint>, // 1-indexed
}

impl ResidueAssignment {
    pub fn residue(&self, v: usize) -> &BigUint {
        &self.residues[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.residues.len() - 1
    }
}

/// Maps a code coordinate in `{-1, 1, 2}` into `[0, q_i)`.
fn coordinate_residue(coord: i8, modulus: u64) -> BigUint {
    match coord {
        -1 => BigUint::from(modulus - 1),
        1 => BigUint::one(),
        2 => BigUint::from(2u32),
        other => unreachable!("coordinate {other} outside {{-1,1,2}}"),
    }
}

/// CRT residues for an encoding. Adjacent vertices get residues whose sum
/// is coprime to `q` (each coordinate sum is -2, 1, 2, 3, or 4 modulo a
/// prime of at least 5); non-adjacent pairs hit zero in some coordinate
/// and therefore share that prime with `q`.
pub fn assign_residues(enc: &Encoding) -> ResidueAssignment {
    let d = enc.dimension();
    let moduli = primes_from_5(d);
    let q: BigUint = moduli.iter().map(|&p| BigUint::from(p)).product();
    let m = enc.vertex_count();
    let mut residues = vec![BigUint::zero(); m + 1];
    for v in 1..=m {
        let congruences: Vec<(BigUint, BigUint)> = enc
            .code(v)
            .iter()
            .zip(&moduli)
            .map(|(&c, &p)| (coordinate_residue(c, p), BigUint::from(p)))
            .collect();
        residues[v] = crt_solve(&congruences).expect("moduli are distinct primes");
        debug_assert!(gcd(&residues[v], &q).is_one());
    }
    ResidueAssignment {
        d,
        moduli,
        q,
        residues,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    /// Labels pairwise sum to primes exactly on tree edges.
    Prime,
    /// Labels pairwise sum to numbers coprime to `q` exactly on tree edges.
    Coprime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedConfig {
    /// Root for the BFS labeling order.
    pub root: usize,
    /// The first label is its residue plus `q * start_multiplier`.
    pub start_multiplier: u64,
    pub primality: PrimalityConfig,
    /// Cap on primality candidates per search step, if any.
    pub candidate_budget: Option<u64>,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            root: 1,
            start_multiplier: 1,
            primality: PrimalityConfig::default(),
            candidate_budget: None,
        }
    }
}

/// One step of the label induction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedStep {
    pub vertex: usize,
    /// Earlier neighbor the step attached to; `None` for the start vertex
    /// and for direct residue reuse.
    pub parent: Option<usize>,
    /// The prime `P` with `label(vertex) = P - label(parent)`, when a
    /// prime search ran.
    pub prime: Option<BigUint>,
}

/// Explicit labels realizing a tree as an induced subgraph of a prime-sum
/// or coprime-sum graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub target: TargetKind,
    pub q: BigUint,
    pub moduli: Vec<u64>,
    labels: Vec<BigUint>, // 1-indexed
    pub max_label: BigUint,
    /// Smallest ambient size containing all labels: `max_label` for the
    /// prime target, `q - 1` for the coprime target.
    pub ambient_n: BigUint,
    pub trace: Vec<EmbedStep>,
}

impl Embedding {
    pub fn label(&self, v: usize) -> &BigUint {
        &self.labels[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len() - 1
    }

    /// Labels for vertices `1..=m`, in vertex order.
    pub fn labels(&self) -> &[BigUint] {
        &self.labels[1..]
    }
}

/// Embeds the tree into a prime-sum graph: the first BFS vertex gets its
/// residue shifted above `q`, and every later vertex `v` with earlier
/// neighbor `i` gets `P - label(i)` for the smallest admissible prime `P`
/// congruent to `residue(v) + residue(i)` modulo `q`.
pub fn embed_prime(t: &Tree, cfg: &EmbedConfig) -> Result<Embedding, EmbedError> {
    let enc = encode_tree(t);
    let assignment = assign_residues(&enc);
    let order = bfs_order(t, cfg.root)?;
    let m = t.vertex_count();
    let q = assignment.q.clone();

    let mut labels = vec![BigUint::zero(); m + 1];
    let mut trace = Vec::with_capacity(m);
    let root = order[0];
    labels[root] = assignment.residue(root) + &q * cfg.start_multiplier;
    trace.push(EmbedStep {
        vertex: root,
        parent: None,
        prime: None,
    });

    let mut placed = vec![false; m + 1];
    placed[root] = true;
    for &v in &order[1..] {
        let earlier: Vec<usize> = t
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| placed[w])
            .collect();
        debug_assert_eq!(earlier.len(), 1, "unique earlier neighbor in BFS order");
        let parent = earlier[0];
        let residue_sum = (assignment.residue(v) + assignment.residue(parent)) % &q;
        let x_min = &labels[parent] + &q;
        let prime = next_prime_in_ap(
            &residue_sum,
            &q,
            &x_min,
            &cfg.primality,
            cfg.candidate_budget,
        )?;
        let label = &prime - &labels[parent];
        // label = parent's label would force P = 2 * label(parent), even and > 2
        assert_ne!(label, labels[parent]);
        labels[v] = label;
        placed[v] = true;
        trace.push(EmbedStep {
            vertex: v,
            parent: Some(parent),
            prime: Some(prime),
        });
    }
    debug_assert!(
        {
            let mut sorted: Vec<&BigUint> = labels[1..].iter().collect();
            sorted.sort();
            sorted.windows(2).all(|w| w[0] != w[1])
        },
        "labels pairwise distinct"
    );
    let max_label = labels[1..].iter().max().expect("m >= 1").clone();
    Ok(Embedding {
        target: TargetKind::Prime,
        q,
        moduli: assignment.moduli,
        max_label: max_label.clone(),
        ambient_n: max_label,
        labels,
        trace,
    })
}

/// Embeds the tree into the coprime-sum graph on `q - 1` vertices by using
/// the CRT residues directly as labels.
pub fn embed_coprime(t: &Tree) -> Embedding {
    let enc = encode_tree(t);
    let assignment = assign_residues(&enc);
    let m = t.vertex_count();
    let mut labels = vec![BigUint::zero(); m + 1];
    let mut trace = Vec::with_capacity(m);
    for v in 1..=m {
        labels[v] = assignment.residue(v).clone();
        trace.push(EmbedStep {
            vertex: v,
            parent: None,
            prime: None,
        });
    }
    let max_label = labels[1..].iter().max().expect("m >= 1").clone();
    Embedding {
        target: TargetKind::Coprime,
        ambient_n: &assignment.q - BigUint::one(),
        q: assignment.q,
        moduli: assignment.moduli,
        labels,
        max_label,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::is_prime;
    use crate::tree::{parse_tree, random_tree};

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn edge_tree() -> Tree {
        parse_tree("2\n1 2").unwrap()
    }

    fn path3() -> Tree {
        parse_tree("3\n1 2\n2 3").unwrap()
    }

    #[test]
    fn residues_known_values() {
        let enc = encode_tree(&edge_tree());
        let a = assign_residues(&enc);
        assert_eq!(a.moduli, vec![5, 7, 11]);
        assert_eq!(a.q, big(385));
        assert_eq!(a.residue(1), &big(134));
        assert_eq!(a.residue(2), &big(197));
        assert!(gcd(&big(134 + 197), &big(385)).is_one());
    }

    #[test]
    fn residues_block_non_adjacent_pairs() {
        let enc = encode_tree(&path3());
        let a = assign_residues(&enc);
        // ends are non-adjacent; their first coordinates -1 and 1 cancel
        let sum = a.residue(1) + a.residue(3);
        assert!((sum % 5u32).is_zero());
        let shared = gcd(&(a.residue(1) + a.residue(3)), &a.q);
        assert!(!shared.is_one());
    }

    #[test]
    fn residue_invariants_random_trees() {
        for m in 1..=14 {
            for seed in 0..3 {
                let t = random_tree(m, seed);
                let enc = encode_tree(&t);
                let a = assign_residues(&enc);
                for v in 1..=m {
                    assert!(gcd(a.residue(v), &a.q).is_one());
                    // doubled residues stay coprime to q
                    assert!(gcd(&(a.residue(v) * 2u32), &a.q).is_one());
                    for w in v + 1..=m {
                        assert_ne!(a.residue(v), a.residue(w));
                        let coprime_sum = gcd(&(a.residue(v) + a.residue(w)), &a.q).is_one();
                        assert_eq!(t.has_edge(v, w), coprime_sum);
                    }
                }
            }
        }
    }

    #[test]
    fn embed_prime_edge_tree_fixture() {
        let emb = embed_prime(&edge_tree(), &EmbedConfig::default()).unwrap();
        assert_eq!(emb.label(1), &big(519));
        assert_eq!(emb.label(2), &big(1352));
        assert_eq!(emb.q, big(385));
        assert_eq!(emb.max_label, big(1352));
        assert_eq!(emb.trace[1].prime, Some(big(1871)));
        assert!((emb.label(2) % 385u32) == big(197));
    }

    #[test]
    fn embed_prime_single_vertex() {
        let emb = embed_prime(&Tree::single_vertex(), &EmbedConfig::default()).unwrap();
        assert_eq!(emb.label(1), &big(519));
    }

    #[test]
    fn embed_prime_invariants() {
        let cfg = EmbedConfig::default();
        let pcfg = PrimalityConfig::default();
        for m in 1..=10 {
            for seed in 0..3 {
                let t = random_tree(m, seed);
                let emb = embed_prime(&t, &cfg).unwrap();
                for v in 1..=m {
                    assert!(emb.label(v) > &emb.q, "label above q");
                    assert_eq!(emb.label(v) % &emb.q, {
                        let enc = encode_tree(&t);
                        assign_residues(&enc).residue(v) % &emb.q
                    });
                    for w in v + 1..=m {
                        assert_ne!(emb.label(v), emb.label(w));
                        let sum = emb.label(v) + emb.label(w);
                        assert_eq!(t.has_edge(v, w), is_prime(&sum, &pcfg));
                    }
                }
            }
        }
    }

    #[test]
    fn embed_coprime_known_values() {
        let emb = embed_coprime(&edge_tree());
        assert_eq!(emb.label(1), &big(134));
        assert_eq!(emb.label(2), &big(197));
        assert_eq!(emb.ambient_n, big(384));

        let emb = embed_coprime(&Tree::single_vertex());
        assert_eq!(emb.label(1), &big(134));

        let emb = embed_coprime(&path3());
        let shared = gcd(&(emb.label(1) + emb.label(3)), &emb.q);
        assert_eq!(shared % 5u32, BigUint::zero());
    }

    #[test]
    fn embed_determinism() {
        for seed in 0..5 {
            let t = random_tree(8, seed);
            let a = embed_prime(&t, &EmbedConfig::default()).unwrap();
            let b = embed_prime(&t, &EmbedConfig::default()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn embed_budget_propagates() {
        let cfg = EmbedConfig {
            candidate_budget: Some(0),
            ..EmbedConfig::default()
        };
        let err = embed_prime(&edge_tree(), &cfg).unwrap_err();
        assert!(matches!(
            err,
            EmbedError::NumTheory(NumTheoryError::SearchBudgetExceeded(0))
        ));
    }
}

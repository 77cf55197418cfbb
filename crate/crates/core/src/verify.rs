//! Exact induced-embedding verification, the brute-force induced-subgraph
//! oracle, the universal-tree threshold M(n), and expected induced-path
//! counts in random graphs.

use crate::graphs::{AmbientGraph, ExplicitGraph, GraphError};
use crate::numtheory::{gcd, PrimalityConfig};
use crate::tree::{bfs_order, enumerate_free_trees_with_cap, Tree, TreeError, DEFAULT_ENUMERATION_CAP};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

/// Largest ambient `n` the exhaustive backtracking oracle will search.
pub const DEFAULT_ORACLE_CAP: u64 = 500;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("oracle requires n <= {cap}, got {n}")]
    OracleCapExceeded { n: BigUint, cap: u64 },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A single discrepancy between the tree and the host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateLabel {
        vertices: (usize, usize),
        label: BigUint,
    },
    LabelOutOfRange {
        vertex: usize,
        label: BigUint,
    },
    AdjacencyMismatch {
        pair: (usize, usize),
        expected_edge: bool,
        observed_edge: bool,
        sum: BigUint,
        /// A nontrivial factor of the sum when one is known; `None` for a
        /// prime (or coprime) witness sum.
        factor: Option<BigUint>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    fn from_violations(violations: Vec<Violation>) -> VerificationReport {
        VerificationReport {
            ok: violations.is_empty(),
            violations,
        }
    }
}

/// Small nontrivial factor of `sum` if one is easy to exhibit: the gcd
/// with `q` for coprime-sum hosts, else trial division by small primes.
fn witness_factor(g: &AmbientGraph, sum: &BigUint) -> Option<BigUint> {
    if let AmbientGraph::CoprimeSum { q, .. } = g {
        let shared = gcd(sum, q);
        if !shared.is_one() && &shared != sum {
            return Some(shared);
        }
    }
    let mut p = BigUint::from(2u32);
    let limit = BigUint::from(100_000u32);
    while &p * &p <= *sum && p <= limit {
        if (sum % &p).is_zero() && &p != sum {
            return Some(p);
        }
        p += 1u32;
    }
    None
}

/// Checks that `labels` realize the tree as an induced subgraph of `g`:
/// pairwise distinct, in range, and edge-for-edge (and non-edge-for-
/// non-edge) matching the host adjacency.
pub fn verify_induced(
    t: &Tree,
    labels: &[BigUint],
    g: &AmbientGraph,
    cfg: &PrimalityConfig,
) -> VerificationReport {
    let m = t.vertex_count();
    assert_eq!(labels.len(), m, "one label per tree vertex");
    let n = g.n();
    let mut violations = Vec::new();
    let mut usable = vec![true; m + 1];
    for v in 1..=m {
        let label = &labels[v - 1];
        if label.is_zero() || *label > n {
            violations.push(Violation::LabelOutOfRange {
                vertex: v,
                label: label.clone(),
            });
            usable[v] = false;
        }
    }
    for x in 1..=m {
        for y in x + 1..=m {
            if labels[x - 1] == labels[y - 1] {
                violations.push(Violation::DuplicateLabel {
                    vertices: (x, y),
                    label: labels[x - 1].clone(),
                });
            }
        }
    }
    for x in 1..=m {
        for y in x + 1..=m {
            if !usable[x] || !usable[y] || labels[x - 1] == labels[y - 1] {
                continue;
            }
            let expected = t.has_edge(x, y);
            let observed = g
                .is_edge_with(&labels[x - 1], &labels[y - 1], cfg)
                .expect("labels checked in range");
            if expected != observed {
                let sum = &labels[x - 1] + &labels[y - 1];
                let factor = if observed {
                    None
                } else {
                    witness_factor(g, &sum)
                };
                violations.push(Violation::AdjacencyMismatch {
                    pair: (x, y),
                    expected_edge: expected,
                    observed_edge: observed,
                    sum,
                    factor,
                });
            }
        }
    }
    VerificationReport::from_violations(violations)
}

/// Dense adjacency of `g` over `1..=n` for the backtracking oracle.
fn adjacency_table(g: &AmbientGraph, n: u64) -> Result<Vec<Vec<bool>>, VerifyError> {
    let n = n as usize;
    let mut adj = vec![vec![false; n + 1]; n + 1];
    match g {
        AmbientGraph::PrimeSum { .. } => {
            let sieve = crate::graphs::sieve_to(2 * n);
            for i in 1..=n {
                for j in i + 1..=n {
                    adj[i][j] = sieve[i + j];
                    adj[j][i] = adj[i][j];
                }
            }
        }
        _ => {
            for i in 1..=n {
                for j in i + 1..=n {
                    let e = g.is_edge(&BigUint::from(i), &BigUint::from(j))?;
                    adj[i][j] = e;
                    adj[j][i] = e;
                }
            }
        }
    }
    Ok(adj)
}

/// Exhaustive backtracking search for an induced copy of `t` in `g`;
/// places tree vertices in BFS order from a max-degree root, trying
/// candidate labels ascending, so the result is deterministic: labels
/// indexed by tree vertex, or `None` when no copy exists.
pub fn find_induced(
    t: &Tree,
    g: &AmbientGraph,
    cap: u64,
) -> Result<Option<Vec<BigUint>>, VerifyError> {
    match search_induced(t, g, cap, u64::MAX)? {
        SearchOutcome::Found(labels) => Ok(Some(labels)),
        SearchOutcome::Exhausted => Ok(None),
        SearchOutcome::BudgetExhausted => unreachable!("unlimited budget"),
    }
}

enum SearchOutcome {
    Found(Vec<BigUint>),
    Exhausted,
    BudgetExhausted,
}

/// Backtracking search with a bound on candidate placements tried; lets
/// callers probe many trees cheaply before committing to a full exhaust.
fn search_induced(
    t: &Tree,
    g: &AmbientGraph,
    cap: u64,
    budget: u64,
) -> Result<SearchOutcome, VerifyError> {
    let n_big = g.n();
    let n = n_big
        .to_u64()
        .filter(|&n| n <= cap)
        .ok_or(VerifyError::OracleCapExceeded { n: n_big, cap })?;
    let m = t.vertex_count();
    if (m as u64) > n {
        return Ok(SearchOutcome::Exhausted);
    }
    let adj = adjacency_table(g, n)?;
    let n = n as usize;
    let words = n / 64 + 1;
    // bitset rows: bit c of row v set iff v ~ c
    let mut rows = vec![0u64; (n + 1) * words];
    for v in 1..=n {
        for c in 1..=n {
            if adj[v][c] {
                rows[v * words + c / 64] |= 1u64 << (c % 64);
            }
        }
    }
    let row = |v: usize| &rows[v * words..(v + 1) * words];
    let gdeg: Vec<u32> = (0..=n)
        .map(|v| row(v).iter().map(|w| w.count_ones()).sum())
        .collect();

    // root at a max-degree vertex: the most constrained placement first
    let root = (1..=m)
        .min_by_key(|&v| (std::cmp::Reverse(t.degree(v)), v))
        .expect("m >= 1");
    let order = bfs_order(t, root)?;
    // for each order position: the position of the unique earlier neighbor
    // and the candidate labels with enough graph degree for the tree vertex
    let mut parent_pos = vec![usize::MAX; m];
    let mut allowed = vec![0u64; m * words];
    for k in 0..m {
        let v = order[k];
        for earlier in 0..k {
            if t.has_edge(v, order[earlier]) {
                parent_pos[k] = earlier;
            }
        }
        let need = t.degree(v) as u32;
        for c in 1..=n {
            if gdeg[c] >= need {
                allowed[k * words + c / 64] |= 1u64 << (c % 64);
            }
        }
    }
    // children still to be placed below each order position
    let mut childcount = vec![0u32; m];
    for k in 1..m {
        childcount[parent_pos[k]] += 1;
    }

    struct Search<'a> {
        m: usize,
        words: usize,
        rows: &'a [u64],
        parent_pos: &'a [usize],
        childcount: &'a [u32],
        chosen: Vec<usize>,
        used: Vec<u64>,
        // candidate bitsets for every position, snapshotted per depth:
        // cands[(depth*m + pos)*words ..] is what position `pos` may still
        // take once the first `depth` positions are placed
        cands: Vec<u64>,
        budget: u64,
    }
    impl Search<'_> {
        // Ok(true): copy found; Ok(false): subtree exhausted; Err(()): out
        // of placement budget
        fn descend(&mut self, k: usize) -> Result<bool, ()> {
            if k == self.m {
                return Ok(true);
            }
            let (m, w) = (self.m, self.words);
            loop {
                // take own candidates in ascending order, consuming the set
                let base = (k * m + k) * w;
                let Some(i) = (0..w).find(|&i| self.cands[base + i] != 0) else {
                    return Ok(false);
                };
                let bit = self.cands[base + i].trailing_zeros() as usize;
                self.cands[base + i] &= self.cands[base + i] - 1;
                let c = i * 64 + bit;
                self.budget = self.budget.checked_sub(1).ok_or(())?;
                // capacity: c must keep enough free neighbors for the
                // children of this tree vertex still to be placed
                if self.childcount[k] > 0 {
                    let free: u32 = (0..w)
                        .map(|j| (self.rows[c * w + j] & !self.used[j]).count_ones())
                        .sum();
                    if free < self.childcount[k] {
                        continue;
                    }
                }
                // forward check: restrict every unplaced position to labels
                // consistent with placing c here; prune if any set empties
                let mut viable = true;
                for j in k + 1..m {
                    let src = (k * m + j) * w;
                    let dst = ((k + 1) * m + j) * w;
                    let edge = self.parent_pos[j] == k;
                    let mut any = 0u64;
                    for x in 0..w {
                        let r = self.rows[c * w + x];
                        let mut b = self.cands[src + x];
                        b &= if edge { r } else { !r };
                        if x == i {
                            b &= !(1u64 << bit);
                        }
                        self.cands[dst + x] = b;
                        any |= b;
                    }
                    if any == 0 {
                        viable = false;
                        break;
                    }
                }
                if !viable {
                    continue;
                }
                self.chosen[k] = c;
                self.used[i] |= 1u64 << bit;
                if self.descend(k + 1)? {
                    return Ok(true);
                }
                self.used[i] &= !(1u64 << bit);
            }
        }
    }
    let mut cands = vec![0u64; m * m * words];
    cands[..m * words].copy_from_slice(&allowed);
    let mut search = Search {
        m,
        words,
        rows: &rows,
        parent_pos: &parent_pos,
        childcount: &childcount,
        chosen: vec![0usize; m],
        used: vec![0u64; words],
        cands,
        budget,
    };
    match search.descend(0) {
        Ok(true) => {
            let chosen = search.chosen;
            let mut labels = vec![BigUint::zero(); m];
            for k in 0..m {
                labels[order[k] - 1] = BigUint::from(chosen[k]);
            }
            Ok(SearchOutcome::Found(labels))
        }
        Ok(false) => Ok(SearchOutcome::Exhausted),
        Err(()) => Ok(SearchOutcome::BudgetExhausted),
    }
}

/// Largest `M` such that every free tree on at most `M` vertices has an
/// induced copy in the prime-sum graph on `1..=n`.
pub fn max_universal_m(n: u64, oracle_cap: u64, enum_cap: usize) -> Result<usize, VerifyError> {
    let g = AmbientGraph::prime_sum(n);
    let mut m = 0usize;
    loop {
        let next = m + 1;
        if next as u64 > n {
            return Ok(m);
        }
        let trees = enumerate_free_trees_with_cap(next, enum_cap)?;
        // escalate the placement budget so a level with any non-embeddable
        // tree costs roughly its cheapest refutation, not the first one in
        // canonical order
        let mut pending: Vec<&Tree> = trees.iter().collect();
        for budget in [100_000u64, 10_000_000, u64::MAX] {
            let mut still_open = Vec::new();
            for t in pending {
                match search_induced(t, &g, oracle_cap, budget)? {
                    SearchOutcome::Found(_) => {}
                    SearchOutcome::Exhausted => return Ok(m),
                    SearchOutcome::BudgetExhausted => still_open.push(t),
                }
            }
            pending = still_open;
            if pending.is_empty() {
                break;
            }
        }
        m = next;
    }
}

/// Convenience wrapper with the default caps.
pub fn max_universal_m_default(n: u64) -> Result<usize, VerifyError> {
    max_universal_m(n, DEFAULT_ORACLE_CAP, DEFAULT_ENUMERATION_CAP)
}

/// Expected number of induced paths on `m` vertices in G(n, p): the exact
/// falling-factorial expectation and the looser `n^m`-based bound, as
/// `(exact, bound)`. `exact <= bound` always.
pub fn expected_induced_path_count(n: u64, p: f64, m: u64) -> (f64, f64) {
    assert!((0.0..=1.0).contains(&p));
    assert!(m >= 2 && m <= n);
    let mut falling = 1.0f64;
    for k in 0..m {
        falling *= (n - k) as f64;
    }
    let edge_term = p.powi((m - 1) as i32);
    let pairs = m * (m - 1) / 2;
    let exact = falling / 2.0 * edge_term * (1.0 - p).powi((pairs - (m - 1)) as i32);
    let bound = (n as f64).powi(m as i32) * edge_term
        * (1.0 - p).powi(((m - 1) * (m - 2) / 2) as i32);
    (exact, bound)
}

/// Erdős–Rényi sample: each pair independently an edge with probability
/// `p`; deterministic for a fixed seed.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> ExplicitGraph {
    assert!((0.0..=1.0).contains(&p));
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut g = ExplicitGraph::new(n);
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.gen::<f64>() < p {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Number of induced paths on `m >= 2` vertices in an explicit graph,
/// counting each path once (sequences up to reversal).
pub fn count_induced_paths(g: &ExplicitGraph, m: usize) -> u64 {
    assert!(m >= 2);
    let n = g.vertex_count();
    let mut count = 0u64;
    let mut seq: Vec<usize> = Vec::with_capacity(m);
    fn extend(g: &ExplicitGraph, seq: &mut Vec<usize>, m: usize, count: &mut u64) {
        if seq.len() == m {
            *count += 1;
            return;
        }
        let last = *seq.last().expect("non-empty");
        let prefix = seq.len() - 1;
        for v in g.neighbors(last) {
            if seq.contains(&v) {
                continue;
            }
            // earlier vertices (all but the immediate predecessor) must be
            // non-adjacent for the path to be induced
            if seq[..prefix].iter().any(|&w| g.has_edge(w, v)) {
                continue;
            }
            seq.push(v);
            extend(g, seq, m, count);
            seq.pop();
        }
    }
    for start in 1..=n {
        seq.push(start);
        extend(g, &mut seq, m, &mut count);
        seq.pop();
    }
    count / 2
}

//! Ambient graph descriptors and their adjacency predicates, exact and
//! sampled degree statistics, the parity bipartition check, and DOT export.

use crate::numtheory::{gcd, is_prime, is_prime_u64, PrimalityConfig};
use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeSet;
use thiserror::Error;

/// Largest `n` for which exact degree statistics are computed.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 200_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: BigUint, n: BigUint },
    #[error("n = {n} exceeds the exhaustive cap {cap}; use the sampling estimator")]
    ExhaustiveCapExceeded { n: BigUint, cap: u64 },
    #[error("modulus {0} too large for statistics (must fit in 64 bits)")]
    ModulusTooLarge(BigUint),
    #[error("graph must have at least 2 vertices for pair sampling")]
    TooFewVertices,
}

/// Simple undirected graph on `1..=n` with explicit sorted adjacency sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitGraph {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
}

impl ExplicitGraph {
    pub fn new(n: usize) -> ExplicitGraph {
        ExplicitGraph {
            n,
            adj: vec![BTreeSet::new(); n + 1],
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u >= 1 && v >= 1 && u <= self.n && v <= self.n);
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }
}

/// Host graph for embeddings: prime sums, coprime sums, or an explicit
/// edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmbientGraph {
    PrimeSum { n: BigUint },
    CoprimeSum { n: BigUint, q: BigUint },
    Explicit(ExplicitGraph),
}

impl AmbientGraph {
    pub fn prime_sum(n: u64) -> AmbientGraph {
        AmbientGraph::PrimeSum {
            n: BigUint::from(n),
        }
    }

    pub fn coprime_sum(n: u64, q: u64) -> AmbientGraph {
        AmbientGraph::CoprimeSum {
            n: BigUint::from(n),
            q: BigUint::from(q),
        }
    }

    pub fn n(&self) -> BigUint {
        match self {
            AmbientGraph::PrimeSum { n } => n.clone(),
            AmbientGraph::CoprimeSum { n, .. } => n.clone(),
            AmbientGraph::Explicit(g) => BigUint::from(g.n),
        }
    }

    pub fn is_edge(&self, i: &BigUint, j: &BigUint) -> Result<bool, GraphError> {
        self.is_edge_with(i, j, &PrimalityConfig::default())
    }

    /// Adjacency predicate; symmetric, irreflexive, rejects out-of-range
    /// vertices.
    pub fn is_edge_with(
        &self,
        i: &BigUint,
        j: &BigUint,
        cfg: &PrimalityConfig,
    ) -> Result<bool, GraphError> {
        let n = self.n();
        for v in [i, j] {
            if v.is_zero() || *v > n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v.clone(),
                    n,
                });
            }
        }
        if i == j {
            return Ok(false);
        }
        match self {
            AmbientGraph::PrimeSum { .. } => Ok(is_prime(&(i + j), cfg)),
            AmbientGraph::CoprimeSum { q, .. } => Ok(gcd(&(i + j), q).is_one()),
            AmbientGraph::Explicit(g) => {
                let iu = i.to_usize().expect("checked against n");
                let ju = j.to_usize().expect("checked against n");
                Ok(g.has_edge(iu, ju))
            }
        }
    }
}

/// Odd-indexed primality table: `sieve_to(limit)[k]` is true when `k` is
/// prime, for `k <= limit`.
pub fn sieve_to(limit: usize) -> Vec<bool> {
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    if limit >= 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if sieve[i] {
            let mut j = i * i;
            while j <= limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub n: u64,
    pub edge_count: u128,
    pub average_degree: f64,
}

/// Distinct prime factors by trial division.
pub fn distinct_prime_factors(mut q: u64) -> Vec<u64> {
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            factors.push(p);
            while q % p == 0 {
                q /= p;
            }
        }
        p += 1;
    }
    if q > 1 {
        factors.push(q);
    }
    factors
}

pub fn euler_phi_u64(q: u64) -> u64 {
    let mut phi = q;
    for p in distinct_prime_factors(q) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// Integers in `[1, x]` coprime to the given squarefree factor set, by
/// inclusion-exclusion.
fn coprime_count(x: u64, factors: &[u64]) -> u64 {
    let mut total: i128 = 0;
    for mask in 0..(1u32 << factors.len()) {
        let mut divisor: u64 = 1;
        let mut sign: i128 = 1;
        for (idx, &p) in factors.iter().enumerate() {
            if mask & (1 << idx) != 0 {
                divisor = divisor.saturating_mul(p);
                sign = -sign;
            }
        }
        if divisor <= x {
            total += sign * (x / divisor) as i128;
        }
    }
    total.max(0) as u64
}

/// Exact average degree `2E / n`, computed without iterating all pairs:
/// prime-sum edges are counted per prime, coprime-sum degrees per vertex
/// via inclusion-exclusion.
pub fn average_degree(g: &AmbientGraph, cap: u64) -> Result<DegreeStats, GraphError> {
    let n_big = g.n();
    let n = n_big.to_u64().filter(|&n| n <= cap).ok_or_else(|| {
        GraphError::ExhaustiveCapExceeded {
            n: n_big.clone(),
            cap,
        }
    })?;
    let edge_count: u128 = match g {
        AmbientGraph::PrimeSum { .. } => {
            let sieve = sieve_to(2 * n as usize);
            let mut edges: u128 = 0;
            for p in 3..=(2 * n).saturating_sub(1) {
                if !sieve[p as usize] {
                    continue;
                }
                // pairs i < j, i + j = p, both in [1, n]
                let hi = (p - 1) / 2;
                let lo = if p > n { p - n } else { 1 };
                if hi >= lo {
                    edges += (hi - lo + 1) as u128;
                }
            }
            edges
        }
        AmbientGraph::CoprimeSum { q, .. } => {
            let q = q
                .to_u64()
                .ok_or_else(|| GraphError::ModulusTooLarge(q.clone()))?;
            let factors = distinct_prime_factors(q);
            let mut degree_sum: u128 = 0;
            for i in 1..=n {
                // sums i + j for j in [1, n] span (i, i + n]
                let mut deg = coprime_count(i + n, &factors) - coprime_count(i, &factors);
                if gcd(&BigUint::from(2 * i), &BigUint::from(q)).is_one() {
                    deg -= 1; // exclude j = i
                }
                degree_sum += deg as u128;
            }
            degree_sum / 2
        }
        AmbientGraph::Explicit(g) => g.edge_count() as u128,
    };
    Ok(DegreeStats {
        n,
        edge_count,
        average_degree: 2.0 * edge_count as f64 / n as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeEstimate {
    pub samples: u64,
    pub average_degree: f64,
    pub std_error: f64,
}

/// Unbiased estimate of the average degree from uniformly sampled vertex
/// pairs; the reported standard error is binomial.
pub fn estimate_average_degree(
    g: &AmbientGraph,
    samples: u64,
    seed: u64,
    cfg: &PrimalityConfig,
) -> Result<DegreeEstimate, GraphError> {
    let n = g.n();
    if n < BigUint::from(2u32) {
        return Err(GraphError::TooFewVertices);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let one = BigUint::one();
    let upper = &n + &one;
    let mut hits = 0u64;
    for _ in 0..samples {
        let i = rng.gen_biguint_range(&one, &upper);
        let j = loop {
            let j = rng.gen_biguint_range(&one, &upper);
            if j != i {
                break j;
            }
        };
        if g.is_edge_with(&i, &j, cfg)? {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / samples as f64;
    let n_f = n.to_f64().unwrap_or(f64::MAX);
    Ok(DegreeEstimate {
        samples,
        average_degree: (n_f - 1.0) * p_hat,
        std_error: (n_f - 1.0) * (p_hat * (1.0 - p_hat) / samples as f64).sqrt(),
    })
}

/// True when no edge of the prime-sum graph on `1..=n` joins two vertices
/// of equal parity, checked by exhaustive pair scan.
pub fn check_bipartite_parity(n: u64) -> bool {
    let sieve = sieve_to((2 * n) as usize);
    // a same-parity pair i < j <= n has an even sum s in [4, 2n-2], and
    // every such s is realized (by s/2 - 1 and s/2 + 1), so scanning the
    // sums covers every pair
    if n < 2 {
        return true;
    }
    let mut s = 4;
    while s <= 2 * n - 2 {
        if sieve[s as usize] {
            return false;
        }
        s += 2;
    }
    true
}

/// DOT rendering of the subgraph induced on `verts`; `names[k]` labels
/// `verts[k]` when given.
pub fn dot_subgraph(
    g: &AmbientGraph,
    verts: &[BigUint],
    names: Option<&[String]>,
) -> Result<String, GraphError> {
    let mut out = String::from("graph {\n");
    for (k, v) in verts.iter().enumerate() {
        let label = match names {
            Some(names) => names[k].clone(),
            None => v.to_string(),
        };
        out.push_str(&format!("  n{k} [label=\"{label}\"];\n"));
    }
    for (k, v) in verts.iter().enumerate() {
        for (l, w) in verts.iter().enumerate().skip(k + 1) {
            if g.is_edge(v, w)? {
                out.push_str(&format!("  n{k} -- n{l};\n"));
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// Primality helper for u64 vertices, used by adjacency-matrix builders.
pub fn prime_sum_edge_u64(i: u64, j: u64) -> bool {
    i != j && is_prime_u64(i + j)
}

//! Property-based invariants across the pipeline: CRT round-trips,
//! canonical-form stability, encoding guarantees, and end-to-end embedding
//! verification on random trees.

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use primegraph::embed::{assign_residues, embed_coprime, embed_prime, EmbedConfig};
use primegraph::encode::{check_encoding, encode_tree};
use primegraph::graphs::AmbientGraph;
use primegraph::numtheory::{crt_solve, primes_from_5, PrimalityConfig};
use primegraph::tree::{bfs_order, canonical_form, prufer_decode, random_tree, Tree};
use primegraph::verify::verify_induced;

proptest! {
    #[test]
    fn crt_round_trip(d in 1usize..8, x_seed in any::<u64>()) {
        let moduli = primes_from_5(d);
        let q: u64 = moduli.iter().product();
        let x = x_seed % q;
        let congruences: Vec<(BigUint, BigUint)> = moduli
            .iter()
            .map(|&p| (BigUint::from(x % p), BigUint::from(p)))
            .collect();
        let solved = crt_solve(&congruences).unwrap();
        prop_assert_eq!(solved, BigUint::from(x));
    }

    #[test]
    fn canonical_form_ignores_labeling(m in 1usize..12, seed in any::<u64>(), perm_seed in any::<u64>()) {
        let t = random_tree(m, seed);
        let mut perm: Vec<usize> = (1..=m).collect();
        perm.shuffle(&mut ChaCha12Rng::seed_from_u64(perm_seed));
        let edges: Vec<(usize, usize)> = t
            .edges()
            .iter()
            .map(|&(u, v)| (perm[u - 1], perm[v - 1]))
            .collect();
        let relabeled = Tree::from_edges(m, &edges).unwrap();
        prop_assert_eq!(canonical_form(&t), canonical_form(&relabeled));
    }

    #[test]
    fn prufer_decode_always_yields_a_tree(m in 3usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let seq: Vec<usize> = (0..m - 2)
            .map(|_| 1 + (rand::Rng::gen::<u64>(&mut rng) as usize) % m)
            .collect();
        let edges = prufer_decode(m, &seq);
        prop_assert!(Tree::from_edges(m, &edges).is_ok());
    }

    #[test]
    fn bfs_order_parents_precede_children(m in 1usize..30, seed in any::<u64>(), root_pick in any::<usize>()) {
        let t = random_tree(m, seed);
        let root = 1 + root_pick % m;
        let order = bfs_order(&t, root).unwrap();
        prop_assert_eq!(order[0], root);
        let mut seen = vec![false; m + 1];
        for &v in &order {
            prop_assert!(!seen[v], "each vertex exactly once");
            // every non-root vertex arrives after exactly one tree neighbor
            if v != root {
                let earlier = t.neighbors(v).iter().filter(|&&w| seen[w]).count();
                prop_assert_eq!(earlier, 1);
            }
            seen[v] = true;
        }
        prop_assert!(seen[1..].iter().all(|&s| s));
    }

    #[test]
    fn encoding_invariants_on_random_trees(m in 1usize..64, seed in any::<u64>()) {
        let t = random_tree(m, seed);
        let enc = encode_tree(&t);
        prop_assert_eq!(check_encoding(&t, &enc), Ok(()));
    }

    #[test]
    fn residue_sums_match_code_sums(m in 2usize..24, seed in any::<u64>()) {
        // gcd(a_x + a_y, q) = 1 exactly when x ~ y in the tree
        let t = random_tree(m, seed);
        let enc = encode_tree(&t);
        let assignment = assign_residues(&enc);
        for x in 1..=m {
            for y in x + 1..=m {
                let sum = assignment.residue(x) + assignment.residue(y);
                let coprime = primegraph::numtheory::gcd(&sum, &assignment.q) == BigUint::from(1u32);
                prop_assert_eq!(coprime, t.has_edge(x, y), "pair ({}, {})", x, y);
            }
        }
    }
}

proptest! {
    // embedding involves unbounded prime searches, so fewer cases
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn prime_embeddings_verify(m in 1usize..12, seed in any::<u64>()) {
        let t = random_tree(m, seed);
        let emb = embed_prime(&t, &EmbedConfig::default()).unwrap();
        let host = AmbientGraph::PrimeSum { n: emb.ambient_n.clone() };
        let report = verify_induced(&t, emb.labels(), &host, &PrimalityConfig::default());
        prop_assert!(report.ok, "violations: {:?}", report.violations);
    }

    #[test]
    fn coprime_embeddings_verify(m in 1usize..12, seed in any::<u64>()) {
        let t = random_tree(m, seed);
        let emb = embed_coprime(&t);
        let host = AmbientGraph::CoprimeSum { n: emb.ambient_n.clone(), q: emb.q.clone() };
        let report = verify_induced(&t, emb.labels(), &host, &PrimalityConfig::default());
        prop_assert!(report.ok, "violations: {:?}", report.violations);
    }
}

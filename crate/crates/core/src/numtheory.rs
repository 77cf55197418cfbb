//! Arithmetic substrate: primality testing, prime generation, gcd, CRT,
//! and minimal-prime search in arithmetic progressions.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

/// Bases that make Miller-Rabin deterministic for all n < 3.3 * 10^24,
/// comfortably covering the default 2^64 threshold.
const DETERMINISTIC_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumTheoryError {
    #[error("empty congruence system")]
    EmptyCongruences,
    #[error("modulus {0} is less than 2")]
    ModulusTooSmall(BigUint),
    #[error("residue {residue} is not reduced modulo {modulus}")]
    ResidueNotReduced { residue: BigUint, modulus: BigUint },
    #[error("moduli are not pairwise coprime: {first} and {second} share factor {shared}")]
    NonCoprimeModuli {
        first: BigUint,
        second: BigUint,
        shared: BigUint,
    },
    #[error("residue {residue} shares factor {shared} with modulus {modulus}; the progression contains at most one prime")]
    NonCoprimeProgression {
        residue: BigUint,
        modulus: BigUint,
        shared: BigUint,
    },
    #[error("prime search budget of {0} candidates exceeded")]
    SearchBudgetExceeded(u64),
}

/// Controls how [`is_prime`] trades determinism for speed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimalityConfig {
    /// Inputs strictly below this bound are tested with the fixed
    /// deterministic witness set; results are exact and seed-independent.
    pub deterministic_threshold: BigUint,
    /// Number of random Miller-Rabin rounds above the threshold.
    pub probabilistic_rounds: u32,
    pub rng_seed: u64,
}

impl Default for PrimalityConfig {
    fn default() -> Self {
        PrimalityConfig {
            deterministic_threshold: BigUint::one() << 64,
            probabilistic_rounds: 64,
            rng_seed: 0,
        }
    }
}

/// Primality test: exact below `cfg.deterministic_threshold`, Miller-Rabin
/// with `cfg.probabilistic_rounds` random bases above it (false positives
/// with probability at most 4^-rounds, never false negatives).
pub fn is_prime(n: &BigUint, cfg: &PrimalityConfig) -> bool {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return false;
        }
        // u64 fast path; bit-identical to the BigUint route since both use
        // the same deterministic witness set below the threshold.
        if cfg.deterministic_threshold > BigUint::from(small) {
            return is_prime_u64(small);
        }
    }
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &p in SMALL_PRIMES.iter() {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    // n - 1 = 2^s * d with d odd
    let n_minus_1 = n - BigUint::one();
    let s = n_minus_1.trailing_zeros().expect("n > 2 is odd here");
    let d = &n_minus_1 >> s;

    let deterministic = *n < cfg.deterministic_threshold;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.rng_seed);
    let rounds = if deterministic {
        DETERMINISTIC_WITNESSES.len() as u32
    } else {
        cfg.probabilistic_rounds
    };
    for round in 0..rounds {
        let base = if deterministic {
            BigUint::from(DETERMINISTIC_WITNESSES[round as usize])
        } else {
            rng.gen_biguint_range(&two, &n_minus_1)
        };
        if !miller_rabin_round(n, &base, &d, s, &n_minus_1) {
            return false;
        }
    }
    true
}

fn miller_rabin_round(n: &BigUint, base: &BigUint, d: &BigUint, s: u64, n_minus_1: &BigUint) -> bool {
    let mut x = base.modpow(d, n);
    if x.is_one() || x == *n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u32), n);
        if x == *n_minus_1 {
            return true;
        }
    }
    false
}

/// Deterministic Miller-Rabin for u64 inputs using u128 arithmetic.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in SMALL_PRIMES.iter() {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in DETERMINISTIC_WITNESSES.iter() {
        let mut x = pow_mod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

/// The first `d` primes greater than or equal to 5, in increasing order.
pub fn primes_from_5(d: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(d);
    let mut candidate = 5u64;
    while out.len() < d {
        if is_prime_u64(candidate) {
            out.push(candidate);
        }
        candidate += 2;
    }
    out
}

/// Solves a system of congruences `x = r_i (mod m_i)` with pairwise coprime
/// moduli, returning the unique solution in `[0, prod m_i)`.
pub fn crt_solve(congruences: &[(BigUint, BigUint)]) -> Result<BigUint, NumTheoryError> {
    if congruences.is_empty() {
        return Err(NumTheoryError::EmptyCongruences);
    }
    let two = BigUint::from(2u32);
    for (residue, modulus) in congruences {
        if *modulus < two {
            return Err(NumTheoryError::ModulusTooSmall(modulus.clone()));
        }
        if residue >= modulus {
            return Err(NumTheoryError::ResidueNotReduced {
                residue: residue.clone(),
                modulus: modulus.clone(),
            });
        }
    }
    let (mut x, mut big_m) = congruences[0].clone();
    for (residue, modulus) in &congruences[1..] {
        let shared = big_m.gcd(modulus);
        if !shared.is_one() {
            return Err(NumTheoryError::NonCoprimeModuli {
                first: big_m.clone(),
                second: modulus.clone(),
                shared,
            });
        }
        // x + big_m * t = residue (mod modulus)
        let inv = mod_inverse(&(&big_m % modulus), modulus)
            .expect("coprimality checked above");
        let diff = BigInt::from(residue.clone()) - BigInt::from(x.clone());
        let t = diff * BigInt::from(inv);
        let t = t.mod_floor(&BigInt::from(modulus.clone()));
        let t = t.to_biguint().expect("mod_floor of positive modulus");
        x += &big_m * t;
        big_m *= modulus;
    }
    Ok(x)
}

/// Modular inverse of `a` modulo `m`, when `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let e = BigInt::from(a.clone()).extended_gcd(&BigInt::from(m.clone()));
    if !e.gcd.is_one() {
        return None;
    }
    let m_int = BigInt::from(m.clone());
    e.x.mod_floor(&m_int).to_biguint()
}

/// Smallest prime `P >= x_min` with `P = a (mod q)`.
///
/// Requires `gcd(a, q) = 1`; Dirichlet's theorem then guarantees the scan
/// terminates. When `budget` is given, at most that many primality
/// candidates are examined before the search aborts.
pub fn next_prime_in_ap(
    a: &BigUint,
    q: &BigUint,
    x_min: &BigUint,
    cfg: &PrimalityConfig,
    budget: Option<u64>,
) -> Result<BigUint, NumTheoryError> {
    let shared = a.gcd(q);
    if q > &BigUint::one() && !shared.is_one() {
        return Err(NumTheoryError::NonCoprimeProgression {
            residue: a.clone(),
            modulus: q.clone(),
            shared,
        });
    }
    let a_mod = a % q;
    let mut candidate = if &a_mod >= x_min {
        a_mod
    } else {
        // smallest a_mod + t*q >= x_min
        let gap = x_min - &a_mod;
        let t = gap.div_ceil(q);
        a_mod + t * q
    };
    let two = BigUint::from(2u32);
    let mut tested = 0u64;
    loop {
        // With q odd the parity of candidates alternates; even values other
        // than 2 are never prime, so they cost no primality call.
        let skip = candidate.is_even() && candidate != two;
        if !skip {
            if let Some(cap) = budget {
                if tested >= cap {
                    return Err(NumTheoryError::SearchBudgetExceeded(cap));
                }
            }
            tested += 1;
            if is_prime(&candidate, cfg) {
                return Ok(candidate);
            }
        }
        candidate += q;
    }
}

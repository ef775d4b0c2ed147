//! Probabilistic primality testing and random big-integer sampling.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{CryptoRng, RngCore};

/// Miller-Rabin rounds used for every primality decision.
pub const MR_ROUNDS: usize = 64;

pub(crate) const SMALL_PRIMES: &[u32] = &small_primes_table();

const fn small_primes_table() -> [u32; 550] {
    // First 550 odd primes (3 ..= 4001).
    let mut out = [0u32; 550];
    let mut count = 0;
    let mut n = 3u32;
    while count < 550 {
        let mut d = 3u32;
        let mut prime = true;
        while d * d <= n {
            if n.is_multiple_of(d) {
                prime = false;
                break;
            }
            d += 2;
        }
        if prime {
            out[count] = n;
            count += 1;
        }
        n += 2;
    }
    out
}

/// Uniform integer in `[0, bound)` by rejection sampling.
pub fn random_below<R: RngCore + CryptoRng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    let bits = bound.bits();
    let nbytes = bits.div_ceil(8) as usize;
    let excess = (nbytes as u64) * 8 - bits;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        if excess > 0 {
            buf[0] &= 0xFF >> excess;
        }
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Random integer with exactly `bits` bits and the top `top` bits forced to 1.
pub fn random_bits<R: RngCore + CryptoRng + ?Sized>(bits: u64, top: u32, rng: &mut R) -> BigUint {
    assert!(bits >= top as u64 && bits > 0);
    let mut v = random_below(&(BigUint::one() << bits), rng);
    for i in 0..top as u64 {
        v.set_bit(bits - 1 - i, true);
    }
    v
}

fn trial_division_clears(n: &BigUint) -> Option<bool> {
    for &p in SMALL_PRIMES {
        let p_big = BigUint::from(p);
        if *n == p_big {
            return Some(true);
        }
        if (n % p).is_zero() {
            return Some(false);
        }
    }
    None
}

/// Miller-Rabin with `rounds` random bases.
pub fn is_probable_prime<R: RngCore + CryptoRng + ?Sized>(
    n: &BigUint,
    rounds: usize,
    rng: &mut R,
) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    if n == &two {
        return true;
    }
    if n.is_even() {
        return false;
    }
    if let Some(answer) = trial_division_clears(n) {
        return answer;
    }
    let n_minus_one = n - 1u32;
    let shift = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> shift;
    // bases drawn from [2, n-2]
    let span = n - 3u32;
    'witness: for _ in 0..rounds {
        let a = random_below(&span, rng) + 2u32;
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..shift {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
            if x.is_one() {
                return false;
            }
        }
        return false;
    }
    true
}

/// Fermat test to base 2, used as a cheap filter before Miller-Rabin.
pub(crate) fn fermat_base2(n: &BigUint) -> bool {
    BigUint::from(2u32).modpow(&(n - 1u32), n).is_one()
}

/// Random prime of exactly `bits` bits with its two top bits set.
pub fn random_prime<R: RngCore + CryptoRng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 8);
    loop {
        let mut candidate = random_bits(bits, 2, rng);
        candidate.set_bit(0, true);
        if trial_division_clears(&candidate) == Some(false) {
            continue;
        }
        if !fermat_base2(&candidate) {
            continue;
        }
        if is_probable_prime(&candidate, MR_ROUNDS, rng) {
            return candidate;
        }
    }
}

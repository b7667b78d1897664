//! Multimodular reconstruction of integer vectors.
//!
//! Work is done modulo word-sized primes just below `2^62` and lifted back by
//! incremental Chinese remaindering. Callers give a rigorous bound on the bit
//! size of the result, so no stabilisation heuristic is involved.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::field::PrimeField;
use crate::arith::ntheory::{inv_mod, is_prime_u64};
use crate::budget::Budget;
use crate::error::{inconsistent, Result};
use crate::par;

const TOP: u64 = 1 << 62;
/// Every CRT prime exceeds `2^BITS_PER_PRIME`.
const BITS_PER_PRIME: f64 = 61.9;

fn prime_list() -> &'static Mutex<Vec<u64>> {
    static LIST: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    LIST.get_or_init(|| Mutex::new(Vec::new()))
}

/// The `i`-th prime below `2^62`, counting downwards.
pub fn crt_prime(i: usize) -> u64 {
    let mut list = prime_list().lock().expect("prime list lock");
    while list.len() <= i {
        let mut c = list.last().copied().unwrap_or(TOP + 1) - 2;
        while !is_prime_u64(c) {
            c -= 2;
        }
        list.push(c);
    }
    list[i]
}

/// Number of CRT primes whose product exceeds `2^(bits + 1)`, enough to
/// recover signed integers of absolute value below `2^bits`.
pub fn primes_needed(bits: f64) -> usize {
    ((bits + 2.0) / BITS_PER_PRIME).ceil().max(1.0) as usize
}

/// Incremental CRT over a vector of residues.
#[derive(Clone, Debug)]
pub struct Crt {
    modulus: BigInt,
    values: Vec<BigInt>,
}

impl Crt {
    pub fn new(len: usize) -> Self {
        Crt { modulus: BigInt::from(1u8), values: vec![BigInt::zero(); len] }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Add residues modulo a new prime `p` (coprime to all previous ones).
    pub fn push(&mut self, p: u64, residues: &[u64]) -> Result<()> {
        if residues.len() != self.values.len() {
            return inconsistent("residue vector length changed between primes");
        }
        let pb = BigInt::from(p);
        let mmod = (&self.modulus % &pb).to_u64().expect("residue");
        let minv = inv_mod(mmod, p).expect("CRT moduli coprime");
        for (v, &r) in self.values.iter_mut().zip(residues) {
            let vm = (&*v % &pb).to_u64().expect("residue");
            let diff = if r >= vm { r - vm } else { r + p - vm };
            let t = ((diff as u128 * minv as u128) % p as u128) as u64;
            if t != 0 {
                *v += &self.modulus * t;
            }
        }
        self.modulus *= pb;
        Ok(())
    }

    /// Values mapped into the symmetric range `(-M/2, M/2]`.
    pub fn symmetric(&self) -> Vec<BigInt> {
        let half = &self.modulus >> 1;
        self.values
            .iter()
            .map(|v| if v > &half { v - &self.modulus } else { v.clone() })
            .collect()
    }
}

/// Reconstruct an integer vector of length `len` whose entries are bounded
/// by `2^bits` in absolute value. `f` computes the plain residues modulo one
/// prime, or returns `None` when that prime must be skipped.
pub fn reconstruct<Fun>(bits: f64, len: usize, what: &str, budget: &Budget, f: Fun) -> Result<Vec<BigInt>>
where
    Fun: Fn(&PrimeField) -> Option<Vec<u64>> + Sync + Send,
{
    let need = primes_needed(bits);
    let mut crt = Crt::new(len);
    let mut used = 0;
    let mut next = 0;
    while used < need {
        let batch: Vec<u64> = (next..next + (need - used)).map(crt_prime).collect();
        next += batch.len();
        budget.charge(batch.len() as u64 * (len as u64 + 1), what)?;
        let results = par::map_slice(&batch, |&p| {
            let fp = PrimeField::new(p).expect("CRT prime");
            f(&fp)
        });
        for (p, r) in batch.iter().zip(results) {
            if let Some(r) = r {
                crt.push(*p, &r)?;
                used += 1;
            }
        }
        if next > need * 4 + 64 {
            return inconsistent(format!("too many unlucky primes in {what}"));
        }
    }
    let out = crt.symmetric();
    debug_assert!(out.iter().all(|v| (v.abs().bits() as f64) <= bits + 1.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::Field;
    use num_traits::Num;

    #[test]
    fn crt_primes_descend() {
        let a = crt_prime(0);
        let b = crt_prime(1);
        assert!(a < TOP && b < a && is_prime_u64(b));
    }

    #[test]
    fn reconstruct_big_values() {
        let vals = vec![
            BigInt::from_str_radix("-123456789012345678901234567890123456789", 10).unwrap(),
            BigInt::from(7),
            BigInt::zero(),
        ];
        let out = reconstruct(140.0, 3, "test", &Budget::unlimited(), |fp| {
            Some(vals.iter().map(|v| fp.to_u64(fp.from_bigint(v))).collect())
        })
        .unwrap();
        assert_eq!(out, vals);
    }
}

//! Prime-field arithmetic and exact wide integers.
//!
//! A [`FieldContext`] owns the modulus; [`FieldElement`]s are bare residues
//! and are only meaningful together with the context that produced them.
//! Moduli are restricted to primes `5 <= p < 2^32` so every product of two
//! residues fits in a `u64`.

use rand::Rng;

use crate::error::{Error, Result};

/// Mersenne prime `2^31 - 1`.
pub const DEFAULT_MODULUS: u64 = (1 << 31) - 1;

/// Environment variable overriding [`DEFAULT_MODULUS`] for the command line tool.
pub const MODULUS_ENV: &str = "TKRANK_MODULUS";

/// Exact signed integer used by the Walsh–Hadamard solver.
///
/// Counts there are bounded by `2^(12n)`, so 128 bits cover every block size
/// the solver accepts (`n <= 8`).
pub type WideInt = i128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arithmetic context for `Z_p`. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldContext {
    p: u64,
    inv_two: u64,
}

impl FieldContext {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 || p == 3 {
            return Err(Error::Parameter(format!(
                "modulus {p} has characteristic 2 or 3"
            )));
        }
        if p >= 1 << 32 {
            return Err(Error::Parameter(format!(
                "modulus {p} does not fit in 32 bits"
            )));
        }
        if !is_prime(p) {
            return Err(Error::Parameter(format!("modulus {p} is not prime")));
        }
        Ok(FieldContext {
            p,
            inv_two: p.div_ceil(2),
        })
    }

    /// Context for [`DEFAULT_MODULUS`].
    pub fn mersenne31() -> Self {
        FieldContext::new(DEFAULT_MODULUS).expect("2^31 - 1 is prime")
    }

    /// Context from `$TKRANK_MODULUS`, falling back to the default modulus.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MODULUS_ENV) {
            Ok(v) => {
                let p = v.trim().parse::<u64>().map_err(|_| {
                    Error::Parameter(format!("{MODULUS_ENV}={v:?} is not an integer"))
                })?;
                FieldContext::new(p)
            }
            Err(_) => Ok(FieldContext::mersenne31()),
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement(v % self.p)
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        let r = v.rem_euclid(self.p as i64);
        FieldElement(r as u64)
    }

    /// Accepts `v` only if it is already a canonical residue.
    pub fn checked(&self, v: u64) -> Result<FieldElement> {
        if v < self.p {
            Ok(FieldElement(v))
        } else {
            Err(Error::Parameter(format!(
                "value {v} is not a residue modulo {}",
                self.p
            )))
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 + b.0;
        FieldElement(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.p - b.0
        })
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 * b.0 % self.p)
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    #[inline]
    pub fn inv_two(&self) -> FieldElement {
        FieldElement(self.inv_two)
    }

    /// `-1` represented as `p - 1`.
    #[inline]
    pub fn minus_one(&self) -> FieldElement {
        FieldElement(self.p - 1)
    }

    /// `(-1)^bit`.
    #[inline]
    pub fn sign(&self, negative: bool) -> FieldElement {
        if negative {
            self.minus_one()
        } else {
            FieldElement::ONE
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.p))
    }

    pub fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        debug_assert_eq!(a.len(), b.len());
        // Residues are < 2^32, so products are < 2^64; reduce each one.
        a.iter().zip(b).fold(FieldElement::ZERO, |acc, (&x, &y)| {
            self.add(acc, self.mul(x, y))
        })
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest table the crate will index: `p^n` must not exceed this.
pub const MAX_GROUP_SIZE: usize = 1 << 24;

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiplicative inverse of a nonzero residue.
pub(crate) fn inv_mod(a: u8, p: u8) -> u8 {
    debug_assert!(a % p != 0);
    // Fermat: a^(p-2).
    let (p32, mut base, mut exp, mut acc) = (p as u32, a as u32 % p as u32, p as u32 - 2, 1u32);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p32;
        }
        base = base * base % p32;
        exp >>= 1;
    }
    acc as u8
}

#[inline]
pub(crate) fn add_mod(a: u8, b: u8, p: u8) -> u8 {
    ((a as u16 + b as u16) % p as u16) as u8
}

#[inline]
pub(crate) fn sub_mod(a: u8, b: u8, p: u8) -> u8 {
    ((a as u16 + p as u16 - b as u16) % p as u16) as u8
}

#[inline]
pub(crate) fn mul_mod(a: u8, b: u8, p: u8) -> u8 {
    ((a as u16 * b as u16) % p as u16) as u8
}

/// The group `G = F_p^n`: prime, dimension, and the base-`p` index
/// encoding shared by every table in the crate (coordinate 0 is the least
/// significant digit).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ambient {
    p: u8,
    n: usize,
}

impl Ambient {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        if p > 251 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("dimension n must be at least 1".into()));
        }
        let mut size: usize = 1;
        for _ in 0..n {
            size = size.saturating_mul(p as usize);
            if size > MAX_GROUP_SIZE {
                return Err(Error::Guard {
                    what: "group size p^n",
                    required: (p as u128).saturating_pow(n as u32),
                    limit: MAX_GROUP_SIZE as u128,
                });
            }
        }
        Ok(Self { p: p as u8, n })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `N = p^n`.
    pub fn size(&self) -> usize {
        (self.p as usize).pow(self.n as u32)
    }

    pub fn zero(&self) -> GVector {
        GVector {
            p: self.p,
            coords: vec![0; self.n],
        }
    }

    pub fn unit(&self, i: usize) -> GVector {
        let mut v = self.zero();
        v.coords[i] = 1;
        v
    }

    pub fn vector(&self, coords: &[u32]) -> Result<GVector> {
        if coords.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                self.n,
                coords.len()
            )));
        }
        Ok(GVector {
            p: self.p,
            coords: coords.iter().map(|&c| (c % self.p as u32) as u8).collect(),
        })
    }

    pub fn encode(&self, v: &GVector) -> usize {
        debug_assert_eq!(v.ambient(), *self);
        v.coords
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    pub fn decode(&self, mut index: usize) -> GVector {
        let p = self.p as usize;
        let mut coords = vec![0u8; self.n];
        for c in coords.iter_mut() {
            *c = (index % p) as u8;
            index /= p;
        }
        GVector { p: self.p, coords }
    }

    /// Digits of `index`, written into `out`.
    #[inline]
    pub(crate) fn digits_into(&self, mut index: usize, out: &mut [u8]) {
        let p = self.p as usize;
        for c in out.iter_mut() {
            *c = (index % p) as u8;
            index /= p;
        }
    }

    /// Every vector of `G` in encoded order.
    pub fn vectors(&self) -> impl Iterator<Item = GVector> + '_ {
        (0..self.size()).map(move |i| self.decode(i))
    }

    #[inline]
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        let p = self.p as usize;
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.n {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        let p = self.p as usize;
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.n {
            out += ((a % p + p - b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn neg_index(&self, a: usize) -> usize {
        self.sub_index(0, a)
    }

    /// `x · y` for encoded vectors.
    #[inline]
    pub fn dot_index(&self, a: usize, b: usize) -> u8 {
        let p = self.p as usize;
        let (mut a, mut b) = (a, b);
        let mut acc = 0usize;
        for _ in 0..self.n {
            acc += (a % p) * (b % p);
            a /= p;
            b /= p;
        }
        (acc % p) as u8
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.n)
    }
}

/// An element of `F_p^n`, coordinates stored as residues in `[0, p)`.
///
/// Vectors order by their base-`p` encoding, so sorting a list of vectors
/// gives the same order as sorting their table indices.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GVector {
    p: u8,
    coords: Vec<u8>,
}

impl GVector {
    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn ambient(&self) -> Ambient {
        Ambient {
            p: self.p,
            n: self.coords.len(),
        }
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub(crate) fn from_raw(p: u8, coords: Vec<u8>) -> Self {
        debug_assert!(coords.iter().all(|&c| c < p));
        Self { p, coords }
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [u8] {
        &mut self.coords
    }

    pub fn add(&self, other: &GVector) -> GVector {
        debug_assert_eq!(self.ambient(), other.ambient());
        let p = self.p;
        GVector {
            p,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| add_mod(a, b, p))
                .collect(),
        }
    }

    pub fn sub(&self, other: &GVector) -> GVector {
        debug_assert_eq!(self.ambient(), other.ambient());
        let p = self.p;
        GVector {
            p,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| sub_mod(a, b, p))
                .collect(),
        }
    }

    pub fn neg(&self) -> GVector {
        let p = self.p;
        GVector {
            p,
            coords: self.coords.iter().map(|&a| sub_mod(0, a, p)).collect(),
        }
    }

    pub fn scale(&self, s: u8) -> GVector {
        let p = self.p;
        GVector {
            p,
            coords: self.coords.iter().map(|&a| mul_mod(a, s % p, p)).collect(),
        }
    }

    /// `x · y = Σ x_i y_i`.
    pub fn dot(&self, other: &GVector) -> u8 {
        debug_assert_eq!(self.ambient(), other.ambient());
        dot_slices(&self.coords, &other.coords, self.p)
    }
}

#[inline]
pub(crate) fn dot_slices(a: &[u8], b: &[u8], p: u8) -> u8 {
    let acc: u32 = a.iter().zip(b).map(|(&x, &y)| x as u32 * y as u32).sum();
    (acc % p as u32) as u8
}

impl Ord for GVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.p
            .cmp(&other.p)
            .then(self.coords.len().cmp(&other.coords.len()))
            .then_with(|| self.coords.iter().rev().cmp(other.coords.iter().rev()))
    }
}

impl PartialOrd for GVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for GVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for GVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

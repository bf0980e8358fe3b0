//! Finite partial maps `G ⇀ G` and their additive quadruples.

use std::collections::HashMap;

use crate::error::{ensure_same, Error, Result};
use crate::linalg::{Ambient, GVector};

/// A map from a subset of `G` to `G`, stored as encoded `(x, φ(x))` pairs
/// sorted by `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMap {
    ambient: Ambient,
    pairs: Vec<(usize, usize)>,
}

impl FiniteMap {
    pub fn new(ambient: Ambient, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = ambient.size();
        if let Some(&(x, v)) = pairs.iter().find(|&&(x, v)| x >= n || v >= n) {
            return Err(Error::InvalidArgument(format!(
                "pair ({x}, {v}) is outside {ambient}"
            )));
        }
        pairs.sort_unstable();
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(format!(
                "point {} is mapped twice",
                ambient.decode(w[0].0)
            )));
        }
        Ok(Self { ambient, pairs })
    }

    pub fn from_vectors(ambient: Ambient, pairs: &[(GVector, GVector)]) -> Result<Self> {
        let mut encoded = Vec::with_capacity(pairs.len());
        for (x, v) in pairs {
            ensure_same(ambient, x.ambient())?;
            ensure_same(ambient, v.ambient())?;
            encoded.push((ambient.encode(x), ambient.encode(v)));
        }
        Self::new(ambient, encoded)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// `(x, φ(x))` in ascending `x`.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&x, |&(d, _)| d)
            .ok()
            .map(|i| self.pairs[i].1)
    }
}

/// Number of `(a, b, c, d) ∈ dom⁴` with `a + b = c + d` and
/// `φ(a) + φ(b) = φ(c) + φ(d)`.
///
/// Ordered pairs are bucketed on `(a + b, φ(a) + φ(b))`; the count is the
/// sum of squared bucket sizes.
pub fn additive_quadruples(phi: &FiniteMap) -> u64 {
    let g = phi.ambient;
    let mut buckets: HashMap<(usize, usize), u64> = HashMap::new();
    for &(a, fa) in &phi.pairs {
        for &(b, fb) in &phi.pairs {
            *buckets.entry((g.add_index(a, b), g.add_index(fa, fb))).or_default() += 1;
        }
    }
    buckets.values().map(|c| c * c).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_map_on_whole_group_has_n_cubed_quadruples() {
        let g = Ambient::new(2, 3).unwrap();
        let pairs = (0..8).map(|x| (x, g.add_index(x ^ (x >> 1), 5))).collect();
        let phi = FiniteMap::new(g, pairs).unwrap();
        assert_eq!(additive_quadruples(&phi), 512);
    }

    #[test]
    fn single_point_has_one_quadruple() {
        let g = Ambient::new(3, 2).unwrap();
        let phi = FiniteMap::new(g, vec![(4, 7)]).unwrap();
        assert_eq!(additive_quadruples(&phi), 1);
    }

    #[test]
    fn duplicate_domain_points_are_rejected() {
        let g = Ambient::new(2, 2).unwrap();
        assert!(FiniteMap::new(g, vec![(1, 0), (1, 2)]).is_err());
        assert!(FiniteMap::new(g, vec![(4, 0)]).is_err());
    }

    #[test]
    fn lookup() {
        let g = Ambient::new(2, 2).unwrap();
        let phi = FiniteMap::new(g, vec![(3, 1), (0, 2)]).unwrap();
        assert_eq!(phi.get(0), Some(2));
        assert_eq!(phi.get(3), Some(1));
        assert_eq!(phi.get(1), None);
    }
}

//! Seeded RANSAC search for an affine map agreeing with a finite map.
//!
//! Hypotheses are drawn in fixed-size chunks from one ChaCha stream and
//! scored in parallel; the reduction keeps the best agreement and breaks
//! ties by the encoded-map order of [`AffineEndo`], so the winner does not
//! depend on the thread count.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::quadruples::FiniteMap;
use crate::error::{Error, Result};
use crate::linalg::{add_mod, dot_slices, solve_affine_from_points, AffineEndo, GVector, Matrix};

/// Hypotheses scored per parallel batch.
const CHUNK: usize = 256;

/// Largest number of maps `p^{n²+n}` the exhaustive search will visit.
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineFit {
    pub map: AffineEndo,
    /// `|{x ∈ dom φ : α(x) = φ(x)}|`.
    pub agreement: usize,
    /// Hypotheses drawn (RANSAC) or maps visited (exhaustive).
    pub hypotheses: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RansacConfig {
    /// Number of sampled hypotheses.
    pub budget: usize,
    pub seed: u64,
    /// ChaCha stream, so that successive searches from one seed differ.
    pub stream: u64,
    /// Fits below this agreement are reported as failure.
    pub min_agreement: usize,
}

impl RansacConfig {
    pub fn new(phi: &FiniteMap, budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            stream: 0,
            min_agreement: default_min_agreement(phi),
        }
    }
}

/// `min(|dom φ|, n + 2)`: one point beyond a full affine frame.
pub fn default_min_agreement(phi: &FiniteMap) -> usize {
    phi.len().min(phi.ambient().n() + 2)
}

/// Digit tables for fast scoring.
struct Scorer {
    p: u8,
    n: usize,
    dom: Vec<u8>,
    val: Vec<u8>,
}

impl Scorer {
    fn new(phi: &FiniteMap) -> Self {
        let g = phi.ambient();
        let n = g.n();
        let mut dom = vec![0u8; phi.len() * n];
        let mut val = vec![0u8; phi.len() * n];
        for (j, &(x, v)) in phi.pairs().iter().enumerate() {
            g.digits_into(x, &mut dom[j * n..(j + 1) * n]);
            g.digits_into(v, &mut val[j * n..(j + 1) * n]);
        }
        Self { p: g.p(), n, dom, val }
    }

    fn agreement(&self, alpha: &AffineEndo) -> usize {
        let (n, p) = (self.n, self.p);
        let lin = alpha.linear().data();
        let t = alpha.translation().coords();
        self.dom
            .chunks_exact(n)
            .zip(self.val.chunks_exact(n))
            .filter(|(x, v)| {
                (0..n).all(|i| add_mod(dot_slices(&lin[i * n..(i + 1) * n], x, p), t[i], p) == v[i])
            })
            .count()
    }
}

fn better(a: &(usize, AffineEndo), b: &(usize, AffineEndo)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// RANSAC with the default agreement floor and stream 0.
pub fn ransac_affine(phi: &FiniteMap, budget: usize, seed: u64) -> Option<AffineFit> {
    ransac_affine_with(phi, &RansacConfig::new(phi, budget, seed))
}

/// Draws `budget` hypotheses, each the affine fit through `n + 1` distinct
/// domain points (fewer when the domain is smaller), and returns the best
/// one if it reaches `cfg.min_agreement`. Stops early once a hypothesis
/// agrees on the whole domain.
pub fn ransac_affine_with(phi: &FiniteMap, cfg: &RansacConfig) -> Option<AffineFit> {
    if cfg.budget == 0 || phi.is_empty() {
        return None;
    }
    let g = phi.ambient();
    let m = phi.len();
    let sample_size = (g.n() + 1).min(m);
    let scorer = Scorer::new(phi);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(cfg.stream);

    let mut best: Option<(usize, AffineEndo)> = None;
    let mut drawn = 0usize;
    while drawn < cfg.budget {
        let batch = CHUNK.min(cfg.budget - drawn);
        let samples: Vec<Vec<usize>> = (0..batch)
            .map(|_| index::sample(&mut rng, m, sample_size).into_vec())
            .collect();
        drawn += batch;
        let scored: Vec<Option<(usize, AffineEndo)>> = samples
            .par_iter()
            .map(|sample| {
                let pairs: Vec<(GVector, GVector)> = sample
                    .iter()
                    .map(|&j| {
                        let (x, v) = phi.pairs()[j];
                        (g.decode(x), g.decode(v))
                    })
                    .collect();
                let alpha = solve_affine_from_points(&pairs).ok()??;
                Some((scorer.agreement(&alpha), alpha))
            })
            .collect();
        for candidate in scored.into_iter().flatten() {
            if best.as_ref().map_or(true, |b| better(&candidate, b)) {
                best = Some(candidate);
            }
        }
        if best.as_ref().is_some_and(|b| b.0 == m) {
            break;
        }
    }
    best.filter(|b| b.0 >= cfg.min_agreement).map(|(agreement, map)| AffineFit {
        map,
        agreement,
        hypotheses: drawn as u64,
    })
}

/// Every affine map of `G`, best agreement first, ties to the smallest
/// map. Refused when `p^{n²+n}` exceeds [`EXHAUSTIVE_LIMIT`].
pub fn exhaustive_affine(phi: &FiniteMap, min_agreement: usize) -> Result<Option<AffineFit>> {
    let g = phi.ambient();
    let (p, n) = (g.p(), g.n());
    let width = (n * n + n) as u32;
    let total = (p as u128).checked_pow(width).unwrap_or(u128::MAX);
    if total > EXHAUSTIVE_LIMIT {
        return Err(Error::Guard {
            what: "exhaustive affine search p^(n²+n)",
            required: total,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if phi.is_empty() {
        return Ok(None);
    }
    let scorer = Scorer::new(phi);
    // Map number k, written big-endian in base p, is the byte string
    // linear ++ translation; increasing k is increasing map order.
    let build = |mut k: u128| {
        let mut bytes = vec![0u8; width as usize];
        for b in bytes.iter_mut().rev() {
            *b = (k % p as u128) as u8;
            k /= p as u128;
        }
        let translation = GVector::from_raw(p, bytes.split_off(n * n));
        AffineEndo::new(Matrix::from_raw(p, n, n, bytes), translation).expect("valid shape")
    };
    let (agreement, k) = (0..total as u64)
        .into_par_iter()
        .map(|k| (scorer.agreement(&build(k as u128)), k))
        .reduce(
            || (0, u64::MAX),
            |a, b| if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) { a } else { b },
        );
    Ok((agreement >= min_agreement).then(|| AffineFit {
        map: build(k as u128),
        agreement,
        hypotheses: total as u64,
    }))
}

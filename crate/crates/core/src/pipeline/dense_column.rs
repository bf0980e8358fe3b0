//! A subspace of rows meeting many columns of a dense column set inside a
//! Bohr variety.
//!
//! Given `S ⊆ G` of density `c` and affine maps `α_1..α_k`, the variety
//! `B = {(x, y) : x · α_i(y) = 0 ∀i}` has column slices `B_{·y}`. The
//! returned `V` satisfies `r(x) = |{y ∈ S : x ∈ B_{·y}}| ≥ cN/(2p^k)` for
//! every `x ∈ V`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bohr::ENUMERATION_LIMIT;
use crate::error::{ensure_same, Error, Result};
use crate::fourier::{large_spectrum, DenseFn};
use crate::linalg::{greedy_avoiding_subspace, AffineEndo, Ambient, GVector, Matrix, Subspace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseColumnConfig {
    /// Largest `k` accepted; `V2` intersects `p^k` preimages.
    pub k_cap: usize,
}

impl Default for DenseColumnConfig {
    fn default() -> Self {
        Self { k_cap: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseColumns {
    pub v: Subspace,
    /// `{α_i(0)}^⊥`.
    pub v0: Subspace,
    /// `R`, the frequencies avoided by `V1`.
    pub large: Vec<GVector>,
    pub threshold: f64,
    pub v1: Subspace,
    /// `∩_λ {x : (Σ λ_i α_iᴸ)ᵀ x ∈ V1}`.
    pub v2: Subspace,
    /// `c = |S|/N`.
    pub density: f64,
    /// `min_{x ∈ V} r(x)`.
    pub min_count: u64,
    /// `cN/(2p^k)`.
    pub required_count: f64,
    pub pointwise_ok: bool,
    /// `p^k (k + 4c^{-1}p^{2k})`.
    pub codim_bound: f64,
    pub codim_ok: bool,
}

/// Builds `V0`, `R`, `V1 = greedy_avoiding_subspace(V0, R)`, `V2`, and
/// returns `V = V2 ∩ V0`, then checks both guarantees over every `x ∈ V`.
///
/// `threshold` overrides the spectrum cut `c/(2p^k)` used for `R`.
pub fn dense_column_subspace(
    s: &[GVector],
    family: &[AffineEndo],
    threshold: Option<f64>,
    cfg: &DenseColumnConfig,
) -> Result<DenseColumns> {
    let Some(first) = s.first() else {
        return Err(Error::EmptyInput("dense column set"));
    };
    let g = first.ambient();
    for y in s {
        ensure_same(g, y.ambient())?;
    }
    for a in family {
        ensure_same(g, a.ambient())?;
    }
    let k = family.len();
    let p = g.p() as u128;
    if k > cfg.k_cap {
        return Err(Error::Guard {
            what: "dense-column preimage intersections p^k",
            required: p.saturating_pow(k as u32),
            limit: p.saturating_pow(cfg.k_cap as u32),
        });
    }
    let mut members: Vec<usize> = s.iter().map(|y| g.encode(y)).collect();
    members.sort_unstable();
    members.dedup();
    let work = g.size() as u128 * members.len() as u128 * k.max(1) as u128;
    if work > ENUMERATION_LIMIT * 16 {
        return Err(Error::Guard {
            what: "dense-column pointwise check N·|S|·k",
            required: work,
            limit: ENUMERATION_LIMIT * 16,
        });
    }

    let n_size = g.size() as f64;
    let c = members.len() as f64 / n_size;
    let pk = (g.p() as f64).powi(k as i32);

    let offsets: Vec<GVector> = family.iter().map(|a| a.translation().clone()).collect();
    let v0 = Subspace::span(g, &offsets)?.orthogonal_complement();

    let threshold = threshold.unwrap_or(c / (2.0 * pk));
    let indicator = DenseFn::new(g, {
        let mut v = vec![Complex64::new(0.0, 0.0); g.size()];
        for &y in &members {
            v[y] = Complex64::new(1.0, 0.0);
        }
        v
    })?;
    let large = large_spectrum(&indicator, threshold).frequencies();
    let v1 = greedy_avoiding_subspace(&v0, &large)?;

    let mut v2 = Subspace::full(g);
    for lambda in lambda_tuples(g.p(), k) {
        let mut sum = Matrix::zeros(g.p(), g.n(), g.n());
        for (a, &l) in family.iter().zip(&lambda) {
            if l != 0 {
                sum = sum.add(&a.linear().scale(l));
            }
        }
        v2 = v2.intersect(&v1.preimage(&sum.transpose()))?;
    }
    let v = v2.intersect(&v0)?;

    let min_count = min_row_count(g, &v, &members, family);
    let required_count = c * n_size / (2.0 * pk);
    // r(x) ≥ |S| / (2p^k), compared in integers.
    let pointwise_ok = min_count as u128 * 2 * p.pow(k as u32) >= members.len() as u128;
    let codim_bound = pk * (k as f64 + 4.0 / c * pk * pk);
    let codim_ok = (v.codim() as f64) <= codim_bound.min(g.n() as f64);
    Ok(DenseColumns {
        v,
        v0,
        large,
        threshold,
        v1,
        v2,
        density: c,
        min_count,
        required_count,
        pointwise_ok,
        codim_bound,
        codim_ok,
    })
}

/// `F_p^k` in lexicographic order.
fn lambda_tuples(p: u8, k: usize) -> impl Iterator<Item = Vec<u8>> {
    let total = (p as usize).pow(k as u32);
    (0..total).map(move |mut i| {
        let mut t = vec![0u8; k];
        for d in t.iter_mut().rev() {
            *d = (i % p as usize) as u8;
            i /= p as usize;
        }
        t
    })
}

/// `min_{x ∈ V} |{y ∈ S : x · α_i(y) = 0 ∀i}|`.
pub(crate) fn min_row_count(g: Ambient, v: &Subspace, members: &[usize], family: &[AffineEndo]) -> u64 {
    let images: Vec<Vec<usize>> = members
        .iter()
        .map(|&y| {
            let yv = g.decode(y);
            family.iter().map(|a| g.encode(&a.eval(&yv))).collect()
        })
        .collect();
    v.element_indices()
        .into_par_iter()
        .map(|x| {
            images
                .iter()
                .filter(|imgs| imgs.iter().all(|&w| g.dot_index(x, w) == 0))
                .count() as u64
        })
        .min()
        .unwrap_or(0)
}

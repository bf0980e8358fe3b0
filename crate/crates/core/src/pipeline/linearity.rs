//! Linearizing large column spectra by a short list of affine maps.
//!
//! For each column `y ∈ B` the coefficients `r` with `|f̂_{·y}(r)| ≥ ξ` are
//! listed. While more than `ξ|B|` columns keep listed coefficients, the
//! smallest remaining coefficient of each such column defines a finite map
//! `σ`; an affine map `α` agreeing with `σ` on many columns is found by
//! RANSAC and `α(y)` is struck from every list. Columns whose lists empty
//! out form `B′`, and for them every large coefficient is some `α_i(y)`.

use serde::{Deserialize, Serialize};

use super::quadruples::{additive_quadruples, FiniteMap};
use super::ransac::{default_min_agreement, ransac_affine_with, RansacConfig};
use crate::error::{ensure_same, Error, Result};
use crate::fourier::{dft, DenseFn, GridFn, SPECTRUM_TIE_SLACK};
use crate::linalg::{AffineEndo, Ambient, GVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearityConfig {
    /// RANSAC hypotheses per step.
    pub budget: usize,
    pub seed: u64,
    /// Most affine maps before giving up.
    pub k_cap: usize,
    /// Overrides the RANSAC agreement floor.
    pub min_agreement: Option<usize>,
}

impl Default for LinearityConfig {
    fn default() -> Self {
        Self {
            budget: 10_000,
            seed: 0,
            k_cap: 6,
            min_agreement: None,
        }
    }
}

/// One round of the procedure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearityStep {
    /// Columns with listed coefficients at the start of the round (`|dom σ|`).
    pub active: usize,
    /// Additive quadruples of `σ`, an absolute count out of `|dom σ|³`.
    pub quadruples: u64,
    pub map: AffineEndo,
    pub agreement: usize,
    pub hypotheses: u64,
    /// Listed coefficients struck this round.
    pub removed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub xi: f64,
    /// `|B|`.
    pub columns: usize,
    /// `B′` in encoded order.
    pub cleared: Vec<GVector>,
    pub family: Vec<AffineEndo>,
    pub steps: Vec<LinearityStep>,
    /// Largest number of coefficients listed for one column.
    pub max_listed: usize,
    /// Every coefficient listed for a column of `B′` is some `α_i(y)`.
    pub coverage_verified: bool,
    pub certified: bool,
    pub failure: Option<String>,
}

/// Linearizes the large column spectra of `f`, a function on `G × G`
/// bounded by 1, over the columns `b`.
pub fn fourier_linearity(f: &GridFn, b: &[GVector], xi: f64, cfg: &LinearityConfig) -> Result<Linearization> {
    let g = f.ambient();
    if f.sup_norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument("function must be bounded by 1".into()));
    }
    let mut ys = Vec::with_capacity(b.len());
    for y in b {
        ensure_same(g, y.ambient())?;
        ys.push(g.encode(y));
    }
    ys.sort_unstable();
    ys.dedup();
    let columns: Vec<(usize, DenseFn)> = ys.into_iter().map(|y| (y, dft(&f.column(y)))).collect();
    linearize_columns(g, &columns, xi, cfg)
}

/// The procedure on precomputed column transforms `(y, f̂_{·y})`, with `y`
/// ascending.
pub(crate) fn linearize_columns(
    g: Ambient,
    columns: &[(usize, DenseFn)],
    xi: f64,
    cfg: &LinearityConfig,
) -> Result<Linearization> {
    if !(xi > 0.0) {
        return Err(Error::InvalidArgument(format!("ξ must be positive, got {xi}")));
    }
    let listed: Vec<Vec<usize>> = columns
        .iter()
        .map(|(_, t)| {
            t.values()
                .iter()
                .enumerate()
                .filter_map(|(r, v)| (v.norm() >= xi - SPECTRUM_TIE_SLACK).then_some(r))
                .collect()
        })
        .collect();
    let max_listed = listed.iter().map(Vec::len).max().unwrap_or(0);
    let mut lists = listed.clone();
    let mut family: Vec<AffineEndo> = Vec::new();
    let mut steps = Vec::new();
    let mut failure = None;
    let ys: Vec<GVector> = columns.iter().map(|(y, _)| g.decode(*y)).collect();

    loop {
        let active: Vec<usize> = (0..columns.len()).filter(|&j| !lists[j].is_empty()).collect();
        if active.len() as f64 <= xi * columns.len() as f64 {
            break;
        }
        if family.len() >= cfg.k_cap {
            failure = Some(format!(
                "{} columns still carry large coefficients after {} maps (cap)",
                active.len(),
                cfg.k_cap
            ));
            break;
        }
        let sigma = FiniteMap::new(g, active.iter().map(|&j| (columns[j].0, lists[j][0])).collect())?;
        let quadruples = additive_quadruples(&sigma);
        let rc = RansacConfig {
            budget: cfg.budget,
            seed: cfg.seed,
            stream: family.len() as u64,
            min_agreement: cfg.min_agreement.unwrap_or_else(|| default_min_agreement(&sigma)),
        };
        let Some(fit) = ransac_affine_with(&sigma, &rc) else {
            failure = Some(format!(
                "no affine hypothesis reached agreement {} on {} columns",
                rc.min_agreement,
                active.len()
            ));
            break;
        };
        let mut removed = 0;
        for (j, y) in ys.iter().enumerate() {
            let image = g.encode(&fit.map.eval(y));
            if let Ok(pos) = lists[j].binary_search(&image) {
                lists[j].remove(pos);
                removed += 1;
            }
        }
        steps.push(LinearityStep {
            active: active.len(),
            quadruples,
            map: fit.map.clone(),
            agreement: fit.agreement,
            hypotheses: fit.hypotheses,
            removed,
        });
        family.push(fit.map);
    }

    let cleared_idx: Vec<usize> = (0..columns.len()).filter(|&j| lists[j].is_empty()).collect();
    let coverage_verified = cleared_idx.iter().all(|&j| {
        let images: Vec<usize> = family.iter().map(|a| g.encode(&a.eval(&ys[j]))).collect();
        listed[j].iter().all(|r| images.contains(r))
    });
    let listed_ok = max_listed as f64 <= xi.powi(-2) * (1.0 + 1e-12);
    if failure.is_none() && !coverage_verified {
        failure = Some("coverage check failed".into());
    }
    if failure.is_none() && !listed_ok {
        failure = Some(format!("{max_listed} coefficients listed for one column, above ξ^-2"));
    }
    Ok(Linearization {
        xi,
        columns: columns.len(),
        cleared: cleared_idx.iter().map(|&j| ys[j].clone()).collect(),
        family,
        steps,
        max_listed,
        coverage_verified,
        certified: failure.is_none(),
        failure,
    })
}

//! The construction and its building blocks.
//!
//! [`bilinear_bogolyubov`] runs every stage on a set `A ⊆ G × G` and
//! returns the structured set with its [`Certificate`]. The stages are
//! available on their own:
//!
//! * [`bogolyubov_line`]: the large spectrum of a line and its annihilator.
//! * [`additive_quadruples`], [`ransac_affine`], [`exhaustive_affine`]:
//!   affine structure of finite maps.
//! * [`fourier_linearity`]: large column spectra as values of affine maps.
//! * [`masked_coset_spectrum`]: coefficients of a function cut to a coset.
//! * [`dense_column_subspace`]: rows that meet many columns of a variety.

mod bogolyubov;
mod certificate;
mod coset_spectrum;
mod dense_column;
mod linearity;
mod quadruples;
mod ransac;

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bogolyubov::{bogolyubov_line, BogolyubovLine, DEGENERATE_MEAN};
pub use certificate::{Certificate, Check, Relation, ThresholdMode};
pub use coset_spectrum::{coset_indicator_coefficient, masked_coset_spectrum, masked_coset_spectrum_of_transform};
pub use dense_column::{dense_column_subspace, DenseColumnConfig, DenseColumns};
pub use linearity::{fourier_linearity, Linearization, LinearityConfig, LinearityStep};
pub use quadruples::{additive_quadruples, FiniteMap};
pub use ransac::{
    default_min_agreement, exhaustive_affine, ransac_affine, ransac_affine_with, AffineFit, RansacConfig,
    EXHAUSTIVE_LIMIT,
};

use crate::bohr::{containment_check, BohrVariety, StructuredSet};
use crate::error::{Error, Result};
use crate::fourier::{dft, large_spectrum, DenseFn, GridFn};
use crate::linalg::{Ambient, GVector, Subspace};
use crate::product_set::{difference_counts, directional_sumdiff_support, Axis, ProductSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Column-spectrum threshold; `c³/4` when unset.
    pub xi: Option<f64>,
    /// Cut for the large spectrum of `Y′`; `c_{Y′}/(2p^k)` when unset.
    pub dense_threshold: Option<f64>,
    /// Threshold for `T`; set by the mode when unset.
    pub spectrum_threshold: Option<f64>,
    /// Take the threshold for `T` from the measured `min C_x`.
    pub adaptive: bool,
    /// RANSAC hypotheses per linearization step.
    pub budget: usize,
    pub min_agreement: Option<usize>,
    /// Most affine maps allowed.
    pub k_cap: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            xi: None,
            dense_threshold: None,
            spectrum_threshold: None,
            adaptive: false,
            budget: 10_000,
            min_agreement: None,
            k_cap: 6,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidArgument("RANSAC budget must be positive".into()));
        }
        if self.k_cap == 0 {
            return Err(Error::InvalidArgument("k cap must be positive".into()));
        }
        for (name, t) in [
            ("xi", self.xi),
            ("dense threshold", self.dense_threshold),
            ("spectrum threshold", self.spectrum_threshold),
        ] {
            if let Some(t) = t {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::InvalidArgument(format!("{name} must be positive, got {t}")));
                }
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> ThresholdMode {
        if self.adaptive {
            ThresholdMode::Adaptive
        } else {
            ThresholdMode::WorstCase
        }
    }
}

/// A finished run: the structured set, its certificate, and wall-clock
/// time per stage (kept out of the certificate so reruns compare equal).
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub structured: StructuredSet,
    pub certificate: Certificate,
    /// The three convolution stages of `A`.
    pub a3: ProductSet,
    pub timings: Vec<(&'static str, Duration)>,
}

/// Runs the construction on `a` and returns `(structured set, certificate)`.
pub fn bilinear_bogolyubov(a: &ProductSet, cfg: &PipelineConfig) -> Result<(StructuredSet, Certificate)> {
    let run = run_pipeline(a, cfg)?;
    Ok((run.structured, run.certificate))
}

struct Checks(Vec<Check>);

impl Checks {
    fn at_most(&mut self, stage: &str, name: &str, achieved: f64, bound: f64) {
        self.push(stage, name, achieved, Relation::AtMost, bound, achieved <= bound);
    }

    fn at_least(&mut self, stage: &str, name: &str, achieved: f64, bound: f64) {
        self.push(stage, name, achieved, Relation::AtLeast, bound, achieved >= bound);
    }

    /// A comparison decided elsewhere, e.g. in exact integers.
    fn push(&mut self, stage: &str, name: &str, achieved: f64, relation: Relation, bound: f64, holds: bool) {
        self.0.push(Check {
            stage: stage.into(),
            name: name.into(),
            achieved,
            relation,
            bound,
            holds,
        });
    }

    fn flag(&mut self, stage: &str, name: &str, holds: bool) {
        self.push(stage, name, holds as u8 as f64, Relation::AtLeast, 1.0, holds);
    }
}

fn violations(a: &ProductSet, b: &ProductSet) -> u64 {
    a.iter_indices().filter(|&(x, y)| !b.contains_index(x, y)).count() as u64
}

/// As [`bilinear_bogolyubov`], also returning `A⁽³⁾` and stage timings.
pub fn run_pipeline(a: &ProductSet, cfg: &PipelineConfig) -> Result<PipelineRun> {
    cfg.validate()?;
    if a.is_empty() {
        return Err(Error::EmptyInput("the input set is empty"));
    }
    let g = a.ambient();
    let side = g.size();
    let n_f = side as f64;
    let p_f = g.p() as f64;
    let size = a.len() as u128;
    let c = a.density();
    let mode = cfg.mode();
    let worst_case = mode == ThresholdMode::WorstCase;
    let mut checks = Checks(Vec::new());
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, timings: &mut Vec<(&'static str, Duration)>| {
        timings.push((name, clock.elapsed()));
        clock = Instant::now();
    };

    // f(x, y) = (A_{x·} ∘ A_{x·})(y) = cnt_x(y) / N.
    let counts: Vec<Vec<u32>> = (0..side)
        .into_par_iter()
        .map(|x| difference_counts(g, &a.line_indices(Axis::Row, x)))
        .collect();
    let total: u128 = counts.iter().flatten().map(|&v| v as u128).sum();
    let mean_f = total as f64 / (n_f * n_f * n_f);
    checks.push(
        "first-convolution",
        "E f >= c^2",
        mean_f,
        Relation::AtLeast,
        c * c,
        total * side as u128 >= size * size,
    );
    let a1 = ProductSet::from_predicate(g, |x, y| counts[x][y] > 0)?;
    let a2 = directional_sumdiff_support(&a1, Axis::Col);
    let a3 = directional_sumdiff_support(&a2, Axis::Row);
    lap("convolutions", &mut timings);

    // Y = {y : E_x f(x, y) ≥ c²/2}, i.e. 2·mass(y)·N² ≥ |A|².
    let mass: Vec<u128> = (0..side)
        .map(|y| counts.iter().map(|row| row[y] as u128).sum())
        .collect();
    let empty_columns = mass.iter().filter(|&&m| m == 0).count();
    let n2 = (side as u128) * (side as u128);
    let ys: Vec<usize> = (0..side)
        .filter(|&y| mass[y] > 0 && 2 * mass[y] * n2 >= size * size)
        .collect();
    let grid = GridFn::new(
        g,
        counts
            .iter()
            .flatten()
            .map(|&v| Complex64::new(v as f64 / n_f, 0.0))
            .collect(),
    )?;
    let columns: Vec<(usize, DenseFn, DenseFn)> = ys
        .par_iter()
        .map(|&y| {
            let col = grid.column(y);
            let t = dft(&col);
            (y, col, t)
        })
        .collect();
    let lines: Vec<(usize, BogolyubovLine)> = columns
        .par_iter()
        .map(|(y, col, t)| (*y, bogolyubov::bogolyubov_with_transform(col, t)))
        .collect();
    let worst_ratio = lines
        .iter()
        .map(|(_, l)| l.spectrum.len() as f64 * l.mean * l.mean)
        .fold(0.0, f64::max);
    checks.at_most("columns", "max_y |S_y| f_y(0)^2", worst_ratio, 1.0 + 1e-12);
    let missing: u64 = lines
        .par_iter()
        .map(|(y, l)| {
            l.annihilator
                .element_indices()
                .into_iter()
                .filter(|&x| !a2.contains_index(x, *y))
                .count() as u64
        })
        .sum();
    checks.at_most("columns", "pairs of S_y^perp outside A2", missing as f64, 0.0);
    lap("columns", &mut timings);

    let xi = cfg.xi.unwrap_or(c * c * c / 4.0);
    let transforms: Vec<(usize, DenseFn)> = columns.into_iter().map(|(y, _, t)| (y, t)).collect();
    let lin_cfg = LinearityConfig {
        budget: cfg.budget,
        seed: cfg.seed,
        k_cap: cfg.k_cap,
        min_agreement: cfg.min_agreement,
    };
    let lin = linearity::linearize_columns(g, &transforms, xi, &lin_cfg)?;
    let k = lin.family.len();
    let pk = p_f.powi(k as i32);
    let y_prime: Vec<usize> = lin.cleared.iter().map(|y| g.encode(y)).collect();
    checks.flag("linearity", "linearization certified", lin.certified);
    checks.at_least(
        "linearity",
        "|Y'| >= (1 - xi)|Y|",
        y_prime.len() as f64,
        (1.0 - xi) * ys.len() as f64,
    );
    checks.at_most("linearity", "max listed per column <= xi^-2", lin.max_listed as f64, xi.powi(-2));
    if worst_case {
        checks.at_least("linearity", "|Y'| >= c^2 N / 4", y_prime.len() as f64, c * c * n_f / 4.0);
    }
    lap("linearity", &mut timings);

    let variety = BohrVariety::from_affine_family(g, &lin.family)?;
    let mut in_y_prime = vec![false; side];
    for &y in &y_prime {
        in_y_prime[y] = true;
    }
    let functionals: Vec<Vec<(GVector, u8)>> = (0..side)
        .into_par_iter()
        .map(|x| variety.row_functionals(&g.decode(x)))
        .collect();
    let mut digits_table = vec![0u8; side * g.n()];
    for (y, d) in digits_table.chunks_exact_mut(g.n()).enumerate() {
        g.digits_into(y, d);
    }
    let c_set = ProductSet::from_predicate(g, |x, y| {
        in_y_prime[y]
            && functionals[x].iter().all(|(u, rhs)| {
                crate::linalg::dot_slices(u.coords(), &digits_table[y * g.n()..(y + 1) * g.n()], g.p()) == *rhs
            })
    })?;
    checks.at_most("variety", "pairs of C outside A2", violations(&c_set, &a2) as f64, 0.0);
    let d_set = directional_sumdiff_support(&c_set, Axis::Row);
    checks.at_most("variety", "pairs of D outside A3", violations(&d_set, &a3) as f64, 0.0);
    lap("variety", &mut timings);

    let y_prime_vecs: Vec<GVector> = y_prime.iter().map(|&y| g.decode(y)).collect();
    let dense = if y_prime_vecs.is_empty() {
        checks.flag("dense-columns", "Y' nonempty", false);
        None
    } else {
        let d = dense_column_subspace(
            &y_prime_vecs,
            &lin.family,
            cfg.dense_threshold,
            &DenseColumnConfig { k_cap: cfg.k_cap },
        )?;
        checks.push(
            "dense-columns",
            "min_V r(x) >= c_Y' N / (2p^k)",
            d.min_count as f64,
            Relation::AtLeast,
            d.required_count,
            d.pointwise_ok,
        );
        checks.push(
            "dense-columns",
            "codim V <= min(n, p^k(k + 4 c_Y'^-1 p^2k))",
            d.v.codim() as f64,
            Relation::AtMost,
            d.codim_bound.min(g.n() as f64),
            d.codim_ok,
        );
        if worst_case {
            checks.at_most(
                "dense-columns",
                "codim V <= 20 c^-2 p^3k",
                d.v.codim() as f64,
                20.0 / (c * c) * pk * pk * pk,
            );
        }
        Some(d)
    };
    let v = dense.as_ref().map_or_else(|| Subspace::zero(g), |d| d.v.clone());
    let min_row_density = dense.as_ref().map_or(0.0, |d| d.min_count as f64 / n_f);
    lap("dense-columns", &mut timings);

    let t_threshold = cfg.spectrum_threshold.unwrap_or(match mode {
        ThresholdMode::WorstCase => c * c * c / (24.0 * pk.powf(1.5)),
        ThresholdMode::Adaptive => min_row_density.powf(1.5),
    });
    let chi = DenseFn::indicator(g, y_prime.iter().copied());
    let t = large_spectrum(&chi, t_threshold.max(f64::MIN_POSITIVE));
    let t_perp = Subspace::span(g, &t.frequencies())?.orthogonal_complement();
    let y_density = y_prime.len() as f64 / n_f;
    // A zero threshold gives no bound.
    let t_bound = if t_threshold > 0.0 {
        y_density / (t_threshold * t_threshold) * (1.0 + 1e-12)
    } else {
        f64::INFINITY
    };
    checks.at_most("spectrum", "|T| <= theta^-2 |Y'|/N", t.len() as f64, t_bound);
    if worst_case {
        checks.at_most("spectrum", "|T| <= 600 c^-6 p^3k", t.len() as f64, 600.0 / c.powi(6) * pk.powi(3));
    }
    lap("spectrum", &mut timings);

    let structured = StructuredSet::new(v, t_perp, variety.linear_part()?)?;
    let in_d = containment_check(&structured, &d_set)?;
    let in_a3 = containment_check(&structured, &a3)?;
    checks.push(
        "structured",
        "structured set inside D (witnesses found)",
        in_d.witnesses.len() as f64,
        Relation::AtMost,
        0.0,
        in_d.contained,
    );
    checks.push(
        "structured",
        "structured set inside A3 (witnesses found)",
        in_a3.witnesses.len() as f64,
        Relation::AtMost,
        0.0,
        in_a3.contained,
    );
    let recheck = independent_recheck(&structured, &a3);
    checks.at_most("structured", "member() pairs outside A3", recheck as f64, 0.0);
    lap("containment", &mut timings);

    let mut failed_stages: Vec<String> = Vec::new();
    for ch in checks.0.iter().filter(|c| !c.holds) {
        if !failed_stages.contains(&ch.stage) {
            failed_stages.push(ch.stage.clone());
        }
    }
    let pass = failed_stages.is_empty();
    let certificate = Certificate {
        ambient: g,
        seed: cfg.seed,
        mode,
        budget: cfg.budget,
        k_cap: cfg.k_cap,
        input_size: size as u64,
        density: c,
        mean_f,
        y_size: ys.len(),
        empty_columns,
        xi,
        linearity_certified: lin.certified,
        linearity_failure: lin.failure.clone(),
        linearity_steps: lin.steps.clone(),
        quadruple_normalization: "absolute count of ordered quadruples in dom(sigma)^4".into(),
        k,
        family: lin.family.clone(),
        y_prime_size: y_prime.len(),
        c_size: c_set.len() as u64,
        d_size: d_set.len() as u64,
        codim_v0: dense.as_ref().map_or(0, |d| d.v0.codim()),
        large_spectrum_size: dense.as_ref().map_or(0, |d| d.large.len()),
        codim_v1: dense.as_ref().map_or(0, |d| d.v1.codim()),
        codim_v2: dense.as_ref().map_or(0, |d| d.v2.codim()),
        codim_v: structured.u.codim(),
        min_row_density,
        t_threshold,
        t_size: t.len(),
        structured: structured.clone(),
        structured_size: in_a3.structured_count,
        witnesses: in_a3.witnesses,
        checks: checks.0,
        failed_stages,
        pass,
    };
    Ok(PipelineRun {
        structured,
        certificate,
        a3,
        timings,
    })
}

/// Counts members of the structured set outside `target`, testing every
/// pair of `U × V` with [`BohrVariety::member`] only.
pub fn independent_recheck(s: &StructuredSet, target: &ProductSet) -> u64 {
    let g: Ambient = s.ambient();
    let vs = s.v.elements();
    s.u.elements()
        .into_par_iter()
        .map(|x| {
            let xi = g.encode(&x);
            vs.iter()
                .filter(|y| s.variety.member(&x, y) && !target.contains_index(xi, g.encode(y)))
                .count() as u64
        })
        .sum()
}

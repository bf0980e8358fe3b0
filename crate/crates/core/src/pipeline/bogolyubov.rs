//! Bogolyubov's argument on a single line.

use serde::{Deserialize, Serialize};

use crate::fourier::{dft, large_spectrum_of_transform, DenseFn, Spectrum};
use crate::linalg::Subspace;
use crate::product_set::line_sumdiff;

/// Below this `|f̂(0)|` a line is treated as empty.
pub const DEGENERATE_MEAN: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BogolyubovLine {
    /// `{r : |f̂(r)| ≥ |f̂(0)|^{3/2}}`.
    pub spectrum: Spectrum,
    /// `span(S)^⊥`.
    pub annihilator: Subspace,
    /// `supp((f ∘ f) ∘ (f ∘ f))`, sorted table indices.
    pub supp4: Vec<usize>,
    /// `f̂(0) = 0`: `S = ∅`, `S^⊥ = G`, `supp4 = ∅` by convention.
    pub degenerate: bool,
    /// `|f̂(0)|`.
    pub mean: f64,
}

impl BogolyubovLine {
    /// `S^⊥ ⊆ supp4`.
    pub fn annihilator_contained(&self) -> bool {
        let g = self.annihilator.ambient();
        let mut member = vec![false; g.size()];
        for &i in &self.supp4 {
            member[i] = true;
        }
        self.annihilator.element_indices().into_iter().all(|i| member[i])
    }

    /// `|S| · |f̂(0)|² ≤ 1`.
    pub fn spectrum_bounded(&self) -> bool {
        self.degenerate || self.spectrum.len() as f64 <= self.mean.powi(-2) * (1.0 + 1e-12)
    }
}

/// Large spectrum, annihilator and `supp((f ∘ f) ∘ (f ∘ f))` for `f : G → [0, 1]`.
///
/// For nonnegative `f`, `f ∘ f` is positive exactly on `F − F` where
/// `F = supp f`, so the fourfold convolution is supported on
/// `F + F − F − F` and the support is computed with exact set arithmetic.
pub fn bogolyubov_line(f: &DenseFn) -> BogolyubovLine {
    bogolyubov_with_transform(f, &dft(f))
}

pub(crate) fn bogolyubov_with_transform(f: &DenseFn, transform: &DenseFn) -> BogolyubovLine {
    let g = f.ambient();
    let mean = transform.values()[0].norm();
    if mean <= DEGENERATE_MEAN {
        return BogolyubovLine {
            spectrum: Spectrum {
                threshold: 0.0,
                entries: Vec::new(),
            },
            annihilator: Subspace::full(g),
            supp4: Vec::new(),
            degenerate: true,
            mean,
        };
    }
    let spectrum = large_spectrum_of_transform(transform, mean.powf(1.5));
    let annihilator = Subspace::span(g, &spectrum.frequencies())
        .expect("frequencies live in the ambient group")
        .orthogonal_complement();
    let members: Vec<usize> = f
        .values()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| (v.re > 0.0).then_some(i))
        .collect();
    let supp4 = line_sumdiff(g, &members)
        .into_iter()
        .enumerate()
        .filter_map(|(i, m)| m.then_some(i))
        .collect();
    BogolyubovLine {
        spectrum,
        annihilator,
        supp4,
        degenerate: false,
        mean,
    }
}

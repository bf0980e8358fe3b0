//! Normalized Fourier analysis on `G = F_p^n`.
//!
//! Conventions used throughout the crate:
//!
//! * `f̂(r) = E_x f(x) ω^{-r·x}` with `ω = exp(2πi/p)`,
//! * inversion `f(x) = Σ_r f̂(r) ω^{r·x}`,
//! * convolution `(f ∘ g)(x) = E_y f(y + x) · conj(g(y))`, so that
//!   `(f ∘ g)^ = f̂ · conj(ĝ)`.
//!
//! The fast transform runs one radix-`p` pass per coordinate (coordinate 0
//! first), each pass a length-`p` DFT along every line of the table, with a
//! fixed accumulation order. Lines are independent, so passes may be split
//! across threads without changing a single bit of the output.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same, Error, Result};
use crate::linalg::{Ambient, GVector};

/// Tables at least this large run their butterfly passes on the rayon pool.
const PARALLEL_MIN_LEN: usize = 1 << 14;

/// Coefficients this close below a threshold count as ties (and are kept).
/// Keeping a borderline frequency only ever shrinks the annihilator, which
/// is the safe direction for every containment built on a spectrum.
pub const SPECTRUM_TIE_SLACK: f64 = 1e-12;

/// A complex-valued function on `G`, indexed by the base-`p` encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseFn {
    ambient: Ambient,
    values: Vec<Complex64>,
}

impl DenseFn {
    pub fn new(ambient: Ambient, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != ambient.size() {
            return Err(Error::InvalidArgument(format!(
                "table for {ambient} needs {} values, got {}",
                ambient.size(),
                values.len()
            )));
        }
        Ok(Self { ambient, values })
    }

    pub fn from_real(ambient: Ambient, values: &[f64]) -> Result<Self> {
        Self::new(ambient, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(ambient: Ambient) -> Self {
        Self {
            ambient,
            values: vec![Complex64::new(0.0, 0.0); ambient.size()],
        }
    }

    pub fn constant(ambient: Ambient, value: Complex64) -> Self {
        Self {
            ambient,
            values: vec![value; ambient.size()],
        }
    }

    /// `1_S` for a set given by table indices.
    pub fn indicator(ambient: Ambient, members: impl IntoIterator<Item = usize>) -> Self {
        let mut f = Self::zeros(ambient);
        for i in members {
            f.values[i] = Complex64::new(1.0, 0.0);
        }
        f
    }

    pub fn from_fn(ambient: Ambient, mut f: impl FnMut(&GVector) -> Complex64) -> Self {
        Self {
            ambient,
            values: ambient.vectors().map(|v| f(&v)).collect(),
        }
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, v: &GVector) -> Complex64 {
        self.values[self.ambient.encode(v)]
    }

    pub fn pointwise_mul(&self, other: &DenseFn) -> Result<DenseFn> {
        ensure_same(self.ambient, other.ambient)?;
        Ok(Self {
            ambient: self.ambient,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// `E_x |f(x)|²`.
    pub fn mean_square(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs_diff(&self, other: &DenseFn) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A complex-valued function on `G × G`, row-major like
/// [`ProductSet`](crate::product_set::ProductSet): entry `x·N + y` is
/// `f(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    ambient: Ambient,
    values: Vec<Complex64>,
}

impl GridFn {
    pub fn new(ambient: Ambient, values: Vec<Complex64>) -> Result<Self> {
        let n = ambient.size();
        if values.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "grid over {ambient} needs {} values, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(Self { ambient, values })
    }

    pub fn from_fn(ambient: Ambient, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let n = ambient.size();
        Self {
            ambient,
            values: (0..n * n).map(|i| f(i / n, i % n)).collect(),
        }
    }

    pub fn indicator(set: &crate::product_set::ProductSet) -> Self {
        Self::from_fn(set.ambient(), |x, y| {
            Complex64::new(if set.contains_index(x, y) { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        self.values[x * self.ambient.size() + y]
    }

    /// `f_{x·}`.
    pub fn row(&self, x: usize) -> DenseFn {
        let n = self.ambient.size();
        DenseFn {
            ambient: self.ambient,
            values: self.values[x * n..(x + 1) * n].to_vec(),
        }
    }

    /// `f_{·y}`.
    pub fn column(&self, y: usize) -> DenseFn {
        let n = self.ambient.size();
        DenseFn {
            ambient: self.ambient,
            values: (0..n).map(|x| self.values[x * n + y]).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(x, y) ↦ (f_{x·} ∘ f_{x·})(y)`.
    pub fn row_self_convolution(&self) -> GridFn {
        let n = self.ambient.size();
        let rows: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|x| {
                let r = self.row(x);
                convolve(&r, &r).expect("same ambient").values
            })
            .collect();
        GridFn {
            ambient: self.ambient,
            values: rows.into_iter().flatten().collect(),
        }
    }
}

/// `ω^{-m}` for `m ∈ [0, p)`.
fn forward_twiddles(p: u8) -> Vec<Complex64> {
    (0..p as usize)
        .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / p as f64))
        .collect()
}

/// One length-`p` DFT along the line `base + j·stride`, `j ∈ [0, p)`.
#[inline]
fn butterfly(line: &mut [Complex64], base: usize, stride: usize, tw: &[Complex64], scratch: &mut [Complex64]) {
    let p = tw.len();
    if p == 2 {
        let (a, b) = (line[base], line[base + stride]);
        line[base] = a + b;
        line[base + stride] = a - b;
        return;
    }
    for (k, out) in scratch.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..p {
            acc += line[base + j * stride] * tw[(j * k) % p];
        }
        *out = acc;
    }
    for (k, &v) in scratch.iter().enumerate() {
        line[base + k * stride] = v;
    }
}

/// Unnormalized transform `Σ_x v(x) tw^{r·x}` in place.
fn transform_in_place(ambient: Ambient, values: &mut [Complex64], tw: &[Complex64]) {
    let p = ambient.p() as usize;
    let mut stride = 1;
    for _ in 0..ambient.n() {
        let block = stride * p;
        let pass = |chunk: &mut [Complex64]| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); p];
            for off in 0..stride {
                butterfly(chunk, off, stride, tw, &mut scratch);
            }
        };
        if values.len() >= PARALLEL_MIN_LEN && values.len() / block > 1 {
            values.par_chunks_mut(block).for_each(pass);
        } else {
            values.chunks_mut(block).for_each(pass);
        }
        stride = block;
    }
}

/// `r ↦ E_x f(x) ω^{-r·x}`.
pub fn dft(f: &DenseFn) -> DenseFn {
    let mut values = f.values.clone();
    transform_in_place(f.ambient, &mut values, &forward_twiddles(f.ambient.p()));
    let scale = 1.0 / values.len() as f64;
    for v in &mut values {
        *v *= scale;
    }
    DenseFn {
        ambient: f.ambient,
        values,
    }
}

/// `x ↦ Σ_r F(r) ω^{r·x}`, the inverse of [`dft`].
pub fn idft(transform: &DenseFn) -> DenseFn {
    let mut values = transform.values.clone();
    let tw: Vec<Complex64> = forward_twiddles(transform.ambient.p())
        .into_iter()
        .map(|w| w.conj())
        .collect();
    transform_in_place(transform.ambient, &mut values, &tw);
    DenseFn {
        ambient: transform.ambient,
        values,
    }
}

/// `(f ∘ g)(x) = E_y f(y + x) · conj(g(y))`, through the transform.
pub fn convolve(f: &DenseFn, g: &DenseFn) -> Result<DenseFn> {
    ensure_same(f.ambient, g.ambient)?;
    let (fh, gh) = (dft(f), dft(g));
    let product = DenseFn {
        ambient: f.ambient,
        values: fh.values.iter().zip(&gh.values).map(|(a, b)| a * b.conj()).collect(),
    };
    Ok(idft(&product))
}

/// Frequencies whose coefficient reaches a threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub threshold: f64,
    /// `(r, f̂(r))` pairs in encoded order of `r`, each with `|f̂(r)| ≥ threshold`.
    pub entries: Vec<(GVector, Complex64)>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frequencies(&self) -> Vec<GVector> {
        self.entries.iter().map(|(r, _)| r.clone()).collect()
    }
}

/// `{r : |f̂(r)| ≥ θ}` with coefficients. Ties are included.
pub fn large_spectrum(f: &DenseFn, threshold: f64) -> Spectrum {
    large_spectrum_of_transform(&dft(f), threshold)
}

/// As [`large_spectrum`], for an already transformed table.
pub fn large_spectrum_of_transform(transform: &DenseFn, threshold: f64) -> Spectrum {
    let g = transform.ambient;
    let entries = transform
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() >= threshold - SPECTRUM_TIE_SLACK)
        .map(|(i, &v)| (g.decode(i), v))
        .collect();
    Spectrum { threshold, entries }
}

/// Indices `x` with `|f(x)| > tol`, ascending.
pub fn support_indices(f: &DenseFn, tol: f64) -> Vec<usize> {
    f.values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > tol)
        .map(|(i, _)| i)
        .collect()
}

/// `{x : |f(x)| > tol}` in encoded order.
///
/// For convolutions of indicator functions every value is an integer over
/// a known power of `N`; pass half of that unit as `tol` to decide the
/// support exactly.
pub fn support(f: &DenseFn, tol: f64) -> Vec<GVector> {
    support_indices(f, tol)
        .into_iter()
        .map(|i| f.ambient.decode(i))
        .collect()
}

/// Direct `O(N²)` evaluation of the transforms and of convolution, for
/// cross-checking and benchmarks. Shares no code with the fast path.
pub mod naive {
    use super::*;

    fn character_table(p: u8, sign: f64) -> Vec<Complex64> {
        (0..p as usize)
            .map(|m| Complex64::from_polar(1.0, sign * 2.0 * PI * m as f64 / p as f64))
            .collect()
    }

    pub fn dft(f: &DenseFn) -> DenseFn {
        let g = f.ambient;
        let chars = character_table(g.p(), -1.0);
        let n = g.size() as f64;
        let values = (0..g.size())
            .map(|r| {
                (0..g.size())
                    .map(|x| f.values[x] * chars[g.dot_index(r, x) as usize])
                    .sum::<Complex64>()
                    / n
            })
            .collect();
        DenseFn { ambient: g, values }
    }

    pub fn idft(t: &DenseFn) -> DenseFn {
        let g = t.ambient;
        let chars = character_table(g.p(), 1.0);
        let values = (0..g.size())
            .map(|x| {
                (0..g.size())
                    .map(|r| t.values[r] * chars[g.dot_index(r, x) as usize])
                    .sum::<Complex64>()
            })
            .collect();
        DenseFn { ambient: g, values }
    }

    /// The defining expectation `E_y f(y + x) conj(g(y))`.
    pub fn convolve(f: &DenseFn, h: &DenseFn) -> DenseFn {
        let g = f.ambient;
        let n = g.size() as f64;
        let values = (0..g.size())
            .map(|x| {
                (0..g.size())
                    .map(|y| f.values[g.add_index(y, x)] * h.values[y].conj())
                    .sum::<Complex64>()
                    / n
            })
            .collect();
        DenseFn { ambient: g, values }
    }
}

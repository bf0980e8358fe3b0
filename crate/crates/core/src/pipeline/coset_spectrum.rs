//! Fourier coefficients of functions restricted to a coset.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{ensure_same, Result};
use crate::fourier::{dft, DenseFn};
use crate::linalg::{GVector, Subspace};

fn omega_pow(p: u8, m: u8) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * m as f64 / p as f64)
}

/// `(χ · 1_{u0+W})^(r)`, computed as
/// `|W^⊥|^{-1} Σ_{s ∈ W^⊥} ω^{u0·s} χ̂(r + s)`.
pub fn masked_coset_spectrum(chi: &DenseFn, u0: &GVector, w: &Subspace, r: &GVector) -> Result<Complex64> {
    masked_coset_spectrum_of_transform(&dft(chi), u0, w, r)
}

/// As [`masked_coset_spectrum`], given `χ̂`.
pub fn masked_coset_spectrum_of_transform(
    chi_hat: &DenseFn,
    u0: &GVector,
    w: &Subspace,
    r: &GVector,
) -> Result<Complex64> {
    let g = chi_hat.ambient();
    ensure_same(g, u0.ambient())?;
    ensure_same(g, w.ambient())?;
    ensure_same(g, r.ambient())?;
    let perp = w.orthogonal_complement();
    let ri = g.encode(r);
    let u0i = g.encode(u0);
    let elems = perp.element_indices();
    let sum: Complex64 = elems
        .iter()
        .map(|&s| omega_pow(g.p(), g.dot_index(u0i, s)) * chi_hat.values()[g.add_index(ri, s)])
        .sum();
    Ok(sum / elems.len() as f64)
}

/// `1_{u0+W}^(r) = ω^{-r·u0} 1_{W^⊥}(r) / |W^⊥|`.
pub fn coset_indicator_coefficient(u0: &GVector, w: &Subspace, r: &GVector) -> Result<Complex64> {
    let g = w.ambient();
    ensure_same(g, u0.ambient())?;
    ensure_same(g, r.ambient())?;
    let perp = w.orthogonal_complement();
    if !perp.contains(r) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let phase = (g.p() - r.dot(u0)) % g.p();
    Ok(omega_pow(g.p(), phase) / perp.len() as f64)
}

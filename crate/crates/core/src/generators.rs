//! Synthetic instances.

use rand::Rng;

use crate::bohr::{enumerate_structured, BohrVariety, StructuredSet};
use crate::error::{Error, Result};
use crate::linalg::{AffineEndo, Ambient, GVector, Matrix, Subspace};
use crate::product_set::ProductSet;

fn check_density(density: f64) -> Result<()> {
    if density > 0.0 && density <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("density must lie in (0, 1], got {density}")))
    }
}

pub fn random_vector(g: Ambient, rng: &mut impl Rng) -> GVector {
    g.decode(rng.gen_range(0..g.size()))
}

pub fn random_matrix(g: Ambient, rng: &mut impl Rng) -> Matrix {
    let p = g.p() as u32;
    let rows: Vec<Vec<u32>> = (0..g.n())
        .map(|_| (0..g.n()).map(|_| rng.gen_range(0..p)).collect())
        .collect();
    Matrix::from_rows(g.p(), &rows)
}

/// A uniformly random `n × n` matrix of the given rank.
pub fn random_matrix_of_rank(g: Ambient, rank: usize, rng: &mut impl Rng) -> Result<Matrix> {
    let n = g.n();
    if rank > n {
        return Err(Error::InvalidArgument(format!("rank {rank} exceeds n = {n}")));
    }
    loop {
        let m = random_matrix(g, rng);
        if m.rank() == rank {
            return Ok(m);
        }
        // Low ranks are rare among uniform matrices; build them as products.
        let p = g.p() as u32;
        let left: Vec<Vec<u32>> = (0..n).map(|_| (0..rank).map(|_| rng.gen_range(0..p)).collect()).collect();
        let right: Vec<Vec<u32>> = (0..rank).map(|_| (0..n).map(|_| rng.gen_range(0..p)).collect()).collect();
        if rank == 0 {
            return Ok(Matrix::zeros(g.p(), n, n));
        }
        let m = Matrix::from_rows(g.p(), &left).mul(&Matrix::from_rows(g.p(), &right));
        if m.rank() == rank {
            return Ok(m);
        }
    }
}

/// A random subspace of the given codimension.
pub fn random_subspace(g: Ambient, codim: usize, rng: &mut impl Rng) -> Result<Subspace> {
    if codim > g.n() {
        return Err(Error::InvalidArgument(format!("codimension {codim} exceeds n = {}", g.n())));
    }
    let mut normals = Subspace::zero(g);
    while normals.dim() < codim {
        let v = random_vector(g, rng);
        normals = normals.sum(&Subspace::span(g, &[v])?)?;
    }
    Ok(normals.orthogonal_complement())
}

/// Each pair independently with probability `density`.
pub fn random_set(g: Ambient, density: f64, rng: &mut impl Rng) -> Result<ProductSet> {
    check_density(density)?;
    let mut a = ProductSet::empty(g)?;
    let side = g.size();
    for x in 0..side {
        for y in 0..side {
            if rng.gen_bool(density) {
                a.insert_index(x, y);
            }
        }
    }
    Ok(a)
}

/// `{(x, y) : xᵀMy = 0}`; every row and column is a subspace.
pub fn bisubspace(g: Ambient, m: &Matrix) -> Result<ProductSet> {
    if (m.rows(), m.cols(), m.p()) != (g.n(), g.n(), g.p()) {
        return Err(Error::InvalidArgument(format!("matrix is not n × n over F_{}", g.p())));
    }
    let variety = BohrVariety::from_affine_family(g, &[AffineEndo::linear_map(m.clone())?])?;
    let functionals: Vec<GVector> = (0..g.size())
        .map(|x| variety.row_functionals(&g.decode(x))[0].0.clone())
        .collect();
    let ys: Vec<GVector> = g.vectors().collect();
    ProductSet::from_predicate(g, |x, y| functionals[x].dot(&ys[y]) == 0)
}

/// `U × V`.
pub fn product(u: &Subspace, v: &Subspace) -> Result<ProductSet> {
    ProductSet::product(u.ambient(), &u.element_indices(), &v.element_indices())
}

/// `(U × V) ∩ B` for random subspaces and a random map-form variety
/// with `forms` affine maps, plus each other pair with probability `noise`.
pub fn planted_noise(
    g: Ambient,
    codim_u: usize,
    codim_v: usize,
    forms: usize,
    noise: f64,
    rng: &mut impl Rng,
) -> Result<(ProductSet, StructuredSet)> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::InvalidArgument(format!("noise must lie in [0, 1], got {noise}")));
    }
    let u = random_subspace(g, codim_u, rng)?;
    let v = random_subspace(g, codim_v, rng)?;
    let family: Vec<AffineEndo> = (0..forms)
        .map(|_| AffineEndo::linear_map(random_matrix(g, rng)))
        .collect::<Result<_>>()?;
    let s = StructuredSet::new(u, v, BohrVariety::from_affine_family(g, &family)?)?;
    let mut a = ProductSet::empty(g)?;
    for (x, y) in enumerate_structured(&s)? {
        a.insert(&x, &y);
    }
    if noise > 0.0 {
        for x in 0..g.size() {
            for y in 0..g.size() {
                if rng.gen_bool(noise) {
                    a.insert_index(x, y);
                }
            }
        }
    }
    Ok((a, s))
}

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::vector::{Ambient, GVector};
use crate::error::{ensure_same, Error, Result};

/// `y ↦ L y + t` on `F_p^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineEndo {
    linear: Matrix,
    translation: GVector,
}

impl AffineEndo {
    pub fn new(linear: Matrix, translation: GVector) -> Result<Self> {
        let n = translation.n();
        if linear.rows() != n || linear.cols() != n || linear.p() != translation.p() {
            return Err(Error::InvalidArgument(format!(
                "affine map needs a {n}×{n} matrix over F_{}",
                translation.p()
            )));
        }
        Ok(Self {
            linear,
            translation,
        })
    }

    pub fn identity(ambient: Ambient) -> Self {
        Self {
            linear: Matrix::identity(ambient.p(), ambient.n()),
            translation: ambient.zero(),
        }
    }

    pub fn constant(value: GVector) -> Self {
        Self {
            linear: Matrix::zeros(value.p(), value.n(), value.n()),
            translation: value,
        }
    }

    pub fn linear_map(linear: Matrix) -> Result<Self> {
        let ambient = Ambient::new(linear.p() as u32, linear.rows())?;
        Self::new(linear, ambient.zero())
    }

    pub fn ambient(&self) -> Ambient {
        self.translation.ambient()
    }

    pub fn linear(&self) -> &Matrix {
        &self.linear
    }

    pub fn translation(&self) -> &GVector {
        &self.translation
    }

    pub fn eval(&self, y: &GVector) -> GVector {
        self.linear.mul_vec(y).add(&self.translation)
    }

    /// The linearization `α^L`: same linear part, zero translation.
    pub fn linearization(&self) -> AffineEndo {
        Self {
            linear: self.linear.clone(),
            translation: self.ambient().zero(),
        }
    }

    /// `α^{LT}`, the transpose of the linear part. The translation is dropped.
    pub fn adjoint(&self) -> Matrix {
        self.linear.transpose()
    }

    pub fn is_constant(&self) -> bool {
        self.linear.is_zero()
    }
}

/// Encoded-map order: linear part row-major, then translation.
impl Ord for AffineEndo {
    fn cmp(&self, other: &Self) -> Ordering {
        self.linear
            .data()
            .cmp(other.linear.data())
            .then_with(|| self.translation.coords().cmp(other.translation.coords()))
    }
}

impl PartialOrd for AffineEndo {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Fits `α` with `α(x_j) = y_j` for every pair.
///
/// Unknowns are ordered translation first, then the columns of the linear
/// part; when the points do not affinely span the space the free unknowns
/// are set to zero. Returns `Ok(None)` when no affine map fits the pairs.
pub fn solve_affine_from_points(pairs: &[(GVector, GVector)]) -> Result<Option<AffineEndo>> {
    let Some((first, _)) = pairs.first() else {
        return Err(Error::InvalidArgument("at least one point pair is required".into()));
    };
    let g = first.ambient();
    for (x, y) in pairs {
        ensure_same(g, x.ambient())?;
        ensure_same(g, y.ambient())?;
    }
    let (p, n, m) = (g.p(), g.n(), pairs.len());
    let mut design = Vec::with_capacity(m * (n + 1));
    let mut rhs = Vec::with_capacity(m * n);
    for (x, y) in pairs {
        design.push(1);
        design.extend_from_slice(x.coords());
        rhs.extend_from_slice(y.coords());
    }
    let design = Matrix::from_raw(p, m, n + 1, design);
    let rhs = Matrix::from_raw(p, m, n, rhs);
    Ok(design.solve(&rhs).map(|sol| {
        // sol is (n+1)×n: row 0 is tᵀ, rows 1..=n are Lᵀ.
        let translation = GVector::from_raw(p, sol.row(0).to_vec());
        let mut linear = Matrix::zeros(p, n, n);
        for j in 0..n {
            for i in 0..n {
                linear.set(i, j, sol.get(j + 1, i));
            }
        }
        AffineEndo {
            linear,
            translation,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let g = Ambient::new(3, 2).unwrap();
        let y = g.vector(&[1, 1]).unwrap();
        assert_eq!(AffineEndo::identity(g).eval(&y), y);
        let t = g.vector(&[2, 1]).unwrap();
        assert_eq!(AffineEndo::constant(t.clone()).eval(&y), t);

        let l = Matrix::from_rows(3, &[vec![1, 2], vec![0, 1]]);
        let a = AffineEndo::new(l, g.vector(&[1, 0]).unwrap()).unwrap();
        assert_eq!(a.eval(&y), g.vector(&[1, 1]).unwrap());
    }

    #[test]
    fn adjoint_examples() {
        let g = Ambient::new(3, 2).unwrap();
        assert_eq!(AffineEndo::identity(g).adjoint(), Matrix::identity(3, 2));
        assert!(AffineEndo::constant(g.vector(&[1, 2]).unwrap()).adjoint().is_zero());
        let l = Matrix::from_rows(3, &[vec![1, 2], vec![0, 1]]);
        let a = AffineEndo::new(l, g.zero()).unwrap();
        assert_eq!(a.adjoint(), Matrix::from_rows(3, &[vec![1, 0], vec![2, 1]]));
    }

    #[test]
    fn solve_identity_from_simplex() {
        let g = Ambient::new(5, 3).unwrap();
        let mut pairs = vec![(g.zero(), g.zero())];
        for i in 0..3 {
            pairs.push((g.unit(i), g.unit(i)));
        }
        assert_eq!(solve_affine_from_points(&pairs).unwrap(), Some(AffineEndo::identity(g)));
    }

    #[test]
    fn solve_detects_contradiction() {
        let g = Ambient::new(2, 2).unwrap();
        let (a, b) = (g.vector(&[1, 0]).unwrap(), g.vector(&[0, 1]).unwrap());
        let pairs = vec![(g.zero(), a), (g.zero(), b)];
        assert_eq!(solve_affine_from_points(&pairs).unwrap(), None);
        assert!(solve_affine_from_points(&[]).is_err());
    }

    #[test]
    fn underdetermined_zeroes_free_unknowns() {
        let g = Ambient::new(3, 2).unwrap();
        let t = g.vector(&[2, 1]).unwrap();
        let fit = solve_affine_from_points(&[(g.zero(), t.clone())]).unwrap().unwrap();
        assert_eq!(fit, AffineEndo::constant(t));
    }
}

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::vector::{mul_mod, sub_mod, Ambient, GVector};
use crate::error::{ensure_same, Result};

/// A subspace of `F_p^n` held by its reduced row-echelon basis.
///
/// The RREF basis is unique, so derived equality is subspace equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRepr", into = "SubspaceRepr")]
pub struct Subspace {
    ambient: Ambient,
    basis: Vec<GVector>,
    pivots: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient: Ambient,
    basis: Vec<GVector>,
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> Self {
        Self {
            ambient: s.ambient,
            basis: s.basis,
        }
    }
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = crate::error::Error;

    fn try_from(repr: SubspaceRepr) -> Result<Self> {
        Subspace::span(repr.ambient, &repr.basis)
    }
}

impl Subspace {
    pub fn zero(ambient: Ambient) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: Ambient) -> Self {
        Self {
            ambient,
            basis: (0..ambient.n()).map(|i| ambient.unit(i)).collect(),
            pivots: (0..ambient.n()).collect(),
        }
    }

    /// Canonical basis of the span of `vectors`.
    pub fn span(ambient: Ambient, vectors: &[GVector]) -> Result<Self> {
        for v in vectors {
            ensure_same(ambient, v.ambient())?;
        }
        Ok(Self::span_unchecked(ambient, vectors))
    }

    fn span_unchecked(ambient: Ambient, vectors: &[GVector]) -> Self {
        let (p, n) = (ambient.p(), ambient.n());
        let data = vectors.iter().flat_map(|v| v.coords().iter().copied()).collect();
        let mut m = Matrix::from_raw(p, vectors.len(), n, data);
        let pivots = m.rref();
        let basis = (0..pivots.len())
            .map(|r| GVector::from_raw(p, m.row(r).to_vec()))
            .collect();
        Self {
            ambient,
            basis,
            pivots,
        }
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn basis(&self) -> &[GVector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient.n() - self.basis.len()
    }

    /// Number of elements, `p^dim`.
    pub fn len(&self) -> usize {
        (self.ambient.p() as usize).pow(self.dim() as u32)
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Canonical representative of `v + self`: the pivot coordinates are
    /// eliminated.
    pub fn reduce(&self, v: &GVector) -> GVector {
        let p = self.ambient.p();
        let mut out = v.clone();
        for (b, &pc) in self.basis.iter().zip(&self.pivots) {
            let factor = out.coords()[pc];
            if factor == 0 {
                continue;
            }
            for (o, &bv) in out.coords_mut().iter_mut().zip(b.coords()) {
                *o = sub_mod(*o, mul_mod(factor, bv, p), p);
            }
        }
        out
    }

    pub fn contains(&self, v: &GVector) -> bool {
        v.ambient() == self.ambient && self.reduce(v).is_zero()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// `{r : r · s = 0 for all s in self}`.
    pub fn orthogonal_complement(&self) -> Subspace {
        let (p, n) = (self.ambient.p(), self.ambient.n());
        let mut is_pivot = vec![false; n];
        for &pc in &self.pivots {
            is_pivot[pc] = true;
        }
        let mut generators = Vec::with_capacity(n - self.dim());
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut coords = vec![0u8; n];
            coords[free] = 1;
            for (b, &pc) in self.basis.iter().zip(&self.pivots) {
                coords[pc] = sub_mod(0, b.coords()[free], p);
            }
            generators.push(GVector::from_raw(p, coords));
        }
        Self::span_unchecked(self.ambient, &generators)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        ensure_same(self.ambient, other.ambient)?;
        let all: Vec<GVector> = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Self::span_unchecked(self.ambient, &all))
    }

    /// `self ∩ other`, computed as `(self^⊥ + other^⊥)^⊥`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        ensure_same(self.ambient, other.ambient)?;
        let perp = self
            .orthogonal_complement()
            .sum(&other.orthogonal_complement())?;
        Ok(perp.orthogonal_complement())
    }

    /// `{x : L x ∈ self}` for a square matrix `L` on the ambient space.
    ///
    /// `Lx ∈ S` iff `w · Lx = (Lᵀw) · x = 0` for every `w` in a basis of
    /// `S^⊥`, so the preimage is `{Lᵀw}^⊥`.
    pub fn preimage(&self, linear: &Matrix) -> Subspace {
        let n = self.ambient.n();
        assert_eq!((linear.rows(), linear.cols()), (n, n), "preimage needs an n×n matrix");
        let lt = linear.transpose();
        let pulled: Vec<GVector> = self
            .orthogonal_complement()
            .basis
            .iter()
            .map(|w| lt.mul_vec(w))
            .collect();
        Self::span_unchecked(self.ambient, &pulled).orthogonal_complement()
    }

    /// Every element as a table index, sorted.
    pub fn element_indices(&self) -> Vec<usize> {
        let g = self.ambient;
        let p = g.p() as usize;
        let basis_idx: Vec<usize> = self.basis.iter().map(|b| g.encode(b)).collect();
        let mut out = vec![0usize];
        out.reserve(self.len());
        for &b in &basis_idx {
            let current = out.len();
            let mut multiple = b;
            for _ in 1..p {
                for i in 0..current {
                    let v = g.add_index(out[i], multiple);
                    out.push(v);
                }
                multiple = g.add_index(multiple, b);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn elements(&self) -> Vec<GVector> {
        self.element_indices()
            .into_iter()
            .map(|i| self.ambient.decode(i))
            .collect()
    }
}

/// `u0 + W`, or the empty set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coset {
    subspace: Subspace,
    representative: Option<GVector>,
}

impl Coset {
    pub fn new(subspace: Subspace, point: &GVector) -> Result<Self> {
        ensure_same(subspace.ambient(), point.ambient())?;
        let representative = Some(subspace.reduce(point));
        Ok(Self {
            subspace,
            representative,
        })
    }

    pub fn empty(subspace: Subspace) -> Self {
        Self {
            subspace,
            representative: None,
        }
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    /// Canonical representative (pivot coordinates of `W` are zero).
    pub fn representative(&self) -> Option<&GVector> {
        self.representative.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_none()
    }

    pub fn contains(&self, y: &GVector) -> bool {
        match &self.representative {
            Some(u0) => self.subspace.contains(&y.sub(u0)),
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.subspace.len()
        }
    }
}

/// Shrinks `v0` to a subspace meeting `avoid` only in `0`.
///
/// Repeatedly takes the smallest (in encoded order) nonzero `r ∈ avoid`
/// still inside the current subspace and cuts by a hyperplane that misses
/// it: `x ↦ x · r` when `r · r ≠ 0`, otherwise the coordinate functional at
/// the first nonzero coordinate of `r`. Each cut removes at least one
/// element of `avoid`, so the codimension inside `v0` grows by at most
/// `|avoid \ {0}|`.
pub fn greedy_avoiding_subspace(v0: &Subspace, avoid: &[GVector]) -> Result<Subspace> {
    let g = v0.ambient();
    for r in avoid {
        ensure_same(g, r.ambient())?;
    }
    let mut targets: Vec<&GVector> = avoid.iter().filter(|r| !r.is_zero()).collect();
    targets.sort();
    targets.dedup();
    let mut current = v0.clone();
    while let Some(r) = targets.iter().find(|r| current.contains(r)) {
        let functional = if r.dot(r) != 0 {
            (*r).clone()
        } else {
            let j = r
                .coords()
                .iter()
                .position(|&c| c != 0)
                .expect("nonzero target");
            g.unit(j)
        };
        let hyperplane = Subspace::span_unchecked(g, &[functional]).orthogonal_complement();
        current = current.intersect(&hyperplane)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amb(p: u32, n: usize) -> Ambient {
        Ambient::new(p, n).unwrap()
    }

    fn vecs(g: Ambient, rows: &[&[u32]]) -> Vec<GVector> {
        rows.iter().map(|r| g.vector(r).unwrap()).collect()
    }

    /// Brute-force membership in the span, by enumerating all combinations.
    fn span_oracle(g: Ambient, gens: &[GVector]) -> Vec<usize> {
        let mut set = std::collections::BTreeSet::from([0usize]);
        loop {
            let before = set.len();
            let snapshot: Vec<usize> = set.iter().copied().collect();
            for &s in &snapshot {
                for v in gens {
                    set.insert(g.add_index(s, g.encode(v)));
                }
            }
            if set.len() == before {
                return set.into_iter().collect();
            }
        }
    }

    #[test]
    fn span_examples() {
        let g = amb(2, 2);
        assert_eq!(Subspace::span(g, &[]).unwrap().dim(), 0);
        let full = Subspace::span(g, &vecs(g, &[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(full, Subspace::full(g));

        let g3 = amb(3, 3);
        let s = Subspace::span(g3, &vecs(g3, &[&[1, 1, 0], &[2, 2, 0], &[0, 1, 2]])).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis(), &vecs(g3, &[&[1, 0, 1], &[0, 1, 2]])[..]);
    }

    #[test]
    fn span_rejects_mixed_ambients() {
        let g = amb(2, 2);
        let other = amb(3, 2).zero();
        assert!(Subspace::span(g, &[other]).is_err());
    }

    #[test]
    fn complement_examples() {
        let g = amb(2, 2);
        assert_eq!(Subspace::zero(g).orthogonal_complement(), Subspace::full(g));
        let s = Subspace::span(g, &vecs(g, &[&[1, 0]])).unwrap();
        assert_eq!(
            s.orthogonal_complement(),
            Subspace::span(g, &vecs(g, &[&[0, 1]])).unwrap()
        );

        let g3 = amb(3, 3);
        let s = Subspace::span(g3, &vecs(g3, &[&[1, 1, 0], &[0, 1, 2]])).unwrap();
        // Exhaustive over all 27 vectors.
        let perp: Vec<usize> = g3
            .vectors()
            .filter(|r| s.basis().iter().all(|b| b.dot(r) == 0))
            .map(|r| g3.encode(&r))
            .collect();
        let expected = Subspace::span(g3, &vecs(g3, &[&[2, 1, 1]])).unwrap();
        assert_eq!(s.orthogonal_complement(), expected);
        assert_eq!(expected.element_indices(), perp);
    }

    #[test]
    fn intersect_examples() {
        let g = amb(2, 3);
        let s = Subspace::span(g, &vecs(g, &[&[1, 1, 0]])).unwrap();
        assert_eq!(s.intersect(&Subspace::full(g)).unwrap(), s);

        let h1 = Subspace::span(g, &vecs(g, &[&[1, 0, 0]])).unwrap().orthogonal_complement();
        let h2 = Subspace::span(g, &vecs(g, &[&[0, 1, 0]])).unwrap().orthogonal_complement();
        let both = h1.intersect(&h2).unwrap();
        let oracle: Vec<usize> = g
            .vectors()
            .filter(|v| h1.contains(v) && h2.contains(v))
            .map(|v| g.encode(&v))
            .collect();
        assert_eq!(both.dim(), 1);
        assert_eq!(both.element_indices(), oracle);

        let g3 = amb(3, 2);
        let s = Subspace::span(g3, &vecs(g3, &[&[1, 1]])).unwrap();
        assert!(s.intersect(&s.orthogonal_complement()).unwrap().is_trivial());
    }

    #[test]
    fn preimage_trivial_cases() {
        let g = amb(3, 2);
        let s = Subspace::span(g, &vecs(g, &[&[1, 2]])).unwrap();
        assert_eq!(s.preimage(&Matrix::identity(3, 2)), s);
        assert_eq!(s.preimage(&Matrix::zeros(3, 2, 2)), Subspace::full(g));
    }

    #[test]
    fn element_enumeration_matches_span_oracle() {
        let g = amb(3, 3);
        let gens = vecs(g, &[&[1, 2, 0], &[0, 1, 1]]);
        let s = Subspace::span(g, &gens).unwrap();
        assert_eq!(s.element_indices(), span_oracle(g, &gens));
        assert_eq!(s.len(), 9);
    }

    #[test]
    fn coset_reduces_representative() {
        let g = amb(2, 2);
        let w = Subspace::span(g, &vecs(g, &[&[1, 0]])).unwrap();
        let a = Coset::new(w.clone(), &g.vector(&[1, 1]).unwrap()).unwrap();
        let b = Coset::new(w.clone(), &g.vector(&[0, 1]).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.representative().unwrap(), &g.vector(&[0, 1]).unwrap());
        assert!(a.contains(&g.vector(&[1, 1]).unwrap()));
        assert!(!a.contains(&g.zero()));
        let e = Coset::empty(w);
        assert!(e.is_empty() && e.len() == 0 && !e.contains(&g.zero()));
    }

    #[test]
    fn greedy_avoid_examples() {
        let g = amb(2, 3);
        let full = Subspace::full(g);
        assert_eq!(greedy_avoiding_subspace(&full, &[]).unwrap(), full);

        let e1 = g.unit(0);
        let v1 = greedy_avoiding_subspace(&full, &[e1.clone()]).unwrap();
        assert_eq!(v1.codim(), 1);
        let oracle: Vec<usize> = g.vectors().filter(|x| x.coords()[0] == 0).map(|x| g.encode(&x)).collect();
        assert_eq!(v1.element_indices(), oracle);
        assert!(!v1.contains(&e1));

        // Self-orthogonal target over F_2: (1,1,0)·(1,1,0) = 0.
        let r = g.vector(&[1, 1, 0]).unwrap();
        let v = greedy_avoiding_subspace(&full, &[r.clone(), g.zero()]).unwrap();
        assert!(!v.contains(&r));
        assert_eq!(v.codim(), 1);
    }
}

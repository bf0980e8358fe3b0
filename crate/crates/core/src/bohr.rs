//! Biaffine maps, bilinear Bohr varieties and structured sets.
//!
//! A form `β(x, y) = xᵀM y + a·x + b·y + c` is affine in each variable. A
//! family of `k` forms cuts out the variety `B = {(x, y) : β_i(x, y) = 0 ∀i}`
//! of codimension at most `k`. Varieties built from affine maps,
//! `β_i(x, y) = x · α_i(y)`, are said to be in *map form* (`b = 0`,
//! `c = 0`); their linear part replaces each `α_i` by its linearization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same, Error, Result};
use crate::linalg::{dot_slices, sub_mod, AffineEndo, Ambient, Coset, GVector, Matrix, Subspace};
use crate::product_set::ProductSet;

/// Most `(x, y)` pairs a structured-set enumeration may visit.
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

/// Violating pairs kept in a containment report.
pub const MAX_WITNESSES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiaffineForm {
    pub m: Matrix,
    pub a: GVector,
    pub b: GVector,
    pub c: u8,
}

impl BiaffineForm {
    pub fn eval(&self, x: &GVector, y: &GVector) -> u8 {
        let p = self.a.p();
        let my = self.m.mul_vec(y);
        let total = x.dot(&my) as u32 + self.a.dot(x) as u32 + self.b.dot(y) as u32 + self.c as u32;
        (total % p as u32) as u8
    }

    fn is_map_form(&self) -> bool {
        self.b.is_zero() && self.c == 0
    }

    /// Coefficients flattened as one vector: `M`, `a`, `b`, `c`.
    fn flatten(&self) -> Vec<u8> {
        let mut v = self.m.data().to_vec();
        v.extend_from_slice(self.a.coords());
        v.extend_from_slice(self.b.coords());
        v.push(self.c);
        v
    }
}

/// `k` forms on `G × G`, read together as a map into `F_p^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BohrVariety {
    ambient: Ambient,
    forms: Vec<BiaffineForm>,
}

impl BohrVariety {
    pub fn new(ambient: Ambient, forms: Vec<BiaffineForm>) -> Result<Self> {
        let n = ambient.n();
        for f in &forms {
            ensure_same(ambient, f.a.ambient())?;
            ensure_same(ambient, f.b.ambient())?;
            if (f.m.rows(), f.m.cols(), f.m.p()) != (n, n, ambient.p()) || f.c >= ambient.p() {
                return Err(Error::InvalidArgument(format!("form is not over {ambient}")));
            }
        }
        Ok(Self { ambient, forms })
    }

    /// `G × G`: no constraints.
    pub fn everything(ambient: Ambient) -> Self {
        Self {
            ambient,
            forms: Vec::new(),
        }
    }

    /// Forms `β_i(x, y) = x · α_i(y)`: `M_i` the linear part of `α_i`,
    /// `a_i = α_i(0)`, `b_i = 0`, `c_i = 0`.
    pub fn from_affine_family(ambient: Ambient, family: &[AffineEndo]) -> Result<Self> {
        let forms = family
            .iter()
            .map(|alpha| {
                ensure_same(ambient, alpha.ambient())?;
                Ok(BiaffineForm {
                    m: alpha.linear().clone(),
                    a: alpha.translation().clone(),
                    b: ambient.zero(),
                    c: 0,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { ambient, forms })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn forms(&self) -> &[BiaffineForm] {
        &self.forms
    }

    /// Number of defining forms.
    pub fn k(&self) -> usize {
        self.forms.len()
    }

    /// Codimension bound: the rank of the defining forms, so never more
    /// than `k` and never counting repeated or zero forms.
    pub fn codim(&self) -> usize {
        if self.forms.is_empty() {
            return 0;
        }
        let n = self.ambient.n();
        let width = n * n + 2 * n + 1;
        let data = self.forms.iter().flat_map(BiaffineForm::flatten).collect();
        Matrix::from_raw(self.ambient.p(), self.forms.len(), width, data).rank()
    }

    pub fn is_map_form(&self) -> bool {
        self.forms.iter().all(BiaffineForm::is_map_form)
    }

    /// The affine maps behind a map-form variety.
    pub fn affine_family(&self) -> Option<Vec<AffineEndo>> {
        self.is_map_form().then(|| {
            self.forms
                .iter()
                .map(|f| AffineEndo::new(f.m.clone(), f.a.clone()).expect("validated shapes"))
                .collect()
        })
    }

    /// `Bᴸ`: each `α_i` replaced by `α_iᴸ`, i.e. `a_i` dropped.
    pub fn linear_part(&self) -> Result<BohrVariety> {
        if !self.is_map_form() {
            return Err(Error::InvalidArgument(
                "linear part is defined only for varieties of the form x·α(y)".into(),
            ));
        }
        let forms = self
            .forms
            .iter()
            .map(|f| BiaffineForm {
                m: f.m.clone(),
                a: self.ambient.zero(),
                b: self.ambient.zero(),
                c: 0,
            })
            .collect();
        Ok(Self {
            ambient: self.ambient,
            forms,
        })
    }

    pub fn member(&self, x: &GVector, y: &GVector) -> bool {
        self.forms.iter().all(|f| f.eval(x, y) == 0)
    }

    /// For fixed `x` every form is affine in `y`:
    /// `β_i(x, y) = (Mᵢᵀx + b_i)·y + (a_i·x + c_i)`. Returns the pairs
    /// `(Mᵢᵀx + b_i, −(a_i·x + c_i))` so that `y ∈ B_{x·}` iff `u_i·y = rhs_i`.
    pub fn row_functionals(&self, x: &GVector) -> Vec<(GVector, u8)> {
        let p = self.ambient.p();
        self.forms
            .iter()
            .map(|f| {
                let u = f.m.transpose().mul_vec(x).add(&f.b);
                let constant = ((f.a.dot(x) as u16 + f.c as u16) % p as u16) as u8;
                (u, sub_mod(0, constant, p))
            })
            .collect()
    }

    /// `B_{x·}` as a coset of `{Mᵢᵀx + b_i}^⊥`, or empty when the affine
    /// system in `y` is inconsistent.
    pub fn row_coset(&self, x: &GVector) -> Result<Coset> {
        ensure_same(self.ambient, x.ambient())?;
        let g = self.ambient;
        let functionals = self.row_functionals(x);
        let us: Vec<GVector> = functionals.iter().map(|(u, _)| u.clone()).collect();
        let direction = Subspace::span(g, &us)?.orthogonal_complement();
        if functionals.is_empty() {
            return Coset::new(direction, &g.zero());
        }
        let (p, n) = (g.p(), g.n());
        let lhs = Matrix::from_raw(
            p,
            us.len(),
            n,
            us.iter().flat_map(|u| u.coords().iter().copied()).collect(),
        );
        let rhs = Matrix::from_raw(p, us.len(), 1, functionals.iter().map(|(_, r)| *r).collect());
        Ok(match lhs.solve(&rhs) {
            Some(sol) => {
                let point = GVector::from_raw(p, sol.data().to_vec());
                Coset::new(direction, &point)?
            }
            None => Coset::empty(direction),
        })
    }

    /// Writes the variety text format: `p n k`, then for each form its
    /// matrix rows, `a`, `b`, and `c`, space-separated.
    pub fn to_text(&self) -> String {
        let g = self.ambient;
        let join = |v: &[u8]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!("{} {} {}\n", g.p(), g.n(), self.k());
        for f in &self.forms {
            for r in 0..g.n() {
                out.push_str(&join(f.m.row(r)));
                out.push('\n');
            }
            out.push_str(&join(f.a.coords()));
            out.push('\n');
            out.push_str(&join(f.b.coords()));
            out.push('\n');
            out.push_str(&f.c.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = tokenize(text);
        let mut next = |what: &str| -> Result<(usize, u32)> {
            let (offset, tok) = tokens.next().ok_or_else(|| Error::Parse {
                offset: text.len(),
                message: format!("unexpected end of input, expected {what}"),
            })?;
            tok.parse::<u32>()
                .map(|v| (offset, v))
                .map_err(|e| Error::Parse {
                    offset,
                    message: format!("bad {what} {tok:?}: {e}"),
                })
        };
        let (po, p) = next("p")?;
        let (_, n) = next("n")?;
        let (_, k) = next("k")?;
        let g = Ambient::new(p, n as usize).map_err(|e| Error::Parse {
            offset: po,
            message: e.to_string(),
        })?;
        let mut residue = |what: &str| -> Result<u8> {
            let (offset, v) = next(what)?;
            if v >= p {
                return Err(Error::Parse {
                    offset,
                    message: format!("{what} {v} is not a residue mod {p}"),
                });
            }
            Ok(v as u8)
        };
        let n = g.n();
        let mut forms = Vec::with_capacity(k as usize);
        for _ in 0..k {
            let m = (0..n * n).map(|_| residue("matrix entry")).collect::<Result<Vec<_>>>()?;
            let a = (0..n).map(|_| residue("a coordinate")).collect::<Result<Vec<_>>>()?;
            let b = (0..n).map(|_| residue("b coordinate")).collect::<Result<Vec<_>>>()?;
            let c = residue("constant c")?;
            forms.push(BiaffineForm {
                m: Matrix::from_raw(g.p(), n, n, m),
                a: GVector::from_raw(g.p(), a),
                b: GVector::from_raw(g.p(), b),
                c,
            });
        }
        if let Some((offset, tok)) = tokens.next() {
            return Err(Error::Parse {
                offset,
                message: format!("trailing token {tok:?}"),
            });
        }
        BohrVariety::new(g, forms)
    }
}

fn tokenize(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    text.split_inclusive(char::is_whitespace).filter_map(move |chunk| {
        let start = offset;
        offset += chunk.len();
        let tok = chunk.trim_end();
        (!tok.is_empty()).then_some((start, tok))
    })
}

/// `(U × V) ∩ B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredSet {
    pub u: Subspace,
    pub v: Subspace,
    pub variety: BohrVariety,
}

impl StructuredSet {
    pub fn new(u: Subspace, v: Subspace, variety: BohrVariety) -> Result<Self> {
        ensure_same(u.ambient(), v.ambient())?;
        ensure_same(u.ambient(), variety.ambient())?;
        Ok(Self { u, v, variety })
    }

    pub fn ambient(&self) -> Ambient {
        self.u.ambient()
    }

    pub fn contains(&self, x: &GVector, y: &GVector) -> bool {
        self.u.contains(x) && self.v.contains(y) && self.variety.member(x, y)
    }

    fn guard(&self) -> Result<()> {
        let pairs = self.u.len() as u128 * self.v.len() as u128;
        if pairs > ENUMERATION_LIMIT {
            return Err(Error::Guard {
                what: "structured-set enumeration pairs |U|·|V|",
                required: pairs,
                limit: ENUMERATION_LIMIT,
            });
        }
        Ok(())
    }

    /// Members with `x` fixed, as encoded `y` values in ascending order.
    fn row_members(&self, x: usize, v_elems: &[usize]) -> Vec<usize> {
        let g = self.ambient();
        let xv = g.decode(x);
        let functionals = self.variety.row_functionals(&xv);
        let mut digits = vec![0u8; g.n()];
        v_elems
            .iter()
            .copied()
            .filter(|&y| {
                g.digits_into(y, &mut digits);
                functionals
                    .iter()
                    .all(|(u, rhs)| dot_slices(u.coords(), &digits, g.p()) == *rhs)
            })
            .collect()
    }
}

/// Streams `(U × V) ∩ B` in lexicographic `(x, y)` encoded order.
pub fn enumerate_structured(s: &StructuredSet) -> Result<impl Iterator<Item = (GVector, GVector)> + '_> {
    s.guard()?;
    let g = s.ambient();
    let v_elems = s.v.element_indices();
    Ok(s.u.element_indices().into_iter().flat_map(move |x| {
        s.row_members(x, &v_elems)
            .into_iter()
            .map(move |y| (g.decode(x), g.decode(y)))
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub contained: bool,
    /// Up to [`MAX_WITNESSES`] members missing from the target, smallest first.
    pub witnesses: Vec<(GVector, GVector)>,
    /// `|(U × V) ∩ B|`.
    pub structured_count: u64,
}

/// Checks `(U × V) ∩ B ⊆ A` by enumeration.
pub fn containment_check(s: &StructuredSet, a: &ProductSet) -> Result<ContainmentReport> {
    ensure_same(s.ambient(), a.ambient())?;
    s.guard()?;
    let g = s.ambient();
    let v_elems = s.v.element_indices();
    let per_row: Vec<(u64, Vec<usize>, usize)> = s
        .u
        .element_indices()
        .into_par_iter()
        .map(|x| {
            let members = s.row_members(x, &v_elems);
            let missing: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&y| !a.contains_index(x, y))
                .take(MAX_WITNESSES)
                .collect();
            (members.len() as u64, missing, x)
        })
        .collect();
    let mut witnesses = Vec::new();
    let mut count = 0;
    let mut contained = true;
    for (c, missing, x) in per_row {
        count += c;
        contained &= missing.is_empty();
        for y in missing {
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push((g.decode(x), g.decode(y)));
            }
        }
    }
    Ok(ContainmentReport {
        contained,
        witnesses,
        structured_count: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn amb(p: u32, n: usize) -> Ambient {
        Ambient::new(p, n).unwrap()
    }

    fn random_affine(g: Ambient, rng: &mut ChaCha8Rng) -> AffineEndo {
        let p = g.p() as u32;
        let rows: Vec<Vec<u32>> = (0..g.n()).map(|_| (0..g.n()).map(|_| rng.gen_range(0..p)).collect()).collect();
        let t: Vec<u32> = (0..g.n()).map(|_| rng.gen_range(0..p)).collect();
        AffineEndo::new(Matrix::from_rows(g.p(), &rows), g.vector(&t).unwrap()).unwrap()
    }

    #[test]
    fn empty_family_is_everything() {
        let g = amb(2, 2);
        let b = BohrVariety::from_affine_family(g, &[]).unwrap();
        assert_eq!(b.k(), 0);
        assert!(g.vectors().all(|x| g.vectors().all(|y| b.member(&x, &y))));
    }

    #[test]
    fn identity_family_is_dot_product_zero_set() {
        let g = amb(2, 2);
        let b = BohrVariety::from_affine_family(g, &[AffineEndo::identity(g)]).unwrap();
        let (e0, e1) = (g.unit(0), g.unit(1));
        assert!(b.member(&e0, &e1));
        assert!(!b.member(&e0, &e0));
        let ones = g.vector(&[1, 1]).unwrap();
        assert!(b.member(&ones, &ones));
    }

    #[test]
    fn constant_family_ignores_y() {
        let g = amb(3, 2);
        let t = g.vector(&[1, 2]).unwrap();
        let b = BohrVariety::from_affine_family(g, &[AffineEndo::constant(t.clone())]).unwrap();
        for x in g.vectors() {
            for y in g.vectors() {
                assert_eq!(b.member(&x, &y), x.dot(&t) == 0);
            }
        }
        let lin = b.linear_part().unwrap();
        assert!(g.vectors().all(|x| g.vectors().all(|y| lin.member(&x, &y))));
        assert_eq!(lin.codim(), 0);
    }

    #[test]
    fn linear_part_of_shift_is_dot_product() {
        let g = amb(3, 2);
        let shift = AffineEndo::new(Matrix::identity(3, 2), g.vector(&[1, 1]).unwrap()).unwrap();
        let lin = BohrVariety::from_affine_family(g, &[shift]).unwrap().linear_part().unwrap();
        for x in g.vectors() {
            for y in g.vectors() {
                assert_eq!(lin.member(&x, &y), x.dot(&y) == 0);
            }
        }
    }

    #[test]
    fn linear_part_contains_axes() {
        let g = amb(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fam: Vec<AffineEndo> = (0..3).map(|_| random_affine(g, &mut rng)).collect();
        let lin = BohrVariety::from_affine_family(g, &fam).unwrap().linear_part().unwrap();
        for v in g.vectors() {
            assert!(lin.member(&g.zero(), &v));
            assert!(lin.member(&v, &g.zero()));
        }
    }

    #[test]
    fn linear_part_rejects_general_forms() {
        let g = amb(2, 2);
        let form = BiaffineForm {
            m: Matrix::zeros(2, 2, 2),
            a: g.zero(),
            b: g.unit(0),
            c: 0,
        };
        let b = BohrVariety::new(g, vec![form]).unwrap();
        assert!(!b.is_map_form());
        assert!(b.linear_part().is_err());
        assert!(b.affine_family().is_none());
    }

    #[test]
    fn row_coset_examples() {
        let g = amb(2, 3);
        let id = BohrVariety::from_affine_family(g, &[AffineEndo::identity(g)]).unwrap();
        let x = g.vector(&[1, 0, 1]).unwrap();
        let coset = id.row_coset(&x).unwrap();
        assert_eq!(coset.subspace(), &Subspace::span(g, &[x.clone()]).unwrap().orthogonal_complement());
        assert_eq!(coset.representative(), Some(&g.zero()));

        let t = g.unit(1);
        let constant = BohrVariety::from_affine_family(g, &[AffineEndo::constant(t)]).unwrap();
        assert!(constant.row_coset(&g.unit(1)).unwrap().is_empty());
        assert!(!constant.row_coset(&g.unit(0)).unwrap().is_empty());
    }

    #[test]
    fn row_coset_agrees_with_member() {
        let g = amb(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let fam: Vec<AffineEndo> = (0..rng.gen_range(1..4)).map(|_| random_affine(g, &mut rng)).collect();
            let b = BohrVariety::from_affine_family(g, &fam).unwrap();
            for x in g.vectors() {
                let coset = b.row_coset(&x).unwrap();
                for y in g.vectors() {
                    assert_eq!(coset.contains(&y), b.member(&x, &y));
                }
            }
        }
    }

    #[test]
    fn codim_counts_independent_forms() {
        let g = amb(2, 2);
        let id = AffineEndo::identity(g);
        let zero = AffineEndo::constant(g.zero());
        let b = BohrVariety::from_affine_family(g, &[id.clone(), id, zero]).unwrap();
        assert_eq!(b.k(), 3);
        assert_eq!(b.codim(), 1);
    }

    #[test]
    fn enumerate_examples() {
        let g = amb(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let lin = BohrVariety::from_affine_family(g, &[random_affine(g, &mut rng)])
            .unwrap()
            .linear_part()
            .unwrap();
        let point = StructuredSet::new(Subspace::zero(g), Subspace::zero(g), lin.clone()).unwrap();
        let all: Vec<_> = enumerate_structured(&point).unwrap().collect();
        assert_eq!(all, vec![(g.zero(), g.zero())]);

        let u = Subspace::span(g, &[g.unit(0), g.unit(2)]).unwrap();
        let v = Subspace::span(g, &[g.vector(&[1, 1, 0]).unwrap()]).unwrap();
        let free = StructuredSet::new(u.clone(), v.clone(), BohrVariety::everything(g)).unwrap();
        assert_eq!(enumerate_structured(&free).unwrap().count(), u.len() * v.len());

        let s = StructuredSet::new(u.clone(), v.clone(), lin).unwrap();
        let listed: Vec<_> = enumerate_structured(&s).unwrap().collect();
        let mut oracle = Vec::new();
        for x in u.elements() {
            for y in v.elements() {
                if s.variety.member(&x, &y) {
                    oracle.push((x.clone(), y.clone()));
                }
            }
        }
        assert_eq!(listed, oracle);
    }

    #[test]
    fn enumeration_guard() {
        let g = amb(2, 13);
        let full = Subspace::full(g);
        let s = StructuredSet::new(full.clone(), full, BohrVariety::everything(g)).unwrap();
        assert!(matches!(enumerate_structured(&s), Err(Error::Guard { .. })));
    }

    #[test]
    fn containment_examples() {
        let g = amb(2, 2);
        let lin = BohrVariety::from_affine_family(g, &[AffineEndo::identity(g)])
            .unwrap()
            .linear_part()
            .unwrap();
        let mut origin = ProductSet::empty(g).unwrap();
        origin.insert_index(0, 0);
        let point = StructuredSet::new(Subspace::zero(g), Subspace::zero(g), lin.clone()).unwrap();
        assert!(containment_check(&point, &origin).unwrap().contained);

        let s = StructuredSet::new(Subspace::full(g), Subspace::full(g), lin).unwrap();
        let full = ProductSet::full(g).unwrap();
        let report = containment_check(&s, &full).unwrap();
        assert!(report.contained);
        // x·y = 0 over F_2^2: 10 of 16 pairs.
        assert_eq!(report.structured_count, 10);

        let mut holed = full.clone();
        let (x, y) = (g.vector(&[1, 1]).unwrap(), g.vector(&[1, 1]).unwrap());
        holed.remove_index(g.encode(&x), g.encode(&y));
        let report = containment_check(&s, &holed).unwrap();
        assert!(!report.contained);
        assert_eq!(report.witnesses, vec![(x, y)]);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let g = amb(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fam: Vec<AffineEndo> = (0..2).map(|_| random_affine(g, &mut rng)).collect();
        let b = BohrVariety::from_affine_family(g, &fam).unwrap();
        assert_eq!(BohrVariety::from_text(&b.to_text()).unwrap(), b);

        assert!(matches!(BohrVariety::from_text("3 2 1\n1 2\n"), Err(Error::Parse { offset: 10, .. })));
        assert!(matches!(BohrVariety::from_text("3 2 0\n5"), Err(Error::Parse { offset: 6, .. })));
        assert!(matches!(BohrVariety::from_text("3 1 1\n7 0 0 0"), Err(Error::Parse { offset: 6, .. })));
    }
}

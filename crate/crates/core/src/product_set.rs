//! Subsets of `G × G` and the directional convolution pipeline.
//!
//! Axis convention, used everywhere in the crate: a *row* fixes the first
//! coordinate, `A_{x·} = {y : (x, y) ∈ A}`; a *column* fixes the second,
//! `A_{·y} = {x : (x, y) ∈ A}`. The grid is stored row-major, so bit
//! `x·N + y` is the pair `(x, y)` with `x, y` in base-`p` encoding.
//!
//! The three pipeline stages are
//!
//! * `A⁽¹⁾`: every row `L` replaced by `L − L`,
//! * `A⁽²⁾`: every column of `A⁽¹⁾` replaced by `L + L − L − L`,
//! * `A⁽³⁾`: every row of `A⁽²⁾` replaced by `L + L − L − L`.
//!
//! Since `L − L` is symmetric, `L + L − L − L = (L − L) − (L − L)`, which is
//! how the four-fold sets are computed.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_same, Error, Result};
use crate::fourier::{dft, idft, DenseFn};
use crate::linalg::{Ambient, GVector};

/// Lines of at least this many points are convolved through the transform;
/// shorter lines use direct pairwise arithmetic.
pub const FAST_PATH_MIN_LINE: usize = 32;

/// Largest grid (in bits) a [`ProductSet`] may allocate.
pub const MAX_GRID_BITS: usize = 1 << 28;

pub const SET_MAGIC: &[u8; 6] = b"FPSET\0";
pub const SET_VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Fixed first coordinate `x`; the line is `A_{x·}`.
    Row,
    /// Fixed second coordinate `y`; the line is `A_{·y}`.
    Col,
}

/// A subset of `G × G` as an `N × N` bit grid.
#[derive(Clone, PartialEq, Eq)]
pub struct ProductSet {
    ambient: Ambient,
    words: Vec<u64>,
}

impl std::fmt::Debug for ProductSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ProductSet({}, {} of {} pairs)", self.ambient, self.len(), self.side() * self.side())
    }
}

impl ProductSet {
    pub fn empty(ambient: Ambient) -> Result<Self> {
        let n = ambient.size();
        let bits = n.checked_mul(n).filter(|&b| b <= MAX_GRID_BITS).ok_or(Error::Guard {
            what: "product-set grid bits",
            required: (n as u128) * (n as u128),
            limit: MAX_GRID_BITS as u128,
        })?;
        Ok(Self {
            ambient,
            words: vec![0; bits.div_ceil(64)],
        })
    }

    pub fn full(ambient: Ambient) -> Result<Self> {
        let mut s = Self::empty(ambient)?;
        let bits = s.side() * s.side();
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * 64;
            *w = if lo + 64 <= bits { u64::MAX } else { (1u64 << (bits - lo)) - 1 };
        }
        Ok(s)
    }

    /// Builds the set `{(x, y) : pred(x, y)}` over encoded indices.
    pub fn from_predicate(ambient: Ambient, pred: impl Fn(usize, usize) -> bool + Sync) -> Result<Self> {
        let mut s = Self::empty(ambient)?;
        let n = s.side();
        let rows: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|x| (0..n).filter(|&y| pred(x, y)).collect())
            .collect();
        for (x, ys) in rows.into_iter().enumerate() {
            for y in ys {
                s.insert_index(x, y);
            }
        }
        Ok(s)
    }

    /// `U × V` for two index sets.
    pub fn product(ambient: Ambient, xs: &[usize], ys: &[usize]) -> Result<Self> {
        let mut s = Self::empty(ambient)?;
        for &x in xs {
            for &y in ys {
                s.insert_index(x, y);
            }
        }
        Ok(s)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// `N`, the number of points on each line.
    pub fn side(&self) -> usize {
        self.ambient.size()
    }

    #[inline]
    pub fn contains_index(&self, x: usize, y: usize) -> bool {
        let bit = x * self.side() + y;
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    #[inline]
    pub fn insert_index(&mut self, x: usize, y: usize) {
        let bit = x * self.side() + y;
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    #[inline]
    pub fn remove_index(&mut self, x: usize, y: usize) {
        let bit = x * self.side() + y;
        self.words[bit / 64] &= !(1 << (bit % 64));
    }

    pub fn contains(&self, x: &GVector, y: &GVector) -> bool {
        self.contains_index(self.ambient.encode(x), self.ambient.encode(y))
    }

    pub fn insert(&mut self, x: &GVector, y: &GVector) {
        self.insert_index(self.ambient.encode(x), self.ambient.encode(y));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `|A| / N²`.
    pub fn density(&self) -> f64 {
        let n = self.side() as f64;
        self.len() as f64 / (n * n)
    }

    pub fn is_subset(&self, other: &ProductSet) -> bool {
        self.ambient == other.ambient && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &ProductSet) -> Result<ProductSet> {
        ensure_same(self.ambient, other.ambient)?;
        Ok(Self {
            ambient: self.ambient,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        })
    }

    /// Members in lexicographic `(x, y)` index order.
    pub fn iter_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.side();
        self.words.iter().enumerate().flat_map(move |(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
            .map(move |bit| (bit / n, bit % n))
        })
    }

    /// Encoded members of the line with fixed coordinate `index`.
    pub fn line_indices(&self, axis: Axis, index: usize) -> Vec<usize> {
        let n = self.side();
        match axis {
            Axis::Row => (0..n).filter(|&y| self.contains_index(index, y)).collect(),
            Axis::Col => (0..n).filter(|&x| self.contains_index(x, index)).collect(),
        }
    }

    /// `A_{x·}` (row) or `A_{·y}` (column) as vectors in encoded order.
    pub fn slice(&self, axis: Axis, index: &GVector) -> Vec<GVector> {
        self.line_indices(axis, self.ambient.encode(index))
            .into_iter()
            .map(|i| self.ambient.decode(i))
            .collect()
    }

    /// Rebuilds the set from one membership table per line.
    fn from_lines(ambient: Ambient, axis: Axis, lines: Vec<Vec<bool>>) -> Result<Self> {
        let mut out = Self::empty(ambient)?;
        for (l, line) in lines.into_iter().enumerate() {
            for (i, member) in line.into_iter().enumerate() {
                if member {
                    match axis {
                        Axis::Row => out.insert_index(l, i),
                        Axis::Col => out.insert_index(i, l),
                    }
                }
            }
        }
        Ok(out)
    }

    fn map_lines(&self, axis: Axis, op: impl Fn(Ambient, &[usize]) -> Vec<bool> + Sync) -> ProductSet {
        let g = self.ambient;
        let lines: Vec<Vec<bool>> = (0..self.side())
            .into_par_iter()
            .map(|l| op(g, &self.line_indices(axis, l)))
            .collect();
        Self::from_lines(g, axis, lines).expect("same grid size as input")
    }

    /// Serializes as `FPSET\0`, version, `p`, `n`, then the row-major bits,
    /// least significant bit first within each byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let bits = self.side() * self.side();
        let mut out = Vec::with_capacity(9 + bits.div_ceil(8));
        out.extend_from_slice(SET_MAGIC);
        out.push(SET_VERSION);
        out.push(self.ambient.p());
        out.push(self.ambient.n() as u8);
        let bytes = bits.div_ceil(8);
        for i in 0..bytes {
            out.push((self.words[i / 8] >> (8 * (i % 8))) as u8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let parse = |offset: usize, message: &str| Error::Parse {
            offset,
            message: message.to_string(),
        };
        if bytes.len() < 9 {
            return Err(parse(bytes.len(), "truncated header"));
        }
        if &bytes[..6] != SET_MAGIC {
            return Err(parse(0, "bad magic, expected FPSET\\0"));
        }
        if bytes[6] != SET_VERSION {
            return Err(parse(6, "unsupported version"));
        }
        let ambient = Ambient::new(bytes[7] as u32, bytes[8] as usize).map_err(|e| parse(7, &e.to_string()))?;
        let mut set = Self::empty(ambient)?;
        let bits = set.side() * set.side();
        let body = &bytes[9..];
        let expected = bits.div_ceil(8);
        if body.len() != expected {
            return Err(parse(
                9 + body.len().min(expected),
                &format!("expected {expected} payload bytes, found {}", body.len()),
            ));
        }
        for (i, &b) in body.iter().enumerate() {
            set.words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        if bits % 8 != 0 && body[expected - 1] >> (bits % 8) != 0 {
            return Err(parse(9 + expected - 1, "padding bits must be zero"));
        }
        Ok(set)
    }

    /// One member per line, `x_1,...,x_n;y_1,...,y_n`, after a
    /// `# fpset p=<p> n=<n>` header.
    pub fn to_text(&self) -> String {
        let g = self.ambient;
        let mut out = format!("# fpset p={} n={}\n", g.p(), g.n());
        let join = |v: &GVector| v.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        for (x, y) in self.iter_indices() {
            out.push_str(&join(&g.decode(x)));
            out.push(';');
            out.push_str(&join(&g.decode(y)));
            out.push('\n');
        }
        out
    }

    /// Parses the text format. `ambient` is required when the header line
    /// is absent; when both are present they must agree.
    pub fn from_text(text: &str, ambient: Option<Ambient>) -> Result<Self> {
        let parse = |offset: usize, message: String| Error::Parse { offset, message };
        let mut ambient = ambient;
        let mut set: Option<ProductSet> = None;
        let mut offset = 0;
        for raw in text.split_inclusive('\n') {
            let line_start = offset;
            offset += raw.len();
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                let header = header.trim();
                if let Some(rest) = header.strip_prefix("fpset") {
                    let mut p = None;
                    let mut n = None;
                    for tok in rest.split_whitespace() {
                        match tok.split_once('=') {
                            Some(("p", v)) => p = v.parse::<u32>().ok(),
                            Some(("n", v)) => n = v.parse::<usize>().ok(),
                            _ => return Err(parse(line_start, format!("bad header token {tok:?}"))),
                        }
                    }
                    let (Some(p), Some(n)) = (p, n) else {
                        return Err(parse(line_start, "header needs p= and n=".into()));
                    };
                    let declared = Ambient::new(p, n).map_err(|e| parse(line_start, e.to_string()))?;
                    if ambient.is_some_and(|a| a != declared) || set.is_some() {
                        return Err(parse(line_start, "header conflicts with ambient".into()));
                    }
                    ambient = Some(declared);
                }
                continue;
            }
            let g = ambient.ok_or_else(|| parse(line_start, "missing `# fpset p= n=` header".into()))?;
            let s = match &mut set {
                Some(s) => s,
                None => set.insert(ProductSet::empty(g)?),
            };
            let (xs, ys) = line
                .split_once(';')
                .ok_or_else(|| parse(line_start, "expected `x;y`".into()))?;
            let vector = |part: &str, at: usize| -> Result<usize> {
                let coords: Vec<u32> = part
                    .split(',')
                    .map(|c| c.trim().parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| parse(at, format!("bad coordinate: {e}")))?;
                if coords.len() != g.n() || coords.iter().any(|&c| c >= g.p() as u32) {
                    return Err(parse(at, format!("expected {} residues below {}", g.n(), g.p())));
                }
                Ok(g.encode(&g.vector(&coords)?))
            };
            let lead = raw.len() - raw.trim_start().len();
            let x = vector(xs, line_start + lead)?;
            let y = vector(ys, line_start + lead + xs.len() + 1)?;
            s.insert_index(x, y);
        }
        match set {
            Some(s) => Ok(s),
            None => {
                let g = ambient.ok_or_else(|| parse(0, "empty text set without header".into()))?;
                ProductSet::empty(g)
            }
        }
    }
}

/// `cnt(h) = #{z ∈ L : z + h ∈ L}` for a line `L` of encoded points.
/// `N · (1_L ∘ 1_L)(h) = cnt(h)`.
pub fn difference_counts(ambient: Ambient, members: &[usize]) -> Vec<u32> {
    let n = ambient.size();
    if members.is_empty() {
        return vec![0; n];
    }
    if n < FAST_PATH_MIN_LINE {
        let mut cnt = vec![0u32; n];
        for &z in members {
            for &w in members {
                cnt[ambient.sub_index(w, z)] += 1;
            }
        }
        return cnt;
    }
    let t = dft(&DenseFn::indicator(ambient, members.iter().copied()));
    let power = DenseFn::new(
        ambient,
        t.values().iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect(),
    )
    .expect("same size");
    // idft gives cnt / N; values are integers over N, so rounding is exact.
    idft(&power)
        .values()
        .iter()
        .map(|v| (v.re * n as f64).round().max(0.0) as u32)
        .collect()
}

/// `L − L` as a membership table.
pub fn line_difference(ambient: Ambient, members: &[usize]) -> Vec<bool> {
    difference_counts(ambient, members).into_iter().map(|c| c > 0).collect()
}

/// `L + L − L − L` as a membership table.
pub fn line_sumdiff(ambient: Ambient, members: &[usize]) -> Vec<bool> {
    let diff: Vec<usize> = line_difference(ambient, members)
        .into_iter()
        .enumerate()
        .filter_map(|(i, m)| m.then_some(i))
        .collect();
    line_difference(ambient, &diff)
}

/// Replaces every line along `axis` by its difference set.
pub fn directional_diff_support(a: &ProductSet, axis: Axis) -> ProductSet {
    a.map_lines(axis, line_difference)
}

/// Replaces every line along `axis` by `L + L − L − L`.
pub fn directional_sumdiff_support(a: &ProductSet, axis: Axis) -> ProductSet {
    a.map_lines(axis, line_sumdiff)
}

/// The three convolution stages.
#[derive(Clone, Debug)]
pub struct ConvolutionStages {
    pub a1: ProductSet,
    pub a2: ProductSet,
    pub a3: ProductSet,
}

/// Rows once (difference), columns twice, rows twice.
pub fn pipeline_a3(a: &ProductSet) -> ConvolutionStages {
    let a1 = directional_diff_support(a, Axis::Row);
    let a2 = directional_sumdiff_support(&a1, Axis::Col);
    let a3 = directional_sumdiff_support(&a2, Axis::Row);
    ConvolutionStages { a1, a2, a3 }
}

/// Number of vertical parallelograms of width `w` and height `h`: triples
/// `(x, y, z)` with `(x, y), (x, y + h), (x + w, z), (x + w, z + h) ∈ A`.
///
/// Counted as `Σ_x c_x(h) c_{x+w}(h)` where `c_x(h)` counts pairs at
/// vertical distance `h` in row `x` (the row convolution at `h`).
pub fn parallelogram_count(a: &ProductSet, w: &GVector, h: &GVector) -> u128 {
    let g = a.ambient();
    let (wi, hi) = (g.encode(w), g.encode(h));
    let n = a.side();
    let heights: Vec<u64> = (0..n)
        .into_par_iter()
        .map(|x| {
            (0..n)
                .filter(|&y| a.contains_index(x, y) && a.contains_index(x, g.add_index(y, hi)))
                .count() as u64
        })
        .collect();
    (0..n)
        .map(|x| heights[x] as u128 * heights[g.add_index(x, wi)] as u128)
        .sum()
}

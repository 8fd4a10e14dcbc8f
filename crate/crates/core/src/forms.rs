//! Multilinear forms on (GF(2)^n)^k stored as coefficient tensors.
//!
//! A form `α` is determined by its values on basis tuples,
//! `c[i₁,…,i_k] = α(e_{i₁},…,e_{i_k})`. The tensor is stored row-major as a
//! sequence of packed fibers along the last axis, so contracting the leading
//! axis against a vector is a word-level XOR of fiber blocks.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::gf2::{restrict_bilinear, words_for, BitMatrix, BitVec, Subspace};

/// Largest coefficient tensor (in bits) a form may allocate.
pub const MAX_TENSOR_BITS_LOG2: u32 = 32;

/// A permutation of `{0, …, k-1}` acting on argument slots.
///
/// Composition follows function notation: `p.compose(q)` is `p ∘ q`, i.e.
/// `q` is applied first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Self {
            images: (0..k).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &i in &images {
            if i >= k || seen[i] {
                return Err(Error::Malformed(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// Transposition of two 0-based positions.
    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..k).collect();
        images.swap(a, b);
        Self { images }
    }

    /// Parses cycle notation with 1-based points, e.g. `"(1 2 3)(4 5)"`.
    /// `"()"` and `"id"` denote the identity.
    pub fn parse_cycles(k: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        let mut images: Vec<usize> = (0..k).collect();
        if text == "id" {
            return Ok(Self { images });
        }
        let mut rest = text;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {text:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in {text:?}")))?;
            let points = open[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| match s.parse::<usize>() {
                    Ok(p) if (1..=k).contains(&p) => Ok(p - 1),
                    _ => Err(Error::Parse(format!("bad cycle point {s:?} for degree {k}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            for (a, b) in points.iter().circular_tuple_windows() {
                if points.len() > 1 {
                    images[*a] = *b;
                }
            }
            rest = open[close + 1..].trim_start();
        }
        Self::from_images(images).map_err(|_| Error::Parse(format!("cycles in {text:?} overlap")))
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    /// All permutations of degree `k` in lexicographic order of image lists.
    pub fn all(k: usize) -> Vec<Self> {
        (0..k)
            .permutations(k)
            .map(|images| Self { images })
            .collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("id");
        }
        let mut seen = vec![false; self.degree()];
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start + 1];
            seen[start] = true;
            let mut i = self.images[start];
            while i != start {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.images[i];
            }
            write!(f, "({})", cycle.iter().join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

/// Odometer over all index tuples in `[0, dim)^arity`, last axis fastest.
pub fn index_tuples(arity: usize, dim: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut next = if arity > 0 && dim == 0 {
        None
    } else {
        Some(vec![0; arity])
    };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut axis = arity;
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            succ[axis] += 1;
            if succ[axis] < dim {
                next = Some(succ);
                break;
            }
            succ[axis] = 0;
        }
        Some(current)
    })
}

/// A k-linear form on GF(2)^n.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultilinearForm {
    arity: usize,
    dim: usize,
    /// Words per fiber along the last axis.
    stride: usize,
    words: Vec<u64>,
}

impl MultilinearForm {
    /// The zero form. Panics when the tensor would exceed 2^32 bits.
    pub fn zero(arity: usize, dim: usize) -> Self {
        Self::try_zero(arity, dim).expect("tensor size within limits")
    }

    pub fn try_zero(arity: usize, dim: usize) -> Result<Self> {
        let bits = (dim as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
        if bits > 1u128 << MAX_TENSOR_BITS_LOG2 {
            return Err(Error::BudgetExceeded {
                what: "coefficient tensor",
                needed_log2: (bits as f64).log2().ceil() as u32,
                budget_log2: MAX_TENSOR_BITS_LOG2,
            });
        }
        let (fibers, stride) = Self::layout(arity, dim);
        Ok(Self {
            arity,
            dim,
            stride,
            words: vec![0; fibers * stride],
        })
    }

    fn layout(arity: usize, dim: usize) -> (usize, usize) {
        if arity == 0 {
            (1, 1)
        } else {
            (dim.pow(arity as u32 - 1), words_for(dim))
        }
    }

    /// Form with coefficient `f(tuple)` at every basis tuple.
    pub fn from_fn(arity: usize, dim: usize, mut f: impl FnMut(&[usize]) -> bool) -> Self {
        let mut form = Self::zero(arity, dim);
        for t in index_tuples(arity, dim) {
            if f(&t) {
                form.set(&t, true);
            }
        }
        form
    }

    /// Form with coefficient 1 exactly at the listed 0-based tuples; repeats cancel.
    pub fn from_monomials<'a>(
        arity: usize,
        dim: usize,
        monomials: impl IntoIterator<Item = &'a [usize]>,
    ) -> Result<Self> {
        let mut form = Self::try_zero(arity, dim)?;
        for t in monomials {
            form.check_tuple(t)?;
            form.flip(t);
        }
        Ok(form)
    }

    pub fn random<R: Rng + ?Sized>(arity: usize, dim: usize, rng: &mut R) -> Self {
        let mut form = Self::zero(arity, dim);
        let (fibers, _) = Self::layout(arity, dim);
        let fiber_bits = if arity == 0 { 1 } else { dim };
        for f in 0..fibers {
            let v = BitVec::random(fiber_bits, rng);
            form.fiber_mut(f).copy_from_slice(v.words());
        }
        form
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_tuple(&self, t: &[usize]) -> Result<()> {
        ensure_dim(self.arity, t.len()).map_err(|_| Error::ArityMismatch {
            expected: self.arity,
            found: t.len(),
        })?;
        if let Some(&bad) = t.iter().find(|&&i| i >= self.dim) {
            return Err(Error::Malformed(format!(
                "index {bad} out of range for dimension {}",
                self.dim
            )));
        }
        Ok(())
    }

    #[inline]
    fn position(&self, t: &[usize]) -> (usize, usize) {
        debug_assert_eq!(t.len(), self.arity);
        match t.split_last() {
            None => (0, 0),
            Some((&last, prefix)) => {
                let fiber = prefix.iter().fold(0, |acc, &i| acc * self.dim + i);
                (fiber * self.stride + last / 64, last % 64)
            }
        }
    }

    #[inline]
    fn fiber(&self, f: usize) -> &[u64] {
        &self.words[f * self.stride..(f + 1) * self.stride]
    }

    #[inline]
    fn fiber_mut(&mut self, f: usize) -> &mut [u64] {
        &mut self.words[f * self.stride..(f + 1) * self.stride]
    }

    /// Coefficient at a 0-based basis tuple.
    #[inline]
    pub fn get(&self, t: &[usize]) -> bool {
        let (w, b) = self.position(t);
        (self.words[w] >> b) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, t: &[usize], bit: bool) {
        let (w, b) = self.position(t);
        if bit {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    #[inline]
    pub fn flip(&mut self, t: &[usize]) {
        let (w, b) = self.position(t);
        self.words[w] ^= 1 << b;
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of nonzero coefficients.
    pub fn monomial_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// 0-based tuples with coefficient 1, in row-major order.
    pub fn monomials(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let (fibers, _) = Self::layout(self.arity, self.dim);
        (0..fibers).flat_map(move |f| {
            let prefix = self.decode_fiber(f);
            let fiber = BitVec::from_words(if self.arity == 0 { 1 } else { self.dim }, self.fiber(f).to_vec());
            fiber
                .iter_ones()
                .map(|last| {
                    let mut t = prefix.clone();
                    if self.arity > 0 {
                        t.push(last);
                    }
                    t
                })
                .collect::<Vec<_>>()
        })
    }

    fn decode_fiber(&self, mut f: usize) -> Vec<usize> {
        if self.arity == 0 {
            return Vec::new();
        }
        let mut prefix = vec![0; self.arity - 1];
        for slot in prefix.iter_mut().rev() {
            *slot = f % self.dim;
            f /= self.dim;
        }
        prefix
    }

    fn check_same_shape(&self, other: &MultilinearForm) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        ensure_dim(self.dim, other.dim)
    }

    /// Coefficientwise sum.
    pub fn add(&self, other: &MultilinearForm) -> Result<MultilinearForm> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    /// `target += c[i, …]`, the slice of the tensor with leading index `i`.
    /// `target` must have arity `k - 1 >= 1` and the same dimension.
    pub(crate) fn add_leading_slice_to(&self, i: usize, target: &mut MultilinearForm) {
        debug_assert!(self.arity >= 2 && target.arity == self.arity - 1 && target.dim == self.dim);
        let block = target.words.len();
        for (o, w) in target.words.iter_mut().zip(&self.words[i * block..(i + 1) * block]) {
            *o ^= w;
        }
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &MultilinearForm) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn add_assign(&mut self, other: &MultilinearForm) -> Result<()> {
        self.check_same_shape(other)?;
        self.add_assign_unchecked(other);
        Ok(())
    }

    /// Substitutes `x` into the first slot, giving a form of arity `k - 1`.
    pub fn contract_first(&self, x: &BitVec) -> Result<MultilinearForm> {
        if self.arity == 0 {
            return Err(Error::ArityMismatch {
                expected: 1,
                found: 0,
            });
        }
        ensure_dim(self.dim, x.len())?;
        let mut out = Self::zero(self.arity - 1, self.dim);
        if self.arity == 1 {
            let v = BitVec::from_words(self.dim, self.words.clone());
            out.words[0] = v.dot(x) as u64;
            return Ok(out);
        }
        let block = out.words.len();
        for i in x.iter_ones() {
            for (o, w) in out.words.iter_mut().zip(&self.words[i * block..(i + 1) * block]) {
                *o ^= w;
            }
        }
        Ok(out)
    }

    /// Value of the form at `args` by successive contraction.
    pub fn evaluate(&self, args: &[BitVec]) -> Result<bool> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: args.len(),
            });
        }
        for a in args {
            ensure_dim(self.dim, a.len())?;
        }
        let Some((last, leading)) = args.split_last() else {
            return Ok(self.words[0] & 1 == 1);
        };
        if self.dim == 0 {
            return Ok(false);
        }
        let mut current: std::borrow::Cow<'_, [u64]> = std::borrow::Cow::Borrowed(&self.words);
        for x in leading {
            let block = current.len() / self.dim;
            let mut next = vec![0u64; block];
            for i in x.iter_ones() {
                for (o, w) in next.iter_mut().zip(&current[i * block..(i + 1) * block]) {
                    *o ^= w;
                }
            }
            current = std::borrow::Cow::Owned(next);
        }
        Ok(BitVec::from_words(self.dim, current.into_owned()).dot(last))
    }

    /// `α ∘ π`, the form `(x₁,…,x_k) ↦ α(x_{π⁻¹(1)},…,x_{π⁻¹(k)})`.
    pub fn permute(&self, pi: &Permutation) -> Result<MultilinearForm> {
        if pi.degree() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: pi.degree(),
            });
        }
        if pi.is_identity() {
            return Ok(self.clone());
        }
        // c'[t'] = c[t] with t_j = t'_{π⁻¹(j)}, so t'_m = t_{π(m)}.
        let mut out = Self::zero(self.arity, self.dim);
        let mut dest = vec![0; self.arity];
        for t in self.monomials() {
            for (m, d) in dest.iter_mut().enumerate() {
                *d = t[pi.apply(m)];
            }
            out.flip(&dest);
        }
        Ok(out)
    }

    /// Invariance under every permutation of the argument slots. Adjacent
    /// transpositions generate the symmetric group, so only those are tested.
    pub fn is_symmetric(&self) -> bool {
        (1..self.arity).all(|i| {
            let tau = Permutation::transposition(self.arity, i - 1, i);
            self.permute(&tau).expect("arity matches") == *self
        })
    }

    /// Symmetry plus the repeated-variable identity
    /// `α(x, x, y, a₄, …) = α(x, y, y, a₄, …)` as polynomial maps.
    ///
    /// Both sides are expanded into reduced monomials using `x_i² = x_i`
    /// and compared term by term.
    pub fn is_strongly_symmetric(&self) -> Result<bool> {
        if self.arity < 3 {
            return Err(Error::Precondition(format!(
                "strong symmetry needs arity >= 3, got {}",
                self.arity
            )));
        }
        if !self.is_symmetric() {
            return Ok(false);
        }
        Ok(self.repeated_variable_expansion(true) == self.repeated_variable_expansion(false))
    }

    /// Reduced monomials of `α(x,x,y,rest)` (when `x_doubled`) or
    /// `α(x,y,y,rest)`, each as (x-support, y-support, rest indices).
    fn repeated_variable_expansion(&self, x_doubled: bool) -> BTreeSet<(Vec<usize>, Vec<usize>, Vec<usize>)> {
        let mut terms = BTreeSet::new();
        for t in self.monomials() {
            let (xs, ys) = if x_doubled {
                (vec![t[0], t[1]], vec![t[2]])
            } else {
                (vec![t[0]], vec![t[1], t[2]])
            };
            let key = (
                xs.into_iter().sorted().dedup().collect(),
                ys.into_iter().sorted().dedup().collect(),
                t[3..].to_vec(),
            );
            if !terms.remove(&key) {
                terms.insert(key);
            }
        }
        terms
    }

    /// Restriction to a subspace, expressed in the subspace's basis
    /// coordinates: `c'[j₁,…,j_k] = α(b_{j₁},…,b_{j_k})`.
    pub fn restrict(&self, s: &Subspace) -> Result<MultilinearForm> {
        ensure_dim(self.dim, s.ambient_dim())?;
        let d = s.dim();
        let basis = s.basis();
        let mut extents = vec![self.dim; self.arity];
        let mut dense: Vec<u8> = vec![0; self.dim.pow(self.arity as u32)];
        for t in self.monomials() {
            dense[flat(&t, &extents)] = 1;
        }
        for axis in 0..self.arity {
            let mut new_extents = extents.clone();
            new_extents[axis] = d;
            let mut next = vec![0u8; new_extents.iter().product()];
            let mut idx = vec![0; self.arity];
            for (pos, &bit) in dense.iter().enumerate() {
                if bit == 0 {
                    continue;
                }
                unflat(pos, &extents, &mut idx);
                let i = idx[axis];
                for j in 0..d {
                    if basis.get(j, i) {
                        idx[axis] = j;
                        next[flat(&idx, &new_extents)] ^= 1;
                    }
                }
                idx[axis] = i;
            }
            dense = next;
            extents = new_extents;
        }
        let mut out = Self::zero(self.arity, d);
        let mut idx = vec![0; self.arity];
        for (pos, &bit) in dense.iter().enumerate() {
            if bit == 1 {
                unflat(pos, &extents, &mut idx);
                out.set(&idx, true);
            }
        }
        Ok(out)
    }

    /// Coefficients as a flat row-major bit string of length `n^k`.
    pub fn to_flat_bits(&self) -> BitVec {
        let len = self.dim.pow(self.arity as u32);
        let mut v = BitVec::zeros(len);
        let extents = vec![self.dim; self.arity];
        for t in self.monomials() {
            v.set(flat(&t, &extents), true);
        }
        v
    }

    pub fn from_flat_bits(arity: usize, dim: usize, bits: &BitVec) -> Result<Self> {
        ensure_dim(dim.pow(arity as u32), bits.len())?;
        let mut out = Self::try_zero(arity, dim)?;
        let extents = vec![dim; arity];
        let mut idx = vec![0; arity];
        for pos in bits.iter_ones() {
            unflat(pos, &extents, &mut idx);
            out.set(&idx, true);
        }
        Ok(out)
    }

    pub fn to_sparse(&self) -> SparseForm {
        SparseForm {
            arity: self.arity,
            dim: self.dim,
            monomials: self
                .monomials()
                .map(|t| t.into_iter().map(|i| i + 1).collect())
                .collect(),
        }
    }

    pub fn from_sparse(sparse: &SparseForm) -> Result<Self> {
        let mut form = Self::try_zero(sparse.arity, sparse.dim)?;
        let mut zero_based = vec![0; sparse.arity];
        for m in &sparse.monomials {
            if m.len() != sparse.arity {
                return Err(Error::Malformed(format!(
                    "monomial {m:?} has length {}, arity is {}",
                    m.len(),
                    sparse.arity
                )));
            }
            for (z, &i) in zero_based.iter_mut().zip(m) {
                if i == 0 || i > sparse.dim {
                    return Err(Error::Malformed(format!(
                        "monomial {m:?} has an index outside 1..={}",
                        sparse.dim
                    )));
                }
                *z = i - 1;
            }
            if form.get(&zero_based) {
                return Err(Error::Malformed(format!("duplicate monomial {m:?}")));
            }
            form.set(&zero_based, true);
        }
        Ok(form)
    }
}

impl fmt::Debug for MultilinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultilinearForm(k={}, n={}, monomials=[", self.arity, self.dim)?;
        for (i, t) in self.monomials().take(32).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{:?}", t.iter().map(|i| i + 1).collect::<Vec<_>>())?;
        }
        if self.monomial_count() > 32 {
            f.write_str(", …")?;
        }
        f.write_str("])")
    }
}

#[inline]
fn flat(idx: &[usize], extents: &[usize]) -> usize {
    idx.iter().zip(extents).fold(0, |acc, (&i, &e)| acc * e + i)
}

#[inline]
fn unflat(mut pos: usize, extents: &[usize], out: &mut [usize]) {
    for (o, &e) in out.iter_mut().zip(extents).rev() {
        *o = pos % e;
        pos /= e;
    }
}

/// Sparse text representation: 1-based index tuples of the nonzero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseForm {
    pub arity: usize,
    pub dim: usize,
    pub monomials: Vec<Vec<usize>>,
}

impl SparseForm {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A bilinear form `β(x, y) = xᵀ M y` on GF(2)^n.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BilinearForm {
    matrix: BitMatrix,
}

impl BilinearForm {
    pub fn new(matrix: BitMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Malformed(format!(
                "bilinear form needs a square matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: BitMatrix::zeros(n, n),
        }
    }

    /// The standard scalar product `Σ x_i y_i`.
    pub fn dot_product(n: usize) -> Self {
        Self {
            matrix: BitMatrix::identity(n),
        }
    }

    /// `u(x) v(y)`.
    pub fn product(u: &BitVec, v: &BitVec) -> Result<Self> {
        ensure_dim(u.len(), v.len())?;
        Ok(Self {
            matrix: BitMatrix::outer(u, v),
        })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            matrix: BitMatrix::random(n, n, rng),
        }
    }

    pub fn random_with_rank<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Self {
        Self {
            matrix: BitMatrix::random_with_rank(n, rank, rng),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn evaluate(&self, x: &BitVec, y: &BitVec) -> Result<bool> {
        ensure_dim(self.dim(), x.len())?;
        ensure_dim(self.dim(), y.len())?;
        Ok(self.matrix.vec_mul(x)?.dot(y))
    }

    /// The linear form `y ↦ β(x, y)` as a vector.
    pub fn left_apply(&self, x: &BitVec) -> BitVec {
        self.matrix.vec_mul(x).expect("dimension checked by caller")
    }

    /// The linear form `x ↦ β(x, y)` as a vector.
    pub fn right_apply(&self, y: &BitVec) -> BitVec {
        self.matrix.mul_vec(y).expect("dimension checked by caller")
    }

    /// `(x, y) ↦ β(y, x)`.
    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn add(&self, other: &BilinearForm) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.add(&other.matrix)?,
        })
    }

    pub fn restrict(&self, s: &Subspace) -> Result<Self> {
        Ok(Self {
            matrix: restrict_bilinear(&self.matrix, s)?,
        })
    }

    pub fn to_multilinear(&self) -> MultilinearForm {
        let n = self.dim();
        let mut form = MultilinearForm::zero(2, n);
        for i in 0..n {
            form.fiber_mut(i).copy_from_slice(self.matrix.row(i).words());
        }
        form
    }

    pub fn from_multilinear(form: &MultilinearForm) -> Result<Self> {
        if form.arity() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: form.arity(),
            });
        }
        let n = form.dim();
        let rows = (0..n)
            .map(|i| BitVec::from_words(n, form.fiber(i).to_vec()))
            .collect();
        Self::new(BitMatrix::from_rows(n, rows)?)
    }
}

impl fmt::Debug for BilinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BilinearForm({:?})", self.matrix)
    }
}

/// Every symmetric k-linear form on GF(2)^n, one free bit per multiset of
/// axis indices.
///
/// Forms are yielded in increasing order of the bit mask over multisets,
/// multisets themselves being listed lexicographically; mask bit `b`
/// switches on the `b`-th multiset.
pub fn enumerate_symmetric_forms(
    n: usize,
    k: usize,
) -> Result<impl Iterator<Item = MultilinearForm>> {
    const BUDGET_LOG2: u32 = 25;
    let multisets: Vec<Vec<usize>> = (0..n).combinations_with_replacement(k).collect();
    let count = multisets.len();
    if count > BUDGET_LOG2 as usize {
        return Err(Error::BudgetExceeded {
            what: "symmetric form enumeration",
            needed_log2: count as u32,
            budget_log2: BUDGET_LOG2,
        });
    }
    let orbits: Vec<MultilinearForm> = multisets
        .iter()
        .map(|ms| {
            let mut form = MultilinearForm::zero(k, n);
            for t in ms.iter().copied().permutations(k).sorted().dedup() {
                form.set(&t, true);
            }
            form
        })
        .collect();
    Ok((0u64..1 << count).map(move |mask| {
        let mut form = MultilinearForm::zero(k, n);
        for (b, orbit) in orbits.iter().enumerate() {
            if mask >> b & 1 == 1 {
                form.add_assign_unchecked(orbit);
            }
        }
        form
    }))
}

//! Bit-packed linear algebra over GF(2).
//!
//! Vectors are packed little-endian into `u64` words: bit `i` of a vector lives
//! in word `i / 64` at position `i % 64`. Bits past the logical length are
//! always zero, so derived equality and hashing are bitwise.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};

/// Number of bits per storage word.
pub const WORD_BITS: usize = u64::BITS as usize;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A vector in GF(2)^n.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// The standard basis vector `e_i` (0-based).
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector with ones exactly at the given 0-based positions. Repeated
    /// positions cancel.
    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    /// Interprets the low `len` bits of `value` as a vector. `len <= 64`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD_BITS, "from_u64 needs len <= 64");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value & tail_mask(len);
        }
        v
    }

    /// Packs the vector into a `u64`. `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD_BITS, "to_u64 needs len <= 64");
        self.words.first().copied().unwrap_or(0)
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { len, words }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..words_for(len)).map(|_| rng.gen::<u64>()).collect();
        Self::from_words(len, words)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if bit {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// `self += other` over GF(2).
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Standard scalar product `Σ a_i b_i` over GF(2).
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Positions of the set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let t = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(k * WORD_BITS + t)
                }
            })
        })
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{self}]")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row reduction output: the reduced row echelon form and its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero rows of the RREF, one per pivot.
    pub rows: Vec<BitVec>,
    pub pivots: Vec<usize>,
}

/// Dense matrix over GF(2) stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        for r in &rows {
            ensure_dim(cols, r.len())?;
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Rank-one matrix `u vᵀ`.
    pub fn outer(u: &BitVec, v: &BitVec) -> Self {
        let data = (0..u.len())
            .map(|i| if u.get(i) { v.clone() } else { BitVec::zeros(v.len()) })
            .collect();
        Self {
            rows: u.len(),
            cols: v.len(),
            data,
        }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows).map(|_| BitVec::random(cols, rng)).collect(),
        }
    }

    /// Random `n × n` matrix of rank exactly `rank`, drawn as a product
    /// `A Bᵀ` of two random `n × rank` matrices conditioned on full column rank.
    pub fn random_with_rank<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Self {
        assert!(rank <= n, "rank {rank} exceeds size {n}");
        let full_rank = |rng: &mut R| loop {
            let m = Self::random(rank, n, rng);
            if m.rank() == rank {
                break m;
            }
        };
        let a = full_rank(rng);
        let b = full_rank(rng);
        a.transpose().mul(&b).expect("shapes agree")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn row_slice(&self) -> &[BitVec] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        self.data[i].set(j, bit)
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut c = BitVec::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.iter_ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix> {
        ensure_dim(self.rows, other.rows)?;
        ensure_dim(self.cols, other.cols)?;
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    pub(crate) fn add_assign(&mut self, other: &BitMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.xor_assign(b);
        }
    }

    /// `M v`: the vector of row/`v` scalar products.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        ensure_dim(self.cols, v.len())?;
        let mut out = BitVec::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// `vᵀ M`: the XOR of the rows selected by `v`.
    pub fn vec_mul(&self, v: &BitVec) -> Result<BitVec> {
        ensure_dim(self.rows, v.len())?;
        let mut out = BitVec::zeros(self.cols);
        for i in v.iter_ones() {
            out.xor_assign(&self.data[i]);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        ensure_dim(self.cols, other.rows)?;
        let data = self
            .data
            .iter()
            .map(|r| other.vec_mul(r).expect("shapes agree"))
            .collect();
        Ok(BitMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Reduced row echelon form by Gaussian elimination.
    pub fn echelon(&self) -> Echelon {
        let mut rows = self.data.clone();
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..self.cols {
            if top == rows.len() {
                break;
            }
            let Some(p) = (top..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(top, p);
            let pivot_row = rows[top].clone();
            for (i, r) in rows.iter_mut().enumerate() {
                if i != top && r.get(col) {
                    r.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            top += 1;
        }
        rows.truncate(top);
        Echelon { rows, pivots }
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut rows = self.data.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == rows.len() {
                break;
            }
            let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            for r in tail.iter_mut() {
                if r.get(col) {
                    r.xor_assign(pivot_row);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Right kernel `{v : M v = 0}` as a subspace of GF(2)^cols.
    pub fn kernel_basis(&self) -> Subspace {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let basis = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::unit(self.cols, f);
                for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                    if row.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        Subspace::from_spanning(self.cols, basis).expect("kernel vectors have matching length")
    }

    /// Rank factorization `M = Σ_t u_t v_tᵀ` with exactly `rank(M)` terms and
    /// both families linearly independent.
    pub fn rank_factorization(&self) -> Vec<(BitVec, BitVec)> {
        let ech = self.echelon();
        ech.pivots
            .iter()
            .zip(ech.rows)
            .map(|(&p, v)| (self.column(p), v))
            .collect()
    }
}

/// One solution `c` of `G c = t`, with every free variable set to zero.
pub fn solve_linear(g: &BitMatrix, t: &BitVec) -> Result<Option<BitVec>> {
    ensure_dim(g.rows(), t.len())?;
    let cols = g.cols();
    let augmented = g
        .row_slice()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = BitVec::zeros(cols + 1);
            for j in row.iter_ones() {
                r.set(j, true);
            }
            r.set(cols, t.get(i));
            r
        })
        .collect();
    let ech = BitMatrix::from_rows(cols + 1, augmented)?.echelon();
    if ech.pivots.last() == Some(&cols) {
        return Ok(None);
    }
    let mut c = BitVec::zeros(cols);
    for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
        c.set(p, row.get(cols));
    }
    Ok(Some(c))
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// A linear subspace of GF(2)^n, stored by a basis in reduced row echelon
/// form. The representation is canonical, so equal subspaces compare equal.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: BitMatrix,
}

impl Subspace {
    pub fn full(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: BitMatrix::identity(n),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: BitMatrix::zeros(0, n),
        }
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn from_spanning(n: usize, vectors: Vec<BitVec>) -> Result<Self> {
        let m = BitMatrix::from_rows(n, vectors)?;
        let ech = m.echelon();
        Ok(Self {
            ambient_dim: n,
            basis: BitMatrix::from_rows(n, ech.rows)?,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim - self.dim()
    }

    /// Basis vectors as rows.
    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        self.coordinates(v).is_some()
    }

    /// Coordinates of `v` with respect to the stored basis, if `v` lies in the
    /// subspace.
    pub fn coordinates(&self, v: &BitVec) -> Option<BitVec> {
        let ech_pivots: Vec<usize> = self
            .basis
            .row_slice()
            .iter()
            .map(|r| r.first_one().expect("basis rows are nonzero"))
            .collect();
        let mut rest = v.clone();
        let mut coords = BitVec::zeros(self.dim());
        for (i, (row, &p)) in self.basis.row_slice().iter().zip(&ech_pivots).enumerate() {
            if rest.get(p) {
                rest.xor_assign(row);
                coords.set(i, true);
            }
        }
        rest.is_zero().then_some(coords)
    }

    /// The element `Σ c_i b_i` for coordinates `c`.
    pub fn combination(&self, coords: &BitVec) -> BitVec {
        self.basis.vec_mul(coords).expect("coordinate length equals dimension")
    }

    /// Iterates every element of the subspace. Only sensible for small dimension.
    pub fn elements(&self) -> impl Iterator<Item = BitVec> + '_ {
        let d = self.dim();
        assert!(d < 64, "subspace too large to enumerate");
        let basis = self.basis.row_slice();
        let mut current = BitVec::zeros(self.ambient_dim);
        let mut step: u64 = 0;
        let total = 1u64 << d;
        std::iter::from_fn(move || {
            if step == total {
                return None;
            }
            if step > 0 {
                // Gray code: flip the basis vector indexed by the lowest set bit.
                current.xor_assign(&basis[step.trailing_zeros() as usize]);
            }
            step += 1;
            Some(current.clone())
        })
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        self.combination(&BitVec::random(self.dim(), rng))
    }

    /// Random subspace of GF(2)^n of codimension exactly `codim`.
    pub fn random_with_codim<R: Rng + ?Sized>(n: usize, codim: usize, rng: &mut R) -> Self {
        assert!(codim <= n);
        loop {
            let constraints = (0..codim).map(|_| BitVec::random(n, rng)).collect::<Vec<_>>();
            let s = subspace_from_constraints(&constraints, &Subspace::full(n))
                .expect("lengths agree");
            if s.codim() == codim {
                return s;
            }
        }
    }

    /// Linear forms `f` (as vectors, `f(x) = ⟨f, x⟩`) restricted to this
    /// subspace, expressed in basis coordinates.
    pub fn restrict_functional(&self, f: &BitVec) -> BitVec {
        self.basis.mul_vec(f).expect("functional length equals ambient dimension")
    }

    /// Maps a subspace of the coordinate space GF(2)^dim back into the ambient
    /// space through this subspace's basis.
    pub fn pushforward(&self, inner: &Subspace) -> Result<Subspace> {
        ensure_dim(self.dim(), inner.ambient_dim())?;
        let vectors = inner
            .basis
            .row_slice()
            .iter()
            .map(|c| self.combination(c))
            .collect();
        Subspace::from_spanning(self.ambient_dim, vectors)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(ambient={}, dim={}, basis={:?})",
            self.ambient_dim,
            self.dim(),
            self.basis.row_slice()
        )
    }
}

/// `{x ∈ ambient : ⟨f, x⟩ = 0 for every f in forms}`.
pub fn subspace_from_constraints(forms: &[BitVec], ambient: &Subspace) -> Result<Subspace> {
    for f in forms {
        ensure_dim(ambient.ambient_dim(), f.len())?;
    }
    if forms.is_empty() {
        return Ok(ambient.clone());
    }
    let restricted = forms.iter().map(|f| ambient.restrict_functional(f)).collect();
    let g = BitMatrix::from_rows(ambient.dim(), restricted)?;
    ambient.pushforward(&g.kernel_basis())
}

/// Two-sided restriction `B M Bᵀ` of the bilinear form with matrix `M` to the
/// subspace whose basis rows form `B`. The result is indexed by basis
/// coordinates.
pub fn restrict_bilinear(m: &BitMatrix, s: &Subspace) -> Result<BitMatrix> {
    if !m.is_square() {
        return Err(Error::Malformed(format!(
            "bilinear restriction needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    ensure_dim(m.rows(), s.ambient_dim())?;
    let left = s.basis().mul(m)?;
    left.mul(&s.basis().transpose())
}

/// One-sided restriction `B M`: the left variable ranges over `s`, the right
/// variable over the whole space.
pub fn restrict_bilinear_left(m: &BitMatrix, s: &Subspace) -> Result<BitMatrix> {
    ensure_dim(m.rows(), s.ambient_dim())?;
    s.basis().mul(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn bitvec_tail_bits_stay_clear() {
        let v = BitVec::from_words(70, vec![u64::MAX, u64::MAX]);
        assert_eq!(v.count_ones(), 70);
        assert_eq!(v.words()[1], (1 << 6) - 1);
        let w = BitVec::from_u64(3, 0b1111_0101);
        assert_eq!(w.to_u64(), 0b101);
    }

    #[test]
    fn bitvec_packing_is_little_endian() {
        let v = BitVec::from_indices(130, &[0, 63, 64, 129]);
        assert_eq!(v.words(), &[1 | (1 << 63), 1, 1 << 1]);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(v.first_one(), Some(0));
        assert_eq!(format!("{}", BitVec::from_indices(5, &[1, 4])), "01001");
    }

    #[test]
    fn rank_identity_and_zero() {
        for n in [0, 1, 5, 64, 65, 130] {
            assert_eq!(BitMatrix::identity(n).rank(), n);
            assert_eq!(BitMatrix::zeros(n, n).rank(), 0);
        }
    }

    #[test]
    fn rank_matches_transpose() {
        let mut r = rng(1);
        for _ in 0..200 {
            let rows = r.gen_range(0..40);
            let cols = r.gen_range(0..40);
            let m = BitMatrix::random(rows, cols, &mut r);
            assert_eq!(m.rank(), m.transpose().rank());
            assert_eq!(m.rank(), m.echelon().pivots.len());
        }
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        let k = BitMatrix::identity(6).kernel_basis();
        assert_eq!(k.dim(), 0);
        assert_eq!(k.codim(), 6);
        let k = BitMatrix::zeros(6, 6).kernel_basis();
        assert_eq!(k, Subspace::full(6));
    }

    #[test]
    fn kernel_of_rank_one_matches_enumeration() {
        let e1 = BitVec::unit(3, 0);
        let m = BitMatrix::outer(&e1, &e1);
        let k = m.kernel_basis();
        assert_eq!(k.dim(), 2);
        let expected: Vec<BitVec> = (0..8u64)
            .map(|x| BitVec::from_u64(3, x))
            .filter(|x| m.mul_vec(x).unwrap().is_zero())
            .collect();
        assert_eq!(expected.len(), 4);
        for x in &expected {
            assert!(k.contains(x));
            assert!(!x.get(0));
        }
        assert_eq!(k.elements().count(), 4);
    }

    #[test]
    fn constraints_examples() {
        let full = Subspace::full(4);
        assert_eq!(subspace_from_constraints(&[], &full).unwrap(), full);
        let units: Vec<_> = (0..4).map(|i| BitVec::unit(4, i)).collect();
        assert_eq!(subspace_from_constraints(&units, &full).unwrap().dim(), 0);
        let dup = [BitVec::unit(4, 0), BitVec::unit(4, 0)];
        assert_eq!(subspace_from_constraints(&dup, &full).unwrap().codim(), 1);
        assert!(subspace_from_constraints(&[BitVec::zeros(3)], &full).is_err());
    }

    #[test]
    fn restrict_identity_to_coordinate_plane() {
        let id = BitMatrix::identity(4);
        let s = Subspace::from_spanning(4, vec![BitVec::unit(4, 0), BitVec::unit(4, 1)]).unwrap();
        assert_eq!(restrict_bilinear(&id, &s).unwrap(), BitMatrix::identity(2));
        assert_eq!(restrict_bilinear(&id, &Subspace::full(4)).unwrap(), id);
        assert!(restrict_bilinear(&id, &Subspace::full(3)).is_err());
        assert!(restrict_bilinear(&BitMatrix::zeros(2, 3), &Subspace::full(2)).is_err());
    }

    #[test]
    fn rank_factorization_reconstructs() {
        let mut r = rng(7);
        for _ in 0..100 {
            let n = r.gen_range(1..20);
            let m = BitMatrix::random(n, n, &mut r);
            let terms = m.rank_factorization();
            assert_eq!(terms.len(), m.rank());
            let mut acc = BitMatrix::zeros(n, n);
            for (u, v) in &terms {
                acc.add_assign(&BitMatrix::outer(u, v));
            }
            assert_eq!(acc, m);
        }
    }

    #[test]
    fn random_with_rank_has_that_rank() {
        let mut r = rng(3);
        for n in [1, 5, 17, 40] {
            for k in [0, n / 2, n] {
                assert_eq!(BitMatrix::random_with_rank(n, k, &mut r).rank(), k);
            }
        }
    }

    #[test]
    fn solve_linear_finds_solutions() {
        let mut r = rng(13);
        for _ in 0..100 {
            let g = BitMatrix::random(r.gen_range(1..12), r.gen_range(1..12), &mut r);
            let c = BitVec::random(g.cols(), &mut r);
            let t = g.mul_vec(&c).unwrap();
            let sol = solve_linear(&g, &t).unwrap().expect("consistent system");
            assert_eq!(g.mul_vec(&sol).unwrap(), t);
        }
        let g = BitMatrix::zeros(2, 3);
        assert!(solve_linear(&g, &BitVec::unit(2, 1)).unwrap().is_none());
    }

    #[test]
    fn coordinates_round_trip() {
        let mut r = rng(11);
        let s = Subspace::random_with_codim(20, 7, &mut r);
        assert_eq!(s.codim(), 7);
        for _ in 0..50 {
            let v = s.random_element(&mut r);
            let c = s.coordinates(&v).unwrap();
            assert_eq!(s.combination(&c), v);
        }
    }
}

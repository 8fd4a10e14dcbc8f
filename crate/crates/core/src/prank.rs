//! Partition rank certificates, exact bias and analytic rank, and an
//! exhaustive partition-rank oracle for tiny forms.
//!
//! A form has partition rank at most `m` when it is a sum of `m` products
//! `β(x_I) γ(x_{[k]∖I})` with `I` a proper nonempty set of slots. A
//! [`PartitionCertificate`] records such a sum; verifying it is an exact
//! coefficient comparison.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::forms::{enumerate_symmetric_forms, index_tuples, BilinearForm, MultilinearForm, SparseForm};
use crate::gf2::BitVec;

/// Default enumeration budget for exhaustive computations, as log2 of the
/// number of elementary evaluations.
pub const DEFAULT_BUDGET_LOG2: u32 = 30;

/// Largest coefficient count `n^k` the partition-rank table accepts.
pub const ORACLE_MAX_BITS: u32 = 20;

/// One product term `left(x_I) · right(x_{[k]∖I})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSummand {
    left_axes: Vec<usize>,
    left: MultilinearForm,
    right: MultilinearForm,
}

impl PartitionSummand {
    /// `left_axes` are 0-based slots, sorted and distinct; the right factor
    /// lives on the complementary slots in increasing order.
    pub fn new(left_axes: Vec<usize>, left: MultilinearForm, right: MultilinearForm) -> Result<Self> {
        if left_axes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed(format!(
                "summand axes {left_axes:?} must be sorted and distinct"
            )));
        }
        if left.arity() != left_axes.len() {
            return Err(Error::ArityMismatch {
                expected: left_axes.len(),
                found: left.arity(),
            });
        }
        ensure_dim(left.dim(), right.dim())?;
        let summand = Self {
            left_axes,
            left,
            right,
        };
        summand.check(summand.arity(), summand.left.dim())?;
        Ok(summand)
    }

    pub fn left_axes(&self) -> &[usize] {
        &self.left_axes
    }

    pub fn right_axes(&self) -> Vec<usize> {
        (0..self.arity()).filter(|a| !self.left_axes.contains(a)).collect()
    }

    pub fn left(&self) -> &MultilinearForm {
        &self.left
    }

    pub fn right(&self) -> &MultilinearForm {
        &self.right
    }

    pub fn arity(&self) -> usize {
        self.left.arity() + self.right.arity()
    }

    fn check(&self, arity: usize, dim: usize) -> Result<()> {
        if self.arity() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: self.arity(),
            });
        }
        ensure_dim(dim, self.left.dim())?;
        ensure_dim(dim, self.right.dim())?;
        if self.left_axes.is_empty() || self.left_axes.len() == arity {
            return Err(Error::Malformed(format!(
                "summand axes {:?} must be a proper nonempty subset of {arity} slots",
                self.left_axes
            )));
        }
        if self.left_axes.iter().any(|&a| a >= arity) {
            return Err(Error::Malformed(format!(
                "summand axes {:?} exceed arity {arity}",
                self.left_axes
            )));
        }
        Ok(())
    }

    /// The product as a k-linear form.
    pub fn to_form(&self) -> MultilinearForm {
        let k = self.arity();
        let right_axes = self.right_axes();
        let mut out = MultilinearForm::zero(k, self.left.dim());
        let right_monomials: Vec<Vec<usize>> = self.right.monomials().collect();
        let mut t = vec![0; k];
        for a in self.left.monomials() {
            for (&slot, &i) in self.left_axes.iter().zip(&a) {
                t[slot] = i;
            }
            for b in &right_monomials {
                for (&slot, &i) in right_axes.iter().zip(b) {
                    t[slot] = i;
                }
                out.flip(&t);
            }
        }
        out
    }
}

/// A list of product terms whose sum is claimed to equal a given form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCertificate {
    arity: usize,
    dim: usize,
    summands: Vec<PartitionSummand>,
}

impl PartitionCertificate {
    pub fn empty(arity: usize, dim: usize) -> Self {
        Self {
            arity,
            dim,
            summands: Vec::new(),
        }
    }

    pub fn new(arity: usize, dim: usize, summands: Vec<PartitionSummand>) -> Result<Self> {
        for s in &summands {
            s.check(arity, dim)?;
        }
        Ok(Self {
            arity,
            dim,
            summands,
        })
    }

    pub fn push(&mut self, summand: PartitionSummand) -> Result<()> {
        summand.check(self.arity, self.dim)?;
        self.summands.push(summand);
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn summands(&self) -> &[PartitionSummand] {
        &self.summands
    }

    /// The certified upper bound on partition rank.
    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Concatenation; the represented form is the sum.
    pub fn concat(&self, other: &PartitionCertificate) -> Result<Self> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        ensure_dim(self.dim, other.dim)?;
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        Ok(Self {
            arity: self.arity,
            dim: self.dim,
            summands,
        })
    }

    pub fn to_file(&self) -> CertificateFile {
        CertificateFile {
            arity: self.arity,
            dim: self.dim,
            summands: self
                .summands
                .iter()
                .map(|s| SummandFile {
                    axes: s.left_axes.iter().map(|a| a + 1).collect(),
                    left: s.left.to_sparse(),
                    right: s.right.to_sparse(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &CertificateFile) -> Result<Self> {
        let summands = file
            .summands
            .iter()
            .map(|s| {
                if s.axes.contains(&0) {
                    return Err(Error::Malformed("certificate axes are 1-based".into()));
                }
                PartitionSummand::new(
                    s.axes.iter().map(|a| a - 1).collect(),
                    MultilinearForm::from_sparse(&s.left)?,
                    MultilinearForm::from_sparse(&s.right)?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.arity, file.dim, summands)
    }
}

/// Serialized certificate: 1-based axes and sparse factor forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub arity: usize,
    pub dim: usize,
    pub summands: Vec<SummandFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandFile {
    pub axes: Vec<usize>,
    pub left: SparseForm,
    pub right: SparseForm,
}

impl CertificateFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `len` random summands, each on a random proper nonempty slot subset with
/// uniformly random factors.
pub fn random_certificate<R: Rng + ?Sized>(k: usize, n: usize, len: usize, rng: &mut R) -> PartitionCertificate {
    assert!(k >= 2, "a product needs two nonempty sides");
    let summands = (0..len)
        .map(|_| {
            let subset = rng.gen_range(1u32..(1 << k) - 1);
            let axes: Vec<usize> = (0..k).filter(|a| subset >> a & 1 == 1).collect();
            let left = MultilinearForm::random(axes.len(), n, rng);
            let right = MultilinearForm::random(k - axes.len(), n, rng);
            PartitionSummand::new(axes, left, right).expect("axes are sorted and proper")
        })
        .collect();
    PartitionCertificate::new(k, n, summands).expect("summands share the shape")
}

/// Sum of the certificate's products.
pub fn certificate_to_form(c: &PartitionCertificate) -> MultilinearForm {
    let mut out = MultilinearForm::zero(c.arity, c.dim);
    for s in &c.summands {
        out.add_assign_unchecked(&s.to_form());
    }
    out
}

/// True iff the certificate sums to `alpha`, witnessing
/// `prank(alpha) <= c.len()`.
pub fn verify_certificate(alpha: &MultilinearForm, c: &PartitionCertificate) -> Result<bool> {
    if alpha.arity() != c.arity {
        return Err(Error::ArityMismatch {
            expected: alpha.arity(),
            found: c.arity,
        });
    }
    ensure_dim(alpha.dim(), c.dim)?;
    Ok(certificate_to_form(c) == *alpha)
}

fn linear_form(v: &BitVec) -> MultilinearForm {
    MultilinearForm::from_flat_bits(1, v.len(), v).expect("length is the dimension")
}

/// Partition rank of a bilinear form, i.e. its matrix rank, together with a
/// certificate `Σ_t u_t(x) v_t(y)` of exactly that many terms.
pub fn bilinear_prank(beta: &BilinearForm) -> (usize, PartitionCertificate) {
    let n = beta.dim();
    let summands: Vec<PartitionSummand> = beta
        .matrix()
        .rank_factorization()
        .iter()
        .map(|(u, v)| PartitionSummand {
            left_axes: vec![0],
            left: linear_form(u),
            right: linear_form(v),
        })
        .collect();
    (
        summands.len(),
        PartitionCertificate {
            arity: 2,
            dim: n,
            summands,
        },
    )
}

/// A nonnegative dyadic rational `numerator / 2^exponent` in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    numerator: u64,
    exponent: u32,
}

impl Dyadic {
    pub fn new(numerator: u64, exponent: u32) -> Self {
        let shift = if numerator == 0 {
            exponent
        } else {
            numerator.trailing_zeros().min(exponent)
        };
        Self {
            numerator: if numerator == 0 { 0 } else { numerator >> shift },
            exponent: exponent - shift,
        }
    }

    /// `2^-e`.
    pub fn pow2_neg(e: u32) -> Self {
        Self::new(1, e)
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.exponent as i32)
    }

    /// `-log2` of the value; infinite at zero.
    pub fn neg_log2(&self) -> f64 {
        if self.numerator == 0 {
            f64::INFINITY
        } else {
            self.exponent as f64 - (self.numerator as f64).log2()
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = (self.numerator as u128) << (e - self.exponent);
        let b = (other.numerator as u128) << (e - other.exponent);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.numerator, self.exponent) {
            (num, 0) => write!(f, "{num}"),
            (1, e) => write!(f, "2^-{e}"),
            (num, e) => write!(f, "{num}/2^{e}"),
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

/// `E (-1)^{α(x₁,…,x_k)}` over all inputs, with the default budget.
pub fn bias(alpha: &MultilinearForm) -> Result<Dyadic> {
    bias_with_budget(alpha, DEFAULT_BUDGET_LOG2)
}

/// The bias equals the probability over `(x₁,…,x_{k-1})` that the linear
/// form `α(x₁,…,x_{k-1},·)` vanishes identically; that probability is
/// counted exactly.
pub fn bias_with_budget(alpha: &MultilinearForm, budget_log2: u32) -> Result<Dyadic> {
    let k = alpha.arity();
    if k == 0 {
        return Err(Error::Precondition(
            "bias of a constant is ±1; arity must be at least 1".into(),
        ));
    }
    let needed = ((k - 1) * alpha.dim()) as u32;
    if needed > budget_log2 || needed >= 64 {
        return Err(Error::BudgetExceeded {
            what: "bias enumeration",
            needed_log2: needed,
            budget_log2,
        });
    }
    Ok(Dyadic::new(count_vanishing_contractions(alpha), needed))
}

/// Number of `(x₁,…,x_{k-1})` with `α(x₁,…,x_{k-1},·) = 0`.
fn count_vanishing_contractions(alpha: &MultilinearForm) -> u64 {
    let n = alpha.dim();
    if alpha.arity() == 1 {
        return alpha.is_zero() as u64;
    }
    // Split the first variable into a parallel high part and a Gray-coded
    // low part.
    let high_bits = n.min(6);
    let low_bits = n - high_bits;
    (0u64..1 << high_bits)
        .into_par_iter()
        .map(|high| {
            let mut x = BitVec::zeros(n);
            for b in 0..high_bits {
                if high >> b & 1 == 1 {
                    x.set(low_bits + b, true);
                }
            }
            let mut contracted = alpha.contract_first(&x).expect("dimension matches");
            let mut total = count_vanishing_contractions(&contracted);
            for step in 1u64..1 << low_bits {
                alpha.add_leading_slice_to(step.trailing_zeros() as usize, &mut contracted);
                total += count_vanishing_contractions(&contracted);
            }
            total
        })
        .sum()
}

/// `-log2 bias(α)`; infinite when the bias vanishes (a nonzero linear form).
pub fn analytic_rank(alpha: &MultilinearForm) -> Result<f64> {
    Ok(bias(alpha)?.neg_log2())
}

/// Exact partition ranks of every k-linear form on GF(2)^n, by breadth-first
/// layering from the zero form with the set of all partition-rank-one forms
/// as steps.
///
/// Forms are encoded as `u32` masks of their flat row-major coefficient
/// strings, so the table needs `n^k <= 20`.
pub struct PrankTable {
    arity: usize,
    dim: usize,
    ranks: Vec<u8>,
    generator_count: usize,
}

const UNREACHED: u8 = u8::MAX;

impl PrankTable {
    pub fn build(arity: usize, dim: usize) -> Result<Self> {
        if arity < 2 {
            return Err(Error::Precondition(format!(
                "partition rank needs arity >= 2, got {arity}"
            )));
        }
        let bits = (dim as u64).checked_pow(arity as u32).unwrap_or(u64::MAX);
        if bits > ORACLE_MAX_BITS as u64 {
            return Err(Error::BudgetExceeded {
                what: "partition-rank table",
                needed_log2: bits.min(u32::MAX as u64) as u32,
                budget_log2: ORACLE_MAX_BITS,
            });
        }
        let generators = rank_one_generators(arity, dim);
        let mut ranks = vec![UNREACHED; 1usize << bits];
        ranks[0] = 0;
        let mut frontier = vec![0u32];
        let mut depth = 0u8;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for &f in &frontier {
                for &g in &generators {
                    let h = (f ^ g) as usize;
                    if ranks[h] == UNREACHED {
                        ranks[h] = depth;
                        next.push(h as u32);
                    }
                }
            }
            frontier = next;
        }
        Ok(Self {
            arity,
            dim,
            ranks,
            generator_count: generators.len(),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct nonzero partition-rank-one forms.
    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn prank(&self, alpha: &MultilinearForm) -> Result<u32> {
        if alpha.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: alpha.arity(),
            });
        }
        ensure_dim(self.dim, alpha.dim())?;
        let r = self.ranks[encode(alpha) as usize];
        debug_assert_ne!(r, UNREACHED, "every form has finite partition rank for k >= 2");
        Ok(r as u32)
    }

    /// Number of forms with each partition rank.
    pub fn histogram(&self) -> Vec<u64> {
        let max = self.ranks.iter().copied().filter(|&r| r != UNREACHED).max().unwrap_or(0);
        let mut h = vec![0; max as usize + 1];
        for &r in &self.ranks {
            if r != UNREACHED {
                h[r as usize] += 1;
            }
        }
        h
    }
}

fn encode(alpha: &MultilinearForm) -> u32 {
    let bits = alpha.to_flat_bits();
    if bits.is_empty() {
        0
    } else {
        bits.to_u64() as u32
    }
}

/// All nonzero products of a form on a proper nonempty slot set `I ∋ 0`
/// with a form on the complement, deduplicated, as flat masks.
fn rank_one_generators(arity: usize, dim: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for subset in 1u32..(1 << arity) - 1 {
        if subset & 1 == 0 {
            continue;
        }
        let left_axes: Vec<usize> = (0..arity).filter(|a| subset >> a & 1 == 1).collect();
        let right_axes: Vec<usize> = (0..arity).filter(|a| subset >> a & 1 == 0).collect();
        let left_bits = dim.pow(left_axes.len() as u32);
        let right_bits = dim.pow(right_axes.len() as u32);
        // merge[a][b] = flat position of the tuple with left part a, right part b.
        let mut merge = vec![vec![0u32; right_bits]; left_bits];
        for t in index_tuples(arity, dim) {
            let a = left_axes.iter().fold(0, |acc, &s| acc * dim + t[s]);
            let b = right_axes.iter().fold(0, |acc, &s| acc * dim + t[s]);
            merge[a][b] = t.iter().fold(0, |acc, &i| acc * dim + i) as u32;
        }
        for lmask in 1u32..1 << left_bits {
            for rmask in 1u32..1 << right_bits {
                let mut g = 0u32;
                for a in (0..left_bits).filter(|a| lmask >> a & 1 == 1) {
                    for b in (0..right_bits).filter(|b| rmask >> b & 1 == 1) {
                        g ^= 1 << merge[a][b];
                    }
                }
                out.push(g);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Exact partition rank by exhaustive layering.
///
/// Needs `n^k <= 20`; bilinear forms beyond that size fall back to matrix
/// rank, which is exact for `k = 2`.
pub fn exact_prank_oracle(alpha: &MultilinearForm) -> Result<u32> {
    match PrankTable::build(alpha.arity(), alpha.dim()) {
        Ok(table) => table.prank(alpha),
        Err(Error::BudgetExceeded { .. }) if alpha.arity() == 2 => {
            Ok(bilinear_prank(&BilinearForm::from_multilinear(alpha)?).0 as u32)
        }
        Err(e) => Err(e),
    }
}

/// Result of minimizing `prank(α + σ)` over symmetric `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricDistance {
    pub distance: u32,
    /// The first minimizing symmetric form in enumeration order.
    pub witness: MultilinearForm,
    pub candidates: u64,
}

/// `min_σ prank(α + σ)` over every symmetric σ of the same shape.
pub fn min_distance_to_symmetric(alpha: &MultilinearForm) -> Result<SymmetricDistance> {
    let table = PrankTable::build(alpha.arity(), alpha.dim())?;
    min_distance_with_table(alpha, &table)
}

pub fn min_distance_with_table(alpha: &MultilinearForm, table: &PrankTable) -> Result<SymmetricDistance> {
    let mut best: Option<(u32, MultilinearForm)> = None;
    let mut candidates = 0;
    for sigma in enumerate_symmetric_forms(alpha.dim(), alpha.arity())? {
        candidates += 1;
        let d = table.prank(&alpha.add(&sigma)?)?;
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, sigma));
        }
    }
    let (distance, witness) = best.expect("the zero form is always symmetric");
    Ok(SymmetricDistance {
        distance,
        witness,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rho_form(n: usize) -> MultilinearForm {
        BilinearForm::dot_product(n).to_multilinear()
    }

    fn rho_rho(axes: Vec<usize>, n: usize) -> PartitionSummand {
        PartitionSummand::new(axes, rho_form(n), rho_form(n)).unwrap()
    }

    /// Direct oracle: sum of (-1)^α over all 2^{kn} inputs.
    fn bias_direct(alpha: &MultilinearForm) -> Dyadic {
        let (k, n) = (alpha.arity(), alpha.dim());
        let total = 1u64 << (k * n);
        let mut plus = 0u64;
        for code in 0..total {
            let args: Vec<BitVec> = (0..k)
                .map(|s| BitVec::from_u64(n, (code >> (s * n)) & ((1 << n) - 1)))
                .collect();
            if !alpha.evaluate(&args).unwrap() {
                plus += 1;
            }
        }
        let minus = total - plus;
        assert!(plus >= minus);
        Dyadic::new(plus - minus, (k * n) as u32)
    }

    #[test]
    fn empty_certificate_is_zero() {
        let c = PartitionCertificate::empty(4, 3);
        assert!(certificate_to_form(&c).is_zero());
        assert!(verify_certificate(&MultilinearForm::zero(4, 3), &c).unwrap());
    }

    #[test]
    fn single_summand_unrolls() {
        let n = 3;
        let c = PartitionCertificate::new(4, n, vec![rho_rho(vec![0, 1], n)]).unwrap();
        let f = certificate_to_form(&c);
        let expected = MultilinearForm::from_fn(4, n, |t| t[0] == t[1] && t[2] == t[3]);
        assert_eq!(f, expected);
    }

    #[test]
    fn two_summand_identity_is_nonzero() {
        let n = 2;
        let c = PartitionCertificate::new(4, n, vec![rho_rho(vec![0, 1], n), rho_rho(vec![0, 2], n)])
            .unwrap();
        let f = certificate_to_form(&c);
        let e = |i| BitVec::unit(n, i);
        assert!(f.evaluate(&[e(0), e(0), e(1), e(1)]).unwrap());
        assert!(!verify_certificate(&f, &PartitionCertificate::empty(4, n)).unwrap());
        assert!(verify_certificate(&f, &c).unwrap());
    }

    #[test]
    fn malformed_summands_rejected() {
        let n = 2;
        assert!(PartitionSummand::new(vec![], MultilinearForm::zero(0, n), rho_form(n)).is_err());
        assert!(PartitionSummand::new(vec![1, 0], rho_form(n), rho_form(n)).is_err());
        assert!(PartitionSummand::new(vec![0], rho_form(n), rho_form(n)).is_err());
        assert!(PartitionSummand::new(vec![0, 1], rho_form(n), rho_form(3)).is_err());
        assert!(PartitionCertificate::new(3, n, vec![rho_rho(vec![0, 1], n)]).is_err());
        let c = PartitionCertificate::empty(4, n);
        assert!(verify_certificate(&MultilinearForm::zero(3, n), &c).is_err());
    }

    #[test]
    fn certificate_concat_adds_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let a = random_certificate(4, 3, 2, &mut rng);
        let b = random_certificate(4, 3, 3, &mut rng);
        let sum = certificate_to_form(&a).add(&certificate_to_form(&b)).unwrap();
        assert_eq!(certificate_to_form(&a.concat(&b).unwrap()), sum);
    }

    #[test]
    fn certificate_file_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let c = random_certificate(4, 2, 3, &mut rng);
        let text = c.to_file().to_json();
        let back = PartitionCertificate::from_file(&CertificateFile::from_json(&text).unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_file().to_json(), text);
    }

    #[test]
    fn bilinear_prank_examples() {
        for n in [1, 4, 9] {
            let (r, c) = bilinear_prank(&BilinearForm::dot_product(n));
            assert_eq!(r, n);
            assert!(verify_certificate(&rho_form(n), &c).unwrap());
        }
        assert_eq!(bilinear_prank(&BilinearForm::zero(5)).0, 0);
        let u = BitVec::from_indices(4, &[0, 2]);
        let v = BitVec::from_indices(4, &[1]);
        let (r, c) = bilinear_prank(&BilinearForm::product(&u, &v).unwrap());
        assert_eq!(r, 1);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn dyadic_normalizes_and_orders() {
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(0, 7), Dyadic::new(0, 0));
        assert_eq!(Dyadic::pow2_neg(3).to_string(), "2^-3");
        assert_eq!(Dyadic::new(3, 4).to_string(), "3/2^4");
        assert_eq!(Dyadic::new(1, 0).to_string(), "1");
        assert!(Dyadic::new(3, 4) < Dyadic::new(1, 2));
        assert_eq!(Dyadic::new(12, 4).neg_log2(), 2.0 - 3f64.log2() + 2.0 - 2.0);
    }

    #[test]
    fn bias_examples() {
        assert_eq!(bias(&MultilinearForm::zero(4, 3)).unwrap(), Dyadic::new(1, 0));
        for n in 1..=8 {
            assert_eq!(bias(&rho_form(n)).unwrap(), Dyadic::pow2_neg(n as u32));
        }
        assert_eq!(analytic_rank(&rho_form(5)).unwrap(), 5.0);
        assert_eq!(analytic_rank(&MultilinearForm::zero(3, 3)).unwrap(), 0.0);
        assert!(bias(&MultilinearForm::zero(0, 3)).is_err());
        assert!(matches!(
            bias_with_budget(&MultilinearForm::zero(4, 11), 30),
            Err(Error::BudgetExceeded { .. })
        ));
        let lin = MultilinearForm::from_flat_bits(1, 3, &BitVec::unit(3, 1)).unwrap();
        assert!(bias(&lin).unwrap().is_zero());
        assert_eq!(analytic_rank(&lin).unwrap(), f64::INFINITY);
    }

    #[test]
    fn bias_matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (k, n) in [(1, 4), (2, 3), (2, 8), (3, 2), (3, 5), (4, 2), (4, 3)] {
            for _ in 0..6 {
                let f = MultilinearForm::random(k, n, &mut rng);
                assert_eq!(bias(&f).unwrap(), bias_direct(&f), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn oracle_matches_matrix_rank_small() {
        for n in [1, 2] {
            for code in 0u64..1 << (n * n) {
                let f = MultilinearForm::from_flat_bits(2, n, &BitVec::from_u64(n * n, code)).unwrap();
                let b = BilinearForm::from_multilinear(&f).unwrap();
                assert_eq!(exact_prank_oracle(&f).unwrap() as usize, b.rank());
            }
        }
    }

    #[test]
    fn oracle_falls_back_for_large_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let m = BitMatrix::random_with_rank(10, 6, &mut rng);
        let f = BilinearForm::new(m).unwrap().to_multilinear();
        assert_eq!(exact_prank_oracle(&f).unwrap(), 6);
        assert!(matches!(
            exact_prank_oracle(&MultilinearForm::zero(3, 3)),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(exact_prank_oracle(&MultilinearForm::zero(1, 3)).is_err());
    }

    #[test]
    fn trilinear_table_is_subadditive() {
        let table = PrankTable::build(3, 2).unwrap();
        let forms: Vec<MultilinearForm> = (0u64..256)
            .map(|c| MultilinearForm::from_flat_bits(3, 2, &BitVec::from_u64(8, c)).unwrap())
            .collect();
        let ranks: Vec<u32> = forms.iter().map(|f| table.prank(f).unwrap()).collect();
        assert!(ranks.iter().all(|&r| r <= 2), "slice rank bound n = 2");
        for (a, ra) in forms.iter().zip(&ranks) {
            for (b, rb) in forms.iter().zip(&ranks) {
                assert!(table.prank(&a.add(b).unwrap()).unwrap() <= ra + rb);
            }
        }
    }

    #[test]
    fn symmetric_input_has_distance_zero() {
        let table = PrankTable::build(4, 2).unwrap();
        for sigma in enumerate_symmetric_forms(2, 4).unwrap() {
            let d = min_distance_with_table(&sigma, &table).unwrap();
            assert_eq!(d.distance, 0);
            assert_eq!(d.witness, sigma);
            assert_eq!(d.candidates, 32);
        }
    }

    #[test]
    fn one_summand_off_symmetric_is_within_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let table = PrankTable::build(4, 2).unwrap();
        let sigmas: Vec<_> = enumerate_symmetric_forms(2, 4).unwrap().collect();
        for _ in 0..20 {
            let sigma = &sigmas[rng.gen_range(0..sigmas.len())];
            let c = random_certificate(4, 2, 1, &mut rng);
            let alpha = sigma.add(&certificate_to_form(&c)).unwrap();
            assert!(min_distance_with_table(&alpha, &table).unwrap().distance <= 1);
        }
    }
}

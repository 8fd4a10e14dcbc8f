//! The 4-linear form φ, the dot product ρ, and machine checks that φ is
//! 3-approximately symmetric.
//!
//! φ(x,y,z,w) = Σ_{i<j} (x_i y_j z_j w_i + x_j y_i z_j w_i + x_j y_j z_i w_i).
//! It is fixed by the transpositions (1 2) and (1 3), while
//! φ + φ∘(1 4) = ρ(x,y)ρ(z,w) + ρ(x,z)ρ(y,w). Every φ + φ∘π therefore lies in
//! the space V spanned by the three ρ⊗ρ pairings, so it has partition rank at
//! most 3.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{BilinearForm, MultilinearForm, Permutation};
use crate::prank::{verify_certificate, PartitionCertificate, PartitionSummand};

/// Largest `n` accepted by [`verify_transposition_identities`].
pub const IDENTITY_MAX_DIM: usize = 128;

pub fn build_phi(n: usize) -> MultilinearForm {
    let mut phi = MultilinearForm::zero(4, n);
    for j in 0..n {
        for i in 0..j {
            phi.set(&[i, j, j, i], true);
            phi.set(&[j, i, j, i], true);
            phi.set(&[j, j, i, i], true);
        }
    }
    phi
}

pub fn build_rho(n: usize) -> BilinearForm {
    BilinearForm::dot_product(n)
}

/// Exact tensor-level outcome of the three transposition identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranspositionReport {
    pub n: usize,
    /// φ + φ∘(1 2) = 0.
    pub swap_12: bool,
    /// φ + φ∘(1 3) = 0.
    pub swap_13: bool,
    /// φ + φ∘(1 4) = ρ(x,y)ρ(z,w) + ρ(x,z)ρ(y,w).
    pub swap_14: bool,
}

impl TranspositionReport {
    pub fn passed(&self) -> bool {
        self.swap_12 && self.swap_13 && self.swap_14
    }
}

pub fn verify_transposition_identities(n: usize) -> Result<TranspositionReport> {
    if n == 0 || n > IDENTITY_MAX_DIM {
        return Err(Error::Precondition(format!(
            "dimension {n} outside 1..={IDENTITY_MAX_DIM}"
        )));
    }
    let phi = build_phi(n);
    let defect = |b: usize| -> Result<MultilinearForm> {
        phi.add(&phi.permute(&Permutation::transposition(4, 0, b))?)
    };
    let rhs = VSpaceElement::new(true, true, false).to_certificate(n);
    Ok(TranspositionReport {
        n,
        swap_12: defect(1)?.is_zero(),
        swap_13: defect(2)?.is_zero(),
        swap_14: verify_certificate(&defect(3)?, &rhs)?,
    })
}

/// `λ₁ ρ(x,y)ρ(z,w) + λ₂ ρ(x,z)ρ(y,w) + λ₃ ρ(x,w)ρ(y,z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VSpaceElement {
    pub lambda1: bool,
    pub lambda2: bool,
    pub lambda3: bool,
}

impl VSpaceElement {
    pub const ZERO: Self = Self::new(false, false, false);

    pub const fn new(lambda1: bool, lambda2: bool, lambda3: bool) -> Self {
        Self {
            lambda1,
            lambda2,
            lambda3,
        }
    }

    fn from_bits(bits: u8) -> Self {
        Self::new(bits & 1 != 0, bits & 2 != 0, bits & 4 != 0)
    }

    fn bits(self) -> u8 {
        self.lambda1 as u8 | (self.lambda2 as u8) << 1 | (self.lambda3 as u8) << 2
    }

    pub fn coefficients(self) -> [bool; 3] {
        [self.lambda1, self.lambda2, self.lambda3]
    }

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    pub fn add(self, other: Self) -> Self {
        Self::from_bits(self.bits() ^ other.bits())
    }

    /// The element realizing `(this form)∘σ`.
    ///
    /// Basis product `p` pairs slot 0 with slot `p + 1`. Precomposing with σ
    /// sends a pairing `{a,b | c,d}` to `{σ⁻¹a,σ⁻¹b | σ⁻¹c,σ⁻¹d}`.
    pub fn act(self, sigma: &Permutation) -> Self {
        assert_eq!(sigma.degree(), 4, "V lives in arity 4");
        let inv = sigma.inverse();
        let mut out = 0u8;
        for (p, on) in self.coefficients().into_iter().enumerate() {
            if !on {
                continue;
            }
            let (a, b) = (inv.apply(0), inv.apply(p + 1));
            let partner = if a == 0 {
                b
            } else if b == 0 {
                a
            } else {
                (1..4).find(|&q| q != a && q != b).expect("four slots")
            };
            out ^= 1 << (partner - 1);
        }
        Self::from_bits(out)
    }

    /// The lexicographically least triple realizing the same form at
    /// dimension `n`. Only `n = 1` has coinciding basis products.
    pub fn canonical(self, n: usize) -> Self {
        if n == 1 {
            let parity = self.bits().count_ones() % 2 == 1;
            Self::new(false, false, parity)
        } else {
            self
        }
    }

    /// One summand per nonzero coefficient, with left axes `{1,2}`, `{1,3}`,
    /// `{1,4}` in that order.
    pub fn to_certificate(self, n: usize) -> PartitionCertificate {
        let rho = build_rho(n).to_multilinear();
        let summands = self
            .coefficients()
            .into_iter()
            .enumerate()
            .filter(|&(_, on)| on)
            .map(|(p, _)| {
                PartitionSummand::new(vec![0, p + 1], rho.clone(), rho.clone())
                    .expect("two slots of ρ on each side")
            })
            .collect();
        PartitionCertificate::new(4, n, summands).expect("summands have arity 4")
    }

    pub fn to_form(self, n: usize) -> MultilinearForm {
        crate::prank::certificate_to_form(&self.to_certificate(n))
    }

    /// All eight elements in increasing coefficient order.
    pub fn all() -> impl Iterator<Item = Self> {
        (0u8..8).map(Self::from_bits)
    }
}

impl fmt::Display for VSpaceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.coefficients().map(u8::from);
        write!(f, "({a},{b},{c})")
    }
}

/// The generators `(1 2)`, `(1 3)`, `(1 4)` of Sym₄.
pub fn generators() -> [Permutation; 3] {
    [1, 2, 3].map(|b| Permutation::transposition(4, 0, b))
}

/// `φ + φ∘τ` for each generator τ.
pub fn generator_elements() -> [VSpaceElement; 3] {
    [
        VSpaceElement::ZERO,
        VSpaceElement::ZERO,
        VSpaceElement::new(true, true, false),
    ]
}

/// A shortest generator word for π together with `φ + φ∘π` in V.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorWord {
    pub permutation: Permutation,
    /// Indices into [`generators`]; π is the composite `τ_1 ∘ … ∘ τ_r`.
    pub word: Vec<usize>,
    pub element: VSpaceElement,
}

/// Shortest words for all 24 permutations, in the order of
/// [`Permutation::all`].
///
/// Found by breadth-first search that extends words on the right, trying
/// generators in order, so each word is the first shortest one in that
/// order. Along the way `v(p∘τ) = v(p)∘τ + v(τ)`, which unrolls to
/// `v(π) = Σ_i v(τ_i)∘τ_{i+1}∘…∘τ_r`.
pub fn generator_word_table() -> Vec<GeneratorWord> {
    let gens = generators();
    let gen_v = generator_elements();
    let id = Permutation::identity(4);
    let mut found: Vec<GeneratorWord> = vec![GeneratorWord {
        permutation: id,
        word: Vec::new(),
        element: VSpaceElement::ZERO,
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        for (g, tau) in gens.iter().enumerate() {
            let next = found[idx].permutation.compose(tau);
            if found.iter().any(|w| w.permutation == next) {
                continue;
            }
            let mut word = found[idx].word.clone();
            word.push(g);
            let element = found[idx].element.act(tau).add(gen_v[g]);
            found.push(GeneratorWord {
                permutation: next,
                word,
                element,
            });
            queue.push_back(found.len() - 1);
        }
    }
    Permutation::all(4)
        .into_iter()
        .map(|p| {
            found
                .iter()
                .find(|w| w.permutation == p)
                .expect("the generators span Sym4")
                .clone()
        })
        .collect()
}

/// The approximate-symmetry certificate for one permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryCertificate {
    pub permutation: Permutation,
    pub word: Vec<usize>,
    pub element: VSpaceElement,
    /// A partition-rank decomposition of `φ + φ∘π`.
    pub certificate: PartitionCertificate,
}

/// Certificates that `prank(φ + φ∘π) ≤ 3` for all 24 permutations, each
/// checked against the tensor of `φ + φ∘π` before being returned.
pub fn approx_symmetry_certificates(n: usize) -> Result<Vec<SymmetryCertificate>> {
    if n == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    let phi = build_phi(n);
    generator_word_table()
        .into_par_iter()
        .map(|entry| {
            let element = entry.element.canonical(n);
            let certificate = element.to_certificate(n);
            let defect = phi.add(&phi.permute(&entry.permutation)?)?;
            if !verify_certificate(&defect, &certificate)? {
                return Err(Error::Verification(format!(
                    "certificate {element} does not decompose φ + φ∘{}",
                    entry.permutation
                )));
            }
            Ok(SymmetryCertificate {
                permutation: entry.permutation,
                word: entry.word,
                element,
                certificate,
            })
        })
        .collect()
}

/// The coefficient triple of `alpha` if it lies in V. At `n = 1` the
/// canonical representative is returned.
pub fn v_space_membership(alpha: &MultilinearForm) -> Result<Option<VSpaceElement>> {
    if alpha.arity() != 4 {
        return Err(Error::ArityMismatch {
            expected: 4,
            found: alpha.arity(),
        });
    }
    let n = alpha.dim();
    Ok(VSpaceElement::all().find(|v| v.to_form(n) == *alpha).map(|v| v.canonical(n)))
}

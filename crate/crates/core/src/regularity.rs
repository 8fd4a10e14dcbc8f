//! Bilinear regularity: vanishing subspaces for low-rank forms, the
//! regularization algorithm, the exhaustive counting check and the
//! prescribed-value quadruple solver.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_dim, Error, Result};
use crate::forms::BilinearForm;
use crate::gf2::{solve_linear, subspace_from_constraints, BitMatrix, BitVec, Subspace};

/// Largest `|C|²` (as log2) that [`counting_check`] will enumerate.
pub const COUNTING_BUDGET_LOG2: u32 = 30;

/// Subspace `S` of codimension at most `rank β` with `β(x, y) = 0` for all
/// `x ∈ S` and all `y`.
pub fn low_rank_vanishing_subspace(beta: &BilinearForm) -> Subspace {
    // β(x, y) = (Mᵀ x) · y, so S is the kernel of Mᵀ.
    beta.matrix().transpose().kernel_basis()
}

fn combination(forms: &[&BitMatrix], mask: u64, dim: usize) -> BitMatrix {
    let mut acc = BitMatrix::zeros(dim, dim);
    for (i, f) in forms.iter().enumerate() {
        if mask >> i & 1 == 1 {
            acc.add_assign(f);
        }
    }
    acc
}

/// Minimum rank over all nonzero linear combinations of `forms`, or `None`
/// when the list is empty.
pub fn min_combination_rank(forms: &[BilinearForm]) -> Option<usize> {
    let dim = forms.first()?.dim();
    let mats: Vec<&BitMatrix> = forms.iter().map(BilinearForm::matrix).collect();
    (1u64..1 << forms.len())
        .into_par_iter()
        .map(|mask| combination(&mats, mask, dim).rank())
        .min()
}

/// How one input form is recovered on the final subspace:
/// `β_i = Σ_j alpha_coeffs[j] α_j + rho_coeff ρ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expression {
    pub alpha_coeffs: Vec<bool>,
    pub rho_coeff: bool,
}

/// One elimination step of the regularizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityStep {
    /// Input index of the form removed in this step.
    pub dropped_input: usize,
    /// Input indices (with coefficient 1) of the other forms in the
    /// low-rank combination.
    pub relation_inputs: Vec<usize>,
    pub relation_rho: bool,
    /// Rank of the low-rank combination, i.e. the number of product terms cut.
    pub combination_rank: usize,
    pub codim_after: usize,
}

/// Output of [`bilinear_regularize`].
#[derive(Clone, Debug)]
pub struct RegularityResult {
    /// The subspace `U'`.
    pub subspace: Subspace,
    /// `α_1..α_s` in the basis coordinates of `U'`.
    pub independent_forms: Vec<BilinearForm>,
    /// Input index each `α_j` was taken from.
    pub kept_inputs: Vec<usize>,
    /// `ρ` restricted to `U'`.
    pub rho_restricted: BilinearForm,
    /// One expression per input form.
    pub expressions: Vec<Expression>,
    pub min_rank_target: usize,
    /// Whether `rank ρ ≥ (4r + 1)m`. Below that bound the loop still runs,
    /// but ρ may lose too much rank, which is reported as an error.
    pub rank_hypothesis_holds: bool,
    pub steps: Vec<RegularityStep>,
}

/// Passes to a subspace `U'` of codimension at most `2 r m` on which every
/// nonzero combination of the surviving forms and `ρ` has rank at least `m`,
/// while each input is a combination of survivors and `ρ`.
///
/// Each round scans all nonzero combinations `λ·α + μρ` on the current
/// subspace in increasing mask order (bit `j` for `α_j`, the top bit for
/// `ρ`). The first one of rank below `m` is split by rank factorization into
/// fewer than `m` products `u_t(x) v_t(y)`; the subspace is cut by all
/// `u_t = v_t = 0`, and the highest-indexed `α` with nonzero coefficient is
/// dropped.
///
/// The rank bound on `ρ` that guarantees success is reported, not required.
/// If `ρ` alone falls below rank `m` on the current subspace, the call fails
/// with [`Error::Verification`].
pub fn bilinear_regularize(
    rho: &BilinearForm,
    betas: &[BilinearForm],
    m: usize,
) -> Result<RegularityResult> {
    let n = rho.dim();
    for b in betas {
        ensure_dim(n, b.dim())?;
    }
    if m == 0 {
        return Err(Error::Precondition("rank target m must be at least 1".into()));
    }
    let r = betas.len();
    if r >= 63 {
        return Err(Error::Precondition(format!("too many forms ({r}) to enumerate combinations")));
    }
    let rank_hypothesis_holds = rho.rank() >= (4 * r + 1) * m;

    let mut space = Subspace::full(n);
    let mut alive: Vec<usize> = (0..r).collect();
    // Coefficients over input indices; only alive indices are ever set.
    let mut exprs: Vec<(Vec<bool>, bool)> = (0..r)
        .map(|i| {
            let mut c = vec![false; r];
            c[i] = true;
            (c, false)
        })
        .collect();
    let mut steps = Vec::new();

    loop {
        let d = space.dim();
        let rho_r = rho.restrict(&space)?;
        let alphas_r = alive
            .iter()
            .map(|&i| betas[i].restrict(&space))
            .collect::<Result<Vec<_>>>()?;
        let s = alive.len();
        let mut mats: Vec<&BitMatrix> = alphas_r.iter().map(BilinearForm::matrix).collect();
        mats.push(rho_r.matrix());
        let low = (1u64..1 << (s + 1))
            .into_par_iter()
            .map(|mask| (mask, combination(&mats, mask, d)))
            .find_first(|(_, c)| c.rank() < m);
        let Some((mask, comb)) = low else {
            break;
        };
        let lambda = mask & ((1 << s) - 1);
        let mu = mask >> s & 1 == 1;
        if lambda == 0 {
            return Err(Error::Verification(format!(
                "ρ restricted to a subspace of codimension {} has rank below {m}",
                space.codim()
            )));
        }
        let p = 63 - lambda.leading_zeros() as usize;
        let factors = comb.rank_factorization();
        let constraints: Vec<BitVec> = factors
            .iter()
            .flat_map(|(u, v)| [u.clone(), v.clone()])
            .collect();
        let inner = subspace_from_constraints(&constraints, &Subspace::full(d))?;
        space = space.pushforward(&inner)?;

        let dropped = alive[p];
        let others: Vec<usize> = (0..s)
            .filter(|&j| j != p && lambda >> j & 1 == 1)
            .map(|j| alive[j])
            .collect();
        for (coeffs, rho_c) in exprs.iter_mut() {
            if coeffs[dropped] {
                coeffs[dropped] = false;
                for &o in &others {
                    coeffs[o] ^= true;
                }
                *rho_c ^= mu;
            }
        }
        alive.remove(p);
        steps.push(RegularityStep {
            dropped_input: dropped,
            relation_inputs: others,
            relation_rho: mu,
            combination_rank: factors.len(),
            codim_after: space.codim(),
        });
    }

    let independent_forms = alive
        .iter()
        .map(|&i| betas[i].restrict(&space))
        .collect::<Result<Vec<_>>>()?;
    let expressions = exprs
        .into_iter()
        .map(|(coeffs, rho_coeff)| Expression {
            alpha_coeffs: alive.iter().map(|&i| coeffs[i]).collect(),
            rho_coeff,
        })
        .collect();
    Ok(RegularityResult {
        rho_restricted: rho.restrict(&space)?,
        subspace: space,
        independent_forms,
        kept_inputs: alive,
        expressions,
        min_rank_target: m,
        rank_hypothesis_holds,
        steps,
    })
}

/// Independent check of every postcondition of a regularization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityAudit {
    pub inputs: usize,
    pub survivors: usize,
    pub codim: usize,
    pub codim_bound: usize,
    /// Minimum rank over nonzero combinations of survivors and restricted ρ.
    pub min_combination_rank: Option<usize>,
    pub survivors_le_inputs: bool,
    pub codim_within_bound: bool,
    pub combinations_regular: bool,
    pub expressions_exact: bool,
}

impl RegularityAudit {
    pub fn passed(&self) -> bool {
        self.survivors_le_inputs
            && self.codim_within_bound
            && self.combinations_regular
            && self.expressions_exact
    }
}

impl RegularityResult {
    pub fn audit(&self, rho: &BilinearForm, betas: &[BilinearForm]) -> Result<RegularityAudit> {
        let r = betas.len();
        let m = self.min_rank_target;
        let rho_r = rho.restrict(&self.subspace)?;
        let mut family = self.independent_forms.clone();
        family.push(rho_r.clone());
        let min_rank = min_combination_rank(&family);
        let mut expressions_exact = self.expressions.len() == r && rho_r == self.rho_restricted;
        for (beta, expr) in betas.iter().zip(&self.expressions) {
            let target = beta.restrict(&self.subspace)?;
            let mut acc = BitMatrix::zeros(self.subspace.dim(), self.subspace.dim());
            for (alpha, &c) in self.independent_forms.iter().zip(&expr.alpha_coeffs) {
                if c {
                    acc.add_assign(alpha.matrix());
                }
            }
            if expr.rho_coeff {
                acc.add_assign(rho_r.matrix());
            }
            expressions_exact &= expr.alpha_coeffs.len() == self.independent_forms.len()
                && acc == *target.matrix();
        }
        Ok(RegularityAudit {
            inputs: r,
            survivors: self.independent_forms.len(),
            codim: self.subspace.codim(),
            codim_bound: 2 * r * m,
            min_combination_rank: min_rank,
            survivors_le_inputs: self.independent_forms.len() <= r,
            codim_within_bound: self.subspace.codim() <= 2 * r * m,
            combinations_regular: min_rank.is_none_or(|x| x >= m),
            expressions_exact,
        })
    }
}

/// A coset `shift + S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    pub subspace: Subspace,
    pub shift: BitVec,
}

impl Coset {
    pub fn new(subspace: Subspace, shift: BitVec) -> Result<Self> {
        ensure_dim(subspace.ambient_dim(), shift.len())?;
        Ok(Self { subspace, shift })
    }

    pub fn full(n: usize) -> Self {
        Self {
            subspace: Subspace::full(n),
            shift: BitVec::zeros(n),
        }
    }

    pub fn codim(&self) -> usize {
        self.subspace.codim()
    }

    pub fn size_log2(&self) -> usize {
        self.subspace.dim()
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.subspace.contains(&v.xor(&self.shift))
    }
}

/// Exact value distribution of `(α_1(x,y),…,α_r(x,y))` over `C × C`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountingReport {
    pub forms: usize,
    pub codim: usize,
    pub coset_size: u64,
    /// `value_counts[v]` counts pairs with value vector `v`, bit `i` of `v`
    /// being `α_{i+1}(x, y)`.
    pub value_counts: Vec<u64>,
    pub epsilon: f64,
    /// Smallest `ε` with every count at least `(1 - ε) 2^{-r} |C|²`.
    pub epsilon_achieved: f64,
    pub surjective: bool,
    /// Every count is at least `(1 - epsilon) 2^{-r} |C|²`.
    pub conclusion_holds: bool,
    /// Minimum rank of `λ·α` over nonzero `λ`, on the whole space.
    pub min_combination_rank: Option<usize>,
    /// `m > 4r + 8d + 4 log2(1/ε)`.
    pub hypothesis_holds: bool,
}

impl CountingReport {
    pub fn count(&self, value: u64) -> u64 {
        self.value_counts[value as usize]
    }
}

/// Counts every pair `(x, y) ∈ C × C` by its value vector and checks the
/// near-uniform distribution bound at `epsilon`.
pub fn counting_check(alphas: &[BilinearForm], coset: &Coset, epsilon: f64) -> Result<CountingReport> {
    counting_check_with_budget(alphas, coset, epsilon, COUNTING_BUDGET_LOG2)
}

/// [`counting_check`] with an explicit cap of `2^budget_log2` pairs.
pub fn counting_check_with_budget(
    alphas: &[BilinearForm],
    coset: &Coset,
    epsilon: f64,
    budget_log2: u32,
) -> Result<CountingReport> {
    let n = coset.subspace.ambient_dim();
    for a in alphas {
        ensure_dim(n, a.dim())?;
    }
    if !(epsilon > 0.0) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    let r = alphas.len();
    if r > 20 {
        return Err(Error::Precondition(format!("{r} forms is too many value vectors to tabulate")));
    }
    let d = coset.size_log2();
    let needed = 2 * d as u32;
    if needed > budget_log2 {
        return Err(Error::BudgetExceeded {
            what: "counting enumeration",
            needed_log2: needed,
            budget_log2,
        });
    }
    let basis = coset.subspace.basis().row_slice();
    let size = 1u64 << d;
    let mut counts = (0..size)
        .into_par_iter()
        .fold(
            || vec![0u64; 1 << r],
            |mut acc, idx| {
                let x = coset.shift.xor(&coset.subspace.combination(&BitVec::from_u64(d, idx)));
                let linear: Vec<BitVec> = alphas.iter().map(|a| a.left_apply(&x)).collect();
                let value_at = |y: &BitVec| {
                    linear
                        .iter()
                        .enumerate()
                        .fold(0usize, |v, (i, l)| v | (l.dot(y) as usize) << i)
                };
                let deltas: Vec<usize> = basis.iter().map(value_at).collect();
                let mut value = value_at(&coset.shift);
                acc[value] += 1;
                for step in 1u64..size {
                    value ^= deltas[step.trailing_zeros() as usize];
                    acc[value] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; 1 << r],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    counts.shrink_to_fit();

    let total = (size as f64) * (size as f64);
    let uniform = total / (1u64 << r) as f64;
    let min_count = *counts.iter().min().expect("at least one value vector");
    let epsilon_achieved = 1.0 - min_count as f64 / uniform;
    let threshold = (1.0 - epsilon) * uniform;
    let min_rank = min_combination_rank(alphas);
    let bound = 4.0 * r as f64 + 8.0 * coset.codim() as f64 + 4.0 * (1.0 / epsilon).log2();
    Ok(CountingReport {
        forms: r,
        codim: coset.codim(),
        coset_size: size,
        surjective: counts.iter().all(|&c| c > 0),
        conclusion_holds: counts.iter().all(|&c| c as f64 >= threshold),
        value_counts: counts,
        epsilon,
        epsilon_achieved,
        hypothesis_holds: min_rank.is_none_or(|m| m as f64 > bound),
        min_combination_rank: min_rank,
    })
}

/// The four variables of a prescribed quadruple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Var {
    X,
    Y,
    Z,
    W,
}

impl Var {
    const ALL: [Var; 4] = [Var::X, Var::Y, Var::Z, Var::W];

    fn index(self) -> usize {
        self as usize
    }
}

/// Required values at one ordered pair of variables: `target` has one bit
/// per `α_i` followed by one bit for `ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPrescription {
    pub first: Var,
    pub second: Var,
    pub target: BitVec,
}

impl PairPrescription {
    pub fn new(first: Var, second: Var, target: BitVec) -> Self {
        Self {
            first,
            second,
            target,
        }
    }

    fn unordered(&self) -> (Var, Var) {
        (self.first.min(self.second), self.first.max(self.second))
    }
}

/// A rank threshold under which the solver is guaranteed to succeed, evaluated at the
/// caller's parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdCheck {
    pub label: &'static str,
    pub bound: usize,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrescribedSolution {
    pub x: BitVec,
    pub y: BitVec,
    pub z: BitVec,
    pub w: BitVec,
    /// Variable pair solved first; the other pair is solved in the subspace
    /// where every form vanishes against the first pair.
    pub first_pair: (Var, Var),
    pub min_combination_rank: Option<usize>,
    pub thresholds: Vec<ThresholdCheck>,
}

impl PrescribedSolution {
    pub fn get(&self, v: Var) -> &BitVec {
        match v {
            Var::X => &self.x,
            Var::Y => &self.y,
            Var::Z => &self.z,
            Var::W => &self.w,
        }
    }
}

const SAMPLE_CAP: u32 = 1 << 16;
const EXHAUSTIVE_DIM: usize = 20;

fn threshold_checks(s: usize, m: Option<usize>) -> Vec<ThresholdCheck> {
    let sq = s * s + s + 1;
    // (label, bound, strict)
    let table: [(&'static str, usize, bool); 6] = [
        ("m > 4(s+2)", 4 * (s + 2), true),
        ("m > 4(s+2) + 8(4s+2)", 4 * (s + 2) + 8 * (4 * s + 2), true),
        ("m > 40(s+1)", 40 * (s + 1), true),
        ("m >= 100(s^2+s+1)", 100 * sq, false),
        ("m >= 200(s^2+s+1)", 200 * sq, false),
        ("m >= 300(s^2+s+1)", 300 * sq, false),
    ];
    table
        .into_iter()
        .map(|(label, bound, strict)| ThresholdCheck {
            label,
            bound,
            satisfied: match m {
                None => true,
                Some(m) if strict => m > bound,
                Some(m) => m >= bound,
            },
        })
        .collect()
}

/// Finds `x, y, z, w` in `space` whose form values at the prescribed pairs
/// match their targets.
///
/// The variables are split into two pairs (`{x,z},{y,w}`, then `{x,y},{z,w}`,
/// then `{x,w},{y,z}`; the first split containing every nonzero prescribed
/// pair is used). The first pair is found by sampling `a` and solving the
/// linear system for `b`, falling back to a scan over all `a` when the space
/// has dimension at most 20. The second pair is found the same way inside the
/// subspace on which every form vanishes against both vectors of the first
/// pair, in both argument orders. Cross pairs are therefore always zero.
pub fn solve_prescribed_pairs(
    alphas: &[BilinearForm],
    rho: &BilinearForm,
    space: &Subspace,
    prescription: &[PairPrescription],
    seed: u64,
) -> Result<PrescribedSolution> {
    let n = rho.dim();
    ensure_dim(n, space.ambient_dim())?;
    for a in alphas {
        ensure_dim(n, a.dim())?;
    }
    let r = alphas.len();
    let mut seen = Vec::new();
    for p in prescription {
        if p.first == p.second {
            return Err(Error::Malformed(format!("pair ({:?}, {:?}) repeats a variable", p.first, p.second)));
        }
        ensure_dim(r + 1, p.target.len())?;
        if seen.contains(&p.unordered()) {
            return Err(Error::Malformed(format!("pair {:?} prescribed twice", p.unordered())));
        }
        seen.push(p.unordered());
    }
    let mut forms: Vec<BilinearForm> = alphas.to_vec();
    forms.push(rho.clone());

    let matchings = [
        ((Var::X, Var::Z), (Var::Y, Var::W)),
        ((Var::X, Var::Y), (Var::Z, Var::W)),
        ((Var::X, Var::W), (Var::Y, Var::Z)),
    ];
    let (pair1, pair2) = matchings
        .into_iter()
        .find(|(p, q)| {
            prescription
                .iter()
                .filter(|pr| !pr.target.is_zero())
                .all(|pr| pr.unordered() == *p || pr.unordered() == *q)
        })
        .ok_or_else(|| {
            Error::Precondition(
                "nonzero prescriptions must lie inside two disjoint variable pairs".into(),
            )
        })?;

    let oriented = |pair: (Var, Var)| -> ((Var, Var), BitVec) {
        prescription
            .iter()
            .find(|pr| pr.unordered() == pair)
            .map(|pr| ((pr.first, pr.second), pr.target.clone()))
            .unwrap_or((pair, BitVec::zeros(r + 1)))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: [Option<BitVec>; 4] = Default::default();

    let ((a_var, b_var), t1) = oriented(pair1);
    let (a, b) = solve_pair(&forms, space, &t1, &mut rng)
        .ok_or_else(|| Error::NoSolution(format!("no pair ({a_var:?}, {b_var:?}) attains {t1}")))?;
    let cut: Vec<BitVec> = forms
        .iter()
        .flat_map(|f| [f.left_apply(&a), f.right_apply(&a), f.left_apply(&b), f.right_apply(&b)])
        .collect();
    let inner = subspace_from_constraints(&cut, space)?;
    let ((c_var, d_var), t2) = oriented(pair2);
    let (c, d) = solve_pair(&forms, &inner, &t2, &mut rng).ok_or_else(|| {
        Error::NoSolution(format!(
            "no pair ({c_var:?}, {d_var:?}) attains {t2} in a subspace of codimension {}",
            inner.codim()
        ))
    })?;
    values[a_var.index()] = Some(a);
    values[b_var.index()] = Some(b);
    values[c_var.index()] = Some(c);
    values[d_var.index()] = Some(d);
    let [x, y, z, w] = values.map(|v| v.expect("the two pairs cover all four variables"));

    let min_rank = min_combination_rank(
        &forms
            .iter()
            .map(|f| f.restrict(space))
            .collect::<Result<Vec<_>>>()?,
    );
    let solution = PrescribedSolution {
        x,
        y,
        z,
        w,
        first_pair: pair1,
        min_combination_rank: min_rank,
        thresholds: threshold_checks(r, min_rank),
    };
    verify_prescription(&solution, &forms, space, prescription)?;
    Ok(solution)
}

/// Re-evaluates every prescribed pair directly.
fn verify_prescription(
    sol: &PrescribedSolution,
    forms: &[BilinearForm],
    space: &Subspace,
    prescription: &[PairPrescription],
) -> Result<()> {
    for v in Var::ALL {
        if !space.contains(sol.get(v)) {
            return Err(Error::Verification(format!("{v:?} left the search space")));
        }
    }
    for p in prescription {
        let (u, v) = (sol.get(p.first), sol.get(p.second));
        for (i, f) in forms.iter().enumerate() {
            if f.evaluate(u, v)? != p.target.get(i) {
                return Err(Error::Verification(format!(
                    "form {i} at ({:?}, {:?}) disagrees with the prescription",
                    p.first, p.second
                )));
            }
        }
    }
    Ok(())
}

/// `(a, b) ∈ space²` with `F_i(a, b) = target_i` for every form.
fn solve_pair(
    forms: &[BilinearForm],
    space: &Subspace,
    target: &BitVec,
    rng: &mut ChaCha8Rng,
) -> Option<(BitVec, BitVec)> {
    let n = space.ambient_dim();
    if target.is_zero() {
        return Some((BitVec::zeros(n), BitVec::zeros(n)));
    }
    if space.dim() == 0 {
        return None;
    }
    let try_a = |a: BitVec| -> Option<(BitVec, BitVec)> {
        let rows = forms
            .iter()
            .map(|f| space.restrict_functional(&f.left_apply(&a)))
            .collect();
        let g = BitMatrix::from_rows(space.dim(), rows).expect("restricted lengths agree");
        let coords = solve_linear(&g, target).expect("target length matches")?;
        Some((a, space.combination(&coords)))
    };
    for _ in 0..SAMPLE_CAP {
        if let Some(found) = try_a(space.random_element(rng)) {
            return Some(found);
        }
    }
    if space.dim() <= EXHAUSTIVE_DIM {
        return space.elements().find_map(try_a);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn vanishing_subspace_examples() {
        let z = low_rank_vanishing_subspace(&BilinearForm::zero(5));
        assert_eq!(z, Subspace::full(5));
        let r = low_rank_vanishing_subspace(&BilinearForm::dot_product(5));
        assert_eq!(r.codim(), 5);

        let e1 = BitVec::unit(3, 0);
        let beta = BilinearForm::product(&e1, &e1).unwrap();
        let s = low_rank_vanishing_subspace(&beta);
        assert_eq!(s.codim(), 1);
        for code in 0..8u64 {
            let x = BitVec::from_u64(3, code);
            let vanishes = (0..8u64).all(|y| !beta.evaluate(&x, &BitVec::from_u64(3, y)).unwrap());
            assert_eq!(s.contains(&x), vanishes);
            assert_eq!(vanishes, !x.get(0));
        }
    }

    #[test]
    fn regularize_empty_is_trivial() {
        let rho = BilinearForm::dot_product(6);
        let res = bilinear_regularize(&rho, &[], 2).unwrap();
        assert_eq!(res.subspace, Subspace::full(6));
        assert!(res.independent_forms.is_empty());
        assert!(res.audit(&rho, &[]).unwrap().passed());
    }

    #[test]
    fn regularize_rho_against_itself() {
        let n = 10;
        let m = 2;
        let rho = BilinearForm::dot_product(n);
        let betas = [rho.clone()];
        let res = bilinear_regularize(&rho, &betas, m).unwrap();
        assert!(res.independent_forms.is_empty());
        assert_eq!(res.subspace, Subspace::full(n));
        assert_eq!(
            res.expressions,
            vec![Expression {
                alpha_coeffs: vec![],
                rho_coeff: true
            }]
        );
        assert_eq!(res.steps.len(), 1);
        assert!(res.audit(&rho, &betas).unwrap().passed());
    }

    #[test]
    fn regularize_low_rank_rho() {
        let rho = BilinearForm::dot_product(8);
        let betas = vec![BilinearForm::zero(8); 2];
        let res = bilinear_regularize(&rho, &betas, 1).unwrap();
        assert!(!res.rank_hypothesis_holds);
        assert!(res.audit(&rho, &betas).unwrap().passed());
        assert!(bilinear_regularize(&rho, &[], 0).is_err());

        // ρ of rank 2 dies after one cut against a rank-2 form.
        let e = |i| BitVec::unit(4, i);
        let rho = BilinearForm::new(BitMatrix::from_rows(4, vec![e(0), e(1), BitVec::zeros(4), BitVec::zeros(4)]).unwrap()).unwrap();
        let beta = BilinearForm::product(&e(0), &e(2)).unwrap().add(&BilinearForm::product(&e(1), &e(3)).unwrap()).unwrap();
        assert!(matches!(
            bilinear_regularize(&rho, &[beta], 3),
            Err(Error::Verification(_))
        ));
    }

    #[test]
    fn regularize_random_instances() {
        let mut r = rng(50);
        for _ in 0..20 {
            let n = 24;
            let rho = BilinearForm::random_with_rank(n, r.gen_range(13..=n), &mut r);
            let betas: Vec<_> = (0..3)
                .map(|_| BilinearForm::random_with_rank(n, r.gen_range(0..4), &mut r))
                .collect();
            let res = bilinear_regularize(&rho, &betas, 2).unwrap();
            let audit = res.audit(&rho, &betas).unwrap();
            assert!(audit.passed(), "{audit:?}");
        }
    }

    #[test]
    fn counting_rho_on_f2_cubed() {
        let report = counting_check(&[BilinearForm::dot_product(3)], &Coset::full(3), 0.5).unwrap();
        assert_eq!(report.value_counts, vec![36, 28]);
        assert!(report.surjective);
        assert_eq!(report.coset_size, 8);
    }

    #[test]
    fn counting_zero_form_not_surjective() {
        let report = counting_check(&[BilinearForm::zero(4)], &Coset::full(4), 0.5).unwrap();
        assert_eq!(report.value_counts, vec![256, 0]);
        assert!(!report.surjective);
        assert!(!report.conclusion_holds);
        assert_eq!(report.min_combination_rank, Some(0));
        assert!(!report.hypothesis_holds);
    }

    #[test]
    fn counting_single_form_matches_rank_identity() {
        // count of value 1 = (1 - 2^-rank) 2^{2n-1}
        let mut r = rng(51);
        for n in 1..=10 {
            let rank = r.gen_range(0..=n);
            let beta = BilinearForm::random_with_rank(n, rank, &mut r);
            let report = counting_check(&[beta], &Coset::full(n), 0.5).unwrap();
            let ones = report.count(1);
            assert_eq!(ones * (1 << (rank + 1)), ((1 << rank) - 1) * (1u64 << (2 * n)));
            assert_eq!(report.value_counts.iter().sum::<u64>(), 1 << (2 * n));
        }
    }

    #[test]
    fn counting_on_shifted_coset_matches_brute_force() {
        let mut r = rng(52);
        let n = 6;
        let alphas: Vec<_> = (0..2).map(|_| BilinearForm::random(n, &mut r)).collect();
        let coset = Coset::new(Subspace::random_with_codim(n, 2, &mut r), BitVec::random(n, &mut r)).unwrap();
        let report = counting_check(&alphas, &coset, 0.3).unwrap();
        let mut expected = vec![0u64; 4];
        let points: Vec<BitVec> = (0..64u64)
            .map(|c| BitVec::from_u64(n, c))
            .filter(|v| coset.contains(v))
            .collect();
        assert_eq!(points.len(), 16);
        for x in &points {
            for y in &points {
                let v = alphas
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (i, a)| acc | (a.evaluate(x, y).unwrap() as usize) << i);
                expected[v] += 1;
            }
        }
        assert_eq!(report.value_counts, expected);
    }

    #[test]
    fn counting_rejects_oversized_and_bad_epsilon() {
        assert!(counting_check(&[], &Coset::full(16), 0.5).is_err());
        assert!(counting_check(&[], &Coset::full(4), 0.0).is_err());
    }

    fn two_pair_prescription(r: usize, i: usize, j: usize) -> Vec<PairPrescription> {
        use Var::*;
        let pairs = [(X, Y), (X, Z), (X, W), (Y, Z), (Y, W), (Z, W)];
        pairs
            .iter()
            .map(|&(a, b)| {
                let mut t = BitVec::zeros(r + 1);
                if (a, b) == (X, Z) {
                    t.set(i, true);
                }
                if (a, b) == (Y, W) {
                    t.set(j, true);
                }
                PairPrescription::new(a, b, t)
            })
            .collect()
    }

    #[test]
    fn empty_prescription_gives_zeros() {
        let rho = BilinearForm::dot_product(5);
        let sol = solve_prescribed_pairs(&[], &rho, &Subspace::full(5), &[], 1).unwrap();
        for v in Var::ALL {
            assert!(sol.get(v).is_zero());
        }
    }

    #[test]
    fn single_rho_prescription() {
        use Var::*;
        let n = 10;
        let rho = BilinearForm::dot_product(n);
        let mut prescription = vec![PairPrescription::new(X, Z, BitVec::from_u64(2, 0b11))];
        for (a, b) in [(X, Y), (X, W), (Y, Z), (Y, W), (Z, W)] {
            prescription.push(PairPrescription::new(a, b, BitVec::zeros(2)));
        }
        let sol = solve_prescribed_pairs(&[rho.clone()], &rho, &Subspace::full(n), &prescription, 7).unwrap();
        assert!(rho.evaluate(&sol.x, &sol.z).unwrap());
        assert!(!rho.evaluate(&sol.y, &sol.w).unwrap());
        assert_eq!(sol.first_pair, (X, Z));
    }

    #[test]
    fn reversed_pair_prescription() {
        use Var::*;
        let mut r = rng(53);
        let n = 14;
        let alphas: Vec<_> = (0..2).map(|_| BilinearForm::random(n, &mut r)).collect();
        let rho = BilinearForm::dot_product(n);
        let mut t_yx = BitVec::zeros(3);
        t_yx.set(0, true);
        let mut t_zw = BitVec::zeros(3);
        t_zw.set(1, true);
        let mut prescription = vec![
            PairPrescription::new(Y, X, t_yx),
            PairPrescription::new(Z, W, t_zw),
        ];
        for (a, b) in [(Z, X), (W, X), (Y, Z), (Y, W)] {
            prescription.push(PairPrescription::new(a, b, BitVec::zeros(3)));
        }
        let sol = solve_prescribed_pairs(&alphas, &rho, &Subspace::full(n), &prescription, 9).unwrap();
        assert!(alphas[0].evaluate(&sol.y, &sol.x).unwrap());
        assert!(!alphas[1].evaluate(&sol.y, &sol.x).unwrap());
        assert!(alphas[1].evaluate(&sol.z, &sol.w).unwrap());
        assert_eq!(sol.first_pair, (X, Y));
    }

    #[test]
    fn two_pair_shape_on_random_forms() {
        let mut r = rng(54);
        let n = 14;
        let alpha = BilinearForm::random_with_rank(n, n, &mut r);
        let rho = BilinearForm::dot_product(n);
        let sol = solve_prescribed_pairs(
            &[alpha],
            &rho,
            &Subspace::full(n),
            &two_pair_prescription(1, 0, 0),
            3,
        )
        .unwrap();
        assert_eq!(sol.thresholds.len(), 6);
        assert!(!sol.thresholds[5].satisfied);
    }

    #[test]
    fn prescription_validation() {
        use Var::*;
        let rho = BilinearForm::dot_product(4);
        let full = Subspace::full(4);
        let bad_len = [PairPrescription::new(X, Y, BitVec::zeros(3))];
        assert!(solve_prescribed_pairs(&[], &rho, &full, &bad_len, 0).is_err());
        let same = [PairPrescription::new(X, X, BitVec::zeros(1))];
        assert!(solve_prescribed_pairs(&[], &rho, &full, &same, 0).is_err());
        let twice = [
            PairPrescription::new(X, Y, BitVec::zeros(1)),
            PairPrescription::new(Y, X, BitVec::zeros(1)),
        ];
        assert!(solve_prescribed_pairs(&[], &rho, &full, &twice, 0).is_err());
        let crossing = [
            PairPrescription::new(X, Y, BitVec::unit(1, 0)),
            PairPrescription::new(X, Z, BitVec::unit(1, 0)),
        ];
        assert!(matches!(
            solve_prescribed_pairs(&[], &rho, &full, &crossing, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn unsatisfiable_prescription_reports_no_solution() {
        use Var::*;
        let zero = BilinearForm::zero(4);
        let t = BitVec::unit(1, 0);
        let res = solve_prescribed_pairs(&[], &zero, &Subspace::full(4), &[PairPrescription::new(X, Z, t)], 0);
        assert!(matches!(res, Err(Error::NoSolution(_))));
    }
}

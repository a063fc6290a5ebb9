//! Composite Hilbert spaces of two truncated bosonic modes and N qubits.
//!
//! Basis enumeration is mixed-radix with the leftmost factor most
//! significant. In a bimodal layout the factors are `[A, B, q1, .., qN]`;
//! a qubit-only layout is `[q1, .., qN]`. `|↑⟩` is index 0, `|↓⟩` index 1,
//! and Fock `|n⟩` is index `n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{c, identity, kron, CMatrix, CVector, C64, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 { Spin::Up } else { Spin::Down }
    }

    pub fn ket(self) -> CVector {
        let mut v = CVector::zeros(2);
        v[self.index()] = ONE;
        v
    }

    fn symbol(self) -> char {
        match self {
            Spin::Up => '↑',
            Spin::Down => '↓',
        }
    }
}

/// One tensor factor of a layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    ModeA,
    ModeB,
    /// Qubit by zero-based position.
    Qubit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceLayout {
    factors: Vec<(Factor, usize)>,
    nmax: Option<usize>,
    n_qubits: usize,
}

impl SpaceLayout {
    /// Modes A and B with photon numbers `0..=nmax`, followed by `n_qubits` qubits.
    pub fn bimodal(nmax: usize, n_qubits: usize) -> Result<Self> {
        if nmax == 0 {
            return Err(Error::InvalidParameter("nmax must be at least 1".into()));
        }
        let mut factors = vec![(Factor::ModeA, nmax + 1), (Factor::ModeB, nmax + 1)];
        factors.extend((0..n_qubits).map(|k| (Factor::Qubit(k), 2)));
        Ok(Self {
            factors,
            nmax: Some(nmax),
            n_qubits,
        })
    }

    pub fn qubits(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("qubit layout needs at least one qubit".into()));
        }
        Ok(Self {
            factors: (0..n_qubits).map(|k| (Factor::Qubit(k), 2)).collect(),
            nmax: None,
            n_qubits,
        })
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.1).product()
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Fock truncation, `None` for qubit-only layouts.
    pub fn nmax(&self) -> Option<usize> {
        self.nmax
    }

    pub fn has_modes(&self) -> bool {
        self.nmax.is_some()
    }

    pub fn factor_dim(&self, index: usize) -> usize {
        self.factors[index].1
    }

    pub fn factor(&self, index: usize) -> Factor {
        self.factors[index].0
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.1).collect()
    }

    /// Position of `factor` in the layout.
    pub fn position(&self, factor: Factor) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.0 == factor)
            .ok_or_else(|| Error::InvalidParameter(format!("layout has no factor {factor:?}")))
    }

    /// Flat basis index of per-factor digits.
    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.factors.len() {
            return Err(Error::DimensionMismatch {
                context: "index_of",
                expected: self.factors.len(),
                found: digits.len(),
            });
        }
        let mut idx = 0;
        for (&d, &(f, dim)) in digits.iter().zip(&self.factors) {
            if d >= dim {
                return Err(Error::InvalidParameter(format!(
                    "digit {d} out of range for factor {f:?} of dimension {dim}"
                )));
            }
            idx = idx * dim + d;
        }
        Ok(idx)
    }

    /// Per-factor digits of a flat basis index.
    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.factors.len()];
        for (slot, &(_, dim)) in digits.iter_mut().zip(&self.factors).rev() {
            *slot = index % dim;
            index /= dim;
        }
        digits
    }

    /// Human-readable ket label such as `|10↓↑⟩`.
    pub fn ket_label(&self, index: usize) -> String {
        let digits = self.digits_of(index);
        let mut s = String::from("|");
        for (d, &(f, _)) in digits.iter().zip(&self.factors) {
            match f {
                Factor::ModeA | Factor::ModeB => s.push_str(&d.to_string()),
                Factor::Qubit(_) => s.push(Spin::from_index(*d).symbol()),
            }
        }
        s.push('⟩');
        s
    }
}

/// `|nA nB s1..sN⟩` in a bimodal layout.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub n_a: usize,
    pub n_b: usize,
    pub spins: Vec<Spin>,
}

impl BasisLabel {
    pub fn new(n_a: usize, n_b: usize, spins: Vec<Spin>) -> Self {
        Self { n_a, n_b, spins }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}{}", self.n_a, self.n_b)?;
        for s in &self.spins {
            write!(f, "{}", s.symbol())?;
        }
        write!(f, "⟩")
    }
}

/// Truncated annihilation operator on Fock levels `0..=nmax`.
pub fn annihilation(nmax: usize) -> CMatrix {
    let mut a = CMatrix::zeros(nmax + 1, nmax + 1);
    for n in 0..nmax {
        a[(n, n + 1)] = c(((n + 1) as f64).sqrt(), 0.0);
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// σ⁺ = |↑⟩⟨↓|
    Plus,
    /// σ⁻ = |↓⟩⟨↑|
    Minus,
}

pub fn pauli(kind: Pauli) -> CMatrix {
    let m = |e: [C64; 4]| CMatrix::from_row_slice(2, 2, &e);
    match kind {
        Pauli::X => m([ZERO, ONE, ONE, ZERO]),
        Pauli::Y => m([ZERO, -I, I, ZERO]),
        Pauli::Z => m([ONE, ZERO, ZERO, -ONE]),
        Pauli::Plus => m([ZERO, ONE, ZERO, ZERO]),
        Pauli::Minus => m([ZERO, ZERO, ONE, ZERO]),
    }
}

/// Hadamard gate in the `|↑⟩, |↓⟩` basis.
pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

/// Places `op` on factor `factor_index` with identities elsewhere.
pub fn embed(op: &CMatrix, factor_index: usize, layout: &SpaceLayout) -> Result<CMatrix> {
    if factor_index >= layout.n_factors() {
        return Err(Error::InvalidParameter(format!(
            "factor index {factor_index} out of range for {} factors",
            layout.n_factors()
        )));
    }
    let fd = layout.factor_dim(factor_index);
    if op.nrows() != fd || op.ncols() != fd {
        return Err(Error::DimensionMismatch {
            context: "embed",
            expected: fd,
            found: op.nrows(),
        });
    }
    let dims = layout.factor_dims();
    let left: usize = dims[..factor_index].iter().product();
    let right: usize = dims[factor_index + 1..].iter().product();
    Ok(kron(&kron(&identity(left), op), &identity(right)))
}

/// Tensor product of one operator per factor, in layout order.
pub fn tensor_ops(ops: &[CMatrix]) -> CMatrix {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, op| kron(&acc, op))
}

pub fn basis_state(label: &BasisLabel, layout: &SpaceLayout) -> Result<CVector> {
    let nmax = layout
        .nmax()
        .ok_or_else(|| Error::InvalidParameter("basis label needs a bimodal layout".into()))?;
    if label.spins.len() != layout.n_qubits() {
        return Err(Error::DimensionMismatch {
            context: "basis_state",
            expected: layout.n_qubits(),
            found: label.spins.len(),
        });
    }
    if label.n_a > nmax || label.n_b > nmax {
        return Err(Error::InvalidParameter(format!(
            "photon numbers ({}, {}) exceed nmax = {nmax}",
            label.n_a, label.n_b
        )));
    }
    let mut digits = vec![label.n_a, label.n_b];
    digits.extend(label.spins.iter().map(|s| s.index()));
    unit_vector(layout.dim(), layout.index_of(&digits)?)
}

/// Computational basis state of a qubit-only layout.
pub fn spin_state(spins: &[Spin], layout: &SpaceLayout) -> Result<CVector> {
    if layout.has_modes() {
        return Err(Error::InvalidParameter("spin_state needs a qubit-only layout".into()));
    }
    let digits: Vec<usize> = spins.iter().map(|s| s.index()).collect();
    unit_vector(layout.dim(), layout.index_of(&digits)?)
}

fn unit_vector(dim: usize, index: usize) -> Result<CVector> {
    let mut v = CVector::zeros(dim);
    v[index] = ONE;
    Ok(v)
}

/// Parses a spin string of `u`/`d` (or `↑`/`↓`) characters.
pub fn spins(pattern: &str) -> Vec<Spin> {
    pattern
        .chars()
        .map(|ch| match ch {
            'u' | '↑' | '0' => Spin::Up,
            'd' | '↓' | '1' => Spin::Down,
            other => panic!("invalid spin character {other:?}"),
        })
        .collect()
}

/// Total excitation number `a†a + b†b + Σ σ⁺σ⁻` (qubit terms only for
/// qubit layouts).
pub fn excitation_number(layout: &SpaceLayout) -> Result<CMatrix> {
    let dim = layout.dim();
    let mut n = CMatrix::zeros(dim, dim);
    for index in 0..dim {
        let digits = layout.digits_of(index);
        let mut count = 0usize;
        for (pos, d) in digits.iter().enumerate() {
            count += match layout.factor(pos) {
                Factor::ModeA | Factor::ModeB => *d,
                Factor::Qubit(_) => usize::from(*d == 0),
            };
        }
        n[(index, index)] = c(count as f64, 0.0);
    }
    Ok(n)
}

/// Reduced density matrix over the `keep` factors, in layout order.
pub fn partial_trace(rho: &CMatrix, keep: &[usize], layout: &SpaceLayout) -> Result<CMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidParameter("partial_trace: keep set is empty".into()));
    }
    let dim = layout.dim();
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch {
            context: "partial_trace",
            expected: dim,
            found: rho.nrows(),
        });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= layout.n_factors()) {
        return Err(Error::InvalidParameter(format!("partial_trace: no factor {bad}")));
    }
    let dims = layout.factor_dims();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kept_dim: usize = kept_dims.iter().product();
    let traced_dim: usize = traced_dims.iter().product();

    let compose = |kept_index: usize, traced_index: usize| -> usize {
        let mut digits = vec![0; dims.len()];
        let mut r = kept_index;
        for (&pos, &d) in kept.iter().zip(&kept_dims).rev() {
            digits[pos] = r % d;
            r /= d;
        }
        let mut r = traced_index;
        for (&pos, &d) in traced.iter().zip(&traced_dims).rev() {
            digits[pos] = r % d;
            r /= d;
        }
        digits.iter().zip(&dims).fold(0, |acc, (&x, &d)| acc * d + x)
    };

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for t in 0..traced_dim {
        let rows: Vec<usize> = (0..kept_dim).map(|i| compose(i, t)).collect();
        for (i, &ri) in rows.iter().enumerate() {
            for (j, &rj) in rows.iter().enumerate() {
                out[(i, j)] += rho[(ri, rj)];
            }
        }
    }
    Ok(out)
}

/// `F = sqrt(⟨ψ|ρ|ψ⟩)`, clamped to `[0, 1]`.
pub fn fidelity(psi: &CVector, rho: &CMatrix) -> Result<f64> {
    if rho.nrows() != psi.len() || rho.ncols() != psi.len() {
        return Err(Error::DimensionMismatch {
            context: "fidelity",
            expected: psi.len(),
            found: rho.nrows(),
        });
    }
    let overlap = psi.dotc(&(rho * psi)).re;
    Ok(overlap.clamp(0.0, 1.0).sqrt())
}

/// `|⟨ψ|φ⟩|`, the pure-state fidelity; insensitive to global phases.
pub fn overlap_fidelity(psi: &CVector, phi: &CVector) -> Result<f64> {
    if psi.len() != phi.len() {
        return Err(Error::DimensionMismatch {
            context: "overlap_fidelity",
            expected: psi.len(),
            found: phi.len(),
        });
    }
    Ok(psi.dotc(phi).norm().min(1.0))
}

pub fn purity(rho: &CMatrix) -> f64 {
    (rho * rho).trace().re
}

/// Multiplies `phi` by the phase that makes `⟨target|phi⟩` real and non-negative.
pub fn align_global_phase(phi: &CVector, target: &CVector) -> CVector {
    let ov = target.dotc(phi);
    if ov.norm() == 0.0 {
        return phi.clone();
    }
    phi * (ov.conj() / ov.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{commutator, hermitian_eigenvalues, max_abs_diff, projector};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn annihilation_small() {
        let a = annihilation(1);
        assert_eq!(a, CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]));
    }

    #[test]
    fn number_operator_is_diagonal_ramp() {
        let a = annihilation(4);
        let n = a.adjoint() * &a;
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { i as f64 } else { 0.0 };
                assert_abs_diff_eq!(n[(i, j)].re, want, epsilon = 1e-14);
                assert_abs_diff_eq!(n[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn truncated_commutator_corner() {
        let nmax = 3;
        let a = annihilation(nmax);
        let comm = commutator(&a, &a.adjoint());
        let mut want = identity(nmax + 1);
        want[(nmax, nmax)] = c(-(nmax as f64), 0.0);
        assert!(max_abs_diff(&comm, &want) < 1e-14);
    }

    #[test]
    fn pauli_conventions() {
        let up = Spin::Up.ket();
        let down = Spin::Down.ket();
        assert_eq!(pauli(Pauli::Plus) * &down, up);
        assert_eq!(pauli(Pauli::Z) * &up, up);
        let from_xy = (pauli(Pauli::X) + pauli(Pauli::Y) * I) * c(0.5, 0.0);
        assert_eq!(from_xy, pauli(Pauli::Plus));
        assert_eq!(pauli(Pauli::Minus), pauli(Pauli::Plus).adjoint());
    }

    #[test]
    fn embed_sigma_z_spectrum() {
        let layout = SpaceLayout::bimodal(1, 1).unwrap();
        let z = embed(&pauli(Pauli::Z), 2, &layout).unwrap();
        assert_eq!(z.nrows(), 8);
        let ev = hermitian_eigenvalues(&z);
        assert_eq!(ev.iter().filter(|&&e| (e + 1.0).abs() < 1e-12).count(), 4);
        assert_eq!(ev.iter().filter(|&&e| (e - 1.0).abs() < 1e-12).count(), 4);
    }

    #[test]
    fn embed_identity_is_identity() {
        let layout = SpaceLayout::bimodal(2, 2).unwrap();
        for f in 0..layout.n_factors() {
            let e = embed(&identity(layout.factor_dim(f)), f, &layout).unwrap();
            assert_eq!(e, identity(layout.dim()));
        }
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        let layout = SpaceLayout::bimodal(2, 1).unwrap();
        assert!(embed(&pauli(Pauli::X), 0, &layout).is_err());
        assert!(embed(&pauli(Pauli::X), 7, &layout).is_err());
    }

    #[test]
    fn embed_disjoint_factors_commute_and_form_pair() {
        let layout = SpaceLayout::bimodal(2, 1).unwrap();
        let a = embed(&annihilation(2), 0, &layout).unwrap();
        let bd = embed(&annihilation(2).adjoint(), 1, &layout).unwrap();
        let pair = tensor_ops(&[annihilation(2), annihilation(2).adjoint(), identity(2)]);
        assert_eq!(&a * &bd, pair);
        assert_eq!(&a * &bd, &bd * &a);
    }

    #[test]
    fn basis_state_indices() {
        let layout = SpaceLayout::bimodal(1, 1).unwrap();
        let v = basis_state(&BasisLabel::new(0, 0, vec![Spin::Up]), &layout).unwrap();
        assert_eq!(v[0], ONE);
        let v = basis_state(&BasisLabel::new(1, 0, vec![Spin::Down]), &layout).unwrap();
        assert_eq!(v[5], ONE);
        assert_abs_diff_eq!(v.norm(), 1.0);
        assert!(basis_state(&BasisLabel::new(2, 0, vec![Spin::Down]), &layout).is_err());
        assert!(basis_state(&BasisLabel::new(0, 0, vec![]), &layout).is_err());
    }

    #[test]
    fn ket_labels_roundtrip() {
        let layout = SpaceLayout::bimodal(1, 2).unwrap();
        assert_eq!(layout.ket_label(0), "|00↑↑⟩");
        let label = BasisLabel::new(1, 0, spins("du"));
        let idx = layout.index_of(&[1, 0, 1, 0]).unwrap();
        assert_eq!(layout.ket_label(idx), label.to_string());
    }

    #[test]
    fn partial_trace_of_product() {
        let layout = SpaceLayout::qubits(2).unwrap();
        let a = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let b = CVector::from_vec(vec![c(1.0, 0.0), ZERO]);
        let rho = kron(&projector(&a), &projector(&b));
        let red = partial_trace(&rho, &[0], &layout).unwrap();
        assert!(max_abs_diff(&red, &projector(&a)) < 1e-15);
        let red = partial_trace(&rho, &[1], &layout).unwrap();
        assert!(max_abs_diff(&red, &projector(&b)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_pair_is_mixed() {
        let layout = SpaceLayout::qubits(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CVector::from_vec(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]);
        let red = partial_trace(&projector(&bell), &[0], &layout).unwrap();
        assert!(max_abs_diff(&red, &(identity(2) * c(0.5, 0.0))) < 1e-15);
        assert!(partial_trace(&projector(&bell), &[], &layout).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let layout = SpaceLayout::qubits(2).unwrap();
        let psi = spin_state(&spins("ud"), &layout).unwrap();
        let phi = spin_state(&spins("du"), &layout).unwrap();
        assert_abs_diff_eq!(fidelity(&psi, &projector(&psi)).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(&psi, &projector(&phi)).unwrap(), 0.0);
        let mixed = identity(4) * c(0.25, 0.0);
        assert_abs_diff_eq!(fidelity(&psi, &mixed).unwrap(), 0.5, epsilon = 1e-15);
        assert!(fidelity(&psi, &identity(2)).is_err());
    }

    fn normalized(v: &[f64]) -> CVector {
        let cv = CVector::from_iterator(v.len() / 2, v.chunks(2).map(|p| c(p[0], p[1])));
        let n = cv.norm();
        cv / c(n, 0.0)
    }

    proptest! {
        #[test]
        fn embeds_on_distinct_factors_commute(i in 0usize..4, j in 0usize..4, k in 0usize..5, l in 0usize..5) {
            prop_assume!(i != j);
            let layout = SpaceLayout::bimodal(1, 2).unwrap();
            let ops = |f: usize, which: usize| -> CMatrix {
                if f < 2 {
                    let a = annihilation(1);
                    if which.is_multiple_of(2) { a } else { a.adjoint() }
                } else {
                    pauli([Pauli::X, Pauli::Y, Pauli::Z, Pauli::Plus, Pauli::Minus][which])
                }
            };
            let x = embed(&ops(i, k), i, &layout).unwrap();
            let y = embed(&ops(j, l), j, &layout).unwrap();
            prop_assert_eq!(commutator(&x, &y), CMatrix::zeros(layout.dim(), layout.dim()));
        }

        #[test]
        fn complementary_traces_agree(v in proptest::collection::vec(-1.0f64..1.0, 16)) {
            prop_assume!(v.iter().any(|x| x.abs() > 1e-3));
            let layout = SpaceLayout::qubits(3).unwrap();
            let psi = normalized(&v);
            let rho = projector(&psi);
            let a = partial_trace(&rho, &[0], &layout).unwrap().trace();
            let b = partial_trace(&rho, &[1, 2], &layout).unwrap().trace();
            prop_assert!((a - rho.trace()).norm() < 1e-12);
            prop_assert!((b - rho.trace()).norm() < 1e-12);
        }

        #[test]
        fn fidelity_ignores_global_phase(v in proptest::collection::vec(-1.0f64..1.0, 8), w in proptest::collection::vec(-1.0f64..1.0, 8), theta in 0.0f64..6.3) {
            prop_assume!(v.iter().any(|x| x.abs() > 1e-3) && w.iter().any(|x| x.abs() > 1e-3));
            let psi = normalized(&v);
            let rho = projector(&normalized(&w));
            let rotated = &psi * C64::from_polar(1.0, theta);
            prop_assert!((fidelity(&psi, &rho).unwrap() - fidelity(&rotated, &rho).unwrap()).abs() < 1e-15);
        }
    }
}

//! Hamiltonian builders: rotating frame, interaction picture and the
//! dispersive effective model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, embed, pauli, Factor, Pauli, SpaceLayout};
use crate::numkit::{c, CMatrix, C64};

/// Relative phase of a qubit's coupling to mode B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidParameter(format!("coupling sign must be ±1, got {other}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Parses `+`/`-` characters into signs, e.g. `"-++"`.
pub fn signs(pattern: &str) -> Vec<Sign> {
    pattern
        .chars()
        .map(|ch| match ch {
            '+' => Sign::Plus,
            '-' => Sign::Minus,
            other => panic!("invalid sign character {other:?}"),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimodalParams {
    pub omega: f64,
    pub delta: f64,
    pub signs: Vec<Sign>,
    pub nmax: usize,
}

impl BimodalParams {
    pub fn new(omega: f64, delta: f64, signs: Vec<Sign>, nmax: usize) -> Result<Self> {
        let p = Self {
            omega,
            delta,
            signs,
            nmax,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("Omega must be > 0, got {}", self.omega)));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!("Delta must be finite, got {}", self.delta)));
        }
        if self.signs.is_empty() {
            return Err(Error::InvalidParameter("at least one qubit is required".into()));
        }
        if self.nmax == 0 {
            return Err(Error::InvalidParameter("nmax must be at least 1".into()));
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<SpaceLayout> {
        SpaceLayout::bimodal(self.nmax, self.n())
    }

    /// `√(Δ² + 2NΩ²)` for `n` simultaneously coupled qubits.
    pub fn rabi_frequency(&self, n: usize) -> f64 {
        (self.delta * self.delta + 2.0 * n as f64 * self.omega * self.omega).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub lambda: f64,
    pub signs: Vec<Sign>,
}

impl EffectiveParams {
    pub fn new(lambda: f64, signs: Vec<Sign>) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
        }
        if signs.is_empty() {
            return Err(Error::InvalidParameter("at least one qubit is required".into()));
        }
        Ok(Self { lambda, signs })
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }
}

fn check_layout(p: &BimodalParams, layout: &SpaceLayout) -> Result<()> {
    p.validate()?;
    if layout.nmax() != Some(p.nmax) {
        return Err(Error::InvalidParameter(format!(
            "layout truncation {:?} does not match nmax = {}",
            layout.nmax(),
            p.nmax
        )));
    }
    if layout.n_qubits() != p.n() {
        return Err(Error::DimensionMismatch {
            context: "hamiltonian layout",
            expected: p.n(),
            found: layout.n_qubits(),
        });
    }
    Ok(())
}

struct Ladder {
    a: CMatrix,
    b: CMatrix,
}

fn ladder(layout: &SpaceLayout) -> Result<Ladder> {
    let nmax = layout
        .nmax()
        .ok_or_else(|| Error::InvalidParameter("modes require a bimodal layout".into()))?;
    let a1 = annihilation(nmax);
    Ok(Ladder {
        a: embed(&a1, layout.position(Factor::ModeA)?, layout)?,
        b: embed(&a1, layout.position(Factor::ModeB)?, layout)?,
    })
}

/// `Δ(a†a − b†b)`.
pub fn free_mode_hamiltonian(delta: f64, layout: &SpaceLayout) -> Result<CMatrix> {
    let l = ladder(layout)?;
    Ok((l.a.adjoint() * &l.a - l.b.adjoint() * &l.b) * c(delta, 0.0))
}

/// `R(t) = exp(iΔt(a†a − b†b))`, diagonal in the Fock basis.
pub fn frame_rotation(delta: f64, t: f64, layout: &SpaceLayout) -> Result<CMatrix> {
    let pa = layout.position(Factor::ModeA)?;
    let pb = layout.position(Factor::ModeB)?;
    let dim = layout.dim();
    let mut r = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let d = layout.digits_of(i);
        let photons = d[pa] as f64 - d[pb] as f64;
        r[(i, i)] = C64::from_polar(1.0, delta * t * photons);
    }
    Ok(r)
}

/// Couplings `Ω(a†σ⁻ + aσ⁺) + Ω s (b†σ⁻ + bσ⁺)` for one qubit.
fn qubit_coupling(p: &BimodalParams, l: &Ladder, k: usize, layout: &SpaceLayout) -> Result<CMatrix> {
    let q = layout.position(Factor::Qubit(k))?;
    let minus = embed(&pauli(Pauli::Minus), q, layout)?;
    let plus = embed(&pauli(Pauli::Plus), q, layout)?;
    let to_a = l.a.adjoint() * &minus + &l.a * &plus;
    let to_b = l.b.adjoint() * &minus + &l.b * &plus;
    Ok((to_a + to_b * c(p.signs[k].value(), 0.0)) * c(p.omega, 0.0))
}

/// Rotating-frame Hamiltonian with every qubit coupled.
pub fn rotating_frame_hamiltonian(p: &BimodalParams, layout: &SpaceLayout) -> Result<CMatrix> {
    rotating_frame_hamiltonian_masked(p, layout, &vec![true; p.n()])
}

/// Rotating-frame Hamiltonian in which only qubits with `active[k]` couple
/// to the modes. Inactive qubits are spectators inside the cavity space.
pub fn rotating_frame_hamiltonian_masked(
    p: &BimodalParams,
    layout: &SpaceLayout,
    active: &[bool],
) -> Result<CMatrix> {
    check_layout(p, layout)?;
    if active.len() != p.n() {
        return Err(Error::DimensionMismatch {
            context: "coupling mask",
            expected: p.n(),
            found: active.len(),
        });
    }
    let l = ladder(layout)?;
    let mut h = (l.a.adjoint() * &l.a - l.b.adjoint() * &l.b) * c(p.delta, 0.0);
    for (k, _) in active.iter().enumerate().filter(|(_, on)| **on) {
        h += qubit_coupling(p, &l, k, layout)?;
    }
    Ok(h)
}

/// Interaction-picture Hamiltonian at time `t`; mode A couplings carry
/// `e^{iΔt}` and mode B couplings `e^{-iΔt}` on their creation parts.
pub fn interaction_picture_hamiltonian(
    p: &BimodalParams,
    t: f64,
    layout: &SpaceLayout,
) -> Result<CMatrix> {
    check_layout(p, layout)?;
    let l = ladder(layout)?;
    let pa = C64::from_polar(1.0, p.delta * t);
    let pb = pa.conj();
    let dim = layout.dim();
    let mut h = CMatrix::zeros(dim, dim);
    for k in 0..p.n() {
        let q = layout.position(Factor::Qubit(k))?;
        let minus = embed(&pauli(Pauli::Minus), q, layout)?;
        let raise_a = l.a.adjoint() * &minus * pa;
        let raise_b = l.b.adjoint() * &minus * pb * c(p.signs[k].value(), 0.0);
        let part = raise_a + raise_b;
        h += &part + part.adjoint();
    }
    Ok(h * c(p.omega, 0.0))
}

/// Dispersive qubit-qubit coupling `λ = Ω²/Δ`.
pub fn effective_coupling(omega: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::InvalidParameter(
            "effective coupling is undefined at zero detuning".into(),
        ));
    }
    if !(delta > 0.0 && delta.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "effective coupling needs Omega > 0 and Delta > 0, got ({omega}, {delta})"
        )));
    }
    Ok(omega * omega / delta)
}

fn qubit_op(kind: Pauli, k: usize, layout: &SpaceLayout) -> Result<CMatrix> {
    embed(&pauli(kind), layout.position(Factor::Qubit(k))?, layout)
}

/// Effective qubit Hamiltonian for mode photon numbers `(nA, nB)`:
/// `−λ(nA − nB) Σ σz − λ Σ_{j≠k} (1 − s_j s_k) σ⁺_j σ⁻_k`.
pub fn effective_hamiltonian(p: &EffectiveParams, n_a: usize, n_b: usize) -> Result<CMatrix> {
    let layout = SpaceLayout::qubits(p.n())?;
    let mut h = effective_exchange(p, &vec![true; p.n()], &layout)?;
    let stark = n_a as f64 - n_b as f64;
    if stark != 0.0 {
        for k in 0..p.n() {
            h -= qubit_op(Pauli::Z, k, &layout)? * c(p.lambda * stark, 0.0);
        }
    }
    Ok(h)
}

/// Vacuum effective Hamiltonian restricted to the qubits with `present[k]`.
pub fn effective_hamiltonian_subset(p: &EffectiveParams, present: &[bool]) -> Result<CMatrix> {
    if present.len() != p.n() {
        return Err(Error::DimensionMismatch {
            context: "presence mask",
            expected: p.n(),
            found: present.len(),
        });
    }
    let layout = SpaceLayout::qubits(p.n())?;
    effective_exchange(p, present, &layout)
}

fn effective_exchange(p: &EffectiveParams, present: &[bool], layout: &SpaceLayout) -> Result<CMatrix> {
    let n = p.n();
    let dim = layout.dim();
    let mut h = CMatrix::zeros(dim, dim);
    let plus: Vec<CMatrix> = (0..n).map(|k| qubit_op(Pauli::Plus, k, layout)).collect::<Result<_>>()?;
    let minus: Vec<CMatrix> = (0..n).map(|k| qubit_op(Pauli::Minus, k, layout)).collect::<Result<_>>()?;
    for j in (0..n).filter(|&j| present[j]) {
        for k in (0..n).filter(|&k| k != j && present[k]) {
            let weight = 1.0 - p.signs[j].value() * p.signs[k].value();
            if weight != 0.0 {
                h -= &plus[j] * &minus[k] * c(p.lambda * weight, 0.0);
            }
        }
    }
    Ok(h)
}

/// `Σ σ⁺_k σ⁻_k` on a qubit-only layout.
pub fn spin_excitation(n: usize) -> Result<CMatrix> {
    let layout = SpaceLayout::qubits(n)?;
    let mut out = CMatrix::zeros(layout.dim(), layout.dim());
    for k in 0..n {
        out += qubit_op(Pauli::Plus, k, &layout)? * qubit_op(Pauli::Minus, k, &layout)?;
    }
    Ok(out)
}

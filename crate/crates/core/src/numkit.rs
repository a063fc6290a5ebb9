//! Dense complex linear algebra and time propagation.
//!
//! Every operator and state in the crate is a dense `nalgebra` matrix or
//! vector over `Complex64`. The largest space simulated here has dimension
//! 144, so no sparse formats are needed for storage; [`SparseOp`] exists only
//! to make repeated generator applications cheap.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default number of fixed integration steps per run.
pub const DEFAULT_STEPS: usize = 20_000;
/// Figure-of-merit change accepted by the step-halving convergence check.
pub const CONVERGENCE_TOL: f64 = 1e-8;
const MAX_HALVINGS: usize = 4;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Kronecker product; entry `(i*B.rows + k, j*B.cols + l)` is `A(i,j) B(k,l)`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of vectors, leftmost factor most significant.
pub fn kron_vectors(factors: &[CVector]) -> CVector {
    let mut out = CVector::from_element(1, ONE);
    for f in factors {
        let mut next = CVector::zeros(out.len() * f.len());
        for (i, a) in out.iter().enumerate() {
            for (k, b) in f.iter().enumerate() {
                next[i * f.len() + k] = a * b;
            }
        }
        out = next;
    }
    out
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn inf_norm(a: &CMatrix) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest absolute entry difference between two equally shaped matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_vec(a: &CVector, b: &CVector) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && max_abs_diff(a, &a.adjoint()) <= tol
}

pub fn trace(a: &CMatrix) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let h = (a + a.adjoint()) * c(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

pub fn min_eigenvalue_hermitian(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a)[0]
}

/// Outer product `|psi><psi|`.
pub fn projector(psi: &CVector) -> CMatrix {
    psi * psi.adjoint()
}

// Padé coefficients and thresholds for scaling-and-squaring (Higham, 2005).
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(f64, usize); 4] = [
    (1.495585217958292e-2, 3),
    (2.53939833006323e-1, 5),
    (9.504178996162932e-1, 7),
    (2.097847961257068e0, 9),
];
const THETA13: f64 = 5.371920351148152;

fn scale(a: &CMatrix, s: f64) -> CMatrix {
    a * c(s, 0.0)
}

fn pade_low(a: &CMatrix, coeffs: &[f64]) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let a2 = a * a;
    let mut u = scale(&identity(n), coeffs[1]);
    let mut v = scale(&identity(n), coeffs[0]);
    let mut p = identity(n);
    for k in 1..coeffs.len() / 2 {
        p = &p * &a2;
        u += scale(&p, coeffs[2 * k + 1]);
        v += scale(&p, coeffs[2 * k]);
    }
    (a * u, v)
}

fn pade13(a: &CMatrix) -> (CMatrix, CMatrix) {
    let b = &PADE13;
    let n = a.nrows();
    let id = identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = scale(&a6, b[13]) + scale(&a4, b[11]) + scale(&a2, b[9]);
    let u = a
        * (&a6 * inner_u
            + scale(&a6, b[7])
            + scale(&a4, b[5])
            + scale(&a2, b[3])
            + scale(&id, b[1]));
    let inner_v = scale(&a6, b[12]) + scale(&a4, b[10]) + scale(&a2, b[8]);
    let v = &a6 * inner_v
        + scale(&a6, b[6])
        + scale(&a4, b[4])
        + scale(&a2, b[2])
        + scale(&id, b[0]);
    (u, v)
}

/// Matrix exponential by scaling and squaring with a Padé core.
pub fn matrix_exponential(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            context: "matrix_exponential",
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(a.clone());
    }
    let norm = one_norm(a);
    for &(theta, m) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_low(a, coeffs);
            return solve_pade(u, v);
        }
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = scale(a, 2f64.powi(-squarings));
    let (u, v) = pade13(&scaled);
    let mut r = solve_pade(u, v)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

fn solve_pade(u: CMatrix, v: CMatrix) -> Result<CMatrix> {
    let p = &v + &u;
    let q = v - u;
    q.lu().solve(&p).ok_or_else(|| {
        Error::InvalidParameter("matrix_exponential: singular Padé denominator".into())
    })
}

/// `exp(-i H t)` for a time-independent Hamiltonian.
pub fn propagator(h: &CMatrix, t: f64) -> Result<CMatrix> {
    matrix_exponential(&(h * c(0.0, -t)))
}

fn step_count(t: f64, dt: f64) -> Result<usize> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!("step size must be > 0, got {dt}")));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!("duration must be >= 0, got {t}")));
    }
    Ok(((t / dt).ceil() as usize).max(1))
}

/// Integrates `i dψ/dt = H(t) ψ` from 0 to `t` with classical RK4.
///
/// The step is `t / ceil(t / dt)` so the run lands exactly on `t`.
pub fn evolve_state<H>(hamiltonian: H, psi0: &CVector, t: f64, dt: f64) -> Result<CVector>
where
    H: Fn(f64) -> CMatrix,
{
    let steps = step_count(t, dt)?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let h = t / steps as f64;
    let dim = psi0.len();
    let check = |m: &CMatrix| -> Result<()> {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                context: "evolve_state",
                expected: dim,
                found: m.nrows(),
            });
        }
        Ok(())
    };
    let minus_i = c(0.0, -1.0);
    let mut psi = psi0.clone();
    for n in 0..steps {
        let t0 = n as f64 * h;
        let h0 = hamiltonian(t0);
        check(&h0)?;
        let hmid = hamiltonian(t0 + 0.5 * h);
        check(&hmid)?;
        let h1 = hamiltonian(t0 + h);
        check(&h1)?;
        let k1 = &h0 * &psi * minus_i;
        let k2 = &hmid * (&psi + &k1 * c(0.5 * h, 0.0)) * minus_i;
        let k3 = &hmid * (&psi + &k2 * c(0.5 * h, 0.0)) * minus_i;
        let k4 = &h1 * (&psi + &k3 * c(h, 0.0)) * minus_i;
        psi += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
    }
    Ok(psi)
}

/// Runs [`evolve_state`] at `T/DEFAULT_STEPS`, halving the step until the
/// largest amplitude change drops below [`CONVERGENCE_TOL`].
pub fn evolve_state_converged<H>(hamiltonian: H, psi0: &CVector, t: f64) -> Result<CVector>
where
    H: Fn(f64) -> CMatrix,
{
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let mut steps = DEFAULT_STEPS;
    let mut prev = evolve_state(&hamiltonian, psi0, t, t / steps as f64)?;
    for _ in 0..MAX_HALVINGS {
        steps *= 2;
        let next = evolve_state(&hamiltonian, psi0, t, t / steps as f64)?;
        let change = max_abs_diff_vec(&prev, &next);
        prev = next;
        if change < CONVERGENCE_TOL {
            break;
        }
    }
    Ok(prev)
}

/// A linear generator `ρ ↦ L(ρ)` of density-matrix dynamics.
pub trait Superoperator: Sync {
    /// Hilbert-space dimension of the density matrices it acts on.
    fn dim(&self) -> usize;

    fn apply(&self, rho: &CMatrix) -> CMatrix;

    /// Upper bound on the induced Frobenius norm of the generator.
    fn norm_bound(&self) -> f64;
}

fn check_density_dim<L: Superoperator + ?Sized>(l: &L, rho: &CMatrix, context: &'static str) -> Result<()> {
    if rho.nrows() != l.dim() || rho.ncols() != l.dim() {
        return Err(Error::DimensionMismatch {
            context,
            expected: l.dim(),
            found: rho.nrows(),
        });
    }
    Ok(())
}

fn symmetrize(rho: &mut CMatrix) {
    let adj = rho.adjoint();
    *rho += adj;
    *rho *= c(0.5, 0.0);
}

/// Integrates `dρ/dt = L(ρ)` with classical RK4, symmetrizing `ρ ← (ρ+ρ†)/2`
/// after every step.
pub fn evolve_density<L: Superoperator + ?Sized>(
    generator: &L,
    rho0: &CMatrix,
    t: f64,
    dt: f64,
) -> Result<CMatrix> {
    check_density_dim(generator, rho0, "evolve_density")?;
    let steps = step_count(t, dt)?;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let h = t / steps as f64;
    let mut rho = rho0.clone();
    let half = c(0.5 * h, 0.0);
    for _ in 0..steps {
        let k1 = generator.apply(&rho);
        let k2 = generator.apply(&(&rho + &k1 * half));
        let k3 = generator.apply(&(&rho + &k2 * half));
        let k4 = generator.apply(&(&rho + &k3 * c(h, 0.0)));
        rho += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
        symmetrize(&mut rho);
    }
    Ok(rho)
}

/// [`evolve_density`] with the step-halving policy: start at
/// `T/DEFAULT_STEPS` and halve until `figure_of_merit` changes by less than
/// [`CONVERGENCE_TOL`]. Returns the final state and the step count used.
pub fn evolve_density_converged<L, F>(
    generator: &L,
    rho0: &CMatrix,
    t: f64,
    figure_of_merit: F,
) -> Result<(CMatrix, usize)>
where
    L: Superoperator + ?Sized,
    F: Fn(&CMatrix) -> f64,
{
    let mut steps = DEFAULT_STEPS;
    if t == 0.0 {
        return Ok((rho0.clone(), 0));
    }
    let mut rho = evolve_density(generator, rho0, t, t / steps as f64)?;
    let mut fom = figure_of_merit(&rho);
    for _ in 0..MAX_HALVINGS {
        let next = evolve_density(generator, rho0, t, t / (2 * steps) as f64)?;
        let next_fom = figure_of_merit(&next);
        steps *= 2;
        rho = next;
        let change = (next_fom - fom).abs();
        fom = next_fom;
        if change < CONVERGENCE_TOL {
            break;
        }
    }
    Ok((rho, steps))
}

/// Applies `exp(t L)` to `rho` by a truncated Taylor series on substeps of
/// generator norm at most one. Accurate to round-off for time-independent
/// generators; used for piecewise-constant dynamics.
pub fn propagate_density<L: Superoperator + ?Sized>(
    generator: &L,
    rho: &CMatrix,
    t: f64,
) -> Result<CMatrix> {
    check_density_dim(generator, rho, "propagate_density")?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter(format!("duration must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(rho.clone());
    }
    let substeps = (t * generator.norm_bound()).ceil().max(1.0) as usize;
    let h = t / substeps as f64;
    let mut out = rho.clone();
    for _ in 0..substeps {
        let mut term = out.clone();
        let mut sum = out.clone();
        for k in 1..=60 {
            term = generator.apply(&term) * c(h / k as f64, 0.0);
            sum += &term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        out = sum;
        symmetrize(&mut out);
    }
    Ok(out)
}

/// A matrix stored as its nonzero entries, for fast repeated products.
#[derive(Debug, Clone)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn from_dense(m: &CMatrix) -> Self {
        assert!(m.is_square(), "SparseOp requires a square matrix");
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        Self {
            dim: m.nrows(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect(),
        }
    }

    /// `self · m`
    pub fn left_mul(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, m.ncols());
        for &(i, k, v) in &self.entries {
            for j in 0..m.ncols() {
                out[(i, j)] += v * m[(k, j)];
            }
        }
        out
    }

    /// `m · self`
    pub fn right_mul(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.nrows(), self.dim);
        for &(k, j, v) in &self.entries {
            for i in 0..m.nrows() {
                out[(i, j)] += m[(i, k)] * v;
            }
        }
        out
    }

    /// `self · m · self†`
    pub fn sandwich(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for &(i, a, x) in &self.entries {
            for &(j, b, y) in &self.entries {
                out[(i, j)] += x * m[(a, b)] * y.conj();
            }
        }
        out
    }

    /// Induced 2-norm bound `sqrt(‖A‖₁ ‖A‖∞)`.
    pub fn norm_bound(&self) -> f64 {
        let mut rows = vec![0.0; self.dim];
        let mut cols = vec![0.0; self.dim];
        for &(i, j, v) in &self.entries {
            rows[i] += v.norm();
            cols[j] += v.norm();
        }
        let r = rows.into_iter().fold(0.0, f64::max);
        let cmax = cols.into_iter().fold(0.0, f64::max);
        (r * cmax).sqrt()
    }
}

/// Induced 2-norm bound of a dense matrix, `sqrt(‖A‖₁ ‖A‖∞)`.
pub fn norm_bound(a: &CMatrix) -> f64 {
    (one_norm(a) * inf_norm(a)).sqrt()
}

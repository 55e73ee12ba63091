//! Dense-matrix entropy toolkit and the exact Fock-space oracle for
//! quasi-free states.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, herm_fn, hermiticity_defect, log_sum_exp, recompose, trace_prod_re, trace_re, CMatrix, CVector};
use crate::scalar::{cabs, creal, Cplx, Real};

const STATE_TOL: f64 = 1e-12;
/// Eigenvalues below this are treated as kernel.
const KERNEL: f64 = 1e-14;
/// Largest Fock space built explicitly.
pub const MAX_FOCK_SITES: usize = 6;

/// Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    mat: CMatrix<T>,
}

/// Relative entropy with the amount by which eigenvalues were clamped before
/// taking logarithms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelEntropy<T> {
    pub value: T,
    pub clamped: T,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(mat: CMatrix<T>) -> Result<Self> {
        if !mat.is_square() || mat.nrows() == 0 || mat.nrows() > 1 << MAX_FOCK_SITES {
            return Err(Error::NotAState(format!("shape {}×{}", mat.nrows(), mat.ncols())));
        }
        let tol = T::of(STATE_TOL);
        let herm = hermiticity_defect(&mat);
        if herm > tol {
            return Err(Error::NotAState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = trace_re(&mat);
        if (tr - T::one()).abs() > tol {
            return Err(Error::NotAState(format!("trace {tr} ≠ 1")));
        }
        let (w, _) = herm_eig(&mat);
        let min = w.min();
        if min < -tol {
            return Err(Error::NotAState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { mat })
    }

    /// Normalizes a positive operator to unit trace.
    pub fn from_positive(mat: CMatrix<T>) -> Result<Self> {
        let tr = trace_re(&mat);
        if !(tr > T::zero()) {
            return Err(Error::NotAState(format!("trace {tr} is not positive")));
        }
        Self::new(mat / creal(tr))
    }

    /// `e^H / Tr e^H`.
    pub fn gibbs(h: &CMatrix<T>) -> Result<Self> {
        let (w, u) = herm_eig(h);
        let z = log_sum_exp(&w);
        Self::new(recompose(&w, &u, |x| (x - z).exp()))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { mat: CMatrix::identity(dim, dim) / creal(T::of_usize(dim)) }
    }

    pub fn pure(v: &CVector<T>) -> Result<Self> {
        let n = v.norm();
        Self::new(v * v.adjoint() / creal(n * n))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.mat
    }

    /// Expectation `Tr(ρA)`.
    pub fn expect(&self, a: &CMatrix<T>) -> T {
        trace_prod_re(&self.mat, a)
    }
}

/// `S(γ|ω) = Tr γ(log γ − log ω)`, `+∞` when `ker ω ⊄ ker γ`.
pub fn rel_entropy_dm<T: Real>(gamma: &DensityMatrix<T>, omega: &DensityMatrix<T>) -> Result<RelEntropy<T>> {
    if gamma.dim() != omega.dim() {
        return Err(Error::NotAState(format!("dimension mismatch {} vs {}", gamma.dim(), omega.dim())));
    }
    let kernel = T::of(KERNEL);
    let (wg, _) = herm_eig(&gamma.mat);
    let (wo, uo) = herm_eig(&omega.mat);
    let mut clamped = T::zero();
    let mut s = T::zero();
    for &g in wg.iter() {
        if g > kernel {
            let gc = g.min(T::one());
            clamped += g - gc;
            s += gc * gc.ln();
        } else {
            clamped += g.abs();
        }
    }
    for j in 0..omega.dim() {
        let v = uo.column(j);
        let weight = (v.adjoint() * &gamma.mat * v)[(0, 0)].re;
        if wo[j] <= kernel {
            if weight > T::of(STATE_TOL) {
                return Ok(RelEntropy { value: T::one() / T::zero(), clamped });
            }
            clamped += (kernel - wo[j]).abs();
            continue;
        }
        s -= weight * wo[j].min(T::one()).ln();
    }
    Ok(RelEntropy { value: s.max(T::zero()), clamped })
}

/// `δ⁻¹ log Tr e^{δh + log ω} + δ⁻¹ S(γ|ω) − γ(h)`, nonnegative by the
/// variational characterization of the relative entropy.
pub fn entropy_inequality_gap<T: Real>(
    gamma: &DensityMatrix<T>,
    omega: &DensityMatrix<T>,
    h: &CMatrix<T>,
    delta: T,
) -> Result<T> {
    if !(delta > T::zero()) {
        return Err(Error::Invalid(format!("δ must be positive, got {delta}")));
    }
    let (wo, uo) = herm_eig(&omega.mat);
    let min = wo.min();
    if min < T::of(KERNEL) {
        return Err(Error::SingularReference(min.to_f64_lossy()));
    }
    let log_omega = recompose(&wo, &uo, |x| x.ln());
    let m = h * creal(delta) + log_omega;
    let (wm, _) = herm_eig(&m);
    let s = rel_entropy_dm(gamma, omega)?.value;
    Ok((log_sum_exp(&wm) + s) / delta - gamma.expect(h))
}

/// `Tr e^A e^B − Tr e^{A+B}`.
pub fn golden_thompson_gap<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let ea = herm_fn(a, |x| x.exp());
    let eb = herm_fn(b, |x| x.exp());
    let eab = herm_fn(&(a + b), |x| x.exp());
    trace_prod_re(&ea, &eb) - trace_re(&eab)
}

/// `Tr e^A − Σ_j e^{⟨φ_j, Aφ_j⟩}` for an orthonormal (possibly partial) frame.
pub fn peierls_gap<T: Real>(a: &CMatrix<T>, frame: &[CVector<T>]) -> Result<T> {
    let k = frame.len();
    let mut dev = T::zero();
    for i in 0..k {
        if frame[i].len() != a.nrows() {
            return Err(Error::Invalid("frame vector has the wrong length".into()));
        }
        for j in 0..=i {
            let ip = frame[i].dotc(&frame[j]);
            let want = if i == j { Cplx::new(T::one(), T::zero()) } else { Cplx::new(T::zero(), T::zero()) };
            dev = dev.max(cabs(ip - want));
        }
    }
    if dev > T::of(STATE_TOL) || k > a.nrows() {
        return Err(Error::NotOrthonormal(dev.to_f64_lossy()));
    }
    let tr = trace_re(&herm_fn(a, |x| x.exp()));
    let sum = frame.iter().fold(T::zero(), |s, phi| s + phi.dotc(&(a * phi)).re.exp());
    Ok(tr - sum)
}

/// Annihilation operator of mode `j` on `2^l` Fock states (bit `j` of the
/// basis index is the occupation of mode `j`), with the Jordan–Wigner sign
/// `(−1)^{#occupied modes below j}`.
pub fn annihilator<T: Real>(l: usize, j: usize) -> CMatrix<T> {
    let dim = 1usize << l;
    let mut a = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        if s >> j & 1 == 1 {
            let below = (s & ((1 << j) - 1)).count_ones();
            let sign = if below % 2 == 0 { T::one() } else { -T::one() };
            a[(s ^ (1 << j), s)] = creal(sign);
        }
    }
    a
}

/// Many-body state `∝ exp(Σ K_ij a⁺_i a_j)` on `l ≤ 6` modes.
pub fn fock_oracle_gaussian<T: Real>(l: usize, k: &CMatrix<T>) -> Result<DensityMatrix<T>> {
    if l > MAX_FOCK_SITES {
        return Err(Error::TooLarge { sites: l, max: MAX_FOCK_SITES });
    }
    if k.nrows() != l || k.ncols() != l {
        return Err(Error::Invalid(format!("one-particle matrix must be {l}×{l}")));
    }
    let ops: Vec<CMatrix<T>> = (0..l).map(|j| annihilator(l, j)).collect();
    let dim = 1usize << l;
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..l {
        for j in 0..l {
            if k[(i, j)] != Cplx::new(T::zero(), T::zero()) {
                h += ops[i].adjoint() * &ops[j] * k[(i, j)];
            }
        }
    }
    DensityMatrix::gibbs(&h)
}

/// `C(x, y) = Tr(ρ a⁺_y a_x)`.
pub fn fock_correlations<T: Real>(l: usize, rho: &DensityMatrix<T>) -> CMatrix<T> {
    let ops: Vec<CMatrix<T>> = (0..l).map(|j| annihilator(l, j)).collect();
    let mut c = CMatrix::zeros(l, l);
    for x in 0..l {
        for y in 0..l {
            let op = ops[y].adjoint() * &ops[x];
            c[(x, y)] = (rho.matrix() * op).trace();
        }
    }
    c
}

/// Reduced state on the modes in `keep` (tensor-factor partial trace in the
/// occupation basis; for even states this is the fermionic restriction).
pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, l: usize, keep: &[usize]) -> Result<DensityMatrix<T>> {
    if rho.dim() != 1 << l || keep.iter().any(|&k| k >= l) {
        return Err(Error::Invalid("partial trace: bad mode selection".into()));
    }
    let traced: Vec<usize> = (0..l).filter(|m| !keep.contains(m)).collect();
    let sub = |s: usize| keep.iter().enumerate().fold(0usize, |acc, (b, &m)| acc | ((s >> m & 1) << b));
    let rest = |s: usize| traced.iter().enumerate().fold(0usize, |acc, (b, &m)| acc | ((s >> m & 1) << b));
    let n = 1usize << keep.len();
    let mut out: CMatrix<T> = DMatrix::zeros(n, n);
    for s in 0..rho.dim() {
        for t in 0..rho.dim() {
            if rest(s) == rest(t) {
                out[(sub(s), sub(t))] += rho.matrix()[(s, t)];
            }
        }
    }
    DensityMatrix::new(out)
}

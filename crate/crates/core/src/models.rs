//! The worked examples: a pure decoherence model with user-supplied
//! coefficient functions, and the exactly solvable two-rate qubit dynamics
//! whose closed forms serve as oracles for the generic machinery.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generator::{ScalarFn, ZFamily};
use crate::lindblad::{build_generator, is_cpt_map, is_lindblad_generator, LindbladSpec, Verdict};
use crate::quad::adaptive_quad;
use crate::superop::{matrix_unit, re, sandwich_superop, CMatrix, SuperOp, IM};

/// L₀ ρ = σz ρ σz − ρ: pure dephasing at unit rate.
pub fn dephasing_generator() -> SuperOp {
    let sigma_z = CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-1.0)]);
    build_generator(&LindbladSpec::single_channel(2, 1.0, sigma_z).expect("valid spec"))
}

/// L₁: jump |1⟩ → |0⟩ at unit rate (V = |0⟩⟨1|).
pub fn damping_generator() -> SuperOp {
    build_generator(&LindbladSpec::single_channel(2, 1.0, matrix_unit(2, 0, 1)).expect("valid spec"))
}

/// L₂: jump |0⟩ → |1⟩ at unit rate (V = |1⟩⟨0|).
pub fn pumping_generator() -> SuperOp {
    build_generator(&LindbladSpec::single_channel(2, 1.0, matrix_unit(2, 1, 0)).expect("valid spec"))
}

/// A coefficient function c_mn(t): a named preset with closed-form
/// derivative, or an arbitrary callable differentiated numerically.
#[derive(Clone)]
pub enum CoeffFn {
    Preset(ScalarFn),
    Custom(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl std::fmt::Debug for CoeffFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoeffFn::Preset(p) => write!(f, "Preset({p:?})"),
            CoeffFn::Custom(_) => write!(f, "Custom(...)"),
        }
    }
}

impl CoeffFn {
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        match self {
            CoeffFn::Preset(p) => p.eval(t),
            CoeffFn::Custom(f) => Ok(f(t)),
        }
    }

    /// Closed form for presets, central difference (h = 1e−6) otherwise.
    pub fn derivative(&self, t: f64) -> Result<Complex64> {
        match self {
            CoeffFn::Preset(p) => p.derivative(t),
            CoeffFn::Custom(f) => {
                let h = 1e-6;
                if t >= h {
                    Ok((f(t + h) - f(t - h)) / re(2.0 * h))
                } else {
                    Ok((f(t + h) - f(t)) / re(h))
                }
            }
        }
    }
}

/// Pure decoherence: ρ(t) = Σ_{mn} c_mn(t) P_m ρ P_n with projectors
/// P_n = |n⟩⟨n| and a positive semidefinite coefficient matrix with unit
/// diagonal. Populations are frozen; coherences evolve by c_mn.
#[derive(Debug, Clone)]
pub struct PureDecoherenceModel {
    dim: usize,
    coeffs: Vec<Vec<CoeffFn>>,
}

impl PureDecoherenceModel {
    /// Full coefficient matrix. Diagonal entries must be the constant 1;
    /// preset diagonals are checked structurally, callables by sampling.
    pub fn new(coeffs: Vec<Vec<CoeffFn>>) -> Result<Self> {
        let dim = coeffs.len();
        if dim < 2 {
            return Err(Error::Validation(
                "pure decoherence needs dimension at least 2".into(),
            ));
        }
        if coeffs.iter().any(|row| row.len() != dim) {
            return Err(Error::Validation(
                "coefficient matrix must be square".into(),
            ));
        }
        for (n, row) in coeffs.iter().enumerate() {
            match &row[n] {
                CoeffFn::Preset(ScalarFn::Constant { value }) if (value - re(1.0)).norm() == 0.0 => {}
                CoeffFn::Preset(_) => {
                    return Err(Error::Validation(format!(
                        "diagonal coefficient c_{n}{n} must be the constant 1"
                    )))
                }
                CoeffFn::Custom(f) => {
                    for t in [0.0, 0.5, 1.0, 2.0] {
                        if (f(t) - re(1.0)).norm() > 1e-12 {
                            return Err(Error::Validation(format!(
                                "diagonal coefficient c_{n}{n} must be the constant 1 (differs at t = {t})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(PureDecoherenceModel { dim, coeffs })
    }

    /// Qubit specialization: c₁₁ = c₂₂ = 1, c₁₂ = γ, c₂₁ = γ̄.
    pub fn qubit(gamma: ScalarFn) -> Result<Self> {
        let one = CoeffFn::Preset(ScalarFn::constant(1.0));
        let g = CoeffFn::Preset(gamma.clone());
        let g_conj = CoeffFn::Preset(gamma.conj());
        Self::new(vec![vec![one.clone(), g], vec![g_conj, one]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The numeric coefficient matrix [c_mn(t)].
    pub fn coefficient_matrix(&self, t: f64) -> Result<CMatrix> {
        let d = self.dim;
        let mut c = CMatrix::zeros(d, d);
        for m in 0..d {
            for n in 0..d {
                c[(m, n)] = self.coeffs[m][n].eval(t)?;
            }
        }
        Ok(c)
    }

    fn coefficient(&self, m: usize, n: usize) -> &CoeffFn {
        &self.coeffs[m][n]
    }
}

/// Dynamical map of the pure decoherence model at time t. Errors when the
/// coefficient matrix fails positive semidefiniteness (the Kraus form then
/// does not exist).
pub fn pure_decoherence_map(m: &PureDecoherenceModel, t: f64) -> Result<SuperOp> {
    let d = m.dim();
    let c = m.coefficient_matrix(t)?;
    let herm = crate::superop::hermiticity_defect(&c);
    if herm > 1e-10 {
        return Err(Error::Validation(format!(
            "coefficient matrix at t = {t} is not Hermitian: defect {herm:e}"
        )));
    }
    let eigs = crate::superop::hermitian_eigvals_tol(&c, 1e-8)?;
    if eigs[0] < -1e-10 {
        return Err(Error::Validation(format!(
            "coefficient matrix at t = {t} has negative eigenvalue {:e}",
            eigs[0]
        )));
    }
    let mut total = SuperOp::zero(d);
    for i in 0..d {
        for j in 0..d {
            let p_i = matrix_unit(d, i, i);
            let p_j = matrix_unit(d, j, j);
            total = &total + &sandwich_superop(&p_i, &p_j)?.scale(c[(i, j)]);
        }
    }
    Ok(total)
}

/// Local generator of the pure decoherence model: Σ α_mn(t) P_m · P_n with
/// α_mn = ċ_mn / c_mn. Errors with the offending (m, n, t) when a
/// coefficient vanishes.
pub fn pure_decoherence_generator(m: &PureDecoherenceModel, t: f64) -> Result<SuperOp> {
    let d = m.dim();
    let mut total = SuperOp::zero(d);
    for i in 0..d {
        for j in 0..d {
            let value = m.coefficient(i, j).eval(t)?;
            if value.norm() <= 1e-14 {
                return Err(Error::Singularity(format!(
                    "coefficient c_{i}{j} vanishes at t = {t}"
                )));
            }
            let alpha = m.coefficient(i, j).derivative(t)? / value;
            if alpha.norm() == 0.0 {
                continue;
            }
            let p_i = matrix_unit(d, i, i);
            let p_j = matrix_unit(d, j, j);
            total = &total + &sandwich_superop(&p_i, &p_j)?.scale(alpha);
        }
    }
    Ok(total)
}

/// Dephasing coefficients of the qubit model: b₁ = Im(γ̇/2γ),
/// b₂ = Re(γ̇/2γ), so that L = i b₁ [σz, ·] − b₂ (σz · σz − ·).
pub fn qubit_dephasing_coefficients(m: &PureDecoherenceModel, t: f64) -> Result<(f64, f64)> {
    if m.dim() != 2 {
        return Err(Error::Validation(format!(
            "dephasing coefficients are defined for the qubit model, dim = {}",
            m.dim()
        )));
    }
    let gamma = m.coefficient(0, 1).eval(t)?;
    if gamma.norm() <= 1e-14 {
        return Err(Error::Singularity(format!(
            "coefficient c_01 vanishes at t = {t}"
        )));
    }
    let ratio = m.coefficient(0, 1).derivative(t)? / (re(2.0) * gamma);
    Ok((ratio.im, ratio.re))
}

/// The exactly solvable two-rate qubit dynamics: X(t) = a₁(t) L₁ + a₂(t) L₂
/// over the damping/pumping pair, with all of its closed-form derived
/// quantities (Wronskian, f, disentangling factors ν₁, ν₂, …).
#[derive(Debug, Clone)]
pub struct TwoRateModel {
    a1: ScalarFn,
    a2: ScalarFn,
    l1: SuperOp,
    l2: SuperOp,
}

impl TwoRateModel {
    pub fn new(a1: ScalarFn, a2: ScalarFn) -> Result<Self> {
        if !a1.is_real() || !a2.is_real() {
            return Err(Error::Validation(
                "two-rate schedules must be real-valued".into(),
            ));
        }
        Ok(TwoRateModel {
            a1,
            a2,
            l1: damping_generator(),
            l2: pumping_generator(),
        })
    }

    pub fn schedules(&self) -> (&ScalarFn, &ScalarFn) {
        (&self.a1, &self.a2)
    }

    pub fn generators(&self) -> (&SuperOp, &SuperOp) {
        (&self.l1, &self.l2)
    }

    /// Instantaneous rates (a₁(t), a₂(t)).
    pub fn rates(&self, t: f64) -> Result<(f64, f64)> {
        Ok((self.a1.eval(t)?.re, self.a2.eval(t)?.re))
    }

    /// Accumulated rates (A₁(t), A₂(t)) from 0.
    pub fn accumulated(&self, t: f64) -> Result<(f64, f64)> {
        Ok((
            self.a1.integral(0.0, t)?.re,
            self.a2.integral(0.0, t)?.re,
        ))
    }

    /// The exponent family Z(t) = A₁ L₁ + A₂ L₂ (initial point 0).
    pub fn z_family(&self) -> ZFamily {
        ZFamily::linear(
            0.0,
            vec![self.l1.clone(), self.l2.clone()],
            vec![self.a1.clone(), self.a2.clone()],
        )
        .expect("schedules validated at construction")
    }

    /// The same family treated as homogeneous (schedules in elapsed time),
    /// the reading under which Markovianity of this dynamics is probed.
    pub fn z_family_homogeneous(&self) -> ZFamily {
        ZFamily::linear_homogeneous(
            0.0,
            vec![self.l1.clone(), self.l2.clone()],
            vec![self.a1.clone(), self.a2.clone()],
        )
        .expect("schedules validated at construction")
    }
}

/// The correction function f(t) = (W/A)(1 + (e^{−A} − 1)/A), where
/// W = A₁a₂ − A₂a₁ is the Wronskian and A = A₁ + A₂. Near A = 0 the bracket
/// is evaluated by its series A/2 − A²/6 + A³/24.
pub fn two_rate_f(m: &TwoRateModel, t: f64) -> Result<f64> {
    let (a1, a2) = m.rates(t)?;
    let (acc1, acc2) = m.accumulated(t)?;
    let w = acc1 * a2 - acc2 * a1;
    let a = acc1 + acc2;
    Ok(f_from_parts(w, a))
}

fn f_from_parts(w: f64, a: f64) -> f64 {
    if a.abs() < 1e-4 {
        // f = (W/A)·(A/2 − A²/6 + A³/24 + …) = W·(1/2 − A/6 + A²/24 + …)
        w * (0.5 - a / 6.0 + a * a / 24.0)
    } else {
        (w / a) * (1.0 + (-a).exp_m1() / a)
    }
}

/// Local generator of the two-rate model: b₁ = a₁ + f, b₂ = a₂ − f, and
/// the superoperator b₁ L₁ + b₂ L₂.
pub fn two_rate_generator(m: &TwoRateModel, t: f64) -> Result<(f64, f64, SuperOp)> {
    let (a1, a2) = m.rates(t)?;
    let f = two_rate_f(m, t)?;
    let b1 = a1 + f;
    let b2 = a2 - f;
    let op = &m.l1.scale_re(b1) + &m.l2.scale_re(b2);
    Ok((b1, b2, op))
}

/// Both sides of the disentangling identity
/// e^{Z(t)} = e^{ln ν₁ L₁} · e^{ln ν₂ L₂} with
/// ν₁ = A/(A₁e^{−A} + A₂), ν₂ = (A₁ + A₂e^{A})/A, and the residual defect.
#[derive(Debug, Clone)]
pub struct Disentangling {
    pub nu1: f64,
    pub nu2: f64,
    pub lhs: SuperOp,
    pub rhs: SuperOp,
    pub defect: f64,
}

pub fn two_rate_disentangle(m: &TwoRateModel, t: f64) -> Result<Disentangling> {
    let (acc1, acc2) = m.accumulated(t)?;
    let (nu1, nu2) = disentangling_factors(acc1, acc2);
    let z = m.z_family().z_at(t)?;
    let lhs = z.expm()?;
    let rhs = &m.l1.scale_re(nu1.ln()).expm()? * &m.l2.scale_re(nu2.ln()).expm()?;
    let defect = (&lhs - &rhs).max_abs();
    Ok(Disentangling {
        nu1,
        nu2,
        lhs,
        rhs,
        defect,
    })
}

fn disentangling_factors(acc1: f64, acc2: f64) -> (f64, f64) {
    let a = acc1 + acc2;
    if a == 0.0 {
        return (1.0, 1.0);
    }
    // A₁e^{−A} + A₂ = A + A₁(e^{−A} − 1), stable through expm1
    let nu1 = a / (a + acc1 * (-a).exp_m1());
    let nu2 = 1.0 + acc2 * a.exp_m1() / a;
    (nu1, nu2)
}

/// Integrated-generator coefficients B₁ = A₁ + F, B₂ = A₂ − F with
/// F = ∫₀ᵗ f, plus the Lindblad verdict on B₁L₁ + B₂L₂ — the quantity that
/// "needs not" stay in the Lindblad cone even though B₁ + B₂ = A ≥ 0.
pub fn two_rate_b(m: &TwoRateModel, t: f64) -> Result<(f64, f64, Verdict)> {
    let (acc1, acc2) = m.accumulated(t)?;
    let f = |u: f64| two_rate_f(m, u);
    let big_f = adaptive_quad(&f, 0.0, t, 1e-10)?;
    let b1 = acc1 + big_f;
    let b2 = acc2 - big_f;
    let op = &m.l1.scale_re(b1) + &m.l2.scale_re(b2);
    let verdict = is_lindblad_generator(&op, 1e-10)?;
    Ok((b1, b2, verdict))
}

/// One row of the B-coefficient scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub schedule_index: usize,
    pub t: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Exploratory scan of min(B₁, B₂) over schedule families and times; the
/// minimum and where it occurs answer whether the integrated generator ever
/// leaves the Lindblad cone within the scanned families.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub min_value: f64,
    pub argmin: (usize, f64),
}

pub fn two_rate_b_scan(schedules: &[(ScalarFn, ScalarFn)], times: &[f64]) -> Result<ScanReport> {
    if schedules.is_empty() || times.is_empty() {
        return Err(Error::Validation("scan needs schedules and times".into()));
    }
    let mut rows = Vec::with_capacity(schedules.len() * times.len());
    let mut min_value = f64::INFINITY;
    let mut argmin = (0usize, times[0]);
    for (idx, (a1, a2)) in schedules.iter().enumerate() {
        let model = TwoRateModel::new(a1.clone(), a2.clone())?;
        for &t in times {
            let (b1, b2, _) = two_rate_b(&model, t)?;
            if b1.min(b2) < min_value {
                min_value = b1.min(b2);
                argmin = (idx, t);
            }
            rows.push(ScanRow {
                schedule_index: idx,
                t,
                b1,
                b2,
            });
        }
    }
    Ok(ScanReport {
        rows,
        min_value,
        argmin,
    })
}

/// One sample of the σz-limit study.
#[derive(Debug, Clone)]
pub struct SigmaZLimitEntry {
    pub t: f64,
    pub cpt: Verdict,
    /// Factor multiplying the coherences, cos²t in closed form.
    pub off_diagonal_factor: f64,
    /// Distance of Λ(t) to the conjugation map ρ ↦ σz ρ σz.
    pub distance_to_conjugation: f64,
    /// Distance of Λ(t) to the projection map ρ ↦ ½(ρ + σz ρ σz).
    pub distance_to_projection: f64,
}

#[derive(Debug, Clone)]
pub struct SigmaZLimitReport {
    pub entries: Vec<SigmaZLimitEntry>,
    /// Flags the mismatch between the two candidate limits.
    pub note: String,
}

/// Study of Λ(t) = e^{−ln(cos t)·L₀} on [0, π/2): CPT verdicts, the
/// off-diagonal decay factor, and distances to the two candidate limit maps.
/// The observed limit is reported without interpretation.
pub fn sigma_z_limit_study(t_values: &[f64]) -> Result<SigmaZLimitReport> {
    let l0 = dephasing_generator();
    let sigma_z = CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-1.0)]);
    let conjugation = sandwich_superop(&sigma_z, &sigma_z)?;
    let projection = (&SuperOp::identity(2) + &conjugation).scale_re(0.5);

    let mut entries = Vec::with_capacity(t_values.len());
    for &t in t_values {
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&t) {
            return Err(Error::Domain(format!(
                "σz-limit study is defined on [0, π/2), got t = {t}"
            )));
        }
        let map = l0.scale_re(-t.cos().ln()).expm()?;
        let e01 = matrix_unit(2, 0, 1);
        let off_diagonal_factor = map.apply(&e01)?[(0, 1)].re;
        entries.push(SigmaZLimitEntry {
            t,
            cpt: is_cpt_map(&map, 1e-10)?,
            off_diagonal_factor,
            distance_to_conjugation: (&map - &conjugation).max_abs(),
            distance_to_projection: (&map - &projection).max_abs(),
        });
    }
    Ok(SigmaZLimitReport {
        entries,
        note: "off-diagonal factor cos²t decays to 0, so the numerical limit is the \
               diagonal-projection map ρ ↦ ½(ρ + σzρσz); the conjugation map ρ ↦ σzρσz \
               (off-diagonal factor −1) is not approached"
            .into(),
    })
}

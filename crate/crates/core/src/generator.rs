//! Exponent families Z(t,t₀) and the local generator they induce,
//!
//!   L(t,t₀) = ∫₀¹ e^{sZ(t,t₀)} X(t,t₀) e^{−sZ(t,t₀)} ds,
//!
//! where X is the integrand of Z(t,t₀) = ∫_{t₀}^t X(u,t₀) du. Two
//! structurally different evaluation paths are provided — Gauss–Legendre
//! quadrature of the conjugated integrand and a Fréchet-derivative route
//! through exp([[Z, X], [0, Z]]) — and cross-checked against each other.
//! When the family commutes with itself at all times the formula collapses
//! to L = X; that shortcut is only claimed after a sampled commutator check.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::Verdict;
use crate::quad::{adaptive_quad_matrix, gauss_legendre_01};
use crate::superop::{expm, expm_frechet, max_abs, re, CMatrix, SuperOp};

/// Scalar schedule: one of a closed set of presets, each with exact
/// evaluation, integral, and derivative.
#[derive(Debug, Clone)]
pub enum ScalarFn {
    /// c
    Constant { value: Complex64 },
    /// Σ_k c_k t^k with real coefficients, c_0 first.
    Polynomial { coefficients: Vec<f64> },
    /// c · e^{−λt} · e^{−iωt}
    ExpDecay {
        amplitude: Complex64,
        decay_rate: f64,
        frequency: f64,
    },
    /// values[i] on [breakpoints[i−1], breakpoints[i]), with values.len() ==
    /// breakpoints.len() + 1 and the first segment starting at 0.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

impl ScalarFn {
    pub fn constant(value: f64) -> Self {
        ScalarFn::Constant { value: re(value) }
    }

    pub fn constant_complex(value: Complex64) -> Self {
        ScalarFn::Constant { value }
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation(
                "polynomial needs at least one finite coefficient".into(),
            ));
        }
        Ok(ScalarFn::Polynomial { coefficients })
    }

    pub fn exp_decay(amplitude: Complex64, decay_rate: f64, frequency: f64) -> Result<Self> {
        if !amplitude.re.is_finite()
            || !amplitude.im.is_finite()
            || !decay_rate.is_finite()
            || !frequency.is_finite()
        {
            return Err(Error::Validation("exp_decay parameters must be finite".into()));
        }
        Ok(ScalarFn::ExpDecay {
            amplitude,
            decay_rate,
            frequency,
        })
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::Validation(format!(
                "piecewise_constant needs breakpoints.len()+1 values, got {} breakpoints and {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite() || *b <= 0.0)
            || values.iter().any(|v| !v.is_finite())
        {
            return Err(Error::Validation(
                "piecewise_constant parameters must be finite with positive breakpoints".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(
                "piecewise_constant breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(ScalarFn::PiecewiseConstant {
            breakpoints,
            values,
        })
    }

    /// The complex conjugate schedule t ↦ conj(f(t)); presets are closed
    /// under conjugation.
    pub fn conj(&self) -> ScalarFn {
        match self {
            ScalarFn::Constant { value } => ScalarFn::Constant {
                value: value.conj(),
            },
            ScalarFn::Polynomial { .. } | ScalarFn::PiecewiseConstant { .. } => self.clone(),
            ScalarFn::ExpDecay {
                amplitude,
                decay_rate,
                frequency,
            } => ScalarFn::ExpDecay {
                amplitude: amplitude.conj(),
                decay_rate: *decay_rate,
                frequency: -frequency,
            },
        }
    }

    /// True when the preset takes real values for all t.
    pub fn is_real(&self) -> bool {
        match self {
            ScalarFn::Constant { value } => value.im == 0.0,
            ScalarFn::Polynomial { .. } | ScalarFn::PiecewiseConstant { .. } => true,
            ScalarFn::ExpDecay {
                amplitude,
                frequency,
                ..
            } => amplitude.im == 0.0 && *frequency == 0.0,
        }
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!(
                "scalar schedule is defined for t ≥ 0, got t = {t}"
            )));
        }
        Ok(match self {
            ScalarFn::Constant { value } => *value,
            ScalarFn::Polynomial { coefficients } => {
                let mut acc = 0.0;
                for &c in coefficients.iter().rev() {
                    acc = acc * t + c;
                }
                re(acc)
            }
            ScalarFn::ExpDecay {
                amplitude,
                decay_rate,
                frequency,
            } => {
                let exponent = Complex64::new(-decay_rate * t, -frequency * t);
                amplitude * exponent.exp()
            }
            ScalarFn::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let idx = breakpoints.partition_point(|&b| b <= t);
                re(values[idx])
            }
        })
    }

    /// Exact integral ∫_{from}^{to}.
    pub fn integral(&self, from: f64, to: f64) -> Result<Complex64> {
        if !(from >= 0.0 && to >= from) {
            return Err(Error::Domain(format!(
                "integration range [{from}, {to}] leaves the schedule domain"
            )));
        }
        Ok(match self {
            ScalarFn::Constant { value } => value * re(to - from),
            ScalarFn::Polynomial { coefficients } => {
                let anti = |t: f64| {
                    let mut acc = 0.0;
                    for (k, &c) in coefficients.iter().enumerate().rev() {
                        acc = acc * t + c / (k as f64 + 1.0);
                    }
                    acc * t
                };
                re(anti(to) - anti(from))
            }
            ScalarFn::ExpDecay {
                amplitude,
                decay_rate,
                frequency,
            } => {
                let mu = Complex64::new(*decay_rate, *frequency);
                if mu.norm() < 1e-300 {
                    amplitude * re(to - from)
                } else {
                    amplitude * ((-mu * from).exp() - (-mu * to).exp()) / mu
                }
            }
            ScalarFn::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let mut acc = 0.0;
                let mut lo = from;
                for (i, &b) in breakpoints.iter().enumerate() {
                    if b <= lo {
                        continue;
                    }
                    if b >= to {
                        break;
                    }
                    acc += values[i] * (b - lo);
                    lo = b;
                }
                let idx = breakpoints.partition_point(|&b| b <= lo);
                acc += values[idx] * (to - lo);
                re(acc)
            }
        })
    }

    /// Closed-form derivative; piecewise-constant schedules differentiate to
    /// zero away from their breakpoints.
    pub fn derivative(&self, t: f64) -> Result<Complex64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!(
                "scalar schedule is defined for t ≥ 0, got t = {t}"
            )));
        }
        Ok(match self {
            ScalarFn::Constant { .. } | ScalarFn::PiecewiseConstant { .. } => re(0.0),
            ScalarFn::Polynomial { coefficients } => {
                let mut acc = 0.0;
                for (k, &c) in coefficients.iter().enumerate().skip(1).rev() {
                    acc = acc * t + c * k as f64;
                }
                re(acc)
            }
            ScalarFn::ExpDecay {
                amplitude,
                decay_rate,
                frequency,
            } => {
                let mu = Complex64::new(*decay_rate, *frequency);
                -mu * amplitude * (-mu * t).exp()
            }
        })
    }
}

/// Z(t,t₀) = Σ_k A_k(t,t₀) L_k over fixed generators, with A_k the exact
/// integrals of the scalar schedules a_k.
#[derive(Clone)]
pub struct LinearZ {
    pub generators: Vec<SuperOp>,
    pub coefficients: Vec<ScalarFn>,
    /// When set, schedules are functions of elapsed time u − t₀ rather than
    /// absolute time, so the family is homogeneous by construction.
    pub homogeneous: bool,
}

/// Caller-supplied map (t, t₀) → Z(t,t₀).
pub type ZCallable = Arc<dyn Fn(f64, f64) -> Result<SuperOp> + Send + Sync>;

#[derive(Clone)]
pub enum ZForm {
    Linear(LinearZ),
    Callable(ZCallable),
}

/// Time-parameterized exponent family with Z(t₀,t₀) = 0.
#[derive(Clone)]
pub struct ZFamily {
    dim: usize,
    t0: f64,
    form: ZForm,
}

impl std::fmt::Debug for ZFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.form {
            ZForm::Linear(lz) => format!(
                "Linear({} generators, homogeneous: {})",
                lz.generators.len(),
                lz.homogeneous
            ),
            ZForm::Callable(_) => "Callable".into(),
        };
        write!(f, "ZFamily {{ dim: {}, t0: {}, form: {kind} }}", self.dim, self.t0)
    }
}

impl ZFamily {
    /// Inhomogeneous linear family: schedules are functions of absolute time.
    pub fn linear(t0: f64, generators: Vec<SuperOp>, coefficients: Vec<ScalarFn>) -> Result<Self> {
        Self::linear_inner(t0, generators, coefficients, false)
    }

    /// Homogeneous linear family: schedules are functions of elapsed time.
    pub fn linear_homogeneous(
        t0: f64,
        generators: Vec<SuperOp>,
        coefficients: Vec<ScalarFn>,
    ) -> Result<Self> {
        Self::linear_inner(t0, generators, coefficients, true)
    }

    fn linear_inner(
        t0: f64,
        generators: Vec<SuperOp>,
        coefficients: Vec<ScalarFn>,
        homogeneous: bool,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Validation(
                "a linear exponent family needs at least one generator".into(),
            ));
        }
        if generators.len() != coefficients.len() {
            return Err(Error::Validation(format!(
                "{} generators but {} coefficient schedules",
                generators.len(),
                coefficients.len()
            )));
        }
        let dim = generators[0].dim();
        if generators.iter().any(|g| g.dim() != dim) {
            return Err(Error::Dimension(
                "all generators must act on the same dimension".into(),
            ));
        }
        if !t0.is_finite() || t0 < 0.0 {
            return Err(Error::Validation(format!(
                "initial time must be finite and ≥ 0, got {t0}"
            )));
        }
        Ok(ZFamily {
            dim,
            t0,
            form: ZForm::Linear(LinearZ {
                generators,
                coefficients,
                homogeneous,
            }),
        })
    }

    /// Family given by an arbitrary callable. Z(t₀,t₀) = 0 is checked at
    /// construction (‖Z(t₀,t₀)‖ ≤ 1e−12).
    pub fn callable(
        dim: usize,
        t0: f64,
        f: impl Fn(f64, f64) -> Result<SuperOp> + Send + Sync + 'static,
    ) -> Result<Self> {
        let zf = ZFamily {
            dim,
            t0,
            form: ZForm::Callable(Arc::new(f)),
        };
        let at_origin = zf.z_at(t0)?;
        let norm = at_origin.max_abs();
        if norm > 1e-12 {
            return Err(Error::Validation(format!(
                "Z(t₀,t₀) must vanish, got norm {norm:e}"
            )));
        }
        if at_origin.dim() != dim {
            return Err(Error::Dimension(
                "callable returned a superoperator of the wrong dimension".into(),
            ));
        }
        Ok(zf)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Z(t, t₀) from the family's own initial point.
    pub fn z_at(&self, t: f64) -> Result<SuperOp> {
        self.z_between(self.t0, t)
    }

    /// Z(t, s) re-based at an arbitrary initial point s ∈ [t₀, t].
    pub fn z_between(&self, s: f64, t: f64) -> Result<SuperOp> {
        self.check_ordering(s, t)?;
        match &self.form {
            ZForm::Linear(lz) => {
                let mut total = SuperOp::zero(self.dim);
                for (gen, coeff) in lz.generators.iter().zip(lz.coefficients.iter()) {
                    let a = if lz.homogeneous {
                        coeff.integral(0.0, t - s)?
                    } else {
                        coeff.integral(s, t)?
                    };
                    total = &total + &gen.scale(a);
                }
                Ok(total)
            }
            ZForm::Callable(f) => f(t, s),
        }
    }

    /// X(t, t₀), the integrand of Z.
    pub fn x_at(&self, t: f64) -> Result<SuperOp> {
        self.x_between(self.t0, t)
    }

    /// X(t, s) for the re-based family.
    pub fn x_between(&self, s: f64, t: f64) -> Result<SuperOp> {
        self.check_ordering(s, t)?;
        match &self.form {
            ZForm::Linear(lz) => {
                let mut total = SuperOp::zero(self.dim);
                for (gen, coeff) in lz.generators.iter().zip(lz.coefficients.iter()) {
                    let a = if lz.homogeneous {
                        coeff.eval(t - s)?
                    } else {
                        coeff.eval(t)?
                    };
                    total = &total + &gen.scale(a);
                }
                Ok(total)
            }
            ZForm::Callable(f) => {
                // X = dZ/dt by central difference, one-sided near the origin.
                let h = 1e-6 * t.abs().max(1.0);
                if t - h >= s {
                    let plus = f(t + h, s)?;
                    let minus = f(t - h, s)?;
                    Ok((&plus - &minus).scale_re(1.0 / (2.0 * h)))
                } else {
                    let z0 = f(t, s)?;
                    let z1 = f(t + h, s)?;
                    let z2 = f(t + 2.0 * h, s)?;
                    // second-order forward difference
                    Ok(&(&z1.scale_re(4.0) - &z2).scale_re(1.0 / (2.0 * h))
                        - &z0.scale_re(3.0 / (2.0 * h)))
                }
            }
        }
    }

    fn check_ordering(&self, s: f64, t: f64) -> Result<()> {
        if s < self.t0 {
            return Err(Error::Domain(format!(
                "initial point {s} precedes the family origin {}",
                self.t0
            )));
        }
        if t < s {
            return Err(Error::Domain(format!(
                "evaluation time {t} precedes the initial point {s}"
            )));
        }
        Ok(())
    }
}

/// How the local generator is evaluated from (Z, X).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Gauss–Legendre quadrature of e^{sZ} X e^{−sZ} on s ∈ [0,1].
    Quadrature { nodes: usize },
    /// Fréchet derivative of exp at Z along X, times e^{−Z}.
    Frechet,
    /// Both paths, with a consistency error if they disagree beyond
    /// the cross-check tolerance (1e−6); returns the Fréchet value.
    CrossChecked { nodes: usize },
}

impl Default for Method {
    fn default() -> Self {
        Method::CrossChecked { nodes: 32 }
    }
}

/// L(t, t₀) of the exponent family, by the requested method.
pub fn local_generator(zf: &ZFamily, t: f64, method: Method) -> Result<SuperOp> {
    local_generator_from(zf, zf.t0(), t, method)
}

/// L(t, s) of the family re-based at initial point s.
pub fn local_generator_from(zf: &ZFamily, s: f64, t: f64, method: Method) -> Result<SuperOp> {
    let z = zf.z_between(s, t)?;
    let x = zf.x_between(s, t)?;
    local_generator_of_parts(&z, &x, method)
}

/// The same formula for explicitly supplied (Z, X).
pub fn local_generator_of_parts(z: &SuperOp, x: &SuperOp, method: Method) -> Result<SuperOp> {
    match method {
        Method::Quadrature { nodes } => quadrature_path(z, x, nodes),
        Method::Frechet => frechet_path(z, x),
        Method::CrossChecked { nodes } => {
            let q = quadrature_path(z, x, nodes)?;
            let f = frechet_path(z, x)?;
            let deviation = (&q - &f).max_abs();
            if deviation > 1e-6 {
                return Err(Error::Consistency {
                    deviation,
                    quadrature: Box::new(q),
                    frechet: Box::new(f),
                });
            }
            Ok(f)
        }
    }
}

fn quadrature_path(z: &SuperOp, x: &SuperOp, nodes: usize) -> Result<SuperOp> {
    if nodes < 4 {
        return Err(Error::Validation(format!(
            "quadrature needs at least 4 nodes, got {nodes}"
        )));
    }
    let dim = z.dim();
    let mut acc = CMatrix::zeros(dim * dim, dim * dim);
    for (s, w) in gauss_legendre_01(nodes) {
        let forward = expm(&z.matrix().map(|v| v * re(s)))?;
        let backward = expm(&z.matrix().map(|v| v * re(-s)))?;
        acc += (forward * x.matrix() * backward).map(|v| v * re(w));
    }
    SuperOp::new(dim, acc)
}

fn frechet_path(z: &SuperOp, x: &SuperOp) -> Result<SuperOp> {
    // L = (d/dt e^Z) e^{−Z} with d/dt e^Z = Dexp_Z[X].
    let (_, deriv) = expm_frechet(z.matrix(), x.matrix())?;
    let inverse = expm(&z.matrix().map(|v| -v))?;
    SuperOp::new(z.dim(), deriv * inverse)
}

/// Sampling-based commutativity check: ‖[X(t), X(u)]‖ ≤ tol over all sampled
/// pairs. A pass is evidence, not proof. Single-generator linear families
/// pass structurally.
pub fn is_commutative(zf: &ZFamily, sample_times: &[f64], tol: f64) -> Result<Verdict> {
    if let ZForm::Linear(lz) = &zf.form {
        if lz.generators.len() == 1 {
            return Ok(Verdict::pass(tol));
        }
    }
    if sample_times.len() < 3 {
        return Err(Error::Validation(format!(
            "commutativity sampling needs at least 3 times, got {}",
            sample_times.len()
        )));
    }
    let xs: Vec<SuperOp> = sample_times
        .iter()
        .map(|&t| zf.x_at(t))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let mut worst_pair = (0.0, 0.0);
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let comm = &(&xs[i] * &xs[j]) - &(&xs[j] * &xs[i]);
            let norm = comm.max_abs();
            if norm > worst {
                worst = norm;
                worst_pair = (sample_times[i], sample_times[j]);
            }
        }
    }
    if worst > tol {
        Ok(Verdict::fail(
            worst,
            format!(
                "X({}) and X({}) do not commute",
                worst_pair.0, worst_pair.1
            ),
            tol,
        ))
    } else {
        Ok(Verdict::pass(tol))
    }
}

/// Where a generator family came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    FromMainFormula,
    AnalyticModel,
    UserSupplied,
}

type GeneratorEval = Arc<dyn Fn(f64) -> Result<SuperOp> + Send + Sync>;

/// Evaluable family t ↦ L(t, t₀).
#[derive(Clone)]
pub struct GeneratorFamily {
    dim: usize,
    t0: f64,
    provenance: Provenance,
    eval: GeneratorEval,
}

impl std::fmt::Debug for GeneratorFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "GeneratorFamily {{ dim: {}, t0: {}, provenance: {:?} }}",
            self.dim, self.t0, self.provenance
        )
    }
}

impl GeneratorFamily {
    /// The generator induced by an exponent family through the main formula.
    pub fn from_z_family(zf: ZFamily, method: Method) -> Self {
        let dim = zf.dim();
        let t0 = zf.t0();
        GeneratorFamily {
            dim,
            t0,
            provenance: Provenance::FromMainFormula,
            eval: Arc::new(move |t| local_generator(&zf, t, method)),
        }
    }

    pub fn from_fn(
        dim: usize,
        t0: f64,
        provenance: Provenance,
        f: impl Fn(f64) -> Result<SuperOp> + Send + Sync + 'static,
    ) -> Self {
        GeneratorFamily {
            dim,
            t0,
            provenance,
            eval: Arc::new(f),
        }
    }

    /// Constant (time-independent) generator.
    pub fn constant(s: SuperOp, t0: f64) -> Self {
        let dim = s.dim();
        GeneratorFamily {
            dim,
            t0,
            provenance: Provenance::UserSupplied,
            eval: Arc::new(move |_| Ok(s.clone())),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn eval(&self, t: f64) -> Result<SuperOp> {
        if t < self.t0 {
            return Err(Error::Domain(format!(
                "generator family starts at {}, got t = {t}",
                self.t0
            )));
        }
        (self.eval)(t)
    }
}

/// ∫_{t₀}^t L(τ) dτ by adaptive quadrature (absolute tolerance 1e−10),
/// intended as input for Lindblad-representation screening.
pub fn integrated_generator(gf: &GeneratorFamily, t: f64) -> Result<SuperOp> {
    if t < gf.t0() {
        return Err(Error::Domain(format!(
            "integration endpoint {t} precedes the family origin {}",
            gf.t0()
        )));
    }
    let f = |u: f64| Ok(gf.eval(u)?.into_matrix());
    let mat = adaptive_quad_matrix(&f, gf.t0(), t, 1e-10)?;
    SuperOp::new(gf.dim(), mat)
}

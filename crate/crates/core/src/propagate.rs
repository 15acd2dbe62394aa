//! Propagation of the master equation dΛ/dt = L(t,t₀)Λ, the closed-form
//! map Λ = e^{Z}, and the diagnostics that tell the two stories apart:
//! composition-law defects and the Markovianity probe.
//!
//! The chronological (time-ordered) exponential is realized as adaptive
//! embedded Runge–Kutta integration of the full d²×d² matrix equation;
//! no Magnus or Dyson series is attempted.

use crate::error::{Error, Result};
use crate::generator::{local_generator_from, GeneratorFamily, Method, ZFamily};
use crate::lindblad::{is_cpt_map, Verdict};
use crate::superop::{CMatrix, SuperOp};

/// Strictly increasing sample times including both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t_end: f64,
    samples: Vec<f64>,
}

impl TimeGrid {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Validation(
                "a time grid needs at least two samples".into(),
            ));
        }
        if samples.iter().any(|t| !t.is_finite()) {
            return Err(Error::Validation("time grid contains non-finite samples".into()));
        }
        if samples.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(
                "time grid samples must be strictly increasing".into(),
            ));
        }
        Ok(TimeGrid {
            t0: samples[0],
            t_end: *samples.last().unwrap(),
            samples,
        })
    }

    /// n equally spaced samples from t0 to t_end inclusive.
    pub fn uniform(t0: f64, t_end: f64, n_samples: usize) -> Result<Self> {
        if n_samples < 2 {
            return Err(Error::Validation(
                "a uniform grid needs at least two samples".into(),
            ));
        }
        if !(t_end > t0) {
            return Err(Error::Validation(format!(
                "grid end {t_end} must exceed start {t0}"
            )));
        }
        let n = n_samples - 1;
        let samples = (0..=n)
            .map(|k| t0 + (t_end - t0) * k as f64 / n as f64)
            .collect();
        Self::new(samples)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Step counts and the worst accepted local error estimate.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected_steps: usize,
    /// Max over accepted steps of the embedded 4th/5th-order difference
    /// (max-absolute-entry norm).
    pub est_error: f64,
}

/// Trajectory of dynamical maps Λ(t, t₀) on a grid.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub grid: TimeGrid,
    pub maps: Vec<SuperOp>,
    pub integrator_stats: IntegratorStats,
    /// CPT verdict at each sample, at the default certification tolerance.
    pub cpt_report: Vec<Verdict>,
}

// Dormand–Prince 5(4) coefficients.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate dΛ/dt = L(t)Λ, Λ(t₀) = 1, recording Λ at every grid sample.
///
/// Embedded Dormand–Prince 5(4) with a standard step controller; steps are
/// shortened to land exactly on sample times, so no interpolation error
/// enters the recorded maps.
pub fn solve_ordered(
    gf: &GeneratorFamily,
    grid: &TimeGrid,
    rtol: f64,
    atol: f64,
) -> Result<PropagationResult> {
    if !(rtol > 0.0) || !(atol > 0.0) {
        return Err(Error::Validation(format!(
            "tolerances must be positive, got rtol = {rtol}, atol = {atol}"
        )));
    }
    if grid.t0() < gf.t0() {
        return Err(Error::Domain(format!(
            "grid starts at {} but the generator family starts at {}",
            grid.t0(),
            gf.t0()
        )));
    }
    let n = gf.dim() * gf.dim();
    let span = grid.t_end() - grid.t0();

    let mut t = grid.t0();
    let mut y: CMatrix = CMatrix::identity(n, n);
    let mut h = span / 100.0;
    let mut stats = IntegratorStats::default();

    let mut maps: Vec<SuperOp> = Vec::with_capacity(grid.samples().len());
    maps.push(SuperOp::new(gf.dim(), y.clone())?);

    let mut k: Vec<CMatrix> = vec![CMatrix::zeros(n, n); 7];
    let rhs = |t: f64, y: &CMatrix| -> Result<CMatrix> { Ok(gf.eval(t)?.matrix() * y) };

    for &target in &grid.samples()[1..] {
        while t < target {
            let h_min = 1e2 * f64::EPSILON * t.abs().max(1.0);
            if h < h_min {
                return Err(Error::Stiffness { t });
            }
            let h_used = h.min(target - t);

            k[0] = rhs(t, &y)?;
            for stage in 1..7 {
                let mut arg = y.clone();
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let a = A[stage - 1][j];
                    if a != 0.0 {
                        arg += kj.map(|z| z * crate::superop::re(a * h_used));
                    }
                }
                k[stage] = rhs(t + C[stage] * h_used, &arg)?;
            }

            let mut y5 = y.clone();
            let mut err = CMatrix::zeros(n, n);
            for (j, kj) in k.iter().enumerate() {
                if B5[j] != 0.0 {
                    y5 += kj.map(|z| z * crate::superop::re(B5[j] * h_used));
                }
                let diff = B5[j] - B4[j];
                if diff != 0.0 {
                    err += kj.map(|z| z * crate::superop::re(diff * h_used));
                }
            }

            // max over entries of |err| / (atol + rtol·max(|y|, |y5|))
            let mut err_norm: f64 = 0.0;
            let mut err_abs: f64 = 0.0;
            for ((e, a), b) in err.iter().zip(y.iter()).zip(y5.iter()) {
                let scale = atol + rtol * a.norm().max(b.norm());
                err_norm = err_norm.max(e.norm() / scale);
                err_abs = err_abs.max(e.norm());
            }

            if err_norm <= 1.0 {
                t += h_used;
                y = y5;
                stats.steps += 1;
                stats.est_error = stats.est_error.max(err_abs);
            } else {
                stats.rejected_steps += 1;
            }

            let scale = if err_norm > 0.0 {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h = (h_used * scale).min(span);
        }
        maps.push(SuperOp::new(gf.dim(), y.clone())?);
    }

    let cpt_report = maps
        .iter()
        .map(|m| is_cpt_map(m, crate::superop::Tolerances::default().cpt))
        .collect::<Result<Vec<_>>>()?;

    Ok(PropagationResult {
        grid: grid.clone(),
        maps,
        integrator_stats: stats,
        cpt_report,
    })
}

/// Closed-form dynamical map Λ(t, t₀) = e^{Z(t,t₀)} — no time ordering.
pub fn exp_map(zf: &ZFamily, t: f64) -> Result<SuperOp> {
    zf.z_at(t)?.expm()
}

/// Λ(t, s) = e^{Z(t,s)} for the family re-based at s.
pub fn exp_map_between(zf: &ZFamily, s: f64, t: f64) -> Result<SuperOp> {
    zf.z_between(s, t)?.expm()
}

/// Max-absolute-entry norm of Λ(t,s)·Λ(s,t₀) − Λ(t,t₀); zero exactly when the
/// local composition law holds through the split point s.
pub fn composition_defect(zf: &ZFamily, t: f64, s: f64) -> Result<f64> {
    let t0 = zf.t0();
    if !(t >= s && s >= t0) {
        return Err(Error::Domain(format!(
            "composition requires t ≥ s ≥ t₀, got t = {t}, s = {s}, t₀ = {t0}"
        )));
    }
    let late = exp_map_between(zf, s, t)?;
    let early = exp_map_between(zf, t0, s)?;
    let full = exp_map_between(zf, t0, t)?;
    Ok((&(&late * &early) - &full).max_abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Markovianity {
    Markovian,
    NonMarkovian,
}

/// Evidence gathered by the Markovianity probe: both maxima are reported so
/// callers can re-threshold.
#[derive(Debug, Clone)]
pub struct MarkovReport {
    /// max over probe pairs (t, s) of ‖L(t, t₀=s) − L(t, t₀)‖.
    pub max_generator_shift: f64,
    /// max over probe pairs of the composition defect at split point s.
    pub max_composition_defect: f64,
    pub classification: Markovianity,
    pub threshold: f64,
}

/// Probe whether the evolution is Markovian: the local generator must not
/// depend on the initial point, and the dynamical maps must satisfy the
/// composition law. Classified against the default threshold 1e−8.
pub fn markovianity_probe(zf: &ZFamily, probe_pairs: &[(f64, f64)]) -> Result<MarkovReport> {
    markovianity_probe_with(zf, probe_pairs, 1e-8)
}

pub fn markovianity_probe_with(
    zf: &ZFamily,
    probe_pairs: &[(f64, f64)],
    threshold: f64,
) -> Result<MarkovReport> {
    if probe_pairs.is_empty() {
        return Err(Error::Validation("markovianity probe needs at least one pair".into()));
    }
    let t0 = zf.t0();
    let mut max_shift: f64 = 0.0;
    let mut max_defect: f64 = 0.0;
    for &(t, s) in probe_pairs {
        if !(t >= s && s >= t0) {
            return Err(Error::Domain(format!(
                "probe pair requires t ≥ s ≥ t₀, got (t, s) = ({t}, {s})"
            )));
        }
        let rebased = local_generator_from(zf, s, t, Method::default())?;
        let original = local_generator_from(zf, t0, t, Method::default())?;
        max_shift = max_shift.max((&rebased - &original).max_abs());
        max_defect = max_defect.max(composition_defect(zf, t, s)?);
    }
    let classification = if max_shift <= threshold && max_defect <= threshold {
        Markovianity::Markovian
    } else {
        Markovianity::NonMarkovian
    };
    Ok(MarkovReport {
        max_generator_shift: max_shift,
        max_composition_defect: max_defect,
        classification,
        threshold,
    })
}

/// Per-sample CPT verdicts with summary counts.
#[derive(Debug, Clone)]
pub struct CertificationSummary {
    pub verdicts: Vec<Verdict>,
    pub n_passed: usize,
    pub n_failed: usize,
}

/// Re-certify every map of a trajectory at the given tolerance.
pub fn certify_trajectory(pr: &PropagationResult, tol: f64) -> Result<CertificationSummary> {
    let verdicts = pr
        .maps
        .iter()
        .map(|m| is_cpt_map(m, tol))
        .collect::<Result<Vec<_>>>()?;
    let n_passed = verdicts.iter().filter(|v| v.passed).count();
    let n_failed = verdicts.len() - n_passed;
    Ok(CertificationSummary {
        verdicts,
        n_passed,
        n_failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{GeneratorFamily, ScalarFn};
    use crate::lindblad::{build_generator, LindbladSpec};
    use crate::superop::{expm, matrix_unit, re};

    fn sigma_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-1.0)])
    }

    fn dephasing() -> SuperOp {
        build_generator(&LindbladSpec::single_channel(2, 1.0, sigma_z()).unwrap())
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![0.0, 1.0, 0.5]).is_err());
        assert!(TimeGrid::new(vec![0.0]).is_err());
        let g = TimeGrid::uniform(0.0, 2.0, 5).unwrap();
        assert_eq!(g.samples(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn zero_generator_keeps_identity() {
        let gf = GeneratorFamily::constant(SuperOp::zero(2), 0.0);
        let grid = TimeGrid::uniform(0.0, 3.0, 7).unwrap();
        let pr = solve_ordered(&gf, &grid, 1e-10, 1e-12).unwrap();
        for m in &pr.maps {
            assert!((m - &SuperOp::identity(2)).max_abs() <= 1e-13);
        }
    }

    #[test]
    fn initial_map_is_identity() {
        let gf = GeneratorFamily::constant(dephasing(), 0.0);
        let grid = TimeGrid::uniform(0.0, 1.0, 3).unwrap();
        let pr = solve_ordered(&gf, &grid, 1e-10, 1e-12).unwrap();
        assert!((&pr.maps[0] - &SuperOp::identity(2)).max_abs() <= 1e-13);
    }

    #[test]
    fn constant_generator_matches_expm() {
        let l0 = dephasing();
        let gf = GeneratorFamily::constant(l0.clone(), 0.0);
        let grid = TimeGrid::uniform(0.0, 5.0, 11).unwrap();
        let pr = solve_ordered(&gf, &grid, 1e-10, 1e-12).unwrap();
        for (m, &t) in pr.maps.iter().zip(grid.samples()) {
            let reference = expm(&l0.matrix().map(|z| z * re(t))).unwrap();
            let dev = crate::superop::max_abs(&(m.matrix() - reference));
            assert!(dev <= 1e-9, "t = {t}, deviation {dev:e}");
        }
        assert!(pr.cpt_report.iter().all(|v| v.passed));
    }

    #[test]
    fn trace_preserved_along_trajectory() {
        let l0 = dephasing();
        let gf = GeneratorFamily::constant(l0, 0.0);
        let grid = TimeGrid::uniform(0.0, 4.0, 9).unwrap();
        let pr = solve_ordered(&gf, &grid, 1e-10, 1e-12).unwrap();
        for m in &pr.maps {
            assert!(m.trace_preservation_defect() <= 1e-9);
        }
    }

    #[test]
    fn exp_map_basics() {
        let zf = ZFamily::linear(0.0, vec![dephasing()], vec![ScalarFn::constant(1.0)]).unwrap();
        let m = exp_map(&zf, 0.0).unwrap();
        assert!((&m - &SuperOp::identity(2)).max_abs() <= 1e-14);

        // Z = t·L₀ at t = 1: E12 picks up e^{−2}.
        let m = exp_map(&zf, 1.0).unwrap();
        let e12 = matrix_unit(2, 0, 1);
        let out = m.apply(&e12).unwrap();
        let factor = out[(0, 1)].re;
        assert!((factor - (-2.0f64).exp()).abs() <= 1e-12);
    }

    #[test]
    fn composition_defect_semigroup_and_edges() {
        let zf = ZFamily::linear(0.0, vec![dephasing()], vec![ScalarFn::constant(1.0)]).unwrap();
        // Z = (t−t₀)L₀ is the semigroup case.
        assert!(composition_defect(&zf, 2.0, 1.0).unwrap() <= 1e-11);

        // one factor is the identity
        assert!(composition_defect(&zf, 2.0, 0.0).unwrap() <= 1e-13);
        assert!(composition_defect(&zf, 2.0, 2.0).unwrap() <= 1e-13);
    }

    #[test]
    fn composition_defect_positive_for_time_dependent_rate() {
        // a₁(u) = u over L₀: commutative but not a semigroup when treated
        // homogeneously.
        let zf = ZFamily::linear_homogeneous(
            0.0,
            vec![dephasing()],
            vec![ScalarFn::polynomial(vec![0.0, 1.0]).unwrap()],
        )
        .unwrap();
        let defect = composition_defect(&zf, 2.0, 1.0).unwrap();
        assert!(defect > 1e-4, "defect {defect:e}");
    }

    #[test]
    fn composition_rejects_bad_ordering() {
        let zf = ZFamily::linear(0.0, vec![dephasing()], vec![ScalarFn::constant(1.0)]).unwrap();
        assert!(matches!(
            composition_defect(&zf, 1.0, 2.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn markovian_semigroup_classified() {
        let zf = ZFamily::linear(0.0, vec![dephasing()], vec![ScalarFn::constant(1.0)]).unwrap();
        let pairs = [(1.0, 0.5), (2.0, 1.0), (3.0, 2.5)];
        let report = markovianity_probe(&zf, &pairs).unwrap();
        assert_eq!(report.classification, Markovianity::Markovian);
        assert!(report.max_composition_defect <= 1e-9);
        assert!(report.max_generator_shift <= 1e-9);
    }

    #[test]
    fn zero_family_is_markovian() {
        let zf = ZFamily::linear(0.0, vec![dephasing()], vec![ScalarFn::constant(0.0)]).unwrap();
        let report = markovianity_probe(&zf, &[(1.0, 0.5), (2.0, 1.5)]).unwrap();
        assert_eq!(report.classification, Markovianity::Markovian);
    }

    #[test]
    fn certify_flags_sign_flipped_generator() {
        let neg = -&dephasing();
        let gf = GeneratorFamily::constant(neg, 0.0);
        let grid = TimeGrid::uniform(0.0, 2.0, 5).unwrap();
        let pr = solve_ordered(&gf, &grid, 1e-10, 1e-12).unwrap();
        let summary = certify_trajectory(&pr, 1e-10).unwrap();
        // identity at t = 0 passes, everything after fails
        assert!(summary.verdicts[0].passed);
        assert_eq!(summary.n_failed, 4);
        for v in &summary.verdicts[1..] {
            assert!(!v.passed);
            assert!(v.witness.as_ref().unwrap().value < 0.0);
        }
    }
}

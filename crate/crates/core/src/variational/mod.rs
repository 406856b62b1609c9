//! Variational deflation driver for the lowest eigenvalues, including the
//! exact-zeromode variant.
//!
//! Level `x` minimizes `<psi|H|psi> + sum_{i<x} beta_i |<psi|psi_i>|^2`
//! with previously found states frozen. The deflation penalty is itself an
//! expectation value (of a projector), so the parameter-shift rule applies
//! to the full cost.

pub mod optim;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitize::constant_state;
use crate::pauli::PauliSum;
use crate::qsim::{build_ansatz, AnsatzSpec, Circuit, StateVector};
use optim::{adam, lbfgs, AdamOptions, LbfgsOptions, OptimOutcome};

/// Classical optimizer backing the variational loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OptimizerKind {
    /// Limited-memory quasi-Newton with optional box bounds (the default).
    QuasiNewtonBounded,
    /// First-order fallback with a fixed iteration budget.
    Adam,
}

/// How gradients of the cost are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GradientMode {
    /// Exact analytic gradient from +-pi/2 shifts per rotation parameter.
    ParameterShift,
    /// Central differences with step 1e-5.
    CentralDifference,
}

/// Level-0 initialization policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InitStrategy {
    /// Random parameters uniform in `[-pi, pi]` under the configured seed.
    Random,
    /// Take level 0 analytically as the constant state (VQD-exact0).
    ConstantStateExact,
}

/// Configuration for a VQD run.
#[derive(Debug, Clone, Serialize)]
pub struct VqdConfig {
    /// Number of eigenvalues to resolve.
    pub k: usize,
    /// Deflation weights, one per prior level; empty means the automatic
    /// rule `beta = 2 * sum_j |c_j|`.
    pub betas: Vec<f64>,
    pub optimizer: OptimizerKind,
    /// Cap on outer optimizer iterations per level.
    pub max_iters: usize,
    pub gradient: GradientMode,
    pub seed: u64,
    pub init: InitStrategy,
}

impl VqdConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            betas: Vec::new(),
            optimizer: OptimizerKind::QuasiNewtonBounded,
            max_iters: 500,
            gradient: GradientMode::ParameterShift,
            seed: 0,
            init: InitStrategy::Random,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !self.betas.is_empty() && self.betas.len() != self.k - 1 {
            return Err(Error::InvalidParameter(format!(
                "betas must have k-1 = {} entries (or be empty for the automatic rule), got {}",
                self.k - 1,
                self.betas.len()
            )));
        }
        Ok(())
    }

    fn resolved_betas(&self, operator: &PauliSum) -> Vec<f64> {
        if self.betas.is_empty() {
            vec![2.0 * operator.coefficient_norm(); self.k.saturating_sub(1)]
        } else {
            self.betas.clone()
        }
    }
}

/// Per-level outcome of a VQD run.
#[derive(Debug, Clone, Serialize)]
pub struct VqdLevel {
    pub eigenvalue: f64,
    pub parameters: Vec<f64>,
    /// Cost+gradient evaluation cycles spent on this level.
    pub iterations: usize,
    /// `(iteration, cost)` pairs, one per evaluation.
    pub trace: Vec<(usize, f64)>,
    pub converged: bool,
    /// True when the level was taken analytically rather than optimized.
    pub analytic: bool,
}

/// Full deflation report. Levels are ordered by index; estimates ascend for
/// a converged run on a Hermitian operator.
#[derive(Debug, Clone, Serialize)]
pub struct VqdReport {
    pub levels: Vec<VqdLevel>,
    #[serde(skip)]
    pub states: Vec<StateVector>,
}

impl VqdReport {
    pub fn eigenvalue_estimates(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.eigenvalue).collect()
    }

    pub fn total_iterations(&self) -> usize {
        self.levels.iter().map(|l| l.iterations).sum()
    }
}

struct CostFn<'a> {
    circuit: &'a Circuit,
    operator: &'a PauliSum,
    deflation: Vec<(f64, StateVector)>,
}

impl CostFn<'_> {
    fn cost(&self, params: &[f64]) -> Result<f64> {
        let state = self.circuit.prepare(params)?;
        let mut value = state.expectation(self.operator)?;
        for (beta, frozen) in &self.deflation {
            value += beta * state.overlap(frozen)?.norm_sqr();
        }
        Ok(value)
    }

    fn cost_grad(&self, params: &[f64], mode: GradientMode, grad: &mut [f64]) -> Result<f64> {
        let f = self.cost(params)?;
        let mut shifted = params.to_vec();
        match mode {
            GradientMode::ParameterShift => {
                for i in 0..params.len() {
                    shifted[i] = params[i] + std::f64::consts::FRAC_PI_2;
                    let plus = self.cost(&shifted)?;
                    shifted[i] = params[i] - std::f64::consts::FRAC_PI_2;
                    let minus = self.cost(&shifted)?;
                    shifted[i] = params[i];
                    grad[i] = 0.5 * (plus - minus);
                }
            }
            GradientMode::CentralDifference => {
                const H: f64 = 1e-5;
                for i in 0..params.len() {
                    shifted[i] = params[i] + H;
                    let plus = self.cost(&shifted)?;
                    shifted[i] = params[i] - H;
                    let minus = self.cost(&shifted)?;
                    shifted[i] = params[i];
                    grad[i] = (plus - minus) / (2.0 * H);
                }
            }
        }
        Ok(f)
    }
}

/// Exact gradient of the bare expectation `<psi(theta)|H|psi(theta)>`.
pub fn gradient(
    operator: &PauliSum,
    circuit: &Circuit,
    theta: &[f64],
    mode: GradientMode,
) -> Result<Vec<f64>> {
    let cost = CostFn {
        circuit,
        operator,
        deflation: Vec::new(),
    };
    let mut grad = vec![0.0; theta.len()];
    cost.cost_grad(theta, mode, &mut grad)?;
    Ok(grad)
}

fn random_init(n_params: usize, seed: u64, level: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(
        (level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    ));
    (0..n_params)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}

fn optimize_level(
    cost: &CostFn<'_>,
    cfg: &VqdConfig,
    x0: Vec<f64>,
) -> Result<OptimOutcome> {
    let error_slot = std::cell::RefCell::new(None::<Error>);
    let eval = |x: &[f64], g: &mut [f64]| -> f64 {
        match cost.cost_grad(x, cfg.gradient, g) {
            Ok(f) => {
                if f.is_finite() {
                    f
                } else {
                    *error_slot.borrow_mut() =
                        Some(Error::Solver("cost diverged to a non-finite value".into()));
                    f64::INFINITY
                }
            }
            Err(e) => {
                *error_slot.borrow_mut() = Some(e);
                f64::INFINITY
            }
        }
    };
    let outcome = match cfg.optimizer {
        OptimizerKind::QuasiNewtonBounded => lbfgs(
            eval,
            x0,
            &LbfgsOptions {
                max_iters: cfg.max_iters,
                ..Default::default()
            },
        ),
        OptimizerKind::Adam => adam(
            eval,
            x0,
            &AdamOptions {
                learning_rate: 0.05,
                iterations: cfg.max_iters,
                ..Default::default()
            },
        ),
    };
    if let Some(e) = error_slot.into_inner() {
        return Err(e);
    }
    Ok(outcome)
}

/// Minimize `<psi|H|psi>` over the ansatz; the plain variational ground
/// solve. Returns the best cost, the parameters, and the prepared state.
pub fn vqe_ground(
    operator: &PauliSum,
    ansatz: &AnsatzSpec,
    cfg: &VqdConfig,
) -> Result<(f64, Vec<f64>, StateVector)> {
    let mut one = cfg.clone();
    one.k = 1;
    one.betas = Vec::new();
    let report = vqd(operator, ansatz, &one)?;
    let level = report.levels.into_iter().next().expect("k = 1");
    let state = report.states.into_iter().next().expect("k = 1");
    Ok((level.eigenvalue, level.parameters, state))
}

/// Sequential deflation: resolve the lowest `cfg.k` eigenvalues.
///
/// With `InitStrategy::ConstantStateExact` this delegates to
/// [`vqd_exact0`].
pub fn vqd(operator: &PauliSum, ansatz: &AnsatzSpec, cfg: &VqdConfig) -> Result<VqdReport> {
    cfg.validate()?;
    if cfg.init == InitStrategy::ConstantStateExact {
        return vqd_exact0(operator, ansatz, cfg);
    }
    run_levels(operator, ansatz, cfg, None)
}

/// Deflation with the analytically known zeromode of `Q Q^dag` taken as
/// level 0 for free: level 0 is reported as exactly `(0, w0)` and marked
/// analytic, and only higher levels are optimized.
///
/// Refuses operators whose constant-state expectation exceeds 1e-6, since
/// the shortcut is only valid when the uniform vector is a zeromode.
pub fn vqd_exact0(operator: &PauliSum, ansatz: &AnsatzSpec, cfg: &VqdConfig) -> Result<VqdReport> {
    cfg.validate()?;
    let w0 = constant_state(operator.n_qubits());
    let residual = w0.expectation(operator)?;
    if residual.abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "constant state is not a zeromode of this operator: <w0|H|w0> = {residual:.3e} exceeds 1e-6"
        )));
    }
    run_levels(operator, ansatz, cfg, Some(w0))
}

fn run_levels(
    operator: &PauliSum,
    ansatz: &AnsatzSpec,
    cfg: &VqdConfig,
    analytic_zero: Option<StateVector>,
) -> Result<VqdReport> {
    if ansatz.n_qubits != operator.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit ansatz against {}-qubit operator",
            ansatz.n_qubits,
            operator.n_qubits()
        )));
    }
    let circuit = build_ansatz(ansatz)?;
    let betas = cfg.resolved_betas(operator);
    let mut levels = Vec::with_capacity(cfg.k);
    let mut states: Vec<StateVector> = Vec::with_capacity(cfg.k);

    if let Some(w0) = analytic_zero {
        levels.push(VqdLevel {
            eigenvalue: 0.0,
            parameters: Vec::new(),
            iterations: 0,
            trace: Vec::new(),
            converged: true,
            analytic: true,
        });
        states.push(w0);
    }

    while levels.len() < cfg.k {
        let level = levels.len();
        let deflation: Vec<(f64, StateVector)> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (betas[i], s.clone()))
            .collect();
        let cost = CostFn {
            circuit: &circuit,
            operator,
            deflation,
        };
        let x0 = random_init(circuit.n_params(), cfg.seed, level);
        let outcome = optimize_level(&cost, cfg, x0)?;
        let state = circuit.prepare(&outcome.x)?;
        // report the bare expectation, not the deflated cost
        let eigenvalue = state.expectation(operator)?;
        levels.push(VqdLevel {
            eigenvalue,
            parameters: outcome.x,
            iterations: outcome.evaluations,
            trace: outcome.trace,
            converged: outcome.converged,
            analytic: false,
        });
        states.push(state);
    }

    Ok(VqdReport { levels, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitize::spd_form;
    use crate::oracle;
    use crate::pauli::{decompose, DEFAULT_DROP_TOLERANCE};
    use crate::system::SchloglSystem;
    use approx::assert_relative_eq;
    use std::str::FromStr;

    fn spd_sum(v: f64, n_trunc: usize) -> PauliSum {
        let q = SchloglSystem::bistable(v, n_trunc).unwrap().generator();
        decompose(&spd_form(&q), DEFAULT_DROP_TOLERANCE).unwrap()
    }

    #[test]
    fn ground_state_of_single_qubit_diagonal() {
        // diag(0, 3.2) = 1.6 I - 1.6 Z
        let sum = PauliSum::from_str("1.6 I\n-1.6 Z").unwrap();
        let cfg = VqdConfig::new(1).with_seed(11);
        let (value, _, _) = vqe_ground(&sum, &AnsatzSpec::ry(1, 1), &cfg).unwrap();
        assert!(value.abs() <= 1e-6, "ground value {value}");
    }

    #[test]
    fn constant_operator_has_flat_cost() {
        let sum = PauliSum::from_str("1.0 II").unwrap();
        let cfg = VqdConfig::new(1).with_seed(3);
        let (value, theta, _) = vqe_ground(&sum, &AnsatzSpec::ry(2, 1), &cfg).unwrap();
        assert_relative_eq!(value, 1.0, epsilon = 1e-12);
        let circuit = build_ansatz(&AnsatzSpec::ry(2, 1)).unwrap();
        let g = gradient(&sum, &circuit, &theta, GradientMode::ParameterShift).unwrap();
        for gi in g {
            assert!(gi.abs() < 1e-12);
        }
    }

    #[test]
    fn two_qubit_spd_ground_state_is_zero() {
        let sum = spd_sum(1.0, 3);
        let cfg = VqdConfig::new(1).with_seed(5);
        let (value, _, _) = vqe_ground(&sum, &AnsatzSpec::ry(2, 1), &cfg).unwrap();
        assert!(value.abs() <= 1e-6, "lambda0 estimate {value}");
    }

    #[test]
    fn deflation_reaches_first_excited_level() {
        let sum = spd_sum(2.0, 3);
        let q = SchloglSystem::bistable(2.0, 3).unwrap().generator();
        let oracle_spec = oracle::diagonalize_hermitian(&spd_form(&q)).unwrap();
        let cfg = VqdConfig::new(2).with_seed(7);
        let report = vqd(&sum, &AnsatzSpec::ry(2, 1), &cfg).unwrap();
        let estimates = report.eigenvalue_estimates();
        assert!(estimates[0].abs() <= 1e-6);
        let reference = oracle_spec.eigenvalue_re(1);
        assert!(
            (estimates[1] - reference).abs() / reference.abs() <= 1e-4,
            "lambda1 {} vs {}",
            estimates[1],
            reference
        );
        // converged states are orthogonal
        let overlap = report.states[0].overlap(&report.states[1]).unwrap().norm();
        assert!(overlap <= 1e-3, "overlap {overlap}");
    }

    #[test]
    fn exact0_reports_analytic_level_zero() {
        let sum = spd_sum(1.5, 3);
        let cfg = VqdConfig::new(2).with_seed(9);
        let report = vqd_exact0(&sum, &AnsatzSpec::ry(2, 1), &cfg).unwrap();
        assert!(report.levels[0].analytic);
        assert_eq!(report.levels[0].eigenvalue, 0.0);
        assert_eq!(report.levels[0].iterations, 0);
        let w0 = constant_state(2);
        assert_relative_eq!(
            report.states[0].overlap(&w0).unwrap().norm(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn exact0_guards_against_wrong_operator() {
        // Z has <w0|Z|w0> = 0, but shift it so the expectation is 1
        let sum = PauliSum::from_str("1.0 I").unwrap();
        let cfg = VqdConfig::new(2).with_seed(1);
        assert!(matches!(
            vqd_exact0(&sum, &AnsatzSpec::ry(1, 1), &cfg),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn parameter_shift_matches_central_difference() {
        let sum = spd_sum(1.3, 3);
        let circuit = build_ansatz(&AnsatzSpec::ry(2, 1)).unwrap();
        let theta = random_init(circuit.n_params(), 42, 0);
        let ps = gradient(&sum, &circuit, &theta, GradientMode::ParameterShift).unwrap();
        let cd = gradient(&sum, &circuit, &theta, GradientMode::CentralDifference).unwrap();
        for (a, b) in ps.iter().zip(&cd) {
            assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn gradient_norm_small_at_converged_minimum() {
        let sum = spd_sum(1.0, 3);
        let cfg = VqdConfig::new(1).with_seed(5);
        let (_, theta, _) = vqe_ground(&sum, &AnsatzSpec::ry(2, 1), &cfg).unwrap();
        let circuit = build_ansatz(&AnsatzSpec::ry(2, 1)).unwrap();
        let g = gradient(&sum, &circuit, &theta, GradientMode::ParameterShift).unwrap();
        let norm: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        // scale-aware first-order condition: the operator norm is O(100)
        assert!(norm <= 1e-5 * sum.coefficient_norm(), "gradient norm {norm}");
    }

    #[test]
    fn variational_bound_holds() {
        let sum = spd_sum(1.9, 3);
        let cfg = VqdConfig::new(2).with_seed(13);
        let report = vqd(&sum, &AnsatzSpec::ry(2, 1), &cfg).unwrap();
        for level in &report.levels {
            for &(_, cost) in &level.trace {
                assert!(cost >= -1e-9, "cost {cost} dips below the spectrum floor");
            }
        }
    }

    #[test]
    fn adam_fallback_reaches_ground_state() {
        let sum = PauliSum::from_str("1.6 I\n-1.6 Z").unwrap();
        let mut cfg = VqdConfig::new(1).with_seed(11);
        cfg.optimizer = OptimizerKind::Adam;
        cfg.max_iters = 3000;
        let (value, _, _) = vqe_ground(&sum, &AnsatzSpec::ry(1, 1), &cfg).unwrap();
        assert!(value.abs() <= 1e-5, "ground value {value}");
    }

    #[test]
    fn betas_length_validated() {
        let sum = spd_sum(1.0, 3);
        let mut cfg = VqdConfig::new(2);
        cfg.betas = vec![1.0, 2.0, 3.0];
        assert!(vqd(&sum, &AnsatzSpec::ry(2, 1), &cfg).is_err());
    }
}

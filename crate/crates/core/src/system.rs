//! The Schlogl reaction network and its truncated birth-death generator.
//!
//! The model couples one dynamic species to two pumped reservoirs through a
//! trimolecular autocatalytic channel and a linear exchange channel. On a
//! state space truncated at `N_trunc` molecules the dynamics are generated by
//! a tridiagonal stochastic matrix whose columns sum to zero.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the Schlogl model plus the state-space truncation.
///
/// `entry(i, j)` of the generator built from this system is the rate of
/// `j -> i` transitions, so probability vectors evolve as columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchloglSystem {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    /// Pump concentration of the autocatalytic reservoir species.
    pub a: f64,
    /// Pump concentration of the exchange reservoir species.
    pub b: f64,
    /// System volume.
    #[serde(rename = "V")]
    pub v: f64,
    /// Largest molecule count retained; the generator has `N_trunc + 1` states.
    #[serde(rename = "N_trunc")]
    pub n_trunc: usize,
}

impl SchloglSystem {
    pub fn new(
        k1: f64,
        k2: f64,
        k3: f64,
        k4: f64,
        a: f64,
        b: f64,
        v: f64,
        n_trunc: usize,
    ) -> Result<Self> {
        let sys = Self {
            k1,
            k2,
            k3,
            k4,
            a,
            b,
            v,
            n_trunc,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0) || !self.v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "V must be positive and finite, got {}",
                self.v
            )));
        }
        for (name, value) in [
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("k4", self.k4),
            ("a", self.a),
            ("b", self.b),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative and finite, got {value}"
                )));
            }
        }
        if self.n_trunc < 1 {
            return Err(Error::InvalidParameter(
                "N_trunc must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Monostable preset: detailed balance holds, the steady state is a
    /// single-peak Poisson-like distribution.
    pub fn monostable(v: f64, n_trunc: usize) -> Result<Self> {
        Self::new(3.0, 0.6, 0.25, 2.95, 0.5, 29.5, v, n_trunc)
    }

    /// Bistable preset: detailed balance is broken (flux ratio 59), the
    /// steady state develops two peaks at sufficient volume.
    pub fn bistable(v: f64, n_trunc: usize) -> Result<Self> {
        Self::new(3.0, 0.6, 0.25, 2.95, 1.0, 1.0, v, n_trunc)
    }

    /// Whether chemical detailed balance holds: `k1*k4*a / (k2*k3*b) = 1`
    /// within a relative tolerance of 1e-12.
    pub fn is_equilibrium(&self) -> bool {
        let denom = self.k2 * self.k3 * self.b;
        if denom == 0.0 {
            return false;
        }
        let ratio = self.k1 * self.k4 * self.a / denom;
        (ratio - 1.0).abs() <= 1e-12
    }

    /// Forward/backward flux ratio `k1*k4*a / (k2*k3*b)`.
    pub fn flux_ratio(&self) -> f64 {
        self.k1 * self.k4 * self.a / (self.k2 * self.k3 * self.b)
    }

    /// Birth rate out of state `n`. The truncation boundary forces the rate
    /// out of the last retained state to zero.
    pub fn birth_rate(&self, n: usize) -> Result<f64> {
        self.check_state(n)?;
        if n == self.n_trunc {
            return Ok(0.0);
        }
        let nf = n as f64;
        Ok(self.a * self.k1 * nf * (nf - 1.0) / self.v + self.b * self.k3 * self.v)
    }

    /// Death rate out of state `n`; zero at `n = 0` by construction.
    pub fn death_rate(&self, n: usize) -> Result<f64> {
        self.check_state(n)?;
        let nf = n as f64;
        Ok(nf * self.k4 + self.k2 * nf * (nf - 1.0) * (nf - 2.0) / (self.v * self.v))
    }

    fn check_state(&self, n: usize) -> Result<()> {
        if n > self.n_trunc {
            return Err(Error::OutOfRange(format!(
                "state {} exceeds N_trunc = {}",
                n, self.n_trunc
            )));
        }
        Ok(())
    }

    /// Right-hand side of the deterministic rate equation at concentration `x`.
    pub fn deterministic_rhs(&self, x: f64) -> f64 {
        self.k1 * self.a * x * x - self.k2 * x * x * x - self.k4 * x + self.k3 * self.b
    }

    /// Number of states in the truncated generator.
    pub fn dim(&self) -> usize {
        self.n_trunc + 1
    }

    /// Qubit count when the state count is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    /// Truncated generator matrix of the master equation.
    pub fn generator(&self) -> GeneratorMatrix {
        let d = self.dim();
        let mut q = Array2::<f64>::zeros((d, d));
        for n in 0..d {
            // birth_rate/death_rate cannot fail for n <= n_trunc
            if n + 1 < d {
                q[[n + 1, n]] = self.birth_rate(n).unwrap();
            }
            if n > 0 {
                q[[n - 1, n]] = self.death_rate(n).unwrap();
            }
        }
        fix_diagonals(&mut q);
        GeneratorMatrix { entries: q }
    }
}

/// Set each diagonal entry to the negated sum of its column's off-diagonal
/// entries, then nudge it until the column sums to exactly zero under
/// plain index-order summation.
fn fix_diagonals(q: &mut Array2<f64>) {
    let d = q.nrows();
    for j in 0..d {
        let mut col = 0.0;
        for i in 0..d {
            if i != j {
                col += q[[i, j]];
            }
        }
        q[[j, j]] = -col;
        for _ in 0..4 {
            let s: f64 = (0..d).map(|i| q[[i, j]]).sum();
            if s == 0.0 {
                break;
            }
            q[[j, j]] -= s;
        }
    }
}

/// Dense truncated generator of the master equation.
///
/// Tridiagonal with nonnegative off-diagonal rates; every column sums to
/// zero, so the all-ones row vector is a left null vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    entries: Array2<f64>,
}

impl GeneratorMatrix {
    /// Wrap an existing matrix, validating the generator invariants:
    /// square, tridiagonal, nonnegative off-diagonals, column sums ~ 0.
    pub fn from_entries(entries: Array2<f64>) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c || r == 0 {
            return Err(Error::DimensionMismatch(format!(
                "generator must be square and nonempty, got {r}x{c}"
            )));
        }
        for i in 0..r {
            for j in 0..c {
                let e = entries[[i, j]];
                if i.abs_diff(j) > 1 && e != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "generator must be tridiagonal; entry ({i}, {j}) = {e}"
                    )));
                }
                if i != j && e < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "off-diagonal rate ({i}, {j}) = {e} is negative"
                    )));
                }
            }
        }
        for j in 0..c {
            let s: f64 = entries.column(j).sum();
            if s.abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "column {j} sums to {s}, not zero"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.entries
    }

    /// Zero-extend to `dim` states. Padding states are absorbing with rate
    /// zero and carry zero rows and columns; diagonals are re-fixed so the
    /// result is still a valid generator.
    pub fn padded_to(&self, dim: usize) -> Result<GeneratorMatrix> {
        let d = self.dim();
        if dim < d {
            return Err(Error::DimensionMismatch(format!(
                "cannot pad {d}-state generator down to {dim}"
            )));
        }
        if dim == d {
            return Ok(self.clone());
        }
        let mut q = Array2::<f64>::zeros((dim, dim));
        q.slice_mut(ndarray::s![..d, ..d]).assign(&self.entries);
        fix_diagonals(&mut q);
        Ok(GeneratorMatrix { entries: q })
    }

    /// Birth and death rates read back from the tridiagonal structure, or
    /// `None` if any interior rate vanishes (the chain would decouple).
    pub(crate) fn birth_death_rates(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let d = self.dim();
        let mut births = Vec::with_capacity(d - 1);
        let mut deaths = Vec::with_capacity(d - 1);
        for n in 0..d - 1 {
            let kappa = self.entries[[n + 1, n]];
            let mu = self.entries[[n, n + 1]];
            if kappa <= 0.0 || mu <= 0.0 {
                return None;
            }
            births.push(kappa);
            deaths.push(mu);
        }
        Some((births, deaths))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bistable_v1_n1() -> SchloglSystem {
        SchloglSystem::bistable(1.0, 1).unwrap()
    }

    #[test]
    fn birth_rate_matches_hand_values() {
        let sys = bistable_v1_n1();
        assert_relative_eq!(sys.birth_rate(0).unwrap(), 0.25);

        let sys = SchloglSystem::bistable(2.0, 4).unwrap();
        assert_relative_eq!(sys.birth_rate(2).unwrap(), 3.5);
    }

    #[test]
    fn birth_rate_vanishes_at_truncation_boundary() {
        let sys = SchloglSystem::bistable(3.0, 5).unwrap();
        assert_eq!(sys.birth_rate(5).unwrap(), 0.0);
    }

    #[test]
    fn death_rate_matches_hand_values() {
        let sys = SchloglSystem::bistable(1.0, 4).unwrap();
        assert_relative_eq!(sys.death_rate(1).unwrap(), 2.95);
        assert_eq!(sys.death_rate(0).unwrap(), 0.0);
        assert_relative_eq!(sys.death_rate(3).unwrap(), 12.45);
    }

    #[test]
    fn rates_reject_out_of_range_states() {
        let sys = bistable_v1_n1();
        assert!(matches!(sys.birth_rate(2), Err(Error::OutOfRange(_))));
        assert!(matches!(sys.death_rate(9), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn two_state_generator_matches_hand_assembly() {
        let q = bistable_v1_n1().generator();
        assert_eq!(q.dim(), 2);
        assert_relative_eq!(q.entry(0, 0), -0.25);
        assert_relative_eq!(q.entry(0, 1), 2.95);
        assert_relative_eq!(q.entry(1, 0), 0.25);
        assert_relative_eq!(q.entry(1, 1), -2.95);
    }

    #[test]
    fn deterministic_rhs_values() {
        let bi = SchloglSystem::bistable(1.0, 3).unwrap();
        assert_relative_eq!(bi.deterministic_rhs(0.0), 0.25);
        let mono = SchloglSystem::monostable(1.0, 3).unwrap();
        assert_relative_eq!(mono.deterministic_rhs(0.0), 7.375);
        // x = 2.5 is an exact root of the monostable cubic
        assert_relative_eq!(mono.deterministic_rhs(2.5), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn deterministic_rhs_root_found_by_bisection_is_a_zero() {
        let sys = SchloglSystem::bistable(1.0, 3).unwrap();
        // bracket the largest positive root of the cubic
        let (mut lo, mut hi) = (2.0, 10.0);
        assert!(sys.deterministic_rhs(lo) > 0.0 && sys.deterministic_rhs(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sys.deterministic_rhs(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(sys.deterministic_rhs(0.5 * (lo + hi)).abs() < 1e-10);
    }

    #[test]
    fn equilibrium_presets() {
        let mono = SchloglSystem::monostable(1.0, 3).unwrap();
        assert!(mono.is_equilibrium());
        let bi = SchloglSystem::bistable(1.0, 3).unwrap();
        assert!(!bi.is_equilibrium());
        assert_relative_eq!(bi.flux_ratio(), 59.0, max_relative = 1e-12);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(SchloglSystem::new(3.0, 0.6, 0.25, 2.95, 1.0, 1.0, 0.0, 3).is_err());
        assert!(SchloglSystem::new(-1.0, 0.6, 0.25, 2.95, 1.0, 1.0, 1.0, 3).is_err());
        assert!(SchloglSystem::new(3.0, 0.6, 0.25, 2.95, 1.0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn padding_preserves_generator_invariants() {
        let q = SchloglSystem::bistable(1.5, 4).unwrap().generator();
        let p = q.padded_to(8).unwrap();
        assert_eq!(p.dim(), 8);
        for j in 0..8 {
            let s: f64 = (0..8).map(|i| p.entry(i, j)).sum();
            assert_eq!(s, 0.0);
        }
        // padded block is identically zero
        for i in 5..8 {
            for j in 0..8 {
                assert_eq!(p.entry(i, j), 0.0);
                assert_eq!(p.entry(j, i), 0.0);
            }
        }
        assert!(q.padded_to(3).is_err());
    }

    #[test]
    fn from_entries_validates() {
        let q = SchloglSystem::bistable(1.0, 3).unwrap().generator();
        assert!(GeneratorMatrix::from_entries(q.matrix().clone()).is_ok());

        let bad = ndarray::array![[-1.0, 0.0], [1.0, 0.1]];
        assert!(GeneratorMatrix::from_entries(bad).is_err());
    }

    #[test]
    fn config_round_trip() {
        let sys = SchloglSystem::bistable(2.5, 7).unwrap();
        let json = serde_json::to_string(&sys).unwrap();
        assert!(json.contains("\"V\":2.5"));
        assert!(json.contains("\"N_trunc\":7"));
        let back: SchloglSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sys);
    }

    proptest! {
        #[test]
        fn generator_columns_sum_to_zero(
            k1 in 0.0f64..5.0, k2 in 0.0f64..5.0, k3 in 0.0f64..5.0, k4 in 0.0f64..5.0,
            a in 0.0f64..10.0, b in 0.0f64..10.0,
            v in 0.05f64..50.0, n_trunc in 1usize..40,
        ) {
            let sys = SchloglSystem::new(k1, k2, k3, k4, a, b, v, n_trunc).unwrap();
            let q = sys.generator();
            for j in 0..q.dim() {
                let s: f64 = (0..q.dim()).map(|i| q.entry(i, j)).sum();
                prop_assert!(s.abs() <= 1e-12, "column {} sums to {}", j, s);
            }
            // all-ones row vector is a left null vector
            for j in 0..q.dim() {
                let s: f64 = (0..q.dim()).map(|i| q.entry(i, j)).sum();
                prop_assert!(s.abs() <= 1e-12);
            }
        }

        #[test]
        fn rates_are_nonnegative(
            k1 in 0.0f64..5.0, k2 in 0.0f64..5.0, k3 in 0.0f64..5.0, k4 in 0.0f64..5.0,
            a in 0.0f64..10.0, b in 0.0f64..10.0,
            v in 0.05f64..50.0, n_trunc in 1usize..40, n in 0usize..40,
        ) {
            let sys = SchloglSystem::new(k1, k2, k3, k4, a, b, v, n_trunc).unwrap();
            let n = n.min(n_trunc);
            prop_assert!(sys.birth_rate(n).unwrap() >= 0.0);
            prop_assert!(sys.death_rate(n).unwrap() >= 0.0);
        }
    }
}

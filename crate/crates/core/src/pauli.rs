//! Pauli-string decomposition of Hermitian operators and the term
//! sorting/truncation strategies used to shrink them.
//!
//! Canonical ("default") order is lexicographic over labels with
//! `I < X < Y < Z`, the leftmost character acting on the highest qubit.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitize::HermitianOperator;

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidParameter(format!(
                "invalid Pauli character '{other}'"
            ))),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis. `ops[0]` is the leftmost label
/// character and acts on qubit `n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    /// Canonical rank: base-4 value of the label with I=0, X=1, Y=2, Z=3 and
    /// the leftmost character most significant.
    pub fn code(&self) -> usize {
        self.ops.iter().fold(0, |acc, &p| acc * 4 + p as usize)
    }

    pub fn from_code(code: usize, n_qubits: usize) -> Self {
        let mut ops = vec![Pauli::I; n_qubits];
        let mut c = code;
        for k in (0..n_qubits).rev() {
            ops[k] = match c % 4 {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            };
            c /= 4;
        }
        Self { ops }
    }

    /// Bit masks describing the action on basis kets: `P|b> = phase(b) |b ^ xmask>`
    /// with `phase(b) = i^ny * (-1)^popcount(b & zmask)`.
    pub(crate) fn masks(&self) -> (usize, usize, usize) {
        let n = self.ops.len();
        let (mut xmask, mut zmask, mut ny) = (0usize, 0usize, 0usize);
        for (k, &p) in self.ops.iter().enumerate() {
            let qubit = n - 1 - k;
            match p {
                Pauli::I => {}
                Pauli::X => xmask |= 1 << qubit,
                Pauli::Y => {
                    xmask |= 1 << qubit;
                    zmask |= 1 << qubit;
                    ny += 1;
                }
                Pauli::Z => zmask |= 1 << qubit,
            }
        }
        (xmask, zmask, ny)
    }

    /// Dense matrix of the string.
    pub fn matrix(&self) -> Array2<Complex64> {
        let dim = 1usize << self.ops.len();
        let (xmask, zmask, ny) = self.masks();
        let base = Complex64::i().powu((ny % 4) as u32);
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for b in 0..dim {
            let a = b ^ xmask;
            let mut ph = base;
            if (b & zmask).count_ones() % 2 == 1 {
                ph = -ph;
            }
            m[[a, b]] = ph;
        }
        m
    }

    /// Expectation against the uniform superposition; nonzero (and equal to
    /// one) exactly when the string contains only I and X.
    pub fn uniform_expectation(&self) -> f64 {
        let dim = 1usize << self.ops.len();
        let (_xmask, zmask, ny) = self.masks();
        let base = Complex64::i().powu((ny % 4) as u32);
        let mut acc = Complex64::ZERO;
        for b in 0..dim {
            let mut ph = base;
            if (b & zmask).count_ones() % 2 == 1 {
                ph = -ph;
            }
            acc += ph;
        }
        let value = acc.re / dim as f64;
        debug_assert!(acc.im.abs() < 1e-12);
        value
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            write!(f, "{}", op.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::InvalidParameter("empty Pauli string".into()));
        }
        Ok(Self { ops })
    }
}

/// One weighted Pauli string. Hermitian operators have real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

/// Term ordering currently applied to a [`PauliSum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortStrategy {
    /// Canonical enumeration order.
    Default,
    /// Signed coefficients descending, so positives lead.
    PositiveFirst,
    /// Absolute coefficients descending.
    Magnitude,
    /// Only terms with nonzero expectation against the uniform state,
    /// original order otherwise preserved.
    Optimized,
}

/// Weighted sum of Pauli strings representing a Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    ordering: SortStrategy,
}

impl PauliSum {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for t in &terms {
            if t.string.len() != n_qubits {
                return Err(Error::DimensionMismatch(format!(
                    "term {} has {} qubits, sum has {}",
                    t.string,
                    t.string.len(),
                    n_qubits
                )));
            }
            if !seen.insert(t.string.code()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate Pauli string {}",
                    t.string
                )));
            }
        }
        Ok(Self {
            n_qubits,
            terms,
            ordering: SortStrategy::Default,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn ordering(&self) -> SortStrategy {
        self.ordering
    }

    /// Sum of absolute coefficients, an upper bound on the spectral radius.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Reorder (or filter, for [`SortStrategy::Optimized`]) the terms.
    /// Ties are broken by canonical string order for determinism.
    pub fn sorted(&self, strategy: SortStrategy) -> PauliSum {
        let mut terms = self.terms.clone();
        match strategy {
            SortStrategy::Default => {
                terms.sort_by_key(|t| t.string.code());
            }
            SortStrategy::PositiveFirst => {
                terms.sort_by(|a, b| {
                    b.coefficient
                        .partial_cmp(&a.coefficient)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.string.code().cmp(&b.string.code()))
                });
            }
            SortStrategy::Magnitude => {
                terms.sort_by(|a, b| {
                    b.coefficient
                        .abs()
                        .partial_cmp(&a.coefficient.abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.string.code().cmp(&b.string.code()))
                });
            }
            SortStrategy::Optimized => {
                terms.retain(|t| t.string.uniform_expectation().abs() > 1e-12);
            }
        }
        PauliSum {
            n_qubits: self.n_qubits,
            terms,
            ordering: strategy,
        }
    }

    /// Keep the first `keep` terms under the current ordering.
    pub fn truncated(&self, keep: usize) -> Result<PauliSum> {
        if keep == 0 || keep > self.terms.len() {
            return Err(Error::OutOfRange(format!(
                "keep = {keep} outside 1..={}",
                self.terms.len()
            )));
        }
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms[..keep].to_vec(),
            ordering: self.ordering,
        })
    }

    /// Dense matrix of the sum.
    pub fn matrix(&self) -> Array2<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for term in &self.terms {
            let (xmask, zmask, ny) = term.string.masks();
            let base = Complex64::i().powu((ny % 4) as u32) * term.coefficient;
            for b in 0..dim {
                let a = b ^ xmask;
                let ph = if (b & zmask).count_ones() % 2 == 1 { -base } else { base };
                m[[a, b]] += ph;
            }
        }
        m
    }
}

/// Decompose a Hermitian operator into weighted Pauli strings with
/// coefficients `trace(P_j H) / 2^n`, dropping magnitudes at or below
/// `drop_tolerance`. Terms come out in canonical order.
pub fn decompose(h: &HermitianOperator, drop_tolerance: f64) -> Result<PauliSum> {
    let dim = h.dim();
    if !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "operator dimension {dim} is not a power of two"
        )));
    }
    let n_qubits = dim.trailing_zeros() as usize;
    let m = h.matrix();
    let mut terms = Vec::new();
    for code in 0..1usize << (2 * n_qubits) {
        let string = PauliString::from_code(code, n_qubits);
        let (xmask, zmask, ny) = string.masks();
        let base = Complex64::i().powu((ny % 4) as u32);
        let mut tr = Complex64::ZERO;
        for b in 0..dim {
            let a = b ^ xmask;
            let mut ph = base;
            if (b & zmask).count_ones() % 2 == 1 {
                ph = -ph;
            }
            // trace(P H) = sum_b P[b^x, b] H[b, b^x]
            tr += ph * m[[b, a]];
        }
        let c = tr / dim as f64;
        if c.im.abs() > 1e-12 {
            return Err(Error::Solver(format!(
                "Pauli coefficient for {string} has imaginary part {:.3e}; operator is not Hermitian",
                c.im
            )));
        }
        if c.re.abs() > drop_tolerance {
            terms.push(PauliTerm {
                coefficient: c.re,
                string,
            });
        }
    }
    Ok(PauliSum {
        n_qubits,
        terms,
        ordering: SortStrategy::Default,
    })
}

/// Default drop tolerance separating structural zeros from roundoff.
pub const DEFAULT_DROP_TOLERANCE: f64 = 1e-12;

impl fmt::Display for PauliSum {
    /// One `COEFF STRING` line per term, 17 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for term in &self.terms {
            writeln!(f, "{:.16e} {}", term.coefficient, term.string)?;
        }
        Ok(())
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n_qubits = None;
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let coeff: f64 = parts
                .next()
                .ok_or_else(|| Error::InvalidParameter("missing coefficient".into()))?
                .parse()
                .map_err(|e| Error::InvalidParameter(format!("bad coefficient: {e}")))?;
            let string: PauliString = parts
                .next()
                .ok_or_else(|| Error::InvalidParameter("missing Pauli string".into()))?
                .parse()?;
            if let Some(n) = n_qubits {
                if string.len() != n {
                    return Err(Error::DimensionMismatch(
                        "inconsistent string lengths".into(),
                    ));
                }
            } else {
                n_qubits = Some(string.len());
            }
            terms.push(PauliTerm {
                coefficient: coeff,
                string,
            });
        }
        let n_qubits =
            n_qubits.ok_or_else(|| Error::InvalidParameter("no terms in input".into()))?;
        PauliSum::new(n_qubits, terms)
    }
}

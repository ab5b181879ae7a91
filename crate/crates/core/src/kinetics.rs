//! Linear rate-equation generators over a small set of levels.
//!
//! The generator `M` acts on the population column vector, dρ/dt = M ρ, with
//! `M[to][from]` the transition rate from `from` into `to`. Every column sums
//! to zero, so total population is conserved and the steady state spans the
//! kernel of `M`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{non_negative, Error, Result};
use crate::model::SteadyState;

/// Relative tolerance on the column sums of a generator.
const COLUMN_SUM_TOL: f64 = 1e-12;

/// Negative populations down to this size are rounding noise and are clamped to zero.
const NEGATIVE_NOISE: f64 = 1e-12;

/// One directed transition `from -> to` with its rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    labels: Vec<String>,
    matrix: DMatrix<f64>,
}

impl Generator {
    /// Assembles a generator from directed transitions between labelled levels.
    pub fn from_transitions<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        transitions: &[Transition],
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(Error::Configuration("generator has no levels".into()));
        }
        let mut matrix = DMatrix::zeros(n, n);
        for t in transitions {
            if t.from >= n || t.to >= n {
                return Err(Error::Configuration(format!(
                    "transition {} -> {} outside a {n}-level generator",
                    t.from, t.to
                )));
            }
            non_negative("transition rate", t.rate)?;
            if t.from == t.to {
                continue;
            }
            matrix[(t.to, t.from)] += t.rate;
            matrix[(t.from, t.from)] -= t.rate;
        }
        Ok(Self { labels, matrix })
    }

    /// Wraps a full matrix, checking non-negative off-diagonals and zero column sums.
    pub fn from_matrix<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        matrix: DMatrix<f64>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Configuration(format!(
                "{}x{} matrix for {n} labels",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for j in 0..n {
            let mut scale = 0.0f64;
            let mut sum = 0.0;
            for i in 0..n {
                let v = matrix[(i, j)];
                if !v.is_finite() {
                    return Err(Error::Configuration(format!(
                        "non-finite rate at ({i}, {j})"
                    )));
                }
                if i != j && v < 0.0 {
                    return Err(Error::Configuration(format!(
                        "negative off-diagonal rate {v} at ({i}, {j})"
                    )));
                }
                scale = scale.max(v.abs());
                sum += v;
            }
            if sum.abs() > COLUMN_SUM_TOL * scale.max(1.0) {
                return Err(Error::Configuration(format!(
                    "column {j} sums to {sum:e}, not zero"
                )));
            }
        }
        Ok(Self { labels, matrix })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Largest total escape rate out of any level, max_j |M_jj|.
    pub fn max_escape_rate(&self) -> f64 {
        (0..self.len())
            .map(|j| self.matrix[(j, j)].abs())
            .fold(0.0, f64::max)
    }

    /// Time derivative M ρ for a population vector.
    pub fn apply(&self, populations: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(populations);
        (&self.matrix * v).iter().copied().collect()
    }

    /// Unique normalized steady state by a direct linear solve.
    ///
    /// The last balance equation is replaced by the normalization Σρ = 1 and
    /// the resulting system is solved by LU with partial pivoting.
    pub fn steady_state(&self) -> Result<SteadyState> {
        let n = self.len();
        if self.max_escape_rate() == 0.0 {
            return Err(Error::Degenerate(
                "all rates are zero; every state is stationary".into(),
            ));
        }
        let mut system = self.matrix.clone();
        system.row_mut(n - 1).fill(1.0);
        let mut rhs = DVector::zeros(n);
        rhs[n - 1] = 1.0;
        let solution = system
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Degenerate("rate matrix has no unique kernel".into()))?;
        let mut populations = Vec::with_capacity(n);
        for (i, &p) in solution.iter().enumerate() {
            if !p.is_finite() || p < -NEGATIVE_NOISE {
                return Err(Error::Degenerate(format!(
                    "steady state has population {p:e} on `{}`",
                    self.labels[i]
                )));
            }
            populations.push(p.max(0.0));
        }
        SteadyState::from_parts(
            self.labels.clone(),
            populations,
            None,
            Complex64::new(0.0, 0.0),
        )
    }
}

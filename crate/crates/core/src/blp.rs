//! Information-backflow measure: the total growth of the trace distance over
//! the intervals where it increases, maximized over sampled initial pairs.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qla::ComplexMatrix;
use crate::states::{density_ensemble, pure_qubit, BipartiteState, Ensemble};
use crate::witness::{self, Propagator, ScenarioPair};

pub const DEFAULT_RISE_TOL: f64 = 1e-10;
const TIE_TOL: f64 = 1e-12;

/// Sample indices `start < end` bounding a maximal run of increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IncreaseInterval {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityProfile {
    pub times: Vec<f64>,
    pub d_values: Vec<f64>,
    pub intervals: Vec<IncreaseInterval>,
}

impl MonotonicityProfile {
    /// `Σ_k [D(b_k) − D(a_k)]`
    pub fn measure(&self) -> f64 {
        self.intervals.iter().fold(0.0, |acc, iv| acc + self.d_values[iv.end] - self.d_values[iv.start])
    }

    /// Whether each sample lies inside (or on the boundary of) an interval.
    pub fn interval_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.times.len()];
        for iv in &self.intervals {
            flags[iv.start..=iv.end].iter_mut().for_each(|f| *f = true);
        }
        flags
    }
}

/// Merges consecutive steps that rise by more than `rise_tol` into maximal
/// intervals.
pub fn increasing_intervals(times: &[f64], d_values: &[f64], rise_tol: f64) -> Result<MonotonicityProfile> {
    if times.len() != d_values.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} times but {} trace-distance values",
            times.len(),
            d_values.len()
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("times must be strictly ascending".into()));
    }
    let mut intervals = Vec::new();
    let mut open: Option<usize> = None;
    for i in 1..d_values.len() {
        if d_values[i] - d_values[i - 1] > rise_tol {
            open.get_or_insert(i - 1);
        } else if let Some(start) = open.take() {
            intervals.push(IncreaseInterval { start, end: i - 1 });
        }
    }
    if let Some(start) = open {
        intervals.push(IncreaseInterval { start, end: d_values.len() - 1 });
    }
    Ok(MonotonicityProfile { times: times.to_vec(), d_values: d_values.to_vec(), intervals })
}

pub fn monotonicity_profile(sc: &ScenarioPair, times: &[f64], rise_tol: f64) -> Result<MonotonicityProfile> {
    let d = witness::trace_distance_series(sc, times)?;
    increasing_intervals(times, &d, rise_tol)
}

/// Backflow for the scenario's fixed pair of initial states.
pub fn nm_measure_fixed_pair(sc: &ScenarioPair, times: &[f64], rise_tol: f64) -> Result<f64> {
    Ok(monotonicity_profile(sc, times, rise_tol)?.measure())
}

/// Reduced dynamics that can be started from arbitrary system states.
pub trait ReducedDynamics: Sync {
    fn system_dim(&self) -> usize;

    fn trace_distance_series(&self, rho1: &ComplexMatrix, rho2: &ComplexMatrix, times: &[f64]) -> Result<Vec<f64>>;
}

/// Reduced dynamics of `ρ_S ⊗ ρ_E` with a fixed environment state.
#[derive(Debug, Clone)]
pub struct ProductEnvironment {
    propagator: Arc<Propagator>,
    env: Ensemble,
    ds: usize,
    de: usize,
}

impl ProductEnvironment {
    pub fn new(propagator: Arc<Propagator>, env: &ComplexMatrix, ds: usize) -> Result<Self> {
        let de = env.nrows();
        if ds * de != propagator.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{ds} × {de} states do not match a propagator of dimension {}",
                propagator.dim()
            )));
        }
        Ok(Self { propagator, env: density_ensemble(env)?, ds, de })
    }
}

impl ReducedDynamics for ProductEnvironment {
    fn system_dim(&self) -> usize {
        self.ds
    }

    fn trace_distance_series(&self, rho1: &ComplexMatrix, rho2: &ComplexMatrix, times: &[f64]) -> Result<Vec<f64>> {
        let state = |rho: &ComplexMatrix| -> Result<BipartiteState> {
            if rho.shape() != (self.ds, self.ds) {
                return Err(Error::DimensionMismatch(format!("expected a {0} × {0} system state", self.ds)));
            }
            Ok(BipartiteState::product_of_ensembles(&density_ensemble(rho)?, &self.env, self.ds, self.de))
        };
        let sc = ScenarioPair::new(state(rho1)?, state(rho2)?, Arc::clone(&self.propagator))?;
        witness::trace_distance_series(&sc, times)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi: f64,
}

impl BlochAngles {
    pub fn antipode(self) -> Self {
        Self { theta: PI - self.theta, phi: (self.phi + PI).rem_euclid(2.0 * PI) }
    }

    pub fn state(self) -> ComplexMatrix {
        pure_qubit(self.theta, self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochPair {
    pub first: BlochAngles,
    pub second: BlochAngles,
}

impl BlochPair {
    fn key(&self) -> [f64; 4] {
        [self.first.theta, self.first.phi, self.second.theta, self.second.phi]
    }
}

fn lattice(n: usize, span: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![span],
        _ => (0..n).map(|i| span * i as f64 / (n - 1) as f64).collect(),
    }
}

fn phis(n_phi: usize) -> Vec<f64> {
    (0..n_phi.max(1)).map(|j| 2.0 * PI * j as f64 / n_phi.max(1) as f64).collect()
}

/// Orthogonal pure pairs `(θ, φ)` / `(π − θ, φ + π)` with `θ` on `n_theta`
/// points of `[0, π/2]` and `φ` on `n_phi` points of `[0, 2π)`.
pub fn antipodal_pairs(n_theta: usize, n_phi: usize) -> Vec<BlochPair> {
    let mut out = Vec::new();
    for &theta in &lattice(n_theta, PI / 2.0) {
        for &phi in &phis(n_phi) {
            let first = BlochAngles { theta, phi };
            out.push(BlochPair { first, second: first.antipode() });
        }
    }
    out
}

/// Every unordered pair of distinct lattice points with `θ` on `n_theta`
/// points of `[0, π]`.
pub fn product_pairs(n_theta: usize, n_phi: usize) -> Vec<BlochPair> {
    let mut points = Vec::new();
    for &theta in &lattice(n_theta, PI) {
        for &phi in &phis(n_phi) {
            points.push(BlochAngles { theta, phi });
        }
    }
    let mut out = Vec::new();
    for (a, &first) in points.iter().enumerate() {
        for &second in &points[a + 1..] {
            out.push(BlochPair { first, second });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximizedMeasure {
    /// Largest sampled backflow; a lower estimate of the true maximum.
    pub value: f64,
    pub best: BlochPair,
}

/// Maximizes the fixed-pair measure over `pairs`. Ties within 1e-12 go to
/// the lexicographically smallest `(θ₁, φ₁, θ₂, φ₂)`.
pub fn nm_measure_maximized<M: ReducedDynamics + ?Sized>(
    model: &M,
    times: &[f64],
    pairs: &[BlochPair],
    rise_tol: f64,
) -> Result<MaximizedMeasure> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("pair grid is empty".into()));
    }
    if model.system_dim() != 2 {
        return Err(Error::DimensionMismatch("Bloch-angle pairs need a qubit system".into()));
    }
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|pair| {
            let d = model.trace_distance_series(&pair.first.state(), &pair.second.state(), times)?;
            Ok(increasing_intervals(times, &d, rise_tol)?.measure())
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for i in 1..pairs.len() {
        let better = values[i] > values[best] + TIE_TOL
            || ((values[i] - values[best]).abs() <= TIE_TOL
                && pairs[i].key().partial_cmp(&pairs[best].key()) == Some(Ordering::Less));
        if better {
            best = i;
        }
    }
    Ok(MaximizedMeasure { value: values[best], best: pairs[best] })
}

//! Grid experiments: verdict-agreement scans, phase-grid scans, and the
//! search-residual sweeps that probe where the necessary conditions stop
//! being sufficient.
//!
//! Everything here is deterministic for a fixed seed: grids enumerate in a
//! fixed order and parallel evaluation preserves that order in the output.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::feasibility::{polygon_inequalities, Verdict};
use crate::model::{output_amplitudes, PhaseVector, ProbabilityDistribution};
use crate::synthesis::{synthesize_search, synthesize_three_port, SearchConfig, SynthesisOutcome};

/// Points of the probability simplex on a regular grid with the given
/// step, enumerated lexicographically. `step` must divide 1 into a whole
/// number of increments (within roundoff).
pub fn simplex_grid(d: usize, step: f64) -> Result<Vec<Vec<f64>>, Error> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidSearchConfig {
            reason: format!("grid step {step} must lie in (0, 1]"),
        });
    }
    let increments = (1.0 / step).round() as usize;
    if increments == 0 || ((increments as f64) * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSearchConfig {
            reason: format!("grid step {step} does not divide 1 evenly"),
        });
    }
    fn rec(modes: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if modes == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=remaining).rev() {
            prefix.push(first);
            rec(modes - 1, remaining - first, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(d, increments, &mut Vec::with_capacity(d), &mut raw);
    Ok(raw
        .into_iter()
        .map(|counts| {
            counts
                .into_iter()
                .map(|k| k as f64 / increments as f64)
                .collect()
        })
        .collect())
}

/// Number of points [`simplex_grid`] produces: `C(increments + d − 1, d − 1)`.
pub fn simplex_grid_len(d: usize, step: f64) -> Result<usize, Error> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidSearchConfig {
            reason: format!("grid step {step} must lie in (0, 1]"),
        });
    }
    let increments = (1.0 / step).round() as usize;
    let mut count: usize = 1;
    for i in 0..d - 1 {
        count = count * (increments + d - 1 - i) / (i + 1);
    }
    Ok(count)
}

/// One three-port grid point compared across the closed form and the
/// search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexAgreementRow {
    pub target: Vec<f64>,
    pub triangle_passed: bool,
    pub closed_form_feasible: bool,
    pub closed_form_residual: Option<f64>,
    pub search_found: bool,
    pub search_residual: Option<f64>,
    pub agree: bool,
}

/// Scans the three-outcome simplex, deciding each point independently with
/// the closed form and with the numerical search, and records whether the
/// two verdicts agree.
pub fn sweep_simplex_three_port(
    step: f64,
    config: &SearchConfig,
    eps: f64,
) -> Result<Vec<SimplexAgreementRow>, Error> {
    config.validate()?;
    let points = simplex_grid(3, step)?;
    points
        .into_par_iter()
        .map(|target| {
            let dist = ProbabilityDistribution::new(target.clone())?;
            let triangle_passed =
                polygon_inequalities(&dist).verdict == Verdict::NecessaryPassed;
            let closed = synthesize_three_port(&dist, eps)?;
            let search = synthesize_search(&dist, config)?;
            let (closed_form_feasible, closed_form_residual) = match &closed {
                SynthesisOutcome::Success(result) => (true, Some(result.residual)),
                _ => (false, None),
            };
            let (search_found, search_residual) = match &search {
                SynthesisOutcome::Success(result) => (true, Some(result.residual)),
                SynthesisOutcome::NotFound(result) => (false, Some(result.residual)),
                SynthesisOutcome::Infeasible(_) => (false, None),
            };
            Ok(SimplexAgreementRow {
                target,
                triangle_passed,
                closed_form_feasible,
                closed_form_residual,
                search_found,
                search_residual,
                agree: closed_form_feasible == search_found,
            })
        })
        .collect()
}

/// One point of the three-port phase grid: the output magnitudes and how
/// many of them clear the component threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseGridRow {
    pub theta1: f64,
    pub theta2: f64,
    pub magnitudes: Vec<f64>,
    pub above: usize,
    pub below: usize,
    /// Exactly two components above the threshold and one below: the
    /// pattern that a two-mode-only state would show.
    pub two_mode_pattern: bool,
}

/// Exhaustive scan of three-port phase settings `(θ_1, θ_2)` on a
/// `resolution × resolution` grid with `θ_0 = 0` gauge-fixed, classifying
/// each output by how many magnitudes exceed `component_tol`.
///
/// No row can show the two-mode pattern: a state of an odd-port device
/// cannot have exactly one vanishing component.
pub fn sweep_phase_grid_three_port(
    resolution: usize,
    component_tol: f64,
) -> Result<Vec<PhaseGridRow>, Error> {
    if resolution == 0 {
        return Err(Error::InvalidSearchConfig {
            reason: "phase-grid resolution must be at least 1".into(),
        });
    }
    let step = std::f64::consts::TAU / resolution as f64;
    (0..resolution * resolution)
        .into_par_iter()
        .map(|index| {
            let theta1 = (index / resolution) as f64 * step;
            let theta2 = (index % resolution) as f64 * step;
            let lambda = PhaseVector::from_angles(&[0.0, theta1, theta2])?;
            let magnitudes = output_amplitudes(&lambda, 0)?.magnitudes();
            let above = magnitudes.iter().filter(|&&m| m > component_tol).count();
            let below = magnitudes.len() - above;
            Ok(PhaseGridRow {
                theta1,
                theta2,
                magnitudes,
                above,
                below,
                two_mode_pattern: above == 2 && below == 1,
            })
        })
        .collect()
}

/// One magnitude-sweep point: polygon verdict and best search residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnitudeSweepRow {
    pub target: Vec<f64>,
    pub polygon_passed: bool,
    pub search_found: bool,
    pub search_residual: Option<f64>,
}

impl MagnitudeSweepRow {
    /// A polygon-passing point the search could not reach: evidence (not
    /// proof) that the necessary conditions are not sufficient here.
    pub fn is_sufficiency_gap_evidence(&self, residual_threshold: f64) -> bool {
        self.polygon_passed
            && self
                .search_residual
                .map(|r| r > residual_threshold)
                .unwrap_or(false)
    }
}

/// Sweeps the d-outcome simplex: every grid point is checked against the
/// polygon conditions, and polygon-passing points are attacked with the
/// full multi-start search. Points where the search stalls despite the
/// necessary conditions passing are the sufficiency-gap evidence the
/// `d = 4, 5` landscape is known for.
pub fn sweep_magnitude(
    d: usize,
    step: f64,
    config: &SearchConfig,
) -> Result<Vec<MagnitudeSweepRow>, Error> {
    config.validate()?;
    let points = simplex_grid(d, step)?;
    points
        .into_par_iter()
        .map(|target| {
            let dist = ProbabilityDistribution::new(target.clone())?;
            let polygon_passed =
                polygon_inequalities(&dist).verdict == Verdict::NecessaryPassed;
            if !polygon_passed {
                return Ok(MagnitudeSweepRow {
                    target,
                    polygon_passed,
                    search_found: false,
                    search_residual: None,
                });
            }
            let (search_found, search_residual) = match synthesize_search(&dist, config)? {
                SynthesisOutcome::Success(result) => (true, Some(result.residual)),
                SynthesisOutcome::NotFound(result) => (false, Some(result.residual)),
                SynthesisOutcome::Infeasible(_) => (false, None),
            };
            Ok(MagnitudeSweepRow {
                target,
                polygon_passed,
                search_found,
                search_residual,
            })
        })
        .collect()
}

//! Multi-photon Fock-state propagation and two-photon feasibility analysis.
//!
//! The interferometer acts on mode operators through the transfer matrix
//! `V_{mn} = c_{n+m}` (indices mod `d`), the transpose of the single-photon
//! unitary. An `n`-photon input distributes over the output occupation
//! basis with coefficients read off from expanding the product of output
//! linear forms, one factor per input photon; equivalently, each output
//! pattern's coefficient is a matrix permanent with rows repeated by input
//! occupation and columns by output occupation, divided by the output
//! pattern's multiplicities. The coefficient vector is normalized
//! numerically at the end.
//!
//! The two-photon entry points invert that map for a three-port device:
//! given a target distribution over the six two-photon patterns, they
//! recover candidate single-photon magnitudes, apply the exact three-port
//! feasibility machinery from [`crate::synthesis`], and — for two photons
//! entering different ports — accept only targets that survive a full
//! propagation round trip.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Error;
use crate::feasibility::{polygon_inequalities, FeasibilityReport, ProductMargin, Verdict};
use crate::model::{
    output_amplitudes, MatrixRole, PhaseVector, ProbabilityDistribution, UnitaryMatrix,
};
use crate::synthesis::{synthesize_three_port, SynthesisOutcome};
use crate::tolerances;

/// Default cap on the total photon number accepted by [`propagate`].
pub const DEFAULT_MAX_PHOTONS: usize = 6;

/// A photon-count pattern over `d` modes, e.g. `|2,0,0⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockState {
    occ: Vec<usize>,
}

impl FockState {
    pub fn new(occ: Vec<usize>) -> Result<Self, Error> {
        if occ.len() < 2 {
            return Err(Error::DimensionTooSmall { d: occ.len() });
        }
        Ok(Self { occ })
    }

    pub fn dim(&self) -> usize {
        self.occ.len()
    }

    /// Total photon number.
    pub fn total(&self) -> usize {
        self.occ.iter().sum()
    }

    pub fn occupations(&self) -> &[usize] {
        &self.occ
    }

    /// Compact label: digit string like `200` while every count fits one
    /// digit, comma-separated otherwise.
    pub fn label(&self) -> String {
        if self.occ.iter().all(|&n| n <= 9) {
            self.occ.iter().map(|n| n.to_string()).collect()
        } else {
            self.occ
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// All occupation patterns of `total` photons over `d` modes, in
    /// lexicographically descending order — `|2,0,0⟩` first, `|0,0,2⟩`
    /// last. This is the basis order every [`FockVector`] uses.
    pub fn enumerate(d: usize, total: usize) -> Vec<FockState> {
        fn rec(modes: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<FockState>) {
            if modes == 1 {
                prefix.push(remaining);
                out.push(FockState {
                    occ: prefix.clone(),
                });
                prefix.pop();
                return;
            }
            for first in (0..=remaining).rev() {
                prefix.push(first);
                rec(modes - 1, remaining - first, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(d, total, &mut Vec::with_capacity(d), &mut out);
        out
    }
}

/// One serialized basis amplitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockRecord {
    pub occupation: String,
    pub re: f64,
    pub im: f64,
}

/// A normalized superposition over the full `n`-photon, `d`-mode occupation
/// basis, in the order of [`FockState::enumerate`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    basis: Vec<FockState>,
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    fn new(basis: Vec<FockState>, amplitudes: Vec<Complex64>) -> Result<Self, Error> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > tolerances::FOCK_NORM {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.basis[0].dim()
    }

    /// Total photon number of the sector.
    pub fn photons(&self) -> usize {
        self.basis[0].total()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[FockState] {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude on a given occupation pattern, if it belongs to the basis.
    pub fn amplitude_of(&self, occ: &[usize]) -> Option<Complex64> {
        self.basis
            .iter()
            .position(|state| state.occupations() == occ)
            .map(|i| self.amplitudes[i])
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `(occupation label, re, im)` records in basis order.
    pub fn records(&self) -> Vec<FockRecord> {
        self.basis
            .iter()
            .zip(&self.amplitudes)
            .map(|(state, amp)| FockRecord {
                occupation: state.label(),
                re: amp.re,
                im: amp.im,
            })
            .collect()
    }
}

/// The mode-operator transfer matrix `V_{mn} = c_{n+m}` of an
/// interferometer, equal to the transpose of its single-photon unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    matrix: UnitaryMatrix,
}

impl TransferMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.matrix.entry(m, n)
    }

    pub fn matrix(&self) -> &UnitaryMatrix {
        &self.matrix
    }
}

/// Builds the transfer matrix for a phase setting.
pub fn transfer_matrix(lambda: &PhaseVector) -> TransferMatrix {
    let c = output_amplitudes(lambda, 0).expect("port 0 is always valid");
    let d = c.dim();
    let entries = Array2::from_shape_fn((d, d), |(m, n)| c.cyclic((m + n) as i64));
    let matrix = UnitaryMatrix::new(entries, MatrixRole::Transfer)
        .expect("cyclic layout of single-photon amplitudes is unitary");
    #[cfg(debug_assertions)]
    {
        let u = crate::model::interferometer(lambda);
        for m in 0..d {
            for n in 0..d {
                debug_assert!(
                    (matrix.entry(m, n) - u.entry(n, m)).norm() <= 1e-12,
                    "transfer matrix must equal the transposed interferometer"
                );
            }
        }
    }
    TransferMatrix { matrix }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Permanent of a small square matrix by direct expansion.
fn permanent(rows: &[Vec<Complex64>]) -> Complex64 {
    fn rec(rows: &[Vec<Complex64>], row: usize, used: u32) -> Complex64 {
        if row == rows.len() {
            return Complex64::new(1.0, 0.0);
        }
        let mut total = Complex64::new(0.0, 0.0);
        for col in 0..rows.len() {
            if used & (1 << col) == 0 {
                total += rows[row][col] * rec(rows, row + 1, used | (1 << col));
            }
        }
        total
    }
    if rows.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    rec(rows, 0, 0)
}

/// Propagates an occupation-basis input through the interferometer,
/// with the default photon cap of [`DEFAULT_MAX_PHOTONS`].
pub fn propagate(input: &FockState, v: &TransferMatrix) -> Result<FockVector, Error> {
    propagate_with_limit(input, v, DEFAULT_MAX_PHOTONS)
}

/// Propagates an occupation-basis input through the interferometer.
///
/// The coefficient on output pattern `S` is `per(M) / Π_j s_j!`, where `M`
/// repeats row `k` of `V` once per input photon in mode `k` and column `j`
/// once per output photon in mode `j`; the resulting vector is normalized.
/// This reproduces the coefficients of expanding the product of output-mode
/// linear forms over the occupation basis.
pub fn propagate_with_limit(
    input: &FockState,
    v: &TransferMatrix,
    max_photons: usize,
) -> Result<FockVector, Error> {
    let d = v.dim();
    if input.dim() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: input.dim(),
        });
    }
    let photons = input.total();
    if photons > max_photons {
        return Err(Error::PhotonLimitExceeded {
            photons,
            max: max_photons,
        });
    }
    let basis = FockState::enumerate(d, photons);
    if photons == 0 {
        let amplitudes = vec![Complex64::new(1.0, 0.0)];
        return FockVector::new(basis, amplitudes);
    }

    let input_rows: Vec<usize> = input
        .occupations()
        .iter()
        .enumerate()
        .flat_map(|(mode, &count)| std::iter::repeat_n(mode, count))
        .collect();

    let mut raw = Vec::with_capacity(basis.len());
    for pattern in &basis {
        let output_cols: Vec<usize> = pattern
            .occupations()
            .iter()
            .enumerate()
            .flat_map(|(mode, &count)| std::iter::repeat_n(mode, count))
            .collect();
        let matrix: Vec<Vec<Complex64>> = input_rows
            .iter()
            .map(|&row| output_cols.iter().map(|&col| v.entry(row, col)).collect())
            .collect();
        let multiplicity: f64 = pattern.occupations().iter().map(|&n| factorial(n)).product();
        raw.push(permanent(&matrix) / multiplicity);
    }

    let norm_sqr: f64 = raw.iter().map(|a| a.norm_sqr()).sum();
    if norm_sqr <= 0.0 {
        return Err(Error::NumericalInconsistency {
            context: "propagated state norm",
            deviation: norm_sqr,
        });
    }
    let norm = norm_sqr.sqrt();
    let amplitudes = raw.into_iter().map(|a| a / norm).collect();
    FockVector::new(basis, amplitudes)
}

/// The basis order in which two-photon, three-port target distributions
/// are specified: `(200, 020, 002, 110, 101, 011)` — pure patterns first,
/// then the split ones.
pub fn two_photon_target_basis() -> [[usize; 3]; 6] {
    [
        [2, 0, 0],
        [0, 2, 0],
        [0, 0, 2],
        [1, 1, 0],
        [1, 0, 1],
        [0, 1, 1],
    ]
}

/// Probabilities of a two-photon three-port state in the presentation
/// order of [`two_photon_target_basis`]. `None` if the vector is not in the
/// two-photon, three-mode sector.
pub fn two_photon_target_probabilities(fv: &FockVector) -> Option<[f64; 6]> {
    if fv.dim() != 3 || fv.photons() != 2 {
        return None;
    }
    let mut out = [0.0; 6];
    for (slot, occ) in out.iter_mut().zip(two_photon_target_basis()) {
        *slot = fv.amplitude_of(&occ)?.norm_sqr();
    }
    Some(out)
}

fn six_target_magnitudes(target: &ProbabilityDistribution) -> Result<[f64; 6], Error> {
    if target.len() != 6 {
        return Err(Error::LengthMismatch {
            expected: 6,
            got: target.len(),
        });
    }
    let mut alpha = [0.0; 6];
    for (slot, &p) in alpha.iter_mut().zip(target.as_slice()) {
        *slot = p.sqrt();
    }
    Ok(alpha)
}

fn single_photon_distribution_from_weights(weights: [f64; 3]) -> Option<ProbabilityDistribution> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    ProbabilityDistribution::new(weights.iter().map(|w| w / total).collect()).ok()
}

/// Feasibility of a two-photon target distribution when both photons enter
/// the same port of a three-port interferometer.
///
/// Target order: `(200, 020, 002, 110, 101, 011)`. The bunched amplitudes
/// must satisfy `|α_110| = 2√(|α_200||α_020|)` and its two companions; the
/// magnitudes `|c_k| ∝ √|α_k|` recovered from the pure patterns must then
/// pass the three-port triangle conditions. Feasible verdicts carry the
/// phase setting, which is the same one that prepares the underlying
/// single-photon state.
pub fn two_photon_same_port_conditions(
    target: &ProbabilityDistribution,
    eps: f64,
) -> Result<FeasibilityReport, Error> {
    let alpha = six_target_magnitudes(target)?;
    let pairs = [(3, 0, 1), (4, 0, 2), (5, 1, 2)];
    let labels = ["110", "101", "011"];
    let mut margins = Vec::with_capacity(3);
    for ((mixed, first, second), label) in pairs.into_iter().zip(labels) {
        let expected = 2.0 * (alpha[first] * alpha[second]).sqrt();
        margins.push(ProductMargin {
            name: label.to_string(),
            expected,
            actual: alpha[mixed],
            deviation: alpha[mixed] - expected,
        });
    }
    if let Some(worst) = margins
        .iter()
        .max_by(|a, b| a.deviation.abs().total_cmp(&b.deviation.abs()))
        .filter(|m| m.deviation.abs() > eps)
    {
        let mut report = FeasibilityReport::new(
            Verdict::Infeasible,
            format!(
                "bunching condition violated for pattern {}: |α| = {:.6e} but the pure patterns require {:.6e}",
                worst.name, worst.actual, worst.expected
            ),
        );
        report.product_margins = margins;
        return Ok(report);
    }

    let Some(single) = single_photon_distribution_from_weights([alpha[0], alpha[1], alpha[2]])
    else {
        let mut report = FeasibilityReport::new(
            Verdict::Infeasible,
            "all pure two-photon patterns vanish, so no single-photon magnitudes can be recovered",
        );
        report.product_margins = margins;
        return Ok(report);
    };

    let mut report = match synthesize_three_port(&single, eps)? {
        SynthesisOutcome::Success(result) => {
            let mut report = polygon_inequalities(&single);
            report.verdict = Verdict::Feasible;
            report.notes = format!(
                "bunching conditions and triangle conditions hold; synthesis residual {:.3e}",
                result.residual
            );
            report.phases = Some(result.lambda);
            report
        }
        SynthesisOutcome::Infeasible(inner) => inner,
        SynthesisOutcome::NotFound(_) => unreachable!("closed form never searches"),
    };
    report.product_margins = margins;
    Ok(report)
}

/// Candidate single-photon weight patterns consistent with vanishing
/// entries among the pure two-photon coefficients `α_200, α_020, α_002`
/// of a two-different-ports input.
fn degenerate_candidates(alpha: &[f64; 6], eps: f64) -> Vec<[f64; 3]> {
    let zeroish = |v: f64| v <= eps.max(tolerances::ZERO_MAGNITUDE);
    let mut candidates = Vec::new();
    // One vanishing amplitude: the pure coefficients are c0c1, c1c2, c2c0,
    // so each zero kills two of them; the mixed patterns then pin the
    // surviving squared magnitudes.
    if zeroish(alpha[0]) && zeroish(alpha[2]) {
        candidates.push([0.0, alpha[3], alpha[5]]);
    }
    if zeroish(alpha[0]) && zeroish(alpha[1]) {
        candidates.push([alpha[4], 0.0, alpha[5]]);
    }
    if zeroish(alpha[1]) && zeroish(alpha[2]) {
        candidates.push([alpha[4], alpha[3], 0.0]);
    }
    // Two vanishing amplitudes: a single occupied mode.
    if [0, 1, 2, 3, 4].iter().all(|&i| zeroish(alpha[i])) {
        candidates.push([0.0, 0.0, 1.0]);
    }
    if [0, 1, 2, 4, 5].iter().all(|&i| zeroish(alpha[i])) {
        candidates.push([0.0, 1.0, 0.0]);
    }
    if [0, 1, 2, 3, 5].iter().all(|&i| zeroish(alpha[i])) {
        candidates.push([1.0, 0.0, 0.0]);
    }
    candidates
}

/// Feasibility of a two-photon target distribution when the photons enter
/// two different ports (0 and 1) of a three-port interferometer.
///
/// Target order: `(200, 020, 002, 110, 101, 011)`. The pure patterns give
/// `|α_200| ∝ |c_0||c_1|`, `|α_020| ∝ |c_1||c_2|`, `|α_002| ∝ |c_2||c_0|`,
/// which invert to candidate magnitudes when all three are nonzero; the
/// mixed patterns are screened by a magnitude-compatibility interval, and
/// the verdict is `Feasible` only when synthesizing the candidate and
/// propagating `|110⟩` reproduces the target within `eps`.
pub fn two_photon_two_port_conditions(
    target: &ProbabilityDistribution,
    eps: f64,
) -> Result<FeasibilityReport, Error> {
    let alpha = six_target_magnitudes(target)?;
    let all_pure_nonzero = alpha[..3]
        .iter()
        .all(|&a| a > eps.max(tolerances::ZERO_MAGNITUDE));

    let mut product_margins = Vec::new();
    let candidates: Vec<[f64; 3]> = if all_pure_nonzero {
        let weights = [
            alpha[2] * alpha[0] / alpha[1], // ∝ |c_0|²
            alpha[0] * alpha[1] / alpha[2], // ∝ |c_1|²
            alpha[1] * alpha[2] / alpha[0], // ∝ |c_2|²
        ];
        match single_photon_distribution_from_weights(weights) {
            Some(single) => {
                // Necessary interval check on the mixed patterns: each is
                // |product ± square| of known magnitudes up to one shared
                // scale, so its value must land inside that window.
                let m = single.magnitudes();
                let scale = alpha[0] / (m[0] * m[1]);
                let windows = [
                    ("110", alpha[3], m[0] * m[2], m[1] * m[1]),
                    ("101", alpha[4], m[1] * m[2], m[0] * m[0]),
                    ("011", alpha[5], m[0] * m[1], m[2] * m[2]),
                ];
                let mut outside: Option<String> = None;
                for (name, actual, product, square) in windows {
                    let lo = scale * (product - square).abs();
                    let hi = scale * (product + square);
                    let deviation = if actual < lo {
                        actual - lo
                    } else if actual > hi {
                        actual - hi
                    } else {
                        0.0
                    };
                    if deviation.abs() > eps && outside.is_none() {
                        outside = Some(format!(
                            "mixed pattern {name} has |α| = {actual:.6e}, outside the compatible range [{lo:.6e}, {hi:.6e}]"
                        ));
                    }
                    product_margins.push(ProductMargin {
                        name: name.to_string(),
                        expected: (lo + hi) / 2.0,
                        actual,
                        deviation,
                    });
                }
                if let Some(notes) = outside {
                    let mut report = FeasibilityReport::new(Verdict::Infeasible, notes);
                    report.product_margins = product_margins;
                    return Ok(report);
                }
                vec![[single.get(0), single.get(1), single.get(2)]]
            }
            None => Vec::new(),
        }
    } else {
        degenerate_candidates(&alpha, eps)
    };

    if candidates.is_empty() {
        let mut report = FeasibilityReport::new(
            Verdict::Infeasible,
            "no single-photon amplitude pattern is consistent with the vanishing coefficients",
        );
        report.product_margins = product_margins;
        return Ok(report);
    }

    let input = FockState::new(vec![1, 1, 0])?;
    let mut failures = Vec::new();
    for weights in &candidates {
        let Some(single) = single_photon_distribution_from_weights(*weights) else {
            continue;
        };
        match synthesize_three_port(&single, eps)? {
            SynthesisOutcome::Success(result) => {
                let v = transfer_matrix(&result.lambda);
                let propagated = propagate(&input, &v)?;
                let achieved = two_photon_target_probabilities(&propagated)
                    .expect("propagation stays in the two-photon three-mode sector");
                let round_trip = achieved
                    .iter()
                    .zip(target.as_slice())
                    .map(|(got, want)| (got - want).abs())
                    .fold(0.0, f64::max);
                if round_trip <= eps {
                    let mut report = polygon_inequalities(&single);
                    report.verdict = Verdict::Feasible;
                    report.phases = Some(result.lambda);
                    report.product_margins = product_margins;
                    report.notes = format!(
                        "round trip through |110⟩ propagation reproduces the target within {round_trip:.3e}"
                    );
                    return Ok(report);
                }
                failures.push(format!(
                    "candidate magnitudes ({:.4}, {:.4}, {:.4}) synthesize but round-trip deviates by {:.3e}",
                    weights[0], weights[1], weights[2], round_trip
                ));
            }
            SynthesisOutcome::Infeasible(inner) => {
                failures.push(format!(
                    "candidate magnitudes ({:.4}, {:.4}, {:.4}) fail the triangle conditions: {}",
                    weights[0], weights[1], weights[2], inner.notes
                ));
            }
            SynthesisOutcome::NotFound(_) => unreachable!("closed form never searches"),
        }
    }
    let mut report = FeasibilityReport::new(
        Verdict::Infeasible,
        format!("every candidate failed — {}", failures.join("; ")),
    );
    report.product_margins = product_margins;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{interferometer, Dimension};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, TAU};

    fn random_phases(rng: &mut ChaCha8Rng, d: usize) -> PhaseVector {
        let angles: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * TAU).collect();
        PhaseVector::from_angles(&angles).unwrap()
    }

    /// Independent oracle: expand the product of output-mode linear forms
    /// term by term, collecting monomial coefficients per output pattern.
    fn expansion_oracle(input: &FockState, v: &TransferMatrix) -> HashMap<Vec<usize>, Complex64> {
        let d = v.dim();
        let mut poly: HashMap<Vec<usize>, Complex64> = HashMap::new();
        poly.insert(vec![0; d], Complex64::new(1.0, 0.0));
        for (mode, &count) in input.occupations().iter().enumerate() {
            for _ in 0..count {
                let mut next: HashMap<Vec<usize>, Complex64> = HashMap::new();
                for (pattern, coeff) in &poly {
                    for j in 0..d {
                        let mut bumped = pattern.clone();
                        bumped[j] += 1;
                        *next.entry(bumped).or_insert(Complex64::new(0.0, 0.0)) +=
                            coeff * v.entry(mode, j);
                    }
                }
                poly = next;
            }
        }
        poly
    }

    fn normalized_map(map: &HashMap<Vec<usize>, Complex64>) -> HashMap<Vec<usize>, Complex64> {
        let norm: f64 = map.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        map.iter().map(|(k, v)| (k.clone(), v / norm)).collect()
    }

    #[test]
    fn basis_enumeration_order_and_size() {
        let basis = FockState::enumerate(3, 2);
        let expected: Vec<Vec<usize>> = vec![
            vec![2, 0, 0],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, 2, 0],
            vec![0, 1, 1],
            vec![0, 0, 2],
        ];
        let got: Vec<Vec<usize>> = basis.iter().map(|s| s.occupations().to_vec()).collect();
        assert_eq!(got, expected);
        assert_eq!(FockState::enumerate(4, 3).len(), 20); // C(6, 3)
    }

    #[test]
    fn transfer_identity_phases_is_index_negation_permutation() {
        let lambda = PhaseVector::identity(Dimension::new(3).unwrap());
        let v = transfer_matrix(&lambda);
        for m in 0..3 {
            for n in 0..3 {
                let expected = if (m + n) % 3 == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(v.entry(m, n).re, expected, epsilon = 1e-14);
                assert_abs_diff_eq!(v.entry(m, n).im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn transfer_is_transposed_interferometer() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=6 {
            let lambda = random_phases(&mut rng, d);
            let v = transfer_matrix(&lambda);
            let u = interferometer(&lambda);
            assert!(v.matrix().unitarity_defect() < 1e-10);
            for m in 0..d {
                for n in 0..d {
                    assert!((v.entry(m, n) - u.entry(n, m)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_photon_propagation_matches_output_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for port in 0..3 {
            let lambda = random_phases(&mut rng, 3);
            let v = transfer_matrix(&lambda);
            let mut occ = vec![0; 3];
            occ[port] = 1;
            let fv = propagate(&FockState::new(occ).unwrap(), &v).unwrap();
            let c = output_amplitudes(&lambda, port).unwrap();
            for m in 0..3 {
                let mut pattern = vec![0; 3];
                pattern[m] = 1;
                let amp = fv.amplitude_of(&pattern).unwrap();
                assert!((amp - c.as_slice()[m]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bunched_input_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let lambda = random_phases(&mut rng, 3);
            let v = transfer_matrix(&lambda);
            let c = output_amplitudes(&lambda, 0).unwrap();
            let cs = c.as_slice();
            let raw = [
                cs[0] * cs[0],
                cs[1] * cs[1],
                cs[2] * cs[2],
                2.0 * cs[0] * cs[1],
                2.0 * cs[0] * cs[2],
                2.0 * cs[1] * cs[2],
            ];
            let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let fv = propagate(&FockState::new(vec![2, 0, 0]).unwrap(), &v).unwrap();
            for (occ, expected) in two_photon_target_basis().iter().zip(raw) {
                let amp = fv.amplitude_of(occ).unwrap();
                assert!((amp - expected / norm).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn split_input_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let lambda = random_phases(&mut rng, 3);
            let v = transfer_matrix(&lambda);
            let c = output_amplitudes(&lambda, 0).unwrap();
            let cs = c.as_slice();
            let raw = [
                cs[0] * cs[1],
                cs[1] * cs[2],
                cs[2] * cs[0],
                cs[0] * cs[2] + cs[1] * cs[1],
                cs[1] * cs[2] + cs[0] * cs[0],
                cs[0] * cs[1] + cs[2] * cs[2],
            ];
            let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let fv = propagate(&FockState::new(vec![1, 1, 0]).unwrap(), &v).unwrap();
            for (occ, expected) in two_photon_target_basis().iter().zip(raw) {
                let amp = fv.amplitude_of(occ).unwrap();
                assert!((amp - expected / norm).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn permanent_matches_expansion_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let inputs: Vec<Vec<usize>> = vec![
            vec![1, 0],
            vec![1, 1],
            vec![2, 0],
            vec![2, 1],
            vec![3, 0],
            vec![1, 1, 0],
            vec![2, 0, 1],
            vec![3, 0, 0],
            vec![1, 1, 1],
            vec![2, 1, 0, 0],
            vec![1, 1, 0, 1],
        ];
        for occ in inputs {
            let d = occ.len();
            let lambda = random_phases(&mut rng, d);
            let v = transfer_matrix(&lambda);
            let input = FockState::new(occ).unwrap();
            let fv = propagate(&input, &v).unwrap();
            let oracle = normalized_map(&expansion_oracle(&input, &v));
            assert_eq!(oracle.len(), fv.len());
            for (state, amp) in fv.basis().iter().zip(fv.amplitudes()) {
                let expected = oracle[&state.occupations().to_vec()];
                assert!(
                    (amp - expected).norm() < 1e-10,
                    "pattern {:?} mismatch",
                    state.occupations()
                );
            }
        }
    }

    #[test]
    fn exchange_symmetry_doubles_the_cross_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let lambda = random_phases(&mut rng, 3);
        let v = transfer_matrix(&lambda);
        let c = output_amplitudes(&lambda, 0).unwrap();
        let fv = propagate(&FockState::new(vec![2, 0, 0]).unwrap(), &v).unwrap();
        let pure = fv.amplitude_of(&[2, 0, 0]).unwrap();
        let mixed = fv.amplitude_of(&[1, 1, 0]).unwrap();
        // amplitude(110)/amplitude(200) = 2·c1/c0 under shared normalization
        let expected = 2.0 * c.as_slice()[1] / c.as_slice()[0];
        assert!((mixed / pure - expected).norm() < 1e-10);
    }

    #[test]
    fn photon_number_and_norm_are_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lambda = random_phases(&mut rng, 4);
        let v = transfer_matrix(&lambda);
        let input = FockState::new(vec![2, 1, 0, 0]).unwrap();
        let fv = propagate(&input, &v).unwrap();
        assert_eq!(fv.photons(), 3);
        let norm_sqr: f64 = fv.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert_abs_diff_eq!(norm_sqr, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn photon_cap_is_enforced() {
        let lambda = PhaseVector::identity(Dimension::new(2).unwrap());
        let v = transfer_matrix(&lambda);
        let input = FockState::new(vec![4, 3]).unwrap();
        assert!(matches!(
            propagate(&input, &v),
            Err(Error::PhotonLimitExceeded { photons: 7, max: 6 })
        ));
        assert!(propagate_with_limit(&input, &v, 7).is_ok());
    }

    #[test]
    fn same_port_rejects_unbalanced_mixing() {
        let target = ProbabilityDistribution::new(vec![
            1.0 / 9.0,
            1.0 / 9.0,
            1.0 / 9.0,
            2.0 / 9.0,
            2.0 / 9.0,
            2.0 / 9.0,
        ])
        .unwrap();
        let report = two_photon_same_port_conditions(&target, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Infeasible);
        // 2·√(1/9) vs √(2/9)
        let worst = &report.product_margins[0];
        assert_abs_diff_eq!(worst.expected, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(worst.actual, (2.0_f64 / 9.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn same_port_accepts_the_balanced_target() {
        let target = ProbabilityDistribution::new(vec![
            1.0 / 15.0,
            1.0 / 15.0,
            1.0 / 15.0,
            4.0 / 15.0,
            4.0 / 15.0,
            4.0 / 15.0,
        ])
        .unwrap();
        let report = two_photon_same_port_conditions(&target, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Feasible);
        let lambda = report.phases.expect("feasible verdicts carry phases");
        // Propagating |200⟩ with the returned phases must hit the target.
        let v = transfer_matrix(&lambda);
        let fv = propagate(&FockState::new(vec![2, 0, 0]).unwrap(), &v).unwrap();
        let achieved = two_photon_target_probabilities(&fv).unwrap();
        for (got, want) in achieved.iter().zip(target.as_slice()) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-9);
        }
        // And the known setting (π/2, −π/6, −π/6) is reproduced.
        let angles = lambda.angles();
        assert_abs_diff_eq!(angles[0], FRAC_PI_2, epsilon = 1e-9);
        assert_abs_diff_eq!(angles[1], -FRAC_PI_6, epsilon = 1e-9);
        assert_abs_diff_eq!(angles[2], -FRAC_PI_6, epsilon = 1e-9);
    }

    #[test]
    fn same_port_accepts_deterministic_exit() {
        let target =
            ProbabilityDistribution::new(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let report = two_photon_same_port_conditions(&target, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Feasible);
        let lambda = report.phases.unwrap();
        for l in lambda.as_slice() {
            assert_abs_diff_eq!(l.re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_port_round_trips_generated_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let input = FockState::new(vec![1, 1, 0]).unwrap();
        for _ in 0..25 {
            let lambda = random_phases(&mut rng, 3);
            let v = transfer_matrix(&lambda);
            let fv = propagate(&input, &v).unwrap();
            let target = ProbabilityDistribution::new(
                two_photon_target_probabilities(&fv).unwrap().to_vec(),
            )
            .unwrap();
            let report = two_photon_two_port_conditions(&target, 1e-9).unwrap();
            assert_eq!(
                report.verdict,
                Verdict::Feasible,
                "generated target must round-trip: {}",
                report.notes
            );
        }
    }

    #[test]
    fn two_port_rejects_the_uniform_pure_target() {
        // Pure patterns uniform at 1/9, mixed at 2/9: the product relations
        // give uniform single-photon magnitudes, but propagation of |110⟩
        // then yields the flat 1/6 distribution, so the round trip fails.
        let target = ProbabilityDistribution::new(vec![
            1.0 / 9.0,
            1.0 / 9.0,
            1.0 / 9.0,
            2.0 / 9.0,
            2.0 / 9.0,
            2.0 / 9.0,
        ])
        .unwrap();
        let report = two_photon_two_port_conditions(&target, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Infeasible);
    }

    #[test]
    fn two_port_flat_distribution_is_feasible() {
        // The flat 1/6 distribution is exactly what uniform single-photon
        // magnitudes produce, so it must come back feasible.
        let target = ProbabilityDistribution::new(vec![1.0 / 6.0; 6]).unwrap();
        let report = two_photon_two_port_conditions(&target, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Feasible, "{}", report.notes);
    }

    #[test]
    fn two_port_rejects_contradictory_zero_pattern() {
        // α_200 > 0 needs c0, c1 nonzero, but α_101 ∝ |c1c2 + c0²| = 0
        // cannot hold alongside α_020 = α_002 = 0 (which force c2 = 0).
        let target =
            ProbabilityDistribution::new(vec![0.5, 0.0, 0.0, 0.5, 0.0, 0.0]).unwrap();
        let report = two_photon_two_port_conditions(&target, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Infeasible);
    }

    #[test]
    fn two_port_single_mode_output() {
        // Only the 101 pattern: both photons leave through port 0, which is
        // what identity phases do to |110⟩ after the double reflection.
        let target =
            ProbabilityDistribution::new(vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        let report = two_photon_two_port_conditions(&target, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Feasible, "{}", report.notes);
    }

    #[test]
    fn records_have_labels() {
        let lambda = PhaseVector::identity(Dimension::new(3).unwrap());
        let v = transfer_matrix(&lambda);
        let fv = propagate(&FockState::new(vec![2, 0, 0]).unwrap(), &v).unwrap();
        let records = fv.records();
        assert_eq!(records[0].occupation, "200");
        assert_abs_diff_eq!(records[0].re, 1.0, epsilon = 1e-12);
    }
}

//! Exact and necessary conditions for producibility of single-photon output
//! states and distributions.
//!
//! A state with amplitudes `c` is producible by some phase setting exactly
//! when all cyclic autocorrelations `r_p = Σ_m c_m·c̄_{m−p}` vanish for
//! `p = 1..d−1`. Plotting the terms `c_m·c̄_{m−p}` in the complex plane,
//! each sum closing means the directed segments form a closed polygon, so no
//! side may exceed the total length of the others — a condition on the
//! magnitudes `|c_m|` alone, hence on the output probability distribution.
//! Those polygon inequalities are necessary for every `d`; they are also
//! sufficient for `d = 3` (see [`crate::synthesis`]) but provably not a
//! complete test in general.
//!
//! The pairwise entanglement of a single-photon state is fully captured by
//! the mode concurrences `C_{m,n} = 2|c_m||c_n|`, so the same inequalities
//! double as bounds on which entanglement patterns the device can prepare.
//! One structural consequence is decided exactly by [`two_mode_only_possible`]:
//! entangling exactly two modes and nothing else requires the mode pair to
//! sit half the ring apart, which is possible only for even `d`.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Error;
use crate::model::{AmplitudeVector, Dimension, PhaseVector, ProbabilityDistribution};
use crate::tolerances;

/// Verdict vocabulary for feasibility checks.
///
/// `NecessaryPassed` means every necessary condition held but existence is
/// not guaranteed (the case for polygon checks at `d > 3`); `Feasible` is
/// reserved for verdicts backed by an exact condition or a synthesis
/// witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Feasible,
    Infeasible,
    NecessaryPassed,
}

/// One polygon inequality `|c_m||c_{m−p}| ≤ Σ_{k≠m}|c_k||c_{k−p}|`,
/// recorded as `margin = RHS − LHS`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolygonMargin {
    pub m: usize,
    pub p: usize,
    pub margin: f64,
}

/// A named equality condition on two-photon amplitudes, recorded as
/// `deviation = actual − expected`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductMargin {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub deviation: f64,
}

/// Outcome of a feasibility check: the verdict plus every residual and
/// margin that went into it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    /// Values of the exact cyclic-autocorrelation sums for `p = 1..d−1`,
    /// when amplitude-level information was available.
    pub exact_residuals: Vec<Complex64>,
    pub polygon_margins: Vec<PolygonMargin>,
    /// Two-photon product-condition deviations, when applicable.
    pub product_margins: Vec<ProductMargin>,
    /// Synthesis witness attached when the verdict is `Feasible` and a
    /// phase setting is known.
    pub phases: Option<PhaseVector>,
    pub notes: String,
}

impl FeasibilityReport {
    pub(crate) fn new(verdict: Verdict, notes: impl Into<String>) -> Self {
        Self {
            verdict,
            exact_residuals: Vec::new(),
            polygon_margins: Vec::new(),
            product_margins: Vec::new(),
            phases: None,
            notes: notes.into(),
        }
    }

    /// Smallest polygon margin, if any were evaluated.
    pub fn min_polygon_margin(&self) -> Option<f64> {
        self.polygon_margins
            .iter()
            .map(|t| t.margin)
            .min_by(|a, b| a.total_cmp(b))
    }

    pub fn is_rejected(&self) -> bool {
        self.verdict == Verdict::Infeasible
    }
}

/// Cyclic autocorrelation residuals `r_p = Σ_m c_m·c̄_{m−p}` for
/// `p = 1..d−1` (indices mod `d`).
///
/// The state is exactly producible iff every `|r_p|` vanishes; see
/// [`exactly_producible`].
pub fn exact_condition_residuals(c: &AmplitudeVector) -> Vec<Complex64> {
    let d = c.dim();
    (1..d)
        .map(|p| {
            (0..d)
                .map(|m| c.as_slice()[m] * c.cyclic(m as i64 - p as i64).conj())
                .sum()
        })
        .collect()
}

/// True when all cyclic autocorrelation residuals are at most `eps` in
/// magnitude.
pub fn exactly_producible(c: &AmplitudeVector, eps: f64) -> bool {
    exact_condition_residuals(c)
        .iter()
        .all(|r| r.norm() <= eps)
}

/// The per-phase-index form of the exact condition:
/// `s_k = Σ_{m≠n} c_m·c̄_n·e^{2πik(n−m)/d}` for `k = 0..d−1`.
///
/// Each `s_k` equals `|λ_k|² − 1` for the recovered phases, so this set of
/// residuals vanishes exactly when the autocorrelation set does. Both forms
/// are kept so the equivalence can be tested rather than assumed.
pub fn phase_modulus_residuals(c: &AmplitudeVector) -> Vec<Complex64> {
    let d = c.dim();
    let tau_over_d = std::f64::consts::TAU / d as f64;
    (0..d)
        .map(|k| {
            let mut sum = Complex64::new(0.0, 0.0);
            for m in 0..d {
                for n in 0..d {
                    if m == n {
                        continue;
                    }
                    let phase = tau_over_d * (k as f64) * (n as f64 - m as f64);
                    sum += c.as_slice()[m]
                        * c.as_slice()[n].conj()
                        * Complex64::from_polar(1.0, phase);
                }
            }
            sum
        })
        .collect()
}

fn polygon_margins_from_magnitudes(mags: &[f64]) -> Vec<PolygonMargin> {
    let d = mags.len();
    let side = |m: usize, p: usize| mags[m] * mags[(m + d - p) % d];
    let mut margins = Vec::with_capacity(d * (d - 1));
    for p in 1..d {
        for m in 0..d {
            let lhs = side(m, p);
            let rhs: f64 = (0..d).filter(|&k| k != m).map(|k| side(k, p)).sum();
            margins.push(PolygonMargin {
                m,
                p,
                margin: rhs - lhs,
            });
        }
    }
    margins
}

/// Necessary polygon conditions on an output probability distribution.
///
/// Every inequality `|c_m||c_{m−p}| ≤ Σ_{k≠m}|c_k||c_{k−p}|` is evaluated
/// for `m = 0..d−1`, `p = 1..d−1` with `|c_m| = √p_m`. Verdict is
/// `NecessaryPassed` when all margins are above `−`[`tolerances::POLYGON_MARGIN`],
/// else `Infeasible`. Passing proves nothing for `d > 3`; failing is a
/// proof of impossibility for any `d`.
pub fn polygon_inequalities(dist: &ProbabilityDistribution) -> FeasibilityReport {
    let margins = polygon_margins_from_magnitudes(&dist.magnitudes());
    let worst = margins
        .iter()
        .copied()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .expect("d >= 2 yields at least one inequality");
    let mut report = if worst.margin >= -tolerances::POLYGON_MARGIN {
        FeasibilityReport::new(
            Verdict::NecessaryPassed,
            "all polygon inequalities hold; existence is not implied for d > 3",
        )
    } else {
        FeasibilityReport::new(
            Verdict::Infeasible,
            format!(
                "polygon inequality violated at (m={}, p={}): side exceeds the sum of the others by {:.6e}",
                worst.m, worst.p, -worst.margin
            ),
        )
    };
    report.polygon_margins = margins;
    report
}

/// Pairwise mode concurrences of a single-photon state: symmetric,
/// zero-diagonal, entries in `[0, 1]`, indices cyclic mod `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceMatrix {
    entries: Array2<f64>,
}

impl ConcurrenceMatrix {
    /// Validates symmetry, zero diagonal, and the `[0, 1]` entry range.
    pub fn new(entries: Array2<f64>) -> Result<Self, Error> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        Dimension::new(rows)?;
        for m in 0..rows {
            if entries[(m, m)] != 0.0 {
                return Err(Error::NumericalInconsistency {
                    context: "concurrence diagonal",
                    deviation: entries[(m, m)],
                });
            }
            for n in 0..rows {
                let value = entries[(m, n)];
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::NumericalInconsistency {
                        context: "concurrence entry range",
                        deviation: value,
                    });
                }
                let sym = (value - entries[(n, m)]).abs();
                if sym > tolerances::CONSTRUCTION {
                    return Err(Error::NumericalInconsistency {
                        context: "concurrence symmetry",
                        deviation: sym,
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.entries[(m, n)]
    }

    /// Entry with both indices reduced mod `d` (`C_{m+d,n+d} = C_{m,n}`).
    pub fn get_cyclic(&self, m: i64, n: i64) -> f64 {
        let d = self.dim() as i64;
        self.entries[(m.rem_euclid(d) as usize, n.rem_euclid(d) as usize)]
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }
}

/// `C_{m,n} = 2|c_m||c_n|` for `m ≠ n`, zero on the diagonal.
pub fn concurrence_matrix(c: &AmplitudeVector) -> ConcurrenceMatrix {
    let mags = c.magnitudes();
    let d = mags.len();
    let entries = Array2::from_shape_fn((d, d), |(m, n)| {
        if m == n {
            0.0
        } else {
            // 2|c_m||c_n| ≤ |c_m|² + |c_n|² ≤ 1, clamp only roundoff.
            (2.0 * mags[m] * mags[n]).min(1.0)
        }
    });
    ConcurrenceMatrix::new(entries).expect("constructed entries satisfy the invariants")
}

/// Necessary conditions `C_{m,m−p} ≤ Σ_{k≠m} C_{k,k−p}` on a concurrence
/// pattern.
///
/// The inequalities are homogeneous in the entries, so the verdict is
/// computed on margins scaled by the largest entry; multiplying the whole
/// matrix by a positive constant cannot flip it. Agrees with
/// [`polygon_inequalities`] on matrices built from an amplitude vector
/// (same inequalities, scaled by 2).
pub fn concurrence_inequalities(cm: &ConcurrenceMatrix) -> FeasibilityReport {
    let d = cm.dim();
    let mut margins = Vec::with_capacity(d * (d - 1));
    for p in 1..d {
        for m in 0..d {
            let lhs = cm.get_cyclic(m as i64, m as i64 - p as i64);
            let rhs: f64 = (0..d)
                .filter(|&k| k != m)
                .map(|k| cm.get_cyclic(k as i64, k as i64 - p as i64))
                .sum();
            margins.push(PolygonMargin {
                m,
                p,
                margin: rhs - lhs,
            });
        }
    }
    let scale = cm.max_entry().max(f64::MIN_POSITIVE);
    let worst = margins
        .iter()
        .copied()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .expect("d >= 2 yields at least one inequality");
    let mut report = if worst.margin / scale >= -tolerances::POLYGON_MARGIN {
        FeasibilityReport::new(
            Verdict::NecessaryPassed,
            "all concurrence bounds hold; existence is not implied for d > 3",
        )
    } else {
        FeasibilityReport::new(
            Verdict::Infeasible,
            format!(
                "concurrence bound violated at (m={}, p={}): C(m, m-p) exceeds the sum of the others by {:.6e}",
                worst.m, worst.p, -worst.margin
            ),
        )
    };
    report.polygon_margins = margins;
    report
}

/// Whether a state entangling exactly the mode pair `(a, b)` — and no other
/// pair — can be produced.
///
/// Requires the pair to sit diametrically on the mode ring: possible iff
/// `d` is even and `b − a = d/2`. For odd `d` no such state exists at all.
pub fn two_mode_only_possible(d: Dimension, a: usize, b: usize) -> Result<bool, Error> {
    let dim = d.get();
    if a >= b || b >= dim {
        return Err(Error::ModePairOutOfRange { a, b, dim });
    }
    Ok(dim.is_multiple_of(2) && b - a == dim / 2)
}

//! The interferometer model: DFT multiports, per-mode phase shifts, and
//! single-photon propagation.
//!
//! A symmetric multiport routes a single photon from any input to every
//! output with probability `1/d`; its action is the unitary discrete Fourier
//! transform `F`. Two multiports with phase shifts `λ_0..λ_{d−1}` between
//! them compose to `U = F·diag(λ)·F`, the d-path generalization of a
//! Mach-Zehnder interferometer. For a photon entering port 0 the output
//! amplitudes are `c = F·λ/√d`, and inverting that relation recovers the
//! phase shifts that would produce a given state — when they exist on the
//! unit circle at all, which is exactly the producibility question the
//! [`crate::feasibility`] module answers.
//!
//! Matrices are dense and row-major; the regime of interest is small
//! (`d ≤ 32`), so no structure beyond plain arrays is worth carrying.

use std::f64::consts::TAU;

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Error;
use crate::tolerances;

/// Number of input/output ports. At least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self, Error> {
        if d < 2 {
            return Err(Error::DimensionTooSmall { d });
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self, Error> {
        Self::new(d)
    }
}

/// The unit-modulus phase shifts `λ_0..λ_{d−1}` applied between the two
/// multiports.
///
/// Constructors reject entries off the unit circle by more than
/// [`tolerances::CONSTRUCTION`] and snap accepted entries to exact unit
/// modulus.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PhaseVector {
    lambda: Vec<Complex64>,
}

impl PhaseVector {
    pub fn new(lambda: Vec<Complex64>) -> Result<Self, Error> {
        Dimension::new(lambda.len())?;
        for (index, l) in lambda.iter().enumerate() {
            let modulus = l.norm();
            if (modulus - 1.0).abs() > tolerances::CONSTRUCTION {
                return Err(Error::NotUnitModulus { index, modulus });
            }
        }
        let lambda = lambda.into_iter().map(|l| l / l.norm()).collect();
        Ok(Self { lambda })
    }

    /// Builds `λ_k = e^{iθ_k}` from phase angles in radians.
    pub fn from_angles(theta: &[f64]) -> Result<Self, Error> {
        Dimension::new(theta.len())?;
        Ok(Self {
            lambda: theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect(),
        })
    }

    /// The identity setting: every phase shift equal to 1.
    pub fn identity(d: Dimension) -> Self {
        Self {
            lambda: vec![Complex64::new(1.0, 0.0); d.get()],
        }
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.lambda
    }

    /// Phase angles in radians, one per entry, each in `(−π, π]`.
    pub fn angles(&self) -> Vec<f64> {
        self.lambda.iter().map(|l| l.arg()).collect()
    }
}

/// Single-photon output amplitudes `c_0..c_{d−1}`.
///
/// Normalized (`Σ|c_m|² = 1`); indexing is cyclic, `c_{x+d} = c_x`, which is
/// the convention every feasibility condition below relies on.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AmplitudeVector {
    c: Vec<Complex64>,
}

impl AmplitudeVector {
    /// Accepts a vector already normalized within
    /// [`tolerances::CONSTRUCTION`] and snaps it to exact unit norm.
    pub fn new(c: Vec<Complex64>) -> Result<Self, Error> {
        Dimension::new(c.len())?;
        let norm_sqr: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > tolerances::CONSTRUCTION {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let norm = norm_sqr.sqrt();
        Ok(Self {
            c: c.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Normalizes an arbitrary nonzero vector. Convenience for callers that
    /// assemble raw coefficient lists.
    pub fn normalized(c: Vec<Complex64>) -> Result<Self, Error> {
        Dimension::new(c.len())?;
        let norm_sqr: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let norm = norm_sqr.sqrt();
        Ok(Self {
            c: c.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.c
    }

    /// Entry at index `i` taken modulo `d`, so negative lags are fine.
    pub fn cyclic(&self, i: i64) -> Complex64 {
        let d = self.c.len() as i64;
        self.c[(i.rem_euclid(d)) as usize]
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.c.iter().map(|z| z.norm()).collect()
    }

    /// The output-port photon probability distribution `P_m = |c_m|²`.
    pub fn probabilities(&self) -> ProbabilityDistribution {
        ProbabilityDistribution::new(self.c.iter().map(|z| z.norm_sqr()).collect())
            .expect("squared magnitudes of a normalized vector form a distribution")
    }
}

/// A distribution over output events: non-negative, sums to 1 within
/// [`tolerances::DISTRIBUTION_SUM`], rescaled to an exact sum on
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityDistribution {
    p: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self, Error> {
        Dimension::new(p.len())?;
        for (index, &value) in p.iter().enumerate() {
            if value < 0.0 {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tolerances::DISTRIBUTION_SUM {
            return Err(Error::DistributionSum { sum });
        }
        Ok(Self {
            p: p.into_iter().map(|v| v / sum).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, i: usize) -> f64 {
        self.p[i]
    }

    /// Square roots of the probabilities: the magnitudes of any amplitude
    /// vector realizing this distribution.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.p.iter().map(|v| v.sqrt()).collect()
    }
}

/// What a [`UnitaryMatrix`] represents in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixRole {
    /// The symmetric-multiport matrix `F`.
    Dft,
    /// `diag(λ)`.
    PhaseDiagonal,
    /// The composed single-photon unitary `U = F·diag(λ)·F`.
    Interferometer,
    /// The mode-operator transfer matrix `V` (see [`crate::fock`]).
    Transfer,
}

/// Dense complex `d×d` unitary. Construction verifies `M·M† = I` within
/// [`tolerances::UNITARITY`] in Frobenius norm.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: Array2<Complex64>,
    role: MatrixRole,
}

impl UnitaryMatrix {
    pub fn new(entries: Array2<Complex64>, role: MatrixRole) -> Result<Self, Error> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        Dimension::new(rows)?;
        let candidate = Self { entries, role };
        let defect = candidate.unitarity_defect();
        if defect > tolerances::UNITARITY {
            return Err(Error::NotUnitary { defect });
        }
        Ok(candidate)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn role(&self) -> MatrixRole {
        self.role
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    /// Column `j` as a normalized amplitude vector.
    pub fn column(&self, j: usize) -> Result<AmplitudeVector, Error> {
        if j >= self.dim() {
            return Err(Error::PortOutOfRange {
                port: j,
                dim: self.dim(),
            });
        }
        AmplitudeVector::new(self.entries.column(j).to_vec())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Array2<Complex64> {
        self.entries.t().mapv(|z| z.conj())
    }

    /// `‖M·M† − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.entries.dot(&self.dagger());
        let d = self.dim();
        let mut sum = 0.0;
        for m in 0..d {
            for n in 0..d {
                let expected = if m == n {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                sum += (product[(m, n)] - expected).norm_sqr();
            }
        }
        sum.sqrt()
    }
}

/// The symmetric-multiport matrix `F` with entries
/// `F_{mn} = exp(2πi·m·n/d)/√d` (forward sign convention `+2πi`; the
/// inverse is the conjugate).
pub fn dft_matrix(d: Dimension) -> UnitaryMatrix {
    let n = d.get();
    let scale = 1.0 / (n as f64).sqrt();
    let entries = Array2::from_shape_fn((n, n), |(row, col)| {
        // Reduce the phase index mod d before multiplying by 2π/d to keep
        // the angle argument small.
        let idx = (row * col) % n;
        Complex64::from_polar(scale, TAU * idx as f64 / n as f64)
    });
    UnitaryMatrix::new(entries, MatrixRole::Dft).expect("DFT matrix is unitary")
}

/// The composed single-photon unitary `U = F·diag(λ)·F`.
pub fn interferometer(lambda: &PhaseVector) -> UnitaryMatrix {
    let d = Dimension::new(lambda.dim()).expect("phase vector dimension is valid");
    let f = dft_matrix(d);
    let n = d.get();
    let phase_diag = Array2::from_shape_fn((n, n), |(row, col)| {
        if row == col {
            lambda.as_slice()[row]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let entries = f.entries().dot(&phase_diag).dot(f.entries());
    UnitaryMatrix::new(entries, MatrixRole::Interferometer)
        .expect("product of unitaries is unitary")
}

/// Output amplitudes for a single photon entering `input_port`.
///
/// For port 0 this is `c = F·λ/√d`, i.e. `c_m = (1/d)·Σ_n λ_n e^{2πimn/d}`;
/// for any other port it is the corresponding column of `U`. (The two
/// constructions are equivalent: entering port `p` with phases `λ` produces
/// the same state as entering port 0 with the phases `λ_n·e^{2πipn/d}`.)
pub fn output_amplitudes(lambda: &PhaseVector, input_port: usize) -> Result<AmplitudeVector, Error> {
    let d = lambda.dim();
    if input_port >= d {
        return Err(Error::PortOutOfRange {
            port: input_port,
            dim: d,
        });
    }
    if input_port == 0 {
        let c: Vec<Complex64> = (0..d)
            .map(|m| {
                let mut sum = Complex64::new(0.0, 0.0);
                for (n, l) in lambda.as_slice().iter().enumerate() {
                    let idx = (m * n) % d;
                    sum += l * Complex64::from_polar(1.0, TAU * idx as f64 / d as f64);
                }
                sum / d as f64
            })
            .collect();
        AmplitudeVector::new(c)
    } else {
        interferometer(lambda).column(input_port)
    }
}

/// Outcome of inverting the output map: either the unique phase shifts that
/// produce the state, or the per-entry deviations `||λ_k| − 1|` that show
/// why none exist.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseRecovery {
    Feasible(PhaseVector),
    Infeasible { deviations: Vec<f64> },
}

impl PhaseRecovery {
    pub fn feasible(&self) -> Option<&PhaseVector> {
        match self {
            PhaseRecovery::Feasible(lambda) => Some(lambda),
            PhaseRecovery::Infeasible { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible().is_some()
    }
}

/// Recovers the phase shifts for a target state via `λ = √d·F†·c`.
///
/// The state is producible if and only if every recovered `λ_k` lies on the
/// unit circle; `eps` bounds the allowed deviation `||λ_k| − 1|` (use
/// [`tolerances::FEASIBILITY`] by default).
pub fn phases_for_state(c: &AmplitudeVector, eps: f64) -> PhaseRecovery {
    let d = c.dim();
    // √d·(F†c)_k = Σ_n c_n·e^{−2πikn/d}: the √d and the 1/√d in F† cancel.
    let lambda: Vec<Complex64> = (0..d)
        .map(|k| {
            let mut sum = Complex64::new(0.0, 0.0);
            for (n, amp) in c.as_slice().iter().enumerate() {
                let idx = (k * n) % d;
                sum += amp * Complex64::from_polar(1.0, -(TAU * idx as f64 / d as f64));
            }
            sum
        })
        .collect();
    let deviations: Vec<f64> = lambda.iter().map(|l| (l.norm() - 1.0).abs()).collect();
    if deviations.iter().all(|&dev| dev <= eps) {
        let angles: Vec<f64> = lambda.iter().map(|l| l.arg()).collect();
        PhaseRecovery::Feasible(
            PhaseVector::from_angles(&angles).expect("dimension already validated"),
        )
    } else {
        PhaseRecovery::Infeasible { deviations }
    }
}

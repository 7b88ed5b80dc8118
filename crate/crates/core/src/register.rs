//! Dense numerics for small multi-qubit registers.
//!
//! Qubit 0 is the most significant bit of every amplitude or matrix index.
//! Two-register states (original followed by clone) are plain concatenations,
//! so qubit `q` of the clone register lives at index `n_original + q`.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Eigenvalues above this count toward a support.
pub const RANK_TOL: f64 = 1e-10;
/// Hermiticity and unit-trace tolerance for validated operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest permitted negative eigenvalue of a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Inputs to [`make_pure`] within this distance of unit norm are renormalized.
pub const NORMALIZE_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
fn bit_of(qubit: usize, n_qubits: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Spreads the low bits of `value` over the positions given in `qubits`
/// (in order, most significant first).
fn deposit(value: usize, qubits: &[usize], n_qubits: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
        if value >> (k - 1 - pos) & 1 == 1 {
            acc | bit_of(q, n_qubits)
        } else {
            acc
        }
    })
}

fn complement(qubits: &[usize], n_qubits: usize) -> Vec<usize> {
    (0..n_qubits).filter(|q| !qubits.contains(q)).collect()
}

/// Normalized pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        if len < 2 {
            return Err(Error::InvalidInput(
                "a state needs at least one qubit".into(),
            ));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        if (norm - 1.0).abs() > NORMALIZE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || index >= 1 << n_qubits {
            return Err(Error::InvalidInput(format!(
                "basis index {index} invalid for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![c(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = c(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        }
    }

    pub fn density(&self) -> DensityMatrix {
        let d = self.dim();
        let entries = DMatrix::from_fn(d, d, |r, col| {
            self.amplitudes[r] * self.amplitudes[col].conj()
        });
        DensityMatrix {
            n_qubits: self.n_qubits,
            entries,
        }
    }

    /// Reduced state on `keep`, computed directly from the amplitudes.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = checked_subset(keep, self.n_qubits, true)?;
        let coeffs = self.split_matrix(&keep);
        let entries = &coeffs * coeffs.adjoint();
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            entries,
        })
    }

    /// Amplitudes as a matrix with rows indexed by `rows` qubits and
    /// columns by the remaining qubits.
    pub(crate) fn split_matrix(&self, rows: &[usize]) -> DMatrix<C64> {
        let cols = complement(rows, self.n_qubits);
        DMatrix::from_fn(1 << rows.len(), 1 << cols.len(), |r, col| {
            let idx = deposit(r, rows, self.n_qubits) | deposit(col, &cols, self.n_qubits);
            self.amplitudes[idx]
        })
    }

    /// Parses a JSON array of `[re, im]` pairs.
    pub fn from_json(text: &str) -> Result<Self> {
        let pairs: Vec<[f64; 2]> =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::new(pairs.into_iter().map(|[re, im]| c(re, im)).collect())
    }

    pub fn to_json(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.amplitudes.iter().map(|a| [a.re, a.im]).collect();
        serde_json::to_string(&pairs).expect("amplitudes serialize")
    }
}

/// Validates a qubit subset, returning it sorted. `proper` forbids the full set.
fn checked_subset(qubits: &[usize], n_qubits: usize, proper: bool) -> Result<Vec<usize>> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != qubits.len() {
        return Err(Error::BadCut(format!("repeated qubit in {qubits:?}")));
    }
    if let Some(&q) = sorted.iter().find(|&&q| q >= n_qubits) {
        return Err(Error::QubitOutOfRange { index: q, n_qubits });
    }
    if sorted.is_empty() || (proper && sorted.len() == n_qubits) {
        return Err(Error::BadCut(format!(
            "{qubits:?} must be a nonempty proper subset of {n_qubits} qubits"
        )));
    }
    Ok(sorted)
}

pub fn make_pure(amplitudes: Vec<C64>) -> Result<StateVector> {
    StateVector::new(amplitudes)
}

pub fn tensor(u: &StateVector, v: &StateVector) -> StateVector {
    u.tensor(v)
}

pub fn density(state: &StateVector) -> DensityMatrix {
    state.density()
}

/// Squared overlap `|⟨u|v⟩|²`.
pub fn fidelity_pure(u: &StateVector, v: &StateVector) -> Result<f64> {
    Ok(u.inner(v)?.norm_sqr().clamp(0.0, 1.0))
}

/// A split of the qubits into side A and side B.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    n_qubits: usize,
    side_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(n_qubits: usize, side_b: &[usize]) -> Result<Self> {
        let side_b = checked_subset(side_b, n_qubits, true)?;
        Ok(Bipartition { n_qubits, side_b })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn side_a(&self) -> Vec<usize> {
        complement(&self.side_b, self.n_qubits)
    }

    fn mask_b(&self) -> usize {
        self.side_b
            .iter()
            .fold(0, |m, &q| m | bit_of(q, self.n_qubits))
    }

    fn check(&self, n_qubits: usize) -> Result<()> {
        if self.n_qubits != n_qubits {
            return Err(Error::BadCut(format!(
                "cut over {} qubits applied to {} qubits",
                self.n_qubits, n_qubits
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Bipartition {
    /// One-based qubit labels, e.g. `12|3`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = |qs: &[usize]| -> String {
            let sep = if self.n_qubits > 9 { "," } else { "" };
            qs.iter()
                .map(|q| (q + 1).to_string())
                .collect::<Vec<_>>()
                .join(sep)
        };
        write!(f, "{}|{}", label(&self.side_a()), label(&self.side_b))
    }
}

/// Positive semidefinite, unit-trace, Hermitian operator on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: entries.ncols(),
            });
        }
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let dev = hermitian_deviation(&entries);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > HERMITIAN_TOL || trace.im.abs() > HERMITIAN_TOL {
            return Err(Error::InvalidInput(format!("trace {trace} is not 1")));
        }
        let smallest = eigen_descending(&entries).0.last().copied().unwrap_or(0.0);
        if smallest < -PSD_TOL {
            return Err(Error::InvalidInput(format!(
                "negative eigenvalue {smallest:e}"
            )));
        }
        Ok(DensityMatrix {
            n_qubits: dim.trailing_zeros() as usize,
            entries,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn as_operator(&self) -> HermitianOperator {
        HermitianOperator {
            entries: self.entries.clone(),
        }
    }

    pub fn rank(&self, tol: f64) -> usize {
        eigen_descending(&self.entries)
            .0
            .iter()
            .filter(|&&l| l > tol)
            .count()
    }

    /// `U ρ U†` for a unitary `U` of matching dimension.
    pub fn conjugate_by(&self, unitary: &DMatrix<C64>) -> Result<DensityMatrix> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: unitary.nrows(),
            });
        }
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            entries: unitary * &self.entries * unitary.adjoint(),
        })
    }
}

/// Hermitian operator with no trace or positivity requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                left: entries.nrows(),
                right: entries.ncols(),
            });
        }
        let dev = hermitian_deviation(&entries);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(HermitianOperator { entries })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        HermitianOperator {
            entries: DMatrix::from_fn(n, n, |r, col| {
                if r == col {
                    c(diag[r], 0.0)
                } else {
                    c(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for r in 0..n {
        for col in r..n {
            dev = dev.max((m[(r, col)] - m[(col, r)].conj()).norm());
        }
    }
    dev
}

/// Eigenvalues (descending) and matching eigenvector columns of a
/// Hermitian matrix.
pub(crate) fn eigen_descending(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    // Symmetrize so rounding noise in the lower triangle is irrelevant.
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.nrows();
    let vectors = DMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Full real spectrum, descending.
pub fn hermitian_spectrum(op: &HermitianOperator) -> Vec<f64> {
    eigen_descending(&op.entries).0
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(op: &HermitianOperator) -> f64 {
    hermitian_spectrum(op).iter().map(|l| l.abs()).sum()
}

/// Convex combination of density matrices.
pub fn mix(weights: &[f64], dms: &[DensityMatrix]) -> Result<DensityMatrix> {
    if weights.len() != dms.len() || dms.is_empty() {
        return Err(Error::BadWeights(format!(
            "{} weights for {} matrices",
            weights.len(),
            dms.len()
        )));
    }
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::BadWeights("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > HERMITIAN_TOL {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    let dim = dms[0].dim();
    if let Some(bad) = dms.iter().find(|d| d.dim() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: bad.dim(),
        });
    }
    let mut entries = DMatrix::zeros(dim, dim);
    for (w, dm) in weights.iter().zip(dms) {
        entries += dm.entries.scale(*w);
    }
    Ok(DensityMatrix {
        n_qubits: dms[0].n_qubits,
        entries,
    })
}

/// Traces out the qubits in `discard`.
pub fn partial_trace(dm: &DensityMatrix, discard: &[usize]) -> Result<DensityMatrix> {
    let n = dm.n_qubits;
    let discard = checked_subset(discard, n, true)?;
    let keep = complement(&discard, n);
    let kept_dim = 1 << keep.len();
    let mut entries = DMatrix::zeros(kept_dim, kept_dim);
    for t in 0..1usize << discard.len() {
        let offset = deposit(t, &discard, n);
        for r in 0..kept_dim {
            let row = deposit(r, &keep, n) | offset;
            for col in 0..kept_dim {
                let column = deposit(col, &keep, n) | offset;
                entries[(r, col)] += dm.entries[(row, column)];
            }
        }
    }
    Ok(DensityMatrix {
        n_qubits: keep.len(),
        entries,
    })
}

/// Transposes the side-B indices of `dm`.
pub fn partial_transpose(dm: &DensityMatrix, cut: &Bipartition) -> Result<HermitianOperator> {
    cut.check(dm.n_qubits)?;
    Ok(HermitianOperator {
        entries: transpose_side(&dm.entries, cut.mask_b()),
    })
}

pub(crate) fn transpose_side(m: &DMatrix<C64>, mask_b: usize) -> DMatrix<C64> {
    let dim = m.nrows();
    let mut out = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        for col in 0..dim {
            let r2 = (r & !mask_b) | (col & mask_b);
            let c2 = (col & !mask_b) | (r & mask_b);
            out[(r2, c2)] = m[(r, col)];
        }
    }
    out
}

/// Squared Schmidt coefficients across `cut`, descending, with values at or
/// below [`RANK_TOL`] dropped.
pub fn schmidt_coefficients(state: &StateVector, cut: &Bipartition) -> Result<Vec<f64>> {
    Ok(schmidt_spectrum(state, cut)?
        .into_iter()
        .filter(|&l| l > RANK_TOL)
        .collect())
}

/// Full marginal spectrum across `cut` on the smaller side, clipped at zero.
pub(crate) fn schmidt_spectrum(state: &StateVector, cut: &Bipartition) -> Result<Vec<f64>> {
    cut.check(state.n_qubits)?;
    let side_b = cut.side_b();
    let side_a = cut.side_a();
    let smaller = if side_b.len() <= side_a.len() {
        side_b.to_vec()
    } else {
        side_a
    };
    let coeffs = state.split_matrix(&smaller);
    let marginal = &coeffs * coeffs.adjoint();
    Ok(eigen_descending(&marginal)
        .0
        .into_iter()
        .map(|l| l.max(0.0))
        .collect())
}

/// Dimension of the span of the supports of `a` and `b`.
pub fn support_span_dim(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> Result<usize> {
    joint_support_dim(&[a, b], tol)
}

/// Dimension of the span of the supports of all `dms`.
pub fn joint_support_dim(dms: &[&DensityMatrix], tol: f64) -> Result<usize> {
    let first = dms
        .first()
        .ok_or_else(|| Error::InvalidInput("no matrices".into()))?;
    let dim = first.dim();
    let mut sum = DMatrix::zeros(dim, dim);
    for dm in dms {
        if dm.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: dm.dim(),
            });
        }
        sum += &dm.entries;
    }
    Ok(eigen_descending(&sum)
        .0
        .iter()
        .filter(|&&l| l > tol)
        .count())
}

/// Largest entry magnitude of `ab − ba`.
pub fn commutator_norm(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let comm = &a.entries * &b.entries - &b.entries * &a.entries;
    Ok(comm.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Which register controls a transversal CNOT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CnotDirection {
    OriginalToClone,
    CloneToOriginal,
}

/// Fixed single-qubit gates plus an arbitrary 2×2 unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitGate {
    X,
    Z,
    S,
    Sdg,
    /// `diag(1, e^{iθ})`
    Phase(f64),
    Unitary([[C64; 2]; 2]),
}

impl QubitGate {
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        match *self {
            QubitGate::X => [[zero, one], [one, zero]],
            QubitGate::Z => [[one, zero], [zero, -one]],
            QubitGate::S => [[one, zero], [zero, c(0.0, 1.0)]],
            QubitGate::Sdg => [[one, zero], [zero, c(0.0, -1.0)]],
            QubitGate::Phase(theta) => [[one, zero], [zero, C64::from_polar(1.0, theta)]],
            QubitGate::Unitary(m) => m,
        }
    }

    pub fn name(&self) -> String {
        match self {
            QubitGate::X => "X".into(),
            QubitGate::Z => "Z".into(),
            QubitGate::S => "S".into(),
            QubitGate::Sdg => "Sdg".into(),
            QubitGate::Phase(theta) => format!("P({theta:.12})"),
            QubitGate::Unitary(_) => "U".into(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        let m = self.matrix();
        m[0][1].norm() == 0.0 && m[1][0].norm() == 0.0
    }

    fn unitarity_deviation(&self) -> f64 {
        let m = self.matrix();
        let mut dev: f64 = 0.0;
        for r in 0..2 {
            for col in 0..2 {
                let dot: C64 = (0..2).map(|k| m[k][r].conj() * m[k][col]).sum();
                let target = if r == col { 1.0 } else { 0.0 };
                dev = dev.max((dot - c(target, 0.0)).norm());
            }
        }
        dev
    }
}

/// A gate that acts within a single party's qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalGate {
    Single {
        target: usize,
        gate: QubitGate,
    },
    /// CNOT between qubit `q` of the original and qubit `q` of the clone,
    /// for every `q`.
    TransversalCnot(CnotDirection),
}

impl LocalGate {
    pub fn single(target: usize, gate: QubitGate) -> Result<Self> {
        let dev = gate.unitarity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(LocalGate::Single { target, gate })
    }

    /// Groups of qubits acted on jointly by this gate, for a register of
    /// `n_qubits` split evenly into original and clone.
    pub fn interaction_groups(&self, n_qubits: usize) -> Vec<Vec<usize>> {
        match *self {
            LocalGate::Single { target, .. } => vec![vec![target]],
            LocalGate::TransversalCnot(_) => {
                let half = n_qubits / 2;
                (0..half).map(|q| vec![q, half + q]).collect()
            }
        }
    }
}

/// Runs `circuit` on `state`.
pub fn apply_circuit(state: &StateVector, circuit: &[LocalGate]) -> Result<StateVector> {
    let n = state.n_qubits;
    let mut amps = state.amplitudes.clone();
    for gate in circuit {
        match *gate {
            LocalGate::Single { target, gate } => {
                if target >= n {
                    return Err(Error::QubitOutOfRange {
                        index: target,
                        n_qubits: n,
                    });
                }
                let dev = gate.unitarity_deviation();
                if dev > HERMITIAN_TOL {
                    return Err(Error::NotUnitary(dev));
                }
                let m = gate.matrix();
                let mask = bit_of(target, n);
                for idx in 0..amps.len() {
                    if idx & mask == 0 {
                        let (a0, a1) = (amps[idx], amps[idx | mask]);
                        amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                        amps[idx | mask] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
            LocalGate::TransversalCnot(direction) => {
                if !n.is_multiple_of(2) {
                    return Err(Error::InvalidInput(format!(
                        "transversal CNOT needs two equal registers, got {n} qubits"
                    )));
                }
                let half = n / 2;
                for q in 0..half {
                    let (control, target) = match direction {
                        CnotDirection::OriginalToClone => (q, half + q),
                        CnotDirection::CloneToOriginal => (half + q, q),
                    };
                    let (cm, tm) = (bit_of(control, n), bit_of(target, n));
                    for idx in 0..amps.len() {
                        if idx & cm != 0 && idx & tm == 0 {
                            amps.swap(idx, idx | tm);
                        }
                    }
                }
            }
        }
    }
    Ok(StateVector {
        n_qubits: n,
        amplitudes: amps,
    })
}

/// Lifts `op` acting on `targets` (in order) to the full `n_qubits` space.
pub fn embed_operator(
    op: &DMatrix<C64>,
    targets: &[usize],
    n_qubits: usize,
) -> Result<DMatrix<C64>> {
    checked_subset(targets, n_qubits, false)?;
    if op.nrows() != 1 << targets.len() || op.ncols() != op.nrows() {
        return Err(Error::DimensionMismatch {
            left: op.nrows(),
            right: 1 << targets.len(),
        });
    }
    let rest = complement(targets, n_qubits);
    let dim = 1 << n_qubits;
    let local = 1 << targets.len();
    let mut out = DMatrix::zeros(dim, dim);
    for t in 0..1usize << rest.len() {
        let offset = deposit(t, &rest, n_qubits);
        for r in 0..local {
            let row = deposit(r, targets, n_qubits) | offset;
            for col in 0..local {
                let column = deposit(col, targets, n_qubits) | offset;
                out[(row, column)] = op[(r, col)];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bell() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap()
    }

    #[test]
    fn make_pure_basis_and_errors() {
        let s = make_pure(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.n_qubits(), 1);
        assert_eq!(bell().n_qubits(), 2);
        assert_eq!(
            make_pure(vec![c(0.0, 0.0); 4]).unwrap_err(),
            Error::ZeroVector
        );
        assert_eq!(
            make_pure(vec![c(1.0, 0.0); 3]).unwrap_err(),
            Error::NotPowerOfTwo(3)
        );
        assert!(matches!(
            StateVector::from_real(&[2.0, 0.0]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn make_pure_renormalizes_decimal_literals() {
        let s = StateVector::from_real(&[0.7071067811865, 0.0, 0.0, 0.7071067811865]).unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        let t = zero.tensor(&one);
        assert_eq!(t, StateVector::basis(2, 1).unwrap());
        assert_abs_diff_eq!(bell().tensor(&zero).norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn density_of_bell_state() {
        let rho = bell().density();
        let e = rho.entries();
        for (r, col) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_abs_diff_eq!(e[(r, col)].re, 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-15);
        let zero = StateVector::basis(1, 0).unwrap().density();
        assert_eq!(zero.entries()[(0, 0)], c(1.0, 0.0));
        assert_eq!(zero.entries()[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn mix_cases() {
        let p0 = StateVector::basis(1, 0).unwrap().density();
        let p1 = StateVector::basis(1, 1).unwrap().density();
        let m = mix(&[0.5, 0.5], &[p0.clone(), p1.clone()]).unwrap();
        assert_abs_diff_eq!(m.entries()[(0, 0)].re, 0.5);
        assert_abs_diff_eq!(m.entries()[(1, 1)].re, 0.5);
        assert_eq!(mix(&[1.0, 0.0], &[p0.clone(), p1.clone()]).unwrap(), p0);
        assert!(matches!(
            mix(&[0.6, 0.6], &[p0.clone(), p1.clone()]),
            Err(Error::BadWeights(_))
        ));
        assert!(matches!(
            mix(&[0.5, 0.5], &[p0, bell().density()]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let r = partial_trace(&bell().density(), &[1]).unwrap();
        assert_abs_diff_eq!(r.entries()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.entries()[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.entries()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        assert!(matches!(
            partial_trace(&bell().density(), &[0, 1]),
            Err(Error::BadCut(_))
        ));
        assert!(matches!(
            partial_trace(&bell().density(), &[]),
            Err(Error::BadCut(_))
        ));
    }

    #[test]
    fn partial_trace_of_product_keeps_factor() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real(&[h, h]).unwrap();
        let prod = plus.tensor(&bell());
        let kept = partial_trace(&prod.density(), &[1, 2]).unwrap();
        assert!((kept.entries() - plus.density().entries()).norm() < 1e-14);
        assert_eq!(prod.reduced(&[0]).unwrap().entries().nrows(), 2);
    }

    #[test]
    fn partial_transpose_of_bell() {
        let cut = Bipartition::new(2, &[1]).unwrap();
        let pt = partial_transpose(&bell().density(), &cut).unwrap();
        let spec = hermitian_spectrum(&pt);
        for (got, want) in spec.iter().zip([0.5, 0.5, 0.5, -0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(trace_norm(&pt), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn spectrum_and_trace_norm_basics() {
        let id = HermitianOperator::from_real_diagonal(&[1.0; 4]);
        assert_eq!(hermitian_spectrum(&id), vec![1.0; 4]);
        let d = HermitianOperator::from_real_diagonal(&[1.0, -2.0, 3.0]);
        let s = hermitian_spectrum(&d);
        assert_abs_diff_eq!(s[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[2], -2.0, epsilon = 1e-14);
        let flip = HermitianOperator::from_real_diagonal(&[1.0, -1.0]);
        assert_abs_diff_eq!(trace_norm(&flip), 2.0);
        assert_abs_diff_eq!(
            trace_norm(&bell().density().as_operator()),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn schmidt_coefficient_cases() {
        let prod = StateVector::basis(3, 5).unwrap();
        let cut = Bipartition::new(3, &[2]).unwrap();
        assert_eq!(schmidt_coefficients(&prod, &cut).unwrap().len(), 1);
        let s = schmidt_coefficients(&bell(), &Bipartition::new(2, &[0]).unwrap()).unwrap();
        assert_abs_diff_eq!(s[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn support_and_commutator() {
        let p0 = StateVector::basis(1, 0).unwrap().density();
        let p1 = StateVector::basis(1, 1).unwrap().density();
        assert_eq!(support_span_dim(&p0, &p0, RANK_TOL).unwrap(), 1);
        assert_eq!(support_span_dim(&p0, &p1, RANK_TOL).unwrap(), 2);
        assert_eq!(commutator_norm(&p0, &p1).unwrap(), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real(&[h, h]).unwrap().density();
        assert!(commutator_norm(&p0, &plus).unwrap() > 0.1);
        assert!(matches!(
            commutator_norm(&p0, &bell().density()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_cases() {
        let a = StateVector::basis(2, 0).unwrap();
        let b = StateVector::basis(2, 3).unwrap();
        assert_eq!(fidelity_pure(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity_pure(&a, &b).unwrap(), 0.0);
        assert!(fidelity_pure(&a, &StateVector::basis(1, 0).unwrap()).is_err());
    }

    #[test]
    fn circuit_basics_and_errors() {
        let zero6 = StateVector::basis(6, 0).unwrap();
        let out = apply_circuit(
            &zero6,
            &[LocalGate::TransversalCnot(CnotDirection::OriginalToClone)],
        )
        .unwrap();
        assert_eq!(out, zero6);
        // |100⟩|000⟩ → |100⟩|100⟩
        let s = StateVector::basis(6, 0b100_000).unwrap();
        let out = apply_circuit(
            &s,
            &[LocalGate::TransversalCnot(CnotDirection::OriginalToClone)],
        )
        .unwrap();
        assert_eq!(out, StateVector::basis(6, 0b100_100).unwrap());
        let err = apply_circuit(
            &s,
            &[LocalGate::Single {
                target: 6,
                gate: QubitGate::X,
            }],
        );
        assert!(matches!(err, Err(Error::QubitOutOfRange { .. })));
        let bad = QubitGate::Unitary([[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(
            LocalGate::single(0, bad),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = bell();
        let back = StateVector::from_json(&s.to_json()).unwrap();
        assert!((fidelity_pure(&s, &back).unwrap() - 1.0).abs() < 1e-15);
        assert!(StateVector::from_json("[[1,0],[0,0],[0,0]]").is_err());
    }

    #[test]
    fn bipartition_validation_and_display() {
        assert!(Bipartition::new(3, &[]).is_err());
        assert!(Bipartition::new(3, &[0, 1, 2]).is_err());
        assert!(Bipartition::new(3, &[3]).is_err());
        let cut = Bipartition::new(3, &[2]).unwrap();
        assert_eq!(cut.to_string(), "12|3");
        assert_eq!(cut.side_a(), vec![0, 1]);
    }

    #[test]
    fn embed_matches_kron_on_leading_qubit() {
        let x =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let full = embed_operator(&x, &[0], 2).unwrap();
        let kron = x.kronecker(&DMatrix::<C64>::identity(2, 2));
        assert_eq!(full, kron);
    }
}

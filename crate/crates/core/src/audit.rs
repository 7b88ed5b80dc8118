//! No-go machinery for W-basis cloning: pair taxonomy, effective-form
//! checks, cloner input/output mixtures and their negativities, blank
//! insufficiency certificates, and the W-class entropy scan.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{w_basis, w_class, WBasisIndex, WClassParams};
use crate::error::{Error, Result};
use crate::measures::{
    negativity, single_qubit_cut, w_threshold_bits, wclass_cut_entropies, wclass_cut_spectrum,
    wclass_min_cut_entropy,
};
use crate::random;
use crate::register::{
    commutator_norm, eigen_descending, mix, schmidt_spectrum, support_span_dim, Bipartition,
    DensityMatrix, StateVector, C64, RANK_TOL,
};

/// Tolerance for the structural identities of the effective two-lab forms.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Lemma scan treats entropies within this of the threshold as violations.
pub const SCAN_TOL: f64 = 1e-12;
/// Witness cuts are searched in this order; the `12|3` cut comes first.
const WITNESS_ORDER: [u8; 3] = [3, 2, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Category {
    A,
    B,
    C,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Form {
    I,
    II,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairClassification {
    pub m: WBasisIndex,
    pub n: WBasisIndex,
    pub category: Category,
    /// One-based qubit placed alone in lab B.
    pub witness_k: u8,
    /// Support span dimension at the witness.
    pub span_dim: usize,
    /// Support span dimension for k = 1, 2, 3.
    pub span_dims: [usize; 3],
    /// Whether the two reductions fail to commute, for k = 1, 2, 3.
    pub noncommuting: [bool; 3],
}

fn kept_qubits(k: u8) -> Result<Vec<usize>> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..=3")));
    }
    Ok((0..3).filter(|&q| q != (k - 1) as usize).collect())
}

/// Reductions of `W_m` and `W_n` with qubit `k` traced out.
pub fn pair_reductions(
    m: WBasisIndex,
    n: WBasisIndex,
    k: u8,
) -> Result<(DensityMatrix, DensityMatrix)> {
    let keep = kept_qubits(k)?;
    Ok((w_basis(m).reduced(&keep)?, w_basis(n).reduced(&keep)?))
}

fn check_pair(m: WBasisIndex, n: WBasisIndex) -> Result<()> {
    if m == n {
        return Err(Error::InvalidInput(format!(
            "pair ({m}, {n}) repeats a state"
        )));
    }
    Ok(())
}

pub fn classify_pair(m: WBasisIndex, n: WBasisIndex) -> Result<PairClassification> {
    classify_pair_with_tol(m, n, RANK_TOL)
}

/// Classification with an explicit rank and commutator threshold.
pub fn classify_pair_with_tol(
    m: WBasisIndex,
    n: WBasisIndex,
    tol: f64,
) -> Result<PairClassification> {
    check_pair(m, n)?;
    let mut span_dims = [0usize; 3];
    let mut noncommuting = [false; 3];
    for k in 1..=3u8 {
        let (a, b) = pair_reductions(m, n, k)?;
        span_dims[(k - 1) as usize] = support_span_dim(&a, &b, tol)?;
        noncommuting[(k - 1) as usize] = commutator_norm(&a, &b)? > tol;
    }
    let first =
        |pred: &dyn Fn(usize) -> bool| WITNESS_ORDER.into_iter().find(|&k| pred((k - 1) as usize));
    let (category, witness_k) = if let Some(k) = first(&|x| span_dims[x] == 2) {
        (Category::A, k)
    } else if let Some(k) = first(&|x| span_dims[x] == 3) {
        (Category::B, k)
    } else if let Some(k) = first(&|x| span_dims[x] == 4 && noncommuting[x]) {
        (Category::C, k)
    } else {
        return Err(Error::StructureMismatch(format!(
            "pair ({m}, {n}) fits no category: spans {span_dims:?}"
        )));
    };
    Ok(PairClassification {
        m,
        n,
        category,
        witness_k,
        span_dim: span_dims[(witness_k - 1) as usize],
        span_dims,
        noncommuting,
    })
}

pub fn classify_all(tol: f64) -> Result<Vec<PairClassification>> {
    WBasisIndex::pairs()
        .into_par_iter()
        .map(|(m, n)| classify_pair_with_tol(m, n, tol))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BTypeForm {
    pub form: Form,
    pub shared_direction_weight: f64,
}

fn support_projector(dm: &DensityMatrix) -> DMatrix<C64> {
    let (values, vectors) = eigen_descending(dm.entries());
    let dim = dm.dim();
    let mut p = DMatrix::zeros(dim, dim);
    for (x, &l) in values.iter().enumerate() {
        if l > RANK_TOL {
            let v = vectors.column(x);
            p += v * v.adjoint();
        }
    }
    p
}

fn expectation(dm: &DensityMatrix, v: &DVector<C64>) -> f64 {
    (v.adjoint() * dm.entries() * v)[(0, 0)].re
}

/// Decides form I or II from the marginal weight that both states give to
/// the single direction their lab-A supports share.
pub fn btype_form(m: WBasisIndex, n: WBasisIndex, k: u8) -> Result<BTypeForm> {
    kept_qubits(k)?;
    let class = classify_pair(m, n)?;
    if class.category != Category::B || class.span_dims[(k - 1) as usize] != 3 {
        return Err(Error::StructureMismatch(format!(
            "({m}, {n}) with k = {k} is not a span-3 B-type arrangement"
        )));
    }
    let (rm, rn) = pair_reductions(m, n, k)?;
    let sum = support_projector(&rm) + support_projector(&rn);
    let (values, vectors) = eigen_descending(&sum);
    let shared: Vec<usize> = (0..values.len())
        .filter(|&x| (values[x] - 2.0).abs() < 1e-8)
        .collect();
    if shared.len() != 1 {
        return Err(Error::StructureMismatch(format!(
            "supports of ({m}, {n}) share {} directions",
            shared.len()
        )));
    }
    let v: DVector<C64> = vectors.column(shared[0]).into_owned();
    let (wm, wn) = (expectation(&rm, &v), expectation(&rn, &v));
    let near = |x: f64, y: f64| (x - y).abs() < 1e-8;
    let form = if near(wm, 2.0 / 3.0) && near(wn, 2.0 / 3.0) {
        Form::I
    } else if near(wm, 1.0 / 3.0) && near(wn, 1.0 / 3.0) {
        Form::II
    } else {
        return Err(Error::StructureMismatch(format!(
            "shared direction weights {wm} and {wn} fit neither form"
        )));
    };
    Ok(BTypeForm {
        form,
        shared_direction_weight: wm,
    })
}

/// Both states written against one lab-B basis: the eigenbasis of `W_m`'s
/// qubit-k marginal, smaller weight first. Each entry of `a_m`/`a_n` is the
/// normalized lab-A vector conditioned on that basis element.
struct SharedBasisForm {
    weights_m: [f64; 2],
    weights_n: [f64; 2],
    a_m: [DVector<C64>; 2],
    a_n: [DVector<C64>; 2],
    /// Off-diagonal magnitude of `W_n`'s qubit-k marginal in that basis.
    offdiag_n: f64,
}

fn conditional_vectors(
    state: &StateVector,
    k: u8,
    basis: &DMatrix<C64>,
) -> Result<([f64; 2], [DVector<C64>; 2])> {
    let keep = kept_qubits(k)?;
    let coeffs = state.split_matrix(&keep);
    let mut weights = [0.0; 2];
    let mut vecs: [DVector<C64>; 2] = [DVector::zeros(4), DVector::zeros(4)];
    for x in 0..2 {
        let beta_conj: DVector<C64> = basis.column(x).map(|z| z.conj());
        let a = &coeffs * beta_conj;
        let norm = a.norm();
        weights[x] = norm * norm;
        vecs[x] = if norm > 0.0 {
            a / C64::new(norm, 0.0)
        } else {
            a
        };
    }
    Ok((weights, vecs))
}

fn shared_basis_form(m: WBasisIndex, n: WBasisIndex, k: u8) -> Result<SharedBasisForm> {
    let (wm, wn) = (w_basis(m), w_basis(n));
    let lone = [(k - 1) as usize];
    let (_, vectors) = eigen_descending(wm.reduced(&lone)?.entries());
    // descending order puts the larger weight first; swap to smaller first
    let basis = DMatrix::from_fn(2, 2, |r, col| vectors[(r, 1 - col)]);
    let (weights_m, a_m) = conditional_vectors(&wm, k, &basis)?;
    let (weights_n, a_n) = conditional_vectors(&wn, k, &basis)?;
    let marginal_n = wn.reduced(&lone)?;
    let offdiag_n =
        (basis.column(0).adjoint() * marginal_n.entries() * basis.column(1))[(0, 0)].norm();
    Ok(SharedBasisForm {
        weights_m,
        weights_n,
        a_m,
        a_n,
        offdiag_n,
    })
}

fn overlap(u: &DVector<C64>, v: &DVector<C64>) -> C64 {
    u.dotc(v)
}

fn check_weights(form: &SharedBasisForm, m: WBasisIndex, n: WBasisIndex) -> Result<()> {
    let third = 1.0 / 3.0;
    let ok = (form.weights_m[0] - third).abs() < STRUCTURE_TOL
        && (form.weights_m[1] - 2.0 * third).abs() < STRUCTURE_TOL
        && (form.weights_n[0] - 2.0 * third).abs() < STRUCTURE_TOL
        && (form.weights_n[1] - third).abs() < STRUCTURE_TOL
        && form.offdiag_n < STRUCTURE_TOL;
    if ok {
        Ok(())
    } else {
        Err(Error::StructureMismatch(format!(
            "({m}, {n}) weights {:?} / {:?} are not swapped {{1/3, 2/3}} in a common lab-B basis",
            form.weights_m, form.weights_n
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ATypeReport {
    pub m: WBasisIndex,
    pub n: WBasisIndex,
    pub k: u8,
    pub schmidt_m: [f64; 2],
    pub schmidt_n: [f64; 2],
    /// `|⟨a_m(β₀)|a_n(β₁)⟩|` and `|⟨a_m(β₁)|a_n(β₀)⟩|`; both 1 when the lab-A
    /// directions coincide with opposite lab-B partners.
    pub cross_overlaps: [f64; 2],
}

/// Confirms that both states carry Schmidt weights `{1/3, 2/3}` across
/// `{i,j}|{k}` with the same lab-A directions paired to opposite lab-B
/// vectors.
pub fn atype_structure(m: WBasisIndex, n: WBasisIndex, k: u8) -> Result<ATypeReport> {
    kept_qubits(k)?;
    let class = classify_pair(m, n)?;
    if class.category != Category::A || class.span_dims[(k - 1) as usize] != 2 {
        return Err(Error::StructureMismatch(format!(
            "({m}, {n}) with k = {k} is not A-type"
        )));
    }
    let form = shared_basis_form(m, n, k)?;
    check_weights(&form, m, n)?;
    let cross = [
        overlap(&form.a_m[0], &form.a_n[1]).norm(),
        overlap(&form.a_m[1], &form.a_n[0]).norm(),
    ];
    if cross.iter().any(|x| (x - 1.0).abs() > STRUCTURE_TOL) {
        return Err(Error::StructureMismatch(format!(
            "({m}, {n}) lab-A directions differ: overlaps {cross:?}"
        )));
    }
    let cut = single_qubit_cut(k)?;
    let sm = schmidt_spectrum(&w_basis(m), &cut)?;
    let sn = schmidt_spectrum(&w_basis(n), &cut)?;
    Ok(ATypeReport {
        m,
        n,
        k,
        schmidt_m: [sm[1], sm[0]],
        schmidt_n: [sn[1], sn[0]],
        cross_overlaps: cross,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CTypeReport {
    pub m: WBasisIndex,
    pub n: WBasisIndex,
    pub k: u8,
    /// `|⟨0|0′⟩|`, expected `1/√2`.
    pub overlap_magnitude: f64,
    /// `|⟨0|0′⟩ + ⟨1|1′⟩|`, expected 0.
    pub sign_residual: f64,
    /// Largest of `|⟨0|1⟩|, |⟨0′|1′⟩|, |⟨0|1′⟩|, |⟨0′|1⟩|`.
    pub orthogonality_residual: f64,
}

/// Confirms the effective form `W_m = √(1/3)|0⟩|0⟩ + √(2/3)|1⟩|1⟩`,
/// `W_n = √(2/3)|0′⟩|0⟩ + √(1/3)|1′⟩|1⟩` across the noncommuting witness cut.
pub fn ctype_structure(m: WBasisIndex, n: WBasisIndex) -> Result<CTypeReport> {
    let class = classify_pair(m, n)?;
    if class.category != Category::C {
        return Err(Error::StructureMismatch(format!(
            "({m}, {n}) is not C-type"
        )));
    }
    let k = class.witness_k;
    let form = shared_basis_form(m, n, k)?;
    check_weights(&form, m, n)?;
    let (zero, one) = (&form.a_m[0], &form.a_m[1]);
    let (zero_p, one_p) = (&form.a_n[0], &form.a_n[1]);
    let o00 = overlap(zero, zero_p);
    let o11 = overlap(one, one_p);
    let orthogonality_residual = [
        overlap(zero, one).norm(),
        overlap(zero_p, one_p).norm(),
        overlap(zero, one_p).norm(),
        overlap(zero_p, one).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let report = CTypeReport {
        m,
        n,
        k,
        overlap_magnitude: o00.norm(),
        sign_residual: (o00 + o11).norm(),
        orthogonality_residual,
    };
    if (report.overlap_magnitude - std::f64::consts::FRAC_1_SQRT_2).abs() > STRUCTURE_TOL
        || report.sign_residual > STRUCTURE_TOL
        || report.orthogonality_residual > STRUCTURE_TOL
    {
        return Err(Error::StructureMismatch(format!("({m}, {n}): {report:?}")));
    }
    Ok(report)
}

/// Cut of the six-qubit original ⊗ blank register that puts qubit `k` of
/// both registers in lab B.
pub fn lab_cut(k: u8) -> Result<Bipartition> {
    kept_qubits(k)?;
    let q = (k - 1) as usize;
    Bipartition::new(6, &[q, 3 + q])
}

/// `ρ_in = ½P[W_m⊗W_blank] + ½P[W_n⊗W_blank]` and
/// `ρ_out = ½P[W_m⊗W_m] + ½P[W_n⊗W_n]`, with the lab cut for `k`.
pub fn cloner_io(
    m: WBasisIndex,
    n: WBasisIndex,
    k: u8,
    blank: WBasisIndex,
) -> Result<(DensityMatrix, DensityMatrix, Bipartition)> {
    check_pair(m, n)?;
    let cut = lab_cut(k)?;
    let (wm, wn, wb) = (w_basis(m), w_basis(n), w_basis(blank));
    let rho_in = mix(
        &[0.5, 0.5],
        &[wm.tensor(&wb).density(), wn.tensor(&wb).density()],
    )?;
    let rho_out = mix(
        &[0.5, 0.5],
        &[wm.tensor(&wm).density(), wn.tensor(&wn).density()],
    )?;
    Ok((rho_in, rho_out, cut))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRecord {
    pub m: WBasisIndex,
    pub n: WBasisIndex,
    pub category: Category,
    pub witness_k: u8,
    pub form: Option<Form>,
    pub negativity_in: f64,
    pub negativity_out: f64,
    pub blank: WBasisIndex,
}

impl AuditRecord {
    /// True when negativity would have to grow for cloning to succeed.
    pub fn monotone_violated(&self) -> bool {
        self.negativity_out > self.negativity_in
    }

    /// Published `(N_in, N_out)` for B- and C-type pairs audited with blank
    /// `W1`; `None` otherwise.
    pub fn reference_values(&self) -> Option<(f64, f64)> {
        if self.blank.get() != 1 {
            return None;
        }
        match (self.category, self.form) {
            (Category::B, Some(Form::I)) => Some((1.89097, 2.14597)),
            (Category::B, Some(Form::II)) => Some((2.23802, 2.49298)),
            (Category::C, _) => Some((2.23802, 2.55185)),
            _ => None,
        }
    }
}

pub fn default_blank() -> WBasisIndex {
    WBasisIndex::new(1).expect("1 is a valid W index")
}

pub fn negativity_audit(m: WBasisIndex, n: WBasisIndex) -> Result<AuditRecord> {
    negativity_audit_with_blank(m, n, default_blank())
}

/// Negativities of the cloner input and output across the witness lab cut.
/// A-type pairs are accepted too; their numbers are informational only.
pub fn negativity_audit_with_blank(
    m: WBasisIndex,
    n: WBasisIndex,
    blank: WBasisIndex,
) -> Result<AuditRecord> {
    audit_with_tol(m, n, blank, RANK_TOL)
}

pub fn audit_with_tol(
    m: WBasisIndex,
    n: WBasisIndex,
    blank: WBasisIndex,
    tol: f64,
) -> Result<AuditRecord> {
    let class = classify_pair_with_tol(m, n, tol)?;
    let k = class.witness_k;
    let form = match class.category {
        Category::B => Some(btype_form(m, n, k)?.form),
        _ => None,
    };
    let (rho_in, rho_out, cut) = cloner_io(m, n, k, blank)?;
    Ok(AuditRecord {
        m,
        n,
        category: class.category,
        witness_k: k,
        form,
        negativity_in: negativity(&rho_in, &cut)?,
        negativity_out: negativity(&rho_out, &cut)?,
        blank,
    })
}

/// Audits all 28 pairs, sorted by pair.
pub fn audit_all(blank: WBasisIndex, tol: f64) -> Result<Vec<AuditRecord>> {
    WBasisIndex::pairs()
        .into_par_iter()
        .map(|(m, n)| audit_with_tol(m, n, blank, tol))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InsufficiencyCertificate {
    pub params: WClassParams,
    pub cut_index: u8,
    pub blank_entropy_bits: f64,
    pub required_bits: f64,
}

/// Names a single-qubit cut where a non-W W-class blank carries less
/// entanglement than the W state it would have to copy.
pub fn blank_insufficiency(params: WClassParams) -> Result<InsufficiencyCertificate> {
    let third = 1.0 / 3.0;
    let at_w_point = [params.a(), params.b(), params.c()]
        .iter()
        .all(|x| (x - third).abs() <= 1e-9)
        && params.d() <= 1e-9;
    if at_w_point {
        return Err(Error::WStatePoint);
    }
    let (cut_index, entropy) = wclass_min_cut_entropy(params);
    let required = w_threshold_bits();
    if entropy >= required {
        return Err(Error::StructureMismatch(format!(
            "{params} has entropy {entropy} ≥ {required} on every cut"
        )));
    }
    Ok(InsufficiencyCertificate {
        params,
        cut_index,
        blank_entropy_bits: entropy,
        required_bits: required,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanViolation {
    pub params: WClassParams,
    pub min_cut_entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub step: f64,
    pub exclusion_radius: f64,
    pub points_tested: usize,
    pub points_excluded: usize,
    pub violations: Vec<ScanViolation>,
    /// Largest minimum-cut entropy over the tested points.
    pub max_tested_entropy: f64,
    pub threshold_bits: f64,
    /// Cut entropies of the W point itself, cuts 1..3.
    pub w_point_entropies: [f64; 3],
    pub cross_checks: usize,
    pub max_cross_check_error: f64,
}

/// Largest gap between the closed-form cut spectra and direct marginal
/// spectra of `w_class(params)`.
pub fn closed_form_error(params: WClassParams) -> Result<f64> {
    let state = w_class(params);
    let mut err: f64 = 0.0;
    for k in 1..=3u8 {
        let (lo, hi) = wclass_cut_spectrum(params, k)?;
        let direct = schmidt_spectrum(&state, &single_qubit_cut(k)?)?;
        err = err.max((direct[0] - hi).abs()).max((direct[1] - lo).abs());
    }
    Ok(err)
}

pub fn lemma_scan(step: f64, exclusion_radius: f64) -> Result<ScanReport> {
    lemma_scan_seeded(step, exclusion_radius, 0)
}

/// Grid scan over `a, b, c ∈ {step, 2·step, …}` with `a + b + c ≤ 1`,
/// skipping the L1 ball of `exclusion_radius` around the W point. About one
/// point in a hundred, chosen by `seed`, is cross-checked against direct
/// partial-trace spectra.
pub fn lemma_scan_seeded(step: f64, exclusion_radius: f64, seed: u64) -> Result<ScanReport> {
    // the grid must hold at least the point (step, step, step)
    if !(step > 0.0 && 3.0 * step <= 1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!("step {step} outside (0, 1/3]")));
    }
    if !(exclusion_radius >= 0.0 && exclusion_radius.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "exclusion radius {exclusion_radius} must be nonnegative"
        )));
    }
    let threshold = w_threshold_bits();
    let max_units = (1.0 / step + 1e-9).floor() as usize;
    let mut rng = random::rng(seed);
    let mut report = ScanReport {
        step,
        exclusion_radius,
        points_tested: 0,
        points_excluded: 0,
        violations: Vec::new(),
        max_tested_entropy: 0.0,
        threshold_bits: threshold,
        w_point_entropies: wclass_cut_entropies(WClassParams::w_point()),
        cross_checks: 0,
        max_cross_check_error: 0.0,
    };
    for i in 1..=max_units {
        for j in 1..=max_units {
            for l in 1..=max_units {
                let (a, b, c) = (i as f64 * step, j as f64 * step, l as f64 * step);
                if a + b + c > 1.0 + 1e-12 {
                    break;
                }
                let params = WClassParams::new(a, b, c)?;
                if params.distance_from_w_point() <= exclusion_radius {
                    report.points_excluded += 1;
                    continue;
                }
                report.points_tested += 1;
                let (_, entropy) = wclass_min_cut_entropy(params);
                report.max_tested_entropy = report.max_tested_entropy.max(entropy);
                if entropy >= threshold - SCAN_TOL {
                    report.violations.push(ScanViolation {
                        params,
                        min_cut_entropy: entropy,
                    });
                }
                if rng.gen_range(0..100) == 0 {
                    report.cross_checks += 1;
                    report.max_cross_check_error =
                        report.max_cross_check_error.max(closed_form_error(params)?);
                }
            }
        }
    }
    Ok(report)
}

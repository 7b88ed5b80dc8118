//! C ABI over `locc-core`.
//!
//! States and density matrices cross the boundary as opaque handles that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns a [`LoccStatus`]; on failure, [`locc_last_error_message`]
//! describes the error on the calling thread. Qubit indices are zero-based
//! here, with qubit 0 the most significant bit.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use locc_core::audit::{audit_with_tol, classify_pair_with_tol, Category, Form};
use locc_core::catalog::{ghz, w_basis, w_class, GhzLabel, WBasisIndex, WClassParams};
use locc_core::ghz::triple_clonability;
use locc_core::measures::{cut_entropy, negativity};
use locc_core::register::{
    mix, partial_trace, Bipartition, DensityMatrix, StateVector, C64, RANK_TOL,
};
use locc_core::Error;

/// Opaque pure state.
pub struct LoccState(StateVector);

/// Opaque density matrix.
pub struct LoccDensity(DensityMatrix);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    VerificationFailed = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoccCategory {
    A = 0,
    B = 1,
    C = 2,
}

/// `None` for pairs outside category B.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoccForm {
    None = 0,
    I = 1,
    Ii = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoccPairClassification {
    pub m: u8,
    pub n: u8,
    pub category: LoccCategory,
    /// One-based qubit alone in lab B.
    pub witness_k: u8,
    pub span_dim: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoccAuditRecord {
    pub m: u8,
    pub n: u8,
    pub category: LoccCategory,
    pub witness_k: u8,
    pub form: LoccForm,
    pub negativity_in: f64,
    pub negativity_out: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let text = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(err: &Error) -> LoccStatus {
    match err {
        Error::DimensionMismatch { .. } => LoccStatus::DimensionMismatch,
        Error::NoCircuitFound(_) | Error::InconsistentVerdict(_) | Error::StructureMismatch(_) => {
            LoccStatus::VerificationFailed
        }
        _ => LoccStatus::InvalidInput,
    }
}

struct Fail(LoccStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LoccStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> LoccStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LoccStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LoccStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn store_state(out: *mut *mut LoccState, s: StateVector) -> Result<(), Fail> {
    store(out, Box::into_raw(Box::new(LoccState(s))), "out")
}

unsafe fn store_density(out: *mut *mut LoccDensity, d: DensityMatrix) -> Result<(), Fail> {
    store(out, Box::into_raw(Box::new(LoccDensity(d))), "out")
}

fn category(c: Category) -> LoccCategory {
    match c {
        Category::A => LoccCategory::A,
        Category::B => LoccCategory::B,
        Category::C => LoccCategory::C,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn locc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn locc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a state from `len` amplitudes. `im` may be NULL for real input.
/// Vectors within 1e-9 of unit norm are renormalized.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `len` readable doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_state_from_amplitudes(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut LoccState,
) -> LoccStatus {
    guard(|| {
        let re = slice(re, len, "re")?;
        let amps = if im.is_null() {
            re.iter().map(|&x| C64::new(x, 0.0)).collect()
        } else {
            let im = slice(im, len, "im")?;
            re.iter().zip(im).map(|(&x, &y)| C64::new(x, y)).collect()
        };
        store_state(out, StateVector::new(amps)?)
    })
}

/// GHZ-basis state with label `(p, i, j)`, each bit 0 or 1.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_state_ghz(
    p: u8,
    i: u8,
    j: u8,
    out: *mut *mut LoccState,
) -> LoccStatus {
    guard(|| store_state(out, ghz(GhzLabel::new(p, i, j)?)))
}

/// W-basis state `W_n`, `n` in 1..=8.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_state_w_basis(n: u8, out: *mut *mut LoccState) -> LoccStatus {
    guard(|| store_state(out, w_basis(WBasisIndex::new(n)?)))
}

/// `√a|001⟩ + √b|010⟩ + √c|100⟩ + √d|000⟩` with `d = 1 − a − b − c`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_state_w_class(
    a: f64,
    b: f64,
    c: f64,
    out: *mut *mut LoccState,
) -> LoccStatus {
    guard(|| store_state(out, w_class(WClassParams::new(a, b, c)?)))
}

/// `left ⊗ right`; `left` supplies the leading qubits.
///
/// # Safety
/// `left` and `right` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn locc_state_tensor(
    left: *const LoccState,
    right: *const LoccState,
    out: *mut *mut LoccState,
) -> LoccStatus {
    guard(|| {
        let (l, r) = (deref(left, "left")?, deref(right, "right")?);
        store_state(out, l.0.tensor(&r.0))
    })
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn locc_state_num_qubits(
    state: *const LoccState,
    out: *mut usize,
) -> LoccStatus {
    guard(|| store(out, deref(state, "state")?.0.n_qubits(), "out"))
}

/// Copies the `2^n` amplitudes into `re` and `im`, each of length `len`.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn locc_state_amplitudes(
    state: *const LoccState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> LoccStatus {
    guard(|| {
        let amps = deref(state, "state")?.0.amplitudes();
        if len != amps.len() {
            return Err(Error::DimensionMismatch {
                left: len,
                right: amps.len(),
            }
            .into());
        }
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        for (x, a) in amps.iter().enumerate() {
            re.add(x).write(a.re);
            im.add(x).write(a.im);
        }
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn locc_state_free(state: *mut LoccState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

unsafe fn cut_from(
    n_qubits: usize,
    side_b: *const usize,
    n_side_b: usize,
) -> Result<Bipartition, Fail> {
    Ok(Bipartition::new(
        n_qubits,
        slice(side_b, n_side_b, "side_b")?,
    )?)
}

/// Entanglement entropy in bits across the cut with `side_b` on one side.
///
/// # Safety
/// `state` must be a live handle, `side_b` must hold `n_side_b` indices,
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_cut_entropy(
    state: *const LoccState,
    side_b: *const usize,
    n_side_b: usize,
    out: *mut f64,
) -> LoccStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        let cut = cut_from(s.n_qubits(), side_b, n_side_b)?;
        store(out, cut_entropy(s, &cut)?.entropy_bits, "out")
    })
}

/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn locc_density_from_state(
    state: *const LoccState,
    out: *mut *mut LoccDensity,
) -> LoccStatus {
    guard(|| store_density(out, deref(state, "state")?.0.density()))
}

/// `Σ weights[x] · parts[x]` over `count` equally sized density matrices.
///
/// # Safety
/// `weights` and `parts` must hold `count` entries, each part a live handle.
#[no_mangle]
pub unsafe extern "C" fn locc_density_mix(
    weights: *const f64,
    parts: *const *const LoccDensity,
    count: usize,
    out: *mut *mut LoccDensity,
) -> LoccStatus {
    guard(|| {
        let w = slice(weights, count, "weights")?;
        let dms = slice(parts, count, "parts")?
            .iter()
            .map(|&p| deref(p, "part").map(|d| d.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        store_density(out, mix(w, &dms)?)
    })
}

/// Traces out the `n_discard` qubits listed in `discard`.
///
/// # Safety
/// `dm` must be a live handle, `discard` must hold `n_discard` indices, and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_density_partial_trace(
    dm: *const LoccDensity,
    discard: *const usize,
    n_discard: usize,
    out: *mut *mut LoccDensity,
) -> LoccStatus {
    guard(|| {
        let d = &deref(dm, "dm")?.0;
        store_density(
            out,
            partial_trace(d, slice(discard, n_discard, "discard")?)?,
        )
    })
}

/// # Safety
/// `dm` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn locc_density_num_qubits(
    dm: *const LoccDensity,
    out: *mut usize,
) -> LoccStatus {
    guard(|| store(out, deref(dm, "dm")?.0.n_qubits(), "out"))
}

/// `‖ρ^{T_B}‖₁ − 1` across the cut with `side_b` on side B.
///
/// # Safety
/// `dm` must be a live handle, `side_b` must hold `n_side_b` indices, and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_negativity(
    dm: *const LoccDensity,
    side_b: *const usize,
    n_side_b: usize,
    out: *mut f64,
) -> LoccStatus {
    guard(|| {
        let d = &deref(dm, "dm")?.0;
        let cut = cut_from(d.n_qubits(), side_b, n_side_b)?;
        store(out, negativity(d, &cut)?, "out")
    })
}

/// # Safety
/// `dm` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn locc_density_free(dm: *mut LoccDensity) {
    if !dm.is_null() {
        drop(Box::from_raw(dm));
    }
}

fn pair(m: u8, n: u8) -> Result<(WBasisIndex, WBasisIndex), Fail> {
    Ok((WBasisIndex::new(m)?, WBasisIndex::new(n)?))
}

/// Category of the W-basis pair `(W_m, W_n)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_classify_pair(
    m: u8,
    n: u8,
    out: *mut LoccPairClassification,
) -> LoccStatus {
    guard(|| {
        let (wm, wn) = pair(m, n)?;
        let r = classify_pair_with_tol(wm, wn, RANK_TOL)?;
        store(
            out,
            LoccPairClassification {
                m: r.m.get(),
                n: r.n.get(),
                category: category(r.category),
                witness_k: r.witness_k,
                span_dim: r.span_dim,
            },
            "out",
        )
    })
}

/// Negativity across the witness lab cut before and after ideal cloning
/// of `(W_m, W_n)` with blank `W_blank`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_audit_pair(
    m: u8,
    n: u8,
    blank: u8,
    out: *mut LoccAuditRecord,
) -> LoccStatus {
    guard(|| {
        let (wm, wn) = pair(m, n)?;
        let r = audit_with_tol(wm, wn, WBasisIndex::new(blank)?, RANK_TOL)?;
        let form = match r.form {
            None => LoccForm::None,
            Some(Form::I) => LoccForm::I,
            Some(Form::II) => LoccForm::Ii,
        };
        store(
            out,
            LoccAuditRecord {
                m: r.m.get(),
                n: r.n.get(),
                category: category(r.category),
                witness_k: r.witness_k,
                form,
                negativity_in: r.negativity_in,
                negativity_out: r.negativity_out,
            },
            "out",
        )
    })
}

/// Whether three GHZ-basis states, given as nine bits `p,i,j` per state,
/// can be cloned locally with blank `(0,0,0)`.
///
/// # Safety
/// `labels` must point to 9 readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_ghz_triple_clonable(labels: *const u8, out: *mut bool) -> LoccStatus {
    guard(|| {
        let bits = slice(labels, 9, "labels")?;
        let triple = bits
            .chunks(3)
            .map(|b| GhzLabel::new(b[0], b[1], b[2]))
            .collect::<Result<Vec<_>, _>>()?;
        store(out, triple_clonability(&triple)?.clonable, "out")
    })
}

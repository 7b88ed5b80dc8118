#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum LoccStatus {
  LOCC_STATUS_OK = 0,
  LOCC_STATUS_NULL_POINTER = 1,
  LOCC_STATUS_INVALID_INPUT = 2,
  LOCC_STATUS_DIMENSION_MISMATCH = 3,
  LOCC_STATUS_VERIFICATION_FAILED = 4,
  LOCC_STATUS_PANIC = 5,
} LoccStatus;

typedef enum LoccCategory {
  LOCC_CATEGORY_A = 0,
  LOCC_CATEGORY_B = 1,
  LOCC_CATEGORY_C = 2,
} LoccCategory;

// `None` for pairs outside category B.
typedef enum LoccForm {
  LOCC_FORM_NONE = 0,
  LOCC_FORM_I = 1,
  LOCC_FORM_II = 2,
} LoccForm;

// Opaque density matrix.
typedef struct LoccDensity LoccDensity;

// Opaque pure state.
typedef struct LoccState LoccState;

typedef struct LoccPairClassification {
  uint8_t m;
  uint8_t n;
  enum LoccCategory category;
  // One-based qubit alone in lab B.
  uint8_t witness_k;
  uintptr_t span_dim;
} LoccPairClassification;

typedef struct LoccAuditRecord {
  uint8_t m;
  uint8_t n;
  enum LoccCategory category;
  uint8_t witness_k;
  enum LoccForm form;
  double negativity_in;
  double negativity_out;
} LoccAuditRecord;

// Library version as a static NUL-terminated string.
const char *locc_version(void);

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next call into this library on the same thread.
const char *locc_last_error_message(void);

// Builds a state from `len` amplitudes. `im` may be NULL for real input.
// Vectors within 1e-9 of unit norm are renormalized.
//
// # Safety
// `re` (and `im` when non-null) must point to `len` readable doubles and
// `out` must be writable.
enum LoccStatus locc_state_from_amplitudes(const double *re,
                                           const double *im,
                                           uintptr_t len,
                                           struct LoccState **out);

// GHZ-basis state with label `(p, i, j)`, each bit 0 or 1.
//
// # Safety
// `out` must be writable.
enum LoccStatus locc_state_ghz(uint8_t p, uint8_t i, uint8_t j, struct LoccState **out);

// W-basis state `W_n`, `n` in 1..=8.
//
// # Safety
// `out` must be writable.
enum LoccStatus locc_state_w_basis(uint8_t n, struct LoccState **out);

// `√a|001⟩ + √b|010⟩ + √c|100⟩ + √d|000⟩` with `d = 1 − a − b − c`.
//
// # Safety
// `out` must be writable.
enum LoccStatus locc_state_w_class(double a, double b, double c, struct LoccState **out);

// `left ⊗ right`; `left` supplies the leading qubits.
//
// # Safety
// `left` and `right` must be live handles and `out` writable.
enum LoccStatus locc_state_tensor(const struct LoccState *left,
                                  const struct LoccState *right,
                                  struct LoccState **out);

// # Safety
// `state` must be a live handle.
enum LoccStatus locc_state_num_qubits(const struct LoccState *state, uintptr_t *out);

// Copies the `2^n` amplitudes into `re` and `im`, each of length `len`.
//
// # Safety
// `state` must be a live handle; `re` and `im` must hold `len` doubles.
enum LoccStatus locc_state_amplitudes(const struct LoccState *state,
                                      double *re,
                                      double *im,
                                      uintptr_t len);

// # Safety
// `state` must be NULL or a handle not yet freed.
void locc_state_free(struct LoccState *state);

// Entanglement entropy in bits across the cut with `side_b` on one side.
//
// # Safety
// `state` must be a live handle, `side_b` must hold `n_side_b` indices,
// and `out` must be writable.
enum LoccStatus locc_cut_entropy(const struct LoccState *state,
                                 const uintptr_t *side_b,
                                 uintptr_t n_side_b,
                                 double *out);

// # Safety
// `state` must be a live handle and `out` writable.
enum LoccStatus locc_density_from_state(const struct LoccState *state, struct LoccDensity **out);

// `Σ weights[x] · parts[x]` over `count` equally sized density matrices.
//
// # Safety
// `weights` and `parts` must hold `count` entries, each part a live handle.
enum LoccStatus locc_density_mix(const double *weights,
                                 const struct LoccDensity *const *parts,
                                 uintptr_t count,
                                 struct LoccDensity **out);

// Traces out the `n_discard` qubits listed in `discard`.
//
// # Safety
// `dm` must be a live handle, `discard` must hold `n_discard` indices, and
// `out` must be writable.
enum LoccStatus locc_density_partial_trace(const struct LoccDensity *dm,
                                           const uintptr_t *discard,
                                           uintptr_t n_discard,
                                           struct LoccDensity **out);

// # Safety
// `dm` must be a live handle and `out` writable.
enum LoccStatus locc_density_num_qubits(const struct LoccDensity *dm, uintptr_t *out);

// `‖ρ^{T_B}‖₁ − 1` across the cut with `side_b` on side B.
//
// # Safety
// `dm` must be a live handle, `side_b` must hold `n_side_b` indices, and
// `out` must be writable.
enum LoccStatus locc_negativity(const struct LoccDensity *dm,
                                const uintptr_t *side_b,
                                uintptr_t n_side_b,
                                double *out);

// # Safety
// `dm` must be NULL or a handle not yet freed.
void locc_density_free(struct LoccDensity *dm);

// Category of the W-basis pair `(W_m, W_n)`.
//
// # Safety
// `out` must be writable.
enum LoccStatus locc_classify_pair(uint8_t m, uint8_t n, struct LoccPairClassification *out);

// Negativity across the witness lab cut before and after ideal cloning
// of `(W_m, W_n)` with blank `W_blank`.
//
// # Safety
// `out` must be writable.
enum LoccStatus locc_audit_pair(uint8_t m, uint8_t n, uint8_t blank, struct LoccAuditRecord *out);

// Whether three GHZ-basis states, given as nine bits `p,i,j` per state,
// can be cloned locally with blank `(0,0,0)`.
//
// # Safety
// `labels` must point to 9 readable bytes and `out` must be writable.
enum LoccStatus locc_ghz_triple_clonable(const uint8_t *labels, bool *out);

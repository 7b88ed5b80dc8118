//! Local cloning circuits for sets of canonical GHZ states, and detection of
//! triples that look like three Bell states across some two-versus-one cut.
//!
//! Party `q` holds qubit `q` of the original register and qubit `q` of the
//! clone register (absolute index `3 + q`). Every gate in a
//! [`CloningCircuit`] acts within a single party.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::Serialize;

use crate::catalog::{ghz, GhzLabel};
use crate::error::{Error, Result};
use crate::register::{
    apply_circuit, fidelity_pure, joint_support_dim, schmidt_coefficients, Bipartition,
    CnotDirection, LocalGate, QubitGate, StateVector, RANK_TOL,
};

pub const PARTIES: usize = 3;
/// Minimum fidelity accepted as an exact clone.
pub const FIDELITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CloningCircuit {
    pub layers: Vec<LocalGate>,
    pub blank: GhzLabel,
}

impl CloningCircuit {
    /// True when no gate couples qubits held by different parties.
    pub fn is_local(&self) -> bool {
        self.layers.iter().all(|gate| {
            gate.interaction_groups(2 * PARTIES).iter().all(|group| {
                let party = group[0] % PARTIES;
                group
                    .iter()
                    .all(|q| *q < 2 * PARTIES && q % PARTIES == party)
            })
        })
    }

    pub fn direction(&self) -> Option<CnotDirection> {
        self.layers.iter().find_map(|g| match g {
            LocalGate::TransversalCnot(d) => Some(*d),
            _ => None,
        })
    }

    /// One gate per line: `CNOT orig->clone`, `CNOT clone->orig`, or
    /// `GATE <name> <register>:<party>` with one-based parties.
    pub fn listing(&self) -> Vec<String> {
        self.layers
            .iter()
            .map(|gate| match *gate {
                LocalGate::TransversalCnot(CnotDirection::OriginalToClone) => {
                    "CNOT orig->clone".to_string()
                }
                LocalGate::TransversalCnot(CnotDirection::CloneToOriginal) => {
                    "CNOT clone->orig".to_string()
                }
                LocalGate::Single { target, gate } => {
                    let register = if target < PARTIES { "orig" } else { "clone" };
                    format!("GATE {} {}:{}", gate.name(), register, target % PARTIES + 1)
                }
            })
            .collect()
    }
}

impl fmt::Display for CloningCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.listing() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl Serialize for CloningCircuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CloningCircuit", 2)?;
        st.serialize_field("blank", &self.blank)?;
        st.serialize_field("gates", &self.listing())?;
        st.end()
    }
}

fn clone_gate(party: usize, gate: QubitGate) -> LocalGate {
    LocalGate::Single {
        target: PARTIES + party,
        gate,
    }
}

/// Gates on the clone register that map `ghz(blank)` to `ghz(0,0,0)`.
fn blank_rotation(blank: GhzLabel) -> Vec<LocalGate> {
    let mut gates = Vec::new();
    if blank.i() == 1 {
        gates.push(clone_gate(1, QubitGate::X));
    }
    if blank.j() == 1 {
        gates.push(clone_gate(2, QubitGate::X));
    }
    if blank.p() == 1 {
        gates.push(clone_gate(0, QubitGate::Z));
    }
    gates
}

/// Nearest named gate for `diag(1, e^{iθ})`.
fn phase_gate(theta: f64) -> Option<QubitGate> {
    let t = theta.rem_euclid(2.0 * PI);
    let near = |x: f64| (t - x).abs() < 1e-12;
    if near(0.0) || near(2.0 * PI) {
        None
    } else if near(FRAC_PI_2) {
        Some(QubitGate::S)
    } else if near(PI) {
        Some(QubitGate::Z)
    } else if near(3.0 * FRAC_PI_2) {
        Some(QubitGate::Sdg)
    } else {
        Some(QubitGate::Phase(t))
    }
}

/// Solves `ζ₁ + (1−2i)ζ₂ + (1−2j)ζ₃ = π p` for every member, setting free
/// variables to zero. Rows with distinct `(i, j)` are linearly independent.
fn solve_phases(states: &[GhzLabel]) -> Option<[f64; 3]> {
    let mut rows: Vec<[f64; 4]> = states
        .iter()
        .map(|s| {
            [
                1.0,
                1.0 - 2.0 * s.i() as f64,
                1.0 - 2.0 * s.j() as f64,
                PI * s.p() as f64,
            ]
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..3 {
        let Some(p) = (row..rows.len()).find(|&r| rows[r][col].abs() > 1e-12) else {
            continue;
        };
        rows.swap(row, p);
        let lead = rows[row][col];
        for v in rows[row].iter_mut() {
            *v /= lead;
        }
        for r in 0..rows.len() {
            if r != row {
                let factor = rows[r][col];
                if factor != 0.0 {
                    let pivot = rows[row];
                    for (x, p) in rows[r].iter_mut().zip(pivot) {
                        *x -= factor * p;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    if rows[row..].iter().any(|r| r[3].abs() > 1e-12) {
        return None;
    }
    let mut zeta = [0.0; 3];
    for (r, &col) in pivots.iter().enumerate() {
        zeta[col] = rows[r][3];
    }
    Some(zeta)
}

fn candidate_circuit(states: &[GhzLabel], blank: GhzLabel) -> Option<Vec<LocalGate>> {
    let mut layers = blank_rotation(blank);
    let distinct_ij = states.iter().enumerate().all(|(x, s)| {
        states[x + 1..]
            .iter()
            .all(|t| (s.i(), s.j()) != (t.i(), t.j()))
    });
    let shared_ij = states
        .iter()
        .all(|s| (s.i(), s.j()) == (states[0].i(), states[0].j()));
    if distinct_ij {
        // Forward CNOTs copy (i, j) and leave the clone with p = 0; diagonal
        // phases on the clone then restore each member's p.
        layers.push(LocalGate::TransversalCnot(CnotDirection::OriginalToClone));
        let zeta = solve_phases(states)?;
        for (party, theta) in zeta.iter().enumerate() {
            if let Some(g) = phase_gate(*theta) {
                layers.push(clone_gate(party, g));
            }
        }
        Some(layers)
    } else if shared_ij {
        // Reverse CNOTs copy p and leave the clone with (i, j) = (0, 0).
        layers.push(LocalGate::TransversalCnot(CnotDirection::CloneToOriginal));
        if states[0].i() == 1 {
            layers.push(clone_gate(1, QubitGate::X));
        }
        if states[0].j() == 1 {
            layers.push(clone_gate(2, QubitGate::X));
        }
        Some(layers)
    } else {
        None
    }
}

/// Exhaustive search over a CNOT direction and one gate from
/// `{I, X, Z, S, S†}` per clone qubit.
fn search_circuit(states: &[GhzLabel], blank: GhzLabel, tol: f64) -> Option<CloningCircuit> {
    let catalog = [
        None,
        Some(QubitGate::X),
        Some(QubitGate::Z),
        Some(QubitGate::S),
        Some(QubitGate::Sdg),
    ];
    for direction in [
        CnotDirection::OriginalToClone,
        CnotDirection::CloneToOriginal,
    ] {
        for g0 in catalog {
            for g1 in catalog {
                for g2 in catalog {
                    let mut layers = blank_rotation(blank);
                    layers.push(LocalGate::TransversalCnot(direction));
                    for (party, g) in [g0, g1, g2].into_iter().enumerate() {
                        if let Some(g) = g {
                            layers.push(clone_gate(party, g));
                        }
                    }
                    let circuit = CloningCircuit { layers, blank };
                    if clones_all(&circuit, states, tol) {
                        return Some(circuit);
                    }
                }
            }
        }
    }
    None
}

fn clones_all(circuit: &CloningCircuit, states: &[GhzLabel], tol: f64) -> bool {
    verify_cloner(circuit, states)
        .map(|f| f.values().all(|&x| x >= 1.0 - tol))
        .unwrap_or(false)
}

fn check_distinct(states: &[GhzLabel]) -> Result<()> {
    for (x, s) in states.iter().enumerate() {
        if states[x + 1..].contains(s) {
            return Err(Error::InvalidInput(format!("repeated label {s}")));
        }
    }
    Ok(())
}

fn describe(states: &[GhzLabel]) -> String {
    let parts: Vec<String> = states.iter().map(|s| format!("({s})")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Builds and verifies a local circuit that clones every member of `states`
/// onto `ghz(blank)`.
pub fn synthesize_cloner(states: &[GhzLabel], blank: GhzLabel) -> Result<CloningCircuit> {
    synthesize_cloner_with_tol(states, blank, FIDELITY_TOL)
}

pub fn synthesize_cloner_with_tol(
    states: &[GhzLabel],
    blank: GhzLabel,
    tol: f64,
) -> Result<CloningCircuit> {
    if !(2..=3).contains(&states.len()) {
        return Err(Error::InvalidInput(format!(
            "cloning sets have 2 or 3 members, got {}",
            states.len()
        )));
    }
    check_distinct(states)?;
    if let Some(layers) = candidate_circuit(states, blank) {
        let circuit = CloningCircuit { layers, blank };
        if clones_all(&circuit, states, tol) {
            return Ok(circuit);
        }
    }
    search_circuit(states, blank, tol).ok_or_else(|| Error::NoCircuitFound(describe(states)))
}

/// Input `ghz(s) ⊗ ghz(blank)` after running `circuit`.
pub fn cloner_output(circuit: &CloningCircuit, label: GhzLabel) -> Result<StateVector> {
    let input = ghz(label).tensor(&ghz(circuit.blank));
    apply_circuit(&input, &circuit.layers)
}

/// Fidelity of the actual output with `ghz(s) ⊗ ghz(s)` for each member.
pub fn verify_cloner(
    circuit: &CloningCircuit,
    states: &[GhzLabel],
) -> Result<BTreeMap<GhzLabel, f64>> {
    states
        .iter()
        .map(|&s| {
            let out = cloner_output(circuit, s)?;
            let ideal = ghz(s).tensor(&ghz(s));
            Ok((s, fidelity_pure(&out, &ideal)?))
        })
        .collect()
}

/// Fidelity of the original register, after cloning, with `ghz(label)`.
pub fn original_fidelity(circuit: &CloningCircuit, label: GhzLabel) -> Result<f64> {
    let out = cloner_output(circuit, label)?;
    let reduced = out.reduced(&[0, 1, 2])?;
    let target = ghz(label);
    let amps = target.amplitudes();
    let m = reduced.entries();
    let mut value = 0.0;
    for r in 0..8 {
        for col in 0..8 {
            value += (amps[r].conj() * m[(r, col)] * amps[col]).re;
        }
    }
    Ok(value)
}

/// A two-versus-one cut across which the three states are orthogonal,
/// maximally entangled, and confined to a single 2⊗2 subspace; `None` if
/// no cut qualifies.
pub fn bell_triple_cut(triple: &[GhzLabel]) -> Result<Option<Bipartition>> {
    if triple.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "a triple has 3 members, got {}",
            triple.len()
        )));
    }
    check_distinct(triple)?;
    let states: Vec<StateVector> = triple.iter().map(|&l| ghz(l)).collect();
    for x in 0..3 {
        for y in x + 1..3 {
            if states[x].inner(&states[y])?.norm() > RANK_TOL {
                return Ok(None);
            }
        }
    }
    for lone in (0..3).rev() {
        let cut = Bipartition::new(3, &[lone])?;
        let side_a = cut.side_a();
        let reduced_a = states
            .iter()
            .map(|s| s.reduced(&side_a))
            .collect::<Result<Vec<_>>>()?;
        let reduced_b = states
            .iter()
            .map(|s| s.reduced(&[lone]))
            .collect::<Result<Vec<_>>>()?;
        let dim_a = joint_support_dim(&reduced_a.iter().collect::<Vec<_>>(), RANK_TOL)?;
        let dim_b = joint_support_dim(&reduced_b.iter().collect::<Vec<_>>(), RANK_TOL)?;
        if dim_a != 2 || dim_b != 2 {
            continue;
        }
        let maximal = states.iter().all(|s| {
            schmidt_coefficients(s, &cut)
                .map(|coeffs| coeffs.len() == 2 && coeffs.iter().all(|l| (l - 0.5).abs() < 1e-10))
                .unwrap_or(false)
        });
        if maximal {
            return Ok(Some(cut));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleVerdict {
    pub triple: [GhzLabel; 3],
    pub clonable: bool,
    pub witness_cut: Option<String>,
    pub circuit: Option<CloningCircuit>,
    #[serde(skip)]
    pub witness: Option<Bipartition>,
}

/// Refuses triples with a Bell-triple witness cut; otherwise returns a
/// verified cloning circuit with blank `ghz(0,0,0)`.
pub fn triple_clonability(triple: &[GhzLabel]) -> Result<TripleVerdict> {
    let blank = GhzLabel::new(0, 0, 0)?;
    let members: [GhzLabel; 3] = triple.try_into().map_err(|_| {
        Error::InvalidInput(format!("a triple has 3 members, got {}", triple.len()))
    })?;
    match bell_triple_cut(triple)? {
        Some(cut) => Ok(TripleVerdict {
            triple: members,
            clonable: false,
            witness_cut: Some(cut.to_string()),
            circuit: None,
            witness: Some(cut),
        }),
        None => match synthesize_cloner(triple, blank) {
            Ok(circuit) => Ok(TripleVerdict {
                triple: members,
                clonable: true,
                witness_cut: None,
                circuit: Some(circuit),
                witness: None,
            }),
            Err(Error::NoCircuitFound(what)) => Err(Error::InconsistentVerdict(format!(
                "{what} has no Bell-triple cut but no verified circuit was found"
            ))),
            Err(e) => Err(e),
        },
    }
}

/// All 56 unordered triples of distinct labels, lexicographic.
pub fn all_triples() -> Vec<[GhzLabel; 3]> {
    let labels = GhzLabel::all();
    let mut out = Vec::with_capacity(56);
    for x in 0..8 {
        for y in x + 1..8 {
            for z in y + 1..8 {
                out.push([labels[x], labels[y], labels[z]]);
            }
        }
    }
    out
}

/// All 28 unordered pairs of distinct labels, lexicographic.
pub fn all_pairs() -> Vec<[GhzLabel; 2]> {
    let labels = GhzLabel::all();
    let mut out = Vec::with_capacity(28);
    for x in 0..8 {
        for y in x + 1..8 {
            out.push([labels[x], labels[y]]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(p: u8, i: u8, j: u8) -> GhzLabel {
        GhzLabel::new(p, i, j).unwrap()
    }

    #[test]
    fn forward_pair_needs_no_corrections() {
        let c = synthesize_cloner(&[l(0, 0, 0), l(0, 1, 1)], l(0, 0, 0)).unwrap();
        assert_eq!(
            c.layers,
            vec![LocalGate::TransversalCnot(CnotDirection::OriginalToClone)]
        );
    }

    #[test]
    fn shared_bits_pair_uses_reverse_cnots() {
        let c = synthesize_cloner(&[l(0, 0, 0), l(1, 0, 0)], l(0, 0, 0)).unwrap();
        assert_eq!(
            c.layers,
            vec![LocalGate::TransversalCnot(CnotDirection::CloneToOriginal)]
        );
    }

    #[test]
    fn mixed_phase_triple_gets_diagonal_corrections() {
        let set = [l(0, 0, 0), l(1, 0, 1), l(0, 1, 0)];
        let c = synthesize_cloner(&set, l(0, 0, 0)).unwrap();
        assert_eq!(c.direction(), Some(CnotDirection::OriginalToClone));
        assert!(c.layers.len() > 1);
        for gate in &c.layers[1..] {
            match gate {
                LocalGate::Single { target, gate } => {
                    assert!(*target >= 3);
                    assert!(gate.is_diagonal());
                }
                _ => panic!("unexpected gate"),
            }
        }
        for f in verify_cloner(&c, &set).unwrap().values() {
            assert!(*f >= 1.0 - FIDELITY_TOL);
        }
    }

    #[test]
    fn phase_solution_satisfies_every_row() {
        let set = [l(0, 0, 0), l(1, 0, 1), l(0, 1, 0)];
        let z = solve_phases(&set).unwrap();
        for s in set {
            let lhs = z[0] + (1.0 - 2.0 * s.i() as f64) * z[1] + (1.0 - 2.0 * s.j() as f64) * z[2];
            let diff = (lhs - PI * s.p() as f64).rem_euclid(2.0 * PI);
            assert!(diff < 1e-12 || (2.0 * PI - diff) < 1e-12);
        }
    }

    #[test]
    fn verify_empty_circuit_when_blank_is_target() {
        let c = CloningCircuit {
            layers: vec![],
            blank: l(0, 0, 0),
        };
        let f = verify_cloner(&c, &[l(0, 0, 0)]).unwrap();
        assert!((f[&l(0, 0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forward_cnot_alone_misses_the_phase() {
        let c = CloningCircuit {
            layers: vec![LocalGate::TransversalCnot(CnotDirection::OriginalToClone)],
            blank: l(0, 0, 0),
        };
        let f = verify_cloner(&c, &[l(1, 0, 0)]).unwrap();
        assert!(f[&l(1, 0, 0)] < 1e-12);
        // the clone register holds ghz(0,0,0)
        let out = cloner_output(&c, l(1, 0, 0)).unwrap();
        let want = ghz(l(1, 0, 0)).tensor(&ghz(l(0, 0, 0)));
        assert!((fidelity_pure(&out, &want).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn other_blanks_are_rotated() {
        for blank in GhzLabel::all() {
            let set = [l(0, 0, 0), l(1, 1, 0)];
            let c = synthesize_cloner(&set, blank).unwrap();
            assert!(c.is_local());
            assert!(verify_cloner(&c, &set)
                .unwrap()
                .values()
                .all(|f| *f >= 1.0 - FIDELITY_TOL));
        }
    }

    #[test]
    fn bad_sets_are_rejected() {
        assert!(synthesize_cloner(&[l(0, 0, 0)], l(0, 0, 0)).is_err());
        assert!(synthesize_cloner(&[l(0, 0, 0), l(0, 0, 0)], l(0, 0, 0)).is_err());
        assert!(matches!(
            synthesize_cloner(&[l(0, 0, 0), l(1, 0, 0), l(0, 0, 1)], l(0, 0, 0)),
            Err(Error::NoCircuitFound(_))
        ));
    }

    #[test]
    fn bell_triple_examples() {
        let cut = bell_triple_cut(&[l(0, 0, 0), l(1, 0, 0), l(0, 0, 1)])
            .unwrap()
            .unwrap();
        assert_eq!(cut.side_b(), &[2]);
        let cut = bell_triple_cut(&[l(0, 0, 0), l(1, 0, 0), l(0, 1, 1)])
            .unwrap()
            .unwrap();
        assert_eq!(cut.side_b(), &[0]);
        assert_eq!(cut.to_string(), "23|1");
        assert!(bell_triple_cut(&[l(0, 0, 0), l(0, 0, 1), l(0, 1, 0)])
            .unwrap()
            .is_none());
    }

    #[test]
    fn triple_verdicts() {
        let v = triple_clonability(&[l(0, 0, 0), l(1, 0, 0), l(0, 0, 1)]).unwrap();
        assert!(!v.clonable && v.witness.is_some() && v.circuit.is_none());
        let v = triple_clonability(&[l(0, 0, 0), l(0, 0, 1), l(0, 1, 0)]).unwrap();
        assert!(v.clonable && v.witness.is_none());
        let c = v.circuit.unwrap();
        assert_eq!(c.listing(), vec!["CNOT orig->clone"]);
    }

    #[test]
    fn listing_format() {
        let c = CloningCircuit {
            layers: vec![
                LocalGate::TransversalCnot(CnotDirection::OriginalToClone),
                clone_gate(1, QubitGate::S),
            ],
            blank: l(0, 0, 0),
        };
        assert_eq!(c.listing(), vec!["CNOT orig->clone", "GATE S clone:2"]);
        assert!(c.is_local());
    }
}

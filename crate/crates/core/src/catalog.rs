//! Canonical GHZ basis, the eight-element W basis, and generic W-class states.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::register::{c, StateVector, C64};

/// Label `(p, i, j)` of the GHZ state `(|0 i j⟩ + (−1)^p |1 ī j̄⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GhzLabel {
    p: u8,
    i: u8,
    j: u8,
}

impl GhzLabel {
    pub fn new(p: u8, i: u8, j: u8) -> Result<Self> {
        if p > 1 || i > 1 || j > 1 {
            return Err(Error::BadLabel(format!("({p},{i},{j}) needs bits")));
        }
        Ok(GhzLabel { p, i, j })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn i(&self) -> u8 {
        self.i
    }

    pub fn j(&self) -> u8 {
        self.j
    }

    /// All eight labels in `(p, i, j)` lexicographic order.
    pub fn all() -> Vec<GhzLabel> {
        (0..8u8)
            .map(|x| GhzLabel {
                p: x >> 2 & 1,
                i: x >> 1 & 1,
                j: x & 1,
            })
            .collect()
    }
}

impl fmt::Display for GhzLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.p, self.i, self.j)
    }
}

impl FromStr for GhzLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<&str> = s.split(',').map(str::trim).collect();
        if bits.len() != 3 {
            return Err(Error::BadLabel(format!("expected p,i,j, got {s:?}")));
        }
        let mut out = [0u8; 3];
        for (slot, b) in out.iter_mut().zip(&bits) {
            *slot = match *b {
                "0" => 0,
                "1" => 1,
                _ => return Err(Error::BadLabel(format!("expected bits in {s:?}"))),
            };
        }
        GhzLabel::new(out[0], out[1], out[2])
    }
}

impl Serialize for GhzLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Index `1..=8` into the W basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WBasisIndex(u8);

impl WBasisIndex {
    pub fn new(n: u8) -> Result<Self> {
        if !(1..=8).contains(&n) {
            return Err(Error::BadLabel(format!("W index {n} outside 1..=8")));
        }
        Ok(WBasisIndex(n))
    }

    pub fn get(&self) -> u8 {
        self.0
    }

    pub fn all() -> Vec<WBasisIndex> {
        (1..=8).map(WBasisIndex).collect()
    }

    /// The 28 unordered pairs `(m, n)` with `m < n`, in lexicographic order.
    pub fn pairs() -> Vec<(WBasisIndex, WBasisIndex)> {
        let all = Self::all();
        let mut out = Vec::with_capacity(28);
        for (x, m) in all.iter().enumerate() {
            for n in &all[x + 1..] {
                out.push((*m, *n));
            }
        }
        out
    }
}

impl fmt::Display for WBasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}", self.0)
    }
}

impl FromStr for WBasisIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t
            .strip_prefix('W')
            .or_else(|| t.strip_prefix('w'))
            .unwrap_or(t);
        let n: u8 = digits
            .parse()
            .map_err(|_| Error::BadLabel(format!("expected W1..W8, got {s:?}")))?;
        WBasisIndex::new(n)
    }
}

impl Serialize for WBasisIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.0)
    }
}

/// Weights of `√a|001⟩ + √b|010⟩ + √c|100⟩ + √d|000⟩`, with `d` derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WClassParams {
    a: f64,
    b: f64,
    c: f64,
}

impl WClassParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::BadParams(format!("{name} = {v} must be > 0")));
            }
        }
        if a + b + c > 1.0 + 1e-12 {
            return Err(Error::BadParams(format!(
                "a + b + c = {} exceeds 1",
                a + b + c
            )));
        }
        Ok(WClassParams { a, b, c })
    }

    /// The W point `a = b = c = 1/3`.
    pub fn w_point() -> Self {
        WClassParams {
            a: 1.0 / 3.0,
            b: 1.0 / 3.0,
            c: 1.0 / 3.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `1 − (a + b + c)`; rounding below zero is reported as zero.
    pub fn d(&self) -> f64 {
        (1.0 - (self.a + self.b + self.c)).max(0.0)
    }

    /// L1 distance of `(a, b, c, d)` from `(1/3, 1/3, 1/3, 0)`.
    pub fn distance_from_w_point(&self) -> f64 {
        let third = 1.0 / 3.0;
        (self.a - third).abs() + (self.b - third).abs() + (self.c - third).abs() + self.d()
    }
}

impl fmt::Display for WClassParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

fn parse_real(token: &str) -> Result<f64> {
    let t = token.trim();
    let value = match t.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| Error::BadParams(t.into()))?;
            let den: f64 = den.trim().parse().map_err(|_| Error::BadParams(t.into()))?;
            num / den
        }
        None => t.parse().map_err(|_| Error::BadParams(t.into()))?,
    };
    Ok(value)
}

impl FromStr for WClassParams {
    type Err = Error;

    /// Accepts `a,b,c` as decimals or simple fractions such as `1/3`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::BadParams(format!("expected a,b,c, got {s:?}")));
        }
        WClassParams::new(
            parse_real(parts[0])?,
            parse_real(parts[1])?,
            parse_real(parts[2])?,
        )
    }
}

pub fn ghz(label: GhzLabel) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let first = ((label.i as usize) << 1) | label.j as usize;
    let second = 0b100 | (!first & 0b11);
    let sign = if label.p == 0 { 1.0 } else { -1.0 };
    let mut amps = vec![c(0.0, 0.0); 8];
    amps[first] = c(h, 0.0);
    amps[second] = c(sign * h, 0.0);
    StateVector::new(amps).expect("GHZ amplitudes are normalized")
}

/// Signed basis terms of each W-basis state, as `(sign, bits)`.
const W_TERMS: [[(f64, usize); 3]; 8] = [
    [(1.0, 0b001), (1.0, 0b100), (1.0, 0b111)],
    [(1.0, 0b011), (1.0, 0b101), (1.0, 0b110)],
    [(1.0, 0b001), (-1.0, 0b100), (1.0, 0b010)],
    [(1.0, 0b011), (-1.0, 0b101), (1.0, 0b000)],
    [(1.0, 0b001), (-1.0, 0b010), (-1.0, 0b111)],
    [(1.0, 0b011), (-1.0, 0b000), (-1.0, 0b110)],
    [(1.0, 0b100), (-1.0, 0b111), (1.0, 0b010)],
    [(1.0, 0b101), (-1.0, 0b110), (1.0, 0b000)],
];

pub fn w_basis(n: WBasisIndex) -> StateVector {
    let norm = (1.0f64 / 3.0).sqrt();
    let mut amps: Vec<C64> = vec![c(0.0, 0.0); 8];
    for &(sign, bits) in &W_TERMS[(n.0 - 1) as usize] {
        amps[bits] += c(sign * norm, 0.0);
    }
    StateVector::new(amps).expect("W amplitudes are normalized")
}

pub fn w_class(params: WClassParams) -> StateVector {
    let mut amps = vec![c(0.0, 0.0); 8];
    amps[0b001] = c(params.a.sqrt(), 0.0);
    amps[0b010] = c(params.b.sqrt(), 0.0);
    amps[0b100] = c(params.c.sqrt(), 0.0);
    amps[0b000] = c(params.d().sqrt(), 0.0);
    StateVector::new(amps).expect("W-class amplitudes are normalized")
}

/// A catalog state named on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Ghz(GhzLabel),
    W(WBasisIndex),
    WClass(WClassParams),
}

impl StateSpec {
    pub fn state(&self) -> StateVector {
        match *self {
            StateSpec::Ghz(l) => ghz(l),
            StateSpec::W(n) => w_basis(n),
            StateSpec::WClass(p) => w_class(p),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    /// `W1`..`W8`, a GHZ bit triple `p,i,j`, or W-class weights `a,b,c`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with(['W', 'w']) {
            return Ok(StateSpec::W(t.parse()?));
        }
        if let Ok(label) = t.parse::<GhzLabel>() {
            return Ok(StateSpec::Ghz(label));
        }
        t.parse::<WClassParams>()
            .map(StateSpec::WClass)
            .map_err(|_| Error::BadLabel(format!("unrecognized state {s:?}")))
    }
}

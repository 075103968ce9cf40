//! Spatial mode and polarization labels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Spatial mode. `A`/`B` are the two emission directions of the source,
/// `C`..`F` the four detector modes behind the beam splitters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Mode {
    pub const ALL: [Mode; 6] = [Mode::A, Mode::B, Mode::C, Mode::D, Mode::E, Mode::F];

    /// Detector modes in the order the derived state is written.
    pub const DETECTORS: [Mode; 4] = [Mode::C, Mode::D, Mode::E, Mode::F];

    pub fn name(self) -> &'static str {
        match self {
            Mode::A => "a",
            Mode::B => "b",
            Mode::C => "c",
            Mode::D => "d",
            Mode::E => "e",
            Mode::F => "f",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode '{s}'")))
    }
}

/// Photon polarization. `H` is bit 0, `V` is bit 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn bit(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Polarization::H
        } else {
            Polarization::V
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

/// A single creation-operator label such as `a_H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub mode: Mode,
    pub pol: Polarization,
}

impl ModeLabel {
    pub const fn new(mode: Mode, pol: Polarization) -> Self {
        ModeLabel { mode, pol }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.mode, self.pol)
    }
}

/// Renders an outcome index over `n` qubits as an `H`/`V` string, first mode leftmost.
pub fn hv_label(index: usize, n: usize) -> String {
    (0..n)
        .map(|k| if (index >> (n - 1 - k)) & 1 == 0 { 'H' } else { 'V' })
        .collect()
}

/// Renders an outcome index as a `0`/`1` string, first mode leftmost.
pub fn bit_label(index: usize, n: usize) -> String {
    (0..n)
        .map(|k| if (index >> (n - 1 - k)) & 1 == 0 { '0' } else { '1' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_order_by_mode_then_polarization() {
        let a_v = ModeLabel::new(Mode::A, Polarization::V);
        let b_h = ModeLabel::new(Mode::B, Polarization::H);
        let a_h = ModeLabel::new(Mode::A, Polarization::H);
        let mut v = vec![b_h, a_v, a_h];
        v.sort();
        assert_eq!(v, vec![a_h, a_v, b_h]);
    }

    #[test]
    fn outcome_labels_put_first_mode_leftmost() {
        assert_eq!(hv_label(0b0011, 4), "HHVV");
        assert_eq!(bit_label(0b1000, 4), "1000");
    }

    #[test]
    fn parse_mode() {
        assert_eq!("E".parse::<Mode>().unwrap(), Mode::E);
        assert!("g".parse::<Mode>().is_err());
    }
}

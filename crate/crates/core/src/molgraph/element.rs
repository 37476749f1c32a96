use std::fmt;

use serde::{Deserialize, Serialize};

/// Elements of the organic subset plus the halogens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    B,
    C,
    N,
    O,
    P,
    S,
    F,
    Cl,
    Br,
    I,
}

pub const HYDROGEN_MASS: f64 = 1.008;

impl Element {
    pub const ALL: [Element; 10] = [
        Element::B,
        Element::C,
        Element::N,
        Element::O,
        Element::P,
        Element::S,
        Element::F,
        Element::Cl,
        Element::Br,
        Element::I,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::P => "P",
            Element::S => "S",
            Element::F => "F",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<Element> {
        Element::ALL.iter().copied().find(|e| e.symbol() == symbol)
    }

    pub fn default_valence(self) -> u8 {
        match self {
            Element::B | Element::N | Element::P => 3,
            Element::C => 4,
            Element::O | Element::S => 2,
            Element::F | Element::Cl | Element::Br | Element::I => 1,
        }
    }

    /// Standard atomic weight in unified atomic mass units.
    pub fn atomic_mass(self) -> f64 {
        match self {
            Element::B => 10.81,
            Element::C => 12.011,
            Element::N => 14.007,
            Element::O => 15.999,
            Element::P => 30.974,
            Element::S => 32.06,
            Element::F => 18.998,
            Element::Cl => 35.45,
            Element::Br => 79.904,
            Element::I => 126.904,
        }
    }

    pub fn is_halogen(self) -> bool {
        matches!(self, Element::F | Element::Cl | Element::Br | Element::I)
    }

    /// Valence after formal-charge adjustment.
    ///
    /// Pnictogens and chalcogens gain a bond per positive charge (N⁺, O⁺)
    /// and lose one per negative charge (O⁻). Carbon and the halogens lose one
    /// either way; boron behaves as its isoelectronic neighbour (B⁻ is
    /// tetravalent).
    pub fn adjusted_valence(self, charge: i8) -> i32 {
        let base = self.default_valence() as i32;
        let q = charge as i32;
        match self {
            Element::N | Element::P | Element::O | Element::S => base + q,
            Element::B => base - q,
            Element::C | Element::F | Element::Cl | Element::Br | Element::I => base - q.abs(),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

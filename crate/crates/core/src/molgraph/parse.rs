use std::collections::BTreeMap;
use std::io::BufRead;

use super::kekulize::{kekulize, ParsedAtom, ParsedBond, RawOrder};
use super::{syntax, Element, MolError, MolecularGraph};

/// Parses an organic-subset SMILES string into a kekulized graph.
///
/// Stereo markers (`@`, `@@`, `/`, `\`) are accepted and dropped. Dot
/// separated fragments are rejected with [`MolError::Disconnected`].
pub fn parse_smiles(text: &str) -> Result<MolecularGraph, MolError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(syntax(0, "empty SMILES"));
    }
    if !text.is_ascii() {
        return Err(syntax(0, "non-ASCII input"));
    }
    let (atoms, bonds) = Parser::new(text.as_bytes()).run()?;
    let (atoms, bonds) = kekulize(&atoms, &bonds)?;
    MolecularGraph::new(atoms, bonds)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    atoms: Vec<ParsedAtom>,
    bonds: Vec<ParsedBond>,
    prev: Option<usize>,
    branches: Vec<usize>,
    pending: Option<(RawOrder, usize)>,
    rings: BTreeMap<u32, (usize, Option<RawOrder>, usize)>,
}

impl<'a> Parser<'a> {
    fn new(s: &'a [u8]) -> Self {
        Parser {
            s,
            pos: 0,
            atoms: Vec::new(),
            bonds: Vec::new(),
            prev: None,
            branches: Vec::new(),
            pending: None,
            rings: BTreeMap::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn run(mut self) -> Result<(Vec<ParsedAtom>, Vec<ParsedBond>), MolError> {
        while let Some(c) = self.peek() {
            match c {
                b'(' => {
                    let prev = self
                        .prev
                        .ok_or_else(|| syntax(self.pos, "branch before any atom"))?;
                    if self.pending.is_some() {
                        return Err(syntax(self.pos, "bond symbol before '('"));
                    }
                    self.branches.push(prev);
                    self.pos += 1;
                }
                b')' => {
                    if self.pending.is_some() {
                        return Err(syntax(self.pos, "dangling bond before ')'"));
                    }
                    let back = self
                        .branches
                        .pop()
                        .ok_or_else(|| syntax(self.pos, "unmatched ')'"))?;
                    self.prev = Some(back);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.pending.is_some() {
                        return Err(syntax(self.pos, "consecutive bond symbols"));
                    }
                    let order = match c {
                        b'-' => RawOrder::Single,
                        b'=' => RawOrder::Double,
                        b'#' => RawOrder::Triple,
                        b':' => RawOrder::Aromatic,
                        _ => RawOrder::Unspecified,
                    };
                    self.pending = Some((order, self.pos));
                    self.pos += 1;
                }
                b'$' => return Err(syntax(self.pos, "quadruple bonds are not supported")),
                b'.' => return Err(MolError::Disconnected),
                b'0'..=b'9' => {
                    let digit = (c - b'0') as u32;
                    self.pos += 1;
                    self.ring_closure(digit)?;
                }
                b'%' => {
                    let start = self.pos;
                    let d = self.s.get(self.pos + 1..self.pos + 3).unwrap_or(&[]);
                    if d.len() != 2 || !d.iter().all(u8::is_ascii_digit) {
                        return Err(syntax(start, "'%' must be followed by two digits"));
                    }
                    let digit = ((d[0] - b'0') * 10 + (d[1] - b'0')) as u32;
                    self.pos += 3;
                    self.ring_closure(digit)?;
                }
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.add_atom(atom)?;
                }
                _ => {
                    let atom = self.organic_atom()?;
                    self.add_atom(atom)?;
                }
            }
        }
        if let Some((_, p)) = self.pending {
            return Err(syntax(p, "dangling bond at end of input"));
        }
        if !self.branches.is_empty() {
            return Err(syntax(self.s.len(), "unmatched '('"));
        }
        if let Some((digit, &(_, _, p))) = self.rings.iter().next() {
            return Err(syntax(p, format!("unclosed ring bond {digit}")));
        }
        if self.atoms.is_empty() {
            return Err(syntax(0, "no atoms"));
        }
        Ok((self.atoms, self.bonds))
    }

    fn add_atom(&mut self, atom: ParsedAtom) -> Result<(), MolError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        if let Some(prev) = self.prev {
            let order = self
                .pending
                .take()
                .map(|(o, _)| o)
                .unwrap_or(RawOrder::Unspecified);
            self.bonds.push(ParsedBond {
                a: prev,
                b: idx,
                order,
            });
        } else if let Some((_, p)) = self.pending {
            return Err(syntax(p, "bond symbol before first atom"));
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn ring_closure(&mut self, digit: u32) -> Result<(), MolError> {
        let here = self.pos - 1;
        let atom = self
            .prev
            .ok_or_else(|| syntax(here, "ring closure before any atom"))?;
        let order = self.pending.take().map(|(o, _)| o);
        match self.rings.remove(&digit) {
            None => {
                self.rings.insert(digit, (atom, order, here));
            }
            Some((open, open_order, _)) => {
                if open == atom {
                    return Err(syntax(here, "ring closure to the same atom"));
                }
                let resolved = match (open_order, order) {
                    (Some(a), Some(b))
                        if a != b && a != RawOrder::Unspecified && b != RawOrder::Unspecified =>
                    {
                        return Err(syntax(here, "conflicting ring-closure bond symbols"));
                    }
                    (Some(a), Some(b)) => {
                        if a == RawOrder::Unspecified {
                            b
                        } else {
                            a
                        }
                    }
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => RawOrder::Unspecified,
                };
                let duplicate = self
                    .bonds
                    .iter()
                    .any(|b| (b.a == open && b.b == atom) || (b.a == atom && b.b == open));
                if duplicate {
                    return Err(syntax(here, "ring closure duplicates an existing bond"));
                }
                self.bonds.push(ParsedBond {
                    a: open,
                    b: atom,
                    order: resolved,
                });
            }
        }
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<ParsedAtom, MolError> {
        let start = self.pos;
        let c = self.s[self.pos];
        let two = self.s.get(self.pos..self.pos + 2);
        let (element, aromatic, len) = match (c, two) {
            (b'C', Some(b"Cl")) => (Element::Cl, false, 2),
            (b'B', Some(b"Br")) => (Element::Br, false, 2),
            (b'B', _) => (Element::B, false, 1),
            (b'C', _) => (Element::C, false, 1),
            (b'N', _) => (Element::N, false, 1),
            (b'O', _) => (Element::O, false, 1),
            (b'P', _) => (Element::P, false, 1),
            (b'S', _) => (Element::S, false, 1),
            (b'F', _) => (Element::F, false, 1),
            (b'I', _) => (Element::I, false, 1),
            (b'b', _) => (Element::B, true, 1),
            (b'c', _) => (Element::C, true, 1),
            (b'n', _) => (Element::N, true, 1),
            (b'o', _) => (Element::O, true, 1),
            (b'p', _) => (Element::P, true, 1),
            (b's', _) => (Element::S, true, 1),
            _ => {
                return Err(syntax(
                    start,
                    format!("unexpected character '{}'", c as char),
                ))
            }
        };
        self.pos += len;
        Ok(ParsedAtom {
            element,
            charge: 0,
            hcount: None,
            aromatic,
        })
    }

    fn bracket_atom(&mut self) -> Result<ParsedAtom, MolError> {
        let start = self.pos;
        let close = self.s[start..]
            .iter()
            .position(|&b| b == b']')
            .map(|k| start + k)
            .ok_or_else(|| syntax(start, "unclosed '['"))?;
        let body = &self.s[start + 1..close];
        self.pos = close + 1;
        let mut k = 0;

        if body.first().is_some_and(u8::is_ascii_digit) {
            return Err(syntax(start + 1, "isotopes are not supported"));
        }
        let letters: Vec<u8> = body
            .iter()
            .take_while(|b| b.is_ascii_alphabetic())
            .copied()
            .collect();
        // Longest element symbol first, leaving a trailing 'H' for the count.
        let (element, aromatic, sym_len) = {
            let two = std::str::from_utf8(&letters[..letters.len().min(2)]).unwrap_or("");
            let one = std::str::from_utf8(&letters[..letters.len().min(1)]).unwrap_or("");
            if two.len() == 2 && Element::from_symbol(two).is_some() && two != "HH" {
                (Element::from_symbol(two).unwrap(), false, 2)
            } else if let Some(e) = Element::from_symbol(one) {
                (e, false, 1)
            } else {
                match one {
                    "b" => (Element::B, true, 1),
                    "c" => (Element::C, true, 1),
                    "n" => (Element::N, true, 1),
                    "o" => (Element::O, true, 1),
                    "p" => (Element::P, true, 1),
                    "s" => (Element::S, true, 1),
                    _ => {
                        return Err(syntax(
                            start + 1,
                            format!(
                                "unknown element in bracket atom '{}'",
                                String::from_utf8_lossy(body)
                            ),
                        ))
                    }
                }
            }
        };
        k += sym_len;

        while body.get(k) == Some(&b'@') {
            k += 1;
        }
        // @TH1, @SP2, ... chirality classes
        if k > sym_len
            && body
                .get(k)
                .is_some_and(|b| b.is_ascii_uppercase() && *b != b'H')
        {
            while body.get(k).is_some_and(u8::is_ascii_alphanumeric) {
                k += 1;
            }
        }

        let mut hcount = 0u8;
        if body.get(k) == Some(&b'H') {
            k += 1;
            hcount = 1;
            if let Some(d) = body.get(k).filter(|b| b.is_ascii_digit()) {
                hcount = d - b'0';
                k += 1;
            }
        }

        let mut charge: i32 = 0;
        if let Some(&sign) = body.get(k).filter(|b| **b == b'+' || **b == b'-') {
            let unit = if sign == b'+' { 1 } else { -1 };
            k += 1;
            charge = unit;
            if let Some(d) = body.get(k).filter(|b| b.is_ascii_digit()) {
                charge = unit * (d - b'0') as i32;
                k += 1;
            } else {
                while body.get(k) == Some(&sign) {
                    charge += unit;
                    k += 1;
                }
            }
        }
        if body.get(k) == Some(&b':') {
            k += 1;
            while body.get(k).is_some_and(u8::is_ascii_digit) {
                k += 1;
            }
        }
        if k != body.len() {
            return Err(syntax(start + 1 + k, "unexpected bracket-atom content"));
        }
        if !(-1..=1).contains(&charge) {
            return Err(MolError::UnsupportedCharge {
                atom: self.atoms.len(),
                charge: charge.clamp(-128, 127) as i8,
            });
        }
        Ok(ParsedAtom {
            element,
            charge: charge as i8,
            hcount: Some(hcount),
            aromatic,
        })
    }
}

/// One non-comment line of a SMILES-per-line file.
#[derive(Debug, Clone)]
pub struct SmilesLine {
    pub line_number: usize,
    pub text: String,
    pub parsed: Result<MolecularGraph, MolError>,
}

/// Reads SMILES one per line, skipping blank and `#` comment lines. Only the
/// first whitespace-separated token on a line is used, so trailing names or
/// ids are allowed.
pub fn read_smiles_lines<R: BufRead>(reader: R) -> std::io::Result<Vec<SmilesLine>> {
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let token = trimmed.split_whitespace().next().unwrap_or("");
        out.push(SmilesLine {
            line_number: k + 1,
            text: token.to_string(),
            parsed: parse_smiles(token),
        });
    }
    Ok(out)
}

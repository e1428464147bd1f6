use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CurveError;

/// A letter over the free basis `{x, y}`. Written `x X y Y` (capital = inverse).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X,
    XInv,
    Y,
    YInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::X, Letter::XInv, Letter::Y, Letter::YInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::X => Letter::XInv,
            Letter::XInv => Letter::X,
            Letter::Y => Letter::YInv,
            Letter::YInv => Letter::Y,
        }
    }

    pub fn is_inverse(self) -> bool {
        matches!(self, Letter::XInv | Letter::YInv)
    }

    /// Generator index: 0 for x, 1 for y.
    pub fn generator(self) -> usize {
        match self {
            Letter::X | Letter::XInv => 0,
            Letter::Y | Letter::YInv => 1,
        }
    }

    pub fn from_generator(index: usize, inverse: bool) -> Letter {
        match (index, inverse) {
            (0, false) => Letter::X,
            (0, true) => Letter::XInv,
            (1, false) => Letter::Y,
            (1, true) => Letter::YInv,
            _ => panic!("generator index {index} out of range"),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::XInv => 'X',
            Letter::Y => 'y',
            Letter::YInv => 'Y',
        }
    }
}

/// Freely reduced word in the free group `F(x, y)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn x() -> Self {
        FreeWord { letters: vec![Letter::X] }
    }

    pub fn y() -> Self {
        FreeWord { letters: vec![Letter::Y] }
    }

    /// `z = (xy)^-1`, the loop around the third puncture.
    pub fn z() -> Self {
        FreeWord { letters: vec![Letter::YInv, Letter::XInv] }
    }

    pub fn letter(l: Letter) -> Self {
        FreeWord { letters: vec![l] }
    }

    pub fn from_letters<It: IntoIterator<Item = Letter>>(letters: It) -> Self {
        let mut w = FreeWord::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// Append a letter, cancelling against the tail.
    pub fn push(&mut self, l: Letter) {
        if self.letters.last() == Some(&l.inverse()) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.clone();
        out.append(other);
        out
    }

    pub fn append(&mut self, other: &FreeWord) {
        for &l in &other.letters {
            self.push(l);
        }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn pow(&self, n: i64) -> FreeWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..n.unsigned_abs() {
            out.append(&base);
        }
        out
    }

    /// `g^-1 · self · g`.
    pub fn conjugate_by(&self, g: &FreeWord) -> FreeWord {
        g.inverse().mul(self).mul(g)
    }

    /// Replace each generator by a word (a homomorphism `F2 -> F2`).
    pub fn substitute(&self, x_image: &FreeWord, y_image: &FreeWord) -> FreeWord {
        let images = [x_image.clone(), y_image.clone(), x_image.inverse(), y_image.inverse()];
        let mut out = FreeWord::identity();
        for &l in &self.letters {
            let idx = l.generator() + if l.is_inverse() { 2 } else { 0 };
            out.append(&images[idx]);
        }
        out
    }

    /// Cyclically reduced core and the conjugator: `self = c^-1 · core · c`.
    pub fn cyclic_reduction(&self) -> (FreeWord, FreeWord) {
        let l = &self.letters;
        let mut i = 0;
        while i < l.len() / 2 && l[i] == l[l.len() - 1 - i].inverse() {
            i += 1;
        }
        let core = FreeWord { letters: l[i..l.len() - i].to_vec() };
        let conj = FreeWord { letters: l[l.len() - i..].to_vec() };
        (core, conj)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for FreeWord {
    type Err = CurveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(FreeWord::identity());
        }
        let mut w = FreeWord::identity();
        for c in s.chars() {
            let l = match c {
                'x' => Letter::X,
                'X' => Letter::XInv,
                'y' => Letter::Y,
                'Y' => Letter::YInv,
                other => return Err(CurveError::Parse(format!("unexpected letter `{other}` in word"))),
            };
            w.push(l);
        }
        Ok(w)
    }
}

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FreeWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

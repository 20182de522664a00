//! Substitutions on the alphabet `{1, .., n}`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::IntMatrix;

/// Letters are 1-based.
pub type Letter = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstitutionError {
    #[error("alphabet must have at least 2 letters, got {0}")]
    TooFewLetters(usize),
    #[error("image of letter {0} is empty")]
    EmptyImage(Letter),
    #[error("image of letter {letter} contains {found}, outside 1..={n}")]
    LetterOutOfRange {
        letter: Letter,
        found: Letter,
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected `<letter>: <image>`")]
    Syntax,
    #[error("invalid letter `{0}`")]
    BadLetter(String),
    #[error("letter {found} defined again (expected {expected})")]
    Duplicate { found: Letter, expected: Letter },
    #[error("expected letter {expected}, found {found}")]
    Gap { found: Letter, expected: Letter },
    #[error("empty image")]
    EmptyImage,
    #[error("letter {found} outside 1..={n}")]
    OutOfRange { found: Letter, n: usize },
    #[error("need at least 2 letters")]
    TooFewLetters,
}

/// `images[j]` is the word `φ(j + 1)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Letter>>", into = "Vec<Vec<Letter>>")]
pub struct Substitution {
    images: Vec<Vec<Letter>>,
}

impl Substitution {
    pub fn new(images: Vec<Vec<Letter>>) -> Result<Self, SubstitutionError> {
        let n = images.len();
        if n < 2 {
            return Err(SubstitutionError::TooFewLetters(n));
        }
        for (j, img) in images.iter().enumerate() {
            let letter = j as Letter + 1;
            if img.is_empty() {
                return Err(SubstitutionError::EmptyImage(letter));
            }
            if let Some(&found) = img.iter().find(|&&l| l == 0 || l as usize > n) {
                return Err(SubstitutionError::LetterOutOfRange { letter, found, n });
            }
        }
        Ok(Self { images })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, letter: Letter) -> &[Letter] {
        &self.images[letter as usize - 1]
    }

    pub fn images(&self) -> &[Vec<Letter>] {
        &self.images
    }

    /// Image of a word: the concatenation of the images of its letters.
    pub fn apply(&self, word: &[Letter]) -> Vec<Letter> {
        let len = word.iter().map(|&l| self.image(l).len()).sum();
        let mut out = Vec::with_capacity(len);
        for &l in word {
            out.extend_from_slice(self.image(l));
        }
        out
    }

    /// Length of `apply(word)` without building it.
    pub fn image_len(&self, word: &[Letter]) -> usize {
        word.iter().map(|&l| self.image(l).len()).sum()
    }

    /// `M(i, j)` counts the letter `i + 1` in `φ(j + 1)`; columns are the
    /// abelianized images.
    pub fn abelianization(&self) -> IntMatrix {
        let n = self.n();
        let mut flat = vec![0u64; n * n];
        for (j, img) in self.images.iter().enumerate() {
            for &l in img {
                flat[(l as usize - 1) * n + j] += 1;
            }
        }
        IntMatrix::from_flat(n, flat).expect("n >= 2")
    }

    /// Conjugates by a relabeling: the result maps `π(a)` to `π(φ(a))`.
    /// `perm[a - 1]` is `π(a)`.
    pub fn relabel(&self, perm: &[Letter]) -> Self {
        let n = self.n();
        assert_eq!(perm.len(), n);
        let mut images = vec![Vec::new(); n];
        for (j, img) in self.images.iter().enumerate() {
            images[perm[j] as usize - 1] = img.iter().map(|&l| perm[l as usize - 1]).collect();
        }
        Self { images }
    }

    /// Parses one `i: l1 l2 .. lk` line per letter, in order from 1.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut images: Vec<Vec<Letter>> = Vec::new();
        let lines: Vec<&str> = text
            .strip_suffix('\n')
            .unwrap_or(text)
            .split('\n')
            .collect();
        let lines: &[&str] = if text.is_empty() { &[] } else { &lines };
        let err = |line: usize, kind| ParseError { line, kind };
        for (idx, raw) in lines.iter().enumerate() {
            let line_no = idx + 1;
            let expected = line_no as Letter;
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            let (label, image) = raw
                .split_once(':')
                .ok_or(err(line_no, ParseErrorKind::Syntax))?;
            let label = parse_letter(label.trim()).map_err(|k| err(line_no, k))?;
            if label < expected {
                return Err(err(
                    line_no,
                    ParseErrorKind::Duplicate {
                        found: label,
                        expected,
                    },
                ));
            }
            if label > expected {
                return Err(err(
                    line_no,
                    ParseErrorKind::Gap {
                        found: label,
                        expected,
                    },
                ));
            }
            let word = image
                .split_whitespace()
                .map(parse_letter)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|k| err(line_no, k))?;
            if word.is_empty() {
                return Err(err(line_no, ParseErrorKind::EmptyImage));
            }
            images.push(word);
        }
        let n = images.len();
        if n < 2 {
            return Err(err(n.max(1), ParseErrorKind::TooFewLetters));
        }
        for (idx, word) in images.iter().enumerate() {
            if let Some(&found) = word.iter().find(|&&l| l as usize > n) {
                return Err(err(idx + 1, ParseErrorKind::OutOfRange { found, n }));
            }
        }
        Ok(Self { images })
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn parse_letter(s: &str) -> Result<Letter, ParseErrorKind> {
    match s.parse::<Letter>() {
        Ok(l) if l >= 1 => Ok(l),
        _ => Err(ParseErrorKind::BadLetter(s.to_string())),
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, img) in self.images.iter().enumerate() {
            write!(f, "{}:", j + 1)?;
            for l in img {
                write!(f, " {l}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(j, img)| {
                let w: Vec<String> = img.iter().map(Letter::to_string).collect();
                format!("{}->{}", j + 1, w.join(" "))
            })
            .collect();
        write!(f, "Substitution({})", parts.join(", "))
    }
}

impl TryFrom<Vec<Vec<Letter>>> for Substitution {
    type Error = SubstitutionError;
    fn try_from(images: Vec<Vec<Letter>>) -> Result<Self, Self::Error> {
        Self::new(images)
    }
}

impl From<Substitution> for Vec<Vec<Letter>> {
    fn from(s: Substitution) -> Self {
        s.images
    }
}

/// Letter counts of a word: `counts[i]` is the number of occurrences of `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianVector {
    pub counts: Vec<u64>,
}

impl AbelianVector {
    pub fn of(word: &[Letter], n: usize) -> Self {
        let mut counts = vec![0; n];
        for &l in word {
            counts[l as usize - 1] += 1;
        }
        Self { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

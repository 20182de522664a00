//! Strong coincidence checking.
//!
//! Letters `a != b` coincide at level `n` when some position `k` has
//! `φⁿ(a)_k = φⁿ(b)_k` and the prefixes before `k` have the same
//! abelianization. Equal abelianizations imply equal lengths, so only
//! aligned positions need comparing, and one running difference vector
//! covers the whole scan.
//!
//! The check only terminates on its own when every pair coincides, so it
//! runs under an iteration cap and a cap on stored word length.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::subst::{Letter, Substitution};

pub const DEFAULT_MAX_ITER: u32 = 20;
pub const DEFAULT_MAX_WORD_LENGTH: usize = 10_000_000;

/// Unordered pair of distinct letters, stored with `.0 < .1`.
///
/// Serializes as the string `"a,b"` so that it can key JSON maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair(pub Letter, pub Letter);

impl Serialize for Pair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.key())
    }
}

impl<'de> Deserialize<'de> for Pair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid letter pair `{s}`");
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let a: Letter = a.trim().parse().map_err(|_| bad())?;
        let b: Letter = b.trim().parse().map_err(|_| bad())?;
        if a == 0 || a >= b {
            return Err(bad());
        }
        Ok(Pair(a, b))
    }
}

impl Pair {
    pub fn new(a: Letter, b: Letter) -> Self {
        assert_ne!(a, b, "pairs are of distinct letters");
        if a < b {
            Pair(a, b)
        } else {
            Pair(b, a)
        }
    }

    /// `"a,b"`, the key used in result files.
    pub fn key(&self) -> String {
        format!("{},{}", self.0, self.1)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoincidenceStatus {
    AllPairsCoincident,
    LimitReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitReason {
    IterationCap,
    WordLengthCap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceResult {
    pub status: CoincidenceStatus,
    /// Least coinciding level of each resolved pair.
    pub pair_levels: BTreeMap<Pair, u32>,
    pub limit_reason: Option<LimitReason>,
    pub pending_pairs: Vec<Pair>,
}

impl CoincidenceResult {
    pub fn is_coincident(&self) -> bool {
        self.status == CoincidenceStatus::AllPairsCoincident
    }

    pub fn max_level(&self) -> Option<u32> {
        self.pair_levels.values().copied().max()
    }
}

/// Expands `φⁿ(a)` level by level for the letters of pending pairs and
/// records the first level at which each pair coincides.
pub fn strong_coincidence(
    phi: &Substitution,
    max_iter: u32,
    max_word_length: usize,
) -> CoincidenceResult {
    let n = phi.n();
    let mut pending: Vec<Pair> = (1..=n as Letter)
        .flat_map(|a| (a + 1..=n as Letter).map(move |b| Pair(a, b)))
        .collect();
    let mut pair_levels = BTreeMap::new();
    let mut words: Vec<Vec<Letter>> = (1..=n as Letter).map(|a| vec![a]).collect();
    let mut scan = Scanner::new(n);
    let mut needed = vec![false; n];

    for level in 1..=max_iter {
        needed.iter_mut().for_each(|x| *x = false);
        for p in &pending {
            needed[p.0 as usize - 1] = true;
            needed[p.1 as usize - 1] = true;
        }
        let too_long = (0..n).any(|a| needed[a] && phi.image_len(&words[a]) > max_word_length);
        if too_long {
            return limited(pair_levels, pending, LimitReason::WordLengthCap);
        }
        for (a, word) in words.iter_mut().enumerate() {
            *word = if needed[a] {
                phi.apply(word)
            } else {
                Vec::new()
            };
        }
        pending.retain(|p| {
            let hit = scan.coincide(&words[p.0 as usize - 1], &words[p.1 as usize - 1]);
            if hit {
                pair_levels.insert(*p, level);
            }
            !hit
        });
        if pending.is_empty() {
            return CoincidenceResult {
                status: CoincidenceStatus::AllPairsCoincident,
                pair_levels,
                limit_reason: None,
                pending_pairs: Vec::new(),
            };
        }
    }
    limited(pair_levels, pending, LimitReason::IterationCap)
}

fn limited(
    pair_levels: BTreeMap<Pair, u32>,
    pending: Vec<Pair>,
    reason: LimitReason,
) -> CoincidenceResult {
    CoincidenceResult {
        status: CoincidenceStatus::LimitReached,
        pair_levels,
        limit_reason: Some(reason),
        pending_pairs: pending,
    }
}

/// Running prefix difference `ab(u_{<k}) - ab(v_{<k})` with a count of its
/// nonzero coordinates.
struct Scanner {
    delta: Vec<i64>,
    nonzero: usize,
}

impl Scanner {
    fn new(n: usize) -> Self {
        Self {
            delta: vec![0; n],
            nonzero: 0,
        }
    }

    fn bump(&mut self, letter: Letter, by: i64) {
        let d = &mut self.delta[letter as usize - 1];
        let before = *d;
        *d += by;
        match (before == 0, *d == 0) {
            (true, false) => self.nonzero += 1,
            (false, true) => self.nonzero -= 1,
            _ => {}
        }
    }

    fn coincide(&mut self, u: &[Letter], v: &[Letter]) -> bool {
        self.delta.iter_mut().for_each(|d| *d = 0);
        self.nonzero = 0;
        for (&x, &y) in u.iter().zip(v) {
            if x == y {
                if self.nonzero == 0 {
                    return true;
                }
            } else {
                self.bump(x, 1);
                self.bump(y, -1);
            }
        }
        false
    }
}

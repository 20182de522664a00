use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SearchConfig;
use crate::coincidence::CoincidenceResult;
use crate::matrix::IntMatrix;
use crate::sieve::RejectReason;
use crate::subst::Substitution;

/// Histogram key for matrices whose characteristic polynomial overflowed.
pub const OVERFLOW_TAG: &str = "OverflowDetected";

/// A substitution whose check hit a limit: a possible counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub matrix_index: u64,
    pub sample_index: u64,
    pub matrix: IntMatrix,
    pub substitution: Substitution,
    pub result: CoincidenceResult,
}

/// Counters accumulated over a prefix of the index range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub matrices_tested: u64,
    pub matrices_accepted: u64,
    /// One count per failed condition, so a matrix may add to several keys.
    pub rejection_histogram: BTreeMap<String, u64>,
    pub substitutions_checked: u64,
    pub coincident_count: u64,
    pub limit_reached_count: u64,
    /// Distribution of the largest pair level over coincident substitutions.
    pub level_histogram: BTreeMap<u32, u64>,
    pub candidates: Vec<Candidate>,
}

impl Default for Tally {
    fn default() -> Self {
        let rejection_histogram = RejectReason::ALL
            .iter()
            .map(|r| r.as_str())
            .chain([OVERFLOW_TAG])
            .map(|k| (k.to_string(), 0))
            .collect();
        Self {
            matrices_tested: 0,
            matrices_accepted: 0,
            rejection_histogram,
            substitutions_checked: 0,
            coincident_count: 0,
            limit_reached_count: 0,
            level_histogram: BTreeMap::new(),
            candidates: Vec::new(),
        }
    }
}

impl Tally {
    pub(crate) fn add_rejections(&mut self, tag: &str, count: u64) {
        if let Some(v) = self.rejection_histogram.get_mut(tag) {
            *v += count;
        } else {
            self.rejection_histogram.insert(tag.to_string(), count);
        }
    }

    /// Adds `other`, which must cover a later index range.
    pub(crate) fn absorb(&mut self, other: Tally) {
        self.matrices_tested += other.matrices_tested;
        self.matrices_accepted += other.matrices_accepted;
        for (k, v) in other.rejection_histogram {
            *self.rejection_histogram.entry(k).or_default() += v;
        }
        self.substitutions_checked += other.substitutions_checked;
        self.coincident_count += other.coincident_count;
        self.limit_reached_count += other.limit_reached_count;
        for (k, v) in other.level_histogram {
            *self.level_histogram.entry(k).or_default() += v;
        }
        self.candidates.extend(other.candidates);
    }

    pub fn is_consistent(&self) -> bool {
        self.coincident_count + self.limit_reached_count == self.substitutions_checked
            && self.matrices_accepted <= self.matrices_tested
            && self.candidates.len() as u64 == self.limit_reached_count
            && self.level_histogram.values().sum::<u64>() == self.coincident_count
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub config: SearchConfig,
    pub tally: Tally,
    /// False when the run stopped before exhausting the budget.
    pub complete: bool,
    pub duration_secs: f64,
}

impl SearchReport {
    pub fn acceptance_rate(&self) -> f64 {
        if self.tally.matrices_tested == 0 {
            0.0
        } else {
            self.tally.matrices_accepted as f64 / self.tally.matrices_tested as f64
        }
    }

    /// JSON with the wall-clock field zeroed, for comparing runs.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.duration_secs = 0.0;
        // workers never affects the results
        r.config.workers = 1;
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Multi-line human summary.
    pub fn summary(&self) -> String {
        let t = &self.tally;
        let mut s = String::new();
        s += &format!("matrices tested:       {}\n", t.matrices_tested);
        s += &format!("matrices accepted:     {}\n", t.matrices_accepted);
        s += &format!("acceptance rate:       {:.3e}\n", self.acceptance_rate());
        s += "rejections:\n";
        for (k, v) in &t.rejection_histogram {
            s += &format!("  {k:<18} {v}\n");
        }
        if self.config.samples_per_matrix > 0 || t.substitutions_checked > 0 {
            s += &format!("substitutions checked: {}\n", t.substitutions_checked);
            s += &format!("strongly coincident:   {}\n", t.coincident_count);
            s += &format!("limit reached:         {}\n", t.limit_reached_count);
        }
        if !self.complete {
            s += "run incomplete (resume from checkpoint)\n";
        }
        s
    }
}

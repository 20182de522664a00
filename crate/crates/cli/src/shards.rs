//! Aggregation of result files produced by independent runs.

use std::collections::BTreeSet;
use std::path::Path;

use pisot_search::pipeline::{read_jsonl, ResultRecord, ResultStatus};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShardTotals {
    pub files: usize,
    /// Distinct matrix indices, counted per file.
    pub matrices: u64,
    pub substitutions: u64,
    pub coincident: u64,
    pub pending: u64,
}

impl ShardTotals {
    pub fn add_file(&mut self, records: &[ResultRecord]) {
        let matrices: BTreeSet<u64> = records.iter().map(|r| r.matrix_index).collect();
        self.files += 1;
        self.matrices += matrices.len() as u64;
        self.substitutions += records.len() as u64;
        for r in records {
            match r.status {
                ResultStatus::Coincident => self.coincident += 1,
                ResultStatus::Limit => self.pending += 1,
            }
        }
    }

    pub fn from_paths<P: AsRef<Path>>(paths: &[P]) -> std::io::Result<Self> {
        let mut totals = Self::default();
        for p in paths {
            totals.add_file(&read_jsonl::<ResultRecord>(p.as_ref())?);
        }
        Ok(totals)
    }

    pub fn render(&self) -> String {
        format!(
            "result files:          {}\nmatrices:              {}\nsubstitutions checked: {}\nstrongly coincident:   {}\npending:               {}\n",
            self.files, self.matrices, self.substitutions, self.coincident, self.pending
        )
    }
}

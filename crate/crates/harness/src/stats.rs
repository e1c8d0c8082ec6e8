//! Histograms of legal-list length and chosen index over logged decisions.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Serialize;

use guandan::log::{read_lines, LogLine, PASS_KIND};
use guandan::Seat;

use crate::error::Result;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ActionStats {
    /// Legal-list length -> decisions.
    pub lengths: BTreeMap<usize, usize>,
    /// Chosen index -> decisions.
    pub selected: BTreeMap<usize, usize>,
    pub decisions: usize,
    /// Lines that were not valid log records.
    pub skipped: usize,
}

impl ActionStats {
    /// Adds one step line. Steps whose only option was to pass are ignored,
    /// as are seats outside `seats` when given.
    pub fn add(&mut self, line: &LogLine, seats: Option<&[Seat]>) {
        let LogLine::Step(step) = line else {
            return;
        };
        if seats.is_some_and(|s| !s.contains(&step.seat)) {
            return;
        }
        if step.legal_count <= 1 && step.action_kind == PASS_KIND {
            return;
        }
        *self.lengths.entry(step.legal_count).or_default() += 1;
        *self.selected.entry(step.chosen_index).or_default() += 1;
        self.decisions += 1;
    }

    pub fn max_length(&self) -> Option<usize> {
        self.lengths.keys().next_back().copied()
    }

    pub fn lengths_csv(&self) -> String {
        histogram_csv(&self.lengths)
    }

    pub fn selected_csv(&self) -> String {
        histogram_csv(&self.selected)
    }
}

pub fn histogram_csv(hist: &BTreeMap<usize, usize>) -> String {
    let mut out = String::from("bin,count\n");
    for (bin, count) in hist {
        out.push_str(&format!("{bin},{count}\n"));
    }
    out
}

pub fn collect_action_stats<'a>(lines: impl IntoIterator<Item = &'a LogLine>, seats: Option<&[Seat]>) -> ActionStats {
    let mut stats = ActionStats::default();
    for line in lines {
        stats.add(line, seats);
    }
    stats
}

/// Every `*.jsonl` file directly under `dir`, sorted by name.
pub fn log_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

/// Reads game logs, counting unparseable lines in `skipped`.
pub fn collect_from_files(paths: &[PathBuf], seats: Option<&[Seat]>) -> Result<ActionStats> {
    let mut stats = ActionStats::default();
    for path in paths {
        let (lines, skipped) = read_lines(BufReader::new(File::open(path)?))?;
        stats.skipped += skipped;
        for line in &lines {
            stats.add(line, seats);
        }
    }
    Ok(stats)
}

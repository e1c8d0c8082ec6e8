//! Writing game and decision logs for a finished series.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use guandan::log::write_deal;

use crate::error::Result;
use crate::series::GameOutcome;

pub fn game_log_path(dir: &Path, game: usize) -> PathBuf {
    dir.join(format!("game_{game:04}.jsonl"))
}

pub fn decision_log_path(dir: &Path, game: usize) -> PathBuf {
    dir.join(format!("decisions_{game:04}.jsonl"))
}

/// One step log per game and, when the game had model-driven seats, one
/// decision log. Returns the files written.
pub fn write_outcomes(dir: &Path, outcomes: &[GameOutcome]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for outcome in outcomes {
        let path = game_log_path(dir, outcome.game);
        let mut out = BufWriter::new(File::create(&path)?);
        for deal in &outcome.record.deals {
            write_deal(&mut out, deal)?;
        }
        out.flush()?;
        written.push(path);
        if !outcome.decisions.is_empty() {
            let path = decision_log_path(dir, outcome.game);
            let mut out = BufWriter::new(File::create(&path)?);
            for line in &outcome.decisions {
                serde_json::to_writer(&mut out, line).map_err(std::io::Error::other)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
            written.push(path);
        }
    }
    Ok(written)
}

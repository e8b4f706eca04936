//! PASS/FAIL bookkeeping for the acceptance run.

use std::io::Write;
use std::time::Instant;

/// Collects criterion outcomes; each line goes to stderr as soon as it is
/// known so that a long run shows progress.
pub struct Report {
    outcomes: Vec<(String, bool)>,
    started: Instant,
}

impl Default for Report {
    fn default() -> Self {
        Self::new()
    }
}

impl Report {
    pub fn new() -> Self {
        let _ = writeln!(std::io::stderr());
        Self { outcomes: Vec::new(), started: Instant::now() }
    }

    pub fn record(&mut self, id: &str, pass: bool, detail: impl AsRef<str>) {
        let line = format!("{} {id}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
        let _ = writeln!(std::io::stderr(), "{line}");
        self.outcomes.push((id.to_string(), pass));
    }

    pub fn failures(&self) -> Vec<&str> {
        self.outcomes.iter().filter(|(_, ok)| !ok).map(|(id, _)| id.as_str()).collect()
    }

    /// Prints the tally and panics if anything failed.
    pub fn finish(self) {
        let failed = self.failures();
        let _ = writeln!(
            std::io::stderr(),
            "acceptance: {} passed, {} failed in {:.1?}",
            self.outcomes.len() - failed.len(),
            failed.len(),
            self.started.elapsed()
        );
        assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
    }
}

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use super::request::HttpRequest;
use crate::spec::{Method, OperationKey};

/// Longest response prefix kept in a report.
pub const EXCERPT_BYTES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BugReport {
    pub timestamp: String,
    pub operation: OperationKey,
    pub request: HttpRequest,
    pub status_code: u16,
    pub response_excerpt: String,
    pub strategy: String,
    pub seed: u64,
    pub round: u64,
    /// Zero-based position of the request in the run; rerunning the same
    /// configuration and seed reproduces it at this index.
    pub request_index: u64,
    pub duplicate: bool,
}

impl BugReport {
    pub fn dedup_key(&self) -> (String, Method, u16) {
        (self.operation.path.clone(), self.operation.method, self.status_code)
    }
}

pub fn excerpt(body: &[u8]) -> String {
    let end = body.len().min(EXCERPT_BYTES);
    // Do not split a UTF-8 sequence at the cut.
    let end = match std::str::from_utf8(&body[..end]) {
        Err(e) if e.error_len().is_none() => e.valid_up_to(),
        _ => end,
    };
    String::from_utf8_lossy(&body[..end]).into_owned()
}

/// All 5XX occurrences in arrival order; repeats of a (path template,
/// method, status) triple are flagged as duplicates.
#[derive(Debug, Default, Clone)]
pub struct BugLog {
    reports: Vec<BugReport>,
    seen: BTreeSet<(String, Method, u16)>,
}

impl BugLog {
    pub fn record(&mut self, mut report: BugReport) -> bool {
        let fresh = self.seen.insert(report.dedup_key());
        report.duplicate = !fresh;
        self.reports.push(report);
        fresh
    }

    pub fn reports(&self) -> &[BugReport] {
        &self.reports
    }

    pub fn unique(&self) -> impl Iterator<Item = &BugReport> {
        self.reports.iter().filter(|r| !r.duplicate)
    }

    pub fn unique_count(&self) -> usize {
        self.seen.len()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.reports {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(path: &str, status: u16) -> BugReport {
        BugReport {
            timestamp: String::new(),
            operation: OperationKey {
                path: path.into(),
                method: Method::Delete,
            },
            request: HttpRequest {
                method: Method::Delete,
                url: format!("http://h{path}"),
                headers: vec![],
                body: None,
            },
            status_code: status,
            response_excerpt: String::new(),
            strategy: "tree".into(),
            seed: 0,
            round: 1,
            request_index: 0,
            duplicate: false,
        }
    }

    #[test]
    fn duplicates_are_flagged_not_dropped() {
        let mut log = BugLog::default();
        assert!(log.record(report("/a", 500)));
        assert!(!log.record(report("/a", 500)));
        assert!(log.record(report("/a", 502)));
        assert_eq!(log.reports().len(), 3);
        assert_eq!(log.unique_count(), 2);
        assert_eq!(log.unique().count(), 2);
        let mut buf = Vec::new();
        log.write_jsonl(&mut buf).unwrap();
        let lines: Vec<serde_json::Value> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1]["duplicate"], true);
        assert_eq!(lines[0]["operation"]["method"], "DELETE");
    }

    #[test]
    fn excerpt_is_bounded() {
        let big = vec![b'x'; 10_000];
        assert_eq!(excerpt(&big).len(), EXCERPT_BYTES);
        let mut multi = vec![b'x'; EXCERPT_BYTES - 1];
        multi.extend("é".as_bytes());
        assert_eq!(excerpt(&multi), "x".repeat(EXCERPT_BYTES - 1));
    }
}

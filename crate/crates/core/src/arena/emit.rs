//! Result files: raw records, cactus data, per-category counts and rankings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::score::{judge, Ranking};
use super::{RunRecord, RESULTS_HEADER};

/// File name and contents of every result file.
pub fn render_results(records: &[RunRecord], ranking: &Ranking) -> Vec<(&'static str, String)> {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.benchmark, &a.config).cmp(&(&b.benchmark, &b.config)));

    let mut results = format!("{RESULTS_HEADER}\n");
    for r in &sorted {
        results.push_str(&r.csv_row());
        results.push('\n');
    }

    // solved = judged correct under the ranking's ground truth
    let solved = |r: &RunRecord| {
        let t = ranking.truth.get(&r.benchmark).copied().unwrap_or_default();
        judge(r, t, ranking.mode) == Some(true)
    };
    let mut cactus = String::from("config,solved,cpu_s,wall_s\n");
    let mut per_config: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in &sorted {
        if solved(r) {
            per_config.entry(&r.config).or_default().push(r);
        }
    }
    for (cfg, mut rs) in per_config {
        rs.sort_by(|a, b| a.cpu_seconds.total_cmp(&b.cpu_seconds).then(a.benchmark.cmp(&b.benchmark)));
        for (i, r) in rs.iter().enumerate() {
            let _ = writeln!(cactus, "{cfg},{},{:.4},{:.4}", i + 1, r.cpu_seconds, r.wall_seconds);
        }
    }

    let configs: Vec<&str> = ranking.per_config.keys().map(String::as_str).collect();
    let mut category = String::from("category");
    for c in &configs {
        category.push(',');
        category.push_str(c);
    }
    category.push('\n');
    for (cat, counts) in &ranking.per_category {
        category.push_str(cat);
        for c in &configs {
            let _ = write!(category, ",{}", counts.get(*c).copied().unwrap_or(0));
        }
        category.push('\n');
    }

    let mut table = String::new();
    let _ = writeln!(
        table,
        "{:<24} {:>7} {:>7} {:>6} {:>7} {:>9}",
        "Config", "Solved", "Unique", "Wrong", "Points", "Quality"
    );
    for name in ranking.order() {
        let s = &ranking.per_config[name];
        let _ = writeln!(
            table,
            "{:<24} {:>7} {:>7} {:>6} {:>7} {:>9.2}",
            name, s.solved, s.unique, s.wrong, s.points, s.quality
        );
    }
    if !ranking.notes.is_empty() {
        table.push_str("\nNotes:\n");
        for n in &ranking.notes {
            let _ = writeln!(table, "  {n}");
        }
    }

    vec![
        ("results.csv", results),
        ("cactus.csv", cactus),
        ("category.csv", category),
        ("ranking.txt", table),
    ]
}

pub fn emit_results(dir: &Path, records: &[RunRecord], ranking: &Ranking) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, body) in render_results(records, ranking) {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{score_basic, RunVerdict};
    use super::*;

    #[test]
    fn empty_run_gives_headers_only() {
        let files = render_results(&[], &score_basic(&[], &BTreeMap::new()));
        let get = |n: &str| files.iter().find(|f| f.0 == n).unwrap().1.clone();
        assert_eq!(get("results.csv").lines().count(), 1);
        assert_eq!(get("cactus.csv").lines().count(), 1);
        assert_eq!(get("category.csv").lines().count(), 1);
    }

    #[test]
    fn cactus_rows_match_solved_counts() {
        let mk = |b: &str, c: &str, v, t| RunRecord {
            benchmark: b.into(),
            config: c.into(),
            verdict: v,
            cpu_seconds: t,
            wall_seconds: t,
            solution_size: None,
            verified: None,
            diagnostics: String::new(),
        };
        let rs = vec![
            mk("cnt1.aag", "a", RunVerdict::Realizable, 0.3),
            mk("cnt2.aag", "a", RunVerdict::Realizable, 0.1),
            mk("cnt2.aag", "b", RunVerdict::Timeout, 9.0),
            mk("add1.aag", "b", RunVerdict::Realizable, 0.2),
        ];
        let r = score_basic(&rs, &BTreeMap::new());
        let files = render_results(&rs, &r);
        let cactus = &files[1].1;
        for (cfg, s) in &r.per_config {
            let rows = cactus.lines().filter(|l| l.starts_with(&format!("{cfg},"))).count();
            assert_eq!(rows, s.solved);
        }
        assert!(cactus.contains("a,1,0.1000"));
        assert!(files[3].1.contains("Unique"));
    }
}

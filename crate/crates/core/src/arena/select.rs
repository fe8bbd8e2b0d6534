//! Difficulty-balanced benchmark selection.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::aiger::MetaInfo;

/// The family a benchmark belongs to: its file name up to the first digit,
/// without trailing separators (`mult_bool_matrix_2_2_2.aag` gives
/// `mult_bool_matrix`, `cnt5.aag` gives `cnt`).
pub fn category_of(file: &str) -> String {
    let base = file.rsplit('/').next().unwrap_or(file);
    let stem = base.split(|c: char| c.is_ascii_digit()).next().unwrap_or(base);
    let stem = stem.trim_end_matches(['_', '-', '.']);
    if stem.is_empty() {
        base.trim_end_matches(".aag").to_string()
    } else {
        stem.to_string()
    }
}

/// 0: never solved; 1..=3: solved by up to a third, two thirds, all.
pub fn difficulty_bucket(m: &MetaInfo) -> usize {
    let Some(e) = &m.solved_by else { return 0 };
    let (k, n) = e.value;
    if k == 0 || n == 0 {
        return 0;
    }
    // compare k/n against 1/3 and 2/3 exactly
    if 3 * k <= n {
        1
    } else if 3 * k <= 2 * n {
        2
    } else {
        3
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Selection {
    pub files: Vec<String>,
    pub notes: Vec<String>,
}

/// Per-bucket quotas for `request` files: a fifth (rounded up) goes to the
/// unsolved bucket, the rest evenly to the others, and whatever a bucket
/// cannot supply is handed round-robin to buckets that still have files.
pub fn bucket_quotas(request: usize, available: [usize; 4]) -> [usize; 4] {
    let unsolved = request.div_ceil(5);
    let rest = request - unsolved;
    let mut quota = [unsolved, rest / 3, rest / 3, rest / 3];
    for q in quota.iter_mut().skip(1).take(rest % 3) {
        *q += 1;
    }
    let mut take = [0; 4];
    let mut short = 0;
    for b in 0..4 {
        take[b] = quota[b].min(available[b]);
        short += quota[b] - take[b];
    }
    const ORDER: [usize; 4] = [1, 2, 3, 0];
    while short > 0 {
        let mut moved = false;
        for b in ORDER {
            if short > 0 && take[b] < available[b] {
                take[b] += 1;
                short -= 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    take
}

/// Picks `per_category[cat]` files from each category, stratified by the
/// fraction of solvers that solved them. Deterministic for a given seed.
pub fn select_benchmarks(
    library: &[(String, MetaInfo)],
    per_category: &BTreeMap<String, usize>,
    seed: u64,
) -> Selection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_cat: BTreeMap<String, [Vec<&str>; 4]> = BTreeMap::new();
    for (f, m) in library {
        by_cat.entry(category_of(f)).or_default()[difficulty_bucket(m)].push(f);
    }
    let mut out = Selection::default();
    for (cat, &request) in per_category {
        let Some(buckets) = by_cat.get_mut(cat) else {
            out.notes.push(format!("{cat}: no files in the library"));
            continue;
        };
        let total: usize = buckets.iter().map(Vec::len).sum();
        if total <= request {
            if total < request {
                out.notes.push(format!("{cat}: requested {request}, only {total} available, taking all"));
            }
            let mut all: Vec<String> = buckets.iter().flatten().map(|s| s.to_string()).collect();
            all.sort();
            out.files.extend(all);
            continue;
        }
        let avail = [0, 1, 2, 3].map(|b| buckets[b].len());
        let take = bucket_quotas(request, avail);
        let mut chosen = Vec::new();
        for (b, files) in buckets.iter_mut().enumerate() {
            files.sort_unstable();
            files.shuffle(&mut rng);
            chosen.extend(files[..take[b]].iter().map(|s| s.to_string()));
        }
        chosen.sort();
        out.files.extend(chosen);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::Experiment;

    fn meta(k: u32, n: u32) -> MetaInfo {
        MetaInfo {
            solved_by: Some(Experiment {
                value: (k, n),
                label: "x".into(),
            }),
            ..Default::default()
        }
    }

    #[test]
    fn categories() {
        assert_eq!(category_of("mult_bool_matrix_2_2_2.aag"), "mult_bool_matrix");
        assert_eq!(category_of("mult_bool_matrix_dyn_1_2.aag"), "mult_bool_matrix_dyn");
        assert_eq!(category_of("dir/cnt5.aag"), "cnt");
        assert_eq!(category_of("cycle_sched_1_1_1.aag"), "cycle_sched");
    }

    #[test]
    fn buckets() {
        assert_eq!(difficulty_bucket(&MetaInfo::default()), 0);
        assert_eq!(difficulty_bucket(&meta(0, 3)), 0);
        assert_eq!(difficulty_bucket(&meta(1, 3)), 1);
        assert_eq!(difficulty_bucket(&meta(2, 3)), 2);
        assert_eq!(difficulty_bucket(&meta(3, 3)), 3);
    }

    fn library(per_bucket: [usize; 4]) -> Vec<(String, MetaInfo)> {
        let mut lib = Vec::new();
        for (b, &n) in per_bucket.iter().enumerate() {
            for i in 0..n {
                lib.push((format!("fam_{b}_{i}.aag"), meta(b as u32, 3)));
            }
        }
        lib
    }

    #[test]
    fn even_spread() {
        let lib = library([10, 10, 10, 10]);
        let req = BTreeMap::from([("fam".to_string(), 16)]);
        let s = select_benchmarks(&lib, &req, 7);
        assert_eq!(s.files.len(), 16);
        for b in 0..4 {
            let n = s.files.iter().filter(|f| f.starts_with(&format!("fam_{b}_"))).count();
            assert_eq!(n, 4, "bucket {b}");
        }
        assert_eq!(s, select_benchmarks(&lib, &req, 7));
    }

    #[test]
    fn scarce_unsolved_is_redistributed() {
        assert_eq!(bucket_quotas(16, [1, 10, 10, 10]), [1, 5, 5, 5]);
        assert_eq!(bucket_quotas(15, [10, 10, 10, 10]), [3, 4, 4, 4]);
        assert_eq!(bucket_quotas(10, [0, 0, 2, 20]), [0, 0, 2, 8]);
    }

    #[test]
    fn small_categories_are_taken_whole() {
        let lib = library([1, 1, 0, 0]);
        let s = select_benchmarks(&lib, &BTreeMap::from([("fam".to_string(), 5)]), 1);
        assert_eq!(s.files.len(), 2);
        assert_eq!(s.notes.len(), 1);
    }

    #[test]
    fn competition_sized_library() {
        let requests = [16, 15, 16, 16, 16, 16, 15, 16, 16, 16, 16, 16, 16, 16, 16, 12];
        let mut lib = Vec::new();
        let mut req = BTreeMap::new();
        for (c, &r) in requests.iter().enumerate() {
            let cat = format!("cat{}", (b'a' + c as u8) as char);
            req.insert(cat.clone(), r);
            for i in 0..40 {
                lib.push((format!("{cat}_{i}.aag"), meta((i % 4) as u32, 3)));
            }
        }
        let s = select_benchmarks(&lib, &req, 2015);
        assert_eq!(s.files.len(), requests.iter().sum::<usize>());
        assert_eq!(s.files.len(), 250);
    }
}

//! The `#!SYNTCOMP` ... `#.` classification paragraph.

use std::fmt;
use std::str::FromStr;

use super::{Circuit, ParseError, ParseErrorKind};

const OPEN: &str = "#!SYNTCOMP";
const CLOSE: &str = "#.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Status {
    Realizable,
    Unrealizable,
    #[default]
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Realizable => "realizable",
            Status::Unrealizable => "unrealizable",
            Status::Unknown => "unknown",
        })
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "realizable" => Ok(Status::Realizable),
            "unrealizable" => Ok(Status::Unrealizable),
            "unknown" => Ok(Status::Unknown),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

/// A value tagged with the experiment it came from, e.g. `8/8 [SYNTCOMP2014-RealSeq]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment<T> {
    pub value: T,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetaInfo {
    pub status: Status,
    /// (solved, participants) fraction.
    pub solved_by: Option<Experiment<(u32, u32)>>,
    /// Minimal solving time in seconds.
    pub solved_in: Option<Experiment<f64>>,
    /// Smallest known solution, in AND gates.
    pub ref_size: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaParse {
    pub info: MetaInfo,
    /// Unknown property keys, with their line in the comment section.
    pub warnings: Vec<String>,
}

/// Splits `value [label]` into its parts.
fn split_label(v: &str) -> (&str, String) {
    match v.find('[') {
        Some(i) => {
            let label = v[i + 1..].trim_end().trim_end_matches(']');
            (v[..i].trim(), label.to_string())
        }
        None => (v.trim(), String::new()),
    }
}

/// Reads the classification paragraph from the comment section. Line numbers
/// in errors count from the start of the comment section.
pub fn parse_meta(c: &Circuit) -> Result<MetaParse, ParseError> {
    let mut info = MetaInfo::default();
    let mut warnings = Vec::new();
    let Some(start) = c.comments.iter().position(|l| l.trim() == OPEN) else {
        return Ok(MetaParse { info, warnings });
    };
    let bad = |line: usize, msg: String| ParseError {
        line: line + 1,
        kind: ParseErrorKind::Meta(msg),
    };
    for (i, raw) in c.comments.iter().enumerate().skip(start + 1) {
        let line = raw.trim();
        if line == CLOSE {
            break;
        }
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(bad(i, format!("expected `KEY : value`, found `{line}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "STATUS" => info.status = value.parse().map_err(|e| bad(i, e))?,
            "SOLVED_BY" => {
                let (frac, label) = split_label(value);
                let (n, d) = frac
                    .split_once('/')
                    .ok_or_else(|| bad(i, format!("expected `n/d`, found `{frac}`")))?;
                let n: u32 = n.trim().parse().map_err(|_| bad(i, format!("bad numerator `{n}`")))?;
                let d: u32 = d.trim().parse().map_err(|_| bad(i, format!("bad denominator `{d}`")))?;
                if n > d {
                    return Err(bad(i, format!("{n}/{d} exceeds 1")));
                }
                info.solved_by = Some(Experiment { value: (n, d), label });
            }
            "SOLVED_IN" => {
                let (t, label) = split_label(value);
                let t: f64 = t.parse().map_err(|_| bad(i, format!("bad time `{t}`")))?;
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(bad(i, format!("bad time `{t}`")));
                }
                info.solved_in = (t > 0.0).then_some(Experiment { value: t, label });
            }
            "REF_SIZE" => {
                let n: u64 = value.parse().map_err(|_| bad(i, format!("bad size `{value}`")))?;
                info.ref_size = (n > 0).then_some(n);
            }
            other => {
                log::warn!("unknown classification property `{other}`");
                warnings.push(format!("comment line {}: unknown property `{other}`", i + 1));
            }
        }
    }
    Ok(MetaParse { info, warnings })
}

/// Renders the classification paragraph, delimiters included. A paragraph
/// holding only a status is written as just the `STATUS` line; otherwise
/// `SOLVED_IN` and `REF_SIZE` are always present and written as `0` when absent.
pub fn write_meta(m: &MetaInfo) -> Vec<String> {
    let mut out = vec![OPEN.to_string(), format!("STATUS : {}", m.status)];
    let status_only = m.solved_by.is_none() && m.solved_in.is_none() && m.ref_size.is_none();
    if !status_only {
        if let Some(e) = &m.solved_by {
            out.push(format!("SOLVED_BY : {}/{} [{}]", e.value.0, e.value.1, e.label));
        }
        match &m.solved_in {
            Some(e) => out.push(format!("SOLVED_IN : {} [{}]", e.value, e.label)),
            None => out.push("SOLVED_IN : 0".to_string()),
        }
        out.push(format!("REF_SIZE : {}", m.ref_size.unwrap_or(0)));
    }
    out.push(CLOSE.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SAMPLE: &str = "\t#!SYNTCOMP\n\tSTATUS : realizable\n\tSOLVED_BY : 8/8 [SYNTCOMP2014-RealSeq]\n\tSOLVED_IN : 0.008 [SYNTCOMP2014-RealSeq]\n\tREF_SIZE : 203\n\t#.";

    fn with_comments(lines: &str) -> Circuit {
        Circuit {
            comments: lines.lines().map(str::to_string).collect(),
            ..Default::default()
        }
    }

    fn sample_info() -> MetaInfo {
        let label = "SYNTCOMP2014-RealSeq".to_string();
        MetaInfo {
            status: Status::Realizable,
            solved_by: Some(Experiment {
                value: (8, 8),
                label: label.clone(),
            }),
            solved_in: Some(Experiment { value: 0.008, label }),
            ref_size: Some(203),
        }
    }

    #[test]
    fn sample_paragraph() {
        let parsed = parse_meta(&with_comments(SAMPLE)).unwrap();
        assert_eq!(parsed.info, sample_info());
        assert!(parsed.warnings.is_empty());
        let written = write_meta(&parsed.info);
        let expected: Vec<&str> = SAMPLE.lines().map(str::trim).collect();
        assert_eq!(written, expected);
    }

    #[test]
    fn absent_paragraph_is_unknown() {
        let m = parse_meta(&with_comments("just a comment")).unwrap();
        assert_eq!(m.info, MetaInfo::default());
    }

    #[test]
    fn zero_means_absent() {
        let m = parse_meta(&with_comments("#!SYNTCOMP\nSTATUS : unknown\nSOLVED_IN : 0 [x]\nREF_SIZE : 0\n#.")).unwrap();
        assert_eq!(m.info.solved_in, None);
        assert_eq!(m.info.ref_size, None);
    }

    #[test]
    fn status_only_paragraph() {
        assert_eq!(write_meta(&MetaInfo::default()), vec!["#!SYNTCOMP", "STATUS : unknown", "#."]);
    }

    #[test]
    fn absent_ref_size_written_as_zero() {
        let mut m = sample_info();
        m.ref_size = None;
        assert!(write_meta(&m).contains(&"REF_SIZE : 0".to_string()));
    }

    #[test]
    fn unknown_key_warns_malformed_value_fails() {
        let m = parse_meta(&with_comments("#!SYNTCOMP\nSTATUS : unknown\nFOO : 1\n#.")).unwrap();
        assert_eq!(m.warnings.len(), 1);
        let e = parse_meta(&with_comments("#!SYNTCOMP\nSTATUS : maybe\n#.")).unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_meta(&with_comments("x\n#!SYNTCOMP\nSOLVED_BY : 9/8 [x]\n#.")).unwrap_err();
        assert_eq!(e.line, 3);
    }

    fn arb_meta() -> impl Strategy<Value = MetaInfo> {
        let status = prop_oneof![
            Just(Status::Realizable),
            Just(Status::Unrealizable),
            Just(Status::Unknown)
        ];
        let label = "[A-Za-z0-9-]{1,12}";
        let solved_by = proptest::option::of(((0u32..20), (0u32..20), label).prop_map(|(a, b, l)| Experiment {
            value: (a.min(b), a.max(b)),
            label: l,
        }));
        let solved_in = proptest::option::of((1u32..1_000_000, label).prop_map(|(ms, l)| Experiment {
            value: ms as f64 / 1000.0,
            label: l,
        }));
        let ref_size = proptest::option::of(1u64..100_000);
        (status, solved_by, solved_in, ref_size).prop_map(|(status, solved_by, solved_in, ref_size)| MetaInfo {
            status,
            solved_by,
            solved_in,
            ref_size,
        })
    }

    proptest! {
        #[test]
        fn meta_round_trip(m in arb_meta()) {
            let c = Circuit { comments: write_meta(&m), ..Default::default() };
            prop_assert_eq!(parse_meta(&c).unwrap().info, m);
        }
    }
}

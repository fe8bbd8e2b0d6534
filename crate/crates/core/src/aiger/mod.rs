//! ASCII AIGER (`aag`) reading and writing, with the controllable-input
//! naming convention and the `#!SYNTCOMP` classification paragraph.

mod builder;
mod meta;

pub use builder::AigBuilder;
pub use meta::{parse_meta, write_meta, Experiment, MetaInfo, MetaParse, Status};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Not;

use thiserror::Error;

/// Input symbols starting with this prefix are driven by the system player.
pub const CONTROLLABLE_PREFIX: &str = "controllable_";

/// An AIGER literal: `2 * variable + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Literal(pub u32);

impl Literal {
    pub const FALSE: Literal = Literal(0);
    pub const TRUE: Literal = Literal(1);

    pub fn from_var(var: u32, negated: bool) -> Literal {
        Literal(var * 2 + negated as u32)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_const(self) -> bool {
        self.0 < 2
    }

    /// The non-negated literal of the same variable.
    pub fn positive(self) -> Literal {
        Literal(self.0 & !1)
    }

    pub fn negate_if(self, cond: bool) -> Literal {
        Literal(self.0 ^ cond as u32)
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal(self.0 ^ 1)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Latch {
    pub state: Literal,
    pub next: Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AndGate {
    pub lhs: Literal,
    pub rhs0: Literal,
    pub rhs1: Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Input,
    Latch,
    Output,
}

impl SymbolKind {
    fn tag(self) -> char {
        match self {
            SymbolKind::Input => 'i',
            SymbolKind::Latch => 'l',
            SymbolKind::Output => 'o',
        }
    }
}

/// An and-inverter graph with latches, as read from an `aag` file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    pub max_var: u32,
    pub inputs: Vec<Literal>,
    pub latches: Vec<Latch>,
    pub outputs: Vec<Literal>,
    pub ands: Vec<AndGate>,
    pub symbols: BTreeMap<(SymbolKind, usize), String>,
    /// Lines after the `c` marker, verbatim.
    pub comments: Vec<String>,
}

/// What a variable index is defined as.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarDef {
    Const,
    Input(usize),
    Latch(usize),
    And(usize),
    Undefined,
}

impl Circuit {
    pub fn input_name(&self, pos: usize) -> Option<&str> {
        self.symbols
            .get(&(SymbolKind::Input, pos))
            .map(String::as_str)
    }

    pub fn latch_name(&self, pos: usize) -> Option<&str> {
        self.symbols
            .get(&(SymbolKind::Latch, pos))
            .map(String::as_str)
    }

    pub fn output_name(&self, pos: usize) -> Option<&str> {
        self.symbols
            .get(&(SymbolKind::Output, pos))
            .map(String::as_str)
    }

    /// Table from variable index to its definition.
    pub fn var_defs(&self) -> Vec<VarDef> {
        let mut defs = vec![VarDef::Undefined; self.max_var as usize + 1];
        defs[0] = VarDef::Const;
        for (i, l) in self.inputs.iter().enumerate() {
            defs[l.var() as usize] = VarDef::Input(i);
        }
        for (i, l) in self.latches.iter().enumerate() {
            defs[l.state.var() as usize] = VarDef::Latch(i);
        }
        for (i, g) in self.ands.iter().enumerate() {
            defs[g.lhs.var() as usize] = VarDef::And(i);
        }
        defs
    }

    /// The AND gates in an order where every gate comes after the gates it reads.
    pub fn topological_ands(&self) -> Vec<usize> {
        let defs = self.var_defs();
        let mut state = vec![0u8; self.ands.len()];
        let mut order = Vec::with_capacity(self.ands.len());
        for root in 0..self.ands.len() {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, false)];
            while let Some((g, expanded)) = stack.pop() {
                if expanded {
                    state[g] = 2;
                    order.push(g);
                    continue;
                }
                if state[g] != 0 {
                    continue;
                }
                state[g] = 1;
                stack.push((g, true));
                for rhs in [self.ands[g].rhs0, self.ands[g].rhs1] {
                    if let VarDef::And(k) = defs[rhs.var() as usize] {
                        if state[k] == 0 {
                            stack.push((k, false));
                        }
                    }
                }
            }
        }
        order
    }

    pub fn meta(&self) -> Result<MetaInfo, ParseError> {
        parse_meta(self).map(|m| m.info)
    }

    /// Replaces the classification paragraph in the comment section, or
    /// appends one if there is none.
    pub fn set_meta(&mut self, meta: &MetaInfo) {
        let lines = write_meta(meta);
        let start = self.comments.iter().position(|l| l.trim() == "#!SYNTCOMP");
        match start {
            Some(s) => {
                let end = self.comments[s..]
                    .iter()
                    .position(|l| l.trim() == "#.")
                    .map(|e| s + e + 1)
                    .unwrap_or(self.comments.len());
                self.comments.splice(s..end, lines);
            }
            None => self.comments.extend(lines),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("binary AIGER is not supported, convert to ASCII `aag` first")]
    BinaryFormat,
    #[error("malformed header: {0}")]
    Header(String),
    #[error("expected a non-negative integer, found `{0}`")]
    NotAnInteger(String),
    #[error("literal {lit} exceeds maximum variable index {max_var}")]
    LiteralOutOfRange { lit: u32, max_var: u32 },
    #[error("variable {0} is defined more than once")]
    DuplicateDefinition(u32),
    #[error("variable {0} is used but never defined")]
    UndefinedVariable(u32),
    #[error("{0} must be a non-negated, non-constant literal")]
    BadDefinition(u32),
    #[error("wrong number of fields: expected {expected}, found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("unexpected end of file, {0} missing")]
    Truncated(&'static str),
    #[error("malformed symbol line `{0}`")]
    Symbol(String),
    #[error("symbol position {pos} out of range for `{kind}`")]
    SymbolRange { kind: char, pos: usize },
    #[error("combinational cycle through variable {0}")]
    Cycle(u32),
    #[error("malformed classification value: {0}")]
    Meta(String),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn parse_u32(tok: &str, line: usize) -> Result<u32, ParseError> {
    tok.parse::<u32>()
        .map_err(|_| err(line, ParseErrorKind::NotAnInteger(tok.to_string())))
}

fn parse_fields(text: &str, line: usize, expected: usize) -> Result<Vec<u32>, ParseError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != expected {
        return Err(err(
            line,
            ParseErrorKind::FieldCount {
                expected,
                found: toks.len(),
            },
        ));
    }
    toks.iter().map(|t| parse_u32(t, line)).collect()
}

/// Parses an ASCII AIGER file.
pub fn parse_aag(text: &str) -> Result<Circuit, ParseError> {
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| err(1, ParseErrorKind::Truncated("header")))?;
    let mut htoks = header.split_whitespace();
    match htoks.next() {
        Some("aag") => {}
        Some("aig") => return Err(err(hline, ParseErrorKind::BinaryFormat)),
        other => {
            return Err(err(
                hline,
                ParseErrorKind::Header(format!("expected `aag`, found `{}`", other.unwrap_or(""))),
            ))
        }
    }
    let nums: Vec<u32> = htoks
        .map(|t| parse_u32(t, hline))
        .collect::<Result<_, _>>()?;
    if nums.len() < 5 {
        return Err(err(
            hline,
            ParseErrorKind::Header("expected `aag M I L O A`".into()),
        ));
    }
    if nums[5..].iter().any(|&n| n != 0) {
        return Err(err(
            hline,
            ParseErrorKind::Header("bad-state, constraint, justice and fairness sections are not supported".into()),
        ));
    }
    let (max_var, ni, nl, no, na) = (nums[0], nums[1], nums[2], nums[3], nums[4]);
    if (ni as u64 + nl as u64 + na as u64) > max_var as u64 {
        return Err(err(
            hline,
            ParseErrorKind::Header(format!("M = {max_var} is smaller than I + L + A")),
        ));
    }

    let mut c = Circuit {
        max_var,
        ..Default::default()
    };
    let mut defined = vec![false; max_var as usize + 1];
    let mut define = |lit: u32, line: usize| -> Result<Literal, ParseError> {
        if lit > 2 * max_var + 1 {
            return Err(err(line, ParseErrorKind::LiteralOutOfRange { lit, max_var }));
        }
        if lit & 1 == 1 || lit < 2 {
            return Err(err(line, ParseErrorKind::BadDefinition(lit)));
        }
        let v = (lit >> 1) as usize;
        if defined[v] {
            return Err(err(line, ParseErrorKind::DuplicateDefinition(v as u32)));
        }
        defined[v] = true;
        Ok(Literal(lit))
    };
    let check = |lit: u32, line: usize| -> Result<Literal, ParseError> {
        if lit > 2 * max_var + 1 {
            return Err(err(line, ParseErrorKind::LiteralOutOfRange { lit, max_var }));
        }
        Ok(Literal(lit))
    };
    let mut uses: Vec<(Literal, usize)> = Vec::new();

    for _ in 0..ni {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(hline, ParseErrorKind::Truncated("input")))?;
        let f = parse_fields(l, ln, 1)?;
        c.inputs.push(define(f[0], ln)?);
    }
    for _ in 0..nl {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(hline, ParseErrorKind::Truncated("latch")))?;
        let toks = l.split_whitespace().count();
        let f = if toks == 3 {
            let f = parse_fields(l, ln, 3)?;
            if f[2] != 0 {
                return Err(err(
                    ln,
                    ParseErrorKind::Header("latch reset values other than 0 are not supported".into()),
                ));
            }
            f
        } else {
            parse_fields(l, ln, 2)?
        };
        let state = define(f[0], ln)?;
        let next = check(f[1], ln)?;
        uses.push((next, ln));
        c.latches.push(Latch { state, next });
    }
    for _ in 0..no {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(hline, ParseErrorKind::Truncated("output")))?;
        let f = parse_fields(l, ln, 1)?;
        let o = check(f[0], ln)?;
        uses.push((o, ln));
        c.outputs.push(o);
    }
    let mut gate_lines = Vec::with_capacity(na as usize);
    for _ in 0..na {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(hline, ParseErrorKind::Truncated("and gate")))?;
        let f = parse_fields(l, ln, 3)?;
        let lhs = define(f[0], ln)?;
        let rhs0 = check(f[1], ln)?;
        let rhs1 = check(f[2], ln)?;
        uses.push((rhs0, ln));
        uses.push((rhs1, ln));
        gate_lines.push(ln);
        c.ands.push(AndGate { lhs, rhs0, rhs1 });
    }
    for (lit, ln) in uses {
        if !lit.is_const() && !defined[lit.var() as usize] {
            return Err(err(ln, ParseErrorKind::UndefinedVariable(lit.var())));
        }
    }

    // symbols, then an optional comment section
    for (ln, l) in lines.by_ref() {
        if l.trim_end() == "c" {
            break;
        }
        if l.is_empty() {
            continue;
        }
        let (head, name) = l
            .split_once(' ')
            .ok_or_else(|| err(ln, ParseErrorKind::Symbol(l.to_string())))?;
        let mut chars = head.chars();
        let tag = chars.next().unwrap_or(' ');
        let kind = match tag {
            'i' => SymbolKind::Input,
            'l' => SymbolKind::Latch,
            'o' => SymbolKind::Output,
            _ => return Err(err(ln, ParseErrorKind::Symbol(l.to_string()))),
        };
        let pos: usize = chars
            .as_str()
            .parse()
            .map_err(|_| err(ln, ParseErrorKind::Symbol(l.to_string())))?;
        let limit = match kind {
            SymbolKind::Input => c.inputs.len(),
            SymbolKind::Latch => c.latches.len(),
            SymbolKind::Output => c.outputs.len(),
        };
        if pos >= limit {
            return Err(err(ln, ParseErrorKind::SymbolRange { kind: tag, pos }));
        }
        c.symbols.insert((kind, pos), name.to_string());
    }
    c.comments = lines.map(|(_, l)| l.to_string()).collect();
    // a trailing newline leaves one empty pseudo-line behind
    if c.comments.last().is_some_and(|l| l.is_empty()) {
        c.comments.pop();
    }

    check_acyclic(&c, &gate_lines)?;
    Ok(c)
}

fn check_acyclic(c: &Circuit, gate_lines: &[usize]) -> Result<(), ParseError> {
    let defs = c.var_defs();
    let mut state = vec![0u8; c.ands.len()];
    for root in 0..c.ands.len() {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(&mut (g, ref mut child)) = stack.last_mut() {
            let gate = c.ands[g];
            let rhs = [gate.rhs0, gate.rhs1];
            if *child == 2 {
                state[g] = 2;
                stack.pop();
                continue;
            }
            let lit = rhs[*child];
            *child += 1;
            if let VarDef::And(k) = defs[lit.var() as usize] {
                match state[k] {
                    0 => {
                        state[k] = 1;
                        stack.push((k, 0));
                    }
                    1 => {
                        return Err(err(gate_lines[g], ParseErrorKind::Cycle(lit.var())));
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(())
}

/// Serializes a circuit in ASCII AIGER format.
pub fn write_aag(c: &Circuit) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "aag {} {} {} {} {}",
        c.max_var,
        c.inputs.len(),
        c.latches.len(),
        c.outputs.len(),
        c.ands.len()
    );
    for i in &c.inputs {
        let _ = writeln!(out, "{i}");
    }
    for l in &c.latches {
        let _ = writeln!(out, "{} {}", l.state, l.next);
    }
    for o in &c.outputs {
        let _ = writeln!(out, "{o}");
    }
    for g in &c.ands {
        let _ = writeln!(out, "{} {} {}", g.lhs, g.rhs0, g.rhs1);
    }
    for ((kind, pos), name) in &c.symbols {
        let _ = writeln!(out, "{}{} {}", kind.tag(), pos, name);
    }
    if !c.comments.is_empty() {
        out.push_str("c\n");
        for line in &c.comments {
            let _ = writeln!(out, "{line}");
        }
    }
    out
}

/// Split of input positions into environment and system moves.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ControlPartition {
    pub uncontrollable: Vec<usize>,
    pub controllable: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("input {0} has no symbol name")]
    MissingSymbol(usize),
}

pub fn is_controllable_name(name: &str) -> bool {
    name.starts_with(CONTROLLABLE_PREFIX)
}

pub fn partition_inputs(c: &Circuit) -> Result<ControlPartition, PartitionError> {
    let mut p = ControlPartition::default();
    for pos in 0..c.inputs.len() {
        let name = c.input_name(pos).ok_or(PartitionError::MissingSymbol(pos))?;
        if is_controllable_name(name) {
            p.controllable.push(pos);
        } else {
            p.uncontrollable.push(pos);
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_circuit() {
        let c = parse_aag("aag 1 1 0 1 0\n2\n2\n").unwrap();
        assert_eq!(c.inputs, vec![Literal(2)]);
        assert_eq!(c.outputs, vec![Literal(2)]);
        assert!(c.ands.is_empty());
        assert_eq!(write_aag(&c), "aag 1 1 0 1 0\n2\n2\n");
    }

    #[test]
    fn single_gate() {
        let c = parse_aag("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n").unwrap();
        assert_eq!(
            c.ands,
            vec![AndGate {
                lhs: Literal(6),
                rhs0: Literal(2),
                rhs1: Literal(4)
            }]
        );
        assert_eq!(c.outputs, vec![Literal(6)]);
    }

    #[test]
    fn symbols_and_comments() {
        let text = "aag 1 1 0 1 0\n2\n3\ni0 controllable_fill_1\no0 err\nc\nhello\n#!SYNTCOMP\nSTATUS : unknown\n#.\n";
        let c = parse_aag(text).unwrap();
        assert_eq!(c.input_name(0), Some("controllable_fill_1"));
        assert_eq!(c.comments.len(), 4);
        assert_eq!(write_aag(&c), text);
        assert!(write_aag(&c).contains("\ni0 controllable_fill_1\n"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_aag("aag 1 1 0 1 0\n2\n4\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(e.kind, ParseErrorKind::LiteralOutOfRange { lit: 4, .. }));

        let e = parse_aag("aag 2 2 0 0 0\n2\n2\n").unwrap_err();
        assert_eq!(e, err(3, ParseErrorKind::DuplicateDefinition(1)));

        let e = parse_aag("aag 1 1 0 0 0\nx\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(matches!(e.kind, ParseErrorKind::NotAnInteger(_)));

        let e = parse_aag("aag 1 1\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Header(_)));

        let e = parse_aag("aig 1 1 0 1 0\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::BinaryFormat);

        let e = parse_aag("aag 3 1 0 1 1\n2\n6\n6 2 4\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndefinedVariable(2));
    }

    #[test]
    fn cycles_are_rejected() {
        let e = parse_aag("aag 3 1 0 1 2\n2\n4\n4 2 6\n6 4 2\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Cycle(_)));
    }

    #[test]
    fn partition_by_prefix() {
        let c = parse_aag("aag 2 2 0 1 0\n2\n4\n2\ni0 up\ni1 controllable_c0\n").unwrap();
        let p = partition_inputs(&c).unwrap();
        assert_eq!(p.uncontrollable, vec![0]);
        assert_eq!(p.controllable, vec![1]);

        let c = parse_aag("aag 2 2 0 1 0\n2\n4\n2\ni0 a\ni1 b\n").unwrap();
        assert!(partition_inputs(&c).unwrap().controllable.is_empty());

        let c = parse_aag("aag 2 2 0 1 0\n2\n4\n2\ni0 controllable_a\ni1 controllable_b\n").unwrap();
        assert!(partition_inputs(&c).unwrap().uncontrollable.is_empty());

        let c = parse_aag("aag 2 2 0 1 0\n2\n4\n2\ni0 a\n").unwrap();
        assert_eq!(partition_inputs(&c), Err(PartitionError::MissingSymbol(1)));
    }

    #[test]
    fn topological_order_handles_unsorted_gates() {
        let c = parse_aag("aag 4 2 0 1 2\n2\n4\n8\n8 6 2\n6 2 4\n").unwrap();
        assert_eq!(c.topological_ands(), vec![1, 0]);
    }

    #[test]
    fn set_meta_replaces_paragraph() {
        let mut c = parse_aag("aag 1 1 0 1 0\n2\n2\nc\nkeep\n#!SYNTCOMP\nSTATUS : unknown\n#.\ntail\n").unwrap();
        let m = MetaInfo {
            status: Status::Realizable,
            ..Default::default()
        };
        c.set_meta(&m);
        assert_eq!(c.comments, vec!["keep", "#!SYNTCOMP", "STATUS : realizable", "#.", "tail"]);
        assert_eq!(c.meta().unwrap(), m);
    }
}

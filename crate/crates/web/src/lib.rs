//! Browser bindings. Each export is a thin wrapper over a plain function so
//! the logic can be tested natively.

use syntkit::aiger::{parse_aag, write_aag, Circuit, Literal, VarDef};
use syntkit::arena::{solve_circuit, Algorithm, Mode, SolverConfig};
use syntkit::benchgen::{gen_adder, gen_counter, gen_cycle_sched, gen_mult_matrix, gen_mult_matrix_dyn};
use syntkit::compositional::{decompose_error, DEFAULT_CAP};
use syntkit::verifier::{check_syntactic, model_check, VerifyStatus};
use wasm_bindgen::prelude::*;

/// `family` is one of cycle_sched, mult, mult_dyn, cnt, add; unused
/// parameters are ignored.
pub fn generate_text(family: &str, a: usize, b: usize, c: usize) -> Result<String, String> {
    let circuit = match family {
        "cycle_sched" => gen_cycle_sched(a, b, c),
        "mult" => gen_mult_matrix(a, b, c),
        "mult_dyn" => gen_mult_matrix_dyn(a, b),
        "cnt" => gen_counter(a),
        "add" => gen_adder(a),
        _ => return Err(format!("unknown family `{family}`")),
    }
    .map_err(|e| e.to_string())?;
    Ok(write_aag(&circuit))
}

#[wasm_bindgen]
pub struct Report {
    realizable: bool,
    verified: bool,
    solution: String,
    size: usize,
    summary: String,
}

#[wasm_bindgen]
impl Report {
    #[wasm_bindgen(getter)]
    pub fn realizable(&self) -> bool {
        self.realizable
    }

    #[wasm_bindgen(getter)]
    pub fn verified(&self) -> bool {
        self.verified
    }

    /// The controller in `aag` form; empty when unrealizable.
    #[wasm_bindgen(getter)]
    pub fn solution(&self) -> String {
        self.solution.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn size(&self) -> usize {
        self.size
    }

    #[wasm_bindgen(getter)]
    pub fn summary(&self) -> String {
        self.summary.clone()
    }
}

fn describe(c: &Circuit) -> String {
    format!(
        "{} inputs, {} latches, {} AND gates",
        c.inputs.len(),
        c.latches.len(),
        c.ands.len()
    )
}

pub fn solve_text(aag: &str, algorithm: &str) -> Result<Report, String> {
    let spec = parse_aag(aag).map_err(|e| e.to_string())?;
    let algo: Algorithm = algorithm.parse()?;
    if algo == Algorithm::Portfolio {
        return Err("portfolios are not available in the browser".into());
    }
    let cfg = SolverConfig::new(algorithm, algo).with_mode(Mode::Synthesis);
    let out = solve_circuit(&cfg, &spec).map_err(|e| e.to_string())?;
    let Some(sol) = out.solution else {
        return Ok(Report {
            realizable: false,
            verified: false,
            solution: String::new(),
            size: 0,
            summary: format!("unrealizable ({})", describe(&spec)),
        });
    };
    let syntax = check_syntactic(&spec, &sol);
    let verified = syntax.passed() && model_check(&sol, f64::INFINITY).status == VerifyStatus::Verified;
    Ok(Report {
        realizable: true,
        verified,
        size: sol.ands.len(),
        summary: format!(
            "realizable; controller has {} AND gates and {}",
            sol.ands.len(),
            if verified { "passes the model checker" } else { "FAILS verification" }
        ),
        solution: write_aag(&sol),
    })
}

fn literal_name(c: &Circuit, l: Literal) -> String {
    let base = match c.var_defs()[l.var() as usize] {
        VarDef::Const => return if l.is_negated() { "true".into() } else { "false".into() },
        VarDef::Input(i) => c.input_name(i).map(String::from).unwrap_or(format!("i{i}")),
        VarDef::Latch(i) => c.latch_name(i).map(String::from).unwrap_or(format!("l{i}")),
        VarDef::And(_) | VarDef::Undefined => format!("g{}", l.var()),
    };
    if l.is_negated() {
        format!("!{base}")
    } else {
        base
    }
}

/// One line per disjunct of the error, literals joined by `&`.
pub fn decompose_text(aag: &str) -> Result<String, String> {
    let c = parse_aag(aag).map_err(|e| e.to_string())?;
    let d = decompose_error(&c, DEFAULT_CAP);
    let lines: Vec<String> = d
        .disjuncts
        .iter()
        .map(|conj| conj.iter().map(|&l| literal_name(&c, l)).collect::<Vec<_>>().join(" & "))
        .collect();
    Ok(lines.join("\n"))
}

#[wasm_bindgen]
pub fn generate(family: &str, a: usize, b: usize, c: usize) -> Result<String, JsError> {
    generate_text(family, a, b, c).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve(aag: &str, algorithm: &str) -> Result<Report, JsError> {
    solve_text(aag, algorithm).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn decompose(aag: &str) -> Result<String, JsError> {
    decompose_text(aag).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_then_solve() {
        let text = generate_text("mult", 2, 2, 2).unwrap();
        let r = solve_text(&text, "global").unwrap();
        assert!(r.realizable && r.verified);
        assert!(parse_aag(&r.solution).is_ok());
        let r = solve_text(&generate_text("cycle_sched", 1, 1, 1).unwrap(), "classic").unwrap();
        assert!(!r.realizable);
        assert!(r.solution.is_empty());
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(generate_text("nope", 1, 1, 1).is_err());
        assert!(solve_text("not aiger", "classic").is_err());
        assert!(solve_text(&generate_text("cnt", 2, 0, 0).unwrap(), "nope").is_err());
    }

    #[test]
    fn decomposition_names_inputs() {
        let aag = "aag 7 4 0 1 3\n2\n4\n6\n8\n14\n10 7 8\n12 4 10\n14 2 13\ni0 x1\ni1 x2\ni2 x3\ni3 x4\n";
        let text = decompose_text(aag).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines.sort();
        assert_eq!(lines.len(), 3, "{text}");
        assert!(lines.iter().all(|l| l.contains("x1")));
    }
}

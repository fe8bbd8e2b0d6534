//! Random formulas checked operation by operation against truth tables.

use rand::Rng;
use syntkit::bdd::{Bdd, BddManager, VarId};

use crate::truth::TruthTable;

#[derive(Debug, Clone)]
pub enum Formula {
    Const(bool),
    Var(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
}

pub fn random_formula(rng: &mut impl Rng, vars: usize, depth: usize) -> Formula {
    if depth == 0 || rng.random_range(0..6) == 0 {
        return if rng.random_range(0..12) == 0 {
            Formula::Const(rng.random())
        } else {
            Formula::Var(rng.random_range(0..vars))
        };
    }
    let op = rng.random_range(0..4);
    let a = Box::new(random_formula(rng, vars, depth - 1));
    if op == 0 {
        return Formula::Not(a);
    }
    let b = Box::new(random_formula(rng, vars, depth - 1));
    match op {
        1 => Formula::And(a, b),
        2 => Formula::Or(a, b),
        _ => Formula::Xor(a, b),
    }
}

pub fn table(f: &Formula, vars: usize) -> TruthTable {
    match f {
        Formula::Const(b) => TruthTable::constant(vars, *b),
        Formula::Var(i) => TruthTable::var(vars, *i),
        Formula::Not(a) => table(a, vars).not(),
        Formula::And(a, b) => table(a, vars).and(&table(b, vars)),
        Formula::Or(a, b) => table(a, vars).or(&table(b, vars)),
        Formula::Xor(a, b) => table(a, vars).xor(&table(b, vars)),
    }
}

pub fn bdd(m: &BddManager, f: &Formula) -> Bdd {
    match f {
        Formula::Const(b) => m.constant(*b),
        Formula::Var(i) => m.var(VarId(*i as u32)).expect("registered"),
        Formula::Not(a) => bdd(m, a).not(),
        Formula::And(a, b) => bdd(m, a).and(&bdd(m, b)),
        Formula::Or(a, b) => bdd(m, a).or(&bdd(m, b)),
        Formula::Xor(a, b) => bdd(m, a).xor(&bdd(m, b)),
    }
}

/// Whether `b` computes `t` on every row.
pub fn agrees(b: &Bdd, t: &TruthTable) -> bool {
    (0..1usize << t.vars).all(|r| b.eval(|v| r >> v.0 & 1 == 1) == t.get(r))
}

/// One randomized trial of every operation. Returns the first mismatch.
pub fn trial(rng: &mut impl Rng, vars: usize) -> Result<(), String> {
    let m = BddManager::new();
    for _ in 0..vars {
        m.new_var();
    }
    let fs: Vec<Formula> = (0..3).map(|_| random_formula(rng, vars, 5)).collect();
    let ts: Vec<TruthTable> = fs.iter().map(|f| table(f, vars)).collect();
    let bs: Vec<Bdd> = fs.iter().map(|f| bdd(&m, f)).collect();
    let (f, g, h) = (&bs[0], &bs[1], &bs[2]);
    let (tf, tg, th) = (&ts[0], &ts[1], &ts[2]);
    let check = |name: &str, b: &Bdd, t: &TruthTable| {
        if agrees(b, t) {
            Ok(())
        } else {
            Err(format!("{name} mismatch on {fs:?}"))
        }
    };
    check("build", f, tf)?;
    check("not", &f.not(), &tf.not())?;
    check("and", &f.and(g), &tf.and(tg))?;
    check("or", &f.or(g), &tf.or(tg))?;
    check("xor", &f.xor(g), &tf.xor(tg))?;
    check("iff", &f.iff(g), &tf.xor(tg).not())?;
    check("implies", &f.implies(g), &tf.not().or(tg))?;
    check("ite", &f.ite(g, h), &tf.ite(tg, th))?;
    if f.leq(g) != tf.implies(tg) {
        return Err("leq mismatch".into());
    }
    // identical functions must share a root
    let same = tf == tg;
    if (f == g) != same {
        return Err(format!("canonicity: tables equal {same}, roots equal {}", f == g));
    }
    let qs: Vec<usize> = (0..vars).filter(|_| rng.random_bool(0.4)).collect();
    let qv: Vec<VarId> = qs.iter().map(|&i| VarId(i as u32)).collect();
    let set = m.var_set(&qv).map_err(|e| e.to_string())?;
    check("exists", &f.exists(&set), &tf.exists_all(&qs))?;
    check("forall", &f.forall(&set), &tf.forall_all(&qs))?;
    check("and_exists", &f.and_exists(g, &set), &tf.and(tg).exists_all(&qs))?;
    let v = rng.random_range(0..vars);
    check("cofactor", &f.cofactor(VarId(v as u32), true), &tf.compose(v, &TruthTable::constant(vars, true)))?;
    let w = rng.random_range(0..vars);
    let subst_b = [(VarId(v as u32), g), (VarId(w as u32), h)];
    let subst_t = if v == w { vec![(v, th)] } else { vec![(v, tg), (w, th)] };
    let composed = f.compose(if v == w { &subst_b[1..] } else { &subst_b[..] });
    check("compose", &composed, &tf.compose_all(&subst_t))?;
    if tg.count() > 0 {
        let r = f.restrict(g).map_err(|e| e.to_string())?;
        let rt = TruthTable::from_fn(vars, |row| r.eval(|x| row >> x.0 & 1 == 1));
        if !tg.implies(&tf.xor(&rt).not()) {
            return Err("restrict disagrees on the care set".into());
        }
    }
    let count = f.sat_count(vars);
    if count != tf.count() as f64 {
        return Err(format!("sat_count {count} vs {}", tf.count()));
    }
    let support: Vec<usize> = f.support().iter().map(|v| v.0 as usize).collect();
    let expect: Vec<usize> = (0..vars).filter(|&i| tf.depends_on(i)).collect();
    let mut got = support.clone();
    got.sort_unstable();
    if got != expect {
        return Err(format!("support {got:?} vs {expect:?}"));
    }
    if !tf.rows.iter().all(|&b| !b) {
        let all: Vec<VarId> = (0..vars).map(|i| VarId(i as u32)).collect();
        let mt = f.pick_minterm(&all).map_err(|e| e.to_string())?;
        let row = mt.iter().enumerate().fold(0, |acc, (i, &b)| acc | (b as usize) << i);
        if !tf.get(row) {
            return Err("pick_minterm is not a model".into());
        }
        let cube = f.prime_implicant().map_err(|e| e.to_string())?;
        let ct = cube
            .0
            .iter()
            .fold(TruthTable::constant(vars, true), |acc, &(v, p)| {
                let lit = TruthTable::var(vars, v.0 as usize);
                acc.and(&if p { lit } else { lit.not() })
            });
        if !ct.implies(tf) {
            return Err("prime implicant does not imply f".into());
        }
    }
    m.reorder();
    check("after reorder", f, tf)?;
    check("and after reorder", &f.and(g), &tf.and(tg))?;
    m.audit()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn a_few_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=8 {
            for _ in 0..20 {
                trial(&mut rng, n).unwrap();
            }
        }
    }
}

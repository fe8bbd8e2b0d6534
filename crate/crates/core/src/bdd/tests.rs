use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn vars(m: &BddManager, n: usize) -> Vec<VarId> {
    (0..n).map(|_| m.new_var()).collect()
}

/// Builds a function from a truth table indexed by the assignment bits.
fn from_table(m: &BddManager, vs: &[VarId], table: &[bool]) -> Bdd {
    let mut acc = m.ff();
    for (row, &val) in table.iter().enumerate() {
        if val {
            let lits: Vec<(VarId, bool)> = vs
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, row >> i & 1 == 1))
                .collect();
            acc = acc.or(&m.cube(&lits).unwrap());
        }
    }
    acc
}

fn table_of(f: &Bdd, vs: &[VarId]) -> Vec<bool> {
    (0..1usize << vs.len())
        .map(|row| f.eval(|v| vs.iter().position(|&w| w == v).is_some_and(|i| row >> i & 1 == 1)))
        .collect()
}

#[test]
fn projection_and_negation() {
    let m = BddManager::new();
    let x = m.new_var();
    let f = m.var(x).unwrap();
    assert!(f.eval(|_| true));
    assert_eq!(f, m.var(x).unwrap());
    assert!(!f.not().eval(|_| true));
    assert_eq!(f.not().not(), f);
    assert_eq!(m.var(VarId(7)), Err(BddError::UnregisteredVariable(VarId(7))));
    m.audit().unwrap();
}

#[test]
fn apply_identities() {
    let m = BddManager::new();
    let vs = vars(&m, 3);
    let f = &m.var(vs[0]).unwrap() | &(&m.var(vs[1]).unwrap() & &m.var(vs[2]).unwrap());
    assert_eq!(f.and(&m.tt()), f);
    assert!(f.xor(&f).is_false());
    assert!(f.or(&f.not()).is_true());
    let other = BddManager::new();
    assert_eq!(f.apply(BinOp::And, &other.tt()), Err(BddError::ManagerMismatch));
    m.audit().unwrap();
}

#[test]
fn quantification() {
    let m = BddManager::new();
    let vs = vars(&m, 2);
    let (x, y) = (m.var(vs[0]).unwrap(), m.var(vs[1]).unwrap());
    let sx = m.var_set(&[vs[0]]).unwrap();
    assert_eq!((&x & &y).exists(&sx), y);
    assert_eq!((&x | &y).forall(&sx), y);
    let none = m.var_set(&[]).unwrap();
    assert_eq!(x.and_exists(&m.tt(), &none), x);
    assert!(x.and_exists(&x.not(), &sx).is_false());
}

#[test]
fn composition() {
    let m = BddManager::new();
    let vs = vars(&m, 3);
    let (x, y, z) = (m.var(vs[0]).unwrap(), m.var(vs[1]).unwrap(), m.var(vs[2]).unwrap());
    let g = &y ^ &z;
    assert_eq!(x.compose(&[(vs[0], &g)]), g);
    let xy = &x & &y;
    assert_eq!(xy.compose(&[(vs[0], &y), (vs[1], &x)]), xy);
    // swap in a non-symmetric function
    let f = &x & &y.not();
    assert_eq!(f.compose(&[(vs[0], &y), (vs[1], &x)]), &y & &x.not());
}

#[test]
fn restrict_agrees_on_care_set() {
    let m = BddManager::new();
    let vs = vars(&m, 2);
    let (x, y) = (m.var(vs[0]).unwrap(), m.var(vs[1]).unwrap());
    let f = &x & &y;
    assert_eq!(f.restrict(&m.tt()).unwrap(), f);
    let r = f.restrict(&x).unwrap();
    assert_eq!(&r & &x, &f & &x);
    assert_eq!(f.restrict(&m.ff()), Err(BddError::EmptyCareSet));
}

#[test]
fn prime_implicants() {
    let m = BddManager::new();
    let vs = vars(&m, 3);
    let (x, y, z) = (m.var(vs[0]).unwrap(), m.var(vs[1]).unwrap(), m.var(vs[2]).unwrap());
    assert_eq!(x.prime_implicant().unwrap(), Cube(vec![(vs[0], true)]));
    let f = &x | &(&y & &z);
    let c = f.prime_implicant().unwrap();
    assert!(c == Cube(vec![(vs[0], true)]) || c == Cube(vec![(vs[1], true), (vs[2], true)]));
    assert_eq!(m.ff().prime_implicant(), Err(BddError::Unsatisfiable));
}

#[test]
fn minterm_tie_breaks_to_zero() {
    let m = BddManager::new();
    let vs = vars(&m, 2);
    assert_eq!(m.tt().pick_minterm(&vs).unwrap(), vec![false, false]);
    assert_eq!(m.var(vs[0]).unwrap().pick_minterm(&vs).unwrap(), vec![true, false]);
    assert_eq!(m.ff().pick_minterm(&vs), Err(BddError::Unsatisfiable));
}

#[test]
fn random_tables_are_canonical() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = BddManager::new();
    let vs = vars(&m, 5);
    for _ in 0..50 {
        let t: Vec<bool> = (0..32).map(|_| rng.random()).collect();
        let f = from_table(&m, &vs, &t);
        assert_eq!(table_of(&f, &vs), t);
        let g = from_table(&m, &vs, &t);
        assert_eq!(f, g);
    }
    m.audit().unwrap();
}

#[test]
fn eager_reclamation_leaves_no_garbage() {
    let m = BddManager::new();
    let vs = vars(&m, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let keep;
    {
        let mut acc = m.ff();
        for _ in 0..40 {
            let mut lits: Vec<(VarId, bool)> = Vec::new();
            for &v in &vs {
                if rng.random() {
                    lits.push((v, rng.random()));
                }
            }
            acc = acc.or(&m.cube(&lits).unwrap());
        }
        keep = acc.exists(&m.var_set(&vs[..2]).unwrap());
    }
    m.audit().unwrap();
    assert_eq!(m.node_count(), m.shared_size(&[&keep]));
    drop(keep);
    assert_eq!(m.node_count(), 0);
}

#[test]
fn deferred_reclamation_sweeps_on_demand() {
    let m = BddManager::with_config(Config {
        reclamation: Reclamation::Deferred,
        ..Config::default()
    });
    let vs = vars(&m, 6);
    let f = {
        let a = &m.var(vs[0]).unwrap() & &m.var(vs[3]).unwrap();
        let b = &m.var(vs[1]).unwrap() & &m.var(vs[4]).unwrap();
        &a | &b
    };
    assert!(m.node_count() > m.shared_size(&[&f]));
    m.collect_garbage();
    assert_eq!(m.node_count(), m.shared_size(&[&f]));
    m.audit().unwrap();
}

#[test]
fn sifting_fixes_interleaving_sensitive_order() {
    let n = 8;
    let m = BddManager::new();
    // a1..an then b1..bn: exponential for a1b1 | ... | anbn
    let a = vars(&m, n);
    let b = vars(&m, n);
    let mut f = m.ff();
    for i in 0..n {
        f = f.or(&(&m.var(a[i]).unwrap() & &m.var(b[i]).unwrap()));
    }
    let before = f.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let samples: Vec<Vec<bool>> = (0..100).map(|_| (0..2 * n).map(|_| rng.random()).collect()).collect();
    let expected: Vec<bool> = samples.iter().map(|s| f.eval_slice(s)).collect();
    let report = m.reorder();
    m.audit().unwrap();
    let after = f.node_count();
    assert!(before >= 1 << n, "initial order should be exponential, got {before}");
    assert!(after <= 2 * n + 2, "sifting should reach a linear size, got {after}");
    assert!(report.nodes_after <= report.nodes_before);
    let got: Vec<bool> = samples.iter().map(|s| f.eval_slice(s)).collect();
    assert_eq!(got, expected);
}

#[test]
fn reorder_on_empty_manager_is_noop() {
    let m = BddManager::new();
    let r = m.reorder();
    assert_eq!(r.nodes_before, 0);
    assert_eq!(r.nodes_after, 0);
    let _ = vars(&m, 3);
    assert_eq!(m.reorder().swaps, 0);
}

#[test]
fn sat_count_and_support() {
    let m = BddManager::new();
    let vs = vars(&m, 3);
    let f = &m.var(vs[0]).unwrap() | &m.var(vs[2]).unwrap();
    assert_eq!(f.sat_count(3), 6.0);
    assert_eq!(f.support(), vec![vs[0], vs[2]]);
    assert!(m.to_dot(&[("f", &f)]).contains("digraph"));
}

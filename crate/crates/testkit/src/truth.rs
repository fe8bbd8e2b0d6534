//! Truth tables over at most a handful of variables. Row `r` assigns
//! variable `i` the bit `r >> i & 1`.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub vars: usize,
    pub rows: Vec<bool>,
}

impl TruthTable {
    pub fn constant(vars: usize, v: bool) -> Self {
        TruthTable {
            vars,
            rows: vec![v; 1 << vars],
        }
    }

    pub fn var(vars: usize, i: usize) -> Self {
        Self::from_fn(vars, |r| r >> i & 1 == 1)
    }

    pub fn from_fn(vars: usize, f: impl Fn(usize) -> bool) -> Self {
        TruthTable {
            vars,
            rows: (0..1usize << vars).map(f).collect(),
        }
    }

    pub fn get(&self, row: usize) -> bool {
        self.rows[row]
    }

    fn zip(&self, o: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        assert_eq!(self.vars, o.vars);
        Self::from_fn(self.vars, |r| f(self.rows[r], o.rows[r]))
    }

    pub fn not(&self) -> Self {
        Self::from_fn(self.vars, |r| !self.rows[r])
    }

    pub fn and(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a && b)
    }

    pub fn or(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a || b)
    }

    pub fn xor(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a != b)
    }

    pub fn ite(&self, t: &Self, e: &Self) -> Self {
        Self::from_fn(self.vars, |r| if self.rows[r] { t.rows[r] } else { e.rows[r] })
    }

    pub fn exists(&self, i: usize) -> Self {
        Self::from_fn(self.vars, |r| self.rows[r & !(1 << i)] || self.rows[r | 1 << i])
    }

    pub fn forall(&self, i: usize) -> Self {
        Self::from_fn(self.vars, |r| self.rows[r & !(1 << i)] && self.rows[r | 1 << i])
    }

    pub fn exists_all(&self, vs: &[usize]) -> Self {
        vs.iter().fold(self.clone(), |t, &v| t.exists(v))
    }

    pub fn forall_all(&self, vs: &[usize]) -> Self {
        vs.iter().fold(self.clone(), |t, &v| t.forall(v))
    }

    /// Substitutes `g` for variable `i`.
    pub fn compose(&self, i: usize, g: &Self) -> Self {
        Self::from_fn(self.vars, |r| {
            let row = if g.rows[r] { r | 1 << i } else { r & !(1 << i) };
            self.rows[row]
        })
    }

    /// Substitutes all pairs at once.
    pub fn compose_all(&self, subst: &[(usize, &Self)]) -> Self {
        Self::from_fn(self.vars, |r| {
            let mut row = r;
            for (i, g) in subst {
                row = if g.rows[r] { row | 1 << i } else { row & !(1 << i) };
            }
            self.rows[row]
        })
    }

    pub fn count(&self) -> usize {
        self.rows.iter().filter(|&&b| b).count()
    }

    pub fn implies(&self, o: &Self) -> bool {
        self.rows.iter().zip(&o.rows).all(|(&a, &b)| !a || b)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        (0..self.rows.len()).any(|r| self.rows[r] != self.rows[r ^ 1 << i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantifiers_and_substitution() {
        let x = TruthTable::var(3, 0);
        let y = TruthTable::var(3, 1);
        let f = x.and(&y);
        assert_eq!(f.exists(0), y);
        assert_eq!(f.forall(0), TruthTable::constant(3, false));
        let z = TruthTable::var(3, 2);
        assert_eq!(f.compose(0, &z), z.and(&y));
        assert!(f.implies(&x));
        assert!(!f.depends_on(2));
    }
}

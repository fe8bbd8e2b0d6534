//! A derivative-based matcher for expressions whose letters are predicates
//! over input vectors.

use std::collections::BTreeSet;
use std::rc::Rc;

type Letter = Rc<dyn Fn(&[bool]) -> bool>;

/// Expressions refer to letters by index into a [`Alphabet`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Re {
    Nothing,
    Empty,
    Sym(usize),
    Cat(Box<Re>, Box<Re>),
    Or(BTreeSet<Re>),
    Rep(Box<Re>),
}

#[derive(Default, Clone)]
pub struct Alphabet {
    letters: Vec<Letter>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sym(&mut self, p: impl Fn(&[bool]) -> bool + 'static) -> Re {
        self.letters.push(Rc::new(p));
        Re::Sym(self.letters.len() - 1)
    }

    pub fn holds(&self, i: usize, v: &[bool]) -> bool {
        (self.letters[i])(v)
    }
}

pub fn cat(a: Re, b: Re) -> Re {
    match (a, b) {
        (Re::Nothing, _) | (_, Re::Nothing) => Re::Nothing,
        (Re::Empty, x) | (x, Re::Empty) => x,
        (a, b) => Re::Cat(Box::new(a), Box::new(b)),
    }
}

pub fn cats(parts: impl IntoIterator<Item = Re>) -> Re {
    parts.into_iter().fold(Re::Empty, cat)
}

pub fn or(a: Re, b: Re) -> Re {
    let mut set = BTreeSet::new();
    for x in [a, b] {
        match x {
            Re::Nothing => {}
            Re::Or(s) => set.extend(s),
            x => {
                set.insert(x);
            }
        }
    }
    match set.len() {
        0 => Re::Nothing,
        1 => set.into_iter().next().expect("one"),
        _ => Re::Or(set),
    }
}

pub fn rep(a: Re) -> Re {
    match a {
        Re::Nothing | Re::Empty => Re::Empty,
        r @ Re::Rep(_) => r,
        a => Re::Rep(Box::new(a)),
    }
}

pub fn times(a: &Re, n: usize) -> Re {
    cats(std::iter::repeat_n(a.clone(), n))
}

pub fn nullable(r: &Re) -> bool {
    match r {
        Re::Nothing | Re::Sym(_) => false,
        Re::Empty | Re::Rep(_) => true,
        Re::Cat(a, b) => nullable(a) && nullable(b),
        Re::Or(s) => s.iter().any(nullable),
    }
}

pub fn derive(al: &Alphabet, r: &Re, v: &[bool]) -> Re {
    match r {
        Re::Nothing | Re::Empty => Re::Nothing,
        Re::Sym(i) => {
            if al.holds(*i, v) {
                Re::Empty
            } else {
                Re::Nothing
            }
        }
        Re::Cat(a, b) => {
            let left = cat(derive(al, a, v), (**b).clone());
            if nullable(a) {
                or(left, derive(al, b, v))
            } else {
                left
            }
        }
        Re::Or(s) => s.iter().fold(Re::Nothing, |acc, x| or(acc, derive(al, x, v))),
        Re::Rep(a) => cat(derive(al, a, v), r.clone()),
    }
}

/// For each prefix length 1..=word.len(), whether that prefix matches.
pub fn prefix_matches(al: &Alphabet, r: &Re, word: &[Vec<bool>]) -> Vec<bool> {
    let mut cur = r.clone();
    word.iter()
        .map(|v| {
            cur = derive(al, &cur, v);
            nullable(&cur)
        })
        .collect()
}

//! Hash-consed NNF concepts used by the tableau.

use std::collections::HashMap;

use crate::syntax::{Concept, Symbol};

pub(crate) type Cid = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Top,
    Bottom,
    Atom(u32),
    NegAtom(u32),
    And(Vec<Cid>),
    Or(Vec<Cid>),
    /// `≥n R.C` with `n >= 1`; `∃R.C` is `≥1 R.C`.
    AtLeast { n: u32, role: u32, filler: Cid },
    /// `≤n R.C` with `n >= 1`; `≤0 R.C` is stored as `∀R.¬C`.
    AtMost { n: u32, role: u32, filler: Cid },
    Forall { role: u32, filler: Cid },
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Pool {
    nodes: Vec<Node>,
    ids: HashMap<Node, Cid>,
    neg: Vec<Option<Cid>>,
    atoms: Vec<Symbol>,
    atom_ids: HashMap<Symbol, u32>,
    roles: Vec<Symbol>,
    role_ids: HashMap<Symbol, u32>,
}

pub(crate) const TOP: Cid = 0;
pub(crate) const BOTTOM: Cid = 1;

impl Pool {
    pub fn new() -> Self {
        let mut p = Pool::default();
        let t = p.raw(Node::Top);
        let b = p.raw(Node::Bottom);
        debug_assert_eq!((t, b), (TOP, BOTTOM));
        p
    }

    fn raw(&mut self, node: Node) -> Cid {
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        let id = self.nodes.len() as Cid;
        self.nodes.push(node.clone());
        self.neg.push(None);
        self.ids.insert(node, id);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: Cid) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn atom_id(&mut self, name: &Symbol) -> u32 {
        if let Some(&i) = self.atom_ids.get(name) {
            return i;
        }
        let i = self.atoms.len() as u32;
        self.atoms.push(name.clone());
        self.atom_ids.insert(name.clone(), i);
        i
    }

    pub fn role_id(&mut self, name: &Symbol) -> u32 {
        if let Some(&i) = self.role_ids.get(name) {
            return i;
        }
        let i = self.roles.len() as u32;
        self.roles.push(name.clone());
        self.role_ids.insert(name.clone(), i);
        i
    }

    pub fn role_count(&self) -> usize {
        self.roles.len()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    fn junction(&mut self, conj: bool, items: Vec<Cid>) -> Cid {
        let (unit, zero) = if conj { (TOP, BOTTOM) } else { (BOTTOM, TOP) };
        let mut flat = Vec::with_capacity(items.len());
        for id in items {
            match (&self.nodes[id as usize], conj) {
                (Node::And(xs), true) | (Node::Or(xs), false) => flat.extend(xs.iter().copied()),
                _ => flat.push(id),
            }
        }
        flat.retain(|&x| x != unit);
        if flat.contains(&zero) {
            return zero;
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => unit,
            1 => flat[0],
            _ => self.raw(if conj { Node::And(flat) } else { Node::Or(flat) }),
        }
    }

    pub fn and(&mut self, items: Vec<Cid>) -> Cid {
        self.junction(true, items)
    }

    pub fn or(&mut self, items: Vec<Cid>) -> Cid {
        self.junction(false, items)
    }

    fn at_least(&mut self, n: u32, role: u32, filler: Cid) -> Cid {
        if n == 0 {
            TOP
        } else if filler == BOTTOM {
            BOTTOM
        } else {
            self.raw(Node::AtLeast { n, role, filler })
        }
    }

    fn at_most(&mut self, n: u32, role: u32, filler: Cid) -> Cid {
        if n == 0 {
            let nf = self.negate(filler);
            self.forall(role, nf)
        } else if filler == BOTTOM {
            TOP
        } else {
            self.raw(Node::AtMost { n, role, filler })
        }
    }

    fn forall(&mut self, role: u32, filler: Cid) -> Cid {
        if filler == TOP {
            TOP
        } else {
            self.raw(Node::Forall { role, filler })
        }
    }

    /// Interns the NNF of `c` (or of `¬c` when `positive` is false).
    pub fn intern(&mut self, c: &Concept, positive: bool) -> Cid {
        match (c, positive) {
            (Concept::Top, true) | (Concept::Bottom, false) => TOP,
            (Concept::Top, false) | (Concept::Bottom, true) => BOTTOM,
            (Concept::Atomic(name), _) => {
                let a = self.atom_id(name);
                self.raw(if positive { Node::Atom(a) } else { Node::NegAtom(a) })
            }
            (Concept::Not(inner), _) => self.intern(inner, !positive),
            (Concept::And(l, r), true) | (Concept::Or(l, r), false) => {
                let l = self.intern(l, positive);
                let r = self.intern(r, positive);
                self.and(vec![l, r])
            }
            (Concept::Or(l, r), true) | (Concept::And(l, r), false) => {
                let l = self.intern(l, positive);
                let r = self.intern(r, positive);
                self.or(vec![l, r])
            }
            (Concept::Exists(role, f), true) => {
                let r = self.role_id(role);
                let f = self.intern(f, true);
                self.at_least(1, r, f)
            }
            (Concept::Exists(role, f), false) => {
                let r = self.role_id(role);
                let f = self.intern(f, false);
                self.forall(r, f)
            }
            (Concept::Forall(role, f), true) => {
                let r = self.role_id(role);
                let f = self.intern(f, true);
                self.forall(r, f)
            }
            (Concept::Forall(role, f), false) => {
                let r = self.role_id(role);
                let f = self.intern(f, false);
                self.at_least(1, r, f)
            }
            (Concept::AtLeast(k, role, f), true) => {
                let r = self.role_id(role);
                let f = self.intern(f, true);
                self.at_least(k.n, r, f)
            }
            (Concept::AtLeast(k, role, f), false) => {
                if k.n == 0 {
                    return BOTTOM;
                }
                let r = self.role_id(role);
                let f = self.intern(f, true);
                self.at_most(k.n - 1, r, f)
            }
            (Concept::AtMost(k, role, f), true) => {
                let r = self.role_id(role);
                let f = self.intern(f, true);
                self.at_most(k.n, r, f)
            }
            (Concept::AtMost(k, role, f), false) => {
                let r = self.role_id(role);
                let f = self.intern(f, true);
                self.at_least(k.n + 1, r, f)
            }
        }
    }

    /// NNF complement of an interned concept.
    pub fn negate(&mut self, id: Cid) -> Cid {
        if let Some(n) = self.neg[id as usize] {
            return n;
        }
        let n = match self.nodes[id as usize].clone() {
            Node::Top => BOTTOM,
            Node::Bottom => TOP,
            Node::Atom(a) => self.raw(Node::NegAtom(a)),
            Node::NegAtom(a) => self.raw(Node::Atom(a)),
            Node::And(xs) => {
                let ns = xs.into_iter().map(|x| self.negate(x)).collect();
                self.or(ns)
            }
            Node::Or(xs) => {
                let ns = xs.into_iter().map(|x| self.negate(x)).collect();
                self.and(ns)
            }
            Node::AtLeast { n, role, filler } => self.at_most(n - 1, role, filler),
            Node::AtMost { n, role, filler } => self.at_least(n + 1, role, filler),
            Node::Forall { role, filler } => {
                let nf = self.negate(filler);
                self.at_least(1, role, nf)
            }
        };
        self.neg[id as usize] = Some(n);
        self.neg[n as usize] = Some(id);
        n
    }

    /// Computes complements for every node, closing the pool under negation.
    pub fn close_under_negation(&mut self) {
        let mut i = 0;
        while i < self.nodes.len() {
            self.negate(i as Cid);
            i += 1;
        }
    }

    /// Marks every concept whose complement is a disjunct of some `Or`.
    pub fn disjunct_complements(&self) -> Vec<bool> {
        let mut out = vec![false; self.nodes.len()];
        for n in &self.nodes {
            if let Node::Or(xs) = n {
                for &y in xs {
                    out[self.neg(y) as usize] = true;
                }
            }
        }
        out
    }

    /// Complement of a node; only valid after [`Pool::close_under_negation`].
    pub fn neg(&self, id: Cid) -> Cid {
        self.neg[id as usize].expect("pool closed under negation")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negation_is_an_involution() {
        let mut p = Pool::new();
        let c = Concept::and(
            Concept::at_most(2, "r", Concept::atom("A")),
            Concept::or(Concept::forall("s", Concept::not(Concept::atom("B"))), Concept::atom("C")),
        );
        let id = p.intern(&c, true);
        p.close_under_negation();
        for i in 0..p.len() as Cid {
            assert_eq!(p.neg(p.neg(i)), i);
        }
        let nid = p.intern(&c, false);
        assert_eq!(p.neg(id), nid);
    }

    #[test]
    fn at_most_zero_is_forall() {
        let mut p = Pool::new();
        let a = p.intern(&Concept::at_most(0, "r", Concept::atom("A")), true);
        let b = p.intern(&Concept::forall("r", Concept::not(Concept::atom("A"))), true);
        assert_eq!(a, b);
    }

    #[test]
    fn junctions_flatten_and_sort() {
        let mut p = Pool::new();
        let abc = Concept::and(Concept::atom("A"), Concept::and(Concept::atom("B"), Concept::atom("C")));
        let cba = Concept::and(Concept::and(Concept::atom("C"), Concept::atom("B")), Concept::atom("A"));
        assert_eq!(p.intern(&abc, true), p.intern(&cba, true));
        assert_eq!(p.intern(&Concept::and(Concept::Top, Concept::atom("A")), true), p.intern(&Concept::atom("A"), true));
    }
}

//! Completion-graph tableau for ALCQ with ABox, absorption and pairwise
//! blocking.
//!
//! Search is depth-first over a trailed graph: every mutation is logged so
//! a choice point only records a trail mark. Backtracking is
//! dependency-directed. Each step saturates the
//! deterministic rules, then applies the first applicable rule of
//! `⊔`, choose, `≤`-merge and generating `≥`, in that order.

use std::cell::RefCell;
use std::collections::HashMap;

use super::pool::{Cid, Node, Pool, BOTTOM, TOP};
use crate::syntax::{Axiom, Concept, Symbol};

/// One TBox consequence of absorbing a subsumption.
#[derive(Clone, Debug)]
pub(crate) enum Gci {
    Global(Cid),
    Unfold(u32, Cid),
}

#[derive(Clone, Debug)]
pub(crate) enum Item {
    Tbox(Vec<Gci>),
    Assert(u32, Cid),
    Role(u32, u32, u32),
    /// A fresh element carrying the concept; distinct from every individual.
    Witness(Cid),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Exhausted;

/// Satisfiability verdicts of anonymous-node labels, per TBox.
type LabelCache = HashMap<Vec<Cid>, bool>;

/// Labels cached per TBox before the cache is reset.
const CACHE_LIMIT: usize = 200_000;
/// Nesting bound for label sub-checks.
const MAX_NESTING: usize = 1000;

/// Compiled axioms sharing one concept pool.
#[derive(Clone, Debug)]
pub(crate) struct Problem {
    pool: Pool,
    items: Vec<Item>,
    individuals: HashMap<Symbol, u32>,
    words: usize,
    caches: RefCell<HashMap<Vec<u32>, LabelCache>>,
}

impl Problem {
    pub fn new() -> Self {
        Problem {
            pool: Pool::new(),
            items: Vec::new(),
            individuals: HashMap::new(),
            words: 0,
            caches: RefCell::new(HashMap::new()),
        }
    }

    fn individual(&mut self, name: &Symbol) -> u32 {
        let next = self.individuals.len() as u32;
        *self.individuals.entry(name.clone()).or_insert(next)
    }

    fn absorb(&mut self, lhs: Cid, rhs: Cid, out: &mut Vec<Gci>) {
        if rhs == TOP || lhs == BOTTOM {
            return;
        }
        match self.pool.node(lhs).clone() {
            Node::Top => out.push(Gci::Global(rhs)),
            Node::Atom(a) => out.push(Gci::Unfold(a, rhs)),
            Node::Or(xs) => {
                for x in xs {
                    self.absorb(x, rhs, out);
                }
            }
            Node::And(xs) => {
                let pick = xs.iter().position(|&x| matches!(self.pool.node(x), Node::Atom(_)));
                match pick {
                    Some(i) => {
                        let Node::Atom(a) = *self.pool.node(xs[i]) else { unreachable!() };
                        let mut parts: Vec<Cid> = xs
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, &x)| self.pool.negate(x))
                            .collect();
                        parts.push(rhs);
                        let body = self.pool.or(parts);
                        out.push(Gci::Unfold(a, body));
                    }
                    None => {
                        let nl = self.pool.negate(lhs);
                        let g = self.pool.or(vec![nl, rhs]);
                        out.push(Gci::Global(g));
                    }
                }
            }
            _ => {
                let nl = self.pool.negate(lhs);
                let g = self.pool.or(vec![nl, rhs]);
                out.push(Gci::Global(g));
            }
        }
    }

    /// Adds an item that holds iff `ax` holds; returns its index.
    pub fn push_axiom(&mut self, ax: &Axiom) -> usize {
        let item = match ax {
            Axiom::Subsumption { lhs, rhs } => {
                let l = self.pool.intern(lhs, true);
                let r = self.pool.intern(rhs, true);
                let mut gcis = Vec::new();
                self.absorb(l, r, &mut gcis);
                Item::Tbox(gcis)
            }
            Axiom::ConceptAssertion {
                concept,
                individual,
            } => {
                let c = self.pool.intern(concept, true);
                Item::Assert(self.individual(individual), c)
            }
            Axiom::RoleAssertion {
                role,
                subject,
                object,
            } => {
                let r = self.pool.role_id(role);
                Item::Role(r, self.individual(subject), self.individual(object))
            }
        };
        self.items.push(item);
        self.items.len() - 1
    }

    /// Adds an item whose satisfiability refutes `ax`. Role assertions have no
    /// ALCQ complement and yield `None`.
    pub fn push_refutation(&mut self, ax: &Axiom) -> Option<usize> {
        let item = match ax {
            Axiom::Subsumption { lhs, rhs } => {
                let c = self.pool.intern(&Concept::and(lhs.clone(), Concept::not(rhs.clone())), true);
                Item::Witness(c)
            }
            Axiom::ConceptAssertion {
                concept,
                individual,
            } => {
                let c = self.pool.intern(concept, false);
                Item::Assert(self.individual(individual), c)
            }
            Axiom::RoleAssertion { .. } => return None,
        };
        self.items.push(item);
        Some(self.items.len() - 1)
    }

    /// Closes the pool; must be called before [`Problem::satisfiable`].
    pub fn finish(&mut self) {
        self.pool.close_under_negation();
        self.words = self.pool.len().div_ceil(64);
    }

    pub fn role_count(&self) -> usize {
        self.pool.role_count()
    }

    /// Decides whether the selected items have a common model. `budget`
    /// bounds nodes plus alternatives explored and is decremented in place.
    pub fn satisfiable(&self, active: &[usize], budget: &mut usize) -> Result<bool, Exhausted> {
        debug_assert!(self.words > 0, "Problem::finish not called");
        let cache = RefCell::new(LabelCache::new());
        let mut ctx = Ctx {
            pool: &self.pool,
            globals: Vec::new(),
            unfold: vec![Vec::new(); self.pool.atom_count()],
            in_or: Vec::new(),
            words: self.words,
            cache: &cache,
            nesting: RefCell::new(Vec::new()),
        };
        let mut named: Vec<Option<u32>> = vec![None; self.individuals.len()];
        let mut g = Graph::default();
        let mut pending: Vec<(u32, Cid)> = Vec::new();
        let mut roles: Vec<(u32, u32, u32)> = Vec::new();
        for &i in active {
            match &self.items[i] {
                Item::Tbox(gcis) => {
                    for gci in gcis {
                        match *gci {
                            Gci::Global(c) => {
                                if !ctx.globals.contains(&c) {
                                    ctx.globals.push(c)
                                }
                            }
                            Gci::Unfold(a, c) => ctx.unfold[a as usize].push(c),
                        }
                    }
                }
                Item::Assert(a, c) => {
                    let x = g.named_node(&mut named, *a, self.words);
                    pending.push((x, *c));
                }
                Item::Role(r, a, b) => {
                    let x = g.named_node(&mut named, *a, self.words);
                    let y = g.named_node(&mut named, *b, self.words);
                    roles.push((*r, x, y));
                }
                Item::Witness(c) => {
                    let x = g.push_node(NONE, true, Dep::default(), self.words);
                    pending.push((x, *c));
                }
            }
        }
        if g.len() == 0 {
            g.push_node(NONE, true, Dep::default(), self.words);
        }
        ctx.globals.sort_unstable();
        for u in &mut ctx.unfold {
            u.sort_unstable();
            u.dedup();
        }
        ctx.in_or = self.pool.disjunct_complements();
        let key = ctx.tbox_key();
        *cache.borrow_mut() = self.caches.borrow_mut().remove(&key).unwrap_or_default();
        let result = ctx.run(g, roles, pending, budget);
        let mut done = cache.into_inner();
        if done.len() > CACHE_LIMIT {
            done.clear();
        }
        self.caches.borrow_mut().insert(key, done);
        result
    }
}

impl Ctx<'_> {
    fn tbox_key(&self) -> Vec<u32> {
        let mut key = self.globals.clone();
        for (a, u) in self.unfold.iter().enumerate() {
            if !u.is_empty() {
                key.push(u32::MAX);
                key.push(a as u32);
                key.extend(u);
            }
        }
        key
    }

    fn run(
        &self,
        mut g: Graph,
        roles: Vec<(u32, u32, u32)>,
        pending: Vec<(u32, Cid)>,
        budget: &mut usize,
    ) -> Result<bool, Exhausted> {
        let none = Dep::default();
        for x in 0..g.len() as u32 {
            if self.init_node(&mut g, x).is_err() {
                return Ok(false);
            }
        }
        for (r, x, y) in roles {
            if self.connect(&mut g, x, y, 1u64 << r, &none).is_err() {
                return Ok(false);
            }
        }
        for (x, c) in pending {
            if self.add(&mut g, x, c, &none).is_err() {
                return Ok(false);
            }
        }
        self.search(&mut g, budget)
    }

    /// Satisfiability of a lone element carrying `label`, from the cache or
    /// a nested check. `None` when the label is already being checked
    /// further up or nesting is too deep.
    fn label_sat(&self, label: &[Cid], budget: &mut usize) -> Result<Option<bool>, Exhausted> {
        if let Some(&v) = self.cache.borrow().get(label) {
            return Ok(Some(v));
        }
        {
            let nesting = self.nesting.borrow();
            if nesting.len() >= MAX_NESTING || nesting.iter().any(|l| l.as_slice() == label) {
                return Ok(None);
            }
        }
        self.nesting.borrow_mut().push(label.to_vec());
        let mut g = Graph::default();
        let root = g.push_node(NONE, true, Dep::default(), self.words);
        let pending = label.iter().map(|&c| (root, c)).collect();
        let result = stacker::maybe_grow(256 * 1024, 4 * 1024 * 1024, || self.run(g, Vec::new(), pending, budget));
        self.nesting.borrow_mut().pop();
        let v = result?;
        self.cache.borrow_mut().insert(label.to_vec(), v);
        Ok(Some(v))
    }
}

const NONE: u32 = u32::MAX;

/// Set of choice-point levels a derivation depends on.
#[derive(Clone, Default, Debug, PartialEq, Eq)]
struct Dep(Vec<u64>);

impl Dep {
    fn level(l: usize) -> Dep {
        let mut d = Dep(vec![0; l / 64 + 1]);
        d.0[l / 64] |= 1 << (l % 64);
        d
    }

    /// Every level up to and including `l`.
    fn upto(l: usize) -> Dep {
        let mut d = Dep(vec![u64::MAX; l / 64 + 1]);
        let rem = l % 64;
        if rem < 63 {
            d.0[l / 64] = (1u64 << (rem + 1)) - 1;
        }
        d
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn contains(&self, l: usize) -> bool {
        self.0.get(l / 64).is_some_and(|w| w & (1 << (l % 64)) != 0)
    }

    fn union_in(&mut self, o: &Dep) {
        if self.0.len() < o.0.len() {
            self.0.resize(o.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }

    fn union(&self, o: &Dep) -> Dep {
        let mut d = self.clone();
        d.union_in(o);
        d
    }

    fn without(&self, l: usize) -> Dep {
        let mut d = self.clone();
        if let Some(w) = d.0.get_mut(l / 64) {
            *w &= !(1 << (l % 64));
        }
        d
    }
}

#[derive(Clone, Debug)]
struct Edge {
    to: u32,
    roles: u64,
    dep: Dep,
}

/// Inverse of one graph mutation.
enum Undo {
    Bit(u32, Cid),
    Node,
    EdgePush(u32),
    EdgeSet(u32, usize, u64, Dep),
    Edges(u32, Vec<Edge>),
    Alive(u32),
    IneqPush,
    Ineq(Vec<(u32, u32, Dep)>),
}

#[derive(Default)]
struct Graph {
    labels: Vec<u64>,
    /// Dependencies of label entries; absent means none.
    deps: HashMap<(u32, Cid), Dep>,
    /// Per node, the `⊔`, `∀`, `≤` and `≥` entries in insertion order.
    special: Vec<Vec<Cid>>,
    parent: Vec<u32>,
    named: Vec<bool>,
    alive: Vec<bool>,
    /// What the existence of each node depends on.
    origin: Vec<Dep>,
    edges: Vec<Vec<Edge>>,
    ineq: Vec<(u32, u32, Dep)>,
    /// Label entries whose deterministic consequences are pending.
    todo: Vec<(u32, Cid)>,
    trail: Vec<Undo>,
}

impl Graph {
    fn len(&self) -> usize {
        self.parent.len()
    }

    fn push_node(&mut self, parent: u32, named: bool, origin: Dep, words: usize) -> u32 {
        let id = self.len() as u32;
        self.labels.extend(std::iter::repeat(0).take(words));
        self.special.push(Vec::new());
        self.parent.push(parent);
        self.named.push(named);
        self.alive.push(true);
        self.origin.push(origin);
        self.edges.push(Vec::new());
        self.trail.push(Undo::Node);
        id
    }

    fn named_node(&mut self, map: &mut [Option<u32>], ind: u32, words: usize) -> u32 {
        if let Some(x) = map[ind as usize] {
            return x;
        }
        let x = self.push_node(NONE, true, Dep::default(), words);
        map[ind as usize] = Some(x);
        x
    }

    /// Reverts every mutation recorded after `mark`.
    fn undo_to(&mut self, mark: usize, words: usize) {
        self.todo.clear();
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail entry") {
                Undo::Bit(x, c) => {
                    let i = x as usize * words + (c as usize >> 6);
                    self.labels[i] &= !(1u64 << (c & 63));
                    self.deps.remove(&(x, c));
                    let s = &mut self.special[x as usize];
                    if s.last() == Some(&c) {
                        s.pop();
                    }
                }
                Undo::Node => {
                    self.labels.truncate(self.labels.len() - words);
                    self.special.pop();
                    self.parent.pop();
                    self.named.pop();
                    self.alive.pop();
                    self.origin.pop();
                    self.edges.pop();
                }
                Undo::EdgePush(x) => {
                    self.edges[x as usize].pop();
                }
                Undo::EdgeSet(x, i, roles, dep) => {
                    let e = &mut self.edges[x as usize][i];
                    e.roles = roles;
                    e.dep = dep;
                }
                Undo::Edges(x, list) => self.edges[x as usize] = list,
                Undo::Alive(x) => self.alive[x as usize] = true,
                Undo::IneqPush => {
                    self.ineq.pop();
                }
                Undo::Ineq(list) => self.ineq = list,
            }
        }
    }

    fn link(&mut self, x: u32, y: u32, roles: u64, dep: &Dep) {
        let list = &mut self.edges[x as usize];
        match list.iter().position(|e| e.to == y) {
            Some(i) => {
                let e = &mut list[i];
                let merged = e.dep.union(dep);
                if e.roles | roles == e.roles && merged == e.dep {
                    return;
                }
                self.trail.push(Undo::EdgeSet(x, i, e.roles, std::mem::replace(&mut e.dep, merged)));
                e.roles |= roles;
            }
            None => {
                list.push(Edge {
                    to: y,
                    roles,
                    dep: dep.clone(),
                });
                self.trail.push(Undo::EdgePush(x));
            }
        }
    }

    fn replace_edges(&mut self, x: u32, list: Vec<Edge>) {
        let old = std::mem::replace(&mut self.edges[x as usize], list);
        self.trail.push(Undo::Edges(x, old));
    }

    fn push_ineq(&mut self, a: u32, b: u32, dep: Dep) {
        self.ineq.push((a.min(b), a.max(b), dep));
        self.trail.push(Undo::IneqPush);
    }

    fn edge(&self, x: u32, y: u32) -> Option<&Edge> {
        self.edges[x as usize].iter().find(|e| e.to == y)
    }

    fn edge_roles(&self, x: u32, y: u32) -> u64 {
        self.edge(x, y).map_or(0, |e| e.roles)
    }

    fn label(&self, x: u32, words: usize) -> &[u64] {
        let s = x as usize * words;
        &self.labels[s..s + words]
    }

    fn has(&self, x: u32, c: Cid, words: usize) -> bool {
        if c == TOP {
            return true;
        }
        let i = x as usize * words + (c as usize >> 6);
        self.labels[i] & (1u64 << (c & 63)) != 0
    }

    fn dep(&self, x: u32, c: Cid) -> Dep {
        self.deps.get(&(x, c)).cloned().unwrap_or_default()
    }

    fn members(&self, x: u32, words: usize) -> Vec<Cid> {
        let mut out = Vec::new();
        for (w, &bits) in self.label(x, words).iter().enumerate() {
            let mut b = bits;
            while b != 0 {
                let t = b.trailing_zeros();
                out.push((w as u32) * 64 + t);
                b &= b - 1;
            }
        }
        out
    }

    /// Whether `x` and `y` must denote different elements, and why.
    fn distinct(&self, x: u32, y: u32) -> Option<Dep> {
        if x == y {
            return None;
        }
        if self.named[x as usize] && self.named[y as usize] {
            return Some(Dep::default());
        }
        let key = (x.min(y), x.max(y));
        self.ineq.iter().find(|(a, b, _)| (*a, *b) == key).map(|(_, _, d)| d.clone())
    }

    fn successors(&self, x: u32, role: u32) -> impl Iterator<Item = &Edge> + '_ {
        self.edges[x as usize]
            .iter()
            .filter(move |e| e.roles & (1u64 << role) != 0 && self.alive[e.to as usize])
    }
}

enum Choice {
    /// Disjuncts of an `Or` at a node, tried in order with semantic branching.
    Or { x: u32, alts: Vec<Cid>, base: Dep },
    /// Whether an `≤`-successor is in the filler or its complement.
    Choose { y: u32, alts: [Cid; 2], base: Dep },
    /// Pairs `(from, into)` of successors to identify.
    Merge { pairs: Vec<(u32, u32)> },
}

impl Choice {
    fn len(&self) -> usize {
        match self {
            Choice::Or { alts, .. } => alts.len(),
            Choice::Choose { .. } => 2,
            Choice::Merge { pairs } => pairs.len(),
        }
    }
}

struct ChoicePoint {
    /// Trail length when the choice was made.
    mark: usize,
    choice: Choice,
    next: usize,
    /// Clash sets of the failed alternatives, without this level.
    fails: Vec<Dep>,
}

enum Step {
    Complete,
    Grew(usize),
    Branch(Choice),
    Clash(Dep),
}

struct Ctx<'a> {
    pool: &'a Pool,
    globals: Vec<Cid>,
    unfold: Vec<Vec<Cid>>,
    /// Concepts whose addition can make some disjunction unit.
    in_or: Vec<bool>,
    words: usize,
    cache: &'a RefCell<LabelCache>,
    /// Labels whose nested checks are running.
    nesting: RefCell<Vec<Vec<Cid>>>,
}

impl Ctx<'_> {
    fn is_special(&self, c: Cid) -> bool {
        matches!(
            self.pool.node(c),
            Node::Or(_) | Node::Forall { .. } | Node::AtMost { .. } | Node::AtLeast { .. }
        )
    }

    /// Adds `c` to `x`. `Ok(true)` if the label grew; `Err` carries the
    /// clash set.
    fn add(&self, g: &mut Graph, x: u32, c: Cid, dep: &Dep) -> Result<bool, Dep> {
        if g.has(x, c, self.words) {
            return Ok(false);
        }
        if c == BOTTOM {
            return Err(dep.clone());
        }
        let nc = self.pool.neg(c);
        if g.has(x, nc, self.words) {
            return Err(dep.union(&g.dep(x, nc)));
        }
        let i = x as usize * self.words + (c as usize >> 6);
        g.labels[i] |= 1u64 << (c & 63);
        if !dep.is_empty() {
            g.deps.insert((x, c), dep.clone());
        }
        if self.is_special(c) {
            g.special[x as usize].push(c);
        }
        g.trail.push(Undo::Bit(x, c));
        g.todo.push((x, c));
        Ok(true)
    }

    /// Adds the global concepts to a new node.
    fn init_node(&self, g: &mut Graph, x: u32) -> Result<(), Dep> {
        let origin = g.origin[x as usize].clone();
        for &c in &self.globals {
            self.add(g, x, c, &origin)?;
        }
        Ok(())
    }

    /// Links `x` to `y` and pushes the matching `∀` fillers of `x` onto `y`.
    fn connect(&self, g: &mut Graph, x: u32, y: u32, roles: u64, dep: &Dep) -> Result<(), Dep> {
        g.link(x, y, roles, dep);
        let mut k = 0;
        while k < g.special[x as usize].len() {
            let c = g.special[x as usize][k];
            k += 1;
            if let Node::Forall { role, filler } = *self.pool.node(c) {
                if roles & (1u64 << role) != 0 {
                    let d = g.dep(x, c).union(dep);
                    self.add(g, y, filler, &d)?;
                }
            }
        }
        Ok(())
    }

    /// Unit propagation over the disjunctions at `x`.
    fn propagate_or(&self, g: &mut Graph, x: u32, c: Cid, xs: &[Cid]) -> Result<(), Dep> {
        if xs.iter().any(|&y| g.has(x, y, self.words)) {
            return Ok(());
        }
        let mut d = g.dep(x, c);
        let mut open = None;
        let mut count = 0;
        for &y in xs {
            let ny = self.pool.neg(y);
            if g.has(x, ny, self.words) {
                d.union_in(&g.dep(x, ny));
            } else {
                count += 1;
                open = Some(y);
            }
        }
        match (count, open) {
            (0, _) => Err(d),
            (1, Some(only)) => self.add(g, x, only, &d).map(drop),
            _ => Ok(()),
        }
    }

    /// Applies ⊓, unit-propagated ⊔, ∀ and unfolding to every pending entry.
    fn saturate(&self, g: &mut Graph) -> Result<(), Dep> {
        let result = self.drain(g);
        if result.is_err() {
            g.todo.clear();
        }
        result
    }

    fn drain(&self, g: &mut Graph) -> Result<(), Dep> {
        while let Some((x, c)) = g.todo.pop() {
            if !g.alive[x as usize] {
                continue;
            }
            match self.pool.node(c) {
                Node::And(xs) => {
                    let d = g.dep(x, c);
                    for &y in xs {
                        self.add(g, x, y, &d)?;
                    }
                }
                Node::Or(xs) => self.propagate_or(g, x, c, xs)?,
                Node::Atom(a) => {
                    if !self.unfold[*a as usize].is_empty() {
                        let d = g.dep(x, c);
                        for &y in &self.unfold[*a as usize] {
                            self.add(g, x, y, &d)?;
                        }
                    }
                }
                Node::Forall { role, filler } => {
                    let d = g.dep(x, c);
                    let succ: Vec<(u32, Dep)> = g.successors(x, *role).map(|e| (e.to, e.dep.clone())).collect();
                    for (y, ed) in succ {
                        self.add(g, y, *filler, &d.union(&ed))?;
                    }
                }
                _ => {}
            }
            if self.in_or[c as usize] {
                let nc = self.pool.neg(c);
                let mut k = 0;
                while k < g.special[x as usize].len() {
                    let o = g.special[x as usize][k];
                    k += 1;
                    if let Node::Or(xs) = self.pool.node(o) {
                        if xs.contains(&nc) {
                            self.propagate_or(g, x, o, xs)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// R-successors of `x` carrying `filler`, with the reasons they count.
    fn qualified(&self, g: &Graph, x: u32, role: u32, filler: Cid) -> Vec<(u32, Dep)> {
        g.successors(x, role)
            .filter(|e| g.has(e.to, filler, self.words))
            .map(|e| {
                let mut d = e.dep.union(&g.dep(e.to, filler));
                d.union_in(&g.origin[e.to as usize]);
                (e.to, d)
            })
            .collect()
    }

    /// A clash set if some `≤n R.C ∈ L(x)` faces n+1 pairwise distinct
    /// R-successors in C.
    fn at_most_clash(&self, g: &Graph) -> Option<Dep> {
        for x in 0..g.len() as u32 {
            if !g.alive[x as usize] {
                continue;
            }
            for &c in &g.special[x as usize] {
                if let Node::AtMost { n, role, filler } = *self.pool.node(c) {
                    let s = self.qualified(g, x, role, filler);
                    if s.len() > n as usize {
                        if let Some(mut d) = clique(g, &s, n as usize + 1) {
                            d.union_in(&g.dep(x, c));
                            return Some(d);
                        }
                    }
                }
            }
        }
        None
    }

    /// 0 = active, 1 = directly blocked, 2 = indirectly blocked or dead,
    /// 3 = label known satisfiable. `Err` carries the clash set of an
    /// anonymous node whose label is unsatisfiable.
    ///
    /// An anonymous node is blocked by an earlier active anonymous node with
    /// the same label. Without inverse roles a blocked node can reuse its
    /// blocker's successors, and every pairwise-blocked node is also blocked
    /// here since its ancestor blocker is active and earlier. For the same
    /// reason a node whose label alone is satisfiable needs no expansion.
    fn status(&self, g: &Graph, budget: &mut usize) -> Result<Result<Vec<u8>, Dep>, Exhausted> {
        let n = g.len();
        let mut status = vec![0u8; n];
        let mut seen: HashMap<&[u64], u32> = HashMap::new();
        for x in 0..n {
            if !g.alive[x] {
                status[x] = 2;
                continue;
            }
            if g.named[x] {
                continue;
            }
            if status[g.parent[x] as usize] != 0 {
                status[x] = 2;
                continue;
            }
            let lx = g.label(x as u32, self.words);
            if seen.contains_key(lx) {
                status[x] = 1;
                continue;
            }
            let members = g.members(x as u32, self.words);
            match self.label_sat(&members, budget)? {
                Some(true) => status[x] = 3,
                Some(false) => {
                    let mut d = g.origin[x].clone();
                    for c in members {
                        d.union_in(&g.dep(x as u32, c));
                    }
                    return Ok(Err(d));
                }
                None => {
                    seen.insert(lx, x as u32);
                }
            }
        }
        Ok(Ok(status))
    }

    fn step(&self, g: &mut Graph, budget: &mut usize) -> Result<Step, Exhausted> {
        let status = match self.status(g, budget)? {
            Ok(s) => s,
            Err(d) => return Ok(Step::Clash(d)),
        };
        let order: Vec<u32> = (0..g.len() as u32).filter(|&x| status[x as usize] <= 1).collect();
        Ok(self.step_with(g, &status, &order))
    }

    fn step_with(&self, g: &mut Graph, status: &[u8], order: &[u32]) -> Step {

        for &x in order {
            for &c in &g.special[x as usize] {
                if let Node::Or(xs) = self.pool.node(c) {
                    if xs.iter().any(|&y| g.has(x, y, self.words)) {
                        continue;
                    }
                    let mut base = g.dep(x, c);
                    let mut alts = Vec::with_capacity(xs.len());
                    for &y in xs {
                        let ny = self.pool.neg(y);
                        if g.has(x, ny, self.words) {
                            base.union_in(&g.dep(x, ny));
                        } else {
                            alts.push(y);
                        }
                    }
                    if alts.is_empty() {
                        return Step::Clash(base);
                    }
                    // Disjuncts that create no successors first: small
                    // models block early.
                    alts.sort_by_key(|&y| self.cost(y));
                    return Step::Branch(Choice::Or { x, alts, base });
                }
            }
        }

        for &x in order {
            for &c in &g.special[x as usize] {
                if let Node::AtMost { role, filler, .. } = *self.pool.node(c) {
                    let nf = self.pool.neg(filler);
                    let undecided = g
                        .successors(x, role)
                        .find(|e| !g.has(e.to, filler, self.words) && !g.has(e.to, nf, self.words));
                    if let Some(e) = undecided {
                        let mut base = g.dep(x, c).union(&e.dep);
                        base.union_in(&g.origin[e.to as usize]);
                        return Step::Branch(Choice::Choose {
                            y: e.to,
                            alts: [nf, filler],
                            base,
                        });
                    }
                }
            }
        }

        for &x in order {
            for &c in &g.special[x as usize] {
                if let Node::AtMost { n, role, filler } = *self.pool.node(c) {
                    let s: Vec<u32> = self.qualified(g, x, role, filler).into_iter().map(|(y, _)| y).collect();
                    if s.len() <= n as usize {
                        continue;
                    }
                    let mut pairs = Vec::new();
                    for (i, &y) in s.iter().enumerate() {
                        for &z in &s[i + 1..] {
                            if g.distinct(y, z).is_some() {
                                continue;
                            }
                            pairs.push(if g.named[y as usize] {
                                (z, y)
                            } else if g.named[z as usize] {
                                (y, z)
                            } else {
                                (y.max(z), y.min(z))
                            });
                        }
                    }
                    // The clash check already ruled out n+1 distinct ones.
                    debug_assert!(!pairs.is_empty());
                    return Step::Branch(Choice::Merge { pairs });
                }
            }
        }

        let mut grew = 0;
        for &x in order {
            if status[x as usize] != 0 {
                continue;
            }
            let mut k = 0;
            while k < g.special[x as usize].len() {
                let c = g.special[x as usize][k];
                k += 1;
                if let Node::AtLeast { n, role, filler } = *self.pool.node(c) {
                    let s = self.qualified(g, x, role, filler);
                    if s.len() >= n as usize && clique(g, &s, n as usize).is_some() {
                        continue;
                    }
                    let d = g.dep(x, c);
                    let fresh: Vec<u32> = (0..n).map(|_| g.push_node(x, false, d.clone(), self.words)).collect();
                    for (i, &y) in fresh.iter().enumerate() {
                        for &z in &fresh[..i] {
                            g.push_ineq(z, y, d.clone());
                        }
                        let r = self
                            .init_node(g, y)
                            .and_then(|_| self.add(g, y, filler, &d).map(drop))
                            .and_then(|_| self.connect(g, x, y, 1u64 << role, &d));
                        if let Err(clash) = r {
                            g.todo.clear();
                            return Step::Clash(clash);
                        }
                    }
                    grew += n as usize;
                }
            }
        }
        if grew > 0 {
            Step::Grew(grew)
        } else {
            Step::Complete
        }
    }

    fn cost(&self, c: Cid) -> u8 {
        match self.pool.node(c) {
            Node::AtLeast { .. } => 2,
            Node::And(xs) | Node::Or(xs) => xs.iter().map(|&y| self.cost(y)).max().unwrap_or(0).max(1),
            _ => 0,
        }
    }

    /// Applies alternative `i` of the choice point at `level`.
    fn apply(&self, g: &mut Graph, cp: &ChoicePoint, i: usize, level: usize) -> Result<(), Dep> {
        match &cp.choice {
            Choice::Or { x, alts, base } => {
                for (j, &prev) in alts[..i].iter().enumerate() {
                    self.add(g, *x, self.pool.neg(prev), &cp.fails[j])?;
                }
                self.add(g, *x, alts[i], &base.union(&Dep::level(level)))?;
            }
            Choice::Choose { y, alts, base } => {
                self.add(g, *y, alts[i], &base.union(&Dep::level(level)))?;
            }
            Choice::Merge { pairs } => {
                let (from, into) = pairs[i];
                self.merge(g, from, into, &Dep::upto(level))?;
            }
        }
        Ok(())
    }

    fn search(&self, g: &mut Graph, budget: &mut usize) -> Result<bool, Exhausted> {
        let mut stack: Vec<ChoicePoint> = Vec::new();
        let mut fresh = true;
        loop {
            let mut pending = None;
            if fresh {
                match self.expand(g, budget)? {
                    None => return Ok(true),
                    Some(Ok(choice)) => stack.push(ChoicePoint {
                        mark: g.trail.len(),
                        choice,
                        next: 0,
                        fails: Vec::new(),
                    }),
                    Some(Err(clash)) => pending = Some(clash),
                }
            }
            // Either a fresh choice point awaits its first alternative, or a
            // clash must be traced back to the choice it depends on.
            loop {
                if stack.is_empty() {
                    return Ok(false);
                }
                let level = stack.len() - 1;
                let cp = &mut stack[level];
                if let Some(d) = pending.take() {
                    if !d.contains(level) {
                        stack.pop();
                        pending = Some(d);
                        continue;
                    }
                    cp.fails.push(d.without(level));
                }
                if cp.next >= cp.choice.len() {
                    let mut all = Dep::default();
                    for f in &cp.fails {
                        all.union_in(f);
                    }
                    stack.pop();
                    pending = Some(all);
                    continue;
                }
                let i = cp.next;
                cp.next += 1;
                *budget = budget.checked_sub(1).ok_or(Exhausted)?;
                g.undo_to(cp.mark, self.words);
                match self.apply(g, &stack[level], i, level) {
                    Ok(()) => {
                        fresh = true;
                        break;
                    }
                    Err(d) => pending = Some(d),
                }
            }
        }
    }

    /// Runs deterministic rules and node generation until the graph is
    /// complete (`None`), needs a choice, or clashes.
    fn expand(&self, g: &mut Graph, budget: &mut usize) -> Result<Option<Result<Choice, Dep>>, Exhausted> {
        loop {
            if let Err(d) = self.saturate(g) {
                return Ok(Some(Err(d)));
            }
            if let Some(d) = self.at_most_clash(g) {
                return Ok(Some(Err(d)));
            }
            match self.step(g, budget)? {
                Step::Complete => return Ok(None),
                Step::Grew(n) => *budget = budget.checked_sub(n).ok_or(Exhausted)?,
                Step::Branch(c) => return Ok(Some(Ok(c))),
                Step::Clash(d) => return Ok(Some(Err(d))),
            }
        }
    }

    /// Merges anonymous `from` into `into`, pruning the subtree below `from`.
    fn merge(&self, g: &mut Graph, from: u32, into: u32, dep: &Dep) -> Result<(), Dep> {
        for c in g.members(from, self.words) {
            let d = g.dep(from, c).union(dep);
            self.add(g, into, c, &d)?;
        }
        let p = g.parent[from as usize];
        let roles = g.edge_roles(p, from);
        let rest: Vec<Edge> = g.edges[p as usize].iter().filter(|e| e.to != from).cloned().collect();
        g.replace_edges(p, rest);
        self.connect(g, p, into, roles, dep)?;

        let n = g.len();
        let mut doomed = vec![false; n];
        doomed[from as usize] = true;
        for i in from as usize + 1..n {
            if g.alive[i] && !g.named[i] && doomed[g.parent[i] as usize] {
                doomed[i] = true;
            }
        }
        // Edges from the pruned node to named nodes move to `into`.
        let kept: Vec<Edge> = g.edges[from as usize]
            .iter()
            .filter(|e| g.named[e.to as usize])
            .cloned()
            .collect();
        for e in kept {
            self.connect(g, into, e.to, e.roles, &e.dep.union(dep))?;
        }
        for i in 0..n {
            if doomed[i] && g.alive[i] {
                g.alive[i] = false;
                g.trail.push(Undo::Alive(i as u32));
                g.replace_edges(i as u32, Vec::new());
            }
        }
        let mut ineq: Vec<(u32, u32, Dep)> = Vec::with_capacity(g.ineq.len());
        for (a, b, d) in g.ineq.iter().cloned() {
            let moved = a == from || b == from;
            let a = if a == from { into } else { a };
            let b = if b == from { into } else { b };
            if doomed[a as usize] || doomed[b as usize] {
                continue;
            }
            let d = if moved { d.union(dep) } else { d };
            if a == b {
                return Err(d);
            }
            let key = (a.min(b), a.max(b));
            if !ineq.iter().any(|(x, y, _)| (*x, *y) == key) {
                ineq.push((key.0, key.1, d));
            }
        }
        let old = std::mem::replace(&mut g.ineq, ineq);
        g.trail.push(Undo::Ineq(old));
        Ok(())
    }
}

/// `k` pairwise distinct members of `nodes`, returning the union of their
/// reasons and of the distinctness facts used.
fn clique(g: &Graph, nodes: &[(u32, Dep)], k: usize) -> Option<Dep> {
    fn extend(g: &Graph, nodes: &[(u32, Dep)], chosen: &mut Vec<usize>, start: usize, k: usize) -> bool {
        if chosen.len() == k {
            return true;
        }
        for i in start..nodes.len() {
            if nodes.len() - i < k - chosen.len() {
                return false;
            }
            let y = nodes[i].0;
            if chosen.iter().all(|&j| g.distinct(y, nodes[j].0).is_some()) {
                chosen.push(i);
                if extend(g, nodes, chosen, i + 1, k) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if k == 0 {
        return Some(Dep::default());
    }
    let mut chosen = Vec::with_capacity(k);
    if !extend(g, nodes, &mut chosen, 0, k) {
        return None;
    }
    let mut d = Dep::default();
    for (a, &i) in chosen.iter().enumerate() {
        d.union_in(&nodes[i].1);
        for &j in &chosen[..a] {
            if let Some(x) = g.distinct(nodes[i].0, nodes[j].0) {
                d.union_in(&x);
            }
        }
    }
    Some(d)
}

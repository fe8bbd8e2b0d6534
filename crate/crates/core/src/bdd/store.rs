//! Node store: hash-consed nodes with complement edges, reference counts,
//! and a lossy computed table.

use rustc_hash::FxHashMap;

use super::{Config, Reclamation};

/// An edge: node index in the upper bits, complement mark in bit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Edge(pub u32);

impl Edge {
    pub const TRUE: Edge = Edge(0);
    pub const FALSE: Edge = Edge(1);

    #[inline]
    pub fn new(index: u32, complement: bool) -> Edge {
        Edge(index << 1 | complement as u32)
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn is_complement(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn regular(self) -> Edge {
        Edge(self.0 & !1)
    }

    #[inline]
    pub fn is_const(self) -> bool {
        self.0 < 2
    }

    #[inline]
    pub fn not(self) -> Edge {
        Edge(self.0 ^ 1)
    }

    #[inline]
    pub fn not_if(self, c: bool) -> Edge {
        Edge(self.0 ^ c as u32)
    }
}

pub(crate) const TERMINAL_VAR: u32 = u32::MAX;
pub(crate) const FREE_VAR: u32 = u32::MAX - 1;
pub(crate) const TERMINAL_LEVEL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub var: u32,
    pub low: Edge,
    pub high: Edge,
    /// Parent nodes in the table plus external handles.
    pub rc: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Op {
    And = 1,
    Xor,
    Ite,
    Exists,
    AndExists,
    Restrict,
}

#[derive(Debug, Clone, Copy, Default)]
struct CacheEntry {
    tag: u32,
    a: u32,
    b: u32,
    c: u32,
    result: u32,
}

#[derive(Debug)]
pub(crate) struct Store {
    pub nodes: Vec<Node>,
    free: Vec<u32>,
    /// Slots freed since the last cache flush; not reused until then, so a
    /// cache entry can never alias a different node.
    quarantine: Vec<u32>,
    pub unique: Vec<FxHashMap<(Edge, Edge), u32>>,
    pub var2level: Vec<u32>,
    pub level2var: Vec<u32>,
    cache: Vec<CacheEntry>,
    cache_mask: usize,
    pub config: Config,
    pub live: usize,
    pub peak: usize,
    track_created: bool,
    created: Vec<u32>,
    gc_threshold: usize,
    pub reorder_threshold: usize,
    pub reorderings: usize,
}

impl Store {
    pub fn new(config: Config) -> Store {
        let cache_size = 1usize << config.cache_bits;
        Store {
            nodes: vec![Node {
                var: TERMINAL_VAR,
                low: Edge::TRUE,
                high: Edge::TRUE,
                rc: 1,
            }],
            free: Vec::new(),
            quarantine: Vec::new(),
            unique: Vec::new(),
            var2level: Vec::new(),
            level2var: Vec::new(),
            cache: vec![CacheEntry::default(); cache_size],
            cache_mask: cache_size - 1,
            track_created: false,
            created: Vec::new(),
            live: 0,
            peak: 0,
            gc_threshold: config.gc_threshold,
            reorder_threshold: config.reorder_threshold,
            reorderings: 0,
            config,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var2level.len()
    }

    pub fn new_var(&mut self) -> u32 {
        let v = self.var2level.len() as u32;
        self.var2level.push(v);
        self.level2var.push(v);
        self.unique.push(FxHashMap::default());
        v
    }

    #[inline]
    pub fn node(&self, e: Edge) -> &Node {
        &self.nodes[e.index() as usize]
    }

    #[inline]
    pub fn var_of(&self, e: Edge) -> u32 {
        self.nodes[e.index() as usize].var
    }

    #[inline]
    pub fn level(&self, e: Edge) -> u32 {
        let v = self.nodes[e.index() as usize].var;
        if v == TERMINAL_VAR {
            TERMINAL_LEVEL
        } else {
            self.var2level[v as usize]
        }
    }

    /// Children of `e` with its complement mark pushed down.
    #[inline]
    pub fn children(&self, e: Edge) -> (Edge, Edge) {
        let n = &self.nodes[e.index() as usize];
        let c = e.is_complement();
        (n.low.not_if(c), n.high.not_if(c))
    }

    /// Cofactors of `e` with respect to the variable at `level`.
    #[inline]
    pub fn cofactors(&self, e: Edge, level: u32) -> (Edge, Edge) {
        if self.level(e) == level {
            self.children(e)
        } else {
            (e, e)
        }
    }

    #[inline]
    pub fn inc(&mut self, e: Edge) {
        if !e.is_const() {
            self.nodes[e.index() as usize].rc += 1;
        }
    }

    /// Drops one reference. With eager reclamation the node is freed as soon
    /// as nothing refers to it.
    pub fn dec(&mut self, e: Edge) {
        if e.is_const() {
            return;
        }
        let n = &mut self.nodes[e.index() as usize];
        debug_assert!(n.rc > 0, "reference count underflow");
        n.rc -= 1;
        if n.rc == 0 && self.config.reclamation == Reclamation::Eager && !self.track_created {
            self.free_cascade(e.index());
            self.maybe_flush();
        }
    }

    /// Finds or creates the node `(var, low, high)`; keeps the low edge regular.
    pub fn mk(&mut self, var: u32, low: Edge, high: Edge) -> Edge {
        if low == high {
            return low;
        }
        let neg = low.is_complement();
        let (low, high) = (low.not_if(neg), high.not_if(neg));
        if let Some(&idx) = self.unique[var as usize].get(&(low, high)) {
            return Edge::new(idx, neg);
        }
        let idx = match self.free.pop() {
            Some(i) => i,
            None => {
                self.nodes.push(Node {
                    var: FREE_VAR,
                    low: Edge::TRUE,
                    high: Edge::TRUE,
                    rc: 0,
                });
                (self.nodes.len() - 1) as u32
            }
        };
        self.nodes[idx as usize] = Node {
            var,
            low,
            high,
            rc: 0,
        };
        self.inc(low);
        self.inc(high);
        self.unique[var as usize].insert((low, high), idx);
        self.live += 1;
        if self.live > self.peak {
            self.peak = self.live;
        }
        if self.track_created {
            self.created.push(idx);
        }
        Edge::new(idx, neg)
    }

    pub fn free_cascade(&mut self, root: u32) {
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            let n = self.nodes[i as usize];
            debug_assert_eq!(n.rc, 0);
            debug_assert!(n.var != FREE_VAR && n.var != TERMINAL_VAR);
            self.unique[n.var as usize].remove(&(n.low, n.high));
            for c in [n.low, n.high] {
                if !c.is_const() {
                    let child = &mut self.nodes[c.index() as usize];
                    child.rc -= 1;
                    if child.rc == 0 {
                        stack.push(c.index());
                    }
                }
            }
            self.nodes[i as usize].var = FREE_VAR;
            self.quarantine.push(i);
            self.live -= 1;
        }
    }

    fn maybe_flush(&mut self) {
        if self.quarantine.len() > self.config.gc_threshold.max(self.live / 2) {
            self.flush();
        }
    }

    /// Clears the computed table and releases quarantined slots for reuse.
    pub fn flush(&mut self) {
        self.clear_cache();
        self.free.append(&mut self.quarantine);
    }

    pub fn clear_cache(&mut self) {
        for e in &mut self.cache {
            e.tag = 0;
        }
    }

    /// Frees every node no longer referenced, whatever the policy.
    pub fn collect_garbage(&mut self) {
        for i in 1..self.nodes.len() {
            let n = self.nodes[i];
            if n.var != FREE_VAR && n.rc == 0 {
                self.free_cascade(i as u32);
            }
        }
        self.flush();
        self.gc_threshold = self.config.gc_threshold.max(2 * self.live);
    }

    /// Called before each public operation.
    pub fn begin_op(&mut self) {
        if self.config.reclamation == Reclamation::Deferred && self.live > self.gc_threshold {
            self.collect_garbage();
        }
        self.track_created = self.config.reclamation == Reclamation::Eager;
    }

    /// Called after each public operation once `result` has been referenced.
    pub fn end_op(&mut self) {
        if self.track_created {
            self.track_created = false;
            let created = std::mem::take(&mut self.created);
            for &i in &created {
                let n = &self.nodes[i as usize];
                if n.var != FREE_VAR && n.rc == 0 {
                    self.free_cascade(i);
                }
            }
            self.created = created;
            self.created.clear();
            self.maybe_flush();
        }
    }

    #[inline]
    fn slot(&self, op: Op, a: u32, b: u32, c: u32) -> usize {
        let mut h = (op as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        h ^= (a as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
        h = h.rotate_left(23) ^ (b as u64).wrapping_mul(0x1656_67B1_9E37_79F9);
        h = h.rotate_left(29) ^ (c as u64).wrapping_mul(0x27D4_EB2F_1656_67C5);
        (h ^ (h >> 32)) as usize & self.cache_mask
    }

    #[inline]
    pub fn cache_get(&self, op: Op, a: Edge, b: Edge, c: Edge) -> Option<Edge> {
        let e = &self.cache[self.slot(op, a.0, b.0, c.0)];
        if e.tag == op as u32 && e.a == a.0 && e.b == b.0 && e.c == c.0 {
            let r = Edge(e.result);
            if self.nodes[r.index() as usize].var != FREE_VAR {
                return Some(r);
            }
        }
        None
    }

    #[inline]
    pub fn cache_put(&mut self, op: Op, a: Edge, b: Edge, c: Edge, r: Edge) {
        let s = self.slot(op, a.0, b.0, c.0);
        self.cache[s] = CacheEntry {
            tag: op as u32,
            a: a.0,
            b: b.0,
            c: c.0,
            result: r.0,
        };
    }

    /// Checks canonicity, reducedness, ordering and reference counts.
    pub fn audit(&self) -> Result<(), String> {
        let mut parents = vec![0u32; self.nodes.len()];
        let mut live = 0;
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            if n.var == FREE_VAR {
                continue;
            }
            live += 1;
            if n.low == n.high {
                return Err(format!("node {i} is redundant"));
            }
            if n.low.is_complement() {
                return Err(format!("node {i} has a complemented low edge"));
            }
            let lvl = self.var2level[n.var as usize];
            for c in [n.low, n.high] {
                let cn = self.node(c);
                if cn.var == FREE_VAR {
                    return Err(format!("node {i} points to freed slot {}", c.index()));
                }
                if self.level(c) <= lvl {
                    return Err(format!("node {i} violates the variable order"));
                }
                parents[c.index() as usize] += 1;
            }
            match self.unique[n.var as usize].get(&(n.low, n.high)) {
                Some(&j) if j as usize == i => {}
                _ => return Err(format!("node {i} missing from the unique table")),
            }
        }
        let table: usize = self.unique.iter().map(|t| t.len()).sum();
        if table != live || live != self.live {
            return Err(format!(
                "unique tables hold {table} nodes, store holds {live}, counter says {}",
                self.live
            ));
        }
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            if n.var != FREE_VAR && n.rc < parents[i] {
                return Err(format!(
                    "node {i} has {} references but {} parents",
                    n.rc, parents[i]
                ));
            }
        }
        Ok(())
    }
}

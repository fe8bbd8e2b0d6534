//! Dynamic variable reordering by sifting over adjacent-level swaps.

use super::store::{Edge, Store};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReorderReport {
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub swaps: usize,
}

impl Store {
    /// Exchanges the variables at `level` and `level + 1`. Node indices are
    /// preserved, so every edge keeps denoting the same function.
    pub fn swap_levels(&mut self, level: u32) {
        let x = self.level2var[level as usize];
        let y = self.level2var[level as usize + 1];
        let xs: Vec<u32> = self.unique[x as usize].values().copied().collect();
        let mut moved = Vec::new();
        for idx in xs {
            let n = self.nodes[idx as usize];
            let low_is_y = !n.low.is_const() && self.var_of(n.low) == y;
            let high_is_y = !n.high.is_const() && self.var_of(n.high) == y;
            if low_is_y || high_is_y {
                self.unique[x as usize].remove(&(n.low, n.high));
                moved.push(idx);
            }
        }
        // from here on x sits below y
        self.level2var.swap(level as usize, level as usize + 1);
        self.var2level[x as usize] = level + 1;
        self.var2level[y as usize] = level;

        for idx in moved {
            let n = self.nodes[idx as usize];
            let (f00, f01) = self.y_cofactors(n.low, y);
            let (f10, f11) = self.y_cofactors(n.high, y);
            let lo = self.mk(x, f00, f10);
            self.inc(lo);
            let hi = self.mk(x, f01, f11);
            self.inc(hi);
            debug_assert!(!lo.is_complement());
            let node = &mut self.nodes[idx as usize];
            node.var = y;
            node.low = lo;
            node.high = hi;
            self.unique[y as usize].insert((lo, hi), idx);
            self.release(n.low);
            self.release(n.high);
        }
    }

    /// Drops a reference and frees the node immediately when it dies,
    /// independent of the reclamation policy.
    fn release(&mut self, e: Edge) {
        if e.is_const() {
            return;
        }
        let n = &mut self.nodes[e.index() as usize];
        n.rc -= 1;
        if n.rc == 0 {
            self.free_cascade(e.index());
        }
    }

    fn y_cofactors(&self, e: Edge, y: u32) -> (Edge, Edge) {
        if !e.is_const() && self.var_of(e) == y {
            self.children(e)
        } else {
            (e, e)
        }
    }

    fn move_var(&mut self, var: u32, target: u32, swaps: &mut usize) {
        let mut cur = self.var2level[var as usize];
        while cur < target {
            self.swap_levels(cur);
            cur += 1;
            *swaps += 1;
        }
        while cur > target {
            self.swap_levels(cur - 1);
            cur -= 1;
            *swaps += 1;
        }
    }

    /// Rudell's sifting: each variable, largest level first, is moved through
    /// all positions and left where the store was smallest. A direction is
    /// abandoned once the store exceeds `max_growth` times the best size.
    pub fn sift(&mut self) -> ReorderReport {
        self.collect_garbage();
        let before = self.live;
        let nvars = self.num_vars() as u32;
        let mut swaps = 0;
        if nvars < 2 || before == 0 {
            return ReorderReport {
                nodes_before: before,
                nodes_after: before,
                swaps,
            };
        }
        let growth = self.config.max_growth;
        let mut vars: Vec<u32> = (0..nvars).collect();
        vars.sort_by_key(|&v| std::cmp::Reverse(self.unique[v as usize].len()));
        for var in vars {
            if self.unique[var as usize].is_empty() {
                continue;
            }
            let start = self.var2level[var as usize];
            let mut best = self.live;
            let mut best_level = start;
            let limit = |best: usize| (best as f64 * growth).ceil() as usize;
            // the shorter direction first
            let down_first = nvars - 1 - start < start;
            let dirs: [bool; 2] = if down_first { [true, false] } else { [false, true] };
            for down in dirs {
                loop {
                    let cur = self.var2level[var as usize];
                    if down {
                        if cur + 1 >= nvars {
                            break;
                        }
                        self.swap_levels(cur);
                    } else {
                        if cur == 0 {
                            break;
                        }
                        self.swap_levels(cur - 1);
                    }
                    swaps += 1;
                    let lvl = self.var2level[var as usize];
                    if self.live < best {
                        best = self.live;
                        best_level = lvl;
                    }
                    if self.live > limit(best) {
                        break;
                    }
                }
            }
            self.move_var(var, best_level, &mut swaps);
        }
        self.flush();
        self.reorderings += 1;
        ReorderReport {
            nodes_before: before,
            nodes_after: self.live,
            swaps,
        }
    }
}

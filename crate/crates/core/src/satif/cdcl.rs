//! Conflict-driven clause learning solver.
//!
//! Two watched literals with blockers, first-UIP learning with basic clause
//! minimisation, VSIDS branching with phase saving, Luby restarts and
//! activity/LBD based learnt clause deletion. Deterministic: no randomness.

use alloc::vec;
use alloc::vec::Vec;

use super::{Assignment, Clause, Interrupt, Lit, SatBackend, SatError, SolveResult, Var};

const NO_REASON: u32 = u32::MAX;
const RESTART_BASE: f64 = 100.0;
const INTERRUPT_POLL: u64 = 128;

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
    lbd: u32,
}

#[derive(Debug, Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

/// Binary max-heap of variables ordered by activity.
#[derive(Debug, Clone, Default)]
struct VarOrder {
    heap: Vec<u32>,
    pos: Vec<u32>,
}

impl VarOrder {
    const ABSENT: u32 = u32::MAX;

    fn grow(&mut self) {
        self.pos.push(Self::ABSENT);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != Self::ABSENT
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v as usize] = self.heap.len() as u32;
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v as usize] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = Self::ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if act[p as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            let cv = self.heap[c];
            if act[cv as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = cv;
            self.pos[cv as usize] = i as u32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }
}

/// Solver counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CdclStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

/// Built-in incremental CDCL backend.
#[derive(Debug, Clone)]
pub struct CdclSolver {
    clauses: Vec<ClauseData>,
    free: Vec<u32>,
    watches: Vec<Vec<Watch>>,
    /// Per variable: 0 unassigned, 1 true, -1 false.
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    order: VarOrder,
    phase: Vec<bool>,
    seen: Vec<bool>,
    cla_inc: f64,
    learnts: usize,
    max_learnts: f64,
    ok: bool,
    stats: CdclStats,
}

impl Default for CdclSolver {
    fn default() -> Self {
        Self::new()
    }
}

#[inline]
fn lit_val(assigns: &[i8], l: Lit) -> i8 {
    let v = assigns[l.code() >> 1];
    if l.is_negative() {
        -v
    } else {
        v
    }
}

#[inline]
fn var_idx(l: Lit) -> usize {
    l.code() >> 1
}

fn luby(y: f64, mut x: u64) -> f64 {
    let mut size = 1u64;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    let mut r = 1.0;
    for _ in 0..seq {
        r *= y;
    }
    r
}

impl CdclSolver {
    pub fn new() -> Self {
        CdclSolver {
            clauses: Vec::new(),
            free: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            order: VarOrder::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            cla_inc: 1.0,
            learnts: 0,
            max_learnts: 0.0,
            ok: true,
            stats: CdclStats::default(),
        }
    }

    pub fn stats(&self) -> CdclStats {
        self.stats
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = var_idx(l);
        self.assigns[v] = if l.is_negative() { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let data = ClauseData {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
            lbd,
        };
        let cref = match self.free.pop() {
            Some(c) => {
                self.clauses[c as usize] = data;
                c
            }
            None => {
                self.clauses.push(data);
                (self.clauses.len() - 1) as u32
            }
        };
        let (l0, l1) = {
            let c = &self.clauses[cref as usize];
            (c.lits[0], c.lits[1])
        };
        self.watches[(!l0).code()].push(Watch { cref, blocker: l1 });
        self.watches[(!l1).code()].push(Watch { cref, blocker: l0 });
        if learnt {
            self.learnts += 1;
        }
        cref
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let bound = self.trail_lim[level as usize];
        for i in (bound..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = var_idx(l);
            self.phase[v] = !l.is_negative();
            self.assigns[v] = 0;
            self.reason[v] = NO_REASON;
            self.order.insert(v as u32, &self.activity);
        }
        self.trail.truncate(bound);
        self.trail_lim.truncate(level as usize);
        self.qhead = bound;
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = core::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_val(&self.assigns, w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = &mut self.clauses[w.cref as usize].lits;
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                let nw = Watch {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && lit_val(&self.assigns, first) == 1 {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    if lit_val(&self.assigns, c[k]) != -1 {
                        c.swap(1, k);
                        self.watches[(!c[1]).code()].push(nw);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if lit_val(&self.assigns, first) == -1 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32, u32) {
        let mut learnt: Vec<Lit> = vec![Lit(0)];
        let mut path_c = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let dl = self.decision_level();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[k];
                let v = var_idx(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= dl {
                        path_c += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var_idx(self.trail[idx])] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            confl = self.reason[var_idx(pl)];
            self.seen[var_idx(pl)] = false;
            path_c -= 1;
            if path_c == 0 {
                break;
            }
        }
        learnt[0] = !p.unwrap();

        // drop literals implied by other literals of the clause
        let mut kept = vec![learnt[0]];
        for &q in &learnt[1..] {
            let r = self.reason[var_idx(q)];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..].iter().all(|&x| {
                    let v = var_idx(x);
                    self.seen[v] || self.level[v] == 0
                });
            if !redundant {
                kept.push(q);
            }
        }
        for &q in &learnt {
            self.seen[var_idx(q)] = false;
        }

        let bt = if kept.len() == 1 {
            0
        } else {
            let mut best = 1;
            for i in 2..kept.len() {
                if self.level[var_idx(kept[i])] > self.level[var_idx(kept[best])] {
                    best = i;
                }
            }
            kept.swap(1, best);
            self.level[var_idx(kept[1])]
        };
        let mut levels: Vec<u32> = kept.iter().map(|&l| self.level[var_idx(l)]).collect();
        levels.sort_unstable();
        levels.dedup();
        (kept, bt, levels.len() as u32)
    }

    fn locked(&self, cref: u32) -> bool {
        let l0 = self.clauses[cref as usize].lits[0];
        self.reason[var_idx(l0)] == cref && lit_val(&self.assigns, l0) == 1
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|&c| {
                let d = &self.clauses[c as usize];
                d.learnt && !d.deleted && d.lits.len() > 2 && d.lbd > 2
            })
            .filter(|&c| !self.locked(c))
            .collect();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd.cmp(&ca.lbd).then(ca.activity.total_cmp(&cb.activity))
        });
        let remove = cands.len() / 2;
        if remove == 0 {
            self.max_learnts *= 1.1;
            return;
        }
        for &c in &cands[..remove] {
            let d = &mut self.clauses[c as usize];
            d.deleted = true;
            d.lits = Vec::new();
            self.free.push(c);
            self.learnts -= 1;
        }
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
        self.max_learnts *= 1.1;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v as usize] == 0 {
                let var = Var(v + 1);
                return Some(if self.phase[v as usize] { var.pos() } else { var.neg() });
            }
        }
        None
    }

    /// `Ok(Some(sat))` when decided, `Ok(None)` on restart.
    fn search(&mut self, budget: u64, interrupt: &dyn Interrupt) -> Result<Option<bool>, SatError> {
        let mut local = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Ok(Some(false));
                }
                let (learnt, bt, lbd) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true, lbd);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if self.stats.conflicts.is_multiple_of(INTERRUPT_POLL) && interrupt.interrupted() {
                    self.cancel_until(0);
                    return Err(SatError::Interrupted);
                }
            } else {
                if local >= budget {
                    self.cancel_until(0);
                    return Ok(None);
                }
                if self.learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                }
                match self.pick_branch() {
                    None => return Ok(Some(true)),
                    Some(l) => {
                        self.stats.decisions += 1;
                        if self.stats.decisions.is_multiple_of(INTERRUPT_POLL * 32) && interrupt.interrupted() {
                            self.cancel_until(0);
                            return Err(SatError::Interrupted);
                        }
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, NO_REASON);
                    }
                }
            }
        }
    }
}

impl SatBackend for CdclSolver {
    fn new_var(&mut self) -> Var {
        let v = self.assigns.len() as u32;
        self.assigns.push(0);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.grow();
        self.order.insert(v, &self.activity);
        Var(v + 1)
    }

    fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    fn add_clause(&mut self, clause: Clause) -> Result<(), SatError> {
        let n = self.num_vars() as u32;
        if let Some(l) = clause.lits().iter().find(|l| l.var().index() > n) {
            return Err(SatError::UnallocatedVariable(l.var()));
        }
        if !self.ok {
            return Ok(());
        }
        self.cancel_until(0);
        let mut lits = Vec::with_capacity(clause.lits().len());
        for &l in clause.lits() {
            match lit_val(&self.assigns, l) {
                1 => return Ok(()),
                -1 => {}
                _ => lits.push(l),
            }
        }
        match lits.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(lits[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(lits, false, 0);
            }
        }
        Ok(())
    }

    fn solve(&mut self, interrupt: &dyn Interrupt) -> Result<SolveResult, SatError> {
        self.stats.solves += 1;
        if !self.ok {
            return Ok(SolveResult::Unsat);
        }
        if interrupt.interrupted() {
            return Err(SatError::Interrupted);
        }
        self.cancel_until(0);
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        }
        let mut round = 0u64;
        loop {
            let budget = (luby(2.0, round) * RESTART_BASE) as u64;
            match self.search(budget, interrupt)? {
                Some(true) => {
                    let values = self.assigns.iter().map(|&a| a == 1).collect();
                    self.cancel_until(0);
                    return Ok(SolveResult::Sat(Assignment(values)));
                }
                Some(false) => return Ok(SolveResult::Unsat),
                None => {
                    self.stats.restarts += 1;
                    round += 1;
                }
            }
        }
    }
}

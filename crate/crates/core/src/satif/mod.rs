//! Incremental SAT backend contract plus a built-in CDCL implementation.
//!
//! Backends allocate variables densely from 1, accept clauses between solve
//! calls and keep whatever they learned across calls on the same instance.

mod cdcl;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};
use core::ops::Not;

use thiserror::Error;

pub use cdcl::CdclSolver;

/// Propositional variable, numbered from 1 as in DIMACS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// # Panics
    /// If `index` is zero.
    pub fn new(index: u32) -> Self {
        assert!(index > 0, "variables are numbered from 1");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit((self.0 - 1) << 1)
    }

    pub fn neg(self) -> Lit {
        Lit(((self.0 - 1) << 1) | 1)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable with a polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn var(self) -> Var {
        Var((self.0 >> 1) + 1)
    }

    pub fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn from_dimacs(value: i32) -> Self {
        assert!(value != 0, "0 terminates DIMACS clauses");
        let var = Var::new(value.unsigned_abs());
        if value < 0 {
            var.neg()
        } else {
            var.pos()
        }
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var().0 as i32;
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    #[inline]
    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("empty clause")]
    EmptyClause,
    #[error("clause contains both {0} and its negation")]
    Tautology(Lit),
    #[error("variable {0} was never allocated")]
    UnallocatedVariable(Var),
    #[error("solve interrupted")]
    Interrupted,
    #[error("backend failure: {0}")]
    Backend(String),
}

/// Nonempty disjunction without duplicate or complementary literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause(Vec<Lit>);

impl Clause {
    /// Removes duplicate literals; rejects empty and tautological clauses.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Self, SatError> {
        let mut out: Vec<Lit> = Vec::new();
        for l in lits {
            if out.contains(&!l) {
                return Err(SatError::Tautology(l));
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        if out.is_empty() {
            return Err(SatError::EmptyClause);
        }
        Ok(Clause(out))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn is_satisfied_by(&self, model: &Assignment) -> bool {
        self.0.iter().any(|&l| model.lit_value(l))
    }
}

/// Total truth assignment returned by a satisfiable solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    pub fn value(&self, v: Var) -> bool {
        self.0[(v.0 - 1) as usize]
    }

    pub fn lit_value(&self, l: Lit) -> bool {
        self.value(l.var()) != l.is_negative()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

/// Cooperative cancellation polled by long-running searches.
pub trait Interrupt {
    fn interrupted(&self) -> bool;
}

/// Never interrupts.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoInterrupt;

impl Interrupt for NoInterrupt {
    fn interrupted(&self) -> bool {
        false
    }
}

/// Incremental SAT backend.
pub trait SatBackend {
    fn new_var(&mut self) -> Var;

    fn num_vars(&self) -> usize;

    /// Adds a clause permanently. Fails if it mentions an unallocated variable.
    fn add_clause(&mut self, clause: Clause) -> Result<(), SatError>;

    /// Solves the clauses added so far. Interruption is reported as
    /// [`SatError::Interrupted`], never as unsatisfiable.
    fn solve(&mut self, interrupt: &dyn Interrupt) -> Result<SolveResult, SatError>;

    fn add_lits(&mut self, lits: &[Lit]) -> Result<(), SatError> {
        self.add_clause(Clause::new(lits.iter().copied())?)
    }
}

/// Wraps a backend and keeps a copy of every clause for DIMACS export.
#[derive(Debug, Clone, Default)]
pub struct ClauseLog<B> {
    inner: B,
    clauses: Vec<Clause>,
}

impl<B: SatBackend> ClauseLog<B> {
    pub fn new(inner: B) -> Self {
        ClauseLog {
            inner,
            clauses: Vec::new(),
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn inner(&self) -> &B {
        &self.inner
    }

    pub fn to_dimacs(&self) -> String {
        to_dimacs(self.inner.num_vars(), &self.clauses)
    }
}

impl<B: SatBackend> SatBackend for ClauseLog<B> {
    fn new_var(&mut self) -> Var {
        self.inner.new_var()
    }

    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    fn add_clause(&mut self, clause: Clause) -> Result<(), SatError> {
        self.inner.add_clause(clause.clone())?;
        self.clauses.push(clause);
        Ok(())
    }

    fn solve(&mut self, interrupt: &dyn Interrupt) -> Result<SolveResult, SatError> {
        self.inner.solve(interrupt)
    }
}

/// DIMACS CNF text: `p cnf V C` header, one zero-terminated clause per line.
pub fn to_dimacs(num_vars: usize, clauses: &[Clause]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", num_vars, clauses.len());
    for c in clauses {
        for l in c.lits() {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

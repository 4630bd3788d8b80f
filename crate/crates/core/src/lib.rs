//! Sum-of-costs optimal multi-agent path finding (MAPF) by lazy compilation
//! to Boolean satisfiability.
//!
//! Each agent's candidate paths are represented as a time-expanded decision
//! diagram (a full MDD with every path under the current cost bounds, or a
//! sparse MDD built from an explicit candidate set). Diagrams are compiled to
//! CNF, handed to an incremental SAT backend, and collisions found in the
//! decoded plan are refined away by adding binary clauses on demand.
//!
//! The crate is `no_std` (it needs `alloc`). Wall-clock time is injected
//! through [`solvers::Clock`]; file IO, the CLI and the benchmark harness
//! live in the companion `mapf` crate.
//!
//! Solvers provided by [`solvers::solve`]:
//!
//! | algorithm                | model      | candidate paths                          |
//! |--------------------------|------------|------------------------------------------|
//! | `Cbs`                    | none       | constraint tree + space-time search      |
//! | `MddSat`                 | complete   | full MDD                                 |
//! | `SmtCbs`                 | incomplete | full MDD                                 |
//! | `SparseSmtCbs`           | incomplete | sparse MDD, OR-path extension            |
//! | `HeuristicSmtCbs`        | incomplete | sparse MDD, AND-path extension           |

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diagrams;
pub mod encoding;
pub mod instance;
pub mod pathing;
pub mod satif;
pub mod solvers;

pub mod fixtures;

pub use diagrams::Mdd;
pub use encoding::{BooleanModel, ModelMode};
pub use instance::{AgentId, Collision, CollisionKind, Graph, MapfInstance, Path, Solution, VertexId};
pub use pathing::{AgentConflicts, ConflictSet, Planner};
pub use solvers::{Algorithm, SolveOutcome, SolveStatus, SolverConfig};

//! Exact solvers and the cross-check between the two games.

mod gg;
mod mb;

use std::fmt;

pub use gg::{solve_gg, GgSolveResult};
pub use mb::{
    solve_mb, solve_mb_with, solve_position_with, verify_winning_line, Certificate, SolveLimits, SolveOptions,
    SolveResult,
};

use crate::error::Result;
use crate::gadgets::GadgetLibrary;
use crate::geography::{GgInstance, Player, Ruleset};
use crate::hypergraph::Turn;
use crate::reduction::{build_associated_game, global_joint_pairing, uniformize5};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn keyword(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EquivalenceOptions {
    pub limits: SolveLimits,
    /// Also solve the 5-uniform version of the associated game.
    pub uniform: bool,
    /// Let the Maker-Breaker search stop at nodes the joint pairing blocks.
    pub joint_pairing_hint: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub gg: GgSolveResult,
    pub mb: SolveResult,
    pub uniform: Option<SolveResult>,
    pub squares: usize,
    pub verdict: Verdict,
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.verdict)?;
        writeln!(f, "gg {}", self.gg)?;
        write!(f, "mb squares={} {}", self.squares, self.mb)?;
        if let Some(u) = &self.uniform {
            write!(f, "\nuniform {u}")?;
        }
        Ok(())
    }
}

fn matches(alice: Player, r: &SolveResult) -> Option<bool> {
    r.winner.map(|w| (w == Turn::Maker) == (alice == Player::Alice))
}

/// Solves `inst` under both games and compares the winners: Alice should
/// win exactly when Maker wins the associated game.
pub fn verify_equivalence(
    inst: &GgInstance,
    lib: &GadgetLibrary,
    opts: &EquivalenceOptions,
) -> Result<EquivalenceReport> {
    let game = build_associated_game(inst, lib)?;
    let gg = solve_gg(inst, Ruleset::Original)?;
    let mb_opts = SolveOptions {
        limits: opts.limits,
        pairing_hint: opts.joint_pairing_hint.then(|| global_joint_pairing(&game)),
        ..SolveOptions::default()
    };
    let mb = solve_mb_with(&game.spec, &mb_opts)?;
    let uniform = if opts.uniform {
        let spec = uniformize5(&game.spec)?;
        Some(solve_mb_with(
            &spec,
            &SolveOptions {
                pairing_hint: None,
                ..mb_opts.clone()
            },
        )?)
    } else {
        None
    };
    let checks: Vec<Option<bool>> = std::iter::once(&mb)
        .chain(uniform.as_ref())
        .map(|r| matches(gg.winner, r))
        .collect();
    let verdict = if checks.contains(&Some(false)) {
        Verdict::Fail
    } else if checks.contains(&None) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(EquivalenceReport {
        gg,
        mb,
        uniform,
        squares: game.spec.hypergraph.squares().len(),
        verdict,
    })
}

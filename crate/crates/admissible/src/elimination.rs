//! Iterated elimination of dominated strategies. Each round removes every
//! strategy dominated relative to the current restriction (maximal
//! simultaneous deletion), recording a replayable certificate per removal.

use crate::dominance::{
    find_dominator, find_justifying_belief, BeliefCertificate, DominanceCertificate,
    DominanceMode, DominatorClass, SupportMode,
};
use crate::game::{Belief, GameError, NormalFormGame, StrategyRestriction};
use serde_json::json;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Rounds(usize),
    ToFixpoint,
}

#[derive(Debug, Clone)]
pub struct Removal {
    pub player: usize,
    pub strategy: usize,
    pub certificate: DominanceCertificate,
}

/// The chain X^0 ⊇ X^1 ⊇ ... of surviving strategy sets. `removals[h]` maps
/// `rounds[h]` to `rounds[h+1]`. `converged_at = Some(h)` means round `h`
/// removed nothing, so `rounds[h]` is the fixpoint.
#[derive(Debug, Clone)]
pub struct EliminationTrace {
    pub criterion: DominanceMode,
    pub class: DominatorClass,
    rounds: Vec<StrategyRestriction>,
    removals: Vec<Vec<Removal>>,
    converged_at: Option<usize>,
}

impl EliminationTrace {
    pub fn rounds(&self) -> &[StrategyRestriction] {
        &self.rounds
    }

    pub fn removals(&self) -> &[Vec<Removal>] {
        &self.removals
    }

    pub fn converged_at(&self) -> Option<usize> {
        self.converged_at
    }

    /// X^k, clamped to the fixpoint once convergence was observed. `None`
    /// only when `k` runs past a depth-limited trace.
    pub fn restriction_at(&self, k: usize) -> Option<&StrategyRestriction> {
        if k < self.rounds.len() {
            return Some(&self.rounds[k]);
        }
        self.converged_at.map(|_| self.rounds.last().unwrap())
    }

    pub fn fixpoint(&self) -> Option<&StrategyRestriction> {
        self.converged_at.map(|h| &self.rounds[h])
    }

    pub fn to_json(&self, game: &NormalFormGame) -> serde_json::Value {
        json!({
            "criterion": match self.criterion { DominanceMode::Strong => "strong", DominanceMode::Weak => "weak" },
            "class": match self.class { DominatorClass::Pure => "pure", DominatorClass::Mixed => "mixed" },
            "converged_at": self.converged_at,
            "rounds": self.rounds.iter().map(|r| r.to_ids(game)).collect::<Vec<_>>(),
            "removals": self
                .removals
                .iter()
                .map(|round| round.iter().map(|r| r.certificate.to_json(game)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Runs iterated elimination. `ToFixpoint` always terminates: every
/// non-final round removes at least one strategy.
pub fn eliminate(
    game: &NormalFormGame,
    criterion: DominanceMode,
    class: DominatorClass,
    depth: Depth,
) -> Result<EliminationTrace, GameError> {
    let mut rounds = vec![StrategyRestriction::full(game)];
    let mut removals: Vec<Vec<Removal>> = Vec::new();
    let mut converged_at = None;
    loop {
        let h = rounds.len() - 1;
        if let Depth::Rounds(k) = depth {
            if h == k {
                break;
            }
        }
        let current = &rounds[h];
        let mut round_removals = Vec::new();
        for player in 0..game.num_players() {
            for &strategy in current.set(player) {
                if let Some(certificate) =
                    find_dominator(game, player, strategy, current, criterion, class)?
                {
                    round_removals.push(Removal {
                        player,
                        strategy,
                        certificate,
                    });
                }
            }
        }
        if round_removals.is_empty() {
            converged_at = Some(h);
            break;
        }
        let mut next = current.clone();
        for r in &round_removals {
            next.remove(r.player, r.strategy);
        }
        for player in 0..game.num_players() {
            assert!(
                !next.set(player).is_empty(),
                "elimination emptied a strategy set, which dominance cannot do"
            );
        }
        removals.push(round_removals);
        rounds.push(next);
    }
    Ok(EliminationTrace {
        criterion,
        class,
        rounds,
        removals,
        converged_at,
    })
}

/// Does `strategy` survive `k` rounds (or iteration to the fixpoint)?
pub fn survives(
    game: &NormalFormGame,
    player: usize,
    strategy: &str,
    depth: Depth,
    criterion: DominanceMode,
    class: DominatorClass,
) -> Result<bool, GameError> {
    let idx = game.strategy_index(player, strategy)?;
    let trace = eliminate(game, criterion, class, Depth::ToFixpoint)?;
    let restriction = match depth {
        Depth::Rounds(k) => trace
            .restriction_at(k)
            .expect("fixpoint trace answers every depth"),
        Depth::ToFixpoint => trace.fixpoint().expect("fixpoint trace converged"),
    };
    Ok(restriction.contains(player, idx))
}

/// The fixpoint of strong elimination with mixed dominators, together with a
/// justifying belief for every surviving strategy (supported inside the
/// fixpoint itself).
#[derive(Debug, Clone)]
pub struct RationalizableSets {
    pub restriction: StrategyRestriction,
    pub beliefs: BTreeMap<(usize, usize), BeliefCertificate>,
    pub trace: EliminationTrace,
}

impl RationalizableSets {
    pub fn to_json(&self, game: &NormalFormGame) -> serde_json::Value {
        json!({
            "sets": self.restriction.to_ids(game),
            "converged_at": self.trace.converged_at(),
            "beliefs": self
                .beliefs
                .values()
                .map(|cert| cert.to_json(game))
                .collect::<Vec<_>>(),
        })
    }
}

pub fn rationalizable_sets(game: &NormalFormGame) -> Result<RationalizableSets, GameError> {
    let trace = eliminate(
        game,
        DominanceMode::Strong,
        DominatorClass::Mixed,
        Depth::ToFixpoint,
    )?;
    let restriction = trace.fixpoint().expect("fixpoint trace converged").clone();
    let mut beliefs = BTreeMap::new();
    for player in 0..game.num_players() {
        for &strategy in restriction.set(player) {
            let cert =
                find_justifying_belief(game, player, strategy, &restriction, SupportMode::Subset)?
                    .expect("a strategy surviving strong elimination has a justifying belief");
            beliefs.insert((player, strategy), cert);
        }
    }
    Ok(RationalizableSets {
        restriction,
        beliefs,
        trace,
    })
}

/// Checks a claimed rationalizability witness: every listed strategy must be
/// a best response to its belief, and that belief must live on the candidate
/// sets themselves. Beliefs must be supplied for every member.
pub fn verify_rat1_witness(
    game: &NormalFormGame,
    candidates: &StrategyRestriction,
    beliefs: &BTreeMap<(usize, usize), Belief>,
) -> Result<bool, GameError> {
    for player in 0..game.num_players() {
        for &strategy in candidates.set(player) {
            let belief = beliefs.get(&(player, strategy)).ok_or_else(|| {
                GameError::Distribution(format!(
                    "missing belief for player {} strategy {}",
                    player + 1,
                    game.strategy_id(player, strategy)
                ))
            })?;
            let cert = BeliefCertificate {
                player,
                strategy,
                support: SupportMode::Subset,
                restriction: candidates.clone(),
                belief: belief.clone(),
            };
            if !cert.verify(game)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

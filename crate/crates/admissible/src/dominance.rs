//! Dominance and justifying-belief queries. Mixed-strategy questions reduce
//! to exact linear programs; every positive answer comes with a certificate
//! that is replayed against the game before being returned.
//!
//! Dominators are drawn from the player's full strategy set while payoffs are
//! compared only on opponent profiles from the given restriction. A candidate
//! mixture never puts weight on the strategy under test: any dominating
//! mixture that does can be rescaled into one that does not.

use crate::game::{
    best_responses, Belief, GameError, MixedStrategy, NormalFormGame, StrategyRestriction,
};
use crate::lp::{solve, LinearProgram, LpOutcome, Relation, Sense};
use crate::ratio::Rat;
use num::{One, Signed, Zero};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceMode {
    Strong,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominatorClass {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportMode {
    Subset,
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dominator {
    Pure(usize),
    Mixed(MixedStrategy),
}

impl Dominator {
    fn payoff_against(&self, game: &NormalFormGame, player: usize, opp: &[usize]) -> Rat {
        match self {
            Dominator::Pure(idx) => game.payoff_against(player, *idx, opp).clone(),
            Dominator::Mixed(m) => m.payoff_against(game, opp),
        }
    }
}

/// Witness that `dominated` is dominated on `restriction`'s opponent
/// profiles. For weak mode `strict_witness` is one profile where the
/// inequality is strict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceCertificate {
    pub player: usize,
    pub dominated: usize,
    pub dominator: Dominator,
    pub mode: DominanceMode,
    pub restriction: StrategyRestriction,
    pub strict_witness: Option<Vec<usize>>,
}

impl DominanceCertificate {
    /// Replays every payoff comparison the certificate claims.
    pub fn verify(&self, game: &NormalFormGame) -> Result<bool, GameError> {
        let profiles = self.restriction.opponent_profiles(self.player)?;
        let dominated_ok = match &self.dominator {
            Dominator::Pure(idx) => *idx != self.dominated,
            Dominator::Mixed(m) => !m.weights().contains_key(&self.dominated),
        };
        if !dominated_ok {
            return Ok(false);
        }
        match self.mode {
            DominanceMode::Strong => {
                if self.strict_witness.is_some() {
                    return Ok(false);
                }
                for opp in &profiles {
                    let lhs = self.dominator.payoff_against(game, self.player, opp);
                    if lhs <= *game.payoff_against(self.player, self.dominated, opp) {
                        return Ok(false);
                    }
                }
            }
            DominanceMode::Weak => {
                let Some(witness) = &self.strict_witness else {
                    return Ok(false);
                };
                if !profiles.contains(witness) {
                    return Ok(false);
                }
                for opp in &profiles {
                    let lhs = self.dominator.payoff_against(game, self.player, opp);
                    let rhs = game.payoff_against(self.player, self.dominated, opp);
                    if lhs < *rhs || (opp == witness && lhs == *rhs) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self, game: &NormalFormGame) -> serde_json::Value {
        let dominator = match &self.dominator {
            Dominator::Pure(idx) => json!({ "pure": game.strategy_id(self.player, *idx) }),
            Dominator::Mixed(m) => json!({ "mixed": m.to_id_map(game) }),
        };
        json!({
            "player": self.player + 1,
            "dominated": game.strategy_id(self.player, self.dominated),
            "dominator": dominator,
            "mode": match self.mode { DominanceMode::Strong => "strong", DominanceMode::Weak => "weak" },
            "witness": self
                .strict_witness
                .as_ref()
                .map(|w| game.render_opponent_profile(self.player, w)),
        })
    }
}

/// Witness that `strategy` is a best response to `belief`, with the support
/// discipline the query asked for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefCertificate {
    pub player: usize,
    pub strategy: usize,
    pub support: SupportMode,
    pub restriction: StrategyRestriction,
    pub belief: Belief,
}

impl BeliefCertificate {
    pub fn verify(&self, game: &NormalFormGame) -> Result<bool, GameError> {
        let support_ok = match self.support {
            SupportMode::Subset => self.belief.supported_within(game, &self.restriction),
            SupportMode::Full => self.belief.has_full_support_on(&self.restriction)?,
        };
        if !support_ok {
            return Ok(false);
        }
        Ok(best_responses(game, self.player, &self.belief)?.contains(&self.strategy))
    }

    pub fn to_json(&self, game: &NormalFormGame) -> serde_json::Value {
        json!({
            "player": self.player + 1,
            "strategy": game.strategy_id(self.player, self.strategy),
            "support": match self.support { SupportMode::Subset => "subset", SupportMode::Full => "full" },
            "belief": self.belief.to_id_map(game),
        })
    }
}

fn check_player_strategy(
    game: &NormalFormGame,
    player: usize,
    strategy: usize,
) -> Result<(), GameError> {
    if player >= game.num_players() {
        return Err(GameError::PlayerIndex(player));
    }
    if strategy >= game.num_strategies(player) {
        return Err(GameError::UnknownStrategy {
            player: game.player_name(player).to_string(),
            id: format!("#{strategy}"),
        });
    }
    Ok(())
}

/// Searches for a dominator of `strategy` relative to `restriction`. Pure
/// candidates are scanned in index order; mixed candidates go through an LP
/// maximizing the dominance slack, so the answer is deterministic.
pub fn find_dominator(
    game: &NormalFormGame,
    player: usize,
    strategy: usize,
    restriction: &StrategyRestriction,
    mode: DominanceMode,
    class: DominatorClass,
) -> Result<Option<DominanceCertificate>, GameError> {
    check_player_strategy(game, player, strategy)?;
    let profiles = restriction.opponent_profiles(player)?;
    let candidates: Vec<usize> = (0..game.num_strategies(player))
        .filter(|&c| c != strategy)
        .collect();
    if candidates.is_empty() {
        return Ok(None);
    }

    let found = match class {
        DominatorClass::Pure => find_pure(game, player, strategy, &profiles, mode, &candidates),
        DominatorClass::Mixed => {
            find_mixed(game, player, strategy, &profiles, mode, &candidates)?
        }
    };
    let Some((dominator, strict_witness)) = found else {
        return Ok(None);
    };
    let cert = DominanceCertificate {
        player,
        dominated: strategy,
        dominator,
        mode,
        restriction: restriction.clone(),
        strict_witness,
    };
    assert!(
        cert.verify(game)?,
        "dominance search produced a certificate that does not replay"
    );
    Ok(Some(cert))
}

fn find_pure(
    game: &NormalFormGame,
    player: usize,
    strategy: usize,
    profiles: &[Vec<usize>],
    mode: DominanceMode,
    candidates: &[usize],
) -> Option<(Dominator, Option<Vec<usize>>)> {
    'cand: for &c in candidates {
        let mut strict: Option<Vec<usize>> = None;
        for opp in profiles {
            let lhs = game.payoff_against(player, c, opp);
            let rhs = game.payoff_against(player, strategy, opp);
            match mode {
                DominanceMode::Strong => {
                    if lhs <= rhs {
                        continue 'cand;
                    }
                }
                DominanceMode::Weak => {
                    if lhs < rhs {
                        continue 'cand;
                    }
                    if lhs > rhs && strict.is_none() {
                        strict = Some(opp.clone());
                    }
                }
            }
        }
        match mode {
            DominanceMode::Strong => return Some((Dominator::Pure(c), None)),
            DominanceMode::Weak => {
                if strict.is_some() {
                    return Some((Dominator::Pure(c), strict));
                }
            }
        }
    }
    None
}

fn find_mixed(
    game: &NormalFormGame,
    player: usize,
    strategy: usize,
    profiles: &[Vec<usize>],
    mode: DominanceMode,
    candidates: &[usize],
) -> Result<Option<(Dominator, Option<Vec<usize>>)>, GameError> {
    let k = candidates.len();
    let outcome = match mode {
        DominanceMode::Strong => {
            // vars: mixture weights, then the slack d; maximize d subject to
            // mix(t) - d >= u(strategy, t) for every opponent profile t.
            let mut lp = LinearProgram::new(k + 1, Sense::Maximize);
            let mut objective = vec![Rat::zero(); k + 1];
            objective[k] = Rat::one();
            lp.set_objective(objective);
            let mut simplex_row = vec![Rat::one(); k + 1];
            simplex_row[k] = Rat::zero();
            lp.add(simplex_row, Relation::Eq, Rat::one());
            for opp in profiles {
                let mut coeffs: Vec<Rat> = candidates
                    .iter()
                    .map(|&c| game.payoff_against(player, c, opp).clone())
                    .collect();
                coeffs.push(-Rat::one());
                lp.add(
                    coeffs,
                    Relation::Ge,
                    game.payoff_against(player, strategy, opp).clone(),
                );
            }
            solve(&lp).expect("dominance LP is well-formed")
        }
        DominanceMode::Weak => {
            // vars: mixture weights, then one gap per opponent profile;
            // maximize the total gap subject to mix(t) - gap_t = u(strategy, t).
            let t = profiles.len();
            let mut lp = LinearProgram::new(k + t, Sense::Maximize);
            let mut objective = vec![Rat::zero(); k + t];
            for g in objective.iter_mut().skip(k) {
                *g = Rat::one();
            }
            lp.set_objective(objective);
            let mut simplex_row = vec![Rat::zero(); k + t];
            for w in simplex_row.iter_mut().take(k) {
                *w = Rat::one();
            }
            lp.add(simplex_row, Relation::Eq, Rat::one());
            for (row, opp) in profiles.iter().enumerate() {
                let mut coeffs = vec![Rat::zero(); k + t];
                for (col, &c) in candidates.iter().enumerate() {
                    coeffs[col] = game.payoff_against(player, c, opp).clone();
                }
                coeffs[k + row] = -Rat::one();
                lp.add(
                    coeffs,
                    Relation::Eq,
                    game.payoff_against(player, strategy, opp).clone(),
                );
            }
            solve(&lp).expect("dominance LP is well-formed")
        }
    };

    let LpOutcome::Optimal { value, point } = outcome else {
        return Ok(None);
    };
    if !value.is_positive() {
        return Ok(None);
    }
    let weights = candidates
        .iter()
        .enumerate()
        .map(|(col, &c)| (c, point[col].clone()))
        .collect();
    let mix = MixedStrategy::new(game, player, weights)?;
    let witness = match mode {
        DominanceMode::Strong => None,
        DominanceMode::Weak => {
            let found = profiles.iter().find(|opp| {
                mix.payoff_against(game, opp) > *game.payoff_against(player, strategy, opp)
            });
            Some(
                found
                    .expect("positive total gap implies a strict profile")
                    .clone(),
            )
        }
    };
    Ok(Some((Dominator::Mixed(mix), witness)))
}

/// Searches for a belief over `restriction`'s opponent profiles making
/// `strategy` a best response among the player's full strategy set. `Full`
/// demands support on every profile of the restriction and is found by
/// maximizing the minimum weight.
pub fn find_justifying_belief(
    game: &NormalFormGame,
    player: usize,
    strategy: usize,
    restriction: &StrategyRestriction,
    support: SupportMode,
) -> Result<Option<BeliefCertificate>, GameError> {
    check_player_strategy(game, player, strategy)?;
    let profiles = restriction.opponent_profiles(player)?;
    let t = profiles.len();
    let extra = match support {
        SupportMode::Subset => 0,
        SupportMode::Full => 1,
    };
    let mut lp = LinearProgram::new(t + extra, Sense::Maximize);
    if extra == 1 {
        let mut objective = vec![Rat::zero(); t + 1];
        objective[t] = Rat::one();
        lp.set_objective(objective);
        for row in 0..t {
            let mut coeffs = vec![Rat::zero(); t + 1];
            coeffs[row] = Rat::one();
            coeffs[t] = -Rat::one();
            lp.add(coeffs, Relation::Ge, Rat::zero());
        }
    }
    let mut mass_row = vec![Rat::one(); t + extra];
    if extra == 1 {
        mass_row[t] = Rat::zero();
    }
    lp.add(mass_row, Relation::Eq, Rat::one());
    for rival in 0..game.num_strategies(player) {
        if rival == strategy {
            continue;
        }
        let mut coeffs: Vec<Rat> = profiles
            .iter()
            .map(|opp| {
                game.payoff_against(player, strategy, opp)
                    - game.payoff_against(player, rival, opp)
            })
            .collect();
        coeffs.extend(std::iter::repeat_with(Rat::zero).take(extra));
        lp.add(coeffs, Relation::Ge, Rat::zero());
    }

    let outcome = solve(&lp).expect("belief LP is well-formed");
    let LpOutcome::Optimal { value, point } = outcome else {
        return Ok(None);
    };
    if support == SupportMode::Full && !value.is_positive() {
        return Ok(None);
    }
    let weights = profiles
        .iter()
        .enumerate()
        .map(|(row, opp)| (opp.clone(), point[row].clone()))
        .collect();
    let cert = BeliefCertificate {
        player,
        strategy,
        support,
        restriction: restriction.clone(),
        belief: Belief::new(game, player, weights)?,
    };
    assert!(
        cert.verify(game)?,
        "belief search produced a certificate that does not replay"
    );
    Ok(Some(cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    fn prisoners_dilemma() -> NormalFormGame {
        NormalFormGame::two_player(
            ["P1", "P2"],
            &["C", "D"],
            &["C", "D"],
            &[&[3, 0], &[4, 1]],
            &[&[3, 4], &[0, 1]],
        )
    }

    // row player: T beats B only when the column player moves R
    fn g1() -> NormalFormGame {
        NormalFormGame::two_player(
            ["P1", "P2"],
            &["T", "B"],
            &["L", "R"],
            &[&[1, 1], &[1, 0]],
            &[&[0, 0], &[0, 0]],
        )
    }

    #[test]
    fn pd_cooperate_strongly_dominated() {
        let g = prisoners_dilemma();
        let full = StrategyRestriction::full(&g);
        for class in [DominatorClass::Pure, DominatorClass::Mixed] {
            let cert = find_dominator(&g, 0, 0, &full, DominanceMode::Strong, class)
                .unwrap()
                .expect("C is strongly dominated by D");
            match &cert.dominator {
                Dominator::Pure(idx) => assert_eq!(*idx, 1),
                Dominator::Mixed(m) => {
                    assert_eq!(m.weights().len(), 1);
                    assert!(m.weights().contains_key(&1));
                }
            }
            assert!(cert.verify(&g).unwrap());
        }
        // D itself is undominated
        for mode in [DominanceMode::Strong, DominanceMode::Weak] {
            assert!(find_dominator(&g, 0, 1, &full, mode, DominatorClass::Mixed)
                .unwrap()
                .is_none());
        }
    }

    #[test]
    fn weak_dominance_with_witness() {
        let g = g1();
        let full = StrategyRestriction::full(&g);
        let cert = find_dominator(&g, 0, 1, &full, DominanceMode::Weak, DominatorClass::Pure)
            .unwrap()
            .expect("B is weakly dominated by T");
        assert_eq!(cert.dominator, Dominator::Pure(0));
        assert_eq!(cert.strict_witness, Some(vec![1]));
        // ... but not strongly, they tie on L
        assert!(find_dominator(&g, 0, 1, &full, DominanceMode::Strong, DominatorClass::Mixed)
            .unwrap()
            .is_none());
        // T is not even weakly dominated
        assert!(find_dominator(&g, 0, 0, &full, DominanceMode::Weak, DominatorClass::Mixed)
            .unwrap()
            .is_none());
    }

    #[test]
    fn mixed_only_dominance() {
        // D loses to the even U/M mixture although no pure strategy beats it
        let g = NormalFormGame::two_player(
            ["P1", "P2"],
            &["U", "M", "D"],
            &["L", "R"],
            &[&[3, 0], &[0, 3], &[1, 1]],
            &[&[0, 0], &[0, 0], &[0, 0]],
        );
        let full = StrategyRestriction::full(&g);
        assert!(find_dominator(&g, 0, 2, &full, DominanceMode::Strong, DominatorClass::Pure)
            .unwrap()
            .is_none());
        let cert = find_dominator(&g, 0, 2, &full, DominanceMode::Strong, DominatorClass::Mixed)
            .unwrap()
            .expect("mixture dominates D");
        match &cert.dominator {
            Dominator::Mixed(m) => {
                assert!(!m.weights().contains_key(&2));
                assert_eq!(m.weights().len(), 2);
            }
            other => panic!("expected mixed dominator, got {other:?}"),
        }
        assert!(cert.verify(&g).unwrap());
    }

    #[test]
    fn singleton_strategy_set_has_no_dominator() {
        let g = NormalFormGame::two_player(
            ["P1", "P2"],
            &["only"],
            &["l", "r"],
            &[&[1, 0]],
            &[&[0, 1]],
        );
        let full = StrategyRestriction::full(&g);
        assert!(
            find_dominator(&g, 0, 0, &full, DominanceMode::Weak, DominatorClass::Mixed)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn restriction_changes_the_answer() {
        let g = g1();
        let mut only_l = StrategyRestriction::full(&g);
        only_l.remove(1, 1);
        // with R gone, T and B tie on every remaining profile
        assert!(
            find_dominator(&g, 0, 1, &only_l, DominanceMode::Weak, DominatorClass::Mixed)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn pd_defect_has_full_support_belief() {
        let g = prisoners_dilemma();
        let full = StrategyRestriction::full(&g);
        let cert = find_justifying_belief(&g, 0, 1, &full, SupportMode::Full)
            .unwrap()
            .expect("D is a best response to everything");
        // the slack-maximizing belief is the uniform one here
        assert_eq!(cert.belief.weight(&[0]), rat(1, 2));
        assert_eq!(cert.belief.weight(&[1]), rat(1, 2));
        assert!(cert.verify(&g).unwrap());
    }

    #[test]
    fn pd_cooperate_never_justified() {
        let g = prisoners_dilemma();
        let full = StrategyRestriction::full(&g);
        assert!(find_justifying_belief(&g, 0, 0, &full, SupportMode::Subset)
            .unwrap()
            .is_none());
    }

    #[test]
    fn weakly_dominated_needs_degenerate_belief() {
        let g = g1();
        let full = StrategyRestriction::full(&g);
        // B only ties T when R has probability zero
        assert!(find_justifying_belief(&g, 0, 1, &full, SupportMode::Full)
            .unwrap()
            .is_none());
        let cert = find_justifying_belief(&g, 0, 1, &full, SupportMode::Subset)
            .unwrap()
            .expect("point mass on L justifies B");
        let support: Vec<_> = cert.belief.support().cloned().collect();
        assert_eq!(support, vec![vec![0]]);
        assert!(cert.verify(&g).unwrap());
    }

    #[test]
    fn certificate_verification_rejects_tampering() {
        let g = prisoners_dilemma();
        let full = StrategyRestriction::full(&g);
        let mut cert =
            find_dominator(&g, 0, 0, &full, DominanceMode::Strong, DominatorClass::Pure)
                .unwrap()
                .unwrap();
        cert.dominated = 1;
        cert.dominator = Dominator::Pure(0);
        assert!(!cert.verify(&g).unwrap());
    }
}

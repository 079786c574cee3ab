//! Finite normal-form games with exact rational payoffs, plus the belief and
//! mixed-strategy types everything else is phrased in.
//!
//! Players are indexed 0-based internally; strategy ids are strings and all
//! public lookups go through them. Opponent profiles are vectors of strategy
//! indices ordered by player index with the owner skipped.

use crate::ratio::{format_rat, parse_rat, Rat};
use itertools::Itertools;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("a game needs at least two players, got {0}")]
    PlayerCount(usize),
    #[error("player {0}: empty strategy set")]
    EmptyStrategies(String),
    #[error("player {player}: duplicate strategy id `{id}`")]
    DuplicateStrategy { player: String, id: String },
    #[error("player index {0} out of range")]
    PlayerIndex(usize),
    #[error("player {player}: unknown strategy id `{id}`")]
    UnknownStrategy { player: String, id: String },
    #[error("payoff table: {0}")]
    PayoffShape(String),
    #[error("belief belongs to player {got}, expected player {want}")]
    BeliefPlayer { got: usize, want: usize },
    #[error("distribution: {0}")]
    Distribution(String),
    #[error("profile has wrong length {got}, expected {want}")]
    ProfileLength { got: usize, want: usize },
    #[error("empty restriction for player {0}")]
    EmptyRestriction(usize),
    #[error("game file: {0}")]
    File(String),
}

/// A finite normal-form game. Payoffs are stored flat in profile-major
/// (lexicographic) order: `flat[i1 * stride1 + i2 * stride2 + ...]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormGame {
    players: Vec<String>,
    strategies: Vec<Vec<String>>,
    index: Vec<HashMap<String, usize>>,
    strides: Vec<usize>,
    payoffs: Vec<Vec<Rat>>,
}

impl NormalFormGame {
    pub fn new(
        players: Vec<String>,
        strategies: Vec<Vec<String>>,
        payoffs: Vec<Vec<Rat>>,
    ) -> Result<Self, GameError> {
        let n = players.len();
        if n < 2 {
            return Err(GameError::PlayerCount(n));
        }
        if strategies.len() != n {
            return Err(GameError::PayoffShape(format!(
                "{} strategy sets for {} players",
                strategies.len(),
                n
            )));
        }
        let mut index = Vec::with_capacity(n);
        for (p, ids) in strategies.iter().enumerate() {
            if ids.is_empty() {
                return Err(GameError::EmptyStrategies(players[p].clone()));
            }
            let mut map = HashMap::new();
            for (k, id) in ids.iter().enumerate() {
                if map.insert(id.clone(), k).is_some() {
                    return Err(GameError::DuplicateStrategy {
                        player: players[p].clone(),
                        id: id.clone(),
                    });
                }
            }
            index.push(map);
        }
        let mut strides = vec![1usize; n];
        for p in (0..n.saturating_sub(1)).rev() {
            strides[p] = strides[p + 1] * strategies[p + 1].len();
        }
        let total = strides[0] * strategies[0].len();
        if payoffs.len() != total {
            return Err(GameError::PayoffShape(format!(
                "{} payoff entries for {} profiles",
                payoffs.len(),
                total
            )));
        }
        for entry in &payoffs {
            if entry.len() != n {
                return Err(GameError::PayoffShape(format!(
                    "payoff entry of length {} for {} players",
                    entry.len(),
                    n
                )));
            }
        }
        Ok(Self {
            players,
            strategies,
            index,
            strides,
            payoffs,
        })
    }

    /// Convenience constructor for two-player games given row/column payoff
    /// tables (`u1[r][c]`, `u2[r][c]`).
    pub fn two_player(
        players: [&str; 2],
        rows: &[&str],
        cols: &[&str],
        u1: &[&[i64]],
        u2: &[&[i64]],
    ) -> Self {
        let mut payoffs = Vec::new();
        for r in 0..rows.len() {
            for c in 0..cols.len() {
                payoffs.push(vec![
                    Rat::from_integer(u1[r][c].into()),
                    Rat::from_integer(u2[r][c].into()),
                ]);
            }
        }
        Self::new(
            players.iter().map(|s| s.to_string()).collect(),
            vec![
                rows.iter().map(|s| s.to_string()).collect(),
                cols.iter().map(|s| s.to_string()).collect(),
            ],
            payoffs,
        )
        .expect("two_player tables must be rectangular")
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn player_name(&self, i: usize) -> &str {
        &self.players[i]
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn num_strategies(&self, i: usize) -> usize {
        self.strategies[i].len()
    }

    pub fn strategy_ids(&self, i: usize) -> &[String] {
        &self.strategies[i]
    }

    pub fn strategy_id(&self, i: usize, idx: usize) -> &str {
        &self.strategies[i][idx]
    }

    pub fn strategy_index(&self, i: usize, id: &str) -> Result<usize, GameError> {
        if i >= self.players.len() {
            return Err(GameError::PlayerIndex(i));
        }
        self.index[i]
            .get(id)
            .copied()
            .ok_or_else(|| GameError::UnknownStrategy {
                player: self.players[i].clone(),
                id: id.to_string(),
            })
    }

    /// Players other than `i`, in index order.
    pub fn opponents(&self, i: usize) -> Vec<usize> {
        (0..self.players.len()).filter(|&j| j != i).collect()
    }

    fn flat_index(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.players.len());
        profile
            .iter()
            .zip(&self.strides)
            .map(|(idx, stride)| idx * stride)
            .sum()
    }

    /// Payoff to player `i` at a full strategy profile (indices).
    pub fn payoff(&self, i: usize, profile: &[usize]) -> &Rat {
        &self.payoffs[self.flat_index(profile)][i]
    }

    /// Splices player `i`'s strategy into an opponent profile to obtain a
    /// full profile.
    pub fn full_profile(&self, i: usize, own: usize, opp: &[usize]) -> Vec<usize> {
        let n = self.players.len();
        debug_assert_eq!(opp.len(), n - 1);
        let mut profile = Vec::with_capacity(n);
        let mut it = opp.iter();
        for j in 0..n {
            if j == i {
                profile.push(own);
            } else {
                profile.push(*it.next().unwrap());
            }
        }
        profile
    }

    /// Payoff to `i` when playing `own` against opponent profile `opp`.
    pub fn payoff_against(&self, i: usize, own: usize, opp: &[usize]) -> &Rat {
        let profile = self.full_profile(i, own, opp);
        &self.payoffs[self.flat_index(&profile)][i]
    }

    /// All full profiles, lexicographic by strategy index.
    pub fn profiles(&self) -> Vec<Vec<usize>> {
        self.strategies
            .iter()
            .map(|s| 0..s.len())
            .multi_cartesian_product()
            .collect()
    }

    pub fn render_profile(&self, profile: &[usize]) -> String {
        let ids: Vec<&str> = profile
            .iter()
            .enumerate()
            .map(|(j, &idx)| self.strategy_id(j, idx))
            .collect();
        format!("({})", ids.join(","))
    }

    /// Renders an opponent profile of player `i` as `(id,...)`.
    pub fn render_opponent_profile(&self, i: usize, opp: &[usize]) -> String {
        let ids: Vec<&str> = self
            .opponents(i)
            .iter()
            .zip(opp)
            .map(|(&j, &idx)| self.strategy_id(j, idx))
            .collect();
        format!("({})", ids.join(","))
    }

    pub fn parse_profile(&self, ids: &[String]) -> Result<Vec<usize>, GameError> {
        if ids.len() != self.players.len() {
            return Err(GameError::ProfileLength {
                got: ids.len(),
                want: self.players.len(),
            });
        }
        ids.iter()
            .enumerate()
            .map(|(j, id)| self.strategy_index(j, id))
            .collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        fn build(
            game: &NormalFormGame,
            player_dim: usize,
            prefix: &mut Vec<usize>,
        ) -> serde_json::Value {
            if player_dim == game.num_players() {
                let entry = &game.payoffs[game.flat_index(prefix)];
                return serde_json::Value::Array(
                    entry
                        .iter()
                        .map(|r| serde_json::Value::String(format_rat(r)))
                        .collect(),
                );
            }
            let mut arr = Vec::new();
            for idx in 0..game.num_strategies(player_dim) {
                prefix.push(idx);
                arr.push(build(game, player_dim + 1, prefix));
                prefix.pop();
            }
            serde_json::Value::Array(arr)
        }
        let file = GameFile {
            players: self.players.clone(),
            strategies: self.strategies.clone(),
            payoffs: build(self, 0, &mut Vec::new()),
        };
        serde_json::to_value(file).expect("game serialization cannot fail")
    }

    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_json_value())
            .expect("game serialization cannot fail");
        out.push('\n');
        out
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self, GameError> {
        let file: GameFile = serde_json::from_value(value.clone())
            .map_err(|e| GameError::File(e.to_string()))?;
        file.into_game()
    }

    pub fn from_json_str(text: &str) -> Result<Self, GameError> {
        let file: GameFile =
            serde_json::from_str(text).map_err(|e| GameError::File(e.to_string()))?;
        file.into_game()
    }
}

#[derive(Serialize, Deserialize)]
struct GameFile {
    players: Vec<String>,
    strategies: Vec<Vec<String>>,
    payoffs: serde_json::Value,
}

impl GameFile {
    fn into_game(self) -> Result<NormalFormGame, GameError> {
        let n = self.players.len();
        if self.strategies.len() != n {
            return Err(GameError::File(format!(
                "{} strategy sets for {} players",
                self.strategies.len(),
                n
            )));
        }
        let total: usize = self.strategies.iter().map(|s| s.len().max(1)).product();
        let mut flat: Vec<Vec<Rat>> = Vec::with_capacity(total);
        let mut path: Vec<usize> = Vec::new();
        walk_payoffs(&self.payoffs, &self.strategies, 0, &mut path, &mut flat)?;
        NormalFormGame::new(self.players, self.strategies, flat)
    }
}

fn walk_payoffs(
    value: &serde_json::Value,
    strategies: &[Vec<String>],
    dim: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<Rat>>,
) -> Result<(), GameError> {
    let arr = value
        .as_array()
        .ok_or_else(|| GameError::File(format!("payoffs at depth {dim}: expected array")))?;
    if dim == strategies.len() {
        // innermost: one rational per player
        let mut entry = Vec::with_capacity(strategies.len());
        if arr.len() != strategies.len() {
            return Err(GameError::File(format!(
                "payoff entry at {path:?} has length {}, expected {}",
                arr.len(),
                strategies.len()
            )));
        }
        for v in arr {
            let s = v
                .as_str()
                .ok_or_else(|| GameError::File(format!("payoff at {path:?}: expected string")))?;
            entry.push(parse_rat(s).map_err(GameError::File)?);
        }
        out.push(entry);
        return Ok(());
    }
    if arr.len() != strategies[dim].len() {
        return Err(GameError::File(format!(
            "payoff array at depth {dim} has length {}, expected {}",
            arr.len(),
            strategies[dim].len()
        )));
    }
    for (idx, v) in arr.iter().enumerate() {
        path.push(idx);
        walk_payoffs(v, strategies, dim + 1, path, out)?;
        path.pop();
    }
    Ok(())
}

/// Per-player subsets of strategy indices. Used both as the running state of
/// iterated elimination and as the domain a dominance check conditions on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyRestriction {
    sets: Vec<BTreeSet<usize>>,
}

impl StrategyRestriction {
    pub fn full(game: &NormalFormGame) -> Self {
        Self {
            sets: (0..game.num_players())
                .map(|i| (0..game.num_strategies(i)).collect())
                .collect(),
        }
    }

    pub fn new(sets: Vec<BTreeSet<usize>>) -> Self {
        Self { sets }
    }

    pub fn from_ids(game: &NormalFormGame, ids: &[Vec<String>]) -> Result<Self, GameError> {
        if ids.len() != game.num_players() {
            return Err(GameError::ProfileLength {
                got: ids.len(),
                want: game.num_players(),
            });
        }
        let mut sets = Vec::with_capacity(ids.len());
        for (i, group) in ids.iter().enumerate() {
            let mut set = BTreeSet::new();
            for id in group {
                set.insert(game.strategy_index(i, id)?);
            }
            sets.push(set);
        }
        Ok(Self { sets })
    }

    pub fn set(&self, i: usize) -> &BTreeSet<usize> {
        &self.sets[i]
    }

    pub fn contains(&self, i: usize, idx: usize) -> bool {
        self.sets[i].contains(&idx)
    }

    pub fn remove(&mut self, i: usize, idx: usize) -> bool {
        self.sets[i].remove(&idx)
    }

    pub fn num_players(&self) -> usize {
        self.sets.len()
    }

    /// Opponent profiles of player `i` drawn from the restricted sets,
    /// lexicographic by (player, strategy index).
    pub fn opponent_profiles(&self, i: usize) -> Result<Vec<Vec<usize>>, GameError> {
        let mut ranges = Vec::new();
        for (j, set) in self.sets.iter().enumerate() {
            if j == i {
                continue;
            }
            if set.is_empty() {
                return Err(GameError::EmptyRestriction(j));
            }
            ranges.push(set.iter().copied().collect::<Vec<_>>());
        }
        Ok(ranges.into_iter().multi_cartesian_product().collect())
    }

    /// Full profiles drawn from the restricted sets, lexicographic.
    pub fn profiles(&self) -> Result<Vec<Vec<usize>>, GameError> {
        for (j, set) in self.sets.iter().enumerate() {
            if set.is_empty() {
                return Err(GameError::EmptyRestriction(j));
            }
        }
        Ok(self
            .sets
            .iter()
            .map(|s| s.iter().copied().collect::<Vec<_>>())
            .multi_cartesian_product()
            .collect())
    }

    pub fn to_ids(&self, game: &NormalFormGame) -> Vec<Vec<String>> {
        self.sets
            .iter()
            .enumerate()
            .map(|(i, set)| {
                set.iter()
                    .map(|&idx| game.strategy_id(i, idx).to_string())
                    .collect()
            })
            .collect()
    }
}

/// A belief of player `i`: an exact probability distribution over opponent
/// profiles. Only strictly positive weights are stored, so the key set is
/// the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Belief {
    player: usize,
    weights: BTreeMap<Vec<usize>, Rat>,
}

impl Belief {
    pub fn new(
        game: &NormalFormGame,
        player: usize,
        weights: BTreeMap<Vec<usize>, Rat>,
    ) -> Result<Self, GameError> {
        if player >= game.num_players() {
            return Err(GameError::PlayerIndex(player));
        }
        let opponents = game.opponents(player);
        let mut kept = BTreeMap::new();
        let mut total = Rat::zero();
        for (profile, w) in weights {
            if profile.len() != opponents.len() {
                return Err(GameError::ProfileLength {
                    got: profile.len(),
                    want: opponents.len(),
                });
            }
            for (&j, &idx) in opponents.iter().zip(&profile) {
                if idx >= game.num_strategies(j) {
                    return Err(GameError::Distribution(format!(
                        "strategy index {idx} out of range for player {}",
                        game.player_name(j)
                    )));
                }
            }
            if w.is_negative() {
                return Err(GameError::Distribution(format!(
                    "negative weight {}",
                    format_rat(&w)
                )));
            }
            if w.is_zero() {
                continue;
            }
            total += &w;
            kept.insert(profile, w);
        }
        if !total.is_one() {
            return Err(GameError::Distribution(format!(
                "weights sum to {}, expected 1",
                format_rat(&total)
            )));
        }
        Ok(Self {
            player,
            weights: kept,
        })
    }

    pub fn uniform(
        game: &NormalFormGame,
        player: usize,
        profiles: &[Vec<usize>],
    ) -> Result<Self, GameError> {
        if profiles.is_empty() {
            return Err(GameError::Distribution(
                "uniform belief over empty set".into(),
            ));
        }
        let w = Rat::new(1.into(), (profiles.len() as i64).into());
        let weights = profiles.iter().map(|p| (p.clone(), w.clone())).collect();
        Self::new(game, player, weights)
    }

    pub fn point(game: &NormalFormGame, player: usize, profile: Vec<usize>) -> Result<Self, GameError> {
        Self::new(game, player, BTreeMap::from([(profile, Rat::one())]))
    }

    pub fn player(&self) -> usize {
        self.player
    }

    pub fn weights(&self) -> &BTreeMap<Vec<usize>, Rat> {
        &self.weights
    }

    pub fn weight(&self, profile: &[usize]) -> Rat {
        self.weights.get(profile).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.weights.keys()
    }

    /// True when the support is exactly the opponent profiles of the given
    /// restriction.
    pub fn has_full_support_on(
        &self,
        restriction: &StrategyRestriction,
    ) -> Result<bool, GameError> {
        let profiles = restriction.opponent_profiles(self.player)?;
        Ok(profiles.len() == self.weights.len()
            && profiles.iter().all(|p| self.weights.contains_key(p)))
    }

    /// True when the support only uses opponent strategies from the
    /// restriction.
    pub fn supported_within(&self, game: &NormalFormGame, restriction: &StrategyRestriction) -> bool {
        let opponents = game.opponents(self.player);
        self.weights.keys().all(|profile| {
            opponents
                .iter()
                .zip(profile)
                .all(|(&j, &idx)| restriction.contains(j, idx))
        })
    }

    pub fn to_id_map(&self, game: &NormalFormGame) -> BTreeMap<String, String> {
        self.weights
            .iter()
            .map(|(profile, w)| {
                (
                    game.render_opponent_profile(self.player, profile),
                    format_rat(w),
                )
            })
            .collect()
    }
}

/// A mixed strategy for one player; positive weights only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedStrategy {
    player: usize,
    weights: BTreeMap<usize, Rat>,
}

impl MixedStrategy {
    pub fn new(
        game: &NormalFormGame,
        player: usize,
        weights: BTreeMap<usize, Rat>,
    ) -> Result<Self, GameError> {
        if player >= game.num_players() {
            return Err(GameError::PlayerIndex(player));
        }
        let mut kept = BTreeMap::new();
        let mut total = Rat::zero();
        for (idx, w) in weights {
            if idx >= game.num_strategies(player) {
                return Err(GameError::Distribution(format!(
                    "strategy index {idx} out of range for player {}",
                    game.player_name(player)
                )));
            }
            if w.is_negative() {
                return Err(GameError::Distribution(format!(
                    "negative weight {}",
                    format_rat(&w)
                )));
            }
            if w.is_zero() {
                continue;
            }
            total += &w;
            kept.insert(idx, w);
        }
        if !total.is_one() {
            return Err(GameError::Distribution(format!(
                "weights sum to {}, expected 1",
                format_rat(&total)
            )));
        }
        Ok(Self {
            player,
            weights: kept,
        })
    }

    pub fn pure(game: &NormalFormGame, player: usize, idx: usize) -> Result<Self, GameError> {
        Self::new(game, player, BTreeMap::from([(idx, Rat::one())]))
    }

    pub fn player(&self) -> usize {
        self.player
    }

    pub fn weights(&self) -> &BTreeMap<usize, Rat> {
        &self.weights
    }

    /// Expected payoff of the mixture against a fixed opponent profile.
    pub fn payoff_against(&self, game: &NormalFormGame, opp: &[usize]) -> Rat {
        let mut total = Rat::zero();
        for (&idx, w) in &self.weights {
            total += w * game.payoff_against(self.player, idx, opp);
        }
        total
    }

    pub fn to_id_map(&self, game: &NormalFormGame) -> BTreeMap<String, String> {
        self.weights
            .iter()
            .map(|(&idx, w)| {
                (
                    game.strategy_id(self.player, idx).to_string(),
                    format_rat(w),
                )
            })
            .collect()
    }
}

/// Expected utility of a pure strategy (by index) under a belief.
pub fn expected_utility_idx(
    game: &NormalFormGame,
    player: usize,
    strategy: usize,
    belief: &Belief,
) -> Result<Rat, GameError> {
    if belief.player() != player {
        return Err(GameError::BeliefPlayer {
            got: belief.player(),
            want: player,
        });
    }
    let mut total = Rat::zero();
    for (opp, w) in belief.weights() {
        total += w * game.payoff_against(player, strategy, opp);
    }
    Ok(total)
}

/// Expected utility of a pure strategy (by id) under a belief.
pub fn expected_utility(
    game: &NormalFormGame,
    player: usize,
    strategy: &str,
    belief: &Belief,
) -> Result<Rat, GameError> {
    let idx = game.strategy_index(player, strategy)?;
    expected_utility_idx(game, player, idx, belief)
}

/// All best responses (strategy indices, ascending) to a belief, among the
/// player's full strategy set.
pub fn best_responses(
    game: &NormalFormGame,
    player: usize,
    belief: &Belief,
) -> Result<Vec<usize>, GameError> {
    let mut best: Option<Rat> = None;
    let mut arg = Vec::new();
    for idx in 0..game.num_strategies(player) {
        let eu = expected_utility_idx(game, player, idx, belief)?;
        match &best {
            Some(b) if eu < *b => {}
            Some(b) if eu == *b => arg.push(idx),
            _ => {
                best = Some(eu);
                arg = vec![idx];
            }
        }
    }
    Ok(arg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, rat};

    fn prisoners_dilemma() -> NormalFormGame {
        NormalFormGame::two_player(
            ["P1", "P2"],
            &["C", "D"],
            &["C", "D"],
            &[&[3, 0], &[4, 1]],
            &[&[3, 4], &[0, 1]],
        )
    }

    #[test]
    fn payoff_lookup() {
        let g = prisoners_dilemma();
        assert_eq!(*g.payoff(0, &[0, 1]), int(0));
        assert_eq!(*g.payoff(1, &[0, 1]), int(4));
        assert_eq!(*g.payoff_against(1, 0, &[1]), int(0));
    }

    #[test]
    fn expected_utility_pd_half_half() {
        let g = prisoners_dilemma();
        let b = Belief::uniform(&g, 0, &[vec![0], vec![1]]).unwrap();
        assert_eq!(expected_utility(&g, 0, "C", &b).unwrap(), rat(3, 2));
        assert_eq!(expected_utility(&g, 0, "D", &b).unwrap(), rat(5, 2));
        assert_eq!(best_responses(&g, 0, &b).unwrap(), vec![1]);
    }

    #[test]
    fn matching_pennies_uniform_is_indifferent() {
        let g = NormalFormGame::two_player(
            ["P1", "P2"],
            &["H", "T"],
            &["H", "T"],
            &[&[1, -1], &[-1, 1]],
            &[&[-1, 1], &[1, -1]],
        );
        for i in 0..2 {
            let b = Belief::uniform(&g, i, &[vec![0], vec![1]]).unwrap();
            for s in ["H", "T"] {
                assert_eq!(expected_utility(&g, i, s, &b).unwrap(), int(0));
            }
            assert_eq!(best_responses(&g, i, &b).unwrap(), vec![0, 1]);
        }
    }

    #[test]
    fn point_belief_best_response() {
        // column player facing T for sure prefers L
        let g = NormalFormGame::two_player(
            ["P1", "P2"],
            &["T", "B"],
            &["L", "R"],
            &[&[1, 1], &[1, 0]],
            &[&[1, 0], &[0, 1]],
        );
        let b = Belief::point(&g, 1, vec![0]).unwrap();
        assert_eq!(expected_utility(&g, 1, "L", &b).unwrap(), int(1));
        assert_eq!(expected_utility(&g, 1, "R", &b).unwrap(), int(0));
        assert_eq!(best_responses(&g, 1, &b).unwrap(), vec![0]);
    }

    #[test]
    fn belief_validation() {
        let g = prisoners_dilemma();
        let bad = Belief::new(
            &g,
            0,
            BTreeMap::from([(vec![0], rat(1, 2)), (vec![1], rat(1, 3))]),
        );
        assert!(matches!(bad, Err(GameError::Distribution(_))));
        let bad = Belief::new(&g, 0, BTreeMap::from([(vec![7], int(1))]));
        assert!(bad.is_err());
        // zero weights are dropped from the support
        let b = Belief::new(
            &g,
            0,
            BTreeMap::from([(vec![0], int(1)), (vec![1], int(0))]),
        )
        .unwrap();
        assert_eq!(b.support().count(), 1);
    }

    #[test]
    fn unknown_strategy_id() {
        let g = prisoners_dilemma();
        let b = Belief::point(&g, 0, vec![0]).unwrap();
        assert!(matches!(
            expected_utility(&g, 0, "X", &b),
            Err(GameError::UnknownStrategy { .. })
        ));
    }

    #[test]
    fn belief_player_mismatch() {
        let g = prisoners_dilemma();
        let b = Belief::point(&g, 1, vec![0]).unwrap();
        assert!(matches!(
            expected_utility(&g, 0, "C", &b),
            Err(GameError::BeliefPlayer { .. })
        ));
    }

    #[test]
    fn three_player_profiles() {
        let third = "1/3";
        let players = vec!["A".to_string(), "B".to_string(), "C".to_string()];
        let strategies = vec![
            vec!["x".to_string(), "y".to_string()],
            vec!["l".to_string(), "r".to_string()],
            vec!["u".to_string()],
        ];
        let payoffs = (0..4)
            .map(|_| vec![parse_rat(third).unwrap(); 3])
            .collect();
        let g = NormalFormGame::new(players, strategies, payoffs).unwrap();
        assert_eq!(g.profiles().len(), 4);
        assert_eq!(g.render_profile(&[1, 0, 0]), "(y,l,u)");
        assert_eq!(g.render_opponent_profile(1, &[1, 0]), "(y,u)");
        let r = StrategyRestriction::full(&g);
        assert_eq!(r.opponent_profiles(1).unwrap().len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let g = prisoners_dilemma();
        let text = g.to_json_string();
        let back = NormalFormGame::from_json_str(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn json_shape_errors() {
        let bad = r#"{"players":["a","b"],"strategies":[["x"],["y"]],"payoffs":[["1","2"]]}"#;
        assert!(NormalFormGame::from_json_str(bad).is_err());
        let bad = r#"{"players":["a","b"],"strategies":[["x"],["y","z"]],"payoffs":[[["1","2"],["1"]]]}"#;
        assert!(NormalFormGame::from_json_str(bad).is_err());
    }

    #[test]
    fn restriction_round_trip() {
        let g = prisoners_dilemma();
        let mut r = StrategyRestriction::full(&g);
        assert!(r.remove(0, 0));
        let ids = r.to_ids(&g);
        assert_eq!(ids, vec![vec!["D".to_string()], vec!["C".to_string(), "D".to_string()]]);
        let back = StrategyRestriction::from_ids(&g, &ids).unwrap();
        assert_eq!(r, back);
        r.remove(1, 0);
        r.remove(1, 1);
        assert!(matches!(
            r.opponent_profiles(0),
            Err(GameError::EmptyRestriction(1))
        ));
    }
}

//! The epistemic language and its standard formula families. Implication is
//! surface syntax only; `a -> b` desugars to `!(a & !b)` at construction
//! time, so the AST stays small for the model checker's memoization.

pub mod check;
pub mod parse;

pub use check::{check, diamond_query, DiamondOracle, ModelChecker, TheoremOracle};
pub use parse::{parse, render};

use crate::elimination::{survives, Depth};
use crate::game::{GameError, NormalFormGame};
use crate::ratio::{is_probability, Rat};
use crate::structures::StructureError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogicError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("player index {0} out of range")]
    Player(usize),
    #[error("player {player}: unknown strategy id `{id}` in formula")]
    UnknownStrategy { player: usize, id: String },
    #[error("probability bound {0} outside [0,1]")]
    Probability(String),
    #[error("possibility query outside the supported fragment: {0}")]
    UnsupportedDiamond(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Player indices are 0-based here; the concrete syntax (`RAT_1`, `B_2 ...`)
/// is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    /// RAT_i: the player's strategy is a best response to the belief induced
    /// at the state.
    Rat(usize),
    Play(usize, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// B_i: belief with probability exactly 1.
    Believes(usize, Box<Formula>),
    /// <B_i>: positive probability.
    Possible(usize, Box<Formula>),
    /// <>: satisfiable at some state of some appropriate structure for the
    /// same game; answered by an oracle, not by the current structure.
    Diamond(Box<Formula>),
    ProbAtLeast(usize, Box<Formula>, Rat),
    ProbGreater(usize, Box<Formula>, Rat),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    /// Left-associated conjunction; empty input is `true`.
    pub fn and_all<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut it = parts.into_iter();
        let Some(first) = it.next() else {
            return Formula::True;
        };
        it.fold(first, Formula::and)
    }

    pub fn believes(player: usize, f: Formula) -> Formula {
        Formula::Believes(player, Box::new(f))
    }

    pub fn possible(player: usize, f: Formula) -> Formula {
        Formula::Possible(player, Box::new(f))
    }

    pub fn diamond(f: Formula) -> Formula {
        Formula::Diamond(Box::new(f))
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::Rat(_) | Formula::Play(..) => 1,
            Formula::Not(f) | Formula::Diamond(f) => 1 + f.size(),
            Formula::Believes(_, f) | Formula::Possible(_, f) => 1 + f.size(),
            Formula::ProbAtLeast(_, f, _) | Formula::ProbGreater(_, f, _) => 1 + f.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Checks player indices, strategy ids and probability bounds against
    /// the game, recursing under every connective.
    pub fn validate(&self, game: &NormalFormGame) -> Result<(), LogicError> {
        let n = game.num_players();
        match self {
            Formula::True => Ok(()),
            Formula::Rat(i) => {
                if *i >= n {
                    return Err(LogicError::Player(*i + 1));
                }
                Ok(())
            }
            Formula::Play(i, id) => {
                if *i >= n {
                    return Err(LogicError::Player(*i + 1));
                }
                game.strategy_index(*i, id)
                    .map(|_| ())
                    .map_err(|_| LogicError::UnknownStrategy {
                        player: *i + 1,
                        id: id.clone(),
                    })
            }
            Formula::Not(f) | Formula::Diamond(f) => f.validate(game),
            Formula::And(a, b) => {
                a.validate(game)?;
                b.validate(game)
            }
            Formula::Believes(i, f) | Formula::Possible(i, f) => {
                if *i >= n {
                    return Err(LogicError::Player(*i + 1));
                }
                f.validate(game)
            }
            Formula::ProbAtLeast(i, f, a) | Formula::ProbGreater(i, f, a) => {
                if *i >= n {
                    return Err(LogicError::Player(*i + 1));
                }
                if !is_probability(a) {
                    return Err(LogicError::Probability(crate::ratio::format_rat(a)));
                }
                f.validate(game)
            }
        }
    }
}

/// RAT_1 & ... & RAT_n.
pub fn rat_all(game: &NormalFormGame) -> Formula {
    Formula::and_all((0..game.num_players()).map(Formula::Rat))
}

/// "Everyone believes", iterated: E^0 f = f, E^{k+1} f = ∧_i B_i (E^k f).
pub fn mk_e(game: &NormalFormGame, k: usize, f: Formula) -> Formula {
    let mut cur = f;
    for _ in 0..k {
        cur = Formula::and_all(
            (0..game.num_players()).map(|i| Formula::believes(i, cur.clone())),
        );
    }
    cur
}

/// C^0 = true, C^{k+1}_j = RAT_j & B_j(∧_{j'≠j} C^k_{j'}).
pub fn mk_c(game: &NormalFormGame, k: usize, player: usize) -> Formula {
    if k == 0 {
        return Formula::True;
    }
    let inner = Formula::and_all(
        game.opponents(player)
            .into_iter()
            .map(|j| mk_c(game, k - 1, j)),
    );
    Formula::and(
        Formula::Rat(player),
        Formula::believes(player, inner),
    )
}

/// The conjunction of plays at an opponent profile (players in index order).
pub fn play_profile(game: &NormalFormGame, player: usize, opp: &[usize]) -> Formula {
    Formula::and_all(
        game.opponents(player)
            .iter()
            .zip(opp)
            .map(|(&j, &idx)| Formula::Play(j, game.strategy_id(j, idx).to_string())),
    )
}

/// "All I know is f": B_i f plus, for every opponent profile consistent with
/// f (as judged by the possibility operator), considering that profile
/// possible. The play formula sits first inside the diamond; the theorem
/// oracle matches exactly this shape.
pub fn mk_ominus(game: &NormalFormGame, player: usize, f: Formula) -> Formula {
    let full = crate::game::StrategyRestriction::full(game);
    let profiles = full
        .opponent_profiles(player)
        .expect("full restriction is nonempty");
    let mut parts = vec![Formula::believes(player, f.clone())];
    for opp in &profiles {
        let plays = play_profile(game, player, opp);
        parts.push(Formula::implies(
            Formula::diamond(Formula::and(plays.clone(), f.clone())),
            Formula::possible(player, plays),
        ));
    }
    Formula::and_all(parts)
}

/// D^0 = true, D^{k+1}_j = RAT_j & O⁻_j(∧_{j'≠j} D^k_{j'}).
pub fn mk_d(game: &NormalFormGame, k: usize, player: usize) -> Formula {
    if k == 0 {
        return Formula::True;
    }
    let inner = Formula::and_all(
        game.opponents(player)
            .into_iter()
            .map(|j| mk_d(game, k - 1, j)),
    );
    Formula::and(Formula::Rat(player), mk_ominus(game, player, inner))
}

/// Does the strategy survive `k` rounds of weak elimination with mixed
/// dominators?
pub fn strongly_admissible_level(
    game: &NormalFormGame,
    player: usize,
    strategy: &str,
    k: usize,
) -> Result<bool, GameError> {
    survives(
        game,
        player,
        strategy,
        Depth::Rounds(k),
        crate::dominance::DominanceMode::Weak,
        crate::dominance::DominatorClass::Mixed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> NormalFormGame {
        NormalFormGame::two_player(
            ["P1", "P2"],
            &["T", "B"],
            &["L", "R"],
            &[&[1, 1], &[1, 0]],
            &[&[1, 0], &[0, 1]],
        )
    }

    #[test]
    fn c2_unrolls_to_mutual_rationality() {
        let g = g2();
        let expected = Formula::and(
            Formula::Rat(0),
            Formula::believes(
                0,
                Formula::and(Formula::Rat(1), Formula::believes(1, Formula::True)),
            ),
        );
        assert_eq!(mk_c(&g, 2, 0), expected);
    }

    #[test]
    fn e_family_shapes() {
        let g = g2();
        let f = rat_all(&g);
        assert_eq!(mk_e(&g, 0, f.clone()), f);
        let e1 = mk_e(&g, 1, f.clone());
        assert_eq!(
            e1,
            Formula::and(
                Formula::believes(0, f.clone()),
                Formula::believes(1, f.clone())
            )
        );
        assert_eq!(mk_e(&g, 2, f.clone()), mk_e(&g, 1, e1));
    }

    #[test]
    fn d_family_grows() {
        let g = g2();
        assert_eq!(mk_d(&g, 0, 0), Formula::True);
        let sizes: Vec<usize> = (0..4).map(|k| mk_d(&g, k, 0).size()).collect();
        for pair in sizes.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn d1_mentions_every_opponent_profile() {
        let g = g2();
        let d1 = mk_d(&g, 1, 1);
        // RAT_2 & (B_2 true & (<>(play_1(T) & true) -> <B_2> play_1(T)) & ...)
        let Formula::And(rat, rest) = d1 else {
            panic!("D^1 should be a conjunction")
        };
        assert_eq!(*rat, Formula::Rat(1));
        assert!(rest.size() > 1);
    }

    #[test]
    fn validation_catches_bad_references() {
        let g = g2();
        assert!(Formula::Rat(2).validate(&g).is_err());
        assert!(Formula::Play(0, "X".into()).validate(&g).is_err());
        assert!(Formula::Play(0, "T".into()).validate(&g).is_ok());
        let bad = Formula::ProbAtLeast(0, Box::new(Formula::True), crate::ratio::rat(3, 2));
        assert!(matches!(bad.validate(&g), Err(LogicError::Probability(_))));
        let nested = Formula::diamond(Formula::Rat(5));
        assert!(nested.validate(&g).is_err());
    }

    #[test]
    fn implication_desugars() {
        let f = Formula::implies(Formula::Rat(0), Formula::True);
        assert_eq!(
            f,
            Formula::not(Formula::and(Formula::Rat(0), Formula::not(Formula::True)))
        );
    }

    #[test]
    fn admissibility_levels() {
        let g = g2();
        for k in 0..5 {
            assert!(strongly_admissible_level(&g, 0, "T", k).unwrap());
        }
        assert!(strongly_admissible_level(&g, 1, "R", 1).unwrap());
        assert!(!strongly_admissible_level(&g, 1, "R", 2).unwrap());
        assert!(!strongly_admissible_level(&g, 0, "B", 1).unwrap());
    }
}

//! Model checking over probability structures.
//!
//! Everything except the possibility operator is evaluated directly on the
//! structure. `<>` asks whether some state of some appropriate structure
//! for the same game satisfies the operand, so it cannot be answered
//! locally; a [`DiamondOracle`] decides those queries.

use super::{mk_d, Formula, LogicError};
use crate::elimination::{eliminate, Depth, EliminationTrace};
use crate::game::{best_responses, GameError, NormalFormGame};
use crate::structures::ProbabilityStructure;
use std::collections::HashMap;

/// Answers `<> f` queries.
pub enum DiamondOracle {
    /// Refuse every query. Fine for formulas without `<>`.
    Reject,
    /// Decide queries of the canonical shape `play_-j(profile) & D-body`
    /// from the weak elimination chain of the game.
    Theorem(TheoremOracle),
    /// Search the given structures for a satisfying state. Sound for
    /// "true" answers; "false" only means no listed witness works.
    WitnessFamily(Vec<ProbabilityStructure>),
}

impl DiamondOracle {
    pub fn theorem(game: &NormalFormGame) -> Result<Self, GameError> {
        Ok(DiamondOracle::Theorem(TheoremOracle::new(game)?))
    }

    pub fn family(structures: Vec<ProbabilityStructure>) -> Self {
        DiamondOracle::WitnessFamily(structures)
    }

    pub fn query(&self, game: &NormalFormGame, f: &Formula) -> Result<bool, LogicError> {
        match self {
            DiamondOracle::Reject => Err(LogicError::UnsupportedDiamond(
                "no possibility oracle configured".into(),
            )),
            DiamondOracle::Theorem(t) => {
                if t.game() != game {
                    return Err(LogicError::UnsupportedDiamond(
                        "oracle built for a different game".into(),
                    ));
                }
                t.query(f)
            }
            DiamondOracle::WitnessFamily(family) => {
                for m in family {
                    if m.game() != game {
                        return Err(LogicError::UnsupportedDiamond(
                            "witness family built for a different game".into(),
                        ));
                    }
                    let mut mc = ModelChecker::new(m, self);
                    if mc.extension(f)?.iter().any(|&b| b) {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

/// Decides `<>(play_-j(profile) & body)` where `body` is the conjunction of
/// the level-k admissibility formulas of j's opponents: the query holds
/// exactly when every strategy in the profile survives k rounds of weak
/// elimination.
pub struct TheoremOracle {
    game: NormalFormGame,
    trace: EliminationTrace,
}

impl TheoremOracle {
    pub fn new(game: &NormalFormGame) -> Result<Self, GameError> {
        let trace = eliminate(
            game,
            crate::dominance::DominanceMode::Weak,
            crate::dominance::DominatorClass::Mixed,
            Depth::ToFixpoint,
        )?;
        Ok(TheoremOracle {
            game: game.clone(),
            trace,
        })
    }

    pub fn game(&self) -> &NormalFormGame {
        &self.game
    }

    pub fn query(&self, f: &Formula) -> Result<bool, LogicError> {
        let n = self.game.num_players();
        let mut spine = Vec::new();
        left_spine(f, &mut spine);
        if spine.len() != n {
            return Err(LogicError::UnsupportedDiamond(format!(
                "expected a conjunction of {} play atoms and one admissibility body",
                n - 1
            )));
        }
        let body = spine[n - 1];
        let mut played: Vec<(usize, usize)> = Vec::new();
        for part in &spine[..n - 1] {
            let Formula::Play(i, id) = part else {
                return Err(LogicError::UnsupportedDiamond(
                    "expected play atoms before the admissibility body".into(),
                ));
            };
            let idx = self.game.strategy_index(*i, id).map_err(|_| {
                LogicError::UnknownStrategy {
                    player: *i + 1,
                    id: id.clone(),
                }
            })?;
            played.push((*i, idx));
        }
        let mentioned: Vec<usize> = played.iter().map(|(i, _)| *i).collect();
        let missing: Vec<usize> = (0..n).filter(|i| !mentioned.contains(i)).collect();
        let [owner] = missing[..] else {
            return Err(LogicError::UnsupportedDiamond(
                "play atoms must cover every player but one, each once".into(),
            ));
        };
        if mentioned != self.game.opponents(owner) {
            return Err(LogicError::UnsupportedDiamond(
                "play atoms must appear in player order".into(),
            ));
        }

        let mut k = 0;
        loop {
            let cand = Formula::and_all(
                self.game
                    .opponents(owner)
                    .into_iter()
                    .map(|j| mk_d(&self.game, k, j)),
            );
            if &cand == body {
                break;
            }
            if cand.size() >= body.size() {
                return Err(LogicError::UnsupportedDiamond(
                    "body is not a conjunction of the opponents' admissibility formulas"
                        .into(),
                ));
            }
            k += 1;
        }

        let survivors = self
            .trace
            .restriction_at(k)
            .expect("fixpoint traces answer every depth");
        Ok(played.iter().all(|&(i, idx)| survivors.contains(i, idx)))
    }
}

fn left_spine<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    if let Formula::And(a, b) = f {
        left_spine(a, out);
        out.push(b);
    } else {
        out.push(f);
    }
}

/// Evaluates formulas on one structure, memoizing extensions per
/// subformula.
pub struct ModelChecker<'a> {
    m: &'a ProbabilityStructure,
    oracle: &'a DiamondOracle,
    memo: HashMap<Formula, Vec<bool>>,
}

impl<'a> ModelChecker<'a> {
    pub fn new(m: &'a ProbabilityStructure, oracle: &'a DiamondOracle) -> Self {
        ModelChecker {
            m,
            oracle,
            memo: HashMap::new(),
        }
    }

    pub fn structure(&self) -> &ProbabilityStructure {
        self.m
    }

    /// Truth value per state, indexed like `structure().states()`.
    pub fn extension(&mut self, f: &Formula) -> Result<Vec<bool>, LogicError> {
        f.validate(self.m.game())?;
        self.eval(f)
    }

    pub fn check(&mut self, state_id: &str, f: &Formula) -> Result<bool, LogicError> {
        let idx = self.m.state_index(state_id)?;
        Ok(self.extension(f)?[idx])
    }

    pub fn holds_everywhere(&mut self, f: &Formula) -> Result<bool, LogicError> {
        Ok(self.extension(f)?.iter().all(|&b| b))
    }

    fn eval(&mut self, f: &Formula) -> Result<Vec<bool>, LogicError> {
        if let Some(hit) = self.memo.get(f) {
            return Ok(hit.clone());
        }
        let n = self.m.num_states();
        let out = match f {
            Formula::True => vec![true; n],
            Formula::Rat(i) => {
                let mut v = Vec::with_capacity(n);
                for w in 0..n {
                    let marginal = self.m.marginal_on_opponents(w, *i)?;
                    let best = best_responses(self.m.game(), *i, &marginal)?;
                    v.push(best.contains(&self.m.state(w).profile[*i]));
                }
                v
            }
            Formula::Play(i, id) => {
                let idx = self.m.game().strategy_index(*i, id)?;
                (0..n)
                    .map(|w| self.m.state(w).profile[*i] == idx)
                    .collect()
            }
            Formula::Not(g) => {
                let ext = self.eval(g)?;
                ext.into_iter().map(|b| !b).collect()
            }
            Formula::And(a, b) => {
                let ea = self.eval(a)?;
                let eb = self.eval(b)?;
                ea.into_iter().zip(eb).map(|(x, y)| x && y).collect()
            }
            Formula::Believes(i, g) => {
                let ext = self.eval(g)?;
                (0..n)
                    .map(|w| self.m.belief(w, *i).keys().all(|&t| ext[t]))
                    .collect()
            }
            Formula::Possible(i, g) => {
                let ext = self.eval(g)?;
                (0..n)
                    .map(|w| self.m.belief(w, *i).keys().any(|&t| ext[t]))
                    .collect()
            }
            Formula::ProbAtLeast(i, g, bound) => {
                let ext = self.eval(g)?;
                (0..n)
                    .map(|w| {
                        let mass: crate::ratio::Rat = self
                            .m
                            .belief(w, *i)
                            .iter()
                            .filter(|(t, _)| ext[**t])
                            .map(|(_, mass)| mass.clone())
                            .sum();
                        mass >= *bound
                    })
                    .collect()
            }
            Formula::ProbGreater(i, g, bound) => {
                let ext = self.eval(g)?;
                (0..n)
                    .map(|w| {
                        let mass: crate::ratio::Rat = self
                            .m
                            .belief(w, *i)
                            .iter()
                            .filter(|(t, _)| ext[**t])
                            .map(|(_, mass)| mass.clone())
                            .sum();
                        mass > *bound
                    })
                    .collect()
            }
            Formula::Diamond(g) => {
                let answer = self.oracle.query(self.m.game(), g)?;
                vec![answer; n]
            }
        };
        self.memo.insert(f.clone(), out.clone());
        Ok(out)
    }
}

/// One-shot convenience wrapper around [`ModelChecker`].
pub fn check(
    m: &ProbabilityStructure,
    oracle: &DiamondOracle,
    state_id: &str,
    f: &Formula,
) -> Result<bool, LogicError> {
    ModelChecker::new(m, oracle).check(state_id, f)
}

/// Asks the oracle directly whether `<> f` holds.
pub fn diamond_query(
    oracle: &DiamondOracle,
    game: &NormalFormGame,
    f: &Formula,
) -> Result<bool, LogicError> {
    oracle.query(game, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elimination::rationalizable_sets;
    use crate::logic::{mk_c, mk_d, mk_e, rat_all};
    use crate::structures::build_mbar;

    fn g2() -> NormalFormGame {
        NormalFormGame::two_player(
            ["P1", "P2"],
            &["T", "B"],
            &["L", "R"],
            &[&[1, 1], &[1, 0]],
            &[&[1, 0], &[0, 1]],
        )
    }

    fn pd() -> NormalFormGame {
        NormalFormGame::two_player(
            ["P1", "P2"],
            &["C", "D"],
            &["C", "D"],
            &[&[3, 0], &[4, 1]],
            &[&[3, 4], &[0, 1]],
        )
    }

    #[test]
    fn everyone_rational_iterates_on_point_belief_structure() {
        let g = pd();
        let sets = rationalizable_sets(&g).unwrap();
        let m = crate::structures::build_rationalizability_structure(
            &g,
            &sets.restriction,
            &sets
                .beliefs
                .iter()
                .map(|(k, cert)| (*k, cert.belief.clone()))
                .collect(),
        )
        .unwrap();
        let oracle = DiamondOracle::Reject;
        let mut mc = ModelChecker::new(&m, &oracle);
        let f = mk_e(&g, 5, rat_all(&g));
        assert!(mc.check("(D,D)", &f).unwrap());
        assert!(mc.holds_everywhere(&f).unwrap());
    }

    #[test]
    fn admissibility_formula_holds_on_the_grid() {
        let g = g2();
        let grid = build_mbar(&g, 2).unwrap();
        let oracle = DiamondOracle::theorem(&g).unwrap();
        let mut mc = ModelChecker::new(&grid.structure, &oracle);
        // Player 2's level-2 admissibility at the top of the grid.
        assert!(mc.check("(2,1,(T,L))", &mk_d(&g, 2, 1)).unwrap());
        assert!(mc.check("(1,1,(T,L))", &mk_d(&g, 1, 1)).unwrap());
        // At ground level the tagged opponent plays a non-best-response.
        assert!(!mc.check("(0,1,(B,R))", &mk_d(&g, 2, 1)).unwrap());
    }

    #[test]
    fn grid_states_satisfy_untagged_admissibility() {
        let g = g2();
        let grid = build_mbar(&g, 2).unwrap();
        let oracle = DiamondOracle::theorem(&g).unwrap();
        let mut mc = ModelChecker::new(&grid.structure, &oracle);
        for level in 0..=grid.levels {
            let survivors = grid.trace.restriction_at(level).unwrap().clone();
            for tag in 0..g.num_players() {
                for profile in survivors.profiles().unwrap() {
                    let idx = grid.state_of(level, tag, &profile).unwrap();
                    let id = grid.structure.state(idx).id.clone();
                    for j in 0..g.num_players() {
                        if j == tag {
                            continue;
                        }
                        assert!(
                            mc.check(&id, &mk_d(&g, level, j)).unwrap(),
                            "admissibility failed at {id} for player {}",
                            j + 1
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn theorem_oracle_matches_survival() {
        let g = g2();
        let oracle = DiamondOracle::theorem(&g).unwrap();
        // T survives one round.
        let q = Formula::and(Formula::Play(0, "T".into()), mk_d(&g, 1, 0));
        assert!(diamond_query(&oracle, &g, &q).unwrap());
        // R is eliminated in round 2.
        let q = Formula::and(Formula::Play(1, "R".into()), mk_d(&g, 2, 1));
        assert!(!diamond_query(&oracle, &g, &q).unwrap());
        let q = Formula::and(Formula::Play(1, "R".into()), mk_d(&g, 1, 1));
        assert!(diamond_query(&oracle, &g, &q).unwrap());
        // Level zero imposes nothing beyond the play atom.
        let q = Formula::and(Formula::Play(1, "R".into()), Formula::True);
        assert!(diamond_query(&oracle, &g, &q).unwrap());
    }

    #[test]
    fn oracle_rejects_unsupported_shapes() {
        let g = g2();
        let oracle = DiamondOracle::theorem(&g).unwrap();
        for bad in [
            Formula::True,
            Formula::Rat(0),
            Formula::and(Formula::Rat(0), Formula::True),
            Formula::and(
                Formula::and(Formula::Play(0, "T".into()), Formula::Play(1, "L".into())),
                Formula::True,
            ),
        ] {
            assert!(matches!(
                diamond_query(&oracle, &g, &bad),
                Err(LogicError::UnsupportedDiamond(_))
            ));
        }
        let reject = DiamondOracle::Reject;
        assert!(matches!(
            diamond_query(&reject, &g, &Formula::True),
            Err(LogicError::UnsupportedDiamond(_))
        ));
    }

    #[test]
    fn witness_family_search() {
        let g = g2();
        let sets = rationalizable_sets(&g).unwrap();
        let m = crate::structures::build_rationalizability_structure(
            &g,
            &sets.restriction,
            &sets
                .beliefs
                .iter()
                .map(|(k, cert)| (*k, cert.belief.clone()))
                .collect(),
        )
        .unwrap();
        let oracle = DiamondOracle::family(vec![m]);
        let hit = Formula::and(Formula::Play(1, "L".into()), Formula::Rat(0));
        assert!(diamond_query(&oracle, &g, &hit).unwrap());
        // Every state of the witness justifies both players.
        let miss = Formula::and(
            Formula::Play(0, "T".into()),
            Formula::not(Formula::Rat(0)),
        );
        assert!(!diamond_query(&oracle, &g, &miss).unwrap());
    }

    #[test]
    fn possibility_is_dual_to_belief() {
        let g = g2();
        let grid = build_mbar(&g, 2).unwrap();
        let oracle = DiamondOracle::Reject;
        let mut mc = ModelChecker::new(&grid.structure, &oracle);
        for f in [Formula::Rat(0), Formula::Play(1, "L".into())] {
            for i in 0..2 {
                let pos = mc.extension(&Formula::possible(i, f.clone())).unwrap();
                let dual = mc
                    .extension(&Formula::not(Formula::believes(
                        i,
                        Formula::not(f.clone()),
                    )))
                    .unwrap();
                assert_eq!(pos, dual);
            }
        }
    }

    #[test]
    fn admissibility_implies_common_belief_form() {
        let g = g2();
        let grid = build_mbar(&g, 2).unwrap();
        let oracle = DiamondOracle::theorem(&g).unwrap();
        let mut mc = ModelChecker::new(&grid.structure, &oracle);
        for k in 0..=3 {
            for j in 0..2 {
                let d = mc.extension(&mk_d(&g, k, j)).unwrap();
                let c = mc.extension(&mk_c(&g, k, j)).unwrap();
                for (dw, cw) in d.iter().zip(&c) {
                    assert!(!dw || *cw, "level {k} player {} at some state", j + 1);
                }
            }
        }
    }

    #[test]
    fn probability_atoms_measure_exact_mass() {
        let g = g2();
        let grid = build_mbar(&g, 1).unwrap();
        let oracle = DiamondOracle::Reject;
        let mut mc = ModelChecker::new(&grid.structure, &oracle);
        // At (1,2,(T,L)) player 2 splits mass evenly between the self loop
        // and the rerouted ground state.
        let own = Formula::Play(0, "T".into());
        let at_least_half =
            Formula::ProbAtLeast(1, Box::new(own.clone()), crate::ratio::rat(1, 2));
        let more_than_half =
            Formula::ProbGreater(1, Box::new(own), crate::ratio::rat(1, 2));
        assert!(mc.check("(1,2,(T,L))", &at_least_half).unwrap());
        assert!(!mc.check("(1,2,(T,L))", &more_than_half).unwrap());
    }
}

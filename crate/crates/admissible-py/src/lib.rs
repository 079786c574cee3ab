//! Python bindings. Players are numbered from 1, matching the formula
//! syntax; rationals cross the boundary as canonical `p/q` strings.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

use admissible::logic::{mk_d, mk_e, parse, rat_all, render, DiamondOracle, ModelChecker};
use admissible::ratio::format_rat;
use admissible::structures::{build_mbar, build_minfty, check_appropriate, ProbabilityStructure};
use admissible::{
    eliminate, find_dominator, find_justifying_belief, rationalizable_sets, Depth, DominanceMode,
    DominatorClass, NormalFormGame, StrategyRestriction, SupportMode, VerifyParams,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn value_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    match value {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else {
                n.as_f64().expect("finite number").into_py_any(py)
            }
        }
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, value_to_py(py, item)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn criterion_of(text: &str) -> PyResult<DominanceMode> {
    match text {
        "weak" => Ok(DominanceMode::Weak),
        "strong" => Ok(DominanceMode::Strong),
        other => Err(PyValueError::new_err(format!(
            "unknown criterion `{other}`, expected `weak` or `strong`"
        ))),
    }
}

fn class_of(text: &str) -> PyResult<DominatorClass> {
    match text {
        "pure" => Ok(DominatorClass::Pure),
        "mixed" => Ok(DominatorClass::Mixed),
        other => Err(PyValueError::new_err(format!(
            "unknown dominator class `{other}`, expected `pure` or `mixed`"
        ))),
    }
}

fn support_of(text: &str) -> PyResult<SupportMode> {
    match text {
        "full" => Ok(SupportMode::Full),
        "subset" => Ok(SupportMode::Subset),
        other => Err(PyValueError::new_err(format!(
            "unknown support mode `{other}`, expected `full` or `subset`"
        ))),
    }
}

/// A finite game in normal form with exact rational payoffs.
#[pyclass(frozen)]
struct Game {
    inner: NormalFormGame,
}

impl Game {
    fn player_index(&self, player: usize) -> PyResult<usize> {
        if player == 0 || player > self.inner.num_players() {
            return Err(PyValueError::new_err(format!(
                "player {player} out of range, players are numbered from 1"
            )));
        }
        Ok(player - 1)
    }

    fn restriction_of(&self, sets: Option<Vec<Vec<String>>>) -> PyResult<StrategyRestriction> {
        match sets {
            Some(ids) => StrategyRestriction::from_ids(&self.inner, &ids).map_err(err),
            None => Ok(StrategyRestriction::full(&self.inner)),
        }
    }
}

#[pymethods]
impl Game {
    /// Parse a game from its JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Game {
            inner: NormalFormGame::from_json_str(text).map_err(err)?,
        })
    }

    /// Load a game from a JSON file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        Game::from_json(&text)
    }

    #[getter]
    fn players(&self) -> Vec<String> {
        self.inner.players().to_vec()
    }

    fn strategies(&self, player: usize) -> PyResult<Vec<String>> {
        let p = self.player_index(player)?;
        Ok(self.inner.strategy_ids(p).to_vec())
    }

    /// Payoff to `player` at a pure profile, as a rational string.
    fn payoff(&self, profile: Vec<String>, player: usize) -> PyResult<String> {
        let p = self.player_index(player)?;
        let idx = self.inner.parse_profile(&profile).map_err(err)?;
        Ok(format_rat(self.inner.payoff(p, &idx)))
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    /// Run iterated elimination and return the full trace.
    #[pyo3(signature = (criterion="weak", dominators="mixed", rounds=None))]
    fn eliminate(
        &self,
        py: Python<'_>,
        criterion: &str,
        dominators: &str,
        rounds: Option<usize>,
    ) -> PyResult<Py<PyAny>> {
        let depth = match rounds {
            Some(k) => Depth::Rounds(k),
            None => Depth::ToFixpoint,
        };
        let trace =
            eliminate(&self.inner, criterion_of(criterion)?, class_of(dominators)?, depth)
                .map_err(err)?;
        value_to_py(py, &trace.to_json(&self.inner))
    }

    /// Iteratively remove never-best-responses and return the surviving
    /// sets together with one justifying belief per survivor.
    fn rationalizable(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let sets = rationalizable_sets(&self.inner).map_err(err)?;
        value_to_py(py, &sets.to_json(&self.inner))
    }

    /// Search for a strategy dominating `strategy`, or None.
    #[pyo3(signature = (player, strategy, criterion="weak", dominators="mixed", sets=None))]
    fn dominator(
        &self,
        py: Python<'_>,
        player: usize,
        strategy: &str,
        criterion: &str,
        dominators: &str,
        sets: Option<Vec<Vec<String>>>,
    ) -> PyResult<Option<Py<PyAny>>> {
        let p = self.player_index(player)?;
        let s = self.inner.strategy_index(p, strategy).map_err(err)?;
        let restriction = self.restriction_of(sets)?;
        let cert = find_dominator(
            &self.inner,
            p,
            s,
            &restriction,
            criterion_of(criterion)?,
            class_of(dominators)?,
        )
        .map_err(err)?;
        cert.map(|c| value_to_py(py, &c.to_json(&self.inner))).transpose()
    }

    /// Search for a belief making `strategy` a best response, or None.
    #[pyo3(signature = (player, strategy, support="full", sets=None))]
    fn justifying_belief(
        &self,
        py: Python<'_>,
        player: usize,
        strategy: &str,
        support: &str,
        sets: Option<Vec<Vec<String>>>,
    ) -> PyResult<Option<Py<PyAny>>> {
        let p = self.player_index(player)?;
        let s = self.inner.strategy_index(p, strategy).map_err(err)?;
        let restriction = self.restriction_of(sets)?;
        let cert = find_justifying_belief(&self.inner, p, s, &restriction, support_of(support)?)
            .map_err(err)?;
        cert.map(|c| value_to_py(py, &c.to_json(&self.inner))).transpose()
    }

    /// Text of the level-`k` admissibility formula for `player`.
    fn admissibility_formula(&self, k: usize, player: usize) -> PyResult<String> {
        let p = self.player_index(player)?;
        Ok(render(&mk_d(&self.inner, k, p)))
    }

    /// Text of "everyone is rational" iterated through `k` belief layers.
    fn everyone_rational_formula(&self, k: usize) -> String {
        render(&mk_e(&self.inner, k, rat_all(&self.inner)))
    }

    /// Parse a formula against this game and echo it normalized.
    fn parse_formula(&self, text: &str) -> PyResult<String> {
        Ok(render(&parse(&self.inner, text).map_err(err)?))
    }

    /// The level grid carrying every strategy's admissibility witnesses
    /// up to depth `k`.
    fn grid(&self, k: usize) -> PyResult<Structure> {
        let grid = build_mbar(&self.inner, k).map_err(err)?;
        Ok(Structure {
            inner: grid.structure,
        })
    }

    /// A depth-`k` grid extended with one state anchoring `strategy` at
    /// every level at once; returns the structure and the new state id.
    fn anchored(&self, player: usize, strategy: &str, k: usize) -> PyResult<(Structure, String)> {
        let p = self.player_index(player)?;
        let (structure, designated) = build_minfty(&self.inner, p, strategy, k).map_err(err)?;
        Ok((Structure { inner: structure }, designated))
    }
}

/// A finite set of states, each pairing a pure profile with one exact
/// probability measure per player.
#[pyclass(frozen)]
struct Structure {
    inner: ProbabilityStructure,
}

impl Structure {
    fn oracle_of(
        &self,
        oracle: &str,
        family: Option<Vec<PyRef<'_, Structure>>>,
    ) -> PyResult<DiamondOracle> {
        match oracle {
            "reject" => Ok(DiamondOracle::Reject),
            "theorem" => DiamondOracle::theorem(self.inner.game()).map_err(err),
            "family" => {
                let members = family.filter(|f| !f.is_empty()).ok_or_else(|| {
                    PyValueError::new_err("the family oracle needs member structures")
                })?;
                Ok(DiamondOracle::family(
                    members.iter().map(|s| s.inner.clone()).collect(),
                ))
            }
            other => Err(PyValueError::new_err(format!(
                "unknown oracle `{other}`, expected `reject`, `theorem` or `family`"
            ))),
        }
    }
}

#[pymethods]
impl Structure {
    /// Parse a structure (with its game inline) from JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Structure {
            inner: ProbabilityStructure::from_json_str(text).map_err(err)?,
        })
    }

    /// Load a structure from a JSON file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        Structure::from_json(&text)
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        (0..self.inner.num_states())
            .map(|i| self.inner.state(i).id.clone())
            .collect()
    }

    fn game(&self) -> Game {
        Game {
            inner: self.inner.game().clone(),
        }
    }

    /// Evaluate a formula at one state.
    #[pyo3(signature = (state, formula, oracle="reject", family=None))]
    fn check(
        &self,
        state: &str,
        formula: &str,
        oracle: &str,
        family: Option<Vec<PyRef<'_, Structure>>>,
    ) -> PyResult<bool> {
        let f = parse(self.inner.game(), formula).map_err(err)?;
        let oracle = self.oracle_of(oracle, family)?;
        ModelChecker::new(&self.inner, &oracle)
            .check(state, &f)
            .map_err(err)
    }

    /// True when the formula holds at every state.
    #[pyo3(signature = (formula, oracle="reject", family=None))]
    fn holds_everywhere(
        &self,
        formula: &str,
        oracle: &str,
        family: Option<Vec<PyRef<'_, Structure>>>,
    ) -> PyResult<bool> {
        let f = parse(self.inner.game(), formula).map_err(err)?;
        let oracle = self.oracle_of(oracle, family)?;
        ModelChecker::new(&self.inner, &oracle)
            .holds_everywhere(&f)
            .map_err(err)
    }

    /// Where the measures violate the belief-structure conditions.
    fn appropriateness(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        value_to_py(py, &check_appropriate(&self.inner).to_json())
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }
}

/// Run the randomized cross-verification suite and return its report.
#[pyfunction]
#[pyo3(signature = (seed_lo=0, seed_hi=199, players=2, max_strategies=4, payoff_bound=3,
                    k_max=3, convergence_extra=2, size_cap=200_000, include_fixed=true))]
#[allow(clippy::too_many_arguments)]
fn run_verification(
    py: Python<'_>,
    seed_lo: u64,
    seed_hi: u64,
    players: usize,
    max_strategies: usize,
    payoff_bound: i64,
    k_max: usize,
    convergence_extra: usize,
    size_cap: u128,
    include_fixed: bool,
) -> PyResult<Py<PyAny>> {
    let params = VerifyParams {
        seed_lo,
        seed_hi,
        players,
        max_strategies,
        payoff_bound,
        k_max,
        convergence_extra,
        size_cap,
        include_fixed,
    };
    let report = admissible::run_verification(&params).map_err(err)?;
    let value: serde_json::Value =
        serde_json::from_str(&report.to_json_string()).expect("report round-trips");
    value_to_py(py, &value)
}

#[pymodule]
fn admissible_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Game>()?;
    m.add_class::<Structure>()?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    Ok(())
}

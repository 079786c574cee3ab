#!/usr/bin/env python3
"""Builds the extension module and exercises every binding entry point."""

import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_module() -> Path:
    subprocess.run(
        [
            "cargo",
            "build",
            "-p",
            "admissible-py",
            "--release",
            "--features",
            "extension-module",
        ],
        cwd=ROOT,
        check=True,
    )
    staging = Path(tempfile.mkdtemp(prefix="admissible-py."))
    shutil.copy2(
        ROOT / "target" / "release" / "libadmissible_py.so",
        staging / "admissible_py.so",
    )
    return staging


sys.path.insert(0, str(build_module()))
import admissible_py as ap  # noqa: E402

# Loading and basic accessors.
game = ap.Game.from_file(str(ROOT / "games" / "two_round_weak.json"))
assert game.players == ["P1", "P2"]
assert game.strategies(1) == ["T", "B"]
assert game.payoff(["B", "R"], 1) == "0"
assert ap.Game.from_json(game.to_json()).players == game.players

# Iterated elimination keeps T and L after two rounds.
trace = game.eliminate()
assert trace["converged_at"] == 2
assert trace["rounds"][-1] == [["T"], ["L"]]
assert trace["removals"][0][0]["dominated"] == "B"
one_round = game.eliminate(criterion="weak", dominators="pure", rounds=1)
assert len(one_round["rounds"]) == 2

# Dominance and justifying beliefs are two sides of the same search.
assert game.dominator(1, "B", dominators="pure")["dominator"] == {"pure": "T"}
assert game.dominator(1, "B") is not None
assert game.dominator(1, "T") is None
assert game.justifying_belief(1, "B", support="full") is None
subset = game.justifying_belief(1, "B", support="subset", sets=[["T", "B"], ["L"]])
assert subset["belief"] == {"(L)": "1"}

# Rationalizability on the dilemma collapses to mutual defection.
pd = ap.Game.from_file(str(ROOT / "games" / "prisoners_dilemma.json"))
sets = pd.rationalizable()
assert sets["sets"] == [["D"], ["D"]]

# Formula text round-trips through the parser.
assert game.parse_formula("((RAT_1)) & !(!true)") == "RAT_1 & !!true"
d22 = game.admissibility_formula(2, 2)
assert game.parse_formula(d22) == d22
assert "RAT_1" in game.everyone_rational_formula(1)

# Model checking on the level grid.
grid = game.grid(2)
assert "(2,1,(T,L))" in grid.states
assert grid.game().players == game.players
assert grid.check("(2,1,(T,L))", d22, oracle="theorem")
assert not grid.check("(0,1,(B,R))", d22, oracle="theorem")
assert grid.holds_everywhere("true")
assert grid.check("(2,1,(T,L))", d22, oracle="family", family=[grid])
report = grid.appropriateness()
assert all(f["condition"] == 4 for f in report["failures"])

# The anchored structure satisfies possible admissibility at all levels.
anchored, designated = game.anchored(1, "T", 2)
for k in range(3):
    formula = "<B_1> (" + game.admissibility_formula(k, 1) + ")"
    assert anchored.check(designated, formula, oracle="theorem")

# Structures survive a JSON round trip.
again = ap.Structure.from_json(anchored.to_json())
assert again.states == anchored.states

# A short randomized verification run comes back clean.
report = ap.run_verification(seed_lo=0, seed_hi=4, include_fixed=False)
assert report["passed"] is True
assert report["violations"] == []

print("smoke test: ok")

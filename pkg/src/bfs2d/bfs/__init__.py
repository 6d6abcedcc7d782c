from .direction import BOTTOM_UP, DEFAULT_ALPHA, DEFAULT_BETA, TOP_DOWN, choose_direction
from .distributed import (
    MODES,
    LevelStats,
    RankState,
    SearchStats,
    par_bottomup_level,
    par_topdown_level,
    run_search,
    run_single_level,
)
from .sequential import seq_bottomup, seq_topdown
from .validate import Verdict, tree_levels, validate_tree

__all__ = [
    "BOTTOM_UP", "DEFAULT_ALPHA", "DEFAULT_BETA", "MODES", "TOP_DOWN", "LevelStats", "RankState",
    "SearchStats", "Verdict", "choose_direction", "par_bottomup_level", "par_topdown_level",
    "run_search", "run_single_level", "seq_bottomup", "seq_topdown", "tree_levels", "validate_tree",
]

"""Attention-score span selection: rules, grid search, decision tree."""

from .interchange import (
    FORMAT_NAME,
    FORMAT_VERSION,
    InterchangeHeader,
    ScoredPost,
    WordScore,
    enrich,
    read_interchange,
    write_interchange,
)
from .postag import UNIVERSAL_TAGS, pos_tag
from .select import (
    DEFAULT_PERCENTILES,
    DEFAULT_THRESHOLDS,
    GridCell,
    GridSearchResult,
    RuleConfig,
    apply_rule_set,
    gate,
    grid_search,
    pool_subwords,
    predict_post,
    select_rule,
)
from .tree import DecisionTree, predict_tree, train_decision_tree

__all__ = [
    "FORMAT_NAME",
    "FORMAT_VERSION",
    "InterchangeHeader",
    "ScoredPost",
    "WordScore",
    "enrich",
    "read_interchange",
    "write_interchange",
    "UNIVERSAL_TAGS",
    "pos_tag",
    "DEFAULT_PERCENTILES",
    "DEFAULT_THRESHOLDS",
    "GridCell",
    "GridSearchResult",
    "RuleConfig",
    "apply_rule_set",
    "gate",
    "grid_search",
    "pool_subwords",
    "predict_post",
    "select_rule",
    "DecisionTree",
    "predict_tree",
    "train_decision_tree",
]

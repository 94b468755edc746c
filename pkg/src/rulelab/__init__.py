"""Association rule mining with hyper-geometric interest measures.

Modules: :mod:`~rulelab.txdb` (transaction databases), :mod:`~rulelab.mine`
(frequent itemsets and rules), :mod:`~rulelab.measures` (support,
confidence, lift, hyper-lift, hyper-confidence, chi-square, Fisher),
:mod:`~rulelab.simulate` (independence model and null databases),
:mod:`~rulelab.questgen` (synthetic data with known patterns) and
:mod:`~rulelab.evaluate` (filtering, sweeps, PN graphs).
"""

from ._core import BACKEND
from .measures import ContingencyCounts, MeasureVector, measure_vector
from .mine import FrequentItemset, Rule, all_pair_rules, frequent_itemsets, rules_single_consequent
from .simulate import IndependenceModel
from .txdb import ItemCatalog, TransactionDatabase, count, load_basket, support

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ContingencyCounts",
    "FrequentItemset",
    "IndependenceModel",
    "ItemCatalog",
    "MeasureVector",
    "Rule",
    "TransactionDatabase",
    "all_pair_rules",
    "count",
    "frequent_itemsets",
    "load_basket",
    "measure_vector",
    "rules_single_consequent",
    "support",
]

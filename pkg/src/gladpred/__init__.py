"""Personalized knee-pain-change prediction pipeline.

Library surface: a registry data dictionary with record validation and
encoding (`schema`), cohort ingestion / calibrated synthetic generation
(`cohort`), a deterministic random forest with impurity importances
(`forest`), variable selection (`selection`), margin-based evaluation
(`evaluation`), model persistence (`modelstore`), and a prediction service
(`service`). The `gladpred` CLI drives the full replication pipeline.
"""

from .schema import builtin_dictionary

__all__ = ["builtin_dictionary"]

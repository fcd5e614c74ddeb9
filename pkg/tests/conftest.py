import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gladpred.cohort import calibrate_signal, generate_synthetic
from gladpred.schema import PatientRecord, builtin_dictionary

import datetime as dt


@pytest.fixture(scope="session")
def base_dict():
    return builtin_dictionary("base34")


@pytest.fixture(scope="session")
def extended_dict():
    return builtin_dictionary("extended46")


@pytest.fixture(scope="session")
def small_cohort(base_dict):
    """Calibrated synthetic cohort small enough for fast unit tests."""
    config = calibrate_signal(base_dict, 0.32)
    return generate_synthetic(config, 1500, 7)


def make_values(dictionary, **overrides):
    """A complete in-range record value map (marginal means / modal levels)."""
    values = {}
    for spec in dictionary.predictors:
        kind = spec.kind
        if kind.__class__.__name__ == "Continuous":
            values[spec.id] = spec.marginal.mean
        elif kind.__class__.__name__ == "Binary":
            values[spec.id] = "yes" if spec.marginal.proportion >= 0.5 else "no"
        else:
            values[spec.id] = kind.levels[int(np.argmax(spec.marginal.counts))]
    values[dictionary.outcome.id] = 14.0
    values.update(overrides)
    return values


def make_record(dictionary, record_id="t0", start="2019-06-01", joint="knee", followup=True, **overrides):
    return PatientRecord(
        record_id=record_id,
        values=make_values(dictionary, **overrides),
        primary_joint=joint,
        start_date=dt.date.fromisoformat(start) if start else None,
        followup_complete=followup,
    )

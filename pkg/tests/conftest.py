import io

import pytest

from cohortminer.eventlog import PatientProjection, load_log


def make_log(csv_text: str):
    return load_log(io.StringIO(csv_text))


def proj(pid: str, activities, dbcs=(), pairs=()):
    """Hand-built projection for mining/scoring tests."""
    return PatientProjection(
        pid, frozenset(activities), frozenset(dbcs), frozenset(pairs)
    )


TABLE1_CSV = """patient_id,activity,dbc,timestamp
Patient1,Action1,DBC1,2017-01-01T00:00:00
Patient2,Action2,DBC2,2017-01-01T00:00:00
Patient3,Action1,DBC1,2017-01-03T00:00:00
Patient1,Action1,DBC1,2017-01-02T00:00:00
Patient2,Action5,DBC5,2017-01-02T00:00:00
"""


@pytest.fixture
def table1_log():
    return make_log(TABLE1_CSV)

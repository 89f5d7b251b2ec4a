"""The mandatory 5-field reporting manifest attached to every result.

A result without its manifest is not reportable: the manifest pins (1) the
role of the number (measurement, never a training surrogate here), (2) the
estimator identity, hyperparameters, and toolkit version, (3) an uncertainty
interval, (4) a significance test where the measure admits one, and (5) the
preprocessing trail. Serialization is canonical JSON: byte-identical across
round trips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import InvalidConfig, MissingField

SCHEMA = "infometer-manifest-v1"
ARTIFACT_VERSION = "0.1.0"

#: measures whose data-driven estimates require a surrogate significance test
SIGNIFICANCE_REQUIRED = ("mutual_information", "transfer_entropy",
                         "active_information_storage", "predictive_information")

#: deterministic quantities: intervals are exact, significance not applicable
DETERMINISTIC_MEASURES = ("effective_information", "phi", "causal_emergence",
                          "autonomy_causal")


@dataclass(frozen=True)
class ReportManifest:
    role: str
    estimator: dict
    uncertainty: dict
    significance: dict
    preprocessing: dict

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "role": self.role,
            "estimator": self.estimator,
            "uncertainty": self.uncertainty,
            "significance": self.significance,
            "preprocessing": self.preprocessing,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, no whitespace drift."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def parse_manifest(text: str) -> ReportManifest:
    obj = json.loads(text)
    if obj.get("schema") != SCHEMA:
        raise InvalidConfig(f"unknown manifest schema {obj.get('schema')!r}")
    for fieldname in ("role", "estimator", "uncertainty", "significance", "preprocessing"):
        if fieldname not in obj or obj[fieldname] is None:
            raise MissingField(fieldname)
    return ReportManifest(obj["role"], obj["estimator"], obj["uncertainty"],
                          obj["significance"], obj["preprocessing"])


def build_manifest(measure: str, estimator_id: str, hyperparams: dict,
                   uncertainty: dict | None, significance: dict | None,
                   preprocessing_steps=(), stationarity=None, notes=(),
                   role: str = "measurement", unit: str = "nats") -> ReportManifest:
    """Assemble and validate the 5-field record; raises MissingField naming
    exactly which item is absent.

    Deterministic measures get an exact zero-width interval and a
    not-applicable significance record; everything else must bring a real
    interval, and MI/TE-family estimates must bring a real significance test.
    """
    if role not in ("measurement", "training-surrogate"):
        raise InvalidConfig(f"role must declare measurement vs training-surrogate, got {role!r}")
    if not estimator_id:
        raise MissingField("estimator")

    deterministic = measure in DETERMINISTIC_MEASURES
    if uncertainty is None:
        if not deterministic:
            raise MissingField(
                "uncertainty",
                f"{measure} estimates require a resampling interval (field 3 of 5)",
            )
        uncertainty = {"kind": "exact", "reason": "deterministic quantity"}

    if significance is None:
        if measure in SIGNIFICANCE_REQUIRED:
            raise MissingField(
                "significance",
                f"{measure} estimates require a surrogate significance test (field 4 of 5)",
            )
        significance = {"kind": "not-applicable",
                        "reason": "deterministic quantity" if deterministic
                        else "no null hypothesis tested for this measure"}

    preprocessing = {
        "steps": [dict(s) for s in preprocessing_steps if s],
        "stationarity": stationarity,
        "notes": list(notes),
    }
    estimator = {
        "id": estimator_id,
        "measure": measure,
        "hyperparams": _plain(hyperparams),
        "unit": unit,
        "artifact_version": ARTIFACT_VERSION,
    }
    return ReportManifest(role, estimator, _plain(uncertainty), _plain(significance),
                          _plain(preprocessing))


def _plain(obj):
    """Recursively coerce numpy scalars/arrays into JSON-native types."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj

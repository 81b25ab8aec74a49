"""YAML scenario and sweep-spec loading.

Physical quantities carry explicit unit suffixes in their key names
(carrier_hz, p_max_w, xi_theta_rad2, ...) so a misconfigured unit is visible
in the file itself.  Numeric values are coerced with float()/int(), which
also accepts exponent spellings PyYAML leaves as strings (e.g. 30.0e9).
"""

from dataclasses import dataclass

import numpy as np
import yaml

from .arrays import ArrayConfig
from .errors import ConfigError
from .pcrb import PcrbModel, PcrbThresholds, build_pcrb_model
from .scenario import POLICIES, RoadScenario, VehicleSpec

SWEEP_AXES = ("p_max", "n_vehicles", "n_tx", "n_rx", "n_veh_antennas")


@dataclass(frozen=True)
class SweepSpec:
    """One experiment grid: an axis, its values, policies, and seeds per point."""

    axis: str
    values: tuple
    policies: tuple
    repetitions: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "policies", tuple(self.policies))
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if len(self.values) == 0:
            raise ConfigError("values must be nonempty")
        if list(self.values) != sorted(self.values):
            raise ConfigError("values must be sorted ascending")
        if len(self.policies) == 0:
            raise ConfigError("policies must be nonempty")
        for policy in self.policies:
            if policy not in POLICIES:
                raise ConfigError(f"unknown policy {policy!r}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")


def _load_yaml(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"{path}: YAML parse error at {where}: {exc.problem}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from exc


def _section(mapping, key, path, required=True):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path}: expected a mapping")
    if key not in mapping:
        if required:
            raise ConfigError(f"{path}: missing required section '{key}'")
        return {}
    value = mapping[key]
    if not isinstance(value, dict):
        raise ConfigError(f"{path}.{key}: expected a mapping")
    return value


def _as_float(mapping, key, path, default=None):
    if key not in mapping or mapping[key] is None:
        if default is None:
            raise ConfigError(f"{path}: missing required key '{key}'")
        return default
    try:
        return float(mapping[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.{key}: expected a number, got {mapping[key]!r}") from exc


def _as_int(mapping, key, path, default=None):
    if key not in mapping or mapping[key] is None:
        if default is None:
            raise ConfigError(f"{path}: missing required key '{key}'")
        return default
    value = mapping[key]
    try:
        as_float = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}") from exc
    if as_float != int(as_float):
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
    return int(as_float)


def _float_list(values, path, length=None):
    if not isinstance(values, (list, tuple)):
        raise ConfigError(f"{path}: expected a list of numbers")
    try:
        out = [float(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: expected a list of numbers") from exc
    if length is not None and len(out) != length:
        raise ConfigError(f"{path}: expected exactly {length} entries")
    return out


def _vehicle_pcrb(entry, path) -> PcrbModel:
    has_direct = "pcrb" in entry
    has_matrix = "pcrb_matrix" in entry
    if has_direct == has_matrix:
        raise ConfigError(f"{path}: give exactly one of 'pcrb' or 'pcrb_matrix'")
    try:
        if has_direct:
            block = _section(entry, "pcrb", path)
            return PcrbModel(
                b1_sq=_float_list(block.get("b1_sq"), f"{path}.pcrb.b1_sq", 4),
                b2_sq=_float_list(block.get("b2_sq"), f"{path}.pcrb.b2_sq", 4),
                eigs=_float_list(block.get("eigs"), f"{path}.pcrb.eigs", 4))
        block = _section(entry, "pcrb_matrix", path)
        prior_std = _float_list(block.get("prior_std"), f"{path}.pcrb_matrix.prior_std", 4)
        if any(s <= 0 for s in prior_std):
            raise ConfigError(f"{path}.pcrb_matrix.prior_std: entries must be > 0")
        rows = block.get("sensitivity")
        if not isinstance(rows, (list, tuple)) or len(rows) != 4:
            raise ConfigError(f"{path}.pcrb_matrix.sensitivity: expected 4 rows of 4")
        matrix = np.array([_float_list(row, f"{path}.pcrb_matrix.sensitivity", 4)
                           for row in rows])
        prior = np.diag([1.0 / s ** 2 for s in prior_std]).astype(complex)
        observed = (matrix.T @ matrix).astype(complex)
        return build_pcrb_model(prior, observed)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_scenario(path) -> RoadScenario:
    """Parse a scenario file into a RoadScenario; raises ConfigError on problems."""
    data = _load_yaml(path)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    arrays_block = _section(data, "arrays", path)
    try:
        arrays = ArrayConfig(
            n_tx=_as_int(arrays_block, "n_tx", f"{path}.arrays"),
            n_rx=_as_int(arrays_block, "n_rx", f"{path}.arrays"),
            n_veh=_as_int(arrays_block, "n_veh", f"{path}.arrays"),
            carrier_hz=_as_float(arrays_block, "carrier_hz", f"{path}.arrays"),
            bandwidth_hz=_as_float(arrays_block, "bandwidth_hz", f"{path}.arrays"),
            noise_comm=_as_float(arrays_block, "noise_comm", f"{path}.arrays"),
            noise_radar=_as_float(arrays_block, "noise_radar", f"{path}.arrays"),
            alpha_const=_as_float(arrays_block, "alpha_const", f"{path}.arrays", 1.0))
    except ValueError as exc:
        raise ConfigError(f"{path}.arrays: {exc}") from exc

    road = _section(data, "road", path)
    power = _section(data, "power", path)
    thresholds_block = _section(data, "pcrb_thresholds", path)
    prediction = _section(data, "prediction", path, required=False)

    try:
        thresholds = PcrbThresholds(
            xi_theta=_as_float(thresholds_block, "xi_theta_rad2", f"{path}.pcrb_thresholds"),
            xi_dist=_as_float(thresholds_block, "xi_dist_m2", f"{path}.pcrb_thresholds"))
    except ValueError as exc:
        raise ConfigError(f"{path}.pcrb_thresholds: {exc}") from exc

    vehicles_raw = data.get("vehicles")
    if not isinstance(vehicles_raw, list) or not vehicles_raw:
        raise ConfigError(f"{path}: 'vehicles' must be a nonempty list")
    vehicles = []
    for i, entry in enumerate(vehicles_raw):
        vpath = f"{path}.vehicles[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{vpath}: expected a mapping")
        vehicles.append(VehicleSpec(
            position_m=_as_float(entry, "position_m", vpath),
            speed_mps=_as_float(entry, "speed_mps", vpath),
            payload_bits=_as_float(entry, "payload_bits", vpath),
            pcrb=_vehicle_pcrb(entry, vpath)))

    deadline = _as_float(road, "deadline_s", f"{path}.road", default=float("nan"))
    try:
        return RoadScenario(
            rsu_offset_m=_as_float(road, "rsu_offset_m", f"{path}.road"),
            slot_s=_as_float(road, "slot_s", f"{path}.road"),
            n_slots=_as_int(road, "n_slots", f"{path}.road"),
            vehicles=tuple(vehicles),
            p_max=_as_float(power, "p_max_w", f"{path}.power"),
            thresholds=thresholds,
            arrays=arrays,
            deadline_s=None if deadline != deadline else deadline,
            predict_noise_std_rad=_as_float(prediction, "noise_std_rad",
                                            f"{path}.prediction", 0.0),
            seed=_as_int(data, "seed", path, 0))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_sweep_spec(path) -> SweepSpec:
    """Parse a sweep-spec file into a SweepSpec; raises ConfigError on problems."""
    data = _load_yaml(path)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    axis = data.get("axis")
    if not isinstance(axis, str):
        raise ConfigError(f"{path}: 'axis' must be a string")
    values = data.get("values")
    if not isinstance(values, list):
        raise ConfigError(f"{path}: 'values' must be a list")
    policies = data.get("policies")
    if not isinstance(policies, list):
        raise ConfigError(f"{path}: 'policies' must be a list")
    try:
        numeric = [float(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.values: expected numbers") from exc
    return SweepSpec(axis=axis, values=tuple(numeric),
                     policies=tuple(str(p) for p in policies),
                     repetitions=_as_int(data, "repetitions", path, 1))

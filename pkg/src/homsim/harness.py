"""Scenario evaluation, parameter sweeps and result serialization.

Every command returns a list of :class:`ResultRow`; :func:`emit` writes them
as CSV or JSON. CSV columns, in order::

    scenario,engine,theta,zeta,i_port1,i_port2,r_norm,extra

``extra`` holds a JSON object (bunching probabilities, verdict flags, ...).
Floats are printed with 17 significant digits so values survive a round
trip bit for bit. Empty ``theta``/``zeta``/``r_norm`` cells mean "not
applicable" and become ``null`` in JSON.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import dsl
from .dsl import Circuit, Param, Phase, SuperposedBS
from .fock import DEFAULT_CUTOFF, FockState, bs_transform, phase_transform
from .numerics import (
    PORT_INDEX,
    Convention,
    FieldVector,
    apply,
    bs_matrix,
    intensities,
    phase_matrix,
    phasor,
)
from .phase_basis import (
    QUADRATURE,
    BasisCase,
    Combination,
    Relation,
    classify_all,
    evaluate_hom_case,
    superposed_matrix,
)
from .wave import FixedTheta, UniformTheta, coincidence_normalized, ensemble_average

ENGINES = ("wave", "fock", "phase_basis")
CROSS_TOL = 1e-12
COLUMNS = ("scenario", "engine", "theta", "zeta", "i_port1", "i_port2", "r_norm", "extra")


class ConfigError(ValueError):
    pass


class EngineError(ValueError):
    """The selected engine cannot evaluate this circuit."""


class CrossEngineMismatch(RuntimeError):
    pass


class EmitError(OSError):
    pass


@dataclass
class ResultRow:
    scenario: str
    engine: str
    theta: float | None
    zeta: float | None
    i_port1: float
    i_port2: float
    r_norm: float | None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.i_port1 < 0 or self.i_port2 < 0:
            raise ValueError("intensities must be non-negative")
        if self.r_norm is not None and self.r_norm < 0:
            raise ValueError("r_norm must be non-negative")


@dataclass(frozen=True)
class EnsembleSpec:
    n: int
    seed: int
    distribution: object = UniformTheta()


@dataclass
class RunConfig:
    circuit: Circuit
    engine: str = "wave"
    params: dict = field(default_factory=dict)
    ensemble: EnsembleSpec | None = None
    output_format: str = "csv"
    output: str | None = None

    def __post_init__(self):
        if isinstance(self.circuit, str):
            self.circuit = dsl.builtin(self.circuit)
        if self.engine not in ENGINES + ("all",):
            raise ConfigError(f"unknown engine {self.engine!r}")
        if self.ensemble is not None and self.engine != "wave":
            raise ConfigError("ensemble averaging requires engine 'wave'")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        for name in self.params:
            if name not in dsl.PARAMETERS:
                raise ConfigError(f"unknown parameter {name!r}")
        try:
            dsl.validate(self.circuit)
        except dsl.ValidationError as exc:
            raise ConfigError(str(exc)) from exc


# --- circuit evaluation ----------------------------------------------------

def _resolve(expr, params) -> float:
    if isinstance(expr, Param):
        return float(params.get(expr.name, 0.0))
    return expr.value


def _input_amps(c: Circuit, params) -> list:
    amps = [0j, 0j]
    for port, amp in c.inputs:
        ph = 1.0 if amp.phase is None else phasor(_resolve(amp.phase, params))
        amps[PORT_INDEX[port]] = amp.magnitude * ph
    return amps


def _detector_order(c: Circuit, values):
    final = c.output_ports()
    return tuple(values[final.index(p)] for p in c.detectors)


def evaluate_field(c: Circuit, params: dict, engine: str = "wave",
                   conv: Convention = Convention.UNITARY) -> tuple[float, float]:
    """Detector intensities for the wave or phase_basis engine.

    The phase_basis engine reads every plain ``bs s`` as the same-basis
    symmetric superposition of sign ``s``.
    """
    v = FieldVector(_input_amps(c, params), dsl.layer_ports(0))
    layer = 0
    for el in c.elements:
        if isinstance(el, Phase):
            v = apply(phase_matrix(el.port, _resolve(el.expr, params), conv), v)
            continue
        if isinstance(el, SuperposedBS):
            if engine != "phase_basis":
                raise EngineError(f"engine {engine!r} cannot evaluate superposed beam splitters")
            m = superposed_matrix(el.case, conv)
        elif engine == "phase_basis":
            m = superposed_matrix(BasisCase(Relation.SAME, Combination.SYMMETRIC, el.sign), conv)
        else:
            m = bs_matrix(el.sign, conv)
        layer += 1
        v = apply(m, v, dsl.layer_ports(layer))
    return _detector_order(c, intensities(v))


def photon_counts(c: Circuit) -> tuple[int, int]:
    """One photon on every input port with non-zero amplitude."""
    counts = [0, 0]
    for port, amp in c.inputs:
        if amp.magnitude != 0:
            counts[PORT_INDEX[port]] = 1
    return counts[0], counts[1]


def evaluate_fock(c: Circuit, params: dict) -> FockState:
    """Output Fock state, modes ordered as the final layer ports."""
    if any(isinstance(el, SuperposedBS) for el in c.elements):
        raise EngineError("engine 'fock' cannot evaluate superposed beam splitters")
    n1, n2 = photon_counts(c)
    if n1 + n2 > DEFAULT_CUTOFF:
        raise EngineError("photon number exceeds the Fock cutoff")
    st = FockState.basis(n1, n2)
    for port, amp in c.inputs:
        if amp.phase is not None and amp.magnitude != 0:
            st = phase_transform(st, PORT_INDEX[port], _resolve(amp.phase, params))
    for el in c.elements:
        if isinstance(el, Phase):
            st = phase_transform(st, PORT_INDEX[el.port], _resolve(el.expr, params))
        else:
            st = bs_transform(st, el.sign)
    return st


def _bound(c: Circuit, params: dict, name: str):
    if name not in c.parameters():
        return None
    return float(params.get(name, 0.0))


def _row(c, engine, params, i1, i2, r, extra=None) -> ResultRow:
    return ResultRow(c.name, engine, _bound(c, params, "theta"), _bound(c, params, "zeta"),
                     i1, i2, r, extra or {})


def _run_engine(c: Circuit, params: dict, engine: str) -> ResultRow:
    if engine == "fock":
        st = evaluate_fock(c, params)
        m1, m2 = st.mean_occupation()
        pair = _detector_order(c, (m1, m2))
        # same normalization as the wave engine, with <n1 n2> as the coincidence
        r = st.mean_product() / ((m1 + m2) / 2.0) ** 2 if m1 + m2 > 0 else None
        first, second = (0, 1) if c.detectors == c.output_ports() else (1, 0)

        def p(n_first, n_second):
            k = [0, 0]
            k[first], k[second] = n_first, n_second
            return st.prob(*k)

        extra = {"p11": p(1, 1), "p20": p(2, 0), "p02": p(0, 2),
                 "p10": p(1, 0), "p01": p(0, 1)}
        return _row(c, engine, params, pair[0], pair[1], r, extra)
    i1, i2 = evaluate_field(c, params, engine)
    r = coincidence_normalized(i1, i2).r_value
    extra = {}
    if engine == "phase_basis":
        extra["non_unitary"] = any(
            isinstance(el, SuperposedBS) and el.case.relation is Relation.OPPOSITE
            for el in c.elements)
    return _row(c, engine, params, i1, i2, r, extra)


def _applicable(c: Circuit, engine: str) -> bool:
    if engine == "phase_basis":
        return True
    return not any(isinstance(el, SuperposedBS) for el in c.elements)


def _cross_check(c: Circuit, rows: dict) -> None:
    wave = rows.get("wave")
    pb = rows.get("phase_basis")
    if wave is not None and pb is not None:
        for col in ("i_port1", "i_port2", "r_norm"):
            a, b = getattr(wave, col), getattr(pb, col)
            if abs(a - b) > CROSS_TOL:
                raise CrossEngineMismatch(f"{c.name}: wave {col}={a!r} vs phase_basis {b!r}")
    fock = rows.get("fock")
    if wave is not None and fock is not None and sum(photon_counts(c)) == 1:
        total_in = sum(abs(a) ** 2 for a in _input_amps(c, {}))
        for col in ("i_port1", "i_port2"):
            a, b = getattr(wave, col) / total_in, getattr(fock, col)
            if abs(a - b) > CROSS_TOL:
                raise CrossEngineMismatch(f"{c.name}: wave {col}={a!r} vs fock {b!r}")


def cmd_run(config: RunConfig) -> list[ResultRow]:
    c = config.circuit
    if config.engine == "all":
        engines = [e for e in ENGINES if _applicable(c, e)]
    else:
        engines = [config.engine]
    rows = {e: _run_engine(c, config.params, e) for e in engines}
    if config.engine == "all":
        _cross_check(c, rows)
    return [rows[e] for e in engines]


def cmd_sweep(config: RunConfig, param: str, start: float, stop: float, steps: int,
              workers: int = 1) -> list[ResultRow]:
    """Evaluate on ``steps`` evenly spaced points of ``[start, stop]``, endpoints included."""
    if param not in dsl.PARAMETERS:
        raise ConfigError(f"cannot sweep {param!r}; choose from {dsl.PARAMETERS}")
    if param not in config.circuit.parameters():
        raise ConfigError(f"circuit {config.circuit.name!r} has no parameter {param!r}")
    if steps < 2:
        raise ConfigError("a sweep needs at least 2 steps")
    if stop < start:
        raise ConfigError(f"reversed sweep range {start!r} > {stop!r}")
    grid = np.linspace(start, stop, steps)

    def point(value):
        return cmd_run(replace(config, params={**config.params, param: float(value)}))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(point, grid))
    else:
        chunks = [point(v) for v in grid]
    return [row for chunk in chunks for row in chunk]


def cmd_classify(conv: Convention = Convention.UNITARY) -> list[ResultRow]:
    rows = []
    for v in classify_all(conv, include_degenerate=True):
        if v.degenerate:
            i1 = i2 = 0.0
        else:
            i1, i2, _ = evaluate_hom_case(v.case, QUADRATURE, conv)
        rows.append(ResultRow(
            v.case.label, "phase_basis", QUADRATURE, None, i1, i2, v.hom_r_at_quadrature,
            {"allowed": v.allowed, "mzi_directional": v.mzi_directional,
             "degenerate": v.degenerate, "notes": v.notes},
        ))
    return rows


def cmd_ensemble(n: int, seed: int, theta: float | None = None, scenario: str = "hom",
                 workers: int = 1) -> list[ResultRow]:
    dist = UniformTheta() if theta is None else FixedTheta(theta)
    st = ensemble_average(scenario, dist, n, seed, workers=workers)
    fixed = None if theta is None else float(theta)
    return [ResultRow(
        scenario, "wave",
        fixed if scenario == "hom" else None,
        fixed if scenario == "mzi" else None,
        st.mean_intensity[0], st.mean_intensity[1], st.mean_r,
        {"n_samples": st.n_samples, "var_r": st.var_r, "stderr_r": st.stderr_r,
         "seed": st.seed, "distribution": "uniform" if theta is None else "fixed"},
    )]


# --- serialization ---------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def _to_json(obj) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        text = _fmt_float(float(obj))
        # keep floats recognizable as floats after parsing
        return text if any(ch in text for ch in ".e") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, dict):
        return _to_json(value)
    if isinstance(value, float):
        return _fmt_float(value)
    return str(value)


def render_rows(rows: Sequence[ResultRow], fmt: str = "csv") -> str:
    if not rows:
        raise ValueError("no rows to emit")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in rows:
            writer.writerow([_csv_cell(getattr(r, col)) for col in COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        objs = [{col: getattr(r, col) for col in COLUMNS} for r in rows]
        return "[\n" + ",\n".join("  " + _to_json(o) for o in objs) + "\n]\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(rows: Sequence[ResultRow], fmt: str = "csv", destination=None) -> str:
    """Serialize ``rows`` and write them to ``destination``.

    ``destination`` is a path, a text stream, or None (return text only).
    Files are written to a temporary sibling and renamed into place, so a
    failure never leaves a partial file behind.
    """
    text = render_rows(rows, fmt)
    if destination is None:
        return text
    if hasattr(destination, "write"):
        destination.write(text)
        return text
    path = Path(destination)
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
        tmp = None
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc.strerror or exc}") from exc
    finally:
        if tmp is not None and os.path.exists(tmp):
            os.unlink(tmp)
    return text


def _parse_opt_float(text):
    return None if text in ("", None) else float(text)


def rows_from_csv(text: str) -> list[ResultRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [
        ResultRow(
            d["scenario"], d["engine"], _parse_opt_float(d["theta"]),
            _parse_opt_float(d["zeta"]), float(d["i_port1"]), float(d["i_port2"]),
            _parse_opt_float(d["r_norm"]), json.loads(d["extra"]) if d["extra"] else {},
        )
        for d in reader
    ]


def rows_from_json(text: str) -> list[ResultRow]:
    names = {f.name for f in fields(ResultRow)}
    out = []
    for obj in json.loads(text):
        if set(obj) != names:
            raise ValueError(f"unexpected keys {sorted(obj)}")
        out.append(ResultRow(**obj))
    return out

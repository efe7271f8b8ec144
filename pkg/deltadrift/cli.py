#
# Batch front end.
#
# Usage: deltadrift MODE --config FILE.json [--set KEY=VALUE ...] [--out PATH] [--jobs N] [-v]
#
# MODE is one of `analytic`, `oracle`, `compare` or `sweep`. The config file
# is a JSON object; `--set` overrides win over the file. Exit code is 0 on
# success, 2 when the input is rejected and 3 when an oracle run fails one
# of its integrity checks. Failures also print a one-line JSON error record
# on stderr.
#

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import queue
import re
import sys
import threading

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from deltadrift.core import (
    ConfigValidationError,
    DeltaDriftError,
    NonPositiveParameter,
    ParameterError,
    ParseError,
    PhysicalParams,
    validate,
)
from deltadrift.resonance import (
    decay_exponent,
    decay_rate,
    nonadiabatic_probability,
    resonance_params,
    saturation_probability,
    survival_probability,
)
from deltadrift.scaling import ScalingFrame, tau_of_t
from deltadrift.tdse import SolverSettings, run_oracle

logger = logging.getLogger(__name__)

MODES = ("analytic", "oracle", "compare", "sweep")
FORMATS = ("csv", "json")

PHYSICAL_KEYS = tuple(f.name for f in dataclasses.fields(PhysicalParams))
RUN_KEYS = ("mode", "n", "t_final", "sample_count")
SOLVER_KEYS = tuple(f.name for f in dataclasses.fields(SolverSettings))
SOLVER_SWITCHES = ("include_channel2", "scaling_form", "renormalize")
SWEEP_KEYS = ("axis", "values", "oracle")
OUTPUT_KEYS = ("path", "format")
SECTIONS = {"solver": SOLVER_KEYS, "sweep": SWEEP_KEYS, "output": OUTPUT_KEYS}
SWEEP_AXES = PHYSICAL_KEYS + ("n",)


@dataclass(frozen=True)
class RunConfig:
    mode: str
    params: PhysicalParams = PhysicalParams()
    n: int = 1
    t_final: float = 10.0
    sample_count: int = 101
    solver: SolverSettings = SolverSettings()
    sweep_axis: Optional[str] = None
    sweep_values: Sequence = ()
    sweep_oracle: bool = False
    output_path: Optional[str] = None
    output_format: str = "csv"


def _line_of(text: str, key: str) -> Optional[int]:
    match = re.search(r'"%s"\s*:' % re.escape(key.split(".")[-1]), text)
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _apply_override(document: dict, assignment: str):
    key, sep, raw = assignment.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ParseError(f"override '{assignment}' is not of the form key=value", key_path=key or None)

    parts = key.split(".")
    target = document
    for i, part in enumerate(parts[:-1]):
        child = target.setdefault(part, {})
        if not isinstance(child, dict):
            raise ParseError("override goes through a non-object value", key_path=".".join(parts[:i + 1]))
        target = child
    target[parts[-1]] = _parse_value(raw)


def _finite(value) -> bool:
    try:
        return math.isfinite(value)
    except OverflowError:
        return False


def _number(document, key, text, key_path=None, integer=False):
    value = document[key]
    key_path = key_path or key
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(f"expected a number, got {value!r}", key_path, _line_of(text, key_path))
    if not _finite(value):
        raise ConfigValidationError(f"expected a finite number, got {value!r}", key_path, _line_of(text, key_path))
    if integer:
        if int(value) != value:
            raise ConfigValidationError(f"expected an integer, got {value!r}", key_path, _line_of(text, key_path))
        return int(value)
    return float(value)


def _check_keys(section: dict, allowed, text, prefix=""):
    for key in section:
        path = f"{prefix}{key}"
        if key not in allowed:
            raise ParseError(f"unknown key '{path}'", path, _line_of(text, path))


def parse_config(text: str, overrides: Sequence[str] = (), mode: Optional[str] = None) -> RunConfig:
    """Parse a JSON run configuration into a validated :class:`RunConfig`.

    :param text: the configuration document
    :param overrides: ``key=value`` assignments applied on top of the
        document; dotted keys address nested sections
    :param mode: replaces the document's ``mode`` when given
    :raises ParseError: for malformed JSON, unknown keys or bad overrides
    :raises ConfigValidationError: for values that break an invariant
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", line=e.lineno) from e
    if not isinstance(document, dict):
        raise ParseError("configuration must be a JSON object", line=1)

    for assignment in overrides:
        _apply_override(document, assignment)
    if mode is not None:
        document["mode"] = mode

    _check_keys(document, PHYSICAL_KEYS + RUN_KEYS + tuple(SECTIONS), text)
    for name, allowed in SECTIONS.items():
        section = document.get(name, {})
        if not isinstance(section, dict):
            raise ConfigValidationError("expected an object", name, _line_of(text, name))
        _check_keys(section, allowed, text, prefix=f"{name}.")

    run_mode = document.get("mode")
    if run_mode not in MODES:
        raise ConfigValidationError(f"mode must be one of {', '.join(MODES)}, got {run_mode!r}",
                                    "mode", _line_of(text, "mode"))

    physical = {}
    for key in PHYSICAL_KEYS:
        if key in document and not (key == "v0_override" and document[key] is None):
            physical[key] = _number(document, key, text)
    params = PhysicalParams(**physical)

    run = {}
    if "n" in document:
        run["n"] = _number(document, "n", text, integer=True)
    if "t_final" in document:
        run["t_final"] = _number(document, "t_final", text)
    if "sample_count" in document:
        run["sample_count"] = _number(document, "sample_count", text, integer=True)
    config = RunConfig(mode=run_mode, params=params, **run)

    if config.n < 1:
        raise ConfigValidationError("level index must be at least 1", "n", _line_of(text, "n"))
    if not config.t_final > 0:
        raise ConfigValidationError("t_final must be positive", "t_final", _line_of(text, "t_final"))
    if config.sample_count < 2:
        raise ConfigValidationError("sample_count must be at least 2", "sample_count",
                                    _line_of(text, "sample_count"))

    solver_doc = document.get("solver", {})
    solver = {}
    for key in SOLVER_KEYS:
        if key not in solver_doc:
            continue
        path = f"solver.{key}"
        if key in SOLVER_SWITCHES:
            if not isinstance(solver_doc[key], bool):
                raise ConfigValidationError("expected true or false", path, _line_of(text, path))
            solver[key] = solver_doc[key]
        else:
            solver[key] = _number(solver_doc, key, text, key_path=path, integer=(key == "n_points"))
    if run_mode == "compare" and "solver" not in document:
        raise ConfigValidationError("compare mode needs a 'solver' section", "solver")

    sweep_doc = document.get("sweep", {})
    axis = sweep_doc.get("axis")
    values = sweep_doc.get("values", [])
    if run_mode == "sweep":
        if axis is None:
            raise ConfigValidationError("sweep mode needs 'sweep.axis'", "sweep.axis",
                                        _line_of(text, "sweep"))
        if axis not in SWEEP_AXES:
            raise ConfigValidationError(f"cannot sweep over '{axis}'", "sweep.axis",
                                        _line_of(text, "sweep.axis"))
        if not isinstance(values, list) or not values:
            raise ConfigValidationError("sweep needs a non-empty 'values' list", "sweep.values",
                                        _line_of(text, "sweep.values"))
        for value in values:
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not _finite(value):
                raise ConfigValidationError(f"sweep value {value!r} is not a finite number", "sweep.values",
                                            _line_of(text, "sweep.values"))
            if axis == "n" and (int(value) != value or value < 1):
                raise ConfigValidationError(f"level index {value!r} is not a positive integer",
                                            "sweep.values", _line_of(text, "sweep.values"))
    oracle = sweep_doc.get("oracle", False)
    if not isinstance(oracle, bool):
        raise ConfigValidationError("expected true or false", "sweep.oracle", _line_of(text, "sweep.oracle"))

    output_doc = document.get("output", {})
    output_format = output_doc.get("format", "csv")
    if output_format not in FORMATS:
        raise ConfigValidationError(f"format must be one of {', '.join(FORMATS)}", "output.format",
                                    _line_of(text, "output.format"))

    try:
        validate(params, config.t_final)
    except NonPositiveParameter as e:
        raise ConfigValidationError(str(e), e.name, _line_of(text, e.name)) from e
    except ParameterError as e:
        raise ConfigValidationError(str(e), "v", _line_of(text, "v")) from e

    return dataclasses.replace(config,
                               solver=SolverSettings(**solver),
                               sweep_axis=axis,
                               sweep_values=tuple(values),
                               sweep_oracle=oracle,
                               output_path=output_doc.get("path"),
                               output_format=output_format)


def _format(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _json_value(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render_csv(header: Sequence[str], rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(value) for value in row])
    return buffer.getvalue()


def render_json(document) -> str:
    def convert(value):
        if isinstance(value, dict):
            return {k: convert(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [convert(v) for v in value]
        return _json_value(value)
    return json.dumps(convert(document), indent=2) + "\n"


class Report:
    """Tabular result plus an optional summary, rendered the same way on
    every run."""

    def __init__(self, header, rows, summary=None):
        self.header = list(header)
        self.rows = [list(row) for row in rows]
        self.summary = summary

    def as_document(self):
        document = dict(self.summary or {})
        document["rows"] = [dict(zip(self.header, row)) for row in self.rows]
        return document


def analytic_report(config: RunConfig) -> Report:
    params = config.params
    frame = ScalingFrame.from_params(params)
    times = np.linspace(0.0, config.t_final, config.sample_count)

    tau = tau_of_t(frame, times)
    alpha = decay_exponent(params, config.n, times)
    survival = survival_probability(params, config.n, times)
    transition = nonadiabatic_probability(params, config.n, times)

    res = resonance_params(params, config.n)
    summary = {
        "mode": "analytic",
        "n": config.n,
        "v0_bar": res.v0_bar,
        "g": res.g,
        "h_sq": res.h_sq,
        "d_sq": res.d_sq,
        "delta_shift": res.delta_shift,
        "rate_analytic": decay_rate(params, config.n),
        "p_saturation": saturation_probability(params, config.n),
    }
    return Report(("t", "tau", "alpha", "p_survival", "p_nonadiabatic"),
                  zip(times, tau, alpha, survival, transition), summary)


def oracle_report(config: RunConfig) -> Report:
    curve = run_oracle(config.params, config.n, config.t_final, config.sample_count, config.solver)
    summary = {
        "mode": "oracle",
        "n": config.n,
        "u0_bar": curve.u0_bar,
        "rate_fit": curve.fitted_rate,
        "rate_pole": curve.pole_rate,
        "r_squared": curve.r_squared,
        "fit_window": list(curve.fit_window),
        "max_norm_drift": curve.max_norm_drift,
        "max_leak": curve.max_leak,
        "width": curve.width,
        "dt": curve.dt,
    }
    rows = [(s.t, s.tau, s.p_numeric, s.p_analytic) for s in curve.samples]
    return Report(("t", "tau", "p_numeric", "p_survival"), rows, summary)


def compare_report(config: RunConfig) -> Report:
    curve = run_oracle(config.params, config.n, config.t_final, config.sample_count, config.solver)

    times = np.array([s.t for s in curve.samples])
    alpha = decay_exponent(config.params, config.n, times)
    rows = [(s.t, s.tau, a, s.p_analytic, 1.0 - s.p_analytic, s.p_numeric)
            for s, a in zip(curve.samples, alpha)]
    summary = {
        "mode": "compare",
        "n": config.n,
        "u0_bar": curve.u0_bar,
        "rate_fit": curve.fitted_rate,
        "rate_analytic": curve.analytic_rate,
        "rate_pole": curve.pole_rate,
        "rel_err": curve.rel_err,
        "r_squared": curve.r_squared,
        "fit_window": list(curve.fit_window),
        "max_norm_drift": curve.max_norm_drift,
        "max_leak": curve.max_leak,
        "width": curve.width,
        "dt": curve.dt,
    }
    return Report(("t", "tau", "alpha", "p_survival", "p_nonadiabatic", "p_numeric"), rows, summary)


def sweep_point(config: RunConfig, value):
    """Headline scalars of one sweep value, in sweep column order."""
    if config.sweep_axis == "n":
        n, params = int(value), config.params
    else:
        n, params = config.n, config.params.replace(**{config.sweep_axis: float(value)})
    validate(params, config.t_final)

    res = resonance_params(params, n)
    if params.v > 0:
        p_saturation = saturation_probability(params, n)
    else:
        p_saturation = nonadiabatic_probability(params, n, config.t_final)
    row = [value, res.v0_bar, res.g, res.h_sq, res.d_sq, res.delta_shift,
           decay_rate(params, n), p_saturation]

    if config.sweep_oracle:
        curve = run_oracle(params, n, config.t_final, config.sample_count, config.solver)
        row += [curve.fitted_rate, curve.pole_rate, curve.rel_err]
    return row


class SweepRunner:
    """Evaluates sweep points on a bounded set of worker threads.

    Results come back in input order whatever order the workers finish in.
    """

    def __init__(self, config: RunConfig, jobs: int = 1):
        self.__config = config
        self.__jobs = max(1, int(jobs))
        self.__queue = queue.Queue()
        self.__lock = threading.Lock()
        self.__results = {}
        self.__errors = {}

    def run(self, values) -> List[list]:
        for item in enumerate(values):
            self.__queue.put(item)

        threads = [threading.Thread(target=self.work) for _ in range(min(self.__jobs, len(values)))]
        for thread in threads:
            self.__queue.put(None)
            thread.start()
        for thread in threads:
            thread.join()

        if self.__errors:
            raise self.__errors[min(self.__errors)]
        return [self.__results[i] for i in range(len(values))]

    def work(self):
        while True:
            item = self.__queue.get()
            if item is None:
                return
            index, value = item
            logger.info(f"sweep {self.__config.sweep_axis}={value}")
            try:
                row = sweep_point(self.__config, value)
            except DeltaDriftError as e:
                with self.__lock:
                    self.__errors[index] = e
                continue
            with self.__lock:
                self.__results[index] = row


def sweep_report(config: RunConfig, jobs: int = 1) -> Report:
    header = [config.sweep_axis, "v0_bar", "g", "h_sq", "d_sq", "delta_shift",
              "rate_analytic", "p_saturation"]
    if config.sweep_oracle:
        header += ["rate_fit", "rate_pole", "rel_err"]
    rows = SweepRunner(config, jobs).run(list(config.sweep_values))
    return Report(header, rows, {"mode": "sweep", "axis": config.sweep_axis})


def build_report(config: RunConfig, jobs: int = 1) -> Report:
    if config.mode == "analytic":
        return analytic_report(config)
    if config.mode == "oracle":
        return oracle_report(config)
    if config.mode == "compare":
        return compare_report(config)
    return sweep_report(config, jobs)


def _write(text: str, path: Optional[str], stream):
    if path is None:
        stream.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def error_record(error: DeltaDriftError) -> str:
    return json.dumps({
        "error": type(error).__name__,
        "message": str(error),
        "exit_code": error.exit_code,
        "key_path": getattr(error, "key_path", None),
        "line": getattr(error, "line", None),
    })


def run(config: RunConfig, jobs: int = 1, out: Optional[str] = None,
        stdout=None, stderr=None) -> int:
    """Execute ``config`` and write its report.

    :return: the process exit code
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    path = out if out is not None else config.output_path

    try:
        report = build_report(config, jobs)
    except DeltaDriftError as e:
        logger.error(str(e))
        stderr.write(error_record(e) + "\n")
        return e.exit_code

    if config.output_format == "json":
        _write(render_json(report.as_document()), path, stdout)
        return 0

    _write(render_csv(report.header, report.rows), path, stdout)
    if config.mode in ("compare", "oracle"):
        summary = render_json(report.summary)
        if path is None:
            stderr.write(summary)
        else:
            target = Path(path)
            _write(summary, str(target.with_name(f"{target.stem}.summary.json")), stdout)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="deltadrift")
    parser.add_argument("mode", choices=MODES, help="What to run")
    parser.add_argument("-c", "--config", required=True, help="JSON run configuration")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="Override a configuration key (repeatable)")
    parser.add_argument("-o", "--out", default=None, help="Output file (default: stdout)")
    parser.add_argument("-j", "--jobs", type=int, default=1, help="Concurrent sweep points")
    parser.add_argument("-v", "--verbose", default=False, action="store_true",
                        help="Log every step")
    args = parser.parse_args(argv)

    level = logging.INFO if args.mode != "analytic" else logging.WARNING
    logging.basicConfig(format="[%(module)-12s] %(message)s",
                        level=logging.DEBUG if args.verbose else level)

    try:
        with open(args.config, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        error = ParseError(f"cannot read configuration: {e.strerror}", key_path=None)
        sys.stderr.write(error_record(error) + "\n")
        return error.exit_code

    try:
        config = parse_config(text, args.overrides, mode=args.mode)
    except DeltaDriftError as e:
        logger.error(str(e))
        sys.stderr.write(error_record(e) + "\n")
        return e.exit_code

    return run(config, jobs=args.jobs, out=args.out)


if __name__ == '__main__':
    sys.exit(main())

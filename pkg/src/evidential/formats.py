"""
JSON, CSV and text-table encodings for frames, mass functions, evidence,
meta-level distributions and experiment reports.

Machine formats (JSON, CSV) carry 12 significant digits; text tables round
to 4 decimals and are for reading only.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .belief import MassFunction, bel, pl, validate_mass
from .errors import FormatError
from .experiment import ComparisonReport, DieScenario, sensor_constraints
from .frame import Frame, Refining, make_frame, make_refining
from .metaprob import EvidenceRecord, LinearConstraint, MetaDistribution, SimplexGrid, build_grid

SIG_DIGITS = 12
TABLE_DECIMALS = 4


def num(x: float) -> float | int:
    """Round to 12 significant digits for machine output."""
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    return float(f"{float(x):.{SIG_DIGITS}g}")


def num_str(x: float) -> str:
    return f"{float(x):.{SIG_DIGITS}g}"


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _require(obj: Any, key: str, kind: type | tuple[type, ...], where: str) -> Any:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected a JSON object")
    if key not in obj:
        raise FormatError(f"{where}: missing key {key!r}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, kind):
        raise FormatError(f"{where}: {key!r} has the wrong type ({type(value).__name__})")
    return value


def _label_list(value: Any, where: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, (str, int)) and not isinstance(x, bool) for x in value):
        raise FormatError(f"{where}: expected a list of outcome labels")
    return [str(x) for x in value]


# -- frames and mass functions ---------------------------------------------

def frame_from_json(value: Any, where: str = "frame") -> Frame:
    return make_frame(_label_list(value, where))


def mass_to_json(m: MassFunction, conflict: float | None = None) -> dict:
    out = {
        "frame": list(m.frame.labels),
        "masses": {a.key(): num(v) for a, v in m.items()},
    }
    if conflict is not None:
        out["conflict"] = num(conflict)
    return out


def mass_from_json(obj: Any) -> MassFunction:
    frame = frame_from_json(_require(obj, "frame", list, "mass function"))
    masses = _require(obj, "masses", dict, "mass function")
    raw = {}
    for key, value in masses.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise FormatError(f"mass function: value for {key!r} is not a number")
        subset = frame.parse_key(key)
        raw[subset] = raw.get(subset, 0.0) + value
    return validate_mass(frame, raw)


def bel_table_to_json(m: MassFunction) -> dict:
    rows = []
    for a in m.frame.all_subsets():
        rows.append({"subset": a.key(), "m": num(m.mass(a)), "bel": num(bel(m, a)), "pl": num(pl(m, a))})
    return {"frame": list(m.frame.labels), "table": rows}


def refining_from_json(obj: Any, coarse: Frame | None = None, fine: Frame | None = None) -> Refining:
    """Accepts ``{coarse_label: [fine_labels]}`` or ``{"coarse", "fine", "images"}``.

    Without an explicit fine frame, its labels are the images' labels in
    natural sort order (numeric labels numerically).
    """
    if not isinstance(obj, dict):
        raise FormatError("refining: expected a JSON object")
    if "images" in obj:
        images = _require(obj, "images", dict, "refining")
        if "coarse" in obj:
            coarse = frame_from_json(obj["coarse"], "refining coarse frame")
        if "fine" in obj:
            fine = frame_from_json(obj["fine"], "refining fine frame")
    else:
        images = obj
    images = {str(k): _label_list(v, f"refining image of {k!r}") for k, v in images.items()}
    if coarse is None:
        coarse = make_frame(list(images))
    if fine is None:
        labels = {x for image in images.values() for x in image}
        fine = make_frame(sorted(labels, key=natural_key))
    return make_refining(coarse, fine, images)


def natural_key(label: str):
    return (0, int(label), label) if label.isdigit() else (1, 0, label)


# -- metaprobability --------------------------------------------------------

def evidence_from_json(obj: Any, frame: Frame) -> list[EvidenceRecord]:
    if isinstance(obj, dict) and "evidence" in obj:
        obj = obj["evidence"]
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise FormatError("evidence: expected a record or a list of records")
    records = []
    for i, item in enumerate(obj):
        where = f"evidence record {i}"
        event = frame.subset(_label_list(_require(item, "event", list, where), where))
        successes = _require(item, "successes", int, where)
        trials = _require(item, "trials", int, where)
        records.append(EvidenceRecord(event, successes, trials))
    return records


def evidence_to_json(records: Iterable[EvidenceRecord]) -> list[dict]:
    return [{"event": list(r.event.labels), "successes": r.successes, "trials": r.trials} for r in records]


def parse_fraction(value: Any, where: str) -> Fraction:
    try:
        if isinstance(value, bool):
            raise TypeError
        if isinstance(value, float):
            return Fraction(repr(value)).limit_denominator(10**9)
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise FormatError(f"{where}: {value!r} is not a rational number") from None


def constraints_from_json(obj: Any, frame: Frame) -> list[LinearConstraint]:
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise FormatError("constraints: expected a constraint or a list of constraints")
    out = []
    for i, item in enumerate(obj):
        where = f"constraint {i}"
        subset = frame.subset(_label_list(_require(item, "subset", list, where), where))
        if "target" not in item:
            raise FormatError(f"{where}: missing key 'target'")
        out.append(LinearConstraint(subset, parse_fraction(item["target"], where)))
    return out


def constraints_to_json(constraints: Iterable[LinearConstraint]) -> list[dict]:
    return [{"subset": list(c.subset.labels), "target": str(c.target)} for c in constraints]


def grid_to_json(grid: SimplexGrid, indices: Sequence[int] | None = None) -> dict:
    points = grid.points if indices is None else grid.points[list(indices)]
    return {
        "frame": list(grid.outcomes.labels),
        "d": grid.denominator,
        "count": len(points),
        "points": points.tolist(),
    }


def metadist_to_json(md: MetaDistribution, support_only: bool = False) -> dict:
    idx = md.support() if support_only else range(len(md.grid))
    return {
        "frame": list(md.grid.outcomes.labels),
        "d": md.grid.denominator,
        "points": [md.grid.points[i].tolist() for i in idx],
        "weights": [num(md.weights[i]) for i in idx],
    }


def metadist_from_json(obj: Any) -> MetaDistribution:
    """Inverse of :func:`metadist_to_json`; omitted points get weight 0."""
    frame = frame_from_json(_require(obj, "frame", list, "meta-distribution"))
    d = _require(obj, "d", int, "meta-distribution")
    points = _require(obj, "points", list, "meta-distribution")
    weights = _require(obj, "weights", list, "meta-distribution")
    if len(points) != len(weights):
        raise FormatError("meta-distribution: points and weights differ in length")
    grid = build_grid(frame, d)
    dense = [0.0] * len(grid)
    for point, w in zip(points, weights):
        dense[grid.index(point)] = float(w)
    total = sum(dense)
    # 12-digit output does not sum to exactly 1
    return MetaDistribution(grid, [w / total for w in dense])


def metadist_csv_rows(md: MetaDistribution, indices: Iterable[int] | None = None) -> list[list[str]]:
    labels = list(md.grid.outcomes.labels)
    rows = [[f"k_{x}" for x in labels] + ["weight"]]
    idx = range(len(md.grid)) if indices is None else indices
    for i in idx:
        rows.append([str(k) for k in md.grid.points[i].tolist()] + [num_str(md.weights[i])])
    return rows


def to_csv(rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


# -- scenario and report ----------------------------------------------------

SCENARIO_KEYS = {"N", "d", "epsilon", "mode", "seed", "true_die"}


def scenario_from_json(obj: Any) -> DieScenario:
    if not isinstance(obj, dict):
        raise FormatError("scenario: expected a JSON object")
    unknown = set(obj) - SCENARIO_KEYS
    if unknown:
        raise FormatError(f"scenario: unknown keys {sorted(unknown)}")
    kwargs = dict(obj)
    if "epsilon" in kwargs and kwargs["epsilon"] is not None:
        if isinstance(kwargs["epsilon"], bool) or not isinstance(kwargs["epsilon"], (int, float)):
            raise FormatError("scenario: epsilon must be a number")
        kwargs["epsilon"] = float(kwargs["epsilon"])
    if "true_die" in kwargs:
        kwargs["true_die"] = tuple(kwargs["true_die"])
    try:
        return DieScenario(**kwargs)
    except TypeError as exc:
        raise FormatError(f"scenario: {exc}") from None


def report_to_json(report: ComparisonReport) -> dict:
    mp, ds = report.metaprob, report.ds
    grid = mp.posterior.grid
    prov = report.scenario.provenance()
    prov["effective_epsilon"] = num(prov["effective_epsilon"])
    prov["true_die"] = [num(p) for p in prov["true_die"]]
    return {
        "scenario": prov,
        "metaprob": {
            "grid_points": len(grid),
            "evidence": evidence_to_json(mp.evidence),
            "support_size": mp.summary.support_size,
            "expected": [num(x) for x in mp.summary.expected],
            "top": [{"point": list(p), "weight": num(w)} for p, w in mp.summary.top],
            "constraints": constraints_to_json(sensor_constraints()),
            "constrained_count": int(len(mp.constrained)),
            "constrained_mass": num(mp.constrained_mass),
            "constrained_partition_p1_p3": {str(k): v for k, v in mp.constraint_partition().items()},
            "constrained_points": [
                {"point": grid.points[i].tolist(), "weight": num(mp.posterior.weights[i])}
                for i in mp.constrained
            ],
        },
        "ds": {
            "epsilon": num(ds.epsilon),
            "bpa_odd_even": mass_to_json(ds.bpa_odd_even),
            "bpa_large_small": mass_to_json(ds.bpa_large_small),
            "extended_odd_even": mass_to_json(ds.extended_odd_even),
            "extended_large_small": mass_to_json(ds.extended_large_small),
            "combined": mass_to_json(ds.combined, ds.conflict),
            "singletons": [{k: (num(v) if k != "outcome" else v) for k, v in r.items()} for r in ds.singleton_rows()],
            "focal_candidates": [{k: (num(v) if k != "subset" else v) for k, v in r.items()} for r in ds.focal_rows()],
        },
        "symmetry": {
            "ds_symmetric": report.ds_symmetric,
            "metaprob_symmetric": report.metaprob_symmetric,
            "metaprob_max_weight_difference": num(report.metaprob_symmetry_error),
        },
    }


def report_support_csv(report: ComparisonReport, constrained_only: bool = True) -> str:
    md = report.metaprob.posterior
    idx = report.metaprob.constrained if constrained_only else md.support()
    return to_csv(metadist_csv_rows(md, idx))


# -- text tables ------------------------------------------------------------

def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.{TABLE_DECIMALS}f}"
    return str(value)


def render_table(headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    line = lambda row: "  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(row) for row in cells)
    return "\n".join(out) + "\n"


def mass_table(m: MassFunction, conflict: float | None = None) -> str:
    rows = [(a.key(), v, bel(m, a), pl(m, a)) for a, v in m.items()]
    text = render_table(["subset", "m", "bel", "pl"], rows)
    if conflict is not None:
        text += f"conflict: {_cell(conflict)}\n"
    return text


def report_to_text(report: ComparisonReport) -> str:
    mp, ds, s = report.metaprob, report.ds, report.scenario
    parts = [
        f"die experiment: N={s.N} d={s.d} mode={s.mode} seed={s.seed} epsilon={_cell(ds.epsilon)}",
        "",
        "metaprobability (uniform prior)",
        f"  grid points:         {len(mp.posterior.grid)}",
        f"  posterior support:   {mp.summary.support_size}",
        f"  constrained points:  {len(mp.constrained)}",
        f"  mass on constrained: {_cell(mp.constrained_mass)}",
        "  expected p:          " + " ".join(_cell(x) for x in mp.summary.expected),
        "",
        render_table(["p(1)+p(3)", "points"], [(str(k), v) for k, v in mp.constraint_partition().items()]),
        "dempster-shafer (combined)",
        render_table(
            ["subset", "m", "closed form", "bel", "pl"],
            [(r["subset"], r["m"], r["m_closed_form"], r["bel"], r["pl"]) for r in ds.focal_rows()],
        ),
        f"conflict: {_cell(ds.conflict)}",
        "",
        render_table(
            ["outcome", "bel", "pl", "bel (1st order)", "pl (1st order)"],
            [(r["outcome"], r["bel"], r["pl"], r["bel_first_order"], r["pl_first_order"]) for r in ds.singleton_rows()],
        ),
        f"symmetric under 1<->4, 2<->5, 3<->6: dempster-shafer {_cell(report.ds_symmetric)}, "
        f"metaprobability {_cell(report.metaprob_symmetric)}",
    ]
    return "\n".join(parts) + "\n"

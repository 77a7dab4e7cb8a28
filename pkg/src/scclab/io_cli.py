"""File formats, count-based estimation, and the command-line front end.

External artifacts are label-based (bitmasks never leak into files) and
probabilities travel as strings — "num/den" or a bare integer for exact
values, a decimal/exponent literal for float values — because JSON numbers
cannot carry rationals.  Serialization is canonical: sorted keys, menus and
collections in ascending mask order, zero rows omitted.  Identical inputs
therefore produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence

from .axioms import (
    WITNESS_CAP,
    AxiomId,
    AxiomReport,
    Witness,
    full_battery,
    run_axiom,
)
from .classify import HOLDS, ClassificationReport, classify
from .core import (
    DEFAULT_TOL,
    MixedFormatError,
    PreconditionFailedError,
    Prob,
    SCC,
    SchemaError,
    ScclabError,
    ShapeError,
    ToleranceConfig,
    Universe,
    ZeroTotalMenuError,
    is_positive,
    validate_scc,
)
from .fuzz import ALL_VARIANTS, FuzzSummary, fuzz_characterization, fuzz_relationships
from .identify import (
    RecoveryResult,
    identify_ic,
    identify_logit,
    identify_nsc,
    identify_rcg,
    identify_rrm,
)
from .models import (
    ARParams,
    ArAttribute,
    Aspect,
    EBAParams,
    ICParams,
    LogitParams,
    ModelSpec,
    ModelTag,
    NSCParams,
    NestedLogitParams,
    RCGParams,
    RRMParams,
    generate_scc,
    menu_row,
)

# ---------------------------------------------------------------------------
# probability literals


def parse_prob_literal(text: str) -> tuple[Prob, bool]:
    """Parse a probability string into ``(value, is_exact)``.

    "num/den" and bare integers are exact; any literal containing a decimal
    point or exponent is a float.  Everything else is a schema error.
    """
    token = text.strip()
    try:
        if "/" in token:
            return Fraction(token), True
        if any(c in token for c in ".eE"):
            return float(token), False
        return Fraction(int(token)), True
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"invalid probability literal {text!r}: {exc}") from None


def format_prob(value: Prob) -> str:
    if isinstance(value, Fraction):
        return str(value)
    # repr of a float always carries a '.' or exponent, so it parses back
    # into float mode
    return repr(float(value))


# ---------------------------------------------------------------------------
# SCC documents


def _require_type(value: Any, kind: type, context: str) -> Any:
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SchemaError(f"{context}: expected {kind.__name__}")
    return value


def _mask_from_labels(
    universe: Universe, labels: Any, context: str, allow_empty: bool = True
) -> int:
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        raise SchemaError(f"{context}: expected a list of label strings")
    try:
        mask = universe.mask_of(labels)
    except ShapeError as exc:
        raise SchemaError(f"{context}: {exc}") from None
    if mask == 0 and not allow_empty:
        raise SchemaError(f"{context}: must be non-empty")
    return mask


def parse_scc(document: Any, tol: ToleranceConfig = DEFAULT_TOL) -> SCC:
    """Build an SCC from a parsed JSON document.

    The SCC is exact iff every probability is rational-formatted; mixing
    rational and decimal literals in one document is rejected.  The result
    must pass validation, otherwise the violation list is reported as a
    schema error.
    """
    _require_type(document, dict, "document")
    if "items" not in document:
        raise SchemaError("document: missing 'items'")
    items = document["items"]
    if not isinstance(items, list) or not all(isinstance(s, str) for s in items):
        raise SchemaError("items: expected a list of label strings")
    try:
        universe = Universe.from_labels(items)
    except ShapeError as exc:
        raise SchemaError(f"items: {exc}") from None
    allows_empty = document.get("allows_empty", False)
    if not isinstance(allows_empty, bool):
        raise SchemaError("allows_empty: expected a boolean")
    menus_field = _require_type(document.get("menus", []), list, "menus")

    rows: dict[int, dict[int, Prob]] = {}
    saw_exact = saw_float = False
    for mi, entry in enumerate(menus_field):
        context = f"menus[{mi}]"
        _require_type(entry, dict, context)
        menu = _mask_from_labels(
            universe, entry.get("menu"), f"{context}.menu", allow_empty=False
        )
        if menu in rows:
            raise SchemaError(f"{context}: duplicate menu {universe.labels_of(menu)}")
        row: dict[int, Prob] = {}
        for ri, cell in enumerate(entry.get("rows", [])):
            cell_context = f"{context}.rows[{ri}]"
            _require_type(cell, dict, cell_context)
            collection = _mask_from_labels(
                universe, cell.get("set"), f"{cell_context}.set"
            )
            if collection in row:
                raise SchemaError(
                    f"{cell_context}: duplicate set {universe.labels_of(collection)}"
                )
            literal = cell.get("p")
            if not isinstance(literal, str):
                raise SchemaError(f"{cell_context}.p: expected a string")
            value, exact = parse_prob_literal(literal)
            saw_exact |= exact
            saw_float |= not exact
            row[collection] = value
        rows[menu] = row
    if saw_exact and saw_float:
        raise MixedFormatError(
            "document mixes rational and decimal probability literals"
        )

    scc = SCC(universe, rows, allows_empty=allows_empty, exact=not saw_float)
    violations = validate_scc(scc, tol)
    if violations:
        details = "; ".join(
            f"[{v.property_id}] menu {universe.labels_of(v.menu)}: {v.detail}"
            for v in violations[:5]
        )
        raise SchemaError(f"dataset fails validation ({len(violations)} issue(s)): {details}")
    return scc


def scc_to_document(scc: SCC, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Canonical JSON document for an SCC (zero rows omitted)."""
    universe = scc.universe
    menus = []
    for menu in scc.menus():
        cells = [
            {"set": list(universe.labels_of(t)), "p": format_prob(v)}
            for t, v in sorted(scc.rows[menu].items())
            if is_positive(scc, v, tol)
        ]
        menus.append({"menu": list(universe.labels_of(menu)), "rows": cells})
    return {
        "items": list(universe.items),
        "allows_empty": scc.allows_empty,
        "menus": menus,
    }


# ---------------------------------------------------------------------------
# parameter documents


def _collection_key(universe: Universe, mask: int) -> str:
    return ",".join(universe.labels_of(mask))


def _mask_from_key(universe: Universe, key: str, context: str) -> int:
    labels = [s for s in (part.strip() for part in key.split(",")) if s]
    try:
        return universe.mask_of(labels)
    except ShapeError as exc:
        raise SchemaError(f"{context}[{key!r}]: {exc}") from None


def _prob_map(universe: Universe, field: Any, context: str) -> dict[int, Prob]:
    _require_type(field, dict, context)
    out = {}
    for key, literal in field.items():
        if not isinstance(literal, str):
            raise SchemaError(f"{context}[{key!r}]: expected a string literal")
        out[_mask_from_key(universe, key, context)] = parse_prob_literal(literal)[0]
    return out


def _item_prob_map(universe: Universe, field: Any, context: str) -> dict[int, Prob]:
    """Like _prob_map but keyed by item index instead of mask."""
    by_mask = _prob_map(universe, field, context)
    out = {}
    for mask, value in by_mask.items():
        if mask.bit_count() != 1:
            raise SchemaError(f"{context}: keys must be single items")
        out[mask.bit_length() - 1] = value
    return out


def parse_params(document: Any) -> tuple[ModelSpec, Universe]:
    """Build a validated ModelSpec (and its universe) from a JSON document."""
    _require_type(document, dict, "document")
    for field in ("model", "items", "params"):
        if field not in document:
            raise SchemaError(f"document: missing {field!r}")
    try:
        model = ModelTag(_require_type(document["model"], str, "model"))
    except ValueError:
        raise SchemaError(f"model: unknown tag {document['model']!r}") from None
    items = document["items"]
    if not isinstance(items, list) or not all(isinstance(s, str) for s in items):
        raise SchemaError("items: expected a list of label strings")
    try:
        universe = Universe.from_labels(items)
    except ShapeError as exc:
        raise SchemaError(f"items: {exc}") from None
    empty_variant = document.get("empty_variant", False)
    if not isinstance(empty_variant, bool):
        raise SchemaError("empty_variant: expected a boolean")
    body = _require_type(document["params"], dict, "params")

    if model is ModelTag.LOGIT:
        weights = _prob_map(universe, body.get("weights", {}), "params.weights")
        literal = body.get("empty_weight")
        empty_weight = (
            parse_prob_literal(_require_type(literal, str, "params.empty_weight"))[0]
            if literal is not None
            else None
        )
        params: Any = LogitParams(weights, empty_weight)
    elif model is ModelTag.RCG:
        params = RCGParams(_prob_map(universe, body.get("mass", {}), "params.mass"))
    elif model is ModelTag.IC:
        params = ICParams(
            _item_prob_map(universe, body.get("inclusion", {}), "params.inclusion")
        )
    elif model in (ModelTag.EBA, ModelTag.AR):
        attrs_field = _require_type(
            body.get("attributes", []), list, "params.attributes"
        )
        attrs = []
        for ai, raw in enumerate(attrs_field):
            context = f"params.attributes[{ai}]"
            _require_type(raw, dict, context)
            weight = parse_prob_literal(
                _require_type(raw.get("weight"), str, f"{context}.weight")
            )[0]
            carrier = _mask_from_labels(
                universe, raw.get("carrier"), f"{context}.carrier", allow_empty=False
            )
            if model is ModelTag.EBA:
                attrs.append(Aspect(weight, carrier))
            else:
                values_field = _require_type(
                    raw.get("item_values", {}), dict, f"{context}.item_values"
                )
                values = {}
                for key, v in values_field.items():
                    if not isinstance(v, int) or isinstance(v, bool):
                        raise SchemaError(
                            f"{context}.item_values[{key!r}]: expected an integer"
                        )
                    mask = _mask_from_key(universe, key, f"{context}.item_values")
                    if mask.bit_count() != 1:
                        raise SchemaError(
                            f"{context}.item_values: keys must be single items"
                        )
                    values[mask.bit_length() - 1] = v
                attrs.append(ArAttribute(weight, carrier, values))
        params = (
            EBAParams(tuple(attrs)) if model is ModelTag.EBA else ARParams(tuple(attrs))
        )
    elif model is ModelTag.RRM:
        salience = _item_prob_map(
            universe, body.get("salience", {}), "params.salience"
        )
        constraints_field = _require_type(
            body.get("constraints", {}), dict, "params.constraints"
        )
        constraints = {}
        for key, labels in constraints_field.items():
            mask = _mask_from_key(universe, key, "params.constraints")
            if mask.bit_count() != 1:
                raise SchemaError("params.constraints: keys must be single items")
            constraints[mask.bit_length() - 1] = _mask_from_labels(
                universe, labels, f"params.constraints[{key!r}]"
            )
        params = RRMParams(salience, constraints)
    elif model in (ModelTag.NSC, ModelTag.NESTED_LOGIT):
        nests_field = _require_type(body.get("nests", []), list, "params.nests")
        nests = tuple(
            sorted(
                _mask_from_labels(
                    universe, nest, f"params.nests[{ni}]", allow_empty=False
                )
                for ni, nest in enumerate(nests_field)
            )
        )
        if model is ModelTag.NSC:
            params = NSCParams(
                nests,
                _prob_map(
                    universe, body.get("nest_weights", {}), "params.nest_weights"
                ),
            )
        else:
            exps_field = _require_type(
                body.get("exponents", []), list, "params.exponents"
            )
            exponents = tuple(
                parse_prob_literal(
                    _require_type(e, str, f"params.exponents[{ei}]")
                )[0]
                for ei, e in enumerate(exps_field)
            )
            params = NestedLogitParams(
                nests,
                _item_prob_map(
                    universe, body.get("utilities", {}), "params.utilities"
                ),
                exponents,
            )
    else:  # pragma: no cover - ModelTag is closed
        raise SchemaError(f"model: unknown tag {model!r}")

    spec = ModelSpec(model, params, empty_variant)
    spec.validate(universe)
    return spec, universe


def params_to_document(spec: ModelSpec, universe: Universe) -> dict:
    """Canonical JSON document for a parameter bundle."""
    p = spec.params
    key = lambda mask: _collection_key(universe, mask)
    if spec.model is ModelTag.LOGIT:
        body: dict[str, Any] = {
            "weights": {key(t): format_prob(w) for t, w in sorted(p.weights.items())}
        }
        if p.empty_weight is not None:
            body["empty_weight"] = format_prob(p.empty_weight)
    elif spec.model is ModelTag.RCG:
        body = {"mass": {key(c): format_prob(m) for c, m in sorted(p.mass.items())}}
    elif spec.model is ModelTag.IC:
        body = {
            "inclusion": {
                key(1 << x): format_prob(g) for x, g in sorted(p.inclusion.items())
            }
        }
    elif spec.model is ModelTag.EBA:
        body = {
            "attributes": [
                {"weight": format_prob(a.weight), "carrier": list(universe.labels_of(a.carrier))}
                for a in p.attributes
            ]
        }
    elif spec.model is ModelTag.AR:
        body = {
            "attributes": [
                {
                    "weight": format_prob(a.weight),
                    "carrier": list(universe.labels_of(a.carrier)),
                    "item_values": {
                        key(1 << x): v for x, v in sorted(a.item_values.items())
                    },
                }
                for a in p.attributes
            ]
        }
    elif spec.model is ModelTag.RRM:
        body = {
            "salience": {
                key(1 << x): format_prob(s) for x, s in sorted(p.salience.items())
            },
            "constraints": {
                key(1 << x): list(universe.labels_of(q))
                for x, q in sorted(p.constraints.items())
            },
        }
    elif spec.model is ModelTag.NSC:
        body = {
            "nests": [list(universe.labels_of(nest)) for nest in p.nests],
            "nest_weights": {
                key(t): format_prob(w) for t, w in sorted(p.nest_weights.items())
            },
        }
    else:
        body = {
            "nests": [list(universe.labels_of(nest)) for nest in p.nests],
            "utilities": {
                key(1 << x): format_prob(v) for x, v in sorted(p.utilities.items())
            },
            "exponents": [format_prob(e) for e in p.exponents],
        }
    return {
        "model": spec.model.value,
        "items": list(universe.items),
        "empty_variant": spec.empty_variant,
        "params": body,
    }


# ---------------------------------------------------------------------------
# report serialization


def witness_to_json(witness: Witness, universe: Universe) -> dict:
    return {
        "axiom": witness.axiom.value,
        "bindings": {
            name: list(universe.labels_of(mask))
            for name, mask in sorted(witness.bindings.items())
        },
        "lhs": None if witness.lhs is None else format_prob(witness.lhs),
        "rhs": None if witness.rhs is None else format_prob(witness.rhs),
    }


def report_to_json(report: AxiomReport, universe: Universe) -> dict:
    return {
        "axiom": report.axiom.value,
        "holds": report.holds,
        "witnesses": [witness_to_json(w, universe) for w in report.witnesses],
        "instances_checked": report.instances_checked,
        "instances_vacuous": report.instances_vacuous,
        "mode": report.arithmetic_mode,
    }


def classification_to_json(report: ClassificationReport) -> dict:
    return {
        "membership": {
            name: {
                "status": verdict.status,
                "failing_axioms": [a.value for a in verdict.failing_axioms],
            }
            for name, verdict in report.membership.items()
        },
        "special": dict(report.special),
        "relationship_violations": list(report.relationship_violations),
        "assumption_flags": list(report.assumption_flags),
    }


def recovery_to_json(result: RecoveryResult, universe: Universe) -> dict:
    document = params_to_document(result.model_spec, universe)
    document["round_trip_exact"] = result.round_trip_exact
    document["normalization_note"] = result.normalization_note
    return document


def summary_to_json(summary: FuzzSummary) -> dict:
    return {
        "suite": summary.suite,
        "trials": summary.trials,
        "ok": summary.ok,
        "failures": [
            {
                "seed": f.seed,
                "model": f.model,
                "n": f.n,
                "empty_variant": f.empty_variant,
                "stage": f.stage,
                "detail": f.detail,
            }
            for f in summary.failures
        ],
    }


# ---------------------------------------------------------------------------
# counts tables


@dataclass(frozen=True)
class CountsTable:
    """Accumulated observation counts per (menu, collection) pair.

    The universe is inferred from the labels appearing in menus; duplicate
    rows accumulate.
    """

    universe: Universe
    counts: dict[tuple[int, int], int]


def parse_counts(text: str) -> CountsTable:
    """Parse a `menu;set;count` CSV (fields are comma-separated label lists)."""
    reader = csv.reader(io.StringIO(text), delimiter=";")
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("counts table is empty") from None
    if [h.strip() for h in header] != ["menu", "set", "count"]:
        raise SchemaError("counts table must start with header 'menu;set;count'")

    raw: list[tuple[list[str], list[str], int]] = []
    labels: set[str] = set()
    for line_no, record in enumerate(reader, start=2):
        if not record or (len(record) == 1 and not record[0].strip()):
            continue
        if len(record) != 3:
            raise SchemaError(f"line {line_no}: expected 3 fields, got {len(record)}")
        menu_labels = [s for s in (p.strip() for p in record[0].split(",")) if s]
        set_labels = [s for s in (p.strip() for p in record[1].split(",")) if s]
        if not menu_labels:
            raise SchemaError(f"line {line_no}: menu must be non-empty")
        try:
            count = int(record[2].strip())
        except ValueError:
            raise SchemaError(
                f"line {line_no}: count must be an integer, got {record[2]!r}"
            ) from None
        if count < 0:
            raise SchemaError(f"line {line_no}: count must be non-negative")
        labels.update(menu_labels)
        raw.append((menu_labels, set_labels, count))

    universe = Universe.from_labels(sorted(labels))
    counts: dict[tuple[int, int], int] = {}
    for line_no_offset, (menu_labels, set_labels, count) in enumerate(raw):
        try:
            menu = universe.mask_of(menu_labels)
            collection = universe.mask_of(set_labels)
        except ShapeError as exc:
            raise SchemaError(f"counts row {line_no_offset + 1}: {exc}") from None
        if collection & ~menu:
            raise SchemaError(
                f"counts row {line_no_offset + 1}: set "
                f"{universe.labels_of(collection)} is not contained in menu "
                f"{universe.labels_of(menu)}"
            )
        key = (menu, collection)
        counts[key] = counts.get(key, 0) + count
    return CountsTable(universe, counts)


def estimate_from_counts(table: CountsTable) -> SCC:
    """Per-menu frequencies as a float-mode SCC.

    Menus absent from the table are absent from the SCC; a menu whose counts
    sum to zero is an error.  The empty collection is allowed iff some row
    mentions it.
    """
    totals: dict[int, int] = {}
    for (menu, _), count in table.counts.items():
        totals[menu] = totals.get(menu, 0) + count
    for menu, total in sorted(totals.items()):
        if total == 0:
            raise ZeroTotalMenuError(
                f"menu {table.universe.labels_of(menu)} has zero total count"
            )
    allows_empty = any(collection == 0 for (_, collection) in table.counts)
    rows: dict[int, dict[int, Prob]] = {menu: {} for menu in totals}
    for (menu, collection), count in table.counts.items():
        if count > 0:
            rows[menu][collection] = count / totals[menu]
    return SCC(table.universe, rows, allows_empty=allows_empty, exact=False)


# ---------------------------------------------------------------------------
# command-line front end

_EXIT_OK = 0
_EXIT_FINDINGS = 1
_EXIT_USAGE = 2


def _emit(payload: Any, output: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output and output != "-":
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from None


def _labels_from_arg(text: str) -> list[str]:
    return [s for s in (part.strip() for part in text.split(",")) if s]


def _tolerance(args: argparse.Namespace) -> ToleranceConfig:
    tol = getattr(args, "tol", None)
    if tol is None:
        return DEFAULT_TOL
    return ToleranceConfig(eps_eq=tol)


def _parse_axiom_list(text: str) -> list[AxiomId]:
    out = []
    for token in _labels_from_arg(text):
        try:
            out.append(AxiomId(token.upper()))
        except ValueError:
            raise SchemaError(f"unknown axiom {token!r}") from None
    if not out:
        raise SchemaError("no axioms requested")
    return out


def _parse_variant(token: str) -> tuple[ModelTag, bool]:
    name, empty = (token[:-2], True) if token.endswith("_o") else (token, False)
    try:
        return ModelTag(name), empty
    except ValueError:
        raise SchemaError(f"unknown model tag {token!r}") from None


def _cmd_gen(args: argparse.Namespace) -> int:
    spec, universe = parse_params(_load_json(args.params))
    if args.model is not None:
        tag, flagged_empty = _parse_variant(args.model)
        if tag is not spec.model:
            raise SchemaError(
                f"--model {args.model} disagrees with params file "
                f"({spec.model.value})"
            )
        if flagged_empty:
            args.empty = True
    if args.empty and not spec.empty_variant:
        spec = ModelSpec(spec.model, spec.params, empty_variant=True)
        spec.validate(universe)
    scc = generate_scc(spec, universe)
    _emit(scc_to_document(scc), args.output)
    return _EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    spec, universe = parse_params(_load_json(args.params))
    menu = universe.mask_of(_labels_from_arg(args.menu))
    if menu == 0:
        raise SchemaError("--menu must be non-empty")
    row = menu_row(spec, menu)
    if args.collection is None:
        payload: Any = {
            "menu": list(universe.labels_of(menu)),
            "rows": [
                {"set": list(universe.labels_of(t)), "p": format_prob(v)}
                for t, v in sorted(row.items())
            ],
        }
    else:
        collection = universe.mask_of(_labels_from_arg(args.collection))
        if collection & ~menu:
            raise SchemaError("--set must be contained in --menu")
        if collection == 0 and not spec.empty_variant:
            raise SchemaError(
                "--set may be empty only for an empty-collection variant"
            )
        zero: Prob = Fraction(0) if spec.is_exact() else 0.0
        payload = {
            "menu": list(universe.labels_of(menu)),
            "set": list(universe.labels_of(collection)),
            "p": format_prob(row.get(collection, zero)),
        }
    _emit(payload, args.output)
    return _EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    tol = _tolerance(args)
    scc = parse_scc(_load_json(args.scc), tol)
    if args.axioms.strip().lower() == "all":
        reports = full_battery(scc, tol, cap=args.witness_cap)
    else:
        reports = [
            run_axiom(scc, axiom, tol=tol, cap=args.witness_cap)
            for axiom in _parse_axiom_list(args.axioms)
        ]
    _emit({"reports": [report_to_json(r, scc.universe) for r in reports]}, args.output)
    return _EXIT_OK if all(r.holds for r in reports) else _EXIT_FINDINGS


_IDENTIFY_ROUTES = {
    "logit": identify_logit,
    "rcg": identify_rcg,
    "ic": identify_ic,
    "eba": identify_rcg,
    "ar": identify_rcg,
    "rrm": identify_rrm,
    "nsc": identify_nsc,
    "nested_logit": identify_nsc,
}

_AUTO_ORDER = ("logit", "rcg", "ic", "rrm", "nsc")


def _cmd_identify(args: argparse.Namespace) -> int:
    tol = _tolerance(args)
    scc = parse_scc(_load_json(args.scc), tol)
    token = args.model.strip().lower()
    if token == "auto":
        attempts = []
        for name in _AUTO_ORDER:
            try:
                result = _IDENTIFY_ROUTES[name](scc, tol=tol)
            except ScclabError as exc:
                attempts.append({"model": name, "error": str(exc)})
                continue
            payload = recovery_to_json(result, scc.universe)
            payload["identified"] = True
            _emit(payload, args.output)
            return _EXIT_OK
        _emit({"identified": False, "attempts": attempts}, args.output)
        return _EXIT_FINDINGS
    if token not in _IDENTIFY_ROUTES and token not in ("logit_o", "rcg_o", "ic_o"):
        raise SchemaError(f"unknown identification target {args.model!r}")
    try:
        if token in ("logit_o", "rcg_o", "ic_o"):
            result = _IDENTIFY_ROUTES[token[:-2]](scc, empty_variant=True, tol=tol)
        else:
            result = _IDENTIFY_ROUTES[token](scc, tol=tol)
    except PreconditionFailedError as exc:
        payload = {"identified": False, "error": str(exc)}
        if exc.report is not None:
            payload["precondition"] = report_to_json(exc.report, scc.universe)
        _emit(payload, args.output)
        return _EXIT_FINDINGS
    payload = recovery_to_json(result, scc.universe)
    payload["identified"] = True
    _emit(payload, args.output)
    return _EXIT_OK


def _cmd_classify(args: argparse.Namespace) -> int:
    tol = _tolerance(args)
    scc = parse_scc(_load_json(args.scc), tol)
    report = classify(scc, tol=tol)
    _emit(classification_to_json(report), args.output)
    any_membership = any(v.status == HOLDS for v in report.membership.values())
    ok = any_membership and not report.relationship_violations
    return _EXIT_OK if ok else _EXIT_FINDINGS


def _cmd_fuzz(args: argparse.Namespace) -> int:
    n_values = [int(tok) for tok in _labels_from_arg(args.n)]
    if not n_values:
        raise SchemaError("--n must list at least one universe size")
    token = args.model.strip().lower()
    summaries: list[FuzzSummary] = []
    if token == "all":
        for index, (model, empty) in enumerate(ALL_VARIANTS):
            summaries.append(
                fuzz_characterization(
                    model, args.trials, n_values, args.seed + index,
                    empty_variant=empty,
                )
            )
        summaries.append(
            fuzz_relationships(args.trials, n_values, args.seed + len(ALL_VARIANTS))
        )
    elif token == "relationships":
        summaries.append(fuzz_relationships(args.trials, n_values, args.seed))
    else:
        model, empty = _parse_variant(token)
        summaries.append(
            fuzz_characterization(
                model, args.trials, n_values, args.seed, empty_variant=empty
            )
        )
    _emit({"summaries": [summary_to_json(s) for s in summaries]}, args.output)
    return _EXIT_OK if all(s.ok for s in summaries) else _EXIT_FINDINGS


def _cmd_estimate(args: argparse.Namespace) -> int:
    with open(args.counts, "r", encoding="utf-8") as handle:
        table = parse_counts(handle.read())
    scc = estimate_from_counts(table)
    _emit(scc_to_document(scc), args.output)
    return _EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scclab",
        description=(
            "Exact laboratory for stochastic choice correspondences: generate "
            "model datasets, check axioms, recover parameters, classify."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an SCC from a parameter bundle")
    gen.add_argument("--model", help="model tag (cross-checked against the file)")
    gen.add_argument("--params", required=True, help="parameter JSON file")
    gen.add_argument("--empty", action="store_true",
                     help="use the empty-collection variant")
    gen.add_argument("-o", "--output", help="output file (default stdout)")

    ev = sub.add_parser("eval", help="evaluate one menu row or one probability")
    ev.add_argument("--params", required=True, help="parameter JSON file")
    ev.add_argument("--menu", required=True, help="comma-separated labels")
    ev.add_argument("--set", dest="collection", help="comma-separated labels")
    ev.add_argument("-o", "--output")

    check = sub.add_parser("check", help="run axiom checks on a dataset")
    check.add_argument("scc", help="SCC JSON file")
    check.add_argument("--axioms", required=True,
                       help="comma-separated axiom ids, or 'all'")
    check.add_argument("--tol", type=float, help="equality tolerance (float mode)")
    check.add_argument("--witness-cap", type=int, default=WITNESS_CAP)
    check.add_argument("-o", "--output")

    ident = sub.add_parser("identify", help="recover model parameters")
    ident.add_argument("scc", help="SCC JSON file")
    ident.add_argument("--model", required=True, help="model tag or 'auto'")
    ident.add_argument("--tol", type=float)
    ident.add_argument("-o", "--output")

    cls = sub.add_parser("classify", help="full membership classification")
    cls.add_argument("scc", help="SCC JSON file")
    cls.add_argument("--tol", type=float)
    cls.add_argument("-o", "--output")

    fz = sub.add_parser("fuzz", help="seeded property sweeps")
    fz.add_argument("--model", required=True,
                    help="model tag, tag_o, 'relationships', or 'all'")
    fz.add_argument("--trials", type=int, required=True)
    fz.add_argument("--n", default="3,4", help="comma-separated universe sizes")
    fz.add_argument("--seed", type=int, required=True)
    fz.add_argument("-o", "--output")

    est = sub.add_parser("estimate", help="frequencies from a counts CSV")
    est.add_argument("counts", help="counts CSV file (menu;set;count)")
    est.add_argument("-o", "--output")

    return parser


_DISPATCH = {
    "gen": _cmd_gen,
    "eval": _cmd_eval,
    "check": _cmd_check,
    "identify": _cmd_identify,
    "classify": _cmd_classify,
    "fuzz": _cmd_fuzz,
    "estimate": _cmd_estimate,
}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else _EXIT_USAGE
    try:
        return _DISPATCH[args.command](args)
    except ScclabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

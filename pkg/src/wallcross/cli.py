"""Command line front end.

    wallcross <command> [--input FILE] [--max-height D] [--output FILE|-]
                        [--format json|csv] [--seed N] [--suite NAME] [--force]

Exit status is 0 on success, 1 when an identity check fails and 2 when the
input is rejected.  Errors are printed as ``{"error", "detail", "location"}``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import jsonschema

from . import identities
from .coha import coha_hilbert
from .errors import WallcrossError
from .lattice import GroupElement, LieSeries, TruncationCone, compose, make_lattice, standard_cone
from .qtorus import quantum_dilog
from .stability import GlnPath, StabilityData, gln_events, gln_transport, qform_check, support_check
from .wcf import CentralCharge, OrderedFactorization, assemble, factorize, refactorize, standard_charge, t_gamma

SCHEMA_VERSION = "1"
MAX_HEIGHT_LIMIT = 64

# --------------------------------------------------------------------------
# schemas

_RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*-?\d+)?\s*$"}]}
_VECTOR = {"type": "array", "items": {"type": "integer"}, "minItems": 1}
_GAUSSIAN = {"type": "object", "properties": {"re": _RATIONAL, "im": _RATIONAL},
             "required": ["re", "im"], "additionalProperties": False}
_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}, "minItems": 1}
_RMATRIX = {"type": "array", "items": {"type": "array", "items": _RATIONAL}, "minItems": 1}
_LATTICE = {"type": "object", "properties": {"gram": _MATRIX}, "required": ["gram"], "additionalProperties": False}
_CONE = {"type": "object", "properties": {"generators": {"type": "array", "items": _VECTOR, "minItems": 1},
                                          "height": _VECTOR},
         "required": ["generators", "height"], "additionalProperties": False}
_CHARGE = {"type": "array", "items": _GAUSSIAN, "minItems": 1}
_OMEGA = {"type": "array", "items": {"type": "object", "properties": {"gamma": _VECTOR, "omega": _RATIONAL},
                                     "required": ["gamma", "omega"], "additionalProperties": False}}
_LOG = {"type": "array", "items": {"type": "object", "properties": {"gamma": _VECTOR, "coeff": _RATIONAL},
                                   "required": ["gamma", "coeff"], "additionalProperties": False}}
_FACTORS = {"type": "array", "items": {"type": "object", "properties": {"gamma": _VECTOR, "exponent": _RATIONAL},
                                       "required": ["gamma"], "additionalProperties": False}}


def _doc(kind, props, required=()):
    kinds = kind if isinstance(kind, list) else [kind]
    return {
        "type": "object",
        "properties": {"schema_version": {"const": SCHEMA_VERSION}, "kind": {"enum": kinds}, **props},
        "required": ["schema_version", "kind", *required],
        "additionalProperties": False,
    }


SCHEMAS = {
    "factorize": _doc("factorize", {"lattice": _LATTICE, "cone": _CONE, "charge": _CHARGE,
                                    "factors": _FACTORS, "log": _LOG}, ["lattice"]),
    "wcf": _doc(["wcf", "factorization"], {"lattice": _LATTICE, "cone": _CONE, "charge": _CHARGE, "omega": _OMEGA,
                                           "target_charge": _CHARGE, "log": _LOG,
                                           "max_height": {"type": "integer", "minimum": 1}},
                ["lattice", "omega"]),
    "identity": _doc("identity", {"suite": {"type": "string"}}),
    "qdilog": _doc("qdilog", {"lattice": _LATTICE, "cone": _CONE, "gamma": _VECTOR}, ["lattice", "gamma"]),
    "coha-hilbert": _doc("coha-hilbert", {
        "d": {"type": "integer", "minimum": 0}, "n_max": {"type": "integer", "minimum": 0, "maximum": 6},
        "max_degree": {"type": "integer", "minimum": 0},
        "m_window": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}}, ["d", "n_max"]),
    "gln-walk": _doc("gln-walk", {"a": _RMATRIX,
                                  "waypoints": {"type": "array", "items": {"type": "array", "items": _GAUSSIAN},
                                                "minItems": 1}}, ["a", "waypoints"]),
    "support-check": _doc("support-check", {"lattice": _LATTICE, "charge": _CHARGE, "omega": _OMEGA, "C": _RATIONAL,
                                            "qform": _RMATRIX}, ["lattice", "charge", "omega", "C"]),
}


class UsageError(Exception):
    def __init__(self, code, detail, location=None):
        super().__init__(detail)
        self.payload = {"error": code, "detail": detail, "location": location}


class IdentityFailure(Exception):
    def __init__(self, result):
        super().__init__("identity check failed")
        self.result = result


# --------------------------------------------------------------------------
# (de)serialization


def rat(x) -> str:
    return str(Fraction(x))


def parse_rat(x) -> Fraction:
    return Fraction(str(x).replace(" ", ""))


def _gauss_out(z) -> dict:
    return {"re": rat(z[0]), "im": rat(z[1])}


def _charge_in(items) -> CentralCharge:
    return CentralCharge(tuple((parse_rat(z["re"]), parse_rat(z["im"])) for z in items))


def _charge_out(c: CentralCharge) -> list:
    return [_gauss_out(z) for z in c.values]


def _lattice_in(doc):
    gram = doc["lattice"]["gram"]
    return make_lattice(len(gram), gram)


def _cone_in(doc, lattice, D) -> TruncationCone:
    if "cone" not in doc:
        return standard_cone(lattice, D)
    c = doc["cone"]
    return TruncationCone(lattice, tuple(tuple(g) for g in c["generators"]), tuple(c["height"]), D)


def _cone_out(cone: TruncationCone) -> dict:
    return {"generators": [list(g) for g in cone.generators], "height": list(cone.height)}


def _default_charge(doc, lattice):
    if "charge" in doc:
        return _charge_in(doc["charge"])
    if lattice.rank != 2:
        raise UsageError("missing_field", "a central charge is required unless the lattice has rank 2", ["charge"])
    return standard_charge()


def _sorted_keys(cone, keys):
    return sorted(keys, key=lambda g: (cone.height_of(g), tuple(g)))


def omega_out(cone, table: dict) -> list:
    return [{"gamma": list(g), "omega": rat(table[g])} for g in _sorted_keys(cone, table)]


def omega_in(items) -> dict:
    out = {}
    for it in items:
        g = tuple(it["gamma"])
        out[g] = out.get(g, Fraction(0)) + parse_rat(it["omega"])
    return out


def log_out(h) -> list:
    return [{"gamma": list(g), "coeff": rat(c)} for g, c in h.items()]


def _log_in(cone, items) -> LieSeries:
    terms = {}
    for it in items:
        g = tuple(it["gamma"])
        terms[g] = terms.get(g, Fraction(0)) + parse_rat(it["coeff"])
    return LieSeries(cone, terms)


# --------------------------------------------------------------------------
# commands


def cmd_factorize(doc, args):
    lattice = _lattice_in(doc)
    D = _height(args, doc)
    cone = _cone_in(doc, lattice, D)
    charge = _default_charge(doc, lattice)
    if ("factors" in doc) == ("log" in doc):
        raise UsageError("bad_input", "give exactly one of 'factors' or 'log'", [])
    if "factors" in doc:
        elems = [t_gamma(cone, tuple(f["gamma"]), parse_rat(f.get("exponent", 1))) for f in doc["factors"]]
        F = compose(*elems) if elems else GroupElement.identity(cone)
    else:
        F = GroupElement(cone, log=_log_in(cone, doc["log"]))
    fact = factorize(F, charge, cone)
    table = fact.omega_table()
    result = {
        "schema_version": SCHEMA_VERSION,
        "kind": "factorization",
        "max_height": D,
        "lattice": {"gram": [list(r) for r in lattice.gram]},
        "cone": _cone_out(cone),
        "charge": _charge_out(charge),
        "omega": omega_out(cone, table),
        "log": log_out(F.log),
    }
    return result, ("omega", ["gamma", "omega"], [[_vec(g), rat(table[g])] for g in _sorted_keys(cone, table)])


def cmd_wcf(doc, args):
    lattice = _lattice_in(doc)
    D = _height(args, doc)
    cone = _cone_in(doc, lattice, D)
    charge = _default_charge(doc, lattice)
    omega = {g: w for g, w in omega_in(doc["omega"]).items() if cone.height_of(g) <= D}
    fact = OrderedFactorization.from_omega(charge, cone, omega)
    F = assemble(fact)
    result = {
        "schema_version": SCHEMA_VERSION,
        "kind": "wcf-result",
        "max_height": D,
        "rays": [list(f.gamma0) for f in fact.factors],
        "log": log_out(F.log),
    }
    rows = [[_vec(g), rat(c)] for g, c in F.log.items()]
    table = ("log", ["gamma", "coeff"], rows)
    failed = False
    if "log" in doc:
        match = _log_in(cone, doc["log"]) == F.log
        result["matches_log"] = match
        failed = not match
    if "target_charge" in doc:
        new = refactorize(fact, _charge_in(doc["target_charge"]))
        nt = new.omega_table()
        result["target_omega"] = omega_out(cone, nt)
        table = ("target_omega", ["gamma", "omega"], [[_vec(g), rat(nt[g])] for g in _sorted_keys(cone, nt)])
    if failed:
        result["first_counterexample"] = _first_log_mismatch(_log_in(cone, doc["log"]), F.log)
        raise IdentityFailure(result)
    return result, table


def _first_log_mismatch(a, b):
    h = a.cone.height_of
    for k in sorted(set(a.terms) | set(b.terms), key=lambda v: (h(v), v)):
        if a[k] != b[k]:
            return {"gamma": list(k), "expected": rat(a[k]), "assembled": rat(b[k])}
    return None


def cmd_identity(doc, args):
    suite = args.suite or (doc or {}).get("suite")
    if suite is None:
        raise UsageError("missing_field", "choose a suite with --suite", ["suite"])
    D = _height(args, doc or {})
    if suite == "integrality":
        rep = identities.integrality(args.seed if args.seed is not None else 0, D=D)
    elif suite in identities.SUITES:
        rep = identities.SUITES[suite](D)
    else:
        choices = sorted([*identities.SUITES, "integrality"])
        raise UsageError("unknown_suite", f"unknown suite {suite!r}; choose from {choices}", ["suite"])
    result = {
        "schema_version": SCHEMA_VERSION,
        "kind": "identity-report",
        "suite": rep.suite,
        "max_height": rep.max_height,
        "checked": rep.checked,
        "mismatches": rep.mismatches,
        "passed": rep.passed,
        "first_counterexample": rep.first_counterexample,
    }
    if args.seed is not None and suite == "integrality":
        result["seed"] = args.seed
    row = [rep.suite, rep.max_height, rep.checked, rep.mismatches, rep.passed]
    table = ("report", ["suite", "max_height", "checked", "mismatches", "passed"], [row])
    if not rep.passed:
        raise IdentityFailure(result)
    return result, table


def cmd_qdilog(doc, args):
    lattice = _lattice_in(doc)
    D = _height(args, doc)
    cone = _cone_in(doc, lattice, D)
    gamma = tuple(doc["gamma"])
    E = quantum_dilog(gamma, cone)
    terms = []
    rows = []
    for k, c in E.items():
        n = next((x // y for x, y in zip(k, gamma) if y), 0)
        num, den = c.coefficients()
        terms.append({"n": n, "gamma": list(k), "numerator": [rat(x) for x in num],
                      "denominator": [rat(x) for x in den], "pole_at_minus_one": c.has_pole_at(-1)})
        rows.append([n, _vec(k), str(c)])
    result = {"schema_version": SCHEMA_VERSION, "kind": "qdilog-result", "max_height": D, "variable": "t",
              "gamma": list(gamma), "terms": terms}
    return result, ("terms", ["n", "gamma", "coefficient"], rows)


def cmd_coha(doc, args):
    window = tuple(doc["m_window"]) if "m_window" in doc else None
    rows = coha_hilbert(doc["d"], doc["n_max"], doc.get("max_degree", 8), window)
    match = all(r["dim"] == r["series"] for r in rows)
    result = {"schema_version": SCHEMA_VERSION, "kind": "coha-hilbert-result", "d": doc["d"], "n_max": doc["n_max"],
              "rows": rows, "match": match}
    table = ("rows", ["n", "K", "m", "dim", "series"], [[r[c] for c in ("n", "K", "m", "dim", "series")] for r in rows])
    if not match:
        raise IdentityFailure(result)
    return result, table


def cmd_gln(doc, args):
    waypoints = [[(parse_rat(z["re"]), parse_rat(z["im"])) for z in w] for w in doc["waypoints"]]
    a = [[parse_rat(x) for x in row] for row in doc["a"]]
    path = GlnPath(tuple(tuple(w) for w in waypoints), a)
    events = gln_events(path)
    final = gln_transport(path)
    closed = path.is_closed
    trivial = final.a == path.a if closed else None
    result = {
        "schema_version": SCHEMA_VERSION,
        "kind": "gln-walk-result",
        "events": [{"segment": e.segment, "i": e.i, "j": e.j, "k": e.k, "direction": e.direction} for e in events],
        "final_a": [[rat(x) for x in row] for row in final.a],
        "closed": closed,
        "monodromy_trivial": trivial,
    }
    rows = [[e.segment, e.i, e.j, e.k, e.direction] for e in events]
    return result, ("events", ["segment", "i", "j", "k", "direction"], rows)


def cmd_support(doc, args):
    lattice = _lattice_in(doc)
    sd = StabilityData(lattice, _charge_in(doc["charge"]), omega_in(doc["omega"]),
                       tuple(tuple(parse_rat(x) for x in r) for r in doc["qform"]) if "qform" in doc else None)
    rep = support_check(sd, parse_rat(doc["C"]))
    verdicts = [{"gamma": list(g), "norm2": rat(n2), "bound": rat(b), "ok": ok} for g, n2, b, ok in rep.verdicts]
    result = {"schema_version": SCHEMA_VERSION, "kind": "support-check-result", "C": rat(rep.C),
              "passed": rep.passed, "verdicts": verdicts}
    if sd.qform is not None:
        q = qform_check(sd)
        result["qform"] = q
        result["passed"] = rep.passed and q["passed"]
    rows = [[_vec(v["gamma"]), v["norm2"], v["bound"], v["ok"]] for v in verdicts]
    return result, ("verdicts", ["gamma", "norm2", "bound", "ok"], rows)


COMMANDS = {
    "factorize": cmd_factorize,
    "wcf": cmd_wcf,
    "identity": cmd_identity,
    "qdilog": cmd_qdilog,
    "coha-hilbert": cmd_coha,
    "gln-walk": cmd_gln,
    "support-check": cmd_support,
}


# --------------------------------------------------------------------------
# plumbing


def _vec(g) -> str:
    return " ".join(str(x) for x in g)


def _height(args, doc) -> int:
    if args.max_height is not None:
        return args.max_height
    return doc.get("max_height", 10)


def _load(args, command):
    if args.input is None:
        if command == "identity":
            return None
        raise UsageError("missing_input", f"{command} needs --input", ["--input"])
    try:
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError("io_error", str(exc), [args.input]) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError("invalid_json", exc.msg, [exc.lineno, exc.colno]) from None
    validator = jsonschema.Draft202012Validator(SCHEMAS[command])
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise UsageError("schema_validation", e.message, list(e.absolute_path))
    return doc


def _csv(table) -> str:
    _, header, rows = table
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([str(x).lower() if isinstance(x, bool) else x for x in r])
    return buf.getvalue()


def _emit(text: str, target: str | None):
    if target in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wallcross", description="Exact wall-crossing computations.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", help="JSON problem file, or - for stdin")
    p.add_argument("--max-height", type=int, default=None, help="truncation height D (default 10)")
    p.add_argument("--output", default="-", help="output file, or - for stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized suites")
    p.add_argument("--suite", help="identity suite name")
    p.add_argument("--force", action="store_true", help=f"allow --max-height above {MAX_HEIGHT_LIMIT}")
    return p


def run(argv=None) -> tuple[int, str]:
    """Run one command; returns the exit status and the rendered output."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), ""

    def render(doc, table=None):
        if args.format == "csv" and table is not None:
            return _csv(table)
        return json.dumps(doc, indent=2) + "\n"

    try:
        if args.max_height is not None:
            if args.max_height < 1:
                raise UsageError("bad_max_height", "--max-height must be positive", ["--max-height"])
            if args.max_height > MAX_HEIGHT_LIMIT and not args.force:
                raise UsageError("max_height_too_large",
                                 f"--max-height above {MAX_HEIGHT_LIMIT} needs --force", ["--max-height"])
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise UsageError("bad_seed", "--seed must fit in an unsigned 64-bit integer", ["--seed"])
        doc = _load(args, args.command)
        if doc is not None and doc.get("max_height", 1) > MAX_HEIGHT_LIMIT and not args.force:
            raise UsageError("max_height_too_large", f"max_height above {MAX_HEIGHT_LIMIT} needs --force",
                             ["max_height"])
        result, table = COMMANDS[args.command](doc, args)
        return 0, render(result, table)
    except IdentityFailure as exc:
        return 1, render(exc.result)
    except UsageError as exc:
        return 2, json.dumps(exc.payload, indent=2) + "\n"
    except WallcrossError as exc:
        return 2, json.dumps(exc.as_dict(), indent=2, default=str) + "\n"
    except (ValueError, IndexError, ZeroDivisionError) as exc:
        return 2, json.dumps({"error": "invalid_input", "detail": str(exc), "location": None}, indent=2) + "\n"


def main(argv=None) -> int:
    code, text = run(argv)
    if code == 2:
        sys.stdout.write(text)
    else:
        _emit(text, _parse_output(argv))
    return code


def _parse_output(argv):
    try:
        return build_parser().parse_args(argv).output
    except SystemExit:
        return None


if __name__ == "__main__":
    sys.exit(main())

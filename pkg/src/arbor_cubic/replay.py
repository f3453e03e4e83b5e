"""Replay the worked examples against the bundled expectations file."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .arith import format_rational, parse_rational, val
from .certify import certify, certify_function_field, find_places, find_u
from .dynamics import CubicParams, collision_index, e_poly, e_values, orbit, resolvent
from .poly import format_poly, rational_roots

MATCH = "match"
MISMATCH = "MISMATCH"
DOCUMENTED = "documented-discrepancy"


def load_expectations() -> dict:
    text = resources.files("arbor_cubic").joinpath("data/examples.json").read_text()
    return json.loads(text)


def resolve_name(name: str, table: Optional[dict] = None) -> str:
    table = table or load_expectations()
    if name in table:
        return name
    for key, spec in table.items():
        if name in spec.get("aliases", []):
            return key
    raise KeyError(f"unknown example {name!r}; choose from {sorted(table)} or their aliases")


@dataclass
class ReplayLine:
    quantity: str
    kind: str
    expected: str
    computed: str
    status: str
    discrepancy: Optional[str] = None

    def to_json_obj(self) -> dict:
        out = {
            "quantity": self.quantity,
            "kind": self.kind,
            "expected": self.expected,
            "computed": self.computed,
            "status": self.status,
        }
        if self.discrepancy:
            out["discrepancy"] = self.discrepancy
        return out


def _compute_generic(inputs: dict, bound: int) -> dict[str, str]:
    params = CubicParams(parse_rational(inputs["A"]), parse_rational(inputs["B"]))
    ell, levels = inputs["ell"], inputs["levels"]
    data = orbit(params, levels)
    out = {"collision_index": str(collision_index(params))}
    for k in range(1, levels + 1):
        out[f"F{k}"] = format_rational(data.F[k])
        out[f"G{k}"] = format_rational(data.G[k])
    out["C1"] = format_rational(data.C[1])
    e1 = e_poly(data, 1)
    out["E1(t)"] = format_poly(e1, "t")
    out["disc E1(t)"] = format_rational(e1[1] ** 2 - 4 * e1[0])
    out["certificate"] = certify_function_field(params, ell, levels).conclusion
    return out


def _compute_rational(inputs: dict, bound: int) -> dict[str, str]:
    params = CubicParams(parse_rational(inputs["A"]), parse_rational(inputs["B"]))
    x0 = parse_rational(inputs["x0"])
    ell, levels = inputs["ell"], inputs["levels"]
    data = orbit(params, max(levels, ell))
    out = {}
    for n in range(1, levels + 1):
        e, tilde = e_values(params, data, x0, n)
        out[f"E{n}(x0)"] = format_rational(e)
        if tilde is not None:
            out[f"Et{n}(x0)"] = format_rational(tilde)
    u = find_u(params, x0, bound)
    out["u"] = "" if u is None else str(u)
    for n, found in find_places(params, x0, ell, levels, bound).items():
        out[f"places {n}"] = " ".join(map(str, found.passing))
    out["certificate"] = certify(params, x0, ell, levels, bound).conclusion
    out["C1 valuation at 11"] = str(val(11, data.C[1]))
    quartic = resolvent(params, x0, ell).quartic
    out["quartic"] = format_poly(quartic)
    out["quartic rational roots"] = " ".join(format_rational(r) for r in rational_roots(quartic))
    return out


def replay(name: str, bound: int = 2**128) -> tuple[str, list[ReplayLine]]:
    table = load_expectations()
    key = resolve_name(name, table)
    spec = table[key]
    inputs = spec["inputs"]
    computed = _compute_generic(inputs, bound) if inputs["x0"] == "t" else _compute_rational(inputs, bound)
    lines = []
    for entry in spec["entries"]:
        got = computed.get(entry["quantity"], "<not computed>")
        expected = entry["expected"]
        if got == expected:
            status = MATCH
        elif entry.get("discrepancy"):
            status = DOCUMENTED
        else:
            status = MISMATCH
        lines.append(ReplayLine(entry["quantity"], entry["kind"], expected, got, status, entry.get("discrepancy")))
    return key, lines


def replay_ok(lines: list[ReplayLine]) -> bool:
    return all(line.status != MISMATCH for line in lines)

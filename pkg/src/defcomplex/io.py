"""Problem files: JSON loading with eager validation, and canonical serialization.

Scalars are written as strings ("3", "-1/2") so that no float ever enters.
Errors split into :class:`InputError` (malformed or unresolvable input) and
:class:`ValidationError` (well-formed input that fails a mathematical check).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from itertools import product
from pathlib import Path
from typing import Any

from .algebra import (
    Algebra,
    EquivariantMorphism,
    GroupAction,
    GroupClosureError,
    check_action,
    check_associativity,
    check_morphism,
    close_actions,
    close_group,
    trivial_action,
)
from .deformation import DeformationTriple
from .equivalence import FormalIsomorphismPair
from .hochschild import Cochain, cochain_matrix, flat_index, linear_map_cochain
from .linalg import QQ, Field, Matrix, PrimeField
from .morphism import MorphismCochain, deformation_complex


class InputError(ValueError):
    """Malformed problem input: bad JSON, schema violation, unknown name."""


class ValidationError(ValueError):
    """Input that parses but violates a mathematical requirement."""


SECTIONS = ("algebras", "actions", "morphisms", "deformations", "pairs")


# ---------------------------------------------------------------------------
# scalars, fields, matrices, cochains


def parse_field(value) -> Field:
    """``"Q"`` or ``{"Fp": p}``; the CLI also accepts ``"F5"`` / ``"Fp:5"``."""
    if value in ("Q", "QQ"):
        return QQ
    p = None
    if isinstance(value, dict) and set(value) == {"Fp"}:
        p = value["Fp"]
    elif isinstance(value, str) and value.startswith("F"):
        p = value.lstrip("F").lstrip("p").lstrip(":")
    try:
        p = int(p)
    except (TypeError, ValueError):
        raise InputError(f"field: unrecognized field {value!r}") from None
    try:
        return PrimeField(p)
    except ValueError as exc:
        raise InputError(f"field: {exc}") from None


def field_to_json(f: Field):
    return f.to_json()


def _scalar(f: Field, x, where: str):
    try:
        return f.parse(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: {exc}") from None


def _need(obj: dict, key: str, where: str, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{where}: missing key {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise InputError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}")
    return val


def parse_matrix(f: Field, rows, nrows: int, ncols: int, where: str) -> Matrix:
    if not isinstance(rows, list) or len(rows) != nrows:
        raise InputError(f"{where}: expected {nrows} rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != ncols:
            raise InputError(f"{where}[{i}]: expected {ncols} entries")
        out.append([_scalar(f, x, f"{where}[{i}][{j}]") for j, x in enumerate(row)])
    return Matrix.from_rows(f, out, ncols)


def matrix_to_json(m: Matrix) -> list:
    return [[m.field.format(x) for x in row] for row in m.to_lists()]


def parse_cochain(algebra: Algebra, module, degree: int, obj, where: str) -> Cochain:
    """``{"degree": n, "entries": [[[i1..in], m, "c"], ...]}``; repeated entries add up."""
    f = algebra.field
    deg = _need(obj, "degree", where, int)
    if deg != degree:
        raise InputError(f"{where}.degree: expected {degree}, got {deg}")
    entries = _need(obj, "entries", where, list)
    values: dict = {}
    for e, item in enumerate(entries):
        loc = f"{where}.entries[{e}]"
        if not (isinstance(item, list) and len(item) == 3 and isinstance(item[0], list)):
            raise InputError(f"{loc}: expected [[indices], m, scalar]")
        t, m, c = item
        if len(t) != degree or any(not isinstance(x, int) or not 0 <= x < algebra.dim for x in t):
            raise InputError(f"{loc}: index tuple {t} out of range")
        if not isinstance(m, int) or not 0 <= m < module.dim:
            raise InputError(f"{loc}: output index {m} out of range")
        slot = values.setdefault(tuple(t), {})
        slot[m] = slot.get(m, f.zero) + _scalar(f, c, loc)
    return Cochain.from_values(algebra, module, degree, values)


def cochain_to_json(c: Cochain) -> dict:
    d, dm = c.algebra.dim, c.module.dim
    entries = []
    for t in product(range(d), repeat=c.degree):
        base = flat_index(t, d) * dm
        for m in range(dm):
            x = c.coeffs[base + m]
            if x:
                entries.append([list(t), m, c.field.format(x)])
    return {"degree": c.degree, "shape": [d, dm], "entries": entries}


def morphism_cochain_to_json(c: MorphismCochain) -> dict:
    return {"u": cochain_to_json(c.u), "v": cochain_to_json(c.v), "w": cochain_to_json(c.w)}


# ---------------------------------------------------------------------------
# the problem object


@dataclass
class Problem:
    field: Field
    algebras: dict = dc_field(default_factory=dict)
    actions: dict = dc_field(default_factory=dict)  # name -> (algebra name, [Matrix])
    morphisms: dict = dc_field(default_factory=dict)
    deformations: dict = dc_field(default_factory=dict)
    pairs: dict = dc_field(default_factory=dict)
    morphism_refs: dict = dc_field(default_factory=dict)  # name -> (source, target, source_action, target_action)
    deformation_refs: dict = dc_field(default_factory=dict)  # name -> morphism name
    pair_refs: dict = dc_field(default_factory=dict)

    def lookup(self, section: str, name: str):
        table = getattr(self, section)
        if name not in table:
            raise InputError(f"unknown {section[:-1]} {name!r}")
        return table[name]

    def closed_action(self, name: str | None, algebra: Algebra | None = None) -> GroupAction:
        """The group generated by a named action, or the trivial group when ``name`` is None."""
        if name is None:
            return trivial_action(algebra)
        alg_name, gens = self.lookup("actions", name)
        return close_group(self.algebras[alg_name], gens)


def _load_algebra(f: Field, name: str, obj) -> Algebra:
    where = f"algebras.{name}"
    dim = _need(obj, "dim", where, int)
    if dim < 1:
        raise InputError(f"{where}.dim: must be positive")
    basis = obj.get("basis") or [f"e{i}" for i in range(dim)]
    if not isinstance(basis, list) or len(basis) != dim:
        raise InputError(f"{where}.basis: expected {dim} labels")
    triples = []
    for e, item in enumerate(_need(obj, "structure", where, list)):
        loc = f"{where}.structure[{e}]"
        if not (isinstance(item, list) and len(item) == 4):
            raise InputError(f"{loc}: expected [i, j, k, scalar]")
        i, j, k, c = item
        for x in (i, j, k):
            if not isinstance(x, int) or not 0 <= x < dim:
                raise InputError(f"{loc}: index {x!r} out of range for dimension {dim}")
        triples.append((i, j, k, _scalar(f, c, loc)))
    alg = Algebra.from_triples(f, dim, triples, [str(b) for b in basis])
    report = check_associativity(alg)
    if not report.passed:
        raise ValidationError(f"algebra {name}: associativity fails at {tuple(report.violations[0])}")
    return alg


def _load_action(f: Field, algebras: dict, name: str, obj):
    where = f"actions.{name}"
    alg_name = _need(obj, "algebra", where, str)
    if alg_name not in algebras:
        raise InputError(f"{where}.algebra: unknown algebra {alg_name!r}")
    alg = algebras[alg_name]
    gens = []
    for g, rows in enumerate(_need(obj, "generators", where, list)):
        gens.append(parse_matrix(f, rows, alg.dim, alg.dim, f"{where}.generators[{g}]"))
    try:
        group = close_group(alg, gens)
    except GroupClosureError as exc:
        raise ValidationError(f"action {name}: {exc}") from None
    report = check_action(group)
    if not report.passed:
        raise ValidationError(f"action {name}: {report.violations[0][0]} fails at {tuple(report.violations[0][1:])}")
    return alg_name, gens


def _load_morphism(f: Field, prob: Problem, name: str, obj):
    where = f"morphisms.{name}"
    src = _need(obj, "source", where, str)
    tgt = _need(obj, "target", where, str)
    for key, ref in (("source", src), ("target", tgt)):
        if ref not in prob.algebras:
            raise InputError(f"{where}.{key}: unknown algebra {ref!r}")
    a, b = prob.algebras[src], prob.algebras[tgt]
    matrix = parse_matrix(f, _need(obj, "matrix", where), b.dim, a.dim, f"{where}.matrix")
    sa, ta = obj.get("source_action"), obj.get("target_action")
    if (sa is None) != (ta is None):
        raise InputError(f"{where}: give both source_action and target_action or neither")
    if sa is None:
        phi = EquivariantMorphism(a, b, matrix)
    else:
        for key, ref, alg_name in (("source_action", sa, src), ("target_action", ta, tgt)):
            if ref not in prob.actions:
                raise InputError(f"{where}.{key}: unknown action {ref!r}")
            if prob.actions[ref][0] != alg_name:
                raise InputError(f"{where}.{key}: action {ref!r} acts on {prob.actions[ref][0]!r}, not {alg_name!r}")
        gens_a, gens_b = prob.actions[sa][1], prob.actions[ta][1]
        if len(gens_a) != len(gens_b):
            raise InputError(f"{where}: actions {sa!r} and {ta!r} list different numbers of generators")
        try:
            act_a, act_b = close_actions([(a, gens_a), (b, gens_b)])
        except GroupClosureError as exc:
            raise ValidationError(f"morphism {name}: {exc}") from None
        phi = EquivariantMorphism(a, b, matrix, act_a, act_b)
    report = check_morphism(phi)
    if not report.passed:
        kind, *rest = report.violations[0]
        raise ValidationError(f"morphism {name}: {kind} fails at {tuple(rest)}")
    prob.morphism_refs[name] = (src, tgt, sa, ta)
    return phi


def _load_deformation(f: Field, prob: Problem, name: str, obj):
    where = f"deformations.{name}"
    mname = _need(obj, "morphism", where, str)
    if mname not in prob.morphisms:
        raise InputError(f"{where}.morphism: unknown morphism {mname!r}")
    phi = prob.morphisms[mname]
    order = _need(obj, "order", where, int)
    if order < 0:
        raise InputError(f"{where}.order: must be non-negative")
    cx = deformation_complex(phi)
    lists = {}
    for key in ("mu", "nu", "phi"):
        items = obj.get(key, [])
        if not isinstance(items, list) or len(items) > order:
            raise InputError(f"{where}.{key}: expected at most {order} coefficients")
        lists[key] = items
    mu, nu, ph = [], [], []
    for i in range(order):
        loc = f"{where}.mu[{i}]"
        mu.append(parse_cochain(cx.A, cx.mod_A, 2, lists["mu"][i], loc) if i < len(lists["mu"]) else Cochain.zero(cx.A, cx.mod_A, 2))
        loc = f"{where}.nu[{i}]"
        nu.append(parse_cochain(cx.B, cx.mod_B, 2, lists["nu"][i], loc) if i < len(lists["nu"]) else Cochain.zero(cx.B, cx.mod_B, 2))
        if i < len(lists["phi"]):
            m = parse_matrix(f, lists["phi"][i], cx.B.dim, cx.A.dim, f"{where}.phi[{i}]")
            ph.append(linear_map_cochain(cx.A, cx.mod_AB, m))
        else:
            ph.append(Cochain.zero(cx.A, cx.mod_AB, 1))
    d = DeformationTriple(phi, tuple(mu), tuple(nu), tuple(ph))
    for i, c in enumerate(d.coefficients(), start=1):
        if not cx.is_invariant(c):
            raise ValidationError(f"deformation {name}: coefficient of order {i} is not invariant")
    prob.deformation_refs[name] = mname
    return d


def _load_pair(f: Field, prob: Problem, name: str, obj):
    where = f"pairs.{name}"
    mname = _need(obj, "morphism", where, str)
    if mname not in prob.morphisms:
        raise InputError(f"{where}.morphism: unknown morphism {mname!r}")
    phi = prob.morphisms[mname]
    order = _need(obj, "order", where, int)
    a, b = phi.source.dim, phi.target.dim
    series = {}
    for key, dim in (("psi", a), ("theta", b)):
        items = _need(obj, key, where, list)
        if len(items) not in (order, order + 1):
            raise InputError(f"{where}.{key}: expected {order} or {order + 1} matrices")
        mats = [parse_matrix(f, rows, dim, dim, f"{where}.{key}[{i}]") for i, rows in enumerate(items)]
        if len(mats) == order:
            mats.insert(0, Matrix.identity(f, dim))
        elif mats[0] != Matrix.identity(f, dim):
            raise ValidationError(f"pair {name}: {key}[0] must be the identity")
        series[key] = tuple(mats)
    pair = FormalIsomorphismPair(series["psi"], series["theta"])
    if not pair.is_equivariant(phi):
        raise ValidationError(f"pair {name}: coefficients are not equivariant")
    prob.pair_refs[name] = mname
    return pair


def load_dict(data: Any, field_override: Field | None = None) -> Problem:
    if not isinstance(data, dict):
        raise InputError("problem: top level must be an object")
    unknown = set(data) - set(SECTIONS) - {"field"}
    if unknown:
        raise InputError(f"problem: unknown top-level keys {sorted(unknown)}")
    f = field_override or parse_field(_need(data, "field", "problem"))
    for sec in SECTIONS:
        if not isinstance(data.get(sec, {}), dict):
            raise InputError(f"{sec}: expected an object keyed by name")
    prob = Problem(f)
    for name, obj in data.get("algebras", {}).items():
        prob.algebras[name] = _load_algebra(f, name, obj)
    for name, obj in data.get("actions", {}).items():
        prob.actions[name] = _load_action(f, prob.algebras, name, obj)
    for name, obj in data.get("morphisms", {}).items():
        prob.morphisms[name] = _load_morphism(f, prob, name, obj)
    for name, obj in data.get("deformations", {}).items():
        prob.deformations[name] = _load_deformation(f, prob, name, obj)
    for name, obj in data.get("pairs", {}).items():
        prob.pairs[name] = _load_pair(f, prob, name, obj)
    return prob


def load(path, field_override: Field | None = None) -> Problem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return load_dict(data, field_override)


# ---------------------------------------------------------------------------
# serialization


def deformation_to_json(d: DeformationTriple, morphism_name: str) -> dict:
    return {
        "morphism": morphism_name,
        "order": d.order,
        "mu": [cochain_to_json(c) for c in d.mu],
        "nu": [cochain_to_json(c) for c in d.nu],
        "phi": [matrix_to_json(cochain_matrix(c)) for c in d.phi],
    }


def pair_to_json(p: FormalIsomorphismPair, morphism_name: str) -> dict:
    return {
        "morphism": morphism_name,
        "order": p.order,
        "psi": [matrix_to_json(m) for m in p.psi],
        "theta": [matrix_to_json(m) for m in p.theta],
    }


def dump_dict(prob: Problem) -> dict:
    out: dict = {"field": field_to_json(prob.field)}
    out["algebras"] = {
        name: {
            "dim": a.dim,
            "basis": list(a.basis_names),
            "structure": [[i, j, k, prob.field.format(c)] for i, j, k, c in a.triples()],
        }
        for name, a in prob.algebras.items()
    }
    out["actions"] = {
        name: {"algebra": alg, "generators": [matrix_to_json(g) for g in gens]}
        for name, (alg, gens) in prob.actions.items()
    }
    morphisms = {}
    for name, phi in prob.morphisms.items():
        src, tgt, sa, ta = prob.morphism_refs[name]
        rec = {"source": src, "target": tgt, "matrix": matrix_to_json(phi.matrix)}
        if sa is not None:
            rec["source_action"], rec["target_action"] = sa, ta
        morphisms[name] = rec
    out["morphisms"] = morphisms
    out["deformations"] = {
        name: deformation_to_json(d, prob.deformation_refs[name]) for name, d in prob.deformations.items()
    }
    out["pairs"] = {name: pair_to_json(p, prob.pair_refs[name]) for name, p in prob.pairs.items()}
    return out


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save(prob: Problem, path) -> None:
    Path(path).write_text(canonical_json(dump_dict(prob)))


def content_hash(obj) -> str:
    """sha256 of the canonical JSON text of ``obj``."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()

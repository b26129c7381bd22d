"""Command-line entry point: ``defcomplex <command> --problem file.json ...``.

Every command prints one JSON report envelope.  Exit codes: 0 pass,
1 validation failure, 2 a mathematically meaningful negative (obstructed,
not a coboundary, not equivalent), 3 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .deformation import (
    DeformationTriple,
    NotVerifiedError,
    build_from_infinitesimal,
    extend_one_order,
    obstruction,
    verify,
)
from .equivalence import conjugate, infinitesimal_class_compare, is_equivalence, rigidity_report, trivialize
from .hochschild import equivariant_cohomology, num_coords
from .io import (
    InputError,
    Problem,
    ValidationError,
    canonical_json,
    cochain_to_json,
    content_hash,
    deformation_to_json,
    dump_dict,
    load,
    morphism_cochain_to_json,
    pair_to_json,
    parse_field,
)
from .linalg import membership
from .morphism import deformation_complex, vanishing_check

SCHEMA = "defcomplex/1"
WARN_COORDS = 10**5
MAX_COORDS = 10**6

EXIT_PASS, EXIT_FAIL, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2, 3
STATUS_EXIT = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "obstructed": EXIT_NEGATIVE}


class Outcome:
    def __init__(self, results: dict, status: str = "pass", diagnostics=()):
        self.results = results
        self.status = status
        self.diagnostics = list(diagnostics)


# ---------------------------------------------------------------------------
# helpers


def _degrees(text: str | None, default: int) -> list[int]:
    if text is None:
        return [default]
    try:
        out = sorted({int(x) for x in str(text).split(",") if x.strip()})
    except ValueError:
        raise InputError(f"--degree: expected an integer or a comma list, got {text!r}") from None
    if not out or out[0] < 0:
        raise InputError("--degree: degrees must be non-negative")
    return out


def _require(args, name: str) -> str:
    value = getattr(args, name)
    if value is None:
        raise InputError(f"--{name.replace('_', '-')} is required for {args.command}")
    return value


def _size_guard(count: int, diagnostics: list, what: str):
    if count > MAX_COORDS:
        raise InputError(f"{what} needs {count} coordinates, above the hard limit {MAX_COORDS}")
    if count > WARN_COORDS:
        diagnostics.append(f"warning: {what} needs {count} coordinates")


def _map(fn, items, threads: int):
    """``[fn(x) for x in items]``, concurrently when ``threads > 1``; order is preserved."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _morphism_name(prob: Problem, args) -> str:
    name = _require(args, "morphism")
    prob.lookup("morphisms", name)
    return name


def _deformation(prob: Problem, name: str) -> DeformationTriple:
    return prob.lookup("deformations", name)


def _cohomology_json(res, to_json) -> dict:
    out = res.summary()
    out["representatives"] = [to_json(r) for r in res.representatives]
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_validate(prob: Problem, args) -> Outcome:
    # loading has already checked every structural invariant; report what was checked
    deformations = {}
    diagnostics = []
    status = "pass"
    for name, d in prob.deformations.items():
        rep = verify(d)
        deformations[name] = {"order": d.order, "verified_to": rep.verified_to}
        if not rep.passed:
            status = "fail"
            diagnostics.append(f"deformation {name}: equations fail at order {rep.first_failure()}")
    results = {
        "algebras": {name: {"dim": a.dim, "associative": True} for name, a in prob.algebras.items()},
        "actions": {name: {"algebra": alg, "order": prob.closed_action(name).order} for name, (alg, _) in prob.actions.items()},
        "morphisms": {
            name: {"multiplicative": True, "equivariant": True, "group_order": phi.source_action.order}
            for name, phi in prob.morphisms.items()
        },
        "deformations": deformations,
        "pairs": {name: {"order": p.order, "equivariant": True} for name, p in prob.pairs.items()},
    }
    return Outcome(results, status, diagnostics)


def cmd_cohomology(prob: Problem, args) -> Outcome:
    coeff = args.coefficients or "self"
    if coeff == "self":
        alg = prob.lookup("algebras", _require(args, "algebra"))
        if args.action is not None and prob.lookup("actions", args.action)[0] != args.algebra:
            raise InputError(f"action {args.action!r} does not act on algebra {args.algebra!r}")
        act = prob.closed_action(args.action, alg)
        module, mod_act = alg.as_bimodule(), None
    else:
        phi = prob.lookup("morphisms", coeff)
        if args.algebra is not None and prob.algebras.get(args.algebra) != phi.source:
            raise InputError(f"--algebra {args.algebra!r} is not the source of morphism {coeff!r}")
        cx = deformation_complex(phi)
        alg, module, act, mod_act = cx.A, cx.mod_AB, cx.act_A, cx.act_B
    degrees = _degrees(args.degree, 2)
    diagnostics: list = []
    for n in degrees:
        _size_guard(num_coords(alg.dim, module.dim, n + 1), diagnostics, f"degree {n}")
    found = _map(lambda n: equivariant_cohomology(alg, module, n, act, mod_act), degrees, args.threads)
    results = {
        "algebra": args.algebra if coeff == "self" else None,
        "action": args.action if coeff == "self" else None,
        "coefficients": coeff,
        "group_order": act.order,
        "degrees": [_cohomology_json(r, cochain_to_json) for r in found],
    }
    return Outcome(results, "pass", diagnostics)


def cmd_morphism_cohomology(prob: Problem, args) -> Outcome:
    name = _morphism_name(prob, args)
    cx = deformation_complex(prob.morphisms[name])
    degrees = _degrees(args.degree, 2)
    if degrees[0] < 1:
        raise InputError("--degree: the morphism complex starts in degree 1")
    diagnostics: list = []
    for n in degrees:
        _size_guard(sum(cx.block_sizes(n + 1)), diagnostics, f"degree {n}")
    found = _map(cx.cohomology, degrees, args.threads)
    results = {"morphism": name, "degrees": [_cohomology_json(r, morphism_cochain_to_json) for r in found]}
    return Outcome(results, "pass", diagnostics)


def cmd_vanishing_check(prob: Problem, args) -> Outcome:
    name = _morphism_name(prob, args)
    phi = prob.morphisms[name]
    degrees = _degrees(args.degree, 2)
    if degrees[0] < 2:
        raise InputError("--degree: the vanishing criterion needs degree >= 2")
    diagnostics: list = []
    cx = deformation_complex(phi)
    for n in degrees:
        _size_guard(sum(cx.block_sizes(n + 1)), diagnostics, f"degree {n}")
    reports = _map(lambda n: vanishing_check(phi, n), degrees, args.threads)
    status = "pass" if all(r.consistent for r in reports) else "fail"
    return Outcome({"morphism": name, "degrees": [r.as_dict() for r in reports]}, status, diagnostics)


def cmd_verify_deformation(prob: Problem, args) -> Outcome:
    name = _require(args, "deformation")
    d = _deformation(prob, name)
    r_max = d.order if args.max_order is None else args.max_order
    if not 0 <= r_max <= d.order:
        raise InputError(f"--max-order must lie in [0, {d.order}]")
    rep = verify(d, r_max)
    results = {"deformation": name, **rep.as_dict()}
    if rep.passed:
        return Outcome(results)
    return Outcome(results, "fail", [f"deformation {name}: equations fail at order {rep.first_failure()}"])


def _not_verified(name: str, exc: Exception) -> Outcome:
    return Outcome({"deformation": name}, "fail", [f"deformation {name}: {exc}"])


def cmd_obstruction(prob: Problem, args) -> Outcome:
    name = _require(args, "deformation")
    d = _deformation(prob, name)
    try:
        ob = obstruction(d)
    except NotVerifiedError as exc:
        return _not_verified(name, exc)
    cx = d.complex
    invariant = cx.is_invariant(ob)
    cocycle = cx.d_apply(ob).is_zero()
    vanishes = membership(cx.coords(ob), cx.coboundary_image(3))[0] if invariant else False
    results = {
        "deformation": name,
        "order": d.order + 1,
        "obstruction": morphism_cochain_to_json(ob),
        "invariant": invariant,
        "cocycle": cocycle,
        "class_vanishes": vanishes,
    }
    if not (invariant and cocycle):
        return Outcome(results, "fail", ["obstruction is not an invariant cocycle"])
    return Outcome(results, "pass" if vanishes else "obstructed")


def cmd_extend(prob: Problem, args) -> Outcome:
    name = _require(args, "deformation")
    d = _deformation(prob, name)
    mname = prob.deformation_refs[name]
    steps = 1 if args.max_order is None else args.max_order - d.order
    if steps < 1:
        raise InputError(f"--max-order must exceed the current order {d.order}")
    try:
        for _ in range(steps):
            res = extend_one_order(d)
            if res.obstructed:
                results = {
                    "deformation": name,
                    "reached": deformation_to_json(d, mname),
                    "failed_order": d.order + 1,
                    "obstruction": morphism_cochain_to_json(res.obstruction),
                    "certificate": {"rank": res.rank, "rank_augmented": res.rank_augmented},
                }
                return Outcome(results, "obstructed")
            d = res.deformation
    except NotVerifiedError as exc:
        return _not_verified(name, exc)
    return Outcome({"deformation": name, "extended": deformation_to_json(d, mname)})


def cmd_build(prob: Problem, args) -> Outcome:
    name = _morphism_name(prob, args)
    phi = prob.morphisms[name]
    cx = deformation_complex(phi)
    max_order = 2 if args.max_order is None else args.max_order
    if args.deformation is not None:
        d = _deformation(prob, args.deformation)
        if d.morphism != phi or d.order < 1:
            raise InputError(f"deformation {args.deformation!r} is not an order >= 1 deformation of {name!r}")
        seed, source = d.coefficient(1), f"deformation {args.deformation}"
    else:
        reps = cx.cohomology(2).representatives
        idx = args.representative or 0
        if not 0 <= idx < len(reps):
            raise InputError(f"--representative {idx}: H^2 has {len(reps)} representatives")
        seed, source = reps[idx], f"H2 representative {idx}"
    try:
        res = build_from_infinitesimal(phi, seed, max_order)
    except ValueError as exc:
        return Outcome({"morphism": name, "seed": source}, "fail", [str(exc)])
    results = {
        "morphism": name,
        "seed": source,
        "max_order": max_order,
        "reached": deformation_to_json(res.deformation, name),
        "failed_order": res.failed_order,
    }
    if res.obstructed:
        results["obstruction"] = morphism_cochain_to_json(res.obstruction)
        results["certificate"] = {"rank": res.rank, "rank_augmented": res.rank_augmented}
        return Outcome(results, "obstructed")
    return Outcome(results)


def cmd_equivalence(prob: Problem, args) -> Outcome:
    name = _require(args, "deformation")
    d1 = _deformation(prob, name)
    pair = prob.lookup("pairs", args.pair) if args.pair else None
    results: dict = {"deformation": name, "pair": args.pair}
    if args.other is not None:
        d2 = _deformation(prob, args.other)
        results["other"] = args.other
    elif pair is not None:
        try:
            d2 = conjugate(d1, pair)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        results["conjugate"] = deformation_to_json(d2, prob.deformation_refs[name])
    else:
        raise InputError("equivalence needs --other, --pair, or both")
    if d1.morphism != d2.morphism or d1.order != d2.order:
        raise InputError("compared deformations must share the morphism and the order")
    ok = True
    if pair is not None:
        results["is_equivalence"] = is_equivalence(pair, d1, d2)
        ok = results["is_equivalence"]
    if d1.order >= 1:
        try:
            results["same_infinitesimal_class"] = infinitesimal_class_compare(d1, d2)
        except NotVerifiedError as exc:
            return Outcome(results, "fail", [str(exc)])
        ok = ok and results["same_infinitesimal_class"]
    return Outcome(results, "pass" if ok else "obstructed")


def cmd_trivialize(prob: Problem, args) -> Outcome:
    name = _require(args, "deformation")
    d = _deformation(prob, name)
    mname = prob.deformation_refs[name]
    try:
        reduced, steps = trivialize(d)
    except NotVerifiedError as exc:
        return _not_verified(name, exc)
    log = []
    for s in steps:
        if s.order is None:
            log.append({"order": None, "outcome": "trivial"})
        elif s.is_coboundary:
            log.append({"order": s.order, "outcome": "removed", "pair": pair_to_json(s.pair, mname)})
        else:
            log.append(
                {
                    "order": s.order,
                    "outcome": f"n-infinitesimal not a coboundary at n = {s.order}",
                    "infinitesimal": morphism_cochain_to_json(s.infinitesimal),
                    "certificate": {"rank": s.rank, "rank_augmented": s.rank_augmented},
                }
            )
    results = {"deformation": name, "steps": log, "reduced": deformation_to_json(reduced, mname)}
    return Outcome(results, "pass" if steps[-1].is_coboundary else "obstructed")


def cmd_rigidity(prob: Problem, args) -> Outcome:
    name = _morphism_name(prob, args)
    probe = args.max_order or 0
    rep = rigidity_report(prob.morphisms[name], probe)
    results = {"morphism": name, **rep.as_dict()}
    diagnostics = [] if rep.rigid_sufficient else ["H2 is nonzero: the sufficient condition for rigidity does not apply"]
    return Outcome(results, "pass", diagnostics)


COMMANDS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "morphism-cohomology": cmd_morphism_cohomology,
    "vanishing-check": cmd_vanishing_check,
    "verify-deformation": cmd_verify_deformation,
    "obstruction": cmd_obstruction,
    "extend": cmd_extend,
    "build": cmd_build,
    "equivalence": cmd_equivalence,
    "trivialize": cmd_trivialize,
    "rigidity": cmd_rigidity,
}


# ---------------------------------------------------------------------------
# driver


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="defcomplex", description="Equivariant deformation cohomology of algebra morphisms.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--problem", required=True, help="problem JSON file")
    parser.add_argument("--field", help='override the field: "Q" or "F<p>"')
    parser.add_argument("--algebra")
    parser.add_argument("--action")
    parser.add_argument("--coefficients", help='"self" or a morphism name for induced coefficients')
    parser.add_argument("--morphism")
    parser.add_argument("--deformation")
    parser.add_argument("--other", help="second deformation for equivalence")
    parser.add_argument("--pair")
    parser.add_argument("--representative", type=int, help="H^2 representative index used as a build seed")
    parser.add_argument("--degree", help="degree or comma-separated degrees")
    parser.add_argument("--max-order", type=int)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--output", default="-", help="report path, or - for standard output")
    return parser


def _inputs(args, raw: bytes | None) -> dict:
    names = {
        k: getattr(args, k)
        for k in ("algebra", "action", "coefficients", "morphism", "deformation", "other", "pair", "representative", "degree", "max_order", "field")
        if getattr(args, k) is not None
    }
    return {
        "problem": Path(args.problem).name,
        "problem_sha256": hashlib.sha256(raw).hexdigest() if raw is not None else None,
        "names": names,
    }


def run(argv=None) -> tuple[int, str, str]:
    """Execute a command; returns (exit code, report text, output target)."""
    args = build_parser().parse_args(argv)
    try:
        raw = Path(args.problem).read_bytes()
    except OSError:
        raw = None
    envelope = {"schema": SCHEMA, "command": args.command, "inputs": _inputs(args, raw)}
    try:
        if args.threads < 1:
            raise InputError("--threads must be positive")
        override = parse_field(args.field) if args.field else None
        prob = load(args.problem, override)
        envelope["inputs"]["problem_content"] = content_hash(dump_dict(prob))
        outcome = COMMANDS[args.command](prob, args)
        code = STATUS_EXIT[outcome.status]
    except InputError as exc:
        outcome, code = Outcome({}, "fail", [f"input error: {exc}"]), EXIT_INPUT
    except ValidationError as exc:
        outcome, code = Outcome({}, "fail", [f"validation failed: {exc}"]), EXIT_FAIL
    envelope.update(results=outcome.results, status=outcome.status, diagnostics=outcome.diagnostics)
    return code, canonical_json(envelope), args.output


def main(argv=None) -> int:
    code, text, target = run(argv)
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text)
    if code in (EXIT_FAIL, EXIT_INPUT):
        print(f"defcomplex: {_first_diagnostic(text)}", file=sys.stderr)
    return code


def _first_diagnostic(text: str) -> str:
    diags = json.loads(text).get("diagnostics") or ["failed"]
    return diags[0]


if __name__ == "__main__":
    raise SystemExit(main())

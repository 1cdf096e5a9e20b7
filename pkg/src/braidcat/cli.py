"""Command-line front end.

Commands load group / R-matrix / object descriptions (builtin names or JSON
files), run the requested construction or verification pipeline, and write a
deterministic report.  Exit status: 0 when every check passes, 2 when a check
fails, 1 on input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import report as rpt
from .braided import build_braided, build_core, check_property3, coherence_suite
from .fqg import (
    BUILTIN_GROUPS,
    FiniteQuantumGroup,
    GroupError,
    InvariantViolation,
    builtin_group,
    check_bicharacter,
    group_from_spec,
    heisenberg_check,
)
from .gcalg import BUILTIN_OBJECTS, builtin_object, galgebra_from_spec
from .linalg import LinalgError
from .rmatrix import (
    DeltaRSolveError,
    RMatrixError,
    check_rmatrix,
    enumerate_bicharacter_rmatrices,
    rmatrix_from_spec,
    solve_delta_r,
)
from .theorems import (
    extract_rmatrix,
    intersection_triviality_test,
    invariant_commutation_test,
    left_action_suite,
    property3_equivalence_test,
    uniqueness_test,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CHECK_FAILED = 2


@dataclass
class RunConfig:
    """Parsed invocation: which pipeline to run on which inputs."""

    command: str
    group: str | None = None
    rmatrix: str | None = None
    objects: list = field(default_factory=list)
    tolerance: float | None = None
    out: str | None = None
    format: str = "text"
    seed: int = 0


def _load_spec_arg(value: str):
    """A CLI value is either a builtin name or a path to a JSON file."""
    if value is not None and (value.endswith(".json") or os.path.sep in value):
        with open(value, "r", encoding="utf-8") as fh:
            return json.load(fh)
    return value


def _resolve_group(config: RunConfig) -> FiniteQuantumGroup:
    if config.group is None:
        raise GroupError("a --group is required for this command")
    return group_from_spec(_load_spec_arg(config.group))


def _resolve_rmatrix(G, config: RunConfig):
    if config.rmatrix is None:
        raise RMatrixError("an --r is required for this command")
    return rmatrix_from_spec(G, _load_spec_arg(config.rmatrix))


def _tol_override(config: RunConfig, default: float) -> float:
    if config.tolerance is None:
        return default
    if not 0.0 < config.tolerance < 1e-3:
        raise ValueError("tolerance override must lie in (0, 1e-3)")
    return config.tolerance


def list_builtins() -> dict:
    """Registry listing: groups, R-matrix families with counts, objects."""
    groups = {}
    for name in BUILTIN_GROUPS:
        G = builtin_group(name)
        fam = enumerate_bicharacter_rmatrices(G)
        groups[name] = {
            "order": G.n,
            "invariant_factors": list(G.abelian.factors),
            "bicharacter_rmatrices": len(fam),
            "rmatrix_labels": [r.label for r in fam],
        }
    return {
        "groups": groups,
        "rmatrix_families": ["trivial", "sign", "bicharacter:<m1,...,mk>",
                             "bicharacter (exponent matrix via JSON)",
                             "custom (matrix via JSON)"],
        "objects": list(BUILTIN_OBJECTS),
    }


def _cmd_list_builtins(config: RunConfig):
    return [], {"builtins": list_builtins()}


def _cmd_check_bicharacter(config: RunConfig):
    G = _resolve_group(config)
    tol = _tol_override(config, 1e-9)
    recs = check_bicharacter(G, tol=tol)
    recs.append(heisenberg_check(G))
    return recs, {"group": G.name, "hilbert_dim": G.n}


def _cmd_check_rmatrix(config: RunConfig):
    G = _resolve_group(config)
    spec = _load_spec_arg(config.rmatrix) if config.rmatrix else "trivial"
    tol = _tol_override(config, 1e-9)
    if isinstance(spec, dict) and "custom" in spec:
        from .fqg import matrix_from_json
        recs = check_rmatrix(G, matrix_from_json(spec["custom"]),
                             label="custom", tol=tol)
    else:
        R = rmatrix_from_spec(G, spec)
        recs = check_rmatrix(G, R.R, label=R.label, tol=tol)
    return recs, {"group": G.name}


def _cmd_build_core(config: RunConfig):
    G = _resolve_group(config)
    R = _resolve_rmatrix(G, config)
    dr = solve_delta_r(G, R)
    core = build_core(G, R, dr)
    recs = dr.records + core.records
    return recs, {"group": G.name, "rmatrix": R.label,
                  "core_dim": core.algebra.dim,
                  "carrier": list(core.carrier.dims)}


def _cmd_build_braided(config: RunConfig):
    G = _resolve_group(config)
    R = _resolve_rmatrix(G, config)
    if len(config.objects) != 2:
        raise ValueError("build-braided needs exactly two --objects")
    core = build_core(G, R)
    X = galgebra_from_spec(G, _load_spec_arg(config.objects[0]))
    Y = galgebra_from_spec(G, _load_spec_arg(config.objects[1]))
    prod = build_braided(X, Y, core)
    recs = list(core.records) + list(prod.records)
    return recs, {"group": G.name, "rmatrix": R.label,
                  "product": prod.name, "product_dim": prod.dim,
                  "carrier": list(prod.carrier.dims)}


def _cmd_extract_r(config: RunConfig):
    G = _resolve_group(config)
    R = _resolve_rmatrix(G, config)
    core = build_core(G, R)
    result = extract_rmatrix(core)
    recs = result.records + result.axiom_report
    from .fqg import matrix_to_json
    return recs, {"group": G.name, "rmatrix": R.label,
                  "recovered_r": matrix_to_json(result.recovered_R),
                  "last_leg_residual": result.last_leg_residual}


def _cmd_left_suite(config: RunConfig):
    G = _resolve_group(config)
    R = _resolve_rmatrix(G, config)
    recs, _ = left_action_suite(G, R)
    return recs, {"group": G.name, "rmatrix": R.label}


def _cmd_verify_all(config: RunConfig):
    recs, extra = run_default_suite(seed=config.seed)
    return recs, extra


def run_default_suite(seed: int = 0, progress=None) -> tuple[list, dict]:
    """The full verification pipeline over every builtin (group, R) pair.

    Covers: bicharacter and Heisenberg checks, all R-matrix axioms for the
    enumerated family plus corrupted negatives, the Delta_R solves, core
    construction with the exchange relation, extraction round trips,
    uniqueness witnesses, mirrored (left) relations, the trivial-action
    reduction suite, the graded benchmark, coherence over a pool of triples,
    and two fourfold intersection instances.
    """
    from .gcalg import delta_action, trivial_action, full_matrix_algebra
    from .rmatrix import RMatrix

    rng = np.random.default_rng(seed)
    t0 = time.time()
    recs: list[rpt.CheckRecord] = []
    say = progress or (lambda msg: None)

    pairs = []
    for gname in BUILTIN_GROUPS:
        G = builtin_group(gname)
        recs.extend(check_bicharacter(G))
        recs.append(heisenberg_check(G))
        dim, full = G.regularity_defect()
        recs.append(rpt.CheckRecord(
            f"{G.name}: A.A_hat spans B(H)", "heisenberg-regularity",
            float(dim), float(full), dim == full, {"span_dim": dim}))
        family = enumerate_bicharacter_rmatrices(G)
        recs.append(rpt.CheckRecord(
            f"{G.name}: bicharacter family size", "rmatrix-family-count",
            float(len(family)), float(G.n), len(family) == G.n, {}))
        for R in family:
            recs.extend(R.records)
            pairs.append((G, R))
        # deliberate negatives: a corrupted bicharacter entry and, when the
        # dual has a complement, a matrix outside A_hat (x) A_hat
        bad = np.array(G.V)
        bad[0, 0] = -bad[0, 0] if abs(bad[0, 0]) > 0.5 else 1.0 + bad[0, 0]
        neg = check_bicharacter(
            FiniteQuantumGroup(G.H, G.A, G.A_hat, G.delta, G.delta_hat, bad,
                               name=f"{gname}(corrupted)", table=G.table,
                               abelian=G.abelian, A_units=G.A_units,
                               A_hat_units=G.A_hat_units, validate=False))
        worst_neg = max(r.residual for r in neg)
        recs.append(rpt.CheckRecord(
            f"{gname}: corrupted V is rejected", "negative-control-bicharacter",
            worst_neg, 1e-3, worst_neg >= 1e-3, {}))
        if G.n > 1:
            bad_r = np.array(family[-1].R)
            bad_r[0, 0] += 0.5
            worst_neg = max(r.residual for r in check_rmatrix(
                G, bad_r, label="corrupted"))
            recs.append(rpt.CheckRecord(
                f"{gname}: corrupted R is rejected", "negative-control-rmatrix",
                worst_neg, 1e-3, worst_neg >= 1e-3, {}))
        say(f"group {gname}: axioms checked")

    cores = {}
    for G, R in pairs:
        dr = solve_delta_r(G, R)
        recs.extend(dr.records)
        if R.label == "trivial":
            worst = max(float(np.abs(dr.map(a) - np.kron(a, np.eye(G.n))).max())
                        for a in G.A.basis)
            recs.append(rpt.record(
                f"{G.name}: trivial R gives Delta_R(a) = a(x)I",
                "delta-r-trivial-form", worst, 1e-12))
        core = build_core(G, R, dr)
        recs.extend(core.records)
        cores[(G.name, R.label)] = core
        extraction = extract_rmatrix(core)
        recs.extend(extraction.records)
        recs.extend(extraction.axiom_report)
        witness = uniqueness_test(G, R)
        recs.extend(witness.records)
        left_recs, _ = left_action_suite(G, R)
        recs.extend(left_recs)
        say(f"core {G.name}/{R.label}: exchange, extraction, uniqueness, left suite")

    # trivial-action reduction + invariant commutation pools (one group of
    # each flavor keeps the run inside the time budget)
    for gname, rlabel in (("Z2", "bicharacter:1"), ("Z3", "bicharacter:1")):
        G, R = next((g, r) for g, r in pairs
                    if g.name == gname and r.label == rlabel)
        recs.extend(property3_equivalence_test(G, R, core=cores[(gname, rlabel)]))
        say(f"property-3 suite over {gname}")

    # graded benchmark over (Z2, sign): the braided square of the rank-one
    # Clifford algebra is the full 2x2 matrix algebra; the plain tensor
    # square stays commutative
    from .gcalg import clifford1_graded, tensor_pair, OperatorAlgebra
    G2, Rsign = next((g, r) for g, r in pairs
                     if g.name == "Z2" and r.label == "bicharacter:1")
    core2 = cores[("Z2", "bicharacter:1")]
    cl = clifford1_graded(G2)
    sq = build_braided(cl, cl, core2)
    c = cl.basis[1] * np.sqrt(2)  # the odd self-adjoint generator, c^2 = I
    a, b = sq.alpha_map(c), sq.beta_map(c)
    anti = np.linalg.norm(a @ b + b @ a) / np.linalg.norm(a @ b)
    recs.append(rpt.record("Cl1[x]Cl1: odd generators anticommute",
                           "graded-anticommutation", anti, 1e-9))
    alg = OperatorAlgebra(sq.carrier, sq.algebra, name="Cl1[x]Cl1",
                          validate=False)
    zdim = alg.center().dim
    recs.append(rpt.CheckRecord("Cl1[x]Cl1: center is trivial",
                                "graded-center", float(zdim), 1.0, zdim == 1,
                                {"center_dim": zdim}))
    tens = tensor_pair(cl, cl)
    zdim_t = OperatorAlgebra(tens.carrier, tens.alg.subspace, name="Cl1(x)Cl1",
                             validate=False).center().dim
    recs.append(rpt.CheckRecord("Cl1(x)Cl1: center has dimension 4",
                                "graded-center-tensor", float(zdim_t), 4.0,
                                zdim_t == 4, {"center_dim": zdim_t}))
    say("graded benchmark done")

    # coherence over five triples of Z2-based objects
    A2 = delta_action(G2)
    D2 = builtin_object("D", G2)
    C2 = builtin_object("trivial:1", G2)
    triple_pool = [(A2, A2, A2), (cl, cl, cl), (D2, A2, cl),
                   (A2, C2, D2), (cl, D2, A2)]
    for i, (X, Y, Z) in enumerate(triple_pool):
        t1 = time.time()
        crecs = coherence_suite(X, Y, Z, core2)
        recs.extend(crecs)
        dt = time.time() - t1
        recs.append(rpt.record(
            f"coherence triple {i + 1} ({X.name},{Y.name},{Z.name}) "
            f"in {dt:.1f}s", "coherence-runtime", dt, 60.0))
        say(f"coherence triple {i + 1}/5 done ({dt:.1f}s)")

    # fourfold intersection instances over (Z2, sign)
    recs.extend(intersection_triviality_test(A2, A2, A2, A2, core2))
    say("intersection instance 1 done")
    recs.extend(intersection_triviality_test(cl, D2, cl, D2, core2))
    say("intersection instance 2 done")
    # trivial-action control instance
    recs.extend(intersection_triviality_test(D2, C2, D2, C2, core2))
    say("intersection instances done")

    # randomized word spot-check on the large carriers handled by the
    # one-pass closure argument (seeded, reproducible)
    sq2 = build_braided(A2, A2, core2)
    words = []
    gens = [sq2.alpha_map(x) for x in A2.basis] + \
           [sq2.beta_map(y) for y in A2.basis]
    worst = 0.0
    for _ in range(8):
        idx = rng.integers(0, len(gens), size=3)
        w = gens[idx[0]] @ gens[idx[1]] @ gens[idx[2]]
        worst = max(worst, sq2.algebra.residual_of(w, floor=1.0))
    recs.append(rpt.record("random generator words stay in the span",
                           "closure-spot-check", worst, 1e-9))

    total = time.time() - t0
    recs.append(rpt.record(f"verify-all wall time {total:.1f}s",
                           "suite-runtime", total, 600.0))
    return recs, {"pairs": len(pairs), "seconds": total}


_COMMANDS = {
    "list-builtins": _cmd_list_builtins,
    "check-bicharacter": _cmd_check_bicharacter,
    "check-rmatrix": _cmd_check_rmatrix,
    "build-core": _cmd_build_core,
    "build-braided": _cmd_build_braided,
    "extract-r": _cmd_extract_r,
    "verify-all": _cmd_verify_all,
    "left-suite": _cmd_left_suite,
}


def run(config: RunConfig) -> int:
    """Execute a parsed configuration; returns the process exit status."""
    try:
        recs, extra = _COMMANDS[config.command](config)
    except (GroupError, RMatrixError, DeltaRSolveError, InvariantViolation,
            LinalgError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    body = rpt.make_report(config.command, recs, **extra)
    text = rpt.dumps(body)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if config.format == "json":
        print(text)
    else:
        _print_text_report(body)
    return EXIT_OK if body["pass"] else EXIT_CHECK_FAILED


def _print_text_report(body: dict):
    print(f"# {body['command']}  [{body['schema']}]")
    for key, val in body.items():
        if key in ("schema", "command", "checks", "pass"):
            continue
        print(f"  {key}: {val if not isinstance(val, dict) else '...'}")
    for c in body["checks"]:
        status = "PASS" if c["pass"] else "FAIL"
        resid = c.get("residual")
        tol = c.get("tolerance")
        extra = ""
        if resid is not None and tol is not None:
            extra = f"  residual {resid:.3e} (tol {tol:.1e})"
        print(f"  [{status}] {c['name']}{extra}")
    print(f"overall: {'PASS' if body['pass'] else 'FAIL'} "
          f"({len(body['checks'])} checks)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="braidcat",
        description="Verify finite quantum groups, R-matrices, and braided "
                    "tensor products of operator algebras.")
    p.add_argument("command", choices=sorted(_COMMANDS))
    p.add_argument("--group", help="builtin group name or JSON file")
    p.add_argument("--r", dest="rmatrix",
                   help="R-matrix name (trivial, sign, bicharacter:m1,...) "
                        "or JSON file")
    p.add_argument("--objects", nargs="*", default=[],
                   help="object names (delta_action, clifford1_graded, D, "
                        "trivial:<n>) or JSON files")
    p.add_argument("--tol", type=float, default=None,
                   help="tolerance override, must lie in (0, 1e-3)")
    p.add_argument("--out", help="write the JSON report to this path")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--suite", default="default",
                   help="suite name for verify-all (only 'default')")
    p.add_argument("--progress", action="store_true",
                   help="print progress lines to stderr during verify-all")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.suite != "default":
        print(f"error: unknown suite {args.suite!r}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    config = RunConfig(
        command=args.command,
        group=args.group,
        rmatrix=args.rmatrix,
        objects=list(args.objects),
        tolerance=args.tol,
        out=args.out,
        format=args.format,
        seed=int(os.environ.get("BRAIDCAT_SEED", "0")),
    )
    if args.progress and args.command == "verify-all":
        def say(msg):
            print(f"[braidcat] {msg}", file=sys.stderr)
        try:
            recs, extra = run_default_suite(seed=config.seed, progress=say)
        except Exception as exc:  # input errors surface as exit 1
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        body = rpt.make_report("verify-all", recs, **extra)
        text = rpt.dumps(body)
        if config.out:
            with open(config.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        if config.format == "json":
            print(text)
        else:
            _print_text_report(body)
        return EXIT_OK if body["pass"] else EXIT_CHECK_FAILED
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

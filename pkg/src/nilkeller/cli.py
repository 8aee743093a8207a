"""Command-line front end.

Every command produces a report ``{"command", "status", "payload"}``;
``--json`` prints it as JSON, otherwise a short human-readable summary is
shown. Exit codes: 0 ok, 2 precondition error or not applicable,
3 verification failure, 4 parse error.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, List, Optional

from . import fileio
from .classifier import (
    Theorem23Witness,
    Theorem24Witness,
    classify_any,
    exceptional_index,
    extract_theorem23,
    verify_theorem24_witness,
)
from .errors import (
    CompositionMismatch,
    NilkellerError,
    ParseError,
    PreconditionError,
    RecipeDidNotClose,
    ShapeError,
)
from .families import (
    DEFAULT_SEED,
    build_corpus,
    gen_essen_chain,
    gen_generalized_sheared,
    gen_generalized_thm23,
    gen_quartic_n4,
    gen_theorem23_instance,
    gen_thm24_case,
    random_theorem23_params,
)
from .genform import (
    Theorem4CaseWitness,
    Theorem4Witness,
    alpha_residuals,
    decompose_generalized,
    extract_theorem4,
    normal_form_constant_h2,
    theorem4_case_failures,
)
from .nilcheck import (
    GeneralizedShape,
    PolyMap,
    Section2Shape,
    divisibility_check,
    eq_residuals_primed,
    eq_residuals_section2,
    jacobian,
    jacobian_nilpotent,
    keller,
    linear_independence,
)
from .polycore import Poly, to_str
from .polylinalg import principal_minor_sum
from .tamedec import check_word, compose_word, decompose_tame, verify_inverse, word_stats

EXIT = {"ok": 0, "not-applicable": 2, "precondition-error": 2, "fail": 3, "parse-error": 4}


def report(command: str, status: str, payload: dict) -> dict:
    return {"command": command, "status": status, "payload": payload}


def _load(path: str):
    return fileio.read_map_file(path)


def _realize(F) -> PolyMap:
    return F.realize() if isinstance(F, GeneralizedShape) else F


# -- witness checks shared by classify and verify --------------------------------------


def _thm23_residuals(F: PolyMap, w: Theorem23Witness):
    """(H1 + (2 b2 x2 + b1) H2 - sigma.x, b2 H2^2 - sigma.(H2, ..., Hn))."""
    n = F.dim
    x2 = Poly.var(n, 2)
    r1 = F[1] + (x2.scale(2 * w.b2) + Poly.const(n, w.b1)) * F[2]
    r2 = (F[2] * F[2]).scale(w.b2)
    for i, s in enumerate(w.sigma, start=2):
        r1 = r1 - Poly.var(n, i).scale(s)
        r2 = r2 - F[i].scale(s)
    return r1, r2


def verify_witness(F, w) -> List[str]:
    """Failures of witness ``w`` for the map in ``F``; empty when it verifies."""
    if isinstance(w, Theorem24Witness):
        return verify_theorem24_witness(_realize(F), w).failures
    if isinstance(w, Theorem4CaseWitness):
        if not isinstance(F, GeneralizedShape):
            return ["a generalized witness needs a generalized map file"]
        return theorem4_case_failures(F, w)
    R = _realize(F)
    if isinstance(w, Theorem4Witness):
        core = w.witness
        want1, want2 = Poly.const(R.dim, w.const1), Poly.const(R.dim, w.const2)
    elif isinstance(w, Theorem23Witness):
        core = w
        want1 = want2 = Poly.zero(R.dim)
    else:
        return [f"unsupported witness {type(w).__name__}"]
    if len(core.sigma) != R.dim - 1:
        return ["sigma has the wrong length"]
    r1, r2 = _thm23_residuals(R, core)
    fails = []
    if r1 != want1:
        fails.append(f"first identity leaves {r1}")
    if r2 != want2:
        fails.append(f"second identity leaves {r2}")
    return fails


def _classify(F):
    if isinstance(F, GeneralizedShape):
        if F.H2.is_constant():
            return normal_form_constant_h2(F)[0]
        return extract_theorem4(F)
    if F.dim >= 3 and exceptional_index(F) is not None:
        return classify_any(F)
    raise ShapeError("map matches neither supported shape")


# -- commands -------------------------------------------------------------------------


def cmd_check(path: str) -> dict:
    F = _load(path)
    R = _realize(F)
    payload = {"file": path, "n": R.dim, "nilpotent": jacobian_nilpotent(R)}
    dep = linear_independence(R.components)
    payload["independent"] = dep is None
    payload["independent_with_1"] = linear_independence(R.components, include_one=True) is None
    residuals_zero = True
    if isinstance(F, GeneralizedShape):
        res = eq_residuals_primed(F)
        a3, a1 = alpha_residuals(F)
        payload["residuals"] = [to_str(r) for r in res]
        payload["alpha"] = [to_str(a3), to_str(a1)]
        residuals_zero = all(r.is_zero() for r in res)
    elif Section2Shape.matches(R):
        res = eq_residuals_section2(R)
        payload["residuals"] = [to_str(r) for r in res]
        div = divisibility_check(R)
        payload["divisibility"] = "not-applicable" if div is None else div
        residuals_zero = all(r.is_zero() for r in res) and div is not False
    else:
        # no special shape: the principal-minor sums of JH, all 0 iff nilpotent
        J = jacobian(R)
        payload["residuals"] = [to_str(principal_minor_sum(J, k)) for k in range(1, R.dim + 1)]
        payload["residual_kind"] = "principal-minor-sums"
    ok = payload["nilpotent"] and residuals_zero
    return report("check", "ok" if ok else "fail", payload)


def cmd_classify(path: str, out: Optional[str] = None) -> dict:
    F = _load(path)
    n = _realize(F).dim
    w = _classify(F)
    fails = verify_witness(F, w)
    wj = fileio.witness_to_json(w, n)
    if fails:
        return report("classify", "fail", {"file": path, "witness": wj, "failures": fails})
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(fileio.dumps(wj))
    payload = {"file": path, "witness": wj}
    R = _realize(F)
    if isinstance(w, Theorem24Witness) and Section2Shape.matches(R):
        # independent components also get the two-identity data
        try:
            t23 = extract_theorem23(R)
        except (PreconditionError, ShapeError):
            t23 = None
        if t23 is not None and not verify_witness(R, t23):
            payload["theorem23"] = fileio.witness_to_json(t23, n)
    return report("classify", "ok", payload)


def cmd_verify(path: str, witness_path: str) -> dict:
    F = _load(path)
    with open(witness_path, encoding="utf-8") as fh:
        w = fileio.witness_from_json(fileio.loads(fh.read()))
    fails = verify_witness(F, w)
    return report("verify", "fail" if fails else "ok", {"file": path, "witness": witness_path, "failures": fails})


def cmd_decompose(path: str, out: Optional[str] = None, shortcut: bool = True) -> dict:
    F = _load(path)
    if isinstance(F, GeneralizedShape):
        if not F.H2.is_constant():
            raise RecipeDidNotClose("words for generalized maps are built only for constant H2")
        d = decompose_generalized(F)
        word = d.word
        witness = fileio.witness_to_json(d.witness, F.n)
    else:
        w = classify_any(F) if not shortcut else None
        word = decompose_tame(F, w, shortcut=shortcut)
        witness = fileio.witness_to_json(w, F.dim) if w is not None else None
    R = _realize(F)
    check_word(word, keller(R))
    wj = fileio.word_to_json(word, R.dim)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(fileio.dumps(wj))
    payload = {"file": path, "word": wj, "composition": "exact", "stats": word_stats(word)}
    if witness is not None:
        payload["witness"] = witness
    return report("decompose", "ok", payload)


def cmd_verify_word(path: str, word_path: str) -> dict:
    R = _realize(_load(path))
    with open(word_path, encoding="utf-8") as fh:
        n, word = fileio.word_from_json(fileio.loads(fh.read()))
    if n != R.dim:
        return report("verify-word", "fail", {"file": path, "failures": [f"word has n={n}, map has n={R.dim}"]})
    target = keller(R)
    got = compose_word(word, n)
    fails = []
    for i, (a, b) in enumerate(zip(got, target), start=1):
        if a != b:
            fails.append(f"component {i}: word gives {a}, expected {b}")
            break
    inverse_ok = not fails and verify_inverse(R, word)
    if not fails and not inverse_ok:
        fails.append("inverse word does not invert x + H")
    return report("verify-word", "fail" if fails else "ok", {"file": path, "failures": fails, "inverse": inverse_ok})


def _fraction_list(v) -> List[str]:
    return [str(Fraction(x)) for x in v]


def cmd_gen(family: str, outdir: str, seed: int, n: Optional[int], d: Optional[int], case: Optional[str], k: Optional[int]) -> dict:
    rng = random.Random(seed)
    params: dict = {}
    if family == "essen_chain":
        n, d = n or 5, d or 2
        F = gen_essen_chain(n, d)
        params = {"n": n, "d": d}
    elif family == "quartic_n4":
        d = d or 3
        F = gen_quartic_n4(d)
        params = {"d": d}
    elif family == "thm23":
        p = random_theorem23_params(rng, n)
        F = gen_theorem23_instance(p).source
        params = {
            "n": p.n,
            "b1": str(p.b1),
            "b2": str(p.b2),
            "sigma": _fraction_list(p.sigma),
            "g": _fraction_list(p.g),
            "solve_for": p.solve_for,
            "free_tails": {str(i): to_str(t) for i, t in sorted(p.free_tails.items())},
        }
    elif family == "thm24_case":
        case = case or "ii"
        n = n or 4
        k = k or (2 if case == "ii" else 3)
        inst = gen_thm24_case(case, n, k, rng)
        F = inst.instance
        params = {"case": case, "n": n, "k": k, "T": fileio.matrix_to_json(inst.T),
                  "normal_form": [to_str(c) for c in inst.normal_form]}
    elif family == "generalized":
        n = n or 4
        if case == "thm23":
            g = gen_generalized_thm23(rng, max(n, 4))
        else:
            g = gen_generalized_sheared(rng, n, k or 2)
        F = g.shape
        params = {"kind": g.kind, "n": F.n}
    else:
        raise ValueError(f"unknown family {family!r}")
    os.makedirs(outdir, exist_ok=True)
    stem = os.path.join(outdir, f"{family}_{seed}")
    fileio.write_map_file(stem + ".map", F)
    prov = {"family": family, "params": params, "seed": seed}
    with open(stem + ".json", "w", encoding="utf-8") as fh:
        fh.write(fileio.dumps(prov))
    again = fileio.read_map_file(stem + ".map")
    status = "ok" if fileio.dump_map(again) == fileio.dump_map(F) else "fail"
    return report("gen", status, {"map": stem + ".map", "provenance": stem + ".json", **prov})


def _corpus_item(path: str) -> dict:
    """check + classify + decompose for one corpus file, as a summary row."""
    row = {"file": path}
    for name, fn in (("check", cmd_check), ("classify", cmd_classify), ("decompose", cmd_decompose)):
        r = run_safely(name, fn, path)
        row[name] = r["status"]
    return row


def cmd_corpus(outdir: str, seed: int, jobs: int, small: bool = False) -> dict:
    corpus = build_corpus(seed, thm23_count=10 if small else 100, per_case=4 if small else 20,
                          generalized_count=4 if small else 20)
    os.makedirs(outdir, exist_ok=True)
    paths = []

    def emit(name, F):
        path = os.path.join(outdir, name + ".map")
        fileio.write_map_file(path, F)
        paths.append(path)

    for (n, d), F in corpus.essen:
        emit(f"essen_{n}_{d}", F)
    for d, F in corpus.quartic:
        emit(f"quartic_{d}", F)
    for i, (_, S) in enumerate(corpus.thm23):
        emit(f"thm23_{i:03d}", S.source)
    for i, inst in enumerate(corpus.thm24):
        emit(f"thm24_{inst.case}_{i:03d}", inst.instance)
    for i, g in enumerate(corpus.generalized):
        emit(f"gen_{g.kind}_{i:03d}", g.shape)
    rows = _map_jobs(_corpus_item, paths, jobs)
    counts: dict = {}
    for r in rows:
        for key in ("check", "classify", "decompose"):
            counts.setdefault(key, {}).setdefault(r[key], 0)
            counts[key][r[key]] += 1
    bad = [r for r in rows if r["check"] != "ok"]
    status = "ok" if not bad else "fail"
    return report("corpus", status, {"seed": seed, "files": len(paths), "counts": counts, "failing_checks": bad})


# -- plumbing -------------------------------------------------------------------------


def run_safely(name: str, fn: Callable[..., dict], *args, **kwargs) -> dict:
    """Run a command, turning the library's exceptions into reports."""
    try:
        return fn(*args, **kwargs)
    except ParseError as exc:
        return report(name, "parse-error", {"error": exc.message, "line": exc.line, "column": exc.col})
    except PreconditionError as exc:
        return report(name, "precondition-error", {"error": str(exc), "hypothesis": getattr(exc, "hypothesis", None)})
    except RecipeDidNotClose as exc:
        return report(name, "not-applicable", {"error": str(exc)})
    except (ShapeError, ValueError) as exc:
        return report(name, "precondition-error", {"error": str(exc)})
    except CompositionMismatch as exc:
        return report(name, "fail", {"error": str(exc), "component": getattr(exc, "component", None)})
    except NilkellerError as exc:
        return report(name, "fail", {"error": str(exc)})
    except OSError as exc:
        return report(name, "precondition-error", {"error": str(exc)})


def _map_jobs(fn, items, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _print_human(rep: dict, out) -> None:
    p = rep["payload"]
    head = f"{rep['command']}: {rep['status']}"
    if "file" in p:
        head += f" ({p['file']})"
    print(head, file=out)
    for key, val in p.items():
        if key in ("file", "word"):
            continue
        if isinstance(val, (dict, list)) and len(str(val)) > 200:
            val = f"<{type(val).__name__} of {len(val)} entries>"
        print(f"  {key}: {val}", file=out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nilkeller", description="Nilpotent Jacobians of quasi-triangular shape.")
    ap.add_argument("--json", action="store_true", help="print reports as JSON")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for independent files")
    # the same flags after the subcommand; SUPPRESS keeps the top-level defaults
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add("check", help="nilpotency, residuals and divisibility")
    p.add_argument("files", nargs="+")
    p = add("classify", help="emit a verified normal-form witness")
    p.add_argument("files", nargs="+")
    p.add_argument("--out", help="write the witness JSON here (single file only)")
    p = add("verify", help="check a witness file against a map file")
    p.add_argument("file")
    p.add_argument("witness")
    p = add("decompose", help="tame word for x + tH")
    p.add_argument("files", nargs="+")
    p.add_argument("--out", help="write the word JSON here (single file only)")
    p.add_argument("--no-shortcut", action="store_true", help="always go through the normal form")
    p = add("verify-word", help="check a word file against a map file")
    p.add_argument("file")
    p.add_argument("word")
    p = add("gen", help="write a generated instance and its provenance")
    p.add_argument("family", choices=["essen_chain", "quartic_n4", "thm23", "thm24_case", "generalized"])
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--case", help="i, ii or iii for thm24_case; sheared or thm23 for generalized")
    p.add_argument("--k", type=int)
    p.add_argument("--out", default=".", help="output directory")
    p = add("corpus", help="generate the seeded corpus and run every check")
    p.add_argument("--out", default="corpus", help="output directory")
    p.add_argument("--small", action="store_true", help="a reduced grid for quick runs")
    return ap


def _file_command(name: str, fn, files: List[str], jobs: int, **kw) -> List[dict]:
    if len(files) > 1 and kw.get("out"):
        raise SystemExit("--out needs a single input file")
    return _map_jobs(_Runner(name, fn, kw), files, jobs)


class _Runner:
    """Picklable wrapper so file commands can run in worker processes."""

    def __init__(self, name, fn, kw):
        self.name, self.fn, self.kw = name, fn, kw

    def __call__(self, path):
        return run_safely(self.name, self.fn, path, **self.kw)


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    c = args.command
    if c == "check":
        reps = _file_command("check", cmd_check, args.files, args.jobs)
    elif c == "classify":
        reps = _file_command("classify", cmd_classify, args.files, args.jobs, **({"out": args.out} if args.out else {}))
    elif c == "verify":
        reps = [run_safely("verify", cmd_verify, args.file, args.witness)]
    elif c == "decompose":
        kw = {"shortcut": not args.no_shortcut}
        if args.out:
            kw["out"] = args.out
        reps = _file_command("decompose", cmd_decompose, args.files, args.jobs, **kw)
    elif c == "verify-word":
        reps = [run_safely("verify-word", cmd_verify_word, args.file, args.word)]
    elif c == "gen":
        reps = [run_safely("gen", cmd_gen, args.family, args.out, args.seed, args.n, args.d, args.case, args.k)]
    else:
        reps = [run_safely("corpus", cmd_corpus, args.out, args.seed, args.jobs, args.small)]
    for rep in reps:
        if args.json:
            out.write(fileio.dumps(rep))
        else:
            _print_human(rep, out)
    return max(EXIT[r["status"]] for r in reps)


if __name__ == "__main__":
    sys.exit(main())

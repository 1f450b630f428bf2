"""Command-line orchestration with machine-readable reports.

Every subcommand echoes its parameters into the report and emits
deterministic JSON (sorted keys, fixed site enumeration); exit status is
0 for definite verdicts, 2 when a verdict is Unknown, 1 on errors.  The
only randomness anywhere (witness subsampling past the cap) is seeded and
the seed is part of the report.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__, _kernels, entropy, expansive, freegroup, homoclinic, independence, torus
from .groupring import CapExceeded, GroupRingMatrix, parse_element

OK, UNKNOWN_STATUS, ERROR = 0, 2, 1


def _load_matrix(path: str) -> GroupRingMatrix:
    with open(path) as fh:
        obj = json.load(fh)
    if isinstance(obj, dict):
        entries = obj["entries"]
        d = obj.get("d")
    else:
        entries, d = obj, None
    return GroupRingMatrix.from_obj(entries, d)


def _input_matrix(args) -> tuple[GroupRingMatrix, dict]:
    if getattr(args, "poly", None) and getattr(args, "matrix", None):
        raise ValueError("give exactly one input source (--poly or --matrix)")
    if getattr(args, "poly", None):
        f = parse_element(args.poly)
        return GroupRingMatrix([[f]]), {"poly": args.poly}
    if getattr(args, "matrix", None):
        return _load_matrix(args.matrix), {"matrix": args.matrix}
    raise ValueError("an input source is required (--poly or --matrix)")


def _window_box(n: int, d: int) -> list:
    if d == 1:
        return list(range(n))
    out = [()]
    for _ in range(d):
        out = [t + (i,) for t in out for i in range(n)]
    return out


def _status_from_verdict(verdict: str) -> int:
    return UNKNOWN_STATUS if verdict == "Unknown" else OK


# -- subcommand handlers (also callable from pipeline) -------------------------


def run_expansive(params: dict) -> tuple[dict, int]:
    args = argparse.Namespace(**params)
    A, src = _input_matrix(args)
    grid = getattr(args, "grid", None)
    if A.rows == 1 and A.cols == 1:
        rep = expansive.is_expansive_principal(A.entries[0][0], grid)
    else:
        rep = expansive.is_expansive_square(A, grid)
    out = {"input": src, "report": rep.to_obj()}
    if getattr(args, "check_entropy", False):
        fin, text = expansive.entropy_finiteness_equals_one_expansiveness_note(
            expansive.PresentedAction.from_matrix(A)
        )
        out["finite_entropy"] = fin.to_obj()
        out["equivalence_note"] = text
    return out, _status_from_verdict(rep.verdict)


def run_entropy(params: dict) -> tuple[dict, int]:
    args = argparse.Namespace(**params)
    method = args.method
    A, src = _input_matrix(args)
    chain = None
    if method == "mahler":
        det = A.det()
        chain = {"torus_certificate": torus.certify_invertible(det).to_obj()}
        est = entropy.mahler_measure(det, getattr(args, "grid", None))
    elif method == "peters":
        if A.rows != 1 or A.cols != 1:
            raise ValueError("peters counting expects a single polynomial input")
        cm = entropy.CompanionModule(A.entries[0][0])
        est = entropy.peters_entropy(cm, n_max=getattr(args, "nmax", 30) or 30)
        chain = {"exact_counting": True}
    elif method == "packing":
        n = getattr(args, "window", 20) or 20
        est = entropy.packing_lower_bound(
            A,
            _window_box(n, A.d),
            eps=getattr(args, "eps", None),
            M_levels=getattr(args, "levels", 2) or 2,
        )
        chain = _certificate_chain(A, 1e-10, 40)
    else:
        raise ValueError(f"unknown entropy method {method!r}")
    return {"input": src, "certificate_chain": chain, "estimate": est.to_obj()}, OK


def _certificate_chain(A: GroupRingMatrix, tol: float, radius: int) -> dict:
    """Torus certificate of the presenting matrix plus the inverse residual
    that every downstream verdict rests on."""
    inv = homoclinic._star_inverse(A, tol, radius)
    return {
        "torus_certificate": inv.det_certificate.to_obj() if inv.det_certificate else None,
        "inverse_residual": str(inv.residual),
        "inverse_tail_bound": inv.tail_bound,
    }


def run_homoclinic(params: dict) -> tuple[dict, int]:
    args = argparse.Namespace(**params)
    A, src = _input_matrix(args)
    tol = getattr(args, "tol", 1e-10) or 1e-10
    radius = getattr(args, "radius", 40) or 40
    elem = getattr(args, "element", None)
    if elem:
        m = [parse_element(t, A.d) for t in elem.split(";")]
        x = homoclinic.group_element(A, m, tol, radius)
    else:
        x = homoclinic.fundamental_homoclinic(A, tol, radius)[0]
    cert = homoclinic.delta1_membership(x)
    residual = homoclinic.annihilation_residual(x)
    return {
        "input": src,
        "certificate_chain": _certificate_chain(A, tol, radius),
        "point": x.to_obj(),
        "delta1": cert.to_obj(),
        "annihilation_residual": residual,
        "membership_tolerance": homoclinic.membership_tolerance(A, tol),
        "window_size": len(x.support()),
    }, OK


def run_ie(params: dict) -> tuple[dict, int]:
    args = argparse.Namespace(**params)
    A, src = _input_matrix(args)
    eps = args.eps
    n = getattr(args, "window", 60) or 60
    cap = getattr(args, "cap", 4096) or 4096
    seed = getattr(args, "seed", 0) or 0
    x = homoclinic.fundamental_homoclinic(A)[0]
    rep = independence.independence_witnesses(
        x, eps, _window_box(n, A.d), cap=cap, seed=seed
    )
    return {
        "input": src,
        "certificate_chain": _certificate_chain(A, 1e-10, 40),
        "report": rep.to_obj(),
    }, OK


def run_shadow(params: dict) -> tuple[dict, int]:
    path = params["config"]
    with open(path) as fh:
        cfg = json.load(fh)
    if "poly" in cfg:
        A = GroupRingMatrix([[parse_element(cfg["poly"])]])
    else:
        A = GroupRingMatrix.from_obj(cfg["matrix"])
    eps = float(cfg["eps"])
    blocks = []
    for b in cfg["blocks"]:
        mspec = b["m"]
        if isinstance(mspec, str):
            mspec = [mspec]
        m = [parse_element(t, A.d) for t in mspec]
        x = homoclinic.group_element(A, m)
        blocks.append(independence.ShadowBlock(b["window"], x))
    req = independence.ShadowRequest(blocks, eps, cfg.get("periodic"))
    res = independence.shadow(A, req)
    passed = all(e <= eps for e in res.block_errors)
    return {
        "input": {"config": path},
        "certificate_chain": _certificate_chain(A, 1e-10, 40),
        "result": res.to_obj(),
        "all_blocks_within_eps": passed,
    }, OK


def run_duality(params: dict) -> tuple[dict, int]:
    args = argparse.Namespace(**params)
    A, src = _input_matrix(args)
    chain = {"torus_certificate": torus.certify_invertible(A.det()).to_obj()}
    rep = entropy.duality_check(A, getattr(args, "grid", None))
    return {"input": src, "certificate_chain": chain, "report": rep.to_obj()}, OK


def run_freegroup_check(params: dict) -> tuple[dict, int]:
    args = argparse.Namespace(**params)
    rep = freegroup.verify_annihilator(args.rank, args.order, args.radius)
    return {"report": rep.to_obj()}, OK


_HANDLERS = {
    "expansive": run_expansive,
    "entropy": run_entropy,
    "homoclinic": run_homoclinic,
    "ie": run_ie,
    "shadow": run_shadow,
    "duality": run_duality,
    "freegroup-check": run_freegroup_check,
}


def run_pipeline(params: dict) -> tuple[dict, int]:
    path = params["config"]
    with open(path) as fh:
        stages = json.load(fh)
    report = {"stages": []}
    for i, stage in enumerate(stages):
        name = stage.get("command")
        if name not in _HANDLERS:
            report["stages"].append({"command": name, "error": f"unknown stage {name!r}"})
            return report, ERROR
        try:
            out, status = _HANDLERS[name](stage.get("args", {}))
        except Exception as exc:  # first failure aborts with partial report
            report["stages"].append({"command": name, "error": str(exc)})
            return report, ERROR
        report["stages"].append({"command": name, "status": status, "report": out})
        if status == ERROR:
            return report, ERROR
    return report, OK


def _emit(report: dict, args) -> None:
    fmt = getattr(args, "format", "json") or "json"
    if fmt == "csv" and "estimate" in report and report["estimate"].get("series"):
        lines = ["n,count,log,diff"]
        prev = None
        for row in report["estimate"]["series"]:
            diff = "" if prev is None else repr(row["log"] - prev)
            lines.append(f"{row['n']},{row['count']},{row['log']},{diff}")
            prev = row["log"]
        text = "\n".join(lines) + "\n"
    elif fmt == "pretty":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        text = json.dumps(report, sort_keys=True) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="algdyn",
        description="Certified computations for algebraic Z^d shift actions",
    )
    p.add_argument("--version", action="version", version=f"algdyn {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_io(sp, matrix=True):
        sp.add_argument("--poly", help="inline polynomial, e.g. '3 - u1 - u1^-1'")
        if matrix:
            sp.add_argument("--matrix", help="path to a JSON matrix file")
        sp.add_argument("--out", help="write the report to this path")
        sp.add_argument("--format", choices=["json", "csv", "pretty"], default="json")

    sp = sub.add_parser("expansive", help="expansiveness verdict with certificate")
    add_io(sp)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--check-entropy", action="store_true", dest="check_entropy")

    sp = sub.add_parser("entropy", help="entropy by mahler, peters, or packing")
    add_io(sp)
    sp.add_argument("--method", choices=["mahler", "peters", "packing"], required=True)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--nmax", type=int, default=30)
    sp.add_argument("--window", type=int, default=20)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--levels", type=int, default=2)

    sp = sub.add_parser("homoclinic", help="fundamental homoclinic point and certificates")
    add_io(sp)
    sp.add_argument("--element", help="group-ring vector m (';'-separated components)")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--radius", type=int, default=40)

    sp = sub.add_parser("ie", help="independence witnesses over a window")
    add_io(sp)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--window", type=int, default=60)
    sp.add_argument("--cap", type=int, default=4096)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("shadow", help="trace homoclinic blocks by one point")
    sp.add_argument("--config", required=True, help="JSON block description")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["json", "pretty"], default="json")

    sp = sub.add_parser("duality", help="entropy of a presentation vs its involution")
    add_io(sp)
    sp.add_argument("--grid", type=int)

    sp = sub.add_parser("freegroup-check", help="free-group annihilator identity")
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["json", "pretty"], default="json")

    sp = sub.add_parser("pipeline", help="run a list of stages from a config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["json", "pretty"], default="json")

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:  # --help / --version
            raise
        return ERROR  # usage errors exit 1; 2 is reserved for Unknown verdicts
    name = args.command
    handler = _HANDLERS.get(name) if name != "pipeline" else run_pipeline
    params = {k: v for k, v in vars(args).items() if k not in ("command",)}
    try:
        report, status = handler(params)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    except (ValueError, KeyError, CapExceeded, torus.NotInvertibleError, torus.MemoryCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    full = {
        "command": name,
        "backend": _kernels.BACKEND,
        "parameters": {
            k: v for k, v in params.items() if k not in ("out", "format") and v is not None
        },
        **report,
    }
    _emit(full, args)
    return status


if __name__ == "__main__":
    raise SystemExit(main())

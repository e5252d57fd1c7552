"""Command-line interface.

Exit codes: 0 when every check passes, 1 when a check fails or the model does not
admit the requested construction, 2 for unreadable input.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path as FsPath
from typing import Any

import click
import numpy as np

from . import catalog as cat
from .core import BlockOperator, FaceModel
from .drinfeld import drinfeld_from_model, uu_commutation_check
from .errors import BadParams, ModelError, NotClosable, NotEnhanced, RibbonLabError, SingularBlock
from .invariants import BraidWord, link_invariant, markov_move_suite
from .ribbon import mcrit_check, quotient_vanishing, ribbon_solve
from .serialization import ModelParseError, content_hash, encode_complex, encode_matrix, load_model
from .verify import (CheckReport, build_lyubashenko_double, check_bmw, check_double_star_triangular,
                     check_glf_commutant, check_hecke, check_star_triangular, enhancement_constants, max_abs,
                     relative_residual)

SUITES = ("ybe", "closable", "hecke", "bmw", "glf", "enhancement")


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-9
    cluster_radius: float = 1e-7
    format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0 or not self.cluster_radius > 0:
            raise click.BadParameter("tolerance and cluster radius must be positive")


class InputError(click.ClickException):
    exit_code = 2


class CheckFailed(click.ClickException):
    exit_code = 1


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise InputError(f"cannot parse {text!r} as a complex number") from None


# ---------------------------------------------------------------------------
# report output


def _flatten(prefix: str, obj: Any, rows: list[tuple[str, str]]) -> None:
    if isinstance(obj, dict) and set(obj) == {"re", "im"}:
        rows.append((prefix, repr(complex(obj["re"], obj["im"]))))
    elif isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, list):
        for k, v in enumerate(obj):
            _flatten(f"{prefix}[{k}]", v, rows)
    elif isinstance(obj, str):
        rows.append((prefix, obj))
    else:
        rows.append((prefix, json.dumps(obj)))


def render(report: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=1) + "\n"
    rows: list[tuple[str, str]] = []
    _flatten("", report, rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("key", "value"))
    writer.writerows(rows)
    return buf.getvalue()


def emit(report: dict[str, Any], cfg: RunConfig, out: str | None) -> None:
    text = render(report, cfg.format)
    if out:
        FsPath(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _load(path: str) -> tuple[FaceModel, cat.CatalogEntry | None]:
    try:
        model, meta = load_model(path)
    except ModelParseError as exc:
        raise InputError(f"{path}: {exc}") from None
    except (ModelError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None
    entry = None
    if meta is not None:
        try:
            entry = cat.CatalogEntry.from_metadata(model, meta)
        except (KeyError, TypeError, ValueError, ModelError) as exc:
            raise InputError(f"{path}: bad metadata: {exc}") from None
    return model, entry


def _header(command: str, cfg: RunConfig, path: str) -> dict[str, Any]:
    return {"command": command, "config": asdict(cfg), "model": {"path": str(path), "sha256": content_hash(path)}}


def _op_json(op: BlockOperator) -> list:
    return encode_matrix(op.matrix)


# ---------------------------------------------------------------------------
# commands


@click.group()
@click.option("--tol", type=float, default=1e-9, envvar="RIBBONLAB_TOL", show_default=True,
              help="Residual tolerance (env RIBBONLAB_TOL).")
@click.option("--cluster-radius", type=float, default=1e-7, show_default=True,
              help="Eigenvalue clustering radius.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized suites.")
@click.pass_context
def main(ctx: click.Context, tol: float, cluster_radius: float, fmt: str, seed: int) -> None:
    """Face models, Drinfeld and ribbon operators, and braid-closure invariants."""
    ctx.obj = RunConfig(tol, cluster_radius, fmt, seed)


@main.group()
def catalog() -> None:
    """Generate built-in models."""


def _write_model(entry: cat.CatalogEntry, out: str | None) -> None:
    from .serialization import dumps_model

    text = dumps_model(entry.model, entry.to_metadata()) + "\n"
    if out:
        FsPath(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@catalog.command("jimbo")
@click.option("--type", "type_", type=click.Choice(list("ABCD"), case_sensitive=False), required=True)
@click.option("--rank", type=int, required=True)
@click.option("--q", "q", type=str, default=None, help="Deformation parameter q.")
@click.option("--q-half", type=str, default=None, help="Square root of q (primary parameter for type B).")
@click.option("--eta", type=str, default="1.0", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def catalog_jimbo(type_: str, rank: int, q: str | None, q_half: str | None, eta: str, out: str | None) -> None:
    """Jimbo's R-matrix of type A, B, C or D."""
    try:
        p = cat.ClassicalParams.create(type_, rank, q=None if q is None else parse_complex(q), eta=parse_complex(eta),
                                       q_half=None if q_half is None else parse_complex(q_half))
        entry = cat.jimbo_model(p)
    except BadParams as exc:
        raise InputError(str(exc)) from None
    _write_model(entry, out)


@catalog.command("sos")
@click.option("--n", "n", type=int, required=True)
@click.option("--level", type=int, required=True)
@click.option("--t-num", type=int, default=1, show_default=True, help="t = exp(i pi k / (N+L)) with this k.")
@click.option("--eps", type=click.Choice(["1", "-1"]), default="1", show_default=True)
@click.option("--zeta-root", type=int, default=0, show_default=True,
              help="Index of the solution of zeta^N = eps^(N-1) t.")
@click.option("--zeta", type=str, default=None, help="Explicit zeta, overriding --zeta-root.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def catalog_sos(n: int, level: int, t_num: int, eps: str, zeta_root: int, zeta: str | None, out: str | None) -> None:
    """SU(N)_L SOS model."""
    try:
        p = cat.SOSParams(n, level, t_num, int(eps), zeta_root, None if zeta is None else parse_complex(zeta))
        entry = cat.sos_model(p)
    except BadParams as exc:
        raise InputError(str(exc)) from None
    _write_model(entry, out)


def _suite_list(values: tuple[str, ...]) -> list[str]:
    out = []
    for v in values or ("ybe",):
        for s in v.split(","):
            s = s.strip().lower()
            if s not in SUITES:
                raise InputError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
            out.append(s)
    return out


@main.command()
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--suite", "suites", multiple=True, help=f"One or more of {', '.join(SUITES)} (repeatable or comma separated).")
@click.option("--a", "a", type=str, default=None, help="First Hecke eigenvalue.")
@click.option("--b", "b", type=str, default=None, help="Second Hecke eigenvalue.")
@click.option("--lambda", "lam", type=str, default=None, help="BMW parameter lambda.")
@click.option("--q", "q", type=str, default=None, help="BMW parameter q.")
@click.option("--lambda-from-meta", is_flag=True, help="Take lambda and q from the model metadata.")
@click.option("--report", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def check(cfg: RunConfig, model_path: str, suites: tuple[str, ...], a, b, lam, q, lambda_from_meta, report) -> None:
    """Run check suites on a model file."""
    model, entry = _load(model_path)
    reports: list[CheckReport] = []
    for suite in _suite_list(suites):
        reports.extend(_run_suite(suite, model, entry, cfg, a, b, lam, q, lambda_from_meta))
    out = _header("check", cfg, model_path)
    out["reports"] = [r.to_json() for r in reports]
    out["pass"] = all(r.passed for r in reports)
    emit(out, cfg, report)
    if not out["pass"]:
        sys.exit(1)


def _need_entry(entry, what: str) -> cat.CatalogEntry:
    if entry is None:
        raise InputError(f"{what} needs catalog metadata in the model file")
    return entry


def _run_suite(suite, model, entry, cfg, a, b, lam, q, from_meta) -> list[CheckReport]:
    tol = cfg.tol
    if suite == "ybe":
        return [check_star_triangular(model, tol)]
    if suite == "closable":
        try:
            dbl = build_lyubashenko_double(model)
        except NotClosable as exc:
            return [CheckReport("closable", False, float("inf"), {"which": exc.which, "block": list(exc.block)})]
        except SingularBlock as exc:
            return [CheckReport("closable", False, float("inf"), {"which": "w", "block": [exc.source, exc.target]})]
        return [CheckReport("closable", True, 0.0), check_double_star_triangular(dbl, tol)]
    if suite == "hecke":
        if a is not None and b is not None:
            ab = (parse_complex(a), parse_complex(b))
        else:
            e = _need_entry(entry, "hecke without --a/--b")
            if e.hecke is None:
                raise InputError("model metadata has no Hecke eigenvalues; pass --a and --b")
            ab = e.hecke
        return [check_hecke(model, ab[0], ab[1], tol)]
    if suite == "bmw":
        target = model
        if from_meta:
            e = _need_entry(entry, "--lambda-from-meta")
            if e.lam is None or e.q is None:
                raise InputError("model metadata has no lambda")
            lam_v, q_v = e.lam, e.q
            # the relations are stated for the unscaled R-matrix
            target = model.scaled(1 / e.eta)
        else:
            if lam is None or q is None:
                raise InputError("bmw needs --lambda and --q, or --lambda-from-meta")
            lam_v, q_v = parse_complex(lam), parse_complex(q)
        try:
            return [check_bmw(target, lam_v, q_v, tol)]
        except RibbonLabError as exc:
            return [CheckReport("bmw", False, float("inf"), str(exc))]
    if suite == "glf":
        e = _need_entry(entry, "glf")
        out = []
        for sign in ("plus", "minus"):
            r = check_glf_commutant(model, e.m_operator(sign), tol)
            r.check = f"glf_commutant[{sign}]"
            out.append(r)
        return out
    if suite == "enhancement":
        e = _need_entry(entry, "enhancement")
        try:
            cp, cm = enhancement_constants(model, e.m_operator("plus"), tol)
        except NotEnhanced as exc:
            return [CheckReport("enhancement", False, exc.residual, {"side": exc.side, "kind": exc.kind})]
        return [CheckReport("enhancement", True, 0.0, None,
                            {"c_plus": encode_complex(cp), "c_minus": encode_complex(cm)})]
    raise AssertionError(suite)


def _drinfeld_or_fail(model: FaceModel, tol: float):
    try:
        return drinfeld_from_model(model, tol)
    except NotClosable as exc:
        raise CheckFailed(f"model is not closable: {exc}") from None
    except RibbonLabError as exc:
        raise CheckFailed(str(exc)) from None


def _residual_check(name: str, residual: float, tol: float) -> dict[str, Any]:
    return CheckReport(name, residual < tol, residual).to_json()


def _drinfeld_section(model: FaceModel, ops, tol: float) -> dict[str, Any]:
    eye = np.eye(model.graph.dim(1))
    comm = (ops.U1 @ ops.U2inv - ops.U2inv @ ops.U1).matrix
    comm_scale = max(max_abs(ops.U1.matrix) * max_abs(ops.U2inv.matrix), 1e-300)
    return {
        "edges": [e.id for e in model.graph.edges],
        "U1": _op_json(ops.U1), "U1inv": _op_json(ops.U1inv),
        "U2inv": _op_json(ops.U2inv), "U2": _op_json(ops.U2),
        "checks": [
            _residual_check("U1*U1inv", max_abs((ops.U1 @ ops.U1inv).matrix - eye), tol),
            _residual_check("U2*U2inv", max_abs((ops.U2 @ ops.U2inv).matrix - eye), tol),
            _residual_check("[U1,U2inv]", relative_residual(comm, comm_scale), tol),
            uu_commutation_check(ops, model.operator, tol).to_json(),
        ],
    }


@main.command()
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--report", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def drinfeld(cfg: RunConfig, model_path: str, report: str | None) -> None:
    """Drinfeld operators on the edge space."""
    model, _ = _load(model_path)
    ops = _drinfeld_or_fail(model, cfg.tol)
    out = _header("drinfeld", cfg, model_path)
    out.update(_drinfeld_section(model, ops, cfg.tol))
    out["pass"] = all(c["pass"] for c in out["checks"])
    emit(out, cfg, report)
    if not out["pass"]:
        sys.exit(1)


def edge_commutant_dimension(model: FaceModel, tol: float = 1e-9) -> int:
    """Dimension of the block-preserving edge operators ``X`` with ``X (x) 1`` and ``1 (x) X`` commuting with ``w``."""
    from .core import identity, truncated_tensor

    g = model.graph
    w = model.operator.matrix
    free = np.argwhere(g.block_mask(1))
    cols = []
    for i, j in free:
        x = np.zeros((g.dim(1), g.dim(1)))
        x[i, j] = 1.0
        xo = BlockOperator(g, 1, x)
        left = truncated_tensor(xo, identity(g, 1)).matrix
        right = truncated_tensor(identity(g, 1), xo).matrix
        cols.append(np.concatenate([(left @ w - w @ left).ravel(), (right @ w - w @ right).ravel()]))
    mat = np.array(cols).T
    sv = np.linalg.svd(mat, compute_uv=False)
    return len(free) - int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 0.0)))


@main.command()
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--report", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def ribbon(cfg: RunConfig, model_path: str, report: str | None) -> None:
    """Ribbon and modified ribbon operators with the trace and quotient criteria."""
    model, entry = _load(model_path)
    ops = _drinfeld_or_fail(model, cfg.tol)
    try:
        sols = ribbon_solve(ops, cfg.tol, cfg.cluster_radius)
    except RibbonLabError as exc:
        raise CheckFailed(str(exc)) from None
    out = _header("ribbon", cfg, model_path)
    out["drinfeld"] = _drinfeld_section(model, ops, cfg.tol)
    out["solutions"] = []
    ok = True
    ideals = entry.ideal_vectors() if entry is not None else {}
    for s in sols:
        item = s.to_json()
        item["residuals_pass"] = all(v < cfg.tol * 10 for v in s.residuals.values())
        ok &= item["residuals_pass"]
        if entry is not None:
            mc = mcrit_check(s.M, entry.s2, cfg.tol)
            item["mcrit"] = mc.to_json()
            ok &= mc.passed
        else:
            item["mcrit"] = None
        if ideals:
            item["quotient_vanishing"] = quotient_vanishing(s.M, ideals, cfg.tol).to_json()
        out["solutions"].append(item)
    out["descends"] = {s["sign"]: s["quotient_vanishing"]["pass"] for s in out["solutions"]
                       if "quotient_vanishing" in s}
    dim = edge_commutant_dimension(model, cfg.tol)
    blocks = len(model.graph.blocks(1))
    out["edge_commutant_dimension"] = dim
    out["edge_block_count"] = blocks
    out["exhaustive"] = dim <= blocks
    out["pass"] = bool(ok)
    emit(out, cfg, report)
    if not ok:
        sys.exit(1)


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mrib", type=click.Choice(["plus", "minus"]), default="plus", show_default=True)
@click.option("--braid", type=str, required=True, help='Signed generator indices, e.g. "1 1 -2".')
@click.option("--strands", type=int, default=None)
@click.option("--report", type=click.Path(dir_okay=False), default=None)
@click.option("--markov-suite", is_flag=True, help="Append the Markov-move drift report.")
@click.option("--trials", type=int, default=20, show_default=True)
@click.pass_obj
def invariant(cfg: RunConfig, model_path: str, mrib: str, braid: str, strands: int | None, report: str | None,
              markov_suite: bool, trials: int) -> None:
    """Framed and normalized invariant of a braid closure."""
    model, entry = _load(model_path)
    try:
        beta = BraidWord.parse(braid, strands)
    except ValueError as exc:
        raise InputError(f"bad braid word: {exc}") from None
    if entry is not None:
        M = entry.m_operator(mrib)
    else:
        plus, minus = ribbon_solve(_drinfeld_or_fail(model, cfg.tol), cfg.tol, cfg.cluster_radius)
        M = plus.M if mrib == "plus" else minus.M
    try:
        rep = link_invariant(model, M, beta, cfg.tol)
    except NotEnhanced as exc:
        raise CheckFailed(f"not enhanced: {exc}") from None
    except RibbonLabError as exc:
        raise CheckFailed(str(exc)) from None
    out = _header("invariant", cfg, model_path)
    out["mrib"] = mrib
    out["invariant"] = rep.to_json()
    ok = True
    if markov_suite:
        mm = markov_move_suite(model, M, beta, trials=trials, seed=cfg.seed, tol=max(cfg.tol, 1e-8))
        out["markov_suite"] = mm.to_json()
        ok = mm.passed
    out["pass"] = ok
    emit(out, cfg, report)
    if not ok:
        sys.exit(1)


if __name__ == "__main__":  # pragma: no cover
    main()

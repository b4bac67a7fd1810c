"""Command-line entry point: parse, dispatch, serialize.

Every command writes one JSON report (stdout or ``--out``).  Reports are
deterministic for fixed inputs and seed; wall-clock timings are added only
with ``--timing``.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence

import click

from . import __version__
from .exact import as_rational, fmt

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EQUALITY_ONLY = 2
EXIT_NO_WITNESS = 3
EXIT_FALSIFIED = 4

GAMMA_CHOICES = {"8": "8", "8.486": "8486/1000", "32/3": "32/3", "auto": None}


class RunReport:
    """Machine-readable envelope shared by all commands."""

    def __init__(self, command: str, argv: Sequence[str], inputs: Sequence[str] = (), seed: Optional[int] = None):
        self.command = command
        self.argv = list(argv)
        self.inputs = {p: _digest(p) for p in inputs}
        self.seed = seed
        self.items: List[dict] = []
        self.summary: dict = {}
        self.status = "ok"
        self._start = time.perf_counter()

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "command": self.command,
            "argv": self.argv,
            "inputs": self.inputs,
            "seed": self.seed,
            "version": __version__,
            "status": self.status,
            "summary": self.summary,
            "items": self.items,
        }
        if timing:
            out["seconds"] = round(time.perf_counter() - self._start, 3)
        return out


_ARGV: Optional[List[str]] = None


def _argv() -> List[str]:
    return list(_ARGV) if _ARGV is not None else sys.argv[1:]


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()


def _decimal(x: Fraction) -> str:
    return f"{float(x):.12g}"


def _rational(x: Fraction) -> dict:
    return {"exact": fmt(x), "decimal": _decimal(x)}


def _emit(report: RunReport, out: Optional[str], timing: bool) -> None:
    text = json.dumps(report.to_json(timing), indent=2, sort_keys=False) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _fail_input(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(EXIT_USAGE)


def _seed(seed: Optional[int]) -> int:
    from .sampling import seed_from_env

    return seed if seed is not None else seed_from_env()


def _load(path: str):
    from .forms import FormError, load_instance

    try:
        return load_instance(path)
    except (FormError, TypeError, ValueError, ZeroDivisionError) as exc:
        _fail_input(FormError(f"{path}: {exc}"))


out_option = click.option("--out", "-o", type=click.Path(dir_okay=False, writable=True), default=None,
                          help="Write the JSON report here instead of stdout.")
timing_option = click.option("--timing", is_flag=True, help="Include wall-clock seconds in the report.")
jobs_option = click.option("--jobs", "-j", type=click.IntRange(1), default=1, show_default=True,
                           help="Worker processes.")


@click.group()
@click.version_option(__version__, prog_name="gamma14")
def main() -> None:
    """Exact small-value tools for shifted indefinite quinary quadratic forms."""


@main.command()
@click.argument("form_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--gamma", type=click.Choice(sorted(GAMMA_CHOICES)), default=None,
              help="Override the gamma stored in the form file.")
@out_option
@timing_option
def reduce(form_file: str, gamma: Optional[str], out: Optional[str], timing: bool) -> None:
    """Normal shape and case parameters of FORM_FILE, with the unimodular transform."""
    from .forms import FormError
    from .cascade import classify
    from .reduction import NotFoundWithinRadius, birch_instance, birch_reduce, case_params

    inst = _load(form_file)
    g = as_rational(GAMMA_CHOICES[gamma]) if gamma and GAMMA_CHOICES[gamma] else inst.gamma
    report = RunReport("reduce", _argv(), [form_file])
    try:
        bf = birch_reduce(inst.form)
        params = case_params(bf, g)
    except (FormError, NotFoundWithinRadius) as exc:
        _fail_input(exc)
    label = classify(params, birch_instance(inst, bf).shift, bf)
    report.items.append({"normal_shape": bf.to_json(), "params": params.to_json(), "case": label.to_json()})
    report.summary = {"a": fmt(bf.a), "d": params.d.to_json()["decimal"], "d5": fmt(params.d5), "m": params.m,
                      "branch": label.branch.value, "regime": params.regime}
    _emit(report, out, timing)


@main.command()
@click.argument("form_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--gamma", type=click.Choice(sorted(GAMMA_CHOICES)), default=None,
              help="Gamma to certify against; 'auto' lets the case dispatcher choose.")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the per-stage trace here.")
@click.option("--radius", type=click.IntRange(1), default=None, help="Sup-norm radius for the final search.")
@out_option
@timing_option
def solve(form_file: str, gamma: Optional[str], trace_path: Optional[str], radius: Optional[int],
          out: Optional[str], timing: bool) -> None:
    """Find x with 0 < Q(x + c) <= (gamma |D|)^(1/5).

    Exit status: 0 strict witness, 2 only the equality case holds, 3 nothing found.
    """
    from .cascade import ORACLE_RADIUS, NoWitnessInBox, solve_instance
    from .forms import FormError

    inst = _load(form_file)
    if gamma and GAMMA_CHOICES[gamma]:
        inst = inst.with_gamma(as_rational(GAMMA_CHOICES[gamma]))
    report = RunReport("solve", _argv(), [form_file])
    code = EXIT_OK
    trace = None
    try:
        w, trace = solve_instance(inst, auto_gamma=gamma == "auto", oracle_radius=radius or ORACLE_RADIUS)
        item = {"witness": w.to_json(), "value": _rational(w.value), "route": trace.route,
                "gamma": fmt(trace.label.gamma_used if gamma == "auto" else inst.gamma)}
        report.items.append(item)
        if not w.strict:
            code = EXIT_EQUALITY_ONLY
            report.status = "equality-only"
    except NoWitnessInBox as exc:
        code = EXIT_NO_WITNESS
        report.status = "no-witness"
        report.items.append({"error": str(exc.args[0])})
        trace = exc.args[1] if len(exc.args) > 1 else None
    except FormError as exc:
        _fail_input(exc)
    if trace_path and trace is not None:
        with open(trace_path, "w") as fh:
            json.dump(trace.to_json(), fh, indent=2)
            fh.write("\n")
    _emit(report, out, timing)
    sys.exit(code)


def _resolve_table(table: Optional[str], scenario) -> tuple:
    from .covers import bundled_table, read_table

    if table is None:
        if not scenario.table:
            raise click.UsageError(f"scenario {scenario.name} has no bundled table; pass --table")
        return bundled_table(scenario.table), []
    if os.path.exists(table):
        return read_table(table), [table]
    return bundled_table(table), []


@main.command("verify-cover")
@click.option("--scenario", required=True, help="Scenario name from the catalogue.")
@click.option("--table", default=None, help="Cover CSV (path or bundled name); defaults to the scenario's table.")
@click.option("--scenarios", "scenario_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Alternative scenario catalogue (JSON).")
@click.option("--strict-chain", is_flag=True, help="Treat non-decreasing breakpoints as a hard error.")
@click.option("--entries", is_flag=True, help="Include every row in the report.")
@jobs_option
@out_option
@timing_option
def verify_cover(scenario: str, table: Optional[str], scenario_file: Optional[str], strict_chain: bool,
                 entries: bool, jobs: int, out: Optional[str], timing: bool) -> None:
    """Check each (h, k, lambda) row of a cover table against a scenario."""
    from .covers import CoverError, load_scenarios, verify_table

    try:
        scen = load_scenarios(scenario_file)
        if scenario not in scen:
            raise click.UsageError(f"unknown scenario {scenario!r}; known: {', '.join(sorted(scen))}")
        sc = scen[scenario]
        rows, paths = _resolve_table(table, sc)
        tr = verify_table(rows, sc, tolerate_chain_defects=not strict_chain, jobs=jobs)
    except (CoverError, OSError) as exc:
        _fail_input(exc)
    report = RunReport("verify-cover", _argv(), paths + ([scenario_file] if scenario_file else []))
    report.summary = tr.summary()
    report.items = [r.to_json() for r in tr.rows] if entries else [
        r.to_json() for r in tr.rows if r.label != "Certified"]
    if tr.falsified:
        report.status = "falsified"
    _emit(report, out, timing)
    sys.exit(EXIT_FALSIFIED if tr.falsified else EXIT_OK)


@main.command("gen-cover")
@click.option("--scenario", required=True, help="Scenario name from the catalogue.")
@click.option("--scenarios", "scenario_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--k-max", type=click.IntRange(1), default=340, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the generated table as CSV.")
@jobs_option
@out_option
@timing_option
def gen_cover(scenario: str, scenario_file: Optional[str], k_max: int, csv_path: Optional[str], jobs: int,
              out: Optional[str], timing: bool) -> None:
    """Generate a cover for a scenario greedily and re-verify it."""
    from .covers import CoverageStuck, CoverError, generate_cover, load_scenarios, verify_table, write_table

    try:
        scen = load_scenarios(scenario_file)
        if scenario not in scen:
            raise click.UsageError(f"unknown scenario {scenario!r}; known: {', '.join(sorted(scen))}")
        sc = scen[scenario]
        rows = generate_cover(sc, k_max=k_max)
    except CoverError as exc:
        _fail_input(exc)
    except CoverageStuck as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NO_WITNESS)
    tr = verify_table(rows, sc, jobs=jobs)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            write_table(rows, fh)
    report = RunReport("gen-cover", _argv(), [scenario_file] if scenario_file else [])
    report.summary = {**tr.summary(), "entries": len(rows)}
    report.items = [{"n": e.n, "h": fmt(e.h), "k": e.k, "lambda": _rational(e.lam), "remark": str(e.remark)}
                    for e in rows]
    ok = tr.count("Certified") == len(rows)
    if not ok:
        report.status = "falsified"
    _emit(report, out, timing)
    sys.exit(EXIT_OK if ok else EXIT_FALSIFIED)


def _certify_one(args):
    from .oracle import CertificateFailure, certify_critical

    form_id, radius = args
    try:
        return certify_critical(form_id, radius=radius).to_json()
    except CertificateFailure as exc:
        out = {"form": form_id, "status": "failed", "reason": str(exc)}
        if exc.search is not None:
            out["search"] = exc.search.to_json()
        return out


@main.command("verify-critical")
@click.option("--form", "forms", multiple=True, help="Restrict to these forms (Q1..Q6).")
@click.option("--radius", type=click.IntRange(1), default=6, show_default=True)
@jobs_option
@out_option
@timing_option
def verify_critical(forms: Sequence[str], radius: int, jobs: int, out: Optional[str], timing: bool) -> None:
    """Residue certificate plus box minimum for each critical form."""
    from .oracle import CRITICAL_FORMS

    ids = list(forms) or list(CRITICAL_FORMS)
    unknown = [f for f in ids if f not in CRITICAL_FORMS]
    if unknown:
        raise click.UsageError(f"unknown forms {unknown}; known: {', '.join(CRITICAL_FORMS)}")
    work = [(f, radius) for f in ids]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            items = list(pool.map(_certify_one, work))
    else:
        items = [_certify_one(w) for w in work]
    report = RunReport("verify-critical", _argv())
    if not timing:
        for it in items:
            it.pop("seconds", None)
    report.items = items
    certified = [it["form"] for it in items if it.get("status") != "failed"]
    report.summary = {"forms": len(items), "certified": len(certified),
                      "failed": [it["form"] for it in items if it.get("status") == "failed"]}
    if len(certified) != len(items):
        report.status = "falsified"
    _emit(report, out, timing)
    sys.exit(EXIT_OK if len(certified) == len(items) else EXIT_FALSIFIED)


def _verify_tables_one(args):
    from .oracle import CaseSampler, load_case_table, verify_case_table

    path, seed, trials = args
    return verify_case_table(load_case_table(path), CaseSampler(seed), trials=trials).to_json()


@main.command("verify-case-tables")
@click.argument("tables", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--trials", type=click.IntRange(1), default=10_000, show_default=True, help="Trials per table.")
@click.option("--seed", type=int, default=None, help="Base seed (default: GAMMA14_SEED or built-in).")
@jobs_option
@out_option
@timing_option
def verify_case_tables(tables: Sequence[str], trials: int, seed: Optional[int], jobs: int, out: Optional[str],
                       timing: bool) -> None:
    """Sample exact parameters for each case-table row and re-evaluate its witness.

    Without TABLES the bundled transcriptions are used.
    """
    from .oracle import TableError, bundled_case_table_paths

    base = _seed(seed)
    paths = list(tables) or bundled_case_table_paths()
    work = [(p, base + i, trials) for i, p in enumerate(paths)]
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                items = list(pool.map(_verify_tables_one, work))
        else:
            items = [_verify_tables_one(w) for w in work]
    except (TableError, ValueError, OSError) as exc:
        _fail_input(exc)
    report = RunReport("verify-case-tables", _argv(), list(tables), base)
    report.items = items
    falsified = sum(it["falsified_count"] for it in items)
    report.summary = {"tables": len(items), "trials": sum(it["trials"] for it in items),
                      "falsified": falsified, "warnings": sum(len(it["warnings"]) for it in items),
                      "falsified_tables": [it["table"] for it in items if not it["ok"]]}
    if falsified:
        report.status = "falsified"
    _emit(report, out, timing)
    sys.exit(EXIT_FALSIFIED if falsified else EXIT_OK)


@main.command()
@click.argument("form_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--box", type=click.IntRange(1), default=8, show_default=True, help="Sup-norm radius.")
@click.option("--cap", type=click.IntRange(1), default=64, show_default=True, help="Witnesses to list.")
@out_option
@timing_option
def oracle(form_file: str, box: int, cap: int, out: Optional[str], timing: bool) -> None:
    """Least positive value of Q(x + c) over the box |x_i| <= BOX."""
    from .oracle import SearchBox, brute_search

    inst = _load(form_file)
    res = brute_search(inst, SearchBox.cube(box, inst.n), cap=cap)
    report = RunReport("oracle", _argv(), [form_file])
    report.items.append(res.to_json())
    report.summary = {"minimum": _rational(res.minimum) if res.minimum is not None else None,
                      "count": res.count}
    if res.minimum is None:
        report.status = "no-positive-value"
    _emit(report, out, timing)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Invoke the CLI, mapping click's usage errors to exit status 1."""
    global _ARGV
    _ARGV = list(argv) if argv is not None else sys.argv[1:]
    try:
        main.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()

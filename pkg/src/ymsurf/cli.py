"""Command-line front end.

Every subcommand writes one table, as CSV or JSON, preceded by a metadata
block holding the fully resolved configuration, the seed, the package
version and the largest tail bound of the run.  Floats are printed with 17
significant digits in both formats, so the two carry identical values and
reruns diff exactly.

CSV output starts with ``#`` comment lines containing the metadata as JSON,
followed by the column header and the rows.  JSON output is an object
``{"metadata": ..., "columns": [...], "rows": [[...], ...]}``.

Exit status is 0 on success, 2 for an invalid configuration (including
malformed maps) and 3 when a numeric target such as a tail bound cannot be
met.  Sweeps over parameter points run in a process pool whose default size
is read from the ``YMSURF_THREADS`` environment variable.
"""
from __future__ import annotations

import csv
import functools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from ._bounds import TruncationError
from .charcalc import ConjugacyClass
from .maps import (
    AreaWeightedMap, MapError, example_torus_map, extract_disc, format_word, validate_and_genus, vertex_classes,
)
from .partition import TruncationPolicy, dk_free_energy_weak, partition_function, witten_zeta
from .qseries import limit_table_value
from .sampler import (
    MAX_STEP, LoopRecipe, McmcParams, RngStream, euler_bias_budget, mcmc_chains, recipe_estimate, recipe_samples,
)
from .sampler import _check_steps
from .weights import Family, make_group
from .wilson import (
    commutator_moment, mf_plane_power, mf_sphere_power, nonsep_density, sep_density, torus_moments,
)

THREADS_ENV = "YMSURF_THREADS"
FAMILIES = ("Atilde", "A", "B", "C", "D")
TAIL_MODES = ("auto", "rigorous-g1", "rigorous-g2plus", "heuristic-sphere")
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


# ---------------------------------------------------------------------------
# formatting

def format_value(v) -> str:
    """Text of one table cell: floats with 17 significant digits, missing values empty."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return ""
        return format(v, ".17g")
    return str(v)


def _json_cell(v) -> str:
    if v is None or isinstance(v, (bool, np.bool_)):
        return json.dumps(None if v is None else bool(v))
    if isinstance(v, (int, np.integer, float, np.floating)):
        text = format_value(v)
        # non-finite values have no JSON literal
        return text if text and math.isfinite(float(v)) else json.dumps(text or None)
    return json.dumps(str(v))


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def render_csv(meta: dict, columns, rows) -> str:
    head = json.dumps(_jsonable(meta), indent=1, sort_keys=True).splitlines()
    lines = ["# " + h for h in head]
    lines.append(",".join(columns))
    for row in rows:
        cells = []
        for v in row:
            s = format_value(v)
            cells.append(f'"{s}"' if ("," in s or '"' in s) and not s.startswith('"') else s)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_json(meta: dict, columns, rows) -> str:
    body = ",\n  ".join("[" + ", ".join(_json_cell(v) for v in row) + "]" for row in rows)
    return ("{\n\"metadata\": " + json.dumps(_jsonable(meta), indent=1, sort_keys=True)
            + ",\n\"columns\": " + json.dumps(list(columns))
            + ",\n\"rows\": [\n  " + body + "\n]\n}\n")


def read_table(text: str) -> tuple:
    """Parse the output of either format back into ``(metadata, columns, rows)`` of strings."""
    text = text.lstrip()
    if text.startswith("{"):
        data = json.loads(text)
        # numbers are read back as their printed text
        raw = json.loads(text, parse_float=str, parse_int=str)
        rows = [[format_value(v) if isinstance(v, bool) else v for v in row] for row in raw["rows"]]
        return data["metadata"], data["columns"], rows
    lines = text.splitlines()
    meta = json.loads("\n".join(line[2:] for line in lines if line.startswith("# ")))
    body = [line for line in lines if not line.startswith("#")]
    table = list(csv.reader(body))
    return meta, table[0], table[1:]


# ---------------------------------------------------------------------------
# plumbing

def _parse_list(kind):
    def convert(ctx, param, value):
        if value is None:
            return None
        try:
            out = tuple(kind(x) for x in str(value).replace(" ", "").split(",") if x)
        except ValueError:
            raise click.BadParameter(f"expected a comma-separated list of {kind.__name__}, got {value!r}")
        if not out:
            raise click.BadParameter("empty list")
        return out
    return convert


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise click.UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}")


def output_options(f, figure: bool = True):
    """Options shared by every subcommand; ``--figure`` only where the table has a natural plot."""
    if figure:
        f = click.option("--figure", type=click.Path(dir_okay=False), default=None,
                         help="Also save a plot of the table (needs matplotlib, the 'plot' extra).")(f)
    f = click.option("--output", "-o", type=click.Path(dir_okay=False, allow_dash=True), default="-",
                     show_default=True, help="Output file, '-' for standard output.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                     show_default=True)(f)
    return f


def policy_options(f):
    f = click.option("--tail-mode", type=click.Choice(TAIL_MODES), default="auto", show_default=True)(f)
    f = click.option("--max-size", type=int, default=None, help="Cap on the weight size (default: internal).")(f)
    f = click.option("--tol", type=float, default=1e-10, show_default=True, help="Target tail bound.")(f)
    return f


def threads_option(f):
    return click.option("--threads", type=int, default=None,
                        help=f"Worker processes for parameter sweeps (default: ${THREADS_ENV} or 1).")(f)


def _policy(params) -> TruncationPolicy:
    return TruncationPolicy(max_size=params["max_size"], tol=params["tol"], tail_mode=params["tail_mode"])


def _sweep(fn, points, workers):
    """Evaluate ``fn`` on each point, in order, optionally in a process pool."""
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(points))) as pool:
            return list(pool.map(fn, points))
    return [fn(p) for p in points]


def guarded(f):
    """Map library errors onto the documented exit status."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except TruncationError as exc:
            click.echo(f"error: numeric failure: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)
        except MapError as exc:
            click.echo(f"error: invalid map ({exc.reason}): {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except (ValueError, KeyError) as exc:
            click.echo(f"error: invalid configuration: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except (ArithmeticError, np.linalg.LinAlgError) as exc:
            click.echo(f"error: numeric failure: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)
    return wrapper


def _plot(path, columns, rows, x, y, group_by=None):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise click.UsageError("--figure needs matplotlib; install the 'plot' extra")
    ix, iy = columns.index(x), columns.index(y)
    ig = columns.index(group_by) if group_by else None
    series = {}
    for row in rows:
        if row[ix] is None or row[iy] is None:
            continue
        key = row[ig] if ig is not None else y
        series.setdefault(key, ([], []))
        series[key][0].append(float(row[ix]))
        series[key][1].append(float(row[iy]))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for key, (xs, ys) in series.items():
        ax.plot(xs, ys, "o-", label=str(key))
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    if len(series) > 1:
        ax.legend(title=group_by)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def emit(ctx: click.Context, columns, rows, *, seed=None, resolved=None, extra=None, tail_column=None,
         plot=None):
    """Write the table with its metadata block; ``plot`` is ``(x, y, group_by)`` for ``--figure``."""
    params = ctx.params
    config = {k: v for k, v in params.items() if k not in ("fmt", "output", "figure")}
    config.update(resolved or {})
    meta = {
        "program": "ymsurf",
        "version": __version__,
        "command": ctx.info_name,
        "config": config,
        "seed": seed,
        "format": params["fmt"],
    }
    if tail_column is not None:
        i = columns.index(tail_column)
        bounds = [float(r[i]) for r in rows if r[i] is not None]
        meta["tail_bounds"] = {"column": tail_column, "max": max(bounds) if bounds else None}
    meta.update(extra or {})
    text = (render_json if params["fmt"] == "json" else render_csv)(meta, columns, rows)
    if params["output"] == "-":
        click.echo(text, nl=False)
    else:
        Path(params["output"]).write_text(text)
    if params.get("figure"):
        _plot(params["figure"], list(columns), rows, *plot)


def _workers(threads):
    return threads if threads is not None else _default_threads()


# ---------------------------------------------------------------------------
# commands

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="ymsurf")
def main():
    """Two-dimensional Yang-Mills on surfaces: character sums, limits, Wilson loops and samplers."""


def _partition_point(p):
    fam, r, g, T, policy = p
    z = partition_function(make_group(fam, r), g, T, policy)
    if g >= 1:
        # the limit is cheap; keep its error bar well below the tail bound of Z
        lim = limit_table_value(fam, g, T, min(policy.tol, 1e-14))
        gap = abs(z.value + 0.5 * z.tail_bound - lim.value)
        return [fam, r, g, T, z.value, z.tail_bound, lim.value, gap]
    return [fam, r, g, T, z.value, z.tail_bound, None, None]


@main.command()
@click.option("--family", type=click.Choice(FAMILIES), required=True)
@click.option("--ranks", callback=_parse_list(int), required=True, help="Comma-separated ranks, e.g. 10,20,40.")
@click.option("--genus", type=int, default=1, show_default=True)
@click.option("--area", "areas", callback=_parse_list(float), default="2", show_default=True,
              help="Comma-separated total areas.")
@policy_options
@threads_option
@output_options
@click.pass_context
@guarded
def partition(ctx, family, ranks, genus, areas, tol, max_size, tail_mode, threads, **_):
    """Partition functions against their large-rank limits.

    The gap column is |Z - limit| with Z taken at the midpoint of its
    certified interval; there is no tabulated limit on the sphere.
    """
    policy = _policy(ctx.params)
    policy.resolve(genus)
    pts = [(family, r, genus, T, policy) for T in areas for r in ranks]
    rows = _sweep(_partition_point, pts, _workers(threads))
    emit(ctx, ["family", "r", "g", "T", "Z", "tail_bound", "limit", "gap"], rows,
         resolved={"tail_mode_resolved": policy.resolve(genus), "threads": _workers(threads)},
         tail_column="tail_bound", plot=("r", "gap", "T"))


def _zeta_point(p):
    fam, r, s, policy = p
    z = witten_zeta(make_group(fam, r), s, policy)
    return [fam, r, s, z.value, z.tail_bound]


@main.command()
@click.option("--family", type=click.Choice(FAMILIES[1:]), required=True)
@click.option("--ranks", callback=_parse_list(int), required=True)
@click.option("--s", "s_values", callback=_parse_list(float), default="2", show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@threads_option
@output_options
@click.pass_context
@guarded
def zeta(ctx, family, ranks, s_values, tol, threads, **_):
    """Witten zeta function sum_lambda d_lambda^-s, with certified tail bounds."""
    policy = TruncationPolicy(tol=tol)
    pts = [(family, r, s, policy) for s in s_values for r in ranks]
    rows = _sweep(_zeta_point, pts, _workers(threads))
    emit(ctx, ["family", "r", "s", "zeta", "tail_bound"], rows, resolved={"threads": _workers(threads)},
         tail_column="tail_bound", plot=("r", "zeta", "s"))


@main.command()
@click.option("--plane", "mode", flag_value="plane", default=True, help="Free unitary Brownian motion moments.")
@click.option("--sphere", "mode", flag_value="sphere", help="Weak-phase sphere master field.")
@click.option("--cross", "mode", flag_value="cross", help="Plane moments mu_{sigma^2/k^2}(n k) against the sphere.")
@click.option("--t", "t", type=float, default=1.0, show_default=True)
@click.option("--T", "T", type=float, default=4.0, show_default=True, help="Sphere area.")
@click.option("--n", "powers", callback=_parse_list(int), default="1", show_default=True)
@click.option("--k", "ks", callback=_parse_list(int), default="4,16,64", show_default=True,
              help="Scales for --cross.")
@output_options
@click.pass_context
@guarded
def masterfield(ctx, mode, t, T, powers, ks, **_):
    """Master-field moments on the plane and the sphere."""
    if mode == "plane":
        rows = [[t, n, mf_plane_power(t, n)] for n in powers]
        emit(ctx, ["t", "n", "mu"], rows, plot=("n", "mu", None))
        return
    if mode == "sphere":
        rows = [[t, T, n, mf_sphere_power(t, T, n)] for n in powers]
        emit(ctx, ["t", "T", "n", "mu"], rows, plot=("n", "mu", None))
        return
    if not 0 < t < T:
        raise ValueError("--cross needs 0 < t < T")
    var = t * (T - t) / T
    rows = []
    for n in powers:
        sph = mf_sphere_power(t, T, n)
        for k in ks:
            pl = mf_plane_power(var / k ** 2, n * k)
            rows.append([t, T, n, k, pl, sph, abs(pl - sph)])
    emit(ctx, ["t", "T", "n", "k", "plane", "sphere", "diff"], rows, resolved={"sigma2": var},
         plot=("k", "diff", "n"))


def _torus_point(p):
    fam, r, T, k, policy = p
    g = make_group(fam, r)
    e, m2, err = torus_moments(g, T, k, policy, with_bound=True)
    return [fam, r, T, k, e, m2, err, 1.0 / g.matrix_size]


@main.command("wilson-torus")
@click.option("--family", type=click.Choice(FAMILIES), required=True)
@click.option("--ranks", callback=_parse_list(int), required=True)
@click.option("--areas", callback=_parse_list(float), default="1", show_default=True)
@click.option("--k", "ks", callback=_parse_list(int), default="1", show_default=True)
@policy_options
@threads_option
@output_options
@click.pass_context
@guarded
def wilson_torus(ctx, family, ranks, areas, ks, threads, **_):
    """E[W] and E[|W|^2] for the k-th power of a non-separating loop on the torus.

    The bound column is 1/n, which bounds both moments.
    """
    policy = _policy(ctx.params)
    pts = [(family, r, T, k, policy) for r in ranks for T in areas for k in ks]
    rows = _sweep(_torus_point, pts, _workers(threads))
    emit(ctx, ["family", "r", "T", "k", "E", "M2", "tail_bound", "bound"], rows,
         resolved={"threads": _workers(threads)}, tail_column="tail_bound", plot=("T", "M2", "k"))


def _line_class(group, theta):
    """Class of ``exp(i theta)`` on one eigenvalue pair; for SU the phase is balanced."""
    a = [0.0] * group.n_coords
    a[0] = theta
    if group.family is Family.SPECIAL_UNITARY:
        a[-1] = -theta
    return ConjugacyClass(tuple(a))


@main.command()
@click.option("--family", type=click.Choice(FAMILIES), required=True)
@click.option("--rank", type=int, required=True)
@click.option("--genus", type=int, default=1, show_default=True)
@click.option("--area", type=float, default=2.0, show_default=True)
@click.option("--separating", is_flag=True, help="Separating loop: pieces (genus, area) and (genus2, area2).")
@click.option("--genus2", type=int, default=1, show_default=True)
@click.option("--area2", type=float, default=1.0, show_default=True)
@click.option("--points", type=int, default=9, show_default=True, help="Angles on [0, pi].")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--max-size", type=int, default=None)
@output_options
@click.pass_context
@guarded
def density(ctx, family, rank, genus, area, separating, genus2, area2, points, tol, max_size, **_):
    """Holonomy densities of a simple loop along the class exp(i theta) on one eigenvalue pair.

    The non-separating table has the unnormalised sum and its value divided
    by Z; the separating table is already normalised.  Ranks are capped as
    for all pointwise character sums.
    """
    if points < 2:
        raise ValueError("--points must be at least 2")
    g = make_group(family, rank)
    grid = np.linspace(0.0, math.pi, points)
    if separating:
        rows = [[family, rank, genus, area, genus2, area2, float(th),
                 sep_density(g, genus, area, genus2, area2, _line_class(g, th), tol, max_size)] for th in grid]
        emit(ctx, ["family", "r", "g1", "T1", "g2", "T2", "theta", "density"], rows,
             plot=("theta", "density", None))
        return
    z = partition_function(g, genus, area, TruncationPolicy(max_size=max_size, tol=tol))
    rows = []
    for th in grid:
        v, err = nonsep_density(g, genus, area, _line_class(g, th), tol, max_size, with_bound=True)
        rows.append([family, rank, genus, area, float(th), v, err, v / z.value])
    emit(ctx, ["family", "r", "g", "T", "theta", "density", "tail_bound", "normalised"], rows,
         resolved={"Z": z.value, "Z_tail_bound": z.tail_bound}, tail_column="tail_bound",
         plot=("theta", "normalised", None))


@main.command()
@click.option("--areas", callback=_parse_list(float), default=None, help="Explicit areas in (0, pi^2].")
@click.option("--points", type=int, default=20, show_default=True, help="Uniform grid on (0, pi^2] otherwise.")
@output_options
@click.pass_context
@guarded
def dk(ctx, areas, points, **_):
    """Weak-phase free energy of the unitary sphere in the large-rank limit."""
    if areas is None:
        if points < 1:
            raise ValueError("--points must be positive")
        areas = tuple(math.pi ** 2 * (i + 1) / points for i in range(points))
    rows = [[T, dk_free_energy_weak(T)] for T in areas]
    emit(ctx, ["T", "F"], rows, resolved={"areas": list(areas)}, plot=("T", "F", None))


@main.command("map")
@click.option("--validate", "validate_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Check a map file and report its genus.")
@click.option("--extract", "extract_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Cut a disc out of a map file.")
@click.option("--faces", callback=_parse_list(str), default=None, help="Face names or 1-based indices of the disc.")
@click.option("--loop", default=None, help="Boundary loop to check, e.g. \"d e f\".")
@click.option("--write", "write_path", type=click.Path(dir_okay=False), default=None,
              help="Save the extracted planar map as JSON.")
@click.option("--example", "example_path", type=click.Path(dir_okay=False), default=None,
              help="Write the built-in three-face torus map as JSON.")
@functools.partial(output_options, figure=False)
@click.pass_context
@guarded
def map_cmd(ctx, validate_path, extract_path, faces, loop, write_path, example_path, **_):
    """Validate maps, extract discs, or write the example map.

    Map files are JSON objects with ``edges`` (labels), ``vertices`` (count)
    and ``faces`` (objects with ``word``, a list of labels with a trailing
    ``'`` for inverse traversal, ``area`` and an optional ``name``).
    """
    chosen = [p for p in (validate_path, extract_path, example_path) if p is not None]
    if len(chosen) != 1:
        raise click.UsageError("give exactly one of --validate, --extract and --example")
    if example_path is not None:
        m = example_torus_map()
        Path(example_path).write_text(json.dumps(m.to_dict(), indent=1) + "\n")
        validate_path = example_path
    path = validate_path or extract_path
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MapError("format", f"{path}: not valid JSON ({exc})") from None
    m = AreaWeightedMap.from_dict(data)
    if validate_path is not None:
        genus = validate_and_genus(m)
        V = len(vertex_classes(m)[1])
        emit(ctx, ["vertices", "edges", "faces", "genus", "total_area"],
             [[V, m.edge_count, m.face_count, genus, m.total_area]], resolved={"map": data})
        return
    if not faces:
        raise click.UsageError("--extract needs --faces")
    sel = [int(f) - 1 if f.isdigit() else f for f in faces]
    d = extract_disc(m, sel, loop)
    p = d.map
    if write_path is not None:
        Path(write_path).write_text(json.dumps(p.to_dict(), indent=1) + "\n")
    rows = [[name, format_word(w), None if i == p.outer else a, i == p.outer]
            for i, (name, w, a) in enumerate(zip(p.names, p.faces, p.areas))]
    emit(ctx, ["face", "word", "area", "outer"], rows,
         extra={"loop": str(d.loop) if d.loop is not None else None, "source_faces": list(d.source_faces),
                "genus": validate_and_genus(p), "total_area": p.total_area})


@main.command()
@click.option("--family", type=click.Choice(FAMILIES), required=True)
@click.option("--rank", type=int, default=1, show_default=True)
@click.option("--map", "map_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Closed map file (default: the one-face torus b' a' b a).")
@click.option("--area", type=float, default=None, help="Total area; rescales the map's face areas.")
@click.option("--observable", "observables", multiple=True, default=("a",), show_default=True,
              help="Loop word whose trace is measured; repeatable.")
@click.option("--sweeps", type=int, default=2000, show_default=True)
@click.option("--burn-in", type=int, default=500, show_default=True)
@click.option("--proposal-scale", type=float, default=0.5, show_default=True)
@click.option("--chains", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), default=None,
              help="Write every measurement to this CSV file.")
@threads_option
@functools.partial(output_options, figure=False)
@click.pass_context
@guarded
def mcmc(ctx, family, rank, map_path, area, observables, sweeps, burn_in, proposal_scale, chains, seed, tol,
         trace_path, threads, **_):
    """Metropolis sampling of the discrete Yang-Mills measure on a closed map."""
    if map_path is None:
        m = AreaWeightedMap(["b' a' b a"], [1.0 if area is None else area], vertex_count=1)
        map_dict = m.to_dict()
    else:
        map_dict = json.loads(Path(map_path).read_text())
        m = AreaWeightedMap.from_dict(map_dict)
    if chains < 1:
        raise ValueError("--chains must be positive")
    params = McmcParams(sweeps, burn_in=burn_in, proposal_scale=proposal_scale)
    res = mcmc_chains(m, make_group(family, rank), params, seed, chains, observables, area, tol,
                      workers=_workers(threads))
    if trace_path is not None:
        res.write_trace_csv(trace_path)
    rows = [[name, e.mean.real, e.mean.imag, e.stderr, e.n_samples, e.tau, res.acceptance, res.proposal_scale]
            for name, e in res.estimates.items()]
    emit(ctx, ["observable", "mean_re", "mean_im", "stderr", "n_samples", "tau", "acceptance", "proposal_scale"],
         rows, seed=seed, resolved={"map": map_dict, "threads": _workers(threads)})


@main.command()
@click.option("--recipe", type=click.Choice(["simple", "example", "commutator"]), default="simple",
              show_default=True)
@click.option("--family", type=click.Choice(FAMILIES), default="Atilde", show_default=True)
@click.option("--rank", type=int, default=10, show_default=True)
@click.option("--t", "t", type=float, default=1.0, show_default=True, help="Loop area for the simple recipe.")
@click.option("--power", type=int, default=1, show_default=True)
@click.option("--a2", type=float, default=0.5, show_default=True)
@click.option("--a3", type=float, default=0.5, show_default=True)
@click.option("--T", "T", type=float, default=1.0, show_default=True, help="Torus area for the commutator.")
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--steps", type=int, default=None, help=f"Euler steps per unit motion (default: step <= {MAX_STEP}).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), default=None,
              help="Write every replica value (and weight) to this CSV file.")
@output_options
@click.pass_context
@guarded
def bm(ctx, recipe, family, rank, t, power, a2, a3, T, samples, steps, seed, trace_path, **_):
    """Brownian-motion Monte Carlo of the built-in Wilson loop recipes.

    The reference column is the large-rank limit for the plane recipes and
    the exact character sum for the commutator; the budget column is the
    exact Euler-walk bias bound where it is available (unitary, |power| <= 2).
    """
    rec = LoopRecipe(recipe, t=t, power=power, a2=a2, a3=a3, T=T)
    g = make_group(family, rank)
    resolved = {}
    if recipe == "simple":
        resolved["n_steps"] = _check_steps(t, steps)
    elif recipe == "example":
        resolved["n_steps"] = [_check_steps(a3, steps), _check_steps(a2, steps)]
    values, weights = recipe_samples(rec, g, samples, RngStream(seed), steps)
    est = recipe_estimate(values, weights)
    budget = None
    if recipe == "commutator":
        reference = commutator_moment(g, T, power)
    else:
        reference = rec.limit()
        if recipe == "simple" and g.family is Family.UNITARY_TILDE and abs(power) <= 2:
            budget = euler_bias_budget(g.matrix_size, t, abs(power), steps)
    if trace_path is not None:
        with open(trace_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["replica", "value_re", "value_im", "weight"])
            for i, v in enumerate(values):
                w.writerow([i, format_value(v.real), format_value(v.imag),
                            format_value(1.0 if weights is None else weights[i])])
    emit(ctx, ["recipe", "family", "r", "n_samples", "mean_re", "mean_im", "stderr", "reference", "budget"],
         [[recipe, family, rank, samples, est.mean.real, est.mean.imag, est.stderr, reference, budget]],
         seed=seed, resolved=resolved)


if __name__ == "__main__":  # pragma: no cover
    main()

"""Batch front-end: CSV ingestion, resampling, pipeline runs, queries, export.

Input rows are ``entity_id,t,x,y`` (header optional). Exit codes: 0 ok,
1 usage error, 2 data error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .groups import MaximalGroup, compute_maximal_groups
from .model import DataError, Dataset, EntitySet, Interval, Params, TimeOutOfRange, validate
from .reeb import (
    InternalInvariantError,
    ReebEdge,
    ReebGraph,
    ReebVertex,
    VertexKind,
    build_reeb,
    reduce_reeb,
)
from .robust import robustify
from . import generators


class ParseError(DataError):
    def __init__(self, line: int, detail: str = ""):
        self.line = line
        super().__init__(f"cannot parse line {line}" + (f": {detail}" if detail else ""))


class DuplicateSample(DataError):
    def __init__(self, entity: str, t: float):
        self.entity = entity
        self.t = t
        super().__init__(f"duplicate sample for entity {entity!r} at t={t}")


class EmptyCommonWindow(DataError):
    pass


class EntityOutsideWindow(DataError):
    def __init__(self, entity: str):
        self.entity = entity
        super().__init__(f"entity {entity!r} does not cover the resampling window (use --clip to drop it)")


class UnknownQuery(DataError):
    pass


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# ingestion


def load_csv(source) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Parse ``entity_id,t,x,y`` rows into per-entity time-sorted series.

    ``source`` is a path, '-' for stdin, or an open text stream. Returns
    {entity_id: (times, points)} with times ascending.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    elif source == "-":
        lines = sys.stdin.read().splitlines()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()

    rows: dict[str, list[tuple[float, float, float]]] = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ParseError(lineno, f"expected 4 fields, got {len(parts)}")
        try:
            t, x, y = float(parts[1]), float(parts[2]), float(parts[3])
        except ValueError:
            if lineno == 1:
                continue  # header row
            raise ParseError(lineno, "non-numeric t/x/y")
        rows.setdefault(parts[0], []).append((t, x, y))

    out: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for entity, samples in rows.items():
        samples.sort(key=lambda s: s[0])
        times = np.array([s[0] for s in samples])
        if len(times) > 1 and (np.diff(times) == 0).any():
            i = int(np.nonzero(np.diff(times) == 0)[0][0])
            raise DuplicateSample(entity, float(times[i]))
        points = np.array([[s[1], s[2]] for s in samples])
        out[entity] = (times, points)
    return out


def resample(raw: dict[str, tuple[np.ndarray, np.ndarray]], dt: float, clip: bool = False) -> Dataset:
    """Linear resampling onto a common regular grid of step dt.

    The grid spans the common window of the entities covering the
    best-covered instant (earliest such instant on ties). Entities not
    covering that window raise EntityOutsideWindow unless ``clip`` drops
    them; a window with fewer than two grid points raises EmptyCommonWindow.
    """
    if dt <= 0 or not np.isfinite(dt):
        raise DataError(f"dt must be positive, got {dt}")
    if not raw:
        raise EmptyCommonWindow("no entities")
    spans = {e: (float(ts[0]), float(ts[-1])) for e, (ts, _) in raw.items()}
    # best-covered instant: sweep span endpoints
    marks = sorted({t for lo, hi in spans.values() for t in (lo, hi)})
    best_t, best_cover = marks[0], -1
    for t in marks:
        cover = sum(1 for lo, hi in spans.values() if lo <= t <= hi)
        if cover > best_cover:
            best_t, best_cover = t, cover
    covering = [e for e, (lo, hi) in spans.items() if lo <= best_t <= hi]
    if best_cover < len(raw):
        if not clip:
            outsider = sorted(e for e in raw if e not in covering)[0]
            if best_cover < 2:
                raise EmptyCommonWindow("entity time ranges share no common instant")
            raise EntityOutsideWindow(outsider)
    lo = max(spans[e][0] for e in covering)
    hi = min(spans[e][1] for e in covering)
    grid = []
    t = lo
    i = 0
    while t <= hi + 1e-9:
        grid.append(min(t, hi))
        i += 1
        t = lo + i * dt
    if len(grid) < 2:
        raise EmptyCommonWindow(f"window [{lo}, {hi}] holds fewer than two grid points at dt={dt}")
    times = np.array(grid)
    ids = sorted(covering)
    pos = np.empty((len(ids), len(times), 2))
    for idx, entity in enumerate(ids):
        ts, pts = raw[entity]
        pos[idx, :, 0] = np.interp(times, ts, pts[:, 0])
        pos[idx, :, 1] = np.interp(times, ts, pts[:, 1])
    return Dataset(ids, times, pos)


def dataset_from_raw(raw: dict[str, tuple[np.ndarray, np.ndarray]]) -> Dataset:
    """Build a Dataset directly from already-synchronised series."""
    ids = sorted(raw)
    times0 = raw[ids[0]][0]
    for e in ids[1:]:
        if len(raw[e][0]) != len(times0) or not np.array_equal(raw[e][0], times0):
            raise DataError(
                f"entity {e!r} is not sampled at the shared timestamps; resample with --dt"
            )
    pos = np.stack([raw[e][1] for e in ids])
    ds = Dataset(ids, times0.copy(), pos)
    validate(ds)
    return ds


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class PipelineResult:
    dataset: Dataset
    params: Params
    reeb: ReebGraph
    robust_reeb: ReebGraph | None
    groups: list[MaximalGroup]
    reduced: ReebGraph


def run_pipeline(dataset: Dataset, params: Params) -> PipelineResult:
    """build -> robustify (if alpha > 0) -> maximal groups -> reduced graph."""
    reeb = build_reeb(dataset, params.eps)
    robust_graph = robustify(reeb, params.alpha) if params.alpha > 0 else None
    basis = robust_graph if robust_graph is not None else reeb
    groups = compute_maximal_groups(basis, params.m, params.delta)
    reduced = reduce_reeb(basis, groups)
    return PipelineResult(dataset, params, reeb, robust_graph, groups, reduced)


# ---------------------------------------------------------------------------
# analysis queries

QUERY_KINDS = (
    "largest-at",
    "longest-at",
    "ungrouped-count",
    "first-start-after",
    "first-end-after",
    "total-grouped-time",
    "max-partners",
)


def _group_record(dataset: Dataset, g: MaximalGroup) -> dict:
    return {
        "entities": [dataset.entity_ids[i] for i in g.entities],
        "start": g.interval.start,
        "end": g.interval.end,
    }


def _tie_key(dataset: Dataset, g: MaximalGroup):
    ids = [dataset.entity_ids[i] for i in g.entities]
    return (-len(g.entities), g.interval.start, ids)


def _check_time(dataset: Dataset, t) -> float:
    if t is None:
        raise UnknownQuery("this query needs --t")
    if t < dataset.t0 or t > dataset.t_end:
        raise TimeOutOfRange(t, dataset.t0, dataset.t_end)
    return float(t)


def query(
    groups: list[MaximalGroup],
    dataset: Dataset,
    kind: str,
    t: float | None = None,
    entity: str | None = None,
):
    """Answer one analysis question about the reported maximal groups."""
    if kind not in QUERY_KINDS:
        raise UnknownQuery(f"unknown query kind {kind!r}; choose from {', '.join(QUERY_KINDS)}")

    if kind == "largest-at":
        t = _check_time(dataset, t)
        alive = [g for g in groups if g.interval.contains(t)]
        if not alive:
            return None
        best = min(alive, key=lambda g: _tie_key(dataset, g))
        return _group_record(dataset, best)
    if kind == "longest-at":
        t = _check_time(dataset, t)
        alive = [g for g in groups if g.interval.contains(t)]
        if not alive:
            return None
        best = min(alive, key=lambda g: (-g.interval.length,) + _tie_key(dataset, g))
        return _group_record(dataset, best)
    if kind == "ungrouped-count":
        t = _check_time(dataset, t)
        grouped = EntitySet.empty(dataset.n)
        for g in groups:
            if g.interval.contains(t):
                grouped = grouped | g.entities
        return dataset.n - len(grouped)
    if kind == "first-start-after":
        t = _check_time(dataset, t)
        later = [g for g in groups if g.interval.start > t]
        if not later:
            return None
        best = min(later, key=lambda g: (g.interval.start,) + _tie_key(dataset, g))
        return _group_record(dataset, best)
    if kind == "first-end-after":
        t = _check_time(dataset, t)
        later = [g for g in groups if g.interval.end > t]
        if not later:
            return None
        best = min(later, key=lambda g: (g.interval.end,) + _tie_key(dataset, g))
        return _group_record(dataset, best)
    if kind == "total-grouped-time":
        if entity is None:
            raise UnknownQuery("total-grouped-time needs --entity")
        idx = _entity_index(dataset, entity)
        spans = sorted(
            (g.interval.start, g.interval.end) for g in groups if idx in g.entities
        )
        total, cur_lo, cur_hi = 0.0, None, None
        for lo, hi in spans:
            if cur_lo is None:
                cur_lo, cur_hi = lo, hi
            elif lo <= cur_hi:
                cur_hi = max(cur_hi, hi)
            else:
                total += cur_hi - cur_lo
                cur_lo, cur_hi = lo, hi
        if cur_lo is not None:
            total += cur_hi - cur_lo
        return total
    # max-partners
    partner_masks = [0] * dataset.n
    for g in groups:
        m = g.entities.mask
        for i in g.entities:
            partner_masks[i] |= m & ~(1 << i)
    if entity is not None:
        return partner_masks[_entity_index(dataset, entity)].bit_count()
    best_i = max(range(dataset.n), key=lambda i: (partner_masks[i].bit_count(), -i))
    return {
        "entity": dataset.entity_ids[best_i],
        "partners": partner_masks[best_i].bit_count(),
    }


def _entity_index(dataset: Dataset, entity: str) -> int:
    try:
        return dataset.index_of(entity)
    except ValueError:
        raise UnknownQuery(f"unknown entity {entity!r}") from None


# ---------------------------------------------------------------------------
# serialisation


def groups_to_obj(dataset: Dataset, groups: list[MaximalGroup]) -> list[dict]:
    return [_group_record(dataset, g) for g in groups]


def groups_from_obj(dataset: Dataset, obj: list[dict]) -> list[MaximalGroup]:
    out = []
    for rec in obj:
        idxs = [dataset.index_of(e) for e in rec["entities"]]
        out.append(
            MaximalGroup(EntitySet.of(dataset.n, idxs), Interval(rec["start"], rec["end"]))
        )
    return out


def reeb_to_obj(graph: ReebGraph) -> dict:
    ids = graph.dataset.entity_ids
    return {
        "vertices": [
            {"id": v.id, "kind": v.kind.value, "time": v.time}
            for v in sorted(graph.vertices.values(), key=lambda v: v.id)
        ],
        "edges": [
            {
                "id": e.id,
                "source": e.source,
                "target": e.target,
                "entities": [ids[i] for i in e.component],
            }
            for e in sorted(graph.edges.values(), key=lambda e: e.id)
        ],
    }


def reeb_from_obj(dataset: Dataset, obj: dict) -> ReebGraph:
    g = ReebGraph(dataset)
    for rec in obj["vertices"]:
        v = ReebVertex(rec["id"], VertexKind(rec["kind"]), rec["time"])
        g.vertices[v.id] = v
        g._out[v.id] = []
        g._in[v.id] = []
        g._next_vertex = max(g._next_vertex, v.id + 1)
    for rec in obj["edges"]:
        idxs = [dataset.index_of(e) for e in rec["entities"]]
        es = EntitySet.of(dataset.n, idxs)
        e = ReebEdge(rec["id"], rec["source"], rec["target"], es)
        g.edges[e.id] = e
        g._out[e.source].append(e.id)
        g._in[e.target].append(e.id)
        g._next_edge = max(g._next_edge, e.id + 1)
    return g


def reeb_to_dot(graph: ReebGraph, verbose: bool = False) -> str:
    ids = graph.dataset.entity_ids
    lines = ["digraph grouping {"]
    for v in sorted(graph.vertices.values(), key=lambda v: v.id):
        lines.append(f'  v{v.id} [label="{v.kind.value}@{v.time:g}"];')
    for e in sorted(graph.edges.values(), key=lambda e: e.id):
        if verbose:
            label = f"{len(e.component)}: " + ";".join(ids[i] for i in e.component)
        else:
            label = str(len(e.component))
        lines.append(f'  v{e.source} -> v{e.target} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def groups_to_csv(dataset: Dataset, groups: list[MaximalGroup]) -> str:
    lines = ["start,end,size,ids"]
    for g in groups:
        ids = ";".join(dataset.entity_ids[i] for i in g.entities)
        lines.append(f"{g.interval.start!r},{g.interval.end!r},{len(g.entities)},{ids}")
    return "\n".join(lines) + "\n"


def dataset_to_csv(dataset: Dataset) -> str:
    lines = ["entity_id,t,x,y"]
    for i, entity in enumerate(dataset.entity_ids):
        for ti, t in enumerate(dataset.times):
            x, y = dataset.positions[i, ti]
            lines.append(f"{entity},{t!r},{x!r},{y!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# command line


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", default="-", help="CSV path or - for stdin")
    p.add_argument("--eps", type=float, required=True, help="spatial radius")
    p.add_argument("--group-size", type=int, default=1, help="minimum group size m")
    p.add_argument("--duration", type=float, default=0.0, help="minimum duration delta")
    p.add_argument("--alpha", type=float, default=0.0, help="robustness window")
    p.add_argument("--dt", type=float, default=None, help="resample step for asynchronous input")
    p.add_argument("--clip", action="store_true", help="drop entities outside the common window")


def _load_dataset(args) -> Dataset:
    raw = load_csv(args.input)
    if args.dt is not None:
        ds = resample(raw, args.dt, clip=args.clip)
        validate(ds)
        return ds
    return dataset_from_raw(raw)


def _emit(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def main(argv=None) -> int:
    parser = _Parser(prog="trajgroups", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="compute maximal groups for a CSV of trajectories")
    _add_param_flags(p_an)
    p_an.add_argument("--format", choices=("json", "csv", "dot"), default="json")
    p_an.add_argument("--output", default="-")
    p_an.add_argument("--verbose", action="store_true")

    p_gen = sub.add_parser("generate", help="emit a synthetic dataset as CSV")
    p_gen.add_argument("--kind", choices=("flock", "reeb-quadratic", "groups-cubic"), required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--tau", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--world-size", type=float, default=70.0)
    p_gen.add_argument("--output", default="-")

    p_q = sub.add_parser("query", help="answer one analysis question")
    _add_param_flags(p_q)
    p_q.add_argument("--kind", choices=QUERY_KINDS, required=True)
    p_q.add_argument("--t", type=float, default=None)
    p_q.add_argument("--entity", default=None)

    p_ex = sub.add_parser("export", help="serialise a pipeline graph")
    _add_param_flags(p_ex)
    p_ex.add_argument("--what", choices=("reeb", "robust", "reduced"), default="reduced")
    p_ex.add_argument("--format", choices=("json", "dot"), default="json")
    p_ex.add_argument("--output", default="-")
    p_ex.add_argument("--verbose", action="store_true")

    try:
        args = parser.parse_args(argv)
        if args.command == "generate":
            if args.kind == "flock":
                ds = generators.gen_flock(args.n, args.tau, args.seed, world_size=args.world_size)
            elif args.kind == "reeb-quadratic":
                ds = generators.gen_reeb_quadratic(args.n, args.tau)
            else:
                ds = generators.gen_groups_cubic(args.n, args.tau)
            _emit(dataset_to_csv(ds), args.output)
            return 0

        params = Params(eps=args.eps, m=args.group_size, delta=args.duration, alpha=args.alpha)
        dataset = _load_dataset(args)
        result = run_pipeline(dataset, params)

        if args.command == "analyze":
            if args.format == "json":
                obj = {
                    "n": dataset.n,
                    "tau": dataset.tau,
                    "groups": groups_to_obj(dataset, result.groups),
                    "reeb_vertices": len(result.reeb.vertices),
                    "reeb_edges": len(result.reeb.edges),
                    "reduced_edges": len(result.reduced.edges),
                }
                _emit(_dumps(obj), args.output)
            elif args.format == "csv":
                _emit(groups_to_csv(dataset, result.groups), args.output)
            else:
                _emit(reeb_to_dot(result.reduced, args.verbose), args.output)
            return 0
        if args.command == "query":
            answer = query(result.groups, dataset, args.kind, t=args.t, entity=args.entity)
            _emit(_dumps({"kind": args.kind, "answer": answer}), "-")
            return 0
        # export
        which = {
            "reeb": result.reeb,
            "robust": result.robust_reeb if result.robust_reeb is not None else result.reeb,
            "reduced": result.reduced,
        }[args.what]
        if args.format == "json":
            _emit(_dumps(reeb_to_obj(which)), args.output)
        else:
            _emit(reeb_to_dot(which, args.verbose), args.output)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (InternalInvariantError, AssertionError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""File formats: event logs, edge lists, content records, feature CSVs,
model files, and flat key=value configs.

Everything is plain text (JSONL, CSV, whitespace edge lists) with floats
written via repr, so outputs are diffable and byte-stable across runs.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, fields
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cascade import ReshareEvent, SocialGraph
from .errors import ConfigInvalidError
from .features import ContentRecord, FeatureVector
from .learner import Model
from .tasks import ClusterInstance, LabeledExample

EVENT_FIELDS = tuple(f.name for f in fields(ReshareEvent))
CONTENT_FIELDS = tuple(f.name for f in fields(ContentRecord))
_EVENT_INTS = {
    "outdeg",
    "friend_count",
    "fan_count",
    "subscriber_count",
    "views_orig_cum",
    "views_reshares_cum",
}
_EVENT_FLOATS = {"timestamp", "age_years", "fb_age_days", "activity_days"}
_CONTENT_BOOLS = {"is_en", "has_caption"}


def fmt(value: float) -> str:
    """Shortest round-trip decimal form of a float."""
    return repr(float(value))


# --- events -----------------------------------------------------------------

def event_to_dict(event: ReshareEvent) -> dict:
    return {k: v for k, v in asdict(event).items() if v is not None}


def _event_from_dict(row: Mapping) -> ReshareEvent:
    kwargs = {}
    for name in EVENT_FIELDS:
        v = row.get(name)
        if v is None or v == "":
            continue
        if name in _EVENT_INTS:
            v = int(v)
        elif name in _EVENT_FLOATS:
            v = float(v)
        else:
            v = str(v)
        kwargs[name] = v
    return ReshareEvent(**kwargs)


def write_events_jsonl(path: str | Path, cascades: Iterable[Sequence[ReshareEvent]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for events in cascades:
            for e in events:
                fh.write(json.dumps(event_to_dict(e), sort_keys=True))
                fh.write("\n")


def read_events(path: str | Path) -> dict[str, list[ReshareEvent]]:
    """Events grouped by cascade_id, input order preserved within a cascade.

    JSONL by default; a ``.csv`` suffix switches to CSV with the documented
    header (the ReshareEvent field names; empty cells mean absent).
    """
    path = Path(path)
    grouped: dict[str, list[ReshareEvent]] = {}
    if path.suffix.lower() == ".csv":
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                e = _event_from_dict(row)
                grouped.setdefault(e.cascade_id, []).append(e)
        return grouped
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            e = _event_from_dict(json.loads(line))
            grouped.setdefault(e.cascade_id, []).append(e)
    return grouped


def write_events_csv(path: str | Path, cascades: Iterable[Sequence[ReshareEvent]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EVENT_FIELDS)
        for events in cascades:
            for e in events:
                row = []
                for name in EVENT_FIELDS:
                    v = getattr(e, name)
                    if v is None:
                        row.append("")
                    elif name in _EVENT_FLOATS:
                        row.append(fmt(v))
                    else:
                        row.append(str(v))
                writer.writerow(row)


# --- social graph ----------------------------------------------------------

def read_edge_list(path: str | Path, directed: bool = False) -> SocialGraph:
    graph = SocialGraph(directed=directed)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ConfigInvalidError(
                    f"{path}:{lineno}: expected two ids, got {line!r}"
                )
            graph.add_edge(parts[0], parts[1])
    return graph


def write_edge_list(path: str | Path, graph: SocialGraph) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v in graph.edges():
            fh.write(f"{u} {v}\n")


# --- content records ---------------------------------------------------------

def write_content_jsonl(path: str | Path, contents: Mapping[str, ContentRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for cid in sorted(contents):
            row = {"cascade_id": cid}
            row.update(
                {k: v for k, v in asdict(contents[cid]).items() if v is not None}
            )
            fh.write(json.dumps(row, sort_keys=True))
            fh.write("\n")


def read_content_jsonl(path: str | Path) -> dict[str, ContentRecord]:
    out: dict[str, ContentRecord] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            cid = str(row.pop("cascade_id"))
            kwargs = {}
            for name in CONTENT_FIELDS:
                if name not in row or row[name] is None:
                    continue
                v = row[name]
                if name in _CONTENT_BOOLS:
                    v = bool(v)
                elif name in ("category", "cluster_id"):
                    v = str(v)
                else:
                    v = float(v)
                kwargs[name] = v
            out[cid] = ContentRecord(**kwargs)
    return out


# --- feature / labeled CSVs ---------------------------------------------------

def _feature_columns(names: Sequence[str]) -> list[str]:
    cols = []
    for n in names:
        cols.append(n)
        cols.append(f"{n}_missing")
    return cols


def _vector_row(fv: FeatureVector) -> list[str]:
    row = []
    for n in fv.names:
        row.append(fmt(fv.values[n]))
        row.append("1" if n in fv.missing else "0")
    return row


def write_features_csv(
    path: str | Path, rows: Sequence[tuple[str, FeatureVector]]
) -> None:
    """Feature vectors keyed by cascade_id, one row each, sorted by id."""
    if not rows:
        raise ConfigInvalidError("no feature rows to write")
    names = rows[0][1].names
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cascade_id"] + _feature_columns(names))
        for cid, fv in sorted(rows, key=lambda r: r[0]):
            writer.writerow([cid] + _vector_row(fv))


def write_labeled_csv(path: str | Path, examples: Sequence[LabeledExample]) -> None:
    """Task dataset rows: features..., label, final_size, cascade_id."""
    if not examples:
        raise ConfigInvalidError("no labeled examples to write")
    names = examples[0].features.names
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_feature_columns(names) + ["label", "final_size", "cascade_id"])
        for ex in sorted(examples, key=lambda e: e.cascade_id):
            writer.writerow(
                _vector_row(ex.features)
                + [str(ex.label), str(ex.final_size), ex.cascade_id]
            )


def read_labeled_csv(
    path: str | Path,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[str], list[str]]:
    """Returns (X, y, final_sizes, cascade_ids, feature_columns)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[-3:] != ["label", "final_size", "cascade_id"]:
            raise ConfigInvalidError(
                f"{path}: expected trailing label,final_size,cascade_id columns"
            )
        feature_cols = header[:-3]
        rows = []
        labels = []
        sizes = []
        ids = []
        for row in reader:
            rows.append([float(v) for v in row[: len(feature_cols)]])
            labels.append(float(row[-3]))
            sizes.append(float(row[-2]))
            ids.append(row[-1])
    X = np.array(rows, dtype=np.float64)
    return X, np.array(labels), np.array(sizes), ids, feature_cols


def write_cluster_csv(path: str | Path, instances: Sequence[ClusterInstance]) -> None:
    """One row per sampled cluster member, winner flagged."""
    if not instances:
        raise ConfigInvalidError("no cluster instances to write")
    names = instances[0].members[0].features.names
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["cluster_id", "cascade_id", "final_size", "is_winner"]
            + _feature_columns(names)
        )
        for inst in instances:
            for idx, member in enumerate(inst.members):
                writer.writerow(
                    [
                        inst.cluster_id,
                        member.cascade_id,
                        str(member.final_size),
                        "1" if idx == inst.winner_index else "0",
                    ]
                    + _vector_row(member.features)
                )


def read_cluster_csv(path: str | Path) -> list[dict]:
    """Rows of the cluster CSV as dicts with parsed feature mappings."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        feature_cols = header[4:]
        for row in reader:
            values = {c: float(v) for c, v in zip(feature_cols, row[4:])}
            out.append(
                {
                    "cluster_id": row[0],
                    "cascade_id": row[1],
                    "final_size": int(row[2]),
                    "is_winner": row[3] == "1",
                    "values": values,
                }
            )
    return out


# --- model files ----------------------------------------------------------------

def write_model(path: str | Path, model: Model) -> None:
    """Human-diffable key-value model document."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"lambda {fmt(model.lam)}\n")
        fh.write(f"seed {model.seed}\n")
        fh.write(f"bias {fmt(model.bias)}\n")
        fh.write(f"iterations {model.iterations}\n")
        fh.write(f"final_loss {fmt(model.final_loss)}\n")
        fh.write(f"converged {int(model.converged)}\n")
        for name in model.feature_names:
            fh.write(
                f"feature {name} {fmt(model.weights[name])} "
                f"{fmt(model.means[name])} {fmt(model.stds[name])}\n"
            )
        for name in model.dropped:
            fh.write(f"dropped {name}\n")


def read_model(path: str | Path) -> Model:
    scalars: dict[str, str] = {}
    names: list[str] = []
    weights: dict[str, float] = {}
    means: dict[str, float] = {}
    stds: dict[str, float] = {}
    dropped: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            key = parts[0]
            if key == "feature":
                if len(parts) != 5:
                    raise ConfigInvalidError(f"{path}:{lineno}: bad feature line")
                name = parts[1]
                names.append(name)
                weights[name] = float(parts[2])
                means[name] = float(parts[3])
                stds[name] = float(parts[4])
            elif key == "dropped":
                dropped.append(parts[1])
            else:
                scalars[key] = parts[1]
    try:
        return Model(
            feature_names=tuple(names),
            weights=weights,
            bias=float(scalars["bias"]),
            means=means,
            stds=stds,
            dropped=tuple(dropped),
            lam=float(scalars["lambda"]),
            seed=int(scalars["seed"]),
            iterations=int(scalars["iterations"]),
            final_loss=float(scalars["final_loss"]),
            converged=bool(int(scalars.get("converged", "0"))),
        )
    except KeyError as exc:
        raise ConfigInvalidError(f"{path}: missing model key {exc}") from exc


# --- configs & manifests -----------------------------------------------------------

def read_config(path: str | Path) -> dict[str, str]:
    """Flat key=value file; blank lines and # comments ignored."""
    path = Path(path)
    if not path.exists():
        raise ConfigInvalidError(f"config file not found: {path}")
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigInvalidError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path: str | Path, manifest: Mapping) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

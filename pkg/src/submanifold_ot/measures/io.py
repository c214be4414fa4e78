"""CSV serialization: measures as (id, x0.., mass), plans as (src_id, dst_id, mass)."""

import csv
from pathlib import Path
from typing import List, Union

import numpy as np

from .discrete import DiscreteMeasure, TransferencePlan

PathLike = Union[str, Path]


def write_measure_csv(mu: DiscreteMeasure, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["id"] + [f"x{i}" for i in range(mu.dim)] + ["mass"])
        for i, (atom, mass) in enumerate(zip(mu.atoms, mu.masses)):
            writer.writerow([i] + [repr(float(v)) for v in atom] + [repr(float(mass))])
    return path


def read_measure_csv(path: PathLike) -> DiscreteMeasure:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header or header[0] != "id" or header[-1] != "mass" or len(header) < 3:
            raise ValueError(f"{path} is not a measure CSV (id, x0.., mass)")
        rows: List[List[str]] = [row for row in reader if row]
    if not rows:
        raise ValueError(f"{path} contains no atoms")
    ids = [int(row[0]) for row in rows]
    if ids != list(range(len(rows))):
        raise ValueError(f"{path} must list atom ids 0..{len(rows) - 1} in order")
    values = np.array([[float(v) for v in row[1:]] for row in rows])
    return DiscreteMeasure(values[:, :-1], values[:, -1])


def write_plan_csv(rho: TransferencePlan, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["src_id", "dst_id", "mass"])
        for s, d, m in zip(rho.src, rho.dst, rho.mass):
            writer.writerow([int(s), int(d), repr(float(m))])
    return path


def read_plan_csv(
    path: PathLike, source: DiscreteMeasure, target: DiscreteMeasure
) -> TransferencePlan:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["src_id", "dst_id", "mass"]:
            raise ValueError(f"{path} is not a plan CSV (src_id, dst_id, mass)")
        rows = [row for row in reader if row]
    src = np.array([int(r[0]) for r in rows], dtype=np.int64)
    dst = np.array([int(r[1]) for r in rows], dtype=np.int64)
    mass = np.array([float(r[2]) for r in rows])
    return TransferencePlan(source, target, src, dst, mass)

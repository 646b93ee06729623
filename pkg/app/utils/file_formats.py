"""
Readers and writers for the on-disk formats.

Sets: one positive integer per line, strictly increasing.
Weight tables, sequences and permutations: lines "n value" for n = 1..N.
Matrices: JSON Lines {"row": n, "entries": [[k, value], ...]}.
Blank lines and lines starting with '#' are skipped everywhere.
"""
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
import csv
import json
import logging

import numpy as np
from pydantic import BaseModel

from app.core.errors import InputFileError, MissingInputError, OutputError
from app.models.matrices import ExplicitMatrix, Row, RowMatrix
from app.models.permutations import ExplicitPermutation
from app.models.sequences import ArraySequence
from app.models.sets import FiniteSet
from app.models.weights import TableWeight

logger = logging.getLogger(__name__)


def _lines(path: str) -> Iterator[Tuple[int, str]]:
    file_path = Path(path)
    if not file_path.is_file():
        raise MissingInputError(f"input file not found: {path}")
    try:
        text = file_path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputFileError(f"{path}: cannot read file: {e}")
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield number, stripped


def _parse_int(token: str, path: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InputFileError(f"{path}:{line}: expected an integer, got {token!r}")


def _parse_float(token: str, path: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise InputFileError(f"{path}:{line}: expected a number, got {token!r}")
    if not np.isfinite(value):
        raise InputFileError(f"{path}:{line}: value must be finite, got {token!r}")
    return value


def read_set_file(path: str) -> FiniteSet:
    values: List[int] = []
    for line, text in _lines(path):
        n = _parse_int(text, path, line)
        if n < 1:
            raise InputFileError(f"{path}:{line}: members must be positive, got {n}")
        if values and n <= values[-1]:
            raise InputFileError(f"{path}:{line}: members must be strictly increasing, {n} follows {values[-1]}")
        values.append(n)
    logger.info(f"Read {len(values)} set members from {path}")
    return FiniteSet(values, label=f"file:{path}")


def _read_indexed(path: str, kind: str) -> List[Tuple[int, str]]:
    """(line, second column) of "n value" lines, checking n runs through 1..N."""
    tokens: List[Tuple[int, str]] = []
    for line, text in _lines(path):
        parts = text.split()
        if len(parts) != 2:
            raise InputFileError(f"{path}:{line}: expected 'n value', got {text!r}")
        n = _parse_int(parts[0], path, line)
        expected = len(tokens) + 1
        if n != expected:
            raise InputFileError(f"{path}:{line}: {kind} index {n} found where {expected} was expected")
        tokens.append((line, parts[1]))
    if not tokens:
        raise InputFileError(f"{path}: no {kind} entries")
    return tokens


def read_weight_table(path: str) -> TableWeight:
    tokens = _read_indexed(path, "weight")
    values = np.array([_parse_float(t, path, line) for line, t in tokens], dtype=np.float64)
    return TableWeight(values, label=f"table:{path}")


def read_sequence_file(path: str, declared_bound: Optional[float] = None) -> ArraySequence:
    tokens = _read_indexed(path, "sequence")
    values = np.array([_parse_float(t, path, line) for line, t in tokens], dtype=np.float64)
    return ArraySequence(values, label=f"file:{path}", declared_bound=declared_bound, one_based=False)


def read_permutation_file(path: str) -> ExplicitPermutation:
    tokens = _read_indexed(path, "permutation")
    forward = np.array([_parse_int(t, path, line) for line, t in tokens], dtype=np.int64)
    return ExplicitPermutation(forward, label=f"file:{path}")


def read_matrix_file(path: str) -> ExplicitMatrix:
    rows: Dict[int, Row] = {}
    last = 0
    for line, text in _lines(path):
        try:
            record = json.loads(text)
            n = int(record["row"])
            entries = record["entries"]
            cols = [int(k) for k, _ in entries]
            vals = [float(v) for _, v in entries]
        except (ValueError, KeyError, TypeError) as e:
            raise InputFileError(f"{path}:{line}: malformed matrix row: {e}")
        if n <= last:
            raise InputFileError(f"{path}:{line}: rows must be increasing, {n} follows {last}")
        if cols and (cols[0] < 1 or any(b <= a for a, b in zip(cols, cols[1:]))):
            raise InputFileError(f"{path}:{line}: columns of row {n} must be positive and strictly increasing")
        if not all(np.isfinite(vals)):
            raise InputFileError(f"{path}:{line}: entries of row {n} must be finite")
        rows[n] = (np.array(cols, dtype=np.int64), np.array(vals, dtype=np.float64))
        last = n
    logger.info(f"Read {len(rows)} matrix rows from {path}")
    return ExplicitMatrix(rows, label=f"file:{path}")


def export_matrix(A: RowMatrix, max_row: int, path: str) -> int:
    """Write rows 1..max_row of A as JSON Lines; zero rows are omitted. Returns the number of rows written."""
    written = 0
    try:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8") as handle:
            for lo, hi in A.row_chunks(max_row):
                block = A.csr_rows(lo, hi)
                for offset in range(block.shape[0]):
                    start, stop = block.indptr[offset], block.indptr[offset + 1]
                    if start == stop:
                        continue
                    entries = [[int(k), float(v)] for k, v in zip(block.indices[start:stop], block.data[start:stop])]
                    handle.write(json.dumps({"entries": entries, "row": lo + offset}, sort_keys=True) + "\n")
                    written += 1
    except OSError as e:
        raise OutputError(f"cannot write matrix export {path}: {e}")
    logger.info(f"Exported {written} rows of {A.label} to {path}")
    return written


def report_payload(report: BaseModel) -> dict:
    return report.model_dump(mode="json", by_alias=True)


def dump_report(report: BaseModel) -> str:
    return json.dumps(report_payload(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_report(report: BaseModel, path: str) -> str:
    """Pretty JSON with sorted keys and a trailing newline; identical inputs give identical bytes."""
    try:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(dump_report(report), encoding="utf-8")
    except OSError as e:
        raise OutputError(f"cannot write report {path}: {e}")
    logger.info(f"Report written to {path}")
    return str(target)


def collect_estimates(payload, found: Optional[List[Tuple[str, List]]] = None, path: str = "") -> List[Tuple[str, List]]:
    """Every checkpoint list in a dumped report, labelled by its JSON path."""
    found = [] if found is None else found
    if isinstance(payload, dict):
        if "checkpoints" in payload and isinstance(payload["checkpoints"], list):
            found.append((payload.get("label") or path or "estimate", payload["checkpoints"]))
        for key in sorted(payload):
            collect_estimates(payload[key], found, f"{path}.{key}" if path else key)
    elif isinstance(payload, list):
        for index, item in enumerate(payload):
            collect_estimates(item, found, f"{path}[{index}]")
    return found


def write_checkpoints_csv(estimates: Sequence[Tuple[str, List]], path: str) -> str:
    """One block per estimate: a '# label' line, the header n,ratio and the checkpoints."""
    try:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            for label, checkpoints in estimates:
                handle.write(f"# {label}\n")
                writer.writerow(["n", "ratio"])
                for n, ratio in checkpoints:
                    writer.writerow([n, repr(float(ratio))])
    except OSError as e:
        raise OutputError(f"cannot write checkpoint dump {path}: {e}")
    return str(target)


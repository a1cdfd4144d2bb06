"""Survey ingestion: schema descriptors and validated ordinal response matrices.

A survey CSV plus a schema descriptor become a ResponseMatrix: participants by
items, 0-based integer codes, with missing responses either dropped row-wise
(complete case) or kept and masked for pairwise handling downstream.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError

MISSING = -1

MISSING_POLICIES = ("drop_participant", "keep_pairwise")


@dataclass(frozen=True)
class SurveyItem:
    """One survey item: its column name and the number of points on its scale."""

    item_id: str
    scale_size: int


@dataclass(frozen=True)
class SurveySchema:
    """Survey layout: ordered items with scale sizes plus bookkeeping columns.

    Codes are 0-based consecutive integers declared by the schema, never
    inferred from the data: a valid code for item i lies in [0, scale_size-1].
    Attribute columns (party id, region, ...) are carried as opaque strings.
    """

    items: tuple[SurveyItem, ...]
    id_column: str
    attribute_columns: tuple[str, ...] = ()
    missing_token: str = "NA"

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "attribute_columns", tuple(self.attribute_columns))
        if not self.items:
            raise ValidationError("schema must declare at least one item")
        if not self.id_column:
            raise ValidationError("schema must name an id column")
        seen = set()
        for item in self.items:
            if not item.item_id:
                raise ValidationError("item ids must be non-empty")
            if item.item_id in seen:
                raise ValidationError(f"duplicate item id {item.item_id!r} in schema")
            seen.add(item.item_id)
            if item.scale_size < 2:
                raise ValidationError(
                    f"item {item.item_id!r} has scale size {item.scale_size}; scales need at least 2 points"
                )
        columns = [self.id_column, *self.attribute_columns, *seen]
        if len(set(columns)) != len(columns):
            raise ValidationError(
                "id column, attribute columns, and item columns must be pairwise disjoint"
            )

    @property
    def item_ids(self) -> tuple[str, ...]:
        return tuple(item.item_id for item in self.items)

    @property
    def scale_sizes(self) -> tuple[int, ...]:
        return tuple(item.scale_size for item in self.items)

    @property
    def n_items(self) -> int:
        return len(self.items)

    def to_dict(self) -> dict:
        return {
            "id_column": self.id_column,
            "attribute_columns": list(self.attribute_columns),
            "missing_token": self.missing_token,
            "items": [{"id": it.item_id, "scale": it.scale_size} for it in self.items],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SurveySchema":
        try:
            items = tuple(
                SurveyItem(str(entry["id"]), int(entry["scale"])) for entry in data["items"]
            )
            return cls(
                items=items,
                id_column=str(data["id_column"]),
                attribute_columns=tuple(str(c) for c in data.get("attribute_columns", ())),
                missing_token=str(data.get("missing_token", "NA")),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed schema descriptor: {exc}") from exc

    @classmethod
    def from_json(cls, path) -> "SurveySchema":
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"schema file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"schema file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


@dataclass
class LoadReport:
    rows_read: int
    rows_dropped: int
    missing_cells: int

    def to_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_dropped": self.rows_dropped,
            "missing_cells": self.missing_cells,
        }


class ResponseMatrix:
    """Validated participants-by-items matrix of ordinal codes.

    Immutable after construction. `codes` holds -1 in missing slots and `mask`
    is True where a response is present. Safe to share across threads.
    """

    __slots__ = ("schema", "participant_ids", "codes", "mask", "attributes", "report", "_index")

    def __init__(self, schema, participant_ids, codes, mask=None, attributes=None, report=None):
        codes = np.array(codes, dtype=np.int16, copy=True)
        if codes.ndim != 2:
            raise ValidationError("codes must be a 2-D participants-by-items array")
        n, m = codes.shape
        if n < 1 or m < 1:
            raise ValidationError("matrix needs at least one participant and one item")
        if m != schema.n_items:
            raise ValidationError(
                f"matrix has {m} item columns but schema declares {schema.n_items}"
            )
        participant_ids = tuple(str(p) for p in participant_ids)
        if len(participant_ids) != n:
            raise ValidationError("participant id count does not match row count")
        if len(set(participant_ids)) != n:
            raise ValidationError("participant ids must be unique")
        if mask is None:
            mask = codes != MISSING
        else:
            mask = np.array(mask, dtype=bool, copy=True)
            if mask.shape != codes.shape:
                raise ValidationError("mask shape must match codes shape")
        codes[~mask] = MISSING
        for j, item in enumerate(schema.items):
            col = codes[:, j][mask[:, j]]
            bad = (col < 0) | (col >= item.scale_size)
            if bad.any():
                value = int(col[bad][0])
                raise ValidationError(
                    f"out-of-range code for item {item.item_id!r}: got {value}, "
                    f"valid codes are 0..{item.scale_size - 1}"
                )
        if attributes is None:
            attributes = {c: ("",) * n for c in schema.attribute_columns}
        else:
            attributes = {c: tuple(str(v) for v in vals) for c, vals in attributes.items()}
            if set(attributes) != set(schema.attribute_columns):
                raise ValidationError("attribute data must cover exactly the schema's attribute columns")
            for c, vals in attributes.items():
                if len(vals) != n:
                    raise ValidationError(f"attribute column {c!r} has {len(vals)} values for {n} rows")
        codes.setflags(write=False)
        mask.setflags(write=False)
        self.schema = schema
        self.participant_ids = participant_ids
        self.codes = codes
        self.mask = mask
        self.attributes = attributes
        self.report = report
        self._index = {p: i for i, p in enumerate(participant_ids)}

    @property
    def n_participants(self) -> int:
        return self.codes.shape[0]

    @property
    def n_items(self) -> int:
        return self.codes.shape[1]

    @property
    def has_missing(self) -> bool:
        return not bool(self.mask.all())

    def code_at(self, participant: int, item: int):
        """Code at (row, column), or None when missing."""
        if not self.mask[participant, item]:
            return None
        return int(self.codes[participant, item])

    def index_of(self, participant_id: str) -> int:
        try:
            return self._index[participant_id]
        except KeyError:
            raise ValidationError(f"unknown participant id {participant_id!r}") from None

    def node_attributes(self) -> dict:
        """Per-participant attribute mapping, keyed by participant id."""
        cols = self.schema.attribute_columns
        return {
            pid: {c: self.attributes[c][i] for c in cols}
            for i, pid in enumerate(self.participant_ids)
        }

    def equals(self, other: "ResponseMatrix") -> bool:
        return (
            self.schema.to_dict() == other.schema.to_dict()
            and self.participant_ids == other.participant_ids
            and np.array_equal(self.mask, other.mask)
            and np.array_equal(self.codes, other.codes)
            and self.attributes == other.attributes
        )

    def to_csv(self, path) -> None:
        """Write the matrix back out in the loader's CSV layout."""
        write_survey(self, path)


def load_survey(csv_path, schema: SurveySchema, missing_policy: str = "drop_participant") -> ResponseMatrix:
    """Parse and validate a survey CSV against its schema.

    Under drop_participant every retained row is complete; under keep_pairwise
    missing responses stay in the matrix behind the mask. Row order follows
    file order and parsing is locale-independent (UTF-8, '.'-free integers).
    """
    if missing_policy not in MISSING_POLICIES:
        raise ValidationError(
            f"unknown missing policy {missing_policy!r}; expected one of {MISSING_POLICIES}"
        )
    path = Path(csv_path)
    if not path.exists():
        raise ValidationError(f"survey file not found: {path}")

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"survey file {path} is empty (no header row)") from None
        except csv.Error as exc:
            raise ValidationError(f"malformed CSV header in {path}: {exc}") from exc

        positions: dict[str, int] = {}
        duplicates = set()
        for i, name in enumerate(header):
            if name in positions:
                duplicates.add(name)
            else:
                positions[name] = i
        needed = [schema.id_column, *schema.attribute_columns, *schema.item_ids]
        for name in needed:
            if name not in positions:
                raise ValidationError(f"column {name!r} declared by the schema is missing from the header")
            if name in duplicates:
                raise ValidationError(f"column {name!r} appears more than once in the header")
        id_pos = positions[schema.id_column]
        attr_pos = [positions[c] for c in schema.attribute_columns]
        item_pos = [positions[i] for i in schema.item_ids]

        ids: list[str] = []
        rows: list[list[int]] = []
        attr_vals: list[list[str]] = [[] for _ in schema.attribute_columns]
        seen_ids: dict[str, int] = {}
        missing_cells = 0
        row_no = 0
        try:
            for row in reader:
                row_no += 1
                if len(row) != len(header):
                    raise ValidationError(
                        f"malformed CSV: data row {row_no} has {len(row)} fields, expected {len(header)}"
                    )
                pid = row[id_pos]
                if pid in seen_ids:
                    raise ValidationError(
                        f"duplicate participant id {pid!r} at data row {row_no} "
                        f"(first seen at data row {seen_ids[pid]})"
                    )
                seen_ids[pid] = row_no
                codes_row = []
                for item, pos in zip(schema.items, item_pos):
                    token = row[pos].strip()
                    if token == schema.missing_token:
                        codes_row.append(MISSING)
                        missing_cells += 1
                        continue
                    try:
                        value = int(token)
                    except ValueError:
                        raise ValidationError(
                            f"invalid code at data row {row_no}, column {item.item_id!r}: "
                            f"{row[pos]!r} is neither an integer nor the missing token"
                        ) from None
                    if value < 0 or value >= item.scale_size:
                        raise ValidationError(
                            f"out-of-range code at data row {row_no}, column {item.item_id!r}: "
                            f"got {value}, valid codes are 0..{item.scale_size - 1}"
                        )
                    codes_row.append(value)
                ids.append(pid)
                rows.append(codes_row)
                for k, pos in enumerate(attr_pos):
                    attr_vals[k].append(row[pos])
        except csv.Error as exc:
            raise ValidationError(f"malformed CSV near data row {row_no + 1} in {path}: {exc}") from exc

    rows_read = len(rows)
    if rows_read == 0:
        raise ValidationError(f"survey file {path} contains a header but no data rows")

    codes = np.array(rows, dtype=np.int16)
    keep = np.ones(rows_read, dtype=bool)
    if missing_policy == "drop_participant":
        keep = (codes != MISSING).all(axis=1)
        if not keep.any():
            raise ValidationError(
                f"all {rows_read} rows were dropped by the drop_participant policy"
            )
    rows_dropped = int(rows_read - keep.sum())
    report = LoadReport(rows_read=rows_read, rows_dropped=rows_dropped, missing_cells=missing_cells)

    kept_idx = np.nonzero(keep)[0]
    attributes = {
        c: tuple(attr_vals[k][i] for i in kept_idx)
        for k, c in enumerate(schema.attribute_columns)
    }
    return ResponseMatrix(
        schema=schema,
        participant_ids=[ids[i] for i in kept_idx],
        codes=codes[kept_idx],
        attributes=attributes,
        report=report,
    )


def write_survey(matrix: ResponseMatrix, csv_path) -> None:
    """Write a ResponseMatrix as CSV in the loader's layout (id, attributes, items)."""
    schema = matrix.schema
    path = Path(csv_path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([schema.id_column, *schema.attribute_columns, *schema.item_ids])
        for i, pid in enumerate(matrix.participant_ids):
            row = [pid]
            row.extend(matrix.attributes[c][i] for c in schema.attribute_columns)
            for j in range(matrix.n_items):
                if matrix.mask[i, j]:
                    row.append(str(int(matrix.codes[i, j])))
                else:
                    row.append(schema.missing_token)
            writer.writerow(row)

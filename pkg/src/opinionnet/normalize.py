"""Mapping ordinal codes onto a symmetric scale from -1 to +1, and onto signs.

A code c on a k-point scale becomes (2c - (k-1)) / (k-1): equally spaced
rationals with the endpoints at -1 and +1 and, for odd k, a neutral 0 at the
midpoint. Values are stored as integer numerators over one shared denominator
(the lcm of the per-item steps k-1), so all downstream comparisons are exact.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from math import lcm
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .ingest import ResponseMatrix


def scale_values(scale_size: int) -> tuple[Fraction, ...]:
    """The normalized scale points for a k-point item, low to high."""
    if scale_size < 2:
        raise ValidationError("scales need at least 2 points")
    k = scale_size
    return tuple(Fraction(2 * c - (k - 1), k - 1) for c in range(k))


class NormalizedMatrix:
    """Responses rescaled per item to exact rationals in [-1, +1].

    `numerators` is an int64 array over the shared `denominator`; missing
    entries are masked (numerator slot zeroed). Immutable.
    """

    __slots__ = ("source", "numerators", "mask", "denominator")

    def __init__(self, source: ResponseMatrix, numerators, mask, denominator: int):
        numerators = np.asarray(numerators, dtype=np.int64)
        self.source = source
        self.numerators = numerators
        self.mask = mask
        self.denominator = int(denominator)
        self.numerators.setflags(write=False)

    @property
    def n_participants(self) -> int:
        return self.numerators.shape[0]

    @property
    def n_items(self) -> int:
        return self.numerators.shape[1]

    @property
    def participant_ids(self):
        return self.source.participant_ids

    @property
    def schema(self):
        return self.source.schema

    @property
    def has_missing(self) -> bool:
        return not bool(self.mask.all())

    def value_at(self, participant: int, item: int):
        """Exact normalized value, or None when missing."""
        if not self.mask[participant, item]:
            return None
        return Fraction(int(self.numerators[participant, item]), self.denominator)

    def row_values(self, participant: int) -> list:
        return [self.value_at(participant, j) for j in range(self.n_items)]


def renormalize(matrix: ResponseMatrix) -> NormalizedMatrix:
    """Map every code to its symmetric scale value, exactly.

    On a 5-point scale the codes 0..4 become -1, -1/2, 0, 1/2, 1; on a
    4-point scale -1, -1/3, 1/3, 1. Missing entries stay missing.
    """
    steps = [item.scale_size - 1 for item in matrix.schema.items]
    denominator = 1
    for s in steps:
        denominator = lcm(denominator, s)
    # downstream pair sums reach n_items * denominator; keep abundant headroom in int64
    if denominator > (2**62) // max(4 * matrix.n_items, 4):
        raise ValidationError(
            "combined scale sizes produce a denominator too large for exact integer arithmetic"
        )
    step_mult = np.array([denominator // s for s in steps], dtype=np.int64)
    km1 = np.array(steps, dtype=np.int64)
    codes = matrix.codes.astype(np.int64)
    numerators = (2 * codes - km1[None, :]) * step_mult[None, :]
    numerators[~matrix.mask] = 0
    return NormalizedMatrix(matrix, numerators, matrix.mask, denominator)


class SignMatrix:
    """Responses reduced to sign: -1 below the scale midpoint, +1 above, 0 at it."""

    __slots__ = ("source", "signs", "mask")

    def __init__(self, source: NormalizedMatrix, signs, mask):
        self.source = source
        self.signs = np.asarray(signs, dtype=np.int8)
        self.mask = mask
        self.signs.setflags(write=False)

    @property
    def n_participants(self) -> int:
        return self.signs.shape[0]

    @property
    def n_items(self) -> int:
        return self.signs.shape[1]

    @property
    def participant_ids(self):
        return self.source.participant_ids

    @property
    def has_missing(self) -> bool:
        return not bool(self.mask.all())

    def sign_at(self, participant: int, item: int):
        if not self.mask[participant, item]:
            return None
        return int(self.signs[participant, item])


def binarize(normalized: NormalizedMatrix) -> SignMatrix:
    """Collapse normalized values to {-1, 0, +1}; missing entries stay missing.

    Neutral (0) occurs only on odd scales and keeps its own class rather than
    being forced to a side.
    """
    signs = np.sign(normalized.numerators).astype(np.int8)
    signs = np.where(normalized.mask, signs, np.int8(0)).astype(np.int8)
    return SignMatrix(normalized, signs, normalized.mask)


def write_normalized_csv(normalized: NormalizedMatrix, csv_path) -> None:
    """Debugging dump of normalized values as exact fraction strings."""
    schema = normalized.schema
    path = Path(csv_path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([schema.id_column, *schema.item_ids])
        for i, pid in enumerate(normalized.participant_ids):
            row = [pid]
            for j in range(normalized.n_items):
                value = normalized.value_at(i, j)
                row.append(schema.missing_token if value is None else str(value))
            writer.writerow(row)

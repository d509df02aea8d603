"""Support-pattern enumeration, symmetry orbits and the type census.

Patterns (subsets of the nine basis cells) are classified up to relabeling
of the three row levels, the three column levels and, optionally, swapping
the two particles (transposition of the 3x3 grid).  Each orbit is matched
against built-in representative patterns of the published type families
(I, III_1..III_3, IV_1..IV_5, V_1..V_6, VI_1..VI_4) so the census can be
audited against the tabulated classification.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import NamedTuple

import numpy as np

from .state_model import SupportPattern, random_state

GROUP_MODES = ("rowcol", "rowcol_swap")


def _flat_permutations(mode: str) -> tuple[tuple[int, ...], ...]:
    """All group elements as permutations of the flat indices 0..8."""
    if mode not in GROUP_MODES:
        raise ValueError(f"mode must be one of {GROUP_MODES}, got {mode!r}")
    perms = []
    for row_perm in permutations(range(3)):
        for col_perm in permutations(range(3)):
            for swap in ((False, True) if mode == "rowcol_swap" else (False,)):
                table = []
                for flat in range(9):
                    r, c = divmod(flat, 3)
                    if swap:
                        r, c = c, r
                    table.append(3 * row_perm[r] + col_perm[c])
                perms.append(tuple(table))
    return tuple(perms)


@dataclass(frozen=True)
class SymmetryGroup:
    """Row x column relabelings, optionally extended by particle swap."""

    mode: str = "rowcol_swap"

    def __post_init__(self):
        if self.mode not in GROUP_MODES:
            raise ValueError(f"mode must be one of {GROUP_MODES}, got {self.mode!r}")

    @property
    def order(self) -> int:
        return 72 if self.mode == "rowcol_swap" else 36

    @property
    def flat_maps(self) -> tuple[tuple[int, ...], ...]:
        return _flat_permutations(self.mode)

    def orbit(self, pattern: SupportPattern) -> list[SupportPattern]:
        """Distinct images of ``pattern``, sorted by bitmask."""
        masks = set()
        for table in self.flat_maps:
            mask = 0
            bits = pattern.bitmask
            for i in range(9):
                if bits >> i & 1:
                    mask |= 1 << table[i]
            masks.add(mask)
        return [SupportPattern(m) for m in sorted(masks)]


DEFAULT_GROUP = SymmetryGroup("rowcol_swap")


def enumerate_patterns(k: int) -> list[SupportPattern]:
    """All C(9, k) patterns with exactly k cells, ascending by bitmask."""
    if not 1 <= k <= 9:
        raise ValueError(f"k must be between 1 and 9, got {k}")
    masks = sorted(sum(1 << i for i in combo) for combo in combinations(range(9), k))
    return [SupportPattern(m) for m in masks]


def forced_separable(pattern: SupportPattern) -> bool:
    """True when every state on the pattern is a product state.

    That happens exactly when the pattern fits inside one row or one
    column of the grid: the state then factorizes as |r> (sum_c ..|c>)
    or (sum_r ..|r>) |c>.
    """
    rows = {cell.row_index for cell in pattern}
    cols = {cell.col_index for cell in pattern}
    return len(rows) == 1 or len(cols) == 1


def generic_rank(pattern: SupportPattern, seed: int = 0, trials: int = 8) -> int:
    """Maximum Schmidt rank over seeded random fillings of the pattern.

    Rank-deficient fillings form a measure-zero set, so the max over a few
    trials is the generic rank of the pattern.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    best = 0
    for t in range(trials):
        state = random_state(pattern, (seed, t))
        s = np.linalg.svd(state.coeff, compute_uv=False)
        best = max(best, int(np.sum(s > 1e-10 * s[0])))
        if best == 3:
            break
    return best


def canonicalize(pattern: SupportPattern, group: SymmetryGroup = DEFAULT_GROUP) -> SupportPattern:
    """Minimal-bitmask representative of the pattern's orbit."""
    return group.orbit(pattern)[0]


#: representative patterns of the published type families, as transcribed
#: from the tabulated classification (families listing several index forms
#: get one representative per form)
TYPE_REPRESENTATIVES: dict[str, tuple[str, ...]] = {
    "I": ("U1,V2",),
    "III_1": ("U1,V2,W3",),
    "III_2": ("U1,U2,V1",),
    "III_3": ("U1,U2,V3",),
    "IV_1": ("U1,U2,U3,V1", "U1,U2,V1,W1"),
    "IV_2": ("U1,U2,V1,V3", "U1,U2,V1,W2"),
    "IV_3": ("U1,U2,V1,W3",),
    "IV_4": ("U1,U2,V1,V2",),
    "IV_5": ("U1,U2,V3,W3",),
    "V_1": ("U1,U2,U3,V1,V2", "U1,U2,V1,V2,W1"),
    "V_2": ("U1,U2,V1,V2,W3",),
    "V_3": ("U1,U2,U3,V1,W1",),
    "V_4": ("U1,U2,U3,V1,W2", "U1,U2,V1,V3,W1"),
    "V_5": ("U1,U2,V1,V3,W2",),
    "V_6": ("U1,U2,V1,V3,W3",),
    "VI_1": ("U1,U2,U3,V1,V2,V3", "U1,U2,V1,V2,W1,W2"),
    "VI_2": ("U1,U2,V1,V3,W2,W3",),
    "VI_3": ("U1,U2,U3,V1,V2,W1",),
    "VI_4": ("U1,U2,U3,V1,V2,W3", "U1,U2,V1,V2,W1,W3"),
}


class TypeLabelResult(NamedTuple):
    labels: tuple[str, ...]
    discrepancy: bool


def _canonical_label_map(group: SymmetryGroup) -> dict[int, tuple[str, ...]]:
    table: dict[int, set[str]] = {}
    for label, reps in TYPE_REPRESENTATIVES.items():
        for rep in reps:
            canon = canonicalize(SupportPattern.from_labels(rep), group).bitmask
            table.setdefault(canon, set()).add(label)
    return {mask: tuple(sorted(labels)) for mask, labels in table.items()}


_LABEL_CACHE: dict[str, dict[int, tuple[str, ...]]] = {}


def type_labels(pattern: SupportPattern, group: SymmetryGroup = DEFAULT_GROUP) -> TypeLabelResult:
    """Published type labels whose representative shares the pattern's orbit.

    Patterns with 2..6 cells are matched; outside that range the result is
    unlabeled.  The discrepancy flag is raised whenever the label set does
    not single out exactly one type (several types landing in one orbit, or
    an entangled-size pattern matching none).
    """
    if group.mode not in _LABEL_CACHE:
        _LABEL_CACHE[group.mode] = _canonical_label_map(group)
    if not 2 <= pattern.k <= 6:
        return TypeLabelResult((), False)
    canon = canonicalize(pattern, group).bitmask
    labels = _LABEL_CACHE[group.mode].get(canon, ())
    return TypeLabelResult(labels, len(labels) != 1)


@dataclass(frozen=True)
class OrbitClass:
    """One symmetry orbit of k-cell patterns."""

    canonical: SupportPattern
    size: int
    representatives: tuple[SupportPattern, ...]
    type_labels: tuple[str, ...]
    forced_separable: bool
    generic_rank: int
    discrepancy: bool


def census(k: int, group: SymmetryGroup = DEFAULT_GROUP, rank_seed: int = 0) -> list[OrbitClass]:
    """Orbit decomposition of all k-cell patterns, sorted by size then mask.

    Each orbit carries the type labels matching it, its forced-separability
    and generic Schmidt rank (constant on orbits), and a discrepancy flag.
    Unlabeled orbits are only flagged when they are entangled (the tables
    deliberately omit the separable line patterns).
    """
    orbits: dict[int, set[int]] = {}
    for pattern in enumerate_patterns(k):
        orbit = group.orbit(pattern)
        orbits.setdefault(orbit[0].bitmask, set()).update(p.bitmask for p in orbit)
    out = []
    for canon_mask, members in orbits.items():
        canon = SupportPattern(canon_mask)
        sep = forced_separable(canon)
        labels, flag = type_labels(canon, group)
        if sep:
            flag = False
        out.append(OrbitClass(
            canonical=canon,
            size=len(members),
            representatives=tuple(SupportPattern(m) for m in sorted(members)),
            type_labels=labels,
            forced_separable=sep,
            generic_rank=generic_rank(canon, seed=rank_seed),
            discrepancy=flag,
        ))
    out.sort(key=lambda oc: (oc.size, oc.canonical.bitmask))
    return out


def census_to_dicts(orbit_classes: list[OrbitClass]) -> list[dict]:
    """JSON-ready census rows."""
    return [
        {
            "canonical": oc.canonical.labels,
            "bitmask": oc.canonical.bitmask,
            "size": oc.size,
            "labels": list(oc.type_labels),
            "forced_separable": oc.forced_separable,
            "generic_rank": oc.generic_rank,
            "discrepancy": oc.discrepancy,
        }
        for oc in orbit_classes
    ]

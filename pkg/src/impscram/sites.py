"""Qubit register labels and sparse Pauli strings.

A SiteId names one qubit for the lifetime of a realization: a medium site
(strip, x), an impurity-chain site y, the reset/discard slots, or one of the
purifying ancillas.  Strip is always 0 in the 1D model.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

I, X, Z, Y = 0, 1, 2, 3
LETTER_NAMES = {I: "I", X: "X", Z: "Z", Y: "Y"}
LETTER_CODES = {"I": I, "X": X, "Z": Z, "Y": Y}


class SiteId(NamedTuple):
    kind: str  # M, I, R, D, A, AM, AR, plus decoder registers B, AB, K, G, G2, DM
    strip: int = 0
    x: int = 0

    def __repr__(self):
        if self.kind in ("M", "AM"):
            return f"{self.kind}({self.strip},{self.x})"
        if self.kind == "I":
            return f"I({self.x})"
        return self.kind


def medium(x: int, strip: int = 0) -> SiteId:
    return SiteId("M", strip, x)


def impurity(y: int = 0) -> SiteId:
    return SiteId("I", 0, y)


def reset_slot() -> SiteId:
    return SiteId("R")


def discard_slot() -> SiteId:
    return SiteId("D")


def ancilla_a() -> SiteId:
    return SiteId("A")


def ancilla_m(x: int, strip: int = 0) -> SiteId:
    return SiteId("AM", strip, x)


def ancilla_r() -> SiteId:
    return SiteId("AR")


class PauliString:
    """Sparse signless Pauli operator: SiteId -> letter in {X, Z, Y}.

    Phases are deliberately not tracked; every observable built on these
    strings depends only on (anti)commutation.  Identity sites are never
    stored, so ``len`` is the operator weight.
    """

    __slots__ = ("letters",)

    def __init__(self, letters: dict[SiteId, int] | None = None):
        self.letters = {}
        for site, v in (letters or {}).items():
            v = LETTER_CODES[v] if isinstance(v, str) else int(v)
            if v == I:
                continue
            if v not in (X, Z, Y):
                raise ValueError(f"bad Pauli letter {v!r}")
            self.letters[site] = v

    @property
    def weight(self) -> int:
        return len(self.letters)

    @property
    def support(self) -> set[SiteId]:
        return set(self.letters)

    def get(self, site: SiteId) -> int:
        return self.letters.get(site, I)

    def is_identity(self) -> bool:
        return not self.letters

    def __eq__(self, other):
        return isinstance(other, PauliString) and self.letters == other.letters

    def __hash__(self):
        return hash(frozenset(self.letters.items()))

    def __repr__(self):
        if not self.letters:
            return "PauliString(identity)"
        body = " ".join(f"{LETTER_NAMES[v]}{s!r}" for s, v in sorted(self.letters.items()))
        return f"PauliString({body})"


def anticommutes(p: PauliString, q: PauliString) -> bool:
    """True iff p and q anticommute (odd number of clashing letters)."""
    small, big = (p, q) if len(p.letters) <= len(q.letters) else (q, p)
    parity = 0
    for site, v in small.letters.items():
        w = big.letters.get(site, I)
        if w and w != v:
            parity ^= 1
    return bool(parity)


def layout_from_medium(xs: Iterable[int], with_reset: bool = True) -> list[SiteId]:
    """Standard purified 1D register layout for the given touched medium sites."""
    sites = [ancilla_a(), impurity(), discard_slot()]
    if with_reset:
        sites += [reset_slot(), ancilla_r()]
    for x in sorted(set(xs)):
        sites.append(medium(x))
        sites.append(ancilla_m(x))
    return sites

"""Material identifiers: database ids, compositions, and chemical spaces.

Root-section titles classify into a three-level hierarchy: a database id
(``MP-1``), a composition with fixed stoichiometry (``Fe2O3``), or a chemical
space where every element carries a ``*`` wildcard (``Fe*O*``). A chemical
space contains every composition over exactly its element set.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce

from .errors import MalformedIdentifier, MixedWildcard, UnknownElement

ELEMENTS = frozenset(
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni "
    "Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I "
    "Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt "
    "Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr "
    "Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og".split()
)

_MP_ID_RE = re.compile(r"mp-([0-9]+)", re.IGNORECASE)
_TOKEN_RE = re.compile(r"([A-Z][a-z]?)([0-9]+|\*)?")


@dataclass(frozen=True)
class MpId:
    number: int


@dataclass(frozen=True)
class Composition:
    elements: dict[str, int]


@dataclass(frozen=True)
class ChemicalSpace:
    elements: frozenset[str]


MaterialId = MpId | Composition | ChemicalSpace


def classify(title: str) -> MaterialId:
    """Classify a root-section title into the material hierarchy.

    Raises UnknownElement, MixedWildcard, or MalformedIdentifier.
    """
    title = title.strip()
    if not title:
        raise MalformedIdentifier("empty identifier")

    m = _MP_ID_RE.fullmatch(title)
    if m:
        number = int(m.group(1))
        if number < 1:
            raise MalformedIdentifier(f"database id must be positive: {title!r}")
        return MpId(number)

    parts = _tokenize(title)
    unknown = sorted({sym for sym, _ in parts if sym not in ELEMENTS})
    if unknown:
        raise UnknownElement(f"unknown element symbol(s): {', '.join(unknown)}")

    wildcards = sum(1 for _, suffix in parts if suffix == "*")
    if wildcards:
        if wildcards != len(parts):
            raise MixedWildcard(
                f"{title!r} mixes '*' wildcards with counted or bare symbols"
            )
        return ChemicalSpace(frozenset(sym for sym, _ in parts))

    counts: dict[str, int] = {}
    for sym, suffix in parts:
        n = int(suffix) if suffix else 1
        if n < 1:
            raise MalformedIdentifier(f"zero count for {sym} in {title!r}")
        counts[sym] = counts.get(sym, 0) + n
    return Composition(counts)


def _tokenize(title: str) -> list[tuple[str, str | None]]:
    # Canonical chemical-space keys separate symbols with '-' (Fe*-O*).
    body = title.replace("-", "") if "*" in title else title
    parts: list[tuple[str, str | None]] = []
    pos = 0
    while pos < len(body):
        m = _TOKEN_RE.match(body, pos)
        if not m or not m.group(1):
            raise MalformedIdentifier(
                f"{title!r} is neither a database id nor a chemical formula"
            )
        parts.append((m.group(1), m.group(2)))
        pos = m.end()
    if not parts:
        raise MalformedIdentifier(f"{title!r} contains no element symbols")
    return parts


def contains(space: ChemicalSpace, comp: Composition) -> bool:
    """True iff the composition's element set equals the space's."""
    return frozenset(comp.elements) == space.elements


def space_of(comp: Composition) -> ChemicalSpace:
    """The chemical space spanned by a composition's elements."""
    return ChemicalSpace(frozenset(comp.elements))


def canonical_key(mid: MaterialId) -> str:
    """Stable store/group key, deterministic and injective per variant.

    MpId(1) -> "mp-1"; Composition {O:4, Fe:2} -> "FeO2" (counts reduced by
    their gcd, count 1 omitted, symbols alphabetical); ChemicalSpace {O, Fe}
    -> "Fe*-O*".
    """
    if isinstance(mid, MpId):
        return f"mp-{mid.number}"
    if isinstance(mid, Composition):
        g = reduce(math.gcd, mid.elements.values())
        return "".join(
            sym + (str(n // g) if n // g != 1 else "")
            for sym, n in sorted(mid.elements.items())
        )
    if isinstance(mid, ChemicalSpace):
        return "-".join(sym + "*" for sym in sorted(mid.elements))
    raise TypeError(f"not a material id: {mid!r}")

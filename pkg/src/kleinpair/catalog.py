"""The built-in catalog of groups and normal pairs."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    g1: str
    g2: str | None = None
    operations: tuple[str, ...] = ()
    goldens: tuple[str, ...] = ()


def normal_pairs() -> list[tuple[str, str]]:
    out = []
    for n in range(2, 13):
        for k in range(2, 24 // n + 1):
            out.append((f"C{n}", f"C{n * k}"))
    for n in range(2, 6):
        out.append((f"C{2 * n}", f"BD{n}"))
    for n in (3, 5):
        out.append((f"C{n}", f"BD{n}"))
    for g in ("BD2", "2T", "2O", "2I"):
        out.append(("C2", g))
    out.append(("BD2", "2T"))
    out.append(("2T", "2O"))
    return out


def families() -> list[str]:
    return [f"C{n}" for n in range(2, 9)] + [f"BD{n}" for n in range(2, 6)] + ["2T", "2O", "2I"]


def groups() -> list[str]:
    seen = []
    for a, b in normal_pairs():
        for g in (a, b):
            if g not in seen:
                seen.append(g)
    return seen


def entries() -> list[CatalogEntry]:
    out = [CatalogEntry(g, g, None, ("group", "kleinian", "deform", "fold", "cbh")) for g in families()]
    for a, b in normal_pairs():
        golden = ()
        if (a, b) in {("C2", "C4"), ("C2", "C6"), ("C3", "C6")} or (b.startswith("BD") and a == f"C{2 * int(b[2:])}"):
            golden = (f"pair_{a}_{b}.json",)
        out.append(CatalogEntry(f"{a}<{b}", a, b, ("pair", "fold", "socle", "derivations"), golden))
    return out

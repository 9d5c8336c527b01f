"""Unglue two tree edges and glue their four polygon edges back the other way."""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import CorruptedState, InvalidInput
from .signseq import Pairing


def unglue_reglue(
    s: Sequence[int], p: Pairing, e1: Iterable[int], e2: Iterable[int]
) -> Pairing:
    """Replace pairs ``e1`` and ``e2`` by the other sign-compatible matching of their indices.

    The result may be crossing; callers that need a tree must check it.
    """
    e1 = tuple(sorted(e1))
    e2 = tuple(sorted(e2))
    if e1 == e2 or e1 not in p or e2 not in p:
        raise InvalidInput(f"{e1} and {e2} must be two distinct pairs of the pairing")
    idx = e1 + e2
    plus = sorted(i for i in idx if s[i - 1] == 1)
    minus = sorted(i for i in idx if s[i - 1] == -1)
    if len(plus) != 2 or len(minus) != 2:
        raise CorruptedState(f"pairs {e1}, {e2} do not carry two signs of each kind")
    old = {e1, e2}
    for new in (
        {tuple(sorted((plus[0], minus[0]))), tuple(sorted((plus[1], minus[1])))},
        {tuple(sorted((plus[0], minus[1]))), tuple(sorted((plus[1], minus[0])))},
    ):
        if new != old:
            rest = tuple(q for q in p if q not in old)
            return Pairing(rest + tuple(new))
    raise CorruptedState("no alternative compatible matching")  # pragma: no cover

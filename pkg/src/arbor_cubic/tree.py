"""Automorphisms of the finite rooted ternary tree, stored as portraits.

Nodes are words over "012"; the root is the empty word. A portrait keeps one
permutation of {0,1,2} per internal node u, acting on the last letter of the
children of u:

    sigma(s1 s2 ... sm) = p_()(s1) p_(s1)(s2) ... p_(s1...s_{m-1})(sm)

Composition follows function composition: ``a * b`` applies ``b`` first.
"""

from __future__ import annotations

import enum
import itertools
import json
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

# S3 as indices 0..5; index 0 is the identity.
S3: tuple[tuple[int, int, int], ...] = tuple(itertools.permutations(range(3)))
S3_INDEX = {p: i for i, p in enumerate(S3)}
S3_MUL = tuple(
    tuple(S3_INDEX[tuple(S3[i][S3[j][k]] for k in range(3))] for j in range(6)) for i in range(6)
)
S3_INV = tuple(S3_INDEX[tuple(sorted(range(3), key=lambda k: p[k]))] for p in S3)


def _perm_sign(p: Sequence[int]) -> int:
    sign, seen = 1, set()
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


S3_SIGN = tuple(_perm_sign(p) for p in S3)
IDENTITY = 0
TRANSPOSITION_01 = S3_INDEX[(1, 0, 2)]
THREE_CYCLE = S3_INDEX[(1, 2, 0)]


def level_offset(k: int) -> int:
    """BFS index of the first node at level k."""
    return (3**k - 1) // 2


def node_index(word: str) -> int:
    return level_offset(len(word)) + (int(word, 3) if word else 0)


def node_word(level: int, position: int) -> str:
    if level == 0:
        return ""
    digits = []
    for _ in range(level):
        position, d = divmod(position, 3)
        digits.append(str(d))
    return "".join(reversed(digits))


@lru_cache(maxsize=None)
def level_words(level: int) -> tuple[str, ...]:
    return tuple(node_word(level, i) for i in range(3**level))


def _check_word(word: str) -> None:
    if any(ch not in "012" for ch in word):
        raise ValueError(f"invalid node label {word!r}")


def tree_distance(a: str, b: str) -> int:
    """Number of levels down to the deepest common ancestor of two same-level nodes."""
    _check_word(a)
    _check_word(b)
    if len(a) != len(b):
        raise ValueError("tree distance needs nodes on the same level")
    common = 0
    for x, y in zip(a, b):
        if x != y:
            break
        common += 1
    return len(a) - common


@dataclass(frozen=True)
class TreePortrait:
    depth: int
    local: tuple[int, ...]  # S3 indices, BFS order over levels 0..depth-1

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if len(self.local) != level_offset(self.depth):
            raise ValueError("wrong number of local permutations for this depth")

    # construction ---------------------------------------------------------

    @classmethod
    def identity(cls, depth: int) -> "TreePortrait":
        return cls(depth, (IDENTITY,) * level_offset(depth))

    @classmethod
    def from_locals(cls, depth: int, locals_by_word: dict[str, Sequence[int] | int]) -> "TreePortrait":
        """Identity except at the listed nodes (perm tuples or S3 indices)."""
        local = [IDENTITY] * level_offset(depth)
        for word, perm in locals_by_word.items():
            _check_word(word)
            if len(word) >= depth:
                raise ValueError(f"node {word!r} is not internal at depth {depth}")
            local[node_index(word)] = perm if isinstance(perm, int) else S3_INDEX[tuple(perm)]
        return cls(depth, tuple(local))

    @classmethod
    def random(cls, depth: int, rng: random.Random) -> "TreePortrait":
        return cls(depth, tuple(rng.randrange(6) for _ in range(level_offset(depth))))

    # local data -----------------------------------------------------------

    def perm_at(self, word: str) -> tuple[int, int, int]:
        return S3[self.local[node_index(word)]]

    def is_identity(self) -> bool:
        return not any(self.local)

    def support(self) -> dict[str, tuple[int, int, int]]:
        """Nodes with a non-identity local permutation."""
        out = {}
        for k in range(self.depth):
            off = level_offset(k)
            for pos in range(3**k):
                idx = self.local[off + pos]
                if idx:
                    out[node_word(k, pos)] = S3[idx]
        return out

    # action ---------------------------------------------------------------

    def __call__(self, word: str) -> str:
        _check_word(word)
        if len(word) > self.depth:
            raise ValueError("node lies above the tree")
        src, out = 0, []
        for level, ch in enumerate(word):
            t = S3[self.local[level_offset(level) + src]][int(ch)]
            out.append(str(t))
            src = 3 * src + int(ch)
        return "".join(out)

    def level_images(self, level: int) -> list[int]:
        """Image positions of the nodes at ``level`` (positions are base-3 values)."""
        imgs = [0]
        for k in range(level):
            off = level_offset(k)
            nxt = [0] * (3 ** (k + 1))
            for pos, img in enumerate(imgs):
                p = S3[self.local[off + pos]]
                for s in range(3):
                    nxt[3 * pos + s] = 3 * img + p[s]
            imgs = nxt
        return imgs

    def all_images(self) -> list[list[int]]:
        """Image positions for every level 0..depth."""
        out = [[0]]
        for k in range(self.depth):
            off = level_offset(k)
            imgs = out[-1]
            nxt = [0] * (3 ** (k + 1))
            for pos, img in enumerate(imgs):
                p = S3[self.local[off + pos]]
                for s in range(3):
                    nxt[3 * pos + s] = 3 * img + p[s]
            out.append(nxt)
        return out

    # group structure --------------------------------------------------------

    def __mul__(self, other: "TreePortrait") -> "TreePortrait":
        """self o other."""
        if self.depth != other.depth:
            raise ValueError("depth mismatch")
        images = other.all_images()
        local = [0] * len(self.local)
        for k in range(self.depth):
            off = level_offset(k)
            row = images[k]
            for pos in range(3**k):
                local[off + pos] = S3_MUL[self.local[off + row[pos]]][other.local[off + pos]]
        return TreePortrait(self.depth, tuple(local))

    def inverse(self) -> "TreePortrait":
        images = self.all_images()
        local = [0] * len(self.local)
        for k in range(self.depth):
            off = level_offset(k)
            for pos, img in enumerate(images[k]):
                local[off + img] = S3_INV[self.local[off + pos]]
        return TreePortrait(self.depth, tuple(local))

    def __pow__(self, k: int) -> "TreePortrait":
        if k < 0:
            return self.inverse() ** (-k)
        out = TreePortrait.identity(self.depth)
        for _ in range(k):
            out = self * out
        return out

    def conjugate(self, g: "TreePortrait") -> "TreePortrait":
        """g self g^{-1}."""
        return g * self * g.inverse()

    def restrict(self, depth: int) -> "TreePortrait":
        if not 1 <= depth <= self.depth:
            raise ValueError("restriction depth out of range")
        return TreePortrait(depth, self.local[: level_offset(depth)])

    def extend(self, depth: int) -> "TreePortrait":
        """Same action below, identity locals on the new levels."""
        if depth < self.depth:
            raise ValueError("cannot extend to a smaller depth")
        return TreePortrait(depth, self.local + (IDENTITY,) * (level_offset(depth) - len(self.local)))

    def subtree(self, word: str) -> "TreePortrait":
        """The induced map from the subtree above ``word`` to the one above its image."""
        k = len(word)
        if k >= self.depth:
            raise ValueError("subtree would be empty")
        base = int(word, 3) if word else 0
        local = []
        for j in range(self.depth - k):
            off = level_offset(k + j)
            start = base * 3**j
            local.extend(self.local[off + start : off + start + 3**j])
        return TreePortrait(self.depth - k, tuple(local))

    # serialization ----------------------------------------------------------

    def to_json_obj(self) -> dict[str, str]:
        out = {}
        for k in range(self.depth):
            for pos, word in enumerate(level_words(k)):
                out[word] = "".join(map(str, S3[self.local[level_offset(k) + pos]]))
        return out

    @classmethod
    def from_json_obj(cls, obj: dict[str, str], depth: int | None = None) -> "TreePortrait":
        if depth is None:
            depth = 1 + max((len(w) for w in obj), default=0)
        locals_by_word = {}
        for word, text in obj.items():
            perm = tuple(int(ch) for ch in text)
            if sorted(perm) != [0, 1, 2]:
                raise ValueError(f"{text!r} is not a permutation of 012")
            locals_by_word[word] = perm
        return cls.from_locals(depth, locals_by_word)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


# -- signs ------------------------------------------------------------------

def sgn(sigma: TreePortrait, y: str, m: int) -> int:
    """Parity of the induced bijection from the 3^m nodes m levels above y to those above sigma(y).

    Each local permutation at relative depth j < m acts on 3^(m-1-j) (an odd
    number of) blocks, so the parity is the product of the local signs over the
    subtree of y up to relative depth m-1.
    """
    _check_word(y)
    if m < 1 or len(y) + m > sigma.depth:
        raise ValueError(f"sgn_{m} undefined above {y!r} at depth {sigma.depth}")
    k = len(y)
    base = int(y, 3) if y else 0
    sign = 1
    for j in range(m):
        off = level_offset(k + j)
        start = base * 3**j
        for idx in sigma.local[off + start : off + start + 3**j]:
            if S3_SIGN[idx] < 0:
                sign = -sign
    return sign


def sgn_bruteforce(sigma: TreePortrait, y: str, m: int) -> int:
    """Same quantity by enumerating the bijection on {0,1,2}^m explicitly."""
    if m < 1 or len(y) + m > sigma.depth:
        raise ValueError("out of range")
    image_y = sigma(y)
    suffixes = ["".join(w) for w in itertools.product("012", repeat=m)]
    index = {w: i for i, w in enumerate(suffixes)}
    perm = []
    for w in suffixes:
        img = sigma(y + w)
        assert img.startswith(image_y)
        perm.append(index[img[len(y):]])
    return _perm_sign(perm)


def level_sign_product(sigma: TreePortrait, y: str, ell: int) -> int:
    """sgn_ell(sigma, y) * sgn_{ell-1}(sigma, y)."""
    return sgn(sigma, y, ell) * sgn(sigma, y, ell - 1)


class Membership(enum.Enum):
    IN_Q = "IN_Q"
    IN_QTILDE_ONLY = "IN_QTILDE_ONLY"
    OUTSIDE = "OUTSIDE"


def constrained_nodes(depth: int, ell: int) -> list[str]:
    """Nodes whose sign product is determined at this depth: levels 0..depth-ell."""
    return [w for k in range(0, depth - ell + 1) for w in level_words(k)]


def q_membership(sigma: TreePortrait, ell: int) -> Membership:
    if ell < 2:
        raise ValueError("ell must be >= 2")
    values = {level_sign_product(sigma, y, ell) for y in constrained_nodes(sigma.depth, ell)}
    if values <= {1}:
        return Membership.IN_Q
    if values == {-1}:
        return Membership.IN_QTILDE_ONLY
    return Membership.OUTSIDE


def psi(sigma: TreePortrait, ell: int) -> int:
    """Sign product at the root, the character cutting Q out of Q-tilde."""
    if sigma.depth < ell:
        return 1
    return level_sign_product(sigma, "", ell)


# -- named elements ---------------------------------------------------------

def transposition_at(depth: int, word: str) -> TreePortrait:
    """Swap the children 0 and 1 of ``word`` (and the subtrees above them)."""
    return TreePortrait.from_locals(depth, {word: TRANSPOSITION_01})


def swap_at_levels(depth: int, levels: Iterable[int]) -> TreePortrait:
    """Swap labels 0 and 1 in every listed letter position (1-based)."""
    chosen = set(levels)
    local = []
    for k in range(depth):
        local.extend([TRANSPOSITION_01 if k + 1 in chosen else IDENTITY] * 3**k)
    return TreePortrait(depth, tuple(local))


def even_level_swap(depth: int) -> TreePortrait:
    return swap_at_levels(depth, range(2, depth + 1, 2))


def full_swap(depth: int) -> TreePortrait:
    """Swap 0 and 1 in every letter; its root-to-node sign product is -1 everywhere."""
    return swap_at_levels(depth, range(1, depth + 1))


# -- H subgroups ------------------------------------------------------------

def _canonical_eps(eps: Sequence[int]) -> tuple[int, int, int]:
    eps = tuple(int(e) for e in eps)
    if len(eps) != 3 or any(e not in (1, -1) for e in eps):
        raise ValueError("parity vector must be three entries of +-1")
    return eps if eps[0] == 1 else tuple(-e for e in eps)


def h_label_change(ell: int, eps: Sequence[int]) -> TreePortrait:
    """Odd relabeling at level ell above each level-1 node i with eps_i = -1."""
    eps = tuple(eps)
    locals_by_word = {}
    for i, e in enumerate(eps):
        if e == -1:
            locals_by_word[str(i) + "0" * (ell - 2)] = TRANSPOSITION_01
    return TreePortrait.from_locals(ell, locals_by_word)


H_VARIANTS: tuple[tuple[int, int, int], ...] = ((1, 1, 1), (1, -1, -1), (1, -1, 1), (1, 1, -1))


def h_membership(sigma: TreePortrait, ell: int, eps: Sequence[int] = (1, 1, 1)) -> bool:
    """Membership in the eps-conjugate of H = {sgn_{ell-1} equal above the three level-1 nodes}."""
    if sigma.depth != ell:
        raise ValueError("H is defined at depth ell")
    if q_membership(sigma, ell) is not Membership.IN_Q:
        raise ValueError("element is not in Q_{ell,ell}")
    g = h_label_change(ell, _canonical_eps(eps))
    pulled = g.inverse() * sigma * g
    signs = {sgn(pulled, str(i), ell - 1) for i in range(3)}
    return len(signs) == 1


# -- signed automorphisms ---------------------------------------------------

@dataclass(frozen=True)
class SignedAut:
    aut: TreePortrait
    chi: int = 1

    def __post_init__(self):
        if self.chi not in (1, -1):
            raise ValueError("chi must be +-1")

    def __mul__(self, other: "SignedAut") -> "SignedAut":
        return SignedAut(self.aut * other.aut, self.chi * other.chi)

    def inverse(self) -> "SignedAut":
        return SignedAut(self.aut.inverse(), self.chi)

    def conjugate(self, g: TreePortrait) -> "SignedAut":
        return SignedAut(self.aut.conjugate(g), self.chi)


def s_value(sigma: SignedAut, y: str, ell: int) -> int:
    return level_sign_product(sigma.aut, y, ell) * sigma.chi


def signed_closure(generators: Sequence[SignedAut], limit: int = 100_000) -> list[SignedAut]:
    """All products of the generators (breadth-first), identity first."""
    if not generators:
        raise ValueError("need at least one generator")
    ident = SignedAut(TreePortrait.identity(generators[0].aut.depth), 1)
    seen = {ident.aut: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = g * x
                prior = seen.get(y.aut)
                if prior is None:
                    seen[y.aut] = y
                    nxt.append(y)
                    if len(seen) > limit:
                        raise OverflowError(f"group has more than {limit} elements")
                elif prior.chi != y.chi:
                    raise ValueError("character is not well defined on the generated group")
        frontier = nxt
    return list(seen.values())


class InconsistentSData(ValueError):
    pass


def _check_s_data(group: Sequence[SignedAut], ell: int) -> None:
    depth = group[0].aut.depth
    for y in constrained_nodes(depth, ell):
        by_image: dict[str, tuple[SignedAut, int]] = {}
        for sigma in group:
            image = sigma.aut(y)
            s = s_value(sigma, y, ell)
            if image == y and s != 1:
                raise InconsistentSData(f"S = -1 for an element fixing node {y!r}: {sigma.aut.dumps()}")
            prior = by_image.get(image)
            if prior is None:
                by_image[image] = (sigma, s)
            elif prior[1] != s:
                raise InconsistentSData(
                    f"elements agreeing on {y!r} -> {image!r} have different S: "
                    f"{prior[0].aut.dumps()} vs {sigma.aut.dumps()}"
                )


def relabel(group: Sequence[SignedAut], ell: int) -> TreePortrait:
    """Find g with S(g sigma g^{-1}, g(y)) = +1 for all sigma and all constrained y.

    Levels are processed from the root upward. At level m, for each orbit
    with representative y and chosen sigma_w mapping y to w, every w with
    S(sigma_w, y) = -1 gets a label transposition ell-1 levels above it,
    which flips that sign and touches nothing already settled.
    """
    group = list(group)
    if not group:
        raise ValueError("empty group")
    depth = group[0].aut.depth
    if any(s.aut.depth != depth for s in group):
        raise ValueError("depth mismatch in group")
    if depth < ell:
        raise ValueError("depth must be at least ell")
    _check_s_data(group, ell)

    g = TreePortrait.identity(depth)
    current = list(group)
    for m in range(0, depth - ell + 1):
        pending = set(level_words(m))
        toggles: list[str] = []
        while pending:
            y = min(pending)
            reps: dict[str, SignedAut] = {}
            for sigma in current:
                reps.setdefault(sigma.aut(y), sigma)
            pending -= set(reps)
            for w, sigma_w in sorted(reps.items()):
                if s_value(sigma_w, y, ell) == -1:
                    assert w != y
                    toggles.append(w + "0" * (ell - 1))
        if toggles:
            h = TreePortrait.from_locals(depth, {u: TRANSPOSITION_01 for u in toggles})
            current = [s.conjugate(h) for s in current]
            g = h * g
    for sigma in current:
        for y in constrained_nodes(depth, ell):
            if s_value(sigma, y, ell) != 1:
                raise AssertionError(f"relabel postcondition failed at {y!r}")
    return g


def enumerate_portraits(depth: int) -> Iterable[TreePortrait]:
    """Every element of Aut(T_{3,depth}); 6^((3^depth - 1)/2) of them."""
    for local in itertools.product(range(6), repeat=level_offset(depth)):
        yield TreePortrait(depth, local)

"""Permutation groups of tree automorphisms via Schreier-Sims.

Groups act on every non-root node of T_{3,n} (degree (3^(n+1)-3)/2, 39 at
n = 3) rather than on leaves only. The extra points cost nothing at this
size and let a base start with any nodes we like, so node stabilizers,
restriction kernels and "an element with these images" all fall out of a
stabilizer chain built with a prescribed base prefix.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .tree import (
    H_VARIANTS,
    IDENTITY,
    S3,
    S3_INDEX,
    S3_SIGN,
    THREE_CYCLE,
    TRANSPOSITION_01,
    Membership,
    SignedAut,
    TreePortrait,
    _canonical_eps,
    full_swap,
    h_label_change,
    h_membership,
    level_offset,
    level_sign_product,
    level_words,
    node_index,
    psi,
    q_membership,
    sgn,
    tree_distance,
)

MAX_DEPTH = 3

Perm = tuple[int, ...]


def degree(depth: int) -> int:
    return level_offset(depth + 1) - 1


def point(word: str) -> int:
    """Permutation point for a non-root node."""
    if not word:
        raise ValueError("the root is not a permutation point")
    return node_index(word) - 1


def point_word(p: int) -> str:
    level = 1
    while level_offset(level + 1) - 1 <= p:
        level += 1
    return level_words(level)[p - (level_offset(level) - 1)]


def to_perm(sigma: TreePortrait) -> Perm:
    out = []
    for k, images in enumerate(sigma.all_images()[1:], start=1):
        base = level_offset(k) - 1
        out.extend(base + img for img in images)
    return tuple(out)


def from_perm(perm: Sequence[int], depth: int) -> TreePortrait:
    local = []
    for k in range(depth):
        child_base = level_offset(k + 1) - 1
        for pos in range(3**k):
            digits = tuple((perm[child_base + 3 * pos + s] - child_base) % 3 for s in range(3))
            local.append(S3_INDEX[digits])
    return TreePortrait(depth, tuple(local))


def _mul(a: Perm, b: Perm) -> Perm:
    """a o b."""
    return tuple(a[x] for x in b)


def _inv(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


class PermGroup:
    """Subgroup of Aut(T_{3,depth}) with a base and strong generating set."""

    def __init__(self, depth: int, generators: Sequence[TreePortrait], base_prefix: Sequence[int] = ()):
        if not 1 <= depth:
            raise ValueError("depth must be >= 1")
        if any(g.depth != depth for g in generators):
            raise ValueError("generator depth mismatch")
        self.depth = depth
        self.degree = degree(depth)
        self.generators = list(generators)
        self._identity = tuple(range(self.degree))
        self._build([to_perm(g) for g in generators], list(base_prefix))
        self._rebased: dict[tuple[int, ...], PermGroup] = {}

    # -- Schreier-Sims ------------------------------------------------------

    def _orbit(self, level: int) -> dict[int, Perm]:
        """Transversal {image: u} with u(base[level]) = image."""
        b = self.base[level]
        trans = {b: self._identity}
        queue = [b]
        for x in queue:
            u = trans[x]
            for s in self.strong[level]:
                y = s[x]
                if y not in trans:
                    trans[y] = _mul(s, u)
                    queue.append(y)
        return trans

    def _strip(self, g: Perm, start: int) -> tuple[Perm, int]:
        for level in range(start, len(self.base)):
            x = g[self.base[level]]
            u = self.transversals[level].get(x)
            if u is None:
                return g, level
            g = _mul(_inv(u), g)
        return g, len(self.base)

    def _first_moved(self, g: Perm) -> int:
        for i, x in enumerate(g):
            if x != i:
                return i
        raise ValueError("identity moves no point")

    def _build(self, gens: list[Perm], prefix: list[int]) -> None:
        ident = self._identity
        gens = [g for g in dict.fromkeys(gens) if g != ident]
        base = list(dict.fromkeys(prefix))
        for g in gens:
            if all(g[b] == b for b in base):
                base.append(self._first_moved(g))
        self.base = base
        self.strong = [[g for g in gens if all(g[b] == b for b in base[:i])] for i in range(len(base))]
        self.transversals: list[dict[int, Perm]] = [{b: ident} for b in base]

        i = len(base) - 1
        while i >= 0:
            self.transversals[i] = self._orbit(i)
            restart = None
            for beta, u in list(self.transversals[i].items()):
                for s in self.strong[i]:
                    image = s[beta]
                    schreier = _mul(_inv(self.transversals[i][image]), _mul(s, u))
                    if schreier == ident:
                        continue
                    h, j = self._strip(schreier, i + 1)
                    if h == ident:
                        continue
                    if j == len(self.base):
                        self.base.append(self._first_moved(h))
                        self.strong.append([])
                        self.transversals.append({self.base[-1]: ident})
                    for level in range(i + 1, j + 1):
                        self.strong[level].append(h)
                    restart = j
                    break
                if restart is not None:
                    break
            if restart is None:
                i -= 1
            else:
                for level in range(i + 1, restart + 1):
                    self.transversals[level] = self._orbit(level)
                i = restart

    # -- queries ------------------------------------------------------------

    @property
    def order(self) -> int:
        return math.prod(len(t) for t in self.transversals)

    def contains_perm(self, g: Perm) -> bool:
        h, j = self._strip(g, 0)
        return j == len(self.base) and h == self._identity

    def __contains__(self, sigma: TreePortrait) -> bool:
        if sigma.depth != self.depth:
            raise ValueError("depth mismatch")
        return self.contains_perm(to_perm(sigma))

    def strong_generators(self) -> list[TreePortrait]:
        gens = self.strong[0] if self.strong else []
        return [from_perm(g, self.depth) for g in gens]

    def rebase(self, prefix_words: Sequence[str]) -> "PermGroup":
        """Same group, chain built with the given nodes first in the base."""
        prefix = tuple(point(w) for w in prefix_words)
        if prefix not in self._rebased:
            gens = self.strong_generators() or [TreePortrait.identity(self.depth)]
            self._rebased[prefix] = PermGroup(self.depth, gens, prefix)
        return self._rebased[prefix]

    def pointwise_stabilizer(self, words: Sequence[str]) -> "PermGroup":
        """Subgroup fixing every listed node."""
        words = list(dict.fromkeys(words))
        chain = self.rebase(words)
        k = len(words)
        gens = chain.strong[k] if k < len(chain.strong) else []
        return PermGroup(self.depth, [from_perm(g, self.depth) for g in gens])

    def element_with_images(self, prescribed: Sequence[tuple[str, str]]) -> Optional[TreePortrait]:
        """Some element mapping each listed node to its listed image, or None."""
        prescribed = list(dict.fromkeys(prescribed))
        sources = [s for s, _ in prescribed]
        if len(set(sources)) != len(sources):
            return None
        chain = self.rebase(sources)
        x = self._identity
        for level, (src, dst) in enumerate(prescribed):
            if len(src) != len(dst):
                return None
            want = _inv(x)[point(dst)]
            u = chain.transversals[level].get(want)
            if u is None:
                return None
            x = _mul(x, u)
        return from_perm(x, self.depth)

    def random_element(self, rng: random.Random) -> TreePortrait:
        g = self._identity
        for trans in self.transversals:
            g = _mul(g, rng.choice(list(trans.values())))
        return from_perm(g, self.depth)

    def elements(self) -> Iterator[TreePortrait]:
        """Every element; only sensible for small groups."""

        def walk(level: int, acc: Perm):
            if level == len(self.transversals):
                yield from_perm(acc, self.depth)
                return
            for u in self.transversals[level].values():
                yield from walk(level + 1, _mul(acc, u))

        yield from walk(0, self._identity)

    def restriction(self, depth: int) -> "PermGroup":
        gens = [g.restrict(depth) for g in self.generators] or [TreePortrait.identity(depth)]
        return PermGroup(depth, gens)

    def to_json_obj(self, ell: Optional[int] = None) -> dict:
        return {
            "ell": ell,
            "depth": self.depth,
            "generators": [g.to_json_obj() for g in self.generators],
        }


def generate(gens: Sequence[TreePortrait]) -> PermGroup:
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    depths = {g.depth for g in gens}
    if len(depths) != 1:
        raise ValueError("generators have different depths")
    return PermGroup(gens[0].depth, gens)


def load_group(text: str) -> tuple[PermGroup, Optional[int]]:
    obj = json.loads(text)
    depth = int(obj["depth"])
    gens = [TreePortrait.from_json_obj(g, depth) for g in obj["generators"]]
    return PermGroup(depth, gens or [TreePortrait.identity(depth)]), obj.get("ell")


# -- the Q groups -------------------------------------------------------------

def aut_order(depth: int) -> int:
    return math.prod(6 ** (3**k) for k in range(depth))


def q_order(ell: int, depth: int, tilde: bool = False) -> int:
    """Closed-form order of Q_{ell,depth} (or the tilde group)."""
    if depth < ell:
        return aut_order(depth)
    order = aut_order(depth) // 2 ** ((3 ** (depth - ell + 1) - 1) // 2)
    return 2 * order if tilde else order


def wreath_generators(depth: int) -> list[TreePortrait]:
    """A 3-cycle and a transposition at every internal node."""
    gens = []
    for k in range(depth):
        for w in level_words(k):
            gens.append(TreePortrait.from_locals(depth, {w: THREE_CYCLE}))
            gens.append(TreePortrait.from_locals(depth, {w: TRANSPOSITION_01}))
    return gens


def kernel_generators(ell: int, depth: int) -> list[TreePortrait]:
    """Generators of the Q-elements that fix every node below the top level."""
    top = depth - 1
    gens = [TreePortrait.from_locals(depth, {w: THREE_CYCLE}) for w in level_words(top)]
    if depth < ell:
        gens += [TreePortrait.from_locals(depth, {w: TRANSPOSITION_01}) for w in level_words(top)]
        return gens
    span = 3 ** (ell - 1)  # top-level nodes above one constrained node
    words = level_words(top)
    for start in range(0, len(words), span):
        block = words[start : start + span]
        for u, v in zip(block, block[1:]):
            gens.append(TreePortrait.from_locals(depth, {u: TRANSPOSITION_01, v: TRANSPOSITION_01}))
    return gens


def lift_into_q(sigma: TreePortrait, ell: int, depth: int) -> TreePortrait:
    """Extend a Q_{ell,depth-1} element to Q_{ell,depth} by fixing the new top-level signs."""
    g = sigma.extend(depth)
    if depth < ell:
        return g
    fixes = {}
    for x in level_words(depth - ell):
        if level_sign_product(g, x, ell) == -1:
            fixes[x + "0" * (ell - 1)] = TRANSPOSITION_01
    if not fixes:
        return g
    return TreePortrait.from_locals(depth, fixes) * g


def q_generators(ell: int, depth: int) -> list[TreePortrait]:
    if depth == 1:
        return [TreePortrait.from_locals(1, {"": THREE_CYCLE}), TreePortrait.from_locals(1, {"": TRANSPOSITION_01})]
    lifted = [lift_into_q(g, ell, depth) for g in q_generators(ell, depth - 1)]
    return lifted + kernel_generators(ell, depth)


def q_group(ell: int, depth: int, tilde: bool = False) -> PermGroup:
    if ell < 2:
        raise ValueError("ell must be >= 2")
    if not 1 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must be between 1 and {MAX_DEPTH}; deeper groups are out of scope")
    gens = q_generators(ell, depth)
    if tilde and depth >= ell:
        gens.append(full_swap(depth))
    return PermGroup(depth, gens)


# -- transitivity ---------------------------------------------------------------

def _level_action(group: PermGroup, level: int) -> list[list[int]]:
    base = level_offset(level) - 1
    size = 3**level
    out = []
    for g in group.generators:
        p = to_perm(g)
        out.append([p[base + i] - base for i in range(size)])
    return out


def is_arboreally_doubly_transitive(group: PermGroup, level: int) -> bool:
    """Every same-distance pair of level nodes can be carried to every other.

    Distance 0 (plain transitivity on the level) is included, as the
    definition quantifies over all pairs.
    """
    if not 1 <= level <= group.depth:
        raise ValueError("level outside the tree")
    gens = _level_action(group, level)
    words = level_words(level)
    for j in range(0, level + 1):
        a = 0
        b = 0 if j == 0 else 3 ** (j - 1)  # change the digit j-1 places from the end
        seen = {(a, b)}
        queue = [(a, b)]
        for x, y in queue:
            for g in gens:
                pair = (g[x], g[y])
                if pair not in seen:
                    seen.add(pair)
                    queue.append(pair)
        expected = 3**level if j == 0 else 3**level * 2 * 3 ** (j - 1)
        assert tree_distance(words[a], words[b]) == j
        if len(seen) != expected:
            return False
    return True


# -- generation criterion ---------------------------------------------------------

@dataclass
class GenerationReport:
    ell: int
    depth: int
    order: int
    target_order: int
    checks: dict[str, Optional[bool]] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)

    @property
    def hypotheses_hold(self) -> bool:
        keys = ("subgroup_of_q", "restriction_full", "stabilizer_full", "kernel_escapes_h")
        return all(self.checks.get(k) is not False for k in keys)

    @property
    def conclusion_holds(self) -> bool:
        return bool(self.checks.get("equals_q"))

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if v is False]

    def to_json_obj(self) -> dict:
        return {
            "ell": self.ell,
            "depth": self.depth,
            "order": str(self.order),
            "target_order": str(self.target_order),
            "checks": self.checks,
            "details": self.details,
            "hypotheses_hold": self.hypotheses_hold,
            "conclusion_holds": self.conclusion_holds,
        }


def top_kernel(group: PermGroup) -> PermGroup:
    """Elements fixing every node at levels 1..depth-1."""
    words = [w for k in range(1, group.depth) for w in level_words(k)]
    if not words:
        return group
    return group.pointwise_stabilizer(words)


def verify_generation(group: PermGroup, ell: int) -> GenerationReport:
    """Check the three hypotheses of the generation criterion, then whether G = Q_{ell,n}."""
    n = group.depth
    if not 2 <= ell <= n <= MAX_DEPTH:
        raise ValueError(f"need 2 <= ell <= depth <= {MAX_DEPTH}")
    report = GenerationReport(ell, n, group.order, q_order(ell, n))
    inside = [q_membership(g, ell) is Membership.IN_Q for g in group.generators]
    report.checks["subgroup_of_q"] = all(inside)

    lower = q_order(ell, n - 1)
    restricted = group.restriction(n - 1)
    report.checks["restriction_full"] = restricted.order == lower
    report.details["restriction_full"] = f"restriction order {restricted.order}, expected {lower}"

    stab = group.pointwise_stabilizer(["0"])
    sub = [g.subtree("0") for g in stab.generators] or [TreePortrait.identity(n - 1)]
    sub_order = PermGroup(n - 1, sub).order
    report.checks["stabilizer_full"] = sub_order == lower
    report.details["stabilizer_full"] = f"stabilizer of node 0 on its subtree has order {sub_order}, expected {lower}"

    if n == ell:
        kernel = top_kernel(group)
        escaped = []
        for eps in H_VARIANTS:
            escapes = any(not h_membership(g, ell, eps) for g in kernel.generators)
            escaped.append(escapes)
            report.details[f"kernel_escapes_h{eps}"] = str(escapes)
        report.checks["kernel_escapes_h"] = all(escaped)
    else:
        report.checks["kernel_escapes_h"] = None
        report.details["kernel_escapes_h"] = "only required when depth equals ell"

    report.checks["equals_q"] = report.checks["subgroup_of_q"] and group.order == report.target_order
    return report


def h_generators(ell: int) -> list[TreePortrait]:
    """Generators of H inside Q_{ell,ell}.

    Lifts of the wreath generators one level down, with top-level
    transpositions added so the three signs above level 1 agree and their
    product is +1, plus the top-level kernel elements that keep all three
    signs at +1.
    """
    gens = []
    for g in wreath_generators(ell - 1):
        g = g.extend(ell)
        signs = [sgn(g, str(i), ell - 1) for i in range(3)]
        s = signs[0] * signs[1] * signs[2]
        fixes = {str(i) + "0" * (ell - 2): TRANSPOSITION_01 for i in range(3) if signs[i] != s}
        gens.append(TreePortrait.from_locals(ell, fixes) * g if fixes else g)
    top = level_words(ell - 1)
    gens += [TreePortrait.from_locals(ell, {w: THREE_CYCLE}) for w in top]
    for i in "012":
        block = [w for w in top if w.startswith(i)]
        for u, v in zip(block, block[1:]):
            gens.append(TreePortrait.from_locals(ell, {u: TRANSPOSITION_01, v: TRANSPOSITION_01}))
    return gens


def h_subgroup(ell: int, eps: Sequence[int] = (1, 1, 1)) -> PermGroup:
    """The H variant labelled by a parity vector, as a subgroup of Q_{ell,ell}."""
    if not 2 <= ell <= MAX_DEPTH:
        raise ValueError(f"ell must be between 2 and {MAX_DEPTH}")
    g = h_label_change(ell, _canonical_eps(eps))
    gens = [x.conjugate(g) for x in h_generators(ell)]
    return PermGroup(ell, gens)


# -- witness constructions --------------------------------------------------------

class WitnessError(RuntimeError):
    """A constructed element failed its stated support check."""

    def __init__(self, step: str, message: str):
        self.step = step
        super().__init__(f"{step}: {message}")


def _fixes_below_top(sigma: TreePortrait) -> bool:
    return all(not sigma.local[i] for i in range(level_offset(sigma.depth - 1)))


def top_support(sigma: TreePortrait) -> dict[str, tuple[int, int, int]]:
    """Non-identity locals at the top internal level, assuming everything below is fixed."""
    top = sigma.depth - 1
    return {w: p for w, p in sigma.support().items() if len(w) == top}


def is_double_transposition(sigma: TreePortrait, a: str, b: str) -> bool:
    """Identity except one transposition above a and one above b."""
    if not _fixes_below_top(sigma):
        return False
    supp = top_support(sigma)
    return set(supp) == {a, b} and all(S3_SIGN[S3_INDEX[p]] == -1 for p in supp.values())


def is_top_three_cycle(sigma: TreePortrait, a: str) -> bool:
    if not _fixes_below_top(sigma):
        return False
    supp = top_support(sigma)
    return set(supp) == {a} and S3_SIGN[S3_INDEX[supp[a]]] == 1


def _commutator(x: TreePortrait, y: TreePortrait) -> TreePortrait:
    return x * y * x.inverse() * y.inverse()


def _images_of(target: TreePortrait, words: Iterable[str]) -> list[tuple[str, str]]:
    return [(w, target(w)) for w in words]


@dataclass
class WitnessSet:
    ell: int
    depth: int
    m: int
    z0: str
    z1: str
    theta: TreePortrait
    tau: Optional[TreePortrait] = None
    sigma: Optional[TreePortrait] = None
    lam: Optional[TreePortrait] = None
    mu: Optional[TreePortrait] = None
    rho_bottom: Optional[TreePortrait] = None
    rho_samples: dict[tuple[str, str], TreePortrait] = field(default_factory=dict)
    mu_samples: dict[str, TreePortrait] = field(default_factory=dict)


class HypothesisFailure(ValueError):
    def __init__(self, report: GenerationReport):
        self.report = report
        super().__init__("generation hypotheses fail: " + ", ".join(report.failed()))


def _theta_from_commutators(group: PermGroup, ell: int) -> tuple[int, str, str, dict]:
    n = group.depth
    m = ell if n >= ell + 1 else ell - 1
    y = "0"
    c = "0" * (n - m)
    top_words = level_words(n - 1)

    shape = TreePortrait.from_locals(n - 1, {c: THREE_CYCLE}).extend(n)
    tau = group.element_with_images(_images_of(shape, top_words))
    if tau is None:
        raise WitnessError("tau", "no element restricts to the 3-cycle above " + repr(c))
    z0 = c + "0" * (m - 1)  # above c0 = c + "0", at level n - 1
    z1, z2 = tau(z0), tau(tau(z0))

    pattern = TreePortrait.from_locals(n, {z0: TRANSPOSITION_01, z2: TRANSPOSITION_01})
    above_y = [w for w in level_words(n) if w.startswith(y)]
    sigma = group.element_with_images(_images_of(pattern, above_y))
    if sigma is None:
        raise WitnessError("sigma", "no element with the two prescribed transpositions")

    lam = _commutator(sigma, tau)
    if not _fixes_below_top(lam):
        raise WitnessError("lambda", "commutator moves a node below the top level")
    signs = {z: sgn(lam, z, 1) for z in top_words if z.startswith(y)}
    want = {z: (-1 if z in (z1, z2) else 1) for z in signs}
    if signs != want:
        raise WitnessError("lambda", f"sign pattern {signs} differs from the expected one")

    mu = _commutator(lam, tau)
    theta = mu**3
    if not is_double_transposition(theta, z0, z1):
        raise WitnessError("theta", f"support {theta.support()} is not two transpositions above {z0}, {z1}")
    return m, z0, z1, {"tau": tau, "sigma": sigma, "lam": lam, "mu": mu, "theta": theta}


def _theta_from_bottom(group: PermGroup, ell: int) -> tuple[str, str, TreePortrait, TreePortrait]:
    n = group.depth
    kernel = top_kernel(group)
    rho = None
    for g in kernel.generators:
        if not h_membership(g, ell, (1, 1, 1)):
            rho = g
            break
    if rho is None:
        raise WitnessError("rho", "bottom-fixing elements all lie in H")
    signs = [sgn(rho, str(i), ell - 1) for i in range(3)]
    neg = [str(i) for i, s in enumerate(signs) if s == -1]
    assert len(neg) == 2, signs
    a, b = (x + "0" * (ell - 2) for x in neg)
    if n == 2:
        theta = rho**3
    else:
        theta = TreePortrait.from_locals(n, {a: TRANSPOSITION_01, b: TRANSPOSITION_01})
        correction = rho.inverse() * theta
        if correction not in group:
            raise WitnessError("theta", "even correction is not in the group")
    if not is_double_transposition(theta, a, b):
        raise WitnessError("theta", f"support {theta.support()} is not two transpositions")
    return a, b, theta, rho


def _rho_ab(group: PermGroup, m: int, z0: str, z1: str, theta: TreePortrait, a: str, b: str) -> TreePortrait:
    n = group.depth
    d = tree_distance(a, b)
    if not 1 <= d <= m - 1:
        raise ValueError("pair distance out of range")
    w = a[: n - m]
    used = {a[n - m], b[n - m]}
    k = next(ch for ch in "012" if ch not in used)
    c = w + k + "0" * (m - 2)
    conj = []
    for target in (a, b):
        t = group.element_with_images([(z0, target), (z1, c)])
        if t is None:
            raise WitnessError("rho_ab", f"no element maps ({z0},{z1}) to ({target},{c})")
        conj.append(theta.conjugate(t))
    rho = (conj[0] * conj[1]) ** 3
    if not is_double_transposition(rho, a, b):
        raise WitnessError("rho_ab", f"support {rho.support()} is not two transpositions above {a}, {b}")
    return rho


def _moved_children(sigma: TreePortrait, a: str) -> set[int]:
    return {s for s, t in enumerate(sigma.perm_at(a)) if s != t}


def _mu_a(group: PermGroup, m: int, z0: str, z1: str, theta: TreePortrait, a: str) -> TreePortrait:
    siblings = [a[:-1] + ch for ch in "012" if ch != a[-1]]
    b, c = siblings
    rho_b = _rho_ab(group, m, z0, z1, theta, a, b)
    rho_c = _rho_ab(group, m, z0, z1, theta, a, c)
    pair_b, pair_c = _moved_children(rho_b, a), _moved_children(rho_c, a)
    options: list[Optional[TreePortrait]] = []
    if pair_b == pair_c:
        third = ({0, 1, 2} - pair_b).pop()
        target = min(pair_b)
        move = (a + str(third), a + str(target))
        options.append(group.element_with_images([move, (b, b), (c, c)]))
        options.append(group.element_with_images([move]))
    else:
        options.append(TreePortrait.identity(group.depth))
    for lam in options:
        if lam is None:
            continue
        mu = (rho_b * rho_c.conjugate(lam)) ** 2
        if is_top_three_cycle(mu, a):
            return mu
    raise WitnessError("mu_a", f"could not build a lone 3-cycle above {a}")


def construct_witnesses(group: PermGroup, ell: int, samples: int = 3) -> WitnessSet:
    """Build the explicit elements used in the generation argument, checking each one."""
    report = verify_generation(group, ell)
    if not report.hypotheses_hold:
        raise HypothesisFailure(report)
    n = group.depth
    if n >= 3:
        m, z0, z1, parts = _theta_from_commutators(group, ell)
        ws = WitnessSet(ell, n, m, z0, z1, parts["theta"], parts["tau"], parts["sigma"], parts["lam"], parts["mu"])
    else:
        z0, z1, theta, rho = _theta_from_bottom(group, ell)
        ws = WitnessSet(ell, n, ell, z0, z1, theta, rho_bottom=rho)
    if n == ell and n >= 3:
        # the top-level kernel also needs the level-ell double transpositions
        a, b, theta_bottom, rho = _theta_from_bottom(group, ell)
        ws.rho_bottom = rho

    top = level_words(n - 1)
    if ws.m >= 2:
        for d in range(1, ws.m):
            pairs = [(top[0], t) for t in top if tree_distance(top[0], t) == d]
            for a, b in pairs[:samples]:
                ws.rho_samples[(a, b)] = _rho_ab(group, ws.m, ws.z0, ws.z1, ws.theta, a, b)
        for a in top[:samples]:
            ws.mu_samples[a] = _mu_a(group, ws.m, ws.z0, ws.z1, ws.theta, a)
    return ws


# -- signed subgroups for relabeling experiments ----------------------------------

def random_signed_subgroup(ell: int, depth: int, rng: random.Random, limit: int = 3000):
    """A random small subgroup of Q-tilde with chi from the root sign product,
    then conjugated by a random automorphism.

    Returns (elements, scramble).
    """
    from .tree import signed_closure

    qt = q_group(ell, depth, tilde=True)
    while True:
        gens = [qt.random_element(rng) for _ in range(rng.choice((1, 2)))]
        signed = [SignedAut(g, psi(g, ell)) for g in gens]
        try:
            elements = signed_closure(signed, limit=limit)
        except OverflowError:
            continue
        scramble = TreePortrait.random(depth, rng)
        return [s.conjugate(scramble) for s in elements], scramble

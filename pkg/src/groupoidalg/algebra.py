"""Convolution algebras: fiber algebras, the dual action, twisted
convolution on the crossed product, groupoid convolution, and the
isomorphism between the two products.

All integrals are weighted finite sums over a Haar weight system
(counting measure by default).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .groupoid import FiniteGroupoid, SubgroupoidSelection
from .semidirect import SemidirectGroupoid, alpha


@dataclass(eq=False)
class HaarWeights:
    """Per-arrow positive weights; restriction to each isotropy fiber must
    be constant (right invariance) and stable under conjugation."""

    groupoid: FiniteGroupoid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        g = self.groupoid
        if self.values.shape != (g.n_arrows,):
            raise PreconditionError("weight vector length does not match arrow count")
        if not np.all(self.values > 0):
            raise PreconditionError("Haar weights must be strictly positive")
        for x in g.base():
            fiber = g.isotropy_fiber(x)
            if fiber and not np.allclose(self.values[fiber], self.values[fiber[0]]):
                raise PreconditionError(
                    f"weights are not constant on the isotropy fiber at {g.base_label(x)}"
                )
        for gamma in g.arrows():
            x = g.src[gamma]
            for a in g.isotropy_fiber(x):
                if self.values[alpha(g, gamma, a)] != self.values[a]:
                    raise PreconditionError(
                        "weights are not invariant under the conjugation action"
                    )

    @classmethod
    def counting(cls, g: FiniteGroupoid) -> "HaarWeights":
        w = cls.__new__(cls)
        w.groupoid = g
        w.values = np.ones(g.n_arrows)
        return w

    def __getitem__(self, a: int) -> float:
        return self.values[a]


@dataclass(eq=False)
class GroupoidFunction:
    """Complex-valued function on the arrows of a finite groupoid."""

    groupoid: FiniteGroupoid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.groupoid.n_arrows,):
            raise PreconditionError("value vector length does not match arrow count")
        if not np.all(np.isfinite(self.values)):
            raise PreconditionError("function values must be finite")

    @classmethod
    def zero(cls, g: FiniteGroupoid) -> "GroupoidFunction":
        return cls(g, np.zeros(g.n_arrows, dtype=complex))

    @classmethod
    def delta(cls, g: FiniteGroupoid, arrow: int, value: complex = 1.0) -> "GroupoidFunction":
        v = np.zeros(g.n_arrows, dtype=complex)
        v[arrow] = value
        return cls(g, v)

    @classmethod
    def random(cls, g: FiniteGroupoid, rng: np.random.Generator, support=None):
        """Values uniform in the complex unit square, optionally restricted."""
        v = rng.random(g.n_arrows) + 1j * rng.random(g.n_arrows)
        if support is not None:
            mask = np.zeros(g.n_arrows, dtype=bool)
            mask[list(support)] = True
            v = np.where(mask, v, 0)
        return cls(g, v)

    def supported_on(self, arrows) -> bool:
        mask = np.ones(self.groupoid.n_arrows, dtype=bool)
        mask[list(arrows)] = False
        return bool(np.all(self.values[mask] == 0))

    def restrict(self, arrows) -> "GroupoidFunction":
        mask = np.zeros(self.groupoid.n_arrows, dtype=bool)
        mask[list(arrows)] = True
        return GroupoidFunction(self.groupoid, np.where(mask, self.values, 0))


def _require_fiber_support(a: GroupoidFunction, x: int):
    fiber = a.groupoid.isotropy_fiber(x)
    if not a.supported_on(fiber):
        raise PreconditionError(
            f"function is not supported on the isotropy fiber at "
            f"{a.groupoid.base_label(x)}"
        )
    return fiber


def fiber_convolve(
    a1: GroupoidFunction, a2: GroupoidFunction, x: int, w: HaarWeights
) -> GroupoidFunction:
    """Convolution in the fiber algebra at x:
    (a1 • a2)(g0) = sum over g0' of w(g0') a1(g0') a2(g0'⁻¹ ∘ g0)."""
    g = a1.groupoid
    if a2.groupoid is not g:
        raise PreconditionError("operands live on different groupoids")
    fiber = _require_fiber_support(a1, x)
    _require_fiber_support(a2, x)
    out = np.zeros(g.n_arrows, dtype=complex)
    for g0 in fiber:
        acc = 0j
        for gp in fiber:
            acc += w[gp] * a1.values[gp] * a2.values[g.compose_table[(g.inv[gp], g0)]]
        out[g0] = acc
    return GroupoidFunction(g, out)


def beta(parent: FiniteGroupoid, g1: int, a: GroupoidFunction) -> GroupoidFunction:
    """Dual action: pull back a fiber function along the conjugation action.
    Maps functions on the fiber at r(g1) to functions on the fiber at d(g1)."""
    _require_fiber_support(a, parent.tgt[g1])
    out = np.zeros(parent.n_arrows, dtype=complex)
    for g0 in parent.isotropy_fiber(parent.src[g1]):
        out[g0] = a.values[alpha(parent, g1, g0)]
    return GroupoidFunction(parent, out)


@dataclass(eq=False)
class BundleFunction:
    """Element of the crossed product: for each arrow of the transitive
    selection, a fiber-algebra element at its target."""

    parent: FiniteGroupoid
    g1: SubgroupoidSelection
    fibers: dict[int, GroupoidFunction]

    def __post_init__(self):
        if set(self.fibers) != set(self.g1.arrows):
            raise PreconditionError("fiber family must cover exactly the g1 arrows")
        for a1, f in self.fibers.items():
            if f.groupoid is not self.parent:
                raise PreconditionError("fiber values must live on the parent groupoid")
            _require_fiber_support(f, self.parent.tgt[a1])

    @classmethod
    def zero(cls, parent, g1):
        return cls(
            parent, g1, {a1: GroupoidFunction.zero(parent) for a1 in g1.arrows}
        )

    @classmethod
    def random(cls, parent, g1, rng: np.random.Generator):
        fibers = {}
        for a1 in sorted(g1.arrows):
            fiber = parent.isotropy_fiber(parent.tgt[a1])
            fibers[a1] = GroupoidFunction.random(parent, rng, support=fiber)
        return cls(parent, g1, fibers)


def twisted_convolve(F1: BundleFunction, F2: BundleFunction, w: HaarWeights) -> BundleFunction:
    """Crossed-product multiplication:
    (F1 ⊛ F2)(g1) = sum over g1' with r(g1') = r(g1) of
    w(g1') · F1(g1') • beta_{g1'⁻¹}(F2(g1'⁻¹ ∘ g1))."""
    if F1.parent is not F2.parent or F1.g1.arrows != F2.g1.arrows:
        raise PreconditionError("operands live on different crossed products")
    p = F1.parent
    out = {}
    for a1 in F1.g1.arrows:
        x = p.tgt[a1]
        acc = GroupoidFunction.zero(p)
        for b1 in F1.g1.arrows:
            if p.tgt[b1] != x:
                continue
            c1 = p.compose_table[(p.inv[b1], a1)]
            pulled = beta(p, p.inv[b1], F2.fibers[c1])
            term = fiber_convolve(F1.fibers[b1], pulled, x, w)
            acc = GroupoidFunction(p, acc.values + w[b1] * term.values)
        out[a1] = acc
    return BundleFunction(p, F1.g1, out)


def groupoid_convolve(
    f1: GroupoidFunction, f2: GroupoidFunction, w: HaarWeights
) -> GroupoidFunction:
    """Convolution in the groupoid algebra:
    (f1 * f2)(g) = sum over eta with r(eta) = r(g) of w(eta) f1(eta) f2(eta⁻¹ ∘ g)."""
    g = f1.groupoid
    if f2.groupoid is not g or w.groupoid is not g:
        raise PreconditionError("operands live on different groupoids")
    into = [g.arrows_into(x) for x in g.base()]
    out = np.zeros(g.n_arrows, dtype=complex)
    for gamma in g.arrows():
        acc = 0j
        for eta in into[g.tgt[gamma]]:
            acc += w[eta] * f1.values[eta] * f2.values[g.compose_table[(g.inv[eta], gamma)]]
        out[gamma] = acc
    return GroupoidFunction(g, out)


def carrier_weights(sd: SemidirectGroupoid, w_parent: HaarWeights) -> HaarWeights:
    """Product weights on the semidirect carrier: w(g0, g1) = w(g0)·w(g1)."""
    vals = np.array([w_parent[a0] * w_parent[a1] for (a0, a1) in sd.pair_of])
    w = HaarWeights.__new__(HaarWeights)
    w.groupoid = sd
    w.values = vals
    return w


def semidirect_convolve_pairform(
    f1: GroupoidFunction,
    f2: GroupoidFunction,
    sd: SemidirectGroupoid,
    w_parent: HaarWeights,
) -> GroupoidFunction:
    """The iterated double sum over the transitive selection and the isotropy
    fiber; agrees with groupoid_convolve under the product carrier weights."""
    if f1.groupoid is not sd or f2.groupoid is not sd:
        raise PreconditionError("functions must live on the semidirect carrier")
    p = sd.parent
    out = np.zeros(sd.n_arrows, dtype=complex)
    for i, (a0, a1) in enumerate(sd.pair_of):
        x = p.tgt[a1]
        acc = 0j
        for b1 in sd.g1.arrows:
            if p.tgt[b1] != x:
                continue
            for b0 in p.isotropy_fiber(x):
                j = sd.pair_index[(b0, b1)]
                k = sd.compose_table[(sd.inv[j], i)]
                acc += w_parent[b0] * w_parent[b1] * f1.values[j] * f2.values[k]
        out[i] = acc
    return GroupoidFunction(sd, out)


def K_map(F: BundleFunction, sd: SemidirectGroupoid) -> GroupoidFunction:
    """(KF)(g0, g1) = (F(g1))(g0); linear, multiplicative, bijective."""
    if F.parent is not sd.parent or F.g1.arrows != sd.g1.arrows:
        raise PreconditionError("bundle function does not match the carrier")
    vals = np.array([F.fibers[a1].values[a0] for (a0, a1) in sd.pair_of])
    return GroupoidFunction(sd, vals)


def K_inverse(f: GroupoidFunction, sd: SemidirectGroupoid) -> BundleFunction:
    if f.groupoid is not sd:
        raise PreconditionError("function does not live on the semidirect carrier")
    p = sd.parent
    fibers = {}
    for a1 in sd.g1.arrows:
        v = np.zeros(p.n_arrows, dtype=complex)
        for a0 in p.isotropy_fiber(p.tgt[a1]):
            v[a0] = f.values[sd.pair_index[(a0, a1)]]
        fibers[a1] = GroupoidFunction(p, v)
    return BundleFunction(p, sd.g1, fibers)


@dataclass
class Theorem1Report:
    trials: int
    seed: int
    tol: float
    max_deviation: float
    pair_identity_ok: bool
    passed: bool
    witness: str | None = None

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "max_deviation": self.max_deviation,
            "pair_identity_ok": self.pair_identity_ok,
            "passed": self.passed,
            "witness": self.witness,
        }


def verify_theorem1(
    sd: SemidirectGroupoid,
    trials: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
    w_parent: HaarWeights | None = None,
) -> Theorem1Report:
    """Randomized check that K intertwines the twisted and groupoid
    convolutions, plus the exact pair-inverse identity used alongside it."""
    p = sd.parent
    if w_parent is None:
        w_parent = HaarWeights.counting(p)
    w_carrier = carrier_weights(sd, w_parent)

    # (b0,b1)⁻¹ ∘ (a0,a1) = (alpha_{b1⁻¹}(b0⁻¹ ∘ a0), b1⁻¹ ∘ a1)
    pair_ok = True
    witness = None
    for i, (a0, a1) in enumerate(sd.pair_of):
        for j, (b0, b1) in enumerate(sd.pair_of):
            if sd.tgt[i] != sd.tgt[j]:
                continue
            via_table = sd.compose_table[(sd.inv[j], i)]
            expected = (
                alpha(p, p.inv[b1], p.compose_table[(p.inv[b0], a0)]),
                p.compose_table[(p.inv[b1], a1)],
            )
            if sd.pair_of[via_table] != expected:
                pair_ok = False
                witness = f"pair identity fails at ({sd.arrow_label(j)})⁻¹∘({sd.arrow_label(i)})"
                break
        if not pair_ok:
            break

    rng = np.random.default_rng(seed)
    max_dev = 0.0
    for _ in range(trials):
        F1 = BundleFunction.random(p, sd.g1, rng)
        F2 = BundleFunction.random(p, sd.g1, rng)
        lhs = K_map(twisted_convolve(F1, F2, w_parent), sd)
        rhs = groupoid_convolve(K_map(F1, sd), K_map(F2, sd), w_carrier)
        dev = float(np.max(np.abs(lhs.values - rhs.values)))
        max_dev = max(max_dev, dev)
    passed = pair_ok and max_dev <= tol
    if not passed and witness is None:
        witness = f"max deviation {max_dev:.3e} exceeds tolerance {tol:.1e}"
    return Theorem1Report(
        trials=trials,
        seed=seed,
        tol=tol,
        max_deviation=max_dev,
        pair_identity_ok=pair_ok,
        passed=passed,
        witness=witness,
    )

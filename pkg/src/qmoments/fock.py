"""Floating-point q-Fock space, truncated at a finite tensor level.

States are sparse maps from tensor words (tuples of 1-based vector labels,
the empty tuple being the vacuum) to real amplitudes.  Word letters refer to
the vectors ``f_1..f_d`` whose Gram matrix is the model covariance, so
annihilation only needs ``<f_i, f_j> = cov[i][j]``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import ModelSpec, as_query

DROP_TOL = 1e-14
PSD_TOL = 1e-10


class NotPSDError(ValueError):
    """Covariance cannot be written as a Gram matrix of real vectors."""


class TruncationOverflow(RuntimeError):
    """A creation operator would leave the truncated space."""


def pivoted_cholesky(a, tol: float = PSD_TOL) -> np.ndarray:
    """Factor a symmetric PSD matrix as ``L @ L.T`` with ``L`` of shape (d, rank)."""
    a = np.array(a, dtype=float)
    d = a.shape[0]
    if a.shape != (d, d):
        raise NotPSDError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(a)))) if d else 1.0
    if np.max(np.abs(a - a.T), initial=0.0) > tol * scale:
        raise NotPSDError("covariance is not symmetric")
    resid = a.copy()
    cols = []
    for _ in range(d):
        diag = np.diag(resid)
        p = int(np.argmax(diag))
        if diag[p] <= tol * scale:
            break
        col = resid[:, p] / np.sqrt(diag[p])
        cols.append(col)
        resid = resid - np.outer(col, col)
    if np.min(np.diag(resid), initial=0.0) < -tol * scale:
        raise NotPSDError("covariance has a negative eigenvalue")
    factor = np.column_stack(cols) if cols else np.zeros((d, 0))
    if np.max(np.abs(factor @ factor.T - a), initial=0.0) > tol * scale:
        raise NotPSDError("covariance is not positive semidefinite")
    return factor


@dataclass(frozen=True)
class FockModel:
    """q-Gaussian realization: ``x(f_i) = a+(f_i) + a-(f_i)`` with ``<f_i, f_j> = cov[i][j]``."""

    cov: np.ndarray
    q: float
    truncation: int
    vectors: np.ndarray = field(init=False, repr=False)
    gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not -1.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [-1, 1], got {self.q}")
        if self.truncation < 0:
            raise ValueError("truncation level must be nonnegative")
        cov = np.array(self.cov, dtype=float)
        vecs = pivoted_cholesky(cov)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "gram", vecs @ vecs.T)

    @property
    def d(self) -> int:
        return self.cov.shape[0]

    @classmethod
    def from_spec(cls, spec: ModelSpec, q: float, truncation: int) -> "FockModel":
        if not spec.is_scalar_gaussian:
            raise ValueError("the Fock realization covers zero-mean models without preservation terms")
        return cls(np.array([[float(x) for x in row] for row in spec.cov]), float(q), truncation)


class FockState:
    """Sparse vector in the truncated Fock space."""

    __slots__ = ("amplitudes", "truncation")

    def __init__(self, amplitudes: Mapping[tuple, float] = (), truncation: int = 0):
        self.truncation = truncation
        amps = {}
        for w, a in dict(amplitudes).items():
            w = tuple(w)
            if len(w) > truncation:
                raise TruncationOverflow(f"word {w} above truncation level {truncation}")
            if abs(a) > DROP_TOL:
                amps[w] = amps.get(w, 0.0) + float(a)
        self.amplitudes = amps

    @classmethod
    def vacuum(cls, truncation: int) -> "FockState":
        return cls({(): 1.0}, truncation)

    def __add__(self, other: "FockState") -> "FockState":
        amps = dict(self.amplitudes)
        for w, a in other.amplitudes.items():
            amps[w] = amps.get(w, 0.0) + a
        return FockState(amps, max(self.truncation, other.truncation))

    def __sub__(self, other: "FockState") -> "FockState":
        return self + other.scale(-1.0)

    def scale(self, c: float) -> "FockState":
        return FockState({w: c * a for w, a in self.amplitudes.items()}, self.truncation)

    def vacuum_amplitude(self) -> float:
        return self.amplitudes.get((), 0.0)

    def max_abs(self) -> float:
        return max((abs(a) for a in self.amplitudes.values()), default=0.0)

    def __repr__(self):
        return f"FockState({self.amplitudes!r}, truncation={self.truncation})"


def inversion_count(perm: Sequence[int]) -> int:
    """``#{(i, j): i < j, perm[i] > perm[j]}``."""
    perm = list(perm)
    return sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])


@functools.lru_cache(maxsize=None)
def _perms(n: int) -> tuple:
    return tuple((p, inversion_count(p)) for p in itertools.permutations(range(n)))


def word_inner(u: tuple, v: tuple, model: FockModel) -> float:
    """``<f_u1 x .. x f_un, f_v1 x .. x f_vm>_q``."""
    if len(u) != len(v):
        return 0.0
    g, q = model.gram, model.q
    total = 0.0
    for perm, inv in _perms(len(u)):
        w = q ** inv if inv else 1.0
        if w == 0.0:
            continue
        for j, pj in enumerate(perm):
            w *= g[u[j] - 1, v[pj] - 1]
            if w == 0.0:
                break
        total += w
    return total


def _as_state(x, model: FockModel) -> FockState:
    if isinstance(x, FockState):
        return x
    return FockState({tuple(x): 1.0}, max(model.truncation, len(x)))


def q_inner(u, v, model: FockModel) -> float:
    """q-deformed inner product of two states (or two tensor words)."""
    u, v = _as_state(u, model), _as_state(v, model)
    total = 0.0
    for wu, au in u.amplitudes.items():
        for wv, av in v.amplitudes.items():
            if len(wu) == len(wv):
                total += au * av * word_inner(wu, wv, model)
    return total


def apply_creation(model: FockModel, i: int, s: FockState) -> FockState:
    """``a+(f_i)``: prepend letter ``i``."""
    if not 1 <= i <= model.d:
        raise IndexError(f"index {i} out of range 1..{model.d}")
    top = max((len(w) for w in s.amplitudes), default=-1)
    if top >= model.truncation:
        raise TruncationOverflow(
            f"creation on level {top} exceeds truncation {model.truncation}"
        )
    return FockState({(i,) + w: a for w, a in s.amplitudes.items()}, model.truncation)


def apply_annihilation(model: FockModel, i: int, s: FockState) -> FockState:
    """``a-(f_i)``: delete the j-th letter with weight ``q**(j-1) <f_i, f_letter>``."""
    if not 1 <= i <= model.d:
        raise IndexError(f"index {i} out of range 1..{model.d}")
    g, q = model.gram[i - 1], model.q
    amps: dict = {}
    for w, a in s.amplitudes.items():
        qj = 1.0
        for j, letter in enumerate(w):
            c = g[letter - 1]
            if c != 0.0 and qj != 0.0:
                nw = w[:j] + w[j + 1:]
                amps[nw] = amps.get(nw, 0.0) + a * qj * c
            qj *= q
    return FockState(amps, model.truncation)


def apply_gaussian(model: FockModel, i: int, s: FockState) -> FockState:
    """``x(f_i) = a+(f_i) + a-(f_i)``."""
    return apply_creation(model, i, s) + apply_annihilation(model, i, s)


def numeric_moment(model: FockModel, query) -> float:
    """``<x(f_s1)..x(f_sk) phi, phi>_q`` by applying the operators right to left."""
    query = as_query(query)
    if max(query.sigma) > model.d:
        raise IndexError(f"index {max(query.sigma)} out of range 1..{model.d}")
    if model.truncation < len(query):
        raise TruncationOverflow(
            f"truncation {model.truncation} is below the word length {len(query)}"
        )
    state = FockState.vacuum(model.truncation)
    for s in reversed(query.sigma):
        state = apply_gaussian(model, s, state)
    return state.vacuum_amplitude()


def level_words(d: int, n: int):
    return list(itertools.product(range(1, d + 1), repeat=n))


def gram_matrix(model: FockModel, n: int) -> np.ndarray:
    """q-inner products of all level-n basis words."""
    words = level_words(model.d, n)
    return np.array([[word_inner(u, v, model) for v in words] for u in words])

"""Finite-alphabet distributions, kernels, joint tables and information measures.

All information quantities are in bits.  Probabilities below ``ZERO_MASS``
are treated as exact zeros inside logarithms (0 log 0 = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

ZERO_MASS = 1e-15
VALID_TOL = 1e-10
ROW_TOL = 1e-9

AxisSpec = Union[str, Sequence[str]]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Alphabet:
    """Ordered, named set of symbols; indices are stable."""

    name: str
    symbols: tuple

    def __post_init__(self):
        syms = tuple(str(s) for s in self.symbols)
        if not syms:
            raise ValueError(f"alphabet {self.name!r} is empty")
        if len(set(syms)) != len(syms):
            raise ValueError(f"alphabet {self.name!r} has repeated symbols")
        object.__setattr__(self, "symbols", syms)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol) -> int:
        return self.symbols.index(str(symbol))

    def renamed(self, name: str) -> "Alphabet":
        return Alphabet(name, self.symbols)

    @classmethod
    def of_size(cls, name: str, n: int) -> "Alphabet":
        return cls(name, tuple(str(i) for i in range(n)))


@dataclass(frozen=True)
class ProbDist:
    alphabet: Alphabet
    mass: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=float)
        if m.shape != (self.alphabet.size,):
            raise ValueError(
                f"mass has shape {m.shape}, alphabet {self.alphabet.name!r} "
                f"has {self.alphabet.size} symbols")
        if np.any(m < -ZERO_MASS) or np.any(m > 1 + ROW_TOL):
            raise ValueError("probabilities must lie in [0, 1]")
        total = m.sum()
        if abs(total - 1.0) > ROW_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "mass", _frozen(np.clip(m, 0, None) / total))

    @classmethod
    def uniform(cls, alphabet: Alphabet) -> "ProbDist":
        return cls(alphabet, np.full(alphabet.size, 1.0 / alphabet.size))

    @classmethod
    def point(cls, alphabet: Alphabet, symbol) -> "ProbDist":
        m = np.zeros(alphabet.size)
        m[alphabet.index(symbol)] = 1.0
        return cls(alphabet, m)


@dataclass(frozen=True)
class CondKernel:
    """Stochastic map from a product of input alphabets to output alphabet(s).

    ``table`` has shape ``(*input sizes, *output sizes)``; every slice over the
    output axes is a distribution.
    """

    inputs: tuple
    outputs: tuple
    table: np.ndarray

    def __post_init__(self):
        ins = tuple(self.inputs)
        outs = self.outputs
        if isinstance(outs, Alphabet):
            outs = (outs,)
        outs = tuple(outs)
        object.__setattr__(self, "inputs", ins)
        object.__setattr__(self, "outputs", outs)
        names = [a.name for a in ins + outs]
        if len(set(names)) != len(names):
            raise ValueError(f"kernel axes must be distinct, got {names}")
        t = np.asarray(self.table, dtype=float)
        shape = tuple(a.size for a in ins + outs)
        if t.shape != shape:
            raise ValueError(f"kernel table has shape {t.shape}, expected {shape}")
        if np.any(t < -ZERO_MASS):
            raise ValueError("kernel has negative entries")
        out_axes = tuple(range(len(ins), len(ins) + len(outs)))
        sums = t.sum(axis=out_axes)
        bad = np.argwhere(np.abs(sums - 1.0) > ROW_TOL)
        if bad.size:
            raise ValueError(f"kernel row {tuple(bad[0])} sums to {sums[tuple(bad[0])]!r}")
        t = np.clip(t, 0, None) / np.expand_dims(sums, out_axes)
        object.__setattr__(self, "table", _frozen(t))

    @property
    def output(self) -> Alphabet:
        if len(self.outputs) != 1:
            raise AttributeError("kernel has several output axes")
        return self.outputs[0]

    def row(self, *idx) -> np.ndarray:
        return self.table[tuple(idx)]

    @classmethod
    def deterministic(cls, inputs: Sequence[Alphabet], output: Alphabet,
                      index_table) -> "CondKernel":
        """Indicator kernel 1{out = index_table[inputs]}."""
        idx = np.asarray(index_table, dtype=int)
        shape = tuple(a.size for a in inputs)
        if idx.shape != shape:
            raise ValueError(f"map table has shape {idx.shape}, expected {shape}")
        if idx.size and (idx.min() < 0 or idx.max() >= output.size):
            raise ValueError(f"map value outside alphabet {output.name!r}")
        t = np.zeros(shape + (output.size,))
        np.put_along_axis(t, idx[..., None], 1.0, axis=-1)
        return cls(tuple(inputs), (output,), t)

    @classmethod
    def from_function(cls, inputs: Sequence[Alphabet], output: Alphabet, fn) -> "CondKernel":
        """Indicator kernel of ``fn`` applied to input symbol indices."""
        shape = tuple(a.size for a in inputs)
        idx = np.zeros(shape, dtype=int)
        for pos in np.ndindex(*shape):
            idx[pos] = fn(*pos)
        return cls.deterministic(inputs, output, idx)


@dataclass(frozen=True)
class JointTable:
    alphabets: tuple
    mass: np.ndarray

    def __post_init__(self):
        alphs = tuple(self.alphabets)
        names = [a.name for a in alphs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis names {names}")
        m = np.asarray(self.mass, dtype=float)
        if m.shape != tuple(a.size for a in alphs):
            raise ValueError(f"mass shape {m.shape} does not match axes {names}")
        if np.any(m < -ZERO_MASS):
            raise ValueError("joint table has negative mass")
        total = m.sum()
        if abs(total - 1.0) > VALID_TOL:
            raise ValueError(f"joint table sums to {total!r}")
        object.__setattr__(self, "alphabets", alphs)
        object.__setattr__(self, "mass", _frozen(np.clip(m, 0, None)))

    @property
    def axes(self) -> tuple:
        return tuple(a.name for a in self.alphabets)

    def axis(self, name: str) -> int:
        try:
            return self.axes.index(name)
        except ValueError:
            raise KeyError(f"no axis {name!r} in joint over {self.axes}") from None

    def alphabet(self, name: str) -> Alphabet:
        return self.alphabets[self.axis(name)]

    def marginal(self, keep: Iterable[str]) -> "JointTable":
        keep = list(keep)
        for k in keep:
            self.axis(k)
        if not keep:
            raise ValueError("cannot marginalize out every axis")
        drop = tuple(i for i, n in enumerate(self.axes) if n not in keep)
        m = self.mass.sum(axis=drop) if drop else self.mass
        kept = [n for n in self.axes if n in keep]
        perm = [kept.index(k) for k in keep]
        return JointTable(tuple(self.alphabet(k) for k in keep), np.transpose(m, perm))

    def entropy(self, names: Iterable[str] = ()) -> float:
        """Joint entropy H(names) in bits; empty set gives 0."""
        names = _as_list(names)
        if not names:
            return 0.0
        return _entropy_of(self.marginal(names).mass)

    def __repr__(self):
        return f"JointTable(axes={self.axes}, shape={self.mass.shape})"


def _as_list(spec) -> list:
    if spec is None:
        return []
    if isinstance(spec, str):
        return [spec]
    return list(spec)


def _entropy_of(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > ZERO_MASS]
    return float(-(p * np.log2(p)).sum())


def binary_entropy(p):
    """h2(p) in bits; accepts scalars or arrays."""
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError(f"binary entropy needs p in [0, 1], got {p!r}")
    q = 1.0 - arr
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(arr > ZERO_MASS, -arr * np.log2(np.where(arr > 0, arr, 1)), 0.0)
        b = np.where(q > ZERO_MASS, -q * np.log2(np.where(q > 0, q, 1)), 0.0)
    out = a + b
    return float(out) if out.ndim == 0 else out


def entropy(d) -> float:
    """Shannon entropy in bits of a ProbDist (or a raw probability vector)."""
    mass = d.mass if isinstance(d, ProbDist) else d
    return _entropy_of(mass)


def conditional_mutual_information(j: JointTable, x: AxisSpec, y: AxisSpec,
                                   given: AxisSpec = ()) -> float:
    """I(X;Y|Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z), clipped at zero."""
    xs, ys, zs = _as_list(x), _as_list(y), _as_list(given)
    for n in xs + ys + zs:
        j.axis(n)
    if not xs or not ys:
        raise ValueError("both sides of the mutual information need an axis")
    if set(xs) & set(ys) or set(xs) & set(zs) or set(ys) & set(zs):
        raise ValueError("axis sets must be disjoint")
    val = (j.entropy(xs + zs) + j.entropy(ys + zs)
           - j.entropy(xs + ys + zs) - j.entropy(zs))
    return max(val, 0.0)


def mutual_information(j: JointTable, x: AxisSpec, y: AxisSpec) -> float:
    return conditional_mutual_information(j, x, y, ())


def marginalize(j: JointTable, drop: AxisSpec) -> JointTable:
    drop = _as_list(drop)
    for n in drop:
        j.axis(n)
    keep = [n for n in j.axes if n not in drop]
    if not keep:
        raise ValueError("cannot drop every axis")
    return j.marginal(keep)


def _factor_parts(f):
    if isinstance(f, ProbDist):
        return (), (f.alphabet,), np.asarray(f.mass)
    if isinstance(f, CondKernel):
        return f.inputs, f.outputs, np.asarray(f.table)
    raise TypeError(f"cannot compose factor of type {type(f).__name__}")


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def compose(factors: Sequence) -> JointTable:
    """Chain-rule product of factors, each conditioned on earlier axes only.

    Factors are ProbDist or CondKernel (deterministic maps enter as indicator
    kernels via ``CondKernel.deterministic``).
    """
    if not factors:
        raise ValueError("need at least one factor")
    alphs: list = []
    mass = np.ones(())
    for f in factors:
        ins, outs, table = _factor_parts(f)
        names = [a.name for a in alphs]
        for a in ins:
            if a.name not in names:
                raise ValueError(f"factor conditions on {a.name!r} before it is defined")
            if alphs[names.index(a.name)].size != a.size:
                raise ValueError(f"axis {a.name!r} size mismatch")
        for a in outs:
            if a.name in names:
                raise ValueError(f"axis {a.name!r} defined twice")
        if len(alphs) + len(outs) > len(_LETTERS):
            raise ValueError("too many axes")
        cur = _LETTERS[:len(alphs)]
        new = _LETTERS[len(alphs):len(alphs) + len(outs)]
        fin = "".join(cur[names.index(a.name)] for a in ins) + new
        mass = np.einsum(f"{cur},{fin}->{cur}{new}", mass, table)
        alphs.extend(outs)
    return JointTable(tuple(alphs), mass)

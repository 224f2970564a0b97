"""Text format for probing models.

    # comments start with '#'
    [alphabets]            one line per alphabet: NAME = sym sym ...
    S  = 0 1               names: S Se Sd Ae Ad X Y (Sd, Ad optional, default '-')
    Se = * 0 1
    X  = 0 1
    Y  = 0 1
    Ae = 0 1

    [state]                one line: P(s) in S order

    [channel]              |Y| lines, line y lists P(y | x, s) over (x, s) row-major;
                           every column (x, s) sums to 1

    [probe]                |S|*|Ae|*|Ad| lines, row-major over (s, ae, ad); each line
                           lists P(se, sd | s, ae, ad) over (se, sd) row-major

    [cost]                 |Ae| lines of |Ad| costs

    [budget]               one number

    [input_constraint]     optional: 'cost = c(x) ...' and 'bound = b'

Numbers are plain decimals; rows whose sums miss 1 by more than 1e-9 are
rejected with their line and column.
"""

from __future__ import annotations

import numpy as np

from .model import CostTable, InputConstraint, ProbingModel
from .probability import Alphabet, CondKernel, ProbDist

SUM_TOL = 1e-9
SECTIONS = ("alphabets", "state", "channel", "probe", "cost", "budget", "input_constraint")
ALPHABET_NAMES = ("S", "Se", "Sd", "Ae", "Ad", "X", "Y")


class ModelFileError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _tokens(text: str, lineno: int):
    """(token, column) pairs of one line, comments removed."""
    body = text.split("#", 1)[0]
    out, col = [], 0
    for tok in body.split():
        col = body.index(tok, col)
        out.append((tok, col + 1))
        col += len(tok)
    return out


def _numbers(toks, lineno: int):
    vals = []
    for tok, col in toks:
        try:
            vals.append(float(tok))
        except ValueError:
            raise ModelFileError(f"expected a number, got {tok!r}", lineno, col) from None
        if not np.isfinite(vals[-1]) or vals[-1] < 0:
            raise ModelFileError(f"expected a finite nonnegative number, got {tok!r}",
                                 lineno, col)
    return vals


def _split_sections(text: str):
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ModelFileError("unterminated section header", lineno, raw.index("[") + 1)
            name = stripped[1:-1].strip().lower()
            if name not in SECTIONS:
                raise ModelFileError(f"unknown section [{name}]", lineno, raw.index("[") + 1)
            if name in sections:
                raise ModelFileError(f"section [{name}] repeated", lineno, raw.index("[") + 1)
            sections[name] = (lineno, [])
            current = name
            continue
        if current is None:
            raise ModelFileError("content before the first section", lineno, 1)
        sections[current][1].append((lineno, _tokens(raw, lineno)))
    return sections


def _matrix(lines, n_rows, n_cols, what, header_line):
    if len(lines) != n_rows:
        at = lines[n_rows][0] if len(lines) > n_rows else header_line
        raise ModelFileError(f"[{what}] needs {n_rows} lines, found {len(lines)}", at, 1)
    rows = []
    for lineno, toks in lines:
        vals = _numbers(toks, lineno)
        if len(vals) != n_cols:
            col = toks[n_cols][1] if len(toks) > n_cols else (toks[-1][1] if toks else 1)
            raise ModelFileError(f"[{what}] line needs {n_cols} entries, found {len(vals)}",
                                 lineno, col)
        rows.append(vals)
    return np.array(rows, dtype=float)


def _check_rows(mat, lines, what):
    for (lineno, toks), row in zip(lines, mat):
        if abs(row.sum() - 1.0) > SUM_TOL:
            raise ModelFileError(f"[{what}] row sums to {float(row.sum())!r}, not 1", lineno,
                                 toks[0][1])


def parse_model(text: str, name: str = "model") -> ProbingModel:
    sections = _split_sections(text)
    last = len(text.splitlines()) or 1

    def section(key):
        if key not in sections:
            raise ModelFileError(f"missing section [{key}]", last, 1)
        return sections[key]

    alph: dict = {}
    for lineno, toks in section("alphabets")[1]:
        if len(toks) < 3 or toks[1][0] != "=":
            raise ModelFileError("expected 'NAME = symbol ...'", lineno, toks[0][1] if toks else 1)
        key = toks[0][0]
        if key not in ALPHABET_NAMES:
            raise ModelFileError(f"unknown alphabet {key!r}", lineno, toks[0][1])
        if key in alph:
            raise ModelFileError(f"alphabet {key!r} repeated", lineno, toks[0][1])
        syms = [t for t, _ in toks[2:]]
        if len(set(syms)) != len(syms):
            raise ModelFileError(f"alphabet {key!r} repeats a symbol", lineno, toks[2][1])
        alph[key] = Alphabet(key, tuple(syms))
    for key in ("S", "Se", "Ae", "X", "Y"):
        if key not in alph:
            raise ModelFileError(f"alphabet {key!r} missing", section("alphabets")[0], 1)
    alph.setdefault("Sd", Alphabet("Sd", ("-",)))
    alph.setdefault("Ad", Alphabet("Ad", ("-",)))
    nS, nSe, nSd = alph["S"].size, alph["Se"].size, alph["Sd"].size
    nAe, nAd, nX, nY = alph["Ae"].size, alph["Ad"].size, alph["X"].size, alph["Y"].size

    head, lines = section("state")
    ps = _matrix(lines, 1, nS, "state", head)
    _check_rows(ps, lines, "state")

    head, lines = section("channel")
    ch = _matrix(lines, nY, nX * nS, "channel", head)
    sums = ch.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > SUM_TOL)
    if bad.size:
        lineno, toks = lines[0]
        raise ModelFileError(
            f"[channel] column (x, s) #{bad[0]} sums to {float(sums[bad[0]])!r}, not 1",
            lineno, toks[bad[0]][1])
    W = ch.T.reshape(nX, nS, nY)

    head, lines = section("probe")
    pr = _matrix(lines, nS * nAe * nAd, nSe * nSd, "probe", head)
    _check_rows(pr, lines, "probe")
    P = pr.reshape(nS, nAe, nAd, nSe, nSd)

    head, lines = section("cost")
    cost = _matrix(lines, nAe, nAd, "cost", head)

    head, lines = section("budget")
    budget = _matrix(lines, 1, 1, "budget", head)[0, 0]

    constraint = None
    if "input_constraint" in sections:
        head, lines = sections["input_constraint"]
        kv = {}
        for lineno, toks in lines:
            if len(toks) < 3 or toks[1][0] != "=" or toks[0][0] not in ("cost", "bound"):
                raise ModelFileError("expected 'cost = ...' or 'bound = ...'", lineno,
                                     toks[0][1] if toks else 1)
            kv[toks[0][0]] = (lineno, _numbers(toks[2:], lineno), toks)
        if set(kv) != {"cost", "bound"}:
            raise ModelFileError("[input_constraint] needs both cost and bound", head, 1)
        if len(kv["cost"][1]) != nX:
            raise ModelFileError(f"input cost needs {nX} entries", kv["cost"][0], 1)
        if len(kv["bound"][1]) != 1:
            raise ModelFileError("bound takes one number", kv["bound"][0], 1)
        constraint = InputConstraint(np.array(kv["cost"][1]), kv["bound"][1][0])

    return ProbingModel(
        S=alph["S"], Se=alph["Se"], Sd=alph["Sd"], Ae=alph["Ae"], Ad=alph["Ad"],
        X=alph["X"], Y=alph["Y"],
        state=ProbDist(alph["S"], ps[0]),
        channel=CondKernel((alph["X"], alph["S"]), (alph["Y"],), W),
        probe=CondKernel((alph["S"], alph["Ae"], alph["Ad"]), (alph["Se"], alph["Sd"]), P),
        cost=CostTable(cost), budget=float(budget), input_constraint=constraint, name=name,
    )


def load_model(path) -> ProbingModel:
    with open(path) as fh:
        text = fh.read()
    stem = str(path).rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return parse_model(text, name=stem)


def _fmt(vals) -> str:
    return " ".join(repr(float(v)) for v in vals)


def format_model(m: ProbingModel) -> str:
    out = [f"# {m.name}", "[alphabets]"]
    for key in ALPHABET_NAMES:
        out.append(f"{key} = " + " ".join(getattr(m, key).symbols))
    out += ["", "[state]", _fmt(m.state.mass), "", "[channel]"]
    W = m.channel_table
    for y in range(m.Y.size):
        out.append(_fmt(W[:, :, y].ravel()))
    out += ["", "[probe]"]
    P = m.probe_table
    for row in P.reshape(-1, m.Se.size * m.Sd.size):
        out.append(_fmt(row))
    out += ["", "[cost]"]
    for row in m.cost.table:
        out.append(_fmt(row))
    out += ["", "[budget]", repr(float(m.budget))]
    if m.input_constraint is not None:
        out += ["", "[input_constraint]", "cost = " + _fmt(m.input_constraint.cost),
                f"bound = {float(m.input_constraint.bound)!r}"]
    return "\n".join(out) + "\n"

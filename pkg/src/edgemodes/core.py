"""Shared domain types: chain parameters, Pauli-string algebra, bitstring
states, Majorana bookkeeping and deterministic randomness.

Site indexing is 1-based in docstrings and labels (Q1 is the left edge) and
0-based in code. Bit value 0 of a bitstring means <Z> = +1 on that site.
All field angles (h_j, disorder strengths) are stored in radians; division
by pi happens only at interface boundaries (CLI flags, file schemas).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

PAULI_CHARS = "IXYZ"

# Single-site products sigma_a sigma_b = phase * sigma_c, tabulated as
# (phase, c) with a, b, c in {0:I, 1:X, 2:Y, 3:Z}.
_MULT_CODE = np.zeros((4, 4), dtype=np.int8)
_MULT_PHASE = np.ones((4, 4), dtype=complex)
for _a in range(4):
    _MULT_CODE[0, _a] = _MULT_CODE[_a, 0] = _a
    _MULT_CODE[_a, _a] = 0
for _a, _b, _c in [(1, 2, 3), (2, 3, 1), (3, 1, 2)]:
    _MULT_CODE[_a, _b] = _c
    _MULT_CODE[_b, _a] = _c
    _MULT_PHASE[_a, _b] = 1j
    _MULT_PHASE[_b, _a] = -1j

_SINGLE_SITE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_VALID_PHASES = (1 + 0j, -1 + 0j, 1j, -1j)


@dataclass(frozen=True)
class PauliString:
    """A signed tensor product of single-site Pauli operators.

    ``ops`` is a string over {I, X, Y, Z}, one character per site, site 1
    first. ``phase`` is one of +1, -1, +i, -i.
    """

    ops: str
    phase: complex = 1 + 0j

    def __post_init__(self):
        if any(c not in PAULI_CHARS for c in self.ops):
            raise ValueError(f"invalid Pauli characters in {self.ops!r}")
        phase = complex(self.phase)
        if not any(abs(phase - p) < 1e-12 for p in _VALID_PHASES):
            raise ValueError(f"phase must be a fourth root of unity, got {phase}")
        object.__setattr__(self, "phase", phase)

    @classmethod
    def identity(cls, length: int) -> "PauliString":
        return cls("I" * length)

    @classmethod
    def from_sites(cls, length: int, sites: dict[int, str], phase: complex = 1 + 0j) -> "PauliString":
        """Build from a {1-based site: character} mapping."""
        ops = ["I"] * length
        for site, char in sites.items():
            if not 1 <= site <= length:
                raise ValueError(f"site {site} outside 1..{length}")
            ops[site - 1] = char
        return cls("".join(ops), phase)

    @property
    def length(self) -> int:
        return len(self.ops)

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.ops)

    def support(self) -> tuple[int, ...]:
        """1-based sites carrying a non-identity operator."""
        return tuple(j + 1 for j, c in enumerate(self.ops) if c != "I")

    def is_hermitian(self) -> bool:
        return abs(self.phase.imag) < 1e-12

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        a = np.frombuffer(self.ops.encode(), dtype=np.uint8)
        b = np.frombuffer(other.ops.encode(), dtype=np.uint8)
        codes_a = _char_codes(a)
        codes_b = _char_codes(b)
        out_codes = _MULT_CODE[codes_a, codes_b]
        phase = self.phase * other.phase * np.prod(_MULT_PHASE[codes_a, codes_b])
        ops = "".join(PAULI_CHARS[c] for c in out_codes)
        return PauliString(ops, _snap_phase(phase))

    def dagger(self) -> "PauliString":
        return PauliString(self.ops, _snap_phase(np.conj(self.phase)))

    def label(self) -> str:
        """Human-readable name like 'X1X2Z3'; identity is 'I'."""
        parts = [f"{c}{j + 1}" for j, c in enumerate(self.ops) if c != "I"]
        return "".join(parts) if parts else "I"

    def to_matrix(self) -> np.ndarray:
        """Dense 2^L x 2^L matrix; intended for small-L checks.

        Site 1 occupies the least-significant bit of the basis index.
        """
        out = np.array([[self.phase]], dtype=complex)
        for c in self.ops:
            out = np.kron(_SINGLE_SITE[c], out)
        return out


def _char_codes(ascii_codes: np.ndarray) -> np.ndarray:
    codes = np.zeros_like(ascii_codes)
    codes[ascii_codes == ord("X")] = 1
    codes[ascii_codes == ord("Y")] = 2
    codes[ascii_codes == ord("Z")] = 3
    return codes


def _snap_phase(phase: complex) -> complex:
    for p in _VALID_PHASES:
        if abs(phase - p) < 1e-9:
            return p
    raise ValueError(f"phase {phase} is not a fourth root of unity")


def pauli_multiply(a: PauliString, b: PauliString) -> PauliString:
    """Product a*b with the accumulated phase."""
    return a * b


@dataclass(frozen=True)
class BitString:
    """Computational-basis product state; bit 0 means <Z> = +1."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        return cls((0,) * length)

    @classmethod
    def from_string(cls, s: str) -> "BitString":
        return cls(tuple(int(c) for c in s))

    @property
    def length(self) -> int:
        return len(self.bits)

    def z(self, site: int) -> int:
        """Exact <Z_site> (1-based site), always +1 or -1."""
        return 1 - 2 * self.bits[site - 1]

    def index(self) -> int:
        """Basis-state index with site 1 at the least-significant bit."""
        return sum(b << j for j, b in enumerate(self.bits))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def random_bitstring(length: int, rng: np.random.Generator, fix_first: int | None = None) -> BitString:
    """Uniform random bitstring; optionally pin the edge bit (site 1)."""
    bits = rng.integers(0, 2, size=length)
    if fix_first is not None:
        bits[0] = fix_first
    return BitString(tuple(int(b) for b in bits))


@dataclass(frozen=True)
class ChainParams:
    """Drive definition for one Floquet cycle.

    Kicked Ising: X kick of angle pi*g on every site, then ZZ layer of angle
    pi*J on every bond, then local Z fields h_j (radians). XY variant: two
    layers of number-conserving two-qubit gates controlled by zeta, then the
    same Z-field layer; g and J are unused there.
    """

    L: int
    g: float | None = None
    J: float | None = 0.5
    h: tuple[float, ...] | None = None
    variant: str = "kicked_ising"
    zeta: float | None = None

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("chain needs at least two sites")
        if self.variant not in ("kicked_ising", "xy"):
            raise ValueError(f"unknown variant {self.variant!r}")
        h = self.h if self.h is not None else (0.0,) * self.L
        h = tuple(float(x) for x in h)
        if len(h) != self.L:
            raise ValueError(f"h must have length {self.L}")
        if not all(np.isfinite(h)):
            raise ValueError("h entries must be finite")
        object.__setattr__(self, "h", h)
        if self.variant == "kicked_ising":
            if self.g is None or self.J is None:
                raise ValueError("kicked Ising drive needs g and J")
            if self.zeta is not None:
                raise ValueError("zeta is an XY-variant parameter")
            if not (np.isfinite(self.g) and np.isfinite(self.J)):
                raise ValueError("g, J must be finite")
        else:
            if self.zeta is None:
                raise ValueError("XY drive needs zeta")
            if not np.isfinite(self.zeta):
                raise ValueError("zeta must be finite")
            if self.g is not None:
                raise ValueError("g is a kicked-Ising parameter")
            object.__setattr__(self, "J", None)

    @classmethod
    def kicked_ising(cls, L: int, g: float, J: float = 0.5, h: Sequence[float] | None = None) -> "ChainParams":
        return cls(L=L, g=g, J=J, h=None if h is None else tuple(h), variant="kicked_ising")

    @classmethod
    def xy(cls, L: int, zeta: float, h: Sequence[float] | None = None) -> "ChainParams":
        return cls(L=L, g=None, J=0.5, h=None if h is None else tuple(h), variant="xy", zeta=zeta)

    def with_h(self, h: Sequence[float]) -> "ChainParams":
        return ChainParams(L=self.L, g=self.g, J=self.J, h=tuple(float(x) for x in h),
                           variant=self.variant, zeta=self.zeta)

    @property
    def integrable(self) -> bool:
        return self.variant == "kicked_ising" and all(x == 0.0 for x in self.h)


# ---------------------------------------------------------------------------
# Jordan-Wigner bookkeeping
#
# a_{2j-1} = X_1 ... X_{j-1} Z_j and a_{2j} = X_1 ... X_{j-1} Y_j (1-based m).
# Useful inverses, derived from X_j = i a_{2j-1} a_{2j}:
#   Z_j = i^{j-1} a_1 a_2 ... a_{2j-1}
#   Y_j = i^{j-1} a_1 a_2 ... a_{2j-2} a_{2j}
# ---------------------------------------------------------------------------

def majorana_to_pauli(m: int, L: int) -> PauliString:
    """Pauli string of the Majorana operator a_m for a chain of L sites."""
    if not 1 <= m <= 2 * L:
        raise ValueError(f"Majorana index {m} outside 1..{2 * L}")
    j, parity = divmod(m + 1, 2)  # m = 2j-1 -> parity 0, m = 2j -> parity 1
    ops = ["X"] * (j - 1) + ["Z" if parity == 0 else "Y"]
    ops += ["I"] * (L - j)
    return PauliString("".join(ops))


def majorana_index_of(P: PauliString) -> int | None:
    """Inverse of majorana_to_pauli; None when P is not of that form."""
    if abs(P.phase - 1) > 1e-12:
        return None
    sup = P.support()
    if not sup:
        return None
    j = sup[-1]
    if sup != tuple(range(1, j + 1)):
        return None
    if any(P.ops[k] != "X" for k in range(j - 1)):
        return None
    last = P.ops[j - 1]
    if last == "Z":
        return 2 * j - 1
    if last == "Y":
        return 2 * j
    return None


def _monomial_multiply(indices: list[int], extra: Iterable[int]) -> tuple[list[int], int]:
    """Multiply a sorted Majorana monomial by another (sorted) one.

    Returns the sorted surviving indices and the sign from anticommutation;
    repeated indices square to one.
    """
    sign = 1
    out = list(indices)
    for m in extra:
        # insertion position from the right; each hop over an element flips the sign
        pos = len(out)
        while pos > 0 and out[pos - 1] > m:
            pos -= 1
            sign = -sign
        if pos > 0 and out[pos - 1] == m:
            out.pop(pos - 1)
            # moving m next to its twin used pos..end hops; removing the pair
            # costs no extra sign beyond those already counted
        else:
            out.insert(pos, m)
    return out, sign


def pauli_to_majorana(P: PauliString) -> tuple[tuple[int, ...], complex]:
    """Expand a Pauli string as phase * a_{m1} a_{m2} ... with m1 < m2 < ...

    Every Pauli string is a single Majorana monomial; the returned phase
    includes P.phase.
    """
    L = P.length
    indices: list[int] = []
    phase = complex(P.phase)
    for j0, c in enumerate(P.ops):
        j = j0 + 1
        if c == "I":
            continue
        if c == "X":
            factor = [2 * j - 1, 2 * j]
            phase *= 1j
        elif c == "Z":
            factor = list(range(1, 2 * j))
            phase *= 1j ** (j - 1)
        else:  # Y
            factor = list(range(1, 2 * j - 1)) + [2 * j]
            phase *= 1j ** (j - 1)
        indices, sign = _monomial_multiply(indices, factor)
        phase *= sign
    return tuple(indices), phase


def pauli_from_majorana(indices: Sequence[int], L: int, phase: complex = 1 + 0j) -> PauliString:
    """Product phase * a_{m1} ... a_{mk} as a PauliString (indices in order)."""
    out = PauliString.identity(L)
    for m in indices:
        out = out * majorana_to_pauli(m, L)
    return PauliString(out.ops, _snap_phase(out.phase * phase))


# ---------------------------------------------------------------------------
# Deterministic randomness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RngSpec:
    """Counter-based random stream: (seed, stream) fixes all draws.

    Streams are independent Philox counters, so ensemble members can be
    drawn in any order (or in parallel) and still reproduce bit-for-bit.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed % (1 << 64), self.stream % (1 << 64)], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def split(self, stream: int) -> "RngSpec":
        return RngSpec(self.seed, stream)


def sample_disorder(delta: float, L: int, rng: RngSpec | np.random.Generator) -> np.ndarray:
    """Draw h_j i.i.d. uniform on [-delta, delta] (radians)."""
    if delta < 0:
        raise ValueError("disorder strength must be non-negative")
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    if delta == 0.0:
        gen.uniform(-1.0, 1.0, size=L)  # keep the stream position consistent
        return np.zeros(L)
    return gen.uniform(-delta, delta, size=L)

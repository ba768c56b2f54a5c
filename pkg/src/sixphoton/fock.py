"""Bosonic Fock-space polynomials, the PDC emission series and linear-optical mode maps.

A :class:`FockPolynomial` stores the coefficients of monomials
``prod_m (a_m^dagger)**n_m |0>`` keyed by occupation vector.  Coefficients are
NOT orthonormal Fock amplitudes: the squared norm carries the bosonic
factorials,

    ||psi||^2 = sum_n |c_n|^2 * prod_m n_m!

so that substituting creation operators (what a linear network does) is plain
polynomial arithmetic.  Use :meth:`FockPolynomial.fock_amplitudes` to get
orthonormal amplitudes ``c_n * sqrt(prod n_m!)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

if TYPE_CHECKING:
    from .optics import LinearNetwork

#: terms with modulus below this are dropped when collecting
COLLECT_TOL = 1e-12

POLARIZATIONS = ("H", "V")


@dataclass(frozen=True, order=True)
class OpticalMode:
    """One spatial path carrying one polarization."""

    spatial: str
    polarization: str

    def __post_init__(self):
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"polarization must be 'H' or 'V', got {self.polarization!r}")

    def __str__(self):
        return f"{self.spatial}{self.polarization}"

    @classmethod
    def parse(cls, label: str) -> "OpticalMode":
        """``"a0H"`` -> ``OpticalMode("a0", "H")``."""
        return cls(label[:-1], label[-1])


def register(spatial_modes: Iterable[str]) -> tuple[OpticalMode, ...]:
    """H and V sub-modes for each spatial label, in order (aH, aV, bH, bV, ...)."""
    modes = tuple(OpticalMode(s, p) for s in spatial_modes for p in POLARIZATIONS)
    if len(set(modes)) != len(modes):
        raise ValueError("duplicate spatial modes in register")
    return modes


def _check_register(modes: Sequence[OpticalMode]) -> tuple[OpticalMode, ...]:
    modes = tuple(modes)
    if len(set(modes)) != len(modes):
        raise ValueError("mode register contains duplicates")
    return modes


def _collect(terms: Mapping[tuple[int, ...], complex], tol: float = COLLECT_TOL) -> dict:
    return {occ: complex(amp) for occ, amp in terms.items() if abs(amp) > tol}


@dataclass(frozen=True)
class FockPolynomial:
    """Polynomial in creation operators acting on the vacuum."""

    modes: tuple[OpticalMode, ...]
    terms: Mapping[tuple[int, ...], complex] = field(default_factory=dict)

    def __post_init__(self):
        modes = _check_register(self.modes)
        object.__setattr__(self, "modes", modes)
        clean = {}
        for occ, amp in self.terms.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != len(modes):
                raise ValueError(f"occupation {occ} does not match register of {len(modes)} modes")
            if any(n < 0 for n in occ):
                raise ValueError(f"negative occupation {occ}")
            clean[occ] = clean.get(occ, 0) + complex(amp)
        object.__setattr__(self, "terms", _collect(clean))

    @classmethod
    def vacuum(cls, modes: Sequence[OpticalMode]) -> "FockPolynomial":
        modes = tuple(modes)
        return cls(modes, {(0,) * len(modes): 1.0})

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "FockPolynomial") -> "FockPolynomial":
        if self.modes != other.modes:
            raise ValueError("cannot add polynomials over different registers")
        out = dict(self.terms)
        for occ, amp in other.terms.items():
            out[occ] = out.get(occ, 0) + amp
        return FockPolynomial(self.modes, out)

    def __mul__(self, scalar: complex) -> "FockPolynomial":
        return FockPolynomial(self.modes, {k: v * scalar for k, v in self.terms.items()})

    __rmul__ = __mul__

    def photon_numbers(self) -> set[int]:
        return {sum(occ) for occ in self.terms}

    def norm_squared(self) -> float:
        return float(
            sum(abs(a) ** 2 * math.prod(math.factorial(n) for n in occ) for occ, a in self.terms.items())
        )

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def normalized(self) -> "FockPolynomial":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero polynomial")
        return self * (1.0 / nrm)

    def fock_amplitudes(self) -> dict[tuple[int, ...], complex]:
        """Amplitudes in the orthonormal occupation-number basis."""
        return {
            occ: amp * math.sqrt(math.prod(math.factorial(n) for n in occ)) for occ, amp in self.terms.items()
        }

    def amplitude(self, occupation: Sequence[int]) -> complex:
        return self.terms.get(tuple(occupation), 0j)

    def to_dict(self) -> dict:
        return {
            "modes": [str(m) for m in self.modes],
            "terms": [
                {"occ": list(occ), "re": amp.real, "im": amp.imag} for occ, amp in sorted(self.terms.items())
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> "FockPolynomial":
        modes = tuple(OpticalMode.parse(m) for m in data["modes"])
        terms = {tuple(t["occ"]): complex(t["re"], t["im"]) for t in data["terms"]}
        return cls(modes, terms)

    @classmethod
    def from_json(cls, text: str) -> "FockPolynomial":
        return cls.from_dict(json.loads(text))


def normalization_constant(alpha: complex) -> float:
    """Normalization of the single-source PDC emission state.

    The series ``sum_n (1 + n) |alpha|^(2n)`` sums to ``1 / (1 - |alpha|^2)^2``,
    hence ``C = 1 - |alpha|^2``.
    """
    x = abs(alpha) ** 2
    if x >= 1:
        raise ValueError(f"|alpha| = {abs(alpha):g} >= 1: state not normalizable")
    return 1.0 - x


@dataclass(frozen=True)
class PdcSource:
    """Type-II down-conversion source emitting into a0 and b0.

    The two-photon generator is ``a0H^dag b0V^dag + exp(i*relative_phase) a0V^dag b0H^dag``.
    """

    alpha: complex
    relative_phase: float = 0.0
    arms: tuple[str, str] = ("a0", "b0")

    def __post_init__(self):
        if abs(self.alpha) >= 1:
            raise ValueError(f"|alpha| = {abs(self.alpha):g} >= 1: state not normalizable")
        object.__setattr__(self, "relative_phase", float(self.relative_phase) % (2 * math.pi))

    @property
    def input_modes(self) -> tuple[OpticalMode, ...]:
        return register(self.arms)

    @property
    def normalization(self) -> float:
        return normalization_constant(self.alpha)


def pair_number_distribution(source: PdcSource, max_order: int) -> list[float]:
    """Probability of emitting exactly ``n`` pairs, ``n = 0..max_order``."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    c2 = source.normalization**2
    x = abs(source.alpha) ** 2
    return [c2 * (1 + n) * x**n for n in range(max_order + 1)]


def pdc_term(source: PdcSource, order: int) -> FockPolynomial:
    """Order-``n`` term of the emission series, ``(-i alpha)^n / n! (A + e^{i phi} B)^n |0>``.

    With ``A = a0H^dag b0V^dag`` and ``B = a0V^dag b0H^dag`` commuting, the
    binomial expansion gives ``C(n, k) e^{i(n-k)phi}`` on the monomial
    ``a0H^k a0V^(n-k) b0H^(n-k) b0V^k``.  The normalization constant ``C`` is
    not included.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    prefactor = (-1j * source.alpha) ** order / math.factorial(order)
    phase = np.exp(1j * source.relative_phase)
    terms = {}
    for k in range(order + 1):
        occ = (k, order - k, order - k, k)  # a0H, a0V, b0H, b0V
        terms[occ] = prefactor * math.comb(order, k) * phase ** (order - k)
    return FockPolynomial(source.input_modes, terms)


def apply_network(state: FockPolynomial, network: "LinearNetwork") -> FockPolynomial:
    """Substitute every input creation operator by its image under ``network``."""
    if tuple(network.inputs) != state.modes:
        raise ValueError(
            "network input register does not match state register: "
            f"{[str(m) for m in network.inputs]} vs {[str(m) for m in state.modes]}"
        )
    matrix = np.asarray(network.matrix)
    n_out = matrix.shape[0]
    # images[i] = sparse list of (output index, amplitude)
    images = [[(o, matrix[o, i]) for o in range(n_out) if abs(matrix[o, i]) > COLLECT_TOL] for i in range(matrix.shape[1])]

    out: dict[tuple[int, ...], complex] = {}
    for occ, amp in state.terms.items():
        partial = {(0,) * n_out: amp}
        for i, count in enumerate(occ):
            for _ in range(count):
                nxt: dict[tuple[int, ...], complex] = {}
                for key, val in partial.items():
                    for o, m in images[i]:
                        new = list(key)
                        new[o] += 1
                        new = tuple(new)
                        nxt[new] = nxt.get(new, 0) + val * m
                partial = nxt
        for key, val in partial.items():
            out[key] = out.get(key, 0) + val
    return FockPolynomial(tuple(network.outputs), out)


class PostSelection(NamedTuple):
    """Outcome of post-selection; ``ket`` is None for a null result."""

    ket: np.ndarray | None
    probability: float

    @property
    def is_null(self) -> bool:
        return self.ket is None


def postselect_one_per_spatial_mode(state: FockPolynomial, spatial_modes: Sequence[str]) -> PostSelection:
    """Keep terms with exactly one photon in each listed spatial mode.

    Survivors map to qubit basis states with H -> 0 and V -> 1, the first listed
    mode being the most significant qubit.  ``probability`` is the kept weight
    relative to ``||state||^2``.
    """
    index = {m: i for i, m in enumerate(state.modes)}
    try:
        slots = [(index[OpticalMode(s, "H")], index[OpticalMode(s, "V")]) for s in spatial_modes]
    except KeyError as exc:
        raise ValueError(f"register lacks H/V sub-modes for {exc.args[0]}") from None
    listed = {i for pair in slots for i in pair}
    others = [i for i in range(len(state.modes)) if i not in listed]

    total = state.norm_squared()
    n = len(spatial_modes)
    ket = np.zeros(2**n, dtype=complex)
    for occ, amp in state.terms.items():
        if any(occ[i] for i in others):
            continue
        bits = []
        for h, v in slots:
            if occ[h] + occ[v] != 1:
                break
            bits.append(occ[v])
        else:
            # every occupation is 0 or 1, so the monomial is already normalized
            ket[int("".join(map(str, bits)), 2) if bits else 0] += amp
    weight = float(np.vdot(ket, ket).real)
    if total == 0 or weight <= COLLECT_TOL**2:
        return PostSelection(None, 0.0)
    return PostSelection(ket / math.sqrt(weight), weight / total)


def canonical_gauge(ket: np.ndarray, reference_index: int | None = None) -> np.ndarray:
    """Remove the global phase so the reference amplitude is real positive.

    Defaults to the |HHHVVV>-type index (first half H, second half V) when the
    qubit count is even, else the largest-modulus amplitude.
    """
    ket = np.asarray(ket, dtype=complex)
    n = int(round(math.log2(ket.size)))
    if reference_index is None:
        reference_index = (1 << (n // 2)) - 1 if n % 2 == 0 else None
    if reference_index is None or abs(ket[reference_index]) < COLLECT_TOL:
        reference_index = int(np.argmax(np.abs(ket)))
    ref = ket[reference_index]
    return ket * (abs(ref) / ref)

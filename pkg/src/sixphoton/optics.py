"""Linear-optical networks and polarization analyzers.

Conventions
-----------
* 50-50 splitter: transmitted amplitude ``1/sqrt(2)``, reflected ``i/sqrt(2)``,
  identical for H and V.
* Jones matrices use the fast-axis angle ``theta`` measured from H:
  ``HWP(theta) = R(theta) diag(1, -1) R(-theta)`` and
  ``QWP(theta) = R(theta) diag(1, i) R(-theta)``.
* An analyzer is HWP then QWP then a PBS whose transmitted port is H.  With
  ``U = QWP @ HWP`` the detected basis is ``{U^dag |H>, U^dag |V>}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .fock import COLLECT_TOL, POLARIZATIONS, OpticalMode, register

SQRT2 = math.sqrt(2.0)

BS_MATRIX = np.array([[1, 1j], [1j, 1]]) / SQRT2


@dataclass(frozen=True)
class LinearNetwork:
    """Isometry from input creation operators to output creation operators.

    ``matrix[o, i]`` is the amplitude of output mode ``o`` in the image of
    input mode ``i``.
    """

    inputs: tuple[OpticalMode, ...]
    outputs: tuple[OpticalMode, ...]
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if m.shape != (len(self.outputs), len(self.inputs)):
            raise ValueError(f"matrix shape {m.shape} does not match registers")
        for reg in (self.inputs, self.outputs):
            if len(set(reg)) != len(reg):
                raise ValueError("duplicate modes in register")

    def is_isometry(self, atol: float = 1e-12) -> bool:
        gram = self.matrix.conj().T @ self.matrix
        return bool(np.allclose(gram, np.eye(len(self.inputs)), atol=atol))

    def image(self, mode: OpticalMode) -> dict[OpticalMode, complex]:
        col = self.matrix[:, self.inputs.index(mode)]
        return {o: complex(a) for o, a in zip(self.outputs, col) if abs(a) > COLLECT_TOL}


def _spatial_element(kind: str, params: Mapping) -> tuple[np.ndarray, np.ndarray]:
    """Per-polarization transfer matrices (for H, for V) of one element."""
    if kind == "bs":
        return BS_MATRIX, BS_MATRIX
    if kind == "phase":
        h = np.exp(1j * float(params.get("h", 0.0)))
        v = np.exp(1j * float(params.get("v", 0.0)))
        return np.array([[h]]), np.array([[v]])
    raise ValueError(f"unknown element type {kind!r}")


def build_network(inputs: Sequence[str], outputs: Sequence[str], elements: Sequence[Mapping]) -> LinearNetwork:
    """Compose polarization-preserving elements into a :class:`LinearNetwork`.

    Spatial ports not listed in ``inputs`` are vacuum ports.  Every photon
    entering through ``inputs`` must end up in ``outputs``; otherwise the
    result would not be an isometry and a ``ValueError`` is raised.
    """
    in_modes = register(inputs)
    out_modes = register(outputs)
    # image of each input optical mode over the current frontier of spatial modes
    images = [{(m.spatial, m.polarization): 1.0 + 0j} for m in in_modes]

    for el in elements:
        el_in, el_out = list(el["inputs"]), list(el["outputs"])
        t_h, t_v = _spatial_element(el["type"], el.get("params", {}))
        if t_h.shape != (len(el_out), len(el_in)):
            raise ValueError(f"element {el['type']} expects {t_h.shape[1]} inputs and {t_h.shape[0]} outputs")
        if len(set(el_in)) != len(el_in) or len(set(el_out)) != len(el_out):
            raise ValueError(f"element {el['type']} has duplicate ports")
        for img in images:
            for pol, t in zip(POLARIZATIONS, (t_h, t_v)):
                vec = np.array([img.pop((s, pol), 0j) for s in el_in])
                for s, a in zip(el_out, t @ vec):
                    if abs(a) > COLLECT_TOL:
                        img[(s, pol)] = img.get((s, pol), 0j) + a

    index = {(m.spatial, m.polarization): k for k, m in enumerate(out_modes)}
    matrix = np.zeros((len(out_modes), len(in_modes)), dtype=complex)
    for col, img in enumerate(images):
        for key, amp in img.items():
            if key not in index:
                raise ValueError(f"light leaves through undeclared port {key[0]}{key[1]}")
            matrix[index[key], col] = amp
    return LinearNetwork(in_modes, out_modes, matrix)


def fifty_fifty_splitter(in_a: str, in_b: str, out_a: str, out_b: str) -> LinearNetwork:
    """Two-port 50-50 splitter acting identically on H and V."""
    if len({in_a, in_b}) != 2 or len({out_a, out_b}) != 2:
        raise ValueError("splitter ports must be distinct")
    return build_network([in_a, in_b], [out_a, out_b], [{"type": "bs", "inputs": [in_a, in_b], "outputs": [out_a, out_b]}])


def load_network_config(source: str | Path | Mapping) -> LinearNetwork:
    """Build a network from a JSON layout (path, JSON text or parsed mapping)."""
    if isinstance(source, Mapping):
        cfg = source
    else:
        text = Path(source).read_text() if Path(str(source)).exists() else str(source)
        cfg = json.loads(text)
    unknown = set(cfg) - {"name", "inputs", "outputs", "elements"}
    if unknown:
        raise ValueError(f"unknown keys in network config: {sorted(unknown)}")
    return build_network(cfg["inputs"], cfg["outputs"], cfg["elements"])


def _builtin(name: str) -> Mapping:
    return json.loads(resources.files("sixphoton.data").joinpath(name).read_text())


def experiment_network(config: Mapping | None = None) -> LinearNetwork:
    """a0 -> (a, b, c) and b0 -> (d, e, f) through two cascaded splitters per arm.

    The first splitter's transmitted port is the output a (resp. d); its
    reflected port feeds the second splitter.  Per-output phase plates stand
    for the compensation optics and default to zero, which already yields the
    canonical six-photon state after post-selection.
    """
    return load_network_config(config if config is not None else _builtin("experiment_network.json"))


def pair_network() -> LinearNetwork:
    """Identity relabeling a0 -> a, b0 -> b (one photon pair, no splitting)."""
    return build_network(
        ["a0", "b0"],
        ["a", "b"],
        [
            {"type": "phase", "inputs": ["a0"], "outputs": ["a"]},
            {"type": "phase", "inputs": ["b0"], "outputs": ["b"]},
        ],
    )


def four_mode_network() -> LinearNetwork:
    """a0 -> (a, b), b0 -> (c, d) with one splitter per arm."""
    return build_network(
        ["a0", "b0"],
        ["a", "b", "c", "d"],
        [
            {"type": "bs", "inputs": ["a0", "va"], "outputs": ["a", "b"]},
            {"type": "bs", "inputs": ["b0", "vb"], "outputs": ["c", "d"]},
        ],
    )


NETWORKS = {"experiment": experiment_network, "pair": pair_network, "four-mode": four_mode_network}


# --- polarization analysis -------------------------------------------------

def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def half_wave_plate(theta: float) -> np.ndarray:
    r = _rotation(theta)
    return r @ np.diag([1, -1]) @ r.T


def quarter_wave_plate(theta: float) -> np.ndarray:
    r = _rotation(theta)
    return r @ np.diag([1, 1j]) @ r.T


KET_H = np.array([1, 0], dtype=complex)
KET_V = np.array([0, 1], dtype=complex)

NAMED_BASES = {
    "HV": (KET_H, KET_V),
    "DA": (np.array([1, 1]) / SQRT2 + 0j, np.array([1, -1]) / SQRT2 + 0j),
    "LR": (np.array([1, 1j]) / SQRT2, np.array([1, -1j]) / SQRT2),
}
BASIS_LETTERS = {"HV": "HV", "DA": "DA", "LR": "LR"}
BASIS_PAULI = {"HV": "Z", "DA": "X", "LR": "Y"}


@dataclass(frozen=True)
class AnalyzerSetting:
    """One polarization analyzer: a named basis, wave-plate angles, or a Bloch direction.

    Exactly one description is used, in priority order ``basis``, ``bloch``,
    then the wave-plate angles (which default to the H/V basis).
    """

    hwp: float = 0.0
    qwp: float = 0.0
    basis: str | None = None
    bloch: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.basis is not None and self.basis not in NAMED_BASES:
            raise ValueError(f"unknown basis {self.basis!r}; expected one of {sorted(NAMED_BASES)}")
        if self.bloch is not None:
            v = np.asarray(self.bloch, dtype=float)
            if v.shape != (3,) or not math.isclose(np.linalg.norm(v), 1.0, abs_tol=1e-9):
                raise ValueError("bloch direction must be a unit 3-vector")
            object.__setattr__(self, "bloch", tuple(float(x) for x in v))

    @classmethod
    def named(cls, basis: str) -> "AnalyzerSetting":
        return cls(basis=basis)

    @property
    def labels(self) -> tuple[str, str]:
        if self.basis is not None:
            return tuple(BASIS_LETTERS[self.basis])
        return ("+", "-")


def analyzer_basis(setting: AnalyzerSetting) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair (plus, minus) of single-qubit kets detected by ``setting``."""
    if setting.basis is not None:
        plus, minus = NAMED_BASES[setting.basis]
        return plus.copy(), minus.copy()
    if setting.bloch is not None:
        x, y, z = setting.bloch
        theta = math.acos(max(-1.0, min(1.0, z)))
        phi = math.atan2(y, x)
        plus = np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
        minus = np.array([-np.exp(-1j * phi) * math.sin(theta / 2), math.cos(theta / 2)])
        return plus, minus
    u = quarter_wave_plate(setting.qwp) @ half_wave_plate(setting.hwp)
    ud = u.conj().T
    return ud @ KET_H, ud @ KET_V


def basis_projectors(setting: AnalyzerSetting) -> tuple[np.ndarray, np.ndarray]:
    plus, minus = analyzer_basis(setting)
    return np.outer(plus, plus.conj()), np.outer(minus, minus.conj())


def settings_for(basis: str, n: int = 6) -> list[AnalyzerSetting]:
    """Identical named-basis analyzers on all ``n`` qubits."""
    return [AnalyzerSetting.named(basis)] * n

"""Dense state-vector reference simulator, tests only.

Exact n <= 7 qubit evolution used to validate the Clifford tables, the
tableau engine, and the fidelity identities.  Never used on production paths.
"""

from __future__ import annotations

import numpy as np

from .clifford import CliffordGate2
from .sites import I as LI
from .sites import SiteId

MAX_QUBITS = 7

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_1 = [_I2, _X, _Z, _Y]  # letter v = x + 2z


def pauli_matrix_2q(v4: int) -> np.ndarray:
    """4x4 matrix of the letter pair v4 (first site is the slow index)."""
    return np.kron(PAULI_1[v4 & 3], PAULI_1[v4 >> 2])


def gate_unitary(gate: CliffordGate2) -> np.ndarray:
    """4x4 unitary with the gate's conjugation action (global phase arbitrary)."""
    imgs = []
    for j in range(4):
        w = gate.forward_letters(1 << j)
        s = gate.image_sign(1 << j)
        imgs.append((-1.0) ** s * pauli_matrix_2q(w))
    proj = (np.eye(4) + imgs[1]) @ (np.eye(4) + imgs[3]) / 4.0
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    psi0 = proj[:, col]
    psi0 = psi0 / np.linalg.norm(psi0)
    u = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            vec = psi0
            if b:
                vec = imgs[2] @ vec
            if a:
                vec = imgs[0] @ vec
            u[:, 2 * a + b] = vec
    return u


class DenseState:
    """Pure state on an ordered list of sites (n <= 7)."""

    def __init__(self, sites: list[SiteId]):
        if len(sites) > MAX_QUBITS:
            raise ValueError(f"dense oracle capped at {MAX_QUBITS} qubits")
        self.sites = list(sites)
        self.index = {s: k for k, s in enumerate(self.sites)}
        if len(self.index) != len(self.sites):
            raise ValueError("duplicate SiteIds")
        self.n = len(sites)
        self.amps = np.zeros(2**self.n, dtype=complex)
        self.amps[0] = 1.0

    def copy(self) -> "DenseState":
        out = DenseState.__new__(DenseState)
        out.sites = list(self.sites)
        out.index = dict(self.index)
        out.n = self.n
        out.amps = self.amps.copy()
        return out

    def _axes(self):
        return self.amps.reshape((2,) * self.n)

    def apply_unitary(self, u: np.ndarray, qubits: tuple[int, ...]) -> None:
        k = len(qubits)
        psi = self._axes()
        psi = np.moveaxis(psi, qubits, range(k))
        shp = psi.shape
        psi = u @ psi.reshape(2**k, -1)
        psi = psi.reshape(shp)
        psi = np.moveaxis(psi, range(k), qubits)
        self.amps = psi.reshape(-1)

    def apply_gate(self, gate: CliffordGate2, a: SiteId, b: SiteId) -> None:
        self.apply_unitary(gate_unitary(gate), (self.index[a], self.index[b]))

    def apply_pauli(self, letters: dict[SiteId, int], phase: complex = 1.0) -> None:
        for site, v in letters.items():
            if v != LI:
                self.apply_unitary(PAULI_1[v], (self.index[site],))
        self.amps *= phase

    def bell_pair(self, a: SiteId, b: SiteId) -> None:
        """Install |Phi+> on (a, b); both must currently be in |0>."""
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        cnot = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
        self.apply_unitary(h, (self.index[a],))
        self.apply_unitary(cnot, (self.index[a], self.index[b]))

    def density(self, part: list[SiteId]) -> np.ndarray:
        keep = [self.index[s] for s in part]
        rest = [k for k in range(self.n) if k not in keep]
        psi = np.moveaxis(self._axes(), keep + rest, range(self.n))
        mat = psi.reshape(2 ** len(keep), 2 ** len(rest))
        return mat @ mat.conj().T

    def expectation(self, letters: dict[SiteId, int]) -> float:
        st = self.copy()
        st.apply_pauli(letters)
        return float(np.real(np.vdot(self.amps, st.amps)))


def dense_entropy(state: DenseState, part: list[SiteId]) -> float:
    """Exact von Neumann entropy, in bits."""
    rho = state.density(part)
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-12]
    return float(-(w * np.log2(w)).sum())


def dense_bell_fidelity(state: DenseState, a: SiteId, b: SiteId) -> float:
    rho = state.density([a, b])
    phi = np.zeros(4, dtype=complex)
    phi[0] = phi[3] = 1 / np.sqrt(2)
    return float(np.real(phi.conj() @ rho @ phi))


def dense_postselect(state: DenseState, letters: dict[SiteId, int], outcome: int) -> float:
    """Project onto (1 + outcome*P)/2 in place; returns the Born probability."""
    st = state.copy()
    st.apply_pauli(letters)
    proj = (state.amps + outcome * st.amps) / 2.0
    prob = float(np.real(np.vdot(proj, proj)))
    if prob > 1e-12:
        state.amps = proj / np.sqrt(prob)
    return prob

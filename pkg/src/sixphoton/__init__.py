"""Simulation and analysis of the six-photon Psi6+ polarization state."""

from .fock import FockPolynomial, OpticalMode, PdcSource, apply_network, pdc_term, postselect_one_per_spatial_mode
from .optics import AnalyzerSetting, LinearNetwork, analyzer_basis, experiment_network, fifty_fifty_splitter
from .qstate import add_white_noise, correlation, fidelity, outcome_distribution, project_qubit, reference_state
from .witness import PauliObservable, expectation, max_overlap_witness, pauli_decompose, reduce_witness
from .teleclone import ProtocolLayout, derive_correction_table, teleclone

__version__ = "0.1.0"

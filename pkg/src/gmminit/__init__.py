"""Observable-adaptive Gaussian-mixture initialization for layered variational circuits."""
from .ansatz import CircuitSpec, GateOrder, build_circuit_spec, detect_inactive
from .gradient import cost, grad_adjoint, grad_finite_difference, grad_parameter_shift, mc_grad_stats
from .initstrategy import InitStrategy, build_strategy, sample_params
from .pauli import Observable, PauliString, parse_pauli
from .statevector import exact_ground_energy, expectation, run_circuit

__version__ = "0.1.0"

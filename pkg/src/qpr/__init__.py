"""Non-negative quasi-probability representations of qubit and qudit subtheories.

Modules
-------
operator_core  Hermitian operators, Bloch vectors, bases, unitaries
quasirep       frame representations and their structural checks
families       the qubit families with closed-form non-negative frames
certifier      exact/float LP feasibility certificates and scans
ontic_sim      permutation dynamics on ontic spaces, circuit simulation
qudit          disparateness, hull decompositions, counting bounds
verify         deterministic verification suite
cli            command-line front end
"""

from .certifier import FeasibilityCertificate, certify, threshold_scan
from .families import FamilySpec, family_bases, family_rep
from .quasirep import QuasiRep

__all__ = ["FamilySpec", "FeasibilityCertificate", "QuasiRep", "certify", "family_bases", "family_rep",
           "threshold_scan"]
__version__ = "0.1.0"

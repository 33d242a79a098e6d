"""Private information retrieval from transversal designs and their codes."""

from .basecodes import LinearCode, OrthogonalArray, oa_from_code
from .design import TransversalDesign, td_affine, td_curves, td_from_oa, td_projective
from .ff import FieldSpec, field_new, field_of_order
from .inccode import IncidenceCode, code_of_design, incidence_code
from .pir import PirScheme, cost_report, gen_queries, reconstruct, server_answer, setup

__version__ = "0.1.0"

"""Embedding criteria for Besov spaces of generalised smoothness on R^n and on h-sets.

Sequences of the form C 2^(a j) (1+j)^b ln(e+j)^c and gauges
C r^d (1+|log2 r|)^beta are handled symbolically; the ``oracle`` and
``hset_lab`` modules provide numerical cross-checks.
"""

from .dsl import ParseError, format_gauge, format_seq, parse_gauge, parse_seq
from .embed_rn import SpaceRn, besov, embed_besov_rn, embed_into_C, embed_into_Lmax
from .gauge import GaugeExpr, NotAGaugeError, dset, hseq
from .seqcalc import INF, SeqExpr, dual_exponent, lq_membership, paren, q_star
from .trace_gamma import (
    SpaceGamma,
    embed_gamma_gamma,
    embed_into_Linfty,
    embed_into_Lmax_gamma,
    trace_exists,
    trace_into_Lr,
)
from .verdict import Status, Verdict

__version__ = "0.1.0"

__all__ = [
    "INF",
    "GaugeExpr",
    "NotAGaugeError",
    "ParseError",
    "SeqExpr",
    "SpaceGamma",
    "SpaceRn",
    "Status",
    "Verdict",
    "besov",
    "dset",
    "dual_exponent",
    "embed_besov_rn",
    "embed_gamma_gamma",
    "embed_into_C",
    "embed_into_Linfty",
    "embed_into_Lmax",
    "embed_into_Lmax_gamma",
    "format_gauge",
    "format_seq",
    "hseq",
    "lq_membership",
    "paren",
    "parse_gauge",
    "parse_seq",
    "q_star",
    "trace_exists",
    "trace_into_Lr",
]

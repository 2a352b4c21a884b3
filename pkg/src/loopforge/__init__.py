"""Finite loops, propagation of equations, subdirect products and Steiner loops."""
from .extension import Cocycle, Extension, central_extension
from .loopcore import (
    FiniteLoop, LoopError, LoopHom, SizeLimitError, Subloop, all_normal_subloops, all_subloops,
    center, generated_subloop, is_associative, is_diassociative, is_moufang, is_normal,
    is_simple, loops_isomorphic, quotient,
)
from .steiner import STS, orient, oriented_steiner_loop, steiner_loop, sts_from_blocks
from .subdirect import ProductLoop, SubdirectProduct, direct_product, goursat_decompose, lifted_graph
from .terms import Equation, builtin_equation, holds, parse_equation, propagates

__version__ = "0.1.0"

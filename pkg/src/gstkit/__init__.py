"""gstkit: generalized set theories as data.

A small higher-order-logic kernel with soft types, a feature algebra with a
GST axiom generator, and a finite tagged cumulative-hierarchy model in which
the generated axioms are checked at desk scale.
"""

__version__ = "0.1.0"

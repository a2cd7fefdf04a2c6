"""Affine inner products, their hat metrics, and the electromagnetic extension
algebroid T M ⊕ R over a Lorentzian 4-manifold."""

from .affine_algebra import AffineInnerProduct, decompose, hat_metric
from .algebroid import AlgebroidSectionField, curvature_hat_closed, ricci_hat, scalar_hat
from .dynamics import WorldlineState, integrate
from .em_extension import PotentialField, faraday
from .families import make_metric, make_potential
from .field_equation import SourceBlocks, einstein_blocks, residuals
from .geometry import MetricField

__all__ = [
    "AffineInnerProduct", "decompose", "hat_metric",
    "AlgebroidSectionField", "curvature_hat_closed", "ricci_hat", "scalar_hat",
    "WorldlineState", "integrate",
    "PotentialField", "faraday",
    "make_metric", "make_potential",
    "SourceBlocks", "einstein_blocks", "residuals",
    "MetricField",
]

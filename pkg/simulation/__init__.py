"""
Simulation Module
=================
Simulated survival models and evaluation against their ground truth.
"""

from .generators import (
    SIMULATION_STREAM,
    calibrate_censoring,
    censoring_probability,
    generate,
    misclassification_rate,
    spec_from_preset,
)

__all__ = [
    'SIMULATION_STREAM',
    'calibrate_censoring',
    'censoring_probability',
    'generate',
    'misclassification_rate',
    'spec_from_preset',
]

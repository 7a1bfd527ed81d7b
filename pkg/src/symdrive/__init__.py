"""Desk-scale driving-scene pipeline: Gaussian-splat reconstruction, flow-matching
lateral view restoration, vehicle insertion with masked harmonization, and
rule-based traffic simulation, all verifiable against built-in synthetic oracles."""

__version__ = "0.1.0"

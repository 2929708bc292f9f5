"""Multipoint point-scatterer scattering and high-energy inverse scattering."""

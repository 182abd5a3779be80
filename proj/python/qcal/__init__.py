"""Python bindings for the qcal anisotropic EIT library."""

from ._core import (
    QcMap,
    a0_catalog,
    beltrami_coefficient,
    config_hash,
    disk_indicator_transform,
    reconstruct,
    sigma_profile,
    simulate_dn,
    solve_map,
)

__all__ = [
    "QcMap",
    "a0_catalog",
    "beltrami_coefficient",
    "config_hash",
    "disk_indicator_transform",
    "reconstruct",
    "sigma_profile",
    "simulate_dn",
    "solve_map",
]

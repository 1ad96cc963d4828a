"""Spectral statements built on the monodromy and strip computations."""
from .airy import A1, IM_TARGET, RE_TARGET, airy_ai, airy_first_zero
from .asymptotics import (AsymptoticReport, AsymptoticRow, airy_anchor, asymptotic_report,
                          fit_power_law)
from .branches import (SUBSET_CAVEAT, BranchEigenvalue, PureDecayError, SpectrumRun,
                       band_distance, fold_to_band, monodromy_spectrum, no_hole_log_modulus,
                       no_hole_monodromy_eigs, no_hole_spectrum, plane_wave_factor,
                       strip_spectrum, unfold)
from .crosscheck import InvarianceReport, pseudo_invariance_check
from .pseudospectra import PseudospectraGrid, pseudospectra_grid, resolvent_norm
from .reconstruct import Reconstruction, UnconvergedPairError, reconstruct_eigenfunction
from .sweep import SweepResult, match_branches, sweep_g, sweep_q

__all__ = [
    "A1", "IM_TARGET", "RE_TARGET", "airy_ai", "airy_first_zero",
    "AsymptoticReport", "AsymptoticRow", "airy_anchor", "asymptotic_report", "fit_power_law",
    "SUBSET_CAVEAT", "BranchEigenvalue", "PureDecayError", "SpectrumRun", "band_distance",
    "fold_to_band", "monodromy_spectrum", "no_hole_log_modulus", "no_hole_monodromy_eigs",
    "no_hole_spectrum", "plane_wave_factor", "strip_spectrum", "unfold",
    "InvarianceReport", "pseudo_invariance_check",
    "PseudospectraGrid", "pseudospectra_grid", "resolvent_norm",
    "Reconstruction", "UnconvergedPairError", "reconstruct_eigenfunction",
    "SweepResult", "match_branches", "sweep_g", "sweep_q",
]

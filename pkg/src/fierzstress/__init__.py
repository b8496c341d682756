"""Dirac bilinears, Fierz identities and Maxwell-Dirac stress-energy tensors."""
from ._backend import BACKEND, available_backends
from .bilinear import (BilinearJet, BilinearSet, SpinorJet, bilinear_jet, charge_conjugate,
                       compute_bilinears, dirac_adjoint, gauge_transform, on_shell_plane_wave,
                       plane_wave_jet, random_jets, random_spinors)
from .clifford import GammaBasis, build_gamma_basis, delta4, levi_civita, verify_appendix_a
from .errors import (AsymmetryError, DegenerateInvariant, FierzStressError, GridTooSmall,
                     RadiusMismatch, SchemaError, ZeroCharge)
from .fierz import (FierzCoefficients, FierzIdentity, appendix_b_suite, fierz_expand,
                    fierz_suite)
from .report import IdentityReport, IdentityResidual
from .spherical import (FDConfig, GridResult, GridTable, SphericalJet, SphericalParams,
                        embed_and_crosscheck, grid_evaluate, stress_functions)
from .stress import (EMField, PhysParams, assemble_md, b_field, belinfante_bilinear,
                     belinfante_spinor, canonical_tensor, combinatorial_residual,
                     variational_pre_tensor)

__version__ = "0.1.0"

"""Numerical tolerances shared by every module.

All thresholds live in one frozen record so that a single analysis run uses
a consistent set of values and reports can echo them back verbatim.
"""
from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Settings:
    # Hermiticity of input matrices, relative to 1 + ||M||_F
    herm_tol: float = 1e-10
    # Choi eigenvalues below choi_tol * max eigenvalue are dropped
    choi_tol: float = 1e-10
    # conditional complete positivity, relative to the Choi spectral norm
    ccp_tol: float = 1e-9
    # generator identities such as L(1) = 0 and *-map checks, relative to ||S||_F
    gen_tol: float = 1e-9
    faithful_tol: float = 1e-10
    # singular values below kernel_tol * sigma_max span the stationary kernel
    kernel_tol: float = 1e-10
    # ||L_*(rho)||_F <= inv_tol * (1 + ||S||_F) for rho to count as invariant
    inv_tol: float = 1e-9
    comm_tol: float = 1e-9
    # span invariance and Hermiticity of the modular coefficient matrix
    span_tol: float = 1e-8
    y_herm_tol: float = 1e-8
    cluster_tol: float = 1e-8
    unitary_tol: float = 1e-8
    # commutator fit residual relative to ||L||_F
    db_tol: float = 1e-8
    # [K, rho] = 0 and similar operator identities, relative to 1 + ||K||_F
    op_tol: float = 1e-9
    # classical reversibility, relative to the largest rate
    rev_tol: float = 1e-12

    def as_dict(self):
        return asdict(self)

    def updated(self, **overrides):
        """Return a copy with some tolerances replaced; unknown names raise."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT = Settings()


def resolve(settings):
    return DEFAULT if settings is None else settings

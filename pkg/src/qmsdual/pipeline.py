"""Instance loading and the full analysis pipeline used by the command line."""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy

from . import __version__
from .balance import detailed_balance_check
from .duals import s_dual_generator
from .errors import NoPrivilegedRepError
from .gksl import GkslRep, Superoperator, build_generator, special_rep_from_superoperator, validate_generator
from .modular import commutes_with_modular, privileged_rep
from .serialize import decode_matrix, encode_matrix, validate
from .settings import DEFAULT, Settings
from .stationary import DensityState, invariance_residual, invariant_states, require_faithful, require_invariant

DEFAULT_S = (0.0, 0.5)


@dataclass(frozen=True, eq=False)
class Instance:
    id: str
    generator: Superoperator
    rep: Optional[GkslRep] = None
    rho: Optional[DensityState] = None
    s_values: Tuple[float, ...] = DEFAULT_S
    settings: Settings = field(default=DEFAULT)

    @property
    def dim(self):
        return self.generator.dim


def instance_from_dict(data, settings=None, s_values=None):
    """Build an :class:`Instance` from parsed (schema-valid) JSON."""
    validate(data, "instance")
    st = settings if settings is not None else DEFAULT
    if data.get("tolerances"):
        st = st.updated(**data["tolerances"])
    d = int(data["dim"])
    rep = None
    if "superoperator" in data:
        gen = Superoperator(decode_matrix(data["superoperator"], d * d))
    else:
        H = decode_matrix(data["H"], d) if "H" in data else np.zeros((d, d), dtype=complex)
        Ls = tuple(decode_matrix(L, d) for L in data.get("L", []))
        rep = GkslRep(H, Ls)
        gen = build_generator(rep)
    rho = None
    if "rho" in data:
        rho = DensityState.from_matrix(decode_matrix(data["rho"], d), st)
    s_vals = tuple(s_values) if s_values else tuple(float(x) for x in data.get("s", DEFAULT_S))
    for s in s_vals:
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"s values must lie in [0, 1], got {s}")
    return Instance(str(data.get("id", "instance")), gen, rep, rho, s_vals, st)


def instance_to_dict(rep, ident, rho=None, s_values=None):
    d = rep.dim
    out = {"id": ident, "dim": d, "H": encode_matrix(rep.H), "L": [encode_matrix(L) for L in rep.Ls]}
    if rho is not None:
        out["rho"] = encode_matrix(rho.rho)
    if s_values is not None:
        out["s"] = [float(s) for s in s_values]
    return out


def _real_list(xs):
    return [float(x) for x in xs]


def _balance_dict(r):
    details = {}
    for k, v in r.details.items():
        if isinstance(v, (bool, np.bool_)):
            details[k] = bool(v)
        elif isinstance(v, (list, tuple)):
            details[k] = _real_list(v)
        elif isinstance(v, str):
            details[k] = v
        else:
            details[k] = float(v)
    return {
        "s": r.s,
        "holds": r.holds,
        "K": encode_matrix(r.K) if r.K is not None else None,
        "K_residual": r.K_residual,
        "K_commutes_rho": r.K_commutes_rho,
        "intertwiner": encode_matrix(r.intertwiner) if r.intertwiner is not None else None,
        "reason": r.reason,
        "details": details,
    }


def analyze(inst):
    """Run stationary states, special and privileged representations, duals and balance.

    Raises :class:`PreconditionError` when no faithful invariant state is
    available or a supplied state is not invariant.
    """
    st = inst.settings
    S = inst.generator
    diag = validate_generator(S, st)
    states = invariant_states(S, st)
    if inst.rho is not None:
        rho = inst.rho
        require_faithful(rho)
        require_invariant(S, rho, st)
        source = "input"
    else:
        rho = states[0]
        require_faithful(rho)
        source = "maximal-support invariant state"
    rep = special_rep_from_superoperator(S, rho, st)
    comm, comm_res = commutes_with_modular(S, rho, st)
    try:
        p = privileged_rep(rep, rho, st)
        priv = {
            "available": True,
            "H": encode_matrix(p.H),
            "L": [encode_matrix(L) for L in p.Ls],
            "lambdas": _real_list(p.lambdas),
            "reason": "",
        }
    except NoPrivilegedRepError as exc:
        priv = {"available": False, "H": None, "L": [], "lambdas": [], "reason": str(exc)}
    dual_rows, bal_rows = [], []
    for s in inst.s_values:
        dr = s_dual_generator(S, rho, s, st)
        dual_rows.append({
            "s": float(s),
            "is_star_map": dr.is_star_map,
            "is_qms": dr.is_qms,
            "residuals": {k: float(v) for k, v in dr.residuals.items()},
        })
        bal_rows.append(_balance_dict(detailed_balance_check(S, rho, s, st)))
    report = {
        "schema": "qmsdual.report/1",
        "instance": inst.id,
        "dim": S.dim,
        "generator": {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v)) for k, v in diag.items()},
        "stationary": {
            "count": len(states),
            "states": [encode_matrix(x.rho) for x in states],
            "selected": encode_matrix(rho.rho),
            "source": source,
            "faithful": rho.faithful,
            "min_eigenvalue": rho.min_eigenvalue,
            "invariance_residual": invariance_residual(S, rho),
        },
        "special_rep": {
            "H": encode_matrix(rep.H),
            "L": [encode_matrix(L) for L in rep.Ls],
            "choi_spectrum": [float(np.linalg.norm(L) ** 2) for L in rep.Ls],
        },
        "modular": {"commutes": comm, "residual": comm_res},
        "privileged": priv,
        "duals": dual_rows,
        "balance": bal_rows,
        "tolerances": st.as_dict(),
        "versions": {"qmsdual": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
    }
    validate(report, "report")
    return report

"""Lehmann-Maehly-Goerisch bounds in the Zimmermann-Mertins form.

For a shift t the trial-space problem is the pencil tau * A2t = A1t with
A1t = A1 - t A0 and A2t = A2 - 2t A1 + t^2 A0. Each negative eigenvalue tau
gives a lower bound t + 1/tau for an eigenvalue below t; each positive one an
upper bound for an eigenvalue above t.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import FormMatrices, shift
from .eigensolve import EPS, eig_gsym
from .errors import InconsistentEnclosureError, InvalidArgumentError, NotPositiveDefiniteError, ShiftInSpectrumError

INDEX_CAVEAT = (
    "eigenvalue indices assume the number of true eigenvalues below t_plus equals "
    "the count of negative taus found there; this is not certified without a priori "
    "information (supply --ell-hint)"
)


@dataclass(frozen=True)
class TauSpectrum:
    """Sign-split eigenvalues of (A1t, A2t).

    ``taus_negative`` runs from the most negative value upward; ``taus_positive``
    from the largest value downward. Both orders match j = 1, 2, ... in the bounds.
    """

    t: float
    taus_negative: np.ndarray
    taus_positive: np.ndarray
    zero_taus: int
    tau_tol: float

    @property
    def m_minus(self) -> int:
        return len(self.taus_negative)

    @property
    def m_plus(self) -> int:
        return len(self.taus_positive)


@dataclass(frozen=True)
class BoundSet:
    t: float
    lower_bounds: np.ndarray
    upper_bounds: np.ndarray
    ell_hint: int | None = None


@dataclass(frozen=True)
class EnclosureRecord:
    index: int
    lower: float
    upper: float
    width: float
    t_minus: float
    t_plus: float
    galerkin_upper: float | None = None


@dataclass
class EnclosureReport:
    records: list[EnclosureRecord]
    t_minus: float
    t_plus: float
    requested: int
    m_plus_tminus: int
    m_minus_tplus: int
    ell_used: int
    ell_hint: int | None = None
    index_caveat: str | None = None
    flags: list[str] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def achieved(self) -> int:
        return len(self.records)

    @property
    def short(self) -> bool:
        return self.achieved < self.requested

    def to_dict(self) -> dict:
        return {
            "records": [vars(r).copy() for r in self.records],
            "t_minus": self.t_minus,
            "t_plus": self.t_plus,
            "requested": self.requested,
            "achieved": self.achieved,
            "m_plus_tminus": self.m_plus_tminus,
            "m_minus_tplus": self.m_minus_tplus,
            "ell_used": self.ell_used,
            "ell_hint": self.ell_hint,
            "index_caveat": self.index_caveat,
            "flags": list(self.flags),
            "metadata": dict(self.metadata),
        }


def tau_spectrum(forms: FormMatrices, t: float, method: str = "lapack") -> TauSpectrum:
    sf = shift(forms, t)
    try:
        dec = eig_gsym(sf.A1t, sf.A2t, vectors=False, method=method)
    except NotPositiveDefiniteError as exc:
        raise ShiftInSpectrumError(float(t), exc.index) from exc
    taus = dec.values
    N = len(taus)
    tol = N * EPS * np.linalg.norm(sf.A1t) / np.linalg.norm(sf.A2t)
    neg = taus[taus < -tol]  # ascending: most negative first
    pos = taus[taus > tol][::-1]  # largest first
    zero = N - len(neg) - len(pos)
    return TauSpectrum(
        t=float(t), taus_negative=neg, taus_positive=pos, zero_taus=int(zero), tau_tol=float(tol)
    )


def bounds_from_tau(spec: TauSpectrum, ell_hint: int | None = None) -> BoundSet:
    """lower_bounds[j-1] bounds lambda_{l-j+1}; upper_bounds[j-1] bounds lambda_{l+j}."""
    return BoundSet(
        t=spec.t,
        lower_bounds=spec.t + 1.0 / spec.taus_negative,
        upper_bounds=spec.t + 1.0 / spec.taus_positive,
        ell_hint=ell_hint,
    )


def galerkin_values(forms: FormMatrices, method: str = "lapack") -> np.ndarray:
    """All Ritz values of the pencil (A1, A0), ascending."""
    return eig_gsym(forms.A1, forms.A0, vectors=False, method=method).values


def galerkin_upper(forms: FormMatrices, count: int, method: str = "lapack") -> np.ndarray:
    if count < 0 or count > forms.N:
        raise InvalidArgumentError(f"count must lie in [0, {forms.N}], got {count}")
    if count == 0:
        return np.empty(0)
    return galerkin_values(forms, method)[:count]


@dataclass(frozen=True)
class Admissibility:
    x: float
    y: float
    ritz_min: float
    ritz_max: float
    lower_ok: bool  # x below the largest Rayleigh quotient
    upper_ok: bool  # y above the smallest Rayleigh quotient

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


def check_admissibility(forms: FormMatrices, x: float, y: float, ritz=None) -> Admissibility:
    if not x < y:
        raise InvalidArgumentError(f"need x < y, got x={x!r}, y={y!r}")
    if ritz is None:
        ritz = galerkin_values(forms)
    lo, hi = float(ritz[0]), float(ritz[-1])
    return Admissibility(x=x, y=y, ritz_min=lo, ritz_max=hi, lower_ok=x < hi, upper_ok=y > lo)


def enclose(
    forms: FormMatrices,
    t_minus: float,
    t_plus: float,
    m: int,
    ell_hint: int | None = None,
    with_galerkin: bool = True,
    strict: bool = True,
    method: str = "lapack",
) -> EnclosureReport:
    """Enclosures for lambda_1..lambda_m from upper bounds at t_minus and lower bounds at t_plus.

    ``t_minus`` is taken to lie below the spectrum. Lower bounds from ``t_plus``
    are indexed by ``ell_hint`` when given, otherwise by the number of negative
    taus found at ``t_plus``. Crossed bounds raise unless ``strict`` is false,
    in which case they are kept and the report is flagged "crossed".
    """
    if not t_minus < t_plus:
        raise InvalidArgumentError(f"need t_minus < t_plus, got {t_minus!r}, {t_plus!r}")
    if m < 0:
        raise InvalidArgumentError(f"count must be non-negative, got {m}")
    meta = {}
    if forms.mesh is not None:
        meta.update(L=forms.mesh.L, n=forms.mesh.n, h=forms.mesh.h, N=forms.N)
    if forms.potential is not None:
        meta["potential"] = forms.potential.label()
    if m == 0:
        return EnclosureReport(
            records=[], t_minus=t_minus, t_plus=t_plus, requested=0, m_plus_tminus=0,
            m_minus_tplus=0, ell_used=0, ell_hint=ell_hint,
            index_caveat=None if ell_hint is not None else INDEX_CAVEAT, metadata=meta,
        )

    ritz = galerkin_values(forms, method)
    adm = check_admissibility(forms, t_minus, t_plus, ritz)
    flags = []
    if not adm.lower_ok:
        flags.append("t_minus-inadmissible")
    if not adm.upper_ok:
        flags.append("t_plus-inadmissible")

    up = bounds_from_tau(tau_spectrum(forms, t_minus, method))
    low = bounds_from_tau(tau_spectrum(forms, t_plus, method), ell_hint)
    m_minus = len(low.lower_bounds)
    ell = m_minus if ell_hint is None else int(ell_hint)
    if ell_hint is not None and ell_hint != m_minus:
        flags.append("ell-hint-mismatch")

    records = []
    for j in range(1, m + 1):
        k = ell - j + 1  # lower_bounds index (1-based) that bounds lambda_j
        if j > len(up.upper_bounds) or k < 1:
            break
        if k > m_minus:
            # ell_hint above the detected count: no lower bound for this index
            continue
        lo = float(low.lower_bounds[k - 1])
        hi = float(up.upper_bounds[j - 1])
        if lo > hi:
            if strict:
                raise InconsistentEnclosureError(j, lo, hi)
            if "crossed" not in flags:
                flags.append("crossed")
        records.append(
            EnclosureRecord(
                index=j, lower=lo, upper=hi, width=hi - lo, t_minus=float(t_minus),
                t_plus=float(t_plus),
                galerkin_upper=float(ritz[j - 1]) if with_galerkin and j <= len(ritz) else None,
            )
        )
    if len(records) < m:
        flags.append("short")
    return EnclosureReport(
        records=records, t_minus=float(t_minus), t_plus=float(t_plus), requested=m,
        m_plus_tminus=len(up.upper_bounds), m_minus_tplus=m_minus, ell_used=ell,
        ell_hint=ell_hint, index_caveat=None if ell_hint is not None else INDEX_CAVEAT,
        flags=flags, metadata=meta,
    )

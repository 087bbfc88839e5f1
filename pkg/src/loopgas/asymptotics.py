"""Theory layer: gravity exponent, central charges, and the growth-law fit.

The loop-count growth law is mean_k(p) = sigma' p + gamma' log p + kappa'
+ o(1) with natural logarithms; gamma' is the discriminating observable
between the two candidate universality classes.  Model I is the dense
non-crossing loop phase, model II the broken-symmetry Goldstone phase.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import (ConditioningError, DomainError, SeriesError,
                     UnderdeterminedError, WeightError)


class ModelId(enum.Enum):
    I = "I"
    II = "II"


@dataclass(frozen=True)
class FitResult:
    sigma_prime: float
    gamma_prime: float
    kappa_prime: float
    chi2: float
    ell_min: int
    ell_max: int


def gamma_exponent(c: float) -> float:
    """String susceptibility exponent (c - 1 - sqrt((1-c)(25-c))) / 12.

    Defined for c <= 1 (c = 1 gives the limit 0); strictly increasing.
    """
    if c > 1.0:
        raise DomainError("gamma exponent defined for c <= 1")
    return (c - 1.0 - math.sqrt((1.0 - c) * (25.0 - c))) / 12.0


def central_charge(model: ModelId, n: float) -> float:
    """Central charge of the candidate CFT at loop weight n in [0, 2).

    Model I solves n = -2 cos(pi g) on the dense branch 1/2 <= g < 1 and
    returns 1 - 6 (sqrt(g) - 1/sqrt(g))**2; model II returns n - 1.
    """
    if not 0.0 <= n < 2.0:
        raise DomainError("loop weight n must lie in [0, 2)")
    model = ModelId(model)
    if model is ModelId.II:
        return n - 1.0
    g = math.acos(-n / 2.0) / math.pi  # in [1/2, 1) for n in [0, 2)
    r = math.sqrt(g) - 1.0 / math.sqrt(g)
    return 1.0 - 6.0 * r * r


def _derivative(f, x: float, h: float = 1e-6) -> float:
    """Central difference with one Richardson extrapolation step."""
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4.0 * d2 - d1) / 3.0


_SELF_CHECK_TOL = 1e-8


def gamma_prime_prediction(model: ModelId) -> float:
    """d gamma / d n at n = 1: 3 sqrt(3) / (4 pi) for model I, 3/10 for
    model II.  Self-checks the closed form against the numerical
    derivative of the composed map n -> gamma(c(n))."""
    model = ModelId(model)
    if model is ModelId.I:
        value = 3.0 * math.sqrt(3.0) / (4.0 * math.pi)
    else:
        value = 0.3
    fd = _derivative(lambda n: gamma_exponent(central_charge(model, n)), 1.0)
    assert abs(fd - value) < _SELF_CHECK_TOL, \
        f"closed form {value} vs finite difference {fd}"
    return value


# ---------------------------------------------------------------------------
# Weighted least squares for the growth law
# ---------------------------------------------------------------------------

def _ell_of(p: float) -> int:
    ell = round(math.log2(p))
    if 2**ell != round(p):
        raise SeriesError(f"p={p} is not a power of two")
    return ell


def fit_loop_growth(data, ell_min: int | None = None,
                    ell_max: int | None = None) -> FitResult:
    """Weighted linear least squares of mean_k ~ sigma' p + gamma' ln p
    + kappa'.

    ``data`` holds (p, mean, err) rows with p a power of two; weights are
    1/err**2 and chi2 the minimized weighted sum of squared residuals.
    Solved by SVD on the column-scaled weighted design matrix, which keeps
    the p vs log p vs 1 scale disparity harmless.
    """
    rows = [(float(p), float(m), float(e)) for p, m, e in data]
    ells = [_ell_of(p) for p, _, _ in rows]
    if ell_min is None:
        ell_min = min(ells, default=0)
    if ell_max is None:
        ell_max = max(ells, default=0)
    sel = [(p, m, e) for (p, m, e), ell in zip(rows, ells)
           if ell_min <= ell <= ell_max]
    if len(sel) < 3:
        raise UnderdeterminedError("need at least 3 points for a 3-parameter"
                                   " fit")
    p = np.array([r[0] for r in sel])
    y = np.array([r[1] for r in sel])
    err = np.array([r[2] for r in sel])
    if np.any(err <= 0):
        raise WeightError("all error bars must be positive")
    w = 1.0 / err
    design = np.column_stack([p, np.log(p), np.ones_like(p)]) * w[:, None]
    rhs = y * w
    norms = np.linalg.norm(design, axis=0)
    if np.any(norms == 0):
        raise ConditioningError("degenerate design column")
    beta, _, rank, _ = np.linalg.lstsq(design / norms, rhs, rcond=None)
    if rank < 3:
        raise ConditioningError("design matrix is rank deficient")
    beta = beta / norms
    resid = rhs - design @ beta
    chi2 = float(resid @ resid)
    return FitResult(sigma_prime=float(beta[0]), gamma_prime=float(beta[1]),
                     kappa_prime=float(beta[2]), chi2=chi2,
                     ell_min=ell_min, ell_max=ell_max)


def fit_scan(data, ell_min_range, ell_max: int | None = None):
    """One fit per ell_min, ell_max fixed (defaults to the data maximum)."""
    if ell_max is None:
        ell_max = max(_ell_of(float(p)) for p, _, _ in data)
    return [fit_loop_growth(data, ell_min, ell_max)
            for ell_min in ell_min_range]


# ---------------------------------------------------------------------------
# Published fixture
# ---------------------------------------------------------------------------

def load_table1():
    """The shipped mean-loop measurements: (p, mean, err) rows for
    p = 2**ell, ell = 1..24.  The err column carries the published
    parentheticals; rows published as exact ("(0)") carry 4 units of the
    last printed digit (see the comment block in the fixture for why)."""
    text = (resources.files("loopgas.data") / "table1.csv").read_text()
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = []
    for rec in csv.DictReader(lines):
        ell = int(rec["ell"])
        rows.append((2.0**ell, float(rec["k"]), float(rec["err"])))
    return rows


def write_fits_csv(fits, fh, comments=()) -> None:
    for line in comments:
        fh.write(f"# {line}\n")
    fh.write("lmin,sigma_prime,gamma_prime,kappa_prime,chi2\n")
    for f in fits:
        fh.write(f"{f.ell_min},{f.sigma_prime:.17g},{f.gamma_prime:.17g},"
                 f"{f.kappa_prime:.17g},{f.chi2:.17g}\n")

"""Shared test oracles.

The moment oracle expands monomials in the monic orthogonal-polynomial basis
(60-digit arithmetic), which pins every weighted monomial integral without
touching the eigenvalue route used by the library.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np
import pytest


def jacobi_monomial_moments(a: float, b: float, mmax: int) -> np.ndarray:
    """Integrals of x^m (m = 0..mmax) against (1-x)^a (1+x)^b on [-1, 1]."""
    with mp.workdps(60):
        am, bm = mp.mpf(repr(a)), mp.mpf(repr(b))
        mu0 = 2 ** (am + bm + 1) * mp.gamma(am + 1) * mp.gamma(bm + 1) / mp.gamma(am + bm + 2)
        alphas = [(bm - am) / (am + bm + 2)]
        betas = [mu0]
        for k in range(1, mmax + 2):
            nab = 2 * k + am + bm
            alphas.append((bm * bm - am * am) / (nab * (nab + 2)))
            if k == 1:
                betas.append(4 * (1 + am) * (1 + bm) / ((2 + am + bm) ** 2 * (3 + am + bm)))
            else:
                betas.append(4 * k * (k + am) * (k + bm) * (k + am + bm)
                             / (nab ** 2 * (nab + 1) * (nab - 1)))
        # coefficients of x^m in the monic basis; the zeroth one gives the moment
        coeffs = {0: mp.mpf(1)}
        moments = [mu0]
        for _ in range(mmax):
            nxt: dict[int, mp.mpf] = {}
            for i, ci in coeffs.items():
                nxt[i + 1] = nxt.get(i + 1, mp.mpf(0)) + ci
                nxt[i] = nxt.get(i, mp.mpf(0)) + ci * alphas[i]
                if i > 0:
                    nxt[i - 1] = nxt.get(i - 1, mp.mpf(0)) + ci * betas[i]
            coeffs = nxt
            moments.append(coeffs.get(0, mp.mpf(0)) * mu0)
        return np.array([float(v) for v in moments])


@pytest.fixture(scope="session")
def moment_oracle():
    cache: dict[tuple[float, float, int], np.ndarray] = {}

    def get(a: float, b: float, mmax: int) -> np.ndarray:
        key = (a, b, mmax)
        if key not in cache:
            cache[key] = jacobi_monomial_moments(a, b, mmax)
        return cache[key]

    return get

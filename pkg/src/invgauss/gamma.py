"""Complex Gamma function via the Lanczos approximation (g = 7, 9 terms)."""

import numpy as np

_G = 7.0
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


def _log_gamma_right(z):
    # valid for Re z >= 1/2
    z = z - 1.0
    a = np.full_like(z, _COEF[0])
    for i in range(1, len(_COEF)):
        a = a + _COEF[i] / (z + i)
    t = z + _G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * np.log(t) - t + np.log(a)


def complex_loggamma(z):
    """log Gamma(z) for complex z (principal branch not guaranteed, exp() is exact)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _log_gamma_right(z[right])
    zl = z[~right]
    if zl.size:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        out[~right] = np.log(np.pi) - np.log(np.sin(np.pi * zl)) - _log_gamma_right(1.0 - zl)
    return out if out.ndim else out[()]


def complex_gamma(z):
    """Gamma(z) for complex z, relative error around 1e-15 away from the poles."""
    z = np.asarray(z, dtype=complex)
    poles = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    with np.errstate(all="ignore"):
        out = np.exp(complex_loggamma(z))
    out = np.where(poles, np.nan + 0j, out)
    return out if out.ndim else complex(out)


def rgamma(z):
    """1/Gamma(z), zero at the poles."""
    z = np.asarray(z, dtype=complex)
    poles = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    with np.errstate(all="ignore"):
        out = np.exp(-complex_loggamma(np.where(poles, 1.0, z)))
    out = np.where(poles, 0.0, out)
    return out if out.ndim else complex(out)

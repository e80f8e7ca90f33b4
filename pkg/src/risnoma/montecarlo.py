"""Monte-Carlo outage estimation, SINR sampling, moments, and Gamma fits.

Trials are processed in fixed-size blocks; block b draws its channels from
the dedicated substream (seed, b), so results are bit-identical for any
worker count: the per-block partials are combined in block order and the
block layout depends only on the configuration, never on the scheduler.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np
from scipy import stats as sstats

from ._kernels import link_terms_block
from .channel import RandomStream, link_variances
from .config import SystemConfig, dbm_to_watt
from .ris import resolve_alpha

BLOCK_FLOAT_BUDGET = 2_000_000  # floats drawn per block; fixes the block size


@dataclass(frozen=True)
class OutageResult:
    op: float          # outage probability estimate
    trials: int        # 0 for analytic results
    std_err: float     # binomial std error (MC) or quadrature error bound (analytic)
    method: str        # "mc" | "analytic"
    user: int
    config_digest: str


@dataclass(frozen=True)
class GammaFit:
    shape: float     # k
    scale: float     # theta, same unit as the data
    ks_stat: float   # Kolmogorov-Smirnov distance against the fitted CDF


def rate_to_threshold(rate_bps_hz: float) -> float:
    """SINR threshold v = 2^r - 1 for a target rate r."""
    return 2.0 ** rate_bps_hz - 1.0


def block_size(m_active: int, n_passive: int) -> int:
    """Trials per block; a pure function of the RIS size."""
    return max(128, BLOCK_FLOAT_BUDGET // (6 * (m_active + n_passive)))


def _draw_block(config: SystemConfig, block_id: int, nb: int):
    """Channel matrices (nb, M) x3 and (nb, N) x3 for one block of trials."""
    m, n = config.m_active, config.n_passive
    var = link_variances(config)
    rng = RandomStream(config.seed, block_id).generator()
    raw = rng.standard_normal(nb * 2 * (3 * m + 3 * n)).view(np.complex128)
    raw = raw.reshape(nb, 3 * m + 3 * n)
    h1 = raw[:, 0:m] * np.sqrt(var.u1 / 2.0)
    h2 = raw[:, m:2 * m] * np.sqrt(var.u2 / 2.0)
    h_bs = raw[:, 2 * m:3 * m] * np.sqrt(var.bs / 2.0)
    g1 = raw[:, 3 * m:3 * m + n] * np.sqrt(var.u1 / 2.0)
    g2 = raw[:, 3 * m + n:3 * m + 2 * n] * np.sqrt(var.u2 / 2.0)
    g_bs = raw[:, 3 * m + 2 * n:] * np.sqrt(var.bs / 2.0)
    return h1, h2, h_bs, g1, g2, g_bs


def _block_terms(config: SystemConfig, block_id: int, nb: int, alpha: float):
    h1, h2, h_bs, g1, g2, g_bs = _draw_block(config, block_id, nb)
    if config.active_user == 1:
        h_a, h_p, g_a, g_p = h1, h2, g1, g2
    else:
        h_a, h_p, g_a, g_p = h2, h1, g2, g1
    return link_terms_block(h_a, h_p, h_bs, g_a, g_p, g_bs, math.sqrt(alpha))


def _block_sinrs(config: SystemConfig, block_id: int, nb: int, alpha: float):
    a, b, c, d, ang = _block_terms(config, block_id, nb, alpha)
    pt = dbm_to_watt(config.pt_user_dbm)
    w0 = dbm_to_watt(config.w0_dbm)
    sz2 = dbm_to_watt(config.namp_dbm)
    s_ab = np.abs(a + b) ** 2
    s_cd = np.abs(c + d) ** 2
    forwarded = sz2 * alpha * ang
    gamma1 = pt * s_ab / (pt * s_cd + forwarded + w0)
    gamma2 = pt * s_cd / (config.epsilon_sic * pt * s_ab + forwarded + w0)
    return gamma1, gamma2


def _outage_counts_worker(args):
    config, block_id, nb, alpha, v = args
    gamma1, gamma2 = _block_sinrs(config, block_id, nb, alpha)
    out1 = gamma1 < v
    out2 = gamma2 < v
    return int(out1.sum()), int(out2.sum()), int((out1 | out2).sum())


def _sinr_samples_worker(args):
    config, block_id, nb, alpha = args
    return _block_sinrs(config, block_id, nb, alpha)


def _terms_worker(args):
    config, block_id, nb, alpha = args
    return _block_terms(config, block_id, nb, alpha)


def _map_blocks(worker, argses, workers: int):
    """Ordered map over blocks; block order fixes the reduction order."""
    if workers <= 1 or len(argses) <= 1:
        return [worker(a) for a in argses]
    with ProcessPoolExecutor(
        max_workers=workers, mp_context=get_context("fork")
    ) as pool:
        return list(pool.map(worker, argses, chunksize=1))


def _block_plan(config: SystemConfig, n_trials: int):
    nb = block_size(config.m_active, config.n_passive)
    full, rest = divmod(n_trials, nb)
    sizes = [nb] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def estimate_outage_pair(config: SystemConfig, *, trials: int | None = None,
                         workers: int = 1) -> tuple[OutageResult, OutageResult]:
    """Both users' outage estimates from one shared simulation pass."""
    n = config.mc_trials if trials is None else trials
    alpha = resolve_alpha(config)
    v = rate_to_threshold(config.rate_threshold_bps_hz)
    argses = [(config, b, sz, alpha, v) for b, sz in _block_plan(config, n)]
    counts = _map_blocks(_outage_counts_worker, argses, workers)
    c1 = sum(c[0] for c in counts)
    c2 = sum(c[1] for c in counts)
    cj = sum(c[2] for c in counts)
    digest = config.digest()

    def _result(count, user):
        op = count / n
        return OutageResult(
            op=op, trials=n, std_err=math.sqrt(op * (1.0 - op) / n),
            method="mc", user=user, config_digest=digest,
        )

    passive_count = cj if config.joint_outage_u2 else c2
    if config.active_user == 1:
        return _result(c1, 1), _result(passive_count, 2)
    return _result(passive_count, 1), _result(c1, 2)


def estimate_outage(config: SystemConfig, user: int, *, trials: int | None = None,
                    workers: int = 1) -> OutageResult:
    """Outage probability of one user by direct simulation."""
    if user not in (1, 2):
        raise ValueError(f"user must be 1 or 2, got {user}")
    pair = estimate_outage_pair(config, trials=trials, workers=workers)
    return pair[user - 1]


def sample_sinr(config: SystemConfig, user: int, n: int, *,
                workers: int = 1) -> np.ndarray:
    """n i.i.d. linear SINR samples for one user, deterministic given seed."""
    if user not in (1, 2):
        raise ValueError(f"user must be 1 or 2, got {user}")
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    alpha = resolve_alpha(config)
    argses = [(config, b, sz, alpha) for b, sz in _block_plan(config, n)]
    parts = _map_blocks(_sinr_samples_worker, argses, workers)
    idx = 0 if user == config.active_user else 1
    return np.concatenate([p[idx] for p in parts])


def sample_link_terms(config: SystemConfig, n: int, *, workers: int = 1) -> dict:
    """Arrays of the five effective link scalars over n realizations."""
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    alpha = resolve_alpha(config)
    argses = [(config, b, sz, alpha) for b, sz in _block_plan(config, n)]
    parts = _map_blocks(_terms_worker, argses, workers)
    keys = ("a", "b", "c", "d", "ang")
    return {k: np.concatenate([p[i] for p in parts]) for i, k in enumerate(keys)}


_TERM_KEYS = {"A": "a", "B": "b", "C": "c", "D": "d"}


def empirical_moments(config: SystemConfig, term: str, n: int, *,
                      workers: int = 1) -> tuple[complex, float]:
    """Sample mean and total variance of one link term over n realizations."""
    if term not in _TERM_KEYS:
        raise ValueError(f"term must be one of {sorted(_TERM_KEYS)}, got {term!r}")
    if n < 10_000:
        raise ValueError(f"need at least 10^4 realizations, got {n}")
    samples = sample_link_terms(config, n, workers=workers)[_TERM_KEYS[term]]
    mean = complex(np.mean(samples))
    var = float(np.mean(np.abs(samples - mean) ** 2))
    return mean, var


def fit_gamma(samples) -> GammaFit:
    """Moment-matched Gamma fit: k = mean^2/var, theta = var/mean."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.size < 100:
        raise ValueError(f"need at least 100 one-dimensional samples, got shape {x.shape}")
    if np.any(x <= 0.0) or not np.all(np.isfinite(x)):
        raise ValueError("samples must be positive and finite")
    mean = float(np.mean(x))
    var = float(np.var(x))
    if var <= 0.0:
        raise ValueError("samples are degenerate (zero variance)")
    shape = mean * mean / var
    scale = var / mean
    ks = sstats.kstest(x, sstats.gamma(a=shape, scale=scale).cdf).statistic
    return GammaFit(shape=shape, scale=scale, ks_stat=float(ks))

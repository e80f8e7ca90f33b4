"""Hybrid RIS state: per-partition phase alignment and amplifier gain.

The active partition (M elements) is phase-aligned and amplified for one
user; the passive partition (N elements) is phase-aligned, without gain,
for the other.  The power amplification factor alpha is a per-element
POWER gain (the signal is scaled by sqrt(alpha)); the amplitude gain G of
the amplifier satisfies alpha = G^2 and the 0-30 dB cap applies to alpha.
"""

import math
from dataclasses import dataclass

import numpy as np

from .config import ALPHA_MAX, ALPHA_MIN, SystemConfig, db_to_linear, dbm_to_watt
from .channel import ChannelRealization, LinkVariances, link_variances


@dataclass(frozen=True)
class HybridRisState:
    theta: np.ndarray  # unit-modulus phases of the active part, length M
    beta: np.ndarray   # unit-modulus phases of the passive part, length N
    alpha: float       # per-element power gain of the active part


def align_phases(
    ch: ChannelRealization,
    active_user: int = 1,
    passive_user: int | None = None,
    alpha: float = 1.0,
) -> HybridRisState:
    """Coherently align each partition for its served user.

    The active part cancels the phase of the active user's cascaded
    channel, the passive part that of the other user.  A zero channel
    product (probability zero) gets phase 0; the element contributes
    nothing either way.
    """
    if passive_user is None:
        passive_user = 2 if active_user == 1 else 1
    if active_user == passive_user or active_user not in (1, 2) or passive_user not in (1, 2):
        raise ValueError(f"users must be distinct members of {{1, 2}}, got "
                         f"({active_user}, {passive_user})")
    h_a = ch.h1 if active_user == 1 else ch.h2
    g_p = ch.g1 if passive_user == 1 else ch.g2
    theta = np.exp(-1j * np.angle(h_a * ch.h_bs))  # angle(0) = 0 handles zeros
    beta = np.exp(-1j * np.angle(g_p * ch.g_bs))
    return HybridRisState(theta=theta, beta=beta, alpha=alpha)


def element_output_power(pt_ris_watt: float, m_active: int) -> float:
    """Per-element output power of the active part: the budget split evenly."""
    if m_active < 1:
        raise ValueError(f"m_active must be >= 1, got {m_active}")
    return pt_ris_watt / m_active


def pa_consumption(p_out_watt: float, nu: float) -> float:
    """Power consumed by one amplifier producing p_out at efficiency nu."""
    if not (0.0 < nu <= 1.0):
        raise ValueError(f"pa efficiency must be in (0, 1], got {nu}")
    return p_out_watt / nu


def amplifier_gain(p_o_watt: float, pt_user_watt: float,
                   mean_sq_channel: float, g_max: float) -> float:
    """Amplitude gain G = min(sqrt(p_o / (pt * mean_sq_channel)), g_max).

    The denominator is the average signal power at the amplifier input:
    the user's transmit power times the mean squared channel gain seen by
    one active element.
    """
    return min(math.sqrt(p_o_watt / (pt_user_watt * mean_sq_channel)), g_max)


def alpha_from_power(config: SystemConfig, variances: LinkVariances | None = None) -> float:
    """Power amplification implied by the RIS power budget, clamped to 0-30 dB.

    Uses the per-element average channel power of the amplified user's
    uplink hop as the reference input power.
    """
    if variances is None:
        variances = link_variances(config)
    sigma2_active = variances.u1 if config.active_user == 1 else variances.u2
    p_o = element_output_power(dbm_to_watt(config.pt_ris_dbm), config.m_active)
    pt = dbm_to_watt(config.pt_user_dbm)
    g_cap = math.sqrt(db_to_linear(min(config.g_max_db, 30.0)))  # amplitude cap
    g = amplifier_gain(p_o, pt, sigma2_active, g_cap)
    return min(max(g * g, ALPHA_MIN), ALPHA_MAX)


def resolve_alpha(config: SystemConfig, variances: LinkVariances | None = None) -> float:
    """The power gain this config implies.  `optimized` needs the optimizer."""
    if config.alpha_mode == "fixed":
        return min(max(config.alpha_linear, ALPHA_MIN), ALPHA_MAX)
    if config.alpha_mode == "from_power":
        return alpha_from_power(config, variances)
    raise ValueError(
        "alpha_mode='optimized' has no direct value; run the gain optimizer "
        "or evaluate at its chosen pt_ris_dbm"
    )


def ris_state(ch: ChannelRealization, config: SystemConfig) -> HybridRisState:
    """Aligned phases plus the resolved amplification for one realization."""
    return align_phases(ch, active_user=config.active_user,
                        alpha=resolve_alpha(config))

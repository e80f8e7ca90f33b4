"""System configuration, physical-unit conversions, and validation.

Every other module consumes validated :class:`SystemConfig` instances.  All
internal computation is done in watts and linear ratios; dBm/dB appear only
at the I/O boundary (config files, CLI flags, reports).
"""

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, fields, replace

ALPHA_MIN = 1.0     # 0 dB amplifier floor
ALPHA_MAX = 1000.0  # 30 dB amplifier cap (power gain)
ALPHA_MODES = ("fixed", "from_power", "optimized")

FC_RANGE_GHZ = (2.0, 6.0)          # validity range of the UMi NLOS model
DISTANCE_RANGE_M = (10.0, 2000.0)  # same


class ConfigError(ValueError):
    """Aggregated configuration errors; one entry per violated invariant."""

    def __init__(self, problems):
        self.problems = list(problems)
        msg = "invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems)
        super().__init__(msg)


class ConfigWarning(UserWarning):
    """Non-fatal configuration adjustments (e.g. amplifier gain clamping)."""


def dbm_to_watt(p_dbm: float) -> float:
    """Convert a power in dBm to watts."""
    if not math.isfinite(p_dbm):
        raise ValueError(f"power in dBm must be finite, got {p_dbm!r}")
    return 10.0 ** (p_dbm / 10.0) * 1e-3


def watt_to_dbm(p_watt: float) -> float:
    """Convert a power in watts to dBm.  Rejects non-positive input."""
    if not (math.isfinite(p_watt) and p_watt > 0.0):
        raise ValueError(f"power in watts must be finite and positive, got {p_watt!r}")
    return 10.0 * math.log10(p_watt * 1e3)


def db_to_linear(x_db: float) -> float:
    """Convert a ratio in dB to a linear ratio."""
    if not math.isfinite(x_db):
        raise ValueError(f"ratio in dB must be finite, got {x_db!r}")
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a linear ratio to dB.  Rejects non-positive input."""
    if not (math.isfinite(x) and x > 0.0):
        raise ValueError(f"linear ratio must be finite and positive, got {x!r}")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemConfig:
    """All scalar parameters of one run; immutable after validation.

    Defaults reproduce the baseline two-user setup: equal user powers,
    equal user-RIS distances, and an equally partitioned 512+512 RIS.
    """

    # transmit powers
    pt_user_dbm: float = 15.0    # per-user transmit power P_t [dBm]
    pt_ris_dbm: float = -47.0    # power budget of the active RIS part [dBm]

    # amplification of the active partition
    alpha_mode: str = "fixed"    # fixed | from_power | optimized
    alpha_linear: float = 8.5    # power gain per active element, used when fixed
    g_max_db: float = 30.0       # amplifier power-gain cap [dB]
    pa_efficiency: float = 1.0   # PA efficiency nu in (0, 1]

    # RIS partition sizes and role assignment
    m_active: int = 512          # active elements M
    n_passive: int = 512         # passive elements N
    active_user: int = 1         # user served (aligned + amplified) by the active part

    # QoS and SIC
    rate_threshold_bps_hz: float = 2.0  # target rate per user [bps/Hz]
    epsilon_sic: float = 0.0            # residual fraction of imperfectly cancelled power
    joint_outage_u2: bool = False       # non-default: SIC user also fails when the first decode fails

    # noise
    w0_dbm: float = -130.0       # AWGN power W_0 [dBm]
    namp_dbm: float = -130.0     # per-element amplifier noise power sigma_z^2 [dBm]

    # propagation geometry
    fc_ghz: float = 5.0
    d_u1_ris_m: float = 35.51
    d_u2_ris_m: float = 35.51
    d_ris_bs_m: float = 20.22
    # stored for documentation only; the path loss model takes a single distance
    # per link and the direct user-BS links are blocked
    d_u1_bs_m: float = 55.73
    d_u2_bs_m: float = 55.73
    h_u1_m: float = 10.0
    h_u2_m: float = 10.0
    h_ris_m: float = 4.0
    h_bs_m: float = 1.0

    # per-link variance overrides (test hook); None means "use the path loss model"
    sigma2_u1: float | None = None   # user1 -> RIS element variance (linear)
    sigma2_u2: float | None = None   # user2 -> RIS element variance (linear)
    sigma2_bs: float | None = None   # RIS element -> BS variance (linear)

    # Monte-Carlo settings
    mc_trials: int = 100_000
    seed: int = 20260810

    # Gil-Pelaez quadrature settings
    quad_tol: float = 1e-6       # target absolute error of the CDF integral
    quad_omega_max: float = 0.0  # truncation limit; 0 selects automatic extension

    def digest(self) -> str:
        """Short stable hash of the full configuration."""
        payload = json.dumps(
            {f.name: getattr(self, f.name) for f in fields(self)}, sort_keys=True
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


def validate(config: SystemConfig) -> SystemConfig:
    """Validate a configuration, clamping the amplifier gain if needed.

    Returns a (possibly adjusted) config.  Raises :class:`ConfigError` with
    every violated invariant.  Clamping emits a :class:`ConfigWarning`.
    Idempotent: validating a validated config is a no-op.
    """
    problems = []

    if config.m_active < 1:
        problems.append(f"m_active must be >= 1, got {config.m_active}")
    if config.n_passive < 1:
        problems.append(f"n_passive must be >= 1, got {config.n_passive}")
    if config.mc_trials < 1:
        problems.append(f"mc_trials must be >= 1, got {config.mc_trials}")
    if config.active_user not in (1, 2):
        problems.append(f"active_user must be 1 or 2, got {config.active_user}")
    if config.alpha_mode not in ALPHA_MODES:
        problems.append(f"alpha_mode must be one of {ALPHA_MODES}, got {config.alpha_mode!r}")
    if not (0.0 <= config.epsilon_sic <= 1.0):
        problems.append(f"epsilon_sic must be in [0, 1], got {config.epsilon_sic}")
    if not (0.0 < config.pa_efficiency <= 1.0):
        problems.append(f"pa_efficiency must be in (0, 1], got {config.pa_efficiency}")
    if config.rate_threshold_bps_hz < 0.0:
        problems.append(f"rate_threshold_bps_hz must be >= 0, got {config.rate_threshold_bps_hz}")
    if not (math.isfinite(config.alpha_linear) and config.alpha_linear > 0.0):
        problems.append(f"alpha_linear must be finite and positive, got {config.alpha_linear}")
    if not (math.isfinite(config.g_max_db) and config.g_max_db > 0.0):
        problems.append(f"g_max_db must be finite and positive, got {config.g_max_db}")

    lo, hi = FC_RANGE_GHZ
    if not (lo <= config.fc_ghz <= hi):
        problems.append(f"fc_ghz must be in [{lo}, {hi}], got {config.fc_ghz}")
    dlo, dhi = DISTANCE_RANGE_M
    for name in ("d_u1_ris_m", "d_u2_ris_m", "d_ris_bs_m", "d_u1_bs_m", "d_u2_bs_m"):
        d = getattr(config, name)
        if not (dlo <= d <= dhi):
            problems.append(f"{name} must be in [{dlo}, {dhi}] m, got {d}")

    for name in ("sigma2_u1", "sigma2_u2", "sigma2_bs"):
        v = getattr(config, name)
        if v is not None and not (math.isfinite(v) and v > 0.0):
            problems.append(f"{name} must be None or a positive finite variance, got {v}")

    if not (0 <= config.seed < 2**64):
        problems.append(f"seed must be a 64-bit unsigned integer, got {config.seed}")
    if not (math.isfinite(config.quad_tol) and config.quad_tol > 0.0):
        problems.append(f"quad_tol must be positive, got {config.quad_tol}")
    if config.quad_omega_max < 0.0:
        problems.append(f"quad_omega_max must be >= 0 (0 = automatic), got {config.quad_omega_max}")

    if problems:
        raise ConfigError(problems)

    out = config
    if not (ALPHA_MIN <= config.alpha_linear <= ALPHA_MAX):
        clamped = min(max(config.alpha_linear, ALPHA_MIN), ALPHA_MAX)
        warnings.warn(
            f"alpha_linear={config.alpha_linear} outside [{ALPHA_MIN}, {ALPHA_MAX}], "
            f"clamped to {clamped}",
            ConfigWarning,
            stacklevel=2,
        )
        out = replace(out, alpha_linear=clamped)
    if config.g_max_db > 30.0:
        warnings.warn(
            f"g_max_db={config.g_max_db} above the 30 dB amplifier cap, clamped",
            ConfigWarning,
            stacklevel=2,
        )
        out = replace(out, g_max_db=30.0)
    return out


# ---------------------------------------------------------------------------
# config file / override parsing

_INT_KEYS = {"m_active", "n_passive", "active_user", "mc_trials", "seed"}
_BOOL_KEYS = {"joint_outage_u2"}
_STR_KEYS = {"alpha_mode"}
_OPTIONAL_KEYS = {"sigma2_u1", "sigma2_u2", "sigma2_bs"}
_ALL_KEYS = {f.name for f in fields(SystemConfig)}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _OPTIONAL_KEYS and raw.lower() in ("none", ""):
        return None
    if key in _STR_KEYS:
        return raw
    if key in _BOOL_KEYS:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"{key}: expected a boolean, got {raw!r}")
    if key in _INT_KEYS:
        val = float(raw)
        if val != int(val):
            raise ValueError(f"{key}: expected an integer, got {raw!r}")
        return int(val)
    return float(raw)


def parse_config_text(text: str, base: SystemConfig | None = None) -> SystemConfig:
    """Parse `key = value` lines into a config.  Unknown keys are errors."""
    values = {}
    problems = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            problems.append(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
            continue
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        try:
            values[key] = _parse_value(key, raw)
        except ValueError as exc:
            problems.append(f"line {lineno}: {exc}")
    if problems:
        raise ConfigError(problems)
    return replace(base if base is not None else SystemConfig(), **values)


def load_config(path, base: SystemConfig | None = None) -> SystemConfig:
    """Load a flat key/value config file (UTF-8, `#` comments)."""
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), base=base)


def apply_overrides(config: SystemConfig, pairs) -> SystemConfig:
    """Apply `key=value` override strings (CLI `--set`) on top of a config."""
    values = {}
    problems = []
    for pair in pairs:
        if "=" not in pair:
            problems.append(f"override {pair!r}: expected key=value")
            continue
        key, raw = (part.strip() for part in pair.split("=", 1))
        if key not in _ALL_KEYS:
            problems.append(f"override {pair!r}: unknown key {key!r}")
            continue
        try:
            values[key] = _parse_value(key, raw)
        except ValueError as exc:
            problems.append(f"override {pair!r}: {exc}")
    if problems:
        raise ConfigError(problems)
    return replace(config, **values)

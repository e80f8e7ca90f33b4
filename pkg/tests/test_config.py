import math
import warnings
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import risnoma as rn
from risnoma.config import ALPHA_MAX, ALPHA_MIN


class TestUnits:
    def test_dbm_to_watt_definition(self):
        assert rn.dbm_to_watt(0.0) == pytest.approx(1e-3, rel=1e-15)

    def test_dbm_to_watt_values(self):
        # direct evaluation: 10^1.5 mW and 10^-13 mW
        assert rn.dbm_to_watt(15.0) == pytest.approx(3.1622776601683795e-2, rel=1e-12)
        assert rn.dbm_to_watt(-130.0) == pytest.approx(1e-16, rel=1e-12)

    def test_db_to_linear(self):
        assert rn.db_to_linear(0.0) == 1.0
        assert rn.db_to_linear(30.0) == pytest.approx(1000.0, rel=1e-12)
        assert rn.linear_to_db(8.5) == pytest.approx(9.294189257142926, rel=1e-12)

    def test_rejects_bad_input(self):
        for bad in (float("nan"), float("inf")):
            with pytest.raises(ValueError):
                rn.dbm_to_watt(bad)
            with pytest.raises(ValueError):
                rn.db_to_linear(bad)
        for nonpos in (0.0, -1.0):
            with pytest.raises(ValueError):
                rn.linear_to_db(nonpos)
            with pytest.raises(ValueError):
                rn.watt_to_dbm(nonpos)

    @given(st.floats(min_value=-200.0, max_value=50.0))
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, p_dbm):
        back = rn.watt_to_dbm(rn.dbm_to_watt(p_dbm))
        assert math.isclose(back, p_dbm, rel_tol=1e-12, abs_tol=1e-12)

    @given(st.floats(min_value=-120.0, max_value=120.0))
    @settings(max_examples=200, deadline=None)
    def test_db_round_trip(self, x_db):
        back = rn.linear_to_db(rn.db_to_linear(x_db))
        assert math.isclose(back, x_db, rel_tol=1e-12, abs_tol=1e-12)


class TestValidate:
    def test_defaults_accepted_unchanged(self):
        cfg = rn.SystemConfig()
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            out = rn.validate(cfg)
        assert out == cfg

    def test_alpha_clamped_with_warning(self):
        cfg = rn.SystemConfig(alpha_linear=2000.0)
        with pytest.warns(rn.ConfigWarning):
            out = rn.validate(cfg)
        assert out.alpha_linear == ALPHA_MAX

    def test_alpha_floor(self):
        with pytest.warns(rn.ConfigWarning):
            out = rn.validate(rn.SystemConfig(alpha_linear=0.3))
        assert out.alpha_linear == ALPHA_MIN

    def test_out_of_range_frequency_rejected(self):
        with pytest.raises(rn.ConfigError, match="fc_ghz"):
            rn.validate(rn.SystemConfig(fc_ghz=1.0))

    def test_out_of_range_distance_rejected(self):
        with pytest.raises(rn.ConfigError, match="d_u1_ris_m"):
            rn.validate(rn.SystemConfig(d_u1_ris_m=5.0))

    def test_errors_aggregate(self):
        try:
            rn.validate(rn.SystemConfig(fc_ghz=1.0, m_active=0, epsilon_sic=2.0))
        except rn.ConfigError as exc:
            assert len(exc.problems) == 3
        else:
            pytest.fail("expected ConfigError")

    def test_idempotent(self):
        with pytest.warns(rn.ConfigWarning):
            once = rn.validate(rn.SystemConfig(alpha_linear=5000.0))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            twice = rn.validate(once)
        assert twice == once

    def test_bad_alpha_mode(self):
        with pytest.raises(rn.ConfigError, match="alpha_mode"):
            rn.validate(rn.SystemConfig(alpha_mode="auto"))

    def test_sigma_override_must_be_positive(self):
        with pytest.raises(rn.ConfigError, match="sigma2_u1"):
            rn.validate(rn.SystemConfig(sigma2_u1=-1.0))


class TestConfigFile:
    def test_parse_round_trip(self):
        text = """
        # sweep base
        pt_user_dbm = 12.5
        m_active = 256
        alpha_mode = from_power
        sigma2_u1 = none
        joint_outage_u2 = false
        seed = 42
        """
        cfg = rn.parse_config_text(text)
        assert cfg.pt_user_dbm == 12.5
        assert cfg.m_active == 256
        assert cfg.alpha_mode == "from_power"
        assert cfg.sigma2_u1 is None
        assert cfg.seed == 42

    def test_unknown_key_is_error(self):
        with pytest.raises(rn.ConfigError, match="unknown key"):
            rn.parse_config_text("pt_userr_dbm = 15\n")

    def test_bad_value_reported_with_line(self):
        with pytest.raises(rn.ConfigError, match="line 1"):
            rn.parse_config_text("m_active = many\n")

    def test_load_config(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("rate_threshold_bps_hz = 3.0\n# comment\n")
        cfg = rn.load_config(path)
        assert cfg.rate_threshold_bps_hz == 3.0

    def test_apply_overrides(self):
        cfg = rn.apply_overrides(rn.SystemConfig(), ["pt_ris_dbm=-40", "mc_trials=500"])
        assert cfg.pt_ris_dbm == -40.0
        assert cfg.mc_trials == 500

    def test_override_unknown_key(self):
        with pytest.raises(rn.ConfigError, match="unknown key"):
            rn.apply_overrides(rn.SystemConfig(), ["nope=1"])


class TestDigest:
    def test_stable_and_sensitive(self):
        a = rn.SystemConfig()
        b = rn.SystemConfig()
        assert a.digest() == b.digest()
        assert a.digest() != replace(a, seed=1).digest()

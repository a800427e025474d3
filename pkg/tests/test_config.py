"""
Tests for settings loading
"""
from f3dc.config import Settings, get_settings


def test_defaults(monkeypatch):
    for key in ("F3DC_THREADS", "F3DC_DSP_TOTAL", "F3DC_DEBUG"):
        monkeypatch.delenv(key, raising=False)
    s = Settings(_env_file=None)
    assert s.threads == 1
    assert (s.fpu_count, s.multipliers_per_fpu, s.dsp_total) == (4, 512, 2048)
    assert s.clock_hz == 150e6
    assert s.strict_checks is True
    assert s.log_level == "INFO"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("F3DC_THREADS", "8")
    monkeypatch.setenv("F3DC_DEBUG", "true")
    monkeypatch.setenv("f3dc_dsp_total", "1536")
    s = Settings(_env_file=None)
    assert s.threads == 8
    assert s.dsp_total == 1536
    assert s.log_level == "DEBUG"


def test_env_file(tmp_path, monkeypatch):
    monkeypatch.delenv("F3DC_SEED", raising=False)
    env = tmp_path / ".env"
    env.write_text("F3DC_SEED=42\nF3DC_LOG_FORMAT=console\n")
    s = Settings(_env_file=env)
    assert s.seed == 42
    assert s.log_format == "console"


def test_settings_are_cached():
    assert get_settings() is get_settings()

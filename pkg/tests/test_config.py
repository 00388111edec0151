from app.config import Settings, _env_bool, _env_float, _env_int


def test_env_helpers(monkeypatch):
    monkeypatch.setenv("BL_TEST_INT", "12")
    monkeypatch.setenv("BL_TEST_FLOAT", "2.5e-3")
    monkeypatch.setenv("BL_TEST_BOOL", "Yes")
    monkeypatch.delenv("BL_TEST_MISSING", raising=False)
    assert _env_int("BL_TEST_INT", 1) == 12
    assert _env_float("BL_TEST_FLOAT", 1.0) == 0.0025
    assert _env_bool("BL_TEST_BOOL", False) is True
    assert _env_int("BL_TEST_MISSING", 5) == 5
    assert _env_bool("BL_TEST_MISSING", True) is True


def test_effective_threads():
    assert Settings(threads=3).effective_threads == 3
    assert 1 <= Settings(threads=0).effective_threads <= 8


def test_derived_configs():
    settings = Settings(solver_abs_tol=1e-10, solver_max_iter=50, grid_points_per_unit=128, grid_half_width=5.0)
    cfg = settings.solver_config()
    assert cfg.abs_tol == 1e-10
    assert cfg.max_iter == 50
    grid = settings.grid_spec()
    assert grid.points_per_unit == 128
    assert grid.half_width == 5.0


def test_redacted_lists_every_setting():
    view = Settings(threads=2, baseline_cache="b.json").redacted()
    assert view["threads"] == 2
    assert view["baseline_cache"] == "b.json"
    assert set(view) >= {"dev_mode", "rng_seed", "tail_tol", "mc_chunk", "noise_base"}

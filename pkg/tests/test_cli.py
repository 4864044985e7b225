import numpy as np
import pytest

from double_lambda.cli import (
    CSV_COLUMNS,
    ParseError,
    ValidationError,
    emit_csv,
    figure_runs,
    main,
    parse_config,
    parse_initial,
)
from double_lambda.coefficients import GainCoefficients
from double_lambda.moments import initial_moments_fock, integrate


def test_defaults_with_subcommand_mode():
    cfg = parse_config("", default_mode="evolve")
    assert cfg.mode == "evolve"
    assert cfg.initial == ("fock", 0, 0)
    assert cfg.t_max == 10.0 and cfg.dt == 1e-3 and cfg.stride == 100
    assert cfg.system.g1 == 1.0 and cfg.system.pump.omega1 == 0.0


def test_full_config_with_sections_and_comments():
    text = """
    [system]                 # grouping only
    g1 = 1.0
    delta_a = 50             # comments strip
    delta_b = 20
    delta = 10
    kappa1 = 0.01
    kappa2 = 0.01
    [pump]
    omega1 = 5
    omega2 = 5
    r_in = 20
    [run]
    initial = fock:1,0
    t_max = 20
    """
    cfg = parse_config(text, default_mode="evolve")
    assert cfg.system.delta_a == 50.0 and cfg.system.delta == 10.0
    assert cfg.system.pump.omega1 == 5.0 and cfg.system.pump.r_in == 20.0
    # channel detunings always derive from the optical ones
    assert cfg.system.pump.delta1 == 40.0 and cfg.system.pump.delta2 == 10.0
    assert cfg.initial == ("fock", 1, 0) and cfg.t_max == 20.0


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError, match="line 2"):
        parse_config("g1 = 1\nwhat is this\n", default_mode="evolve")
    with pytest.raises(ParseError, match="line 1"):
        parse_config("[bad section!]", default_mode="evolve")


def test_key_validation():
    with pytest.raises(ValidationError, match="'g1': duplicated"):
        parse_config("g1 = 1\ng1 = 2", default_mode="evolve")
    with pytest.raises(ValidationError, match="'coupling': unknown"):
        parse_config("coupling = 3", default_mode="evolve")
    with pytest.raises(ValidationError, match="conflicts"):
        parse_config("mode = sweep", default_mode="evolve")
    with pytest.raises(ValidationError, match="'mode': missing"):
        parse_config("g1 = 1")
    with pytest.raises(ValidationError, match="'gamma'"):
        parse_config("gamma = fast", default_mode="evolve")
    with pytest.raises(ValidationError, match="t_max"):
        parse_config("t_max = -3", default_mode="evolve")
    with pytest.raises(ValidationError, match="'figure': required"):
        parse_config("mode = figure")


def test_sweep_axis_validation():
    cfg = parse_config("param = omega\nvalues = 4, 5, 6",
                       default_mode="sweep")
    assert cfg.sweep_param == "omega"
    assert cfg.sweep_values == [4.0, 5.0, 6.0]
    cfg = parse_config("param = kappa1\nvalues = 0.01", default_mode="sweep")
    assert cfg.sweep_param == "kappa1"
    with pytest.raises(ValidationError, match="not a sweep axis"):
        parse_config("param = cutoff\nvalues = 1", default_mode="sweep")
    with pytest.raises(ValidationError, match="required for sweep"):
        parse_config("param = omega", default_mode="sweep")
    # non-sweep modes ignore the axis entirely
    assert parse_config("", default_mode="evolve").sweep_param is None


def test_parse_initial():
    assert parse_initial("fock:3,1") == ("fock", 3, 1)
    kind, b1, b2 = parse_initial("coherent: 1+i, -0.5i")
    assert kind == "coherent"
    assert b1 == 1 + 1j and b2 == -0.5j
    for bad in ("fock:1", "thermal:2,2", "fock:a,b", "coherent:1"):
        with pytest.raises(ValidationError):
            parse_initial(bad)


def test_csv_is_deterministic_and_complete(tmp_path):
    series = integrate(initial_moments_fock(1, 0),
                       GainCoefficients(0, 0, 0, 0, 0.01, 0.0), 0.2)
    p1 = emit_csv(series, tmp_path / "a.csv")
    p2 = emit_csv(series, tmp_path / "b.csv")
    b1, b2 = open(p1, "rb").read(), open(p2, "rb").read()
    assert b1 == b2
    lines = b1.decode().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 3          # header + t = 0, 0.1, 0.2
    row = lines[1].split(",")
    assert len(row) == 4 + 26
    assert float(row[0]) == 0.0 and float(row[1]) == 1.0
    # full double precision round-trips
    assert float(lines[3].split(",")[1]) == np.exp(-0.02 * 0.2) * 1.0 \
        or abs(float(lines[3].split(",")[1]) - np.exp(-0.004)) <= 1e-12


def test_figure_presets_pin_published_parameters():
    runs = figure_runs("fig3")
    assert [name for name, *_ in runs] == ["fig3_omega4", "fig3_omega5",
                                           "fig3_omega6"]
    for (name, system, initial, t_max), om in zip(runs, (4.0, 5.0, 6.0)):
        assert system.pump.omega1 == om and system.pump.omega2 == om
        assert (system.delta_a, system.delta_b, system.delta) == (50.0, 20.0, 10.0)
        assert system.kappa1 == 0.01 and system.pump.r_in == 20.0
        assert initial == ("fock", 1, 0) and t_max == 20.0

    runs = figure_runs("fig2")
    assert [name for name, *_ in runs] == ["fig2", "fig2_resonant"]
    assert runs[0][1].delta == 4.0 and runs[1][1].delta == 50.0
    assert runs[0][2] == ("fock", 10, 0)

    runs = figure_runs("fig5")
    assert [(s.kappa1, s.pump.omega1) for _, s, _, _ in runs] \
        == [(0.01, 4.0), (0.1, 4.0), (0.1, 6.0)]
    for _, system, initial, t_max in runs:
        assert system.pump.r_in == 30.0
        assert initial == ("fock", 10, 0) and t_max == 15.0

    assert [n for n, *_ in figure_runs("fig4")] == ["fig4_omega4",
                                                    "fig4_omega5",
                                                    "fig4_omega6"]
    with pytest.raises(ValidationError):
        figure_runs("fig9")


def test_main_evolve_writes_csv(tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("omega1 = 2\nomega2 = 2\nkappa1 = 0.01\n"
                       "initial = fock:1,0\nt_max = 0.2\n")
    rc = main(["evolve", "--config", str(cfgfile), "--out", str(tmp_path)])
    assert rc == 0
    out = (tmp_path / "evolve.csv").read_text().splitlines()
    assert out[0].startswith("t,N1,N2,E,re_n1")
    assert len(out) == 4


def test_main_sweep_one_file_per_value(tmp_path):
    cfgfile = tmp_path / "sweep.cfg"
    cfgfile.write_text("param = omega\nvalues = 1,2\nt_max = 0.1\n"
                       "delta_a = 50\ndelta_b = 20\ndelta = 10\n")
    rc = main(["sweep", "--config", str(cfgfile), "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "sweep_omega_1.csv").exists()
    assert (tmp_path / "sweep_omega_2.csv").exists()


def test_main_figure_with_short_override(tmp_path):
    rc = main(["figure", "fig3", "--out", str(tmp_path), "--t-max", "0.2"])
    assert rc == 0
    for om in (4, 5, 6):
        lines = (tmp_path / f"fig3_omega{om}.csv").read_text().splitlines()
        assert len(lines) == 4


def test_main_coeffs_reports_regime(tmp_path, capsys):
    cfgfile = tmp_path / "c.cfg"
    cfgfile.write_text("omega1 = 5\nomega2 = 5\nr_in = 20\n")
    assert main(["coeffs", "--config", str(cfgfile)]) == 0
    out = capsys.readouterr().out
    assert "alpha1" in out and "regime: RESONANT_REAL" in out
    assert "rho_dd = +1.004975124378e+01" in out  # 2020/201


def test_main_error_paths(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    assert main(["evolve", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "unknown" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["validate", "everything"])


def test_main_validate_steady_passes(capsys):
    assert main(["validate", "steady"]) == 0
    out = capsys.readouterr().out
    assert "steady: 0 failure(s)" in out
    assert "[FAIL]" not in out

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metriplectic_rom import (
    GridMismatchError,
    ReportRow,
    Trajectory,
    emit_report,
    energy_drift,
    error_metrics,
    parse_report,
)
from metriplectic_rom.matio import read_matrix, write_matrix
from metriplectic_rom.metrics import energy_samples, entropy_samples
from metriplectic_rom.plots import emit_plots


def make_traj(states, dt=1.0):
    states = np.asarray(states, dtype=float)
    return Trajectory(dt * np.arange(states.shape[0]), states)


def test_error_metrics_identical():
    traj = make_traj(np.random.default_rng(0).standard_normal((5, 3)))
    rel, mx = error_metrics(traj, traj)
    assert rel == 0.0 and mx == 0.0


def test_error_metrics_constant_offset():
    rng = np.random.default_rng(1)
    states = rng.standard_normal((6, 4))
    c = 0.25
    offset = make_traj(states + c)
    rel, mx = error_metrics(make_traj(states), offset)
    norm_c = c * 2.0  # ||c * ones(4)||
    assert mx == pytest.approx(norm_c, rel=1e-12)
    expected_rel = np.sqrt(6 * norm_c**2 / np.sum(np.linalg.norm(states, axis=1) ** 2))
    assert rel == pytest.approx(expected_rel, rel=1e-12)


def test_error_metrics_grid_mismatch():
    a = make_traj(np.zeros((3, 2)))
    b = make_traj(np.zeros((3, 2)), dt=0.5)
    with pytest.raises(GridMismatchError):
        error_metrics(a, b)


def test_energy_drift_with_lift(gas):
    states = np.array([[0.0, 0.0], [0.1, -0.2]])
    traj = make_traj(states)
    x0 = np.array([0.9, -0.4, 2.4, 2.0])
    U = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    lifted_drift = energy_drift(gas, traj, lift=lambda xh: x0 + U @ xh)
    direct = abs(gas.energy(x0 + U @ states[-1]) - gas.energy(x0))
    assert lifted_drift == pytest.approx(direct, rel=1e-14)


def test_energy_entropy_samples(gas):
    grid_states = np.array([[0.9, -0.4, 2.4, 2.0], [1.0, 0.0, 2.0, 2.0]])
    traj = make_traj(grid_states)
    npt.assert_allclose(
        energy_samples(gas, traj), [gas.energy(grid_states[0]), gas.energy(grid_states[1])]
    )
    npt.assert_allclose(entropy_samples(gas, traj), [4.4, 4.0])


finite = st.floats(min_value=0.0, max_value=1e12, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.sampled_from(["FOM", "SP-ROM", "EH-ROM", "G-ROM"]),
            st.one_of(st.none(), st.integers(1, 500)),
            st.floats(min_value=0.01, max_value=512.0, allow_nan=False),
            finite,
            finite,
            finite,
            finite,
        ),
        min_size=1,
        max_size=6,
    )
)
def test_csv_round_trip_finite_rows(rows_spec):
    rows = [
        ReportRow(method, n, T, rel, mx, drift, wall, True)
        for method, n, T, rel, mx, drift, wall in rows_spec
    ]
    assert parse_report(emit_report(rows, "csv")) == rows


def test_csv_fom_row_has_empty_n_and_dashes():
    rows = [ReportRow("FOM", None, 8.0, None, None, 5.5e-14, 0.07, True)]
    text = emit_report(rows, "csv")
    line = text.splitlines()[1]
    assert line.startswith("FOM,,8.0,-,-,")
    parsed = parse_report(text)[0]
    assert parsed.n is None and parsed.rel_err_pct is None and parsed.max_err is None


def test_csv_non_converged_row_renders_dashes():
    row = ReportRow("G-ROM", 2, 32.0, None, None, None, 1.2, False, last_good_time=17.4)
    text = emit_report([row], "csv")
    assert ",-,-,-," in text and text.strip().endswith("false")
    parsed = parse_report(text)[0]
    assert not parsed.converged
    assert parsed.energy_drift is None


def test_report_validation():
    with pytest.raises(ValueError):
        emit_report([], "csv")
    with pytest.raises(ValueError):
        emit_report([ReportRow("FOM", None, 8.0, None, None, 0.0, 0.0, True)], "html")
    with pytest.raises(ValueError):
        ReportRow("FOM", None, 8.0, -0.1, None, 0.0, 0.0, True)
    with pytest.raises(ValueError):
        parse_report("not,a,header\n")


def test_aligned_table_format():
    rows = [
        ReportRow("FOM", None, 8.0, None, None, 5.5e-14, 0.07, True),
        ReportRow("SP-ROM", 2, 8.0, 15.84, 0.9166, 1.066e-13, 0.014, True),
        ReportRow("G-ROM", 2, 32.0, None, None, None, 0.5, False),
    ]
    table = emit_report(rows, "aligned-table")
    lines = table.splitlines()
    assert lines[0].split()[:3] == ["method", "n", "T"]
    assert "NO" in lines[3]


def test_matrix_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    M = rng.standard_normal((7, 3))
    path = write_matrix(tmp_path / "m.mplx", M)
    npt.assert_array_equal(read_matrix(path), M)
    raw = path.read_bytes()
    assert raw[:4] == b"MPLX"
    assert len(raw) == 16 + 8 * 21


def test_matrix_io_rejects_corruption(tmp_path):
    path = write_matrix(tmp_path / "m.mplx", np.eye(2))
    raw = bytearray(path.read_bytes())
    raw[:4] = b"XXXX"
    bad = tmp_path / "bad.mplx"
    bad.write_bytes(bytes(raw))
    with pytest.raises(ValueError, match="magic"):
        read_matrix(bad)
    truncated = tmp_path / "short.mplx"
    truncated.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="size"):
        read_matrix(truncated)
    with pytest.raises(ValueError):
        write_matrix(tmp_path / "v.mplx", np.zeros(3))


def test_emit_plots_writes_svg(tmp_path, gas):
    times = np.linspace(0.0, 1.0, 11)
    states = np.tile(np.array([0.9, -0.4, 2.4, 2.0]), (11, 1))
    states[:, 0] += 0.01 * times
    labeled = [("FOM", Trajectory(times, states))]
    paths = emit_plots(
        gas,
        labeled,
        ("state-component", "entropy", "energy-deviation", "phase-portrait", "singular-values"),
        tmp_path,
        singular_values=np.array([5.0, 1.0, 0.1]),
        prefix="t_",
    )
    assert len(paths) == 5
    for p in paths:
        text = p.read_text()
        assert "<svg" in text and p.stat().st_size > 500


def test_emit_plots_validation(tmp_path, gas):
    with pytest.raises(ValueError, match="at least one"):
        emit_plots(gas, [], ("entropy",), tmp_path)
    traj = Trajectory(np.array([0.0, 1.0]), np.tile([0.9, -0.4, 2.4, 2.0], (2, 1)))
    with pytest.raises(ValueError, match="unknown"):
        emit_plots(gas, [("FOM", traj)], ("volume",), tmp_path)
    with pytest.raises(ValueError, match="spectrum"):
        emit_plots(gas, [("FOM", traj)], ("singular-values",), tmp_path)
    assert not list(tmp_path.iterdir())  # errors leave no files behind


def test_error_metrics_triangle_bound():
    # with the common reference denominator, rel(x, z) obeys the triangle
    # bound rel(x, y) + sqrt(sum ||y - z||^2 / sum ||x||^2)
    rng = np.random.default_rng(8)
    x = make_traj(rng.standard_normal((9, 5)))
    y = make_traj(x.states + 0.1 * rng.standard_normal((9, 5)))
    z = make_traj(y.states + 0.1 * rng.standard_normal((9, 5)))
    denom = np.sum(np.linalg.norm(x.states, axis=1) ** 2)
    cross = np.sqrt(np.sum(np.linalg.norm(y.states - z.states, axis=1) ** 2) / denom)
    assert error_metrics(x, z).rel <= error_metrics(x, y).rel + cross + 1e-15

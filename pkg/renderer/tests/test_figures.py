import numpy as np
import pytest

from walkplot.cli import EXIT_OK, EXIT_SCHEMA, EXIT_USAGE, cli_dispatch
from walkplot.figures import FigureSpec, render

HEADERS = {
    "estimates": "n,observable,mean,stderr,trials,aborted",
    "rate": "observable,eta_hat,c_hat,r2,eta_lo,eta_hi,n_min,n_max",
    "tails": "n,prob,lo,hi,trials",
    "density": "bin_lo,bin_hi,hist_mass,analytic_mass,density",
}


def estimates_csv(tmp_path, haar=7.0686, eta=0.3, c=4.0):
    rows = [HEADERS["estimates"]]
    for n in range(2, 42, 2):
        rows.append(f"{n},siegel_count[R=1.5],{haar + c * np.exp(-eta * n)},"
                    f"0.01,1000,0")
    p = tmp_path / "estimates.csv"
    p.write_text("\n".join(rows) + "\n")
    return p


def rate_csv(tmp_path, eta=0.3, c=4.0):
    p = tmp_path / "rate.csv"
    p.write_text(HEADERS["rate"] + "\n"
                 f"siegel_count[R=1.5],{eta},{c},0.999,0.25,0.35,2,40\n")
    return p


def tails_csv(tmp_path, name="tails.csv", with_zero=False):
    rows = [HEADERS["tails"], "10,0.17,0.165,0.175,100000",
            "20,0.05,0.048,0.052,100000"]
    if with_zero:
        rows.append("40,0,0,3.7e-05,100000")
    p = tmp_path / name
    p.write_text("\n".join(rows) + "\n")
    return p


def test_convergence_figure_with_fit(tmp_path):
    out = tmp_path / "conv.png"
    spec = FigureSpec(kind="convergence",
                      inputs=(estimates_csv(tmp_path),),
                      out=str(out), haar_mean=7.0686,
                      rate_path=str(rate_csv(tmp_path)))
    assert render(spec) == str(out)
    assert out.stat().st_size > 1000


def test_convergence_figure_raw_means(tmp_path):
    out = tmp_path / "raw.png"
    render(FigureSpec(kind="convergence", inputs=(estimates_csv(tmp_path),),
                      out=str(out)))
    assert out.exists()


def test_tails_figure_multiple_inputs_and_zero_rows(tmp_path):
    out = tmp_path / "tails.png"
    render(FigureSpec(
        kind="tails",
        inputs=(tails_csv(tmp_path), tails_csv(tmp_path, "b.csv", True)),
        out=str(out)))
    assert out.exists()


def test_lyapunov_figure(tmp_path):
    p = tmp_path / "lyap.csv"
    rows = [HEADERS["estimates"]]
    rng = np.random.default_rng(0)
    for i in range(100):
        rows.append(f"{i},lyapunov[v00],{1.0 + 0.05 * rng.standard_normal()},"
                    f"0,1,0")
    p.write_text("\n".join(rows) + "\n")
    out = tmp_path / "lyap.png"
    render(FigureSpec(kind="lyapunov", inputs=(str(p),), out=str(out)))
    assert out.exists()


def test_density_figure(tmp_path):
    p = tmp_path / "density.csv"
    rows = [HEADERS["density"]]
    edges = np.linspace(0.0, 1.0, 21)
    for lo, hi in zip(edges[:-1], edges[1:]):
        y = 0.5 * (lo + hi)
        rows.append(f"{lo},{hi},{np.sqrt(hi) - np.sqrt(lo)},"
                    f"{np.sqrt(hi) - np.sqrt(lo)},{0.5 / np.sqrt(y)}")
    p.write_text("\n".join(rows) + "\n")
    out = tmp_path / "density.png"
    render(FigureSpec(kind="density", inputs=(str(p),), out=str(out)))
    assert out.exists()


def test_header_only_gives_no_data_figure_exit_zero(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text(HEADERS["tails"] + "\n")
    out = tmp_path / "empty.png"
    code = cli_dispatch(["--kind", "tails", "--in", str(p),
                         "--out", str(out)])
    assert code == EXIT_OK
    assert out.exists()


def test_schema_mismatch_exit_names_column(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("n,probability,lo,hi,trials\n1,0.5,0.4,0.6,10\n")
    code = cli_dispatch(["--kind", "tails", "--in", str(p),
                         "--out", str(tmp_path / "x.png")])
    assert code == EXIT_SCHEMA
    assert "'probability'" in capsys.readouterr().err


def test_missing_input_is_error(tmp_path):
    code = cli_dispatch(["--kind", "tails", "--in", str(tmp_path / "no.csv"),
                         "--out", str(tmp_path / "x.png")])
    assert code == EXIT_SCHEMA


def test_usage_errors():
    assert cli_dispatch([]) == EXIT_USAGE
    assert cli_dispatch(["--kind", "pie", "--in", "x", "--out", "y"]) \
        == EXIT_USAGE


def test_render_is_deterministic(tmp_path):
    src = estimates_csv(tmp_path)
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    for out in (a, b):
        render(FigureSpec(kind="convergence", inputs=(src,), out=str(out),
                          haar_mean=7.0686))
    assert a.read_bytes() == b.read_bytes()


def test_figure_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec(kind="pie", inputs=("x",), out="y")
    with pytest.raises(ValueError):
        FigureSpec(kind="tails", inputs=(), out="y")

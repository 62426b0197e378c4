import numpy as np
import pytest

from wgstokes.cli import main
from wgstokes.convergence import ConvergenceReport


def test_mesh_gen_and_euler(tmp_path, capsys):
    path = str(tmp_path / "m.json")
    assert main(["mesh", "gen", "rectangular", "4", "-o", path]) == 0
    assert main(["euler-check", "-m", path]) == 0
    out = capsys.readouterr().out
    assert "OK" in out


def test_euler_hanging_message(tmp_path, capsys):
    path = str(tmp_path / "h.json")
    assert main(["mesh", "gen", "hanging", "4", "-o", path]) == 0
    assert main(["euler-check", "-m", path]) == 0
    assert "hanging nodes counted as vertices" in capsys.readouterr().out


def test_verify_basis(tmp_path, capsys):
    path = str(tmp_path / "hex.json")
    assert main(["mesh", "gen", "hex", "2", "2", "2", "-o", path]) == 0
    assert main(["verify-basis", "-m", path, "--3d"]) == 0
    out = capsys.readouterr().out
    assert "dim = 125" in out
    assert "rank OK" in out


def test_verify_basis_wrong_dim(tmp_path, capsys):
    path = str(tmp_path / "m.json")
    main(["mesh", "gen", "rectangular", "2", "-o", path])
    assert main(["verify-basis", "-m", path, "--3d"]) == 1


def test_solve_with_vtk(tmp_path, capsys):
    mesh_path = str(tmp_path / "m.json")
    vtk_path = str(tmp_path / "out.vtk")
    main(["mesh", "gen", "rectangular", "4", "-o", mesh_path])
    assert main(["solve", "-m", mesh_path, "--case", "1",
                 "--vtk", vtk_path]) == 0
    out = capsys.readouterr().out
    assert "energy error" in out
    assert (tmp_path / "out.vtk").exists()


def test_solve_saddle_flag(tmp_path, capsys):
    mesh_path = str(tmp_path / "m.json")
    main(["mesh", "gen", "triangular", "2", "-o", mesh_path])
    assert main(["solve", "-m", mesh_path, "--case", "2", "--saddle"]) == 0


def test_solve_dim_mismatch(tmp_path, capsys):
    mesh_path = str(tmp_path / "hex.json")
    main(["mesh", "gen", "hex", "1", "1", "1", "-o", mesh_path])
    assert main(["solve", "-m", mesh_path, "--case", "1"]) == 1


def test_convergence_csv_roundtrip(tmp_path, capsys):
    csv_path = tmp_path / "table.csv"
    assert main(["convergence", "--case", "1", "--family", "rectangular",
                 "--levels", "2", "--csv", str(csv_path)]) == 0
    text = csv_path.read_text()
    assert text.splitlines()[0] == "h,h1_err,h1_rate,l2_err,l2_rate,p_err,p_rate"
    report = ConvergenceReport.from_csv(text)
    assert len(report.rows) == 2
    assert report.rows[0].h == 0.25
    assert np.isfinite(report.rows[1].tb_rate)


def test_convergence_markdown(tmp_path, capsys):
    assert main(["convergence", "--case", "1", "--family", "mixed",
                 "--levels", "1", "--markdown"]) == 0
    assert "| h |" in capsys.readouterr().out


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["solve", "--unknown-flag"])
    assert e.value.code == 2


def test_param_count_error(tmp_path, capsys):
    assert main(["mesh", "gen", "hex", "2", "-o",
                 str(tmp_path / "x.json")]) == 2


def test_missing_file():
    assert main(["euler-check", "-m", "/nonexistent/mesh.json"]) == 1

"""Command-line interface: subcommands, exit codes, determinism and caching."""

from __future__ import annotations

import contextlib
import io
import json

import pytest

from schoenperiods import catalog
from schoenperiods.cli import EXIT_INPUT, EXIT_OK, RunConfig, main, parse_weights
from schoenperiods.errors import InvalidParameter

LOW = ["--digits", "40", "--terms", "80"]


def test_list_shows_every_example(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    for ex_id in catalog.example_ids():
        assert ex_id in out
    assert len(out.strip().splitlines()) == 12


def test_unknown_example_is_input_error(capsys, tmp_path):
    assert main(["lattice", "typeIV-nowhere", "--cache-dir", str(tmp_path)]) == EXIT_INPUT
    assert "input error" in capsys.readouterr().err


def test_missing_example_is_input_error(tmp_path):
    assert main(["lattice", "--cache-dir", str(tmp_path)]) == EXIT_INPUT


def test_additive_fiber_surface_is_input_error(tmp_path):
    # g2 = z, g3 = z vanish together at z = 0: an additive (non-I_n) fiber
    path = tmp_path / "additive.json"
    path.write_text(json.dumps({"g2": ["0", "1"], "g3": ["0", "1"], "k": 1}))
    assert main(["lattice", "--surface-file", str(path), "--no-cache", *LOW]) == EXIT_INPUT


def test_bad_weights_are_input_errors(tmp_path):
    assert main(["lattice", "typeI-1128", "--weights", "1,x", "--no-cache"]) == EXIT_INPUT
    assert main(["lattice", "typeI-1128", "--weights", "1,2", "--no-cache"]) == EXIT_INPUT


def test_parse_weights():
    assert parse_weights(None) == "generic"
    assert parse_weights("generic") == "generic"
    assert parse_weights("0,1,0") == (0, 1, 0)
    with pytest.raises(InvalidParameter):
        parse_weights("1;2")


def test_generic_coefficients_are_seeded():
    a = RunConfig(example="typeIII-X1-8", seed=5).coefficients(2)
    b = RunConfig(example="typeIII-X1-8", seed=5).coefficients(2)
    assert a == b and len(a) == 3 and all(1 <= c <= 7 for c in a)
    assert RunConfig(example="typeI-1128").coefficients(1) == (1,)
    with pytest.raises(InvalidParameter):
        RunConfig(weights=(0, 0, 0)).coefficients(2)
    with pytest.raises(InvalidParameter):
        RunConfig(weights=(1, 2)).coefficients(2)


def test_cache_info_and_clear(tmp_path, capsys):
    assert main(["cache", "info", "--cache-dir", str(tmp_path)]) == EXIT_OK
    assert "0 entries" in capsys.readouterr().out
    assert main(["cache", "clear", "--cache-dir", str(tmp_path)]) == EXIT_OK
    assert "removed 0" in capsys.readouterr().out


@pytest.fixture(scope="module")
def lattice_runs(tmp_path_factory):
    """The same low-precision lattice run twice: a cache miss, then a cache hit."""
    cache = str(tmp_path_factory.mktemp("cli-cache"))
    outputs = []
    for _ in range(2):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = main(["lattice", "typeI-1128", *LOW, "--format", "json", "--cache-dir", cache])
        outputs.append((code, buf.getvalue()))
    return cache, outputs


def test_lattice_run_is_deterministic_and_cache_transparent(lattice_runs):
    cache, ((c1, first), (c2, second)) = lattice_runs
    assert c1 == c2 == EXIT_OK
    assert first == second
    rec = json.loads(first)
    assert rec["example"] == "typeI-1128"
    assert rec["lattices"]["xhat"]["rank"] == 2
    assert rec["index"] is not None and rec["index"] >= 1


def test_cache_is_populated(lattice_runs, capsys):
    cache, _ = lattice_runs
    assert main(["cache", "info", "--cache-dir", cache]) == EXIT_OK
    assert "0 entries" not in capsys.readouterr().out
    assert main(["cache", "clear", "--cache-dir", cache]) == EXIT_OK
    assert main(["cache", "info", "--cache-dir", cache]) == EXIT_OK
    assert " 0 entries" in capsys.readouterr().out.splitlines()[-1]


def test_partials_table_and_csv(tmp_path, capsys):
    assert main(["partials", "typeI-1128", *LOW, "--cache-dir", str(tmp_path)]) == EXIT_OK
    assert capsys.readouterr().out.strip()
    assert main(["lattice", "typeI-1128", *LOW, "--format", "csv", "--cache-dir", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "," in out.splitlines()[0]


@pytest.mark.slow
def test_verify_type_i_passes(cache_dir, capsys):
    code = main(["verify", "typeI-1128", "--digits", "60", "--terms", "120", "--cache-dir", cache_dir])
    out = capsys.readouterr().out
    assert code == EXIT_OK, out

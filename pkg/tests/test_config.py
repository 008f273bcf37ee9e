import pytest

from gtrwfo.config import DEFAULT_MAX_NODES, MAX_MEM_ENV, RunConfig
from gtrwfo.errors import CapExceeded, GtrwfoError, InputError, NodeNotInDomain


class TestRunConfig:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv(MAX_MEM_ENV, raising=False)
        config = RunConfig.from_env()
        assert config.max_nodes == DEFAULT_MAX_NODES
        assert config.to_dict()["seed"] == 0

    def test_memory_variable(self, monkeypatch):
        monkeypatch.setenv(MAX_MEM_ENV, "5000")
        assert RunConfig.from_env().max_nodes == 5000
        assert RunConfig.from_env(max_nodes=7).max_nodes == 7
        assert RunConfig.from_env(max_nodes=None).max_nodes == 5000

    def test_bad_memory_variable(self, monkeypatch):
        monkeypatch.setenv(MAX_MEM_ENV, "5k")
        with pytest.raises(InputError):
            RunConfig.from_env()

    @pytest.mark.parametrize("cap", ["max_alphabet", "max_words", "step_budget", "max_nodes"])
    def test_caps_positive(self, cap: str):
        with pytest.raises(InputError, match=cap):
            RunConfig(**{cap: 0})

    def test_inputs_exist(self, tmp_path):
        present = tmp_path / "r.gtrs"
        present.write_text("", encoding="utf-8")
        RunConfig(inputs={"gtrs": str(present), "formula": None})
        with pytest.raises(InputError, match="formula file not found"):
            RunConfig(inputs={"formula": str(tmp_path / "missing.fo")})


class TestErrors:
    def test_kinds(self):
        assert GtrwfoError("x").kind == "error"
        assert InputError("x").kind == "input"
        assert CapExceeded("max_words", 3).kind == "cap"
        assert isinstance(NodeNotInDomain((0, 1)), InputError)

    def test_input_line(self):
        e = InputError("bad token", line=4)
        assert str(e) == "line 4: bad token"
        assert e.message == "bad token"

    def test_cap_report(self):
        e = CapExceeded("max_nodes", 10, reached=11, bounds={"gamma": 2})
        assert str(e) == "max_nodes cap of 10 exceeded (reached 11)"
        assert e.to_dict() == {"cap": "max_nodes", "limit": 10, "reached": 11, "bounds": {"gamma": 2}}

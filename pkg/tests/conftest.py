import pytest

from twtsim.cli import parse_config_text


def config_text(**overrides) -> str:
    return "".join(f"{key} = {value}\n" for key, value in overrides.items())


@pytest.fixture
def build_config():
    """Build a validated SimConfig from key=value overrides of the defaults."""
    def _build(**overrides):
        return parse_config_text(config_text(**overrides))
    return _build

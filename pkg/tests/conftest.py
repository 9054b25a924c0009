import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tokenforensics.synth import MATCH_CLASSES, ScenarioConfig, generate  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


def small_scenario(seed: int = 7, **overrides) -> ScenarioConfig:
    base = dict(
        seed=seed,
        targets=6,
        counterfeits={c: 1 for c in MATCH_CLASSES},
        creators=3,
        factory_fraction=0.3,
        airdrop=[dict(victims=6, rate="5000", eth_per_victim="0.25")],
        arbitrage=[dict(victims=12, secondary_fraction=0.25, type2_fraction=0.25, no_return_fraction=0.25, scam_receivers=2)],
        noise_transactions=150,
        laundering_depth=2,
        exchanges=2,
        overlap_victims=2,
        filter_plants=1,
    )
    base.update(overrides)
    return ScenarioConfig.from_mapping(base)


@pytest.fixture(scope="session")
def small_synth():
    return generate(small_scenario())


@pytest.fixture(scope="session")
def small_dir(tmp_path_factory, small_synth):
    d = tmp_path_factory.mktemp("small")
    small_synth.write(d)
    return d


# one line per acceptance criterion, echoed again at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

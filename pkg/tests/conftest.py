import numpy as np
import pytest

from enrollcast import BINARY, NUMERIC, DesignMatrix, Feature, FeatureSchema


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance criterion at the end of a run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid and getattr(report, "when", "call") == "call":
                name = nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in lines:
            terminalreporter.write_line(f"[{status}] {name}")


@pytest.fixture
def tiny_schema():
    return FeatureSchema(
        features=(
            Feature("Within_City", BINARY, ("No", "Yes")),
            Feature("Religion_Binary", BINARY, ("No", "Yes")),
            Feature("Total_Siblings", NUMERIC),
        ),
        target_name="Enrolled",
        positive_label="Yes",
    )


def random_design_matrix(rng: np.random.Generator, n: int, d: int) -> DesignMatrix:
    """Gaussian features with Bernoulli labels from a random logistic signal,
    so the data is realizable and never separable; both classes guaranteed."""
    x = np.ones((n, d + 1))
    x[:, 1:] = rng.normal(size=(n, d))
    w = rng.normal(size=d)
    probabilities = 1.0 / (1.0 + np.exp(-(x[:, 1:] @ w)))
    y = (rng.random(n) < probabilities).astype(float)
    if y.min() == y.max():
        y[0] = 1.0 - y[0]
    return DesignMatrix(x=x, y=y, feature_names=tuple(f"f{i}" for i in range(d)))

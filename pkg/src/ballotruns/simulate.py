"""Repeated synthetic trials and their detection rates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import Config, Report, analyze_transcript
from .errors import ParseError, ScenarioError
from .files import parse_fraction
from .synth import FraudScenario, Slate, realise

DEFAULT_RATE_THRESHOLDS = (1 / 9, 1 / 18, 1 / 99, 1 / 198, 1e-3, 1e-9)

METRICS = (
    "alpha_prime",
    "alpha_tilde_prime",
    "min_prime",
    "candidate_alpha_min",
    "candidate_alpha_tilde_min",
    "consolidated_alpha",
    "consolidated_alpha_tilde",
    "tuned_alpha",
    "tuned_alpha_tilde",
)

_ROSTER = "A, B, C, D, E, F, G, H, I, J, K"
_PROBS = "0.3, 0.3, 0.3, 0.3, 0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1"

# Built-in scenarios: 11 candidates, five leaders marked with probability 0.3.
PRESETS = {
    "honest": {"candidates": _ROSTER, "probabilities": _PROBS, "n_honest": "400",
               "trials": "1000", "seed": "0"},
    "batch50": {"candidates": _ROSTER, "probabilities": _PROBS, "n_honest": "400",
                "batch_pattern": "A, B, C, D, E", "batch_size": "50", "batch_position": "random",
                "trials": "1000", "seed": "0"},
}


@dataclass(frozen=True)
class Simulation:
    scenario: FraudScenario
    trials: int = 100
    seed: int = 0
    config: Config = field(default_factory=Config)
    rate_thresholds: tuple[float, ...] = DEFAULT_RATE_THRESHOLDS


def trial_metrics(report: Report) -> dict[str, float]:
    s = report.summary
    cons, tuned = report.consolidated, report.tuned
    return {
        "alpha_prime": s.alpha_prime,
        "alpha_tilde_prime": s.alpha_tilde_prime,
        "min_prime": s.min_prime,
        "candidate_alpha_min": s.alpha_min,
        "candidate_alpha_tilde_min": s.alpha_tilde_min,
        "consolidated_alpha": min(cons.alpha0.alpha, cons.alpha1.alpha),
        "consolidated_alpha_tilde": cons.alpha_tilde.alpha,
        "tuned_alpha": min(tuned.alpha0.alpha, tuned.alpha1.alpha),
        "tuned_alpha_tilde": tuned.alpha_tilde.alpha,
    }


def trial_seeds(seed: int, trials: int) -> list[int]:
    return [int(s.generate_state(1, dtype=np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(trials)]


def run_trials(sim: Simulation, on_report=None):
    """Run every trial; returns ``(metrics per trial, rate table)``.

    ``on_report(index, report)`` is called for each trial when given.
    """
    rows = []
    for k, seed in enumerate(trial_seeds(sim.seed, sim.trials)):
        report = analyze_transcript(realise(sim.scenario, seed), sim.config)
        if on_report is not None:
            on_report(k, report)
        rows.append(trial_metrics(report))
    return rows, detection_rates(rows, sim.rate_thresholds)


def detection_rates(rows, thresholds=DEFAULT_RATE_THRESHOLDS) -> dict[str, dict[float, float]]:
    """Fraction of trials with each metric below each threshold (empty if no trials)."""
    if not rows:
        return {}
    return {
        metric: {t: sum(r[metric] < t for r in rows) / len(rows) for t in thresholds}
        for metric in METRICS
    }


def format_rates(rates, trials: int) -> str:
    if not rates:
        return f"{trials} trials: nothing to aggregate\n"
    thresholds = list(next(iter(rates.values())))
    head = ["metric"] + [f"<{t:.3g}" for t in thresholds]
    lines = [f"detection rates over {trials} trials", "  ".join(f"{h:>10}" if i else f"{h:<26}" for i, h in enumerate(head))]
    for metric, by_t in rates.items():
        lines.append(f"{metric:<26}" + "".join(f"  {by_t[t]:>10.3f}" for t in thresholds))
    return "\n".join(lines) + "\n"


def _labels(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


def scenario_from_mapping(data: dict[str, str]) -> Simulation:
    """Build a simulation from a flat key-value mapping (see ``examples`` in README)."""
    data = dict(data)
    try:
        candidates = _labels(data.pop("candidates"))
        probabilities = tuple(parse_fraction(x) for x in data.pop("probabilities").split(","))
        n_honest = int(data.pop("n_honest"))
    except KeyError as exc:
        raise ScenarioError(f"scenario is missing required key {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    position = data.pop("batch_position", "random").strip()
    slates = []
    for chunk in filter(None, (c.strip() for c in data.pop("slates", "").split(";"))):
        members, sep, prob = chunk.partition(":")
        if not sep:
            raise ScenarioError(f"slate {chunk!r} must look like A+B+C:0.05")
        slates.append(Slate(tuple(m.strip() for m in members.split("+")), parse_fraction(prob)))
    try:
        scenario = FraudScenario(
            candidates=candidates,
            probabilities=probabilities,
            n_honest=n_honest,
            batch_pattern=_labels(data.pop("batch_pattern", "")),
            batch_size=int(data.pop("batch_size", "0")),
            batch_position=None if position in ("", "random") else int(position),
            mixing_chunk=int(data.pop("mixing_chunk", "0")),
            max_marks=int(data.get("max_marks", "5")),
            slates=tuple(slates),
            precinct_id=data.pop("precinct_id", "synthetic"),
        )
        trials = int(data.pop("trials", "100"))
        seed = int(data.pop("seed", "0"))
        thresholds = tuple(parse_fraction(x) for x in data.pop("rate_thresholds", "").split(",") if x.strip())
        config = Config.from_dict(data)
    except (ValueError, KeyError, ParseError) as exc:
        raise ScenarioError(str(exc).strip("'\"")) from None
    if trials < 0:
        raise ScenarioError("trials must be nonnegative")
    return Simulation(scenario=scenario, trials=trials, seed=seed, config=config,
                      rate_thresholds=thresholds or DEFAULT_RATE_THRESHOLDS)

"""Pure per-cell transition rules for the news and innovation diffusion models.

All functions here are referentially transparent: randomness enters only
through an explicit uniform draw ``p`` in [0, 1), supplied by the caller.
Only cells that can adopt (white / not-adopted) consume a draw; the other
transitions are deterministic functions of the neighborhood.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import AdoptionState, CellState


@dataclass(frozen=True)
class NewsRuleParams:
    """Parameters of the three-state news rule.

    A white cell with ``m`` black neighbors adopts the news when
    ``p * m > adoption_threshold``, where the draw ``p`` is scaled by
    ``boost_factor`` whenever ``m < boost_below`` (weakly connected cells
    are more receptive).
    """

    adoption_threshold: float = 1.0
    boost_factor: float = 1.5
    boost_below: int = 3

    def __post_init__(self) -> None:
        if self.adoption_threshold <= 0:
            raise ValueError("adoption_threshold must be positive")
        if self.boost_factor < 1:
            raise ValueError("boost_factor must be >= 1")
        if not 0 <= self.boost_below <= 8:
            raise ValueError("boost_below must be in [0, 8]")


@dataclass(frozen=True)
class InnovationRuleParams:
    """Parameters of the two-state innovation rule: adopt when ``p * m > threshold``."""

    threshold: float = 1.0

    def __post_init__(self) -> None:
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")


DEFAULT_NEWS_PARAMS = NewsRuleParams()
DEFAULT_INNOVATION_PARAMS = InnovationRuleParams()


def adopts_news(m: int, p: float, params: NewsRuleParams = DEFAULT_NEWS_PARAMS) -> bool:
    """Whether a white cell with ``m`` black neighbors and draw ``p`` turns black.

    Strict inequality: the boosted product must exceed the threshold. The
    boost scales the comparison only; ``p`` itself is never stored anywhere.
    """
    p_eff = p * params.boost_factor if m < params.boost_below else p
    return p_eff * m > params.adoption_threshold


def adopts_innovation(
    m: int, p: float, params: InnovationRuleParams = DEFAULT_INNOVATION_PARAMS
) -> bool:
    """Whether a not-adopted cell with ``m`` adopted neighbors and draw ``p`` adopts."""
    return p * m > params.threshold


def next_news_state(
    current: CellState,
    neighbors: np.ndarray,
    p: float,
    params: NewsRuleParams = DEFAULT_NEWS_PARAMS,
) -> CellState:
    """One synchronous-update transition of a single news-model cell.

    - white turns black iff :func:`adopts_news` fires for its black-neighbor
      count (``p`` must be a fresh draw for this cell at this step);
    - black turns grey iff no neighbor is white (the news has saturated its
      vicinity and goes stale);
    - grey turns white iff no neighbor is white (well-known information is
      forgotten).

    An empty neighborhood satisfies the no-white condition vacuously.
    """
    nb = np.asarray(neighbors)
    if current == CellState.WHITE:
        m = int(np.count_nonzero(nb == CellState.BLACK))
        return CellState.BLACK if adopts_news(m, p, params) else CellState.WHITE
    has_white = bool(np.any(nb == CellState.WHITE))
    if current == CellState.BLACK:
        return CellState.BLACK if has_white else CellState.GREY
    return CellState.GREY if has_white else CellState.WHITE


def next_innovation_state(
    current: AdoptionState,
    neighbors: np.ndarray,
    p: float,
    params: InnovationRuleParams = DEFAULT_INNOVATION_PARAMS,
) -> AdoptionState:
    """One transition of a single innovation-model cell; adoption is permanent."""
    if current == AdoptionState.ADOPTED:
        return AdoptionState.ADOPTED
    m = int(np.count_nonzero(np.asarray(neighbors) == AdoptionState.ADOPTED))
    return AdoptionState.ADOPTED if adopts_innovation(m, p, params) else AdoptionState.NOT_ADOPTED

"""Loss models with subgradients computable from binary accept/reject feedback."""

from __future__ import annotations

from dataclasses import dataclass, field


def absolute_loss_and_grad(w: float, w_star: float) -> tuple[float, float]:
    """|w - w*| with gradient +1 on accept (w >= w*), -1 on reject."""
    if w >= w_star:
        return w - w_star, 1.0
    return w_star - w, -1.0


def eps_insensitive_loss_and_grad(w: float, c_star: float, eps: float) -> tuple[float, float]:
    """max(0, |w - c*| - eps); subgradient 0 inside the band, sign(w - c*) outside."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    gap = abs(w - c_star) - eps
    if gap <= 0:
        return 0.0, 0.0
    return gap, 1.0 if w > c_star else -1.0


def posted_price_loss_and_grad(p: float, c: float, u: float, delta: float) -> tuple[float, float]:
    """Convex take-it-or-leave-it pricing surrogate.

    Accept (p >= c): loss p - c, gradient +1. Reject: loss (u/delta)(c - p),
    gradient -u/delta. Either branch is determined by the accept bit alone.
    """
    if u <= 0 or delta <= 0:
        raise ValueError("u and delta must be positive")
    if p >= c:
        return p - c, 1.0
    slope = u / delta
    return slope * (c - p), -slope


def marketplace_reward(p: float, c: float, u: float) -> float:
    """u - p when the offer p is accepted (p >= c), zero otherwise."""
    return u - p if p >= c else 0.0


@dataclass
class AbsoluteLoss:
    """Target-tracking loss; target per task supplied by the environment."""

    grad_bound: float = 1.0
    kind: str = field(default="absolute", init=False)


@dataclass
class EpsInsensitiveLoss:
    c_star: float
    eps: float
    kind: str = field(default="eps-insensitive", init=False)

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    @property
    def grad_bound(self) -> float:
        return 1.0


@dataclass
class PostedPriceLoss:
    u: float = 40.0
    delta: float = 20.0
    kind: str = field(default="posted-price", init=False)

    def __post_init__(self):
        if self.u <= 0 or self.delta <= 0:
            raise ValueError("u and delta must be positive")

    @property
    def grad_bound(self) -> float:
        # reject slope u/delta can exceed the accept slope of 1
        return max(1.0, self.u / self.delta)

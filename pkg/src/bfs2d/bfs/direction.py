"""Per-level choice between top-down and bottom-up expansion."""

TOP_DOWN = "td"
BOTTOM_UP = "bu"

DEFAULT_ALPHA = 14.0
DEFAULT_BETA = 24.0


def choose_direction(current, n_f, m_f, m_u, n, alpha=DEFAULT_ALPHA, beta=DEFAULT_BETA):
    """Switch to bottom-up once the frontier's edges exceed ``m_u / alpha``;
    switch back once the frontier holds fewer than ``n / beta`` vertices."""
    if current == TOP_DOWN:
        return BOTTOM_UP if m_f > m_u / alpha else TOP_DOWN
    if current == BOTTOM_UP:
        return TOP_DOWN if n_f < n / beta else BOTTOM_UP
    raise ValueError(f"unknown direction {current!r}")

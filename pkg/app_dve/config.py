"""
Configuration of the confusion-contribution loss and its boost schedule.
"""

# 1. Standard library
from dataclasses import asdict, dataclass


BOOST_MODES = ('pre', 'post')


@dataclass(frozen=True)
class CCLossConfig:
    """
    Attributes:
        k1 (float): Confusion coefficient (>= 0).
        k2 (float): Contribution coefficient (>= 0).
        eps_log (float): Guard added inside both logarithms.
        boost (str): 'pre' ramps the loss in from the start; 'post' waits for
            the episode-length curve to flatten.
        ramp_fraction (float): Share of total steps over which 'pre' ramps to 1.
        window (int): Number of history entries the 'post' slope is fitted on.
        slope_threshold (float): 'post' triggers once the slope drops below this.
        min_pretrain_steps (int): 'post' never triggers before this many steps.
        cc_assignments_only (bool): Stop loss gradients at the assignment
            subnetwork instead of letting them reach the shared encoder.
    """
    k1: float = 0.05
    k2: float = 0.05
    eps_log: float = 1e-8
    boost: str = 'pre'
    ramp_fraction: float = 0.25
    window: int = 8
    slope_threshold: float = 0.05
    min_pretrain_steps: int = 0
    cc_assignments_only: bool = True

    def __post_init__(self):
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError('loss coefficients must be non-negative')
        if self.boost not in BOOST_MODES:
            raise ValueError(f'boost must be one of {BOOST_MODES}')
        if self.eps_log < 0:
            raise ValueError('eps_log must be non-negative')
        if self.window < 2:
            raise ValueError('window needs at least two entries to fit a slope')

    @property
    def active(self):
        return self.k1 > 0 or self.k2 > 0

    def as_dict(self):
        return asdict(self)

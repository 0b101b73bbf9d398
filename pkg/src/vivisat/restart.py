"""Restart policies: LBD-window restarts (Glucose style) and Luby restarts."""

from collections import deque
from dataclasses import dataclass

GLUCOSE = "glucose"
LUBY = "luby"


def luby(i: int) -> int:
    """i-th element (1-based) of the Luby sequence 1,1,2,1,1,2,4,1,..."""
    if i < 1:
        raise ValueError("luby is defined for i >= 1")
    # find k with 2^(k-1) <= i < 2^k; i == 2^k - 1 ends a block
    k = i.bit_length()
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        k -= 1
        i -= (1 << k) - 1
        k = i.bit_length()


@dataclass
class RestartConfig:
    mode: str = GLUCOSE
    window: int = 50        # recent-LBD queue capacity
    k: float = 0.8          # recent average is "high" when avg * k > global avg
    luby_unit: int = 100


class RestartState:
    """Tracks recent and global learnt-clause LBD averages.

    The recent window is cleared on restart; the global accumulators never
    are.  In Luby mode, restarts fire on conflict counts alone.
    """

    def __init__(self, cfg: RestartConfig):
        self.cfg = cfg
        self.window = deque()
        self.window_sum = 0
        self.global_sum = 0
        self.global_count = 0
        self.conflicts_since_restart = 0
        self.luby_index = 1

    def on_learnt(self, lbd: int):
        cfg = self.cfg
        self.window.append(lbd)
        self.window_sum += lbd
        if len(self.window) > cfg.window:
            self.window_sum -= self.window.popleft()
        self.global_sum += lbd
        self.global_count += 1
        self.conflicts_since_restart += 1

    def should_restart(self) -> bool:
        cfg = self.cfg
        if cfg.mode == LUBY:
            return (self.conflicts_since_restart
                    >= luby(self.luby_index) * cfg.luby_unit)
        if len(self.window) < cfg.window:
            return False
        global_avg = self.global_sum / self.global_count
        return (self.window_sum / cfg.window) * cfg.k > global_avg

    def note_restart(self):
        self.window.clear()
        self.window_sum = 0
        self.conflicts_since_restart = 0
        self.luby_index += 1

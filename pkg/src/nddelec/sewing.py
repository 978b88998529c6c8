"""Forward propagation of discontinuity chains between worldlines.

A kink at time t_n on worldline i influences worldline j at the advanced
time t_{n+1} = t_n + |x_i(t_n) - x_j(t_{n+1})|, the first intersection of
j with the forward lightcone of the event (x_i(t_n), t_n).  Bouncing the
map between two worldlines yields a chain of events whose same-worldline
time separations are 2r for static geometry and shrink as the worldlines
approach each other.

Chains here are measured on prescribed trajectories; no equation of motion
is solved to generate the kinks themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lightcone import ADVANCED, solve_lightcone
from .trajectory import DomainError


@dataclass(frozen=True)
class DiscontinuityEvent:
    """One chain node: worldline index, event time, hop count from source."""

    trajectory_id: int
    t: float
    generation: int


@dataclass(frozen=True)
class SewingChain:
    """Alternating chain of lightcone hops between a pair of worldlines."""

    events: tuple
    source: DiscontinuityEvent
    pair: tuple
    truncated: bool

    def times(self):
        return [e.t for e in self.events]

    def times_on(self, trajectory_id: int):
        return [e.t for e in self.events if e.trajectory_id == trajectory_id]


def propagate_chain(trajectories, source: DiscontinuityEvent,
                    partner_id: int, n_steps: int) -> SewingChain:
    """Bounce the forward lightcone map n_steps times starting from source.

    The chain alternates between the source worldline and the partner.  If a
    hop's advanced time leaves the receiving worldline's domain, the chain is
    returned truncated with the events resolved so far.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    if partner_id == source.trajectory_id:
        raise ValueError("partner must differ from the source worldline")
    events = [source]
    current_id = source.trajectory_id
    next_id = partner_id
    t = source.t
    truncated = False
    for generation in range(1, n_steps + 1):
        x_here = trajectories[current_id].position(t)
        try:
            hit = solve_lightcone(trajectories[next_id], x_here, t, ADVANCED)
        except DomainError:
            truncated = True
            break
        events.append(DiscontinuityEvent(next_id, hit.t_dev, generation))
        t = hit.t_dev
        current_id, next_id = next_id, current_id
    return SewingChain(events=tuple(events), source=source,
                       pair=(source.trajectory_id, partner_id),
                       truncated=truncated)


def chain_spacings(chain: SewingChain):
    """Consecutive same-worldline time separations along the chain.

    Events alternate between the two worldlines, so these are the time
    differences between events two hops apart.
    """
    if len(chain.events) < 3:
        raise ValueError("chain needs at least 3 events to have spacings")
    times = chain.times()
    return [times[i + 2] - times[i] for i in range(len(times) - 2)]

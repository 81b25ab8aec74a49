"""Power-allocation policies for the min-max transmit-delay problem.

Every allocator consumes a list of per-vehicle LinkCoefficients plus the
total power budget and returns an AllocationResult.  Available policies:

* epa                       -- equal split baseline, floors ignored
* closed_form_equal_payload -- exact optimum when all payload terms match
* alg1_delay_bisection      -- bisection on the common delay (relaxed floors)
* alg2_complementary        -- pairwise power transfer (exact floors)
* oracle_grid_search        -- brute-force simplex scan for verification
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (ConvergenceError, FloorViolationError, InfeasibleError,
                     UnequalPayloadsError)
from .latency import LinkCoefficients, delay

SUM_TOL = 1e-9
FLOOR_TOL = 1e-9


@dataclass(frozen=True)
class AllocationResult:
    """Outcome of one allocation: per-vehicle powers and delays plus metadata.

    bracket_trace is filled by the bisection solver only: a tuple of
    (T_lower, T_upper) pairs, one per recorded state starting at the
    initial bracket.
    """

    powers: np.ndarray
    delays: np.ndarray
    max_delay: float
    iterations: int
    converged: bool
    policy: str
    infeasible_reason: str | None = None
    bracket_trace: tuple | None = None

    def __post_init__(self):
        for name in ("powers", "delays"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Whether the floors fit the budget; deficit is the missing wattage."""

    feasible: bool
    total_floor: float
    p_max: float
    deficit: float


@dataclass(frozen=True)
class SolverParams:
    """Termination knobs shared by the iterative solvers.

    delta_p_init of None lets alg2 start at p_max / (2K), half the equal
    share, so the first transfer can never drive a donor negative.
    """

    eps_delay: float = 1e-9
    eps_power: float = 1e-9
    delta_p_init: float | None = None
    max_iters: int = 100_000

    def __post_init__(self):
        if not self.eps_delay > 0 or not self.eps_power > 0:
            raise ValueError("tolerances must be strictly positive")
        if self.delta_p_init is not None and not self.delta_p_init > 0:
            raise ValueError("delta_p_init must be strictly positive when given")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


def _coefficient_arrays(links):
    a = np.array([link.a_coef for link in links], dtype=float)
    b = np.array([link.b_coef for link in links], dtype=float)
    floors = np.array([link.power_floor for link in links], dtype=float)
    return a, b, floors


def _delay_or_inf(p, link):
    # Local helper: transfers may momentarily probe p == floor == 0, which
    # the public delay() rejects; an infinite delay makes the guard revert.
    if p <= 0:
        return math.inf
    return link.a_coef / math.log1p(link.b_coef * p)


def check_feasible(links, p_max: float) -> FeasibilityVerdict:
    """Feasibility gate: the power floors must fit inside the budget."""
    if len(links) == 0:
        raise ValueError("at least one link is required")
    if not p_max > 0:
        raise ValueError("p_max must be > 0")
    total = float(sum(link.power_floor for link in links))
    return FeasibilityVerdict(feasible=total <= p_max, total_floor=total,
                              p_max=p_max, deficit=max(total - p_max, 0.0))


def epa(links, p_max: float) -> AllocationResult:
    """Equal power allocation baseline; floors are deliberately not enforced."""
    if len(links) == 0:
        raise ValueError("at least one link is required")
    if not p_max > 0:
        raise ValueError("p_max must be > 0")
    n = len(links)
    powers = np.full(n, p_max / n)
    delays = np.array([delay(powers[k], links[k]) for k in range(n)])
    return AllocationResult(powers=powers, delays=delays,
                            max_delay=float(delays.max()), iterations=0,
                            converged=True, policy="epa")


def closed_form_equal_payload(links, p_max: float) -> AllocationResult:
    """Optimal split for identical payload terms: p_k proportional to 1/b_k.

    Raises UnequalPayloadsError when the payload terms differ (use the
    bisection solver) and FloorViolationError when the result breaks a
    power floor (use the complementary solver).
    """
    if len(links) == 0:
        raise ValueError("at least one link is required")
    if not p_max > 0:
        raise ValueError("p_max must be > 0")
    a, b, floors = _coefficient_arrays(links)
    spread = (a.max() - a.min()) / a.max()
    if spread > 1e-12:
        raise UnequalPayloadsError(
            f"payload terms differ by {spread:.3e} relative; "
            "alg1_delay_bisection handles unequal payloads")
    inv_b_sum = float(np.sum(1.0 / b))
    powers = p_max / (b * inv_b_sum)
    violated = powers < floors * (1.0 - FLOOR_TOL)
    if np.any(violated):
        idx = np.flatnonzero(violated)
        raise FloorViolationError(
            f"closed-form powers fall below the floor for vehicle(s) {idx.tolist()}; "
            "alg2_complementary enforces floors")
    delays = np.array([delay(powers[k], links[k]) for k in range(len(links))])
    return AllocationResult(powers=powers, delays=delays,
                            max_delay=float(delays.max()), iterations=0,
                            converged=True, policy="closed_form")


def _power_demand(t_common, a, b):
    # Total power needed for every vehicle to finish exactly at t_common.
    with np.errstate(over="ignore"):
        return float(np.sum(np.expm1(a / t_common) / b))


def alg1_delay_bisection(links, p_max: float,
                         params: SolverParams | None = None) -> AllocationResult:
    """Bisection on the common delay between the equal-split delay extremes.

    The bracket starts at the min/max delays of the equal split, halves
    until its width is below eps_delay, and the common delay is then
    polished by a root solve of demand(T) = p_max inside the final bracket
    so the output uses the full budget to machine precision.

    If any resulting power sits below its floor the result keeps the
    equal-delay powers but is flagged converged=False, deferring to
    alg2_complementary.
    """
    params = params if params is not None else SolverParams()
    verdict = check_feasible(links, p_max)
    if not verdict.feasible:
        raise InfeasibleError(
            f"power floors exceed the budget by {verdict.deficit:.6g} W",
            deficit=verdict.deficit)

    n = len(links)
    a, b, floors = _coefficient_arrays(links)
    start = p_max / n
    start_delays = np.array([delay(start, links[k]) for k in range(n)])
    t_lo = float(start_delays.min())
    t_hi = float(start_delays.max())
    trace = [(t_lo, t_hi)]

    iterations = 0
    while t_hi - t_lo > params.eps_delay:
        if iterations >= params.max_iters:
            raise ConvergenceError(
                f"bisection exceeded {params.max_iters} iterations; "
                f"bracket [{t_lo:.12e}, {t_hi:.12e}]")
        iterations += 1
        mid = 0.5 * (t_lo + t_hi)
        if _power_demand(mid, a, b) > p_max:
            t_lo = mid
        else:
            t_hi = mid
        trace.append((t_lo, t_hi))

    def residual(t):
        return _power_demand(t, a, b) - p_max

    res_lo = residual(t_lo)
    res_hi = residual(t_hi)
    if res_lo <= 0.0:
        t_common = t_lo
    elif res_hi > 0.0:
        t_common = t_hi
    else:
        t_common = brentq(residual, t_lo, t_hi, xtol=1e-300,
                          rtol=4.0 * np.finfo(float).eps)

    with np.errstate(over="ignore"):
        powers = np.expm1(a / t_common) / b
    delays = np.array([delay(powers[k], links[k]) for k in range(n)])

    below = powers < floors * (1.0 - FLOOR_TOL)
    reason = None
    if np.any(below):
        idx = np.flatnonzero(below)
        reason = (f"power floor binds for vehicle(s) {idx.tolist()}; "
                  "alg2_complementary handles binding floors")
    return AllocationResult(powers=powers, delays=delays,
                            max_delay=float(delays.max()),
                            iterations=iterations, converged=reason is None,
                            policy="alg1", infeasible_reason=reason,
                            bracket_trace=tuple(trace))


def _repair_start(powers, floors):
    # Lift floor-deficient vehicles to their floors and fund the lift
    # proportionally from the slack of the others; the total is conserved.
    deficit = floors - powers
    need = float(deficit[deficit > 0].sum())
    if need <= 0:
        return powers
    lifted = np.where(deficit > 0, floors, powers)
    slack = np.where(deficit > 0, 0.0, lifted - floors)
    total_slack = float(slack.sum())
    return lifted - slack * (need / total_slack)


def alg2_complementary(links, p_max: float,
                       params: SolverParams | None = None) -> AllocationResult:
    """Pairwise transfer solver: move power from the fastest to the slowest.

    Starting from the equal split (repaired onto the floors when needed),
    each iteration moves delta_p from the minimum-delay vehicle to the
    maximum-delay vehicle.  A transfer that flips their order is reverted
    and delta_p halves, which suppresses ping-pong between the pair.
    Transfers truncate at the donor's floor; a donor with no slack is
    skipped, and when no vehicle has slack the floors bind and the result
    returns as converged.  The total power is conserved by construction.
    """
    params = params if params is not None else SolverParams()
    verdict = check_feasible(links, p_max)
    if not verdict.feasible:
        raise InfeasibleError(
            f"power floors exceed the budget by {verdict.deficit:.6g} W",
            deficit=verdict.deficit)

    n = len(links)
    _, _, floors = _coefficient_arrays(links)
    powers = _repair_start(np.full(n, p_max / n), floors)
    delays = np.array([_delay_or_inf(powers[k], links[k]) for k in range(n)])

    delta = params.delta_p_init if params.delta_p_init is not None else p_max / (2 * n)
    iterations = 0
    converged = True
    reason = None
    while delta > params.eps_power:
        if iterations >= params.max_iters:
            converged = False
            reason = f"transfer loop hit the {params.max_iters}-iteration limit"
            break
        iterations += 1
        receiver = int(np.argmax(delays))
        donor = -1
        for idx in np.argsort(delays, kind="stable"):
            if idx == receiver:
                continue
            if powers[idx] - floors[idx] > 0.0:
                donor = int(idx)
                break
        if donor < 0:
            break  # floors bind everywhere; nothing left to move
        step = min(delta, powers[donor] - floors[donor])
        powers[receiver] += step
        powers[donor] -= step
        t_receiver = _delay_or_inf(powers[receiver], links[receiver])
        t_donor = _delay_or_inf(powers[donor], links[donor])
        if t_receiver < t_donor:
            powers[receiver] -= step
            powers[donor] += step
            delta *= 0.5
        else:
            delays[receiver] = t_receiver
            delays[donor] = t_donor

    delays = np.array([_delay_or_inf(powers[k], links[k]) for k in range(n)])
    return AllocationResult(powers=powers, delays=delays,
                            max_delay=float(delays.max()),
                            iterations=iterations, converged=converged,
                            policy="alg2", infeasible_reason=reason)


def oracle_grid_search(links, p_max: float, grid_steps: int) -> AllocationResult:
    """Exhaustive scan of the power simplex at resolution p_max/grid_steps.

    Verification-only: refuses more than four vehicles.  Returns the grid
    point with floors respected, powers summing to p_max, and the smallest
    maximum delay; ties keep the first point in scan order.
    """
    n = len(links)
    if n == 0:
        raise ValueError("at least one link is required")
    if n > 4:
        raise ValueError("oracle_grid_search handles at most 4 vehicles")
    if grid_steps < 100:
        raise ValueError("grid_steps must be >= 100")
    if not p_max > 0:
        raise ValueError("p_max must be > 0")
    verdict = check_feasible(links, p_max)
    if not verdict.feasible:
        raise InfeasibleError(
            f"power floors exceed the budget by {verdict.deficit:.6g} W",
            deficit=verdict.deficit)

    a, b, floors = _coefficient_arrays(links)
    step = p_max / grid_steps
    slack = p_max - float(floors.sum())

    def delays_of(p, k):
        with np.errstate(divide="ignore"):
            return np.where(p > 0, a[k] / np.log1p(b[k] * p), np.inf)

    evaluated = 0
    best_delay = math.inf
    best_powers = None

    if n == 1:
        best_powers = np.array([p_max])
        best_delay = float(delays_of(best_powers[:1], 0)[0])
        evaluated = 1
    elif n == 2:
        offsets = np.arange(int(slack / step + 1e-12) + 1) * step
        p0 = floors[0] + offsets
        p1 = p_max - p0
        worst = np.maximum(delays_of(p0, 0), delays_of(p1, 1))
        idx = int(np.argmin(worst))
        best_delay = float(worst[idx])
        best_powers = np.array([p0[idx], p1[idx]])
        evaluated = len(offsets)
    else:
        outer_counts = int(slack / step + 1e-12) + 1
        for i0 in range(outer_counts):
            o0 = i0 * step
            if n == 3:
                rest = slack - o0
                offsets = np.arange(int(rest / step + 1e-12) + 1) * step
                p0 = floors[0] + o0
                p1 = floors[1] + offsets
                p2 = p_max - p0 - p1
                worst = np.maximum(delays_of(np.array([p0]), 0)[0],
                                   np.maximum(delays_of(p1, 1), delays_of(p2, 2)))
                evaluated += len(offsets)
                idx = int(np.argmin(worst))
                if worst[idx] < best_delay:
                    best_delay = float(worst[idx])
                    best_powers = np.array([p0, p1[idx], p2[idx]])
            else:
                for i1 in range(int((slack - o0) / step + 1e-12) + 1):
                    o1 = i1 * step
                    rest = slack - o0 - o1
                    offsets = np.arange(int(rest / step + 1e-12) + 1) * step
                    p0 = floors[0] + o0
                    p1 = floors[1] + o1
                    p2 = floors[2] + offsets
                    p3 = p_max - p0 - p1 - p2
                    worst = np.maximum(
                        max(delays_of(np.array([p0]), 0)[0],
                            delays_of(np.array([p1]), 1)[0]),
                        np.maximum(delays_of(p2, 2), delays_of(p3, 3)))
                    evaluated += len(offsets)
                    idx = int(np.argmin(worst))
                    if worst[idx] < best_delay:
                        best_delay = float(worst[idx])
                        best_powers = np.array([p0, p1, p2[idx], p3[idx]])

    delays = np.array([_delay_or_inf(best_powers[k], links[k]) for k in range(n)])
    return AllocationResult(powers=best_powers, delays=delays,
                            max_delay=float(delays.max()),
                            iterations=evaluated, converged=True,
                            policy="oracle_grid")


def validate_result(result: AllocationResult, links, p_max: float) -> None:
    """Re-check the output invariants; raises ValueError on any violation.

    Floors are checked for floor-enforcing policies only (epa skips them by
    design, and a result carrying infeasible_reason documents its own
    violation).
    """
    powers = np.asarray(result.powers, dtype=float)
    delays = np.asarray(result.delays, dtype=float)
    if powers.shape != (len(links),) or delays.shape != (len(links),):
        raise ValueError("result arrays do not match the link count")
    if float(powers.sum()) > p_max * (1.0 + SUM_TOL):
        raise ValueError(
            f"powers sum to {powers.sum():.12g} W, above the {p_max:.12g} W budget")
    if not math.isclose(result.max_delay, float(delays.max()),
                        rel_tol=1e-12, abs_tol=0.0):
        raise ValueError("max_delay does not equal max(delays)")
    if result.policy != "epa" and result.infeasible_reason is None:
        floors = np.array([link.power_floor for link in links])
        if np.any(powers < floors * (1.0 - FLOOR_TOL)):
            raise ValueError("a power sits below its floor")

"""Wall-clock comparison of the trajectory backends vs pointer size N.

The full backends integrate N+2 coupled equations, so their cost grows
with N; the reduced backend always integrates 3 (X', Y', Sigma_hat'), so
its core cost must not depend on N.  That is the headline check reported
here.  Pointer reconstruction is O(N) per output sample and is timed
separately on a thinned sample grid (and skipped above
``max_reconstruct_n``, where the arrays alone would dominate).

The canonical bench scenario is the fast-pointer base (R = 1, Xi = 10,
E = 3): its reduced dynamics keep the same character at any N, so timing
differences reflect backend cost, not a change of physics.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .integrate import IntegratorOptions, integrate_trajectory
from .model import Configuration, single_pointer_params
from .reduced import reconstruct_pointers

__all__ = ["BenchRecord", "BenchReport", "run_bench", "BASE_PARAMS"]

BASE_PARAMS = dict(xi_x=10.0, xi_y=10.0, r=1.0, R=1.0, mu=1.0, d_prime=3.0)
BASE_XI = 10.0


@dataclass(frozen=True)
class BenchRecord:
    backend: str
    n_particles: int
    median_core_s: float
    repetitions: int
    steps: int
    reconstruct_s: float | None = None   # reduced backend only, thinned grid


@dataclass(frozen=True)
class BenchReport:
    records: tuple[BenchRecord, ...]
    reduced_core_ratio: float | None     # max/min reduced core time
    reduced_n_independent: bool | None   # ratio < 2


def _median_time(fn, repetitions: int) -> tuple[float, object]:
    fn()  # warm-up, untimed
    times = []
    result = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return sorted(times)[len(times) // 2], result


def _full_record(backend: str, n: int, repetitions: int, opts: IntegratorOptions,
                 params_base: dict, xi: float) -> BenchRecord:
    params = single_pointer_params(Xi=xi, n_particles=n, **params_base)
    init = Configuration(0.0, params.d_prime, 0.0, (0.0,) * n)
    median, traj = _median_time(lambda: integrate_trajectory(init, params, opts, backend),
                                repetitions)
    return BenchRecord(backend, n, median, repetitions, traj.stats.n_steps)


def _reduced_record(n: int, repetitions: int, opts: IntegratorOptions, params_base: dict,
                    xi: float, max_reconstruct_n: int) -> BenchRecord:
    # core: the Xi*sqrt(N) one-particle twin, which is exactly what the
    # reduced backend integrates after its O(N) setup
    twin = single_pointer_params(Xi=xi * math.sqrt(n), n_particles=1, **params_base)
    init = Configuration(0.0, twin.d_prime, 0.0, (0.0,))
    median, traj = _median_time(lambda: integrate_trajectory(init, twin, opts, "reduced"),
                                repetitions)

    reconstruct_s = None
    if n <= max_reconstruct_n:
        # the twin's pointer coordinate IS Sigma_hat' of the N-particle system
        params_n = single_pointer_params(Xi=xi, n_particles=n, **params_base)
        thin = slice(0, traj.n_samples, max(1, traj.n_samples // 8))
        t_thin = traj.t[thin]
        sig_thin = traj.sigma_hat[thin]
        z0 = np.full(n, sig_thin[0] / math.sqrt(n))
        t0 = time.perf_counter()
        reconstruct_pointers(t_thin, sig_thin, z0, params_n)
        reconstruct_s = time.perf_counter() - t0
    return BenchRecord("reduced", n, median, repetitions, traj.stats.n_steps, reconstruct_s)


def run_bench(n_list, backends=("reduced", "full-analytic"), repetitions: int = 3,
              opts: IntegratorOptions = IntegratorOptions(),
              params_base: dict | None = None, xi: float = BASE_XI,
              max_reconstruct_n: int = 100_000) -> BenchReport:
    """Median single-trajectory times per (backend, N) from the slit center."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    ns = [int(n) for n in n_list]
    if not ns or any(n < 1 for n in ns):
        raise ValueError("n_list must hold positive integers")
    base = dict(params_base) if params_base is not None else dict(BASE_PARAMS)

    records = []
    for backend in backends:
        for n in ns:
            if backend == "reduced":
                records.append(_reduced_record(n, repetitions, opts, base, xi,
                                               max_reconstruct_n))
            else:
                records.append(_full_record(backend, n, repetitions, opts, base, xi))

    reduced_times = [r.median_core_s for r in records if r.backend == "reduced"]
    if len(reduced_times) >= 2:
        ratio = max(reduced_times) / min(reduced_times)
        report = BenchReport(tuple(records), ratio, ratio < 2.0)
    else:
        report = BenchReport(tuple(records), None, None)
    return report

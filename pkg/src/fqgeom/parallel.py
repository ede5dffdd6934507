"""Deterministic fan-out of independent jobs across worker processes.

Results come back in job order regardless of scheduling, and every merge
done by callers is associative, so output is bit-identical for any worker
count.  Job arguments and results must be picklable primitives; workers
rebuild field tables locally (they are cheap and cached per process).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def run_jobs(fn, jobs, workers: int = 1) -> list:
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    chunksize = max(1, len(jobs) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs, chunksize=chunksize))

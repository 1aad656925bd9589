"""Order-preserving parallel map over indexed work items.

Work items must derive all randomness from their own index, so the gathered
result is identical for any worker count or scheduling order.
"""

import numpy as np


def run_chunk(fn, indices):
    return [fn(int(i)) for i in indices]


def map_indexed(fn, n_items, n_jobs=1):
    """[fn(0), ..., fn(n_items-1)], optionally computed on a thread pool."""
    if n_items == 0:
        return []
    if n_jobs is None or n_jobs == 1:
        return [fn(i) for i in range(n_items)]
    from joblib import Parallel, delayed

    chunks = np.array_split(np.arange(n_items), min(n_items, 4 * abs(n_jobs)))
    blocks = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(run_chunk)(fn, chunk) for chunk in chunks
    )
    return [item for block in blocks for item in block]

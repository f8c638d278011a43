from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """Apply ``fn`` to every item, optionally on a thread pool.

    Results come back in input order regardless of completion order, so sweeps
    stay byte-identical between serial and parallel runs. numpy's LAPACK calls
    release the GIL, which is what makes threads worthwhile here.
    """
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))

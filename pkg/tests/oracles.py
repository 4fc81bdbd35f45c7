"""Brute-force reference implementations used to cross-check the library."""

from itertools import combinations, product


def binomial(w: str, u: str) -> int:
    """Count increasing index tuples i1 < ... < im with w[i1..im] = u."""
    if not u:
        return 1
    return sum(1 for idx in combinations(range(len(w)), len(u)) if all(w[i] == c for i, c in zip(idx, u)))


def all_words(letters: str, max_length: int, min_length: int = 0):
    for n in range(min_length, max_length + 1):
        for t in product(letters, repeat=n):
            yield "".join(t)


def equivalent(u: str, v: str, k: int, letters: str) -> bool:
    if len(u) != len(v):
        return False
    return all(binomial(u, x) == binomial(v, x) for x in all_words(letters, k, 1))


def factors(w: str, n: int) -> set[str]:
    return {w[i : i + n] for i in range(len(w) - n + 1)}


def class_count(w: str, k: int, n: int, letters: str) -> int:
    """Number of k-binomial classes among the length-n factors, by pairwise
    comparison against class representatives."""
    reps: list[str] = []
    for f in sorted(factors(w, n)):
        if not any(equivalent(f, r, k, letters) for r in reps):
            reps.append(f)
    return len(reps)


def imbalance(w: str) -> int:
    best = 0
    for n in range(1, len(w) + 1):
        windows = [w[i : i + n] for i in range(len(w) - n + 1)]
        for a in set(w):
            counts = [x.count(a) for x in windows]
            best = max(best, max(counts) - min(counts))
    return best


def subword_counts(w: str, k: int) -> dict[str, int]:
    """Counts of every scattered subword of length 1..k, one pass over each
    set of increasing index tuples."""
    counts: dict[str, int] = {}
    for m in range(1, k + 1):
        for idx in combinations(range(len(w)), m):
            key = "".join(w[i] for i in idx)
            counts[key] = counts.get(key, 0) + 1
    return counts

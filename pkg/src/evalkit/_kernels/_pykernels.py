"""Pure-Python fallback kernels (two-row dynamic programming)."""

from __future__ import annotations


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character insertions, deletions and
    substitutions turning `a` into `b`."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    # keep the inner loop over the shorter string
    if len(b) > len(a):
        a, b = b, a
    prev = list(range(len(b) + 1))
    curr = [0] * (len(b) + 1)
    for i, ca in enumerate(a, 1):
        curr[0] = i
        for j, cb in enumerate(b, 1):
            cost = prev[j - 1] + (ca != cb)
            dele = prev[j] + 1
            ins = curr[j - 1] + 1
            curr[j] = cost if cost <= dele and cost <= ins else (dele if dele <= ins else ins)
        prev, curr = curr, prev
    return prev[len(b)]


def lcs_length(a: list[int], b: list[int]) -> int:
    """Length of the longest common subsequence of two id sequences."""
    if not a or not b:
        return 0
    if len(b) > len(a):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    curr = [0] * (len(b) + 1)
    for x in a:
        for j, y in enumerate(b, 1):
            if x == y:
                curr[j] = prev[j - 1] + 1
            else:
                p, c = prev[j], curr[j - 1]
                curr[j] = p if p >= c else c
        prev, curr = curr, prev
        curr[0] = 0
    return prev[len(b)]


def lcs_str(a: str, b: str) -> int:
    """Length of the longest common subsequence of two strings (per character)."""
    return lcs_length([ord(c) for c in a], [ord(c) for c in b])

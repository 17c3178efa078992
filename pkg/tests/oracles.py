"""Independent reference implementations used to cross-check the package.

Nothing here imports the algorithms under test; everything is brute force
or direct enumeration.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import gcd, prod


def trial_factor(n: int) -> dict[int, int]:
    return dict(_trial_factor(n))


@lru_cache(maxsize=None)
def _trial_factor(n: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return tuple(out.items())


def kernel_size(torsion, n: int) -> int:
    """``|{x : n x = 0}|`` in ``+ Z_m^count``."""
    return prod(gcd(n, m) ** c for m, c in torsion)


def brute_kernel_size(torsion, n: int) -> int:
    """Same as :func:`kernel_size` by listing every element (tiny groups only)."""
    orders = [m for m, c in torsion for _ in range(c)]
    return sum(1 for x in product(*(range(m) for m in orders)) if all(n * xi % m == 0 for xi, m in zip(x, orders)))


def prime_power_counts(torsion) -> dict[int, dict[int, int]]:
    """``c(p^a)`` recovered from kernel sizes alone.

    ``log_p |G[p^j]| = sum_a min(j, a) c(p^a)``, so ``c(p^j)`` is minus the
    second difference of that sequence.
    """
    primes = sorted({p for m, _ in torsion for p in trial_factor(m)})
    out: dict[int, dict[int, int]] = {}
    for p in primes:
        top = max(trial_factor(m).get(p, 0) for m, _ in torsion)
        logs = []
        for j in range(top + 2):
            k, e = kernel_size(torsion, p ** j), 0
            while k % p == 0:
                k //= p
                e += 1
            logs.append(e)
        counts = {}
        for j in range(1, top + 1):
            c = (logs[j] - logs[j - 1]) - (logs[j + 1] - logs[j])
            if c:
                counts[j] = c
        out[p] = counts
    return out


def triangular_degrees(limit_degree: int) -> dict[int, int]:
    return {(d - 1) * (d - 2) // 2: d for d in range(3, limit_degree + 1)}


_TRI = triangular_degrees(2000)


def sphere_predicate(torsion, spin: bool) -> bool:
    """Semi-regular Sasakian rational homology sphere exists (direct definition).

    One order per prime, even multiplicity, half of it triangular of degree
    ``d`` with ``p`` not dividing ``d``, and spin.
    """
    if not spin:
        return False
    for p, counts in prime_power_counts(torsion).items():
        if len(counts) != 1:
            return False
        (c,) = counts.values()
        if c % 2:
            return False
        d = _TRI.get(c // 2)
        if d is None or d % p == 0:
            return False
    return True


def brute_diophantine(coeffs, bounds, m, target, beta_range=None):
    """All ``(beta, b)`` with ``m beta + sum c_i b_i = target`` in the box."""
    beta_range = beta_range if beta_range is not None else range(-m, m + 1)
    boxes = [[b for b in range(1, n) if gcd(b, n) == 1] for n in bounds]
    sols = []
    for b in product(*boxes):
        rest = target - sum(c * x for c, x in zip(coeffs, b))
        if m == 0:
            if rest == 0:
                sols.append((0, b))
        elif rest % m == 0 and rest // m in beta_range:
            sols.append((rest // m, b))
    return sols


def regular_spin_from_parities(canonical, euler) -> bool:
    """Circle bundle with Euler class ``e`` is spin iff ``w_2(X) = 0`` or ``w_2(X) = e`` mod 2."""
    k = [c % 2 for c in canonical]
    e = [c % 2 for c in euler]
    return not any(k) or k == e


def gf2_rank(rows) -> int:
    """Rank over GF(2) by plain row reduction of 0/1 lists."""
    rows = [[x % 2 for x in r] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def sphere_first_clause(torsion, spin: bool) -> str | None:
    """The first hypothesis a semi-regular sphere fails, checked in a fixed order.

    Order: one order per prime, even multiplicities, then primes ascending
    (triangular, then ``p`` not dividing ``d``), then spin. None if all hold.
    """
    counts = prime_power_counts(torsion)
    if any(len(c) > 1 for c in counts.values()):
        return "coprime"
    if any(c % 2 for cs in counts.values() for c in cs.values()):
        return "PairingFailure"
    for p in sorted(counts):
        (c,) = counts[p].values()
        d = _TRI.get(c // 2)
        if d is None:
            return "T"
        if d % p == 0:
            return f"T*_{p}"
    return None if spin else "spin"


def table_oracle(torsion) -> bool:
    """Whether the group is ``Z_m^n`` for one of the listed ``(m, n)``.

    ``G = Z_m^n`` exactly when every prime has a single exponent ``a_p`` and
    the same count ``n``; then ``m = prod p^{a_p}``.
    """
    counts = prime_power_counts(torsion)
    if not counts:
        return True
    shapes = {n for c in counts.values() for n in c.values()}
    if any(len(c) != 1 for c in counts.values()) or len(shapes) != 1:
        return False
    (n,) = shapes
    m = prod(p ** a for p, c in counts.items() for a in c)
    return n == 2 or (m == 2 and n % 2 == 0) or (m, n) in {(5, 4), (4, 4), (3, 4), (3, 6), (3, 8)}

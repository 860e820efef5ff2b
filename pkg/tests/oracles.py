"""Independent oracles shared by the test modules."""


def trial_division_is_prime(n: int, limit: int = 10**6) -> bool:
    """Independent primality oracle: trial division up to ``limit``, then sympy."""
    import sympy

    if n < 2:
        return False
    d = 2
    while d <= limit and d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return bool(sympy.isprime(n))

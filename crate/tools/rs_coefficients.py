"""Taylor coefficients of the Riemann-Siegel remainder functions C0..C4.

Each C_k(p) is expanded around p = 1/2 in the variable w = p - 1/2 and the
resulting coefficients are printed as Rust array literals.
"""
import mpmath as mp

mp.mp.dps = 60
DEG = 90


def series_cos(a, scale, power, deg):
    """Series of cos(a + scale * w**power) up to w**deg."""
    out = [mp.mpf(0)] * (deg + 1)
    ca, sa = mp.cos(a), mp.sin(a)
    k = 0
    while k * power <= deg:
        term = scale ** k / mp.factorial(k)
        # cos(a + y) = sum_k y^k/k! * cos(a + k*pi/2)
        coef = [ca, -sa, -ca, sa][k % 4] * term
        out[k * power] += coef
        k += 1
    return out


def series_div(num, den, deg):
    q = [mp.mpf(0)] * (deg + 1)
    for i in range(deg + 1):
        s = num[i] - sum(q[j] * den[i - j] for j in range(i))
        q[i] = s / den[0]
    return q


def deriv(s, k):
    for _ in range(k):
        s = [s[i] * i for i in range(1, len(s))] + [mp.mpf(0)]
    return s


num = series_cos(-5 * mp.pi / 8, 2 * mp.pi, 2, DEG)
den = [-c for c in series_cos(mp.mpf(0), 2 * mp.pi, 1, DEG)]
psi = series_div(num, den, DEG)

pi = mp.pi
def comb(terms):
    out = [mp.mpf(0)] * (DEG + 1)
    for c, k in terms:
        d = deriv(psi, k)
        for i in range(DEG + 1):
            out[i] += c * d[i]
    return out

C = [
    comb([(1, 0)]),
    comb([(-1 / (96 * pi**2), 3)]),
    comb([(1 / (64 * pi**2), 2), (1 / (18432 * pi**4), 6)]),
    comb([(-1 / (64 * pi**2), 1), (-1 / (3840 * pi**4), 5), (-1 / (5308416 * pi**6), 9)]),
    comb([(1 / (128 * pi**2), 0), (19 / (24576 * pi**4), 4),
          (11 / (5898240 * pi**6), 8), (1 / (2038431744 * pi**8), 12)]),
]


def eval_series(s, w):
    return sum(c * w**i for i, c in enumerate(s))


if __name__ == "__main__":
    import sys
    if len(sys.argv) > 1 and sys.argv[1] == "check":
        # Compare the truncated Riemann-Siegel formula with mpmath's Z(t).
        for t in [14.134725, 18.0, 20.0, 30.0, 50.0, 100.0, 1000.0, 1e4]:
            t = mp.mpf(t)
            a = mp.sqrt(t / (2 * pi))
            n = int(mp.floor(a))
            p = a - n
            th = mp.siegeltheta(t)
            main = 2 * sum(mp.cos(th - t * mp.log(k)) / mp.sqrt(k) for k in range(1, n + 1))
            sign = 1 if (n - 1) % 2 == 0 else -1
            ref = mp.siegelz(t)
            errs = []
            acc = mp.mpf(0)
            for k in range(5):
                acc += eval_series(C[k], p - mp.mpf(1) / 2) * a ** (-k)
                val = main + sign * a ** (-mp.mpf(1) / 2) * acc
                errs.append(mp.nstr(abs(val - ref), 3))
            print(float(t), errs)
    else:
        for k, s in enumerate(C):
            # keep terms that matter on |w| <= 1/2
            last = max(i for i, c in enumerate(s) if abs(c) * mp.mpf(0.5) ** i > mp.mpf(10) ** -22)
            print(f"const C{k}: [f64; {last + 1}] = [")
            for c in s[: last + 1]:
                print(f"    {mp.nstr(c, 20, min_fixed=-1, max_fixed=-1)},")
            print("];")

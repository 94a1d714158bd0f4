"""Independent bisection oracle for the two roots of y - ln y - 1 = e0."""
import mpmath as mp

mp.mp.dps = 60


def f(y, e0):
    return y - mp.log(y) - 1 - e0


def bisect(lo, hi, e0):
    flo = f(lo, e0)
    for _ in range(400):
        mid = (lo + hi) / 2
        fm = f(mid, e0)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


for e0 in ["0.1", "0.5", "1.0"]:
    e = mp.mpf(e0)
    a1 = bisect(mp.mpf("1e-30"), mp.mpf(1), e)
    a2 = bisect(mp.mpf(1), mp.mpf(100), e)
    print(e0, mp.nstr(a1, 20), mp.nstr(a2, 20))

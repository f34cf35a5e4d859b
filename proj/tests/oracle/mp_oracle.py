# Independent high-precision oracle used to freeze expected values in the
# C++ tests. Not part of the build.
from mpmath import mp, mpf, quad, gamma, sin, pi, inf, binomial, nsum, acos, cos

mp.dps = 40


def rem1(x, be):
    """(1+x)^be - 1 - be*x without cancellation."""
    if abs(x) < mpf(1) / 2:
        s, k, term = mpf(0), 2, None
        while True:
            term = binomial(be, k) * x**k
            s += term
            if abs(term) < mpf(10) ** (-mp.dps - 5) * (abs(s) + mpf(10) ** -300):
                return s
            k += 1
    return (1 + x) ** be - 1 - be * x


def rem0(x, be):
    """(1+x)^be - 1."""
    return rem1(x, be) + be * x


def I(al, be, am, ap):
    al, be = mpf(al), mpf(be)
    f1 = lambda x: rem0(x, be) * x ** (-al - 1)
    f2 = lambda x: rem0(-x, be) * x ** (-al - 1)
    f3 = lambda x: ((x - 1) ** be - 1) * x ** (-al - 1)
    return am * quad(f1, [0, mpf(1) / 2, 1, inf]) + ap * (quad(f2, [0, mpf(1) / 2, 1]) + quad(f3, [1, 2, inf]))


def It(al, be, am, ap):
    al, be = mpf(al), mpf(be)
    f1 = lambda x: rem1(x, be) * x ** (-al - 1)
    f2 = lambda x: ((x - 1) ** be - 1 + be * x) * x ** (-al - 1)
    f3 = lambda x: rem1(-x, be) * x ** (-al - 1)
    return ap * quad(f1, [0, mpf(1) / 2, 1, inf]) + am * (quad(f2, [1, 2, inf]) + quad(f3, [0, mpf(1) / 2, 1]))


if __name__ == "__main__":
    for a in [(1.5, .5, 1, 0), (1.5, .5, 1, 1), (1.5, 1, 0, 1), (1.3, .6, .4, 1), (1.7, .9, 1, .2)]:
        print("It", a, It(*a))
    for a in [(.75, .5, 1, 1), (.75, .5, 0, 1), (.75, .3, 0, 1), (.6, .1, .3, 2)]:
        print("I", a, I(*a))
    print("beta_inf(1.5,.5)", acos(mpf(-0.6)) / pi)
    A = cos(pi * mpf(3) / 4); c = mpf(3) / 10
    b = (1 - A**2 - (c + A)**2) / (1 - A**2 + (c + A)**2)
    print("beta_fin(.75,.3)", acos(b) / pi)
    print("2^0.75", mpf(2) ** mpf(0.75))
    # tail mass / drift / variance oracles
    print("tail(0.5,1,1,eps=1)", 2 * quad(lambda z: z ** mpf(-1.5), [1, inf]))
    print("tail(1.5,0,1,1)", quad(lambda z: z ** mpf(-2.5), [1, inf]))
    print("drift(1.5,0,1,.01)", quad(lambda z: z * z ** mpf(-2.5), [mpf(1) / 100, 1, inf]))
    print("var(1.5,1,1,1)", 2 * quad(lambda z: z * z * z ** mpf(-2.5), [0, 1]))

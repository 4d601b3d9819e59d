"""Reference values for the fBm covariance/variance quadratures.

Computed with mpmath at 30 digits; the C++ tests freeze the printed values.
Run: python3 tests/oracles/quadrature_oracle.py
"""
import mpmath as mp

mp.mp.dps = 30


def diff_variance(H, t, eps):
    a = mp.mpf(H) - mp.mpf(1) / 2
    f = lambda u: ((u + eps) ** a - u ** a) ** 2
    pts = [0] + [p for p in (eps, 10 * eps) if p < t] + [t]
    return mp.quad(f, pts)


def liouville_cov(H, t, s, eps):
    a = mp.mpf(H) - mp.mpf(1) / 2
    m = min(t, s)
    f = lambda u: (t - u + eps) ** a * (s - u + eps) ** a
    return mp.quad(f, [0, m / 2, m])


if __name__ == "__main__":
    for H in ("0.3", "0.7"):
        for k in range(4, 11):
            e = mp.mpf(2) ** -k
            print(f"diff_variance H={H} t=1 eps=2^-{k}: {mp.nstr(diff_variance(mp.mpf(H), 1, e), 20)}")
        for e in ("0.1", "0.05", "0.025"):
            print(f"diff_variance H={H} t=1 eps={e}: {mp.nstr(diff_variance(mp.mpf(H), 1, mp.mpf(e)), 20)}")
    for H in ("0.3", "0.7"):
        for e in ("0", "0.05"):
            print(f"liouville_cov H={H} t=1 s=0.5 eps={e}: {mp.nstr(liouville_cov(mp.mpf(H), 1, mp.mpf('0.5'), mp.mpf(e)), 20)}")
    print("var H=0.3 eps=0.1 t=1:", mp.nstr((mp.mpf('1.1') ** mp.mpf('0.6') - mp.mpf('0.1') ** mp.mpf('0.6')) / mp.mpf('0.6'), 20))
    print("var H=0.7 eps=0 t=1:", mp.nstr(1 / mp.mpf('1.4'), 20))

"""Pure-Python kernels; same arithmetic order as the compiled ``_kernels``."""
import numpy as np


def lti_rk4(M, F0, Fm, F1, x0, h):
    M = np.asarray(M, dtype=float).tolist()
    F0 = np.asarray(F0, dtype=float).tolist()
    Fm = np.asarray(Fm, dtype=float).tolist()
    F1 = np.asarray(F1, dtype=float).tolist()
    x = [float(v) for v in x0]
    n = len(x)
    rng = range(n)
    half = 0.5 * h
    sixth = h / 6.0

    def mv(v, f):
        out = []
        for i in rng:
            row = M[i]
            acc = 0.0
            for j in rng:
                acc = acc + row[j] * v[j]
            out.append(acc + f[i])
        return out

    rows = [list(x)]
    for k in range(len(F0)):
        k1 = mv(x, F0[k])
        k2 = mv([x[i] + half * k1[i] for i in rng], Fm[k])
        k3 = mv([x[i] + half * k2[i] for i in rng], Fm[k])
        k4 = mv([x[i] + h * k3[i] for i in rng], F1[k])
        x = [x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in rng]
        rows.append(x)
    return np.array(rows, dtype=np.float64).reshape(len(rows), n)


def gradient_flow(m, phi, gamma, h, theta0, nsub):
    m = np.asarray(m, dtype=float).tolist()
    phi = np.asarray(phi, dtype=float).tolist()
    hs = h / nsub
    half = 0.5 * hs
    sixth = hs / 6.0
    x = float(theta0)
    out = [x]
    for k in range(len(m) - 1):
        dp = phi[k + 1] - phi[k]
        dm = m[k + 1] - m[k]
        for j in range(nsub):
            a0 = j / nsub
            a1 = (j + 0.5) / nsub
            a2 = (j + 1) / nsub
            p0 = phi[k] + dp * a0
            p1 = phi[k] + dp * a1
            p2 = phi[k] + dp * a2
            m0 = m[k] + dm * a0
            m1 = m[k] + dm * a1
            m2 = m[k] + dm * a2
            q1 = -gamma * p0 * (p0 * x - m0)
            q2 = -gamma * p1 * (p1 * (x + half * q1) - m1)
            q3 = -gamma * p1 * (p1 * (x + half * q2) - m1)
            q4 = -gamma * p2 * (p2 * (x + hs * q3) - m2)
            x = x + sixth * (q1 + 2.0 * q2 + 2.0 * q3 + q4)
        out.append(x)
    return np.array(out, dtype=np.float64)

"""Direct dense-inverse GP posterior for the fixed fixtures in test_gp.cpp."""
import numpy as np


def se(a, b, ell, sf2):
    return sf2 * np.exp(-np.sum((a - b) ** 2) / (2 * ell * ell))


def posterior(X, y, xq, ell=1.0, sf2=1.0, sn2=0.01):
    n = len(X)
    K = np.array([[se(X[i], X[j], ell, sf2) for j in range(n)] for i in range(n)]) + sn2 * np.eye(n)
    Kinv = np.linalg.inv(K)
    ks = np.array([se(x, xq, ell, sf2) for x in X])
    return ks @ Kinv @ y, sf2 - ks @ Kinv @ ks


X3 = np.array([[0.0], [1.0], [2.5]])
y3 = np.array([0.5, -0.2, 1.1])
print("three", repr(posterior(X3, y3, np.array([1.7]))))

X5 = np.array([[0.1, 0.2], [0.9, -0.4], [-0.5, 0.6], [1.3, 1.1], [0.0, -1.0]])
y5 = np.array([0.3, 0.8, -0.1, 0.45, 0.05])
print("five", repr(posterior(X5, y5, np.array([0.4, 0.1]), ell=0.8, sf2=1.5, sn2=0.05)))

#pragma once

// Reference algorithms used only by tests. They deliberately avoid the
// library's code paths: Jacobi rotations instead of Eigen's eigensolver,
// structured doubling instead of iterating the filter, Gauss-Jordan
// inversion instead of a Cholesky factor.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Gauss-Jordan inverse with partial pivoting, written out element by element.
inline Mat gauss_jordan_inverse(const Mat& m) {
  const long n = m.rows();
  std::vector<std::vector<double>> a(n, std::vector<double>(2 * n, 0.0));
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      a[i][j] = m(i, j);
    }
    a[i][n + i] = 1.0;
  }
  for (long c = 0; c < n; ++c) {
    long piv = c;
    for (long r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) {
        piv = r;
      }
    }
    std::swap(a[c], a[piv]);
    const double d = a[c][c];
    for (long j = 0; j < 2 * n; ++j) {
      a[c][j] /= d;
    }
    for (long r = 0; r < n; ++r) {
      if (r == c) {
        continue;
      }
      const double f = a[r][c];
      for (long j = 0; j < 2 * n; ++j) {
        a[r][j] -= f * a[c][j];
      }
    }
  }
  Mat inv(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      inv(i, j) = a[i][n + j];
    }
  }
  return inv;
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Returns (eigenvalues descending, eigenvectors as columns).
inline std::pair<Vec, Mat> jacobi_eigen(Mat a) {
  const long n = a.rows();
  Mat v = Mat::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (long p = 0; p < n; ++p) {
      for (long q = p + 1; q < n; ++q) {
        off += a(p, q) * a(p, q);
      }
    }
    if (off < 1e-30) {
      break;
    }
    for (long p = 0; p < n; ++p) {
      for (long q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) {
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (long k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (long k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (long k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<long> order(n);
  for (long i = 0; i < n; ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](long x, long y) { return a(x, x) > a(y, y); });
  Vec vals(n);
  Mat vecs(n, n);
  for (long i = 0; i < n; ++i) {
    vals(i) = a(order[i], order[i]);
    vecs.col(i) = v.col(order[i]);
  }
  return {vals, vecs};
}

/// Steady-state prior covariance of the filter Riccati equation
///   P = A P A^T - A P H^T (H P H^T + R)^-1 H P A^T + Q
/// via the structured doubling algorithm on the dual control problem.
inline Mat dare_prior(const Mat& A, const Mat& H, const Mat& Q, const Mat& R) {
  const long n = A.rows();
  Mat Ak = A.transpose();
  Mat Gk = H.transpose() * gauss_jordan_inverse(R) * H;
  Mat Hk = Q;
  const Mat I = Mat::Identity(n, n);
  for (int it = 0; it < 200; ++it) {
    const Mat W = gauss_jordan_inverse(I + Gk * Hk);
    const Mat Anext = Ak * W * Ak;
    const Mat Gnext = Gk + Ak * W * Gk * Ak.transpose();
    const Mat Hnext = Hk + Ak.transpose() * Hk * W * Ak;
    const double change = (Hnext - Hk).norm() / (1.0 + Hk.norm());
    Ak = Anext;
    Gk = Gnext;
    Hk = Hnext;
    if (change < 1e-15) {
      break;
    }
  }
  return 0.5 * (Hk + Hk.transpose());
}

/// Posterior covariance matching a prior covariance.
inline Mat dare_posterior(const Mat& A, const Mat& H, const Mat& Q, const Mat& R) {
  const Mat Pp = dare_prior(A, H, Q, R);
  const Mat S = H * Pp * H.transpose() + R;
  return Pp - Pp * H.transpose() * gauss_jordan_inverse(S) * H * Pp;
}

/// GP posterior (mean, latent variance) from an explicit inverse of K + sn2 I.
inline std::pair<double, double> gp_direct(const std::vector<Vec>& X, const std::vector<double>& y, const Vec& xq,
                                           double ell, double sf2, double sn2) {
  const long n = static_cast<long>(X.size());
  auto k = [&](const Vec& a, const Vec& b) {
    double d2 = 0.0;
    for (long i = 0; i < a.size(); ++i) d2 += (a(i) - b(i)) * (a(i) - b(i));
    return sf2 * std::exp(-d2 / (2.0 * ell * ell));
  };
  Mat K(n, n);
  Vec ks(n);
  Vec yy(n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) K(i, j) = k(X[i], X[j]) + (i == j ? sn2 : 0.0);
    ks(i) = k(X[i], xq);
    yy(i) = y[i];
  }
  const Mat Kinv = gauss_jordan_inverse(K);
  double mean = 0.0;
  double quad = 0.0;
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      mean += ks(i) * Kinv(i, j) * yy(j);
      quad += ks(i) * Kinv(i, j) * ks(j);
    }
  }
  return {mean, sf2 - quad};
}

}  // namespace oracle

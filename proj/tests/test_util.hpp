#pragma once

// Shared helpers for the test suites: independent finite-difference oracles
// (implemented here, not via the library's own differencing paths),
// closed-form characteristic-polynomial roots for tiny matrices, and random
// matrix constructions with a prescribed spectrum.

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "curvex/curvex.hpp"

namespace testutil {

using curvex::Mat;
using curvex::PointZ;
using curvex::ProblemInstance;
using curvex::Rng;
using curvex::Vec;

inline bool mixed_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

/// Central-difference gradient of the objective value; the oracle for the
/// analytic gradients.
inline Vec fd_gradient(const ProblemInstance& p, const PointZ& z,
                       double h0 = 1e-6) {
  Vec zj = z.joined();
  Vec g(zj.size());
  for (int i = 0; i < zj.size(); ++i) {
    const double h = h0 * (1.0 + std::abs(zj[i]));
    const double saved = zj[i];
    zj[i] = saved + h;
    const double fp = p.value(PointZ::from_joined(zj, p.k));
    zj[i] = saved - h;
    const double fm = p.value(PointZ::from_joined(zj, p.k));
    zj[i] = saved;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Central-difference Jacobian of the analytic gradient; the oracle for
/// analytic Hessian blocks.
inline Mat fd_hessian(const ProblemInstance& p, const PointZ& z,
                      double h0 = 1e-5) {
  Vec zj = z.joined();
  const int n = static_cast<int>(zj.size());
  Mat out(n, n);
  for (int i = 0; i < n; ++i) {
    const double h = h0 * (1.0 + std::abs(zj[i]));
    const double saved = zj[i];
    zj[i] = saved + h;
    const Vec gp = p.grad(PointZ::from_joined(zj, p.k)).joined();
    zj[i] = saved - h;
    const Vec gm = p.grad(PointZ::from_joined(zj, p.k)).joined();
    zj[i] = saved;
    out.col(i) = (gp - gm) / (2.0 * h);
  }
  return out;
}

/// Uniform sample in a centered sub-box of the problem domain.
inline PointZ random_interior_point(const ProblemInstance& p, Rng& rng,
                                    double shrink = 0.9) {
  Vec z(p.k + p.d);
  for (int i = 0; i < z.size(); ++i) {
    const double lo = p.domain.lo[i] * shrink;
    const double hi = p.domain.hi[i] * shrink;
    z[i] = rng.uniform(lo, hi);
  }
  return PointZ::from_joined(z, p.k);
}

/// Random symmetric matrix with the given eigenvalues (Haar-ish rotation).
inline Mat symmetric_with_spectrum(Rng& rng, const Vec& eigs) {
  const int n = static_cast<int>(eigs.size());
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
  return q * eigs.asDiagonal() * q.transpose();
}

/// Roots of the characteristic polynomial for 2x2 and 3x3 real matrices,
/// the cross-check oracle for the QR eigensolver.
inline std::vector<std::complex<double>> char_poly_roots(const Mat& m) {
  using C = std::complex<double>;
  std::vector<C> roots;
  if (m.rows() == 1) {
    roots.push_back(C(m(0, 0), 0.0));
  } else if (m.rows() == 2) {
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const C disc = std::sqrt(C(tr * tr - 4.0 * det, 0.0));
    roots.push_back((C(tr, 0) + disc) / 2.0);
    roots.push_back((C(tr, 0) - disc) / 2.0);
  } else if (m.rows() == 3) {
    // lambda^3 + a2 lambda^2 + a1 lambda + a0, solved by Cardano.
    const double a2 = -m.trace();
    const double a1 = 0.5 * (m.trace() * m.trace() - (m * m).trace());
    const double a0 = -m.determinant();
    const C p = C(a1 - a2 * a2 / 3.0, 0.0);
    const C q = C(2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0, 0.0);
    const C disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    // take whichever branch avoids the cancellation in -q/2 +- disc
    const C s1 = -q / 2.0 + disc;
    const C s2 = -q / 2.0 - disc;
    C u = std::pow(std::abs(s1) >= std::abs(s2) ? s1 : s2, 1.0 / 3.0);
    const C w(-0.5, std::sqrt(3.0) / 2.0);
    for (int k = 0; k < 3; ++k) {
      const C uk = u * std::pow(w, k);
      const C vk = std::abs(uk) < 1e-30 ? C(0, 0) : -p / (3.0 * uk);
      roots.push_back(uk + vk - a2 / 3.0);
    }
  } else {
    throw curvex::ShapeError("char_poly_roots: dimension > 3");
  }
  return roots;
}

inline void sort_complex(std::vector<std::complex<double>>& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

/// The toy problem's three critical points.
inline PointZ toy_z0() { return PointZ{Vec::Constant(1, 0.0), Vec::Constant(1, 0.0)}; }
inline PointZ toy_z1() {
  const double s2 = std::sqrt(2.0);
  return PointZ{Vec::Constant(1, -2.0 - s2), Vec::Constant(1, 2.0 + s2)};
}
inline PointZ toy_z2() {
  const double s2 = std::sqrt(2.0);
  return PointZ{Vec::Constant(1, -2.0 + s2), Vec::Constant(1, 2.0 - s2)};
}

inline PointZ pt(double x, double y) {
  return PointZ{Vec::Constant(1, x), Vec::Constant(1, y)};
}

/// Two-block quadratic with arbitrary symmetric (possibly indefinite)
/// blocks, f = x'Sx/2 + y'Ty/2 + x'Cy; used where known-sign spectra are
/// needed without the SPD restriction of the shipped quadratic family.
inline ProblemInstance indefinite_quadratic(const Mat& s, const Mat& t,
                                            const Mat& c) {
  ProblemInstance p;
  p.name = "indef-quad";
  p.k = static_cast<int>(s.rows());
  p.d = static_cast<int>(t.rows());
  auto ms = std::make_shared<const Mat>(s);
  auto mt = std::make_shared<const Mat>(t);
  auto mc = std::make_shared<const Mat>(c);
  p.value = [ms, mt, mc](const PointZ& z) {
    return 0.5 * z.x.dot(*ms * z.x) + 0.5 * z.y.dot(*mt * z.y) +
           z.x.dot(*mc * z.y);
  };
  p.grad = [ms, mt, mc](const PointZ& z) {
    return PointZ{*ms * z.x + *mc * z.y, *mt * z.y + mc->transpose() * z.x};
  };
  p.hessian = [ms, mt, mc](const PointZ&) {
    return curvex::HessianBlocks{*ms, *mt, *mc};
  };
  p.constants.lip_grad_x = std::max(1.0, s.norm() + c.norm());
  p.constants.lip_grad_y = std::max(1.0, t.norm() + c.norm());
  p.constants.lip_grad_z =
      std::max({p.constants.lip_grad_x, p.constants.lip_grad_y,
                s.norm() + t.norm() + 2 * c.norm()});
  p.constants.grad_bound_x = 100.0 * p.constants.lip_grad_x;
  p.constants.grad_bound_y = 100.0 * p.constants.lip_grad_y;
  p.constants.grad_bound_z = 100.0 * p.constants.lip_grad_z;
  p.domain = curvex::DomainBox::cube(p.k + p.d, -100.0, 100.0);
  return p;
}

}  // namespace testutil

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "curvex/problem.hpp"
#include "curvex/rng.hpp"
#include "curvex/types.hpp"

namespace curvex {

/// The 2-D cubic/quartic test problem
///   f(x, y) = 2x^2 + y^2 + 4xy + (4/3)y^3 - (1/4)y^4
/// with three critical points: (0,0), (-2-sqrt2, 2+sqrt2), (-2+sqrt2, 2-sqrt2).
/// Only the second is a locally optimal saddle.
///
/// Constants are declared over the box [-6, 6]^2:
///   lip_grad_x = |(4,4)| = 4*sqrt(2)            (x-gradient row is constant)
///   lip_grad_y = |(4, -154)| = sqrt(23732)      (|2+8y-3y^2| peaks at y=-6)
///   lip_grad_z = 75 + sqrt(6257)                (full Hessian norm at y=-6)
///   lip_hess_y = lip_hess_z = |8-6y| at y=-6 = 44
///   lip_hess_x = 1                              (true value 0; declared positive)
///   grad_bound_x = 48, grad_bound_y = 372 (at (6,-6)), grad_bound_z = hypot of both
inline ProblemInstance toy_problem() {
  ProblemInstance p;
  p.name = "toy";
  p.k = 1;
  p.d = 1;
  p.value = [](const PointZ& z) {
    const double x = z.x[0], y = z.y[0];
    return 2.0 * x * x + y * y + 4.0 * x * y + (4.0 / 3.0) * y * y * y -
           0.25 * y * y * y * y;
  };
  p.grad = [](const PointZ& z) {
    const double x = z.x[0], y = z.y[0];
    PointZ g = PointZ::zero(1, 1);
    g.x[0] = 4.0 * x + 4.0 * y;
    g.y[0] = 2.0 * y + 4.0 * x + 4.0 * y * y - y * y * y;
    return g;
  };
  p.hessian = [](const PointZ& z) {
    const double y = z.y[0];
    HessianBlocks hb;
    hb.xx = Mat::Constant(1, 1, 4.0);
    hb.yy = Mat::Constant(1, 1, 2.0 + 8.0 * y - 3.0 * y * y);
    hb.xy = Mat::Constant(1, 1, 4.0);
    return hb;
  };
  p.constants.lip_grad_x = 4.0 * std::sqrt(2.0);
  p.constants.lip_grad_y = std::sqrt(16.0 + 154.0 * 154.0);
  p.constants.lip_grad_z = 75.0 + std::sqrt(6257.0);
  p.constants.lip_hess_x = 1.0;
  p.constants.lip_hess_y = 44.0;
  p.constants.lip_hess_z = 44.0;
  p.constants.grad_bound_x = 48.0;
  p.constants.grad_bound_y = 372.0;
  p.constants.grad_bound_z = std::hypot(48.0, 372.0);
  p.constants.validate();
  p.domain = DomainBox::cube(2, -6.0, 6.0);
  return p;
}

/// Quadratic saddle family f(x,y) = x'Ax/2 - y'By/2 + x'Cy with A, B SPD.
/// The origin is the unique locally optimal saddle point; the extreme
/// curvature direction vanishes everywhere, so curvature-exploiting and
/// plain gradient dynamics coincide on this family.
inline ProblemInstance quadratic_saddle(const Mat& a, const Mat& b,
                                        const Mat& c) {
  const int k = static_cast<int>(a.rows());
  const int d = static_cast<int>(b.rows());
  auto check_spd = [](const Mat& m, const char* which) {
    if (m.rows() != m.cols()) throw ShapeError(std::string(which) + " not square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() >= 1e-10) {
      throw ShapeError(std::string(which) + " not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw ShapeError(std::string(which) + " not positive definite");
    }
  };
  check_spd(a, "A");
  check_spd(b, "B");
  if (c.rows() != k || c.cols() != d) throw ShapeError("C has wrong shape");

  ProblemInstance p;
  p.name = "quad";
  p.k = k;
  p.d = d;
  auto pa = std::make_shared<const Mat>(a);
  auto pb = std::make_shared<const Mat>(b);
  auto pc = std::make_shared<const Mat>(c);
  p.value = [pa, pb, pc](const PointZ& z) {
    return 0.5 * z.x.dot(*pa * z.x) - 0.5 * z.y.dot(*pb * z.y) +
           z.x.dot(*pc * z.y);
  };
  p.grad = [pa, pb, pc](const PointZ& z) {
    return PointZ{*pa * z.x + *pc * z.y, -(*pb * z.y) + pc->transpose() * z.x};
  };
  p.hessian = [pa, pb, pc](const PointZ&) {
    return HessianBlocks{*pa, -(*pb), *pc};
  };

  // Exact operator norms; block rows of the Hessian never exceed the full
  // matrix, so the declared ordering holds by construction.
  Mat full(k + d, k + d);
  full.topLeftCorner(k, k) = a;
  full.topRightCorner(k, d) = c;
  full.bottomLeftCorner(d, k) = c.transpose();
  full.bottomRightCorner(d, d) = -b;
  Eigen::SelfAdjointEigenSolver<Mat> es(full);
  const double norm_full = es.eigenvalues().cwiseAbs().maxCoeff();
  Mat row_x(k, k + d), row_y(d, k + d);
  row_x << a, c;
  row_y << c.transpose(), -b;
  const double norm_x = row_x.jacobiSvd().singularValues().maxCoeff();
  const double norm_y = row_y.jacobiSvd().singularValues().maxCoeff();

  const double box_r = 10.0;
  const double z_norm_max = box_r * std::sqrt(static_cast<double>(k + d));
  p.constants.lip_grad_x = norm_x;
  p.constants.lip_grad_y = norm_y;
  // mathematically norm_full dominates the row norms; guard the declared
  // ordering against eigensolver/SVD rounding on boundary cases
  p.constants.lip_grad_z = std::max({norm_full, norm_x, norm_y});
  p.constants.lip_hess_x = 1.0;  // true Hessian Lipschitz constants are 0
  p.constants.lip_hess_y = 1.0;
  p.constants.lip_hess_z = 1.0;
  p.constants.grad_bound_x = norm_x * z_norm_max;
  p.constants.grad_bound_y = norm_y * z_norm_max;
  p.constants.grad_bound_z = norm_full * z_norm_max;
  p.constants.validate();
  p.domain = DomainBox::cube(k + d, -box_r, box_r);
  return p;
}

namespace detail {

inline double stable_sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline double softplus(double t) {  // log(1 + e^t), no overflow
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

/// One-hidden-layer sigmoid MLP over a fixed synthetic dataset, with the
/// adversarial per-sample weights p as the maximization block.
struct RobustMlp {
  Mat data;      // n x f
  Vec labels;    // n, entries 0/1
  int n = 0, f = 0, h = 0;
  double lambda = 1.0;

  int theta_dim() const { return f * h + h + h + 1; }

  struct Forward {
    Mat hid;   // h x n
    Vec out;   // n, pre-sigmoid output o_i
    Vec prob;  // n, sigmoid(o_i)
    Vec ce;    // n, per-sample cross-entropy
  };

  Forward forward(const Vec& theta) const {
    Eigen::Map<const Mat> w1(theta.data(), h, f);
    Eigen::Map<const Vec> b1(theta.data() + f * h, h);
    Eigen::Map<const Vec> w2(theta.data() + f * h + h, h);
    const double b2 = theta[f * h + 2 * h];
    Forward fw;
    fw.hid = w1 * data.transpose();
    fw.hid.colwise() += b1;
    fw.hid = fw.hid.unaryExpr([](double t) { return stable_sigmoid(t); });
    fw.out = fw.hid.transpose() * w2;
    fw.out.array() += b2;
    fw.prob = fw.out.unaryExpr([](double t) { return stable_sigmoid(t); });
    fw.ce.resize(n);
    for (int i = 0; i < n; ++i) {
      fw.ce[i] = labels[i] * softplus(-fw.out[i]) +
                 (1.0 - labels[i]) * softplus(fw.out[i]);
    }
    return fw;
  }

  double value(const PointZ& z) const {
    const Forward fw = forward(z.x);
    const double uniform = 1.0 / n;
    double v = z.y.dot(fw.ce);
    for (int i = 0; i < n; ++i) {
      const double dev = z.y[i] - uniform;
      v -= lambda * dev * dev;
    }
    return v;
  }

  Vec grad_theta(const Vec& theta, const Vec& p) const {
    const Forward fw = forward(theta);
    Eigen::Map<const Vec> w2(theta.data() + f * h + h, h);
    Vec g(theta_dim());
    Eigen::Map<Mat> gw1(g.data(), h, f);
    Eigen::Map<Vec> gb1(g.data() + f * h, h);
    Eigen::Map<Vec> gw2(g.data() + f * h + h, h);
    const Vec r = p.cwiseProduct(fw.prob - labels);  // d f / d out_i
    // back through the hidden layer for all samples at once: h x n
    const Eigen::ArrayXXd s = fw.hid.array() * (1.0 - fw.hid.array());
    const Mat da =
        ((s.colwise() * w2.array()).rowwise() * r.transpose().array()).matrix();
    gw1.noalias() = da * data;
    gb1 = da.rowwise().sum();
    gw2.noalias() = fw.hid * r;
    g[f * h + 2 * h] = r.sum();
    return g;
  }

  Vec grad_p(const Vec& theta, const Vec& p) const {
    const Forward fw = forward(theta);
    const double uniform = 1.0 / n;
    Vec g(n);
    for (int i = 0; i < n; ++i) g[i] = fw.ce[i] - 2.0 * lambda * (p[i] - uniform);
    return g;
  }

  /// d(o_i)/d(theta) for one sample, given a completed forward pass.
  Vec output_jacobian_row(const Vec& theta, const Forward& fw, int i) const {
    Eigen::Map<const Vec> w2(theta.data() + f * h + h, h);
    Vec g(theta_dim());
    Eigen::Map<Mat> gw1(g.data(), h, f);
    Eigen::Map<Vec> gb1(g.data() + f * h, h);
    Eigen::Map<Vec> gw2(g.data() + f * h + h, h);
    const Vec hid = fw.hid.col(i);
    const Vec s = w2.cwiseProduct(hid.cwiseProduct(Vec::Ones(h) - hid));
    gw1.noalias() = s * data.row(i);
    gb1 = s;
    gw2 = hid;
    g[f * h + 2 * h] = 1.0;
    return g;
  }
};

}  // namespace detail

/// Distributionally robust training of a small sigmoid MLP on a synthetic
/// two-blob binary classification set:
///   f(theta, p) = sum_i p_i * ce_i(theta) - lambda * sum_i (p_i - 1/n)^2
/// where ce_i is sample i's cross-entropy. Minimize over the network
/// parameters theta, maximize over the adversarial sample weights p.
///
/// Gradients are analytic (backprop). The theta Hessian block is obtained
/// by central differences of the analytic gradient; the p block is exactly
/// -2*lambda*I and the cross block is analytic.
///
/// Smoothness constants are empirical over-estimates: sampled over the
/// domain box and inflated by a factor of 10.
inline ProblemInstance robust_mlp_problem(std::uint64_t seed, int n_samples,
                                          int n_features, int n_hidden,
                                          double lambda_reg) {
  if (n_samples < 4) throw PreconditionError("robust_mlp: n_samples < 4");
  if (n_hidden < 1) throw PreconditionError("robust_mlp: n_hidden < 1");
  if (!(lambda_reg > 0.0)) throw PreconditionError("robust_mlp: lambda_reg <= 0");

  auto mlp = std::make_shared<detail::RobustMlp>();
  mlp->n = n_samples;
  mlp->f = n_features;
  mlp->h = n_hidden;
  mlp->lambda = lambda_reg;
  mlp->data.resize(n_samples, n_features);
  mlp->labels.resize(n_samples);

  // Two Gaussian blobs separated along the first feature; overlapping
  // enough that the weighted loss surface stays non-convex in theta.
  Rng rng(mix_seed(seed, 1));
  const int n0 = n_samples / 2;
  for (int i = 0; i < n_samples; ++i) {
    const bool cls = i >= n0;
    mlp->labels[i] = cls ? 1.0 : 0.0;
    for (int j = 0; j < n_features; ++j) {
      const double mean = (j == 0) ? (cls ? 1.5 : -1.5) : 0.0;
      mlp->data(i, j) = mean + rng.normal();
    }
  }
  if (mlp->labels.minCoeff() == mlp->labels.maxCoeff()) {
    throw PreconditionError("robust_mlp: degenerate dataset, all labels equal");
  }

  ProblemInstance p;
  p.name = "robust-mlp";
  p.k = mlp->theta_dim();
  p.d = n_samples;
  p.value = [mlp](const PointZ& z) { return mlp->value(z); };
  p.grad = [mlp](const PointZ& z) {
    return PointZ{mlp->grad_theta(z.x, z.y), mlp->grad_p(z.x, z.y)};
  };
  p.hessian = [mlp](const PointZ& z) {
    const int k = mlp->theta_dim();
    HessianBlocks hb;
    hb.xx.resize(k, k);
    Vec theta = z.x;
    for (int i = 0; i < k; ++i) {
      const double step = detail::fd_step(theta[i]);
      const double saved = theta[i];
      theta[i] = saved + step;
      const Vec gp = mlp->grad_theta(theta, z.y);
      theta[i] = saved - step;
      const Vec gm = mlp->grad_theta(theta, z.y);
      theta[i] = saved;
      hb.xx.col(i) = (gp - gm) / (2.0 * step);
    }
    const detail::RobustMlp::Forward fw = mlp->forward(z.x);
    hb.xy.resize(k, mlp->n);
    for (int i = 0; i < mlp->n; ++i) {
      hb.xy.col(i) =
          (fw.prob[i] - mlp->labels[i]) * mlp->output_jacobian_row(z.x, fw, i);
    }
    hb.yy = -2.0 * mlp->lambda * Mat::Identity(mlp->n, mlp->n);
    return hb;
  };

  const int dim = p.k + p.d;
  const double box_r = 8.0;
  p.domain = DomainBox::cube(dim, -box_r, box_r);

  // Empirical constants: sampled suprema over the box, inflated 10x.
  Rng crng(mix_seed(seed, 2));
  double max_grad_x = 0, max_grad_y = 0, max_grad_z = 0;
  double max_hxx = 0, max_hyy = 0, max_hfull = 0;
  double max_lip_hx = 0, max_lip_hy = 0, max_lip_hz = 0;
  Mat prev_xx, prev_yy;
  Vec prev_z;
  const int n_probe = 24;
  for (int s = 0; s < n_probe; ++s) {
    Vec zj(dim);
    for (int i = 0; i < dim; ++i) zj[i] = crng.uniform(-box_r, box_r);
    const PointZ z = PointZ::from_joined(zj, p.k);
    const PointZ g = p.grad(z);
    max_grad_x = std::max(max_grad_x, g.x.norm());
    max_grad_y = std::max(max_grad_y, g.y.norm());
    max_grad_z = std::max(max_grad_z, g.joined().norm());
    const HessianBlocks hb = p.hessian(z);
    Mat full(dim, dim);
    full.topLeftCorner(p.k, p.k) = hb.xx;
    full.topRightCorner(p.k, p.d) = hb.xy;
    full.bottomLeftCorner(p.d, p.k) = hb.xy.transpose();
    full.bottomRightCorner(p.d, p.d) = hb.yy;
    max_hxx = std::max(max_hxx, hb.xx.cwiseAbs().rowwise().sum().maxCoeff() +
                                    hb.xy.cwiseAbs().rowwise().sum().maxCoeff());
    max_hyy = std::max(max_hyy, hb.yy.cwiseAbs().rowwise().sum().maxCoeff() +
                                    hb.xy.cwiseAbs().colwise().sum().maxCoeff());
    max_hfull = std::max(max_hfull, full.cwiseAbs().rowwise().sum().maxCoeff());
    if (s > 0) {
      const double dist = (zj - prev_z).norm();
      max_lip_hx = std::max(max_lip_hx, (hb.xx - prev_xx).norm() / dist);
      max_lip_hy = std::max(max_lip_hy, (hb.yy - prev_yy).norm() / dist);
      max_lip_hz = std::max(max_lip_hz, max_lip_hx + max_lip_hy);
    }
    prev_xx = hb.xx;
    prev_yy = hb.yy;
    prev_z = zj;
  }
  const double inflate = 10.0;
  p.constants.lip_grad_x = inflate * std::max(max_hxx, 1e-3);
  p.constants.lip_grad_y = inflate * std::max(max_hyy, 1e-3);
  p.constants.lip_grad_z =
      inflate * std::max({max_hfull, max_hxx, max_hyy, 1e-3});
  p.constants.lip_hess_x = inflate * std::max(max_lip_hx, 1e-3);
  p.constants.lip_hess_y = inflate * std::max(max_lip_hy, 1e-3);
  p.constants.lip_hess_z = inflate * std::max(max_lip_hz, 1e-3);
  p.constants.grad_bound_x = inflate * std::max(max_grad_x, 1e-3);
  p.constants.grad_bound_y = inflate * std::max(max_grad_y, 1e-3);
  p.constants.grad_bound_z =
      inflate * std::max({max_grad_z, max_grad_x, max_grad_y, 1e-3});
  p.constants.validate();
  return p;
}

}  // namespace curvex

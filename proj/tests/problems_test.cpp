#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "curvex/curvex.hpp"
#include "test_util.hpp"

using namespace curvex;
using namespace testutil;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("toy problem analytic gradient at the critical points") {
  const ProblemInstance toy = toy_problem();
  CHECK(gradient(toy, toy_z0()).norm() < 1e-12);
  CHECK(gradient(toy, toy_z1()).norm() < 1e-12);
  CHECK(gradient(toy, toy_z2()).norm() < 1e-12);
}

TEST_CASE("toy problem gradient and value goldens") {
  const ProblemInstance toy = toy_problem();
  CHECK(evaluate(toy, toy_z0()) == 0.0);

  const PointZ g = gradient(toy, pt(-3.0, -1.0));
  CHECK_THAT(g.x[0], Catch::Matchers::WithinAbs(-16.0, 1e-12));
  CHECK_THAT(g.y[0], Catch::Matchers::WithinAbs(-9.0, 1e-12));
}

TEST_CASE("toy problem Hessian blocks at the critical points") {
  const ProblemInstance toy = toy_problem();

  const HessianBlocks h0 = hessian_blocks(toy, toy_z0());
  CHECK_THAT(h0.xx(0, 0), Catch::Matchers::WithinAbs(4.0, 1e-12));
  CHECK_THAT(h0.yy(0, 0), Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK_THAT(h0.xy(0, 0), Catch::Matchers::WithinAbs(4.0, 1e-12));

  const HessianBlocks h1 = hessian_blocks(toy, toy_z1());
  CHECK_THAT(h1.xx(0, 0), Catch::Matchers::WithinAbs(4.0, 1e-12));
  CHECK_THAT(h1.yy(0, 0), Catch::Matchers::WithinAbs(-4.0 * kSqrt2, 1e-12));

  const HessianBlocks h2 = hessian_blocks(toy, toy_z2());
  CHECK_THAT(h2.yy(0, 0), Catch::Matchers::WithinAbs(4.0 * kSqrt2, 1e-12));
  CHECK_THAT(h2.xx(0, 0), Catch::Matchers::WithinAbs(4.0, 1e-12));
}

TEST_CASE("checked evaluation surface enforces domain and finiteness") {
  const ProblemInstance toy = toy_problem();
  CHECK_THROWS_AS(evaluate(toy, pt(7.0, 0.0)), DomainError);
  CHECK_THROWS_AS(gradient(toy, pt(0.0, -6.5)), DomainError);
  CHECK_THROWS_AS(hessian_blocks(toy, pt(100.0, 0.0)), DomainError);

  ProblemInstance bad = toy_problem();
  bad.value = [](const PointZ&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(evaluate(bad, pt(0.0, 0.0)), EvaluationError);
}

TEST_CASE("finite-difference Hessian fallback matches the analytic blocks") {
  ProblemInstance fd_toy = toy_problem();
  fd_toy.hessian = nullptr;  // force the differencing path
  const ProblemInstance toy = toy_problem();

  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const PointZ z = random_interior_point(fd_toy, rng);
    const HessianBlocks a = hessian_blocks(toy, z);
    const HessianBlocks b = hessian_blocks(fd_toy, z);
    CHECK(mixed_close(a.xx(0, 0), b.xx(0, 0), 1e-6));
    CHECK(mixed_close(a.yy(0, 0), b.yy(0, 0), 1e-6));
    CHECK(mixed_close(a.xy(0, 0), b.xy(0, 0), 1e-6));
  }
}

TEST_CASE("quadratic saddle goldens and input validation") {
  const Mat i1 = Mat::Identity(1, 1);

  SECTION("origin is stationary") {
    const ProblemInstance q = quadratic_saddle(i1, i1, Mat::Zero(1, 1));
    CHECK(gradient(q, pt(0.0, 0.0)).norm() == 0.0);
  }
  SECTION("constant Hessian blocks") {
    const ProblemInstance q = quadratic_saddle(i1, i1, Mat::Constant(1, 1, 1.0));
    const HessianBlocks h = hessian_blocks(q, pt(0.3, -0.7));
    CHECK(h.xx(0, 0) == 1.0);
    CHECK(h.yy(0, 0) == -1.0);
    CHECK(h.xy(0, 0) == 1.0);
  }
  SECTION("hand-evaluated gradient") {
    const ProblemInstance q =
        quadratic_saddle(2.0 * i1, 3.0 * i1, Mat::Zero(1, 1));
    const PointZ g = gradient(q, pt(1.0, 1.0));
    CHECK_THAT(g.x[0], Catch::Matchers::WithinAbs(2.0, 1e-14));
    CHECK_THAT(g.y[0], Catch::Matchers::WithinAbs(-3.0, 1e-14));
  }
  SECTION("rejects invalid blocks") {
    Mat nonsym(2, 2);
    nonsym << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(quadratic_saddle(nonsym, Mat::Identity(2, 2), Mat::Zero(2, 2)),
                    ShapeError);
    CHECK_THROWS_AS(quadratic_saddle(-Mat::Identity(2, 2), Mat::Identity(2, 2),
                                     Mat::Zero(2, 2)),
                    ShapeError);
  }
}

TEST_CASE("robust mlp structure") {
  const ProblemInstance p = robust_mlp_problem(7, 40, 2, 4, 1.0);
  CHECK(p.k == 2 * 4 + 4 + 4 + 1);
  CHECK(p.d == 40);

  SECTION("p-block Hessian is exactly -2 lambda I") {
    Rng rng(5);
    const PointZ z = random_interior_point(p, rng, 0.2);
    const HessianBlocks hb = hessian_blocks(p, z);
    CHECK((hb.yy + 2.0 * Mat::Identity(40, 40)).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("at uniform weights the p-gradient is the per-sample cross-entropy") {
    Rng rng(6);
    PointZ z{0.5 * rng.normal_vec(p.k), Vec::Constant(p.d, 1.0 / 40.0)};
    const PointZ g = gradient(p, z);
    const Vec fd = fd_gradient(p, z);
    for (int i = 0; i < p.d; ++i) {
      CHECK(mixed_close(g.y[i], fd[p.k + i], 1e-6));
      CHECK(g.y[i] >= 0.0);  // cross-entropies are nonnegative
    }
    // at uniform p the objective is the mean cross-entropy and the
    // p-gradient the per-sample one, so their sums must agree
    const double f_uniform = evaluate(p, z);
    CHECK(mixed_close(g.y.sum(), p.d * f_uniform, 1e-9));
  }

  SECTION("rejects bad parameters") {
    CHECK_THROWS_AS(robust_mlp_problem(1, 2, 2, 4, 1.0), PreconditionError);
    CHECK_THROWS_AS(robust_mlp_problem(1, 40, 2, 0, 1.0), PreconditionError);
    CHECK_THROWS_AS(robust_mlp_problem(1, 40, 2, 4, 0.0), PreconditionError);
  }
}

TEST_CASE("analytic gradients agree with central differences of the value") {
  std::vector<ProblemInstance> problems;
  problems.push_back(toy_problem());
  {
    Rng mr(3);
    const Mat a = symmetric_with_spectrum(mr, (Vec(2) << 0.7, 2.5).finished());
    const Mat b = symmetric_with_spectrum(mr, (Vec(3) << 0.5, 1.0, 3.0).finished());
    Mat c(2, 3);
    for (int i = 0; i < c.size(); ++i) c.data()[i] = mr.normal();
    problems.push_back(quadratic_saddle(a, b, c));
  }
  problems.push_back(robust_mlp_problem(13, 8, 2, 2, 0.5));

  for (const ProblemInstance& p : problems) {
    Rng rng(17);
    const int n_points = p.name == "robust-mlp" ? 25 : 100;
    for (int s = 0; s < n_points; ++s) {
      const PointZ z = random_interior_point(p, rng);
      const Vec analytic = gradient(p, z).joined();
      const Vec fd = fd_gradient(p, z);
      for (int i = 0; i < analytic.size(); ++i) {
        INFO("problem " << p.name << " point " << s << " coord " << i);
        CHECK(mixed_close(analytic[i], fd[i], 1e-5));
      }
    }
  }
}

TEST_CASE("analytic Hessian blocks agree with differences of the gradient") {
  std::vector<ProblemInstance> problems;
  problems.push_back(toy_problem());
  {
    Rng mr(4);
    const Mat a = symmetric_with_spectrum(mr, (Vec(2) << 0.9, 1.8).finished());
    const Mat b = symmetric_with_spectrum(mr, (Vec(2) << 0.6, 2.2).finished());
    Mat c(2, 2);
    for (int i = 0; i < c.size(); ++i) c.data()[i] = 0.5 * mr.normal();
    problems.push_back(quadratic_saddle(a, b, c));
  }
  problems.push_back(robust_mlp_problem(13, 6, 2, 2, 0.5));

  for (const ProblemInstance& p : problems) {
    Rng rng(23);
    const int n_points = p.name == "robust-mlp" ? 5 : 25;
    for (int s = 0; s < n_points; ++s) {
      const PointZ z = random_interior_point(p, rng, 0.5);
      const HessianBlocks hb = hessian_blocks(p, z);
      const Mat fd = fd_hessian(p, z);
      const Mat fxx = fd.topLeftCorner(p.k, p.k);
      const Mat fyy = fd.bottomRightCorner(p.d, p.d);
      const Mat fxy = fd.topRightCorner(p.k, p.d);
      INFO("problem " << p.name << " point " << s);
      CHECK((hb.xx - fxx).cwiseAbs().maxCoeff() <=
            1e-4 * (1.0 + fxx.cwiseAbs().maxCoeff()));
      CHECK((hb.yy - fyy).cwiseAbs().maxCoeff() <=
            1e-4 * (1.0 + fyy.cwiseAbs().maxCoeff()));
      CHECK((hb.xy - fxy).cwiseAbs().maxCoeff() <=
            1e-4 * (1.0 + fxy.cwiseAbs().maxCoeff()));
      // square blocks come back symmetric
      CHECK((hb.xx - hb.xx.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((hb.yy - hb.yy.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("declared constants are internally consistent") {
  for (const ProblemInstance& p :
       {toy_problem(), robust_mlp_problem(2, 12, 2, 3, 1.0)}) {
    CHECK_NOTHROW(p.constants.validate());
    CHECK(p.constants.lip_grad_x <= p.constants.lip_grad_z);
    CHECK(p.constants.lip_grad_y <= p.constants.lip_grad_z);
  }
}

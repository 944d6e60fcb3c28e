#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "curvex/curvex.hpp"
#include "test_util.hpp"

using namespace curvex;
using namespace testutil;

namespace {
const PowerIterConfig kNoPower{};
}

TEST_CASE("extreme curvature vanishes at the locally optimal saddle") {
  const ProblemInstance toy = toy_problem();
  const ExtremeCurvature c = extreme_curvature(
      toy, toy_z1(), CurvatureMethod::Dense, kNoPower, 1.0, 1.0);
  CHECK(c.zero());
  CHECK(c.lambda_min_x > 0.0);
  CHECK(c.lambda_max_y < 0.0);
}

TEST_CASE("extreme curvature at the undesired stable point, sgn(0) = +1") {
  const ProblemInstance toy = toy_problem();
  const ExtremeCurvature c = extreme_curvature(
      toy, toy_z0(), CurvatureMethod::Dense, kNoPower, 1.0, 1.0);
  CHECK(c.v_minus.isZero(0.0));  // lambda_min_x = 4 >= 0
  // lambda_max_y = 2, unit eigenvector +1, zero gradient: sgn(0) = +1
  CHECK_THAT(c.v_plus[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(c.source == CurvatureSource::Dense);
}

TEST_CASE("quadratic saddles carry no extreme curvature anywhere") {
  const Mat i1 = Mat::Identity(1, 1);
  const ProblemInstance q = quadratic_saddle(i1, i1, Mat::Zero(1, 1));
  Rng rng(31);
  for (int i = 0; i < 25; ++i) {
    const PointZ z = random_interior_point(q, rng);
    CHECK(extreme_curvature(q, z, CurvatureMethod::Dense, kNoPower).zero());
  }
}

TEST_CASE("curvature direction is zero exactly when the spectra allow it") {
  // indefinite blocks with z-independent spectra: the indicator structure
  // is fully determined by the constructed eigenvalues
  Rng rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    Vec ex(2), ey(2);
    ex << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
    ey << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
    const Mat s = symmetric_with_spectrum(rng, ex);
    const Mat t = symmetric_with_spectrum(rng, ey);
    Mat c(2, 2);
    for (int i = 0; i < 4; ++i) c.data()[i] = 0.3 * rng.normal();
    const ProblemInstance p = indefinite_quadratic(s, t, c);

    const PointZ z = random_interior_point(p, rng, 0.02);
    const ExtremeCurvature curv =
        extreme_curvature(p, z, CurvatureMethod::Dense, kNoPower, 1.0, 1.0);
    const bool spectra_clean =
        curv.lambda_min_x >= 0.0 && curv.lambda_max_y <= 0.0;
    CHECK(curv.zero() == spectra_clean);
  }
}

TEST_CASE("assembly is invariant to the eigenvector sign") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2, d = 3;
    const Vec vx = rng.unit_vec(k);
    const Vec vy = rng.unit_vec(d);
    const PointZ grad{rng.normal_vec(k), rng.normal_vec(d)};
    if (std::abs(vx.dot(grad.x)) <= 1e-12 || std::abs(vy.dot(grad.y)) <= 1e-12)
      continue;
    const double lx = rng.uniform(-3.0, -0.1);
    const double ly = rng.uniform(0.1, 3.0);

    const ExtremeCurvature a = assemble_extreme_curvature(
        lx, vx, ly, vy, grad, 1.0, 2.0, CurvatureSource::Dense);
    const ExtremeCurvature b = assemble_extreme_curvature(
        lx, -vx, ly, -vy, grad, 1.0, 2.0, CurvatureSource::Dense);
    CHECK((a.v_minus - b.v_minus).norm() == 0.0);
    CHECK((a.v_plus - b.v_plus).norm() == 0.0);
  }
}

TEST_CASE("curvature step aligns against descent and with ascent") {
  // v_minus . grad_x <= 0 and v_plus . grad_y >= 0, so the combined
  // direction never opposes the simultaneous descent/ascent field
  const ProblemInstance toy = toy_problem();
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const PointZ z = random_interior_point(toy, rng);
    const PointZ g = toy.grad(z);
    const ExtremeCurvature c =
        extreme_curvature(toy, z, CurvatureMethod::Dense, kNoPower, 1.0, 1.0);
    CHECK(c.v_minus.dot(g.x) <= 1e-15);
    CHECK(c.v_plus.dot(g.y) >= -1e-15);
    const double escape_alignment = -c.v_minus.dot(g.x) + c.v_plus.dot(g.y);
    CHECK(escape_alignment >= -1e-15);
  }
}

TEST_CASE("curvature magnitudes follow the |lambda| / (2 rho) law") {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    Vec ex(3), ey(2);
    ex << rng.uniform(-3.0, -0.5), rng.uniform(-0.4, 1.0), rng.uniform(1.0, 2.0);
    ey << rng.uniform(0.5, 3.0), rng.uniform(-1.0, 0.4);
    const Mat s = symmetric_with_spectrum(rng, ex);
    const Mat t = symmetric_with_spectrum(rng, ey);
    const ProblemInstance p = indefinite_quadratic(s, t, Mat::Zero(3, 2));
    const double rho_x = rng.uniform(0.5, 4.0);
    const double rho_y = rng.uniform(0.5, 4.0);

    const PointZ z = random_interior_point(p, rng, 0.01);
    const ExtremeCurvature c = extreme_curvature(
        p, z, CurvatureMethod::Dense, kNoPower, rho_x, rho_y);
    const double lx = ex.minCoeff();
    const double ly = ey.maxCoeff();
    CHECK_THAT(c.v_minus.norm(),
               Catch::Matchers::WithinAbs(std::abs(lx) / (2.0 * rho_x), 1e-10));
    CHECK_THAT(c.v_plus.norm(),
               Catch::Matchers::WithinAbs(ly / (2.0 * rho_y), 1e-10));
  }
}

TEST_CASE("power-method curvature matches the dense route") {
  Rng rng(67);
  Vec ex(3), ey(3);
  ex << -1.7, 0.4, 2.2;
  ey << -0.8, 0.9, 1.6;
  const Mat s = symmetric_with_spectrum(rng, ex);
  const Mat t = symmetric_with_spectrum(rng, ey);
  const ProblemInstance p = indefinite_quadratic(s, t, Mat::Zero(3, 3));

  PowerIterConfig pc;
  pc.tol = 1e-10;
  pc.seed = 21;
  pc.max_iters = 200000;
  const PointZ z{rng.normal_vec(3), rng.normal_vec(3)};
  const ExtremeCurvature dense =
      extreme_curvature(p, z, CurvatureMethod::Dense, pc, 1.0, 1.0);
  const ExtremeCurvature power =
      extreme_curvature(p, z, CurvatureMethod::Power, pc, 1.0, 1.0);
  CHECK(power.source == CurvatureSource::Power);
  CHECK((dense.v_minus - power.v_minus).norm() < 1e-6);
  CHECK((dense.v_plus - power.v_plus).norm() < 1e-6);
}

TEST_CASE("unconverged power iteration degrades to a zero direction") {
  Rng rng(71);
  Vec ex(4);
  ex << -2.0, -2.0 + 1e-10, 1.0, 1.5;  // no usable extreme gap
  const Mat s = symmetric_with_spectrum(rng, ex);
  const Mat t = -Mat::Identity(2, 2);
  const ProblemInstance p = indefinite_quadratic(s, t, Mat::Zero(4, 2));

  PowerIterConfig pc;
  pc.tol = 1e-13;
  pc.seed = 9;
  pc.max_iters = 2;
  const PointZ z{rng.normal_vec(4), rng.normal_vec(2)};
  const ExtremeCurvature c =
      extreme_curvature(p, z, CurvatureMethod::Power, pc, 1.0, 1.0);
  CHECK(c.source == CurvatureSource::None);
  CHECK(c.zero());
}

TEST_CASE("rho must be positive") {
  const ProblemInstance toy = toy_problem();
  CHECK_THROWS_AS(assemble_extreme_curvature(-1.0, Vec::Constant(1, 1.0), 1.0,
                                             Vec::Constant(1, 1.0),
                                             PointZ::zero(1, 1), 0.0, 1.0,
                                             CurvatureSource::Dense),
                  PreconditionError);
}

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

#include "doctest.h"
#include "mmdnav/vo.hpp"

using namespace mmdnav;

namespace {

Eigen::Vector2d rotate(const Eigen::Vector2d& v, double a) {
  return {std::cos(a) * v.x() - std::sin(a) * v.y(), std::sin(a) * v.x() + std::cos(a) * v.y()};
}

// (n x 3) robot rows (x, y, theta), all equal
SampleSet robot_copies(std::size_t n, const Eigen::Vector2d& p, double theta) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) << p.x(), p.y(), theta;
  return SampleSet(m);
}

SampleSet obstacle_copies(std::size_t n, const Eigen::Vector2d& p, const Eigen::Vector2d& v) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), 4);
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) << p.x(), p.y(), v.x(), v.y();
  return SampleSet(m);
}

SampleSet random_set(std::size_t n, std::size_t d, std::uint64_t seed, double scale) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, scale);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = z(gen);
  return SampleSet(m);
}

}  // namespace

TEST_CASE("vo constraint examples") {
  using V = Eigen::Vector2d;
  CHECK(vo_constraint(V(0, 0), V(1, 0), V(5, 0), V(0, 0), 1.0) == doctest::Approx(1.0));
  CHECK(vo_constraint(V(0, 0), V(0, 1), V(5, 0), V(0, 0), 1.0) == doctest::Approx(-24.0));
  // equal velocities: static limit
  CHECK(vo_constraint(V(0, 0), V(1, 1), V(0.5, 0), V(1, 1), 1.0) == doctest::Approx(0.75));
  CHECK(vo_constraint(V(0, 0), V(0, 0), V(5, 0), V(0, 0), 1.0) == doctest::Approx(-24.0));
  CHECK_THROWS_AS(vo_constraint(V(0, 0), V(1, 0), V(5, 0), V(0, 0), 0.0), std::invalid_argument);
}

TEST_CASE("receding pairs only count current overlap") {
  using V = Eigen::Vector2d;
  // moving straight away from the obstacle
  CHECK(vo_constraint(V(0, 0), V(-1, 0), V(5, 0), V(0, 0), 1.0) == doctest::Approx(-24.0));
  CHECK(vo_constraint(V(0, 0), V(-1, 0), V(0.5, 0), V(0, 0), 1.0) == doctest::Approx(0.75));
  // the head-on value is the closing branch of the same geometry
  CHECK(vo_constraint(V(0, 0), V(1, 0), V(0.5, 0), V(0, 0), 1.0) == doctest::Approx(1.0));
}

TEST_CASE("violation clamps at zero") {
  CHECK(violation(-24.0) == 0.0);
  CHECK(violation(1.0) == 1.0);
  CHECK(violation(0.0) == 0.0);
}

TEST_CASE("property: rigid motions and speed scaling leave f unchanged") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> pos(0.1, 4.0);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Vector2d xr(u(gen), u(gen)), vr(u(gen), u(gen)), xo(u(gen), u(gen)), vo(u(gen), u(gen));
    const double R = pos(gen);
    const double f = vo_constraint(xr, vr, xo, vo, R);
    const double scale = std::max(1.0, std::abs(f));

    const double a = u(gen);
    const double fr = vo_constraint(rotate(xr, a), rotate(vr, a), rotate(xo, a), rotate(vo, a), R);
    CHECK(std::abs(fr - f) <= 1e-9 * scale);

    const Eigen::Vector2d shift(u(gen), u(gen));
    CHECK(std::abs(vo_constraint(xr + shift, vr, xo + shift, vo, R) - f) <= 1e-9 * scale);

    // f depends on v_r - v_o only, and on its direction only
    const double lambda = pos(gen);
    const Eigen::Vector2d v = vr - vo;
    CHECK(std::abs(vo_constraint(xr, lambda * v, xo, Eigen::Vector2d::Zero(), R) - f) <= 1e-9 * scale);
  }
}

TEST_CASE("property: f <= 0 exactly when the relative ray misses the disk") {
  // sampled ray test: the relative path x_r - x_o + s v, s >= 0, enters the disk of radius R
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int checked = 0;
  for (int t = 0; t < 2000; ++t) {
    const Eigen::Vector2d r(u(gen), u(gen)), v(u(gen), u(gen));
    const double R = 1.0;
    const double f = vo_constraint(r, v, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), R);
    if (std::abs(f) < 1e-3) continue;
    // closest point along the forward ray
    const double s = std::max(0.0, -r.dot(v) / v.squaredNorm());
    const bool hits = (r + s * v).norm() < R;
    CHECK((f > 0.0) == hits);
    ++checked;
  }
  CHECK(checked > 1500);
}

TEST_CASE("full pair set ordering") {
  const SampleSet robot = random_set(2, 3, 1, 1.0);
  const SampleSet noise = random_set(2, 2, 2, 0.1);
  const SampleSet obs = random_set(2, 4, 3, 1.0);
  const ViolationVector vv = violation_vector(robot, {1.0, 0.0}, noise, obs, 1.0, 0.1, std::nullopt, 0);
  REQUIRE(vv.size() == 4);
  const std::pair<std::uint32_t, std::uint32_t> expected[] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(vv.pairs[p].robot == expected[p].first);
    CHECK(vv.pairs[p].obstacle == expected[p].second);
    CHECK(vv.weights[p] == 0.25);
  }
}

TEST_CASE("noise-free head-on copies give h = 1") {
  const SampleSet robot = robot_copies(4, Eigen::Vector2d::Zero(), 0.0);
  const SampleSet noise(Eigen::MatrixXd::Zero(4, 2));
  const SampleSet obs = obstacle_copies(3, Eigen::Vector2d(5, 0), Eigen::Vector2d::Zero());
  const ViolationVector vv = violation_vector(robot, {1.0, 0.0}, noise, obs, 1.0, 0.1, std::nullopt, 0);
  REQUIRE(vv.size() == 12);
  for (std::size_t p = 0; p < vv.size(); ++p) {
    CHECK(vv.h[p] == doctest::Approx(1.0));
    CHECK(vv.constraint[p] == doctest::Approx(1.0));
  }
}

TEST_CASE("pair budget draws distinct sorted pairs") {
  const SampleSet robot = random_set(10, 3, 4, 1.0);
  const SampleSet noise = random_set(10, 2, 5, 0.1);
  const SampleSet obs = random_set(10, 4, 6, 1.0);
  const ViolationVector vv = violation_vector(robot, {1.0, 0.2}, noise, obs, 1.0, 0.1, std::size_t{3}, 99);
  REQUIRE(vv.size() == 3);
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::size_t p = 0; p < 3; ++p) {
    seen.insert({vv.pairs[p].robot, vv.pairs[p].obstacle});
    CHECK(vv.weights[p] == doctest::Approx(1.0 / 3.0));
  }
  CHECK(seen.size() == 3);
  CHECK(std::is_sorted(vv.pairs.begin(), vv.pairs.end(), [](const PairIndex& a, const PairIndex& b) {
    return std::pair(a.robot, a.obstacle) < std::pair(b.robot, b.obstacle);
  }));

  CHECK(select_pairs(10, 10, std::size_t{3}, 99) == select_pairs(10, 10, std::size_t{3}, 99));
  CHECK(select_pairs(10, 10, std::size_t{100}, 1).size() == 100);
  CHECK(select_pairs(10, 10, std::size_t{1000}, 1).size() == 100);
  CHECK_THROWS_AS(select_pairs(10, 10, std::size_t{0}, 1), std::invalid_argument);
}

TEST_CASE("property: subsampling is roughly uniform") {
  // each of 25 pairs should be picked about 25 * 5 / 25 = 5 times per 25 draws of 5
  std::vector<int> hits(25, 0);
  for (std::uint64_t s = 0; s < 2000; ++s)
    for (const auto& p : select_pairs(5, 5, std::size_t{5}, s)) ++hits[p.robot * 5 + p.obstacle];
  for (int h : hits) CHECK(std::abs(h - 400) < 80);
}

TEST_CASE("property: full pair vector matches a brute-force double loop") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SampleSet robot = random_set(7, 3, seed, 2.0);
    const SampleSet noise = random_set(7, 2, seed + 100, 0.2);
    const SampleSet obs = random_set(5, 4, seed + 200, 2.0);
    const ControlInput u{0.8, -0.4};
    const double dt = 0.2, R = 1.3;
    const ViolationVector vv = violation_vector(robot, u, noise, obs, R, dt, std::nullopt, 0);
    REQUIRE(vv.size() == 35);
    std::size_t p = 0;
    for (std::size_t i = 0; i < 7; ++i) {
      const double speed = u.v + noise(i, 0);
      const double angle = robot(i, 2) + (u.omega + noise(i, 1)) * dt;
      const Eigen::Vector2d vr(speed * std::cos(angle), speed * std::sin(angle));
      for (std::size_t j = 0; j < 5; ++j, ++p) {
        const Eigen::Vector2d r(robot(i, 0) - obs(j, 0), robot(i, 1) - obs(j, 1));
        const Eigen::Vector2d v = vr - Eigen::Vector2d(obs(j, 2), obs(j, 3));
        double f = R * R - r.squaredNorm();
        if (v.squaredNorm() >= 1e-12 && r.dot(v) < 0.0) f += r.dot(v) * r.dot(v) / v.squaredNorm();
        CHECK(std::abs(vv.constraint[p] - f) <= 1e-12 * std::max(1.0, std::abs(f)));
        CHECK(vv.h[p] == std::max(0.0, vv.constraint[p]));
        CHECK(vv.h[p] >= 0.0);
      }
    }
    double w = 0.0;
    for (double a : vv.weights) w += a;
    CHECK(std::abs(w - 1.0) < 1e-9);
  }
}

TEST_CASE("property: zero noise gives a constant vector") {
  const Eigen::Vector2d xr(0.3, -0.2), xo(4.0, 0.5), vo(-0.5, 0.1);
  const double theta = 0.15;
  const SampleSet robot = robot_copies(6, xr, theta);
  const SampleSet noise(Eigen::MatrixXd::Zero(6, 2));
  const SampleSet obs = obstacle_copies(4, xo, vo);
  const ControlInput u{1.2, 0.3};
  const ViolationVector vv = violation_vector(robot, u, noise, obs, 1.5, 0.1, std::nullopt, 0);
  const double f = vo_constraint(xr, realized_velocity(theta, u, {}, 0.1), xo, vo, 1.5);
  for (double h : vv.h) CHECK(h == violation(f));
}

TEST_CASE("shape errors") {
  const SampleSet robot = random_set(3, 3, 1, 1.0);
  const SampleSet obs = random_set(3, 4, 2, 1.0);
  CHECK_THROWS_AS(violation_vector(robot, {1, 0}, random_set(2, 2, 3, 0.1), obs, 1.0, 0.1, std::nullopt, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(violation_vector(robot, {1, 0}, random_set(3, 2, 3, 0.1), random_set(3, 2, 4, 1.0), 1.0, 0.1,
                                   std::nullopt, 0),
                  std::invalid_argument);
}

#include <doctest.h>

#include <cmath>
#include <limits>

#include "icbf/errors.hpp"
#include "icbf/history.hpp"
#include "icbf/numerics.hpp"

using namespace icbf;

namespace {

Vec scalar(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

double rk4_error_exp(int steps) {
  const double dt = 1.0 / steps;
  Vec x = scalar(1.0);
  const VectorField f = [](const Vec& s, double) { return s; };
  for (int i = 0; i < steps; ++i) x = rk4_step(f, x, i * dt, dt);
  return std::abs(x[0] - std::exp(1.0));
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("linear class-K evaluation") {
    CHECK(classk_eval(ClassKFn::linear(1.0), 2.0) == 2.0);
    CHECK(classk_eval(ClassKFn::linear(1.0), 0.0) == 0.0);
    CHECK(classk_eval(ClassKFn::linear(3.0), -1.5) == -4.5);
  }

  TEST_CASE("linear class-K inverse") {
    CHECK(classk_inverse(ClassKFn::linear(1.0), 5.0) == 5.0);
    CHECK(classk_inverse(ClassKFn::linear(2.0), -4.0) == -2.0);
    CHECK(classk_inverse(ClassKFn::linear(1.0), 0.0) == 0.0);
  }

  TEST_CASE("class-K rejects non-positive gain") {
    CHECK_THROWS_AS(ClassKFn::linear(0.0), MisuseError);
    CHECK_THROWS_AS(ClassKFn::linear(-1.0), MisuseError);
  }

  TEST_CASE("custom class-K without inverse") {
    const auto cubic = ClassKFn::custom([](double h) { return h * h * h; });
    CHECK(cubic(2.0) == 8.0);
    CHECK_FALSE(cubic.has_inverse());
    CHECK_THROWS_AS(classk_inverse(cubic, 1.0), UnsupportedInverse);

    const auto with_inv =
        ClassKFn::custom([](double h) { return h * h * h; }, [](double y) { return std::cbrt(y); });
    CHECK(classk_inverse(with_inv, 27.0) == doctest::Approx(3.0));
  }

  TEST_CASE("class-K is monotone on a grid") {
    const ClassKFn fns[] = {ClassKFn::linear(0.3), ClassKFn::linear(1.0), ClassKFn::linear(7.5),
                            ClassKFn::custom([](double h) { return h * h * h + h; })};
    for (const auto& fn : fns) {
      double prev = -std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 200; ++i) {
        const double h = -10.0 + 0.1 * i;
        const double y = fn(h);
        CHECK(y > prev);
        prev = y;
      }
    }
  }

  TEST_CASE("decay function") {
    const DecayFn mu(1.0, 0.05);
    CHECK(mu(0.0) == 1.0);
    CHECK(mu(20.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(mu(10.0) < mu(5.0));
    CHECK_THROWS_AS(DecayFn(-1.0, 0.05), MisuseError);
    CHECK_THROWS_AS(DecayFn(1.0, 0.0), MisuseError);
  }

  TEST_CASE("rk4 single steps") {
    const VectorField zero = [](const Vec& x, double) { return Vec(Vec::Zero(x.size())); };
    Vec x(2);
    x << 3.0, -1.0;
    CHECK(rk4_step(zero, x, 0.0, 0.1) == x);

    const VectorField one = [](const Vec&, double) { return scalar(1.0); };
    CHECK(rk4_step(one, scalar(0.0), 0.0, 0.1)[0] == doctest::Approx(0.1).epsilon(1e-15));

    const VectorField grow = [](const Vec& s, double) { return s; };
    CHECK(std::abs(rk4_step(grow, scalar(1.0), 0.0, 0.1)[0] - 1.10517091) <= 1e-7);
  }

  TEST_CASE("rk4 is fourth order") {
    for (int n : {10, 20, 40}) {
      const double ratio = rk4_error_exp(n) / rk4_error_exp(2 * n);
      CHECK(ratio >= 14.0);
    }
  }

  TEST_CASE("rk4 reports non-finite output") {
    const VectorField blow = [](const Vec&, double) { return scalar(std::numeric_limits<double>::infinity()); };
    CHECK_THROWS_AS(rk4_step(blow, scalar(0.0), 0.0, 0.1), NumericFailure);
  }

  TEST_CASE("integrator config validates dt") {
    CHECK_THROWS_AS(IntegratorConfig(0.0), MisuseError);
    CHECK_THROWS_AS(IntegratorConfig(-1e-3), MisuseError);
    CHECK(IntegratorConfig(1e-3).dt == 1e-3);
  }
}

TEST_SUITE("history") {
  TEST_CASE("constant history") {
    const InputHistory h(1e-3, 1.2, 0.0, scalar(0.7));
    for (double t : {-1.2, -0.6543, -0.0005, 0.0}) CHECK(h.query(t)[0] == 0.7);
  }

  TEST_CASE("midpoint interpolation") {
    InputHistory h(0.1, 0.1, 0.0, scalar(0.0));
    h.push(scalar(1.0));
    CHECK(h.query(0.05)[0] == doctest::Approx(0.5));
  }

  TEST_CASE("ramp interpolation") {
    const double dt = 1e-3;
    InputHistory h(dt, 0.05, 0.0, scalar(0.0));
    for (int k = 1; k <= 20; ++k) h.push(scalar(2.0 * k * dt));
    CHECK(h.query(0.0105)[0] == doctest::Approx(0.021).epsilon(1e-12));
  }

  TEST_CASE("round trip on the grid is exact") {
    const double dt = 1e-3;
    InputHistory h(dt, 0.5, 0.0, scalar(0.0));
    std::vector<double> pushed;
    for (int k = 1; k <= 400; ++k) {
      const double u = std::sin(0.37 * k) * 1e3 + 1.0 / k;
      pushed.push_back(u);
      h.push(scalar(u));
    }
    for (int k = 1; k <= 400; ++k) CHECK(h.query(k * dt)[0] == pushed[k - 1]);
  }

  TEST_CASE("queries outside the window throw") {
    InputHistory h(1e-3, 0.1, 0.0, scalar(0.0));
    for (int k = 0; k < 500; ++k) h.push(scalar(1.0));
    CHECK_THROWS_AS(h.query(h.t_now() + 0.01), OutOfRangeError);
    CHECK_THROWS_AS(h.query(h.t_now() - 0.2), OutOfRangeError);
    CHECK_NOTHROW(h.query(h.t_now() - 0.1));
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "conicflow/ode.hpp"
#include "oracles.hpp"

using namespace conicflow;

TEST_CASE("exponential decay against the closed form") {
    OdeRhs rhs = [](double, const Vec& y, Vec& dy) { dy = -0.7 * y; };
    Vec y0 = Vec::Constant(1, 2.0);
    OdeOptions opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-13;
    auto sol = integrate_ode(rhs, 0, y0, 3.0, opt);
    REQUIRE(sol.status == OdeStatus::ok);
    CHECK(sol.y_end(0) == doctest::Approx(2.0 * std::exp(-2.1)).epsilon(1e-9));
}

TEST_CASE("dense output tracks the closed form between steps") {
    // y'' = -y via first-order system; solution (sin t, cos t)
    OdeRhs rhs = [](double, const Vec& y, Vec& dy) {
        dy.resize(2);
        dy(0) = y(1);
        dy(1) = -y(0);
    };
    Vec y0(2);
    y0 << 0.0, 1.0;
    OdeOptions opt;
    opt.rtol = 1e-9;
    opt.atol = 1e-12;
    auto sol = integrate_ode(rhs, 0, y0, 10.0, opt);
    REQUIRE(sol.status == OdeStatus::ok);
    for (int i = 0; i <= 1000; ++i) {
        double t = 10.0 * i / 1000.0;
        Vec y = sol.eval(t);
        CHECK(std::abs(y(0) - std::sin(t)) < 2e-8);
        CHECK(std::abs(y(1) - std::cos(t)) < 2e-8);
    }
}

TEST_CASE("event location on a decreasing crossing") {
    OdeRhs rhs = [](double, const Vec&, Vec& dy) { dy = Vec::Constant(1, 1.0); };
    Vec y0 = Vec::Zero(1);
    // event g = 2.5 - y crosses zero downward at t = 2.5
    OdeEvent ev = [](double, const Vec& y) { return 2.5 - y(0); };
    auto sol = integrate_ode(rhs, 0, y0, 10.0, {}, ev);
    REQUIRE(sol.status == OdeStatus::event);
    CHECK(sol.t_end == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(sol.y_end(0) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("blow-up solution reports step underflow with last good state") {
    // y' = y^2 from y(0) = 1 blows up at t = 1
    OdeRhs rhs = [](double, const Vec& y, Vec& dy) { dy = y.array().square().matrix(); };
    Vec y0 = Vec::Constant(1, 1.0);
    OdeOptions opt;
    opt.max_steps = 100000;
    auto sol = integrate_ode(rhs, 0, y0, 2.0, opt);
    CHECK(sol.status != OdeStatus::ok);
    CHECK(sol.t_end <= 1.0);
    CHECK(std::isfinite(sol.y_end(0)));
    CHECK(sol.t_end > 0.9);
}

TEST_CASE("fixed-step RK4 shows fourth-order convergence") {
    OdeRhs rhs = [](double t, const Vec& y, Vec& dy) { dy = Vec::Constant(1, std::cos(t) * y(0)); };
    Vec y0 = Vec::Constant(1, 1.0);
    double exact = std::exp(std::sin(2.0));
    double e1 = std::abs(rk4_integrate(rhs, 0, y0, 2.0, 50)(0) - exact);
    double e2 = std::abs(rk4_integrate(rhs, 0, y0, 2.0, 100)(0) - exact);
    double order = std::log2(e1 / e2);
    CHECK(order > 3.7);
    CHECK(order < 4.3);
}

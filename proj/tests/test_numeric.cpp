#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flatlas/numeric.hpp"
#include "flatlas/parse.hpp"

using namespace flatlas;

namespace {

ControlAffineSystem example1() {
    return make_system("example1", {"x1", "x2", "x3"}, {"u1", "u2"}, {"x2", "x3", "0"},
                       {{"x1", "0", "0"}, {"0", "0", "1"}});
}

ControlAffineSystem example2() {
    return make_system("example2", {"x1", "x2", "x3", "x4"}, {"u1", "u2", "u3"},
                       {"0", "0", "0", "0"},
                       {{"1", "x3", "x4", "0"}, {"0", "0", "0", "1"}, {"0", "0", "x1", "0"}});
}

}  // namespace

TEST_CASE("integrate: constant and exponential") {
    // dx = 0
    auto sys = make_system("still", {"x1", "x2"}, {"u1"}, {"0", "0"}, {{"0", "0"}});
    auto traj = integrate(sys, {1.0, 2.0}, [](double) { return std::vector<double>{0.0}; }, 0, 1,
                          1e-2);
    CHECK(traj.states.back()[0] == doctest::Approx(1.0));
    CHECK(traj.states.back()[1] == doctest::Approx(2.0));

    // dx = x, x(0)=1, x(1) = e
    auto exp_sys = make_system("exp", {"x1", "x2"}, {"u1"}, {"x1", "0"}, {{"0", "1"}});
    auto e = integrate(exp_sys, {1.0, 0.0}, [](double) { return std::vector<double>{0.0}; }, 0, 1,
                       1e-3);
    CHECK(std::abs(e.states.back()[0] - std::exp(1.0)) < 1e-8);
}

TEST_CASE("integrate: Example 1 triangular closed form at u = (0,1)") {
    auto sys = example1();
    auto traj = integrate(sys, {1.0, 0.0, 0.0},
                          [](double) { return std::vector<double>{0.0, 1.0}; }, 0, 1, 1e-3);
    for (std::size_t i = 0; i < traj.samples(); i += 100) {
        const double t = traj.time(i);
        CHECK(traj.states[i][2] == doctest::Approx(t).epsilon(1e-8));
        CHECK(traj.states[i][1] == doctest::Approx(t * t / 2).epsilon(1e-8));
        CHECK(traj.states[i][0] == doctest::Approx(1 + t * t * t / 6).epsilon(1e-8));
    }
}

TEST_CASE("RK4 order: halving dt reduces error by >= 14x") {
    auto exp_sys = make_system("exp", {"x1", "x2"}, {"u1"}, {"x1", "0"}, {{"0", "1"}});
    auto run = [&](double dt) {
        auto t = integrate(exp_sys, {1.0, 0.0}, [](double) { return std::vector<double>{0.0}; }, 0,
                           1, dt);
        return std::abs(t.states.back()[0] - std::exp(1.0));
    };
    const double e1 = run(2e-2);
    const double e2 = run(1e-2);
    CHECK(e1 / e2 >= 14.0);
}

TEST_CASE("bracket_fd_oracle") {
    auto s1 = example1();

    // commuting coordinate fields
    VectorField e1 = coordinate_field(s1.state_frame, 0);
    VectorField e2 = coordinate_field(s1.state_frame, 1);
    auto z = bracket_fd_oracle(e1, e2, {1.0, 1.0, 1.0}, 1e-3);
    for (double c : z) CHECK(std::abs(c) < 1e-6);

    // Example 1 [f0, f2] ~ (0,-1,0) at (1,1,1)
    auto b = bracket_fd_oracle(s1.drift, s1.controls[1], {1.0, 1.0, 1.0}, 1e-3);
    CHECK(std::abs(b[0] - 0.0) < 1e-4);
    CHECK(std::abs(b[1] + 1.0) < 1e-4);
    CHECK(std::abs(b[2] - 0.0) < 1e-4);

    // Example 2 [f1, f3] ~ (0,-1,1,0) at (1,1,1,1)
    auto s2 = example2();
    auto c = bracket_fd_oracle(s2.controls[0], s2.controls[2], {1.0, 1.0, 1.0, 1.0}, 1e-3);
    CHECK(std::abs(c[0]) < 1e-4);
    CHECK(std::abs(c[1] + 1.0) < 1e-4);
    CHECK(std::abs(c[2] - 1.0) < 1e-4);
    CHECK(std::abs(c[3]) < 1e-4);
}

TEST_CASE("flow_box_integrals") {
    auto s1 = example1();

    // f2 = d/dx3: transversal {x3 = 0}, integrals are (x1, x2) up to the
    // orientation of the generated transversal basis
    auto fb = flow_box_integrals(s1.controls[1], {0.0, 0.0, 0.0});
    auto h = fb.evaluate({0.3, -0.2, 0.7});
    REQUIRE(h.size() == 2);
    CHECK(std::abs(h[0] - 0.3) < 1e-8);
    CHECK(std::abs(h[1] + 0.2) < 1e-8);

    // directional derivative along f_k vanishes by construction
    auto s2 = example2();
    auto fb2 = flow_box_integrals(s2.controls[0], {1.0, 1.0, 1.0, 1.0});
    const double eps = 1e-4;
    std::vector<double> x{1.05, 0.95, 1.1, 0.9};
    FloatMap m;
    for (std::size_t i = 0; i < 4; ++i) m[s2.state_frame[i]] = x[i];
    std::vector<double> f1val(4);
    for (std::size_t i = 0; i < 4; ++i) f1val[i] = evaluate_float(s2.controls[0].components[i], m);
    std::vector<double> xp = x, xm = x;
    for (std::size_t i = 0; i < 4; ++i) {
        xp[i] += eps * f1val[i];
        xm[i] -= eps * f1val[i];
    }
    auto hp = fb2.evaluate(xp);
    auto hm = fb2.evaluate(xm);
    for (std::size_t i = 0; i < hp.size(); ++i)
        CHECK(std::abs(hp[i] - hm[i]) / (2 * eps) < 1e-5);

    // vanishing field is rejected
    CHECK_THROWS(flow_box_integrals(zero_field(s1.state_frame), {0.0, 0.0, 0.0}));
}

TEST_CASE("fd_derivative stencils are 4th order") {
    const double dt = 1e-2;
    const int N = 101;
    std::vector<double> samples(N);
    for (int i = 0; i < N; ++i) samples[i] = std::sin(dt * i);
    auto d1 = fd_derivative(samples, dt, 1);
    auto d2 = fd_derivative(samples, dt, 2);
    auto d3 = fd_derivative(samples, dt, 3);
    for (int i = 0; i < N; i += 10) {
        const double t = dt * i;
        CHECK(std::abs(d1[i] - std::cos(t)) < 1e-7);
        CHECK(std::abs(d2[i] + std::sin(t)) < 1e-5);
        CHECK(std::abs(d3[i] + std::cos(t)) < 1e-4);
    }
}

TEST_CASE("newton_solve") {
    // solve x^2 - 2 = 0, y - x = 0
    auto f = [](const std::vector<double>& v) {
        return std::vector<double>{v[0] * v[0] - 2.0, v[1] - v[0]};
    };
    auto jac = [](const std::vector<double>& v) {
        return std::vector<std::vector<double>>{{2 * v[0], 0.0}, {-1.0, 1.0}};
    };
    auto res = newton_solve(f, jac, {1.0, 0.0});
    CHECK(res.converged);
    CHECK(res.x[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(res.x[1] == doctest::Approx(std::sqrt(2.0)));

    // singular Jacobian reports non-convergence instead of blowing up
    auto fs = [](const std::vector<double>& v) { return std::vector<double>{v[0] * 0.0 + 1.0}; };
    auto js = [](const std::vector<double>&) {
        return std::vector<std::vector<double>>{{0.0}};
    };
    CHECK(!newton_solve(fs, js, {1.0}).converged);
}

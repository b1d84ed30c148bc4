#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "platoon/cacc.hpp"
#include "platoon/errors.hpp"

using namespace platoon;
using namespace platoon::cacc;
using dynamics::VehicleState;

namespace {

constexpr double kPi = std::numbers::pi;

// composite Simpson integration of the unit heading along a constant-curvature arc
Vec2 integrate_arc(double theta, double curvature, double length, int n = 2000)
{
    const double h = length / n;
    Vec2 sum{};
    for (int k = 0; k <= n; ++k) {
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        sum = sum + w * heading_vector(theta + curvature * k * h);
    }
    return (h / 3.0) * sum;
}

VehicleState at(double x, double y, double theta, double v)
{
    VehicleState s;
    s.pose = {x, y, theta};
    s.v = v;
    return s;
}

} // namespace

TEST_CASE("desired_spacing_vector examples")
{
    const auto a = desired_spacing_vector({1.0, 0.2}, 5.0, 0.0);
    CHECK(a.x == doctest::Approx(2.0));
    CHECK(a.y == doctest::Approx(0.0));
    const auto b = desired_spacing_vector({1.0, 0.2}, 0.0, kPi / 2);
    CHECK(b.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(b.y == doctest::Approx(1.0));
    const auto c = desired_spacing_vector({1.0, 1.0}, 2.0, kPi / 4);
    CHECK(c.x == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(c.y == doctest::Approx(2.12132).epsilon(1e-6));
    CHECK_THROWS_AS(desired_spacing_vector({1.0, 0.2}, -1.0, 0.0), ArgumentError);
}

TEST_CASE("spacing_error examples")
{
    CHECK(spacing_error({10, 0}, {7, 0}, {2, 0}) == Vec2{1, 0});
    const Vec2 p{1.5, -2.0}, d{0.7, 0.3};
    const auto e = spacing_error(p + d, p, d);
    CHECK(e.x == doctest::Approx(0.0));
    CHECK(e.y == doctest::Approx(0.0));
    CHECK(spacing_error({3, 4}, {1, 1}, {1, 2}) == Vec2{1, 1});
}

TEST_CASE("policy and gain invariants")
{
    CHECK_THROWS_AS(SpacingPolicy(0.0, 0.2), ArgumentError);
    CHECK_THROWS_AS(SpacingPolicy(1.0, -0.1), ArgumentError);
    CHECK_NOTHROW(SpacingPolicy(1.0, 0.0));
    CHECK_THROWS_AS(ControllerGains(0.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(ControllerGains(1.0, -1.0), ArgumentError);
}

TEST_CASE("arc_displacement matches numerical integration of the arc")
{
    const auto s = arc_displacement(0.0, 0.5, 2.0);
    CHECK(s.x == doctest::Approx(1.68294).epsilon(1e-5));
    CHECK(s.y == doctest::Approx(0.91939).epsilon(1e-5));
    const auto ref = integrate_arc(0.0, 0.5, 2.0);
    CHECK(std::abs(s.x - ref.x) < 1e-10);
    CHECK(std::abs(s.y - ref.y) < 1e-10);

    const auto straight = arc_displacement(0.0, 0.0, 2.0);
    CHECK(straight.x == doctest::Approx(2.0));
    CHECK(straight.y == 0.0);
    const auto tiny = arc_displacement(0.0, 1e-9, 2.0);
    CHECK((tiny - Vec2{2.0, 0.0}).norm() < 1e-6);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> th(-kPi, kPi), k(-2.0, 2.0), len(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double t = th(rng), c = k(rng), l = len(rng);
        const auto a = arc_displacement(t, c, l);
        const auto b = integrate_arc(t, c, l);
        CHECK((a - b).norm() < 1e-8);
    }
}

TEST_CASE("lookahead_extension")
{
    LeaderSnapshot leader;
    leader.v = 1.0;
    SUBCASE("straight path needs no extension")
    {
        const auto s = lookahead_extension(leader, 2.0);
        CHECK(s.norm() == 0.0);
    }
    SUBCASE("tiny yaw rate is within 1e-6 of the straight limit")
    {
        leader.omega = 1e-9;
        CHECK(lookahead_extension(leader, 2.0).norm() < 1e-6);
    }
    SUBCASE("non-positive speed falls back to the straight limit")
    {
        leader.v = 0.0;
        leader.omega = 0.5;
        CHECK(lookahead_extension(leader, 2.0).norm() == 0.0);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(lookahead_extension(leader, 0.0), ArgumentError);
        CHECK_THROWS_AS(lookahead_extension(leader, -1.0), ArgumentError);
    }
    SUBCASE("no jump at the small yaw-rate threshold")
    {
        for (double L : {0.5, 1.0, 2.0, 5.0}) {
            leader.omega = kOmegaEps * (1.0 - 1e-9);
            const auto below = lookahead_extension(leader, L);
            leader.omega = kOmegaEps * (1.0 + 1e-9);
            const auto above = lookahead_extension(leader, L);
            CHECK((above - below).norm() <= 1e-6 * L);
        }
    }
    SUBCASE("one-sided continuity towards zero yaw rate")
    {
        // the extension shrinks linearly with the yaw rate
        for (double w : {1e-3, 1e-5, 1e-7, 1e-9}) {
            leader.omega = w;
            const double L = 2.0;
            CHECK(lookahead_extension(leader, L).norm() <= 0.51 * L * L * w / leader.v);
        }
    }
}

TEST_CASE("tracking_error examples")
{
    const SpacingPolicy policy{1.0, 0.2};
    SUBCASE("straight convoy behind its look-ahead point")
    {
        LeaderSnapshot leader;
        leader.p = {4.0, 0.0};
        const auto e = tracking_error(leader, at(1.0, 0.0, 0.0, 5.0), policy);
        CHECK(e.x == doctest::Approx(1.0));
        CHECK(e.y == doctest::Approx(0.0));
    }
    SUBCASE("steady convoy on a line")
    {
        LeaderSnapshot leader;
        leader.p = {10.0, 5.0};
        leader.v = 2.0;
        leader.theta = 0.3;
        const double gap = policy.desired_distance(2.0);
        const Vec2 p = leader.p - gap * heading_vector(0.3);
        const auto e = tracking_error(leader, at(p.x, p.y, 0.3, 2.0), policy);
        CHECK(e.norm() < 1e-12);
    }
    SUBCASE("circular convoy")
    {
        // leader on a circle about the origin, follower on the same circle
        // arc-distance L behind, tangential heading
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> ang(-kPi, kPi), rad(2.0, 30.0), vel(0.5, 5.0);
        for (int i = 0; i < 200; ++i) {
            const double R = rad(rng), v = vel(rng), alpha = ang(rng);
            const double sign = (i % 2 == 0) ? 1.0 : -1.0; // counter-clockwise or clockwise
            const double omega = sign * v / R;
            const double L = policy.desired_distance(v);
            auto on_circle = [&](double a) {
                return Vec2{R * std::cos(a), R * std::sin(a)};
            };
            LeaderSnapshot leader;
            leader.p = on_circle(alpha);
            leader.v = v;
            leader.omega = omega;
            leader.theta = dynamics::normalize_angle(alpha + sign * kPi / 2);
            const double beta = alpha - sign * L / R;
            const Vec2 pf = on_circle(beta);
            const auto e =
                tracking_error(leader, at(pf.x, pf.y, dynamics::normalize_angle(beta + sign * kPi / 2), v), policy);
            CHECK(e.norm() < 0.01 * L);
        }
    }
    SUBCASE("plain look-ahead error without the extension cuts the corner")
    {
        LeaderSnapshot leader;
        leader.v = 1.0;
        leader.omega = 0.5;
        const double L = policy.desired_distance(1.0);
        const double R = 2.0;
        const double phi = L / R;
        // follower on the leader's arc, L behind
        const Vec2 pf{-R * std::sin(phi), R * (1.0 - std::cos(phi))};
        const auto f = at(pf.x, pf.y, -phi, 1.0);
        CHECK(tracking_error(leader, f, policy, true).norm() < 1e-12);
        CHECK(tracking_error(leader, f, policy, false).norm() > 0.05);
    }
}

TEST_CASE("control_law examples")
{
    const ControllerGains g{3.5, 3.5};
    const auto zero = control_law({0, 0}, 0.7, g);
    CHECK(zero.a == 0.0);
    CHECK(zero.omega == 0.0);
    const auto lon = control_law({1, 0}, 0.0, g);
    CHECK(lon.a == doctest::Approx(3.5));
    CHECK(lon.omega == doctest::Approx(0.0));
    const auto rot = control_law({0, 1}, kPi / 2, g);
    CHECK(rot.a == doctest::Approx(3.5));
    CHECK(std::abs(rot.omega) < 1e-12);
}

TEST_CASE("integrate_velocity examples")
{
    ControllerState s;
    s.v_cmd = 1.0;
    CHECK(integrate_velocity(s, 2.0, 0.5, 3.0, 0.05) == doctest::Approx(2.0));
    s.v_cmd = 0.2;
    CHECK(integrate_velocity(s, -10.0, 0.1, 3.0, 0.05) == 0.0);
    s.v_cmd = 2.0;
    CHECK(integrate_velocity(s, 1.0, 0.1, 0.01, 0.05) == 0.0);
    CHECK_THROWS_AS(integrate_velocity(s, 1.0, 0.0, 1.0, 0.05), ArgumentError);
}

TEST_CASE("controller_step")
{
    const ControllerConfig cfg;
    SUBCASE("equilibrium holds speed and steers straight")
    {
        for (double v_star : {0.5, 2.0, 7.0}) {
            LeaderSnapshot leader;
            leader.p = {50.0, 0.0};
            leader.v = v_star;
            const double gap = cfg.policy.desired_distance(v_star);
            ControllerState st;
            st.v_cmd = v_star;
            const auto cmd = controller_step(st, leader, at(50.0 - gap, 0.0, 0.0, v_star), cfg, 0.01);
            CHECK(std::abs(cmd.v - v_star) < 1e-9);
            CHECK(std::abs(cmd.delta) < 1e-9);
        }
    }
    SUBCASE("closed loop converges to the predecessor speed")
    {
        LeaderSnapshot leader;
        leader.v = 2.0;
        leader.p = {5.0, 0.0};
        VehicleState f = at(0.0, 0.0, 0.0, 0.0);
        ControllerState st;
        const double dt = 0.01;
        dynamics::AckermannCommand cmd;
        for (int k = 0; k < 6000; ++k) {
            cmd = controller_step(st, leader, f, cfg, dt);
            f = dynamics::plant_step(dynamics::PlantModel::Unicycle, f, cmd, cfg.params, dt);
            leader.p = leader.p + dt * leader.v * heading_vector(0.0);
        }
        CHECK(cmd.v == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(std::abs(cmd.delta) < 1e-9);
        CHECK(leader.p.x - f.pose.x == doctest::Approx(1.4).epsilon(1e-6));
    }
    SUBCASE("standstill gate")
    {
        LeaderSnapshot leader;
        leader.p = {10.0, 1.0};
        ControllerState st;
        st.v_cmd = 3.0;
        const auto cmd = controller_step(st, leader, at(0, 0, 0, 3.0), cfg, 0.01);
        CHECK(cmd.v == 0.0);
        CHECK(cmd.delta == 0.0);
    }
    SUBCASE("no snapshot yet")
    {
        ControllerState st;
        const auto cmd = controller_step(st, at(0, 0, 0, 0), cfg, 0.01);
        CHECK(cmd.v == 0.0);
        CHECK(cmd.delta == 0.0);
    }
    SUBCASE("bad dt")
    {
        ControllerState st;
        CHECK_THROWS_AS(controller_step(st, LeaderSnapshot{}, at(0, 0, 0, 0), cfg, 0.0), ArgumentError);
    }
}

TEST_CASE("property: velocity never negative and gate latches")
{
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> acc(-20.0, 20.0), lv(0.0, 3.0);
    ControllerState s;
    for (int i = 0; i < 5000; ++i) {
        const double leader_v = (i / 500) % 2 == 0 ? lv(rng) : 0.01;
        const double v = integrate_velocity(s, acc(rng), 0.01, leader_v, 0.05);
        CHECK(v >= 0.0);
        if (leader_v < 0.05) {
            CHECK(v == 0.0);
        }
    }
}

TEST_CASE("property: frame covariance")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> pos(-20.0, 20.0), ang(-kPi, kPi), vel(0.0, 5.0),
        yaw(-0.5, 0.5);
    const SpacingPolicy policy{1.0, 0.2};
    const ControllerGains gains{3.5, 3.5};
    for (int i = 0; i < 500; ++i) {
        LeaderSnapshot leader;
        leader.p = {pos(rng), pos(rng)};
        leader.v = vel(rng);
        leader.theta = ang(rng);
        leader.omega = yaw(rng);
        VehicleState f = at(pos(rng), pos(rng), ang(rng), vel(rng));
        const double phi = ang(rng);
        const Vec2 pivot{pos(rng), pos(rng)};

        LeaderSnapshot rl = leader;
        rl.p = pivot + rotate(leader.p - pivot, phi);
        rl.theta = dynamics::normalize_angle(leader.theta + phi);
        VehicleState rf = f;
        const Vec2 fp = pivot + rotate(Vec2{f.pose.x, f.pose.y} - pivot, phi);
        rf.pose = {fp.x, fp.y, dynamics::normalize_angle(f.pose.theta + phi)};

        const auto a = control_law(tracking_error(leader, f, policy), f.pose.theta, gains);
        const auto b = control_law(tracking_error(rl, rf, policy), rf.pose.theta, gains);
        CHECK(std::abs(a.a - b.a) < 1e-9);
        CHECK(std::abs(a.omega - b.omega) < 1e-9);
    }
}

TEST_CASE("property: gains act linearly")
{
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> e(-5.0, 5.0), ang(-kPi, kPi), k(0.1, 10.0);
    for (int i = 0; i < 500; ++i) {
        const Vec2 err{e(rng), e(rng)};
        const double th = ang(rng), kl = k(rng), kt = k(rng);
        const auto one = control_law(err, th, {kl, kt});
        const auto two = control_law(err, th, {2.0 * kl, kt});
        CHECK(two.a == 2.0 * one.a);
        CHECK(two.omega == one.omega);
    }
}

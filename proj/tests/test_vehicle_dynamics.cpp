#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "platoon/errors.hpp"
#include "platoon/vehicle_dynamics.hpp"

using namespace platoon;
using namespace platoon::dynamics;

namespace {

constexpr double kPi = std::numbers::pi;

// closed-form pose after time t on a constant-curvature path from the origin
Pose arc_pose(double v, double omega, double t)
{
    const double R = v / omega;
    return {R * std::sin(omega * t), R * (1.0 - std::cos(omega * t)), normalize_angle(omega * t)};
}

double bicycle_arc_error(double dt)
{
    VehicleState s;
    const AckermannCommand cmd{1.0, std::atan(0.32)};
    const VehicleParams params{0.32};
    const auto steps = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < steps; ++k) {
        s = bicycle_step(s, cmd, params, dt);
    }
    const Pose ref = arc_pose(1.0, 1.0, 1.0);
    return std::hypot(s.pose.x - ref.x, s.pose.y - ref.y);
}

double unicycle_arc_error(double dt)
{
    VehicleState s;
    s.v = 1.0;
    const auto steps = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < steps; ++k) {
        s = unicycle_step(s, 0.0, 0.5, dt);
    }
    const Pose ref = arc_pose(1.0, 0.5, 1.0);
    return std::hypot(s.pose.x - ref.x, s.pose.y - ref.y);
}

} // namespace

TEST_CASE("normalize_angle maps into (-pi, pi]")
{
    CHECK(normalize_angle(0.0) == 0.0);
    CHECK(normalize_angle(3.0 * kPi) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(normalize_angle(-kPi) == kPi);
    CHECK(normalize_angle(kPi) == kPi);
    CHECK(normalize_angle(2.5 * kPi) == doctest::Approx(0.5 * kPi));
    CHECK_THROWS_AS(normalize_angle(std::nan("")), DomainError);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> any(-100.0, 100.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = any(rng);
        const double n = normalize_angle(a);
        CHECK(n > -kPi);
        CHECK(n <= kPi);
        CHECK(std::abs(std::remainder(a - n, 2.0 * kPi)) < 1e-9);
    }
}

TEST_CASE("bicycle_step examples")
{
    const VehicleParams params{0.32};
    SUBCASE("zero velocity leaves the pose")
    {
        const auto s = bicycle_step(VehicleState{}, {0.0, 0.3}, params, 0.1);
        CHECK(s.pose.x == 0.0);
        CHECK(s.pose.y == 0.0);
        CHECK(s.pose.theta == 0.0);
    }
    SUBCASE("straight line")
    {
        const auto s = bicycle_step(VehicleState{}, {1.0, 0.0}, params, 0.1);
        CHECK(s.pose.x == doctest::Approx(0.1));
        CHECK(s.pose.y == 0.0);
        CHECK(s.pose.theta == 0.0);
        CHECK(s.v == 1.0);
    }
    SUBCASE("unit radius arc after 1 s")
    {
        CHECK(bicycle_arc_error(1e-4) < 1e-2);
    }
    SUBCASE("state carries the command and recomputed yaw rate")
    {
        const auto s = bicycle_step(VehicleState{}, {2.0, 0.1}, {0.5}, 0.01);
        CHECK(s.v == 2.0);
        CHECK(s.delta == 0.1);
        CHECK(s.omega == doctest::Approx(2.0 * std::tan(0.1) / 0.5));
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(bicycle_step(VehicleState{}, {1.0, 0.0}, params, 0.0), ArgumentError);
        CHECK_THROWS_AS(bicycle_step(VehicleState{}, {1.0, 0.0}, params, -0.1), ArgumentError);
        CHECK_THROWS_AS(bicycle_step(VehicleState{}, {std::nan(""), 0.0}, params, 0.1), DomainError);
        CHECK_THROWS(bicycle_step(VehicleState{}, {1.0, kPi / 2}, params, 0.1));
    }
}

TEST_CASE("unicycle_step examples")
{
    SUBCASE("uniform motion")
    {
        VehicleState s;
        s.v = 2.0;
        const auto n = unicycle_step(s, 0.0, 0.0, 0.5);
        CHECK(n.pose.x == doctest::Approx(1.0));
        CHECK(n.v == 2.0);
    }
    SUBCASE("velocity clamp")
    {
        const auto n = unicycle_step(VehicleState{}, -1.0, 0.0, 0.1);
        CHECK(n.v == 0.0);
    }
    SUBCASE("radius 2 circle")
    {
        CHECK(unicycle_arc_error(1e-4) < 1e-2);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(unicycle_step(VehicleState{}, 0.0, 0.0, 0.0), ArgumentError);
        CHECK_THROWS_AS(unicycle_step(VehicleState{}, INFINITY, 0.0, 0.1), DomainError);
    }
}

TEST_CASE("steering conversions")
{
    CHECK(yaw_rate_to_steering(0.0, 3.0, 0.32) == 0.0);
    CHECK(yaw_rate_to_steering(1.0, 1.0, 0.32) == doctest::Approx(0.309703).epsilon(1e-6));
    CHECK(yaw_rate_to_steering(5.0, 1e-6, 0.32) == 0.0);
    CHECK(steering_to_yaw_rate(0.0, 5.0, 0.32) == 0.0);
    CHECK(steering_to_yaw_rate(std::atan(0.32), 1.0, 0.32) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(steering_to_yaw_rate(0.1, 2.0, 0.5) == doctest::Approx(0.401338).epsilon(1e-6));
    CHECK_THROWS_AS(yaw_rate_to_steering(1.0, 1.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(steering_to_yaw_rate(kPi / 2, 1.0, 0.32), ArgumentError);
}

TEST_CASE("property: steering round trip")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> vd(0.1, 20.0), dd(-1.0, 1.0), wd(0.1, 3.0);
    for (int i = 0; i < 5000; ++i) {
        const double v = vd(rng), delta = dd(rng), d = wd(rng);
        const double back = yaw_rate_to_steering(steering_to_yaw_rate(delta, v, d), v, d);
        CHECK(std::abs(back - delta) <= 1e-12);
    }
}

TEST_CASE("property: first-order convergence on the arc")
{
    for (auto* error : {&bicycle_arc_error, &unicycle_arc_error}) {
        const double e1 = error(1e-3);
        const double e2 = error(5e-4);
        const double e3 = error(2.5e-4);
        CHECK(e2 < e1);
        CHECK(e3 < e2);
        // halving dt at most halves the error, up to rounding in the ratio
        CHECK(e1 / e2 <= 2.0 + 1e-3);
        CHECK(e2 / e3 <= 2.0 + 1e-3);
        CHECK(e1 / e2 > 1.8);
    }
}

TEST_CASE("property: zero input is a fixpoint")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(-50.0, 50.0), ang(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        VehicleState s;
        s.pose = {pos(rng), pos(rng), ang(rng)};
        const auto b = bicycle_step(s, {0.0, 0.0}, {0.32}, 0.01);
        const auto u = unicycle_step(s, 0.0, 0.0, 0.01);
        for (const auto& n : {b, u}) {
            CHECK(n.pose.x == s.pose.x);
            CHECK(n.pose.y == s.pose.y);
            CHECK(n.pose.theta == s.pose.theta);
        }
    }
}

TEST_CASE("property: rotational symmetry of trajectories")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> phi_d(-kPi, kPi), v_d(0.0, 5.0), delta_d(-0.5, 0.5),
        a_d(-1.0, 1.0), w_d(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double phi = phi_d(rng);
        VehicleState ref, rot;
        ref.v = rot.v = v_d(rng);
        rot.pose.theta = normalize_angle(phi);
        VehicleState uref = ref, urot = rot;
        for (int k = 0; k < 200; ++k) {
            const AckermannCommand cmd{v_d(rng), delta_d(rng)};
            ref = bicycle_step(ref, cmd, {0.32}, 0.01);
            rot = bicycle_step(rot, cmd, {0.32}, 0.01);
            const double a = a_d(rng), w = w_d(rng);
            uref = unicycle_step(uref, a, w, 0.01);
            urot = unicycle_step(urot, a, w, 0.01);
            for (const auto& [r, q] : {std::pair{ref, rot}, std::pair{uref, urot}}) {
                const double c = std::cos(-phi), s = std::sin(-phi);
                CHECK(std::abs(c * q.pose.x - s * q.pose.y - r.pose.x) < 1e-9);
                CHECK(std::abs(s * q.pose.x + c * q.pose.y - r.pose.y) < 1e-9);
                CHECK(std::abs(normalize_angle(q.pose.theta - phi - r.pose.theta)) < 1e-9);
            }
        }
    }
}

TEST_CASE("plant_step drives the unicycle from an Ackermann command")
{
    VehicleState s;
    const auto n = plant_step(PlantModel::Unicycle, s, {1.0, std::atan(0.32)}, {0.32}, 0.1);
    CHECK(n.v == doctest::Approx(1.0));
    CHECK(n.omega == doctest::Approx(1.0));
    CHECK(n.a == doctest::Approx(10.0));
    const auto b = plant_step(PlantModel::Bicycle, s, {1.0, 0.0}, {0.32}, 0.1);
    CHECK(b.pose.x == doctest::Approx(0.1));
}

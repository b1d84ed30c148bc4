#include "platoon/vehicle_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "platoon/errors.hpp"

namespace platoon::dynamics {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(double value, const char* what)
{
    if (!std::isfinite(value)) {
        throw DomainError(std::string(what) + " is not finite");
    }
}

void require_step(double dt)
{
    require_finite(dt, "dt");
    if (dt <= 0.0) {
        throw ArgumentError("dt must be positive");
    }
}

void require_state(const VehicleState& s)
{
    require_finite(s.pose.x, "state.x");
    require_finite(s.pose.y, "state.y");
    require_finite(s.pose.theta, "state.theta");
    require_finite(s.v, "state.v");
    require_finite(s.a, "state.a");
    require_finite(s.omega, "state.omega");
    require_finite(s.delta, "state.delta");
}

void require_wheelbase(double d)
{
    require_finite(d, "wheelbase");
    if (d <= 0.0) {
        throw ArgumentError("wheelbase must be positive");
    }
}

} // namespace

double normalize_angle(double theta)
{
    require_finite(theta, "angle");
    double r = std::remainder(theta, 2.0 * kPi); // [-pi, pi]
    if (r <= -kPi) {
        r += 2.0 * kPi;
    }
    return r;
}

double steering_to_yaw_rate(double delta, double v, double d)
{
    require_finite(delta, "delta");
    require_finite(v, "v");
    require_wheelbase(d);
    if (std::abs(delta) >= kPi / 2.0) {
        throw ArgumentError("|delta| must be below pi/2");
    }
    return v * std::tan(delta) / d;
}

double yaw_rate_to_steering(double omega, double v, double d)
{
    require_finite(omega, "omega");
    require_finite(v, "v");
    require_wheelbase(d);
    if (v < kSteeringMinSpeed) {
        return 0.0;
    }
    return std::atan(omega * d / v);
}

VehicleState bicycle_step(const VehicleState& state, const AckermannCommand& cmd,
                          const VehicleParams& params, double dt)
{
    require_step(dt);
    require_state(state);
    require_finite(cmd.v, "cmd.v");
    if (cmd.v < 0.0) {
        throw ArgumentError("commanded speed must be non-negative");
    }
    const double omega = steering_to_yaw_rate(cmd.delta, cmd.v, params.wheelbase_d);

    VehicleState next = state;
    next.pose.x = state.pose.x + cmd.v * std::cos(state.pose.theta) * dt;
    next.pose.y = state.pose.y + cmd.v * std::sin(state.pose.theta) * dt;
    next.pose.theta = normalize_angle(state.pose.theta + omega * dt);
    next.a = (cmd.v - state.v) / dt;
    next.v = cmd.v;
    next.delta = cmd.delta;
    next.omega = omega;
    return next;
}

VehicleState unicycle_step(const VehicleState& state, double a, double omega, double dt)
{
    require_step(dt);
    require_state(state);
    require_finite(a, "a");
    require_finite(omega, "omega");

    VehicleState next = state;
    next.pose.x = state.pose.x + state.v * std::cos(state.pose.theta) * dt;
    next.pose.y = state.pose.y + state.v * std::sin(state.pose.theta) * dt;
    next.pose.theta = normalize_angle(state.pose.theta + omega * dt);
    next.v = std::max(0.0, state.v + a * dt);
    next.a = (next.v - state.v) / dt;
    next.omega = omega;
    return next;
}

VehicleState plant_step(PlantModel plant, const VehicleState& state, const AckermannCommand& cmd,
                        const VehicleParams& params, double dt)
{
    if (plant == PlantModel::Bicycle) {
        return bicycle_step(state, cmd, params, dt);
    }
    require_step(dt);
    if (cmd.v < 0.0) {
        throw ArgumentError("commanded speed must be non-negative");
    }
    const double omega = steering_to_yaw_rate(cmd.delta, cmd.v, params.wheelbase_d);
    VehicleState next = unicycle_step(state, (cmd.v - state.v) / dt, omega, dt);
    next.v = cmd.v;
    next.delta = cmd.delta;
    return next;
}

} // namespace platoon::dynamics

#include "platoon/cacc.hpp"

#include <algorithm>
#include <string>

#include "platoon/errors.hpp"

namespace platoon::cacc {

namespace {

// Below this turning angle the closed forms switch to their Taylor series.
constexpr double kSeriesAngle = 1e-3;

void require_finite(double value, const char* what)
{
    if (!std::isfinite(value)) {
        throw DomainError(std::string(what) + " is not finite");
    }
}

// sin(x) / x
double sinc(double x)
{
    if (std::abs(x) < kSeriesAngle) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

// cos(phi) - sin(phi) / phi
double cos_minus_sinc(double phi)
{
    if (std::abs(phi) < kSeriesAngle) {
        const double p2 = phi * phi;
        return -p2 / 3.0 + p2 * p2 / 30.0;
    }
    return std::cos(phi) - std::sin(phi) / phi;
}

// (1 - cos(phi)) / phi - sin(phi)
double versine_ratio_minus_sin(double phi)
{
    if (std::abs(phi) < kSeriesAngle) {
        const double p3 = phi * phi * phi;
        return -phi / 2.0 + p3 / 8.0;
    }
    return (1.0 - std::cos(phi)) / phi - std::sin(phi);
}

} // namespace

SpacingPolicy::SpacingPolicy(double standstill_distance, double time_gap)
    : r_(standstill_distance), h_(time_gap)
{
    require_finite(r_, "standstill distance");
    require_finite(h_, "time gap");
    if (r_ <= 0.0) {
        throw ArgumentError("standstill distance r must be positive");
    }
    if (h_ < 0.0) {
        throw ArgumentError("time gap h must be non-negative");
    }
}

ControllerGains::ControllerGains(double k_long, double k_lat) : k_long_(k_long), k_lat_(k_lat)
{
    require_finite(k_long_, "k_long");
    require_finite(k_lat_, "k_lat");
    if (k_long_ <= 0.0 || k_lat_ <= 0.0) {
        throw ArgumentError("controller gains must be strictly positive");
    }
}

Vec2 desired_spacing_vector(const SpacingPolicy& policy, double v_i, double theta_i)
{
    require_finite(v_i, "v_i");
    require_finite(theta_i, "theta_i");
    if (v_i < 0.0) {
        throw ArgumentError("follower speed must be non-negative");
    }
    return policy.desired_distance(v_i) * heading_vector(theta_i);
}

Vec2 spacing_error(Vec2 p_prev, Vec2 p_i, Vec2 d_r) { return (p_prev - p_i) - d_r; }

Vec2 arc_displacement(double theta, double curvature, double arc_length)
{
    const double phi = curvature * arc_length;
    return arc_length * sinc(phi / 2.0) * heading_vector(theta + phi / 2.0);
}

Vec2 lookahead_extension(const LeaderSnapshot& leader, double L)
{
    require_finite(L, "look-ahead distance");
    if (L <= 0.0) {
        throw ArgumentError("look-ahead distance must be positive");
    }
    if (leader.v <= 0.0) {
        // v <= 0: no usable curvature, straight-line limit
        return {};
    }
    const double phi = L * leader.omega / leader.v;
    const Vec2 local{L * cos_minus_sinc(phi), L * versine_ratio_minus_sin(phi)};
    return rotate(local, leader.theta);
}

Vec2 tracking_error(const LeaderSnapshot& leader, const dynamics::VehicleState& follower,
                    const SpacingPolicy& policy, bool extended_lookahead)
{
    const double L = policy.desired_distance(follower.v);
    const Vec2 s = extended_lookahead ? lookahead_extension(leader, L) : Vec2{};
    const Vec2 p_i{follower.pose.x, follower.pose.y};
    const Vec2 d_r = desired_spacing_vector(policy, follower.v, follower.pose.theta);
    return (leader.p + s) - (p_i + d_r);
}

ControlOutput control_law(Vec2 e_world, double follower_theta, const ControllerGains& gains)
{
    const Vec2 e_body = rotate(e_world, -follower_theta);
    return {gains.k_long() * e_body.x, gains.k_lat() * e_body.y};
}

double integrate_velocity(ControllerState& state, double a, double dt, double leader_v,
                          double standstill_v)
{
    require_finite(dt, "dt");
    if (dt <= 0.0) {
        throw ArgumentError("dt must be positive");
    }
    state.v_cmd = std::max(0.0, state.v_cmd + a * dt);
    if (leader_v < standstill_v) {
        state.v_cmd = 0.0;
    }
    return state.v_cmd;
}

dynamics::AckermannCommand controller_step(ControllerState& state, const LeaderSnapshot& leader,
                                           const dynamics::VehicleState& follower,
                                           const ControllerConfig& cfg, double dt)
{
    const Vec2 e = tracking_error(leader, follower, cfg.policy, cfg.extended_lookahead);
    const ControlOutput out = control_law(e, follower.pose.theta, cfg.gains);
    const double v_cmd = integrate_velocity(state, out.a, dt, leader.v, cfg.standstill_v);
    state.last_update += dt;
    if (v_cmd == 0.0) {
        return {};
    }
    return {v_cmd, dynamics::yaw_rate_to_steering(out.omega, v_cmd, cfg.params.wheelbase_d)};
}

dynamics::AckermannCommand controller_step(ControllerState& state,
                                           const dynamics::VehicleState& follower,
                                           const ControllerConfig& cfg, double dt)
{
    if (!state.last_leader) {
        return {};
    }
    const LeaderSnapshot leader = *state.last_leader;
    return controller_step(state, leader, follower, cfg, dt);
}

LeaderSnapshot snapshot_of(const dynamics::VehicleState& s, double stamp)
{
    return {{s.pose.x, s.pose.y}, s.v, s.a, s.pose.theta, s.omega, stamp};
}

} // namespace platoon::cacc

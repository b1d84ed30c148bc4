#pragma once

#include <cmath>
#include <optional>

#include "platoon/vehicle_dynamics.hpp"

namespace platoon::cacc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;

    double norm() const { return std::hypot(x, y); }
};

/// Rotates v counter-clockwise by angle.
inline Vec2 rotate(Vec2 v, double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 heading_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Time-gap spacing policy: desired distance r + h * v.
class SpacingPolicy {
public:
    SpacingPolicy(double standstill_distance, double time_gap);

    double standstill_distance() const { return r_; }
    double time_gap() const { return h_; }
    double desired_distance(double v) const { return r_ + h_ * v; }

private:
    double r_;
    double h_;
};

class ControllerGains {
public:
    ControllerGains(double k_long, double k_lat);

    double k_long() const { return k_long_; }
    double k_lat() const { return k_lat_; }

private:
    double k_long_;
    double k_lat_;
};

/// Predecessor state as received over the platoon link.
struct LeaderSnapshot {
    Vec2 p;
    double v = 0.0;
    double a = 0.0;
    double theta = 0.0;
    double omega = 0.0;
    double stamp = 0.0; // generation time [s]
};

struct ControllerState {
    double v_cmd = 0.0; // velocity integrator, >= 0
    std::optional<LeaderSnapshot> last_leader;
    double last_update = 0.0;
};

struct ControlOutput {
    double a = 0.0;
    double omega = 0.0;
};

struct ControllerConfig {
    ControllerGains gains{3.5, 3.5};
    SpacingPolicy policy{1.0, 0.2};
    dynamics::VehicleParams params{};
    double standstill_v = 0.05;
    bool extended_lookahead = true;
};

/// Leader speed at or below zero with |omega| >= this disables curvature compensation.
inline constexpr double kOmegaEps = 1e-3;

Vec2 desired_spacing_vector(const SpacingPolicy& policy, double v_i, double theta_i);

Vec2 spacing_error(Vec2 p_prev, Vec2 p_i, Vec2 d_r);

/// Displacement after travelling a signed arc length along a path of constant
/// curvature starting at heading theta. Stable as curvature -> 0.
Vec2 arc_displacement(double theta, double curvature, double arc_length);

/// Extension vector added to the predecessor position. It moves the target to
/// where the follower's straight look-ahead point (distance L along its own
/// heading) lands when the follower sits on the predecessor's current arc, L
/// behind it. Zero on straight paths; zero when the predecessor speed is not
/// positive.
Vec2 lookahead_extension(const LeaderSnapshot& leader, double L);

/// World-frame look-ahead error between the extended predecessor point and the
/// follower's look-ahead point p_i + (r + h v_i) * heading.
Vec2 tracking_error(const LeaderSnapshot& leader, const dynamics::VehicleState& follower,
                    const SpacingPolicy& policy, bool extended_lookahead = true);

/// Body-frame proportional law: a = k_long * e_x, omega = k_lat * e_y.
ControlOutput control_law(Vec2 e_world, double follower_theta, const ControllerGains& gains);

/// Integrates the commanded speed, clamps at zero, and zeroes it while the
/// predecessor is below standstill_v. Returns the new v_cmd.
double integrate_velocity(ControllerState& state, double a, double dt, double leader_v,
                          double standstill_v);

/// One full controller update against the given predecessor snapshot.
dynamics::AckermannCommand controller_step(ControllerState& state, const LeaderSnapshot& leader,
                                           const dynamics::VehicleState& follower,
                                           const ControllerConfig& cfg, double dt);

/// Controller update using the freshest stored snapshot; (0, 0) if none arrived yet.
dynamics::AckermannCommand controller_step(ControllerState& state,
                                           const dynamics::VehicleState& follower,
                                           const ControllerConfig& cfg, double dt);

LeaderSnapshot snapshot_of(const dynamics::VehicleState& s, double stamp);

} // namespace platoon::cacc

#pragma once

#include <numbers>

namespace platoon::dynamics {

/// Planar pose; theta normalized to (-pi, pi].
struct Pose {
    double x = 0.0;     // [m]
    double y = 0.0;     // [m]
    double theta = 0.0; // heading [rad]
};

struct ControlVector {
    double v = 0.0;     // [m/s], >= 0
    double omega = 0.0; // [rad/s]
};

struct AckermannCommand {
    double v = 0.0;     // [m/s], >= 0
    double delta = 0.0; // steering angle [rad], |delta| < pi/2
};

struct VehicleParams {
    double wheelbase_d = 0.32; // [m]
};

struct VehicleState {
    Pose pose;
    double v = 0.0;     // [m/s]
    double a = 0.0;     // [m/s^2]
    double omega = 0.0; // yaw rate [rad/s]
    double delta = 0.0; // steering angle [rad]
};

enum class PlantModel { Unicycle, Bicycle };

/// Below this speed yaw_rate_to_steering returns 0.
inline constexpr double kSteeringMinSpeed = 1e-3;

double normalize_angle(double theta);

/// Forward-Euler step of the kinematic single-track model driven by (v, delta).
/// The command speed is used for the position update and becomes the new state
/// speed; `a` records the speed change over the step.
VehicleState bicycle_step(const VehicleState& state, const AckermannCommand& cmd,
                          const VehicleParams& params, double dt);

/// Forward-Euler step of the unicycle model driven by (a, omega). Speed is
/// clamped at zero from below.
VehicleState unicycle_step(const VehicleState& state, double a, double omega, double dt);

/// delta = atan(omega * d / v); 0 below kSteeringMinSpeed.
double yaw_rate_to_steering(double omega, double v, double d);

/// omega = v * tan(delta) / d.
double steering_to_yaw_rate(double delta, double v, double d);

/// Actuates one plant step from an Ackermann command. For the unicycle plant the
/// command is translated to a = (cmd.v - v) / dt and omega = cmd.v * tan(delta) / d.
VehicleState plant_step(PlantModel plant, const VehicleState& state, const AckermannCommand& cmd,
                        const VehicleParams& params, double dt);

} // namespace platoon::dynamics

#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "platoon/cacc.hpp"
#include "platoon/vehicle_dynamics.hpp"

namespace platoon::comms {

// CAM field ranges. The last value of each range is the "unavailable" sentinel.
inline constexpr int kSpeedMax = 16382;
inline constexpr int kSpeedUnavailable = 16383;
inline constexpr int kHeadingMax = 3600;
inline constexpr int kHeadingUnavailable = 3601;
inline constexpr int kAccelMin = -160;
inline constexpr int kAccelMax = 160;
inline constexpr int kAccelUnavailable = 161;
inline constexpr int kYawRateMin = -32766;
inline constexpr int kYawRateMax = 32766;
inline constexpr int kYawRateUnavailable = 32767;

/// Cooperative awareness message with quantized fields.
///   position: 1 cm, speed: 0.01 m/s, heading: 0.1 deg in [0, 360),
///   acceleration: 0.1 m/s^2, yaw rate: 0.01 deg/s.
struct CamMessage {
    int station_id = 1;
    std::uint32_t seq = 0;
    double gen_time = 0.0;
    std::int64_t pos_x_cm = 0;
    std::int64_t pos_y_cm = 0;
    int speed_q = kSpeedUnavailable;
    int heading_q = kHeadingUnavailable;
    int accel_q = kAccelUnavailable;
    int yawrate_q = kYawRateUnavailable;

    friend bool operator==(const CamMessage&, const CamMessage&) = default;
};

/// CA basic service generation rules.
struct CaServiceConfig {
    double t_gen_min = 0.1;
    double t_gen_max = 1.0;
    double d_pos_thresh = 4.0;
    double d_speed_thresh = 0.5;
    double d_heading_thresh = 4.0 * std::numbers::pi / 180.0;

    void validate() const;
};

struct CaServiceState {
    CaServiceConfig config;
    bool has_transmitted = false;
    double last_tx_time = 0.0;
    cacc::Vec2 last_tx_pos;
    double last_tx_speed = 0.0;
    double last_tx_heading = 0.0;

    /// Records a transmission of `state` at `now` as the new reference.
    void mark_transmitted(const dynamics::VehicleState& state, double now);
};

struct ChannelModel {
    double delay_min = 0.1;
    double delay_max = 0.2;
    double loss_prob = 0.0;
    std::uint64_t rng_seed = 1;

    void validate() const;
};

using ChannelRng = std::mt19937_64;

/// Slack applied to generation-interval comparisons on step-derived times.
inline constexpr double kTimeEps = 1e-9;

bool should_generate_cam(const CaServiceState& svc, const dynamics::VehicleState& state, double now);

CamMessage encode_cam(const dynamics::VehicleState& state, int station_id, std::uint32_t seq,
                      double now);

cacc::LeaderSnapshot decode_cam(const CamMessage& msg);

/// Delivery time, or nullopt when the channel drops the message.
std::optional<double> transmit(const ChannelModel& ch, const CamMessage& msg, double now,
                               ChannelRng& rng);

enum class FilterVerdict { Accept, Reject };

/// Accepts only fresh CAMs from the direct predecessor (station own_id - 1).
FilterVerdict platoon_filter(const CamMessage& msg, int own_id,
                             double latest_gen_time = -std::numeric_limits<double>::infinity());

/// Speed decoded from a quantized field [m/s].
inline double speed_from_q(int q) { return q / 100.0; }

} // namespace platoon::comms

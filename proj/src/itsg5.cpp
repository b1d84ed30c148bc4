#include "platoon/itsg5.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "platoon/errors.hpp"

namespace platoon::comms {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void require_finite(double value, const char* what)
{
    if (!std::isfinite(value)) {
        throw DomainError(std::string(what) + " is not finite");
    }
}

template <typename Int>
Int quantize(double value, double scale, Int lo, Int hi)
{
    // std::round rounds half away from zero
    const double q = std::round(value * scale);
    return static_cast<Int>(std::clamp(q, static_cast<double>(lo), static_cast<double>(hi)));
}

} // namespace

void CaServiceConfig::validate() const
{
    if (!(t_gen_min > 0.0) || !(t_gen_min <= t_gen_max) || !std::isfinite(t_gen_max)) {
        throw ArgumentError("CAM generation interval requires 0 < t_gen_min <= t_gen_max");
    }
    if (!(d_pos_thresh >= 0.0) || !(d_speed_thresh >= 0.0) || !(d_heading_thresh >= 0.0)) {
        throw ArgumentError("CAM trigger thresholds must be non-negative");
    }
}

void CaServiceState::mark_transmitted(const dynamics::VehicleState& state, double now)
{
    has_transmitted = true;
    last_tx_time = now;
    last_tx_pos = {state.pose.x, state.pose.y};
    last_tx_speed = state.v;
    last_tx_heading = state.pose.theta;
}

void ChannelModel::validate() const
{
    if (!(delay_min >= 0.0) || !(delay_min <= delay_max) || !std::isfinite(delay_max)) {
        throw ArgumentError("channel delay requires 0 <= delay_min <= delay_max");
    }
    if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) {
        throw ArgumentError("channel loss_prob must lie in [0, 1]");
    }
}

bool should_generate_cam(const CaServiceState& svc, const dynamics::VehicleState& state, double now)
{
    if (!svc.has_transmitted) {
        return true;
    }
    if (now < svc.last_tx_time) {
        throw OrderingError("CAM generation check at t=" + std::to_string(now) +
                            " precedes last transmission at t=" + std::to_string(svc.last_tx_time));
    }
    const auto& cfg = svc.config;
    const double elapsed = now - svc.last_tx_time;
    if (elapsed < cfg.t_gen_min - kTimeEps) {
        return false;
    }
    if (elapsed >= cfg.t_gen_max - kTimeEps) {
        return true;
    }
    const double moved = (cacc::Vec2{state.pose.x, state.pose.y} - svc.last_tx_pos).norm();
    const double d_speed = std::abs(state.v - svc.last_tx_speed);
    const double d_heading =
        std::abs(dynamics::normalize_angle(state.pose.theta - svc.last_tx_heading));
    return moved >= cfg.d_pos_thresh || d_speed >= cfg.d_speed_thresh ||
           d_heading >= cfg.d_heading_thresh;
}

CamMessage encode_cam(const dynamics::VehicleState& state, int station_id, std::uint32_t seq,
                      double now)
{
    require_finite(state.pose.x, "x");
    require_finite(state.pose.y, "y");
    require_finite(state.pose.theta, "theta");
    require_finite(state.v, "v");
    require_finite(state.a, "a");
    require_finite(state.omega, "omega");
    require_finite(now, "generation time");
    if (station_id < 1) {
        throw ArgumentError("station id must be >= 1");
    }

    double heading_deg = dynamics::normalize_angle(state.pose.theta) * kRadToDeg;
    if (heading_deg < 0.0) {
        heading_deg += 360.0;
    }

    CamMessage msg;
    msg.station_id = station_id;
    msg.seq = seq;
    msg.gen_time = now;
    msg.pos_x_cm = static_cast<std::int64_t>(std::round(state.pose.x * 100.0));
    msg.pos_y_cm = static_cast<std::int64_t>(std::round(state.pose.y * 100.0));
    msg.speed_q = quantize(state.v, 100.0, 0, kSpeedMax);
    msg.heading_q = quantize(heading_deg, 10.0, 0, kHeadingMax);
    if (msg.heading_q == kHeadingMax) {
        msg.heading_q = 0; // 360.0 deg
    }
    msg.accel_q = quantize(state.a, 10.0, kAccelMin, kAccelMax);
    msg.yawrate_q = quantize(state.omega * kRadToDeg, 100.0, kYawRateMin, kYawRateMax);
    return msg;
}

cacc::LeaderSnapshot decode_cam(const CamMessage& msg)
{
    if (msg.speed_q == kSpeedUnavailable) {
        throw UnavailableFieldError("CAM speed unavailable");
    }
    if (msg.heading_q == kHeadingUnavailable) {
        throw UnavailableFieldError("CAM heading unavailable");
    }
    if (msg.accel_q == kAccelUnavailable) {
        throw UnavailableFieldError("CAM acceleration unavailable");
    }
    if (msg.yawrate_q == kYawRateUnavailable) {
        throw UnavailableFieldError("CAM yaw rate unavailable");
    }
    cacc::LeaderSnapshot s;
    s.p = {msg.pos_x_cm / 100.0, msg.pos_y_cm / 100.0};
    s.v = speed_from_q(msg.speed_q);
    s.theta = dynamics::normalize_angle(msg.heading_q / 10.0 / kRadToDeg);
    s.a = msg.accel_q / 10.0;
    s.omega = msg.yawrate_q / 100.0 / kRadToDeg;
    s.stamp = msg.gen_time;
    return s;
}

std::optional<double> transmit(const ChannelModel& ch, const CamMessage& /*msg*/, double now,
                               ChannelRng& rng)
{
    if (!(now >= 0.0)) {
        throw ArgumentError("transmission time must be non-negative");
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double loss_draw = unit(rng);
    const double delay_draw = unit(rng);
    if (loss_draw < ch.loss_prob) {
        return std::nullopt;
    }
    return now + (ch.delay_min + (ch.delay_max - ch.delay_min) * delay_draw);
}

FilterVerdict platoon_filter(const CamMessage& msg, int own_id, double latest_gen_time)
{
    if (own_id < 2) {
        throw NoPredecessorError("vehicle " + std::to_string(own_id) + " has no predecessor");
    }
    if (msg.station_id == own_id - 1 && msg.gen_time > latest_gen_time) {
        return FilterVerdict::Accept;
    }
    return FilterVerdict::Reject;
}

} // namespace platoon::comms

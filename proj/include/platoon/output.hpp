#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "platoon/cosim.hpp"
#include "platoon/metrics.hpp"
#include "platoon/scenario.hpp"

namespace platoon::output {

inline constexpr const char* kTraceHeader = "t,vehicle_id,x,y,theta,v,a,omega,delta,e_long,e_lat";
inline constexpr const char* kCamLogHeader =
    "tx_time,rx_time,station_id,seq,speed_q,heading_q,accel_q,yawrate_q,dropped";
inline constexpr const char* kReceivedHeader = "t,true_v,received_v,channel";

void write_trace_csv(const std::filesystem::path& path, std::span<const cosim::TraceRow> rows);
void write_cam_log_csv(const std::filesystem::path& path, std::span<const cosim::CamLogRow> rows);
void write_received_signal_csv(const std::filesystem::path& path,
                               std::span<const scenario::ReceivedSignalRow> rows);

std::string metrics_json(const scenario::ScenarioResult& result);
void write_metrics_json(const std::filesystem::path& path, const scenario::ScenarioResult& result);

/// trace.csv, cam_log.csv, received_signal.csv and metrics.json under dir.
void write_run_outputs(const std::filesystem::path& dir, const scenario::ScenarioResult& result);

} // namespace platoon::output

#include "platoon/output.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "platoon/errors.hpp"

namespace platoon::output {

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

std::string opt(const std::optional<double>& v, const char* pattern = "{:.6f}")
{
    return v ? fmt::format(fmt::runtime(pattern), *v) : std::string{};
}

nlohmann::ordered_json opt_json(const std::optional<double>& v)
{
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

} // namespace

void write_trace_csv(const std::filesystem::path& path, std::span<const cosim::TraceRow> rows)
{
    auto out = open_out(path);
    out << kTraceHeader << '\n';
    for (const auto& r : rows) {
        out << fmt::format("{:.4f},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", r.t,
                           r.vehicle_id, r.x, r.y, r.theta, r.v, r.a, r.omega, r.delta, opt(r.e_long),
                           opt(r.e_lat));
    }
}

void write_cam_log_csv(const std::filesystem::path& path, std::span<const cosim::CamLogRow> rows)
{
    auto out = open_out(path);
    out << kCamLogHeader << '\n';
    for (const auto& r : rows) {
        out << fmt::format("{:.6f},{},{},{},{},{},{},{},{}\n", r.tx_time, opt(r.rx_time), r.station_id,
                           r.seq, r.speed_q, r.heading_q, r.accel_q, r.yawrate_q, r.dropped ? 1 : 0);
    }
}

void write_received_signal_csv(const std::filesystem::path& path,
                               std::span<const scenario::ReceivedSignalRow> rows)
{
    auto out = open_out(path);
    out << kReceivedHeader << '\n';
    for (const auto& r : rows) {
        out << fmt::format("{:.4f},{:.6f},{},{}\n", r.t, r.true_v, opt(r.received_v),
                           cosim::to_string(r.channel));
    }
}

std::string metrics_json(const scenario::ScenarioResult& result)
{
    using nlohmann::ordered_json;
    const auto& cfg = result.config;
    const auto& m = result.metrics;

    ordered_json j;
    j["scenario"] = {
        {"preset", scenario::to_string(cfg.preset)},
        {"channel", cosim::to_string(cfg.channel)},
        {"plant", cfg.plant == dynamics::PlantModel::Unicycle ? "unicycle" : "bicycle"},
        {"n_vehicles", cfg.n_vehicles},
        {"dt", cfg.dt},
        {"duration", cfg.duration},
        {"seed", cfg.seed},
        {"steps", result.steps},
    };
    ordered_json followers = ordered_json::array();
    for (const auto& f : m.followers) {
        followers.push_back({
            {"vehicle_id", f.vehicle_id},
            {"mean_abs_e_long", f.mean_abs_e_long},
            {"max_abs_e_long", f.max_abs_e_long},
            {"steady_abs_e_long", f.steady_abs_e_long},
            {"amplification_ratio", opt_json(f.amplification_ratio)},
            {"cross_track_rmse", f.cross_track_rmse},
            {"cross_track_rmse_leader", f.cross_track_rmse_leader},
        });
    }
    j["followers"] = followers;
    if (m.amplification_window) {
        const auto& w = *m.amplification_window;
        j["amplification_window"] = {{"t0", w.t0}, {"t1", w.t1}, {"v_ss", w.v_ss}};
    } else {
        j["amplification_window"] = nullptr;
    }

    std::optional<double> lag;
    try {
        lag = scenario::received_speed_lag(result);
    } catch (const std::exception&) {
        lag.reset();
    }
    j["channel"] = {
        {"mean_delay", m.channel.mean_delay},
        {"generated", m.channel.generated},
        {"delivery_count", m.channel.delivery_count},
        {"drop_count", m.channel.drop_count},
        {"accepted", m.channel.accepted},
        {"rejected", m.channel.rejected},
        {"mean_inter_arrival", m.channel.mean_inter_arrival},
        {"received_speed_lag", opt_json(lag)},
    };
    return j.dump(2) + "\n";
}

void write_metrics_json(const std::filesystem::path& path, const scenario::ScenarioResult& result)
{
    auto out = open_out(path);
    out << metrics_json(result);
}

void write_run_outputs(const std::filesystem::path& dir, const scenario::ScenarioResult& result)
{
    std::filesystem::create_directories(dir);
    write_trace_csv(dir / "trace.csv", result.trace);
    write_cam_log_csv(dir / "cam_log.csv", result.cam_log);
    const auto rows = scenario::received_signal_rows(result);
    write_received_signal_csv(dir / "received_signal.csv", rows);
    write_metrics_json(dir / "metrics.json", result);
}

} // namespace platoon::output

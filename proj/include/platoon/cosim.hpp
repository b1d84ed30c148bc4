#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <utility>
#include <variant>
#include <vector>

#include "platoon/cacc.hpp"
#include "platoon/itsg5.hpp"
#include "platoon/vehicle_dynamics.hpp"

namespace platoon::cosim {

/// Simulation time in integer microseconds.
using Micros = std::int64_t;

Micros to_micros(double seconds);
inline double to_seconds(Micros us) { return static_cast<double>(us) / 1e6; }

enum class EventKind { CamDelivery, DirectDelivery, Custom };

const char* to_string(EventKind kind);

struct SimEvent {
    Micros time_us = 0;
    std::uint64_t seq = 0; // assigned by the queue
    int target = 0;        // receiving vehicle id
    EventKind kind = EventKind::Custom;
    std::variant<std::monostate, comms::CamMessage, cacc::LeaderSnapshot> payload;
    int source = 0;
    std::int64_t tag = -1; // index of the originating cam_log row, if any

    double time() const { return to_seconds(time_us); }
};

/// Pending network events ordered by (time, seq). Events never enter before
/// the last drained physics time.
class EventQueue {
public:
    /// Enqueues `event`, assigning the next tie-break sequence number.
    /// Throws CausalityError for events earlier than the current floor.
    std::uint64_t schedule(SimEvent event);

    /// Removes and returns, in order, every event with time <= physics_time_us,
    /// and raises the scheduling floor to physics_time_us.
    std::vector<SimEvent> drain_due(Micros physics_time_us);

    const SimEvent* peek() const { return heap_.empty() ? nullptr : &heap_.top(); }
    SimEvent pop();
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    Micros floor() const { return floor_us_; }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const
        {
            return std::pair(a.time_us, a.seq) > std::pair(b.time_us, b.seq);
        }
    };
    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    Micros floor_us_ = 0;
};

/// Physics clock; time is always step_count * dt_us.
class SimClock {
public:
    explicit SimClock(Micros dt_us);

    Micros now_us() const { return step_count_ * dt_us_; }
    double physics_time() const { return to_seconds(now_us()); }
    Micros dt_us() const { return dt_us_; }
    double dt() const { return to_seconds(dt_us_); }
    std::int64_t step_count() const { return step_count_; }
    void advance() { ++step_count_; }

private:
    Micros dt_us_;
    std::int64_t step_count_ = 0;
};

/// Per-vehicle communication module: CA service state and channel stream.
struct CommModule {
    comms::CaServiceState service;
    comms::ChannelRng rng;
    std::uint32_t next_seq = 0;
};

struct ModuleDefaults {
    comms::CaServiceConfig service;
    std::uint64_t channel_seed = 1;
};

/// Spawns communication modules on first use; at most one per vehicle id.
class ModuleRegistry {
public:
    CommModule& ensure_module(int vehicle_id, const ModuleDefaults& defaults);
    bool contains(int vehicle_id) const { return modules_.contains(vehicle_id); }
    std::size_t size() const { return modules_.size(); }

private:
    std::map<int, CommModule> modules_;
};

enum class ChannelKind { Ideal, Itsg5 };

const char* to_string(ChannelKind kind);

struct VehicleSlot {
    int id = 1;
    dynamics::VehicleState truth;
    dynamics::AckermannCommand command; // actuated at the next physics step
    cacc::ControllerConfig controller;
    cacc::ControllerState ctrl;
    double latest_gen_time = -std::numeric_limits<double>::infinity();
};

struct WorldConfig {
    Micros dt_us = 10'000;
    dynamics::PlantModel plant = dynamics::PlantModel::Unicycle;
    ChannelKind channel = ChannelKind::Ideal;
    comms::ChannelModel channel_model;
    comms::CaServiceConfig cam_service;
};

struct TraceRow {
    double t = 0.0;
    int vehicle_id = 1;
    double x = 0.0, y = 0.0, theta = 0.0, v = 0.0, a = 0.0, omega = 0.0, delta = 0.0;
    std::optional<double> e_long;
    std::optional<double> e_lat;
};

struct CamLogRow {
    double tx_time = 0.0;
    std::optional<double> rx_time;
    int station_id = 1;
    std::uint32_t seq = 0;
    int speed_q = 0, heading_q = 0, accel_q = 0, yawrate_q = 0;
    bool dropped = false;
    double reported_speed = 0.0; // unquantized speed that was encoded
};

/// Leader state as seen by vehicle 2 after each step.
struct ReceivedSample {
    double t = 0.0;
    double true_v = 0.0;
    std::optional<double> received_v;
};

struct EventRecord {
    Micros scheduled_us = 0;
    Micros delivered_us = 0;
    std::uint64_t seq = 0;
    int source = 0;
    int target = 0;
    EventKind kind = EventKind::Custom;
    bool accepted = false;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct MessageStats {
    std::int64_t generated = 0;  // CAMs (itsg5) or forwards (ideal)
    std::int64_t dropped = 0;
    std::int64_t delivered = 0;  // messages that reached the receivers
    std::int64_t receptions = 0; // (message, receiver) pairs
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
    double delay_sum = 0.0;
    double inter_arrival_sum = 0.0;
    std::int64_t inter_arrival_count = 0;
};

/// (speed [m/s], yaw rate [rad/s]) of the platoon leader at time t.
using LeaderInput = std::function<std::pair<double, double>(double t)>;
/// Maps a vehicle's true state to the state it reports (localization noise).
using StateReporter =
    std::function<dynamics::VehicleState(int vehicle_id, const dynamics::VehicleState&)>;

/// Single-threaded two-clock co-simulation: fixed-step physics plus a network
/// event queue drained only up to the current physics time.
class World {
public:
    World(WorldConfig config, std::vector<VehicleSlot> vehicles, LeaderInput leader_input,
          StateReporter reporter = {});

    /// snapshot -> physics -> CAM generation -> delivery -> control -> trace.
    void step();
    /// Steps until physics_time >= t_end (exactly ceil(t_end / dt) steps from zero).
    void run_until(double t_end);

    const SimClock& clock() const { return clock_; }
    const EventQueue& queue() const { return queue_; }
    const ModuleRegistry& registry() const { return registry_; }
    const std::vector<VehicleSlot>& vehicles() const { return vehicles_; }
    const std::vector<TraceRow>& trace() const { return trace_; }
    const std::vector<CamLogRow>& cam_log() const { return cam_log_; }
    const std::vector<ReceivedSample>& received() const { return received_; }
    const std::vector<EventRecord>& event_trace() const { return events_; }
    const MessageStats& stats() const { return stats_; }
    const WorldConfig& config() const { return config_; }

private:
    void step_impl();
    void generate_messages(const std::vector<dynamics::VehicleState>& reported);
    void deliver(const SimEvent& ev);
    void record_acceptance(VehicleSlot& slot);

    WorldConfig config_;
    SimClock clock_;
    EventQueue queue_;
    ModuleRegistry registry_;
    std::vector<VehicleSlot> vehicles_;
    LeaderInput leader_input_;
    StateReporter reporter_;

    std::vector<TraceRow> trace_;
    std::vector<CamLogRow> cam_log_;
    std::vector<ReceivedSample> received_;
    std::vector<EventRecord> events_;
    std::vector<std::optional<double>> last_accept_time_;
    MessageStats stats_;
};

} // namespace platoon::cosim

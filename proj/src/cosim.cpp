#include "platoon/cosim.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "platoon/errors.hpp"

namespace platoon::cosim {

Micros to_micros(double seconds)
{
    if (!std::isfinite(seconds)) {
        throw DomainError("time is not finite");
    }
    return std::llround(seconds * 1e6);
}

const char* to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::CamDelivery:
        return "cam";
    case EventKind::DirectDelivery:
        return "direct";
    case EventKind::Custom:
        return "custom";
    }
    return "?";
}

const char* to_string(ChannelKind kind)
{
    return kind == ChannelKind::Ideal ? "ideal" : "itsg5";
}

// --- EventQueue -------------------------------------------------------------

std::uint64_t EventQueue::schedule(SimEvent event)
{
    if (event.time_us < floor_us_) {
        throw CausalityError("event at t=" + std::to_string(to_seconds(event.time_us)) +
                             " scheduled before physics time t=" +
                             std::to_string(to_seconds(floor_us_)));
    }
    event.seq = next_seq_++;
    const std::uint64_t seq = event.seq;
    heap_.push(std::move(event));
    return seq;
}

std::vector<SimEvent> EventQueue::drain_due(Micros physics_time_us)
{
    std::vector<SimEvent> due;
    while (!heap_.empty() && heap_.top().time_us <= physics_time_us) {
        due.push_back(heap_.top());
        heap_.pop();
    }
    floor_us_ = std::max(floor_us_, physics_time_us);
    return due;
}

SimEvent EventQueue::pop()
{
    SimEvent ev = heap_.top();
    heap_.pop();
    return ev;
}

// --- SimClock / ModuleRegistry ----------------------------------------------

SimClock::SimClock(Micros dt_us) : dt_us_(dt_us)
{
    if (dt_us <= 0) {
        throw ArgumentError("dt must be at least one microsecond");
    }
}

CommModule& ModuleRegistry::ensure_module(int vehicle_id, const ModuleDefaults& defaults)
{
    if (vehicle_id < 1) {
        throw ArgumentError("vehicle id must be >= 1");
    }
    auto it = modules_.find(vehicle_id);
    if (it != modules_.end()) {
        return it->second;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(defaults.channel_seed),
                      static_cast<std::uint32_t>(defaults.channel_seed >> 32),
                      static_cast<std::uint32_t>(vehicle_id)};
    CommModule module;
    module.service.config = defaults.service;
    module.rng.seed(seq);
    return modules_.emplace(vehicle_id, std::move(module)).first->second;
}

// --- World ------------------------------------------------------------------

World::World(WorldConfig config, std::vector<VehicleSlot> vehicles, LeaderInput leader_input,
             StateReporter reporter)
    : config_(std::move(config)),
      clock_(config_.dt_us),
      vehicles_(std::move(vehicles)),
      leader_input_(std::move(leader_input)),
      reporter_(std::move(reporter))
{
    if (vehicles_.empty()) {
        throw ArgumentError("world needs at least one vehicle");
    }
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        if (vehicles_[i].id != static_cast<int>(i) + 1) {
            throw ArgumentError("vehicle ids must be 1..n in platoon order");
        }
    }
    if (!leader_input_) {
        throw ArgumentError("leader input is required");
    }
    config_.channel_model.validate();
    config_.cam_service.validate();
    last_accept_time_.resize(vehicles_.size());

    auto& leader = vehicles_.front();
    const auto [v0, w0] = leader_input_(0.0);
    leader.command = {v0, dynamics::yaw_rate_to_steering(w0, v0, leader.controller.params.wheelbase_d)};
}

void World::run_until(double t_end)
{
    if (!(t_end >= 0.0)) {
        throw ArgumentError("t_end must be non-negative");
    }
    const Micros end_us = to_micros(t_end);
    const std::int64_t target = (end_us + clock_.dt_us() - 1) / clock_.dt_us();
    while (clock_.step_count() < target) {
        step();
    }
}

void World::step()
{
    try {
        step_impl();
    } catch (const StepError&) {
        throw;
    } catch (const std::exception& e) {
        throw StepError(clock_.step_count(), e.what());
    }
}

void World::step_impl()
{
    const double dt = clock_.dt();

    // (1) snapshot
    std::vector<dynamics::VehicleState> snapshot;
    snapshot.reserve(vehicles_.size());
    for (const auto& slot : vehicles_) {
        snapshot.push_back(slot.truth);
    }

    // (2) physics
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        auto& slot = vehicles_[i];
        slot.truth = dynamics::plant_step(config_.plant, snapshot[i], slot.command,
                                          slot.controller.params, dt);
    }
    clock_.advance();
    const double now = clock_.physics_time();

    // (3) message generation on the reported states
    std::vector<dynamics::VehicleState> reported;
    reported.reserve(vehicles_.size());
    for (const auto& slot : vehicles_) {
        reported.push_back(reporter_ ? reporter_(slot.id, slot.truth) : slot.truth);
    }
    generate_messages(reported);

    // (4) network events that physics time has caught up with
    for (const SimEvent& ev : queue_.drain_due(clock_.now_us())) {
        deliver(ev);
    }

    // (5) control
    auto& leader = vehicles_.front();
    const auto [v_lead, w_lead] = leader_input_(now);
    if (!(v_lead >= 0.0) || !std::isfinite(w_lead)) {
        throw ArgumentError("leader input must give finite, non-negative speed");
    }
    leader.command = {v_lead, dynamics::yaw_rate_to_steering(
                                  w_lead, v_lead, leader.controller.params.wheelbase_d)};
    for (std::size_t i = 1; i < vehicles_.size(); ++i) {
        auto& slot = vehicles_[i];
        slot.command = cacc::controller_step(slot.ctrl, reported[i], slot.controller, dt);
    }

    // (6) trace
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        const auto& slot = vehicles_[i];
        const auto& s = slot.truth;
        TraceRow row{now, slot.id, s.pose.x, s.pose.y, s.pose.theta, s.v, s.a, s.omega, s.delta,
                     std::nullopt, std::nullopt};
        if (i > 0) {
            const auto truth_leader = cacc::snapshot_of(vehicles_[i - 1].truth, now);
            const cacc::Vec2 e = cacc::tracking_error(truth_leader, s, slot.controller.policy,
                                                      slot.controller.extended_lookahead);
            const cacc::Vec2 body = cacc::rotate(e, -s.pose.theta);
            row.e_long = body.x;
            row.e_lat = body.y;
        }
        trace_.push_back(row);
    }
    if (vehicles_.size() >= 2) {
        const auto& follower = vehicles_[1];
        ReceivedSample sample{now, leader.truth.v, std::nullopt};
        if (follower.ctrl.last_leader) {
            sample.received_v = follower.ctrl.last_leader->v;
        }
        received_.push_back(sample);
    }
}

void World::generate_messages(const std::vector<dynamics::VehicleState>& reported)
{
    const Micros now_us = clock_.now_us();
    const double now = clock_.physics_time();

    if (config_.channel == ChannelKind::Ideal) {
        // direct link to the successor, full precision, zero delay
        for (std::size_t i = 0; i + 1 < vehicles_.size(); ++i) {
            SimEvent ev;
            ev.time_us = now_us;
            ev.target = vehicles_[i + 1].id;
            ev.source = vehicles_[i].id;
            ev.kind = EventKind::DirectDelivery;
            ev.payload = cacc::snapshot_of(reported[i], now);
            queue_.schedule(std::move(ev));
            ++stats_.generated;
        }
        return;
    }

    const ModuleDefaults defaults{config_.cam_service, config_.channel_model.rng_seed};
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        const int id = vehicles_[i].id;
        CommModule& module = registry_.ensure_module(id, defaults);
        if (!comms::should_generate_cam(module.service, reported[i], now)) {
            continue;
        }
        const comms::CamMessage msg = comms::encode_cam(reported[i], id, module.next_seq++, now);
        module.service.mark_transmitted(reported[i], now);
        ++stats_.generated;

        CamLogRow row{now,          std::nullopt,  id,          msg.seq, msg.speed_q,
                      msg.heading_q, msg.accel_q, msg.yawrate_q, false,  reported[i].v};
        const auto delivery = comms::transmit(config_.channel_model, msg, now, module.rng);
        if (!delivery) {
            row.dropped = true;
            ++stats_.dropped;
            cam_log_.push_back(row);
            continue;
        }
        const auto log_index = static_cast<std::int64_t>(cam_log_.size());
        cam_log_.push_back(row);
        const Micros deliver_us = std::max(now_us, to_micros(*delivery));
        for (const auto& receiver : vehicles_) {
            if (receiver.id == id) {
                continue;
            }
            SimEvent ev;
            ev.time_us = deliver_us;
            ev.target = receiver.id;
            ev.source = id;
            ev.kind = EventKind::CamDelivery;
            ev.payload = msg;
            ev.tag = log_index;
            queue_.schedule(std::move(ev));
        }
    }
}

void World::deliver(const SimEvent& ev)
{
    const double now = clock_.physics_time();
    auto& slot = vehicles_.at(static_cast<std::size_t>(ev.target - 1));
    EventRecord rec{ev.time_us, clock_.now_us(), ev.seq, ev.source, ev.target, ev.kind, false};
    ++stats_.receptions;

    switch (ev.kind) {
    case EventKind::CamDelivery: {
        const auto& msg = std::get<comms::CamMessage>(ev.payload);
        auto& row = cam_log_.at(static_cast<std::size_t>(ev.tag));
        if (!row.rx_time) {
            row.rx_time = now;
            ++stats_.delivered;
            stats_.delay_sum += now - row.tx_time;
        }
        if (slot.id >= 2 &&
            comms::platoon_filter(msg, slot.id, slot.latest_gen_time) == comms::FilterVerdict::Accept) {
            slot.ctrl.last_leader = comms::decode_cam(msg);
            slot.latest_gen_time = msg.gen_time;
            rec.accepted = true;
        }
        break;
    }
    case EventKind::DirectDelivery: {
        const auto& snap = std::get<cacc::LeaderSnapshot>(ev.payload);
        ++stats_.delivered;
        if (ev.source == slot.id - 1 && snap.stamp > slot.latest_gen_time) {
            slot.ctrl.last_leader = snap;
            slot.latest_gen_time = snap.stamp;
            rec.accepted = true;
        }
        break;
    }
    case EventKind::Custom:
        break;
    }

    if (rec.accepted) {
        ++stats_.accepted;
        record_acceptance(slot);
    } else {
        ++stats_.rejected;
    }
    events_.push_back(rec);
}

void World::record_acceptance(VehicleSlot& slot)
{
    const double now = clock_.physics_time();
    auto& last = last_accept_time_.at(static_cast<std::size_t>(slot.id - 1));
    if (last) {
        stats_.inter_arrival_sum += now - *last;
        ++stats_.inter_arrival_count;
    }
    last = now;
}

} // namespace platoon::cosim

#include "hreye/player.hpp"

#include "hreye/error.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

namespace hreye {

void validate(const ControllerMode& mode) {
    if (const auto* a = std::get_if<ActiveMode>(&mode)) {
        if (!(a->level >= 0.0 && a->level <= 1.0)) {
            throw DomainError("battery level must lie in [0, 1]");
        }
    } else if (const auto* o = std::get_if<OcularMode>(&mode)) {
        if (o->id.kind == OcularKind::Gaze) {
            GazeAngle::from_degrees(o->id.angle.degrees());
        }
    } else if (const auto* f = std::get_if<FunctionalMode>(&mode)) {
        if (!(f->intensity >= 0.0 && f->intensity <= 1.0)) {
            throw DomainError("functional intensity must lie in [0, 1]");
        }
    }
}

std::string describe(const ControllerMode& mode) {
    struct Describe {
        std::string operator()(const IdleMode&) const { return "Idle"; }
        std::string operator()(const ActiveMode& m) const {
            std::string s = "Active " + std::string(to_string(m.id));
            if (m.id == ActiveLucemeId::BatteryLevel) s += " level=" + std::to_string(m.level);
            return s;
        }
        std::string operator()(const OcularMode& m) const { return "Ocular " + to_string(m.id); }
        std::string operator()(const FunctionalMode& m) const {
            return "Functional rgb=" + std::to_string(m.color.r) + "," + std::to_string(m.color.g) + "," +
                   std::to_string(m.color.b) + " intensity=" + std::to_string(m.intensity);
        }
    };
    return std::visit(Describe{}, mode);
}

ControllerMode mode_for(const LucemeId& id) {
    if (const auto* a = std::get_if<ActiveLucemeId>(&id)) {
        return ActiveMode{*a, kDefaultBatteryLevel};
    }
    return OcularMode{std::get<OcularLucemeId>(id)};
}

bool InProcessEndpoint::deliver(std::span<const std::uint8_t> bytes, std::uint64_t timestamp_ms) {
    driver_->feed(bytes, timestamp_ms);
    return true;
}

Player::Player(PlayerConfig config, const LucemeCatalog& catalog) : config_(std::move(config)), catalog_(&catalog) {
    if (config_.fps < kMinFps || config_.fps > kMaxFps) {
        throw ConfigError("fps must lie in [" + std::to_string(kMinFps) + ", " + std::to_string(kMaxFps) + "]");
    }
}

void Player::record(std::ostream& out) {
    log_ = std::make_unique<FrameLogWriter>(out);
}

void Player::set_mode(const ControllerMode& mode) {
    validate(mode);
    pending_ = mode;
    sequence_.active = false;
    sequence_modes_.clear();
    if (!endpoint_) {
        throw TransportError("no device connected; frames for " + describe(mode) + " will be dropped");
    }
}

std::vector<std::string> Player::play_sequence(const std::vector<LucemeId>& ids, std::int64_t dwell_ms,
                                               bool randomize, std::uint64_t seed) {
    if (ids.empty()) {
        throw DomainError("sequence needs at least one luceme");
    }
    if (dwell_ms <= 0) {
        throw DomainError("dwell must be > 0 ms");
    }
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (randomize) {
        seeded_shuffle(std::span(order), seed);
    }
    sequence_ = {};
    sequence_modes_.clear();
    for (auto i : order) {
        sequence_.order.push_back(to_string(ids[i]));
        sequence_modes_.push_back(mode_for(ids[i]));
    }
    sequence_.active = true;
    dwell_frames_ = std::max<std::int64_t>(1, dwell_ms * config_.fps / 1000);
    item_frames_ = 0;
    pending_ = sequence_modes_.front();
    if (!endpoint_) {
        throw TransportError("no device connected; sequence frames will be dropped");
    }
    return sequence_.order;
}

void Player::advance_sequence() {
    ++sequence_.position;
    item_frames_ = 0;
    if (sequence_.position < sequence_modes_.size()) {
        pending_ = sequence_modes_[sequence_.position];
    } else {
        sequence_.active = false;
        pending_ = IdleMode{};
    }
}

void Player::switch_to(const ControllerMode& mode) {
    mode_ = mode;
    mode_start_frame_ = frame_index_;
    compiled_.reset();
    if (const auto* a = std::get_if<ActiveMode>(&mode)) {
        compiled_ = catalog_->active(a->id, a->level);
    } else if (const auto* o = std::get_if<OcularMode>(&mode)) {
        compiled_ = ocular(o->id, config_.gaze);
    }
}

LedFrame Player::frame_for(const ControllerMode& mode, std::int64_t elapsed_ms) const {
    if (const auto* a = std::get_if<ActiveMode>(&mode)) {
        return sample(catalog_->active(a->id, a->level), elapsed_ms, config_.palette);
    }
    if (const auto* o = std::get_if<OcularMode>(&mode)) {
        return sample(ocular(o->id, config_.gaze), elapsed_ms, config_.palette);
    }
    LedFrame frame;
    if (const auto* f = std::get_if<FunctionalMode>(&mode)) {
        ColorRGBA c = f->color;
        c.a = static_cast<std::uint8_t>(std::lround(c.a * f->intensity));
        for (auto& px : frame) px = c;
    }
    return frame;
}

Emission Player::tick() {
    if (sequence_.active && !pending_ && item_frames_ >= dwell_frames_) {
        advance_sequence();
    }
    if (pending_) {
        switch_to(*pending_);
        pending_.reset();
    }

    const auto elapsed = frame_time_ms(frame_index_ - mode_start_frame_, config_.fps);
    const LedFrame frame = compiled_ ? sample(*compiled_, elapsed, config_.palette) : frame_for(mode_, elapsed);

    Emission out;
    out.timestamp_ms = timestamp_ms();
    for (std::uint8_t eye = 0; eye < 2; ++eye) {
        auto& msg = out.messages[eye];
        msg.eye_id = eye;
        msg.sequence = next_sequence_[eye]++;
        msg.frame = frame;
        const auto bytes = encode(msg);
        if (!endpoint_ || !endpoint_->deliver(bytes, out.timestamp_ms)) {
            ++dropped_;
        }
        if (log_) {
            log_->append({out.timestamp_ms, msg});
        }
    }
    ++frame_index_;
    if (sequence_.active) {
        ++item_frames_;
    }
    return out;
}

bool FrameSubscription::push(const FrameEvent& event) {
    {
        std::lock_guard lock(mutex_);
        if (closed_ || queue_.size() >= capacity_) {
            ++dropped_;
            return false;
        }
        queue_.push_back(event);
    }
    cv_.notify_one();
    return true;
}

std::optional<FrameEvent> FrameSubscription::pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) {
        return std::nullopt;
    }
    FrameEvent e = queue_.front();
    queue_.pop_front();
    return e;
}

void FrameSubscription::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool FrameSubscription::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

std::uint64_t FrameSubscription::dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
}

Controller::Controller(ControllerOptions options, const LucemeCatalog& catalog)
    : catalog_(&catalog), endpoint_(driver_), player_(options.player, catalog) {
    if (options.log_path) {
        auto file = std::make_unique<std::ofstream>(*options.log_path, std::ios::binary | std::ios::trunc);
        if (!*file) {
            throw ConfigError("cannot open log file " + *options.log_path);
        }
        log_stream_ = std::move(file);
        player_.record(*log_stream_);
    }
    if (options.connect_device) {
        player_.connect(&endpoint_);
    }
}

Controller::~Controller() {
    stop();
    std::lock_guard lock(subscribers_mutex_);
    for (auto& weak : subscribers_) {
        if (auto sub = weak.lock()) sub->close();
    }
}

ControllerState Controller::set_mode(const ControllerMode& mode) {
    std::lock_guard lock(mutex_);
    player_.set_mode(mode);
    return state_locked();
}

std::vector<std::string> Controller::play_sequence(const std::vector<LucemeId>& ids, std::int64_t dwell_ms,
                                                   bool randomize, std::uint64_t seed) {
    std::lock_guard lock(mutex_);
    return player_.play_sequence(ids, dwell_ms, randomize, seed);
}

ControllerState Controller::state() const {
    std::lock_guard lock(mutex_);
    return state_locked();
}

ControllerState Controller::state_locked() const {
    ControllerState s;
    s.mode = player_.mode();
    s.fps = player_.fps();
    s.frame_index = player_.frame_index();
    s.timestamp_ms = player_.timestamp_ms();
    s.dropped_messages = player_.dropped_messages();
    s.dropped_stream_frames = stream_drops_.load();
    s.rejected_stale = driver_.rejected_stale();
    s.device_connected = player_.connected();
    s.sequence = player_.sequence();
    s.eyes = {driver_.snapshot(0), driver_.snapshot(1)};
    return s;
}

Emission Controller::step() {
    Emission e;
    {
        std::lock_guard lock(mutex_);
        e = player_.tick();
        if (log_stream_) log_stream_->flush();
    }
    std::lock_guard lock(subscribers_mutex_);
    std::erase_if(subscribers_, [](const auto& w) { return w.expired(); });
    for (auto& weak : subscribers_) {
        if (auto sub = weak.lock()) {
            for (const auto& m : e.messages) {
                if (!sub->push({m.eye_id, m.sequence, e.timestamp_ms, m.frame})) {
                    ++stream_drops_;
                }
            }
        }
    }
    return e;
}

void Controller::start() {
    if (running_.exchange(true)) {
        return;
    }
    thread_ = std::thread([this] {
        using clock = std::chrono::steady_clock;
        const auto period = std::chrono::nanoseconds(1'000'000'000LL / player_.fps());
        auto next = clock::now();
        while (running_) {
            step();
            next += period;
            const auto now = clock::now();
            if (now - next > 10 * period) {
                next = now;  // fell far behind; do not burst to catch up
            }
            std::this_thread::sleep_until(next);
        }
    });
}

void Controller::stop() {
    if (!running_.exchange(false)) {
        return;
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

std::shared_ptr<FrameSubscription> Controller::subscribe(std::size_t capacity) {
    auto sub = std::make_shared<FrameSubscription>(capacity);
    std::lock_guard lock(subscribers_mutex_);
    subscribers_.push_back(sub);
    return sub;
}

}  // namespace hreye

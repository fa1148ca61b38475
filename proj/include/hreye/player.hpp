#pragma once

#include "hreye/animation.hpp"
#include "hreye/driver_sim.hpp"
#include "hreye/frames.hpp"
#include "hreye/lucemes.hpp"
#include "hreye/protocol.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace hreye {

struct IdleMode {
    friend bool operator==(const IdleMode&, const IdleMode&) = default;
};
struct ActiveMode {
    ActiveLucemeId id = ActiveLucemeId::Affirmative;
    double level = kDefaultBatteryLevel;
    friend bool operator==(const ActiveMode&, const ActiveMode&) = default;
};
struct OcularMode {
    OcularLucemeId id;
    friend bool operator==(const OcularMode&, const OcularMode&) = default;
};
// Scene lighting: constant color scaled by intensity in [0, 1].
struct FunctionalMode {
    ColorRGBA color{255, 255, 255, 255};
    double intensity = 1.0;
    friend bool operator==(const FunctionalMode&, const FunctionalMode&) = default;
};

using ControllerMode = std::variant<IdleMode, ActiveMode, OcularMode, FunctionalMode>;

/// Throws DomainError for out-of-range parameters.
void validate(const ControllerMode& mode);
std::string describe(const ControllerMode& mode);
ControllerMode mode_for(const LucemeId& id);

/// Fisher-Yates over mt19937_64; identical on every platform for a seed.
template <typename T>
void seeded_shuffle(std::span<T> items, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        // Unbiased draw in [0, i) by rejection.
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r = rng();
        while (r >= limit) r = rng();
        std::swap(items[i - 1], items[static_cast<std::size_t>(r % bound)]);
    }
}

// Byte-stream sink for encoded DriverMessages.
class DeviceEndpoint {
public:
    virtual ~DeviceEndpoint() = default;
    /// False if the bytes could not be delivered.
    virtual bool deliver(std::span<const std::uint8_t> bytes, std::uint64_t timestamp_ms) = 0;
};

// Delivers straight into a SimulatedDriver's stream decoder.
class InProcessEndpoint final : public DeviceEndpoint {
public:
    explicit InProcessEndpoint(SimulatedDriver& driver) : driver_(&driver) {}
    bool deliver(std::span<const std::uint8_t> bytes, std::uint64_t timestamp_ms) override;

private:
    SimulatedDriver* driver_;
};

struct PlayerConfig {
    int fps = kDefaultFps;
    Palette palette = Palette::defaults();
    GazeStyle gaze;
};

struct SequenceProgress {
    std::vector<std::string> order;
    std::size_t position = 0;  // index of the item playing, == order.size() when done
    bool active = false;
};

struct Emission {
    std::uint64_t timestamp_ms = 0;
    std::array<DriverMessage, 2> messages;
};

// The controller's scheduler core. Single-threaded and deterministic: the
// logical clock is frame index x frame period, so identical command histories
// produce identical message streams.
class Player {
public:
    explicit Player(PlayerConfig config = {}, const LucemeCatalog& catalog = LucemeCatalog::builtin());

    void connect(DeviceEndpoint* endpoint) noexcept { endpoint_ = endpoint; }
    bool connected() const noexcept { return endpoint_ != nullptr; }

    /// Appends every emitted message to `out` as a frame log.
    void record(std::ostream& out);
    void stop_recording() noexcept { log_.reset(); }

    /// Takes effect on the next tick. Cancels a running sequence. Throws
    /// DomainError for invalid parameters (mode unchanged) and TransportError
    /// when no device is connected (mode still recorded).
    void set_mode(const ControllerMode& mode);

    /// Queues `ids` for `dwell_ms` each, optionally in a seeded random order,
    /// then returns to Idle. Returns the realized order.
    std::vector<std::string> play_sequence(const std::vector<LucemeId>& ids, std::int64_t dwell_ms, bool randomize,
                                           std::uint64_t seed);

    /// Emits one frame for both eyes at the next frame boundary.
    Emission tick();

    const ControllerMode& mode() const noexcept { return pending_ ? *pending_ : mode_; }
    int fps() const noexcept { return config_.fps; }
    std::int64_t frame_index() const noexcept { return frame_index_; }
    std::uint64_t timestamp_ms() const noexcept { return static_cast<std::uint64_t>(frame_time_ms(frame_index_, config_.fps)); }
    std::uint64_t dropped_messages() const noexcept { return dropped_; }
    std::array<std::uint32_t, 2> next_sequence() const noexcept { return next_sequence_; }
    const SequenceProgress& sequence() const noexcept { return sequence_; }
    const LucemeCatalog& catalog() const noexcept { return *catalog_; }

    /// Frame the current mode shows at `elapsed_ms` after it started.
    LedFrame frame_for(const ControllerMode& mode, std::int64_t elapsed_ms) const;

private:
    void switch_to(const ControllerMode& mode);
    void advance_sequence();

    PlayerConfig config_;
    const LucemeCatalog* catalog_;
    DeviceEndpoint* endpoint_ = nullptr;
    std::unique_ptr<FrameLogWriter> log_;

    ControllerMode mode_ = IdleMode{};
    std::optional<ControllerMode> pending_;
    std::optional<LucemeDef> compiled_;
    std::int64_t frame_index_ = 0;
    std::int64_t mode_start_frame_ = 0;
    std::array<std::uint32_t, 2> next_sequence_{0, 0};
    std::uint64_t dropped_ = 0;

    SequenceProgress sequence_;
    std::vector<ControllerMode> sequence_modes_;
    std::int64_t dwell_frames_ = 0;
    std::int64_t item_frames_ = 0;
};

struct FrameEvent {
    std::uint8_t eye_id = 0;
    std::uint32_t sequence = 0;
    std::uint64_t timestamp_ms = 0;
    LedFrame frame;
};

// Bounded per-subscriber queue; the producer never blocks and drops frames
// when a consumer falls behind.
class FrameSubscription {
public:
    explicit FrameSubscription(std::size_t capacity = 64) : capacity_(capacity) {}

    /// False if the event was dropped because the queue is full or closed.
    bool push(const FrameEvent& event);
    std::optional<FrameEvent> pop(std::chrono::milliseconds timeout);
    void close();
    bool closed() const;
    std::uint64_t dropped() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<FrameEvent> queue_;
    std::size_t capacity_;
    std::uint64_t dropped_ = 0;
    bool closed_ = false;
};

struct ControllerState {
    ControllerMode mode;
    int fps = kDefaultFps;
    std::int64_t frame_index = 0;
    std::uint64_t timestamp_ms = 0;
    std::uint64_t dropped_messages = 0;
    std::uint64_t dropped_stream_frames = 0;
    std::uint64_t rejected_stale = 0;
    bool device_connected = false;
    SequenceProgress sequence;
    std::array<EyeSnapshot, 2> eyes;
};

struct ControllerOptions {
    PlayerConfig player;
    std::optional<std::string> log_path;
    bool connect_device = true;
};

// Thread-safe owner of a Player and its simulated device. API handlers and
// the scheduler thread go through one mutex, which serializes commands.
class Controller {
public:
    explicit Controller(ControllerOptions options = {}, const LucemeCatalog& catalog = LucemeCatalog::builtin());
    ~Controller();

    Controller(const Controller&) = delete;
    Controller& operator=(const Controller&) = delete;

    ControllerState set_mode(const ControllerMode& mode);
    std::vector<std::string> play_sequence(const std::vector<LucemeId>& ids, std::int64_t dwell_ms, bool randomize,
                                           std::uint64_t seed);
    ControllerState state() const;
    const LucemeCatalog& catalog() const noexcept { return *catalog_; }
    SimulatedDriver& driver() noexcept { return driver_; }

    /// One scheduler step (used by the real-time loop and by tests).
    Emission step();

    /// Runs step() every frame period on a background thread.
    void start();
    void stop();
    bool running() const noexcept { return running_; }

    std::shared_ptr<FrameSubscription> subscribe(std::size_t capacity = 64);

private:
    ControllerState state_locked() const;

    const LucemeCatalog* catalog_;
    SimulatedDriver driver_;
    InProcessEndpoint endpoint_;
    std::unique_ptr<std::ostream> log_stream_;
    mutable std::mutex mutex_;
    Player player_;

    std::mutex subscribers_mutex_;
    std::vector<std::weak_ptr<FrameSubscription>> subscribers_;
    std::atomic<std::uint64_t> stream_drops_{0};

    std::atomic<bool> running_{false};
    std::thread thread_;
};

}  // namespace hreye

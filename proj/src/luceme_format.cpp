#include "hreye/animation.hpp"

#include "hreye/error.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace hreye {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        const auto start = line.find_first_not_of(" \t\r", pos);
        if (start == std::string_view::npos) break;
        const auto stop = line.find_first_of(" \t\r", start);
        out.push_back(line.substr(start, stop == std::string_view::npos ? stop : stop - start));
        pos = stop == std::string_view::npos ? line.size() : stop;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view s, int line, std::string_view key) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(line, "bad value '" + std::string(s) + "' for " + std::string(key));
    }
    return value;
}

bool parse_bool(std::string_view s, int line) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ParseError(line, "expected true or false, got '" + std::string(s) + "'");
}

// key=value fields of one line; repeated keys are rejected.
class Fields {
public:
    Fields(const std::vector<std::string_view>& tokens, std::size_t first, int line) : line_(line) {
        for (std::size_t i = first; i < tokens.size(); ++i) {
            const auto eq = tokens[i].find('=');
            if (eq == std::string_view::npos || eq == 0) {
                throw ParseError(line, "expected key=value, got '" + std::string(tokens[i]) + "'");
            }
            const std::string key{tokens[i].substr(0, eq)};
            if (!values_.emplace(key, tokens[i].substr(eq + 1)).second) {
                throw ParseError(line, "field '" + key + "' given more than once");
            }
        }
    }

    std::optional<std::string_view> take(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        auto v = it->second;
        values_.erase(it);
        return v;
    }

    std::string_view require(const std::string& key) {
        auto v = take(key);
        if (!v) throw ParseError(line_, "missing field '" + key + "'");
        return *v;
    }

    template <typename T>
    void maybe(const std::string& key, T& out) {
        if (auto v = take(key)) out = parse_number<T>(*v, line_, key);
    }

    void finish(std::string_view kind) const {
        if (!values_.empty()) {
            throw ParseError(line_, "unknown field '" + values_.begin()->first + "' for " + std::string(kind));
        }
    }

private:
    int line_;
    std::map<std::string, std::string_view> values_;
};

LedAddress parse_led(std::string_view s, int line) {
    if (s.size() < 2 || (s[0] != 'o' && s[0] != 'i')) {
        throw ParseError(line, "LED must look like o<index> or i<index>, got '" + std::string(s) + "'");
    }
    const LedAddress addr{s[0] == 'o' ? Ring::Outer : Ring::Inner, parse_number<int>(s.substr(1), line, "leds")};
    if (!is_valid(addr)) {
        throw ParseError(line, "LED '" + std::string(s) + "' out of range");
    }
    return addr;
}

template <typename Fn>
void for_each_csv(std::string_view s, Fn fn) {
    std::size_t pos = 0;
    while (true) {
        const auto comma = s.find(',', pos);
        fn(s.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
}

PrimitiveParams parse_params(std::string_view kind, Fields& f, int line) {
    if (kind == "Fill") {
        return Fill{};
    }
    if (kind == "Flash") {
        Flash p;
        f.maybe("on_ms", p.on_ms);
        f.maybe("off_ms", p.off_ms);
        return p;
    }
    if (kind == "Pulse") {
        Pulse p;
        f.maybe("period_ms", p.period_ms);
        f.maybe("min_alpha", p.min_alpha);
        f.maybe("max_alpha", p.max_alpha);
        f.maybe("phase_ms", p.phase_ms);
        return p;
    }
    if (kind == "Chase") {
        Chase p;
        if (auto v = f.take("segments")) {
            p.segments.clear();
            for_each_csv(*v, [&](std::string_view s) { p.segments.push_back(parse_number<int>(s, line, "segments")); });
        }
        f.maybe("start_deg", p.start_deg);
        f.maybe("speed", p.speed_deg_s);
        if (auto v = f.take("direction")) {
            if (*v == "ccw") p.direction = Direction::Ccw;
            else if (*v == "cw") p.direction = Direction::Cw;
            else throw ParseError(line, "direction must be ccw or cw");
        }
        return p;
    }
    if (kind == "Wipe") {
        Wipe p;
        f.maybe("start_deg", p.start_deg);
        f.maybe("end_deg", p.end_deg);
        f.maybe("duration_ms", p.duration_ms);
        return p;
    }
    if (kind == "ArcHold") {
        ArcHold p;
        f.maybe("center_deg", p.center_deg);
        f.maybe("half_width_deg", p.half_width_deg);
        return p;
    }
    if (kind == "Shape") {
        Shape p;
        for_each_csv(f.require("leds"), [&](std::string_view s) { p.leds.push_back(parse_led(s, line)); });
        f.maybe("on_ms", p.on_ms);
        f.maybe("off_ms", p.off_ms);
        return p;
    }
    throw ParseError(line, "unknown primitive kind '" + std::string(kind) + "'");
}

RingScope parse_scope(std::string_view s, int line) {
    if (s == "Outer") return RingScope::Outer;
    if (s == "Inner") return RingScope::Inner;
    if (s == "Both") return RingScope::Both;
    throw ParseError(line, "ring must be Outer, Inner or Both");
}

Track parse_track(const std::vector<std::string_view>& tokens, int line) {
    if (tokens.size() < 3) {
        throw ParseError(line, "track needs a time range and a primitive kind");
    }
    const auto range = tokens[1];
    const auto dots = range.find("..");
    if (dots == std::string_view::npos) {
        throw ParseError(line, "track range must be <start_ms>..<end_ms>");
    }
    Track track;
    track.start_ms = parse_number<std::int64_t>(range.substr(0, dots), line, "track start");
    track.end_ms = parse_number<std::int64_t>(range.substr(dots + 2), line, "track end");

    const auto kind = tokens[2];
    Fields f(tokens, 3, line);
    track.primitive.scope = parse_scope(f.require("ring"), line);
    const auto color_name = f.require("color");
    const auto color = parse_palette_color(color_name);
    if (!color) {
        throw ParseError(line, "unknown palette name '" + std::string(color_name) + "'");
    }
    track.primitive.color = *color;
    f.maybe("intensity", track.primitive.intensity);
    track.primitive.params = parse_params(kind, f, line);
    f.finish(kind);
    return track;
}

std::string fmt_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string led_token(const LedAddress& a) {
    return (a.ring == Ring::Outer ? "o" : "i") + std::to_string(a.index);
}

}  // namespace

LucemeDef parse_luceme_file(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    std::optional<LucemeDef> def;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto tokens = split_ws(line);
        if (tokens.empty()) continue;

        if (tokens[0] == "luceme") {
            if (def) throw ParseError(line_no, "second luceme header");
            if (tokens.size() < 2) throw ParseError(line_no, "luceme header needs a name");
            def.emplace();
            def->name = std::string(tokens[1]);
            Fields f(tokens, 2, line_no);
            def->duration_ms = parse_number<std::int64_t>(f.require("duration"), line_no, "duration");
            def->loop = parse_bool(f.require("loop"), line_no);
            f.finish("luceme header");
            if (def->duration_ms <= 0) throw ParseError(line_no, "duration must be > 0");
        } else if (tokens[0] == "track") {
            if (!def) throw ParseError(line_no, "track before luceme header");
            Track track = parse_track(tokens, line_no);
            if (track.start_ms < 0 || track.start_ms >= track.end_ms) {
                throw ParseError(line_no, "track range must satisfy 0 <= start < end");
            }
            if (track.end_ms > def->duration_ms) {
                throw ParseError(line_no, "track exceeds luceme duration " + std::to_string(def->duration_ms) + " ms");
            }
            try {
                validate(track.primitive);
            } catch (const Error& e) {
                throw ParseError(line_no, e.what());
            }
            def->tracks.push_back(std::move(track));
        } else {
            throw ParseError(line_no, "unknown directive '" + std::string(tokens[0]) + "'");
        }
    }
    if (!def) {
        throw ParseError(line_no, "missing luceme header");
    }
    return *def;
}

std::string serialize_luceme(const LucemeDef& def) {
    std::ostringstream out;
    out << "luceme " << def.name << " duration=" << def.duration_ms << " loop=" << (def.loop ? "true" : "false")
        << "\n";
    for (const auto& t : def.tracks) {
        const auto& p = t.primitive;
        out << "track " << t.start_ms << ".." << t.end_ms << ' ' << kind_name(p.params) << " ring=" << to_string(p.scope)
            << " color=" << to_string(p.color);
        if (p.intensity != 255) out << " intensity=" << p.intensity;
        std::visit(
            [&](const auto& q) {
                using P = std::decay_t<decltype(q)>;
                if constexpr (std::is_same_v<P, Flash>) {
                    out << " on_ms=" << q.on_ms << " off_ms=" << q.off_ms;
                } else if constexpr (std::is_same_v<P, Pulse>) {
                    out << " period_ms=" << q.period_ms << " min_alpha=" << q.min_alpha << " max_alpha=" << q.max_alpha;
                    if (q.phase_ms != 0) out << " phase_ms=" << q.phase_ms;
                } else if constexpr (std::is_same_v<P, Chase>) {
                    out << " segments=";
                    for (std::size_t i = 0; i < q.segments.size(); ++i) out << (i ? "," : "") << q.segments[i];
                    out << " start_deg=" << fmt_double(q.start_deg) << " speed=" << fmt_double(q.speed_deg_s)
                        << " direction=" << (q.direction == Direction::Ccw ? "ccw" : "cw");
                } else if constexpr (std::is_same_v<P, Wipe>) {
                    out << " start_deg=" << fmt_double(q.start_deg) << " end_deg=" << fmt_double(q.end_deg)
                        << " duration_ms=" << q.duration_ms;
                } else if constexpr (std::is_same_v<P, ArcHold>) {
                    out << " center_deg=" << fmt_double(q.center_deg)
                        << " half_width_deg=" << fmt_double(q.half_width_deg);
                } else if constexpr (std::is_same_v<P, Shape>) {
                    out << " leds=";
                    for (std::size_t i = 0; i < q.leds.size(); ++i) out << (i ? "," : "") << led_token(q.leds[i]);
                    if (q.on_ms != 0 || q.off_ms != 0) out << " on_ms=" << q.on_ms << " off_ms=" << q.off_ms;
                }
            },
            p.params);
        out << "\n";
    }
    return out.str();
}

}  // namespace hreye

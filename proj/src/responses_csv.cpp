#include "hreye/error.hpp"
#include "hreye/metrics.hpp"

#include <charconv>
#include <sstream>

namespace hreye {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

template <typename T>
T number(const std::string& s, int line, const char* what) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
    }
    return v;
}

ShownStimulus parse_shown(const std::string& s, int line) {
    if (auto id = parse_luceme_id(s)) {
        if (const auto* active = std::get_if<ActiveLucemeId>(&*id)) return *active;
        const auto& ocular = std::get<OcularLucemeId>(*id);
        if (ocular.kind == OcularKind::Gaze) return ocular.angle;
        throw ParseError(line, "only gaze cues are scored among ocular lucemes, got '" + s + "'");
    }
    const int deg = number<int>(s, line, "shown luceme");
    try {
        return GazeAngle::from_degrees(deg);
    } catch (const DomainError& e) {
        throw ParseError(line, e.what());
    }
}

}  // namespace

std::vector<ResponseRecord> parse_responses_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::vector<ResponseRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);  // UTF-8 BOM
        const auto f = split(line, ',');
        if (!header_seen) {
            if (f.size() != 6 || f[0] != "participant" || f[1] != "condition" || f[2] != "shown" ||
                (f[3] != "rater_scores" && f[3] != "reported_angles") || f[4] != "confidence" || f[5] != "time_s") {
                throw ParseError(line_no,
                                 "expected header participant,condition,shown,rater_scores,confidence,time_s");
            }
            header_seen = true;
            continue;
        }
        if (f.size() != 6) {
            throw ParseError(line_no, "expected 6 fields, got " + std::to_string(f.size()));
        }
        ResponseRecord r;
        r.participant = f[0];
        const auto cond = parse_condition(f[1]);
        if (!cond) throw ParseError(line_no, "unknown condition '" + f[1] + "'");
        r.condition = *cond;
        r.shown = parse_shown(f[2], line_no);
        for (const auto& s : split(f[3], ';')) {
            r.rater_scores.push_back(number<double>(s, line_no, "rater score"));
        }
        r.confidence = number<int>(f[4], line_no, "confidence");
        r.time_to_answer_s = number<double>(f[5], line_no, "time");
        try {
            validate(r);
        } catch (const DataError& e) {
            throw ParseError(line_no, e.what());
        }
        records.push_back(std::move(r));
    }
    if (!header_seen) {
        throw ParseError(line_no, "empty response file");
    }
    return records;
}

std::string write_responses_csv(const std::vector<ResponseRecord>& records) {
    std::ostringstream out;
    out.precision(17);
    out << "participant,condition,shown,rater_scores,confidence,time_s\n";
    for (const auto& r : records) {
        out << r.participant << ',' << to_string(r.condition) << ',' << to_string(r.shown) << ',';
        for (std::size_t i = 0; i < r.rater_scores.size(); ++i) out << (i ? ";" : "") << r.rater_scores[i];
        out << ',' << r.confidence << ',' << r.time_to_answer_s << "\n";
    }
    return out.str();
}

}  // namespace hreye

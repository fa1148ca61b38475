#include "hreye/metrics.hpp"

#include "hreye/error.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hreye {

std::string_view to_string(Condition c) noexcept {
    switch (c) {
        case Condition::HREyeTrained: return "HREye-trained";
        case Condition::OLED: return "OLED";
        case Condition::HREyeUntrained: break;
    }
    return "HREye-untrained";
}

std::optional<Condition> parse_condition(std::string_view s) noexcept {
    for (auto c : {Condition::HREyeTrained, Condition::OLED, Condition::HREyeUntrained}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

std::string to_string(const ShownStimulus& s) {
    if (const auto* id = std::get_if<ActiveLucemeId>(&s)) {
        return std::string(to_string(*id));
    }
    return to_string(OcularLucemeId::gaze(std::get<GazeAngle>(s)));
}

void validate(const ResponseRecord& r) {
    if (r.rater_scores.empty()) {
        throw DataError("record for " + r.participant + " has no rater scores");
    }
    if (r.confidence < 0 || r.confidence > 10) {
        throw DataError("confidence must lie in [0, 10]");
    }
    if (!(r.time_to_answer_s >= 0.0) || !std::isfinite(r.time_to_answer_s)) {
        throw DataError("time to answer must be a non-negative number");
    }
    for (double s : r.rater_scores) {
        if (!std::isfinite(s)) throw DataError("rater scores must be finite");
        if (r.is_ocular() ? (s < 0.0 || s >= 360.0) : (s < 0.0 || s > 100.0)) {
            throw DataError(r.is_ocular() ? "reported angles must lie in [0, 360)"
                                          : "correctness scores must lie in [0, 100]");
        }
    }
}

double circular_mean(const std::vector<double>& angles_deg) {
    if (angles_deg.empty()) {
        throw DataError("circular mean of no angles");
    }
    double sx = 0.0;
    double sy = 0.0;
    for (double a : angles_deg) {
        const double rad = normalize_deg(a) * std::numbers::pi / 180.0;
        sx += std::cos(rad);
        sy += std::sin(rad);
    }
    if (std::hypot(sx, sy) < 1e-12 * static_cast<double>(angles_deg.size())) {
        throw DataError("angles cancel out; circular mean undefined");
    }
    double deg = std::atan2(sy, sx) * 180.0 / std::numbers::pi;
    deg = normalize_deg(deg);
    // Snap values that are within rounding of a whole degree boundary at 360.
    return 360.0 - deg < 1e-9 ? 0.0 : deg;
}

double aggregate_score(const ResponseRecord& record) {
    if (record.rater_scores.empty()) {
        throw DataError("record for " + record.participant + " has no rater scores");
    }
    if (record.is_ocular()) {
        return circular_mean(record.rater_scores);
    }
    return std::accumulate(record.rater_scores.begin(), record.rater_scores.end(), 0.0) /
           static_cast<double>(record.rater_scores.size());
}

namespace {

double mean_active(const std::vector<const ResponseRecord*>& records) {
    double sum = 0.0;
    for (const auto* r : records) {
        sum += aggregate_score(*r);
    }
    return sum / static_cast<double>(records.size());
}

std::vector<const ResponseRecord*> active_only(const std::vector<ResponseRecord>& records) {
    std::vector<const ResponseRecord*> out;
    for (const auto& r : records) {
        if (r.is_ocular()) {
            throw DataError("accuracy is defined over active-luceme records only");
        }
        out.push_back(&r);
    }
    return out;
}

}  // namespace

double accuracy(const std::vector<ResponseRecord>& records) {
    if (records.empty()) {
        throw DataError("accuracy of no records");
    }
    return mean_active(active_only(records));
}

std::optional<double> operational_accuracy(const std::vector<ResponseRecord>& records) {
    if (records.empty()) {
        throw DataError("operational accuracy of no records");
    }
    std::vector<const ResponseRecord*> confident;
    for (const auto* r : active_only(records)) {
        if (r->confidence >= kOperationalConfidence) confident.push_back(r);
    }
    if (confident.empty()) {
        return std::nullopt;
    }
    return mean_active(confident);
}

double circular_error(double true_deg, double reported_deg) {
    return circular_distance(true_deg, reported_deg);
}

std::vector<ResponseRecord> adjust_time(std::vector<ResponseRecord> records, double mean_swim_time_s) {
    if (!(mean_swim_time_s >= 0.0) || !std::isfinite(mean_swim_time_s)) {
        throw DomainError("mean swim time must be a non-negative number");
    }
    for (auto& r : records) {
        if (r.condition == Condition::OLED) {
            r.time_to_answer_s += mean_swim_time_s;
        }
    }
    return records;
}

RatingMatrix::RatingMatrix(std::vector<std::vector<int>> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) {
        throw DataError("rating matrix has no subjects");
    }
    const auto k = rows_.front().size();
    if (k < 2) {
        throw DataError("rating matrix needs at least 2 categories");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& row = rows_[i];
        if (row.size() != k) {
            throw DataError("rating matrix row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                            " categories, expected " + std::to_string(k));
        }
        int sum = 0;
        for (int c : row) {
            if (c < 0) throw DataError("rating counts must be non-negative");
            sum += c;
        }
        if (i == 0) {
            raters_ = sum;
        } else if (sum != raters_) {
            throw DataError("rating matrix row " + std::to_string(i + 1) + " sums to " + std::to_string(sum) +
                            ", expected " + std::to_string(raters_));
        }
    }
    if (raters_ < 2) {
        throw DataError("rating matrix needs at least 2 raters per subject");
    }
}

RatingMatrix parse_rating_matrix(std::string_view text) {
    std::vector<std::vector<int>> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<int> row;
        std::stringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            const auto b = field.find_first_not_of(" \t\r");
            const auto e = field.find_last_not_of(" \t\r");
            if (b == std::string::npos) throw ParseError(line_no, "empty count");
            const std::string_view f = std::string_view(field).substr(b, e - b + 1);
            int v = 0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                throw ParseError(line_no, "bad count '" + std::string(f) + "'");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return RatingMatrix(std::move(rows));
}

KappaResult fleiss_kappa(const RatingMatrix& m) {
    const auto subjects = static_cast<double>(m.subjects());
    const double n = m.raters();
    const auto k = m.categories();

    std::vector<long long> column(k, 0);
    double agreement_sum = 0.0;
    for (const auto& row : m.rows()) {
        long long squares = 0;
        for (std::size_t j = 0; j < k; ++j) {
            squares += static_cast<long long>(row[j]) * row[j];
            column[j] += row[j];
        }
        agreement_sum += (static_cast<double>(squares) - n) / (n * (n - 1.0));
    }

    KappaResult r;
    r.observed_agreement = agreement_sum / subjects;
    const double total = subjects * n;
    for (long long c : column) {
        const double p = static_cast<double>(c) / total;
        r.chance_agreement += p * p;
    }
    // Chance agreement is exactly 1 only when every rating falls in one category.
    for (long long c : column) {
        if (static_cast<double>(c) == total) {
            r.degenerate = true;
            r.kappa = 1.0;
            r.chance_agreement = 1.0;
            return r;
        }
    }
    r.kappa = (r.observed_agreement - r.chance_agreement) / (1.0 - r.chance_agreement);
    return r;
}

namespace {

struct Accum {
    std::size_t count = 0;
    double score_sum = 0.0;
    double confident_sum = 0.0;
    std::size_t confident = 0;
    double confidence_sum = 0.0;
    double time_sum = 0.0;

    void add(const ResponseRecord& r, double value) {
        ++count;
        score_sum += value;
        confidence_sum += r.confidence;
        time_sum += r.time_to_answer_s;
        if (r.confidence >= kOperationalConfidence) {
            ++confident;
            confident_sum += value;
        }
    }

    GroupStats stats(bool ocular) const {
        GroupStats g;
        g.count = count;
        g.accuracy = score_sum / static_cast<double>(count);
        if (!ocular && confident > 0) g.operational_accuracy = confident_sum / static_cast<double>(confident);
        g.mean_confidence = confidence_sum / static_cast<double>(count);
        g.mean_time_s = time_sum / static_cast<double>(count);
        return g;
    }
};

// Active records contribute their aggregated score; gaze records their
// circular error against the shown angle.
double record_value(const ResponseRecord& r) {
    const double agg = aggregate_score(r);
    if (const auto* g = std::get_if<GazeAngle>(&r.shown)) {
        return circular_error(g->degrees(), agg);
    }
    return agg;
}

std::string fmt(double v, int precision = 2) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << v;
    return s.str();
}

std::string fmt_opt(const std::optional<double>& v, int precision = 2) {
    return v ? fmt(*v, precision) : "n/a";
}

}  // namespace

ScoreReport score(const std::vector<ResponseRecord>& records, const std::optional<RatingMatrix>& ratings) {
    ScoreReport rep;
    rep.records = records.size();
    std::vector<ResponseRecord> active;
    std::map<std::string, std::pair<Accum, bool>> per_luceme;
    std::map<std::string, std::pair<Accum, bool>> per_condition_active;
    double gaze_error_sum = 0.0;
    std::size_t gaze_count = 0;
    double time_sum = 0.0;

    for (const auto& r : records) {
        validate(r);
        const double value = record_value(r);
        auto& slot = per_luceme[to_string(r.shown)];
        slot.first.add(r, value);
        slot.second = r.is_ocular();
        time_sum += r.time_to_answer_s;
        if (r.is_ocular()) {
            gaze_error_sum += value;
            ++gaze_count;
        } else {
            active.push_back(r);
            auto& c = per_condition_active[std::string(to_string(r.condition))];
            c.first.add(r, value);
        }
    }
    if (!active.empty()) {
        rep.accuracy = accuracy(active);
        rep.operational_accuracy = operational_accuracy(active);
    }
    if (gaze_count > 0) {
        rep.mean_gaze_error_deg = gaze_error_sum / static_cast<double>(gaze_count);
    }
    if (!records.empty()) {
        rep.mean_time_s = time_sum / static_cast<double>(records.size());
    }
    if (ratings) {
        rep.kappa = fleiss_kappa(*ratings);
    }
    for (const auto& [name, slot] : per_luceme) rep.per_luceme[name] = slot.first.stats(slot.second);
    for (const auto& [name, slot] : per_condition_active) rep.per_condition[name] = slot.first.stats(false);
    return rep;
}

std::string format_text(const ScoreReport& rep) {
    std::ostringstream out;
    out << "records              " << rep.records << "\n";
    out << "accuracy             " << fmt_opt(rep.accuracy, 1) << "\n";
    out << "operational accuracy " << fmt_opt(rep.operational_accuracy, 1) << "  (confidence >= "
        << kOperationalConfidence << ")\n";
    out << "mean time to answer  " << fmt_opt(rep.mean_time_s) << " s\n";
    out << "mean gaze error      " << fmt_opt(rep.mean_gaze_error_deg) << " deg\n";
    if (rep.kappa) {
        out << "fleiss kappa         " << fmt(rep.kappa->kappa, 4) << (rep.kappa->degenerate ? "  (degenerate)" : "")
            << "\n";
    }
    if (!rep.per_condition.empty()) {
        out << "\ncondition          n   accuracy  op.acc  conf  time_s\n";
        for (const auto& [name, g] : rep.per_condition) {
            out << name << std::string(name.size() < 16 ? 16 - name.size() : 1, ' ') << " " << g.count << "  "
                << fmt(g.accuracy, 1) << "  " << fmt_opt(g.operational_accuracy, 1) << "  "
                << fmt(g.mean_confidence, 1) << "  " << fmt(g.mean_time_s) << "\n";
        }
    }
    if (!rep.per_luceme.empty()) {
        out << "\nluceme             n   acc/err   op.acc  conf  time_s\n";
        for (const auto& [name, g] : rep.per_luceme) {
            out << name << std::string(name.size() < 16 ? 16 - name.size() : 1, ' ') << " " << g.count << "  "
                << fmt(g.accuracy, 1) << "  " << fmt_opt(g.operational_accuracy, 1) << "  "
                << fmt(g.mean_confidence, 1) << "  " << fmt(g.mean_time_s) << "\n";
        }
    }
    return out.str();
}

std::string format_key_values(const ScoreReport& rep) {
    std::ostringstream out;
    out << "records=" << rep.records << "\n";
    out << "accuracy=" << fmt_opt(rep.accuracy, 4) << "\n";
    out << "operational_accuracy=" << fmt_opt(rep.operational_accuracy, 4) << "\n";
    out << "mean_time_s=" << fmt_opt(rep.mean_time_s, 4) << "\n";
    out << "mean_gaze_error_deg=" << fmt_opt(rep.mean_gaze_error_deg, 4) << "\n";
    if (rep.kappa) {
        out << "fleiss_kappa=" << fmt(rep.kappa->kappa, 6) << "\n";
        out << "fleiss_kappa_degenerate=" << (rep.kappa->degenerate ? "true" : "false") << "\n";
    }
    for (const auto& [name, g] : rep.per_condition) {
        out << "condition." << name << ".count=" << g.count << "\n";
        out << "condition." << name << ".accuracy=" << fmt(g.accuracy, 4) << "\n";
        out << "condition." << name << ".operational_accuracy=" << fmt_opt(g.operational_accuracy, 4) << "\n";
        out << "condition." << name << ".mean_time_s=" << fmt(g.mean_time_s, 4) << "\n";
    }
    for (const auto& [name, g] : rep.per_luceme) {
        out << "luceme." << name << ".count=" << g.count << "\n";
        out << "luceme." << name << ".accuracy=" << fmt(g.accuracy, 4) << "\n";
        out << "luceme." << name << ".operational_accuracy=" << fmt_opt(g.operational_accuracy, 4) << "\n";
        out << "luceme." << name << ".mean_confidence=" << fmt(g.mean_confidence, 4) << "\n";
        out << "luceme." << name << ".mean_time_s=" << fmt(g.mean_time_s, 4) << "\n";
    }
    return out.str();
}

}  // namespace hreye

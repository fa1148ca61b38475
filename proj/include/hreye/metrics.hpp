#pragma once

#include "hreye/lucemes.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hreye {

enum class Condition { HREyeTrained, OLED, HREyeUntrained };

std::string_view to_string(Condition c) noexcept;
std::optional<Condition> parse_condition(std::string_view s) noexcept;

using ShownStimulus = std::variant<ActiveLucemeId, GazeAngle>;

std::string to_string(const ShownStimulus& s);

// One participant answer. Active stimuli carry rater correctness scores in
// [0, 100]; gaze stimuli carry rater-reported angles in [0, 360).
struct ResponseRecord {
    std::string participant;
    Condition condition = Condition::HREyeTrained;
    ShownStimulus shown = ActiveLucemeId::Affirmative;
    std::vector<double> rater_scores;
    int confidence = 0;
    double time_to_answer_s = 0.0;

    bool is_ocular() const noexcept { return std::holds_alternative<GazeAngle>(shown); }
};

/// Throws DataError on a record violating its invariants.
void validate(const ResponseRecord& record);

inline constexpr int kOperationalConfidence = 6;

/// Mean of the rater scores, or their circular mean for gaze stimuli.
double aggregate_score(const ResponseRecord& record);

/// Mean aggregated score over active records.
double accuracy(const std::vector<ResponseRecord>& records);

/// Accuracy over records with confidence >= 6; nullopt when none qualify.
std::optional<double> operational_accuracy(const std::vector<ResponseRecord>& records);

/// Angular distance in [0, 180].
double circular_error(double true_deg, double reported_deg);

/// Resultant-vector direction of `angles`, in [0, 360). Throws DataError if
/// empty or if the vectors cancel.
double circular_mean(const std::vector<double>& angles_deg);

/// Adds the mean swim time to OLED-condition answers only.
std::vector<ResponseRecord> adjust_time(std::vector<ResponseRecord> records, double mean_swim_time_s);

// Subjects x categories table of rater counts. Each row sums to the same n.
class RatingMatrix {
public:
    /// Throws DataError unless rows are non-empty, rectangular, non-negative,
    /// k >= 2 and every row sums to the same n >= 2.
    explicit RatingMatrix(std::vector<std::vector<int>> rows);

    std::size_t subjects() const noexcept { return rows_.size(); }
    std::size_t categories() const noexcept { return rows_.front().size(); }
    int raters() const noexcept { return raters_; }
    const std::vector<std::vector<int>>& rows() const noexcept { return rows_; }

private:
    std::vector<std::vector<int>> rows_;
    int raters_ = 0;
};

/// Plain-text table: one subject per line, comma-separated counts, `#`
/// comments.
RatingMatrix parse_rating_matrix(std::string_view text);

struct KappaResult {
    double kappa = 0.0;
    double observed_agreement = 0.0;  // mean per-subject agreement
    double chance_agreement = 0.0;
    bool degenerate = false;  // chance agreement is 1; kappa reported as 1
};

KappaResult fleiss_kappa(const RatingMatrix& m);

struct GroupStats {
    std::size_t count = 0;
    double accuracy = 0.0;  // mean aggregated score (active) or mean circular error (gaze)
    std::optional<double> operational_accuracy;
    double mean_confidence = 0.0;
    double mean_time_s = 0.0;
};

struct ScoreReport {
    std::size_t records = 0;
    std::optional<double> accuracy;
    std::optional<double> operational_accuracy;
    std::optional<double> mean_gaze_error_deg;
    std::optional<double> mean_time_s;
    std::optional<KappaResult> kappa;
    std::map<std::string, GroupStats> per_luceme;
    std::map<std::string, GroupStats> per_condition;
};

ScoreReport score(const std::vector<ResponseRecord>& records, const std::optional<RatingMatrix>& ratings = {});

std::string format_text(const ScoreReport& report);
std::string format_key_values(const ScoreReport& report);

/// Response CSV with header
/// `participant,condition,shown,rater_scores,confidence,time_s`; scores are
/// semicolon-separated. `shown` is an active luceme name, or a gaze angle as
/// `Ocular-<deg>` or plain degrees. Throws ParseError naming the line.
std::vector<ResponseRecord> parse_responses_csv(std::string_view text);
std::string write_responses_csv(const std::vector<ResponseRecord>& records);

}  // namespace hreye

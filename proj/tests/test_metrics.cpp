#include "hreye/error.hpp"
#include "hreye/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <algorithm>

using namespace hreye;

namespace {

ResponseRecord active(std::vector<double> scores, int confidence = 5, double time_s = 1.0,
                      Condition c = Condition::HREyeTrained, ActiveLucemeId id = ActiveLucemeId::Stay) {
    return {"p1", c, id, std::move(scores), confidence, time_s};
}

ResponseRecord gaze(int shown, std::vector<double> angles, int confidence = 5) {
    return {"p1", Condition::HREyeTrained, GazeAngle::from_degrees(shown), std::move(angles), confidence, 2.0};
}

std::vector<std::vector<int>> random_rows(int subjects, int raters, int categories) {
    std::vector<std::vector<int>> rows;
    for (int i = 0; i < subjects; ++i) {
        std::vector<int> row(static_cast<std::size_t>(categories), 0);
        for (int r = 0; r < raters; ++r) ++row[static_cast<std::size_t>(test::uniform_int(0, categories - 1))];
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("aggregate score") {
    CHECK(aggregate_score(active({100, 100, 70})) == doctest::Approx(90));
    CHECK(aggregate_score(active({40})) == 40);
    CHECK(aggregate_score(gaze(0, {350, 10})) == doctest::Approx(0).epsilon(1e-9));
    CHECK(aggregate_score(gaze(90, {80, 100})) == doctest::Approx(90));
    CHECK_THROWS_AS(aggregate_score(active({})), DataError);
}

TEST_CASE("circular mean is rotation-equivariant") {
    for (int i = 0; i < 500; ++i) {
        std::vector<double> angles;
        const double base = test::uniform_real(0, 360);
        for (int k = test::uniform_int(1, 6); k > 0; --k) angles.push_back(base + test::uniform_real(-60, 60));
        const double delta = test::uniform_real(-720, 720);
        std::vector<double> shifted;
        for (double a : angles) shifted.push_back(a + delta);
        CHECK(circular_distance(circular_mean(shifted), circular_mean(angles) + delta) < 1e-6);
    }
    CHECK_THROWS_AS(circular_mean({}), DataError);
    CHECK_THROWS_AS(circular_mean({0, 180}), DataError);
}

TEST_CASE("accuracy") {
    CHECK(accuracy({active({100}), active({100}), active({50}), active({0})}) == 62.5);
    CHECK(accuracy({active({100}), active({100})}) == 100);
    CHECK_THROWS_AS(accuracy({}), DataError);
    CHECK_THROWS_AS(accuracy({gaze(0, {0})}), DataError);
}

TEST_CASE("operational accuracy") {
    CHECK(operational_accuracy({active({100}, 9), active({0}, 2)}) == 100.0);
    CHECK(operational_accuracy({active({100}, 6), active({0}, 5)}) == 100.0);
    CHECK_FALSE(operational_accuracy({active({100}, 5), active({20}, 5)}).has_value());
    CHECK_THROWS_AS(operational_accuracy({}), DataError);
}

TEST_CASE("accuracy is order-invariant and bounded") {
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ResponseRecord> recs;
        for (int i = test::uniform_int(1, 20); i > 0; --i) {
            recs.push_back(active({test::uniform_real(0, 100), test::uniform_real(0, 100)}, test::uniform_int(0, 10)));
        }
        const double acc = accuracy(recs);
        const auto op = operational_accuracy(recs);
        std::shuffle(recs.begin(), recs.end(), test::rng());
        CHECK(accuracy(recs) == doctest::Approx(acc).epsilon(1e-12));
        CHECK(operational_accuracy(recs).has_value() == op.has_value());
        if (op) {
            CHECK(*operational_accuracy(recs) == doctest::Approx(*op).epsilon(1e-12));
            CHECK(*op >= 0.0);
            CHECK(*op <= 100.0);
        }
    }
}

TEST_CASE("circular error") {
    CHECK(circular_error(90, 120) == 30);
    CHECK(circular_error(350, 10) == doctest::Approx(20));
    CHECK(circular_error(33, 33) == 0);
    for (int i = 0; i < 1000; ++i) {
        const double a = test::uniform_real(0, 360);
        const double b = test::uniform_real(0, 360);
        const double c = test::uniform_real(0, 360);
        CHECK(circular_error(a, b) == circular_error(b, a));
        CHECK(circular_error(a, c) <= circular_error(a, b) + circular_error(b, c) + 1e-9);
        CHECK(circular_error(a, b) <= 180.0);
    }
}

TEST_CASE("swim time adjustment") {
    const std::vector<ResponseRecord> recs{active({1}, 5, 4.0, Condition::OLED), active({1}, 5, 4.0, Condition::HREyeTrained),
                                           active({1}, 5, 4.0, Condition::HREyeUntrained)};
    const auto adj = adjust_time(recs, 6.0);
    CHECK(adj[0].time_to_answer_s == 10.0);
    CHECK(adj[1].time_to_answer_s == 4.0);
    CHECK(adj[2].time_to_answer_s == 4.0);
    const auto same = adjust_time(recs, 0.0);
    for (std::size_t i = 0; i < recs.size(); ++i) CHECK(same[i].time_to_answer_s == recs[i].time_to_answer_s);
    CHECK_THROWS_AS(adjust_time(recs, -1.0), DomainError);
}

TEST_CASE("record validation") {
    CHECK_THROWS_AS(validate(active({})), DataError);
    CHECK_THROWS_AS(validate(active({101})), DataError);
    CHECK_THROWS_AS(validate(active({50}, 11)), DataError);
    CHECK_THROWS_AS(validate(active({50}, 5, -1.0)), DataError);
    CHECK_THROWS_AS(validate(gaze(0, {360})), DataError);
    CHECK_NOTHROW(validate(gaze(0, {359.5})));
}

TEST_CASE("fleiss kappa examples") {
    const auto frozen = fleiss_kappa(RatingMatrix({{3, 0}, {2, 1}, {1, 2}, {0, 3}}));
    CHECK(std::abs(frozen.kappa - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(test::fleiss_kappa_oracle({{3, 0}, {2, 1}, {1, 2}, {0, 3}}) - 1.0 / 3.0) < 1e-12);
    CHECK(frozen.observed_agreement == doctest::Approx(2.0 / 3.0));
    CHECK(frozen.chance_agreement == doctest::Approx(0.5));

    CHECK(fleiss_kappa(RatingMatrix({{3, 0}, {0, 3}})).kappa == 1.0);
    const auto all_one = fleiss_kappa(RatingMatrix({{4, 0}, {4, 0}}));
    CHECK(all_one.kappa == 1.0);
    CHECK(all_one.degenerate);
}

TEST_CASE("fleiss kappa matches the pair-enumeration oracle") {
    for (int trial = 0; trial < 300; ++trial) {
        const auto rows = random_rows(test::uniform_int(1, 10), test::uniform_int(2, 6), test::uniform_int(2, 5));
        CHECK(std::abs(fleiss_kappa(RatingMatrix(rows)).kappa - test::fleiss_kappa_oracle(rows)) <= 1e-12);
    }
}

TEST_CASE("fleiss kappa is 1 under perfect agreement") {
    for (int trial = 0; trial < 100; ++trial) {
        const int k = test::uniform_int(2, 5);
        const int n = test::uniform_int(2, 6);
        std::vector<std::vector<int>> rows;
        for (int i = test::uniform_int(1, 10); i > 0; --i) {
            std::vector<int> row(static_cast<std::size_t>(k), 0);
            row[static_cast<std::size_t>(test::uniform_int(0, k - 1))] = n;
            rows.push_back(row);
        }
        CHECK(fleiss_kappa(RatingMatrix(rows)).kappa == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("fleiss kappa permutation invariance") {
    for (int trial = 0; trial < 100; ++trial) {
        const int k = test::uniform_int(2, 5);
        auto rows = random_rows(test::uniform_int(2, 10), test::uniform_int(2, 6), k);
        const double base = fleiss_kappa(RatingMatrix(rows)).kappa;
        std::shuffle(rows.begin(), rows.end(), test::rng());
        CHECK(fleiss_kappa(RatingMatrix(rows)).kappa == doctest::Approx(base).epsilon(1e-12));
        std::vector<std::size_t> perm(static_cast<std::size_t>(k));
        for (std::size_t j = 0; j < perm.size(); ++j) perm[j] = j;
        std::shuffle(perm.begin(), perm.end(), test::rng());
        for (auto& row : rows) {
            auto copy = row;
            for (std::size_t j = 0; j < perm.size(); ++j) row[j] = copy[perm[j]];
        }
        CHECK(fleiss_kappa(RatingMatrix(rows)).kappa == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("rating matrix validation") {
    CHECK_THROWS_AS(RatingMatrix(std::vector<std::vector<int>>{}), DataError);
    CHECK_THROWS_AS(RatingMatrix(std::vector<std::vector<int>>{{3}}), DataError);
    CHECK_THROWS_AS(RatingMatrix({{3, 0}, {2, 0}}), DataError);
    CHECK_THROWS_AS(RatingMatrix({{1, 0}, {0, 1}}), DataError);
    CHECK_THROWS_AS(RatingMatrix({{3, 0}, {2, 1, 0}}), DataError);
    CHECK_THROWS_AS(RatingMatrix({{4, -1}, {3, 0}}), DataError);
    const auto m = parse_rating_matrix("# subjects x categories\n3,0\n2,1\n\n1,2\n0,3\n");
    CHECK(m.subjects() == 4);
    CHECK(m.categories() == 2);
    CHECK(m.raters() == 3);
    CHECK_THROWS_AS(parse_rating_matrix("3,x\n"), ParseError);
}

TEST_CASE("response csv parsing") {
    const std::string csv =
        "\xEF\xBB\xBFparticipant,condition,shown,rater_scores,confidence,time_s\n"
        "p1,HREye-trained,FollowMe,100;80,8,5.5\n"
        "p2,OLED,Ocular-120,110;130,4,3\n"
        "p3,HREye-untrained,210,200,7,2.25\n";
    const auto recs = parse_responses_csv(csv);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].participant == "p1");
    CHECK(std::get<ActiveLucemeId>(recs[0].shown) == ActiveLucemeId::FollowMe);
    CHECK(recs[0].rater_scores == std::vector<double>{100, 80});
    CHECK(recs[0].confidence == 8);
    CHECK(recs[0].time_to_answer_s == 5.5);
    CHECK(recs[1].condition == Condition::OLED);
    CHECK(std::get<GazeAngle>(recs[1].shown).degrees() == 120);
    CHECK(std::get<GazeAngle>(recs[2].shown).degrees() == 210);
    CHECK(parse_responses_csv(write_responses_csv(recs)).size() == 3);
    const auto again = parse_responses_csv(write_responses_csv(recs));
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(again[i].participant == recs[i].participant);
        CHECK(again[i].condition == recs[i].condition);
        CHECK(again[i].shown == recs[i].shown);
        CHECK(again[i].rater_scores == recs[i].rater_scores);
        CHECK(again[i].confidence == recs[i].confidence);
        CHECK(again[i].time_to_answer_s == recs[i].time_to_answer_s);
    }
}

TEST_CASE("response csv errors name the line") {
    const std::string header = "participant,condition,shown,rater_scores,confidence,time_s\n";
    auto line_of = [](const std::string& text) {
        try {
            parse_responses_csv(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of(header + "p1,HREye-trained,Stay,100,5,1\np2,Robot,Stay,100,5,1\n") == 3);
    CHECK(line_of(header + "p1,HREye-trained,Dance,100,5,1\n") == 2);
    CHECK(line_of(header + "p1,HREye-trained,Stay,,5,1\n") == 2);
    CHECK(line_of(header + "p1,HREye-trained,Stay,100,11,1\n") == 2);
    CHECK(line_of(header + "p1,HREye-trained,Stay,100,5\n") == 2);
    CHECK(line_of(header + "p1,HREye-trained,45,100,5,1\n") == 2);
    CHECK(line_of("who,what\n") == 1);
}

TEST_CASE("score report") {
    std::vector<ResponseRecord> recs{
        active({100}, 9, 4.0, Condition::HREyeTrained, ActiveLucemeId::Stay),
        active({50}, 3, 6.0, Condition::OLED, ActiveLucemeId::GoUp),
        gaze(90, {120}),
        gaze(0, {350, 10}),
    };
    const auto rep = score(recs, RatingMatrix({{3, 0}, {2, 1}, {1, 2}, {0, 3}}));
    CHECK(rep.records == 4);
    CHECK(rep.accuracy == 75.0);
    CHECK(rep.operational_accuracy == 100.0);
    CHECK(*rep.mean_gaze_error_deg == doctest::Approx(15.0));
    CHECK(*rep.mean_time_s == doctest::Approx(3.5));
    REQUIRE(rep.kappa.has_value());
    CHECK(rep.kappa->kappa == doctest::Approx(1.0 / 3.0));
    CHECK(rep.per_luceme.at("Stay").accuracy == 100.0);
    CHECK(rep.per_luceme.at("Ocular-90").accuracy == doctest::Approx(30.0));
    CHECK(rep.per_condition.at("OLED").count == 1);

    const auto text = format_text(rep);
    CHECK(text.find("accuracy             75.0") != std::string::npos);
    const auto kv = format_key_values(rep);
    CHECK(kv.find("accuracy=75.0000\n") != std::string::npos);
    CHECK(kv.find("operational_accuracy=100.0000\n") != std::string::npos);
}

TEST_CASE("score without active records") {
    const auto rep = score({gaze(90, {90})});
    CHECK_FALSE(rep.accuracy.has_value());
    CHECK(rep.mean_gaze_error_deg == doctest::Approx(0.0));
    CHECK(format_text(rep).find("n/a") != std::string::npos);
}

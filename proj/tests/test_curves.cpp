#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <tuple>

#include "radialkit/curves.hpp"
#include "radialkit/errors.hpp"
#include "radialkit/random.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace radialkit;
using namespace oracles;
using testing_support::TempDir;

namespace {

const std::vector<LabeledScore> kFourScores{{"d1", 0.9, ImageLabel::distorted},
                                            {"d2", 0.4, ImageLabel::distorted},
                                            {"u1", 0.6, ImageLabel::undistorted},
                                            {"u2", 0.1, ImageLabel::undistorted}};

std::vector<ComparisonRecord> four_comparisons() {
    return {{"p1", "r1", 0.2, true}, {"p2", "r2", 0.9, true}, {"p3", "r3", 0.3, true}, {"p4", "r4", 0.8, true}};
}

std::map<std::string, double> four_qualities() {
    return {{"p1", 0.1}, {"p2", 0.2}, {"p3", 0.3}, {"p4", 0.4},
            {"r1", 1.0}, {"r2", 1.0}, {"r3", 1.0}, {"r4", 1.0}};
}

}  // namespace

TEST(Det, WorkedExample) {
    const auto curve = det_curve(kFourScores);
    EXPECT_EQ(curve.points.front(), (CurvePoint{0, 1}));
    EXPECT_EQ(curve.points.back(), (CurvePoint{1, 0}));
    EXPECT_NE(std::find(curve.points.begin(), curve.points.end(), CurvePoint{0.5, 0.5}), curve.points.end());
    EXPECT_EQ(eer(kFourScores), 0.5);
    EXPECT_EQ(auc(kFourScores), 0.75);
}

TEST(Det, SeparableAndDegenerate) {
    const std::vector<LabeledScore> sep{{"a", 2, ImageLabel::distorted}, {"b", 3, ImageLabel::distorted},
                                        {"c", 0, ImageLabel::undistorted}, {"d", 1, ImageLabel::undistorted}};
    const auto curve = det_curve(sep);
    EXPECT_NE(std::find(curve.points.begin(), curve.points.end(), CurvePoint{0, 0}), curve.points.end());
    EXPECT_EQ(eer(sep), 0.0);
    EXPECT_EQ(auc(sep), 1.0);

    const std::vector<LabeledScore> flat{{"a", 1, ImageLabel::distorted}, {"b", 1, ImageLabel::undistorted},
                                         {"c", 1, ImageLabel::undistorted}};
    EXPECT_EQ(eer(flat), 0.5);
    EXPECT_EQ(auc(flat), 0.5);

    EXPECT_THROW(det_curve(std::vector<LabeledScore>{{"a", 1, ImageLabel::distorted}}), InvalidArgument);
    EXPECT_THROW(auc(std::vector<LabeledScore>{{"a", 1, ImageLabel::undistorted}}), InvalidArgument);
}

TEST(Det, MatchesBruteForce) {
    CounterRng rng(1, 1);
    for (int t = 0; t < 1000; ++t) {
        const auto s = random_scores(rng);
        const auto curve = det_curve(s);
        ASSERT_EQ(curve.points, det_oracle(s));
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            EXPECT_GE(curve.points[i].x, curve.points[i - 1].x);
            EXPECT_LE(curve.points[i].y, curve.points[i - 1].y);
        }
    }
}

TEST(Det, InvariantUnderMonotoneTransform) {
    CounterRng rng(2, 2);
    for (int t = 0; t < 200; ++t) {
        auto s = random_scores(rng);
        const auto before = det_curve(s).points;
        for (auto& x : s) x.score = std::exp(3.0 * x.score) - 7.0;
        EXPECT_EQ(det_curve(s).points, before);
    }
}

TEST(Det, LabelInversionSwapsAxes) {
    CounterRng rng(3, 3);
    for (int t = 0; t < 200; ++t) {
        auto s = random_scores(rng);
        std::set<std::pair<double, double>> original;
        for (const auto& p : det_curve(s).points) original.insert({p.y, p.x});
        for (auto& x : s) {
            x.label = x.label == ImageLabel::distorted ? ImageLabel::undistorted : ImageLabel::distorted;
            x.score = -x.score;
        }
        std::set<std::pair<double, double>> inverted;
        for (const auto& p : det_curve(s).points) inverted.insert({p.x, p.y});
        EXPECT_EQ(inverted, original);
    }
}

TEST(Eer, MatchesInterpolatedCrossing) {
    CounterRng rng(4, 4);
    for (int t = 0; t < 1000; ++t) {
        const auto s = random_scores(rng);
        ASSERT_EQ(eer(s), eer_oracle(s));
        EXPECT_GE(eer(s), 0.0);
        EXPECT_LE(eer(s), 1.0);
    }
}

TEST(Calibration, WorkedExamples) {
    const auto c = four_comparisons();
    const auto cal = calibrate_threshold(c, 0.5);
    EXPECT_EQ(cal.tau, 0.8);
    EXPECT_EQ(cal.achieved_fnmr, 0.5);
    EXPECT_EQ(cal.mated, 4u);

    const auto low = calibrate_threshold(c, 0.05);
    EXPECT_EQ(low.tau, 0.2);
    EXPECT_EQ(low.achieved_fnmr, 0.0);

    const std::vector<ComparisonRecord> flat{{"a", "b", 0.5, true}, {"c", "d", 0.5, true}};
    for (double target : {0.1, 0.5, 0.9}) {
        const auto f = calibrate_threshold(flat, target);
        EXPECT_TRUE(f.achieved_fnmr == 0.0 || f.achieved_fnmr == 1.0);
        EXPECT_EQ(fnmr(flat, f.tau), f.achieved_fnmr);
    }
    EXPECT_THROW(calibrate_threshold(std::vector<ComparisonRecord>{{"a", "b", 0.5, false}}, 0.5), InvalidArgument);
    EXPECT_THROW(calibrate_threshold(c, 0.0), InvalidArgument);
}

TEST(Calibration, MatchesBruteForceAndResolution) {
    CounterRng rng(5, 5);
    for (int t = 0; t < 1000; ++t) {
        const auto inst = random_edc(rng);
        const double target = rng.uniform(0.01, 0.99);
        const auto got = calibrate_threshold(inst.comparisons, target);
        const auto want = calibration_oracle(inst.comparisons, target);
        ASSERT_EQ(got.tau, want.tau);
        ASSERT_EQ(got.achieved_fnmr, want.achieved_fnmr);
    }
    // Distinct similarities: the achieved rate is within 1/n of the target.
    for (int t = 0; t < 200; ++t) {
        std::vector<ComparisonRecord> c;
        const int n = 1 + static_cast<int>(rng.next_u64() % 200);
        for (int i = 0; i < n; ++i) c.push_back({"p", "r", rng.uniform(-1, 1), true});
        const double target = rng.uniform(0.001, 0.999);
        EXPECT_LE(std::abs(calibrate_threshold(c, target).achieved_fnmr - target), 1.0 / n + 1e-15);
    }
}

TEST(Edc, WorkedExample) {
    const auto curve = edc_curve(four_comparisons(), four_qualities(), 0.5);
    ASSERT_GE(curve.points.size(), 3u);
    EXPECT_EQ(curve.points[0], (CurvePoint{0.0, 0.5}));
    EXPECT_EQ(curve.points[1], (CurvePoint{0.25, 1.0 / 3.0}));
    EXPECT_EQ(curve.points[2], (CurvePoint{0.5, 0.5}));
    EXPECT_EQ(value_at_discard(curve, 0.0), 0.5);
    EXPECT_EQ(value_at_discard(curve, 0.25), 1.0 / 3.0);
    EXPECT_EQ(curve.tau, 0.5);
}

TEST(Edc, MatchesBruteForce) {
    CounterRng rng(6, 6);
    for (int t = 0; t < 1000; ++t) {
        const auto inst = random_edc(rng);
        const auto curve = edc_curve(inst.comparisons, inst.qualities, inst.tau);
        ASSERT_EQ(curve.points, edc_oracle(inst.comparisons, inst.qualities, inst.tau, 50));
        for (std::size_t i = 1; i < curve.points.size(); ++i) EXPECT_GT(curve.points[i].x, curve.points[i - 1].x);
    }
}

TEST(Edc, InvariantUnderMonotoneQualityTransform) {
    CounterRng rng(7, 7);
    for (int t = 0; t < 200; ++t) {
        auto inst = random_edc(rng);
        const auto before = edc_curve(inst.comparisons, inst.qualities, inst.tau).points;
        for (auto& [id, q] : inst.qualities) q = std::atan(q) * 10.0 + 3.0;
        EXPECT_EQ(edc_curve(inst.comparisons, inst.qualities, inst.tau).points, before);
    }
}

TEST(Edc, AntiCorrelatedQualityDrivesFnmrToZero) {
    std::vector<ComparisonRecord> c;
    std::map<std::string, double> q;
    for (int i = 0; i < 100; ++i) {
        const std::string id = "p" + std::to_string(i);
        c.push_back({id, "ref", i / 100.0, true});
        q[id] = i;  // low similarity = low quality
    }
    q["ref"] = 1000;
    const auto curve = edc_curve(c, q, 0.3);
    for (std::size_t i = 1; i < curve.points.size(); ++i) EXPECT_LE(curve.points[i].y, curve.points[i - 1].y);
    EXPECT_EQ(curve.points.back().y, 0.0);
    EXPECT_EQ(curve.points.front().y, 0.3);
}

TEST(Edc, ConstantQualityKeepsFnmrRoughlyFlat) {
    std::vector<ComparisonRecord> c;
    std::map<std::string, double> q;
    for (int i = 0; i < 100; ++i) {
        const std::string id = "p" + std::to_string(i);
        c.push_back({id, "ref", (i * 37 % 100) / 100.0, true});
        q[id] = 1.0;
    }
    q["ref"] = 1.0;
    const auto curve = edc_curve(c, q, 0.25);
    for (const auto& p : curve.points) {
        if (p.x <= 0.5) EXPECT_NEAR(p.y, 0.25, 0.1) << p.x;
    }
}

TEST(Edc, MissingQualityIsAnError) {
    auto q = four_qualities();
    q.erase("r3");
    EXPECT_THROW(edc_curve(four_comparisons(), q, 0.5), InvalidArgument);
}

TEST(CurveFiles, RoundTrips) {
    TempDir dir("curves");
    const auto curve = edc_curve(four_comparisons(), four_qualities(), 0.5);
    curve_table(curve).write(dir / "edc.csv");
    const auto back = read_curve(dir / "edc.csv");
    EXPECT_EQ(back.points, curve.points);
    EXPECT_EQ(back.tau, 0.5);
    EXPECT_EQ(back.x_label, "discard_fraction");

    const auto det = det_curve(kFourScores);
    curve_table(det).write(dir / "det.csv");
    EXPECT_FALSE(read_curve(dir / "det.csv").tau);

    comparisons_table(four_comparisons()).write(dir / "cmp.csv");
    const auto cmp = read_comparisons(dir / "cmp.csv");
    ASSERT_EQ(cmp.size(), 4u);
    EXPECT_EQ(cmp[3].similarity, 0.8);

    std::ofstream(dir / "bad.csv") << "probe,reference,similarity,mated\na,b,0.5,2\n";
    EXPECT_THROW(read_comparisons(dir / "bad.csv"), ParseError);

    std::ofstream(dir / "scores.csv") << "id,score,label\nd1,0.9,distorted\nu1,0.6,undistorted\n";
    EXPECT_EQ(read_labeled_scores(dir / "scores.csv").size(), 2u);

    const std::string svg = curve_svg(det, "DET");
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_NE(svg.find("fpr"), std::string::npos);
}

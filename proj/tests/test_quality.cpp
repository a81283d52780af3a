#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "radialkit/errors.hpp"
#include "radialkit/quality.hpp"
#include "radialkit/random.hpp"
#include "radialkit/synthetic.hpp"
#include "radialkit/warp.hpp"
#include "support.hpp"

using namespace radialkit;
using testing_support::TempDir;

namespace {

struct Problem {
    FeatureRows rows;
    std::vector<int> labels;
    std::vector<double> weights;
};

Problem random_problem(std::uint64_t seed) {
    CounterRng rng(seed, 0);
    Problem p;
    const int n = 2 + static_cast<int>(rng.next_u64() % 10);
    const int d = 1 + static_cast<int>(rng.next_u64() % 6);
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(static_cast<std::size_t>(d));
        for (auto& v : row) v = rng.normal();
        p.rows.push_back(row);
        p.labels.push_back(static_cast<int>(rng.next_u64() & 1));
    }
    p.weights.resize(static_cast<std::size_t>(d + 1));
    for (auto& w : p.weights) w = rng.normal();
    return p;
}

}  // namespace

TEST(Nqm, Examples) {
    EXPECT_EQ(nqm({0.0, 0.0}), 0.5);
    EXPECT_EQ(nqm({3.7, 3.7}), 0.5);
    EXPECT_NEAR(nqm({0.0, std::log(3.0)}), 0.75, 1e-15);
    const double tiny = nqm({1000.0, -1000.0});
    EXPECT_TRUE(std::isfinite(tiny));
    EXPECT_LT(tiny, 1e-300);
    EXPECT_EQ(nqm({-1000.0, 1000.0}), 1.0);
}

TEST(Nqm, ShiftInvariantAndMonotone) {
    CounterRng rng(5, 5);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(-20, 20), b = rng.uniform(-20, 20), c = rng.uniform(-100, 100);
        EXPECT_NEAR(nqm({a, b}), nqm({a + c, b + c}), 1e-12);
    }
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
        const double diff = -30.0 + 60.0 * i / 999.0;  // beta - alpha
        const double q = nqm({0.0, diff});
        EXPECT_GE(q, prev);
        prev = q;
    }
}

TEST(ScoreFile, RoundTripAndSchemas) {
    std::vector<ScoreRecord> recs{{"a", Logits{1.0, -1.0}, nqm({1.0, -1.0}), ImageLabel::distorted},
                                  {"b", Logits{0.0, 2.0}, nqm({0.0, 2.0}), ImageLabel::undistorted}};
    const auto table = scores_table(recs);
    EXPECT_EQ(table.header(), (std::vector<std::string>{"id", "alpha", "beta", "nqm", "label"}));
    const auto back = read_scores(table);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].nqm, recs[1].nqm);
    EXPECT_EQ(back[0].label, ImageLabel::distorted);

    const auto plain = read_scores(CsvTable::parse("id,nqm\nx,0.25\n"));
    EXPECT_FALSE(plain[0].logits);
    EXPECT_EQ(plain[0].nqm, 0.25);
    EXPECT_THROW(read_scores(CsvTable::parse("id,score\nx,1\n")), ParseError);
    EXPECT_THROW(read_scores(CsvTable::parse("id,nqm\nx,0.1\nx,0.2\n")), ParseError);
}

TEST(Features, ShapeAndUniformImage) {
    ImageBuffer gray(40, 30, 1);
    for (auto& v : gray.data()) v = 128;
    for (int k : {2, 5, 8}) {
        const auto f = radial_features(gray, k);
        ASSERT_EQ(f.size(), static_cast<std::size_t>(2 * k));
        for (int i = 0; i < k; ++i) {
            EXPECT_NEAR(f[i], 128.0 / 255.0, 1e-12);
            EXPECT_EQ(f[k + i], 0.0);
        }
    }
}

TEST(Features, RadialImageOrdering) {
    ImageBuffer img(64, 64, 1);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            img.at(x, y) = static_cast<std::uint8_t>(std::min(255.0, 6.0 * std::hypot(x - 31.5, y - 31.5)));
        }
    }
    const auto f = radial_features(img, 2);
    EXPECT_GT(f[1], f[0]);
}

TEST(Features, RotationInvariantUpToDiscretization) {
    const auto img = synthetic_face(4, 0, {.size = 64});
    ImageBuffer rot(64, 64, 1);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) rot.at(63 - y, x) = img.at(x, y);
    }
    const auto a = radial_features(img, 8);
    const auto b = radial_features(rot, 8);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12) << i;
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto p = random_problem(s);
        const auto g = logistic_gradient(p.weights, p.rows, p.labels);
        for (std::size_t j = 0; j < p.weights.size(); ++j) {
            auto wp = p.weights, wm = p.weights;
            wp[j] += 1e-5;
            wm[j] -= 1e-5;
            const double fd = (logistic_loss(wp, p.rows, p.labels) - logistic_loss(wm, p.rows, p.labels)) / 2e-5;
            EXPECT_LE(std::abs(fd - g[j]), 1e-6 * std::max(1.0, std::abs(g[j]))) << "problem " << s << " w" << j;
        }
    }
}

TEST(Logistic, SeparableTwoPoints) {
    const FeatureRows rows{{0.0, 1.0}, {1.0, 0.0}};
    const std::vector<int> labels{1, 0};
    std::vector<double> history;
    const auto model = train_logistic(rows, labels, {}, &history);
    EXPECT_GT(model.decision_value(rows[0]), 0.0);
    EXPECT_LT(model.decision_value(rows[1]), 0.0);
    ASSERT_EQ(history.size(), 501u);
    for (std::size_t i = 1; i < history.size(); ++i) EXPECT_LE(history[i], history[i - 1] + 1e-12);
}

TEST(Logistic, DescentAndDeterminism) {
    auto p = random_problem(1234);
    for (int i = 0; i < 40; ++i) {
        auto q = random_problem(5000 + i);
        p.rows.push_back(std::vector<double>(p.rows[0].size(), q.weights[0]));
        p.labels.push_back(i % 2);
    }
    std::vector<double> h1, h2;
    TrainOptions opt;
    opt.seed = 9;
    const auto m1 = train_logistic(p.rows, p.labels, opt, &h1);
    const auto m2 = train_logistic(p.rows, p.labels, opt, &h2);
    EXPECT_EQ(m1.weights, m2.weights);
    EXPECT_EQ(h1, h2);
    for (std::size_t i = 1; i < h1.size(); ++i) EXPECT_LE(h1[i], h1[i - 1] + 1e-12);
    EXPECT_THROW(train_logistic(p.rows, std::vector<int>(p.rows.size(), 1), opt), InvalidArgument);
}

TEST(BaselineModel, SerializeRoundTripAndBoundary) {
    const FeatureRows rows{{0.0, 1.0, 0.3, 0.1}, {1.0, 0.0, 0.2, 0.4}, {0.5, 0.2, 0.9, 0.0}};
    const std::vector<int> labels{1, 0, 1};
    TrainOptions opt;
    opt.annuli = 2;
    const auto m = train_logistic(rows, labels, opt);
    const auto back = BaselineModel::deserialize(m.serialize());
    EXPECT_EQ(back.weights, m.weights);
    EXPECT_EQ(back.mean, m.mean);
    EXPECT_EQ(back.stddev, m.stddev);
    EXPECT_EQ(back.serialize(), m.serialize());
    EXPECT_THROW(BaselineModel::deserialize("not a model\n"), ParseError);

    // Logits are antisymmetric, so the boundary scores exactly 0.5.
    BaselineModel zero = m;
    std::fill(zero.weights.begin(), zero.weights.end(), 0.0);
    EXPECT_EQ(nqm(zero.logits(rows[0])), 0.5);
    const Logits l = m.logits(rows[0]);
    EXPECT_EQ(l.alpha, -l.beta);
    EXPECT_NEAR(nqm(l), 1.0 / (1.0 + std::exp(m.decision_value(rows[0]))), 1e-15);
}

TEST(BaselineModel, LoadMissingFile) {
    TempDir dir("model");
    EXPECT_THROW(BaselineModel::load(dir / "absent.txt"), IoError);
}

TEST(BaselineModel, DetectsStrongDistortion) {
    FeatureRows rows;
    std::vector<int> labels;
    WarpSpec spec;
    spec.model = DistortionModel::division(0.9);
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto img = synthetic_face(s, 0, {.size = 64});
        rows.push_back(radial_features(img, 8));
        labels.push_back(0);
        rows.push_back(radial_features(warp(img, spec).image, 8));
        labels.push_back(1);
    }
    const auto model = train_logistic(rows, labels, {});
    const auto probe = warp(synthetic_face(1, 0, {.size = 64}), spec).image;
    EXPECT_LT(nqm(model.logits(probe)), 0.5);
}

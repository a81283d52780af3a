// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Measured values are printed next to their thresholds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "radialkit/curves.hpp"
#include "radialkit/dataset.hpp"
#include "radialkit/embedding.hpp"
#include "radialkit/geometry.hpp"
#include "radialkit/image_io.hpp"
#include "radialkit/quality.hpp"
#include "radialkit/random.hpp"
#include "radialkit/synthetic.hpp"
#include "radialkit/warp.hpp"
#include "support.hpp"

using namespace radialkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

/// The five fixed test images shared by several criteria.
std::vector<ImageBuffer> test_images() {
    return {
        gradient_image(64, 64),
        gradient_image(97, 61, 3),
        synthetic_face(1, 0),
        synthetic_face(2, 0, {.size = 160, .channels = 3}),
        testing_support::noise_image(80, 80, 1, 12345),
    };
}

NormPoint random_in_disk(CounterRng& rng, double r_max) {
    const double r = r_max * std::sqrt(rng.next_unit());
    const double a = 2.0 * std::numbers::pi * rng.next_unit();
    return {r * std::cos(a), r * std::sin(a)};
}

// 1 ---------------------------------------------------------------------------
Outcome geometry_round_trip() {
    const auto t0 = Clock::now();
    std::vector<DistortionModel> models;
    for (double l : {0.3, 0.4, 0.6, 0.9}) models.push_back(DistortionModel::division(l));
    for (auto v : {KbVariant::perspective, KbVariant::stereographic, KbVariant::equidistance, KbVariant::equisolid,
                   KbVariant::orthogonal}) {
        for (double l : {1.0, 1.5, 2.5}) models.push_back(DistortionModel::kannala_brandt(v, l));
    }
    double worst = 0.0;
    std::string worst_model;
    for (const auto& m : models) {
        CounterRng rng(2024, static_cast<std::uint64_t>(&m - models.data()));
        // Undistorted division-model points are drawn from the image of the
        // distorted unit disk, which is where the inverse is defined.
        const double ru_max = m.family() == ModelFamily::division ? 1.0 / (1.0 + m.lambda()) : 1.0;
        for (int i = 0; i < 10000; ++i) {
            const NormPoint pd = random_in_disk(rng, 0.99);
            const NormPoint a = m.distort(m.undistort(pd));
            const NormPoint pu = random_in_disk(rng, 0.99 * ru_max);
            const NormPoint b = m.undistort(m.distort(pu));
            const double e = std::max({std::abs(a.x - pd.x), std::abs(a.y - pd.y), std::abs(b.x - pu.x),
                                       std::abs(b.y - pu.y)});
            if (e > worst) {
                worst = e;
                worst_model = m.descriptor();
            }
        }
    }
    const double t = seconds_since(t0);
    return {worst < 1e-9 && t < 1.0, "max error " + fmt("%.3g", worst) + " (" + worst_model + ") < 1e-9, " +
                                         fmt("%.3f", t) + " s < 1 s"};
}

// 2 ---------------------------------------------------------------------------
Outcome exact_identities() {
    const auto t0 = Clock::now();
    int identical = 0, total = 0;
    for (const auto& img : test_images()) {
        for (const char* desc : {"dm:0", "kbd:1"}) {
            WarpSpec spec;
            spec.model = DistortionModel::parse(desc);
            spec.interpolation = Interpolation::nearest;
            ++total;
            identical += warp(img, spec).image == img;
        }
    }
    const double t = seconds_since(t0);
    return {identical == total && t < 1.0,
            std::to_string(identical) + "/" + std::to_string(total) + " bit-identical, " + fmt("%.3f", t) + " s < 1 s"};
}

// 3 ---------------------------------------------------------------------------
Outcome worked_examples() {
    const NormPoint u = dm_undistort({0.6, 0.8}, 0.5);
    const NormPoint d = dm_distort({0.4, 8.0 / 15.0}, 0.5);
    const NormPoint s = kb_undistort({1, 0}, DistortionModel::kannala_brandt(KbVariant::stereographic, 1.5));
    const double e1 = std::max(std::abs(u.x - 0.4), std::abs(u.y - 8.0 / 15.0));
    const double e2 = std::max(std::abs(d.x - 0.6), std::abs(d.y - 0.8));
    const double e3 = std::max(std::abs(s.x - 1.3909428), std::abs(s.y));
    return {e1 <= 1e-12 && e2 <= 1e-12 && e3 <= 1e-6,
            "dm_undistort err " + fmt("%.2g", e1) + ", root {1,2}->1 err " + fmt("%.2g", e2) + " (<= 1e-12); kbs err " +
                fmt("%.2g", e3) + " (<= 1e-6)"};
}

// 4 ---------------------------------------------------------------------------
Outcome nqm_properties() {
    bool half = nqm({0.0, 0.0}) == 0.5 && nqm({-7.25, -7.25}) == 0.5 && nqm({123.0, 123.0}) == 0.5;
    double shift_err = 0.0;
    CounterRng rng(4, 0);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(-30, 30), b = rng.uniform(-30, 30), c = rng.uniform(-500, 500);
        shift_err = std::max(shift_err, std::abs(nqm({a, b}) - nqm({a + c, b + c})));
    }
    const double big = nqm({1000.0, -1000.0});
    const bool finite = std::isfinite(big) && std::isfinite(nqm({-1000.0, 1000.0}));
    bool monotone = true;
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
        const double q = nqm({0.0, -50.0 + 100.0 * i / 999.0});
        monotone = monotone && q >= prev;
        prev = q;
    }
    return {half && shift_err <= 1e-12 && finite && monotone,
            std::string("alpha=beta->0.5 ") + (half ? "exact" : "NOT exact") + ", shift err " + fmt("%.2g", shift_err) +
                " (<= 1e-12), alpha=1000 " + (finite ? "finite" : "NOT finite") + ", monotone " +
                (monotone ? "yes" : "no")};
}

// 5 ---------------------------------------------------------------------------
Outcome curve_oracles() {
    const auto t0 = Clock::now();
    using namespace oracles;
    int det_ok = 0, eer_ok = 0, cal_ok = 0, edc_ok = 0;
    CounterRng rng(5, 0);
    for (int t = 0; t < 1000; ++t) {
        const auto s = random_scores(rng);
        det_ok += det_curve(s).points == det_oracle(s);
        eer_ok += eer(s) == eer_oracle(s);
        const auto inst = random_edc(rng);
        const double target = rng.uniform(0.01, 0.99);
        const auto got = calibrate_threshold(inst.comparisons, target);
        const auto want = calibration_oracle(inst.comparisons, target);
        cal_ok += got.tau == want.tau && got.achieved_fnmr == want.achieved_fnmr;
        edc_ok += edc_curve(inst.comparisons, inst.qualities, inst.tau).points ==
                  edc_oracle(inst.comparisons, inst.qualities, inst.tau, kDefaultDiscardSteps);
    }
    const double t = seconds_since(t0);
    const bool pass = det_ok == 1000 && eer_ok == 1000 && cal_ok == 1000 && edc_ok == 1000 && t < 10.0;
    return {pass, "exact matches det " + std::to_string(det_ok) + ", eer " + std::to_string(eer_ok) + ", calibrate " +
                      std::to_string(cal_ok) + ", edc " + std::to_string(edc_ok) + " of 1000; " + fmt("%.2f", t) +
                      " s < 10 s"};
}

// 6 ---------------------------------------------------------------------------
Outcome edc_worked_example() {
    const std::vector<ComparisonRecord> c{
        {"p1", "r1", 0.2, true}, {"p2", "r2", 0.9, true}, {"p3", "r3", 0.3, true}, {"p4", "r4", 0.8, true}};
    const std::map<std::string, double> q{{"p1", 0.1}, {"p2", 0.2}, {"p3", 0.3}, {"p4", 0.4},
                                          {"r1", 1.0}, {"r2", 1.0}, {"r3", 1.0}, {"r4", 1.0}};
    const auto curve = edc_curve(c, q, 0.5);
    const double f0 = value_at_discard(curve, 0.0);
    const double f25 = value_at_discard(curve, 0.25);
    return {f0 == 0.5 && f25 == 1.0 / 3.0,
            "FNMR(0) = " + fmt("%.17g", f0) + ", FNMR(0.25) = " + fmt("%.17g", f25) + " (expect 0.5, 1/3 exactly)"};
}

// 7 ---------------------------------------------------------------------------
Outcome crop_order() {
    const ImageBuffer img = synthetic_face(7, 0, {.size = 256});
    int wins = 0;
    std::ostringstream cells;
    for (double c : {0.3, 0.5, 0.7}) {
        for (double l : {0.3, 0.5, 0.9}) {
            const auto s = pipeline_pair(img, l, CropSpec::centered(c)).stats;
            wins += s.crop_then_distort_displacement > s.distort_then_crop_displacement;
            cells << " c" << c << "/l" << l << ":" << fmt("%.2f", s.crop_then_distort_displacement) << ">"
                  << fmt("%.2f", s.distort_then_crop_displacement);
        }
    }
    return {wins == 9, std::to_string(wins) + "/9 cells crop-first displaces more;" + cells.str()};
}

// 8 ---------------------------------------------------------------------------
Outcome round_trip_fidelity() {
    int improved = 0, total = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::ostringstream margins;
    WarpSpec synth;
    synth.model = DistortionModel::division(0.4);
    WarpSpec rect = synth;
    rect.direction = WarpDirection::rectify;
    for (const auto& img : test_images()) {
        const auto distorted = warp(img, synth).image;
        const auto restored = warp(distorted, rect).image;
        const Rect region = central_region(img.width(), img.height(), 0.6);
        const double margin = psnr(restored, img, region) - psnr(distorted, img, region);
        ++total;
        improved += margin > 0.0;
        min_margin = std::min(min_margin, margin);
        margins << ' ' << fmt("%.2f", margin);
    }
    return {improved == total, std::to_string(improved) + "/" + std::to_string(total) +
                                   " images improve; PSNR margins (dB):" + margins.str()};
}

// 9 ---------------------------------------------------------------------------
struct DetectorResult {
    double auc = 0.0;
    double eer = 1.0;
};

DetectorResult detector_on(const fs::path& corpus, const fs::path& out, double lambda) {
    DatasetRecipe recipe;
    recipe.name = "baseline";
    recipe.source_dir = corpus;
    recipe.lambda = lambda;
    recipe.emit_undistorted = true;
    const DatasetManifest manifest = generate(recipe, {out, {}, 0});

    // 70/30 split by source image, so both renderings stay on one side.
    std::vector<std::string> sources;
    for (const auto& e : manifest.entries) sources.push_back(e.source);
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    std::vector<std::pair<std::uint64_t, std::string>> keyed;
    for (std::size_t i = 0; i < sources.size(); ++i) keyed.emplace_back(CounterRng(99, i).next_u64(), sources[i]);
    std::sort(keyed.begin(), keyed.end());
    std::set<std::string> held;
    for (std::size_t i = 0; i < sources.size() * 3 / 10; ++i) held.insert(keyed[i].second);

    DatasetManifest train, test;
    for (const auto& e : manifest.entries) (held.count(e.source) ? test : train).entries.push_back(e);
    const BaselineModel model = train_baseline(train, out, {});
    std::vector<ScoredImage> images;
    for (const auto& e : test.entries) images.push_back({e.output, out / e.output});
    const auto records = score_images(model, images, 0);
    std::vector<LabeledScore> scores;
    for (std::size_t i = 0; i < records.size(); ++i) {
        scores.push_back({records[i].id, records[i].logits->alpha - records[i].logits->beta, test.entries[i].label});
    }
    return {auc(scores), eer(scores)};
}

Outcome baseline_detector() {
    const auto t0 = Clock::now();
    testing_support::TempDir dir("acceptance_detector");
    write_toy_corpus(dir / "corpus", 100, 31);
    const auto strong = detector_on(dir / "corpus", dir / "dm09", 0.9);
    const auto weak = detector_on(dir / "corpus", dir / "dm03", 0.3);
    const double t = seconds_since(t0);
    const bool pass = strong.auc > 0.9 && strong.eer < 0.15 && weak.auc > 0.6 && t < 60.0;
    return {pass, "dm:0.9 AUC " + fmt("%.4f", strong.auc) + " (> 0.9), EER " + fmt("%.4f", strong.eer) +
                      " (< 0.15); dm:0.3 AUC " + fmt("%.4f", weak.auc) + " (> 0.6); 100 sources, 30% held out; " +
                      fmt("%.1f", t) + " s < 60 s"};
}

// 10 --------------------------------------------------------------------------
Outcome edc_directional() {
    // Toy FRS: reference = face crop of a subject's first capture; probe = a
    // second capture distorted at lambda ~ U[0.1, 0.9] through either crop
    // order. Quality = -lambda, i.e. discard by true distortion strength.
    // The system threshold is fixed once, at FNMR 0.05 on the same probes
    // without distortion, and both pipelines are evaluated at it.
    constexpr int subjects = 400;
    constexpr std::uint64_t seed = 10;
    const CropSpec face = CropSpec::centered(0.5);
    std::vector<ComparisonRecord> clean(subjects), dtc(subjects), ctd(subjects);
    std::map<std::string, double> quality;
    for (int i = 0; i < subjects; ++i) {
        const auto s = static_cast<std::uint64_t>(i) + 1000;
        const double lambda = draw_lambda(seed, static_cast<std::uint64_t>(i), 0.1, 0.9);
        const auto ref = toy_embedding(crop(synthetic_face(s, 0), face).image);
        const ImageBuffer capture = synthetic_face(s, 1);
        const auto pair = pipeline_pair(capture, lambda, face);
        const std::string probe = "probe" + std::to_string(i);
        const std::string refid = "ref" + std::to_string(i);
        clean[i] = {probe, refid, cosine_similarity(toy_embedding(crop(capture, face).image), ref), true};
        dtc[i] = {probe, refid, cosine_similarity(toy_embedding(pair.distort_then_crop), ref), true};
        ctd[i] = {probe, refid, cosine_similarity(toy_embedding(pair.crop_then_distort), ref), true};
        quality[probe] = -lambda;
        quality[refid] = 0.0;
    }
    const auto at = [&](const std::vector<ComparisonRecord>& c, double tau) {
        const auto curve = edc_curve(c, quality, tau);
        return std::pair{value_at_discard(curve, 0.0), value_at_discard(curve, 0.5)};
    };
    const double tau = calibrate_threshold(clean, 0.05).tau;
    const auto [a0, a50] = at(dtc, tau);
    const auto [b0, b50] = at(ctd, tau);
    const double drop_b = b0 - b50;
    const double change_a = std::abs(a0 - a50);
    const bool pass = drop_b >= 0.05 && change_a < std::abs(drop_b);

    // For reference: thresholds recalibrated per pipeline (start FNMR 0.05 each).
    const auto [ra0, ra50] = at(dtc, calibrate_threshold(dtc, 0.05).tau);
    const auto [rb0, rb50] = at(ctd, calibrate_threshold(ctd, 0.05).tau);
    return {pass, "tau " + fmt("%.4f", tau) + " (FNMR 0.05 undistorted); crop-first FNMR " + fmt("%.4f", b0) + " -> " +
                      fmt("%.4f", b50) + " (drop " + fmt("%.4f", drop_b) + " >= 0.05); distort-first " +
                      fmt("%.4f", a0) + " -> " + fmt("%.4f", a50) + " (|change| " + fmt("%.4f", change_a) +
                      " < crop-first); " + std::to_string(subjects) + " mated pairs. Per-pipeline recalibration: " +
                      "crop-first " + fmt("%.4f", rb0) + " -> " + fmt("%.4f", rb50) + ", distort-first " +
                      fmt("%.4f", ra0) + " -> " + fmt("%.4f", ra50)};
}

// 11 --------------------------------------------------------------------------
Outcome determinism() {
    testing_support::TempDir dir("acceptance_determinism");
    write_toy_corpus(dir / "corpus", 20, 11);
    {
        std::ofstream(dir / "recipe.txt") << "name = determinism\nsource_dir = corpus\nmodel = dm\n"
                                             "lambda_min = 0.1\nlambda_max = 0.9\nseed = 42\nemit_undistorted = true\n"
                                             "crop = center:0.7\ncrop_order = crop-first\n";
    }
    const auto run = [&](const std::string& out, int jobs) {
        const std::string cmd = "cd '" + dir.path().string() + "' && '" RADIALKIT_CLI "' gen-dataset recipe.txt --out " +
                                out + " --jobs " + std::to_string(jobs) + " > /dev/null";
        return std::system(cmd.c_str());
    };
    const int r1 = run("run1", 1);
    const int r2 = run("run2", 4);
    if (r1 != 0 || r2 != 0) return {false, "gen-dataset failed"};
    const auto h1 = testing_support::tree_hash(dir / "run1");
    const auto h2 = testing_support::tree_hash(dir / "run2");
    const auto m1 = testing_support::file_hash(dir / "run1/manifest.csv");
    const auto m2 = testing_support::file_hash(dir / "run2/manifest.csv");
    return {h1 == h2 && m1 == m2, "tree " + h1 + (h1 == h2 ? " == " : " != ") + h2 + ", manifests " +
                                      (m1 == m2 ? "identical" : "differ")};
}

// 12 --------------------------------------------------------------------------
Outcome gradient_check() {
    double worst = 0.0;
    for (std::uint64_t p = 0; p < 100; ++p) {
        CounterRng rng(12, p);
        const int n = 3 + static_cast<int>(rng.next_u64() % 20);
        const int d = 1 + static_cast<int>(rng.next_u64() % 8);
        FeatureRows rows;
        std::vector<int> labels;
        for (int i = 0; i < n; ++i) {
            std::vector<double> row(static_cast<std::size_t>(d));
            for (auto& v : row) v = rng.normal();
            rows.push_back(std::move(row));
            labels.push_back(static_cast<int>(rng.next_u64() & 1));
        }
        std::vector<double> w(static_cast<std::size_t>(d + 1));
        for (auto& v : w) v = rng.normal();
        const auto g = logistic_gradient(w, rows, labels);
        double diff = 0.0, norm_g = 0.0, norm_fd = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            auto wp = w, wm = w;
            wp[j] += 1e-5;
            wm[j] -= 1e-5;
            const double fd = (logistic_loss(wp, rows, labels) - logistic_loss(wm, rows, labels)) / 2e-5;
            diff += (fd - g[j]) * (fd - g[j]);
            norm_g += g[j] * g[j];
            norm_fd += fd * fd;
        }
        worst = std::max(worst, std::sqrt(diff) / std::max({std::sqrt(norm_g), std::sqrt(norm_fd), 1e-300}));
    }
    return {worst < 1e-6, "max relative error " + fmt("%.3g", worst) + " < 1e-6 over 100 problems"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"geometry round-trip", geometry_round_trip},
        {"exact identity warps", exact_identities},
        {"worked numeric examples", worked_examples},
        {"native quality measure", nqm_properties},
        {"curve oracles", curve_oracles},
        {"EDC worked example", edc_worked_example},
        {"crop-order displacement", crop_order},
        {"round-trip fidelity", round_trip_fidelity},
        {"baseline detector", baseline_detector},
        {"EDC directional analog", edc_directional},
        {"generation determinism", determinism},
        {"logistic gradient check", gradient_check},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

#pragma once

// Detection error tradeoff (DET) curves for the distortion detector and
// error-versus-discard characteristic (EDC) curves for quality-based
// sample rejection.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radialkit/dataset.hpp"
#include "radialkit/table.hpp"

namespace radialkit {

/// Detector output; higher score = more likely distorted.
struct LabeledScore {
    std::string id;
    double score = 0.0;
    ImageLabel label = ImageLabel::distorted;
};

struct ComparisonRecord {
    std::string probe;
    std::string reference;
    double similarity = 0.0;  // higher = more similar
    bool mated = true;
};

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct CurveSeries {
    std::vector<CurvePoint> points;
    std::string x_label;
    std::string y_label;
    std::optional<double> tau;
    std::size_t positives = 0;  // distorted samples (DET) / mated comparisons (EDC)
    std::size_t negatives = 0;  // undistorted samples (DET)
};

/// Vertices (FPR on undistorted, FNR on distorted) for every distinct
/// threshold, classifying "distorted" when score >= tau, ordered from
/// tau = +inf (0, 1) down to the lowest score (1, 0). Along the series x is
/// non-decreasing and y non-increasing.
CurveSeries det_curve(std::span<const LabeledScore> scores);

/// Where FNR - FPR changes sign along the DET vertices, linearly
/// interpolated between the bracketing vertices.
double eer(std::span<const LabeledScore> scores);
double eer(const CurveSeries& det);

/// Probability that a random distorted sample outscores a random undistorted
/// one (ties count one half).
double auc(std::span<const LabeledScore> scores);

struct Calibration {
    double tau = 0.0;
    double achieved_fnmr = 0.0;
    std::size_t mated = 0;
};

/// FNMR(tau) = fraction of mated similarities strictly below tau.
double fnmr(std::span<const ComparisonRecord> comparisons, double tau);

/// Picks tau among the distinct mated similarities (plus the value just above
/// the largest, where FNMR = 1) minimizing |FNMR(tau) - target|; ties go to
/// the candidate with FNMR >= target, then to the smaller tau.
Calibration calibrate_threshold(std::span<const ComparisonRecord> comparisons, double target_fnmr);

inline constexpr int kDefaultDiscardSteps = 50;  // 2% grid

struct EdcOptions {
    int discard_steps = kDefaultDiscardSteps;
};

/// Mated comparisons are ranked by pairwise quality min(q_probe, q_ref),
/// ties broken by (probe, reference) id. Grid point i of `discard_steps`
/// discards the floor(i * n / steps) lowest-ranked comparisons and emits
/// (discarded / n, FNMR at tau of the rest); repeated discard counts are
/// emitted once, so x is strictly increasing.
CurveSeries edc_curve(std::span<const ComparisonRecord> comparisons, const std::map<std::string, double>& qualities,
                      double tau, const EdcOptions& options = {});

/// y of the last point with x <= discard_fraction.
double value_at_discard(const CurveSeries& edc, double discard_fraction);

std::vector<LabeledScore> read_labeled_scores(const std::filesystem::path& path);
std::vector<ComparisonRecord> read_comparisons(const CsvTable& table);
std::vector<ComparisonRecord> read_comparisons(const std::filesystem::path& path);
CsvTable comparisons_table(std::span<const ComparisonRecord> comparisons);

/// `# axis: <x>,<y>` and `# tau: <value|none>` preamble, then `x,y` rows.
CsvTable curve_table(const CurveSeries& curve);
CurveSeries read_curve(const std::filesystem::path& path);
std::string curve_svg(const CurveSeries& curve, const std::string& title);

}  // namespace radialkit

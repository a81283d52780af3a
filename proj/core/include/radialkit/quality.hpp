#pragma once

// Native quality measure from detector logits, score-file I/O, and a linear
// baseline distortion detector on radial image statistics.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radialkit/dataset.hpp"
#include "radialkit/image.hpp"
#include "radialkit/table.hpp"

namespace radialkit {

/// Raw detector outputs: alpha for class "distorted", beta for "undistorted".
struct Logits {
    double alpha = 0.0;
    double beta = 0.0;
};

/// Softmax confidence of the undistorted class, e^b / (e^a + e^b), computed
/// without overflow for any finite logits.
double nqm(Logits logits);

struct ScoreRecord {
    std::string id;
    std::optional<Logits> logits;
    double nqm = 0.5;
    std::optional<ImageLabel> label;
};

/// Accepts `id,alpha,beta[,nqm][,label]` (nqm recomputed from the logits) or
/// `id,nqm[,label]`. Ids must be unique.
std::vector<ScoreRecord> read_scores(const CsvTable& table);
std::vector<ScoreRecord> read_scores(const std::filesystem::path& path);
CsvTable scores_table(std::span<const ScoreRecord> records);

/// 2K features: per annulus (K equal-width rings in normalized radius) the
/// mean luminance in [0, 1], then per annulus the mean central-difference
/// gradient magnitude. Empty annuli contribute zeros.
std::vector<double> radial_features(const ImageBuffer& img, int annuli);

using FeatureRows = std::vector<std::vector<double>>;

/// Mean logistic loss of labels (1 = distorted) under weights w, where the
/// last weight is the bias: z_i = w[0..d) . x_i + w[d].
double logistic_loss(std::span<const double> weights, const FeatureRows& rows, std::span<const int> labels);
std::vector<double> logistic_gradient(std::span<const double> weights, const FeatureRows& rows,
                                      std::span<const int> labels);

struct TrainOptions {
    int annuli = 8;
    int epochs = 500;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
    int jobs = 1;
};

class BaselineModel {
public:
    int annuli = 8;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<double> weights;  // 2K feature weights followed by the bias
    int epochs = 0;
    double learning_rate = 0.0;
    std::uint64_t seed = 0;
    double final_loss = 0.0;

    std::size_t feature_count() const noexcept { return mean.size(); }

    /// w . standardize(x) + b; positive means "distorted".
    double decision_value(std::span<const double> features) const;
    /// (z/2, -z/2), so that nqm() equals the logistic probability of
    /// "undistorted", 1 / (1 + e^z).
    Logits logits(std::span<const double> features) const;
    Logits logits(const ImageBuffer& img) const;

    std::string serialize() const;
    static BaselineModel deserialize(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static BaselineModel load(const std::filesystem::path& path);
};

/// Full-batch gradient descent on standardized features. `loss_history`
/// receives the loss before each epoch and after the last (epochs + 1 values).
BaselineModel train_logistic(const FeatureRows& features, std::span<const int> labels, const TrainOptions& options,
                             std::vector<double>* loss_history = nullptr);

/// Extracts features from every manifest output (resolved against `root`)
/// and trains on label distorted = 1. Throws InvalidArgument on a
/// single-class manifest and IoError on unreadable images.
BaselineModel train_baseline(const DatasetManifest& manifest, const std::filesystem::path& root,
                             const TrainOptions& options, std::vector<double>* loss_history = nullptr);

struct ScoredImage {
    std::string id;
    std::filesystem::path path;
};

std::vector<ScoreRecord> score_images(const BaselineModel& model, std::span<const ScoredImage> images, int jobs = 1);

}  // namespace radialkit

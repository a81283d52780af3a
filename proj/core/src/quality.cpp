#include "radialkit/quality.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "radialkit/errors.hpp"
#include "radialkit/image_io.hpp"
#include "radialkit/parallel.hpp"
#include "radialkit/random.hpp"
#include "radialkit/text.hpp"
#include "radialkit/warp.hpp"

namespace radialkit {

namespace fs = std::filesystem;

double nqm(Logits logits) {
    const double m = std::max(logits.alpha, logits.beta);
    const double ea = std::exp(logits.alpha - m);
    const double eb = std::exp(logits.beta - m);
    return eb / (ea + eb);
}

// ---------------------------------------------------------------------------
// Score files

std::vector<ScoreRecord> read_scores(const CsvTable& table) {
    const std::size_t id = table.require_column("id");
    const auto alpha = table.column("alpha");
    const auto beta = table.column("beta");
    const auto quality = table.column("nqm");
    const auto label = table.column("label");
    if (alpha.has_value() != beta.has_value()) throw ParseError("score file: alpha and beta go together");
    if (!alpha && !quality) throw ParseError("score file: need alpha,beta or nqm columns");

    std::vector<ScoreRecord> records;
    std::set<std::string, std::less<>> seen;
    for (std::size_t r = 0; r < table.size(); ++r) {
        ScoreRecord rec;
        rec.id = table.rows()[r][id];
        if (!seen.insert(rec.id).second) throw ParseError("score file: duplicate id '" + rec.id + "'");
        if (alpha) {
            rec.logits = Logits{csv_double(table, r, *alpha), csv_double(table, r, *beta)};
            if (!std::isfinite(rec.logits->alpha) || !std::isfinite(rec.logits->beta)) {
                throw ParseError("score file: non-finite logits for '" + rec.id + "'");
            }
            rec.nqm = nqm(*rec.logits);
        } else {
            rec.nqm = csv_double(table, r, *quality);
            if (!(rec.nqm >= 0.0 && rec.nqm <= 1.0)) {
                throw ParseError("score file: nqm outside [0,1] for '" + rec.id + "'");
            }
        }
        if (label) {
            const std::string& text = table.rows()[r][*label];
            if (text == "distorted") {
                rec.label = ImageLabel::distorted;
            } else if (text == "undistorted") {
                rec.label = ImageLabel::undistorted;
            } else if (!text.empty()) {
                throw ParseError("score file: unknown label '" + text + "'");
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<ScoreRecord> read_scores(const fs::path& path) {
    try {
        return read_scores(CsvTable::read(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

CsvTable scores_table(std::span<const ScoreRecord> records) {
    const bool any_logits = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.logits; });
    const bool all_logits = std::all_of(records.begin(), records.end(), [](const auto& r) { return r.logits; });
    const bool labels = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.label; });
    if (any_logits && !all_logits) throw InvalidArgument("scores_table: mixed records with and without logits");

    std::vector<std::string> header{"id"};
    if (all_logits && !records.empty()) {
        header.emplace_back("alpha");
        header.emplace_back("beta");
    }
    header.push_back("nqm");
    if (labels) header.push_back("label");
    CsvTable table(header);
    for (const auto& r : records) {
        std::vector<std::string> row{r.id};
        if (all_logits && !records.empty()) {
            row.push_back(format_double(r.logits->alpha));
            row.push_back(format_double(r.logits->beta));
        }
        row.push_back(format_double(r.nqm));
        if (labels) row.emplace_back(r.label ? std::string(to_string(*r.label)) : std::string());
        table.add_row(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Features

std::vector<double> radial_features(const ImageBuffer& img, int annuli) {
    if (annuli < 2) throw InvalidArgument("radial_features: need at least 2 annuli");
    if (img.empty()) throw InvalidArgument("radial_features: empty image");
    const int w = img.width();
    const int h = img.height();
    std::vector<double> lum(img.pixel_count());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) lum[static_cast<std::size_t>(y) * w + x] = luminance(img, x, y) / 255.0;
    }
    const auto at = [&](int x, int y) { return lum[static_cast<std::size_t>(y) * w + x]; };

    const PixelFrame frame(w, h);
    const std::size_t k = static_cast<std::size_t>(annuli);
    std::vector<double> lum_sum(k, 0.0);
    std::vector<double> grad_sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(y - 1, 0);
        const int y1 = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(x - 1, 0);
            const int x1 = std::min(x + 1, w - 1);
            const double gx = x1 > x0 ? (at(x1, y) - at(x0, y)) / (x1 - x0) : 0.0;
            const double gy = y1 > y0 ? (at(x, y1) - at(x, y0)) / (y1 - y0) : 0.0;
            const double r = radius(frame.to_norm(x, y));
            const std::size_t ring = std::min(k - 1, static_cast<std::size_t>(r * annuli));
            lum_sum[ring] += at(x, y);
            grad_sum[ring] += std::hypot(gx, gy);
            ++count[ring];
        }
    }
    std::vector<double> features(2 * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        if (count[i] == 0) continue;
        features[i] = lum_sum[i] / static_cast<double>(count[i]);
        features[k + i] = grad_sum[i] / static_cast<double>(count[i]);
    }
    return features;
}

// ---------------------------------------------------------------------------
// Logistic regression

namespace {

double dot_with_bias(std::span<const double> weights, std::span<const double> x) {
    double z = weights[x.size()];
    for (std::size_t j = 0; j < x.size(); ++j) z += weights[j] * x[j];
    return z;
}

// log(1 + e^t) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

void check_problem(std::span<const double> weights, const FeatureRows& rows, std::span<const int> labels) {
    if (rows.empty() || rows.size() != labels.size()) throw InvalidArgument("logistic: rows/labels mismatch");
    for (const auto& row : rows) {
        if (row.size() + 1 != weights.size()) throw InvalidArgument("logistic: weight/feature size mismatch");
    }
}

}  // namespace

double logistic_loss(std::span<const double> weights, const FeatureRows& rows, std::span<const int> labels) {
    check_problem(weights, rows, labels);
    double sum = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double z = dot_with_bias(weights, rows[i]);
        sum += labels[i] ? softplus(-z) : softplus(z);
    }
    return sum / static_cast<double>(rows.size());
}

std::vector<double> logistic_gradient(std::span<const double> weights, const FeatureRows& rows,
                                      std::span<const int> labels) {
    check_problem(weights, rows, labels);
    std::vector<double> grad(weights.size(), 0.0);
    const std::size_t d = weights.size() - 1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double residual = sigmoid(dot_with_bias(weights, rows[i])) - labels[i];
        for (std::size_t j = 0; j < d; ++j) grad[j] += residual * rows[i][j];
        grad[d] += residual;
    }
    for (double& g : grad) g /= static_cast<double>(rows.size());
    return grad;
}

BaselineModel train_logistic(const FeatureRows& features, std::span<const int> labels, const TrainOptions& options,
                             std::vector<double>* loss_history) {
    if (features.empty() || features.size() != labels.size()) {
        throw InvalidArgument("train: feature/label count mismatch");
    }
    const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
    if (!has_pos || !has_neg) throw InvalidArgument("train: both labels are required");
    if (options.epochs < 0 || !(options.learning_rate > 0.0)) {
        throw InvalidArgument("train: epochs must be >= 0 and learning rate > 0");
    }

    const std::size_t n = features.size();
    const std::size_t d = features.front().size();
    BaselineModel model;
    model.annuli = options.annuli;
    model.epochs = options.epochs;
    model.learning_rate = options.learning_rate;
    model.seed = options.seed;
    model.mean.assign(d, 0.0);
    model.stddev.assign(d, 0.0);
    for (const auto& row : features) {
        if (row.size() != d) throw InvalidArgument("train: ragged feature rows");
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += row[j];
    }
    for (double& m : model.mean) m /= static_cast<double>(n);
    for (const auto& row : features) {
        for (std::size_t j = 0; j < d; ++j) model.stddev[j] += (row[j] - model.mean[j]) * (row[j] - model.mean[j]);
    }
    for (double& s : model.stddev) {
        s = std::sqrt(s / static_cast<double>(n));
        if (!(s > 1e-12)) s = 1.0;  // constant feature
    }

    FeatureRows standardized(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) standardized[i][j] = (features[i][j] - model.mean[j]) / model.stddev[j];
    }

    CounterRng rng(options.seed, 0x7a1e);
    model.weights.resize(d + 1);
    for (double& w : model.weights) w = rng.uniform(-0.01, 0.01);

    if (loss_history) loss_history->clear();
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        if (loss_history) loss_history->push_back(logistic_loss(model.weights, standardized, labels));
        const auto grad = logistic_gradient(model.weights, standardized, labels);
        for (std::size_t j = 0; j <= d; ++j) model.weights[j] -= options.learning_rate * grad[j];
    }
    model.final_loss = logistic_loss(model.weights, standardized, labels);
    if (loss_history) loss_history->push_back(model.final_loss);
    return model;
}

BaselineModel train_baseline(const DatasetManifest& manifest, const fs::path& root, const TrainOptions& options,
                             std::vector<double>* loss_history) {
    const std::size_t n = manifest.entries.size();
    if (n == 0) throw InvalidArgument("train_baseline: empty manifest");
    FeatureRows features(n);
    std::vector<int> labels(n);
    parallel_for(n, options.jobs, [&](std::size_t i) {
        const auto& entry = manifest.entries[i];
        features[i] = radial_features(read_image(root / entry.output), options.annuli);
        labels[i] = entry.label == ImageLabel::distorted ? 1 : 0;
    });
    return train_logistic(features, labels, options, loss_history);
}

double BaselineModel::decision_value(std::span<const double> features) const {
    if (features.size() != mean.size() || weights.size() != mean.size() + 1) {
        throw InvalidArgument("baseline: feature vector has the wrong length");
    }
    double z = weights.back();
    for (std::size_t j = 0; j < features.size(); ++j) z += weights[j] * (features[j] - mean[j]) / stddev[j];
    return z;
}

Logits BaselineModel::logits(std::span<const double> features) const {
    const double z = decision_value(features);
    return {0.5 * z, -0.5 * z};
}

Logits BaselineModel::logits(const ImageBuffer& img) const { return logits(radial_features(img, annuli)); }

namespace {

constexpr std::string_view kModelMagic = "radialkit-baseline 1";

std::string join_doubles(std::span<const double> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ' ';
        out += format_double(values[i]);
    }
    return out;
}

std::vector<double> parse_doubles(std::string_view text, std::string_view key) {
    std::vector<double> out;
    for (const auto token : split(trim(text), ' ')) {
        if (token.empty()) continue;
        const auto value = parse_double(token);
        if (!value || !std::isfinite(*value)) throw ParseError("model file: bad number in '" + std::string(key) + "'");
        out.push_back(*value);
    }
    return out;
}

}  // namespace

std::string BaselineModel::serialize() const {
    std::ostringstream out;
    out << kModelMagic << '\n';
    out << "annuli " << annuli << '\n';
    out << "epochs " << epochs << '\n';
    out << "learning_rate " << format_double(learning_rate) << '\n';
    out << "seed " << seed << '\n';
    out << "final_loss " << format_double(final_loss) << '\n';
    out << "mean " << join_doubles(mean) << '\n';
    out << "stddev " << join_doubles(stddev) << '\n';
    out << "weights " << join_doubles(weights) << '\n';
    return out.str();
}

BaselineModel BaselineModel::deserialize(std::string_view text) {
    const auto lines = split(text, '\n');
    if (lines.empty() || trim(lines[0]) != kModelMagic) throw ParseError("model file: missing magic line");
    BaselineModel model;
    std::set<std::string, std::less<>> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty()) continue;
        const auto space = line.find(' ');
        const auto key = line.substr(0, space);
        const auto value = space == std::string_view::npos ? std::string_view{} : line.substr(space + 1);
        seen.insert(std::string(key));
        if (key == "annuli" || key == "epochs") {
            const auto v = parse_int(trim(value));
            if (!v) throw ParseError("model file: bad integer for '" + std::string(key) + "'");
            (key == "annuli" ? model.annuli : model.epochs) = static_cast<int>(*v);
        } else if (key == "seed") {
            const auto v = parse_uint(trim(value));
            if (!v) throw ParseError("model file: bad seed");
            model.seed = *v;
        } else if (key == "learning_rate" || key == "final_loss") {
            const auto v = parse_double(trim(value));
            if (!v) throw ParseError("model file: bad number for '" + std::string(key) + "'");
            (key == "learning_rate" ? model.learning_rate : model.final_loss) = *v;
        } else if (key == "mean") {
            model.mean = parse_doubles(value, key);
        } else if (key == "stddev") {
            model.stddev = parse_doubles(value, key);
        } else if (key == "weights") {
            model.weights = parse_doubles(value, key);
        } else {
            throw ParseError("model file: unknown key '" + std::string(key) + "'");
        }
    }
    for (const char* key : {"annuli", "mean", "stddev", "weights"}) {
        if (!seen.count(key)) throw ParseError(std::string("model file: missing '") + key + "'");
    }
    const std::size_t d = 2 * static_cast<std::size_t>(std::max(model.annuli, 0));
    if (model.annuli < 2 || model.mean.size() != d || model.stddev.size() != d || model.weights.size() != d + 1) {
        throw ParseError("model file: array sizes do not match annuli");
    }
    if (std::any_of(model.stddev.begin(), model.stddev.end(), [](double s) { return !(s > 0.0); })) {
        throw ParseError("model file: standard deviations must be positive");
    }
    return model;
}

void BaselineModel::save(const fs::path& path) const {
    const std::string text = serialize();
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

BaselineModel BaselineModel::load(const fs::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return deserialize(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::vector<ScoreRecord> score_images(const BaselineModel& model, std::span<const ScoredImage> images, int jobs) {
    std::vector<ScoreRecord> records(images.size());
    parallel_for(images.size(), jobs, [&](std::size_t i) {
        const Logits logits = model.logits(read_image(images[i].path));
        records[i].id = images[i].id;
        records[i].logits = logits;
        records[i].nqm = nqm(logits);
    });
    return records;
}

}  // namespace radialkit

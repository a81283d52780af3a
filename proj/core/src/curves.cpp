#include "radialkit/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "radialkit/errors.hpp"
#include "radialkit/quality.hpp"
#include "radialkit/text.hpp"

namespace radialkit {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// DET

CurveSeries det_curve(std::span<const LabeledScore> scores) {
    std::vector<const LabeledScore*> sorted;
    sorted.reserve(scores.size());
    std::size_t n_dist = 0;
    for (const auto& s : scores) {
        if (!std::isfinite(s.score)) throw InvalidArgument("det_curve: non-finite score for '" + s.id + "'");
        sorted.push_back(&s);
        if (s.label == ImageLabel::distorted) ++n_dist;
    }
    const std::size_t n_undist = scores.size() - n_dist;
    if (n_dist == 0 || n_undist == 0) throw InvalidArgument("det_curve: both labels are required");
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->score > b->score; });

    CurveSeries curve;
    curve.x_label = "fpr";
    curve.y_label = "fnr";
    curve.positives = n_dist;
    curve.negatives = n_undist;
    curve.points.push_back({0.0, 1.0});
    std::size_t accepted_dist = 0;
    std::size_t accepted_undist = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        const double threshold = sorted[i]->score;
        for (; i < sorted.size() && sorted[i]->score == threshold; ++i) {
            ++(sorted[i]->label == ImageLabel::distorted ? accepted_dist : accepted_undist);
        }
        curve.points.push_back({static_cast<double>(accepted_undist) / static_cast<double>(n_undist),
                                static_cast<double>(n_dist - accepted_dist) / static_cast<double>(n_dist)});
    }
    return curve;
}

double eer(const CurveSeries& det) {
    const auto& pts = det.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d0 = pts[i].y - pts[i].x;
        if (d0 == 0.0) return pts[i].x;
        if (i + 1 == pts.size()) break;
        const double d1 = pts[i + 1].y - pts[i + 1].x;
        if (d0 > 0.0 && d1 < 0.0) {
            const double t = d0 / (d0 - d1);
            return pts[i].x + t * (pts[i + 1].x - pts[i].x);
        }
    }
    throw InvalidArgument("eer: curve does not cross the diagonal");
}

double eer(std::span<const LabeledScore> scores) { return eer(det_curve(scores)); }

double auc(std::span<const LabeledScore> scores) {
    std::vector<double> dist;
    std::vector<double> undist;
    for (const auto& s : scores) (s.label == ImageLabel::distorted ? dist : undist).push_back(s.score);
    if (dist.empty() || undist.empty()) throw InvalidArgument("auc: both labels are required");
    std::sort(undist.begin(), undist.end());
    double wins = 0.0;
    for (const double d : dist) {
        const auto lo = std::lower_bound(undist.begin(), undist.end(), d);
        const auto hi = std::upper_bound(undist.begin(), undist.end(), d);
        wins += static_cast<double>(lo - undist.begin()) + 0.5 * static_cast<double>(hi - lo);
    }
    return wins / (static_cast<double>(dist.size()) * static_cast<double>(undist.size()));
}

// ---------------------------------------------------------------------------
// Threshold calibration and EDC

double fnmr(std::span<const ComparisonRecord> comparisons, double tau) {
    std::size_t mated = 0;
    std::size_t rejected = 0;
    for (const auto& c : comparisons) {
        if (!c.mated) continue;
        ++mated;
        if (c.similarity < tau) ++rejected;
    }
    if (mated == 0) throw InvalidArgument("fnmr: no mated comparisons");
    return static_cast<double>(rejected) / static_cast<double>(mated);
}

Calibration calibrate_threshold(std::span<const ComparisonRecord> comparisons, double target_fnmr) {
    if (!(target_fnmr > 0.0 && target_fnmr < 1.0)) throw InvalidArgument("calibrate_threshold: target must be in (0,1)");
    std::vector<double> sims;
    for (const auto& c : comparisons) {
        if (c.mated) sims.push_back(c.similarity);
    }
    if (sims.empty()) throw InvalidArgument("calibrate_threshold: no mated comparisons");
    std::sort(sims.begin(), sims.end());
    const double n = static_cast<double>(sims.size());

    Calibration best;
    best.mated = sims.size();
    double best_distance = std::numeric_limits<double>::infinity();
    bool best_above = false;
    const auto consider = [&](double tau, std::size_t below) {
        const double rate = static_cast<double>(below) / n;
        const double distance = std::abs(rate - target_fnmr);
        const bool above = rate >= target_fnmr;
        if (distance < best_distance || (distance == best_distance && above && !best_above)) {
            best_distance = distance;
            best_above = above;
            best.tau = tau;
            best.achieved_fnmr = rate;
        }
    };
    for (std::size_t i = 0; i < sims.size(); ++i) {
        if (i > 0 && sims[i] == sims[i - 1]) continue;
        consider(sims[i], i);
    }
    consider(std::nextafter(sims.back(), std::numeric_limits<double>::infinity()), sims.size());
    return best;
}

CurveSeries edc_curve(std::span<const ComparisonRecord> comparisons, const std::map<std::string, double>& qualities,
                      double tau, const EdcOptions& options) {
    if (options.discard_steps < 1) throw InvalidArgument("edc_curve: discard_steps must be positive");
    struct Ranked {
        double quality;
        const ComparisonRecord* record;
    };
    std::vector<Ranked> ranked;
    for (const auto& c : comparisons) {
        if (!c.mated) continue;
        const auto qp = qualities.find(c.probe);
        const auto qr = qualities.find(c.reference);
        if (qp == qualities.end()) throw InvalidArgument("edc_curve: no quality for '" + c.probe + "'");
        if (qr == qualities.end()) throw InvalidArgument("edc_curve: no quality for '" + c.reference + "'");
        ranked.push_back({std::min(qp->second, qr->second), &c});
    }
    if (ranked.empty()) throw InvalidArgument("edc_curve: no mated comparisons");
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.quality != b.quality) return a.quality < b.quality;
        if (a.record->probe != b.record->probe) return a.record->probe < b.record->probe;
        return a.record->reference < b.record->reference;
    });

    // rejected_from[k] = non-matches among ranked[k..n).
    const std::size_t n = ranked.size();
    std::vector<std::size_t> rejected_from(n + 1, 0);
    for (std::size_t k = n; k-- > 0;) {
        rejected_from[k] = rejected_from[k + 1] + (ranked[k].record->similarity < tau ? 1 : 0);
    }

    CurveSeries curve;
    curve.x_label = "discard_fraction";
    curve.y_label = "fnmr";
    curve.tau = tau;
    curve.positives = n;
    const std::size_t steps = static_cast<std::size_t>(options.discard_steps);
    std::optional<std::size_t> previous;
    for (std::size_t i = 0; i < steps; ++i) {
        const std::size_t discarded = i * n / steps;
        if (previous && *previous == discarded) continue;
        previous = discarded;
        const std::size_t retained = n - discarded;
        if (retained == 0) continue;
        curve.points.push_back({static_cast<double>(discarded) / static_cast<double>(n),
                                static_cast<double>(rejected_from[discarded]) / static_cast<double>(retained)});
    }
    return curve;
}

double value_at_discard(const CurveSeries& edc, double discard_fraction) {
    const CurvePoint* found = nullptr;
    for (const auto& p : edc.points) {
        if (p.x <= discard_fraction) found = &p;
    }
    if (!found) throw InvalidArgument("value_at_discard: no point at or below the requested fraction");
    return found->y;
}

// ---------------------------------------------------------------------------
// Files

std::vector<LabeledScore> read_labeled_scores(const fs::path& path) {
    const CsvTable table = CsvTable::read(path);
    std::vector<LabeledScore> out;
    if (const auto score = table.column("score")) {
        const std::size_t id = table.require_column("id");
        const std::size_t label = table.require_column("label");
        for (std::size_t r = 0; r < table.size(); ++r) {
            const std::string& text = table.rows()[r][label];
            if (text != "distorted" && text != "undistorted") {
                throw ParseError(path.string() + ": unknown label '" + text + "'");
            }
            out.push_back({table.rows()[r][id], csv_double(table, r, *score),
                           text == "distorted" ? ImageLabel::distorted : ImageLabel::undistorted});
        }
        return out;
    }
    // Score file: distortion score from the logits when present, else 1 - nqm.
    for (const auto& rec : read_scores(table)) {
        if (!rec.label) throw ParseError(path.string() + ": score file has no label for '" + rec.id + "'");
        const double s = rec.logits ? rec.logits->alpha - rec.logits->beta : 1.0 - rec.nqm;
        out.push_back({rec.id, s, *rec.label});
    }
    return out;
}

std::vector<ComparisonRecord> read_comparisons(const CsvTable& table) {
    const std::size_t probe = table.require_column("probe");
    const std::size_t reference = table.require_column("reference");
    const std::size_t similarity = table.require_column("similarity");
    const std::size_t mated = table.require_column("mated");
    std::vector<ComparisonRecord> out;
    out.reserve(table.size());
    for (std::size_t r = 0; r < table.size(); ++r) {
        const double sim = csv_double(table, r, similarity);
        if (!std::isfinite(sim)) throw ParseError("comparisons: non-finite similarity on row " + std::to_string(r + 1));
        out.push_back({table.rows()[r][probe], table.rows()[r][reference], sim, csv_flag(table, r, mated) == 1});
    }
    return out;
}

std::vector<ComparisonRecord> read_comparisons(const fs::path& path) {
    try {
        return read_comparisons(CsvTable::read(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

CsvTable comparisons_table(std::span<const ComparisonRecord> comparisons) {
    CsvTable table({"probe", "reference", "similarity", "mated"});
    for (const auto& c : comparisons) {
        table.add_row({c.probe, c.reference, format_double(c.similarity), c.mated ? "1" : "0"});
    }
    return table;
}

CsvTable curve_table(const CurveSeries& curve) {
    CsvTable table({"x", "y"});
    table.add_preamble("# axis: " + curve.x_label + "," + curve.y_label);
    table.add_preamble("# tau: " + (curve.tau ? format_double(*curve.tau) : std::string("none")));
    for (const auto& p : curve.points) table.add_row({format_double(p.x), format_double(p.y)});
    return table;
}

CurveSeries read_curve(const fs::path& path) {
    const CsvTable table = CsvTable::read(path);
    CurveSeries curve;
    for (const auto& line : table.preamble()) {
        const std::string_view text = line;
        if (text.substr(0, 7) == "# axis:") {
            const auto labels = split(trim(text.substr(7)), ',');
            if (labels.size() == 2) {
                curve.x_label = labels[0];
                curve.y_label = labels[1];
            }
        } else if (text.substr(0, 6) == "# tau:") {
            curve.tau = parse_double(trim(text.substr(6)));
        }
    }
    const std::size_t x = table.require_column("x");
    const std::size_t y = table.require_column("y");
    for (std::size_t r = 0; r < table.size(); ++r) curve.points.push_back({csv_double(table, r, x), csv_double(table, r, y)});
    return curve;
}

std::string curve_svg(const CurveSeries& curve, const std::string& title) {
    constexpr double size = 400.0;
    constexpr double margin = 50.0;
    const double span = size - 2.0 * margin;
    const auto px = [&](double x) { return margin + x * span; };
    const auto py = [&](double y) { return size - margin - y * span; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << size / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(0)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\"" << py(1)
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double t = i / 4.0;
        svg << "<text x=\"" << px(t) << "\" y=\"" << py(0) + 15 << "\" text-anchor=\"middle\" font-size=\"10\">" << t
            << "</text>\n";
        svg << "<text x=\"" << px(0) - 8 << "\" y=\"" << py(t) + 3 << "\" text-anchor=\"end\" font-size=\"10\">" << t
            << "</text>\n";
    }
    svg << "<text x=\"" << size / 2 << "\" y=\"" << size - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
        << curve.x_label << "</text>\n";
    svg << "<text x=\"14\" y=\"" << size / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
        << size / 2 << ")\">" << curve.y_label << "</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        if (i) svg << ' ';
        svg << px(std::clamp(curve.points[i].x, 0.0, 1.0)) << ',' << py(std::clamp(curve.points[i].y, 0.0, 1.0));
    }
    svg << "\"/>\n</svg>\n";
    return svg.str();
}

}  // namespace radialkit

// radialkit command-line front end. Exit codes: 0 ok, 2 usage/schema,
// 3 I/O, 4 numeric domain.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radialkit/curves.hpp"
#include "radialkit/dataset.hpp"
#include "radialkit/embedding.hpp"
#include "radialkit/errors.hpp"
#include "radialkit/image_io.hpp"
#include "radialkit/parallel.hpp"
#include "radialkit/quality.hpp"
#include "radialkit/random.hpp"
#include "radialkit/synthetic.hpp"
#include "radialkit/text.hpp"
#include "radialkit/warp.hpp"

namespace fs = std::filesystem;
using namespace radialkit;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitDomain = 4;

FillPolicy parse_fill(const std::string& text) {
    if (text == "black") return FillPolicy::constant(0);
    if (text == "clamp") return FillPolicy::edge_clamp();
    const auto v = parse_int(text);
    if (!v || *v < 0 || *v > 255) throw ParseError("--fill: expected black, clamp or 0-255, got '" + text + "'");
    return FillPolicy::constant(static_cast<std::uint8_t>(*v));
}

Interpolation parse_interp(const std::string& text) {
    if (text == "bilinear") return Interpolation::bilinear;
    if (text == "nearest") return Interpolation::nearest;
    throw ParseError("--interp: expected bilinear or nearest, got '" + text + "'");
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw IoError(IoError::Kind::io_failure, "cannot write " + path.string());
}

void write_table(const CsvTable& table, const std::optional<std::string>& out) {
    if (out) {
        table.write(*out);
    } else {
        std::cout << table.to_string();
    }
}

void print_rate(const DistortionModel& model) {
    const double rate = magnification_rate(model);
    std::cout << "# magnification_rate=" << format_significant(rate, 6)
              << " compliant=" << (magnification_compliant(model) ? "yes" : "no") << '\n';
}

// ---------------------------------------------------------------------------

struct WarpArgs {
    std::string model;
    std::string interp = "bilinear";
    std::string fill = "black";
    std::optional<std::string> crop;
    std::string order = "distort-first";
    std::optional<std::string> reference;
    int jobs = 1;
    std::string input;
    std::string output;
};

void add_warp_flags(CLI::App* cmd, WarpArgs& a) {
    cmd->add_option("--model", a.model, "Model descriptor: dm:<l> or kb<p|s|d|e|o>:<l>[:f=<f>]")->required();
    cmd->add_option("--interp", a.interp, "Interpolation: bilinear|nearest")->capture_default_str();
    cmd->add_option("--fill", a.fill, "Out-of-frame fill: black|clamp|<0-255>")->capture_default_str();
    cmd->add_option("--jobs", a.jobs, "Worker threads (default: RADIALKIT_JOBS or all cores)")->capture_default_str();
    cmd->add_option("input", a.input, "Input image (.png/.pgm/.ppm)")->required();
    cmd->add_option("output", a.output, "Output image")->required();
}

int run_warp(const WarpArgs& a, WarpDirection direction) {
    WarpSpec spec;
    spec.model = DistortionModel::parse(a.model);
    spec.direction = direction;
    spec.interpolation = parse_interp(a.interp);
    spec.fill = parse_fill(a.fill);

    ImageBuffer img = read_image(a.input);
    std::optional<CropOrder> order;
    std::optional<CropSpec> crop_spec;
    if (a.crop) {
        crop_spec = CropSpec::parse(*a.crop);
        order = parse_crop_order(a.order);
        if (*order == CropOrder::crop_then_distort) img = crop(img, *crop_spec).image;
    }
    WarpResult result = warp(img, spec, a.jobs);
    if (result.domain_errors == result.image.pixel_count()) {
        throw DomainError("no output pixel maps into the domain of " + spec.model.descriptor());
    }
    ImageBuffer out = std::move(result.image);
    if (order && *order == CropOrder::distort_then_crop) out = crop(out, *crop_spec).image;
    write_image(out, a.output);

    const bool synth = direction == WarpDirection::synthesize_distortion;
    DatasetManifest line;
    line.entries.push_back({a.input, a.output, synth ? ImageLabel::distorted : ImageLabel::undistorted,
                            spec.model.descriptor(), spec.model.lambda(), 0, result.fill_fraction});
    std::cout << line.to_table().to_string();
    if (result.domain_errors > 0) std::cout << "# domain_errors=" << result.domain_errors << '\n';
    print_rate(spec.model);

    if (a.reference) {
        const ImageBuffer ref = read_image(*a.reference);
        const ImageBuffer in = read_image(a.input);
        const Rect region = central_region(ref.width(), ref.height(), 0.6);
        const double before = psnr(in, ref, region);
        const double after = psnr(out, ref, region);
        std::cout << "# psnr_central60 before=" << format_significant(before, 6)
                  << " after=" << format_significant(after, 6)
                  << " improvement=" << format_significant(after - before, 6) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct GenArgs {
    std::string recipe;
    std::string out;
    std::string interp = "bilinear";
    std::string fill = "black";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> crop;
    std::optional<std::string> order;
    int jobs = 1;
};

int run_gen(const GenArgs& a) {
    DatasetRecipe recipe = read_recipe(a.recipe);
    if (a.seed) recipe.seed = *a.seed;
    if (a.crop) {
        recipe.crop = CropSpec::parse(*a.crop);
        if (recipe.crop_order == CropOrder::none) recipe.crop_order = CropOrder::distort_then_crop;
    }
    if (a.order) recipe.crop_order = parse_crop_order(*a.order);
    recipe.validate();

    GenerateOptions options;
    options.output_dir = a.out;
    options.warp.interpolation = parse_interp(a.interp);
    options.warp.fill = parse_fill(a.fill);
    options.jobs = a.jobs;
    const DatasetManifest manifest = generate(recipe, options);
    const auto problems = validate_manifest(manifest, a.out);
    for (const auto& p : problems) std::cerr << "manifest: " << p << '\n';

    std::size_t distorted = 0;
    for (const auto& e : manifest.entries) distorted += e.label == ImageLabel::distorted;
    std::cout << "dataset=" << recipe.name << " images=" << manifest.entries.size() << " distorted=" << distorted
              << " undistorted=" << manifest.entries.size() - distorted << " warnings=" << manifest.warnings.size()
              << '\n';
    std::cout << "manifest=" << (fs::path(a.out) / kManifestFile).generic_string() << '\n';
    return problems.empty() ? 0 : kExitIo;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string manifest;
    std::string out;
    int annuli = 8;
    int epochs = 500;
    double lr = 0.1;
    std::uint64_t seed = 0;
    double holdout = 0.0;
    std::optional<std::string> scores_out;
    int jobs = 1;
};

std::vector<ScoredImage> scored_images(const DatasetManifest& manifest, const fs::path& root) {
    std::vector<ScoredImage> images;
    images.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries) images.push_back({e.output, root / e.output});
    return images;
}

int run_train(const TrainArgs& a) {
    if (a.holdout < 0.0 || a.holdout >= 1.0) throw InvalidArgument("--holdout must be in [0, 1)");
    const DatasetManifest manifest = DatasetManifest::read(a.manifest);
    const fs::path root = fs::path(a.manifest).parent_path();

    // Split by source so that both renderings of an image land on one side.
    DatasetManifest train = manifest;
    DatasetManifest test;
    if (a.holdout > 0.0) {
        std::vector<std::string> groups;
        for (const auto& e : manifest.entries) groups.push_back(e.source);
        std::sort(groups.begin(), groups.end());
        groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
        std::vector<std::pair<std::uint64_t, std::string>> keyed;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            keyed.emplace_back(CounterRng(a.seed, i).next_u64(), groups[i]);
        }
        std::sort(keyed.begin(), keyed.end());
        const auto held = static_cast<std::size_t>(std::lround(a.holdout * static_cast<double>(groups.size())));
        std::set<std::string> held_out;
        for (std::size_t i = 0; i < held; ++i) held_out.insert(keyed[i].second);
        train.entries.clear();
        for (const auto& e : manifest.entries) (held_out.count(e.source) ? test : train).entries.push_back(e);
    }

    TrainOptions options;
    options.annuli = a.annuli;
    options.epochs = a.epochs;
    options.learning_rate = a.lr;
    options.seed = a.seed;
    options.jobs = a.jobs;
    const BaselineModel model = train_baseline(train, root, options);
    model.save(a.out);
    std::cout << "model=" << a.out << " train=" << train.entries.size() << " final_loss="
              << format_significant(model.final_loss, 6) << '\n';

    if (!test.entries.empty()) {
        const auto images = scored_images(test, root);
        auto records = score_images(model, images, a.jobs);
        std::vector<LabeledScore> labeled;
        for (std::size_t i = 0; i < records.size(); ++i) {
            records[i].label = test.entries[i].label;
            labeled.push_back({records[i].id, records[i].logits->alpha - records[i].logits->beta, test.entries[i].label});
        }
        std::cout << "holdout=" << test.entries.size();
        const bool both = std::any_of(labeled.begin(), labeled.end(), [](const auto& s) { return s.label == ImageLabel::distorted; }) &&
                          std::any_of(labeled.begin(), labeled.end(), [](const auto& s) { return s.label == ImageLabel::undistorted; });
        if (both) {
            std::cout << " auc=" << format_significant(auc(labeled), 6) << " eer=" << format_significant(eer(labeled), 6);
        } else {
            std::cout << " (single-class holdout; no auc)";
        }
        std::cout << '\n';
        if (a.scores_out) scores_table(records).write(*a.scores_out);
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
    std::optional<std::string> model_file;
    std::optional<std::string> manifest;
    std::optional<std::string> logits;
    std::optional<std::string> logits_file;
    std::vector<std::string> images;
    std::optional<std::string> out;
    int jobs = 1;
};

Logits parse_logits_stub(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("--logits: expected <alpha>=<beta>, got '" + text + "'");
    const auto alpha = parse_double(std::string_view(text).substr(0, eq));
    const auto beta = parse_double(std::string_view(text).substr(eq + 1));
    if (!alpha || !beta || !std::isfinite(*alpha) || !std::isfinite(*beta)) {
        throw ParseError("--logits: expected finite <alpha>=<beta>, got '" + text + "'");
    }
    return {*alpha, *beta};
}

int run_score(const ScoreArgs& a) {
    if (a.logits_file) {
        // Recompute nqm from externally produced logits.
        write_table(scores_table(read_scores(fs::path(*a.logits_file))), a.out);
        return 0;
    }
    std::vector<ScoredImage> images;
    std::vector<std::optional<ImageLabel>> labels;
    if (a.manifest) {
        const DatasetManifest manifest = DatasetManifest::read(*a.manifest);
        images = scored_images(manifest, fs::path(*a.manifest).parent_path());
        for (const auto& e : manifest.entries) labels.emplace_back(e.label);
    }
    for (const auto& path : a.images) {
        images.push_back({path, path});
        labels.emplace_back();
    }
    if (images.empty()) throw InvalidArgument("score: no images (use --manifest or image paths)");

    std::vector<ScoreRecord> records;
    if (a.logits) {
        const Logits stub = parse_logits_stub(*a.logits);
        for (const auto& img : images) records.push_back({img.id, stub, nqm(stub), std::nullopt});
    } else {
        if (!a.model_file) throw InvalidArgument("score: --model-file or --logits is required");
        const BaselineModel model = BaselineModel::load(*a.model_file);
        records = score_images(model, images, a.jobs);
    }
    for (std::size_t i = 0; i < records.size(); ++i) records[i].label = labels[i];
    write_table(scores_table(records), a.out);
    return 0;
}

// ---------------------------------------------------------------------------

struct CurveArgs {
    std::string input;
    std::optional<std::string> qualities;
    std::optional<double> tau;
    double start_fnmr = 0.05;
    int steps = kDefaultDiscardSteps;
    std::optional<std::string> out;
    std::optional<std::string> svg;
};

int run_det(const CurveArgs& a) {
    const auto scores = read_labeled_scores(a.input);
    const CurveSeries curve = det_curve(scores);
    write_table(curve_table(curve), a.out);
    if (a.svg) write_text(*a.svg, curve_svg(curve, "DET"));
    std::cerr << "eer=" << format_significant(eer(curve), 6) << " auc=" << format_significant(auc(scores), 6)
              << " distorted=" << curve.positives << " undistorted=" << curve.negatives << '\n';
    return 0;
}

int run_edc(const CurveArgs& a) {
    const auto comparisons = read_comparisons(fs::path(a.input));
    std::map<std::string, double> qualities;
    for (const auto& r : read_scores(fs::path(*a.qualities))) qualities[r.id] = r.nqm;

    double tau = 0.0;
    double start = 0.0;
    if (a.tau) {
        tau = *a.tau;
        start = fnmr(comparisons, tau);
    } else {
        const Calibration cal = calibrate_threshold(comparisons, a.start_fnmr);
        tau = cal.tau;
        start = cal.achieved_fnmr;
    }
    EdcOptions options;
    options.discard_steps = a.steps;
    const CurveSeries curve = edc_curve(comparisons, qualities, tau, options);
    write_table(curve_table(curve), a.out);
    if (a.svg) write_text(*a.svg, curve_svg(curve, "EDC"));
    std::cerr << "tau=" << format_double(tau) << " start_fnmr=" << format_significant(start, 6)
              << " mated=" << curve.positives << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    std::optional<std::string> pairs;
    std::optional<std::string> manifest;
    std::optional<std::string> boxes;
    std::optional<std::string> crop;
    std::optional<std::string> out;
    int jobs = 1;
};

struct PairRow {
    std::string probe;
    std::string reference;
    fs::path probe_path;
    fs::path reference_path;
    bool mated = true;
};

int run_compare(const CompareArgs& a) {
    std::vector<PairRow> pairs;
    if (a.pairs) {
        const fs::path base = fs::path(*a.pairs).parent_path();
        const CsvTable table = CsvTable::read(*a.pairs);
        const std::size_t probe = table.require_column("probe");
        const std::size_t reference = table.require_column("reference");
        const auto mated = table.column("mated");
        for (std::size_t r = 0; r < table.size(); ++r) {
            const auto& row = table.rows()[r];
            pairs.push_back({row[probe], row[reference], base / row[probe], base / row[reference],
                             mated ? csv_flag(table, r, *mated) == 1 : true});
        }
    } else {
        // Each distorted output against the image it was rendered from.
        const DatasetManifest manifest = DatasetManifest::read(*a.manifest);
        const fs::path root = fs::path(*a.manifest).parent_path();
        for (const auto& e : manifest.entries) {
            if (e.label != ImageLabel::distorted) continue;
            pairs.push_back({e.output, e.source, root / e.output, e.source, true});
        }
    }

    std::map<std::string, CropSpec> boxes;
    if (a.boxes) {
        const CsvTable table = CsvTable::read(*a.boxes);
        const std::size_t path = table.require_column("path");
        const std::size_t cx = table.require_column("cx");
        const std::size_t cy = table.require_column("cy");
        const std::size_t w = table.require_column("w");
        const std::size_t h = table.require_column("h");
        for (std::size_t r = 0; r < table.size(); ++r) {
            boxes[table.rows()[r][path]] =
                CropSpec::box(csv_double(table, r, cx), csv_double(table, r, cy),
                              static_cast<int>(std::lround(csv_double(table, r, w))),
                              static_cast<int>(std::lround(csv_double(table, r, h))));
        }
    }
    const std::optional<CropSpec> crop_all = a.crop ? std::optional(CropSpec::parse(*a.crop)) : std::nullopt;

    // Embed each distinct image once.
    std::map<std::string, fs::path> unique;
    for (const auto& p : pairs) {
        unique.emplace(p.probe, p.probe_path);
        unique.emplace(p.reference, p.reference_path);
    }
    std::vector<std::pair<std::string, fs::path>> items(unique.begin(), unique.end());
    std::vector<ToyEmbedding> embeddings(items.size());
    parallel_for(items.size(), a.jobs, [&](std::size_t i) {
        ImageBuffer img = read_image(items[i].second);
        if (const auto box = boxes.find(items[i].first); box != boxes.end()) {
            img = crop(img, box->second).image;
        } else if (crop_all) {
            img = crop(img, *crop_all).image;
        }
        embeddings[i] = toy_embedding(img);
    });
    std::map<std::string, const ToyEmbedding*> by_id;
    for (std::size_t i = 0; i < items.size(); ++i) by_id[items[i].first] = &embeddings[i];

    CsvTable table({"probe", "reference", "similarity", "mated", "flagged"});
    std::size_t flagged = 0;
    for (const auto& p : pairs) {
        const ToyEmbedding& e1 = *by_id.at(p.probe);
        const ToyEmbedding& e2 = *by_id.at(p.reference);
        const bool degenerate = e1.degenerate || e2.degenerate;
        flagged += degenerate;
        table.add_row({p.probe, p.reference, format_double(cosine_similarity(e1, e2)), p.mated ? "1" : "0",
                       degenerate ? "1" : "0"});
    }
    write_table(table, a.out);
    if (flagged) std::cerr << "compare: " << flagged << " pair(s) involve a zero-variance image\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct PsnrArgs {
    std::string a;
    std::string b;
    double central = 1.0;
};

int run_psnr(const PsnrArgs& a) {
    const ImageBuffer x = read_image(a.a);
    const ImageBuffer y = read_image(a.b);
    if (a.central <= 0.0 || a.central > 1.0) throw InvalidArgument("--central must be in (0, 1]");
    std::cout << format_significant(psnr(x, y, central_region(x.width(), x.height(), a.central)), 8) << '\n';
    return 0;
}

struct CorpusArgs {
    std::string out;
    int count = 10;
    std::uint64_t seed = 0;
    int size = 128;
    int channels = 1;
};

int run_corpus(const CorpusArgs& a) {
    if (a.count < 1) throw InvalidArgument("--count must be positive");
    SyntheticFaceOptions options;
    options.size = a.size;
    options.channels = a.channels;
    const auto paths = write_toy_corpus(a.out, a.count, a.seed, options);
    std::cout << "wrote " << paths.size() << " images to " << a.out << '\n';
    return 0;
}

int run_validate(const std::string& path) {
    const DatasetManifest manifest = DatasetManifest::read(path);
    const auto problems = validate_manifest(manifest, fs::path(path).parent_path());
    for (const auto& p : problems) std::cerr << p << '\n';
    std::cout << (problems.empty() ? "valid" : "invalid") << " rows=" << manifest.entries.size() << '\n';
    return problems.empty() ? 0 : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radialkit: radial lens distortion synthesis, rectification and quality evaluation"};
    app.require_subcommand(1);
    app.footer(
        "Common flags: --model <desc>, --interp bilinear|nearest, --fill black|clamp|<0-255>, --seed <u64>,\n"
        "--crop cx,cy,w,h|center:<frac>, --order distort-first|crop-first, --start-fnmr <f>, --tau <f>,\n"
        "--svg <path>, --jobs <n> (default from RADIALKIT_JOBS).\n"
        "Exit codes: 0 success, 2 usage/schema, 3 I/O, 4 numeric domain.");
    const int jobs_default = default_jobs();

    WarpArgs distort_args;
    distort_args.jobs = jobs_default;
    auto* distort = app.add_subcommand("distort", "Synthesize radial distortion on an image");
    add_warp_flags(distort, distort_args);
    distort->add_option("--crop", distort_args.crop, "Crop: cx,cy,w,h or center:<frac>");
    distort->add_option("--order", distort_args.order, "Crop order: distort-first|crop-first")->capture_default_str();

    WarpArgs rectify_args;
    rectify_args.jobs = jobs_default;
    auto* rectify = app.add_subcommand("rectify", "Remove radial distortion from an image");
    add_warp_flags(rectify, rectify_args);
    rectify->add_option("--reference", rectify_args.reference,
                        "Undistorted original; reports central-60% PSNR before and after");

    GenArgs gen_args;
    gen_args.jobs = jobs_default;
    auto* gen = app.add_subcommand("gen-dataset", "Generate a distorted dataset from a recipe file");
    gen->add_option("recipe", gen_args.recipe, "Recipe file (key = value lines)")->required();
    gen->add_option("--out", gen_args.out, "Output directory")->required();
    gen->add_option("--interp", gen_args.interp, "Interpolation: bilinear|nearest")->capture_default_str();
    gen->add_option("--fill", gen_args.fill, "Out-of-frame fill: black|clamp|<0-255>")->capture_default_str();
    gen->add_option("--seed", gen_args.seed, "Override the recipe seed");
    gen->add_option("--crop", gen_args.crop, "Override the recipe crop: cx,cy,w,h or center:<frac>");
    gen->add_option("--order", gen_args.order, "Override the crop order: distort-first|crop-first");
    gen->add_option("--jobs", gen_args.jobs, "Worker threads")->capture_default_str();

    TrainArgs train_args;
    train_args.jobs = jobs_default;
    auto* train = app.add_subcommand("train-baseline", "Train the logistic-regression distortion detector");
    train->add_option("--manifest", train_args.manifest, "Dataset manifest.csv")->required();
    train->add_option("--out", train_args.out, "Model file to write")->required();
    train->add_option("--annuli", train_args.annuli, "Radial annuli K (features = 2K)")->capture_default_str();
    train->add_option("--epochs", train_args.epochs, "Gradient-descent epochs")->capture_default_str();
    train->add_option("--lr", train_args.lr, "Learning rate")->capture_default_str();
    train->add_option("--seed", train_args.seed, "Initialization and split seed")->capture_default_str();
    train->add_option("--holdout", train_args.holdout, "Fraction of source images held out for evaluation")
        ->capture_default_str();
    train->add_option("--scores-out", train_args.scores_out, "Write held-out scores CSV");
    train->add_option("--jobs", train_args.jobs, "Worker threads")->capture_default_str();

    ScoreArgs score_args;
    score_args.jobs = jobs_default;
    auto* score = app.add_subcommand("score", "Score images: logits and native quality measure");
    score->add_option("--model-file", score_args.model_file, "Baseline model file");
    score->add_option("--manifest", score_args.manifest, "Score every manifest output (labels copied)");
    score->add_option("--logits", score_args.logits, "Constant logits stub <alpha>=<beta> instead of a model");
    score->add_option("--logits-file", score_args.logits_file, "CSV id,alpha,beta from an external detector");
    score->add_option("--out", score_args.out, "Output CSV (default: stdout)");
    score->add_option("--jobs", score_args.jobs, "Worker threads")->capture_default_str();
    score->add_option("images", score_args.images, "Image paths");

    CurveArgs det_args;
    auto* det = app.add_subcommand("det", "DET curve from labeled detector scores");
    det->add_option("scores", det_args.input, "CSV id,score,label or a score file with labels")->required();
    det->add_option("--out", det_args.out, "Curve CSV (default: stdout)");
    det->add_option("--svg", det_args.svg, "Also render an SVG plot");

    CurveArgs edc_args;
    auto* edc = app.add_subcommand("edc", "EDC curve from comparisons and per-image qualities");
    edc->add_option("comparisons", edc_args.input, "CSV probe,reference,similarity,mated")->required();
    edc->add_option("--qualities", edc_args.qualities, "Score file with id and nqm")->required();
    auto* tau_opt = edc->add_option("--tau", edc_args.tau, "Fixed decision threshold");
    edc->add_option("--start-fnmr", edc_args.start_fnmr, "Calibrate tau to this starting FNMR")
        ->capture_default_str()
        ->excludes(tau_opt);
    edc->add_option("--steps", edc_args.steps, "Discard grid steps")->capture_default_str();
    edc->add_option("--out", edc_args.out, "Curve CSV (default: stdout)");
    edc->add_option("--svg", edc_args.svg, "Also render an SVG plot");

    CompareArgs compare_args;
    compare_args.jobs = jobs_default;
    auto* compare = app.add_subcommand("compare", "Toy face comparator: cosine similarity of block-mean embeddings");
    auto* pairs_opt = compare->add_option("--pairs", compare_args.pairs, "CSV probe,reference[,mated] of image paths");
    compare->add_option("--manifest", compare_args.manifest, "Pair each distorted output with its source")
        ->excludes(pairs_opt);
    auto* boxes_opt = compare->add_option("--boxes", compare_args.boxes, "Face boxes CSV path,cx,cy,w,h");
    compare->add_option("--crop", compare_args.crop, "Crop every image: cx,cy,w,h or center:<frac>")
        ->excludes(boxes_opt);
    compare->add_option("--out", compare_args.out, "Comparisons CSV (default: stdout)");
    compare->add_option("--jobs", compare_args.jobs, "Worker threads")->capture_default_str();

    PsnrArgs psnr_args;
    auto* psnr_cmd = app.add_subcommand("psnr", "PSNR between two images");
    psnr_cmd->add_option("a", psnr_args.a)->required();
    psnr_cmd->add_option("b", psnr_args.b)->required();
    psnr_cmd->add_option("--central", psnr_args.central, "Central fraction of each side to compare")
        ->capture_default_str();

    CorpusArgs corpus_args;
    auto* corpus = app.add_subcommand("toy-corpus", "Write synthetic face-like test images");
    corpus->add_option("--out", corpus_args.out, "Output directory")->required();
    corpus->add_option("--count", corpus_args.count, "Number of images")->capture_default_str();
    corpus->add_option("--seed", corpus_args.seed, "Corpus seed")->capture_default_str();
    corpus->add_option("--size", corpus_args.size, "Image side in pixels")->capture_default_str();
    corpus->add_option("--channels", corpus_args.channels, "1 (gray) or 3 (RGB)")->capture_default_str();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate-manifest", "Check a manifest against the files on disk");
    validate->add_option("manifest", validate_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*distort) return run_warp(distort_args, WarpDirection::synthesize_distortion);
        if (*rectify) return run_warp(rectify_args, WarpDirection::rectify);
        if (*gen) return run_gen(gen_args);
        if (*train) return run_train(train_args);
        if (*score) {
            if (score_args.manifest || !score_args.images.empty()) {
                if (score_args.logits_file) throw InvalidArgument("score: --logits-file takes no images");
            } else if (!score_args.logits_file) {
                throw InvalidArgument("score: no images (use --manifest, image paths or --logits-file)");
            }
            return run_score(score_args);
        }
        if (*det) return run_det(det_args);
        if (*edc) return run_edc(edc_args);
        if (*compare) {
            if (!compare_args.pairs && !compare_args.manifest) throw InvalidArgument("compare: --pairs or --manifest is required");
            return run_compare(compare_args);
        }
        if (*psnr_cmd) return run_psnr(psnr_args);
        if (*corpus) return run_corpus(corpus_args);
        if (*validate) return run_validate(validate_path);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}

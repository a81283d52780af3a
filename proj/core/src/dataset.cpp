#include "radialkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "radialkit/errors.hpp"
#include "radialkit/image_io.hpp"
#include "radialkit/parallel.hpp"
#include "radialkit/random.hpp"
#include "radialkit/text.hpp"

namespace radialkit {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Cropping

CropSpec CropSpec::box(double cx, double cy, int width, int height) {
    CropSpec spec;
    spec.center_x = cx;
    spec.center_y = cy;
    spec.width = width;
    spec.height = height;
    return spec;
}

CropSpec CropSpec::centered(double fraction) {
    CropSpec spec;
    spec.center_fraction = fraction;
    return spec;
}

CropSpec CropSpec::parse(std::string_view text) {
    text = trim(text);
    if (text.substr(0, 7) == "center:") {
        const auto fraction = parse_double(trim(text.substr(7)));
        if (!fraction || !(*fraction > 0.0 && *fraction <= 1.0)) {
            throw ParseError("invalid crop '" + std::string(text) + "': fraction must be in (0, 1]");
        }
        return centered(*fraction);
    }
    const auto fields = split(text, ',');
    if (fields.size() != 4) throw ParseError("invalid crop '" + std::string(text) + "': expected cx,cy,w,h");
    const auto cx = parse_double(trim(fields[0]));
    const auto cy = parse_double(trim(fields[1]));
    const auto w = parse_int(trim(fields[2]));
    const auto h = parse_int(trim(fields[3]));
    if (!cx || !cy || !w || !h) throw ParseError("invalid crop '" + std::string(text) + "': bad number");
    if (*w <= 0 || *h <= 0) throw ParseError("invalid crop '" + std::string(text) + "': size must be positive");
    return box(*cx, *cy, static_cast<int>(*w), static_cast<int>(*h));
}

std::string CropSpec::to_string() const {
    if (center_fraction) return "center:" + format_double(*center_fraction);
    return format_double(center_x.value_or(0.0)) + "," + format_double(center_y.value_or(0.0)) + "," +
           std::to_string(width) + "," + std::to_string(height);
}

Rect resolve_crop(const CropSpec& spec, int width, int height, bool* clamped) {
    long left = 0;
    long top = 0;
    long w = 0;
    long h = 0;
    if (spec.center_fraction) {
        if (!(*spec.center_fraction > 0.0)) throw InvalidArgument("crop fraction must be positive");
        w = std::lround(width * *spec.center_fraction);
        h = std::lround(height * *spec.center_fraction);
        left = (width - w) / 2;
        top = (height - h) / 2;
    } else {
        w = spec.width;
        h = spec.height;
        const double cx = spec.center_x.value_or((width - 1) / 2.0 + 0.5);
        const double cy = spec.center_y.value_or((height - 1) / 2.0 + 0.5);
        left = std::lround(cx - w / 2.0);
        top = std::lround(cy - h / 2.0);
    }
    if (w <= 0 || h <= 0) throw InvalidArgument("degenerate crop: zero area");

    const long x0 = std::max(left, 0L);
    const long y0 = std::max(top, 0L);
    const long x1 = std::min(left + w, static_cast<long>(width));
    const long y1 = std::min(top + h, static_cast<long>(height));
    if (x1 <= x0 || y1 <= y0) throw InvalidArgument("degenerate crop: no overlap with the image");
    if (clamped) *clamped = x0 != left || y0 != top || x1 != left + w || y1 != top + h;
    return {static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1 - x0), static_cast<int>(y1 - y0)};
}

ImageBuffer crop(const ImageBuffer& img, const Rect& rect) {
    if (rect.width < 1 || rect.height < 1 || !contains(img.frame(), rect)) {
        throw InvalidArgument("crop rectangle outside the image");
    }
    ImageBuffer out(rect.width, rect.height, img.channels());
    const std::size_t row_bytes = static_cast<std::size_t>(rect.width) * img.channels();
    for (int y = 0; y < rect.height; ++y) {
        const auto src = img.row(rect.y + y).subspan(static_cast<std::size_t>(rect.x) * img.channels(), row_bytes);
        std::copy(src.begin(), src.end(), out.row(y).begin());
    }
    return out;
}

CropResult crop(const ImageBuffer& img, const CropSpec& spec) {
    CropResult result;
    result.rect = resolve_crop(spec, img.width(), img.height(), &result.clamped);
    result.image = crop(img, result.rect);
    return result;
}

CropOrder parse_crop_order(std::string_view text) {
    text = trim(text);
    if (text == "none") return CropOrder::none;
    if (text == "distort_then_crop" || text == "distort-first") return CropOrder::distort_then_crop;
    if (text == "crop_then_distort" || text == "crop-first") return CropOrder::crop_then_distort;
    throw ParseError("unknown crop order '" + std::string(text) + "'");
}

std::string_view to_string(CropOrder order) {
    switch (order) {
        case CropOrder::none: return "none";
        case CropOrder::distort_then_crop: return "distort_then_crop";
        case CropOrder::crop_then_distort: return "crop_then_distort";
    }
    return "none";
}

namespace {

WarpSpec synthesis_spec(const DistortionModel& model, const WarpSettings& settings) {
    WarpSpec spec;
    spec.model = model;
    spec.direction = WarpDirection::synthesize_distortion;
    spec.interpolation = settings.interpolation;
    spec.fill = settings.fill;
    return spec;
}

double filled_fraction_in(const DisplacementField& field, const Rect& rect) {
    std::size_t filled = 0;
    for (int y = rect.y; y < rect.y + rect.height; ++y) {
        for (int x = rect.x; x < rect.x + rect.width; ++x) {
            if (field.status(x, y) != SampleStatus::inside) ++filled;
        }
    }
    return static_cast<double>(filled) / (static_cast<double>(rect.width) * rect.height);
}

}  // namespace

PipelinePair pipeline_pair(const ImageBuffer& img, double lambda, const CropSpec& crop_spec,
                           const WarpSettings& settings) {
    const WarpSpec spec = synthesis_spec(DistortionModel::division(lambda), settings);
    PipelinePair pair;
    pair.stats.crop = resolve_crop(crop_spec, img.width(), img.height(), &pair.stats.clamped);
    const Rect& rect = pair.stats.crop;

    pair.distort_then_crop = crop(warp(img, spec).image, rect);
    pair.crop_then_distort = warp(crop(img, rect), spec).image;

    pair.stats.distort_then_crop_displacement =
        displacement_field(spec, img.width(), img.height()).mean_magnitude(rect);
    pair.stats.crop_then_distort_displacement = displacement_field(spec, rect.width, rect.height).mean_magnitude();
    return pair;
}

// ---------------------------------------------------------------------------
// Recipes

DistortionModel ModelFamilySpec::with_lambda(double lambda) const {
    if (family == ModelFamily::division) return DistortionModel::division(lambda);
    return DistortionModel::kannala_brandt(variant, lambda, focal);
}

namespace {

struct ParsedModelField {
    ModelFamilySpec family;
    std::optional<double> lambda;
};

ParsedModelField parse_model_field(std::string_view text) {
    const auto fields = split(text, ':');
    const std::string_view tag = fields[0];
    ParsedModelField out;
    if (tag == "dm") {
        out.family.family = ModelFamily::division;
    } else if (tag.size() == 3 && tag.substr(0, 2) == "kb") {
        out.family.family = ModelFamily::kannala_brandt;
        switch (tag[2]) {
            case 'p': out.family.variant = KbVariant::perspective; break;
            case 's': out.family.variant = KbVariant::stereographic; break;
            case 'd': out.family.variant = KbVariant::equidistance; break;
            case 'e': out.family.variant = KbVariant::equisolid; break;
            case 'o': out.family.variant = KbVariant::orthogonal; break;
            default: throw ParseError("unknown model tag '" + std::string(tag) + "'");
        }
    } else {
        throw ParseError("unknown model tag '" + std::string(tag) + "'");
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto field = trim(fields[i]);
        if (field.substr(0, 2) == "f=" && out.family.family == ModelFamily::kannala_brandt) {
            const auto focal = parse_double(field.substr(2));
            if (!focal) throw ParseError("bad focal length in model '" + std::string(text) + "'");
            out.family.focal = *focal;
        } else if (i == 1) {
            const auto lambda = parse_double(field);
            if (!lambda) throw ParseError("bad coefficient in model '" + std::string(text) + "'");
            out.lambda = *lambda;
        } else {
            throw ParseError("unexpected field '" + std::string(field) + "' in model '" + std::string(text) + "'");
        }
    }
    if (out.lambda) {
        // Full descriptor: let the canonical parser enforce the grammar.
        const DistortionModel model = DistortionModel::parse(text);
        (void)model;
    }
    return out;
}

bool parse_bool(std::string_view text, std::string_view key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ParseError("recipe key '" + std::string(key) + "': expected true/false");
}

double require_double(std::string_view text, std::string_view key) {
    const auto value = parse_double(text);
    if (!value) throw ParseError("recipe key '" + std::string(key) + "': not a number: '" + std::string(text) + "'");
    return *value;
}

}  // namespace

void DatasetRecipe::validate() const {
    if (lambda && lambda_range) throw InvalidArgument("recipe: give either a fixed lambda or a lambda range, not both");
    if (!lambda && !lambda_range) throw InvalidArgument("recipe: missing distortion coefficient");
    if (lambda) {
        (void)family.with_lambda(*lambda);
    } else {
        const auto& range = *lambda_range;
        if (!(range.min <= range.max)) throw InvalidArgument("recipe: lambda_min must not exceed lambda_max");
        (void)family.with_lambda(range.min);
        (void)family.with_lambda(range.max);
        if (!seed) throw InvalidArgument("recipe: a seed is required when lambda is drawn from a range");
    }
    if (crop && crop_order == CropOrder::none) throw InvalidArgument("recipe: crop given without a crop_order");
    if (!crop && crop_order != CropOrder::none) throw InvalidArgument("recipe: crop_order given without a crop");
}

DatasetRecipe parse_recipe(std::string_view text, const fs::path& base_dir) {
    DatasetRecipe recipe;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    std::optional<CropOrder> order;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    for (const auto raw : split(text, '\n')) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("recipe line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!seen.insert(std::string(key)).second) {
            throw ParseError("recipe line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        if (key == "name") {
            recipe.name = value;
        } else if (key == "source_dir") {
            fs::path dir{std::string(value)};
            recipe.source_dir = dir.is_relative() && !base_dir.empty() ? base_dir / dir : dir;
        } else if (key == "model") {
            const auto parsed = parse_model_field(value);
            recipe.family = parsed.family;
            recipe.lambda = parsed.lambda;
        } else if (key == "lambda_min") {
            lambda_min = require_double(value, key);
        } else if (key == "lambda_max") {
            lambda_max = require_double(value, key);
        } else if (key == "seed") {
            const auto seed = parse_uint(value);
            if (!seed) throw ParseError("recipe key 'seed': expected an unsigned 64-bit integer");
            recipe.seed = *seed;
        } else if (key == "emit_undistorted") {
            recipe.emit_undistorted = parse_bool(value, key);
        } else if (key == "crop") {
            if (value != "none") recipe.crop = CropSpec::parse(value);
        } else if (key == "crop_order") {
            order = parse_crop_order(value);
        } else {
            throw ParseError("recipe line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
    }
    if (!seen.count("model")) throw ParseError("recipe: missing key 'model'");
    if (!seen.count("source_dir")) throw ParseError("recipe: missing key 'source_dir'");
    if (lambda_min || lambda_max) {
        if (!lambda_min || !lambda_max) throw ParseError("recipe: lambda_min and lambda_max go together");
        recipe.lambda_range = LambdaRange{*lambda_min, *lambda_max};
    }
    if (order) {
        recipe.crop_order = *order;
    } else if (recipe.crop) {
        recipe.crop_order = CropOrder::distort_then_crop;
    }
    if (recipe.name.empty()) recipe.name = "dataset";
    try {
        recipe.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    return recipe;
}

DatasetRecipe read_recipe(const fs::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return parse_recipe(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                            path.parent_path());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Manifests

std::string_view to_string(ImageLabel label) {
    return label == ImageLabel::distorted ? "distorted" : "undistorted";
}

CsvTable DatasetManifest::to_table() const {
    CsvTable table({"source", "output", "label", "model", "lambda", "seed", "fill_fraction"});
    for (const auto& e : entries) {
        table.add_row({e.source, e.output, std::string(to_string(e.label)), e.model, format_significant(e.lambda, 6),
                       std::to_string(e.seed), format_significant(e.fill_fraction, 6)});
    }
    return table;
}

DatasetManifest DatasetManifest::from_table(const CsvTable& table) {
    const std::size_t source = table.require_column("source");
    const std::size_t output = table.require_column("output");
    const std::size_t label = table.require_column("label");
    const std::size_t model = table.require_column("model");
    const std::size_t lambda = table.require_column("lambda");
    const std::size_t seed = table.require_column("seed");
    const std::size_t fill = table.require_column("fill_fraction");
    DatasetManifest manifest;
    for (std::size_t r = 0; r < table.size(); ++r) {
        const auto& row = table.rows()[r];
        ManifestEntry e;
        e.source = row[source];
        e.output = row[output];
        if (row[label] == "distorted") {
            e.label = ImageLabel::distorted;
        } else if (row[label] == "undistorted") {
            e.label = ImageLabel::undistorted;
        } else {
            throw ParseError("manifest row " + std::to_string(r + 1) + ": unknown label '" + row[label] + "'");
        }
        e.model = row[model];
        e.lambda = csv_double(table, r, lambda);
        const auto s = parse_uint(trim(row[seed]));
        if (!s) throw ParseError("manifest row " + std::to_string(r + 1) + ": bad seed");
        e.seed = *s;
        e.fill_fraction = csv_double(table, r, fill);
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

DatasetManifest DatasetManifest::read(const fs::path& path) {
    try {
        return from_table(CsvTable::read(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void DatasetManifest::write(const fs::path& path) const { to_table().write(path); }

double draw_lambda(std::uint64_t seed, std::uint64_t index, double lo, double hi) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw InvalidArgument("draw_lambda: invalid range [" + format_double(lo) + ", " + format_double(hi) + "]");
    }
    if (lo == hi) return lo;
    CounterRng rng(seed, index);
    return std::min(hi, rng.uniform(lo, hi));
}

std::vector<fs::path> list_source_images(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw IoError(IoError::Kind::io_failure, "source directory not found: " + dir.string());
    }
    std::vector<fs::path> relative;
    for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (it->is_regular_file() && is_image_path(it->path())) {
            relative.push_back(fs::relative(it->path(), dir));
        }
    }
    if (ec) throw IoError(IoError::Kind::io_failure, "cannot list " + dir.string() + ": " + ec.message());
    std::sort(relative.begin(), relative.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
    return relative;
}

namespace {

// a.png stays a.png; any other format gets ".png" appended so names never collide.
fs::path png_name(const fs::path& relative) {
    std::string ext = relative.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return relative;
    fs::path out = relative;
    out += ".png";
    return out;
}

struct ImageOutcome {
    std::vector<ManifestEntry> entries;
    std::vector<ManifestWarning> warnings;
};

ImageOutcome generate_one(const DatasetRecipe& recipe, const GenerateOptions& options, const fs::path& relative,
                          std::uint64_t index) {
    ImageOutcome outcome;
    const fs::path source_path = recipe.source_dir / relative;
    const std::string source = source_path.generic_string();
    const std::uint64_t base_seed = recipe.seed.value_or(0);
    const std::uint64_t image_seed = derive_seed(base_seed, index);

    ImageBuffer img;
    std::vector<std::uint8_t> source_bytes;
    try {
        source_bytes = read_file_bytes(source_path);
        img = read_image(source_path);
    } catch (const IoError& e) {
        outcome.warnings.push_back({source, std::string("skipped: ") + e.what()});
        return outcome;
    }

    const double lambda = recipe.lambda_range
                              ? draw_lambda(base_seed, index, recipe.lambda_range->min, recipe.lambda_range->max)
                              : *recipe.lambda;
    const DistortionModel model = recipe.family.with_lambda(lambda);
    const WarpSpec spec = synthesis_spec(model, options.warp);

    Rect rect = img.frame();
    if (recipe.crop) {
        bool clamped = false;
        try {
            rect = resolve_crop(*recipe.crop, img.width(), img.height(), &clamped);
        } catch (const InvalidArgument& e) {
            outcome.warnings.push_back({source, std::string("skipped: ") + e.what()});
            return outcome;
        }
        if (clamped) outcome.warnings.push_back({source, "crop clamped to frame"});
    }

    ImageBuffer distorted;
    double fill_fraction = 0.0;
    switch (recipe.crop_order) {
        case CropOrder::none: {
            auto result = warp(img, spec);
            distorted = std::move(result.image);
            fill_fraction = result.fill_fraction;
            break;
        }
        case CropOrder::distort_then_crop: {
            distorted = crop(warp(img, spec).image, rect);
            fill_fraction = filled_fraction_in(displacement_field(spec, img.width(), img.height()), rect);
            break;
        }
        case CropOrder::crop_then_distort: {
            auto result = warp(crop(img, rect), spec);
            distorted = std::move(result.image);
            fill_fraction = result.fill_fraction;
            break;
        }
    }

    const fs::path distorted_rel = fs::path("distorted") / png_name(relative);
    fs::create_directories((options.output_dir / distorted_rel).parent_path());
    write_image(distorted, options.output_dir / distorted_rel);
    outcome.entries.push_back({source, distorted_rel.generic_string(),
                               model.is_identity() ? ImageLabel::undistorted : ImageLabel::distorted,
                               model.descriptor(), lambda, image_seed, fill_fraction});

    if (recipe.emit_undistorted) {
        fs::path undistorted_rel;
        if (recipe.crop) {
            undistorted_rel = fs::path("undistorted") / png_name(relative);
            fs::create_directories((options.output_dir / undistorted_rel).parent_path());
            write_image(crop(img, rect), options.output_dir / undistorted_rel);
        } else {
            undistorted_rel = fs::path("undistorted") / relative;
            fs::create_directories((options.output_dir / undistorted_rel).parent_path());
            write_file_bytes(options.output_dir / undistorted_rel, source_bytes);
        }
        outcome.entries.push_back(
            {source, undistorted_rel.generic_string(), ImageLabel::undistorted, "none", 0.0, image_seed, 0.0});
    }
    return outcome;
}

}  // namespace

DatasetManifest generate(const DatasetRecipe& recipe, const GenerateOptions& options) {
    recipe.validate();
    if (options.output_dir.empty()) throw InvalidArgument("generate: output directory required");
    const auto sources = list_source_images(recipe.source_dir);
    if (sources.empty()) throw InvalidArgument("generate: no images in " + recipe.source_dir.string());

    fs::create_directories(options.output_dir);
    std::vector<ImageOutcome> outcomes(sources.size());
    parallel_for(sources.size(), options.jobs, [&](std::size_t i) {
        outcomes[i] = generate_one(recipe, options, sources[i], static_cast<std::uint64_t>(i));
    });

    DatasetManifest manifest;
    for (auto& outcome : outcomes) {
        for (auto& e : outcome.entries) manifest.entries.push_back(std::move(e));
        for (auto& w : outcome.warnings) manifest.warnings.push_back(std::move(w));
    }
    manifest.write(options.output_dir / kManifestFile);
    const fs::path warnings_path = options.output_dir / kWarningsFile;
    if (!manifest.warnings.empty()) {
        CsvTable warnings({"source", "message"});
        for (const auto& w : manifest.warnings) warnings.add_row({w.source, w.message});
        warnings.write(warnings_path);
    } else {
        std::error_code ec;
        fs::remove(warnings_path, ec);
    }
    return manifest;
}

std::vector<std::string> validate_manifest(const DatasetManifest& manifest, const fs::path& root) {
    std::vector<std::string> problems;
    std::set<std::string> outputs;
    for (const auto& e : manifest.entries) {
        if (!outputs.insert(e.output).second) problems.push_back("duplicate output " + e.output);
        if (!fs::is_regular_file(root / e.output)) problems.push_back("missing output " + e.output);
        bool identity = e.model == "none";
        if (!identity) {
            try {
                identity = DistortionModel::parse(e.model).is_identity();
            } catch (const ParseError&) {
                problems.push_back("bad model descriptor for " + e.output);
                continue;
            }
        }
        if ((e.label == ImageLabel::undistorted) != identity) {
            problems.push_back("label/model mismatch for " + e.output);
        }
    }
    return problems;
}

}  // namespace radialkit

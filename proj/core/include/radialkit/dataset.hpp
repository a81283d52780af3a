#pragma once

// Deterministic synthetic-corpus generation with provenance manifests, plus
// the crop-order pipelines (distort-then-crop vs crop-then-distort).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radialkit/geometry.hpp"
#include "radialkit/image.hpp"
#include "radialkit/table.hpp"
#include "radialkit/warp.hpp"

namespace radialkit {

// ---------------------------------------------------------------------------
// Cropping

/// Either an explicit box (center + size in pixels) or a centered crop
/// covering a fraction of each side.
struct CropSpec {
    std::optional<double> center_x;  // nullopt: image center
    std::optional<double> center_y;
    int width = 0;
    int height = 0;
    std::optional<double> center_fraction;

    static CropSpec box(double cx, double cy, int width, int height);
    static CropSpec centered(double fraction);
    /// `cx,cy,w,h` or `center:<fraction>`.
    static CropSpec parse(std::string_view text);
    std::string to_string() const;
};

struct CropResult {
    ImageBuffer image;
    Rect rect;
    bool clamped = false;
};

/// Resolves the crop rectangle, clamping it to the frame. Throws
/// InvalidArgument when nothing of the crop remains.
Rect resolve_crop(const CropSpec& spec, int width, int height, bool* clamped = nullptr);
ImageBuffer crop(const ImageBuffer& img, const Rect& rect);
CropResult crop(const ImageBuffer& img, const CropSpec& spec);

enum class CropOrder { none, distort_then_crop, crop_then_distort };

/// Accepts distort_then_crop|crop_then_distort|none and the CLI spellings
/// distort-first|crop-first.
CropOrder parse_crop_order(std::string_view text);
std::string_view to_string(CropOrder order);

struct WarpSettings {
    Interpolation interpolation = Interpolation::bilinear;
    FillPolicy fill;
};

struct PipelineStats {
    Rect crop;
    bool clamped = false;
    /// Mean source displacement (pixels) over the final crop for each order,
    /// each measured in its own normalization frame.
    double distort_then_crop_displacement = 0.0;
    double crop_then_distort_displacement = 0.0;
};

struct PipelinePair {
    ImageBuffer distort_then_crop;
    ImageBuffer crop_then_distort;
    PipelineStats stats;
};

/// Runs both crop orders with the division model at `lambda`.
PipelinePair pipeline_pair(const ImageBuffer& img, double lambda, const CropSpec& crop_spec,
                           const WarpSettings& settings = {});

// ---------------------------------------------------------------------------
// Recipes and manifests

/// Model family without a coefficient, e.g. `dm`, `kbs`, `kbe:f=2`.
struct ModelFamilySpec {
    ModelFamily family = ModelFamily::division;
    KbVariant variant = KbVariant::equidistance;
    double focal = 1.0;

    DistortionModel with_lambda(double lambda) const;
};

struct LambdaRange {
    double min = 0.0;
    double max = 0.0;
};

struct DatasetRecipe {
    std::string name;
    std::filesystem::path source_dir;
    ModelFamilySpec family;
    std::optional<double> lambda;       // fixed coefficient
    std::optional<LambdaRange> lambda_range;  // uniform draw per image
    std::optional<std::uint64_t> seed;
    bool emit_undistorted = false;
    std::optional<CropSpec> crop;
    CropOrder crop_order = CropOrder::none;

    /// Throws InvalidArgument describing the first violated constraint.
    void validate() const;
};

/// Flat `key = value` text; '#' starts a comment. A relative source_dir is
/// resolved against `base_dir`.
DatasetRecipe parse_recipe(std::string_view text, const std::filesystem::path& base_dir = {});
DatasetRecipe read_recipe(const std::filesystem::path& path);

enum class ImageLabel { distorted, undistorted };
std::string_view to_string(ImageLabel label);

struct ManifestEntry {
    std::string source;
    std::string output;  // relative to the manifest's directory
    ImageLabel label = ImageLabel::distorted;
    std::string model;   // descriptor, "none" for undistorted rows
    double lambda = 0.0;
    std::uint64_t seed = 0;
    double fill_fraction = 0.0;
};

struct ManifestWarning {
    std::string source;
    std::string message;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::vector<ManifestWarning> warnings;

    /// Header `source,output,label,model,lambda,seed,fill_fraction`; lambda
    /// and fill_fraction with 6 significant digits.
    CsvTable to_table() const;
    static DatasetManifest from_table(const CsvTable& table);

    static DatasetManifest read(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;
};

inline constexpr std::string_view kManifestFile = "manifest.csv";
inline constexpr std::string_view kWarningsFile = "warnings.csv";

/// Uniform draw on [lo, hi] from the counter stream keyed by (seed, index).
double draw_lambda(std::uint64_t seed, std::uint64_t index, double lo, double hi);

/// Image files under `dir` (recursive), sorted by relative generic path.
std::vector<std::filesystem::path> list_source_images(const std::filesystem::path& dir);

struct GenerateOptions {
    std::filesystem::path output_dir;
    WarpSettings warp;
    int jobs = 1;
};

/// Writes distorted/ (and undistorted/) images plus manifest.csv into
/// options.output_dir; warnings.csv is written when images were skipped or
/// crops clamped. Output bytes depend only on (recipe, sorted sources).
DatasetManifest generate(const DatasetRecipe& recipe, const GenerateOptions& options);

/// Checks that every row's output exists and that no output is listed twice.
/// Returns a list of problems (empty when valid).
std::vector<std::string> validate_manifest(const DatasetManifest& manifest, const std::filesystem::path& root);

}  // namespace radialkit

#pragma once

// Point-level radial distortion transforms in normalized image coordinates.
//
// Coordinates are centered on the principal point. "undistort" maps a point of
// the distorted image (x_d, y_d) to its location in the undistorted image
// (x_u, y_u); "distort" is the exact inverse. Every map is radial, so each one
// is also exposed as a scale factor k(r) with p_out = k(r) * p_in.

#include <optional>
#include <string>
#include <string_view>

namespace radialkit {

struct NormPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const NormPoint&, const NormPoint&) = default;
};

enum class ModelFamily { division, kannala_brandt };

enum class KbVariant { perspective, stereographic, equidistance, equisolid, orthogonal };

double radius(NormPoint p);

// Division model, first coefficient only.
double dm_delta(double r_d, double lambda);
NormPoint dm_undistort(NormPoint p_d, double lambda);
/// Throws DomainError when 4*lambda*r_u^2 > 1.
NormPoint dm_distort(NormPoint p_u, double lambda);

/// Incidence angle for a distorted radius. Throws DomainError outside the
/// arcsin domain of the equisolid and orthogonal variants.
double kb_theta(KbVariant variant, double r_d, double focal);

/// Largest undistorted angle the variant maps back to a finite radius.
/// The perspective bound is exclusive, the others inclusive.
double kb_max_theta(KbVariant variant) noexcept;

class DistortionModel {
public:
    /// Identity model (division, lambda = 0).
    DistortionModel() = default;

    /// Requires 0 <= lambda < 1.
    static DistortionModel division(double lambda);
    /// Requires lambda > 0 and focal > 0.
    static DistortionModel kannala_brandt(KbVariant variant, double lambda, double focal = 1.0);

    /// Parses `dm:<lambda>` or `kb<p|s|d|e|o>:<lambda>[:f=<focal>]`.
    static DistortionModel parse(std::string_view descriptor);

    ModelFamily family() const noexcept { return family_; }
    std::optional<KbVariant> kb_variant() const noexcept;
    double lambda() const noexcept { return lambda_; }
    double focal() const noexcept { return focal_; }

    /// Canonical descriptor; parse(descriptor()) reproduces the model exactly.
    std::string descriptor() const;

    /// True when the model is an exact identity map (dm:0, or KB
    /// equidistance with lambda == focal).
    bool is_identity() const noexcept;

    /// r_u / r_d at the given distorted radius; the analytic limit at 0.
    double undistort_scale(double r_d) const;
    /// r_d / r_u at the given undistorted radius; the analytic limit at 0.
    double distort_scale(double r_u) const;

    /// Non-throwing forms; nullopt where the throwing form raises DomainError.
    std::optional<double> try_undistort_scale(double r_d) const noexcept;
    std::optional<double> try_distort_scale(double r_u) const noexcept;

    NormPoint undistort(NormPoint p_d) const;
    NormPoint distort(NormPoint p_u) const;

    friend bool operator==(const DistortionModel&, const DistortionModel&) = default;

private:
    DistortionModel(ModelFamily family, KbVariant variant, double lambda, double focal)
        : family_(family), variant_(variant), lambda_(lambda), focal_(focal) {}

    ModelFamily family_ = ModelFamily::division;
    KbVariant variant_ = KbVariant::equidistance;  // meaningful for KB only
    double lambda_ = 0.0;
    double focal_ = 1.0;
};

NormPoint kb_undistort(NormPoint p_d, const DistortionModel& model);
NormPoint kb_distort(NormPoint p_u, const DistortionModel& model);

char kb_variant_tag(KbVariant variant);
std::string_view kb_variant_name(KbVariant variant);

}  // namespace radialkit

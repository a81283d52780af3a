#include "radialkit/geometry.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "radialkit/errors.hpp"
#include "radialkit/text.hpp"

namespace radialkit {

namespace {

constexpr double kPi = std::numbers::pi;

NormPoint scaled(NormPoint p, double k) { return {k * p.x, k * p.y}; }

}  // namespace

double radius(NormPoint p) { return std::hypot(p.x, p.y); }

double dm_delta(double r_d, double lambda) { return 1.0 + lambda * r_d * r_d; }

NormPoint dm_undistort(NormPoint p_d, double lambda) {
    const double delta = dm_delta(radius(p_d), lambda);
    return {p_d.x / delta, p_d.y / delta};
}

namespace {

// Smaller root of lambda*r_u*r_d^2 - r_d + r_u = 0, divided by r_u. Written as
// 2 / (1 + sqrt(D)) to avoid cancellation; equals 1 at lambda = 0.
double dm_distort_scale(double r_u, double lambda) {
    const double disc = 1.0 - 4.0 * lambda * r_u * r_u;
    if (disc < 0.0) {
        throw DomainError("dm_distort: radius " + format_double(r_u) +
                          " is not reachable for lambda " + format_double(lambda));
    }
    return 2.0 / (1.0 + std::sqrt(disc));
}

}  // namespace

NormPoint dm_distort(NormPoint p_u, double lambda) {
    return scaled(p_u, dm_distort_scale(radius(p_u), lambda));
}

double kb_theta(KbVariant variant, double r_d, double focal) {
    if (!(r_d >= 0.0)) throw DomainError("kb_theta: negative radius");
    switch (variant) {
        case KbVariant::perspective:
            return std::atan(r_d / focal);
        case KbVariant::stereographic:
            return 2.0 * std::atan(r_d / (2.0 * focal));
        case KbVariant::equidistance:
            return r_d / focal;
        case KbVariant::equisolid: {
            const double arg = r_d / (2.0 * focal);
            if (arg > 1.0) throw DomainError("kb_theta: equisolid radius beyond 2f");
            return 2.0 * std::asin(arg);
        }
        case KbVariant::orthogonal: {
            const double arg = r_d / focal;
            if (arg > 1.0) throw DomainError("kb_theta: orthogonal radius beyond f");
            return std::asin(arg);
        }
    }
    throw DomainError("kb_theta: unknown variant");
}

double kb_max_theta(KbVariant variant) noexcept {
    switch (variant) {
        case KbVariant::perspective:
        case KbVariant::orthogonal:
            return kPi / 2.0;
        case KbVariant::stereographic:
        case KbVariant::equisolid:
            return kPi;
        case KbVariant::equidistance:
            return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

namespace {

bool kb_theta_invertible(KbVariant variant, double theta) noexcept {
    const double max_theta = kb_max_theta(variant);
    const bool exclusive = variant == KbVariant::perspective || variant == KbVariant::stereographic;
    return theta >= 0.0 && (exclusive ? theta < max_theta : theta <= max_theta);
}

double kb_radius_from_theta(KbVariant variant, double theta, double focal) noexcept {
    switch (variant) {
        case KbVariant::perspective:
            return focal * std::tan(theta);
        case KbVariant::stereographic:
            return 2.0 * focal * std::tan(theta / 2.0);
        case KbVariant::equidistance:
            return focal * theta;
        case KbVariant::equisolid:
            return 2.0 * focal * std::sin(theta / 2.0);
        case KbVariant::orthogonal:
            return focal * std::sin(theta);
    }
    return 0.0;
}

}  // namespace

std::optional<KbVariant> DistortionModel::kb_variant() const noexcept {
    if (family_ == ModelFamily::kannala_brandt) return variant_;
    return std::nullopt;
}

DistortionModel DistortionModel::division(double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0)) {
        throw InvalidArgument("division model requires 0 <= lambda < 1, got " + format_double(lambda));
    }
    return {ModelFamily::division, KbVariant::equidistance, lambda, 1.0};
}

DistortionModel DistortionModel::kannala_brandt(KbVariant variant, double lambda, double focal) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("Kannala-Brandt model requires lambda > 0, got " + format_double(lambda));
    }
    if (!(focal > 0.0) || !std::isfinite(focal)) {
        throw InvalidArgument("Kannala-Brandt model requires focal > 0, got " + format_double(focal));
    }
    return {ModelFamily::kannala_brandt, variant, lambda, focal};
}

char kb_variant_tag(KbVariant variant) {
    switch (variant) {
        case KbVariant::perspective: return 'p';
        case KbVariant::stereographic: return 's';
        case KbVariant::equidistance: return 'd';
        case KbVariant::equisolid: return 'e';
        case KbVariant::orthogonal: return 'o';
    }
    return '?';
}

std::string_view kb_variant_name(KbVariant variant) {
    switch (variant) {
        case KbVariant::perspective: return "perspective";
        case KbVariant::stereographic: return "stereographic";
        case KbVariant::equidistance: return "equidistance";
        case KbVariant::equisolid: return "equisolid";
        case KbVariant::orthogonal: return "orthogonal";
    }
    return "unknown";
}

namespace {

std::optional<KbVariant> variant_from_tag(char tag) {
    switch (tag) {
        case 'p': return KbVariant::perspective;
        case 's': return KbVariant::stereographic;
        case 'd': return KbVariant::equidistance;
        case 'e': return KbVariant::equisolid;
        case 'o': return KbVariant::orthogonal;
        default: return std::nullopt;
    }
}

double parse_number(std::string_view text, std::string_view descriptor) {
    const auto value = parse_double(text);
    if (!value) throw ParseError("bad number '" + std::string(text) + "' in model descriptor '" +
                                 std::string(descriptor) + "'");
    return *value;
}

}  // namespace

DistortionModel DistortionModel::parse(std::string_view descriptor) {
    const auto fields = split(descriptor, ':');
    const auto fail = [&](std::string_view why) {
        return ParseError("invalid model descriptor '" + std::string(descriptor) + "': " + std::string(why));
    };
    if (fields.size() < 2) throw fail("expected <tag>:<lambda>");
    const std::string_view tag = fields[0];
    const double lambda = parse_number(fields[1], descriptor);

    try {
        if (tag == "dm") {
            if (fields.size() != 2) throw fail("dm takes no extra fields");
            return division(lambda);
        }
        if (tag.size() == 3 && tag.substr(0, 2) == "kb") {
            const auto variant = variant_from_tag(tag[2]);
            if (!variant) throw fail("unknown Kannala-Brandt variant");
            double focal = 1.0;
            if (fields.size() == 3) {
                if (fields[2].substr(0, 2) != "f=") throw fail("expected f=<focal>");
                focal = parse_number(fields[2].substr(2), descriptor);
            } else if (fields.size() > 3) {
                throw fail("too many fields");
            }
            return kannala_brandt(*variant, lambda, focal);
        }
    } catch (const InvalidArgument& e) {
        throw fail(e.what());
    }
    throw fail("unknown model tag");
}

std::string DistortionModel::descriptor() const {
    if (family_ == ModelFamily::division) return "dm:" + format_double(lambda_);
    std::string out = "kb";
    out += kb_variant_tag(variant_);
    out += ":" + format_double(lambda_);
    if (focal_ != 1.0) out += ":f=" + format_double(focal_);
    return out;
}

bool DistortionModel::is_identity() const noexcept {
    if (family_ == ModelFamily::division) return lambda_ == 0.0;
    return variant_ == KbVariant::equidistance && lambda_ == 1.0 && focal_ == 1.0;
}

std::optional<double> DistortionModel::try_undistort_scale(double r_d) const noexcept {
    if (!(r_d >= 0.0)) return std::nullopt;
    if (family_ == ModelFamily::division) return 1.0 / dm_delta(r_d, lambda_);
    if (r_d == 0.0) return lambda_ / focal_;
    const double arg = variant_ == KbVariant::equisolid ? r_d / (2.0 * focal_) : r_d / focal_;
    if ((variant_ == KbVariant::equisolid || variant_ == KbVariant::orthogonal) && arg > 1.0) {
        return std::nullopt;
    }
    return lambda_ * kb_theta(variant_, r_d, focal_) / r_d;
}

std::optional<double> DistortionModel::try_distort_scale(double r_u) const noexcept {
    if (!(r_u >= 0.0)) return std::nullopt;
    if (family_ == ModelFamily::division) {
        const double disc = 1.0 - 4.0 * lambda_ * r_u * r_u;
        if (disc < 0.0) return std::nullopt;
        return dm_distort_scale(r_u, lambda_);
    }
    if (r_u == 0.0) return focal_ / lambda_;
    const double theta = r_u / lambda_;
    if (!kb_theta_invertible(variant_, theta)) return std::nullopt;
    return kb_radius_from_theta(variant_, theta, focal_) / r_u;
}

double DistortionModel::undistort_scale(double r_d) const {
    if (family_ == ModelFamily::kannala_brandt) {
        if (r_d == 0.0) return lambda_ / focal_;
        return lambda_ * kb_theta(variant_, r_d, focal_) / r_d;
    }
    if (!(r_d >= 0.0)) throw DomainError("undistort_scale: negative radius");
    return 1.0 / dm_delta(r_d, lambda_);
}

double DistortionModel::distort_scale(double r_u) const {
    if (!(r_u >= 0.0)) throw DomainError("distort_scale: negative radius");
    if (family_ == ModelFamily::division) return dm_distort_scale(r_u, lambda_);
    if (r_u == 0.0) return focal_ / lambda_;
    const double theta = r_u / lambda_;
    if (!kb_theta_invertible(variant_, theta)) {
        throw DomainError("kb_distort: angle " + format_double(theta) + " outside the invertible range of " +
                          std::string(kb_variant_name(variant_)));
    }
    return kb_radius_from_theta(variant_, theta, focal_) / r_u;
}

NormPoint DistortionModel::undistort(NormPoint p_d) const {
    if (family_ == ModelFamily::division) return dm_undistort(p_d, lambda_);
    return kb_undistort(p_d, *this);
}

NormPoint DistortionModel::distort(NormPoint p_u) const {
    if (family_ == ModelFamily::division) return dm_distort(p_u, lambda_);
    return kb_distort(p_u, *this);
}

NormPoint kb_undistort(NormPoint p_d, const DistortionModel& model) {
    if (model.family() != ModelFamily::kannala_brandt) throw InvalidArgument("kb_undistort: not a KB model");
    const double r_d = radius(p_d);
    if (r_d == 0.0) return {0.0, 0.0};
    return scaled(p_d, model.undistort_scale(r_d));
}

NormPoint kb_distort(NormPoint p_u, const DistortionModel& model) {
    if (model.family() != ModelFamily::kannala_brandt) throw InvalidArgument("kb_distort: not a KB model");
    const double r_u = radius(p_u);
    if (r_u == 0.0) return {0.0, 0.0};
    return scaled(p_u, model.distort_scale(r_u));
}

}  // namespace radialkit

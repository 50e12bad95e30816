#include "flexspec/fedosov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "flexspec/error.hpp"

namespace flexspec {
namespace {

using std::numbers::pi;

double relative_variation(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    double scale = std::abs(values.front());
    if (scale == 0.0) {
        for (double v : values) scale = std::max(scale, std::abs(v));
    }
    return scale == 0.0 ? 0.0 : (*hi - *lo) / scale;
}

}  // namespace

double corner_term(double phi) {
    if (phi == pi) return 0.0;
    return (phi * phi - pi * pi) / (3.0 * phi);
}

FedosovCoefficients coefficients_unchecked(const SimplicialSurface& surface, BoundaryCondition bc) {
    const double d = surface.dimension();
    FedosovCoefficients c;
    c.bc = bc;
    c.dimension = surface.dimension();
    c.a_d = oriented_volume(surface) / (std::pow(2.0, d) * std::pow(pi, d / 2.0) * std::tgamma(d / 2.0 + 1.0));
    const double sign = bc == BoundaryCondition::dirichlet ? -1.0 : 1.0;
    c.a_dm1 = sign * surface_area(surface) /
              (std::pow(2.0, d + 1.0) * std::pow(pi, (d - 1.0) / 2.0) * std::tgamma((d + 1.0) / 2.0));
    double sum = 0.0;
    for (const DihedralData& r : dihedral_angles(surface)) sum += corner_term(r.angle) * r.measure;
    c.a_dm2 = sum / (std::pow(2.0, d + 1.0) * std::pow(pi, d / 2.0) * std::tgamma(d / 2.0));
    return c;
}

FedosovCoefficients coefficients(const SimplicialSurface& surface, BoundaryCondition bc) {
    if (!is_embedded(surface)) throw Error(ErrorKind::invalid_domain, "surface is not embedded");
    return coefficients_unchecked(surface, bc);
}

double weyl_counting_prediction(const SimplicialSurface& surface, BoundaryCondition bc, double k) {
    const double d = surface.dimension();
    const double x = k / (2.0 * std::sqrt(pi));
    const double sign = bc == BoundaryCondition::dirichlet ? -1.0 : 1.0;
    return oriented_volume(surface) / std::tgamma((d + 2.0) / 2.0) * std::pow(x, d) +
           sign * surface_area(surface) / (4.0 * std::tgamma((d + 1.0) / 2.0)) * std::pow(x, d - 1.0);
}

double riesz_mean_prediction(const FedosovCoefficients& c, int p, double k) {
    const int d = c.dimension;
    if (p < 0 || p > std::max(d - 1, 2)) throw Error(ErrorKind::invalid_argument, "Riesz order out of range");
    const double a[3] = {c.a_dm2, c.a_dm1, c.a_d};
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        const int l = d - 2 + i;
        sum += a[i] * std::exp(std::lgamma(l + 1.0) - std::lgamma(p + l + 1.0)) * std::pow(k, p + l);
    }
    return sum;
}

double riesz_mean_empirical(const Spectrum& spectrum, int p, double k) {
    if (p < 0) throw Error(ErrorKind::invalid_argument, "Riesz order must be non-negative");
    const auto& ev = spectrum.eigenvalues;
    if (!std::is_sorted(ev.begin(), ev.end())) throw Error(ErrorKind::invalid_argument, "spectrum is not sorted");
    double sum = 0.0;
    for (double lambda : ev) {
        const double nu = std::sqrt(std::max(lambda, 0.0));
        if (nu > k) break;
        sum += std::pow(k - nu, p);
    }
    return sum / std::tgamma(p + 1.0);
}

CoefficientTrack track_coefficients(const FlexFamily& family, BoundaryCondition bc, int samples) {
    CoefficientTrack track;
    FlexContext ctx(family);
    std::vector<double> series[3];
    for (double s : sample_parameters(samples)) {
        const SimplicialSurface surf = family.surface(ctx.state(s).vertices);
        CoefficientSample row;
        row.s = s;
        row.embedded = is_embedded(surf);
        row.c = coefficients_unchecked(surf, bc);
        row.min_angle = std::numeric_limits<double>::infinity();
        row.max_angle = -row.min_angle;
        for (const DihedralData& r : dihedral_angles(surf)) {
            row.min_angle = std::min(row.min_angle, r.angle);
            row.max_angle = std::max(row.max_angle, r.angle);
        }
        if (row.embedded) {
            series[0].push_back(row.c.a_d);
            series[1].push_back(row.c.a_dm1);
            series[2].push_back(row.c.a_dm2);
        }
        track.rows.push_back(row);
    }
    for (int i = 0; i < 3; ++i) track.variation[static_cast<std::size_t>(i)] = relative_variation(series[i]);
    return track;
}

}  // namespace flexspec

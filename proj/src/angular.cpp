#include "nbv/angular.hpp"

#include <algorithm>
#include <numbers>

#include "nbv/error.hpp"

namespace nbv {

BinLayout BinLayout::make(int n_polar, int n_azimuth, bool equal_area, bool hemisphere) {
    if (n_polar < 1 || n_azimuth < 1) {
        throw Error(ErrorCode::InvalidLayout, "bin layout needs at least one polar row and one azimuth column");
    }
    constexpr double pi = std::numbers::pi;
    BinLayout layout;
    layout.equal_area_ = equal_area;
    layout.hemisphere_ = hemisphere;
    layout.thresholds_.n_polar = n_polar;
    layout.thresholds_.n_azimuth = n_azimuth;

    // cos(theta) at each row boundary, from the pole (1) down to -1 (or 0).
    const double cos_end = hemisphere ? 0.0 : -1.0;
    const double theta_end = hemisphere ? 0.5 * pi : pi;
    std::vector<double> cos_b(static_cast<std::size_t>(n_polar) + 1);
    layout.row_boundaries_.resize(cos_b.size());
    for (int r = 0; r <= n_polar; ++r) {
        double c;
        double theta;
        if (r == 0) {
            c = 1.0;
            theta = 0.0;
        } else if (r == n_polar) {
            c = cos_end;
            theta = theta_end;
        } else if (equal_area) {
            c = 1.0 - (1.0 - cos_end) * r / n_polar;
            theta = std::acos(c);
        } else {
            theta = theta_end * r / n_polar;
            c = std::cos(theta);
        }
        cos_b[r] = c;
        layout.row_boundaries_[r] = theta;
    }
    layout.thresholds_.row_cos.assign(cos_b.begin() + 1, cos_b.end() - 1);

    for (int j = 1; j < n_azimuth; ++j) {
        const double phi = 2.0 * pi * j / n_azimuth;
        layout.thresholds_.col_cos.push_back(std::cos(phi));
        layout.thresholds_.col_lower.push_back(2 * j >= n_azimuth ? 1 : 0);
    }

    // Solid angle of each bin over the solid angle of the whole domain.
    const double domain = 1.0 - cos_end;
    layout.uniform_mass_.resize(static_cast<std::size_t>(n_polar) * n_azimuth);
    for (int r = 0; r < n_polar; ++r) {
        const double mass =
            equal_area ? 1.0 / (static_cast<double>(n_polar) * n_azimuth) : (cos_b[r] - cos_b[r + 1]) / (domain * n_azimuth);
        std::fill_n(layout.uniform_mass_.begin() + static_cast<std::ptrdiff_t>(r) * n_azimuth, n_azimuth, mass);
    }
    return layout;
}

SphericalHistogram::SphericalHistogram(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {
    for (std::uint32_t c : counts_) total_ += c;
}

void SphericalHistogram::increment(int bin) {
    if (bin < 0 || bin >= n_bins()) {
        throw Error(ErrorCode::InvalidArgument, "histogram bin out of range");
    }
    ++counts_[static_cast<std::size_t>(bin)];
    ++total_;
}

double tv_distance(std::span<const std::uint32_t> counts, std::uint64_t total, const BinLayout& layout) {
    const auto mass = layout.uniform_mass();
    if (counts.size() != mass.size()) {
        throw Error(ErrorCode::LayoutMismatch, "histogram has " + std::to_string(counts.size()) + " bins, layout has " +
                                                   std::to_string(mass.size()));
    }
    if (total == 0) return 1.0;
    const double t = static_cast<double>(total);
    double sum = 0.0;
    for (std::size_t b = 0; b < counts.size(); ++b) {
        sum += std::abs(static_cast<double>(counts[b]) / t - mass[b]);
    }
    return std::clamp(0.5 * sum, 0.0, 1.0);
}

double tv_distance(const SphericalHistogram& hist, const BinLayout& layout) {
    return tv_distance(hist.counts(), hist.total(), layout);
}

}  // namespace nbv

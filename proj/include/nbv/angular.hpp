#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "nbv/geometry.hpp"

namespace nbv {

/// Precomputed comparison thresholds that turn a direction into a bin index
/// without trigonometry. Shared by BinLayout and the scoring kernels.
///
/// A direction (x, y, z) with length L falls into polar row r = the number of
/// interior row boundaries theta_k with y / L <= cos(theta_k). Its azimuth
/// column is the number of interior column boundaries phi_j with phi >= phi_j,
/// decided from the sign of z and x / hypot(x, z) alone.
struct BinThresholds {
    int n_polar = 1;
    int n_azimuth = 1;
    std::vector<double> row_cos;          // n_polar - 1 values, descending
    std::vector<double> col_cos;          // n_azimuth - 1 values
    std::vector<std::uint8_t> col_lower;  // 1 if the boundary azimuth is in [pi, 2pi)
};

/// Canonical scalar bin lookup for an unnormalised offset vector. The AVX2
/// kernel reproduces this expression for expression.
inline int bin_of_offset(const BinThresholds& t, double dx, double dy, double dz) {
    const double len = std::sqrt((dx * dx + dy * dy) + dz * dz);
    const double yn = dy / len;
    int row = 0;
    for (double c : t.row_cos) row += (yn <= c) ? 1 : 0;

    const double rho = std::sqrt(dx * dx + dz * dz);
    const double xn = rho == 0.0 ? 1.0 : dx / rho;
    const bool lower = dz < 0.0 || (dz == 0.0 && dx < 0.0);
    int col = 0;
    for (std::size_t j = 0; j < t.col_cos.size(); ++j) {
        const bool past = t.col_lower[j] ? (lower && xn >= t.col_cos[j]) : (lower || xn <= t.col_cos[j]);
        col += past ? 1 : 0;
    }
    return row * t.n_azimuth + col;
}

/// Polar x azimuth partition of the direction sphere. Rows are half-open
/// [theta_lo, theta_hi) intervals, the last row closed at its upper end;
/// columns are half-open in phi and wrap modulo 2pi.
///
/// With `hemisphere` set, rows only span theta in [0, pi/2]; directions below
/// the horizon fall into the last row and the uniform reference is the upper
/// hemisphere.
class BinLayout {
public:
    static BinLayout make(int n_polar, int n_azimuth, bool equal_area, bool hemisphere = false);

    int n_polar() const { return thresholds_.n_polar; }
    int n_azimuth() const { return thresholds_.n_azimuth; }
    int n_bins() const { return n_polar() * n_azimuth(); }
    bool equal_area() const { return equal_area_; }
    bool hemisphere() const { return hemisphere_; }

    std::span<const double> row_boundaries() const { return row_boundaries_; }
    std::span<const double> uniform_mass() const { return uniform_mass_; }
    const BinThresholds& thresholds() const { return thresholds_; }

    int bin_index(const Direction& d) const { return bin_of_offset(d.v); }
    int bin_of_offset(const Vec3& offset) const {
        return nbv::bin_of_offset(thresholds_, offset.x(), offset.y(), offset.z());
    }

    friend bool operator==(const BinLayout& a, const BinLayout& b) {
        return a.n_polar() == b.n_polar() && a.n_azimuth() == b.n_azimuth() && a.equal_area_ == b.equal_area_ &&
               a.hemisphere_ == b.hemisphere_;
    }

private:
    BinThresholds thresholds_;
    bool equal_area_ = false;
    bool hemisphere_ = false;
    std::vector<double> row_boundaries_;
    std::vector<double> uniform_mass_;
};

/// Per-bin direction counts.
class SphericalHistogram {
public:
    SphericalHistogram() = default;
    explicit SphericalHistogram(int n_bins) : counts_(static_cast<std::size_t>(n_bins), 0) {}
    SphericalHistogram(std::vector<std::uint32_t> counts);

    void increment(int bin);

    std::span<const std::uint32_t> counts() const { return counts_; }
    std::uint64_t total() const { return total_; }
    int n_bins() const { return static_cast<int>(counts_.size()); }

private:
    std::vector<std::uint32_t> counts_;
    std::uint64_t total_ = 0;
};

/// Total-variation distance between the empirical bin distribution and the
/// uniform distribution on the sphere, in [0, 1]. An empty histogram is
/// maximally non-uniform (1.0).
double tv_distance(std::span<const std::uint32_t> counts, std::uint64_t total, const BinLayout& layout);
double tv_distance(const SphericalHistogram& hist, const BinLayout& layout);

}  // namespace nbv

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace rankzip {

/// 100 * (1 - compressed / baseline). Throws DivisionByZero for a zero baseline.
double compression_ratio(std::uint64_t baseline_bits, std::uint64_t compressed_bits);

struct RdPoint {
    double rate;     // bits per pixel, > 0
    double quality;  // metric value
};

struct RdCurve {
    std::vector<RdPoint> points;
    std::string metric_name;
    bool lower_is_better = false;
};

/// Reads `rate_bpp,quality` CSV (header line required).
RdCurve read_rd_curve_csv(std::istream& in, std::string metric_name = {}, bool lower_is_better = false);

/// Least-squares cubic log10(rate) = c0 + c1 u + c2 u^2 + c3 u^3 in the
/// standardized quality u = (q - center) / scale.
struct Cubic {
    std::array<double, 4> c{};
    double center = 0.0;
    double scale = 1.0;

    double operator()(double q) const noexcept {
        const double u = (q - center) / scale;
        return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
    }
    /// Exact integral over q in [a, b].
    double integral(double a, double b) const noexcept;
};

/// Fits log10(rate) as a cubic in quality. Throws DegenerateCurve when rates
/// are not strictly positive and distinct, qualities are not strictly
/// monotone in rate, or fewer than four points are given.
Cubic fit_log_rate(const RdCurve& curve);

/// Bjøntegaard delta rate of `test` against `anchor`, in percent. Negative
/// means `test` needs fewer bits for the same quality. Throws NoOverlap if
/// the quality ranges do not overlap.
double bd_rate(const RdCurve& anchor, const RdCurve& test);

struct LossWeights {
    double lambda = 1.0;
    std::array<double, 4> kappa = {0.5, 0.2, 0.2, 0.1};  // MSE, LPIPS, CLIP-IQA, CLIP-I2T
    void validate() const;
};

/// Raw metric values and the maxima used to bring each into [0, 1].
struct MetricReadings {
    double rate = 0.0;
    std::array<double, 4> losses{};                       // MSE, LPIPS, CLIP-IQA, CLIP-I2T
    std::array<double, 4> maxima = {255.0, 1.0, 1.0, 1.0};

    /// losses[i] / maxima[i]; throws InvalidReading unless finite and within [0, 1].
    std::array<double, 4> normalized() const;
};

struct LossResult {
    double loss;
    double distortion;
};

/// D = sum kappa_i * L_i over the normalized losses; loss = R + lambda * D.
LossResult aggregate_loss(const LossWeights& w, const MetricReadings& m);

/// Per-document bit totals under several pipelines; the first pipeline is
/// the uncompressed baseline.
struct RatioReport {
    std::vector<std::string> pipelines;
    std::vector<std::pair<std::string, std::vector<std::uint64_t>>> documents;

    std::vector<std::uint64_t> totals() const;
    /// Ratios of the summed totals against the first column.
    std::vector<double> ratios() const;

    std::string to_csv() const;
    std::string to_text() const;
};

/// Validates shape and emptiness; throws EmptyInput for no documents.
RatioReport ratio_report(std::vector<std::string> pipelines,
                         std::vector<std::pair<std::string, std::vector<std::uint64_t>>> documents);

}  // namespace rankzip

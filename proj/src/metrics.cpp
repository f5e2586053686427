#include "rankzip/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

#include "rankzip/error.hpp"

namespace rankzip {

double compression_ratio(std::uint64_t baseline_bits, std::uint64_t compressed_bits) {
    if (baseline_bits == 0) fail(ErrorCode::DivisionByZero, "baseline has zero bits");
    return 100.0 * (1.0 - static_cast<double>(compressed_bits) / static_cast<double>(baseline_bits));
}

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

bool parse_double(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

RdCurve read_rd_curve_csv(std::istream& in, std::string metric_name, bool lower_is_better) {
    RdCurve curve{{}, std::move(metric_name), lower_is_better};
    std::string line;
    if (!std::getline(in, line) || trim(line) != "rate_bpp,quality") {
        fail(ErrorCode::InvalidArgument, "R-D CSV must start with the header 'rate_bpp,quality'");
    }
    for (int lineno = 2; std::getline(in, line); ++lineno) {
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        RdPoint p{};
        if (comma == std::string::npos || !parse_double(line.substr(0, comma), p.rate) ||
            !parse_double(line.substr(comma + 1), p.quality)) {
            fail(ErrorCode::InvalidArgument, "malformed R-D CSV row at line " + std::to_string(lineno));
        }
        curve.points.push_back(p);
    }
    return curve;
}

double Cubic::integral(double a, double b) const noexcept {
    const auto antiderivative = [this](double q) {
        const double u = (q - center) / scale;
        return u * (c[0] + u * (c[1] / 2 + u * (c[2] / 3 + u * c[3] / 4)));
    };
    return scale * (antiderivative(b) - antiderivative(a));
}

Cubic fit_log_rate(const RdCurve& curve) {
    if (curve.points.size() < 4) fail(ErrorCode::DegenerateCurve, "a cubic fit needs at least four points");
    std::vector<RdPoint> pts = curve.points;
    std::sort(pts.begin(), pts.end(), [](const RdPoint& a, const RdPoint& b) { return a.rate < b.rate; });
    for (const RdPoint& p : pts) {
        if (!(p.rate > 0.0) || !std::isfinite(p.rate) || !std::isfinite(p.quality)) {
            fail(ErrorCode::DegenerateCurve, "rates must be positive and values finite");
        }
    }
    int direction = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!(pts[i].rate > pts[i - 1].rate)) fail(ErrorCode::DegenerateCurve, "duplicate rates");
        const double dq = pts[i].quality - pts[i - 1].quality;
        const int d = (dq > 0) - (dq < 0);
        if (d == 0 || (direction != 0 && d != direction)) {
            fail(ErrorCode::DegenerateCurve, "quality must be strictly monotone in rate");
        }
        direction = d;
    }

    const auto [qmin, qmax] = std::minmax_element(pts.begin(), pts.end(), [](const RdPoint& a, const RdPoint& b) {
        return a.quality < b.quality;
    });
    Cubic fit;
    fit.center = (qmin->quality + qmax->quality) / 2;
    fit.scale = (qmax->quality - qmin->quality) / 2;

    // Householder QR of the n x 4 Vandermonde matrix in u, applied to log10(rate).
    const std::size_t n = pts.size();
    std::vector<std::array<double, 4>> a(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (pts[i].quality - fit.center) / fit.scale;
        a[i] = {1.0, u, u * u, u * u * u};
        y[i] = std::log10(pts[i].rate);
    }
    for (std::size_t k = 0; k < 4; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += a[i][k] * a[i][k];
        norm = std::sqrt(norm);
        if (norm == 0.0) fail(ErrorCode::DegenerateCurve, "singular cubic fit");
        const double alpha = a[k][k] > 0 ? -norm : norm;
        std::vector<double> v(n, 0.0);
        v[k] = a[k][k] - alpha;
        for (std::size_t i = k + 1; i < n; ++i) v[i] = a[i][k];
        double vv = 0.0;
        for (std::size_t i = k; i < n; ++i) vv += v[i] * v[i];
        if (vv == 0.0) continue;
        for (std::size_t j = k; j < 4; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i] * a[i][j];
            const double f = 2 * dot / vv;
            for (std::size_t i = k; i < n; ++i) a[i][j] -= f * v[i];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < n; ++i) dot += v[i] * y[i];
        const double f = 2 * dot / vv;
        for (std::size_t i = k; i < n; ++i) y[i] -= f * v[i];
    }
    for (std::size_t k = 4; k-- > 0;) {
        if (std::abs(a[k][k]) < 1e-12) fail(ErrorCode::DegenerateCurve, "singular cubic fit");
        double s = y[k];
        for (std::size_t j = k + 1; j < 4; ++j) s -= a[k][j] * fit.c[j];
        fit.c[k] = s / a[k][k];
    }
    return fit;
}

double bd_rate(const RdCurve& anchor, const RdCurve& test) {
    if (anchor.metric_name != test.metric_name || anchor.lower_is_better != test.lower_is_better) {
        fail(ErrorCode::InvalidArgument, "curves measure different metrics");
    }
    const Cubic fa = fit_log_rate(anchor);
    const Cubic ft = fit_log_rate(test);

    const auto range = [](const RdCurve& c) {
        const auto [lo, hi] = std::minmax_element(c.points.begin(), c.points.end(),
                                                  [](const RdPoint& a, const RdPoint& b) { return a.quality < b.quality; });
        return std::pair{lo->quality, hi->quality};
    };
    const auto [alo, ahi] = range(anchor);
    const auto [tlo, thi] = range(test);
    const double lo = std::max(alo, tlo);
    const double hi = std::min(ahi, thi);
    if (!(hi > lo)) fail(ErrorCode::NoOverlap, "quality ranges do not overlap");

    const double avg_diff = (ft.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);
    return (std::pow(10.0, avg_diff) - 1.0) * 100.0;
}

void LossWeights::validate() const {
    if (!std::isfinite(lambda)) fail(ErrorCode::InvalidReading, "lambda is not finite");
    if (!(lambda > 0.0)) fail(ErrorCode::InvalidArgument, "lambda must be positive");
    bool any = false;
    for (double k : kappa) {
        if (!std::isfinite(k)) fail(ErrorCode::InvalidReading, "kappa is not finite");
        if (k < 0.0) fail(ErrorCode::InvalidArgument, "kappa must be non-negative");
        any = any || k > 0.0;
    }
    if (!any) fail(ErrorCode::InvalidArgument, "at least one kappa must be positive");
}

std::array<double, 4> MetricReadings::normalized() const {
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        if (!std::isfinite(losses[i]) || !std::isfinite(maxima[i]) || !(maxima[i] > 0.0)) {
            fail(ErrorCode::InvalidReading, "metric reading or maximum is not finite and positive");
        }
        out[i] = losses[i] / maxima[i];
        if (out[i] < 0.0 || out[i] > 1.0) fail(ErrorCode::InvalidReading, "normalized reading outside [0, 1]");
    }
    return out;
}

LossResult aggregate_loss(const LossWeights& w, const MetricReadings& m) {
    w.validate();
    if (!std::isfinite(m.rate)) fail(ErrorCode::InvalidReading, "rate is not finite");
    const auto l = m.normalized();
    // Neumaier summation: the weighted sum is correctly rounded for these few terms.
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double term = w.kappa[i] * l[i];
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    const double distortion = sum + comp;
    return {m.rate + w.lambda * distortion, distortion};
}

RatioReport ratio_report(std::vector<std::string> pipelines,
                         std::vector<std::pair<std::string, std::vector<std::uint64_t>>> documents) {
    if (documents.empty()) fail(ErrorCode::EmptyInput, "no documents");
    if (pipelines.empty()) fail(ErrorCode::InvalidArgument, "no pipelines");
    for (const auto& [name, bits] : documents) {
        if (bits.size() != pipelines.size()) fail(ErrorCode::InvalidArgument, "row width differs for " + name);
    }
    return RatioReport{std::move(pipelines), std::move(documents)};
}

std::vector<std::uint64_t> RatioReport::totals() const {
    std::vector<std::uint64_t> t(pipelines.size(), 0);
    for (const auto& [name, bits] : documents) {
        for (std::size_t i = 0; i < bits.size(); ++i) t[i] += bits[i];
    }
    return t;
}

std::vector<double> RatioReport::ratios() const {
    const auto t = totals();
    std::vector<double> r;
    for (std::uint64_t v : t) r.push_back(compression_ratio(t.at(0), v));
    return r;
}

namespace {
std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}
}  // namespace

std::string RatioReport::to_csv() const {
    std::ostringstream out;
    out << "document";
    for (const auto& p : pipelines) out << ',' << p;
    out << '\n';
    for (const auto& [name, bits] : documents) {
        out << name;
        for (auto b : bits) out << ',' << b;
        out << '\n';
    }
    out << "total_bits";
    for (auto b : totals()) out << ',' << b;
    out << "\ncompression_ratio_pct";
    for (double r : ratios()) out << ',' << fixed2(r);
    out << '\n';
    return out.str();
}

std::string RatioReport::to_text() const {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({""});
    for (const auto& p : pipelines) rows.back().push_back(p);
    for (const auto& [name, bits] : documents) {
        rows.push_back({name});
        for (auto b : bits) rows.back().push_back(std::to_string(b));
    }
    rows.push_back({"Total bits"});
    for (auto b : totals()) rows.back().push_back(std::to_string(b));
    rows.push_back({"Compression ratio"});
    for (double r : ratios()) rows.back().push_back(fixed2(r) + "%");

    std::vector<std::size_t> width(pipelines.size() + 1, 0);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i == 0) {
                out << row[i] << std::string(width[i] - row[i].size(), ' ');
            } else {
                out << "  " << std::string(width[i] - row[i].size(), ' ') << row[i];
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace rankzip

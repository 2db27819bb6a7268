#include "daelab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "daelab/errors.hpp"

namespace daelab {
namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

template <class T>
SingularSpectrum top_singular_values_impl(std::span<const T> data, std::size_t rows, std::size_t cols,
                                          std::size_t k, Rng& rng, const PcaOptions& options) {
    if (data.size() != rows * cols) {
        throw DimensionError("top_singular_values: " + std::to_string(data.size()) + " values for a " +
                             std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    }
    if (rows < 2) throw ArgumentError("top_singular_values: need at least 2 rows");
    if (k == 0 || k > std::min(rows, cols)) {
        throw ArgumentError("top_singular_values: k=" + std::to_string(k) + " outside [1, min(N, D)=" +
                            std::to_string(std::min(rows, cols)) + "]");
    }

    std::vector<std::size_t> picked;
    if (rows > options.max_rows) {
        auto perm = rng.permutation(rows);
        picked.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(options.max_rows));
        std::sort(picked.begin(), picked.end());
    } else {
        picked.resize(rows);
        for (std::size_t i = 0; i < rows; ++i) picked[i] = i;
    }
    const auto n = static_cast<Eigen::Index>(picked.size());
    const auto d = static_cast<Eigen::Index>(cols);

    Eigen::MatrixXd a(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            a(i, j) = static_cast<double>(data[picked[static_cast<std::size_t>(i)] * cols + static_cast<std::size_t>(j)]);
    a.rowwise() -= a.colwise().mean();

    const auto width = static_cast<Eigen::Index>(
        std::min(k + options.oversampling, std::min(static_cast<std::size_t>(n), cols)));
    Eigen::MatrixXd omega(d, width);
    for (Eigen::Index j = 0; j < width; ++j)
        for (Eigen::Index i = 0; i < d; ++i) omega(i, j) = rng.normal();

    Eigen::MatrixXd q = orthonormal_basis(a * omega);
    for (std::size_t it = 0; it < options.power_iterations; ++it) {
        const Eigen::MatrixXd z = orthonormal_basis(a.transpose() * q);
        q = orthonormal_basis(a * z);
    }
    const Eigen::MatrixXd b = q.transpose() * a;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    const auto& sv = svd.singularValues();

    SingularSpectrum out;
    out.k = k;
    for (std::size_t i = 0; i < k; ++i) out.values.push_back(std::max(0.0, sv(static_cast<Eigen::Index>(i))));
    return out;
}

}  // namespace

SingularSpectrum top_singular_values(std::span<const double> data, std::size_t rows, std::size_t cols,
                                     std::size_t k, Rng& rng, const PcaOptions& options) {
    return top_singular_values_impl(data, rows, cols, k, rng, options);
}

SingularSpectrum top_singular_values(std::span<const float> data, std::size_t rows, std::size_t cols,
                                     std::size_t k, Rng& rng, const PcaOptions& options) {
    return top_singular_values_impl(data, rows, cols, k, rng, options);
}

double round_one_decimal(double value) { return std::round(value * 10.0) / 10.0; }

std::vector<double> relative_spectrum(const SingularSpectrum& spectrum) {
    if (spectrum.values.empty()) throw DegenerateError("empty singular spectrum");
    const double top = *std::max_element(spectrum.values.begin(), spectrum.values.end());
    if (!(top > 0.0)) throw DegenerateError("degenerate spectrum: all singular values are zero");
    std::vector<double> out;
    out.reserve(spectrum.values.size());
    for (double s : spectrum.values) out.push_back(s / top);
    return out;
}

LambdaVector compute_lambda(const SingularSpectrum& spectrum, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
    LambdaVector out;
    out.alpha = alpha;
    for (double s : relative_spectrum(spectrum)) out.weights.push_back(round_one_decimal(s) < 1.0 ? alpha : 1.0);
    return out;
}

}  // namespace daelab

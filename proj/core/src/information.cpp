#include "daelab/information.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "daelab/errors.hpp"

namespace daelab {
namespace {

double entropy_of_counts(const std::vector<std::size_t>& counts, std::size_t total) {
    double h = 0.0;
    const double n = static_cast<double>(total);
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h;
}

std::uint32_t max_label(std::span<const std::uint32_t> labels) {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

}  // namespace

Labels discretize_column(std::span<const double> values, std::size_t bins) {
    if (bins < 2) throw ArgumentError("discretize: need at least 2 bins");
    Labels out(values.size(), 0);
    if (values.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) return out;
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto b = static_cast<std::size_t>(std::floor((values[i] - lo) / width));
        out[i] = static_cast<std::uint32_t>(std::min(b, bins - 1));
    }
    return out;
}

std::vector<Labels> discretize(const LatentMatrix& codes, std::size_t bins) {
    std::vector<Labels> out;
    out.reserve(codes.cols);
    for (std::size_t j = 0; j < codes.cols; ++j) out.push_back(discretize_column(codes.column(j), bins));
    return out;
}

double entropy(std::span<const std::uint32_t> labels) {
    if (labels.empty()) throw EmptyInputError("entropy of empty label vector");
    std::vector<std::size_t> counts(std::size_t{max_label(labels)} + 1, 0);
    for (auto l : labels) ++counts[l];
    return entropy_of_counts(counts, labels.size());
}

double joint_entropy(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    if (a.size() != b.size()) throw DimensionError("joint_entropy: label vectors differ in length");
    if (a.empty()) throw EmptyInputError("joint entropy of empty label vectors");
    const std::uint64_t kb = std::uint64_t{max_label(b)} + 1;
    const std::uint64_t cells = (std::uint64_t{max_label(a)} + 1) * kb;
    if (cells <= (1u << 22)) {
        std::vector<std::size_t> counts(cells, 0);
        for (std::size_t i = 0; i < a.size(); ++i) ++counts[a[i] * kb + b[i]];
        return entropy_of_counts(counts, a.size());
    }
    std::unordered_map<std::uint64_t, std::size_t> sparse;
    for (std::size_t i = 0; i < a.size(); ++i) ++sparse[a[i] * kb + b[i]];
    std::vector<std::size_t> counts;
    counts.reserve(sparse.size());
    for (const auto& [key, c] : sparse) counts.push_back(c);
    // Summation order of a hash map is unspecified; sort for determinism.
    std::sort(counts.begin(), counts.end());
    return entropy_of_counts(counts, a.size());
}

double mutual_information(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    return std::max(0.0, entropy(a) + entropy(b) - joint_entropy(a, b));
}

}  // namespace daelab

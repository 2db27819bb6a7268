#include "daelab/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "daelab/errors.hpp"

namespace daelab {
namespace {

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double reduction = 0.0;
    std::size_t left_count = 0;
    bool found = false;
};

std::vector<std::uint64_t> rank_keys(const LatentMatrix& x) {
    std::vector<std::uint64_t> keys(x.cols);
    std::vector<std::size_t> rows(x.rows);
    std::vector<std::uint64_t> rank(x.rows);
    for (std::size_t j = 0; j < x.cols; ++j) {
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        std::stable_sort(rows.begin(), rows.end(), [&](auto a, auto b) { return x.at(a, j) < x.at(b, j); });
        std::uint64_t r = 0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            if (i > 0 && x.at(rows[i - 1], j) < x.at(rows[i], j)) ++r;
            rank[rows[i]] = r;
        }
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto v : rank) h = Rng::splitmix64(h ^ v);
        keys[j] = h;
    }
    return keys;
}

class TreeBuilder {
public:
    TreeBuilder(const LatentMatrix& x, std::span<const double> y, const ForestConfig& config, std::size_t mtry,
                Rng& rng, std::vector<double>& importance)
        : x_(x), y_(y), config_(config), mtry_(mtry), rng_(rng), importance_(importance), keys_(rank_keys(x)) {}

    void build(std::vector<std::size_t>& idx, std::vector<RegressionTree::Node>& nodes) {
        nodes.clear();
        grow(idx, 0, idx.size(), 0, nodes);
    }

private:
    std::uint32_t grow(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, std::size_t depth,
                       std::vector<RegressionTree::Node>& nodes) {
        const std::size_t n = end - begin;
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            sum += y_[idx[i]];
            sumsq += y_[idx[i]] * y_[idx[i]];
        }
        const auto id = static_cast<std::uint32_t>(nodes.size());
        nodes.push_back({});
        nodes[id].value = sum / static_cast<double>(n);
        const double sse = std::max(0.0, sumsq - sum * sum / static_cast<double>(n));

        if (depth >= config_.max_depth || n < 2 * config_.min_leaf || sse <= 1e-12) return id;
        const Split split = best_split(idx, begin, end, sse);
        if (!split.found) return id;

        std::sort(idx.begin() + static_cast<std::ptrdiff_t>(begin), idx.begin() + static_cast<std::ptrdiff_t>(end),
                  [&](auto a, auto b) { return x_.at(a, split.feature) < x_.at(b, split.feature); });
        importance_[split.feature] += split.reduction;
        nodes[id].feature = static_cast<std::int32_t>(split.feature);
        nodes[id].threshold = split.threshold;
        const std::size_t mid = begin + split.left_count;
        const auto left = grow(idx, begin, mid, depth + 1, nodes);
        const auto right = grow(idx, mid, end, depth + 1, nodes);
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    }

    Split best_split(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, double parent_sse) {
        const std::size_t n = end - begin;
        // Candidates are the mtry columns with the smallest keyed hash. Keys
        // come from each column's rank pattern, not its index, so reordering
        // columns or applying increasing maps leaves the forest unchanged.
        const std::uint64_t draw = rng_.next_u64();
        std::vector<std::pair<std::uint64_t, std::size_t>> order(x_.cols);
        for (std::size_t j = 0; j < x_.cols; ++j) order[j] = {Rng::splitmix64(draw ^ keys_[j]), j};
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(mtry_), order.end());

        Split best;
        std::vector<std::pair<double, double>> column(n);
        for (std::size_t f = 0; f < mtry_; ++f) {
            const auto feature = order[f].second;
            for (std::size_t i = 0; i < n; ++i) column[i] = {x_.at(idx[begin + i], feature), y_[idx[begin + i]]};
            std::sort(column.begin(), column.end());
            double total = 0.0, total_sq = 0.0;
            for (const auto& [v, t] : column) {
                total += t;
                total_sq += t * t;
            }
            double left = 0.0, left_sq = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left += column[i].second;
                left_sq += column[i].second * column[i].second;
                const std::size_t nl = i + 1, nr = n - nl;
                if (nl < config_.min_leaf) continue;
                if (nr < config_.min_leaf) break;
                if (!(column[i].first < column[i + 1].first)) continue;
                const double right = total - left, right_sq = total_sq - left_sq;
                const double sse_l = left_sq - left * left / static_cast<double>(nl);
                const double sse_r = right_sq - right * right / static_cast<double>(nr);
                const double reduction = parent_sse - sse_l - sse_r;
                if (reduction > best.reduction + 1e-12) {
                    best = {feature, 0.5 * (column[i].first + column[i + 1].first), reduction, nl, true};
                }
            }
        }
        return best;
    }

    const LatentMatrix& x_;
    std::span<const double> y_;
    const ForestConfig& config_;
    std::size_t mtry_;
    Rng& rng_;
    std::vector<double>& importance_;
    std::vector<std::uint64_t> keys_;
};

}  // namespace

double RegressionTree::predict(std::span<const double> row) const {
    std::uint32_t at = 0;
    while (nodes_[at].feature >= 0) {
        const auto& node = nodes_[at];
        at = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes_[at].value;
}

RandomForest RandomForest::fit(const LatentMatrix& x, std::span<const double> y, const ForestConfig& config, Rng& rng) {
    if (y.size() != x.rows) {
        throw DimensionError("random forest: " + std::to_string(y.size()) + " targets for " +
                             std::to_string(x.rows) + " rows");
    }
    if (config.min_leaf == 0 || x.rows < 2 * config.min_leaf) {
        throw ArgumentError("random forest needs at least 2*min_leaf rows");
    }
    if (x.cols == 0) throw ArgumentError("random forest needs at least one feature");
    if (config.n_trees == 0) throw ArgumentError("random forest needs at least one tree");
    if (!(config.bootstrap_fraction > 0.0 && config.bootstrap_fraction <= 1.0))
        throw ArgumentError("bootstrap fraction must lie in (0, 1]");

    const std::size_t mtry =
        config.features_per_split
            ? std::min(config.features_per_split, x.cols)
            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols))));
    const auto draws = std::max<std::size_t>(
        2 * config.min_leaf,
        static_cast<std::size_t>(std::llround(config.bootstrap_fraction * static_cast<double>(x.rows))));

    RandomForest forest;
    forest.importances_.assign(x.cols, 0.0);
    TreeBuilder builder(x, y, config, mtry, rng, forest.importances_);
    std::vector<std::size_t> idx(draws);
    for (std::size_t t = 0; t < config.n_trees; ++t) {
        for (auto& i : idx) i = static_cast<std::size_t>(rng.below(x.rows));
        RegressionTree tree;
        builder.build(idx, tree.nodes_);
        forest.trees_.push_back(std::move(tree));
    }
    const double total = std::accumulate(forest.importances_.begin(), forest.importances_.end(), 0.0);
    if (total > 0.0)
        for (auto& v : forest.importances_) v /= total;
    return forest;
}

double RandomForest::predict(std::span<const double> row) const {
    double acc = 0.0;
    for (const auto& tree : trees_) acc += tree.predict(row);
    return acc / static_cast<double>(trees_.size());
}

std::vector<double> RandomForest::predict(const LatentMatrix& x) const {
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
        out[i] = predict(std::span<const double>(x.values.data() + i * x.cols, x.cols));
    return out;
}

double r_squared(std::span<const double> y, std::span<const double> prediction) {
    if (y.size() != prediction.size() || y.empty()) throw DimensionError("r_squared: length mismatch");
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_tot += (y[i] - mean) * (y[i] - mean);
        ss_res += (y[i] - prediction[i]) * (y[i] - prediction[i]);
    }
    return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
}

}  // namespace daelab

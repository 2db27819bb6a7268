#include "daelab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "daelab/errors.hpp"

namespace daelab {

Labels FactorMatrix::column(std::size_t k) const {
    Labels out(rows);
    for (std::size_t i = 0; i < rows; ++i) out[i] = label(i, k);
    return out;
}

FactorMatrix FactorMatrix::from_dataset(const FactorDataset& dataset) {
    FactorMatrix v;
    v.rows = dataset.size();
    v.cardinalities = dataset.cardinalities();
    v.labels.assign(dataset.factors.begin(), dataset.factors.end());
    return v;
}

void FactorMatrix::validate() const {
    if (labels.size() != rows * cardinalities.size()) throw DimensionError("factor matrix size mismatch");
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= cardinalities[i % cardinalities.size()])
            throw ArgumentError("factor label exceeds its cardinality");
}

namespace {

void check_inputs(const LatentMatrix& z, const FactorMatrix& v) {
    v.validate();
    if (z.rows != v.rows) {
        throw DimensionError("latents have " + std::to_string(z.rows) + " rows, factors " + std::to_string(v.rows));
    }
    if (z.values.size() != z.rows * z.cols) throw DimensionError("latent matrix size mismatch");
    if (z.rows == 0 || z.cols == 0) throw EmptyInputError("metrics need a non-empty latent matrix");
    for (double x : z.values)
        if (!std::isfinite(x)) throw ArgumentError("latent codes must be finite");
}

// Rows grouped by (factor, value) for sampling batches that share a factor.
class FactorSampler {
public:
    explicit FactorSampler(const FactorMatrix& v) : groups_(v.num_factors()) {
        for (std::size_t k = 0; k < v.num_factors(); ++k) {
            groups_[k].resize(v.cardinalities[k]);
            for (std::size_t i = 0; i < v.rows; ++i) groups_[k][v.label(i, k)].push_back(i);
            std::erase_if(groups_[k], [](const auto& g) { return g.empty(); });
        }
    }

    // A group of rows sharing a uniformly drawn (observed) value of factor k.
    const std::vector<std::size_t>& draw_group(std::size_t k, Rng& rng) const {
        const auto& gk = groups_[k];
        return gk[static_cast<std::size_t>(rng.below(gk.size()))];
    }

    static std::size_t pick(const std::vector<std::size_t>& group, Rng& rng) {
        return group[static_cast<std::size_t>(rng.below(group.size()))];
    }

private:
    std::vector<std::vector<std::vector<std::size_t>>> groups_;
};

struct LabelledFeatures {
    std::vector<std::vector<double>> x;
    std::vector<std::size_t> y;
};

// Softmax regression on standardised features; returns held-out accuracy.
double linear_classifier_accuracy(const LabelledFeatures& train, const LabelledFeatures& test,
                                  std::size_t classes, std::size_t epochs, double lr) {
    const std::size_t n = train.x.front().size();
    const double t = static_cast<double>(train.x.size());
    std::vector<double> mean(n, 0.0), scale(n, 0.0);
    for (const auto& row : train.x)
        for (std::size_t j = 0; j < n; ++j) mean[j] += row[j] / t;
    for (const auto& row : train.x)
        for (std::size_t j = 0; j < n; ++j) scale[j] += (row[j] - mean[j]) * (row[j] - mean[j]) / t;
    for (auto& s : scale) s = s > 1e-24 ? 1.0 / std::sqrt(s) : 1.0;
    auto standardise = [&](const std::vector<double>& row) {
        std::vector<double> out(n);
        for (std::size_t j = 0; j < n; ++j) out[j] = (row[j] - mean[j]) * scale[j];
        return out;
    };
    std::vector<std::vector<double>> xs;
    for (const auto& row : train.x) xs.push_back(standardise(row));

    std::vector<double> w(n * classes, 0.0), b(classes, 0.0);
    std::vector<double> logits(classes), gw(n * classes), gb(classes);
    auto score = [&](const std::vector<double>& row) {
        for (std::size_t c = 0; c < classes; ++c) {
            double s = b[c];
            for (std::size_t j = 0; j < n; ++j) s += row[j] * w[j * classes + c];
            logits[c] = s;
        }
    };
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        std::fill(gw.begin(), gw.end(), 0.0);
        std::fill(gb.begin(), gb.end(), 0.0);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            score(xs[i]);
            const double top = *std::max_element(logits.begin(), logits.end());
            double z = 0.0;
            for (auto& l : logits) z += (l = std::exp(l - top));
            for (std::size_t c = 0; c < classes; ++c) {
                const double err = logits[c] / z - (train.y[i] == c ? 1.0 : 0.0);
                gb[c] += err / t;
                for (std::size_t j = 0; j < n; ++j) gw[j * classes + c] += err * xs[i][j] / t;
            }
        }
        for (std::size_t q = 0; q < w.size(); ++q) w[q] -= lr * gw[q];
        for (std::size_t c = 0; c < classes; ++c) b[c] -= lr * gb[c];
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.x.size(); ++i) {
        score(standardise(test.x[i]));
        const auto pred = static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
        if (pred == test.y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.x.size());
}

}  // namespace

double z_diff_score(const LatentMatrix& z, const FactorMatrix& v, const MetricConfig& config, Rng& rng) {
    check_inputs(z, v);
    const std::size_t factors = v.num_factors();
    if (factors < 2) throw MetricUndefinedError("z-diff needs at least 2 factors");
    if (config.train_points == 0 || config.test_points == 0 || config.batch_size == 0)
        throw ArgumentError("z-diff sample counts must be positive");
    const FactorSampler sampler(v);
    const std::size_t n = z.cols;

    auto make_point = [&](LabelledFeatures& out) {
        const auto k = static_cast<std::size_t>(rng.below(factors));
        std::vector<double> feature(n, 0.0);
        for (std::size_t l = 0; l < config.batch_size; ++l) {
            const auto& group = sampler.draw_group(k, rng);
            const auto a = FactorSampler::pick(group, rng);
            const auto b = FactorSampler::pick(group, rng);
            for (std::size_t j = 0; j < n; ++j) feature[j] += std::abs(z.at(a, j) - z.at(b, j));
        }
        for (auto& f : feature) f /= static_cast<double>(config.batch_size);
        out.x.push_back(std::move(feature));
        out.y.push_back(k);
    };
    LabelledFeatures train, test;
    for (std::size_t i = 0; i < config.train_points; ++i) make_point(train);
    for (std::size_t i = 0; i < config.test_points; ++i) make_point(test);
    return linear_classifier_accuracy(train, test, factors, config.classifier_epochs,
                                      config.classifier_learning_rate);
}

double z_var_score(const LatentMatrix& z, const FactorMatrix& v, const MetricConfig& config, Rng& rng) {
    check_inputs(z, v);
    const std::size_t factors = v.num_factors();
    if (factors < 2) throw MetricUndefinedError("z-var needs at least 2 factors");
    if (config.train_points == 0 || config.test_points == 0 || config.batch_size < 2)
        throw ArgumentError("z-var needs positive vote counts and batches of at least 2");
    const std::size_t n = z.cols;
    const double rows = static_cast<double>(z.rows);

    std::vector<double> inv_std(n, 0.0);
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < n; ++j) {
        double mean = 0.0, var = 0.0;
        for (std::size_t i = 0; i < z.rows; ++i) mean += z.at(i, j) / rows;
        for (std::size_t i = 0; i < z.rows; ++i) var += (z.at(i, j) - mean) * (z.at(i, j) - mean) / rows;
        const double sd = std::sqrt(var);
        if (sd >= 1e-8) {
            inv_std[j] = 1.0 / sd;
            active.push_back(j);
        }
    }
    if (active.empty()) throw MetricUndefinedError("z-var undefined: every latent dimension is collapsed");

    const FactorSampler sampler(v);
    auto vote = [&]() -> std::pair<std::size_t, std::size_t> {
        const auto k = static_cast<std::size_t>(rng.below(factors));
        const auto& group = sampler.draw_group(k, rng);
        std::vector<std::size_t> picked(config.batch_size);
        for (auto& p : picked) p = FactorSampler::pick(group, rng);
        std::size_t best_dim = active.front();
        double best_var = std::numeric_limits<double>::infinity();
        for (auto j : active) {
            double mean = 0.0, var = 0.0;
            for (auto p : picked) mean += z.at(p, j) * inv_std[j];
            mean /= static_cast<double>(picked.size());
            for (auto p : picked) {
                const double d = z.at(p, j) * inv_std[j] - mean;
                var += d * d;
            }
            var /= static_cast<double>(picked.size() - 1);
            if (var < best_var) {
                best_var = var;
                best_dim = j;
            }
        }
        return {best_dim, k};
    };

    std::vector<std::vector<std::size_t>> counts(n, std::vector<std::size_t>(factors, 0));
    for (std::size_t t = 0; t < config.train_points; ++t) {
        const auto [d, k] = vote();
        ++counts[d][k];
    }
    std::vector<std::size_t> majority(n);
    for (std::size_t j = 0; j < n; ++j)
        majority[j] = static_cast<std::size_t>(std::max_element(counts[j].begin(), counts[j].end()) - counts[j].begin());

    std::size_t correct = 0;
    for (std::size_t t = 0; t < config.test_points; ++t) {
        const auto [d, k] = vote();
        if (majority[d] == k) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(config.test_points);
}

std::vector<std::vector<double>> importance_matrix(const LatentMatrix& z, const FactorMatrix& v,
                                                   const ForestConfig& config, Rng& rng) {
    check_inputs(z, v);
    std::vector<std::vector<double>> r(z.cols, std::vector<double>(v.num_factors(), 0.0));
    std::vector<double> target(v.rows);
    for (std::size_t k = 0; k < v.num_factors(); ++k) {
        for (std::size_t i = 0; i < v.rows; ++i) target[i] = v.label(i, k);
        const auto forest = RandomForest::fit(z, target, config, rng);
        for (std::size_t j = 0; j < z.cols; ++j) r[j][k] = forest.importances()[j];
    }
    return r;
}

double dci_disentanglement(const std::vector<std::vector<double>>& importance) {
    if (importance.empty()) throw MetricUndefinedError("dci: empty importance matrix");
    const std::size_t factors = importance.front().size();
    if (factors < 2) throw MetricUndefinedError("dci needs at least 2 factors");
    double total = 0.0;
    for (const auto& row : importance)
        for (double x : row) total += x;
    if (!(total > 0.0)) throw MetricUndefinedError("dci undefined: all importances are zero");

    const double log_f = std::log(static_cast<double>(factors));
    double score = 0.0;
    for (const auto& row : importance) {
        const double row_sum = std::accumulate(row.begin(), row.end(), 0.0);
        if (!(row_sum > 0.0)) continue;
        double h = 0.0;
        for (double x : row) {
            const double p = x / row_sum;
            if (p > 0.0) h -= p * std::log(p);
        }
        score += (row_sum / total) * (1.0 - h / log_f);
    }
    return std::clamp(score, 0.0, 1.0);
}

double dci_rf_score(const LatentMatrix& z, const FactorMatrix& v, const MetricConfig& config, Rng& rng) {
    if (v.num_factors() < 2) throw MetricUndefinedError("dci needs at least 2 factors");
    return dci_disentanglement(importance_matrix(z, v, config.forest, rng));
}

double jemmig_score(const LatentMatrix& z, const FactorMatrix& v, std::size_t bins) {
    check_inputs(z, v);
    if (z.cols < 2) throw MetricUndefinedError("jemmig needs at least 2 latent dimensions");
    if (v.num_factors() < 1) throw MetricUndefinedError("jemmig needs at least 1 factor");
    const auto binned = discretize(z, bins);
    const double log_bins = std::log(static_cast<double>(bins));

    double total = 0.0;
    for (std::size_t k = 0; k < v.num_factors(); ++k) {
        const auto factor = v.column(k);
        std::vector<std::pair<double, std::size_t>> mi;
        for (std::size_t j = 0; j < z.cols; ++j) mi.emplace_back(mutual_information(binned[j], factor), j);
        std::stable_sort(mi.begin(), mi.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        const auto [best_mi, best] = mi[0];
        const double runner_up = mi[1].first;
        const double jemmig = joint_entropy(binned[best], factor) - best_mi + runner_up;
        total += 1.0 - jemmig / (entropy(factor) + log_bins);
    }
    return std::clamp(total / static_cast<double>(v.num_factors()), 0.0, 1.0);
}

double dcimig_score(const LatentMatrix& z, const FactorMatrix& v, std::size_t bins) {
    check_inputs(z, v);
    const std::size_t factors = v.num_factors();
    if (factors < 2) throw MetricUndefinedError("dcimig needs at least 2 factors");
    const auto binned = discretize(z, bins);
    std::vector<Labels> columns;
    double entropy_total = 0.0;
    for (std::size_t k = 0; k < factors; ++k) {
        columns.push_back(v.column(k));
        entropy_total += entropy(columns.back());
    }
    if (!(entropy_total > 0.0)) throw MetricUndefinedError("dcimig undefined: factors carry no entropy");

    std::vector<double> gap_of_factor(factors, 0.0);
    for (std::size_t j = 0; j < z.cols; ++j) {
        std::vector<std::pair<double, std::size_t>> mi;
        for (std::size_t k = 0; k < factors; ++k) mi.emplace_back(mutual_information(binned[j], columns[k]), k);
        std::stable_sort(mi.begin(), mi.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        const double gap = mi[0].first - mi[1].first;
        auto& g = gap_of_factor[mi[0].second];
        g = std::max(g, gap);
    }
    const double sum = std::accumulate(gap_of_factor.begin(), gap_of_factor.end(), 0.0);
    return std::clamp(sum / entropy_total, 0.0, 1.0);
}

ProbeReport equivariance_probe(const LatentMatrix& z, const FactorMatrix& v, std::size_t k, std::size_t step) {
    check_inputs(z, v);
    if (k >= v.num_factors()) throw ArgumentError("probe factor index out of range");
    if (v.cardinalities[k] < 2) throw ArgumentError("probe factor needs at least 2 values");
    if (step == 0) throw ArgumentError("probe step must be positive");
    const std::size_t factors = v.num_factors();

    auto key_of = [&](std::size_t row, std::size_t shift) {
        std::uint64_t key = 0;
        for (std::size_t f = 0; f < factors; ++f) key = key * v.cardinalities[f] + v.label(row, f) + (f == k ? shift : 0);
        return key;
    };
    std::unordered_map<std::uint64_t, std::size_t> row_of;
    for (std::size_t i = 0; i < v.rows; ++i) row_of.emplace(key_of(i, 0), i);

    ProbeReport report;
    report.factor = k;
    report.step = step;
    report.mean_abs_delta.assign(z.cols, 0.0);
    for (std::size_t i = 0; i < v.rows; ++i) {
        if (v.label(i, k) + step >= v.cardinalities[k]) continue;
        const auto it = row_of.find(key_of(i, step));
        if (it == row_of.end()) continue;
        for (std::size_t j = 0; j < z.cols; ++j) report.mean_abs_delta[j] += std::abs(z.at(it->second, j) - z.at(i, j));
        ++report.pairs;
    }
    if (report.pairs == 0) throw ArgumentError("equivariance probe found no pairs for factor " + std::to_string(k));
    for (auto& d : report.mean_abs_delta) d /= static_cast<double>(report.pairs);
    const auto dominant = std::max_element(report.mean_abs_delta.begin(), report.mean_abs_delta.end());
    report.dominant_dim = static_cast<std::size_t>(dominant - report.mean_abs_delta.begin());
    const double total = std::accumulate(report.mean_abs_delta.begin(), report.mean_abs_delta.end(), 0.0);
    report.alignment_ratio = total > 0.0 ? *dominant / total : 0.0;
    return report;
}

}  // namespace daelab

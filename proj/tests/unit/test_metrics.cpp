#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "daelab/errors.hpp"
#include "daelab/evaluation.hpp"
#include "daelab/information.hpp"
#include "daelab/metrics.hpp"
#include "daelab/random_forest.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace daelab;
using namespace daelab::testing;

namespace {

const std::vector<std::uint32_t> kCards{16, 16, 5, 3};

double plain_entropy(const std::vector<std::uint32_t>& labels) {
    std::map<std::uint32_t, double> counts;
    for (auto l : labels) counts[l] += 1.0;
    double h = 0.0;
    for (const auto& [l, c] : counts) h -= c / labels.size() * std::log(c / labels.size());
    return h;
}

MetricConfig small_config() {
    MetricConfig c;
    c.train_points = 100;
    c.test_points = 50;
    c.batch_size = 16;
    c.classifier_epochs = 50;
    return c;
}

std::vector<double> scores(const LatentMatrix& z, const FactorMatrix& v, const MetricConfig& c, std::uint64_t seed) {
    const auto r = score_latents(z, v, c, seed);
    return {r.z_diff, r.z_var, r.dci_rf, r.jemmig, r.dcimig};
}

}  // namespace

TEST_CASE("entropy and mutual information examples") {
    const std::vector<std::uint32_t> u4{0, 1, 2, 3, 0, 1, 2, 3};
    CHECK(entropy(u4) == doctest::Approx(std::log(4.0)).epsilon(1e-15));

    Rng rng(1);
    std::vector<std::uint32_t> a(5000);
    for (auto& x : a) x = static_cast<std::uint32_t>(rng.below(7));
    CHECK(mutual_information(a, a) == doctest::Approx(entropy(a)).epsilon(1e-12));
    CHECK(entropy(a) == doctest::Approx(plain_entropy(a)).epsilon(1e-12));

    std::vector<std::uint32_t> b(10000), c(10000);
    for (auto& x : b) x = static_cast<std::uint32_t>(rng.below(20));
    for (auto& x : c) x = static_cast<std::uint32_t>(rng.below(20));
    // Plug-in bias for independent 20×20 labels is about 361 / (2N) nats.
    CHECK(mutual_information(b, c) < 0.05);
    CHECK(mutual_information(b, c) >= 0.0);

    CHECK_THROWS_AS(entropy(std::vector<std::uint32_t>{}), EmptyInputError);
    CHECK_THROWS_AS(joint_entropy(a, b), DimensionError);
}

TEST_CASE("discretization") {
    const std::vector<double> x{0.0, 0.5, 1.0, 0.25};
    const auto l = discretize_column(x, 4);
    CHECK(l == Labels{0, 2, 3, 1});
    CHECK(discretize_column(std::vector<double>{3.0, 3.0}, 20) == Labels{0, 0});
    CHECK_THROWS_AS(discretize_column(x, 1), ArgumentError);

    // A constant dimension carries no information.
    const std::vector<std::uint32_t> labels{0, 1, 0, 1};
    CHECK(mutual_information(discretize_column(std::vector<double>(4, 2.0), 20), labels) == 0.0);
}

TEST_CASE("random forest examples") {
    Rng data(2);
    const std::size_t n = 600;
    LatentMatrix x(n, 3);
    for (auto& v : x.values) v = data.uniform();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x.at(i, 0);

    Rng rng(3);
    const auto forest = RandomForest::fit(x, y, ForestConfig{}, rng);
    CHECK(forest.trees().size() == 10);
    CHECK(forest.importances()[0] > 0.9);
    double sum = 0.0;
    for (double w : forest.importances()) {
        CHECK(w >= 0.0);
        sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& tree : forest.trees()) {
        // Depth 10 bounds a binary tree at 2^11 - 1 nodes.
        CHECK(tree.nodes().size() < 2048);
    }

    SUBCASE("independent target gives no held-out skill") {
        LatentMatrix train(n, 3), test(n, 3);
        for (auto& v : train.values) v = data.uniform();
        for (auto& v : test.values) v = data.uniform();
        std::vector<double> yt(n), yh(n);
        for (auto& v : yt) v = static_cast<double>(data.below(5));
        for (auto& v : yh) v = static_cast<double>(data.below(5));
        Rng r(4);
        const auto f = RandomForest::fit(train, yt, ForestConfig{}, r);
        CHECK(r_squared(yh, f.predict(test)) < 0.1);
    }

    SUBCASE("deterministic under a fixed seed") {
        Rng r1(8), r2(8);
        const auto a = RandomForest::fit(x, y, ForestConfig{}, r1);
        const auto b = RandomForest::fit(x, y, ForestConfig{}, r2);
        CHECK(a.importances() == b.importances());
        CHECK(a.predict(x) == b.predict(x));
    }

    SUBCASE("constant target has zero importances") {
        Rng r(1);
        const auto f = RandomForest::fit(x, std::vector<double>(n, 2.0), ForestConfig{}, r);
        for (double w : f.importances()) CHECK(w == 0.0);
        CHECK(f.predict(x).front() == 2.0);
    }

    SUBCASE("argument errors") {
        Rng r(1);
        CHECK_THROWS_AS(RandomForest::fit(x, std::vector<double>(n - 1), ForestConfig{}, r), DimensionError);
        LatentMatrix tiny(9, 2);
        CHECK_THROWS_AS(RandomForest::fit(tiny, std::vector<double>(9), ForestConfig{}, r), ArgumentError);
    }
}

TEST_CASE("random forest is equivariant under column permutation and increasing maps") {
    Rng data(5);
    const std::size_t n = 400, d = 7;
    LatentMatrix x(n, d);
    for (auto& v : x.values) v = data.normal();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::floor(3.0 * x.at(i, 2) + x.at(i, 5) * x.at(i, 5));

    Rng r0(11);
    const auto base = RandomForest::fit(x, y, ForestConfig{}, r0);

    const std::vector<std::size_t> perm{6, 2, 0, 5, 1, 3, 4};
    Rng r1(11);
    const auto permuted = RandomForest::fit(permute_columns(x, perm), y, ForestConfig{}, r1);
    for (std::size_t j = 0; j < d; ++j) CHECK(permuted.importances()[j] == base.importances()[perm[j]]);

    auto mapped = x;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mapped.at(i, j) = 0.5 * (j + 1) * x.at(i, j) + 3.0 * j;
    Rng r2(11);
    const auto scaled = RandomForest::fit(mapped, y, ForestConfig{}, r2);
    CHECK(scaled.importances() == base.importances());
}

TEST_CASE("dci disentanglement of importance matrices") {
    CHECK(dci_disentanglement({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == doctest::Approx(1.0));
    CHECK(dci_disentanglement({{1, 1, 1}, {2, 2, 2}}) == doctest::Approx(0.0));

    // Hand-computed mix: row weights 0.5 each, row entropies ln 2 / ln 2 and 0.
    const double d = dci_disentanglement({{0.5, 0.5}, {1.0, 0.0}});
    CHECK(d == doctest::Approx(0.5).epsilon(1e-12));

    // All-zero rows are skipped.
    CHECK(dci_disentanglement({{0, 0}, {1, 0}}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(dci_disentanglement({{0, 0}, {0, 0}}), MetricUndefinedError);
    CHECK_THROWS_AS(dci_disentanglement({{1}, {1}}), MetricUndefinedError);
}

TEST_CASE("oracle representations on i.i.d. factors") {
    Rng data(0, RngStream::data);
    const auto v = random_factors(10000, kCards, data);
    const auto identity = identity_codes(v);
    Rng noise_rng(1, RngStream::data);
    const auto noise = noise_codes(v.rows, v.num_factors(), noise_rng);
    const MetricConfig config;
    const double chance = 1.0 / kCards.size();
    const double band = 3.0 * std::sqrt(chance * (1.0 - chance) / config.test_points);

    SUBCASE("z-diff") {
        Rng a(1), b(1);
        CHECK(z_diff_score(identity, v, config, a) >= 0.98);
        const double s = z_diff_score(noise, v, config, b);
        CHECK(std::abs(s - chance) <= band);
    }
    SUBCASE("z-var") {
        Rng a(1), b(1);
        CHECK(z_var_score(identity, v, config, a) == 1.0);
        const double s = z_var_score(noise, v, config, b);
        CHECK(std::abs(s - chance) <= band);
    }
    SUBCASE("dci-rf") {
        Rng a(1), b(1);
        CHECK(dci_rf_score(identity, v, config, a) >= 0.9);
        CHECK(dci_rf_score(noise, v, config, b) <= 0.1);
    }
    SUBCASE("jemmig") {
        CHECK(jemmig_score(identity, v, 20) > 0.9);
        CHECK(jemmig_score(noise, v, 20) <= 0.1);
    }
    SUBCASE("dcimig") {
        CHECK(dcimig_score(identity, v, 20) == doctest::Approx(1.0).epsilon(0.05));
        CHECK(dcimig_score(noise, v, 20) < 0.05);
    }
}

TEST_CASE("information scores on an exhaustive grid") {
    const auto v = exhaustive_factors(kCards);
    const auto z = identity_codes(v);
    // Bijective binning and exactly independent factors: every gap saturates.
    CHECK(jemmig_score(z, v, 20) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dcimig_score(z, v, 20) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jemmig matches a direct evaluation of its definition") {
    Rng rng(6);
    const auto v = random_factors(3000, {6, 4}, rng);
    LatentMatrix z(v.rows, 3);
    for (std::size_t i = 0; i < v.rows; ++i) {
        z.at(i, 0) = v.label(i, 0) + 0.8 * rng.uniform();
        z.at(i, 1) = v.label(i, 1) + 2.0 * rng.uniform();
        z.at(i, 2) = rng.uniform();
    }
    const std::size_t bins = 20;
    const auto binned = discretize(z, bins);
    double expected = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto f = v.column(k);
        const double hv = plain_entropy(f);
        std::vector<double> mi;
        std::vector<double> joint;
        for (std::size_t j = 0; j < 3; ++j) {
            std::vector<std::uint32_t> pair(v.rows);
            for (std::size_t i = 0; i < v.rows; ++i) pair[i] = binned[j][i] * 100 + f[i];
            joint.push_back(plain_entropy(pair));
            mi.push_back(plain_entropy(binned[j]) + hv - joint.back());
        }
        std::size_t best = 0;
        for (std::size_t j = 1; j < 3; ++j)
            if (mi[j] > mi[best]) best = j;
        double second = -1.0;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != best) second = std::max(second, mi[j]);
        expected += 1.0 - (joint[best] - mi[best] + second) / (hv + std::log(double(bins)));
    }
    CHECK(jemmig_score(z, v, bins) == doctest::Approx(expected / 2.0).epsilon(1e-10));
}

TEST_CASE("undefined metric inputs") {
    Rng rng(7);
    const auto v = random_factors(200, {4, 4}, rng);
    LatentMatrix constant(v.rows, 3);
    for (auto& x : constant.values) x = 0.25;
    Rng r(1);
    CHECK_THROWS_AS(z_var_score(constant, v, small_config(), r), MetricUndefinedError);

    const auto single = random_factors(200, {4}, rng);
    const auto z = noise_codes(200, 2, rng);
    CHECK_THROWS_AS(z_diff_score(z, single, small_config(), r), MetricUndefinedError);
    CHECK_THROWS_AS(z_var_score(z, single, small_config(), r), MetricUndefinedError);
    CHECK_THROWS_AS(dci_rf_score(z, single, small_config(), r), MetricUndefinedError);
    CHECK_THROWS_AS(dcimig_score(z, single, 20), MetricUndefinedError);
    CHECK_THROWS_AS(jemmig_score(noise_codes(200, 1, rng), v, 20), MetricUndefinedError);

    // A forest on constant codes never splits.
    CHECK_THROWS_AS(dci_rf_score(constant, v, small_config(), r), MetricUndefinedError);

    auto bad = v;
    bad.labels[0] = 9;
    CHECK_THROWS_AS(jemmig_score(noise_codes(200, 2, rng), bad, 20), ArgumentError);
    CHECK_THROWS_AS(jemmig_score(noise_codes(199, 2, rng), v, 20), DimensionError);
    auto inf = noise_codes(200, 2, rng);
    inf.values[3] = INFINITY;
    CHECK_THROWS_AS(dcimig_score(inf, v, 20), ArgumentError);
}

TEST_CASE("equivariance probe") {
    const auto v = exhaustive_factors({6, 5, 3});
    LatentMatrix z(v.rows, 3);
    for (std::size_t i = 0; i < v.rows; ++i)
        for (std::size_t k = 0; k < 3; ++k) z.at(i, k) = v.label(i, k);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto p = equivariance_probe(z, v, k);
        CHECK(p.alignment_ratio == 1.0);
        CHECK(p.dominant_dim == k);
        CHECK(p.pairs == v.rows / v.cardinalities[k] * (v.cardinalities[k] - 1));
        CHECK(p.mean_abs_delta[k] == 1.0);
    }
    CHECK(equivariance_probe(z, v, 0, 2).mean_abs_delta[0] == 2.0);
    CHECK_THROWS_AS(equivariance_probe(z, v, 3), ArgumentError);
    CHECK_THROWS_AS(equivariance_probe(z, v, 0, 6), ArgumentError);
}

TEST_CASE("property: every score lies in [0, 1]") {
    Rng rng(31);
    const auto config = small_config();
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t rows = 150 + rng.below(250);
        const std::size_t factors = 2 + rng.below(3);
        std::vector<std::uint32_t> cards(factors);
        for (auto& c : cards) c = static_cast<std::uint32_t>(2 + rng.below(9));
        const auto v = random_factors(rows, cards, rng);
        const std::size_t dims = 2 + rng.below(5);
        LatentMatrix z(rows, dims);
        const int kind = trial % 4;
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < dims; ++j) {
                double x = rng.normal();
                if (kind == 1) x = v.label(i, j % factors) + 0.1 * x;
                if (kind == 2) x = std::pow(10.0, 3.0 * x);
                if (kind == 3 && j == 0) x = 1.0;
                z.at(i, j) = x;
            }
        }
        for (double s : scores(z, v, config, trial)) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
}

TEST_CASE("property: permuting latent dimensions leaves every score unchanged") {
    Rng rng(41);
    const auto config = small_config();
    for (int trial = 0; trial < 4; ++trial) {
        const auto v = random_factors(500, {8, 6, 3}, rng);
        LatentMatrix z(v.rows, 5);
        for (std::size_t i = 0; i < v.rows; ++i)
            for (std::size_t j = 0; j < 5; ++j)
                z.at(i, j) = (j < 3 ? v.label(i, j) * (0.5 + j) : 0.0) + rng.normal();
        const auto perm = rng.permutation(5);
        const auto a = scores(z, v, config, 9);
        const auto b = scores(permute_columns(z, perm), v, config, 9);
        CHECK(b[0] == a[0]);
        CHECK(b[1] == a[1]);
        // dci sums the same per-row terms in a different order.
        CHECK(b[2] == doctest::Approx(a[2]).epsilon(1e-12));
        CHECK(b[3] == a[3]);
        CHECK(b[4] == a[4]);
    }
}

TEST_CASE("property: increasing affine maps per dimension leave z-var, dci, jemmig and dcimig unchanged") {
    Rng rng(43);
    const auto config = small_config();
    for (int trial = 0; trial < 4; ++trial) {
        const auto v = random_factors(500, {8, 6, 3}, rng);
        LatentMatrix z(v.rows, 4);
        for (std::size_t i = 0; i < v.rows; ++i)
            for (std::size_t j = 0; j < 4; ++j) z.at(i, j) = (j < 3 ? v.label(i, j) : 0.0) + rng.normal();
        auto mapped = z;
        for (std::size_t j = 0; j < 4; ++j) {
            const double a = rng.uniform(0.1, 10.0), b = rng.uniform(-5.0, 5.0);
            for (std::size_t i = 0; i < v.rows; ++i) mapped.at(i, j) = a * z.at(i, j) + b;
        }
        const auto s = scores(z, v, config, 3);
        const auto t = scores(mapped, v, config, 3);
        CHECK(t[1] == s[1]);
        CHECK(t[2] == doctest::Approx(s[2]).epsilon(1e-12));
        CHECK(t[3] == doctest::Approx(s[3]).epsilon(1e-12));
        CHECK(t[4] == doctest::Approx(s[4]).epsilon(1e-12));
    }
}

TEST_CASE("score_latents is deterministic and reports its settings") {
    Rng rng(12);
    const auto v = random_factors(2000, kCards, rng);
    const auto z = identity_codes(v);
    const MetricConfig config;
    const auto a = score_latents(z, v, config, 5);
    const auto b = score_latents(z, v, config, 5);
    CHECK(format_report_text(a) == format_report_text(b));
    CHECK(a.samples == 2000);
    CHECK(a.bins == 20);
    CHECK(a.probes.size() == 4);
    for (double s : {a.z_diff, a.z_var, a.dci_rf, a.jemmig, a.dcimig}) CHECK(s >= 0.9);

    const auto header = report_csv_header(a);
    const auto row = report_csv_row(a);
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
    CHECK(header.find("z_diff") != std::string::npos);
    CHECK(format_report_text(a).find("dcimig: ") != std::string::npos);
}

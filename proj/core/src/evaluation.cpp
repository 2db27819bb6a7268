#include "daelab/evaluation.hpp"

#include <iomanip>
#include <sstream>

#include "daelab/errors.hpp"

namespace daelab {
namespace {

enum : std::uint64_t { kZDiffStream = 0x100, kZVarStream, kDciStream };

std::string fixed(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << v;
    return os.str();
}

std::vector<std::pair<std::string, std::string>> report_fields(const MetricReport& r) {
    std::vector<std::pair<std::string, std::string>> f{
        {"z_diff", fixed(r.z_diff)},
        {"z_var", fixed(r.z_var)},
        {"dci_rf", fixed(r.dci_rf)},
        {"jemmig", fixed(r.jemmig)},
        {"dcimig", fixed(r.dcimig)},
        {"seed", std::to_string(r.seed)},
        {"bins", std::to_string(r.bins)},
        {"samples", std::to_string(r.samples)},
        {"train_points", std::to_string(r.train_points)},
        {"test_points", std::to_string(r.test_points)},
        {"batch_size", std::to_string(r.batch_size)},
        {"variant", r.variant},
        {"model", r.model},
    };
    for (const auto& p : r.probes) {
        const auto name = p.factor < r.factor_names.size() ? r.factor_names[p.factor] : std::to_string(p.factor);
        f.emplace_back("probe_" + name + "_dominant_dim", std::to_string(p.dominant_dim));
        f.emplace_back("probe_" + name + "_alignment_ratio", fixed(p.alignment_ratio));
        f.emplace_back("probe_" + name + "_pairs", std::to_string(p.pairs));
    }
    return f;
}

}  // namespace

MetricReport score_latents(const LatentMatrix& z, const FactorMatrix& v, const MetricConfig& config,
                           std::uint64_t seed) {
    MetricReport r;
    Rng zdiff_rng(seed, kZDiffStream);
    Rng zvar_rng(seed, kZVarStream);
    Rng dci_rng(seed, kDciStream);
    r.z_diff = z_diff_score(z, v, config, zdiff_rng);
    r.z_var = z_var_score(z, v, config, zvar_rng);
    r.dci_rf = dci_rf_score(z, v, config, dci_rng);
    r.jemmig = jemmig_score(z, v, config.bins);
    r.dcimig = dcimig_score(z, v, config.bins);
    r.seed = seed;
    r.bins = config.bins;
    r.samples = z.rows;
    r.train_points = config.train_points;
    r.test_points = config.test_points;
    r.batch_size = config.batch_size;
    for (std::size_t k = 0; k < v.num_factors(); ++k) {
        if (v.cardinalities[k] < 2) continue;
        try {
            r.probes.push_back(equivariance_probe(z, v, k));
        } catch (const ArgumentError&) {
            // Non-exhaustive factor layouts may have no one-step pairs.
        }
    }
    return r;
}

MetricReport evaluate_model(Autoencoder& model, const FactorDataset& dataset, const MetricConfig& config,
                            std::uint64_t seed) {
    if (model.config.input_dim != dataset.input_dim() ||
        (model.config.factor_count != 0 && model.config.factor_count != dataset.num_factors())) {
        throw DimensionError("checkpoint (input_dim " + std::to_string(model.config.input_dim) + ", factors " +
                             std::to_string(model.config.factor_count) + ") is incompatible with dataset (input_dim " +
                             std::to_string(dataset.input_dim()) + ", factors " +
                             std::to_string(dataset.num_factors()) + ")");
    }
    const auto z = encode_latents(model, dataset.images, dataset.size());
    auto report = score_latents(z, FactorMatrix::from_dataset(dataset), config, seed);
    report.variant = std::string(to_string(dataset.variant()));
    report.model = std::string(to_string(model.config.kind));
    for (const auto& s : dataset.specs) report.factor_names.push_back(s.name);
    return report;
}

ProbeReport equivariance_probe(Autoencoder& model, const FactorDataset& dataset, std::size_t k, std::size_t step) {
    const auto z = encode_latents(model, dataset.images, dataset.size());
    return equivariance_probe(z, FactorMatrix::from_dataset(dataset), k, step);
}

std::string format_report_text(const MetricReport& report) {
    std::string out;
    for (const auto& [k, v] : report_fields(report)) out += k + ": " + v + "\n";
    return out;
}

std::string report_csv_header(const MetricReport& report) {
    std::string out;
    for (const auto& [k, v] : report_fields(report)) out += (out.empty() ? "" : ",") + k;
    return out + "\n";
}

std::string report_csv_row(const MetricReport& report) {
    std::string out;
    bool first = true;
    for (const auto& [k, v] : report_fields(report)) {
        out += (first ? "" : ",") + v;
        first = false;
    }
    return out + "\n";
}

}  // namespace daelab

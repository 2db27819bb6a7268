#include <charconv>
#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "daelab/binary_io.hpp"
#include "daelab/checkpoint.hpp"
#include "daelab/cli/cli.hpp"
#include "daelab/errors.hpp"
#include "daelab/evaluation.hpp"
#include "daelab/linalg.hpp"
#include "daelab/training.hpp"

namespace daelab::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string join(const std::vector<double>& values, const char* sep, std::string (*fmt)(double) = num) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? sep : "") + fmt(values[i]);
    return out;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) { return fs::path(p.string() + suffix); }

struct LoadedDataset {
    FactorDataset data;
    std::string checksum;
};

LoadedDataset load_dataset_checked(const fs::path& path) {
    const auto bytes = read_file(path);
    return {parse_dataset(bytes), hex64(fnv1a64(bytes))};
}

// Every option of the subcommand, with defaults expanded.
KeyValues resolved_config(const CLI::App& sub) {
    KeyValues out;
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& name = opt->get_lnames().front();
        if (name == "help") continue;
        std::string value;
        if (opt->count() > 0) {
            const auto results = opt->reduced_results();
            for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
        } else {
            value = opt->get_default_str();
            if (value == "{}") value.clear();
            if (value.size() >= 2 && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
        }
        out.emplace_back("config." + name, value);
    }
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_compatible(const Autoencoder& model, const FactorDataset& dataset) {
    if (model.config.input_dim != dataset.input_dim() ||
        (model.config.factor_count != 0 && model.config.factor_count != dataset.num_factors())) {
        throw DimensionError("checkpoint (input_dim " + std::to_string(model.config.input_dim) + ", factors " +
                             std::to_string(model.config.factor_count) + ") is incompatible with dataset (input_dim " +
                             std::to_string(dataset.input_dim()) + ", factors " +
                             std::to_string(dataset.num_factors()) + ")");
    }
}

// ---- gen-data ---------------------------------------------------------------

struct GenDataArgs {
    std::string variant = "XY";
    std::uint32_t grid = 16;
    std::uint32_t side = 32;
    std::uint32_t radius = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string manifest;
};

void gen_data(const CLI::App& sub, const GenDataArgs& a, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    ToyConfig config;
    config.variant = parse_variant(a.variant);
    config.grid = a.grid;
    config.image_side = a.side;
    config.object_radius = a.radius;
    Rng rng(a.seed, RngStream::data);
    const auto dataset = generate_toy_dataset(config, rng);
    const auto bytes = serialize_dataset(dataset);
    write_file_atomic(a.out, bytes);

    std::string factors;
    for (const auto& spec : dataset.specs) {
        factors += (factors.empty() ? "" : " ") + spec.name + "(" + std::to_string(spec.cardinality) + ")";
    }
    const std::string checksum = hex64(fnv1a64(bytes));
    out << "N: " << dataset.size() << "\n"
        << "image_side: " << dataset.image_side << "\n"
        << "factors: " << factors << "\n"
        << "checksum: " << checksum << "\n";

    KeyValues m{{"command", "gen-data"}};
    const auto cfg = resolved_config(sub);
    m.insert(m.end(), cfg.begin(), cfg.end());
    m.insert(m.end(), {{"dataset_checksum", checksum},
                       {"dataset_rows", std::to_string(dataset.size())},
                       {"dataset_factors", factors},
                       {"wall_clock_seconds", num(seconds_since(t0))},
                       {"artifact.dataset", a.out}});
    write_manifest(a.manifest.empty() ? with_suffix(a.out, ".manifest") : fs::path(a.manifest), m);
}

// ---- pca ----------------------------------------------------------------------

struct PcaArgs {
    std::string dataset;
    std::size_t latent_dim = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::string lambda_out;
};

struct PcaResult {
    SingularSpectrum spectrum;
    std::vector<double> relative;
    LambdaVector lambda;
};

PcaResult run_pca(const FactorDataset& dataset, std::size_t n, double alpha, std::uint64_t seed) {
    Rng rng(seed, RngStream::pca);
    PcaResult r;
    r.spectrum = top_singular_values(std::span<const float>(dataset.images), dataset.size(), dataset.input_dim(), n, rng);
    r.relative = relative_spectrum(r.spectrum);
    r.lambda = compute_lambda(r.spectrum, alpha);
    return r;
}

double resolve_alpha(double alpha, const FactorDataset& dataset) {
    return alpha > 0.0 ? alpha : default_alpha(dataset.variant());
}

void pca(const PcaArgs& a, std::ostream& out) {
    const auto loaded = load_dataset_checked(a.dataset);
    const std::size_t n = a.latent_dim ? a.latent_dim : loaded.data.num_factors();
    const double alpha = resolve_alpha(a.alpha, loaded.data);
    const auto r = run_pca(loaded.data, n, alpha, a.seed);
    out << "S: " << join(r.spectrum.values, " ", fixed4) << "\n"
        << "S_bar: " << join(r.relative, " ", fixed4) << "\n"
        << "alpha: " << num(alpha) << "\n"
        << "lambda: " << join(r.lambda.weights, " ") << "\n";
    if (!a.lambda_out.empty()) {
        write_manifest(a.lambda_out, {{"dataset", a.dataset},
                                      {"dataset_checksum", loaded.checksum},
                                      {"latent_dim", std::to_string(n)},
                                      {"alpha", num(alpha)},
                                      {"singular_values", join(r.spectrum.values, " ")},
                                      {"lambda", join(r.lambda.weights, " ")}});
    }
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        double v = 0.0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
            throw FormatError("bad number '" + token + "' in lambda file", 0);
        }
        out.push_back(v);
    }
    return out;
}

LambdaVector read_lambda_file(const fs::path& path) {
    LambdaVector lambda;
    bool found = false;
    for (const auto& [key, value] : read_manifest(path)) {
        if (key == "lambda") {
            lambda.weights = parse_number_list(value);
            found = true;
        } else if (key == "alpha") {
            lambda.alpha = parse_number_list(value).at(0);
        }
    }
    if (!found) throw FormatError("lambda file " + path.string() + " has no 'lambda' entry", 0);
    return lambda;
}

// ---- train --------------------------------------------------------------------

struct TrainArgs {
    std::string dataset;
    std::string model = "dae";
    std::size_t latent_dim = 0;
    double alpha = 0.0;
    std::vector<double> lambda;
    std::string lambda_file;
    double beta = 0.0;
    std::size_t epochs = 100;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    std::string loss = "mse";
    std::vector<std::size_t> hidden{256, 64};
    std::string out;
    std::string loss_log;
    std::string manifest;
};

void train(const CLI::App& sub, const TrainArgs& a, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto loaded = load_dataset_checked(a.dataset);
    const auto& dataset = loaded.data;

    ModelConfig config;
    config.kind = parse_model_kind(a.model);
    config.loss_kind = parse_loss_kind(a.loss);
    config.input_dim = dataset.input_dim();
    config.latent_dim = a.latent_dim ? a.latent_dim : dataset.num_factors();
    config.hidden_sizes = a.hidden;
    config.factor_count = static_cast<std::uint32_t>(dataset.num_factors());

    std::string lambda_source;
    if (config.kind == ModelKind::dae) {
        config.alpha = resolve_alpha(a.alpha, dataset);
        if (!a.lambda.empty()) {
            config.lambda.weights = a.lambda;
            config.lambda.alpha = config.alpha;
            lambda_source = "flag";
        } else if (!a.lambda_file.empty()) {
            config.lambda = read_lambda_file(a.lambda_file);
            if (config.lambda.alpha > 0.0) config.alpha = config.lambda.alpha;
            lambda_source = "file";
        } else {
            config.lambda = run_pca(dataset, config.latent_dim, config.alpha, a.seed).lambda;
            lambda_source = "pca";
        }
        if (config.lambda.size() != config.latent_dim) {
            throw ArgumentError("lambda has " + std::to_string(config.lambda.size()) + " entries but latent_dim is " +
                                std::to_string(config.latent_dim));
        }
    }
    if (config.kind == ModelKind::beta_vae) config.beta = a.beta > 0.0 ? a.beta : default_beta(dataset.variant());
    if (config.kind == ModelKind::vae) config.beta = 1.0;
    config.validate();

    auto model = make_model(config, a.seed);
    TrainOptions options;
    options.epochs = a.epochs;
    options.batch_size = a.batch_size;
    options.learning_rate = a.learning_rate;
    options.seed = a.seed;
    const auto log = train_model(model, dataset.images, dataset.size(), options);

    save_checkpoint(model, a.out);
    const fs::path loss_path = a.loss_log.empty() ? with_suffix(a.out, ".loss.csv") : fs::path(a.loss_log);
    std::string csv = "epoch,mean_loss\n";
    for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) {
        csv += std::to_string(e + 1) + "," + num(log.epoch_loss[e]) + "\n";
    }
    write_text_atomic(loss_path, csv);

    const double final_loss = log.epoch_loss.empty() ? 0.0 : log.epoch_loss.back();
    out << "final_loss: " << num(final_loss) << "\n";
    if (config.kind == ModelKind::dae) out << "lambda: " << join(config.lambda.weights, " ") << "\n";

    KeyValues m{{"command", "train"}};
    const auto cfg = resolved_config(sub);
    m.insert(m.end(), cfg.begin(), cfg.end());
    m.emplace_back("resolved.model", std::string(to_string(config.kind)));
    m.emplace_back("resolved.latent_dim", std::to_string(config.latent_dim));
    if (config.kind == ModelKind::dae) {
        m.emplace_back("resolved.alpha", num(config.alpha));
        m.emplace_back("resolved.lambda", join(config.lambda.weights, " "));
        m.emplace_back("resolved.lambda_source", lambda_source);
    }
    if (config.is_vae()) m.emplace_back("resolved.beta", num(config.beta));
    m.insert(m.end(), {{"dataset_checksum", loaded.checksum},
                       {"final_loss", num(final_loss)},
                       {"wall_clock_seconds", num(seconds_since(t0))},
                       {"artifact.checkpoint", a.out},
                       {"artifact.loss_log", loss_path.string()}});
    write_manifest(a.manifest.empty() ? with_suffix(a.out, ".manifest") : fs::path(a.manifest), m);
}

// ---- eval ---------------------------------------------------------------------

struct EvalArgs {
    std::string checkpoint;
    std::string dataset;
    std::uint64_t seed = 0;
    MetricConfig metrics;
    std::string out;
    std::string csv;
    std::string manifest;
};

LatentSource& eval_latent_source() {
    static LatentSource source;
    return source;
}

void eval(const CLI::App& sub, const EvalArgs& a, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    auto model = load_checkpoint(a.checkpoint);
    const auto loaded = load_dataset_checked(a.dataset);
    MetricReport report;
    if (const auto& source = eval_latent_source()) {
        check_compatible(model, loaded.data);
        report = score_latents(source(model, loaded.data), FactorMatrix::from_dataset(loaded.data), a.metrics, a.seed);
        report.variant = std::string(to_string(loaded.data.variant()));
        report.model = std::string(to_string(model.config.kind));
        for (const auto& spec : loaded.data.specs) report.factor_names.push_back(spec.name);
    } else {
        report = evaluate_model(model, loaded.data, a.metrics, a.seed);
    }

    const std::string text = format_report_text(report);
    const fs::path text_path = a.out.empty() ? with_suffix(a.checkpoint, ".report.txt") : fs::path(a.out);
    const fs::path csv_path = a.csv.empty() ? fs::path(text_path).replace_extension(".csv") : fs::path(a.csv);
    write_text_atomic(text_path, text);
    write_text_atomic(csv_path, report_csv_header(report) + report_csv_row(report));
    out << text;

    KeyValues m{{"command", "eval"}};
    const auto cfg = resolved_config(sub);
    m.insert(m.end(), cfg.begin(), cfg.end());
    m.emplace_back("dataset_checksum", loaded.checksum);
    m.emplace_back("checkpoint_checksum", hex64(fnv1a64(read_file(a.checkpoint))));
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto colon = line.find(": ");
        if (colon != std::string::npos) m.emplace_back("metric." + line.substr(0, colon), line.substr(colon + 2));
    }
    m.insert(m.end(), {{"wall_clock_seconds", num(seconds_since(t0))},
                       {"artifact.report", text_path.string()},
                       {"artifact.report_csv", csv_path.string()}});
    write_manifest(a.manifest.empty() ? with_suffix(text_path, ".manifest") : fs::path(a.manifest), m);
}

// ---- traverse -----------------------------------------------------------------

struct TraverseArgs {
    std::string checkpoint;
    std::string dataset;
    std::size_t dim = 0;
    std::size_t steps = 8;
    std::string out;
    std::string manifest;
};

void traverse(const CLI::App& sub, const TraverseArgs& a, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    auto model = load_checkpoint(a.checkpoint);
    if (a.dim >= model.config.latent_dim) {
        throw ArgumentError("--dim " + std::to_string(a.dim) + " out of range (n = " +
                            std::to_string(model.config.latent_dim) + ")");
    }
    const auto loaded = load_dataset_checked(a.dataset);
    check_compatible(model, loaded.data);
    const auto z = encode_latents(model, loaded.data.images, loaded.data.size());
    const auto base = median_codes(z);
    const auto values = traversal_values(model, z, a.dim, a.steps);
    const auto frames = decode_traversal(model, base, a.dim, values);
    const std::size_t side = loaded.data.image_side;
    const auto strip = tile_frames(frames, values.size(), side);
    write_text_atomic(a.out, encode_pgm(values.size() * side, side, strip));
    out << "frames: " << values.size() << "\n"
        << "codes: " << join(values, " ") << "\n";

    KeyValues m{{"command", "traverse"}};
    const auto cfg = resolved_config(sub);
    m.insert(m.end(), cfg.begin(), cfg.end());
    m.insert(m.end(), {{"dataset_checksum", loaded.checksum},
                       {"median_code", join(base, " ")},
                       {"traversal_codes", join(values, " ")},
                       {"wall_clock_seconds", num(seconds_since(t0))},
                       {"artifact.image", a.out}});
    write_manifest(a.manifest.empty() ? with_suffix(a.out, ".manifest") : fs::path(a.manifest), m);
}

// ---- scatter ------------------------------------------------------------------

struct ScatterArgs {
    std::string checkpoint;
    std::string dataset;
    std::vector<std::size_t> dims{0, 1};
    std::size_t grid = 0;
    std::string out;
    std::string manifest;
};

void scatter(const CLI::App& sub, const ScatterArgs& a, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    auto model = load_checkpoint(a.checkpoint);
    const std::size_t n = model.config.latent_dim;
    if (a.dims.size() != 2) throw ArgumentError("--dims takes exactly two dimensions");
    for (std::size_t d : a.dims) {
        if (d >= n) throw ArgumentError("--dims entry " + std::to_string(d) + " out of range (n = " + std::to_string(n) + ")");
    }
    const auto loaded = load_dataset_checked(a.dataset);
    const auto& dataset = loaded.data;
    check_compatible(model, dataset);
    const auto z = encode_latents(model, dataset.images, dataset.size());

    std::string csv = "z_" + std::to_string(a.dims[0]) + ",z_" + std::to_string(a.dims[1]);
    for (const auto& spec : dataset.specs) csv += "," + spec.name;
    csv += "\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        csv += num(z.at(i, a.dims[0])) + "," + num(z.at(i, a.dims[1]));
        for (std::size_t k = 0; k < dataset.num_factors(); ++k) csv += "," + std::to_string(dataset.factor(i, k));
        csv += "\n";
    }
    write_text_atomic(a.out, csv);

    const std::size_t grid = a.grid ? a.grid : dataset.specs.at(0).cardinality;
    const std::size_t cells = occupied_grid_cells(z.column(a.dims[0]), z.column(a.dims[1]), grid);
    out << "rows: " << dataset.size() << "\n"
        << "grid_cells: " << cells << " / " << grid * grid << "\n";

    KeyValues m{{"command", "scatter"}};
    const auto cfg = resolved_config(sub);
    m.insert(m.end(), cfg.begin(), cfg.end());
    m.insert(m.end(), {{"dataset_checksum", loaded.checksum},
                       {"rows", std::to_string(dataset.size())},
                       {"grid_cells", std::to_string(cells)},
                       {"wall_clock_seconds", num(seconds_since(t0))},
                       {"artifact.csv", a.out}});
    write_manifest(a.manifest.empty() ? with_suffix(a.out, ".manifest") : fs::path(a.manifest), m);
}

}  // namespace

void set_eval_latent_source(LatentSource source) { eval_latent_source() = std::move(source); }

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const IoError*>(&error)) return exit_io;
    if (dynamic_cast<const DegenerateError*>(&error)) return exit_numerical;
    if (dynamic_cast<const ArgumentError*>(&error) || dynamic_cast<const DimensionError*>(&error) ||
        dynamic_cast<const SizeError*>(&error) || dynamic_cast<const EmptyInputError*>(&error) ||
        dynamic_cast<const BatchTooSmallError*>(&error)) {
        return exit_usage;
    }
    if (dynamic_cast<const std::filesystem::filesystem_error*>(&error)) return exit_io;
    return exit_numerical;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Disentangling autoencoder toolkit"};
    app.name("daelab");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    const std::string config_help = "key=value file; command-line flags override its values";

    GenDataArgs g;
    auto* gen = app.add_subcommand("gen-data", "Generate a toy factor dataset (FDS1)");
    gen->add_option("--variant", g.variant, "XY, XYC, XYS or XYCS");
    gen->add_option("--grid", g.grid, "Positions per axis");
    gen->add_option("--side", g.side, "Image side in pixels");
    gen->add_option("--radius", g.radius, "Object radius (0: side/8)");
    gen->add_option("--seed", g.seed);
    gen->add_option("--out", g.out, "Dataset file")->required();
    gen->add_option("--manifest", g.manifest, "Manifest path (default: <out>.manifest)");

    PcaArgs p;
    auto* pca_cmd = app.add_subcommand("pca", "Estimate the latent scale vector from the data spectrum");
    pca_cmd->add_option("--dataset", p.dataset)->required();
    pca_cmd->add_option("--latent-dim", p.latent_dim, "Latent size (0: number of factors)");
    pca_cmd->add_option("--alpha", p.alpha, "Scale for minor factors (0: variant default)");
    pca_cmd->add_option("--seed", p.seed);
    pca_cmd->add_option("--lambda-out", p.lambda_out, "Write the result for train --lambda-file");

    TrainArgs t;
    auto* train_cmd = app.add_subcommand("train", "Train a DAE or a baseline autoencoder");
    train_cmd->add_option("--dataset", t.dataset)->required();
    train_cmd->add_option("--model", t.model, "dae, ae, vae or beta_vae");
    train_cmd->add_option("--latent-dim", t.latent_dim, "Latent size (0: number of factors)");
    train_cmd->add_option("--alpha", t.alpha, "Scale for minor factors (0: variant default)");
    train_cmd->add_option("--lambda", t.lambda, "Explicit scale vector, comma separated")->delimiter(',');
    train_cmd->add_option("--lambda-file", t.lambda_file, "Scale vector written by pca --lambda-out");
    train_cmd->add_option("--beta", t.beta, "KL weight for beta_vae (0: variant default)");
    train_cmd->add_option("--epochs", t.epochs);
    train_cmd->add_option("--batch-size", t.batch_size);
    train_cmd->add_option("--learning-rate", t.learning_rate);
    train_cmd->add_option("--seed", t.seed);
    train_cmd->add_option("--loss", t.loss, "mse or bce");
    train_cmd->add_option("--hidden", t.hidden, "Hidden layer widths, comma separated")->delimiter(',');
    train_cmd->add_option("--out", t.out, "Checkpoint file")->required();
    train_cmd->add_option("--loss-log", t.loss_log, "Loss CSV (default: <out>.loss.csv)");
    train_cmd->add_option("--manifest", t.manifest, "Manifest path (default: <out>.manifest)");

    EvalArgs e;
    auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a dataset");
    eval_cmd->add_option("--checkpoint", e.checkpoint)->required();
    eval_cmd->add_option("--dataset", e.dataset)->required();
    eval_cmd->add_option("--seed", e.seed);
    eval_cmd->add_option("--bins", e.metrics.bins);
    eval_cmd->add_option("--train-points", e.metrics.train_points);
    eval_cmd->add_option("--test-points", e.metrics.test_points);
    eval_cmd->add_option("--batch-size", e.metrics.batch_size);
    eval_cmd->add_option("--classifier-epochs", e.metrics.classifier_epochs);
    eval_cmd->add_option("--trees", e.metrics.forest.n_trees);
    eval_cmd->add_option("--out", e.out, "Report text (default: <checkpoint>.report.txt)");
    eval_cmd->add_option("--csv", e.csv, "Report CSV row (default: report path with .csv)");
    eval_cmd->add_option("--manifest", e.manifest, "Manifest path (default: <report>.manifest)");

    TraverseArgs v;
    auto* trav = app.add_subcommand("traverse", "Decode a sweep along one latent dimension into a PGM strip");
    trav->add_option("--checkpoint", v.checkpoint)->required();
    trav->add_option("--dataset", v.dataset, "Dataset supplying the median code")->required();
    trav->add_option("--dim", v.dim);
    trav->add_option("--steps", v.steps);
    trav->add_option("--out", v.out, "PGM file")->required();
    trav->add_option("--manifest", v.manifest, "Manifest path (default: <out>.manifest)");

    ScatterArgs s;
    auto* scat = app.add_subcommand("scatter", "Export two latent dimensions with factor labels as CSV");
    scat->add_option("--checkpoint", s.checkpoint)->required();
    scat->add_option("--dataset", s.dataset)->required();
    scat->add_option("--dims", s.dims, "Two latent dimensions, comma separated")->delimiter(',')->expected(2);
    scat->add_option("--grid", s.grid, "Grid size for the cell count (0: cardinality of the first factor)");
    scat->add_option("--out", s.out, "CSV file")->required();
    scat->add_option("--manifest", s.manifest, "Manifest path (default: <out>.manifest)");

    // Consumed by expand_config_args before parsing; declared here for --help.
    std::string config_path;
    for (auto* sub : {gen, pca_cmd, train_cmd, eval_cmd, trav, scat}) sub->add_option("--config", config_path, config_help);

    try {
        const auto args = expand_config_args(raw_args);
        std::vector<const char*> argv;
        for (const auto& arg : args) argv.push_back(arg.c_str());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::ParseError& pe) {
            const int code = app.exit(pe, out, err);
            return code == 0 ? exit_ok : exit_usage;
        }
        if (gen->parsed()) gen_data(*gen, g, out);
        else if (pca_cmd->parsed()) pca(p, out);
        else if (train_cmd->parsed()) train(*train_cmd, t, out);
        else if (eval_cmd->parsed()) eval(*eval_cmd, e, out);
        else if (trav->parsed()) traverse(*trav, v, out);
        else if (scat->parsed()) scatter(*scat, s, out);
        return exit_ok;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return exit_code_for(ex);
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace daelab::cli

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "daelab/datasets.hpp"
#include "daelab/model.hpp"

namespace daelab::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_io = 1,
    exit_usage = 2,
    exit_numerical = 3,
};

// Entry point of the `daelab` tool. Never throws; failures are reported on
// `err` and mapped to an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Test hook: when set, `eval` scores the codes it returns instead of encoding
// the dataset with the checkpoint. Pass an empty function to restore.
using LatentSource = std::function<LatentMatrix(Autoencoder&, const FactorDataset&)>;
void set_eval_latent_source(LatentSource source);

// Exit status for an exception escaping a command.
int exit_code_for(const std::exception& error);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// `key = value` lines; blank lines and lines starting with '#' are skipped.
// Throws ArgumentError on a line without '=' or with an empty key.
KeyValues parse_config_text(std::string_view text);

// Splices the contents of every `--config FILE` into the argument list right
// after the subcommand, so flags given on the command line take precedence.
// The --config flags themselves are kept so the path is recorded.
// Throws IoError if a config file cannot be read.
std::vector<std::string> expand_config_args(const std::vector<std::string>& args);

// Manifest as "key: value" lines, written atomically.
void write_manifest(const std::filesystem::path& path, const KeyValues& entries);
KeyValues read_manifest(const std::filesystem::path& path);

// Binary PGM (P5, maxval 255); values are clamped to [0, 1].
std::string encode_pgm(std::size_t width, std::size_t height, std::span<const double> pixels);

// Default α for the toy variants when none is given.
double default_alpha(ToyVariant variant);
// Default β for the β-VAE baseline on the toy variants.
double default_beta(ToyVariant variant);

// Column-wise median of eval-mode latents.
std::vector<double> median_codes(const LatentMatrix& z);

// Code values visited by a traversal of `steps` frames along dimension j.
// DAE: s·w_j/steps over [0, w_j); other kinds: evenly over the observed
// range. A single step keeps the median.
std::vector<double> traversal_values(const Autoencoder& model, const LatentMatrix& z, std::size_t j,
                                     std::size_t steps);

// Decodes `base` with dimension j replaced by each value in turn; returns
// frames.size() × input_dim pixel values.
std::vector<double> decode_traversal(Autoencoder& model, std::span<const double> base, std::size_t j,
                                     std::span<const double> values);

// Tiles square frames left to right into one side × (count·side) image.
std::vector<double> tile_frames(std::span<const double> frames, std::size_t count, std::size_t side);

// Distinct (round(a·grid), round(b·grid)) cells after min-max normalising each
// column to [0, 1].
std::size_t occupied_grid_cells(std::span<const double> a, std::span<const double> b, std::size_t grid);

}  // namespace daelab::cli

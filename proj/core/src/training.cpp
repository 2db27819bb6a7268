#include "daelab/training.hpp"

#include "daelab/adam.hpp"
#include "daelab/errors.hpp"

namespace daelab {

TrainingLog train_model(Autoencoder& model, std::span<const float> images, std::size_t rows,
                        const TrainOptions& options) {
    if (options.batch_size < 2) {
        throw ArgumentError("batch size must be at least 2 (batch min-max and interpolation need two rows)");
    }
    if (rows == 0) throw ArgumentError("cannot train on an empty dataset");
    const std::size_t d = model.config.input_dim;
    if (images.size() != rows * d) {
        throw DimensionError("train: " + std::to_string(images.size()) + " values for " + std::to_string(rows) +
                             " rows of width " + std::to_string(d));
    }

    Rng shuffle_rng(options.seed, RngStream::shuffle);
    Rng noise_rng(options.seed, RngStream::noise);
    AdamState adam(AdamOptions{.learning_rate = options.learning_rate});
    const auto params = model.parameters();

    TrainingLog log;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        const auto order = shuffle_rng.permutation(rows);
        double total = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < rows; start += options.batch_size) {
            const std::size_t stop = std::min(rows, start + options.batch_size);
            if (stop - start < 2) break;
            const std::span<const std::size_t> idx(order.data() + start, stop - start);
            Tape tape;
            const Var x = tape.constant(rows_to_tensor(images, d, idx));
            const auto result = forward(tape, model, x, noise_rng, Mode::train);
            const Var loss = model_loss(model, result, x);
            tape.backward(loss);
            adam_step(params, adam);
            total += loss.value().item();
            ++batches;
        }
        log.epoch_loss.push_back(batches ? total / static_cast<double>(batches) : 0.0);
    }
    return log;
}

}  // namespace daelab

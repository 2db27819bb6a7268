#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "daelab/model.hpp"

namespace daelab {

struct TrainOptions {
    std::size_t epochs = 100;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

struct TrainingLog {
    // Mean minibatch loss of each epoch.
    std::vector<double> epoch_loss;
};

// Minibatch Adam on the model's training loss (reconstruction only for DAE
// and AE). Rows are reshuffled every epoch from the seed's shuffle stream; a
// trailing batch with fewer than two rows is dropped. Throws ArgumentError
// for batch_size < 2 or an empty dataset.
TrainingLog train_model(Autoencoder& model, std::span<const float> images, std::size_t rows,
                        const TrainOptions& options);

}  // namespace daelab

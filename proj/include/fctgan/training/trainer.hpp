#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fctgan/encoding/condvec.hpp"
#include "fctgan/gan/networks.hpp"
#include "fctgan/numerics/adam.hpp"

namespace fctgan {

struct TrainConfig {
  std::size_t epochs = 12;
  std::size_t batch_size = 256;
  double lr_g = 2e-4;
  double lr_d = 2e-4;
  double lr_aux = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double lambda_gp = 10.0;
  std::size_t n_critic = 5;
  double w_down = 1.0;
  double w_info = 1.0;
  double w_cond = 1.0;
  std::uint64_t seed = 0;
  bool fp64 = false;
  VgmOptions vgm;
  GanConfig net;  // tau lives here
};

nlohmann::json train_config_to_json(const TrainConfig& c);
/// Missing keys keep their defaults. Throws std::invalid_argument on bad values.
TrainConfig train_config_from_json(const nlohmann::json& j);

struct StepRecord {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double d_loss = 0;
  double wasserstein = 0;  // E[D(fake)] - E[D(real)], last critic step
  double gp = 0;
  double g_loss = 0;
  double adversarial = 0;  // -E[D(fake)]
  double info = 0;
  double cond = 0;
  double downstream = 0;
  double aux_loss = 0;  // aux fitted on real rows
};

nlohmann::json step_record_to_json(const StepRecord& r);

struct TrainHistory {
  std::vector<StepRecord> steps;
};

/// Fitted encoders, networks, and optimizer state.
template <typename T>
struct Model {
  TrainConfig config;
  DataTransformer transformer;
  CondSampler sampler;
  ResolutionPlan plan;
  Generator<T> g;
  Discriminator<T> d;
  std::optional<AuxLayout> aux_layout;
  std::optional<AuxPredictor<T>> aux;
  AdamState<T> adam_g;
  AdamState<T> adam_d;
  AdamState<T> adam_aux;
  std::string rng_state;
  std::size_t epoch = 0;
  std::size_t step = 0;
  std::size_t train_rows = 0;
};

using AnyModel = std::variant<Model<float>, Model<double>>;

struct TrainHooks {
  std::function<void(const StepRecord&)> on_step;
  /// Called after every finished epoch with the current model.
  std::function<void(std::size_t epoch, const AnyModel&)> on_epoch;
};

struct TrainResult {
  AnyModel model;
  TrainHistory history;
};

/// Fits the encoders on `data`, then runs the conditional WGAN-GP loop.
/// Throws NumericalFault (message names the step) when a loss or gradient is
/// not finite.
TrainResult train(const Table& data, const TableSchema& schema, const TrainConfig& config,
                  const TrainHooks& hooks = {});

/// Decoded synthetic rows. Each row gets its own noise and a condition drawn
/// from the training frequencies, unless `fixed` pins one condition for all.
Table sample(const AnyModel& model, std::size_t n, Rng& rng, std::optional<CondVector> fixed = std::nullopt);

/// Activated encoded rows [n, d_enc] produced by the same procedure.
template <typename T>
Tensor<T> sample_encoded(const Model<T>& model, std::size_t n, Rng& rng, std::optional<CondVector> fixed = {});

const DataTransformer& model_transformer(const AnyModel& model);
const CondSampler& model_sampler(const AnyModel& model);
const TrainConfig& model_config(const AnyModel& model);
std::size_t model_train_rows(const AnyModel& model);

// Single optimization steps, exposed for tests.

struct CriticStep {
  double d_loss = 0;
  double wasserstein = 0;
  double gp = 0;
};

struct GeneratorStep {
  double g_loss = 0;
  double adversarial = 0;
  double info = 0;
  double cond = 0;
  double downstream = 0;
  double aux_loss = 0;
};

/// A batch of conditions with matching real rows.
template <typename T>
struct Batch {
  std::vector<CondVector> conds;
  Tensor<T> cond;  // [B, d_cv]
  Tensor<T> real;  // [B, d_enc]
};

template <typename T>
Batch<T> draw_batch(const Model<T>& model, const Matrix& encoded, std::size_t size, Rng& rng);

template <typename T>
CriticStep d_step(Model<T>& model, const Batch<T>& batch, Rng& rng);

template <typename T>
GeneratorStep g_step(Model<T>& model, const Batch<T>& batch, Rng& rng);

/// Encoders fitted and networks initialized, no training.
template <typename T>
Model<T> init_model(const Table& data, const TableSchema& schema, const TrainConfig& config, Rng& rng,
                    Matrix* encoded = nullptr);

}  // namespace fctgan

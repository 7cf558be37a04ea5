#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "fctgan/encoding/transformer.hpp"
#include "fctgan/fnb/fnb.hpp"

namespace fctgan {

struct GanConfig {
  std::size_t noise_dim = 100;
  std::size_t h0 = 4;
  std::size_t c0 = 0;  // 0: 256, or 4^s when that is larger
  std::size_t expansion = 4;
  bool final_fnb = false;  // extra generator FNB at full resolution; forced on when s == 0
  ResidualWiring wiring = ResidualWiring::single;
  double gen_dropout = 0.0;
  double disc_dropout = 0.1;
  double head_dropout = 0.1;
  std::size_t disc_kernel = 8;
  std::size_t disc_dim = 256;
  std::size_t disc_blocks = 4;
  std::size_t aux_hidden = 256;
  double tau = 0.2;
};

nlohmann::json gan_config_to_json(const GanConfig& c);
GanConfig gan_config_from_json(const nlohmann::json& j);

struct ResolutionPlan {
  std::size_t side = 0;    // R
  std::size_t stages = 0;  // s, with R = h0 * 2^s
  std::size_t d_enc = 0;
  std::size_t d_cv = 0;
  std::size_t gen_pad = 0;   // R^2 - d_enc
  std::size_t disc_pad = 0;  // R^2 - (d_enc + d_cv)
};

/// Smallest R = h0 * 2^s with R^2 >= d_enc + d_cv.
ResolutionPlan plan_resolution(std::size_t d_enc, std::size_t d_cv, std::size_t h0 = 4);

/// Generator channel width at stage 0.
std::size_t resolve_c0(const GanConfig& cfg, const ResolutionPlan& plan);
/// Discriminator patch size: min(kernel, R / 2), at least 1.
std::size_t resolve_disc_kernel(const GanConfig& cfg, const ResolutionPlan& plan);

template <typename T>
struct Generator {
  ResolutionPlan plan;
  std::size_t c0 = 0;
  Linear<T> embed;                  // noise + d_cv -> h0 * h0 * c0
  std::vector<FnbParams<T>> stages;  // one per upscaling stage
  std::vector<FnbParams<T>> final;   // zero or one block at full resolution
  Linear<T> to_pixel;               // C_final -> 1 per position
  Linear<T> head;                   // R^2 -> d_enc

  static Generator init(const ResolutionPlan& plan, const GanConfig& cfg, Rng& rng);
  std::vector<Tensor<T>*> parameters();

  /// Raw output [B, d_enc] for noise [B, noise_dim] and condvecs [B, d_cv].
  /// `trace`, when given, receives the activation shape after every stage.
  Tensor<T> forward(const Tensor<T>& noise, const Tensor<T>& cond, const GanConfig& cfg, bool training, Rng& rng,
                    std::vector<Shape>* trace = nullptr) const;
};

template <typename T>
struct Discriminator {
  ResolutionPlan plan;
  PatchEmbedParams<T> patch;
  std::vector<FnbParams<T>> blocks;
  LayerNorm<T> norm;
  Linear<T> head;  // tokens * C1 -> 1

  static Discriminator init(const ResolutionPlan& plan, const GanConfig& cfg, Rng& rng);
  std::vector<Tensor<T>*> parameters();

  /// Critic values [B, 1] for encoded rows [B, d_enc] and condvecs [B, d_cv].
  Tensor<T> forward(const Tensor<T>& x_enc, const Tensor<T>& cond, const GanConfig& cfg, bool training, Rng& rng,
                    std::vector<Shape>* trace = nullptr) const;
};

template <typename T>
struct AuxPredictor {
  Linear<T> l1;
  Linear<T> l2;
  Linear<T> out;

  static AuxPredictor init(std::size_t in, std::size_t out_width, const GanConfig& cfg, Rng& rng);
  std::vector<Tensor<T>*> parameters();
  Tensor<T> forward(const Tensor<T>& features) const;
};

/// Column ranges of the encoded row that feed the auxiliary predictor and
/// the target span it predicts.
struct AuxLayout {
  std::vector<ops::Segment> features;  // encoded row minus the target span
  ops::Segment target;
  Task task = Task::none;
  ColumnKind target_kind = ColumnKind::categorical;
  std::size_t feature_width = 0;
  std::size_t output_width = 0;  // vocabulary size, or 1

  // Regression targets are soft-decoded, then standardized:
  // (sum_j p_j value_j + alpha sum_k p_k 4 sigma_k - center) / scale, where
  // value_j is the special value or mode mean of one-hot slot j.
  std::vector<double> slot_values;
  std::vector<double> slot_alpha_scale;
  double center = 0.0;
  double scale = 1.0;
};

/// Throws std::logic_error when the schema has no target column.
AuxLayout make_aux_layout(const DataTransformer& transformer);

/// Concatenated feature columns [B, feature_width].
template <typename T>
Tensor<T> aux_features(const Tensor<T>& rows, const AuxLayout& layout);

/// Prediction target per row: class probabilities [B, K] taken from the
/// target's one-hot segment, or the standardized value [B, 1].
template <typename T>
Tensor<T> aux_target(const Tensor<T>& rows, const AuxLayout& layout);

/// tanh on scalar segments, Gumbel-softmax with temperature tau on one-hot
/// segments. Gumbel noise is drawn from `rng`.
template <typename T>
Tensor<T> apply_output_activations(const Tensor<T>& raw, const EncodedLayout& layout, double tau, Rng& rng);

/// Copies every parameter tensor of `net` into `tape` as a watched leaf.
template <typename Net, typename T>
Net bind_parameters(const Net& net, Tape<T>& tape) {
  Net live = net;
  for (auto* p : live.parameters()) *p = tape.watch(*p);
  return live;
}

}  // namespace fctgan

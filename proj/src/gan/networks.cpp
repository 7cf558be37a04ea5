#include "fctgan/gan/networks.hpp"

#include <cmath>
#include <stdexcept>

namespace fctgan {

nlohmann::json gan_config_to_json(const GanConfig& c) {
  return nlohmann::json{{"noise_dim", c.noise_dim},
                        {"h0", c.h0},
                        {"c0", c.c0},
                        {"expansion", c.expansion},
                        {"final_fnb", c.final_fnb},
                        {"wiring", c.wiring == ResidualWiring::single ? "single" : "dual"},
                        {"gen_dropout", c.gen_dropout},
                        {"disc_dropout", c.disc_dropout},
                        {"head_dropout", c.head_dropout},
                        {"disc_kernel", c.disc_kernel},
                        {"disc_dim", c.disc_dim},
                        {"disc_blocks", c.disc_blocks},
                        {"aux_hidden", c.aux_hidden},
                        {"tau", c.tau}};
}

GanConfig gan_config_from_json(const nlohmann::json& j) {
  GanConfig c;
  c.noise_dim = j.value("noise_dim", c.noise_dim);
  c.h0 = j.value("h0", c.h0);
  c.c0 = j.value("c0", c.c0);
  c.expansion = j.value("expansion", c.expansion);
  c.final_fnb = j.value("final_fnb", c.final_fnb);
  const auto wiring = j.value("wiring", std::string("single"));
  if (wiring != "single" && wiring != "dual") throw std::invalid_argument("wiring must be 'single' or 'dual'");
  c.wiring = wiring == "single" ? ResidualWiring::single : ResidualWiring::dual;
  c.gen_dropout = j.value("gen_dropout", c.gen_dropout);
  c.disc_dropout = j.value("disc_dropout", c.disc_dropout);
  c.head_dropout = j.value("head_dropout", c.head_dropout);
  c.disc_kernel = j.value("disc_kernel", c.disc_kernel);
  c.disc_dim = j.value("disc_dim", c.disc_dim);
  c.disc_blocks = j.value("disc_blocks", c.disc_blocks);
  c.aux_hidden = j.value("aux_hidden", c.aux_hidden);
  c.tau = j.value("tau", c.tau);
  if (c.h0 == 0 || c.noise_dim == 0 || c.expansion == 0 || c.disc_dim == 0 || c.disc_kernel == 0 || c.tau <= 0) {
    throw std::invalid_argument("network sizes and tau must be positive");
  }
  return c;
}

ResolutionPlan plan_resolution(std::size_t d_enc, std::size_t d_cv, std::size_t h0) {
  if (d_enc == 0) throw std::invalid_argument("plan_resolution: d_enc must be at least 1");
  if (h0 == 0) throw std::invalid_argument("plan_resolution: h0 must be positive");
  ResolutionPlan p;
  p.d_enc = d_enc;
  p.d_cv = d_cv;
  p.side = h0;
  while (p.side * p.side < d_enc + d_cv) {
    p.side *= 2;
    ++p.stages;
  }
  p.gen_pad = p.side * p.side - d_enc;
  p.disc_pad = p.side * p.side - (d_enc + d_cv);
  return p;
}

std::size_t resolve_c0(const GanConfig& cfg, const ResolutionPlan& plan) {
  std::size_t need = 1;
  for (std::size_t i = 0; i < plan.stages; ++i) need *= 4;
  if (cfg.c0 != 0) {
    if (cfg.c0 % need != 0) {
      throw std::invalid_argument("c0 = " + std::to_string(cfg.c0) + " is not divisible by 4^" +
                                  std::to_string(plan.stages));
    }
    return cfg.c0;
  }
  return std::max<std::size_t>(256, need);
}

std::size_t resolve_disc_kernel(const GanConfig& cfg, const ResolutionPlan& plan) {
  return std::max<std::size_t>(1, std::min(cfg.disc_kernel, plan.side / 2));
}

namespace {

template <typename T>
void append(std::vector<Tensor<T>*>& out, std::vector<Tensor<T>*> more) {
  out.insert(out.end(), more.begin(), more.end());
}

template <typename T>
Tensor<T> gumbel_noise(const Shape& shape, const std::vector<bool>& onehot_col, Rng& rng) {
  std::vector<T> g(numel(shape), T(0));
  const std::size_t d = shape.back();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!onehot_col[i % d]) continue;
    const double u = std::max(rng.uniform(), 1e-20);
    g[i] = static_cast<T>(-std::log(-std::log(u) + 1e-20));
  }
  return Tensor<T>(shape, std::move(g));
}

}  // namespace

template <typename T>
Generator<T> Generator<T>::init(const ResolutionPlan& plan, const GanConfig& cfg, Rng& rng) {
  Generator g;
  g.plan = plan;
  g.c0 = resolve_c0(cfg, plan);
  g.embed = Linear<T>::init(cfg.noise_dim + plan.d_cv, cfg.h0 * cfg.h0 * g.c0, rng);
  std::size_t side = cfg.h0, ch = g.c0;
  for (std::size_t i = 0; i < plan.stages; ++i) {
    g.stages.push_back(FnbParams<T>::init(side, side, ch, cfg.expansion, rng));
    side *= 2;
    ch /= 4;
  }
  if (cfg.final_fnb || plan.stages == 0) g.final.push_back(FnbParams<T>::init(side, side, ch, cfg.expansion, rng));
  g.to_pixel = Linear<T>::init(ch, 1, rng);
  g.head = Linear<T>::init(side * side, plan.d_enc, rng);
  return g;
}

template <typename T>
std::vector<Tensor<T>*> Generator<T>::parameters() {
  std::vector<Tensor<T>*> out;
  append(out, embed.parameters());
  for (auto& s : stages) append(out, s.parameters());
  for (auto& s : final) append(out, s.parameters());
  append(out, to_pixel.parameters());
  append(out, head.parameters());
  return out;
}

template <typename T>
Tensor<T> Generator<T>::forward(const Tensor<T>& noise, const Tensor<T>& cond, const GanConfig& cfg, bool training,
                                Rng& rng, std::vector<Shape>* trace) const {
  const std::size_t B = noise.dim(0);
  const auto input = plan.d_cv > 0 ? ops::concat_cols<T>({noise, cond}) : noise;
  auto h = ops::reshape(embed(input), {B, cfg.h0, cfg.h0, c0});
  if (trace) trace->push_back(h.shape());
  const FnbOptions opts{cfg.wiring, cfg.gen_dropout, training};
  for (const auto& stage : stages) {
    h = pixelshuffle(fnb_forward(h, stage, opts, rng));
    if (trace) trace->push_back(h.shape());
  }
  for (const auto& block : final) {
    h = fnb_forward(h, block, opts, rng);
    if (trace) trace->push_back(h.shape());
  }
  const std::size_t side = h.dim(1), ch = h.dim(3);
  h = ops::reshape(to_pixel(ops::reshape(h, {B * side * side, ch})), {B, side, side, 1});
  if (trace) trace->push_back(h.shape());
  auto out = head(ops::reshape(h, {B, side * side}));
  if (trace) trace->push_back(out.shape());
  return out;
}

template <typename T>
Discriminator<T> Discriminator<T>::init(const ResolutionPlan& plan, const GanConfig& cfg, Rng& rng) {
  Discriminator d;
  d.plan = plan;
  const std::size_t k = resolve_disc_kernel(cfg, plan);
  const std::size_t grid = plan.side / k;
  d.patch = PatchEmbedParams<T>::init(k, cfg.disc_dim, rng);
  for (std::size_t i = 0; i < cfg.disc_blocks; ++i) {
    d.blocks.push_back(FnbParams<T>::init(grid, grid, cfg.disc_dim, cfg.expansion, rng));
  }
  d.norm = LayerNorm<T>::init(cfg.disc_dim);
  d.head = Linear<T>::init(grid * grid * cfg.disc_dim, 1, rng);
  return d;
}

template <typename T>
std::vector<Tensor<T>*> Discriminator<T>::parameters() {
  std::vector<Tensor<T>*> out;
  append(out, patch.parameters());
  for (auto& b : blocks) append(out, b.parameters());
  append(out, norm.parameters());
  append(out, head.parameters());
  return out;
}

template <typename T>
Tensor<T> Discriminator<T>::forward(const Tensor<T>& x_enc, const Tensor<T>& cond, const GanConfig& cfg,
                                    bool training, Rng& rng, std::vector<Shape>* trace) const {
  const std::size_t B = x_enc.dim(0), R = plan.side;
  const auto joined = plan.d_cv > 0 ? ops::concat_cols<T>({x_enc, cond}) : x_enc;
  const auto image = ops::reshape(ops::pad_cols(joined, R * R), {B, R, R});
  if (trace) trace->push_back(image.shape());
  auto h = patch_embed(image, patch);
  if (trace) trace->push_back(h.shape());
  const FnbOptions opts{cfg.wiring, cfg.disc_dropout, training};
  for (const auto& block : blocks) h = fnb_forward(h, block, opts, rng);
  if (trace) trace->push_back(h.shape());
  h = norm(h);
  if (training && cfg.head_dropout > 0) h = ops::dropout(h, 1.0 - cfg.head_dropout, rng);
  auto out = head(ops::reshape(h, {B, h.size() / B}));
  if (trace) trace->push_back(out.shape());
  return out;
}

template <typename T>
AuxPredictor<T> AuxPredictor<T>::init(std::size_t in, std::size_t out_width, const GanConfig& cfg, Rng& rng) {
  AuxPredictor a;
  a.l1 = Linear<T>::init(in, cfg.aux_hidden, rng);
  a.l2 = Linear<T>::init(cfg.aux_hidden, cfg.aux_hidden, rng);
  a.out = Linear<T>::init(cfg.aux_hidden, out_width, rng);
  return a;
}

template <typename T>
std::vector<Tensor<T>*> AuxPredictor<T>::parameters() {
  std::vector<Tensor<T>*> out;
  append(out, l1.parameters());
  append(out, l2.parameters());
  append(out, this->out.parameters());
  return out;
}

template <typename T>
Tensor<T> AuxPredictor<T>::forward(const Tensor<T>& features) const {
  const T slope = T(0.2);
  auto h = ops::leaky_relu(l1(features), slope);
  h = ops::leaky_relu(l2(h), slope);
  return out(h);
}

AuxLayout make_aux_layout(const DataTransformer& transformer) {
  const auto& schema = transformer.schema();
  const auto target = schema.target_index();
  if (!target) throw std::logic_error("schema has no target column");
  const auto& layout = transformer.layout();
  const auto& span = layout.columns[*target];
  const auto& codec = transformer.codecs()[*target];
  AuxLayout a;
  a.task = schema[*target].task;
  a.target_kind = codec.spec.kind;
  a.target = {span.offset, span.width};
  if (span.offset > 0) a.features.push_back({0, span.offset});
  if (span.offset + span.width < layout.d_enc) {
    a.features.push_back({span.offset + span.width, layout.d_enc - span.offset - span.width});
  }
  a.feature_width = layout.d_enc - span.width;
  if (a.task == Task::classification) {
    a.output_width = codec.spec.vocabulary.size();
    return a;
  }
  a.output_width = 1;
  if (codec.spec.kind == ColumnKind::minmax) return a;

  const auto& p = codec.vgm;
  double mean = 0, second = 0;
  for (std::size_t k = 0; k < p.modes(); ++k) {
    mean += p.weights[k] * p.means[k];
    second += p.weights[k] * (p.stds[k] * p.stds[k] + p.means[k] * p.means[k]);
  }
  a.center = mean;
  a.scale = std::sqrt(std::max(second - mean * mean, 1e-12));
  for (double s : codec.specials) {
    a.slot_values.push_back(std::isnan(s) ? mean : s);
    a.slot_alpha_scale.push_back(0.0);
  }
  for (std::size_t k = 0; k < p.modes(); ++k) {
    a.slot_values.push_back(p.means[k]);
    a.slot_alpha_scale.push_back(4.0 * p.stds[k]);
  }
  return a;
}

template <typename T>
Tensor<T> aux_features(const Tensor<T>& rows, const AuxLayout& layout) {
  std::vector<Tensor<T>> parts;
  for (const auto& s : layout.features) parts.push_back(ops::slice_cols(rows, s.offset, s.width));
  if (parts.empty()) return Tensor<T>::zeros({rows.dim(0), 0});
  return parts.size() == 1 ? parts[0] : ops::concat_cols(parts);
}

template <typename T>
Tensor<T> aux_target(const Tensor<T>& rows, const AuxLayout& layout) {
  if (layout.task == Task::classification) return ops::slice_cols(rows, layout.target.offset, layout.target.width);
  if (layout.target_kind == ColumnKind::minmax) return ops::slice_cols(rows, layout.target.offset, 1);
  const std::size_t w = layout.slot_values.size();
  const auto alpha = ops::slice_cols(rows, layout.target.offset, 1);
  const auto probs = ops::slice_cols(rows, layout.target.offset + 1, w);
  std::vector<T> vals(layout.slot_values.begin(), layout.slot_values.end());
  std::vector<T> scales(layout.slot_alpha_scale.begin(), layout.slot_alpha_scale.end());
  const auto base = ops::matmul(probs, Tensor<T>({w, 1}, std::move(vals)));
  const auto spread = ops::matmul(probs, Tensor<T>({w, 1}, std::move(scales)));
  const auto value = ops::add(base, ops::mul(alpha, spread));
  return ops::scale(ops::add_const(value, static_cast<T>(-layout.center)), static_cast<T>(1.0 / layout.scale));
}

template <typename T>
Tensor<T> apply_output_activations(const Tensor<T>& raw, const EncodedLayout& layout, double tau, Rng& rng) {
  const std::size_t d = layout.d_enc;
  if (raw.rank() != 2 || raw.dim(1) != d) {
    throw ShapeError("apply_output_activations: expected [B, " + std::to_string(d) + "], got " +
                     shape_string(raw.shape()));
  }
  std::vector<bool> onehot(d, false);
  std::vector<T> onehot_mask(d, T(0)), scalar_mask(d, T(1));
  for (const auto& s : layout.segments()) {
    if (!s.is_onehot()) continue;
    for (std::size_t i = s.offset; i < s.offset + s.width; ++i) {
      onehot[i] = true;
      onehot_mask[i] = T(1);
      scalar_mask[i] = T(0);
    }
  }
  const auto noise = gumbel_noise<T>(raw.shape(), onehot, rng);
  const auto logits = ops::scale(ops::add(raw, noise), static_cast<T>(1.0 / tau));
  const auto soft = ops::softmax_segments(logits, layout.tiling());
  const auto scalars = ops::tanh(raw);
  return ops::add(ops::mul_bcast(scalars, Tensor<T>({d}, std::move(scalar_mask))),
                  ops::mul_bcast(soft, Tensor<T>({d}, std::move(onehot_mask))));
}

#define FCTGAN_INSTANTIATE_GAN(T)                                                              \
  template struct Generator<T>;                                                                \
  template struct Discriminator<T>;                                                            \
  template struct AuxPredictor<T>;                                                             \
  template Tensor<T> aux_features(const Tensor<T>&, const AuxLayout&);                         \
  template Tensor<T> aux_target(const Tensor<T>&, const AuxLayout&);                           \
  template Tensor<T> apply_output_activations(const Tensor<T>&, const EncodedLayout&, double, Rng&);

FCTGAN_INSTANTIATE_GAN(float)
FCTGAN_INSTANTIATE_GAN(double)

#undef FCTGAN_INSTANTIATE_GAN

}  // namespace fctgan

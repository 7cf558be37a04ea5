#include "fctgan/training/trainer.hpp"

#include <cmath>
#include <stdexcept>

#include "fctgan/training/losses.hpp"

namespace fctgan {

nlohmann::json train_config_to_json(const TrainConfig& c) {
  const auto& v = c.vgm;
  return nlohmann::json{{"epochs", c.epochs},
                        {"batch_size", c.batch_size},
                        {"lr_g", c.lr_g},
                        {"lr_d", c.lr_d},
                        {"lr_aux", c.lr_aux},
                        {"beta1", c.beta1},
                        {"beta2", c.beta2},
                        {"lambda_gp", c.lambda_gp},
                        {"n_critic", c.n_critic},
                        {"w_down", c.w_down},
                        {"w_info", c.w_info},
                        {"w_cond", c.w_cond},
                        {"seed", c.seed},
                        {"fp64", c.fp64},
                        {"vgm",
                         {{"max_modes", v.max_modes},
                          {"weight_floor", v.weight_floor},
                          {"sigma_floor", v.sigma_floor},
                          {"restarts", v.restarts},
                          {"max_iter", v.max_iter},
                          {"tol", v.tol},
                          {"max_fit_rows", v.max_fit_rows}}},
                        {"net", gan_config_to_json(c.net)}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr_g = j.value("lr_g", c.lr_g);
  c.lr_d = j.value("lr_d", c.lr_d);
  c.lr_aux = j.value("lr_aux", c.lr_aux);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.lambda_gp = j.value("lambda_gp", c.lambda_gp);
  c.n_critic = j.value("n_critic", c.n_critic);
  c.w_down = j.value("w_down", c.w_down);
  c.w_info = j.value("w_info", c.w_info);
  c.w_cond = j.value("w_cond", c.w_cond);
  c.seed = j.value("seed", c.seed);
  c.fp64 = j.value("fp64", c.fp64);
  if (j.contains("vgm")) {
    const auto& v = j.at("vgm");
    c.vgm.max_modes = v.value("max_modes", c.vgm.max_modes);
    c.vgm.weight_floor = v.value("weight_floor", c.vgm.weight_floor);
    c.vgm.sigma_floor = v.value("sigma_floor", c.vgm.sigma_floor);
    c.vgm.restarts = v.value("restarts", c.vgm.restarts);
    c.vgm.max_iter = v.value("max_iter", c.vgm.max_iter);
    c.vgm.tol = v.value("tol", c.vgm.tol);
    c.vgm.max_fit_rows = v.value("max_fit_rows", c.vgm.max_fit_rows);
  }
  if (j.contains("net")) c.net = gan_config_from_json(j.at("net"));
  if (c.batch_size < 2) throw std::invalid_argument("batch_size must be at least 2");
  if (c.n_critic < 1) throw std::invalid_argument("n_critic must be at least 1");
  if (!(c.lr_g > 0 && c.lr_d > 0 && c.lr_aux > 0)) throw std::invalid_argument("learning rates must be positive");
  if (!(c.beta1 >= 0 && c.beta1 < 1 && c.beta2 >= 0 && c.beta2 < 1)) {
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  }
  if (!(c.lambda_gp >= 0 && c.w_down >= 0 && c.w_info >= 0 && c.w_cond >= 0)) {
    throw std::invalid_argument("loss weights must be non-negative");
  }
  if (c.vgm.max_modes < 1) throw std::invalid_argument("vgm.max_modes must be at least 1");
  return c;
}

nlohmann::json step_record_to_json(const StepRecord& r) {
  return nlohmann::json{{"step", r.step},
                        {"epoch", r.epoch},
                        {"d_loss", r.d_loss},
                        {"wasserstein", r.wasserstein},
                        {"gp", r.gp},
                        {"g_loss", r.g_loss},
                        {"adversarial", r.adversarial},
                        {"info", r.info},
                        {"cond", r.cond},
                        {"downstream", r.downstream},
                        {"aux_loss", r.aux_loss}};
}

namespace {

template <typename T>
Tensor<T> normal_noise(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<T> v(rows * cols);
  for (auto& x : v) x = static_cast<T>(rng.normal());
  return Tensor<T>({rows, cols}, std::move(v));
}

template <typename T>
Tensor<T> cond_tensor(const std::vector<CondVector>& conds, std::size_t rows, std::size_t width) {
  std::vector<double> cv(rows * width, 0.0);
  for (std::size_t r = 0; r < conds.size(); ++r) write_condvec(conds[r], std::span<double>(cv).subspan(r * width, width));
  return Tensor<T>({rows, width}, std::vector<T>(cv.begin(), cv.end()));
}

AdamConfig adam_config(const TrainConfig& c, double lr) { return AdamConfig{lr, c.beta1, c.beta2, 1e-8}; }

template <typename T>
double checked(const Tensor<T>& loss, const char* what) {
  const double v = loss.item();
  if (!std::isfinite(v)) throw NumericalFault(std::string("non-finite ") + what);
  return v;
}

template <typename Net, typename T>
std::vector<Tensor<T>> gradients_for(Net& live, const Gradients<T>& grads) {
  std::vector<Tensor<T>> out;
  for (auto* p : live.parameters()) out.push_back(grads.or_zeros(*p));
  return out;
}

}  // namespace

template <typename T>
Model<T> init_model(const Table& data, const TableSchema& schema, const TrainConfig& config, Rng& rng,
                    Matrix* encoded) {
  if (data.rows() == 0) throw DataError("training table has no rows");
  Model<T> m;
  m.config = config;
  m.transformer = DataTransformer::fit(data, schema, config.vgm, rng);
  const auto enc = m.transformer.encode(data, rng);
  m.sampler = CondSampler(m.transformer.layout(), enc);
  const auto& layout = m.transformer.layout();
  m.plan = plan_resolution(layout.d_enc, layout.d_cv, config.net.h0);
  m.g = Generator<T>::init(m.plan, config.net, rng);
  m.d = Discriminator<T>::init(m.plan, config.net, rng);
  if (schema.target_index()) {
    auto a = make_aux_layout(m.transformer);
    if (a.feature_width > 0) {
      m.aux = AuxPredictor<T>::init(a.feature_width, a.output_width, config.net, rng);
      m.aux_layout = std::move(a);
    }
  }
  m.train_rows = data.rows();
  m.rng_state = rng.state();
  if (encoded) *encoded = enc;
  return m;
}

template <typename T>
Batch<T> draw_batch(const Model<T>& model, const Matrix& encoded, std::size_t size, Rng& rng) {
  Batch<T> b;
  const std::size_t d = encoded.cols, width = model.sampler.width();
  std::vector<T> real(size * d);
  for (std::size_t r = 0; r < size; ++r) {
    std::size_t row;
    if (model.sampler.enabled()) {
      b.conds.push_back(model.sampler.sample(rng, CondLaw::log_smoothed));
      row = model.sampler.sample_row(b.conds.back(), rng);
    } else {
      row = rng.index(encoded.rows);
    }
    std::copy(encoded.row(row), encoded.row(row) + d, real.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  b.real = Tensor<T>({size, d}, std::move(real));
  b.cond = cond_tensor<T>(b.conds, size, width);
  return b;
}

template <typename T>
CriticStep d_step(Model<T>& model, const Batch<T>& batch, Rng& rng) {
  const auto& net = model.config.net;
  const auto& layout = model.transformer.layout();
  const std::size_t B = batch.real.dim(0);
  const auto noise = normal_noise<T>(B, net.noise_dim, rng);
  const auto fake = apply_output_activations(model.g.forward(noise, batch.cond, net, true, rng), layout, net.tau, rng);

  Tape<T> tape;
  auto d = bind_parameters(model.d, tape);
  const CriticFn<T> critic = [&](const Tensor<T>& x) { return d.forward(x, batch.cond, net, true, rng); };
  const auto w = ops::sub(ops::mean_all(critic(fake)), ops::mean_all(critic(batch.real)));
  CriticStep out;
  out.wasserstein = checked(w, "wasserstein term");
  auto loss = w;
  if (model.config.lambda_gp > 0) {
    std::vector<T> eps(B);
    for (auto& e : eps) e = static_cast<T>(rng.uniform());
    const auto gp = gradient_penalty(critic, batch.real, fake, eps, &tape);
    out.gp = checked(gp, "gradient penalty");
    loss = ops::add(loss, ops::scale(gp, static_cast<T>(model.config.lambda_gp)));
  }
  out.d_loss = checked(loss, "d_loss");
  const auto grads = gradients_for(d, tape.backward(loss));
  adam_step(model.d.parameters(), grads, model.adam_d, adam_config(model.config, model.config.lr_d));
  return out;
}

template <typename T>
GeneratorStep g_step(Model<T>& model, const Batch<T>& batch, Rng& rng) {
  const auto& cfg = model.config;
  const auto& net = cfg.net;
  const auto& layout = model.transformer.layout();
  const std::size_t B = batch.real.dim(0);
  const auto noise = normal_noise<T>(B, net.noise_dim, rng);

  Tape<T> tape;
  auto g = bind_parameters(model.g, tape);
  const auto fake = apply_output_activations(g.forward(noise, batch.cond, net, true, rng), layout, net.tau, rng);
  const auto adv = ops::neg(ops::mean_all(model.d.forward(fake, batch.cond, net, true, rng)));
  auto total = adv;
  GeneratorStep out;
  out.adversarial = checked(adv, "adversarial loss");
  if (B >= 2) {
    const auto info = info_loss(batch.real, fake);
    out.info = checked(info, "info loss");
    total = ops::add(total, ops::scale(info, static_cast<T>(cfg.w_info)));
  }
  if (!batch.conds.empty()) {
    const auto cond = cond_loss(fake, batch.conds, layout);
    out.cond = checked(cond, "cond loss");
    total = ops::add(total, ops::scale(cond, static_cast<T>(cfg.w_cond)));
  }
  if (model.aux) {
    const auto down = downstream_loss(fake, *model.aux, *model.aux_layout);
    out.downstream = checked(down, "downstream loss");
    total = ops::add(total, ops::scale(down, static_cast<T>(cfg.w_down)));
  }
  out.g_loss = checked(total, "g_loss");
  const auto grads = gradients_for(g, tape.backward(total));
  adam_step(model.g.parameters(), grads, model.adam_g, adam_config(cfg, cfg.lr_g));

  if (model.aux) {
    Tape<T> aux_tape;
    auto aux = bind_parameters(*model.aux, aux_tape);
    const auto loss = downstream_loss(batch.real, aux, *model.aux_layout);
    out.aux_loss = checked(loss, "aux loss");
    const auto aux_grads = gradients_for(aux, aux_tape.backward(loss));
    adam_step(model.aux->parameters(), aux_grads, model.adam_aux, adam_config(cfg, cfg.lr_aux));
  }
  return out;
}

namespace {

template <typename T>
TrainResult train_typed(const Table& data, const TableSchema& schema, const TrainConfig& config,
                        const TrainHooks& hooks) {
  Rng rng(config.seed);
  Matrix encoded;
  auto model = init_model<T>(data, schema, config, rng, &encoded);
  TrainHistory history;
  const std::size_t per_epoch = (data.rows() + config.batch_size - 1) / config.batch_size;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t it = 0; it < per_epoch; ++it) {
      StepRecord rec;
      rec.step = model.step;
      rec.epoch = epoch;
      try {
        for (std::size_t k = 0; k < config.n_critic; ++k) {
          const auto batch = draw_batch(model, encoded, config.batch_size, rng);
          const auto c = d_step(model, batch, rng);
          rec.d_loss = c.d_loss;
          rec.wasserstein = c.wasserstein;
          rec.gp = c.gp;
        }
        const auto batch = draw_batch(model, encoded, config.batch_size, rng);
        const auto s = g_step(model, batch, rng);
        rec.g_loss = s.g_loss;
        rec.adversarial = s.adversarial;
        rec.info = s.info;
        rec.cond = s.cond;
        rec.downstream = s.downstream;
        rec.aux_loss = s.aux_loss;
      } catch (const NumericalFault& e) {
        throw NumericalFault("step " + std::to_string(model.step) + " (epoch " + std::to_string(epoch) +
                             "): " + e.what());
      }
      ++model.step;
      history.steps.push_back(rec);
      if (hooks.on_step) hooks.on_step(rec);
    }
    model.epoch = epoch + 1;
    model.rng_state = rng.state();
    if (hooks.on_epoch) hooks.on_epoch(model.epoch, AnyModel(model));
  }
  model.rng_state = rng.state();
  return TrainResult{AnyModel(std::move(model)), std::move(history)};
}

}  // namespace

TrainResult train(const Table& data, const TableSchema& schema, const TrainConfig& config, const TrainHooks& hooks) {
  return config.fp64 ? train_typed<double>(data, schema, config, hooks)
                     : train_typed<float>(data, schema, config, hooks);
}

template <typename T>
Tensor<T> sample_encoded(const Model<T>& model, std::size_t n, Rng& rng, std::optional<CondVector> fixed) {
  const auto& layout = model.transformer.layout();
  const auto& net = model.config.net;
  if (fixed && !model.sampler.enabled()) throw std::invalid_argument("model has no conditional vector");
  std::vector<T> out;
  out.reserve(n * layout.d_enc);
  const std::size_t chunk = std::max<std::size_t>(1, model.config.batch_size);
  for (std::size_t done = 0; done < n; done += chunk) {
    const std::size_t B = std::min(chunk, n - done);
    std::vector<CondVector> conds;
    if (model.sampler.enabled()) {
      for (std::size_t r = 0; r < B; ++r) conds.push_back(fixed ? *fixed : model.sampler.sample(rng, CondLaw::empirical));
    }
    const auto noise = normal_noise<T>(B, net.noise_dim, rng);
    const auto cond = cond_tensor<T>(conds, B, model.sampler.width());
    const auto rows = apply_output_activations(model.g.forward(noise, cond, net, false, rng), layout, net.tau, rng);
    out.insert(out.end(), rows.data().begin(), rows.data().end());
  }
  return Tensor<T>({n, layout.d_enc}, std::move(out));
}

Table sample(const AnyModel& model, std::size_t n, Rng& rng, std::optional<CondVector> fixed) {
  return std::visit(
      [&](const auto& m) {
        const auto rows = sample_encoded(m, n, rng, fixed);
        Matrix enc(n, m.transformer.layout().d_enc);
        std::copy(rows.data().begin(), rows.data().end(), enc.data.begin());
        return m.transformer.decode(enc);
      },
      model);
}

const DataTransformer& model_transformer(const AnyModel& model) {
  return std::visit([](const auto& m) -> const DataTransformer& { return m.transformer; }, model);
}

const CondSampler& model_sampler(const AnyModel& model) {
  return std::visit([](const auto& m) -> const CondSampler& { return m.sampler; }, model);
}

const TrainConfig& model_config(const AnyModel& model) {
  return std::visit([](const auto& m) -> const TrainConfig& { return m.config; }, model);
}

std::size_t model_train_rows(const AnyModel& model) {
  return std::visit([](const auto& m) { return m.train_rows; }, model);
}

#define FCTGAN_INSTANTIATE_TRAINER(T)                                                                  \
  template Model<T> init_model(const Table&, const TableSchema&, const TrainConfig&, Rng&, Matrix*);   \
  template Batch<T> draw_batch(const Model<T>&, const Matrix&, std::size_t, Rng&);                     \
  template CriticStep d_step(Model<T>&, const Batch<T>&, Rng&);                                        \
  template GeneratorStep g_step(Model<T>&, const Batch<T>&, Rng&);                                     \
  template Tensor<T> sample_encoded(const Model<T>&, std::size_t, Rng&, std::optional<CondVector>);

FCTGAN_INSTANTIATE_TRAINER(float)
FCTGAN_INSTANTIATE_TRAINER(double)

#undef FCTGAN_INSTANTIATE_TRAINER

}  // namespace fctgan

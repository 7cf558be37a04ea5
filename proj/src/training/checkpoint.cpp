#include "fctgan/training/checkpoint.hpp"

#include <cstring>
#include <map>

namespace fctgan {

namespace {

class Writer {
 public:
  template <typename U>
  void put(U v) {
    buf_.append(reinterpret_cast<const char*>(&v), sizeof(U));
  }
  void bytes(const std::string& s) {
    put<std::uint64_t>(s.size());
    buf_ += s;
  }
  template <typename U>
  void values(const std::vector<U>& v) {
    put<std::uint64_t>(v.size());
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(U));
  }
  void section(const std::string& name, const std::string& body) {
    put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    buf_ += name;
    bytes(body);
  }
  std::string& str() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  template <typename U>
  U get() {
    U v;
    need(sizeof(U));
    std::memcpy(&v, s_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return v;
  }
  std::string raw(std::size_t n) {
    need(n);
    auto out = s_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::string bytes() { return raw(get<std::uint64_t>()); }
  template <typename U>
  std::vector<U> values() {
    const auto n = get<std::uint64_t>();
    if (n > (s_.size() - pos_) / sizeof(U)) throw CheckpointError("checkpoint truncated");
    std::vector<U> v(n);
    std::memcpy(v.data(), s_.data() + pos_, n * sizeof(U));
    pos_ += n * sizeof(U);
    return v;
  }
  bool done() const { return pos_ == s_.size(); }

 private:
  void need(std::size_t n) const {
    if (n > s_.size() - pos_) throw CheckpointError("checkpoint truncated");
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

template <typename T>
std::string encode_tensors(const std::vector<Tensor<T>*>& params) {
  Writer w;
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p->rank()));
    for (auto d : p->shape()) w.put<std::uint64_t>(d);
    w.values(p->to_vector());
  }
  return std::move(w.str());
}

template <typename T>
void decode_tensors(const std::string& body, const std::vector<Tensor<T>*>& params, const std::string& what) {
  Reader r(body);
  if (r.get<std::uint32_t>() != params.size()) throw CheckpointError(what + ": parameter count mismatch");
  for (auto* p : params) {
    Shape shape(r.get<std::uint32_t>());
    for (auto& d : shape) d = r.get<std::uint64_t>();
    if (shape != p->shape()) {
      throw CheckpointError(what + ": parameter shape " + shape_string(shape) + " where " +
                            shape_string(p->shape()) + " was expected");
    }
    *p = Tensor<T>(shape, r.values<T>());
  }
  if (!r.done()) throw CheckpointError(what + ": trailing bytes");
}

template <typename T>
std::string encode_adam(const AdamState<T>& s) {
  Writer w;
  w.put<std::int64_t>(s.step);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.m.size()));
  for (std::size_t i = 0; i < s.m.size(); ++i) {
    w.values(s.m[i]);
    w.values(s.v[i]);
  }
  return std::move(w.str());
}

template <typename T>
AdamState<T> decode_adam(const std::string& body) {
  Reader r(body);
  AdamState<T> s;
  s.step = r.get<std::int64_t>();
  const auto n = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    s.m.push_back(r.values<T>());
    s.v.push_back(r.values<T>());
  }
  if (!r.done()) throw CheckpointError("optimizer state: trailing bytes");
  return s;
}

nlohmann::json plan_to_json(const ResolutionPlan& p) {
  return {{"side", p.side}, {"stages", p.stages}, {"d_enc", p.d_enc}, {"d_cv", p.d_cv}};
}

template <typename T>
std::string encode_typed(const Model<T>& m) {
  auto model = m;
  nlohmann::json meta{{"precision", sizeof(T) == 8 ? "float64" : "float32"},
                      {"config", train_config_to_json(m.config)},
                      {"plan", plan_to_json(m.plan)},
                      {"has_aux", m.aux.has_value()},
                      {"epoch", m.epoch},
                      {"step", m.step},
                      {"train_rows", m.train_rows}};
  nlohmann::json encoder{{"transformer", m.transformer.to_json()}, {"sampler", m.sampler.to_json()}};

  Writer w;
  w.str().append(kCheckpointMagic, sizeof(kCheckpointMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint64_t>(schema_hash(m.transformer.schema()));
  w.section("meta", meta.dump());
  w.section("encoder", encoder.dump());
  w.section("generator", encode_tensors(model.g.parameters()));
  w.section("discriminator", encode_tensors(model.d.parameters()));
  if (model.aux) w.section("aux", encode_tensors(model.aux->parameters()));
  w.section("adam_g", encode_adam(m.adam_g));
  w.section("adam_d", encode_adam(m.adam_d));
  if (model.aux) w.section("adam_aux", encode_adam(m.adam_aux));
  w.section("rng", m.rng_state);
  return std::move(w.str());
}

const std::string& section(const std::map<std::string, std::string>& s, const std::string& name) {
  const auto it = s.find(name);
  if (it == s.end()) throw CheckpointError("checkpoint has no '" + name + "' section");
  return it->second;
}

template <typename T>
Model<T> decode_typed(const std::map<std::string, std::string>& sections, const nlohmann::json& meta) {
  Model<T> m;
  m.config = train_config_from_json(meta.at("config"));
  const auto encoder = nlohmann::json::parse(section(sections, "encoder"));
  m.transformer = DataTransformer::from_json(encoder.at("transformer"));
  m.sampler = CondSampler::from_json(encoder.at("sampler"));
  const auto& layout = m.transformer.layout();
  m.plan = plan_resolution(layout.d_enc, layout.d_cv, m.config.net.h0);
  if (m.plan.side != meta.at("plan").at("side").get<std::size_t>()) {
    throw CheckpointError("stored resolution plan disagrees with the encoder layout");
  }
  Rng scratch(0);
  m.g = Generator<T>::init(m.plan, m.config.net, scratch);
  m.d = Discriminator<T>::init(m.plan, m.config.net, scratch);
  decode_tensors(section(sections, "generator"), m.g.parameters(), "generator");
  decode_tensors(section(sections, "discriminator"), m.d.parameters(), "discriminator");
  m.adam_g = decode_adam<T>(section(sections, "adam_g"));
  m.adam_d = decode_adam<T>(section(sections, "adam_d"));
  if (meta.at("has_aux").get<bool>()) {
    auto a = make_aux_layout(m.transformer);
    m.aux = AuxPredictor<T>::init(a.feature_width, a.output_width, m.config.net, scratch);
    m.aux_layout = std::move(a);
    decode_tensors(section(sections, "aux"), m.aux->parameters(), "aux");
    m.adam_aux = decode_adam<T>(section(sections, "adam_aux"));
  }
  m.rng_state = section(sections, "rng");
  m.epoch = meta.at("epoch").get<std::size_t>();
  m.step = meta.at("step").get<std::size_t>();
  m.train_rows = meta.at("train_rows").get<std::size_t>();
  return m;
}

}  // namespace

std::string encode_checkpoint(const AnyModel& model) {
  return std::visit([](const auto& m) { return encode_typed(m); }, model);
}

AnyModel decode_checkpoint(const std::string& bytes, std::optional<std::uint64_t> expected_schema_hash) {
  Reader r(bytes);
  if (bytes.size() < sizeof(kCheckpointMagic) ||
      std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  r.raw(sizeof(kCheckpointMagic));
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + " (this build reads " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  const auto hash = r.get<std::uint64_t>();
  if (expected_schema_hash && *expected_schema_hash != hash) {
    throw CheckpointError("checkpoint was trained on a different schema");
  }
  std::map<std::string, std::string> sections;
  while (!r.done()) {
    const auto name = r.raw(r.get<std::uint32_t>());
    sections[name] = r.bytes();
  }
  try {
    const auto meta = nlohmann::json::parse(section(sections, "meta"));
    const auto precision = meta.at("precision").get<std::string>();
    AnyModel model = precision == "float64" ? AnyModel(decode_typed<double>(sections, meta))
                                            : AnyModel(decode_typed<float>(sections, meta));
    if (schema_hash(model_transformer(model).schema()) != hash) {
      throw CheckpointError("checkpoint schema hash does not match its encoder");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint metadata: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const AnyModel& model) {
  write_file_atomic(path.string(), encode_checkpoint(model));
}

AnyModel load_checkpoint(const std::filesystem::path& path, std::optional<std::uint64_t> expected_schema_hash) {
  return decode_checkpoint(read_file(path.string()), expected_schema_hash);
}

}  // namespace fctgan

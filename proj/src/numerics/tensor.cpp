#include "fctgan/numerics/tensor.hpp"

#include <numeric>
#include <sstream>

#include "fctgan/numerics/ops.hpp"

namespace fctgan {

std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)) {
  if (numel(shape_) != data.size()) {
    throw ShapeError("tensor data length " + std::to_string(data.size()) + " does not match shape " +
                     shape_string(shape_));
  }
  data_ = std::make_shared<const std::vector<T>>(std::move(data));
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape) {
  const auto n = numel(shape);
  return Tensor(std::move(shape), std::vector<T>(n, T(0)));
}

template <typename T>
Tensor<T> Tensor<T>::filled(Shape shape, T value) {
  const auto n = numel(shape);
  return Tensor(std::move(shape), std::vector<T>(n, value));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value) {
  return Tensor(Shape{}, std::vector<T>{value});
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) throw ShapeError("item() on tensor of shape " + shape_string(shape_));
  return (*data_)[0];
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  Tensor out;
  out.shape_ = shape_;
  out.data_ = data_;
  return out;
}

template <typename T>
Tensor<T> Tensor<T>::reshaped(Shape shape) const {
  if (numel(shape) != size()) throw ShapeError("cannot view " + shape_string(shape_) + " as " + shape_string(shape));
  Tensor out;
  out.shape_ = std::move(shape);
  out.data_ = data_;
  return out;
}

template <typename T>
void Tensor<T>::assign(std::vector<T> data) {
  if (tracked()) throw std::logic_error("assign() on a tracked tensor");
  if (data.size() != numel(shape_)) throw ShapeError("assign(): size mismatch for shape " + shape_string(shape_));
  data_ = std::make_shared<const std::vector<T>>(std::move(data));
}

template <typename T>
std::optional<Tensor<T>> Gradients<T>::of(const Tensor<T>& t) const {
  if (!t.tracked() || t.tape() != tape_ || t.node() >= grads_.size()) return std::nullopt;
  const auto& g = grads_[t.node()];
  if (g.empty()) return std::nullopt;
  return g;
}

template <typename T>
Tensor<T> Gradients<T>::or_zeros(const Tensor<T>& t) const {
  auto g = of(t);
  return g ? *g : Tensor<T>::zeros(t.shape());
}

template <typename T>
Tensor<T> Tape<T>::watch(const Tensor<T>& leaf) {
  if (leaf.empty()) throw std::invalid_argument("cannot watch an empty tensor");
  Tensor<T> out = leaf.detach();
  out.tape_ = this;
  out.node_ = entries_.size();
  entries_.push_back(Entry{});
  return out;
}

template <typename T>
Tensor<T> Tape<T>::record(Tensor<T> out, const std::vector<Tensor<T>>& inputs, Backward backward) {
  Entry e;
  e.inputs.reserve(inputs.size());
  e.input_shapes.reserve(inputs.size());
  for (const auto& in : inputs) {
    e.inputs.push_back(in.tape() == this ? in.node() : kNoNode);
    e.input_shapes.push_back(in.shape());
  }
  e.backward = std::move(backward);
  out.tape_ = this;
  out.node_ = entries_.size();
  entries_.push_back(std::move(e));
  return out;
}

template <typename T>
Gradients<T> Tape<T>::backward(const Tensor<T>& loss, bool create_graph) {
  if (loss.tape() != this) throw std::invalid_argument("backward(): loss is not on this tape");
  if (loss.size() != 1) throw ShapeError("backward(): loss must be a scalar, got " + shape_string(loss.shape()));

  const std::size_t n = loss.node() + 1;
  std::vector<Tensor<T>> grads(n);
  grads[loss.node()] = Tensor<T>::filled(loss.shape(), T(1));

  const bool saved = recording_;
  recording_ = create_graph;
  try {
    for (std::size_t i = n; i-- > 0;) {
      if (grads[i].empty()) continue;
      const Entry& entry = entries_[i];
      if (!entry.backward) continue;

      std::vector<bool> need(entry.inputs.size());
      bool any = false;
      for (std::size_t k = 0; k < entry.inputs.size(); ++k) {
        need[k] = entry.inputs[k] != kNoNode;
        any = any || need[k];
      }
      if (!any) continue;

      // Entries may be appended while this runs; the deque keeps `entry` valid.
      auto in_grads = entry.backward(grads[i], need);
      for (std::size_t k = 0; k < entry.inputs.size(); ++k) {
        if (!need[k] || in_grads[k].empty()) continue;
        const NodeId target = entry.inputs[k];
        if (in_grads[k].shape() != entry.input_shapes[k]) {
          throw ShapeError("backward(): gradient shape " + shape_string(in_grads[k].shape()) +
                           " does not match input shape " + shape_string(entry.input_shapes[k]));
        }
        grads[target] = grads[target].empty() ? in_grads[k] : ops::add(grads[target], in_grads[k]);
      }
    }
  } catch (...) {
    recording_ = saved;
    throw;
  }
  recording_ = saved;
  return Gradients<T>(this, std::move(grads));
}

template <typename T>
Tape<T>* recording_tape(std::initializer_list<const Tensor<T>*> inputs) {
  Tape<T>* tape = nullptr;
  for (const auto* t : inputs) {
    if (!t->tracked()) continue;
    if (tape != nullptr && tape != t->tape()) throw std::invalid_argument("operands belong to different tapes");
    tape = t->tape();
  }
  if (tape != nullptr && !tape->recording()) return nullptr;
  return tape;
}

template class Tensor<float>;
template class Tensor<double>;
template class Gradients<float>;
template class Gradients<double>;
template class Tape<float>;
template class Tape<double>;
template Tape<float>* recording_tape<float>(std::initializer_list<const Tensor<float>*>);
template Tape<double>* recording_tape<double>(std::initializer_list<const Tensor<double>*>);

}  // namespace fctgan

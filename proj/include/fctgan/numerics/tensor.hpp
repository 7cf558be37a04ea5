#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fctgan {

using Shape = std::vector<std::size_t>;
using NodeId = std::size_t;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename T>
class Tape;

/// Dense row-major array of reals.
///
/// Storage is shared and immutable once constructed, so copies are cheap.
/// A tensor returned by Tape::watch, or computed from one while the tape is
/// recording, carries a node id on that tape and takes part in backward().
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  Tensor(Shape shape, std::vector<T> data);

  static Tensor zeros(Shape shape);
  static Tensor filled(Shape shape, T value);
  static Tensor scalar(T value);

  bool empty() const { return data_ == nullptr; }
  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_ ? data_->size() : 0; }

  std::span<const T> data() const { return data_ ? std::span<const T>(*data_) : std::span<const T>(); }
  const T& operator[](std::size_t i) const { return (*data_)[i]; }
  T item() const;

  bool tracked() const { return tape_ != nullptr; }
  Tape<T>* tape() const { return tape_; }
  NodeId node() const { return node_; }

  /// Same values, no tape membership.
  Tensor detach() const;

  /// Untracked view of the same storage under another shape.
  Tensor reshaped(Shape shape) const;

  /// Copy of the values for in-place editing; never aliases this tensor.
  std::vector<T> to_vector() const { return data_ ? *data_ : std::vector<T>(); }

  /// Replaces the storage; only valid on untracked tensors.
  void assign(std::vector<T> data);

 private:
  friend class Tape<T>;

  Shape shape_;
  std::shared_ptr<const std::vector<T>> data_;
  Tape<T>* tape_ = nullptr;
  NodeId node_ = kNoNode;
};

/// Result of a reverse sweep: one gradient per node reached from the loss.
template <typename T>
class Gradients {
 public:
  Gradients() = default;
  Gradients(const Tape<T>* tape, std::vector<Tensor<T>> grads) : tape_(tape), grads_(std::move(grads)) {}

  /// Gradient of the swept loss with respect to `t`; absent when `t` is
  /// untracked, belongs to another tape, or does not influence the loss.
  std::optional<Tensor<T>> of(const Tensor<T>& t) const;

  /// Like of(), but an absent gradient is returned as zeros shaped like `t`.
  Tensor<T> or_zeros(const Tensor<T>& t) const;

 private:
  const Tape<T>* tape_ = nullptr;
  std::vector<Tensor<T>> grads_;
};

/// Define-by-run record of primitive applications.
///
/// Entries are appended in evaluation order, so the record is always a
/// topological order and reverse replay visits each node after all its
/// consumers. A tape lives for one training step.
template <typename T>
class Tape {
 public:
  /// Receives the output gradient and a mask of which inputs need a gradient;
  /// returns one entry per input (empty tensors where not needed).
  using Backward = std::function<std::vector<Tensor<T>>(const Tensor<T>& grad, const std::vector<bool>& need)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Registers `leaf` as a differentiable input and returns the tracked copy.
  Tensor<T> watch(const Tensor<T>& leaf);

  /// Appends an op entry. Inputs not on this tape are treated as constants.
  Tensor<T> record(Tensor<T> out, const std::vector<Tensor<T>>& inputs, Backward backward);

  bool recording() const { return recording_; }
  std::size_t size() const { return entries_.size(); }

  /// Reverse sweep from a scalar `loss`. With `create_graph` the gradient
  /// computations are themselves recorded so they can be differentiated again.
  Gradients<T> backward(const Tensor<T>& loss, bool create_graph = false);

 private:
  struct Entry {
    std::vector<NodeId> inputs;
    std::vector<Shape> input_shapes;
    Backward backward;
  };

  std::deque<Entry> entries_;
  bool recording_ = true;
};

/// Tape shared by the tracked operands, or null when none is recording.
template <typename T>
Tape<T>* recording_tape(std::initializer_list<const Tensor<T>*> inputs);

extern template class Tensor<float>;
extern template class Tensor<double>;
extern template class Gradients<float>;
extern template class Gradients<double>;
extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace fctgan

#pragma once

#include <functional>
#include <type_traits>
#include <vector>

#include "fctgan/encoding/condvec.hpp"
#include "fctgan/gan/networks.hpp"

namespace fctgan {

template <typename T>
using CriticFn = std::function<Tensor<T>(const Tensor<T>& x)>;

/// Mean over rows of (||grad_x critic(x_hat)||_2 - 1)^2 with
/// x_hat = eps * real + (1 - eps) * fake, one eps per row.
///
/// `real` and `fake` are treated as constants. With a tape the result is
/// recorded there (double backprop), so it can be differentiated with respect
/// to the critic's parameters; without one it is computed on a scratch tape.
template <typename T>
Tensor<T> gradient_penalty(const CriticFn<T>& critic, const Tensor<T>& real, const Tensor<T>& fake,
                           const std::vector<T>& eps, std::type_identity_t<Tape<T>>* tape);

/// ||mean(real) - mean(fake)||_2 + ||std(real) - std(fake)||_2 over the
/// feature axis, unbiased batch standard deviations. Needs at least 2 rows.
template <typename T>
Tensor<T> info_loss(const Tensor<T>& real, const Tensor<T>& fake);

/// Mean of -log p, where p is the activated probability of each row's
/// conditioned slot.
template <typename T>
Tensor<T> cond_loss(const Tensor<T>& fake, const std::vector<CondVector>& conds, const EncodedLayout& layout);

/// Cross-entropy of the aux prediction against the row's own target
/// probabilities (classification) or mean squared error (regression).
template <typename T>
Tensor<T> downstream_loss(const Tensor<T>& rows, const AuxPredictor<T>& aux, const AuxLayout& layout);

}  // namespace fctgan

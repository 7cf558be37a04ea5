#pragma once

#include <cstdint>
#include <vector>

#include "fctgan/numerics/gradcheck.hpp"

namespace fctgan {

/// Finite-difference checks of the composite layers (fourier_layer, fnb,
/// patch_embed, pixelshuffle, generator, discriminator, aux predictor,
/// gradient penalty path) on tiny configurations, in double precision.
/// Each check perturbs inputs and parameters together.
std::vector<GradcheckResult> composite_gradchecks(std::uint64_t seed = 11, double tolerance = 1e-4);

/// primitive_gradchecks followed by composite_gradchecks.
std::vector<GradcheckResult> full_gradcheck_suite(std::uint64_t seed = 7);

}  // namespace fctgan

#include "fctgan/training/gradcheck_suite.hpp"

#include "fctgan/gan/networks.hpp"
#include "fctgan/training/losses.hpp"

namespace fctgan {

namespace {

using TD = Tensor<double>;
using V = std::vector<TD>;

GanConfig tiny_net() {
  GanConfig c;
  c.noise_dim = 6;
  c.c0 = 16;
  c.expansion = 2;
  c.disc_dim = 4;
  c.disc_kernel = 4;
  c.disc_blocks = 2;
  c.aux_hidden = 5;
  return c;
}

// Inputs followed by the network's parameters; `rebind` writes the parameter
// slice of v back into a copy of the network.
template <typename Net>
V with_parameters(V inputs, Net net) {
  for (auto* p : net.parameters()) inputs.push_back(*p);
  return inputs;
}

template <typename Net>
Net rebind(const Net& net, const V& v, std::size_t offset) {
  Net live = net;
  auto ps = live.parameters();
  for (std::size_t i = 0; i < ps.size(); ++i) *ps[i] = v[offset + i];
  return live;
}

}  // namespace

std::vector<GradcheckResult> composite_gradchecks(std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  GradcheckOptions opt;
  opt.tolerance = tolerance;
  std::vector<GradcheckResult> out;
  auto run = [&](const std::string& name, const ScalarFn& f, const V& inputs) {
    out.push_back(check_gradient(name, f, inputs, rng, opt));
  };

  {
    const auto tokens = random_tensor({2, 4, 5, 3}, rng);
    const V in{tokens, random_tensor({4, 3, 3}, rng), random_tensor({4, 3, 3}, rng)};
    run("fourier_layer", [](const V& v) {
      return random_projection(fourier_layer(v[0], ComplexSpectrum<double>{v[1], v[2], 5}), 21);
    }, in);
  }
  for (auto wiring : {ResidualWiring::single, ResidualWiring::dual}) {
    const auto p = FnbParams<double>::init(4, 4, 3, 2, rng);
    run(wiring == ResidualWiring::single ? "fnb_forward" : "fnb_forward_dual", [p, wiring](const V& v) {
      Rng drop(3);
      return random_projection(fnb_forward(v[0], rebind(p, v, 1), FnbOptions{wiring, 0.2, true}, drop), 17);
    }, with_parameters({random_tensor({2, 4, 4, 3}, rng)}, p));
  }
  {
    const auto p = PatchEmbedParams<double>::init(2, 3, rng);
    run("patch_embed", [p](const V& v) { return random_projection(patch_embed(v[0], rebind(p, v, 1)), 5); },
        with_parameters({random_tensor({2, 4, 4}, rng)}, p));
    run("pixelshuffle", [](const V& v) { return random_projection(pixelshuffle(v[0]), 6); },
        {random_tensor({2, 2, 3, 8}, rng)});
  }

  const auto cfg = tiny_net();
  const auto plan = plan_resolution(15, 5);
  {
    const auto g = Generator<double>::init(plan, cfg, rng);
    run("generator", [g, cfg](const V& v) {
      Rng fwd(1);
      return random_projection(rebind(g, v, 2).forward(v[0], v[1], cfg, false, fwd), 8);
    }, with_parameters({random_tensor({2, cfg.noise_dim}, rng), random_tensor({2, 5}, rng)}, g));
  }
  {
    const auto d = Discriminator<double>::init(plan, cfg, rng);
    run("discriminator", [d, cfg](const V& v) {
      Rng fwd(1);
      return random_projection(rebind(d, v, 2).forward(v[0], v[1], cfg, true, fwd), 9);
    }, with_parameters({random_tensor({2, 15}, rng), random_tensor({2, 5}, rng)}, d));

    const auto real = random_tensor({3, 15}, rng), fake = random_tensor({3, 15}, rng);
    const auto cond = random_tensor({3, 5}, rng);
    const std::vector<double> eps{0.2, 0.5, 0.9};
    run("gradient_penalty", [=](const V& v) {
      const auto live = rebind(d, v, 0);
      Rng drop(4);
      const CriticFn<double> critic = [&](const TD& x) { return live.forward(x, cond, cfg, true, drop); };
      return gradient_penalty(critic, real, fake, eps, v[0].tape());
    }, with_parameters({}, d));
  }
  {
    const auto aux = AuxPredictor<double>::init(6, 3, cfg, rng);
    run("aux_predictor", [aux](const V& v) { return random_projection(rebind(aux, v, 1).forward(v[0]), 4); },
        with_parameters({random_tensor({4, 6}, rng)}, aux));
  }
  return out;
}

std::vector<GradcheckResult> full_gradcheck_suite(std::uint64_t seed) {
  auto out = primitive_gradchecks(seed);
  for (auto& r : composite_gradchecks(seed + 4)) out.push_back(std::move(r));
  return out;
}

}  // namespace fctgan

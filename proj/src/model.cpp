#include "msdn/model.hpp"

#include "msdn/attention_common.hpp"
#include "msdn/rng.hpp"

namespace msdn {

ModelParams ModelParams::zeros_like() const {
  ModelParams z;
  auto dst = z.tensors();
  auto src = tensors();
  for (std::size_t i = 0; i < dst.size(); ++i) *dst[i] = Matrix(src[i]->rows(), src[i]->cols());
  return z;
}

ModelParams init_params(std::size_t feature_dim, std::size_t attribute_dim, std::uint64_t seed) {
  RngStream rng(seed);
  ModelParams p;
  p.avca.w1 = init_scaled_uniform(rng, attribute_dim, feature_dim);
  p.avca.w2 = init_scaled_uniform(rng, attribute_dim, feature_dim);
  p.vaca.w3 = init_scaled_uniform(rng, feature_dim, attribute_dim);
  p.vaca.w4 = init_scaled_uniform(rng, feature_dim, attribute_dim);
  p.vaca.w_att = init_scaled_uniform(rng, feature_dim, attribute_dim);
  return p;
}

}  // namespace msdn

// Finite-difference gradient oracle for the seq2seq model.
#ifndef GECFORGE_TESTS_GRAD_CHECK_HPP
#define GECFORGE_TESTS_GRAD_CHECK_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "gecforge/rng.hpp"
#include "gecforge/seq2seq/model.hpp"

namespace oracles {

struct GradCheck {
  int checked = 0;
  double max_rel_error = 0.0;
};

/// Compares backward() against central differences on `count` parameters
/// sampled across all tensors. Relative error uses max(|a|+|n|, 1e-8).
inline GradCheck check_gradient(gecforge::seq2seq::Seq2SeqModel<double> model, const std::vector<int>& src,
                                const std::vector<int>& tgt, double step, int count, std::uint64_t seed) {
  using namespace gecforge::seq2seq;
  ForwardCache<double> cache;
  model.forward_loss(src, tgt, &cache);
  auto grads = Seq2SeqParams<double>::zeros(model.dims());
  model.backward(cache, grads);

  std::vector<double*> params;
  std::vector<double> analytic;
  model.params().for_each([&](const std::string&, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) params.push_back(t.data() + i);
  });
  grads.for_each([&](const std::string&, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) analytic.push_back(t.data()[i]);
  });

  gecforge::Rng rng(seed);
  std::vector<std::size_t> idx(params.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  gecforge::partial_shuffle(std::span<std::size_t>(idx), std::min<std::size_t>(count, idx.size()), rng);

  GradCheck out;
  for (int k = 0; k < count && k < static_cast<int>(idx.size()); ++k) {
    double* p = params[idx[k]];
    const double orig = *p;
    *p = orig + step;
    const double up = model.forward_loss(src, tgt);
    *p = orig - step;
    const double down = model.forward_loss(src, tgt);
    *p = orig;
    const double numeric = (up - down) / (2 * step);
    const double a = analytic[idx[k]];
    const double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-8);
    out.max_rel_error = std::max(out.max_rel_error, rel);
    ++out.checked;
  }
  return out;
}

}  // namespace oracles

#endif

#include "fluency/llm/softmax.hpp"

#include <algorithm>
#include <cmath>

#include "fluency/core/error.hpp"

namespace fluency::llm {

std::vector<double> softmax_temperature(std::span<const double> logits,
                                        double temperature) {
  if (logits.empty()) throw Error(ErrorCode::InvalidInput, "empty logit vector");
  if (!std::all_of(logits.begin(), logits.end(),
                   [](double z) { return std::isfinite(z); })) {
    throw Error(ErrorCode::InvalidInput, "non-finite logit");
  }
  if (!std::isfinite(temperature) || temperature < 0.0) {
    throw Error(ErrorCode::InvalidInput, "temperature must be finite and >= 0");
  }

  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size(), 0.0);

  if (temperature == 0.0) {
    const auto ties = std::count(logits.begin(), logits.end(), top);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      if (logits[i] == top) out[i] = 1.0 / static_cast<double>(ties);
    }
    return out;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - top) / temperature);
    total += out[i];
  }
  // total >= 1 because the max term is exp(0).
  for (auto& p : out) p /= total;
  return out;
}

}  // namespace fluency::llm

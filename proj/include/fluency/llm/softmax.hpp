#pragma once

#include <span>
#include <vector>

namespace fluency::llm {

/// P_i = exp(z_i / T) / sum_j exp(z_j / T), evaluated after subtracting
/// max(z). T = 0 is the argmax limit: mass split evenly over the maxima.
/// Throws Error(InvalidInput) for empty or non-finite logits and negative or
/// non-finite T.
std::vector<double> softmax_temperature(std::span<const double> logits,
                                        double temperature);

}  // namespace fluency::llm

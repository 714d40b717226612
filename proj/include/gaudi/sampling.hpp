#pragma once

namespace gaudi {

/// LLM sampling parameters. Defaults: temperature 0.7, top_p 1.0, 80 tokens,
/// no frequency or presence penalty.
struct SamplingConfig {
  double temperature = 0.7;
  double top_p = 1.0;
  int max_tokens = 80;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;

  friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

/// Throws InvalidInput when a field is outside its accepted range:
/// temperature in [0, 2], top_p in (0, 1], max_tokens >= 1,
/// penalties in [-2, 2].
void validate(const SamplingConfig& sampling);

}  // namespace gaudi

#pragma once

// Value streams feeding the moment, CLT and LIL probes: the Lorentz
// cell-change (or flight) vector along a trajectory, the symmetric Pareto
// oracle and a Gaussian control. A stream is identified by (seed, stream id)
// and its whole state fits in StreamState, so it can be checkpointed and
// resumed bit-identically.

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "superdiff/billiard.hpp"
#include "superdiff/rng.hpp"
#include "superdiff/vec2.hpp"

namespace superdiff::sources {

enum class SourceKind { Lorentz, Pareto, Gaussian };
enum class Observable { Kappa, Phi };

const char* to_string(SourceKind kind) noexcept;
SourceKind parse_source(const std::string& text);

struct SourceSpec {
  SourceKind kind = SourceKind::Pareto;
  std::uint64_t seed = 0;
  /// Pareto scale s (tail constant s^2) or Gaussian standard deviation.
  double scale = 1.0;
  /// Independent components for the oracle and Gaussian sources.
  int dimension = 1;
  std::shared_ptr<const billiard::BilliardTable> table;
  Observable observable = Observable::Kappa;
};

struct StreamState {
  std::uint64_t emitted = 0;
  std::uint64_t rng_position = 0;
  bool started = false;
  billiard::FlightState flight;
  /// Starts redrawn after a grazing or capped flight.
  std::uint64_t resamples = 0;
};

class Source {
 public:
  Source(SourceSpec spec, std::uint64_t stream);

  Vec2 next();
  void fill(std::span<Vec2> out);
  /// Scalar view: the given component of each value.
  void fill_component(std::span<double> out, int component);

  int dimension() const noexcept;
  const SourceSpec& spec() const noexcept { return spec_; }
  std::uint64_t stream() const noexcept { return stream_; }
  const StreamState& state() const noexcept { return state_; }
  void restore(const StreamState& state);

 private:
  void restart();

  SourceSpec spec_;
  std::uint64_t stream_;
  CounterRng counter_;
  StreamState state_;
};

/// Y = +-s U^{-1/2} from one 64-bit word: the low bit is the sign, the high
/// 53 bits the uniform.
inline double pareto_from_word(std::uint64_t word, double scale) noexcept {
  const double magnitude = scale / std::sqrt(to_open_unit(word));
  return (word & 1u) ? -magnitude : magnitude;
}

/// Stream ids are namespaced so probes never share randomness by accident.
constexpr std::uint64_t stream_id(std::uint64_t probe, std::uint64_t index) noexcept {
  return (probe << 40) ^ index;
}

}  // namespace superdiff::sources

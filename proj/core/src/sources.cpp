#include "superdiff/sources.hpp"

#include <cmath>

#include "superdiff/error.hpp"

namespace superdiff::sources {

const char* to_string(SourceKind kind) noexcept {
  switch (kind) {
    case SourceKind::Lorentz: return "lorentz";
    case SourceKind::Pareto: return "pareto";
    case SourceKind::Gaussian: return "gaussian";
  }
  return "?";
}

SourceKind parse_source(const std::string& text) {
  if (text == "lorentz") return SourceKind::Lorentz;
  if (text == "pareto" || text == "oracle") return SourceKind::Pareto;
  if (text == "gaussian") return SourceKind::Gaussian;
  throw Error(ErrorCode::InvalidArgument, "unknown source '" + text + "' (lorentz, pareto, gaussian)");
}

Source::Source(SourceSpec spec, std::uint64_t stream)
    : spec_(std::move(spec)), stream_(stream), counter_(spec_.seed, stream) {
  if (spec_.kind == SourceKind::Lorentz) {
    if (!spec_.table) throw Error(ErrorCode::InvalidArgument, "lorentz source needs a table");
  } else {
    if (spec_.dimension != 1 && spec_.dimension != 2)
      throw Error(ErrorCode::InvalidArgument, "source dimension must be 1 or 2");
    if (!(spec_.scale > 0)) throw Error(ErrorCode::InvalidArgument, "source scale must be positive");
  }
}

int Source::dimension() const noexcept {
  return spec_.kind == SourceKind::Lorentz ? spec_.table->dimension() : spec_.dimension;
}

void Source::restore(const StreamState& state) { state_ = state; }

void Source::restart() {
  RngStream rng(spec_.seed, stream_, state_.rng_position);
  const billiard::InvariantSampler sampler(*spec_.table);
  state_.flight = billiard::to_flight_state(*spec_.table, sampler(rng));
  state_.rng_position = rng.position();
  state_.started = true;
}

Vec2 Source::next() {
  const std::uint64_t i = state_.emitted++;
  switch (spec_.kind) {
    case SourceKind::Pareto: {
      if (spec_.dimension == 1) return {pareto_from_word(counter_.word(i), spec_.scale), 0.0};
      return {pareto_from_word(counter_.word(2 * i), spec_.scale),
              pareto_from_word(counter_.word(2 * i + 1), spec_.scale)};
    }
    case SourceKind::Gaussian: {
      // d = 1 uses both outputs of a pair: value i is half (i & 1) of pair i / 2
      const std::uint64_t pair = spec_.dimension == 1 ? i / 2 : i;
      const auto [a, b] = box_muller(to_open_unit(counter_.word(2 * pair)), to_open_unit(counter_.word(2 * pair + 1)));
      if (spec_.dimension == 1) return {spec_.scale * ((i & 1) ? b : a), 0.0};
      return {spec_.scale * a, spec_.scale * b};
    }
    case SourceKind::Lorentz: {
      if (!state_.started) restart();
      for (;;) {
        try {
          const auto r = billiard::collide(*spec_.table, state_.flight);
          state_.flight = r.next;
          return spec_.observable == Observable::Kappa ? to_real(r.kappa) : r.phi;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::TangentialGrazing && e.code() != ErrorCode::FlightCapExceeded) throw;
          ++state_.resamples;
          restart();
        }
      }
    }
  }
  return {};
}

void Source::fill(std::span<Vec2> out) {
  for (Vec2& v : out) v = next();
}

void Source::fill_component(std::span<double> out, int component) {
  for (double& x : out) {
    const Vec2 v = next();
    x = component == 0 ? v.x : v.y;
  }
}

}  // namespace superdiff::sources

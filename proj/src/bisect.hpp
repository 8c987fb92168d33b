#pragma once

#include <optional>
#include <string>

#include "robustprice/error.hpp"

namespace robustprice::detail {

template <class T>
struct Bisection {
  double lo = 0.0;
  double hi = 1.0;
  std::optional<T> witness;  // from the probe that set `lo`, empty if lo = 0 was never probed
  int probes = 0;
};

/// Largest x in [0,1] for which `probe(x)` returns a value, assuming the
/// accepted set is an interval starting at 0. Probes 1 first, then the
/// midpoints of [0,1] until the bracket is narrower than eps. The probe
/// sequence depends only on the verdicts, so two nested predicates give
/// nested answers.
template <class T, class Probe>
Bisection<T> bisect_unit(Probe&& probe, double eps, int max_iterations) {
  if (!(eps > 0.0)) fail(ErrorCode::invalid_input, "bisection eps must be positive");
  Bisection<T> out;
  ++out.probes;
  if (std::optional<T> top = probe(1.0)) {
    out.lo = out.hi = 1.0;
    out.witness = std::move(top);
    return out;
  }
  int iterations = 0;
  while (out.hi - out.lo >= eps) {
    if (++iterations > max_iterations) {
      fail(ErrorCode::numerical_failure,
           "bisection bracket did not shrink below " + std::to_string(eps) + " within the iteration limit");
    }
    const double mid = 0.5 * (out.lo + out.hi);
    ++out.probes;
    if (std::optional<T> hit = probe(mid)) {
      out.lo = mid;
      out.witness = std::move(hit);
    } else {
      out.hi = mid;
    }
  }
  return out;
}

}  // namespace robustprice::detail

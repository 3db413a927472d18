#ifndef UPIMH_TYPES_HPP
#define UPIMH_TYPES_HPP

#include <span>
#include <vector>

namespace upimh {

// A latent path x_{1:T} (row t = state at time t). For the SMC-sampler
// proposal the same container carries a single static-parameter point
// (horizon == 1, dim == parameter dimension).
struct Trajectory {
  int horizon = 0;
  int dim = 0;
  std::vector<double> data;  // horizon * dim, time-major

  Trajectory() = default;
  Trajectory(int horizon_, int dim_)
      : horizon(horizon_), dim(dim_), data(static_cast<size_t>(horizon_) * dim_, 0.0) {}

  std::span<double> state(int t) {
    return {data.data() + static_cast<size_t>(t) * dim, static_cast<size_t>(dim)};
  }
  std::span<const double> state(int t) const {
    return {data.data() + static_cast<size_t>(t) * dim, static_cast<size_t>(dim)};
  }
  bool empty() const { return data.empty(); }
};

struct ObservationSeries {
  int horizon = 0;
  int dim = 0;
  std::vector<double> values;  // horizon * dim, time-major

  ObservationSeries() = default;
  ObservationSeries(int horizon_, int dim_)
      : horizon(horizon_), dim(dim_), values(static_cast<size_t>(horizon_) * dim_, 0.0) {}

  std::span<double> row(int t) {
    return {values.data() + static_cast<size_t>(t) * dim, static_cast<size_t>(dim)};
  }
  std::span<const double> row(int t) const {
    return {values.data() + static_cast<size_t>(t) * dim, static_cast<size_t>(dim)};
  }
};

}  // namespace upimh

#endif

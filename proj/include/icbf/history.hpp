#pragma once

#include <cstdint>
#include <vector>

#include "icbf/numerics.hpp"

namespace icbf {

// Input samples on the integration grid t_k = k * dt, held in a fixed-size
// ring. The buffer always reaches back at least `span` seconds from the
// newest sample; older samples are dropped as new ones are pushed.
//
// Queries that land on a grid point (within 1e-7 of a step) return the
// stored sample bit-for-bit. Anything between two samples is linearly
// interpolated. Queries outside the retained window throw OutOfRangeError.
class InputHistory {
 public:
  // Fills the grid points covering [t_now - span, t_now] with `fill`.
  // `t_now` is snapped to the nearest grid point.
  InputHistory(double dt, double span, double t_now, const InputVec& fill);

  void push(const InputVec& u);

  InputVec query(double t) const;

  double dt() const { return dt_; }
  double span() const { return span_; }
  double t_now() const { return static_cast<double>(newest_index_) * dt_; }
  double t_oldest() const { return static_cast<double>(oldest_index()) * dt_; }
  std::int64_t newest_index() const { return newest_index_; }
  std::int64_t oldest_index() const {
    return newest_index_ - static_cast<std::int64_t>(count_) + 1;
  }
  const InputVec& latest() const { return at_index(newest_index_); }
  std::size_t size() const { return count_; }
  std::size_t capacity() const { return ring_.size(); }

 private:
  const InputVec& at_index(std::int64_t k) const;

  double dt_;
  double span_;
  std::vector<InputVec> ring_;
  std::size_t head_ = 0;  // slot of the newest sample
  std::size_t count_ = 0;
  std::int64_t newest_index_ = 0;
};

InputVec history_query(const InputHistory& hist, double t);

}  // namespace icbf

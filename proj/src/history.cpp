#include "icbf/history.hpp"

#include <cmath>
#include <sstream>

#include "icbf/errors.hpp"

namespace icbf {
namespace {

constexpr double kGridSnap = 1e-7;

}  // namespace

InputHistory::InputHistory(double dt, double span, double t_now, const InputVec& fill)
    : dt_(dt), span_(span) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw MisuseError("history step must be positive");
  if (!(span >= 0.0) || !std::isfinite(span)) throw MisuseError("history span must be >= 0");
  const auto steps = static_cast<std::size_t>(std::ceil(span / dt - kGridSnap));
  // One extra slot: the plant step reads back to t - span while the newest
  // sample is already t + dt.
  ring_.assign(steps + 2, fill);
  count_ = steps + 1;
  head_ = count_ - 1;
  newest_index_ = static_cast<std::int64_t>(std::llround(t_now / dt));
}

void InputHistory::push(const InputVec& u) {
  head_ = (head_ + 1) % ring_.size();
  ring_[head_] = u;
  ++newest_index_;
  if (count_ < ring_.size()) ++count_;
}

const InputVec& InputHistory::at_index(std::int64_t k) const {
  const auto back = static_cast<std::size_t>(newest_index_ - k);
  return ring_[(head_ + ring_.size() - back) % ring_.size()];
}

InputVec InputHistory::query(double t) const {
  const double pos = t / dt_;
  const double nearest = std::round(pos);
  const auto lo_idx = oldest_index();
  if (std::abs(pos - nearest) <= kGridSnap) {
    const auto k = static_cast<std::int64_t>(nearest);
    if (k >= lo_idx && k <= newest_index_) return at_index(k);
  } else {
    const auto k = static_cast<std::int64_t>(std::floor(pos));
    if (k >= lo_idx && k + 1 <= newest_index_) {
      const double w = pos - static_cast<double>(k);
      return (1.0 - w) * at_index(k) + w * at_index(k + 1);
    }
  }
  std::ostringstream msg;
  msg << "history query at t=" << t << " outside buffered span [" << t_oldest() << ", "
      << t_now() << "]";
  throw OutOfRangeError(msg.str());
}

InputVec history_query(const InputHistory& hist, double t) { return hist.query(t); }

}  // namespace icbf

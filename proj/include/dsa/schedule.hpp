#ifndef DSA_SCHEDULE_HPP
#define DSA_SCHEDULE_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "dsa/errors.hpp"

namespace dsa {

/// Stepsize schedule: either a constant alpha or the diminishing sequence
/// alpha_0 / (1 + t)^decay.
class StepSchedule {
 public:
  // alpha = 0 is allowed: it degenerates DGD into pure neighbor averaging.
  static StepSchedule constant(double alpha) {
    if (!(alpha >= 0.0)) throw InvalidParam("stepsize must be nonnegative");
    StepSchedule s;
    s.alpha0_ = alpha;
    return s;
  }

  static StepSchedule diminishing(double alpha0, double decay) {
    if (!(alpha0 > 0.0)) throw InvalidParam("stepsize must be positive");
    if (!(decay > 0.0)) throw InvalidParam("decay exponent must be positive");
    StepSchedule s;
    s.alpha0_ = alpha0;
    s.decay_ = decay;
    return s;
  }

  double at(std::int64_t t) const {
    return decay_ == 0.0 ? alpha0_
                         : alpha0_ / std::pow(1.0 + static_cast<double>(t),
                                              decay_);
  }

  bool is_constant() const { return decay_ == 0.0; }
  double alpha0() const { return alpha0_; }
  double decay() const { return decay_; }

  std::string describe() const;

 private:
  StepSchedule() = default;
  double alpha0_ = 0.0;
  double decay_ = 0.0;
};

}  // namespace dsa

#endif  // DSA_SCHEDULE_HPP

#include "crosscycle/example_system.hpp"

namespace crosscycle {

LienardSpec example_system(double chi) {
  LienardSpec::Branch right{parse("2"), parse("2*x - 2"), parse("2*x")};
  LienardSpec::Branch left{parse("-4"), parse("5*x - 5*chi", {"chi"}), parse("-4*x")};
  return LienardSpec(std::move(right), std::move(left), {{"chi", chi}});
}

PwlSpec example_pwl(double chi) {
  return PwlSpec{{2.0, -1.0, 2.0, 0.0}, {0.0, -2.0}, {-4.0, -1.0, 5.0, 0.0}, {0.0, -5.0 * chi}};
}

}  // namespace crosscycle

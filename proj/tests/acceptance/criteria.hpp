#pragma once

#include <sstream>
#include <string>

namespace neusim::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Collects a verdict plus a human-readable detail line.
class Verdict {
 public:
  template <typename T>
  Verdict& operator<<(const T& v) {
    os_ << v;
    return *this;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) {
      os_ << "; " << why;
      ok_ = false;
    }
  }
  Outcome outcome() const { return {ok_, os_.str()}; }

 private:
  std::ostringstream os_;
  bool ok_ = true;
};

Outcome determinism();
Outcome exact_oracle();
Outcome compute_bound();
Outcome dsp_curves();
Outcome dma_bandwidth();
Outcome barrier_semantics();
Outcome tile_scaling();
Outcome frequency_scaling();
Outcome ddr_scaling();
Outcome power_identities();
Outcome resnet_runtime();

}  // namespace neusim::acceptance

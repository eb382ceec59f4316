#pragma once

// DSP kernel characterization: cost of a kernel over n elements is one
// offset plus three linear terms (unrolled blocks, SIMD vectors, scalar tail).
//
// Table files are CSV with header
//   kernel,offset,c_block,c_vec,c_scalar,block_len,vec_len
// or JSON: {"kernels": [{"kernel": ..., "offset": ..., ...}, ...]}.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace neusim::engines {

struct DspKernelCurve {
  std::string kernel;
  std::uint64_t offset = 0;
  std::uint64_t c_block = 0;
  std::uint64_t c_vec = 0;
  std::uint64_t c_scalar = 0;
  std::uint64_t block_len = 1;
  std::uint64_t vec_len = 1;

  bool operator==(const DspKernelCurve&) const = default;
};

/// offset + c_block*floor(n/block_len) + c_vec*floor((n mod block_len)/vec_len)
///        + c_scalar*(n mod vec_len), in DSP cycles.
std::uint64_t dsp_kernel_cycles(const DspKernelCurve& curve, std::uint64_t n);

class DspCurveTable {
 public:
  /// Throws ConfigError on invalid curves or duplicate names.
  void add(DspKernelCurve curve);
  /// Throws SimulationError listing the available kernels.
  const DspKernelCurve& at(const std::string& kernel) const;
  bool contains(const std::string& kernel) const { return curves_.count(kernel) > 0; }
  std::vector<std::string> names() const;
  std::size_t size() const { return curves_.size(); }

 private:
  std::map<std::string, DspKernelCurve> curves_;
};

DspCurveTable parse_dsp_curves_csv(std::istream& in);
DspCurveTable parse_dsp_curves_json(std::istream& in);
/// Picks the format from the extension (.json, otherwise CSV).
DspCurveTable load_dsp_curves(const std::filesystem::path& path);

}  // namespace neusim::engines

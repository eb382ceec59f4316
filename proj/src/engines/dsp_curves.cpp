#include "neusim/engines/dsp_curves.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "neusim/error.hpp"

namespace neusim::engines {

std::uint64_t dsp_kernel_cycles(const DspKernelCurve& c, std::uint64_t n) {
  const std::uint64_t blocks = n / c.block_len;
  const std::uint64_t rest = n % c.block_len;
  return c.offset + c.c_block * blocks + c.c_vec * (rest / c.vec_len) + c.c_scalar * (n % c.vec_len);
}

void DspCurveTable::add(DspKernelCurve curve) {
  const auto where = "DSP kernel '" + curve.kernel + "'";
  if (curve.kernel.empty()) throw ConfigError("DSP kernel curve has an empty name");
  if (curve.vec_len == 0 || curve.block_len == 0) throw ConfigError(where + ": block_len and vec_len must be >= 1");
  if (curve.block_len % curve.vec_len != 0) throw ConfigError(where + ": block_len must be a multiple of vec_len");
  auto name = curve.kernel;
  if (!curves_.emplace(name, std::move(curve)).second) throw ConfigError(where + " defined twice");
}

const DspKernelCurve& DspCurveTable::at(const std::string& kernel) const {
  auto it = curves_.find(kernel);
  if (it != curves_.end()) return it->second;
  std::string known;
  for (const auto& [name, _] : curves_) known += (known.empty() ? "" : ", ") + name;
  throw SimulationError("unknown DSP kernel '" + kernel + "' (available: " + (known.empty() ? "none" : known) + ")");
}

std::vector<std::string> DspCurveTable::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : curves_) out.push_back(name);
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

std::uint64_t parse_count(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a nonnegative integer, got '" + s + "'");
  }
}

}  // namespace

DspCurveTable parse_dsp_curves_csv(std::istream& in) {
  static const std::vector<std::string> kColumns{"kernel", "offset", "c_block", "c_vec", "c_scalar", "block_len",
                                                 "vec_len"};
  DspCurveTable table;
  std::string line;
  std::vector<std::size_t> col;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (col.empty()) {
      for (const auto& name : kColumns) {
        auto it = std::find(cells.begin(), cells.end(), name);
        if (it == cells.end()) throw ConfigError("DSP curve table: header lacks column '" + name + "'");
        col.push_back(static_cast<std::size_t>(it - cells.begin()));
      }
      continue;
    }
    const auto where = "DSP curve table line " + std::to_string(line_no);
    if (cells.size() < kColumns.size()) throw ConfigError(where + ": expected " + std::to_string(kColumns.size()) + " cells");
    DspKernelCurve c;
    c.kernel = cells[col[0]];
    c.offset = parse_count(cells[col[1]], where);
    c.c_block = parse_count(cells[col[2]], where);
    c.c_vec = parse_count(cells[col[3]], where);
    c.c_scalar = parse_count(cells[col[4]], where);
    c.block_len = parse_count(cells[col[5]], where);
    c.vec_len = parse_count(cells[col[6]], where);
    table.add(std::move(c));
  }
  if (col.empty()) throw ConfigError("DSP curve table is empty");
  return table;
}

DspCurveTable parse_dsp_curves_json(std::istream& in) {
  DspCurveTable table;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& k : doc.at("kernels")) {
      DspKernelCurve c;
      c.kernel = k.at("kernel").get<std::string>();
      c.offset = k.at("offset").get<std::uint64_t>();
      c.c_block = k.at("c_block").get<std::uint64_t>();
      c.c_vec = k.at("c_vec").get<std::uint64_t>();
      c.c_scalar = k.at("c_scalar").get<std::uint64_t>();
      c.block_len = k.at("block_len").get<std::uint64_t>();
      c.vec_len = k.at("vec_len").get<std::uint64_t>();
      table.add(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("DSP curve table: ") + e.what());
  }
  return table;
}

DspCurveTable load_dsp_curves(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open DSP curve table '" + path.string() + "'");
  return path.extension() == ".json" ? parse_dsp_curves_json(in) : parse_dsp_curves_csv(in);
}

}  // namespace neusim::engines

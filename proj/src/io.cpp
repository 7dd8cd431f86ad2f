#include "recq/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace recq {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot open for writing: " + p.string());
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open for reading: " + p.string());
  return in;
}

double parse_double(const std::string& s, const fs::path& p) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw IoError("bad number '" + s + "' in " + p.string());
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_chain(const QuantizedChain& chain, const std::string& dir) {
  const int n = static_cast<int>(chain.grids.size()) - 1;
  if (n < 0) throw IoError("save_chain: empty chain");
  fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create directory: " + root.string());

  json manifest;
  manifest["steps"] = n;
  manifest["levels"] = chain.levels;
  {
    auto out = open_out(root / "chain.json");
    out << manifest.dump(2) << "\n";
    if (!out) throw IoError("write failed: chain.json");
  }

  for (int k = 0; k <= n; ++k) {
    auto out = open_out(root / ("grid_" + std::to_string(k) + ".csv"));
    out << "index,point,weight\n";
    const auto& g = chain.grids[static_cast<std::size_t>(k)].points;
    const auto& w = chain.marginal_weights[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < g.size(); ++i) {
      out << i << ',' << format_double(g[i]) << ',' << format_double(w[i]) << '\n';
    }
    if (!out) throw IoError("write failed: grid csv");
  }

  for (int k = 0; k < n; ++k) {
    auto out = open_out(root / ("transition_" + std::to_string(k) + ".csv"));
    out << "i,j,p\n";
    const auto& tr = chain.transitions[static_cast<std::size_t>(k)];
    const std::size_t rows = chain.grids[static_cast<std::size_t>(k)].points.size();
    const std::size_t cols = chain.grids[static_cast<std::size_t>(k) + 1].points.size();
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        out << i << ',' << j << ',' << format_double(tr[i * cols + j]) << '\n';
      }
    }
    if (!out) throw IoError("write failed: transition csv");
  }
}

QuantizedChain load_chain(const std::string& dir) {
  fs::path root(dir);
  json manifest;
  {
    auto in = open_in(root / "chain.json");
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw IoError(std::string("bad chain.json: ") + e.what());
    }
  }
  if (!manifest.contains("steps") || !manifest["steps"].is_number_integer()) {
    throw IoError("chain.json: missing steps");
  }
  const int n = manifest["steps"].get<int>();
  if (n < 0) throw IoError("chain.json: negative step count");

  QuantizedChain chain;
  chain.levels = manifest.value("levels", std::vector<int>{});
  chain.grids.resize(static_cast<std::size_t>(n) + 1);
  chain.marginal_weights.resize(static_cast<std::size_t>(n) + 1);
  chain.transitions.resize(static_cast<std::size_t>(n));
  chain.reports.resize(static_cast<std::size_t>(n) + 1);

  for (int k = 0; k <= n; ++k) {
    const fs::path p = root / ("grid_" + std::to_string(k) + ".csv");
    auto in = open_in(p);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty grid csv: " + p.string());
    auto& g = chain.grids[static_cast<std::size_t>(k)].points;
    auto& w = chain.marginal_weights[static_cast<std::size_t>(k)];
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      if (cells.size() != 3) throw IoError("bad grid row in " + p.string());
      g.push_back(parse_double(cells[1], p));
      w.push_back(parse_double(cells[2], p));
    }
    if (g.empty()) throw IoError("grid csv has no rows: " + p.string());
  }

  for (int k = 0; k < n; ++k) {
    const fs::path p = root / ("transition_" + std::to_string(k) + ".csv");
    auto in = open_in(p);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty transition csv: " + p.string());
    const std::size_t rows = chain.grids[static_cast<std::size_t>(k)].points.size();
    const std::size_t cols = chain.grids[static_cast<std::size_t>(k) + 1].points.size();
    auto& tr = chain.transitions[static_cast<std::size_t>(k)];
    tr.assign(rows * cols, 0.0);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      if (cells.size() != 3) throw IoError("bad transition row in " + p.string());
      const long i = std::strtol(cells[0].c_str(), nullptr, 10);
      const long j = std::strtol(cells[1].c_str(), nullptr, 10);
      if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= rows ||
          static_cast<std::size_t>(j) >= cols) {
        throw IoError("transition index out of range in " + p.string());
      }
      tr[static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)] =
          parse_double(cells[2], p);
    }
  }

  if (chain.levels.empty()) {
    for (const auto& g : chain.grids) chain.levels.push_back(static_cast<int>(g.points.size()));
  }
  return chain;
}

}  // namespace recq

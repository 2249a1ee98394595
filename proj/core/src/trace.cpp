#include "petrec/trace.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "petrec/io.hpp"

namespace petrec {

void write_trace_csv(const SolverTrace& trace, const std::string& path,
                     bool include_wall_ms) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "k,phi,eta,tau,eps,re";
  if (include_wall_ms) out << ",wall_ms";
  out << "\n";
  for (const TraceRow& r : trace.rows) {
    out << r.k << ',' << format_g17(r.phi) << ',' << format_g17(r.eta) << ','
        << format_g17(r.tau) << ',' << format_g17(r.eps) << ',' << format_g17(r.re);
    if (include_wall_ms) out << ',' << format_g17(r.wall_ms);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

void write_wall_csv(const SolverTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_wall_csv: cannot open " + path);
  out << "k,wall_ms\n";
  for (const TraceRow& r : trace.rows)
    out << r.k << ',' << format_g17(r.wall_ms) << "\n";
  if (!out) throw std::runtime_error("write_wall_csv: write failed for " + path);
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trace_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_trace_csv: empty file " + path);
  const bool has_wall = line.find("wall_ms") != std::string::npos;

  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    TraceRow r;
    auto next = [&](double& dst) {
      if (!std::getline(ss, field, ','))
        throw std::runtime_error("read_trace_csv: short row in " + path);
      dst = std::strtod(field.c_str(), nullptr);
    };
    if (!std::getline(ss, field, ','))
      throw std::runtime_error("read_trace_csv: short row in " + path);
    r.k = std::strtol(field.c_str(), nullptr, 10);
    next(r.phi);
    next(r.eta);
    next(r.tau);
    next(r.eps);
    next(r.re);
    if (has_wall) next(r.wall_ms);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace petrec
